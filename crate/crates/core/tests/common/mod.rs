#![allow(dead_code)]

use std::path::PathBuf;
use std::process::Command;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn fixture(name: &str) -> PathBuf {
    crate_dir().join("fixtures").join(name)
}

pub fn fixture_str(name: &str) -> String {
    fixture(name).to_string_lossy().into_owned()
}

pub fn reference(name: &str) -> Vec<Vec<String>> {
    let path = crate_dir().join("tests/reference").join(name);
    let mut rdr = csv::Reader::from_path(&path).unwrap();
    rdr.records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect()
}

pub fn reference_numbers(name: &str) -> Vec<Vec<f64>> {
    reference(name)
        .into_iter()
        .map(|row| row.iter().map(|c| c.parse().unwrap()).collect())
        .collect()
}

/// Manual Cm row printed under the Czech market commodity table.
pub const TABLE3_CMS: [(&str, &str); 4] = [
    ("USD", "0.121001"),
    ("CZK", "0.951979"),
    ("EUR", "0.077722"),
    ("GBP", "0.014648"),
];

/// Arguments for `monmin report --table N` against the shipped fixtures.
pub fn report_args(table: &str) -> Vec<String> {
    let mut args: Vec<String> = vec!["report".into(), "--table".into(), table.into()];
    let mut push = |a: &str, b: String| {
        args.push(a.to_string());
        args.push(b);
    };
    match table {
        "1" => push("--economies", fixture_str("table1.csv")),
        "2" => {
            push("--rates", fixture_str("table2_rates.csv"));
            push("--cm", "USD=0.11918".into());
        }
        "3" => {
            push("--basket", fixture_str("table3_basket.csv"));
            for (c, v) in TABLE3_CMS {
                push("--cm", format!("{c}={v}"));
            }
        }
        "4" | "4b" => {
            push("--basket", fixture_str("table4_basket.csv"));
            push("--economies", fixture_str("table1.csv"));
        }
        "5" => push("--series", fixture_str("table5_series.csv")),
        other => panic!("no fixture set for table {other}"),
    }
    args
}

pub struct RunOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run_bin(args: &[String]) -> RunOutput {
    let out = Command::new(env!("CARGO_BIN_EXE_monmin"))
        .args(args)
        .env_remove("MONMIN_TETCY")
        .output()
        .expect("spawn monmin");
    RunOutput {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

/// Peaks and troughs by direct inspection of each point and its neighbours.
/// A point opening a run of equal values is compared against the value just
/// before it and the first different value after the run.
pub fn brute_force_extrema(values: &[(i32, f64)]) -> (Vec<i32>, Vec<i32>) {
    let mut peaks = Vec::new();
    let mut troughs = Vec::new();
    let n = values.len();
    for i in 1..n {
        let v = values[i].1;
        if values[i - 1].1 == v {
            continue;
        }
        let mut k = i;
        while k < n && values[k].1 == v {
            k += 1;
        }
        if k == n {
            continue;
        }
        let (before, after) = (values[i - 1].1, values[k].1);
        if before < v && after < v {
            peaks.push(values[i].0);
        }
        if before > v && after > v {
            troughs.push(values[i].0);
        }
    }
    (peaks, troughs)
}

/// A random series of length 3..=100 where roughly a third of the steps
/// repeat the previous value.
pub fn random_series(rng: &mut ChaCha8Rng) -> Vec<(i32, f64)> {
    let len = rng.gen_range(3..=100);
    let start = rng.gen_range(1900..2000);
    let mut out = Vec::with_capacity(len);
    let mut last = rng.gen_range(0..10) as f64;
    for i in 0..len {
        let value = match rng.gen_range(0..3) {
            0 if i > 0 => last,
            1 => rng.gen_range(0..10) as f64,
            _ => rng.gen_range(-1000.0..1000.0),
        };
        out.push((start + i as i32, value));
        last = value;
    }
    out
}

/// Header and rows of a CSV rendered by the CLI, skipping `#` note lines.
pub fn csv_table(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = rdr.headers().unwrap().iter().map(str::to_string).collect();
    let rows = rdr
        .records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect();
    (header, rows)
}
