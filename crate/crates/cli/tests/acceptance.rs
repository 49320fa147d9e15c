//! Binary-level checks: the benchmark sweep brackets the exact optimum with
//! small gaps, and seeded runs are byte-identical.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;

fn treeopt() -> Command {
    Command::new(env!("CARGO_BIN_EXE_treeopt"))
}

fn run_ok(cmd: &mut Command) {
    let out = cmd.output().expect("binary runs");
    assert!(
        out.status.success(),
        "command failed: {}\n{}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
}

const SWEEP_CONFIG: &str = "\
n = 20
m = [25, 30, 35, 40, 45, 50, 55, 60]
k = 5
trials = 5
seed = 1
methods = [\"greedy\", \"convex\", \"exact\"]
weights = \"unit\"
candidates = 10
fixed_timing = true
";

fn run_sweep(dir: &Path, csv_name: &str) -> Vec<BTreeMap<String, String>> {
    let config = dir.join("sweep.toml");
    std::fs::write(&config, SWEEP_CONFIG).unwrap();
    let csv_path = dir.join(csv_name);
    run_ok(treeopt().args([
        "bench",
        "--config",
        config.to_str().unwrap(),
        "--out-csv",
        csv_path.to_str().unwrap(),
    ]));
    let mut rdr = csv::Reader::from_path(&csv_path).unwrap();
    let headers = rdr.headers().unwrap().clone();
    rdr.records()
        .map(|rec| {
            let rec = rec.unwrap();
            headers
                .iter()
                .zip(rec.iter())
                .map(|(h, v)| (h.to_string(), v.to_string()))
                .collect()
        })
        .collect()
}

#[test]
fn sweep_brackets_the_exact_optimum_with_small_gaps() {
    let dir = tempfile::tempdir().unwrap();
    let rows = run_sweep(dir.path(), "sweep.csv");
    assert_eq!(rows.len(), 8 * 5 * 3);

    let mut groups: BTreeMap<(String, String), BTreeMap<String, (f64, f64, f64)>> =
        BTreeMap::new();
    for row in &rows {
        let tau: f64 = row["tau"].parse().unwrap();
        let lower: f64 = row["lower"].parse().unwrap();
        let upper: f64 = row["upper"].parse().unwrap();
        groups
            .entry((row["m"].clone(), row["trial"].clone()))
            .or_default()
            .insert(row["method"].clone(), (tau, lower, upper));
    }
    let mut gaps = Vec::new();
    for (key, by_method) in &groups {
        let (tau_greedy, lower, upper) = by_method["greedy"];
        let (opt, _, _) = by_method["exact"];
        assert!(lower <= upper, "{key:?}: certificate inverted");
        assert!(
            tau_greedy - 1e-9 <= opt && opt <= upper + 1e-9,
            "{key:?}: optimum {opt} outside [{tau_greedy}, {upper}]"
        );
        gaps.push(upper - tau_greedy);
    }
    gaps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = (gaps[gaps.len() / 2] + gaps[(gaps.len() - 1) / 2]) / 2.0;
    assert!(median <= 0.1, "median bound gap {median} nats");
    println!("PASS benchmark sweep brackets the exact optimum, median gap {median:.4} nats");
}

#[test]
fn seeded_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    run_sweep(dir.path(), "a.csv");
    run_sweep(dir.path(), "b.csv");
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b, "CSV outputs differ between identical runs");

    let graph = dir.path().join("g.txt");
    std::fs::write(&graph, "n 5\n0 1\n1 2\n2 3\n3 4\n").unwrap();
    for name in ["r1.json", "r2.json"] {
        run_ok(treeopt().args([
            "synth",
            "--graph",
            graph.to_str().unwrap(),
            "--complete-complement",
            "-k",
            "2",
            "--method",
            "all",
            "--repair",
            "--seed",
            "9",
            "--fixed-timing",
            "--out",
            dir.path().join(name).to_str().unwrap(),
        ]));
    }
    let a = std::fs::read(dir.path().join("r1.json")).unwrap();
    let b = std::fs::read(dir.path().join("r2.json")).unwrap();
    assert_eq!(a, b, "JSON outputs differ between identical runs");
    println!("PASS identical seeds give byte-identical CSV and JSON outputs");
}
