use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mono-clt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write_k3(dir: &Path) -> String {
    let path = dir.join("k3.edges");
    std::fs::write(&path, "# vertices 3\n0 1\n1 2\n0 2\n").unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn gen_writes_edge_list() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("k5.edges");
    let out = run(&["gen", "--family", "complete", "--n", "5", "-o", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# vertices 5"));
    assert_eq!(lines.filter(|l| !l.trim().is_empty()).count(), 10);
}

#[test]
fn gen_is_deterministic_and_validates() {
    let args = [
        "gen",
        "--family",
        "erdos_renyi",
        "--n",
        "50",
        "--p",
        "0.1",
        "--seed",
        "7",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(code(&run(&["gen", "--family", "cycle", "--n", "1"])), 2);
    assert_eq!(
        code(&run(&["gen", "--family", "erdos_renyi", "--n", "5", "--p", "0.5"])),
        2
    );
    assert_eq!(code(&run(&["gen", "--family", "erdos_renyi", "--n", "5"])), 2);
    assert_eq!(code(&run(&["gen", "--family", "cycle", "--n", "5", "--bogus"])), 2);
}

#[test]
fn bound_prints_versioned_json() {
    let out = run(&["bound", "--m", "100", "--c", "10"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["schema"], "mono-clt/1");
    let w = v["wasserstein_bound"].as_f64().unwrap();
    assert_eq!(w, mono_clt::bounds::wasserstein_bound(100, 10).unwrap());
    assert!((w - 3.3105).abs() < 1e-3);

    let v: Value = serde_json::from_str(&stdout(&run(&["bound", "--m", "2", "--c", "4"]))).unwrap();
    assert_eq!(v["poisson_tv_bound"].as_f64(), Some(1.0));
    assert_eq!(v["poisson_tv_vacuous"], true);

    let v: Value = serde_json::from_str(&stdout(&run(&["bound", "--m", "100", "--c", "2", "--km", "100"]))).unwrap();
    assert!((v["remark_rate"].as_f64().unwrap() - 0.5284).abs() < 1e-4);

    assert_eq!(code(&run(&["bound", "--m", "0", "--c", "4"])), 2);
    assert_eq!(code(&run(&["bound", "--m", "5"])), 2);
}

#[test]
fn exact_prints_pmf_csv() {
    let dir = TempDir::new().unwrap();
    let k3 = write_k3(dir.path());
    let out = run(&["exact", &k3, "--c", "2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "y,prob\n1,0.75\n3,0.25\n");
}

#[test]
fn exact_reports_infeasible_enumeration() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("k12.edges");
    let out = run(&["gen", "--family", "complete", "--n", "12", "-o", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let out = run(&["exact", path.to_str().unwrap(), "--c", "5", "--cap", "1000"]);
    assert_eq!(code(&out), 3);
    let out = run(&["verify", path.to_str().unwrap(), "--c", "5", "--exact", "--cap", "1000"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn verify_exact_passes_on_triangle() {
    let dir = TempDir::new().unwrap();
    let k3 = write_k3(dir.path());
    let out = run(&["verify", &k3, "--c", "2", "--exact"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["schema"], "mono-clt/1");
    assert_eq!(report["method"], "exact");
    assert!(report["statistical_tolerance"].is_null());
    for verdict in report["verdicts"].as_array().unwrap() {
        assert_eq!(verdict["pass"], true);
    }
    let parsed = mono_clt::VerificationReport::from_json(&stdout(&out)).unwrap();
    assert!(parsed.all_pass());
}

#[test]
fn verify_needs_exactly_one_method() {
    let dir = TempDir::new().unwrap();
    let k3 = write_k3(dir.path());
    assert_eq!(code(&run(&["verify", &k3, "--c", "2", "--exact", "--mc"])), 2);
    assert_eq!(code(&run(&["verify", &k3, "--c", "2"])), 2);
    let out = run(&["verify", &k3, "--c", "2", "--mc", "--samples", "20000", "--seed", "3"]);
    assert_eq!(code(&out), 0);
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["statistical_tolerance"]["n_samples"], 20000);
}

#[test]
fn simulate_is_reproducible_with_provenance() {
    let dir = TempDir::new().unwrap();
    let k3 = write_k3(dir.path());
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |out: &Path, threads: &str| {
        run(&[
            "--threads",
            threads,
            "simulate",
            &k3,
            "--c",
            "2",
            "--samples",
            "100000",
            "--seed",
            "1",
            "-o",
            out.to_str().unwrap(),
        ])
    };
    assert_eq!(code(&args(&a, "1")), 0);
    assert_eq!(code(&args(&b, "3")), 0);
    let csv = std::fs::read(&a).unwrap();
    assert_eq!(csv, std::fs::read(&b).unwrap());
    assert!(String::from_utf8(csv).unwrap().starts_with("y,count\n"));
    let provenance: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("a.csv.json")).unwrap()).unwrap();
    assert_eq!(provenance["schema"], "mono-clt/1");
    assert_eq!(provenance["seed"], 1);
    assert_eq!(provenance["n_samples"], 100000);
    let g: mono_clt::Graph = std::fs::read_to_string(&k3).unwrap().parse().unwrap();
    assert_eq!(provenance["graph_hash"], g.content_hash());

    let small = ["simulate", k3.as_str(), "--c", "2", "--samples", "1000", "--seed", "1"];
    assert_eq!(run(&small).stdout, run(&small).stdout);
    assert_eq!(code(&run(&["simulate", &k3, "--c", "2", "--samples", "10"])), 2);
}

#[test]
fn sweep_emits_fixed_header() {
    let out = run(&[
        "sweep",
        "--family",
        "star",
        "--sizes",
        "11,101,1001",
        "--colors",
        "10m",
        "--exact",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("family,n,m,c,K_m,triangles,method,w1,w1_bound,tv,tv_bound,remark_rate,verdict")
    );
    let tv: Vec<f64> = lines.map(|l| l.split(',').nth(9).unwrap().parse().unwrap()).collect();
    assert_eq!(tv.len(), 3);
    assert!(tv[0] > tv[1] && tv[1] > tv[2], "{tv:?}");
}

#[test]
fn help_lists_flags() {
    let help = stdout(&run(&["verify", "--help"]));
    for flag in [
        "--exact",
        "--mc",
        "--samples",
        "--seed",
        "--cap",
        "--c0",
        "--threads",
        "--output",
    ] {
        assert!(help.contains(flag), "missing {flag}");
    }
    assert_eq!(code(&run(&["frobnicate"])), 2);
}
