use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qtms_lr::csvio::{read_histogram, read_roc, read_scores};
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtms-lr"))
        .args(args)
        .output()
        .expect("spawn qtms-lr")
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

fn ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn outputs_identical_across_workers_and_reruns() {
    let dir = TempDir::new().unwrap();
    let base = [
        "--n",
        "10",
        "--rho",
        "0.9",
        "--trials",
        "20000",
        "--seed",
        "42",
        "--detector",
        "lr-approx",
    ];
    let mut files = Vec::new();
    for (tag, workers) in [("a", "1"), ("b", "8"), ("c", "1")] {
        let roc = path(&dir, &format!("roc_{tag}.csv"));
        let cmp = path(&dir, &format!("cmp_{tag}.csv"));
        let hist = path(&dir, &format!("hist_{tag}.csv"));
        let sim = path(&dir, &format!("sim_{tag}.csv"));
        let w = ["--workers", workers];
        ok(&[&["roc"][..], &base, &w, &["--theory", "--out", s(&roc)]].concat());
        ok(&[
            &["compare"][..],
            &base,
            &w,
            &["--detectors", "lr,lr-approx,d1", "--out", s(&cmp)],
        ]
        .concat());
        ok(&[&["hist"][..], &base, &w, &["--bins", "30", "--out", s(&hist)]].concat());
        ok(&[&["simulate"][..], &base, &w, &["--null", "--out", s(&sim)]].concat());
        let null = sim.with_extension("null.csv");
        files.push([roc, cmp, hist, sim, null].map(|p| fs::read(p).unwrap()));
    }
    assert_eq!(files[0], files[1], "1 vs 8 workers");
    assert_eq!(files[0], files[2], "rerun");
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&["simulate", "--rho", "1.5", "--trials", "5"]), 2);
    assert_eq!(code(&["simulate", "--trials", "0"]), 2);
    assert_eq!(code(&["hist", "--trials", "0"]), 2);
    assert_eq!(code(&["simulate", "--detector", "best"]), 2);
    assert_eq!(code(&["simulate", "--frobnicate"]), 2);
    assert_eq!(code(&["roc", "--trials", "5", "--grid", "log:1:0:3"]), 2);
    assert_eq!(code(&["simulate", "--trials", "5", "--workers", "0"]), 2);
    assert_eq!(
        code(&[
            "simulate",
            "--n",
            "2",
            "--rho",
            "0.5",
            "--trials",
            "200",
            "--detector",
            "lr-approx",
            "--invalid-approx",
            "error"
        ]),
        3
    );
    let unwritable = path(&dir, "missing/out.csv");
    assert_eq!(code(&["simulate", "--trials", "5", "--out", s(&unwritable)]), 4);
    assert_eq!(code(&["simulate", "--config", s(&path(&dir, "nope.cfg"))]), 4);
    assert_eq!(code(&["detect", "--samples", s(&path(&dir, "nope.csv"))]), 4);
    let bad = path(&dir, "bad.cfg");
    fs::write(&bad, "n = 10\ncolour = blue\n").unwrap();
    assert_eq!(code(&["simulate", "--config", s(&bad)]), 2);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn simulate_writes_requested_scores() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "scores.csv");
    let null = path(&dir, "h0.csv");
    ok(&[
        "simulate",
        "--n",
        "50",
        "--rho",
        "0.2",
        "--trials",
        "123",
        "--null",
        "--null-out",
        s(&null),
        "--out",
        s(&out),
    ]);
    let h1 = read_scores(fs::File::open(&out).unwrap()).unwrap();
    let h0 = read_scores(fs::File::open(&null).unwrap()).unwrap();
    assert_eq!((h1.len(), h0.len()), (123, 123));
    assert_ne!(h0, h1);
    assert!(h0.iter().chain(&h1).all(|v| *v >= 0.0));
    assert!(!path(&dir, "scores.null.csv").exists());

    let stdout = ok(&["simulate", "--n", "50", "--trials", "4"]).stdout;
    assert_eq!(String::from_utf8(stdout).unwrap().lines().count(), 5);
    assert_eq!(code(&["simulate", "--trials", "4", "--null"]), 2);
}

#[test]
fn flags_override_config() {
    let dir = TempDir::new().unwrap();
    let cfg = path(&dir, "exp.cfg");
    fs::write(&cfg, "# test\nn = 40\nrho = 0.3\ntrials = 50\nseed = 9\n").unwrap();
    let from_config = ok(&["simulate", "--config", s(&cfg)]).stdout;
    let from_flags = ok(&["simulate", "--n", "40", "--rho", "0.3", "--trials", "50", "--seed", "9"]).stdout;
    assert_eq!(from_config, from_flags);
    let overridden = ok(&["simulate", "--config", s(&cfg), "--rho", "0.6"]).stdout;
    let expected = ok(&["simulate", "--n", "40", "--rho", "0.6", "--trials", "50", "--seed", "9"]).stdout;
    assert_eq!(overridden, expected);
}

#[test]
fn roc_emits_readable_table_and_svg() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "roc.csv");
    let svg = path(&dir, "roc.svg");
    ok(&[
        "roc",
        "--n",
        "1000",
        "--rho",
        "0",
        "--trials",
        "20000",
        "--theory",
        "--out",
        s(&out),
        "--svg",
        s(&svg),
    ]);
    let table = read_roc(fs::File::open(&out).unwrap()).unwrap();
    assert_eq!(table.names, ["pd_empirical", "pd_theory"]);
    assert_eq!(table.p_fa.len(), 59);
    for (p, t) in table.p_fa.iter().zip(&table.columns[1]) {
        assert!((p - t).abs() < 1e-11);
    }
    assert!(fs::read_to_string(&svg).unwrap().starts_with("<svg"));
}

#[test]
fn config_extras_drive_the_grid_and_detectors() {
    let dir = TempDir::new().unwrap();
    let cfg = path(&dir, "fig.cfg");
    fs::write(
        &cfg,
        "n = 10\nrho = 0.9\ntrials = 5000\ndetectors = lr,d1\ngrid = list:0.05,0.5\ntheory = true\n",
    )
    .unwrap();
    let table = read_roc(ok(&["compare", "--config", s(&cfg)]).stdout.as_slice()).unwrap();
    assert_eq!(table.names, ["pd_lr", "pd_lr_theory", "pd_d1", "pd_d1_theory"]);
    assert_eq!(table.p_fa, [0.05, 0.5]);
    let table = read_roc(
        ok(&[
            "compare",
            "--config",
            s(&cfg),
            "--theory",
            "false",
            "--grid",
            "list:0.2",
        ])
        .stdout
        .as_slice(),
    )
    .unwrap();
    assert_eq!(table.names, ["pd_lr", "pd_d1"]);
    assert_eq!(table.p_fa, [0.2]);
}

#[test]
fn compare_mismatched_plans() {
    let dir = TempDir::new().unwrap();
    let a = path(&dir, "a.cfg");
    let b = path(&dir, "b.cfg");
    fs::write(&a, "rho = 0.5\ndetector = lr\n").unwrap();
    fs::write(&b, "rho = 0.7\ndetector = d1\n").unwrap();
    let base = [
        "compare",
        "--n",
        "10",
        "--trials",
        "2000",
        "--plan",
        s(&a),
        "--plan",
        s(&b),
    ];
    let out = run(&base);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("differ"));
    let table = read_roc(ok(&[&base[..], &["--allow-mixed"]].concat()).stdout.as_slice()).unwrap();
    assert_eq!(table.names, ["pd_lr", "pd_d1"]);
    assert_eq!(code(&[&base[..], &["--detectors", "lr"]].concat()), 2);
}

#[test]
fn hist_overlay_round_trips() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "hist.csv");
    let svg = path(&dir, "hist.svg");
    ok(&[
        "hist",
        "--n",
        "50000",
        "--rho",
        "0.01",
        "--trials",
        "5000",
        "--bins",
        "20",
        "--range",
        "0:30",
        "--out",
        s(&out),
        "--svg",
        s(&svg),
    ]);
    let hist = read_histogram(fs::File::open(&out).unwrap()).unwrap();
    assert_eq!(hist.counts.len(), 20);
    let pdf = hist.pdf_theory.expect("overlay column");
    let mass: f64 = pdf.iter().map(|d| d * 1.5).sum();
    let expected = qtms_lr::disttheory::ncx2_1_cdf(30.0, 10.0);
    assert!((mass - expected).abs() < 1e-9, "{mass} vs {expected}");
    assert!(fs::read_to_string(&svg).unwrap().contains("noncentral chi2_1(10)"));
}

#[test]
fn detect_scores_sample_file() {
    let dir = TempDir::new().unwrap();
    let samples = path(&dir, "iq.csv");
    fs::write(
        &samples,
        "i1,q1,i2,q2\n1.5,0.5,1.4,-0.6\n-0.8,1.2,-0.9,-1.1\n1.1,-0.7,1.0,0.8\n",
    )
    .unwrap();
    let text = String::from_utf8(ok(&["detect", "--samples", s(&samples)]).stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "detector,score,rho_hat");
    assert!(lines[1].starts_with("lr,"));
    assert!(lines[2].starts_with("lr-approx,"));
    let d1: f64 = lines[3].split(',').nth(1).unwrap().parse().unwrap();
    let expected = (1.5 * 1.4 - 0.5 * -0.6 + -0.8 * -0.9 - 1.2 * -1.1 + 1.1 * 1.0 - -0.7 * 0.8) / 3.0;
    assert!((d1 - expected).abs() < 1e-12);
}

#[test]
fn experiment_recipes_run() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../experiments");
    let mut seen = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let cfg = entry.unwrap().path();
        if cfg.extension().and_then(|e| e.to_str()) != Some("cfg") {
            continue;
        }
        let text = fs::read_to_string(&cfg).unwrap();
        let command = text
            .lines()
            .next()
            .and_then(|l| l.strip_prefix("# qtms-lr "))
            .and_then(|l| l.split_whitespace().next())
            .expect("recipe names its subcommand on the first line");
        ok(&[command, "--config", s(&cfg), "--trials", "500"]);
        seen += 1;
    }
    assert_eq!(seen, 8);
}
