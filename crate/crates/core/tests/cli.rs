use std::process::Command;

use mncl::cli::{self, EXIT_MISMATCH, EXIT_OK, EXIT_PARAM};

fn run(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let argv = std::iter::once("mncl").chain(args.iter().copied());
    let code = cli::run(argv, &mut out);
    (code, String::from_utf8(out).unwrap())
}

#[test]
fn validate_finds_no_mismatches() {
    let (code, out) = run(&[
        "validate",
        "--pairs",
        "6",
        "--antennas",
        "2",
        "--trials",
        "100",
        "--seed",
        "7",
    ]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.contains("mismatches: 0"), "{out}");
    assert_ne!(EXIT_MISMATCH, EXIT_OK);
}

#[test]
fn parameter_errors_exit_with_one() {
    for args in [
        &["simulate", "--pairs", "0"][..],
        &["simulate", "--antennas", "0"],
        &["simulate", "--scheme", "mimo"],
        &["simulate", "--trials", "0"],
        &["simulate", "--radius-m", "0.5"],
        &["validate", "--pairs", "16"],
        &["nonsense"],
    ] {
        let (code, _) = run(args);
        assert_eq!(code, EXIT_PARAM, "{args:?}");
    }
}

#[test]
fn fit_recovers_an_exact_two_segment_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("aggregate.csv");
    let mut csv = String::from("scheme,K,M,pt_dbm,mean_nmax,stderr,mean_idf_calls,trials\n");
    for k in 1..=15 {
        let c = if k <= 3 {
            k as f64
        } else {
            1.5 + 0.5 * k as f64
        };
        csv.push_str(&format!("beamforming,{k},3,20,{c},0,1,10\n"));
    }
    std::fs::write(&path, csv).unwrap();
    let (code, out) = run(&["fit", "--input", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.contains("segment 1 (K=1..3): a=0 b=1 "), "{out}");
    assert!(out.contains("segment 2 (K=4..15): a=1.5 b=0.5 "), "{out}");
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let dirs: Vec<_> = (0..2).map(|_| tempfile::tempdir().unwrap()).collect();
    for (dir, threads) in dirs.iter().zip(["1", "4"]) {
        let (code, out) = run(&[
            "sweep",
            "--scheme",
            "all",
            "--pairs",
            "1-5",
            "--antennas",
            "1,2",
            "--trials",
            "8",
            "--seed",
            "3",
            "--no-timing",
            "--threads",
            threads,
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert_eq!(code, EXIT_OK, "{out}");
    }
    for file in [
        "trials.csv",
        "aggregate.csv",
        "convergence.csv",
        "summary.json",
    ] {
        let a = std::fs::read(dirs[0].path().join(file)).unwrap();
        let b = std::fs::read(dirs[1].path().join(file)).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, b, "{file} differs");
    }
}

#[test]
fn config_file_and_flags_combine() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "# small run\nscheme = rxdiv\npairs = 3\nantennas = 1\ntrials = 5\nseed = 9\n",
    )
    .unwrap();
    let (code, out) = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--pairs",
        "4",
    ]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(
        out.lines()
            .any(|l| l.starts_with("rxdiv") && l.split_whitespace().nth(1) == Some("4")),
        "{out}"
    );
}

#[test]
fn binary_reports_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_mncl");
    let ok = Command::new(bin)
        .args([
            "simulate",
            "--pairs",
            "2",
            "--antennas",
            "1",
            "--trials",
            "3",
        ])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    let bad = Command::new(bin)
        .args(["simulate", "--pairs", "0"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_PARAM));
    assert!(!bad.stderr.is_empty());
}
