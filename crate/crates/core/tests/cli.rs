use std::path::Path;
use std::process::{Command, Output};

use modulo_radon::io;

fn mrt(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mrt"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = mrt(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

const SMALL: [&str; 6] = ["--omega", "30", "--size", "32", "--angles", "30"];

#[test]
fn every_subcommand_has_help() {
    let dir = tempfile::tempdir().unwrap();
    for sub in ["phantom", "forward", "fold", "unfold", "fbp", "pipeline", "ingest", "sweep-success", "downsample-demo"] {
        ok(dir.path(), &[sub, "--help"]);
    }
}

#[test]
fn stepwise_commands_recover_the_clean_sinogram() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["phantom", "--size", "32", "--out", "p.pgm", "--table", "p.txt"]);
    ok(d, &["forward", "--phantom", "p.txt", "--omega", "30", "--angles", "30", "--lambda", "0.05", "--out", "s.mrts"]);
    ok(d, &["fold", "--input", "s.mrts", "--out", "m.csv"]);
    let report = ok(d, &["unfold", "--input", "m.csv", "--beta", "0.6", "--out", "u.mrts", "--report", "r.csv"]);
    assert!(report.contains("0 flagged"), "{report}");
    ok(d, &["fbp", "--input", "u.mrts", "--size", "32", "--out", "f.pgm"]);

    let clean = io::read_sinogram_binary(d.join("s.mrts")).unwrap();
    let unfolded = io::read_sinogram_binary(d.join("u.mrts")).unwrap();
    for (a, b) in clean.rows.iter().zip(&unfolded.rows) {
        for (k, v) in b.indexed() {
            assert_eq!(v, a.get(k).unwrap());
        }
    }
    assert!(io::read_pgm16(d.join("f.pgm")).is_ok());
}

#[test]
fn threshold_above_the_data_leaves_everything_unchanged() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut args = vec!["pipeline", "--lambda", "5", "--out-dir", "run"];
    args.extend(SMALL);
    ok(d, &args);
    let run = d.join("run");
    let clean = io::read_sinogram_binary(run.join("sinogram.mrts")).unwrap();
    let modulo = io::read_sinogram_binary(run.join("modulo.mrts")).unwrap();
    assert_eq!(clean, modulo);
    assert_eq!(
        std::fs::read(run.join("fbp.f64")).unwrap(),
        std::fs::read(run.join("usfbp.f64")).unwrap()
    );
    for f in ["unfolded.mrts", "fbp.pgm", "usfbp.pgm", "truth.pgm", "metrics.csv", "unfold_reports.csv"] {
        assert!(run.join(f).exists(), "{f}");
    }
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("run.cfg"), "# defaults\nlambda = 0.5\nomega=30\nangles=30\nsize=32\nout_dir=cfg\n").unwrap();
    ok(d, &["pipeline", "--config", "run.cfg", "--lambda", "0.05"]);
    let metrics = std::fs::read_to_string(d.join("cfg/metrics.csv")).unwrap();
    let line = metrics.lines().nth(1).unwrap();
    assert!(line.starts_with("0.05,"), "{line}");
}

#[test]
fn csv_outputs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let sweep = ["sweep-success", "--trials", "3", "--t-steps", "3", "--lambda", "0.1"];
    ok(d, &[&sweep[..], &["--out-dir", "a"]].concat());
    ok(d, &[&sweep[..], &["--out-dir", "b"]].concat());
    let name = "success_lambda0.1_omega10pi.csv";
    assert_eq!(std::fs::read(d.join("a").join(name)).unwrap(), std::fs::read(d.join("b").join(name)).unwrap());
    assert_eq!(ok(d, &["downsample-demo"]), ok(d, &["downsample-demo"]));
}

#[test]
fn downsample_demo_flags_first_order_at_half_rate() {
    let dir = tempfile::tempdir().unwrap();
    let table = ok(dir.path(), &["downsample-demo"]);
    assert!(table.lines().any(|l| l.starts_with("2,") && l.contains(",1,true,")), "{table}");
    assert!(table.lines().any(|l| l.starts_with("2,") && l.contains(",2,false,0,0")), "{table}");
}

#[test]
fn errors_exit_nonzero_with_a_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("empty.txt"), "").unwrap();
    let out = mrt(d, &["ingest", "--input", "empty.txt", "--out", "x.mrts"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("parse"));

    let out = mrt(d, &["fold", "--input", "missing.mrts", "--out", "x.mrts"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    let mut args = vec!["pipeline", "--lambda", "-1"];
    args.extend(SMALL);
    assert!(!mrt(d, &args).status.success());
}
