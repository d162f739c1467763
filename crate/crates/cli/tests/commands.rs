use std::f64::consts::FRAC_PI_2;
use std::fs;
use std::path::Path;
use std::process::Command;

use hamlink::commands::{fig3_data, kicks_data, thread_pool};
use hamlink::config::{Experiment, ExperimentConfig};
use hamlink::render::{heatmap, line_plot, Table};

fn hamlink(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_hamlink")).args(args).output().unwrap()
}

fn out_arg(dir: &Path) -> String {
    dir.display().to_string()
}

#[test]
fn fig2_default_starts_at_full_polarization() {
    let dir = tempfile::tempdir().unwrap();
    let res = hamlink(&["fig2", "--out", &out_arg(dir.path())]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let csv = fs::read_to_string(dir.path().join("fig2.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# hamlink experiment=fig2"));
    assert_eq!(lines.next().unwrap(), "t,sx_qs,sy_qs,sx_reconstructed,sx_direct");
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[3], "2.50000000000e0");
    let stdout = String::from_utf8_lossy(&res.stdout);
    assert!(stdout.contains("max |sx_reconstructed - sx_direct|"));

    // the image is a pure function of the CSV
    let svg = fs::read_to_string(dir.path().join("fig2.svg")).unwrap();
    let again = line_plot(
        &csv,
        "t",
        &["sx_qs", "sy_qs", "sx_reconstructed", "sx_direct"],
        "Sx reconstruction, N = 5",
        "spin expectation",
    )
    .unwrap();
    assert_eq!(svg, again);
}

#[test]
fn fig2_two_samples() {
    let dir = tempfile::tempdir().unwrap();
    let res = hamlink(&["fig2", "--out", &out_arg(dir.path()), "--set", "time_samples=2"]);
    assert!(res.status.success());
    let table = Table::parse(&fs::read_to_string(dir.path().join("fig2.csv")).unwrap()).unwrap();
    assert_eq!(table.rows.len(), 2);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# small run\nn_sites = 3\ntime_samples = 3\nchi = 2\n").unwrap();
    let res = hamlink(&[
        "fig2",
        "--config",
        &cfg.display().to_string(),
        "--n-sites",
        "4",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert!(res.status.success());
    let csv = fs::read_to_string(dir.path().join("fig2.csv")).unwrap();
    let comment = csv.lines().next().unwrap();
    assert!(comment.contains(" n_sites=4 ") && comment.contains(" chi=2 ") && comment.contains(" time_samples=3 "));
    assert!(csv.lines().nth(2).unwrap().contains(",2.00000000000e0,"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(hamlink(&["fig2", "--set", "time_samples=1"]).status.code(), Some(2));
    assert_eq!(hamlink(&["fig3", "--frame", "sideways"]).status.code(), Some(2));
    assert_eq!(hamlink(&["fig2", "--config", "/definitely/missing.cfg"]).status.code(), Some(2));
    // a regular file where the output directory should be
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let res = hamlink(&["fig2", "--out", &blocker.join("sub").display().to_string()]);
    assert_eq!(res.status.code(), Some(4));
}

#[test]
fn fig3_bounds_trend_and_rendering() {
    let mut cfg = ExperimentConfig::defaults(Experiment::Fig3);
    cfg.set("ratios", "2,80").unwrap();
    cfg.set("time_samples", "5").unwrap();
    let grid = fig3_data(&cfg, &thread_pool(2).unwrap()).unwrap();
    assert!(grid.fidelity.iter().flatten().all(|z| (0.0..=1.0 + 1e-10).contains(z)));
    assert_eq!(grid.chi_t[2], FRAC_PI_2);
    assert!(grid.row(80.0).unwrap()[2] >= grid.row(2.0).unwrap()[2]);

    let dir = tempfile::tempdir().unwrap();
    let res = hamlink(&["fig3", "--out", &out_arg(dir.path()), "--set", "time_samples=8", "--set", "ratio_samples=3"]);
    assert!(res.status.success());
    let csv = fs::read_to_string(dir.path().join("fig3_n6_lab.csv")).unwrap();
    assert_eq!(Table::parse(&csv).unwrap().rows.len(), 24);
    let svg = fs::read_to_string(dir.path().join("fig3_n6_lab.svg")).unwrap();
    assert_eq!(svg, heatmap(&csv, "chi_t", "ratio", "fidelity", "Fidelity, N = 6, lab frame").unwrap());
}

#[test]
fn odd_chain_prefers_rotating_frame() {
    let mean = |frame: &str| {
        let mut cfg = ExperimentConfig::defaults(Experiment::Fig3);
        cfg.set("n_sites", "5").unwrap();
        cfg.set("frame", frame).unwrap();
        cfg.set("ratio_samples", "4").unwrap();
        cfg.set("time_samples", "40").unwrap();
        fig3_data(&cfg, &thread_pool(1).unwrap()).unwrap().mean()
    };
    assert!(mean("rotating") > mean("lab"));
}

#[test]
fn ghz_columns() {
    let dir = tempfile::tempdir().unwrap();
    let res = hamlink(&["ghz", "--out", &out_arg(dir.path()), "--set", "ghz_sites=2,4,6"]);
    assert!(res.status.success());
    let table = Table::parse(&fs::read_to_string(dir.path().join("ghz.csv")).unwrap()).unwrap();
    assert_eq!(table.header, vec!["N", "chi_t", "ghz_fidelity_xxx", "ghz_fidelity_oat"]);
    for row in &table.rows {
        assert!(row[3] >= 1.0 - 1e-9);
    }
    assert!(table.rows[2][2] >= 0.95);
}

#[test]
fn matched_commuting_kicks_are_exact() {
    let mut cfg = ExperimentConfig::defaults(Experiment::Kicks);
    cfg.apply_text("kick_state = eigen\nkick_partition = random\nseed = 11\nkick_count = 5").unwrap();
    let report = kicks_data(&cfg).unwrap();
    assert_eq!(report.kicks.len(), 5);
    assert!(report.final_fidelity().unwrap() >= 1.0 - 1e-9);

    let dir = tempfile::tempdir().unwrap();
    let res = hamlink(&["kicks", "--out", &out_arg(dir.path()), "--set", "kick_count=3"]);
    assert!(res.status.success());
    let csv = fs::read_to_string(dir.path().join("kicks.csv")).unwrap();
    assert_eq!(csv.lines().nth(1).unwrap(), "kick,duration,residual,commutator_norm,running_fidelity");
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn sweep_writes_long_format() {
    let dir = tempfile::tempdir().unwrap();
    let res = hamlink(&[
        "sweep",
        "--out",
        &out_arg(dir.path()),
        "--set",
        "sweep_param=chi",
        "--set",
        "sweep_values=0.5,2",
        "--set",
        "time_samples=4",
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let table = Table::parse(&fs::read_to_string(dir.path().join("sweep_chi.csv")).unwrap()).unwrap();
    assert_eq!(table.header, vec!["chi", "chi_t", "fidelity"]);
    assert_eq!(table.rows.len(), 8);
    assert!(dir.path().join("sweep_chi.svg").exists());
}

#[test]
fn seeds_make_random_partitions_reproducible() {
    let run = |seed: &str| {
        let mut cfg = ExperimentConfig::defaults(Experiment::Kicks);
        cfg.set("kick_partition", "random").unwrap();
        cfg.set("seed", seed).unwrap();
        kicks_data(&cfg).unwrap().kicks.iter().map(|k| k.duration).collect::<Vec<_>>()
    };
    assert_eq!(run("4"), run("4"));
    assert_ne!(run("4"), run("5"));
}
