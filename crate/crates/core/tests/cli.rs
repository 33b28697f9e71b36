use std::fs;
use std::process::Command as Process;

use dimred_t2ta::io::table::{read_motivating, read_sweep, read_trace};
use dimred_t2ta::io::{run_command, Command, RunManifest, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK};

fn t2ta() -> Process {
    Process::new(env!("CARGO_BIN_EXE_t2ta"))
}

#[test]
fn default_grid_sweep_has_150_rows() {
    let dir = tempfile::tempdir().unwrap();
    let mut manifest = RunManifest::new(Command::McSweep, dir.path());
    manifest.sweep.runs = Some(2);
    let report = run_command(&manifest).unwrap();
    let result = read_sweep(fs::File::open(&report.csv_path).unwrap()).unwrap();
    assert_eq!(result.rows.len(), 150);
    assert_eq!(result.rows[0].c, 0.1);
    assert_eq!(result.rows[49].c, 5.0);

    // reading back and writing again gives the same bytes
    let mut again = Vec::new();
    dimred_t2ta::io::table::write_sweep(&mut again, &result).unwrap();
    assert_eq!(again, fs::read(&report.csv_path).unwrap());

    let meta: serde_json::Value =
        serde_json::from_slice(&fs::read(&report.meta_path).unwrap()).unwrap();
    assert_eq!(meta["command"], "mc-sweep");
    assert_eq!(meta["seed"], 1);
    assert_eq!(meta["config_sha256"].as_str().unwrap().len(), 64);
    assert!(meta["wall_time_s"].as_f64().unwrap() >= 0.0);
}

#[test]
fn tables_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_command(&RunManifest::new(Command::Motivating, dir.path())).unwrap();
    let rows = read_motivating(fs::File::open(&report.csv_path).unwrap()).unwrap();
    assert_eq!(rows.len(), 181);
    assert_eq!(
        rows,
        dimred_t2ta::simulation::motivating_example(
            &dimred_t2ta::simulation::experiments::angle_grid(1.0)
        )
        .unwrap()
    );

    let report = run_command(&RunManifest::new(Command::OptimizerTrace, dir.path())).unwrap();
    let rows = read_trace(fs::File::open(&report.csv_path).unwrap()).unwrap();
    assert_eq!(rows.len(), 3 * 26);
    assert!(rows[0].alpha.is_nan());
    assert_eq!(rows[26].variant, "small");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");

    let status = t2ta()
        .args(["mc-sweep", "--config"])
        .arg(dir.path().join("missing.toml"))
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(EXIT_CONFIG));

    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "[sweep]\nruns = 0\n").unwrap();
    let output = t2ta()
        .arg("mc-sweep")
        .arg("--config")
        .arg(&bad)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(EXIT_CONFIG));
    assert!(String::from_utf8_lossy(&output.stderr).contains("sweep.runs"));

    // coincident agent-2 tracks make the ratio maximizer undefined
    let dup = dir.path().join("dup.toml");
    fs::write(&dup, "[scenario]\npositions = [[1.0, 1.0], [1.0, 1.0]]\n").unwrap();
    let status = t2ta()
        .args(["mc-sweep", "--runs", "1", "--c-min", "1", "--c-max", "1"])
        .arg("--config")
        .arg(&dup)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(EXIT_NUMERICAL));

    let status = t2ta()
        .arg("motivating")
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(EXIT_OK));
}

#[test]
fn lap_solve_prints_one_based_permutation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("lap.toml");
    fs::write(
        &cfg,
        "[lap]\ncosts = [[0.1125, 0.0125], [0.0125, 0.1125]]\n",
    )
    .unwrap();
    let output = t2ta()
        .arg("lap-solve")
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("assignment [2 1]"), "{stdout}");
    let csv = fs::read_to_string(dir.path().join("assignment.csv")).unwrap();
    assert_eq!(
        csv,
        "track,assigned,cost\n1,2,0.025000000000000001\n2,1,0.025000000000000001\n"
    );
}

#[test]
fn seed_override_reaches_the_trace() {
    let dir = tempfile::tempdir().unwrap();
    let mut a = RunManifest::new(Command::OptimizerTrace, dir.path().join("a"));
    a.seed_override = Some(1);
    let mut b = a.clone();
    b.output_dir = dir.path().join("b");
    b.seed_override = Some(2);
    let ra = run_command(&a).unwrap();
    let rb = run_command(&b).unwrap();
    assert_ne!(
        fs::read(ra.csv_path).unwrap(),
        fs::read(rb.csv_path).unwrap()
    );
    // the default trace seed is 1
    let c = run_command(&RunManifest::new(
        Command::OptimizerTrace,
        dir.path().join("c"),
    ))
    .unwrap();
    assert_eq!(
        fs::read(c.csv_path).unwrap(),
        fs::read(dir.path().join("a/trace.csv")).unwrap()
    );
}
