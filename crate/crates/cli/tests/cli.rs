use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command as Process;

use exsteer_cli::config::ConfigIssue;
use exsteer_cli::{load_config, parse_config_with, run_and_export, run_scenario, serialize, Command, Overrides};

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn small(cmd: Command, out: &Path) -> Overrides {
    Overrides {
        command: Some(cmd),
        n_cells: Some(256),
        output_dir: Some(out.to_path_buf()),
        ..Overrides::default()
    }
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let j = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(j).unwrap().parse().unwrap()).collect()
}

#[test]
fn shipped_configs_parse_and_round_trip() {
    let mut n = 0;
    for entry in fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("conf") {
            continue;
        }
        let cfg = load_config(&path, &Overrides::default()).unwrap_or_else(|e| panic!("{e}"));
        let again = parse_config_with(&serialize(&cfg), &Overrides::default()).unwrap();
        assert_eq!(cfg, again, "{}", path.display());
        n += 1;
    }
    assert!(n >= 6);
}

#[test]
fn every_command_runs() {
    let dir = tempfile::tempdir().unwrap();
    for cmd in Command::ALL {
        let path = configs_dir().join(format!("{cmd}.conf"));
        let out = dir.path().join(cmd.as_str());
        let cfg = load_config(&path, &small(cmd, &out)).unwrap();
        let (report, paths) = run_and_export(&cfg).unwrap_or_else(|e| panic!("{e}"));
        assert!(!report.tables.is_empty(), "{cmd}");
        assert!(!report.flags.is_empty(), "{cmd}");
        assert_eq!(report.config_hash.len(), 64);
        for p in &paths {
            assert!(p.exists(), "{}", p.display());
        }
    }
}

#[test]
fn steering_emits_stage_and_terminal_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = load_config(&configs_dir().join("steer-semilinear.conf"), &small(Command::SteerSemilinear, dir.path())).unwrap();
    let (_, paths) = run_and_export(&cfg).unwrap();
    let names: Vec<String> = paths.iter().map(|p| p.file_name().unwrap().to_string_lossy().into_owned()).collect();
    assert!(names.contains(&"stages.csv".to_string()));
    assert!(names.contains(&"terminal_state.csv".to_string()));
    let stages = fs::read_to_string(dir.path().join("stages.csv")).unwrap();
    assert!(stages.starts_with(
        "n,tau_n,t_n,err_vs_transported_target,err_vs_target,stage_bound,stage_energy,cumulative_energy\n"
    ));
    let terminal = fs::read_to_string(dir.path().join("terminal_state.csv")).unwrap();
    assert!(terminal.starts_with("theta,x_T,eta,abs_err_inside_eps\n"));
    assert_eq!(terminal.lines().count(), 258);
}

#[test]
fn semilinear_errors_respect_stage_bound() {
    let dir = tempfile::tempdir().unwrap();
    let mut ov = small(Command::SteerSemilinear, dir.path());
    ov.n_cells = Some(1024);
    let cfg = load_config(&configs_dir().join("steer-semilinear.conf"), &ov).unwrap();
    let report = run_scenario(&cfg).unwrap();
    let csv = report.table("stages.csv").unwrap().to_csv();
    let err = column(&csv, "err_vs_target");
    let bound = column(&csv, "stage_bound");
    let slack = 10.0 / 1024.0 * 1.3;
    assert!(err.len() >= 4);
    for (e, b) in err.iter().zip(&bound) {
        assert!(e <= &(b + slack), "{e} > {b}");
    }
    assert!(report.passed(), "{}", report.summary());
}

#[test]
fn two_stream_terminal_layout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = load_config(&configs_dir().join("two-stream-semilinear.conf"), &small(Command::SteerSemilinear, dir.path())).unwrap();
    run_and_export(&cfg).unwrap();
    let terminal = fs::read_to_string(dir.path().join("terminal_state.csv")).unwrap();
    assert!(terminal.starts_with("theta,x_T,x2_T,eta,eta2,abs_err_inside_eps\n"));
}

#[test]
fn demo_quotients_decrease() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = load_config(&configs_dir().join("demo-noncoercivity.conf"), &small(Command::DemoNoncoercivity, dir.path())).unwrap();
    let report = run_scenario(&cfg).unwrap();
    let csv = report.table("noncoercivity.csv").unwrap().to_csv();
    let q: Vec<f64> = column(&csv, "quotient");
    // inflow rows come first, δ = 0.1, 0.05, 0.025
    assert!(q[1] < q[0] && q[2] < q[1], "{q:?}");
    assert!(report.passed());
}

#[test]
fn reexport_is_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for cmd in [Command::SteerSemilinear, Command::CheckConditions, Command::GramianReport] {
        let path = configs_dir().join(format!("{cmd}.conf"));
        let ra = run_and_export(&load_config(&path, &small(cmd, a.path())).unwrap()).unwrap().0;
        let rb = run_and_export(&load_config(&path, &small(cmd, b.path())).unwrap()).unwrap().0;
        assert_eq!(ra.config_hash, rb.config_hash);
        for t in &ra.tables {
            let x = fs::read(a.path().join(&t.file_name)).unwrap();
            let y = fs::read(b.path().join(&t.file_name)).unwrap();
            assert_eq!(x, y, "{}", t.file_name);
        }
        // exporting the same report again rewrites the same bytes
        exsteer_cli::export_csv(&ra, a.path()).unwrap();
        for t in &ra.tables {
            assert_eq!(fs::read(a.path().join(&t.file_name)).unwrap(), fs::read(b.path().join(&t.file_name)).unwrap());
        }
    }
}

#[test]
fn samples_preset_reads_relative_csv() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("eta.csv"), "theta,value\n0,0\n0.5,1\n1,0\n").unwrap();
    let doc = "command = steer-linear\nsystem.kind = monotubular\nsystem.a = 1\nsystem.b = 1\nhorizon = 1\nepsilon = 0.1\ntarget.kind = samples\ntarget.path = eta.csv\n";
    let cfg_path = dir.path().join("s.conf");
    fs::write(&cfg_path, doc).unwrap();
    let cfg = load_config(&cfg_path, &Overrides::default()).unwrap();
    let again = parse_config_with(&serialize(&cfg), &Overrides::default()).unwrap();
    assert_eq!(cfg, again);

    fs::write(dir.path().join("eta.csv"), "theta,value\n0.2,0\n1,0\n").unwrap();
    let err = load_config(&cfg_path, &Overrides::default()).unwrap_err().to_string();
    assert!(err.contains("target.path"), "{err}");
}

#[test]
fn unknown_key_is_named() {
    let doc = "command = selftest\nsystem.kind = monotubular\nsystem.a = 1\nsystem.b = 1\nhorizon = 1\nepsilon = 0.1\nnumeric.n_stage = 3\n";
    let err = parse_config_with(doc, &Overrides::default()).unwrap_err();
    assert_eq!(err.0, vec![ConfigIssue::UnknownKey { key: "numeric.n_stage".into() }]);
}

fn exsteer(args: &[&str]) -> std::process::Output {
    Process::new(env!("CARGO_BIN_EXE_exsteer")).args(args).output().unwrap()
}

#[test]
fn binary_exit_status_tracks_flags() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let conf = |name: &str| configs_dir().join(name).to_string_lossy().into_owned();

    let ok = exsteer(&["demo-noncoercivity", "--config", &conf("demo-noncoercivity.conf"), "--out", out, "--n-cells", "256"]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stdout));
    assert!(dir.path().join("noncoercivity.csv").exists());

    // the short-time cap fails for t > ε
    let failing = exsteer(&["gramian-report", "--config", &conf("gramian-report.conf"), "--out", out]);
    assert_eq!(failing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&failing.stdout).contains("[FAIL] E-cap"));

    let bad = exsteer(&["steer-linear", "--config", &conf("gramian-report.conf"), "--out", out]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("command"));
}

#[test]
fn threads_env_is_validated_only() {
    let dir = tempfile::tempdir().unwrap();
    let conf = configs_dir().join("demo-noncoercivity.conf");
    let run = |threads: &str, sub: &str| {
        let out = dir.path().join(sub);
        let o = Process::new(env!("CARGO_BIN_EXE_exsteer"))
            .args(["demo-noncoercivity", "--config", conf.to_str().unwrap(), "--out", out.to_str().unwrap()])
            .env("EXSTEER_THREADS", threads)
            .output()
            .unwrap();
        (o.status.code(), out)
    };
    let (c1, o1) = run("1", "one");
    let (c8, o8) = run("8", "eight");
    assert_eq!((c1, c8), (Some(0), Some(0)));
    assert_eq!(
        fs::read(o1.join("noncoercivity.csv")).unwrap(),
        fs::read(o8.join("noncoercivity.csv")).unwrap()
    );
    assert_eq!(run("0", "zero").0, Some(2));
}
