use std::path::Path;
use std::process::{Command, Output};

use nls_lab::harness::load_checkpoint;

fn nlslab(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlslab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&nlslab(&["no-such-command"], dir.path())), 2);
    assert_eq!(code(&nlslab(&["thresholds", "--count", "many"], dir.path())), 2);
    assert_eq!(code(&nlslab(&["--alpha=-1", "thresholds"], dir.path())), 2);
    assert_eq!(code(&nlslab(&["evolve", "--t-end", "0.1"], dir.path())), 2);
    assert_eq!(code(&nlslab(&["sweep", "--config", "/nonexistent/file"], dir.path())), 2);
}

#[test]
fn cli_flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(&conf, "alpha = 6\na_min = 0.5\na_max = 2\na_count = 4\n").unwrap();
    let conf = conf.to_str().unwrap();

    let from_file = dir.path().join("file");
    assert_eq!(code(&nlslab(&["thresholds", "--config", conf], &from_file)), 0);
    let overridden = dir.path().join("flag");
    assert_eq!(code(&nlslab(&["thresholds", "--config", conf, "--alpha", "8"], &overridden)), 0);
    let plain = dir.path().join("plain");
    assert_eq!(code(&nlslab(&["thresholds", "--alpha", "8", "--a-min", "0.5", "--a-max", "2", "--count", "4"], &plain)), 0);

    let read = |d: &Path| std::fs::read_to_string(d.join("thresholds.csv")).unwrap();
    assert_eq!(read(&overridden), read(&plain));
    assert_ne!(read(&from_file), read(&plain));
    assert_eq!(read(&plain).lines().count(), 5);
    assert!(std::fs::read_to_string(plain.join("thresholds.svg")).unwrap().starts_with("<svg"));
}

#[test]
fn ground_state_exports_csv_and_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let o = nlslab(&["ground-state", "--points", "512"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("ground_state.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("r,value"));
    let field = load_checkpoint(&dir.path().join("ground_state.nlsf")).unwrap();
    assert_eq!(field.grid.points_per_axis(), 512);
    // the profile peak is ((α+2)/2)^{1/α}
    assert!((field.max_abs() - 5f64.powf(0.125)).abs() < 1e-3);
}

#[test]
fn evolve_resumes_from_its_own_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let common = ["--t-end", "0.05", "--dt", "1e-3", "--stride", "5", "--reproducible"];
    let mut args = vec!["evolve", "--a", "1", "--b", "1", "--family", "gaussian", "--points", "512", "--half-width", "30", "--checkpoint-every", "2"];
    args.extend(common);
    let o = nlslab(&args, &first);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("global-on-window"));
    assert!(first.join("checkpoint.nlsf").exists());
    let end = load_checkpoint(&first.join("final.nlsf")).unwrap();
    assert_eq!(end.time, 0.05);

    let second = dir.path().join("second");
    let from = first.join("final.nlsf");
    let mut args = vec!["evolve", "--from", from.to_str().unwrap()];
    args.extend(common);
    assert_eq!(code(&nlslab(&args, &second)), 0);
    let series = std::fs::read_to_string(second.join("series.csv")).unwrap();
    let t0: f64 = series.lines().nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
    assert_eq!(t0, 0.05);
    assert!((load_checkpoint(&second.join("final.nlsf")).unwrap().time - 0.1).abs() < 1e-12);
}

#[test]
fn verify_passes_by_default_and_fails_on_a_perturbed_ground_state() {
    let dir = tempfile::tempdir().unwrap();
    let ok = nlslab(&["verify", "--bootstrap-t-end", "1"], dir.path());
    let text = String::from_utf8_lossy(&ok.stdout);
    assert_eq!(code(&ok), 0, "{text}");
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 8, "{text}");

    let bad = nlslab(&["verify", "--perturb", "1.01", "--bootstrap-t-end", "1"], dir.path());
    let text = String::from_utf8_lossy(&bad.stdout);
    assert_eq!(code(&bad), 1, "{text}");
    assert!(text.lines().any(|l| l.starts_with("FAIL pohozaev")), "{text}");
}

#[test]
fn verify_skips_supercritical_checks_at_the_critical_power() {
    let dir = tempfile::tempdir().unwrap();
    let o = nlslab(&["verify", "--alpha", "4"], dir.path());
    let text = String::from_utf8_lossy(&o.stdout);
    for name in ["thresholds", "functionals", "bootstrap"] {
        assert!(text.lines().any(|l| l.starts_with(&format!("SKIP {name}"))), "{text}");
    }
    assert!(!text.contains("FAIL"), "{text}");
    assert_eq!(code(&o), 0);
}
