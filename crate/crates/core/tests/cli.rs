use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_frontier");

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env("FRONTIER_LOG", "error").output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

fn summary_value(s: &str, key: &str) -> f64 {
    s.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(" = ")))
        .unwrap_or_else(|| panic!("{key} missing from\n{s}"))
        .parse()
        .unwrap()
}

fn write_config(dir: &Path, name: &str, edit: impl Fn(String) -> String) -> PathBuf {
    let base = std::fs::read_to_string(configs().join("ref_lin.toml")).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, edit(base)).unwrap();
    p
}

#[test]
fn check_reports_pass_and_failures() {
    let ok = run(&["--config", configs().join("ref_lin.toml").to_str().unwrap(), "check"]);
    assert_eq!(code(&ok), 0, "{}", text(&ok.stderr));
    assert!(text(&ok.stdout).contains("overall: pass"));

    let dir = tempfile::tempdir().unwrap();
    let weak = write_config(dir.path(), "weak.toml", |s| s.replace("s_a = 2.0", "s_a = 0.5").replace("s_b = 2.0", "s_b = 0.5"));
    let o = run(&["--config", weak.to_str().unwrap(), "check"]);
    assert_eq!(code(&o), 2);
    assert!(text(&o.stderr).contains("H3"));

    let bad = write_config(dir.path(), "bad.toml", |s| s.replace("slope = 1.5", "slope = 1.5\nslpoe = 1.0"));
    let o = run(&["--config", bad.to_str().unwrap(), "check"]);
    assert_eq!(code(&o), 1);
    let err = text(&o.stderr);
    assert!(err.contains("line 18, column 1"), "{err}");
}

#[test]
fn steady_writes_summary_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("ref_lin.toml");
    let out1 = dir.path().join("a");
    let out2 = dir.path().join("b");
    for out in [&out1, &out2] {
        let o = run(&["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "steady"]);
        assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    }
    let summary = std::fs::read_to_string(out1.join("summary.txt")).unwrap();
    let n = summary_value(&summary, "n");
    let h = 1.0 / (n - 1.0);
    assert!((summary_value(&summary, "x_star_eps") - 0.5).abs() <= 2.0 * h);
    assert!(summary_value(&summary, "residual") <= 1e-8);
    let csv = std::fs::read(out1.join("steady.csv")).unwrap();
    assert!(text(&csv).starts_with("x,A,B,phi_A,phi_B,residual_A,residual_B\n"));
    assert_eq!(csv, std::fs::read(out2.join("steady.csv")).unwrap());
    assert_eq!(summary, std::fs::read_to_string(out2.join("summary.txt")).unwrap());
}

#[test]
fn too_coarse_grid_exits_four_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "fine.toml", |s| s.replace("eps = 1e-4", "eps = 1e-6\nn = 2001"));
    let out = dir.path().join("out");
    let o = run(&["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "steady"]);
    assert_eq!(code(&o), 4);
    assert!(text(&o.stderr).contains("required n = 10001"));
    assert!(!out.exists());

    let auto = write_config(dir.path(), "auto.toml", |s| s.replace("eps = 1e-4", "eps = 1e-6"));
    let o = run(&["--config", auto.to_str().unwrap(), "--out", out.to_str().unwrap(), "steady"]);
    assert_eq!(code(&o), 4);
    assert!(text(&o.stderr).contains("--large-grid"));
}

#[test]
fn step_budget_exhaustion_exits_three_with_trace() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "short.toml", |s| s.replace("tol = 1e-8", "tol = 1e-8\nmax_steps = 50"));
    let o = run(&["--config", cfg.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap(), "steady"]);
    assert_eq!(code(&o), 3);
    assert!(text(&o.stderr).contains("residual trace"));
}

#[test]
fn wavespeed_single_point_map_and_domain() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("ref_lin.toml");
    let out = dir.path().to_str().unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "--out", out, "wavespeed", "--x", "0.5"]);
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("wavespeed.csv")).unwrap();
    let c: f64 = csv.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!(c.abs() <= 1e-6);

    let o = run(&["--config", cfg.to_str().unwrap(), "--out", out, "wavespeed", "--map"]);
    assert_eq!(code(&o), 0);
    let csv = std::fs::read_to_string(dir.path().join("wavespeed.csv")).unwrap();
    let cs: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(cs.len(), 9);
    assert!(cs.windows(2).all(|w| w[1] < w[0]));

    let o = run(&["--config", cfg.to_str().unwrap(), "--out", out, "wavespeed", "--x", "0.1"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn locate_and_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("ref_lin.toml");
    let out = dir.path().to_str().unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "--out", out, "locate"]);
    assert_eq!(code(&o), 0);
    let loc = std::fs::read_to_string(dir.path().join("locate.txt")).unwrap();
    assert!((summary_value(&loc, "x_star") - 0.5).abs() <= 1e-6);

    let o = run(&["--config", cfg.to_str().unwrap(), "--out", out, "sweep"]);
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    let summary = std::fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    assert!(summary.contains("verdict = ASharpInterface"));
}

#[test]
fn zero_diffusion_and_figure_are_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "fig.toml", |s| s.replace("eps = 1e-4", "eps = 1e-3"));
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = run(&["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--seed", "7", "figure2"]);
        assert_eq!(code(&o), 0, "{}", text(&o.stderr));
        let o = run(&["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--seed", "7", "zero-diffusion"]);
        assert_eq!(code(&o), 0);
    }
    for f in ["figure2_zero.svg", "figure2_steady.svg", "figure2_zero.csv", "zero_diffusion.csv"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    let o = run(&["--config", cfg.to_str().unwrap(), "--out", a.to_str().unwrap(), "--seed", "8", "zero-diffusion"]);
    assert_eq!(code(&o), 0);
    assert_ne!(std::fs::read(a.join("zero_diffusion.csv")).unwrap(), std::fs::read(b.join("zero_diffusion.csv")).unwrap());
}

#[test]
fn missing_config_is_a_usage_error() {
    assert_eq!(code(&run(&["check"])), 1);
    assert_eq!(code(&run(&["--config", "/nonexistent.toml", "check"])), 1);
}
