use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use tempfile::TempDir;

fn run(dir: &Path, command: &str, config: &str, extra_env: &[(&str, &str)]) -> (Output, PathBuf) {
    let cfg = dir.join(format!("{command}.toml"));
    std::fs::write(&cfg, config).unwrap();
    let out = dir.join(format!("{command}.csv"));
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ab-forces"));
    cmd.arg(command).arg("--config").arg(&cfg).arg("--out").arg(&out);
    for (k, v) in extra_env {
        cmd.env(k, v);
    }
    (cmd.output().unwrap(), out)
}

struct Csv {
    comments: Vec<String>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn read_csv(path: &Path) -> Csv {
    let text = std::fs::read_to_string(path).unwrap();
    let (comments, rest): (Vec<&str>, Vec<&str>) = text.lines().partition(|l| l.starts_with('#'));
    let mut rest = rest.into_iter();
    let header = rest.next().unwrap().split(',').map(String::from).collect();
    let rows = rest.map(|l| l.split(',').map(String::from).collect()).collect();
    Csv { comments: comments.into_iter().map(String::from).collect(), header, rows }
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

fn ok(output: &Output) {
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
}

fn note(csv: &Csv, key: &str) -> Vec<f64> {
    csv.comments
        .iter()
        .filter_map(|c| c.strip_prefix("# ")?.strip_prefix(key))
        .map(|rest| num(rest.split_whitespace().last().unwrap()))
        .collect()
}

#[test]
fn figure2_tails_vanish_and_slopes_converge() {
    let dir = TempDir::new().unwrap();
    let cfg = "[scenario]\nkR = 4.3e-3\nbeta = 0.2\n[grid]\nladder = [1e4, 1e6, 1e8]\nradial_points = 21\n";
    let (o, path) = run(dir.path(), "figure2", cfg, &[]);
    ok(&o);
    let csv = read_csv(&path);
    assert_eq!(csv.header, ["V0", "r/R", "|psi|"]);
    assert!(csv.comments.iter().any(|c| c.starts_with("# config sha256 ")));
    assert!(csv.comments.iter().any(|c| c.starts_with("# n_max ")));
    assert_eq!(csv.rows.len(), 4 * 21);

    // inside the cylinder the largest barrier leaves only a small tail
    let inner = |v: &str| {
        csv.rows
            .iter()
            .filter(|r| r[0] == v && num(&r[1]) < 0.985)
            .map(|r| num(&r[2]))
            .fold(0.0, f64::max)
    };
    assert!(inner("1.0000000000000000e8") < 0.01 * inner("1.0000000000000000e4"));
    assert_eq!(inner("inf"), 0.0);

    let slopes = note(&csv, "slope V0=");
    assert_eq!(slopes.len(), 4);
    let limit = slopes[3];
    let gaps: Vec<f64> = slopes[..3].iter().map(|s| (s - limit).abs()).collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    assert!(gaps[2] <= 0.01 * limit);
}

#[test]
fn figure3a_slopes_depend_on_kappa() {
    let dir = TempDir::new().unwrap();
    let (o, path) = run(dir.path(), "figure3a", "[scenario]\nkR = 4.3e-3\n", &[]);
    ok(&o);
    let csv = read_csv(&path);
    assert_eq!(csv.header, ["kappa", "r/R", "|psi|"]);
    let slopes = note(&csv, "slope kappa=");
    assert_eq!(slopes.len(), 2);
    assert!((slopes[0] - slopes[1]).abs() > 0.1 * slopes[0]);
    assert!(csv.rows.iter().all(|r| num(&r[2]) >= 0.0));
}

#[test]
fn figure3b_backward_curve_is_symmetric() {
    let dir = TempDir::new().unwrap();
    let cfg = "[scenario]\nkR = 4.3e-3\n[grid]\nkappa_points = 20\n";
    let (o, path) = run(dir.path(), "figure3b", cfg, &[]);
    ok(&o);
    let csv = read_csv(&path);
    assert_eq!(csv.header, ["kappa", "phi", "slope"]);
    assert_eq!(csv.rows.len(), 40);
    let back: Vec<(f64, f64)> = csv
        .rows
        .iter()
        .filter(|r| (num(&r[1]) - std::f64::consts::PI).abs() < 1e-12)
        .map(|r| (num(&r[0]), num(&r[2])))
        .collect();
    for &(k, s) in &back {
        if k == 0.0 {
            continue;
        }
        let (_, m) = back.iter().find(|(q, _)| (q - (1.0 - k)).abs() < 1e-12).unwrap();
        assert!((s - m).abs() <= 1e-9 * s, "kappa {k}");
    }
}

#[test]
fn force_scan_tracks_the_closed_form() {
    let dir = TempDir::new().unwrap();
    let cfg = "[scenario]\nkR = 1e-3\nV0 = \"inf\"\n[grid]\nalphas = [0.25, 0.4]\n";
    let (o, path) = run(dir.path(), "force-scan", cfg, &[]);
    ok(&o);
    let csv = read_csv(&path);
    assert_eq!(csv.header, ["kR", "alpha_or_kappa", "f1", "f2", "f1_asym", "f2_asym"]);
    for r in &csv.rows {
        let (f1, f2, a1, a2) = (num(&r[2]), num(&r[3]), num(&r[4]), num(&r[5]));
        let big = a1.abs().max(a2.abs());
        assert!((f1 - a1).abs() <= 0.05 * big && (f2 - a2).abs() <= 0.05 * big, "{r:?}");
    }
}

#[test]
fn finite_force_and_profile() {
    let dir = TempDir::new().unwrap();
    let cfg = "[scenario]\nkR = 4.3e-3\nbeta = 1.2\nV0 = 1e8\n[grid]\nangles = 32\n";
    let (o, path) = run(dir.path(), "force", cfg, &[]);
    ok(&o);
    let csv = read_csv(&path);
    assert_eq!(csv.rows.len(), 1);
    assert!((num(&csv.rows[0][1]) - 0.2).abs() < 1e-12);
    assert!(num(&csv.rows[0][2]) < 0.0);

    let (o, path) = run(dir.path(), "slope-profile", cfg, &[]);
    ok(&o);
    let csv = read_csv(&path);
    assert_eq!(csv.header, ["phi", "slope"]);
    assert_eq!(csv.rows.len(), 32);
}

#[test]
fn converge_reports_the_ideal_limit() {
    let dir = TempDir::new().unwrap();
    let cfg = "[scenario]\nkR = 4.3e-3\nbeta = 0.2\n[grid]\nphi = [1.3]\nladder = [1e4, 1e5, 1e6, 1e7, 1e8, 1e9, 1e10]\n";
    let (o, path) = run(dir.path(), "converge", cfg, &[]);
    ok(&o);
    let csv = read_csv(&path);
    assert_eq!(csv.header, ["V0", "value", "distance"]);
    assert_eq!(csv.rows.len(), 7);
    let limit = note(&csv, "extrapolated_limit")[0];
    let reference = note(&csv, "reference")[0];
    assert!((limit - reference).abs() <= 1e-3 * reference);
    assert!(note(&csv, "fitted_order")[0] > 0.0);
}

#[test]
fn infer_kappa_round_trip_and_ambiguity() {
    let dir = TempDir::new().unwrap();
    let (o, path) = run(dir.path(), "infer-kappa", "[scenario]\nkR = 4.3e-3\nkappa = 0.3\n", &[]);
    ok(&o);
    let csv = read_csv(&path);
    assert_eq!(csv.header, ["kappa_hat", "residual", "angles_used"]);
    assert!((num(&csv.rows[0][0]) - 0.3).abs() <= 1e-6);
    std::fs::remove_file(&path).unwrap();

    let cfg = "[scenario]\nkR = 4.3e-3\n[grid]\nsamples = [[1.0, 0.1337]]\n";
    let (o, path) = run(dir.path(), "infer-kappa", cfg, &[]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert_eq!(err.trim().lines().count(), 1);
    assert!(err.contains("ambiguous"), "{err}");
    assert!(!path.exists());
    assert!(!path.with_extension("csv.partial").exists());
}

#[test]
fn periodicity_spread_is_small() {
    let dir = TempDir::new().unwrap();
    let cfg = "[scenario]\nkR = 4.3e-3\nbeta = 0.2\nV0 = 1e8\n";
    let (o, path) = run(dir.path(), "periodicity", cfg, &[]);
    ok(&o);
    let csv = read_csv(&path);
    assert_eq!(csv.header, ["offset", "beta", "phi", "slope"]);
    assert_eq!(csv.rows.len(), 3 * 2);
    assert!(note(&csv, "max_relative_spread")[0] <= 1e-3);
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let dir = TempDir::new().unwrap();
    let cfg = "[scenario]\nkR = 0.3\n[grid]\nkappa_points = 8\nphi = [0.5, 1.0, 1.3]\n";
    let (o, path) = run(dir.path(), "figure3b", cfg, &[("AB_FORCES_THREADS", "1")]);
    ok(&o);
    let a = std::fs::read(&path).unwrap();
    let (o, path) = run(dir.path(), "figure3b", cfg, &[("AB_FORCES_THREADS", "0")]);
    ok(&o);
    assert_eq!(a, std::fs::read(&path).unwrap());

    let (o, _) = run(dir.path(), "figure3b", cfg, &[("AB_FORCES_THREADS", "many")]);
    assert!(!o.status.success());
}

#[test]
fn invalid_configs_fail_with_one_line() {
    let dir = TempDir::new().unwrap();
    let cases = [
        ("[scenario]\nkR = 0.1\nbeta = 0.2\nV0 = \"inf\"\n", "`beta`"),
        ("[scenario]\nR = -2.0\nkR = 0.1\nkappa = 0.1\n", "`R`"),
        ("[scenario]\nkR = 0.1\n[grid]\nquadrature = 100\n", "`quadrature`"),
        ("[scenario]\nkR = 0.1\n\n[grid]\nangels = 4\n", "line 5, column 1"),
        ("[scenario]\nkR = = 0.1\n", "line 2"),
    ];
    for (cfg, needle) in cases {
        let (o, path) = run(dir.path(), "force", cfg, &[]);
        assert!(!o.status.success(), "{cfg}");
        let err = String::from_utf8_lossy(&o.stderr);
        assert_eq!(err.trim().lines().count(), 1, "{err}");
        assert!(err.contains(needle), "{cfg}: {err}");
        assert!(!path.exists());
    }
}

#[test]
fn output_path_from_config() {
    let dir = TempDir::new().unwrap();
    let target = dir.path().join("from_config.csv");
    let cfg = format!("[scenario]\nkR = 0.1\nkappa = 0.25\n[output]\npath = {:?}\n", target);
    let file = dir.path().join("c.toml");
    std::fs::write(&file, cfg).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_ab-forces"))
        .args(["force", "--config"])
        .arg(&file)
        .output()
        .unwrap();
    ok(&o);
    assert!(o.stdout.is_empty());
    assert_eq!(read_csv(&target).rows.len(), 1);
}
