use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn sharpfront(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sharpfront"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// Header plus rows of equal width holding finite numbers (last column of
/// `wavespeed.csv` and `compare.csv` excepted).
fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    let rows: Vec<Vec<String>> = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    for row in &rows {
        assert_eq!(row.len(), header.len(), "{}", path.display());
    }
    (header, rows)
}

fn assert_numeric(path: &Path) {
    let (_, rows) = read_csv(path);
    assert!(!rows.is_empty(), "{} is empty", path.display());
    for row in rows {
        for field in row {
            let v: f64 = field
                .parse()
                .unwrap_or_else(|_| panic!("{}: {field:?}", path.display()));
            assert!(v.is_finite());
        }
    }
}

#[test]
fn missing_config_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let o = sharpfront(dir.path(), &["--config", "/nonexistent/run.cfg", "simulate"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn unknown_key_and_bad_values_are_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "m = 2\nspeed = 3\n").unwrap();
    assert_eq!(
        code(&sharpfront(
            dir.path(),
            &["--config", cfg.to_str().unwrap(), "simulate"]
        )),
        2
    );
    assert_eq!(code(&sharpfront(dir.path(), &["simulate", "--set", "dx=-1"])), 2);
    assert_eq!(
        code(&sharpfront(dir.path(), &["simulate", "--set", "m=3", "--set", "T=0.1"])),
        2
    );
    assert_eq!(code(&sharpfront(dir.path(), &["bogus"])), 2);
}

#[test]
fn simulate_writes_snapshots_and_edge() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        "# short delayed run\nr = 0.1\nT = 2\nsnapshot_times = 0, 1, 2\ndx = 0.1\n",
    )
    .unwrap();
    let o = sharpfront(dir.path(), &["--config", cfg.to_str().unwrap(), "simulate"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["snap_t0.csv", "snap_t1.csv", "snap_t2.csv", "edge.csv"] {
        assert_numeric(&dir.path().join(name));
    }
    let (header, rows) = read_csv(&dir.path().join("edge.csv"));
    assert_eq!(header, ["t", "x_hat", "c1", "c2", "k"]);
    let x_hat: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(x_hat.windows(2).all(|w| w[1] <= w[0]));
    // 17 significant digits.
    assert_eq!(rows[1][0].split('e').next().unwrap().len(), 18);
}

#[test]
fn classical_outputs_are_suffixed() {
    let dir = TempDir::new().unwrap();
    let o = sharpfront(
        dir.path(),
        &[
            "simulate",
            "--set",
            "scheme=classical",
            "--set",
            "T=0.5",
            "--set",
            "dx=0.1",
            "-q",
        ],
    );
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).is_empty());
    assert!(dir.path().join("edge_classical.csv").exists());
    assert!(dir.path().join("snap_t0.5_classical.csv").exists());
    assert!(!dir.path().join("edge.csv").exists());
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let args = ["simulate", "--set", "r=0.2", "--set", "T=1", "--set", "dx=0.1"];
    assert_eq!(code(&sharpfront(a.path(), &args)), 0);
    assert_eq!(code(&sharpfront(b.path(), &args)), 0);
    for name in ["edge.csv", "snap_t0.5.csv", "snap_t1.csv"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn wavespeed_reports_critical_speed() {
    let dir = TempDir::new().unwrap();
    let o = sharpfront(dir.path(), &["wavespeed"]);
    assert_eq!(code(&o), 0);
    let line = stdout(&o);
    let c: f64 = line.split_whitespace().nth(2).unwrap().parse().unwrap();
    assert!((c - 1.0).abs() < 1e-3, "{line}");
    let (header, rows) = read_csv(&dir.path().join("wavespeed.csv"));
    assert_eq!(header, ["iter", "c_lo", "c_hi", "classification_mid"]);
    assert!(rows
        .iter()
        .all(|r| ["supercritical", "subcritical", "undecided"].contains(&r[3].as_str())));
    assert_numeric(&dir.path().join("profile.csv"));

    let o = sharpfront(dir.path(), &["wavespeed", "--set", "r=0.2"]);
    let c: f64 = stdout(&o).split_whitespace().nth(2).unwrap().parse().unwrap();
    assert!((c - 0.8430).abs() <= 2e-3, "{c}");
}

#[test]
fn wavespeed_for_other_exponent_is_finite() {
    let dir = TempDir::new().unwrap();
    let o = sharpfront(dir.path(), &["wavespeed", "--set", "m=1.5"]);
    assert_eq!(code(&o), 0);
    let c: f64 = stdout(&o).split_whitespace().nth(2).unwrap().parse().unwrap();
    assert!(c > 0.0 && c.is_finite());
}

#[test]
fn frontspeed_fits_the_trajectory() {
    let dir = TempDir::new().unwrap();
    let o = sharpfront(dir.path(), &["frontspeed", "--set", "T=4", "--set", "dx=0.1"]);
    assert_eq!(code(&o), 0);
    let (_, rows) = read_csv(&dir.path().join("frontspeed.csv"));
    let speed: f64 = rows[0][0].parse().unwrap();
    assert!((speed - 1.0).abs() < 0.01, "{speed}");
    assert_eq!(code(&sharpfront(dir.path(), &["frontspeed", "--set", "T=1e-3"])), 3);
}

#[test]
fn sweep_with_single_and_empty_lists() {
    let dir = TempDir::new().unwrap();
    let o = sharpfront(
        dir.path(),
        &["sweep", "--set", "r_list=0.1", "--set", "T=4", "--set", "dx=0.1"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = read_csv(&dir.path().join("sweep.csv"));
    assert_eq!(header, ["r", "speed_pde", "speed_ode", "abs_diff"]);
    assert_eq!(rows.len(), 1);
    assert!(dir.path().join("edge_r0.1.csv").exists());
    assert_eq!(code(&sharpfront(dir.path(), &["sweep", "--set", "r_list="])), 2);
}

#[test]
fn sweep_over_default_delays() {
    let dir = TempDir::new().unwrap();
    let o = sharpfront(dir.path(), &["sweep"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (_, rows) = read_csv(&dir.path().join("sweep.csv"));
    assert_eq!(rows.len(), 4);
    let col = |i: usize| rows.iter().map(|r| r[i].parse::<f64>().unwrap()).collect::<Vec<_>>();
    assert!(col(1).windows(2).all(|w| w[1] < w[0]));
    assert!(col(2).windows(2).all(|w| w[1] < w[0]));
    assert!(col(3).iter().all(|&d| d <= 1e-2));
}

#[test]
fn perturb_writes_deviation_series() {
    let dir = TempDir::new().unwrap();
    let o = sharpfront(dir.path(), &["perturb", "--set", "r=0.1"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (_, rows) = read_csv(&dir.path().join("perturbation.csv"));
    let dev: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(dev.len(), 11);
    assert!((dev[0] - 0.2).abs() < 1e-12);
    assert!(dev[10] <= 1e-2);
    // A bound below the measured deviation is a failed check.
    assert_eq!(
        code(&sharpfront(
            dir.path(),
            &["perturb", "--set", "T=2", "--set", "perturb.bound=1e-6"]
        )),
        1
    );
}

#[test]
fn compare_prefers_the_sharp_scheme() {
    let dir = TempDir::new().unwrap();
    let o = sharpfront(dir.path(), &["compare"]);
    assert_eq!(code(&o), 0);
    let (_, rows) = read_csv(&dir.path().join("compare.csv"));
    let edge_err = |i: usize| rows[i][5].parse::<f64>().unwrap();
    assert_eq!((rows[0][0].as_str(), rows[1][0].as_str()), ("sharp", "classical"));
    assert!(edge_err(0) < edge_err(1));
    assert_eq!(code(&sharpfront(dir.path(), &["compare", "--set", "r=0.1"])), 2);
}

#[test]
fn validate_kinetics() {
    let dir = TempDir::new().unwrap();
    let o = sharpfront(dir.path(), &["validate", "--set", "r=0.1"]);
    assert_eq!(code(&o), 0);
    let (header, rows) = read_csv(&dir.path().join("homogeneous.csv"));
    assert_eq!(header, ["t", "U"]);
    let last: f64 = rows.last().unwrap()[1].parse().unwrap();
    assert!((last - 1.0).abs() < 1e-3);
    let bad = [
        "validate",
        "--set",
        "kinetics.name=linear-death",
        "--set",
        "kinetics.params=p=1,a=2,q=1",
    ];
    assert_eq!(code(&sharpfront(dir.path(), &bad)), 1);
}
