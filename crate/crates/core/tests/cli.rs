use std::path::Path;
use std::process::{Command, Output};

fn ivlab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ivlab"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn simulate_writes_n_plus_one_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = ivlab(&["simulate", "--n", "4", "--out", "p.csv"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = read(dir.path(), "p.csv");
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[0], "time,value");
    assert!(lines[1].starts_with("0.0000000000000000e0,0.0000000000000000e0"));
    assert!(!text.contains('\r'));
}

#[test]
fn estimate_realized_on_fixed_values() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("v.csv"), "time,value\n0,0\n0.25,1\n0.5,0\n0.75,2\n").unwrap();
    let out = ivlab(&["estimate", "--input", "v.csv", "--variant", "realized", "--out", "e.csv"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = read(dir.path(), "e.csv");
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("estimator,n,seed,value,tuning_used,degenerate"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "realized");
    assert_eq!(row[1], "3");
    assert_eq!(row[3].parse::<f64>().unwrap(), 6.0);
    assert_eq!(row[5], "false");
}

#[test]
fn estimate_from_config_list() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("lab.conf"),
        "estimators[0].variant = multipower\nestimators[0].k = 2\nestimators[1].variant = spectral\nestimators[1].u = 3\n",
    )
    .unwrap();
    std::fs::write(dir.path().join("v.csv"), "value\n0\n1\n2\n4\n").unwrap();
    let out = ivlab(&["estimate", "--config", "lab.conf", "--input", "v.csv", "--out", "e.csv"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = read(dir.path(), "e.csv");
    assert_eq!(text.lines().count(), 3);
    let bv: f64 = text.lines().nth(1).unwrap().split(',').nth(3).unwrap().parse().unwrap();
    assert!((bv - 1.5 * std::f64::consts::PI).abs() < 1e-12);
}

#[test]
fn minimax_rows_have_decreasing_tv_bound() {
    let dir = tempfile::tempdir().unwrap();
    let out = ivlab(
        &["minimax", "--r", "1.5", "--n-grid", "256,1024,4096", "--out", "m.csv", "--dump-dir", "dump"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = read(dir.path(), "m.csv");
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("r,n,a_n,u_n,norm_eta,norm_eta_prime,tv_bound,grid_spacing,grid_extent,tv_proxy")
    );
    let tv: Vec<f64> = lines.map(|l| l.split(',').nth(6).unwrap().parse().unwrap()).collect();
    assert_eq!(tv.len(), 3);
    assert!(tv.windows(2).all(|w| w[1] < w[0]), "{tv:?}");
    assert!(dir.path().join("dump/eta_r1.5_n4096.csv").exists());
}

#[test]
fn rates_is_idempotent_and_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("plan.conf"),
        "# continuous model, two estimators\nvolatility.value = 1\nestimators[0].variant = realized\nestimators[1].variant = truncated\nestimators[1].varpi = 0.4\nplan.n_grid = 64,128,256\nplan.replications = 20\nseed = 7\n",
    )
    .unwrap();
    let args = ["rates", "--config", "plan.conf", "--out", "r.csv", "--threads", "2"];
    assert!(ivlab(&args, dir.path()).status.success());
    let first = (read(dir.path(), "r.csv"), read(dir.path(), "r.json"));
    assert!(ivlab(&args, dir.path()).status.success());
    let second = (read(dir.path(), "r.csv"), read(dir.path(), "r.json"));
    assert_eq!(first, second);
    assert_eq!(first.0.lines().count(), 7);
    let json: serde_json::Value = serde_json::from_str(&first.1).unwrap();
    assert_eq!(json["report"]["rates"].as_array().unwrap().len(), 2);
    assert!(json["report"]["rates"][0]["fit"]["slope"].is_number());

    let out = ivlab(&["rates", "--config", "plan.conf", "--out", "s.csv", "--set", "seed=8"], dir.path());
    assert!(out.status.success());
    assert_ne!(read(dir.path(), "s.csv"), first.0);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(ivlab(&["frobnicate"], d).status.code(), Some(1));
    assert_eq!(ivlab(&["simulate", "--n", "4", "--out", "p.csv", "--set", "nope=1"], d).status.code(), Some(2));
    assert_eq!(ivlab(&["simulate", "--out", "p.csv", "--config", "missing.conf"], d).status.code(), Some(2));
    std::fs::write(d.join("bad.conf"), "volatility.value\n").unwrap();
    let out = ivlab(&["simulate", "--n", "4", "--out", "p.csv", "--config", "bad.conf"], d);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(String::from_utf8_lossy(&out.stderr).lines().count(), 1);
    assert_eq!(ivlab(&["estimate", "--input", "absent.csv", "--variant", "realized", "--out", "e.csv"], d).status.code(), Some(4));
    assert_eq!(ivlab(&["simulate", "--n", "4", "--out", "no/such/dir/p.csv"], d).status.code(), Some(4));
    assert_eq!(ivlab(&["minimax", "--r", "0.5", "--n-grid", "256", "--out", "m.csv"], d).status.code(), Some(3));
    // class check fails before any simulation
    std::fs::write(
        d.join("cls.conf"),
        "jumps[0].kind = symmetric-stable\njumps[0].beta = 1.5\nestimators[0].variant = spectral\nestimators[0].r = 1.6\nestimators[0].a = 0.5\nplan.n_grid = 64,128,256\nplan.replications = 5\n",
    )
    .unwrap();
    assert_eq!(ivlab(&["rates", "--config", "cls.conf", "--out", "r.csv"], d).status.code(), Some(3));
    assert!(!d.join("r.csv").exists());
}
