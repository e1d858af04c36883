use std::fs;
use std::process::{Command, Output};

fn nvchern() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_nvchern"));
    c.env_remove("NVCHERN_CONFIG");
    c
}

fn run(args: &[&str]) -> Output {
    nvchern().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn summary_value(o: &Output) -> f64 {
    let s = stdout(o);
    let line = s.lines().find(|l| l.starts_with("C = ")).unwrap_or_else(|| panic!("no summary in {s:?}"));
    line[4..].split_whitespace().next().unwrap().parse().unwrap()
}

#[test]
fn project_examples() {
    let o = run(&["project", "--hr", "1", "--h0", "0"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "0.5,0\n");
    let o = run(&["project", "--hr", "2", "--h0", "0.5"]);
    assert_eq!(stdout(&o), "0,0.5\n");
}

#[test]
fn projection_domain_error_exits_2() {
    let o = run(&["project", "--hr", "1", "--h0", "1.6"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("domain"));
}

#[test]
fn chern_static_methods() {
    let o = run(&["chern", "--method", "count", "--hr", "2.25", "--h0", "0.23"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.starts_with("C = 3 (monopole-count)\n"), "{s}");
    let json: serde_json::Value = serde_json::from_str(s.lines().nth(1).unwrap()).unwrap();
    assert_eq!(json["value"], 3.0);
    assert_eq!(json["method"], "monopole-count");

    let o = run(&["chern", "--method", "fhs", "--hr", "0.9", "--h0", "0"]);
    assert_eq!(summary_value(&o), 1.0);
    let o = run(&["chern", "--method", "lattice", "--hr", "0.9", "--h0", "0"]);
    assert_eq!(summary_value(&o), 1.0);
}

#[test]
fn chern_dynamic_adiabatic() {
    let o = run(&["chern", "--method", "dynamic", "--hr", "0.9", "--h0", "0", "--alpha", "8"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("(dynamic, alpha=8)"));
    assert!((summary_value(&o) - 1.0).abs() <= 0.1);
}

#[test]
fn berry_summary_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("berry.csv");
    let o = run(&["berry", "--hr", "2.25", "--h0", "0.23", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("(dynamic, alpha=2)"));
    assert!((summary_value(&o) - 3.0).abs() <= 0.4);
    let csv = fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "theta_rad,sigma_y_sum,f_phi,sy_m-1,sy_m0,sy_m+1");
    assert_eq!(lines.count(), 181);
    // The sum column is the sum of the sector columns.
    for row in csv.lines().skip(1) {
        let v: Vec<f64> = row.split(',').map(|x| x.parse().unwrap()).collect();
        assert!((v[1] - (v[3] + v[4] + v[5])).abs() < 1e-12);
    }

    let o = run(&["berry", "--hr", "0.5", "--h0", "10"]);
    assert!(summary_value(&o).abs() < 0.05);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["chern", "--method", "simpson", "--hr", "1", "--h0", "0.3"]).status.code(), Some(2));
    assert_eq!(run(&["chern", "--hr", "abc", "--h0", "0"]).status.code(), Some(2));
    assert_eq!(run(&["chern", "--hr", "-1", "--h0", "0"]).status.code(), Some(2));
    assert_eq!(run(&["phase-diagram", "--x", "1:0:3"]).status.code(), Some(2));
    assert_eq!(run(&["--jobs", "0", "project", "--hr", "1", "--h0", "0"]).status.code(), Some(2));
    // Starting the sweep on a degeneracy is a compute failure.
    assert_eq!(run(&["chern", "--hr", "1", "--h0", "0"]).status.code(), Some(1));
    let o = run(&["berry", "--hr", "1", "--h0", "0.3", "--out", "/nonexistent-dir/b.csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent-dir/b.csv"));
}

#[test]
fn config_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    fs::write(&cfg, "alpha = 8\nn_theta = 91\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let args = ["chern", "--hr", "0.9", "--h0", "0.05"];

    let o = nvchern().args(["--config", cfg]).args(args).output().unwrap();
    assert!(stdout(&o).contains("alpha=8"), "{}", stdout(&o));

    let o = nvchern().args(["--config", cfg, "--alpha", "4"]).args(args).output().unwrap();
    assert!(stdout(&o).contains("alpha=4"));

    let o = nvchern().env("NVCHERN_CONFIG", cfg).args(args).output().unwrap();
    assert!(stdout(&o).contains("alpha=8"));

    let o = nvchern().args(args).output().unwrap();
    assert!(stdout(&o).contains("alpha=2"));

    fs::write(dir.path().join("bad.conf"), "colour = red\n").unwrap();
    let o = nvchern()
        .args(["--config", dir.path().join("bad.conf").to_str().unwrap()])
        .args(args)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = nvchern().args(["--config", "/nonexistent.conf"]).args(args).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_out_dir_and_init() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    fs::write(&cfg, format!("out_dir = {}\ninit = electron-zero\n", dir.path().display())).unwrap();
    let args = ["berry", "--hr", "0.9", "--h0", "0.05", "--config", cfg.to_str().unwrap()];
    let o = nvchern().args(args).output().unwrap();
    assert!(o.status.success());
    assert!(dir.path().join("berry.csv").exists());
    // |0> is the excited state at the north pole, so the estimator flips sign.
    assert!(summary_value(&o) < -0.5);
    let o = nvchern().args(args).args(["--init", "ground"]).output().unwrap();
    assert!(summary_value(&o) > 0.5);
}

#[test]
fn phase_diagram_is_byte_identical_across_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for jobs in ["1", "3", "8"] {
        let out = dir.path().join(format!("grid{jobs}.csv"));
        let o = run(&[
            "--jobs", jobs, "phase-diagram", "--method", "dynamic", "--x", "-1.5:1.5:3", "--y", "0.3:2.1:3", "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        outputs.push(fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
    let text = String::from_utf8(outputs[0].clone()).unwrap();
    assert!(text.starts_with("h0_tilde,hr_tilde,chern,method,min_gap,flag\n"));
    assert_eq!(text.lines().count(), 10);
}

#[test]
fn phase_diagram_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("map.svg");
    let json = dir.path().join("map.json");
    let o = run(&[
        "phase-diagram", "--system", "nv", "--method", "count", "--x", "-2.25:2.25:45", "--y", "0.25:2.25:41",
        "--svg", svg.to_str().unwrap(), "--json", json.to_str().unwrap(), "--width", "800",
    ]);
    assert!(o.status.success());
    let csv = stdout(&o);
    assert_eq!(csv.lines().count(), 1 + 45 * 41);
    for row in csv.lines().skip(1) {
        let c: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
        assert!([0.0, 1.0, 2.0, 3.0].contains(&c));
    }
    let svg = fs::read_to_string(svg).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("width=\"800\""));
    assert_eq!(svg.matches("<title>").count(), 45 * 41);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(v["metadata"]["method"], "monopole-count");
    assert!(v["metadata"]["version"].is_string());
}

#[test]
fn three_qubit_count_map() {
    let o = run(&["phase-diagram", "--system", "3q", "--method", "count", "--x", "0:1.5:31", "--y", "0:2.5:51"]);
    assert!(o.status.success());
    let csv = stdout(&o);
    assert!(csv.starts_with("g_tilde_prime,h0_tilde_prime,chern,"));
    for row in csv.lines().skip(1) {
        let f: Vec<&str> = row.split(',').collect();
        let (g, h0, c): (f64, f64, f64) = (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap());
        if g == 0.0 && (h0 - 0.5).abs() < 1e-9 {
            assert_eq!(c, 3.0);
        }
        if g == 0.0 && (h0 - 1.5).abs() < 1e-9 {
            assert_eq!(c, 2.0);
        }
        if (g - 1.0).abs() < 1e-9 && h0 == 0.0 {
            assert_eq!(c, 1.0);
        }
    }
}

#[test]
fn cut_and_radial_outputs() {
    let o = run(&["cut", "--method", "count", "--fixed-x", "0.23", "--axis", "0.25:2.25:41"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.starts_with("x,chern\n0.25,1\n"), "{s}");
    assert!(s.trim_end().ends_with("2.25,3"));

    let o = run(&["radial", "--method", "count", "--h0-list", "0,0.23", "--hr", "0.22:2.2:20"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.starts_with("g_tilde_prime,h0_tilde_prime,chern\n"));
    assert_eq!(s.lines().count(), 41);
    let first: Vec<f64> = s.lines().nth(1).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert!((first[0] - 1.0 / 0.44).abs() < 1e-12 && first[1] == 0.0);
}

#[test]
fn landau_zener_scan() {
    let o = run(&["lz", "--hr", "1", "--h0", "0", "--sectors", "0", "--alphas", "0.1,0.5,1,2,4,8"]);
    assert!(o.status.success());
    let s = stdout(&o);
    let mut lines = s.lines();
    assert_eq!(lines.next().unwrap(), "alpha,ground_pop,sz_final");
    let pops: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(pops[0] < 0.5);
    assert!(pops.windows(2).all(|w| w[1] > w[0]));
    assert!(pops[5] > 0.99);
}

#[test]
fn help_documents_units() {
    for sub in ["berry", "chern", "phase-diagram", "cut", "lz", "project", "radial"] {
        let o = run(&[sub, "--help"]);
        assert!(o.status.success());
        let s = stdout(&o);
        assert!(s.contains("normalized"), "{sub}");
        assert!(s.contains("Hz"), "{sub}");
    }
}

#[test]
fn commands_are_deterministic() {
    let args = ["berry", "--hr", "1.3", "--h0", "-0.4"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}
