use std::fs;
use std::process::{Command, Output};

fn wgemit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wgemit"))
        .args(args)
        .env_remove("WGEMIT_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field(line: &str, key: &str) -> f64 {
    line.split_whitespace()
        .find_map(|kv| kv.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in {line}"))
        .parse()
        .unwrap()
}

#[test]
fn modes_lists_two_te_and_two_tm() {
    let o = wgemit(&["modes", "--n1", "2.2", "--n2", "1.45", "--n3", "1.0", "--d", "400", "--lambda", "780"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    for (line, (pol, order)) in lines.iter().zip([("TE", 0), ("TE", 1), ("TM", 0), ("TM", 1)]) {
        assert!(line.starts_with(&format!("pol={pol} order={order} ")), "{line}");
        assert!(field(line, "n_group") >= field(line, "n_eff"));
        assert!(line.ends_with("at_cutoff=false"));
    }
}

#[test]
fn perpendicular_rates_have_zero_te_rows() {
    let o = wgemit(&["rates", "--orientation", "perp"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let te: Vec<&str> = text.lines().filter(|l| l.starts_with("mode=TE")).collect();
    assert_eq!(te.len(), 2);
    for line in te {
        assert_eq!(field(line, "rate_over_w0"), 0.0);
        assert_eq!(field(line, "branching"), 0.0);
    }
}

#[test]
fn fig2_defaults_write_expected_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig2.csv");
    let o = wgemit(&["fig2", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("wrote 200 rows"));
    let csv = fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "abscissa_nm,P_TE0,P_TE1,P_TM0,P_TM1,guided_sum,wtot_over_w0"
    );
    let first: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert!((0.43..=0.57).contains(&first[5]), "{}", first[5]);
    assert!(!csv.contains('\r'));
    // Twelve significant digits in scientific notation everywhere.
    for value in csv.lines().skip(1).flat_map(|l| l.split(',')) {
        let mantissa = value.split('e').next().unwrap().trim_start_matches('-');
        assert_eq!(mantissa.len(), 13, "{value}");
        assert!(value.contains('e'));
    }
}

#[test]
fn csv_is_byte_identical_across_runs_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(
        &cfg,
        r#"{"command": "sweep", "n1": 2.0, "n2": 1.0, "n3": 1.0, "d_nm": 255, "orientation": "perp",
            "axis": "thickness", "start_nm": 200, "stop_nm": 300, "points": 21, "spacing": "lin", "z_nm": 10}"#,
    )
    .unwrap();
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_wgemit"))
            .args(["sweep", "--config", cfg.to_str().unwrap()])
            .env("WGEMIT_THREADS", threads)
            .output()
            .unwrap()
    };
    let a = run("1");
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, run("1").stdout);
    assert_eq!(a.stdout, run("4").stdout);
    let header = stdout(&a).lines().next().unwrap().to_string();
    assert!(header.starts_with("abscissa_nm,P_TE0,P_TE1,P_TM0,P_TM1,guided_sum,wtot_over_w0"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"n1": 2.0, "n2": 1.0, "n3": 1.0, "d_nm": 100}"#).unwrap();
    let thin = wgemit(&["modes", "--config", cfg.to_str().unwrap()]);
    let thick = wgemit(&["modes", "--config", cfg.to_str().unwrap(), "--d", "255"]);
    assert_eq!(stdout(&thin).lines().count(), 2);
    assert_eq!(stdout(&thick).lines().count(), 4);
}

#[test]
fn fig3_writes_one_file_per_thickness() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig3.csv");
    let o = wgemit(&["fig3", "--points", "5", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    for d in [235, 245, 255] {
        let csv = fs::read_to_string(dir.path().join(format!("fig3_d{d}.csv"))).unwrap();
        assert_eq!(csv.lines().count(), 6);
    }
}

#[test]
fn optimize_and_scaling_check_report() {
    let o = wgemit(&["optimize"]);
    assert_eq!(o.status.code(), Some(0));
    let line = stdout(&o);
    assert!(field(&line, "guided_sum") > 0.5);
    let d = field(&line, "d_opt_nm");
    assert!(d > 100.0 && d < 400.0);

    let o = wgemit(&["scaling-check", "--z", "50"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 3);
    for line in text.lines() {
        assert!(field(line, "max_rel_deviation") <= 1e-10);
    }
}

#[test]
fn exit_codes() {
    let non_guiding = wgemit(&["modes", "--n1", "1.3", "--n2", "1.45"]);
    assert_eq!(non_guiding.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&non_guiding.stderr).contains("n1 > n2"));

    let unknown = wgemit(&["modes", "--bogus"]);
    assert_eq!(unknown.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("Usage"));

    assert_eq!(wgemit(&["rates", "--z", "-5"]).status.code(), Some(2));
    assert_eq!(wgemit(&["nonsense"]).status.code(), Some(2));

    let starved = wgemit(&["rates", "--max-panels", "1", "--rel-tol", "1e-15", "--abs-tol", "0"]);
    assert_eq!(starved.status.code(), Some(3));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"n4": 2}"#).unwrap();
    assert_eq!(wgemit(&["modes", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));

    let threads = Command::new(env!("CARGO_BIN_EXE_wgemit"))
        .arg("modes")
        .env("WGEMIT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(threads.status.code(), Some(2));
}
