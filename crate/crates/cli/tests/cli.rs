use std::fs;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fracspeed"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn field(text: &str, key: &str) -> f64 {
    let line = text.lines().find(|l| l.starts_with(&format!("{key} "))).unwrap_or_else(|| panic!("{key} missing in {text}"));
    line.split_whitespace().nth(1).unwrap().parse().unwrap()
}

#[test]
fn eval_ml_matches_erfc_form() {
    let o = run(&["eval", "ml", "--alpha", "0.5", "--beta", "1", "--z", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v = field(&stdout(&o), "value");
    // e · erfc(−1)
    assert!((v - 5.008_980_080_762_283).abs() < 1e-8, "{v}");
    let o = run(&["eval", "ml", "--alpha", "0.5", "--beta", "1", "--z", "-1"]);
    assert!((field(&stdout(&o), "value") - 0.427_583_576_155_807).abs() < 1e-9);
}

#[test]
fn eval_wright_closed_form() {
    let o = run(&["eval", "wright", "--nu", "0.5", "--mu", "1", "--z", "-1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!((field(&stdout(&o), "value") - 0.479_500_122_186_953_5).abs() < 1e-9);
}

#[test]
fn thresholds_printed() {
    let o = run(&["thresholds", "--alpha", "0.5", "--rho", "1", "--dim", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!((field(&s, "power_lower") - 1.7321).abs() < 1e-4);
    assert!((field(&s, "power_upper") - 17.749).abs() < 1e-3);
    assert_eq!(field(&s, "m_alpha"), 9.0);
    assert!(s.contains("power_lower 1.732050808\n"), "ten significant digits: {s}");
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["eval", "ml", "--alpha", "1.5", "--beta", "1", "--z", "1"][..],
        &["eval", "ml", "--alpha", "abc", "--beta", "1", "--z", "1"],
        &["eval", "wright", "--nu", "0.5", "--mu", "1", "--z", "2"],
        &["thresholds", "--alpha", "0.5", "--rho", "-1", "--dim", "1"],
        &["kernel", "--rho", "1", "--dim", "1", "--t", "0", "--r", "1"],
        &["solution", "--alpha", "0.5", "--rho", "1", "--dim", "2", "--t", "1", "--r", "1", "--method", "fourier1d"],
        &["verify", "--suite", "nonsense"],
        &["verify", "--suite", "all", "--tol", "bogus=1"],
        &["frobnicate"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stderr.is_empty());
    }
    let o = run(&["eval", "ml", "--alpha", "1.5", "--beta", "1", "--z", "1"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--alpha"));
}

#[test]
fn kernel_and_solution_in_log_form() {
    let o = run(&["kernel", "--rho", "1", "--dim", "1", "--t", "1", "--r", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("exact sign pos log_abs "));
    let o = run(&["solution", "--alpha", "1", "--rho", "1", "--dim", "1", "--t", "60", "--r", "1"]);
    let s = stdout(&o);
    let want = 60.0 - 1.0 / 240.0 - 0.5 * (4.0 * std::f64::consts::PI * 60.0f64).ln();
    let line = s.lines().next().unwrap();
    let got: f64 = line.split_whitespace().last().unwrap().parse().unwrap();
    assert!((got - want).abs() < 1e-8, "{s}");
    let o = run(&["solution", "--alpha", "0.5", "--rho", "0.7", "--dim", "1", "--t", "2", "--r", "1", "--method", "envelope"]);
    let s = stdout(&o);
    assert!(s.contains("lower sign pos") && s.contains("upper sign pos"), "{s}");
}

#[test]
fn invade_csv_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("traj.csv");
    let o = run(&[
        "invade", "--alpha", "0.5", "--rho", "1", "--dim", "1", "--profile", "power", "--m", "1", "--beta", "1",
        "--n-samples", "12", "--output", path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("verdict Diverging"));
    let text = fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,theta,sign,log_u,method"));
    let ts: Vec<f64> = lines.map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(ts.len(), 12);
    assert!(ts.windows(2).all(|w| w[0] < w[1]));
    let leftovers: Vec<_> = fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(leftovers.len(), 1, "temporary file left behind");
}

#[test]
fn invade_config_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let cfg = dir.path().join("cfg.json");
    let text = format!(
        r#"{{"params":{{"alpha":0.5,"rho":0.5,"dim":1}},"profile":{{"kind":"Exponential","m":0.8,"beta":1}},
           "t_start":5,"t_end":40,"n_samples":10,"method":"subordination","output_path":{:?},"format":"json"}}"#,
        out.to_str().unwrap()
    );
    fs::write(&cfg, &text).unwrap();
    let o = run(&["invade", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let emitted = fs::read_to_string(&out).unwrap();
    let v: fracspeed::invasion::ExperimentReport = serde_json::from_str(&emitted).unwrap();
    assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", emitted);
    assert_eq!(v.cells[0].classification.unwrap().verdict, fracspeed::invasion::Verdict::Vanishing);

    fs::write(&cfg, text.replace(r#""format":"json""#, r#""format":"json","colour":"red""#)).unwrap();
    let o = run(&["invade", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["invade", "--config", cfg.to_str().unwrap(), "--m", "2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_single_suite_json() {
    let a = run(&["verify", "--suite", "ml-identities", "--json"]);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    let r: fracspeed::verify::SuiteReport = serde_json::from_str(&stdout(&a)).unwrap();
    assert!(r.passed() && r.cases_run > 0 && r.worst_rel_error < 1e-6);
    let b = run(&["verify", "--suite", "ml-identities", "--json"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_exit_code_follows_report() {
    let o = run(&["verify", "--suite", "asymptotics", "--json"]);
    let r: fracspeed::verify::SuiteReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(o.status.code(), Some(if r.passed() { 0 } else { 3 }));
    let o = run(&["verify", "--suite", "ml-identities", "--tol", "ml_erfc=0"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).starts_with("FAIL MLIdentities"));
}
