use std::process::Command;

use approx::assert_abs_diff_eq;
use cvres::commands::{monte_carlo, MonotoneReport};
use cvres::io::{parse_state, RawMatrix, StateInput};
use cvres_core::states::{make_state, Family, Sign, StateSpec};

fn cvres(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_cvres")).args(args).env_remove("CVRES_THREADS").output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(cvres(&["--help"]).0, 0);
    assert_eq!(cvres(&["no-such-command"]).0, 1);
    assert_eq!(cvres(&["monotone"]).0, 1);
    assert_eq!(cvres(&["monotone", "--state", "fock n=1", "--which", "bogus"]).0, 1);
    assert_eq!(cvres(&["--threads", "0", "monotone", "--state", "fock n=1"]).0, 1);
}

#[test]
fn unknown_figure_lists_valid_names() {
    let (code, _, err) = cvres(&["figure", "nope"]);
    assert_eq!(code, 1);
    for name in ["noisy-fock-fixed-n", "noisy-fock-fixed-nu", "cat", "squeezed", "protocols"] {
        assert!(err.contains(name), "{err}");
    }
}

#[test]
fn missing_cutoff_names_the_field() {
    let (code, _, err) = cvres(&["monotone", "--state", r#"{"family":"fock","params":{"n":1}}"#]);
    assert_eq!(code, 1);
    assert!(err.contains("cutoff"), "{err}");
}

#[test]
fn monotone_fock_one_json() {
    let (code, out, _) =
        cvres(&["monotone", "--state", r#"{"family":"fock","params":{"n":1},"cutoff":20}"#, "--which", "ncm-lower"]);
    assert_eq!(code, 0);
    let report: MonotoneReport = serde_json::from_str(&out).unwrap();
    assert_eq!(report.bounds.len(), 1);
    assert_abs_diff_eq!(report.bounds[0].value, std::f64::consts::LOG2_E, epsilon = 1e-6);
    assert!(report.converged);
}

#[test]
fn monotone_coherent_is_near_zero() {
    let (code, out, _) = cvres(&["monotone", "--state", "coherent", "α=2", "--which", "ncm-lower,nc-upper"]);
    assert_eq!(code, 0);
    let report: MonotoneReport = serde_json::from_str(&out).unwrap();
    assert!(report.lower >= 0.0 && report.upper <= 1e-4, "{report:?}");
}

#[test]
fn nats_scale_by_ln2() {
    let bits: MonotoneReport = serde_json::from_str(&cvres(&["monotone", "--state", "fock n=2"]).1).unwrap();
    let nats: MonotoneReport = serde_json::from_str(&cvres(&["--nats", "monotone", "--state", "fock n=2"]).1).unwrap();
    assert_eq!(nats.units, "nats");
    assert_abs_diff_eq!(nats.lower, bits.lower * std::f64::consts::LN_2, epsilon = 1e-12);
    assert_abs_diff_eq!(nats.upper, bits.upper * std::f64::consts::LN_2, epsilon = 1e-12);
}

#[test]
fn monotone_report_round_trips() {
    let (_, out, _) = cvres(&["monotone", "--state", "cat alpha=1 sign=+", "--which", "all"]);
    let report: MonotoneReport = serde_json::from_str(&out).unwrap();
    let again: MonotoneReport = serde_json::from_str(&serde_json::to_string(&report).unwrap()).unwrap();
    assert_eq!(report, again);
    assert!(report.lower <= report.upper);
}

#[test]
fn noisy_fock_figure_matches_closed_form() {
    let (code, out, _) = cvres(&["figure", "noisy-fock-fixed-n", "--nu-grid", "0"]);
    assert_eq!(code, 0);
    let rows = csv_rows(&out);
    assert_eq!(rows[0].join(","), "p,nu,n,lower_bits,upper_bits,cert_bits");
    assert_eq!(rows.len(), 20);
    for row in &rows[1..] {
        let p: f64 = row[0].parse().unwrap();
        let exact = p * std::f64::consts::LOG2_E + (1.0 - p) * (1.0 - p).log2();
        for cell in &row[3..5] {
            assert_abs_diff_eq!(cell.parse::<f64>().unwrap(), exact, epsilon = 1e-5);
        }
    }
}

#[test]
fn figure_headers() {
    let cases = [
        (vec!["figure", "noisy-fock-fixed-nu", "--p-grid", "0.5", "--n-grid", "2"], "p,nu,n,lower_bits,upper_bits,cert_bits"),
        (vec!["figure", "cat", "--alpha-grid", "0.5", "--signs", "+"], "alpha,sign,lower_bits,upper_bits"),
        (vec!["figure", "squeezed", "--r-grid", "1"], "r,lower_bits,upper_thermal_bits,upper_sq_thermal_bits,upper_energy_bits"),
        (vec!["--nats", "figure", "squeezed", "--r-grid", "1"], "r,lower_nats,upper_thermal_nats,upper_sq_thermal_nats,upper_energy_nats"),
    ];
    for (args, header) in cases {
        let (code, out, err) = cvres(&args);
        assert_eq!(code, 0, "{err}");
        assert_eq!(out.lines().next().unwrap(), header);
    }
}

#[test]
fn squeezed_figure_values() {
    let rows = csv_rows(&cvres(&["figure", "squeezed", "--r-grid", "1"]).1);
    let lower: f64 = rows[1][1].parse().unwrap();
    let energy: f64 = rows[1][4].parse().unwrap();
    // covariance bound log₂(2 cosh 1) − 1 and g(sinh² 1)
    assert_abs_diff_eq!(lower, (2.0 * 1f64.cosh()).log2() - 1.0, epsilon = 1e-8);
    assert_abs_diff_eq!(energy, 2.337, epsilon = 1e-3);
}

#[test]
fn protocols_figure_dilute_rate() {
    let (code, out, _) = cvres(&["figure", "protocols", "--alpha-grid", "1", "--task", "dilute"]);
    assert_eq!(code, 0);
    let rows = csv_rows(&out);
    assert_eq!(rows[0].join(","), "alpha,task,lower_rate,upper_rate");
    assert_eq!(rows[1][1], "dilute");
    assert_abs_diff_eq!(rows[1][2].parse::<f64>().unwrap(), 0.183550, epsilon = 1e-6);
}

#[test]
fn figure_output_is_deterministic_across_thread_counts() {
    let args = ["figure", "noisy-fock-fixed-nu", "--p-grid", "0.1:0.9:0.2", "--n-grid", "1,3"];
    let one = cvres(&[&["--threads", "1"][..], &args[..]].concat());
    let four = cvres(&[&["--threads", "4"][..], &args[..]].concat());
    assert_eq!(one.0, 0);
    assert_eq!(one.1, four.1);
    assert!(one.1.ends_with('\n') && !one.1.contains('\r'));
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let (code, out, _) = cvres(&["-o", path.to_str().unwrap(), "certify", "--epsilon", "0.1", "--energy", "1"]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_abs_diff_eq!(v["certificate"].as_f64().unwrap(), 1.063457, epsilon = 1e-6);
}

#[test]
fn certify_degenerate_inputs() {
    let zero: serde_json::Value = serde_json::from_str(&cvres(&["certify", "--epsilon", "0", "--energy", "3"]).1).unwrap();
    assert_eq!(zero["certificate"].as_f64().unwrap(), 0.0);
    let e0: serde_json::Value = serde_json::from_str(&cvres(&["certify", "--epsilon", "1", "--energy", "0"]).1).unwrap();
    assert_abs_diff_eq!(e0["certificate"].as_f64().unwrap(), 2.0, epsilon = 1e-12);
}

#[test]
fn certify_with_state_reports_interval() {
    let (code, out, _) = cvres(&["certify", "--epsilon", "1e-6", "--energy", "1", "--state", "fock n=1"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let lo = v["interval"][0]["value"].as_f64().unwrap();
    let up = v["interval"][1]["value"].as_f64().unwrap();
    assert!(lo <= up && (lo - std::f64::consts::LOG2_E).abs() < 1e-6);
}

#[test]
fn protocol_reports_closed_forms() {
    let (code, out, _) = cvres(&["protocol", "cat-amplification", "--alpha", "1"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let ours = v["outcomes"][1]["outcome"]["success_probability"].as_f64().unwrap();
    assert_abs_diff_eq!(ours, 0.5 * 1f64.tanh().powi(2), epsilon = 1e-8);
    assert_eq!(cvres(&["protocol", "fock-dilution", "--n", "2"]).0, 1);
    assert_eq!(cvres(&["protocol", "teleport"]).0, 1);
}

#[test]
fn monte_carlo_is_seeded() {
    let args = ["protocol", "fock-dilution", "--n", "2", "--p", "0.8", "--lambda", "0.5", "--monte-carlo", "2000", "--seed", "7"];
    let a = cvres(&args);
    assert_eq!(a.0, 0);
    assert_eq!(a.1, cvres(&args).1);
    let mc = monte_carlo(0.3, 20_000, 11);
    assert_eq!(mc, monte_carlo(0.3, 20_000, 11));
    assert!((mc.frequency - 0.3).abs() < 0.02);
}

#[test]
fn raw_matrix_import_matches_family_state() {
    let rho = make_state(&StateSpec::new(Family::NoisyFock { n: 1, nu: 0.0, p: 0.5 }, 6)).unwrap();
    let raw = RawMatrix::from_state(&rho);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rho.json");
    std::fs::write(&path, serde_json::to_string(&raw).unwrap()).unwrap();
    let (code, out, err) = cvres(&["monotone", "--state-file", path.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let report: MonotoneReport = serde_json::from_str(&out).unwrap();
    let exact = 0.5 * std::f64::consts::LOG2_E + 0.5 * 0.5f64.log2();
    assert_abs_diff_eq!(report.lower, exact, epsilon = 1e-6);
    assert_abs_diff_eq!(report.upper, exact, epsilon = 1e-6);
}

#[test]
fn raw_matrix_rejects_bad_shape() {
    let bad = r#"{"modes":1,"cutoff":2,"entries_re":[1,0,0],"entries_im":[0,0,0,0]}"#;
    assert!(parse_state(bad).is_err());
}

#[test]
fn state_spec_json_round_trip() {
    let specs = [
        StateSpec::new(Family::Fock { n: 3 }, 10),
        StateSpec::new(Family::Cat { alpha: 1.5, sign: Sign::Minus }, 30),
        StateSpec::new(Family::NoisyFock { n: 2, nu: 0.1, p: 0.4 }, 25),
        StateSpec::new(Family::Squeezed { r: 0.5 }, 40),
    ];
    for spec in specs {
        let text = serde_json::to_string(&spec).unwrap();
        match parse_state(&text).unwrap() {
            StateInput::Spec(back) => assert_eq!(back, spec),
            other => panic!("{other:?}"),
        }
    }
}

#[test]
fn shorthand_parses_aliases() {
    match parse_state("cat α=1 sign=odd cutoff=30").unwrap() {
        StateInput::Spec(s) => assert_eq!(s, StateSpec::new(Family::Cat { alpha: 1.0, sign: Sign::Minus }, 30)),
        other => panic!("{other:?}"),
    }
    assert!(parse_state("cat alpha=1 sign=?").is_err());
    assert!(parse_state("unicorn x=1").is_err());
}
