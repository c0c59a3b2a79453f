use std::f64::consts::FRAC_PI_4;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const IDENTITY: &str = r#"{"a_count":2,"m_count":1,"s_count":2,"probs":[[[1,0]],[[0,1]]]}"#;
const INDEPENDENT: &str = r#"{"a_count":3,"m_count":2,"s_count":2,"probs":[[[0.25,0.75],[0.6,0.4]],[[0.25,0.75],[0.6,0.4]],[[0.25,0.75],[0.6,0.4]]]}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_commbound"))
        .args(args)
        .env_remove("CBOX_CAP")
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn validate_accepts_a_valid_box() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "id.json", IDENTITY);
    let out = run(&["validate", s(&p)]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("a_count=2 m_count=1 s_count=2"));
    assert!(stdout(&out).contains("largest row-sum deviation"));
}

#[test]
fn validate_names_a_negative_entry() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "neg.json", r#"{"a_count":1,"m_count":2,"s_count":2,"probs":[[[0.5,0.5],[1.25,-0.25]]]}"#);
    let out = run(&["validate", s(&p)]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("(a=0, b=1, s=1)"), "{}", stderr(&out));
}

#[test]
fn validate_reports_byte_offset_of_malformed_json() {
    let dir = TempDir::new().unwrap();
    let text = "{\"a_count\": 1,\n \"probs\": [}";
    let p = write(&dir, "bad.json", text);
    let out = run(&["validate", s(&p)]);
    assert_eq!(code(&out), 1);
    let err = stderr(&out);
    let offset = text.find('}').unwrap();
    assert!(err.contains(&format!("byte {offset}")), "{err}");
}

#[test]
fn validate_rejects_unnormalized_rows_and_missing_files() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "row.json", r#"{"a_count":1,"m_count":1,"s_count":2,"probs":[[[0.5,0.4]]]}"#);
    assert_eq!(code(&run(&["validate", s(&p)])), 1);
    assert_eq!(code(&run(&["validate", s(&dir.path().join("absent.json"))])), 1);
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(code(&run(&["bogus"])), 1);
    assert_eq!(code(&run(&["analytic"])), 1);
    assert_eq!(code(&run(&["bound", "x.json", "--tol", "-1"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn haar_boxes_are_reproducible() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let args = ["quantum", "--haar", "2", "4", "--haar-axes", "4", "--seed", "7"];
    let mut with_output = args.to_vec();
    with_output.extend(["-o", s(&a)]);
    assert_eq!(code(&run(&with_output)), 0);
    let again = run(&args);
    assert_eq!(fs::read_to_string(&a).unwrap(), stdout(&again));
    let doc: Value = serde_json::from_str(&stdout(&again)).unwrap();
    assert_eq!(
        (doc["a_count"].as_u64(), doc["m_count"].as_u64(), doc["s_count"].as_u64()),
        (Some(4), Some(4), Some(2))
    );
    let other = run(&["quantum", "--haar", "2", "4", "--haar-axes", "4", "--seed", "8"]);
    assert_ne!(stdout(&other), stdout(&again));
}

#[test]
fn bb84_states_give_hand_overlaps() {
    let dir = TempDir::new().unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    // |0⟩, |1⟩, |+⟩, |−i⟩ written in both amplitude notations
    let states = format!(r#"{{"states": [[1, 0], [0, 1], [{h}, {h}], [{h}, [0, {m}]]]}}"#, m = -h);
    let p = write(&dir, "bb84.json", &states);
    let out = run(&["quantum", "--states", s(&p), "--axes", s(&p)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let want = [[1.0, 0.0, 0.5, 0.5], [0.0, 1.0, 0.5, 0.5], [0.5, 0.5, 1.0, 0.5], [0.5, 0.5, 0.5, 1.0]];
    for (a, row) in want.iter().enumerate() {
        for (b, &p1) in row.iter().enumerate() {
            let got = doc["probs"][a][b][0].as_f64().unwrap();
            assert!((got - p1).abs() < 1e-12, "({a},{b}): {got}");
        }
    }
}

#[test]
fn dimension_mismatch_is_invalid() {
    let dir = TempDir::new().unwrap();
    let states = write(&dir, "s.json", "[[1, 0], [0, 1]]");
    let axes = write(&dir, "a.json", "[[1, 0, 0]]");
    let out = run(&["quantum", "--states", s(&states), "--axes", s(&axes)]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("dimension mismatch"));
}

#[test]
fn identity_box_bound_is_one_bit() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "id.json", IDENTITY);
    let out = run(&["bound", s(&p), "--method", "both"]);
    assert_eq!(code(&out), 0);
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let primal = doc["primal"]["value_bits"].as_f64().unwrap();
    let dual = doc["dual"]["bound_bits"].as_f64().unwrap();
    assert!((primal - 1.0).abs() < 1e-6 && (dual - 1.0).abs() < 1e-6);
    let gap = doc["gap_nats"].as_f64().unwrap();
    assert!((-1e-9..=1e-6).contains(&gap));
}

#[test]
fn independent_box_bound_is_zero() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "ind.json", INDEPENDENT);
    for method in ["primal", "dual", "both"] {
        let out = run(&["bound", s(&p), "--method", method, "--format", "csv"]);
        assert_eq!(code(&out), 0);
        for value in &csv_rows(&stdout(&out))[0][1..] {
            assert!(value.parse::<f64>().unwrap().abs() < 1e-9, "{method}: {value}");
        }
    }
}

#[test]
fn enumeration_cap_overflow_exits_with_four() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "ind.json", INDEPENDENT);
    let out = run(&["bound", s(&p), "--cap", "3"]);
    assert_eq!(code(&out), 4);
    assert!(stderr(&out).contains("--cap 4"), "{}", stderr(&out));
    let out =
        Command::new(env!("CARGO_BIN_EXE_commbound")).args(["bound", s(&p)]).env("CBOX_CAP", "2").output().unwrap();
    assert_eq!(code(&out), 4);
    assert_eq!(code(&run(&["bound", s(&p), "--cap", "0"])), 1);
}

#[test]
fn prior_file_and_shape_check() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "id.json", IDENTITY);
    let skewed = write(&dir, "prior.json", r#"{"weights": [0.9, 0.1]}"#);
    let out = run(&["bound", s(&p), "--prior", s(&skewed), "--format", "csv"]);
    assert_eq!(code(&out), 0);
    // H(0.9) for a noiseless box
    let h = -(0.9f64 * 0.9f64.log2() + 0.1 * 0.1f64.log2());
    let row = &csv_rows(&stdout(&out))[0];
    assert!((row[1].parse::<f64>().unwrap() - h).abs() < 1e-6);
    let wrong = write(&dir, "three.json", r#"{"weights": [0.2, 0.3, 0.5]}"#);
    assert_eq!(code(&run(&["bound", s(&p), "--prior", s(&wrong)])), 1);
}

fn certify(dir: &TempDir) -> (PathBuf, PathBuf, f64) {
    let b = write(dir, "q.json", "");
    let out = run(&["quantum", "--haar", "2", "3", "--haar-axes", "2", "--seed", "3", "-o", s(&b)]);
    assert_eq!(code(&out), 0);
    let cert = dir.path().join("cert.json");
    let out = run(&["bound", s(&b), "--method", "dual", "--certificate", s(&cert)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    (b, cert, doc["dual"]["bound_bits"].as_f64().unwrap())
}

#[test]
fn certificate_round_trip_verifies() {
    let dir = TempDir::new().unwrap();
    let (b, cert, bound) = certify(&dir);
    let out = run(&["verify", s(&cert), s(&b)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    let verified: f64 = text.split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!((verified - bound).abs() < 1e-12, "{verified} vs {bound}");
    let doc: Value = serde_json::from_str(&fs::read_to_string(&cert).unwrap()).unwrap();
    assert_eq!(doc["created"].as_u64(), Some(1_700_000_000));
}

#[test]
fn edited_lambda_is_rejected_with_witness() {
    let dir = TempDir::new().unwrap();
    let (b, cert, _) = certify(&dir);
    let mut doc: Value = serde_json::from_str(&fs::read_to_string(&cert).unwrap()).unwrap();
    let entry = &mut doc["lambda"][0][1][0];
    *entry = Value::from(entry.as_f64().unwrap() + 0.5);
    let tampered = write(&dir, "tampered.json", &doc.to_string());
    let out = run(&["verify", s(&tampered), s(&b)]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("witness: ("), "{}", stderr(&out));
}

#[test]
fn over_claimed_bound_is_rejected() {
    let dir = TempDir::new().unwrap();
    let (b, cert, _) = certify(&dir);
    let mut doc: Value = serde_json::from_str(&fs::read_to_string(&cert).unwrap()).unwrap();
    doc["claimed_bound_bits"] = Value::from(doc["claimed_bound_bits"].as_f64().unwrap() + 0.01);
    let inflated = write(&dir, "inflated.json", &doc.to_string());
    assert_eq!(code(&run(&["verify", s(&inflated), s(&b)])), 2);
}

#[test]
fn wrong_box_is_a_digest_mismatch() {
    let dir = TempDir::new().unwrap();
    let (_, cert, _) = certify(&dir);
    let other = write(&dir, "id.json", IDENTITY);
    let out = run(&["verify", s(&cert), s(&other)]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("digest mismatch"));
}

#[test]
fn certificate_needs_a_dual_method() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "id.json", IDENTITY);
    let c = dir.path().join("c.json");
    assert_eq!(code(&run(&["bound", s(&p), "--method", "primal", "--certificate", s(&c)])), 1);
    assert!(!c.exists());
}

#[test]
fn bound_output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let b = write(&dir, "q.json", "");
    run(&["quantum", "--haar", "3", "3", "--haar-axes", "2", "--seed", "11", "-o", s(&b)]);
    let (c1, c2) = (dir.path().join("c1.json"), dir.path().join("c2.json"));
    let first = run(&["bound", s(&b), "--certificate", s(&c1)]);
    let second = run(&["bound", s(&b), "--certificate", s(&c2)]);
    assert_eq!(code(&first), 0);
    assert_eq!(stdout(&first).replace("c1.json", ""), stdout(&second).replace("c2.json", ""));
    assert_eq!(fs::read(&c1).unwrap(), fs::read(&c2).unwrap());
}

#[test]
fn analytic_table_matches_reference_values() {
    let out = run(&["analytic", "--table"]);
    assert_eq!(code(&out), 0);
    let rows = csv_rows(&stdout(&out));
    let approx = [1.14227, 1.86776, 2.45238];
    let refined = [1.14602, 1.87606, 2.46463];
    assert_eq!(rows.len(), 3);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row[0], (i + 2).to_string());
        assert!((row[4].parse::<f64>().unwrap() - approx[i]).abs() < 1e-4);
        assert!((row[5].parse::<f64>().unwrap() - refined[i]).abs() < 1e-3);
    }
    let json = run(&["analytic", "--table", "--format", "json"]);
    let doc: Value = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(doc[0]["N"].as_u64(), Some(2));
    assert!(doc[1]["prior_reference_bits"].is_null());
}

#[test]
fn profile_minimum_sits_at_quarter_pi() {
    let out = run(&["analytic", "--fig1", "2", "1000"]);
    assert_eq!(code(&out), 0);
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 1000);
    let (theta, _) = rows
        .iter()
        .map(|r| (r[0].parse::<f64>().unwrap(), r[1].parse::<f64>().unwrap()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    assert!((theta - FRAC_PI_4).abs() <= std::f64::consts::FRAC_PI_2 / 1000.0);
    assert_eq!(code(&run(&["analytic", "--fig1", "5", "100"])), 1);
}

#[test]
fn fig2_is_increasing_in_dimension() {
    let out = run(&["analytic", "--fig2"]);
    let rows = csv_rows(&stdout(&out));
    let refined: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(refined.len(), 3);
    assert!(refined.windows(2).all(|w| w[1] > w[0]));
}

fn mc_rows(args: &[&str]) -> Vec<Vec<String>> {
    let out = run(args);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    csv_rows(&stdout(&out))
}

#[test]
fn second_moment_matches_one_over_n() {
    let rows = mc_rows(&["mc", "--moments", "2", "1e6", "7"]);
    assert_eq!(rows[0][0], "moment2");
    assert_eq!(rows[0][5].parse::<f64>().unwrap(), 0.5);
    assert!(rows[0][6].parse::<f64>().unwrap().abs() <= 5.0);
}

#[test]
fn fourth_moment_in_dimension_four() {
    let rows = mc_rows(&["mc", "--moments", "4", "1e6", "7"]);
    assert_eq!(rows[1][0], "moment4");
    assert!((rows[1][5].parse::<f64>().unwrap() - 0.1).abs() < 1e-15);
    assert!(rows[1][6].parse::<f64>().unwrap().abs() <= 5.0);
}

#[test]
fn cone_measure_check() {
    let rows = mc_rows(&["mc", "--cone", "3", "1.0472", "1e6", "7"]);
    assert!((rows[0][5].parse::<f64>().unwrap() - 0.5625).abs() < 1e-5);
    assert!(rows[0][6].parse::<f64>().unwrap().abs() <= 5.0);
    assert_eq!(code(&run(&["mc", "--cone", "3", "abc", "10", "7"])), 1);
    assert_eq!(code(&run(&["mc", "--moments", "3", "1.5", "7"])), 1);
}

#[test]
fn mc_is_seeded() {
    let a = stdout(&run(&["mc", "--moments", "3", "1000", "5"]));
    let b = stdout(&run(&["mc", "--moments", "3", "1000", "5"]));
    let c = stdout(&run(&["mc", "--moments", "3", "1000", "6"]));
    assert_eq!(a, b);
    assert_ne!(a, c);
}
