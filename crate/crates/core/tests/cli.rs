use std::process::{Command, Output};

use waring::cli::{parse_polynomial, DecompositionDocument};

fn waring(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_waring"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn terms_line(text: &str) -> usize {
    text.lines()
        .find_map(|l| l.strip_prefix("terms: "))
        .expect("terms line")
        .trim()
        .parse()
        .unwrap()
}

#[test]
fn fourth_power_is_one_term() {
    let o = waring(&["decompose", "x0^4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(terms_line(&stdout(&o)), 1);
}

#[test]
fn witness_quartic_within_seven() {
    let o = waring(&["decompose", "x0^2*x1^2 - x0^3*x2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(terms_line(&stdout(&o)) <= 7);
}

#[test]
fn json_output_reproduces_residual() {
    let poly = "x0^4 + 2*x1^3*x2 - 3*x0*x1*x2^2 + (0.5+1i)*x2^4 + x0^2*x1*x2";
    let o = waring(&["decompose", poly, "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: DecompositionDocument = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(doc.terms.len() <= 7);
    let f = parse_polynomial(poly).unwrap();
    let g = doc.to_form(3, 4).unwrap();
    let residual = (&g - &f).norm() / f.norm();
    assert!(residual <= 1e-6);
    assert!((residual - doc.residual).abs() <= 1e-12 + 1e-6 * doc.residual);
}

#[test]
fn classify_reports_tangent_line() {
    let o = waring(&["classify", "x0^3*x1", "--L", "x0^4,x1^4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("case: C2"), "{}", stdout(&o));
}

#[test]
fn classify_json_has_case() {
    let o = waring(&["classify", "x0^2*x1^2", "--L", "x0^4,x1^4", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["case"], "C11");
}

#[test]
fn parse_errors_exit_two() {
    for bad in ["x0^4 +", "x0^^4", "x0^4 + x1^3"] {
        let o = waring(&["decompose", bad]);
        assert_eq!(o.status.code(), Some(2), "input {bad}");
        assert!(!o.stderr.is_empty());
    }
    let o = waring(&["decompose"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn rank_with_oracle_lists_each_fit() {
    let o = waring(&["rank", "x0^4 + x1^4 + x2^4", "--oracle", "r=3,restarts=5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("decomposition length: 3"), "{text}");
    for r in 1..=3 {
        assert!(text.contains(&format!("fit rank {r}:")), "{text}");
    }
    let o = waring(&["rank", "x0^4", "--oracle", "k=3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sample_prints_json_lines() {
    let o = waring(&["sample", "--rank", "4", "--count", "3", "--seed", "9"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    for (i, line) in lines.iter().enumerate() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["index"], i);
        assert!(v["decomposition"]["terms"].as_array().unwrap().len() <= 7);
    }
}
