use std::path::PathBuf;
use std::process::{Command, Output};

use treemeasure::analytic::parse_rational;
use treemeasure::render::{parse_record, record_field};
use treemeasure::Rational;

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treemeasure"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exited normally")
}

#[test]
fn measure_prints_the_exact_rational_first() {
    let out = stdout(&["measure", "cq", &fixture("root_a.pat")]);
    assert_eq!(out.lines().next(), Some("1/2"));
    assert_eq!(out.lines().nth(1), Some("0.500000000000"));
    let out = stdout(&["measure", "path", "--alphabet", "abc", "--subset", "ab"]);
    assert_eq!(out.lines().next(), Some("1/2"));
    let out = stdout(&["measure", "fo", &fixture("gnf_unsat.fo")]);
    assert_eq!(out.lines().next(), Some("0/1"));
    let out = stdout(&["measure", "fo", &fixture("gnf_root_a.fo"), "--mode", "paper"]);
    assert_eq!(out.lines().next(), Some("1/2"));
    assert!(out.contains("determining depth: 3"));
}

#[test]
fn path_language_edge_cases() {
    for (alphabet, subset, expected) in [("ab", "a", "0/1"), ("abc", "a", "0/1"), ("abc", "abc", "1/1")] {
        let out = stdout(&["measure", "path", "--alphabet", alphabet, "--subset", subset]);
        assert_eq!(out.lines().next(), Some(expected), "{alphabet} {subset}");
    }
}

#[test]
fn positive_answers() {
    assert_eq!(
        stdout(&["positive", "cq", &fixture("root_a.pat")]),
        "positive\nheight 0\na\nhomomorphism: x=e\n"
    );
    assert_eq!(stdout(&["positive", "cq", &fixture("conflict.pat")]), "zero\n");
    assert_eq!(stdout(&["positive", "bccq", &fixture("bottom.bccq")]), "zero\n");
}

#[test]
fn decompositions() {
    let out = stdout(&["decompose", &fixture("ancestor.pat")]);
    assert!(out.starts_with("components 2\n"));
    assert_eq!(out.matches("dag ").count(), 1);
    let out = stdout(&["decompose", &fixture("left_child.pat")]);
    assert!(out.starts_with("components 1\n"));
    let out = stdout(&["decompose", &fixture("two_roots.pat")]);
    assert!(out.contains("component 0 root: x y"));
    let rec = parse_record(&stdout(&["decompose", &fixture("ancestor.pat"), "--format", "record"])).unwrap();
    assert_eq!(record_field(&rec, "root_component"), Some("none"));
}

#[test]
fn counts() {
    assert_eq!(stdout(&["count", "cq", &fixture("root_a.pat"), "--height", "1"]), "4 / 8\n");
    assert_eq!(stdout(&["count", "bccq", &fixture("tautology.bccq"), "--height", "0"]), "3 / 3\n");
    assert_eq!(stdout(&["count", "cq", &fixture("conflict.pat"), "--depth", "1"]), "0 / 8\n");
}

#[test]
fn estimates_are_deterministic() {
    let args = ["estimate", "cq", &fixture("root_a.pat"), "--depth", "3", "--seed", "7"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let rec = parse_record(&stdout(&[&args[..], &["--format", "record"]].concat())).unwrap();
    let point: f64 = record_field(&rec, "estimate").unwrap().parse().unwrap();
    assert!((point - 0.5).abs() < 0.01);
    let rec = parse_record(&stdout(&[
        "estimate",
        "subtree",
        &fixture("single_a.tree"),
        "--depth",
        "6",
        "--format",
        "record",
    ]))
    .unwrap();
    let point: f64 = record_field(&rec, "estimate").unwrap().parse().unwrap();
    assert!(point >= 0.99);
}

#[test]
fn solve_reports_enclosure_and_rational_roots() {
    let rec = parse_record(&stdout(&["solve", "1,0,0,-8,4", "--format", "record"])).unwrap();
    let lo = parse_rational(record_field(&rec, "lo").unwrap()).unwrap();
    let hi = parse_rational(record_field(&rec, "hi").unwrap()).unwrap();
    let bound = |s: &str| parse_rational(s).unwrap();
    assert!(lo > bound("0.5083") && hi < bound("0.5084"));
    assert!(&hi - &lo <= bound("1e-9"));
    assert_eq!(record_field(&rec, "rational_roots"), Some("none"));
    let out = stdout(&["solve", "2,-1"]);
    assert!(out.contains("rational roots: 1/2"));
    assert_eq!(code(&["solve", "1,0,1"]), 4);
}

#[test]
fn record_output_round_trips_the_rational() {
    for (kind, file) in [("cq", "root_a.pat"), ("bccq", "tautology.bccq"), ("fo", "gnf_root_a.fo")] {
        let text = stdout(&["measure", kind, &fixture(file), "--format", "record"]);
        let rec = parse_record(&text).unwrap();
        let value = parse_rational(record_field(&rec, "measure").unwrap()).unwrap();
        let sat = parse_rational(record_field(&rec, "satisfying_count").unwrap_or("1")).unwrap();
        let total = parse_rational(record_field(&rec, "total_count").unwrap_or("1")).unwrap();
        if record_field(&rec, "total_count").is_some() {
            assert_eq!(value, sat / total, "{kind}");
        } else {
            assert_eq!(value, Rational::from_integer(1.into()), "{kind}");
        }
    }
}

#[test]
fn exit_codes_on_bad_inputs() {
    let cases: &[(&[&str], i32)] = &[
        (&["measure", "cq", &fixture("bad_symbol.pat")], 2),
        (&["measure", "cq", &fixture("bad_edge.pat")], 2),
        (&["measure", "fo", &fixture("bad_formula.fo")], 2),
        (&["measure", "fo", &fixture("nonlocal.fo")], 2),
        (&["measure", "cq", &fixture("missing.pat")], 2),
        (&["measure", "mso", &fixture("root_a.pat")], 2),
        (&["measure", "cq", &fixture("root_a.pat"), "--mode", "fast"], 2),
        (&["measure", "path", "--alphabet", "ab"], 2),
        (&["measure", "path", "--alphabet", "ab", "--subset", "z"], 2),
        (&["count", "cq", &fixture("root_a.pat"), "--height", "6", "--max-trees", "1000"], 3),
        (&["estimate", "cq", &fixture("root_a.pat"), "--depth", "13"], 3),
        (&["measure", "cq", &fixture("deep.pat"), "--max-trees", "16"], 3),
        (&["solve", "1,0,1"], 4),
        (&["estimate", "cq", &fixture("root_a.pat"), "--samples", "10"], 4),
        (&["estimate", "subtree", &fixture("three_nodes.tree"), "--depth", "0"], 4),
        (&["positive", "path", "--alphabet", "ab", "--subset", "a"], 4),
    ];
    for (args, expected) in cases {
        assert_eq!(code(args), *expected, "{args:?}");
    }
}
