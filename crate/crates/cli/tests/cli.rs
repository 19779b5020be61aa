use isomon_cli::commands::run_argv;
use isomon_cli::fixtures;
use isomon_cli::problem::{ProblemFile, SystemSpec};
use isomon_cli::report::Report;

const HEIS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/heisenberg-obstruction.json");
const GAMMA: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/incomplete-gamma.json");
const REPLACE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/replace-bi.json");

fn run(args: &[&str]) -> (String, String, i32) {
    run_argv(std::iter::once("isomon").chain(args.iter().copied()).map(std::ffi::OsString::from))
}

fn json(args: &[&str]) -> (Report, i32) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let (out, err, code) = run(&all);
    let r = Report::from_json(&out).unwrap_or_else(|e| panic!("{e}: {out}{err}"));
    (r, code)
}

#[test]
fn heisenberg_check_fails_with_the_central_defect() {
    let (r, code) = json(&["check", HEIS]);
    assert_eq!(code, 1);
    assert!(!r.find_verdict("full").unwrap().holds);
    let d = &r.find_matrix("defect(t2,t1)").unwrap().rows;
    assert_eq!(d[0][2], "1/(t1*t2)");
    assert!(d.iter().flatten().filter(|e| *e != "0").count() == 1);
    let (r, code) = json(&["check", HEIS, "--mode", "pairwise"]);
    assert_eq!(code, 0);
    assert!(r.find_verdict("pairwise").unwrap().holds);
}

#[test]
fn json_output_is_deterministic() {
    let (a, _, _) = run(&["--json", "check", REPLACE]);
    let (b, _, _) = run(&["--json", "check", REPLACE]);
    assert_eq!(a, b);
    let r = Report::from_json(&a).unwrap();
    assert_eq!(r.to_json(), a.trim_end());
}

#[test]
fn telescoper_of_two_simple_poles() {
    let (r, code) = json(&["telescope", "--integrand", "1/((x-t)*(x-1))"]);
    assert_eq!(code, 0);
    let op = r.find_operator("telescoper").unwrap();
    assert_eq!(op.coefficients, ["1/(t-1)", "1"]);
    assert!(r.find_verdict("certificate").unwrap().holds);
    assert!(r.find_verdict("minimal").unwrap().holds);
}

#[test]
fn reduce_reports_certificate_and_residues() {
    let (out, _, code) = run(&["reduce", "--integrand", "1/(x-t)^2 + t/x"]);
    assert_eq!(code, 0);
    assert!(out.contains("[holds] identity"));
    assert!(out.contains("certificate = -1/(x-t)"));
    assert!(out.contains("residue at x = 0 = t"));
}

#[test]
fn legendre_example_matches_its_expectations() {
    let (r, code) = json(&["examples", "run", "legendre"]);
    assert_eq!(code, 0);
    assert!(r.find_verdict("expectations").unwrap().holds);
    assert!(r.find_operator("picard-fuchs (scaled)").is_some());
}

#[test]
fn every_example_runs_clean() {
    let (r, code) = json(&["examples", "run", "all"]);
    assert_eq!(code, 0);
    assert_eq!(r.sections.len(), 6);
    for s in &r.sections {
        assert!(s.find_verdict("expectations").unwrap().holds, "{:?}", s.title);
    }
}

#[test]
fn examples_list_and_show() {
    let (out, _, code) = run(&["examples", "list"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().collect::<Vec<_>>(), fixtures::names().collect::<Vec<_>>());
    let (out, _, code) = run(&["examples", "show", "replace-bi"]);
    assert_eq!(code, 0);
    assert!(ProblemFile::from_json(&out).is_ok());
}

#[test]
fn flatten_obstruction_and_unconstrained_success() {
    let (r, code) = json(&["flatten", HEIS]);
    assert_eq!(code, 1);
    assert_eq!(r.find_value("witness.pole"), Some("0"));
    assert_eq!(r.find_value("witness.residue"), Some("1/t2"));
    let (r, code) = json(&["flatten", HEIS, "--no-commutant"]);
    assert_eq!(code, 0);
    assert!(r.find_verdict("flatten").unwrap().holds);
}

#[test]
fn galois_verdicts() {
    let (r, code) = json(&["galois", "--file", GAMMA]);
    assert_eq!(code, 1);
    assert!(!r.find_verdict("constant group").unwrap().holds);
    assert_eq!(r.find_value("rational solutions"), Some("0"));
    let (r, code) = json(&["galois", "--integrand", "1/(x-t)"]);
    assert_eq!(code, 0);
    assert!(r.find_verdict("constant group").unwrap().holds);
}

#[test]
fn gauge_by_a_matrix_file() {
    let path = std::env::temp_dir().join(format!("isomon-gauge-{}.json", std::process::id()));
    std::fs::write(&path, r#"[["1","0"],["0","x"]]"#).unwrap();
    let (r, code) = json(&["gauge", REPLACE, "--matrix", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(code, 0);
    assert!(r.find_verdict("integrability preserved").unwrap().holds);
    assert_eq!(r.find_matrix("t1").unwrap().rows[0][1], "1/(t2+1)");
}

#[test]
fn exit_codes_for_bad_or_unsupported_input() {
    let (_, err, code) = run(&["telescope", "--integrand", "x+"]);
    assert_eq!(code, 4);
    assert!(err.contains("offset 2"));
    assert_eq!(run(&["picard-fuchs", "--curve", "(x-t)^2*x"]).2, 2);
    assert_eq!(run(&["telescope", "--integrand", "1/(x^2+t)"]).2, 2);
    assert_eq!(run(&["telescope", "--integrand", "1/((x-t)*(x-1))", "--max-order", "0"]).2, 3);
    assert_eq!(run(&["check", "/nonexistent/problem.json"]).2, 4);
    assert_eq!(run(&["examples", "show", "nope"]).2, 4);
    assert_eq!(run(&["no-such-command"]).2, 4);
    assert_eq!(run(&["--help"]).2, 0);
    let path = std::env::temp_dir().join(format!("isomon-bad-{}.json", std::process::id()));
    std::fs::write(&path, "{").unwrap();
    let code = run(&["check", path.to_str().unwrap()]).2;
    std::fs::remove_file(&path).ok();
    assert_eq!(code, 4);
}

#[test]
fn stored_systems_reload_identically() {
    for name in fixtures::names() {
        let p = fixtures::load(name).unwrap();
        let Some(spec) = &p.system else { continue };
        let tw = p.field.build().unwrap();
        let s = spec.load(&tw).unwrap();
        let back = SystemSpec::store(&s, spec.dual);
        assert_eq!(back.load(&tw).unwrap(), s, "{name}");
        let again = ProblemFile::from_json(&p.to_json()).unwrap();
        assert_eq!(again, p, "{name}");
    }
}
