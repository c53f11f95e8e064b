use std::fs;
use std::process::{Command, Output};

fn splitpde(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_splitpde")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn list_names_everything() {
    let o = splitpde(&["list"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for word in ["P1", "P5", "lie-mod", "strang-mod", "inf", "two", "midpoint", "substep:K"] {
        assert!(text.contains(word), "{word}");
    }
}

#[test]
fn run_writes_csv_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p1.csv");
    let o = splitpde(&[
        "run", "--problem", "P1", "--grid", "31", "--schemes", "lie,strang-mod", "--norms", "inf,two",
        "--steps", "1e-2:halve:3", "--format", "csv", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let text = fs::read_to_string(&out).unwrap();
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "scheme,step_size,error_inf,order_inf,error_two,order_two");
    assert_eq!(lines.len(), 7);
    assert!(lines[1].starts_with("lie,0.01,"));
    assert!(lines[1].ends_with(",--"));
    assert!(lines[6].starts_with("strang-mod,0.0025,"));
    let tables = splitpde::harness::parse_csv(&text).unwrap();
    let order = tables[1].orders(splitpde::Norm::Inf)[2].unwrap();
    assert!((order - 2.0).abs() < 0.1, "{order}");
}

#[test]
fn markdown_has_metadata_and_tables() {
    let o = splitpde(&["local-error", "--problem", "P1", "--grid", "31", "--steps", "6.25e-3:halve:2", "--schemes", "lie"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("- study: local error (one step)"));
    assert!(text.contains("- reference: same scheme, 100 substeps per step"));
    assert!(text.contains("| step size | Lie | order |"));
    assert!(text.contains("| 3.125e-03 |"));
}

#[test]
fn empty_scheme_list_prints_only_the_header() {
    let o = splitpde(&["run", "--problem", "P1", "--grid", "15", "--schemes", "", "--format", "csv"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "scheme,step_size,error_inf,order_inf\n");
}

#[test]
fn sub_integrator_options_are_accepted() {
    for extra in [
        &["--linear", "cn", "--cn-substeps", "4", "--reaction-substeps", "3"][..],
        &["--linear", "cn", "--cg"][..],
        &["--linear", "exp", "--exact-reaction"][..],
        &["--reversed", "--reference", "substep:8"][..],
        &["--reference", "modstrang:1e-3"][..],
    ] {
        let mut args = vec!["run", "--problem", "P1", "--grid", "15", "--steps", "2e-2,1e-2", "--format", "csv"];
        args.extend_from_slice(extra);
        let o = splitpde(&args);
        assert!(o.status.success(), "{extra:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn two_dimensional_defaults() {
    let o = splitpde(&["run", "--problem", "P4", "--grid", "7", "--schemes", "strang-mod", "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 5);
    assert!(text.contains("strang-mod,0.0125,"));
}

#[test]
fn config_file_problem() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mixed.txt");
    fs::write(
        &path,
        "name = mixed\ndim = 1\nn = 31\ninitial = affine(0.5, 0.5)\nboundary_left = const(0.5)\nboundary_right = harmonic_time(1, 1, 62.83185307179586)\nreference = same:1e-3\n",
    )
    .unwrap();
    let o = splitpde(&["run", "--config", path.to_str().unwrap(), "--schemes", "strang-mod", "--steps", "2e-2:halve:3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("- problem: mixed"));
    assert!(text.contains("- reference: same scheme, tau = 1e-3"));
}

#[test]
fn blow_up_gives_exit_code_two_and_a_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("blow.txt");
    // u' = u^2 from 50 explodes at t = 0.02
    fs::write(&path, "dim = 1\nn = 15\ninitial = const(50)\nreference = substep:4\n").unwrap();
    let o = splitpde(&["run", "--config", path.to_str().unwrap(), "--schemes", "lie", "--steps", "0.05,0.025", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout(&o), "scheme,step_size,error_inf,order_inf\nlie,0.05,--,--\nlie,0.025,--,--\n");
    assert!(!o.stderr.is_empty());
}

#[test]
fn bad_input_is_an_ordinary_failure() {
    for args in [
        &["run", "--problem", "P9"][..],
        &["run", "--problem", "P1", "--schemes", "euler"][..],
        &["run", "--problem", "P1", "--steps", "0.03"][..],
        &["run", "--problem", "P1", "--reference", "sometimes"][..],
        &["run", "--problem", "P1", "--config", "x.txt"][..],
        &["run", "--config", "/nonexistent/problem.txt"][..],
        &["run"][..],
        &["frobnicate"][..],
    ] {
        let o = splitpde(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}
