use std::io::Write;
use std::process::{Command, Output};

fn cardqe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cardqe"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn decide_exit_codes() {
    let o = cardqe(&["decide", "--theory", "T2", "Fin(1)"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "False\n");

    let o = cardqe(&["decide", "--theory", "T3", "A x (Res[2,0](x) -> Fin(x))"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "True\n");

    let o = cardqe(&["decide", "C[1](0)"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn errors_exit_2_with_location() {
    let o = cardqe(&["decide", "C[1](0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("1:7"));

    let o = cardqe(&["decide", "--theory", "T1", "Fin(1)"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("L2"));

    let o = cardqe(&["decide", "C[1](x)"]);
    assert_eq!(o.status.code(), Some(2));

    let o = cardqe(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn qe_prints_the_quantifier_free_form() {
    let o = cardqe(&["qe", "E x (C[1](x . y) & C[1]((1+x) . y))"]);
    assert_eq!(stdout(&o), "C[2](y)\n");
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn eval_and_missing_variables() {
    let o = cardqe(&["eval", "Fin(x)", "--assign", "x = EP{transient=[]; T=0; p=2; R=[0]}"]);
    assert!(stdout(&o).starts_with("false\t"));

    let o = cardqe(&["eval", "Fin(x + y)", "--assign", "x = EP{transient=[1]; T=2; p=1; R=[]}"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains('y'));
}

#[test]
fn eval_reads_assignment_files() {
    let dir = std::env::temp_dir().join(format!("cardqe-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("sigma.txt");
    let mut f = std::fs::File::create(&path).unwrap();
    writeln!(f, "# two assignments").unwrap();
    writeln!(f, "x = EP{{transient=[0,1]; T=2; p=1; R=[]}}").unwrap();
    writeln!(f, "---").unwrap();
    writeln!(f, "x = EP{{transient=[]; T=0; p=1; R=[0]}}").unwrap();
    drop(f);
    let o = cardqe(&["eval", "Fin(x)", "--assign", path.to_str().unwrap()]);
    let lines: Vec<String> = stdout(&o).lines().map(|l| l.split('\t').next().unwrap().to_string()).collect();
    assert_eq!(lines, ["true", "false"]);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn witness_in_enumeration_order() {
    let o = cardqe(&["witness", "E x (C[2](x) & ~C[3](x) & Res[2,0](x))"]);
    assert_eq!(stdout(&o), "EP{transient=[0,1]; T=2; p=1; R=[]}\n");
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn json_is_reproducible() {
    let args = ["--format", "json", "decide", "--trace", "A x (~Fin(x) -> E y (y < x & ~Fin(y) & ~Fin(x - y)))"];
    let a = cardqe(&args);
    let b = cardqe(&args);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "decide");
    assert_eq!(v["theory"], "T3");
    assert_eq!(v["verdict"], true);
    assert_eq!(v["timing_ms"], 0);
    assert!(v["trace"].as_array().is_some_and(|t| t.len() == 3));
}

#[test]
fn axioms_and_defcheck() {
    let o = cardqe(&["axioms", "--theory", "T3", "--bound", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("all True\n"));

    let o = cardqe(&["defcheck", "--target", "Res[2,1](x)", "--allow", "Res4", "--size", "5"]);
    assert!(stdout(&o).starts_with("DefinableBy"));

    let o = cardqe(&["defcheck", "--target", "Fin(x)", "--level", "L1", "--size", "4"]);
    assert!(stdout(&o).starts_with("NotDefinable"));
}
