use std::process::{Command, Output};

fn clm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clm"))
        .args(args)
        .env_remove("CLM_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn table_window_three() {
    let out = clm(&["table", "--ell", "3", "--xi", "1", "--window", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    // header + 7 groups + total
    assert_eq!(lines.len(), 9);
    assert!(lines[1].starts_with("3^[],0,0,1,1,6.390045"));
    assert!(lines[8].starts_with("total,"));
}

#[test]
fn table_malle_row() {
    let out = clm(&["table", "--ell", "3", "--malle-u", "1", "--window", "0"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("3^[],0,0,1,1,8.520061"));
}

#[test]
fn oracle_fiber_census() {
    let out = clm(&["oracle", "--g", "1", "--ell", "3", "--rho", "1", "--fiber", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("3^[],15,24,"));
    assert!(text.contains("3^[1],8,24,"));
    assert!(text.contains("3^[1,1],1,24,"));
}

#[test]
fn sampled_runs_are_byte_identical() {
    let args = [
        "oracle", "--g", "1", "--ell", "3", "--rho", "2", "--xi", "1", "--samples",
        "500", "--seed", "11",
    ];
    let a = clm(&args);
    let b = clm(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn budget_exceeded_exits_3() {
    let out = clm(&["oracle", "--g", "2", "--ell", "3", "--rho", "3"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn env_budget_is_overridden_by_flag() {
    let tight = Command::new(env!("CARGO_BIN_EXE_clm"))
        .args(["oracle", "--g", "1", "--ell", "3", "--rho", "1", "--fiber", "1"])
        .env("CLM_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(tight.status.code(), Some(3));
    let widened = Command::new(env!("CARGO_BIN_EXE_clm"))
        .args([
            "oracle", "--g", "1", "--ell", "3", "--rho", "1", "--fiber", "1",
            "--budget", "1000000",
        ])
        .env("CLM_BUDGET", "10")
        .output()
        .unwrap();
    assert!(widened.status.success());
}

#[test]
fn unknown_mutation_exits_2() {
    let out = clm(&["verify", "--mutate", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn mutated_identity_exits_1_and_names_it() {
    let out = clm(&["verify", "--mutate", "kuperberg"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAIL kuperberg"));
}

#[test]
fn qseries_constants() {
    let out = clm(&["qseries", "--ell", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("one_plus_product_inverse,6.390045"));
    assert!(text.contains("malle_u1_constant,8.520061"));
}

#[test]
fn moments_csv_shape() {
    let out = clm(&[
        "moments", "--ell", "3", "--xi", "1", "--window", "5", "--max-log-order", "1",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("group,xi,window,value,radius,target,gap\n"));
    // trivial and 3^[1], windows 4 and 5 each
    assert_eq!(text.lines().count(), 1 + 4);
}
