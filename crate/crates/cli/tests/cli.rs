use std::fs;
use std::process::{Command, Output};

fn primpair(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_primpair"))
        .args(args)
        .env_remove("PRIMPAIR_CHECKPOINT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn check_bound_verdicts_and_exit_codes() {
    let o = primpair(&["check-bound", "--q", "331", "--n", "2"]);
    assert_eq!(code(&o), 1);
    let s = stdout(&o);
    assert!(s.contains("W test  sqrt(q) > n*W^2: fail"));
    assert!(s.contains("sieve verdict: fail"));
    assert!(s.contains("delta = 23/55"));
    assert!(s.ends_with("verdict: candidate\n"));

    let o = primpair(&["check-bound", "--q", "65537", "--n", "2"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).ends_with("verdict: pass\n"));

    let o = primpair(&["check-bound", "--q", "12", "--n", "2"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("not a prime power"));

    assert_eq!(code(&primpair(&["check-bound"])), 2);
}

#[test]
fn json_reports_parse_and_carry_the_hash() {
    let o = primpair(&["--no-header", "--format", "json", "check-bound", "--q", "331"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "candidate");
    assert_eq!(v["sieve"]["core"], serde_json::json!([2, 3]));
    assert_eq!(v["config_hash"].as_str().unwrap().len(), 16);

    let with_header = stdout(&primpair(&["--format", "json", "check-bound", "--q", "331"]));
    let (first, rest) = with_header.split_once('\n').unwrap();
    assert!(first.starts_with("# primpair ") && first.contains(v["config_hash"].as_str().unwrap()));
    assert_eq!(rest.as_bytes(), &o.stdout[..]);
}

#[test]
fn pair_reports_witness_and_exceptionality() {
    let o = primpair(&["pair", "--q", "13", "--num", "1,1", "--den", "2,1"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("f = (x + 1)/(x + 2)"));
    assert!(s.contains("exceptionality=false"));
    assert!(s.contains("witness: alpha = "));

    // x^2 + i over F_9 misses every primitive pair
    let o = primpair(&["pair", "--q", "9", "--num", "[0,1],0,1"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("ABSENT"));

    let o = primpair(&["pair", "--q", "7", "--num", "0,0,3"]);
    assert!(stdout(&o).contains("exceptionality=true"));

    let o = primpair(&["pair", "--q", "13", "--num", "1,x"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("column 3"));
}

#[test]
fn qmember_and_classify() {
    assert_eq!(code(&primpair(&["qmember", "--q", "331", "--family", "1,1"])), 1);
    assert_eq!(code(&primpair(&["qmember", "--q", "337", "--family", "1,1"])), 0);
    assert_eq!(code(&primpair(&["qmember", "--q", "23", "--family", "2,0", "--irreducible"])), 0);
    assert_eq!(code(&primpair(&["qmember", "--q", "23", "--family", "1,1", "--irreducible"])), 2);

    let dir = tempfile::tempdir().unwrap();
    let wit = dir.path().join("w.jsonl");
    let o = primpair(&[
        "--no-header",
        "--format",
        "json",
        "classify",
        "--family",
        "2,0",
        "--qmax",
        "60",
        "--irreducible",
        "--witnesses",
        wit.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["exceptions"], serde_json::json!([3, 4, 5, 7, 11, 13, 19, 25, 31, 37, 41, 43]));
    let lines = fs::read_to_string(&wit).unwrap();
    assert_eq!(lines.lines().count(), 12);
    assert!(lines.lines().all(|l| l.ends_with(r#""witness":null}"#)));

    let o = primpair(&["classify", "--family", "1,1", "--qmax", "60", "--budget", "1000"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget"));
}

#[test]
fn scan_is_deterministic_and_resumable() {
    let one = primpair(&["--no-header", "--workers", "1", "scan", "--hi", "200000"]);
    let many = primpair(&["--no-header", "--workers", "4", "scan", "--hi", "200000"]);
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, many.stdout);
    let s = stdout(&one);
    assert!(s.starts_with("q,p,k,omega,q_minus_1_factors,verdict,best_core\n3,3,1,"));
    assert!(s.contains("\n331,331,1,4,2^1;3^1;5^1;11^1,candidate,2;3\n"));

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.csv");
    let cp = dir.path().join("c.ckpt");
    let args = ["scan", "--hi", "200000", "--checkpoint-every", "1000", "--out", out.to_str().unwrap(), "--checkpoint", cp.to_str().unwrap()];
    assert_eq!(code(&primpair(&args)), 0);
    assert_eq!(fs::read(&out).unwrap(), one.stdout);
    let ck: serde_json::Value = serde_json::from_slice(&fs::read(&cp).unwrap()).unwrap();
    assert_eq!(ck["range"], serde_json::json!([3, 200000]));

    // rewind the checkpoint to an early point and append junk to the CSV
    let rows = one.stdout.iter().filter(|&&b| b == b'\n').count() - 1;
    let early = serde_json::json!({
        "range": [3, 200000], "next_q": 1000, "records_emitted": s.lines().skip(1).take_while(|l| l.split(',').next().unwrap().parse::<u64>().unwrap() < 1000).count(),
        "config_hash": ck["config_hash"],
    });
    fs::write(&cp, early.to_string()).unwrap();
    let mut csv = fs::read(&out).unwrap();
    csv.extend_from_slice(b"999999,junk\n");
    fs::write(&out, csv).unwrap();
    assert_eq!(code(&primpair(&args)), 0);
    let resumed = fs::read(&out).unwrap();
    assert_eq!(resumed, one.stdout);
    assert_eq!(resumed.iter().filter(|&&b| b == b'\n').count() - 1, rows);

    let paper = primpair(&["--no-header", "scan", "--hi", "200000", "--paper-faithful"]);
    assert!(paper.stdout.len() >= one.stdout.len());
}

#[test]
fn tables_and_audit() {
    let o = primpair(&["tables"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert_eq!(s.matches("  ok\n").count(), 13);
    assert!(s.contains("4*Delta*W^2=684623.993 < 684624"));

    let a = primpair(&["--no-header", "weil-audit", "--seed", "3", "--cases", "150"]);
    let b = primpair(&["--no-header", "weil-audit", "--seed", "3", "--cases", "150"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).ends_with("all checks passed\n"));
}
