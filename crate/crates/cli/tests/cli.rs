use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use gns_cli::parse_record;

const X_PLUS_2: &str = "[order]\nmin_poly = [-1, 1]\n[polynomial]\ncoeffs = [[2], [1]]\n[domain]\nfamily = \"box\"\noffsets = [0]\n";

fn gns(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gns")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn quadratic_scan(command: &str) -> String {
    format!(
        "[order]\nmin_poly = [-1, 1]\n[domain]\nfamily = \"box\"\n[scan]\ncommand = \"{command}\"\nranges = [[[2, 8]], [[-10, 10]]]\n"
    )
}

#[test]
fn decide_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "a.toml", X_PLUS_2);
    let o = gns(&["decide", &cfg]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("verdict: FinitenessHolds"), "{s}");
    assert!(s.contains("C: 3\n"));
    assert!(s.contains("states_checked: 7\n"));

    let cfg = write(dir.path(), "b.toml", &X_PLUS_2.replace("[[2], [1]]", "[[2], [-2], [1]]"));
    let o = gns(&["decide", &cfg, "--format", "records"]);
    assert_eq!(o.status.code(), Some(0));
    let rec = parse_record(stdout(&o).trim_end()).unwrap();
    assert_eq!(rec.get("verdict"), Some("fails:cycle"));
    assert!(rec.get("certificate").unwrap().starts_with("h="));
}

#[test]
fn expand_and_digits() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "a.toml", X_PLUS_2);
    assert_eq!(stdout(&gns(&["expand", &cfg, "--value", "9"])), "1 0 0 1 1\n");
    assert_eq!(stdout(&gns(&["expand", &cfg, "--value", "-3"])), "1 0 1 1\n");
    let o = gns(&["expand", &cfg, "--value", "123456789", "--step-cap", "3"]);
    assert_eq!(o.status.code(), Some(2));
    let o = gns(&["digits", &cfg]);
    assert_eq!(stdout(&o), "modulus 2 (norm 2), 2 digits\n0\n1\n");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.toml", &X_PLUS_2.replace("offsets = [0]", "offsets = [\"1/0\"]"));
    let o = gns(&["decide", &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 7"));
    let unknown = write(dir.path(), "u.toml", &format!("{X_PLUS_2}[extra]\nx = 1\n"));
    assert_eq!(gns(&["decide", &unknown]).status.code(), Some(1));
    assert_eq!(gns(&["decide", "/nonexistent.toml"]).status.code(), Some(1));
    assert_eq!(gns(&["frobnicate"]).status.code(), Some(1));
    let tiny = write(dir.path(), "t.toml", &format!("{X_PLUS_2}[engine]\nmax_states = 1\n"));
    assert_eq!(gns(&["decide", &tiny]).status.code(), Some(2));
    let cfg = write(dir.path(), "a.toml", X_PLUS_2);
    assert_eq!(gns(&["expand", &cfg, "--value", "1,2"]).status.code(), Some(1));
}

#[test]
fn records_reparse() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "a.toml", &X_PLUS_2.replace("[[2], [1]]", "[[5], [3], [1]]"));
    for cmd in [
        vec!["decide"],
        vec!["digits"],
        vec!["dominant"],
        vec!["shift-search", "--max-m", "5"],
        vec!["witness-family", "--min-m", "0", "--max-m", "4"],
        vec!["hypotheses", "--samples", "100"],
        vec!["expand", "--value", "5;3"],
    ] {
        let mut args = vec![cmd[0], cfg.as_str(), "--format", "records"];
        args.extend(&cmd[1..]);
        let o = gns(&args);
        assert_eq!(o.status.code(), Some(0), "{cmd:?}");
        let s = stdout(&o);
        assert!(!s.is_empty());
        for line in s.lines() {
            let r = parse_record(line).unwrap();
            assert_eq!(r.to_string(), line);
        }
    }
}

#[test]
fn gaussian_square() {
    let dir = tempfile::tempdir().unwrap();
    let text = "[order]\nmin_poly = [1, 0, 1]\n[polynomial]\ncoeffs = [[2, 0], [1, 0], [1, 0]]\n[domain]\nfamily = \"box\"\noffsets = [0, 0]\n";
    let cfg = write(dir.path(), "g.toml", text);
    let o = gns(&["digits", &cfg]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("modulus 2,0 (norm 4), 4 digits\n"));
    let o = gns(&["decide", &cfg, "--format", "records"]);
    assert_eq!(o.status.code(), Some(0));
    let sail = write(dir.path(), "s.toml", &text.replace("family = \"box\"\noffsets = [0, 0]", "family = \"sail\""));
    let o = gns(&["hypotheses", &sail]);
    assert!(stdout(&o).contains("zero_in_int: false"));
}

fn accepted(out: &str) -> BTreeSet<(i64, i64)> {
    out.lines()
        .map(|l| parse_record(l).unwrap())
        .filter(|r| r.get("verdict") == Some("holds") || r.get("passes") == Some("true"))
        .map(|r| {
            let c: Vec<i64> = r.get("p").unwrap().split(';').map(|x| x.parse().unwrap()).collect();
            (c[1], c[0])
        })
        .collect()
}

#[test]
fn quadratic_scan_classification() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "scan.toml", &quadratic_scan("decide"));
    let o = gns(&["scan", &cfg, "--format", "records"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 7 * 21);
    let expected: BTreeSet<(i64, i64)> = (2..=8).flat_map(|c| (-1..=c).map(move |b| (b, c))).collect();
    let decided = accepted(&out);
    assert_eq!(decided, expected);

    let cfg = write(dir.path(), "dom.toml", &quadratic_scan("dominant"));
    let dom = accepted(&stdout(&gns(&["scan", &cfg, "--format", "records"])));
    assert!(dom.is_subset(&decided));
    assert!(!dom.is_empty());
}

#[test]
fn scan_parallel_and_resume() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "scan.toml", &quadratic_scan("decide"));
    let serial = stdout(&gns(&["scan", &cfg, "--format", "records"]));
    let parallel = stdout(&gns(&["scan", &cfg, "--format", "records", "--workers", "4"]));
    assert_eq!(serial, parallel);
    let human = stdout(&gns(&["scan", &cfg, "--workers", "3"]));
    assert_eq!(human, stdout(&gns(&["scan", &cfg])));

    let ck = dir.path().join("ck");
    fs::write(&ck, "9\n").unwrap();
    let rest = stdout(&gns(&["scan", &cfg, "--format", "records", "--checkpoint", ck.to_str().unwrap()]));
    let tail: Vec<&str> = serial.lines().skip(10).collect();
    assert_eq!(rest.lines().collect::<Vec<_>>(), tail);
    assert_eq!(fs::read_to_string(&ck).unwrap(), format!("{}\n", 7 * 21 - 1));
    // nothing left to do
    assert_eq!(stdout(&gns(&["scan", &cfg, "--checkpoint", ck.to_str().unwrap()])), "");

    let out = dir.path().join("rows.txt");
    let with_out = format!("{}output = {:?}\n", quadratic_scan("decide"), out.to_str().unwrap());
    let cfg2 = write(dir.path(), "scan2.toml", &with_out);
    let ck2 = dir.path().join("ck2");
    assert_eq!(gns(&["scan", &cfg2, "--format", "records", "--checkpoint", ck2.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(fs::read_to_string(&out).unwrap(), serial);
}

#[test]
fn empty_scan() {
    let dir = tempfile::tempdir().unwrap();
    let text = quadratic_scan("decide").replace("[[2, 8]]", "[[5, 4]]");
    let cfg = write(dir.path(), "e.toml", &text);
    let o = gns(&["scan", &cfg]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "");
}
