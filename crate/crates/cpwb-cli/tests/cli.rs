use std::path::PathBuf;
use std::process::{Command, Output};

use tempfile::TempDir;

struct Run {
    dir: TempDir,
}

impl Run {
    fn new() -> Run {
        Run { dir: TempDir::new().unwrap() }
    }

    fn file(&self, name: &str, text: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    fn cpwb(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_cpwb")).args(args).output().unwrap()
    }
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn denote_close() {
    let r = Run::new();
    let p = r.file("p.cp", "x[]");
    let o = r.cpwb(&["denote", p.to_str().unwrap(), "--ctx", "x:1", "-K", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), r#"[{"x":"*"}]"#);
}

#[test]
fn translate_then_denote() {
    let r = Run::new();
    let p = r.file("p.cp", "x[]");
    let o = r.cpwb(&["translate", p.to_str().unwrap(), "--ctx", "x:1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let ctx = text.lines().nth(1).unwrap().trim_start_matches("# ").to_string();
    let lp = r.file("lp.cp", &text);
    let o = r.cpwb(&["denote", lp.to_str().unwrap(), "--ctx", &ctx, "-K", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let got: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let want: serde_json::Value = serde_json::from_str(r#"[{"x'":["pair","*","*"],"w":"*"}]"#).unwrap();
    assert_eq!(got, want);
    // keys come out sorted
    assert_eq!(stdout(&o).trim(), r#"[{"w":"*","x'":["pair","*","*"]}]"#);
}

#[test]
fn emit_typing_adds_derivation() {
    let r = Run::new();
    let p = r.file("p.cp", "x().0");
    let o = r.cpwb(&["translate", p.to_str().unwrap(), "--ctx", "x:bot", "--sys", "cp0", "--emit-typing"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().count() > 2);
}

#[test]
fn selects_are_not_equivalent() {
    let r = Run::new();
    let p = r.file("p.cp", "x<1.x[]");
    let q = r.file("q.cp", "x<2.x[]");
    let o = r.cpwb(&["equiv", p.to_str().unwrap(), q.to_str().unwrap(), "--ctx", "x:(1 + 1)", "-K", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains(r#"- {"x":["tag",1,"*"]}"#), "{}", out);
    assert!(out.contains(r#"+ {"x":["tag",2,"*"]}"#), "{}", out);
}

#[test]
fn cut_against_wait_is_equivalent_to_close() {
    let r = Run::new();
    let p = r.file("p.cp", "new x:1 (x[] | x().y[])");
    let q = r.file("q.cp", "y[]");
    let o = r.cpwb(&["equiv", p.to_str().unwrap(), q.to_str().unwrap(), "--ctx", "y:1"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn check_and_exit_codes() {
    let r = Run::new();
    let p = r.file("p.cp", "!x(y).y[]");
    let o = r.cpwb(&["check", p.to_str().unwrap(), "--ctx", "x:!1", "--sys", "cp"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!stdout(&o).is_empty());

    let o = r.cpwb(&["check", p.to_str().unwrap(), "--ctx", "x:?1"]);
    assert_eq!(o.status.code(), Some(4));

    let bad = r.file("bad.cp", "x[](");
    let o = r.cpwb(&["check", bad.to_str().unwrap(), "--ctx", "x:1"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1, column 4"));

    let o = r.cpwb(&["check", "/nonexistent/p.cp"]);
    assert_eq!(o.status.code(), Some(5));

    let o = r.cpwb(&["check"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn observe_configuration() {
    let r = Run::new();
    let c = r.file("c.cfg", "cut x:1 ({x[]} || {x().0})");
    let o = r.cpwb(&["observe", c.to_str().unwrap(), "-K", "2", "--depth", "100"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).trim(), r#"[{"x":"*"}]"#);

    let open = r.file("open.cfg", "cut x:1 ({x[]} || {x().y[]})");
    let o = r.cpwb(&["observe", open.to_str().unwrap(), "--ctx", "y:1"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn transform_prints_filled_context() {
    let r = Run::new();
    let p = r.file("p.cp", "x[]");
    let o = r.cpwb(&["transform", p.to_str().unwrap(), "--ctx", "x:1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().nth(1).unwrap().contains("z:1"), "{}", text);
    let ctx = text.lines().nth(1).unwrap().trim_start_matches("# ").to_string();
    let f = r.file("t.cp", &text);
    let o = r.cpwb(&["denote", f.to_str().unwrap(), "--ctx", &ctx]);
    assert_eq!(stdout(&o).trim(), r#"[{"x'":["pair","*","*"],"z":"*"}]"#);
}

#[test]
fn suite_from_config_and_seed() {
    let r = Run::new();
    let c = r.file("s.json", r#"{"suites": ["duality", "worked-example"], "duality_samples": 50}"#);
    let o = Command::new(env!("CARGO_BIN_EXE_cpwb"))
        .args(["suite", "--config", c.to_str().unwrap(), "--json"])
        .env("CPWB_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["duality"]["instances"].as_u64().unwrap() > 50);

    let bad = r.file("bad.json", r#"{"nonsense": 1}"#);
    let o = r.cpwb(&["suite", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn json_output_is_stable() {
    let r = Run::new();
    let p = r.file("p.cp", "!x(y).y[]");
    let a = r.cpwb(&["denote", p.to_str().unwrap(), "--ctx", "x:!1"]);
    let b = r.cpwb(&["denote", p.to_str().unwrap(), "--ctx", "x:!1"]);
    assert_eq!(a.stdout, b.stdout);
}
