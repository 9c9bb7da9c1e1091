use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use segeval::io::write_labels_text;
use segeval::{Label, LabelMap};
use serde_json::Value;

struct Scratch(PathBuf);

impl Scratch {
    fn new(name: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("segeval-cli-{}-{name}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn map(&self, name: &str, map: &LabelMap) -> String {
        self.write(name, &write_labels_text(map))
    }

    fn write(&self, name: &str, bytes: &[u8]) -> String {
        let path = self.0.join(name);
        std::fs::write(&path, bytes).unwrap();
        path.display().to_string()
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.join(name)
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn segeval(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_segeval")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn blocks(w: usize, h: usize, cell: usize) -> LabelMap {
    LabelMap::from_fn(w, h, |r, c| ((r / cell) * 7 + c / cell) as Label).unwrap()
}

#[test]
fn eval_of_identical_maps_is_perfect() {
    let s = Scratch::new("identity");
    let m = s.map("m.txt", &blocks(30, 20, 6));
    let out = segeval(&["eval", "--test", &m, "--gt", &m]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("\"epr\": 1.000000"), "{text}");
    assert!(text.contains("\"pr\": 1.000000"), "{text}");
    assert!(text.contains("\"rpm\": 0.000000"), "{text}");
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["k"], 1);
    assert_eq!(v["pr_num"].as_u64(), v["t"].as_u64());
}

#[test]
fn eval_json_numerators_match_the_rendered_indices() {
    let s = Scratch::new("json");
    let test = s.map("t.txt", &blocks(40, 30, 7));
    let a = s.map("a.txt", &blocks(40, 30, 5));
    let b = s.map("b.txt", &blocks(40, 30, 9));
    let out = segeval(&["eval", "--test", &test, "--gt", &a, "--gt", &b]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let (t, k) = (v["t"].as_i64().unwrap(), v["k"].as_i64().unwrap());
    let (pr_num, epr_num) = (v["pr_num"].as_i64().unwrap(), v["epr_num"].as_i64().unwrap());
    assert_eq!(epr_num, 2 * pr_num - t * k);
    let pr = v["pr"].as_f64().unwrap();
    assert!((pr - pr_num as f64 / (t * k) as f64).abs() <= 5e-7);
    for key in ["alpha", "beta", "w_h", "w_v", "d_h", "d_v"] {
        assert!(!v[key].is_null(), "{key}");
    }
}

#[test]
fn eval_csv_and_out_file() {
    let s = Scratch::new("csv");
    let m = s.map("m.txt", &blocks(12, 12, 4));
    let dest = s.path("report.csv");
    let out = segeval(&["eval", "--test", &m, "--gt", &m, "--csv", "--out", dest.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(dest).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("pr,epr,rpp,rmm,rpm,t,k,alpha,beta"));
    assert!(lines[1].starts_with("1.000000,1.000000,"));
}

#[test]
fn mismatched_dimensions_are_data_errors() {
    let s = Scratch::new("mismatch");
    let test = s.map("t.txt", &blocks(10, 8, 3));
    let gt = s.map("g.txt", &blocks(8, 10, 3));
    let out = segeval(&["eval", "--test", &test, "--gt", &gt]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("g.txt"));

    let broken = s.write("bad.txt", b"SEGLABELS 2 2\n0 1\n0\n");
    let out = segeval(&["eval", "--test", &broken, "--gt", &gt]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn bad_parameters_are_usage_errors() {
    let s = Scratch::new("params");
    let m = s.map("m.txt", &blocks(10, 10, 3));
    for args in [
        vec!["eval", "--test", &m, "--gt", &m, "--alpha", "0.1", "--beta", "0.2"],
        vec!["eval", "--test", &m, "--gt", &m, "--alpha", "0.5", "--beta", "0.5"],
        vec!["eval", "--test", &m],
        vec!["sweep-beta", "--test", &m, "--gt", &m, "--alpha", "0.2", "--betas", "0.1,0.3"],
        vec!["eval", "--test", &m, "--gt", &m, "--hm", "4"],
        vec!["stats"],
    ] {
        assert_eq!(segeval(&args).status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn pairs_dump_smallest_case() {
    let s = Scratch::new("pairs1");
    let m = s.map("m.txt", &LabelMap::new(2, 1, vec![0, 1]).unwrap());
    let out = segeval(&["pairs", "--test", &m, "--hm", "4", "--vm", "1", "--alpha", "0.5", "--beta", "0.25"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout(&out), "0 0 0 1\n");
}

#[test]
fn pairs_line_count_equals_eval_t() {
    let s = Scratch::new("pairs2");
    let test = s.map("t.txt", &blocks(50, 35, 8));
    let gt = s.map("g.txt", &blocks(50, 35, 11));
    let pairs = segeval(&["pairs", "--test", &test, "--gt", &gt]);
    let eval = segeval(&["eval", "--test", &test, "--gt", &gt]);
    assert_eq!(pairs.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&eval.stdout).unwrap();
    assert_eq!(stdout(&pairs).lines().count() as u64, v["t"].as_u64().unwrap());
}

#[test]
fn sweeps_emit_one_row_per_value() {
    let s = Scratch::new("sweeps");
    let test = s.map("t.txt", &blocks(60, 40, 9));
    let gt = s.map("g.txt", &blocks(60, 40, 12));

    let out = segeval(&["sweep-alpha", "--test", &test, "--gt", &gt]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let rows: Vec<_> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "alpha,pr,epr,rpp,rmm,rpm,t");
    assert_eq!(rows.len(), 11);
    assert!(text.lines().any(|l| l.starts_with("# alpha_m=")));

    let out = segeval(&["sweep-beta", "--test", &test, "--gt", &gt, "--betas", "0.025,0.05,0.1,0.2", "--hm", "120", "--vm", "80"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "beta,t,pr,epr,rpp,rmm,rpm");
    let t: Vec<u64> = lines[1..].iter().map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(t.len(), 4);
    assert!(t.windows(2).all(|w| w[0] > w[1]), "{t:?}");
}

#[test]
fn stats_reports_members_and_pooled_means() {
    let s = Scratch::new("stats");
    let a = s.map("a.txt", &LabelMap::from_fn(8, 2, |_, c| Label::from(c >= 4)).unwrap());
    let b = s.map("b.txt", &LabelMap::uniform(8, 2, 3).unwrap());
    let out = segeval(&["stats", "--gt", &a, "--gt", &b]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["k"], 2);
    assert_eq!(v["region_total"], 3);
    assert_eq!(v["members"][0]["regions"], 2);
    assert!((v["h_m"].as_f64().unwrap() - 16.0 / 3.0).abs() < 1e-12);
    assert_eq!(v["v_m"].as_f64(), Some(2.0));

    let out = segeval(&["stats", "--gt", &a, "--gt", &b, "--csv"]);
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("source,regions,h_m,v_m"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn reads_seg_and_pgm_inputs() {
    let s = Scratch::new("formats");
    let seg = s.write(
        "g.seg",
        b"format ascii cr\nwidth 4\nheight 2\nsegments 2\ndata\n0 0 0 1\n1 0 2 3\n0 1 0 1\n1 1 2 3\n",
    );
    let mut pgm = b"P5\n4 2\n255\n".to_vec();
    pgm.extend_from_slice(&[5, 5, 9, 9, 5, 5, 9, 9]);
    let pgm = s.write("t.pgm", &pgm);
    let out = segeval(&["oracle-eval", "--test", &pgm, "--gt", &seg]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["t"], 28);
    assert_eq!(v["epr_num"], 28);
    assert!(v["alpha"].is_null());
}

#[test]
fn missing_file_is_a_data_error() {
    let s = Scratch::new("missing");
    let m = s.map("m.txt", &blocks(4, 4, 2));
    let gone = s.path("nope.txt");
    let out = segeval(&["eval", "--test", &m, "--gt", gone.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!Path::new(&gone).exists());
}
