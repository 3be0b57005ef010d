use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use armad_core::fixtures::TABLE1_CSV;
use serde_json::Value;
use tempfile::TempDir;

fn armad(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_armad"))
        .args(args)
        .output()
        .expect("spawn armad")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        let f = Self {
            dir: tempfile::tempdir().unwrap(),
        };
        f.write("t1.csv", TABLE1_CSV);
        f.write("gt.txt", "o1\n");
        f
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn p(&self, name: &str) -> String {
        self.path(name).to_string_lossy().into_owned()
    }

    fn write(&self, name: &str, text: &str) {
        fs::write(self.path(name), text).unwrap();
    }

    fn read(&self, name: &str) -> String {
        fs::read_to_string(self.path(name)).unwrap()
    }

    fn json(&self, name: &str) -> Value {
        serde_json::from_str(&self.read(name)).unwrap()
    }
}

fn run_vr(f: &Fixture, extra: &[&str]) -> Output {
    let ctx = format!("PE={}", f.p("t1.csv"));
    let mut args = vec![
        "run",
        "--context",
        &ctx,
        "--detector",
        "vr-arm",
        "--max-supp-abs",
        "2",
        "--min-conf",
        "100",
        "--max-len",
        "2",
    ];
    args.extend_from_slice(extra);
    armad(&args)
}

#[test]
fn run_writes_report_and_manifest() {
    let f = Fixture::new();
    let (gt, report, ranking) = (f.p("gt.txt"), f.p("report.json"), f.p("rank.csv"));
    let out = run_vr(
        &f,
        &["--labels", &gt, "--report", &report, "--ranking", &ranking],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let r = f.json("report.json");
    assert_eq!(r["ndcg"].as_f64(), Some(1.0));
    assert_eq!(r["detector"], "vr-arm");
    assert_eq!(r["attack_positions"], serde_json::json!([1]));

    let rank = f.read("rank.csv");
    let lines: Vec<&str> = rank.lines().collect();
    assert_eq!(lines[0], "rank,tid,score,n_matched_rules");
    assert!(lines[1].starts_with("1,o1,"), "{rank}");
    assert_eq!(lines.len(), 7);

    let manifest: Value = serde_json::from_str(&stderr(&out)).unwrap();
    assert_eq!(manifest["context"]["objects"], 6);
    assert_eq!(manifest["context"]["items"], 5);
    assert_eq!(manifest["rules"], 2);
    assert_eq!(manifest["config"]["detector"], "vr-arm");
    assert!(manifest["wall_clock_secs"].as_f64().unwrap() >= 0.0);
}

#[test]
fn joined_contexts_prefix_items() {
    let f = Fixture::new();
    f.write("pn.csv", "tid,item\no1,x\no2,x\no3,y\n");
    let (pe, pn, rules) = (
        format!("PE={}", f.p("t1.csv")),
        format!("PN={}", f.p("pn.csv")),
        f.p("rules.csv"),
    );
    let out = armad(&[
        "run",
        "--context",
        &pe,
        "--context",
        &pn,
        "--join",
        "--detector",
        "vr-arm",
        "--max-supp-abs",
        "2",
        "--min-conf",
        "100",
        "--rules",
        &rules,
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = f.read("rules.csv");
    let body: Vec<&str> = csv.lines().skip(1).collect();
    assert!(!body.is_empty());
    let mut prefixes = std::collections::BTreeSet::new();
    for line in &body {
        let fields: Vec<&str> = line.split(',').collect();
        for item in fields[1].split(';').chain(fields[2].split(';')) {
            let (tag, _) = item
                .split_once(':')
                .unwrap_or_else(|| panic!("unprefixed {item}"));
            prefixes.insert(tag.to_owned());
        }
    }
    assert_eq!(prefixes.into_iter().collect::<Vec<_>>(), ["PE", "PN"]);

    let out = armad(&[
        "run",
        "--context",
        &pe,
        "--context",
        &pn,
        "--detector",
        "avf",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn report_without_labels_is_an_error() {
    let f = Fixture::new();
    let (report, ranking) = (f.p("report.json"), f.p("rank.csv"));
    let out = run_vr(&f, &["--report", &report, "--ranking", &ranking]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("--labels"), "{}", stderr(&out));
    assert!(!f.path("report.json").exists());
    assert!(!f.path("rank.csv").exists());
}

#[test]
fn exit_codes() {
    let f = Fixture::new();
    let out = armad(&["run", "--context", &f.p("missing.csv"), "--detector", "avf"]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));

    f.write("bad.csv", "tid,item\no1,a\no2\n");
    let out = armad(&["run", "--context", &f.p("bad.csv"), "--detector", "avf"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));

    f.write("strangers.txt", "nobody\n");
    let (labels, report) = (f.p("strangers.txt"), f.p("r.json"));
    let out = run_vr(&f, &["--labels", &labels, "--report", &report]);
    assert_eq!(code(&out), 4, "{}", stderr(&out));

    let out = armad(&[
        "run",
        "--context",
        &f.p("t1.csv"),
        "--detector",
        "vr-arm",
        "--min-conf",
        "100",
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("max_supp"));

    let out = armad(&["run", "--detector", "bogus"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn failed_run_removes_partial_outputs() {
    let f = Fixture::new();
    let (gt, ranking) = (f.p("gt.txt"), f.p("rank.csv"));
    let band = f.p("no/such/dir/band.svg");
    let out = run_vr(
        &f,
        &["--labels", &gt, "--ranking", &ranking, "--band", &band],
    );
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    assert!(!f.path("rank.csv").exists());
    let leftovers: Vec<_> = fs::read_dir(f.dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    assert_eq!(leftovers.len(), 2, "{leftovers:?}");
}

#[test]
fn config_file_matches_flags() {
    let f = Fixture::new();
    let (gt, a, b, band) = (f.p("gt.txt"), f.p("a.csv"), f.p("b.csv"), f.p("band.svg"));
    let manifest = f.p("manifest.json");
    let out = run_vr(
        &f,
        &[
            "--labels",
            &gt,
            "--ranking",
            &a,
            "--band",
            &band,
            "--manifest",
            &manifest,
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(out.stderr.is_empty());

    let mut cfg = f.json("manifest.json")["config"].clone();
    cfg["outputs"] = serde_json::json!({ "ranking_csv": b });
    f.write("cfg.json", &cfg.to_string());
    let out = armad(&["run", "--config", &f.p("cfg.json")]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(f.read("a.csv"), f.read("b.csv"));
    assert!(f.read("band.svg").contains("viewBox=\"0 0 800 40\""));

    f.write("broken.json", "{\"contexts\": [");
    let out = armad(&["run", "--config", &f.p("broken.json")]);
    assert_eq!(code(&out), 2);
}

#[test]
fn explanations_go_to_stdout() {
    let f = Fixture::new();
    let out = run_vr(&f, &["--explain-top-k", "1"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("o1 score="), "{text}");
    assert!(text.contains("{e} → {b}"), "{text}");
    assert!(text.contains("[satisfies]"));
}

#[test]
fn baselines_run() {
    let f = Fixture::new();
    let (ranking, ctx) = (f.p("rank.csv"), f.p("t1.csv"));
    for args in [
        vec!["--detector", "fpof", "--min-supp-abs", "3"],
        vec!["--detector", "avf"],
        vec![
            "--detector",
            "od",
            "--min-supp-abs",
            "3",
            "--min-conf",
            "60",
        ],
    ] {
        let mut all = vec!["run", "--context", &ctx, "--ranking", &ranking];
        all.extend(args);
        let out = armad(&all);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        let csv = f.read("rank.csv");
        assert!(
            csv.starts_with("rank,tid,score,n_matched_rules,detector\n"),
            "{csv}"
        );
        assert_eq!(csv.lines().count(), 7);
    }
}

fn sweep(f: &Fixture, grid: &str, out_dir: &str) -> Output {
    armad(&[
        "sweep",
        "--context",
        &f.p("t1.csv"),
        "--detector",
        "vr-arm",
        "--max-len",
        "3",
        "--labels",
        &f.p("gt.txt"),
        "--grid",
        grid,
        "--out-dir",
        out_dir,
    ])
}

#[test]
fn sweep_names_one_winner() {
    let f = Fixture::new();
    let dir = f.p("sweep");
    let out = sweep(&f, "20x100,40x100,80x50", &dir);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let summary = f.json("sweep/summary.json");
    let cells = summary["cells"].as_array().unwrap();
    assert_eq!(cells.len(), 3);
    let best = summary["best_ndcg"]["report"]["ndcg"].as_f64().unwrap();
    for c in cells {
        let file = Path::new(&dir).join(c["file"].as_str().unwrap());
        let report: Value = serde_json::from_str(&fs::read_to_string(file).unwrap()).unwrap();
        assert_eq!(report, c["report"]);
        assert!(best >= report["ndcg"].as_f64().unwrap());
    }
    assert!(summary["best_auc"]["cell"].is_object());
}

#[test]
fn single_cell_sweep_summary_is_that_cell() {
    let f = Fixture::new();
    let out = sweep(&f, "40x100", &f.p("one"));
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let summary = f.json("one/summary.json");
    assert_eq!(summary["best_ndcg"]["report"], f.json("one/cell-000.json"));
    assert_eq!(summary["best_ndcg"], summary["best_auc"]);
}

#[test]
fn empty_grid_is_a_config_error() {
    let f = Fixture::new();
    let out = armad(&[
        "sweep",
        "--context",
        &f.p("t1.csv"),
        "--detector",
        "vr-arm",
        "--labels",
        &f.p("gt.txt"),
        "--out-dir",
        &f.p("none"),
    ]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
    assert!(stderr(&out).contains("empty grid"));
    assert!(!f.path("none").exists());
    assert_eq!(code(&sweep(&f, ",", &f.p("none"))), 2);
}

#[test]
fn convert_then_run() {
    let f = Fixture::new();
    f.write(
        "wide.csv",
        "Object_ID,a,b,c\nq1,1,1,0\nq2,1,0,0\nq3,0,0,1\n",
    );
    let out = armad(&[
        "convert",
        "--from",
        "matrix",
        "-i",
        &f.p("wide.csv"),
        "-o",
        &f.p("pairs.csv"),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(f.read("pairs.csv"), "tid,item\nq1,a\nq1,b\nq2,a\nq3,c\n");
    let out = armad(&["run", "--context", &f.p("pairs.csv"), "--detector", "avf"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    f.write("tx.csv", "q1 a b\nq2 c\n");
    let out = armad(&[
        "convert",
        "--from",
        "transactions",
        "--delimiter",
        " ",
        "-i",
        &f.p("tx.csv"),
        "-o",
        &f.p("tx_pairs.csv"),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(f.read("tx_pairs.csv"), "tid,item\nq1,a\nq1,b\nq2,c\n");

    f.write("bad.csv", "id,a\nq1,maybe\n");
    let out = armad(&[
        "convert",
        "--from",
        "matrix",
        "-i",
        &f.p("bad.csv"),
        "-o",
        &f.p("x.csv"),
    ]);
    assert_eq!(code(&out), 2);
    assert!(!f.path("x.csv").exists());
}

#[test]
fn synth_is_seeded() {
    let f = Fixture::new();
    let gen = |tag: &str, seed: &str| {
        let (ctx, gt) = (f.p(&format!("{tag}.csv")), f.p(&format!("{tag}.txt")));
        let out = armad(&[
            "synth",
            "--background",
            "300",
            "--seed",
            seed,
            "--out",
            &ctx,
            "--labels-out",
            &gt,
        ]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
    };
    gen("a", "5");
    gen("b", "5");
    gen("c", "6");
    assert_eq!(f.read("a.csv"), f.read("b.csv"));
    assert_ne!(f.read("a.csv"), f.read("c.csv"));
    assert_eq!(f.read("a.txt").lines().count(), 10);
}
