use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use pathforge::fixtures::{YAGO_EDGES_CSV, YAGO_NODES_CSV, YAGO_SCHEMA_JSON};
use pathforge::syntax::parse_ucqt;
use tempfile::TempDir;

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("schema.json"), YAGO_SCHEMA_JSON).unwrap();
        fs::write(dir.path().join("nodes.csv"), YAGO_NODES_CSV).unwrap();
        fs::write(dir.path().join("edges.csv"), YAGO_EDGES_CSV).unwrap();
        Fixture { dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn schema(&self) -> String {
        self.path("schema.json").display().to_string()
    }

    fn db(&self) -> String {
        db_arg(self.dir.path())
    }
}

fn db_arg(dir: &Path) -> String {
    format!(
        "{},{}",
        dir.join("nodes.csv").display(),
        dir.join("edges.csv").display()
    )
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pathforge"))
        .args(args)
        .env("PATHFORGE_NO_COLOR", "1")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn bundled_database_is_consistent() {
    let f = Fixture::new();
    let o = run(&["check", "--schema", &f.schema(), "--db", &f.db()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "consistent\n");
}

#[test]
fn mutated_database_exits_three() {
    let f = Fixture::new();
    let edges = YAGO_EDGES_CSV.replace("n2,owns,n1", "n2,owns,n4");
    fs::write(f.path("edges.csv"), edges).unwrap();
    let o = run(&["check", "--schema", &f.schema(), "--db", &f.db()]);
    assert_eq!(o.status.code(), Some(3));
    let out = stdout(&o);
    assert!(out.starts_with("inconsistent: 1 violation(s)"), "{out}");
    assert!(out.contains("owns"), "{out}");
}

#[test]
fn parse_errors_exit_two() {
    let o = run(&["simplify", "--text", "x,y <- (x, a/, y)"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("error"));
}

#[test]
fn missing_schema_exits_two() {
    let o = run(&[
        "rewrite",
        "--schema",
        "/nonexistent/schema.json",
        "--text",
        "x,y <- (x, a, y)",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn simplify_prints_the_simplified_expression() {
    let o = run(&["simplify", "--expr", "(a+)+[b/c]"]);
    assert_eq!(stdout(&o), "a+[b[c]]\n");
}

#[test]
fn rewrite_prints_the_enriched_query() {
    let f = Fixture::new();
    let o = run(&[
        "rewrite",
        "--schema",
        &f.schema(),
        "--text",
        "x,y <- (x, livesIn/isLocatedIn+/dealsWith+, y)",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "x,y <- (x, livesIn/isLocatedIn, _g1) && (_g1, isLocatedIn/dealsWith+, y) && _g1:{REGION}\n"
    );
}

#[test]
fn json_rewrite_round_trips() {
    let f = Fixture::new();
    let text = "x,y <- (x, owns/isLocatedIn+, y) || (x, livesIn, y)";
    let o = run(&["--json", "rewrite", "--schema", &f.schema(), "--text", text]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let enriched = v["enriched"].as_str().unwrap();
    assert_eq!(parse_ucqt(enriched).unwrap().to_string(), enriched);
    assert_eq!(
        v["input"].as_str().unwrap(),
        parse_ucqt(text).unwrap().to_string()
    );
    assert_eq!(v["atoms"].as_array().unwrap().len(), 2);
}

#[test]
fn query_files_are_read() {
    let f = Fixture::new();
    fs::write(f.path("q.ucqt"), "# owners\ny <- (y, owns, z)\n").unwrap();
    let o = run(&[
        "eval",
        "--db",
        &f.db(),
        "--query",
        f.path("q.ucqt").to_str().unwrap(),
    ]);
    assert_eq!(stdout(&o), "n2\n");
}

#[test]
fn eval_prints_tab_separated_rows() {
    let f = Fixture::new();
    let o = run(&["eval", "--db", &f.db(), "--text", "x,y <- (x, isMarriedTo, y)"]);
    assert_eq!(stdout(&o), "n2\tn3\nn3\tn2\n");
    let naive = run(&[
        "eval",
        "--naive",
        "--db",
        &f.db(),
        "--text",
        "x,y <- (x, isMarriedTo, y)",
    ]);
    assert_eq!(stdout(&naive), stdout(&o));
}

#[test]
fn cypher_reports_unsupported_constructs() {
    let q = "x,y <- (x, a&b, y)";
    let o = run(&["emit", "--target", "cypher", "--text", q]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).is_empty());
    assert!(stderr(&o).contains("conjunction"), "{}", stderr(&o));
    let strict = run(&["--strict", "emit", "--target", "cypher", "--text", q]);
    assert_eq!(strict.status.code(), Some(4));
}

#[test]
fn unknown_target_exits_two() {
    let o = run(&["emit", "--target", "sql:oracle", "--text", "x,y <- (x, a, y)"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn emit_warns_on_labels_outside_the_schema() {
    let f = Fixture::new();
    let o = run(&[
        "emit",
        "--target",
        "sql:postgres",
        "--schema",
        &f.schema(),
        "--text",
        "x,y <- (x, knows, y)",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("edge label knows is not in the schema"));
    assert!(stdout(&o).contains("FROM knows AS e1"));
}

#[test]
fn views_wrap_the_select() {
    let o = run(&[
        "emit",
        "--target",
        "sql:sqlite",
        "--as-view",
        "--text",
        "x,y <- (x, a, y)",
    ]);
    assert!(
        stdout(&o).starts_with("CREATE VIEW query_result (x, y) AS"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn generated_databases_pass_the_checker() {
    let f = Fixture::new();
    let out = f.path("gen");
    let o = run(&[
        "gen",
        "--schema",
        &f.schema(),
        "--seed",
        "7",
        "--nodes",
        "4",
        "--prob",
        "0.5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let c = run(&["check", "--schema", &f.schema(), "--db", &db_arg(&out)]);
    assert_eq!(stdout(&c), "consistent\n");
}

#[test]
fn bad_probability_exits_two() {
    let f = Fixture::new();
    let out = f.path("gen");
    let o = run(&[
        "gen",
        "--schema",
        &f.schema(),
        "--prob",
        "1.5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_path_limit_is_honoured() {
    let f = Fixture::new();
    fs::write(f.path("cfg.toml"), "path_limit = 1\n").unwrap();
    let cfg = f.path("cfg.toml");
    let args = [
        "rewrite",
        "--schema",
        &f.schema(),
        "--text",
        "x,y <- (x, isLocatedIn+, y)",
    ];
    let limited = run(&[&["--config", cfg.to_str().unwrap()][..], &args[..]].concat());
    assert!(stderr(&limited).contains("warning"), "{}", stderr(&limited));
    assert_eq!(stdout(&limited), "x,y <- (x, isLocatedIn+, y)\n");
    let strict = run(&[&["--strict", "--config", cfg.to_str().unwrap()][..], &args[..]].concat());
    assert_eq!(strict.status.code(), Some(4));
    let free = run(&args);
    assert!(stderr(&free).is_empty());
    assert_ne!(stdout(&free), stdout(&limited));
}

#[test]
fn unknown_config_keys_are_rejected() {
    let f = Fixture::new();
    fs::write(f.path("cfg.toml"), "pathlimit = 3\n").unwrap();
    let o = run(&[
        "--config",
        f.path("cfg.toml").to_str().unwrap(),
        "simplify",
        "--expr",
        "a",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn infer_json_lists_every_subterm() {
    let f = Fixture::new();
    let o = run(&[
        "--json",
        "infer",
        "--schema",
        &f.schema(),
        "--expr",
        "livesIn/isLocatedIn",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["triples"][0], "(PERSON, livesIn/{CITY}isLocatedIn, REGION)");
    assert_eq!(v["steps"].as_array().unwrap().len(), 3);
}

#[test]
fn pipeline_prints_both_forms() {
    let f = Fixture::new();
    let o = run(&[
        "pipeline",
        "--schema",
        &f.schema(),
        "--target",
        "cypher",
        "--text",
        "x,y <- (x, dealsWith+, y)",
    ]);
    let out = stdout(&o);
    for section in ["-- explain", "-- baseline", "-- enriched", "-- enriched (cypher)"] {
        assert!(out.contains(section), "{out}");
    }
    assert!(out.contains("reverted"), "{out}");
}
