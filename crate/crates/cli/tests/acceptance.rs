//! One PASS/FAIL line per acceptance criterion. Runs as a plain binary
//! (`cargo test --test acceptance`); exits nonzero when a criterion fails
//! that is not listed in `KNOWN_FAILURES`.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::cell::Cell;
use std::collections::BTreeMap;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use pathforge::consistency::{check_consistency, Violation};
use pathforge::emit::{emit_cypher, emit_sql, Dialect};
use pathforge::eval::{eval_path, eval_ucqt_with, gen_db, EvalOptions};
use pathforge::fixtures::{yago_db, yago_schema, YAGO_EDGES_CSV, YAGO_NODES_CSV, YAGO_SCHEMA_JSON};
use pathforge::infer::infer;
use pathforge::io::load_db;
use pathforge::rewrite::{baseline, rewrite};
use pathforge::simplify::simplify;
use pathforge::syntax::{parse_path_expr, parse_ucqt};
use pathforge::{PathExpr, Ucqt};
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

const PHI4: &str = "livesIn/isLocatedIn+/dealsWith+";
const PHI_RED: &str = "(((owns[isMarriedTo+/livesIn/dealsWith+])/(isLocatedIn+)+)+)+";
const PHI_OPT: &str = "(owns[isMarriedTo[livesIn[dealsWith]]]/isLocatedIn+)+";

const TABLE2_BUDGET: Duration = Duration::from_secs(1);
const THEOREM1_CASES: u32 = 256;
const THEOREM1_BUDGET: Duration = Duration::from_secs(120);
const SIMPLIFIER_CASES: u32 = 600;

/// Criteria that cannot hold as stated; they still print FAIL.
const KNOWN_FAILURES: &[&str] = &["4b"];

type Outcome = Result<String, String>;
type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            cases,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

fn pathforge(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_pathforge"))
        .args(args)
        .env("PATHFORGE_NO_COLOR", "1")
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "pathforge {args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    String::from_utf8(out.stdout).map_err(|e| e.to_string())
}

fn schema_file() -> tempfile::NamedTempFile {
    let f = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(f.path(), YAGO_SCHEMA_JSON).unwrap();
    f
}

fn has_plus(e: &PathExpr) -> bool {
    e.to_string().contains('+')
}

fn edge_count(e: &PathExpr) -> usize {
    match e {
        PathExpr::Label(_) | PathExpr::Reverse(_) => 1,
        PathExpr::Concat(a, b) | PathExpr::AnnConcat(a, _, b) => edge_count(a) + edge_count(b),
        _ => 0,
    }
}

fn table2() -> Outcome {
    let schema = schema_file();
    let start = Instant::now();
    let out = pathforge(&[
        "--json",
        "infer",
        "--schema",
        schema.path().to_str().unwrap(),
        "--expr",
        PHI4,
    ])?;
    let elapsed = start.elapsed();
    let v: serde_json::Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    let mut got: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for step in v["steps"].as_array().ok_or("no steps")? {
        let triples = step["triples"].as_array().ok_or("no triples")?;
        got.insert(
            step["term"].as_str().unwrap_or_default().to_string(),
            triples
                .iter()
                .map(|t| t.as_str().unwrap_or_default().to_string())
                .collect(),
        );
    }
    let want = [
        ("livesIn", 1),
        ("isLocatedIn+", 6),
        ("dealsWith+", 1),
        ("livesIn/isLocatedIn+", 2),
        (PHI4, 1),
    ];
    for (term, n) in want {
        let found = got.get(term).map_or(0, Vec::len);
        if found != n {
            return Err(format!("{term}: {found} triples, expected {n}"));
        }
    }
    if got["dealsWith+"] != ["(COUNTRY, dealsWith+, COUNTRY)"] {
        return Err(format!("dealsWith+ lost its closure: {:?}", got["dealsWith+"]));
    }
    let full = &got[PHI4][0];
    if full != "(PERSON, livesIn/{CITY}isLocatedIn/{REGION}isLocatedIn/{COUNTRY}dealsWith+, COUNTRY)" {
        return Err(format!("full expression typed as {full}"));
    }
    if elapsed > TABLE2_BUDGET {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!(
        "counts 1/6/1/2/1, chain CITY,REGION,COUNTRY, {} ms",
        elapsed.as_millis()
    ))
}

fn final_rewrite() -> Outcome {
    let schema = schema_file();
    let q = format!("x,y <- (x, {PHI4}, y)");
    let out = pathforge(&[
        "rewrite",
        "--schema",
        schema.path().to_str().unwrap(),
        "--text",
        &q,
    ])?;
    let golden = include_str!("../../core/tests/golden/phi4_enriched.ucqt");
    if out != golden {
        return Err(format!("got {out:?}"));
    }
    Ok(out.trim_end().to_string())
}

fn theorem1() -> Outcome {
    let start = Instant::now();
    let cases = Cell::new(0u32);
    runner(THEOREM1_CASES)
        .run(&common::schema_expr_db(), |(s, e, db)| {
            cases.set(cases.get() + 1);
            let q = Ucqt::single("x", e.clone(), "y");
            common::check_inference(&s, &e, &db).map_err(TestCaseError::fail)?;
            common::check_rewrite(&s, &q, &db).map_err(TestCaseError::fail)?;
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    if elapsed > THEOREM1_BUDGET {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!(
        "{} cases, 0 counterexamples, {:.1} s",
        cases.get(),
        elapsed.as_secs_f64()
    ))
}

fn simplifier() -> Outcome {
    let cases = Cell::new(0u32);
    let strategy = (common::expr(), common::small_db());
    runner(SIMPLIFIER_CASES)
        .run(&strategy, |(e, db)| {
            cases.set(cases.get() + 1);
            let once = simplify(&e);
            proptest::prop_assert_eq!(eval_path(&once, &db), eval_path(&e, &db), "unsound on {}", e);
            proptest::prop_assert_eq!(simplify(&once), once.clone(), "not idempotent on {}", e);
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(format!("{} cases sound and idempotent", cases.get()))
}

fn phi_opt() -> Outcome {
    let red = parse_path_expr(PHI_RED).map_err(|e| e.to_string())?;
    let got = simplify(&red.desugar()).to_string();
    if got == PHI_OPT {
        return Ok(got);
    }
    Err(format!(
        "simplify gives {got}, expected {PHI_OPT}; the expected form drops `+` from \
         isMarriedTo, the main side of a nested branch, which changes its meaning"
    ))
}

fn closure_elimination() -> Outcome {
    let schema = yago_schema();
    let triples = infer(&parse_path_expr("isLocatedIn+").unwrap(), &schema);
    if triples.iter().any(|t| has_plus(&t.expr)) {
        return Err("isLocatedIn+ kept a closure".into());
    }
    let mut lengths: Vec<usize> = triples.iter().map(|t| edge_count(&t.expr)).collect();
    lengths.sort_unstable();
    if lengths != [1, 1, 1, 2, 2, 3] {
        return Err(format!("lengths {lengths:?}"));
    }
    let dw = infer(&parse_path_expr("dealsWith+").unwrap(), &schema);
    if dw.len() != 1 || !dw.iter().all(|t| has_plus(&t.expr)) {
        return Err(format!("dealsWith+ typed as {dw:?}"));
    }
    let q = parse_ucqt("x,y <- (x, dealsWith+, y)").unwrap();
    if !has_plus(&rewrite(&q, &schema).enriched.disjuncts()[0].relations[0].expr) {
        return Err("dealsWith+ was unrolled".into());
    }
    Ok(format!(
        "6 paths, lengths {lengths:?} (min 1, max 3); dealsWith+ kept"
    ))
}

fn revert() -> Outcome {
    let schema = schema_file();
    let q = "x,y <- (x, dealsWith+, y)";
    let enriched = pathforge(&[
        "rewrite",
        "--schema",
        schema.path().to_str().unwrap(),
        "--text",
        q,
    ])?;
    let base = pathforge(&["simplify", "--text", q])?;
    if enriched != base {
        return Err(format!("{enriched:?} vs baseline {base:?}"));
    }
    let sql =
        |args: &[&str]| pathforge(&[&["emit", "--target", "sql:postgres", "--text"][..], args].concat());
    if sql(&[enriched.trim_end()])? != sql(&[base.trim_end()])? {
        return Err("emitted SQL differs".into());
    }
    let parsed = parse_ucqt(q).unwrap();
    let out = rewrite(&parsed, &yago_schema());
    if out.reverted != [true] || out.enriched != baseline(&parsed) {
        return Err("library does not report a revert".into());
    }
    Ok(enriched.trim_end().to_string())
}

fn emitters() -> Outcome {
    let q1 = parse_ucqt("SRC,TRG <- (SRC, knows/workAt/isLocatedIn, TRG)").unwrap();
    let q2 = parse_ucqt("SRC,TRG <- (SRC, knows/workAt/{Organisation}isLocatedIn, TRG)").unwrap();
    let checks = [
        (
            "q1 sql",
            emit_sql(&q1, Dialect::Postgres, false),
            include_str!("../../core/tests/golden/q1_baseline.sql"),
        ),
        (
            "q2 sql",
            emit_sql(&q2, Dialect::Postgres, false),
            include_str!("../../core/tests/golden/q2_enriched.sql"),
        ),
        (
            "q1 cypher",
            emit_cypher(&q1).map_err(|e| e.to_string())?,
            include_str!("../../core/tests/golden/q1_baseline.cypher"),
        ),
        (
            "q2 cypher",
            emit_cypher(&q2).map_err(|e| e.to_string())?,
            include_str!("../../core/tests/golden/q2_enriched.cypher"),
        ),
    ];
    for (name, got, want) in checks {
        if got != want {
            return Err(format!("{name} differs:\n{got}"));
        }
    }
    for (text, construct) in [
        ("x,y <- (x, a&b, y)", "conjunction"),
        ("x,y <- (x, a[b], y)", "branch"),
    ] {
        match emit_cypher(&parse_ucqt(text).unwrap()) {
            Err(r) if r.construct == construct && r.disjunct == 1 => {}
            other => return Err(format!("{text}: {other:?}")),
        }
    }
    Ok("4 goldens match; conjunction and branch rejected with reports".into())
}

fn consistency() -> Outcome {
    let schema = yago_schema();
    if !check_consistency(&yago_db(), &schema).is_consistent() {
        return Err("bundled database flagged".into());
    }
    let mutate = |nodes: &str, edges: &str| {
        let db = load_db(nodes.as_bytes(), edges.as_bytes()).unwrap();
        check_consistency(&db, &schema).violations
    };
    let endpoint = mutate(
        YAGO_NODES_CSV,
        &YAGO_EDGES_CSV.replace("n2,owns,n1", "n2,owns,n4"),
    );
    if !endpoint.iter().any(|v| matches!(v, Violation::UnknownEdge { src, label, trg, .. } if src == "n2" && label == "owns" && trg == "n4")) {
        return Err(format!("wrong endpoint not flagged: {endpoint:?}"));
    }
    let typed = mutate(
        &YAGO_NODES_CSV.replace(r#""age"": 28"#, r#""age"": ""28"""#),
        YAGO_EDGES_CSV,
    );
    if !typed
        .iter()
        .any(|v| matches!(v, Violation::PropertyType { node, key, .. } if node == "n2" && key == "age"))
    {
        return Err(format!("wrong property type not flagged: {typed:?}"));
    }
    let label = mutate(&YAGO_NODES_CSV.replace("n7,COUNTRY", "n7,PLANET"), YAGO_EDGES_CSV);
    if !label.iter().any(
        |v| matches!(v, Violation::UnknownNodeLabel { node, label } if node == "n7" && label == "PLANET"),
    ) {
        return Err(format!("unknown label not flagged: {label:?}"));
    }
    Ok("bundled db consistent; endpoint, property type and label mutations flagged".into())
}

fn smoke() -> Outcome {
    let schema = yago_schema();
    let q = parse_ucqt(&format!("x,y <- (x, {PHI4}, y)")).unwrap();
    let enriched = rewrite(&q, &schema).enriched;
    let (mut base_total, mut enriched_total, mut runs) = (0, 0, 0);
    for seed in 0..8 {
        for (nodes, prob) in [(4, 0.5), (10, 0.3), (25, 0.1)] {
            let db = gen_db(&schema, seed, nodes, prob);
            let (a, sa) = eval_ucqt_with(&q, &db, EvalOptions::default());
            let (b, sb) = eval_ucqt_with(&enriched, &db, EvalOptions::default());
            if a != b {
                return Err(format!("answers differ on seed {seed}"));
            }
            if sb.total_pairs > sa.total_pairs {
                return Err(format!(
                    "seed {seed}, {nodes} nodes/label: enriched {} pairs > baseline {}",
                    sb.total_pairs, sa.total_pairs
                ));
            }
            base_total += sa.total_pairs;
            enriched_total += sb.total_pairs;
            runs += 1;
        }
    }
    Ok(format!(
        "{runs} dbs, intermediate pairs {enriched_total} enriched vs {base_total} baseline"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("1", "Table 2 per-subterm triples", table2),
        ("2", "final rewrite of phi4 matches golden", final_rewrite),
        ("3", "Theorem 1 oracle suite", theorem1),
        ("4a", "simplifier soundness and idempotence", simplifier),
        ("4b", "phi_red simplifies to phi_opt", phi_opt),
        ("5", "closure elimination for isLocatedIn+", closure_elimination),
        ("6", "dealsWith+ reverts to baseline", revert),
        ("7", "SQL and Cypher emitter goldens", emitters),
        ("8", "consistency checker and mutations", consistency),
        ("S", "smoke: enriched never enlarges intermediates", smoke),
    ];
    let mut unexpected = 0;
    for (id, name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS {id:>2}  {name}: {detail}"),
            Err(detail) => {
                let known = KNOWN_FAILURES.contains(&id);
                if !known {
                    unexpected += 1;
                }
                let tag = if known { " (known)" } else { "" };
                println!("FAIL {id:>2}  {name}{tag}: {detail}");
            }
        }
    }
    if unexpected > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
