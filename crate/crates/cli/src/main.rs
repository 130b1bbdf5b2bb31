use std::fs;
use std::io::IsTerminal;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::json;

use pathforge::consistency::check_consistency;
use pathforge::emit::{emit_cypher, emit_sql, Dialect};
use pathforge::eval::{eval_ucqt_with, gen_db, tuple_ids, EvalOptions};
use pathforge::infer::{infer_with, InferOptions, Step, DEFAULT_PATH_LIMIT};
use pathforge::io::{db_to_csv, load_db, load_schema};
use pathforge::rewrite::{baseline, format_explain, rewrite_with, RewriteOptions, DEFAULT_DISJUNCT_LIMIT};
use pathforge::simplify::simplify;
use pathforge::syntax::{parse_path_expr, parse_ucqt};
use pathforge::{GraphDb, GraphSchema, PathExpr, Ucqt};

const EXIT_INPUT: u8 = 2;
const EXIT_INCONSISTENT: u8 = 3;
const EXIT_STRICT: u8 = 4;

#[derive(Parser)]
#[command(
    name = "pathforge",
    version,
    about = "Schema-based rewriting of recursive graph queries"
)]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Turn warnings into a failing exit code (4).
    #[arg(long, global = true)]
    strict: bool,
    /// TOML file with `path_limit` and `disjunct_limit`.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Maximum number of simple paths enumerated when eliminating a closure.
    #[arg(long, global = true)]
    path_limit: Option<usize>,
    /// Maximum number of alternatives one atom may expand into.
    #[arg(long, global = true)]
    disjunct_limit: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct QueryInput {
    /// File holding a UCQT query.
    #[arg(long, value_name = "FILE", conflicts_with = "text")]
    query: Option<PathBuf>,
    /// A UCQT query given inline.
    #[arg(long, value_name = "QUERY")]
    text: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Simplify a path expression, or every atom of a query.
    Simplify {
        /// Path expression to simplify.
        #[arg(long, conflicts_with_all = ["query", "text"])]
        expr: Option<String>,
        #[command(flatten)]
        input: QueryInput,
    },
    /// Derive the schema triples of a path expression.
    Infer {
        #[arg(long, value_name = "FILE")]
        schema: PathBuf,
        #[arg(long)]
        expr: String,
        /// Print every subterm with its rule and triples.
        #[arg(long)]
        explain: bool,
    },
    /// Rewrite a query into its schema-enriched form.
    Rewrite {
        #[arg(long, value_name = "FILE")]
        schema: PathBuf,
        #[command(flatten)]
        input: QueryInput,
        /// Print the derivation table before the query.
        #[arg(long)]
        explain: bool,
    },
    /// Evaluate a query on a database.
    Eval {
        /// `nodes.csv,edges.csv`
        #[arg(long, value_name = "NODES,EDGES")]
        db: String,
        #[command(flatten)]
        input: QueryInput,
        /// Compute closures by naive iteration.
        #[arg(long)]
        naive: bool,
    },
    /// Translate a query into SQL or Cypher.
    Emit {
        /// sql:postgres, sql:sqlite, sql:mysql or cypher.
        #[arg(long)]
        target: String,
        /// Schema used to check that every label is known.
        #[arg(long, value_name = "FILE")]
        schema: Option<PathBuf>,
        #[command(flatten)]
        input: QueryInput,
        /// Wrap the SQL in the dialect's view statement.
        #[arg(long)]
        as_view: bool,
    },
    /// Generate a random database conforming to a schema.
    Gen {
        #[arg(long, value_name = "FILE")]
        schema: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Nodes per node label.
        #[arg(long, default_value_t = 5)]
        nodes: usize,
        /// Probability of each possible edge.
        #[arg(long, default_value_t = 0.3)]
        prob: f64,
        /// Directory receiving nodes.csv and edges.csv.
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
    /// Check that a database conforms to a schema.
    Check {
        #[arg(long, value_name = "FILE")]
        schema: PathBuf,
        #[arg(long, value_name = "NODES,EDGES")]
        db: String,
    },
    /// Rewrite a query and emit both versions side by side.
    Pipeline {
        #[arg(long, value_name = "FILE")]
        schema: PathBuf,
        #[command(flatten)]
        input: QueryInput,
        #[arg(long, default_value = "sql:postgres")]
        target: String,
    },
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct Config {
    path_limit: Option<usize>,
    disjunct_limit: Option<usize>,
}

/// An input problem: bad file, bad syntax, bad flag value.
#[derive(Debug)]
struct InputError(anyhow::Error);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for InputError {}

fn input<T>(r: Result<T>) -> Result<T> {
    r.map_err(|e| InputError(e).into())
}

struct Ctx {
    json: bool,
    color: bool,
    warned: bool,
    rewrite: RewriteOptions,
}

impl Ctx {
    fn warn(&mut self, msg: impl std::fmt::Display) {
        self.warned = true;
        if self.color {
            eprintln!("\x1b[33mwarning:\x1b[0m {msg}");
        } else {
            eprintln!("warning: {msg}");
        }
    }
}

enum Target {
    Sql(Dialect),
    Cypher,
}

fn parse_target(s: &str) -> Result<Target> {
    if s == "cypher" {
        return Ok(Target::Cypher);
    }
    match s.strip_prefix("sql:") {
        Some(d) => Ok(Target::Sql(d.parse().map_err(|e: String| anyhow!(e))?)),
        None => bail!("unknown target `{s}`; expected sql:postgres, sql:sqlite, sql:mysql or cypher"),
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("cannot read {}", path.display()))
}

fn read_schema(path: &Path) -> Result<GraphSchema> {
    let bytes = input(read(path))?;
    input(load_schema(&bytes).with_context(|| format!("invalid schema {}", path.display())))
}

fn read_db(spec: &str) -> Result<GraphDb> {
    let (nodes, edges) = spec
        .split_once(',')
        .ok_or_else(|| InputError(anyhow!("--db expects `nodes.csv,edges.csv`")))?;
    let (n, e) = (input(read(Path::new(nodes)))?, input(read(Path::new(edges)))?);
    input(load_db(&n, &e).context("invalid database"))
}

fn read_query(q: &QueryInput) -> Result<Ucqt> {
    let text = match (&q.query, &q.text) {
        (Some(path), _) => {
            let bytes = input(read(path))?;
            input(String::from_utf8(bytes).context("query file is not UTF-8"))?
        }
        (None, Some(t)) => t.clone(),
        (None, None) => {
            return Err(InputError(anyhow!("give a query with --query FILE or --text QUERY")).into())
        }
    };
    input(parse_ucqt(&text).map_err(|e| anyhow!(e)))
}

fn read_expr(text: &str) -> Result<PathExpr> {
    input(parse_path_expr(text).map_err(|e| anyhow!(e)))
}

fn steps_json(steps: &[Step]) -> serde_json::Value {
    steps
        .iter()
        .map(|s| {
            json!({
                "term": s.term.to_string(),
                "rule": s.rule,
                "triples": s.triples.iter().map(ToString::to_string).collect::<Vec<_>>(),
            })
        })
        .collect()
}

fn format_steps(steps: &[Step]) -> String {
    let width = steps
        .iter()
        .map(|s| s.term.to_string().chars().count())
        .max()
        .unwrap_or(0);
    let mut out = String::new();
    for s in steps {
        let term = s.term.to_string();
        let triples: Vec<String> = s.triples.iter().map(ToString::to_string).collect();
        let shown = if triples.is_empty() {
            "∅".to_string()
        } else {
            triples.join(" ")
        };
        out.push_str(&format!(
            "{term:<width$}  {:<9} {:>3}  {shown}\n",
            s.rule.to_string(),
            triples.len()
        ));
    }
    out
}

fn emit_one(ctx: &mut Ctx, target: &Target, query: &Ucqt, as_view: bool) -> Option<String> {
    match target {
        Target::Sql(d) => Some(emit_sql(query, *d, as_view)),
        Target::Cypher => match emit_cypher(query) {
            Ok(text) => Some(text),
            Err(report) => {
                ctx.warn(&report);
                None
            }
        },
    }
}

fn run(cli: Cli, ctx: &mut Ctx) -> Result<u8> {
    match cli.command {
        Command::Simplify { expr, input: q } => {
            if let Some(e) = expr {
                let e = read_expr(&e)?;
                let s = simplify(&e.desugar());
                if ctx.json {
                    println!("{}", json!({"input": e.to_string(), "simplified": s.to_string()}));
                } else {
                    println!("{s}");
                }
            } else {
                let query = read_query(&q)?;
                let b = baseline(&query);
                if ctx.json {
                    println!(
                        "{}",
                        json!({"input": query.to_string(), "simplified": b.to_string()})
                    );
                } else {
                    println!("{b}");
                }
            }
        }
        Command::Infer {
            schema,
            expr,
            explain,
        } => {
            let schema = read_schema(&schema)?;
            let e = read_expr(&expr)?;
            let inf = infer_with(
                &simplify(&e.desugar()),
                &schema,
                InferOptions {
                    path_limit: ctx.rewrite.path_limit,
                },
            );
            for w in &inf.warnings {
                ctx.warn(w);
            }
            if ctx.json {
                println!(
                    "{}",
                    json!({
                        "expr": e.to_string(),
                        "triples": inf.triples.iter().map(ToString::to_string).collect::<Vec<_>>(),
                        "steps": steps_json(&inf.steps),
                    })
                );
            } else if explain {
                print!("{}", format_steps(&inf.steps));
            } else {
                for t in &inf.triples {
                    println!("{t}");
                }
            }
        }
        Command::Rewrite {
            schema,
            input: q,
            explain,
        } => {
            let schema = read_schema(&schema)?;
            let query = read_query(&q)?;
            let out = rewrite_with(&query, &schema, ctx.rewrite);
            for w in &out.warnings {
                ctx.warn(w);
            }
            if ctx.json {
                let atoms: Vec<_> = out
                    .atoms
                    .iter()
                    .map(|a| {
                        json!({
                            "atom": a.atom.to_string(),
                            "simplified": a.simplified.to_string(),
                            "steps": steps_json(&a.steps),
                            "merged": a.merged.iter().map(ToString::to_string).collect::<Vec<_>>(),
                            "reduced": a.reduced.iter().map(ToString::to_string).collect::<Vec<_>>(),
                            "reverted": a.reverted,
                        })
                    })
                    .collect();
                println!(
                    "{}",
                    json!({
                        "input": query.to_string(),
                        "baseline": baseline(&query).to_string(),
                        "enriched": out.enriched.to_string(),
                        "reverted": out.reverted,
                        "warnings": out.warnings,
                        "atoms": atoms,
                    })
                );
            } else {
                if explain {
                    println!("{}", format_explain(&out));
                }
                println!("{}", out.enriched);
            }
        }
        Command::Eval { db, input: q, naive } => {
            let db = read_db(&db)?;
            let query = read_query(&q)?;
            let (tuples, stats) = eval_ucqt_with(&query, &db, EvalOptions { naive_closure: naive });
            let rows = tuple_ids(&db, &tuples);
            if ctx.json {
                println!(
                    "{}",
                    json!({
                        "head": query.head().iter().map(ToString::to_string).collect::<Vec<_>>(),
                        "rows": rows,
                        "stats": {
                            "total_pairs": stats.total_pairs,
                            "largest": stats.largest,
                            "closure_pairs": stats.closure_pairs,
                        },
                    })
                );
            } else {
                for r in rows {
                    println!("{}", r.join("\t"));
                }
            }
        }
        Command::Emit {
            target,
            schema,
            input: q,
            as_view,
        } => {
            let target = input(parse_target(&target))?;
            let query = read_query(&q)?;
            if let Some(path) = schema {
                let schema = read_schema(&path)?;
                let edges = schema.edge_labels();
                let nodes = schema.node_labels();
                for d in query.disjuncts() {
                    for r in &d.relations {
                        for l in r.expr.edge_labels() {
                            if !edges.contains(&l) {
                                ctx.warn(format!("edge label {l} is not in the schema"));
                            }
                        }
                        for l in r.expr.annotation_labels() {
                            if !nodes.contains(&l) {
                                ctx.warn(format!("node label {l} is not in the schema"));
                            }
                        }
                    }
                    for a in &d.labels {
                        for l in a.labels.iter().filter(|l| !nodes.contains(*l)) {
                            ctx.warn(format!("node label {l} is not in the schema"));
                        }
                    }
                }
            }
            let text = emit_one(ctx, &target, &query, as_view);
            if ctx.json {
                println!("{}", json!({"text": text}));
            } else if let Some(t) = text {
                print!("{t}");
            }
        }
        Command::Gen {
            schema,
            seed,
            nodes,
            prob,
            out,
        } => {
            if !(0.0..=1.0).contains(&prob) {
                return Err(InputError(anyhow!("--prob must lie in [0, 1]")).into());
            }
            let schema = read_schema(&schema)?;
            let db = gen_db(&schema, seed, nodes, prob);
            let (n, e) = db_to_csv(&db);
            fs::create_dir_all(&out).with_context(|| format!("cannot create {}", out.display()))?;
            fs::write(out.join("nodes.csv"), n)?;
            fs::write(out.join("edges.csv"), e)?;
            if ctx.json {
                println!("{}", json!({"nodes": db.len(), "edges": db.edges().len()}));
            } else {
                println!(
                    "{} nodes, {} edges written to {}",
                    db.len(),
                    db.edges().len(),
                    out.display()
                );
            }
        }
        Command::Check { schema, db } => {
            let schema = read_schema(&schema)?;
            let db = read_db(&db)?;
            let report = check_consistency(&db, &schema);
            if ctx.json {
                println!(
                    "{}",
                    json!({"consistent": report.is_consistent(), "violations": report.violations})
                );
            } else if report.is_consistent() {
                println!("consistent");
            } else {
                println!("inconsistent: {} violation(s)", report.violations.len());
                for v in &report.violations {
                    println!("  {v}");
                }
            }
            if !report.is_consistent() {
                return Ok(EXIT_INCONSISTENT);
            }
        }
        Command::Pipeline {
            schema,
            input: q,
            target,
        } => {
            let target = input(parse_target(&target))?;
            let schema = read_schema(&schema)?;
            let query = read_query(&q)?;
            let out = rewrite_with(&query, &schema, ctx.rewrite);
            for w in &out.warnings {
                ctx.warn(w);
            }
            let base = baseline(&query);
            let base_text = emit_one(ctx, &target, &base, false);
            let enriched_text = emit_one(ctx, &target, &out.enriched, false);
            if ctx.json {
                println!(
                    "{}",
                    json!({
                        "baseline": base.to_string(),
                        "enriched": out.enriched.to_string(),
                        "reverted": out.reverted,
                        "baseline_text": base_text,
                        "enriched_text": enriched_text,
                    })
                );
            } else {
                println!("-- explain");
                println!("{}", format_explain(&out));
                println!("-- baseline\n{base}\n");
                println!("-- enriched\n{}\n", out.enriched);
                println!("-- baseline ({})", describe(&target));
                println!("{}", base_text.as_deref().unwrap_or("(unsupported)\n"));
                println!("-- enriched ({})", describe(&target));
                print!("{}", enriched_text.as_deref().unwrap_or("(unsupported)\n"));
            }
        }
    }
    Ok(0)
}

fn describe(t: &Target) -> String {
    match t {
        Target::Sql(d) => format!("sql:{d}"),
        Target::Cypher => "cypher".into(),
    }
}

fn options(cli: &Cli) -> Result<RewriteOptions> {
    let config: Config = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            toml::from_str(&text).with_context(|| format!("invalid config {}", path.display()))?
        }
        None => Config::default(),
    };
    Ok(RewriteOptions {
        path_limit: cli.path_limit.or(config.path_limit).unwrap_or(DEFAULT_PATH_LIMIT),
        disjunct_limit: cli
            .disjunct_limit
            .or(config.disjunct_limit)
            .unwrap_or(DEFAULT_DISJUNCT_LIMIT),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let color = std::env::var_os("PATHFORGE_NO_COLOR").is_none() && std::io::stderr().is_terminal();
    let rewrite = match options(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_INPUT);
        }
    };
    let mut ctx = Ctx {
        json: cli.json,
        color,
        warned: false,
        rewrite,
    };
    let strict = cli.strict;
    match run(cli, &mut ctx) {
        Ok(0) if strict && ctx.warned => ExitCode::from(EXIT_STRICT),
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if e.is::<InputError>() { EXIT_INPUT } else { 1 })
        }
    }
}
