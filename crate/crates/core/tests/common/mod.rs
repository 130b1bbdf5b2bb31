//! Generators and oracles shared by the property suites.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use pathforge::eval::{eval_path, eval_ucqt, gen_db, Pairs};
use pathforge::infer::{infer_with, InferOptions};
use pathforge::rewrite::{rewrite_with, RewriteOptions};
use pathforge::{
    Conjunct, DataType, GraphDb, GraphSchema, LabelAtom, LabelSet, NodeLabel, PathExpr, RelationAtom,
    SchemaEdge, SchemaNode, Ucqt, Var,
};
use proptest::prelude::*;

pub const EDGE_LABELS: [&str; 4] = ["a", "b", "c", "d"];
pub const NODE_LABELS: [&str; 6] = ["A", "B", "C", "D", "E", "F"];

/// Keeps closure elimination cheap on dense random schemas.
pub const PATH_LIMIT: usize = 300;

pub fn build_schema(n: usize, edges: &[(usize, usize, usize)]) -> GraphSchema {
    let nodes = NODE_LABELS[..n]
        .iter()
        .map(|l| SchemaNode {
            label: NodeLabel::new(*l),
            properties: BTreeMap::from([("k".to_string(), DataType::Int)]),
        })
        .collect();
    let edges: BTreeSet<SchemaEdge> = edges
        .iter()
        .map(|&(s, l, t)| SchemaEdge {
            label: EDGE_LABELS[l].into(),
            src: NODE_LABELS[s].into(),
            trg: NODE_LABELS[t].into(),
        })
        .collect();
    GraphSchema::new(nodes, edges.into_iter().collect()).expect("generated schema is well formed")
}

/// Schemas with up to 6 node labels and up to 10 edges.
pub fn schema() -> impl Strategy<Value = GraphSchema> {
    (1usize..=6).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..EDGE_LABELS.len(), 0..n), 1..=10)
            .prop_map(move |edges| build_schema(n, &edges))
    })
}

pub fn label_set() -> impl Strategy<Value = LabelSet> {
    prop::sample::subsequence(NODE_LABELS.to_vec(), 1..=3)
        .prop_map(|ls| ls.into_iter().map(NodeLabel::new).collect())
}

/// Path expressions of depth at most 5, possibly annotated and with
/// bounded repetition.
pub fn expr() -> impl Strategy<Value = PathExpr> {
    let leaf = prop_oneof![
        3 => prop::sample::select(EDGE_LABELS.to_vec()).prop_map(PathExpr::label),
        1 => prop::sample::select(EDGE_LABELS.to_vec()).prop_map(PathExpr::reverse),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            3 => (inner.clone(), inner.clone()).prop_map(|(a, b)| PathExpr::concat(a, b)),
            1 => (inner.clone(), label_set(), inner.clone()).prop_map(|(a, l, b)| PathExpr::ann_concat(a, l, b)),
            2 => (inner.clone(), inner.clone()).prop_map(|(a, b)| PathExpr::union(a, b)),
            1 => (inner.clone(), inner.clone()).prop_map(|(a, b)| PathExpr::conj(a, b)),
            1 => (inner.clone(), inner.clone()).prop_map(|(a, b)| PathExpr::branch_right(a, b)),
            1 => (inner.clone(), inner.clone()).prop_map(|(a, b)| PathExpr::branch_left(a, b)),
            2 => inner.clone().prop_map(PathExpr::plus),
            1 => (inner, 1u32..=2, 0u32..=1).prop_map(|(a, m, extra)| PathExpr::repeat(a, m, m + extra)),
        ]
    })
    .prop_filter("depth at most 5", |e| e.depth() <= 5)
}

/// A database conforming to `schema`, at most 5 nodes per label.
pub fn db_for(schema: &GraphSchema) -> impl Strategy<Value = GraphDb> {
    let schema = schema.clone();
    (any::<u64>(), 0usize..=5, 0.1f64..0.8).prop_map(move |(seed, k, p)| gen_db(&schema, seed, k, p))
}

/// A schema, an expression over its edge labels and a conforming database.
pub fn schema_expr_db() -> impl Strategy<Value = (GraphSchema, PathExpr, GraphDb)> {
    schema().prop_flat_map(|s| {
        let dbs = db_for(&s);
        (Just(s), expr(), dbs)
    })
}

/// An arbitrary labelled graph with at most 12 nodes.
pub fn small_db() -> impl Strategy<Value = GraphDb> {
    (1usize..=12).prop_flat_map(|n| {
        (
            prop::collection::vec(0..3usize, n),
            prop::collection::vec((0..n, 0..EDGE_LABELS.len(), 0..n), 0..=30),
        )
            .prop_map(|(labels, edges)| {
                let mut db = GraphDb::new();
                for (i, l) in labels.iter().enumerate() {
                    db.add_node(format!("v{i}"), NODE_LABELS[*l], BTreeMap::new())
                        .unwrap();
                }
                for (s, l, t) in edges {
                    db.add_edge(&format!("v{s}"), EDGE_LABELS[l], &format!("v{t}"))
                        .unwrap();
                }
                db
            })
    })
}

const VARS: [&str; 3] = ["x", "y", "z"];

fn conjunct() -> impl Strategy<Value = Conjunct> {
    (
        expr(),
        prop::collection::vec((0..3usize, expr(), 0..3usize), 0..=1),
        prop::option::of((0..3usize, label_set())),
    )
        .prop_map(|(first, more, label)| {
            let mut relations = vec![RelationAtom::new("x", first, "y")];
            relations.extend(
                more.into_iter()
                    .map(|(s, e, t)| RelationAtom::new(VARS[s], e, VARS[t])),
            );
            let labels = label
                .map(|(v, labels)| LabelAtom {
                    var: Var::new(VARS[v]),
                    labels,
                })
                .into_iter()
                .collect();
            Conjunct { relations, labels }
        })
}

/// Queries with head `x,y` and one or two disjuncts.
pub fn query() -> impl Strategy<Value = Ucqt> {
    prop::collection::vec(conjunct(), 1..=2).prop_map(|ds| {
        Ucqt::new(vec![Var::new("x"), Var::new("y")], ds).expect("x and y occur in every disjunct")
    })
}

pub fn schema_query_db() -> impl Strategy<Value = (GraphSchema, Ucqt, GraphDb)> {
    schema().prop_flat_map(|s| {
        let dbs = db_for(&s);
        (Just(s), query(), dbs)
    })
}

pub fn rewrite_options() -> RewriteOptions {
    RewriteOptions {
        path_limit: PATH_LIMIT,
        ..RewriteOptions::default()
    }
}

/// Soundness and completeness of the inferred triples on one database:
/// every pair of `expr` is explained by a triple with matching endpoint
/// labels, and every triple only produces pairs of `expr`.
pub fn check_inference(schema: &GraphSchema, expr: &PathExpr, db: &GraphDb) -> Result<(), String> {
    let triples = infer_with(
        expr,
        schema,
        InferOptions {
            path_limit: PATH_LIMIT,
        },
    )
    .triples;
    let truth = eval_path(expr, db);
    let mut covered = Pairs::new();
    for t in &triples {
        let pairs = eval_path(&t.expr, db);
        for &(n, m) in &pairs {
            if db.label_of(n) != &t.src || db.label_of(m) != &t.trg {
                continue;
            }
            if !truth.contains(&(n, m)) {
                return Err(format!(
                    "unsound: {t} yields ({}, {}) not in {expr}",
                    db.node_id(n),
                    db.node_id(m)
                ));
            }
            covered.insert((n, m));
        }
    }
    if let Some((n, m)) = truth.difference(&covered).next() {
        return Err(format!(
            "incomplete: ({}, {}) of {expr} has no triple",
            db.node_id(*n),
            db.node_id(*m)
        ));
    }
    Ok(())
}

/// The enriched query answers exactly like the original.
pub fn check_rewrite(schema: &GraphSchema, query: &Ucqt, db: &GraphDb) -> Result<(), String> {
    let out = rewrite_with(query, schema, rewrite_options());
    let (expected, got) = (eval_ucqt(query, db), eval_ucqt(&out.enriched, db));
    if expected != got {
        return Err(format!(
            "{query}\nrewrote to {}\nanswers {expected:?} vs {got:?}",
            out.enriched
        ));
    }
    Ok(())
}
