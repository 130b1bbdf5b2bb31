use std::collections::BTreeMap;

use chrono::{Duration, NaiveDate};
use rand::distributions::Alphanumeric;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{DataType, GraphDb, GraphSchema, Value};

fn random_value(rng: &mut ChaCha8Rng, ty: DataType) -> Value {
    match ty {
        DataType::String => Value::String((0..8).map(|_| rng.sample(Alphanumeric) as char).collect()),
        DataType::Int => Value::Int(rng.gen_range(0..100)),
        DataType::Float => Value::Float(rng.gen_range(0..10_000) as f64 / 8.0 + 0.5),
        DataType::Bool => Value::Bool(rng.gen()),
        DataType::Date => {
            let base = NaiveDate::from_ymd_opt(1970, 1, 1).expect("valid date");
            Value::Date(base + Duration::days(rng.gen_range(0..20_000)))
        }
    }
}

/// A random database conforming to `schema`: `nodes_per_label` nodes for
/// every node label (ids `LABEL_i`), with each schema edge instantiated
/// between every pair of matching nodes with probability `edge_prob`. The
/// same seed always gives the same database.
pub fn gen_db(schema: &GraphSchema, seed: u64, nodes_per_label: usize, edge_prob: f64) -> GraphDb {
    let edge_prob = edge_prob.clamp(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut db = GraphDb::new();
    let mut ids: BTreeMap<_, Vec<String>> = BTreeMap::new();

    for node in schema.nodes() {
        let list = ids.entry(node.label.clone()).or_default();
        for i in 0..nodes_per_label {
            let id = format!("{}_{i}", node.label);
            let props = node
                .properties
                .iter()
                .map(|(k, &ty)| (k.clone(), random_value(&mut rng, ty)))
                .collect();
            db.add_node(id.clone(), node.label.clone(), props)
                .expect("generated ids are unique");
            list.push(id);
        }
    }

    for edge in schema.edges() {
        for s in &ids[&edge.src] {
            for t in &ids[&edge.trg] {
                if rng.gen_bool(edge_prob) {
                    db.add_edge(s, edge.label.clone(), t)
                        .expect("generated endpoints exist");
                }
            }
        }
    }
    db
}
