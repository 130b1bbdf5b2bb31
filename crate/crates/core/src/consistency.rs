//! Checks whether a database conforms to a schema.
//!
//! Schemas are strict, so the mapping from database elements to schema
//! elements is found by label lookup; every element that has no image is
//! reported.

use std::fmt;

use serde::Serialize;

use crate::model::{DataType, GraphDb, GraphSchema};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// A node whose label has no schema node.
    UnknownNodeLabel { node: String, label: String },
    /// An edge with no schema edge of the same label between its
    /// endpoints' labels.
    UnknownEdge {
        src: String,
        label: String,
        trg: String,
        src_label: String,
        trg_label: String,
    },
    /// A property key the schema node does not declare.
    UnknownProperty { node: String, key: String },
    /// A property whose value has the wrong data type.
    PropertyType {
        node: String,
        key: String,
        expected: DataType,
        found: DataType,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownNodeLabel { node, label } => {
                write!(f, "node {node}: label {label} is not in the schema")
            }
            Violation::UnknownEdge {
                src,
                label,
                trg,
                src_label,
                trg_label,
            } => write!(
                f,
                "edge {src} -[{label}]-> {trg}: schema has no edge ({src_label}, {label}, {trg_label})"
            ),
            Violation::UnknownProperty { node, key } => {
                write!(f, "node {node}: property {key} is not declared")
            }
            Violation::PropertyType {
                node,
                key,
                expected,
                found,
            } => write!(
                f,
                "node {node}: property {key} has type {found}, schema says {expected}"
            ),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ConsistencyReport {
    pub violations: Vec<Violation>,
}

impl ConsistencyReport {
    pub fn is_consistent(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn check_consistency(db: &GraphDb, schema: &GraphSchema) -> ConsistencyReport {
    let mut violations = Vec::new();

    for node in db.nodes() {
        let Some(schema_node) = schema.node(&node.label) else {
            violations.push(Violation::UnknownNodeLabel {
                node: node.id.clone(),
                label: node.label.to_string(),
            });
            continue;
        };
        for (key, value) in &node.properties {
            match schema_node.properties.get(key) {
                None => violations.push(Violation::UnknownProperty {
                    node: node.id.clone(),
                    key: key.clone(),
                }),
                Some(&expected) if expected != value.data_type() => {
                    violations.push(Violation::PropertyType {
                        node: node.id.clone(),
                        key: key.clone(),
                        expected,
                        found: value.data_type(),
                    })
                }
                Some(_) => {}
            }
        }
    }

    for edge in db.edges() {
        let src_label = db.label_of(edge.src);
        let trg_label = db.label_of(edge.trg);
        if !schema.has_edge(src_label, &edge.label, trg_label) {
            violations.push(Violation::UnknownEdge {
                src: db.node_id(edge.src).to_string(),
                label: edge.label.to_string(),
                trg: db.node_id(edge.trg).to_string(),
                src_label: src_label.to_string(),
                trg_label: trg_label.to_string(),
            });
        }
    }

    ConsistencyReport { violations }
}
