use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::label::{is_identifier, EdgeLabel, LabelSet, NodeLabel};
use crate::error::ModelError;

/// Property data types understood by schemas and the consistency checker.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DataType {
    String,
    Int,
    Float,
    Bool,
    /// ISO-8601 calendar date (`YYYY-MM-DD`).
    Date,
}

impl DataType {
    pub const ALL: [DataType; 5] = [
        DataType::String,
        DataType::Int,
        DataType::Float,
        DataType::Bool,
        DataType::Date,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DataType::String => "String",
            DataType::Int => "Int",
            DataType::Float => "Float",
            DataType::Bool => "Bool",
            DataType::Date => "Date",
        }
    }
}

impl fmt::Display for DataType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DataType {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "String" => Ok(DataType::String),
            "Int" | "Integer" => Ok(DataType::Int),
            "Float" => Ok(DataType::Float),
            "Bool" | "Boolean" => Ok(DataType::Bool),
            "Date" => Ok(DataType::Date),
            other => Err(ModelError::UnknownDataType(other.to_string())),
        }
    }
}

impl Serialize for DataType {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for DataType {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemaNode {
    pub label: NodeLabel,
    pub properties: BTreeMap<String, DataType>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SchemaEdge {
    pub label: EdgeLabel,
    pub src: NodeLabel,
    pub trg: NodeLabel,
}

/// A strict graph schema: at most one node per node label and at most one
/// edge per `(source label, edge label, target label)`, so schema elements
/// are identified by their labels.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GraphSchema {
    nodes: BTreeMap<NodeLabel, SchemaNode>,
    edges: Vec<SchemaEdge>,
}

impl GraphSchema {
    pub fn new(nodes: Vec<SchemaNode>, edges: Vec<SchemaEdge>) -> Result<Self, ModelError> {
        let mut by_label = BTreeMap::new();
        for node in nodes {
            if !is_identifier(node.label.as_str()) {
                return Err(ModelError::InvalidIdentifier(node.label.to_string()));
            }
            if by_label.contains_key(&node.label) {
                return Err(ModelError::DuplicateNodeLabel(node.label.to_string()));
            }
            by_label.insert(node.label.clone(), node);
        }

        let mut seen = BTreeSet::new();
        for edge in &edges {
            if !is_identifier(edge.label.as_str()) {
                return Err(ModelError::InvalidIdentifier(edge.label.to_string()));
            }
            for end in [&edge.src, &edge.trg] {
                if !by_label.contains_key(end) {
                    return Err(ModelError::DanglingEndpoint {
                        edge: edge.label.to_string(),
                        node: end.to_string(),
                    });
                }
            }
            if by_label.contains_key(&NodeLabel::new(edge.label.as_str())) {
                return Err(ModelError::LabelClash(edge.label.to_string()));
            }
            if !seen.insert(edge.clone()) {
                return Err(ModelError::DuplicateSchemaEdge {
                    src: edge.src.to_string(),
                    label: edge.label.to_string(),
                    trg: edge.trg.to_string(),
                });
            }
        }

        Ok(GraphSchema {
            nodes: by_label,
            edges,
        })
    }

    pub fn nodes(&self) -> impl Iterator<Item = &SchemaNode> {
        self.nodes.values()
    }

    pub fn node(&self, label: &NodeLabel) -> Option<&SchemaNode> {
        self.nodes.get(label)
    }

    pub fn edges(&self) -> &[SchemaEdge] {
        &self.edges
    }

    pub fn node_labels(&self) -> LabelSet {
        self.nodes.keys().cloned().collect()
    }

    pub fn edge_labels(&self) -> BTreeSet<EdgeLabel> {
        self.edges.iter().map(|e| e.label.clone()).collect()
    }

    pub fn has_edge(&self, src: &NodeLabel, label: &EdgeLabel, trg: &NodeLabel) -> bool {
        self.edges
            .iter()
            .any(|e| &e.src == src && &e.label == label && &e.trg == trg)
    }

    /// Labels of nodes that can be the source of an edge labelled `label`.
    pub fn sources_of(&self, label: &EdgeLabel) -> LabelSet {
        self.edges
            .iter()
            .filter(|e| &e.label == label)
            .map(|e| e.src.clone())
            .collect()
    }

    /// Labels of nodes that can be the target of an edge labelled `label`.
    pub fn targets_of(&self, label: &EdgeLabel) -> LabelSet {
        self.edges
            .iter()
            .filter(|e| &e.label == label)
            .map(|e| e.trg.clone())
            .collect()
    }
}
