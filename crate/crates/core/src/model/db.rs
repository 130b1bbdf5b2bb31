use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use chrono::NaiveDate;

use super::label::{EdgeLabel, NodeLabel};
use super::schema::DataType;
use crate::error::ModelError;

/// A typed property value.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    String(String),
    Int(i64),
    Float(f64),
    Bool(bool),
    Date(NaiveDate),
}

impl Value {
    /// The data type of the value.
    pub fn data_type(&self) -> DataType {
        match self {
            Value::String(_) => DataType::String,
            Value::Int(_) => DataType::Int,
            Value::Float(_) => DataType::Float,
            Value::Bool(_) => DataType::Bool,
            Value::Date(_) => DataType::Date,
        }
    }

    /// Reads a JSON scalar. Strings holding an ISO-8601 date are dates,
    /// integral numbers are `Int`, other numbers `Float`.
    pub fn from_json(v: &serde_json::Value) -> Result<Value, String> {
        use serde_json::Value as J;
        match v {
            J::String(s) => Ok(match NaiveDate::parse_from_str(s, "%Y-%m-%d") {
                Ok(d) if s.len() == 10 => Value::Date(d),
                _ => Value::String(s.clone()),
            }),
            J::Bool(b) => Ok(Value::Bool(*b)),
            J::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(Value::Int(i))
                } else if let Some(f) = n.as_f64() {
                    Ok(Value::Float(f))
                } else {
                    Err(format!("number {n} out of range"))
                }
            }
            J::Null => Err("null property values are not supported".into()),
            J::Array(_) | J::Object(_) => Err("property values must be atomic (no lists or maps)".into()),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::Value as J;
        match self {
            Value::String(s) => J::String(s.clone()),
            Value::Int(i) => J::from(*i),
            Value::Float(f) => serde_json::Number::from_f64(*f).map(J::Number).unwrap_or(J::Null),
            Value::Bool(b) => J::Bool(*b),
            Value::Date(d) => J::String(d.format("%Y-%m-%d").to_string()),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::String(s) => write!(f, "{s:?}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Float(x) => write!(f, "{x:?}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Date(d) => write!(f, "{}", d.format("%Y-%m-%d")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DbNode {
    pub id: String,
    pub label: NodeLabel,
    pub properties: BTreeMap<String, Value>,
}

/// An edge between two nodes, referenced by their position in
/// [`GraphDb::nodes`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DbEdge {
    pub src: usize,
    pub label: EdgeLabel,
    pub trg: usize,
}

/// A property graph instance with single-labelled nodes and edges.
///
/// Nodes are addressed by index internally; [`GraphDb::node_id`] maps an
/// index back to the external identifier.
#[derive(Clone, Debug, Default)]
pub struct GraphDb {
    nodes: Vec<DbNode>,
    edges: Vec<DbEdge>,
    index: HashMap<String, usize>,
}

impl GraphDb {
    pub fn new() -> Self {
        GraphDb::default()
    }

    pub fn add_node(
        &mut self,
        id: impl Into<String>,
        label: impl Into<NodeLabel>,
        properties: BTreeMap<String, Value>,
    ) -> Result<usize, ModelError> {
        let id = id.into();
        if id.is_empty() {
            return Err(ModelError::InvalidIdentifier(id));
        }
        if self.index.contains_key(&id) {
            return Err(ModelError::DuplicateNodeId(id));
        }
        let ix = self.nodes.len();
        self.index.insert(id.clone(), ix);
        self.nodes.push(DbNode {
            id,
            label: label.into(),
            properties,
        });
        Ok(ix)
    }

    pub fn add_edge(&mut self, src: &str, label: impl Into<EdgeLabel>, trg: &str) -> Result<(), ModelError> {
        let label = label.into();
        let lookup = |id: &str| {
            self.index
                .get(id)
                .copied()
                .ok_or_else(|| ModelError::DanglingEndpoint {
                    edge: label.to_string(),
                    node: id.to_string(),
                })
        };
        let src = lookup(src)?;
        let trg = lookup(trg)?;
        self.edges.push(DbEdge { src, label, trg });
        Ok(())
    }

    /// Checks that node and edge labels use disjoint namespaces.
    pub fn validate(&self) -> Result<(), ModelError> {
        let node_labels: BTreeSet<&str> = self.nodes.iter().map(|n| n.label.as_str()).collect();
        for e in &self.edges {
            if node_labels.contains(e.label.as_str()) {
                return Err(ModelError::LabelClash(e.label.to_string()));
            }
        }
        Ok(())
    }

    pub fn nodes(&self) -> &[DbNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[DbEdge] {
        &self.edges
    }

    pub fn node(&self, ix: usize) -> &DbNode {
        &self.nodes[ix]
    }

    pub fn node_id(&self, ix: usize) -> &str {
        &self.nodes[ix].id
    }

    pub fn label_of(&self, ix: usize) -> &NodeLabel {
        &self.nodes[ix].label
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}
