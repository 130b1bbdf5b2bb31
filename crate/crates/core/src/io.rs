//! Schema (JSON) and database (CSV) file formats.
//!
//! A schema file looks like
//! `{"nodes":[{"label":"PERSON","properties":{"name":"String"}}],"edges":[{"label":"owns","src":"PERSON","trg":"PROPERTY"}]}`.
//! A database is a pair of CSV files: `nodes.csv` with header
//! `id,label,props` (props is a JSON object, possibly empty) and
//! `edges.csv` with header `src,label,trg`.

use std::collections::BTreeMap;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::model::{
    is_identifier, DataType, EdgeLabel, GraphDb, GraphSchema, NodeLabel, SchemaEdge, SchemaNode, Value,
};

const NODES_HEADER: &str = "id,label,props";
const EDGES_HEADER: &str = "src,label,trg";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemaFile {
    #[serde(default)]
    nodes: Vec<NodeEntry>,
    #[serde(default)]
    edges: Vec<EdgeEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeEntry {
    label: String,
    #[serde(default)]
    properties: BTreeMap<String, DataType>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeEntry {
    label: String,
    src: String,
    trg: String,
}

pub fn load_schema(bytes: &[u8]) -> Result<GraphSchema, ModelError> {
    let file: SchemaFile = serde_json::from_slice(bytes).map_err(|e| {
        // serde reports unknown type names as a custom error; surface them
        // with their own variant.
        let msg = e.to_string();
        match msg.strip_prefix("unknown data type `") {
            Some(rest) => ModelError::UnknownDataType(rest.split('`').next().unwrap_or("").into()),
            None => ModelError::Json(e),
        }
    })?;
    let nodes = file
        .nodes
        .into_iter()
        .map(|n| SchemaNode {
            label: NodeLabel::new(n.label),
            properties: n.properties,
        })
        .collect();
    let edges = file
        .edges
        .into_iter()
        .map(|e| SchemaEdge {
            label: EdgeLabel::new(e.label),
            src: NodeLabel::new(e.src),
            trg: NodeLabel::new(e.trg),
        })
        .collect();
    GraphSchema::new(nodes, edges)
}

pub fn schema_to_json(schema: &GraphSchema) -> String {
    let file = SchemaFile {
        nodes: schema
            .nodes()
            .map(|n| NodeEntry {
                label: n.label.to_string(),
                properties: n.properties.clone(),
            })
            .collect(),
        edges: schema
            .edges()
            .iter()
            .map(|e| EdgeEntry {
                label: e.label.to_string(),
                src: e.src.to_string(),
                trg: e.trg.to_string(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("schema serializes")
}

fn check_header(
    reader: &mut csv::Reader<impl Read>,
    file: &'static str,
    expected: &'static str,
) -> Result<(), ModelError> {
    let found: Vec<String> = reader.headers()?.iter().map(|h| h.trim().to_string()).collect();
    if found.join(",") != expected {
        return Err(ModelError::BadHeader {
            file,
            expected,
            found: found.join(","),
        });
    }
    Ok(())
}

fn parse_props(id: &str, raw: &str) -> Result<BTreeMap<String, Value>, ModelError> {
    let raw = raw.trim();
    if raw.is_empty() {
        return Ok(BTreeMap::new());
    }
    let bad = |message: String| ModelError::BadProperties {
        node: id.to_string(),
        message,
    };
    let json: serde_json::Value = serde_json::from_str(raw).map_err(|e| bad(e.to_string()))?;
    let obj = json
        .as_object()
        .ok_or_else(|| bad("props must be a JSON object".into()))?;
    obj.iter()
        .map(|(k, v)| {
            Ok((
                k.clone(),
                Value::from_json(v).map_err(|m| bad(format!("`{k}`: {m}")))?,
            ))
        })
        .collect()
}

/// Reads a database from the contents of `nodes.csv` and `edges.csv`.
pub fn load_db(nodes_csv: &[u8], edges_csv: &[u8]) -> Result<GraphDb, ModelError> {
    let mut db = GraphDb::new();

    let mut nodes = csv::Reader::from_reader(nodes_csv);
    check_header(&mut nodes, "nodes.csv", NODES_HEADER)?;
    for record in nodes.records() {
        let record = record?;
        let id = record.get(0).unwrap_or("").trim();
        let label = record.get(1).unwrap_or("").trim();
        if !is_identifier(label) {
            return Err(ModelError::InvalidIdentifier(label.to_string()));
        }
        let props = parse_props(id, record.get(2).unwrap_or(""))?;
        db.add_node(id, label, props)?;
    }

    let mut edges = csv::Reader::from_reader(edges_csv);
    check_header(&mut edges, "edges.csv", EDGES_HEADER)?;
    for record in edges.records() {
        let record = record?;
        let label = record.get(1).unwrap_or("").trim();
        if !is_identifier(label) {
            return Err(ModelError::InvalidIdentifier(label.to_string()));
        }
        db.add_edge(
            record.get(0).unwrap_or("").trim(),
            label,
            record.get(2).unwrap_or("").trim(),
        )?;
    }

    db.validate()?;
    Ok(db)
}

/// Serializes a database into the `(nodes.csv, edges.csv)` contents.
pub fn db_to_csv(db: &GraphDb) -> (String, String) {
    let mut nodes = csv::Writer::from_writer(Vec::new());
    nodes
        .write_record(NODES_HEADER.split(','))
        .expect("write to memory");
    for n in db.nodes() {
        let props: serde_json::Map<String, serde_json::Value> = n
            .properties
            .iter()
            .map(|(k, v)| (k.clone(), v.to_json()))
            .collect();
        let props = serde_json::Value::Object(props).to_string();
        nodes
            .write_record([n.id.as_str(), n.label.as_str(), props.as_str()])
            .expect("write to memory");
    }

    let mut edges = csv::Writer::from_writer(Vec::new());
    edges
        .write_record(EDGES_HEADER.split(','))
        .expect("write to memory");
    for e in db.edges() {
        edges
            .write_record([db.node_id(e.src), e.label.as_str(), db.node_id(e.trg)])
            .expect("write to memory");
    }

    let finish = |w: csv::Writer<Vec<u8>>| {
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv is utf-8")
    };
    (finish(nodes), finish(edges))
}
