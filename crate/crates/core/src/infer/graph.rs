use std::collections::{BTreeMap, BTreeSet};

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::model::{NodeLabel, SchemaTriple};

/// The directed graph whose vertices are node labels and whose arcs are
/// triples, each arc running from the triple's source to its target.
#[derive(Clone, Debug)]
pub struct TripleGraph {
    vertices: BTreeSet<NodeLabel>,
    arcs: Vec<SchemaTriple>,
    out: BTreeMap<NodeLabel, Vec<usize>>,
}

/// Result of a bounded path enumeration.
pub enum Paths {
    Complete(Vec<Vec<usize>>),
    /// More than the allowed number of paths exist.
    TooMany,
}

impl TripleGraph {
    pub fn new(triples: impl IntoIterator<Item = SchemaTriple>) -> Self {
        let arcs: Vec<SchemaTriple> = triples.into_iter().collect();
        let mut vertices = BTreeSet::new();
        let mut out: BTreeMap<NodeLabel, Vec<usize>> = BTreeMap::new();
        for (i, t) in arcs.iter().enumerate() {
            vertices.insert(t.src.clone());
            vertices.insert(t.trg.clone());
            out.entry(t.src.clone()).or_default().push(i);
        }
        TripleGraph { vertices, arcs, out }
    }

    pub fn vertices(&self) -> &BTreeSet<NodeLabel> {
        &self.vertices
    }

    pub fn arcs(&self) -> &[SchemaTriple] {
        &self.arcs
    }

    fn arcs_from(&self, v: &NodeLabel) -> &[usize] {
        self.out.get(v).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Vertices lying on some cycle: members of a strongly connected
    /// component with two or more vertices, or carrying a self-loop.
    pub fn cyclic_vertices(&self) -> BTreeSet<NodeLabel> {
        let mut g = DiGraph::<&NodeLabel, ()>::new();
        let ix: BTreeMap<&NodeLabel, _> = self.vertices.iter().map(|v| (v, g.add_node(v))).collect();
        for t in &self.arcs {
            g.add_edge(ix[&t.src], ix[&t.trg], ());
        }
        let mut cyclic = BTreeSet::new();
        for scc in tarjan_scc(&g) {
            if scc.len() > 1 {
                cyclic.extend(scc.iter().map(|n| g[*n].clone()));
            }
        }
        for t in &self.arcs {
            if t.src == t.trg {
                cyclic.insert(t.src.clone());
            }
        }
        cyclic
    }

    /// Every non-empty path that never visits a vertex twice, as a list of
    /// arc indices. Parallel arcs give distinct paths.
    pub fn simple_paths(&self, limit: usize) -> Paths {
        let mut found = Vec::new();
        for start in &self.vertices {
            let mut visited = BTreeSet::from([start]);
            let mut path = Vec::new();
            if !self.extend(start, &mut visited, &mut path, &mut found, limit) {
                return Paths::TooMany;
            }
        }
        Paths::Complete(found)
    }

    fn extend<'a>(
        &'a self,
        at: &'a NodeLabel,
        visited: &mut BTreeSet<&'a NodeLabel>,
        path: &mut Vec<usize>,
        found: &mut Vec<Vec<usize>>,
        limit: usize,
    ) -> bool {
        for &arc in self.arcs_from(at) {
            let next = &self.arcs[arc].trg;
            if visited.contains(next) {
                continue;
            }
            path.push(arc);
            found.push(path.clone());
            if found.len() > limit {
                return false;
            }
            visited.insert(next);
            let ok = self.extend(next, visited, path, found, limit);
            visited.remove(next);
            path.pop();
            if !ok {
                return false;
            }
        }
        true
    }

    /// Pairs `(a, b)` such that `b` is reachable from `a` through at least
    /// one arc.
    pub fn reachable_pairs(&self) -> BTreeSet<(NodeLabel, NodeLabel)> {
        let mut pairs = BTreeSet::new();
        for start in &self.vertices {
            let mut stack: Vec<&NodeLabel> = vec![start];
            let mut seen = BTreeSet::new();
            while let Some(v) = stack.pop() {
                for &arc in self.arcs_from(v) {
                    let w = &self.arcs[arc].trg;
                    if seen.insert(w) {
                        stack.push(w);
                    }
                }
            }
            pairs.extend(seen.into_iter().map(|w| (start.clone(), w.clone())));
        }
        pairs
    }
}
