//! Simple undirected graphs on factor indices with prime-labelled edges.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::prime::Prime;

/// Vertices are `0..vertex_count`; rendered 1-based. Each edge `(i, j)` with
/// `i < j` carries the non-empty set of primes inducing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledGraph {
    vertex_count: usize,
    edges: BTreeMap<(usize, usize), BTreeSet<Prime>>,
}

impl LabeledGraph {
    pub fn new(vertex_count: usize) -> Self {
        Self {
            vertex_count,
            edges: BTreeMap::new(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Adds `p` to the label of edge `{i, j}`. Loops are ignored.
    pub fn add_edge(&mut self, i: usize, j: usize, p: Prime) {
        assert!(i < self.vertex_count && j < self.vertex_count, "vertex out of range");
        if i == j {
            return;
        }
        let key = (i.min(j), i.max(j));
        self.edges.entry(key).or_default().insert(p);
    }

    pub fn edges(&self) -> &BTreeMap<(usize, usize), BTreeSet<Prime>> {
        &self.edges
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains_key(&(i.min(j), i.max(j)))
    }

    pub fn label(&self, i: usize, j: usize) -> Option<&BTreeSet<Prime>> {
        self.edges.get(&(i.min(j), i.max(j)))
    }

    /// Components as sorted vertex lists, ordered by their smallest vertex.
    pub fn connected_components(&self) -> Result<Vec<Vec<usize>>> {
        if self.vertex_count == 0 {
            return Err(Error::Precondition("graph has no vertices".into()));
        }
        let mut adj = vec![Vec::new(); self.vertex_count];
        for &(i, j) in self.edges.keys() {
            adj[i].push(j);
            adj[j].push(i);
        }
        let mut seen = vec![false; self.vertex_count];
        let mut out = Vec::new();
        for start in 0..self.vertex_count {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut comp = Vec::new();
            while let Some(v) = stack.pop() {
                comp.push(v);
                for &u in &adj[v] {
                    if !seen[u] {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        Ok(out)
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().is_ok_and(|c| c.len() == 1)
    }

    /// DOT rendering: nodes in index order, edges in lexicographic order,
    /// each edge labelled with its comma-joined primes.
    pub fn to_dot(&self, name: &str, names: &[String]) -> String {
        let mut s = format!("graph {name} {{\n");
        for v in 0..self.vertex_count {
            let label = names.get(v).map(String::as_str).unwrap_or("");
            s.push_str(&format!("  {} [label=\"{}\"];\n", v + 1, escape(label)));
        }
        for ((i, j), primes) in &self.edges {
            let label = primes.iter().map(Prime::to_string).collect::<Vec<_>>().join(",");
            s.push_str(&format!("  {} -- {} [label=\"{}\"];\n", i + 1, j + 1, label));
        }
        s.push_str("}\n");
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}
