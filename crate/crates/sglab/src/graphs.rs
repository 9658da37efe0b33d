//! Directed graphs with generator labels: the combinatorial skeletons that
//! resolutions and the S_n calculus share. A graph is *folded* when no vertex
//! has two outgoing (or two incoming) edges with the same label.

use std::collections::HashMap;

use crate::words::Letter;
use crate::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct LabeledEdge {
    pub source: usize,
    pub target: usize,
    /// Generator index: `a_i → 2(i−1)`, `b_i → 2(i−1)+1`.
    pub label: usize,
}

/// A finite directed multigraph with edges labeled by the `2g` generators.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LabeledGraph {
    genus: usize,
    v: usize,
    edges: Vec<LabeledEdge>,
}

impl LabeledGraph {
    pub fn new(genus: usize, v: usize, mut edges: Vec<LabeledEdge>) -> Result<LabeledGraph> {
        for e in &edges {
            if e.source >= v || e.target >= v || e.label >= 2 * genus {
                return Err(Error::Precondition(format!("edge out of range: {e:?}")));
            }
        }
        edges.sort_by_key(|e| (e.label, e.source, e.target));
        edges.dedup();
        Ok(LabeledGraph { genus, v, edges })
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn edges(&self) -> &[LabeledEdge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// `e_f` for each of the `2g` labels.
    pub fn label_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; 2 * self.genus];
        for e in &self.edges {
            counts[e.label] += 1;
        }
        counts
    }

    pub fn is_folded(&self) -> bool {
        let mut out_seen = std::collections::HashSet::new();
        let mut in_seen = std::collections::HashSet::new();
        for e in &self.edges {
            if !out_seen.insert((e.source, e.label)) || !in_seen.insert((e.target, e.label)) {
                return false;
            }
        }
        true
    }

    /// The unique outgoing `label`-edge at `v`, if any (meaningful when folded).
    pub fn out_edge(&self, v: usize, label: usize) -> Option<&LabeledEdge> {
        self.edges.iter().find(|e| e.source == v && e.label == label)
    }

    pub fn in_edge(&self, v: usize, label: usize) -> Option<&LabeledEdge> {
        self.edges.iter().find(|e| e.target == v && e.label == label)
    }

    /// Connected components (ignoring direction), as vertex lists.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
        for e in &self.edges {
            adj.entry(e.source).or_default().push(e.target);
            adj.entry(e.target).or_default().push(e.source);
        }
        let mut seen = vec![false; self.v];
        let mut comps = Vec::new();
        for start in 0..self.v {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut stack = vec![start];
            while let Some(u) = stack.pop() {
                for &w in adj.get(&u).into_iter().flatten() {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    pub fn label_letter(&self, label: usize) -> Letter {
        Letter::new(label as u8, false)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "genus": self.genus,
            "vertices": self.v,
            "edges": self
                .edges
                .iter()
                .map(|e| serde_json::json!([e.source, e.target, e.label]))
                .collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<LabeledGraph> {
        let bad = |m: &str| Error::Parse(format!("labeled graph JSON: {m}"));
        let genus = v["genus"].as_u64().ok_or_else(|| bad("genus"))? as usize;
        let nv = v["vertices"].as_u64().ok_or_else(|| bad("vertices"))? as usize;
        let mut edges = Vec::new();
        for e in v["edges"].as_array().ok_or_else(|| bad("edges"))? {
            let a = e.as_array().filter(|a| a.len() == 3).ok_or_else(|| bad("edge"))?;
            let get = |i: usize| a[i].as_u64().map(|x| x as usize).ok_or_else(|| bad("edge"));
            edges.push(LabeledEdge { source: get(0)?, target: get(1)?, label: get(2)? });
        }
        LabeledGraph::new(genus, nv, edges)
    }
}
