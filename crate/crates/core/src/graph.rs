//! Finite metric graphs and their universal covers.
//!
//! A [`MetricGraph`] is a connected graph with positive rational edge
//! lengths and minimum valence three.  Its universal cover is a simplicial
//! tree on which the free fundamental group acts by deck transformations;
//! everything downstream (boundary measures, flows, cross-ratios) is
//! computed on that tree.
//!
//! Directed edges are indexed `2e` (forward) and `2e + 1` (backward), so the
//! reversal involution is `d ^ 1`.  A spanning tree is chosen at load time;
//! the complement edges are the free generators of the deck group, and a
//! vertex of the cover is addressed as (group element, quotient vertex).

use std::fmt;

use num::Signed;
use serde::Deserialize;

use crate::rat::{parse_length, Rat};

/// Index of a directed edge: `2 * edge + orientation`.
pub type DirEdge = usize;

/// One undirected edge of the quotient graph.
#[derive(Clone, Debug)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub len: Rat,
}

/// Errors raised while loading or normalizing a graph file.
#[derive(Debug, thiserror::Error)]
pub enum GraphError {
    #[error("cannot read graph file: {0}")]
    Io(String),
    #[error("malformed graph file: {0}")]
    Parse(String),
    #[error("graph constraint violated: {0}")]
    Constraint(String),
}

#[derive(Deserialize)]
struct GraphFile {
    vertices: usize,
    edges: Vec<EdgeFile>,
}

#[derive(Deserialize)]
struct EdgeFile {
    from: usize,
    to: usize,
    len: serde_json::Value,
}

/// A finite metric graph, normalized (connected, valence >= 3 everywhere)
/// with a chosen spanning tree.
#[derive(Clone)]
pub struct MetricGraph {
    vertex_count: usize,
    edges: Vec<Edge>,
    /// True if the file used decimal literals; downstream arithmeticity
    /// verdicts are then only approximate.
    inexact: bool,
    tree_edge: Vec<bool>,
    /// Non-tree edge ids in order; generator `g` crosses `generators[g]`.
    generators: Vec<usize>,
    gen_of_edge: Vec<Option<usize>>,
    out: Vec<Vec<DirEdge>>,
    /// Directed tree edge from the parent of `v` into `v` (base has none).
    parent_edge: Vec<Option<DirEdge>>,
    min_len: Rat,
    max_len: Rat,
}

impl MetricGraph {
    /// Builds and normalizes a graph from explicit data.
    pub fn new(vertices: usize, edges: Vec<Edge>, inexact: bool) -> Result<Self, GraphError> {
        normalize(vertices, edges, inexact)
    }

    /// A rose: one vertex with `lens.len()` loops.
    pub fn rose(lens: &[Rat]) -> Self {
        let edges = lens
            .iter()
            .map(|l| Edge {
                u: 0,
                v: 0,
                len: l.clone(),
            })
            .collect();
        MetricGraph::new(1, edges, false).expect("rose is always valid")
    }

    /// Parses the JSON graph format:
    /// `{"vertices": N, "edges": [{"from": i, "to": j, "len": "p/q"}, ...]}`.
    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let file: GraphFile =
            serde_json::from_str(text).map_err(|e| GraphError::Parse(e.to_string()))?;
        let mut inexact = false;
        let mut edges = Vec::new();
        for e in &file.edges {
            if e.from >= file.vertices || e.to >= file.vertices {
                return Err(GraphError::Parse(format!(
                    "edge ({}, {}) out of range for {} vertices",
                    e.from, e.to, file.vertices
                )));
            }
            let literal = match &e.len {
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Number(n) => n.to_string(),
                other => {
                    return Err(GraphError::Parse(format!("bad length literal {other}")));
                }
            };
            let (len, was_decimal) = parse_length(&literal).map_err(GraphError::Parse)?;
            inexact |= was_decimal;
            edges.push(Edge {
                u: e.from,
                v: e.to,
                len,
            });
        }
        MetricGraph::new(file.vertices, edges, inexact)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, GraphError> {
        let text = std::fs::read_to_string(path).map_err(|e| GraphError::Io(e.to_string()))?;
        MetricGraph::from_json(&text)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn inexact(&self) -> bool {
        self.inexact
    }

    /// Rank of the free deck group: |E| - |V| + 1.
    pub fn rank(&self) -> usize {
        self.edges.len() - self.vertex_count + 1
    }

    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    /// The quotient vertex over which the fixed base vertex of the cover sits.
    pub fn base_vertex(&self) -> usize {
        0
    }

    pub fn dir_edge_count(&self) -> usize {
        2 * self.edges.len()
    }

    pub fn edge_of(&self, d: DirEdge) -> usize {
        d / 2
    }

    pub fn rev(&self, d: DirEdge) -> DirEdge {
        d ^ 1
    }

    pub fn tail(&self, d: DirEdge) -> usize {
        let e = &self.edges[d / 2];
        if d % 2 == 0 {
            e.u
        } else {
            e.v
        }
    }

    pub fn head(&self, d: DirEdge) -> usize {
        self.tail(d ^ 1)
    }

    pub fn len(&self, d: DirEdge) -> &Rat {
        &self.edges[d / 2].len
    }

    pub fn min_edge_len(&self) -> &Rat {
        &self.min_len
    }

    pub fn max_edge_len(&self) -> &Rat {
        &self.max_len
    }

    pub fn is_tree_edge(&self, d: DirEdge) -> bool {
        self.tree_edge[d / 2]
    }

    /// Generator index of a non-tree directed edge, with its sign: crossing
    /// `2e` is the positive letter, `2e + 1` the inverse.
    pub fn generator_of(&self, d: DirEdge) -> Option<(usize, bool)> {
        self.gen_of_edge[d / 2].map(|g| (g, d % 2 == 1))
    }

    /// Directed edge crossed by generator `g` (with `inverse` orientation).
    pub fn dir_edge_of_generator(&self, g: usize, inverse: bool) -> DirEdge {
        2 * self.generators[g] + usize::from(inverse)
    }

    /// Directed edges leaving `v`.
    pub fn out_edges(&self, v: usize) -> &[DirEdge] {
        &self.out[v]
    }

    /// Valence of `v` (loops count twice).
    pub fn valence(&self, v: usize) -> usize {
        self.out[v].len()
    }

    /// Directed edges admissible after `d`: same vertex, not the reversal.
    pub fn successors(&self, d: DirEdge) -> impl Iterator<Item = DirEdge> + '_ {
        let rev = d ^ 1;
        self.out[self.head(d)].iter().copied().filter(move |&f| f != rev)
    }

    /// Unique reduced edge path between two vertices inside the spanning tree.
    pub fn tree_path(&self, from: usize, to: usize) -> Vec<DirEdge> {
        if from == to {
            return Vec::new();
        }
        let up_a = self.path_to_root(from);
        let up_b = self.path_to_root(to);
        // Strip the shared tail (edges near the root).
        let mut i = up_a.len();
        let mut j = up_b.len();
        while i > 0 && j > 0 && up_a[i - 1] == up_b[j - 1] {
            i -= 1;
            j -= 1;
        }
        let mut path: Vec<DirEdge> = up_a[..i].to_vec();
        path.extend(up_b[..j].iter().rev().map(|&d| d ^ 1));
        path
    }

    /// Sum of edge lengths along the spanning-tree path.
    pub fn tree_path_len(&self, from: usize, to: usize) -> Rat {
        self.tree_path(from, to)
            .iter()
            .map(|&d| self.len(d))
            .sum()
    }

    fn path_to_root(&self, mut v: usize) -> Vec<DirEdge> {
        let mut path = Vec::new();
        while let Some(pe) = self.parent_edge[v] {
            path.push(pe ^ 1);
            v = self.tail(pe);
        }
        path
    }

    /// Display name of a directed edge: letters by edge index, uppercase for
    /// the reversed orientation.
    pub fn edge_name(&self, d: DirEdge) -> String {
        let e = d / 2;
        if e < 26 {
            let base = b'a' + e as u8;
            let ch = if d % 2 == 0 {
                base as char
            } else {
                (base - b'a' + b'A') as char
            };
            ch.to_string()
        } else if d % 2 == 0 {
            format!("e{e}+")
        } else {
            format!("e{e}-")
        }
    }
}

impl fmt::Debug for MetricGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "MetricGraph(V={}, E={}, rank={})",
            self.vertex_count,
            self.edges.len(),
            self.rank()
        )
    }
}

/// Merges valence-2 vertices, rejects valence <= 1 and disconnected input,
/// then fixes the spanning tree and generator labelling.
fn normalize(vertices: usize, edges: Vec<Edge>, inexact: bool) -> Result<MetricGraph, GraphError> {
    if vertices == 0 || edges.is_empty() {
        return Err(GraphError::Constraint("graph is empty".to_string()));
    }
    for e in &edges {
        if !e.len.is_positive() {
            return Err(GraphError::Constraint(format!(
                "edge ({}, {}) has non-positive length",
                e.u, e.v
            )));
        }
    }

    // Half-edge structure for the merge pass.
    let mut ends: Vec<Vec<(usize, usize)>> = vec![Vec::new(); vertices]; // (edge id, side)
    let mut work: Vec<Option<Edge>> = edges.into_iter().map(Some).collect();
    for (i, e) in work.iter().enumerate() {
        let e = e.as_ref().unwrap();
        ends[e.u].push((i, 0));
        ends[e.v].push((i, 1));
    }

    loop {
        let candidate = (0..vertices).find(|&v| ends[v].len() == 2);
        let Some(v) = candidate else { break };
        let (e1, s1) = ends[v][0];
        let (e2, s2) = ends[v][1];
        if e1 == e2 {
            // A bare loop component: its quotient is a circle, which has no
            // valence-3 form and falls outside the model.
            return Err(GraphError::Constraint(format!(
                "vertex {v} carries an isolated loop (circle component)"
            )));
        }
        let a = {
            let e = work[e1].as_ref().unwrap();
            if s1 == 0 {
                e.v
            } else {
                e.u
            }
        };
        let b = {
            let e = work[e2].as_ref().unwrap();
            if s2 == 0 {
                e.v
            } else {
                e.u
            }
        };
        let len = work[e1].as_ref().unwrap().len.clone() + work[e2].as_ref().unwrap().len.clone();
        // Replace e1 by the merged edge a--b; retire e2; detach v.
        ends[v].clear();
        let detach = |ends: &mut Vec<Vec<(usize, usize)>>, w: usize, e: usize| {
            ends[w].retain(|&(id, _)| id != e);
        };
        detach(&mut ends, a, e1);
        detach(&mut ends, b, e2);
        work[e1] = Some(Edge {
            u: a,
            v: b,
            len,
        });
        work[e2] = None;
        ends[a].push((e1, 0));
        ends[b].push((e1, 1));
    }

    // Renumber surviving vertices in input order.
    let mut keep: Vec<Edge> = Vec::new();
    for e in work.into_iter().flatten() {
        keep.push(e);
    }
    let mut used = vec![false; vertices];
    for e in &keep {
        used[e.u] = true;
        used[e.v] = true;
    }
    let mut remap = vec![usize::MAX; vertices];
    let mut next = 0;
    for v in 0..vertices {
        if used[v] {
            remap[v] = next;
            next += 1;
        }
    }
    let vertex_count = next;
    let edges: Vec<Edge> = keep
        .into_iter()
        .map(|e| Edge {
            u: remap[e.u],
            v: remap[e.v],
            len: e.len,
        })
        .collect();

    let mut out: Vec<Vec<DirEdge>> = vec![Vec::new(); vertex_count];
    for (i, e) in edges.iter().enumerate() {
        out[e.u].push(2 * i);
        out[e.v].push(2 * i + 1);
    }
    if let Some(v) = (0..vertex_count).find(|&v| out[v].len() < 3) {
        return Err(GraphError::Constraint(format!(
            "vertex {v} has valence {} < 3 after normalization",
            out[v].len()
        )));
    }

    // BFS spanning tree from vertex 0 (loops are never tree edges).
    let mut tree_edge = vec![false; edges.len()];
    let mut parent_edge: Vec<Option<DirEdge>> = vec![None; vertex_count];
    let mut seen = vec![false; vertex_count];
    seen[0] = true;
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        for &d in &out[v] {
            let e = d / 2;
            let w = if d % 2 == 0 { edges[e].v } else { edges[e].u };
            if !seen[w] {
                seen[w] = true;
                tree_edge[e] = true;
                parent_edge[w] = Some(d);
                queue.push_back(w);
            }
        }
    }
    if seen.iter().any(|&s| !s) {
        return Err(GraphError::Constraint("graph is not connected".to_string()));
    }

    let mut generators = Vec::new();
    let mut gen_of_edge = vec![None; edges.len()];
    for (i, is_tree) in tree_edge.iter().enumerate() {
        if !is_tree {
            gen_of_edge[i] = Some(generators.len());
            generators.push(i);
        }
    }

    let min_len = edges
        .iter()
        .map(|e| e.len.clone())
        .min()
        .expect("nonempty");
    let max_len = edges
        .iter()
        .map(|e| e.len.clone())
        .max()
        .expect("nonempty");

    Ok(MetricGraph {
        vertex_count,
        edges,
        inexact,
        tree_edge,
        generators,
        gen_of_edge,
        out,
        parent_edge,
        min_len,
        max_len,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, ratio};

    #[test]
    fn rose_structure() {
        let g = MetricGraph::rose(&[rat(1), rat(1)]);
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.rank(), 2);
        assert_eq!(g.generator_count(), 2);
        assert_eq!(g.valence(0), 4);
        let succ: Vec<_> = g.successors(0).collect();
        assert_eq!(succ.len(), 3);
        assert!(!succ.contains(&1));
    }

    #[test]
    fn valence_two_vertices_are_merged() {
        // A rose with both loops subdivided once: 3 vertices, 4 edges.
        let edges = vec![
            Edge { u: 0, v: 1, len: rat(1) },
            Edge { u: 1, v: 0, len: rat(1) },
            Edge { u: 0, v: 2, len: ratio(1, 2) },
            Edge { u: 2, v: 0, len: ratio(3, 2) },
        ];
        let g = MetricGraph::new(3, edges, false).unwrap();
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.edges().len(), 2);
        let mut lens: Vec<Rat> = g.edges().iter().map(|e| e.len.clone()).collect();
        lens.sort();
        assert_eq!(lens, vec![rat(2), rat(2)]);
    }

    #[test]
    fn rejects_bad_input() {
        // Valence 1.
        let edges = vec![
            Edge { u: 0, v: 0, len: rat(1) },
            Edge { u: 0, v: 1, len: rat(1) },
        ];
        assert!(matches!(
            MetricGraph::new(2, edges, false),
            Err(GraphError::Constraint(_))
        ));
        // Circle.
        let edges = vec![Edge { u: 0, v: 0, len: rat(1) }];
        assert!(MetricGraph::new(1, edges, false).is_err());
        // Zero length.
        let edges = vec![
            Edge { u: 0, v: 0, len: rat(0) },
            Edge { u: 0, v: 0, len: rat(1) },
        ];
        assert!(MetricGraph::new(1, edges, false).is_err());
    }

    #[test]
    fn json_round_trip() {
        let g = MetricGraph::from_json(
            r#"{"vertices": 2, "edges": [
                {"from": 0, "to": 1, "len": "1"},
                {"from": 0, "to": 1, "len": "3/2"},
                {"from": 0, "to": 1, "len": "2"}
            ]}"#,
        )
        .unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.rank(), 2);
        assert!(!g.inexact());

        let g = MetricGraph::from_json(
            r#"{"vertices": 1, "edges": [
                {"from": 0, "to": 0, "len": "1"},
                {"from": 0, "to": 0, "len": "1.6180339887"}
            ]}"#,
        )
        .unwrap();
        assert!(g.inexact());
    }

    #[test]
    fn theta_graph_spanning_tree() {
        let edges = vec![
            Edge { u: 0, v: 1, len: rat(1) },
            Edge { u: 0, v: 1, len: rat(1) },
            Edge { u: 0, v: 1, len: rat(1) },
        ];
        let g = MetricGraph::new(2, edges, false).unwrap();
        assert_eq!(g.rank(), 2);
        assert_eq!(g.generator_count(), 2);
        assert_eq!(g.tree_path(1, 0).len(), 1);
        assert_eq!(g.tree_path_len(0, 1), rat(1));
    }
}
