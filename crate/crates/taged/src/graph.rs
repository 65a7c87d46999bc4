//! Directed graphs, walk counting and Hamiltonian path search.
//!
//! A walk of k vertices is a sequence w_1 ... w_k with an edge from each
//! vertex to the next; vertices may repeat. A full walk visits exactly as
//! many vertices as the graph has. A Hamiltonian path is a full walk
//! without repetitions.
//!
//! Walk counts grow like n^n, so they are kept as big integers throughout.
//!
//! The text format:
//!
//! ```text
//! vertices: 1 2 3
//! edge: 1 2
//! edge: 2 3
//! ```

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::textfmt::{content_lines, is_identifier, keyword_and_body};

/// A finite directed graph with named vertices. Self loops are allowed,
/// parallel edges collapse.
#[derive(Debug, Clone)]
pub struct Digraph {
    vertices: BTreeSet<String>,
    edges: BTreeSet<(String, String)>,
    successors: BTreeMap<String, Vec<String>>,
}

impl PartialEq for Digraph {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.edges == other.edges
    }
}

impl Eq for Digraph {}

impl Digraph {
    /// Build a graph. Vertex names must be identifiers, the vertex set must
    /// not be empty, and edge endpoints must be declared vertices.
    pub fn new<SV, SE>(
        vertices: impl IntoIterator<Item = SV>,
        edges: impl IntoIterator<Item = (SE, SE)>,
    ) -> Result<Digraph>
    where
        SV: Into<String>,
        SE: Into<String>,
    {
        let vertices: BTreeSet<String> = vertices.into_iter().map(Into::into).collect();
        if vertices.is_empty() {
            return Err(Error::malformed("graph", "no vertices"));
        }
        for v in &vertices {
            if !is_identifier(v) {
                return Err(Error::malformed("graph", format!("bad vertex name {v:?}")));
            }
        }
        let edges: BTreeSet<(String, String)> = edges
            .into_iter()
            .map(|(a, b)| (a.into(), b.into()))
            .collect();
        for (a, b) in &edges {
            for v in [a, b] {
                if !vertices.contains(v) {
                    return Err(Error::UnknownVertex { vertex: v.clone() });
                }
            }
        }
        let mut successors: BTreeMap<String, Vec<String>> = vertices
            .iter()
            .map(|v| (v.clone(), Vec::new()))
            .collect();
        for (a, b) in &edges {
            successors.get_mut(a).expect("endpoint declared").push(b.clone());
        }
        Ok(Digraph {
            vertices,
            edges,
            successors,
        })
    }

    pub fn vertices(&self) -> &BTreeSet<String> {
        &self.vertices
    }

    pub fn edges(&self) -> &BTreeSet<(String, String)> {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_vertex(&self, v: &str) -> bool {
        self.vertices.contains(v)
    }

    pub fn has_edge(&self, from: &str, to: &str) -> bool {
        self.edges.contains(&(from.to_string(), to.to_string()))
    }

    /// Successors of `v` in name order.
    pub fn successors(&self, v: &str) -> Result<&[String]> {
        self.successors
            .get(v)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownVertex {
                vertex: v.to_string(),
            })
    }

    /// Canonical text form.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("vertices: ");
        out.push_str(&self.vertices.iter().cloned().collect::<Vec<_>>().join(" "));
        out.push('\n');
        for (a, b) in &self.edges {
            out.push_str(&format!("edge: {a} {b}\n"));
        }
        out
    }

    /// Parse the text form. `vertices:` lines may repeat and accumulate.
    pub fn parse_text(text: &str) -> Result<Digraph> {
        let mut vertices: Vec<String> = Vec::new();
        let mut edges: Vec<(String, String)> = Vec::new();
        for (line_no, line) in content_lines(text) {
            let Some((key, body)) = keyword_and_body(line) else {
                return Err(Error::parse(
                    line_no,
                    format!("expected `key: ...`, got {line:?}"),
                ));
            };
            match key {
                "vertices" => {
                    for tok in body.split_whitespace() {
                        if !is_identifier(tok) {
                            return Err(Error::parse(
                                line_no,
                                format!("bad vertex name {tok:?}"),
                            ));
                        }
                        vertices.push(tok.to_string());
                    }
                }
                "edge" => {
                    let toks: Vec<&str> = body.split_whitespace().collect();
                    if toks.len() != 2 {
                        return Err(Error::parse(
                            line_no,
                            format!("edge line needs exactly two vertices, got {}", toks.len()),
                        ));
                    }
                    edges.push((toks[0].to_string(), toks[1].to_string()));
                }
                other => {
                    return Err(Error::parse(line_no, format!("unknown section {other:?}")));
                }
            }
        }
        Digraph::new(vertices, edges).map_err(|e| match e {
            Error::UnknownVertex { vertex } => {
                Error::parse(0, format!("edge mentions undeclared vertex {vertex}"))
            }
            Error::Malformed { detail, .. } => Error::parse(0, detail),
            other => other,
        })
    }
}

/// Walk counts per length and endpoint pair.
///
/// `entry(k, u, v)` is the number of walks of exactly `k` vertices that
/// start at `u` and end at `v`; `k` ranges from 1 (the walk that stands
/// still at `u = v`) to the vertex count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkCountTable {
    vertices: Vec<String>,
    counts: Vec<Vec<Vec<BigUint>>>,
}

impl WalkCountTable {
    /// Fill the table for walk lengths 1 through the vertex count.
    pub fn build(graph: &Digraph) -> WalkCountTable {
        let vertices: Vec<String> = graph.vertices().iter().cloned().collect();
        let n = vertices.len();
        let index: BTreeMap<&str, usize> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.as_str(), i))
            .collect();
        let succ: Vec<Vec<usize>> = vertices
            .iter()
            .map(|v| {
                graph.successors(v).expect("own vertex")
                    .iter()
                    .map(|w| index[w.as_str()])
                    .collect()
            })
            .collect();

        let mut counts: Vec<Vec<Vec<BigUint>>> = Vec::with_capacity(n);
        let mut first = vec![vec![BigUint::zero(); n]; n];
        for (u, row) in first.iter_mut().enumerate() {
            row[u] = BigUint::one();
        }
        counts.push(first);
        for _ in 1..n {
            let prev = counts.last().expect("at least one layer");
            let mut next = vec![vec![BigUint::zero(); n]; n];
            for u in 0..n {
                for &step in &succ[u] {
                    for v in 0..n {
                        let add = prev[step][v].clone();
                        next[u][v] += add;
                    }
                }
            }
            counts.push(next);
        }
        WalkCountTable { vertices, counts }
    }

    /// The number of vertices of a full walk.
    pub fn walk_length(&self) -> usize {
        self.vertices.len()
    }

    /// Walks of exactly `k` vertices from `from` to `to`.
    pub fn entry(&self, k: usize, from: &str, to: &str) -> Result<&BigUint> {
        if k == 0 || k > self.vertices.len() {
            return Err(Error::Domain(format!(
                "walk length {k} is outside 1..={}",
                self.vertices.len()
            )));
        }
        let idx = |v: &str| -> Result<usize> {
            self.vertices
                .binary_search_by(|x| x.as_str().cmp(v))
                .map_err(|_| Error::UnknownVertex {
                    vertex: v.to_string(),
                })
        };
        Ok(&self.counts[k - 1][idx(from)?][idx(to)?])
    }

    /// Total number of stored counts: one per (length, start, end) triple.
    pub fn entry_count(&self) -> usize {
        self.vertices.len().pow(3)
    }

    /// The number of full walks: all endpoint pairs at the full length.
    pub fn full_walk_count(&self) -> BigUint {
        let mut total = BigUint::zero();
        for row in self.counts.last().expect("at least one layer") {
            for c in row {
                total += c;
            }
        }
        total
    }
}

/// The number of walks that visit exactly as many vertices as the graph
/// has.
pub fn count_full_walks(graph: &Digraph) -> BigUint {
    WalkCountTable::build(graph).full_walk_count()
}

/// All full walks in lexicographic order. Refuses to materialize more
/// walks than `limits.max_bucket_terms`.
pub fn full_walks(graph: &Digraph, limits: &Limits) -> Result<Vec<Vec<String>>> {
    let total = count_full_walks(graph);
    let cap = BigUint::from(limits.max_bucket_terms);
    if total > cap {
        return Err(Error::limit("full walks", total, limits.max_bucket_terms));
    }
    let n = graph.vertex_count();
    let mut out = Vec::new();
    let mut walk: Vec<String> = Vec::with_capacity(n);
    for v in graph.vertices() {
        walk.push(v.clone());
        extend_walk(graph, n, &mut walk, &mut out);
        walk.pop();
    }
    Ok(out)
}

fn extend_walk(
    graph: &Digraph,
    n: usize,
    walk: &mut Vec<String>,
    out: &mut Vec<Vec<String>>,
) {
    if walk.len() == n {
        out.push(walk.clone());
        return;
    }
    let last = walk.last().expect("walk starts nonempty").clone();
    for next in graph.successors(&last).expect("own vertex") {
        walk.push(next.clone());
        extend_walk(graph, n, walk, out);
        walk.pop();
    }
}

/// The lexicographically least Hamiltonian path, if one exists.
pub fn hamiltonian_path(graph: &Digraph, limits: &Limits) -> Result<Option<Vec<String>>> {
    if graph.vertex_count() > limits.max_vertices {
        return Err(Error::limit(
            "graph vertices",
            graph.vertex_count(),
            limits.max_vertices,
        ));
    }
    let mut path: Vec<String> = Vec::with_capacity(graph.vertex_count());
    let mut visited: BTreeSet<&str> = BTreeSet::new();
    for v in graph.vertices() {
        path.push(v.clone());
        visited.insert(v);
        if extend_simple(graph, &mut path, &mut visited) {
            return Ok(Some(path));
        }
        visited.remove(v.as_str());
        path.pop();
    }
    Ok(None)
}

fn extend_simple<'g>(
    graph: &'g Digraph,
    path: &mut Vec<String>,
    visited: &mut BTreeSet<&'g str>,
) -> bool {
    if path.len() == graph.vertex_count() {
        return true;
    }
    let last = path.last().expect("path starts nonempty").clone();
    for next in graph.successors(&last).expect("own vertex") {
        if visited.contains(next.as_str()) {
            continue;
        }
        path.push(next.clone());
        visited.insert(next);
        if extend_simple(graph, path, visited) {
            return true;
        }
        visited.remove(next.as_str());
        path.pop();
    }
    false
}

/// The number of Hamiltonian paths.
pub fn count_hamiltonian_paths(graph: &Digraph, limits: &Limits) -> Result<u64> {
    if graph.vertex_count() > limits.max_vertices {
        return Err(Error::limit(
            "graph vertices",
            graph.vertex_count(),
            limits.max_vertices,
        ));
    }
    let mut count = 0u64;
    let mut path: Vec<String> = Vec::with_capacity(graph.vertex_count());
    let mut visited: BTreeSet<&str> = BTreeSet::new();
    for v in graph.vertices() {
        path.push(v.clone());
        visited.insert(v);
        count_simple(graph, &mut path, &mut visited, &mut count);
        visited.remove(v.as_str());
        path.pop();
    }
    Ok(count)
}

fn count_simple<'g>(
    graph: &'g Digraph,
    path: &mut Vec<String>,
    visited: &mut BTreeSet<&'g str>,
    count: &mut u64,
) {
    if path.len() == graph.vertex_count() {
        *count += 1;
        return;
    }
    let last = path.last().expect("path starts nonempty").clone();
    for next in graph.successors(&last).expect("own vertex") {
        if visited.contains(next.as_str()) {
            continue;
        }
        path.push(next.clone());
        visited.insert(next);
        count_simple(graph, path, visited, count);
        visited.remove(next.as_str());
        path.pop();
    }
}
