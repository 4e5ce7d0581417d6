//! Model graphs with exact rational edge lengths.
//!
//! A [`ModelGraph`] is a finite connected multigraph without self-loops whose
//! edges carry positive rational lengths. It stands for the metric graph
//! obtained by identifying every edge with a segment of that length; points of
//! the metric graph are [`MetricPoint`]s.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use num_rational::Rational64;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub name: String,
    pub tail: VertexId,
    pub head: VertexId,
    pub length: Rational64,
}

/// A point of the metric graph.
///
/// Points are kept in canonical form: an offset of `0` or of the full edge
/// length is always represented by the corresponding endpoint vertex, so two
/// equal points compare equal. Use [`ModelGraph::point`] to build edge points.
///
/// The derived order is the canonical point order: vertices by id first, then
/// interior points by `(edge, offset)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MetricPoint {
    Vertex(VertexId),
    Edge { edge: EdgeId, offset: Rational64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelGraph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    vertex_index: HashMap<String, VertexId>,
    edge_index: HashMap<String, EdgeId>,
}

#[derive(Debug, Default)]
pub struct GraphBuilder {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    vertex_index: HashMap<String, VertexId>,
    edge_index: HashMap<String, EdgeId>,
}

impl GraphBuilder {
    pub fn add_vertex(&mut self, name: impl Into<String>) -> Result<VertexId> {
        let name = name.into();
        check_name(&name)?;
        if self.vertex_index.contains_key(&name) {
            return Err(Error::InvalidGraph(format!("duplicate vertex `{name}`")));
        }
        let id = VertexId(self.vertices.len());
        self.vertex_index.insert(name.clone(), id);
        self.vertices.push(name);
        Ok(id)
    }

    pub fn add_edge(
        &mut self,
        name: impl Into<String>,
        tail: VertexId,
        head: VertexId,
        length: Rational64,
    ) -> Result<EdgeId> {
        let name = name.into();
        check_name(&name)?;
        if self.edge_index.contains_key(&name) {
            return Err(Error::InvalidGraph(format!("duplicate edge `{name}`")));
        }
        if tail.0 >= self.vertices.len() || head.0 >= self.vertices.len() {
            return Err(Error::InvalidGraph(format!("edge `{name}` has an unknown endpoint")));
        }
        if tail == head {
            return Err(Error::InvalidGraph(format!("edge `{name}` is a self-loop")));
        }
        if !length.is_positive() {
            return Err(Error::InvalidGraph(format!(
                "edge `{name}` has nonpositive length {length}"
            )));
        }
        let id = EdgeId(self.edges.len());
        self.edge_index.insert(name.clone(), id);
        self.edges.push(Edge {
            name,
            tail,
            head,
            length,
        });
        Ok(id)
    }

    pub fn vertex_id(&self, name: &str) -> Option<VertexId> {
        self.vertex_index.get(name).copied()
    }

    /// Finishes the graph. Fails if it is empty or disconnected.
    pub fn build(self) -> Result<ModelGraph> {
        if self.vertices.is_empty() {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        let graph = ModelGraph {
            vertices: self.vertices,
            edges: self.edges,
            vertex_index: self.vertex_index,
            edge_index: self.edge_index,
        };
        if !graph.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(graph)
    }
}

fn check_name(name: &str) -> Result<()> {
    if name.is_empty() || name.chars().any(|c| c.is_whitespace() || c == '#') {
        return Err(Error::InvalidGraph(format!("bad name `{name}`")));
    }
    Ok(())
}

impl ModelGraph {
    pub fn builder() -> GraphBuilder {
        GraphBuilder::default()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertices[v.0]
    }

    pub fn vertex_id(&self, name: &str) -> Option<VertexId> {
        self.vertex_index.get(name).copied()
    }

    pub fn edge_id(&self, name: &str) -> Option<EdgeId> {
        self.edge_index.get(name).copied()
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e.0]
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = (EdgeId, &Edge)> {
        self.edges.iter().enumerate().map(|(i, e)| (EdgeId(i), e))
    }

    pub fn vertices(&self) -> impl ExactSizeIterator<Item = VertexId> {
        (0..self.vertices.len()).map(VertexId)
    }

    /// Number of edge ends at `v`.
    pub fn degree(&self, v: VertexId) -> usize {
        self.edges
            .iter()
            .map(|e| usize::from(e.tail == v) + usize::from(e.head == v))
            .sum()
    }

    /// First Betti number `|E| - |V| + 1`.
    pub fn genus(&self) -> usize {
        // connected, so |E| >= |V| - 1
        self.edges.len() + 1 - self.vertices.len()
    }

    fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        let mut adj = vec![Vec::new(); n];
        for e in &self.edges {
            adj[e.tail.0].push(e.head.0);
            adj[e.head.0].push(e.tail.0);
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &u in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// The canonical point at distance `offset` from the tail of `edge`.
    pub fn point(&self, edge: EdgeId, offset: Rational64) -> Result<MetricPoint> {
        let e = self
            .edges
            .get(edge.0)
            .ok_or_else(|| Error::InvalidInput(format!("unknown edge id {}", edge.0)))?;
        if offset.is_negative() || offset > e.length {
            return Err(Error::InvalidInput(format!(
                "offset {offset} outside edge `{}` of length {}",
                e.name, e.length
            )));
        }
        Ok(if offset.is_zero() {
            MetricPoint::Vertex(e.tail)
        } else if offset == e.length {
            MetricPoint::Vertex(e.head)
        } else {
            MetricPoint::Edge { edge, offset }
        })
    }

    /// Human-readable name of a point: a vertex name or `edge@offset`.
    pub fn point_label(&self, p: &MetricPoint) -> String {
        match p {
            MetricPoint::Vertex(v) => self.vertex_name(*v).to_string(),
            MetricPoint::Edge { edge, offset } => {
                format!("{}@{}", self.edge(*edge).name, offset)
            }
        }
    }

    /// Shortest-path distance between two points of the metric graph.
    pub fn distance(&self, a: &MetricPoint, b: &MetricPoint) -> Rational64 {
        let n = self.vertices.len();
        let mut dist: Vec<Option<Rational64>> = vec![None; n];
        match *a {
            MetricPoint::Vertex(v) => dist[v.0] = Some(Rational64::zero()),
            MetricPoint::Edge { edge, offset } => {
                let e = self.edge(edge);
                dist[e.tail.0] = Some(offset);
                dist[e.head.0] = Some(e.length - offset);
            }
        }
        // Dense Dijkstra; graphs here are small.
        let mut done = vec![false; n];
        loop {
            let next = (0..n)
                .filter(|&v| !done[v])
                .filter_map(|v| dist[v].map(|d| (d, v)))
                .min();
            let Some((d, v)) = next else { break };
            done[v] = true;
            for e in &self.edges {
                let other = if e.tail.0 == v {
                    e.head.0
                } else if e.head.0 == v {
                    e.tail.0
                } else {
                    continue;
                };
                let candidate = d + e.length;
                if dist[other].is_none_or(|old| candidate < old) {
                    dist[other] = Some(candidate);
                }
            }
        }
        let to_vertex = |v: VertexId| dist[v.0].expect("graph is connected");
        match *b {
            MetricPoint::Vertex(v) => to_vertex(v),
            MetricPoint::Edge { edge, offset } => {
                let e = self.edge(edge);
                let mut best = (to_vertex(e.tail) + offset).min(to_vertex(e.head) + e.length - offset);
                if let MetricPoint::Edge {
                    edge: edge_a,
                    offset: offset_a,
                } = *a
                {
                    if edge_a == edge {
                        best = best.min((offset - offset_a).abs());
                    }
                }
                best
            }
        }
    }

    /// Parses the line-based text format (`vertex <name>` and
    /// `edge <name> <tail> <head> <num>/<den>`; `#` starts a comment).
    pub fn parse(text: &str) -> Result<Self> {
        let mut builder = ModelGraph::builder();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = content.split_whitespace().collect();
            let parse_err = |message: String| Error::Parse { line, message };
            match tokens.as_slice() {
                [] => {}
                ["vertex", name] => {
                    builder.add_vertex(*name).map_err(|e| parse_err(e.to_string()))?;
                }
                ["edge", name, tail, head, len] => {
                    let lookup = |v: &str| {
                        builder
                            .vertex_id(v)
                            .ok_or_else(|| parse_err(format!("unknown vertex `{v}`")))
                    };
                    let (tail, head) = (lookup(tail)?, lookup(head)?);
                    let length = parse_rational(len).map_err(parse_err)?;
                    builder
                        .add_edge(*name, tail, head, length)
                        .map_err(|e| parse_err(e.to_string()))?;
                }
                _ => return Err(parse_err(format!("unrecognized declaration `{}`", content.trim()))),
            }
        }
        builder.build()
    }

    /// Writes the text format read by [`ModelGraph::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for name in &self.vertices {
            out.push_str(&format!("vertex {name}\n"));
        }
        for e in &self.edges {
            out.push_str(&format!(
                "edge {} {} {} {}\n",
                e.name,
                self.vertex_name(e.tail),
                self.vertex_name(e.head),
                format_rational(&e.length)
            ));
        }
        out
    }

    /// Sub-graph spanned by the given edges (and their endpoints), with
    /// vertices renumbered in order of first appearance. Returns the new graph
    /// plus the vertex map old -> new.
    pub fn edge_subgraph(&self, edges: &[EdgeId]) -> Result<(ModelGraph, HashMap<VertexId, VertexId>)> {
        let mut builder = ModelGraph::builder();
        let mut map = HashMap::new();
        let mut vertices: Vec<VertexId> = edges
            .iter()
            .flat_map(|&e| [self.edge(e).tail, self.edge(e).head])
            .collect();
        vertices.sort();
        vertices.dedup();
        for v in vertices {
            map.insert(v, builder.add_vertex(self.vertex_name(v))?);
        }
        for &e in edges {
            let edge = self.edge(e);
            builder.add_edge(edge.name.clone(), map[&edge.tail], map[&edge.head], edge.length)?;
        }
        Ok((builder.build()?, map))
    }
}

impl fmt::Display for ModelGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Parses `a/b` or a bare integer `a`.
pub fn parse_rational(s: &str) -> std::result::Result<Rational64, String> {
    let bad = || format!("malformed rational `{s}`");
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (
            n.parse::<i64>().map_err(|_| bad())?,
            d.parse::<i64>().map_err(|_| bad())?,
        ),
        None => (s.parse::<i64>().map_err(|_| bad())?, 1),
    };
    if den == 0 {
        return Err(format!("zero denominator in `{s}`"));
    }
    Ok(Rational64::new(num, den))
}

/// Always `num/den`, reduced.
pub fn format_rational(r: &Rational64) -> String {
    format!("{}/{}", r.numer(), r.denom())
}
