//! Equal-length refinements of a model graph.
//!
//! Refining by a granularity `h` that divides every edge length subdivides
//! each edge into segments of length `h`. The refined vertices are exactly the
//! points of the metric graph lying on the `h`-grid. Chip-firing on the
//! refined graph treats it as a combinatorial graph with unit edges; the
//! factor `h` only reappears when converting slopes of piecewise-linear
//! functions.

use std::collections::{HashMap, VecDeque};

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, MetricPoint, ModelGraph, VertexId};

/// A model graph together with its refinement at a fixed granularity.
///
/// Grid vertex `i` corresponds to the metric point `point(i)`. Vertices of
/// the base graph keep their ids, and interior grid points follow in
/// canonical `(edge, offset)` order, so grid indices sort like points.
#[derive(Debug, Clone)]
pub struct Grid {
    base: ModelGraph,
    granularity: Rational64,
    refined: ModelGraph,
    points: Vec<MetricPoint>,
    index: HashMap<MetricPoint, usize>,
    neighbors: Vec<Vec<usize>>,
}

/// Subdivides every edge of `graph` into pieces of length `granularity`.
pub fn refine(graph: &ModelGraph, granularity: Rational64) -> Result<Grid> {
    if !granularity.is_positive() {
        return Err(Error::InvalidParameter(format!(
            "granularity must be positive, got {granularity}"
        )));
    }
    let mut builder = ModelGraph::builder();
    let mut points = Vec::new();
    for v in graph.vertices() {
        builder.add_vertex(graph.vertex_name(v))?;
        points.push(MetricPoint::Vertex(v));
    }
    let mut segments = Vec::with_capacity(graph.num_edges());
    for (id, edge) in graph.edges() {
        let pieces = edge.length / granularity;
        if !pieces.is_integer() {
            return Err(Error::InvalidGranularity {
                granularity: granularity.to_string(),
                edge: edge.name.clone(),
                length: edge.length.to_string(),
            });
        }
        let pieces = pieces.to_integer() as usize;
        let mut chain = vec![edge.tail];
        for k in 1..pieces {
            let v = builder.add_vertex(format!("{}:{}", edge.name, k))?;
            points.push(MetricPoint::Edge {
                edge: id,
                offset: granularity * Rational64::from(k as i64),
            });
            chain.push(v);
        }
        chain.push(edge.head);
        segments.push((id, chain));
    }
    for (id, chain) in &segments {
        let name = &graph.edge(*id).name;
        for (k, pair) in chain.windows(2).enumerate() {
            builder.add_edge(format!("{}.{}", name, k + 1), pair[0], pair[1], granularity)?;
        }
    }
    let refined = builder.build()?;
    let mut neighbors = vec![Vec::new(); refined.num_vertices()];
    for (_, e) in refined.edges() {
        neighbors[e.tail.0].push(e.head.0);
        neighbors[e.head.0].push(e.tail.0);
    }
    let index = points.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    Ok(Grid {
        base: graph.clone(),
        granularity,
        refined,
        points,
        index,
        neighbors,
    })
}

/// Largest granularity dividing every edge length: the gcd of the lengths.
pub fn common_granularity(graph: &ModelGraph) -> Rational64 {
    graph
        .edges()
        .map(|(_, e)| e.length)
        .reduce(rational_gcd)
        .unwrap_or_else(Rational64::one)
}

/// Largest rational dividing both `a` and `b` an integer number of times.
pub fn rational_gcd(a: Rational64, b: Rational64) -> Rational64 {
    // gcd(a/b, c/d) = gcd(ad, cb) / bd
    let den = a.denom() * b.denom();
    let num = (a.numer() * b.denom()).gcd(&(b.numer() * a.denom()));
    Rational64::new(num, den)
}

impl Grid {
    pub fn base(&self) -> &ModelGraph {
        &self.base
    }

    pub fn refined(&self) -> &ModelGraph {
        &self.refined
    }

    pub fn granularity(&self) -> Rational64 {
        self.granularity
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn genus(&self) -> usize {
        self.refined.genus()
    }

    pub fn point(&self, i: usize) -> MetricPoint {
        self.points[i]
    }

    pub fn points(&self) -> &[MetricPoint] {
        &self.points
    }

    pub fn index_of(&self, p: &MetricPoint) -> Option<usize> {
        self.index.get(p).copied()
    }

    /// Grid index of a base-graph vertex.
    pub fn vertex_index(&self, v: VertexId) -> usize {
        v.0
    }

    /// Neighbours of grid vertex `i`, repeated once per connecting edge.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    /// Grid indices of the points on base edge `e`, from tail to head.
    pub fn edge_points(&self, e: EdgeId) -> Vec<usize> {
        let edge = self.base.edge(e);
        let mut out = vec![edge.tail.0];
        let pieces = (edge.length / self.granularity).to_integer();
        for k in 1..pieces {
            let p = MetricPoint::Edge {
                edge: e,
                offset: self.granularity * Rational64::from(k),
            };
            out.push(self.index[&p]);
        }
        out.push(edge.head.0);
        out
    }

    /// Hop distances from `source` in the refined graph.
    pub fn hops_from(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.len()];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            for &u in &self.neighbors[v] {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        dist
    }
}
