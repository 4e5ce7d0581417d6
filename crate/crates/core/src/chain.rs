use num_rational::Rational64;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, MetricPoint, ModelGraph, VertexId};

/// The chain of `g` loops.
///
/// Loop `i` (1-based) consists of two edges from `v_{i-1}` to `v_i`: the short
/// edge `I_i` of length `m` and the long edge `J_i` of length `ell`. The
/// vertices `v_1 .. v_{g-1}` are 4-valent and the end vertices `v_0`, `v_g`
/// are 2-valent.
#[derive(Debug, Clone)]
pub struct ChainOfLoops {
    genus: usize,
    ell: Rational64,
    m: Rational64,
    graph: ModelGraph,
    short_edges: Vec<EdgeId>,
    long_edges: Vec<EdgeId>,
}

impl ChainOfLoops {
    pub fn new(genus: usize, ell: Rational64, m: Rational64) -> Result<Self> {
        if genus < 1 {
            return Err(Error::InvalidParameter("chain of loops needs genus >= 1".into()));
        }
        if !ell.is_positive() || !m.is_positive() {
            return Err(Error::InvalidParameter(format!(
                "loop lengths must be positive (ell = {ell}, m = {m})"
            )));
        }
        let mut b = ModelGraph::builder();
        let vertices = (0..=genus)
            .map(|i| b.add_vertex(format!("v_{i}")))
            .collect::<Result<Vec<_>>>()?;
        let mut short_edges = Vec::with_capacity(genus);
        let mut long_edges = Vec::with_capacity(genus);
        for i in 1..=genus {
            short_edges.push(b.add_edge(format!("I_{i}"), vertices[i - 1], vertices[i], m)?);
            long_edges.push(b.add_edge(format!("J_{i}"), vertices[i - 1], vertices[i], ell)?);
        }
        Ok(ChainOfLoops {
            genus,
            ell,
            m,
            graph: b.build()?,
            short_edges,
            long_edges,
        })
    }

    /// `ell = max(2g - 2, 1)` and `m = 1`.
    pub fn with_default_lengths(genus: usize) -> Result<Self> {
        Self::new(genus, Self::default_long_length(genus), Rational64::one())
    }

    pub fn default_long_length(genus: usize) -> Rational64 {
        Rational64::from((2 * genus as i64 - 2).max(1))
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn ell(&self) -> Rational64 {
        self.ell
    }

    pub fn m(&self) -> Rational64 {
        self.m
    }

    pub fn graph(&self) -> &ModelGraph {
        &self.graph
    }

    /// Set when `ell / m < 2g - 2`; lengths that short are not known to be
    /// generic enough for the pencil bijection.
    pub fn length_warning(&self) -> bool {
        self.ell / self.m < Rational64::from(2 * self.genus as i64 - 2)
    }

    /// Vertex `v_i`, `0 <= i <= g`.
    pub fn v(&self, i: usize) -> VertexId {
        assert!(i <= self.genus, "v_{i} out of range");
        VertexId(i)
    }

    pub fn vertex_point(&self, i: usize) -> MetricPoint {
        MetricPoint::Vertex(self.v(i))
    }

    /// Short edge `I_i`, `1 <= i <= g`.
    pub fn short_edge(&self, i: usize) -> EdgeId {
        self.short_edges[i - 1]
    }

    /// Long edge `J_i`, `1 <= i <= g`.
    pub fn long_edge(&self, i: usize) -> EdgeId {
        self.long_edges[i - 1]
    }

    /// Loop (1-based) containing edge `e`.
    pub fn loop_of_edge(&self, e: EdgeId) -> usize {
        e.0 / 2 + 1
    }

    /// Loops `1..=k` as a standalone model graph. Vertex and edge ids of the
    /// result coincide with those of the chain.
    pub fn first_loops(&self, k: usize) -> Result<ModelGraph> {
        assert!((1..=self.genus).contains(&k));
        let edges: Vec<EdgeId> = (1..=k).flat_map(|i| [self.short_edge(i), self.long_edge(i)]).collect();
        Ok(self.graph.edge_subgraph(&edges)?.0)
    }
}
