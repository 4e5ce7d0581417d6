#![allow(dead_code)]

use chipfire::{Divisor, Grid, ModelGraph, Rational64, VertexId};
use proptest::prelude::*;

/// Shape of a random connected multigraph: a spanning tree given by parent
/// choices plus a few extra edges, all with lengths in half-units.
#[derive(Debug, Clone)]
pub struct GraphShape {
    pub parents: Vec<usize>,
    pub tree_lengths: Vec<i64>,
    pub extra: Vec<(usize, usize, i64)>,
}

impl GraphShape {
    pub fn build(&self) -> ModelGraph {
        let n = self.parents.len() + 1;
        let mut b = ModelGraph::builder();
        for i in 0..n {
            b.add_vertex(format!("x{i}")).unwrap();
        }
        let half = |k: i64| Rational64::new(k, 2);
        for (i, (&p, &len)) in self.parents.iter().zip(&self.tree_lengths).enumerate() {
            let child = i + 1;
            b.add_edge(format!("t{child}"), VertexId(p % child), VertexId(child), half(len))
                .unwrap();
        }
        for (k, &(a, c, len)) in self.extra.iter().enumerate() {
            let (a, c) = (a % n, c % n);
            if a != c {
                b.add_edge(format!("e{k}"), VertexId(a), VertexId(c), half(len)).unwrap();
            }
        }
        b.build().unwrap()
    }
}

/// Graphs with `2..=max_vertices` vertices, at most `max_extra` extra edges,
/// and edge lengths `k/2` for `k` in `1..=max_half_units`.
pub fn graph_shape(max_vertices: usize, max_extra: usize, max_half_units: i64) -> impl Strategy<Value = GraphShape> {
    (2..=max_vertices).prop_flat_map(move |n| {
        (
            prop::collection::vec(0..n, n - 1),
            prop::collection::vec(1..=max_half_units, n - 1),
            prop::collection::vec((0..n, 0..n, 1..=max_half_units), 0..=max_extra),
        )
            .prop_map(|(parents, tree_lengths, extra)| GraphShape {
                parents,
                tree_lengths,
                extra,
            })
    })
}

/// Divisor on the grid from `(index, count)` pairs taken modulo its size.
pub fn grid_divisor(grid: &Grid, chips: &[(usize, i64)]) -> Divisor {
    Divisor::from_chips(chips.iter().map(|&(i, n)| (grid.point(i % grid.len()), n)))
}

/// `d` after firing each grid vertex `script[i]` times.
pub fn fire(grid: &Grid, d: &Divisor, script: &[i64]) -> Divisor {
    let mut cfg = grid.to_config(d).unwrap();
    for (v, &k) in script.iter().enumerate() {
        for &u in grid.neighbors(v) {
            cfg[v] -= k;
            cfg[u] += k;
        }
    }
    grid.to_divisor(&cfg)
}
