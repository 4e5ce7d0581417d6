//! The mirror involution of a chain of loops with even genus.
//!
//! `sigma` reverses the chain: `v_i -> v_{g-i}`, a point at offset `x` on
//! `I_i` goes to offset `m - x` on `I_{g+1-i}`, and a point at offset `x` on
//! `J_i` goes to offset `ell - x` on `J_{g+1-i}`. Its only fixed point is
//! `v_{g/2}`.

use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::chain::ChainOfLoops;
use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::firing::PLFunction;
use crate::graph::{MetricPoint, VertexId};
use crate::grid::Grid;
use crate::paths::LatticePath;
use crate::pencil::build_unchecked;

#[derive(Debug, Clone)]
pub struct Involution<'a> {
    chain: &'a ChainOfLoops,
}

impl<'a> Involution<'a> {
    pub fn new(chain: &'a ChainOfLoops) -> Result<Self> {
        if !chain.genus().is_multiple_of(2) {
            return Err(Error::UnsupportedGraph(format!(
                "the mirror involution needs even genus, got {}",
                chain.genus()
            )));
        }
        Ok(Involution { chain })
    }

    pub fn chain(&self) -> &ChainOfLoops {
        self.chain
    }

    pub fn sigma_point(&self, x: &MetricPoint) -> Result<MetricPoint> {
        let g = self.chain.genus();
        let graph = self.chain.graph();
        match *x {
            MetricPoint::Vertex(v) => {
                if v.0 > g {
                    return Err(Error::InvalidInput(format!("unknown vertex id {}", v.0)));
                }
                Ok(MetricPoint::Vertex(VertexId(g - v.0)))
            }
            MetricPoint::Edge { edge, offset } => {
                if edge.0 >= graph.num_edges() {
                    return Err(Error::InvalidInput(format!("unknown edge id {}", edge.0)));
                }
                let i = self.chain.loop_of_edge(edge);
                let mirror = g + 1 - i;
                let (target, length) = if edge == self.chain.short_edge(i) {
                    (self.chain.short_edge(mirror), self.chain.m())
                } else {
                    (self.chain.long_edge(mirror), self.chain.ell())
                };
                graph.point(target, length - offset)
            }
        }
    }

    pub fn sigma_divisor(&self, d: &Divisor) -> Result<Divisor> {
        let mut out = Divisor::zero();
        for (p, n) in d.iter() {
            out.add_chips(self.sigma_point(p)?, n);
        }
        Ok(out)
    }
}

/// Values `f_0, ..., f_g` of the function `f` at `v_0, ..., v_g`:
/// `f_0 = 0`, and `f_i = f_{i-1} + p_{i-1}` after an ascent,
/// `f_i = f_{i-1} + p_i` after a descent.
pub fn f_vertex_values(p: &LatticePath) -> Vec<i64> {
    let mut values = vec![0i64];
    for i in 1..=p.genus() {
        let step = if p.is_ascent(i) { p.height(i - 1) } else { p.height(i) };
        values.push(values[i - 1] + step as i64);
    }
    values
}

/// The piecewise-linear function `f` with
/// `div(f) = sigma(D_{reverse(p)}) - D_p`.
///
/// On loop `i` after an ascent, `f` has slope `p_{i-1}` along `I_i` and along
/// `J_i` is constant up to `ell - p_{i-1}`, then has slope one. After a
/// descent it has slope `p_i` along `I_i` and along `J_i` slope one up to
/// `p_i`, then is constant.
pub fn build_f_function(p: &LatticePath, chain: &ChainOfLoops, grid: &Grid) -> Result<PLFunction> {
    if p.genus() != chain.genus() {
        return Err(Error::InvalidParameter(format!(
            "path has length {} but the chain has genus {}",
            p.genus(),
            chain.genus()
        )));
    }
    if chain.m() != Rational64::one() {
        return Err(Error::UnsupportedGraph(format!(
            "the f-function needs short edges of length 1, got {}",
            chain.m()
        )));
    }
    let ell = chain.ell();
    if ell < Rational64::from(p.degree() as i64) {
        return Err(Error::InvalidParameter(format!(
            "ell = {ell} is shorter than the degree {}",
            p.degree()
        )));
    }
    let h = grid.granularity();
    for i in 1..=p.genus() {
        let breakpoint = if p.is_ascent(i) {
            ell - Rational64::from(p.height(i - 1) as i64)
        } else {
            Rational64::from(p.height(i) as i64)
        };
        if !(breakpoint / h).is_integer() {
            return Err(Error::Precision(format!(
                "breakpoint {breakpoint} on J_{i} is off the {h} grid"
            )));
        }
    }
    let fv = f_vertex_values(p);
    let value = |x: &MetricPoint| -> Rational64 {
        match *x {
            MetricPoint::Vertex(v) => Rational64::from(fv[v.0]),
            MetricPoint::Edge { edge, offset } => {
                let i = chain.loop_of_edge(edge);
                let base = Rational64::from(fv[i - 1]);
                let before = Rational64::from(p.height(i - 1) as i64);
                let after = Rational64::from(p.height(i) as i64);
                let ascent = p.is_ascent(i);
                if edge == chain.short_edge(i) {
                    let slope = if ascent { before } else { after };
                    base + slope * offset
                } else if ascent {
                    base + (offset - (ell - before)).max(Rational64::zero())
                } else {
                    base + offset.min(after)
                }
            }
        }
    };
    Ok(PLFunction::sample(grid, value))
}

/// Whether `|D_p|` is mapped to itself by `sigma`, decided by
/// `D_p ~ sigma(D_p)`.
pub fn is_invariant_pencil(p: &LatticePath, chain: &ChainOfLoops, grid: &Grid) -> Result<bool> {
    let inv = Involution::new(chain)?;
    let d = build_unchecked(p, chain, grid)?.divisor;
    grid.is_equivalent(&d, &inv.sigma_divisor(&d)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::refine;
    use crate::pencil::path_to_divisor;

    fn q(n: i64) -> Rational64 {
        Rational64::from(n)
    }

    #[test]
    fn fixed_point_and_endpoints() {
        let chain = ChainOfLoops::with_default_lengths(6).unwrap();
        let inv = Involution::new(&chain).unwrap();
        assert_eq!(inv.sigma_point(&chain.vertex_point(3)).unwrap(), chain.vertex_point(3));
        assert_eq!(inv.sigma_point(&chain.vertex_point(0)).unwrap(), chain.vertex_point(6));
        let mid = MetricPoint::Edge {
            edge: chain.long_edge(1),
            offset: q(5),
        };
        let mirrored = MetricPoint::Edge {
            edge: chain.long_edge(6),
            offset: q(5),
        };
        assert_eq!(inv.sigma_point(&mid).unwrap(), mirrored);
    }

    #[test]
    fn grid_involution_properties() {
        let chain = ChainOfLoops::with_default_lengths(4).unwrap();
        let grid = refine(chain.graph(), Rational64::new(1, 2)).unwrap();
        let inv = Involution::new(&chain).unwrap();
        let images: Vec<MetricPoint> = grid.points().iter().map(|x| inv.sigma_point(x).unwrap()).collect();
        let mut fixed = Vec::new();
        for (x, y) in grid.points().iter().zip(&images) {
            assert!(grid.index_of(y).is_some(), "image off grid");
            assert_eq!(inv.sigma_point(y).unwrap(), *x);
            if x == y {
                fixed.push(*x);
            }
        }
        assert_eq!(fixed, vec![chain.vertex_point(2)]);
        let graph = chain.graph();
        for (i, x) in grid.points().iter().enumerate().step_by(3) {
            for (j, y) in grid.points().iter().enumerate().step_by(2) {
                assert_eq!(graph.distance(x, y), graph.distance(&images[i], &images[j]));
            }
        }
    }

    #[test]
    fn odd_genus_is_unsupported() {
        let chain = ChainOfLoops::with_default_lengths(3).unwrap();
        assert!(matches!(Involution::new(&chain), Err(Error::UnsupportedGraph(_))));
    }

    #[test]
    fn sigma_divisor_basics() {
        let chain = ChainOfLoops::with_default_lengths(4).unwrap();
        let inv = Involution::new(&chain).unwrap();
        assert_eq!(inv.sigma_divisor(&Divisor::zero()).unwrap(), Divisor::zero());
        let mid = Divisor::chips_at(chain.vertex_point(2), 3);
        assert_eq!(inv.sigma_divisor(&mid).unwrap(), mid);
    }

    #[test]
    fn f_values_for_short_path() {
        let p: LatticePath = "1,2,1".parse().unwrap();
        assert_eq!(f_vertex_values(&p), vec![0, 1, 2]);
    }

    #[test]
    fn f_slope_on_short_edge_after_ascent() {
        let chain = ChainOfLoops::new(4, q(6), q(1)).unwrap();
        let grid = refine(chain.graph(), Rational64::new(1, 2)).unwrap();
        let p: LatticePath = "1,2,3,2,1".parse().unwrap();
        let f = build_f_function(&p, &chain, &grid).unwrap();
        for i in 1..=4 {
            let pts = grid.edge_points(chain.short_edge(i));
            let slope = (f.values()[pts[1]] - f.values()[pts[0]]) / grid.granularity();
            let expected = if p.is_ascent(i) { p.height(i - 1) } else { p.height(i) };
            assert_eq!(slope, q(expected as i64));
        }
    }

    #[test]
    fn div_of_f_is_mirror_difference() {
        let chain = ChainOfLoops::new(4, q(6), q(1)).unwrap();
        let grid = refine(chain.graph(), q(1)).unwrap();
        let inv = Involution::new(&chain).unwrap();
        let p: LatticePath = "1,2,3,2,1".parse().unwrap();
        let f = build_f_function(&p, &chain, &grid).unwrap();
        let dp = path_to_divisor(&p, &chain, &grid).unwrap().divisor;
        let dsp = path_to_divisor(&p.reversed(), &chain, &grid).unwrap().divisor;
        let div = grid.div_of(&f).unwrap();
        assert_eq!(div.degree(), 0);
        assert_eq!(div, &inv.sigma_divisor(&dsp).unwrap() - &dp);
    }

    #[test]
    fn f_function_preconditions() {
        let p: LatticePath = "1,2,1".parse().unwrap();
        let chain = ChainOfLoops::new(2, q(2), q(2)).unwrap();
        let grid = refine(chain.graph(), q(1)).unwrap();
        assert!(matches!(build_f_function(&p, &chain, &grid), Err(Error::UnsupportedGraph(_))));
        let p: LatticePath = "1,2,3,2,1".parse().unwrap();
        let chain = ChainOfLoops::new(4, q(2), q(1)).unwrap();
        let grid = refine(chain.graph(), q(1)).unwrap();
        assert!(matches!(build_f_function(&p, &chain, &grid), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn invariance_matches_palindromes_at_g6() {
        let chain = ChainOfLoops::with_default_lengths(6).unwrap();
        let grid = refine(chain.graph(), q(1)).unwrap();
        let paths = crate::paths::enumerate_paths(6).unwrap();
        let mut count = 0;
        for p in &paths {
            let inv = is_invariant_pencil(p, &chain, &grid).unwrap();
            assert_eq!(inv, p.is_palindrome(), "{p}");
            count += usize::from(inv);
        }
        assert_eq!(count, 3);
    }
}
