//! The divisor `D_p` attached to a lattice path on the chain of loops.
//!
//! `D_p` has one chip at `v_0` and, for every ascent `p_i = p_{i-1} + 1`, one
//! chip at the unique point `w_i` of loop `i` with
//! `p_{i-1} v_{i-1} + w_i ~ p_i v_i` on that loop. Descents add nothing.

use num_rational::Rational64;
use num_traits::Zero;

use crate::chain::ChainOfLoops;
use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::graph::{EdgeId, MetricPoint, ModelGraph, VertexId};
use crate::grid::{refine, Grid};
use crate::paths::LatticePath;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PencilDivisor {
    pub path: LatticePath,
    pub divisor: Divisor,
    /// `(i, w_i)` for every ascent index `i`.
    pub ascent_points: Vec<(usize, MetricPoint)>,
}

/// A single loop with vertices `a = v_{i-1}`, `b = v_i`, short edge `I` and
/// long edge `J`, refined like the chain.
struct LoopModel {
    grid: Grid,
    m: Rational64,
    ell: Rational64,
}

const LOOP_A: VertexId = VertexId(0);
const LOOP_B: VertexId = VertexId(1);
const LOOP_I: EdgeId = EdgeId(0);

impl LoopModel {
    fn new(chain: &ChainOfLoops, granularity: Rational64) -> Result<Self> {
        let mut b = ModelGraph::builder();
        let a = b.add_vertex("a")?;
        let v = b.add_vertex("b")?;
        b.add_edge("I", a, v, chain.m())?;
        b.add_edge("J", a, v, chain.ell())?;
        Ok(LoopModel {
            grid: refine(&b.build()?, granularity)?,
            m: chain.m(),
            ell: chain.ell(),
        })
    }

    /// Position on the circle, measured from `a` through `I` and back along `J`.
    fn position(&self, p: &MetricPoint) -> Rational64 {
        match *p {
            MetricPoint::Vertex(v) if v == LOOP_A => Rational64::zero(),
            MetricPoint::Vertex(_) => self.m,
            MetricPoint::Edge { edge, offset } if edge == LOOP_I => offset,
            MetricPoint::Edge { offset, .. } => self.m + self.ell - offset,
        }
    }

    fn to_chain(&self, chain: &ChainOfLoops, i: usize, p: &MetricPoint) -> MetricPoint {
        match *p {
            MetricPoint::Vertex(v) if v == LOOP_A => chain.vertex_point(i - 1),
            MetricPoint::Vertex(_) => chain.vertex_point(i),
            MetricPoint::Edge { edge, offset } => MetricPoint::Edge {
                edge: if edge == LOOP_I { chain.short_edge(i) } else { chain.long_edge(i) },
                offset,
            },
        }
    }

    /// The grid point `w` with `before * a + w ~ after * b` on the loop.
    ///
    /// Every candidate is tested both by chip-firing equivalence and by the
    /// position-sum congruence on the circle; any disagreement is an error.
    fn solve(&self, before: u32, after: u32) -> Result<MetricPoint> {
        let circumference = self.m + self.ell;
        let target = Divisor::chips_at(MetricPoint::Vertex(LOOP_B), after as i64);
        let mut found = Vec::new();
        for w in self.grid.points() {
            let mut lhs = Divisor::chips_at(MetricPoint::Vertex(LOOP_A), before as i64);
            lhs.add_chips(*w, 1);
            let by_firing = self.grid.is_equivalent(&lhs, &target)?;
            let residue = (self.position(w) - self.m * Rational64::from(after as i64)) / circumference;
            let by_position = residue.is_integer();
            if by_firing != by_position {
                return Err(Error::CheckFailed(format!(
                    "loop equivalence and circle congruence disagree at {}",
                    self.grid.base().point_label(w)
                )));
            }
            if by_firing {
                found.push(*w);
            }
        }
        match found.as_slice() {
            [w] => Ok(*w),
            [] => Err(Error::Precision(format!(
                "no grid point at granularity {} solves {before}a + w ~ {after}b",
                self.grid.granularity()
            ))),
            _ => Err(Error::CheckFailed(format!("{} solutions for w", found.len()))),
        }
    }
}

/// Builds `D_p` on `grid` (a refinement of `chain.graph()`), certifying each
/// `w_i`, that `D_p` is `v_0`-reduced and that it has rank exactly one.
pub fn path_to_divisor(p: &LatticePath, chain: &ChainOfLoops, grid: &Grid) -> Result<PencilDivisor> {
    let pencil = build_unchecked(p, chain, grid)?;
    let v0 = chain.vertex_point(0);
    if !grid.is_reduced(&pencil.divisor, &v0)? {
        return Err(Error::CheckFailed(format!("D_{p} is not v_0-reduced")));
    }
    let rank = grid.rank(&pencil.divisor)?.rank;
    if rank != 1 {
        return Err(Error::CheckFailed(format!("D_{p} has rank {rank}, expected 1")));
    }
    Ok(pencil)
}

/// Like [`path_to_divisor`] but without the reducedness and rank checks.
pub fn build_unchecked(p: &LatticePath, chain: &ChainOfLoops, grid: &Grid) -> Result<PencilDivisor> {
    if p.genus() != chain.genus() {
        return Err(Error::InvalidParameter(format!(
            "path has length {} but the chain has genus {}",
            p.genus(),
            chain.genus()
        )));
    }
    if grid.base() != chain.graph() {
        return Err(Error::InvalidInput("grid is not a refinement of the chain".into()));
    }
    let model = LoopModel::new(chain, grid.granularity())?;
    let mut divisor = Divisor::chips_at(chain.vertex_point(0), 1);
    let mut ascent_points = Vec::new();
    for i in 1..=p.genus() {
        if p.is_ascent(i) {
            let w = model.solve(p.height(i - 1), p.height(i))?;
            let w = model.to_chain(chain, i, &w);
            divisor.add_chips(w, 1);
            ascent_points.push((i, w));
        }
    }
    Ok(PencilDivisor {
        path: p.clone(),
        divisor,
        ascent_points,
    })
}

/// Tries `path_to_divisor` at `granularity`, halving it after precision
/// failures up to `max_halvings` times.
pub fn path_to_divisor_refining(
    p: &LatticePath,
    chain: &ChainOfLoops,
    granularity: Rational64,
    max_halvings: u32,
) -> Result<(Grid, PencilDivisor)> {
    let mut h = granularity;
    let mut last_err = None;
    for _ in 0..=max_halvings {
        let grid = refine(chain.graph(), h)?;
        match path_to_divisor(p, chain, &grid) {
            Ok(pencil) => return Ok((grid, pencil)),
            Err(e @ Error::Precision(_)) => last_err = Some(e),
            Err(e) => return Err(e),
        }
        h /= 2;
    }
    Err(last_err.expect("at least one attempt"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::enumerate_paths;

    fn q(n: i64) -> Rational64 {
        Rational64::from(n)
    }

    #[test]
    fn genus_two_pencil() {
        let chain = ChainOfLoops::new(2, q(2), q(1)).unwrap();
        let grid = refine(chain.graph(), q(1)).unwrap();
        let p: LatticePath = "1,2,1".parse().unwrap();
        let pencil = path_to_divisor(&p, &chain, &grid).unwrap();
        // Brute force on the circle of circumference 3 (positions 0..3):
        // w must satisfy pos(w) = 2 * pos(v_1) - 1 * pos(v_0) = 2 mod 3,
        // which is J_1 at offset 1.
        let w = MetricPoint::Edge {
            edge: chain.long_edge(1),
            offset: q(1),
        };
        assert_eq!(pencil.ascent_points, vec![(1, w)]);
        assert_eq!(pencil.divisor, Divisor::from_chips([(chain.vertex_point(0), 1), (w, 1)]));
    }

    #[test]
    fn descents_add_no_chips() {
        let chain = ChainOfLoops::new(4, q(6), q(1)).unwrap();
        let grid = refine(chain.graph(), q(1)).unwrap();
        let p: LatticePath = "1,2,3,2,1".parse().unwrap();
        let pencil = path_to_divisor(&p, &chain, &grid).unwrap();
        assert_eq!(pencil.divisor.degree(), 3);
        let loops: Vec<usize> = pencil.ascent_points.iter().map(|(i, _)| *i).collect();
        assert_eq!(loops, vec![1, 2]);
        for (i, w) in &pencil.ascent_points {
            let MetricPoint::Edge { edge, offset } = w else { panic!("w on a vertex") };
            assert_eq!(*edge, chain.long_edge(*i));
            // w_i sits p_{i-1} away from v_i along J_i
            assert_eq!(*offset, chain.ell() - q(p.height(i - 1) as i64));
        }
    }

    #[test]
    fn every_pencil_is_reduced_with_rank_one() {
        for g in [2, 4, 6] {
            let chain = ChainOfLoops::with_default_lengths(g).unwrap();
            let grid = refine(chain.graph(), q(1)).unwrap();
            for p in enumerate_paths(g).unwrap() {
                let pencil = path_to_divisor(&p, &chain, &grid).unwrap();
                assert_eq!(pencil.divisor.degree(), p.degree() as i64);
            }
        }
    }

    #[test]
    fn genus_mismatch_and_coarse_grid() {
        let chain = ChainOfLoops::new(4, q(6), q(1)).unwrap();
        let grid = refine(chain.graph(), q(1)).unwrap();
        let p: LatticePath = "1,2,1".parse().unwrap();
        assert!(matches!(path_to_divisor(&p, &chain, &grid), Err(Error::InvalidParameter(_))));

        // coarse grid: lengths are multiples of 2
        let chain = ChainOfLoops::new(2, q(4), q(2)).unwrap();
        let coarse = refine(chain.graph(), q(2)).unwrap();
        let p: LatticePath = "1,2,1".parse().unwrap();
        // pos(w) = 2 * 2 = 4 mod 6 lies on J at offset 4: on the 2-grid.
        assert!(path_to_divisor(&p, &chain, &coarse).is_ok());
        let (grid, pencil) = path_to_divisor_refining(&p, &chain, q(2), 2).unwrap();
        assert_eq!(grid.granularity(), q(2));
        assert_eq!(pencil.divisor.degree(), 2);
    }
}
