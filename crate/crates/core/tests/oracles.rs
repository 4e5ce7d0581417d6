//! Brute-force oracles for reduction, equivalence and rank on small graphs.
//!
//! Equivalence is decided independently of Dhar's algorithm: `D ~ D'` iff
//! `D - D'` lies in the integer image of the Laplacian, which is checked by
//! solving the grounded system over the rationals.

mod common;

use std::collections::BTreeSet;

use chipfire::{refine, Divisor, Grid, Rational64};
use common::{graph_shape, grid_divisor};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

/// Inverse of the Laplacian with row and column 0 removed.
struct Grounded {
    inverse: Vec<Vec<BigRational>>,
}

impl Grounded {
    fn new(grid: &Grid) -> Self {
        let n = grid.len() - 1;
        let mut a = vec![vec![BigRational::zero(); 2 * n]; n];
        for v in 1..grid.len() {
            a[v - 1][v - 1] += BigRational::from_integer(BigInt::from(grid.degree(v)));
            for &u in grid.neighbors(v) {
                if u != 0 {
                    a[v - 1][u - 1] -= BigRational::one();
                }
            }
            a[v - 1][n + v - 1] = BigRational::one();
        }
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[r][col].is_zero()).expect("grounded Laplacian is invertible");
            a.swap(col, pivot);
            let inv = a[col][col].recip();
            for x in a[col].iter_mut() {
                *x *= &inv;
            }
            let pivot_row = a[col].clone();
            for (r, row) in a.iter_mut().enumerate() {
                if r != col && !row[col].is_zero() {
                    let factor = row[col].clone();
                    for (x, p) in row.iter_mut().zip(&pivot_row) {
                        *x -= p * &factor;
                    }
                }
            }
        }
        Grounded {
            inverse: a.into_iter().map(|row| row[n..].to_vec()).collect(),
        }
    }

    /// Whether `cfg` (of degree zero) is `L x` for an integer vector `x`.
    fn is_principal(&self, cfg: &[i64]) -> bool {
        if cfg.iter().sum::<i64>() != 0 {
            return false;
        }
        self.inverse.iter().all(|row| {
            let x: BigRational = row
                .iter()
                .zip(&cfg[1..])
                .map(|(a, &b)| a * BigRational::from_integer(BigInt::from(b)))
                .sum();
            x.is_integer()
        })
    }
}

fn multisets(n: usize, k: usize) -> Vec<Vec<i64>> {
    fn walk(n: usize, start: usize, left: usize, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur[i] += 1;
            walk(n, i, left - 1, cur, out);
            cur[i] -= 1;
        }
    }
    let mut out = Vec::new();
    walk(n, 0, k, &mut vec![0; n], &mut out);
    out
}

fn sub(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `|cfg|` nonempty: some effective configuration of the same degree differs
/// from `cfg` by a principal divisor.
fn nonempty(lap: &Grounded, n: usize, cfg: &[i64]) -> bool {
    let deg: i64 = cfg.iter().sum();
    deg >= 0 && multisets(n, deg as usize).iter().any(|f| lap.is_principal(&sub(cfg, f)))
}

fn brute_rank(grid: &Grid, lap: &Grounded, d: &Divisor) -> i64 {
    let cfg = grid.to_config(d).unwrap();
    let n = grid.len();
    let mut r = -1;
    while r < d.degree() {
        let next = (r + 1) as usize;
        if multisets(n, next).iter().all(|e| nonempty(lap, n, &sub(&cfg, e))) {
            r += 1;
        } else {
            break;
        }
    }
    r
}

/// No nonempty subset of vertices other than `q` can fire without sending a
/// vertex into debt.
fn brute_is_reduced(grid: &Grid, cfg: &[i64], q: usize) -> bool {
    let n = grid.len();
    if cfg.iter().enumerate().any(|(v, &c)| v != q && c < 0) {
        return false;
    }
    let others: Vec<usize> = (0..n).filter(|&v| v != q).collect();
    (1u32..1 << others.len()).all(|mask| {
        let inside: BTreeSet<usize> = others
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, &v)| v)
            .collect();
        inside.iter().any(|&v| {
            let out = grid.neighbors(v).iter().filter(|u| !inside.contains(u)).count() as i64;
            cfg[v] < out
        })
    })
}

fn small_grid() -> impl Strategy<Value = Grid> {
    graph_shape(4, 2, 2)
        .prop_map(|s| refine(&s.build(), Rational64::new(1, 2)).unwrap())
        .prop_filter("at most 9 grid vertices", |g| g.len() <= 9)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reduce_matches_subset_oracle(
        grid in small_grid(),
        chips in prop::collection::vec((0usize..64, -3i64..=3), 0..6),
        q in 0usize..64,
    ) {
        let lap = Grounded::new(&grid);
        let d = grid_divisor(&grid, &chips);
        let q = q % grid.len();
        let reduced = grid.reduce(&d, &grid.point(q)).unwrap();
        let cfg = grid.to_config(&reduced).unwrap();
        prop_assert!(brute_is_reduced(&grid, &cfg, q));
        prop_assert!(lap.is_principal(&sub(&grid.to_config(&d).unwrap(), &cfg)));
    }

    #[test]
    fn equivalence_matches_laplacian_lattice(
        grid in small_grid(),
        a in prop::collection::vec((0usize..64, -2i64..=2), 0..5),
        b in prop::collection::vec((0usize..64, -2i64..=2), 0..5),
    ) {
        let lap = Grounded::new(&grid);
        let da = grid_divisor(&grid, &a);
        let db = grid_divisor(&grid, &b);
        let diff = grid.to_config(&(&da - &db)).unwrap();
        prop_assert_eq!(grid.is_equivalent(&da, &db).unwrap(), lap.is_principal(&diff));
    }

    #[test]
    fn rank_matches_brute_force(
        grid in small_grid().prop_filter("tiny", |g| g.len() <= 7),
        chips in prop::collection::vec((0usize..64, -1i64..=2), 0..4),
    ) {
        let lap = Grounded::new(&grid);
        let d = grid_divisor(&grid, &chips);
        prop_assume!(d.degree() <= 3);
        prop_assert_eq!(grid.rank(&d).unwrap().rank, brute_rank(&grid, &lap, &d));
    }
}

#[test]
fn laplacian_oracle_sanity() {
    // Two vertices joined by two unit edges: a - b is not principal, 2a - 2b is.
    let g = chipfire::ModelGraph::parse("vertex a\nvertex b\nedge e a b 1\nedge f a b 1\n").unwrap();
    let grid = refine(&g, Rational64::from(1)).unwrap();
    let lap = Grounded::new(&grid);
    assert!(!lap.is_principal(&[1, -1]));
    assert!(lap.is_principal(&[2, -2]));
    assert!(lap.is_principal(&[0, 0]));
}
