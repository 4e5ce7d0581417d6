//! Chip-firing on a refined grid: principal divisors, reduced divisors,
//! linear equivalence and rank.
//!
//! All divisors handled here must be supported on grid points. Internally a
//! divisor is a dense configuration `Vec<i64>` indexed by grid vertex; the
//! public API speaks [`Divisor`].

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};

use num_rational::Rational64;
use rayon::prelude::*;

use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::graph::MetricPoint;
use crate::grid::Grid;

/// Largest number of children one level of the breadth-first rank search
/// may hold in memory.
const LEVEL_BUDGET: usize = 1 << 19;

/// Number of multisets of size `k` drawn from `n` items, as a float.
fn multiset_count(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n + i) as f64 / (i + 1) as f64)
}

/// Outcome of expanding one configuration in the rank search.
enum Expansion {
    Emptying(Vec<usize>),
    Children(Vec<(Vec<i64>, Vec<usize>)>),
}

/// A continuous piecewise-linear function given by its values at the grid
/// vertices and linear along each grid edge.
///
/// It is a valid rational function only when every slope (value difference
/// divided by the granularity) is an integer; [`Grid::div_of`] checks this.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PLFunction {
    values: Vec<Rational64>,
}

impl PLFunction {
    pub fn new(values: Vec<Rational64>) -> Self {
        PLFunction { values }
    }

    /// Samples `f` at every grid point.
    pub fn sample(grid: &Grid, mut f: impl FnMut(&MetricPoint) -> Rational64) -> Self {
        PLFunction {
            values: grid.points().iter().map(&mut f).collect(),
        }
    }

    /// The function taking value `granularity * potential[v]` at grid vertex `v`.
    /// Its slopes are the integer differences of `potential`.
    pub fn from_potential(grid: &Grid, potential: &[i64]) -> Self {
        let h = grid.granularity();
        PLFunction {
            values: potential.iter().map(|&k| h * Rational64::from(k)).collect(),
        }
    }

    pub fn values(&self) -> &[Rational64] {
        &self.values
    }

    pub fn value(&self, grid: &Grid, p: &MetricPoint) -> Option<Rational64> {
        grid.index_of(p).map(|i| self.values[i])
    }
}

/// Result of [`Grid::rank`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankResult {
    pub rank: i64,
    /// An effective divisor `E` of degree `rank + 1` with `|D - E|` empty,
    /// the first such in canonical order.
    pub witness: Divisor,
}

/// Result of [`Grid::emptiness_witness`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Emptiness {
    pub empty: bool,
    /// Base point of the reduction.
    pub base: MetricPoint,
    /// The `base`-reduced divisor equivalent to `D - E`. It is negative at
    /// `base` exactly when the linear system is empty.
    pub reduced: Divisor,
}

impl Grid {
    /// Dense configuration of `d`. Fails if `d` has chips off the grid.
    pub fn to_config(&self, d: &Divisor) -> Result<Vec<i64>> {
        let mut cfg = vec![0; self.len()];
        for (p, n) in d.iter() {
            let i = self.index_of(p).ok_or_else(|| {
                Error::InvalidSupport(format!(
                    "point {} is not on the {} grid",
                    self.base().point_label(p),
                    self.granularity()
                ))
            })?;
            cfg[i] += n;
        }
        Ok(cfg)
    }

    pub fn to_divisor(&self, cfg: &[i64]) -> Divisor {
        Divisor::from_chips(cfg.iter().enumerate().map(|(i, &n)| (self.point(i), n)))
    }

    fn base_index(&self, q: &MetricPoint) -> Result<usize> {
        self.index_of(q).ok_or_else(|| {
            Error::InvalidSupport(format!("base point {} is not on the grid", self.base().point_label(q)))
        })
    }

    /// `div(f)`: at each grid vertex, the sum of the slopes of `f` along the
    /// incident edges, oriented towards the vertex.
    pub fn div_of(&self, f: &PLFunction) -> Result<Divisor> {
        if f.values.len() != self.len() {
            return Err(Error::InvalidFunction(format!(
                "function has {} values, grid has {} vertices",
                f.values.len(),
                self.len()
            )));
        }
        let h = self.granularity();
        let mut cfg = vec![0i64; self.len()];
        for (_, e) in self.refined().edges() {
            let (t, s) = (e.tail.0, e.head.0);
            let slope = (f.values[s] - f.values[t]) / h;
            if !slope.is_integer() {
                return Err(Error::InvalidFunction(format!(
                    "slope {slope} on grid edge `{}` is not an integer",
                    e.name
                )));
            }
            let slope = slope.to_integer();
            cfg[s] += slope;
            cfg[t] -= slope;
        }
        Ok(self.to_divisor(&cfg))
    }

    /// The canonical divisor `K = sum (deg(v) - 2) v`.
    pub fn canonical_divisor(&self) -> Divisor {
        Divisor::from_chips(
            (0..self.len()).map(|i| (self.point(i), self.degree(i) as i64 - 2)),
        )
    }

    /// The unique `q`-reduced divisor equivalent to `d`.
    pub fn reduce(&self, d: &Divisor, q: &MetricPoint) -> Result<Divisor> {
        let q = self.base_index(q)?;
        let mut cfg = self.to_config(d)?;
        self.reduce_config(&mut cfg, q);
        Ok(self.to_divisor(&cfg))
    }

    pub fn is_reduced(&self, d: &Divisor, q: &MetricPoint) -> Result<bool> {
        Ok(self.reduce(d, q)? == *d)
    }

    /// Linear equivalence, decided by comparing reduced forms at the first
    /// grid vertex.
    pub fn is_equivalent(&self, a: &Divisor, b: &Divisor) -> Result<bool> {
        if a.degree() != b.degree() {
            // still validate support
            self.to_config(a)?;
            self.to_config(b)?;
            return Ok(false);
        }
        let mut diff = self.to_config(&(a - b))?;
        self.reduce_config(&mut diff, 0);
        Ok(diff.iter().all(|&n| n == 0))
    }

    /// Decides whether `|d - e|` is empty, returning the reduced divisor at
    /// the first grid vertex as certificate.
    pub fn emptiness_witness(&self, d: &Divisor, e: &Divisor) -> Result<Emptiness> {
        if !e.is_effective() {
            return Err(Error::InvalidInput("E must be effective".into()));
        }
        let mut cfg = self.to_config(&(d - e))?;
        self.reduce_config(&mut cfg, 0);
        Ok(Emptiness {
            empty: cfg[0] < 0,
            base: self.point(0),
            reduced: self.to_divisor(&cfg),
        })
    }

    /// Rank of `d`: the largest `r` such that `|d - E|` is nonempty for every
    /// effective `E` of degree `r` on the grid, or `-1` if `|d|` is empty.
    pub fn rank(&self, d: &Divisor) -> Result<RankResult> {
        let mut cfg = self.to_config(d)?;
        let none = RankResult {
            rank: -1,
            witness: Divisor::zero(),
        };
        if d.degree() < 0 {
            return Ok(none);
        }
        self.reduce_config(&mut cfg, 0);
        if cfg[0] < 0 {
            return Ok(none);
        }
        match self.first_emptying(&cfg, d.degree() as usize + 1) {
            Some(e) => Ok(RankResult {
                rank: e.len() as i64 - 1,
                witness: Divisor::from_chips(e.into_iter().map(|i| (self.point(i), 1))),
            }),
            None => unreachable!("every divisor of degree deg + 1 empties the linear system"),
        }
    }

    /// `rank(d) >= r` without searching beyond degree `r`.
    pub fn rank_at_least(&self, d: &Divisor, r: i64) -> Result<bool> {
        let mut cfg = self.to_config(d)?;
        if r < 0 {
            return Ok(true);
        }
        if d.degree() < r {
            return Ok(false);
        }
        self.reduce_config(&mut cfg, 0);
        if cfg[0] < 0 {
            return Ok(false);
        }
        Ok(self.first_emptying(&cfg, r as usize).is_none())
    }

    /// An effective `E` of least degree, at most `max_depth`, with
    /// `|D - E|` empty, as a sorted index list. `reduced` is the 0-reduced
    /// form of `D` and `|D|` is nonempty.
    ///
    /// Searches degree by degree over the distinct reduced forms of `D - E`,
    /// keeping the least `E` reaching each and scanning them in order of
    /// `E`; the answer extends the first one with an emptying child, so it
    /// does not depend on scheduling. When the forms stop collapsing, or a
    /// level would take too much memory, the remaining degrees are searched
    /// depth-first over sorted index lists instead.
    fn first_emptying(&self, reduced: &[i64], max_depth: usize) -> Option<Vec<usize>> {
        let mut level: Vec<(Vec<i64>, Vec<usize>)> = vec![(reduced.to_vec(), Vec::new())];
        for depth in 1..=max_depth {
            let work = level.len() * self.len();
            // Level one never collapses; later, a level nearly as large as
            // the number of sorted lists reaching it means no collapsing.
            let spread = depth > 2 && level.len() as f64 > 0.9 * multiset_count(self.len(), depth - 1);
            if work > LEVEL_BUDGET || spread {
                return (depth..=max_depth).find_map(|k| self.first_emptying_at(reduced, k));
            }
            let first_hit = AtomicUsize::new(usize::MAX);
            let expanded: Vec<Option<Expansion>> = level
                .par_iter()
                .enumerate()
                .map(|(k, (cfg, e))| {
                    if k > first_hit.load(Ordering::Relaxed) {
                        return None;
                    }
                    let mut children = Vec::with_capacity(self.len());
                    for i in 0..self.len() {
                        let mut child = cfg.clone();
                        self.remove_chip(&mut child, i);
                        let mut e = e.clone();
                        e.insert(e.partition_point(|&j| j <= i), i);
                        if child[0] < 0 {
                            first_hit.fetch_min(k, Ordering::Relaxed);
                            return Some(Expansion::Emptying(e));
                        }
                        children.push((child, e));
                    }
                    Some(Expansion::Children(children))
                })
                .collect();
            let hit = first_hit.into_inner();
            if hit != usize::MAX {
                return match &expanded[hit] {
                    Some(Expansion::Emptying(e)) => Some(e.clone()),
                    _ => unreachable!("the first hit is always expanded"),
                };
            }
            let mut next: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
            for expansion in expanded.into_iter().flatten() {
                let Expansion::Children(children) = expansion else { continue };
                for (cfg, e) in children {
                    match next.entry(cfg) {
                        Entry::Occupied(mut slot) => {
                            if e < *slot.get() {
                                slot.insert(e);
                            }
                        }
                        Entry::Vacant(slot) => {
                            slot.insert(e);
                        }
                    }
                }
            }
            level = next.into_iter().collect();
            level.sort_unstable_by(|a, b| a.1.cmp(&b.1));
        }
        None
    }

    /// Removes a chip at `i` from a 0-reduced configuration and reduces
    /// again if needed. Removing a chip keeps a 0-reduced configuration
    /// reduced unless the vertex goes negative.
    fn remove_chip(&self, cfg: &mut [i64], i: usize) {
        cfg[i] -= 1;
        if i != 0 && cfg[i] < 0 {
            self.reduce_config(cfg, 0);
        }
    }

    /// First sorted index list `E` of length `depth`, in lexicographic
    /// order, with `|D - E|` empty.
    fn first_emptying_at(&self, reduced: &[i64], depth: usize) -> Option<Vec<usize>> {
        (0..self.len()).into_par_iter().find_map_first(|first| {
            let mut prefix = Vec::with_capacity(depth);
            self.search_branch(reduced, first, first + 1, depth, &mut prefix)
        })
    }

    /// Explores sorted lists whose next entry lies in `lo..hi`.
    fn search_branch(
        &self,
        reduced: &[i64],
        lo: usize,
        hi: usize,
        depth: usize,
        prefix: &mut Vec<usize>,
    ) -> Option<Vec<usize>> {
        for i in lo..hi {
            let mut child = reduced.to_vec();
            self.remove_chip(&mut child, i);
            prefix.push(i);
            if child[0] < 0 {
                // Pad to full length; extra chips keep the system empty.
                let mut e = prefix.clone();
                e.resize(prefix.len() + depth - 1, i);
                return Some(e);
            }
            if depth > 1 {
                if let Some(e) = self.search_branch(&child, i, self.len(), depth - 1, prefix) {
                    return Some(e);
                }
            }
            prefix.pop();
        }
        None
    }

    /// Replaces `cfg` by the equivalent `q`-reduced configuration.
    ///
    /// First every vertex other than `q` is made nonnegative by firing the
    /// balls around `q` from the outermost layer inwards; then Dhar's burning
    /// algorithm repeatedly fires the unburnt set until the fire started at
    /// `q` consumes the whole graph.
    pub fn reduce_config(&self, cfg: &mut [i64], q: usize) {
        let n = self.len();
        let dist = self.hops_from(q);
        let max_dist = dist.iter().copied().max().unwrap_or(0);
        let mut layers = vec![Vec::new(); max_dist + 1];
        for (v, &k) in dist.iter().enumerate() {
            layers[k].push(v);
        }
        for k in (1..=max_dist).rev() {
            let mut times = 0;
            for &v in &layers[k] {
                if cfg[v] < 0 {
                    let down = self.neighbors(v).iter().filter(|&&u| dist[u] + 1 == k).count() as i64;
                    times = times.max((-cfg[v] + down - 1) / down);
                }
            }
            if times > 0 {
                for &v in &layers[k] {
                    for &u in self.neighbors(v) {
                        if dist[u] + 1 == k {
                            cfg[v] += times;
                            cfg[u] -= times;
                        }
                    }
                }
            }
        }

        let mut burnt = vec![false; n];
        let mut hits = vec![0i64; n];
        let mut stack = Vec::with_capacity(n);
        loop {
            burnt.iter_mut().for_each(|b| *b = false);
            hits.iter_mut().for_each(|h| *h = 0);
            burnt[q] = true;
            stack.push(q);
            let mut burnt_count = 1;
            while let Some(v) = stack.pop() {
                for &u in self.neighbors(v) {
                    if !burnt[u] {
                        hits[u] += 1;
                        if hits[u] > cfg[u] {
                            burnt[u] = true;
                            burnt_count += 1;
                            stack.push(u);
                        }
                    }
                }
            }
            if burnt_count == n {
                break;
            }
            // The unburnt set can fire `times` times in a row.
            let times = (0..n)
                .filter(|&v| !burnt[v] && hits[v] > 0)
                .map(|v| cfg[v] / hits[v])
                .min()
                .expect("unburnt set borders the fire");
            for v in 0..n {
                if !burnt[v] && hits[v] > 0 {
                    cfg[v] -= times * hits[v];
                    for &u in self.neighbors(v) {
                        if burnt[u] {
                            cfg[u] += times;
                        }
                    }
                }
            }
        }
    }
}
