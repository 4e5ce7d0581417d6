//! Lattice paths `p = (p_0, ..., p_g)` with `p_0 = p_g = 1`, `p_i >= 1` and
//! unit steps, together with the closed-form counts of all paths and of
//! palindromic ones.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticePath(Vec<u32>);

impl LatticePath {
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        let bad = |msg: &str| Err(Error::InvalidParameter(format!("{msg}: {entries:?}")));
        if entries.len() < 3 || !(entries.len() - 1).is_multiple_of(2) {
            return bad("path length must be g + 1 with g >= 2 even");
        }
        if entries[0] != 1 || entries[entries.len() - 1] != 1 {
            return bad("path must start and end at height 1");
        }
        if entries.iter().any(|&p| p < 1) {
            return bad("path must stay at height >= 1");
        }
        if entries.windows(2).any(|w| w[0].abs_diff(w[1]) != 1) {
            return bad("path steps must be +1 or -1");
        }
        Ok(LatticePath(entries))
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    /// `p_i`.
    pub fn height(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn genus(&self) -> usize {
        self.0.len() - 1
    }

    /// Degree of the corresponding pencil, `g/2 + 1`.
    pub fn degree(&self) -> usize {
        self.genus() / 2 + 1
    }

    /// Whether step `i` (1-based) goes up.
    pub fn is_ascent(&self, i: usize) -> bool {
        self.0[i] > self.0[i - 1]
    }

    pub fn reversed(&self) -> LatticePath {
        LatticePath(self.0.iter().rev().copied().collect())
    }

    pub fn is_palindrome(&self) -> bool {
        self.0.iter().eq(self.0.iter().rev())
    }
}

impl fmt::Display for LatticePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl FromStr for LatticePath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let entries = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::InvalidParameter(format!("malformed path `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        LatticePath::new(entries)
    }
}

fn check_genus(g: usize) -> Result<()> {
    if g < 2 || !g.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "genus must be even and at least 2, got {g}"
        )));
    }
    Ok(())
}

/// All lattice paths of length `g`, in lexicographic order.
pub fn enumerate_paths(g: usize) -> Result<Vec<LatticePath>> {
    check_genus(g)?;
    let mut out = Vec::new();
    let mut current = vec![1u32];
    extend(g, &mut current, &mut out);
    Ok(out)
}

fn extend(g: usize, current: &mut Vec<u32>, out: &mut Vec<LatticePath>) {
    let i = current.len();
    if i == g + 1 {
        out.push(LatticePath(current.clone()));
        return;
    }
    let last = current[i - 1];
    // down before up keeps the output sorted; height must allow a return to 1
    for next in [last.wrapping_sub(1), last + 1] {
        if next >= 1 && next as usize <= g - i + 1 {
            current.push(next);
            extend(g, current, out);
            current.pop();
        }
    }
}

/// Palindromic lattice paths of length `g`, in lexicographic order. Built by
/// mirroring every admissible first half.
pub fn enumerate_symmetric_paths(g: usize) -> Result<Vec<LatticePath>> {
    check_genus(g)?;
    let half = g / 2;
    let mut halves = Vec::new();
    let mut current = vec![1u32];
    half_paths(half, &mut current, &mut halves);
    let mut out: Vec<LatticePath> = halves
        .into_iter()
        .map(|h| {
            let mut full = h.clone();
            full.extend(h.iter().rev().skip(1));
            LatticePath(full)
        })
        .collect();
    out.sort();
    Ok(out)
}

fn half_paths(half: usize, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if current.len() == half + 1 {
        out.push(current.clone());
        return;
    }
    let last = current[current.len() - 1];
    for next in [last.wrapping_sub(1), last + 1] {
        if next >= 1 {
            current.push(next);
            half_paths(half, current, out);
            current.pop();
        }
    }
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// `(1/d) * C(2d - 2, d - 1)`, the number of pencils for `d = g/2 + 1`.
pub fn catalan_count(d: u64) -> Result<BigUint> {
    if d < 1 {
        return Err(Error::InvalidParameter("d must be at least 1".into()));
    }
    let (q, r) = binomial(2 * d - 2, d - 1).div_rem(&BigUint::from(d));
    debug_assert!(r.is_zero());
    Ok(q)
}

/// `C(d - 1, ceil((d - 1)/2))`, the number of palindromic paths.
pub fn symmetric_count_closed_form(d: u64) -> Result<BigUint> {
    if d < 2 {
        return Err(Error::InvalidParameter("d must be at least 2".into()));
    }
    Ok(binomial(d - 1, d / 2))
}

/// Number of palindromic paths with middle height `m`:
/// `(m/d) C(d, (d-m)/2) = C(d-1, (d-m)/2) - C(d-1, (d-m)/2 - 1)`.
///
/// Both expressions are evaluated; they must agree.
pub fn symmetric_count_by_midheight(d: u64, m: u64) -> Result<BigUint> {
    if d < 2 || m < 1 || m > d || !(d - m).is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= m <= d with m = d mod 2 (d = {d}, m = {m})"
        )));
    }
    let k = (d - m) / 2;
    let (ballot, rem) = (BigUint::from(m) * binomial(d, k)).div_rem(&BigUint::from(d));
    if !rem.is_zero() {
        return Err(Error::CheckFailed(format!("(m/d) C(d, {k}) is not integral")));
    }
    let lower = if k == 0 { BigUint::zero() } else { binomial(d - 1, k - 1) };
    let reflected = binomial(d - 1, k) - lower;
    if ballot != reflected {
        return Err(Error::CheckFailed(format!(
            "ballot form {ballot} differs from reflection form {reflected}"
        )));
    }
    Ok(ballot)
}
