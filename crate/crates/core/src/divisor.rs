use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::graph::{format_rational, parse_rational, MetricPoint, ModelGraph};

/// A finite formal integer combination of points of a metric graph.
///
/// Only nonzero coefficients are stored, keyed by canonical points, so
/// structural equality is equality of divisors.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Divisor {
    chips: BTreeMap<MetricPoint, i64>,
    degree: i64,
}

impl Divisor {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `count` chips at `p`.
    pub fn chips_at(p: MetricPoint, count: i64) -> Self {
        let mut d = Self::zero();
        d.add_chips(p, count);
        d
    }

    pub fn from_chips(chips: impl IntoIterator<Item = (MetricPoint, i64)>) -> Self {
        let mut d = Self::zero();
        for (p, n) in chips {
            d.add_chips(p, n);
        }
        d
    }

    pub fn add_chips(&mut self, p: MetricPoint, count: i64) {
        if count == 0 {
            return;
        }
        let entry = self.chips.entry(p).or_insert(0);
        *entry += count;
        if *entry == 0 {
            self.chips.remove(&p);
        }
        self.degree += count;
    }

    pub fn coefficient(&self, p: &MetricPoint) -> i64 {
        self.chips.get(p).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.chips.is_empty()
    }

    pub fn is_effective(&self) -> bool {
        self.chips.values().all(|&n| n > 0)
    }

    /// Nonzero entries in canonical point order.
    pub fn iter(&self) -> impl Iterator<Item = (&MetricPoint, i64)> {
        self.chips.iter().map(|(p, n)| (p, *n))
    }

    /// Pushes every chip forward along `f`.
    pub fn map_points(&self, mut f: impl FnMut(&MetricPoint) -> MetricPoint) -> Divisor {
        Divisor::from_chips(self.iter().map(|(p, n)| (f(p), n)))
    }

    /// Parses `chip <vertex> <count>` and `chip <edge> <num>/<den> <count>`
    /// lines against `graph`. `#` starts a comment.
    pub fn parse(text: &str, graph: &ModelGraph) -> Result<Self> {
        let mut d = Divisor::zero();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let parse_err = |message: String| Error::Parse { line, message };
            let content = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = content.split_whitespace().collect();
            let parse_count = |s: &str| {
                s.parse::<i64>()
                    .map_err(|_| parse_err(format!("malformed chip count `{s}`")))
            };
            match tokens.as_slice() {
                [] => {}
                ["chip", vertex, count] => {
                    let v = graph
                        .vertex_id(vertex)
                        .ok_or_else(|| parse_err(format!("unknown vertex `{vertex}`")))?;
                    d.add_chips(MetricPoint::Vertex(v), parse_count(count)?);
                }
                ["chip", edge, offset, count] => {
                    let e = graph
                        .edge_id(edge)
                        .ok_or_else(|| parse_err(format!("unknown edge `{edge}`")))?;
                    let offset = parse_rational(offset).map_err(parse_err)?;
                    let p = graph.point(e, offset).map_err(|e| parse_err(e.to_string()))?;
                    d.add_chips(p, parse_count(count)?);
                }
                _ => return Err(parse_err(format!("unrecognized line `{}`", content.trim()))),
            }
        }
        Ok(d)
    }

    pub fn to_text(&self, graph: &ModelGraph) -> String {
        let mut out = String::new();
        for (p, n) in self.iter() {
            match p {
                MetricPoint::Vertex(v) => {
                    out.push_str(&format!("chip {} {}\n", graph.vertex_name(*v), n));
                }
                MetricPoint::Edge { edge, offset } => {
                    out.push_str(&format!(
                        "chip {} {} {}\n",
                        graph.edge(*edge).name,
                        format_rational(offset),
                        n
                    ));
                }
            }
        }
        out
    }

    /// Compact one-line form such as `v_0 + 2*J_1@3`.
    pub fn display(&self, graph: &ModelGraph) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (p, n)) in self.iter().enumerate() {
            let label = graph.point_label(p);
            let (sign, abs) = if n < 0 { ("-", -n) } else { ("+", n) };
            if i > 0 {
                out.push_str(&format!(" {sign} "));
            } else if n < 0 {
                out.push('-');
            }
            if abs == 1 {
                out.push_str(&label);
            } else {
                out.push_str(&format!("{abs}*{label}"));
            }
        }
        out
    }
}

impl Add for &Divisor {
    type Output = Divisor;
    fn add(self, rhs: &Divisor) -> Divisor {
        let mut out = self.clone();
        for (p, n) in rhs.iter() {
            out.add_chips(*p, n);
        }
        out
    }
}

impl Sub for &Divisor {
    type Output = Divisor;
    fn sub(self, rhs: &Divisor) -> Divisor {
        let mut out = self.clone();
        for (p, n) in rhs.iter() {
            out.add_chips(*p, -n);
        }
        out
    }
}

impl Neg for &Divisor {
    type Output = Divisor;
    fn neg(self) -> Divisor {
        Divisor::from_chips(self.iter().map(|(p, n)| (*p, -n)))
    }
}

impl Mul<&Divisor> for i64 {
    type Output = Divisor;
    fn mul(self, rhs: &Divisor) -> Divisor {
        Divisor::from_chips(rhs.iter().map(|(p, n)| (*p, self * n)))
    }
}
