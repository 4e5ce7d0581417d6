//! Verification suites over the chain of loops and the pencil count table.
//!
//! Every suite returns a [`VerificationReport`] with one case per checked
//! object. Failures are report entries, never panics; errors are reserved for
//! invalid requests.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::time::Instant;

use num_bigint::BigUint;
use num_rational::Rational64;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::chain::ChainOfLoops;
use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::graph::MetricPoint;
use crate::grid::{refine, Grid};
use crate::paths::{
    catalan_count, enumerate_paths, symmetric_count_closed_form, LatticePath,
};
use crate::pencil::{path_to_divisor, PencilDivisor};
use crate::symmetry::{build_f_function, Involution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    Tsv,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseResult {
    pub id: String,
    pub passed: bool,
    pub detail: String,
}

impl CaseResult {
    fn new(id: impl Into<String>, failures: Vec<String>, summary: String) -> Self {
        let passed = failures.is_empty();
        let detail = if passed { summary } else { failures.join("; ") };
        CaseResult {
            id: id.into(),
            passed,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub suite: String,
    pub cases: Vec<CaseResult>,
    /// Free-form lines printed after the cases.
    pub notes: Vec<String>,
}

impl VerificationReport {
    fn new(suite: &str) -> Self {
        VerificationReport {
            suite: suite.into(),
            cases: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> usize {
        self.cases.iter().filter(|c| c.passed).count()
    }

    pub fn failed(&self) -> usize {
        self.cases.len() - self.passed()
    }

    pub fn is_success(&self) -> bool {
        self.failed() == 0
    }

    /// 0 when every case passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        i32::from(!self.is_success())
    }

    pub fn render(&self, format: OutputFormat) -> String {
        let mut out = String::new();
        match format {
            OutputFormat::Text => {
                let width = self.cases.iter().map(|c| c.id.len()).max().unwrap_or(0);
                for c in &self.cases {
                    let status = if c.passed { "PASS" } else { "FAIL" };
                    let _ = writeln!(out, "{status}  {:width$}  {}", c.id, c.detail);
                }
                for n in &self.notes {
                    let _ = writeln!(out, "# {n}");
                }
                let _ = writeln!(
                    out,
                    "{}: {} passed, {} failed, {} total",
                    self.suite,
                    self.passed(),
                    self.failed(),
                    self.cases.len()
                );
            }
            OutputFormat::Tsv => {
                let _ = writeln!(out, "suite\tcase\tstatus\tdetail");
                for c in &self.cases {
                    let status = if c.passed { "pass" } else { "fail" };
                    let _ = writeln!(out, "{}\t{}\t{status}\t{}", self.suite, c.id, c.detail);
                }
            }
        }
        out
    }
}

/// Shared knobs of the chain-of-loops suites.
#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub genus: usize,
    /// Long loop length; `None` means `max(2g - 2, 1)`.
    pub ell: Option<Rational64>,
    pub granularity: Rational64,
    /// Largest genus the suite accepts.
    pub max_genus: usize,
    /// Cases not started before this instant are reported as skipped.
    pub deadline: Option<Instant>,
}

impl SuiteConfig {
    pub fn new(genus: usize) -> Self {
        SuiteConfig {
            genus,
            ell: None,
            granularity: Rational64::from(1),
            max_genus: 8,
            deadline: None,
        }
    }

    fn chain(&self) -> Result<ChainOfLoops> {
        let ell = self.ell.unwrap_or_else(|| ChainOfLoops::default_long_length(self.genus));
        ChainOfLoops::new(self.genus, ell, Rational64::from(1))
    }

    fn check_feasible(&self, suite: &str) -> Result<()> {
        if self.genus > self.max_genus {
            return Err(Error::InvalidParameter(format!(
                "g = {} exceeds the feasibility bound {} of suite `{suite}` (raise it with --max-g)",
                self.genus, self.max_genus
            )));
        }
        Ok(())
    }

    fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

/// Runs `check` on every path in parallel, keeping path order, and records
/// cases the time budget did not allow as one failure.
fn run_cases<F>(report: &mut VerificationReport, cfg: &SuiteConfig, paths: &[LatticePath], check: F)
where
    F: Fn(&LatticePath) -> CaseResult + Sync,
{
    let results: Vec<Option<CaseResult>> = paths
        .par_iter()
        .map(|p| if cfg.expired() { None } else { Some(check(p)) })
        .collect();
    let skipped = results.iter().filter(|r| r.is_none()).count();
    report.cases.extend(results.into_iter().flatten());
    if skipped > 0 {
        report.cases.push(CaseResult {
            id: "time-budget".into(),
            passed: false,
            detail: format!("aborted: {skipped} case(s) not run before the deadline"),
        });
    }
}

fn err_case(id: String, e: Error) -> CaseResult {
    CaseResult {
        id,
        passed: false,
        detail: format!("error: {e}"),
    }
}

/// Chips collected at `v_i` when moving as much of `2 D_p - 2 v_0` as
/// possible from the first `i` loops to `v_i`, for `i = 0..=g`.
///
/// Each entry is computed independently, by reducing the restriction of the
/// divisor to loops `1..=i` at `v_i` on that sub-chain.
pub fn chip_transport(p: &LatticePath, chain: &ChainOfLoops, granularity: Rational64) -> Result<Vec<i64>> {
    let grid = refine(chain.graph(), granularity)?;
    let pencil = crate::pencil::build_unchecked(p, chain, &grid)?;
    let v0 = chain.vertex_point(0);
    let start = &(2 * &pencil.divisor) - &Divisor::chips_at(v0, 2);
    let mut trace = vec![start.coefficient(&v0)];
    for i in 1..=chain.genus() {
        let sub = refine(&chain.first_loops(i)?, granularity)?;
        // ids of the sub-chain coincide with the chain's
        let restricted = Divisor::from_chips(start.iter().filter_map(|(pt, n)| {
            let inside = match pt {
                MetricPoint::Vertex(v) => v.0 <= i,
                MetricPoint::Edge { edge, .. } => chain.loop_of_edge(*edge) <= i,
            };
            inside.then_some((*pt, n))
        }));
        let vi = chain.vertex_point(i);
        trace.push(sub.reduce(&restricted, &vi)?.coefficient(&vi));
    }
    Ok(trace)
}

fn pencils(paths: &[LatticePath], chain: &ChainOfLoops, grid: &Grid) -> BTreeMap<LatticePath, Result<PencilDivisor>> {
    paths
        .par_iter()
        .map(|p| (p.clone(), path_to_divisor(p, chain, grid)))
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// For every path: `rank(2 D_p) = 2`, `|2 D_p - 2 v_0 - v_g|` is empty and the
/// chip transport trace is `(p_0 - 1, ..., p_g - 1)`.
pub fn verify_prop_double(cfg: &SuiteConfig) -> Result<VerificationReport> {
    cfg.check_feasible("prop2")?;
    let chain = cfg.chain()?;
    let grid = refine(chain.graph(), cfg.granularity)?;
    let paths = enumerate_paths(cfg.genus)?;
    let mut report = VerificationReport::new("prop2");
    let v0 = chain.vertex_point(0);
    let vg = chain.vertex_point(chain.genus());
    run_cases(&mut report, cfg, &paths, |p| {
        let id = p.to_string();
        let run = || -> Result<CaseResult> {
            let mut failures = Vec::new();
            let pencil = path_to_divisor(p, &chain, &grid)?;
            let double = 2 * &pencil.divisor;
            let rank = grid.rank(&double)?;
            if rank.rank != 2 {
                failures.push(format!("rank(2D_p) = {}", rank.rank));
            }
            if !grid.emptiness_witness(&double, &rank.witness)?.empty {
                failures.push("rank witness does not empty the system".into());
            }
            let e = Divisor::from_chips([(v0, 2), (vg, 1)]);
            if !grid.emptiness_witness(&double, &e)?.empty {
                failures.push("|2D_p - 2v_0 - v_g| is nonempty".into());
            }
            let trace = chip_transport(p, &chain, cfg.granularity)?;
            let expected: Vec<i64> = p.entries().iter().map(|&x| x as i64 - 1).collect();
            if trace != expected {
                failures.push(format!("transport {trace:?} != {expected:?}"));
            }
            let summary = format!(
                "rank(2D_p)=2 witness={} transport={trace:?}",
                rank.witness.display(chain.graph())
            );
            Ok(CaseResult::new(id.clone(), failures, summary))
        };
        run().unwrap_or_else(|e| err_case(id.clone(), e))
    });
    Ok(report)
}

/// For every path: `D_p ~ sigma(D_{reverse(p)})` by reduced divisors and by
/// the explicit function `f`; `|D_p|` is sigma-invariant iff `p` is a
/// palindrome; and `sigma(D_p)` reduces at `v_0` to `D_{reverse(p)}`.
pub fn verify_prop_sigma(cfg: &SuiteConfig) -> Result<VerificationReport> {
    cfg.check_feasible("sigma")?;
    let chain = cfg.chain()?;
    let inv = Involution::new(&chain)?;
    let grid = refine(chain.graph(), cfg.granularity)?;
    let paths = enumerate_paths(cfg.genus)?;
    let built = pencils(&paths, &chain, &grid);
    let mut report = VerificationReport::new("sigma");
    let v0 = chain.vertex_point(0);
    run_cases(&mut report, cfg, &paths, |p| {
        let id = p.to_string();
        let run = || -> Result<CaseResult> {
            let mut failures = Vec::new();
            let dp = &built[p].as_ref().map_err(Clone::clone)?.divisor;
            let rev = p.reversed();
            let drev = &built[&rev].as_ref().map_err(Clone::clone)?.divisor;
            let mirrored = inv.sigma_divisor(drev)?;
            if !grid.is_equivalent(dp, &mirrored)? {
                failures.push("D_p not equivalent to sigma(D_rev) by reduction".into());
            }
            let f = build_f_function(p, &chain, &grid)?;
            if grid.div_of(&f)? != &mirrored - dp {
                failures.push("div(f) != sigma(D_rev) - D_p".into());
            }
            let invariant = grid.is_equivalent(dp, &inv.sigma_divisor(dp)?)?;
            if invariant != p.is_palindrome() {
                failures.push(format!("invariant = {invariant} but palindrome = {}", p.is_palindrome()));
            }
            if grid.reduce(&inv.sigma_divisor(dp)?, &v0)? != *drev {
                failures.push("sigma(D_p) does not reduce to D_rev at v_0".into());
            }
            Ok(CaseResult::new(id.clone(), failures, format!("invariant={invariant}")))
        };
        run().unwrap_or_else(|e| err_case(id.clone(), e))
    });
    let invariant = report
        .cases
        .iter()
        .filter(|c| c.passed && c.detail == "invariant=true")
        .count();
    report.notes.push(format!("invariant pencils: {invariant}"));
    Ok(report)
}

/// Largest genus at which [`verify_bijection`] also runs the exhaustive
/// class enumeration.
pub const EXHAUSTIVE_PENCIL_GENUS: usize = 4;

/// Every `D_p` is `v_0`-reduced of rank one, distinct paths give
/// inequivalent divisors, and (for small genus) the rank-one classes of
/// degree `g/2 + 1` on the grid are exactly the `D_p`.
pub fn verify_bijection(cfg: &SuiteConfig) -> Result<VerificationReport> {
    cfg.check_feasible("bijection")?;
    let chain = cfg.chain()?;
    let grid = refine(chain.graph(), cfg.granularity)?;
    let paths = enumerate_paths(cfg.genus)?;
    let built = pencils(&paths, &chain, &grid);
    let mut report = VerificationReport::new("bijection");
    run_cases(&mut report, cfg, &paths, |p| {
        let id = p.to_string();
        let run = || -> Result<CaseResult> {
            let dp = &built[p].as_ref().map_err(Clone::clone)?.divisor;
            let mut failures = Vec::new();
            for other in paths.iter().filter(|o| *o != p) {
                let d_other = &built[other].as_ref().map_err(Clone::clone)?.divisor;
                if grid.is_equivalent(dp, d_other)? {
                    failures.push(format!("equivalent to D_{other}"));
                }
            }
            Ok(CaseResult::new(
                id.clone(),
                failures,
                format!("D_p = {} reduced, rank 1, distinct", dp.display(chain.graph())),
            ))
        };
        run().unwrap_or_else(|e| err_case(id.clone(), e))
    });
    if cfg.genus <= EXHAUSTIVE_PENCIL_GENUS && !cfg.expired() {
        let d = cfg.genus / 2 + 1;
        let classes = rank_classes(&grid, d, 1)?;
        let expected: BTreeSet<Divisor> = built
            .values()
            .filter_map(|r| r.as_ref().ok().map(|p| p.divisor.clone()))
            .collect();
        let lambda = catalan_count(d as u64)?;
        let failures = if classes.len() as u64 != lambda.to_u64().unwrap_or(u64::MAX) {
            vec![format!("{} classes, expected {lambda}", classes.len())]
        } else if classes != expected {
            vec!["classes differ from the path divisors".into()]
        } else {
            vec![]
        };
        report.cases.push(CaseResult::new(
            "exhaustive",
            failures,
            format!("{} rank-1 classes of degree {d} on the grid", classes.len()),
        ));
    }
    Ok(report)
}

/// All effective divisors of degree `degree` on the grid, as `v_0`-reduced
/// class representatives (the first grid vertex is the base).
pub fn effective_classes(grid: &Grid, degree: usize) -> BTreeSet<Vec<i64>> {
    fn walk(grid: &Grid, start: usize, left: usize, cfg: &mut Vec<i64>, out: &mut BTreeSet<Vec<i64>>) {
        if left == 0 {
            let mut reduced = cfg.clone();
            grid.reduce_config(&mut reduced, 0);
            out.insert(reduced);
            return;
        }
        for i in start..grid.len() {
            cfg[i] += 1;
            walk(grid, i, left - 1, cfg, out);
            cfg[i] -= 1;
        }
    }
    let mut out = BTreeSet::new();
    walk(grid, 0, degree, &mut vec![0; grid.len()], &mut out);
    out
}

/// Reduced representatives of the degree-`degree` classes on the grid with
/// rank exactly `rank`.
pub fn rank_classes(grid: &Grid, degree: usize, rank: i64) -> Result<BTreeSet<Divisor>> {
    let classes: Vec<Vec<i64>> = effective_classes(grid, degree).into_iter().collect();
    let hits: Vec<Option<Divisor>> = classes
        .par_iter()
        .map(|cfg| {
            let d = grid.to_divisor(cfg);
            let keep = grid.rank_at_least(&d, rank)? && !grid.rank_at_least(&d, rank + 1)?;
            Ok(keep.then_some(d))
        })
        .collect::<Result<_>>()?;
    Ok(hits.into_iter().flatten().collect())
}

/// `g - (r + 1)(g - d + r)`.
pub fn brill_noether_number(g: i64, r: i64, d: i64) -> i64 {
    g - (r + 1) * (g - d + r)
}

#[derive(Debug, Clone)]
pub struct BrillNoetherConfig {
    pub suite: SuiteConfig,
    pub rank: i64,
    pub degree: i64,
}

/// For `rho >= 0`, exhibits a divisor of rank exactly `r` and degree at
/// most `d` on the chain. For `rho < 0`, searches every class of effective
/// degree-`d` divisors on the grid at the configured granularity and at half
/// of it for one of rank at least `r`. Finding none is evidence, not proof.
pub fn verify_brill_noether(cfg: &BrillNoetherConfig) -> Result<VerificationReport> {
    let base = &cfg.suite;
    base.check_feasible("brill-noether")?;
    let (g, r, d) = (base.genus as i64, cfg.rank, cfg.degree);
    if r < 0 || d < 0 {
        return Err(Error::InvalidParameter("r and d must be nonnegative".into()));
    }
    let rho = brill_noether_number(g, r, d);
    let chain = base.chain()?;
    let mut report = VerificationReport::new("brill-noether");
    report.notes.push(format!("g = {g}, r = {r}, d = {d}, rho = {rho}"));
    if rho >= 0 {
        let grid = refine(chain.graph(), base.granularity)?;
        let id = format!("exists(g={g},r={r},d={d})");
        let case = match find_rank_witness(&chain, &grid, r, d) {
            Ok(Some(w)) => CaseResult::new(
                id,
                vec![],
                format!("rank {r} witness of degree {}: {}", w.degree(), w.display(chain.graph())),
            ),
            Ok(None) => CaseResult::new(id, vec![format!("no rank-{r} divisor of degree <= {d} found")], String::new()),
            Err(e) => err_case(id, e),
        };
        report.cases.push(case);
    } else {
        for h in [base.granularity, base.granularity / 2] {
            let id = format!("absent(g={g},r={r},d={d},h={h})");
            if base.expired() {
                report.cases.push(CaseResult::new(id, vec!["aborted: time budget".into()], String::new()));
                continue;
            }
            let run = || -> Result<CaseResult> {
                let grid = refine(chain.graph(), h)?;
                let classes: Vec<Vec<i64>> = effective_classes(&grid, d as usize).into_iter().collect();
                let found = classes
                    .par_iter()
                    .map(|c| {
                        let div = grid.to_divisor(c);
                        Ok(grid.rank_at_least(&div, r)?.then_some(div))
                    })
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .flatten()
                    .next();
                Ok(match found {
                    Some(div) => CaseResult::new(
                        id.clone(),
                        vec![format!("rank >= {r} divisor {}", div.display(chain.graph()))],
                        String::new(),
                    ),
                    None => CaseResult::new(
                        id.clone(),
                        vec![],
                        format!(
                            "no counterexample at granularity {h} among {} classes (evidence, not proof)",
                            classes.len()
                        ),
                    ),
                })
            };
            report.cases.push(run().unwrap_or_else(|e| err_case(id.clone(), e)));
        }
    }
    Ok(report)
}

fn find_rank_witness(chain: &ChainOfLoops, grid: &Grid, r: i64, d: i64) -> Result<Option<Divisor>> {
    if r == 0 {
        return Ok(Some(Divisor::zero()));
    }
    let g = chain.genus();
    if r == 1 && g.is_multiple_of(2) && d >= (g / 2 + 1) as i64 {
        let p = &enumerate_paths(g)?[0];
        return Ok(Some(path_to_divisor(p, chain, grid)?.divisor));
    }
    for k in r.max(0)..=d {
        for cfg in effective_classes(grid, k as usize) {
            let div = grid.to_divisor(&cfg);
            if grid.rank(&div)?.rank == r {
                return Ok(Some(div));
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub d: u64,
    pub g: u64,
    pub lambda: BigUint,
    pub lambda_symmetric: BigUint,
    pub ratio: f64,
}

/// Pencil counts `lambda` and sigma-invariant counts `lambda'` for
/// `d_min..=d_max`, from the closed forms.
pub fn lambda_table(d_min: u64, d_max: u64) -> Result<Vec<TableRow>> {
    if d_min < 2 || d_min > d_max {
        return Err(Error::InvalidParameter(format!(
            "need 2 <= d_min <= d_max, got {d_min}..{d_max}"
        )));
    }
    (d_min..=d_max)
        .map(|d| {
            let lambda = catalan_count(d)?;
            let lambda_symmetric = symmetric_count_closed_form(d)?;
            let ratio = lambda_symmetric.to_f64().unwrap_or(f64::NAN) / lambda.to_f64().unwrap_or(f64::NAN);
            Ok(TableRow {
                d,
                g: 2 * d - 2,
                lambda,
                lambda_symmetric,
                ratio,
            })
        })
        .collect()
}

pub fn render_table(rows: &[TableRow], format: OutputFormat) -> String {
    let mut out = String::new();
    match format {
        OutputFormat::Tsv => {
            out.push_str("d\tg\tlambda\tlambda_prime\tratio\n");
            for r in rows {
                let _ = writeln!(out, "{}\t{}\t{}\t{}\t{:.6}", r.d, r.g, r.lambda, r.lambda_symmetric, r.ratio);
            }
        }
        OutputFormat::Text => {
            let _ = writeln!(out, "{:>4} {:>4} {:>12} {:>12} {:>10}", "d", "g", "lambda", "lambda'", "ratio");
            for r in rows {
                let _ = writeln!(
                    out,
                    "{:>4} {:>4} {:>12} {:>12} {:>10.6}",
                    r.d,
                    r.g,
                    r.lambda.to_string(),
                    r.lambda_symmetric.to_string(),
                    r.ratio
                );
            }
        }
    }
    out
}
