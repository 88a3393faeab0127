//! Batch experiments over seeded state ensembles, with CSV and JSON reporting.
//!
//! Every state in a scan is generated from `seed ^ index`, so the ensemble does not
//! depend on how the work is scheduled across threads.

mod selftest;

pub use selftest::{run_selftest, PropertyResult, SelfTestConfig};

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{
    accessible_info_bounds, compute_bounds, discord_upper_weak, dqc1_bounds, dqc1_upper, ChannelBounds,
    DiscordBounds, DqcParams,
};
use crate::error::{Error, Result};
use crate::oracle::{accessible_info_oracle, minimize_povm, minimize_projective};
use crate::qstate::{make_dqc1, random_state, BlochVector, DensityMatrix, UnitaryMatrix};

/// First line of every CSV report.
pub const CSV_HEADER: &str = "# discord-bounds v1";
/// Slack allowed in the sandwich `max(0, lower) <= oracle <= upper`.
pub const SANDWICH_TOL: f64 = 1e-7;
/// Gap threshold used for the "close to the oracle" fraction.
pub const CLOSE_GAP: f64 = 0.01;
/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "DISCORD_BOUNDS_THREADS";

/// Seed of the `index`-th state in a scan.
pub fn state_seed(seed: u64, index: u64) -> u64 {
    seed ^ index
}

/// Order-preserving parallel map over `0..n`.
pub fn par_map<T: Send, F: Fn(u64) -> T + Sync + Send>(n: u64, f: F) -> Vec<T> {
    (0..n).into_par_iter().map(f).collect()
}

/// Installs a global thread pool sized by `DISCORD_BOUNDS_THREADS`, if set.
pub fn init_threads_from_env() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("{THREADS_ENV}={raw:?} is not a thread count")))?;
    // A pool may already exist (tests, embedding); keep it in that case.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    Ok(())
}

/// Which upper bound a scan reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum UpperKind {
    /// Conditional discord at the constructed axis.
    Tight,
    /// `h(1 - tau) + S(rho_A) - S(rho)`, the looser closed form.
    Weak,
}

#[derive(Debug, Clone, Copy)]
pub struct ScanConfig {
    pub n: u64,
    pub rank: usize,
    pub dim_b: usize,
    pub seed: u64,
    pub upper: UpperKind,
    /// Also run the POVM oracle with this many outcomes at most.
    pub povm_outcomes: Option<usize>,
}

impl ScanConfig {
    /// Two-qubit scan with the weak upper bound and no POVM oracle.
    pub fn figure1(n: u64, rank: usize, seed: u64) -> Self {
        Self { n, rank, dim_b: 2, seed, upper: UpperKind::Weak, povm_outcomes: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub state_id: u64,
    pub lower: f64,
    pub upper: f64,
    pub oracle_projective: f64,
    pub oracle_povm: Option<f64>,
    /// `oracle - max(0, lower)`.
    pub gap_lo: f64,
    /// `upper - oracle`.
    pub gap_hi: f64,
    pub coincide: bool,
}

impl ReportRow {
    fn from_parts(state_id: u64, lower: f64, upper: f64, oracle: f64, povm: Option<f64>, coincide: bool) -> Self {
        Self {
            state_id,
            lower,
            upper,
            oracle_projective: oracle,
            oracle_povm: povm,
            gap_lo: oracle - lower.max(0.0),
            gap_hi: upper - oracle,
            coincide,
        }
    }

    /// `max(0, lower) <= oracle <= upper` within [`SANDWICH_TOL`], for both oracles.
    pub fn satisfies_sandwich(&self) -> bool {
        let lo = self.lower.max(0.0);
        let ok = |v: f64| lo <= v + SANDWICH_TOL && v <= self.upper + SANDWICH_TOL;
        ok(self.oracle_projective)
            && self.oracle_povm.is_none_or(|p| lo <= p + SANDWICH_TOL && p <= self.oracle_projective + SANDWICH_TOL)
    }

    pub fn is_close(&self) -> bool {
        self.gap_lo.abs() <= CLOSE_GAP && self.gap_hi.abs() <= CLOSE_GAP
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub n: usize,
    pub fraction_within_0_01: f64,
    pub max_abs_gap: f64,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
    pub summary: Summary,
}

impl ExperimentReport {
    pub fn from_rows(rows: Vec<ReportRow>) -> Self {
        let n = rows.len();
        let close = rows.iter().filter(|r| r.is_close()).count();
        let max_abs_gap = rows.iter().map(|r| r.gap_lo.abs().max(r.gap_hi.abs())).fold(0.0, f64::max);
        let violations = rows.iter().filter(|r| !r.satisfies_sandwich()).count();
        let fraction = if n == 0 { 0.0 } else { close as f64 / n as f64 };
        Self { rows, summary: Summary { n, fraction_within_0_01: fraction, max_abs_gap, violations } }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut out = out;
        writeln!(out, "{CSV_HEADER}")?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["state_id", "lower", "upper", "oracle_projective", "oracle_povm", "gap_lo", "gap_hi", "coincide"])?;
        for r in &self.rows {
            w.write_record([
                r.state_id.to_string(),
                r.lower.to_string(),
                r.upper.to_string(),
                r.oracle_projective.to_string(),
                r.oracle_povm.map(|v| v.to_string()).unwrap_or_default(),
                r.gap_lo.to_string(),
                r.gap_hi.to_string(),
                r.coincide.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Bounds and oracles for one state.
pub fn evaluate_state(
    rho: &DensityMatrix,
    state_id: u64,
    upper: UpperKind,
    povm_outcomes: Option<usize>,
) -> Result<ReportRow> {
    let b = compute_bounds(rho)?;
    let up = match upper {
        UpperKind::Tight => b.upper,
        UpperKind::Weak => discord_upper_weak(rho)?,
    };
    let oracle = minimize_projective(rho).value;
    let povm = povm_outcomes.map(|n| minimize_povm(rho, n)).transpose()?.map(|r| r.value);
    Ok(ReportRow::from_parts(state_id, b.lower, up, oracle, povm, b.coincide))
}

/// Seeded random-state scan comparing the bounds with the oracles.
pub fn run_scan(cfg: &ScanConfig) -> Result<ExperimentReport> {
    if cfg.n == 0 {
        return Err(Error::Parse("scan needs at least one state".into()));
    }
    let rows = par_map(cfg.n, |i| {
        let rho = random_state(cfg.dim_b, cfg.rank, state_seed(cfg.seed, i))?;
        evaluate_state(&rho, i, cfg.upper, cfg.povm_outcomes)
    });
    Ok(ExperimentReport::from_rows(rows.into_iter().collect::<Result<Vec<_>>>()?))
}

#[derive(Debug, Clone, Serialize)]
pub struct Dqc1Report {
    pub params: DqcParams,
    /// `None` outside the traceless regime.
    pub formula_lower: Option<f64>,
    pub formula_upper: f64,
    pub generic: Option<GenericBounds>,
    pub oracle_projective: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GenericBounds {
    pub lower: f64,
    pub upper: f64,
}

/// Closed-form DQC1 bounds, optionally cross-checked against the generic pipeline
/// and the projective oracle.
pub fn run_dqc1(u: &UnitaryMatrix, alpha: f64, generic: bool, oracle: bool) -> Result<Dqc1Report> {
    let params = DqcParams::from_unitary(u, alpha)?;
    let formula_lower = match dqc1_bounds(&params) {
        Ok((lo, _)) => Some(lo),
        Err(Error::Regime { .. }) => None,
        Err(e) => return Err(e),
    };
    let state = if generic || oracle { Some(make_dqc1(u, alpha)?) } else { None };
    let generic = match (&state, generic) {
        (Some(rho), true) => {
            let b: DiscordBounds = compute_bounds(rho)?;
            Some(GenericBounds { lower: b.lower, upper: b.upper })
        }
        _ => None,
    };
    let oracle_projective = match (&state, oracle) {
        (Some(rho), true) => Some(minimize_projective(rho).value),
        _ => None,
    };
    Ok(Dqc1Report { params, formula_lower, formula_upper: dqc1_upper(&params), generic, oracle_projective })
}

#[derive(Debug, Clone, Serialize)]
pub struct ChannelReport {
    pub bounds: ChannelBounds,
    pub oracle: Option<f64>,
}

pub fn run_channel(p1: f64, a: BlochVector, b: BlochVector, oracle: bool) -> Result<ChannelReport> {
    let bounds = accessible_info_bounds(p1, a, b)?;
    let oracle = if oracle { Some(accessible_info_oracle(p1, a, b)?.value) } else { None };
    Ok(ChannelReport { bounds, oracle })
}
