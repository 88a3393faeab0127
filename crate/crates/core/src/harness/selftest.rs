//! Reduced-size run of the library's invariant checks, used by `selftest`.

use nalgebra::Matrix4;
use serde::Serialize;

use super::{par_map, SANDWICH_TOL};
use crate::bounds::{co, compute_bounds, DiscordBounds};
use crate::correlation::{
    filtered_state, lorentz_spectrum, q_matrix, q_matrix_swap_reference, r_matrix, t_matrix, ETA,
};
use crate::error::Result;
use crate::oracle::{ensemble_oracle, minimize_povm, minimize_projective, Objective};
use crate::qstate::{make_bell_diagonal, random_state, seeded_rng, DensityMatrix, Subsystem};

#[derive(Debug, Clone, Copy, Default)]
pub struct SelfTestConfig {
    pub quick: bool,
    /// Adds this offset to `co` when forming the lower bound. A nonzero value is a
    /// deliberate fault that the sandwich check must catch.
    pub co_offset: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PropertyResult {
    pub name: &'static str,
    pub passed: bool,
    pub checked: usize,
    pub failures: usize,
    /// Largest deviation seen, in the property's own units.
    pub worst: f64,
}

impl PropertyResult {
    fn from_deviations(name: &'static str, deviations: &[f64], tol: f64) -> Self {
        let failures = deviations.iter().filter(|d| d.is_nan() || **d > tol).count();
        let worst = deviations.iter().copied().fold(0.0, f64::max);
        Self { name, passed: failures == 0, checked: deviations.len(), failures, worst }
    }
}

fn random_bell_diagonal(seed: u64) -> Result<DensityMatrix> {
    use rand::Rng;
    let mut rng = seeded_rng(seed);
    let w: [f64; 4] = std::array::from_fn(|_| -rng.random::<f64>().ln());
    let s: f64 = w.iter().sum();
    let l = w.map(|v| v / s);
    // Invert the weight map: l = (1 + c1 - c2 + c3, 1 - c1 + c2 + c3, 1 + c1 + c2 - c3, 1 - c1 - c2 - c3) / 4.
    let c1 = l[0] - l[1] + l[2] - l[3];
    let c2 = -l[0] + l[1] + l[2] - l[3];
    let c3 = l[0] + l[1] - l[2] - l[3];
    make_bell_diagonal(c1, c2, c3)
}

fn collect(values: Vec<Result<f64>>) -> Vec<f64> {
    values.into_iter().map(|v| v.unwrap_or(f64::INFINITY)).collect()
}

/// Runs every property and returns one result per property.
pub fn run_selftest(cfg: &SelfTestConfig) -> Vec<PropertyResult> {
    let n: u64 = if cfg.quick { 24 } else { 200 };
    let n_oracle: u64 = if cfg.quick { 12 } else { 100 };
    let n_ensemble: u64 = if cfg.quick { 3 } else { 20 };
    let seed = cfg.seed;
    let mut out = Vec::new();

    let q_swap = par_map(n, |i| {
        let d = 2 + (i as usize % 3);
        let rho = random_state(d, 1 + (i as usize / 3) % (2 * d), seed ^ i)?;
        Ok(q_matrix(&rho).max_abs_diff(&q_matrix_swap_reference(&rho)?))
    });
    out.push(PropertyResult::from_deviations("q_matrix_swap_reference", &collect(q_swap), 1e-12));

    let eta = Matrix4::from_diagonal(&ETA.into());
    let lorentz = par_map(n, |i| {
        let rho = random_state(2, 1 + i as usize % 4, seed ^ i)?;
        let r = r_matrix(&rho)?;
        Ok((r * eta * r.transpose() - q_matrix(&rho).0).amax())
    });
    out.push(PropertyResult::from_deviations("q_equals_r_eta_rt", &collect(lorentz), 1e-12));

    let tt = par_map(n, |i| {
        let filtered = filtered_state(&random_state(2, 1 + i as usize % 4, seed ^ i)?)?;
        let t = t_matrix(&filtered)?;
        Ok((t * t.transpose() - q_matrix(&filtered).spatial_block()).amax())
    });
    out.push(PropertyResult::from_deviations("tt_equals_filtered_q", &collect(tt), 1e-10));

    let covariance = par_map(n, |i| {
        let rho = random_state(2, 1 + i as usize % 4, seed ^ i)?;
        let x2 = rho.bloch_a().length_sq();
        let q2 = lorentz_spectrum(&q_matrix(&rho))?.q2();
        let q2f = lorentz_spectrum(&q_matrix(&filtered_state(&rho)?))?.q2();
        Ok(((1.0 - x2) * q2f - q2).abs())
    });
    out.push(PropertyResult::from_deviations("filter_covariance", &collect(covariance), 1e-9));

    let offset = cfg.co_offset;
    let lower_of = |b: &DiscordBounds| -> Result<f64> { Ok(co(b.l_value)? + offset + b.entropy_a - b.entropy_ab) };
    let sandwich = par_map(n_oracle, |i| {
        let rho = random_state(2, 1 + i as usize % 4, seed ^ i)?;
        let b = compute_bounds(&rho)?;
        let oracle = minimize_projective(&rho).value;
        let lo = lower_of(&b)?.max(0.0);
        Ok((lo - oracle).max(oracle - b.upper).max(0.0))
    });
    out.push(PropertyResult::from_deviations("sandwich", &collect(sandwich), SANDWICH_TOL));

    let coincidence = par_map(n, |i| {
        let rho = if i % 2 == 0 { random_bell_diagonal(seed ^ i)? } else { random_state(2, 2, seed ^ i)? };
        let b = compute_bounds(&rho)?;
        if !b.coincide {
            return Ok(f64::INFINITY);
        }
        Ok((b.upper - lower_of(&b)?).abs())
    });
    out.push(PropertyResult::from_deviations("coincidence_families", &collect(coincidence), 1e-7));

    let identities = par_map(n_ensemble, |i| {
        let rho = random_state(2, 1 + i as usize % 4, seed ^ i)?;
        let b = compute_bounds(&rho)?;
        let purity_b = rho.partial_trace(Subsystem::B).purity();
        let c2 = ensemble_oracle(&rho, Objective::Concurrence)?.value;
        let tau = ensemble_oracle(&rho, Objective::Tangle)?.value;
        let ef = ensemble_oracle(&rho, Objective::EntanglementOfFormation)?.value;
        let discord = minimize_povm(&rho, 4)?.value;
        let x2 = rho.bloch_a().length_sq();
        let tau_want = 2.0 * (1.0 - purity_b) - (1.0 - x2) * b.t1;
        let ef_want = discord - b.entropy_a + b.entropy_ab;
        Ok((c2 - (1.0 - b.l_value)).abs().max((tau - tau_want).abs()).max((ef - ef_want).abs()))
    });
    out.push(PropertyResult::from_deviations("purification_identities", &collect(identities), 1e-3));

    let entropy_ic = par_map(n, |i| {
        let d = 1 + i as usize % 4;
        let rho = random_state(d, 1 + (i as usize / 4) % (2 * d), seed ^ i)?;
        Ok((co(2.0 * rho.purity() - 1.0)? - rho.entropy()).max(0.0))
    });
    out.push(PropertyResult::from_deviations("entropy_index_of_coincidence", &collect(entropy_ic), 1e-10));

    out
}
