//! Brute-force references for the bounds: discord minimized over projective
//! measurements or rank-1 POVMs, ensemble minimizations for the entanglement of
//! the purifying system, and the accessible information of binary channels.
//!
//! Ensembles of `rho_BC` (for a purification of `rho_AB`) are in one-to-one
//! correspondence with rank-1 POVMs on qubit A, and the B-marginal of each
//! ensemble member is the conditional state `rho_{B|i}`. Every ensemble objective
//! is therefore evaluated on `ConditionalModel` outcomes and `rho_BC` is never built.

mod povm;
pub mod search;

pub use povm::Povm;

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{projective_effects, ConditionalModel, Outcome};
use crate::error::{Error, Result};
use crate::linalg::{self, binary_entropy, hermitian_function, CMatrix};
use crate::qstate::{make_binary_channel, seeded_rng, BlochVector, DensityMatrix};
use search::{nelder_mead, SearchOptions};

/// Grid resolution of the projective search over the hemisphere.
pub const GRID_THETA: usize = 60;
pub const GRID_PHI: usize = 120;
/// Grid points refined by the simplex search.
pub const REFINE_STARTS: usize = 8;
/// Random starts per outcome count in the POVM searches.
pub const POVM_STARTS: usize = 16;
/// Largest B dimension accepted by [`ensemble_oracle`].
pub const ENSEMBLE_MAX_DIM: usize = 8;

const STEP_TOL: f64 = 1e-6;
const SEARCH_SEED: u64 = 0x5eed_d15c;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Argmin {
    Projective([f64; 3]),
    Povm(Povm),
}

impl Argmin {
    /// Bloch-form effects of the optimal measurement.
    pub fn effects(&self) -> Vec<[f64; 4]> {
        match self {
            Argmin::Projective(m) => projective_effects(m).to_vec(),
            Argmin::Povm(p) => p.effects().to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub value: f64,
    pub argmin: Argmin,
    pub evaluations: usize,
    pub converged: bool,
}

/// Point on the unit sphere reached from `m0` by moving `(u, v)` in its tangent plane.
fn tangent_point(m0: &[f64; 3], t1: &[f64; 3], t2: &[f64; 3], u: f64, v: f64) -> [f64; 3] {
    let p = [
        m0[0] + u * t1[0] + v * t2[0],
        m0[1] + u * t1[1] + v * t2[1],
        m0[2] + u * t1[2] + v * t2[2],
    ];
    let n = linalg::norm3(&p);
    [p[0] / n, p[1] / n, p[2] / n]
}

fn tangent_basis(m: &[f64; 3]) -> ([f64; 3], [f64; 3]) {
    let helper = if m[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let d = linalg::dot3(&helper, m);
    let mut t1 = [helper[0] - d * m[0], helper[1] - d * m[1], helper[2] - d * m[2]];
    let n = linalg::norm3(&t1);
    t1.iter_mut().for_each(|c| *c /= n);
    let t2 = [
        m[1] * t1[2] - m[2] * t1[1],
        m[2] * t1[0] - m[0] * t1[2],
        m[0] * t1[1] - m[1] * t1[0],
    ];
    (t1, t2)
}

/// Representative of `{m, -m}` with the first nonzero coordinate (from z down) positive.
fn canonical_axis(m: [f64; 3]) -> [f64; 3] {
    let key = if m[2] != 0.0 { m[2] } else if m[1] != 0.0 { m[1] } else { m[0] };
    if key < 0.0 {
        [-m[0], -m[1], -m[2]]
    } else {
        m
    }
}

/// Grid-plus-simplex minimization of an axis objective symmetric under `m -> -m`.
fn projective_search<F: Fn(&[f64; 3]) -> f64 + Sync>(f: F) -> OracleResult {
    let mut grid: Vec<(f64, usize, [f64; 3])> = (0..GRID_THETA * GRID_PHI)
        .map(|idx| {
            let (i, j) = (idx / GRID_PHI, idx % GRID_PHI);
            let theta = (i as f64 + 0.5) * (0.5 * PI) / GRID_THETA as f64;
            let phi = j as f64 * 2.0 * PI / GRID_PHI as f64;
            let m = linalg::unit_from_angles(theta, phi);
            (f(&m), idx, m)
        })
        .collect();
    let mut evaluations = grid.len();
    grid.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let opts = SearchOptions {
        initial_step: 0.5 * PI / GRID_THETA as f64,
        xtol: STEP_TOL,
        ftol: 1e-15,
        max_evals: 2000,
        restarts: 2,
    };
    let mut best: Option<(f64, [f64; 3], bool)> = None;
    for &(_, _, m0) in grid.iter().take(REFINE_STARTS) {
        let (t1, t2) = tangent_basis(&m0);
        let min = nelder_mead(|x| f(&tangent_point(&m0, &t1, &t2, x[0], x[1])), &[0.0, 0.0], &opts);
        evaluations += min.evals;
        let m = canonical_axis(tangent_point(&m0, &t1, &t2, min.x[0], min.x[1]));
        let value = f(&m);
        evaluations += 1;
        if best.is_none_or(|(v, _, _)| value < v) {
            best = Some((value, m, min.converged));
        }
    }
    let (value, m, converged) = best.expect("at least one refinement start");
    OracleResult { value, argmin: Argmin::Projective(m), evaluations, converged }
}

fn random_params(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut p = Vec::with_capacity(povm::param_len(n));
    for i in 0..n {
        p.push(rng.random_range(-1.0f64..1.0).acos());
        p.push(rng.random_range(0.0..2.0 * PI));
        if i > 0 {
            p.push(rng.random_range(0.5..1.5));
        }
    }
    p
}

/// Multi-start simplex search over rank-1 POVMs with 2..=`max_outcomes` elements.
/// `seed_axis` is a projective optimum used as an extra two-outcome start, so the
/// result is never worse than that axis.
fn povm_search<F>(f: F, max_outcomes: usize, seed_axis: [f64; 3], salt: u64) -> OracleResult
where
    F: Fn(&[[f64; 4]]) -> f64 + Sync,
{
    let objective = |x: &[f64]| match povm::decode(x) {
        Some(e) => f(&e),
        None => f64::INFINITY,
    };
    let axis_effects = projective_effects(&seed_axis).to_vec();
    let mut best_effects = axis_effects.clone();
    let mut best_value = f(&axis_effects);
    let mut best_converged = true;
    let mut evaluations = 1;

    for n in 2..=max_outcomes {
        let dim = povm::param_len(n);
        let opts = SearchOptions {
            initial_step: 0.4,
            xtol: STEP_TOL,
            ftol: 1e-13,
            max_evals: 400 * dim,
            restarts: 2,
        };
        let mut rng = seeded_rng(SEARCH_SEED ^ salt ^ ((n as u64) << 32));
        let mut starts: Vec<Vec<f64>> = (0..POVM_STARTS).map(|_| random_params(n, &mut rng)).collect();
        // Warm start: the best smaller POVM plus a faint new element.
        let mut warm = povm::encode(&best_effects);
        while warm.len() < dim {
            warm.push(rng.random_range(-1.0f64..1.0).acos());
            warm.push(rng.random_range(0.0..2.0 * PI));
            warm.push(0.1);
        }
        starts.insert(0, warm);

        let runs: Vec<_> = starts
            .par_iter()
            .map(|x0| nelder_mead(|x| objective(x), x0, &opts))
            .collect();
        for run in runs {
            evaluations += run.evals;
            if let Some(effects) = povm::decode(&run.x).filter(|e| Povm::new(e.clone()).is_ok()) {
                let value = f(&effects);
                evaluations += 1;
                if value < best_value {
                    best_value = value;
                    best_effects = effects;
                    best_converged = run.converged;
                }
            }
        }
    }

    OracleResult {
        value: best_value,
        argmin: Argmin::Povm(Povm::new(best_effects).expect("decoded parameters form a POVM")),
        evaluations,
        converged: best_converged,
    }
}

/// Discord minimized over projective measurements on A.
pub fn minimize_projective(rho: &DensityMatrix) -> OracleResult {
    let model = ConditionalModel::new(rho);
    projective_search(|m| model.projective_discord(m))
}

/// Discord minimized over rank-1 POVMs with at most `n_outcomes` elements (2 to 4).
pub fn minimize_povm(rho: &DensityMatrix, n_outcomes: usize) -> Result<OracleResult> {
    if !(2..=4).contains(&n_outcomes) {
        return Err(Error::InvalidPovm(format!("outcome count {n_outcomes} outside 2..=4")));
    }
    let model = ConditionalModel::new(rho);
    let axis = minimize_projective(rho);
    let Argmin::Projective(m) = axis.argmin else { unreachable!() };
    let mut res = povm_search(|e| model.conditional_discord(e), n_outcomes, m, 0);
    res.evaluations += axis.evaluations;
    Ok(res)
}

/// Ensemble objectives for `rho_BC`, written as costs of a pure member with B-marginal `pi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Objective {
    /// Entanglement of formation: `S(pi)`.
    EntanglementOfFormation,
    /// Concurrence: `sqrt(2 (1 - Tr pi^2))`; the oracle reports the squared minimum.
    Concurrence,
    /// Tangle: `2 (1 - Tr pi^2)`.
    Tangle,
}

impl Objective {
    fn member_cost(self, o: &Outcome) -> f64 {
        match self {
            Objective::EntanglementOfFormation => o.entropy(),
            Objective::Concurrence => (2.0 * (1.0 - o.purity())).max(0.0).sqrt(),
            Objective::Tangle => (2.0 * (1.0 - o.purity())).max(0.0),
        }
    }

    fn salt(self) -> u64 {
        match self {
            Objective::EntanglementOfFormation => 1,
            Objective::Concurrence => 2,
            Objective::Tangle => 3,
        }
    }
}

/// Minimum of `sum_i p_i f(rho_{B|i})` over rank-1 POVMs with up to 4 outcomes on A.
pub fn ensemble_oracle(rho: &DensityMatrix, objective: Objective) -> Result<OracleResult> {
    let d = rho.dim_b();
    if d > ENSEMBLE_MAX_DIM {
        return Err(Error::DimensionTooLarge { dim: d, max: ENSEMBLE_MAX_DIM });
    }
    let model = ConditionalModel::new(rho);
    let cost = |effects: &[[f64; 4]]| model.average(effects, |o| objective.member_cost(o));
    let axis = projective_search(|m| cost(&projective_effects(m)));
    let Argmin::Projective(m) = axis.argmin else { unreachable!() };
    let mut res = povm_search(cost, 4, m, objective.salt());
    res.evaluations += axis.evaluations;
    if objective == Objective::Concurrence {
        res.value *= res.value;
    }
    Ok(res)
}

/// `max(0, l1 - l2 - l3 - l4)` with `l_i` the decreasing square roots of the
/// eigenvalues of `rho (Y (x) Y) rho^* (Y (x) Y)`.
pub fn wootters_concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim_b() != 2 {
        return Err(Error::WrongDimension { expected: 2, actual: rho.dim_b() });
    }
    let yy = linalg::kron(&linalg::pauli_dyn(2), &linalg::pauli_dyn(2));
    let r = rho.matrix();
    let flipped = &yy * r.conjugate() * &yy;
    // sqrt(rho) flipped sqrt(rho) is Hermitian with the same spectrum.
    let root = hermitian_function(r, |l| l.max(0.0).sqrt());
    let m: CMatrix = &root * flipped * &root;
    let mut l: Vec<f64> = linalg::hermitian_eigenvalues(&m).iter().map(|v| v.max(0.0).sqrt()).collect();
    l.sort_by(|a, b| b.total_cmp(a));
    Ok((l[0] - l[1] - l[2] - l[3]).max(0.0))
}

/// Mutual information between the signal label and the outcomes of `effects`.
pub fn channel_mutual_information(p1: f64, a: &BlochVector, b: &BlochVector, effects: &[[f64; 4]]) -> f64 {
    let priors = [p1, 1.0 - p1];
    let h_signal = binary_entropy(p1);
    let mut h_out = 0.0;
    let mut h_joint = 0.0;
    for e in effects {
        let mut marginal = 0.0;
        for (k, v) in [a, b].iter().enumerate() {
            let pk = priors[k] * 0.5 * (e[0] + e[1] * v.0[0] + e[2] * v.0[1] + e[3] * v.0[2]);
            let pk = pk.max(0.0);
            h_joint += linalg::entropy_term(pk);
            marginal += pk;
        }
        h_out += linalg::entropy_term(marginal);
    }
    (h_signal + h_out - h_joint).clamp(0.0, h_signal)
}

/// Accessible information of `{p1: rho_a, 1 - p1: rho_b}`, maximized over rank-1
/// POVMs with up to 3 outcomes. `value` is the maximum (not its negation).
pub fn accessible_info_oracle(p1: f64, a: BlochVector, b: BlochVector) -> Result<OracleResult> {
    make_binary_channel(p1, a, b)?;
    let mi = |e: &[[f64; 4]]| channel_mutual_information(p1, &a, &b, e);
    let axis = projective_search(|m| -mi(&projective_effects(m)));
    let Argmin::Projective(m) = axis.argmin else { unreachable!() };
    let mut res = povm_search(|e| -mi(e), 3, m, 4);
    res.evaluations += axis.evaluations;
    res.value = -res.value;
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{compute_bounds, conditional_discord, Measurement};
    use crate::qstate::{make_bell_diagonal, random_state, validate_state};

    #[test]
    fn projective_oracle_on_bell_diagonal() {
        let rho = make_bell_diagonal(0.6, -0.4, 0.2).unwrap();
        let res = minimize_projective(&rho);
        let b = compute_bounds(&rho).unwrap();
        assert!((res.value - b.lower).abs() < 1e-4, "{} vs {}", res.value, b.lower);
        let Argmin::Projective(m) = res.argmin else { panic!() };
        assert!(m[0].abs() > 0.999, "{m:?}");
        let again = conditional_discord(&rho, &Measurement::Projective(m)).unwrap();
        assert!((again - res.value).abs() < 1e-12);
    }

    #[test]
    fn projective_oracle_trivial_states() {
        let bell = make_bell_diagonal(1.0, -1.0, 1.0).unwrap();
        assert!((minimize_projective(&bell).value - 1.0).abs() < 1e-9);
        let ra = BlochVector([0.2, 0.0, -0.3]).to_qubit_state();
        let rb = random_state(1, 2, 4).unwrap().into_matrix();
        let product = validate_state(ra.kronecker(&rb), 2).unwrap();
        assert!(minimize_projective(&product).value.abs() < 1e-9);
    }

    #[test]
    fn two_outcome_povm_matches_projective() {
        for seed in 0..4 {
            let rho = random_state(2, 1 + seed as usize, seed).unwrap();
            let proj = minimize_projective(&rho);
            let povm = minimize_povm(&rho, 2).unwrap();
            assert!(povm.value <= proj.value + 1e-12);
            assert!((povm.value - proj.value).abs() < 1e-6, "seed {seed}: {} vs {}", povm.value, proj.value);
        }
        assert!(minimize_povm(&random_state(2, 2, 0).unwrap(), 5).is_err());
    }

    #[test]
    fn povm_oracle_reproduces_its_value() {
        let rho = random_state(2, 3, 11).unwrap();
        let res = minimize_povm(&rho, 4).unwrap();
        let Argmin::Povm(p) = &res.argmin else { panic!() };
        let again = conditional_discord(&rho, &Measurement::Povm(p.clone())).unwrap();
        assert!((again - res.value).abs() < 1e-12);
        let b = compute_bounds(&rho).unwrap();
        assert!(b.lower_clamped() <= res.value + 1e-7 && res.value <= b.upper + 1e-7);
    }

    #[test]
    fn classical_quantum_state_has_zero_povm_discord() {
        let rho = crate::qstate::make_binary_channel(
            0.3,
            BlochVector([0.1, 0.5, 0.0]),
            BlochVector([0.0, -0.2, 0.7]),
        )
        .unwrap();
        // Relabel so the classical register is qubit A: swap the two qubits.
        let swap = CMatrix::from_fn(4, 4, |i, j| {
            let (a, b) = (i / 2, i % 2);
            if j == 2 * b + a { linalg::ONE } else { linalg::ZERO }
        });
        let swapped = validate_state(&swap * rho.matrix() * &swap, 2).unwrap();
        assert!(minimize_povm(&swapped, 3).unwrap().value.abs() < 1e-6);
    }

    #[test]
    fn wootters_reference_values() {
        let bell = make_bell_diagonal(1.0, -1.0, 1.0).unwrap();
        assert!((wootters_concurrence(&bell).unwrap() - 1.0).abs() < 1e-9);
        let sep = make_bell_diagonal(0.5, 0.0, 0.0).unwrap();
        assert!(wootters_concurrence(&sep).unwrap() < 1e-9);
        let werner = make_bell_diagonal(-0.8, -0.8, -0.8).unwrap();
        assert!((wootters_concurrence(&werner).unwrap() - 0.7).abs() < 1e-9);
        assert!(wootters_concurrence(&random_state(3, 2, 0).unwrap()).is_err());
    }

    #[test]
    fn ensemble_oracle_rejects_large_dimension() {
        let rho = random_state(9, 1, 0).unwrap();
        assert!(matches!(
            ensemble_oracle(&rho, Objective::Tangle),
            Err(Error::DimensionTooLarge { dim: 9, max: 8 })
        ));
    }

    #[test]
    fn accessible_info_reference_channels() {
        let up = BlochVector([0.0, 0.0, 1.0]);
        let down = BlochVector([0.0, 0.0, -1.0]);
        assert!((accessible_info_oracle(0.5, up, down).unwrap().value - 1.0).abs() < 1e-9);
        let v = BlochVector([0.2, 0.3, 0.1]);
        assert!(accessible_info_oracle(0.3, v, v).unwrap().value.abs() < 1e-9);
        let theta = 1.1f64;
        let b = BlochVector([theta.sin(), 0.0, theta.cos()]);
        let expected = 1.0 - binary_entropy(0.5 * (1.0 + (0.5 * theta).sin()));
        let got = accessible_info_oracle(0.5, up, b).unwrap().value;
        assert!((got - expected).abs() < 1e-4, "{got} vs {expected}");
    }

    #[test]
    fn search_is_deterministic() {
        let rho = random_state(2, 4, 21).unwrap();
        let a = minimize_povm(&rho, 3).unwrap();
        let b = minimize_povm(&rho, 3).unwrap();
        assert_eq!(a, b);
    }
}
