//! Lower and upper bounds on the discord `D_A` of a qubit-qudit state.
//!
//! The lower bound is `co(L) + S(rho_A) - S(rho)` with `L = 2 Tr rho_B^2 - 1 + q2(rho)`;
//! the upper bound is the conditional discord obtained by measuring qubit A along
//! the axis returned by [`t1_direction`]. For two qubits the two coincide
//! whenever `q2(rho~) = t1(rho~)`.

mod families;

pub use families::{
    accessible_info_bounds, dqc1_bounds, dqc1_upper, x_state_coincidence_condition,
    x_state_discord, ChannelBounds, DqcParams,
};

use serde::Serialize;

use crate::correlation::{
    filtered_state, lorentz_spectrum, pauli_components, q_matrix, t1_direction,
    LorentzSpectrum, MeasurementDirection,
};
use crate::error::{Error, Result};
use crate::linalg::{self, binary_entropy, eig2, CMatrix};
use crate::oracle::Povm;
use crate::qstate::{BlochVector, DensityMatrix, Subsystem};

/// Relative tolerance on `|q2(rho~) - t1(rho~)|` for declaring the bounds coincident.
pub const COINCIDENCE_TOL: f64 = 1e-7;

/// Outcomes with smaller probability are dropped from conditional entropies.
pub const MIN_OUTCOME_PROB: f64 = 1e-14;

const H_CLAMP: f64 = 1e-12;

/// `h(z)`: binary entropy of `(1 + sqrt z) / 2`, defined on `[0, 1]`.
pub fn h(z: f64) -> Result<f64> {
    if !(-H_CLAMP..=1.0 + H_CLAMP).contains(&z) {
        return Err(Error::Domain { function: "h", value: z });
    }
    Ok(h_clamped(z))
}

#[inline]
pub(crate) fn h_clamped(z: f64) -> f64 {
    let r = z.clamp(0.0, 1.0).sqrt();
    binary_entropy(0.5 * (1.0 + r))
}

/// `co(z) = h(z)` for `z >= 0` and `log2(2 / (1 + z))` for `z <= 0`.
pub fn co(z: f64) -> Result<f64> {
    if z.is_nan() || z <= -1.0 {
        return Err(Error::Domain { function: "co", value: z });
    }
    if z >= 0.0 {
        h(z)
    } else {
        Ok((2.0 / (1.0 + z)).log2())
    }
}

/// A qubit measurement: a projective axis or a general POVM.
#[derive(Debug, Clone, PartialEq)]
pub enum Measurement {
    Projective([f64; 3]),
    Povm(Povm),
}

/// Precomputed data for evaluating conditional states of B after measuring A.
///
/// A qubit operator `E = (e0 I + e . sigma) / 2` leaves B in the unnormalized state
/// `Tr_A[(E (x) I) rho] = (e0 B_0 + e . B) / 2`, with `B_mu = Tr_A[(sigma_mu (x) I) rho]`.
#[derive(Debug, Clone)]
pub struct ConditionalModel {
    b: [CMatrix; 4],
    x: [f64; 3],
    entropy_a: f64,
    entropy_ab: f64,
}

/// Probability and normalized spectrum of one measurement outcome on B.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub probability: f64,
    pub spectrum: Vec<f64>,
}

impl Outcome {
    pub fn entropy(&self) -> f64 {
        let s: f64 = self.spectrum.iter().map(|&l| linalg::entropy_term(l.max(0.0))).sum();
        s.max(0.0)
    }

    pub fn purity(&self) -> f64 {
        self.spectrum.iter().map(|l| l * l).sum()
    }
}

impl ConditionalModel {
    pub fn new(rho: &DensityMatrix) -> Self {
        let b = pauli_components(rho);
        let x = rho.bloch_a().0;
        let entropy_a = rho.partial_trace(Subsystem::A).entropy();
        let entropy_ab = rho.entropy();
        Self { b, x, entropy_a, entropy_ab }
    }

    pub fn dim_b(&self) -> usize {
        self.b[0].nrows()
    }

    /// `S(rho_A) - S(rho)`.
    pub fn entropy_offset(&self) -> f64 {
        self.entropy_a - self.entropy_ab
    }

    pub fn entropy_a(&self) -> f64 {
        self.entropy_a
    }

    pub fn entropy_ab(&self) -> f64 {
        self.entropy_ab
    }

    /// Outcome of the qubit effect `(e0 I + e . sigma) / 2`. The spectrum is empty
    /// when the probability is below [`MIN_OUTCOME_PROB`].
    pub fn outcome(&self, e: &[f64; 4]) -> Outcome {
        let p = 0.5 * (e[0] + e[1] * self.x[0] + e[2] * self.x[1] + e[3] * self.x[2]);
        if p < MIN_OUTCOME_PROB {
            return Outcome { probability: p.max(0.0), spectrum: Vec::new() };
        }
        let scale = 0.5 / p;
        let spectrum = if self.dim_b() == 2 {
            let entry = |i: usize, j: usize| {
                (self.b[0][(i, j)] * e[0]
                    + self.b[1][(i, j)] * e[1]
                    + self.b[2][(i, j)] * e[2]
                    + self.b[3][(i, j)] * e[3])
                    * scale
            };
            let (lo, hi) = eig2(entry(0, 0).re, entry(1, 1).re, entry(0, 1));
            vec![lo, hi]
        } else {
            let mut c = self.b[0].scale(e[0]);
            for (bk, ek) in self.b.iter().zip(e).skip(1) {
                c += bk.scale(*ek);
            }
            linalg::hermitian_eigenvalues(&c.scale(scale))
        };
        Outcome { probability: p, spectrum }
    }

    /// `sum_i p_i f(outcome_i)` over a list of effects in Bloch form.
    pub fn average<F: Fn(&Outcome) -> f64>(&self, effects: &[[f64; 4]], f: F) -> f64 {
        effects
            .iter()
            .map(|e| {
                let o = self.outcome(e);
                if o.probability < MIN_OUTCOME_PROB {
                    0.0
                } else {
                    o.probability * f(&o)
                }
            })
            .sum()
    }

    /// `sum_i p_i S(rho_{B|i})`.
    pub fn conditional_entropy(&self, effects: &[[f64; 4]]) -> f64 {
        self.average(effects, Outcome::entropy)
    }

    /// Discord evaluated at a fixed measurement (no minimization).
    pub fn conditional_discord(&self, effects: &[[f64; 4]]) -> f64 {
        self.conditional_entropy(effects) + self.entropy_offset()
    }

    /// Conditional discord for the projective measurement `(I +- m . sigma) / 2`.
    pub fn projective_discord(&self, m: &[f64; 3]) -> f64 {
        self.conditional_discord(&projective_effects(m))
    }
}

/// Effects `(1, +-m)` of the projective measurement along `m`.
pub fn projective_effects(m: &[f64; 3]) -> [[f64; 4]; 2] {
    [[1.0, m[0], m[1], m[2]], [1.0, -m[0], -m[1], -m[2]]]
}

/// `sum_i p_i S(rho_{B|i}) + S(rho_A) - S(rho)` at the given measurement.
pub fn conditional_discord(rho: &DensityMatrix, meas: &Measurement) -> Result<f64> {
    let model = ConditionalModel::new(rho);
    match meas {
        Measurement::Projective(m) => {
            let n = linalg::norm3(m);
            if (n - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidPovm(format!("projective axis has length {n}")));
            }
            Ok(model.projective_discord(m))
        }
        Measurement::Povm(povm) => {
            povm.check()?;
            Ok(model.conditional_discord(povm.effects()))
        }
    }
}

/// Entropy of the state's B marginal and `2 Tr rho_B^2 - 1 + q2(rho)`.
fn l_value(rho: &DensityMatrix) -> Result<(f64, LorentzSpectrum)> {
    let spectrum = lorentz_spectrum(&q_matrix(rho))?;
    let rb = rho.partial_trace(Subsystem::B);
    Ok((2.0 * rb.purity() - 1.0 + spectrum.q2(), spectrum))
}

/// `co(L) + S(rho_A) - S(rho)`. Not clamped at zero.
pub fn discord_lower(rho: &DensityMatrix) -> Result<f64> {
    let (l, _) = l_value(rho)?;
    let sa = rho.partial_trace(Subsystem::A).entropy();
    Ok(co(l)? + sa - rho.entropy())
}

/// Conditional discord at the axis `m` built from the filtered state.
pub fn discord_upper(rho: &DensityMatrix) -> Result<f64> {
    let filtered = filtered_state(rho)?;
    let dir = t1_direction(&filtered, &rho.bloch_a());
    Ok(ConditionalModel::new(rho).projective_discord(&dir.m))
}

/// `h(1 - tau) + S(rho_A) - S(rho)` with `tau = 2(1 - Tr rho_B^2) - (1 - x^2) t1(rho~)`.
/// Looser than [`discord_upper`]; two-qubit states only.
pub fn discord_upper_weak(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim_b() != 2 {
        return Err(Error::WrongDimension { expected: 2, actual: rho.dim_b() });
    }
    let filtered = filtered_state(rho)?;
    let x = rho.bloch_a();
    let dir = t1_direction(&filtered, &x);
    let tau = tangle_bc(rho, &x, dir.t1);
    let sa = rho.partial_trace(Subsystem::A).entropy();
    Ok(h(1.0 - tau)? + sa - rho.entropy())
}

/// `2(1 - Tr rho_B^2) - (1 - x^2) t1(rho~)`, the tangle of the purifying `rho_BC`.
pub fn tangle_bc(rho: &DensityMatrix, x: &BlochVector, t1: f64) -> f64 {
    let rb = rho.partial_trace(Subsystem::B);
    2.0 * (1.0 - rb.purity()) - (1.0 - x.length_sq()) * t1
}

/// Everything computed on the way to the two bounds.
#[derive(Debug, Clone, Serialize)]
pub struct DiscordBounds {
    pub lower: f64,
    pub upper: f64,
    pub coincide: bool,
    pub direction: MeasurementDirection,
    /// `L = 2 Tr rho_B^2 - 1 + q2(rho)`.
    pub l_value: f64,
    /// `q2` of the filtered state.
    pub q2: f64,
    /// `t1` of the filtered state.
    pub t1: f64,
    /// Lorentz spectrum of the state itself.
    pub spectrum: LorentzSpectrum,
    pub bloch_a: [f64; 3],
    pub entropy_a: f64,
    pub entropy_b: f64,
    pub entropy_ab: f64,
}

impl DiscordBounds {
    /// `max(0, lower)`: negative lower bounds carry no information.
    pub fn lower_clamped(&self) -> f64 {
        self.lower.max(0.0)
    }

    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }
}

pub fn compute_bounds(rho: &DensityMatrix) -> Result<DiscordBounds> {
    let filtered = filtered_state(rho)?;
    let x = rho.bloch_a();
    let (l, spectrum) = l_value(rho)?;
    let filtered_spectrum = lorentz_spectrum(&q_matrix(&filtered))?;
    let direction = t1_direction(&filtered, &x);
    let model = ConditionalModel::new(rho);
    let entropy_b = rho.partial_trace(Subsystem::B).entropy();
    let lower = co(l)? + model.entropy_offset();
    let upper = model.projective_discord(&direction.m);
    let q2 = filtered_spectrum.q2();
    let t1 = direction.t1;
    let coincide = rho.dim_b() == 2 && (q2 - t1).abs() <= COINCIDENCE_TOL * t1.abs().max(1.0);
    Ok(DiscordBounds {
        lower,
        upper,
        coincide,
        direction,
        l_value: l,
        q2,
        t1,
        spectrum,
        bloch_a: x.0,
        entropy_a: model.entropy_a(),
        entropy_b,
        entropy_ab: model.entropy_ab(),
    })
}
