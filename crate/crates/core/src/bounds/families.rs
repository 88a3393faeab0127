//! Closed forms for the state families whose bounds can be written explicitly.

use serde::Serialize;

use super::{co, h, h_clamped, ConditionalModel, COINCIDENCE_TOL};
use crate::correlation::{filtered_state, lorentz_spectrum, q_matrix, t1_direction};
use crate::error::{Error, Result};
use crate::linalg::{self, binary_entropy};
use crate::qstate::{make_binary_channel, make_x_state, BlochVector, Subsystem, UnitaryMatrix, XStateParams};

/// Left and right sides of the X-state coincidence condition
/// `|sqrt(r00 r33) - sqrt(r11 r22)| <= |r03| + |r12|`.
pub fn x_state_coincidence_condition(p: &XStateParams) -> (f64, f64) {
    let [r00, r11, r22, r33, r03, r12] = p.entries();
    let lhs = ((r00 * r33).max(0.0).sqrt() - (r11 * r22).max(0.0).sqrt()).abs();
    (lhs, r03.abs() + r12.abs())
}

/// Exact discord of an X-state in the coincident family:
/// `h(y^2 + max(s1^2, s2^2)) + h(x^2) - S(rho_X)`, where the spectrum entropy
/// splits over the two 2x2 blocks of the X-matrix.
pub fn x_state_discord(p: XStateParams) -> Result<f64> {
    let (lhs, rhs) = x_state_coincidence_condition(&p);
    if lhs > rhs + 1e-12 {
        return Err(Error::ConditionViolated { lhs, rhs });
    }
    let rho = make_x_state(p)?;
    let filtered = filtered_state(&rho)?;
    let q2 = lorentz_spectrum(&q_matrix(&filtered))?.q2();
    let t1 = t1_direction(&filtered, &rho.bloch_a()).t1;
    let gap = (q2 - t1).abs();
    if gap > COINCIDENCE_TOL * t1.abs().max(1.0) {
        return Err(Error::CoincidenceFailed { gap });
    }

    let XStateParams { x, y, s1, s2, s3 } = p;
    let smax = (s1 * s1).max(s2 * s2);
    let mut entropy_ab = binary_entropy(0.5 * (1.0 + s3));
    for sign in [1.0, -1.0] {
        let w = 0.5 * (1.0 + sign * s3);
        if w > 0.0 {
            let r2 = ((x + sign * y).powi(2) + (s1 - sign * s2).powi(2)) / (1.0 + sign * s3).powi(2);
            entropy_ab += w * h(r2)?;
        }
    }
    Ok(h(y * y + smax)? + h(x * x)? - entropy_ab)
}

/// DQC1 parameters derived from the unitary: `u1 = |Tr U| / d`,
/// `beta = (d + |Tr U^2|) / 2d` and `e^{2 i phase} = Tr U^2 / |Tr U^2|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DqcParams {
    pub d: usize,
    pub alpha: f64,
    pub u1: f64,
    pub beta: f64,
    pub phase: f64,
}

/// Largest `u1` for which the closed-form lower bound is used.
pub const DQC1_TRACELESS_TOL: f64 = 1e-9;

impl DqcParams {
    pub fn from_unitary(u: &UnitaryMatrix, alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidAlpha(alpha));
        }
        let d = u.dim();
        let tr2 = u.trace_of_square();
        Ok(Self {
            d,
            alpha,
            u1: u.trace().norm() / d as f64,
            beta: (d as f64 + tr2.norm()) / (2.0 * d as f64),
            phase: 0.5 * tr2.arg(),
        })
    }
}

/// `h(alpha^2 beta) - h(alpha^2)`; valid for every unitary.
pub fn dqc1_upper(p: &DqcParams) -> f64 {
    let a2 = p.alpha * p.alpha;
    h_clamped(a2 * p.beta) - h_clamped(a2)
}

/// `(log2(2 / (1 + alpha^2 beta)) - h(alpha^2), h(alpha^2 beta) - h(alpha^2))`.
/// The lower bound needs `u1 = 0` and `d >= 4`; otherwise a `Regime` error is
/// returned and callers should fall back to the generic pipeline.
pub fn dqc1_bounds(p: &DqcParams) -> Result<(f64, f64)> {
    if p.u1 > DQC1_TRACELESS_TOL || p.d < 4 {
        return Err(Error::Regime { u1: p.u1, d: p.d });
    }
    let a2 = p.alpha * p.alpha;
    let lower = (2.0 / (1.0 + a2 * p.beta)).log2() - h_clamped(a2);
    Ok((lower, dqc1_upper(p)))
}

/// Bounds on the accessible information of a binary qubit channel `{p_k, rho_k}`.
#[derive(Debug, Clone, Serialize)]
pub struct ChannelBounds {
    pub holevo_chi: f64,
    pub upper: f64,
    pub lower: f64,
    pub coincide: bool,
    pub optimal_direction: [f64; 3],
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub delta: f64,
    pub c_plus: [f64; 3],
    pub c_minus: [f64; 3],
    /// `L = 2 Tr rho_B^2 - 1 + q2(rho)` of the classical-quantum state.
    pub l_value: f64,
}

/// Tolerance on `p1^2 (1 - a^2) - p2^2 (1 - b^2)` for declaring the bounds coincident.
pub const CHANNEL_COINCIDENCE_TOL: f64 = 1e-9;

/// The accessible information `I` satisfies `D_A = chi - I` for the state
/// `p1 rho_a (x) |0><0| + p2 rho_b (x) |1><1|`, so the discord bounds turn into
/// `chi - D_A(rho | m) <= I <= min(chi, S(rho_B) - co(L))`.
pub fn accessible_info_bounds(p1: f64, a: BlochVector, b: BlochVector) -> Result<ChannelBounds> {
    let rho = make_binary_channel(p1, a, b)?;
    let p2 = 1.0 - p1;
    let delta = p1 - p2;
    let comb = |s: f64| {
        [p1 * a.0[0] + s * p2 * b.0[0], p1 * a.0[1] + s * p2 * b.0[1], p1 * a.0[2] + s * p2 * b.0[2]]
    };
    let (c_plus, c_minus) = (comb(1.0), comb(-1.0));
    let root = ((1.0 - a.length_sq()).max(0.0) * (1.0 - b.length_sq()).max(0.0)).sqrt();
    let lambda_plus = 0.5 * (1.0 - a.dot(&b) + root);
    let lambda_minus = 0.5 * (1.0 - a.dot(&b) - root);

    let model = ConditionalModel::new(&rho);
    let s_signals = p1 * h_clamped(a.length_sq()) + p2 * h_clamped(b.length_sq());
    let holevo_chi = (model.entropy_a() - s_signals).max(0.0);

    let q2 = lorentz_spectrum(&q_matrix(&rho))?.q2();
    let l_value = 2.0 * rho.partial_trace(Subsystem::B).purity() - 1.0 + q2;
    let upper = (binary_entropy(p1) - co(l_value)?).min(holevo_chi);

    let optimal_direction = match filtered_state(&rho) {
        Ok(f) => t1_direction(&f, &rho.bloch_a()).m,
        // Pure, identical signals: every measurement is equally useless.
        Err(Error::SingularMarginal { .. }) => {
            let n = linalg::norm3(&c_minus);
            if n > 1e-12 {
                [c_minus[0] / n, c_minus[1] / n, c_minus[2] / n]
            } else {
                [0.0, 0.0, 1.0]
            }
        }
        Err(e) => return Err(e),
    };
    let lower = (holevo_chi - model.projective_discord(&optimal_direction)).max(0.0);
    let coincide = (p1 * p1 * (1.0 - a.length_sq()) - p2 * p2 * (1.0 - b.length_sq())).abs()
        <= CHANNEL_COINCIDENCE_TOL;
    Ok(ChannelBounds {
        holevo_chi,
        upper,
        lower,
        coincide,
        optimal_direction,
        lambda_plus,
        lambda_minus,
        delta,
        c_plus,
        c_minus,
        l_value,
    })
}
