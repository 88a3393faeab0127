//! Qubit POVMs and the unconstrained parameterization of rank-1 POVMs used by the searches.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};

const CLOSURE_TOL: f64 = 1e-9;

/// A qubit POVM with elements stored in Bloch form: `[e0, e1, e2, e3]` stands for
/// `(e0 I + e1 X + e2 Y + e3 Z) / 2`. A rank-1 element `w (I + n . sigma) / 2` is
/// `[w, w n]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Povm {
    effects: Vec<[f64; 4]>,
}

impl Povm {
    /// Wraps Bloch-form effects after checking positivity and closure.
    pub fn new(effects: Vec<[f64; 4]>) -> Result<Self> {
        let p = Self { effects };
        p.check()?;
        Ok(p)
    }

    /// Rank-1 elements `w_i (I + n_i . sigma) / 2`.
    pub fn rank_one(weights: &[f64], directions: &[[f64; 3]]) -> Result<Self> {
        if weights.len() != directions.len() {
            return Err(Error::InvalidPovm(format!(
                "{} weights for {} directions",
                weights.len(),
                directions.len()
            )));
        }
        let effects = weights
            .iter()
            .zip(directions)
            .map(|(&w, n)| {
                let len = linalg::norm3(n);
                if (len - 1.0).abs() > CLOSURE_TOL {
                    return Err(Error::InvalidPovm(format!("direction has length {len}")));
                }
                Ok([w, w * n[0], w * n[1], w * n[2]])
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(effects)
    }

    /// The two projectors `(I +- m . sigma) / 2`.
    pub fn projective(m: &[f64; 3]) -> Result<Self> {
        Self::rank_one(&[1.0, 1.0], &[*m, [-m[0], -m[1], -m[2]]])
    }

    pub fn from_matrices(elements: &[CMatrix]) -> Result<Self> {
        let effects = elements
            .iter()
            .map(|e| {
                if e.nrows() != 2 || e.ncols() != 2 {
                    return Err(Error::InvalidPovm(format!("element of shape {}x{}", e.nrows(), e.ncols())));
                }
                let dev = linalg::hermiticity_deviation(e);
                if dev > CLOSURE_TOL {
                    return Err(Error::NotHermitian { deviation: dev });
                }
                Ok([
                    (e[(0, 0)] + e[(1, 1)]).re,
                    2.0 * e[(0, 1)].re,
                    -2.0 * e[(0, 1)].im,
                    (e[(0, 0)] - e[(1, 1)]).re,
                ])
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(effects)
    }

    pub fn to_matrices(&self) -> Vec<CMatrix> {
        self.effects
            .iter()
            .map(|e| {
                let mut m = linalg::pauli_dyn(0).scale(0.5 * e[0]);
                for (k, ek) in e.iter().enumerate().skip(1) {
                    m += linalg::pauli_dyn(k).scale(0.5 * ek);
                }
                m
            })
            .collect()
    }

    pub fn effects(&self) -> &[[f64; 4]] {
        &self.effects
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    /// Positivity of each element and `sum E_i = I`, both within 1e-9.
    pub fn check(&self) -> Result<()> {
        if self.effects.is_empty() {
            return Err(Error::InvalidPovm("no elements".into()));
        }
        let mut total = [0.0; 4];
        for (i, e) in self.effects.iter().enumerate() {
            let len = (e[1] * e[1] + e[2] * e[2] + e[3] * e[3]).sqrt();
            if e[0] - len < -CLOSURE_TOL {
                return Err(Error::InvalidPovm(format!(
                    "element {i} has negative eigenvalue {}",
                    0.5 * (e[0] - len)
                )));
            }
            for k in 0..4 {
                total[k] += e[k];
            }
        }
        let dev = (total[0] - 2.0).abs().max(total[1].abs()).max(total[2].abs()).max(total[3].abs());
        if dev > CLOSURE_TOL {
            return Err(Error::InvalidPovm(format!("elements sum to identity only within {dev:.3e}")));
        }
        Ok(())
    }
}

/// Number of search parameters for an `n`-outcome rank-1 POVM.
pub(crate) fn param_len(n: usize) -> usize {
    3 * n - 1
}

/// Maps unconstrained parameters to a rank-1 POVM.
///
/// Layout: `[theta_0, phi_0, (theta_i, phi_i, s_i) for i >= 1]`. Element `i` starts
/// as `|v_i><v_i|` with `v_i = s_i (cos(theta_i/2), e^{i phi_i} sin(theta_i/2))`
/// and `s_0 = 1`; the set is then normalized by `S^{-1/2}` where `S = sum |v_i><v_i|`.
/// Returns `None` when `S` is numerically singular.
pub(crate) fn decode(params: &[f64]) -> Option<Vec<[f64; 4]>> {
    let n = (params.len() + 1) / 3;
    let mut vs: Vec<Vector2<Complex64>> = Vec::with_capacity(n);
    for i in 0..n {
        let (theta, phi, s) = if i == 0 {
            (params[0], params[1], 1.0)
        } else {
            let k = 3 * i - 1;
            (params[k], params[k + 1], params[k + 2])
        };
        let (sin, cos) = (0.5 * theta).sin_cos();
        vs.push(Vector2::new(Complex64::new(s * cos, 0.0), Complex64::from_polar(s * sin, phi)));
    }

    // A second pass removes the rounding left by an ill-conditioned first one.
    let ws = normalize(&normalize(&vs)?)?;
    Some(
        ws.iter()
            .map(|w| {
                let (a, b) = (w[0], w[1]);
                let cross = a.conj() * b;
                let (na, nb) = (a.norm_sqr(), b.norm_sqr());
                [na + nb, 2.0 * cross.re, 2.0 * cross.im, na - nb]
            })
            .collect(),
    )
}

/// `S^{-1/2} v_i` with `S = sum |v_i><v_i|`, or `None` if `S` is numerically singular.
fn normalize(vs: &[Vector2<Complex64>]) -> Option<Vec<Vector2<Complex64>>> {
    let mut s = Matrix2::<Complex64>::zeros();
    for v in vs {
        s += v * v.adjoint();
    }
    let tr = (s[(0, 0)] + s[(1, 1)]).re;
    let det = (s[(0, 0)] * s[(1, 1)] - s[(0, 1)] * s[(1, 0)]).re;
    if det.is_nan() || det <= 1e-8 * tr * tr {
        return None;
    }
    // sqrt(S) = (S + sqrt(det) I) / sqrt(tr + 2 sqrt(det)) for 2x2 positive S.
    let rd = det.sqrt();
    let root = (s + Matrix2::identity().scale(rd)).unscale((tr + 2.0 * rd).sqrt());
    let k = root.try_inverse()?;
    Some(vs.iter().map(|v| k * v).collect())
}

/// Inverse of [`decode`] for a rank-1 POVM whose first element is nonzero.
pub(crate) fn encode(effects: &[[f64; 4]]) -> Vec<f64> {
    let w0 = effects[0][0].max(1e-300);
    let mut out = Vec::with_capacity(param_len(effects.len()));
    for (i, e) in effects.iter().enumerate() {
        let w = e[0].max(1e-300);
        let nz = (e[3] / w).clamp(-1.0, 1.0);
        out.push(nz.acos());
        out.push(e[2].atan2(e[1]));
        if i > 0 {
            out.push((e[0].max(0.0) / w0).sqrt());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decoded_sets_are_povms() {
        let params = [0.3, 1.0, 2.0, -0.5, 0.7, 1.2, 2.2, 1.3, 2.9, 0.1, 0.4];
        for n in 2..=4 {
            let e = decode(&params[..param_len(n)]).unwrap();
            assert_eq!(e.len(), n);
            let p = Povm::new(e).unwrap();
            for e in p.effects() {
                // Rank one: e0 = |e|.
                let len = (e[1] * e[1] + e[2] * e[2] + e[3] * e[3]).sqrt();
                assert!((e[0] - len).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn two_outcomes_decode_to_projective() {
        let e = decode(&[0.4, 0.9, 2.0, 2.5, 0.6]).unwrap();
        assert!((e[0][0] - 1.0).abs() < 1e-12 && (e[1][0] - 1.0).abs() < 1e-12);
        for (a, b) in e[0].iter().zip(&e[1]).skip(1) {
            assert!((a + b).abs() < 1e-12);
        }
    }

    #[test]
    fn encode_round_trips() {
        let s = 1.0 / 3.0f64.sqrt();
        let tetra = Povm::rank_one(
            &[0.5; 4],
            &[[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]],
        )
        .unwrap();
        let back = decode(&encode(tetra.effects())).unwrap();
        for (a, b) in back.iter().zip(tetra.effects()) {
            for k in 0..4 {
                assert!((a[k] - b[k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn degenerate_parameters_are_rejected() {
        // All elements along the same axis: S is rank one.
        assert!(decode(&[0.0, 0.0, 0.0, 0.0, 1.0]).is_none());
    }

    #[test]
    fn matrix_round_trip_and_checks() {
        let p = Povm::projective(&[0.0, 0.6, 0.8]).unwrap();
        let back = Povm::from_matrices(&p.to_matrices()).unwrap();
        for (a, b) in back.effects().iter().zip(p.effects()) {
            for k in 0..4 {
                assert!((a[k] - b[k]).abs() < 1e-14);
            }
        }
        assert!(Povm::new(vec![[1.0, 0.0, 0.0, 1.0]]).is_err());
        assert!(Povm::new(vec![[1.0, 0.0, 0.0, 1.5], [1.0, 0.0, 0.0, -1.5]]).is_err());
        assert!(Povm::rank_one(&[1.0], &[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]).is_err());
    }
}
