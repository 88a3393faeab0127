//! Small dense linear-algebra helpers shared by the state, correlation and oracle modules.

use nalgebra::{DMatrix, DVector, Matrix2, SymmetricEigen};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Eigenvalues below this magnitude (and above `-PSD_TOL`) are treated as exact zeros.
pub const PSD_TOL: f64 = 1e-9;

/// `sigma_mu` for mu = 0..=3 (identity, X, Y, Z).
pub fn pauli(mu: usize) -> Matrix2<Complex64> {
    match mu {
        0 => Matrix2::new(ONE, ZERO, ZERO, ONE),
        1 => Matrix2::new(ZERO, ONE, ONE, ZERO),
        2 => Matrix2::new(ZERO, -I, I, ZERO),
        3 => Matrix2::new(ONE, ZERO, ZERO, -ONE),
        _ => panic!("Pauli index {mu} out of range"),
    }
}

pub fn pauli_dyn(mu: usize) -> CMatrix {
    let p = pauli(mu);
    CMatrix::from_fn(2, 2, |i, j| p[(i, j)])
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Max elementwise deviation from Hermiticity.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Eigen-decomposition of a Hermitian matrix; the input is symmetrized first.
/// Eigenvalues are returned in ascending order with matching eigenvector columns.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(sym);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 2 {
        let (lo, hi) = eig2(m[(0, 0)].re, m[(1, 1)].re, m[(0, 1)]);
        return vec![lo, hi];
    }
    let sym = (m + m.adjoint()).scale(0.5);
    let mut v: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Eigenvalues (ascending) of the 2x2 Hermitian matrix [[a, c], [c*, b]].
#[inline]
pub fn eig2(a: f64, b: f64, c: Complex64) -> (f64, f64) {
    let mean = 0.5 * (a + b);
    let half = (0.25 * (a - b) * (a - b) + c.norm_sqr()).sqrt();
    (mean - half, mean + half)
}

/// `-x log2 x` with the convention `0 log 0 = 0`.
#[inline]
pub fn entropy_term(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.log2()
    }
}

/// Shannon entropy (bits) of a binary distribution `(p, 1 - p)`.
#[inline]
pub fn binary_entropy(p: f64) -> f64 {
    entropy_term(p) + entropy_term(1.0 - p)
}

/// Entropy of a spectrum, clamping eigenvalues in `[-PSD_TOL, 0]` to zero.
/// Returns the offending eigenvalue if one lies below `-PSD_TOL`.
pub fn spectral_entropy(eigenvalues: &[f64]) -> Result<f64, f64> {
    let mut s = 0.0;
    for &l in eigenvalues {
        if l < -PSD_TOL {
            return Err(l);
        }
        s += entropy_term(l.max(0.0));
    }
    Ok(s)
}

/// Spectrum-based function of a Hermitian matrix: `V f(D) V^dagger`.
pub fn hermitian_function(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(m);
    let d = DVector::from_iterator(vals.len(), vals.iter().map(|&l| Complex64::new(f(l), 0.0)));
    &vecs * CMatrix::from_diagonal(&d) * vecs.adjoint()
}

/// Real part of the trace of a product `Tr(A B)` without forming the product.
pub fn trace_product_re(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut t = 0.0;
    for i in 0..n {
        for k in 0..n {
            t += (a[(i, k)] * b[(k, i)]).re;
        }
    }
    t
}

pub fn trace_re(m: &CMatrix) -> f64 {
    m.diagonal().iter().map(|z| z.re).sum()
}

/// Max elementwise distance between two matrices of the same shape.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Unit vector from polar/azimuthal angles.
#[inline]
pub fn unit_from_angles(theta: f64, phi: f64) -> [f64; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [st * cp, st * sp, ct]
}

#[inline]
pub fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn norm3(a: &[f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_algebra() {
        for mu in 1..4 {
            let p = pauli(mu);
            assert!((p * p - pauli(0)).norm() < 1e-15);
        }
        let xy = pauli(1) * pauli(2);
        assert!((xy - pauli(3) * I).norm() < 1e-15);
    }

    #[test]
    fn eig2_matches_general_solver() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.7, 0.0),
                Complex64::new(0.1, -0.2),
                Complex64::new(0.1, 0.2),
                Complex64::new(0.3, 0.0),
            ],
        );
        let (v, _) = hermitian_eigen(&m);
        let (lo, hi) = eig2(0.7, 0.3, Complex64::new(0.1, -0.2));
        assert!((v[0] - lo).abs() < 1e-14 && (v[1] - hi).abs() < 1e-14);
    }

    #[test]
    fn entropy_clamps_small_negatives() {
        assert_eq!(spectral_entropy(&[-5e-10, 1.0]), Ok(0.0));
        assert!(spectral_entropy(&[-1e-6, 1.0]).is_err());
        assert!((binary_entropy(0.5) - 1.0).abs() < 1e-15);
    }
}
