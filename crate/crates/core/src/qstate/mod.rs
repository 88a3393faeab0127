//! Qubit-qudit density matrices: validation, partial traces, entropies and
//! the state families used throughout the crate.
//!
//! Basis ordering is `|a> (x) |b>` with the qubit index `a` slowest, so a
//! `2d x 2d` state splits into four `d x d` blocks `rho[a][a']`.

mod families;
mod io;

pub use families::{
    make_bell_diagonal, make_binary_channel, make_dqc1, make_x_state, random_local_unitary,
    random_state, random_unitary, seeded_rng, traceless_unitary, XStateParams,
};
pub use io::{read_state, read_unitary, state_from_json, state_to_json, unitary_from_json,
    unitary_to_json, write_state, write_unitary, StateFile, UnitaryFile};

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    self, hermitian_eigen, hermitian_eigenvalues, hermiticity_deviation, spectral_entropy,
    trace_re, CMatrix,
};

/// Tolerance used by every validity check on states and unitaries.
pub const VALIDATION_TOL: f64 = 1e-9;

/// Which side of the bipartition to keep in a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// A validated density matrix on `C^dim_a (x) C^dim_b`.
///
/// Bipartite states always have `dim_a == 2`. Marginals produced by
/// [`partial_trace`] are stored as `(2, 1)` for the qubit and `(1, d)` for the qudit.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim_a: usize,
    dim_b: usize,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates a `2d x 2d` qubit-qudit state. Same as [`validate_state`].
    pub fn new(matrix: CMatrix, dim_b: usize) -> Result<Self> {
        validate_state(matrix, dim_b)
    }

    /// Validates a single-system state of any dimension, stored as `(1, n)`.
    pub fn single(matrix: CMatrix) -> Result<Self> {
        let n = matrix.nrows();
        if matrix.ncols() != n || n == 0 {
            return Err(Error::Shape { rows: matrix.nrows(), cols: matrix.ncols(), dim_b: n });
        }
        check_invariants(&matrix)?;
        Ok(Self { dim_a: 1, dim_b: n, matrix })
    }

    /// Hermitian-symmetrizes and wraps without the PSD/trace checks. Callers
    /// must construct the matrix from an expression that is a state by design.
    pub(crate) fn from_trusted(matrix: CMatrix, dim_a: usize, dim_b: usize) -> Self {
        let matrix = (&matrix + matrix.adjoint()).scale(0.5);
        Self { dim_a, dim_b, matrix }
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// The `d x d` block `<a| rho |a'>` (requires `dim_a == 2`).
    pub fn block(&self, a: usize, a_prime: usize) -> CMatrix {
        let d = self.dim_b;
        self.matrix.view((a * d, a_prime * d), (d, d)).into_owned()
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// `Tr rho^2`.
    pub fn purity(&self) -> f64 {
        linalg::trace_product_re(&self.matrix, &self.matrix)
    }

    /// Von Neumann entropy in bits.
    pub fn entropy(&self) -> f64 {
        // Validated states have no eigenvalue below -PSD_TOL.
        spectral_entropy(&self.eigenvalues()).unwrap_or(f64::NAN)
    }

    pub fn partial_trace(&self, keep: Subsystem) -> DensityMatrix {
        partial_trace(self, keep)
    }

    /// Bloch vector of the qubit marginal, `x_a = Tr[(sigma_a (x) I) rho]`.
    pub fn bloch_a(&self) -> BlochVector {
        let d = self.dim_b;
        let mut x = [0.0; 3];
        for k in 0..d {
            let r01 = self.matrix[(k, d + k)];
            x[0] += 2.0 * r01.re;
            x[1] -= 2.0 * r01.im;
            x[2] += self.matrix[(k, k)].re - self.matrix[(d + k, d + k)].re;
        }
        BlochVector(x)
    }

    /// `<O>` for an operator on the full space.
    pub fn expectation(&self, op: &CMatrix) -> f64 {
        linalg::trace_product_re(&self.matrix, op)
    }

    /// `(V_A (x) V_B) rho (V_A (x) V_B)^dagger`.
    pub fn conjugate_local(&self, va: &CMatrix, vb: &CMatrix) -> DensityMatrix {
        let v = va.kronecker(vb);
        DensityMatrix::from_trusted(&v * &self.matrix * v.adjoint(), self.dim_a, self.dim_b)
    }
}

fn check_invariants(matrix: &CMatrix) -> Result<()> {
    let dev = hermiticity_deviation(matrix);
    if dev > VALIDATION_TOL {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let tr = trace_re(matrix);
    if (tr - 1.0).abs() > VALIDATION_TOL {
        return Err(Error::NotUnitTrace { deviation: (tr - 1.0).abs() });
    }
    let min = hermitian_eigenvalues(matrix)[0];
    if min < -VALIDATION_TOL {
        return Err(Error::NotPositive { min_eigenvalue: min });
    }
    Ok(())
}

/// Validates a `2 dim_b x 2 dim_b` matrix as a qubit-qudit density matrix.
pub fn validate_state(matrix: CMatrix, dim_b: usize) -> Result<DensityMatrix> {
    let (rows, cols) = matrix.shape();
    if dim_b == 0 || rows != cols || rows != 2 * dim_b {
        return Err(Error::Shape { rows, cols, dim_b });
    }
    check_invariants(&matrix)?;
    Ok(DensityMatrix { dim_a: 2, dim_b, matrix })
}

/// Partial trace over the complementary subsystem.
pub fn partial_trace(rho: &DensityMatrix, keep: Subsystem) -> DensityMatrix {
    let (da, db) = (rho.dim_a, rho.dim_b);
    let m = &rho.matrix;
    match keep {
        Subsystem::A => {
            let r = CMatrix::from_fn(da, da, |a, ap| {
                (0..db).map(|b| m[(a * db + b, ap * db + b)]).sum()
            });
            DensityMatrix::from_trusted(r, da, 1)
        }
        Subsystem::B => {
            let r = CMatrix::from_fn(db, db, |b, bp| {
                (0..da).map(|a| m[(a * db + b, a * db + bp)]).sum()
            });
            DensityMatrix::from_trusted(r, 1, db)
        }
    }
}

/// Von Neumann entropy (bits) of any Hermitian unit-trace matrix.
pub fn von_neumann_entropy(matrix: &CMatrix) -> Result<f64> {
    spectral_entropy(&hermitian_eigenvalues(matrix))
        .map_err(|min_eigenvalue| Error::NotPositive { min_eigenvalue })
}

/// Bloch vector of a qubit state.
pub fn bloch_vector(rho_a: &DensityMatrix) -> Result<BlochVector> {
    if rho_a.dim() != 2 {
        return Err(Error::WrongDimension { expected: 2, actual: rho_a.dim() });
    }
    let m = rho_a.matrix();
    Ok(BlochVector([2.0 * m[(0, 1)].re, -2.0 * m[(0, 1)].im, m[(0, 0)].re - m[(1, 1)].re]))
}

/// Local filter `(F (x) I) rho (F (x) I)^dagger`, renormalized.
pub fn apply_filter(rho: &DensityMatrix, filter: &CMatrix) -> Result<DensityMatrix> {
    if filter.shape() != (2, 2) {
        return Err(Error::Shape { rows: filter.nrows(), cols: filter.ncols(), dim_b: 1 });
    }
    let det = (filter[(0, 0)] * filter[(1, 1)] - filter[(0, 1)] * filter[(1, 0)]).norm();
    if det <= 1e-12 {
        return Err(Error::SingularFilter { det });
    }
    let f = filter.kronecker(&linalg::identity(rho.dim_b));
    let out = &f * &rho.matrix * f.adjoint();
    let norm = trace_re(&out);
    Ok(DensityMatrix::from_trusted(out.unscale(norm), rho.dim_a, rho.dim_b))
}

/// Purification `|psi>_ABC = sum_i sqrt(lambda_i) |psi_i>_AB (x) |i>_C` with `dim C = 2d`.
/// Index ordering is `(a, b, c)` with `c` fastest.
pub fn purify(rho: &DensityMatrix) -> DVector<Complex64> {
    let n = rho.dim();
    let (vals, vecs) = hermitian_eigen(&rho.matrix);
    // Largest eigenvalue first so a pure state lands on |1>_C.
    let mut psi = DVector::zeros(n * n);
    for (c, k) in (0..n).rev().enumerate() {
        let w = vals[k].max(0.0).sqrt();
        if w == 0.0 {
            continue;
        }
        for ab in 0..n {
            psi[ab * n + c] = vecs[(ab, k)] * w;
        }
    }
    psi
}

/// `Tr_C |psi><psi|` for a vector laid out as `(ab, c)` with `dim C = n_c`.
pub fn trace_out_last(psi: &DVector<Complex64>, n_c: usize) -> CMatrix {
    let n_ab = psi.len() / n_c;
    CMatrix::from_fn(n_ab, n_ab, |i, j| {
        (0..n_c).map(|c| psi[i * n_c + c] * psi[j * n_c + c].conj()).sum()
    })
}

/// A real Bloch 3-vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector(pub [f64; 3]);

impl BlochVector {
    /// Checks `|v| <= 1 + 1e-9`.
    pub fn new(v: [f64; 3]) -> Result<Self> {
        let len = linalg::norm3(&v);
        if len > 1.0 + VALIDATION_TOL {
            return Err(Error::InvalidBlochLength(len));
        }
        Ok(Self(v))
    }

    pub fn length(&self) -> f64 {
        linalg::norm3(&self.0)
    }

    pub fn length_sq(&self) -> f64 {
        linalg::dot3(&self.0, &self.0)
    }

    pub fn dot(&self, other: &BlochVector) -> f64 {
        linalg::dot3(&self.0, &other.0)
    }

    /// `(I + v . sigma) / 2`.
    pub fn to_qubit_state(&self) -> CMatrix {
        let [x, y, z] = self.0;
        CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.5 * (1.0 + z), 0.0),
                Complex64::new(0.5 * x, -0.5 * y),
                Complex64::new(0.5 * x, 0.5 * y),
                Complex64::new(0.5 * (1.0 - z), 0.0),
            ],
        )
    }
}

/// A validated `d x d` unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    matrix: CMatrix,
}

impl UnitaryMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let n = matrix.nrows();
        if matrix.ncols() != n || n == 0 {
            return Err(Error::Shape { rows: n, cols: matrix.ncols(), dim_b: n });
        }
        let dev = linalg::max_abs_diff(&(&matrix * matrix.adjoint()), &linalg::identity(n));
        if dev > VALIDATION_TOL {
            return Err(Error::NotUnitary { deviation: dev });
        }
        Ok(Self { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// `Tr U^2`.
    pub fn trace_of_square(&self) -> Complex64 {
        let n = self.dim();
        let mut t = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for k in 0..n {
                t += self.matrix[(i, k)] * self.matrix[(k, i)];
            }
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ONE, ZERO};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    pub(crate) fn phi_plus() -> DensityMatrix {
        let mut m = CMatrix::zeros(4, 4);
        for &i in &[0, 3] {
            for &j in &[0, 3] {
                m[(i, j)] = c(0.5);
            }
        }
        validate_state(m, 2).unwrap()
    }

    #[test]
    fn maximally_mixed_is_valid() {
        let rho = validate_state(linalg::identity(4).scale(0.25), 2).unwrap();
        assert!((rho.entropy() - 2.0).abs() < 1e-12);
        assert!((rho.purity() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn bell_state_is_pure() {
        let rho = phi_plus();
        assert!((rho.purity() - 1.0).abs() < 1e-12);
        assert!(rho.entropy().abs() < 1e-9);
        let ra = rho.partial_trace(Subsystem::A);
        assert!(linalg::max_abs_diff(ra.matrix(), &linalg::identity(2).scale(0.5)) < 1e-15);
    }

    #[test]
    fn negative_diagonal_is_rejected() {
        let m = CMatrix::from_diagonal(&DVector::from_vec(vec![c(0.6), c(0.6), c(-0.1), c(-0.1)]));
        match validate_state(m, 2) {
            Err(Error::NotPositive { min_eigenvalue }) => assert!((min_eigenvalue + 0.1).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_hermitian_and_bad_trace_are_rejected() {
        let mut m = linalg::identity(4).scale(0.25);
        m[(0, 1)] = c(0.1);
        assert!(matches!(validate_state(m, 2), Err(Error::NotHermitian { .. })));
        let m = linalg::identity(4).scale(0.3);
        assert!(matches!(validate_state(m, 2), Err(Error::NotUnitTrace { .. })));
        let m = linalg::identity(3).scale(1.0 / 3.0);
        assert!(matches!(validate_state(m, 2), Err(Error::Shape { .. })));
    }

    #[test]
    fn product_partial_traces() {
        let ra = BlochVector([0.1, -0.2, 0.3]).to_qubit_state();
        let rb = CMatrix::from_diagonal(&DVector::from_vec(vec![c(0.5), c(0.3), c(0.2)]));
        let rho = validate_state(ra.kronecker(&rb), 3).unwrap();
        assert!(linalg::max_abs_diff(rho.partial_trace(Subsystem::A).matrix(), &ra) < 1e-15);
        assert!(linalg::max_abs_diff(rho.partial_trace(Subsystem::B).matrix(), &rb) < 1e-15);
        let x = rho.bloch_a();
        assert!((x.0[0] - 0.1).abs() < 1e-15 && (x.0[1] + 0.2).abs() < 1e-15 && (x.0[2] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn entropy_of_half_half_spectrum() {
        let m = CMatrix::from_diagonal(&DVector::from_vec(vec![c(0.5), c(0.5), ZERO, ZERO]));
        assert!((von_neumann_entropy(&m).unwrap() - 1.0).abs() < 1e-15);
        let bad = CMatrix::from_diagonal(&DVector::from_vec(vec![c(1.1), c(-0.1)]));
        assert!(matches!(von_neumann_entropy(&bad), Err(Error::NotPositive { .. })));
    }

    #[test]
    fn bloch_vectors_of_simple_states() {
        let mixed = DensityMatrix::from_trusted(linalg::identity(2).scale(0.5), 2, 1);
        assert_eq!(bloch_vector(&mixed).unwrap().0, [0.0, 0.0, 0.0]);
        let zero = DensityMatrix::from_trusted(
            CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO]),
            2,
            1,
        );
        assert_eq!(bloch_vector(&zero).unwrap().0, [0.0, 0.0, 1.0]);
        let sx = DensityMatrix::from_trusted(BlochVector([0.3, 0.0, 0.0]).to_qubit_state(), 2, 1);
        let v = bloch_vector(&sx).unwrap();
        assert!((v.0[0] - 0.3).abs() < 1e-15 && v.0[1] == 0.0 && v.0[2] == 0.0);
    }

    #[test]
    fn filter_examples() {
        let rho = phi_plus();
        let same = apply_filter(&rho, &linalg::identity(2)).unwrap();
        assert!(linalg::max_abs_diff(same.matrix(), rho.matrix()) < 1e-15);

        let f = CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, c(0.5)]);
        let filtered = apply_filter(&rho, &f).unwrap();
        let x = filtered.bloch_a();
        assert!(x.0[0].abs() < 1e-15 && x.0[1].abs() < 1e-15 && (x.0[2] - 0.6).abs() < 1e-14);

        let singular = CMatrix::from_row_slice(2, 2, &[ONE, ONE, ONE, ONE]);
        assert!(matches!(apply_filter(&rho, &singular), Err(Error::SingularFilter { .. })));
    }

    #[test]
    fn purification_of_pure_and_mixed_states() {
        let rho = phi_plus();
        let psi = purify(&rho);
        assert!((psi.norm() - 1.0).abs() < 1e-12);
        assert!(linalg::max_abs_diff(&trace_out_last(&psi, 4), rho.matrix()) < 1e-10);
        // Pure state: only the first C slot is populated.
        for ab in 0..4 {
            for c in 1..4 {
                assert!(psi[ab * 4 + c].norm() < 1e-12);
            }
        }

        let mixed = validate_state(linalg::identity(4).scale(0.25), 2).unwrap();
        let psi = purify(&mixed);
        let reduced_c = trace_out_first(&psi, 4);
        assert!(linalg::max_abs_diff(&reduced_c, &linalg::identity(4).scale(0.25)) < 1e-12);
    }

    pub(crate) fn trace_out_first(psi: &DVector<Complex64>, n_ab: usize) -> CMatrix {
        let n_c = psi.len() / n_ab;
        CMatrix::from_fn(n_c, n_c, |i, j| {
            (0..n_ab).map(|ab| psi[ab * n_c + i] * psi[ab * n_c + j].conj()).sum()
        })
    }

    #[test]
    fn unitary_validation() {
        assert!(UnitaryMatrix::new(linalg::pauli_dyn(2)).is_ok());
        let not_unitary = linalg::identity(2).scale(1.1);
        assert!(matches!(UnitaryMatrix::new(not_unitary), Err(Error::NotUnitary { .. })));
        let u = UnitaryMatrix::new(linalg::pauli_dyn(3)).unwrap();
        assert!(u.trace().norm() < 1e-15);
        assert!((u.trace_of_square() - c(2.0)).norm() < 1e-15);
    }
}
