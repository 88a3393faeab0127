//! Correlation machinery of a qubit-qudit state: the filtered state, the
//! 4x4 Q-operator, its Lorentz spectrum, and the measurement direction built
//! from the principal eigenvector of the 3x3 block.

use nalgebra::{Matrix3, Matrix4, Schur, SymmetricEigen};
use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{self, hermitian_eigen, trace_product_re, trace_re, CMatrix};
use crate::qstate::{BlochVector, DensityMatrix, Subsystem};

/// Minkowski metric `diag(1, -1, -1, -1)`.
pub const ETA: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// Floor on the eigenvalues of the qubit marginal below which the filter is undefined.
pub const MARGINAL_FLOOR: f64 = 1e-10;

/// Largest imaginary part tolerated in the Lorentz spectrum, relative to the Q scale.
pub const SPECTRUM_IMAG_TOL: f64 = 1e-7;

/// Largest qudit dimension accepted by [`q_matrix_swap_reference`].
pub const SWAP_REFERENCE_MAX_DIM: usize = 64;

/// Real symmetric coefficient matrix `Q_{mu nu}` of
/// `2 Tr_{B1 B2}[(1 - V) rho (x) rho] = (1/4) sum Q_{mu nu} sigma_mu (x) sigma_nu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QMatrix(pub Matrix4<f64>);

impl QMatrix {
    pub fn rows(&self) -> [[f64; 4]; 4] {
        let mut out = [[0.0; 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.0[(i, j)];
            }
        }
        out
    }

    /// `Q^{3x3}`: minus the lower-right 3x3 block.
    pub fn spatial_block(&self) -> Matrix3<f64> {
        -self.0.fixed_view::<3, 3>(1, 1).into_owned()
    }

    pub fn max_abs_diff(&self, other: &QMatrix) -> f64 {
        (self.0 - other.0).amax()
    }
}

impl Serialize for QMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

/// Solutions `q1 >= q2 >= q3 >= q4` of `det(Q - q eta) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LorentzSpectrum {
    pub q: [f64; 4],
}

impl LorentzSpectrum {
    pub fn q2(&self) -> f64 {
        self.q[1]
    }
}

/// Measurement axis `m` for qubit A plus the eigen-data it was built from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasurementDirection {
    pub m: [f64; 3],
    pub t1: f64,
    pub e: [f64; 3],
}

/// `B_mu = Tr_A[(sigma_mu (x) I) rho]` for mu = 0..=3.
pub fn pauli_components(rho: &DensityMatrix) -> [CMatrix; 4] {
    let (r00, r01, r10, r11) = (rho.block(0, 0), rho.block(0, 1), rho.block(1, 0), rho.block(1, 1));
    let b0 = &r00 + &r11;
    let b1 = &r01 + &r10;
    let b2 = (&r01 - &r10) * linalg::I;
    let b3 = &r00 - &r11;
    [b0, b1, b2, b3]
}

/// Filtered state `(2 rho_A)^{-1/2} rho (2 rho_A)^{-1/2}`; its qubit marginal is `I/2`
/// and its trace is 1.
pub fn filtered_state(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let ra = rho.partial_trace(Subsystem::A);
    let (vals, vecs) = hermitian_eigen(ra.matrix());
    if vals[0] < MARGINAL_FLOOR {
        return Err(Error::SingularMarginal { min_eigenvalue: vals[0] });
    }
    let inv_sqrt = {
        let diag = nalgebra::DVector::from_iterator(
            2,
            vals.iter().map(|&l| linalg::ONE / (2.0 * l).sqrt()),
        );
        &vecs * CMatrix::from_diagonal(&diag) * vecs.adjoint()
    };
    let k = inv_sqrt.kronecker(&linalg::identity(rho.dim_b()));
    let out = &k * rho.matrix() * &k;
    Ok(DensityMatrix::from_trusted(out, 2, rho.dim_b()))
}

/// Closed form `Q_{mu nu} = 2 [Tr B_mu Tr B_nu - Tr(B_mu B_nu)]`.
pub fn q_matrix(rho: &DensityMatrix) -> QMatrix {
    let b = pauli_components(rho);
    let tr: Vec<f64> = b.iter().map(trace_re).collect();
    let mut q = Matrix4::zeros();
    for mu in 0..4 {
        for nu in mu..4 {
            let v = 2.0 * (tr[mu] * tr[nu] - trace_product_re(&b[mu], &b[nu]));
            q[(mu, nu)] = v;
            q[(nu, mu)] = v;
        }
    }
    QMatrix(q)
}

/// Reference construction of Q: forms `O = 2 Tr_{B1 B2}[(1 - V) rho (x) rho]` on the
/// two copies of A with an explicit swap permutation `V`, then reads off
/// `Q_{mu nu} = Tr[O (sigma_mu (x) sigma_nu)]`.
pub fn q_matrix_swap_reference(rho: &DensityMatrix) -> Result<QMatrix> {
    let d = rho.dim_b();
    if d > SWAP_REFERENCE_MAX_DIM {
        return Err(Error::DimensionTooLarge { dim: d, max: SWAP_REFERENCE_MAX_DIM });
    }
    let m = rho.matrix();
    // V |b1 b2> = |b2 b1> on the doubled qudit, indexed as b1 * d + b2.
    let swap: Vec<usize> = (0..d * d).map(|beta| (beta % d) * d + beta / d).collect();
    // (rho (x) rho) with rows/cols indexed by (a1 a2, b1 b2).
    let x = |a1: usize, a2: usize, beta: usize, a1p: usize, a2p: usize, betap: usize| {
        let (b1, b2) = (beta / d, beta % d);
        let (b1p, b2p) = (betap / d, betap % d);
        m[(a1 * d + b1, a1p * d + b1p)] * m[(a2 * d + b2, a2p * d + b2p)]
    };
    let mut o = CMatrix::zeros(4, 4);
    for alpha in 0..4 {
        let (a1, a2) = (alpha / 2, alpha % 2);
        for alphap in 0..4 {
            let (a1p, a2p) = (alphap / 2, alphap % 2);
            let mut acc = linalg::ZERO;
            for (beta, &swapped) in swap.iter().enumerate() {
                // [(1 - V) X]_{(alpha beta),(alpha' beta)} summed over beta.
                acc += x(a1, a2, beta, a1p, a2p, beta) - x(a1, a2, swapped, a1p, a2p, beta);
            }
            o[(alpha, alphap)] = acc * 2.0;
        }
    }
    let mut q = Matrix4::zeros();
    for mu in 0..4 {
        for nu in 0..4 {
            let s = linalg::pauli_dyn(mu).kronecker(&linalg::pauli_dyn(nu));
            q[(mu, nu)] = trace_product_re(&o, &s);
        }
    }
    Ok(QMatrix(q))
}

fn require_two_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.dim_b() != 2 || rho.dim_a() != 2 {
        return Err(Error::WrongDimension { expected: 2, actual: rho.dim_b() });
    }
    Ok(())
}

/// Two-qubit correlation matrix `R_{mu nu} = <sigma_mu (x) sigma_nu>`.
pub fn r_matrix(rho: &DensityMatrix) -> Result<Matrix4<f64>> {
    require_two_qubit(rho)?;
    let b = pauli_components(rho);
    Ok(Matrix4::from_fn(|mu, nu| trace_product_re(&b[mu], &linalg::pauli_dyn(nu))))
}

/// `T_{ab} = <sigma_a (x) sigma_b>` for a, b = 1..=3.
pub fn t_matrix(rho: &DensityMatrix) -> Result<Matrix3<f64>> {
    let r = r_matrix(rho)?;
    Ok(r.fixed_view::<3, 3>(1, 1).into_owned())
}

/// Eigenvalues of `eta Q`, sorted descending. Fails if any has an imaginary
/// part above [`SPECTRUM_IMAG_TOL`] (relative to `max(1, |Q|_max)`).
///
/// Degenerate physical spectra can form 2x2 Jordan blocks, whose eigenvalues are
/// only resolved to about `sqrt(eps)`; the tolerance sits above that level.
pub fn lorentz_spectrum(q: &QMatrix) -> Result<LorentzSpectrum> {
    let eta_q = Matrix4::from_fn(|i, j| ETA[i] * q.0[(i, j)]);
    let eig = schur_eigenvalues(&eta_q).ok_or(Error::ComplexSpectrum { imag: f64::NAN })?;
    let imag = eig.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if imag > SPECTRUM_IMAG_TOL * q.0.amax().max(1.0) {
        return Err(Error::ComplexSpectrum { imag });
    }
    let mut v = [eig[0].re, eig[1].re, eig[2].re, eig[3].re];
    v.sort_by(|a, b| b.total_cmp(a));
    Ok(LorentzSpectrum { q: v })
}

/// Schur-based eigenvalues with a bounded iteration count. The unbounded variant
/// can cycle on nearly scalar inputs (`eta Q ~ I` for pure entangled states), so
/// stalled runs are retried with looser deflation thresholds and on shifted copies.
fn schur_eigenvalues(m: &Matrix4<f64>) -> Option<[Complex64; 4]> {
    for eps in [f64::EPSILON, 1e-14, 1e-12] {
        for shift in [0.0, 0.375, -0.625] {
            let shifted = m + Matrix4::identity() * shift;
            if let Some(schur) = Schur::try_new(shifted, eps, 500) {
                let e = schur.complex_eigenvalues();
                return Some(std::array::from_fn(|k| e[k] - shift));
            }
        }
    }
    None
}

/// Principal eigen-pair of `Q^{3x3}(rho~)` and the measurement axis
/// `m ~ sqrt(1 - x^2) e_perp + e_par` relative to the Bloch vector `x` of the
/// original state's qubit marginal.
pub fn t1_direction(filtered: &DensityMatrix, x: &BlochVector) -> MeasurementDirection {
    let q3 = q_matrix(filtered).spatial_block();
    let (t1, e) = principal_eigenpair(&q3);
    let m = measurement_axis(&e, x);
    MeasurementDirection { m, t1, e }
}

/// Largest eigenvalue and its eigenvector. Near-ties go to the first index the
/// solver reports; the sign makes the largest-magnitude component positive.
pub fn principal_eigenpair(m: &Matrix3<f64>) -> (f64, [f64; 3]) {
    let eig = SymmetricEigen::new(*m);
    let max = eig.eigenvalues.max();
    let tol = 1e-12 * max.abs().max(1.0);
    let k = (0..3).find(|&i| eig.eigenvalues[i] >= max - tol).unwrap_or(0);
    let col = eig.eigenvectors.column(k);
    let mut e = [col[0], col[1], col[2]];
    let n = linalg::norm3(&e);
    e.iter_mut().for_each(|c| *c /= n);
    let mut big = 0;
    for i in 1..3 {
        if e[i].abs() > e[big].abs() + 1e-12 {
            big = i;
        }
    }
    if e[big] < 0.0 {
        e.iter_mut().for_each(|c| *c = -*c);
    }
    (eig.eigenvalues[k], e)
}

fn measurement_axis(e: &[f64; 3], x: &BlochVector) -> [f64; 3] {
    let x2 = x.length_sq();
    if x2.sqrt() < 1e-12 {
        return *e;
    }
    let xv = x.0;
    let proj = linalg::dot3(&xv, e) / x2;
    let par = [xv[0] * proj, xv[1] * proj, xv[2] * proj];
    let w = (1.0 - x2).max(0.0).sqrt();
    let v = [
        w * (e[0] - par[0]) + par[0],
        w * (e[1] - par[1]) + par[1],
        w * (e[2] - par[2]) + par[2],
    ];
    let n = linalg::norm3(&v);
    if n < 1e-15 {
        return *e;
    }
    [v[0] / n, v[1] / n, v[2] / n]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{
        apply_filter, make_bell_diagonal, make_binary_channel, make_x_state, random_state,
        validate_state, XStateParams,
    };
    use num_complex::Complex64;

    #[test]
    fn bell_diagonal_q_matrix_and_spectrum() {
        let rho = make_bell_diagonal(0.6, -0.4, 0.2).unwrap();
        let q = q_matrix(&rho);
        let want = Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, -0.36, -0.16, -0.04));
        assert!((q.0 - want).amax() < 1e-14);
        assert!(q.max_abs_diff(&q_matrix_swap_reference(&rho).unwrap()) < 1e-14);
        let s = lorentz_spectrum(&q).unwrap();
        for (got, want) in s.q.iter().zip([1.0, 0.36, 0.16, 0.04]) {
            assert!((got - want).abs() < 1e-13);
        }
        let dir = t1_direction(&filtered_state(&rho).unwrap(), &rho.bloch_a());
        assert!((dir.t1 - 0.36).abs() < 1e-13);
        assert!((dir.e[0] - 1.0).abs() < 1e-12 && (dir.m[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_swap_reference() {
        for d in 1..=4 {
            let n = 2 * d;
            let rho = validate_state(linalg::identity(n).unscale(n as f64), d).unwrap();
            let q = q_matrix_swap_reference(&rho).unwrap();
            let want = 2.0 * (1.0 - 1.0 / d as f64);
            let expected = Matrix4::from_diagonal(&nalgebra::Vector4::new(want, 0.0, 0.0, 0.0));
            assert!((q.0 - expected).amax() < 1e-14, "d = {d}");
            assert!(q.max_abs_diff(&q_matrix(&rho)) < 1e-14);
        }
    }

    #[test]
    fn swap_reference_rejects_huge_dimensions() {
        let d = SWAP_REFERENCE_MAX_DIM + 1;
        let rho = DensityMatrix::from_trusted(linalg::identity(2 * d).unscale((2 * d) as f64), 2, d);
        assert!(matches!(q_matrix_swap_reference(&rho), Err(Error::DimensionTooLarge { .. })));
    }

    #[test]
    fn product_state_q_is_rank_one() {
        let ra = BlochVector([0.2, 0.1, -0.3]).to_qubit_state();
        let rb_state = random_state(1, 2, 4).unwrap();
        // random_state(1, ..) is a qubit state stored as 2x2 with dim_b = 1.
        let rb = rb_state.matrix().clone();
        let rho = validate_state(ra.kronecker(&rb), 2).unwrap();
        let q = q_matrix(&rho);
        let r = [1.0, 0.2, 0.1, -0.3];
        let purity_b = trace_product_re(&rb, &rb);
        let c = 2.0 * (1.0 - purity_b);
        let want = Matrix4::from_fn(|i, j| c * r[i] * r[j]);
        assert!((q.0 - want).amax() < 1e-14);
    }

    #[test]
    fn r_and_t_matrices() {
        let rho = validate_state(linalg::identity(4).scale(0.25), 2).unwrap();
        let r = r_matrix(&rho).unwrap();
        assert!((r - Matrix4::from_fn(|i, j| if i == 0 && j == 0 { 1.0 } else { 0.0 })).amax() < 1e-15);
        let bd = make_bell_diagonal(0.3, -0.5, 0.1).unwrap();
        let t = t_matrix(&bd).unwrap();
        assert!((t - Matrix3::from_diagonal(&nalgebra::Vector3::new(0.3, -0.5, 0.1))).amax() < 1e-15);
        let wide = random_state(3, 2, 1).unwrap();
        assert!(matches!(r_matrix(&wide), Err(Error::WrongDimension { .. })));
    }

    #[test]
    fn x_state_filtered_t_matrix_and_spectrum() {
        let p = XStateParams::new(0.3, 0.1, 0.4, -0.3, 0.2);
        let rho = make_x_state(p).unwrap();
        let filtered = filtered_state(&rho).unwrap();
        let t = t_matrix(&filtered).unwrap();
        let k = 1.0 - p.x * p.x;
        let want = [p.s1 / k.sqrt(), p.s2 / k.sqrt(), (p.s3 - p.x * p.y) / k];
        for i in 0..3 {
            assert!((t[(i, i)] - want[i]).abs() < 1e-13);
        }
        let [r00, r11, r22, r33, _, _] = p.entries();
        let a = (r00 * r33).sqrt();
        let b = (r11 * r22).sqrt();
        let mut expect = [p.s1 * p.s1, p.s2 * p.s2, 4.0 * (a + b).powi(2), 4.0 * (a - b).powi(2)];
        expect.sort_by(|x, y| y.total_cmp(x));
        let s = lorentz_spectrum(&q_matrix(&rho)).unwrap();
        for (got, want) in s.q.iter().zip(expect) {
            assert!((got - want).abs() < 1e-13);
        }
    }

    #[test]
    fn x_state_with_dominant_s1_measures_sigma1() {
        let rho = make_x_state(XStateParams::new(0.0, 0.2, 0.6, 0.2, 0.1)).unwrap();
        let dir = t1_direction(&filtered_state(&rho).unwrap(), &rho.bloch_a());
        assert!((dir.m[0].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn binary_channel_structure() {
        let (p1, a, b) = (0.3, BlochVector([0.2, 0.5, 0.1]), BlochVector([-0.4, 0.1, 0.6]));
        let rho = make_binary_channel(p1, a, b).unwrap();
        let p2 = 1.0 - p1;
        let delta = p1 - p2;
        let c_plus = [p1 * a.0[0] + p2 * b.0[0], p1 * a.0[1] + p2 * b.0[1], p1 * a.0[2] + p2 * b.0[2]];
        let c_minus = [p1 * a.0[0] - p2 * b.0[0], p1 * a.0[1] - p2 * b.0[1], p1 * a.0[2] - p2 * b.0[2]];
        let r = r_matrix(&rho).unwrap();
        let mut want = Matrix4::zeros();
        want[(0, 0)] = 1.0;
        want[(0, 3)] = delta;
        for i in 0..3 {
            want[(i + 1, 0)] = c_plus[i];
            want[(i + 1, 3)] = c_minus[i];
        }
        assert!((r - want).amax() < 1e-14);

        let ab = a.dot(&b);
        let root = ((1.0 - a.length_sq()) * (1.0 - b.length_sq())).sqrt();
        let (lp, lm) = ((1.0 - ab + root) / 2.0, (1.0 - ab - root) / 2.0);
        let s = lorentz_spectrum(&q_matrix(&rho)).unwrap();
        let k = 1.0 - delta * delta;
        let mut expect = [0.0, 0.0, k * lp, k * lm];
        expect.sort_by(|x, y| y.total_cmp(x));
        for (got, want) in s.q.iter().zip(expect) {
            assert!((got - want).abs() < 1e-12, "{:?} vs {:?}", s.q, expect);
        }

        let filtered = filtered_state(&rho).unwrap();
        let t = t_matrix(&filtered).unwrap();
        let sv = t.singular_values();
        let mut sv: Vec<f64> = sv.iter().copied().collect();
        sv.sort_by(|x, y| y.total_cmp(x));
        assert!(sv[1] < 1e-12 && sv[0] > 1e-3);
    }

    #[test]
    fn coincident_channel_measures_along_c_minus() {
        // p1^2 (1 - a^2) = p2^2 (1 - b^2) with p1 = 1/3: 1 - a^2 = 4 (1 - b^2).
        let scale = |v: [f64; 3], len: f64| {
            let n = linalg::norm3(&v);
            BlochVector([v[0] * len / n, v[1] * len / n, v[2] * len / n])
        };
        let p1 = 1.0 / 3.0;
        let a = scale([0.3, 0.5, 0.1], 0.6f64.sqrt());
        let b = scale([-0.4, 0.1, 0.6], 0.9f64.sqrt());
        let rho = make_binary_channel(p1, a, b).unwrap();
        let dir = t1_direction(&filtered_state(&rho).unwrap(), &rho.bloch_a());
        let c_minus = [
            p1 * a.0[0] - (1.0 - p1) * b.0[0],
            p1 * a.0[1] - (1.0 - p1) * b.0[1],
            p1 * a.0[2] - (1.0 - p1) * b.0[2],
        ];
        let cos = linalg::dot3(&dir.m, &c_minus) / linalg::norm3(&c_minus);
        assert!((cos.abs() - 1.0).abs() < 1e-10, "cos = {cos}");
    }

    #[test]
    fn filtered_state_examples() {
        let bd = make_bell_diagonal(0.6, -0.4, 0.2).unwrap();
        let f = filtered_state(&bd).unwrap();
        assert!(linalg::max_abs_diff(f.matrix(), bd.matrix()) < 1e-15);

        // Positive Hermitian filter on a state with maximally mixed marginal.
        let rho = make_x_state(XStateParams::new(0.0, 0.3, 0.5, 0.2, 0.1)).unwrap();
        let filter = CMatrix::from_row_slice(
            2,
            2,
            &[Complex64::new(1.2, 0.0), Complex64::new(0.3, -0.4), Complex64::new(0.3, 0.4), Complex64::new(0.9, 0.0)],
        );
        let rf = apply_filter(&rho, &filter).unwrap();
        let back = filtered_state(&rf).unwrap();
        assert!(linalg::max_abs_diff(back.matrix(), rho.matrix()) < 1e-12);

        let pure_a = validate_state(
            BlochVector([0.0, 0.0, 1.0]).to_qubit_state().kronecker(&linalg::identity(2).scale(0.5)),
            2,
        )
        .unwrap();
        assert!(matches!(filtered_state(&pure_a), Err(Error::SingularMarginal { .. })));
    }

    #[test]
    fn filtered_marginal_is_maximally_mixed() {
        for seed in 0..20 {
            let rho = random_state(3, 4, seed).unwrap();
            let f = filtered_state(&rho).unwrap();
            assert!((f.matrix().trace().re - 1.0).abs() < 1e-12);
            let fa = f.partial_trace(Subsystem::A);
            assert!(linalg::max_abs_diff(fa.matrix(), &linalg::identity(2).scale(0.5)) < 1e-10);
        }
    }

    #[test]
    fn degenerate_t1_tie_break_is_deterministic() {
        let werner = make_bell_diagonal(-0.5, -0.5, -0.5).unwrap();
        let f = filtered_state(&werner).unwrap();
        let a = t1_direction(&f, &werner.bloch_a());
        let b = t1_direction(&f, &werner.bloch_a());
        assert_eq!(a, b);
        assert!((linalg::norm3(&a.m) - 1.0).abs() < 1e-12);
        let big = a.e.iter().copied().fold(0.0, |m: f64, v| if v.abs() > m.abs() { v } else { m });
        assert!(big > 0.0);
    }
}
