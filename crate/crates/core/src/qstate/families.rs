use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use super::{BlochVector, DensityMatrix, UnitaryMatrix, VALIDATION_TOL};
use crate::error::{Error, Result};
use crate::linalg::{self, hermitian_eigenvalues, pauli_dyn, CMatrix};

/// Deterministic generator for every seeded construction in the crate.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn complex_gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im)
}

fn ginibre(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    // Row-major fill keeps the stream order independent of nalgebra's storage.
    let mut g = CMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            g[(i, j)] = complex_gaussian(rng);
        }
    }
    g
}

/// Random qubit-qudit state `G G^dagger / Tr(G G^dagger)` with `G` a `2d x rank`
/// complex Ginibre matrix.
pub fn random_state(dim_b: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    let n = 2 * dim_b;
    if dim_b == 0 || rank == 0 || rank > n {
        return Err(Error::InvalidRank { rank, dim: n });
    }
    let mut rng = seeded_rng(seed);
    let g = ginibre(n, rank, &mut rng);
    let w = &g * g.adjoint();
    let tr = linalg::trace_re(&w);
    Ok(DensityMatrix::from_trusted(w.unscale(tr), 2, dim_b))
}

/// Haar-random `d x d` unitary (QR of a Ginibre matrix with the phase of `R` fixed).
pub fn random_unitary(d: usize, rng: &mut ChaCha8Rng) -> UnitaryMatrix {
    let g = ginibre(d, d, rng);
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { linalg::ONE };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    UnitaryMatrix { matrix: q }
}

/// Independent Haar unitaries on A (2x2) and B (`dim_b x dim_b`).
pub fn random_local_unitary(dim_b: usize, seed: u64) -> (CMatrix, CMatrix) {
    let mut rng = seeded_rng(seed);
    let va = random_unitary(2, &mut rng).matrix;
    let vb = random_unitary(dim_b, &mut rng).matrix;
    (va, vb)
}

/// Random `U` with `Tr U = 0`: eigenphases come in pairs `(phi, phi + pi)`,
/// rotated into a Haar-random eigenbasis.
pub fn traceless_unitary(d: usize, seed: u64) -> Result<UnitaryMatrix> {
    if d < 2 || !d.is_multiple_of(2) {
        return Err(Error::Domain { function: "traceless_unitary", value: d as f64 });
    }
    let mut rng = seeded_rng(seed);
    let phase = Uniform::new(0.0, std::f64::consts::TAU).expect("valid range");
    let mut diag = Vec::with_capacity(d);
    for _ in 0..d / 2 {
        let phi: f64 = phase.sample(&mut rng);
        let z = Complex64::from_polar(1.0, phi);
        diag.push(z);
        diag.push(-z);
    }
    let v = random_unitary(d, &mut rng).matrix;
    let dm = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag));
    let u = &v * dm * v.adjoint();
    Ok(UnitaryMatrix { matrix: u })
}

/// `(1/4) sum_mu c_mu sigma_mu (x) sigma_mu` with `c_0 = 1`.
pub fn make_bell_diagonal(c1: f64, c2: f64, c3: f64) -> Result<DensityMatrix> {
    let weights = [
        1.0 + c1 - c2 + c3,
        1.0 - c1 + c2 + c3,
        1.0 + c1 + c2 - c3,
        1.0 - c1 - c2 - c3,
    ];
    if weights.iter().any(|&w| w / 4.0 < -1e-12) {
        return Err(Error::NotPositiveBellDiagonal { c1, c2, c3 });
    }
    let mut m = linalg::identity(4);
    for (a, c) in [(1, c1), (2, c2), (3, c3)] {
        let p = pauli_dyn(a);
        m += p.kronecker(&p).scale(c);
    }
    Ok(DensityMatrix::from_trusted(m.scale(0.25), 2, 2))
}

/// Real canonical two-qubit X-state parameters: `x = <s3 (x) 1>`, `y = <1 (x) s3>`,
/// `s_a = <s_a (x) s_a>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XStateParams {
    pub x: f64,
    pub y: f64,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
}

impl XStateParams {
    pub fn new(x: f64, y: f64, s1: f64, s2: f64, s3: f64) -> Self {
        Self { x, y, s1, s2, s3 }
    }

    /// The six independent matrix entries `(r00, r11, r22, r33, r03, r12)`.
    pub fn entries(&self) -> [f64; 6] {
        let Self { x, y, s1, s2, s3 } = *self;
        [
            (1.0 + x + y + s3) / 4.0,
            (1.0 + x - y - s3) / 4.0,
            (1.0 - x + y - s3) / 4.0,
            (1.0 - x - y + s3) / 4.0,
            (s1 - s2) / 4.0,
            (s1 + s2) / 4.0,
        ]
    }

    pub fn to_matrix(&self) -> CMatrix {
        let [r00, r11, r22, r33, r03, r12] = self.entries();
        let c = |v: f64| Complex64::new(v, 0.0);
        let mut m = CMatrix::zeros(4, 4);
        m[(0, 0)] = c(r00);
        m[(1, 1)] = c(r11);
        m[(2, 2)] = c(r22);
        m[(3, 3)] = c(r33);
        m[(0, 3)] = c(r03);
        m[(3, 0)] = c(r03);
        m[(1, 2)] = c(r12);
        m[(2, 1)] = c(r12);
        m
    }
}

pub fn make_x_state(p: XStateParams) -> Result<DensityMatrix> {
    let m = p.to_matrix();
    let min = hermitian_eigenvalues(&m)[0];
    if min < -VALIDATION_TOL {
        return Err(Error::NotPositive { min_eigenvalue: min });
    }
    Ok(DensityMatrix::from_trusted(m, 2, 2))
}

/// DQC1 output `(1/2d) [[I, alpha U^dagger], [alpha U, I]]`.
pub fn make_dqc1(u: &UnitaryMatrix, alpha: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidAlpha(alpha));
    }
    let d = u.dim();
    let mut m = CMatrix::identity(2 * d, 2 * d);
    let uu = u.matrix().scale(alpha);
    m.view_mut((d, 0), (d, d)).copy_from(&uu);
    m.view_mut((0, d), (d, d)).copy_from(&uu.adjoint());
    Ok(DensityMatrix::from_trusted(m.unscale(2.0 * d as f64), 2, d))
}

/// Classical-quantum state `p1 rho_a (x) |0><0| + p2 rho_b (x) |1><1|` of a binary
/// qubit channel; A carries the signal and B the classical register.
pub fn make_binary_channel(p1: f64, a: BlochVector, b: BlochVector) -> Result<DensityMatrix> {
    if !(p1 > 0.0 && p1 < 1.0) {
        return Err(Error::InvalidProbability(p1));
    }
    for v in [a, b] {
        if v.length() > 1.0 + VALIDATION_TOL {
            return Err(Error::InvalidBlochLength(v.length()));
        }
    }
    let proj = |k: usize| {
        let mut p = CMatrix::zeros(2, 2);
        p[(k, k)] = linalg::ONE;
        p
    };
    let m = a.to_qubit_state().kronecker(&proj(0)).scale(p1)
        + b.to_qubit_state().kronecker(&proj(1)).scale(1.0 - p1);
    Ok(DensityMatrix::from_trusted(m, 2, 2))
}
