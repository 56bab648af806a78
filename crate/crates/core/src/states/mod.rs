//! State catalog, the PPT test and Hilbert-Schmidt ball sampling.

mod chessboard;
mod kernel;

pub use chessboard::{chessboard_kernel_vectors, chessboard_state, ChessboardParams};
pub use kernel::{kernel_product_vectors, search_kernel_product_vectors, KernelSearch, ProductVector};

use nalgebra::Matrix4;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::linalg::{
    basis_vector, c, generator_basis, partial_transpose, real_vector, tensor_vectors, CMatrix, CVector, Operator, C64,
    HERMITIAN_TOL,
};

/// Eigenvalues above `-PSD_TOL` count as non-negative.
pub const PSD_TOL: f64 = 1e-10;
/// Tolerance on `Tr(rho) = 1`.
pub const TRACE_TOL: f64 = 1e-12;
/// A partial transpose with minimum eigenvalue at least `-PPT_TOL` is PPT.
pub const PPT_TOL: f64 = 1e-10;
/// Largest noise radius for which every ball state around `1/4` is positive.
pub fn max_noise_radius() -> f64 {
    1.0 / 12f64.sqrt()
}

/// Which catalog constructor produced a state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    NoisyBell { p: f64, d: f64 },
    Ghz,
    W,
    Upb,
    Chessboard(ChessboardParams),
    Horodecki { b: f64 },
}

/// Hermitian, positive semidefinite, unit-trace operator.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    op: Operator,
    family: Option<Family>,
}

impl DensityMatrix {
    pub fn new(op: Operator) -> Result<Self> {
        let dev = op.hermiticity_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let tr = op.trace().re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidTrace(tr));
        }
        let min = op.min_eigenvalue();
        if min < -PSD_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(DensityMatrix { op, family: None })
    }

    pub fn from_matrix(dims: Vec<usize>, m: CMatrix) -> Result<Self> {
        DensityMatrix::new(Operator::new(dims, m)?)
    }

    /// Normalizes a positive operator by its trace.
    pub fn from_unnormalized(op: Operator) -> Result<Self> {
        let tr = op.trace().re;
        if tr <= 0.0 {
            return Err(Error::InvalidTrace(tr));
        }
        DensityMatrix::new(op.scaled(1.0 / tr))
    }

    pub fn pure(dims: Vec<usize>, psi: &CVector) -> Result<Self> {
        let norm = psi.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized(norm));
        }
        DensityMatrix::new(Operator::projector(dims, psi)?)
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let n: usize = dims.iter().product();
        DensityMatrix {
            op: Operator::identity(dims).scaled(1.0 / n as f64),
            family: None,
        }
    }

    pub fn with_family(mut self, family: Family) -> Self {
        self.family = Some(family);
        self
    }

    pub fn family(&self) -> Option<&Family> {
        self.family.as_ref()
    }

    pub fn operator(&self) -> &Operator {
        &self.op
    }

    pub fn matrix(&self) -> &CMatrix {
        self.op.matrix()
    }

    pub fn dims(&self) -> &[usize] {
        self.op.dims()
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    /// `Tr(W rho)`.
    pub fn expectation(&self, w: &Operator) -> f64 {
        self.op.expectation(w)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.op.eigenvalues()
    }

    pub fn rank(&self) -> usize {
        self.op.rank(crate::linalg::RANK_TOL)
    }

    pub fn kernel_dimension(&self) -> usize {
        self.dim() - self.rank()
    }

    /// Convex mixture `p self + (1 - p) other`.
    pub fn mix(&self, p: f64, other: &DensityMatrix) -> Result<DensityMatrix> {
        check_range("p", p, 0.0, 1.0)?;
        let op = self.op.scaled(p).add_scaled(&other.op, 1.0 - p)?;
        Ok(DensityMatrix { op, family: None })
    }
}

/// Mixing weight and noise radius of `p |psi><psi| + (1-p) sigma` with
/// `||sigma - 1/4|| <= d`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseBallSpec {
    p: f64,
    d: f64,
}

impl NoiseBallSpec {
    pub fn new(p: f64, d: f64) -> Result<Self> {
        check_range("p", p, 0.0, 1.0)?;
        check_range("d", d, 0.0, max_noise_radius())?;
        Ok(NoiseBallSpec { p, d })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn d(&self) -> f64 {
        self.d
    }
}

/// `p |psi><psi| + (1 - p) sigma`.
pub fn noisy_state(psi: &CVector, p: f64, sigma: &DensityMatrix) -> Result<DensityMatrix> {
    check_range("p", p, 0.0, 1.0)?;
    let pure = DensityMatrix::pure(sigma.dims().to_vec(), psi)?;
    pure.mix(p, sigma)
}

/// The four Bell states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BellKind {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

pub fn bell_vector(kind: BellKind) -> CVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    match kind {
        BellKind::PhiPlus => real_vector(&[s, 0.0, 0.0, s]),
        BellKind::PhiMinus => real_vector(&[s, 0.0, 0.0, -s]),
        BellKind::PsiPlus => real_vector(&[0.0, s, s, 0.0]),
        BellKind::PsiMinus => real_vector(&[0.0, s, -s, 0.0]),
    }
}

pub fn bell(kind: BellKind) -> DensityMatrix {
    DensityMatrix::pure(vec![2, 2], &bell_vector(kind)).expect("Bell vectors are normalized")
}

/// `rho(p, 0) = p |psi+><psi+| + (1 - p) 1/4`.
pub fn werner_like(p: f64) -> Result<DensityMatrix> {
    let noise = DensityMatrix::maximally_mixed(vec![2, 2]);
    Ok(noisy_state(&bell_vector(BellKind::PsiPlus), p, &noise)?.with_family(Family::NoisyBell { p, d: 0.0 }))
}

/// `(|000> + |111>) / sqrt(2)`.
pub fn ghz_vector() -> CVector {
    let mut v = CVector::zeros(8);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    v[0] = c(s, 0.0);
    v[7] = c(s, 0.0);
    v
}

/// `(|001> + |010> + |100>) / sqrt(3)`.
pub fn w_vector() -> CVector {
    let mut v = CVector::zeros(8);
    let s = 1.0 / 3f64.sqrt();
    for k in [1, 2, 4] {
        v[k] = c(s, 0.0);
    }
    v
}

pub fn ghz_state() -> DensityMatrix {
    DensityMatrix::pure(vec![2, 2, 2], &ghz_vector())
        .expect("normalized")
        .with_family(Family::Ghz)
}

pub fn w_state() -> DensityMatrix {
    DensityMatrix::pure(vec![2, 2, 2], &w_vector())
        .expect("normalized")
        .with_family(Family::W)
}

fn qutrit(entries: [f64; 3]) -> CVector {
    real_vector(&entries)
}

/// Local factors of the five vectors of the 3x3 "tiles" unextendible
/// product basis, as `(alice, bob)`.
pub fn upb_factors() -> [(CVector, CVector); 5] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let t = 1.0 / 3f64.sqrt();
    [
        (qutrit([1.0, 0.0, 0.0]), qutrit([s, -s, 0.0])),
        (qutrit([s, -s, 0.0]), qutrit([0.0, 0.0, 1.0])),
        (qutrit([0.0, 0.0, 1.0]), qutrit([0.0, s, -s])),
        (qutrit([0.0, s, -s]), qutrit([1.0, 0.0, 0.0])),
        (qutrit([t, t, t]), qutrit([t, t, t])),
    ]
}

/// The product vectors that complete `psi_0..psi_3` (with `psi_4`
/// excluded) to an orthonormal basis: the sign-flipped partners
/// `psi_5..psi_8` followed by `|11>`.
pub fn upb_completion_factors() -> [(CVector, CVector); 5] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [
        (qutrit([1.0, 0.0, 0.0]), qutrit([s, s, 0.0])),
        (qutrit([s, s, 0.0]), qutrit([0.0, 0.0, 1.0])),
        (qutrit([0.0, 0.0, 1.0]), qutrit([0.0, s, s])),
        (qutrit([0.0, s, s]), qutrit([1.0, 0.0, 0.0])),
        (qutrit([0.0, 1.0, 0.0]), qutrit([0.0, 1.0, 0.0])),
    ]
}

pub fn upb_vectors() -> Vec<CVector> {
    upb_factors().iter().map(|(a, b)| tensor_vectors(&[a, b])).collect()
}

/// Projector onto the span of the five UPB vectors.
pub fn upb_projector() -> Operator {
    let mut p = Operator::zeros(vec![3, 3]);
    for v in upb_vectors() {
        p = p.add_scaled(&Operator::projector(vec![3, 3], &v).expect("3x3"), 1.0).expect("same shape");
    }
    p
}

/// Unit-weight sum of the nine product projectors: the five UPB vectors
/// and their partners `psi_5..psi_8`. Stands in for the identity in the
/// primed shift.
pub fn upb_nine_projectors() -> Operator {
    let mut p = upb_projector();
    for (a, b) in upb_completion_factors().iter().take(4) {
        let v = tensor_vectors(&[a, b]);
        p = p.add_scaled(&Operator::projector(vec![3, 3], &v).expect("3x3"), 1.0).expect("same shape");
    }
    p
}

/// `(1 - sum_i |psi_i><psi_i|) / 4`.
pub fn upb_state() -> DensityMatrix {
    let op = Operator::identity(vec![3, 3]).add_scaled(&upb_projector(), -1.0).expect("same shape");
    DensityMatrix::new(op.scaled(0.25))
        .expect("complement projector of a 5-dimensional subspace")
        .with_family(Family::Upb)
}

/// Two-qubit-by-ququart state with parameter `b in [0, 1]`, PPT for every
/// `b` and bound entangled for `0 < b < 1`.
pub fn horodecki_state(b: f64) -> Result<DensityMatrix> {
    check_range("b", b, 0.0, 1.0)?;
    let mut m = CMatrix::zeros(8, 8);
    for i in 0..3 {
        m[(i, i)] = c(b, 0.0);
        m[(i, i + 5)] = c(b, 0.0);
        m[(i + 5, i)] = c(b, 0.0);
        m[(i + 5, i + 5)] = c(b, 0.0);
    }
    m[(3, 3)] = c(b, 0.0);
    m[(4, 4)] = c((1.0 + b) / 2.0, 0.0);
    m[(7, 7)] = c((1.0 + b) / 2.0, 0.0);
    let off = (1.0 - b * b).max(0.0).sqrt() / 2.0;
    m[(4, 7)] = c(off, 0.0);
    m[(7, 4)] = c(off, 0.0);
    let m = m.map(|z| z / (7.0 * b + 1.0));
    Ok(DensityMatrix::from_matrix(vec![2, 4], m)?.with_family(Family::Horodecki { b }))
}

/// Minimum eigenvalue of `rho^{T_B}` (last party transposed).
pub fn partial_transpose_min_eigenvalue(rho: &Operator) -> Result<f64> {
    if rho.parties() != 2 {
        return Err(Error::NotBipartite(rho.parties()));
    }
    Ok(partial_transpose(rho, 1)?.min_eigenvalue())
}

/// Peres-Horodecki test: `true` iff `rho^{T_B} >= -PPT_TOL`. For 2x2 and 2x3
/// systems this decides separability.
pub fn is_ppt(rho: &DensityMatrix) -> Result<bool> {
    if rho.dims() == [2, 2] {
        let pt = partial_transpose(rho.operator(), 1)?;
        return Ok(two_qubit_psd(pt.matrix()));
    }
    Ok(partial_transpose_min_eigenvalue(rho.operator())? >= -PPT_TOL)
}

/// Fast positivity test for a Hermitian 4x4 matrix that is the partial
/// transpose of a two-qubit state. Such a matrix has at most one negative
/// eigenvalue and eigenvalues bounded by 1, so a determinant far from zero
/// decides the sign; near-zero determinants fall back to diagonalization.
pub fn two_qubit_psd(pt: &CMatrix) -> bool {
    two_qubit_psd4(&Matrix4::from_fn(|i, j| pt[(i, j)]))
}

/// [`two_qubit_psd`] on a fixed-size matrix.
pub fn two_qubit_psd4(pt: &Matrix4<C64>) -> bool {
    let det = pt.determinant().re;
    if det > 1e-9 {
        true
    } else if det < -1e-9 {
        false
    } else {
        let dynamic = CMatrix::from_fn(4, 4, |i, j| pt[(i, j)]);
        crate::linalg::hermitian_eigen(&dynamic).0[0] >= -PPT_TOL
    }
}

/// Traceless Hermitian `4x4` matrix drawn uniformly from the unit ball of
/// the 15-dimensional Hilbert-Schmidt space.
pub fn sample_unit_ball_delta<R: Rng + ?Sized>(rng: &mut R) -> CMatrix {
    let basis = generator_basis(4).expect("N = 4");
    let mut x = [0.0f64; 16];
    let mut norm2 = 0.0;
    while norm2 < 1e-24 {
        norm2 = 0.0;
        for xi in x.iter_mut().skip(1) {
            *xi = rng.sample(StandardNormal);
            norm2 += *xi * *xi;
        }
    }
    let u: f64 = rng.random();
    let r = u.powf(1.0 / 15.0);
    let scale = r / norm2.sqrt();
    for xi in x.iter_mut().skip(1) {
        *xi *= scale;
    }
    basis.combine(&x)
}

/// `p |psi><psi| + (1 - p)(1/4 + Delta)` with `1/4 + Delta` uniform in the
/// Hilbert-Schmidt ball of radius `d` around `1/4`.
pub fn sample_ball_state<R: Rng + ?Sized>(spec: NoiseBallSpec, psi: &CVector, rng: &mut R) -> Result<DensityMatrix> {
    let delta = sample_unit_ball_delta(rng).map(|z| z * spec.d());
    ball_state(spec, psi, &delta)
}

/// Deterministic part of [`sample_ball_state`] for a given unit-scaled shift.
pub fn ball_state(spec: NoiseBallSpec, psi: &CVector, delta: &CMatrix) -> Result<DensityMatrix> {
    if psi.len() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: psi.len(),
        });
    }
    let sigma = CMatrix::identity(4, 4).map(|z| z * 0.25) + delta;
    let rho = (psi * psi.adjoint()).map(|z| z * spec.p()) + sigma.map(|z| z * (1.0 - spec.p()));
    Ok(DensityMatrix::from_matrix(vec![2, 2], rho)?.with_family(Family::NoisyBell {
        p: spec.p(),
        d: spec.d(),
    }))
}

/// Computational basis product vector `|i j>` in `dA x dB`.
pub fn product_basis_vector(dims: [usize; 2], i: usize, j: usize) -> CVector {
    tensor_vectors(&[&basis_vector(dims[0], i), &basis_vector(dims[1], j)])
}
