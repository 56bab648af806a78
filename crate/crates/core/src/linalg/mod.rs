//! Dense complex linear algebra for small multipartite operators.
//!
//! Operators carry their subsystem dimensions; party 0 is the leftmost
//! tensor factor. Everything here is pure and cheap to clone for the
//! dimensions this crate targets (total dimension at most [`MAX_DIM`]).

mod generators;

pub use generators::{expand, generator_basis, BlochVector, CoefficientMatrix, Convention, GeneratorBasis};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Largest total Hilbert-space dimension accepted by [`tensor`].
pub const MAX_DIM: usize = 4096;
/// Tolerance used when an operator is flagged Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Relative tolerance for Schmidt rank and matrix rank.
pub const RANK_TOL: f64 = 1e-10;

pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: C64 = C64 { re: 1.0, im: 0.0 };

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// A square complex matrix acting on a tensor product of subsystems.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    dims: Vec<usize>,
    matrix: CMatrix,
}

impl Operator {
    pub fn new(dims: Vec<usize>, matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        let total = total_dim(&dims)?;
        if total != matrix.nrows() {
            return Err(Error::DimensionMismatch {
                expected: total,
                found: matrix.nrows(),
            });
        }
        Ok(Operator { dims, matrix })
    }

    /// Like [`Operator::new`] but also verifies Hermiticity to [`HERMITIAN_TOL`].
    pub fn hermitian(dims: Vec<usize>, matrix: CMatrix) -> Result<Self> {
        let op = Operator::new(dims, matrix)?;
        let dev = op.hermiticity_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        Ok(op)
    }

    /// Builds an operator from real row-major entries.
    pub fn from_real_rows(dims: Vec<usize>, rows: &[f64]) -> Result<Self> {
        let n = total_dim(&dims)?;
        if rows.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: rows.len(),
            });
        }
        let m = CMatrix::from_fn(n, n, |i, j| c(rows[i * n + j], 0.0));
        Operator::new(dims, m)
    }

    pub fn identity(dims: Vec<usize>) -> Self {
        let n = dims.iter().product();
        Operator {
            dims,
            matrix: CMatrix::identity(n, n),
        }
    }

    pub fn zeros(dims: Vec<usize>) -> Self {
        let n = dims.iter().product();
        Operator {
            dims,
            matrix: CMatrix::zeros(n, n),
        }
    }

    /// `|psi><psi|` for an (unnormalized) vector.
    pub fn projector(dims: Vec<usize>, psi: &CVector) -> Result<Self> {
        Operator::new(dims, psi * psi.adjoint())
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn adjoint(&self) -> Operator {
        Operator {
            dims: self.dims.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    /// Largest entrywise modulus of `A - A^dagger`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.dim();
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    pub fn scaled(&self, factor: f64) -> Operator {
        Operator {
            dims: self.dims.clone(),
            matrix: self.matrix.map(|z| z * factor),
        }
    }

    /// `self + factor * other`; dimensions must agree.
    pub fn add_scaled(&self, other: &Operator, factor: f64) -> Result<Operator> {
        self.check_same_shape(other)?;
        Ok(Operator {
            dims: self.dims.clone(),
            matrix: &self.matrix + other.matrix.map(|z| z * factor),
        })
    }

    pub fn check_same_shape(&self, other: &Operator) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    /// Real part of `Tr(self * other)`, the expectation value when one
    /// factor is a state and both are Hermitian.
    pub fn expectation(&self, other: &Operator) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for k in 0..n {
                acc += (self.matrix[(i, k)] * other.matrix[(k, i)]).re;
            }
        }
        acc
    }

    /// Real part of `<v|self|v>`.
    pub fn quadratic_form(&self, v: &CVector) -> f64 {
        (v.adjoint() * &self.matrix * v)[(0, 0)].re
    }

    /// `U self U^dagger`.
    pub fn conjugated(&self, unitary: &CMatrix) -> Result<Operator> {
        if unitary.nrows() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: unitary.nrows(),
            });
        }
        Ok(Operator {
            dims: self.dims.clone(),
            matrix: unitary * &self.matrix * unitary.adjoint(),
        })
    }

    /// Eigenvalues (ascending) and matching eigenvectors of the Hermitian part.
    pub fn eigen(&self) -> (Vec<f64>, CMatrix) {
        hermitian_eigen(&self.matrix)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigen().0
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn rank(&self, rel_tol: f64) -> usize {
        matrix_rank(&self.matrix, rel_tol)
    }
}

fn total_dim(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() || dims.iter().any(|&d| d == 0) {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: 0,
        });
    }
    let mut total: usize = 1;
    for &d in dims {
        total = total.checked_mul(d).ok_or(Error::TooLarge(usize::MAX))?;
        if total > MAX_DIM {
            return Err(Error::TooLarge(total));
        }
    }
    Ok(total)
}

/// Kronecker product in party order (first factor is party 0).
pub fn tensor(ops: &[&Operator]) -> Result<Operator> {
    let first = ops.first().ok_or(Error::DimensionMismatch {
        expected: 1,
        found: 0,
    })?;
    let mut dims = first.dims.clone();
    let mut matrix = first.matrix.clone();
    for op in &ops[1..] {
        dims.extend_from_slice(&op.dims);
        total_dim(&dims)?;
        matrix = matrix.kronecker(&op.matrix);
    }
    Operator::new(dims, matrix)
}

/// Kronecker product of state vectors.
pub fn tensor_vectors(vs: &[&CVector]) -> CVector {
    let mut out = CVector::from_element(1, ONE);
    for v in vs {
        out = out.kronecker(*v);
    }
    out
}

/// Transposes the tensor factor `party`, leaving the others untouched.
pub fn partial_transpose(op: &Operator, party: usize) -> Result<Operator> {
    let parties = op.parties();
    if party >= parties {
        return Err(Error::InvalidParty { party, parties });
    }
    let n = op.dim();
    let dp = op.dims[party];
    // stride of the party's digit in the flattened index
    let stride: usize = op.dims[party + 1..].iter().product();
    let mut out = CMatrix::zeros(n, n);
    for r in 0..n {
        let dr = (r / stride) % dp;
        for col in 0..n {
            let dc = (col / stride) % dp;
            let r2 = r - dr * stride + dc * stride;
            let c2 = col - dc * stride + dr * stride;
            out[(r2, c2)] = op.matrix[(r, col)];
        }
    }
    Operator::new(op.dims.clone(), out)
}

/// Hilbert-Schmidt inner product `Tr(A B^dagger)`.
pub fn hs_inner(a: &Operator, b: &Operator) -> C64 {
    a.matrix
        .iter()
        .zip(b.matrix.iter())
        .fold(ZERO, |acc, (x, y)| acc + x * y.conj())
}

pub fn hs_norm(a: &Operator) -> f64 {
    a.matrix.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `||a - b||_HS`.
pub fn hs_distance(a: &Operator, b: &Operator) -> f64 {
    a.matrix
        .iter()
        .zip(b.matrix.iter())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    // symmetrize so round-off asymmetry never leaks into the solver
    let h = CMatrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    let eig = nalgebra::SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, k| eig.eigenvectors[(r, order[k])]);
    (values, vectors)
}

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Number of singular values above `rel_tol` times the largest one.
pub fn matrix_rank(m: &CMatrix, rel_tol: f64) -> usize {
    let s = singular_values(m);
    match s.first() {
        Some(&top) if top > 0.0 => s.iter().filter(|&&x| x > rel_tol * top).count(),
        _ => 0,
    }
}

pub fn real_matrix_rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let s = m.clone().singular_values();
    let top = s.max();
    if top <= 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > rel_tol * top).count()
}

/// Orthonormal basis (as columns) of the eigenspace of a positive
/// semidefinite matrix with eigenvalues at most `rel_tol * lambda_max`.
pub fn psd_kernel(m: &CMatrix, rel_tol: f64) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(m);
    let top = vals.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let cols: Vec<CVector> = vals
        .iter()
        .enumerate()
        .filter(|(_, &v)| v.abs() <= rel_tol * top.max(f64::MIN_POSITIVE))
        .map(|(k, _)| vecs.column(k).into_owned())
        .collect();
    if cols.is_empty() {
        CMatrix::zeros(m.nrows(), 0)
    } else {
        CMatrix::from_columns(&cols)
    }
}

/// Normalizes a vector; returns `None` for a (numerically) zero vector.
pub fn normalized(v: &CVector) -> Option<CVector> {
    let n = v.norm();
    if n < 1e-300 {
        None
    } else {
        Some(v / c(n, 0.0))
    }
}

/// Multiplies by a global phase so that the first component whose modulus
/// exceeds `1e-9` times the largest modulus is real and positive.
pub fn canonical_phase(v: &CVector) -> CVector {
    let top = v.iter().fold(0.0f64, |a, z| a.max(z.norm()));
    match v.iter().find(|z| z.norm() > 1e-9 * top) {
        Some(z) => {
            let phase = z.conj() / z.norm();
            v.map(|x| x * phase)
        }
        None => v.clone(),
    }
}

/// Extends orthonormal `vectors` (given as columns) to a full orthonormal
/// basis of dimension `n` by Gram-Schmidt against the standard basis.
pub fn complete_basis(vectors: &[CVector], n: usize) -> CMatrix {
    let mut basis: Vec<CVector> = Vec::with_capacity(n);
    let push = |basis: &mut Vec<CVector>, v: CVector| {
        let mut w = v;
        for _ in 0..2 {
            for b in basis.iter() {
                let proj = b.dotc(&w);
                w -= b * proj;
            }
        }
        let norm = w.norm();
        if norm > 1e-8 {
            basis.push(w / c(norm, 0.0));
            true
        } else {
            false
        }
    };
    for v in vectors {
        push(&mut basis, v.clone());
    }
    let mut k = 0;
    while basis.len() < n && k < n {
        let mut e = CVector::zeros(n);
        e[k] = ONE;
        push(&mut basis, e);
        k += 1;
    }
    CMatrix::from_columns(&basis)
}

/// Coefficients and local bases of a bipartite pure state.
#[derive(Clone, Debug)]
pub struct SchmidtForm {
    /// Non-negative, non-increasing; length `min(d_A, d_B)`.
    pub coefficients: Vec<f64>,
    /// Columns are the Schmidt vectors of party A.
    pub left_vectors: CMatrix,
    /// Columns are the Schmidt vectors of party B.
    pub right_vectors: CMatrix,
    pub rank: usize,
    pub dims: [usize; 2],
}

impl SchmidtForm {
    /// Rebuilds `sum_k s_k |u_k>|v_k>`.
    pub fn recompose(&self) -> CVector {
        let [da, db] = self.dims;
        let mut psi = CVector::zeros(da * db);
        for (k, &s) in self.coefficients.iter().enumerate() {
            let u = self.left_vectors.column(k).into_owned();
            let v = self.right_vectors.column(k).into_owned();
            psi += u.kronecker(&v) * c(s, 0.0);
        }
        psi
    }

    /// Full local unitaries whose first columns are the Schmidt vectors.
    pub fn local_unitaries(&self) -> (CMatrix, CMatrix) {
        let cols = |m: &CMatrix| -> Vec<CVector> { m.column_iter().map(|c| c.into_owned()).collect() };
        (
            complete_basis(&cols(&self.left_vectors), self.dims[0]),
            complete_basis(&cols(&self.right_vectors), self.dims[1]),
        )
    }
}

/// Schmidt decomposition of a normalized bipartite vector.
pub fn schmidt(psi: &CVector, dims: &[usize]) -> Result<SchmidtForm> {
    if dims.len() != 2 {
        return Err(Error::NotBipartite(dims.len()));
    }
    let (da, db) = (dims[0], dims[1]);
    if psi.len() != da * db {
        return Err(Error::DimensionMismatch {
            expected: da * db,
            found: psi.len(),
        });
    }
    let norm = psi.norm();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::NotNormalized(norm));
    }
    let m = CMatrix::from_fn(da, db, |i, j| psi[i * db + j]);
    let svd = m.svd(true, true);
    let u = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");
    let k = da.min(db);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let coefficients: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let left_vectors = CMatrix::from_fn(da, k, |r, col| u[(r, order[col])]);
    let right_vectors = CMatrix::from_fn(db, k, |r, col| v_t[(order[col], r)]);
    let top = coefficients[0];
    let rank = coefficients.iter().filter(|&&s| s > RANK_TOL * top).count();
    Ok(SchmidtForm {
        coefficients,
        left_vectors,
        right_vectors,
        rank,
        dims: [da, db],
    })
}

/// Computational basis vector `|k>` in dimension `n`.
pub fn basis_vector(n: usize, k: usize) -> CVector {
    let mut v = CVector::zeros(n);
    v[k] = ONE;
    v
}

/// Vector from real components.
pub fn real_vector(entries: &[f64]) -> CVector {
    CVector::from_iterator(entries.len(), entries.iter().map(|&x| c(x, 0.0)))
}

pub mod pauli {
    //! Raw Pauli matrices (trace of the square equals 2).
    use super::{c, CMatrix, ONE, ZERO};

    pub fn identity() -> CMatrix {
        CMatrix::identity(2, 2)
    }

    pub fn x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
    }

    pub fn y() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO])
    }

    pub fn z() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, c(-1.0, 0.0)])
    }
}
