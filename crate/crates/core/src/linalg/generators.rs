use nalgebra::{DMatrix, DVector};

use super::{c, CMatrix, Operator, ZERO};
use crate::error::{Error, Result};

/// Scaling convention for generator matrices.
///
/// `Orthonormal` gives `Tr(G_i G_j) = delta_ij` with `G_0 = 1/sqrt(N)`.
/// `Physics` rescales to `G_0 = 1` and `Tr(G_i^2) = 2` for `i >= 1`, i.e. the
/// raw Pauli matrices for `N = 2` and the Gell-Mann matrices for `N = 3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Convention {
    #[default]
    Orthonormal,
    Physics,
}

/// Hilbert-Schmidt orthonormal basis of `N x N` Hermitian matrices.
///
/// Index 0 is proportional to the identity; indices `1..N^2` are traceless.
/// The off-diagonal generators come first in the order
/// `(0,1) sym, (0,1) antisym, (0,2) sym, (0,2) antisym, (1,2) sym, ...`
/// grouped by the larger index, followed by the diagonal generator of that
/// level. For `N = 2` this is `(sigma_x, sigma_y, sigma_z) / sqrt(2)`.
#[derive(Clone, Debug)]
pub struct GeneratorBasis {
    n: usize,
    operators: Vec<CMatrix>,
}

pub fn generator_basis(n: usize) -> Result<GeneratorBasis> {
    if n < 2 {
        return Err(Error::OutOfRange {
            name: "N",
            value: n as f64,
            lo: 2.0,
            hi: f64::INFINITY,
        });
    }
    let mut ops = Vec::with_capacity(n * n);
    ops.push(CMatrix::identity(n, n).map(|z| z / (n as f64).sqrt()));
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for k in 1..n {
        for j in 0..k {
            let mut sym = CMatrix::zeros(n, n);
            sym[(j, k)] = c(s, 0.0);
            sym[(k, j)] = c(s, 0.0);
            ops.push(sym);
            let mut anti = CMatrix::zeros(n, n);
            anti[(j, k)] = c(0.0, -s);
            anti[(k, j)] = c(0.0, s);
            ops.push(anti);
        }
        let norm = ((k * (k + 1)) as f64).sqrt();
        let mut diag = CMatrix::zeros(n, n);
        for m in 0..k {
            diag[(m, m)] = c(1.0 / norm, 0.0);
        }
        diag[(k, k)] = c(-(k as f64) / norm, 0.0);
        ops.push(diag);
    }
    Ok(GeneratorBasis { n, operators: ops })
}

impl GeneratorBasis {
    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// Orthonormal generators.
    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    /// Factor by which the orthonormal generator `i` is multiplied to obtain
    /// the generator in `convention`.
    pub fn scale(&self, i: usize, convention: Convention) -> f64 {
        match convention {
            Convention::Orthonormal => 1.0,
            Convention::Physics if i == 0 => (self.n as f64).sqrt(),
            Convention::Physics => std::f64::consts::SQRT_2,
        }
    }

    pub fn operator(&self, i: usize, convention: Convention) -> CMatrix {
        let s = self.scale(i, convention);
        self.operators[i].map(|z| z * s)
    }

    /// Gram matrix `Tr(G_i G_j^dagger)`.
    pub fn gram(&self) -> CMatrix {
        let m = self.len();
        CMatrix::from_fn(m, m, |i, j| {
            self.operators[i]
                .iter()
                .zip(self.operators[j].iter())
                .fold(ZERO, |acc, (a, b)| acc + a * b.conj())
        })
    }

    /// Real coordinates `Tr(G_i A)` of a Hermitian `N x N` matrix.
    pub fn coordinates(&self, a: &CMatrix) -> DVector<f64> {
        DVector::from_iterator(
            self.len(),
            self.operators.iter().map(|g| g.component_mul(&a.transpose()).sum().re),
        )
    }

    /// `sum_i x_i G_i`.
    pub fn combine(&self, x: &[f64]) -> CMatrix {
        let mut out = CMatrix::zeros(self.n, self.n);
        for (g, &xi) in self.operators.iter().zip(x) {
            out += g.map(|z| z * xi);
        }
        out
    }

    /// Matrix whose column `i` is the row-major flattening of `G_i`.
    fn vectorized(&self) -> CMatrix {
        let n = self.n;
        CMatrix::from_fn(n * n, self.len(), |r, i| self.operators[i][(r / n, r % n)])
    }
}

/// Expansion coefficients of a Hermitian bipartite operator in the product
/// basis `G^A_i (x) G^B_j` (orthonormal convention).
#[derive(Clone, Debug)]
pub struct CoefficientMatrix {
    pub lambda: DMatrix<f64>,
    pub basis_a: GeneratorBasis,
    pub basis_b: GeneratorBasis,
}

pub fn expand(op: &Operator) -> Result<CoefficientMatrix> {
    if op.parties() != 2 {
        return Err(Error::NotBipartite(op.parties()));
    }
    let dev = op.hermiticity_deviation();
    if dev > 1e-9 {
        return Err(Error::NotHermitian(dev));
    }
    let (da, db) = (op.dims()[0], op.dims()[1]);
    let basis_a = generator_basis(da)?;
    let basis_b = generator_basis(db)?;
    // realignment: R[(a,a'),(b,b')] = op[(a,b),(a',b')]
    let m = op.matrix();
    let realigned = CMatrix::from_fn(da * da, db * db, |r, col| {
        let (a, a2) = (r / da, r % da);
        let (b, b2) = (col / db, col % db);
        m[(a * db + b, a2 * db + b2)]
    });
    let va = basis_a.vectorized();
    let vb = basis_b.vectorized();
    let lam = va.adjoint() * realigned * vb.map(|z| z.conj());
    Ok(CoefficientMatrix {
        lambda: lam.map(|z| z.re),
        basis_a,
        basis_b,
    })
}

impl CoefficientMatrix {
    pub fn dims(&self) -> [usize; 2] {
        [self.basis_a.dimension(), self.basis_b.dimension()]
    }

    /// `sum_ij lambda_ij G^A_i (x) G^B_j`.
    pub fn recompose(&self) -> Operator {
        let [da, db] = self.dims();
        let mut out = CMatrix::zeros(da * db, da * db);
        for (i, ga) in self.basis_a.operators().iter().enumerate() {
            let mut bob = CMatrix::zeros(db, db);
            for (j, gb) in self.basis_b.operators().iter().enumerate() {
                let l = self.lambda[(i, j)];
                if l != 0.0 {
                    bob += gb.map(|z| z * l);
                }
            }
            out += ga.kronecker(&bob);
        }
        Operator::new(vec![da, db], out).expect("dimensions are consistent by construction")
    }

    /// The block `(lambda_ij)` with `i, j >= 1`.
    pub fn reduced(&self) -> DMatrix<f64> {
        let (r, c) = self.lambda.shape();
        self.lambda.view((1, 1), (r - 1, c - 1)).into_owned()
    }

    pub fn rank(&self, rel_tol: f64) -> usize {
        super::real_matrix_rank(&self.lambda, rel_tol)
    }

    /// Rank of the reduced block, with the cutoff scaled by the full
    /// coefficient matrix so a block that vanishes up to roundoff has rank 0.
    pub fn reduced_rank(&self, rel_tol: f64) -> usize {
        let top = self.lambda.clone().singular_values().max();
        if top <= 0.0 {
            return 0;
        }
        self.reduced().singular_values().iter().filter(|&&x| x > rel_tol * top).count()
    }

    /// Coefficients with respect to generators in `convention`.
    pub fn in_convention(&self, convention: Convention) -> DMatrix<f64> {
        DMatrix::from_fn(self.lambda.nrows(), self.lambda.ncols(), |i, j| {
            self.lambda[(i, j)] / (self.basis_a.scale(i, convention) * self.basis_b.scale(j, convention))
        })
    }
}

/// `rho = (1/N) 1 + sum_{i>=1} f_i G_i` for a unit-trace Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct BlochVector {
    pub identity_weight: f64,
    pub components: DVector<f64>,
}

impl BlochVector {
    pub fn of(rho: &CMatrix) -> Result<BlochVector> {
        if rho.nrows() != rho.ncols() {
            return Err(Error::NotSquare {
                rows: rho.nrows(),
                cols: rho.ncols(),
            });
        }
        let n = rho.nrows();
        let basis = generator_basis(n)?;
        let coords = basis.coordinates(rho);
        Ok(BlochVector {
            identity_weight: coords[0] / (n as f64).sqrt(),
            components: coords.rows(1, n * n - 1).into_owned(),
        })
    }

    pub fn of_pure(psi: &super::CVector) -> Result<BlochVector> {
        BlochVector::of(&(psi * psi.adjoint()))
    }

    pub fn dot(&self, other: &BlochVector) -> f64 {
        self.components.dot(&other.components)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{hs_distance, pauli, real_vector, Operator};
    use super::*;

    #[test]
    fn qubit_generators_are_scaled_paulis() {
        let g = generator_basis(2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let expected = [pauli::x(), pauli::y(), pauli::z()];
        for (i, p) in expected.iter().enumerate() {
            assert!((&g.operators()[i + 1] - p.map(|z| z * s)).norm() < 1e-15);
            assert!((g.operator(i + 1, Convention::Physics) - p).norm() < 1e-15);
        }
        assert!((g.gram() - CMatrix::identity(4, 4)).norm() < 1e-15);
    }

    #[test]
    fn qutrit_generators_are_traceless_and_orthonormal() {
        let g = generator_basis(3).unwrap();
        assert_eq!(g.len(), 9);
        for op in &g.operators()[1..] {
            assert!(op.trace().norm() < 1e-15);
        }
        assert!((g.gram() - CMatrix::identity(9, 9)).norm() < 1e-14);
        assert!(generator_basis(1).is_err());
    }

    #[test]
    fn pure_state_lambda_matrix_structure() {
        // |psi> = alpha|00> + beta|11>, expanded in sigma/sqrt(2)
        let (alpha, beta) = (0.6, 0.8);
        let psi = real_vector(&[alpha, 0.0, 0.0, beta]);
        let rho = Operator::projector(vec![2, 2], &psi).unwrap();
        let cm = expand(&rho).unwrap();
        let phys = cm.in_convention(Convention::Physics);
        let l = &phys;
        assert!((l[(0, 0)] - 0.25).abs() < 1e-15);
        assert!((l[(3, 3)] - 0.25).abs() < 1e-15);
        assert!((l[(0, 3)] - (alpha * alpha - beta * beta) / 4.0).abs() < 1e-15);
        assert!((l[(3, 0)] - (alpha * alpha - beta * beta) / 4.0).abs() < 1e-15);
        assert!((l[(1, 1)] - alpha * beta / 2.0).abs() < 1e-15);
        assert!((l[(2, 2)] + alpha * beta / 2.0).abs() < 1e-15);
        assert_eq!(cm.reduced_rank(1e-10), 3);
        assert!(hs_distance(&cm.recompose(), &rho) < 1e-15);
    }

    #[test]
    fn bloch_vector_of_pure_state() {
        let psi = real_vector(&[0.6, 0.8, 0.0]);
        let f = BlochVector::of_pure(&psi).unwrap();
        assert!((f.identity_weight - 1.0 / 3.0).abs() < 1e-15);
        assert!((f.components.norm_squared() - 2.0 / 3.0).abs() < 1e-14);
        let g = BlochVector::of_pure(&real_vector(&[0.8, -0.6, 0.0])).unwrap();
        assert!((f.dot(&g) + 1.0 / 3.0).abs() < 1e-14);
    }
}
