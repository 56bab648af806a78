use super::{DensityMatrix, Family};
use crate::error::{Error, Result};
use crate::linalg::{psd_kernel, tensor_vectors, CMatrix, CVector, Operator, RANK_TOL};
use crate::seesaw::{ProductQuotient, SeesawOptions};

pub const KERNEL_SEARCH_RESTARTS: usize = 200;
/// Largest accepted `<ef| Pi_range |ef>` for a kernel product vector.
pub const KERNEL_RESIDUAL_TOL: f64 = 1e-8;
/// Product vectors with overlap modulus above `1 - DEDUP_TOL` are identified.
pub const DEDUP_TOL: f64 = 1e-6;

/// Normalized local factors of a product vector, party 0 first.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductVector {
    pub factors: Vec<CVector>,
}

impl ProductVector {
    /// Normalizes each factor.
    pub fn new(factors: Vec<CVector>) -> Self {
        let factors = factors.into_iter().map(|f| {
            let n = f.norm();
            f.map(|z| z / n)
        });
        ProductVector {
            factors: factors.collect(),
        }
    }

    pub fn vector(&self) -> CVector {
        let refs: Vec<&CVector> = self.factors.iter().collect();
        tensor_vectors(&refs)
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.len()).collect()
    }
}

/// Product vectors found in a kernel plus any per-vector failures.
#[derive(Clone, Debug, Default)]
pub struct KernelSearch {
    pub vectors: Vec<ProductVector>,
    pub failures: Vec<String>,
}

impl KernelSearch {
    /// Number of linearly independent vectors found.
    pub fn independent_count(&self) -> usize {
        if self.vectors.is_empty() {
            return 0;
        }
        let cols: Vec<CVector> = self.vectors.iter().map(|v| v.vector()).collect();
        crate::linalg::matrix_rank(&CMatrix::from_columns(&cols), 1e-8)
    }
}

/// Closed-form solutions for the chessboard family, a seesaw search with
/// default settings otherwise.
pub fn kernel_product_vectors(rho: &DensityMatrix) -> Result<KernelSearch> {
    if let Some(Family::Chessboard(params)) = rho.family() {
        return Ok(super::chessboard_kernel_vectors(params));
    }
    search_kernel_product_vectors(rho.operator(), KERNEL_SEARCH_RESTARTS, 0)
}

/// Alternating minimization of `||Pi_range |e,f>||^2` from `restarts`
/// random product starts; keeps minima below [`KERNEL_RESIDUAL_TOL`] and
/// removes duplicates.
pub fn search_kernel_product_vectors(op: &Operator, restarts: usize, seed: u64) -> Result<KernelSearch> {
    if op.parties() != 2 {
        return Err(Error::NotBipartite(op.parties()));
    }
    let kernel = psd_kernel(op.matrix(), RANK_TOL);
    let mut out = KernelSearch::default();
    if kernel.ncols() == 0 {
        return Ok(out);
    }
    let n = op.dim();
    let range = CMatrix::identity(n, n) - &kernel * kernel.adjoint();
    let range = Operator::new(op.dims().to_vec(), range)?;
    let opts = SeesawOptions {
        restarts,
        seed,
        ..Default::default()
    };
    let minima = ProductQuotient {
        numerator: &range,
        denominator: None,
    }
    .local_minima(&opts)?;
    for m in minima {
        if m.value > KERNEL_RESIDUAL_TOL {
            continue;
        }
        let cand = ProductVector::new(vec![m.e, m.f]);
        let v = cand.vector();
        let duplicate = out.vectors.iter().any(|w| w.vector().dotc(&v).norm() > 1.0 - DEDUP_TOL);
        if !duplicate {
            out.vectors.push(cand);
        }
    }
    Ok(out)
}
