//! Decompositions of operators into locally measurable pieces.
//!
//! A [`Setting`] is one joint choice of orthonormal basis per party together
//! with a real weight for every joint outcome; it realizes the operator
//! `sum_k c_k |A_k1><A_k1| (x) |B_k2><B_k2| (x) ...`. A
//! [`LocalDecomposition`] is a list of settings whose realized operators sum
//! to a target.

mod json;
mod ons;
mod pauli;
mod product;
mod published;

pub use json::{decomposition_from_json, decomposition_to_json};
pub use ons::{round_robin_pairing, schmidt_ons, settings_lower_bound, settings_lower_bound_pure, two_qubit_three_settings};
pub use pauli::{ghz_decomposition, pauli_decomposition, w1_decomposition, w2_decomposition, PauliSum, PauliTerm};
pub use product::{
    onp_five_projectors, operator_basis_decomposition, ProductTerm, ProductVectorDecomposition, TensorDecomposition,
    TensorTerm,
};
pub use published::{horodecki_decomposition, horodecki_terms, upb_witness_settings, UpbVariant};

use crate::error::{Error, Result};
use crate::linalg::{hs_distance, CMatrix, CVector, Operator, ONE};

/// Coefficients below this magnitude are treated as zero when counting.
pub const PRUNE_TOL: f64 = 1e-12;
/// Orthonormality tolerance for setting bases.
pub const BASIS_TOL: f64 = 1e-12;
/// Two basis vectors are identified when `|<a|b>| > 1 - MERGE_TOL`.
pub const MERGE_TOL: f64 = 1e-9;

/// One local von Neumann measurement setting.
#[derive(Clone, Debug, PartialEq)]
pub struct Setting {
    /// Per party, a unitary whose columns are the measurement basis.
    pub bases: Vec<CMatrix>,
    /// Weight of each joint outcome, row-major with party 0 most significant.
    pub coeffs: Vec<f64>,
}

impl Setting {
    pub fn new(bases: Vec<CMatrix>, coeffs: Vec<f64>) -> Result<Self> {
        let s = Setting { bases, coeffs };
        s.validate()?;
        Ok(s)
    }

    /// Setting with all weights zero.
    pub fn zeros(bases: Vec<CMatrix>) -> Result<Self> {
        let n = bases.iter().map(|b| b.ncols()).product();
        Setting::new(bases, vec![0.0; n])
    }

    fn validate(&self) -> Result<()> {
        if self.bases.is_empty() {
            return Err(Error::InvalidSetting("no parties".into()));
        }
        for (p, b) in self.bases.iter().enumerate() {
            if b.nrows() != b.ncols() {
                return Err(Error::InvalidSetting(format!("basis of party {p} is not square")));
            }
            let dev = (b.adjoint() * b - CMatrix::identity(b.nrows(), b.ncols())).camax();
            if dev > BASIS_TOL {
                return Err(Error::InvalidSetting(format!(
                    "basis of party {p} is not orthonormal (deviation {dev:e})"
                )));
            }
        }
        if self.coeffs.len() != self.outcome_count() {
            return Err(Error::InvalidSetting(format!(
                "expected {} coefficients, found {}",
                self.outcome_count(),
                self.coeffs.len()
            )));
        }
        if self.coeffs.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidSetting("non-finite coefficient".into()));
        }
        Ok(())
    }

    pub fn dims(&self) -> Vec<usize> {
        self.bases.iter().map(|b| b.nrows()).collect()
    }

    pub fn outcome_count(&self) -> usize {
        self.bases.iter().map(|b| b.ncols()).product()
    }

    /// Per-party outcome indices of flat outcome `k`.
    pub fn outcome(&self, mut k: usize) -> Vec<usize> {
        let dims = self.dims();
        let mut out = vec![0; dims.len()];
        for p in (0..dims.len()).rev() {
            out[p] = k % dims[p];
            k /= dims[p];
        }
        out
    }

    /// Flat index of per-party outcomes.
    pub fn flat_index(&self, outcome: &[usize]) -> usize {
        self.dims().iter().zip(outcome).fold(0, |acc, (&d, &k)| acc * d + k)
    }

    /// Joint basis `U_0 (x) U_1 (x) ...`.
    pub fn joint_basis(&self) -> CMatrix {
        let mut u = CMatrix::from_element(1, 1, ONE);
        for b in &self.bases {
            u = u.kronecker(b);
        }
        u
    }

    /// Product vector of outcome `k`.
    pub fn outcome_vector(&self, k: usize) -> CVector {
        self.joint_basis().column(k).into_owned()
    }

    /// `U diag(c) U^dagger`.
    pub fn realize(&self) -> Operator {
        let u = self.joint_basis();
        let mut scaled = u.clone();
        for (k, &ck) in self.coeffs.iter().enumerate() {
            for r in 0..scaled.nrows() {
                scaled[(r, k)] *= ck;
            }
        }
        Operator::new(self.dims(), scaled * u.adjoint()).expect("square by construction")
    }

    pub fn is_negligible(&self) -> bool {
        self.coeffs.iter().all(|x| x.abs() < PRUNE_TOL)
    }

    /// Conjugates the basis of `party`, which transposes that factor of the
    /// realized operator.
    pub fn transpose_party(&mut self, party: usize) {
        self.bases[party] = self.bases[party].map(|z| z.conj());
    }

    /// If every party's basis equals the one in `other` up to per-vector
    /// phases and a permutation, returns the per-party permutations mapping
    /// outcome indices of `other` to those of `self`.
    pub fn matching(&self, other: &Setting) -> Option<Vec<Vec<usize>>> {
        if self.dims() != other.dims() {
            return None;
        }
        let mut perms = Vec::with_capacity(self.bases.len());
        for (a, b) in self.bases.iter().zip(&other.bases) {
            let overlap = a.adjoint() * b;
            let n = a.ncols();
            let mut perm = vec![usize::MAX; n];
            for j in 0..n {
                let i = (0..n).find(|&i| overlap[(i, j)].norm() > 1.0 - MERGE_TOL)?;
                perm[j] = i;
            }
            perms.push(perm);
        }
        Some(perms)
    }

    /// Adds the weights of `other` (matched by [`Setting::matching`]).
    fn absorb(&mut self, other: &Setting, perms: &[Vec<usize>]) {
        for k in 0..other.coeffs.len() {
            let out = other.outcome(k);
            let mapped: Vec<usize> = out.iter().zip(perms).map(|(&o, p)| p[o]).collect();
            let idx = self.flat_index(&mapped);
            self.coeffs[idx] += other.coeffs[k];
        }
    }
}

/// Settings whose realized operators sum to an operator on `target_dims`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalDecomposition {
    pub target_dims: Vec<usize>,
    pub settings: Vec<Setting>,
}

impl LocalDecomposition {
    pub fn new(target_dims: Vec<usize>, settings: Vec<Setting>) -> Result<Self> {
        for s in &settings {
            if s.dims() != target_dims {
                return Err(Error::InvalidSetting(format!(
                    "setting dims {:?} differ from target dims {:?}",
                    s.dims(),
                    target_dims
                )));
            }
        }
        Ok(LocalDecomposition { target_dims, settings })
    }

    pub fn recompose(&self) -> Operator {
        let mut out = Operator::zeros(self.target_dims.clone());
        for s in &self.settings {
            out = out.add_scaled(&s.realize(), 1.0).expect("dims checked on construction");
        }
        out
    }

    /// `||recompose - target||_HS`.
    pub fn verify(&self, target: &Operator) -> Result<f64> {
        if target.dims() != self.target_dims.as_slice() {
            return Err(Error::DimensionMismatch {
                expected: self.target_dims.iter().product(),
                found: target.dim(),
            });
        }
        Ok(hs_distance(&self.recompose(), target))
    }

    /// Drops negligible settings and merges settings with equal bases (up to
    /// phases and outcome relabeling), summing their weights.
    pub fn merged(&self) -> LocalDecomposition {
        let mut out: Vec<Setting> = Vec::new();
        for s in self.settings.iter().filter(|s| !s.is_negligible()) {
            match out.iter().enumerate().find_map(|(i, m)| m.matching(s).map(|p| (i, p))) {
                Some((i, perms)) => out[i].absorb(s, &perms),
                None => out.push(s.clone()),
            }
        }
        out.retain(|s| !s.is_negligible());
        LocalDecomposition {
            target_dims: self.target_dims.clone(),
            settings: out,
        }
    }

    /// Number of distinct settings after pruning and merging.
    pub fn count_settings(&self) -> usize {
        self.merged().settings.len()
    }

    /// Transposes the factor `party` of the decomposed operator by
    /// conjugating that party's bases. The setting count is unchanged.
    pub fn partial_transpose(&self, party: usize) -> Result<LocalDecomposition> {
        if party >= self.target_dims.len() {
            return Err(Error::InvalidParty {
                party,
                parties: self.target_dims.len(),
            });
        }
        let mut out = self.clone();
        for s in &mut out.settings {
            s.transpose_party(party);
        }
        Ok(out)
    }

    /// Number of projectors with a nonzero weight.
    pub fn projector_count(&self) -> usize {
        self.settings
            .iter()
            .map(|s| s.coeffs.iter().filter(|x| x.abs() >= PRUNE_TOL).count())
            .sum()
    }

    /// Scales every weight.
    pub fn scaled(&self, factor: f64) -> LocalDecomposition {
        let mut out = self.clone();
        for s in &mut out.settings {
            for x in &mut s.coeffs {
                *x *= factor;
            }
        }
        out
    }
}

/// Orthonormal basis of eigenvectors of a Hermitian matrix and the matching
/// eigenvalues.
pub(crate) fn eigenbasis(m: &CMatrix) -> (CMatrix, Vec<f64>) {
    let (_, vecs) = crate::linalg::hermitian_eigen(m);
    // Re-orthonormalize so near-degenerate eigenvectors pass BASIS_TOL.
    let cols: Vec<CVector> = vecs.column_iter().map(|c| c.into_owned()).collect();
    let u = crate::linalg::complete_basis(&cols, m.nrows());
    let vals = (0..m.nrows())
        .map(|k| {
            let v = u.column(k);
            (v.adjoint() * m * v)[(0, 0)].re
        })
        .collect();
    (u, vals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, pauli};

    fn z_setting(coeffs: Vec<f64>) -> Setting {
        Setting::new(vec![CMatrix::identity(2, 2), CMatrix::identity(2, 2)], coeffs).unwrap()
    }

    #[test]
    fn split_setting_merges_back() {
        let whole = LocalDecomposition::new(vec![2, 2], vec![z_setting(vec![1.0, 2.0, 3.0, 4.0])]).unwrap();
        let mut flipped = CMatrix::zeros(2, 2);
        flipped[(1, 0)] = c(0.0, 1.0);
        flipped[(0, 1)] = c(-1.0, 0.0);
        // second half uses the same basis with permuted, rephased vectors
        let half_b = Setting::new(vec![CMatrix::identity(2, 2), flipped], vec![0.0, 0.0, 4.0, 3.0]).unwrap();
        let split = LocalDecomposition::new(vec![2, 2], vec![z_setting(vec![1.0, 2.0, 0.0, 0.0]), half_b]).unwrap();
        assert_eq!(split.count_settings(), 1);
        assert!(hs_distance(&split.recompose(), &whole.recompose()) < 1e-15);
        assert!(hs_distance(&split.merged().recompose(), &whole.recompose()) < 1e-15);
    }

    #[test]
    fn invalid_basis_is_rejected() {
        let bad = CMatrix::from_element(2, 2, c(1.0, 0.0));
        assert!(Setting::new(vec![bad], vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn negligible_settings_are_pruned() {
        let d = LocalDecomposition::new(vec![2, 2], vec![z_setting(vec![1.0, 0.0, 0.0, 0.0]), z_setting(vec![0.0; 4])]).unwrap();
        assert_eq!(d.count_settings(), 1);
        let (u, vals) = eigenbasis(&pauli::x());
        assert_eq!(u.ncols(), 2);
        assert!((vals[0] + 1.0).abs() < 1e-15);
    }
}
