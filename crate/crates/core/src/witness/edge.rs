use super::{Provenance, Witness, WitnessKind};
use crate::error::{Error, Result};
use crate::linalg::{hs_distance, matrix_rank, partial_transpose, psd_kernel, CMatrix, CVector, Operator, RANK_TOL};
use crate::seesaw::{ProductQuotient, SeesawOptions};
use crate::states::{chessboard_kernel_vectors, DensityMatrix, Family, ProductVector, PPT_TOL};

/// `Q^{T_A}` is dropped from the pre-witness when it equals `P` to this
/// Hilbert-Schmidt distance.
pub const SKIP_TOL: f64 = 1e-10;

/// Positive operator `W-bar = P + Q^{T_A}` assembled from the kernels of an
/// edge state and of its partial transpose.
#[derive(Clone, Debug)]
pub struct PreWitness {
    pub wbar: Operator,
    pub p: Operator,
    /// `None` when `Q^{T_A}` coincides with `P` and was skipped.
    pub q_ta: Option<Operator>,
    /// Kernel dimensions of the state and of its partial transpose.
    pub kernel_dims: [usize; 2],
    /// Product vectors whose projectors form `P` (product-vector variant).
    pub product_vectors: Option<Vec<ProductVector>>,
}

fn projector_sum(dims: &[usize], vectors: &[CVector]) -> Result<Operator> {
    let mut out = Operator::zeros(dims.to_vec());
    for v in vectors {
        out = out.add_scaled(&Operator::projector(dims.to_vec(), v)?, 1.0)?;
    }
    Ok(out)
}

fn columns(m: &CMatrix) -> Vec<CVector> {
    m.column_iter().map(|c| c.into_owned()).collect()
}

/// Greedily keeps vectors that increase the rank of the collection.
fn independent_subset(vectors: &[ProductVector]) -> Vec<ProductVector> {
    let mut kept: Vec<ProductVector> = Vec::new();
    let mut cols: Vec<CVector> = Vec::new();
    for v in vectors {
        let mut trial = cols.clone();
        trial.push(v.vector());
        if matrix_rank(&CMatrix::from_columns(&trial), 1e-8) == trial.len() {
            cols = trial;
            kept.push(v.clone());
        }
    }
    kept
}

fn assemble(p: Operator, q: &Operator, kernel_dims: [usize; 2], pv: Option<Vec<ProductVector>>) -> Result<PreWitness> {
    let q_ta = partial_transpose(q, 0)?;
    let (wbar, q_ta) = if hs_distance(&q_ta, &p) < SKIP_TOL {
        (p.clone(), None)
    } else {
        (p.add_scaled(&q_ta, 1.0)?, Some(q_ta))
    };
    Ok(PreWitness {
        wbar,
        p,
        q_ta,
        kernel_dims,
        product_vectors: pv,
    })
}

/// Builds `W-bar` for a PPT state with nontrivial kernels. Chessboard states
/// use the projectors onto independent closed-form kernel product vectors
/// in place of the kernel projectors.
pub fn edge_prewitness(delta: &DensityMatrix) -> Result<PreWitness> {
    let op = delta.operator();
    if op.parties() != 2 {
        return Err(Error::NotBipartite(op.parties()));
    }
    let pt = partial_transpose(op, 0)?;
    let min = pt.min_eigenvalue();
    if min < -PPT_TOL {
        return Err(Error::NotPositive(min));
    }
    let kernel = psd_kernel(op.matrix(), RANK_TOL);
    let kernel_pt = psd_kernel(pt.matrix(), RANK_TOL);
    let kernel_dims = [kernel.ncols(), kernel_pt.ncols()];
    if kernel_dims[0] == 0 || kernel_dims[1] == 0 {
        return Err(Error::TrivialKernel(format!(
            "kernel dimensions {} (state) and {} (partial transpose)",
            kernel_dims[0], kernel_dims[1]
        )));
    }
    if let Some(Family::Chessboard(params)) = delta.family() {
        let found = chessboard_kernel_vectors(params);
        let chosen = independent_subset(&found.vectors);
        if chosen.is_empty() {
            return Err(Error::TrivialKernel("no closed-form kernel product vector".into()));
        }
        let vecs: Vec<CVector> = chosen.iter().map(|v| v.vector()).collect();
        let p = projector_sum(op.dims(), &vecs)?;
        // the state equals its partial transpose, so both kernels agree
        let q = p.clone();
        return assemble(p, &q, kernel_dims, Some(chosen));
    }
    let p = projector_sum(op.dims(), &columns(&kernel))?;
    let q = projector_sum(op.dims(), &columns(&kernel_pt))?;
    assemble(p, &q, kernel_dims, None)
}

#[derive(Clone, Debug)]
pub enum EpsilonMode {
    Given(f64),
    Optimize,
    /// Optimize `<ef|W-bar|ef> / <ef|I|ef>` and subtract `eps' I`.
    OptimizePrimed(Operator),
}

#[derive(Clone, Debug)]
pub struct EpsilonResult {
    pub epsilon: f64,
    /// Product vector achieving the minimum, party 0 first.
    pub argmin: ProductVector,
    pub restarts: usize,
    pub converged_restarts: usize,
}

/// Infimum of `<ef|W-bar|ef>` (or of the quotient with `denominator`) over
/// normalized product vectors, estimated by the seesaw iteration.
pub fn optimize_epsilon(wbar: &Operator, denominator: Option<&Operator>, opts: &SeesawOptions) -> Result<EpsilonResult> {
    let r = ProductQuotient {
        numerator: wbar,
        denominator,
    }
    .minimize(opts)?;
    Ok(EpsilonResult {
        epsilon: r.best.value,
        argmin: ProductVector::new(vec![r.best.e, r.best.f]),
        restarts: r.restarts,
        converged_restarts: r.converged_restarts,
    })
}

/// `W = W-bar - eps 1` (or `W-bar - eps' I`) for an edge state.
pub fn edge_witness(delta: &DensityMatrix, mode: EpsilonMode, opts: &SeesawOptions) -> Result<Witness> {
    let pre = edge_prewitness(delta)?;
    let dims = pre.wbar.dims().to_vec();
    let mut notes = Vec::new();
    if pre.q_ta.is_none() {
        notes.push("Q^{T_A} equals P and was skipped".to_string());
    }
    if let Some(pv) = &pre.product_vectors {
        notes.push(format!("P built from {} kernel product vectors", pv.len()));
    }
    let (epsilon, label, subtract) = match mode {
        EpsilonMode::Given(eps) => (eps, "given", Operator::identity(dims)),
        EpsilonMode::Optimize => {
            let r = optimize_epsilon(&pre.wbar, None, opts)?;
            notes.push(format!("{} of {} restarts converged", r.converged_restarts, r.restarts));
            (r.epsilon, "optimize", Operator::identity(dims))
        }
        EpsilonMode::OptimizePrimed(den) => {
            let r = optimize_epsilon(&pre.wbar, Some(&den), opts)?;
            notes.push(format!("{} of {} restarts converged", r.converged_restarts, r.restarts));
            (r.epsilon, "primed", den)
        }
    };
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::NonPositiveEpsilon(epsilon));
    }
    let op = pre.wbar.add_scaled(&subtract, -epsilon)?;
    Ok(Witness {
        op,
        kind: WitnessKind::Edge,
        provenance: Provenance {
            construction: "P + Q^{T_A} - eps I from kernel projectors".into(),
            epsilon: Some(epsilon),
            epsilon_mode: Some(label.into()),
            kernel_dims: Some(pre.kernel_dims),
            notes,
            ..Default::default()
        },
    })
}
