use serde::{Deserialize, Serialize};

use super::{LocalDecomposition, Setting, TensorDecomposition, TensorTerm, MERGE_TOL};
use crate::error::{Error, Result};
use crate::linalg::{c, pauli, real_vector, CMatrix, CVector, Operator};
use crate::seesaw::SeesawOptions;
use crate::states::{horodecki_state, upb_completion_factors, upb_factors};
use crate::witness::{edge_witness, EpsilonMode};

/// Which operator the UPB settings realize.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UpbVariant {
    /// `W-bar`, the projector onto the five UPB vectors: 5 settings.
    Prewitness,
    /// `W-bar - eps 1` with `1` resolved into the nine partner projectors
    /// and `|11><11|`: 6 settings.
    Identity,
    /// `W-bar - eps' I` with `I` the sum of the nine product projectors:
    /// 9 projectors in 5 settings.
    Projectors,
}

fn basis(cols: &[[f64; 3]]) -> CMatrix {
    let vs: Vec<CVector> = cols
        .iter()
        .map(|v| {
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            real_vector(&v.map(|x| x / n))
        })
        .collect();
    CMatrix::from_columns(&vs)
}

/// The four qutrit bases the UPB settings are drawn from.
fn upb_bases() -> [CMatrix; 4] {
    [
        basis(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]),
        basis(&[[1.0, -1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 1.0, 0.0]]),
        basis(&[[0.0, 1.0, -1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 1.0]]),
        basis(&[[1.0, -1.0, 0.0], [1.0, 1.0, 1.0], [1.0, 1.0, -2.0]]),
    ]
}

fn outcome_of(basis: &CMatrix, v: &CVector) -> Result<usize> {
    (0..basis.ncols())
        .find(|&k| basis.column(k).dotc(v).norm() > 1.0 - MERGE_TOL)
        .ok_or_else(|| Error::InvalidSetting("vector is not in the measurement basis".into()))
}

fn add_projector(st: &mut Setting, weight: f64, a: &CVector, b: &CVector) -> Result<()> {
    let k = st.flat_index(&[outcome_of(&st.bases[0], a)?, outcome_of(&st.bases[1], b)?]);
    st.coeffs[k] += weight;
    Ok(())
}

/// Local settings for the UPB witness from the bases
/// `B1 = {0, 1, 2}`, `B2 = {0-1, 2, 0+1}`, `B3 = {1-2, 0, 1+2}` and
/// `B4 = {0-1, 0+1+2, 0+1-2}` (normalized), in the pairs
/// `B1B2, B2B1, B1B3, B3B1, B4B4` plus `B1B1` for the identity variant.
pub fn upb_witness_settings(variant: UpbVariant, epsilon: f64) -> Result<LocalDecomposition> {
    let [b1, b2, b3, b4] = upb_bases();
    let pairs = [(&b1, &b2), (&b2, &b1), (&b1, &b3), (&b3, &b1), (&b4, &b4)];
    let tiles = upb_factors();
    let partners = upb_completion_factors();
    let eps = match variant {
        UpbVariant::Prewitness => 0.0,
        _ => epsilon,
    };
    let mut settings = Vec::new();
    for (i, (ba, bb)) in pairs.iter().enumerate() {
        let mut st = Setting::zeros(vec![(*ba).clone(), (*bb).clone()])?;
        let (a, b) = &tiles[i];
        let own = match variant {
            UpbVariant::Identity if i == 4 => 1.0,
            _ => 1.0 - eps,
        };
        add_projector(&mut st, own, a, b)?;
        if i < 4 && variant != UpbVariant::Prewitness {
            let (a, b) = &partners[i];
            add_projector(&mut st, -eps, a, b)?;
        }
        settings.push(st);
    }
    if variant == UpbVariant::Identity {
        let mut st = Setting::zeros(vec![b1.clone(), b1.clone()])?;
        let (a, b) = &partners[4];
        add_projector(&mut st, -eps, a, b)?;
        settings.push(st);
    }
    LocalDecomposition::new(vec![3, 3], settings)
}

/// `Tr_A((S (x) 1) W)` for a 2 x n operator.
fn partial_trace_with(s: &CMatrix, w: &Operator) -> CMatrix {
    let n = w.dims()[1];
    let m = w.matrix();
    CMatrix::from_fn(n, n, |i, j| {
        let mut acc = c(0.0, 0.0);
        for a in 0..2 {
            for b in 0..2 {
                acc += s[(b, a)] * m[(a * n + i, b * n + j)];
            }
        }
        acc
    })
}

/// Edge witness of the 2 x 4 Horodecki state with shift `epsilon`, written
/// as `sum_i sigma_i (x) tau_i` with `sigma_0 = 1/2` and the Pauli
/// matrices.
pub fn horodecki_decomposition(b: f64, epsilon: f64) -> Result<TensorDecomposition> {
    let rho = horodecki_state(b)?;
    let w = edge_witness(&rho, EpsilonMode::Given(epsilon), &SeesawOptions::default())?.op;
    horodecki_terms(&w)
}

/// `sum_i sigma_i (x) tau_i` for any Hermitian operator on `C^2 (x) C^n`.
pub fn horodecki_terms(w: &Operator) -> Result<TensorDecomposition> {
    if w.parties() != 2 || w.dims()[0] != 2 {
        return Err(Error::InvalidSetting(format!("expected a 2 x n operator, got dims {:?}", w.dims())));
    }
    let mut terms = Vec::with_capacity(4);
    let half = pauli::identity().map(|z| z * 0.5);
    terms.push(TensorTerm {
        gamma: 1.0,
        factors: vec![half, partial_trace_with(&pauli::identity(), w)],
    });
    for s in [pauli::x(), pauli::y(), pauli::z()] {
        let tau = partial_trace_with(&s, w).map(|z| z * 0.5);
        terms.push(TensorTerm {
            gamma: 1.0,
            factors: vec![s, tau],
        });
    }
    Ok(TensorDecomposition {
        dims: w.dims().to_vec(),
        terms,
    })
}
