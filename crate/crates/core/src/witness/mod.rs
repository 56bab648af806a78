//! Witness operators: NPT witnesses from partial transposes, the GHZ and W
//! class witnesses, and edge-state witnesses with an optimized shift.

mod edge;
mod thresholds;

pub use edge::{edge_prewitness, edge_witness, optimize_epsilon, EpsilonMode, EpsilonResult, PreWitness};
pub use thresholds::{classify, tau_threshold, theta_threshold, Classification, ThresholdKind, Verdict};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{canonical_phase, hs_distance, partial_transpose, Operator};
use crate::states::{bell_vector, ghz_vector, w_vector, BellKind, DensityMatrix, PPT_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    Npt,
    Ghz,
    W1,
    W2,
    Edge,
}

/// Inputs a witness was built from.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub construction: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon_mode: Option<String>,
    /// Most negative eigenvalue of the partial transpose (NPT witnesses).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub negative_eigenvalue: Option<f64>,
    /// Dimensions of the kernels of the state and of its partial transpose.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel_dims: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// Hermitian operator with nonnegative expectation on separable states.
#[derive(Clone, Debug)]
pub struct Witness {
    pub op: Operator,
    pub kind: WitnessKind,
    pub provenance: Provenance,
}

impl Witness {
    /// `Tr(W rho)`.
    pub fn value(&self, rho: &DensityMatrix) -> f64 {
        rho.expectation(&self.op)
    }

    pub fn detects(&self, rho: &DensityMatrix) -> bool {
        self.value(rho) < 0.0
    }
}

/// `|phi-><phi-|^{T_B} = 1/2 - |psi+><psi+|`, the witness for `rho(p, d)`.
pub fn w0() -> Operator {
    let phi = Operator::projector(vec![2, 2], &bell_vector(BellKind::PhiMinus)).expect("2x2");
    partial_transpose(&phi, 1).expect("bipartite")
}

/// `true` if `op` equals [`w0`] to `1e-10`.
pub fn is_w0(op: &Operator) -> bool {
    op.dims() == [2, 2] && hs_distance(op, &w0()) < 1e-10
}

/// `|phi><phi|^{T_B}` for the eigenvector `phi` of the most negative
/// eigenvalue of `rho^{T_B}`, with its first significant entry made real
/// and positive.
pub fn npt_witness(rho: &DensityMatrix) -> Result<Witness> {
    if rho.dims().len() != 2 {
        return Err(Error::NotBipartite(rho.dims().len()));
    }
    let pt = partial_transpose(rho.operator(), 1)?;
    let (vals, vecs) = pt.eigen();
    if vals[0] >= -PPT_TOL {
        return Err(Error::NoNptWitness(vals[0]));
    }
    let phi = canonical_phase(&vecs.column(0).into_owned());
    let op = partial_transpose(&Operator::projector(rho.dims().to_vec(), &phi)?, 1)?;
    Ok(Witness {
        op,
        kind: WitnessKind::Npt,
        provenance: Provenance {
            construction: "partial transpose of the negative-eigenvalue eigenprojector".into(),
            negative_eigenvalue: Some(vals[0]),
            ..Default::default()
        },
    })
}

fn shifted_projector(shift: f64, psi: &crate::linalg::CVector, kind: WitnessKind, label: &str) -> Witness {
    let proj = Operator::projector(vec![2, 2, 2], psi).expect("3 qubits");
    let op = Operator::identity(vec![2, 2, 2]).scaled(shift).add_scaled(&proj, -1.0).expect("same shape");
    Witness {
        op,
        kind,
        provenance: Provenance {
            construction: label.into(),
            ..Default::default()
        },
    }
}

/// `3/4 - |GHZ><GHZ|`.
pub fn ghz_witness() -> Witness {
    shifted_projector(0.75, &ghz_vector(), WitnessKind::Ghz, "3/4 - |GHZ><GHZ|")
}

/// `2/3 - |W><W|`, detecting W-class and GHZ-class states.
pub fn w_witness_1() -> Witness {
    shifted_projector(2.0 / 3.0, &w_vector(), WitnessKind::W1, "2/3 - |W><W|")
}

/// `1/2 - |GHZ><GHZ|`, detecting GHZ-class states outside the W class.
pub fn w_witness_2() -> Witness {
    shifted_projector(0.5, &ghz_vector(), WitnessKind::W2, "1/2 - |GHZ><GHZ|")
}
