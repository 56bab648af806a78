use serde::{Deserialize, Serialize};

use super::is_w0;
use crate::error::{check_range, Error, Result};
use crate::linalg::Operator;
use crate::states::max_noise_radius;

/// Smallest `tau` such that `Tr(W0 rho(p, d)) >= tau` implies separability
/// for every `p`, given only the noise radius `d`.
pub fn tau_threshold(d: f64) -> Result<f64> {
    check_range("d", d, 0.0, max_noise_radius())?;
    let d2 = d * d;
    let radicand = ((1.0 / 12.0 - d2) * (0.75 - d2)).max(0.0);
    Ok(0.25 - d2 - radicand.sqrt())
}

/// Threshold when the mixing weight `p` is known as well.
pub fn theta_threshold(p: f64, d: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            lo: 0.0,
            hi: 1.0,
        });
    }
    check_range("d", d, 0.0, max_noise_radius())?;
    let q = 1.0 - p;
    Ok(0.25 - 1.0 / (24.0 * p) - 3.0 * p / 8.0 + q * q * d * d / (2.0 * p))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Entangled,
    SeparableCertified,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdKind {
    Tau,
    Theta,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub value: f64,
    pub classification: Classification,
    pub threshold_kind: ThresholdKind,
    pub threshold: f64,
}

/// Three-way decision from a measured `alpha = Tr(W0 rho)`: entangled when
/// negative, separable when at least the threshold (`theta(p, d)` if `p` is
/// known, `tau(d)` otherwise), inconclusive in between.
pub fn classify(witness: &Operator, alpha: f64, d: f64, p: Option<f64>) -> Result<Verdict> {
    if !is_w0(witness) {
        return Err(Error::ThresholdRequiresW0);
    }
    let (threshold_kind, threshold) = match p {
        Some(p) => (ThresholdKind::Theta, theta_threshold(p, d)?),
        None => (ThresholdKind::Tau, tau_threshold(d)?),
    };
    let classification = if alpha < 0.0 {
        Classification::Entangled
    } else if alpha >= threshold {
        Classification::SeparableCertified
    } else {
        Classification::Inconclusive
    };
    Ok(Verdict {
        value: alpha,
        classification,
        threshold_kind,
        threshold,
    })
}
