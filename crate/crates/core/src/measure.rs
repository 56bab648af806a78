//! Finite-shot simulation of local measurement settings and estimation of
//! `Tr(W rho)` from a [`LocalDecomposition`].

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decomp::{LocalDecomposition, Setting};
use crate::error::{Error, Result};
use crate::random::rng_stream;
use crate::states::DensityMatrix;

/// Outcome probabilities below `-PROB_TOL` are rejected; smaller
/// deviations are clipped.
pub const PROB_TOL: f64 = 1e-12;

/// Counts of one setting's joint outcomes, flattened like
/// [`Setting::coeffs`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub setting: usize,
    pub counts: Vec<u64>,
    pub shots: u64,
}

/// One CSV row of a shot record.
#[derive(Clone, Debug, Serialize)]
pub struct ShotRow {
    pub setting: usize,
    /// Per-party outcome indices joined by `-`.
    pub outcome: String,
    pub count: u64,
}

impl ShotRecord {
    pub fn rows(&self, setting: &Setting) -> Vec<ShotRow> {
        self.counts
            .iter()
            .enumerate()
            .map(|(k, &count)| ShotRow {
                setting: self.setting,
                outcome: setting
                    .outcome(k)
                    .iter()
                    .map(|o| o.to_string())
                    .collect::<Vec<_>>()
                    .join("-"),
                count,
            })
            .collect()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.counts.iter().map(|&n| n as f64 / self.shots as f64).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub shots_per_setting: u64,
    pub settings_used: usize,
}

/// `<v_k| rho |v_k>` for every joint outcome, clipped and renormalized.
pub fn outcome_probabilities(rho: &DensityMatrix, setting: &Setting) -> Result<Vec<f64>> {
    if setting.dims() != rho.dims() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: setting.outcome_count(),
        });
    }
    let u = setting.joint_basis();
    let rotated = u.adjoint() * rho.matrix() * &u;
    let mut probs = Vec::with_capacity(rotated.nrows());
    for k in 0..rotated.nrows() {
        let p = rotated[(k, k)].re;
        if p < -PROB_TOL {
            return Err(Error::NegativeProbability(p));
        }
        probs.push(p.clamp(0.0, 1.0));
    }
    let total: f64 = probs.iter().sum();
    Ok(probs.into_iter().map(|p| p / total).collect())
}

/// Multinomial draw by sequential conditional binomials.
fn multinomial<R: Rng + ?Sized>(shots: u64, probs: &[f64], rng: &mut R) -> Vec<u64> {
    let mut left = shots;
    let mut mass = 1.0;
    let mut counts = vec![0; probs.len()];
    for (k, &p) in probs.iter().enumerate() {
        if left == 0 {
            break;
        }
        if k + 1 == probs.len() {
            counts[k] = left;
            break;
        }
        let cond = if mass > 0.0 { (p / mass).clamp(0.0, 1.0) } else { 0.0 };
        let n = Binomial::new(left, cond).expect("probability in [0, 1]").sample(rng);
        counts[k] = n;
        left -= n;
        mass -= p;
    }
    counts
}

pub fn simulate_setting<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    setting: &Setting,
    index: usize,
    shots: u64,
    rng: &mut R,
) -> Result<ShotRecord> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let probs = outcome_probabilities(rho, setting)?;
    Ok(ShotRecord {
        setting: index,
        counts: multinomial(shots, &probs, rng),
        shots,
    })
}

/// Simulates every setting with a nonzero weight; setting `i` draws from
/// stream `i` of `seed`.
pub fn simulate_decomposition(
    rho: &DensityMatrix,
    decomp: &LocalDecomposition,
    shots_per_setting: u64,
    seed: u64,
) -> Result<Vec<ShotRecord>> {
    if shots_per_setting == 0 {
        return Err(Error::ZeroShots);
    }
    if decomp.target_dims != rho.dims() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: decomp.target_dims.iter().product(),
        });
    }
    decomp
        .settings
        .par_iter()
        .enumerate()
        .filter(|(_, s)| !s.is_negligible())
        .map(|(i, s)| {
            let mut rng = rng_stream(seed, i as u64);
            simulate_setting(rho, s, i, shots_per_setting, &mut rng)
        })
        .collect()
}

/// Weighted sum of frequencies with plug-in multinomial variance, settings
/// treated as independent runs.
pub fn estimate_from_records(decomp: &LocalDecomposition, records: &[ShotRecord]) -> Result<Estimate> {
    let mut value = 0.0;
    let mut var = 0.0;
    let mut shots = 0;
    for r in records {
        let s = decomp
            .settings
            .get(r.setting)
            .ok_or_else(|| Error::InvalidSetting(format!("record for missing setting {}", r.setting)))?;
        if r.counts.len() != s.coeffs.len() {
            return Err(Error::InvalidSetting("record and setting sizes differ".into()));
        }
        if r.shots == 0 {
            return Err(Error::ZeroShots);
        }
        let f = r.frequencies();
        let mean: f64 = f.iter().zip(&s.coeffs).map(|(p, c)| p * c).sum();
        let second: f64 = f.iter().zip(&s.coeffs).map(|(p, c)| p * c * c).sum();
        value += mean;
        var += (second - mean * mean).max(0.0) / r.shots as f64;
        shots = r.shots;
    }
    Ok(Estimate {
        value,
        stderr: var.sqrt(),
        shots_per_setting: shots,
        settings_used: records.len(),
    })
}

pub fn estimate_witness(
    rho: &DensityMatrix,
    decomp: &LocalDecomposition,
    shots_per_setting: u64,
    seed: u64,
) -> Result<Estimate> {
    let records = simulate_decomposition(rho, decomp, shots_per_setting, seed)?;
    estimate_from_records(decomp, &records)
}
