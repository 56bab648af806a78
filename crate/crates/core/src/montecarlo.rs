//! Random-state error analysis for the noisy Bell family
//! `rho(p, d) = p |psi+><psi+| + (1 - p) sigma`, `||sigma - 1/4|| <= d`.
//!
//! One fixed sample of unit-ball shifts is drawn per run and rescaled into
//! every ball `B(p, d)`. Both `Tr(W0 rho)` and `rho^{T_B}` are affine in the
//! shift, so each state costs one 4x4 determinant.

use nalgebra::Matrix4;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::linalg::{partial_transpose, CMatrix, Operator, C64};
use crate::random::rng_stream;
use crate::states::{bell_vector, max_noise_radius, sample_unit_ball_delta, two_qubit_psd4, BellKind};
use crate::witness::{tau_threshold, theta_threshold, w0};

pub const DEFAULT_SAMPLES: usize = 50_000;
pub const DEFAULT_P_POINTS: usize = 101;
pub const DEFAULT_ALPHA_BINS: usize = 50;
const CHUNK: usize = 1024;

/// Offset `q` of the plane `Tr(W0 rho) = alpha` along the line
/// `q |psi+><psi+| + (1 - q)/4`.
pub fn plane_parameter(alpha: f64) -> f64 {
    1.0 / 3.0 - 4.0 * alpha / 3.0
}

fn ball_volume(r2: f64) -> f64 {
    let pi7 = std::f64::consts::PI.powi(7);
    pi7 / 5040.0 * r2.max(0.0).powi(7)
}

/// Squared radii of the cross-sections of `B(p, d)` and of the inscribed
/// separable ball with the plane `P(q)`.
pub fn section_radii_squared(q: f64, p: f64, d: f64) -> (f64, f64) {
    let bp = (1.0 - p).powi(2) * d * d - 0.75 * (q - p).powi(2);
    let xp = 1.0 / 12.0 - 0.75 * q * q;
    (bp, xp)
}

/// 14-dimensional volumes of the two cross-sections; a negative radicand
/// gives volume 0.
pub fn ball_volumes(q: f64, p: f64, d: f64) -> (f64, f64) {
    let (bp, xp) = section_radii_squared(q, p, d);
    (ball_volume(bp), ball_volume(xp))
}

/// `1 - vol(XP)/vol(BP)` at expectation value `alpha`, clipped to
/// `[0, 1]`; `None` when the plane misses `B(p, d)`.
pub fn plane_error_bound(alpha: f64, p: f64, d: f64) -> Option<f64> {
    let q = plane_parameter(alpha);
    let (bp, xp) = section_radii_squared(q, p, d);
    if bp <= 0.0 {
        return None;
    }
    Some((1.0 - (xp.max(0.0) / bp).powi(7)).clamp(0.0, 1.0))
}

/// Supremum over `p` of [`plane_error_bound`] in closed form.
pub fn analytical_bound(alpha: f64, d: f64) -> Result<f64> {
    if !(d > 0.0 && d <= max_noise_radius()) {
        return Err(Error::OutOfRange {
            name: "d",
            value: d,
            lo: 0.0,
            hi: max_noise_radius(),
        });
    }
    check_range("alpha", alpha, 0.0, tau_threshold(d)?)?;
    let num = (alpha * (alpha - 0.5) * (d * d - 0.75)).powi(7);
    let den = (d * (alpha + 0.5)).powi(14);
    Ok((1.0 - num / den).clamp(0.0, 1.0))
}

/// Unit-ball shifts reduced to what the error analysis needs.
#[derive(Clone, Debug)]
pub struct BallSample {
    /// `Tr(W0 Delta_i)`.
    pub w0_values: Vec<f64>,
    /// `Delta_i^{T_B}`.
    pub shifts_pt: Vec<Matrix4<C64>>,
}

impl BallSample {
    /// `n` shifts uniform in the unit ball of traceless Hermitian 4x4
    /// matrices; chunk `k` of 1024 draws from stream `k` of `seed`.
    pub fn draw(n: usize, seed: u64) -> BallSample {
        let w = w0();
        let chunks: Vec<Vec<(f64, Matrix4<C64>)>> = (0..n.div_ceil(CHUNK))
            .into_par_iter()
            .map(|k| {
                let mut rng = rng_stream(seed, k as u64);
                let len = CHUNK.min(n - k * CHUNK);
                (0..len)
                    .map(|_| {
                        let delta = Operator::new(vec![2, 2], sample_unit_ball_delta(&mut rng)).expect("4x4");
                        let pt = partial_transpose(&delta, 1).expect("bipartite");
                        (w.expectation(&delta), to_matrix4(pt.matrix()))
                    })
                    .collect()
            })
            .collect();
        let (w0_values, shifts_pt) = chunks.into_iter().flatten().unzip();
        BallSample { w0_values, shifts_pt }
    }

    pub fn len(&self) -> usize {
        self.w0_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w0_values.is_empty()
    }
}

fn to_matrix4(m: &CMatrix) -> Matrix4<C64> {
    Matrix4::from_fn(|i, j| m[(i, j)])
}

/// `Tr(W0 rho)` and `rho^{T_B}` of the state in `B(p, d)` at shift `i`.
struct Family {
    pure_pt: Matrix4<C64>,
}

impl Family {
    fn new() -> Family {
        let psi = bell_vector(BellKind::PsiPlus);
        let proj = Operator::projector(vec![2, 2], &psi).expect("4-dim");
        Family {
            pure_pt: to_matrix4(partial_transpose(&proj, 1).expect("bipartite").matrix()),
        }
    }

    fn alpha(p: f64, d: f64, w: f64) -> f64 {
        -0.5 * p + (1.0 - p) * (0.25 + d * w)
    }

    fn is_npt(&self, p: f64, d: f64, shift_pt: &Matrix4<C64>) -> bool {
        let m = self.pure_pt * C64::new(p, 0.0)
            + Matrix4::identity() * C64::new((1.0 - p) / 4.0, 0.0)
            + shift_pt * C64::new((1.0 - p) * d, 0.0);
        !two_qubit_psd4(&m)
    }
}

/// `count` uniform points on `[0, 1]`.
pub fn uniform_grid(count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![0.0],
        n => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct Tally {
    n: u64,
    npt: u64,
}

/// Per bin, over all `p`: counts of samples whose value falls in the bin
/// and of those that are NPT.
fn tally(sample: &BallSample, d: f64, p_grid: &[f64], edges: &[f64]) -> Vec<Vec<Tally>> {
    let fam = Family::new();
    let bins = edges.len() - 1;
    p_grid
        .par_iter()
        .map(|&p| {
            let mut out = vec![Tally::default(); bins];
            for (w, pt) in sample.w0_values.iter().zip(&sample.shifts_pt) {
                let a = Family::alpha(p, d, *w);
                if a < edges[0] || a >= edges[bins] {
                    continue;
                }
                let width = edges[1] - edges[0];
                let b = (((a - edges[0]) / width) as usize).min(bins - 1);
                out[b].n += 1;
                if fam.is_npt(p, d, pt) {
                    out[b].npt += 1;
                }
            }
            out
        })
        .collect()
}

/// One expectation-value bin of an error curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveBin {
    pub alpha_lo: f64,
    pub alpha_hi: f64,
    /// Largest NPT fraction over `p`; `None` when no sample fell in the bin.
    pub e_minus: Option<f64>,
    /// Analytical bound at the lower edge, where it is largest.
    pub bound: f64,
    /// Samples in the bin at the maximizing `p`.
    pub n_in_bin: u64,
    pub argmax_p: Option<f64>,
}

impl CurveBin {
    /// Binomial standard deviation of a fraction equal to the bound,
    /// estimated from `n_in_bin` samples.
    pub fn sigma(&self) -> f64 {
        if self.n_in_bin == 0 {
            return f64::INFINITY;
        }
        (self.bound * (1.0 - self.bound) / self.n_in_bin as f64).sqrt()
    }

    /// `e_minus <= bound + k sigma`; missing bins pass vacuously.
    pub fn within_bound(&self, k: f64) -> bool {
        self.e_minus.is_none_or(|e| e <= self.bound + k * self.sigma())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorCurve {
    pub d: f64,
    pub seed: u64,
    pub n_samples: usize,
    pub p_grid: Vec<f64>,
    pub bins: Vec<CurveBin>,
}

/// One CSV row of an error curve.
#[derive(Clone, Debug, Serialize)]
pub struct CurveRow {
    pub d: f64,
    pub alpha: f64,
    pub e_minus: Option<f64>,
    #[serde(rename = "E_minus")]
    pub bound: f64,
    pub n_in_bin: u64,
}

impl ErrorCurve {
    pub fn rows(&self) -> Vec<CurveRow> {
        self.bins
            .iter()
            .map(|b| CurveRow {
                d: self.d,
                alpha: b.alpha_lo,
                e_minus: b.e_minus,
                bound: b.bound,
                n_in_bin: b.n_in_bin,
            })
            .collect()
    }

    pub fn missing_bins(&self) -> usize {
        self.bins.iter().filter(|b| b.e_minus.is_none()).count()
    }
}

fn check_d(d: f64) -> Result<()> {
    if !(d > 0.0 && d <= max_noise_radius()) {
        return Err(Error::OutOfRange {
            name: "d",
            value: d,
            lo: 0.0,
            hi: max_noise_radius(),
        });
    }
    Ok(())
}

/// Empirical `e_-(alpha) = sup_p P(NPT | Tr(W0 rho) in bin)` on
/// `alpha_bins` uniform bins of `[0, tau(d)]`, next to the analytical
/// bound.
pub fn error_curve(d: f64, n_samples: usize, p_points: usize, alpha_bins: usize, seed: u64) -> Result<ErrorCurve> {
    check_d(d)?;
    if alpha_bins == 0 || p_points == 0 {
        return Err(Error::InvalidSetting("empty grid".into()));
    }
    let sample = BallSample::draw(n_samples, seed);
    error_curve_from_sample(&sample, d, &uniform_grid(p_points), alpha_bins, seed)
}

/// [`error_curve`] on a precomputed sample.
pub fn error_curve_from_sample(
    sample: &BallSample,
    d: f64,
    p_grid: &[f64],
    alpha_bins: usize,
    seed: u64,
) -> Result<ErrorCurve> {
    check_d(d)?;
    let tau = tau_threshold(d)?;
    let edges: Vec<f64> = (0..=alpha_bins).map(|k| tau * k as f64 / alpha_bins as f64).collect();
    let counts = tally(sample, d, p_grid, &edges);
    let mut bins = Vec::with_capacity(alpha_bins);
    for b in 0..alpha_bins {
        let mut best: Option<(f64, u64, f64)> = None;
        for (pi, &p) in p_grid.iter().enumerate() {
            let t = counts[pi][b];
            if t.n == 0 {
                continue;
            }
            let e = t.npt as f64 / t.n as f64;
            if best.is_none_or(|(be, _, _)| e > be) {
                best = Some((e, t.n, p));
            }
        }
        bins.push(CurveBin {
            alpha_lo: edges[b],
            alpha_hi: edges[b + 1],
            e_minus: best.map(|x| x.0),
            bound: analytical_bound(edges[b], d)?,
            n_in_bin: best.map_or(0, |x| x.1),
            argmax_p: best.map(|x| x.2),
        });
    }
    Ok(ErrorCurve {
        d,
        seed,
        n_samples: sample.len(),
        p_grid: p_grid.to_vec(),
        bins,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FalseSeparableRate {
    pub d: f64,
    /// `sup_p P(NPT | Tr(W0 rho) >= 0)`.
    pub rate: f64,
    pub sigma: f64,
    pub argmax_p: f64,
    pub n_nonnegative: u64,
}

/// Binomial standard error with the Agresti-Coull adjustment, so that a
/// ratio from a handful of samples (often 0/n or n/n here) does not report
/// zero uncertainty.
pub fn adjusted_sigma(hits: u64, n: u64) -> f64 {
    let n = n as f64 + 4.0;
    let p = (hits as f64 + 2.0) / n;
    (p * (1.0 - p) / n).sqrt()
}

/// Largest probability over `p` that a state with nonnegative `W0` value is
/// NPT.
pub fn false_separable_rate(d: f64, n_samples: usize, p_points: usize, seed: u64) -> Result<FalseSeparableRate> {
    check_range("d", d, 0.0, max_noise_radius())?;
    let sample = BallSample::draw(n_samples, seed);
    false_separable_rate_from_sample(&sample, d, &uniform_grid(p_points))
}

pub fn false_separable_rate_from_sample(sample: &BallSample, d: f64, p_grid: &[f64]) -> Result<FalseSeparableRate> {
    check_range("d", d, 0.0, max_noise_radius())?;
    let counts = tally(sample, d, p_grid, &[0.0, f64::INFINITY]);
    let mut out = FalseSeparableRate {
        d,
        rate: 0.0,
        sigma: 0.0,
        argmax_p: 0.0,
        n_nonnegative: 0,
    };
    for (pi, &p) in p_grid.iter().enumerate() {
        let t = counts[pi][0];
        if t.n == 0 {
            continue;
        }
        let r = t.npt as f64 / t.n as f64;
        if r > out.rate || out.n_nonnegative == 0 {
            out = FalseSeparableRate {
                d,
                rate: r,
                sigma: adjusted_sigma(t.npt, t.n),
                argmax_p: p,
                n_nonnegative: t.n,
            };
        }
    }
    Ok(out)
}

/// Violations of the certification rules found by [`soundness_scan`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SoundnessReport {
    pub states_checked: u64,
    /// NPT states with `Tr(W0 rho) >= tau(d)`.
    pub tau_violations: u64,
    /// NPT states with `Tr(W0 rho) >= theta(p, d)`.
    pub theta_violations: u64,
    /// PPT states with `Tr(W0 rho) < 0`.
    pub witness_violations: u64,
    /// States at or above `tau(d)`, i.e. certified separable.
    pub certified_tau: u64,
    pub certified_theta: u64,
}

impl SoundnessReport {
    pub fn is_clean(&self) -> bool {
        self.tau_violations == 0 && self.theta_violations == 0 && self.witness_violations == 0
    }

    fn merge(mut self, o: SoundnessReport) -> SoundnessReport {
        self.states_checked += o.states_checked;
        self.tau_violations += o.tau_violations;
        self.theta_violations += o.theta_violations;
        self.witness_violations += o.witness_violations;
        self.certified_tau += o.certified_tau;
        self.certified_theta += o.certified_theta;
        self
    }
}

/// Checks every `(p, d, sample)` combination against the three
/// certification rules. `d` values must lie in `(0, 1/sqrt(12)]`.
pub fn soundness_scan(sample: &BallSample, d_grid: &[f64], p_grid: &[f64]) -> Result<SoundnessReport> {
    let fam = Family::new();
    let mut cells = Vec::with_capacity(d_grid.len() * p_grid.len());
    for &d in d_grid {
        check_d(d)?;
        let tau = tau_threshold(d)?;
        for &p in p_grid {
            let theta = if p > 0.0 { Some(theta_threshold(p, d)?) } else { None };
            cells.push((d, p, tau, theta));
        }
    }
    let report = cells
        .par_iter()
        .map(|&(d, p, tau, theta)| {
            let mut r = SoundnessReport::default();
            for (w, pt) in sample.w0_values.iter().zip(&sample.shifts_pt) {
                let a = Family::alpha(p, d, *w);
                let npt = fam.is_npt(p, d, pt);
                r.states_checked += 1;
                if a >= tau {
                    r.certified_tau += 1;
                    r.tau_violations += npt as u64;
                }
                if let Some(th) = theta {
                    if a >= th {
                        r.certified_theta += 1;
                        r.theta_violations += npt as u64;
                    }
                }
                if a < 0.0 && !npt {
                    r.witness_violations += 1;
                }
            }
            r
        })
        .reduce(SoundnessReport::default, SoundnessReport::merge);
    Ok(report)
}
