//! Alternating minimization of a Rayleigh quotient over product vectors.
//!
//! For fixed `|f>` the quotient `<ef|A|ef> / <ef|B|ef>` is minimized over
//! `|e>` by the smallest generalized eigenvector of the partial contractions,
//! and vice versa. Each half-step is globally optimal so the value never
//! increases; restarts from random product vectors handle the nonconvexity.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{c, canonical_phase, hermitian_eigen, CMatrix, CVector, Operator};
use crate::random::{random_pure_state, rng_stream};

pub const DEFAULT_RESTARTS: usize = 500;
pub const MAX_SWEEPS: usize = 10_000;
pub const SWEEP_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct SeesawOptions {
    pub restarts: usize,
    pub seed: u64,
    pub max_sweeps: usize,
    pub tolerance: f64,
}

impl Default for SeesawOptions {
    fn default() -> Self {
        SeesawOptions {
            restarts: DEFAULT_RESTARTS,
            seed: 0,
            max_sweeps: MAX_SWEEPS,
            tolerance: SWEEP_TOL,
        }
    }
}

/// Local minimum reached from one random start.
#[derive(Clone, Debug)]
pub struct LocalMinimum {
    pub value: f64,
    pub e: CVector,
    pub f: CVector,
    pub sweeps: usize,
    pub converged: bool,
}

impl LocalMinimum {
    pub fn product_vector(&self) -> CVector {
        self.e.kronecker(&self.f)
    }
}

/// Best local minimum over all restarts.
#[derive(Clone, Debug)]
pub struct SeesawResult {
    pub best: LocalMinimum,
    pub restarts: usize,
    pub converged_restarts: usize,
}

/// `A_f[a,a'] = sum_{b,b'} conj(f_b) A[(a,b),(a',b')] f_b'`.
pub fn contract_right(a: &CMatrix, dims: [usize; 2], f: &CVector) -> CMatrix {
    let [da, db] = dims;
    CMatrix::from_fn(da, da, |i, k| {
        let mut acc = c(0.0, 0.0);
        for b in 0..db {
            let fb = f[b].conj();
            if fb.norm_sqr() == 0.0 {
                continue;
            }
            let mut row = c(0.0, 0.0);
            for b2 in 0..db {
                row += a[(i * db + b, k * db + b2)] * f[b2];
            }
            acc += fb * row;
        }
        acc
    })
}

/// `A_e[b,b'] = sum_{a,a'} conj(e_a) A[(a,b),(a',b')] e_a'`.
pub fn contract_left(a: &CMatrix, dims: [usize; 2], e: &CVector) -> CMatrix {
    let [da, db] = dims;
    CMatrix::from_fn(db, db, |j, l| {
        let mut acc = c(0.0, 0.0);
        for x in 0..da {
            let ex = e[x].conj();
            if ex.norm_sqr() == 0.0 {
                continue;
            }
            let mut row = c(0.0, 0.0);
            for x2 in 0..da {
                row += a[(x * db + j, x2 * db + l)] * e[x2];
            }
            acc += ex * row;
        }
        acc
    })
}

/// Smallest eigenpair of `A x = lambda B x`, `B` positive definite.
fn smallest_generalized(a: &CMatrix, b: Option<&CMatrix>) -> Option<(f64, CVector)> {
    match b {
        None => {
            let (vals, vecs) = hermitian_eigen(a);
            Some((vals[0], vecs.column(0).into_owned()))
        }
        Some(b) => {
            let bh = (b + b.adjoint()).map(|z| z * 0.5);
            let chol = nalgebra::Cholesky::new(bh)?;
            let l = chol.l();
            let linv = l.clone().try_inverse()?;
            let reduced = &linv * a * linv.adjoint();
            let (vals, vecs) = hermitian_eigen(&reduced);
            let y = vecs.column(0).into_owned();
            let x = linv.adjoint() * y;
            let norm = x.norm();
            Some((vals[0], x / c(norm, 0.0)))
        }
    }
}

/// Rayleigh-quotient minimization problem over product vectors `|e>|f>`.
pub struct ProductQuotient<'a> {
    pub numerator: &'a Operator,
    pub denominator: Option<&'a Operator>,
}

impl ProductQuotient<'_> {
    fn dims(&self) -> Result<[usize; 2]> {
        let d = self.numerator.dims();
        if d.len() != 2 {
            return Err(Error::NotBipartite(d.len()));
        }
        if let Some(den) = self.denominator {
            self.numerator.check_same_shape(den)?;
        }
        Ok([d[0], d[1]])
    }

    pub fn value(&self, psi: &CVector) -> f64 {
        let num = self.numerator.quadratic_form(psi);
        match self.denominator {
            Some(den) => num / den.quadratic_form(psi),
            None => num / psi.norm_squared(),
        }
    }

    /// Runs the alternating iteration from `(e, f)`.
    pub fn descend(&self, mut e: CVector, mut f: CVector, opts: &SeesawOptions) -> Result<LocalMinimum> {
        let dims = self.dims()?;
        let a = self.numerator.matrix();
        let b = self.denominator.map(|d| d.matrix());
        let mut value = self.value(&e.kronecker(&f));
        for sweep in 1..=opts.max_sweeps {
            let af = contract_right(a, dims, &f);
            let bf = b.map(|b| contract_right(b, dims, &f));
            let Some((_, e_new)) = smallest_generalized(&af, bf.as_ref()) else {
                return Err(Error::DegenerateParameters(
                    "denominator is not positive definite on a product slice".into(),
                ));
            };
            e = e_new;
            let ae = contract_left(a, dims, &e);
            let be = b.map(|b| contract_left(b, dims, &e));
            let Some((new_value, f_new)) = smallest_generalized(&ae, be.as_ref()) else {
                return Err(Error::DegenerateParameters(
                    "denominator is not positive definite on a product slice".into(),
                ));
            };
            f = f_new;
            let delta = (value - new_value).abs();
            value = new_value;
            if delta < opts.tolerance {
                return Ok(self.finish(e, f, sweep, true));
            }
        }
        Ok(self.finish(e, f, opts.max_sweeps, false))
    }

    fn finish(&self, e: CVector, f: CVector, sweeps: usize, converged: bool) -> LocalMinimum {
        let e = canonical_phase(&(&e / c(e.norm(), 0.0)));
        let f = canonical_phase(&(&f / c(f.norm(), 0.0)));
        let value = self.value(&e.kronecker(&f));
        LocalMinimum {
            value,
            e,
            f,
            sweeps,
            converged,
        }
    }

    /// One local minimum per restart, in restart order.
    pub fn local_minima(&self, opts: &SeesawOptions) -> Result<Vec<LocalMinimum>> {
        let [da, db] = self.dims()?;
        (0..opts.restarts)
            .into_par_iter()
            .map(|k| {
                let mut rng = rng_stream(opts.seed, k as u64);
                let e = random_pure_state(da, &mut rng);
                let f = random_pure_state(db, &mut rng);
                self.descend(e, f, opts)
            })
            .collect()
    }

    /// Global estimate: minimum over restarts (first index wins ties).
    pub fn minimize(&self, opts: &SeesawOptions) -> Result<SeesawResult> {
        let minima = self.local_minima(opts)?;
        let converged_restarts = minima.iter().filter(|m| m.converged).count();
        if converged_restarts == 0 {
            return Err(Error::NonConvergence(opts.max_sweeps));
        }
        let best = minima
            .into_iter()
            .reduce(|acc, m| if m.value < acc.value { m } else { acc })
            .expect("at least one restart converged");
        Ok(SeesawResult {
            best,
            restarts: opts.restarts,
            converged_restarts,
        })
    }
}
