use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::kernel::{KernelSearch, ProductVector};
use super::{DensityMatrix, Family};
use crate::error::{Error, Result};
use crate::linalg::{c, real_vector, CVector, Operator, C64};

/// Real parameters of the 3x3 chessboard family on the branch where the
/// state equals its own partial transpose (`s = ac/n`, `t = ad/m`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChessboardParams {
    pub m: f64,
    pub n: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl ChessboardParams {
    pub fn new(m: f64, n: f64, a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let p = ChessboardParams { m, n, a, b, c, d };
        p.validate()?;
        Ok(p)
    }

    pub fn from_slice(v: &[f64]) -> Result<Self> {
        match v {
            [m, n, a, b, c, d] => ChessboardParams::new(*m, *n, *a, *b, *c, *d),
            _ => Err(Error::DimensionMismatch {
                expected: 6,
                found: v.len(),
            }),
        }
    }

    fn validate(&self) -> Result<()> {
        let all = [self.m, self.n, self.a, self.b, self.c, self.d];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::DegenerateParameters("non-finite chessboard parameter".into()));
        }
        for (name, v) in [("m", self.m), ("n", self.n), ("c", self.c), ("a^2+b^2", self.a * self.a + self.b * self.b)] {
            if v.abs() < 1e-12 {
                return Err(Error::DegenerateParameters(format!("{name} must be nonzero")));
            }
        }
        Ok(())
    }

    pub fn s(&self) -> f64 {
        self.a * self.c / self.n
    }

    pub fn t(&self) -> f64 {
        self.a * self.d / self.m
    }

    /// The four unnormalized vectors whose projectors sum to the state.
    pub fn generating_vectors(&self) -> [CVector; 4] {
        let ChessboardParams { m, n, a, b, c, d } = *self;
        let (s, t) = (self.s(), self.t());
        [
            real_vector(&[m, 0.0, s, 0.0, n, 0.0, 0.0, 0.0, 0.0]),
            real_vector(&[0.0, a, 0.0, b, 0.0, c, 0.0, 0.0, 0.0]),
            real_vector(&[n, 0.0, 0.0, 0.0, -m, 0.0, t, 0.0, 0.0]),
            real_vector(&[0.0, b, 0.0, -a, 0.0, 0.0, 0.0, d, 0.0]),
        ]
    }
}

/// `N sum_i |V_i><V_i|` normalized to unit trace.
pub fn chessboard_state(params: ChessboardParams) -> Result<DensityMatrix> {
    params.validate()?;
    let mut op = Operator::zeros(vec![3, 3]);
    for v in params.generating_vectors() {
        op = op.add_scaled(&Operator::projector(vec![3, 3], &v)?, 1.0)?;
    }
    Ok(DensityMatrix::from_unnormalized(op)?.with_family(Family::Chessboard(params)))
}

fn cvec(entries: [C64; 3]) -> CVector {
    CVector::from_vec(entries.to_vec())
}

fn finite(z: C64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// The six closed-form product vectors in the kernel: `|22>`, the shifted
/// `|k4'>`, and the four branches of the quadratic in `gamma_1`.
pub fn chessboard_kernel_vectors(params: &ChessboardParams) -> KernelSearch {
    let ChessboardParams { m, n, a, b, c: cc, d } = *params;
    let mut out = KernelSearch::default();
    let mut push = |label: &str, e: CVector, f: CVector| {
        if e.iter().chain(f.iter()).all(|z| finite(*z)) && e.norm() > 1e-300 && f.norm() > 1e-300 {
            out.vectors.push(ProductVector::new(vec![e, f]));
        } else {
            out.failures.push(format!("{label}: division by zero for these parameters"));
        }
    };

    push(
        "k1",
        real_vector(&[0.0, 0.0, 1.0]),
        real_vector(&[0.0, 0.0, 1.0]),
    );
    push(
        "k4'",
        real_vector(&[-a * d / (m * n), 0.0, 1.0]),
        real_vector(&[1.0, 0.0, -m * n / (a * cc)]),
    );

    let alpha1 = (m * m + n * n) * b * m * n - (a * a + b * b) * a * m * m;
    let alpha3 = a * d * d * n * n;
    let alpha13 = (m * m + n * n) * (m * n + a * b) * d - 2.0 * a * b * d * m * m;
    let disc = Complex::new(alpha13 * alpha13 - 4.0 * alpha1 * alpha3, 0.0).sqrt();
    for (branch, sign) in [("+", 1.0), ("-", -1.0)] {
        let gamma1 = (c(-alpha13, 0.0) + disc * sign) / (2.0 * alpha3);
        let radicand = (c(b * m * n, 0.0) + gamma1 * (d * (m * n + a * b)) + gamma1 * gamma1 * (a * d * d)) / (a * m * m);
        let gamma2 = radicand.sqrt();
        for (pm_label, pm) in [("+", 1.0), ("-", -1.0)] {
            let g2 = gamma2 * pm;
            let e = cvec([c(1.0, 0.0), g2, gamma1]);
            let f = cvec([
                g2 * (m * m) / (c(m * n, 0.0) + gamma1 * (a * d)),
                c(1.0, 0.0),
                -(c(a * a + b * b, 0.0) + gamma1 * (b * d)) / (g2 * (a * cc)),
            ]);
            push(&format!("gamma1{branch} gamma2{pm_label}"), e, f);
        }
    }
    out
}
