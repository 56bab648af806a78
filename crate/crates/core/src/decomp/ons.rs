use super::{LocalDecomposition, Setting};
use crate::error::{Error, Result};
use crate::linalg::expand;
use crate::linalg::{c, complete_basis, schmidt, CMatrix, CVector, Operator, C64, RANK_TOL};

/// Circle-method schedule on `0..l`. Even `l` gives `l - 1` perfect
/// matchings; odd `l` gives `l` rounds of `(l - 1) / 2` pairs, each index
/// sitting out exactly one round.
pub fn round_robin_pairing(l: usize) -> Result<Vec<Vec<(usize, usize)>>> {
    if l < 2 {
        return Err(Error::OutOfRange {
            name: "l",
            value: l as f64,
            lo: 2.0,
            hi: f64::INFINITY,
        });
    }
    // odd l: add a dummy player whose partner sits out
    let n = l + l % 2;
    let mut rounds = Vec::with_capacity(n - 1);
    for r in 0..n - 1 {
        let mut pairs = Vec::with_capacity(n / 2);
        for k in 0..n / 2 {
            let a = if k == 0 { n - 1 } else { (r + k) % (n - 1) };
            let b = (r + n - 1 - k) % (n - 1);
            if a < l && b < l {
                pairs.push((a.min(b), a.max(b)));
            }
        }
        pairs.sort_unstable();
        rounds.push(pairs);
    }
    Ok(rounds)
}

fn pair_vector(n: usize, i: usize, j: usize, phase: C64) -> CVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = CVector::zeros(n);
    v[i] = c(s, 0.0);
    v[j] = phase * s;
    v
}

/// Local basis in Schmidt coordinates for one round: the `+` and `-`
/// vectors of each pair, then the index sitting out, then a completion.
fn round_basis(n: usize, pairs: &[(usize, usize)], bye: Option<usize>, phase: C64) -> CMatrix {
    let mut cols = Vec::new();
    for &(i, j) in pairs {
        cols.push(pair_vector(n, i, j, phase));
        cols.push(pair_vector(n, i, j, -phase));
    }
    if let Some(i) = bye {
        let mut e = CVector::zeros(n);
        e[i] = c(1.0, 0.0);
        cols.push(e);
    }
    complete_basis(&cols, n)
}

/// Settings realizing `|psi><psi|` for a bipartite pure state of Schmidt
/// rank `l`: one diagonal setting plus an X- and a Y-direction setting per
/// round of [`round_robin_pairing`]. Uses `2l - 1` settings for even `l`,
/// `2l` for odd `l > 1` and one for product states.
pub fn schmidt_ons(psi: &CVector, dims: &[usize]) -> Result<LocalDecomposition> {
    let sf = schmidt(psi, dims)?;
    let [da, db] = sf.dims;
    let l = sf.rank;
    let s = &sf.coefficients;
    let (ua, ub) = sf.local_unitaries();
    let frame = |basis_a: &CMatrix, basis_b: &CMatrix| -> Vec<CMatrix> { vec![&ua * basis_a, &ub * basis_b] };
    let mut settings = Vec::new();

    let rounds = if l >= 2 { round_robin_pairing(l)? } else { Vec::new() };
    if l % 2 == 0 || l == 1 {
        let mut st = Setting::zeros(frame(&CMatrix::identity(da, da), &CMatrix::identity(db, db)))?;
        for i in 0..l {
            st.coeffs[i * db + i] = s[i] * s[i];
        }
        settings.push(st);
    }
    for pairs in &rounds {
        let bye = if l % 2 == 1 {
            (0..l).find(|i| pairs.iter().all(|&(a, b)| a != *i && b != *i))
        } else {
            None
        };
        for (phase, sign) in [(c(1.0, 0.0), 1.0), (c(0.0, 1.0), -1.0)] {
            let basis_a = round_basis(da, pairs, if sign > 0.0 { bye } else { None }, phase);
            let basis_b = round_basis(db, pairs, if sign > 0.0 { bye } else { None }, phase);
            let mut st = Setting::zeros(frame(&basis_a, &basis_b))?;
            for (k, &(i, j)) in pairs.iter().enumerate() {
                let w = sign * s[i] * s[j];
                st.coeffs[(2 * k) * db + 2 * k] = w;
                st.coeffs[(2 * k + 1) * db + 2 * k + 1] = w;
            }
            if sign > 0.0 {
                if let Some(i) = bye {
                    let k = 2 * pairs.len();
                    st.coeffs[k * db + k] = s[i] * s[i];
                }
            }
            settings.push(st);
        }
    }
    LocalDecomposition::new(vec![da, db], settings)
}

/// z, x and y settings realizing `|psi><psi|^{T_B}` for a two-qubit pure
/// state, always three settings even when some weights vanish.
pub fn two_qubit_three_settings(psi: &CVector) -> Result<LocalDecomposition> {
    if psi.len() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: psi.len(),
        });
    }
    let sf = schmidt(psi, &[2, 2])?;
    let (ua, ub) = sf.local_unitaries();
    let (a, b) = (sf.coefficients[0], sf.coefficients[1]);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let x = CMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]);
    let y = CMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(0.0, h), c(0.0, -h)]);
    let id = CMatrix::identity(2, 2);
    // Bob's frame is conjugated, which transposes his factor.
    let ub_t = ub.map(|z| z.conj());
    let mk = |ba: &CMatrix, bb: &CMatrix, coeffs: [f64; 4]| {
        Setting::new(vec![&ua * ba, &ub_t * bb.map(|z| z.conj())], coeffs.to_vec())
    };
    let settings = vec![
        mk(&id, &id, [a * a, 0.0, 0.0, b * b])?,
        mk(&x, &x, [a * b, 0.0, 0.0, a * b])?,
        mk(&y, &y, [-a * b, 0.0, 0.0, -a * b])?,
    ];
    LocalDecomposition::new(vec![2, 2], settings)
}

fn min_dim(op: &Operator) -> Result<usize> {
    if op.parties() != 2 {
        return Err(Error::NotBipartite(op.parties()));
    }
    let n = op.dims()[0].min(op.dims()[1]);
    if n < 2 {
        return Err(Error::DegenerateParameters("a party has dimension 1".into()));
    }
    Ok(n)
}

/// `ceil(r / (N - 1))` where `r` is the rank of the traceless block of the
/// coefficient matrix and `N` the smaller local dimension: each setting
/// contributes at most `N - 1` to that rank. At least 1.
pub fn settings_lower_bound(op: &Operator) -> Result<usize> {
    let n = min_dim(op)?;
    let r = expand(op)?.reduced_rank(RANK_TOL);
    Ok(r.div_ceil(n - 1).max(1))
}

/// [`settings_lower_bound`] for `|psi><psi|`, raised to `N + 1` when the
/// Schmidt rank is full.
pub fn settings_lower_bound_pure(psi: &CVector, dims: &[usize]) -> Result<usize> {
    let sf = schmidt(psi, dims)?;
    let op = Operator::projector(dims.to_vec(), psi)?;
    let bound = settings_lower_bound(&op)?;
    let n = sf.dims[0].min(sf.dims[1]);
    Ok(if sf.rank == n { bound.max(n + 1) } else { bound })
}
