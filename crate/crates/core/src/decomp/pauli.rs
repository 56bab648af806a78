use super::{LocalDecomposition, Setting, PRUNE_TOL};
use crate::error::{Error, Result};
use crate::linalg::{c, hs_inner, pauli, tensor, CMatrix, Operator};

/// `coefficient * P_0 (x) P_1 (x) ...` with `P = 1, x, y, z` encoded as
/// `0, 1, 2, 3`.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliTerm {
    pub coefficient: f64,
    pub ops: Vec<u8>,
}

impl PauliTerm {
    /// Parses a label like `"1zz"` or `"xyy"`.
    pub fn new(coefficient: f64, label: &str) -> Result<Self> {
        let ops = label
            .chars()
            .map(|ch| match ch {
                '1' | 'i' | 'I' => Ok(0),
                'x' | 'X' => Ok(1),
                'y' | 'Y' => Ok(2),
                'z' | 'Z' => Ok(3),
                other => Err(Error::InvalidSetting(format!("unknown Pauli label {other:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(PauliTerm { coefficient, ops })
    }

    pub fn label(&self) -> String {
        self.ops.iter().map(|&o| ['1', 'x', 'y', 'z'][o as usize]).collect()
    }

    fn fits(&self, setting: &[u8]) -> bool {
        self.ops.iter().zip(setting).all(|(&t, &s)| t == 0 || s == 0 || t == s)
    }
}

fn pauli_matrix(o: u8) -> CMatrix {
    match o {
        0 => pauli::identity(),
        1 => pauli::x(),
        2 => pauli::y(),
        _ => pauli::z(),
    }
}

/// Eigenbasis of a Pauli direction, `+1` eigenvector first.
fn pauli_basis(o: u8) -> CMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match o {
        1 => CMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]),
        2 => CMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(0.0, h), c(0.0, -h)]),
        _ => CMatrix::identity(2, 2),
    }
}

/// Real linear combination of Pauli strings on `parties` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    pub parties: usize,
    pub terms: Vec<PauliTerm>,
}

impl PauliSum {
    /// Builds from `(coefficient, label)` pairs.
    pub fn from_labels(terms: &[(f64, &str)]) -> Result<Self> {
        let terms = terms
            .iter()
            .map(|&(c, l)| PauliTerm::new(c, l))
            .collect::<Result<Vec<_>>>()?;
        let parties = terms.first().map_or(0, |t| t.ops.len());
        if terms.iter().any(|t| t.ops.len() != parties) {
            return Err(Error::InvalidSetting("Pauli labels of different lengths".into()));
        }
        Ok(PauliSum { parties, terms })
    }

    /// Expansion `Tr(P W) / 2^n` of a Hermitian operator on qubits.
    pub fn of(op: &Operator) -> Result<Self> {
        if op.dims().iter().any(|&d| d != 2) {
            return Err(Error::InvalidSetting(format!("Pauli expansion needs qubits, got dims {:?}", op.dims())));
        }
        let n = op.parties();
        let mut terms = Vec::new();
        for idx in 0..4usize.pow(n as u32) {
            let ops: Vec<u8> = (0..n).map(|p| ((idx >> (2 * (n - 1 - p))) & 3) as u8).collect();
            let term = PauliTerm { coefficient: 1.0, ops };
            let coefficient = hs_inner(&PauliSum::string(&term), op).re / (1u64 << n) as f64;
            if coefficient.abs() >= PRUNE_TOL {
                terms.push(PauliTerm { coefficient, ..term });
            }
        }
        Ok(PauliSum { parties: n, terms })
    }

    fn string(t: &PauliTerm) -> Operator {
        let ops: Vec<Operator> = t
            .ops
            .iter()
            .map(|&o| Operator::new(vec![2], pauli_matrix(o)).expect("2x2"))
            .collect();
        let refs: Vec<&Operator> = ops.iter().collect();
        tensor(&refs).expect("qubits")
    }

    pub fn to_operator(&self) -> Operator {
        let mut out = Operator::zeros(vec![2; self.parties]);
        for t in &self.terms {
            out = out.add_scaled(&PauliSum::string(t), t.coefficient).expect("same shape");
        }
        out
    }

    /// Greedy assignment of terms to settings: heavier strings first, a term
    /// joins the first setting that agrees on every party where both act
    /// nontrivially. Parties left open measure `z`.
    pub fn group(&self) -> Vec<Vec<u8>> {
        let mut order: Vec<&PauliTerm> = self.terms.iter().collect();
        order.sort_by_key(|t| std::cmp::Reverse(t.ops.iter().filter(|&&o| o != 0).count()));
        let mut settings: Vec<Vec<u8>> = Vec::new();
        for t in order {
            match settings.iter_mut().find(|s| t.fits(s)) {
                Some(s) => {
                    for (sv, &tv) in s.iter_mut().zip(&t.ops) {
                        if *sv == 0 {
                            *sv = tv;
                        }
                    }
                }
                None => settings.push(t.ops.clone()),
            }
        }
        if settings.is_empty() {
            settings.push(vec![3; self.parties]);
        }
        for s in &mut settings {
            for o in s.iter_mut() {
                if *o == 0 {
                    *o = 3;
                }
            }
        }
        settings
    }

    /// Settings for the given directions; each term is measured in the
    /// first setting it fits.
    pub fn to_local(&self, settings: &[Vec<u8>]) -> Result<LocalDecomposition> {
        let mut out: Vec<Setting> = settings
            .iter()
            .map(|s| Setting::zeros(s.iter().map(|&o| pauli_basis(o)).collect()))
            .collect::<Result<_>>()?;
        for t in &self.terms {
            let i = settings
                .iter()
                .position(|s| t.fits(s))
                .ok_or_else(|| Error::InvalidSetting(format!("term {} fits no setting", t.label())))?;
            let st = &mut out[i];
            for k in 0..st.coeffs.len() {
                let outcome = st.outcome(k);
                let sign: f64 = t
                    .ops
                    .iter()
                    .zip(&outcome)
                    .map(|(&o, &b)| if o != 0 && b == 1 { -1.0 } else { 1.0 })
                    .product();
                st.coeffs[k] += t.coefficient * sign;
            }
        }
        LocalDecomposition::new(vec![2; self.parties], out)
    }
}

fn parse_settings(labels: &[&str]) -> Vec<Vec<u8>> {
    labels
        .iter()
        .map(|l| PauliTerm::new(1.0, l).expect("static label").ops)
        .collect()
}

/// Pauli expansion of a qubit operator grouped by [`PauliSum::group`].
pub fn pauli_decomposition(op: &Operator) -> Result<LocalDecomposition> {
    let sum = PauliSum::of(op)?;
    sum.to_local(&sum.group())
}

fn ghz_like(shift: f64) -> LocalDecomposition {
    let e = 1.0 / 8.0;
    let sum = PauliSum::from_labels(&[
        (shift - e, "111"),
        (-e, "1zz"),
        (-e, "z1z"),
        (-e, "zz1"),
        (-e, "xxx"),
        (e, "xyy"),
        (e, "yxy"),
        (e, "yyx"),
    ])
    .expect("static labels");
    sum.to_local(&parse_settings(&["zzz", "xxx", "xyy", "yxy", "yyx"]))
        .expect("every term fits")
}

/// `3/4 - |GHZ><GHZ|` in the settings zzz, xxx, xyy, yxy, yyx.
pub fn ghz_decomposition() -> LocalDecomposition {
    ghz_like(0.75)
}

/// `1/2 - |GHZ><GHZ|` in the same five settings.
pub fn w2_decomposition() -> LocalDecomposition {
    ghz_like(0.5)
}

/// `2/3 - |W><W|` in the seven settings zzz, zxx, zyy, xzx, yzy, xxz, yyz.
pub fn w1_decomposition() -> LocalDecomposition {
    let a = 1.0 / 24.0;
    let b = -1.0 / 12.0;
    let sum = PauliSum::from_labels(&[
        (13.0 * a, "111"),
        (-a, "z11"),
        (-a, "1z1"),
        (-a, "11z"),
        (a, "zz1"),
        (a, "z1z"),
        (a, "1zz"),
        (3.0 * a, "zzz"),
        (b, "1xx"),
        (b, "1yy"),
        (b, "zxx"),
        (b, "zyy"),
        (b, "x1x"),
        (b, "y1y"),
        (b, "xzx"),
        (b, "yzy"),
        (b, "xx1"),
        (b, "yy1"),
        (b, "xxz"),
        (b, "yyz"),
    ])
    .expect("static labels");
    sum.to_local(&parse_settings(&["zzz", "zxx", "zyy", "xzx", "yzy", "xxz", "yyz"]))
        .expect("every term fits")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hs_distance;
    use crate::witness::{ghz_witness, w0, w_witness_1, w_witness_2};

    #[test]
    fn three_qubit_decompositions() {
        let ghz = ghz_decomposition();
        assert!(ghz.verify(&ghz_witness().op).unwrap() < 1e-12);
        assert_eq!(ghz.count_settings(), 5);
        let w1 = w1_decomposition();
        assert!(w1.verify(&w_witness_1().op).unwrap() < 1e-12);
        assert_eq!(w1.count_settings(), 7);
        let w2 = w2_decomposition();
        assert!(w2.verify(&w_witness_2().op).unwrap() < 1e-12);
        assert_eq!(w2.count_settings(), 5);
        assert!(ghz.verify(&w_witness_1().op).unwrap() > 0.2);
    }

    #[test]
    fn pauli_expansion_round_trip() {
        let w = w0();
        let sum = PauliSum::of(&w).unwrap();
        assert_eq!(sum.terms.len(), 4);
        assert!(hs_distance(&sum.to_operator(), &w) < 1e-15);
        let d = pauli_decomposition(&w).unwrap();
        assert!(d.verify(&w).unwrap() < 1e-12);
        assert_eq!(d.count_settings(), 3);
        let d = pauli_decomposition(&ghz_witness().op).unwrap();
        assert!(d.verify(&ghz_witness().op).unwrap() < 1e-12);
        assert_eq!(d.count_settings(), 5);
    }
}
