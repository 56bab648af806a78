use super::{eigenbasis, LocalDecomposition, Setting, MERGE_TOL, PRUNE_TOL};
use crate::error::{Error, Result};
use crate::linalg::expand;
use crate::linalg::{c, complete_basis, schmidt, tensor, tensor_vectors, CMatrix, CVector, Operator};

/// One weighted product projector `c |e><e| (x) |f><f| (x) ...`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductTerm {
    pub coefficient: f64,
    /// Normalized local vectors, party 0 first.
    pub vectors: Vec<CVector>,
}

impl ProductTerm {
    /// Normalizes the local vectors and folds their squared norms into the
    /// coefficient.
    pub fn new(coefficient: f64, vectors: Vec<CVector>) -> Result<Self> {
        let mut coefficient = coefficient;
        let mut out = Vec::with_capacity(vectors.len());
        for v in vectors {
            let n = v.norm();
            if n == 0.0 || !n.is_finite() {
                return Err(Error::DegenerateParameters("zero local vector".into()));
            }
            coefficient *= n * n;
            out.push(v.map(|z| z / n));
        }
        Ok(ProductTerm {
            coefficient,
            vectors: out,
        })
    }

    pub fn vector(&self) -> CVector {
        let refs: Vec<&CVector> = self.vectors.iter().collect();
        tensor_vectors(&refs)
    }
}

/// `sum_i c_i |e_i><e_i| (x) |f_i><f_i|`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductVectorDecomposition {
    pub dims: Vec<usize>,
    pub terms: Vec<ProductTerm>,
}

/// Local vectors that can sit in one orthonormal basis: parallel or
/// orthogonal.
fn compatible(a: &CVector, b: &CVector) -> bool {
    let o = a.dotc(b).norm();
    o < MERGE_TOL || o > 1.0 - MERGE_TOL
}

impl ProductVectorDecomposition {
    pub fn recompose(&self) -> Operator {
        let mut out = Operator::zeros(self.dims.clone());
        for t in &self.terms {
            let p = Operator::projector(self.dims.clone(), &t.vector()).expect("dims match");
            out = out.add_scaled(&p, t.coefficient).expect("same shape");
        }
        out
    }

    pub fn verify(&self, target: &Operator) -> f64 {
        crate::linalg::hs_distance(&self.recompose(), target)
    }

    /// Number of projectors with nonzero weight.
    pub fn len(&self) -> usize {
        self.terms.iter().filter(|t| t.coefficient.abs() >= PRUNE_TOL).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Greedy grouping of terms into correlated settings: a term joins a
    /// group when, for every party, its vector is parallel or orthogonal to
    /// each vector already in the group.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for (i, t) in self.terms.iter().enumerate() {
            if t.coefficient.abs() < PRUNE_TOL {
                continue;
            }
            let fits = |g: &Vec<usize>| {
                g.iter().all(|&j| {
                    t.vectors
                        .iter()
                        .zip(&self.terms[j].vectors)
                        .all(|(a, b)| compatible(a, b))
                })
            };
            match groups.iter_mut().find(|g| fits(g)) {
                Some(g) => g.push(i),
                None => groups.push(vec![i]),
            }
        }
        groups
    }

    /// Correlated settings needed when the projectors are measured as
    /// grouped by [`ProductVectorDecomposition::groups`].
    pub fn settings_needed(&self) -> usize {
        self.groups().len()
    }

    /// Settings, one per group.
    pub fn to_local(&self) -> Result<LocalDecomposition> {
        let mut settings = Vec::new();
        for g in self.groups() {
            let mut bases = Vec::with_capacity(self.dims.len());
            for (p, &d) in self.dims.iter().enumerate() {
                let mut distinct: Vec<CVector> = Vec::new();
                for &i in &g {
                    let v = &self.terms[i].vectors[p];
                    if !distinct.iter().any(|w| w.dotc(v).norm() > 1.0 - MERGE_TOL) {
                        distinct.push(v.clone());
                    }
                }
                bases.push(complete_basis(&distinct, d));
            }
            let mut st = Setting::zeros(bases)?;
            for &i in &g {
                let outcome: Vec<usize> = self.terms[i]
                    .vectors
                    .iter()
                    .zip(&st.bases)
                    .map(|(v, b)| {
                        (0..b.ncols())
                            .max_by(|&x, &y| {
                                b.column(x).dotc(v).norm().total_cmp(&b.column(y).dotc(v).norm())
                            })
                            .expect("nonempty basis")
                    })
                    .collect();
                let k = st.flat_index(&outcome);
                st.coeffs[k] += self.terms[i].coefficient;
            }
            settings.push(st);
        }
        LocalDecomposition::new(self.dims.clone(), settings)
    }
}

/// One term `gamma A (x) B (x) ...` with Hermitian factors.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorTerm {
    pub gamma: f64,
    pub factors: Vec<CMatrix>,
}

/// `sum_i gamma_i A_i (x) B_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorDecomposition {
    pub dims: Vec<usize>,
    pub terms: Vec<TensorTerm>,
}

impl TensorDecomposition {
    pub fn recompose(&self) -> Operator {
        let mut out = Operator::zeros(self.dims.clone());
        for t in &self.terms {
            let ops: Vec<Operator> = t
                .factors
                .iter()
                .zip(&self.dims)
                .map(|(f, &d)| Operator::new(vec![d], f.clone()).expect("square factor"))
                .collect();
            let refs: Vec<&Operator> = ops.iter().collect();
            let term = tensor(&refs).expect("dims match");
            out = out.add_scaled(&term, t.gamma).expect("same shape");
        }
        out
    }

    pub fn verify(&self, target: &Operator) -> f64 {
        crate::linalg::hs_distance(&self.recompose(), target)
    }

    /// Each term measured in the eigenbases of its factors, with weight
    /// `gamma` times the product of eigenvalues.
    pub fn to_local(&self) -> Result<LocalDecomposition> {
        let mut settings = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let (bases, vals): (Vec<CMatrix>, Vec<Vec<f64>>) = t.factors.iter().map(eigenbasis).unzip();
            let mut st = Setting::zeros(bases)?;
            for k in 0..st.coeffs.len() {
                let out = st.outcome(k);
                st.coeffs[k] = t.gamma * out.iter().zip(&vals).map(|(&o, v)| v[o]).product::<f64>();
            }
            settings.push(st);
        }
        LocalDecomposition::new(self.dims.clone(), settings)
    }
}

/// `W = sum_i G^A_i (x) (sum_j lambda_ij G^B_j)` over the orthonormal
/// generator basis of party A; terms whose B factor vanishes are dropped.
pub fn operator_basis_decomposition(w: &Operator) -> Result<TensorDecomposition> {
    let cm = expand(w)?;
    let [_, db] = cm.dims();
    let mut terms = Vec::new();
    for (i, ga) in cm.basis_a.operators().iter().enumerate() {
        let mut bob = CMatrix::zeros(db, db);
        for (j, gb) in cm.basis_b.operators().iter().enumerate() {
            bob += gb.map(|z| z * cm.lambda[(i, j)]);
        }
        if bob.norm() < PRUNE_TOL {
            continue;
        }
        terms.push(TensorTerm {
            gamma: 1.0,
            factors: vec![ga.clone(), bob],
        });
    }
    Ok(TensorDecomposition {
        dims: w.dims().to_vec(),
        terms,
    })
}

/// Five weighted product projectors summing to `|psi><psi|^{T_B}` for a
/// two-qubit pure state of Schmidt rank 2: three on `A'_i (x) A'_i` and
/// `-alpha beta` on `|01>` and `|10>`, all in the Schmidt frames (Bob's
/// conjugated). Only four correlated settings are needed.
pub fn onp_five_projectors(psi: &CVector) -> Result<ProductVectorDecomposition> {
    if psi.len() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: psi.len(),
        });
    }
    let sf = schmidt(psi, &[2, 2])?;
    let (a, b) = (sf.coefficients[0], sf.coefficients[1]);
    if sf.rank < 2 {
        return Err(Error::DegenerateParameters(format!("Schmidt coefficients ({a}, {b})")));
    }
    let (ua, ub) = sf.local_unitaries();
    let ub = ub.map(|z| z.conj());
    let (cos, sin) = ((a / (a + b)).sqrt(), (b / (a + b)).sqrt());
    let w = c(0.5, 3f64.sqrt() / 2.0);
    let a1 = CVector::from_vec(vec![w * cos, w.conj() * sin]);
    let a2 = CVector::from_vec(vec![w.conj() * cos, w * sin]);
    // e^{i pi/3} + e^{-i pi/3} = 1, so the sum is already normalized
    let a3 = &a1 + &a2;
    let weight = (a + b) * (a + b) / 3.0;
    let mut terms = Vec::with_capacity(5);
    for v in [a1, a2, a3] {
        terms.push(ProductTerm::new(weight, vec![&ua * &v, &ub * &v])?);
    }
    let e = |m: &CMatrix, k: usize| m.column(k).into_owned();
    terms.push(ProductTerm::new(-a * b, vec![e(&ua, 0), e(&ub, 1)])?);
    terms.push(ProductTerm::new(-a * b, vec![e(&ua, 1), e(&ub, 0)])?);
    Ok(ProductVectorDecomposition { dims: vec![2, 2], terms })
}
