//! JSON form of a [`LocalDecomposition`]:
//! `{"target_dims": [..], "settings": [{"bases": [[vector, ..], ..], "coeffs": nested}]}`
//! where each basis is a list of vectors, each vector a list of `[re, im]`
//! pairs, and `coeffs` is nested one level per party.

use serde_json::{json, Value};

use super::{LocalDecomposition, Setting};
use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix};

fn err(msg: impl Into<String>) -> Error {
    Error::Serialization(msg.into())
}

fn nest(coeffs: &[f64], dims: &[usize]) -> Value {
    match dims {
        [] => json!(coeffs[0]),
        [_] => json!(coeffs),
        [d, rest @ ..] => {
            let stride = coeffs.len() / d;
            Value::Array(coeffs.chunks(stride).map(|ch| nest(ch, rest)).collect())
        }
    }
}

fn flatten(v: &Value, dims: &[usize], out: &mut Vec<f64>) -> Result<()> {
    match dims {
        [] => out.push(v.as_f64().ok_or_else(|| err("coefficient is not a number"))?),
        [d, rest @ ..] => {
            let arr = v.as_array().ok_or_else(|| err("coeffs nesting does not match dims"))?;
            if arr.len() != *d {
                return Err(err(format!("expected {d} coefficients, found {}", arr.len())));
            }
            for x in arr {
                flatten(x, rest, out)?;
            }
        }
    }
    Ok(())
}

fn basis_to_json(b: &CMatrix) -> Value {
    Value::Array(
        b.column_iter()
            .map(|col| Value::Array(col.iter().map(|z| json!([z.re, z.im])).collect()))
            .collect(),
    )
}

fn basis_from_json(v: &Value, d: usize) -> Result<CMatrix> {
    let vecs = v.as_array().ok_or_else(|| err("basis is not an array"))?;
    if vecs.len() != d {
        return Err(err(format!("basis has {} vectors, expected {d}", vecs.len())));
    }
    let mut m = CMatrix::zeros(d, d);
    for (k, vec) in vecs.iter().enumerate() {
        let entries = vec.as_array().ok_or_else(|| err("basis vector is not an array"))?;
        if entries.len() != d {
            return Err(err(format!("basis vector has {} entries, expected {d}", entries.len())));
        }
        for (r, z) in entries.iter().enumerate() {
            let pair = z.as_array().filter(|p| p.len() == 2).ok_or_else(|| err("entry is not [re, im]"))?;
            let re = pair[0].as_f64().ok_or_else(|| err("re is not a number"))?;
            let im = pair[1].as_f64().ok_or_else(|| err("im is not a number"))?;
            m[(r, k)] = c(re, im);
        }
    }
    Ok(m)
}

pub fn decomposition_to_json(d: &LocalDecomposition) -> Value {
    let settings: Vec<Value> = d
        .settings
        .iter()
        .map(|s| {
            json!({
                "bases": s.bases.iter().map(basis_to_json).collect::<Vec<_>>(),
                "coeffs": nest(&s.coeffs, &s.dims()),
            })
        })
        .collect();
    json!({ "target_dims": d.target_dims, "settings": settings })
}

pub fn decomposition_from_json(v: &Value) -> Result<LocalDecomposition> {
    let dims: Vec<usize> = serde_json::from_value(v.get("target_dims").cloned().ok_or_else(|| err("missing target_dims"))?)
        .map_err(|e| err(e.to_string()))?;
    let raw = v
        .get("settings")
        .and_then(Value::as_array)
        .ok_or_else(|| err("missing settings"))?;
    let mut settings = Vec::with_capacity(raw.len());
    for s in raw {
        let bases_v = s
            .get("bases")
            .and_then(Value::as_array)
            .ok_or_else(|| err("setting without bases"))?;
        if bases_v.len() != dims.len() {
            return Err(err("one basis per party expected"));
        }
        let bases = bases_v
            .iter()
            .zip(&dims)
            .map(|(b, &d)| basis_from_json(b, d))
            .collect::<Result<Vec<_>>>()?;
        let mut coeffs = Vec::new();
        flatten(s.get("coeffs").ok_or_else(|| err("setting without coeffs"))?, &dims, &mut coeffs)?;
        settings.push(Setting::new(bases, coeffs)?);
    }
    LocalDecomposition::new(dims, settings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::{ghz_decomposition, schmidt_ons};
    use crate::random::{random_pure_state, rng_stream};

    #[test]
    fn round_trip_is_exact() {
        let mut rng = rng_stream(4, 0);
        let psi = random_pure_state(9, &mut rng);
        for d in [schmidt_ons(&psi, &[3, 3]).unwrap(), ghz_decomposition()] {
            let text = serde_json::to_string(&decomposition_to_json(&d)).unwrap();
            let back = decomposition_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
            assert_eq!(back, d);
        }
    }

    #[test]
    fn malformed_input_is_rejected() {
        let v = json!({"target_dims": [2], "settings": [{"bases": [[[[1.0, 0.0]]]], "coeffs": [1.0, 0.0]}]});
        assert!(decomposition_from_json(&v).is_err());
    }
}
