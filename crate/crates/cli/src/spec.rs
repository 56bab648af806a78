//! Textual state and witness specifications, e.g. `noisy-bell:p=0.6,d=0.1`,
//! `chessboard:m=1,n=0.5,a=0.3,b=-0.2,c=0.4,d=0.1`, `upb:variant=identity`
//! or `@state.json` for a matrix written by `state make`.

use std::collections::BTreeMap;

use serde_json::Value;
use witnesskit::linalg::Operator;
use witnesskit::random::rng_stream;
use witnesskit::states::{
    chessboard_state, ghz_state, horodecki_state, sample_ball_state, upb_state, w_state, werner_like, bell_vector,
    BellKind, ChessboardParams,
};
use witnesskit::{DensityMatrix, NoiseBallSpec};

use crate::error::{CliError, CliResult};
use crate::output::matrix_from_json;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// `name[:k=v,k=v]` split into the name and its numeric keys.
fn split(spec: &str) -> CliResult<(&str, BTreeMap<String, String>)> {
    let (name, rest) = match spec.split_once(':') {
        Some((n, r)) => (n, r),
        None => (spec, ""),
    };
    let mut keys = BTreeMap::new();
    for item in rest.split(',').filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| usage(format!("expected key=value in `{spec}`, found `{item}`")))?;
        keys.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok((name.trim(), keys))
}

fn number(keys: &BTreeMap<String, String>, key: &str) -> CliResult<Option<f64>> {
    keys.get(key)
        .map(|v| v.parse::<f64>().map_err(|_| usage(format!("`{key}` must be a number, found `{v}`"))))
        .transpose()
}

fn required(keys: &BTreeMap<String, String>, key: &str, name: &str) -> CliResult<f64> {
    number(keys, key)?.ok_or_else(|| usage(format!("`{name}` needs `{key}=...`")))
}

fn reject_unknown(keys: &BTreeMap<String, String>, allowed: &[&str], name: &str) -> CliResult<()> {
    match keys.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(usage(format!("unknown key `{k}` for `{name}`"))),
        None => Ok(()),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum StateSpec {
    NoisyBell { p: f64, d: f64 },
    Ghz,
    W,
    Upb,
    Chessboard(ChessboardParams),
    Horodecki { b: f64 },
    File(String),
}

pub const FAMILIES: [&str; 6] = ["noisy-bell", "ghz", "w", "upb", "chessboard", "horodecki"];

impl StateSpec {
    pub fn parse(spec: &str) -> CliResult<StateSpec> {
        if let Some(path) = spec.strip_prefix('@') {
            return Ok(StateSpec::File(path.to_string()));
        }
        let (name, keys) = split(spec)?;
        let out = match name {
            "noisy-bell" => {
                reject_unknown(&keys, &["p", "d"], name)?;
                StateSpec::NoisyBell {
                    p: required(&keys, "p", name)?,
                    d: number(&keys, "d")?.unwrap_or(0.0),
                }
            }
            "ghz" | "w" | "upb" => {
                reject_unknown(&keys, &[], name)?;
                match name {
                    "ghz" => StateSpec::Ghz,
                    "w" => StateSpec::W,
                    _ => StateSpec::Upb,
                }
            }
            "chessboard" => {
                let names = ["m", "n", "a", "b", "c", "d"];
                reject_unknown(&keys, &names, name)?;
                let v = names.iter().map(|k| required(&keys, k, name)).collect::<CliResult<Vec<_>>>()?;
                StateSpec::Chessboard(ChessboardParams::from_slice(&v)?)
            }
            "horodecki" => {
                reject_unknown(&keys, &["b"], name)?;
                StateSpec::Horodecki {
                    b: required(&keys, "b", name)?,
                }
            }
            other => {
                return Err(usage(format!(
                    "unknown state family `{other}`; expected one of {}",
                    FAMILIES.join(", ")
                )))
            }
        };
        Ok(out)
    }

    /// Known noise radius, if the spec carries one.
    pub fn noise_radius(&self) -> Option<f64> {
        match self {
            StateSpec::NoisyBell { d, .. } => Some(*d),
            _ => None,
        }
    }

    /// The noisy Bell state draws its perturbation from stream 0 of `seed`.
    pub fn build(&self, seed: u64) -> CliResult<DensityMatrix> {
        Ok(match self {
            StateSpec::NoisyBell { p, d } if *d == 0.0 => werner_like(*p)?,
            StateSpec::NoisyBell { p, d } => {
                let spec = NoiseBallSpec::new(*p, *d)?;
                sample_ball_state(spec, &bell_vector(BellKind::PsiPlus), &mut rng_stream(seed, 0))?
            }
            StateSpec::Ghz => ghz_state(),
            StateSpec::W => w_state(),
            StateSpec::Upb => upb_state(),
            StateSpec::Chessboard(params) => chessboard_state(*params)?,
            StateSpec::Horodecki { b } => horodecki_state(*b)?,
            StateSpec::File(path) => {
                let (dims, m) = read_matrix_file(path)?;
                DensityMatrix::from_matrix(dims, m)?
            }
        })
    }
}

/// `dims` and `matrix` of a JSON document written by `state make` or
/// `witness build`.
pub fn read_matrix_file(path: &str) -> CliResult<(Vec<usize>, witnesskit::CMatrix)> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
    let dims: Vec<usize> = v
        .get("dims")
        .cloned()
        .and_then(|d| serde_json::from_value(d).ok())
        .ok_or_else(|| CliError::Io(format!("{path}: missing `dims`")))?;
    let m = matrix_from_json(v.get("matrix").ok_or_else(|| CliError::Io(format!("{path}: missing `matrix`")))?)
        .map_err(|e| CliError::Io(format!("{path}: {e}")))?;
    Ok((dims, m))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UpbTarget {
    Prewitness,
    Identity,
    Projectors,
}

/// Operators accepted by `decompose --target`.
#[derive(Clone, Debug, PartialEq)]
pub enum WitnessSpec {
    W0,
    Ghz,
    W1,
    W2,
    Upb { variant: UpbTarget, epsilon: Option<f64> },
    Horodecki { b: f64, epsilon: Option<f64> },
    /// NPT witness of a state spec.
    Npt(StateSpec),
    File(String),
}

impl WitnessSpec {
    pub fn parse(spec: &str) -> CliResult<WitnessSpec> {
        if let Some(path) = spec.strip_prefix('@') {
            return Ok(WitnessSpec::File(path.to_string()));
        }
        if let Some(state) = spec.strip_prefix("npt:") {
            return Ok(WitnessSpec::Npt(StateSpec::parse(state)?));
        }
        let (name, keys) = split(spec)?;
        let out = match name {
            "w0" | "ghz" | "w1" | "w2" => {
                reject_unknown(&keys, &[], name)?;
                match name {
                    "w0" => WitnessSpec::W0,
                    "ghz" => WitnessSpec::Ghz,
                    "w1" => WitnessSpec::W1,
                    _ => WitnessSpec::W2,
                }
            }
            "upb" => {
                reject_unknown(&keys, &["variant", "eps"], name)?;
                let variant = match keys.get("variant").map(String::as_str) {
                    None | Some("identity") => UpbTarget::Identity,
                    Some("prewitness") => UpbTarget::Prewitness,
                    Some("projectors") => UpbTarget::Projectors,
                    Some(v) => return Err(usage(format!("unknown UPB variant `{v}`"))),
                };
                WitnessSpec::Upb {
                    variant,
                    epsilon: number(&keys, "eps")?,
                }
            }
            "horodecki" => {
                reject_unknown(&keys, &["b", "eps"], name)?;
                WitnessSpec::Horodecki {
                    b: required(&keys, "b", name)?,
                    epsilon: number(&keys, "eps")?,
                }
            }
            other => {
                return Err(usage(format!(
                    "unknown witness `{other}`; expected w0, ghz, w1, w2, upb, horodecki, npt:<state> or @file"
                )))
            }
        };
        Ok(out)
    }
}

pub fn read_witness_file(path: &str) -> CliResult<Operator> {
    let (dims, m) = read_matrix_file(path)?;
    Ok(Operator::hermitian(dims, m)?)
}
