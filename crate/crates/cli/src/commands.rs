//! One function per subcommand, each returning the payload to emit.

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};
use witnesskit::decomp::{
    decomposition_from_json, decomposition_to_json, ghz_decomposition, horodecki_decomposition,
    onp_five_projectors, operator_basis_decomposition, pauli_decomposition, schmidt_ons, settings_lower_bound,
    settings_lower_bound_pure, two_qubit_three_settings, upb_witness_settings, w1_decomposition, w2_decomposition,
    UpbVariant,
};
use witnesskit::linalg::{canonical_phase, expand, partial_transpose, Convention, Operator};
use witnesskit::measure::{estimate_from_records, simulate_decomposition, ShotRow};
use witnesskit::montecarlo::{error_curve, false_separable_rate, CurveRow, FalseSeparableRate};
use witnesskit::seesaw::SeesawOptions;
use witnesskit::states::{bell_vector, horodecki_state, upb_nine_projectors, upb_projector, BellKind, PPT_TOL};
use witnesskit::witness::{
    classify, edge_witness, ghz_witness, is_w0, npt_witness, optimize_epsilon, tau_threshold, theta_threshold, w0,
    w_witness_1, Classification, EpsilonMode, ThresholdKind, Witness,
};
use witnesskit::{CVector, LocalDecomposition};

use crate::error::{CliError, CliResult};
use crate::output::{csv_rows, matrix_csv, matrix_to_json, Format, Payload};
use crate::spec::{read_witness_file, StateSpec, UpbTarget, WitnessSpec};

fn unsupported(msg: impl Into<String>) -> CliError {
    CliError::Unsupported(msg.into())
}

fn seesaw(restarts: usize, seed: u64) -> SeesawOptions {
    SeesawOptions {
        restarts,
        seed,
        ..Default::default()
    }
}

pub struct StateArgs {
    pub family: String,
    pub p: Option<f64>,
    pub d: Option<f64>,
    pub b: Option<f64>,
    pub params: Option<Vec<f64>>,
}

impl StateArgs {
    fn to_spec(&self) -> CliResult<StateSpec> {
        let need = |v: Option<f64>, flag: &str| {
            v.ok_or_else(|| CliError::Usage(format!("--family {} needs --{flag}", self.family)))
        };
        Ok(match self.family.as_str() {
            "noisy-bell" => StateSpec::NoisyBell {
                p: need(self.p, "p")?,
                d: self.d.unwrap_or(0.0),
            },
            "ghz" => StateSpec::Ghz,
            "w" => StateSpec::W,
            "upb" => StateSpec::Upb,
            "chessboard" => {
                let v = self
                    .params
                    .as_ref()
                    .ok_or_else(|| CliError::Usage("--family chessboard needs --params m,n,a,b,c,d".into()))?;
                StateSpec::Chessboard(witnesskit::states::ChessboardParams::from_slice(v)?)
            }
            "horodecki" => StateSpec::Horodecki { b: need(self.b, "b")? },
            other => return Err(CliError::Usage(format!("unknown family `{other}`"))),
        })
    }
}

pub fn state_make(args: &StateArgs, seed: u64, format: Format) -> CliResult<Payload> {
    let spec = args.to_spec()?;
    let rho = spec.build(seed)?;
    if format == Format::Csv {
        return Ok(Payload::Csv(matrix_csv(rho.matrix())?));
    }
    let min_pt = partial_transpose(rho.operator(), 0)?.min_eigenvalue();
    Ok(Payload::Json(json!({
        "family": args.family,
        "dims": rho.dims(),
        "matrix": matrix_to_json(rho.matrix()),
        "properties": {
            "trace": rho.operator().trace().re,
            "eigenvalues": rho.eigenvalues(),
            "rank": rho.rank(),
            "kernel_dim": rho.kernel_dimension(),
            "min_partial_transpose_eigenvalue": min_pt,
            "ppt": min_pt >= -PPT_TOL,
        },
    })))
}

pub struct WitnessArgs {
    pub state: String,
    pub edge: bool,
    pub epsilon: Option<String>,
    pub restarts: usize,
}

fn epsilon_mode(text: &str, spec: &StateSpec) -> CliResult<EpsilonMode> {
    match text {
        "optimize" => Ok(EpsilonMode::Optimize),
        "primed" if *spec == StateSpec::Upb => Ok(EpsilonMode::OptimizePrimed(upb_nine_projectors())),
        "primed" => Err(unsupported("the primed shift is only defined for the UPB state")),
        v => v
            .parse::<f64>()
            .map(EpsilonMode::Given)
            .map_err(|_| CliError::Usage(format!("--epsilon takes a number, `optimize` or `primed`, found `{v}`"))),
    }
}

pub fn witness_build(args: &WitnessArgs, seed: u64, format: Format) -> CliResult<Payload> {
    let spec = StateSpec::parse(&args.state)?;
    let rho = spec.build(seed)?;
    let w: Witness = if args.edge {
        let mode = epsilon_mode(args.epsilon.as_deref().unwrap_or("optimize"), &spec)?;
        edge_witness(&rho, mode, &seesaw(args.restarts, seed))?
    } else {
        if args.epsilon.is_some() {
            return Err(CliError::Usage("--epsilon requires --edge".into()));
        }
        match spec {
            StateSpec::Ghz => ghz_witness(),
            StateSpec::W => w_witness_1(),
            _ => npt_witness(&rho)?,
        }
    };
    if format == Format::Csv {
        return Ok(Payload::Csv(matrix_csv(w.op.matrix())?));
    }
    Ok(Payload::Json(json!({
        "state": args.state,
        "kind": w.kind,
        "dims": w.op.dims(),
        "matrix": matrix_to_json(w.op.matrix()),
        "epsilon": w.provenance.epsilon,
        "value": w.value(&rho),
        "provenance": w.provenance,
    })))
}

#[derive(Serialize)]
struct ThresholdRow {
    d: f64,
    p: Option<f64>,
    tau: f64,
    theta: Option<f64>,
}

pub fn witness_thresholds(d: f64, p: Option<f64>, format: Format) -> CliResult<Payload> {
    let row = ThresholdRow {
        d,
        p,
        tau: tau_threshold(d)?,
        theta: p.map(|p| theta_threshold(p, d)).transpose()?,
    };
    Ok(match format {
        Format::Csv => Payload::Csv(csv_rows(&[row])?),
        Format::Json => Payload::Json(serde_json::to_value(row).expect("plain data")),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Ons,
    Onp,
    Pauli,
    Published,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    Orthonormal,
    Physics,
}

pub struct DecomposeArgs {
    pub target: String,
    pub mode: Mode,
    pub restarts: usize,
    pub convention: Option<ConventionArg>,
}

/// `phi` with `op = |phi><phi|^{T_B}`, if there is one.
fn pure_pt_factor(op: &Operator) -> Option<CVector> {
    if op.parties() != 2 {
        return None;
    }
    let (vals, vecs) = partial_transpose(op, 1).ok()?.eigen();
    let (top, rest) = vals.split_last()?;
    if (top - 1.0).abs() > 1e-9 || rest.iter().any(|x| x.abs() > 1e-9) {
        return None;
    }
    Some(canonical_phase(&vecs.column(vals.len() - 1).into_owned()))
}

struct Target {
    op: Operator,
    epsilon: Option<f64>,
}

fn resolve_target(spec: &WitnessSpec, restarts: usize, seed: u64) -> CliResult<Target> {
    let plain = |op| Target { op, epsilon: None };
    Ok(match spec {
        WitnessSpec::W0 => plain(w0()),
        WitnessSpec::Ghz => plain(ghz_witness().op),
        WitnessSpec::W1 => plain(w_witness_1().op),
        WitnessSpec::W2 => plain(witnesskit::witness::w_witness_2().op),
        WitnessSpec::Upb { variant, epsilon } => {
            let wbar = upb_projector();
            let nine = upb_nine_projectors();
            let (eps, subtract) = match variant {
                UpbTarget::Prewitness => (0.0, Operator::identity(vec![3, 3])),
                UpbTarget::Identity => (
                    match epsilon {
                        Some(e) => *e,
                        None => optimize_epsilon(&wbar, None, &seesaw(restarts, seed))?.epsilon,
                    },
                    Operator::identity(vec![3, 3]),
                ),
                UpbTarget::Projectors => (
                    match epsilon {
                        Some(e) => *e,
                        None => optimize_epsilon(&wbar, Some(&nine), &seesaw(restarts, seed))?.epsilon,
                    },
                    nine.clone(),
                ),
            };
            Target {
                op: wbar.add_scaled(&subtract, -eps)?,
                epsilon: Some(eps),
            }
        }
        WitnessSpec::Horodecki { b, epsilon } => {
            let mode = epsilon.map_or(EpsilonMode::Optimize, EpsilonMode::Given);
            let w = edge_witness(&horodecki_state(*b)?, mode, &seesaw(restarts, seed))?;
            Target {
                epsilon: w.provenance.epsilon,
                op: w.op,
            }
        }
        WitnessSpec::Npt(state) => plain(npt_witness(&state.build(seed)?)?.op),
        WitnessSpec::File(path) => plain(read_witness_file(path)?),
    })
}

struct Decomposed {
    local: LocalDecomposition,
    lower_bound: Option<usize>,
    projectors: Option<usize>,
}

fn decompose_target(spec: &WitnessSpec, target: &Target, mode: Mode) -> CliResult<Decomposed> {
    let op = &target.op;
    let bipartite_bound = || -> CliResult<Option<usize>> {
        if op.parties() != 2 {
            return Ok(None);
        }
        Ok(Some(match pure_pt_factor(op) {
            Some(phi) => settings_lower_bound_pure(&phi, op.dims())?,
            None => settings_lower_bound(op)?,
        }))
    };
    let lower_bound = bipartite_bound()?;
    let plain = |local| Decomposed {
        local,
        lower_bound,
        projectors: None,
    };
    Ok(match mode {
        Mode::Ons => {
            let phi = pure_pt_factor(op)
                .ok_or_else(|| unsupported("ons mode needs a bipartite target of the form |phi><phi|^T_B"))?;
            if op.dims() == [2, 2] {
                plain(two_qubit_three_settings(&phi)?)
            } else {
                plain(schmidt_ons(&phi, op.dims())?.partial_transpose(1)?)
            }
        }
        Mode::Onp => {
            if op.parties() != 2 {
                return Err(unsupported("onp mode needs a bipartite target"));
            }
            match pure_pt_factor(op).filter(|_| op.dims() == [2, 2]) {
                Some(phi) => {
                    let pv = onp_five_projectors(&phi)?;
                    Decomposed {
                        local: pv.to_local()?,
                        lower_bound,
                        projectors: Some(pv.len()),
                    }
                }
                None => plain(operator_basis_decomposition(op)?.to_local()?),
            }
        }
        Mode::Pauli => plain(pauli_decomposition(op)?),
        Mode::Published => match spec {
            WitnessSpec::W0 => plain(two_qubit_three_settings(&bell_vector(BellKind::PhiMinus))?),
            WitnessSpec::Ghz => plain(ghz_decomposition()),
            WitnessSpec::W1 => plain(w1_decomposition()),
            WitnessSpec::W2 => plain(w2_decomposition()),
            WitnessSpec::Upb { variant, .. } => {
                let v = match variant {
                    UpbTarget::Prewitness => UpbVariant::Prewitness,
                    UpbTarget::Identity => UpbVariant::Identity,
                    UpbTarget::Projectors => UpbVariant::Projectors,
                };
                let local = upb_witness_settings(v, target.epsilon.unwrap_or(0.0))?;
                Decomposed {
                    projectors: Some(local.projector_count()),
                    local,
                    lower_bound,
                }
            }
            WitnessSpec::Horodecki { b, .. } => {
                plain(horodecki_decomposition(*b, target.epsilon.expect("edge witness has a shift"))?.to_local()?)
            }
            WitnessSpec::Npt(_) | WitnessSpec::File(_) => {
                return Err(unsupported("no published decomposition for this target; use ons, onp or pauli"))
            }
        },
    })
}

#[derive(Serialize)]
struct SettingRow {
    setting: usize,
    outcome: String,
    coefficient: f64,
}

pub fn decompose(args: &DecomposeArgs, seed: u64, format: Format) -> CliResult<Payload> {
    let spec = WitnessSpec::parse(&args.target)?;
    let target = resolve_target(&spec, args.restarts, seed)?;
    let d = decompose_target(&spec, &target, args.mode)?;
    let local = d.local.merged();
    let residual = local.verify(&target.op)?;
    if format == Format::Csv {
        let mut rows = Vec::new();
        for (i, s) in local.settings.iter().enumerate() {
            for (k, &coefficient) in s.coeffs.iter().enumerate() {
                let outcome = s.outcome(k).iter().map(|o| o.to_string()).collect::<Vec<_>>().join("-");
                rows.push(SettingRow {
                    setting: i,
                    outcome,
                    coefficient,
                });
            }
        }
        return Ok(Payload::Csv(csv_rows(&rows)?));
    }
    let mut out = json!({
        "target": args.target,
        "mode": format!("{:?}", args.mode).to_lowercase(),
        "dims": target.op.dims(),
        "epsilon": target.epsilon,
        "settings": local.settings.len(),
        "projectors": d.projectors,
        "lower_bound": d.lower_bound,
        "residual": residual,
        "decomposition": decomposition_to_json(&local),
    });
    if let Some(conv) = args.convention {
        if target.op.parties() != 2 {
            return Err(unsupported("generator coefficients are only defined for bipartite targets"));
        }
        let convention = match conv {
            ConventionArg::Orthonormal => Convention::Orthonormal,
            ConventionArg::Physics => Convention::Physics,
        };
        let lam = expand(&target.op)?.in_convention(convention);
        let rows: Vec<Vec<f64>> = lam.row_iter().map(|r| r.iter().copied().collect()).collect();
        out["coefficients"] = json!({
            "convention": format!("{conv:?}").to_lowercase(),
            "lambda": rows,
        });
    }
    Ok(Payload::Json(out))
}

pub fn montecarlo_curve(
    ds: &[f64],
    samples: usize,
    p_points: usize,
    alpha_bins: usize,
    seed: u64,
    format: Format,
) -> CliResult<Payload> {
    let mut curves = Vec::with_capacity(ds.len());
    for &d in ds {
        curves.push(error_curve(d, samples, p_points, alpha_bins, seed)?);
    }
    Ok(match format {
        Format::Csv => {
            let rows: Vec<CurveRow> = curves.iter().flat_map(|c| c.rows()).collect();
            Payload::Csv(csv_rows(&rows)?)
        }
        Format::Json => Payload::Json(json!({ "curves": curves })),
    })
}

pub fn montecarlo_falserate(ds: &[f64], samples: usize, p_points: usize, seed: u64, format: Format) -> CliResult<Payload> {
    let rates: Vec<FalseSeparableRate> = ds
        .iter()
        .map(|&d| false_separable_rate(d, samples, p_points, seed))
        .collect::<witnesskit::Result<_>>()?;
    Ok(match format {
        Format::Csv => Payload::Csv(csv_rows(&rates)?),
        Format::Json => Payload::Json(json!({ "seed": seed, "samples": samples, "rates": rates })),
    })
}

pub struct SimulateArgs {
    pub state: String,
    pub decomposition: std::path::PathBuf,
    pub shots: u64,
    pub d: Option<f64>,
    pub p: Option<f64>,
}

#[derive(Serialize)]
struct SimVerdict {
    classification: Classification,
    threshold_kind: Option<ThresholdKind>,
    threshold: Option<f64>,
}

/// Accepts the full `decompose` output or a bare decomposition object.
fn load_decomposition(path: &std::path::Path) -> CliResult<LocalDecomposition> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(decomposition_from_json(v.get("decomposition").unwrap_or(&v))?)
}

pub fn simulate(args: &SimulateArgs, seed: u64, format: Format) -> CliResult<Payload> {
    let spec = StateSpec::parse(&args.state)?;
    let rho = spec.build(seed)?;
    let decomp = load_decomposition(&args.decomposition)?;
    // stream 0 of the seed may already have built the state; shots use seed + 1
    let records = simulate_decomposition(&rho, &decomp, args.shots, seed.wrapping_add(1))?;
    if format == Format::Csv {
        let rows: Vec<ShotRow> = records
            .iter()
            .flat_map(|r| r.rows(&decomp.settings[r.setting]))
            .collect();
        return Ok(Payload::Csv(csv_rows(&rows)?));
    }
    let estimate = estimate_from_records(&decomp, &records)?;
    let witness = decomp.recompose();
    let d = args.d.or(spec.noise_radius());
    let verdict = match d {
        Some(d) if is_w0(&witness) => {
            let v = classify(&witness, estimate.value, d, args.p)?;
            SimVerdict {
                classification: v.classification,
                threshold_kind: Some(v.threshold_kind),
                threshold: Some(v.threshold),
            }
        }
        _ => SimVerdict {
            classification: if estimate.value < 0.0 {
                Classification::Entangled
            } else {
                Classification::Inconclusive
            },
            threshold_kind: None,
            threshold: None,
        },
    };
    Ok(Payload::Json(json!({
        "state": args.state,
        "estimate": estimate,
        "exact": rho.expectation(&witness),
        "verdict": verdict,
        "records": records,
    })))
}
