use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use sur_core::entangle::{
    collective_operators, identity_checks, maximally_mixed, random_mixture_for, random_product_for, slater_state,
    witness_mixture, witness_with, Mixture, WitnessReport,
};
use sur_core::matcore::variance;
use sur_core::optimize::{minimize_variance_sum, overlap_with_coherent, overlap_with_saturating, MinimizeOptions};
use sur_core::sur::{
    check_su11_strong, check_sur, random_state_for, sample_observable, saturating_state, sweep, SweepSummary,
};
use sur_core::weights::{algebra_bound, casimir_eigenvalue, sur_bound};
use sur_core::{algebras::weight_basis_state, AlgebraSpec, ComplexMatrix, DynkinLabel, GeneratorSet, StateVector};

use crate::{AlgebraArgs, IdentitiesArgs, MinimizeArgs, SampleArgs, TableArgs, VerifyArgs, WitnessArgs, WitnessState};

const MARGIN: f64 = 1e-9;
const GAP_MAX: f64 = 1e-6;
const SAMPLE_SE: f64 = 5.0;
const SAMPLE_PASS_RATE: f64 = 0.99;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] sur_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// 2 for bad input, 1 for anything that went wrong while running.
    pub fn exit_code(&self) -> u8 {
        use sur_core::Error as E;
        match self {
            CliError::Input(_) => 2,
            CliError::Core(
                E::Parse(_)
                | E::InvalidParameter(_)
                | E::WrongAlgebra { .. }
                | E::SizeCap { .. }
                | E::DimensionMismatch { .. }
                | E::IndexOutOfRange { .. },
            ) => 2,
            _ => 1,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub struct Report {
    pub command: &'static str,
    pub config: Value,
    pub results: Vec<Value>,
    pub summary: Value,
    pub violated: bool,
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

/// Merges `--j`, `--kappa`, `--cutoff` and `--irrep` into the algebra string.
fn resolve_algebra(a: &AlgebraArgs) -> Result<(AlgebraSpec, Option<DynkinLabel>)> {
    let (base, mut irrep) = match a.algebra.split_once(":irrep=") {
        Some((b, i)) => (b.to_string(), Some(i.to_string())),
        None => (a.algebra.clone(), None),
    };
    if a.irrep.is_some() {
        irrep = a.irrep.clone();
    }
    let extra: Vec<String> = [
        a.j.as_ref().map(|j| format!("j={j}")),
        a.kappa.as_ref().map(|k| format!("kappa={k}")),
        a.cutoff.map(|c| format!("cutoff={c}")),
    ]
    .into_iter()
    .flatten()
    .collect();
    let mut text = base;
    if !extra.is_empty() {
        text.push(if text.contains(':') { ',' } else { ':' });
        text.push_str(&extra.join(","));
    }
    let spec: AlgebraSpec = text.parse()?;
    let label = match (irrep, spec) {
        (None, _) => None,
        (Some(i), AlgebraSpec::Sun { n }) => {
            let label: DynkinLabel = i.trim_matches(|c| c == '(' || c == ')').parse()?;
            if label.rank() != n - 1 {
                return Err(CliError::Input(format!("irrep {label} does not have rank {}", n - 1)));
            }
            Some(label)
        }
        (Some(_), other) => return Err(CliError::Input(format!("--irrep applies to su:<n> only, not {other}"))),
    };
    Ok((spec, label))
}

pub fn verify(a: &VerifyArgs) -> Result<Report> {
    let (spec, irrep) = resolve_algebra(&a.algebra)?;
    let gs = spec.build()?;
    let seed = a.common.seed;
    let mut reports = vec![check_sur(&saturating_state(&gs), &gs)?.with_state("saturating", None)];
    reports.extend(sweep(&gs, a.trials, seed)?);
    if let AlgebraSpec::Su11 { .. } = spec {
        reports.push(check_su11_strong(&saturating_state(&gs), &gs)?.with_state("saturating", None));
        for i in 0..a.trials {
            let s = random_state_for(&gs, seed, i as u64);
            reports.push(check_su11_strong(&s, &gs)?.with_state(format!("random:{i}"), Some(seed)));
        }
    }
    let summary = SweepSummary::of(&reports);
    let mut summary_json = json!({
        "reports": summary.trials,
        "bound_exact": algebra_bound(&spec)?.to_string(),
        "min_margin": summary.min_margin,
        "max_margin": summary.max_margin,
        "all_satisfied": summary.all_satisfied,
    });
    if let (Some(label), AlgebraSpec::Sun { n }) = (&irrep, spec) {
        summary_json["irrep"] = json!(label.to_string());
        summary_json["irrep_bound_exact"] = json!(sur_bound(n, label)?.to_string());
    }
    Ok(Report {
        command: "verify",
        config: json!({
            "algebra": spec.to_string(),
            "irrep": irrep.map(|l| l.to_string()),
            "trials": a.trials,
            "seed": seed,
        }),
        results: reports.iter().map(to_value).collect::<Result<_>>()?,
        summary: summary_json,
        violated: !summary.all_satisfied,
    })
}

pub fn minimize(a: &MinimizeArgs) -> Result<Report> {
    let (spec, _) = resolve_algebra(&a.algebra)?;
    if a.restarts == 0 || !(a.tol > 0.0) {
        return Err(CliError::Input("need --restarts >= 1 and --tol > 0".into()));
    }
    let gs = spec.build()?;
    let opts = MinimizeOptions {
        restarts: a.restarts,
        max_iters: a.max_iters,
        tol: a.tol,
        seed: a.common.seed,
    };
    let r = minimize_variance_sum(&gs, &opts)?;
    let mut row = to_value(&r)?;
    if let Value::Object(map) = &mut row {
        map.remove("best_state");
        map.insert("bound_exact".into(), json!(algebra_bound(&spec)?.to_string()));
        map.insert("fidelity_with_saturating".into(), json!(overlap_with_saturating(&gs, &r)));
        map.insert("fidelity_with_coherent".into(), json!(overlap_with_coherent(&gs, &r)?));
    }
    let certified = r.gap >= -MARGIN && r.gap <= GAP_MAX;
    Ok(Report {
        command: "minimize",
        config: json!({
            "algebra": spec.to_string(),
            "restarts": a.restarts,
            "max_iters": a.max_iters,
            "tol": a.tol,
            "seed": a.common.seed,
        }),
        results: vec![row],
        summary: json!({
            "best_value": r.best_value,
            "bound_exact": algebra_bound(&spec)?.to_string(),
            "gap": r.gap,
            "certified": certified,
        }),
        violated: !certified,
    })
}

fn witness_row(label: String, r: &WitnessReport) -> Result<Value> {
    let mut v = to_value(r)?;
    if let Value::Object(map) = &mut v {
        map.shift_insert(0, "state".into(), json!(label));
        map.insert("margin".into(), json!(r.margin()));
        map.insert("total_margin".into(), json!(r.total_margin()));
    }
    Ok(v)
}

pub fn witness(a: &WitnessArgs) -> Result<Report> {
    let n = a.n;
    let particles = a.particles.unwrap_or(n);
    let set = collective_operators(n, particles)?;
    let seed = a.common.seed;
    let reports: Vec<(String, WitnessReport)> = match a.state {
        WitnessState::Slater => {
            if particles != n {
                return Err(CliError::Input(format!("slater state needs N = n = {n}, got N = {particles}")));
            }
            vec![("slater".into(), witness_with(&slater_state(n)?, &set)?)]
        }
        WitnessState::Product => {
            let s = StateVector::basis(set.dim(), 0)?;
            vec![("product:0".into(), witness_with(&s, &set)?)]
        }
        WitnessState::RandomProduct => (0..a.trials)
            .map(|i| {
                let s = random_product_for(n, particles, seed, i as u64);
                Ok((format!("random-product:{i}"), witness_with(&s, &set)?))
            })
            .collect::<Result<_>>()?,
        WitnessState::RandomMixture => (0..a.trials)
            .map(|i| {
                let rho = random_mixture_for(n, particles, None, seed, i as u64);
                Ok((format!("random-mixture:{i}"), witness_mixture(&rho, &set)?))
            })
            .collect::<Result<_>>()?,
        WitnessState::MaxMixed => {
            let rho: Mixture = maximally_mixed(n, particles)?;
            vec![("max-mixed".into(), witness_mixture(&rho, &set)?)]
        }
    };
    let any_violated = reports.iter().any(|(_, r)| r.violated);
    let any_total = reports.iter().any(|(_, r)| r.total_violated);
    let separable = a.state != WitnessState::Slater;
    let min_margin = reports.iter().map(|(_, r)| r.margin()).fold(f64::INFINITY, f64::min);
    let min_total = reports.iter().map(|(_, r)| r.total_margin()).fold(f64::INFINITY, f64::min);
    Ok(Report {
        command: "witness",
        config: json!({
            "n": n,
            "N": particles,
            "state": format!("{:?}", a.state).to_lowercase(),
            "trials": a.trials,
            "seed": seed,
        }),
        results: reports
            .iter()
            .map(|(l, r)| witness_row(l.clone(), r))
            .collect::<Result<_>>()?,
        summary: json!({
            "states": reports.len(),
            "witness_constant": 2 * (n - 1) * particles,
            "total_variance_bound": particles * (n - 1),
            "min_margin": min_margin,
            "min_total_margin": min_total,
            "any_violated": any_violated,
            "any_total_violated": any_total,
            "separable_input": separable,
        }),
        // a separable input must never be flagged
        violated: separable && (any_violated || any_total),
    })
}

pub fn identities(a: &IdentitiesArgs) -> Result<Report> {
    let r = identity_checks(a.n, a.trials, a.common.seed)?;
    Ok(Report {
        command: "identities",
        config: json!({ "n": a.n, "trials": a.trials, "seed": a.common.seed }),
        results: vec![to_value(&r)?],
        summary: json!({ "holds": r.holds }),
        violated: !r.holds,
    })
}

fn observable(gs: &GeneratorSet, name: Option<&str>) -> Result<(String, ComplexMatrix)> {
    if let Some(spin) = gs.spin_components() {
        let index = match name.unwrap_or("Jx") {
            "Jx" => Some(0),
            "Jy" => Some(1),
            "Jz" => Some(2),
            _ => None,
        };
        if let Some(i) = index {
            return Ok((["Jx", "Jy", "Jz"][i].to_string(), spin[i].clone()));
        }
    }
    let names = gs.names();
    let index = match name {
        None => 0,
        Some(n) => names
            .iter()
            .position(|x| x == n)
            .ok_or_else(|| CliError::Input(format!("unknown observable `{n}`; expected one of {names:?}")))?,
    };
    Ok((names[index].clone(), gs.generator(index).clone()))
}

fn sample_state(gs: &GeneratorSet, text: &str, seed: u64) -> Result<StateVector> {
    match text {
        "saturating" => Ok(saturating_state(gs)),
        "random" => Ok(random_state_for(gs, seed, 0)),
        _ => {
            let index = text
                .strip_prefix("basis:")
                .and_then(|i| i.parse().ok())
                .ok_or_else(|| CliError::Input(format!("bad state `{text}`")))?;
            Ok(weight_basis_state(gs, index)?)
        }
    }
}

pub fn sample(a: &SampleArgs) -> Result<Report> {
    let (spec, _) = resolve_algebra(&a.algebra)?;
    if a.repeats == 0 || a.shots < 2 {
        return Err(CliError::Input("need --repeats >= 1 and --shots >= 2".into()));
    }
    let gs = spec.build()?;
    let (name, m) = observable(&gs, a.observable.as_deref())?;
    let s = sample_state(&gs, &a.state, a.common.seed)?;
    let exact = variance(&s, &m)?;
    let mut rows = Vec::with_capacity(a.repeats);
    let mut within = 0;
    for r in 0..a.repeats {
        let seed = a.common.seed.wrapping_add(r as u64);
        let est = sample_observable(&s, &m, a.shots, seed)?;
        let ok = est.within(exact, SAMPLE_SE);
        within += ok as usize;
        let z = if est.standard_error > 0.0 {
            (est.variance - exact) / est.standard_error
        } else {
            0.0
        };
        rows.push(json!({
            "repeat": r,
            "seed": seed,
            "shots": est.shots,
            "mean": est.mean,
            "variance": est.variance,
            "standard_error": est.standard_error,
            "exact_variance": exact,
            "z": z,
            "within_5se": ok,
            "outcomes": est.outcomes,
        }));
    }
    let rate = within as f64 / a.repeats as f64;
    Ok(Report {
        command: "sample",
        config: json!({
            "algebra": spec.to_string(),
            "observable": name,
            "state": a.state,
            "shots": a.shots,
            "repeats": a.repeats,
            "seed": a.common.seed,
        }),
        results: rows,
        summary: json!({
            "exact_variance": exact,
            "within_5se": within,
            "repeats": a.repeats,
            "rate": rate,
        }),
        violated: rate < SAMPLE_PASS_RATE,
    })
}

pub fn table(a: &TableArgs) -> Result<Report> {
    let ns: Vec<usize> = match a.n {
        Some(n) if n >= 2 => vec![n],
        Some(n) => return Err(CliError::Input(format!("need n >= 2, got {n}"))),
        None => (2..=5).collect(),
    };
    let mut rows = Vec::new();
    for &n in &ns {
        for label in DynkinLabel::grid(n - 1, a.max_label) {
            let bound = sur_bound(n, &label)?;
            let c2 = casimir_eigenvalue(n, &label)?;
            rows.push(json!({
                "n": n,
                "label": label.to_string(),
                "bound": bound.to_string(),
                "casimir": c2.to_string(),
                "bound_value": *bound.numer() as f64 / *bound.denom() as f64,
                "casimir_value": *c2.numer() as f64 / *c2.denom() as f64,
            }));
        }
    }
    Ok(Report {
        command: "table",
        config: json!({ "n": ns, "max_label": a.max_label, "seed": a.common.seed }),
        summary: json!({ "rows": rows.len() }),
        results: rows,
        violated: false,
    })
}
