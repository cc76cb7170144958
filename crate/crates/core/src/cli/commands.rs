use std::path::Path;

use serde_json::{json, Value};

use super::config::{ExperimentConfig, FamilyKind, Format, MethodKind, Params, SparsifierKind};
use super::{CliError, Outcome, Payload, EXIT_INVALID, EXIT_OK};
use crate::error::Error;
use crate::expanders::{
    box_space, cheeger, decay_experiment, family, projection_approximant, spectrum, FamilySpec, Method, Multigraph,
    CHEEGER_CAP,
};
use crate::io;
use crate::scalar::{cast, from_usize};
use num_rational::BigRational;
use crate::operators::{
    localize_vector, localized_ratio_with, opa_estimate, random_band_operator, FiberedOperator,
};
use crate::space::{FiniteMetricSpace, SupportMode, DEFAULT_CLIQUE_CAP};
use crate::sparsify::{
    best_decomposition, game_value, verify_decomposition, GridSparsifier, IntervalSparsifier, Sparsifier,
    EXACT_GAME_CAP, ORACLE_CAP,
};

type Result<T> = std::result::Result<T, CliError>;

const CAP_VAR: &str = "NORMLOC_CAP";

pub(super) fn execute(cfg: &ExperimentConfig) -> Result<Outcome> {
    let p = &cfg.params;
    let words: Vec<&str> = cfg.command.split_whitespace().collect();
    if cfg.format == Format::Csv && !matches!(words.as_slice(), ["onl", "estimate"] | ["expander", "decay"]) {
        return Err(CliError::Invalid(format!("command {:?} has no CSV form", cfg.command)));
    }
    Ok(match words.as_slice() {
        ["space", "validate"] => space_validate(p)?,
        ["space", "build"] => space_build(p, cfg.seed)?,
        ["sparsify", "run"] => sparsify_run(p)?,
        ["sparsify", "verify"] => sparsify_verify(p)?,
        ["sparsify", "oracle"] => sparsify_oracle(p)?,
        ["sparsify", "game"] => sparsify_game(p)?,
        ["onl", "localize"] => onl_localize(p, cfg.seed)?,
        ["onl", "estimate"] => onl_estimate(p, cfg.seed, cfg.format)?,
        ["expander", "report"] => expander_report(p, cfg.seed)?,
        ["expander", "decay"] => expander_decay(p, cfg.seed, cfg.format)?,
        _ => return Err(CliError::Invalid(format!("unknown command {:?}", cfg.command))),
    })
}

fn need<T: Clone>(v: &Option<T>, name: &str) -> Result<T> {
    v.clone().ok_or_else(|| CliError::Invalid(format!("missing parameter `{name}`")))
}

fn need_seed(seed: Option<u64>) -> Result<u64> {
    seed.ok_or_else(|| CliError::Invalid("this command is randomized and needs `seed`".into()))
}

/// Cap for exhaustive searches, overridable through the environment.
fn cap(default: usize) -> Result<usize> {
    match std::env::var(CAP_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| CliError::Invalid(format!("{CAP_VAR}={v:?} is not a count"))),
        Err(_) => Ok(default),
    }
}

fn json(v: Value) -> Outcome {
    Outcome { payload: Payload::Json(v), exit: EXIT_OK }
}

fn space(p: &Params) -> Result<FiniteMetricSpace<f64>> {
    Ok(io::read_space(&need(&p.space, "space")?)?)
}

fn space_validate(p: &Params) -> Result<Outcome> {
    let path = need(&p.space, "space")?;
    let checked = io::read_space(&path).and_then(|s| s.validate().map(|_| s));
    Ok(match checked {
        Ok(s) => json(json!({
            "valid": true,
            "n": s.len(),
            "diameter": s.diameter_all(),
            "integral": s.is_integral(),
        })),
        Err(e @ (Error::InvalidMetric(_) | Error::DisconnectedGraph(..))) => Outcome {
            payload: Payload::Json(json!({ "valid": false, "error": e.to_string() })),
            exit: EXIT_INVALID,
        },
        Err(e) => return Err(e.into()),
    })
}

fn graphs(p: &Params, seed: Option<u64>) -> Result<(Vec<Multigraph>, Option<FamilySpec>)> {
    if let Some(path) = &p.graph {
        if p.family.is_some() {
            return Err(CliError::Invalid("give either `graph` or `family`".into()));
        }
        return Ok((vec![io::read_graph(path)?], None));
    }
    let spec = family_spec(p, seed)?;
    Ok((family(&spec)?, Some(spec)))
}

fn family_spec(p: &Params, seed: Option<u64>) -> Result<FamilySpec> {
    let sizes = || need(&p.sizes, "sizes");
    Ok(match need(&p.family, "family")? {
        FamilyKind::Cycles => FamilySpec::Cycles { sizes: sizes()? },
        FamilyKind::Paths => FamilySpec::Paths { sizes: sizes()? },
        FamilyKind::Complete => FamilySpec::Complete { sizes: sizes()? },
        FamilyKind::Torus => FamilySpec::Torus { sides: sizes()?.into_iter().map(|s| (s, s)).collect() },
        FamilyKind::RandomRegular => FamilySpec::RandomRegular {
            degree: need(&p.degree, "degree")?,
            sizes: sizes()?,
            seed: need_seed(seed)?,
        },
        FamilyKind::Sl2 => FamilySpec::Sl2 { primes: need(&p.primes, "primes")? },
    })
}

fn space_build(p: &Params, seed: Option<u64>) -> Result<Outcome> {
    let (gs, _) = graphs(p, seed)?;
    let (space, blocks) = box_space::<f64>(&gs, &p.scale.unwrap_or(1.0))?;
    let mut v = io::space_json(&space);
    v["blocks"] = json!(blocks.iter().map(|b| [b.start, b.end]).collect::<Vec<_>>());
    Ok(json(v))
}

fn sparsify_run(p: &Params) -> Result<Outcome> {
    let x = space(p)?;
    let mu = io::read_measure(&need(&p.measure, "measure")?)?;
    let m = need(&p.m, "m")?;
    let kind = match p.sparsifier {
        Some(k) => k,
        None if x.is_path_metric() => SparsifierKind::Interval,
        None if x.grid_shape().is_some() => SparsifierKind::Grid,
        None => return Err(CliError::Invalid("no default sparsifier for this space; use `oracle`".into())),
    };
    let (name, decomposition, c, dmax) = match kind {
        SparsifierKind::Interval | SparsifierKind::Grid => {
            let k = need(&p.k, "k")?;
            let s: Box<dyn Sparsifier<f64>> = match kind {
                SparsifierKind::Interval => Box::new(IntervalSparsifier { k }),
                _ => Box::new(GridSparsifier { k }),
            };
            (s.name(), s.sparsify(&x, &mu, m)?, s.constant(), s.diameter_bound(m))
        }
        SparsifierKind::Oracle => {
            let radius = need(&p.radius, "R")?;
            let (d, ratio) = best_decomposition(&x, &mu, &(m as f64), &radius, cap(ORACLE_CAP)?)?;
            ("oracle".to_string(), d, ratio, radius)
        }
    };
    let report = verify_decomposition(&x, &decomposition, &mu, &(m as f64), &dmax, &c)?;
    Ok(Outcome {
        exit: if report.passes() { EXIT_OK } else { EXIT_INVALID },
        payload: Payload::Json(json!({
            "sparsifier": name,
            "c": c,
            "f_m": dmax,
            "decomposition": io::decomposition_json(&decomposition, &mu),
            "report": report,
        })),
    })
}

fn sparsify_verify(p: &Params) -> Result<Outcome> {
    let x = space(p)?;
    let mu = io::read_measure(&need(&p.measure, "measure")?)?;
    let d = io::read_decomposition(&need(&p.decomposition, "decomposition")?, &x)?;
    let report = verify_decomposition(&x, &d, &mu, &(need(&p.m, "m")? as f64), &need(&p.dmax, "dmax")?, &need(&p.c, "c")?)?;
    Ok(Outcome {
        exit: if report.passes() { EXIT_OK } else { EXIT_INVALID },
        payload: Payload::Json(json!({ "passes": report.passes(), "report": report })),
    })
}

fn sparsify_oracle(p: &Params) -> Result<Outcome> {
    let x = space(p)?;
    let mu = io::read_measure(&need(&p.measure, "measure")?)?;
    let (d, ratio) = best_decomposition(&x, &mu, &(need(&p.m, "m")? as f64), &need(&p.radius, "R")?, cap(ORACLE_CAP)?)?;
    Ok(json(json!({ "ratio": ratio, "decomposition": io::decomposition_json(&d, &mu) })))
}

fn sparsify_game(p: &Params) -> Result<Outcome> {
    let x = space(p)?;
    let (m, radius, cap) = (need(&p.m, "m")?, need(&p.radius, "R")?, cap(EXACT_GAME_CAP)?);
    if x.len() <= cap {
        // Solved in exact arithmetic; the file's distances convert exactly.
        let g = game_value(&x.cast::<BigRational>(), &from_usize(m), &cast(radius), cap)?;
        return Ok(json(io::game_json(&g)));
    }
    let g = game_value(&x, &(m as f64), &radius, cap)?;
    Ok(json(io::game_json(&g)))
}

fn operator(p: &Params, x: &FiniteMetricSpace<f64>, seed: Option<u64>) -> Result<(FiberedOperator<f64>, Option<u64>)> {
    match (&p.operator, p.r) {
        (Some(path), None) => Ok((io::read_operator(path)?, None)),
        (None, Some(r)) => {
            let seed = need_seed(seed)?;
            Ok((random_band_operator(x, &r, p.h.unwrap_or(1), seed, 1.0)?, Some(seed)))
        }
        _ => Err(CliError::Invalid("give exactly one of `operator` or `r` (random band operator)".into())),
    }
}

fn onl_localize(p: &Params, seed: Option<u64>) -> Result<Outcome> {
    let x = space(p)?;
    let (op, op_seed) = operator(p, &x, seed)?;
    let report = match (p.m, p.radius) {
        (Some(m), None) => {
            let k = need(&p.k, "k")?;
            let s: Box<dyn Sparsifier<f64>> = if x.is_path_metric() {
                Box::new(IntervalSparsifier { k })
            } else if x.grid_shape().is_some() {
                Box::new(GridSparsifier { k })
            } else {
                return Err(CliError::Invalid("`m` needs a path or grid space; use `R` instead".into()));
            };
            localize_vector(&x, &op, m, s.as_ref(), None)?
        }
        (None, Some(radius)) => {
            let mode = if p.ball { SupportMode::Balls } else { SupportMode::Cliques };
            localized_ratio_with(&x, &op, &radius, mode, DEFAULT_CLIQUE_CAP)?
        }
        _ => return Err(CliError::Invalid("give exactly one of `m` or `R`".into())),
    };
    let mut v = io::report_json(&report);
    v["propagation"] = json!(op.propagation(&x)?);
    v["operator_seed"] = json!(op_seed);
    Ok(json(v))
}

fn onl_estimate(p: &Params, seed: Option<u64>, format: Format) -> Result<Outcome> {
    let x = space(p)?;
    let seed = need_seed(seed)?;
    let est = opa_estimate(&x, &need(&p.r, "r")?, &need(&p.radius, "R")?, need(&p.trials, "trials")?, seed, p.h.unwrap_or(1))?;
    Ok(match format {
        Format::Csv => Outcome {
            exit: EXIT_OK,
            payload: Payload::Table {
                header: vec!["trial".into(), "seed".into(), "ratio".into()],
                rows: est
                    .ratios
                    .iter()
                    .enumerate()
                    .map(|(i, r)| vec![i.to_string(), seed.wrapping_add(i as u64).to_string(), r.to_string()])
                    .collect(),
            },
        },
        Format::Json => json(json!({
            "value": est.value,
            "worst_index": est.worst_index,
            "worst_seed": est.worst_seed,
            "ratios": est.ratios,
        })),
    })
}

fn method(p: &Params) -> Method {
    match p.method {
        Some(MethodKind::Heat) => Method::Heat,
        _ => Method::Chebyshev,
    }
}

fn expander_report(p: &Params, seed: Option<u64>) -> Result<Outcome> {
    let (gs, _) = graphs(p, seed)?;
    let cheeger_cap = cap(CHEEGER_CAP)?;
    let mut rows = Vec::with_capacity(gs.len());
    for (i, g) in gs.iter().enumerate() {
        let spec = match spectrum::<f64>(g, false) {
            Ok(s) => Some(s),
            Err(Error::AllZero) => None,
            Err(e) => return Err(e.into()),
        };
        let h = if g.len() >= 2 && g.len() <= cheeger_cap {
            let c = cheeger(g, cheeger_cap)?;
            json!({
                "numer": c.value.numer(),
                "denom": c.value.denom(),
                "value": *c.value.numer() as f64 / *c.value.denom() as f64,
                "disconnected": c.disconnected,
            })
        } else {
            Value::Null
        };
        let approximant = match p.eps {
            Some(eps) if g.is_connected() => {
                let a = projection_approximant::<f64>(g, eps, method(p))?;
                json!({ "degree": a.degree, "certificate": a.certificate })
            }
            _ => Value::Null,
        };
        rows.push(json!({
            "index": i,
            "vertices": g.len(),
            "max_degree": g.max_degree(),
            "components": g.components(),
            "lambda1": spec.as_ref().map(|s| s.lambda1),
            "lambda_max": spec.as_ref().map(|s| s.lambda_max()),
            "cheeger": h,
            "approximant": approximant,
        }));
    }
    Ok(json(json!({ "graphs": rows })))
}

const DECAY_COLUMNS: [&str; 10] =
    ["index", "vertices", "lambda1", "degree", "certificate", "norm", "ratio", "s_r", "bound", "seed"];

fn expander_decay(p: &Params, seed: Option<u64>, format: Format) -> Result<Outcome> {
    let spec = family_spec(p, seed)?;
    let rows = decay_experiment::<f64>(&spec, &need(&p.radius, "R")?, need(&p.eps, "eps")?, method(p))?;
    let opt = |v: Option<String>| v.unwrap_or_default();
    Ok(match format {
        Format::Csv => Outcome {
            exit: EXIT_OK,
            payload: Payload::Table {
                header: DECAY_COLUMNS.iter().map(|s| s.to_string()).collect(),
                rows: rows
                    .iter()
                    .map(|r| {
                        vec![
                            r.index.to_string(),
                            r.vertices.to_string(),
                            opt(r.lambda1.map(|l| l.to_string())),
                            r.degree.to_string(),
                            r.certificate.to_string(),
                            r.norm.to_string(),
                            r.ratio.to_string(),
                            r.s_r.to_string(),
                            r.bound.to_string(),
                            opt(r.seed.map(|s| s.to_string())),
                        ]
                    })
                    .collect(),
            },
        },
        Format::Json => json(json!({
            "rows": rows
                .iter()
                .map(|r| json!({
                    "index": r.index,
                    "vertices": r.vertices,
                    "lambda1": r.lambda1,
                    "degree": r.degree,
                    "certificate": r.certificate,
                    "norm": r.norm,
                    "ratio": r.ratio,
                    "s_r": r.s_r,
                    "bound": r.bound,
                    "seed": r.seed,
                }))
                .collect::<Vec<_>>(),
        })),
    })
}

pub(super) fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
}
