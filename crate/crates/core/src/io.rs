//! File formats: spaces, graphs, measures, decompositions and operators.
//!
//! Operators are stored either as JSON `{"n","h","tau","data"}` with `data`
//! row-major, or in a binary layout: the magic `NLOP`, `n` and `h` as
//! little-endian `u64`, `τ` as little-endian `f64`, then the `nh × nh`
//! table row-major as little-endian `f64`.

use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::expanders::Multigraph;
use crate::operators::{FiberedOperator, LocalizationParams, LocalizationReport, ReportMode};
use crate::scalar::{to_f64, Scalar};
use crate::space::{build_graph_space, FiniteMetricSpace, Measure, Subset};
use crate::sparsify::{ClusterDecomposition, GameResult};

const OPERATOR_MAGIC: &[u8; 4] = b"NLOP";

/// Exactly one of `edges` (with `n`), `dist`, `path` or `grid` is set.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceFile {
    n: Option<usize>,
    edges: Option<Vec<(usize, usize, u32)>>,
    dist: Option<Vec<Vec<f64>>>,
    path: Option<usize>,
    grid: Option<(usize, usize)>,
    labels: Option<Vec<String>>,
}

pub fn parse_space(text: &str) -> Result<FiniteMetricSpace<f64>> {
    let f: SpaceFile = serde_json::from_str(text)?;
    let given = [f.edges.is_some(), f.dist.is_some(), f.path.is_some(), f.grid.is_some()];
    if given.iter().filter(|g| **g).count() != 1 {
        return Err(Error::Format("space needs exactly one of \"edges\", \"dist\", \"path\", \"grid\"".into()));
    }
    let space = if let Some(edges) = f.edges {
        let n = f.n.ok_or_else(|| Error::Format("edge-list space needs \"n\"".into()))?;
        build_graph_space(n, &edges)?
    } else if let Some(dist) = f.dist {
        if f.n.is_some_and(|n| n != dist.len()) {
            return Err(Error::Format("\"n\" disagrees with the distance table".into()));
        }
        FiniteMetricSpace::from_distances(dist)?
    } else if let Some(n) = f.path {
        FiniteMetricSpace::path(n)?
    } else {
        let (r, c) = f.grid.expect("one field set");
        FiniteMetricSpace::grid(r, c)?
    };
    match f.labels {
        Some(labels) => space.with_labels(labels),
        None => Ok(space),
    }
}

pub fn read_space(path: &Path) -> Result<FiniteMetricSpace<f64>> {
    parse_space(&std::fs::read_to_string(path)?)
}

pub fn space_json(space: &FiniteMetricSpace<f64>) -> Value {
    let mut v = json!({ "n": space.len(), "dist": space.distance_rows() });
    if let Some(labels) = space.labels() {
        v["labels"] = json!(labels);
    }
    v
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    n: usize,
    edges: Vec<(usize, usize, u32)>,
}

pub fn parse_graph(text: &str) -> Result<Multigraph> {
    let g: GraphFile = serde_json::from_str(text)?;
    Multigraph::new(g.n, &g.edges)
}

pub fn read_graph(path: &Path) -> Result<Multigraph> {
    parse_graph(&std::fs::read_to_string(path)?)
}

pub fn graph_json(g: &Multigraph) -> Value {
    json!({ "n": g.len(), "edges": g.edges() })
}

/// A JSON array of nonnegative weights.
pub fn parse_measure(text: &str) -> Result<Measure<f64>> {
    Measure::new(serde_json::from_str(text)?)
}

pub fn read_measure(path: &Path) -> Result<Measure<f64>> {
    parse_measure(&std::fs::read_to_string(path)?)
}

#[derive(Debug, Deserialize)]
struct DecompositionFile {
    clusters: Vec<Vec<usize>>,
}

/// Reads the `clusters` field; the other recorded fields are recomputed.
pub fn parse_decomposition(text: &str, space: &FiniteMetricSpace<f64>) -> Result<ClusterDecomposition<f64>> {
    let f: DecompositionFile = serde_json::from_str(text)?;
    let clusters = f
        .clusters
        .into_iter()
        .map(|c| Subset::new(space.len(), c))
        .collect::<Result<Vec<_>>>()?;
    ClusterDecomposition::new(space, clusters)
}

pub fn read_decomposition(path: &Path, space: &FiniteMetricSpace<f64>) -> Result<ClusterDecomposition<f64>> {
    parse_decomposition(&std::fs::read_to_string(path)?, space)
}

pub fn decomposition_json(d: &ClusterDecomposition<f64>, mu: &Measure<f64>) -> Value {
    let total = *mu.total();
    json!({
        "clusters": d.clusters(),
        "separation": d.separation(),
        "max_diam": d.max_diameter(),
        "mass_ratio": if total > 0.0 { d.mass(mu) / total } else { 0.0 },
    })
}

pub fn game_json<S: Scalar>(g: &GameResult<S>) -> Value {
    let sets: Vec<Value> = g
        .sets
        .iter()
        .map(|s| json!({ "set": s.set, "mass": to_f64(&s.mass), "weight": to_f64(&s.weight) }))
        .collect();
    json!({
        "value": to_f64(&g.value),
        "lower": to_f64(&g.lower),
        "mu_star": g.mu_star,
        "sets": sets,
        "mode": g.mode,
        "tolerance": g.tolerance,
    })
}

pub fn report_json(r: &LocalizationReport<f64>) -> Value {
    let mode = match r.mode {
        ReportMode::Clique => "clique",
        ReportMode::Ball => "ball",
        ReportMode::Sparsifier => "sparsifier",
    };
    let params = match &r.params {
        LocalizationParams::Support { radius } => json!({ "R": radius }),
        LocalizationParams::Sparsifier { m, name, constant, diameter_bound } => {
            json!({ "m": m, "sparsifier": name, "c": constant, "diameter_bound": diameter_bound })
        }
    };
    let chain = r.chain.as_ref().map(|c| {
        json!({
            "enlarged": c.enlarged,
            "projected": c.projected,
            "cluster_mass": c.cluster_mass,
            "c": c.constant,
            "total_mass": c.total_mass,
            "start_ratio": c.start_ratio,
            "holds": c.holds(),
        })
    });
    json!({
        "ratio": r.ratio,
        "norm": r.norm,
        "support": r.support,
        "support_diameter": r.support_diameter,
        "h": r.fiber_dim,
        "mode": mode,
        "params": params,
        "chain": chain,
        "witness": r.witness.data().as_slice(),
    })
}

pub fn operator_json(op: &FiberedOperator<f64>) -> Value {
    let m = op.matrix();
    let data: Vec<f64> = (0..m.nrows()).flat_map(|i| (0..m.ncols()).map(move |j| m[(i, j)])).collect();
    json!({ "n": op.points(), "h": op.fiber_dim(), "tau": op.tau(), "data": data })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperatorFile {
    n: usize,
    h: usize,
    tau: Option<f64>,
    data: Vec<f64>,
}

pub fn parse_operator_json(text: &str) -> Result<FiberedOperator<f64>> {
    let f: OperatorFile = serde_json::from_str(text)?;
    build_operator(f.n, f.h, f.tau, f.data)
}

fn build_operator(n: usize, h: usize, tau: Option<f64>, data: Vec<f64>) -> Result<FiberedOperator<f64>> {
    let dim = n * h;
    if data.len() != dim * dim {
        return Err(Error::Format(format!("operator table has {} entries, expected {}", data.len(), dim * dim)));
    }
    if data.iter().any(|x| !x.is_finite()) {
        return Err(Error::Format("operator table has non-finite entries".into()));
    }
    let op = FiberedOperator::new(n, h, DMatrix::from_row_slice(dim, dim, &data))?;
    Ok(match tau {
        Some(t) if t >= 0.0 => op.with_tau(t),
        Some(_) => return Err(Error::Format("negative tolerance".into())),
        None => op,
    })
}

pub fn write_operator_binary<W: Write>(op: &FiberedOperator<f64>, mut w: W) -> Result<()> {
    w.write_all(OPERATOR_MAGIC)?;
    w.write_all(&(op.points() as u64).to_le_bytes())?;
    w.write_all(&(op.fiber_dim() as u64).to_le_bytes())?;
    w.write_all(&op.tau().to_le_bytes())?;
    let m = op.matrix();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            w.write_all(&m[(i, j)].to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_operator_binary<R: Read>(mut r: R) -> Result<FiberedOperator<f64>> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() < 28 || &bytes[..4] != OPERATOR_MAGIC {
        return Err(Error::Format("missing operator header".into()));
    }
    let word = |at: usize| -> [u8; 8] { bytes[at..at + 8].try_into().expect("8 bytes") };
    let n = u64::from_le_bytes(word(4)) as usize;
    let h = u64::from_le_bytes(word(12)) as usize;
    let tau = f64::from_le_bytes(word(20));
    let body = &bytes[28..];
    if body.len() % 8 != 0 {
        return Err(Error::Format("truncated operator table".into()));
    }
    let data = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
    build_operator(n, h, Some(tau), data)
}

/// Binary if the file starts with the operator magic, JSON otherwise.
pub fn read_operator(path: &Path) -> Result<FiberedOperator<f64>> {
    let bytes = std::fs::read(path)?;
    if bytes.starts_with(OPERATOR_MAGIC) {
        read_operator_binary(bytes.as_slice())
    } else {
        parse_operator_json(std::str::from_utf8(&bytes).map_err(|e| Error::Format(e.to_string()))?)
    }
}
