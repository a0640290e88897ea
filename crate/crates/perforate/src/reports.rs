//! JSON views of core results.

use perforate_core::conductivity::{BoundRecord, ConductivityReport, FilledComparison};
use perforate_core::percolation::{ChannelFlow, Crossing, DecayTable, LatticeField};
use perforate_core::process::AdmissibilityReport;
use perforate_core::stats::{EstimatorReport, SurfaceIntensityEstimate};
use perforate_core::Window;
use serde::Serialize;
use serde_json::{json, Value};

pub fn to_pretty(v: &Value) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(v).expect("JSON value serializes");
    out.push(b'\n');
    out
}

fn window(w: &Window) -> Value {
    json!([&w.lo[..w.dim], &w.hi[..w.dim]])
}

fn block(m: &[[f64; 3]; 3], d: usize) -> Vec<Vec<f64>> {
    (0..d).map(|i| m[i][..d].to_vec()).collect()
}

pub fn admissibility(r: &AdmissibilityReport) -> Value {
    json!({
        "min_pair_gap_to_2r": r.min_pair_gap_to_2r.is_finite().then_some(r.min_pair_gap_to_2r),
        "max_cluster_size": r.max_cluster_size,
        "max_cluster_diameter": r.max_cluster_diameter,
        "equidistance_violations": r.equidistance_violations,
    })
}

pub fn conductivity(r: &ConductivityReport) -> Value {
    let d = r.dim;
    json!({
        "dim": d,
        "rule": r.rule,
        "n": r.n,
        "s": r.s,
        "k_scale": r.k_scale,
        "a_hat": block(&r.a_hat, d),
        "eigenvalues": &r.eigenvalues[..d],
        "alpha": r.alpha,
        "kept_fraction": r.kept_fraction,
        "energies": r.energies.iter().map(|(eta, e)| json!({"eta": &eta[..d], "energy": e})).collect::<Vec<_>>(),
        "max_residual": r.max_residual,
        "max_iterations": r.max_iterations,
    })
}

pub fn filled_comparison(c: &FilledComparison) -> Value {
    json!({
        "boolean": conductivity(&c.boolean),
        "filled": conductivity(&c.filled),
        "difference": block(&c.difference, c.boolean.dim),
        "identical_masks": c.identical_masks,
    })
}

pub fn bound(b: &BoundRecord) -> Value {
    json!({"energy": b.energy, "channels": b.channels, "bound": b.bound, "slack": b.slack})
}

fn path_coords(field: &LatticeField, path: &[usize]) -> Vec<Vec<usize>> {
    path.iter().map(|&v| field.coords(v)[..field.dim()].to_vec()).collect()
}

pub fn channels(field: &LatticeField, flow: &ChannelFlow, crossing: Option<&Crossing>, strategies_agree: bool) -> Value {
    json!({
        "dim": field.dim(),
        "n": field.n(),
        "open_vertices": field.open_count(),
        "N": flow.count,
        "L": crossing.map(|c| c.open_count),
        "strategies_agree": strategies_agree,
        "channels": flow.channels.iter().map(|c| path_coords(field, c)).collect::<Vec<_>>(),
        "crossing": crossing.map(|c| path_coords(field, &c.path)),
    })
}

#[derive(Serialize)]
pub struct DecayCsvRow {
    pub m: usize,
    pub hits: usize,
    pub replicas: usize,
    pub p: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

pub fn decay_rows(t: &DecayTable) -> Vec<DecayCsvRow> {
    t.rows
        .iter()
        .map(|r| DecayCsvRow {
            m: r.m,
            hits: r.hits,
            replicas: r.replicas,
            p: r.p,
            ci_lo: r.ci_lo,
            ci_hi: r.ci_hi,
        })
        .collect()
}

pub fn decay_fit(t: &DecayTable) -> Value {
    json!({
        "fit_range": [t.fit_range.0, t.fit_range.1],
        "slope": t.fit.map(|f| f.slope),
        "intercept": t.fit.map(|f| f.intercept),
        "r2": t.fit.map(|f| f.r2),
        "points": t.fit.map(|f| f.points),
    })
}

/// One row of an estimator ladder; `level` is empty for the unthinned
/// process.
#[derive(Serialize)]
pub struct LadderRow {
    pub level: Option<usize>,
    pub estimate: f64,
    pub se: f64,
    pub replicas: usize,
    pub margin: f64,
}

impl LadderRow {
    pub fn from_report(level: Option<usize>, r: &EstimatorReport) -> Self {
        LadderRow {
            level,
            estimate: r.estimate,
            se: r.se,
            replicas: r.replicas,
            margin: r.margin,
        }
    }

    pub fn from_surface(level: Option<usize>, r: &SurfaceIntensityEstimate) -> Self {
        LadderRow {
            level,
            estimate: r.estimate,
            se: r.se,
            replicas: r.replicas,
            margin: r.margin,
        }
    }
}

pub fn estimator(r: &EstimatorReport) -> Value {
    json!({
        "estimate": r.estimate,
        "se": r.se,
        "replicas": r.replicas,
        "window": window(&r.window),
        "margin": r.margin,
    })
}

pub fn surface(r: &SurfaceIntensityEstimate) -> Value {
    json!({
        "estimate": r.estimate,
        "se": r.se,
        "replicas": r.replicas,
        "window": window(&r.window),
        "margin": r.margin,
        "arcs_total": r.arcs_total,
        "arcs_counted": r.arcs_counted,
        "island_arcs": r.island_arcs,
        "tangencies": r.tangencies,
    })
}
