//! Replica-parallel versions of the core Monte Carlo estimators.
//!
//! Replica `i` always uses substream `i` of the master seed and results are
//! collected in replica order, so every function here returns exactly what
//! its serial counterpart in `perforate_core` returns.

use perforate_core::percolation::{
    blocked_diameter_replica, crossing_replica, CrossingRow, DecayTable, LatticeParams, DEFAULT_FIT_RANGE,
};
use perforate_core::stats::{
    point_count_replica, surface_intensity_replica, vacancy_replica, CountPair, EstimatorReport,
    SurfaceIntensityEstimate,
};
use perforate_core::{Error, GeometryParams, ProcessParams, Result, ThinningLevel, Window};
use rayon::prelude::*;

fn replicas_par<T: Send>(replicas: usize, f: impl Fn(u64) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    (0..replicas as u64).into_par_iter().map(f).collect()
}

pub fn point_counts(
    window: &Window,
    process: &ProcessParams,
    geometry: &GeometryParams,
    level: Option<ThinningLevel>,
    replicas: usize,
) -> Result<Vec<CountPair>> {
    replicas_par(replicas, |i| point_count_replica(window, process, geometry, level, i))
}

pub fn point_intensity(
    window: &Window,
    process: &ProcessParams,
    geometry: &GeometryParams,
    level: Option<ThinningLevel>,
    replicas: usize,
) -> Result<EstimatorReport> {
    let margin = perforate_core::stats::thinning_margin(geometry, level, 0.0);
    let inner = window.shrink(margin);
    if (0..inner.dim).any(|k| inner.side(k) <= 0.0) {
        return Err(Error::InvalidParameter {
            name: "window",
            reason: "too small for the boundary margin".into(),
        });
    }
    let vol = inner.volume();
    let counts = point_counts(window, process, geometry, level, replicas)?;
    let samples = counts.iter().map(|c| c.kept as f64 / vol).collect();
    Ok(EstimatorReport::from_samples(samples, inner, margin))
}

pub fn vacancy(
    window: &Window,
    process: &ProcessParams,
    geometry: &GeometryParams,
    level: Option<ThinningLevel>,
    filled: bool,
    replicas: usize,
) -> Result<EstimatorReport> {
    let out = replicas_par(replicas, |i| vacancy_replica(window, process, geometry, level, filled, i))?;
    let margin = out.iter().map(|&(_, m)| m).fold(0.0, f64::max);
    let samples = out.into_iter().map(|(v, _)| v).collect();
    Ok(EstimatorReport::from_samples(samples, window.shrink(margin), margin))
}

pub fn surface_intensity(
    window: &Window,
    process: &ProcessParams,
    geometry: &GeometryParams,
    level: Option<ThinningLevel>,
    replicas: usize,
) -> Result<SurfaceIntensityEstimate> {
    if process.dim != 2 {
        return Err(Error::UnsupportedDimension {
            op: "surface_intensity",
            dim: process.dim,
            supported: "2",
        });
    }
    let out = replicas_par(replicas, |i| surface_intensity_replica(window, process, geometry, level, i))?;
    let samples: Vec<f64> = out.iter().map(|o| o.0).collect();
    let parts: Vec<_> = out.iter().map(|o| o.1).collect();
    let inners: Vec<_> = out.iter().map(|o| o.2).collect();
    Ok(SurfaceIntensityEstimate::from_replicas(window, &samples, &parts, &inners))
}

pub fn blocked_diameters(
    process: &ProcessParams,
    geometry: &GeometryParams,
    lattice: &LatticeParams,
    replicas: usize,
) -> Result<Vec<f64>> {
    replicas_par(replicas, |i| blocked_diameter_replica(process, geometry, lattice, i))
}

pub fn blocked_diameter_stats(
    process: &ProcessParams,
    geometry: &GeometryParams,
    lattice: &LatticeParams,
    replicas: usize,
    m_max: usize,
) -> Result<DecayTable> {
    let d = blocked_diameters(process, geometry, lattice, replicas)?;
    Ok(DecayTable::from_diameters(&d, m_max, DEFAULT_FIT_RANGE))
}

pub fn crossing_probability(
    process: &ProcessParams,
    geometry: &GeometryParams,
    k_scale: usize,
    ns: &[usize],
    c1: f64,
    replicas: usize,
) -> Result<Vec<CrossingRow>> {
    ns.iter()
        .map(|&n| {
            let lattice = LatticeParams::new(k_scale, n)?;
            let l = replicas_par(replicas, |i| crossing_replica(process, geometry, &lattice, i))?;
            let hits = l.iter().filter(|&&l| l as f64 <= c1 * n as f64).count();
            Ok(CrossingRow::from_hits(n, hits, replicas))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use perforate_core::{percolation, stats};

    fn setup() -> (Window, ProcessParams, GeometryParams) {
        (
            Window::square(0.0, 12.0),
            ProcessParams::new(1.0, 9, 2).unwrap(),
            GeometryParams::new(0.3).unwrap(),
        )
    }

    #[test]
    fn matches_serial_estimators() {
        let (w, p, g) = setup();
        let lvl = Some(ThinningLevel::new(3).unwrap());
        assert_eq!(
            point_intensity(&w, &p, &g, lvl, 6).unwrap(),
            stats::estimate_point_intensity(&w, &p, &g, lvl, 6).unwrap()
        );
        assert_eq!(
            vacancy(&w, &p, &g, None, true, 4).unwrap(),
            stats::estimate_vacancy(&w, &p, &g, None, true, 4).unwrap()
        );
        assert_eq!(
            surface_intensity(&w, &p, &g, lvl, 4).unwrap(),
            stats::estimate_surface_intensity(&w, &p, &g, lvl, 4).unwrap()
        );
        let lat = LatticeParams::new(11, 12).unwrap();
        assert_eq!(
            blocked_diameter_stats(&p, &g, &lat, 20, 8).unwrap(),
            percolation::blocked_diameter_stats(&p, &g, &lat, 20, 8).unwrap()
        );
        assert_eq!(
            crossing_probability(&p, &g, 11, &[4, 8], 0.5, 10).unwrap(),
            percolation::crossing_probability(&p, &g, 11, &[4, 8], 0.5, 10).unwrap()
        );
    }
}
