use std::sync::Arc;

use perforate_core::linalg::CgConfig;
use perforate_core::pde::{
    build_perforated_grid, solve_eps, solve_homogenized, CellKind, EpsScenario, FaceKind, HomogenizedCoefficients,
    InitialScaling, PdeParams, SolverConfig,
};
use perforate_core::process::{sample_poisson, ProcessParams};
use perforate_core::{GeometryParams, PointCloud, ThinningLevel, Window};

fn scenario(cloud: PointCloud, eps: f64, cells_per_unit: usize) -> EpsScenario {
    EpsScenario {
        eps,
        cloud,
        geometry: GeometryParams::new(0.3).unwrap(),
        level: ThinningLevel::new(5).unwrap(),
        cells_per_unit,
        dt: 1e-2,
    }
}

fn bump(x: &[f64; 2]) -> f64 {
    1.0 + (std::f64::consts::PI * x[0]).cos() * (std::f64::consts::PI * x[1]).cos()
}

#[test]
fn constant_state_is_preserved() {
    let q = Window::square(0.0, 1.0);
    let params = PdeParams::heat(q, 0.2, Arc::new(|_| 2.5));
    let sc = scenario(PointCloud::empty(Window::square(-10.0, 20.0)), 0.25, 16);
    let grid = build_perforated_grid(&sc, &q).unwrap();
    let sol = solve_eps(&grid, &params, &sc, &SolverConfig::default()).unwrap();
    for u in &sol.snapshots {
        assert!(u.iter().all(|&v| (v - 2.5).abs() < 1e-13));
    }
    let hom = solve_homogenized(&HomogenizedCoefficients::identity(), &params, 16, 1e-2, InitialScaling::Plain, &SolverConfig::default())
        .unwrap();
    assert!(hom.snapshots.last().unwrap().iter().all(|&v| (v - 2.5).abs() < 1e-13));
}

#[test]
fn hole_faces_separate_fluid_from_holes() {
    let q = Window::square(0.0, 1.0);
    let cloud = sample_poisson(&Window::square(-10.0, 20.0), &ProcessParams::new(1.0, 4, 2).unwrap()).unwrap();
    let sc = scenario(cloud, 0.125, 64);
    let grid = build_perforated_grid(&sc, &q).unwrap();
    assert!(grid.hole_count() > 0);
    let mut robin = 0;
    for f in grid.faces() {
        match f.kind {
            FaceKind::HoleRobin => {
                robin += 1;
                assert_eq!(grid.kinds[f.a], CellKind::Fluid);
                assert_eq!(grid.kinds[f.b.unwrap()], CellKind::Hole);
            }
            FaceKind::Interior => {
                assert_eq!(grid.kinds[f.a], CellKind::Fluid);
                assert_eq!(grid.kinds[f.b.unwrap()], CellKind::Fluid);
            }
            FaceKind::OuterNeumann => assert!(f.b.is_none()),
        }
    }
    // Re-scan: every fluid/hole neighbor pair is a Robin face.
    let mut pairs = 0;
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let c = grid.index(i, j);
            for d in [(i + 1 < grid.nx).then(|| grid.index(i + 1, j)), (j + 1 < grid.ny).then(|| grid.index(i, j + 1))]
                .into_iter()
                .flatten()
            {
                if grid.kinds[c] != grid.kinds[d] {
                    pairs += 1;
                }
            }
        }
    }
    assert_eq!(robin, pairs);
}

#[test]
fn positive_robin_flux_adds_mass() {
    let q = Window::square(0.0, 1.0);
    let cloud = sample_poisson(&Window::square(-10.0, 20.0), &ProcessParams::new(1.0, 4, 2).unwrap()).unwrap();
    let sc = scenario(cloud, 0.125, 64);
    let grid = build_perforated_grid(&sc, &q).unwrap();
    let mut params = PdeParams::heat(q, 0.1, Arc::new(|_| 0.0));
    params.h = Arc::new(|_| 1.0);
    let sol = solve_eps(&grid, &params, &sc, &SolverConfig::default()).unwrap();
    assert!(sol.mass.windows(2).all(|m| m[1] > m[0]));
    params.h = Arc::new(|_| -1.0);
    let sol = solve_eps(&grid, &params, &sc, &SolverConfig::default()).unwrap();
    assert!(sol.mass.windows(2).all(|m| m[1] < m[0]));
}

#[test]
fn source_changes_mass_by_its_integral() {
    let q = Window::square(0.0, 1.0);
    let mut params = PdeParams::heat(q, 0.2, Arc::new(bump));
    params.f = Arc::new(|t, x| (1.0 + t) * x[0]);
    let coeffs = HomogenizedCoefficients {
        c1: 0.7,
        c2: 0.4,
        a_matrix: [[0.9, 0.1], [0.1, 0.8]],
    };
    let cfg = SolverConfig {
        cg: CgConfig {
            rel_tol: 1e-14,
            ..CgConfig::default()
        },
        ..SolverConfig::default()
    };
    let n = 32;
    let dt = 1e-2;
    let sol = solve_homogenized(&coeffs, &params, n, dt, InitialScaling::Paper, &cfg).unwrap();
    let vol = 1.0 / (n * n) as f64;
    for k in 1..sol.times.len() {
        let t = sol.times[k - 1];
        let step = sol.times[k] - t;
        let mut source = 0.0;
        for j in 0..n {
            for i in 0..n {
                source += (params.f)(t, &[(i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64]) * vol;
            }
        }
        let expected = coeffs.c1 * step * source;
        assert!((sol.mass[k] - sol.mass[k - 1] - expected).abs() < 1e-10, "step {k}");
    }
}

#[test]
fn a_priori_norms_stay_bounded_along_the_ladder() {
    let q = Window::square(0.0, 1.0);
    let cloud = sample_poisson(&Window::square(-4.0, 20.0), &ProcessParams::new(1.0, 1, 2).unwrap()).unwrap();
    let mut params = PdeParams::heat(q, 0.2, Arc::new(bump));
    params.h = Arc::new(|u| -u);
    params.h_lipschitz = 1.0;
    let mut sups = Vec::new();
    let mut grads = Vec::new();
    for eps in [0.25, 0.125, 0.0625] {
        let mut sc = scenario(cloud.clone(), eps, 64);
        sc.dt = 5e-3;
        let grid = build_perforated_grid(&sc, &q).unwrap();
        let (s, g) = solve_eps(&grid, &params, &sc, &SolverConfig::default()).unwrap().a_priori_norms();
        sups.push(s);
        grads.push(g);
    }
    // The initial energy bounds the supremum; no growth along the ladder.
    let u0_sq: f64 = 1.25;
    for (s, g) in sups.iter().zip(&grads) {
        assert!(*s <= u0_sq + 1e-9, "sup {s}");
        assert!(*g <= 2.0 * grads[0], "grad {g}");
    }
}
