use std::collections::VecDeque;
use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use perforate_core::geometry::{clusters, covered, delta_hat, fill, CellState};
use perforate_core::process::{sample_poisson_replica, ProcessParams};
use perforate_core::stats::filled_perimeter;
use perforate_core::{GeometryParams, PointCloud, Window};

fn geometry(r: f64) -> GeometryParams {
    GeometryParams::new(r).unwrap()
}

fn bfs_partition(points: &[[f64; 3]], r: f64) -> Vec<Vec<usize>> {
    let m = points.len();
    let mut label = vec![usize::MAX; m];
    let mut groups = Vec::new();
    for s in 0..m {
        if label[s] != usize::MAX {
            continue;
        }
        let g = groups.len();
        let mut members = vec![s];
        label[s] = g;
        let mut queue = VecDeque::from([s]);
        while let Some(i) = queue.pop_front() {
            for j in 0..m {
                let d = ((points[i][0] - points[j][0]).powi(2) + (points[i][1] - points[j][1]).powi(2)).sqrt();
                if label[j] == usize::MAX && d < 2.0 * r {
                    label[j] = g;
                    members.push(j);
                    queue.push_back(j);
                }
            }
        }
        members.sort_unstable();
        groups.push(members);
    }
    groups.sort();
    groups
}

#[test]
fn cluster_examples() {
    let g = geometry(1.0);
    let w = Window::square(-5.0, 5.0);
    let pair = PointCloud::planar(w, &[[0.0, 0.0], [1.0, 0.0]]).unwrap();
    assert_eq!(clusters(&pair, &g).len(), 1);
    let apart = PointCloud::planar(w, &[[0.0, 0.0], [3.0, 0.0]]).unwrap();
    assert_eq!(clusters(&apart, &g).len(), 2);
    // Tangent balls touch but do not overlap.
    let tangent = PointCloud::planar(w, &[[0.0, 0.0], [2.0, 0.0]]).unwrap();
    assert_eq!(clusters(&tangent, &g).len(), 2);
}

#[test]
fn clusters_match_breadth_first_oracle() {
    let w = Window::square(0.0, 6.0);
    for seed in 0..40 {
        let p = ProcessParams::new(50.0 / 36.0, seed, 2).unwrap();
        let cloud = sample_poisson_replica(&w, &p, 0).unwrap();
        let g = geometry(0.35);
        let mut got: Vec<Vec<usize>> = clusters(&cloud, &g)
            .clusters
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c
            })
            .collect();
        got.sort();
        assert_eq!(got, bfs_partition(cloud.points(), 0.35), "seed {seed}");
    }
}

#[test]
fn closed_ball_membership() {
    let g = geometry(1.0);
    let w = Window::square(-2.0, 2.0);
    let one = PointCloud::planar(w, &[[0.0, 0.5]]).unwrap();
    assert!(covered(&[0.0, 0.0, 0.0], &one, &g));
    assert!(!covered(&[0.0, 0.0, 0.0], &PointCloud::empty(w), &g));
    let at_r = PointCloud::planar(w, &[[1.0, 0.0]]).unwrap();
    assert!(covered(&[0.0, 0.0, 0.0], &at_r, &g));
}

#[test]
fn triangle_pocket_is_filled_and_single_disks_are_not() {
    let g = geometry(1.0);
    let w = Window::square(-3.0, 5.0);
    let s = 1.9;
    let h = s * 3f64.sqrt() / 2.0;
    let tri = PointCloud::planar(w, &[[0.0, 0.0], [s, 0.0], [s / 2.0, h]]).unwrap();
    let raster = fill(&tri, &g, g.default_resolution()).unwrap();
    assert_eq!(raster.state_at(&[s / 2.0, h / 3.0, 0.0]), CellState::VacantIsland);
    assert!(raster.verify_reachability());

    for pts in [&[[0.0, 0.0]][..], &[[0.0, 0.0], [2.5, 0.0]][..]] {
        let c = PointCloud::planar(w, pts).unwrap();
        assert!(!fill(&c, &g, g.default_resolution()).unwrap().has_islands());
    }
}

#[test]
fn filled_raster_contains_boolean_raster() {
    let w = Window::square(0.0, 8.0);
    let g = geometry(0.45);
    for seed in 0..10 {
        let cloud = sample_poisson_replica(&w, &ProcessParams::new(1.2, seed, 2).unwrap(), 0).unwrap();
        let raster = fill(&cloud, &g, g.default_resolution()).unwrap();
        assert!(raster.verify_reachability());
        for idx in 0..raster.grid.len() {
            let c = raster.grid.center(idx);
            let exact = covered(&c, &cloud, &g);
            assert_eq!(raster.state(idx) == CellState::Covered, exact);
            if exact {
                assert!(raster.in_filled(&c));
            }
        }
    }
}

#[test]
fn delta_closed_forms() {
    let g = geometry(1.0);
    let d = delta_hat(&[[0.0, 0.0, 0.0]], 2, &g).unwrap();
    assert_abs_diff_eq!(d.value, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
    let tangent = delta_hat(&[[0.0, 0.0, 0.0], [2.0, 0.0, 0.0]], 2, &g).unwrap();
    assert_eq!(tangent.value, 0.0);
}

/// Union boundary length of two unit disks by dense polygonal sampling.
fn polygonal_union_perimeter(a: [f64; 2], b: [f64; 2], r: f64, k: usize) -> f64 {
    let mut total = 0.0;
    for (c, o) in [(a, b), (b, a)] {
        let outside = |t: f64| {
            let p = [c[0] + r * t.cos(), c[1] + r * t.sin()];
            (p[0] - o[0]).hypot(p[1] - o[1]) > r
        };
        for i in 0..k {
            let t0 = 2.0 * PI * i as f64 / k as f64;
            let t1 = 2.0 * PI * (i + 1) as f64 / k as f64;
            if outside(t0) && outside(t1) {
                total += 2.0 * r * ((t1 - t0) / 2.0).sin();
            } else if outside(t0) != outside(t1) {
                // Bisect the crossing and keep the outside part of the chord.
                let (mut lo, mut hi) = if outside(t0) { (t0, t1) } else { (t1, t0) };
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if outside(mid) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let base = if outside(t0) { t0 } else { t1 };
                total += 2.0 * r * ((lo - base).abs() / 2.0).sin();
            }
        }
    }
    total
}

#[test]
fn perimeter_of_isolated_and_overlapping_disks() {
    let g = geometry(1.0);
    let w = Window::square(-5.0, 5.0);
    let one = PointCloud::planar(w, &[[0.0, 0.0]]).unwrap();
    assert_abs_diff_eq!(filled_perimeter(&one, &g, &w).unwrap().perimeter, 2.0 * PI, epsilon = 1e-12);

    let two = PointCloud::planar(w, &[[0.0, 0.0], [0.1, 0.0]]).unwrap();
    let got = filled_perimeter(&two, &g, &w).unwrap().perimeter;
    let oracle = polygonal_union_perimeter([0.0, 0.0], [0.1, 0.0], 1.0, 200_000);
    assert_abs_diff_eq!(got, oracle, epsilon = 1e-4);
}

#[test]
fn perimeter_in_unit_square_is_bounded_by_hitting_disks() {
    let r = 0.3;
    let g = geometry(r);
    let w = Window::square(-3.0, 4.0);
    let unit = Window::square(0.0, 1.0);
    for seed in 0..50 {
        let cloud = sample_poisson_replica(&w, &ProcessParams::new(1.5, seed, 2).unwrap(), 0).unwrap();
        let mu = filled_perimeter(&cloud, &g, &unit).unwrap().perimeter;
        let hitting = cloud
            .points()
            .iter()
            .filter(|p| {
                let dx = (p[0].clamp(0.0, 1.0) - p[0]).abs();
                let dy = (p[1].clamp(0.0, 1.0) - p[1]).abs();
                dx.hypot(dy) <= r
            })
            .count();
        assert!(mu <= 2.0 * PI * r * hitting as f64 + 1e-12, "seed {seed}");
    }
}
