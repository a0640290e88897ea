use perforate_core::process::{
    admissibility_report, default_equidistance_tolerance, sample_poisson, sample_poisson_replica, ProcessParams,
};
use perforate_core::stats::{ks_two_sample, MeanEstimate};
use perforate_core::{GeometryParams, PointCloud, Window};

#[test]
fn poisson_mean_count() {
    let w = Window::square(0.0, 10.0);
    let p = ProcessParams::new(0.5, 7, 2).unwrap();
    let counts: Vec<f64> = (0..10_000)
        .map(|i| sample_poisson_replica(&w, &p, i).unwrap().len() as f64)
        .collect();
    let m = MeanEstimate::from_samples(&counts);
    assert!((m.mean - 50.0).abs() <= 3.0 * m.se, "mean {} se {}", m.mean, m.se);
}

#[test]
fn zero_volume_window_is_empty() {
    let w = Window::new(2, &[0.0, 0.0], &[0.0, 5.0]).unwrap();
    let p = ProcessParams::new(3.0, 1, 2).unwrap();
    assert!(sample_poisson(&w, &p).unwrap().is_empty());
}

#[test]
fn same_seed_same_cloud() {
    let w = Window::square(-2.0, 9.0);
    let p = ProcessParams::new(1.3, 99, 2).unwrap();
    let a = sample_poisson_replica(&w, &p, 4).unwrap();
    let b = sample_poisson_replica(&w, &p, 4).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, sample_poisson_replica(&w, &p, 5).unwrap());
    let bits = |c: &PointCloud| c.points().iter().flat_map(|q| q.map(f64::to_bits)).collect::<Vec<_>>();
    assert_eq!(bits(&a), bits(&b));
}

#[test]
fn translated_window_gives_the_same_law() {
    // Relative coordinates from two windows that differ by a shift.
    let a_win = Window::square(0.0, 10.0);
    let b_win = Window::square(37.5, 47.5);
    let p = ProcessParams::new(1.0, 3, 2).unwrap();
    let mut xa = Vec::new();
    let mut xb = Vec::new();
    for i in 0..40 {
        xa.extend(sample_poisson_replica(&a_win, &p, i).unwrap().points().iter().map(|q| q[0]));
        xb.extend(
            sample_poisson_replica(&b_win, &p, 1000 + i)
                .unwrap()
                .points()
                .iter()
                .map(|q| q[0] - 37.5),
        );
    }
    let (_, pvalue) = ks_two_sample(&xa, &xb);
    assert!(pvalue > 1e-3, "p = {pvalue}");
}

#[test]
fn admissibility_examples() {
    let g = GeometryParams::new(1.0).unwrap();
    let w = Window::square(-3.0, 3.0);
    let pair = PointCloud::planar(w, &[[0.0, 0.0], [2.0, 0.0]]).unwrap();
    assert_eq!(admissibility_report(&pair, &g, 1e-9).equidistance_violations, 1);
    let empty = admissibility_report(&PointCloud::empty(w), &g, 1e-9);
    assert_eq!(empty.equidistance_violations, 0);
    assert_eq!(empty.max_cluster_size, 0);
    assert_eq!(empty.max_cluster_diameter, 0.0);

    let g = GeometryParams::new(0.3).unwrap();
    let big = Window::square(0.0, 20.0);
    for seed in 0..100 {
        let cloud = sample_poisson(&big, &ProcessParams::new(1.0, seed, 2).unwrap()).unwrap();
        let rep = admissibility_report(&cloud, &g, default_equidistance_tolerance(&g));
        assert_eq!(rep.equidistance_violations, 0);
        assert!(rep.max_cluster_diameter.is_finite());
    }
}
