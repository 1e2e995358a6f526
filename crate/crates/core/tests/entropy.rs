use std::sync::Arc;

use coarsegrain::entropy::{dynamical_entropy, ks_estimate, transition_matrix};
use coarsegrain::partition::{Binning, Partition};
use coarsegrain::system::{build_sample, DynamicalMap, Observable, SampleKind, SampleSpace, Topology};

const TOL: f64 = 1e-9;

/// Systems whose snapped dynamics permutes the sample, so the uniform
/// weights are exactly invariant.
fn invariant_systems() -> Vec<(DynamicalMap, Arc<SampleSpace>, Partition)> {
    let circle = |n| Arc::new(SampleSpace::grid(n, vec![Topology::Circle]).unwrap());
    let half = |s: &Arc<SampleSpace>| Partition::from_boundaries(s, 0, &[0.5]).unwrap();
    let mut out = Vec::new();
    // 2 is invertible modulo an odd grid size
    let s = circle(3 * 5 * 7 * 11 * 13);
    out.push((DynamicalMap::doubling(), s.clone(), half(&s)));
    let s = circle(1 << 14);
    out.push((DynamicalMap::rotation(0.3819660112501051).unwrap(), s.clone(), half(&s)));
    out.push((DynamicalMap::identity(1), s.clone(), half(&s)));
    let baker = DynamicalMap::baker();
    let s = Arc::new(build_sample(SampleKind::Grid, 128 * 128, Some(&baker), 0, None).unwrap());
    out.push((baker, s.clone(), half(&s)));
    out
}

fn check_series(name: &str, h: &[f64], ln_n: f64, tol: f64) {
    for w in h.windows(2) {
        assert!(w[1] >= w[0] - tol, "{name}: H not monotone");
    }
    for n in 1..=5 {
        for m in 1..=5 {
            assert!(h[n + m - 1] <= h[n - 1] + h[m - 1] + tol, "{name}: not subadditive");
        }
    }
    assert!(h.iter().all(|&x| x <= ln_n + tol));
}

#[test]
fn block_entropy_is_monotone_and_subadditive() {
    for (map, s, p) in invariant_systems() {
        let r = dynamical_entropy(&p, &map, 10).unwrap();
        check_series(map.name(), &r.block_entropy_series, (s.len() as f64).ln(), TOL);
        assert!(r.rate_series_quotient.iter().all(|&x| x >= -TOL));
        assert!(r.rate_series_difference.iter().all(|&x| x >= -TOL));
    }
}

#[test]
fn trajectory_measures_are_nearly_subadditive() {
    // the empirical measure of an orbit segment is invariant up to the mass
    // of its endpoints, so subadditivity holds up to O(ln(N) / N)
    let map = DynamicalMap::logistic(4.0).unwrap();
    let s = Arc::new(build_sample(SampleKind::Trajectory, 100_000, Some(&map), 2, None).unwrap());
    let p = Partition::from_boundaries(&s, 0, &[0.5]).unwrap();
    let r = dynamical_entropy(&p, &map, 10).unwrap();
    let n = s.len() as f64;
    check_series("logistic", &r.block_entropy_series, n.ln(), 10.0 * n.ln() / n);
}

fn systems() -> Vec<(DynamicalMap, Arc<SampleSpace>, Partition)> {
    let mut out = invariant_systems();
    for map in [DynamicalMap::tent(2.0).unwrap(), DynamicalMap::logistic(4.0).unwrap()] {
        let s = Arc::new(build_sample(SampleKind::UniformRandom, 20_000, Some(&map), 11, None).unwrap());
        let p = Partition::from_boundaries(&s, 0, &[0.5]).unwrap();
        out.push((map, s, p));
    }
    out
}

#[test]
fn transition_matrices_are_stochastic() {
    for (map, _, p) in systems() {
        let t = transition_matrix(&p, &map).unwrap();
        for row in &t.rows {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            assert!(row.iter().all(|&v| (0.0..=1.0).contains(&v)));
        }
    }
}

#[test]
fn refinement_never_lowers_the_estimate() {
    let s = Arc::new(SampleSpace::grid(1 << 14, vec![Topology::Circle]).unwrap());
    let map = DynamicalMap::logistic(3.9).unwrap();
    let mut last = f64::NEG_INFINITY;
    for k in [1usize, 2, 4, 8] {
        let p = Partition::induce(&Observable::coordinate(0), &s, Binning::UniformBins(k)).unwrap();
        let e = dynamical_entropy(&p, &map, 4).unwrap();
        let h = e.block_entropy_series.last().unwrap() / 4.0;
        assert!(h >= last - TOL);
        last = h;
    }
}

#[test]
fn irrational_rotation_has_vanishing_rate() {
    let s = Arc::new(SampleSpace::grid(1 << 16, vec![Topology::Circle]).unwrap());
    let map = DynamicalMap::rotation(0.6180339887498949).unwrap();
    let p = Partition::from_boundaries(&s, 0, &[0.5]).unwrap();
    let r = dynamical_entropy(&p, &map, 40).unwrap();
    // n-step itineraries cut the circle at 2n points
    assert_eq!(r.cell_count_series[39], 80);
    assert!(r.estimate < 0.04, "estimate {}", r.estimate);
    assert!(r.estimate >= 0.0);
    let n = 40.0f64;
    assert!(r.block_entropy_series[39] <= (2.0 * n).ln() + TOL);
}

#[test]
fn doubling_difference_series_stays_above_limit() {
    let map = DynamicalMap::doubling();
    let s = Arc::new(build_sample(SampleKind::Trajectory, 200_000, Some(&map), 5, None).unwrap());
    let p = Partition::from_boundaries(&s, 0, &[0.5]).unwrap();
    let r = dynamical_entropy(&p, &map, 10).unwrap();
    for d in &r.rate_series_difference[4..] {
        assert!(*d >= r.estimate - 0.02);
    }
}

#[test]
fn grid_resolution_partition_saturates() {
    let s = Arc::new(SampleSpace::grid(1 << 10, vec![Topology::Circle]).unwrap());
    let family = vec![
        Partition::from_boundaries(&s, 0, &[0.5]).unwrap().with_name("half"),
        Partition::identity(&s).with_name("points"),
    ];
    let ks = ks_estimate(&DynamicalMap::doubling(), &s, &family, 3).unwrap();
    assert!(ks.reports[1].saturation_flag);
    assert_eq!(ks.reports[1].cell_count_series[0], s.len());
    assert_eq!(ks.partition_name, "half");
}

#[test]
fn trajectory_landmark() {
    let map = DynamicalMap::doubling();
    let s = Arc::new(build_sample(SampleKind::Trajectory, 1_000_000, Some(&map), 1, None).unwrap());
    let half = Partition::from_boundaries(&s, 0, &[0.5]).unwrap();
    let skew = Partition::from_boundaries(&s, 0, &[0.6]).unwrap();
    let a = dynamical_entropy(&half, &map, 10).unwrap();
    let b = dynamical_entropy(&skew, &map, 10).unwrap();
    assert!((a.estimate - 2f64.ln()).abs() <= 0.02, "half {}", a.estimate);
    assert!(b.estimate <= a.estimate - 0.03, "skew {}", b.estimate);
    assert!(!a.saturation_flag);
}
