use median::{complex_median_report, fallback_count, frame_is_valid, MedianCase, WeightedPointSet, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn family(kind: usize, n: usize, rng: &mut ChaCha8Rng) -> Vec<(C64, f64)> {
    (0..n)
        .map(|k| {
            let z = match kind {
                // clusters of exact duplicates
                0 => C64::new((k % 3) as f64, (k % 2) as f64),
                // all points on one line
                1 => C64::new(0.3, -0.7) + C64::new(2.0, 1.0) * rng.random_range(-1.0..1.0),
                // ray concentration: half the mass on one ray
                2 if k % 2 == 0 => C64::new(0.0, 0.0) + C64::from_polar(rng.random_range(0.1..1.0), 1.0),
                // points on a circle
                3 => C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU)),
                // heavy atoms and light noise
                4 if k < 3 => C64::new(k as f64, -(k as f64)),
                _ => C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            };
            let w = if kind == 4 && k < 3 { 50.0 } else { rng.random_range(0.05..2.0) };
            (z, w)
        })
        .collect()
}

#[test]
fn frames_for_structured_and_large_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let before = fallback_count();
    let mut worst = f64::INFINITY;
    for trial in 0..600 {
        let n = if trial % 10 == 0 { 150 } else { rng.random_range(1..40) };
        let pts = WeightedPointSet::new(family(trial % 6, n, &mut rng)).unwrap();
        let r = complex_median_report(&pts);
        assert!(frame_is_valid(&pts, &r.frame));
        assert_ne!(r.case, MedianCase::Fallback);
        worst = worst.min(r.masses.iter().cloned().fold(f64::INFINITY, f64::min) / pts.total());
    }
    assert!(worst >= 1.0 / 16.0 - 1e-12, "{worst}");
    assert_eq!(fallback_count(), before);
}
