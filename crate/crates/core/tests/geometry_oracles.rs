use std::f64::consts::{PI, TAU};

use hardisk::dynamics::seeded_rng;
use hardisk::geometry::{crescent_angle, crescent_area, reflect_across_bisector, torus_dist};
use hardisk::TorusPoint;
use proptest::prelude::*;
use rand::Rng;

/// Area of `Z(y) \ Z(x)` with `|x − y| = λ`, from jittered samples uniform in `Z(y)`.
fn sampled_crescent_area(lambda: f64, per_side: usize, rng: &mut impl Rng) -> f64 {
    let mut inside = 0usize;
    for a in 0..per_side {
        for b in 0..per_side {
            // uniform in the disk of radius 2 via (u, φ) with r = 2√u
            let u = (a as f64 + rng.random::<f64>()) / per_side as f64;
            let phi = (b as f64 + rng.random::<f64>()) / per_side as f64 * TAU;
            let rad = 2.0 * u.sqrt();
            let (px, py) = (rad * phi.cos(), rad * phi.sin());
            if (px - lambda).hypot(py) >= 2.0 {
                inside += 1;
            }
        }
    }
    4.0 * PI * inside as f64 / (per_side * per_side) as f64
}

#[test]
fn crescent_area_matches_sampling() {
    let mut rng = seeded_rng(20);
    for k in 1..=10 {
        let lambda = 0.4 * k as f64;
        let want = sampled_crescent_area(lambda, 400, &mut rng);
        let got = crescent_area(lambda).unwrap();
        assert!((got - want).abs() < 5e-3, "λ={lambda}: {got} vs {want}");
    }
}

#[test]
fn arc_fraction_matches_angular_sampling() {
    let mut rng = seeded_rng(21);
    for &lambda in &[0.3, 1.0, 1.7, 2.0, 2.6, 3.5] {
        for &u in &[0.05, 0.5, 1.0, 1.5, 1.95] {
            let samples = 200_000;
            let mut outside = 0usize;
            for _ in 0..samples {
                let phi: f64 = rng.random::<f64>() * TAU;
                if (u * phi.cos() - lambda).hypot(u * phi.sin()) >= 2.0 {
                    outside += 1;
                }
            }
            let want = outside as f64 / samples as f64;
            let theta = crescent_angle(u, lambda).unwrap();
            let got = (PI - theta) / PI;
            assert!((got - want).abs() < 4e-3, "u={u} λ={lambda}: {got} vs {want}");
        }
    }
}

#[test]
fn full_danger_zone_at_four() {
    assert!((crescent_area(4.0).unwrap() - 4.0 * PI).abs() < 1e-12);
}

fn point() -> impl Strategy<Value = TorusPoint<f64>> {
    (0.0..1.0f64, 0.0..1.0f64).prop_map(|(x, y)| TorusPoint::new(x, y))
}

/// `a`, `b` within 4r of each other and `z` within 2r of one of them, for r ≤ 1/16.
fn local_triple() -> impl Strategy<Value = (TorusPoint<f64>, TorusPoint<f64>, TorusPoint<f64>)> {
    (point(), 1e-3..0.25f64, 0.0..TAU, 0.0..0.125f64, 0.0..TAU, any::<bool>()).prop_map(
        |(a, len, t, rz, tz, near_a)| {
            let b = a.offset([len * t.cos(), len * t.sin()]);
            let base = if near_a { a } else { b };
            let z = base.offset([rz * tz.cos(), rz * tz.sin()]);
            (a, b, z)
        },
    )
}

proptest! {
    #[test]
    fn distance_is_a_metric(p in point(), q in point(), s in point()) {
        prop_assert!((torus_dist(&p, &q) - torus_dist(&q, &p)).abs() < 1e-15);
        prop_assert!(torus_dist(&p, &q) <= torus_dist(&p, &s) + torus_dist(&s, &q) + 1e-15);
        prop_assert!(torus_dist(&p, &q) <= 0.5f64.hypot(0.5) + 1e-15);
    }

    #[test]
    fn reflection_is_an_involution((a, b, z) in local_triple()) {
        let once = reflect_across_bisector(&z, &a, &b).unwrap();
        let twice = reflect_across_bisector(&once, &a, &b).unwrap();
        prop_assert!(torus_dist(&twice, &z) < 1e-12);
    }

    #[test]
    fn reflection_swaps_distances((a, b, z) in local_triple()) {
        let zb = reflect_across_bisector(&z, &a, &b).unwrap();
        prop_assert!((torus_dist(&zb, &a) - torus_dist(&z, &b)).abs() < 1e-12);
        prop_assert!((torus_dist(&zb, &b) - torus_dist(&z, &a)).abs() < 1e-12);
    }

    #[test]
    fn crescent_area_is_monotone(l1 in 0.0..4.0f64, l2 in 0.0..4.0f64) {
        let (lo, hi) = if l1 <= l2 { (l1, l2) } else { (l2, l1) };
        prop_assert!(crescent_area(lo).unwrap() <= crescent_area(hi).unwrap() + 1e-12);
    }

    #[test]
    fn crescent_angle_in_range(u in 0.0..6.0f64, lambda in 1e-6..4.0f64) {
        let t = crescent_angle(u, lambda).unwrap();
        prop_assert!((0.0..=PI).contains(&t));
    }
}
