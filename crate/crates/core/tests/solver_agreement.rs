use hardisk::contraction::{feasible, DEFAULT_QUADRATURE_ORDER};
use hardisk::dynamics::seeded_rng;
use hardisk::{BoundResultF64, BoundSearch, ConstraintSystemF64, IntegralVariant, PiecewiseMetricF64};
use proptest::prelude::*;
use rand::Rng;

fn system(rho: f64, cells: usize) -> ConstraintSystemF64 {
    ConstraintSystemF64::assemble(rho, cells, DEFAULT_QUADRATURE_ORDER, IntegralVariant::Clamped)
        .unwrap()
}

#[test]
fn lp_and_forward_substitution_agree_on_random_instances() {
    let mut rng = seeded_rng(77);
    let mut feasible_count = 0;
    for _ in 0..100 {
        let cells = rng.random_range(1..=32);
        let rho = rng.random_range(0.05..0.2);
        let s = system(rho, cells);
        let threshold = s.minimal_metric().values().iter().all(|&v| v <= 1.0);
        assert_eq!(s.lp_feasible(), threshold, "rho={rho} L={cells}");
        feasible_count += usize::from(threshold);
    }
    assert!(feasible_count > 10 && feasible_count < 90);
}

#[test]
fn bisection_brackets_the_threshold() {
    let out: BoundResultF64 = BoundSearch {
        cells: 16,
        ..BoundSearch::default()
    }
    .run()
    .unwrap();
    assert!(feasible(out.rho_star, 16, IntegralVariant::Clamped).unwrap().feasible);
    assert!(!feasible(out.rho_star + 2e-6, 16, IntegralVariant::Clamped).unwrap().feasible);
}

#[test]
fn bounds_increase_with_resolution() {
    let mut last = 0.0;
    for cells in [4, 8, 16, 32, 64] {
        let out: BoundResultF64 = BoundSearch {
            cells,
            ..BoundSearch::default()
        }
        .run()
        .unwrap();
        assert!(out.rho_star >= last - 1e-6, "L={cells}");
        last = out.rho_star;
    }
}

#[test]
fn hamming_metric_threshold() {
    // d ≡ 1 needs 1 − 4ρ − ε̂ ≥ 4ρ at the last cell
    assert!(system(0.1249, 8).hamming_feasible());
    assert!(!system(0.1251, 8).hamming_feasible());
}

#[test]
fn single_precision_agrees_with_double() {
    let a: BoundResultF64 = BoundSearch {
        cells: 32,
        tol: 1e-5,
        ..BoundSearch::default()
    }
    .run()
    .unwrap();
    let b = BoundSearch {
        cells: 32,
        tol: 1e-5,
        ..BoundSearch::default()
    }
    .run::<f32>()
    .unwrap();
    assert!((a.rho_star - f64::from(b.rho_star)).abs() < 5e-5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn feasibility_is_monotone_in_density(cells in 1usize..24, rho in 0.02..0.22f64, step in 0.0..0.03f64) {
        let lo = system(rho, cells).feasibility().unwrap().feasible;
        let hi = system((rho + step).min(0.2499), cells).feasibility().unwrap().feasible;
        prop_assert!(lo || !hi);
    }

    #[test]
    fn minimal_metric_is_least(cells in 2usize..24, rho in 0.05..0.15f64, k in 0usize..24, f in 0.9..0.999f64) {
        let s = system(rho, cells);
        let d = s.minimal_metric();
        let mut v = d.values().to_vec();
        let k = k % cells;
        v[k] *= f;
        prop_assert!(!s.is_satisfied_by(&PiecewiseMetricF64::new(v).unwrap()).unwrap());
    }

    #[test]
    fn repaired_metric_is_a_metric(cells in 1usize..40, rho in 0.02..0.15f64) {
        let f = system(rho, cells).feasibility().unwrap();
        if let Some(m) = f.metric {
            prop_assert!(m.check_axioms().is_ok());
            prop_assert!(m.values().iter().zip(f.minimal.values()).all(|(a, b)| *a >= *b - 1e-12));
        }
    }
}
