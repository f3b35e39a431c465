use exsteer_core::gramian::{apply_gramian, apply_partial_gramian, apply_partial_gramian_inverse};
use exsteer_core::grid::{embed, project, restrict, Grid, GridFunction, PairFunction, State};
use exsteer_core::semigroup::{apply_semigroup, apply_semigroup_coupling_first, coupling_exp, Direction, SystemSpec};
use proptest::prelude::*;

const N: usize = 200;

fn grid() -> Grid {
    Grid::new(N).unwrap()
}

fn profile(c: &[f64]) -> GridFunction {
    let c = c.to_vec();
    GridFunction::from_fn(grid(), move |t| {
        c.iter()
            .enumerate()
            .map(|(k, a)| a * ((k + 1) as f64 * std::f64::consts::PI * t).sin())
            .sum::<f64>()
    })
}

fn coeffs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, 4)
}

fn pair(a: &[f64], b: &[f64]) -> State {
    PairFunction::new(profile(a), profile(b)).unwrap().into()
}

fn systems() -> impl Strategy<Value = SystemSpec> {
    prop_oneof![
        (0.1..3.0f64, 0.3..2.0f64).prop_map(|(a, b)| SystemSpec::monotubular(a, b, 1.0, 0.1).unwrap()),
        (0.1..3.0f64, 0.1..3.0f64, 0.3..2.0f64, -2.0..-0.3f64)
            .prop_map(|(h1, h2, b1, b2)| SystemSpec::two_stream(h1, h2, b1, b2, 1.0, 0.1).unwrap()),
    ]
}

fn state_for(sys: &SystemSpec, a: &[f64], b: &[f64]) -> State {
    match sys.kind() {
        exsteer_core::grid::Kind::Scalar => profile(a).into(),
        exsteer_core::grid::Kind::Pair => pair(a, b),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projection_is_contractive_idempotent_and_symmetric(a in coeffs(), b in coeffs(), off in -1.0..1.0f64) {
        let g = grid();
        let m = SystemSpec::monotubular(1.0, 1.0, 1.0, 0.1).unwrap().margin(g).unwrap();
        let x: State = profile(&a).axpy(1.0, &GridFunction::from_fn(g, |_| off)).unwrap().into();
        let y: State = profile(&b).into();
        let px = project(&x, m).unwrap();
        prop_assert!(px.norm() <= x.norm());
        prop_assert_eq!(project(&px, m).unwrap(), px.clone());
        let lhs = px.inner(&y).unwrap();
        let rhs = x.inner(&project(&y, m).unwrap()).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * x.norm() * y.norm());
        let w = restrict(&x, m).unwrap();
        prop_assert_eq!(restrict(&embed(&w), m).unwrap(), w);
    }

    #[test]
    fn pair_inner_is_component_sum(a in coeffs(), b in coeffs(), c in coeffs(), d in coeffs()) {
        let (x, y) = (pair(&a, &b), pair(&c, &d));
        let parts = profile(&a).inner(&profile(&c)).unwrap() + profile(&b).inner(&profile(&d)).unwrap();
        prop_assert_eq!(x.inner(&y).unwrap().to_bits(), parts.to_bits());
    }

    #[test]
    fn semigroup_law_and_duality(sys in systems(), a in coeffs(), b in coeffs(), c in coeffs(), t in 0.0..0.6f64, s in 0.0..0.4f64) {
        let h = grid().spacing();
        let x = state_for(&sys, &a, &b);
        let y = state_for(&sys, &c, &a);
        let both = apply_semigroup(&sys, t + s, &x, Direction::Forward).unwrap();
        let steps = apply_semigroup(&sys, t, &apply_semigroup(&sys, s, &x, Direction::Forward).unwrap(), Direction::Forward).unwrap();
        prop_assert!(both.sub(&steps).unwrap().norm() <= 5.0 * h * x.norm());
        let lhs = apply_semigroup(&sys, t, &x, Direction::Forward).unwrap().inner(&y).unwrap();
        let rhs = x.inner(&apply_semigroup(&sys, t, &y, Direction::Adjoint).unwrap()).unwrap();
        prop_assert!((lhs - rhs).abs() <= 5.0 * h * x.norm() * y.norm());
    }

    #[test]
    fn coupling_commutes_with_aligned_translation(h1 in 0.1..3.0f64, h2 in 0.1..3.0f64, k in 0usize..N, a in coeffs(), b in coeffs()) {
        let sys = SystemSpec::two_stream(h1, h2, 1.0, 1.0, 1.0, 0.1).unwrap();
        let x = pair(&a, &b);
        let t = k as f64 / N as f64;
        prop_assert_eq!(
            apply_semigroup(&sys, t, &x, Direction::Forward).unwrap(),
            apply_semigroup_coupling_first(&sys, t, &x).unwrap()
        );
    }

    #[test]
    fn coupling_rows_are_stochastic(h1 in 0.01..10.0f64, h2 in 0.01..10.0f64, t in 0.0..50.0f64) {
        let e = coupling_exp(h1, h2, t).unwrap();
        for r in e.row_sums() {
            prop_assert!((r - 1.0).abs() <= 1e-14);
        }
        prop_assert!(e.entries.iter().flatten().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn gramian_self_adjoint_and_monotone(sys in systems(), a in coeffs(), b in coeffs(), c in coeffs(), s in 0.01..1.0f64, dt in 0.0..1.0f64) {
        let x = state_for(&sys, &a, &b);
        let y = state_for(&sys, &c, &b);
        let lhs = apply_gramian(&sys, s, &x).unwrap().inner(&y).unwrap();
        let rhs = x.inner(&apply_gramian(&sys, s, &y).unwrap()).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * x.norm() * y.norm());
        let qs = apply_gramian(&sys, s, &x).unwrap().inner(&x).unwrap();
        let qt = apply_gramian(&sys, s + dt, &x).unwrap().inner(&x).unwrap();
        prop_assert!(qt >= qs - 1e-15);
    }

    #[test]
    fn partial_inverse_roundtrip(sys in systems(), a in coeffs(), b in coeffs(), t in 0.001..1.0f64) {
        let m = sys.margin(grid()).unwrap();
        let w = restrict(&state_for(&sys, &a, &b), m).unwrap();
        let back = apply_partial_gramian(&sys, t, &apply_partial_gramian_inverse(&sys, t, &w).unwrap()).unwrap();
        prop_assert!(back.sub(&w).unwrap().norm() <= 1e-12 * w.norm().max(1e-300));
    }
}
