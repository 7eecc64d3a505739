use std::collections::BTreeSet;

use num_complex::Complex;
use proptest::prelude::*;
use tracial_fermi::car::{
    global_parity, smeared_annihilator, smeared_creator, FockOperator, LatticeSpec, NormKind, SmearingVector,
};
use tracial_fermi::config::parse_config;
use tracial_fermi::diagnostics::conditional_expectation;
use tracial_fermi::dynamics::{eigendecompose, heisenberg, DEFAULT_GAP_TOLERANCE};
use tracial_fermi::hamiltonian::HamiltonianSpec;
use tracial_fermi::random::{random_operator, rng};
use tracial_fermi::twist::local_eigenoperator_residual;

type C64 = Complex<f64>;

fn smearing(len: usize) -> impl Strategy<Value = SmearingVector<f64>> {
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), len)
        .prop_map(|v| SmearingVector::new(v.into_iter().map(|(re, im)| C64::new(re, im)).collect()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn smeared_car(f in smearing(4), g in smearing(4)) {
        let lat = LatticeSpec::open(4).unwrap();
        let af = smeared_annihilator(&f, &lat).unwrap();
        let ag = smeared_annihilator(&g, &lat).unwrap();
        let bracket = af.anticommutator(&smeared_creator(&g, &lat).unwrap());
        let expected = FockOperator::identity(lat).scale(g.inner(&f));
        prop_assert!(bracket.max_deviation(&expected) < 1e-12);
        prop_assert!(af.anticommutator(&ag).max_deviation(&FockOperator::zero(lat)) < 1e-12);
        // a(f) anticommutes with the parity
        let p = global_parity::<f64>(&lat);
        prop_assert!(af.anticommutator(&p).max_deviation(&FockOperator::zero(lat)) < 1e-12);
    }

    #[test]
    fn smeared_linearity_and_norm(f in smearing(3), g in smearing(3), re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let lat = LatticeSpec::open(3).unwrap();
        let alpha = C64::new(re, im);
        let lhs = smeared_annihilator(&f.scaled(alpha).plus(&g), &lat).unwrap();
        let rhs = &smeared_annihilator(&f, &lat).unwrap().scale(alpha) + &smeared_annihilator(&g, &lat).unwrap();
        prop_assert!(lhs.max_deviation(&rhs) < 1e-12);
        let n = smeared_annihilator(&f, &lat).unwrap().norm(NormKind::Spectral).unwrap();
        prop_assert!((n - f.norm()).abs() < 1e-10 * (1.0 + f.norm()));
    }

    #[test]
    fn evolution_is_a_group_of_automorphisms(seed in 0u64..1000, t in -5.0f64..5.0, s in -5.0f64..5.0) {
        let lat = LatticeSpec::periodic(3).unwrap();
        let eig = eigendecompose(&HamiltonianSpec::<f64>::interacting_benchmark(lat).build().unwrap(), DEFAULT_GAP_TOLERANCE).unwrap();
        let mut r = rng(seed);
        let a = random_operator::<f64>(&lat, &mut r).unwrap();
        let b = random_operator::<f64>(&lat, &mut r).unwrap();
        let twice = heisenberg(&heisenberg(&a, &eig, s).unwrap(), &eig, t).unwrap();
        prop_assert!(twice.max_deviation(&heisenberg(&a, &eig, t + s).unwrap()) < 1e-9);
        let ab = heisenberg(&(&a * &b), &eig, t).unwrap();
        let split = &heisenberg(&a, &eig, t).unwrap() * &heisenberg(&b, &eig, t).unwrap();
        prop_assert!(ab.max_deviation(&split) < 1e-9);
    }

    #[test]
    fn conditional_expectation_is_a_unital_trace_preserving_projection(
        seed in 0u64..1000,
        window in prop::collection::btree_set(0usize..4, 0..=4),
    ) {
        let lat = LatticeSpec::open(4).unwrap();
        let x = random_operator::<f64>(&lat, &mut rng(seed)).unwrap();
        let e = conditional_expectation(&x, &window).unwrap();
        prop_assert!(conditional_expectation(&e, &window).unwrap().max_deviation(&e) < 1e-12);
        prop_assert!((e.normalized_trace() - x.normalized_trace()).norm() < 1e-12);
        let id = FockOperator::<f64>::identity(lat);
        prop_assert!(conditional_expectation(&id, &window).unwrap().max_deviation(&id) < 1e-12);
        let full: BTreeSet<usize> = (0..4).collect();
        prop_assert!(conditional_expectation(&x, &full).unwrap().max_deviation(&x) < 1e-12);
    }

    #[test]
    fn config_text_round_trips(
        l in 1usize..12,
        periodic in any::<bool>(),
        steps in 2usize..50,
        t_end in 0.1f64..20.0,
        epsilon in 1e-6f64..0.5,
        hop in -3.0f64..3.0,
    ) {
        let text = format!(
            "[run]\nscenario = localization\n[lattice]\nL = {l}\nboundary = {}\n[hamiltonian]\nhopping = -1:{hop}, 1:{hop}\n[time]\nt_end = {t_end}\nsteps = {steps}\n[diagnostic]\nepsilon = {epsilon}\n",
            if periodic { "periodic" } else { "open" },
        );
        let c = parse_config(&text).unwrap();
        let again = parse_config(&c.to_text()).unwrap();
        prop_assert_eq!(&again, &c);
        prop_assert_eq!(again.to_text(), c.to_text());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn eigenoperator_residual_is_monotone_in_the_window(x in 0usize..4, y in 0usize..4) {
        let lat = LatticeSpec::periodic(4).unwrap();
        let h = HamiltonianSpec::<f64>::interacting_benchmark(lat).build().unwrap();
        let small = local_eigenoperator_residual(&[x], &h).unwrap();
        let large = local_eigenoperator_residual(&[x, y], &h).unwrap();
        prop_assert!(large.residual <= small.residual + 1e-10);
    }
}
