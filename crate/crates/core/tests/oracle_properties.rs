use faer::Mat;
use num_complex::Complex64;
use proptest::prelude::*;
use spincool_core::correlation::{build_generator, evolve, infinite_temperature, Channel, Scenario};
use spincool_core::lattice::{BoundaryCondition, GeometryKind, Lattice, LatticeGeometry, PairMode};
use spincool_core::oracle::{
    channels_from_density, dicke_ensemble, evolve_exact, lindbladian_gap, lindbladian_spectrum, DensityMatrix,
    LindbladSpec,
};

fn lattice(kind: GeometryKind, l: usize, bc: BoundaryCondition) -> Lattice {
    Lattice::new(LatticeGeometry::new(kind, l), bc).unwrap()
}

fn chain(l: usize, bc: BoundaryCondition) -> Lattice {
    lattice(GeometryKind::Chain, l, bc)
}

fn scenarios() -> impl Strategy<Value = Scenario> {
    prop_oneof![
        Just(Scenario::Pure),
        (0.0..2.0f64).prop_map(|eta| Scenario::Field { eta }),
        (0.0..1.0f64, 0.0..3.0f64).prop_map(|(kappa_over_gamma, n_t)| Scenario::Thermal { kappa_over_gamma, n_t }),
    ]
}

/// `G G† / tr(G G†)` for a complex matrix `G` given as interleaved parts.
fn density_from(n: usize, parts: &[f64]) -> DensityMatrix {
    let dim = 1usize << n;
    let g = Mat::<Complex64>::from_fn(dim, dim, |i, j| {
        let k = 2 * (i * dim + j);
        Complex64::new(parts[k], parts[k + 1])
    });
    let rho = &g * g.adjoint();
    let tr: Complex64 = (0..dim).map(|i| rho[(i, i)]).sum();
    let data = (0..dim * dim).map(|k| rho[(k % dim, k / dim)] / tr).collect();
    DensityMatrix::from_column_major(n, data).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn evolution_keeps_states_physical(
        scenario in scenarios(),
        periodic in any::<bool>(),
        parts in prop::collection::vec(-1.0..1.0f64, 128),
    ) {
        let bc = if periodic { BoundaryCondition::Periodic } else { BoundaryCondition::Open };
        let spec = LindbladSpec::for_scenario(&chain(3, bc), scenario).unwrap();
        let rho0 = density_from(3, &parts);
        for rho in evolve_exact(&spec, &rho0, &[0.0, 0.3, 3.0, 30.0]).unwrap() {
            prop_assert!((rho.trace() - Complex64::new(1.0, 0.0)).norm() <= 1e-12);
            prop_assert!(rho.hermiticity_error() <= 1e-12);
            prop_assert!(rho.min_eigenvalue().unwrap() >= -1e-10);
        }
    }

    #[test]
    fn spectrum_is_stable_with_a_stationary_mode(scenario in scenarios(), periodic in any::<bool>()) {
        let bc = if periodic { BoundaryCondition::Periodic } else { BoundaryCondition::Open };
        let spec = LindbladSpec::for_scenario(&chain(3, bc), scenario).unwrap();
        let spectrum = lindbladian_spectrum(&spec).unwrap();
        prop_assert!(spectrum.iter().all(|l| l.re <= 1e-10));
        prop_assert!(spectrum.iter().any(|l| l.norm() <= 1e-10));
    }

    #[test]
    fn correlation_channels_follow_the_exact_dynamics(scenario in scenarios(), l in 3usize..6, periodic in any::<bool>()) {
        let bc = if periodic { BoundaryCondition::Periodic } else { BoundaryCondition::Open };
        let la = chain(l, bc);
        let g = build_generator(&la, scenario, PairMode::FullPairs).unwrap();
        let times = [0.0, 0.2, 1.5, 12.0];
        let fast = evolve(&g, &infinite_temperature(scenario, g.index()), &times).unwrap();
        let spec = LindbladSpec::for_scenario(&la, scenario).unwrap();
        let exact = evolve_exact(&spec, &DensityMatrix::maximally_mixed(l), &times).unwrap();
        for ((s, rho), &t) in fast.iter().zip(&exact).zip(&times) {
            let reference = channels_from_density(rho, &g, t).unwrap();
            for (a, b) in s.values.iter().zip(&reference.values) {
                prop_assert!((a - b).abs() <= 1e-10, "tau={t}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn pure_cooling_reaches_the_dicke_ensemble() {
    for la in [chain(3, BoundaryCondition::Open), chain(4, BoundaryCondition::Periodic)] {
        let spec = LindbladSpec::for_scenario(&la, Scenario::Pure).unwrap();
        let tau = 40.0 / lindbladian_gap(&spec).unwrap();
        let n = la.n_sites();
        let rho = evolve_exact(&spec, &DensityMatrix::maximally_mixed(n), &[tau]).unwrap().remove(0);
        let target = dicke_ensemble(n).unwrap();
        assert!(rho.max_abs_diff(&target) <= 1e-12, "{:e}", rho.max_abs_diff(&target));
    }
}

#[test]
fn maximally_mixed_state_has_vanishing_correlations() {
    let la = lattice(GeometryKind::Square, 3, BoundaryCondition::Open);
    let scenario = Scenario::Thermal { kappa_over_gamma: 0.3, n_t: 0.5 };
    let g = build_generator(&la, scenario, PairMode::FullPairs).unwrap();
    let exact = channels_from_density(&DensityMatrix::maximally_mixed(la.n_sites()), &g, 0.0).unwrap();
    assert_eq!(exact.values, infinite_temperature(scenario, g.index()).values);
    assert!(exact.channel(Channel::D).unwrap().iter().all(|&v| v == 0.0));
}
