use proptest::prelude::*;
use spincool_core::lattice::{BoundaryCondition, GeometryKind, Lattice, LatticeGeometry, PairIndex, PairMode};
use spincool_core::linalg::eigenvalues_symmetric;

fn lattices() -> impl Strategy<Value = Lattice> {
    let shape = prop_oneof![
        (3usize..40).prop_map(|l| (GeometryKind::Chain, l)),
        (3usize..9).prop_map(|l| (GeometryKind::Square, l)),
        (3usize..7).prop_map(|l| (GeometryKind::Triangular, l)),
        (2usize..5).prop_map(|l| (GeometryKind::Honeycomb, l)),
        (3usize..5).prop_map(|l| (GeometryKind::Cubic, l)),
    ];
    let bc = prop_oneof![Just(BoundaryCondition::Periodic), Just(BoundaryCondition::Open)];
    (shape, bc)
        .prop_filter_map("unsupported lattice", |((kind, l), bc)| Lattice::new(LatticeGeometry::new(kind, l), bc).ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn coordination_sums_to_twice_the_edges(la in lattices()) {
        let total: usize = (0..la.n_sites()).map(|x| la.coordination(x)).sum();
        prop_assert_eq!(total, 2 * la.edges().len());
    }

    #[test]
    fn laplacian_is_symmetric_negative_semidefinite_with_one_zero_mode(la in lattices()) {
        let lap = la.laplacian();
        prop_assert!(lap.is_symmetric(0.0));
        let ev = eigenvalues_symmetric(&lap.to_dense()).unwrap();
        let scale = lap.norm_inf();
        prop_assert!(ev.iter().all(|&v| v <= 1e-12 * scale), "{:?}", ev);
        prop_assert_eq!(ev.iter().filter(|v| v.abs() <= 1e-10 * scale).count(), 1);
    }

    #[test]
    fn reduced_fields_survive_expansion(la in lattices(), seed in any::<u64>()) {
        let modes: &[PairMode] =
            if la.is_periodic() { &[PairMode::FullPairs, PairMode::Displacement] } else { &[PairMode::FullPairs] };
        for &mode in modes {
            let index = PairIndex::new(&la, mode).unwrap();
            let field: Vec<f64> = (0..index.len()).map(|k| ((seed ^ k as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15) >> 11) as f64).collect();
            let back = index.reduce(&index.expand(&field, -1.0));
            prop_assert_eq!(back, field);
        }
    }
}
