use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use povm_forge_core::povm::{canonicalize, catalog_get, equivalent_up_to_rotation, CATALOG_COPIES};
use povm_forge_core::verification::{verify, Formulation};
use povm_forge_core::Rotation;

fn entry() -> impl Strategy<Value = usize> {
    prop::sample::select(CATALOG_COPIES.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn verification_is_rotation_invariant(n in entry(), seed in any::<u64>()) {
        let rotation = Rotation::random(&mut ChaCha8Rng::seed_from_u64(seed));
        let p = catalog_get(n).unwrap().povm.rotated(&rotation);
        let report = verify(&p, 1e-10);
        prop_assert!(report.pass);
        prop_assert_eq!(report.reports.len(), Formulation::ALL.len());
    }

    #[test]
    fn rotated_entries_are_equivalent(n in entry(), seed in any::<u64>(), shift in 0usize..22) {
        let rotation = Rotation::random(&mut ChaCha8Rng::seed_from_u64(seed));
        let original = catalog_get(n).unwrap().povm;
        let mut moved = original.rotated(&rotation);
        let k = shift % moved.len();
        moved.outcomes.rotate_left(k);
        let eq = equivalent_up_to_rotation(&original, &moved, 1e-8);
        prop_assert!(eq.equivalent);
        prop_assert!(eq.max_angle < 1e-8);
    }

    #[test]
    fn canonicalize_is_idempotent(n in entry(), seed in any::<u64>()) {
        let rotation = Rotation::random(&mut ChaCha8Rng::seed_from_u64(seed));
        let once = canonicalize(&catalog_get(n).unwrap().povm.rotated(&rotation)).unwrap();
        let twice = canonicalize(&once).unwrap();
        prop_assert_eq!(once.len(), twice.len());
        for (a, b) in once.outcomes.iter().zip(&twice.outcomes) {
            prop_assert!((a.weight - b.weight).abs() < 1e-15);
            prop_assert!(a.direction.angle_to(&b.direction) < 1e-12);
        }
        prop_assert_eq!(once.outcomes[0].direction.cartesian, [0.0, 0.0, 1.0]);
    }
}
