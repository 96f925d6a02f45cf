use proptest::prelude::*;

use logjet::lattice::FGAbelianGroup;
use logjet::monoid::{AffineMonoid, Word};

fn arb_monoid() -> impl Strategy<Value = AffineMonoid> {
    (1usize..=2)
        .prop_flat_map(|d| (Just(d), proptest::collection::vec(proptest::collection::vec(-2i64..=3, d), d..d + 3)))
        .prop_filter_map("pointed and full rank", |(d, vs)| {
            let vs: Vec<Vec<i64>> =
                vs.into_iter().filter(|v| v[0] > 0 || (v[0] == 0 && v.iter().sum::<i64>() > 0)).collect();
            if vs.is_empty() || logjet::lattice::rank(d, &vs) < d {
                return None;
            }
            let names: Vec<String> = (0..vs.len()).map(|i| format!("g{i}")).collect();
            let p = AffineMonoid::from_images(FGAbelianGroup::free(d), names.clone(), vs).ok()?;
            AffineMonoid::from_presentation(&names, p.presentation()).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn saturation_is_idempotent_and_contains_generators(p in arb_monoid()) {
        let sat = p.saturate(64).unwrap().monoid;
        for img in p.images() {
            prop_assert!(sat.contains(img).unwrap());
        }
        let again = sat.saturate(64).unwrap();
        prop_assert!(again.was_saturated);
        for q in [2, 3] {
            prop_assert!(sat.is_p_power_saturated(q, 1_000_000).unwrap());
        }
    }

    #[test]
    fn faces_close_under_intersection(p in arb_monoid()) {
        let faces = p.faces();
        for a in faces {
            for b in faces {
                let meet: Vec<usize> = a.generators.iter().copied().filter(|g| b.contains(*g)).collect();
                prop_assert!(faces.iter().any(|f| f.generators == meet));
            }
        }
    }

    #[test]
    fn presentation_relations_hold(p in arb_monoid()) {
        for r in p.presentation() {
            prop_assert_eq!(p.evaluate(&r.lhs).unwrap(), p.evaluate(&r.rhs).unwrap());
        }
        let z = p.evaluate(&Word::zero()).unwrap();
        prop_assert!(z.iter().all(|&c| c == 0));
    }
}
