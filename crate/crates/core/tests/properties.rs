use std::sync::Arc;

use proptest::prelude::*;

use homogeneous::action::{coset_action, identity_coset};
use homogeneous::group::{is_normal, left_cosets, normal_core, subgroup_generated};
use homogeneous::measure::{invariant_measure, invariant_measure_space_dim, verify_invariance};
use homogeneous::phi::{phi_map, PhiOutcome};
use homogeneous::{group_from_generators, natural_action, stabilizer, Permutation};

fn permutation(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::new(v).unwrap())
}

fn generators() -> impl Strategy<Value = (usize, Vec<Permutation>)> {
    (1usize..=6).prop_flat_map(|n| (Just(n), prop::collection::vec(permutation(n), 1..=3)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closure_is_a_group((n, gens) in generators()) {
        let g = group_from_generators(n, &gens).unwrap();
        g.check_unit_axioms().unwrap();
        g.check_associativity(20_000, 0).unwrap();
        for p in &gens {
            prop_assert!(g.index_of(p).is_some());
        }
        for a in g.elements() {
            prop_assert_eq!(g.label(g.inv(a)).unwrap(), &g.label(a).unwrap().inverse());
        }
    }

    #[test]
    fn lagrange_and_core((n, gens) in generators(), seed in 0usize..1000) {
        let g = group_from_generators(n, &gens).unwrap();
        let h = subgroup_generated(&g, &[seed % g.order()]).unwrap();
        prop_assert_eq!(g.order() % h.order(), 0);
        let cosets = left_cosets(&g, &h);
        prop_assert_eq!(cosets.cosets.len() * h.order(), g.order());
        let core = normal_core(&g, &h);
        prop_assert!(is_normal(&g, &core));
        prop_assert_eq!(is_normal(&g, &h), core.members() == h.members());
    }

    #[test]
    fn orbit_stabilizer((n, gens) in generators()) {
        let g = Arc::new(group_from_generators(n, &gens).unwrap());
        let a = natural_action(g.clone()).unwrap();
        a.check_axioms().unwrap();
        for x in 0..n {
            prop_assert_eq!(a.orbit(x).len() * stabilizer(&a, x).unwrap().order(), g.order());
        }
        prop_assert_eq!(invariant_measure_space_dim(&a), a.orbits().len());
    }

    #[test]
    fn coset_actions_are_transitive((n, gens) in generators(), seed in 0usize..1000) {
        let g = Arc::new(group_from_generators(n, &gens).unwrap());
        let h = subgroup_generated(&g, &[seed % g.order()]).unwrap();
        let a = coset_action(g.clone(), &h);
        prop_assert!(a.is_transitive());
        let base = identity_coset(&g, &h);
        let stab = stabilizer(&a, base).unwrap();
        prop_assert_eq!(stab.members(), h.members());
        let m = invariant_measure(&a, base).unwrap();
        prop_assert!(m.is_uniform() && verify_invariance(&m, &a));
        for x in 0..a.degree() {
            let normal = is_normal(&g, &stabilizer(&a, x).unwrap());
            let defined = matches!(phi_map(&a, x).unwrap(), PhiOutcome::WellDefined(_));
            prop_assert_eq!(normal, defined);
        }
    }

    #[test]
    fn display_parse_round_trip(p in (1usize..=9).prop_flat_map(permutation)) {
        let n = p.degree();
        prop_assert_eq!(Permutation::parse(&p.to_string(), n).unwrap(), p.clone());
        let images = format!("{:?}", p.images());
        prop_assert_eq!(Permutation::parse(&images, n).unwrap(), p.clone());
        prop_assert_eq!(p.compose(&p.inverse()), Permutation::identity(n));
    }
}
