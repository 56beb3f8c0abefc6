use harmonic_sieve::characters::CharacterTable;
use harmonic_sieve::group::{build_group, subgroup_closure, GroupSpec, GroupTable};
use harmonic_sieve::harmonics::find_missing_harmonics;
use harmonic_sieve::kickback::KickbackCircuit;
use harmonic_sieve::linalg::{self, CVector};
use harmonic_sieve::multiregister::{subset_projector, MultiRegisterSpace, RegisterSubset};
use num_complex::Complex64;
use proptest::prelude::*;
use std::sync::OnceLock;

fn fixtures() -> &'static [GroupTable] {
    static G: OnceLock<Vec<GroupTable>> = OnceLock::new();
    G.get_or_init(|| {
        [
            GroupSpec::Cyclic(6),
            GroupSpec::Dihedral(4),
            GroupSpec::Dihedral(5),
            GroupSpec::Symmetric(3),
            GroupSpec::Symmetric(4),
            GroupSpec::ElementaryAbelian2(3),
            GroupSpec::DirectProduct(Box::new(GroupSpec::Cyclic(2)), Box::new(GroupSpec::Symmetric(3))),
        ]
        .iter()
        .map(|s| build_group(s).unwrap())
        .collect()
    })
}

fn complex_vec(len: usize) -> impl Strategy<Value = CVector> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len)
        .prop_filter("nonzero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
        .prop_map(|v| {
            let v = CVector::from_iterator(v.len(), v.into_iter().map(|(a, b)| Complex64::new(a, b)));
            let n = v.norm();
            v.unscale(n)
        })
}

proptest! {
    #[test]
    fn conjugation_composes(gi in 0usize..7, a in 0usize..48, b in 0usize..48, c in 0usize..48) {
        let g = &fixtures()[gi];
        let (a, b, c) = (a % g.order(), b % g.order(), c % g.order());
        // (ab)x(ab)⁻¹ = a(bxb⁻¹)a⁻¹
        prop_assert_eq!(g.conjugate(c, g.mul(a, b)), g.conjugate(g.conjugate(c, b), a));
        prop_assert_eq!(g.class_of(g.conjugate(c, a)), g.class_of(c));
    }

    #[test]
    fn closure_is_idempotent(gi in 0usize..7, gens in prop::collection::vec(0usize..48, 0..3)) {
        let g = &fixtures()[gi];
        let gens: Vec<usize> = gens.into_iter().map(|x| x % g.order()).collect();
        let h = subgroup_closure(g, &gens);
        prop_assert_eq!(&subgroup_closure(g, h.members()), &h);
        prop_assert_eq!(g.order() % h.order(), 0);
    }

    #[test]
    fn missing_harmonics_are_conjugation_invariant(gi in 0usize..7, x in 0usize..48, c in 0usize..48) {
        let g = &fixtures()[gi];
        let ct = CharacterTable::new(g).unwrap();
        let h = subgroup_closure(g, &[x % g.order()]);
        let hc = h.conjugate(c % g.order());
        prop_assert_eq!(find_missing_harmonics(&ct, &h).missing, find_missing_harmonics(&ct, &hc).missing);
    }

    #[test]
    fn subset_projectors_are_contractions(mask in 1u32..4, eta in 0usize..5, v in complex_vec(64)) {
        let g = &fixtures()[1];
        let ct = CharacterTable::new(g).unwrap();
        let space = MultiRegisterSpace::new(g, 2).unwrap();
        let p = subset_projector(&space, &ct, RegisterSubset::from_mask(mask, 2).unwrap(), eta).unwrap();
        let pv = p.apply(&v);
        // orthogonal projector: ‖Πv‖² = ⟨v, Πv⟩ and Π(Πv) = Πv
        prop_assert!((pv.norm_squared() - v.dotc(&pv).re).abs() < 1e-10);
        prop_assert!((p.apply(&pv) - &pv).norm() < 1e-10);
    }

    #[test]
    fn controlled_action_preserves_norm(v in complex_vec(24)) {
        let g = &fixtures()[3];
        let ct = CharacterTable::new(g).unwrap();
        let std = ct.lookup("standard").unwrap();
        let c = KickbackCircuit::new(&ct, &[std, std]).unwrap();
        let out = c.controlled_g_action(&v).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kickback_probabilities_sum_to_one(v in complex_vec(4)) {
        let g = &fixtures()[1];
        let ct = CharacterTable::new(g).unwrap();
        let c = KickbackCircuit::new(&ct, &[4, 4]).unwrap();
        let total: f64 = (0..ct.num_irreps()).map(|eta| c.probability(&ct, eta, &v).unwrap()).sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn random_states_are_unit(dim in 1usize..200, seed in any::<u64>()) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let v = linalg::random_state(dim, &mut rng);
        prop_assert!((v.norm() - 1.0).abs() < 1e-12);
    }
}
