mod common;

use common::{element_in, small_spec};
use groupspectra::linalg::CMatrix;
use groupspectra::{enumerate_dual, FiniteGroup, GroupElement, GroupSpec, Subgroup, SubgroupKind};
use proptest::prelude::*;

fn group_and_triple() -> impl Strategy<Value = (FiniteGroup, GroupElement, GroupElement, GroupElement)> {
    small_spec().prop_flat_map(|s| {
        let g = FiniteGroup::new(s).unwrap();
        (Just(g.clone()), element_in(&g), element_in(&g), element_in(&g))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn group_axioms((g, a, b, c) in group_and_triple()) {
        let e = g.identity();
        prop_assert_eq!(g.op(&g.op(&a, &b), &c), g.op(&a, &g.op(&b, &c)));
        prop_assert_eq!(g.op(&a, &e), a.clone());
        prop_assert_eq!(g.op(&e, &a), a.clone());
        prop_assert_eq!(g.op(&a, &g.inv(&a)), e.clone());
        prop_assert_eq!(g.op(&g.inv(&a), &a), e);
        prop_assert_eq!(g.index_of(&g.element_at(g.index_of(&a))), g.index_of(&a));
    }

    #[test]
    fn element_order_divides_group_order((g, a, _, _) in group_and_triple()) {
        let t = g.element_order(&a).unwrap();
        prop_assert_eq!(g.order() % t, 0);
        prop_assert_eq!(g.pow(&a, t), g.identity());
    }

    #[test]
    fn irreps_are_unitary_homomorphisms((g, a, b, _) in group_and_triple(), pick in any::<prop::sample::Index>()) {
        let dual = enumerate_dual(&g).unwrap();
        let p = &dual.irreps()[pick.index(dual.len())];
        let pa = p.evaluate(&g, &a).unwrap();
        let pb = p.evaluate(&g, &b).unwrap();
        let pab = p.evaluate(&g, &g.op(&a, &b)).unwrap();
        prop_assert!((&pa * &pb).max_abs_diff(&pab) < 1e-12);
        prop_assert!((&pa * &pa.adjoint()).max_abs_diff(&CMatrix::identity(p.dim())) < 1e-12);
        prop_assert!((p.character(&a) - pa.trace()).norm() < 1e-12);
    }

    #[test]
    fn subgroup_membership_matches_enumeration(s in small_spec()) {
        let g = FiniteGroup::new(s).unwrap();
        let kinds = match s {
            GroupSpec::ScaledTorus { d, .. } => vec![SubgroupKind::TorusSublattice { periods: vec![1; d as usize] }],
            GroupSpec::Heisenberg { .. } => vec![SubgroupKind::HeisenbergIntegerPoints],
            GroupSpec::Dihedral { n } => vec![SubgroupKind::DihedralRotations { order: n }],
        };
        for kind in kinds.into_iter().chain([SubgroupKind::Trivial, SubgroupKind::Whole]) {
            let h = Subgroup::new(&g, kind).unwrap();
            let elems = h.elements().unwrap();
            prop_assert_eq!(elems.len() as u64, h.order());
            prop_assert_eq!(g.order() % h.order(), 0);
            for x in g.elements().unwrap() {
                prop_assert_eq!(h.contains(&x), elems.binary_search(&x).is_ok());
            }
            prop_assert!(h.is_normal().unwrap());
        }
    }
}

#[test]
fn heisenberg_order_and_integer_points() {
    let g = FiniteGroup::new(GroupSpec::Heisenberg { m: 2, n: 4 }).unwrap();
    assert_eq!(g.order(), 512);
    let h = Subgroup::new(&g, SubgroupKind::HeisenbergIntegerPoints).unwrap();
    assert_eq!(h.order(), 64);
    assert_eq!(h.index(), 8);
}

#[test]
fn generated_subgroup_normality() {
    let g = FiniteGroup::new(GroupSpec::Dihedral { n: 4 }).unwrap();
    let reflection =
        Subgroup::new(&g, SubgroupKind::Generated { generators: vec![GroupElement::new(&[0, 1])] }).unwrap();
    assert_eq!(reflection.order(), 2);
    assert!(!reflection.is_normal().unwrap());
    let center = Subgroup::new(&g, SubgroupKind::Generated { generators: vec![GroupElement::new(&[2, 0])] }).unwrap();
    assert!(center.is_normal().unwrap());
}
