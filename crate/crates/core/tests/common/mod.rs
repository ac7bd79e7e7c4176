#![allow(dead_code)]

use groupspectra::{FiniteGroup, GroupElement, GroupSpec};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Small groups from every family, all with order at most 512.
pub fn small_spec() -> impl Strategy<Value = GroupSpec> {
    prop_oneof![
        (1u32..=2, 1u64..=3, 1u64..=6).prop_map(|(d, m, n)| GroupSpec::ScaledTorus { d, m, n }),
        (1u64..=2, 1u64..=4).prop_map(|(m, n)| GroupSpec::Heisenberg { m, n }),
        (1u64..=24).prop_map(|n| GroupSpec::Dihedral { n }),
    ]
}

pub fn element_in(group: &FiniteGroup) -> impl Strategy<Value = GroupElement> {
    let moduli: Vec<u32> = group.moduli().to_vec();
    moduli.into_iter().map(|q| 0..q).collect::<Vec<_>>().prop_map(|c| GroupElement::new(&c))
}

pub fn random_values(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
}

pub fn rel_err(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

/// The groups used by the exhaustive checks, in ascending order.
pub fn catalog(max_order: u64) -> Vec<GroupSpec> {
    let mut v = Vec::new();
    for (d, m, n) in
        [(1, 1, 8), (1, 2, 6), (2, 1, 4), (2, 2, 3), (3, 1, 4), (1, 4, 64), (2, 4, 8), (2, 1, 32), (3, 2, 8)]
    {
        v.push(GroupSpec::ScaledTorus { d, m, n });
    }
    for (m, n) in [(1, 2), (1, 3), (2, 2), (1, 4), (2, 3), (1, 6), (2, 4), (1, 8), (3, 4), (2, 6), (4, 4), (1, 16)] {
        v.push(GroupSpec::Heisenberg { m, n });
    }
    for n in [1, 2, 3, 4, 5, 6, 8, 12, 16, 31, 32, 64, 512, 2048] {
        v.push(GroupSpec::Dihedral { n });
    }
    v.into_iter().filter(|s| FiniteGroup::new(*s).map(|g| g.order() <= max_order).unwrap_or(false)).collect()
}
