mod common;

use proptest::prelude::*;
use std::sync::Arc;

use common::{brute_force_hom, shifts};
use ttperm::chain::{tensor_complex, Complex};
use ttperm::grp::Group;
use ttperm::homotopy::hom_group;
use ttperm::ring::Ring;
use ttperm::twisted::{default_sigma, u_power};

fn agree(y: &Arc<Complex>) {
    for s in shifts(y) {
        let p = hom_group(y, s).presentation;
        assert_eq!((p.rank, p.torsion.clone()), brute_force_hom(y, s), "shift {s}, ranks {:?}", y.ranks());
    }
}

#[test]
fn unit_has_endomorphisms_r() {
    for ring in [Ring::Integers, Ring::Rationals, Ring::PrimeField(3)] {
        let one = Complex::unit(Group::cyclic(3), ring);
        assert_eq!(brute_force_hom(&one, 0), (1, vec![]));
    }
}

#[test]
fn integral_u_for_c2() {
    // u ⊗ u over Z for C2: concentrated top homology, torsion below
    let g = Group::cyclic(2);
    let n = g.trivial_subgroup();
    let u = u_power(&g, &n, default_sigma(&g, &n).unwrap(), 1, Ring::Integers).unwrap();
    let uu = Arc::new(tensor_complex(&u, &u).unwrap());
    agree(&uu);
    assert_eq!(brute_force_hom(&u, 0), (0, vec![2]));
}

fn ring_strategy() -> impl Strategy<Value = Ring> {
    prop_oneof![Just(Ring::Integers), Just(Ring::Rationals), Just(Ring::PrimeField(2)), Just(Ring::PrimeField(3))]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hom_matches_brute_force_on_u_powers(p in prop_oneof![Just(2usize), Just(3)], k in 0u32..4, ring in ring_strategy()) {
        let g = Group::cyclic(p);
        let n = g.trivial_subgroup();
        let y = Arc::new(u_power(&g, &n, default_sigma(&g, &n).unwrap(), k, ring).unwrap());
        agree(&y);
    }
}
