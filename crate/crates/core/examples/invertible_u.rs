//! `u ⊗ u* ≃ 1` for the cyclic groups of order 2, 3, 5, with exact certificates.

use ttperm::grp::Group;
use ttperm::ring::Ring;
use ttperm::twisted::{invertibility_check, u_complex};

fn main() -> ttperm::error::Result<()> {
    for p in [2usize, 3, 5] {
        let g = Group::cyclic(p);
        let n = g.trivial_subgroup();
        let u = u_complex(&g, &n, Ring::Integers)?;
        let out = invertibility_check(&g, &n, Ring::Integers)?;
        let verified = out.found().map(|e| e.verify().is_ok());
        println!("C{p}: u ranks {:?}; equivalence verified: {verified:?}", u.ranks());
    }
    Ok(())
}
