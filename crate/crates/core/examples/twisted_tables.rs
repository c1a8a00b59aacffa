//! Twisted cohomology tables and ring presentations for C2 and C3.

use ttperm::grp::Group;
use ttperm::ring::Ring;
use ttperm::twisted::{ring_presentation, twisted_table, TwistedCohomology};

fn main() -> ttperm::error::Result<()> {
    for (n, ring, q) in [(2, Ring::PrimeField(2), 4), (3, Ring::PrimeField(3), 3), (3, Ring::Integers, 3), (2, Ring::Rationals, 2)] {
        let ctx = TwistedCohomology::new(Group::cyclic(n), ring)?;
        let table = twisted_table(&ctx, q, None)?;
        print!("{}", table.to_text());
        println!("{}", ring_presentation(&table)?);
    }
    Ok(())
}
