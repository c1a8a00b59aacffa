//! Twist-zero localizations of the integral twisted ring of C_p.

use ttperm::grp::Group;
use ttperm::ring::Ring;
use ttperm::twisted::{localize_twist0, twisted_table, TwistedCohomology};

fn main() -> ttperm::error::Result<()> {
    for p in [2usize, 3] {
        let g = Group::cyclic(p);
        let ctx = TwistedCohomology::new(g.clone(), Ring::Integers)?;
        let table = twisted_table(&ctx, ctx.twist_bound(), None)?;
        for h in [g.trivial_subgroup(), g.whole()] {
            let loc = localize_twist0(&table, &h)?;
            let hilbert: Vec<String> = loc.hilbert(5)?.iter().map(|m| m.to_string()).collect();
            println!("C{p}, H of order {}: invert {}; degrees 0..4: {}", h.order(), loc.inverted, hilbert.join(", "));
        }
    }
    Ok(())
}
