//! Restriction of the generators to subgroups, and base change Z → F_p.

use ttperm::grp::{make_group, subgroups, GroupDescriptor};
use ttperm::ring::Ring;
use ttperm::twisted::{base_change_class_check, restriction_check, TwistedCohomology};

fn main() -> ttperm::error::Result<()> {
    for desc in ["C4", "C2xC2"] {
        let g = make_group(&GroupDescriptor::parse(desc)?)?;
        let ctx = TwistedCohomology::new(g.clone(), Ring::Integers)?;
        for i in 0..ctx.normals().len() {
            for h in &subgroups(&g)?.subgroups {
                let r = restriction_check(&ctx, i, h)?;
                println!("{desc} N={:?} H={:?}: passed {}", r.normal, r.subgroup, r.passed());
            }
        }
    }
    for p in [2usize, 3] {
        let ctx = TwistedCohomology::new(ttperm::grp::Group::cyclic(p), Ring::Integers)?;
        let r = base_change_class_check(&ctx, 0)?;
        for c in &r.classes {
            println!("C{p}: {} ↦ {}: {}", c.name, c.expected, c.ok);
        }
        println!("C{p}: power surjective {:?}, coprime fields {:?}", r.power_surjective, r.coprime);
    }
    Ok(())
}
