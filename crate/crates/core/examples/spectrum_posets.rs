//! Specialization posets of spectra over Z for cyclic groups, as DOT.

use ttperm::grp::Group;
use ttperm::spectrum::{assemble_over_z, export_dot, orbit_colimit, sections_colimit, validate};

fn main() -> ttperm::error::Result<()> {
    for (n, p) in [(3, 3), (4, 2), (8, 2), (9, 3)] {
        let g = Group::cyclic(n);
        let s = sections_colimit(&g, p)?;
        println!("C{n}: {} points, matches direct assembly: {}", s.len(), s.isomorphic(&assemble_over_z(&g)?));
    }
    let c6 = orbit_colimit(&Group::cyclic(6))?;
    println!("C6 valid: {}", validate(&c6).passed());
    print!("{c6}");
    print!("{}", export_dot(&c6));
    Ok(())
}
