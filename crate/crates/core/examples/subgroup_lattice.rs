//! Subgroup lattices and the sections category of a p-group.

use ttperm::grp::{make_group, sections_category, subgroup_name, subgroups, GroupDescriptor};

fn main() -> ttperm::error::Result<()> {
    for desc in ["C4", "C2xC2", "D8", "C9"] {
        let g = make_group(&GroupDescriptor::parse(desc)?)?;
        let lat = subgroups(&g)?;
        let names: Vec<String> = lat.subgroups.iter().map(subgroup_name).collect();
        println!("{desc}: {} subgroups, {} conjugacy classes", lat.subgroups.len(), lat.classes.len());
        println!("  {}", names.join(" "));
        let p = g.prime().unwrap();
        let cat = sections_category(&g, p)?;
        let (reps, arrows) = cat.reduced_poset(&g);
        println!("  E_{p}: {} objects, {} morphisms; reduced poset {} points, {} arrows", cat.objects.len(), cat.morphisms.len(), reps.len(), arrows.len());
    }
    Ok(())
}
