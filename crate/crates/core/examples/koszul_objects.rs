//! Koszul objects for subgroups of small p-groups, with base change checks.

use ttperm::cli::parse_subgroup;
use ttperm::grp::{make_group, GroupDescriptor};
use ttperm::koszul::{base_change_koszul_check, koszul_object};
use ttperm::ring::Ring;

fn main() -> ttperm::error::Result<()> {
    for (g, h) in [("C2", "1"), ("C4", "C2"), ("C4", "1"), ("C3", "1"), ("C2xC2", "0,1")] {
        let group = make_group(&GroupDescriptor::parse(g)?)?;
        let sub = parse_subgroup(&group, h)?;
        let kos = koszul_object(&group, &sub, Ring::Integers)?;
        let bc = base_change_koszul_check(&kos)?;
        let steps: Vec<bool> = kos.audit.steps.iter().map(|s| s.unmodified()).collect();
        println!(
            "kos({h} ≤ {g}): ranks {:?}, sign steps no-op {:?}, base change ok {}",
            kos.complex.ranks(),
            steps,
            bc.iter().all(|r| r.postconditions_hold())
        );
    }
    Ok(())
}
