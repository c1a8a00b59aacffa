//! Certificates survive a JSON round trip and are re-checked from scratch.

use ttperm::certificate::{verify_json, Certificate};
use ttperm::grp::Group;
use ttperm::koszul::koszul_object;
use ttperm::ring::Ring;

fn main() -> ttperm::error::Result<()> {
    let g = Group::cyclic(4);
    let h = g.generate(&[2]);
    let kos = koszul_object(&g, &h, Ring::Integers)?;
    let text = serde_json::to_string(&Certificate::Koszul { object: Box::new(kos) })?;
    println!("certificate: {} bytes", text.len());
    let report = verify_json(&text)?;
    for (check, ok) in &report.checks {
        println!("{} {check}", if *ok { "ok  " } else { "FAIL" });
    }
    Ok(())
}
