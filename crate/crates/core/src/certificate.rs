//! Self-contained JSON certificates and their independent re-verification.
//!
//! Everything inside a certificate is re-validated from scratch: group
//! tables, module actions, `d∘d = 0`, equivariance, and the homotopy
//! identities themselves. Nothing produced by the search is trusted.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::sync::Arc;

use crate::chain::{equivariant, restrict_complex, ChainMap, Complex};
use crate::error::{Error, Result};
use crate::grp::{make_group, GroupDescriptor};
use crate::homotopy::{Homotopy, HomotopyCertificate, HomotopyEquivalence};
use crate::koszul::{verify_postconditions, KoszulObject};
use crate::ring::Ring;
use crate::spectrum::{import_json, orbit_colimit, validate};
use crate::twisted::{twisted_table, TwistedCohomology};

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "certificate", rename_all = "snake_case")]
pub enum Certificate {
    /// A Koszul object together with the contraction of its restriction.
    Koszul { object: Box<KoszulObject> },
    /// A homotopy equivalence `X ≃ Y`.
    Equivalence { equivalence: Box<HomotopyEquivalence> },
    /// `C ≃ 0` via `d h + h d = id`.
    Contraction { contraction: HomotopyCertificate },
    /// `f = d h + h d`.
    NullHomotopy { map: ChainMap, homotopy: Homotopy },
    /// A spectrum poset in the export format for a cyclic group.
    Spectrum { group: String, poset: Value },
    /// A twisted cohomology table; checked by recomputation.
    TwistedTable { group: String, ring: String, max_twist: u32, table: Value },
}

// Internally tagged enums buffer their content, which loses the integer map
// keys of degree-indexed components; dispatch on the tag by hand instead.
impl<'de> Deserialize<'de> for Certificate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let v = Value::deserialize(d)?;
        let parse = |k: &str| v.get(k).cloned().ok_or_else(|| D::Error::custom(format!("missing field `{k}`")));
        let conv = |e: serde_json::Error| D::Error::custom(e.to_string());
        let tag = v.get("certificate").and_then(Value::as_str).ok_or_else(|| D::Error::missing_field("certificate"))?;
        Ok(match tag {
            "koszul" => Certificate::Koszul { object: serde_json::from_value(parse("object")?).map_err(conv)? },
            "equivalence" => Certificate::Equivalence { equivalence: serde_json::from_value(parse("equivalence")?).map_err(conv)? },
            "contraction" => Certificate::Contraction { contraction: serde_json::from_value(parse("contraction")?).map_err(conv)? },
            "null_homotopy" => Certificate::NullHomotopy {
                map: serde_json::from_value(parse("map")?).map_err(conv)?,
                homotopy: serde_json::from_value(parse("homotopy")?).map_err(conv)?,
            },
            "spectrum" => Certificate::Spectrum {
                group: serde_json::from_value(parse("group")?).map_err(conv)?,
                poset: parse("poset")?,
            },
            "twisted_table" => Certificate::TwistedTable {
                group: serde_json::from_value(parse("group")?).map_err(conv)?,
                ring: serde_json::from_value(parse("ring")?).map_err(conv)?,
                max_twist: serde_json::from_value(parse("max_twist")?).map_err(conv)?,
                table: parse("table")?,
            },
            other => return Err(D::Error::unknown_variant(other, VARIANTS)),
        })
    }
}

const VARIANTS: &[&str] = &["koszul", "equivalence", "contraction", "null_homotopy", "spectrum", "twisted_table"];

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub kind: String,
    pub checks: Vec<(String, bool)>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.1)
    }
}

fn complex(x: &Arc<Complex>) -> Result<Arc<Complex>> {
    Ok(Arc::new((**x).clone().revalidate()?))
}

fn chain_map(f: &ChainMap) -> Result<ChainMap> {
    ChainMap::new(complex(&f.source)?, complex(&f.target)?, f.components().clone())
}

fn homotopy(h: &Homotopy, source: &Arc<Complex>, target: &Arc<Complex>) -> Result<Homotopy> {
    if *h.source != **source || *h.target != **target {
        return Err(Error::Validation("homotopy between the wrong complexes".into()));
    }
    for (&n, m) in h.components() {
        if m.shape() != (target.rank(n + 1), source.rank(n)) {
            return Err(Error::Validation(format!("homotopy component in degree {n} has the wrong shape")));
        }
        if !equivariant(source.term(n), target.term(n + 1), m) {
            return Err(Error::Validation(format!("homotopy component in degree {n} is not equivariant")));
        }
    }
    Ok(Homotopy::new(source.clone(), target.clone(), h.components().clone()))
}

fn contraction(c: &HomotopyCertificate) -> Result<bool> {
    let cert = HomotopyCertificate { complex: complex(&c.complex)?, h: c.h.clone() };
    Ok(cert.verify().is_ok())
}

fn equivalence(e: &HomotopyEquivalence) -> Result<Vec<(String, bool)>> {
    let f = chain_map(&e.f)?;
    let g = chain_map(&e.g)?;
    let hx = homotopy(&e.hx, &f.source, &f.source)?;
    let hy = homotopy(&e.hy, &f.target, &f.target)?;
    let rebuilt = HomotopyEquivalence { f, g, hx, hy };
    let ok = rebuilt.verify();
    Ok(vec![("g f ≃ id and f g ≃ id".into(), ok.is_ok())])
}

/// Re-check a certificate. Malformed input is an error; a well-formed
/// certificate whose identities fail yields a report with failed checks.
pub fn verify_certificate(cert: &Certificate) -> Result<VerifyReport> {
    let (kind, checks) = match cert {
        Certificate::Koszul { object } => {
            let x = complex(&object.complex)?;
            let h = x.group().subgroup_from(object.subgroup.elements())?;
            let post = verify_postconditions(&x, &h);
            let (_, r) = restrict_complex(&x, &h)?;
            let same = *object.restriction_certificate.complex == r;
            let cert_ok = contraction(&object.restriction_certificate)?;
            (
                "koszul",
                vec![
                    ("degree 0 is R, degree 1 induced, acyclic, restriction contractible".into(), post.is_ok()),
                    ("attached certificate is for the restriction".into(), same),
                    ("attached certificate satisfies d h + h d = id".into(), cert_ok),
                ],
            )
        }
        Certificate::Equivalence { equivalence: e } => ("equivalence", equivalence(e)?),
        Certificate::Contraction { contraction: c } => ("contraction", vec![("d h + h d = id".into(), contraction(c)?)]),
        Certificate::NullHomotopy { map, homotopy: h } => {
            let f = chain_map(map)?;
            let h = homotopy(h, &f.source, &f.target)?;
            ("null_homotopy", vec![("f = d h + h d".into(), h.witnesses(&f))])
        }
        Certificate::Spectrum { group, poset } => {
            let g = make_group(&GroupDescriptor::parse(group)?)?;
            let given = import_json(poset)?;
            let listed = poset["specializations"].as_array().map_or(0, Vec::len);
            let expected = orbit_colimit(&g)?;
            (
                "spectrum",
                vec![
                    ("specializations transitively closed".into(), listed == given.relations.len()),
                    ("T0, antisymmetric, sober, fibers closed".into(), validate(&given).passed()),
                    ("matches the recomputed colimit".into(), given.isomorphic(&expected)),
                ],
            )
        }
        Certificate::TwistedTable { group, ring, max_twist, table } => {
            let g = make_group(&GroupDescriptor::parse(group)?)?;
            let ctx = TwistedCohomology::new(g, Ring::parse(ring)?)?;
            let w = &table["shift_window"];
            let window = match (w[0].as_i64(), w[1].as_i64()) {
                (Some(a), Some(b)) => Some((a as i32, b as i32)),
                _ => None,
            };
            let fresh = twisted_table(&ctx, *max_twist, window)?.to_json();
            ("twisted_table", vec![("entries match a recomputation".into(), fresh["entries"] == table["entries"])])
        }
    };
    Ok(VerifyReport { kind: kind.into(), checks })
}

/// Parse and verify a certificate file's contents. A bare spectrum export
/// carrying a `group` key is accepted as a spectrum certificate.
pub fn verify_json(text: &str) -> Result<VerifyReport> {
    let v: Value = serde_json::from_str(text)?;
    let cert = if v.get("certificate").is_none() && v.get("points").is_some() {
        let group = v["group"].as_str().ok_or_else(|| Error::Validation("spectrum export without a group".into()))?;
        Certificate::Spectrum { group: group.to_string(), poset: v.clone() }
    } else {
        serde_json::from_value(v)?
    };
    verify_certificate(&cert)
}
