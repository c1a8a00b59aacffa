//! The `ttperm` command line. Every subcommand is one library call plus
//! formatting; exit codes are 0 (ok), 1 (usage) and 2 (a check failed).

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::io::Write;
use std::sync::Arc;

use crate::certificate::{verify_certificate, verify_json, Certificate, VerifyReport};
use crate::error::{Error, Result};
use crate::grp::{make_group, subgroups, Group, GroupDescriptor, Subgroup, ORDER_BOUND};
use crate::homotopy::EquivalenceOutcome;
use crate::koszul::{base_change_koszul_check, koszul_object};
use crate::ring::Ring;
use crate::spectrum::{assemble_over_z, export_dot, export_json, orbit_colimit, sections_colimit, validate};
use crate::twisted::{invertibility_check, ring_presentation, twisted_table, TwistedCohomology};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CHECK: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "ttperm", version, about = "Exact computations with permutation complexes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
    Dot,
}

#[derive(Args, Debug)]
pub struct Common {
    /// `C<n>` or an `x`-separated product such as `C2xC2`.
    #[arg(long)]
    pub group: String,
    /// `Z`, `Q` or `F<p>`.
    #[arg(long, default_value = "Z")]
    pub ring: String,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Re-check the result; exit 2 if a check fails.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Koszul object of a subgroup, with certificates.
    Kos {
        #[command(flatten)]
        common: Common,
        /// `1`, `G`, `C<k>` (unique subgroup of order k) or element list `0,2`.
        #[arg(long)]
        subgroup: String,
    },
    /// Twisted cohomology table and ring presentation.
    Twisted {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 4)]
        max_twist: u32,
        #[arg(long, allow_hyphen_values = true)]
        shift_min: Option<i32>,
        #[arg(long, allow_hyphen_values = true)]
        shift_max: Option<i32>,
        /// Worker threads for table entries (output does not depend on it).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Specialization poset of the spectrum over Z of a cyclic group.
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Largest group order admitted.
        #[arg(long, default_value_t = ORDER_BOUND)]
        seed_bound: usize,
    },
    /// Certify `u_N ⊗ u_N^* ≃ 1`.
    Invert {
        #[command(flatten)]
        common: Common,
        /// The index-p normal subgroup N (default: the unique one, if unique).
        #[arg(long)]
        subgroup: Option<String>,
    },
    /// Re-check a JSON certificate file.
    Verify {
        file: std::path::PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

/// Resolve `1`, `G`, `C<k>`/`<k>` (by order, if unique) or `a,b,...`.
pub fn parse_subgroup(g: &Group, s: &str) -> Result<Subgroup> {
    let t = s.trim();
    match t {
        "1" | "trivial" => return Ok(g.trivial_subgroup()),
        "G" | "whole" => return Ok(g.whole()),
        _ => {}
    }
    if t.contains(',') || t.starts_with('{') {
        let elems = t
            .trim_matches(|c| c == '{' || c == '}')
            .split(',')
            .map(|x| x.trim().parse::<usize>().map_err(|_| Error::NotSubgroup(format!("bad element {x:?}"))))
            .collect::<Result<Vec<_>>>()?;
        return g.subgroup_from(&elems);
    }
    let k: usize = t
        .trim_start_matches(['C', 'c'])
        .parse()
        .map_err(|_| Error::NotSubgroup(format!("cannot parse subgroup {s:?}")))?;
    let all: Vec<Subgroup> = subgroups(g)?.subgroups.into_iter().filter(|h| h.order() == k).collect();
    match all.len() {
        1 => Ok(all.into_iter().next().unwrap()),
        0 => Err(Error::NotSubgroup(format!("{g} has no subgroup of order {k}"))),
        n => {
            let lists: Vec<String> = all.iter().map(|h| format!("{:?}", h.elements())).collect();
            Err(Error::NotSubgroup(format!("{n} subgroups of order {k}; pick one by elements: {}", lists.join(" "))))
        }
    }
}

fn group(desc: &str) -> Result<Arc<Group>> {
    make_group(&GroupDescriptor::parse(desc)?)
}

/// What a subcommand produced: the payload and whether its checks passed.
struct Outcome {
    json: Value,
    text: String,
    dot: Option<String>,
    ok: bool,
}

fn report_json(r: &VerifyReport) -> Value {
    json!({
        "kind": r.kind,
        "passed": r.passed(),
        "checks": r.checks.iter().map(|(n, ok)| json!({"check": n, "ok": ok})).collect::<Vec<_>>(),
    })
}

fn report_text(r: &VerifyReport) -> String {
    let mut s = String::new();
    for (n, ok) in &r.checks {
        s.push_str(&format!("{} {n}\n", if *ok { "ok  " } else { "FAIL" }));
    }
    s
}

/// Serialize, re-parse and verify: the check sees only what a file would hold.
fn roundtrip_verify(cert: &Certificate) -> Result<VerifyReport> {
    let text = serde_json::to_string(cert)?;
    let back: Certificate = serde_json::from_str(&text)?;
    verify_certificate(&back)
}

fn kos(common: &Common, subgroup: &str) -> Result<Outcome> {
    let g = group(&common.group)?;
    let h = parse_subgroup(&g, subgroup)?;
    let ring = Ring::parse(&common.ring)?;
    let kos = koszul_object(&g, &h, ring)?;
    let ranks = kos.complex.ranks();
    let mut ok = true;
    let mut extra = json!({});
    let mut text = format!("kos({} ≤ {}) over {ring}: ranks {:?}\n", h.order(), g, ranks);
    if common.verify {
        let r = roundtrip_verify(&Certificate::Koszul { object: Box::new(kos.clone()) })?;
        ok &= r.passed();
        text.push_str(&report_text(&r));
        extra["verification"] = report_json(&r);
        if ring == Ring::Integers {
            let bc = base_change_koszul_check(&kos)?;
            for b in &bc {
                ok &= b.postconditions_hold();
                text.push_str(&format!(
                    "{} base change to {}: postconditions {}\n",
                    if b.postconditions_hold() { "ok  " } else { "FAIL" },
                    b.ring,
                    b.postconditions_hold()
                ));
            }
            extra["base_change"] = serde_json::to_value(&bc)?;
        }
    }
    let mut v = serde_json::to_value(Certificate::Koszul { object: Box::new(kos) })?;
    v["group"] = json!(common.group);
    v["subgroup"] = json!(h.elements());
    v["ring"] = json!(ring.to_string());
    v["ranks"] = json!(ranks);
    if let Value::Object(m) = extra {
        for (k, x) in m {
            v[k] = x;
        }
    }
    Ok(Outcome { json: v, text, dot: None, ok })
}

fn twisted(common: &Common, max_twist: u32, lo: Option<i32>, hi: Option<i32>) -> Result<Outcome> {
    let g = group(&common.group)?;
    let ring = Ring::parse(&common.ring)?;
    let ctx = TwistedCohomology::new(g, ring)?;
    let window = match (lo, hi) {
        (None, None) => None,
        (a, b) => Some((a.unwrap_or(-ctx.case().two_prime() * max_twist as i32), b.unwrap_or(0))),
    };
    let table = twisted_table(&ctx, max_twist, window)?;
    let pres = ring_presentation(&table)?;
    let tj = table.to_json();
    let v = json!({
        "certificate": "twisted_table",
        "group": common.group,
        "ring": ring.to_string(),
        "max_twist": max_twist,
        "table": tj,
        "presentation": pres,
    });
    let text = format!("{}\n{}", table.to_text(), pres);
    let ok = !common.verify || pres.check().is_ok();
    Ok(Outcome { json: v, text, dot: None, ok })
}

fn spectrum(common: &Common, seed_bound: usize) -> Result<Outcome> {
    let g = group(&common.group)?;
    if g.order() > seed_bound {
        return Err(Error::OrderBound { order: g.order(), bound: seed_bound });
    }
    let poset = orbit_colimit(&g)?;
    let report = validate(&poset);
    let mut ok = report.passed();
    let mut v = export_json(&poset);
    v["group"] = json!(common.group);
    let mut text = poset.to_string();
    if common.verify {
        v["validation"] = serde_json::to_value(&report)?;
        if let Some(p) = g.prime().filter(|&p| g.is_p_group(p)) {
            let same = sections_colimit(&g, p)?.isomorphic(&assemble_over_z(&g)?);
            ok &= same;
            v["sections_match_direct"] = json!(same);
            text.push_str(&format!("sections colimit matches direct assembly: {same}\n"));
        }
        text.push_str(&format!("validation passed: {}\n", report.passed()));
    }
    Ok(Outcome { json: v, text, dot: Some(export_dot(&poset)), ok })
}

fn invert(common: &Common, subgroup: Option<&str>) -> Result<Outcome> {
    let g = group(&common.group)?;
    let ring = Ring::parse(&common.ring)?;
    let p = g.prime().ok_or(Error::NotPGroup { p: 0 })?;
    let n = match subgroup {
        Some(s) => parse_subgroup(&g, s)?,
        None => {
            let mut all = g.index_p_normal(p)?;
            if all.len() != 1 {
                return Err(Error::NotSubgroup(format!("{} index-{p} normal subgroups; pass --subgroup", all.len())));
            }
            all.pop().unwrap()
        }
    };
    match invertibility_check(&g, &n, ring)? {
        EquivalenceOutcome::Found(e) => {
            let cert = Certificate::Equivalence { equivalence: e };
            let mut ok = true;
            let mut text = format!("u_N ⊗ u_N^* ≃ 1 over {ring} (N of order {}): equivalence found\n", n.order());
            let mut v = serde_json::to_value(&cert)?;
            if common.verify {
                let r = roundtrip_verify(&cert)?;
                ok = r.passed();
                text.push_str(&report_text(&r));
                v["verification"] = report_json(&r);
            }
            v["group"] = json!(common.group);
            v["ring"] = json!(ring.to_string());
            v["normal"] = json!(n.elements());
            Ok(Outcome { json: v, text, dot: None, ok })
        }
        EquivalenceOutcome::Inequivalent(why) | EquivalenceOutcome::Inconclusive(why) => Ok(Outcome {
            json: json!({"status": "failed", "reason": why}),
            text: format!("no equivalence: {why}\n"),
            dot: None,
            ok: false,
        }),
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::TheoryCheck(_) | Error::Validation(_) | Error::NotComplex(_) | Error::NotChainMap(_) => EXIT_CHECK,
        _ => EXIT_USAGE,
    }
}

fn dispatch(cmd: &Command) -> Result<(Outcome, Format)> {
    Ok(match cmd {
        Command::Kos { common, subgroup } => (kos(common, subgroup)?, common.format),
        Command::Twisted { common, max_twist, shift_min, shift_max, jobs } => {
            let run = || twisted(common, *max_twist, *shift_min, *shift_max);
            let out = match jobs {
                Some(j) => rayon::ThreadPoolBuilder::new()
                    .num_threads(*j)
                    .build()
                    .map_err(|e| Error::Bounds(e.to_string()))?
                    .install(run)?,
                None => run()?,
            };
            (out, common.format)
        }
        Command::Spectrum { common, seed_bound } => (spectrum(common, *seed_bound)?, common.format),
        Command::Invert { common, subgroup } => (invert(common, subgroup.as_deref())?, common.format),
        Command::Verify { file, format } => {
            let text = std::fs::read_to_string(file)?;
            let r = verify_json(&text)?;
            let ok = r.passed();
            (Outcome { json: report_json(&r), text: report_text(&r), dot: None, ok }, *format)
        }
    })
}

/// Run with the given arguments (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{}", e.render()) } else { write!(out, "{}", e.render()) };
            return code;
        }
    };
    match dispatch(&cli.command) {
        Ok((o, format)) => {
            let body = match format {
                Format::Json => serde_json::to_string_pretty(&o.json).unwrap() + "\n",
                Format::Text => o.text,
                Format::Dot => match o.dot {
                    Some(d) => d,
                    None => {
                        let _ = writeln!(err, "error: --format dot is only available for `spectrum`");
                        return EXIT_USAGE;
                    }
                },
            };
            let _ = out.write_all(body.as_bytes());
            if o.ok {
                EXIT_OK
            } else {
                EXIT_CHECK
            }
        }
        Err(e) => {
            let code = exit_code(&e);
            if code == EXIT_CHECK {
                let _ = writeln!(out, "{}", json!({"status": "failed", "error": e.to_string()}));
            }
            let _ = writeln!(err, "error: {e}");
            code
        }
    }
}
