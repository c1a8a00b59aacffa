//! Finite specialization posets for spectra of cyclic groups over Z.
//!
//! A poset lists its points and the transitively closed relation `x ⤳ y`
//! ("y lies in the closure of x"). The infinitely many ordinary primes not
//! singled out are collapsed into one [`SpcPoint::OrdinaryFamily`] point.

use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::grp::{orbit_category, sections_category, subgroups, Group};
use crate::ring::is_prime;

/// Which closed endpoint of a `C_p`-section's V receives the image of the
/// modular point of Spec(Z) along a transition that keeps the top group
/// (fixed-point type) ...
pub const PSI_ENDPOINT: usize = 0;
/// ... and along one that keeps the bottom group (restriction type).
pub const RHO_ENDPOINT: usize = 1;

/// Above 16 points the brute-force soberness check is skipped.
const SOBER_BRUTE_FORCE_LIMIT: usize = 16;

/// The cohomological part of a modular label: the irrelevant ideal (a closed
/// point `m`) or the zero ideal (a generic point `p`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum CohTag {
    Generic,
    Irrelevant,
}

/// `P(H, a, p)`; subgroups of a cyclic group are determined by their order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ModularLabel {
    pub prime: u64,
    pub subgroup: usize,
    pub tag: CohTag,
}

impl ModularLabel {
    fn sort_key(&self) -> (u64, std::cmp::Reverse<usize>, CohTag) {
        (self.prime, std::cmp::Reverse(self.subgroup), self.tag)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SpcPoint {
    OrdinaryZero,
    OrdinaryPrime(u64),
    OrdinaryFamily { excluded: Vec<u64> },
    Modular(ModularLabel),
}

impl SpcPoint {
    pub fn is_modular(&self) -> bool {
        matches!(self, SpcPoint::Modular(_))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SpcPoint::OrdinaryZero => "ordinary_zero",
            SpcPoint::OrdinaryPrime(_) => "ordinary_prime",
            SpcPoint::OrdinaryFamily { .. } => "ordinary_family",
            SpcPoint::Modular(_) => "modular",
        }
    }

    /// Residue characteristic, if any.
    pub fn prime(&self) -> Option<u64> {
        match self {
            SpcPoint::OrdinaryPrime(q) => Some(*q),
            SpcPoint::Modular(l) => Some(l.prime),
            _ => None,
        }
    }

    fn sort_key(&self) -> (u8, u64, std::cmp::Reverse<usize>, CohTag) {
        match self {
            SpcPoint::OrdinaryZero => (0, 0, std::cmp::Reverse(0), CohTag::Generic),
            SpcPoint::OrdinaryPrime(q) => (1, *q, std::cmp::Reverse(0), CohTag::Generic),
            SpcPoint::OrdinaryFamily { .. } => (2, 0, std::cmp::Reverse(0), CohTag::Generic),
            SpcPoint::Modular(l) => {
                let (p, s, t) = l.sort_key();
                (3, p, s, t)
            }
        }
    }
}

impl Ord for SpcPoint {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.sort_key().cmp(&other.sort_key()).then_with(|| match (self, other) {
            (SpcPoint::OrdinaryFamily { excluded: a }, SpcPoint::OrdinaryFamily { excluded: b }) => a.cmp(b),
            _ => std::cmp::Ordering::Equal,
        })
    }
}
impl PartialOrd for SpcPoint {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

fn log_p(mut n: usize, p: u64) -> u32 {
    let mut k = 0;
    while n > 1 {
        n /= p as usize;
        k += 1;
    }
    k
}

fn prime_divisors(mut n: usize) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d as u64);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n as u64);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicPoset {
    pub points: Vec<SpcPoint>,
    /// Strict pairs `(from, to)`, transitively closed.
    pub relations: BTreeSet<(usize, usize)>,
}

impl SymbolicPoset {
    /// Transitively closes `relations` and sorts points canonically.
    pub fn new(points: Vec<SpcPoint>, relations: impl IntoIterator<Item = (usize, usize)>) -> SymbolicPoset {
        let n = points.len();
        let mut reach = vec![vec![false; n]; n];
        for (a, b) in relations {
            reach[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if reach[i][k] {
                    for j in 0..n {
                        if reach[k][j] {
                            reach[i][j] = true;
                        }
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| points[a].cmp(&points[b]));
        let mut pos = vec![0; n];
        for (new, &old) in order.iter().enumerate() {
            pos[old] = new;
        }
        let mut rel = BTreeSet::new();
        for i in 0..n {
            for j in 0..n {
                // keep self-loops: they only arise from cycles and validate reports them
                if reach[i][j] {
                    rel.insert((pos[i], pos[j]));
                }
            }
        }
        SymbolicPoset { points: order.into_iter().map(|i| points[i].clone()).collect(), relations: rel }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn specializes(&self, x: usize, y: usize) -> bool {
        self.relations.contains(&(x, y))
    }

    pub fn find(&self, p: &SpcPoint) -> Option<usize> {
        self.points.iter().position(|q| q == p)
    }

    pub fn modular_points(&self, prime: u64) -> Vec<usize> {
        (0..self.len()).filter(|&i| matches!(&self.points[i], SpcPoint::Modular(l) if l.prime == prime)).collect()
    }

    pub fn modular_primes(&self) -> Vec<u64> {
        self.points.iter().filter_map(|p| if let SpcPoint::Modular(l) = p { Some(l.prime) } else { None }).collect::<BTreeSet<_>>().into_iter().collect()
    }

    /// Closure of a point: itself and everything it specializes to.
    pub fn closure(&self, x: usize) -> BTreeSet<usize> {
        let mut c: BTreeSet<usize> = self.relations.iter().filter(|r| r.0 == x).map(|r| r.1).collect();
        c.insert(x);
        c
    }

    /// Covering pairs of the strict relation.
    pub fn hasse(&self) -> Vec<(usize, usize)> {
        self.relations
            .iter()
            .filter(|&&(a, b)| a != b && !(0..self.len()).any(|z| z != a && z != b && self.specializes(a, z) && self.specializes(z, b)))
            .copied()
            .collect()
    }

    /// Exponent of the largest modular subgroup label, per prime.
    fn heights(&self) -> BTreeMap<u64, u32> {
        let mut h = BTreeMap::new();
        for p in &self.points {
            if let SpcPoint::Modular(l) = p {
                let e = h.entry(l.prime).or_insert(0);
                *e = (*e).max(log_p(l.subgroup, l.prime));
            }
        }
        h
    }

    /// `m_i` / `p_i` numbering along the normal series, top group first.
    pub fn index_of(&self, l: &ModularLabel) -> u32 {
        self.heights()[&l.prime] - log_p(l.subgroup, l.prime)
    }

    pub fn id(&self, i: usize) -> String {
        match &self.points[i] {
            SpcPoint::OrdinaryZero => "zero".into(),
            SpcPoint::OrdinaryPrime(q) => format!("q{q}"),
            SpcPoint::OrdinaryFamily { .. } => "family".into(),
            SpcPoint::Modular(l) => {
                let t = if l.tag == CohTag::Irrelevant { "m" } else { "p" };
                format!("{t}{}_{}", self.index_of(l), l.prime)
            }
        }
    }

    pub fn label(&self, i: usize) -> String {
        match &self.points[i] {
            SpcPoint::OrdinaryZero => "(0)".into(),
            SpcPoint::OrdinaryPrime(q) => format!("({q})"),
            SpcPoint::OrdinaryFamily { excluded } if excluded.is_empty() => "(q)".into(),
            SpcPoint::OrdinaryFamily { excluded } => {
                let e: Vec<String> = excluded.iter().map(u64::to_string).collect();
                format!("(q), q ∉ {{{}}}", e.join(","))
            }
            SpcPoint::Modular(l) => {
                let t = if l.tag == CohTag::Irrelevant { "m" } else { "p" };
                let base = format!("{t}_{}", self.index_of(l));
                if self.modular_primes().len() > 1 {
                    format!("{base}[{}]", l.prime)
                } else {
                    base
                }
            }
        }
    }

    /// Points and relations by label; equal signatures mean isomorphic labeled posets.
    pub fn signature(&self) -> (BTreeSet<String>, BTreeSet<(String, String)>) {
        let pts = (0..self.len()).map(|i| self.id(i)).collect();
        let rel = self.relations.iter().map(|&(a, b)| (self.id(a), self.id(b))).collect();
        (pts, rel)
    }

    pub fn isomorphic(&self, other: &SymbolicPoset) -> bool {
        self.points.len() == other.points.len() && self.signature() == other.signature()
    }

    /// Replace the family by concrete points for `primes` it does not already exclude.
    pub fn refine(&self, primes: &[u64]) -> SymbolicPoset {
        let mut points = self.points.clone();
        let mut rel: Vec<(usize, usize)> = self.relations.iter().copied().collect();
        if let Some(f) = points.iter().position(|p| matches!(p, SpcPoint::OrdinaryFamily { .. })) {
            let SpcPoint::OrdinaryFamily { excluded } = points[f].clone() else { unreachable!() };
            let new: Vec<u64> = primes.iter().copied().filter(|q| !excluded.contains(q)).collect();
            let mut ex: BTreeSet<u64> = excluded.into_iter().collect();
            ex.extend(&new);
            points[f] = SpcPoint::OrdinaryFamily { excluded: ex.into_iter().collect() };
            for q in new {
                points.push(SpcPoint::OrdinaryPrime(q));
                let k = points.len() - 1;
                for &(a, b) in &self.relations {
                    if b == f {
                        rel.push((a, k));
                    }
                }
            }
        }
        SymbolicPoset::new(points, rel)
    }
}

/// Spectrum of `K(C_{p^n}, k)` for a field of characteristic `p`.
pub fn seed_cyclic_field(n: u32, p: u64) -> SymbolicPoset {
    let order = |i: u32| (p as usize).pow(n - i);
    let mut points = Vec::new();
    let mut rel = Vec::new();
    for i in 0..=n {
        points.push(SpcPoint::Modular(ModularLabel { prime: p, subgroup: order(i), tag: CohTag::Irrelevant }));
    }
    for i in 1..=n {
        points.push(SpcPoint::Modular(ModularLabel { prime: p, subgroup: order(i), tag: CohTag::Generic }));
        let k = points.len() - 1;
        rel.push((k, (i - 1) as usize));
        rel.push((k, i as usize));
    }
    SymbolicPoset::new(points, rel)
}

/// Spec(Z) with `(p)` named as the modular point of the trivial group at `subgroup`.
fn spec_z(p: u64, subgroup: usize) -> SymbolicPoset {
    SymbolicPoset::new(
        vec![
            SpcPoint::OrdinaryZero,
            SpcPoint::OrdinaryFamily { excluded: vec![p] },
            SpcPoint::Modular(ModularLabel { prime: p, subgroup, tag: CohTag::Irrelevant }),
        ],
        [(0, 1), (0, 2)],
    )
}

/// Ordinary fiber `{(0)} ∪ family` plus the field seed, with `(0) ⤳ m_i`.
pub fn assemble_cyclic(p: u64, n: u32) -> SymbolicPoset {
    let seed = seed_cyclic_field(n, p);
    let mut points = vec![SpcPoint::OrdinaryZero, SpcPoint::OrdinaryFamily { excluded: vec![p] }];
    let mut rel = vec![(0, 1)];
    for (i, x) in seed.points.iter().enumerate() {
        points.push(x.clone());
        if matches!(x, SpcPoint::Modular(l) if l.tag == CohTag::Irrelevant) {
            rel.push((0, i + 2));
        }
    }
    rel.extend(seed.relations.iter().map(|&(a, b)| (a + 2, b + 2)));
    SymbolicPoset::new(points, rel)
}

fn cyclic_p_exponent(g: &Group) -> Result<(u64, u32)> {
    if !g.is_cyclic() {
        return Err(Error::Validation(format!("{g} is not cyclic")));
    }
    match g.prime() {
        Some(p) if g.is_p_group(p) => Ok((p, log_p(g.order(), p))),
        _ => Err(Error::Validation(format!("{g} is not a cyclic p-group"))),
    }
}

/// Direct construction for a cyclic `p`-group; the trivial group gives Spec(Z).
pub fn assemble_over_z(g: &Group) -> Result<SymbolicPoset> {
    if g.order() == 1 {
        return Ok(SymbolicPoset::new(vec![SpcPoint::OrdinaryZero, SpcPoint::OrdinaryFamily { excluded: vec![] }], [(0, 1)]));
    }
    let (p, n) = cyclic_p_exponent(g)?;
    Ok(assemble_cyclic(p, n))
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Disjoint union of pieces, glued by point maps, closed and validated.
struct Gluing {
    pieces: Vec<SymbolicPoset>,
    offsets: Vec<usize>,
    uf: UnionFind,
}

impl Gluing {
    fn new(pieces: Vec<SymbolicPoset>) -> Gluing {
        let mut offsets = Vec::new();
        let mut n = 0;
        for p in &pieces {
            offsets.push(n);
            n += p.len();
        }
        Gluing { pieces, offsets, uf: UnionFind::new(n) }
    }

    fn identify(&mut self, (a, x): (usize, usize), (b, y): (usize, usize)) {
        let (u, v) = (self.offsets[a] + x, self.offsets[b] + y);
        self.uf.union(u, v);
    }

    fn finish(mut self) -> Result<SymbolicPoset> {
        let total: usize = self.pieces.iter().map(SymbolicPoset::len).sum();
        let mut class_point: BTreeMap<usize, SpcPoint> = BTreeMap::new();
        let mut flat = Vec::with_capacity(total);
        for (k, piece) in self.pieces.iter().enumerate() {
            for (i, pt) in piece.points.iter().enumerate() {
                flat.push((self.offsets[k] + i, pt.clone()));
            }
        }
        for (u, pt) in &flat {
            let r = self.uf.find(*u);
            let merged = match class_point.remove(&r) {
                None => pt.clone(),
                Some(old) => merge_points(old, pt.clone())?,
            };
            class_point.insert(r, merged);
        }
        let reps: Vec<usize> = class_point.keys().copied().collect();
        let index: BTreeMap<usize, usize> = reps.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let points: Vec<SpcPoint> = class_point.into_values().collect();
        let mut rel = Vec::new();
        for (k, piece) in self.pieces.iter().enumerate() {
            for &(a, b) in &piece.relations {
                let ra = self.uf.find(self.offsets[k] + a);
                let rb = self.uf.find(self.offsets[k] + b);
                rel.push((index[&ra], index[&rb]));
            }
        }
        let poset = SymbolicPoset::new(points, rel);
        validate(&poset).into_result()?;
        Ok(poset)
    }
}

fn merge_points(a: SpcPoint, b: SpcPoint) -> Result<SpcPoint> {
    use SpcPoint::*;
    match (&a, &b) {
        _ if a == b => Ok(a),
        // the residue point of Spec(Z) at p becomes modular in a p-piece
        (OrdinaryPrime(q), Modular(l)) | (Modular(l), OrdinaryPrime(q)) if *q == l.prime => Ok(SpcPoint::Modular(*l)),
        _ => Err(Error::Validation(format!("gluing identifies incompatible points {a:?} and {b:?}"))),
    }
}

/// Spectrum of a cyclic `p`-group as a colimit over its reduced sections poset.
pub fn sections_colimit(g: &Group, p: u64) -> Result<SymbolicPoset> {
    if !is_prime(p) {
        return Err(Error::Validation(format!("{p} is not prime")));
    }
    if g.order() > 1 {
        let (q, _) = cyclic_p_exponent(g)?;
        if q != p {
            return Err(Error::NotPGroup { p });
        }
    }
    let cat = sections_category(g, p)?;
    let (reps, arrows) = cat.reduced_poset(g);
    let mut pieces = Vec::new();
    for &r in &reps {
        let o = &cat.objects[r];
        pieces.push(if o.is_trivial() {
            spec_z(p, o.h.order())
        } else {
            // local m_0 ↔ H, m_1 ↔ K, p_1 ↔ K
            relabel_v(&assemble_cyclic(p, 1), o.h.order(), o.k.order())
        });
    }
    let mut glue = Gluing::new(pieces);
    for &(s, t) in &arrows {
        let (os, ot) = (&cat.objects[reps[s]], &cat.objects[reps[t]]);
        if !os.is_trivial() || ot.is_trivial() {
            return Err(Error::Validation(format!("unexpected section transition {s} → {t}")));
        }
        let endpoint = if os.h.order() == ot.h.order() {
            PSI_ENDPOINT
        } else if os.h.order() == ot.k.order() {
            RHO_ENDPOINT
        } else {
            return Err(Error::Validation(format!("transition {s} → {t} is of neither type")));
        };
        let (y, x) = (&glue.pieces[s], &glue.pieces[t]);
        let y_zero = y.find(&SpcPoint::OrdinaryZero).unwrap();
        let y_fam = family_index(y);
        let y_mod = y.modular_points(p)[0];
        let x_zero = x.find(&SpcPoint::OrdinaryZero).unwrap();
        let x_fam = family_index(x);
        let ends = closed_endpoints(x, p);
        let x_end = ends[endpoint];
        glue.identify((s, y_zero), (t, x_zero));
        glue.identify((s, y_fam), (t, x_fam));
        glue.identify((s, y_mod), (t, x_end));
    }
    glue.finish()
}

fn family_index(x: &SymbolicPoset) -> usize {
    x.points.iter().position(|p| matches!(p, SpcPoint::OrdinaryFamily { .. })).unwrap()
}

/// Closed modular points of a V, ordered `m_0, m_1`.
fn closed_endpoints(x: &SymbolicPoset, p: u64) -> Vec<usize> {
    x.modular_points(p).into_iter().filter(|&i| matches!(&x.points[i], SpcPoint::Modular(l) if l.tag == CohTag::Irrelevant)).collect()
}

fn relabel_v(v: &SymbolicPoset, top: usize, bottom: usize) -> SymbolicPoset {
    let points = v
        .points
        .iter()
        .map(|pt| match pt {
            SpcPoint::Modular(l) => SpcPoint::Modular(ModularLabel { subgroup: if l.subgroup > 1 { top } else { bottom }, ..*l }),
            other => other.clone(),
        })
        .collect();
    SymbolicPoset::new(points, v.relations.iter().copied())
}

/// Spectrum of a cyclic group as a colimit over the orbit category with
/// prime-power isotropy: each `p`-subgroup contributes its sections colimit.
pub fn orbit_colimit(g: &Group) -> Result<SymbolicPoset> {
    if !g.is_cyclic() {
        return Err(Error::Validation(format!("{g} is not cyclic")));
    }
    let primes = prime_divisors(g.order());
    let lattice = subgroups(g)?;
    let family: Vec<_> = lattice
        .subgroups
        .iter()
        .filter(|h| h.order() == 1 || prime_divisors(h.order()).len() == 1)
        .cloned()
        .collect();
    let cat = orbit_category(g, &family)?;
    let mut pieces = Vec::new();
    for h in &cat.objects {
        // subgroups of a cyclic group are normal, so conjugation fixes every label
        debug_assert!(g.is_normal(h));
        let piece = if h.order() == 1 {
            SymbolicPoset::new(vec![SpcPoint::OrdinaryZero, SpcPoint::OrdinaryFamily { excluded: vec![] }], [(0, 1)])
        } else {
            let (sub, _) = g.subgroup_group(h);
            sections_colimit(&sub, prime_divisors(h.order())[0])?
        };
        pieces.push(piece.refine(&primes));
    }
    let mut glue = Gluing::new(pieces);
    for m in &cat.morphisms {
        if m.source == m.target {
            continue;
        }
        // restriction along H ≤ K^a carries each point to the one with the same label
        let (src, dst) = (&glue.pieces[m.source], &glue.pieces[m.target]);
        let mut pairs = Vec::new();
        for (i, pt) in src.points.iter().enumerate() {
            let j = match pt {
                SpcPoint::OrdinaryPrime(q) => dst.find(pt).or_else(|| {
                    dst.find(&SpcPoint::Modular(ModularLabel { prime: *q, subgroup: 1, tag: CohTag::Irrelevant }))
                }),
                SpcPoint::OrdinaryFamily { .. } => Some(family_index(dst)),
                _ => dst.find(pt),
            };
            let j = j.ok_or_else(|| Error::Validation(format!("no image for {pt:?} under restriction")))?;
            pairs.push((i, j));
        }
        for (i, j) in pairs {
            glue.identify((m.source, i), (m.target, j));
        }
    }
    glue.finish()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: String,
    pub witness: (String, String),
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ValidationReport {
    pub t0: bool,
    pub antisymmetric: bool,
    pub transitive: bool,
    pub sober: bool,
    /// `None` when the poset is too large for the brute-force check.
    pub sober_checked: Option<bool>,
    pub families_closed: bool,
    pub modular_fiber_closed: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<ValidationReport> {
        match self.violations.first() {
            None => Ok(self),
            Some(v) => Err(Error::Validation(format!("{}: ({}, {})", v.kind, v.witness.0, v.witness.1))),
        }
    }
}

/// Closed sets are the subsets stable under specialization.
fn closed_sets(poset: &SymbolicPoset) -> Vec<u32> {
    let n = poset.len();
    let down: Vec<u32> = (0..n).map(|x| poset.closure(x).into_iter().fold(0u32, |m, y| m | (1 << y))).collect();
    (0u32..(1 << n)).filter(|&s| (0..n).all(|x| s & (1 << x) == 0 || down[x] & !s == 0)).collect()
}

pub fn validate(poset: &SymbolicPoset) -> ValidationReport {
    let n = poset.len();
    let name = |i: usize| poset.label(i);
    let mut r = ValidationReport::default();
    let push = |r: &mut ValidationReport, kind: &str, a: usize, b: usize| {
        r.violations.push(Violation { kind: kind.into(), witness: (name(a), name(b)) });
    };
    for &(a, b) in &poset.relations {
        if a == b {
            push(&mut r, "self-specialization (cycle)", a, b);
        } else if poset.specializes(b, a) && a < b {
            push(&mut r, "antisymmetry", a, b);
        }
    }
    r.antisymmetric = r.violations.is_empty();
    let closures: Vec<BTreeSet<usize>> = (0..n).map(|x| poset.closure(x)).collect();
    let before = r.violations.len();
    for a in 0..n {
        for b in a + 1..n {
            if closures[a] == closures[b] {
                push(&mut r, "T0", a, b);
            }
        }
    }
    r.t0 = r.violations.len() == before;
    let before = r.violations.len();
    for &(a, b) in &poset.relations {
        for &(c, d) in &poset.relations {
            if b == c && !poset.specializes(a, d) {
                push(&mut r, "transitivity", a, d);
            }
        }
    }
    r.transitive = r.violations.len() == before;
    let before = r.violations.len();
    for &(a, b) in &poset.relations {
        if matches!(poset.points[a], SpcPoint::OrdinaryFamily { .. }) {
            push(&mut r, "family point specializes", a, b);
        }
    }
    r.families_closed = r.violations.len() == before;
    let before = r.violations.len();
    for &(a, b) in &poset.relations {
        if poset.points[a].is_modular() && !poset.points[b].is_modular() {
            push(&mut r, "modular fiber not closed", a, b);
        }
        if let (Some(p), Some(q)) = (poset.points[a].prime(), poset.points[b].prime()) {
            if p != q {
                push(&mut r, "specialization across fibers", a, b);
            }
        }
    }
    r.modular_fiber_closed = r.violations.len() == before;
    if n <= SOBER_BRUTE_FORCE_LIMIT {
        let before = r.violations.len();
        let closed = closed_sets(poset);
        for &c in &closed {
            if c == 0 {
                continue;
            }
            let proper: Vec<u32> = closed.iter().copied().filter(|&s| s & !c == 0 && s != c).collect();
            let reducible = proper.iter().any(|&a| proper.iter().any(|&b| a | b == c));
            if reducible {
                continue;
            }
            let generic: Vec<usize> = (0..n).filter(|&x| closures[x].iter().fold(0u32, |m, y| m | (1 << y)) == c).collect();
            match generic.len() {
                1 => {}
                0 => {
                    let x = c.trailing_zeros() as usize;
                    push(&mut r, "irreducible closed set without generic point", x, x);
                }
                _ => push(&mut r, "irreducible closed set with two generic points", generic[0], generic[1]),
            }
        }
        r.sober_checked = Some(r.violations.len() == before);
        r.sober = r.violations.len() == before;
    } else {
        // finite T0 posets are sober: an irreducible closed set has one maximal point
        r.sober = r.t0;
    }
    r
}

const PRIME_COLORS: [&str; 6] = ["olivedrab", "blue", "purple", "darkorange", "teal", "crimson"];
const ORDINARY_COLOR: &str = "saddlebrown";

/// Graphviz digraph of the covering relations, edges from generic to special.
pub fn export_dot(poset: &SymbolicPoset) -> String {
    let primes = poset.modular_primes();
    let mut s = String::from("digraph spc {\n  rankdir=BT;\n  node [shape=circle, style=filled, fontcolor=white, width=0.3];\n");
    for i in 0..poset.len() {
        let color = match &poset.points[i] {
            SpcPoint::Modular(l) => PRIME_COLORS[primes.iter().position(|&p| p == l.prime).unwrap() % PRIME_COLORS.len()],
            _ => ORDINARY_COLOR,
        };
        let shape = if matches!(poset.points[i], SpcPoint::OrdinaryFamily { .. }) { ", shape=doublecircle" } else { "" };
        writeln!(s, "  {} [label=\"{}\", fillcolor={color}{shape}];", poset.id(i), poset.label(i).replace('"', "\\\"")).unwrap();
    }
    for (a, b) in poset.hasse() {
        let color = if poset.points[a].is_modular() { "gray40" } else { ORDINARY_COLOR };
        writeln!(s, "  {} -> {} [color={color}];", poset.id(a), poset.id(b)).unwrap();
    }
    s.push_str("}\n");
    s
}

pub fn export_json(poset: &SymbolicPoset) -> serde_json::Value {
    let points: Vec<serde_json::Value> = (0..poset.len())
        .map(|i| serde_json::json!({"id": poset.id(i), "kind": poset.points[i].kind(), "label": poset.label(i)}))
        .collect();
    let specs: Vec<[String; 2]> = poset.relations.iter().map(|&(a, b)| [poset.id(a), poset.id(b)]).collect();
    serde_json::json!({"points": points, "specializations": specs})
}

/// Inverse of [`export_json`]; subgroup orders are recovered from the `m_i`
/// numbering. Relations are closed again, so a non-closed input shows up as
/// a size mismatch against the returned poset.
pub fn import_json(v: &serde_json::Value) -> Result<SymbolicPoset> {
    let bad = |what: &str| Error::Validation(format!("malformed spectrum JSON: {what}"));
    let pts = v["points"].as_array().ok_or_else(|| bad("points"))?;
    let mut ids = Vec::new();
    let mut raw: Vec<(String, String, String)> = Vec::new();
    for p in pts {
        let field = |k: &str| p[k].as_str().map(str::to_string).ok_or_else(|| bad(k));
        raw.push((field("id")?, field("kind")?, field("label")?));
    }
    // heights per prime from the closed points
    let mut height: BTreeMap<u64, u32> = BTreeMap::new();
    let parse_mod = |id: &str| -> Option<(char, u32, u64)> {
        let t = id.chars().next()?;
        let (i, p) = id[1..].split_once('_')?;
        Some((t, i.parse().ok()?, p.parse().ok()?))
    };
    for (id, kind, _) in &raw {
        if kind == "modular" {
            let (_, i, p) = parse_mod(id).ok_or_else(|| bad(id))?;
            let h = height.entry(p).or_insert(0);
            *h = (*h).max(i);
        }
    }
    let mut points = Vec::new();
    for (id, kind, label) in &raw {
        let pt = match kind.as_str() {
            "ordinary_zero" => SpcPoint::OrdinaryZero,
            "ordinary_prime" => SpcPoint::OrdinaryPrime(id.strip_prefix('q').and_then(|q| q.parse().ok()).ok_or_else(|| bad(id))?),
            "ordinary_family" => {
                let excluded = match label.split_once('{') {
                    None => vec![],
                    Some((_, rest)) => rest
                        .trim_end_matches('}')
                        .split(',')
                        .map(|x| x.trim().parse::<u64>().map_err(|_| bad(label)))
                        .collect::<Result<Vec<_>>>()?,
                };
                SpcPoint::OrdinaryFamily { excluded }
            }
            "modular" => {
                let (t, i, p) = parse_mod(id).ok_or_else(|| bad(id))?;
                let tag = match t {
                    'm' => CohTag::Irrelevant,
                    'p' => CohTag::Generic,
                    _ => return Err(bad(id)),
                };
                let e = height[&p].checked_sub(i).ok_or_else(|| bad(id))?;
                SpcPoint::Modular(ModularLabel { prime: p, subgroup: (p as usize).pow(e), tag })
            }
            _ => return Err(bad(kind)),
        };
        ids.push(id.clone());
        points.push(pt);
    }
    let specs = v["specializations"].as_array().ok_or_else(|| bad("specializations"))?;
    let mut rel = Vec::new();
    for e in specs {
        let pair = e.as_array().filter(|a| a.len() == 2).ok_or_else(|| bad("specialization pair"))?;
        let idx = |x: &serde_json::Value| {
            x.as_str().and_then(|s| ids.iter().position(|i| i == s)).ok_or_else(|| bad("unknown point id"))
        };
        rel.push((idx(&pair[0])?, idx(&pair[1])?));
    }
    Ok(SymbolicPoset::new(points, rel))
}

impl fmt::Display for SymbolicPoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            let targets: Vec<String> = self.relations.iter().filter(|r| r.0 == i).map(|r| self.label(r.1)).collect();
            if targets.is_empty() {
                writeln!(f, "{}", self.label(i))?;
            } else {
                writeln!(f, "{} ⤳ {}", self.label(i), targets.join(", "))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mlabel(p: u64, subgroup: usize, tag: CohTag) -> SpcPoint {
        SpcPoint::Modular(ModularLabel { prime: p, subgroup, tag })
    }

    #[test]
    fn field_seeds() {
        assert_eq!(seed_cyclic_field(0, 2).len(), 1);
        let v = seed_cyclic_field(1, 3);
        assert_eq!(v.len(), 3);
        assert_eq!(v.relations.len(), 2);
        let w = seed_cyclic_field(2, 2);
        assert_eq!(w.len(), 5);
        assert_eq!(w.hasse().len(), 4);
        assert!(validate(&w).passed());
    }

    #[test]
    fn cp_over_z_shape() {
        let x = assemble_cyclic(5, 1);
        assert_eq!(x.len(), 5);
        let zero = x.find(&SpcPoint::OrdinaryZero).unwrap();
        let p1 = x.find(&mlabel(5, 1, CohTag::Generic)).unwrap();
        let m0 = x.find(&mlabel(5, 5, CohTag::Irrelevant)).unwrap();
        let m1 = x.find(&mlabel(5, 1, CohTag::Irrelevant)).unwrap();
        assert!(x.specializes(zero, m0) && x.specializes(zero, m1));
        assert!(!x.specializes(zero, p1));
        assert!(x.specializes(p1, m0) && x.specializes(p1, m1));
        assert!(validate(&x).passed());
    }

    #[test]
    fn mutual_specialization_is_rejected() {
        let bad = SymbolicPoset::new(vec![SpcPoint::OrdinaryZero, SpcPoint::OrdinaryPrime(2)], [(0, 1), (1, 0)]);
        let r = validate(&bad);
        assert!(!r.t0 && !r.antisymmetric);
        assert!(r.into_result().is_err());
    }

    #[test]
    fn sections_match_direct_c8() {
        let g = Group::cyclic(8);
        let s = sections_colimit(&g, 2).unwrap();
        assert!(s.isomorphic(&assemble_over_z(&g).unwrap()));
        assert_eq!(s.modular_points(2).len(), 7);
    }

    #[test]
    fn c6_two_fibers() {
        let s = orbit_colimit(&Group::cyclic(6)).unwrap();
        assert_eq!(s.modular_points(2).len(), 3);
        assert_eq!(s.modular_points(3).len(), 3);
        assert_eq!(s.len(), 8);
        assert!(s.points.contains(&SpcPoint::OrdinaryFamily { excluded: vec![2, 3] }));
        let dot = export_dot(&s);
        assert!(dot.contains("olivedrab") && dot.contains("blue"));
        let j = export_json(&s);
        assert_eq!(j["points"].as_array().unwrap().len(), 8);
        assert_eq!(import_json(&j).unwrap(), s);
    }

    #[test]
    fn refine_splits_family() {
        let x = assemble_cyclic(2, 1).refine(&[2, 3]);
        assert!(x.points.contains(&SpcPoint::OrdinaryPrime(3)));
        assert!(x.points.contains(&SpcPoint::OrdinaryFamily { excluded: vec![2, 3] }));
        assert!(x.specializes(0, x.find(&SpcPoint::OrdinaryPrime(3)).unwrap()));
    }

    #[test]
    fn sections_agree_with_direct_up_to_27() {
        for n in 1..=27usize {
            let g = Group::cyclic(n);
            let Some(p) = g.prime() else { continue };
            if !g.is_p_group(p) {
                continue;
            }
            let s = sections_colimit(&g, p).unwrap();
            assert!(s.isomorphic(&assemble_over_z(&g).unwrap()), "C{n}");
            assert_eq!(s.modular_points(p).len() as u32, 2 * log_p(n, p) + 1);
        }
    }

    #[test]
    fn c12_fibers() {
        let s = orbit_colimit(&Group::cyclic(12)).unwrap();
        assert_eq!(s.modular_points(2).len(), 5);
        assert_eq!(s.modular_points(3).len(), 3);
        assert!(validate(&s).passed());
    }
}
