//! Invertible objects `u_N`, the maps `a_N`, `b_N`, `c_N`, and bounded
//! tables of twisted cohomology `Hom(1, 1(q)[s])`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::chain::{restrict_complex, tensor_complex, tensor_maps, tensor_with_layout, ChainMap, Complex, TensorLayout};
use crate::error::{Error, Result};
use crate::grp::{subgroup_name, Group, Subgroup};
use crate::homotopy::{
    equivalence_normalized, find_homotopy_equivalence, hom_group, null_homotopy, EquivalenceOutcome,
    FgModulePresentation, HomClass, HomGroup, Homotopy,
};
use crate::linalg::lattice::{echelon_rows, in_row_span, quotient_invariants, relation_rows};
use crate::linalg::{smith_normal_form, Mat};
use crate::permod::{perm_module, SignedPermModule};
use crate::ring::Ring;

/// Twist bound for groups with several index-`p` normal subgroups.
pub const TWIST_BOUND: u32 = 6;
/// Twist bound when there is a single index-`p` normal subgroup (cyclic `G`).
pub const CYCLIC_TWIST_BOUND: u32 = 12;

// ---------------------------------------------------------------------------
// cases and twists

/// Which of the four shapes the generators take, by `p` and whether `p = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    C1,
    C2,
    C3,
    C4,
}

impl Case {
    pub fn of(p: u64, ring: Ring) -> Case {
        match (p == 2, ring.kills(p)) {
            (true, true) => Case::C1,
            (true, false) => Case::C2,
            (false, true) => Case::C3,
            (false, false) => Case::C4,
        }
    }

    /// `2'`: the length of `u_N`.
    pub fn two_prime(self) -> i32 {
        match self {
            Case::C1 | Case::C2 => 1,
            Case::C3 | Case::C4 => 2,
        }
    }

    pub fn has_c(self) -> bool {
        self == Case::C3
    }

    /// Degree `(shift, multiple of e_N)` of `b_N`.
    pub fn b_degree(self) -> (i32, u32) {
        match self {
            Case::C1 => (-1, 1),
            Case::C2 => (-2, 2),
            Case::C3 | Case::C4 => (-2, 1),
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self:?})")
    }
}

/// An element of the twist monoid: exponents indexed like the context's
/// list of index-`p` normal subgroups.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Twist(pub Vec<u32>);

impl Twist {
    pub fn zero(n: usize) -> Twist {
        Twist(vec![0; n])
    }

    pub fn basis(n: usize, i: usize, k: u32) -> Twist {
        let mut v = vec![0; n];
        v[i] = k;
        Twist(v)
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn add(&self, other: &Twist) -> Twist {
        assert_eq!(self.0.len(), other.0.len());
        Twist(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self − other` when it stays in the monoid.
    pub fn checked_sub(&self, other: &Twist) -> Option<Twist> {
        self.0.iter().zip(&other.0).map(|(a, b)| a.checked_sub(*b)).collect::<Option<Vec<_>>>().map(Twist)
    }

    pub fn scale(&self, k: u32) -> Twist {
        Twist(self.0.iter().map(|a| a * k).collect())
    }

    /// All twists of total at most `bound`, by total then lexicographically.
    pub fn all_up_to(n: usize, bound: u32) -> Vec<Twist> {
        fn rec(n: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Twist>) {
            if cur.len() == n {
                out.push(Twist(cur.clone()));
                return;
            }
            for e in 0..=left {
                cur.push(e);
                rec(n, left - e, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, bound, &mut Vec::new(), &mut out);
        out.sort_by(|a, b| (a.total(), &a.0).cmp(&(b.total(), &b.0)));
        out
    }
}

impl fmt::Display for Twist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            write!(f, "{}", self.0[0])
        } else {
            let parts: Vec<String> = self.0.iter().map(|e| e.to_string()).collect();
            write!(f, "({})", parts.join(","))
        }
    }
}

// ---------------------------------------------------------------------------
// u_N and its powers

fn check_index_p(g: &Group, n: &Subgroup) -> Result<u64> {
    g.subgroup_from(n.elements())?;
    if !g.is_normal(n) {
        return Err(Error::NotSubgroup(format!("{} is not normal", subgroup_name(n))));
    }
    let idx = (g.order() / n.order()) as u64;
    if !crate::ring::is_prime(idx) {
        return Err(Error::NotSubgroup(format!("{} has non-prime index {idx}", subgroup_name(n))));
    }
    Ok(idx)
}

/// The smallest element outside `N`; its coset is the default generator of `G/N`.
pub fn default_sigma(g: &Group, n: &Subgroup) -> Result<usize> {
    check_index_p(g, n)?;
    Ok(g.elements().find(|&x| !n.contains(x)).expect("proper subgroup"))
}

fn ones(n: usize) -> Mat {
    Mat::from_fn(n, 1, |_, _| 1)
}

/// The canonical generator of the top homology of `u_N^{⊗k}`.
fn top_vector(p: u64, k: u32, ring: Ring) -> Mat {
    if k == 0 {
        return ones(1);
    }
    if p != 2 || k % 2 == 0 {
        ones(p as usize)
    } else {
        // ker of ε or of the norm on R(G/N) for p = 2; the trivial coset is first
        Mat::from_fn(2, 1, |i, _| if i == 0 { 1 } else { -1 }).normalize(ring)
    }
}

/// `R(G/N) → … →(σ−1) R(G/N) →(N) R(G/N) →(σ−1) R(G/N) →(ε) R`, of length `2'·k`.
pub fn u_power(g: &Arc<Group>, n: &Subgroup, sigma: usize, k: u32, ring: Ring) -> Result<Complex> {
    let p = check_index_p(g, n)?;
    if n.contains(sigma) {
        return Err(Error::Twist("σ must generate G/N".into()));
    }
    if k == 0 {
        return Ok(Complex::unit(g.clone(), ring));
    }
    let m: SignedPermModule = perm_module(g, n, ring)?;
    let r = m.rank();
    let s1 = m.matrix_of(sigma).sub(&Mat::identity(r), ring);
    let norm = Mat::from_fn(r, r, |_, _| 1);
    let top = Case::of(p, ring).two_prime() as u32 * k;
    let mut terms = vec![SignedPermModule::trivial(g.clone(), ring)];
    let mut diffs = vec![Mat::zeros(0, 1), Mat::from_fn(1, r, |_, _| 1)];
    for j in 1..=top {
        terms.push(m.clone());
        if j >= 2 {
            diffs.push(if j % 2 == 0 { s1.clone() } else { norm.clone() });
        }
    }
    Complex::new(g.clone(), ring, 0, terms, diffs)
}

/// `u_{N,R}` with the default generator of `G/N`.
pub fn u_complex(g: &Arc<Group>, n: &Subgroup, ring: Ring) -> Result<Complex> {
    u_power(g, n, default_sigma(g, n)?, 1, ring)
}

/// `u_N ⊗ u_N^*`, which should be equivalent to the unit.
pub fn invertibility_check(g: &Arc<Group>, n: &Subgroup, ring: Ring) -> Result<EquivalenceOutcome> {
    let u = u_complex(g, n, ring)?;
    let x = Arc::new(tensor_complex(&u, &u.dual())?);
    let one = Arc::new(Complex::unit(g.clone(), ring));
    find_homotopy_equivalence(&x, &one)
}

// ---------------------------------------------------------------------------
// classes

/// A map `1 → 1(q)[s]`, represented in the canonical complex for `q`.
#[derive(Clone, Debug)]
pub struct TwistedClass {
    pub shift: i32,
    pub twist: Twist,
    pub class: HomClass,
    pub name: Option<String>,
}

impl TwistedClass {
    pub fn cycle(&self) -> &Mat {
        &self.class.cycle
    }

    /// The class as a chain map `1 → Y[s]`.
    pub fn chain_map(&self) -> Result<ChainMap> {
        let y = &self.class.ambient;
        let one = Arc::new(Complex::unit(y.group().clone(), y.ring()));
        let tgt = Arc::new(y.shift(self.shift));
        let mut comps = BTreeMap::new();
        if tgt.rank(0) > 0 {
            comps.insert(0, self.class.cycle.clone());
        }
        ChainMap::new(one, tgt, comps)
    }

    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| "?".into())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GenKind {
    A,
    B,
    C,
}

/// A named polynomial generator of the twisted ring.
#[derive(Clone, Debug, Serialize)]
pub struct GeneratorInfo {
    pub name: String,
    pub kind: GenKind,
    pub normal: usize,
    pub shift: i32,
    pub twist: Twist,
}

/// `a_N`, `b_N` and, in case (C3), `c_N`.
#[derive(Clone, Debug)]
pub struct GeneratorMaps {
    pub case: Case,
    pub normal: usize,
    pub a: TwistedClass,
    pub b: TwistedClass,
    pub c: Option<TwistedClass>,
    /// Which of a, b, c are nonzero in their hom group.
    pub nonzero: Vec<(String, bool)>,
}

impl GeneratorMaps {
    pub fn all(&self) -> Vec<&TwistedClass> {
        let mut v = vec![&self.a, &self.b];
        v.extend(self.c.as_ref());
        v
    }

    pub fn c(&self) -> Result<&TwistedClass> {
        self.c.as_ref().ok_or_else(|| Error::Twist(format!("c_N only exists in case (C3), not {}", self.case)))
    }
}

struct Transport {
    map: ChainMap,
    layout: TensorLayout,
}

/// Twisted cohomology of one group over one ring, with cached canonical
/// complexes and product transports.
pub struct TwistedCohomology {
    group: Arc<Group>,
    ring: Ring,
    p: u64,
    case: Case,
    normals: Vec<Subgroup>,
    sigmas: Vec<usize>,
    ambients: RwLock<HashMap<Twist, Arc<Complex>>>,
    transports: RwLock<HashMap<(Twist, Twist), Arc<Transport>>>,
}

impl fmt::Debug for TwistedCohomology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TwistedCohomology({}, {}, {})", self.group, self.ring, self.case)
    }
}

impl TwistedCohomology {
    pub fn new(group: Arc<Group>, ring: Ring) -> Result<Arc<TwistedCohomology>> {
        let p = group.prime().ok_or_else(|| Error::Twist("the trivial group has no twists".into()))?;
        let normals = group.index_p_normal(p)?;
        let sigmas = normals.iter().map(|n| default_sigma(&group, n)).collect::<Result<Vec<_>>>()?;
        Self::with_sigmas(group, ring, sigmas)
    }

    /// Use explicit generators of the quotients `G/N`.
    pub fn with_sigmas(group: Arc<Group>, ring: Ring, sigmas: Vec<usize>) -> Result<Arc<TwistedCohomology>> {
        let p = group.prime().ok_or_else(|| Error::Twist("the trivial group has no twists".into()))?;
        let normals = group.index_p_normal(p)?;
        if sigmas.len() != normals.len() || sigmas.iter().zip(&normals).any(|(&s, n)| n.contains(s)) {
            return Err(Error::Twist("one generator of G/N is needed per N".into()));
        }
        Ok(Arc::new(TwistedCohomology {
            group,
            ring,
            p,
            case: Case::of(p, ring),
            normals,
            sigmas,
            ambients: RwLock::new(HashMap::new()),
            transports: RwLock::new(HashMap::new()),
        }))
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }
    pub fn ring(&self) -> Ring {
        self.ring
    }
    pub fn prime(&self) -> u64 {
        self.p
    }
    pub fn case(&self) -> Case {
        self.case
    }
    pub fn normals(&self) -> &[Subgroup] {
        &self.normals
    }
    pub fn sigmas(&self) -> &[usize] {
        &self.sigmas
    }

    pub fn normal_index(&self, n: &Subgroup) -> Option<usize> {
        self.normals.iter().position(|m| m == n)
    }

    pub fn twist_bound(&self) -> u32 {
        if self.normals.len() <= 1 {
            CYCLIC_TWIST_BOUND
        } else {
            TWIST_BOUND
        }
    }

    pub fn zero_twist(&self) -> Twist {
        Twist::zero(self.normals.len())
    }

    /// Top degree `2'·|q|` of the canonical complex.
    pub fn top(&self, q: &Twist) -> i32 {
        self.case.two_prime() * q.total() as i32
    }

    /// The canonical complex for `q`: the tensor product over `N` of the
    /// alternating complexes for `u_N^{⊗q_N}`.
    pub fn ambient(&self, q: &Twist) -> Result<Arc<Complex>> {
        if q.0.len() != self.normals.len() {
            return Err(Error::Twist(format!("twist {q} has the wrong length")));
        }
        if let Some(c) = self.ambients.read().unwrap().get(q) {
            return Ok(c.clone());
        }
        let mut acc = Complex::unit(self.group.clone(), self.ring);
        let mut first = true;
        for (i, &k) in q.0.iter().enumerate() {
            if k == 0 {
                continue;
            }
            let f = u_power(&self.group, &self.normals[i], self.sigmas[i], k, self.ring)?;
            acc = if first { f } else { tensor_complex(&acc, &f)? };
            first = false;
        }
        let c = Arc::new(acc);
        self.ambients.write().unwrap().insert(q.clone(), c.clone());
        Ok(c)
    }

    /// Generator of the top homology of the canonical complex.
    pub fn top_generator(&self, q: &Twist) -> Mat {
        let mut z = ones(1);
        for &k in q.0.iter().filter(|&&k| k > 0) {
            z = Mat::kron(&z, &top_vector(self.p, k, self.ring), self.ring);
        }
        z
    }

    pub fn hom(&self, q: &Twist, s: i32) -> Result<HomGroup> {
        Ok(hom_group(&self.ambient(q)?, s))
    }

    pub fn class(&self, q: &Twist, s: i32, cycle: Mat, name: Option<String>) -> Result<TwistedClass> {
        let class = HomClass { ambient: self.ambient(q)?, shift: s, cycle: cycle.normalize(self.ring) };
        class.check()?;
        Ok(TwistedClass { shift: s, twist: q.clone(), class, name })
    }

    pub fn unit_class(&self) -> TwistedClass {
        self.class(&self.zero_twist(), 0, ones(1), Some("1".into())).expect("unit class")
    }

    fn gen_name(&self, kind: GenKind, i: usize) -> String {
        let k = match kind {
            GenKind::A => "a",
            GenKind::B => "b",
            GenKind::C => "c",
        };
        if self.normals.len() == 1 {
            k.into()
        } else {
            format!("{k}{}", i + 1)
        }
    }

    /// The generator list in evaluation order: `a_i, b_i, c_i` per `N_i`.
    pub fn generators(&self) -> Vec<GeneratorInfo> {
        let n = self.normals.len();
        let mut out = Vec::new();
        for i in 0..n {
            out.push(GeneratorInfo {
                name: self.gen_name(GenKind::A, i),
                kind: GenKind::A,
                normal: i,
                shift: 0,
                twist: Twist::basis(n, i, 1),
            });
            let (s, t) = self.case.b_degree();
            out.push(GeneratorInfo {
                name: self.gen_name(GenKind::B, i),
                kind: GenKind::B,
                normal: i,
                shift: s,
                twist: Twist::basis(n, i, t),
            });
            if self.case.has_c() {
                out.push(GeneratorInfo {
                    name: self.gen_name(GenKind::C, i),
                    kind: GenKind::C,
                    normal: i,
                    shift: -1,
                    twist: Twist::basis(n, i, 1),
                });
            }
        }
        out
    }

    pub fn generator_class(&self, info: &GeneratorInfo) -> Result<TwistedClass> {
        let cycle = match info.kind {
            GenKind::A => ones(1),
            // η(1) in R(G/N)
            GenKind::B | GenKind::C => ones(self.p as usize),
        };
        self.class(&info.twist, info.shift, cycle, Some(info.name.clone()))
    }

    pub fn generator_maps(&self, i: usize) -> Result<GeneratorMaps> {
        if i >= self.normals.len() {
            return Err(Error::Twist(format!("no normal subgroup number {i}")));
        }
        let gens: Vec<GeneratorInfo> = self.generators().into_iter().filter(|g| g.normal == i).collect();
        let mut classes = Vec::new();
        let mut nonzero = Vec::new();
        for g in &gens {
            let c = self.generator_class(g)?;
            let z = !self.hom(&c.twist, c.shift)?.is_zero_class(c.cycle())?;
            nonzero.push((g.name.clone(), z));
            classes.push(c);
        }
        let mut it = classes.into_iter();
        let a = it.next().unwrap();
        let b = it.next().unwrap();
        let c = it.next();
        if !nonzero[1].1 {
            return Err(Error::TheoryCheck(format!("{} is null-homotopic", b.label())));
        }
        Ok(GeneratorMaps { case: self.case, normal: i, a, b, c, nonzero })
    }

    fn transport(&self, q1: &Twist, q2: &Twist) -> Result<Arc<Transport>> {
        let key = (q1.clone(), q2.clone());
        if let Some(t) = self.transports.read().unwrap().get(&key) {
            return Ok(t.clone());
        }
        let y1 = self.ambient(q1)?;
        let y2 = self.ambient(q2)?;
        let (x, layout) = tensor_with_layout(&y1, &y2)?;
        let x = Arc::new(x);
        let (t1, t2) = (self.top(q1), self.top(q2));
        let mut zx = Mat::zeros(x.rank(t1 + t2), 1);
        let off = layout.offset(t1, t2).expect("top block");
        zx.set_block(off, 0, &Mat::kron(&self.top_generator(q1), &self.top_generator(q2), self.ring));
        let q = q1.add(q2);
        let y = self.ambient(&q)?;
        let out = equivalence_normalized(&x, &y, t1 + t2, &zx, &self.top_generator(&q))?;
        let Some(e) = out.found() else {
            return Err(Error::TheoryCheck(format!("no equivalence 1({q1})⊗1({q2}) ≃ 1({q}): {out:?}")));
        };
        let t = Arc::new(Transport { map: e.f.clone(), layout });
        self.transports.write().unwrap().insert(key, t.clone());
        Ok(t)
    }

    /// `x·y`: the tensor of representatives moved into the canonical complex.
    pub fn product(&self, x: &TwistedClass, y: &TwistedClass) -> Result<TwistedClass> {
        let name = match (&x.name, &y.name) {
            (Some(a), Some(b)) if a == "1" => Some(b.clone()),
            (Some(a), Some(b)) if b == "1" => Some(a.clone()),
            (Some(a), Some(b)) => Some(format!("{a}·{b}")),
            _ => None,
        };
        let s = x.shift + y.shift;
        if x.twist.is_zero() && x.shift == 0 {
            let c = y.cycle().mul(x.cycle(), self.ring);
            return self.class(&y.twist, s, c, name);
        }
        if y.twist.is_zero() && y.shift == 0 {
            let c = x.cycle().mul(y.cycle(), self.ring);
            return self.class(&x.twist, s, c, name);
        }
        let t = self.transport(&x.twist, &y.twist)?;
        let n = -s;
        let mut v = Mat::zeros(t.map.source.rank(n), 1);
        let off = t.layout.offset(-x.shift, -y.shift).ok_or_else(|| Error::Validation("degree outside the tensor".into()))?;
        v.set_block(off, 0, &Mat::kron(x.cycle(), y.cycle(), self.ring));
        let c = t.map.comp(n).mul(&v, self.ring);
        self.class(&x.twist.add(&y.twist), s, c, name)
    }

    pub fn power(&self, x: &TwistedClass, k: u32) -> Result<TwistedClass> {
        let mut acc = self.unit_class();
        for _ in 0..k {
            acc = self.product(&acc, x)?;
        }
        Ok(acc)
    }

    /// Evaluate a monomial (exponents over [`TwistedCohomology::generators`]) in evaluation order.
    pub fn monomial(&self, gens: &[TwistedClass], exps: &[u32]) -> Result<TwistedClass> {
        let mut acc = self.unit_class();
        for (g, &e) in gens.iter().zip(exps) {
            for _ in 0..e {
                acc = self.product(&acc, g)?;
            }
        }
        acc.name = Some(monomial_tag(&self.generators(), exps));
        Ok(acc)
    }

    /// All monomials of bidegree `(s, q)`.
    pub fn monomials_in(&self, q: &Twist, s: i32) -> Vec<Vec<u32>> {
        let gens = self.generators();
        let mut out = Vec::new();
        let mut cur = vec![0u32; gens.len()];
        fn rec(gens: &[GeneratorInfo], i: usize, left: &Twist, shift_left: i32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if i == gens.len() {
                if left.is_zero() && shift_left == 0 {
                    out.push(cur.clone());
                }
                return;
            }
            let g = &gens[i];
            let mut e = 0u32;
            let mut rem = left.clone();
            loop {
                cur[i] = e;
                rec(gens, i + 1, &rem, shift_left - g.shift * e as i32, cur, out);
                match rem.checked_sub(&g.twist) {
                    Some(r) => rem = r,
                    None => break,
                }
                e += 1;
            }
            cur[i] = 0;
        }
        rec(&gens, 0, q, s, &mut cur, &mut out);
        out.sort();
        out
    }
}

pub fn monomial_tag(gens: &[GeneratorInfo], exps: &[u32]) -> String {
    let parts: Vec<String> = gens
        .iter()
        .zip(exps)
        .filter(|(_, &e)| e > 0)
        .map(|(g, &e)| if e == 1 { g.name.clone() } else { format!("{}^{e}", g.name) })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("·")
    }
}

// ---------------------------------------------------------------------------
// tables

#[derive(Clone, Debug)]
pub struct TableEntry {
    pub shift: i32,
    pub twist: Twist,
    pub hom: HomGroup,
    /// Monomials of this bidegree with their coordinates in the hom group basis.
    pub monomials: Vec<(Vec<u32>, Mat)>,
}

impl TableEntry {
    pub fn presentation(&self) -> &FgModulePresentation {
        &self.hom.presentation
    }

    /// Coordinate matrix: one column per monomial.
    pub fn monomial_matrix(&self) -> Mat {
        let g = self.hom.orders.len();
        let mut m = Mat::zeros(g, self.monomials.len());
        for (j, (_, c)) in self.monomials.iter().enumerate() {
            m.set_block(0, j, c);
        }
        m.normalize(self.hom.ambient.ring())
    }

    /// Whether the monomials generate the whole group.
    pub fn spanned(&self) -> bool {
        let ring = self.hom.ambient.ring();
        let g = self.hom.orders.len();
        if g == 0 {
            return true;
        }
        let tors: Vec<usize> = (0..g).filter(|&i| self.hom.orders[i] > 0).collect();
        let n = self.monomials.len();
        let mut a = Mat::zeros(g, n + tors.len());
        a.set_block(0, 0, &self.monomial_matrix());
        for (k, &i) in tors.iter().enumerate() {
            a.set(i, n + k, self.hom.orders[i]);
        }
        let a = a.normalize(ring);
        if a.is_zero() {
            return false;
        }
        let s = smith_normal_form(&a, ring);
        s.rank == g && s.divisors.iter().all(|&d| d.abs() == 1 || ring.is_field())
    }
}

/// `Hom(1, 1(q)[s])` for every twist of total at most `max_twist` and every
/// shift in the window.
#[derive(Clone)]
pub struct GradedTable {
    pub context: Arc<TwistedCohomology>,
    pub max_twist: u32,
    pub shift_window: (i32, i32),
    pub generators: Vec<GeneratorInfo>,
    pub generator_classes: Vec<TwistedClass>,
    pub entries: BTreeMap<(Twist, i32), TableEntry>,
}

impl fmt::Debug for GradedTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GradedTable({:?}, twist ≤ {}, {} entries)", self.context, self.max_twist, self.entries.len())
    }
}

fn is_elementary_abelian(g: &Group, p: u64) -> bool {
    g.is_abelian() && g.elements().all(|x| g.pow(x, p as usize) == g.identity())
}

/// Fill the table; entries are independent and computed in parallel.
pub fn twisted_table(ctx: &Arc<TwistedCohomology>, max_twist: u32, window: Option<(i32, i32)>) -> Result<GradedTable> {
    if !is_elementary_abelian(ctx.group(), ctx.prime()) {
        return Err(Error::Validation(format!("{} is not elementary abelian", ctx.group())));
    }
    if max_twist > ctx.twist_bound() {
        return Err(Error::Bounds(format!("twist {max_twist} exceeds the table bound {}", ctx.twist_bound())));
    }
    let n = ctx.normals().len();
    let window = window.unwrap_or((-ctx.case().two_prime() * max_twist as i32, 0));
    if window.0 > window.1 {
        return Err(Error::Bounds("empty shift window".into()));
    }
    let generators = ctx.generators();
    let generator_classes = generators.iter().map(|g| ctx.generator_class(g)).collect::<Result<Vec<_>>>()?;
    let twists = Twist::all_up_to(n, max_twist);
    // ambient complexes first, so the parallel phase only reads the cache
    twists.par_iter().map(|q| ctx.ambient(q).map(|_| ())).collect::<Result<Vec<_>>>()?;
    let cells: Vec<(Twist, i32)> =
        twists.iter().flat_map(|q| (window.0..=window.1).map(move |s| (q.clone(), s))).collect();
    let entries = cells
        .par_iter()
        .map(|(q, s)| {
            let hom = ctx.hom(q, *s)?;
            let mut monomials = Vec::new();
            for m in ctx.monomials_in(q, *s) {
                let v = ctx.monomial(&generator_classes, &m)?;
                monomials.push((m, hom.coordinates(v.cycle())?));
            }
            Ok(((q.clone(), *s), TableEntry { shift: *s, twist: q.clone(), hom, monomials }))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    Ok(GradedTable { context: ctx.clone(), max_twist, shift_window: window, generators, generator_classes, entries })
}

impl GradedTable {
    pub fn entry(&self, q: &Twist, s: i32) -> Option<&TableEntry> {
        self.entries.get(&(q.clone(), s))
    }

    /// Bidegrees by total twist, then twist, then decreasing shift.
    pub fn bidegrees(&self) -> Vec<(Twist, i32)> {
        let mut v: Vec<(Twist, i32)> = self.entries.keys().cloned().collect();
        v.sort_by(|a, b| (a.0.total(), &a.0 .0, -a.1).cmp(&(b.0.total(), &b.0 .0, -b.1)));
        v
    }

    pub fn tag(&self, exps: &[u32]) -> String {
        monomial_tag(&self.generators, exps)
    }

    /// Tags of the monomials that are nonzero in an entry.
    pub fn nonzero_tags(&self, e: &TableEntry) -> Vec<String> {
        e.monomials.iter().filter(|(_, c)| !c.is_zero()).map(|(m, _)| self.tag(m)).collect()
    }

    pub fn to_json(&self) -> Value {
        let ctx = &self.context;
        let mut entries = serde_json::Map::new();
        for (q, s) in self.bidegrees() {
            let e = &self.entries[&(q.clone(), s)];
            let p = e.presentation();
            entries.insert(
                format!("({s},{q})"),
                json!({
                    "rank": p.rank,
                    "torsion": p.torsion,
                    "generators": self.nonzero_tags(e),
                }),
            );
        }
        json!({
            "group": ctx.group().name(),
            "ring": ctx.ring().to_string(),
            "case": ctx.case().to_string(),
            "normal_subgroups": ctx.normals().iter().map(|n| n.elements().to_vec()).collect::<Vec<_>>(),
            "max_twist": self.max_twist,
            "shift_window": [self.shift_window.0, self.shift_window.1],
            "generators": self.generators.iter().map(|g| json!({
                "name": g.name, "shift": g.shift, "twist": g.twist.0,
            })).collect::<Vec<_>>(),
            "entries": entries,
        })
    }

    /// A text grid: one row per twist, one column per shift.
    pub fn to_text(&self) -> String {
        let ctx = &self.context;
        let mut out = format!("H^{{s,q}}({}, {}) case {}\n", ctx.group().name(), ctx.ring(), ctx.case());
        let twists = Twist::all_up_to(ctx.normals().len(), self.max_twist);
        let shifts: Vec<i32> = (self.shift_window.0..=self.shift_window.1).rev().collect();
        let cell = |q: &Twist, s: i32| self.entry(q, s).map(|e| e.presentation().to_string()).unwrap_or_default();
        let width = twists
            .iter()
            .flat_map(|q| shifts.iter().map(move |&s| cell(q, s).chars().count()))
            .max()
            .unwrap_or(1)
            .max(4);
        out.push_str(&format!("{:>8} |", "q \\ s"));
        for s in &shifts {
            out.push_str(&format!(" {s:>width$}"));
        }
        out.push('\n');
        for q in &twists {
            out.push_str(&format!("{:>8} |", q.to_string()));
            for &s in &shifts {
                let c = cell(q, s);
                let pad = width.saturating_sub(c.chars().count());
                out.push_str(&format!(" {}{c}", " ".repeat(pad)));
            }
            out.push('\n');
        }
        out
    }
}

// ---------------------------------------------------------------------------
// presentations

#[derive(Clone, Debug, Serialize)]
pub struct Relation {
    pub shift: i32,
    pub twist: Twist,
    /// `(coefficient, monomial exponents)`
    pub terms: Vec<(i64, Vec<u32>)>,
    pub text: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct RingPresentation {
    pub group: String,
    pub ring: String,
    pub case: Case,
    pub generators: Vec<GeneratorInfo>,
    pub relations: Vec<Relation>,
    /// Bidegrees not spanned by monomials (should be empty).
    pub unspanned: Vec<(i32, Twist)>,
    pub bound: u32,
}

impl RingPresentation {
    /// Error if some entry was not generated by the monomials.
    pub fn check(&self) -> Result<()> {
        if self.unspanned.is_empty() {
            Ok(())
        } else {
            let cells: Vec<String> = self.unspanned.iter().map(|(s, q)| format!("({s},{q})")).collect();
            Err(Error::TheoryCheck(format!("not spanned by generator monomials: {}", cells.join(", "))))
        }
    }

    pub fn has_relation(&self, text: &str) -> bool {
        self.relations.iter().any(|r| r.text == text)
    }
}

impl fmt::Display for RingPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> =
            self.generators.iter().map(|g| format!("{} ({},{})", g.name, g.shift, g.twist)).collect();
        writeln!(f, "{} over {} {}", self.group, self.ring, self.case)?;
        writeln!(f, "generators: {}", gens.join(", "))?;
        let rels: Vec<&str> = self.relations.iter().map(|r| r.text.as_str()).collect();
        writeln!(
            f,
            "relations (complete up to twist {}): {}",
            self.bound,
            if rels.is_empty() { "none".into() } else { rels.join(", ") }
        )?;
        if !self.unspanned.is_empty() {
            writeln!(f, "NOT SPANNED: {:?}", self.unspanned)?;
        }
        Ok(())
    }
}

fn relation_text(gens: &[GeneratorInfo], terms: &[(i64, Vec<u32>)]) -> String {
    let mut s = String::new();
    for (k, (c, m)) in terms.iter().enumerate() {
        let tag = monomial_tag(gens, m);
        let (sign, a) = if *c < 0 { ("−", -c) } else { ("+", *c) };
        if k == 0 {
            if *c < 0 {
                s.push('−');
            }
        } else {
            s.push_str(&format!(" {sign} "));
        }
        if a == 1 {
            s.push_str(&tag);
        } else if tag == "1" {
            s.push_str(&a.to_string());
        } else {
            s.push_str(&format!("{a}·{tag}"));
        }
    }
    s
}

/// Generators and relations within the table's bounds. Relations are kernel
/// elements of the monomial evaluation, minus those already implied by
/// lower-degree relations.
pub fn ring_presentation(table: &GradedTable) -> Result<RingPresentation> {
    let ctx = &table.context;
    let ring = ctx.ring();
    let gens = &table.generators;
    let mut found: Vec<Relation> = Vec::new();
    let mut unspanned = Vec::new();
    for (q, s) in table.bidegrees() {
        let e = &table.entries[&(q.clone(), s)];
        if !e.spanned() {
            unspanned.push((s, q.clone()));
        }
        let n = e.monomials.len();
        if n == 0 {
            continue;
        }
        let index: HashMap<&Vec<u32>, usize> = e.monomials.iter().enumerate().map(|(i, (m, _))| (m, i)).collect();
        let kernel = relation_rows(&e.monomial_matrix(), &e.hom.orders, ring);
        if kernel.rows() == 0 {
            continue;
        }
        // multiples of earlier relations
        let mut implied: Vec<Vec<i64>> = Vec::new();
        for r in &found {
            let Some(dq) = q.checked_sub(&r.twist) else { continue };
            for m in ctx.monomials_in(&dq, s - r.shift) {
                let mut row = vec![0i64; n];
                for (c, t) in &r.terms {
                    let prod: Vec<u32> = t.iter().zip(&m).map(|(a, b)| a + b).collect();
                    row[index[&prod]] += c;
                }
                implied.push(row);
            }
        }
        let mut span = echelon_rows(&Mat::from_parts(implied.len(), n, implied.concat(), 1).normalize(ring), ring);
        for k in 0..kernel.rows() {
            let row = kernel.block(k, k + 1, 0, n);
            if in_row_span(&span, &row, ring) {
                continue;
            }
            let terms: Vec<(i64, Vec<u32>)> = (0..n)
                .filter(|&j| row.get(0, j) != 0)
                .map(|j| (signed_rep(row.get(0, j), ring), e.monomials[j].0.clone()))
                .collect();
            let text = relation_text(gens, &terms);
            found.push(Relation { shift: s, twist: q.clone(), terms, text });
            let mut rows: Vec<i64> = (0..span.rows()).flat_map(|i| span.row(i).to_vec()).collect();
            rows.extend(row.row(0).iter().copied());
            span = echelon_rows(&Mat::from_parts(span.rows() + 1, n, rows, 1).normalize(ring), ring);
        }
    }
    Ok(RingPresentation {
        group: ctx.group().name().to_string(),
        ring: ring.to_string(),
        case: ctx.case(),
        generators: gens.clone(),
        relations: found,
        unspanned,
        bound: table.max_twist,
    })
}

/// `x` as a small signed representative (over F_p, `p−1` becomes `−1`).
fn signed_rep(x: i64, ring: Ring) -> i64 {
    match ring {
        Ring::PrimeField(p) if x > p as i64 / 2 => x - p as i64,
        _ => x,
    }
}

/// A null-homotopy of `k·x`, certifying a relation `k·x = 0`.
pub fn null_homotopy_of_multiple(x: &TwistedClass, k: i64) -> Result<Option<Homotopy>> {
    null_homotopy(&x.chain_map()?.scale(k))
}

/// A null-homotopy of `c_N ⊗ c_N: 1 → u_N[−1] ⊗ u_N[−1]`.
pub fn c_square_null_homotopy(ctx: &TwistedCohomology, i: usize) -> Result<Option<Homotopy>> {
    let g = ctx.generator_maps(i)?;
    let c = g.c()?.chain_map()?;
    let cc = tensor_maps(&c, &c)?;
    null_homotopy(&cc)
}

// ---------------------------------------------------------------------------
// restriction and base change

#[derive(Clone, Debug, Serialize)]
pub struct ClassCheck {
    pub name: String,
    pub expected: String,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RestrictionReport {
    pub normal: Vec<usize>,
    pub subgroup: Vec<usize>,
    pub contained: bool,
    pub ring: String,
    /// `Res_H(u_N) ≃ 1[2']` or `u_{H∩N}`, certified by an equivalence.
    pub object: bool,
    pub classes: Vec<ClassCheck>,
}

impl RestrictionReport {
    pub fn passed(&self) -> bool {
        self.object && self.classes.iter().all(|c| c.ok)
    }
}

/// Compare `Res_H` of `a_N`, `b_N`, `c_N` with their expected images.
pub fn restriction_check(ctx: &TwistedCohomology, i: usize, h: &Subgroup) -> Result<RestrictionReport> {
    let g = ctx.group();
    let ring = ctx.ring();
    g.subgroup_from(h.elements())?;
    let n = ctx.normals().get(i).ok_or_else(|| Error::Twist(format!("no normal subgroup number {i}")))?.clone();
    let contained = h.is_subset(&n);
    let (hg, inc) = g.subgroup_group(h);
    let sigma = ctx.sigmas()[i];
    // H∩N inside the abstract copy of H, and a generator of H/(H∩N) matching σN
    let hn_elems: Vec<usize> = hg.elements().filter(|&j| n.contains(inc.apply(j))).collect();
    let hn = hg.subgroup_from(&hn_elems)?;
    let sigma_h = hg.elements().find(|&j| n.contains(g.mul(g.inv(sigma), inc.apply(j))));
    let maps = ctx.generator_maps(i)?;
    let mut classes = Vec::new();
    let mut object = true;
    for x in maps.all() {
        let k = x.twist.0[i];
        let top = ctx.top(&x.twist);
        let (target, zt) = if contained {
            (Complex::unit(hg.clone(), ring).shift(top), ones(1))
        } else {
            let sh = sigma_h.expect("H is not inside N");
            (u_power(&hg, &hn, sh, k, ring)?, top_vector(ctx.prime(), k, ring))
        };
        let target = Arc::new(target);
        let (_, res) = restrict_complex(&*ctx.ambient(&x.twist)?, h)?;
        let res = Arc::new(res);
        let out = equivalence_normalized(&res, &target, top, &ctx.top_generator(&x.twist), &zt)?;
        let Some(e) = out.found() else {
            object = false;
            classes.push(ClassCheck { name: x.label(), expected: "an equivalence".into(), ok: false });
            continue;
        };
        let hom = hom_group(&target, x.shift);
        let image = e.f.comp(-x.shift).mul(x.cycle(), ring);
        let got = hom.coordinates(&image)?;
        let kind = x.label().chars().next().unwrap_or('?');
        let (expected, want) = if contained {
            match kind {
                'b' => ("id".to_string(), hom.coordinates(&ones(1))?),
                _ => ("0".to_string(), Mat::zeros(got.rows(), 1)),
            }
        } else {
            let cyc = if kind == 'a' { ones(1) } else { ones(ctx.prime() as usize) };
            (format!("{kind}_(H∩N)"), hom.coordinates(&cyc)?)
        };
        classes.push(ClassCheck { name: x.label(), expected, ok: got == want });
    }
    Ok(RestrictionReport {
        normal: n.elements().to_vec(),
        subgroup: h.elements().to_vec(),
        contained,
        ring: ring.to_string(),
        object,
        classes,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BaseChangeClassReport {
    pub prime: u64,
    pub case_integral: Case,
    pub case_residue: Case,
    pub classes: Vec<ClassCheck>,
    /// Smallest `n ≤ 2` with `y^n` in the image of base change, per residue generator.
    pub power_surjective: Vec<(String, Option<u32>)>,
    /// Residue fields away from `p`: positive twists live only at shift `−2'·twist`.
    pub coprime: Vec<(String, bool)>,
}

impl BaseChangeClassReport {
    pub fn passed(&self) -> bool {
        self.classes.iter().all(|c| c.ok)
            && self.power_surjective.iter().all(|(_, n)| n.is_some())
            && self.coprime.iter().all(|(_, ok)| *ok)
    }
}

fn span_contains(basis: &[Mat], v: &Mat, ring: Ring) -> bool {
    let n = v.rows();
    if v.is_zero() {
        return true;
    }
    if basis.is_empty() || n == 0 {
        return false;
    }
    let mut rows = Vec::new();
    for b in basis {
        rows.extend(b.clone().normalize(ring).transpose().row(0).to_vec());
    }
    let h = echelon_rows(&Mat::from_parts(basis.len(), n, rows, 1).normalize(ring), ring);
    in_row_span(&h, &v.transpose(), ring)
}

/// Base change of `a_N`, `b_N` from `Z` to the residue fields.
pub fn base_change_class_check(ctx: &TwistedCohomology, i: usize) -> Result<BaseChangeClassReport> {
    if ctx.ring() != Ring::Integers {
        return Err(Error::Ring("classes must be built over Z".into()));
    }
    let p = ctx.prime();
    let fp = Ring::prime_field(p)?;
    let res = TwistedCohomology::with_sigmas(ctx.group().clone(), fp, ctx.sigmas().to_vec())?;
    let zmaps = ctx.generator_maps(i)?;
    let fmaps = res.generator_maps(i)?;
    let iota = |x: &TwistedClass, r: &TwistedCohomology| -> Result<TwistedClass> {
        let amb = r.ambient(&x.twist)?;
        if *amb != x.class.ambient.base_change(r.ring())? {
            return Err(Error::Validation("canonical complexes do not base change".into()));
        }
        r.class(&x.twist, x.shift, x.cycle().base_change(r.ring()), x.name.clone())
    };
    let same = |x: &TwistedClass, y: &TwistedClass, r: &TwistedCohomology| -> Result<bool> {
        if x.twist != y.twist || x.shift != y.shift {
            return Ok(false);
        }
        let h = r.hom(&x.twist, x.shift)?;
        Ok(h.coordinates(x.cycle())? == h.coordinates(y.cycle())?)
    };
    let mut classes = Vec::new();
    let ia = iota(&zmaps.a, &res)?;
    classes.push(ClassCheck { name: "a".into(), expected: "a over F_p".into(), ok: same(&ia, &fmaps.a, &res)? });
    let ib = iota(&zmaps.b, &res)?;
    let (expected, want) = if ctx.case() == Case::C2 {
        ("b² over F_2".to_string(), res.product(&fmaps.b, &fmaps.b)?)
    } else {
        ("b over F_p".to_string(), fmaps.b.clone())
    };
    classes.push(ClassCheck { name: "b".into(), expected, ok: same(&ib, &want, &res)? });

    let mut power_surjective = Vec::new();
    for y in fmaps.all() {
        let mut hit = None;
        for k in 1..=2u32 {
            let yk = res.power(y, k)?;
            let hz = ctx.hom(&yk.twist, yk.shift)?;
            let hf = res.hom(&yk.twist, yk.shift)?;
            let mut image = Vec::new();
            for g in &hz.generators {
                image.push(hf.coordinates(&g.cycle.base_change(fp))?);
            }
            if span_contains(&image, &hf.coordinates(yk.cycle())?, fp) {
                hit = Some(k);
                break;
            }
        }
        power_surjective.push((y.label(), hit));
    }

    let mut coprime = Vec::new();
    let ell = if p == 2 { 3 } else { 2 };
    for r in [Ring::Rationals, Ring::prime_field(ell)?] {
        let rc = TwistedCohomology::with_sigmas(ctx.group().clone(), r, ctx.sigmas().to_vec())?;
        let mut ok = true;
        let tp = rc.case().two_prime();
        for k in 1..=2u32 {
            let q = Twist::basis(ctx.normals().len(), i, k);
            for s in -tp * k as i32..=0 {
                let dim = rc.hom(&q, s)?.presentation.dimension();
                let expect = if s == -tp * k as i32 && (p != 2 || k % 2 == 0) { 1 } else { 0 };
                ok &= dim == expect;
            }
        }
        // ι(a) vanishes, ι(b) does not
        let ia = iota(&zmaps.a, &rc)?;
        let ib = iota(&zmaps.b, &rc)?;
        ok &= rc.hom(&ia.twist, ia.shift)?.is_zero_class(ia.cycle())?;
        ok &= !rc.hom(&ib.twist, ib.shift)?.is_zero_class(ib.cycle())?;
        coprime.push((r.to_string(), ok));
    }
    Ok(BaseChangeClassReport {
        prime: p,
        case_integral: ctx.case(),
        case_residue: res.case(),
        classes,
        power_surjective,
        coprime,
    })
}

// ---------------------------------------------------------------------------
// twist-zero localization

#[derive(Clone, Debug, Serialize)]
pub struct LocalPiece {
    pub shift: i32,
    pub presentation: FgModulePresentation,
    /// Whether the image was already reached one stage earlier.
    pub stable: Option<bool>,
    /// Fractions `f/g^k` (common powers of `g` cancelled) generating the piece.
    pub fractions: Vec<String>,
}

/// The twist-zero part of the localization at the multiplicative set
/// generated by one generator.
#[derive(Clone, Debug, Serialize)]
pub struct Localization {
    pub inverted: String,
    pub stage: u32,
    /// Shift of the degree-one piece (sign included).
    pub step: i32,
    pub pieces: BTreeMap<i32, LocalPiece>,
}

impl Localization {
    /// The pieces in degrees `0..n`, degree `d` sitting at shift `d·step`.
    pub fn hilbert(&self, n: usize) -> Result<Vec<FgModulePresentation>> {
        (0..n as i32)
            .map(|d| {
                self.pieces
                    .get(&(d * self.step))
                    .map(|p| p.presentation.clone())
                    .ok_or_else(|| Error::Bounds(format!("degree {d} needs a larger twist bound")))
            })
            .collect()
    }

    /// Whether every piece up to degree `n` was stable.
    pub fn stable_up_to(&self, n: usize) -> bool {
        (0..n as i32).all(|d| self.pieces.get(&(d * self.step)).is_some_and(|p| p.stable != Some(false)))
    }
}

/// Twist-zero fractions `f/g^k`, with `g = b` if `H ≤ N` and `g = a`
/// otherwise, for groups with a single index-`p` normal subgroup.
pub fn localize_twist0(table: &GradedTable, h: &Subgroup) -> Result<Localization> {
    let ctx = &table.context;
    if ctx.normals().len() != 1 {
        return Err(Error::Validation("localization needs a single index-p normal subgroup".into()));
    }
    ctx.group().subgroup_from(h.elements())?;
    let ring = ctx.ring();
    let gi = if h.is_subset(&ctx.normals()[0]) { 1 } else { 0 };
    let ginfo = table.generators[gi].clone();
    let g = table.generator_classes[gi].clone();
    let (sg, tg) = (g.shift, g.twist.total());
    let stage = table.max_twist / tg;
    if stage < 1 {
        return Err(Error::Bounds("the twist bound does not reach the inverted generator".into()));
    }
    let qk = |k: u32| g.twist.scale(k);
    let hom_at = |k: u32, sigma: i32| -> Result<HomGroup> {
        let s = sigma + k as i32 * sg;
        match table.entry(&qk(k), s) {
            Some(e) => Ok(e.hom.clone()),
            None => ctx.hom(&qk(k), s),
        }
    };
    // image of stage j in stage `stage`, by multiplying with g^(stage−j)
    let image = |j: u32, sigma: i32, target: &HomGroup| -> Result<(usize, Vec<i64>, Vec<Mat>)> {
        let src = hom_at(j, sigma)?;
        let mut cols = Vec::new();
        for c in &src.generators {
            let mut x = TwistedClass { shift: c.shift, twist: qk(j), class: c.clone(), name: None };
            for _ in j..stage {
                x = ctx.product(&x, &g)?;
            }
            cols.push(target.coordinates(x.cycle())?);
        }
        let mut m = Mat::zeros(target.orders.len(), cols.len());
        for (k, c) in cols.iter().enumerate() {
            m.set_block(0, k, c);
        }
        let rel = relation_rows(&m.normalize(ring), &target.orders, ring);
        let (rank, tors) = quotient_invariants(&rel, cols.len(), ring);
        Ok((rank, tors, cols))
    };
    let top = ctx.top(&qk(stage));
    let lo = -top - stage as i32 * sg;
    let hi = -(stage as i32) * sg;
    let mut pieces = BTreeMap::new();
    for sigma in lo..=hi {
        // the source stage must contain a possibly nonzero group
        let fs = sigma + (stage as i32 - 1) * sg;
        if fs > 0 || fs < -ctx.top(&qk(stage - 1)) {
            continue;
        }
        let target = hom_at(stage, sigma)?;
        let (rank, torsion, _) = image(stage - 1, sigma, &target)?;
        let stable = if stage >= 2 {
            let fs2 = sigma + (stage as i32 - 2) * sg;
            if fs2 > 0 || fs2 < -ctx.top(&qk(stage - 2)) {
                None
            } else {
                let (r2, t2, _) = image(stage - 2, sigma, &target)?;
                Some(r2 == rank && t2 == torsion)
            }
        } else {
            None
        };
        let presentation = FgModulePresentation { ring, rank, torsion };
        // monomials f of the source stage with f·g nonzero, as reduced fractions
        let mut fractions = Vec::new();
        for m in ctx.monomials_in(&qk(stage - 1), fs) {
            let v = ctx.product(&ctx.monomial(&table.generator_classes, &m)?, &g)?;
            if target.is_zero_class(v.cycle())? {
                continue;
            }
            let mut num = m.clone();
            num[gi] += 1;
            let cancel = num[gi].min(stage);
            num[gi] -= cancel;
            let mut den = vec![0u32; num.len()];
            den[gi] = stage - cancel;
            let f = table.tag(&num);
            let d = table.tag(&den);
            fractions.push(if d == "1" { f } else { format!("{f}/{d}") });
        }
        pieces.insert(sigma, LocalPiece { shift: sigma, presentation, stable, fractions });
    }
    let nonzero: Vec<i32> = pieces.values().filter(|p| !p.presentation.is_zero() && p.shift != 0).map(|p| p.shift).collect();
    let step = match nonzero.iter().map(|s| s.abs()).reduce(|a, b| a.gcd(&b)) {
        Some(d) => {
            if nonzero.iter().any(|&s| s < 0) {
                -d
            } else {
                d
            }
        }
        None => 1,
    };
    Ok(Localization { inverted: ginfo.name, stage, step, pieces })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyc(n: usize, ring: Ring) -> Arc<TwistedCohomology> {
        TwistedCohomology::new(Group::cyclic(n), ring).unwrap()
    }

    #[test]
    fn cases() {
        assert_eq!(Case::of(2, Ring::PrimeField(2)), Case::C1);
        assert_eq!(Case::of(2, Ring::Integers), Case::C2);
        assert_eq!(Case::of(3, Ring::PrimeField(3)), Case::C3);
        assert_eq!(Case::of(3, Ring::Rationals), Case::C4);
        assert_eq!(Case::of(3, Ring::PrimeField(2)), Case::C4);
    }

    #[test]
    fn c3_square_shape() {
        let ctx = cyc(3, Ring::Integers);
        let y = ctx.ambient(&Twist(vec![2])).unwrap();
        assert_eq!(y.ranks(), vec![(0, 1), (1, 3), (2, 3), (3, 3), (4, 3)]);
        let sigma = Mat::from_fn(3, 3, |i, j| if i == (j + 1) % 3 { 1 } else { 0 });
        let s1 = y.d(2).into_owned();
        assert!(s1 == sigma.sub(&Mat::identity(3), Ring::Integers) || s1 == sigma.transpose().sub(&Mat::identity(3), Ring::Integers));
        assert_eq!(*y.d(3), Mat::from_fn(3, 3, |_, _| 1));
        assert_eq!(*y.d(1), Mat::from_fn(1, 3, |_, _| 1));
        assert_eq!(ctx.ambient(&Twist(vec![0])).unwrap().ranks(), vec![(0, 1)]);
    }

    #[test]
    fn tensor_square_matches_canonical() {
        let ctx = cyc(2, Ring::Integers);
        let u = ctx.ambient(&Twist(vec![1])).unwrap();
        let x = Arc::new(tensor_complex(&u, &u).unwrap());
        let y = ctx.ambient(&Twist(vec![2])).unwrap();
        assert!(find_homotopy_equivalence(&x, &y).unwrap().is_found());
    }

    #[test]
    fn generator_cases() {
        let g = cyc(2, Ring::PrimeField(2)).generator_maps(0).unwrap();
        assert_eq!(g.case, Case::C1);
        assert!(g.c.is_none() && g.c().is_err());
        assert_eq!((g.b.shift, g.b.twist.total()), (-1, 1));
        let g = cyc(2, Ring::Integers).generator_maps(0).unwrap();
        assert_eq!((g.b.shift, g.b.twist.total()), (-2, 2));
        let ctx = cyc(3, Ring::PrimeField(3));
        let g = ctx.generator_maps(0).unwrap();
        assert_eq!(g.case, Case::C3);
        assert!(g.nonzero.iter().all(|(_, z)| *z));
        assert!(c_square_null_homotopy(&ctx, 0).unwrap().is_some());
        let g = cyc(3, Ring::Integers).generator_maps(0).unwrap();
        assert_eq!(g.case, Case::C4);
        assert!(g.c.is_none());
    }

    #[test]
    fn integral_cp_a_relation() {
        let ctx = cyc(3, Ring::Integers);
        let h = ctx.hom(&Twist(vec![1]), 0).unwrap();
        assert_eq!(h.presentation.torsion, vec![3]);
        let a = ctx.generator_maps(0).unwrap().a;
        assert!(null_homotopy_of_multiple(&a, 3).unwrap().is_some());
        assert!(null_homotopy_of_multiple(&a, 1).unwrap().is_none());
    }

    #[test]
    fn products_are_associative_on_classes() {
        let ctx = cyc(3, Ring::PrimeField(3));
        let g = ctx.generator_maps(0).unwrap();
        let ab_c = ctx.product(&ctx.product(&g.a, &g.b).unwrap(), g.c.as_ref().unwrap()).unwrap();
        let a_bc = ctx.product(&g.a, &ctx.product(&g.b, g.c.as_ref().unwrap()).unwrap()).unwrap();
        let h = ctx.hom(&ab_c.twist, ab_c.shift).unwrap();
        assert_eq!(h.coordinates(ab_c.cycle()).unwrap(), h.coordinates(a_bc.cycle()).unwrap());
        assert!(!h.is_zero_class(ab_c.cycle()).unwrap());
    }

    #[test]
    fn f2_table_is_polynomial() {
        let ctx = cyc(2, Ring::PrimeField(2));
        let t = twisted_table(&ctx, 3, None).unwrap();
        for ((q, s), e) in &t.entries {
            let expect = if -s >= 0 && -s <= q.total() as i32 { 1 } else { 0 };
            assert_eq!(e.presentation().dimension(), expect, "({s},{q})");
        }
        let pres = ring_presentation(&t).unwrap();
        pres.check().unwrap();
        assert!(pres.relations.is_empty(), "{pres}");
    }

    #[test]
    fn f3_presentation_has_c_squared() {
        let ctx = cyc(3, Ring::PrimeField(3));
        let t = twisted_table(&ctx, 3, None).unwrap();
        let pres = ring_presentation(&t).unwrap();
        pres.check().unwrap();
        assert!(pres.has_relation("c^2"), "{pres}");
        assert_eq!(pres.relations.len(), 1, "{pres}");
    }

    #[test]
    fn integral_presentation() {
        let ctx = cyc(3, Ring::Integers);
        let t = twisted_table(&ctx, 3, None).unwrap();
        let pres = ring_presentation(&t).unwrap();
        pres.check().unwrap();
        assert!(pres.has_relation("3·a"), "{pres}");
        assert_eq!(pres.relations.len(), 1, "{pres}");
    }

    #[test]
    fn rational_table_concentrated() {
        let ctx = cyc(3, Ring::Rationals);
        let t = twisted_table(&ctx, 3, None).unwrap();
        for ((q, s), e) in &t.entries {
            let expect = usize::from(*s == -2 * q.total() as i32);
            assert_eq!(e.presentation().dimension(), expect, "({s},{q})");
        }
    }

    #[test]
    fn restriction_in_c4() {
        let ctx = TwistedCohomology::new(Group::cyclic(4), Ring::Integers).unwrap();
        let g = ctx.group().clone();
        for h in [g.trivial_subgroup(), g.generate(&[2]), g.whole()] {
            let r = restriction_check(&ctx, 0, &h).unwrap();
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn base_change_c2_c3() {
        for p in [2, 3] {
            let ctx = cyc(p, Ring::Integers);
            let r = base_change_class_check(&ctx, 0).unwrap();
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn localization_c3() {
        let ctx = cyc(3, Ring::Integers);
        let t = twisted_table(&ctx, 6, None).unwrap();
        let g = ctx.group().clone();
        let l = localize_twist0(&t, &g.trivial_subgroup()).unwrap();
        let hf: Vec<String> = l.hilbert(5).unwrap().iter().map(|p| p.to_string()).collect();
        assert_eq!(hf, ["Z", "Z/3", "Z/3", "Z/3", "Z/3"], "{l:?}");
        let l = localize_twist0(&t, &g.whole()).unwrap();
        let hf: Vec<String> = l.hilbert(5).unwrap().iter().map(|p| p.to_string()).collect();
        assert_eq!(hf, ["Z/3"; 5], "{l:?}");
    }

    #[test]
    fn restriction_in_klein_four() {
        let g = crate::grp::make_group(&crate::grp::GroupDescriptor::parse("C2xC2").unwrap()).unwrap();
        let subs = crate::grp::subgroups(&g).unwrap().subgroups;
        assert_eq!(subs.len(), 5);
        for ring in [Ring::Integers, Ring::PrimeField(2)] {
            let ctx = TwistedCohomology::new(g.clone(), ring).unwrap();
            assert_eq!(ctx.normals().len(), 3);
            for i in 0..3 {
                for h in &subs {
                    let r = restriction_check(&ctx, i, h).unwrap();
                    assert!(r.passed(), "{r:?}");
                }
            }
        }
    }

    #[test]
    fn localization_c2() {
        let ctx = cyc(2, Ring::Integers);
        let t = twisted_table(&ctx, 12, None).unwrap();
        let g = ctx.group().clone();
        let l = localize_twist0(&t, &g.trivial_subgroup()).unwrap();
        let hf: Vec<String> = l.hilbert(5).unwrap().iter().map(|p| p.to_string()).collect();
        assert_eq!(hf, ["Z", "Z/2", "Z/2", "Z/2", "Z/2"], "{l:?}");
        assert!(l.stable_up_to(5));
        let l = localize_twist0(&t, &g.whole()).unwrap();
        let hf: Vec<String> = l.hilbert(5).unwrap().iter().map(|p| p.to_string()).collect();
        assert_eq!(hf, ["Z/2"; 5], "{l:?}");
    }
}
