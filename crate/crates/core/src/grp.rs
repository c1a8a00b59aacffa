//! Finite groups as multiplication tables, subgroup lattices and the index
//! categories (sections, orbits) used by spectrum assembly.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ring::is_prime;

/// Default cap on group order for lattice computations.
pub const ORDER_BOUND: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GroupDescriptor {
    Cyclic { n: usize },
    Product { factors: Vec<GroupDescriptor> },
    /// Dihedral group of the given order (`2n`).
    Dihedral { order: usize },
    Quaternion,
    Table {
        mul: Vec<Vec<usize>>,
        #[serde(default)]
        name: Option<String>,
    },
}

impl GroupDescriptor {
    /// `C4`, `C2xC2`, `D8`, `Q8`; products are `x`-separated.
    pub fn parse(s: &str) -> Result<GroupDescriptor> {
        let parts: Vec<&str> = s.split(['x', 'X', '×']).map(str::trim).collect();
        let mut factors = Vec::new();
        for p in &parts {
            let bad = || Error::Descriptor(format!("cannot parse {p:?} in {s:?}"));
            let (head, tail) = p.split_at(p.char_indices().nth(1).map_or(p.len(), |x| x.0));
            let n: usize = tail.parse().map_err(|_| bad())?;
            factors.push(match head {
                "C" | "c" if n >= 1 => GroupDescriptor::Cyclic { n },
                "D" | "d" if n >= 2 && n % 2 == 0 => GroupDescriptor::Dihedral { order: n },
                "Q" | "q" if n == 8 => GroupDescriptor::Quaternion,
                _ => return Err(bad()),
            });
        }
        Ok(if factors.len() == 1 { factors.pop().unwrap() } else { GroupDescriptor::Product { factors } })
    }
}

#[derive(Clone, Serialize, Deserialize)]
pub struct Group {
    name: String,
    order: usize,
    mul: Vec<usize>,
    inv: Vec<usize>,
    identity: usize,
}

impl PartialEq for Group {
    fn eq(&self, other: &Group) -> bool {
        self.order == other.order && self.mul == other.mul
    }
}
impl Eq for Group {}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Group({}, order {})", self.name, self.order)
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Build a validated group from a descriptor.
pub fn make_group(desc: &GroupDescriptor) -> Result<Arc<Group>> {
    Ok(Arc::new(build(desc)?))
}

fn build(desc: &GroupDescriptor) -> Result<Group> {
    match desc {
        GroupDescriptor::Cyclic { n } => {
            if *n == 0 {
                return Err(Error::Descriptor("cyclic(0)".into()));
            }
            Group::from_fn(&format!("C{n}"), *n, |a, b| (a + b) % n)
        }
        GroupDescriptor::Dihedral { order } => {
            if *order < 2 || order % 2 == 1 {
                return Err(Error::Descriptor(format!("dihedral({order})")));
            }
            let m = order / 2;
            // r^i s^j  ↦  i + m j
            Group::from_fn(&format!("D{order}"), *order, |a, b| {
                let (i, j, k, l) = (a % m, a / m, b % m, b / m);
                let r = if j == 0 { (i + k) % m } else { (i + m - k) % m };
                r + m * ((j + l) % 2)
            })
        }
        GroupDescriptor::Quaternion => {
            // index = 2·unit + sign, unit ∈ {1,i,j,k}
            const UNIT: [[(usize, bool); 4]; 4] = [
                [(0, false), (1, false), (2, false), (3, false)],
                [(1, false), (0, true), (3, false), (2, true)],
                [(2, false), (3, true), (0, true), (1, false)],
                [(3, false), (2, false), (1, true), (0, true)],
            ];
            Group::from_fn("Q8", 8, |a, b| {
                let (u, v) = (a / 2, b / 2);
                let (w, neg) = UNIT[u][v];
                let sign = (a % 2 == 1) ^ (b % 2 == 1) ^ neg;
                2 * w + sign as usize
            })
        }
        GroupDescriptor::Product { factors } => {
            if factors.is_empty() {
                return Err(Error::Descriptor("empty product".into()));
            }
            let gs: Vec<Group> = factors.iter().map(build).collect::<Result<_>>()?;
            let order: usize = gs.iter().map(|g| g.order).product();
            let name = gs.iter().map(|g| g.name.clone()).collect::<Vec<_>>().join("x");
            let digits = |mut x: usize| {
                let mut d = vec![0; gs.len()];
                for (i, g) in gs.iter().enumerate().rev() {
                    d[i] = x % g.order;
                    x /= g.order;
                }
                d
            };
            Group::from_fn(&name, order, |a, b| {
                let (da, db) = (digits(a), digits(b));
                gs.iter().enumerate().fold(0, |acc, (i, g)| acc * g.order + g.mul(da[i], db[i]))
            })
        }
        GroupDescriptor::Table { mul, name } => {
            let n = mul.len();
            if n == 0 || mul.iter().any(|r| r.len() != n) {
                return Err(Error::BadTable("table must be square and nonempty".into()));
            }
            if mul.iter().flatten().any(|&x| x >= n) {
                return Err(Error::BadTable("entry out of range".into()));
            }
            let e = (0..n)
                .find(|&e| (0..n).all(|x| mul[e][x] == x && mul[x][e] == x))
                .ok_or_else(|| Error::BadTable("no identity".into()))?;
            // relabel so the identity is 0
            let sw = |x: usize| if x == e { 0 } else if x == 0 { e } else { x };
            let name = name.clone().unwrap_or_else(|| format!("G{n}"));
            Group::from_fn(&name, n, |a, b| sw(mul[sw(a)][sw(b)]))
        }
    }
}

impl Group {
    /// Validates associativity, identity 0 and inverses.
    pub fn from_fn(name: &str, order: usize, f: impl Fn(usize, usize) -> usize) -> Result<Group> {
        let mut mul = vec![0; order * order];
        for a in 0..order {
            for b in 0..order {
                let c = f(a, b);
                if c >= order {
                    return Err(Error::BadTable(format!("{a}·{b} out of range")));
                }
                mul[a * order + b] = c;
            }
        }
        let m = |a: usize, b: usize| mul[a * order + b];
        if (0..order).any(|x| m(0, x) != x || m(x, 0) != x) {
            return Err(Error::BadTable("0 is not the identity".into()));
        }
        for a in 0..order {
            for b in 0..order {
                for c in 0..order {
                    if m(m(a, b), c) != m(a, m(b, c)) {
                        return Err(Error::BadTable(format!("not associative at ({a},{b},{c})")));
                    }
                }
            }
        }
        let mut inv = vec![0; order];
        for a in 0..order {
            inv[a] = (0..order)
                .find(|&b| m(a, b) == 0 && m(b, a) == 0)
                .ok_or_else(|| Error::BadTable(format!("{a} has no inverse")))?;
        }
        Ok(Group { name: name.to_string(), order, mul, inv, identity: 0 })
    }

    /// Re-run the table checks, e.g. after deserialization.
    pub fn revalidate(&self) -> Result<Group> {
        if self.mul.len() != self.order * self.order {
            return Err(Error::BadTable("table size does not match the order".into()));
        }
        Group::from_fn(&self.name, self.order, |a, b| self.mul[a * self.order + b])
    }

    pub fn trivial() -> Arc<Group> {
        make_group(&GroupDescriptor::Cyclic { n: 1 }).unwrap()
    }

    pub fn cyclic(n: usize) -> Arc<Group> {
        make_group(&GroupDescriptor::Cyclic { n }).expect("cyclic group")
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn order(&self) -> usize {
        self.order
    }
    pub fn identity(&self) -> usize {
        self.identity
    }
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b]
    }
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }
    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn pow(&self, g: usize, k: usize) -> usize {
        (0..k).fold(0, |acc, _| self.mul(acc, g))
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    /// Right conjugation `x^g = g⁻¹ x g`.
    pub fn conj(&self, x: usize, g: usize) -> usize {
        self.mul(self.mul(self.inv(g), x), g)
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn is_cyclic(&self) -> bool {
        (0..self.order).any(|g| self.element_order(g) == self.order)
    }

    /// The prime `p` if the order is a power of `p` (None for the trivial group).
    pub fn prime(&self) -> Option<u64> {
        let n = self.order as u64;
        let p = (2..=n).find(|d| n % d == 0)?;
        let mut m = n;
        while m % p == 0 {
            m /= p;
        }
        (m == 1).then_some(p)
    }

    pub fn is_p_group(&self, p: u64) -> bool {
        self.order == 1 || self.prime() == Some(p)
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup { elements: self.elements().collect() }
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        Subgroup { elements: vec![0] }
    }

    /// Subgroup generated by `gens`.
    pub fn generate(&self, gens: &[usize]) -> Subgroup {
        let mut seen = BTreeSet::from([0]);
        let mut queue: VecDeque<usize> = VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        Subgroup { elements: seen.into_iter().collect() }
    }

    pub fn subgroup_from(&self, elements: &[usize]) -> Result<Subgroup> {
        let s: BTreeSet<usize> = elements.iter().copied().collect();
        let ok = s.contains(&0)
            && s.iter().all(|&x| x < self.order && s.contains(&self.inv(x)))
            && s.iter().all(|&a| s.iter().all(|&b| s.contains(&self.mul(a, b))));
        if !ok {
            return Err(Error::NotSubgroup(format!("{elements:?} in {}", self.name)));
        }
        Ok(Subgroup { elements: s.into_iter().collect() })
    }

    pub fn conjugate(&self, h: &Subgroup, g: usize) -> Subgroup {
        let mut e: Vec<usize> = h.elements.iter().map(|&x| self.conj(x, g)).collect();
        e.sort_unstable();
        Subgroup { elements: e }
    }

    pub fn is_normal(&self, h: &Subgroup) -> bool {
        self.elements().all(|g| self.conjugate(h, g) == *h)
    }

    pub fn normalizer(&self, h: &Subgroup) -> Subgroup {
        Subgroup { elements: self.elements().filter(|&g| self.conjugate(h, g) == *h).collect() }
    }

    /// Is `h` contained in some conjugate of `k`?
    pub fn subconjugate(&self, h: &Subgroup, k: &Subgroup) -> bool {
        self.elements().any(|g| h.is_subset(&self.conjugate(k, g)))
    }

    /// Left coset representatives of `h` (minimal element of each `gH`), sorted.
    pub fn coset_reps(&self, h: &Subgroup) -> Vec<usize> {
        let mut seen = vec![false; self.order];
        let mut reps = Vec::new();
        for g in self.elements() {
            if !seen[g] {
                reps.push(g);
                for &x in &h.elements {
                    seen[self.mul(g, x)] = true;
                }
            }
        }
        reps
    }

    /// Index of the left coset containing `g`, relative to `coset_reps(h)`.
    pub fn coset_index(&self, h: &Subgroup, reps: &[usize], g: usize) -> usize {
        let gi = self.inv(g);
        reps.iter().position(|&r| h.contains(self.mul(gi, r))).expect("coset")
    }

    /// The subgroup as an abstract group, numbered by its sorted element list.
    pub fn subgroup_group(&self, h: &Subgroup) -> (Arc<Group>, Homomorphism) {
        let e = &h.elements;
        let name = format!("{}<{}", subgroup_name(h), self.name);
        let g = Group::from_fn(&name, e.len(), |a, b| e.binary_search(&self.mul(e[a], e[b])).unwrap())
            .expect("subgroup is a group");
        let g = Arc::new(g);
        let map = e.clone();
        (g, Homomorphism { source_order: e.len(), target_order: self.order, map })
    }

    /// `G/N` with cosets numbered by their minimal elements.
    pub fn quotient(&self, n: &Subgroup) -> Result<(Arc<Group>, Homomorphism)> {
        if !self.is_normal(n) {
            return Err(Error::NotSubgroup("quotient by a non-normal subgroup".into()));
        }
        let reps = self.coset_reps(n);
        let idx: Vec<usize> = self.elements().map(|g| self.coset_index(n, &reps, g)).collect();
        let name = format!("{}/{}", self.name, subgroup_name(n));
        let q = Group::from_fn(&name, reps.len(), |a, b| idx[self.mul(reps[a], reps[b])])?;
        Ok((Arc::new(q), Homomorphism { source_order: self.order, target_order: reps.len(), map: idx }))
    }

    /// Index-`p` normal subgroups, sorted.
    pub fn index_p_normal(&self, p: u64) -> Result<Vec<Subgroup>> {
        Ok(subgroups(self)?
            .subgroups
            .into_iter()
            .filter(|h| h.order() * p as usize == self.order && self.is_normal(h))
            .collect())
    }
}

pub fn subgroup_name(h: &Subgroup) -> String {
    if h.order() == 1 {
        "1".into()
    } else {
        format!("H{}{:?}", h.order(), h.elements)
    }
}

/// A set map between element indices that is a group homomorphism.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Homomorphism {
    pub source_order: usize,
    pub target_order: usize,
    pub map: Vec<usize>,
}

impl Homomorphism {
    pub fn check(&self, source: &Group, target: &Group) -> Result<()> {
        let ok = source.order() == self.source_order
            && target.order() == self.target_order
            && self.map.len() == source.order()
            && source.elements().all(|a| {
                source.elements().all(|b| self.map[source.mul(a, b)] == target.mul(self.map[a], self.map[b]))
            });
        if ok {
            Ok(())
        } else {
            Err(Error::Mismatch("not a homomorphism".into()))
        }
    }

    pub fn apply(&self, g: usize) -> usize {
        self.map[g]
    }
}

/// Canonical identity: the sorted element set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Subgroup {
    elements: Vec<usize>,
}

impl Subgroup {
    pub fn elements(&self) -> &[usize] {
        &self.elements
    }
    pub fn order(&self) -> usize {
        self.elements.len()
    }
    pub fn contains(&self, g: usize) -> bool {
        self.elements.binary_search(&g).is_ok()
    }
    pub fn is_subset(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|&x| other.contains(x))
    }
    pub fn intersect(&self, other: &Subgroup) -> Subgroup {
        Subgroup { elements: self.elements.iter().copied().filter(|&x| other.contains(x)).collect() }
    }
    /// Image under a homomorphism (as a sorted set).
    pub fn image(&self, f: &Homomorphism) -> Subgroup {
        let s: BTreeSet<usize> = self.elements.iter().map(|&x| f.apply(x)).collect();
        Subgroup { elements: s.into_iter().collect() }
    }
    /// Preimage under a homomorphism.
    pub fn preimage(&self, f: &Homomorphism) -> Subgroup {
        Subgroup { elements: (0..f.source_order).filter(|&x| self.contains(f.apply(x))).collect() }
    }
}

/// All subgroups with conjugacy data.
#[derive(Clone, Debug)]
pub struct SubgroupLattice {
    /// Sorted by (order, elements).
    pub subgroups: Vec<Subgroup>,
    /// Conjugacy class index of each subgroup.
    pub class_of: Vec<usize>,
    /// Classes, each sorted, first entry the lexicographic-minimum representative.
    pub classes: Vec<Vec<usize>>,
    pub normalizers: Vec<Subgroup>,
}

impl SubgroupLattice {
    pub fn weyl_order(&self, i: usize) -> usize {
        self.normalizers[i].order() / self.subgroups[i].order()
    }

    pub fn representative(&self, class: usize) -> &Subgroup {
        &self.subgroups[self.classes[class][0]]
    }

    pub fn index_of(&self, h: &Subgroup) -> Option<usize> {
        self.subgroups.iter().position(|x| x == h)
    }
}

pub fn subgroups(g: &Group) -> Result<SubgroupLattice> {
    subgroups_bounded(g, ORDER_BOUND)
}

/// Breadth-first closure: every subgroup arises by adjoining elements one at a time.
pub fn subgroups_bounded(g: &Group, bound: usize) -> Result<SubgroupLattice> {
    if g.order() > bound {
        return Err(Error::OrderBound { order: g.order(), bound });
    }
    let mut found: BTreeSet<Subgroup> = BTreeSet::new();
    let mut queue = VecDeque::from([g.trivial_subgroup()]);
    found.insert(g.trivial_subgroup());
    while let Some(h) = queue.pop_front() {
        for x in g.elements() {
            if h.contains(x) {
                continue;
            }
            let mut gens = h.elements.clone();
            gens.push(x);
            let k = g.generate(&gens);
            if found.insert(k.clone()) {
                queue.push_back(k);
            }
        }
    }
    let mut subs: Vec<Subgroup> = found.into_iter().collect();
    subs.sort_by(|a, b| (a.order(), &a.elements).cmp(&(b.order(), &b.elements)));
    let mut class_of = vec![usize::MAX; subs.len()];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..subs.len() {
        if class_of[i] != usize::MAX {
            continue;
        }
        let conj: BTreeSet<Subgroup> = g.elements().map(|x| g.conjugate(&subs[i], x)).collect();
        let mut members: Vec<usize> = conj.iter().map(|c| subs.iter().position(|s| s == c).unwrap()).collect();
        members.sort_by(|&a, &b| subs[a].elements.cmp(&subs[b].elements));
        for &m in &members {
            class_of[m] = classes.len();
        }
        classes.push(members);
    }
    let normalizers = subs.iter().map(|h| g.normalizer(h)).collect();
    Ok(SubgroupLattice { subgroups: subs, class_of, classes, normalizers })
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SectionObject {
    pub h: Subgroup,
    pub k: Subgroup,
}

impl SectionObject {
    pub fn is_trivial(&self) -> bool {
        self.h == self.k
    }
    pub fn rank_order(&self) -> usize {
        self.h.order() / self.k.order()
    }
}

/// `g` with `K' ≤ K^g ≤ H^g ≤ H'`; endpoints index into the object list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionMorphism {
    pub source: usize,
    pub target: usize,
    pub g: usize,
}

#[derive(Clone, Debug)]
pub struct SectionsCategory {
    pub p: u64,
    pub objects: Vec<SectionObject>,
    pub morphisms: Vec<SectionMorphism>,
}

fn is_elementary_abelian_section(g: &Group, h: &Subgroup, k: &Subgroup, p: u64) -> bool {
    let he = h.elements();
    k.is_subset(h)
        && he.iter().all(|&x| k.elements().iter().all(|&y| h.contains(g.conj(y, x)) && k.contains(g.conj(y, x))))
        && he.iter().all(|&x| k.contains(g.pow(x, p as usize)))
        && he.iter().all(|&x| he.iter().all(|&y| k.contains(g.mul(g.mul(g.inv(x), g.inv(y)), g.mul(x, y)))))
}

pub fn section_morphism_valid(g: &Group, s: &SectionObject, t: &SectionObject, x: usize) -> bool {
    let kg = g.conjugate(&s.k, x);
    let hg = g.conjugate(&s.h, x);
    t.k.is_subset(&kg) && hg.is_subset(&t.h)
}

pub fn sections_category(g: &Group, p: u64) -> Result<SectionsCategory> {
    if !is_prime(p) || !g.is_p_group(p) {
        return Err(Error::NotPGroup { p });
    }
    let lat = subgroups(g)?;
    let mut objects = Vec::new();
    for h in &lat.subgroups {
        for k in &lat.subgroups {
            if is_elementary_abelian_section(g, h, k, p) {
                objects.push(SectionObject { h: h.clone(), k: k.clone() });
            }
        }
    }
    objects.sort_by(|a, b| (a.h.order(), a.k.order(), &a.h, &a.k).cmp(&(b.h.order(), b.k.order(), &b.h, &b.k)));
    let mut morphisms = Vec::new();
    for (i, s) in objects.iter().enumerate() {
        for (j, t) in objects.iter().enumerate() {
            for x in g.elements() {
                if section_morphism_valid(g, s, t, x) {
                    morphisms.push(SectionMorphism { source: i, target: j, g: x });
                }
            }
        }
    }
    Ok(SectionsCategory { p, objects, morphisms })
}

impl SectionsCategory {
    /// `m1` then `m2`; the composite element is `g1·g2`.
    pub fn compose(&self, g: &Group, m1: &SectionMorphism, m2: &SectionMorphism) -> Option<SectionMorphism> {
        (m1.target == m2.source).then(|| SectionMorphism { source: m1.source, target: m2.target, g: g.mul(m1.g, m2.g) })
    }

    pub fn is_valid(&self, g: &Group, m: &SectionMorphism) -> bool {
        section_morphism_valid(g, &self.objects[m.source], &self.objects[m.target], m.g)
    }

    /// Objects up to conjugacy, with the "exists a non-invertible morphism" relation.
    pub fn reduced_poset(&self, g: &Group) -> (Vec<usize>, Vec<(usize, usize)>) {
        let mut reps: Vec<usize> = Vec::new();
        let mut class = vec![0; self.objects.len()];
        for (i, o) in self.objects.iter().enumerate() {
            let found = reps.iter().position(|&r| {
                let ro = &self.objects[r];
                g.elements().any(|x| g.conjugate(&ro.h, x) == o.h && g.conjugate(&ro.k, x) == o.k)
            });
            class[i] = match found {
                Some(c) => c,
                None => {
                    reps.push(i);
                    reps.len() - 1
                }
            };
        }
        let rel: BTreeSet<(usize, usize)> = self
            .morphisms
            .iter()
            .filter(|m| class[m.source] != class[m.target])
            .map(|m| (class[m.source], class[m.target]))
            .collect();
        (reps, rel.into_iter().collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitMorphism {
    pub source: usize,
    pub target: usize,
    /// `gH ↦ g·a·K`.
    pub a: usize,
}

#[derive(Clone, Debug)]
pub struct OrbitCategory {
    pub objects: Vec<Subgroup>,
    pub morphisms: Vec<OrbitMorphism>,
}

pub fn orbit_category(g: &Group, family: &[Subgroup]) -> Result<OrbitCategory> {
    let objects: Vec<Subgroup> = family.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    for h in &objects {
        for x in g.elements() {
            if !objects.contains(&g.conjugate(h, x)) {
                return Err(Error::Validation("family not closed under conjugation".into()));
            }
        }
    }
    let mut morphisms = Vec::new();
    for (i, h) in objects.iter().enumerate() {
        for (j, k) in objects.iter().enumerate() {
            for a in g.coset_reps(k) {
                // a⁻¹ H a ≤ K
                if g.conjugate(h, a).is_subset(k) {
                    morphisms.push(OrbitMorphism { source: i, target: j, a });
                }
            }
        }
    }
    Ok(OrbitCategory { objects, morphisms })
}

impl OrbitCategory {
    pub fn count(&self, i: usize, j: usize) -> usize {
        self.morphisms.iter().filter(|m| m.source == i && m.target == j).count()
    }

    /// Maps `G/H → G/K` modulo post-composition with `Aut(G/K) = N_G(K)/K`.
    pub fn collapsed_count(&self, g: &Group, i: usize, j: usize) -> usize {
        let k = &self.objects[j];
        let reps = g.coset_reps(k);
        let n = g.normalizer(k);
        let maps: Vec<usize> =
            self.morphisms.iter().filter(|m| m.source == i && m.target == j).map(|m| g.coset_index(k, &reps, m.a)).collect();
        let mut orbits: BTreeMap<usize, usize> = BTreeMap::new();
        for &c in &maps {
            let orbit_min = n.elements().iter().map(|&x| g.coset_index(k, &reps, g.mul(reps[c], x))).min().unwrap();
            orbits.insert(orbit_min, c);
        }
        orbits.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> Arc<Group> {
        make_group(&GroupDescriptor::parse(s).unwrap()).unwrap()
    }

    // independent oracle: closure test on every subset
    fn brute_subgroup_count(g: &Group) -> usize {
        let n = g.order();
        (0u64..1 << n)
            .filter(|&mask| {
                let s: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                g.subgroup_from(&s).is_ok()
            })
            .count()
    }

    #[test]
    fn small_groups() {
        assert_eq!(g("C1").order(), 1);
        assert_eq!(subgroups(&g("C4")).unwrap().subgroups.len(), 3);
        assert_eq!(subgroups(&g("C2xC2")).unwrap().subgroups.len(), 5);
        assert_eq!(subgroups(&g("C7")).unwrap().subgroups.len(), 2);
        let c8 = subgroups(&g("C8")).unwrap();
        assert_eq!(c8.subgroups.len(), 4);
        for w in c8.subgroups.windows(2) {
            assert!(w[0].is_subset(&w[1]));
        }
        let d8 = subgroups(&g("D8")).unwrap();
        assert_eq!(d8.subgroups.len(), 10);
        assert_eq!(d8.classes.len(), 8);
        assert_eq!(subgroups(&g("Q8")).unwrap().subgroups.len(), 6);
        assert!(!g("Q8").is_abelian());
    }

    #[test]
    fn lattice_matches_subset_oracle() {
        for s in ["C4", "C2xC2", "C6", "D8", "Q8", "C3xC3"] {
            let gr = g(s);
            if gr.order() <= 9 {
                assert_eq!(subgroups(&gr).unwrap().subgroups.len(), brute_subgroup_count(&gr), "{s}");
            }
        }
    }

    #[test]
    fn weyl_orders() {
        for s in ["D8", "Q8", "C2xC4"] {
            let gr = g(s);
            let lat = subgroups(&gr).unwrap();
            for (i, h) in lat.subgroups.iter().enumerate() {
                assert_eq!(lat.normalizers[i].order(), lat.weyl_order(i) * h.order());
                for x in gr.elements() {
                    assert!(lat.index_of(&gr.conjugate(h, x)).is_some());
                }
            }
        }
    }

    #[test]
    fn descriptors() {
        assert!(GroupDescriptor::parse("C0").is_err());
        assert!(GroupDescriptor::parse("Z4").is_err());
        let json = r#"{"kind":"product","factors":[{"kind":"cyclic","n":2},{"kind":"cyclic","n":2}]}"#;
        let d: GroupDescriptor = serde_json::from_str(json).unwrap();
        assert_eq!(d, GroupDescriptor::parse("C2xC2").unwrap());
        let t = GroupDescriptor::Table { mul: vec![vec![1, 0], vec![0, 1]], name: None };
        let gt = make_group(&t).unwrap();
        assert_eq!(gt.identity(), 0);
        let bad = GroupDescriptor::Table { mul: vec![vec![0, 1], vec![0, 1]], name: None };
        assert!(make_group(&bad).is_err());
    }

    #[test]
    fn quotient_and_subgroup_groups() {
        let c4 = g("C4");
        let lat = subgroups(&c4).unwrap();
        let c2 = &lat.subgroups[1];
        let (q, pr) = c4.quotient(c2).unwrap();
        assert_eq!(q.order(), 2);
        pr.check(&c4, &q).unwrap();
        let (h, inc) = c4.subgroup_group(c2);
        inc.check(&h, &c4).unwrap();
    }

    #[test]
    fn sections_of_cp() {
        let c3 = g("C3");
        let cat = sections_category(&c3, 3).unwrap();
        assert_eq!(cat.objects.len(), 3);
        let (reps, rel) = cat.reduced_poset(&c3);
        assert_eq!(reps.len(), 3);
        // (1,1) → (G,1) ← (G,G)
        let idx = |h: usize, k: usize| cat.objects.iter().position(|o| o.h.order() == h && o.k.order() == k).unwrap();
        let mut want = vec![(idx(1, 1), idx(3, 1)), (idx(3, 3), idx(3, 1))];
        want.sort();
        assert_eq!(rel, want);
        assert!(sections_category(&g("C6"), 2).is_err());
        let triv = sections_category(&g("C1"), 2).unwrap();
        assert_eq!(triv.objects.len(), 1);
        assert_eq!(triv.morphisms.len(), 1);
    }

    #[test]
    fn sections_of_c9_form_a_zigzag() {
        let c9 = g("C9");
        let cat = sections_category(&c9, 3).unwrap();
        // trivial sections 1, C3, C9 and the two cyclic ones C3/1, C9/C3
        assert_eq!(cat.objects.len(), 5);
        let (_, rel) = cat.reduced_poset(&c9);
        assert_eq!(rel.len(), 4);
        for m1 in &cat.morphisms {
            for m2 in &cat.morphisms {
                if let Some(c) = cat.compose(&c9, m1, m2) {
                    assert!(cat.is_valid(&c9, &c));
                }
            }
        }
    }

    #[test]
    fn orbit_category_c6() {
        let c6 = g("C6");
        let lat = subgroups(&c6).unwrap();
        let fam: Vec<Subgroup> = lat.subgroups.iter().filter(|h| h.order() < 6 && h.order() != 6).cloned().collect();
        let fam: Vec<Subgroup> = fam.into_iter().filter(|h| [1, 2, 3].contains(&h.order())).collect();
        let oc = orbit_category(&c6, &fam).unwrap();
        let pos = |n: usize| oc.objects.iter().position(|h| h.order() == n).unwrap();
        assert_eq!(oc.count(pos(2), pos(3)), 0);
        assert_eq!(oc.count(pos(1), pos(2)), 3);
        assert_eq!(oc.collapsed_count(&c6, pos(1), pos(2)), 1);
        assert_eq!(oc.count(pos(1), pos(1)), 6);
    }
}
