//! Signed permutation modules: a basis permuted by the group up to sign.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grp::{Group, Homomorphism, Subgroup};
use crate::linalg::Mat;
use crate::ring::Ring;

/// Structured basis labels; they only matter for reports and debugging.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    /// The coset `rH` (minimal representative `r`).
    Coset(usize),
    Point,
    Tensor(Vec<Label>),
    Summand(usize, Box<Label>),
    Induced(usize, Box<Label>),
    Named(String),
}

impl Label {
    fn tensor(a: &Label, b: &Label) -> Label {
        let mut w = Vec::new();
        for x in [a, b] {
            match x {
                Label::Tensor(v) => w.extend(v.iter().cloned()),
                Label::Point => {}
                other => w.push(other.clone()),
            }
        }
        match w.len() {
            0 => Label::Point,
            1 => w.pop().unwrap(),
            _ => Label::Tensor(w),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Coset(r) => write!(f, "[{r}]"),
            Label::Point => write!(f, "*"),
            Label::Tensor(v) => {
                let s: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "{}", s.join("⊗"))
            }
            Label::Summand(k, l) => write!(f, "{k}:{l}"),
            Label::Induced(r, l) => write!(f, "{r}⊗{l}"),
            Label::Named(s) => f.write_str(s),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedPermModule {
    group: Arc<Group>,
    ring: Ring,
    labels: Vec<Label>,
    /// `act[g·rank + i] = (j, s)` means `g·e_i = s·e_j`.
    act: Vec<(u32, i8)>,
}

impl fmt::Debug for SignedPermModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Module(rank {} over {} for {})", self.rank(), self.ring, self.group.name())
    }
}

/// One orbit of basis lines: the summand `R(G/S)` twisted by a sign character of `S`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitSummand {
    pub rep: usize,
    pub size: usize,
    pub stabilizer: Subgroup,
    /// `χ(s)` for `s` in `stabilizer.elements()` order.
    pub character: Vec<i8>,
}

impl OrbitSummand {
    pub fn is_untwisted(&self) -> bool {
        self.character.iter().all(|&c| c == 1)
    }
}

impl SignedPermModule {
    /// Validates the action; over F_2 signs are erased.
    pub fn new(group: Arc<Group>, ring: Ring, labels: Vec<Label>, act: Vec<(usize, i8)>) -> Result<Self> {
        let n = labels.len();
        if act.len() != n * group.order() {
            return Err(Error::Mismatch("action table size".into()));
        }
        let erase = ring.erases_signs();
        let act: Vec<(u32, i8)> = act
            .into_iter()
            .map(|(j, s)| (j as u32, if erase { 1 } else { s }))
            .collect();
        let m = SignedPermModule { group, ring, labels, act };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        let n = self.rank();
        let g = &self.group;
        for i in 0..n {
            if self.act(0, i) != (i, 1) {
                return Err(Error::Mismatch("identity acts nontrivially".into()));
            }
        }
        for a in g.elements() {
            for b in g.elements() {
                for i in 0..n {
                    let (j, s) = self.act(b, i);
                    let (k, t) = self.act(a, j);
                    if self.act(g.mul(a, b), i) != (k, s * t) {
                        return Err(Error::Mismatch(format!("not an action at ({a},{b},{i})")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }
    pub fn ring(&self) -> Ring {
        self.ring
    }
    pub fn rank(&self) -> usize {
        self.labels.len()
    }
    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    #[inline]
    pub fn act(&self, g: usize, i: usize) -> (usize, i8) {
        let (j, s) = self.act[g * self.rank() + i];
        (j as usize, s)
    }

    pub fn is_permutation(&self) -> bool {
        self.act.iter().all(|&(_, s)| s == 1)
    }

    pub fn same_context(&self, other: &SignedPermModule) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::Mismatch(format!("rings {} vs {}", self.ring, other.ring)));
        }
        if !(Arc::ptr_eq(&self.group, &other.group) || self.group == other.group) {
            return Err(Error::Mismatch(format!("groups {} vs {}", self.group, other.group)));
        }
        Ok(())
    }

    /// Matrix of the action of `g`.
    pub fn matrix_of(&self, g: usize) -> Mat {
        let n = self.rank();
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            let (j, s) = self.act(g, i);
            m.set(j, i, s as i64);
        }
        m.normalize(self.ring)
    }

    /// `g·v` for a dense vector.
    pub fn act_vec(&self, g: usize, v: &[i64]) -> Vec<i64> {
        let mut out = vec![0; v.len()];
        for (i, &x) in v.iter().enumerate() {
            if x != 0 {
                let (j, s) = self.act(g, i);
                out[j] = self.ring.reduce(x * s as i64);
            }
        }
        out
    }

    pub fn zero(group: Arc<Group>, ring: Ring) -> Self {
        SignedPermModule { group, ring, labels: vec![], act: vec![] }
    }

    pub fn trivial(group: Arc<Group>, ring: Ring) -> Self {
        let n = group.order();
        SignedPermModule { group, ring, labels: vec![Label::Point], act: vec![(0, 1); n] }
    }

    /// The sign module `L` of an index-2 subgroup.
    pub fn sign(group: Arc<Group>, h: &Subgroup, ring: Ring) -> Result<Self> {
        if h.order() * 2 != group.order() {
            return Err(Error::NotSubgroup("sign module needs an index-2 subgroup".into()));
        }
        let act = group.elements().map(|g| (0, if h.contains(g) { 1 } else { -1 })).collect();
        SignedPermModule::new(group, ring, vec![Label::Named("L".into())], act)
    }

    pub fn with_ring(&self, ring: Ring) -> Self {
        let mut m = self.clone();
        m.ring = ring;
        if ring.erases_signs() {
            for a in &mut m.act {
                a.1 = 1;
            }
        }
        m
    }

    pub fn relabel(mut self, labels: Vec<Label>) -> Self {
        assert_eq!(labels.len(), self.labels.len());
        self.labels = labels;
        self
    }

    /// Basis lines grouped into orbits. `orbit_of[i] = (orbit, g, s)` with `e_i = s·g·e_rep`.
    pub fn orbits(&self) -> (Vec<OrbitSummand>, Vec<(usize, usize, i8)>) {
        let n = self.rank();
        let g = &self.group;
        let mut orbit_of = vec![(usize::MAX, 0, 0i8); n];
        let mut out = Vec::new();
        for b in 0..n {
            if orbit_of[b].0 != usize::MAX {
                continue;
            }
            let k = out.len();
            let mut size = 0;
            let mut stab = Vec::new();
            let mut chi = Vec::new();
            for x in g.elements() {
                let (j, s) = self.act(x, b);
                if orbit_of[j].0 == usize::MAX {
                    orbit_of[j] = (k, x, s);
                    size += 1;
                }
                if j == b {
                    stab.push(x);
                    chi.push(s);
                }
            }
            let stabilizer = g.subgroup_from(&stab).expect("stabilizer");
            out.push(OrbitSummand { rep: b, size, stabilizer, character: chi });
        }
        (out, orbit_of)
    }

    /// Orbit decomposition report.
    pub fn decomposition(&self) -> Vec<OrbitSummand> {
        self.orbits().0
    }
}

/// `R(G/H)` with basis the left cosets, indexed by minimal representatives.
pub fn perm_module(group: &Arc<Group>, h: &Subgroup, ring: Ring) -> Result<SignedPermModule> {
    group.subgroup_from(h.elements())?;
    let reps = group.coset_reps(h);
    let idx: Vec<usize> = group.elements().map(|g| group.coset_index(h, &reps, g)).collect();
    let mut act = Vec::with_capacity(group.order() * reps.len());
    for g in group.elements() {
        for &r in &reps {
            act.push((idx[group.mul(g, r)], 1));
        }
    }
    let labels = reps.iter().map(|&r| Label::Coset(r)).collect();
    SignedPermModule::new(group.clone(), ring, labels, act)
}

pub fn direct_sum(ms: &[&SignedPermModule]) -> Result<SignedPermModule> {
    let first = ms.first().ok_or_else(|| Error::Mismatch("empty direct sum".into()))?;
    for m in ms {
        first.same_context(m)?;
    }
    let g = first.group.clone();
    let total: usize = ms.iter().map(|m| m.rank()).sum();
    let mut labels = Vec::with_capacity(total);
    for (k, m) in ms.iter().enumerate() {
        labels.extend(m.labels.iter().map(|l| Label::Summand(k, Box::new(l.clone()))));
    }
    let mut act = Vec::with_capacity(total * g.order());
    for x in g.elements() {
        let mut off = 0;
        for m in ms {
            for i in 0..m.rank() {
                let (j, s) = m.act(x, i);
                act.push(((off + j) as u32, s));
            }
            off += m.rank();
        }
    }
    Ok(SignedPermModule { group: g, ring: first.ring, labels, act })
}

/// Basis `e_i ⊗ f_j` at index `i·rank(N) + j`, diagonal action, product signs.
pub fn tensor_module(m: &SignedPermModule, n: &SignedPermModule) -> Result<SignedPermModule> {
    m.same_context(n)?;
    let (a, b) = (m.rank(), n.rank());
    let g = m.group.clone();
    let mut labels = Vec::with_capacity(a * b);
    for i in 0..a {
        for j in 0..b {
            labels.push(Label::tensor(&m.labels[i], &n.labels[j]));
        }
    }
    let mut act = Vec::with_capacity(a * b * g.order());
    for x in g.elements() {
        for i in 0..a {
            let (i2, s) = m.act(x, i);
            for j in 0..b {
                let (j2, t) = n.act(x, j);
                act.push(((i2 * b + j2) as u32, s * t));
            }
        }
    }
    Ok(SignedPermModule { group: g, ring: m.ring, labels, act })
}

/// Pull back along a homomorphism `φ: G' → G`.
pub fn restrict_along(m: &SignedPermModule, new_group: &Arc<Group>, phi: &Homomorphism) -> Result<SignedPermModule> {
    phi.check(new_group, &m.group)?;
    let n = m.rank();
    let mut act = Vec::with_capacity(n * new_group.order());
    for x in new_group.elements() {
        let y = phi.apply(x);
        act.extend_from_slice(&m.act[y * n..(y + 1) * n]);
    }
    Ok(SignedPermModule { group: new_group.clone(), ring: m.ring, labels: m.labels.clone(), act })
}

/// Restriction to a subgroup (numbered as in [`Group::subgroup_group`]).
pub fn restrict(m: &SignedPermModule, h: &Subgroup) -> Result<(Arc<Group>, SignedPermModule)> {
    let (hg, inc) = m.group.subgroup_group(h);
    let r = restrict_along(m, &hg, &inc)?;
    Ok((hg, r))
}

/// Inflation along the projection `G → G/N`.
pub fn inflate(m: &SignedPermModule, g: &Arc<Group>, proj: &Homomorphism) -> Result<SignedPermModule> {
    restrict_along(m, g, proj)
}

/// `Ind_H^G M`, basis `r_k ⊗ e_i` at index `k·rank(M) + i`, `r_k` the minimal coset representatives.
pub fn induce(m: &SignedPermModule, g: &Arc<Group>, h: &Subgroup) -> Result<SignedPermModule> {
    g.subgroup_from(h.elements())?;
    if m.group.order() != h.order() {
        return Err(Error::Mismatch("module group is not the subgroup".into()));
    }
    let reps = g.coset_reps(h);
    let n = m.rank();
    let hpos = |x: usize| h.elements().binary_search(&x).expect("element of H");
    let mut labels = Vec::with_capacity(reps.len() * n);
    for &r in &reps {
        for l in &m.labels {
            labels.push(Label::Induced(r, Box::new(l.clone())));
        }
    }
    let mut act = Vec::with_capacity(reps.len() * n * g.order());
    for x in g.elements() {
        for &r in &reps {
            let xr = g.mul(x, r);
            let k = g.coset_index(h, &reps, xr);
            let hh = hpos(g.mul(g.inv(reps[k]), xr));
            for i in 0..n {
                let (j, s) = m.act(hh, i);
                act.push(((k * n + j) as u32, s));
            }
        }
    }
    Ok(SignedPermModule { group: g.clone(), ring: m.ring, labels, act })
}

/// Coordinates of `Hom_{RG}(M, N)`: values at source orbit representatives,
/// constrained to the stabilizer eigenspaces.
#[derive(Clone, Debug)]
pub struct HomSpace {
    pub src_rank: usize,
    pub tgt_rank: usize,
    /// Per source basis index: (orbit, g, s) with `e_i = s·g·e_rep`.
    orbit_of: Vec<(usize, usize, i8)>,
    /// Per source orbit: sparse basis vectors of the admissible values.
    vectors: Vec<Vec<Vec<(usize, i64)>>>,
    offsets: Vec<usize>,
    dim: usize,
    /// `g·v` for each (orbit, vector, g) is computed on demand from the target action.
    target: SignedPermModule,
}

impl HomSpace {
    pub fn new(m: &SignedPermModule, n: &SignedPermModule) -> Result<HomSpace> {
        m.same_context(n)?;
        let (orbs, orbit_of) = m.orbits();
        let ring = m.ring;
        let mut vectors = Vec::with_capacity(orbs.len());
        let mut offsets = Vec::with_capacity(orbs.len());
        let mut dim = 0;
        for o in &orbs {
            let s = &o.stabilizer;
            let chi = |x: usize| o.character[s.elements().binary_search(&x).unwrap()];
            let mut seen = vec![false; n.rank()];
            let mut vs = Vec::new();
            for t in 0..n.rank() {
                if seen[t] {
                    continue;
                }
                // S-orbit of the line through f_t
                let mut v: Vec<(usize, i64)> = Vec::new();
                let mut ok = true;
                for &x in s.elements() {
                    let (j, sg) = n.act(x, t);
                    let coeff = chi(x) as i64 * sg as i64;
                    if !seen[j] {
                        seen[j] = true;
                        v.push((j, coeff));
                    } else if j == t && coeff != 1 && !ring.erases_signs() {
                        ok = false;
                    } else if let Some(e) = v.iter().find(|e| e.0 == j) {
                        if e.1 != coeff && !ring.erases_signs() {
                            ok = false;
                        }
                    }
                }
                if ok {
                    v.sort_unstable();
                    vs.push(v);
                }
            }
            offsets.push(dim);
            dim += vs.len();
            vectors.push(vs);
        }
        Ok(HomSpace { src_rank: m.rank(), tgt_rank: n.rank(), orbit_of, vectors, offsets, dim, target: n.clone() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_orbits(&self) -> usize {
        self.vectors.len()
    }

    pub fn orbit_rep_unknowns(&self, orbit: usize) -> std::ops::Range<usize> {
        self.offsets[orbit]..self.offsets[orbit] + self.vectors[orbit].len()
    }

    /// Source basis indices that are orbit representatives.
    pub fn reps(&self) -> Vec<usize> {
        let mut r = vec![usize::MAX; self.vectors.len()];
        for (i, &(o, g, s)) in self.orbit_of.iter().enumerate() {
            if g == 0 && s == 1 && r[o] == usize::MAX {
                r[o] = i;
            }
        }
        r
    }

    /// `f_u(e_i)` as a sparse vector; empty unless `e_i` is in the orbit of `u`.
    pub fn image(&self, u: usize, i: usize) -> Vec<(usize, i64)> {
        let (o, g, s) = self.orbit_of[i];
        let r = self.orbit_rep_unknowns(o);
        if !r.contains(&u) {
            return Vec::new();
        }
        self.vectors[o][u - r.start]
            .iter()
            .map(|&(j, c)| {
                let (j2, t) = self.target.act(g, j);
                (j2, c * s as i64 * t as i64)
            })
            .collect()
    }

    /// Unknowns that can be nonzero on `e_i`, with `f_u(e_i)`.
    pub fn images_at(&self, i: usize) -> Vec<(usize, Vec<(usize, i64)>)> {
        let o = self.orbit_of[i].0;
        self.orbit_rep_unknowns(o).map(|u| (u, self.image(u, i))).collect()
    }

    pub fn basis_map(&self, u: usize) -> Mat {
        let mut m = Mat::zeros(self.tgt_rank, self.src_rank);
        for i in 0..self.src_rank {
            for (j, c) in self.image(u, i) {
                m.add_at(j, i, c);
            }
        }
        m.normalize(self.target.ring)
    }

    /// The map with the given coordinates (numerators over a common denominator).
    pub fn assemble(&self, coords: &[i64], den: i64) -> Mat {
        assert_eq!(coords.len(), self.dim);
        let mut m = Mat::zeros(self.tgt_rank, self.src_rank);
        for i in 0..self.src_rank {
            for (u, img) in self.images_at(i) {
                if coords[u] != 0 {
                    for (j, c) in img {
                        m.add_at(j, i, c * coords[u]);
                    }
                }
            }
        }
        m.with_den(den).normalize(self.target.ring)
    }
}

/// A spanning set (a basis over Z, Q and F_p) of equivariant maps `M → N`.
pub fn equivariant_hom_basis(m: &SignedPermModule, n: &SignedPermModule) -> Result<Vec<Mat>> {
    let hs = HomSpace::new(m, n)?;
    Ok((0..hs.dim()).map(|u| hs.basis_map(u)).collect())
}

/// Does `f: M → N` commute with the action of every element?
pub fn is_equivariant(m: &SignedPermModule, n: &SignedPermModule, f: &Mat) -> bool {
    if f.shape() != (n.rank(), m.rank()) {
        return false;
    }
    let ring = m.ring;
    m.group.elements().all(|g| n.matrix_of(g).mul(f, ring) == f.mul(&m.matrix_of(g), ring))
}

/// `iso: plus ⊕ (L ⊗ minus) → M`.
#[derive(Clone, Debug)]
pub struct SignDecomposition {
    pub plus: SignedPermModule,
    pub minus: SignedPermModule,
    /// Columns: plus basis, then minus basis; a signed permutation matrix.
    pub iso: Mat,
    pub inverse: Mat,
    /// Source basis index of each new basis vector.
    pub origin: Vec<usize>,
}

/// Split into untwisted orbits and orbits twisted by the sign of `h` (index 2).
/// With `h = None` only untwisted orbits are accepted (re-basing).
pub fn sign_decompose(m: &SignedPermModule, h: Option<&Subgroup>) -> Result<SignDecomposition> {
    let g = m.group.clone();
    let ring = m.ring;
    if let Some(h) = h {
        if h.order() * 2 != g.order() || !g.is_normal(h) {
            return Err(Error::NotSubgroup("sign decomposition needs an index-2 subgroup".into()));
        }
    }
    let sgn = |x: usize| -> i8 {
        match h {
            Some(h) if !h.contains(x) => -1,
            _ => 1,
        }
    };
    let (orbs, orbit_of) = m.orbits();
    // classify
    let mut kind = Vec::with_capacity(orbs.len());
    for o in &orbs {
        if o.is_untwisted() || ring.erases_signs() {
            kind.push(true);
        } else if h.is_some() && o.stabilizer.elements().iter().zip(&o.character).all(|(&x, &c)| c == sgn(x)) {
            kind.push(false);
        } else {
            return Err(Error::SignDecomposition(format!(
                "orbit of basis vector {} has stabilizer character {:?} on {:?}",
                o.rep,
                o.character,
                o.stabilizer.elements()
            )));
        }
    }
    // new basis vector for e_i: f_i = g·e_rep = s·e_i, times sgn(g) on twisted orbits
    let mut plus_idx = Vec::new();
    let mut minus_idx = Vec::new();
    for i in 0..m.rank() {
        if kind[orbit_of[i].0] {
            plus_idx.push(i);
        } else {
            minus_idx.push(i);
        }
    }
    let coef = |i: usize| -> i64 {
        let (o, x, s) = orbit_of[i];
        let t = if kind[o] { 1 } else { sgn(x) };
        (s * t) as i64
    };
    let build = |idx: &[usize], twisted: bool| -> Result<SignedPermModule> {
        let pos = |i: usize| idx.binary_search(&i).unwrap();
        let mut act = Vec::with_capacity(idx.len() * g.order());
        for x in g.elements() {
            for &i in idx {
                let (j, s) = m.act(x, i);
                // x·f_i = x·(c_i e_i) = c_i s e_j = c_i s c_j f_j
                let mut sign = coef(i) * s as i64 * coef(j);
                if twisted {
                    sign *= sgn(x) as i64;
                }
                act.push((pos(j), sign as i8));
            }
        }
        let labels = idx.iter().map(|&i| m.labels[i].clone()).collect();
        SignedPermModule::new(g.clone(), ring, labels, act)
    };
    let plus = build(&plus_idx, false)?;
    let minus = build(&minus_idx, true)?;
    if !plus.is_permutation() || !minus.is_permutation() {
        return Err(Error::SignDecomposition("re-based orbits are not permutation".into()));
    }
    let origin: Vec<usize> = plus_idx.iter().chain(&minus_idx).copied().collect();
    let n = m.rank();
    let mut iso = Mat::zeros(n, n);
    for (col, &i) in origin.iter().enumerate() {
        iso.set(i, col, coef(i));
    }
    let iso = iso.normalize(ring);
    let inverse = iso.transpose();
    Ok(SignDecomposition { plus, minus, iso, inverse, origin })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grp::{make_group, subgroups, GroupDescriptor};

    fn grp(s: &str) -> Arc<Group> {
        make_group(&GroupDescriptor::parse(s).unwrap()).unwrap()
    }

    fn sub(g: &Group, order: usize) -> Subgroup {
        subgroups(g).unwrap().subgroups.into_iter().find(|h| h.order() == order).unwrap()
    }

    // brute-force oracle: dimension of the solution space of g·f = f·g over Q
    fn brute_hom_rank(m: &SignedPermModule, n: &SignedPermModule) -> usize {
        let (a, b) = (m.rank(), n.rank());
        let mut rows: Vec<Vec<i64>> = Vec::new();
        for g in m.group().elements() {
            let gm = m.matrix_of(g);
            let gn = n.matrix_of(g);
            // (gn·F − F·gm)[r][c] as a linear form in F's entries F[j][i] at j·a + i
            for r in 0..b {
                for c in 0..a {
                    let mut row = vec![0; a * b];
                    for j in 0..b {
                        row[j * a + c] += gn.get(r, j);
                    }
                    for i in 0..a {
                        row[r * a + i] -= gm.get(i, c);
                    }
                    rows.push(row);
                }
            }
        }
        let k = crate::linalg::smith_normal_form(&Mat::from_rows(&rows), Ring::Rationals).rank;
        a * b - k
    }

    #[test]
    fn perm_modules() {
        let c4 = grp("C4");
        let c2 = sub(&c4, 2);
        let m = perm_module(&c4, &c2, Ring::Integers).unwrap();
        assert_eq!(m.rank(), 2);
        assert_eq!(m.act(1, 0).0, 1);
        assert_eq!(perm_module(&c4, &c4.whole(), Ring::Integers).unwrap().rank(), 1);
        assert_eq!(perm_module(&c4, &c4.trivial_subgroup(), Ring::Integers).unwrap().rank(), 4);
        assert!(m.is_permutation());
    }

    #[test]
    fn tensor_decompositions() {
        let c2 = grp("C2");
        let reg = perm_module(&c2, &c2.trivial_subgroup(), Ring::Integers).unwrap();
        let t = tensor_module(&reg, &reg).unwrap();
        let d = t.decomposition();
        assert_eq!(d.len(), 2);
        assert!(d.iter().all(|o| o.stabilizer.order() == 1));
        let c4 = grp("C4");
        let q = perm_module(&c4, &sub(&c4, 2), Ring::Integers).unwrap();
        let d = tensor_module(&q, &q).unwrap().decomposition();
        assert_eq!(d.len(), 2);
        assert!(d.iter().all(|o| o.stabilizer.order() == 2));
        let one = SignedPermModule::trivial(c4.clone(), Ring::Integers);
        assert_eq!(tensor_module(&one, &q).unwrap().act, q.act);
    }

    #[test]
    fn hom_ranks() {
        let c2 = grp("C2");
        let z = Ring::Integers;
        let one = SignedPermModule::trivial(c2.clone(), z);
        let reg = perm_module(&c2, &c2.trivial_subgroup(), z).unwrap();
        let l = SignedPermModule::sign(c2.clone(), &c2.trivial_subgroup(), z).unwrap();
        assert_eq!(HomSpace::new(&one, &one).unwrap().dim(), 1);
        assert_eq!(HomSpace::new(&reg, &one).unwrap().dim(), 1);
        assert_eq!(HomSpace::new(&one, &l).unwrap().dim(), 0);
        let l2 = l.with_ring(Ring::PrimeField(2));
        let one2 = one.with_ring(Ring::PrimeField(2));
        assert_eq!(HomSpace::new(&one2, &l2).unwrap().dim(), 1);
    }

    fn test_modules(g: &Arc<Group>) -> Vec<SignedPermModule> {
        let lat = subgroups(g).unwrap();
        let mut out: Vec<SignedPermModule> =
            lat.subgroups.iter().map(|h| perm_module(g, h, Ring::Rationals).unwrap()).collect();
        for h in &lat.subgroups {
            if h.order() * 2 == g.order() {
                out.push(SignedPermModule::sign(g.clone(), h, Ring::Rationals).unwrap());
            }
        }
        out
    }

    #[test]
    fn hom_space_matches_commutation_oracle() {
        for s in ["C2", "C4", "C2xC2", "C3", "D8"] {
            let g = grp(s);
            let ms = test_modules(&g);
            for a in &ms {
                for b in &ms {
                    let hs = HomSpace::new(a, b).unwrap();
                    assert_eq!(hs.dim(), brute_hom_rank(a, b), "{s}");
                    for u in 0..hs.dim() {
                        assert!(is_equivariant(a, b, &hs.basis_map(u)));
                    }
                }
            }
        }
    }

    #[test]
    fn frobenius_reciprocity_ranks() {
        let g = grp("C4");
        let h = sub(&g, 2);
        let (hg, _) = g.subgroup_group(&h);
        let hmods = test_modules(&hg);
        for m in &hmods {
            let ind = induce(m, &g, &h).unwrap();
            for n in test_modules(&g) {
                let (_, res) = restrict(&n, &h).unwrap();
                assert_eq!(HomSpace::new(&ind, &n).unwrap().dim(), HomSpace::new(m, &res).unwrap().dim());
            }
        }
    }

    #[test]
    fn restriction_and_induction() {
        let c4 = grp("C4");
        let c2 = sub(&c4, 2);
        let m = perm_module(&c4, &c2, Ring::Integers).unwrap();
        let (_, r) = restrict(&m, &c2).unwrap();
        assert!(r.decomposition().iter().all(|o| o.size == 1));
        let c2g = grp("C2");
        let one = SignedPermModule::trivial(Group::trivial(), Ring::Integers);
        let ind = induce(&one, &c2g, &c2g.trivial_subgroup()).unwrap();
        assert_eq!(ind.rank(), 2);
        assert_eq!(ind.decomposition().len(), 1);
    }

    #[test]
    fn sign_decomposition_cases() {
        let c2 = grp("C2");
        let z = Ring::Integers;
        let t = c2.trivial_subgroup();
        let l = SignedPermModule::sign(c2.clone(), &t, z).unwrap();
        let d = sign_decompose(&l, Some(&t)).unwrap();
        assert_eq!((d.plus.rank(), d.minus.rank()), (0, 1));
        let reg = perm_module(&c2, &t, z).unwrap();
        let d = sign_decompose(&reg, Some(&t)).unwrap();
        assert_eq!((d.plus.rank(), d.minus.rank()), (2, 0));
        // C4, generator swaps two vectors with one sign: g·e0 = e1, g·e1 = −e0
        let c4 = grp("C4");
        let h = sub(&c4, 2);
        let mut act = Vec::new();
        for x in c4.elements() {
            let v: [(usize, i8); 2] = match x {
                0 => [(0, 1), (1, 1)],
                1 => [(1, 1), (0, -1)],
                2 => [(0, -1), (1, -1)],
                _ => [(1, -1), (0, 1)],
            };
            act.extend(v);
        }
        let m = SignedPermModule::new(c4.clone(), z, vec![Label::Point, Label::Point], act).unwrap();
        // stabilizer C2 acts by −1: neither trivial nor the sign of C2 ≤ C4 (which is trivial on C2)
        assert!(sign_decompose(&m, Some(&h)).is_err());
        // L ⊗ R(C4/C2) ≅ R(C4/C2), since L is trivial on C2
        let l4 = SignedPermModule::sign(c4.clone(), &h, z).unwrap();
        let q = perm_module(&c4, &h, z).unwrap();
        let lq = tensor_module(&l4, &q).unwrap();
        let d = sign_decompose(&lq, Some(&h)).unwrap();
        assert_eq!((d.plus.rank(), d.minus.rank()), (2, 0));
        assert_eq!(d.iso.mul(&d.inverse, z), Mat::identity(2));
        assert!(is_equivariant(&d.plus, &lq, &d.iso));
        // L ⊗ R(C4/1) has the sign living on the regular orbit: free, so also untwisted
        let reg = perm_module(&c4, &c4.trivial_subgroup(), z).unwrap();
        let lr = tensor_module(&l4, &reg).unwrap();
        let d = sign_decompose(&lr, Some(&h)).unwrap();
        assert_eq!((d.plus.rank(), d.minus.rank()), (4, 0));
        assert!(is_equivariant(&d.plus, &lr, &d.iso));
        // L ⊕ R: one twisted and one untwisted orbit
        let one = SignedPermModule::trivial(c4.clone(), z);
        let mix = direct_sum(&[&l4, &one]).unwrap();
        let d = sign_decompose(&mix, Some(&h)).unwrap();
        assert_eq!((d.plus.rank(), d.minus.rank()), (1, 1));
        let target = direct_sum(&[&d.plus, &tensor_module(&l4, &d.minus).unwrap()]).unwrap();
        assert!(is_equivariant(&target, &mix, &d.iso));
    }
}
