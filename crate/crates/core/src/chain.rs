//! Bounded chain complexes of signed permutation modules, homologically graded.
//!
//! Conventions fixed here once:
//! * `X[s]_n = X_{n−s}` with differential `(−1)^s d`;
//! * `cone(f)_n = X_{n−1} ⊕ Y_n`, `d(x, y) = (−dx, f x + dy)`;
//! * `dual(X)_n = Hom(X_{−n}, R)`, differential `(−1)^n dᵀ_{1−n}`;
//! * `d(x⊗y) = dx⊗y + (−1)^{|x|} x⊗dy`.

use serde::{Deserialize, Serialize};
use std::borrow::Cow;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grp::{Group, Homomorphism, Subgroup};
use crate::linalg::Mat;
use crate::permod::{self, direct_sum, Label, SignedPermModule};
use crate::ring::Ring;

#[derive(Clone, Serialize, Deserialize)]
pub struct Complex {
    group: Arc<Group>,
    ring: Ring,
    lo: i32,
    terms: Vec<SignedPermModule>,
    /// `diffs[k]: terms[k] → terms[k−1]`; `diffs[0]` has zero rows.
    diffs: Vec<Mat>,
    #[serde(skip, default = "no_zero")]
    zero: Option<SignedPermModule>,
}

fn no_zero() -> Option<SignedPermModule> {
    None
}

// the cached zero module is not part of the value
impl PartialEq for Complex {
    fn eq(&self, other: &Complex) -> bool {
        self.group == other.group && self.ring == other.ring && self.lo == other.lo && self.terms == other.terms && self.diffs == other.diffs
    }
}
impl Eq for Complex {}

impl fmt::Debug for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ranks: Vec<String> = self.degrees().map(|n| format!("{n}:{}", self.rank(n))).collect();
        write!(f, "Complex[{} over {}; {}]", self.group.name(), self.ring, ranks.join(" "))
    }
}

/// Equivariance by comparing `f(g·e_i)` with `g·f(e_i)` column by column.
pub fn equivariant(src: &SignedPermModule, tgt: &SignedPermModule, f: &Mat) -> bool {
    if f.shape() != (tgt.rank(), src.rank()) {
        return false;
    }
    let ring = src.ring();
    let cols: Vec<Vec<(usize, i64)>> =
        (0..src.rank()).map(|i| (0..tgt.rank()).filter_map(|j| Some((j, f.get(j, i))).filter(|x| x.1 != 0)).collect()).collect();
    for g in src.group().elements() {
        for i in 0..src.rank() {
            let (i2, s) = src.act(g, i);
            let mut lhs: Vec<(usize, i64)> = cols[i2].iter().map(|&(j, c)| (j, ring.reduce(c * s as i64))).collect();
            let mut rhs: Vec<(usize, i64)> = cols[i]
                .iter()
                .map(|&(j, c)| {
                    let (j2, t) = tgt.act(g, j);
                    (j2, ring.reduce(c * t as i64))
                })
                .collect();
            lhs.sort_unstable();
            rhs.sort_unstable();
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}

impl Complex {
    /// Validates shapes, equivariance of every differential and `d∘d = 0`.
    pub fn new(group: Arc<Group>, ring: Ring, lo: i32, terms: Vec<SignedPermModule>, diffs: Vec<Mat>) -> Result<Complex> {
        let c = Complex::raw(group, ring, lo, terms, diffs)?;
        c.check()?;
        Ok(c.trimmed())
    }

    fn raw(group: Arc<Group>, ring: Ring, lo: i32, terms: Vec<SignedPermModule>, diffs: Vec<Mat>) -> Result<Complex> {
        if terms.len() != diffs.len() {
            return Err(Error::Mismatch("one differential per term".into()));
        }
        for t in &terms {
            if t.ring() != ring || !(Arc::ptr_eq(t.group(), &group) || **t.group() == *group) {
                return Err(Error::Mismatch("term over a different group or ring".into()));
            }
        }
        let diffs = diffs.into_iter().map(|d| d.normalize(ring)).collect();
        let zero = Some(SignedPermModule::zero(group.clone(), ring));
        Ok(Complex { group, ring, lo, terms, diffs, zero })
    }

    fn check(&self) -> Result<()> {
        for (k, d) in self.diffs.iter().enumerate() {
            let n = self.lo + k as i32;
            let prev = self.rank(n - 1);
            if d.shape() != (prev, self.terms[k].rank()) {
                return Err(Error::Mismatch(format!("differential shape in degree {n}")));
            }
            if !equivariant(&self.terms[k], self.term(n - 1), d) {
                return Err(Error::Mismatch(format!("differential in degree {n} is not equivariant")));
            }
            if k > 0 && !self.diffs[k - 1].mul(d, self.ring).is_zero() {
                return Err(Error::NotComplex(n));
            }
        }
        Ok(())
    }

    fn trimmed(mut self) -> Complex {
        while self.terms.last().is_some_and(|t| t.rank() == 0) {
            self.terms.pop();
            self.diffs.pop();
        }
        while self.terms.first().is_some_and(|t| t.rank() == 0) {
            self.terms.remove(0);
            self.diffs.remove(0);
            self.lo += 1;
            if let Some(d) = self.diffs.first_mut() {
                *d = Mat::zeros(0, d.cols());
            }
        }
        if self.terms.is_empty() {
            self.lo = 0;
        }
        self
    }

    /// Build from a degree-indexed map of terms and differentials (missing differentials are zero).
    pub fn from_map(
        group: Arc<Group>,
        ring: Ring,
        terms: BTreeMap<i32, SignedPermModule>,
        mut diffs: BTreeMap<i32, Mat>,
    ) -> Result<Complex> {
        let (Some(&lo), Some(&hi)) = (terms.keys().next(), terms.keys().next_back()) else {
            return Ok(Complex::zero(group, ring));
        };
        let zero = SignedPermModule::zero(group.clone(), ring);
        let mut ts = Vec::new();
        let mut ds = Vec::new();
        for n in lo..=hi {
            let t = terms.get(&n).cloned().unwrap_or_else(|| zero.clone());
            let prev = if n == lo { 0 } else { terms.get(&(n - 1)).map_or(0, |m| m.rank()) };
            let d = diffs.remove(&n).unwrap_or_else(|| Mat::zeros(prev, t.rank()));
            let d = if n == lo { Mat::zeros(0, t.rank()) } else { d };
            ts.push(t);
            ds.push(d);
        }
        Complex::new(group, ring, lo, ts, ds)
    }

    pub fn zero(group: Arc<Group>, ring: Ring) -> Complex {
        Complex::raw(group, ring, 0, vec![], vec![]).unwrap()
    }

    /// `M` in degree `n`.
    pub fn concentrated(m: SignedPermModule, n: i32) -> Complex {
        let g = m.group().clone();
        let ring = m.ring();
        let d = Mat::zeros(0, m.rank());
        Complex::raw(g, ring, n, vec![m], vec![d]).unwrap().trimmed()
    }

    /// The tensor unit `R` in degree 0.
    pub fn unit(group: Arc<Group>, ring: Ring) -> Complex {
        Complex::concentrated(SignedPermModule::trivial(group, ring), 0)
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }
    pub fn ring(&self) -> Ring {
        self.ring
    }
    pub fn lo(&self) -> i32 {
        self.lo
    }
    /// Top degree (`lo − 1` for the zero complex).
    pub fn hi(&self) -> i32 {
        self.lo + self.terms.len() as i32 - 1
    }
    pub fn degrees(&self) -> std::ops::RangeInclusive<i32> {
        self.lo..=self.hi()
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term(&self, n: i32) -> &SignedPermModule {
        let k = n - self.lo;
        if k >= 0 && (k as usize) < self.terms.len() {
            &self.terms[k as usize]
        } else {
            self.zero.as_ref().expect("zero module present")
        }
    }

    pub fn rank(&self, n: i32) -> usize {
        self.term(n).rank()
    }

    pub fn total_rank(&self) -> usize {
        self.terms.iter().map(|t| t.rank()).sum()
    }

    pub fn ranks(&self) -> Vec<(i32, usize)> {
        self.degrees().map(|n| (n, self.rank(n))).collect()
    }

    /// `d_n: X_n → X_{n−1}`.
    pub fn d(&self, n: i32) -> Cow<'_, Mat> {
        let k = n - self.lo;
        if k > 0 && (k as usize) < self.diffs.len() {
            Cow::Borrowed(&self.diffs[k as usize])
        } else {
            Cow::Owned(Mat::zeros(self.rank(n - 1), self.rank(n)))
        }
    }

    /// Same complex with the basis labels of `other` (ranks must agree).
    pub fn relabeled_like(mut self, other: &Complex) -> Complex {
        for (t, o) in self.terms.iter_mut().zip(&other.terms) {
            *t = t.clone().relabel(o.labels().to_vec());
        }
        self
    }

    pub fn is_permutation(&self) -> bool {
        self.terms.iter().all(|t| t.is_permutation())
    }

    /// Restore the zero module after deserialization and re-validate.
    pub fn revalidate(mut self) -> Result<Complex> {
        self.group = Arc::new(self.group.revalidate()?);
        if self.terms.len() != self.diffs.len() {
            return Err(Error::Mismatch("one differential per term".into()));
        }
        self.zero = Some(SignedPermModule::zero(self.group.clone(), self.ring));
        for t in &mut self.terms {
            *t = SignedPermModule::new(self.group.clone(), self.ring, t.labels().to_vec(), action_table(t))?;
        }
        self.check()?;
        Ok(self)
    }

    pub fn shift(&self, s: i32) -> Complex {
        let sign = if s.rem_euclid(2) == 1 { -1 } else { 1 };
        let mut c = self.clone();
        c.lo += s;
        c.diffs = self.diffs.iter().map(|d| d.scale(sign, self.ring)).collect();
        c
    }

    pub fn base_change(&self, ring: Ring) -> Result<Complex> {
        match (self.ring, ring) {
            (a, b) if a == b => Ok(self.clone()),
            (Ring::Integers, _) => {
                let terms = self.terms.iter().map(|t| t.with_ring(ring)).collect();
                let diffs = self.diffs.iter().map(|d| d.base_change(ring)).collect();
                Complex::new(self.group.clone(), ring, self.lo, terms, diffs)
            }
            (a, b) => Err(Error::Ring(format!("base change {a} → {b}"))),
        }
    }

    pub fn dual(&self) -> Complex {
        let mut terms = Vec::new();
        let mut diffs = Vec::new();
        let lo = -self.hi();
        for n in lo..=-self.lo {
            let t = self.term(-n);
            let labels = t.labels().iter().map(|l| Label::Named(format!("{l}^")) ).collect();
            terms.push(t.clone().relabel(labels));
            let d = if n == lo {
                Mat::zeros(0, t.rank())
            } else {
                let dt = self.d(1 - n).transpose();
                if n.rem_euclid(2) == 1 {
                    dt.neg(self.ring)
                } else {
                    dt
                }
            };
            diffs.push(d);
        }
        if self.is_zero() {
            return self.clone();
        }
        Complex::raw(self.group.clone(), self.ring, lo, terms, diffs).unwrap()
    }

    /// Sum of complexes; in each degree the summands are stacked in order.
    pub fn direct_sum(parts: &[&Complex]) -> Result<Complex> {
        let first = parts.first().ok_or_else(|| Error::Mismatch("empty sum".into()))?;
        let lo = parts.iter().filter(|c| !c.is_zero()).map(|c| c.lo).min();
        let Some(lo) = lo else { return Ok((*first).clone()) };
        let hi = parts.iter().map(|c| c.hi()).max().unwrap();
        let mut terms = Vec::new();
        let mut diffs = Vec::new();
        for n in lo..=hi {
            let ts: Vec<&SignedPermModule> = parts.iter().map(|c| c.term(n)).collect();
            terms.push(direct_sum(&ts)?);
            let ds: Vec<Mat> = parts.iter().map(|c| c.d(n).into_owned()).collect();
            let refs: Vec<&Mat> = ds.iter().collect();
            let d = Mat::block_diag(&refs);
            diffs.push(if n == lo { Mat::zeros(0, d.cols()) } else { d });
        }
        Complex::new(first.group.clone(), first.ring, lo, terms, diffs)
    }

    /// Apply a module functor term-wise; differentials are transported unchanged.
    fn map_terms(&self, group: Arc<Group>, f: impl Fn(&SignedPermModule) -> Result<SignedPermModule>) -> Result<Complex> {
        let terms = self.terms.iter().map(f).collect::<Result<Vec<_>>>()?;
        Complex::new(group, self.ring, self.lo, terms, self.diffs.clone())
    }

    pub fn restrict_along(&self, group: &Arc<Group>, phi: &Homomorphism) -> Result<Complex> {
        if self.is_zero() {
            return Ok(Complex::zero(group.clone(), self.ring));
        }
        self.map_terms(group.clone(), |m| permod::restrict_along(m, group, phi))
    }
}

fn action_table(m: &SignedPermModule) -> Vec<(usize, i8)> {
    let mut v = Vec::with_capacity(m.rank() * m.group().order());
    for g in m.group().elements() {
        for i in 0..m.rank() {
            v.push(m.act(g, i));
        }
    }
    v
}

pub fn restrict_complex(x: &Complex, h: &Subgroup) -> Result<(Arc<Group>, Complex)> {
    let (hg, inc) = x.group.subgroup_group(h);
    let r = x.restrict_along(&hg, &inc)?;
    Ok((hg, r))
}

pub fn inflate_complex(x: &Complex, g: &Arc<Group>, proj: &Homomorphism) -> Result<Complex> {
    x.restrict_along(g, proj)
}

pub fn induce_complex(x: &Complex, g: &Arc<Group>, h: &Subgroup) -> Result<Complex> {
    if x.is_zero() {
        return Ok(Complex::zero(g.clone(), x.ring));
    }
    let k = g.order() / h.order();
    let terms = x.terms.iter().map(|m| permod::induce(m, g, h)).collect::<Result<Vec<_>>>()?;
    let diffs = x.diffs.iter().map(|d| Mat::kron(&Mat::identity(k), d, x.ring)).collect();
    Complex::new(g.clone(), x.ring, x.lo, terms, diffs)
}

/// Where the block `X_i ⊗ Y_j` sits inside `(X⊗Y)_{i+j}`.
#[derive(Clone, Debug, Default)]
pub struct TensorLayout {
    pub offsets: BTreeMap<(i32, i32), usize>,
}

impl TensorLayout {
    pub fn offset(&self, i: i32, j: i32) -> Option<usize> {
        self.offsets.get(&(i, j)).copied()
    }
}

pub fn tensor_complex(x: &Complex, y: &Complex) -> Result<Complex> {
    Ok(tensor_with_layout(x, y)?.0)
}

/// Tensor product with the Koszul sign rule; blocks ordered by increasing `i`.
pub fn tensor_with_layout(x: &Complex, y: &Complex) -> Result<(Complex, TensorLayout)> {
    if x.ring != y.ring || *x.group != *y.group {
        return Err(Error::Mismatch("tensor of complexes over different contexts".into()));
    }
    let ring = x.ring;
    let mut layout = TensorLayout::default();
    if x.is_zero() || y.is_zero() {
        return Ok((Complex::zero(x.group.clone(), ring), layout));
    }
    let (lo, hi) = (x.lo + y.lo, x.hi() + y.hi());
    let mut terms = BTreeMap::new();
    let mut sizes = BTreeMap::new();
    for n in lo..=hi {
        let mut parts = Vec::new();
        let mut off = 0;
        for i in x.degrees() {
            let j = n - i;
            if j < y.lo || j > y.hi() {
                continue;
            }
            layout.offsets.insert((i, j), off);
            let t = permod::tensor_module(x.term(i), y.term(j))?;
            off += t.rank();
            parts.push(t);
        }
        let refs: Vec<&SignedPermModule> = parts.iter().collect();
        terms.insert(n, direct_sum(&refs)?);
        sizes.insert(n, off);
    }
    let mut diffs = BTreeMap::new();
    for n in lo + 1..=hi {
        let mut d = Mat::zeros(sizes[&(n - 1)], sizes[&n]);
        for i in x.degrees() {
            let j = n - i;
            let Some(col) = layout.offset(i, j) else { continue };
            if let Some(row) = layout.offset(i - 1, j) {
                let b = Mat::kron(&x.d(i), &Mat::identity(y.rank(j)), ring);
                d.set_block(row, col, &b);
            }
            if let Some(row) = layout.offset(i, j - 1) {
                let mut b = Mat::kron(&Mat::identity(x.rank(i)), &y.d(j), ring);
                if i.rem_euclid(2) == 1 {
                    b = b.neg(ring);
                }
                d.set_block(row, col, &b);
            }
        }
        diffs.insert(n, d);
    }
    let c = Complex::from_map(x.group.clone(), ring, terms, diffs)?;
    Ok((c, layout))
}

/// A degree-0 chain map with commutation verified on construction.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainMap {
    pub source: Arc<Complex>,
    pub target: Arc<Complex>,
    comps: BTreeMap<i32, Mat>,
}

impl ChainMap {
    pub fn new(source: Arc<Complex>, target: Arc<Complex>, comps: BTreeMap<i32, Mat>) -> Result<ChainMap> {
        let f = ChainMap::unchecked(source, target, comps);
        f.check()?;
        Ok(f)
    }

    pub(crate) fn unchecked(source: Arc<Complex>, target: Arc<Complex>, comps: BTreeMap<i32, Mat>) -> ChainMap {
        let ring = source.ring;
        let comps = comps.into_iter().filter(|(_, m)| m.rows() * m.cols() > 0).map(|(n, m)| (n, m.normalize(ring))).collect();
        ChainMap { source, target, comps }
    }

    pub fn check(&self) -> Result<()> {
        let (x, y) = (&self.source, &self.target);
        if x.ring != y.ring || *x.group != *y.group {
            return Err(Error::Mismatch("chain map between different contexts".into()));
        }
        for (&n, m) in &self.comps {
            if m.shape() != (y.rank(n), x.rank(n)) {
                return Err(Error::NotChainMap(format!("component shape in degree {n}")));
            }
            if !equivariant(x.term(n), y.term(n), m) {
                return Err(Error::NotChainMap(format!("component in degree {n} is not equivariant")));
            }
        }
        let lo = x.lo.min(y.lo);
        let hi = x.hi().max(y.hi()) + 1;
        for n in lo..=hi {
            let lhs = y.d(n).mul(&self.comp(n), x.ring);
            let rhs = self.comp(n - 1).mul(&x.d(n), x.ring);
            if lhs != rhs {
                return Err(Error::NotChainMap(format!("d f ≠ f d in degree {n}")));
            }
        }
        Ok(())
    }

    pub fn comp(&self, n: i32) -> Cow<'_, Mat> {
        match self.comps.get(&n) {
            Some(m) => Cow::Borrowed(m),
            None => Cow::Owned(Mat::zeros(self.target.rank(n), self.source.rank(n))),
        }
    }

    pub fn components(&self) -> &BTreeMap<i32, Mat> {
        &self.comps
    }

    pub fn identity(x: &Arc<Complex>) -> ChainMap {
        let comps = x.degrees().map(|n| (n, Mat::identity(x.rank(n)))).collect();
        ChainMap::unchecked(x.clone(), x.clone(), comps)
    }

    pub fn zero(x: &Arc<Complex>, y: &Arc<Complex>) -> ChainMap {
        ChainMap::unchecked(x.clone(), y.clone(), BTreeMap::new())
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &ChainMap) -> ChainMap {
        let ring = self.source.ring;
        let comps = self
            .source
            .degrees()
            .map(|n| (n, other.comp(n).mul(&self.comp(n), ring)))
            .collect();
        ChainMap::unchecked(self.source.clone(), other.target.clone(), comps)
    }

    pub fn sub(&self, other: &ChainMap) -> ChainMap {
        let ring = self.source.ring;
        let lo = self.source.lo;
        let comps = (lo..=self.source.hi()).map(|n| (n, self.comp(n).sub(&other.comp(n), ring))).collect();
        ChainMap::unchecked(self.source.clone(), self.target.clone(), comps)
    }

    pub fn scale(&self, c: i64) -> ChainMap {
        let ring = self.source.ring;
        let comps = self.comps.iter().map(|(&n, m)| (n, m.scale(c, ring))).collect();
        ChainMap::unchecked(self.source.clone(), self.target.clone(), comps)
    }

    pub fn is_zero(&self) -> bool {
        self.comps.values().all(|m| m.is_zero())
    }
}

/// `cone(f)_n = X_{n−1} ⊕ Y_n` with `d = [[−d_X, 0], [f, d_Y]]`.
pub fn cone(f: &ChainMap) -> Result<Complex> {
    f.check()?;
    let (x, y) = (&*f.source, &*f.target);
    let ring = x.ring;
    if x.is_zero() {
        return Ok(y.clone());
    }
    let lo = (x.lo + 1).min(if y.is_zero() { i32::MAX } else { y.lo });
    let hi = (x.hi() + 1).max(y.hi());
    let mut terms = BTreeMap::new();
    let mut diffs = BTreeMap::new();
    for n in lo..=hi {
        terms.insert(n, direct_sum(&[x.term(n - 1), y.term(n)])?);
        if n > lo {
            let (a, b) = (x.rank(n - 1), y.rank(n));
            let (a2, b2) = (x.rank(n - 2), y.rank(n - 1));
            let mut d = Mat::zeros(a2 + b2, a + b);
            d.set_block(0, 0, &x.d(n - 1).neg(ring));
            d.set_block(a2, 0, &f.comp(n - 1));
            d.set_block(a2, a, &y.d(n));
            diffs.insert(n, d);
        }
    }
    Complex::from_map(x.group.clone(), ring, terms, diffs)
}

/// `f ⊗ g` between tensor complexes (no signs: both maps have degree 0).
pub fn tensor_maps(f: &ChainMap, g: &ChainMap) -> Result<ChainMap> {
    let (src, ls) = tensor_with_layout(&f.source, &g.source)?;
    let (tgt, lt) = tensor_with_layout(&f.target, &g.target)?;
    let ring = src.ring;
    let mut comps = BTreeMap::new();
    for n in src.degrees() {
        let mut m = Mat::zeros(tgt.rank(n), src.rank(n));
        for (&(i, j), &col) in ls.offsets.iter().filter(|((i, j), _)| i + j == n) {
            if let Some(row) = lt.offset(i, j) {
                m.set_block(row, col, &Mat::kron(&f.comp(i), &g.comp(j), ring));
            }
        }
        comps.insert(n, m);
    }
    ChainMap::new(Arc::new(src), Arc::new(tgt), comps)
}

/// Base change of a chain map together with its complexes.
pub fn base_change_map(f: &ChainMap, ring: Ring) -> Result<ChainMap> {
    let s = Arc::new(f.source.base_change(ring)?);
    let t = Arc::new(f.target.base_change(ring)?);
    let comps = f.comps.iter().map(|(&n, m)| (n, m.base_change(ring))).collect();
    ChainMap::new(s, t, comps)
}
