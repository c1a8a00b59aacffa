//! Tensor induction of complexes, sign modification for index-2 steps, and
//! Koszul objects with their verifier.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{cone, restrict_complex, tensor_maps, ChainMap, Complex};
use crate::error::{Error, Result};
use crate::grp::{subgroups, Group, Homomorphism, Subgroup};
use crate::homotopy::{homology, is_contractible, Contractibility, HomotopyCertificate};
use crate::linalg::Mat;
use crate::permod::{perm_module, sign_decompose, tensor_module, Label, SignedPermModule};
use crate::ring::Ring;

/// Largest index accepted by [`tensor_induce`].
pub const INDEX_BOUND: usize = 4;

/// `0 → R --1--> R → 0` in degrees 1, 0.
pub fn unit_cone(group: &Arc<Group>, ring: Ring) -> Complex {
    let r = SignedPermModule::trivial(group.clone(), ring);
    Complex::new(group.clone(), ring, 0, vec![r.clone(), r], vec![Mat::zeros(0, 1), Mat::identity(1)])
        .expect("unit cone")
}

fn identity_hom(g: &Group) -> Homomorphism {
    Homomorphism { source_order: g.order(), target_order: g.order(), map: g.elements().collect() }
}

/// Re-home a complex onto an equal group object.
fn rehome(x: &Complex, g: &Arc<Group>) -> Result<Complex> {
    if Arc::ptr_eq(x.group(), g) {
        return Ok(x.clone());
    }
    x.restrict_along(g, &identity_hom(g))
}

// ---------------------------------------------------------------------------
// tensor induction

/// `⊗Ind_H^G(x)` for `H ⊴ G` of index ≤ [`INDEX_BOUND`]; `x` lives over the
/// group [`Group::subgroup_group`] of `h`. Terms come out as signed
/// permutation modules (the permutation part of `G → S_n ⋉ H^n` acts with
/// Koszul signs).
pub fn tensor_induce(x: &Complex, g: &Arc<Group>, h: &Subgroup) -> Result<Complex> {
    g.subgroup_from(h.elements())?;
    let n = g.order() / h.order();
    if n > INDEX_BOUND {
        return Err(Error::IndexBound { index: n, bound: INDEX_BOUND });
    }
    if !g.is_normal(h) {
        return Err(Error::NotSubgroup("tensor induction needs a normal subgroup".into()));
    }
    let (hg, _) = g.subgroup_group(h);
    if **x.group() != *hg {
        return Err(Error::Mismatch("complex does not live over the subgroup".into()));
    }
    let ring = x.ring();
    if x.is_zero() {
        return Ok(Complex::zero(g.clone(), ring));
    }
    if n == 1 {
        return rehome(x, g);
    }
    let reps = g.coset_reps(h);
    let hpos = |y: usize| h.elements().binary_search(&y).expect("element of H");
    // i(γ) = (σ, h_1..h_n) with γ·r_j = r_{σ(j)}·h_j
    let wreath: Vec<(Vec<usize>, Vec<usize>)> = g
        .elements()
        .map(|y| {
            let mut sigma = vec![0; n];
            let mut hs = vec![0; n];
            for (j, &r) in reps.iter().enumerate() {
                let yr = g.mul(y, r);
                let k = g.coset_index(h, &reps, yr);
                sigma[j] = k;
                hs[j] = hpos(g.mul(g.inv(reps[k]), yr));
            }
            (sigma, hs)
        })
        .collect();

    let degs: Vec<i32> = x.degrees().filter(|&d| x.rank(d) > 0).collect();
    let lo = x.lo();
    // degree tuples per total degree, in lexicographic order
    let mut tuples: BTreeMap<i32, Vec<Vec<i32>>> = BTreeMap::new();
    for code in 0..degs.len().pow(n as u32) {
        let mut c = code;
        let mut t = vec![0; n];
        for k in (0..n).rev() {
            t[k] = degs[c % degs.len()];
            c /= degs.len();
        }
        tuples.entry(t.iter().sum()).or_default().push(t);
    }
    let size = |t: &[i32]| t.iter().map(|&d| x.rank(d)).product::<usize>();
    let mut offsets: BTreeMap<Vec<i32>, usize> = BTreeMap::new();
    let mut totals: BTreeMap<i32, usize> = BTreeMap::new();
    for (&d, ts) in &tuples {
        let mut off = 0;
        for t in ts {
            offsets.insert(t.clone(), off);
            off += size(t);
        }
        totals.insert(d, off);
    }
    let encode = |t: &[i32], idx: &[usize]| -> usize {
        let mut v = 0;
        for (k, &d) in t.iter().enumerate() {
            v = v * x.rank(d) + idx[k];
        }
        offsets[t] + v
    };
    let decode = |t: &[i32], mut v: usize| -> Vec<usize> {
        let mut idx = vec![0; n];
        for k in (0..n).rev() {
            let r = x.rank(t[k]);
            idx[k] = v % r;
            v /= r;
        }
        idx
    };

    let mut terms = BTreeMap::new();
    for (&d, ts) in &tuples {
        let rank = totals[&d];
        let mut labels = Vec::with_capacity(rank);
        for t in ts {
            for v in 0..size(t) {
                let idx = decode(t, v);
                labels.push(Label::Tensor(
                    (0..n).map(|k| Label::Summand(k, Box::new(x.term(t[k]).labels()[idx[k]].clone()))).collect(),
                ));
            }
        }
        let mut act = Vec::with_capacity(rank * g.order());
        for (sigma, hs) in &wreath {
            for t in ts {
                let mut t2 = vec![0; n];
                for j in 0..n {
                    t2[sigma[j]] = t[j];
                }
                // Koszul sign of moving odd letters past each other
                let mut sign: i8 = 1;
                for a in 0..n {
                    for b in a + 1..n {
                        if t[a].rem_euclid(2) == 1 && t[b].rem_euclid(2) == 1 && sigma[a] > sigma[b] {
                            sign = -sign;
                        }
                    }
                }
                for v in 0..size(t) {
                    let idx = decode(t, v);
                    let mut idx2 = vec![0; n];
                    let mut s = sign;
                    for j in 0..n {
                        let (i2, sj) = x.term(t[j]).act(hs[j], idx[j]);
                        idx2[sigma[j]] = i2;
                        s *= sj;
                    }
                    act.push((encode(&t2, &idx2), s));
                }
            }
        }
        terms.insert(d, SignedPermModule::new(g.clone(), ring, labels, act)?);
    }

    let mut diffs = BTreeMap::new();
    for (&d, ts) in &tuples {
        let Some(&below) = totals.get(&(d - 1)) else { continue };
        let mut m = Mat::zeros(below, totals[&d]);
        for t in ts {
            for v in 0..size(t) {
                let idx = decode(t, v);
                let col = offsets[t] + v;
                let mut prefix: i32 = 0;
                for k in 0..n {
                    let dk = t[k];
                    if dk > lo && x.rank(dk - 1) > 0 {
                        let dm = x.d(dk);
                        let mut t2 = t.clone();
                        t2[k] = dk - 1;
                        let sgn = if prefix.rem_euclid(2) == 1 { -1 } else { 1 };
                        for r in 0..dm.rows() {
                            let c = dm.get(r, idx[k]);
                            if c != 0 {
                                let mut idx2 = idx.clone();
                                idx2[k] = r;
                                m.add_at(encode(&t2, &idx2), col, sgn * c);
                            }
                        }
                    }
                    prefix += dk;
                }
            }
        }
        diffs.insert(d, m);
    }
    Complex::from_map(g.clone(), ring, terms, diffs)
}

// ---------------------------------------------------------------------------
// sign modification

/// One descending-induction step of [`sign_modify`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignStep {
    pub degree: i32,
    pub plus_rank: usize,
    pub minus_rank: usize,
}

/// Re-base every term onto a basis permuted without signs.
pub fn rebase(x: &Complex) -> Result<Complex> {
    if x.is_zero() {
        return Ok(x.clone());
    }
    let ring = x.ring();
    let decs = x.degrees().map(|n| sign_decompose(x.term(n), None)).collect::<Result<Vec<_>>>()?;
    let lo = x.lo();
    let mut terms = Vec::new();
    let mut diffs = Vec::new();
    for (k, n) in x.degrees().enumerate() {
        terms.push(decs[k].plus.clone());
        let d = if k == 0 {
            Mat::zeros(0, x.rank(n))
        } else {
            decs[k - 1].inverse.mul(&x.d(n), ring).mul(&decs[k].iso, ring)
        };
        diffs.push(d);
    }
    Complex::new(x.group().clone(), ring, lo, terms, diffs)
}

/// `L̃ = (R → R(G/H))` in degrees 1, 0 and `s_H: L̃ → L`.
pub fn sign_resolution(g: &Arc<Group>, h: &Subgroup, ring: Ring) -> Result<ChainMap> {
    let l = SignedPermModule::sign(g.clone(), h, ring)?;
    let one = SignedPermModule::trivial(g.clone(), ring);
    let rgh = perm_module(g, h, ring)?;
    let lt = Complex::new(
        g.clone(),
        ring,
        0,
        vec![rgh, one],
        vec![Mat::zeros(0, 2), Mat::from_rows(&[vec![1], vec![1]])],
    )?;
    let lc = Complex::concentrated(l, 0);
    // the coset H (representative 0) comes first
    let s = Mat::from_rows(&[vec![1, -1]]);
    ChainMap::new(Arc::new(lt), Arc::new(lc), BTreeMap::from([(0, s)]))
}

/// Make every term a permutation module, keeping the complex unchanged up to
/// homotopy after restriction to any subgroup of `h` (index 2 in the group of
/// `x`). Degrees whose term is already untwisted are skipped.
pub fn sign_modify(x: &Complex, h: &Subgroup) -> Result<(Complex, Vec<SignStep>)> {
    let g = x.group().clone();
    let ring = x.ring();
    if x.is_zero() {
        return Ok((x.clone(), Vec::new()));
    }
    if x.lo() < 0 {
        return Err(Error::Validation("sign modification needs a non-negative complex".into()));
    }
    let s = sign_resolution(&g, h, ring)?;
    let l = SignedPermModule::sign(g.clone(), h, ring)?;
    let mut cur = x.clone();
    let mut steps = Vec::new();
    let mut m = cur.hi();
    while m >= 0 {
        let dec = sign_decompose(cur.term(m), Some(h))?;
        if dec.minus.rank() == 0 {
            m -= 1;
            continue;
        }
        steps.push(SignStep { degree: m, plus_rank: dec.plus.rank(), minus_rank: dec.minus.rank() });
        let lm = tensor_module(&l, &dec.minus)?;
        let np = dec.plus.rank();
        let dm_hat = cur.d(m).mul(&dec.iso, ring);
        let dm1_hat = dec.inverse.mul(&cur.d(m + 1), ring);
        let (hi, lo) = (cur.hi(), cur.lo());
        // x' = (… → x_{m+1} → P) in degrees ≥ m
        let mut t1 = BTreeMap::new();
        let mut d1 = BTreeMap::new();
        t1.insert(m, dec.plus.clone());
        for j in m + 1..=hi {
            t1.insert(j, cur.term(j).clone());
            let dj = if j == m + 1 { dm1_hat.block(0, np, 0, cur.rank(j)) } else { cur.d(j).into_owned() };
            d1.insert(j, dj);
        }
        let xp = Complex::from_map(g.clone(), ring, t1, d1)?;
        // x'' = (L⊗M → x_{m−1} → …) with L⊗M in degree m+1, differentials negated
        let mut t2 = BTreeMap::new();
        let mut d2 = BTreeMap::new();
        t2.insert(m + 1, lm.clone());
        for j in lo + 1..=m {
            t2.insert(j, cur.term(j - 1).clone());
        }
        if m >= 1 {
            d2.insert(m + 1, dm_hat.block(0, cur.rank(m - 1), np, cur.rank(m)).neg(ring));
        }
        for j in lo + 2..=m {
            d2.insert(j, cur.d(j - 1).neg(ring));
        }
        let xpp = Complex::from_map(g.clone(), ring, t2, d2)?;
        let mut tc = BTreeMap::new();
        if cur.rank(m + 1) > 0 {
            tc.insert(m + 1, dm1_hat.block(np, cur.rank(m), 0, cur.rank(m + 1)).neg(ring));
        }
        if m >= 1 && np > 0 {
            tc.insert(m, dm_hat.block(0, cur.rank(m - 1), 0, np).neg(ring));
        }
        let t = ChainMap::new(Arc::new(xp), Arc::new(xpp), tc)?;
        let st = tensor_maps(&s, &t)?;
        cur = cone(&st)?.shift(-1);
        m -= 1;
    }
    let out = rebase(&cur)?;
    Ok((out, steps))
}

// ---------------------------------------------------------------------------
// Koszul objects

/// Lexicographically minimal chain `H = H_0 ⊴ H_1 ⊴ … ⊴ H_l = G`, each step of index p.
pub fn normal_filtration(g: &Group, h: &Subgroup) -> Result<Vec<Subgroup>> {
    let p = g.prime().ok_or(Error::NotPGroup { p: 0 })? as usize;
    g.subgroup_from(h.elements())?;
    let lat = subgroups(g)?;
    let mut chain = vec![h.clone()];
    while chain.last().unwrap().order() < g.order() {
        let cur = chain.last().unwrap();
        let next = lat
            .subgroups
            .iter()
            .filter(|k| k.order() == cur.order() * p && cur.is_subset(k))
            .min_by(|a, b| a.elements().cmp(b.elements()))
            .ok_or_else(|| Error::TheoryCheck("no index-p overgroup in a p-group".into()))?;
        chain.push(next.clone());
    }
    Ok(chain)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TowerStep {
    /// Orders of `H_{i−1}` and `H_i`.
    pub from_order: usize,
    pub to_order: usize,
    /// Term ranks right after tensor induction.
    pub induced_ranks: Vec<(i32, usize)>,
    pub sign_steps: Vec<SignStep>,
}

impl TowerStep {
    /// Was sign modification a no-op at this step?
    pub fn unmodified(&self) -> bool {
        self.sign_steps.is_empty()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KoszulAudit {
    pub filtration: Vec<Vec<usize>>,
    pub steps: Vec<TowerStep>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KoszulObject {
    pub complex: Arc<Complex>,
    pub group: Arc<Group>,
    pub subgroup: Subgroup,
    pub ring: Ring,
    pub audit: KoszulAudit,
    /// `Res_H` of the complex together with its contraction.
    pub restriction_certificate: HomotopyCertificate,
}

/// Build the Koszul object for `H ≤ G` (`G` a p-group) and verify it.
pub fn koszul_object(g: &Arc<Group>, h: &Subgroup, ring: Ring) -> Result<KoszulObject> {
    let p = g.prime().ok_or(Error::NotPGroup { p: 0 })?;
    let chain = normal_filtration(g, h)?;
    let (h0, _) = g.subgroup_group(&chain[0]);
    let mut y = unit_cone(&h0, ring);
    let mut steps = Vec::new();
    for w in chain.windows(2) {
        let (gi, inc) = g.subgroup_group(&w[1]);
        let prev = w[0].preimage(&inc);
        let ind = tensor_induce(&y, &gi, &prev)?;
        let induced_ranks = ind.ranks();
        let (next, sign_steps) = if p == 2 { sign_modify(&ind, &prev)? } else { (rebase(&ind)?, Vec::new()) };
        steps.push(TowerStep { from_order: w[0].order(), to_order: w[1].order(), induced_ranks, sign_steps });
        y = next;
    }
    let complex = Arc::new(rehome(&rebase(&y)?, g)?);
    let audit = KoszulAudit { filtration: chain.iter().map(|k| k.elements().to_vec()).collect(), steps };
    let restriction_certificate = verify_postconditions(&complex, h)?.certificate;
    Ok(KoszulObject { complex, group: g.clone(), subgroup: h.clone(), ring, audit, restriction_certificate })
}

/// Outcome of [`verify_postconditions`].
#[derive(Clone, Debug)]
pub struct KoszulCheck {
    pub certificate: HomotopyCertificate,
}

/// Is every orbit stabilizer of `m` subconjugate to `h`?
pub fn induced_from(m: &SignedPermModule, h: &Subgroup) -> bool {
    let g = m.group();
    m.decomposition().iter().all(|o| g.subconjugate(&o.stabilizer, h))
}

/// Permutation terms, `R` in degree 0, degree 1 induced from `h`, acyclic,
/// and contractible after restriction to `h`.
pub fn verify_postconditions(x: &Arc<Complex>, h: &Subgroup) -> Result<KoszulCheck> {
    let fail = |s: String| Err(Error::TheoryCheck(s));
    if !x.is_permutation() {
        return fail("a term is not a permutation module".into());
    }
    if x.lo() != 0 || x.rank(0) != 1 || x.term(0).decomposition()[0].stabilizer.order() != x.group().order() {
        return fail("degree-0 term is not R".into());
    }
    if !induced_from(x.term(1), h) {
        return fail("degree-1 term is not induced from the subgroup".into());
    }
    let bad: Vec<i32> = x.degrees().collect::<Vec<_>>().into_par_iter().filter(|&n| !homology(x, n).presentation.is_zero()).collect();
    if let Some(n) = bad.first() {
        return fail(format!("homology in degree {n}"));
    }
    let (_, r) = restrict_complex(x, h)?;
    match is_contractible(&Arc::new(r))? {
        Contractibility::Contractible(certificate) => Ok(KoszulCheck { certificate }),
        Contractibility::NotContractible(w) => fail(format!("restriction is not contractible: {w}")),
    }
}

/// Re-verification after base change of an integral Koszul object.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BaseChangeReport {
    pub ring: Ring,
    pub degree0_trivial: bool,
    pub degree1_induced: bool,
    pub restriction_contractible: bool,
    pub contractible: bool,
}

impl BaseChangeReport {
    pub fn postconditions_hold(&self) -> bool {
        self.degree0_trivial && self.degree1_induced && self.restriction_contractible
    }
}

pub fn base_change_koszul_check(kos: &KoszulObject) -> Result<Vec<BaseChangeReport>> {
    if kos.ring != Ring::Integers {
        return Err(Error::Ring("base change starts from an integral Koszul object".into()));
    }
    let p = kos.group.prime().unwrap_or(2);
    [Ring::PrimeField(p), Ring::Rationals]
        .into_par_iter()
        .map(|ring| {
            let x = Arc::new(kos.complex.base_change(ring)?);
            let degree0_trivial = x.lo() == 0 && x.rank(0) == 1;
            let degree1_induced = induced_from(x.term(1), &kos.subgroup);
            let (_, r) = restrict_complex(&x, &kos.subgroup)?;
            let restriction_contractible = is_contractible(&Arc::new(r))?.is_contractible();
            let contractible = is_contractible(&x)?.is_contractible();
            Ok(BaseChangeReport { ring, degree0_trivial, degree1_induced, restriction_contractible, contractible })
        })
        .collect()
}

/// Rank-level comparison of `Res_K(⊗Ind_H^G x)` with the Mackey product.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MackeyReport {
    pub double_cosets: Vec<usize>,
    pub lhs_ranks: Vec<(i32, usize)>,
    pub rhs_ranks: Vec<(i32, usize)>,
    pub lhs_contractible: bool,
    pub rhs_contractible: bool,
}

impl MackeyReport {
    pub fn consistent(&self) -> bool {
        self.lhs_ranks == self.rhs_ranks && self.lhs_contractible == self.rhs_contractible
    }
}

/// `Res_K ⊗Ind_H^G x ≅ ⨂_{HgK} ⊗Ind_{K∩H}^K (conjugated Res x)` for `H ⊴ G`.
pub fn mackey_restrict_check(x: &Complex, g: &Arc<Group>, h: &Subgroup, k: &Subgroup) -> Result<MackeyReport> {
    let ring = x.ring();
    let y = tensor_induce(x, g, h)?;
    let (kg, kinc) = g.subgroup_group(k);
    let lhs = Arc::new(y.restrict_along(&kg, &kinc)?);
    let hk = g.generate(&h.elements().iter().chain(k.elements()).copied().collect::<Vec<_>>());
    let reps = g.coset_reps(&hk);
    let kh = k.intersect(h);
    let kh_in_k = kh.preimage(&kinc);
    let (khg, khinc) = kg.subgroup_group(&kh_in_k);
    let hpos = |v: usize| h.elements().binary_search(&v).expect("element of H");
    let mut rhs = Complex::unit(kg.clone(), ring);
    for &r in &reps {
        // c ↦ r⁻¹ c r lands in H because H is normal
        let map = (0..khg.order())
            .map(|c| {
                let in_g = kinc.apply(khinc.apply(c));
                hpos(g.mul(g.mul(g.inv(r), in_g), r))
            })
            .collect();
        let phi = Homomorphism { source_order: khg.order(), target_order: h.order(), map };
        let conj = x.restrict_along(&khg, &phi)?;
        let factor = tensor_induce(&conj, &kg, &kh_in_k)?;
        rhs = crate::chain::tensor_complex(&rhs, &factor)?;
    }
    let rhs = Arc::new(rhs);
    Ok(MackeyReport {
        double_cosets: reps,
        lhs_ranks: lhs.ranks(),
        rhs_ranks: rhs.ranks(),
        lhs_contractible: is_contractible(&lhs)?.is_contractible(),
        rhs_contractible: is_contractible(&rhs)?.is_contractible(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grp::{make_group, GroupDescriptor};

    fn grp(s: &str) -> Arc<Group> {
        make_group(&GroupDescriptor::parse(s).unwrap()).unwrap()
    }

    fn sub(g: &Group, order: usize) -> Subgroup {
        subgroups(g).unwrap().subgroups.into_iter().find(|h| h.order() == order).unwrap()
    }

    #[test]
    fn tensor_induction_of_unit_cone_over_c2() {
        let g = grp("C2");
        let h = g.trivial_subgroup();
        let (hg, _) = g.subgroup_group(&h);
        let y = tensor_induce(&unit_cone(&hg, Ring::Integers), &g, &h).unwrap();
        assert_eq!(y.ranks(), vec![(0, 1), (1, 2), (2, 1)]);
        assert!(y.term(0).is_permutation());
        // the generator swaps the two degree-1 letters: sign −1 on top
        assert_eq!(y.term(2).act(1, 0), (0, -1));
        let r1 = y.term(1).decomposition();
        assert_eq!(r1.len(), 1);
        assert_eq!(r1[0].stabilizer.order(), 1);
        for n in y.degrees() {
            assert!(homology(&y, n).presentation.is_zero());
        }
    }

    #[test]
    fn index_one_is_identity() {
        let g = grp("C4");
        let x = unit_cone(&g, Ring::Integers);
        let y = tensor_induce(&x, &g, &g.whole()).unwrap();
        assert_eq!(y, x);
    }

    #[test]
    fn index_bound() {
        let g = grp("C8");
        let h = g.trivial_subgroup();
        let (hg, _) = g.subgroup_group(&h);
        assert!(matches!(
            tensor_induce(&unit_cone(&hg, Ring::Integers), &g, &h),
            Err(Error::IndexBound { index: 8, .. })
        ));
    }

    #[test]
    fn top_degree_multiplies() {
        let g = grp("C2xC2");
        let h = sub(&g, 2);
        let (hg, _) = g.subgroup_group(&h);
        let x = unit_cone(&hg, Ring::Integers);
        let y = tensor_induce(&x, &g, &h).unwrap();
        assert_eq!(y.hi(), 2 * x.hi());
    }

    #[test]
    fn sign_modify_fixes_top_sign_over_z() {
        let g = grp("C2");
        let h = g.trivial_subgroup();
        let (hg, _) = g.subgroup_group(&h);
        let y = tensor_induce(&unit_cone(&hg, Ring::Integers), &g, &h).unwrap();
        let (z, steps) = sign_modify(&y, &h).unwrap();
        assert!(!steps.is_empty());
        assert!(z.is_permutation());
        assert_eq!(z.rank(0), 1);
        let z = Arc::new(z);
        verify_postconditions(&z, &h).unwrap();
        // over F2 the signs disappear and nothing happens
        let y2 = tensor_induce(&unit_cone(&hg, Ring::PrimeField(2)), &g, &h).unwrap();
        let (z2, steps2) = sign_modify(&y2, &h).unwrap();
        assert!(steps2.is_empty());
        assert_eq!(z2.ranks(), y2.ranks());
    }

    #[test]
    fn sign_modify_on_permutation_input_is_noop() {
        let g = grp("C2");
        let x = unit_cone(&g, Ring::Integers);
        let (y, steps) = sign_modify(&x, &g.trivial_subgroup()).unwrap();
        assert!(steps.is_empty());
        assert_eq!(y, x);
    }

    #[test]
    fn koszul_objects_small() {
        for (name, order) in [("C2", 1), ("C4", 2), ("C3", 1), ("C2xC2", 2)] {
            let g = grp(name);
            let h = sub(&g, order);
            for ring in [Ring::Integers, Ring::PrimeField(g.prime().unwrap())] {
                let k = koszul_object(&g, &h, ring).unwrap();
                k.restriction_certificate.verify().unwrap();
                assert!(k.complex.is_permutation());
            }
        }
    }

    #[test]
    fn whole_group_gives_unit_cone() {
        let g = grp("C4");
        let k = koszul_object(&g, &g.whole(), Ring::Integers).unwrap();
        assert_eq!(*k.complex, unit_cone(&g, Ring::Integers));
    }

    #[test]
    fn mackey_for_c4() {
        let g = grp("C4");
        let h = sub(&g, 2);
        let (hg, _) = g.subgroup_group(&h);
        let one = hg.trivial_subgroup();
        let (_, x) = {
            let k = koszul_object(&hg, &one, Ring::Integers).unwrap();
            (k.group.clone(), (*k.complex).clone())
        };
        let rep = mackey_restrict_check(&x, &g, &h, &h).unwrap();
        assert!(rep.consistent(), "{rep:?}");
        assert_eq!(rep.double_cosets.len(), 2);
        // over the trivial group one factor is Res x, which contracts
        let rep = mackey_restrict_check(&x, &g, &h, &g.trivial_subgroup()).unwrap();
        assert!(rep.consistent(), "{rep:?}");
        assert!(rep.lhs_contractible);
        let rep = mackey_restrict_check(&x, &g, &h, &g.whole()).unwrap();
        assert!(rep.consistent(), "{rep:?}");
        assert_eq!(rep.double_cosets.len(), 1);
    }

    #[test]
    fn base_change_keeps_postconditions() {
        let g = grp("C2");
        let k = koszul_object(&g, &g.trivial_subgroup(), Ring::Integers).unwrap();
        for r in base_change_koszul_check(&k).unwrap() {
            assert!(r.postconditions_hold(), "{r:?}");
            if r.ring == Ring::Rationals {
                assert!(r.contractible);
            }
        }
    }
}
