//! Exact homotopy computations: homology presentations, null-homotopies,
//! contractibility and equivalence certificates, and Hom groups out of the unit.
//!
//! Every unknown equivariant map is parametrized by its values at source orbit
//! representatives (see [`HomSpace`]), so the linear systems only ever see
//! equivariant maps.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chain::{ChainMap, Complex};
use crate::error::{Error, Result};
use crate::linalg::domain::{to_int_vec, Domain};
use crate::linalg::sparse::SparseSystem;
use crate::linalg::Mat;
pub use crate::linalg::{smith_normal_form, SmithForm};
use crate::permod::{HomSpace, SignedPermModule};
use crate::ring::Ring;

const DEFAULT_MAX_UNKNOWNS: usize = 400_000;

/// Upper bound on the number of unknowns of a single linear system.
/// Overridable through `TTPERM_MAX_RANK`.
pub fn max_unknowns() -> usize {
    std::env::var("TTPERM_MAX_RANK").ok().and_then(|v| v.parse().ok()).unwrap_or(DEFAULT_MAX_UNKNOWNS)
}

// ---------------------------------------------------------------------------
// presentations

/// A finitely generated module `R^rank ⊕ ⨁ R/d_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FgModulePresentation {
    pub ring: Ring,
    pub rank: usize,
    /// Elementary divisors `d_1 | d_2 | …`, each > 1. Always empty over a field.
    pub torsion: Vec<i64>,
}

impl FgModulePresentation {
    pub fn zero(ring: Ring) -> Self {
        FgModulePresentation { ring, rank: 0, torsion: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    /// Vector-space dimension; only meaningful over a field.
    pub fn dimension(&self) -> usize {
        self.rank
    }

    pub fn num_generators(&self) -> usize {
        self.rank + self.torsion.len()
    }
}

impl fmt::Display for FgModulePresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let r = match self.ring {
            Ring::Integers => "Z".to_string(),
            Ring::Rationals => "Q".to_string(),
            Ring::PrimeField(p) => format!("F{p}"),
        };
        let mut parts = Vec::new();
        if self.rank == 1 {
            parts.push(r.clone());
        } else if self.rank > 1 {
            parts.push(format!("{r}^{}", self.rank));
        }
        for d in &self.torsion {
            parts.push(format!("Z/{d}"));
        }
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

/// Homology of `A --d_in--> B --d_out--> C` at `B`, with explicit cycle
/// generators and a coordinate map on cycles.
#[derive(Clone, Debug)]
pub struct HomologyGroup {
    pub presentation: FgModulePresentation,
    /// Cycle representatives (columns in the coordinates of `B`).
    pub generators: Vec<Mat>,
    /// Additive order of each generator, 0 for infinite.
    pub orders: Vec<i64>,
    coord_map: Mat,
    ring: Ring,
    dim: usize,
}

impl HomologyGroup {
    pub fn compute(ring: Ring, d_in: &Mat, d_out: &Mat) -> HomologyGroup {
        let dim = d_out.cols();
        assert_eq!(d_in.rows(), dim);
        // kernel of d_out: columns r.. of q, coordinates rows r.. of v
        let (r, q, v) = if d_out.rows() == 0 || d_out.is_zero() {
            (0, Mat::identity(dim), Mat::identity(dim))
        } else {
            let s = smith_normal_form(d_out, ring);
            (s.rank, s.q, s.v)
        };
        let k = dim - r;
        let kernel = q.block(0, dim, r, dim);
        let kcoords = v.block(r, dim, 0, dim);
        if k == 0 {
            return HomologyGroup {
                presentation: FgModulePresentation::zero(ring),
                generators: Vec::new(),
                orders: Vec::new(),
                coord_map: Mat::zeros(0, dim),
                ring,
                dim,
            };
        }
        let c = kcoords.mul(d_in, ring);
        let (r2, u, p, divisors) = if c.cols() == 0 || c.is_zero() {
            (0, Mat::identity(k), Mat::identity(k), Vec::new())
        } else {
            let s = smith_normal_form(&c, ring);
            (s.rank, s.u, s.p, s.divisors)
        };
        let full = p.mul(&kcoords, ring);
        let mut generators = Vec::new();
        let mut orders = Vec::new();
        let mut rows = Vec::new();
        let mut torsion = Vec::new();
        for i in 0..k {
            let order = if i < r2 {
                let dv = divisors[i].abs();
                if ring != Ring::Integers || dv == 1 {
                    continue;
                }
                torsion.push(dv);
                dv
            } else {
                0
            };
            generators.push(kernel.mul(&u.block(0, k, i, i + 1), ring));
            orders.push(order);
            rows.push(i);
        }
        let mut coord_map = Mat::zeros(rows.len(), dim);
        for (a, &i) in rows.iter().enumerate() {
            coord_map.set_block(a, 0, &full.block(i, i + 1, 0, dim));
        }
        let coord_map = coord_map.normalize(ring);
        let presentation = FgModulePresentation { ring, rank: k - r2, torsion };
        HomologyGroup { presentation, generators, orders, coord_map, ring, dim }
    }

    /// Coordinates of a cycle in the generator basis, torsion entries reduced.
    /// The caller is responsible for passing a cycle.
    pub fn coordinates(&self, z: &Mat) -> Mat {
        assert_eq!(z.shape(), (self.dim, 1));
        let mut c = self.coord_map.mul(z, self.ring);
        if self.ring == Ring::Integers {
            for (i, &o) in self.orders.iter().enumerate() {
                if o > 0 {
                    let x = c.get(i, 0);
                    c.set(i, 0, x.rem_euclid(o));
                }
            }
        }
        c
    }

    pub fn is_zero_class(&self, z: &Mat) -> bool {
        self.coordinates(z).is_zero()
    }
}

/// `H_n(X)` of the underlying complex of modules.
pub fn homology(x: &Complex, n: i32) -> HomologyGroup {
    HomologyGroup::compute(x.ring(), &x.d(n + 1), &x.d(n))
}

// ---------------------------------------------------------------------------
// invariants and Hom from the unit

/// Basis of `M^G`: sign-consistent orbit sums, each with a pivot index whose
/// coefficient is ±1 and which no other basis vector touches.
#[derive(Clone, Debug)]
pub struct InvariantBasis {
    pub vectors: Vec<Vec<(usize, i64)>>,
    rank: usize,
}

impl InvariantBasis {
    pub fn new(m: &SignedPermModule) -> InvariantBasis {
        let one = SignedPermModule::trivial(m.group().clone(), m.ring());
        let hs = HomSpace::new(&one, m).expect("same context");
        let vectors = (0..hs.dim()).map(|u| hs.image(u, 0)).collect();
        InvariantBasis { vectors, rank: m.rank() }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    fn pivot(&self, k: usize) -> (usize, i64) {
        self.vectors[k][0]
    }

    /// Coordinates of an invariant vector; `None` if it is not invariant.
    pub fn coordinates(&self, x: &Mat, ring: Ring) -> Option<Mat> {
        let mut c = Mat::zeros(self.len(), 1);
        for k in 0..self.len() {
            let (t, s) = self.pivot(k);
            c.set(k, 0, x.get(t, 0) * s);
        }
        let c = c.with_den(x.den()).normalize(ring);
        (self.embed(&c, ring) == x.clone().normalize(ring)).then_some(c)
    }

    pub fn embed(&self, c: &Mat, ring: Ring) -> Mat {
        let mut x = Mat::zeros(self.rank, 1);
        for (k, v) in self.vectors.iter().enumerate() {
            let a = c.get(k, 0);
            if a != 0 {
                for &(t, s) in v {
                    x.add_at(t, 0, a * s);
                }
            }
        }
        x.with_den(c.den()).normalize(ring)
    }

    /// Matrix of an equivariant map `M → N` restricted to invariants.
    pub fn restrict_map(&self, target: &InvariantBasis, f: &Mat, ring: Ring) -> Mat {
        let mut out = Mat::zeros(target.len(), self.len());
        for (j, v) in self.vectors.iter().enumerate() {
            for k in 0..target.len() {
                let (t, s) = target.pivot(k);
                let mut acc = 0i64;
                for &(i, c) in v {
                    acc += f.get(t, i) * c;
                }
                out.set(k, j, acc * s);
            }
        }
        out.with_den(f.den()).normalize(ring)
    }
}

/// A map `1 → Y[s]`, i.e. an invariant cycle in `Y_{−s}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HomClass {
    pub ambient: Arc<Complex>,
    pub shift: i32,
    /// Column vector in the coordinates of `Y_{−s}`.
    pub cycle: Mat,
}

impl HomClass {
    pub fn check(&self) -> Result<()> {
        let y = &self.ambient;
        let n = -self.shift;
        let ring = y.ring();
        if self.cycle.shape() != (y.rank(n), 1) {
            return Err(Error::Validation("class has the wrong shape".into()));
        }
        if !y.d(n).mul(&self.cycle, ring).is_zero() {
            return Err(Error::Validation("class representative is not a cycle".into()));
        }
        let m = y.term(n);
        for g in y.group().elements() {
            if m.matrix_of(g).mul(&self.cycle, ring) != self.cycle.clone().normalize(ring) {
                return Err(Error::Validation("class representative is not invariant".into()));
            }
        }
        Ok(())
    }
}

/// `Hom_K(1, Y[s])` with generators.
#[derive(Clone, Debug)]
pub struct HomGroup {
    pub ambient: Arc<Complex>,
    pub shift: i32,
    pub presentation: FgModulePresentation,
    pub generators: Vec<HomClass>,
    pub orders: Vec<i64>,
    basis: InvariantBasis,
    inner: HomologyGroup,
}

impl HomGroup {
    /// Coordinates of a class in the generator basis.
    pub fn coordinates(&self, cycle: &Mat) -> Result<Mat> {
        let ring = self.ambient.ring();
        let n = -self.shift;
        if !self.ambient.d(n).mul(cycle, ring).is_zero() {
            return Err(Error::Validation("not a cycle".into()));
        }
        let c = self
            .basis
            .coordinates(cycle, ring)
            .ok_or_else(|| Error::Validation("not an invariant vector".into()))?;
        Ok(self.inner.coordinates(&c))
    }

    pub fn is_zero_class(&self, cycle: &Mat) -> Result<bool> {
        Ok(self.coordinates(cycle)?.is_zero())
    }
}

/// The complex of invariants `Y^G` with its bases.
pub fn invariant_complex(y: &Complex) -> (BTreeMap<i32, InvariantBasis>, BTreeMap<i32, Mat>) {
    let ring = y.ring();
    let bases: BTreeMap<i32, InvariantBasis> = y.degrees().map(|n| (n, InvariantBasis::new(y.term(n)))).collect();
    let mut diffs = BTreeMap::new();
    for n in y.degrees() {
        if let Some(t) = bases.get(&(n - 1)) {
            diffs.insert(n, bases[&n].restrict_map(t, &y.d(n), ring));
        }
    }
    (bases, diffs)
}

/// `Hom_K(1, Y[s]) = H_{−s}(Y^G)`.
pub fn hom_group(y: &Arc<Complex>, s: i32) -> HomGroup {
    let ring = y.ring();
    let n = -s;
    let basis_of = |m: i32| {
        if y.rank(m) == 0 {
            InvariantBasis { vectors: Vec::new(), rank: 0 }
        } else {
            InvariantBasis::new(y.term(m))
        }
    };
    let b = basis_of(n);
    let above = basis_of(n + 1);
    let below = basis_of(n - 1);
    let d_in = above.restrict_map(&b, &y.d(n + 1), ring);
    let d_out = b.restrict_map(&below, &y.d(n), ring);
    let inner = HomologyGroup::compute(ring, &d_in, &d_out);
    let generators = inner
        .generators
        .iter()
        .map(|g| HomClass { ambient: y.clone(), shift: s, cycle: b.embed(g, ring) })
        .collect();
    HomGroup {
        ambient: y.clone(),
        shift: s,
        presentation: inner.presentation.clone(),
        generators,
        orders: inner.orders.clone(),
        basis: b,
        inner,
    }
}

// ---------------------------------------------------------------------------
// linear systems over equivariant maps

type SVec<E> = Vec<(usize, E)>;

struct Cols<E>(Vec<SVec<E>>);

fn cols<D: Domain>(d: &D, m: &Mat) -> Cols<D::E> {
    let mut out = vec![Vec::new(); m.cols()];
    for i in 0..m.rows() {
        for (j, &x) in m.row(i).iter().enumerate() {
            if x != 0 {
                out[j].push((i, d.from_frac(x, m.den())));
            }
        }
    }
    Cols(out)
}

fn col_svec<D: Domain>(d: &D, m: &Mat, j: usize) -> SVec<D::E> {
    (0..m.rows()).filter(|&i| m.get(i, j) != 0).map(|i| (i, d.from_frac(m.get(i, j), m.den()))).collect()
}

fn neg_svec<D: Domain>(d: &D, v: SVec<D::E>) -> SVec<D::E> {
    v.into_iter().map(|(i, x)| (i, d.neg(&x))).collect()
}

enum Unknown {
    Equivariant(HomSpace),
    /// An arbitrary vector of the given length.
    Plain(usize),
}

/// `post · U(w)` where `U` is an unknown block.
struct Term<'a, E> {
    post: Option<&'a Cols<E>>,
    block: usize,
    w: SVec<E>,
}

struct Builder<D: Domain> {
    d: D,
    ring: Ring,
    blocks: Vec<(Unknown, usize)>,
    nunk: usize,
    rows: Vec<(SVec<D::E>, Vec<D::E>)>,
}

impl<D: Domain> Builder<D> {
    fn new(d: D, ring: Ring) -> Self {
        Builder { d, ring, blocks: Vec::new(), nunk: 0, rows: Vec::new() }
    }

    fn block(&mut self, u: Unknown) -> usize {
        let dim = match &u {
            Unknown::Equivariant(h) => h.dim(),
            Unknown::Plain(n) => *n,
        };
        self.blocks.push((u, self.nunk));
        self.nunk += dim;
        self.blocks.len() - 1
    }

    fn hom_block(&mut self, src: &SignedPermModule, tgt: &SignedPermModule) -> usize {
        self.block(Unknown::Equivariant(HomSpace::new(src, tgt).expect("same context")))
    }

    /// Equation `Σ terms = rhs` in a module of rank `tgt_rank`.
    fn equation(&mut self, tgt_rank: usize, terms: &[Term<'_, D::E>], rhs: &SVec<D::E>) {
        let d = &self.d;
        let mut acc: HashMap<usize, HashMap<usize, D::E>> = HashMap::new();
        let mut put = |row: usize, unk: usize, v: D::E| {
            let e = acc.entry(row).or_default().entry(unk).or_insert_with(|| d.zero());
            *e = d.add(e, &v);
        };
        for t in terms {
            let (u, off) = &self.blocks[t.block];
            for (i, wi) in &t.w {
                let images: Vec<(usize, Vec<(usize, i64)>)> = match u {
                    Unknown::Equivariant(h) => h.images_at(*i),
                    Unknown::Plain(_) => vec![(*i, vec![(*i, 1)])],
                };
                for (k, img) in images {
                    for (j, c) in img {
                        let val = d.mul(wi, &d.from_frac(c, 1));
                        match t.post {
                            None => put(j, off + k, val),
                            Some(p) => {
                                for (r, pr) in &p.0[j] {
                                    put(*r, off + k, d.mul(&val, pr));
                                }
                            }
                        }
                    }
                }
            }
        }
        let rhs_map: HashMap<usize, D::E> = rhs.iter().cloned().collect();
        let mut keys: Vec<usize> = acc.keys().chain(rhs_map.keys()).cloned().collect();
        keys.sort_unstable();
        keys.dedup();
        for r in keys {
            debug_assert!(r < tgt_rank);
            let coeffs: SVec<D::E> =
                acc.remove(&r).map(|m| m.into_iter().filter(|(_, v)| !d.is_zero(v)).collect()).unwrap_or_default();
            let b = rhs_map.get(&r).cloned().unwrap_or_else(|| d.zero());
            if coeffs.is_empty() && d.is_zero(&b) {
                continue;
            }
            self.rows.push((coeffs, vec![b]));
        }
    }

    fn solve(self) -> Result<Option<Solution<D>>> {
        let cap = max_unknowns();
        if self.nunk > cap {
            return Err(Error::TooLarge { unknowns: self.nunk, cap });
        }
        let mut sys = SparseSystem::new(self.d.clone(), self.nunk, 1);
        for (c, b) in self.rows {
            sys.push(c, b);
        }
        Ok(sys.solve().pop().flatten().map(|x| Solution { d: self.d, ring: self.ring, blocks: self.blocks, x }))
    }
}

struct Solution<D: Domain> {
    d: D,
    ring: Ring,
    blocks: Vec<(Unknown, usize)>,
    x: Vec<D::E>,
}

impl<D: Domain> Solution<D> {
    fn map(&self, block: usize) -> Mat {
        let (u, off) = &self.blocks[block];
        match u {
            Unknown::Equivariant(h) => {
                let (c, den) = to_int_vec(&self.d, &self.x[*off..off + h.dim()]);
                h.assemble(&c, den)
            }
            Unknown::Plain(n) => {
                let (c, den) = to_int_vec(&self.d, &self.x[*off..off + n]);
                Mat::column(&c).with_den(den).normalize(self.ring)
            }
        }
    }
}

fn reps(m: &SignedPermModule) -> Vec<usize> {
    m.orbits().0.iter().map(|o| o.rep).collect()
}

fn unit_svec<D: Domain>(d: &D, i: usize) -> SVec<D::E> {
    vec![(i, d.one())]
}

// ---------------------------------------------------------------------------
// homotopies

/// A degree +1 map `h_n: X_n → Y_{n+1}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Homotopy {
    pub source: Arc<Complex>,
    pub target: Arc<Complex>,
    comps: BTreeMap<i32, Mat>,
}

impl Homotopy {
    pub fn new(source: Arc<Complex>, target: Arc<Complex>, comps: BTreeMap<i32, Mat>) -> Homotopy {
        let ring = source.ring();
        let comps = comps.into_iter().filter(|(_, m)| m.rows() * m.cols() > 0).map(|(n, m)| (n, m.normalize(ring))).collect();
        Homotopy { source, target, comps }
    }

    pub fn zero(source: &Arc<Complex>, target: &Arc<Complex>) -> Homotopy {
        Homotopy::new(source.clone(), target.clone(), BTreeMap::new())
    }

    pub fn comp(&self, n: i32) -> Mat {
        self.comps.get(&n).cloned().unwrap_or_else(|| Mat::zeros(self.target.rank(n + 1), self.source.rank(n)))
    }

    pub fn components(&self) -> &BTreeMap<i32, Mat> {
        &self.comps
    }

    /// `d h + h d`, a chain map null-homotopic by construction.
    pub fn boundary(&self) -> ChainMap {
        let (x, y) = (&self.source, &self.target);
        let ring = x.ring();
        let comps = x
            .degrees()
            .map(|n| (n, y.d(n + 1).mul(&self.comp(n), ring).add(&self.comp(n - 1).mul(&x.d(n), ring), ring)))
            .collect();
        ChainMap::unchecked(x.clone(), y.clone(), comps)
    }

    /// Does `f = d h + h d` hold exactly?
    pub fn witnesses(&self, f: &ChainMap) -> bool {
        let b = self.boundary();
        self.source.degrees().all(|n| b.comp(n).into_owned() == f.comp(n).into_owned())
    }

    pub fn neg(&self) -> Homotopy {
        let ring = self.source.ring();
        let comps = self.comps.iter().map(|(&n, m)| (n, m.neg(ring))).collect();
        Homotopy::new(self.source.clone(), self.target.clone(), comps)
    }
}

/// Certificate that `complex ≃ 0`: `d h + h d = id`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HomotopyCertificate {
    pub complex: Arc<Complex>,
    pub h: BTreeMap<i32, Mat>,
}

impl HomotopyCertificate {
    pub fn verify(&self) -> Result<()> {
        let x = &self.complex;
        let ring = x.ring();
        let h = |n: i32| self.h.get(&n).cloned().unwrap_or_else(|| Mat::zeros(x.rank(n + 1), x.rank(n)));
        for n in x.degrees() {
            if h(n).shape() != (x.rank(n + 1), x.rank(n)) {
                return Err(Error::Validation(format!("certificate component in degree {n} has the wrong shape")));
            }
            if !crate::chain::equivariant(x.term(n), x.term(n + 1), &h(n)) {
                return Err(Error::Validation(format!("certificate component in degree {n} is not equivariant")));
            }
            let lhs = x.d(n + 1).mul(&h(n), ring).add(&h(n - 1).mul(&x.d(n), ring), ring);
            if lhs != Mat::identity(x.rank(n)) {
                return Err(Error::Validation(format!("d h + h d ≠ id in degree {n}")));
            }
        }
        Ok(())
    }

    pub fn as_homotopy(&self) -> Homotopy {
        Homotopy::new(self.complex.clone(), self.complex.clone(), self.h.clone())
    }
}

/// Why a complex is not contractible.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum Witness {
    /// Nonzero homology of the underlying complex.
    Homology { degree: i32, presentation: FgModulePresentation },
    /// Nonzero homology of the invariants, i.e. a nonzero map from a shifted unit.
    Invariants { degree: i32, presentation: FgModulePresentation },
    /// Nonzero homology after reduction to a residue field.
    ResidueHomology { prime: u64, degree: i32, presentation: FgModulePresentation },
    /// The degree-wise system for `h` has no solution at this orbit representative.
    Unsolvable { degree: i32, rep: usize },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Homology { degree, presentation } => write!(f, "H_{degree} = {presentation}"),
            Witness::Invariants { degree, presentation } => write!(f, "H_{degree}(X^G) = {presentation}"),
            Witness::ResidueHomology { prime, degree, presentation } => {
                write!(f, "H_{degree}(X ⊗ F{prime}) = {presentation}")
            }
            Witness::Unsolvable { degree, rep } => {
                write!(f, "no equivariant contraction in degree {degree} (orbit of basis vector {rep})")
            }
        }
    }
}

#[derive(Clone, Debug)]
pub enum Contractibility {
    Contractible(HomotopyCertificate),
    NotContractible(Witness),
}

impl Contractibility {
    pub fn is_contractible(&self) -> bool {
        matches!(self, Contractibility::Contractible(_))
    }

    pub fn certificate(&self) -> Option<&HomotopyCertificate> {
        match self {
            Contractibility::Contractible(c) => Some(c),
            _ => None,
        }
    }
}

/// Decide `C ≃ 0`, building `h` degree by degree from the bottom.
///
/// The greedy choice is complete: once `h_{<n}` satisfies the equations below
/// `n`, the map `id − h_{n−1} d_n` is a cycle of `Hom_G(C_n, C)`, which is a
/// boundary whenever `C` is contractible.
pub fn is_contractible(c: &Arc<Complex>) -> Result<Contractibility> {
    let ring = c.ring();
    let mut h: BTreeMap<i32, Mat> = BTreeMap::new();
    for n in c.degrees() {
        if c.rank(n) == 0 {
            continue;
        }
        let hn = with_domain_solve_step(c, n, &h)?;
        match hn {
            Ok(m) => {
                h.insert(n, m);
            }
            Err(rep) => return Ok(Contractibility::NotContractible(witness(c, n, rep))),
        }
    }
    let cert = HomotopyCertificate { complex: c.clone(), h: h.into_iter().map(|(n, m)| (n, m.normalize(ring))).collect() };
    cert.verify().expect("contraction certificate must verify");
    Ok(Contractibility::Contractible(cert))
}

fn with_domain_solve_step(c: &Complex, n: i32, h: &BTreeMap<i32, Mat>) -> Result<std::result::Result<Mat, usize>> {
    crate::with_domain!(c.ring(), d => solve_step(d, c, n, h))
}

fn solve_step<D: Domain>(d: D, c: &Complex, n: i32, h: &BTreeMap<i32, Mat>) -> Result<std::result::Result<Mat, usize>> {
    let ring = c.ring();
    let rank = c.rank(n);
    // rhs(b) = e_b − h_{n−1}(d_n e_b)
    let hd = match h.get(&(n - 1)) {
        Some(hm) => hm.mul(&c.d(n), ring),
        None => Mat::zeros(rank, rank),
    };
    let rhs_mat = Mat::identity(rank).sub(&hd, ring);
    let reps = reps(c.term(n));
    if c.rank(n + 1) == 0 {
        for &b in &reps {
            if !rhs_mat.block(0, rank, b, b + 1).is_zero() {
                return Ok(Err(b));
            }
        }
        return Ok(Ok(Mat::zeros(0, rank)));
    }
    let mut bld = Builder::new(d.clone(), ring);
    let blk = bld.hom_block(c.term(n), c.term(n + 1));
    let dn1 = cols(&d, &c.d(n + 1));
    for &b in &reps {
        bld.equation(rank, &[Term { post: Some(&dn1), block: blk, w: unit_svec(&d, b) }], &col_svec(&d, &rhs_mat, b));
    }
    match bld.solve()? {
        Some(sol) => Ok(Ok(sol.map(blk))),
        None => {
            // locate the offending representative with single-orbit systems
            for &b in &reps {
                let mut one = Builder::new(d.clone(), ring);
                let blk = one.hom_block(c.term(n), c.term(n + 1));
                one.equation(rank, &[Term { post: Some(&dn1), block: blk, w: unit_svec(&d, b) }], &col_svec(&d, &rhs_mat, b));
                if one.solve()?.is_none() {
                    return Ok(Err(b));
                }
            }
            Ok(Err(reps[0]))
        }
    }
}

fn witness(c: &Arc<Complex>, n: i32, rep: usize) -> Witness {
    for m in c.degrees() {
        let h = homology(c, m);
        if !h.presentation.is_zero() {
            return Witness::Homology { degree: m, presentation: h.presentation };
        }
    }
    for m in c.degrees() {
        let h = hom_group(c, -m);
        if !h.presentation.is_zero() {
            return Witness::Invariants { degree: m, presentation: h.presentation };
        }
    }
    if c.ring() == Ring::Integers {
        if let Some(p) = c.group().prime() {
            if let Ok(cp) = c.base_change(Ring::PrimeField(p)) {
                let cp = Arc::new(cp);
                for m in cp.degrees() {
                    let h = hom_group(&cp, -m);
                    if !h.presentation.is_zero() {
                        return Witness::ResidueHomology { prime: p, degree: m, presentation: h.presentation };
                    }
                }
            }
        }
    }
    Witness::Unsolvable { degree: n, rep }
}

/// Solve `f = d h + h d` for an equivariant `h`.
pub fn null_homotopy(f: &ChainMap) -> Result<Option<Homotopy>> {
    crate::with_domain!(f.source.ring(), d => null_homotopy_in(d, f))
}

fn null_homotopy_in<D: Domain>(d: D, f: &ChainMap) -> Result<Option<Homotopy>> {
    let (x, y) = (&f.source, &f.target);
    let ring = x.ring();
    let mut bld = Builder::new(d.clone(), ring);
    let mut hb: BTreeMap<i32, usize> = BTreeMap::new();
    for n in x.degrees() {
        if x.rank(n) > 0 && y.rank(n + 1) > 0 {
            hb.insert(n, bld.hom_block(x.term(n), y.term(n + 1)));
        }
    }
    let dy: BTreeMap<i32, Cols<D::E>> = x.degrees().map(|n| (n, cols(&d, &y.d(n + 1)))).collect();
    for n in x.degrees() {
        if x.rank(n) == 0 || y.rank(n) == 0 {
            continue;
        }
        let dx = x.d(n);
        let fnm = f.comp(n);
        for b in reps(x.term(n)) {
            let mut terms = Vec::new();
            if let Some(&k) = hb.get(&n) {
                terms.push(Term { post: Some(&dy[&n]), block: k, w: unit_svec(&d, b) });
            }
            if let Some(&k) = hb.get(&(n - 1)) {
                terms.push(Term { post: None, block: k, w: col_svec(&d, &dx, b) });
            }
            bld.equation(y.rank(n), &terms, &col_svec(&d, &fnm, b));
        }
    }
    let Some(sol) = bld.solve()? else { return Ok(None) };
    let comps = hb.iter().map(|(&n, &k)| (n, sol.map(k))).collect();
    let h = Homotopy::new(x.clone(), y.clone(), comps);
    assert!(h.witnesses(f), "null-homotopy must verify");
    Ok(Some(h))
}

/// A homotopy between two parallel chain maps (`f − g = d h + h d`).
pub fn homotopy_between(f: &ChainMap, g: &ChainMap) -> Result<Option<Homotopy>> {
    null_homotopy(&f.sub(g))
}

// ---------------------------------------------------------------------------
// equivalences

/// `f: X → Y`, `g: Y → X` with `g f − id_X = d hx + hx d` and
/// `f g − id_Y = d hy + hy d`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HomotopyEquivalence {
    pub f: ChainMap,
    pub g: ChainMap,
    pub hx: Homotopy,
    pub hy: Homotopy,
}

impl HomotopyEquivalence {
    pub fn identity(x: &Arc<Complex>) -> HomotopyEquivalence {
        let id = ChainMap::identity(x);
        HomotopyEquivalence { f: id.clone(), g: id, hx: Homotopy::zero(x, x), hy: Homotopy::zero(x, x) }
    }

    pub fn verify(&self) -> Result<()> {
        self.f.check()?;
        self.g.check()?;
        let x = &self.f.source;
        let y = &self.f.target;
        if !Arc::ptr_eq(x, &self.g.target) && **x != *self.g.target {
            return Err(Error::Validation("g does not land in the source of f".into()));
        }
        let gf = self.f.then(&self.g).sub(&ChainMap::identity(x));
        let fg = self.g.then(&self.f).sub(&ChainMap::identity(y));
        if !self.hx.witnesses(&gf) {
            return Err(Error::Validation("g f ≄ id".into()));
        }
        if !self.hy.witnesses(&fg) {
            return Err(Error::Validation("f g ≄ id".into()));
        }
        Ok(())
    }

    /// The inverse equivalence.
    pub fn inverse(&self) -> HomotopyEquivalence {
        HomotopyEquivalence { f: self.g.clone(), g: self.f.clone(), hx: self.hy.clone(), hy: self.hx.clone() }
    }
}

#[derive(Clone, Debug)]
pub enum EquivalenceOutcome {
    Found(Box<HomotopyEquivalence>),
    /// A computed invariant separates the two complexes.
    Inequivalent(String),
    /// The search could not decide.
    Inconclusive(String),
}

impl EquivalenceOutcome {
    pub fn found(&self) -> Option<&HomotopyEquivalence> {
        match self {
            EquivalenceOutcome::Found(e) => Some(e),
            _ => None,
        }
    }

    pub fn is_found(&self) -> bool {
        self.found().is_some()
    }
}

fn degree_span(x: &Complex, y: &Complex) -> std::ops::RangeInclusive<i32> {
    let lo = x.lo().min(y.lo());
    let hi = x.hi().max(y.hi());
    lo..=hi
}

/// Look for a homotopy equivalence `X ≃ Y`.
///
/// Homology and invariant homology are compared first. When the homology is
/// a single free line, the chain map is normalized to send a generator to a
/// generator; such a map exists iff any equivalence does. Its homotopy
/// inverse and both homotopies are then solved for exactly.
pub fn find_homotopy_equivalence(x: &Arc<Complex>, y: &Arc<Complex>) -> Result<EquivalenceOutcome> {
    if x.ring() != y.ring() || **x.group() != **y.group() {
        return Err(Error::Mismatch("equivalence between different contexts".into()));
    }
    if x == y {
        return Ok(EquivalenceOutcome::Found(Box::new(HomotopyEquivalence::identity(x))));
    }
    let mut homologies = Vec::new();
    for n in degree_span(x, y) {
        let hx = homology(x, n);
        let hy = homology(y, n);
        if hx.presentation != hy.presentation {
            return Ok(EquivalenceOutcome::Inequivalent(format!(
                "H_{n} differs: {} vs {}",
                hx.presentation, hy.presentation
            )));
        }
        let ix = hom_group(x, -n).presentation;
        let iy = hom_group(y, -n).presentation;
        if ix != iy {
            return Ok(EquivalenceOutcome::Inequivalent(format!("H_{n} of invariants differs: {ix} vs {iy}")));
        }
        if !hx.presentation.is_zero() {
            homologies.push((n, hx, hy));
        }
    }
    if homologies.is_empty() {
        let cx = is_contractible(x)?;
        let cy = is_contractible(y)?;
        return Ok(match (cx, cy) {
            (Contractibility::Contractible(a), Contractibility::Contractible(b)) => {
                let e = HomotopyEquivalence {
                    f: ChainMap::zero(x, y),
                    g: ChainMap::zero(y, x),
                    hx: a.as_homotopy().neg(),
                    hy: b.as_homotopy().neg(),
                };
                e.verify()?;
                EquivalenceOutcome::Found(Box::new(e))
            }
            (Contractibility::Contractible(_), Contractibility::NotContractible(w)) => {
                EquivalenceOutcome::Inequivalent(format!("only the first is contractible: {w}"))
            }
            (Contractibility::NotContractible(w), Contractibility::Contractible(_)) => {
                EquivalenceOutcome::Inequivalent(format!("only the second is contractible: {w}"))
            }
            _ => EquivalenceOutcome::Inconclusive("acyclic but neither side contracts".into()),
        });
    }
    if homologies.len() != 1 || homologies[0].1.presentation.num_generators() != 1 || homologies[0].1.orders[0] != 0 {
        return Ok(EquivalenceOutcome::Inconclusive("homology is not a single free line".into()));
    }
    let (top, hx, hy) = &homologies[0];
    equivalence_normalized(x, y, *top, &hx.generators[0], &hy.generators[0])
}

/// An equivalence sending the homology generator `zx` to `zy`, when the
/// homology of both sides is the single free line they span.
pub fn equivalence_normalized(
    x: &Arc<Complex>,
    y: &Arc<Complex>,
    top: i32,
    zx: &Mat,
    zy: &Mat,
) -> Result<EquivalenceOutcome> {
    let Some(f) = normalized_map(x, y, top, zx, zy)? else {
        return Ok(EquivalenceOutcome::Inequivalent(format!("no chain map is an isomorphism on H_{top}")));
    };
    let Some((g, hxh)) = left_inverse(&f)? else {
        return Ok(EquivalenceOutcome::Inconclusive("the normalized map has no homotopy left inverse".into()));
    };
    let fg = g.then(&f).sub(&ChainMap::identity(y));
    let Some(hyh) = null_homotopy(&fg)? else {
        return Ok(EquivalenceOutcome::Inconclusive("the normalized map has no homotopy right inverse".into()));
    };
    let e = HomotopyEquivalence { f, g, hx: hxh, hy: hyh };
    e.verify()?;
    Ok(EquivalenceOutcome::Found(Box::new(e)))
}

/// A chain map `f: X → Y` with `f(zx) ≡ zy` modulo boundaries.
pub fn normalized_map(x: &Arc<Complex>, y: &Arc<Complex>, deg: i32, zx: &Mat, zy: &Mat) -> Result<Option<ChainMap>> {
    crate::with_domain!(x.ring(), d => normalized_map_in(d, x, y, deg, zx, zy))
}

fn chain_map_blocks<D: Domain>(
    d: &D,
    bld: &mut Builder<D>,
    x: &Complex,
    y: &Complex,
) -> BTreeMap<i32, usize> {
    let mut fb = BTreeMap::new();
    for n in x.degrees() {
        if x.rank(n) > 0 && y.rank(n) > 0 {
            fb.insert(n, bld.hom_block(x.term(n), y.term(n)));
        }
    }
    // d_Y f_n − f_{n−1} d_X = 0 at representatives of X_n
    for n in x.degrees() {
        if y.rank(n - 1) == 0 || x.rank(n) == 0 {
            continue;
        }
        let dy = cols(d, &y.d(n));
        let dx = x.d(n);
        for b in reps(x.term(n)) {
            let mut terms = Vec::new();
            if let Some(&k) = fb.get(&n) {
                terms.push(Term { post: Some(&dy), block: k, w: unit_svec(d, b) });
            }
            if let Some(&k) = fb.get(&(n - 1)) {
                terms.push(Term { post: None, block: k, w: neg_svec(d, col_svec(d, &dx, b)) });
            }
            bld.equation(y.rank(n - 1), &terms, &Vec::new());
        }
    }
    fb
}

fn normalized_map_in<D: Domain>(
    d: D,
    x: &Arc<Complex>,
    y: &Arc<Complex>,
    deg: i32,
    zx: &Mat,
    zy: &Mat,
) -> Result<Option<ChainMap>> {
    let ring = x.ring();
    let mut bld = Builder::new(d.clone(), ring);
    let fb = chain_map_blocks(&d, &mut bld, x, y);
    let Some(&fk) = fb.get(&deg) else { return Ok(None) };
    let dy = cols(&d, &y.d(deg + 1));
    let mut terms = vec![Term { post: None, block: fk, w: col_svec(&d, zx, 0) }];
    if y.rank(deg + 1) > 0 {
        // − d w for an arbitrary (not necessarily invariant) w
        let wk = bld.block(Unknown::Plain(y.rank(deg + 1)));
        let w: SVec<D::E> = (0..y.rank(deg + 1)).map(|i| (i, d.neg(&d.one()))).collect();
        terms.push(Term { post: Some(&dy), block: wk, w });
    }
    bld.equation(y.rank(deg), &terms, &col_svec(&d, zy, 0));
    let Some(sol) = bld.solve()? else { return Ok(None) };
    let comps = fb.iter().map(|(&n, &k)| (n, sol.map(k))).collect();
    Ok(Some(ChainMap::new(x.clone(), y.clone(), comps)?))
}

/// `g: Y → X` and `h` with `g f − id = d h + h d`.
pub fn left_inverse(f: &ChainMap) -> Result<Option<(ChainMap, Homotopy)>> {
    crate::with_domain!(f.source.ring(), d => left_inverse_in(d, f))
}

fn left_inverse_in<D: Domain>(d: D, f: &ChainMap) -> Result<Option<(ChainMap, Homotopy)>> {
    let (x, y) = (&f.source, &f.target);
    let ring = x.ring();
    let mut bld = Builder::new(d.clone(), ring);
    let gb = chain_map_blocks(&d, &mut bld, y, x);
    let mut hb = BTreeMap::new();
    for n in x.degrees() {
        if x.rank(n) > 0 && x.rank(n + 1) > 0 {
            hb.insert(n, bld.hom_block(x.term(n), x.term(n + 1)));
        }
    }
    // g_n f_n e_b − d h_n e_b − h_{n−1} d e_b = e_b
    for n in x.degrees() {
        if x.rank(n) == 0 {
            continue;
        }
        let fnm = f.comp(n);
        let dx = x.d(n);
        let dx1 = cols(&d, &x.d(n + 1));
        for b in reps(x.term(n)) {
            let mut terms = Vec::new();
            if let Some(&k) = gb.get(&n) {
                terms.push(Term { post: None, block: k, w: col_svec(&d, &fnm, b) });
            }
            if let Some(&k) = hb.get(&n) {
                terms.push(Term { post: Some(&dx1), block: k, w: vec![(b, d.neg(&d.one()))] });
            }
            if let Some(&k) = hb.get(&(n - 1)) {
                terms.push(Term { post: None, block: k, w: neg_svec(&d, col_svec(&d, &dx, b)) });
            }
            bld.equation(x.rank(n), &terms, &unit_svec(&d, b));
        }
    }
    let Some(sol) = bld.solve()? else { return Ok(None) };
    let g = ChainMap::new(y.clone(), x.clone(), gb.iter().map(|(&n, &k)| (n, sol.map(k))).collect())?;
    let h = Homotopy::new(x.clone(), x.clone(), hb.iter().map(|(&n, &k)| (n, sol.map(k))).collect());
    debug_assert!(h.witnesses(&f.then(&g).sub(&ChainMap::identity(x))));
    Ok(Some((g, h)))
}

/// Chain maps `X → Y` modulo homotopy, as a presentation: the group
/// `Hom_K(X, Y) = H_0(Hom_G(X, Y))`, computed on the full equivariant mapping
/// space. Used for small cross-checks.
pub fn chain_maps_modulo_homotopy(x: &Arc<Complex>, y: &Arc<Complex>) -> Result<FgModulePresentation> {
    let ring = x.ring();
    // Hom complex in degrees 1, 0, −1: homotopies → maps → degree −1 maps
    let degs: Vec<i32> = x.degrees().collect();
    let spaces = |shift: i32| -> Result<Vec<(i32, HomSpace)>> {
        degs.iter()
            .filter(|&&n| x.rank(n) > 0 && y.rank(n + shift) > 0)
            .map(|&n| Ok((n, HomSpace::new(x.term(n), y.term(n + shift))?)))
            .collect()
    };
    let (s1, s0) = (spaces(1)?, spaces(0)?);
    let dim = |s: &[(i32, HomSpace)]| s.iter().map(|(_, h)| h.dim()).sum::<usize>();
    if dim(&s0) + dim(&s1) > max_unknowns() {
        return Err(Error::TooLarge { unknowns: dim(&s0) + dim(&s1), cap: max_unknowns() });
    }
    // D(φ) = d_Y φ − (−1)^{|φ|} φ d_X, flattened into full matrices
    let flatten = |shift: i32, s: &[(i32, HomSpace)], phi_deg: i32| -> Mat {
        // columns: basis of s; rows: all entries of maps X_n → Y_{n+shift−1}
        let mut row_off = BTreeMap::new();
        let mut nrows = 0;
        for &n in &degs {
            row_off.insert(n, nrows);
            nrows += y.rank(n + shift - 1) * x.rank(n);
        }
        let ncols = dim(s);
        let mut m = Mat::zeros(nrows, ncols);
        let sign = if phi_deg % 2 == 0 { 1 } else { -1 };
        let mut col = 0;
        for (n, hs) in s {
            for u in 0..hs.dim() {
                let phi = hs.basis_map(u);
                let a = y.d(n + shift).mul(&phi, ring);
                for i in 0..a.rows() {
                    for j in 0..a.cols() {
                        let r = row_off[n] + i * x.rank(*n) + j;
                        m.add_at(r, col, a.get(i, j));
                    }
                }
                let b = phi.mul(&x.d(n + 1), ring);
                for i in 0..b.rows() {
                    for j in 0..b.cols() {
                        let r = row_off[&(n + 1)] + i * x.rank(n + 1) + j;
                        m.add_at(r, col, -sign * b.get(i, j));
                    }
                }
                col += 1;
            }
        }
        m.normalize(ring)
    };
    let d1 = flatten(1, &s1, 1);
    let d0 = flatten(0, &s0, 0);
    // d1 lands in the flattening of degree-0 maps; re-express in the s0 basis
    let to_s0 = coordinates_in(&s0, &degs, x, y, ring);
    let d1c = to_s0.mul(&d1, ring);
    Ok(HomologyGroup::compute(ring, &d1c, &d0).presentation)
}

fn coordinates_in(s0: &[(i32, HomSpace)], degs: &[i32], x: &Complex, y: &Complex, ring: Ring) -> Mat {
    // each basis map is determined by its value on orbit representatives; read
    // the coordinates off the flattened entries through a left inverse
    let mut row_off = BTreeMap::new();
    let mut nrows = 0;
    for &n in degs {
        row_off.insert(n, nrows);
        nrows += y.rank(n) * x.rank(n);
    }
    let total: usize = s0.iter().map(|(_, h)| h.dim()).sum();
    let mut b = Mat::zeros(nrows, total);
    let mut col = 0;
    for (n, hs) in s0 {
        for u in 0..hs.dim() {
            let phi = hs.basis_map(u);
            for i in 0..phi.rows() {
                for j in 0..phi.cols() {
                    b.set(row_off[n] + i * x.rank(*n) + j, col, phi.get(i, j));
                }
            }
            col += 1;
        }
    }
    // pick one nonzero pivot row per basis map (their supports are disjoint)
    let mut out = Mat::zeros(total, nrows);
    for c in 0..total {
        let r = (0..nrows).find(|&r| b.get(r, c) != 0).expect("nonzero basis map");
        // basis maps have entries ±1 with disjoint supports
        out.set(c, r, b.get(r, c));
    }
    out.normalize(ring)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grp::Group;
    use crate::permod::perm_module;

    fn two_term(group: Arc<Group>, ring: Ring, a: SignedPermModule, b: SignedPermModule, f: Mat) -> Arc<Complex> {
        let d0 = Mat::zeros(0, a.rank());
        Arc::new(Complex::new(group, ring, 0, vec![a, b], vec![d0, f]).unwrap())
    }

    #[test]
    fn unit_map_contracts() {
        let g = Group::trivial();
        let r = Ring::Integers;
        let one = SignedPermModule::trivial(g.clone(), r);
        let c = two_term(g, r, one.clone(), one, Mat::from_rows(&[vec![1]]));
        let res = is_contractible(&c).unwrap();
        let cert = res.certificate().expect("contractible");
        cert.verify().unwrap();
        assert_eq!(cert.h[&0], Mat::from_rows(&[vec![1]]));
    }

    #[test]
    fn multiplication_by_two_does_not() {
        let g = Group::trivial();
        let r = Ring::Integers;
        let one = SignedPermModule::trivial(g.clone(), r);
        let c = two_term(g, r, one.clone(), one, Mat::from_rows(&[vec![2]]));
        match is_contractible(&c).unwrap() {
            Contractibility::NotContractible(Witness::Homology { degree, presentation }) => {
                assert_eq!(degree, 0);
                assert_eq!(presentation.torsion, vec![2]);
                assert_eq!(presentation.rank, 0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn truncated_resolution_is_not_contractible() {
        // Z[C2] --(1-σ)--> Z[C2] --ε--> Z: homology is the norm line on top
        let g = Group::cyclic(2);
        let r = Ring::Integers;
        let one = SignedPermModule::trivial(g.clone(), r);
        let free = perm_module(&g, &g.trivial_subgroup(), r).unwrap();
        let c = Arc::new(
            Complex::new(
                g.clone(),
                r,
                0,
                vec![one.clone(), free.clone(), free],
                vec![Mat::zeros(0, 1), Mat::from_rows(&[vec![1, 1]]), Mat::from_rows(&[vec![1, -1], vec![-1, 1]])],
            )
            .unwrap(),
        );
        let h2 = homology(&c, 2);
        assert_eq!(h2.presentation.rank, 1);
        assert!(!is_contractible(&c).unwrap().is_contractible());
    }

    #[test]
    fn cone_of_identity_contracts() {
        let g = Group::cyclic(3);
        for ring in [Ring::Integers, Ring::PrimeField(3), Ring::Rationals] {
            let free = perm_module(&g, &g.trivial_subgroup(), ring).unwrap();
            let one = SignedPermModule::trivial(g.clone(), ring);
            let x = two_term(g.clone(), ring, one, free, Mat::from_rows(&[vec![1, 1, 1]]));
            let c = Arc::new(crate::chain::cone(&ChainMap::identity(&x)).unwrap());
            let cert = is_contractible(&c).unwrap();
            assert!(cert.is_contractible(), "{ring}");
        }
    }

    #[test]
    fn homology_generators_and_coordinates() {
        let d_out = Mat::zeros(0, 2);
        let d_in = Mat::from_rows(&[vec![2, 0], vec![0, 0]]);
        let h = HomologyGroup::compute(Ring::Integers, &d_in, &d_out);
        assert_eq!(h.presentation.rank, 1);
        assert_eq!(h.presentation.torsion, vec![2]);
        let z = Mat::column(&[3, 0]);
        let c = h.coordinates(&z);
        assert!(!c.is_zero());
        assert!(h.is_zero_class(&Mat::column(&[4, 0])));
        assert_eq!(format!("{}", h.presentation), "Z ⊕ Z/2");
    }

    #[test]
    fn hom_from_unit_into_unit() {
        let g = Group::cyclic(3);
        let u = Arc::new(Complex::unit(g, Ring::Integers));
        assert_eq!(hom_group(&u, 0).presentation.rank, 1);
        for m in [-2, -1, 1, 2] {
            assert!(hom_group(&u, m).presentation.is_zero());
        }
    }

    #[test]
    fn invariants_of_augmentation_target() {
        // Z[C3] --ε--> Z in degrees 1, 0: H_0 of invariants is Z/3 (norm ↦ 3)
        let g = Group::cyclic(3);
        let r = Ring::Integers;
        let free = perm_module(&g, &g.trivial_subgroup(), r).unwrap();
        let one = SignedPermModule::trivial(g.clone(), r);
        let c = Arc::new(Complex::new(g, r, 0, vec![one, free], vec![Mat::zeros(0, 1), Mat::from_rows(&[vec![1, 1, 1]])]).unwrap());
        let h = hom_group(&c, 0);
        assert_eq!(h.presentation.torsion, vec![3]);
        assert_eq!(h.generators.len(), 1);
        h.generators[0].check().unwrap();
        assert!(!h.is_zero_class(&h.generators[0].cycle).unwrap());
        assert!(h.is_zero_class(&h.generators[0].cycle.scale(3, r)).unwrap());
        assert_eq!(chain_maps_modulo_homotopy(&Arc::new(Complex::unit(c.group().clone(), r)), &c).unwrap(), h.presentation);
    }

    #[test]
    fn equivalence_with_shifted_copy() {
        let g = Group::cyclic(2);
        let r = Ring::Integers;
        let free = perm_module(&g, &g.trivial_subgroup(), r).unwrap();
        let one = SignedPermModule::trivial(g.clone(), r);
        // Z[C2] --ε--> Z  ⊕  (Z --1--> Z) versus Z[C2] --ε--> Z
        let x = two_term(g.clone(), r, one.clone(), free.clone(), Mat::from_rows(&[vec![1, 1]]));
        let extra = two_term(g.clone(), r, one.clone(), one.clone(), Mat::from_rows(&[vec![1]]));
        let y = Arc::new(Complex::direct_sum(&[&x, &extra]).unwrap());
        let e = find_homotopy_equivalence(&x, &y).unwrap();
        let e = e.found().expect("equivalent");
        e.verify().unwrap();
        let z = Arc::new(Complex::unit(g, r));
        assert!(matches!(find_homotopy_equivalence(&x, &z).unwrap(), EquivalenceOutcome::Inequivalent(_)));
        assert!(find_homotopy_equivalence(&x, &x).unwrap().is_found());
    }

    #[test]
    fn null_homotopy_of_boundary() {
        let g = Group::cyclic(2);
        let r = Ring::Integers;
        let one = SignedPermModule::trivial(g.clone(), r);
        let x = two_term(g.clone(), r, one.clone(), one.clone(), Mat::from_rows(&[vec![2]]));
        // on Z --2--> Z, 2·id = d h + h d with h = 1, while id is not null-homotopic
        let two = ChainMap::identity(&x).scale(2);
        let h = null_homotopy(&two).unwrap().expect("null-homotopic");
        assert!(h.witnesses(&two));
        assert!(null_homotopy(&ChainMap::identity(&x)).unwrap().is_none());
    }
}
