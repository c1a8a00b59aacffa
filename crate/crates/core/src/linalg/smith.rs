//! Smith normal form `P·A·Q = D`, with the inverses of the transforms tracked.

use super::domain::Domain;
use super::{from_domain, to_domain, Mat};
use crate::ring::Ring;
use crate::with_domain;

pub type Rows<E> = Vec<Vec<E>>;

pub struct Smith<D: Domain> {
    pub rank: usize,
    /// Nonzero diagonal entries `d_1 | d_2 | …`, canonical associates.
    pub diag: Vec<D::E>,
    pub p: Rows<D::E>,
    pub pinv: Rows<D::E>,
    pub q: Rows<D::E>,
    pub qinv: Rows<D::E>,
}

fn ident<D: Domain>(d: &D, n: usize) -> Rows<D::E> {
    (0..n).map(|i| (0..n).map(|j| if i == j { d.one() } else { d.zero() }).collect()).collect()
}

struct Work<'a, D: Domain> {
    d: &'a D,
    a: Rows<D::E>,
    p: Rows<D::E>,
    pinv: Rows<D::E>,
    q: Rows<D::E>,
    qinv: Rows<D::E>,
}

impl<D: Domain> Work<'_, D> {
    // row_i += c·row_t
    fn row_add(&mut self, i: usize, t: usize, c: &D::E) {
        let d = self.d;
        for m in [&mut self.a, &mut self.p] {
            let (ri, rt) = two_rows(m, i, t);
            for (x, y) in ri.iter_mut().zip(rt.iter()) {
                if !d.is_zero(y) {
                    *x = d.add(x, &d.mul(c, y));
                }
            }
        }
        for row in self.pinv.iter_mut() {
            if !d.is_zero(&row[i]) {
                row[t] = d.sub(&row[t], &d.mul(c, &row[i]));
            }
        }
    }

    // col_j += c·col_t
    fn col_add(&mut self, j: usize, t: usize, c: &D::E) {
        let d = self.d;
        for m in [&mut self.a, &mut self.q] {
            for row in m.iter_mut() {
                if !d.is_zero(&row[t]) {
                    row[j] = d.add(&row[j], &d.mul(c, &row[t]));
                }
            }
        }
        let (rt, rj) = two_rows(&mut self.qinv, t, j);
        for (x, y) in rt.iter_mut().zip(rj.iter()) {
            if !d.is_zero(y) {
                *x = d.sub(x, &d.mul(c, y));
            }
        }
    }

    fn swap_rows(&mut self, i: usize, t: usize) {
        if i != t {
            self.a.swap(i, t);
            self.p.swap(i, t);
            for row in self.pinv.iter_mut() {
                row.swap(i, t);
            }
        }
    }

    fn swap_cols(&mut self, j: usize, t: usize) {
        if j != t {
            for row in self.a.iter_mut().chain(self.q.iter_mut()) {
                row.swap(j, t);
            }
            self.qinv.swap(j, t);
        }
    }

    fn scale_row(&mut self, t: usize, u: &D::E) {
        let d = self.d;
        let ui = d.unit_inverse(u).expect("canonical unit must be invertible");
        for m in [&mut self.a, &mut self.p] {
            for x in m[t].iter_mut() {
                *x = d.mul(x, u);
            }
        }
        for row in self.pinv.iter_mut() {
            row[t] = d.mul(&row[t], &ui);
        }
    }
}

fn two_rows<E>(m: &mut [Vec<E>], i: usize, t: usize) -> (&mut Vec<E>, &mut Vec<E>) {
    assert_ne!(i, t);
    if i < t {
        let (lo, hi) = m.split_at_mut(t);
        (&mut lo[i], &mut hi[0])
    } else {
        let (lo, hi) = m.split_at_mut(i);
        (&mut hi[0], &mut lo[t])
    }
}

pub fn smith<D: Domain>(d: &D, a: Rows<D::E>, m: usize, n: usize) -> Smith<D> {
    let mut w = Work { d, a, p: ident(d, m), pinv: ident(d, m), q: ident(d, n), qinv: ident(d, n) };
    let mut t = 0;
    while t < m.min(n) {
        let mut best: Option<(u128, usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                let s = d.size(&w.a[i][j]);
                if s > 0 && best.is_none_or(|b| s < b.0) {
                    best = Some((s, i, j));
                }
            }
        }
        let Some((_, bi, bj)) = best else { break };
        w.swap_rows(bi, t);
        w.swap_cols(bj, t);
        loop {
            let mut dirty = false;
            for i in t + 1..m {
                if !d.is_zero(&w.a[i][t]) {
                    let (qt, r) = d.div_rem(&w.a[i][t], &w.a[t][t]);
                    w.row_add(i, t, &d.neg(&qt));
                    dirty |= !d.is_zero(&r);
                }
            }
            if dirty {
                let i = (t + 1..m)
                    .filter(|&i| !d.is_zero(&w.a[i][t]))
                    .min_by_key(|&i| d.size(&w.a[i][t]))
                    .unwrap();
                w.swap_rows(i, t);
                continue;
            }
            for j in t + 1..n {
                if !d.is_zero(&w.a[t][j]) {
                    let (qt, r) = d.div_rem(&w.a[t][j], &w.a[t][t]);
                    w.col_add(j, t, &d.neg(&qt));
                    dirty |= !d.is_zero(&r);
                }
            }
            if dirty {
                let j = (t + 1..n)
                    .filter(|&j| !d.is_zero(&w.a[t][j]))
                    .min_by_key(|&j| d.size(&w.a[t][j]))
                    .unwrap();
                w.swap_cols(j, t);
                continue;
            }
            if !d.is_field() {
                let piv = w.a[t][t].clone();
                let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d.is_zero(&d.div_rem(&w.a[i][j], &piv).1)));
                if let Some(i) = bad {
                    w.row_add(t, i, &d.one());
                    continue;
                }
            }
            break;
        }
        let u = d.canonical_unit(&w.a[t][t]);
        w.scale_row(t, &u);
        t += 1;
    }
    let diag = (0..t).map(|i| w.a[i][i].clone()).collect();
    Smith { rank: t, diag, p: w.p, pinv: w.pinv, q: w.q, qinv: w.qinv }
}

/// `A = U·D·V` with `U`, `V` invertible over the ring and `D` diagonal with `d_1 | d_2 | …`.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: Mat,
    pub d: Mat,
    pub v: Mat,
    /// `u⁻¹`, so that `p·A·q = D`.
    pub p: Mat,
    /// `v⁻¹`.
    pub q: Mat,
    pub rank: usize,
    /// Nonzero diagonal entries (all 1 over a field).
    pub divisors: Vec<i64>,
}

impl SmithForm {
    /// Elementary divisors greater than one.
    pub fn torsion(&self) -> Vec<i64> {
        self.divisors.iter().copied().filter(|&x| x > 1).collect()
    }
}

pub fn smith_normal_form(a: &Mat, ring: Ring) -> SmithForm {
    let (m, n) = a.shape();
    with_domain!(ring, d => {
        let s = smith(&d, to_domain(&d, a), m, n);
        let divisors: Vec<i64> = s.diag.iter().map(|x| {
            let (num, _) = d.to_frac(x);
            i64::try_from(num).expect("elementary divisor overflow")
        }).collect();
        let mut dm = Mat::zeros(m, n);
        for (i, x) in divisors.iter().enumerate() {
            dm.set(i, i, *x);
        }
        let u = from_domain(&d, m, m, &s.pinv, ring);
        let v = from_domain(&d, n, n, &s.qinv, ring);
        let p = from_domain(&d, m, m, &s.p, ring);
        let q = from_domain(&d, n, n, &s.q, ring);
        debug_assert_eq!(u.mul(&dm, ring).mul(&v, ring), a.clone().normalize(ring), "Smith re-multiplication");
        SmithForm { u, d: dm, v, p, q, rank: s.rank, divisors }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_cases() {
        let f = smith_normal_form(&Mat::identity(3), Ring::Integers);
        assert_eq!(f.divisors, vec![1, 1, 1]);
        let f = smith_normal_form(&Mat::from_rows(&[vec![2]]), Ring::Integers);
        assert_eq!(f.divisors, vec![2]);
        let f = smith_normal_form(&Mat::from_rows(&[vec![2, 4], vec![6, 8]]), Ring::Integers);
        assert_eq!(f.divisors, vec![2, 4]);
    }

    #[test]
    fn field_rank() {
        let a = Mat::from_rows(&[vec![2, 4], vec![6, 8]]);
        assert_eq!(smith_normal_form(&a, Ring::PrimeField(2)).rank, 0);
        assert_eq!(smith_normal_form(&a, Ring::PrimeField(3)).rank, 2);
        assert_eq!(smith_normal_form(&Mat::from_rows(&[vec![1, 2], vec![2, 4]]), Ring::PrimeField(5)).rank, 1);
        assert_eq!(smith_normal_form(&a, Ring::Rationals).rank, 2);
    }

    // determinant up to sign equals the product of divisors for square nonsingular input
    fn det(a: &[Vec<i64>]) -> i128 {
        let n = a.len();
        if n == 0 {
            return 1;
        }
        let mut total = 0i128;
        for j in 0..n {
            let minor: Vec<Vec<i64>> =
                a[1..].iter().map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &x)| x).collect()).collect();
            let s = if j % 2 == 0 { 1 } else { -1 };
            total += s * a[0][j] as i128 * det(&minor);
        }
        total
    }

    proptest! {
        #[test]
        fn remultiplies(rows in 1usize..5, cols in 1usize..5, seed in prop::collection::vec(-6i64..7, 25)) {
            let a = Mat::from_fn(rows, cols, |i, j| seed[i * 5 + j]);
            for ring in [Ring::Integers, Ring::Rationals, Ring::PrimeField(3)] {
                let f = smith_normal_form(&a, ring);
                prop_assert_eq!(f.u.mul(&f.d, ring).mul(&f.v, ring), a.clone().normalize(ring));
                prop_assert_eq!(f.p.mul(&a, ring).mul(&f.q, ring), f.d.clone());
                prop_assert_eq!(f.p.mul(&f.u, ring), Mat::identity(rows));
                for w in f.divisors.windows(2) {
                    prop_assert_eq!(w[1] % w[0], 0);
                }
            }
        }

        #[test]
        fn divisor_product_is_determinant(seed in prop::collection::vec(-5i64..6, 9)) {
            let rows: Vec<Vec<i64>> = seed.chunks(3).map(|c| c.to_vec()).collect();
            let dt = det(&rows);
            let f = smith_normal_form(&Mat::from_rows(&rows), Ring::Integers);
            if dt == 0 {
                prop_assert!(f.rank < 3);
            } else {
                let prod: i128 = f.divisors.iter().map(|&x| x as i128).product();
                prop_assert_eq!(prod, dt.abs());
            }
        }
    }
}
