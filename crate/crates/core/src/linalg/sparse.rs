//! Sparse exact solver for `A·x = b` with several right-hand sides.
//!
//! Unit pivots are eliminated sparsely (over a field every nonzero entry is a
//! unit); whatever remains over Z is handed to the dense Smith form.

use std::collections::BTreeSet;

use super::domain::Domain;
use super::smith::smith;

pub struct SparseSystem<D: Domain> {
    d: D,
    ncols: usize,
    nrhs: usize,
    rows: Vec<Vec<(usize, D::E)>>,
    rhs: Vec<Vec<D::E>>,
}

fn merge_axpy<D: Domain>(d: &D, x: &[(usize, D::E)], f: &D::E, y: &[(usize, D::E)]) -> Vec<(usize, D::E)> {
    // x - f·y, sorted by column
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        if j == y.len() || (i < x.len() && x[i].0 < y[j].0) {
            out.push(x[i].clone());
            i += 1;
        } else if i == x.len() || y[j].0 < x[i].0 {
            out.push((y[j].0, d.neg(&d.mul(f, &y[j].1))));
            j += 1;
        } else {
            let v = d.sub(&x[i].1, &d.mul(f, &y[j].1));
            if !d.is_zero(&v) {
                out.push((x[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

impl<D: Domain> SparseSystem<D> {
    pub fn new(d: D, ncols: usize, nrhs: usize) -> Self {
        SparseSystem { d, ncols, nrhs, rows: Vec::new(), rhs: Vec::new() }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    /// Add an equation `Σ coeffs·x = rhs` (duplicate columns are summed).
    pub fn push(&mut self, mut coeffs: Vec<(usize, D::E)>, rhs: Vec<D::E>) {
        assert_eq!(rhs.len(), self.nrhs);
        coeffs.sort_by_key(|c| c.0);
        let mut row: Vec<(usize, D::E)> = Vec::with_capacity(coeffs.len());
        for (c, v) in coeffs {
            assert!(c < self.ncols);
            match row.last_mut() {
                Some(last) if last.0 == c => last.1 = self.d.add(&last.1, &v),
                _ => row.push((c, v)),
            }
        }
        row.retain(|(_, v)| !self.d.is_zero(v));
        self.rows.push(row);
        self.rhs.push(rhs);
    }

    /// One solution per right-hand side, or `None` where inconsistent.
    pub fn solve(self) -> Vec<Option<Vec<D::E>>> {
        let SparseSystem { d, ncols, nrhs, mut rows, mut rhs } = self;
        let nr = rows.len();
        let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); ncols];
        for (r, row) in rows.iter().enumerate() {
            for (c, _) in row {
                col_rows[*c].insert(r);
            }
        }
        let mut active = vec![true; nr];
        let mut pivots: Vec<(usize, usize, D::E)> = Vec::new(); // (row, col, inverse of pivot)

        let mut order: Vec<usize> = (0..nr).collect();
        order.sort_by_key(|&r| rows[r].len());
        let mut progress = true;
        while progress {
            progress = false;
            for &r in &order {
                if !active[r] || rows[r].is_empty() {
                    continue;
                }
                let cand = rows[r]
                    .iter()
                    .filter_map(|(c, v)| d.unit_inverse(v).map(|inv| (col_rows[*c].len(), *c, inv)))
                    .min_by_key(|x| (x.0, x.1));
                let Some((_, c, inv)) = cand else { continue };
                progress = true;
                active[r] = false;
                for (cc, _) in &rows[r] {
                    col_rows[*cc].remove(&r);
                }
                let others: Vec<usize> = col_rows[c].iter().copied().collect();
                let prow = rows[r].clone();
                let prhs = rhs[r].clone();
                for r2 in others {
                    let a = rows[r2].iter().find(|x| x.0 == c).unwrap().1.clone();
                    let f = d.mul(&a, &inv);
                    let new = merge_axpy(&d, &rows[r2], &f, &prow);
                    for (cc, _) in &rows[r2] {
                        col_rows[*cc].remove(&r2);
                    }
                    for (cc, _) in &new {
                        col_rows[*cc].insert(r2);
                    }
                    rows[r2] = new;
                    for k in 0..nrhs {
                        if !d.is_zero(&prhs[k]) {
                            rhs[r2][k] = d.sub(&rhs[r2][k], &d.mul(&f, &prhs[k]));
                        }
                    }
                }
                pivots.push((r, c, inv));
            }
        }

        let mut sol: Vec<Option<Vec<D::E>>> = (0..nrhs).map(|_| Some(vec![d.zero(); ncols])).collect();
        // remaining rows: zero rows must have zero rhs, the rest go dense
        let rest: Vec<usize> = (0..nr).filter(|&r| active[r]).collect();
        for &r in &rest {
            if rows[r].is_empty() {
                for k in 0..nrhs {
                    if !d.is_zero(&rhs[r][k]) {
                        sol[k] = None;
                    }
                }
            }
        }
        let dense_rows: Vec<usize> = rest.iter().copied().filter(|&r| !rows[r].is_empty()).collect();
        if !dense_rows.is_empty() {
            let cols: Vec<usize> =
                dense_rows.iter().flat_map(|&r| rows[r].iter().map(|x| x.0)).collect::<BTreeSet<_>>().into_iter().collect();
            let (m, n) = (dense_rows.len(), cols.len());
            let pos = |c: usize| cols.binary_search(&c).unwrap();
            let mut a = vec![vec![d.zero(); n]; m];
            for (i, &r) in dense_rows.iter().enumerate() {
                for (c, v) in &rows[r] {
                    a[i][pos(*c)] = v.clone();
                }
            }
            let s = smith(&d, a, m, n);
            for k in 0..nrhs {
                if sol[k].is_none() {
                    continue;
                }
                let b: Vec<D::E> = dense_rows.iter().map(|&r| rhs[r][k].clone()).collect();
                let y: Vec<D::E> = (0..m)
                    .map(|i| (0..m).fold(d.zero(), |acc, j| if d.is_zero(&s.p[i][j]) { acc } else { d.add(&acc, &d.mul(&s.p[i][j], &b[j])) }))
                    .collect();
                let mut z = vec![d.zero(); n];
                let mut ok = true;
                for i in 0..m {
                    if i < s.rank {
                        let (q, rem) = d.div_rem(&y[i], &s.diag[i]);
                        if !d.is_zero(&rem) {
                            ok = false;
                            break;
                        }
                        z[i] = q;
                    } else if !d.is_zero(&y[i]) {
                        ok = false;
                        break;
                    }
                }
                if !ok {
                    sol[k] = None;
                    continue;
                }
                let x = sol[k].as_mut().unwrap();
                for (j, &c) in cols.iter().enumerate() {
                    x[c] = (0..n).fold(d.zero(), |acc, i| if d.is_zero(&z[i]) { acc } else { d.add(&acc, &d.mul(&s.q[j][i], &z[i])) });
                }
            }
        }
        // back substitution through the pivots in reverse order
        for (k, x) in sol.iter_mut().enumerate() {
            let Some(x) = x else { continue };
            for (r, c, inv) in pivots.iter().rev() {
                let mut acc = rhs[*r][k].clone();
                for (cc, v) in &rows[*r] {
                    if cc != c && !d.is_zero(&x[*cc]) {
                        acc = d.sub(&acc, &d.mul(v, &x[*cc]));
                    }
                }
                x[*c] = d.mul(&acc, inv);
            }
        }
        sol
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::domain::{Fp, QQ, ZZ};
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn check_z(a: &[Vec<i64>], b: &[i64]) -> Option<Vec<i128>> {
        let mut s = SparseSystem::new(ZZ, a[0].len(), 1);
        for (row, &bb) in a.iter().zip(b) {
            s.push(row.iter().enumerate().map(|(j, &v)| (j, v as i128)).collect(), vec![bb as i128]);
        }
        let x = s.solve().pop().unwrap()?;
        for (row, &bb) in a.iter().zip(b) {
            let lhs: i128 = row.iter().zip(&x).map(|(&v, y)| v as i128 * y).sum();
            assert_eq!(lhs, bb as i128);
        }
        Some(x)
    }

    #[test]
    fn integer_obstruction() {
        assert!(check_z(&[vec![2]], &[1]).is_none());
        assert!(check_z(&[vec![2]], &[4]).is_some());
        assert!(check_z(&[vec![2, 3]], &[1]).is_some());
        assert!(check_z(&[vec![2, 4], vec![6, 8]], &[2, 2]).is_some());
        assert!(check_z(&[vec![2, 4], vec![6, 8]], &[1, 2]).is_none());
        assert!(check_z(&[vec![0, 0]], &[1]).is_none());
    }

    #[test]
    fn fields() {
        let mut s = SparseSystem::new(Fp(2), 1, 1);
        s.push(vec![(0, 0)], vec![1]);
        assert!(s.solve()[0].is_none());
        let mut s = SparseSystem::new(QQ, 1, 1);
        s.push(vec![(0, BigRational::from_integer(2.into()))], vec![BigRational::from_integer(1.into())]);
        let x = s.solve().pop().unwrap().unwrap();
        assert_eq!(x[0], BigRational::new(1.into(), 2.into()));
    }

    proptest! {
        // consistent systems built from a known solution are always solved
        #[test]
        fn consistent_z(rows in 1usize..6, cols in 1usize..6, seed in prop::collection::vec(-3i64..4, 36), xs in prop::collection::vec(-3i64..4, 6)) {
            let a: Vec<Vec<i64>> = (0..rows).map(|i| (0..cols).map(|j| seed[i * 6 + j]).collect()).collect();
            let b: Vec<i64> = a.iter().map(|r| r.iter().zip(&xs).map(|(p, q)| p * q).sum()).collect();
            prop_assert!(check_z(&a, &b).is_some());
        }

        #[test]
        fn consistent_fp(rows in 1usize..6, cols in 1usize..6, seed in prop::collection::vec(0i128..5, 36), xs in prop::collection::vec(0i128..5, 6)) {
            let d = Fp(5);
            let mut s = SparseSystem::new(d, cols, 1);
            let mut eqs = Vec::new();
            for i in 0..rows {
                let row: Vec<(usize, i128)> = (0..cols).map(|j| (j, seed[i * 6 + j])).collect();
                let b = row.iter().map(|(j, v)| v * xs[*j]).sum::<i128>() % 5;
                eqs.push((row.clone(), b));
                s.push(row, vec![b]);
            }
            let x = s.solve().pop().unwrap().unwrap();
            for (row, b) in eqs {
                prop_assert_eq!(row.iter().map(|(j, v)| v * x[*j]).sum::<i128>() % 5, b);
            }
        }
    }
}
