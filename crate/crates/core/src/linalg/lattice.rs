//! Row lattices: echelon bases, membership, kernels and quotients.

use super::domain::Domain;
use super::{from_domain, smith_normal_form, to_domain, Mat};
use crate::ring::Ring;
use crate::with_domain;

fn echelon_in<D: Domain>(d: &D, mut rows: Vec<Vec<D::E>>, ncols: usize) -> Vec<Vec<D::E>> {
    let mut out: Vec<Vec<D::E>> = Vec::new();
    for c in 0..ncols {
        // Euclid on column c among the remaining rows
        loop {
            let mut best: Option<usize> = None;
            for (i, r) in rows.iter().enumerate() {
                if !d.is_zero(&r[c]) && best.is_none_or(|b| d.size(&r[c]) < d.size(&rows[b][c])) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            let piv = rows.swap_remove(b);
            let mut done = true;
            for r in rows.iter_mut() {
                if d.is_zero(&r[c]) {
                    continue;
                }
                let (q, _) = d.div_rem(&r[c], &piv[c]);
                for (x, y) in r.iter_mut().zip(&piv) {
                    *x = d.sub(x, &d.mul(&q, y));
                }
                if !d.is_zero(&r[c]) {
                    done = false;
                }
            }
            if done {
                let u = d.canonical_unit(&piv[c]);
                let piv: Vec<D::E> = piv.iter().map(|x| d.mul(&u, x)).collect();
                // reduce earlier pivots' entries above this one
                for r in out.iter_mut() {
                    let (q, _) = d.div_rem(&r[c], &piv[c]);
                    if !d.is_zero(&q) {
                        for (x, y) in r.iter_mut().zip(&piv) {
                            *x = d.sub(x, &d.mul(&q, y));
                        }
                    }
                }
                out.push(piv);
                break;
            }
            rows.push(piv);
        }
        rows.retain(|r| r.iter().any(|x| !d.is_zero(x)));
        if rows.is_empty() {
            break;
        }
    }
    out
}

/// Echelon (Hermite over Z) basis of the row span of `m`; zero rows dropped.
pub fn echelon_rows(m: &Mat, ring: Ring) -> Mat {
    let n = m.cols();
    with_domain!(ring, d => {
        let rows = echelon_in(&d, to_domain(&d, m), n);
        from_domain(&d, rows.len(), n, &rows, ring)
    })
}

/// Whether the row vector `v` lies in the row span of the echelon basis `h`.
pub fn in_row_span(h: &Mat, v: &Mat, ring: Ring) -> bool {
    assert_eq!(v.rows(), 1);
    assert_eq!(h.cols(), v.cols());
    with_domain!(ring, d => {
        let hr = to_domain(&d, h);
        let mut x = to_domain(&d, v).pop().unwrap();
        for r in &hr {
            let Some(c) = r.iter().position(|e| !d.is_zero(e)) else { continue };
            let (q, _) = d.div_rem(&x[c], &r[c]);
            for (a, b) in x.iter_mut().zip(r) {
                *a = d.sub(a, &d.mul(&q, b));
            }
        }
        x.iter().all(|e| d.is_zero(e))
    })
}

/// Columns spanning `{x : A x = 0}`.
pub fn kernel_columns(a: &Mat, ring: Ring) -> Mat {
    let n = a.cols();
    if a.rows() == 0 || a.is_zero() {
        return Mat::identity(n);
    }
    let s = smith_normal_form(a, ring);
    s.q.block(0, n, s.rank, n)
}

/// `{x ∈ R^n : M x ∈ span(diag(orders))}` as echelon rows, where `M` gives
/// coordinates in a group with the given generator orders (0 = free).
pub fn relation_rows(m: &Mat, orders: &[i64], ring: Ring) -> Mat {
    let (g, n) = m.shape();
    assert_eq!(orders.len(), g);
    let tors: Vec<usize> = (0..g).filter(|&i| orders[i] > 0).collect();
    let mut a = Mat::zeros(g, n + tors.len());
    a.set_block(0, 0, m);
    for (k, &i) in tors.iter().enumerate() {
        a.set(i, n + k, orders[i]);
    }
    let a = a.normalize(ring);
    let k = kernel_columns(&a, ring);
    let proj = k.block(0, n, 0, k.cols()).transpose();
    echelon_rows(&proj, ring)
}

/// Invariants of `R^n / rowspan(rel)`: (free rank, torsion orders > 1).
pub fn quotient_invariants(rel: &Mat, n: usize, ring: Ring) -> (usize, Vec<i64>) {
    if rel.rows() == 0 || rel.is_zero() {
        return (n, Vec::new());
    }
    let s = smith_normal_form(rel, ring);
    let tors = if ring == Ring::Integers { s.torsion() } else { Vec::new() };
    (n - s.rank, tors)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_and_membership() {
        let m = Mat::from_rows(&[vec![2, 4], vec![3, 5]]);
        let h = echelon_rows(&m, Ring::Integers);
        assert_eq!(h.rows(), 2);
        assert!(in_row_span(&h, &Mat::from_rows(&[vec![1, 3]]), Ring::Integers));
        assert!(in_row_span(&h, &Mat::from_rows(&[vec![0, 2]]), Ring::Integers));
        assert!(!in_row_span(&h, &Mat::from_rows(&[vec![0, 1]]), Ring::Integers));
        assert!(in_row_span(&echelon_rows(&m, Ring::Rationals), &Mat::from_rows(&[vec![0, 1]]), Ring::Rationals));
    }

    #[test]
    fn relations_modulo_torsion() {
        // one generator of order 3, monomial with coordinate 1
        let r = relation_rows(&Mat::from_rows(&[vec![1]]), &[3], Ring::Integers);
        assert_eq!(r, Mat::from_rows(&[vec![3]]));
        let r = relation_rows(&Mat::from_rows(&[vec![1, 2]]), &[0], Ring::Integers);
        assert_eq!(r.rows(), 1);
        assert!(in_row_span(&r, &Mat::from_rows(&[vec![2, -1]]), Ring::Integers));
        assert_eq!(quotient_invariants(&Mat::from_rows(&[vec![3]]), 1, Ring::Integers), (0, vec![3]));
    }
}
