//! Brute-force reference for `Hom(1, Y[s])` in the homotopy category.
//!
//! Chain maps `1 → Y[s]` are vectors `v ∈ Y_{−s}` with `d v = 0` and
//! `g v = v` for every group element; null-homotopic ones are `d w` with `w`
//! invariant in `Y_{−s+1}`. Everything is solved on full coordinate vectors
//! with invariance imposed as equations, using the elimination below rather
//! than the library's solver.

#![allow(dead_code)]

use ttperm::chain::Complex;
use ttperm::linalg::Mat;
use ttperm::ring::Ring;

type M = Vec<Vec<i128>>;

fn to_rows(m: &Mat) -> M {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j) as i128).collect()).collect()
}

fn matmul(a: &M, b: &M, inner: usize, cols: usize) -> M {
    a.iter().map(|r| (0..cols).map(|j| (0..inner).map(|k| r[k] * b[k][j]).sum()).collect()).collect()
}

/// `P A Q = D`; returns the diagonal, `Q` and `Q⁻¹`.
fn smith_z(mut a: M, m: usize, n: usize) -> (Vec<i128>, M, M) {
    let id = |k: usize| -> M { (0..k).map(|i| (0..k).map(|j| (i == j) as i128).collect()).collect() };
    let (mut q, mut qi) = (id(n), id(n));
    let mut diag = Vec::new();
    let mut t = 0;
    while t < m.min(n) {
        // smallest nonzero entry in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if a[i][j] != 0 && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        a.swap(t, bi);
        for r in a.iter_mut() {
            r.swap(t, bj);
        }
        for r in q.iter_mut() {
            r.swap(t, bj);
        }
        qi.swap(t, bj);
        let mut clean = true;
        for i in t + 1..m {
            let f = a[i][t] / a[t][t];
            if f != 0 {
                for j in t..n {
                    a[i][j] -= f * a[t][j];
                }
            }
            clean &= a[i][t] == 0;
        }
        for j in t + 1..n {
            let f = a[t][j] / a[t][t];
            if f != 0 {
                // column j −= f·column t
                for r in a.iter_mut() {
                    r[j] -= f * r[t];
                }
                for r in q.iter_mut() {
                    r[j] -= f * r[t];
                }
                // inverse: row t += f·row j
                for c in 0..n {
                    qi[t][c] += f * qi[j][c];
                }
            }
            clean &= a[t][j] == 0;
        }
        if !clean {
            continue;
        }
        // divisibility: fold a non-multiple into the pivot row and retry
        let bad = (t + 1..m).flat_map(|i| (t + 1..n).map(move |j| (i, j))).find(|&(i, j)| a[i][j] % a[t][t] != 0);
        if let Some((i, _)) = bad {
            for j in t..n {
                a[t][j] += a[i][j];
            }
            continue;
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    (diag, q, qi)
}

fn rank_mod_p(mut a: M, n: usize, p: i128) -> (usize, M) {
    // returns (rank, kernel basis as columns)
    let m = a.len();
    for r in a.iter_mut() {
        for x in r.iter_mut() {
            *x = x.rem_euclid(p);
        }
    }
    let inv = |x: i128| -> i128 {
        let mut r = 1;
        let (mut b, mut e) = (x, p - 2);
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        r
    };
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..n {
        let Some(pr) = (row..m).find(|&i| a[i][c] != 0) else { continue };
        a.swap(row, pr);
        let s = inv(a[row][c]);
        for x in a[row].iter_mut() {
            *x = *x * s % p;
        }
        for i in 0..m {
            if i != row && a[i][c] != 0 {
                let f = a[i][c];
                for j in 0..n {
                    a[i][j] = (a[i][j] - f * a[row][j]).rem_euclid(p);
                }
            }
        }
        pivots.push(c);
        row += 1;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut kernel: M = vec![vec![0; free.len()]; n];
    for (k, &f) in free.iter().enumerate() {
        kernel[f][k] = 1;
        for (r, &pc) in pivots.iter().enumerate() {
            kernel[pc][k] = (-a[r][f]).rem_euclid(p);
        }
    }
    (pivots.len(), kernel)
}

/// Stack `d` (if any) and `g − 1` for all `g`, acting on degree `n`.
fn constraints(y: &Complex, n: i32, with_d: bool) -> M {
    let r = y.rank(n);
    let mut rows: M = Vec::new();
    if with_d {
        rows.extend(to_rows(&y.d(n)));
    }
    for g in y.group().elements() {
        let mg = to_rows(&y.term(n).matrix_of(g));
        for (i, row) in mg.into_iter().enumerate() {
            let mut row = row;
            row[i] -= 1;
            rows.push(row);
        }
    }
    rows.retain(|r| r.iter().any(|&x| x != 0));
    let _ = r;
    rows
}

/// `(free rank, torsion)` of `Hom(1, Y[s])`, computed from scratch.
pub fn brute_force_hom(y: &Complex, s: i32) -> (usize, Vec<i64>) {
    let n = -s;
    let r = y.rank(n);
    if r == 0 {
        return (0, vec![]);
    }
    let r1 = y.rank(n + 1);
    let cycles = constraints(y, n, true);
    let inv_up = constraints(y, n + 1, false);
    let d_up = to_rows(&y.d(n + 1));
    match y.ring() {
        Ring::PrimeField(p) => {
            let p = p as i128;
            let (rk, _) = rank_mod_p(cycles, r, p);
            let (_, w) = rank_mod_p(inv_up, r1, p);
            let b = if r1 == 0 || w.is_empty() || w[0].is_empty() { vec![] } else { matmul(&d_up, &w, r1, w[0].len()) };
            let b_t: M = if b.is_empty() { vec![] } else { (0..b[0].len()).map(|j| b.iter().map(|row| row[j]).collect()).collect() };
            let (rb, _) = rank_mod_p(b_t, r, p);
            (r - rk - rb, vec![])
        }
        ring => {
            let (da, q, qi) = smith_z(cycles.clone(), cycles.len(), r);
            let ra = da.len();
            let k = r - ra;
            if k == 0 {
                return (0, vec![]);
            }
            // coordinates on the cycle lattice: rows ra.. of Q⁻¹
            let coords: M = qi[ra..].to_vec();
            let _ = q;
            let b_cols: M = if r1 == 0 {
                vec![]
            } else {
                let (dw, wq, _) = smith_z(inv_up.clone(), inv_up.len(), r1);
                let w: M = wq.iter().map(|row| row[dw.len()..].to_vec()).collect();
                let kw = r1 - dw.len();
                if kw == 0 {
                    vec![]
                } else {
                    let b = matmul(&d_up, &w, r1, kw);
                    matmul(&coords, &b, r, kw)
                }
            };
            if b_cols.is_empty() || b_cols[0].is_empty() {
                return (k, vec![]);
            }
            let (db, _, _) = smith_z(b_cols.clone(), k, b_cols[0].len());
            let torsion = if ring == Ring::Integers {
                db.iter().filter(|&&x| x > 1).map(|&x| x as i64).collect()
            } else {
                vec![]
            };
            (k - db.len(), torsion)
        }
    }
}

/// Shifts at which `Hom(1, Y[s])` can be nonzero.
pub fn shifts(y: &Complex) -> std::ops::RangeInclusive<i32> {
    -y.hi()..=-y.lo()
}
