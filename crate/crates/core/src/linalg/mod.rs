//! Exact dense matrices, Smith normal form and a sparse exact solver.

pub mod domain;
pub mod smith;
pub mod lattice;
pub mod sparse;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

use crate::ring::{inv_mod, Ring};

pub use smith::{smith_normal_form, SmithForm};

/// Dense matrix with integer numerators over a common positive denominator.
///
/// Over Z and F_p the denominator is always 1 after [`Mat::normalize`];
/// over F_p entries are kept in `0..p`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
    den: i64,
}

fn narrow(x: i128) -> i64 {
    i64::try_from(x).expect("integer overflow in exact arithmetic")
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat { rows, cols, data: vec![0; rows * cols], den: 1 }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> i64) -> Mat {
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Mat {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Mat { rows: r, cols: c, data: rows.concat(), den: 1 }
    }

    pub fn from_parts(rows: usize, cols: usize, data: Vec<i64>, den: i64) -> Mat {
        assert_eq!(data.len(), rows * cols);
        assert!(den > 0);
        Mat { rows, cols, data, den }
    }

    /// Reinterpret the numerators over a new common denominator.
    pub fn with_den(mut self, den: i64) -> Mat {
        assert!(den > 0);
        self.den = den;
        self
    }

    pub fn column(v: &[i64]) -> Mat {
        Mat { rows: v.len(), cols: 1, data: v.to_vec(), den: 1 }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn den(&self) -> i64 {
        self.den
    }
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Numerator of entry (i, j).
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn add_at(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] += v;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col_vec(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_integral(&self) -> bool {
        self.den == 1
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().filter(|&&x| x != 0).count()
    }

    /// Entry as a reduced fraction.
    pub fn frac(&self, i: usize, j: usize) -> (i64, i64) {
        let n = self.get(i, j);
        let g = n.gcd(&self.den);
        if g == 0 {
            (0, 1)
        } else {
            (n / g, self.den / g)
        }
    }

    /// Bring entries into canonical form for `ring`.
    pub fn normalize(mut self, ring: Ring) -> Mat {
        match ring {
            Ring::PrimeField(p) => {
                let p = p as i128;
                let s = if self.den == 1 { 1 } else { inv_mod(self.den as i128, p) };
                for x in &mut self.data {
                    *x = ((*x as i128 * s).rem_euclid(p)) as i64;
                }
                self.den = 1;
            }
            Ring::Rationals => {
                let g = self.data.iter().fold(self.den, |g, x| g.gcd(x));
                if g > 1 {
                    for x in &mut self.data {
                        *x /= g;
                    }
                    self.den /= g;
                }
            }
            Ring::Integers => assert_eq!(self.den, 1, "non-integral matrix over Z"),
        }
        self
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        t.den = self.den;
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    pub fn mul(&self, other: &Mat, ring: Ring) -> Mat {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let (n, m) = (self.rows, other.cols);
        let mut acc = vec![0i128; n * m];
        for i in 0..n {
            let out = &mut acc[i * m..(i + 1) * m];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k] as i128;
                if a == 0 {
                    continue;
                }
                let brow = &other.data[k * m..(k + 1) * m];
                for (o, &b) in out.iter_mut().zip(brow) {
                    if b != 0 {
                        *o += a * b as i128;
                    }
                }
            }
            if let Ring::PrimeField(p) = ring {
                for o in out.iter_mut() {
                    *o = o.rem_euclid(p as i128);
                }
            }
        }
        let den = narrow(self.den as i128 * other.den as i128);
        Mat { rows: n, cols: m, data: acc.into_iter().map(narrow).collect(), den }.normalize(ring)
    }

    fn combine(&self, other: &Mat, ring: Ring, sign: i64) -> Mat {
        assert_eq!(self.shape(), other.shape(), "shape mismatch in sum");
        let den = self.den.lcm(&other.den);
        let (sa, sb) = ((den / self.den) as i128, (den / other.den) as i128 * sign as i128);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| narrow(a as i128 * sa + b as i128 * sb))
            .collect();
        Mat { rows: self.rows, cols: self.cols, data, den }.normalize(ring)
    }

    pub fn add(&self, other: &Mat, ring: Ring) -> Mat {
        self.combine(other, ring, 1)
    }

    pub fn sub(&self, other: &Mat, ring: Ring) -> Mat {
        self.combine(other, ring, -1)
    }

    pub fn scale(&self, c: i64, ring: Ring) -> Mat {
        let data = self.data.iter().map(|&x| narrow(x as i128 * c as i128)).collect();
        Mat { rows: self.rows, cols: self.cols, data, den: self.den }.normalize(ring)
    }

    pub fn neg(&self, ring: Ring) -> Mat {
        self.scale(-1, ring)
    }

    /// Apply to an integral column vector.
    pub fn apply(&self, v: &[i64], ring: Ring) -> Vec<i64> {
        assert_eq!(v.len(), self.cols);
        assert!(self.den == 1, "apply needs an integral matrix");
        (0..self.rows)
            .map(|i| {
                let s: i128 = self.row(i).iter().zip(v).map(|(&a, &b)| a as i128 * b as i128).sum();
                narrow(ring.reduce128(s))
            })
            .collect()
    }

    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Mat {
        let mut m = Mat::from_fn(r1 - r0, c1 - c0, |i, j| self.get(r0 + i, c0 + j));
        m.den = self.den;
        m
    }

    /// Write `b` into `self` at offset (r0, c0); both must be integral or share the denominator.
    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Mat) {
        if b.den != self.den {
            let den = self.den.lcm(&b.den);
            let s = den / self.den;
            for x in &mut self.data {
                *x = narrow(*x as i128 * s as i128);
            }
            self.den = den;
        }
        let s = self.den / b.den;
        for i in 0..b.rows {
            for j in 0..b.cols {
                self.data[(r0 + i) * self.cols + c0 + j] = narrow(b.get(i, j) as i128 * s as i128);
            }
        }
    }

    pub fn block_diag(blocks: &[&Mat]) -> Mat {
        let r = blocks.iter().map(|b| b.rows).sum();
        let c = blocks.iter().map(|b| b.cols).sum();
        let mut m = Mat::zeros(r, c);
        let (mut i, mut j) = (0, 0);
        for b in blocks {
            m.set_block(i, j, b);
            i += b.rows;
            j += b.cols;
        }
        m
    }

    /// Kronecker product `a ⊗ b` with the row/column index `(i, k) ↦ i·rows(b) + k`.
    pub fn kron(a: &Mat, b: &Mat, ring: Ring) -> Mat {
        let mut m = Mat::zeros(a.rows * b.rows, a.cols * b.cols);
        for i in 0..a.rows {
            for j in 0..a.cols {
                let x = a.get(i, j);
                if x == 0 {
                    continue;
                }
                for k in 0..b.rows {
                    for l in 0..b.cols {
                        let y = b.get(k, l);
                        if y != 0 {
                            m.set(i * b.rows + k, j * b.cols + l, narrow(x as i128 * y as i128));
                        }
                    }
                }
            }
        }
        m.den = narrow(a.den as i128 * b.den as i128);
        m.normalize(ring)
    }

    /// Reduce an integral matrix into `ring` (base change).
    pub fn base_change(&self, ring: Ring) -> Mat {
        self.clone().normalize(ring)
    }

    fn entry_string(&self, i: usize, j: usize) -> String {
        let (n, d) = self.frac(i, j);
        if d == 1 {
            n.to_string()
        } else {
            format!("{n}/{d}")
        }
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.entry_string(i, j)).collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Entry {
    Int(i64),
    Frac(String),
}

#[derive(Serialize, Deserialize)]
struct MatRepr {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<Entry>>,
}

impl Serialize for Mat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let entries = (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| match self.frac(i, j) {
                        (n, 1) => Entry::Int(n),
                        (n, d) => Entry::Frac(format!("{n}/{d}")),
                    })
                    .collect()
            })
            .collect();
        MatRepr { rows: self.rows, cols: self.cols, entries }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Mat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Mat, D::Error> {
        use serde::de::Error as _;
        let r = MatRepr::deserialize(d)?;
        let mut fr = Vec::with_capacity(r.rows * r.cols);
        for row in &r.entries {
            if row.len() != r.cols {
                return Err(D::Error::custom("ragged matrix"));
            }
            for e in row {
                fr.push(match e {
                    Entry::Int(n) => (*n, 1i64),
                    Entry::Frac(s) => {
                        let (a, b) = s.split_once('/').ok_or_else(|| D::Error::custom("bad fraction"))?;
                        let a: i64 = a.trim().parse().map_err(D::Error::custom)?;
                        let b: i64 = b.trim().parse().map_err(D::Error::custom)?;
                        if b <= 0 {
                            return Err(D::Error::custom("bad denominator"));
                        }
                        (a, b)
                    }
                });
            }
        }
        if fr.len() != r.rows * r.cols {
            return Err(D::Error::custom("row count mismatch"));
        }
        let den = fr.iter().fold(1i64, |l, (_, b)| l.lcm(b));
        let data = fr.iter().map(|(a, b)| a * (den / b)).collect();
        Ok(Mat { rows: r.rows, cols: r.cols, data, den })
    }
}

/// Convert a matrix into rows of domain elements.
pub fn to_domain<D: domain::Domain>(d: &D, m: &Mat) -> Vec<Vec<D::E>> {
    (0..m.rows).map(|i| (0..m.cols).map(|j| d.from_frac(m.get(i, j), m.den)).collect()).collect()
}

pub fn from_domain<D: domain::Domain>(d: &D, rows: usize, cols: usize, m: &[Vec<D::E>], ring: Ring) -> Mat {
    let flat: Vec<D::E> = m.iter().flat_map(|r| r.iter().cloned()).collect();
    let (data, den) = domain::to_int_vec(d, &flat);
    Mat { rows, cols, data, den }.normalize(ring)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_sum() {
        let a = Mat::from_rows(&[vec![1, 2], vec![3, 4]]);
        let b = Mat::from_rows(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(a.mul(&b, Ring::Integers), Mat::from_rows(&[vec![2, 1], vec![4, 3]]));
        assert_eq!(a.mul(&b, Ring::PrimeField(3)), Mat::from_rows(&[vec![2, 1], vec![1, 0]]));
        assert!(a.sub(&a, Ring::Integers).is_zero());
    }

    #[test]
    fn rational_normalization() {
        let h = Mat::from_parts(1, 2, vec![2, 4], 4).normalize(Ring::Rationals);
        assert_eq!(h.den(), 2);
        assert_eq!(h.frac(0, 0), (1, 2));
        let two = Mat::from_rows(&[vec![2]]);
        assert_eq!(two.mul(&h, Ring::Rationals), Mat::from_rows(&[vec![1, 2]]));
    }

    #[test]
    fn json_roundtrip() {
        let h = Mat::from_parts(2, 2, vec![1, 0, 3, 2], 2);
        let s = serde_json::to_string(&h).unwrap();
        assert!(s.contains("\"1/2\""));
        let back: Mat = serde_json::from_str(&s).unwrap();
        assert_eq!(back.normalize(Ring::Rationals), h.normalize(Ring::Rationals));
    }

    #[test]
    fn kron_shape() {
        let a = Mat::from_rows(&[vec![1, -1]]);
        let b = Mat::identity(2);
        let k = Mat::kron(&a, &b, Ring::Integers);
        assert_eq!(k, Mat::from_rows(&[vec![1, 0, -1, 0], vec![0, 1, 0, -1]]));
    }
}
