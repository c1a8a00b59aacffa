//! Smith normal form over Z and F_p, and the homology it computes.

use ttperm::linalg::{smith_normal_form, Mat};
use ttperm::ring::Ring;

fn main() {
    let a = Mat::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
    for ring in [Ring::Integers, Ring::Rationals, Ring::PrimeField(2), Ring::PrimeField(3)] {
        let s = smith_normal_form(&a, ring);
        // p·A·q = D
        let check = s.p.mul(&a, ring).mul(&s.q, ring) == s.d;
        println!("{ring}: rank {} divisors {:?} (p·A·q = D: {check})", s.rank, s.divisors);
    }
}
