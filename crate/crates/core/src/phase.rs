//! Exact rational phases.
//!
//! Representation matrices only ever contain roots of unity. Their arguments
//! are kept as integer numerators over an integer denominator, reduced
//! exactly, and turned into a complex number with one exponential call.

use num_complex::Complex64;
use std::f64::consts::TAU;

/// `exp(2πi·num/den)`, with `num` reduced modulo `den` first.
pub fn unit(num: i128, den: u64) -> Complex64 {
    debug_assert!(den > 0);
    let d = den as i128;
    let mut r = num.rem_euclid(d);
    // Centre the residue so the angle has magnitude at most π.
    if 2 * r > d {
        r -= d;
    }
    let (s, c) = (TAU * (r as f64) / (den as f64)).sin_cos();
    Complex64::new(c, s)
}

/// `exp(-2πi·num/den)`.
pub fn unit_neg(num: i128, den: u64) -> Complex64 {
    unit(-num, den)
}

pub fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

pub fn euler_phi(n: u64) -> u64 {
    if n == 1 {
        return 1;
    }
    (1..n).filter(|&c| gcd(c, n) == 1).count() as u64
}

/// Units of `Z/mZ` in increasing order; `{0}` when `m == 1`.
pub fn units(m: u64) -> Vec<u64> {
    if m == 1 {
        return vec![0];
    }
    (1..m).filter(|&c| gcd(c, m) == 1).collect()
}
