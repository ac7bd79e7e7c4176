//! Adaptive Romberg integration for complex-valued integrands.

use crate::error::{Error, Result};
use num_complex::Complex64;

const LEVELS: usize = 10;
const MAX_DEPTH: u32 = 24;

/// Romberg table on `[a, b]` up to `LEVELS` halvings. Returns the
/// extrapolated value and whether successive diagonals agreed within `tol`.
fn romberg_fixed<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, tol: f64) -> (Complex64, bool) {
    let mut prev: Vec<Complex64> = vec![(f(a) + f(b)) * (0.5 * (b - a))];
    for i in 1..LEVELS {
        let n = 1usize << i;
        let h = (b - a) / n as f64;
        let mut mid = Complex64::new(0.0, 0.0);
        for k in (1..n).step_by(2) {
            mid += f(a + k as f64 * h);
        }
        let mut row = Vec::with_capacity(i + 1);
        row.push(prev[0] * 0.5 + mid * h);
        let mut pow4 = 1.0;
        for j in 1..=i {
            pow4 *= 4.0;
            let r = row[j - 1] + (row[j - 1] - prev[j - 1]) / (pow4 - 1.0);
            row.push(r);
        }
        if i >= 4 && (row[i] - prev[i - 1]).norm() <= tol {
            return (row[i], true);
        }
        prev = row;
    }
    (prev[LEVELS - 1], false)
}

fn adaptive<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> Result<Complex64> {
    let (v, ok) = romberg_fixed(f, a, b, tol);
    if ok {
        return Ok(v);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::Numerical(format!("quadrature on [{a}, {b}] did not reach tolerance {tol}")));
    }
    let mid = 0.5 * (a + b);
    Ok(adaptive(f, a, mid, 0.5 * tol, depth + 1)? + adaptive(f, mid, b, 0.5 * tol, depth + 1)?)
}

/// `∫_a^b f` to absolute tolerance `tol`, splitting at the given interior
/// breakpoints (kinks of the integrand).
pub fn integrate<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, breakpoints: &[f64], tol: f64) -> Result<Complex64> {
    if !(b > a) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut pts: Vec<f64> = std::iter::once(a)
        .chain(breakpoints.iter().copied().filter(|&x| x > a && x < b))
        .chain(std::iter::once(b))
        .collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let pieces = (pts.len() - 1) as f64;
    let mut total = Complex64::new(0.0, 0.0);
    for w in pts.windows(2) {
        total += adaptive(f, w[0], w[1], tol / pieces, 0)?;
    }
    Ok(total)
}
