//! Discretize-then-refine experiments.
//!
//! * Euclidean: the lattice `Z^r ⊂ R^d` seen through the tori
//!   `((1/M)Z/NZ)^d`, whose rescaled DFT at a dual point `λ` tends to the
//!   averaged Fourier transform of `δ_{Z^r}` (1 if `λ_1..λ_r` are integers, else 0).
//! * Heisenberg: integer points `(x,y,z) ∈ [-N/2, N/2)^3` acting on functions
//!   on the grid `(1/(km))Z ∩ [-m/2, m/2)` by
//!   `(π(x,y,z)f)(j) = e(ax+by)·e(c(yj+z)/m)·f(j+x)`, `e(t) = exp(2πi t)`,
//!   with `f` periodized with period `m`. The weak pairing
//!   `(1/(km·N³)) Σ_p Σ_j (π(p)φ)(j)·conj ψ(j)` is compared against the
//!   continuum pairing `(1/N³) Σ_p ∫ e(ax+by)·e(λ(yu+z))·φ(u+x)·conj ψ(u) du`
//!   computed by quadrature, with `c/m → λ`.

use crate::error::{domain, precondition, Error, Result};
use crate::exec::{try_map_indexed, ExecPolicy};
use crate::group::{FiniteGroup, GroupElement, GroupSpec, Subgroup, SubgroupKind};
use crate::phase::{gcd, unit, unit_neg};
use crate::quadrature::integrate;
use crate::repr::{Irrep, IrrepLabel};
use crate::rng::TrialSeed;
use crate::spectra::accumulate;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal as NormalCdf};
use std::f64::consts::TAU;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn e(t: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * t)
}

/// Compactly supported test functions on the real line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TestFunction {
    /// `max(0, 1 − |u − center|/radius)`.
    Triangle { center: f64, radius: f64 },
    /// `exp(1 − 1/(1 − s²))` for `s = (u − center)/radius`, `|s| < 1`.
    SmoothBump { center: f64, radius: f64 },
    /// Linear combination with complex coefficients.
    Combination { terms: Vec<Term> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub re: f64,
    pub im: f64,
    pub function: TestFunction,
}

impl TestFunction {
    pub fn eval(&self, u: f64) -> Complex64 {
        match self {
            TestFunction::Triangle { center, radius } => {
                Complex64::new((1.0 - (u - center).abs() / radius).max(0.0), 0.0)
            }
            TestFunction::SmoothBump { center, radius } => {
                let s = (u - center) / radius;
                if s.abs() < 1.0 {
                    Complex64::new((1.0 - 1.0 / (1.0 - s * s)).exp(), 0.0)
                } else {
                    ZERO
                }
            }
            TestFunction::Combination { terms } => {
                terms.iter().map(|t| Complex64::new(t.re, t.im) * t.function.eval(u)).sum()
            }
        }
    }

    /// Closed interval outside of which the function vanishes.
    pub fn support(&self) -> (f64, f64) {
        match self {
            TestFunction::Triangle { center, radius } | TestFunction::SmoothBump { center, radius } => {
                (center - radius, center + radius)
            }
            TestFunction::Combination { terms } => terms
                .iter()
                .map(|t| t.function.support())
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (c, d)| (a.min(c), b.max(d))),
        }
    }

    /// Points where the function fails to be smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            TestFunction::Triangle { center, radius } => vec![center - radius, *center, center + radius],
            TestFunction::SmoothBump { center, radius } => vec![center - radius, center + radius],
            TestFunction::Combination { terms } => terms.iter().flat_map(|t| t.function.breakpoints()).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            TestFunction::Triangle { center, radius } | TestFunction::SmoothBump { center, radius } => {
                if !(radius.is_finite() && *radius > 0.0 && center.is_finite()) {
                    return Err(domain!("test function needs a finite centre and a positive radius"));
                }
                Ok(())
            }
            TestFunction::Combination { terms } => {
                if terms.is_empty() {
                    return Err(domain!("empty combination"));
                }
                terms.iter().try_for_each(|t| t.function.validate())
            }
        }
    }

    /// Samples on the grid `T/(km)` for centred `T ∈ [-L/2, L/2)`, `L = km·m`;
    /// index `i` holds `T = i − ⌊L/2⌋`. Fails if the support leaves `[-m/2, m/2]`.
    fn grid_table(&self, km: u64, m: u64) -> Result<Vec<Complex64>> {
        self.validate()?;
        let (lo, hi) = self.support();
        let half = m as f64 / 2.0;
        if lo < -half - 1e-12 || hi > half + 1e-12 {
            return Err(domain!("test function support [{lo}, {hi}] exceeds the window [-{half}, {half}]"));
        }
        let l = km * m;
        let t0 = -((l / 2) as i64);
        Ok((0..l).map(|i| self.eval((t0 + i as i64) as f64 / km as f64)).collect())
    }
}

/// One-dimensional law for a coordinate of continuum noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoordLaw {
    Dirac { at: f64 },
    Uniform { lo: f64, hi: f64 },
    Gaussian { mean: f64, sigma: f64 },
}

impl CoordLaw {
    fn validate(&self) -> Result<()> {
        let ok = match self {
            CoordLaw::Dirac { at } => at.is_finite(),
            CoordLaw::Uniform { lo, hi } => lo.is_finite() && hi.is_finite() && lo < hi,
            CoordLaw::Gaussian { mean, sigma } => mean.is_finite() && sigma.is_finite() && *sigma > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(domain!("invalid coordinate law {self:?}"))
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            CoordLaw::Dirac { at } => *at,
            CoordLaw::Uniform { lo, hi } => rng.random_range(*lo..*hi),
            CoordLaw::Gaussian { mean, sigma } => Normal::new(*mean, *sigma).expect("validated").sample(rng),
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        match self {
            CoordLaw::Dirac { at } => {
                if x >= *at {
                    1.0
                } else {
                    0.0
                }
            }
            CoordLaw::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            CoordLaw::Gaussian { mean, sigma } => NormalCdf::new(*mean, *sigma).expect("validated").cdf(x),
        }
    }

    fn effective_range(&self) -> (f64, f64) {
        match self {
            CoordLaw::Dirac { at } => (*at, *at),
            CoordLaw::Uniform { lo, hi } => (*lo, *hi),
            CoordLaw::Gaussian { mean, sigma } => (mean - 12.0 * sigma, mean + 12.0 * sigma),
        }
    }
}

/// Product noise on `R^d` with independent coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuumNoise {
    pub coords: Vec<CoordLaw>,
    /// Declared exponent `p` with `E|ξ|^p < ∞`.
    pub moment_exponent: f64,
}

impl ContinuumNoise {
    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.coords.len() != dim {
            return Err(domain!("noise has {} coordinates, expected {dim}", self.coords.len()));
        }
        if !(self.moment_exponent > 0.0) {
            return Err(domain!("moment exponent must be positive"));
        }
        self.coords.iter().try_for_each(|c| c.validate())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.coords.iter().map(|c| c.sample(rng)).collect()
    }

    /// Law of the snapped coordinate `i`: pairs `(V, P)` where `V` is the
    /// centred residue numerator over `m` (period `m·n`) and `P` the exact
    /// mass of the cell `[(V − 1/2)/m, (V + 1/2)/m)` folded modulo `n`.
    pub fn snapped_pmf(&self, i: usize, m: u64, n: u64) -> Vec<(i64, f64)> {
        let law = &self.coords[i];
        let (lo, hi) = law.effective_range();
        let mf = m as f64;
        let v_lo = (lo * mf + 0.5).floor() as i64;
        let v_hi = (hi * mf + 0.5).floor() as i64;
        let q = (m * n) as i64;
        let mut out: Vec<(i64, f64)> = Vec::new();
        for v in v_lo..=v_hi {
            let p = law.cdf((v as f64 + 0.5) / mf) - law.cdf((v as f64 - 0.5) / mf);
            if p <= 0.0 {
                continue;
            }
            let r = centred(v.rem_euclid(q), q);
            match out.iter_mut().find(|(w, _)| *w == r) {
                Some(slot) => slot.1 += p,
                None => out.push((r, p)),
            }
        }
        out.sort_by_key(|x| x.0);
        out
    }
}

fn centred(r: i64, q: i64) -> i64 {
    if 2 * r >= q {
        r - q
    } else {
        r
    }
}

/// Snaps each coordinate of `x` to the grid `(1/m)Z/nZ`: reduce modulo `n`,
/// then pick `v` with `x ∈ v + [-1/(2m), 1/(2m))`. Returns stored residues
/// of `ScaledTorus { d, m, n }`.
pub fn discretize_noise(x: &[f64], m: u64, n: u64) -> Result<GroupElement> {
    let q = m * n;
    let coords: Vec<u32> = x
        .iter()
        .map(|&xi| {
            if !xi.is_finite() {
                return Err(domain!("non-finite noise sample"));
            }
            let reduced = xi.rem_euclid(n as f64);
            Ok(((reduced * m as f64 + 0.5).floor() as i64).rem_euclid(q as i64) as u32)
        })
        .collect::<Result<_>>()?;
    Ok(GroupElement::new(&coords))
}

fn snap_centred(x: f64, m: u64, n: u64) -> i64 {
    let q = (m * n) as i64;
    let v = ((x.rem_euclid(n as f64) * m as f64 + 0.5).floor() as i64).rem_euclid(q);
    centred(v, q)
}

/// Picks `c` with `gcd(c, k·m²) = 1` closest to `λ·m`, trying offsets
/// `0, +1, −1, +2, −2, …` from the nearest integer. Returned modulo `k·m²`.
pub fn select_c(lambda: f64, m: u64, k: u64) -> Result<u64> {
    if !lambda.is_finite() || m == 0 || k == 0 {
        return Err(domain!("c selection needs finite lambda and positive m, k"));
    }
    let modulus = (k * m * m) as i64;
    let base = (lambda * m as f64).round() as i64;
    for step in 0..=modulus {
        for off in if step == 0 { vec![0] } else { vec![step, -step] } {
            let c = (base + off).rem_euclid(modulus) as u64;
            if gcd(c, modulus as u64) == 1 {
                return Ok(c);
            }
        }
    }
    Err(Error::Invariant("no unit found modulo k·m²".into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EuclideanValue {
    /// `M^{d−1} N^{d−r} F(δ_{H_N})(λ)`.
    pub printed: Complex64,
    /// `M^d N^{d−r} F(δ_{H_N})(λ)`, equal to 1 at `λ = 0`.
    pub mass_normalized: Complex64,
    /// Set when the two scalings disagree, i.e. `M ≠ 1`.
    pub scaling_mismatch: bool,
}

fn dual_label(lambda: &[f64], m: u64, n: u64) -> Result<Vec<u32>> {
    let q = (m * n) as i64;
    lambda
        .iter()
        .map(|&l| {
            let k = l * n as f64;
            let kr = k.round();
            if !k.is_finite() || (k - kr).abs() > 1e-9 {
                return Err(domain!("dual point {l} is not on the grid (1/{n})Z"));
            }
            Ok((kr as i64).rem_euclid(q) as u32)
        })
        .collect()
}

fn torus_setup(d: u32, r: u32, m: u64, n: u64) -> Result<(FiniteGroup, Subgroup)> {
    if r > d {
        return Err(domain!("lattice rank {r} exceeds dimension {d}"));
    }
    let group = FiniteGroup::new(GroupSpec::ScaledTorus { d, m, n })?;
    let h = Subgroup::new(&group, SubgroupKind::TorusSublattice { periods: vec![1; r as usize] })?;
    Ok((group, h))
}

fn euclidean_scales(d: u32, r: u32, m: u64, n: u64) -> (f64, f64) {
    let printed = (m as f64).powi(d as i32 - 1) * (n as f64).powi((d - r) as i32);
    (printed, printed * m as f64)
}

/// Rescaled DFT of the lattice indicator `δ_{H_N}`, `H_N = (Z/NZ)^r`, at a
/// dual point `λ ∈ (1/N)Z^d`.
pub fn euclidean_rescaled_dft(d: u32, r: u32, m: u64, n: u64, lambda: &[f64]) -> Result<EuclideanValue> {
    if lambda.len() != d as usize {
        return Err(domain!("dual point has {} coordinates, expected {d}", lambda.len()));
    }
    let (group, h) = torus_setup(d, r, m, n)?;
    let irrep = Irrep::new(&group, IrrepLabel::Torus { k: dual_label(lambda, m, n)? })?;
    let f = accumulate(&irrep, h.elements()?.iter().map(|g| (g, Complex64::new(1.0, 0.0))), 1.0 / group.order() as f64)
        .data[0];
    let (ps, ms) = euclidean_scales(d, r, m, n);
    Ok(EuclideanValue { printed: f * ps, mass_normalized: f * ms, scaling_mismatch: m != 1 })
}

/// Averaged Fourier transform of `δ_{Z^r}` at `λ ∈ R^d`.
pub fn euclidean_reference(r: u32, lambda: &[f64]) -> f64 {
    if lambda.iter().take(r as usize).all(|l| (l - l.round()).abs() < 1e-12) {
        1.0
    } else {
        0.0
    }
}

/// Integer points of `[-N/2, N/2)^3` in lexicographic order.
fn heisenberg_points(n: u64) -> Vec<[i64; 3]> {
    let lo = -((n / 2) as i64);
    let hi = lo + n as i64;
    let mut v = Vec::with_capacity((n * n * n) as usize);
    for x in lo..hi {
        for y in lo..hi {
            for z in lo..hi {
                v.push([x, y, z]);
            }
        }
    }
    v
}

struct HeisGrid {
    m: u64,
    n: u64,
    km: i64,
    len: i64,
    t0: i64,
    a_num: i64,
    b_num: i64,
    c: u64,
}

impl HeisGrid {
    fn new(m: u64, n: u64, k: u64, a_num: i64, b_num: i64, c: u64) -> Result<Self> {
        if m == 0 || n == 0 || k == 0 {
            return Err(domain!("m, N and k must be positive"));
        }
        if gcd(c, k * m * m) != 1 {
            return Err(precondition!("gcd(c, k·m²) = 1 fails for c = {c}, k·m² = {}", k * m * m));
        }
        let km = (k * m) as i64;
        let len = km * m as i64;
        Ok(HeisGrid { m, n, km, len, t0: -(len / 2), a_num, b_num, c })
    }

    /// `(1/(km·N³)) Σ_p (π(q_p) g)(T)` for points `q_p` given by numerators over `km`.
    fn apply(&self, points: &[[i64; 3]], g: &[Complex64]) -> Vec<Complex64> {
        let (km, len, t0) = (self.km as i128, self.len, self.t0);
        let (m, n) = (self.m as i128, self.n as i128);
        let den = (n * km * km * m) as u64;
        let c = self.c as i128;
        let mut out = vec![ZERO; len as usize];
        for q in points {
            let (qx, qy, qz) = (q[0] as i128, q[1] as i128, q[2] as i128);
            let char_part = (self.a_num as i128 * qx + self.b_num as i128 * qy) * km * m;
            for (i, slot) in out.iter_mut().enumerate() {
                let t = t0 + i as i64;
                let src = (t as i128 + qx - t0 as i128).rem_euclid(len as i128) as usize;
                let val = g[src];
                if val == ZERO {
                    continue;
                }
                let num = char_part + c * (qy * t as i128 + km * qz) * n;
                *slot += unit(num, den) * val;
            }
        }
        let scale = 1.0 / (self.km as f64 * (self.n as f64).powi(3));
        out.iter_mut().for_each(|z| *z *= scale);
        out
    }

    /// `E[π(ξ)] g` for product noise with snapped coordinate laws
    /// `(U, P)`, numerators over `km`.
    fn apply_expectation(&self, laws: &[Vec<(i64, f64)>; 3], g: &[Complex64]) -> Vec<Complex64> {
        let (km, len, t0) = (self.km as i128, self.len, self.t0);
        let (m, n) = (self.m as i128, self.n as i128);
        let c = self.c as i128;
        let w_factor: Complex64 = laws[2].iter().map(|&(w, p)| unit(c * w as i128, (km * m) as u64) * p).sum();
        (0..len as usize)
            .map(|i| {
                let t = (t0 + i as i64) as i128;
                let shift: Complex64 = laws[0]
                    .iter()
                    .map(|&(u, p)| {
                        let src = (t + u as i128 - t0 as i128).rem_euclid(len as i128) as usize;
                        unit(self.a_num as i128 * u as i128, (n * km) as u64) * g[src] * p
                    })
                    .sum();
                let v_factor: Complex64 = laws[1]
                    .iter()
                    .map(|&(v, p)| {
                        // e(b v/km) · e(c v t/((km)² m)) over the common denominator N·(km)²·m.
                        let num = self.b_num as i128 * v as i128 * km * m + c * v as i128 * t * n;
                        unit(num, (n * km * km * m) as u64) * p
                    })
                    .sum();
                shift * v_factor * w_factor
            })
            .collect()
    }
}

/// Weak pairing `⟨(km)² F(δ_{H_N})(π_{a,b,c,m}) φ, ψ⟩` on the grid
/// `(1/(km))Z ∩ [-m/2, m/2)`, with `a = a_num/N`, `b = b_num/N`.
#[allow(clippy::too_many_arguments)]
pub fn heisenberg_weak_pairing(
    m: u64,
    n: u64,
    k: u64,
    a_num: i64,
    b_num: i64,
    c: u64,
    phi: &TestFunction,
    psi: &TestFunction,
) -> Result<Complex64> {
    let grid = HeisGrid::new(m, n, k, a_num, b_num, c)?;
    let km = grid.km;
    let phi_t = phi.grid_table(k * m, m)?;
    let psi_t = psi.grid_table(k * m, m)?;
    let points: Vec<[i64; 3]> = heisenberg_points(n).into_iter().map(|p| p.map(|v| v * km)).collect();
    let v = grid.apply(&points, &phi_t);
    Ok(v.iter().zip(&psi_t).map(|(a, b)| a * b.conj()).sum())
}

/// `(1/N³) Σ_p e(a x + b y)·e(λ z) ∫ e(λ y u)·φ(u + x)·conj ψ(u) du` over
/// the given real points `(x, y, z)`.
#[allow(clippy::too_many_arguments)]
fn heisenberg_continuum_at(
    points: &[[f64; 3]],
    lambda: f64,
    a: f64,
    b: f64,
    n: u64,
    phi: &TestFunction,
    psi: &TestFunction,
    tol: f64,
) -> Result<Complex64> {
    let (plo, phi_hi) = phi.support();
    let (slo, shi) = psi.support();
    let mut total = ZERO;
    for p in points {
        let (x, y, z) = (p[0], p[1], p[2]);
        let lo = slo.max(plo - x);
        let hi = shi.min(phi_hi - x);
        if hi <= lo {
            continue;
        }
        let mut bps = psi.breakpoints();
        bps.extend(phi.breakpoints().into_iter().map(|t| t - x));
        let f = |u: f64| e(lambda * y * u) * phi.eval(u + x) * psi.eval(u).conj();
        let integral = integrate(&f, lo, hi, &bps, tol / points.len() as f64)?;
        total += e(a * x + b * y) * e(lambda * z) * integral;
    }
    Ok(total / (n as f64).powi(3))
}

/// Truncated continuum pairing over the integer points of `[-N/2, N/2)^3`.
pub fn heisenberg_continuum_pairing(
    lambda: f64,
    a: f64,
    b: f64,
    n: u64,
    phi: &TestFunction,
    psi: &TestFunction,
    tol: f64,
) -> Result<Complex64> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(precondition!("continuum pairing needs a non-zero finite lambda"));
    }
    phi.validate()?;
    psi.validate()?;
    let points: Vec<[f64; 3]> = heisenberg_points(n).into_iter().map(|p| p.map(|v| v as f64)).collect();
    heisenberg_continuum_at(&points, lambda, a, b, n, phi, psi, tol)
}

/// `(1/N³) Σ_p e(αx + βy)` over the integer points of `[-N/2, N/2)^3`.
pub fn heisenberg_character_continuum(alpha: f64, beta: f64, n: u64) -> Complex64 {
    let lo = -((n / 2) as i64);
    let mut s = ZERO;
    for x in lo..lo + n as i64 {
        for y in lo..lo + n as i64 {
            s += e(alpha * x as f64 + beta * y as f64);
        }
    }
    s / (n as f64).powi(2)
}

/// `(km)³ F(δ_{H_N})(χ)` for the one-dimensional irrep `χ(X,Y,Z) = e((A x + B y)/N)`
/// of the Heisenberg group at scale `1/(km)` and period `N`, where `x = X/(km)`.
pub fn heisenberg_character_discrete(m: u64, n: u64, k: u64, a_num: i64, b_num: i64) -> Result<Complex64> {
    let km = k * m;
    let group = FiniteGroup::new(GroupSpec::Heisenberg { m: km, n })?;
    let h = Subgroup::new(&group, SubgroupKind::HeisenbergIntegerPoints)?;
    let q = (km * n) as i64;
    // e(a_label·X/q) with X = km·x equals e(a_label·x/N).
    let label =
        IrrepLabel::Heisenberg { m: 1, c: 0, a_num: a_num.rem_euclid(q) as u64, b_num: b_num.rem_euclid(q) as u64 };
    let irrep = Irrep::new(&group, label)?;
    let f = accumulate(&irrep, h.elements()?.iter().map(|g| (g, Complex64::new(1.0, 0.0))), 1.0 / group.order() as f64);
    Ok(f.data[0] * (km as f64).powi(3))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SweepTarget {
    /// Lattice `Z^r ⊂ R^d` at dual point `lambda`; rungs are `(M, N)`.
    Euclidean { d: u32, r: u32, lambda: Vec<f64> },
    /// Weak pairing against `π_λ` twisted by the character `(a, b)`; rungs are `(m, N)`.
    Heisenberg {
        lambda: f64,
        #[serde(default)]
        a: f64,
        #[serde(default)]
        b: f64,
        k: u64,
        phi: TestFunction,
        psi: TestFunction,
    },
    /// One-dimensional characters `(α, β)`; rungs are `(m, N)`.
    HeisenbergCharacter { alpha: f64, beta: f64, k: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rung {
    pub m: u64,
    pub n: u64,
}

fn default_tol() -> f64 {
    1e-8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub target: SweepTarget,
    pub ladder: Vec<Rung>,
    #[serde(default = "default_tol")]
    pub quadrature_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbedSweep {
    pub noise: ContinuumNoise,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub m: u64,
    pub n: u64,
    pub c_m: Option<u64>,
    pub discrete: Complex64,
    pub continuum: Complex64,
    pub gap: f64,
    /// Euclidean only: the value under the `M^{d−1}N^{d−r}` scaling.
    pub printed_scale: Option<Complex64>,
    /// Perturbed mode only: norm of the difference between the perturbed
    /// rescaled DFT and its noise-factorized counterpart.
    pub residual: Option<f64>,
}

/// Runs every rung of the ladder. Rung `i` of a perturbed sweep draws from
/// `TrialSeed::derive(seed, i)`, one sample per lattice point in lexicographic order.
pub fn convergence_sweep(
    spec: &SweepSpec,
    perturbed: Option<&PerturbedSweep>,
    policy: ExecPolicy,
) -> Result<Vec<SweepRow>> {
    if spec.ladder.is_empty() {
        return Err(domain!("sweep ladder is empty"));
    }
    match &spec.target {
        SweepTarget::Euclidean { d, .. } => {
            if let Some(p) = perturbed {
                p.noise.validate(*d as usize)?;
            }
        }
        SweepTarget::Heisenberg { phi, psi, .. } => {
            phi.validate()?;
            psi.validate()?;
            if let Some(p) = perturbed {
                p.noise.validate(3)?;
            }
        }
        SweepTarget::HeisenbergCharacter { .. } => {
            if perturbed.is_some() {
                return Err(domain!("perturbed sweeps support the euclidean and heisenberg targets"));
            }
        }
    }
    try_map_indexed(policy, spec.ladder.len(), |i| {
        let rung = spec.ladder[i];
        let seed = perturbed.map(|p| TrialSeed::derive(p.seed, i as u64));
        match &spec.target {
            SweepTarget::Euclidean { d, r, lambda } => {
                euclidean_rung(*d, *r, lambda, rung, perturbed.map(|p| &p.noise).zip(seed))
            }
            SweepTarget::Heisenberg { lambda, a, b, k, phi, psi } => heisenberg_rung(
                (*lambda, *a, *b, *k),
                phi,
                psi,
                rung,
                spec.quadrature_tol,
                perturbed.map(|p| &p.noise).zip(seed),
            ),
            SweepTarget::HeisenbergCharacter { alpha, beta, k } => {
                let nf = rung.n as f64;
                let a_num = (alpha * nf).round() as i64;
                let b_num = (beta * nf).round() as i64;
                let discrete = heisenberg_character_discrete(rung.m, rung.n, *k, a_num, b_num)?;
                let continuum = heisenberg_character_continuum(*alpha, *beta, rung.n);
                Ok(SweepRow {
                    m: rung.m,
                    n: rung.n,
                    c_m: None,
                    discrete,
                    continuum,
                    gap: (discrete - continuum).norm(),
                    printed_scale: None,
                    residual: None,
                })
            }
        }
    })
}

fn euclidean_rung(
    d: u32,
    r: u32,
    lambda: &[f64],
    rung: Rung,
    noise: Option<(&ContinuumNoise, TrialSeed)>,
) -> Result<SweepRow> {
    let (m, n) = (rung.m, rung.n);
    let base = euclidean_rescaled_dft(d, r, m, n, lambda)?;
    let Some((noise, seed)) = noise else {
        let continuum = Complex64::new(euclidean_reference(r, lambda), 0.0);
        return Ok(SweepRow {
            m,
            n,
            c_m: None,
            discrete: base.mass_normalized,
            continuum,
            gap: (base.mass_normalized - continuum).norm(),
            printed_scale: Some(base.printed),
            residual: None,
        });
    };
    let (group, h) = torus_setup(d, r, m, n)?;
    let k = dual_label(lambda, m, n)?;
    let irrep = Irrep::new(&group, IrrepLabel::Torus { k: k.clone() })?;
    let mut rng = seed.rng();
    let mut perturbed = Vec::new();
    let mut continuum = ZERO;
    for p in h.elements()? {
        let xi = noise.sample(&mut rng);
        let snapped = discretize_noise(&xi, m, n)?;
        perturbed.push(group.op(p, &snapped));
        let lattice: Vec<f64> = group.centered_values(p);
        let dot: f64 = lattice.iter().zip(&xi).zip(lambda).map(|((p, x), l)| (p + x) * l).sum();
        continuum += e(-dot);
    }
    continuum /= h.order() as f64;
    let (ps, ms) = euclidean_scales(d, r, m, n);
    let raw =
        accumulate(&irrep, perturbed.iter().map(|g| (g, Complex64::new(1.0, 0.0))), 1.0 / group.order() as f64).data[0];
    let q = (m * n) as i128;
    let mut expectation = Complex64::new(1.0, 0.0);
    for (i, ki) in k.iter().enumerate() {
        expectation *= noise
            .snapped_pmf(i, m, n)
            .iter()
            .map(|&(v, p)| unit_neg(v as i128 * *ki as i128, q as u64) * p)
            .sum::<Complex64>();
    }
    let discrete = raw * ms;
    let factorized = base.mass_normalized * expectation;
    Ok(SweepRow {
        m,
        n,
        c_m: None,
        discrete,
        continuum,
        gap: (discrete - continuum).norm(),
        printed_scale: Some(raw * ps),
        residual: Some((discrete - factorized).norm()),
    })
}

fn heisenberg_rung(
    (lambda, a, b, k): (f64, f64, f64, u64),
    phi: &TestFunction,
    psi: &TestFunction,
    rung: Rung,
    tol: f64,
    noise: Option<(&ContinuumNoise, TrialSeed)>,
) -> Result<SweepRow> {
    let (m, n) = (rung.m, rung.n);
    let c = select_c(lambda, m, k)?;
    let nf = n as f64;
    let (a_num, b_num) = ((a * nf).round() as i64, (b * nf).round() as i64);
    let grid = HeisGrid::new(m, n, k, a_num, b_num, c)?;
    let km = grid.km;
    let phi_t = phi.grid_table(k * m, m)?;
    let psi_t = psi.grid_table(k * m, m)?;
    let lattice = heisenberg_points(n);
    let pair = |v: &[Complex64]| -> Complex64 { v.iter().zip(&psi_t).map(|(x, y)| x * y.conj()).sum() };

    let Some((noise, seed)) = noise else {
        let points: Vec<[i64; 3]> = lattice.iter().map(|p| p.map(|v| v * km)).collect();
        let discrete = pair(&grid.apply(&points, &phi_t));
        let continuum = heisenberg_continuum_pairing(lambda, a, b, n, phi, psi, tol)?;
        return Ok(SweepRow {
            m,
            n,
            c_m: Some(c),
            discrete,
            continuum,
            gap: (discrete - continuum).norm(),
            printed_scale: None,
            residual: None,
        });
    };
    let mut rng = seed.rng();
    let mut snapped_points = Vec::with_capacity(lattice.len());
    let mut real_points = Vec::with_capacity(lattice.len());
    for p in &lattice {
        let xi = noise.sample(&mut rng);
        let (u, v, w) = (snap_centred(xi[0], k * m, n), snap_centred(xi[1], k * m, n), snap_centred(xi[2], k * m, n));
        // p·ξ with the polarized law; numerators over km.
        snapped_points.push([km * p[0] + u, km * p[1] + v, km * p[2] + w + p[0] * v]);
        let (x, y, z) = (p[0] as f64, p[1] as f64, p[2] as f64);
        real_points.push([x + xi[0], y + xi[1], z + xi[2] + x * xi[1]]);
    }
    let perturbed_v = grid.apply(&snapped_points, &phi_t);
    let laws = [noise.snapped_pmf(0, k * m, n), noise.snapped_pmf(1, k * m, n), noise.snapped_pmf(2, k * m, n)];
    let e_phi = grid.apply_expectation(&laws, &phi_t);
    let lattice_num: Vec<[i64; 3]> = lattice.iter().map(|p| p.map(|v| v * km)).collect();
    let factorized_v = grid.apply(&lattice_num, &e_phi);
    let residual = perturbed_v.iter().zip(&factorized_v).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    let discrete = pair(&perturbed_v);
    if lambda == 0.0 {
        return Err(precondition!("continuum pairing needs a non-zero lambda"));
    }
    let continuum = heisenberg_continuum_at(&real_points, lambda, a, b, n, phi, psi, tol)?;
    Ok(SweepRow {
        m,
        n,
        c_m: Some(c),
        discrete,
        continuum,
        gap: (discrete - continuum).norm(),
        printed_scale: None,
        residual: Some(residual),
    })
}
