//! Fourier transform on finite groups.
//!
//! Convention: `F(f)(π) = (1/|Γ|) Σ_g f(g) π(g)`, with inverse
//! `f(h) = Σ_π d_π Tr(π(h⁻¹) F(π))` and dual inner product
//! `⟨F, G⟩ = (1/|Γ|) Σ_π d_π Tr(F(π) G(π)*)`. Under these,
//! `|Γ|²⟨F f, F g⟩ = Σ_x f(x) conj g(x)` and `F(φ∗ψ) = |Γ| F(φ) F(ψ)`.

use crate::error::{domain, Error, Result};
use crate::exec::{map_indexed, ExecPolicy};
use crate::group::{FiniteGroup, GroupElement, GroupSpec, Subgroup};
use crate::linalg::CMatrix;
use crate::repr::{annihilator, DualSpace, IrrepLabel};
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A complex-valued function on a group.
#[derive(Debug, Clone, PartialEq)]
pub enum GroupFunction {
    /// Values in the group's lexicographic element order.
    Dense(Vec<Complex64>),
    /// `(element, value)` pairs; repeated elements add up.
    Sparse(Vec<(GroupElement, Complex64)>),
}

impl GroupFunction {
    /// Indicator of a subgroup.
    pub fn indicator(h: &Subgroup) -> Result<Self> {
        Ok(GroupFunction::Sparse(h.elements()?.iter().map(|g| (g.clone(), Complex64::new(1.0, 0.0))).collect()))
    }

    /// Sum of point masses, one per listed element, counted with multiplicity.
    pub fn multiset<'a>(elements: impl IntoIterator<Item = &'a GroupElement>) -> Self {
        GroupFunction::Sparse(elements.into_iter().map(|g| (g.clone(), Complex64::new(1.0, 0.0))).collect())
    }

    pub fn to_dense(&self, group: &FiniteGroup) -> Result<Vec<Complex64>> {
        match self {
            GroupFunction::Dense(v) => {
                check_dense_len(group, v)?;
                Ok(v.clone())
            }
            GroupFunction::Sparse(pairs) => {
                let n = group.elements_capped(crate::group::ENUMERATION_CAP).map(|e| e.len())?;
                let mut out = vec![ZERO; n];
                for (g, v) in pairs {
                    group.check(g)?;
                    out[group.index_of(g)] += v;
                }
                Ok(out)
            }
        }
    }

    fn support(&self, group: &FiniteGroup) -> Result<Vec<(GroupElement, Complex64)>> {
        match self {
            GroupFunction::Dense(v) => {
                check_dense_len(group, v)?;
                Ok(v.iter().enumerate().filter(|(_, z)| **z != ZERO).map(|(i, z)| (group.element_at(i), *z)).collect())
            }
            GroupFunction::Sparse(pairs) => {
                for (g, _) in pairs {
                    group.check(g)?;
                }
                Ok(pairs.clone())
            }
        }
    }
}

fn check_dense_len(group: &FiniteGroup, v: &[Complex64]) -> Result<()> {
    if v.len() as u64 != group.order() {
        return Err(domain!("dense function has {} values, group order is {}", v.len(), group.order()));
    }
    Ok(())
}

/// Fourier coefficients, one square block per irrep, aligned with a dual space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralField {
    pub group: GroupSpec,
    pub labels: Vec<IrrepLabel>,
    pub blocks: Vec<CMatrix>,
}

impl SpectralField {
    pub fn zeros(dual: &DualSpace) -> Self {
        SpectralField {
            group: dual.group().spec(),
            labels: dual.irreps().iter().map(|p| p.label().clone()).collect(),
            blocks: dual.irreps().iter().map(|p| CMatrix::zeros(p.dim())).collect(),
        }
    }

    fn check_aligned(&self, dual: &DualSpace) -> Result<()> {
        if self.group != dual.group().spec() || self.blocks.len() != dual.len() {
            return Err(domain!("spectral field is not aligned with the given dual space"));
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &SpectralField) -> f64 {
        self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.max_abs_diff(b)).fold(0.0, f64::max)
    }

    const MAGIC: &'static [u8; 4] = b"GSPF";
    const VERSION: u32 = 1;

    /// Binary layout (little-endian): magic `GSPF`, `u32` version,
    /// `u32`-length-prefixed group JSON, `u32` block count, then per block a
    /// `u32`-length-prefixed label JSON, `u32` dimension and `dim²` pairs of
    /// `f64` (re, im) in row-major order.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        let io = |e: std::io::Error| Error::Parse(e.to_string());
        w.write_all(Self::MAGIC).map_err(io)?;
        w.write_all(&Self::VERSION.to_le_bytes()).map_err(io)?;
        write_chunk(&mut w, to_json(&self.group).as_bytes()).map_err(io)?;
        w.write_all(&(self.blocks.len() as u32).to_le_bytes()).map_err(io)?;
        for (label, block) in self.labels.iter().zip(&self.blocks) {
            write_chunk(&mut w, to_json(label).as_bytes()).map_err(io)?;
            w.write_all(&(block.dim as u32).to_le_bytes()).map_err(io)?;
            for z in &block.data {
                w.write_all(&z.re.to_le_bytes()).map_err(io)?;
                w.write_all(&z.im.to_le_bytes()).map_err(io)?;
            }
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let io = |e: std::io::Error| Error::Parse(e.to_string());
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic).map_err(io)?;
        if &magic != Self::MAGIC {
            return Err(Error::Parse("bad magic".into()));
        }
        let version = read_u32(&mut r).map_err(io)?;
        if version != Self::VERSION {
            return Err(Error::Parse(format!("unsupported version {version}")));
        }
        let group: GroupSpec =
            serde_json::from_slice(&read_chunk(&mut r).map_err(io)?).map_err(|e| Error::Parse(e.to_string()))?;
        let count = read_u32(&mut r).map_err(io)? as usize;
        let mut labels = Vec::with_capacity(count);
        let mut blocks = Vec::with_capacity(count);
        for _ in 0..count {
            let label: IrrepLabel =
                serde_json::from_slice(&read_chunk(&mut r).map_err(io)?).map_err(|e| Error::Parse(e.to_string()))?;
            let dim = read_u32(&mut r).map_err(io)? as usize;
            let mut data = Vec::with_capacity(dim * dim);
            for _ in 0..dim * dim {
                let re = read_f64(&mut r).map_err(io)?;
                let im = read_f64(&mut r).map_err(io)?;
                data.push(Complex64::new(re, im));
            }
            labels.push(label);
            blocks.push(CMatrix { dim, data });
        }
        Ok(SpectralField { group, labels, blocks })
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("plain data serializes")
}

fn write_chunk<W: Write>(w: &mut W, bytes: &[u8]) -> std::io::Result<()> {
    w.write_all(&(bytes.len() as u32).to_le_bytes())?;
    w.write_all(bytes)
}

fn read_chunk<R: Read>(r: &mut R) -> std::io::Result<Vec<u8>> {
    let n = read_u32(r)? as usize;
    let mut buf = vec![0u8; n];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

fn read_u32<R: Read>(r: &mut R) -> std::io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> std::io::Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

/// Fourier transform. Dense functions on a torus go through an FFT; all
/// other inputs use [`dft_direct`].
pub fn dft(f: &GroupFunction, dual: &DualSpace, policy: ExecPolicy) -> Result<SpectralField> {
    let group = dual.group();
    if let (GroupSpec::ScaledTorus { .. }, GroupFunction::Dense(v)) = (group.spec(), f) {
        check_dense_len(group, v)?;
        let mut data = v.clone();
        torus_fft(&mut data, group.moduli(), false);
        let scale = 1.0 / group.order() as f64;
        let mut out = SpectralField::zeros(dual);
        for (b, z) in out.blocks.iter_mut().zip(data) {
            b.data[0] = z * scale;
        }
        return Ok(out);
    }
    dft_direct(f, dual, policy)
}

/// Fourier transform by direct summation over the support, one irrep at a time.
pub fn dft_direct(f: &GroupFunction, dual: &DualSpace, policy: ExecPolicy) -> Result<SpectralField> {
    let group = dual.group();
    let support = f.support(group)?;
    let scale = 1.0 / group.order() as f64;
    let blocks = map_indexed(policy, dual.len(), |i| {
        let p = &dual.irreps()[i];
        accumulate(p, support.iter().map(|(g, v)| (g, *v)), scale)
    });
    Ok(SpectralField { group: group.spec(), labels: dual.irreps().iter().map(|p| p.label().clone()).collect(), blocks })
}

/// `scale · Σ v·π(g)` over the given weighted elements.
pub(crate) fn accumulate<'a>(
    p: &crate::repr::Irrep,
    terms: impl Iterator<Item = (&'a GroupElement, Complex64)>,
    scale: f64,
) -> CMatrix {
    let d = p.dim();
    let mut block = CMatrix::zeros(d);
    let mut cols = vec![0u32; d];
    let mut vals = vec![ZERO; d];
    for (g, v) in terms {
        p.monomial_into(g, &mut cols, &mut vals);
        for r in 0..d {
            block.add_at(r, cols[r] as usize, v * vals[r]);
        }
    }
    block.scale_mut(scale);
    block
}

/// Inverse transform, returning values in lexicographic element order.
pub fn idft(field: &SpectralField, dual: &DualSpace, policy: ExecPolicy) -> Result<Vec<Complex64>> {
    field.check_aligned(dual)?;
    let group = dual.group();
    if let GroupSpec::ScaledTorus { .. } = group.spec() {
        let mut data: Vec<Complex64> = field.blocks.iter().map(|b| b.data[0]).collect();
        torus_fft(&mut data, group.moduli(), true);
        return Ok(data);
    }
    let n = group.elements()?.len();
    Ok(map_indexed(policy, n, |idx| {
        let h_inv = group.inv(&group.element_at(idx));
        let mut total = ZERO;
        for (p, block) in dual.irreps().iter().zip(&field.blocks) {
            let m = p.monomial(&h_inv);
            let tr: Complex64 = (0..p.dim()).map(|r| m.vals[r] * block.get(m.cols[r] as usize, r)).sum();
            total += tr * p.dim() as f64;
        }
        total
    }))
}

/// `(1/|Γ|) Σ_π d_π Tr(F(π) G(π)*)`.
pub fn inner_product_dual(a: &SpectralField, b: &SpectralField, dual: &DualSpace) -> Result<Complex64> {
    a.check_aligned(dual)?;
    b.check_aligned(dual)?;
    let s: Complex64 = dual
        .irreps()
        .iter()
        .zip(a.blocks.iter().zip(&b.blocks))
        .map(|(p, (x, y))| x.data.iter().zip(&y.data).map(|(u, v)| u * v.conj()).sum::<Complex64>() * p.dim() as f64)
        .sum();
    Ok(s / dual.group().order() as f64)
}

pub fn norm_dual(a: &SpectralField, dual: &DualSpace) -> Result<f64> {
    norm_restricted(a, dual, &(0..dual.len()).collect::<Vec<_>>())
}

/// Dual norm restricted to the irreps at the given positions.
pub fn norm_restricted(a: &SpectralField, dual: &DualSpace, positions: &[usize]) -> Result<f64> {
    a.check_aligned(dual)?;
    let mut s = 0.0;
    for &i in positions {
        let p = dual.irreps().get(i).ok_or_else(|| domain!("irrep position {i} out of range"))?;
        s += p.dim() as f64 * a.blocks[i].frobenius_sq();
    }
    Ok((s / dual.group().order() as f64).sqrt())
}

/// `(φ ∗ ψ)(g) = Σ_h φ(h) ψ(h⁻¹g)`, summed over the supports.
pub fn convolve(phi: &GroupFunction, psi: &GroupFunction, group: &FiniteGroup) -> Result<Vec<Complex64>> {
    let a = phi.support(group)?;
    let b = psi.support(group)?;
    let n = group.elements()?.len();
    let mut out = vec![ZERO; n];
    for (h, x) in &a {
        for (k, y) in &b {
            out[group.index_of(&group.op(h, k))] += x * y;
        }
    }
    Ok(out)
}

/// Spectrum of the indicator of a normal subgroup: `(|H|/|Γ|)·Id` on the
/// irreps trivial on `H`, zero elsewhere.
pub fn subgroup_spectrum_closed_form(h: &Subgroup, dual: &DualSpace) -> Result<SpectralField> {
    if !h.is_normal()? {
        return Err(Error::Precondition("closed-form subgroup spectrum needs a normal subgroup".into()));
    }
    let ann = annihilator(h, dual)?;
    let ratio = h.order() as f64 / dual.group().order() as f64;
    let mut out = SpectralField::zeros(dual);
    for i in ann {
        out.blocks[i] = CMatrix::scaled_identity(dual.irreps()[i].dim(), ratio);
    }
    Ok(out)
}

/// In-place multi-dimensional DFT over a box with the given side lengths,
/// data in row-major order. Forward uses `exp(-2πi jk/q)`; `inverse` uses
/// the opposite sign and no normalization.
pub fn torus_fft(data: &mut [Complex64], sides: &[u32], inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let total = data.len();
    let mut stride = total;
    let mut line = Vec::new();
    for &q in sides {
        let q = q as usize;
        stride /= q;
        let fft = if inverse { planner.plan_fft_inverse(q) } else { planner.plan_fft_forward(q) };
        let block = q * stride;
        line.resize(q, ZERO);
        for start in (0..total).step_by(block) {
            for off in 0..stride {
                for (t, slot) in line.iter_mut().enumerate() {
                    *slot = data[start + off + t * stride];
                }
                fft.process(&mut line);
                for (t, v) in line.iter().enumerate() {
                    data[start + off + t * stride] = *v;
                }
            }
        }
    }
}
