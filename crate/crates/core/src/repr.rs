//! Irreducible unitary representations.
//!
//! Every irrep in the supported families is monomial: each row of `π(g)` has
//! exactly one non-zero entry, a root of unity. Evaluators therefore return a
//! [`Monomial`] (column index and value per row), and dense matrices are built
//! from it on demand.
//!
//! Families:
//! * Torus characters `χ_K(P) = exp(-2πi⟨P,K⟩/q)` for `K ∈ (Z/qZ)^d`, `q = m·n`.
//! * Heisenberg over `Z/qZ`: for `μ | q`, `c ∈ (Z/μZ)^×`, `a, b ∈ [0, q/μ)`,
//!   the `μ`-dimensional representation
//!   `(π(X,Y,Z)f)(j) = e((aX+bY)/q) · e(c(Yj+Z)/μ) · f(j+X)`, `j ∈ Z/μZ`,
//!   where `e(t) = exp(2πi t)`. Summing `φ(μ)·(q/μ)²·μ²` over `μ | q` gives `q³`.
//! * Dihedral: two or four characters and the 2-dimensional
//!   `r^k ↦ diag(ω^{hk}, ω^{-hk})`, `s ↦ [[0,1],[1,0]]`, `ω = exp(2πi/n)`.

use crate::error::{domain, Error, Result};
use crate::exec::{map_indexed, ExecPolicy};
use crate::group::{FiniteGroup, GroupElement, GroupSpec, Subgroup, SubgroupKind, ENUMERATION_CAP};
use crate::linalg::CMatrix;
use crate::phase::{divisors, gcd, unit, unit_neg, units};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DihedralKind {
    Trivial,
    /// `r ↦ 1`, `s ↦ -1`.
    Sign,
    /// `r ↦ -1`, `s ↦ 1`; even `n` only.
    AltRotation,
    /// `r ↦ -1`, `s ↦ -1`; even `n` only.
    AltBoth,
    TwoDim,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum IrrepLabel {
    Torus {
        k: Vec<u32>,
    },
    /// `a_num` and `b_num` are numerators over `q = m·n` of the group.
    Heisenberg {
        m: u64,
        c: u64,
        a_num: u64,
        b_num: u64,
    },
    Dihedral {
        dihedral_kind: DihedralKind,
        index: u64,
    },
}

/// Sparse form of a monomial matrix: row `r` holds `vals[r]` at column `cols[r]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub cols: Vec<u32>,
    pub vals: Vec<Complex64>,
}

impl Monomial {
    pub fn to_dense(&self) -> CMatrix {
        let d = self.cols.len();
        let mut m = CMatrix::zeros(d);
        for (r, (&c, &v)) in self.cols.iter().zip(&self.vals).enumerate() {
            m.set(r, c as usize, v);
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        self.cols.iter().zip(&self.vals).enumerate().filter(|(r, (&c, _))| *r == c as usize).map(|(_, (_, &v))| v).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Irrep {
    label: IrrepLabel,
    dim: usize,
    spec: GroupSpec,
}

impl Irrep {
    pub fn new(group: &FiniteGroup, label: IrrepLabel) -> Result<Self> {
        let dim = validate_label(group, &label)?;
        Ok(Irrep { label, dim, spec: group.spec() })
    }

    pub fn label(&self) -> &IrrepLabel {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Writes the monomial form of `π(g)` into `cols`/`vals` (length `dim`).
    pub fn monomial_into(&self, g: &GroupElement, cols: &mut [u32], vals: &mut [Complex64]) {
        match (&self.label, self.spec) {
            (IrrepLabel::Torus { k }, GroupSpec::ScaledTorus { m, n, .. }) => {
                let q = m * n;
                let mut acc: u128 = 0;
                for (p, kk) in g.coords.iter().zip(k) {
                    acc += (*p as u128) * (*kk as u128);
                }
                cols[0] = 0;
                vals[0] = unit_neg((acc % q as u128) as i128, q);
            }
            (IrrepLabel::Heisenberg { m: mu, c, a_num, b_num }, GroupSpec::Heisenberg { m, n }) => {
                let q = (m * n) as i128;
                let mu = *mu as i128;
                let (x, y, z) = (g.coords[0] as i128, g.coords[1] as i128, g.coords[2] as i128);
                let base = (*a_num as i128) * x + (*b_num as i128) * y;
                let scale = q / mu;
                let shift = x % mu;
                for j in 0..mu {
                    let num = base + (*c as i128) * ((y * j + z) % mu) * scale;
                    cols[j as usize] = ((j + shift) % mu) as u32;
                    vals[j as usize] = unit(num, q as u64);
                }
            }
            (IrrepLabel::Dihedral { dihedral_kind, index }, GroupSpec::Dihedral { n }) => {
                let (k, e) = (g.coords[0] as u64, g.coords[1] as u64);
                let sign = |p: u64| if p.is_multiple_of(2) { 1.0 } else { -1.0 };
                let one_dim = |v: f64, cols: &mut [u32], vals: &mut [Complex64]| {
                    cols[0] = 0;
                    vals[0] = Complex64::new(v, 0.0);
                };
                match dihedral_kind {
                    DihedralKind::Trivial => one_dim(1.0, cols, vals),
                    DihedralKind::Sign => one_dim(sign(e), cols, vals),
                    DihedralKind::AltRotation => one_dim(sign(k), cols, vals),
                    DihedralKind::AltBoth => one_dim(sign(k + e), cols, vals),
                    DihedralKind::TwoDim => {
                        let hk = (*index as i128) * (k as i128);
                        let w = unit(hk, n);
                        let w_inv = unit(-hk, n);
                        if e == 0 {
                            cols[0] = 0;
                            cols[1] = 1;
                        } else {
                            cols[0] = 1;
                            cols[1] = 0;
                        }
                        vals[0] = w;
                        vals[1] = w_inv;
                    }
                }
            }
            _ => unreachable!("label validated against family at construction"),
        }
    }

    pub fn monomial(&self, g: &GroupElement) -> Monomial {
        let mut cols = vec![0u32; self.dim];
        let mut vals = vec![Complex64::new(0.0, 0.0); self.dim];
        self.monomial_into(g, &mut cols, &mut vals);
        Monomial { cols, vals }
    }

    /// Dense `π(g)`, with a membership check on `g`.
    pub fn evaluate(&self, group: &FiniteGroup, g: &GroupElement) -> Result<CMatrix> {
        if group.spec() != self.spec {
            return Err(domain!("irrep of {:?} evaluated on {:?}", self.spec, group.spec()));
        }
        group.check(g)?;
        Ok(self.monomial(g).to_dense())
    }

    pub fn character(&self, g: &GroupElement) -> Complex64 {
        self.monomial(g).trace()
    }

    /// Monomial forms of `π(g)` for every `g` in `elements`, flattened so
    /// that element `i` occupies `[i·dim, (i+1)·dim)`.
    pub fn table(&self, elements: &[GroupElement]) -> Monomial {
        let d = self.dim;
        let mut cols = vec![0u32; d * elements.len()];
        let mut vals = vec![Complex64::new(0.0, 0.0); d * elements.len()];
        for (i, g) in elements.iter().enumerate() {
            self.monomial_into(g, &mut cols[i * d..(i + 1) * d], &mut vals[i * d..(i + 1) * d]);
        }
        Monomial { cols, vals }
    }
}

fn validate_label(group: &FiniteGroup, label: &IrrepLabel) -> Result<usize> {
    match (label, group.spec()) {
        (IrrepLabel::Torus { k }, GroupSpec::ScaledTorus { d, m, n }) => {
            let q = m * n;
            if k.len() != d as usize || k.iter().any(|&x| x as u64 >= q) {
                return Err(domain!("torus label {k:?} invalid for modulus {q} in dimension {d}"));
            }
            Ok(1)
        }
        (IrrepLabel::Heisenberg { m: mu, c, a_num, b_num }, GroupSpec::Heisenberg { m, n }) => {
            let q = m * n;
            if *mu == 0 || q % mu != 0 {
                return Err(domain!("Heisenberg label dimension {mu} does not divide {q}"));
            }
            let unit_ok = if *mu == 1 { *c == 0 } else { *c < *mu && gcd(*c, *mu) == 1 };
            if !unit_ok || *a_num >= q / mu || *b_num >= q / mu {
                return Err(domain!("Heisenberg label {label:?} out of range for q={q}"));
            }
            Ok(*mu as usize)
        }
        (IrrepLabel::Dihedral { dihedral_kind, index }, GroupSpec::Dihedral { n }) => match dihedral_kind {
            DihedralKind::Trivial | DihedralKind::Sign if *index == 0 => Ok(1),
            DihedralKind::AltRotation | DihedralKind::AltBoth if *index == 0 && n % 2 == 0 => Ok(1),
            DihedralKind::TwoDim if *index >= 1 && 2 * index < n => Ok(2),
            _ => Err(domain!("dihedral label {label:?} invalid for n={n}")),
        },
        (l, spec) => Err(domain!("label {l:?} does not belong to {spec:?}")),
    }
}

/// The full set of irreps of a group, in a fixed enumeration order.
#[derive(Debug, Clone)]
pub struct DualSpace {
    group: FiniteGroup,
    irreps: Vec<Irrep>,
    index: HashMap<IrrepLabel, usize>,
}

impl DualSpace {
    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn irreps(&self) -> &[Irrep] {
        &self.irreps
    }

    pub fn len(&self) -> usize {
        self.irreps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.irreps.is_empty()
    }

    pub fn position(&self, label: &IrrepLabel) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn max_dim(&self) -> usize {
        self.irreps.iter().map(|p| p.dim).max().unwrap_or(0)
    }

    /// `Σ d_π`, the number of rows across all irreps.
    pub fn total_dim(&self) -> usize {
        self.irreps.iter().map(|p| p.dim).sum()
    }

    pub fn sum_dim_sq(&self) -> u64 {
        self.irreps.iter().map(|p| (p.dim * p.dim) as u64).sum()
    }
}

/// Enumerates a complete set of inequivalent irreps and checks `Σ d² = |Γ|`.
pub fn enumerate_dual(group: &FiniteGroup) -> Result<DualSpace> {
    let labels: Vec<IrrepLabel> = match group.spec() {
        GroupSpec::ScaledTorus { d, m, n } => {
            let q = m * n;
            if group.order() > ENUMERATION_CAP {
                return Err(Error::Resource(format!(
                    "torus dual has {} labels, cap is {ENUMERATION_CAP}",
                    group.order()
                )));
            }
            (0..group.order() as usize)
                .map(|i| {
                    let mut rest = i as u64;
                    let mut k = vec![0u32; d as usize];
                    for slot in k.iter_mut().rev() {
                        *slot = (rest % q) as u32;
                        rest /= q;
                    }
                    IrrepLabel::Torus { k }
                })
                .collect()
        }
        GroupSpec::Heisenberg { m, n } => {
            let q = m * n;
            if group.order() > ENUMERATION_CAP {
                return Err(Error::Resource(format!("Heisenberg group of order {} exceeds cap", group.order())));
            }
            let mut v = Vec::new();
            for mu in divisors(q) {
                for c in units(mu) {
                    for a_num in 0..q / mu {
                        for b_num in 0..q / mu {
                            v.push(IrrepLabel::Heisenberg { m: mu, c, a_num, b_num });
                        }
                    }
                }
            }
            v
        }
        GroupSpec::Dihedral { n } => {
            let mut v = vec![
                IrrepLabel::Dihedral { dihedral_kind: DihedralKind::Trivial, index: 0 },
                IrrepLabel::Dihedral { dihedral_kind: DihedralKind::Sign, index: 0 },
            ];
            if n % 2 == 0 {
                v.push(IrrepLabel::Dihedral { dihedral_kind: DihedralKind::AltRotation, index: 0 });
                v.push(IrrepLabel::Dihedral { dihedral_kind: DihedralKind::AltBoth, index: 0 });
            }
            for h in 1..=(n - 1) / 2 {
                v.push(IrrepLabel::Dihedral { dihedral_kind: DihedralKind::TwoDim, index: h });
            }
            v
        }
    };
    let irreps: Vec<Irrep> = labels.into_iter().map(|l| Irrep::new(group, l)).collect::<Result<_>>()?;
    let index = irreps.iter().enumerate().map(|(i, p)| (p.label.clone(), i)).collect();
    let dual = DualSpace { group: group.clone(), irreps, index };
    if dual.sum_dim_sq() != group.order() {
        return Err(Error::Invariant(format!(
            "sum of squared dimensions {} differs from group order {}",
            dual.sum_dim_sq(),
            group.order()
        )));
    }
    Ok(dual)
}

#[derive(Debug, Clone, Serialize)]
pub struct SchurReport {
    /// Largest deviation of `(1/|Γ|)Σ_g π_ij(g) conj ρ_rs(g)` from `δ_πρ δ_ir δ_js / d_π`.
    pub max_entry_deviation: f64,
    /// Largest deviation of `(1/|Γ|)Σ_g χ_π(g) conj χ_ρ(g)` from `δ_πρ`.
    pub max_character_deviation: f64,
    /// Unordered irrep pairs examined.
    pub irrep_pairs: usize,
}

/// Checks the orthogonality relations for every pair of matrix entries and
/// every pair of characters.
#[allow(clippy::needless_range_loop)]
pub fn schur_orthogonality_check(dual: &DualSpace, policy: ExecPolicy) -> Result<SchurReport> {
    let elements = dual.group.elements()?;
    let order = elements.len() as f64;
    let tables: Vec<Monomial> = map_indexed(policy, dual.len(), |i| dual.irreps[i].table(&elements));
    let n_irr = dual.len();

    let entry_dev = map_indexed(policy, n_irr, |pi| {
        let dp = dual.irreps[pi].dim;
        let tp = &tables[pi];
        let mut worst: f64 = 0.0;
        let mut acc: Vec<Complex64> = Vec::new();
        // The (ρ, π) block is the conjugate of the (π, ρ) block, and for two
        // one-dimensional irreps the single entry is the character, which the
        // character pass below covers.
        for rho in pi..n_irr {
            let dr = dual.irreps[rho].dim;
            if dp == 1 && dr == 1 {
                continue;
            }
            let tr = &tables[rho];
            acc.clear();
            acc.resize(dp * dp * dr * dr, Complex64::new(0.0, 0.0));
            for g in 0..elements.len() {
                for i in 0..dp {
                    let j = tp.cols[g * dp + i] as usize;
                    let v = tp.vals[g * dp + i];
                    for r in 0..dr {
                        let s = tr.cols[g * dr + r] as usize;
                        let w = tr.vals[g * dr + r];
                        acc[((i * dp + j) * dr + r) * dr + s] += v * w.conj();
                    }
                }
            }
            for i in 0..dp {
                for j in 0..dp {
                    for r in 0..dr {
                        for s in 0..dr {
                            let expect = if pi == rho && i == r && j == s { 1.0 / dp as f64 } else { 0.0 };
                            let got = acc[((i * dp + j) * dr + r) * dr + s] / order;
                            worst = worst.max((got - expect).norm());
                        }
                    }
                }
            }
        }
        worst
    })
    .into_iter()
    .fold(0.0, f64::max);

    let chars: Vec<Vec<Complex64>> = map_indexed(policy, n_irr, |p| {
        let d = dual.irreps[p].dim;
        let t = &tables[p];
        (0..elements.len())
            .map(|g| (0..d).filter(|&r| t.cols[g * d + r] as usize == r).map(|r| t.vals[g * d + r]).sum())
            .collect()
    });
    let char_dev = map_indexed(policy, n_irr, |p| {
        let mut worst: f64 = 0.0;
        for r in p..n_irr {
            let ip: Complex64 = chars[p].iter().zip(&chars[r]).map(|(a, b)| a * b.conj()).sum::<Complex64>() / order;
            let expect = if p == r { 1.0 } else { 0.0 };
            worst = worst.max((ip - expect).norm());
        }
        worst
    })
    .into_iter()
    .fold(0.0, f64::max);

    Ok(SchurReport {
        max_entry_deviation: entry_dev,
        max_character_deviation: char_dev,
        irrep_pairs: n_irr * (n_irr + 1) / 2,
    })
}

/// Labels of the irreps that are trivial on `H`. For normal `H` these are
/// the irreps of `Γ/H`, so their squared dimensions must sum to `[Γ:H]`.
pub fn annihilator(h: &Subgroup, dual: &DualSpace) -> Result<Vec<usize>> {
    if h.group() != dual.group() {
        return Err(domain!("subgroup and dual belong to different groups"));
    }
    let elems = h.elements()?;
    let tol = 1e-12;
    let out: Vec<usize> = (0..dual.len())
        .filter(|&i| {
            let p = &dual.irreps[i];
            let mut cols = vec![0u32; p.dim];
            let mut vals = vec![Complex64::new(0.0, 0.0); p.dim];
            elems.iter().all(|x| {
                p.monomial_into(x, &mut cols, &mut vals);
                cols.iter().enumerate().all(|(r, &c)| r == c as usize) && vals.iter().all(|v| (v - 1.0).norm() <= tol)
            })
        })
        .collect();
    if h.is_normal()? {
        let s: u64 = out.iter().map(|&i| (dual.irreps[i].dim * dual.irreps[i].dim) as u64).sum();
        if s != h.index() {
            return Err(Error::Invariant(format!("annihilator dimensions sum to {s}, index is {}", h.index())));
        }
    }
    Ok(out)
}

/// A character of a subgroup, tabulated over `H.elements()`.
#[derive(Debug, Clone)]
pub struct SubgroupCharacter {
    pub name: String,
    pub degree: usize,
    pub values: Vec<Complex64>,
}

/// Irreducible characters of a subgroup, when they are available in closed form.
#[derive(Debug, Clone)]
pub struct SubgroupDual {
    pub characters: Vec<SubgroupCharacter>,
}

/// Builds the irreducible characters of `H` for the subgroup kinds whose
/// structure is known: trivial and whole subgroups, torus sublattices,
/// dihedral rotation subgroups, and Heisenberg integer points when `gcd(m, n) = 1`
/// (then `H` is itself a Heisenberg group over `Z/nZ`).
pub fn subgroup_dual(h: &Subgroup) -> Result<SubgroupDual> {
    let elems = h.elements()?;
    let group = h.group();
    let characters = match (h.kind(), group.spec()) {
        (SubgroupKind::Trivial, _) => {
            vec![SubgroupCharacter { name: "trivial".into(), degree: 1, values: vec![Complex64::new(1.0, 0.0)] }]
        }
        (SubgroupKind::Whole, _) => {
            let dual = enumerate_dual(group)?;
            dual.irreps
                .iter()
                .map(|p| SubgroupCharacter {
                    name: format!("{:?}", p.label),
                    degree: p.dim,
                    values: elems.iter().map(|g| p.character(g)).collect(),
                })
                .collect()
        }
        (SubgroupKind::TorusSublattice { periods }, GroupSpec::ScaledTorus { m, n, .. }) => {
            let sizes: Vec<u64> = periods.iter().map(|p| n / p).collect();
            let total: u64 = sizes.iter().product();
            (0..total)
                .map(|idx| {
                    let mut rest = idx;
                    let mut s = vec![0u64; sizes.len()];
                    for (slot, sz) in s.iter_mut().zip(&sizes).rev() {
                        *slot = rest % sz;
                        rest /= sz;
                    }
                    let values = elems
                        .iter()
                        .map(|g| {
                            let mut z = Complex64::new(1.0, 0.0);
                            for (i, (&si, &sz)) in s.iter().zip(&sizes).enumerate() {
                                let t = g.coords[i] as u64 / (m * periods[i]);
                                z *= unit_neg((t * si) as i128, sz);
                            }
                            z
                        })
                        .collect();
                    SubgroupCharacter { name: format!("sublattice{s:?}"), degree: 1, values }
                })
                .collect()
        }
        (SubgroupKind::DihedralRotations { order }, GroupSpec::Dihedral { n }) => {
            let step = n / order;
            (0..*order)
                .map(|s| SubgroupCharacter {
                    name: format!("rotation{s}"),
                    degree: 1,
                    values: elems.iter().map(|g| unit((g.coords[0] as u64 / step * s) as i128, *order)).collect(),
                })
                .collect()
        }
        (SubgroupKind::HeisenbergIntegerPoints, GroupSpec::Heisenberg { m, n }) => {
            if gcd(m, n) != 1 {
                return Err(domain!(
                    "integer points of Heisenberg(m={m}, n={n}) need gcd(m, n) = 1 for a closed-form dual"
                ));
            }
            let m_inv = (1..n.max(2)).find(|t| (t * m) % n == 1 % n).unwrap_or(0);
            let inner = FiniteGroup::new(GroupSpec::Heisenberg { m: 1, n })?;
            let inner_dual = enumerate_dual(&inner)?;
            let mapped: Vec<GroupElement> = elems
                .iter()
                .map(|g| {
                    let x = g.coords[0] as u64 / m;
                    let y = g.coords[1] as u64 / m;
                    let z = (g.coords[2] as u64 / m * m_inv) % n;
                    GroupElement::new(&[x as u32, y as u32, z as u32])
                })
                .collect();
            inner_dual
                .irreps
                .iter()
                .map(|p| SubgroupCharacter {
                    name: format!("{:?}", p.label),
                    degree: p.dim,
                    values: mapped.iter().map(|g| p.character(g)).collect(),
                })
                .collect()
        }
        (kind, _) => return Err(domain!("no closed-form dual for subgroup kind {kind:?}")),
    };
    let sum: usize = characters.iter().map(|c| c.degree * c.degree).sum();
    if sum as u64 != h.order() {
        return Err(Error::Invariant(format!("subgroup character degrees give {sum}, order is {}", h.order())));
    }
    Ok(SubgroupDual { characters })
}

/// Multiplicity of `σ` in `ρ|_H`, via the character inner product over `H`.
pub fn restriction_multiplicity(sigma: &SubgroupCharacter, rho: &Irrep, h: &Subgroup) -> Result<u64> {
    let elems = h.elements()?;
    if sigma.values.len() != elems.len() {
        return Err(domain!("character has {} values, subgroup has {} elements", sigma.values.len(), elems.len()));
    }
    let ip: Complex64 = elems.iter().zip(&sigma.values).map(|(g, s)| rho.character(g) * s.conj()).sum::<Complex64>()
        / elems.len() as f64;
    let rounded = ip.re.round();
    if (ip - rounded).norm() > 1e-8 || rounded < 0.0 {
        return Err(Error::Numerical(format!("character inner product {ip} is not a non-negative integer")));
    }
    Ok(rounded as u64)
}

#[derive(Debug, Clone, Serialize)]
pub struct CliffordRow {
    pub irrep: IrrepLabel,
    /// `(index into the subgroup dual, multiplicity)` for each constituent.
    pub constituents: Vec<(usize, u64)>,
    pub single_orbit: bool,
    pub equal_multiplicity: bool,
    pub dimension_matches: bool,
}

/// For each `ρ ∈ Γ̂`, decomposes `ρ|_H` and checks that the constituents form
/// one conjugation orbit with a common multiplicity.
pub fn clifford_check(h: &Subgroup, dual: &DualSpace, sub: &SubgroupDual) -> Result<Vec<CliffordRow>> {
    if !h.is_normal()? {
        return Err(Error::Precondition("restriction structure check needs a normal subgroup".into()));
    }
    let group = h.group();
    let elems = h.elements()?;
    let gens = group.generators();
    // Conjugation action of each generator on the subgroup characters.
    let conj_maps: Vec<Vec<usize>> = gens
        .iter()
        .map(|s| {
            let s_inv = group.inv(s);
            let perm: Vec<usize> = elems
                .iter()
                .map(|x| {
                    let y = group.op(&group.op(s, x), &s_inv);
                    elems.binary_search(&y).expect("normal subgroup is closed under conjugation")
                })
                .collect();
            (0..sub.characters.len())
                .map(|ci| {
                    let twisted: Vec<Complex64> = perm.iter().map(|&p| sub.characters[ci].values[p]).collect();
                    sub.characters
                        .iter()
                        .position(|c| c.values.iter().zip(&twisted).all(|(a, b)| (a - b).norm() < 1e-9))
                        .ok_or_else(|| Error::Invariant("conjugate character not found in subgroup dual".into()))
                })
                .collect::<Result<Vec<usize>>>()
        })
        .collect::<Result<_>>()?;

    dual.irreps
        .iter()
        .map(|rho| {
            let mut constituents = Vec::new();
            for (i, s) in sub.characters.iter().enumerate() {
                let mult = restriction_multiplicity(s, rho, h)?;
                if mult > 0 {
                    constituents.push((i, mult));
                }
            }
            let first = constituents.first().map(|c| c.0).unwrap_or(0);
            let mut orbit = vec![first];
            let mut k = 0;
            while k < orbit.len() {
                for map in &conj_maps {
                    let t = map[orbit[k]];
                    if !orbit.contains(&t) {
                        orbit.push(t);
                    }
                }
                k += 1;
            }
            orbit.sort_unstable();
            let members: Vec<usize> = constituents.iter().map(|c| c.0).collect();
            let dim_sum: u64 = constituents.iter().map(|&(i, mu)| mu * sub.characters[i].degree as u64).sum();
            Ok(CliffordRow {
                irrep: rho.label.clone(),
                single_orbit: members == orbit,
                equal_multiplicity: constituents.windows(2).all(|w| w[0].1 == w[1].1),
                dimension_matches: dim_sum == rho.dim as u64,
                constituents,
            })
        })
        .collect()
}
