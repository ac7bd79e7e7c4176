//! Recovering the spectrum of a subgroup from a noisy realization.
//!
//! Each `h ∈ H` is moved to `h·ξ_h` with i.i.d. `ξ_h` drawn from a noise law.
//! The realization is a multiset: collisions keep their multiplicity, which
//! is what makes `E[F(δ_{H_ξ})] = F(δ_H)·E[π(ξ)]` hold blockwise.

use crate::error::{domain, precondition, Error, Result};
use crate::exec::{map_indexed, try_map_indexed, ExecPolicy};
use crate::group::{FiniteGroup, GroupElement, GroupSpec, Subgroup, SubgroupKind};
use crate::linalg::CMatrix;
use crate::noise::{NoiseLaw, NoiseSpec};
use crate::repr::{enumerate_dual, DualSpace, Irrep, IrrepLabel};
use crate::rng::TrialSeed;
use crate::spectra::{accumulate, dft_direct, subgroup_spectrum_closed_form, torus_fft, GroupFunction, SpectralField};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::time::Instant;

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationRealization {
    /// `(h, h·ξ_h)` for every `h ∈ H`, in the subgroup's element order.
    pub pairs: Vec<(GroupElement, GroupElement)>,
}

impl PerturbationRealization {
    /// The noise sample `ξ_h = h⁻¹·(h·ξ_h)` for each pair.
    pub fn noise(&self, group: &FiniteGroup) -> Vec<GroupElement> {
        self.pairs.iter().map(|(h, p)| group.op(&group.inv(h), p)).collect()
    }

    pub fn perturbed(&self) -> impl Iterator<Item = &GroupElement> {
        self.pairs.iter().map(|(_, p)| p)
    }
}

/// Draws one `ξ_h` per `h ∈ H`.
pub fn realize<R: Rng + ?Sized>(h: &Subgroup, law: &NoiseLaw, rng: &mut R) -> Result<PerturbationRealization> {
    let group = h.group();
    if let Some(g) = law.support().first() {
        group.check(g)?;
    }
    let pairs = h
        .elements()?
        .iter()
        .map(|x| {
            let xi = law.sample(rng);
            (x.clone(), group.op(x, &xi))
        })
        .collect();
    Ok(PerturbationRealization { pairs })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialStats {
    /// `‖F(δ_{H_ξ}) − F(δ_H)·E[π(ξ)]‖²` in the dual norm.
    pub err_sq: f64,
    /// Per irrep, `‖F(δ_{H_ξ})(π) − F(δ_H)(π)·E[π(ξ)]‖²_F`.
    pub per_label: Vec<f64>,
}

/// Precomputed, realization-independent parts of the error statistic.
pub struct RecoveryContext<'a> {
    pub dual: &'a DualSpace,
    pub subgroup: &'a Subgroup,
    pub law: &'a NoiseLaw,
    pub subgroup_spectrum: SpectralField,
    pub expectations: Vec<CMatrix>,
    /// `F(δ_H)(π)·E[π(ξ)]` per irrep.
    pub target: Vec<CMatrix>,
}

impl<'a> RecoveryContext<'a> {
    pub fn new(subgroup: &'a Subgroup, law: &'a NoiseLaw, dual: &'a DualSpace, policy: ExecPolicy) -> Result<Self> {
        if subgroup.group() != dual.group() {
            return Err(domain!("subgroup and dual space belong to different groups"));
        }
        let group = dual.group();
        for g in law.support() {
            group.check(g)?;
        }
        let subgroup_spectrum = if subgroup.is_normal()? {
            subgroup_spectrum_closed_form(subgroup, dual)?
        } else {
            dft_direct(&GroupFunction::indicator(subgroup)?, dual, policy)?
        };
        let expectations = law.expectations(dual, policy);
        let target = subgroup_spectrum.blocks.iter().zip(&expectations).map(|(a, e)| a * e).collect();
        Ok(RecoveryContext { dual, subgroup, law, subgroup_spectrum, expectations, target })
    }

    /// Error statistic for one realization, accumulated one irrep at a time.
    pub fn error_statistic(&self, r: &PerturbationRealization) -> Result<TrialStats> {
        let group = self.dual.group();
        for (h, p) in &r.pairs {
            group.check(h)?;
            group.check(p)?;
        }
        let inv_order = 1.0 / group.order() as f64;
        let mut err_sq = 0.0;
        let mut per_label = Vec::with_capacity(self.dual.len());
        for (p, target) in self.dual.irreps().iter().zip(&self.target) {
            let a = accumulate(p, r.perturbed().map(|g| (g, Complex64::new(1.0, 0.0))), inv_order);
            let e = (&a - target).frobenius_sq();
            per_label.push(e);
            err_sq += p.dim() as f64 * e;
        }
        Ok(TrialStats { err_sq: err_sq * inv_order, per_label })
    }
}

/// Convenience wrapper building a [`RecoveryContext`] for a single realization.
pub fn error_statistic(
    r: &PerturbationRealization,
    subgroup: &Subgroup,
    law: &NoiseLaw,
    dual: &DualSpace,
) -> Result<TrialStats> {
    RecoveryContext::new(subgroup, law, dual, ExecPolicy::Sequential)?.error_statistic(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub rhs: f64,
    pub prob_floor: f64,
}

/// Inputs shared by the bound evaluators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub group_order: u64,
    pub subgroup_order: u64,
    pub max_dim: usize,
    pub c: f64,
}

/// `rhs = |H|⁴/|Γ|²·(ε + 4C²/|H|)·max d`, `floor = 1 − 12C²L/(ε²|H|)`,
/// without checking preconditions.
pub fn dual_norm_formula(b: &BoundInputs, epsilon: f64, l: f64) -> BoundValue {
    let h = b.subgroup_order as f64;
    let g = b.group_order as f64;
    let rhs = h.powi(4) / (g * g) * (epsilon + 4.0 * b.c * b.c / h) * b.max_dim as f64;
    let prob_floor = 1.0 - 12.0 * b.c * b.c * l / (epsilon * epsilon * h);
    BoundValue { rhs, prob_floor }
}

/// High-probability bound on the dual-norm error, for a normal subgroup.
/// Requires `L > 3`, `|H| ≥ 6L/(L−3)` and `ε > (12C²L/|H|)^{1/2}`.
pub fn bound_dual_norm(b: &BoundInputs, epsilon: f64, l: f64) -> Result<BoundValue> {
    let h = b.subgroup_order as f64;
    if !(l > 3.0) {
        return Err(precondition!("L > 3 fails: L = {l}"));
    }
    let min_h = 6.0 * l / (l - 3.0);
    if h < min_h {
        return Err(precondition!("|H| >= 6L/(L-3) fails: |H| = {h}, 6L/(L-3) = {min_h}"));
    }
    let eps_min = (12.0 * b.c * b.c * l / h).sqrt();
    if !(epsilon > eps_min) {
        return Err(precondition!(
            "epsilon > (12 C^2 L / |H|)^(1/2) fails: epsilon = {epsilon}, threshold = {eps_min}"
        ));
    }
    Ok(dual_norm_formula(b, epsilon, l))
}

/// `err = 4C·|H|^{7/2}/|Γ|²·(√(3/δ) + C/√|H|)·max d`, holding with probability
/// at least `1 − δ`. Requires `|H| ≥ 24` and `δ ∈ (0, 1)`.
pub fn bound_dual_norm_delta(b: &BoundInputs, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(precondition!("delta must lie in (0, 1), got {delta}"));
    }
    if b.subgroup_order < 24 {
        return Err(precondition!("|H| >= 24 fails: |H| = {}", b.subgroup_order));
    }
    let h = b.subgroup_order as f64;
    let g = b.group_order as f64;
    Ok(4.0 * b.c * h.powf(3.5) / (g * g) * ((3.0 / delta).sqrt() + b.c / h.sqrt()) * b.max_dim as f64)
}

/// Inputs for the sup-norm bound on tori `Z/N` lattices with a sublattice of
/// periods `M_1..M_r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbelianBoundInputs {
    pub n: u64,
    pub r: u32,
    pub period_product: u64,
    pub subgroup_order: u64,
    pub annihilator_order: u64,
    pub c: f64,
}

/// `rhs = (1/|H*|)(ε + 4C²/|H|)^{1/2}`, `floor = 1 − 72ΠM_i/(ε²N^r)`, unchecked.
pub fn abelian_formula(b: &AbelianBoundInputs, epsilon: f64) -> BoundValue {
    let rhs = (epsilon + 4.0 * b.c * b.c / b.subgroup_order as f64).sqrt() / b.annihilator_order as f64;
    let nr = (b.n as f64).powi(b.r as i32);
    let prob_floor = 1.0 - 72.0 * b.period_product as f64 / (epsilon * epsilon * nr);
    BoundValue { rhs, prob_floor }
}

/// Sup-norm bound over the dual for abelian sublattices. Requires
/// `N^r/ΠM_i > 12` and `ε > (72ΠM_i/N^r)^{1/2}`.
pub fn bound_abelian(b: &AbelianBoundInputs, epsilon: f64) -> Result<BoundValue> {
    let nr = (b.n as f64).powi(b.r as i32);
    let ratio = nr / b.period_product as f64;
    if !(ratio > 12.0) {
        return Err(precondition!("N^r / (M_1...M_r) > 12 fails: ratio = {ratio}"));
    }
    let eps_min = (72.0 / ratio).sqrt();
    if !(epsilon > eps_min) {
        return Err(precondition!(
            "epsilon > (72 M_1...M_r / N^r)^(1/2) fails: epsilon = {epsilon}, threshold = {eps_min}"
        ));
    }
    Ok(abelian_formula(b, epsilon))
}

/// Abelian bound inputs for a torus sublattice, with `|H*| = |Γ|/|H|`.
pub fn abelian_inputs(h: &Subgroup, c: f64) -> Result<AbelianBoundInputs> {
    match (h.kind(), h.group().spec()) {
        (SubgroupKind::TorusSublattice { periods }, GroupSpec::ScaledTorus { n, .. }) => Ok(AbelianBoundInputs {
            n,
            r: periods.len() as u32,
            period_product: periods.iter().product(),
            subgroup_order: h.order(),
            annihilator_order: h.index(),
            c,
        }),
        _ => Err(domain!("abelian bound needs a torus sublattice")),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub group: GroupSpec,
    pub subgroup: SubgroupKind,
    pub noise: NoiseSpec,
    pub trials: u64,
    pub seed: u64,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub l: Option<f64>,
    #[serde(default)]
    pub delta: Option<f64>,
    /// Optional subset of the dual for the restricted error.
    #[serde(default)]
    pub restriction: Option<Vec<IrrepLabel>>,
}

/// Upper limit on `trials · |H|` for one Monte Carlo run.
pub const SAMPLE_CAP: u64 = 1 << 30;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub err_sq: f64,
    pub bound_rhs: Option<f64>,
    pub exceeded: bool,
    pub seed_lo: u64,
    pub seed_hi: u64,
    #[serde(skip)]
    pub per_label: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelProfile {
    pub label: IrrepLabel,
    pub dim: usize,
    pub mean: f64,
    pub max: f64,
    pub pointwise_bound: Option<f64>,
    /// Trials below the global bound whose per-label error exceeds the pointwise bound.
    pub pointwise_violations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestrictedSummary {
    pub labels: Vec<IrrepLabel>,
    pub mean_err_sq: f64,
    pub max_err_sq: f64,
    pub rhs: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloSummary {
    pub spec: ExperimentSpec,
    pub group_order: u64,
    pub subgroup_order: u64,
    pub max_dim: usize,
    pub variance_constant: f64,
    pub dual_norm_bound: Option<BoundValue>,
    pub delta_bound: Option<f64>,
    pub exceedances: u64,
    pub exceedance_frequency: Option<f64>,
    pub mean_err_sq: f64,
    pub median_err_sq: f64,
    pub p95_err_sq: f64,
    pub max_err_sq: f64,
    pub per_label: Vec<LabelProfile>,
    pub restricted: Option<RestrictedSummary>,
}

#[derive(Debug, Clone)]
pub struct MonteCarloOutput {
    pub summary: MonteCarloSummary,
    pub trials: Vec<TrialRecord>,
    pub wall_time_s: f64,
}

/// Runs `spec.trials` independent realizations. Trial `t` draws from the
/// stream `TrialSeed::derive(spec.seed, t)`, so results do not depend on
/// the execution policy or thread count.
pub fn monte_carlo(spec: &ExperimentSpec, policy: ExecPolicy) -> Result<MonteCarloOutput> {
    let start = Instant::now();
    if spec.trials == 0 {
        return Err(domain!("trials must be positive"));
    }
    let group = FiniteGroup::new(spec.group)?;
    let h = Subgroup::new(&group, spec.subgroup.clone())?;
    if spec.trials.saturating_mul(h.order()) > SAMPLE_CAP {
        return Err(Error::Resource(format!("trials x |H| exceeds {SAMPLE_CAP}")));
    }
    let dual = enumerate_dual(&group)?;
    let law = NoiseLaw::new(&group, spec.noise.clone())?;
    let c = law.variance_constant(&dual, policy);
    let inputs = BoundInputs { group_order: group.order(), subgroup_order: h.order(), max_dim: dual.max_dim(), c };
    let dual_norm_bound = match (spec.epsilon, spec.l) {
        (Some(e), Some(l)) => Some(bound_dual_norm(&inputs, e, l)?),
        (None, None) => None,
        _ => return Err(domain!("epsilon and l must be given together")),
    };
    let delta_bound = spec.delta.map(|d| bound_dual_norm_delta(&inputs, d)).transpose()?;
    let restriction: Option<Vec<usize>> = spec
        .restriction
        .as_ref()
        .map(|labels| {
            labels
                .iter()
                .map(|l| dual.position(l).ok_or_else(|| domain!("restriction label {l:?} is not in the dual")))
                .collect::<Result<Vec<_>>>()
        })
        .transpose()?;

    let ctx = RecoveryContext::new(&h, &law, &dual, policy)?;
    let rhs = dual_norm_bound.map(|b| b.rhs);
    let trials = try_map_indexed(policy, spec.trials as usize, |t| {
        let seed = TrialSeed::derive(spec.seed, t as u64);
        let mut rng = seed.rng();
        let r = realize(&h, &law, &mut rng)?;
        let stats = ctx.error_statistic(&r)?;
        Ok::<_, Error>(TrialRecord {
            trial: t as u64,
            err_sq: stats.err_sq,
            bound_rhs: rhs,
            exceeded: rhs.is_some_and(|b| stats.err_sq > b),
            seed_lo: seed.lo,
            seed_hi: seed.hi,
            per_label: stats.per_label,
        })
    })?;

    let n = trials.len() as f64;
    let errs: Vec<f64> = trials.iter().map(|t| t.err_sq).collect();
    let mut sorted = errs.clone();
    sorted.sort_by(f64::total_cmp);
    let nearest_rank = |q: f64| sorted[((q * n).ceil() as usize).clamp(1, sorted.len()) - 1];
    let exceedances = trials.iter().filter(|t| t.exceeded).count() as u64;

    let factor = dual_norm_bound.map(|_| {
        let e = spec.epsilon.unwrap_or(0.0);
        let hh = h.order() as f64;
        hh.powi(4) / (group.order() as f64).powi(2) * (e + 4.0 * c * c / hh)
    });
    let per_label = dual
        .irreps()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let vals = trials.iter().map(|t| t.per_label[i]);
            let bound = factor.map(|f| f * (p.dim() * p.dim()) as f64);
            let violations =
                bound.map(|b| trials.iter().filter(|t| !t.exceeded && t.per_label[i] > b).count() as u64).unwrap_or(0);
            LabelProfile {
                label: p.label().clone(),
                dim: p.dim(),
                mean: vals.clone().sum::<f64>() / n,
                max: vals.fold(0.0, f64::max),
                pointwise_bound: bound,
                pointwise_violations: violations,
            }
        })
        .collect();

    let restricted = restriction.map(|pos| {
        let g = group.order() as f64;
        let restricted_err: Vec<f64> = trials
            .iter()
            .map(|t| pos.iter().map(|&i| dual.irreps()[i].dim() as f64 * t.per_label[i]).sum::<f64>() / g)
            .collect();
        let sum_d3: f64 = pos.iter().map(|&i| (dual.irreps()[i].dim() as f64).powi(3)).sum();
        RestrictedSummary {
            labels: pos.iter().map(|&i| dual.irreps()[i].label().clone()).collect(),
            mean_err_sq: restricted_err.iter().sum::<f64>() / n,
            max_err_sq: restricted_err.iter().copied().fold(0.0, f64::max),
            rhs: factor.map(|f| f / g * sum_d3),
        }
    });

    let summary = MonteCarloSummary {
        spec: spec.clone(),
        group_order: group.order(),
        subgroup_order: h.order(),
        max_dim: dual.max_dim(),
        variance_constant: c,
        dual_norm_bound,
        delta_bound,
        exceedances,
        exceedance_frequency: dual_norm_bound.map(|_| exceedances as f64 / n),
        mean_err_sq: errs.iter().sum::<f64>() / n,
        median_err_sq: nearest_rank(0.5),
        p95_err_sq: nearest_rank(0.95),
        max_err_sq: sorted[sorted.len() - 1],
        per_label,
        restricted,
    };
    Ok(MonteCarloOutput { summary, trials, wall_time_s: start.elapsed().as_secs_f64() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AbelianTrial {
    pub trial: u64,
    /// `max_k |F(δ_{H_ξ})(k) − F(δ_H)(k)·E[e(ξ,k)]|`.
    pub sup_err: f64,
    pub exceeded: bool,
    pub seed_lo: u64,
    pub seed_hi: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AbelianSummary {
    pub bound: BoundValue,
    pub variance_constant: f64,
    pub trials: u64,
    pub within_bound: u64,
    pub within_fraction: f64,
    pub max_sup_err: f64,
}

/// Sup-norm Monte Carlo on a torus with a sublattice, using FFTs of the
/// realization histogram. Preconditions of [`bound_abelian`] apply.
pub fn monte_carlo_abelian(
    spec: &ExperimentSpec,
    epsilon: f64,
    policy: ExecPolicy,
) -> Result<(AbelianSummary, Vec<AbelianTrial>)> {
    let group = FiniteGroup::new(spec.group)?;
    if !matches!(spec.group, GroupSpec::ScaledTorus { .. }) {
        return Err(domain!("abelian harness needs a scaled torus"));
    }
    let h = Subgroup::new(&group, spec.subgroup.clone())?;
    let law = NoiseLaw::new(&group, spec.noise.clone())?;
    let n = group.elements()?.len();
    let sides = group.moduli().to_vec();

    let dense = |pairs: &mut dyn Iterator<Item = (&GroupElement, f64)>| {
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        for (g, w) in pairs {
            v[group.index_of(g)] += w;
        }
        torus_fft(&mut v, &sides, false);
        v
    };
    let inv_order = 1.0 / n as f64;
    let subgroup_hat: Vec<Complex64> =
        dense(&mut h.elements()?.iter().map(|g| (g, 1.0))).into_iter().map(|z| z * inv_order).collect();
    let expectation = dense(&mut law.support().iter().zip(law.probabilities().iter().copied()));
    let c = expectation.iter().map(|e| (1.0 - e.norm_sqr()).max(0.0)).fold(0.0, f64::max);
    let bound = bound_abelian(&abelian_inputs(&h, c)?, epsilon)?;

    let trials = try_map_indexed(policy, spec.trials as usize, |t| {
        let seed = TrialSeed::derive(spec.seed, t as u64);
        let mut rng = seed.rng();
        let r = realize(&h, &law, &mut rng)?;
        let hat = dense(&mut r.perturbed().map(|g| (g, 1.0)));
        let sup_err = hat
            .iter()
            .zip(subgroup_hat.iter().zip(&expectation))
            .map(|(a, (s, e))| (a * inv_order - s * e).norm())
            .fold(0.0, f64::max);
        Ok::<_, Error>(AbelianTrial {
            trial: t as u64,
            sup_err,
            exceeded: sup_err > bound.rhs,
            seed_lo: seed.lo,
            seed_hi: seed.hi,
        })
    })?;
    let within = trials.iter().filter(|t| !t.exceeded).count() as u64;
    let summary = AbelianSummary {
        bound,
        variance_constant: c,
        trials: spec.trials,
        within_bound: within,
        within_fraction: within as f64 / spec.trials as f64,
        max_sup_err: trials.iter().map(|t| t.sup_err).fold(0.0, f64::max),
    };
    Ok((summary, trials))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionMethod {
    /// Residues of the exponent modulo 3 along each `⟨g⟩`-coset; used when
    /// `3 | ord(g)`.
    OrbitResidues,
    /// Proper 3-colouring of each cycle of `h ↦ g⁻¹h`; used otherwise.
    CycleColouring,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Partition {
    pub parts: [Vec<GroupElement>; 3],
    pub method: PartitionMethod,
}

/// Splits `H` into three parts such that no part contains both `h` and
/// `g⁻¹h`. Within a part the pairs `{h, g⁻¹h}` are therefore pairwise disjoint.
pub fn orbit_partition(h: &Subgroup, g: &GroupElement) -> Result<Partition> {
    let group = h.group();
    if !h.contains(g) {
        return Err(domain!("partition element must lie in the subgroup"));
    }
    if *g == group.identity() {
        return Err(precondition!("partition element must differ from the identity"));
    }
    let elems = h.elements()?;
    let t = group.element_order(g)? as usize;
    let g_inv = group.inv(g);
    let method = if t.is_multiple_of(3) { PartitionMethod::OrbitResidues } else { PartitionMethod::CycleColouring };
    let mut seen = vec![false; elems.len()];
    let mut parts: [Vec<GroupElement>; 3] = Default::default();
    let mut cycle_no = 0usize;
    for start in 0..elems.len() {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::with_capacity(t);
        let mut x = elems[start].clone();
        for _ in 0..t {
            let idx = elems.binary_search(&x).map_err(|_| Error::Invariant("coset left the subgroup".into()))?;
            seen[idx] = true;
            cycle.push(x.clone());
            x = group.op(&g_inv, &x);
        }
        let offset = match method {
            PartitionMethod::OrbitResidues => 0,
            PartitionMethod::CycleColouring => cycle_no % 3,
        };
        for (k, x) in cycle.into_iter().enumerate() {
            let mut colour = (k + offset) % 3;
            // A cycle of length ≡ 1 (mod 3) would close with two equal colours.
            if method == PartitionMethod::CycleColouring && t % 3 == 1 && k == t - 1 {
                colour = (offset + 1) % 3;
            }
            parts[colour].push(x);
        }
        cycle_no += 1;
    }
    for p in parts.iter_mut() {
        p.sort();
    }
    Ok(Partition { parts, method })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AutocorrelationReport {
    /// `‖Ĝ(ρ)‖²_F`.
    pub lhs: f64,
    /// `(|H|/|Γ|)·Tr γ̂(ρ)`.
    pub rhs: Complex64,
    pub deviation: f64,
    pub support_in_subgroup: bool,
}

/// Upper limit on `|Γ|` for the brute-force autocorrelation check.
pub const AUTOCORRELATION_CAP: u64 = 1 << 12;

/// Checks `‖Ĝ(ρ)‖²_F = (|H|/|Γ|)·Tr γ̂(ρ)` for the centred entry function
/// `G(h) = π_lj(ξ_h) − E[π_lj(ξ)]` on `H` (zero elsewhere) and its
/// autocorrelation `γ(g) = (1/|H|) Σ_h G(h)·conj G(g⁻¹h)`.
pub fn autocorrelation_check(
    r: &PerturbationRealization,
    law: &NoiseLaw,
    pi: &Irrep,
    entry: (usize, usize),
    rho: &Irrep,
    group: &FiniteGroup,
) -> Result<AutocorrelationReport> {
    if group.order() > AUTOCORRELATION_CAP {
        return Err(Error::Resource(format!("autocorrelation check is limited to |G| <= {AUTOCORRELATION_CAP}")));
    }
    let (l, j) = entry;
    if l >= pi.dim() || j >= pi.dim() {
        return Err(domain!("entry ({l}, {j}) outside a {}-dimensional irrep", pi.dim()));
    }
    let mean = law.expectation(pi).get(l, j);
    let n = group.order() as usize;
    let mut g_fn = vec![Complex64::new(0.0, 0.0); n];
    let mut in_h = vec![false; n];
    for ((h, _), xi) in r.pairs.iter().zip(r.noise(group)) {
        let i = group.index_of(h);
        g_fn[i] = pi.monomial(&xi).to_dense().get(l, j) - mean;
        in_h[i] = true;
    }
    let h_order = r.pairs.len() as f64;
    let inv_order = 1.0 / n as f64;
    let g_hat = accumulate(rho, r.pairs.iter().map(|(h, _)| (h, g_fn[group.index_of(h)])), inv_order);
    let lhs = g_hat.frobenius_sq();

    let gamma: Vec<Complex64> = (0..n)
        .map(|gi| {
            let g_inv = group.inv(&group.element_at(gi));
            r.pairs
                .iter()
                .map(|(h, _)| g_fn[group.index_of(h)] * g_fn[group.index_of(&group.op(&g_inv, h))].conj())
                .sum::<Complex64>()
                / h_order
        })
        .collect();
    let elems = group.elements()?;
    let gamma_hat = accumulate(rho, elems.iter().zip(gamma.iter().copied()), inv_order);
    let rhs = gamma_hat.trace() * (h_order * inv_order);
    let support_in_subgroup = gamma.iter().zip(&in_h).all(|(v, inside)| *inside || v.norm() <= 1e-12);
    Ok(AutocorrelationReport { lhs, rhs, deviation: (rhs - lhs).norm(), support_in_subgroup })
}

/// Default singular-value floor for [`denoise`].
pub const DEFAULT_TAU: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DenoiseResult {
    pub estimate: SpectralField,
    /// `true` where `E[π(ξ)]` was invertible and the estimate is meaningful.
    pub recovered: Vec<bool>,
    pub sigma_min: Vec<f64>,
}

/// Estimates `F(δ_H)(π) ≈ F(δ_{H_ξ})(π)·E[π(ξ)]⁻¹` from one realization.
/// Labels with `σ_min(E[π(ξ)]) < tau` are left at zero and masked.
pub fn denoise(
    r: &PerturbationRealization,
    law: &NoiseLaw,
    dual: &DualSpace,
    tau: f64,
    policy: ExecPolicy,
) -> Result<DenoiseResult> {
    let observed = dft_direct(&GroupFunction::multiset(r.perturbed()), dual, policy)?;
    let per = map_indexed(policy, dual.len(), |i| {
        let e = law.expectation(&dual.irreps()[i]);
        let s = e.min_singular_value();
        if s >= tau {
            e.inverse().map(|inv| (&observed.blocks[i] * &inv, true, s))
        } else {
            Ok((CMatrix::zeros(e.dim), false, s))
        }
    });
    let mut estimate = SpectralField::zeros(dual);
    let mut recovered = Vec::with_capacity(dual.len());
    let mut sigma_min = Vec::with_capacity(dual.len());
    for (i, item) in per.into_iter().enumerate() {
        let (block, ok, s) = item?;
        estimate.blocks[i] = block;
        recovered.push(ok);
        sigma_min.push(s);
    }
    Ok(DenoiseResult { estimate, recovered, sigma_min })
}
