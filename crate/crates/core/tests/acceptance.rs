//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

mod common;

use common::{catalog, random_values};
use groupspectra::limits::{
    convergence_sweep, ContinuumNoise, CoordLaw, PerturbedSweep, Rung, SweepSpec, SweepTarget, TestFunction,
};
use groupspectra::noise::{NoiseLaw, NoiseSpec};
use groupspectra::phase::divisors;
use groupspectra::recovery::{
    autocorrelation_check, monte_carlo, monte_carlo_abelian, orbit_partition, realize, ExperimentSpec, PartitionMethod,
    RecoveryContext,
};
use groupspectra::repr::schur_orthogonality_check;
use groupspectra::rng::TrialSeed;
use groupspectra::spectra::{
    convolve, dft, dft_direct, idft, inner_product_dual, subgroup_spectrum_closed_form, GroupFunction,
};
use groupspectra::{enumerate_dual, ExecPolicy, FiniteGroup, GroupElement, GroupSpec, Subgroup, SubgroupKind};
use num_complex::Complex64;
use std::collections::HashSet;
use std::time::Instant;

const POLICY: ExecPolicy = ExecPolicy::Parallel;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// Subgroups of every kind the library can build for `g`.
fn subgroups_of(g: &FiniteGroup) -> Vec<Subgroup> {
    let mut kinds = vec![SubgroupKind::Trivial, SubgroupKind::Whole];
    match g.spec() {
        GroupSpec::ScaledTorus { d, n, .. } => {
            for p in divisors(n) {
                for r in 1..=d as usize {
                    kinds.push(SubgroupKind::TorusSublattice { periods: vec![p; r] });
                }
            }
        }
        GroupSpec::Heisenberg { m, n } => {
            kinds.push(SubgroupKind::HeisenbergIntegerPoints);
            kinds.push(SubgroupKind::Generated { generators: vec![GroupElement::new(&[0, 0, 1])] });
            let q = (m * n) as u32;
            if q > 1 {
                kinds.push(SubgroupKind::Generated { generators: vec![GroupElement::new(&[1, 0, 0])] });
                kinds.push(SubgroupKind::Generated { generators: vec![GroupElement::new(&[0, 1, 0])] });
            }
        }
        GroupSpec::Dihedral { n } => {
            for t in divisors(n) {
                kinds.push(SubgroupKind::DihedralRotations { order: t });
            }
            kinds.push(SubgroupKind::Generated { generators: vec![GroupElement::new(&[0, 1])] });
        }
    }
    let mut seen = HashSet::new();
    kinds
        .into_iter()
        .filter_map(|k| Subgroup::new(g, k).ok())
        .filter(|h| seen.insert(h.elements().unwrap().to_vec()))
        .collect()
}

fn binomial_sigma(p: f64, n: f64) -> f64 {
    (p.clamp(0.0, 1.0) * (1.0 - p.clamp(0.0, 1.0)) / n).sqrt()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut specs = Vec::new();
    for q in [2u64, 3, 4, 6, 8] {
        for m in divisors(q) {
            specs.push(GroupSpec::Heisenberg { m, n: q / m });
        }
    }
    for d in 1u32..=4 {
        for q in 1u64..=128 {
            if q.pow(d) > 1 << 14 {
                break;
            }
            let m = if q % 2 == 0 { 2 } else { 1 };
            specs.push(GroupSpec::ScaledTorus { d, m, n: q / m });
        }
    }
    specs.push(GroupSpec::ScaledTorus { d: 1, m: 4, n: 4096 });
    for n in 1..=64 {
        specs.push(GroupSpec::Dihedral { n });
    }
    let mut failures = Vec::new();
    for s in &specs {
        let g = FiniteGroup::new(*s).unwrap();
        match enumerate_dual(&g) {
            Ok(dual) if dual.sum_dim_sq() == g.order() => {}
            _ => failures.push(format!("{s:?}")),
        }
    }
    let t = start.elapsed().as_secs_f64();
    outcome(
        failures.is_empty() && t < 10.0,
        format!(
            "{} groups, sum d^2 = |G| for all but {} ({failures:?}), {t:.2}s (limit 10s)",
            specs.len(),
            failures.len()
        ),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut specs: Vec<GroupSpec> = catalog(4096)
        .into_iter()
        .filter(|s| match s {
            GroupSpec::ScaledTorus { .. } => FiniteGroup::new(*s).unwrap().order() <= 1024,
            GroupSpec::Dihedral { n } => *n <= 1024,
            GroupSpec::Heisenberg { .. } => true,
        })
        .collect();
    specs.push(GroupSpec::Dihedral { n: 1024 });
    let mut worst_entry: f64 = 0.0;
    let mut worst_char: f64 = 0.0;
    for s in &specs {
        let dual = enumerate_dual(&FiniteGroup::new(*s).unwrap()).unwrap();
        let r = schur_orthogonality_check(&dual, POLICY).unwrap();
        worst_entry = worst_entry.max(r.max_entry_deviation);
        worst_char = worst_char.max(r.max_character_deviation);
    }
    let t = start.elapsed().as_secs_f64();
    outcome(
        worst_entry <= 1e-10 && worst_char <= 1e-10 && t < 60.0,
        format!(
            "{} groups up to order 4096, max entry deviation {worst_entry:.2e}, max character deviation {worst_char:.2e} (tol 1e-10), {t:.2}s (limit 60s)",
            specs.len()
        ),
    )
}

fn criterion_3() -> Outcome {
    let specs = [
        GroupSpec::ScaledTorus { d: 2, m: 2, n: 4 },
        GroupSpec::Heisenberg { m: 2, n: 3 },
        GroupSpec::Dihedral { n: 12 },
    ];
    let (mut plan, mut inv, mut conv): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for s in specs {
        let g = FiniteGroup::new(s).unwrap();
        let dual = enumerate_dual(&g).unwrap();
        let n = g.order() as usize;
        for pair in 0..100u64 {
            let f = random_values(n, 2 * pair);
            let h = random_values(n, 2 * pair + 1);
            let ff = dft(&GroupFunction::Dense(f.clone()), &dual, POLICY).unwrap();
            let fh = dft(&GroupFunction::Dense(h.clone()), &dual, POLICY).unwrap();
            let direct: Complex64 = f.iter().zip(&h).map(|(a, b)| a * b.conj()).sum();
            let spectral = inner_product_dual(&ff, &fh, &dual).unwrap() * (n * n) as f64;
            plan = plan.max((spectral - direct).norm() / direct.norm());

            let back = idft(&ff, &dual, POLICY).unwrap();
            let norm = f.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let diff = back.iter().zip(&f).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            inv = inv.max(diff / norm);

            let c = convolve(&GroupFunction::Dense(f), &GroupFunction::Dense(h), &g).unwrap();
            let fc = dft(&GroupFunction::Dense(c), &dual, POLICY).unwrap();
            let (mut num, mut den) = (0.0, 0.0);
            for ((x, a), b) in fc.blocks.iter().zip(&ff.blocks).zip(&fh.blocks) {
                let expect = (a * b).scale_complex(Complex64::new(n as f64, 0.0));
                num += (x - &expect).frobenius_sq();
                den += expect.frobenius_sq();
            }
            conv = conv.max((num / den).sqrt());
        }
    }
    outcome(
        plan <= 1e-10 && inv <= 1e-10 && conv <= 1e-10,
        format!("3 families x 100 pairs, relative errors: Plancherel {plan:.2e}, inversion {inv:.2e}, convolution {conv:.2e} (tol 1e-10)"),
    )
}

fn criterion_4() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for s in catalog(4096) {
        let g = FiniteGroup::new(s).unwrap();
        let dual = enumerate_dual(&g).unwrap();
        for h in subgroups_of(&g) {
            if !h.is_normal().unwrap() {
                continue;
            }
            let closed = subgroup_spectrum_closed_form(&h, &dual).unwrap();
            let direct = dft_direct(&GroupFunction::indicator(&h).unwrap(), &dual, POLICY).unwrap();
            worst = worst.max(closed.max_abs_diff(&direct));
            count += 1;
        }
    }
    outcome(worst <= 1e-12, format!("{count} normal subgroups, max deviation {worst:.2e} (tol 1e-12)"))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let spec = ExperimentSpec {
        group: GroupSpec::Heisenberg { m: 2, n: 4 },
        subgroup: SubgroupKind::HeisenbergIntegerPoints,
        noise: NoiseSpec::UniformOnGroup,
        trials: 2000,
        seed: 20240605,
        epsilon: Some(0.9),
        l: Some(4.0),
        delta: None,
        restriction: None,
    };
    let out = monte_carlo(&spec, POLICY).unwrap();
    let s = &out.summary;
    let c = s.variance_constant;
    let threshold = (12.0 * c * c * 4.0 / s.subgroup_order as f64).sqrt();
    let bound = s.dual_norm_bound.unwrap();
    let allowed_p = 1.0 - bound.prob_floor;
    let freq = s.exceedance_frequency.unwrap();
    let slack = 3.0 * binomial_sigma(allowed_p, 2000.0);
    let t = start.elapsed().as_secs_f64();
    outcome(
        s.group_order == 512 && s.subgroup_order == 64 && 0.9 > threshold && freq <= allowed_p + slack,
        format!(
            "|G|={} |H|={} C={c:.4} eps threshold {threshold:.4} < 0.9, rhs={:.3}, exceedance {freq:.4} <= {allowed_p:.4} + {slack:.4}; mean err^2 {:.4e}, max {:.4e}, {t:.2}s",
            s.group_order, s.subgroup_order, bound.rhs, s.mean_err_sq, s.max_err_sq
        ),
    )
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let elements = (0..4).map(|v| GroupElement::new(&[v])).collect();
    let spec = ExperimentSpec {
        group: GroupSpec::ScaledTorus { d: 1, m: 1, n: 1024 },
        subgroup: SubgroupKind::TorusSublattice { periods: vec![4] },
        noise: NoiseSpec::UniformOnSet { elements },
        trials: 2000,
        seed: 7,
        epsilon: None,
        l: None,
        delta: None,
        restriction: None,
    };
    let (s, _) = monte_carlo_abelian(&spec, 0.9, POLICY).unwrap();
    let floor = s.bound.prob_floor;
    let slack = 3.0 * binomial_sigma(floor, 2000.0);
    let t = start.elapsed().as_secs_f64();
    outcome(
        s.within_fraction >= floor - slack && t < 60.0,
        format!(
            "C={:.4}, rhs={:.4}, within-bound fraction {:.4} >= {floor:.4} - {slack:.4}, max sup error {:.4e}, {t:.2}s (limit 60s)",
            s.variance_constant, s.bound.rhs, s.within_fraction, s.max_sup_err
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut support_ok = true;
    let mut checks = 0;
    for (spec, kind) in [
        (GroupSpec::Dihedral { n: 3 }, SubgroupKind::DihedralRotations { order: 3 }),
        (GroupSpec::Dihedral { n: 4 }, SubgroupKind::DihedralRotations { order: 4 }),
        (
            GroupSpec::Heisenberg { m: 1, n: 2 },
            SubgroupKind::Generated { generators: vec![GroupElement::new(&[0, 0, 1])] },
        ),
    ] {
        let g = FiniteGroup::new(spec).unwrap();
        let h = Subgroup::new(&g, kind).unwrap();
        let dual = enumerate_dual(&g).unwrap();
        let law = NoiseLaw::new(&g, NoiseSpec::UniformOnGroup).unwrap();
        for seed in 0..20 {
            let r = realize(&h, &law, &mut TrialSeed::derive(seed, 0).rng()).unwrap();
            for pi in dual.irreps() {
                for l in 0..pi.dim() {
                    for j in 0..pi.dim() {
                        for rho in dual.irreps() {
                            let rep = autocorrelation_check(&r, &law, pi, (l, j), rho, &g).unwrap();
                            worst = worst.max(rep.deviation);
                            support_ok &= rep.support_in_subgroup;
                            checks += 1;
                        }
                    }
                }
            }
        }
    }
    outcome(
        worst <= 1e-10 && support_ok,
        format!("D3, D4, Heisenberg(1,2) x 20 seeds: {checks} checks, max deviation {worst:.2e} (tol 1e-10), support in H: {support_ok}"),
    )
}

fn criterion_8() -> Outcome {
    let mut subgroups = 0;
    let mut elements = 0u64;
    let mut fallback = 0u64;
    let mut violations = 0u64;
    let mut worst_spread = 0usize;
    for s in catalog(4096) {
        let g = FiniteGroup::new(s).unwrap();
        for h in subgroups_of(&g) {
            if h.order() > 512 {
                continue;
            }
            subgroups += 1;
            for x in h.elements().unwrap() {
                if *x == g.identity() {
                    continue;
                }
                elements += 1;
                let p = orbit_partition(&h, x).unwrap();
                let x_inv = g.inv(x);
                let mut total = 0;
                for part in &p.parts {
                    let set: HashSet<&GroupElement> = part.iter().collect();
                    total += part.len();
                    if part.iter().any(|y| set.contains(&g.op(&x_inv, y))) {
                        violations += 1;
                    }
                }
                if total as u64 != h.order() {
                    violations += 1;
                }
                if p.method == PartitionMethod::OrbitResidues {
                    let sizes = p.parts.iter().map(Vec::len);
                    worst_spread = worst_spread.max(sizes.clone().max().unwrap() - sizes.min().unwrap());
                } else {
                    fallback += 1;
                }
            }
        }
    }
    outcome(
        violations == 0 && worst_spread <= 2,
        format!(
            "{subgroups} subgroups, {elements} elements g, {fallback} via cycle colouring; violations {violations}, max part-size spread {worst_spread} (limit 2)"
        ),
    )
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let mut ladder = Vec::new();
    for n in [6, 12, 24, 48] {
        for m in [2, 4, 8] {
            ladder.push(Rung { m, n });
        }
    }
    let mut pass = true;
    let mut parts = Vec::new();
    for lambda in [0.0, 1.0, 1.0 / 3.0] {
        let spec = SweepSpec {
            target: SweepTarget::Euclidean { d: 1, r: 1, lambda: vec![lambda] },
            ladder: ladder.clone(),
            quadrature_tol: 1e-8,
        };
        let rows = convergence_sweep(&spec, None, POLICY).unwrap();
        let gaps: Vec<f64> = rows.iter().map(|r| r.gap).collect();
        let last = &gaps[gaps.len() - 3..];
        let monotone = last.windows(2).all(|w| w[1] <= w[0] + 1e-12);
        let final_row = rows.last().unwrap();
        pass &= final_row.gap < 0.05 && monotone;
        parts.push(format!(
            "lambda={lambda:.4}: final gap {:.2e}, last three non-increasing {monotone}, printed-scale value {:.4}",
            final_row.gap,
            final_row.printed_scale.unwrap().re
        ));
    }
    let t = start.elapsed().as_secs_f64();
    pass &= t < 30.0;
    outcome(pass, format!("{} (mass-normalized scaling), {t:.2}s (limit 30s)", parts.join("; ")))
}

fn criterion_10() -> Outcome {
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [4, 8] {
        let spec = SweepSpec {
            target: SweepTarget::Heisenberg {
                lambda: 1.0,
                a: 0.0,
                b: 0.0,
                k: 1,
                phi: TestFunction::Triangle { center: 0.0, radius: 1.0 },
                psi: TestFunction::SmoothBump { center: 0.2, radius: 0.8 },
            },
            ladder: [2, 4, 8, 16].iter().map(|&m| Rung { m, n }).collect(),
            quadrature_tol: 1e-8,
        };
        let rows = convergence_sweep(&spec, None, POLICY).unwrap();
        let gaps: Vec<f64> = rows.iter().map(|r| r.gap).collect();
        let monotone = gaps.windows(2).all(|w| w[1] <= w[0] + 1e-12);
        let decreasing = gaps[gaps.len() - 1] < gaps[0];
        let final_gap = *gaps.last().unwrap();
        pass &= monotone && decreasing && final_gap < 0.1;
        let shown: Vec<String> = gaps.iter().map(|g| format!("{g:.3e}")).collect();
        parts.push(format!("N={n}: gaps [{}]", shown.join(", ")));
    }
    let t = start.elapsed().as_secs_f64();
    pass &= t < 300.0;
    outcome(pass, format!("{} (final < 0.1, non-increasing, last < first), {t:.2}s", parts.join("; ")))
}

fn criterion_11() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for s in catalog(512) {
        let g = FiniteGroup::new(s).unwrap();
        let dual = enumerate_dual(&g).unwrap();
        let elems = g.elements().unwrap();
        let step = (elems.len() / 16).max(1);
        for h in subgroups_of(&g) {
            for xi in elems.iter().step_by(step) {
                let law = NoiseLaw::new(&g, NoiseSpec::Dirac { element: xi.clone() }).unwrap();
                let ctx = RecoveryContext::new(&h, &law, &dual, POLICY).unwrap();
                let r = realize(&h, &law, &mut TrialSeed::derive(0, 0).rng()).unwrap();
                worst = worst.max(ctx.error_statistic(&r).unwrap().err_sq);
                cases += 1;
            }
        }
    }
    outcome(worst <= 1e-24, format!("{cases} (group, subgroup, translate) cases, max err^2 {worst:.2e} (tol 1e-24)"))
}

fn fingerprint() -> String {
    let mc = monte_carlo(
        &ExperimentSpec {
            group: GroupSpec::Heisenberg { m: 1, n: 4 },
            subgroup: SubgroupKind::HeisenbergIntegerPoints,
            noise: NoiseSpec::CoordinateDiscretizedGaussian { sigma: 1.0, radius: 1.5 },
            trials: 300,
            seed: 99,
            epsilon: Some(0.9),
            l: Some(4.0),
            delta: Some(0.1),
            restriction: None,
        },
        POLICY,
    )
    .unwrap();
    let g = FiniteGroup::new(GroupSpec::Dihedral { n: 9 }).unwrap();
    let dual = enumerate_dual(&g).unwrap();
    let spectrum = dft(&GroupFunction::Dense(random_values(18, 4)), &dual, POLICY).unwrap();
    let sweep = convergence_sweep(
        &SweepSpec {
            target: SweepTarget::Heisenberg {
                lambda: 1.0,
                a: 0.0,
                b: 0.0,
                k: 1,
                phi: TestFunction::Triangle { center: 0.0, radius: 1.0 },
                psi: TestFunction::Triangle { center: 0.1, radius: 0.9 },
            },
            ladder: vec![Rung { m: 2, n: 2 }, Rung { m: 4, n: 2 }, Rung { m: 2, n: 4 }],
            quadrature_tol: 1e-8,
        },
        Some(&PerturbedSweep {
            noise: ContinuumNoise {
                coords: vec![CoordLaw::Gaussian { mean: 0.0, sigma: 0.2 }; 3],
                moment_exponent: 4.0,
            },
            seed: 5,
        }),
        POLICY,
    )
    .unwrap();
    format!(
        "{}|{}|{}|{}",
        serde_json::to_string(&mc.summary).unwrap(),
        serde_json::to_string(&mc.trials).unwrap(),
        serde_json::to_string(&spectrum).unwrap(),
        serde_json::to_string(&sweep).unwrap()
    )
}

fn criterion_12() -> Outcome {
    let prints: Vec<String> = [1, 2, 8]
        .iter()
        .map(|&t| rayon::ThreadPoolBuilder::new().num_threads(t).build().unwrap().install(fingerprint))
        .collect();
    let same = prints.iter().all(|p| *p == prints[0]);
    outcome(same, format!("Monte Carlo, DFT and perturbed sweep outputs identical across 1, 2, 8 threads: {same}"))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("representation completeness", criterion_1),
        ("Schur and character orthogonality", criterion_2),
        ("Plancherel, inversion, convolution", criterion_3),
        ("subgroup spectrum closed form", criterion_4),
        ("high-probability dual-norm bound", criterion_5),
        ("abelian sup-norm bound", criterion_6),
        ("autocorrelation identity", criterion_7),
        ("three-part partition", criterion_8),
        ("Euclidean limit", criterion_9),
        ("Heisenberg weak limit", criterion_10),
        ("zero-noise exactness", criterion_11),
        ("thread-count determinism", criterion_12),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        println!("{} [{:>2}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
