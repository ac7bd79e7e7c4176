//! Command implementations. Each writes its artifacts into `out_dir` and
//! returns the names of the files it wrote.

use crate::config::{FunctionSpec, RunConfig};
use crate::svg;
use groupspectra::limits::{convergence_sweep, SweepRow, SweepSpec, SweepTarget};
use groupspectra::noise::NoiseLaw;
use groupspectra::recovery::{
    abelian_inputs, bound_abelian, bound_dual_norm, bound_dual_norm_delta, denoise, monte_carlo, monte_carlo_abelian,
    realize, BoundInputs, ExperimentSpec, DEFAULT_TAU,
};
use groupspectra::repr::{annihilator, clifford_check, schur_orthogonality_check, subgroup_dual};
use groupspectra::rng::TrialSeed;
use groupspectra::spectra::{dft, subgroup_spectrum_closed_form, GroupFunction};
use groupspectra::{enumerate_dual, Error, ExecPolicy, FiniteGroup, GroupSpec, Subgroup};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use std::fs;
use std::path::Path;

const POLICY: ExecPolicy = ExecPolicy::Parallel;

#[derive(Debug)]
pub enum RunError {
    Config(String),
    Lib(Error),
    Io(String),
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Lib(e)
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e.to_string())
    }
}

impl From<csv::Error> for RunError {
    fn from(e: csv::Error) -> Self {
        RunError::Io(e.to_string())
    }
}

type Out = Result<Vec<String>, RunError>;

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<String, RunError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| RunError::Io(e.to_string()))?;
    text.push('\n');
    fs::write(dir.join(name), text)?;
    Ok(name.to_string())
}

fn write_csv<T: Serialize>(dir: &Path, name: &str, rows: &[T]) -> Result<String, RunError> {
    let mut w = csv::Writer::from_path(dir.join(name))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(name.to_string())
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<String, RunError> {
    fs::write(dir.join(name), text)?;
    Ok(name.to_string())
}

pub fn run(config: RunConfig, out_dir: &Path) -> Out {
    fs::create_dir_all(out_dir)?;
    match config {
        RunConfig::Reps { group, subgroup, schur_check } => reps(group, subgroup, schur_check, out_dir),
        RunConfig::Dft { group, function } => run_dft(group, function, out_dir),
        RunConfig::Perturb {
            group,
            subgroup,
            noise,
            trials,
            seed,
            epsilon,
            l,
            delta,
            restriction,
            abelian_epsilon,
            plot,
        } => {
            let spec = ExperimentSpec { group, subgroup, noise, trials, seed, epsilon, l, delta, restriction };
            perturb(&spec, abelian_epsilon, plot, out_dir)
        }
        RunConfig::Bound { group, subgroup, noise, epsilon, l, delta, abelian_epsilon } => {
            bound(group, subgroup, noise, (epsilon, l, delta, abelian_epsilon), out_dir)
        }
        RunConfig::Denoise { group, subgroup, noise, seed, tau } => {
            run_denoise(group, subgroup, noise, seed, tau.unwrap_or(DEFAULT_TAU), out_dir)
        }
        RunConfig::Limit { target, ladder, quadrature_tol, perturbed, plot } => {
            let spec = SweepSpec { target, ladder, quadrature_tol: quadrature_tol.unwrap_or(1e-8) };
            limit(&spec, perturbed.as_ref(), plot, out_dir)
        }
    }
}

fn reps(spec: GroupSpec, subgroup: Option<groupspectra::SubgroupKind>, schur: bool, dir: &Path) -> Out {
    let group = FiniteGroup::new(spec)?;
    let dual = enumerate_dual(&group)?;
    let labels: Vec<Value> = dual.irreps().iter().map(|p| json!({ "label": p.label(), "dim": p.dim() })).collect();
    let mut doc = json!({
        "group": spec,
        "order": group.order(),
        "irrep_count": dual.len(),
        "sum_dim_sq": dual.sum_dim_sq(),
        "max_dim": dual.max_dim(),
        "irreps": labels,
    });
    if schur {
        doc["schur"] = serde_json::to_value(schur_orthogonality_check(&dual, POLICY)?).unwrap();
    }
    if let Some(kind) = subgroup {
        let h = Subgroup::new(&group, kind)?;
        let normal = h.is_normal()?;
        let mut sub = json!({ "kind": h.kind(), "order": h.order(), "index": h.index(), "normal": normal });
        if normal {
            let ann = annihilator(&h, &dual)?;
            let labels: Vec<_> = ann.iter().map(|&i| dual.irreps()[i].label()).collect();
            sub["annihilator"] = serde_json::to_value(labels).unwrap();
            if let Ok(sd) = subgroup_dual(&h) {
                let rows = clifford_check(&h, &dual, &sd)?;
                sub["subgroup_characters"] = sd
                    .characters
                    .iter()
                    .map(|c| json!({ "name": c.name, "degree": c.degree }))
                    .collect::<Vec<_>>()
                    .into();
                sub["restrictions"] = serde_json::to_value(rows).unwrap();
            }
        }
        doc["subgroup"] = sub;
    }
    Ok(vec![write_json(dir, "reps.json", &doc)?])
}

fn build_function(group: &FiniteGroup, f: FunctionSpec) -> Result<GroupFunction, RunError> {
    Ok(match f {
        FunctionSpec::Indicator { subgroup } => GroupFunction::indicator(&Subgroup::new(group, subgroup)?)?,
        FunctionSpec::Multiset { elements } => {
            for g in &elements {
                group.check(g)?;
            }
            GroupFunction::multiset(elements.iter())
        }
        FunctionSpec::Values { values } => {
            GroupFunction::Dense(values.iter().map(|v| Complex64::new(v[0], v[1])).collect())
        }
        FunctionSpec::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = group.elements()?.len();
            GroupFunction::Dense(
                (0..n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect(),
            )
        }
    })
}

fn run_dft(spec: GroupSpec, function: FunctionSpec, dir: &Path) -> Out {
    let group = FiniteGroup::new(spec)?;
    let dual = enumerate_dual(&group)?;
    let f = build_function(&group, function)?;
    let field = dft(&f, &dual, POLICY)?;
    let mut bin = Vec::new();
    field.write_binary(&mut bin)?;
    fs::write(dir.join("spectrum.bin"), bin)?;
    Ok(vec![write_json(dir, "spectrum.json", &field)?, "spectrum.bin".into()])
}

fn perturb(spec: &ExperimentSpec, abelian_epsilon: Option<f64>, plot: bool, dir: &Path) -> Out {
    let out = monte_carlo(spec, POLICY)?;
    let mut files = vec![write_json(dir, "summary.json", &out.summary)?, write_csv(dir, "trials.csv", &out.trials)?];
    if let Some(eps) = abelian_epsilon {
        let (summary, trials) = monte_carlo_abelian(spec, eps, POLICY)?;
        files.push(write_json(dir, "abelian_summary.json", &summary)?);
        files.push(write_csv(dir, "abelian_trials.csv", &trials)?);
    }
    if plot {
        let errs: Vec<f64> = out.trials.iter().map(|t| t.err_sq).collect();
        files.push(write_text(
            dir,
            "err_sq_histogram.svg",
            &svg::histogram(&errs, 30, "squared dual-norm error", "err^2"),
        )?);
    }
    Ok(files)
}

fn bound(
    spec: GroupSpec,
    kind: groupspectra::SubgroupKind,
    noise: groupspectra::noise::NoiseSpec,
    (epsilon, l, delta, abelian_epsilon): (Option<f64>, Option<f64>, Option<f64>, Option<f64>),
    dir: &Path,
) -> Out {
    let group = FiniteGroup::new(spec)?;
    let h = Subgroup::new(&group, kind)?;
    let dual = enumerate_dual(&group)?;
    let law = NoiseLaw::new(&group, noise)?;
    let c = law.variance_constant(&dual, POLICY);
    let inputs = BoundInputs { group_order: group.order(), subgroup_order: h.order(), max_dim: dual.max_dim(), c };
    let mut doc = json!({ "inputs": inputs });
    match (epsilon, l) {
        (Some(e), Some(l)) => doc["dual_norm_bound"] = serde_json::to_value(bound_dual_norm(&inputs, e, l)?).unwrap(),
        (None, None) => {}
        _ => return Err(RunError::Config("epsilon and l must be given together".into())),
    }
    if let Some(d) = delta {
        doc["delta_bound"] = json!({ "delta": d, "rhs": bound_dual_norm_delta(&inputs, d)? });
    }
    if let Some(e) = abelian_epsilon {
        let a = abelian_inputs(&h, c)?;
        doc["abelian"] = json!({ "inputs": a, "value": bound_abelian(&a, e)? });
    }
    Ok(vec![write_json(dir, "bound.json", &doc)?])
}

fn run_denoise(
    spec: GroupSpec,
    kind: groupspectra::SubgroupKind,
    noise: groupspectra::noise::NoiseSpec,
    seed: u64,
    tau: f64,
    dir: &Path,
) -> Out {
    let group = FiniteGroup::new(spec)?;
    let h = Subgroup::new(&group, kind)?;
    let dual = enumerate_dual(&group)?;
    let law = NoiseLaw::new(&group, noise)?;
    let r = realize(&h, &law, &mut TrialSeed::derive(seed, 0).rng())?;
    let result = denoise(&r, &law, &dual, tau, POLICY)?;
    let truth = if h.is_normal()? { Some(subgroup_spectrum_closed_form(&h, &dual)?) } else { None };
    let max_error = truth.as_ref().map(|t| {
        t.blocks
            .iter()
            .zip(&result.estimate.blocks)
            .zip(&result.recovered)
            .filter(|(_, ok)| **ok)
            .map(|((a, b), _)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    });
    let doc = json!({
        "tau": tau,
        "recovered_count": result.recovered.iter().filter(|x| **x).count(),
        "irrep_count": dual.len(),
        "max_error_on_recovered": max_error,
        "result": result,
    });
    Ok(vec![write_json(dir, "denoise.json", &doc)?])
}

#[derive(Serialize)]
struct SweepCsvRow {
    m: u64,
    #[serde(rename = "N")]
    n: u64,
    c_m: Option<u64>,
    discrete_re: f64,
    discrete_im: f64,
    continuum_re: f64,
    continuum_im: f64,
    gap: f64,
}

fn limit(spec: &SweepSpec, perturbed: Option<&groupspectra::limits::PerturbedSweep>, plot: bool, dir: &Path) -> Out {
    let rows: Vec<SweepRow> = convergence_sweep(spec, perturbed, POLICY)?;
    let csv_rows: Vec<SweepCsvRow> = rows
        .iter()
        .map(|r| SweepCsvRow {
            m: r.m,
            n: r.n,
            c_m: r.c_m,
            discrete_re: r.discrete.re,
            discrete_im: r.discrete.im,
            continuum_re: r.continuum.re,
            continuum_im: r.continuum.im,
            gap: r.gap,
        })
        .collect();
    let manifest = json!({ "spec": spec, "perturbed": perturbed, "rows": rows });
    let mut files = vec![write_csv(dir, "sweep.csv", &csv_rows)?, write_json(dir, "sweep.json", &manifest)?];
    if plot {
        let rung_axis = |r: &SweepRow| match spec.target {
            SweepTarget::Euclidean { .. } => (r.m * r.n) as f64,
            _ => r.m as f64,
        };
        let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
        for r in &rows {
            let name = format!("N = {}", r.n);
            let point = (rung_axis(r), r.gap);
            match series.iter_mut().find(|s| s.0 == name) {
                Some(s) => s.1.push(point),
                None => series.push((name, vec![point])),
            }
        }
        let x_label = if matches!(spec.target, SweepTarget::Euclidean { .. }) { "M N" } else { "m" };
        files.push(write_text(
            dir,
            "sweep_gap.svg",
            &svg::lines(&series, true, "gap to continuum reference", x_label, "gap"),
        )?);
    }
    Ok(files)
}
