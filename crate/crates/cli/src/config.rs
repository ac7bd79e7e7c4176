//! JSON run configuration. One document per run; the `command` field must
//! match the subcommand on the command line.

use groupspectra::limits::{PerturbedSweep, Rung, SweepTarget};
use groupspectra::noise::NoiseSpec;
use groupspectra::{GroupElement, GroupSpec, IrrepLabel, SubgroupKind};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case", deny_unknown_fields)]
pub enum RunConfig {
    Reps {
        group: GroupSpec,
        /// Also report the annihilator of this subgroup and, when available,
        /// the decomposition of each irrep restricted to it.
        #[serde(default)]
        subgroup: Option<SubgroupKind>,
        #[serde(default)]
        schur_check: bool,
    },
    Dft {
        group: GroupSpec,
        function: FunctionSpec,
    },
    Perturb {
        group: GroupSpec,
        subgroup: SubgroupKind,
        noise: NoiseSpec,
        trials: u64,
        seed: u64,
        #[serde(default)]
        epsilon: Option<f64>,
        #[serde(default)]
        l: Option<f64>,
        #[serde(default)]
        delta: Option<f64>,
        #[serde(default)]
        restriction: Option<Vec<IrrepLabel>>,
        /// Run the sup-norm torus harness with this epsilon as well.
        #[serde(default)]
        abelian_epsilon: Option<f64>,
        #[serde(default)]
        plot: bool,
    },
    Bound {
        group: GroupSpec,
        subgroup: SubgroupKind,
        noise: NoiseSpec,
        #[serde(default)]
        epsilon: Option<f64>,
        #[serde(default)]
        l: Option<f64>,
        #[serde(default)]
        delta: Option<f64>,
        #[serde(default)]
        abelian_epsilon: Option<f64>,
    },
    Denoise {
        group: GroupSpec,
        subgroup: SubgroupKind,
        noise: NoiseSpec,
        seed: u64,
        #[serde(default)]
        tau: Option<f64>,
    },
    Limit {
        target: SweepTarget,
        ladder: Vec<Rung>,
        #[serde(default)]
        quadrature_tol: Option<f64>,
        #[serde(default)]
        perturbed: Option<PerturbedSweep>,
        #[serde(default)]
        plot: bool,
    },
}

impl RunConfig {
    pub fn command(&self) -> &'static str {
        match self {
            RunConfig::Reps { .. } => "reps",
            RunConfig::Dft { .. } => "dft",
            RunConfig::Perturb { .. } => "perturb",
            RunConfig::Bound { .. } => "bound",
            RunConfig::Denoise { .. } => "denoise",
            RunConfig::Limit { .. } => "limit",
        }
    }

    pub fn override_seed(&mut self, new_seed: u64) {
        match self {
            RunConfig::Perturb { seed, .. } | RunConfig::Denoise { seed, .. } => *seed = new_seed,
            RunConfig::Limit { perturbed: Some(p), .. } => p.seed = new_seed,
            RunConfig::Dft { function: FunctionSpec::Random { seed }, .. } => *seed = new_seed,
            _ => {}
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    /// Indicator of a subgroup.
    Indicator { subgroup: SubgroupKind },
    /// Unit mass at each listed element, repeats adding up.
    Multiset { elements: Vec<GroupElement> },
    /// Dense values `[re, im]` in lexicographic element order.
    Values { values: Vec<[f64; 2]> },
    /// I.i.d. uniform real and imaginary parts in `[-1, 1)`.
    Random { seed: u64 },
}
