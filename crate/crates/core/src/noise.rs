//! Finitely supported noise laws on a group.

use crate::error::{domain, Error, Result};
use crate::exec::{map_indexed, ExecPolicy};
use crate::group::{FiniteGroup, GroupElement};
use crate::linalg::CMatrix;
use crate::repr::{DualSpace, Irrep};
use crate::spectra::accumulate;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    pub element: GroupElement,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseSpec {
    Dirac {
        element: GroupElement,
    },
    UniformOnSet {
        elements: Vec<GroupElement>,
    },
    UniformOnGroup,
    /// Weights `exp(-|v|²/(2σ²))` on elements whose centred real coordinates
    /// `v` all have magnitude at most `radius`.
    CoordinateDiscretizedGaussian {
        sigma: f64,
        radius: f64,
    },
    CustomTable {
        table: Vec<TableEntry>,
    },
}

/// Tolerance on the total mass of a custom table.
pub const MASS_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct NoiseLaw {
    spec: NoiseSpec,
    support: Vec<GroupElement>,
    probs: Vec<f64>,
    cdf: Vec<f64>,
}

impl NoiseLaw {
    pub fn new(group: &FiniteGroup, spec: NoiseSpec) -> Result<Self> {
        let (support, probs): (Vec<GroupElement>, Vec<f64>) = match &spec {
            NoiseSpec::Dirac { element } => {
                group.check(element)?;
                (vec![element.clone()], vec![1.0])
            }
            NoiseSpec::UniformOnSet { elements } => {
                if elements.is_empty() {
                    return Err(domain!("uniform noise needs a non-empty set"));
                }
                check_distinct(group, elements.iter())?;
                let p = 1.0 / elements.len() as f64;
                (elements.clone(), vec![p; elements.len()])
            }
            NoiseSpec::UniformOnGroup => {
                let e = group.elements()?;
                let p = 1.0 / e.len() as f64;
                let n = e.len();
                (e, vec![p; n])
            }
            NoiseSpec::CoordinateDiscretizedGaussian { sigma, radius } => {
                if !(*sigma > 0.0) || !(*radius >= 0.0) || !sigma.is_finite() || !radius.is_finite() {
                    return Err(domain!("Gaussian noise needs sigma > 0 and radius >= 0"));
                }
                let mut support = Vec::new();
                let mut w = Vec::new();
                for g in group.elements()? {
                    let v = group.centered_values(&g);
                    if v.iter().all(|x| x.abs() <= radius + 1e-12) {
                        let r2: f64 = v.iter().map(|x| x * x).sum();
                        w.push((-r2 / (2.0 * sigma * sigma)).exp());
                        support.push(g);
                    }
                }
                let total: f64 = w.iter().sum();
                (support, w.into_iter().map(|x| x / total).collect())
            }
            NoiseSpec::CustomTable { table } => {
                if table.is_empty() {
                    return Err(domain!("custom noise table is empty"));
                }
                check_distinct(group, table.iter().map(|t| &t.element))?;
                if table.iter().any(|t| !(t.p >= 0.0) || !t.p.is_finite()) {
                    return Err(domain!("custom noise table has a negative or non-finite probability"));
                }
                let total: f64 = table.iter().map(|t| t.p).sum();
                if (total - 1.0).abs() > MASS_TOLERANCE {
                    return Err(domain!("custom noise table sums to {total}, not 1"));
                }
                (table.iter().map(|t| t.element.clone()).collect(), table.iter().map(|t| t.p).collect())
            }
        };
        let mut cdf = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for p in &probs {
            acc += p;
            cdf.push(acc);
        }
        Ok(NoiseLaw { spec, support, probs, cdf })
    }

    pub fn spec(&self) -> &NoiseSpec {
        &self.spec
    }

    pub fn support(&self) -> &[GroupElement] {
        &self.support
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    /// Inverse-CDF sampling.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> GroupElement {
        let u: f64 = rng.random();
        let i = self.cdf.partition_point(|&c| c <= u).min(self.support.len() - 1);
        self.support[i].clone()
    }

    /// `E[π(ξ)]`.
    pub fn expectation(&self, irrep: &Irrep) -> CMatrix {
        accumulate(irrep, self.support.iter().zip(&self.probs).map(|(g, p)| (g, Complex64::new(*p, 0.0))), 1.0)
    }

    pub fn expectations(&self, dual: &DualSpace, policy: ExecPolicy) -> Vec<CMatrix> {
        map_indexed(policy, dual.len(), |i| self.expectation(&dual.irreps()[i]))
    }

    /// Largest entrywise variance `max_{π,l,j} Var[π_lj(ξ)]` over the dual.
    pub fn variance_constant(&self, dual: &DualSpace, policy: ExecPolicy) -> f64 {
        map_indexed(policy, dual.len(), |i| {
            let p = &dual.irreps()[i];
            let d = p.dim();
            let mean = self.expectation(p);
            // Entries of a monomial matrix have modulus 0 or 1, so E|π_lj|² is
            // the probability that row l has its non-zero in column j.
            let mut second = vec![0.0; d * d];
            let mut cols = vec![0u32; d];
            let mut vals = vec![Complex64::new(0.0, 0.0); d];
            for (g, pr) in self.support.iter().zip(&self.probs) {
                p.monomial_into(g, &mut cols, &mut vals);
                for r in 0..d {
                    second[r * d + cols[r] as usize] += pr;
                }
            }
            second.iter().zip(&mean.data).map(|(s, m)| (s - m.norm_sqr()).max(0.0)).fold(0.0, f64::max)
        })
        .into_iter()
        .fold(0.0, f64::max)
    }
}

fn check_distinct<'a>(group: &FiniteGroup, elements: impl Iterator<Item = &'a GroupElement>) -> Result<()> {
    let mut seen = HashSet::new();
    for g in elements {
        group.check(g)?;
        if !seen.insert(g) {
            return Err(Error::Domain(format!("noise support lists {:?} twice", g.coords)));
        }
    }
    Ok(())
}
