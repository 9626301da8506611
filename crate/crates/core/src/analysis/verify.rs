//! The property suite behind `verify`: dual construction, thinness, fiber
//! bounds, closure of the reflection maps, the inequality chain and a
//! sampler spot check.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::AnalysisError;
use crate::lattice::hull::{BoundaryMode, HullMode};
use crate::lattice::thin::thinness_audit;
use crate::lattice::tiling::Tiling;
use crate::lattice::{BuildMode, Lattice};
use crate::saw::enumerate::enumerate;
use crate::saw::reflect::{collect_walks, fiber_histograms, walk_keys};
use crate::saw::{sample_exact, uniformity};

use super::exact::{calibrate, exact_summary, C_MAX};
use super::profile::ProfileOptions;
use super::report::{Check, Provenance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    /// Largest walk length for the exhaustive checks.
    pub n: usize,
    /// Fixed inverse-triangle constant; calibrated when absent.
    pub c: Option<u32>,
    pub seed: u64,
    /// Largest radius for the dual-construction comparison.
    pub build_radius: u32,
    pub thin_radius: u32,
    pub delta: u32,
    /// Walk length and sample count of the sampler spot check.
    pub sample_n: usize,
    pub samples: usize,
    pub hull: HullMode,
    pub boundary: BoundaryMode,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            n: 8,
            c: None,
            seed: 1,
            build_radius: 10,
            thin_radius: 4,
            delta: 1,
            sample_n: 4,
            samples: 100_000,
            hull: HullMode::OneStep,
            boundary: BoundaryMode::Tangent,
        }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<(), AnalysisError> {
        let bad = |m: &str| Err(AnalysisError::Invalid(m.into()));
        if !(2..=10).contains(&self.n) {
            return bad("n must be in 2..=10");
        }
        if self.c.is_some_and(|c| c > C_MAX) {
            return bad("C must be at most 8");
        }
        if !(1..=13).contains(&self.build_radius) {
            return bad("build_radius must be in 1..=13");
        }
        if !(1..=5).contains(&self.thin_radius) {
            return bad("thin_radius must be in 1..=5");
        }
        if !(1..=6).contains(&self.sample_n) || self.samples == 0 {
            return bad("sample_n must be in 1..=6 with at least one sample");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub provenance: Provenance,
    pub c: u32,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

fn check(name: &str, pass: bool, detail: String) -> Check {
    Check { name: name.into(), pass, detail }
}

pub fn run_verify(cfg: &VerifyConfig) -> Result<VerifyReport, AnalysisError> {
    cfg.validate()?;
    let mut checks = Vec::new();

    let mut first_mismatch = None;
    for r in 1..=cfg.build_radius {
        let g = Lattice::build_ball(r, BuildMode::Geometric)?;
        let c = Lattice::build_ball(r, BuildMode::Combinatorial)?;
        if g.digest() != c.digest() {
            first_mismatch = Some(r);
            break;
        }
    }
    checks.push(check(
        "dual_construction",
        first_mismatch.is_none(),
        match first_mismatch {
            None => format!("digests agree for R <= {}", cfg.build_radius),
            Some(r) => format!("digests differ at R = {r}"),
        },
    ));

    let ball = Lattice::build_ball(2 * cfg.thin_radius + 1, BuildMode::Combinatorial)?;
    let thin = thinness_audit(&ball, cfg.thin_radius, cfg.delta)?;
    checks.push(check(
        "thinness",
        thin.pass,
        format!(
            "{} triples in B_{}: max thinness {} against delta = {}, worst {:?}",
            thin.triples, cfg.thin_radius, thin.max_thinness, cfg.delta, thin.worst_triple
        ),
    ));

    let counts = enumerate(&Lattice::build_ball(cfg.n as u32 + 1, BuildMode::Combinatorial)?, cfg.n)?;
    let small: Vec<String> = (1..=3.min(cfg.n)).map(|k| counts.get(k).to_string()).collect();
    let expect = ["7", "42", "238"];
    checks.push(check(
        "enumeration",
        small.iter().zip(expect).all(|(a, b)| a == b) && counts.check_bounds(),
        format!("c_1.. = {}, c_{} = {}", small.join(","), cfg.n, counts.get(cfg.n)),
    ));

    let mut max_fiber = 0;
    let (mut outside, mut moved, mut partition) = (0u64, 0u64, true);
    for n in 2..=cfg.n {
        for h in fiber_histograms(&Tiling, n, cfg.hull, true)? {
            max_fiber = max_fiber.max(h.max_fiber());
            outside += h.outside;
            moved += h.prefix_changed;
            partition &= h.preimages() == h.total;
        }
    }
    checks.push(check(
        "fiber_bound",
        max_fiber <= 7 && partition,
        format!("max preimage count {max_fiber} for n <= {}", cfg.n),
    ));
    checks.push(check(
        "reflection_closure",
        outside == 0 && moved == 0,
        format!("{outside} images outside the walk set, {moved} changed prefixes"),
    ));

    let opts = ProfileOptions { hull_mode: cfg.hull, deviation_limit: None };
    let summaries = (2..=cfg.n).map(|n| exact_summary(&Tiling, n, &opts)).collect::<Result<Vec<_>, _>>()?;
    let c = cfg.c.or(calibrate(&summaries).c_star).unwrap_or(C_MAX);
    let mut bad = String::new();
    for s in &summaries {
        for i in 1..s.n {
            if !s.inequality_chain(i, c, cfg.boundary).holds() {
                let _ = write!(bad, "n={} i={}; ", s.n, i);
            }
        }
    }
    checks.push(check(
        "inequality_chain",
        bad.is_empty(),
        if bad.is_empty() { format!("holds for all i, n <= {} at C = {c}", cfg.n) } else { format!("fails at {bad}") },
    ));

    let lat = Lattice::build_ball(cfg.sample_n as u32 + 1, BuildMode::Combinatorial)?;
    let mut population = walk_keys(&lat, &collect_walks(&lat, cfg.sample_n, false)?);
    population.sort_unstable();
    let u = uniformity(walk_keys(&lat, &sample_exact(&lat, cfg.sample_n, cfg.samples, cfg.seed)?), &population);
    checks.push(check(
        "exact_sampler",
        u.foreign == 0 && u.z.abs() < 5.0,
        format!("n = {}: tv {:.5} (uniform floor {:.5}), chi-square z {:.3}", cfg.sample_n, u.tv, u.expected_tv, u.z),
    ));

    Ok(VerifyReport { provenance: Provenance::new(cfg.seed, cfg)?, c, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite() {
        let cfg = VerifyConfig { n: 4, build_radius: 4, thin_radius: 1, samples: 2000, sample_n: 3, ..Default::default() };
        let a = run_verify(&cfg).unwrap();
        let names: Vec<&str> = a.checks.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names.len(), 7);
        for c in &a.checks {
            if c.name != "thinness" {
                assert!(c.pass, "{c:?}");
            }
        }
        assert_eq!(a.to_json(), run_verify(&cfg).unwrap().to_json());
        assert!(run_verify(&VerifyConfig { n: 1, ..cfg }).is_err());
    }
}
