//! The ballisticity experiment and its CSV/JSON records.

use std::fmt::Write as _;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::AnalysisError;
use crate::lattice::hull::{BoundaryMode, HullMode};
use crate::lattice::tiling::Tiling;
use crate::lattice::{BuildMode, Lattice};
use crate::saw::pivot::{pivot_chain, MoveSet, PivotConfig};

use super::ensemble::{
    displacement_estimate, distance_samples, hull_boundary_fraction, iti_count_expectation, linear_fit,
    near_geodesic_audit, LinearFit,
};
use super::exact::{calibrate, distance_stats, distinct_ends, exact_summary, max_tube_ratio, Calibration, C_MAX, SHELL_MAX};
use super::profile::ProfileOptions;

/// Version of the CSV columns and JSON layout.
pub const RECORD_VERSION: u32 = 1;
/// Radius of the ball whose digest identifies the lattice in provenance.
pub const DIGEST_RADIUS: u32 = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Largest `n` for exact displacement and excess statistics.
    pub exact_max: usize,
    /// Largest `n` for exact hull and reflection statistics.
    pub hull_exact_max: usize,
    /// Lengths sampled with the pivot chain.
    pub pivot_ns: Vec<usize>,
    /// Sampled lengths at which hull statistics are also measured.
    pub hull_ns: Vec<usize>,
    /// Recorded states per sampled length, over all chains.
    pub samples: usize,
    /// Every this many recorded states one is used for hull statistics.
    pub hull_stride: usize,
    pub chains: usize,
    pub burn_in: u64,
    pub thin: u64,
    pub moves: MoveSet,
    pub seed: u64,
    /// Fixed inverse-triangle constant; calibrated when absent.
    pub c: Option<u32>,
    pub c_sweep: Vec<u32>,
    pub hull: HullMode,
    pub boundary: BoundaryMode,
    pub boundary_floor: f64,
    pub iti_floor: f64,
    pub displacement_floor: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            exact_max: 10,
            hull_exact_max: 7,
            pivot_ns: vec![16, 24, 32, 40],
            hull_ns: vec![10, 20, 30],
            samples: 20_000,
            hull_stride: 20,
            chains: 10,
            burn_in: 20_000,
            thin: 10,
            moves: MoveSet::Reflections,
            seed: 1,
            c: None,
            c_sweep: (1..=C_MAX).collect(),
            hull: HullMode::OneStep,
            boundary: BoundaryMode::Tangent,
            boundary_floor: 0.10,
            iti_floor: 0.10,
            displacement_floor: 0.05,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), AnalysisError> {
        let bad = |m: &str| Err(AnalysisError::Invalid(m.into()));
        if self.exact_max == 0 || self.exact_max > 14 {
            return bad("exact_max must be in 1..=14");
        }
        if self.hull_exact_max < 2 || self.hull_exact_max > self.exact_max {
            return bad("hull_exact_max must be in 2..=exact_max");
        }
        if self.chains == 0 || self.samples < self.chains {
            return bad("need at least one chain and one sample per chain");
        }
        if self.hull_stride == 0 {
            return bad("hull_stride must be positive");
        }
        if self.pivot_ns.iter().chain(&self.hull_ns).any(|&n| n < 2 || n > 60) {
            return bad("sampled lengths must be in 2..=60");
        }
        if self.c.is_some_and(|c| c > C_MAX) || self.c_sweep.iter().any(|&c| c > C_MAX) {
            return bad("inverse-triangle constants must be at most 8");
        }
        for f in [self.boundary_floor, self.iti_floor, self.displacement_floor] {
            if !(0.0..=1.0).contains(&f) {
                return bad("floors must lie in [0, 1]");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeTag {
    pub model: String,
    pub digest_radius: u32,
    pub digest: String,
}

pub fn lattice_tag() -> Result<LatticeTag, AnalysisError> {
    let b = Lattice::build_ball(DIGEST_RADIUS, BuildMode::Combinatorial)?;
    Ok(LatticeTag { model: "tiling".into(), digest_radius: DIGEST_RADIUS, digest: b.digest() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    pub record_version: u32,
    pub seed: u64,
    pub lattice: LatticeTag,
    pub config: serde_json::Value,
}

impl Provenance {
    pub fn new(seed: u64, config: &impl Serialize) -> Result<Self, AnalysisError> {
        Ok(Provenance {
            version: env!("CARGO_PKG_VERSION").into(),
            record_version: RECORD_VERSION,
            seed,
            lattice: lattice_tag()?,
            config: serde_json::to_value(config).map_err(|e| AnalysisError::Invalid(e.to_string()))?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainRow {
    pub i: usize,
    pub iti: String,
    pub reflected_iti: String,
    pub on_boundary: String,
    pub holds: bool,
}

/// One row of the per-`n` table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub n: usize,
    /// `exact` or `pivot`.
    pub mode: String,
    /// Recorded states; `None` in exact mode.
    pub samples: Option<usize>,
    pub mean_displacement: f64,
    pub displacement_se: f64,
    pub displacement_per_n: f64,
    pub exact_mean_displacement: Option<String>,
    pub boundary_tangent: Option<f64>,
    pub boundary_exposed: Option<f64>,
    /// Smallest per-walk tangent-boundary fraction.
    pub boundary_min: Option<f64>,
    pub shell: Vec<f64>,
    /// `E|{i : 𝒜_i}| / n` for each constant of the sweep.
    pub iti_per_n: Vec<f64>,
    pub iti_per_n_se: Vec<f64>,
    /// Inequality chain at `i = n / 2`.
    pub chain: Option<ChainRow>,
    pub max_deviation: Option<u32>,
    pub tube_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub provenance: Provenance,
    pub calibration: Calibration,
    /// The constant used for the inequality chain and the tables.
    pub c: u32,
    pub c_sweep: Vec<u32>,
    pub hull: HullMode,
    pub boundary: BoundaryMode,
    pub rows: Vec<ExperimentRow>,
    pub fit: Option<LinearFit>,
    pub checks: Vec<Check>,
}

impl ExperimentRecord {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serializes") + "\n"
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("record_version,n,mode,samples,seed,c,mean_displacement,displacement_se,displacement_per_n,exact_mean_displacement,boundary_tangent,boundary_exposed,boundary_min");
        for d in 1..=SHELL_MAX {
            let _ = write!(s, ",shell_{d}");
        }
        for c in &self.c_sweep {
            let _ = write!(s, ",iti_per_n_c{c},iti_per_n_se_c{c}");
        }
        s.push_str(",chain_i,p_iti,p_reflected_iti,p_boundary,chain_holds,max_deviation,tube_ratio\n");
        let f = |x: f64| format!("{x:.6}");
        let of = |x: Option<f64>| x.map(f).unwrap_or_default();
        for r in &self.rows {
            let _ = write!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                RECORD_VERSION,
                r.n,
                r.mode,
                r.samples.map(|k| k.to_string()).unwrap_or_else(|| "exact".into()),
                self.provenance.seed,
                self.c,
                f(r.mean_displacement),
                f(r.displacement_se),
                f(r.displacement_per_n),
                r.exact_mean_displacement.clone().unwrap_or_default(),
                of(r.boundary_tangent),
                of(r.boundary_exposed),
                of(r.boundary_min),
            );
            for d in 0..SHELL_MAX as usize {
                let _ = write!(s, ",{}", of(r.shell.get(d).copied()));
            }
            for k in 0..self.c_sweep.len() {
                let _ = write!(s, ",{},{}", of(r.iti_per_n.get(k).copied()), of(r.iti_per_n_se.get(k).copied()));
            }
            match &r.chain {
                Some(c) => {
                    let _ = write!(s, ",{},{},{},{},{}", c.i, c.iti, c.reflected_iti, c.on_boundary, c.holds);
                }
                None => s.push_str(",,,,,"),
            }
            let _ = writeln!(
                s,
                ",{},{}",
                r.max_deviation.map(|x| x.to_string()).unwrap_or_default(),
                of(r.tube_ratio)
            );
        }
        s
    }
}

fn to_f64(r: &num_rational::BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Runs the exact and sampled parts of the experiment.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentRecord, AnalysisError> {
    cfg.validate()?;
    let t = Tiling;
    let opts = ProfileOptions { hull_mode: cfg.hull, deviation_limit: None };
    let dist = distance_stats(&t, cfg.exact_max)?;
    let summaries = (2..=cfg.hull_exact_max).map(|n| exact_summary(&t, n, &opts)).collect::<Result<Vec<_>, _>>()?;
    let calibration = calibrate(&summaries);
    let c = cfg.c.or(calibration.c_star).unwrap_or(C_MAX);
    let mut checks = Vec::new();

    let mut rows = Vec::new();
    let mut chain_ok = true;
    let mut chain_detail = String::new();
    for s in &summaries {
        for i in 1..s.n {
            let tr = s.inequality_chain(i, c, cfg.boundary);
            if !tr.holds() {
                chain_ok = false;
                let _ = write!(chain_detail, "n={} i={} fails; ", s.n, i);
            }
        }
    }
    checks.push(Check {
        name: "inequality_chain".into(),
        pass: chain_ok,
        detail: if chain_ok { format!("holds for all n <= {} at C = {c}", cfg.hull_exact_max) } else { chain_detail },
    });

    for d in dist.iter().skip(1) {
        let n = d.n;
        let mean = d.mean_displacement();
        let mut row = ExperimentRow {
            n,
            mode: "exact".into(),
            samples: None,
            mean_displacement: to_f64(&mean),
            displacement_se: 0.0,
            displacement_per_n: to_f64(&mean) / n as f64,
            exact_mean_displacement: Some(mean.to_string()),
            boundary_tangent: None,
            boundary_exposed: None,
            boundary_min: None,
            shell: Vec::new(),
            iti_per_n: cfg.c_sweep.iter().map(|&c| to_f64(&d.mean_iti_count(c)) / n as f64).collect(),
            iti_per_n_se: vec![0.0; cfg.c_sweep.len()],
            chain: None,
            max_deviation: None,
            tube_ratio: None,
        };
        if let Some(s) = summaries.iter().find(|s| s.n == n) {
            row.boundary_tangent = Some(to_f64(&s.mean_boundary_fraction(BoundaryMode::Tangent)));
            row.boundary_exposed = Some(to_f64(&s.mean_boundary_fraction(BoundaryMode::Exposed)));
            row.boundary_min = Some(to_f64(&s.min_boundary_fraction(cfg.boundary)));
            row.shell = (1..=SHELL_MAX).map(|d| to_f64(&s.mean_shell_fraction(d))).collect();
            let tr = s.inequality_chain(n / 2, c, cfg.boundary);
            row.chain = Some(ChainRow {
                i: n / 2,
                iti: tr.iti.to_string(),
                reflected_iti: tr.reflected_iti.to_string(),
                on_boundary: tr.on_boundary.to_string(),
                holds: tr.holds(),
            });
            let rho = s.max_deviation[c as usize];
            row.max_deviation = rho;
            if let Some(rho) = rho {
                row.tube_ratio = Some(max_tube_ratio(&t, &distinct_ends(&t, n)?, rho));
            }
        }
        rows.push(row);
    }

    let mut sampled: Vec<usize> = cfg.pivot_ns.iter().chain(&cfg.hull_ns).copied().collect();
    sampled.sort_unstable();
    sampled.dedup();
    let per_chain = cfg.samples / cfg.chains;
    for &n in &sampled {
        let pc = PivotConfig {
            n,
            moves: cfg.moves,
            chains: cfg.chains,
            burn_in: cfg.burn_in,
            samples_per_chain: per_chain,
            thin: cfg.thin,
            seed: cfg.seed ^ (n as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15),
        };
        let run = pivot_chain(&t, &pc)?;
        let ds = distance_samples(&t, &run.walks)?;
        let disp = displacement_estimate(&ds, cfg.chains);
        let iti = iti_count_expectation(&ds, n, &cfg.c_sweep, cfg.chains);
        let mut row = ExperimentRow {
            n,
            mode: "pivot".into(),
            samples: Some(run.walks.len()),
            mean_displacement: disp.mean,
            displacement_se: disp.se,
            displacement_per_n: disp.mean / n as f64,
            exact_mean_displacement: None,
            boundary_tangent: None,
            boundary_exposed: None,
            boundary_min: None,
            shell: Vec::new(),
            iti_per_n: iti.iter().map(|x| x.per_n.mean).collect(),
            iti_per_n_se: iti.iter().map(|x| x.per_n.se).collect(),
            chain: None,
            max_deviation: None,
            tube_ratio: None,
        };
        if cfg.hull_ns.contains(&n) {
            let sub: Vec<_> = run.walks.iter().step_by(cfg.hull_stride).cloned().collect();
            let b = hull_boundary_fraction(&t, &sub, &opts, cfg.chains)?;
            row.boundary_tangent = Some(b.tangent.mean.mean);
            row.boundary_exposed = Some(b.exposed.mean.mean);
            row.boundary_min = Some(b.fraction(cfg.boundary).min);
            row.shell = b.shell.iter().map(|e| e.mean).collect();
            let a = near_geodesic_audit(&t, &sub, c)?;
            row.max_deviation = Some(a.rho);
            row.tube_ratio = Some(a.tube_ratio);
        }
        rows.push(row);
    }
    rows.sort_by_key(|r| (r.n, r.mode != "exact"));

    let pts: Vec<&ExperimentRow> = rows.iter().filter(|r| cfg.pivot_ns.contains(&r.n) || r.mode == "exact").collect();
    let fit = linear_fit(
        &pts.iter().map(|r| r.n as f64).collect::<Vec<_>>(),
        &pts.iter().map(|r| r.mean_displacement).collect::<Vec<_>>(),
    );

    let ci = cfg.c_sweep.iter().position(|&x| x == c);
    let low_iti: Vec<usize> = rows
        .iter()
        .filter(|r| r.n >= 2 && ci.map_or(true, |k| r.iti_per_n[k] < cfg.iti_floor))
        .map(|r| r.n)
        .collect();
    checks.push(Check {
        name: "iti_floor".into(),
        pass: ci.is_some() && low_iti.is_empty(),
        detail: match ci {
            None => format!("C = {c} is not in the sweep"),
            Some(_) => format!("E|{{i : A_i}}|/n >= {} for n >= 2 except at {:?}", cfg.iti_floor, low_iti),
        },
    });
    let low_d: Vec<usize> = rows.iter().filter(|r| r.displacement_per_n < cfg.displacement_floor).map(|r| r.n).collect();
    checks.push(Check {
        name: "displacement_floor".into(),
        pass: low_d.is_empty(),
        detail: format!("E[d]/n >= {} except at {:?}", cfg.displacement_floor, low_d),
    });
    let low_b: Vec<usize> = rows
        .iter()
        .filter(|r| {
            let f = match cfg.boundary {
                BoundaryMode::Tangent => r.boundary_tangent,
                BoundaryMode::Exposed => r.boundary_exposed,
            };
            r.mode == "pivot" && f.is_some_and(|b| b < cfg.boundary_floor)
        })
        .map(|r| r.n)
        .collect();
    checks.push(Check {
        name: "boundary_floor".into(),
        pass: low_b.is_empty(),
        detail: format!("sampled boundary fraction >= {} except at {:?}", cfg.boundary_floor, low_b),
    });
    checks.push(match fit {
        Some(f) => Check {
            name: "displacement_slope".into(),
            pass: f.slope > 0.0 && f.slope_se < 0.2 * f.slope,
            detail: format!("slope {:.6} +- {:.6}", f.slope, f.slope_se),
        },
        None => Check { name: "displacement_slope".into(), pass: false, detail: "fewer than three points".into() },
    });

    Ok(ExperimentRecord {
        provenance: Provenance::new(cfg.seed, cfg)?,
        calibration,
        c,
        c_sweep: cfg.c_sweep.clone(),
        hull: cfg.hull,
        boundary: cfg.boundary,
        rows,
        fit,
        checks,
    })
}
