//! `heptasaw`: lattice construction, enumeration, sampling, verification,
//! experiments and rendering for self-avoiding walks on the {3,7} lattice.
//!
//! Exit status: 0 when every requested check passes, 1 when a check fails
//! (the failing checks go to stderr as JSON), 2 for usage, config and I/O
//! errors.

mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use heptasaw::analysis::render::render_walk;
use heptasaw::analysis::report::{run_experiment, ExperimentConfig, Provenance};
use heptasaw::analysis::verify::{run_verify, VerifyConfig};
use heptasaw::lattice::hull::{BoundaryMode, HullMode};
use heptasaw::lattice::tiling::Tiling;
use heptasaw::lattice::{BuildMode, Lattice};
use heptasaw::saw::reflect::reflect_at;
use heptasaw::saw::{enumerate, pivot_chain, sample_exact, sample_record, MoveSet, PivotConfig};
use serde::Serialize;

use config::{FileConfig, Sampler};

/// Environment variable naming the default output directory.
const OUT_ENV: &str = "HEPTASAW_OUT";

#[derive(Parser)]
#[command(name = "heptasaw", version, about = "Self-avoiding walks on the 7-regular hyperbolic triangulation")]
struct Cli {
    /// TOML config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory [default: $HEPTASAW_OUT or .]
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads [default: all cores]
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a ball and write it as JSON with its digest.
    Build(BuildArgs),
    /// Count self-avoiding walks from the root.
    Enumerate(EnumerateArgs),
    /// Write a stream of sampled walks as NDJSON.
    Sample(SampleArgs),
    /// Run the property suite.
    Verify(VerifyArgs),
    /// Run the ballisticity experiment.
    Experiment(ExperimentArgs),
    /// Draw a sampled walk in the Poincare disk.
    Render(RenderArgs),
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long = "R")]
    radius: Option<u32>,
    #[arg(long)]
    mode: Option<BuildMode>,
}

#[derive(Args)]
struct EnumerateArgs {
    #[arg(long)]
    n: Option<usize>,
    /// Ball radius [default: n + 1]
    #[arg(long = "R")]
    radius: Option<u32>,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    n: Option<usize>,
    /// Ball radius for the exact sampler [default: n + 1]
    #[arg(long = "R")]
    radius: Option<u32>,
    #[arg(long, value_enum)]
    sampler: Option<Sampler>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    chains: Option<usize>,
    #[arg(long)]
    burn_in: Option<u64>,
    #[arg(long)]
    thin: Option<u64>,
    #[arg(long)]
    moves: Option<MoveSet>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "C")]
    c: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    delta: Option<u32>,
    #[arg(long)]
    build_radius: Option<u32>,
    #[arg(long)]
    thin_radius: Option<u32>,
    #[arg(long)]
    sample_n: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    hull: Option<HullMode>,
    #[arg(long)]
    boundary: Option<BoundaryMode>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long = "C")]
    c: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    exact_max: Option<usize>,
    #[arg(long)]
    hull_exact_max: Option<usize>,
    /// Comma-separated sampled lengths.
    #[arg(long, value_delimiter = ',')]
    pivot_n: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    hull_n: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    c_sweep: Option<Vec<u32>>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    chains: Option<usize>,
    #[arg(long)]
    burn_in: Option<u64>,
    #[arg(long)]
    thin: Option<u64>,
    #[arg(long)]
    moves: Option<MoveSet>,
    #[arg(long)]
    hull: Option<HullMode>,
    #[arg(long)]
    boundary: Option<BoundaryMode>,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    n: Option<usize>,
    /// Ball radius [default: n + 1]
    #[arg(long = "R")]
    radius: Option<u32>,
    /// Also draw the reflection at this index.
    #[arg(long)]
    mirror: Option<usize>,
    #[arg(long)]
    hull: Option<HullMode>,
    #[arg(long)]
    seed: Option<u64>,
}

enum Failure {
    Usage(String),
    Checks(String),
}

impl<E: std::error::Error> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

#[derive(Serialize)]
struct BuildConfig {
    command: &'static str,
    radius: u32,
    mode: BuildMode,
}

#[derive(Serialize)]
struct EnumerateConfig {
    command: &'static str,
    n: usize,
    radius: u32,
}

#[derive(Serialize)]
struct SampleConfig {
    command: &'static str,
    n: usize,
    radius: Option<u32>,
    sampler: Sampler,
    samples: usize,
    chains: usize,
    burn_in: u64,
    thin: u64,
    moves: MoveSet,
    seed: u64,
}

#[derive(Serialize)]
struct RenderConfig {
    command: &'static str,
    n: usize,
    radius: u32,
    mirror: Option<usize>,
    hull: HullMode,
    seed: u64,
}

struct Ctx {
    file: FileConfig,
    out: PathBuf,
}

impl Ctx {
    fn write(&self, name: &str, body: &str) -> Result<(), Failure> {
        fs::create_dir_all(&self.out)?;
        let path = self.out.join(name);
        fs::write(&path, body).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
        println!("{}", path.display());
        Ok(())
    }

    fn seed(&self, flag: Option<u64>, section: Option<u64>) -> u64 {
        flag.or(section).or(self.file.seed).unwrap_or(1)
    }
}

fn provenance(seed: u64, cfg: &impl Serialize) -> Result<String, Failure> {
    Ok(serde_json::to_string(&Provenance::new(seed, cfg)?)?)
}

/// Radius for an explicit ball holding every `n`-step walk.
fn ball_radius(flag: Option<u32>, section: Option<u32>, n: usize) -> Result<u32, Failure> {
    let r = flag.or(section).unwrap_or(n as u32 + 1);
    if (r as usize) < n + 1 {
        return usage(format!("R = {r} is too small for n = {n}; need at least {}", n + 1));
    }
    Ok(r)
}

fn build(ctx: &Ctx, a: BuildArgs) -> Result<(), Failure> {
    let s = &ctx.file.build;
    let cfg = BuildConfig {
        command: "build",
        radius: a.radius.or(s.radius).unwrap_or(6),
        mode: a.mode.or(s.mode).unwrap_or(BuildMode::Combinatorial),
    };
    let lat = Lattice::build_ball(cfg.radius, cfg.mode)?;
    let body = format!(
        "{{\"provenance\":{},\"vertices\":{},\"digest\":\"{}\",\"lattice\":{}}}\n",
        provenance(0, &cfg)?,
        lat.len(),
        lat.digest(),
        lat.to_json()
    );
    ctx.write(&format!("lattice_R{}.json", cfg.radius), &body)?;
    eprintln!("vertices {} digest {}", lat.len(), lat.digest());
    Ok(())
}

fn enumerate_cmd(ctx: &Ctx, a: EnumerateArgs) -> Result<(), Failure> {
    let s = &ctx.file.enumerate;
    let n = a.n.or(s.n).unwrap_or(8);
    let cfg = EnumerateConfig { command: "enumerate", n, radius: ball_radius(a.radius, s.radius, n)? };
    let lat = Lattice::build_ball(cfg.radius, BuildMode::Combinatorial)?;
    let counts = enumerate(&lat, n)?;
    let body = format!("# provenance: {}\n{}", provenance(0, &cfg)?, counts.to_csv());
    ctx.write(&format!("counts_n{n}.csv"), &body)
}

fn sample(ctx: &Ctx, a: SampleArgs) -> Result<(), Failure> {
    let s = &ctx.file.sample;
    let n = a.n.or(s.n).unwrap_or(8);
    let sampler = a.sampler.or(s.sampler).unwrap_or(Sampler::Pivot);
    let mut cfg = SampleConfig {
        command: "sample",
        n,
        radius: None,
        sampler,
        samples: a.samples.or(s.samples).unwrap_or(10_000),
        chains: a.chains.or(s.chains).unwrap_or(8),
        burn_in: a.burn_in.or(s.burn_in).unwrap_or(10_000),
        thin: a.thin.or(s.thin).unwrap_or(10),
        moves: a.moves.or(s.moves).unwrap_or_default(),
        seed: ctx.seed(a.seed, s.seed),
    };
    if n == 0 || cfg.samples == 0 || cfg.chains == 0 || cfg.thin == 0 {
        return usage("n, samples, chains and thin must be positive");
    }
    let mut body = format!("{{\"provenance\":{}}}\n", {
        if sampler == Sampler::Exact {
            cfg.radius = Some(ball_radius(a.radius, s.radius, n)?);
        }
        provenance(cfg.seed, &cfg)?
    });
    match sampler {
        Sampler::Exact => {
            let lat = Lattice::build_ball(cfg.radius.unwrap_or_default(), BuildMode::Combinatorial)?;
            for w in sample_exact(&lat, n, cfg.samples, cfg.seed)? {
                body.push_str(&sample_record(&lat, &w));
                body.push('\n');
            }
        }
        Sampler::Pivot => {
            let pc = PivotConfig {
                n,
                moves: cfg.moves,
                chains: cfg.chains,
                burn_in: cfg.burn_in,
                samples_per_chain: cfg.samples.div_ceil(cfg.chains),
                thin: cfg.thin,
                seed: cfg.seed,
            };
            let run = pivot_chain(&Tiling, &pc)?;
            eprintln!("acceptance rate {:.4}", run.acceptance_rate());
            for w in run.walks.iter().take(cfg.samples) {
                body.push_str(&sample_record(&Tiling, w));
                body.push('\n');
            }
        }
    }
    let tag = if sampler == Sampler::Exact { "exact" } else { "pivot" };
    ctx.write(&format!("samples_{tag}_n{n}.ndjson"), &body)
}

fn failures_json(checks: Vec<&heptasaw::analysis::report::Check>) -> String {
    serde_json::to_string_pretty(&serde_json::json!({ "failed": checks })).expect("checks serialize")
}

fn verify(ctx: &Ctx, a: VerifyArgs) -> Result<(), Failure> {
    let base = ctx.file.verify().map_err(Failure::Usage)?;
    let cfg = VerifyConfig {
        n: a.n.unwrap_or(base.n),
        c: a.c.or(base.c),
        seed: a.seed.unwrap_or(base.seed),
        build_radius: a.build_radius.unwrap_or(base.build_radius),
        thin_radius: a.thin_radius.unwrap_or(base.thin_radius),
        delta: a.delta.unwrap_or(base.delta),
        sample_n: a.sample_n.unwrap_or(base.sample_n),
        samples: a.samples.unwrap_or(base.samples),
        hull: a.hull.unwrap_or(base.hull),
        boundary: a.boundary.unwrap_or(base.boundary),
    };
    cfg.validate()?;
    let report = run_verify(&cfg)?;
    ctx.write("verify.json", &report.to_json())?;
    for c in &report.checks {
        eprintln!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Checks(failures_json(report.failures())))
    }
}

fn experiment(ctx: &Ctx, a: ExperimentArgs) -> Result<(), Failure> {
    let base = ctx.file.experiment().map_err(Failure::Usage)?;
    let cfg = ExperimentConfig {
        c: a.c.or(base.c),
        seed: a.seed.unwrap_or(base.seed),
        exact_max: a.exact_max.unwrap_or(base.exact_max),
        hull_exact_max: a.hull_exact_max.unwrap_or(base.hull_exact_max),
        pivot_ns: a.pivot_n.unwrap_or(base.pivot_ns),
        hull_ns: a.hull_n.unwrap_or(base.hull_ns),
        c_sweep: a.c_sweep.unwrap_or(base.c_sweep),
        samples: a.samples.unwrap_or(base.samples),
        chains: a.chains.unwrap_or(base.chains),
        burn_in: a.burn_in.unwrap_or(base.burn_in),
        thin: a.thin.unwrap_or(base.thin),
        moves: a.moves.unwrap_or(base.moves),
        hull: a.hull.unwrap_or(base.hull),
        boundary: a.boundary.unwrap_or(base.boundary),
        ..base
    };
    cfg.validate()?;
    let rec = run_experiment(&cfg)?;
    let csv = format!("# provenance: {}\n{}", serde_json::to_string(&rec.provenance)?, rec.to_csv());
    ctx.write("experiment.csv", &csv)?;
    ctx.write("experiment.json", &rec.to_json())?;
    for c in &rec.checks {
        eprintln!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    if rec.passed() {
        Ok(())
    } else {
        Err(Failure::Checks(failures_json(rec.checks.iter().filter(|c| !c.pass).collect())))
    }
}

fn render(ctx: &Ctx, a: RenderArgs) -> Result<(), Failure> {
    let s = &ctx.file.render;
    let n = a.n.or(s.n).unwrap_or(8);
    let cfg = RenderConfig {
        command: "render",
        n,
        radius: ball_radius(a.radius, s.radius, n)?,
        mirror: a.mirror.or(s.mirror),
        hull: a.hull.or(s.hull).unwrap_or_default(),
        seed: ctx.seed(a.seed, s.seed),
    };
    if n == 0 {
        return usage("n must be positive");
    }
    if cfg.mirror.is_some_and(|i| i == 0 || i >= n) {
        return usage(format!("mirror index must lie in 1..{n}"));
    }
    let lat = Lattice::build_ball(cfg.radius, BuildMode::Geometric)?;
    let walk = sample_exact(&lat, n, 1, cfg.seed)?.remove(0);
    let mirror = match cfg.mirror {
        Some(i) => reflect_at(&lat, &walk, i, None, cfg.hull)?.mirror.map(|g| (i, g)),
        None => None,
    };
    if cfg.mirror.is_some() && mirror.is_none() {
        eprintln!("no tangent reflection at the requested index; drawing the walk alone");
    }
    let svg = render_walk(&lat, &walk, mirror)?;
    let body = format!("<!-- provenance: {} -->\n{svg}", provenance(cfg.seed, &cfg)?);
    ctx.write(&format!("walk_n{n}_seed{}.svg", cfg.seed), &body)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p).map_err(Failure::Usage)?,
        None => FileConfig::default(),
    };
    if let Some(k) = cli.workers.or(file.workers) {
        if k == 0 {
            return usage("workers must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(k).build_global()?;
    }
    let out = cli
        .out
        .or_else(|| file.out.clone())
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| Path::new(".").to_path_buf());
    let ctx = Ctx { file, out };
    match cli.command {
        Command::Build(a) => build(&ctx, a),
        Command::Enumerate(a) => enumerate_cmd(&ctx, a),
        Command::Sample(a) => sample(&ctx, a),
        Command::Verify(a) => verify(&ctx, a),
        Command::Experiment(a) => experiment(&ctx, a),
        Command::Render(a) => render(&ctx, a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks(report)) => {
            eprintln!("{report}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
