//! Acceptance run: one PASS/FAIL line per criterion on stderr, then a
//! failing assertion naming every failed criterion.

use std::io::Write;
use std::time::Instant;

use heptasaw::analysis::exact::{exact_summary, C_MAX};
use heptasaw::analysis::render::render_walk;
use heptasaw::analysis::report::{run_experiment, ExperimentConfig, ExperimentRecord};
use heptasaw::analysis::ProfileOptions;
use heptasaw::lattice::hull::{BoundaryMode, HullMode};
use heptasaw::lattice::thin::thinness_audit;
use heptasaw::lattice::tiling::{layer_sizes, Tiling};
use heptasaw::lattice::{BuildMode, Lattice, NONE};
use heptasaw::saw::enumerate::enumerate;
use heptasaw::saw::pivot::{pivot_chain, MoveSet, PivotConfig};
use heptasaw::saw::reflect::{collect_walks, fiber_histograms, reflect_at, walk_keys};
use heptasaw::saw::{sample_exact, uniformity, Walk};
use num_rational::BigRational;

struct Report {
    failed: Vec<u32>,
}

impl Report {
    fn line(&mut self, k: u32, pass: bool, started: Instant, detail: String) {
        if !pass {
            self.failed.push(k);
        }
        let verdict = if pass { "PASS" } else { "FAIL" };
        // written past the test harness's output capture
        let _ = writeln!(
            std::io::stderr(),
            "acceptance {k}: {verdict} ({:.1}s) {detail}",
            started.elapsed().as_secs_f64()
        );
    }
}

fn rat(s: &str) -> BigRational {
    s.parse().unwrap()
}

fn lattice_correctness(r: &mut Report) {
    let t0 = Instant::now();
    let b1 = Lattice::build_ball(1, BuildMode::Combinatorial).unwrap().len();
    let b2 = Lattice::build_ball(2, BuildMode::Combinatorial).unwrap().len();
    let sizes = layer_sizes(10);
    let recurrence = sizes[..3] == [1, 7, 21] && (2..10).all(|k| sizes[k + 1] + sizes[k - 1] == 3 * sizes[k]);
    let ball10 = Lattice::build_ball(10, BuildMode::Combinatorial).unwrap();
    let measured: Vec<u128> = ball10.layer_sizes().iter().map(|&x| x as u128).collect();
    let mut digests = true;
    for radius in 1..=10 {
        let g = Lattice::build_ball(radius, BuildMode::Geometric).unwrap();
        let c = Lattice::build_ball(radius, BuildMode::Combinatorial).unwrap();
        digests &= g.digest() == c.digest();
    }
    let pass = b1 == 8 && b2 == 29 && recurrence && measured == sizes && digests && t0.elapsed().as_secs() < 30;
    r.line(
        1,
        pass,
        t0,
        format!("|B_1|={b1} |B_2|={b2} recurrence for 2 <= k < 10: {recurrence}, geometric digests match to R=10: {digests}"),
    );
}

fn hyperbolicity(r: &mut Report) {
    let t0 = Instant::now();
    let lat = Lattice::build_ball(9, BuildMode::Combinatorial).unwrap();
    let rep = thinness_audit(&lat, 4, 1).unwrap();
    r.line(
        2,
        rep.pass && t0.elapsed().as_secs() < 300,
        t0,
        format!(
            "triples in B_4: {}, max thinness {} (delta = 1 required), worst triple {:?}",
            rep.triples, rep.max_thinness, rep.worst_triple
        ),
    );
}

/// Plain depth-first count over a sorted adjacency list.
fn naive_count(adj: &[Vec<u32>], v: u32, visited: &mut [bool], left: usize, counts: &mut [u64], depth: usize) {
    counts[depth] += 1;
    if left == 0 {
        return;
    }
    for &w in &adj[v as usize] {
        if !visited[w as usize] {
            visited[w as usize] = true;
            naive_count(adj, w, visited, left - 1, counts, depth + 1);
            visited[w as usize] = false;
        }
    }
}

fn enumeration(r: &mut Report) {
    let t0 = Instant::now();
    let lat = Lattice::build_ball(11, BuildMode::Combinatorial).unwrap();
    let c = enumerate(&lat, 10).unwrap();
    let fast: Vec<u64> = c.0.iter().map(|x| x.try_into().unwrap()).collect();
    let t_fast = t0.elapsed().as_secs_f64();
    // the oracle uses the orbit construction's adjacency, unordered
    let geo = Lattice::build_ball(11, BuildMode::Geometric).unwrap();
    let adj: Vec<Vec<u32>> = geo
        .raw_rotation()
        .iter()
        .map(|row| {
            let mut a: Vec<u32> = row.iter().copied().filter(|&w| w != NONE).collect();
            a.sort_unstable();
            a
        })
        .collect();
    let mut naive = vec![0u64; 11];
    let mut visited = vec![false; adj.len()];
    visited[0] = true;
    naive_count(&adj, 0, &mut visited, 10, &mut naive, 0);
    let pass = fast[1..4] == [7, 42, 238] && fast == naive && t_fast < 120.0;
    r.line(3, pass, t0, format!("c_1..c_3 = {:?}, c_10 = {}, naive enumerator agrees for n <= 10: {}", &fast[1..4], fast[10], fast == naive));
}

fn reflection_map(r: &mut Report) {
    let t0 = Instant::now();
    let mut max_fiber = 0;
    let mut closed = true;
    let mut partition = true;
    for n in 2..=8 {
        for h in fiber_histograms(&Tiling, n, HullMode::OneStep, true).unwrap() {
            max_fiber = max_fiber.max(h.max_fiber());
            closed &= h.outside == 0 && h.prefix_changed == 0;
            partition &= h.preimages() == h.total;
        }
    }
    let pass = max_fiber <= 7 && closed && partition && t0.elapsed().as_secs() < 600;
    r.line(
        4,
        pass,
        t0,
        format!("n <= 8, all i: max |R_i^-1| = {max_fiber}, closure and prefixes: {closed}, fibers partition: {partition}"),
    );
}

fn chain(r: &mut Report, rec: &ExperimentRecord) {
    let t0 = Instant::now();
    let c_star = rec.calibration.c_star;
    let chain_ok = rec.checks.iter().find(|c| c.name == "inequality_chain").unwrap().pass;
    let row = rec.rows.iter().find(|r| r.n == 6 && r.mode == "exact").unwrap().chain.clone().unwrap();
    // frozen after the first exhaustive derivation
    let frozen = c_star == Some(2)
        && row.i == 3
        && rat(&row.iti) == rat("2812/2927")
        && rat(&row.reflected_iti) == rat("2925/2927")
        && rat(&row.on_boundary) == rat("1106/2927");
    r.line(
        5,
        chain_ok && frozen,
        t0,
        format!(
            "C* = {c_star:?}, chain holds for all i, n <= 8: {chain_ok}; (n=6, i=3): {} >= {} >= {} (regression lock: {frozen})",
            row.iti, row.reflected_iti, row.on_boundary
        ),
    );
}

fn hull_boundary(r: &mut Report, rec: &ExperimentRecord) {
    let t0 = Instant::now();
    let s6 = exact_summary(&Tiling, 6, &ProfileOptions::default()).unwrap();
    let min = s6.min_boundary_fraction(BoundaryMode::Tangent);
    let exact_ok = min > rat("0");
    let sampled: Vec<(usize, f64)> = rec
        .rows
        .iter()
        .filter(|r| r.mode == "pivot" && [10, 20, 30].contains(&r.n))
        .map(|r| (r.n, r.boundary_tangent.unwrap()))
        .collect();
    let floor_ok = sampled.len() == 3 && sampled.iter().all(|&(_, f)| f >= 0.10);
    r.line(
        6,
        exact_ok && floor_ok,
        t0,
        format!("min fraction over Λ_6 = {min}; sampled mean fractions {sampled:?} (floor 0.10)"),
    );
}

fn ballisticity(r: &mut Report, rec: &ExperimentRecord, elapsed: f64) {
    let t0 = Instant::now();
    let get = |name: &str| rec.checks.iter().find(|c| c.name == name).unwrap();
    let (iti, disp, slope) = (get("iti_floor"), get("displacement_floor"), get("displacement_slope"));
    let k = rec.c_sweep.iter().position(|&c| c == rec.c).unwrap();
    let worst_iti = rec.rows.iter().filter(|r| r.n >= 2).map(|r| r.iti_per_n[k]).fold(f64::INFINITY, f64::min);
    let worst_d = rec.rows.iter().map(|r| r.displacement_per_n).fold(f64::INFINITY, f64::min);
    let pass = iti.pass && disp.pass && slope.pass && elapsed < 1800.0;
    r.line(
        7,
        pass,
        t0,
        format!(
            "C = {}: min E|A|/n = {worst_iti:.4}, min E[d]/n = {worst_d:.4}, {} (experiment {elapsed:.0}s)",
            rec.c, slope.detail
        ),
    );
}

fn sampler_validity(r: &mut Report) {
    let t0 = Instant::now();
    let lat = Lattice::build_ball(7, BuildMode::Combinatorial).unwrap();
    let mut population = walk_keys(&lat, &collect_walks(&lat, 6, false).unwrap());
    population.sort_unstable();
    let exact = sample_exact(&lat, 6, 1_000_000, 11).unwrap();
    let ue = uniformity(walk_keys(&lat, &exact), &population);
    let cfg = PivotConfig {
        n: 6,
        moves: MoveSet::Reflections,
        chains: 10,
        burn_in: 10_000,
        samples_per_chain: 100_000,
        thin: 10,
        seed: 12,
    };
    let run = pivot_chain(&Tiling, &cfg).unwrap();
    let up = uniformity(walk_keys(&Tiling, &run.walks), &population);
    let mut dcfg = cfg;
    dcfg.moves = MoveSet::Dihedral;
    let ud = uniformity(walk_keys(&Tiling, &pivot_chain(&Tiling, &dcfg).unwrap().walks), &population);
    let pass = ue.tv < 0.01 && up.tv < 0.02 && ud.tv < 0.02 && t0.elapsed().as_secs() < 600;
    r.line(
        8,
        pass,
        t0,
        format!(
            "TV exact {:.4} (< 0.01), pivot reflections {:.4} / dihedral {:.4} (< 0.02); uniform-sample TV floor {:.4}; chi2 z: exact {:.2}, pivot {:.2} / {:.2}",
            ue.tv, up.tv, ud.tv, ue.expected_tv, ue.z, up.z, ud.z
        ),
    );
}

fn small_config() -> ExperimentConfig {
    ExperimentConfig {
        exact_max: 6,
        hull_exact_max: 5,
        pivot_ns: vec![8, 12, 16],
        hull_ns: vec![10],
        samples: 2000,
        hull_stride: 10,
        chains: 4,
        burn_in: 1000,
        thin: 2,
        seed: 99,
        ..Default::default()
    }
}

fn artifacts() -> Vec<String> {
    let rec = run_experiment(&small_config()).unwrap();
    let geo = Lattice::build_ball(7, BuildMode::Geometric).unwrap();
    let walks = collect_walks(&geo, 5, false).unwrap();
    let (w, m) = walks
        .iter()
        .find_map(|w| reflect_at(&geo, w, 2, None, HullMode::OneStep).unwrap().mirror.map(|m| (w.clone(), m)))
        .unwrap();
    let svg = render_walk(&geo, &w, Some((2, m))).unwrap();
    let samples: Vec<Walk<u32>> = sample_exact(&geo, 5, 5000, 3).unwrap();
    let json: String = samples.iter().map(|w| w.to_json(&geo)).collect::<Vec<_>>().join("\n");
    vec![rec.to_csv(), rec.to_json(), svg, json]
}

fn reproducibility(r: &mut Report) {
    let t0 = Instant::now();
    let runs: Vec<Vec<String>> = [1usize, 4, 8, 1]
        .iter()
        .map(|&k| rayon::ThreadPoolBuilder::new().num_threads(k).build().unwrap().install(artifacts))
        .collect();
    let pass = runs.windows(2).all(|w| w[0] == w[1]);
    r.line(9, pass, t0, format!("CSV, JSON, SVG and sample streams byte-identical across 1, 4, 8 workers and a rerun: {pass}"));
}

#[test]
fn acceptance() {
    let mut r = Report { failed: Vec::new() };
    lattice_correctness(&mut r);
    hyperbolicity(&mut r);
    enumeration(&mut r);
    reflection_map(&mut r);

    let t0 = Instant::now();
    let cfg = ExperimentConfig {
        exact_max: 12,
        hull_exact_max: 8,
        pivot_ns: vec![16, 20, 24, 28, 32, 36, 40],
        hull_ns: vec![10, 20, 30],
        samples: 100_000,
        hull_stride: 50,
        chains: 10,
        burn_in: 20_000,
        thin: 10,
        seed: 2024,
        c: None,
        c_sweep: (0..=C_MAX).collect(),
        ..Default::default()
    };
    let rec = run_experiment(&cfg).unwrap();
    let elapsed = t0.elapsed().as_secs_f64();
    chain(&mut r, &rec);
    hull_boundary(&mut r, &rec);
    ballisticity(&mut r, &rec, elapsed);
    sampler_validity(&mut r);
    reproducibility(&mut r);
    assert!(r.failed.is_empty(), "failed acceptance criteria: {:?}", r.failed);
}
