//! Acceptance suite. Runs every exit criterion at its pinned tolerance and
//! prints one `PASS`/`FAIL` line per criterion; exits nonzero if any fails.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use levelset_spectral::cluster::{adjusted_rand_index, align_to_indicators, kmeans, to_labels};
use levelset_spectral::datagen::{simulate_mixture, write_points, MixtureSpec};
use levelset_spectral::density::{geometric_grid, kde_fit, lscv_bandwidth};
use levelset_spectral::graph::build_graph;
use levelset_spectral::oracle::{connected_components, dense_reference_spectrum, min_intercomponent_distance};
use levelset_spectral::pipeline::{
    run_baseline, run_pipeline, stage_seed, InputSpec, PipelineConfig, SIMULATION_STAGE,
};
use levelset_spectral::spectral::{count_zero_eigenvalues, eigendecompose, embed};
use levelset_spectral::PointSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use common::{clustered_instance, dist2, pair_counting_ari, uniform_instance};

const ZERO_TOL: f64 = 1e-8;
const SEEDS: u64 = 20;
const REQUIRED_RUNS: usize = 18;
const SAMPLE_SIZE: usize = 1900;
const RETAINED: usize = 1615;
const RUN_BUDGET: Duration = Duration::from_secs(60);

struct Report {
    failures: usize,
}

impl Report {
    fn line(&mut self, id: &str, what: &str, ok: bool, detail: String) {
        if !ok {
            self.failures += 1;
        }
        println!("[{}] {id:<4} {what}: {detail}", if ok { "PASS" } else { "FAIL" });
    }
}

/// Smallest and largest eigenvalue of `S` seen so far.
struct SpectrumRange {
    lo: f64,
    hi: f64,
    matrices: usize,
}

impl SpectrumRange {
    fn new() -> Self {
        Self { lo: f64::INFINITY, hi: f64::NEG_INFINITY, matrices: 0 }
    }

    /// Takes eigenvalues of `I - S`.
    fn add(&mut self, laplacian: &[f64]) {
        for mu in laplacian {
            self.lo = self.lo.min(1.0 - mu);
            self.hi = self.hi.max(1.0 - mu);
        }
        self.matrices += 1;
    }
}

fn mixture_runs(report: &mut Report, range: &mut SpectrumRange) {
    let dir = tempfile::tempdir().expect("temp dir");
    let (mut jn_ok, mut t_ok, mut ell_ok, mut ari_ok, mut baseline_ok) = (0, 0, 0, 0, 0);
    let mut slowest = Duration::ZERO;
    let mut rows = Vec::new();
    for seed in 0..SEEDS {
        // simulate, then cluster the written file
        let spec = MixtureSpec::default().with_seed(stage_seed(seed, SIMULATION_STAGE));
        let path = dir.path().join(format!("mixture-{seed}.csv"));
        write_points(&simulate_mixture(&spec, SAMPLE_SIZE).unwrap(), &path).unwrap();
        let config = PipelineConfig {
            input: InputSpec::Csv(path),
            seed,
            ..PipelineConfig::default()
        };

        let start = Instant::now();
        let run = run_pipeline(&config).expect("pipeline run");
        slowest = slowest.max(start.elapsed());
        let s = &run.summary;
        range.add(&run.spectrum.eigenvalues);

        let start = Instant::now();
        let base = run_baseline(&config).expect("baseline run");
        slowest = slowest.max(start.elapsed());
        range.add(&base.spectrum.eigenvalues);

        let ari = s.ari.expect("simulated data carries labels");
        jn_ok += usize::from(s.jn == RETAINED);
        t_ok += usize::from((0.03..=0.06).contains(&s.t));
        ell_ok += usize::from(s.ell_hat == 3);
        ari_ok += usize::from(ari >= 0.95);
        baseline_ok += usize::from(base.summary.ell_hat >= 10);
        rows.push(format!(
            "seed {seed:>2}: j(n) {} t {:.4} b {:.4} ell_hat {} components {} ari {:.4} baseline ell_hat {}",
            s.jn, s.t, s.bandwidth, s.ell_hat, s.component_count, ari, base.summary.ell_hat
        ));
    }
    for r in rows {
        println!("       {r}");
    }
    let n = SEEDS as usize;
    report.line("1a", "j(n) = 1615 on every run", jn_ok == n, format!("{jn_ok}/{n}"));
    report.line("1b", "t in [0.03, 0.06] in >= 18/20 runs", t_ok >= REQUIRED_RUNS, format!("{t_ok}/{n}"));
    report.line("1c", "ell_hat = 3 in >= 18/20 runs", ell_ok >= REQUIRED_RUNS, format!("{ell_ok}/{n}"));
    report.line("1d", "ARI >= 0.95 in >= 18/20 runs", ari_ok >= REQUIRED_RUNS, format!("{ari_ok}/{n}"));
    report.line(
        "1e",
        "each run under 60 s",
        slowest < RUN_BUDGET,
        format!("slowest {:.2} s", slowest.as_secs_f64()),
    );
    report.line(
        "2",
        "baseline (t = 0) ell_hat >= 10 at tol 1e-8 in >= 18/20 runs",
        baseline_ok >= REQUIRED_RUNS,
        format!("{baseline_ok}/{n}"),
    );
}

fn multiplicity_and_collapse(report: &mut Report, range: &mut SpectrumRange) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let start = Instant::now();
    let (mut matched, mut multi) = (0, 0);
    let mut mismatches = Vec::new();
    let (mut worst_fixed, mut worst_diam, mut worst_resid, mut kmeans_exact) = (0f64, 0f64, 0f64, 0);
    for trial in 0..200 {
        let inst = clustered_instance(&mut rng);
        let g = build_graph(&inst.points, inst.h).unwrap();
        let e = eigendecompose(&g, g.size()).unwrap();
        range.add(&e.eigenvalues);
        let zeros = count_zero_eigenvalues(&e, ZERO_TOL).unwrap().count;
        let comps = connected_components(&inst.points, inst.h).unwrap();
        if zeros == comps.count {
            matched += 1;
        } else {
            mismatches.push(format!("#{trial}: {zeros} vs {}", comps.count));
        }
        if comps.count < 2 || zeros != comps.count {
            continue;
        }
        let d_min = min_intercomponent_distance(&inst.points, &comps).unwrap();
        if !(inst.h < d_min) {
            continue;
        }
        multi += 1;

        let q = g.markov();
        for c in 0..comps.count {
            let ind: Vec<f64> = comps.labels.iter().map(|&l| f64::from(u8::from(l == c))).collect();
            let err = q.matvec(&ind).iter().zip(&ind).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            worst_fixed = worst_fixed.max(err);
        }

        let rows = embed(&e, zeros).unwrap();
        for i in 0..rows.len() {
            for j in i + 1..rows.len() {
                if comps.labels[i] == comps.labels[j] {
                    worst_diam = worst_diam.max(dist2(&rows[i], &rows[j]).sqrt());
                }
            }
        }
        worst_resid = worst_resid.max(align_to_indicators(&rows, &comps.labels).unwrap().residual);

        let km = kmeans(&rows, zeros, 10, trial).unwrap();
        let ari = adjusted_rand_index(&to_labels(&km.assignments), &to_labels(&comps.labels)).unwrap();
        kmeans_exact += usize::from(ari == 1.0);
    }
    let elapsed = start.elapsed();
    report.line(
        "3",
        "zero count (tol 1e-8) = union-find count on 200 instances, < 30 s",
        matched == 200 && elapsed < Duration::from_secs(30),
        format!("{matched}/200 in {:.2} s {}", elapsed.as_secs_f64(), mismatches.join(", ")),
    );
    let some = multi > 0;
    report.line("4a", "|Q 1_C - 1_C|_inf <= 1e-12", some && worst_fixed <= 1e-12, format!("max {worst_fixed:.2e} over {multi} instances"));
    report.line("4b", "within-component embedded diameter <= 1e-6", some && worst_diam <= 1e-6, format!("max {worst_diam:.2e}"));
    report.line("4c", "indicator alignment residual <= 1e-6", some && worst_resid <= 1e-6, format!("max {worst_resid:.2e}"));
    report.line("4d", "k-means with k = ell_hat recovers components (ARI = 1)", some && kmeans_exact == multi, format!("{kmeans_exact}/{multi}"));
}

fn eigensolver_cross_check(report: &mut Report, range: &mut SpectrumRange) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    let mut worst = 0f64;
    for _ in 0..50 {
        let inst = uniform_instance(&mut rng, 5..=150);
        let g = build_graph(&inst.points, inst.h).unwrap();
        let fast = eigendecompose(&g, g.size()).unwrap().eigenvalues;
        let slow = dense_reference_spectrum(&g).unwrap();
        range.add(&fast);
        range.add(&slow);
        for (a, b) in fast.iter().zip(&slow) {
            worst = worst.max((a - b).abs());
        }
    }
    report.line("6a", "eigensolver matches Jacobi reference within 1e-9 (50 instances)", worst <= 1e-9, format!("max {worst:.2e}"));
}

/// Smallest within-group scatter over every partition of the rows into
/// exactly `k` nonempty groups, written as a pairwise sum.
fn exhaustive_inertia(rows: &[Vec<f64>], k: usize) -> f64 {
    let n = rows.len();
    let mut assign = vec![0usize; n];
    let mut best = f64::INFINITY;
    // restricted growth strings enumerate each partition once
    fn visit(i: usize, used: usize, k: usize, rows: &[Vec<f64>], assign: &mut Vec<usize>, best: &mut f64) {
        if i == rows.len() {
            if used != k {
                return;
            }
            let mut total = 0.0;
            for c in 0..k {
                let members: Vec<usize> = (0..rows.len()).filter(|&j| assign[j] == c).collect();
                let mut s = 0.0;
                for &a in &members {
                    for &b in &members {
                        s += dist2(&rows[a], &rows[b]);
                    }
                }
                total += s / (2.0 * members.len() as f64);
            }
            *best = best.min(total);
            return;
        }
        if rows.len() - i < k.saturating_sub(used) {
            return;
        }
        for c in 0..(used + 1).min(k) {
            assign[i] = c;
            visit(i + 1, used.max(c + 1), k, rows, assign, best);
        }
    }
    visit(0, 0, k, rows, &mut assign, &mut best);
    best
}

fn kmeans_cross_check(report: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0106);
    let mut worst = 0f64;
    for trial in 0..25 {
        let n = rng.random_range(2..=8);
        let dim = rng.random_range(1..=3);
        let k = rng.random_range(1..=n.min(4));
        let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| rng.random::<f64>()).collect()).collect();
        let got = kmeans(&rows, k, 10, trial).unwrap().inertia;
        worst = worst.max((got - exhaustive_inertia(&rows, k)).abs());
    }
    report.line("6b", "k-means inertia matches exhaustive optimum within 1e-12 (25 instances)", worst <= 1e-12, format!("max {worst:.2e}"));
}

fn ari_cross_check(report: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0206);
    let mut worst = 0f64;
    for _ in 0..25 {
        let n = rng.random_range(2..=60);
        let (ka, kb) = (rng.random_range(1..=6), rng.random_range(1..=6));
        let a: Vec<usize> = (0..n).map(|_| rng.random_range(0..ka)).collect();
        let b: Vec<usize> = (0..n).map(|_| rng.random_range(0..kb)).collect();
        let got = adjusted_rand_index(&to_labels(&a), &to_labels(&b)).unwrap();
        worst = worst.max((got - pair_counting_ari(&a, &b)).abs());
    }
    report.line("6c", "ARI matches pair-counting brute force (25 label pairs)", worst <= 1e-12, format!("max {worst:.2e}"));
}

fn kde_quadrature(report: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    let mut worst = 0f64;
    for (dim, n, b) in [(1, 50, 0.3), (1, 200, 0.05), (2, 30, 0.4), (2, 80, 0.2)] {
        let coords: Vec<f64> = (0..n * dim).map(|_| StandardNormal.sample(&mut rng)).collect();
        let points = PointSet::new(coords, dim, None).unwrap();
        let model = kde_fit(&points, b).unwrap();
        let (lo, hi, steps) = (-9.0, 9.0, if dim == 1 { 20_000 } else { 900 });
        let step = (hi - lo) / steps as f64;
        let mut total = 0.0;
        if dim == 1 {
            for i in 0..steps {
                total += model.density_at(&[lo + (i as f64 + 0.5) * step]).unwrap() * step;
            }
        } else {
            for i in 0..steps {
                for j in 0..steps {
                    let x = [lo + (i as f64 + 0.5) * step, lo + (j as f64 + 0.5) * step];
                    total += model.density_at(&x).unwrap() * step * step;
                }
            }
        }
        worst = worst.max((total - 1.0).abs());
    }
    report.line("7a", "KDE integrates to 1 within 1e-3", worst <= 1e-3, format!("max deviation {worst:.2e}"));
}

/// Closed-form least-squares cross-validation score by direct double loop.
fn naive_lscv(points: &PointSet, b: f64) -> f64 {
    let (n, d) = (points.len() as f64, points.dim() as i32);
    let mut conv = 0.0;
    let mut loo = 0.0;
    for i in 0..points.len() {
        for j in 0..points.len() {
            let z2 = dist2(points.point(i), points.point(j)) / (b * b);
            conv += (4.0 * PI).powf(-0.5 * d as f64) * (-z2 / 4.0).exp();
            if i != j {
                loo += (2.0 * PI).powf(-0.5 * d as f64) * (-z2 / 2.0).exp();
            }
        }
    }
    let bd = b.powi(d);
    conv / (n * n * bd) - 2.0 * loo / (n * (n - 1.0) * bd)
}

fn lscv_scan(report: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0107);
    let grid = geometric_grid(0.01, 2.0, 200);
    let mut agree = 0;
    let cases = 10;
    for _ in 0..cases {
        let inst = uniform_instance(&mut rng, 20..=200);
        let got = lscv_bandwidth(&inst.points, &grid).unwrap();
        let mut best = (f64::INFINITY, 0.0);
        for &b in &grid {
            let s = naive_lscv(&inst.points, b);
            if s < best.0 {
                best = (s, b);
            }
        }
        agree += usize::from(got == best.1);
    }
    report.line("7b", "LSCV minimizer equals brute-force grid scan", agree == cases, format!("{agree}/{cases}"));
}

fn main() -> ExitCode {
    let mut report = Report { failures: 0 };
    let mut range = SpectrumRange::new();
    multiplicity_and_collapse(&mut report, &mut range);
    eigensolver_cross_check(&mut report, &mut range);
    kmeans_cross_check(&mut report);
    ari_cross_check(&mut report);
    kde_quadrature(&mut report);
    lscv_scan(&mut report);
    mixture_runs(&mut report, &mut range);
    report.line(
        "5",
        "spectrum of S inside [-1 - 1e-9, 1 + 1e-9]",
        range.lo >= -1.0 - 1e-9 && range.hi <= 1.0 + 1e-9,
        format!("[{:.12}, {:.12}] over {} matrices", range.lo, range.hi, range.matrices),
    );
    if report.failures == 0 {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} criteria failed", report.failures);
        ExitCode::FAILURE
    }
}
