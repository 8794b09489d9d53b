//! Acceptance criteria 1-10. Runs as a plain binary so every criterion prints
//! one PASS/FAIL line; exits non-zero if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use clustercert::bounds::{opt_lower_bound, opt_solve_numeric, psi, DEFAULT_RESOLUTION};
use clustercert::discretize::{discretize, inflated_params, DEFAULT_DENOMINATOR_BOUND};
use clustercert::generators::{gen_adversarial, gen_blobs, gen_model, gen_random, BlobSpec, ModelSpec, RandomStyle};
use clustercert::greedy::{greedy_decomposition, greedy_structure, max_cluster, GreedyOptions, StageSelection};
use clustercert::io::PointMetric;
use clustercert::metric::diameter;
use clustercert::oracle::max_structure_bruteforce;
use clustercert::report::{certify, CertifyOptions};
use clustercert::stats::{
    alpha_min, anticlique_measure_exact, anticlique_measure_mc, beta_min, factorial, medium_measure, sym_poly,
};
use clustercert::{FiniteMetricSpace, Workers};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{blob_space, params, suite_instance};

/// Outcome of one criterion: a one-line summary, or the reason it failed.
type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:.2?}, limit {limit:?}"))
}

fn model_space() -> FiniteMetricSpace {
    gen_model(&ModelSpec {
        clusters: 3,
        points_per_cluster: 20,
        r: 1.0,
        separation: 4.0,
        seed: 1,
        allow_weak_separation: false,
    })
    .unwrap()
}

fn quiet(workers: usize) -> CertifyOptions {
    CertifyOptions {
        timings: false,
        workers: Workers::new(workers),
        ..CertifyOptions::default()
    }
}

fn model_exactness() -> Outcome {
    let start = Instant::now();
    let space = model_space();
    let rep = certify(&space, &params(1.0, 3), &quiet(1)).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(rep.stats.alpha_min == 0.0, || format!("alpha_min = {}", rep.stats.alpha_min))?;
    ensure(rep.stats.beta_min == 0.0, || format!("beta_min = {}", rep.stats.beta_min))?;
    ensure(rep.bound.psi == 1.0, || format!("psi = {}", rep.bound.psi))?;
    ensure(rep.coverage_ratio == 1.0, || format!("coverage = {}", rep.coverage_ratio))?;
    ensure(rep.certified, || "not certified".into())?;
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!("alpha=0 beta=0 psi=1 coverage=1 in {elapsed:.2?}"))
}

fn theorem_suite() -> Outcome {
    let start = Instant::now();
    let (mut informative, mut violations) = (0, Vec::new());
    for i in 0..200 {
        let (s, p) = suite_instance(i);
        let n = s.n() as f64;
        let bound = psi(alpha_min(&s, &p), beta_min(&s, &p, u64::MAX).unwrap(), p.k).unwrap();
        let oracle = max_structure_bruteforce(&s, &p, 14).unwrap();
        let (greedy, _) = greedy_structure(&s, &p, &GreedyOptions::default(), StageSelection::Heaviest).unwrap();
        if bound.psi > 0.0 {
            informative += 1;
            if oracle.measure < bound.psi * n {
                violations.push(format!("#{i} oracle {} < psi {} * {n}", oracle.measure, bound.psi));
            }
        }
        if greedy.measure > oracle.measure {
            violations.push(format!("#{i} greedy {} > oracle {}", greedy.measure, oracle.measure));
        }
    }
    let elapsed = start.elapsed();
    ensure(violations.is_empty(), || violations.join("; "))?;
    ensure(informative > 0, || "no instance had psi > 0".into())?;
    within(elapsed, Duration::from_secs(300))?;
    Ok(format!("200 instances ({informative} with psi > 0), 0 violations in {elapsed:.2?}"))
}

fn phi_suite() -> Outcome {
    let mut violations = Vec::new();
    for i in 0..200 {
        let (s, p) = suite_instance(i);
        let d = greedy_decomposition(&s, &p, &GreedyOptions::default()).unwrap();
        ensure(d.exact, || format!("#{i} decomposition not exact"))?;
        let mut z: Vec<f64> = d.stages.iter().map(|st| st.neighborhood.len() as f64).collect();
        z.sort_by(|a, b| b.total_cmp(a));
        let top: f64 = z.iter().take(p.k).sum();
        let phi = clustercert::bounds::phi(beta_min(&s, &p, u64::MAX).unwrap(), p.k).unwrap();
        if top < phi * s.n() as f64 {
            violations.push(format!("#{i} {top} < {phi} * {}", s.n()));
        }
    }
    ensure(violations.is_empty(), || violations.join("; "))?;
    Ok("200 instances, 0 violations".into())
}

fn adversarial_construction() -> Outcome {
    let (groups, size) = (4, 5);
    let s = gen_adversarial(groups, size, 1.0, 2.0).unwrap();
    let all: Vec<usize> = (0..s.n()).collect();
    let best = max_cluster(&s, &all, 2.0, u64::MAX).map_err(|e| e.to_string())?;
    ensure(best.measure == groups as f64, || format!("max cluster mass {}", best.measure))?;
    let mut far = 0;
    for i in 0..s.n() {
        for j in 0..s.n() {
            if s.dist(i, j) > 2.0 {
                far += 1;
            }
        }
    }
    let expected = groups * size * (size - 1);
    ensure(far == expected, || format!("{far} far ordered pairs, expected {expected}"))?;
    ensure(s.n() * s.n() == 400, || format!("{} ordered pairs", s.n() * s.n()))?;
    Ok(format!("max 2r-cluster mass 4, far pairs {far}/400"))
}

/// Weighted count of ordered `(k+1)`-tuples with all pairwise distances
/// `> r`, by plain enumeration of index vectors.
fn ordered_tuples(s: &FiniteMetricSpace, r: f64, order: usize) -> f64 {
    let n = s.n();
    let mut idx = vec![0usize; order];
    let mut total = 0.0;
    loop {
        let ok = (0..order).all(|a| (a + 1..order).all(|b| s.dist(idx[a], idx[b]) > r));
        if ok {
            total += idx.iter().map(|&i| s.weight(i)).product::<f64>();
        }
        let mut pos = 0;
        loop {
            if pos == order {
                return total;
            }
            idx[pos] += 1;
            if idx[pos] < n {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

fn counting_equivalence() -> Outcome {
    for i in 0..50u64 {
        let n = 3 + (i % 7) as usize;
        let k = 2 + (i % 2) as usize;
        let style = if i % 2 == 0 {
            RandomStyle::UniformCube
        } else {
            RandomStyle::RandomSemimetric
        };
        let s = gen_random(n, 500 + i, style).unwrap();
        let r = [0.15, 0.3, 0.45][(i % 3) as usize];
        let p = params(r, k);
        let exact = factorial(k + 1) * anticlique_measure_exact(&s, &p, u64::MAX).unwrap().measure;
        let brute = ordered_tuples(&s, r, k + 1);
        ensure(exact == brute, || format!("#{i}: {exact} != {brute}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 0..=12usize {
        let values: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..2.0)).collect();
        for s in 0..=n + 1 {
            let mut subsets = 0.0;
            for mask in 0u32..(1 << n) {
                if mask.count_ones() as usize == s {
                    subsets += (0..n).filter(|b| mask >> b & 1 == 1).map(|b| values[b]).product::<f64>();
                }
            }
            let dp = sym_poly(&values, s);
            let scale = subsets.abs().max(f64::MIN_POSITIVE);
            ensure((dp - subsets).abs() <= 1e-12 * scale, || format!("n {n} s {s}: {dp} vs {subsets}"))?;
        }
    }
    Ok("50 anticlique instances exact; sym_poly n <= 12 all s".into())
}

fn monte_carlo_calibration() -> Outcome {
    let start = Instant::now();
    let s = blob_space(3, 30, 0.5, 1.5, 42);
    let p = params(0.5, 2);
    let beta = beta_min(&s, &p, u64::MAX).unwrap();
    ensure(beta > 0.0, || "beta_min is zero".into())?;
    let mut worst: f64 = 0.0;
    for seed in 0..20 {
        let est = anticlique_measure_mc(&s, &p, 100_000, seed).map_err(|e| e.to_string())?;
        let z = (est.estimate - beta).abs() / est.std_error;
        worst = worst.max(z);
        ensure(z <= 4.0, || format!("seed {seed}: |{} - {beta}| = {z:.2} se", est.estimate))?;
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(30))?;
    Ok(format!("beta_min={beta:.5}, worst deviation {worst:.2} se, {elapsed:.2?}"))
}

fn optimisation_bound() -> Outcome {
    let start = Instant::now();
    let (mut checked, mut worst_gap) = (0, f64::INFINITY);
    for k in 2..=5usize {
        for n in k + 1..=20 {
            for c in [1e-4, 1e-3, 1e-2, 1e-1, 0.5] {
                let (bound, valid) = opt_lower_bound(c, k);
                if !valid {
                    continue;
                }
                let sol = opt_solve_numeric(n, k, c, DEFAULT_RESOLUTION).map_err(|e| e.to_string())?;
                ensure(sol.objective >= bound, || format!("n {n} k {k} c {c}: {} < {bound}", sol.objective))?;
                worst_gap = worst_gap.min(sol.objective - bound);
                checked += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(120))?;
    Ok(format!("{checked} valid cases, min gap {worst_gap:.3e}, {elapsed:.2?}"))
}

fn discretisation() -> Outcome {
    let cloud = gen_blobs(&BlobSpec {
        blobs: 4,
        points_per_blob: 50,
        dim: 2,
        // blobs well apart relative to their spread, r between the scales
        spread: 0.3,
        separation: 4.0,
        seed: 2024,
    })
    .unwrap();
    let s = cloud.to_space(PointMetric::Euclidean).unwrap();
    let p = params(1.0, 2);
    let beta = beta_min(&s, &p, u64::MAX).map_err(|e| e.to_string())?;
    ensure(beta > 0.0, || "beta_min is zero".into())?;
    let mut last_gap = f64::NAN;
    for factor in [0.4, 0.2, 0.1, 0.05] {
        let eps = factor * p.r;
        let d = discretize(&s, eps, DEFAULT_DENOMINATOR_BOUND).map_err(|e| e.to_string())?;
        ensure(d.cells.iter().all(|c| diameter(&s, c).unwrap() <= eps), || "oversized cell".into())?;
        let inf = inflated_params(&s, &p, eps, beta).map_err(|e| e.to_string())?;
        ensure(inf.alpha_eps >= inf.alpha_min, || format!("eps {eps}: alpha_eps < alpha_min"))?;
        let ratio = inf.beta_eps / inf.beta_min;
        let expected = (1.0 - eps).powi(-(p.k as i32 + 1));
        ensure((ratio - expected).abs() <= 1e-12 * expected, || format!("eps {eps}: ratio {ratio} vs {expected}"))?;
        last_gap = inf.alpha_eps - inf.alpha_min;
    }
    ensure(last_gap.abs() <= 0.05, || format!("alpha gap {last_gap} at smallest eps"))?;
    Ok(format!("alpha_min={:.4}, gap at eps=0.05r {last_gap:.4}", alpha_min(&s, &p)))
}

fn medium_edge_lemma() -> Outcome {
    for i in 0..100u64 {
        let n = 3 + (i % 10) as usize;
        let s = gen_random(n, 9000 + i, RandomStyle::UniformCube).unwrap();
        let all: Vec<usize> = (0..n).collect();
        // clamp: choose r so that the diameter is at most 3r
        let r = diameter(&s, &all).unwrap() / [3.0, 2.5, 2.0, 1.5][(i % 4) as usize];
        let p = params(r, 2);
        let b = max_cluster(&s, &all, 2.0 * r, u64::MAX).unwrap().members.len() as f64;
        let a = n as f64;
        let medium = medium_measure(&s, &p);
        ensure(medium >= 0.5 * a * (a - b), || format!("#{i}: {medium} < {}", 0.5 * a * (a - b)))?;
    }
    Ok("100 instances, 0 violations".into())
}

fn determinism() -> Outcome {
    let inputs = [
        (model_space(), params(1.0, 3)),
        (gen_adversarial(4, 5, 1.0, 2.0).unwrap(), params(1.0, 2)),
    ];
    for (s, p) in &inputs {
        let reports: Vec<String> = [1, 2, 8]
            .iter()
            .map(|&w| certify(s, p, &quiet(w)).map(|r| r.to_json()))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        ensure(reports.windows(2).all(|w| w[0] == w[1]), || format!("reports differ for n = {}", s.n()))?;
    }
    Ok("byte-identical with 1, 2, 8 workers".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("model exactness", model_exactness),
        ("coverage theorem suite", theorem_suite),
        ("phi bound suite", phi_suite),
        ("adversarial construction", adversarial_construction),
        ("counting oracle equivalence", counting_equivalence),
        ("monte carlo calibration", monte_carlo_calibration),
        ("optimisation bound", optimisation_bound),
        ("discretisation convergence", discretisation),
        ("medium-edge lemma", medium_edge_lemma),
        ("determinism across workers", determinism),
    ];
    let mut failed = 0;
    for (number, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", number + 1),
            Err(reason) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {reason}", number + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
