//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 when any
//! criterion fails. Run with `cargo test -p semihilbert --test acceptance`.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use semihilbert::battery::{affine_residual, grid_agrees, oracle_gap_ok};
use semihilbert::compression::{annihilated_by_a, check_a_adjointable, check_a_bounded, op_seminorm, sharp};
use semihilbert::context::PositiveContext;
use semihilbert::instances::{
    context_with_rank, hyponormal_pair, lifted_jordan, lifted_normaloid, lifted_unitary, operator_of_kind,
    random_context, random_kind, seminorm_parallel_pair, bounded_operator, NormaloidKind,
};
use semihilbert::invariants::{classify, domega_a, omega_a};
use semihilbert::linalg::{c, diag_real, random_gaussian_matrix, ComplexMatrix};
use semihilbert::oracle::{oracle_estimate, Functional};
use semihilbert::parallelism::{parallel_to_identity, radius_parallel, seminorm_parallel, PARALLEL_TOL};
use semihilbert::shell::{probe_target, shell_sample, shell_summary, ShellMode, ShellTarget};
use semihilbert::ExtReal;

const TOL: f64 = 1e-9;

type Outcome = Result<String, String>;

fn fin(v: ExtReal) -> f64 {
    v.finite().unwrap_or(f64::INFINITY)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random A-bounded instances with dimensions cycling through 2..=6, drawn
/// with the verify generator's kind mix and rejecting unbounded draws.
fn bounded_instances(count: usize, seed: u64) -> Vec<(PositiveContext, ComplexMatrix)> {
    let mut rng = rng(seed);
    let mut out = Vec::with_capacity(count);
    let mut i = 0;
    while out.len() < count {
        let n = 2 + i % 5;
        i += 1;
        let ctx = random_context(n, &mut rng).unwrap();
        let t = operator_of_kind(&ctx, random_kind(&mut rng), &mut rng);
        if check_a_bounded(&ctx, &t).unwrap() {
            out.push((ctx, t));
        }
    }
    out
}

fn swap13() -> ComplexMatrix {
    let mut t = ComplexMatrix::zeros(3, 3);
    t[(0, 2)] = c(1.0);
    t[(1, 1)] = c(1.0);
    t[(2, 0)] = c(1.0);
    t
}

fn unbounded_example() -> Outcome {
    let ctx = PositiveContext::new(&diag_real(&[1.0, 0.0, 0.0])).unwrap();
    let t = swap13();
    let mut failed = Vec::new();
    if check_a_bounded(&ctx, &t).unwrap() {
        failed.push("reported A-bounded".to_string());
    }
    let values = [
        op_seminorm(&ctx, &t).unwrap(),
        omega_a(&ctx, &t, TOL).unwrap(),
        domega_a(&ctx, &t, TOL, 42).unwrap(),
    ];
    if values.iter().any(|v| v.is_finite()) {
        failed.push(format!("finite invariants {values:?}"));
    }
    let mut max_lambda = Vec::new();
    let mut mu_range = (f64::INFINITY, f64::NEG_INFINITY);
    for scale in [0.0, 1.0, 10.0] {
        let cloud = shell_sample(&ctx, &t, ShellMode::Ambient, 2000, 42, scale).unwrap();
        let summary = shell_summary(&cloud);
        max_lambda.push(summary.max_abs_lambda);
        mu_range = (mu_range.0.min(summary.min_mu), mu_range.1.max(summary.max_mu));
    }
    let growth = max_lambda[2] / max_lambda[1];
    if growth < 5.0 {
        failed.push(format!("max|lambda| grew only {growth:.3}x"));
    }
    if (mu_range.0 - 1.0).abs() > 1e-10 || (mu_range.1 - 1.0).abs() > 1e-10 {
        failed.push(format!(
            "mu ranges over [{:.3e}, {:.3e}], not 1 +- 1e-10 (here mu = |x_3|^2)",
            mu_range.0, mu_range.1
        ));
    }
    let detail = format!("max|lambda| by null scale {max_lambda:.3?}, growth {growth:.2}x");
    if failed.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{}; {detail}", failed.join("; ")))
    }
}

/// `min_z |(z, |z|^2) - (t, m)|`; for fixed `|z|` the distance is smallest
/// with `z` aligned with `t`, which leaves a search over `|z|`.
fn paraboloid_distance(t: Complex64, m: f64) -> f64 {
    let f = |rho: f64| ((rho - t.norm()).powi(2) + (rho * rho - m).powi(2)).sqrt();
    let steps = 100_000;
    let hi = 2.0 + t.norm() + m.abs().sqrt();
    let (k, _) = (0..=steps)
        .map(|k| (k, f(hi * k as f64 / steps as f64)))
        .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
    let h = hi / steps as f64;
    let (mut lo, mut up) = (((k as f64) - 1.0).max(0.0) * h, (k as f64 + 1.0) * h);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let (x1, x2) = (up - g * (up - lo), lo + g * (up - lo));
        if f(x1) < f(x2) {
            up = x2;
        } else {
            lo = x1;
        }
    }
    f(0.5 * (lo + up))
}

fn nonconvex_example() -> Outcome {
    let ctx = PositiveContext::new(&diag_real(&[0.0, 0.0, 1.0])).unwrap();
    let t = swap13();
    let mut worst = 0.0f64;
    for (seed, scale) in [(1, 0.0), (2, 1.0), (3, 10.0)] {
        let cloud = shell_sample(&ctx, &t, ShellMode::Ambient, 2000, seed, scale).unwrap();
        for pt in &cloud.points {
            worst = worst.max((pt.mu - pt.lambda.norm_sqr()).abs());
        }
    }
    if worst > 1e-10 {
        return Err(format!("|mu - |lambda|^2| reaches {worst:e}"));
    }
    let target = ShellTarget {
        lambda: Complex64::new(0.5, 0.5),
        mu: 1.0,
    };
    let floor = paraboloid_distance(target.lambda, target.mu);
    let cloud = shell_sample(&ctx, &t, ShellMode::Ambient, 500, 4, 1.0).unwrap();
    let probe = probe_target(&ctx, &t, target, &cloud, 42).unwrap();
    let detail = format!(
        "max |mu - |lambda|^2| = {worst:.1e}; probe distance {:.6} vs floor {floor:.6}",
        probe.distance
    );
    if probe.distance >= 0.9 * floor {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn sandwich(instances: &[(PositiveContext, ComplexMatrix)]) -> Outcome {
    let mut worst = 0.0f64;
    for (i, (ctx, t)) in instances.iter().enumerate() {
        let w = fin(omega_a(ctx, t, TOL).unwrap());
        let s = fin(op_seminorm(ctx, t).unwrap());
        let d = fin(domega_a(ctx, t, TOL, i as u64).unwrap());
        let lower = w.max(s * s);
        let upper = (w * w + s.powi(4)).sqrt();
        let excess = ((lower - d).max(d - upper)) / (1.0 + d);
        worst = worst.max(excess);
        if excess > 1e-6 {
            return Err(format!("instance {i}: lower {lower}, d {d}, upper {upper}"));
        }
    }
    Ok(format!("{} instances, worst relative excess {worst:.1e}", instances.len()))
}

fn lambda_containment(instances: &[(PositiveContext, ComplexMatrix)]) -> Outcome {
    let mut points = 0;
    let mut violations = 0;
    for (i, (ctx, t)) in instances.iter().enumerate() {
        let cloud = shell_sample(ctx, t, ShellMode::Compressed, 500, i as u64, 1.0).unwrap();
        points += cloud.points.len();
        violations += shell_summary(&cloud).lambda_violations;
    }
    let detail = format!("{violations} violations in {points} points");
    if violations == 0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn normaloid_equivalence() -> Outcome {
    let mut rng = rng(5);
    let mut worst = 0.0f64;
    for i in 0..50 {
        let n = 2 + i % 5;
        let ctx = random_context(n, &mut rng).unwrap();
        let kind = if i % 2 == 0 { NormaloidKind::Hermitian } else { NormaloidKind::Normal };
        let t = lifted_normaloid(&ctx, kind, i % 3 != 0, &mut rng).unwrap();
        let r = parallel_to_identity(&ctx, &t, PARALLEL_TOL, i as u64).unwrap();
        let all = r.parallel_to_identity && r.dw_radius_pythagorean && r.normaloid && r.dw_radius_normaloid_form;
        worst = worst.max(r.normaloid_form_gap);
        if !all || r.normaloid_form_gap > 1e-6 {
            return Err(format!("normaloid instance {i}: {r:?}"));
        }
    }
    let mut min_gap = f64::INFINITY;
    for i in 0..10 {
        let n = 2 + i % 5;
        let ctx = context_with_rank(n, 2 + i % (n.min(4) - 1), &mut rng).unwrap();
        let t = lifted_jordan(&ctx).unwrap();
        let r = parallel_to_identity(&ctx, &t, PARALLEL_TOL, i as u64).unwrap();
        let any = r.parallel_to_identity || r.dw_radius_pythagorean || r.normaloid || r.dw_radius_normaloid_form;
        min_gap = min_gap.min(r.normaloid_form_gap);
        if any || r.normaloid_form_gap < 0.05 {
            return Err(format!("Jordan instance {i}: {r:?}"));
        }
    }
    Ok(format!("50 normaloid (worst gap {worst:.1e}), 10 Jordan (min gap {min_gap:.4})"))
}

fn oracle_cross_check(instances: &[(PositiveContext, ComplexMatrix)]) -> Outcome {
    let mut range = (f64::INFINITY, f64::NEG_INFINITY);
    for (i, (ctx, t)) in instances.iter().enumerate() {
        let kernels = [
            (Functional::OpNorm, fin(op_seminorm(ctx, t).unwrap())),
            (Functional::Omega, fin(omega_a(ctx, t, TOL).unwrap())),
            (Functional::DOmega, fin(domega_a(ctx, t, TOL, i as u64).unwrap())),
        ];
        for (functional, kernel) in kernels {
            let oracle = oracle_estimate(ctx, t, None, functional, 20000, 1000 + i as u64).unwrap();
            let gap = kernel - oracle.value;
            range = (range.0.min(gap), range.1.max(gap));
            if !oracle_gap_ok(kernel, oracle.value) {
                return Err(format!("instance {i} {functional:?}: kernel {kernel}, oracle {}", oracle.value));
            }
        }
    }
    Ok(format!(
        "{} instances x 3 functionals, kernel - oracle in [{:.1e}, {:.1e}]",
        instances.len(),
        range.0,
        range.1
    ))
}

fn unitary_invariance(instances: &[(PositiveContext, ComplexMatrix)]) -> Outcome {
    let mut rng = rng(7);
    let mut worst = 0.0f64;
    for (i, (ctx, t)) in instances.iter().enumerate() {
        let u = lifted_unitary(ctx, true, &mut rng).unwrap();
        let conjugated = &u * t * sharp(ctx, &u).unwrap();
        let d = fin(domega_a(ctx, t, TOL, i as u64).unwrap());
        let e = fin(domega_a(ctx, &conjugated, TOL, i as u64).unwrap());
        let rel = (d - e).abs() / d.max(1e-300);
        worst = worst.max(rel);
        if rel > 1e-6 {
            return Err(format!("instance {i}: {d} vs {e}"));
        }
    }
    Ok(format!("{} pairs, worst relative difference {worst:.1e}", instances.len()))
}

fn affine_law() -> Outcome {
    let mut rng = rng(8);
    let mut worst = 0.0f64;
    for i in 0..20 {
        let n = 2 + i % 5;
        let ctx = random_context(n, &mut rng).unwrap();
        let t = operator_of_kind(&ctx, random_kind(&mut rng), &mut rng);
        let mut draw = || Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let (alpha, beta) = (draw(), draw());
        for x in ctx.sample_unit(50, i as u64, 2.0) {
            let residual = affine_residual(&ctx, &t, alpha, beta, &x).unwrap();
            worst = worst.max(residual);
            if residual > 1e-10 {
                return Err(format!("triple {i}: residual {residual:e}"));
            }
        }
    }
    Ok(format!("20 triples x 50 witnesses, worst relative residual {worst:.1e}"))
}

fn scaling_laws(instances: &[(PositiveContext, ComplexMatrix)]) -> Outcome {
    for (i, (ctx, t)) in instances.iter().enumerate() {
        let seed = i as u64;
        let d = fin(domega_a(ctx, t, TOL, seed).unwrap());
        let at = |f: Complex64| fin(domega_a(ctx, &(t * f), TOL, seed).unwrap());
        let slack = 1e-6 * (1.0 + d);
        let doubled = at(c(2.0));
        let rotated = at(Complex64::from_polar(1.0, PI / 3.0));
        let halved = at(c(0.5));
        if doubled < 2.0 * d - 2.0 * slack || (rotated - d).abs() > slack || halved > 0.5 * d + slack {
            return Err(format!("instance {i}: d {d}, 2T {doubled}, rotated {rotated}, T/2 {halved}"));
        }
    }
    Ok(format!("{} instances", instances.len()))
}

fn parallel_cross_validation() -> Outcome {
    let mut rng = rng(10);
    let (mut parallel, mut not_parallel) = (0, 0);
    for i in 0..100 {
        let n = 2 + i % 5;
        let ctx = random_context(n, &mut rng).unwrap();
        let (t, s) = if i % 2 == 0 {
            (bounded_operator(&ctx, &mut rng), bounded_operator(&ctx, &mut rng))
        } else {
            seminorm_parallel_pair(&ctx, &mut rng).unwrap()
        };
        if let Err(detail) = grid_agrees(&ctx, &t, &s, i as u64).unwrap() {
            return Err(format!("pair {i}: {detail}"));
        }
        if seminorm_parallel(&ctx, &t, &s, PARALLEL_TOL, i as u64).unwrap().verdict {
            parallel += 1;
        } else {
            not_parallel += 1;
        }
        let alpha = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        if !seminorm_parallel(&ctx, &t, &(&t * alpha), PARALLEL_TOL, 0).unwrap().verdict {
            return Err(format!("pair {i}: S = alpha T reported not parallel"));
        }
        if ctx.rank() >= 2 {
            let jordan = lifted_jordan(&ctx).unwrap();
            let id = ComplexMatrix::identity(n, n);
            if seminorm_parallel(&ctx, &jordan, &id, PARALLEL_TOL, 0).unwrap().verdict {
                return Err(format!("pair {i}: Jordan block reported parallel to I"));
            }
        }
    }
    Ok(format!("100 pairs agree with the grid ({parallel} parallel, {not_parallel} not)"))
}

fn hyponormal_bridge() -> Outcome {
    let mut rng = rng(11);
    for i in 0..30 {
        let n = 2 + i % 5;
        let ctx = random_context(n, &mut rng).unwrap();
        let (t, s) = hyponormal_pair(&ctx, &mut rng).unwrap();
        let hyponormal = classify(&ctx, &t, TOL, 0).unwrap().a_hyponormal && classify(&ctx, &s, TOL, 0).unwrap().a_hyponormal;
        let radius = radius_parallel(&ctx, &t, &s, PARALLEL_TOL, i as u64).unwrap();
        if !hyponormal || !radius.verdict {
            return Err(format!("pair {i}: hyponormal {hyponormal}, radius parallel {}", radius.verdict));
        }
        let seminorm = seminorm_parallel(&ctx, &t, &s, PARALLEL_TOL, i as u64).unwrap();
        if !seminorm.verdict {
            return Err(format!("pair {i}: seminorm gap {}", seminorm.gap));
        }
    }
    Ok("30 pairs".into())
}

fn zero_law() -> Outcome {
    let mut rng = rng(12);
    let (mut zero, mut nonzero, mut smallest) = (0, 0, f64::INFINITY);
    for i in 0..50 {
        let n = 2 + i % 5;
        let rank = 1 + i % (n - 1).min(4);
        let ctx = context_with_rank(n, rank, &mut rng).unwrap();
        let t = if i % 2 == 0 {
            let null = ctx.null_basis();
            null * random_gaussian_matrix(null.ncols(), n, &mut rng)
        } else {
            operator_of_kind(&ctx, random_kind(&mut rng), &mut rng)
        };
        let d = domega_a(&ctx, &t, TOL, i as u64).unwrap();
        if annihilated_by_a(&ctx, &t).unwrap() {
            zero += 1;
            if d != ExtReal::Finite(0.0) {
                return Err(format!("instance {i}: A T = 0 but d = {d:?}"));
            }
        } else {
            nonzero += 1;
            let value = fin(d);
            smallest = smallest.min(value);
            if value <= 1e-6 {
                return Err(format!("instance {i}: A T != 0 but d = {value}"));
            }
        }
    }
    Ok(format!("{zero} with A T = 0, {nonzero} others (smallest d {smallest:.3e})"))
}

fn order_corollary() -> Outcome {
    let mut rng = rng(13);
    let (mut agree, mut parallel) = (0, 0);
    let mut i = 0;
    while agree < 50 {
        let n = 2 + i % 5;
        let ctx = random_context(n, &mut rng).unwrap();
        let t = if i % 2 == 0 {
            lifted_normaloid(&ctx, NormaloidKind::Hermitian, true, &mut rng).unwrap()
        } else {
            operator_of_kind(&ctx, random_kind(&mut rng), &mut rng)
        };
        i += 1;
        if !check_a_adjointable(&ctx, &t).unwrap() {
            continue;
        }
        let r = parallel_to_identity(&ctx, &t, PARALLEL_TOL, i as u64).unwrap();
        if r.order_bound != Some(r.parallel_to_identity) {
            return Err(format!("instance {i}: order bound {:?} (margin {:?}) vs parallel {}", r.order_bound, r.order_margin, r.parallel_to_identity));
        }
        agree += 1;
        parallel += usize::from(r.parallel_to_identity);
    }
    Ok(format!("50 instances agree ({parallel} parallel to I)"))
}

fn main() {
    let start = Instant::now();
    let wide = bounded_instances(200, 3);
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("unbounded example: infinite invariants, lambda growth, mu = 1", Box::new(unbounded_example)),
        ("non-convex example: shell on paraboloid, midpoint unreachable", Box::new(nonconvex_example)),
        ("sandwich bounds on 200 instances", Box::new(|| sandwich(&wide))),
        ("compressed shells inside Lambda", Box::new(|| lambda_containment(&wide))),
        ("normaloid equivalence", Box::new(normaloid_equivalence)),
        ("kernels vs oracle", Box::new(|| oracle_cross_check(&wide[..100]))),
        ("unitary invariance of d omega_A", Box::new(|| unitary_invariance(&wide[..50]))),
        ("affine shell law", Box::new(affine_law)),
        ("scaling laws", Box::new(|| scaling_laws(&wide[100..150]))),
        ("seminorm parallelism vs lambda grid", Box::new(parallel_cross_validation)),
        ("hyponormal bridge", Box::new(hyponormal_bridge)),
        ("zero law", Box::new(zero_law)),
        ("order bound vs parallel to identity", Box::new(order_corollary)),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let outcome = run();
        let secs = t0.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:2} {name} ({detail}) [{secs:.1}s]", k + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {:2} {name} ({detail}) [{secs:.1}s]", k + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed in {:.1}s",
        criteria.len() - failures,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
