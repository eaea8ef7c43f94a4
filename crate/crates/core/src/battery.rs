//! Randomized property battery. Every check is keyed by a short anchor name
//! and run on each generated instance; checks that do not apply to an
//! instance (e.g. boundedness-dependent ones on an unbounded operator) are
//! counted as skipped.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::compression::{
    annihilated_by_a, check_a_adjointable, check_a_bounded, compress, op_seminorm, sharp,
};
use crate::context::PositiveContext;
use crate::error::Result;
use crate::extended::ExtReal;
use crate::instances::{
    bounded_operator, hyponormal_pair, lifted_jordan, lifted_normaloid, lifted_unitary,
    operator_of_kind, random_context, random_kind, seminorm_parallel_pair, NormaloidKind, OperatorKind,
};
use crate::invariants::{classify, domega_a, omega_a, r_a};
use crate::linalg::{
    approx_eq, c, herm_eig, hermitian_part, max_abs, random_gaussian_matrix, spectral_norm,
    ComplexMatrix, ComplexVector,
};
use crate::oracle::{oracle_estimate, Functional};
use crate::parallelism::{parallel_to_identity, radius_parallel, seminorm_parallel, PARALLEL_TOL};
use crate::shell::{shell_point, shell_sample, shell_summary_with_probe, ShellMode, Verdict};

#[derive(Debug, Clone)]
pub struct BatteryConfig {
    pub min_dim: usize,
    pub max_dim: usize,
    pub instances: usize,
    pub seed: u64,
    /// Samples per oracle estimate.
    pub oracle_samples: usize,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        BatteryConfig {
            min_dim: 2,
            max_dim: 6,
            instances: 200,
            seed: 42,
            oracle_samples: 20000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AnchorResult {
    pub anchor: String,
    pub runs: usize,
    pub failures: usize,
    pub skipped: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

impl AnchorResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BatteryReport {
    pub seed: u64,
    pub dims: [usize; 2],
    pub instances: usize,
    pub anchors: Vec<AnchorResult>,
    pub passed: bool,
}

/// One generated instance.
pub struct Case {
    pub index: usize,
    pub ctx: PositiveContext,
    pub kind: OperatorKind,
    pub t: ComplexMatrix,
    pub bounded: bool,
    pub oracle_samples: usize,
}

pub enum Outcome {
    Pass,
    Fail(String),
    Skip,
}

type Check = fn(&Case, &mut ChaCha8Rng) -> Result<Outcome>;

const TOL: f64 = 1e-9;
const REL: f64 = 1e-6;

fn finite(v: ExtReal) -> f64 {
    v.finite().unwrap_or(f64::INFINITY)
}

fn ensure(ok: bool, detail: impl FnOnce() -> String) -> Outcome {
    if ok {
        Outcome::Pass
    } else {
        Outcome::Fail(detail())
    }
}

/// Anchors in report order, each with its check.
pub fn checks() -> Vec<(&'static str, Check)> {
    vec![
        ("unbounded-infinite", check_unbounded_infinite),
        ("ineqwich02", check_consistency),
        ("compression-intertwining", check_intertwining),
        ("compression-multiplicative", check_multiplicative),
        ("sharp-adjoint", check_sharp_adjoint),
        ("sharp-involution", check_sharp_involution),
        ("imporeq2009", check_oracle_agreement),
        ("lambda-containment", check_lambda_containment),
        ("prop2.1-2", check_affine_law),
        ("prop2.1-3", check_adjoint_shell),
        ("prop2.1-4", check_unitary_shell),
        ("propositionsum-1", check_zero_law),
        ("propositionsum-2", check_unitary_radius),
        ("propositionsum-3", check_scaling),
        ("propositionsum-5", check_sandwich),
        ("propositionsum-6", check_sum_bound),
        ("a-unitary", check_a_unitary),
        ("equinew", check_normaloid_pythagorean),
        ("equinew2", check_identity_equivalence),
        ("corollary-geA", check_order_bound),
        ("reduction-identity", check_reduction_identity),
        ("finite01", check_seminorm_grid),
        ("triangle-ceiling", check_triangle_ceiling),
        ("main2-remark", check_radius_witness),
        ("hyponormal-bridge", check_hyponormal_bridge),
        ("mainold", check_convexity),
    ]
}

/// Builds instance `index` deterministically from the battery seed.
pub fn make_case(config: &BatteryConfig, index: usize) -> Result<Case> {
    let span = config.max_dim - config.min_dim + 1;
    let n = config.min_dim + index % span;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index as u64);
    let ctx = random_context(n, &mut rng)?;
    let kind = random_kind(&mut rng);
    let t = operator_of_kind(&ctx, kind, &mut rng);
    let bounded = check_a_bounded(&ctx, &t)?;
    Ok(Case {
        index,
        ctx,
        kind,
        t,
        bounded,
        oracle_samples: config.oracle_samples,
    })
}

/// Runs every check on every instance.
pub fn run_battery(config: &BatteryConfig) -> Result<BatteryReport> {
    let list = checks();
    let mut results: Vec<AnchorResult> = list
        .iter()
        .map(|(anchor, _)| AnchorResult {
            anchor: anchor.to_string(),
            runs: 0,
            failures: 0,
            skipped: 0,
            first_failure: None,
        })
        .collect();
    for index in 0..config.instances {
        let case = make_case(config, index)?;
        for (k, (_, check)) in list.iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5eed_0000_0000);
            rng.set_stream(((index as u64) << 8) | k as u64);
            let result = &mut results[k];
            let outcome = check(&case, &mut rng).unwrap_or_else(|e| Outcome::Fail(format!("error: {e}")));
            match outcome {
                Outcome::Pass => result.runs += 1,
                Outcome::Skip => result.skipped += 1,
                Outcome::Fail(detail) => {
                    result.runs += 1;
                    result.failures += 1;
                    if result.first_failure.is_none() {
                        result.first_failure = Some(format!(
                            "instance {index} (n={}, r={}, {:?}): {detail}",
                            case.ctx.dim(),
                            case.ctx.rank(),
                            case.kind
                        ));
                    }
                }
            }
        }
    }
    let passed = results.iter().all(AnchorResult::passed);
    Ok(BatteryReport {
        seed: config.seed,
        dims: [config.min_dim, config.max_dim],
        instances: config.instances,
        anchors: results,
        passed,
    })
}

fn check_unbounded_infinite(case: &Case, _: &mut ChaCha8Rng) -> Result<Outcome> {
    let values = [
        op_seminorm(&case.ctx, &case.t)?,
        omega_a(&case.ctx, &case.t, TOL)?,
        r_a(&case.ctx, &case.t)?,
        domega_a(&case.ctx, &case.t, TOL, 0)?,
    ];
    let all_infinite = values.iter().all(|v| !v.is_finite());
    let all_finite = values.iter().all(|v| v.is_finite());
    let expected_bounded = case.kind == OperatorKind::RangeLifted || case.ctx.rank() == case.ctx.dim();
    Ok(ensure(
        (case.bounded && all_finite || !case.bounded && all_infinite) && case.bounded == expected_bounded,
        || format!("bounded={} values={values:?}", case.bounded),
    ))
}

fn check_consistency(case: &Case, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    if !case.bounded {
        return Ok(Outcome::Skip);
    }
    let norm = finite(op_seminorm(&case.ctx, &case.t)?);
    for x in case.ctx.sample_unit(200, rng.gen(), 3.0) {
        let lhs = case.ctx.seminorm(&(&case.t * &x))?;
        if lhs > norm * case.ctx.seminorm(&x)? + TOL * (1.0 + norm) {
            return Ok(Outcome::Fail(format!("|Tx|_A = {lhs} exceeds |T|_A = {norm}")));
        }
    }
    Ok(Outcome::Pass)
}

fn check_intertwining(case: &Case, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    if !case.bounded {
        return Ok(Outcome::Skip);
    }
    let m = compress(&case.ctx, &case.t)?.into_matrix();
    let scale = 1.0 + spectral_norm(&m);
    for x in case.ctx.sample_unit(20, rng.gen(), 3.0) {
        let lhs = case.ctx.coords(&(&case.t * &x))?;
        let rhs = &m * case.ctx.coords(&x)?;
        let residual = (lhs - rhs).norm();
        if residual > TOL * scale {
            return Ok(Outcome::Fail(format!("intertwining residual {residual:e}")));
        }
    }
    Ok(Outcome::Pass)
}

fn check_multiplicative(case: &Case, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    if !case.bounded {
        return Ok(Outcome::Skip);
    }
    let s = bounded_operator(&case.ctx, rng);
    let product = compress(&case.ctx, &(&case.t * &s))?.into_matrix();
    let expected = compress(&case.ctx, &case.t)?.into_matrix() * compress(&case.ctx, &s)?.into_matrix();
    Ok(ensure(approx_eq(&product, &expected, TOL), || {
        format!("residual {:e}", max_abs(&(&product - &expected)))
    }))
}

fn check_sharp_adjoint(case: &Case, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    if !check_a_adjointable(&case.ctx, &case.t)? {
        return Ok(Outcome::Skip);
    }
    let s = sharp(&case.ctx, &case.t)?;
    let a = case.ctx.a();
    if !approx_eq(&(a * &s), &(case.t.adjoint() * a), TOL) {
        return Ok(Outcome::Fail("A T# != T* A".into()));
    }
    let xs = case.ctx.sample_unit(10, rng.gen(), 1.0);
    let ys = case.ctx.sample_unit(10, rng.gen(), 1.0);
    let scale = 1.0 + spectral_norm(&case.t) * case.ctx.norm();
    for (x, y) in xs.iter().zip(&ys) {
        let lhs = case.ctx.inner(&(&case.t * x), y)?;
        let rhs = case.ctx.inner(x, &(&s * y))?;
        if (lhs - rhs).norm() > TOL * scale * (1.0 + x.norm() * y.norm()) {
            return Ok(Outcome::Fail(format!("<Tx|y>_A = {lhs}, <x|T#y>_A = {rhs}")));
        }
    }
    Ok(Outcome::Pass)
}

fn check_sharp_involution(case: &Case, _: &mut ChaCha8Rng) -> Result<Outcome> {
    if !check_a_adjointable(&case.ctx, &case.t)? {
        return Ok(Outcome::Skip);
    }
    let twice = sharp(&case.ctx, &sharp(&case.ctx, &case.t)?)?;
    let p = case.ctx.proj_a();
    let expected = p * &case.t * p;
    Ok(ensure(approx_eq(&twice, &expected, TOL), || {
        format!("residual {:e}", max_abs(&(&twice - &expected)))
    }))
}

/// `kernel - oracle` must lie in `[-1e-6, 5e-2]`.
pub fn oracle_gap_ok(kernel: f64, oracle: f64) -> bool {
    let gap = kernel - oracle;
    gap >= -1e-6 && gap <= 5e-2
}

fn check_oracle_agreement(case: &Case, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    if !case.bounded {
        return Ok(Outcome::Skip);
    }
    let kernels = [
        (Functional::OpNorm, finite(op_seminorm(&case.ctx, &case.t)?)),
        (Functional::Omega, finite(omega_a(&case.ctx, &case.t, TOL)?)),
        (Functional::DOmega, finite(domega_a(&case.ctx, &case.t, TOL, rng.gen())?)),
    ];
    for (functional, kernel) in kernels {
        let oracle = oracle_estimate(&case.ctx, &case.t, None, functional, case.oracle_samples, rng.gen())?;
        if !oracle_gap_ok(kernel, oracle.value) {
            return Ok(Outcome::Fail(format!(
                "{functional:?}: kernel {kernel} vs oracle {}",
                oracle.value
            )));
        }
    }
    Ok(Outcome::Pass)
}

fn check_lambda_containment(case: &Case, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    if !case.bounded {
        return Ok(Outcome::Skip);
    }
    let cloud = shell_sample(&case.ctx, &case.t, ShellMode::Compressed, 200, rng.gen(), 1.0)?;
    let violations = crate::shell::shell_summary(&cloud).lambda_violations;
    Ok(ensure(violations == 0, || format!("{violations} violations")))
}

fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))
}

/// Shell point of `alpha T + beta I` at `x` against the transform of the
/// shell point of `T` at `x`, relative residual.
pub fn affine_residual(
    ctx: &PositiveContext,
    t: &ComplexMatrix,
    alpha: Complex64,
    beta: Complex64,
    x: &ComplexVector,
) -> Result<f64> {
    let n = ctx.dim();
    let combined = t * alpha + ComplexMatrix::identity(n, n) * beta;
    let p = shell_point(ctx, t, x)?;
    let q = shell_point(ctx, &combined, x)?;
    let lambda = alpha * p.lambda + beta;
    let mu = alpha.norm_sqr() * p.mu + 2.0 * (alpha * beta.conj() * p.lambda).re + beta.norm_sqr();
    let scale = 1.0 + alpha.norm_sqr() * p.mu + beta.norm_sqr() + alpha.norm() * p.lambda.norm();
    Ok(((q.lambda - lambda).norm() + (q.mu - mu).abs()) / scale)
}

fn check_affine_law(case: &Case, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let alpha = random_complex(rng);
    let beta = random_complex(rng);
    for x in case.ctx.sample_unit(50, rng.gen(), 2.0) {
        let residual = affine_residual(&case.ctx, &case.t, alpha, beta, &x)?;
        if residual > 1e-10 {
            return Ok(Outcome::Fail(format!("relative residual {residual:e}")));
        }
    }
    Ok(Outcome::Pass)
}

/// Support function of `W(M)` in direction `theta`.
fn support(m: &ComplexMatrix, theta: f64) -> Result<f64> {
    let rotated = hermitian_part(&(m * Complex64::from_polar(1.0, -theta)));
    let eig = herm_eig(&rotated)?;
    Ok(eig.eigenvalues[eig.eigenvalues.len() - 1])
}

fn check_adjoint_shell(case: &Case, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    if !check_a_adjointable(&case.ctx, &case.t)? {
        return Ok(Outcome::Skip);
    }
    let s = sharp(&case.ctx, &case.t)?;
    let m = compress(&case.ctx, &case.t)?.into_matrix();
    let tts = compress(&case.ctx, &(&case.t * &s))?.into_matrix();
    let mu_range = herm_eig(&hermitian_part(&tts))?.eigenvalues;
    let (mu_lo, mu_hi) = (mu_range[0], mu_range[mu_range.len() - 1]);
    let margin = 1e-6 * (1.0 + spectral_norm(&m).powi(2));
    let directions: Vec<(f64, f64)> = (0..360)
        .map(|k| {
            let theta = k as f64 * PI / 180.0;
            support(&m, theta).map(|h| (theta, h))
        })
        .collect::<Result<_>>()?;
    let cloud = shell_sample(&case.ctx, &s, ShellMode::Compressed, 200, rng.gen(), 1.0)?;
    for pt in &cloud.points {
        let z = pt.lambda.conj();
        for &(theta, h) in &directions {
            if (z * Complex64::from_polar(1.0, -theta)).re > h + margin {
                return Ok(Outcome::Fail(format!("conj(lambda) = {z} outside W_A(T)")));
            }
        }
        if pt.mu < mu_lo - margin || pt.mu > mu_hi + margin {
            return Ok(Outcome::Fail(format!("mu = {} outside [{mu_lo}, {mu_hi}]", pt.mu)));
        }
    }
    Ok(Outcome::Pass)
}

fn conjugated_by_unitary(case: &Case, rng: &mut ChaCha8Rng) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let u = lifted_unitary(&case.ctx, true, rng)?;
    let conjugated = &u * &case.t * sharp(&case.ctx, &u)?;
    Ok((u, conjugated))
}

fn check_unitary_shell(case: &Case, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    if !case.bounded {
        return Ok(Outcome::Skip);
    }
    let (u, conjugated) = conjugated_by_unitary(case, rng)?;
    let cloud = shell_sample(&case.ctx, &case.t, ShellMode::Compressed, 50, rng.gen(), 1.0)?;
    for pt in &cloud.points {
        let x = pt.witness.as_ref().expect("compressed witnesses");
        let q = shell_point(&case.ctx, &conjugated, &(&u * x))?;
        let residual = (q.lambda - pt.lambda).norm() + (q.mu - pt.mu).abs();
        if residual > 1e-9 * (1.0 + pt.mu) {
            return Ok(Outcome::Fail(format!("pointwise residual {residual:e}")));
        }
    }
    Ok(Outcome::Pass)
}

fn check_unitary_radius(case: &Case, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    if !case.bounded {
        return Ok(Outcome::Skip);
    }
    let (_, conjugated) = conjugated_by_unitary(case, rng)?;
    let d = finite(domega_a(&case.ctx, &case.t, TOL, rng.gen())?);
    let e = finite(domega_a(&case.ctx, &conjugated, TOL, rng.gen())?);
    Ok(ensure((d - e).abs() <= REL * (1.0 + d), || format!("{d} vs {e}")))
}

fn check_zero_law(case: &Case, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let n = case.ctx.dim();
    let null = case.ctx.null_basis();
    if null.ncols() > 0 {
        let killed = null * random_gaussian_matrix(null.ncols(), n, rng);
        if domega_a(&case.ctx, &killed, TOL, rng.gen())? != ExtReal::Finite(0.0) {
            return Ok(Outcome::Fail("A T = 0 but d omega_A != 0".into()));
        }
    }
    if annihilated_by_a(&case.ctx, &case.t)? {
        return Ok(Outcome::Skip);
    }
    let d = domega_a(&case.ctx, &case.t, TOL, rng.gen())?;
    Ok(ensure(!d.is_finite() || finite(d) > 1e-6, || format!("A T != 0 but d omega_A = {d}")))
}

fn check_scaling(case: &Case, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    if !case.bounded {
        return Ok(Outcome::Skip);
    }
    let seed: u64 = rng.gen();
    let d = finite(domega_a(&case.ctx, &case.t, TOL, seed)?);
    let at = |factor: Complex64| -> Result<f64> { Ok(finite(domega_a(&case.ctx, &(&case.t * factor), TOL, seed)?)) };
    let slack = REL * (1.0 + d);
    let doubled = at(c(2.0))?;
    let rotated = at(Complex64::from_polar(1.0, PI / 3.0))?;
    let halved = at(c(0.5))?;
    Ok(ensure(
        doubled >= 2.0 * d - 2.0 * slack && (rotated - d).abs() <= slack && halved <= d / 2.0 + slack,
        || format!("d={d}, d(2T)={doubled}, d(e^(i pi/3) T)={rotated}, d(T/2)={halved}"),
    ))
}

fn check_sandwich(case: &Case, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    if !case.bounded {
        return Ok(Outcome::Skip);
    }
    let w = finite(omega_a(&case.ctx, &case.t, TOL)?);
    let s = finite(op_seminorm(&case.ctx, &case.t)?);
    let d = finite(domega_a(&case.ctx, &case.t, TOL, rng.gen())?);
    let slack = REL * (1.0 + d);
    let upper = (w * w + s.powi(4)).sqrt();
    Ok(ensure(w.max(s * s) <= d + slack && d <= upper + slack, || {
        format!("omega={w}, norm^2={}, d={d}, upper={upper}", s * s)
    }))
}

fn check_sum_bound(case: &Case, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    if !case.bounded {
        return Ok(Outcome::Skip);
    }
    let s = bounded_operator(&case.ctx, rng);
    let seed: u64 = rng.gen();
    let d1 = finite(domega_a(&case.ctx, &case.t, TOL, seed)?);
    let d2 = finite(domega_a(&case.ctx, &s, TOL, seed)?);
    let d = finite(domega_a(&case.ctx, &(&case.t + &s), TOL, seed)?);
    let sum = d1 + d2;
    let bound = (2.0 * sum + 4.0 * sum * sum).sqrt();
    Ok(ensure(d <= bound + REL * (1.0 + bound), || format!("d(T+S)={d} > {bound}")))
}

fn check_a_unitary(case: &Case, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let u = lifted_unitary(&case.ctx, true, rng)?;
    for x in case.ctx.sample_unit(20, rng.gen(), 2.0) {
        let image = case.ctx.seminorm(&(&u * &x))?;
        if (image - 1.0).abs() > TOL {
            return Ok(Outcome::Fail(format!("|Ux|_A = {image}")));
        }
    }
    let report = classify(&case.ctx, &u, TOL, rng.gen())?;
    let norm = finite(report.opnorm_a);
    Ok(ensure(report.a_unitary && (norm - 1.0).abs() <= TOL, || {
        format!("aUnitary={}, |U|_A={norm}", report.a_unitary)
    }))
}

fn check_normaloid_pythagorean(case: &Case, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let normaloid = lifted_normaloid(&case.ctx, NormaloidKind::Normal, true, rng)?;
    let candidates: Vec<&ComplexMatrix> = if case.bounded {
        vec![&normaloid, &case.t]
    } else {
        vec![&normaloid]
    };
    for t in candidates {
        let report = classify(&case.ctx, t, PARALLEL_TOL, rng.gen())?;
        let (w, s, d) = (finite(report.omega_a), finite(report.opnorm_a), finite(report.domega_a));
        let gap = (d - (w * w + s.powi(4)).sqrt()).abs();
        let equality = gap <= 5.0 * PARALLEL_TOL * (1.0 + d);
        if equality != report.a_normaloid {
            return Ok(Outcome::Fail(format!(
                "aNormaloid={} but Pythagorean gap {gap:e}",
                report.a_normaloid
            )));
        }
    }
    Ok(Outcome::Pass)
}

fn check_identity_equivalence(case: &Case, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let hermitian = lifted_normaloid(&case.ctx, NormaloidKind::Hermitian, true, rng)?;
    let report = parallel_to_identity(&case.ctx, &hermitian, PARALLEL_TOL, rng.gen())?;
    if !(report.agreement && report.parallel_to_identity) {
        return Ok(Outcome::Fail(format!("normaloid instance: {report:?}")));
    }
    if case.ctx.rank() >= 2 {
        let jordan = lifted_jordan(&case.ctx)?;
        let report = parallel_to_identity(&case.ctx, &jordan, PARALLEL_TOL, rng.gen())?;
        if !report.agreement || report.parallel_to_identity || report.normaloid_form_gap < 0.05 {
            return Ok(Outcome::Fail(format!("Jordan instance: {report:?}")));
        }
    }
    if case.bounded {
        let report = parallel_to_identity(&case.ctx, &case.t, PARALLEL_TOL, rng.gen())?;
        if !report.agreement {
            return Ok(Outcome::Fail(format!("random instance: {report:?}")));
        }
    }
    Ok(Outcome::Pass)
}

fn check_order_bound(case: &Case, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    if !check_a_adjointable(&case.ctx, &case.t)? {
        return Ok(Outcome::Skip);
    }
    let report = parallel_to_identity(&case.ctx, &case.t, PARALLEL_TOL, rng.gen())?;
    Ok(ensure(report.order_bound == Some(report.parallel_to_identity), || {
        format!(
            "order bound {:?} (margin {:?}) vs parallel {}",
            report.order_bound, report.order_margin, report.parallel_to_identity
        )
    }))
}

fn check_reduction_identity(case: &Case, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    if !case.bounded {
        return Ok(Outcome::Skip);
    }
    let s = bounded_operator(&case.ctx, rng);
    let mt = compress(&case.ctx, &case.t)?.into_matrix();
    let ms = compress(&case.ctx, &s)?.into_matrix();
    let product = ms.adjoint() * &mt;
    let scale = 1.0 + spectral_norm(&product);
    for x in case.ctx.sample_unit(100, rng.gen(), 2.0) {
        let direct = case.ctx.inner(&(&case.t * &x), &(&s * &x))?;
        let v = case.ctx.coords(&x)?;
        let reduced = v.dotc(&(&product * &v));
        if (direct - reduced).norm() > TOL * scale {
            return Ok(Outcome::Fail(format!("{direct} vs {reduced}")));
        }
    }
    Ok(Outcome::Pass)
}

/// Largest `|T + lambda S|_A` over 720 equally spaced unimodular `lambda`,
/// refined by golden-section search around the best grid point; returns the
/// refined maximum, the angle attaining it, and the plain grid maximum.
pub fn combination_grid(ctx: &PositiveContext, t: &ComplexMatrix, s: &ComplexMatrix) -> Result<(f64, f64, f64)> {
    let mt = compress(ctx, t)?.into_matrix();
    let ms = compress(ctx, s)?.into_matrix();
    let f = |phi: f64| spectral_norm(&(&mt + &ms * Complex64::from_polar(1.0, phi)));
    let step = 2.0 * PI / 720.0;
    let (k, grid_max) = (0..720)
        .map(|k| (k, f(k as f64 * step)))
        .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    let (mut lo, mut hi) = ((k as f64 - 1.0) * step, (k as f64 + 1.0) * step);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    while hi - lo > 1e-10 {
        let x1 = hi - inv_phi * (hi - lo);
        let x2 = lo + inv_phi * (hi - lo);
        if f(x1) < f(x2) {
            lo = x1;
        } else {
            hi = x2;
        }
    }
    let phi = 0.5 * (lo + hi);
    let refined = f(phi).max(grid_max);
    Ok((refined, phi, grid_max))
}

/// Cross-validates a seminorm-parallelism certificate against the
/// `lambda`-grid. A true verdict needs the grid to reach
/// `|T|_A + |S|_A - 1e-5` (and `lambda_hat` to attain it); a false one needs
/// the grid maximum to respect `sqrt((|T|_A + |S|_A)^2 - 2 gap)`, which
/// bounds `|T + lambda S|_A` for every `lambda`.
pub fn grid_agrees(ctx: &PositiveContext, t: &ComplexMatrix, s: &ComplexMatrix, seed: u64) -> Result<std::result::Result<(), String>> {
    let cert = seminorm_parallel(ctx, t, s, PARALLEL_TOL, seed)?;
    let nt = finite(op_seminorm(ctx, t)?);
    let ns = finite(op_seminorm(ctx, s)?);
    let sum = nt + ns;
    let (refined, _, _) = combination_grid(ctx, t, s)?;
    let scale = 1.0 + sum;
    if cert.verdict {
        let at_hat = finite(op_seminorm(ctx, &(t + s * cert.lambda_hat))?);
        if refined < sum - 1e-5 * scale || at_hat < sum - 1e-5 * scale {
            return Ok(Err(format!("verdict true but grid max {refined}, at lambda_hat {at_hat}, sum {sum}")));
        }
    } else {
        let ceiling = (sum * sum - 2.0 * cert.gap).max(0.0).sqrt();
        if refined > ceiling + 1e-9 * scale || refined >= sum - 1e-5 * scale {
            return Ok(Err(format!("verdict false but grid max {refined} (ceiling {ceiling}, sum {sum})")));
        }
    }
    Ok(Ok(()))
}

fn check_seminorm_grid(case: &Case, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    if !case.bounded || annihilated_by_a(&case.ctx, &case.t)? {
        return Ok(Outcome::Skip);
    }
    let alpha = random_complex(rng);
    let (p, q) = seminorm_parallel_pair(&case.ctx, rng)?;
    let pairs = [
        (case.t.clone(), bounded_operator(&case.ctx, rng)),
        (case.t.clone(), &case.t * alpha),
        (p, q),
    ];
    for (k, (t, s)) in pairs.iter().enumerate() {
        if let Err(detail) = grid_agrees(&case.ctx, t, s, rng.gen())? {
            return Ok(Outcome::Fail(format!("pair {k}: {detail}")));
        }
    }
    let scalar = seminorm_parallel(&case.ctx, &case.t, &(&case.t * alpha), PARALLEL_TOL, 0)?;
    if !scalar.verdict {
        return Ok(Outcome::Fail("S = alpha T reported not parallel".into()));
    }
    if case.ctx.rank() >= 2 {
        let n = case.ctx.dim();
        let jordan = lifted_jordan(&case.ctx)?;
        let cert = seminorm_parallel(&case.ctx, &jordan, &ComplexMatrix::identity(n, n), PARALLEL_TOL, 0)?;
        if cert.verdict {
            return Ok(Outcome::Fail("Jordan block reported parallel to I".into()));
        }
    }
    Ok(Outcome::Pass)
}

fn check_triangle_ceiling(case: &Case, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    if !case.bounded {
        return Ok(Outcome::Skip);
    }
    let s = bounded_operator(&case.ctx, rng);
    let sum = finite(op_seminorm(&case.ctx, &case.t)?) + finite(op_seminorm(&case.ctx, &s)?);
    for _ in 0..50 {
        let lambda = Complex64::from_polar(1.0, rng.gen_range(0.0..2.0 * PI));
        let value = finite(op_seminorm(&case.ctx, &(&case.t + &s * lambda))?);
        if value > sum + TOL * (1.0 + sum) {
            return Ok(Outcome::Fail(format!("|T + lambda S|_A = {value} > {sum}")));
        }
    }
    Ok(Outcome::Pass)
}

fn check_radius_witness(case: &Case, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    if !case.bounded || annihilated_by_a(&case.ctx, &case.t)? {
        return Ok(Outcome::Skip);
    }
    let (p, q) = hyponormal_pair(&case.ctx, rng)?;
    for (t, s) in [(&case.t, &case.t), (&p, &q)] {
        let cert = radius_parallel(&case.ctx, t, s, PARALLEL_TOL, rng.gen())?;
        if !cert.verdict {
            continue;
        }
        let wt = finite(omega_a(&case.ctx, t, TOL)?);
        let ws = finite(omega_a(&case.ctx, s, TOL)?);
        let (a, b) = cert.witness_radii.expect("nontrivial certificate");
        let slack = 10.0 * PARALLEL_TOL;
        if (a - wt).abs() > slack * (1.0 + wt) || (b - ws).abs() > slack * (1.0 + ws) {
            return Ok(Outcome::Fail(format!("witness radii ({a}, {b}) vs ({wt}, {ws})")));
        }
    }
    Ok(Outcome::Pass)
}

fn check_hyponormal_bridge(case: &Case, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let (t, s) = hyponormal_pair(&case.ctx, rng)?;
    let hypo = classify(&case.ctx, &t, TOL, 0)?.a_hyponormal && classify(&case.ctx, &s, TOL, 0)?.a_hyponormal;
    let radius = radius_parallel(&case.ctx, &t, &s, PARALLEL_TOL, rng.gen())?;
    if !(hypo && radius.verdict) {
        return Ok(Outcome::Fail(format!(
            "constructed pair: hyponormal={hypo}, radius parallel={}",
            radius.verdict
        )));
    }
    let seminorm = seminorm_parallel(&case.ctx, &t, &s, PARALLEL_TOL, rng.gen())?;
    Ok(ensure(seminorm.verdict, || format!("seminorm gap {}", seminorm.gap)))
}

fn check_convexity(case: &Case, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    if !case.bounded || case.ctx.rank() < 3 {
        return Ok(Outcome::Skip);
    }
    let cloud = shell_sample(&case.ctx, &case.t, ShellMode::Compressed, 100, rng.gen(), 1.0)?;
    let summary = shell_summary_with_probe(&case.ctx, &case.t, &cloud, &[], 4)?;
    let report = summary.convexity.expect("probe requested");
    Ok(ensure(report.verdict != Verdict::Fail, || {
        let worst = report.probes.iter().map(|p| p.distance).fold(0.0, f64::max);
        format!("midpoint unreached, distance {worst:e}")
    }))
}
