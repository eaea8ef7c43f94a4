//! Sampling and summarizing the A-Davis-Wielandt shell
//! `DW_A(T) = { (<Tx|x>_A, |Tx|_A^2) : |x|_A = 1 }`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::compression::{compress, op_seminorm};
use crate::context::PositiveContext;
use crate::error::Result;
use crate::extended::ExtReal;
use crate::linalg::{c, random_unit_vector, ComplexMatrix, ComplexVector};

/// Slack allowed in the two inequalities `|lambda|^2 <= mu <= |T|_A^2`.
pub const LAMBDA_TOL: f64 = 1e-9;

/// Probe distances below this count as reaching the target.
pub const REACHED: f64 = 1e-4;
/// Probe distances at or above this count as a genuine miss.
pub const UNREACHED: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShellMode {
    /// Evaluate the definition on A-unit vectors of the ambient space.
    Ambient,
    /// Evaluate `(c* M c, |M c|^2)` on unit vectors of compressed coordinates.
    Compressed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShellPoint {
    pub lambda: Complex64,
    pub mu: f64,
    pub witness: Option<ComplexVector>,
}

#[derive(Debug, Clone)]
pub struct ShellCloud {
    pub points: Vec<ShellPoint>,
    pub mode: ShellMode,
    pub count: usize,
    pub seed: u64,
    pub opnorm: ExtReal,
}

/// `(<Tx|x>_A, |Tx|_A^2)` straight from the definition.
pub fn shell_point(ctx: &PositiveContext, t: &ComplexMatrix, x: &ComplexVector) -> Result<ShellPoint> {
    ctx.check_operator(t)?;
    let tx = t * x;
    let lambda = ctx.inner(&tx, x)?;
    let mu = ctx.seminorm(&tx)?.powi(2);
    Ok(ShellPoint {
        lambda,
        mu,
        witness: Some(x.clone()),
    })
}

/// Draws `count` shell points. Ambient mode uses
/// [`PositiveContext::sample_unit`] with the given `null_scale`; compressed
/// mode requires an A-bounded `T` and ignores `null_scale`.
pub fn shell_sample(
    ctx: &PositiveContext,
    t: &ComplexMatrix,
    mode: ShellMode,
    count: usize,
    seed: u64,
    null_scale: f64,
) -> Result<ShellCloud> {
    ctx.check_operator(t)?;
    let points = match mode {
        ShellMode::Ambient => ctx
            .sample_unit(count, seed, null_scale)
            .iter()
            .map(|x| shell_point(ctx, t, x))
            .collect::<Result<Vec<_>>>()?,
        ShellMode::Compressed => {
            let m = compress(ctx, t)?.into_matrix();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count)
                .map(|_| {
                    let v = random_unit_vector(ctx.rank(), &mut rng);
                    let mv = &m * &v;
                    Ok(ShellPoint {
                        lambda: v.dotc(&mv),
                        mu: mv.norm_squared(),
                        witness: Some(ctx.lift_vector(&v)?),
                    })
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(ShellCloud {
        points,
        mode,
        count,
        seed,
        opnorm: op_seminorm(ctx, t)?,
    })
}

/// A point `(lambda, mu)` of `C x R` that the convexity probe tries to reach.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShellTarget {
    pub lambda: Complex64,
    pub mu: f64,
}

/// Midpoints of `pairs` random pairs of cloud points.
pub fn midpoint_targets(cloud: &ShellCloud, pairs: usize, seed: u64) -> Vec<ShellTarget> {
    if cloud.points.is_empty() {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = cloud.points.len();
    (0..pairs)
        .map(|_| {
            let p = &cloud.points[rng.gen_range(0..len)];
            let q = &cloud.points[rng.gen_range(0..len)];
            ShellTarget {
                lambda: (p.lambda + q.lambda) * c(0.5),
                mu: 0.5 * (p.mu + q.mu),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbeStatus {
    Reached,
    Marginal,
    Unreached,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProbeResult {
    pub target: ShellTarget,
    /// Smallest distance from the target to a shell point found.
    pub distance: f64,
    pub status: ProbeStatus,
    #[serde(skip)]
    pub witness: Option<ComplexVector>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConvexityReport {
    pub verdict: Verdict,
    pub probes: Vec<ProbeResult>,
}

const PROBE_RANDOM_STARTS: usize = 8;
const PROBE_NEAREST_STARTS: usize = 4;
const PROBE_ITERATIONS: usize = 300;

/// Shell point of `x = lift(v / |v|) + Z h`, with `(v, h)` packed as reals.
struct ProbeMap<'a> {
    ctx: &'a PositiveContext,
    t: &'a ComplexMatrix,
    target: ShellTarget,
}

impl ProbeMap<'_> {
    fn vector(&self, p: &DVector<f64>) -> Option<ComplexVector> {
        let r = self.ctx.rank();
        let k = self.ctx.dim() - r;
        let v = DVector::from_fn(r, |i, _| Complex64::new(p[2 * i], p[2 * i + 1]));
        let norm = v.norm();
        if norm < 1e-12 {
            return None;
        }
        let h = DVector::from_fn(k, |i, _| Complex64::new(p[2 * r + 2 * i], p[2 * r + 2 * i + 1]));
        let mut x = self.ctx.lift_vector(&(v / c(norm))).ok()?;
        if k > 0 {
            x += self.ctx.null_basis() * h;
        }
        Some(x)
    }

    fn residual(&self, p: &DVector<f64>) -> Option<DVector<f64>> {
        let x = self.vector(p)?;
        let point = shell_point(self.ctx, self.t, &x).ok()?;
        Some(DVector::from_vec(vec![
            point.lambda.re - self.target.lambda.re,
            point.lambda.im - self.target.lambda.im,
            point.mu - self.target.mu,
        ]))
    }

    fn pack(&self, x: &ComplexVector) -> DVector<f64> {
        let r = self.ctx.rank();
        let k = self.ctx.dim() - r;
        let v = self.ctx.coords(x).expect("length n");
        let h = self.ctx.null_basis().adjoint() * x;
        DVector::from_fn(2 * (r + k), |i, _| {
            let z = if i < 2 * r { v[i / 2] } else { h[(i - 2 * r) / 2] };
            if i % 2 == 0 {
                z.re
            } else {
                z.im
            }
        })
    }
}

/// Levenberg-Marquardt on the three real residuals, with a forward-difference
/// Jacobian. Returns the best distance and parameters.
fn least_distance(map: &ProbeMap<'_>, start: DVector<f64>) -> (f64, DVector<f64>) {
    let Some(mut r) = map.residual(&start) else {
        return (f64::INFINITY, start);
    };
    let mut p = start;
    let mut f = r.norm_squared();
    let mut damping = 1e-3;
    let m = p.len();
    for _ in 0..PROBE_ITERATIONS {
        if f.sqrt() < 1e-12 {
            break;
        }
        let mut jac = DMatrix::<f64>::zeros(3, m);
        for j in 0..m {
            let h = 1e-7 * (1.0 + p[j].abs());
            let mut q = p.clone();
            q[j] += h;
            let Some(rq) = map.residual(&q) else {
                continue;
            };
            jac.set_column(j, &((rq - &r) / h));
        }
        let jt = jac.transpose();
        let grad = &jt * &r;
        let normal = &jt * &jac;
        let mut improved = false;
        while damping < 1e12 {
            let mut lhs = normal.clone();
            for i in 0..m {
                lhs[(i, i)] += damping * (1.0 + normal[(i, i)]);
            }
            let Some(step) = lhs.cholesky().map(|ch| ch.solve(&(-&grad))) else {
                damping *= 10.0;
                continue;
            };
            let q = &p + step;
            if let Some(rq) = map.residual(&q) {
                let fq = rq.norm_squared();
                if fq < f {
                    p = q;
                    r = rq;
                    let decrease = f - fq;
                    f = fq;
                    damping = (damping * 0.3).max(1e-15);
                    improved = decrease > 1e-30;
                    break;
                }
            }
            damping *= 10.0;
        }
        if !improved {
            break;
        }
    }
    (f.sqrt(), p)
}

/// Searches the A-unit sphere for a vector whose shell point is as close as
/// possible to `target`; starts from the cloud witnesses nearest to the target
/// and from seeded random vectors.
pub fn probe_target(
    ctx: &PositiveContext,
    t: &ComplexMatrix,
    target: ShellTarget,
    cloud: &ShellCloud,
    seed: u64,
) -> Result<ProbeResult> {
    ctx.check_operator(t)?;
    let map = ProbeMap { ctx, t, target };
    let distance_to = |pt: &ShellPoint| {
        ((pt.lambda - target.lambda).norm_sqr() + (pt.mu - target.mu).powi(2)).sqrt()
    };

    let mut nearest: Vec<&ShellPoint> = cloud.points.iter().filter(|pt| pt.witness.is_some()).collect();
    nearest.sort_by(|a, b| distance_to(a).total_cmp(&distance_to(b)));
    let mut starts: Vec<ComplexVector> = nearest
        .iter()
        .take(PROBE_NEAREST_STARTS)
        .filter_map(|pt| pt.witness.clone())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for x in ctx.sample_unit(PROBE_RANDOM_STARTS, rng.gen(), 1.0) {
        starts.push(x);
    }

    let mut best = (f64::INFINITY, None);
    for x in starts {
        let (d, p) = least_distance(&map, map.pack(&x));
        if d < best.0 {
            best = (d, map.vector(&p));
        }
    }
    let (distance, witness) = best;
    let status = if distance < REACHED {
        ProbeStatus::Reached
    } else if distance >= UNREACHED {
        ProbeStatus::Unreached
    } else {
        ProbeStatus::Marginal
    };
    Ok(ProbeResult {
        target,
        distance,
        status,
        witness,
    })
}

/// Probes every target. Pass when all are reached, fail when any is
/// unreached, inconclusive otherwise.
pub fn convexity_probe(
    ctx: &PositiveContext,
    t: &ComplexMatrix,
    cloud: &ShellCloud,
    targets: &[ShellTarget],
    seed: u64,
) -> Result<ConvexityReport> {
    let probes = targets
        .iter()
        .enumerate()
        .map(|(i, &target)| probe_target(ctx, t, target, cloud, seed.wrapping_add(i as u64)))
        .collect::<Result<Vec<_>>>()?;
    let verdict = if probes.iter().any(|p| p.status == ProbeStatus::Unreached) {
        Verdict::Fail
    } else if probes.iter().all(|p| p.status == ProbeStatus::Reached) {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    };
    Ok(ConvexityReport { verdict, probes })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ShellSummary {
    pub mode: ShellMode,
    pub count: usize,
    pub seed: u64,
    pub max_abs_lambda: f64,
    pub max_mu: f64,
    pub min_mu: f64,
    pub opnorm_a: ExtReal,
    /// Points with `|lambda|^2 > mu + tol` or `mu > |T|_A^2 + tol`.
    pub lambda_violations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convexity: Option<ConvexityReport>,
}

/// Maxima and the count of points outside
/// `{ (lambda, mu) : |lambda|^2 <= mu <= |T|_A^2 }`.
pub fn shell_summary(cloud: &ShellCloud) -> ShellSummary {
    let bound = cloud.opnorm.map(|s| s * s);
    let lambda_violations = cloud
        .points
        .iter()
        .filter(|pt| {
            let above = match bound {
                ExtReal::Finite(b) => pt.mu > b + LAMBDA_TOL,
                ExtReal::Infinite => false,
            };
            pt.lambda.norm_sqr() > pt.mu + LAMBDA_TOL || above
        })
        .count();
    let fold = |init: f64, f: fn(f64, f64) -> f64, g: fn(&ShellPoint) -> f64| {
        cloud.points.iter().map(g).fold(init, f)
    };
    ShellSummary {
        mode: cloud.mode,
        count: cloud.count,
        seed: cloud.seed,
        max_abs_lambda: fold(0.0, f64::max, |pt| pt.lambda.norm()),
        max_mu: fold(0.0, f64::max, |pt| pt.mu),
        min_mu: if cloud.points.is_empty() { 0.0 } else { fold(f64::INFINITY, f64::min, |pt| pt.mu) },
        opnorm_a: cloud.opnorm,
        lambda_violations,
        convexity: None,
    }
}

/// Summary plus a convexity probe over `targets`, or over midpoints of
/// random point pairs when `targets` is empty.
pub fn shell_summary_with_probe(
    ctx: &PositiveContext,
    t: &ComplexMatrix,
    cloud: &ShellCloud,
    targets: &[ShellTarget],
    pairs: usize,
) -> Result<ShellSummary> {
    let mut summary = shell_summary(cloud);
    let chosen = if targets.is_empty() {
        midpoint_targets(cloud, pairs, cloud.seed ^ 0x9e37_79b9)
    } else {
        targets.to_vec()
    };
    summary.convexity = Some(convexity_probe(ctx, t, cloud, &chosen, cloud.seed)?);
    Ok(summary)
}
