//! A-seminorm parallelism and A-numerical-radius parallelism.
//!
//! `T` is A-seminorm-parallel to `S` when `|T + lambda S|_A = |T|_A + |S|_A`
//! for some unimodular `lambda`, and A-numerical-radius-parallel when
//! `omega_A(T + lambda S) = omega_A(T) + omega_A(S)`. In finite dimension
//! both reduce to a single optimization over A-unit vectors: the first to
//! `sup |<Tx|Sx>_A| = |T|_A |S|_A`, the second to
//! `sup |<Tx|x>_A| |<Sx|x>_A| = omega_A(T) omega_A(S)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ascent::{maximize_on_sphere, AscentConfig, SphereObjective};
use crate::compression::{annihilated_by_a, compress};
use crate::context::PositiveContext;
use crate::error::Result;
use crate::extended::ExtReal;
use crate::invariants::{a_order_margin, classify, domega_a};
use crate::linalg::{c, numerical_radius_witness, spectral_norm, ComplexMatrix, ComplexVector};

/// Default relative tolerance for parallelism verdicts.
pub const PARALLEL_TOL: f64 = 1e-7;

/// Two local maxima further apart than this mark the landscape multimodal.
pub const MULTIMODAL_GAP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Seminorm,
    Radius,
}

/// Three-way outcome: gaps within ten times the tolerance of the threshold
/// are not forced to a boolean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Holds,
    Fails,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ParallelCertificate {
    pub relation: Relation,
    /// `gap <= tol (1 + target)`.
    pub verdict: bool,
    pub status: Status,
    pub lambda_hat: Complex64,
    /// A-unit vector attaining `achieved`; absent in the trivial zero case.
    pub witness: Option<Vec<Complex64>>,
    pub achieved: f64,
    pub target: f64,
    pub gap: f64,
    pub tol: f64,
    pub seed: u64,
    /// Radius relation only: the ascent found distinct local maxima.
    pub multimodal: bool,
    /// Radius relation only: `(|<Tx|x>_A|, |<Sx|x>_A|)` at the witness.
    pub witness_radii: Option<(f64, f64)>,
}

fn status_of(gap: f64, target: f64, tol: f64) -> (bool, Status) {
    let threshold = tol * (1.0 + target);
    let verdict = gap <= threshold;
    let status = if verdict {
        Status::Holds
    } else if gap > 10.0 * threshold {
        Status::Fails
    } else {
        Status::Inconclusive
    };
    (verdict, status)
}

fn phase(z: Complex64) -> Complex64 {
    if z.norm() > 0.0 {
        z / c(z.norm())
    } else {
        c(1.0)
    }
}

fn trivial(relation: Relation, tol: f64, seed: u64) -> ParallelCertificate {
    ParallelCertificate {
        relation,
        verdict: true,
        status: Status::Holds,
        lambda_hat: c(1.0),
        witness: None,
        achieved: 0.0,
        target: 0.0,
        gap: 0.0,
        tol,
        seed,
        multimodal: false,
        witness_radii: None,
    }
}

/// Decides `T ||_A S` through `sup |<Tx|Sx>_A|`, computed as the numerical
/// radius of `M_S* M_T` in compressed coordinates.
///
/// `lambda_hat = z / |z|` with `z = <Tx|Sx>_A` at the witness; this choice
/// makes `|Tx + lambda_hat Sx|_A = |Tx|_A + |Sx|_A` under the convention that
/// the second slot is conjugated. The computation is deterministic; `seed` is
/// only recorded.
pub fn seminorm_parallel(
    ctx: &PositiveContext,
    t: &ComplexMatrix,
    s: &ComplexMatrix,
    tol: f64,
    seed: u64,
) -> Result<ParallelCertificate> {
    let mt = compress(ctx, t)?.into_matrix();
    let ms = compress(ctx, s)?.into_matrix();
    if annihilated_by_a(ctx, t)? || annihilated_by_a(ctx, s)? {
        return Ok(trivial(Relation::Seminorm, tol, seed));
    }
    let product = ms.adjoint() * &mt;
    let radius = numerical_radius_witness(&product, tol.min(1e-12))?;
    let v = radius.witness;
    let z = v.dotc(&(&product * &v));
    let target = spectral_norm(&mt) * spectral_norm(&ms);
    let achieved = radius.value.max(z.norm());
    let gap = target - achieved;
    let (verdict, status) = status_of(gap, target, tol);
    Ok(ParallelCertificate {
        relation: Relation::Seminorm,
        verdict,
        status,
        lambda_hat: phase(z),
        witness: Some(ctx.lift_vector(&v)?.iter().copied().collect()),
        achieved,
        target,
        gap,
        tol,
        seed,
        multimodal: false,
        witness_radii: None,
    })
}

/// `|c* M_T c|^2 |c* M_S c|^2` on the unit sphere.
struct ProductObjective<'a> {
    mt: &'a ComplexMatrix,
    ms: &'a ComplexMatrix,
    mt_adj: ComplexMatrix,
    ms_adj: ComplexMatrix,
}

impl SphereObjective for ProductObjective<'_> {
    fn value(&self, v: &ComplexVector) -> f64 {
        v.dotc(&(self.mt * v)).norm_sqr() * v.dotc(&(self.ms * v)).norm_sqr()
    }

    fn gradient(&self, v: &ComplexVector) -> ComplexVector {
        let (tv, sv) = (self.mt * v, self.ms * v);
        let (a, b) = (v.dotc(&tv), v.dotc(&sv));
        let grad_a = tv * a.conj() + &self.mt_adj * v * a;
        let grad_b = sv * b.conj() + &self.ms_adj * v * b;
        (grad_a * c(b.norm_sqr()) + grad_b * c(a.norm_sqr())) * c(2.0)
    }
}

/// Decides `T ||_{omega_A} S` through `sup |<Tx|x>_A| |<Sx|x>_A|` by seeded
/// multi-start ascent, started also from the numerical-radius witnesses of
/// both compressions.
///
/// `lambda_hat = a conj(b) / |a b|` with `a = <Tx|x>_A`, `b = <Sx|x>_A`.
pub fn radius_parallel(
    ctx: &PositiveContext,
    t: &ComplexMatrix,
    s: &ComplexMatrix,
    tol: f64,
    seed: u64,
) -> Result<ParallelCertificate> {
    let mt = compress(ctx, t)?.into_matrix();
    let ms = compress(ctx, s)?.into_matrix();
    if annihilated_by_a(ctx, t)? || annihilated_by_a(ctx, s)? {
        return Ok(trivial(Relation::Radius, tol, seed));
    }
    let wt = numerical_radius_witness(&mt, tol.min(1e-12))?;
    let ws = numerical_radius_witness(&ms, tol.min(1e-12))?;
    let objective = ProductObjective {
        mt: &mt,
        ms: &ms,
        mt_adj: mt.adjoint(),
        ms_adj: ms.adjoint(),
    };
    let best = maximize_on_sphere(
        &objective,
        ctx.rank(),
        &[wt.witness, ws.witness],
        seed,
        &AscentConfig::default(),
    );

    let v = best.point;
    let a = v.dotc(&(&mt * &v));
    let b = v.dotc(&(&ms * &v));
    let target = wt.value * ws.value;
    let achieved = a.norm() * b.norm();
    let gap = target - achieved;
    let (verdict, status) = status_of(gap, target, tol);

    let mut values: Vec<f64> = best.local_maxima.iter().map(|f| f.max(0.0).sqrt()).collect();
    values.sort_by(|x, y| y.total_cmp(x));
    let multimodal = values.iter().any(|&f| values[0] - f > MULTIMODAL_GAP * (1.0 + values[0]));

    Ok(ParallelCertificate {
        relation: Relation::Radius,
        verdict,
        status,
        lambda_hat: phase(a * b.conj()),
        witness: Some(ctx.lift_vector(&v)?.iter().copied().collect()),
        achieved,
        target,
        gap,
        tol,
        seed,
        multimodal,
        witness_radii: Some((a.norm(), b.norm())),
    })
}

/// The four conditions equivalent to `T ||_A I`, each evaluated on its own.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IdentityParallelReport {
    /// `T ||_A I`.
    pub parallel_to_identity: bool,
    /// `d omega_A = sqrt(omega_A^2 + |T|_A^4)`.
    pub dw_radius_pythagorean: bool,
    /// `omega_A = |T|_A`.
    pub normaloid: bool,
    /// `d omega_A = |T|_A sqrt(1 + |T|_A^2)`.
    pub dw_radius_normaloid_form: bool,
    /// All four conditions agree.
    pub agreement: bool,
    /// `omega_A^2 I >=_A T# T`, evaluated when `T` is A-adjointable.
    pub order_bound: Option<bool>,
    /// `inf { omega_A^2 - |Tx|_A^2 : |x|_A = 1 }`.
    pub order_margin: Option<f64>,
    pub omega_a: f64,
    pub opnorm_a: f64,
    pub domega_a: f64,
    pub pythagorean_gap: f64,
    pub normaloid_form_gap: f64,
    pub certificate: ParallelCertificate,
}

/// Evaluates the four equivalent conditions for `T ||_A I` separately, each
/// with relative tolerance `tol`, plus the order bound `omega_A^2 I >=_A T# T`.
pub fn parallel_to_identity(
    ctx: &PositiveContext,
    t: &ComplexMatrix,
    tol: f64,
    seed: u64,
) -> Result<IdentityParallelReport> {
    let n = ctx.dim();
    let id = ComplexMatrix::identity(n, n);
    let certificate = seminorm_parallel(ctx, t, &id, tol, seed)?;
    let report = classify(ctx, t, tol, seed)?;
    let finite = |v: ExtReal| v.finite().unwrap_or(f64::INFINITY);
    let omega = finite(report.omega_a);
    let norm = finite(report.opnorm_a);
    let dw = finite(domega_a(ctx, t, tol, seed)?);

    let pythagorean_gap = (dw - (omega * omega + norm.powi(4)).sqrt()).abs();
    let normaloid_form_gap = (dw - norm * (1.0 + norm * norm).sqrt()).abs();
    let dw_tol = tol * (1.0 + dw);
    let conditions = [
        certificate.verdict,
        pythagorean_gap <= dw_tol,
        report.a_normaloid,
        normaloid_form_gap <= dw_tol,
    ];
    let agreement = conditions.iter().all(|&b| b == conditions[0]);

    let (order_bound, order_margin) = if report.a_adjointable {
        let s = crate::compression::sharp(ctx, t)?;
        let margin = a_order_margin(ctx, &(&id * c(omega * omega) - s * t))?;
        (Some(margin >= -tol * (1.0 + norm).powi(2)), Some(margin))
    } else {
        (None, None)
    };

    Ok(IdentityParallelReport {
        parallel_to_identity: conditions[0],
        dw_radius_pythagorean: conditions[1],
        normaloid: conditions[2],
        dw_radius_normaloid_form: conditions[3],
        agreement,
        order_bound,
        order_margin,
        omega_a: omega,
        opnorm_a: norm,
        domega_a: dw,
        pythagorean_gap,
        normaloid_form_gap,
        certificate,
    })
}

/// `|T + lambda S|_A`.
pub fn combination_seminorm(
    ctx: &PositiveContext,
    t: &ComplexMatrix,
    s: &ComplexMatrix,
    lambda: Complex64,
) -> Result<ExtReal> {
    crate::compression::op_seminorm(ctx, &(t + s * lambda))
}
