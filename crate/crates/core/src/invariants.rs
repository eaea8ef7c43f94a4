//! Scalar A-invariants (`omega_A`, `r_A`, `d omega_A`) and operator classes.
//!
//! Each scalar is the classical quantity of the compressed matrix and is
//! `+inf` when `T` is not A-bounded.

use serde::{Deserialize, Serialize};

use crate::compression::{a_adjointability, a_boundedness, annihilated_by_a, compress, CompressedOperator};
use crate::context::PositiveContext;
use crate::error::{Error, Result};
use crate::extended::ExtReal;
use crate::linalg::{
    dw_radius, herm_eig, hermitian_part, max_abs, numerical_radius, spectral_norm, spectral_radius,
    ComplexMatrix,
};

fn compressed_or_inf(ctx: &PositiveContext, t: &ComplexMatrix) -> Result<Option<CompressedOperator>> {
    match compress(ctx, t) {
        Ok(m) => Ok(Some(m)),
        Err(Error::NotABounded) => Ok(None),
        Err(e) => Err(e),
    }
}

/// A-numerical radius `sup { |<Tx|x>_A| : |x|_A = 1 }`.
pub fn omega_a(ctx: &PositiveContext, t: &ComplexMatrix, tol: f64) -> Result<ExtReal> {
    match compressed_or_inf(ctx, t)? {
        Some(m) => Ok(ExtReal::Finite(numerical_radius(m.matrix(), tol)?)),
        None => Ok(ExtReal::Infinite),
    }
}

/// A-spectral radius `lim |T^k|_A^{1/k}`, i.e. the spectral radius of the
/// compression.
pub fn r_a(ctx: &PositiveContext, t: &ComplexMatrix) -> Result<ExtReal> {
    match compressed_or_inf(ctx, t)? {
        Some(m) => Ok(ExtReal::Finite(spectral_radius(m.matrix())?)),
        None => Ok(ExtReal::Infinite),
    }
}

/// A-Davis-Wielandt radius `sup { sqrt(|<Tx|x>_A|^2 + |Tx|_A^4) : |x|_A = 1 }`.
///
/// Exactly `0` when `A T` vanishes to within the inclusion tolerance.
pub fn domega_a(ctx: &PositiveContext, t: &ComplexMatrix, tol: f64, seed: u64) -> Result<ExtReal> {
    if annihilated_by_a(ctx, t)? {
        return Ok(ExtReal::Finite(0.0));
    }
    match compressed_or_inf(ctx, t)? {
        Some(m) => Ok(ExtReal::Finite(dw_radius(m.matrix(), tol, seed)?)),
        None => Ok(ExtReal::Infinite),
    }
}

/// `inf { Re <Xx|x>_A : |x|_A = 1 }`, so that `X >=_A 0` iff this is `>= 0`.
///
/// The form `x -> <A X x, x>` vanishes on `N(A)`; when `X` is A-bounded it
/// also has no cross terms between `N(A)` and its complement and the infimum
/// is the smallest eigenvalue of the Hermitian part of the compression.
/// Otherwise the infimum is `-inf`, since the null component of `x` is free.
pub fn a_order_margin(ctx: &PositiveContext, x: &ComplexMatrix) -> Result<f64> {
    match compressed_or_inf(ctx, x)? {
        Some(m) => Ok(herm_eig(&hermitian_part(m.matrix()))?.eigenvalues[0]),
        None => Ok(f64::NEG_INFINITY),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassReport {
    pub a_bounded: bool,
    pub a_adjointable: bool,
    pub a_self_adjoint: bool,
    pub a_normal: bool,
    pub a_hyponormal: bool,
    pub a_unitary: bool,
    pub a_normaloid: bool,
    /// Some inclusion residual lies within a factor of ten of its threshold.
    pub marginal: bool,
    pub omega_a: ExtReal,
    pub opnorm_a: ExtReal,
    pub r_a: ExtReal,
    pub domega_a: ExtReal,
}

/// Evaluates every class predicate and the four scalar invariants.
///
/// The operator identities (`T# T = T T#`, `T# T = T T# = P_A`) are read in
/// the A-sense, i.e. after multiplying by `A` on the left. For A-bounded `T`
/// with compression `M` (and `T#` compressing to `M*`) they become
/// `M* M = M M*` and `M* M = M M* = I`, which is how they are evaluated, with
/// tolerance `tol (1 + |M|^2)`. `>=_A` is measured by [`a_order_margin`].
/// A-normaloid is decided by `omega_A = |T|_A`, which is well conditioned,
/// rather than by `r_A = |T|_A`.
pub fn classify(ctx: &PositiveContext, t: &ComplexMatrix, tol: f64, seed: u64) -> Result<ClassReport> {
    let bounded = a_boundedness(ctx, t)?;
    let adjointable = a_adjointability(ctx, t)?;
    let a = ctx.a();
    let a_self_adjoint =
        max_abs(&(a * t - t.adjoint() * a)) <= tol * (1.0 + ctx.norm() * spectral_norm(t));

    let (mut a_normal, mut a_hyponormal, mut a_unitary) = (false, false, false);
    let mut a_normaloid = false;
    let (mut omega, mut opnorm) = (ExtReal::Infinite, ExtReal::Infinite);
    if let Some(m) = compressed_or_inf(ctx, t)? {
        let m = m.into_matrix();
        let s = spectral_norm(&m);
        let w = numerical_radius(&m, tol)?;
        let scale = tol * (1.0 + s * s);
        let gram = m.adjoint() * &m;
        let cogram = &m * m.adjoint();
        let commutator = &gram - &cogram;
        let id = ComplexMatrix::identity(m.nrows(), m.ncols());
        if adjointable.holds {
            a_normal = max_abs(&commutator) <= scale;
            a_hyponormal = herm_eig(&hermitian_part(&commutator))?.eigenvalues[0] >= -scale;
            a_unitary = max_abs(&(&gram - &id)) <= scale && max_abs(&(&cogram - &id)) <= scale;
        }
        a_normaloid = (w - s).abs() <= tol * (1.0 + s);
        omega = ExtReal::Finite(w);
        opnorm = ExtReal::Finite(s);
    }

    Ok(ClassReport {
        a_bounded: bounded.holds,
        a_adjointable: adjointable.holds,
        a_self_adjoint,
        a_normal,
        a_hyponormal,
        a_unitary,
        a_normaloid,
        marginal: bounded.is_marginal() || adjointable.is_marginal(),
        omega_a: omega,
        opnorm_a: opnorm,
        r_a: r_a(ctx, t)?,
        domega_a: domega_a(ctx, t, tol, seed)?,
    })
}
