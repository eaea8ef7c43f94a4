//! Random test instances: weights, operators of prescribed type, and pairs.
//!
//! Operators with a prescribed compression `M` are built by lifting,
//! `T = V diag(sigma)^{-1/2} M diag(sigma)^{1/2} V*`, whose compression is
//! exactly `M`.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::context::PositiveContext;
use crate::error::Result;
use crate::linalg::{c, hermitian_part, random_gaussian_matrix, random_unitary, ComplexMatrix};

/// Largest rank used for generated weights.
pub const MAX_RANK: usize = 4;

/// `G G*` with `G` an `n x (n - nullity)` complex Gaussian matrix.
pub fn random_weight<R: Rng + ?Sized>(n: usize, nullity: usize, rng: &mut R) -> ComplexMatrix {
    let g = random_gaussian_matrix(n, n - nullity.min(n - 1), rng);
    let a = &g * g.adjoint();
    hermitian_part(&a)
}

/// Random weight of dimension `n` with rank in `1..=min(n, MAX_RANK)`.
pub fn random_context<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<PositiveContext> {
    let rank = rng.gen_range(1..=n.min(MAX_RANK));
    PositiveContext::new(&random_weight(n, n - rank, rng))
}

/// Random weight with the given rank, `1 <= rank <= n`.
pub fn context_with_rank<R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> Result<PositiveContext> {
    PositiveContext::new(&random_weight(n, n - rank, rng))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorKind {
    /// Complex Gaussian, no constraint.
    Unrestricted,
    /// Maps `N(A)` into itself.
    RangeLifted,
    /// Maps part of `N(A)` outside of it (requires a singular weight).
    NullViolating,
}

/// `G - P_A G (I - P_A)`: the part of a Gaussian `G` that keeps `N(A)`
/// inside `N(A)`.
pub fn bounded_operator<R: Rng + ?Sized>(ctx: &PositiveContext, rng: &mut R) -> ComplexMatrix {
    let n = ctx.dim();
    let g = random_gaussian_matrix(n, n, rng);
    let p = ctx.proj_a();
    let q = ComplexMatrix::identity(n, n) - p;
    &g - p * &g * q
}

/// An A-bounded operator plus a term `P_A H (I - P_A)` with `H` Gaussian,
/// so that `A T Z != 0`. Falls back to a bounded operator when `A` is
/// invertible.
pub fn null_violating_operator<R: Rng + ?Sized>(ctx: &PositiveContext, rng: &mut R) -> ComplexMatrix {
    let n = ctx.dim();
    let base = bounded_operator(ctx, rng);
    if ctx.null_basis().ncols() == 0 {
        return base;
    }
    let h = random_gaussian_matrix(n, n, rng);
    let p = ctx.proj_a();
    let q = ComplexMatrix::identity(n, n) - p;
    base + p * h * q
}

/// Draws an operator of the given kind.
pub fn operator_of_kind<R: Rng + ?Sized>(ctx: &PositiveContext, kind: OperatorKind, rng: &mut R) -> ComplexMatrix {
    match kind {
        OperatorKind::Unrestricted => random_gaussian_matrix(ctx.dim(), ctx.dim(), rng),
        OperatorKind::RangeLifted => bounded_operator(ctx, rng),
        OperatorKind::NullViolating => null_violating_operator(ctx, rng),
    }
}

/// 40% unrestricted, 40% range-lifted, 20% null-violating.
pub fn random_kind<R: Rng + ?Sized>(rng: &mut R) -> OperatorKind {
    match rng.gen_range(0..10) {
        0..=3 => OperatorKind::Unrestricted,
        4..=7 => OperatorKind::RangeLifted,
        _ => OperatorKind::NullViolating,
    }
}

/// `(I - P_A) G`, with values in `N(A)`. Adding it to an A-bounded operator
/// keeps it A-bounded and leaves its compression unchanged.
fn null_valued<R: Rng + ?Sized>(ctx: &PositiveContext, rng: &mut R) -> ComplexMatrix {
    let n = ctx.dim();
    let q = ComplexMatrix::identity(n, n) - ctx.proj_a();
    q * random_gaussian_matrix(n, n, rng)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormaloidKind {
    Hermitian,
    Normal,
}

/// Lift of a Hermitian or normal `r x r` matrix, optionally plus an operator
/// with values in `N(A)` (which does not change the compression).
pub fn lifted_normaloid<R: Rng + ?Sized>(
    ctx: &PositiveContext,
    kind: NormaloidKind,
    with_null_part: bool,
    rng: &mut R,
) -> Result<ComplexMatrix> {
    let r = ctx.rank();
    let m = match kind {
        NormaloidKind::Hermitian => hermitian_part(&random_gaussian_matrix(r, r, rng)),
        NormaloidKind::Normal => {
            let q = random_unitary(r, rng);
            let d = ComplexMatrix::from_fn(r, r, |i, j| {
                if i == j {
                    Complex64::new(rng.sample(rand_distr::StandardNormal), rng.sample(rand_distr::StandardNormal))
                } else {
                    c(0.0)
                }
            });
            &q * d * q.adjoint()
        }
    };
    let mut t = ctx.lift_operator(&m)?;
    if with_null_part {
        t += null_valued(ctx, rng);
    }
    Ok(t)
}

/// A-unitary `U` whose compression is a Haar unitary, optionally plus an
/// operator with values in `N(A)`.
pub fn lifted_unitary<R: Rng + ?Sized>(ctx: &PositiveContext, with_null_part: bool, rng: &mut R) -> Result<ComplexMatrix> {
    let q = random_unitary(ctx.rank(), rng);
    let mut u = ctx.lift_operator(&q)?;
    if with_null_part {
        u += null_valued(ctx, rng);
    }
    Ok(u)
}

/// Lift of the `2 x 2` Jordan block on the top two range directions
/// (requires rank at least 2).
pub fn lifted_jordan(ctx: &PositiveContext) -> Result<ComplexMatrix> {
    let r = ctx.rank();
    let mut m = ComplexMatrix::zeros(r, r);
    if r >= 2 {
        m[(0, 1)] = c(1.0);
    }
    ctx.lift_operator(&m)
}

/// Pair of A-bounded operators whose compressions share the top singular
/// pair, hence are A-seminorm-parallel: `M_T = W diag(s) X*`,
/// `M_S = beta W diag(s') X*` with `s_1, s'_1` the largest entries.
pub fn seminorm_parallel_pair<R: Rng + ?Sized>(
    ctx: &PositiveContext,
    rng: &mut R,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let r = ctx.rank();
    let w = random_unitary(r, rng);
    let x = random_unitary(r, rng);
    let singular = |rng: &mut R| {
        let top = 1.0 + rng.gen::<f64>();
        let mut v: Vec<f64> = (0..r).map(|_| rng.gen::<f64>() * top * 0.9).collect();
        v[0] = top;
        ComplexMatrix::from_fn(r, r, |i, j| if i == j { c(v[i]) } else { c(0.0) })
    };
    let mt = &w * singular(rng) * x.adjoint();
    let beta = Complex64::from_polar(0.5 + rng.gen::<f64>(), rng.gen::<f64>() * std::f64::consts::TAU);
    let ms = &w * singular(rng) * x.adjoint() * beta;
    Ok((ctx.lift_operator(&mt)?, ctx.lift_operator(&ms)?))
}

/// Pair of A-normal (hence A-hyponormal) operators with compressions
/// `Q diag(d) Q*`, `Q diag(d') Q*` whose largest-modulus eigenvalues share
/// an eigenvector. Such a pair is A-numerical-radius-parallel.
pub fn hyponormal_pair<R: Rng + ?Sized>(ctx: &PositiveContext, rng: &mut R) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let r = ctx.rank();
    let q = random_unitary(r, rng);
    let k = rng.gen_range(0..r);
    let spectrum = |rng: &mut R| {
        let top = 1.0 + rng.gen::<f64>();
        ComplexMatrix::from_fn(r, r, |i, j| {
            if i != j {
                return c(0.0);
            }
            let modulus = if i == k { top } else { rng.gen::<f64>() * top * 0.9 };
            Complex64::from_polar(modulus, rng.gen::<f64>() * std::f64::consts::TAU)
        })
    };
    let mt = &q * spectrum(rng) * q.adjoint();
    let ms = &q * spectrum(rng) * q.adjoint();
    Ok((ctx.lift_operator(&mt)?, ctx.lift_operator(&ms)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compression::{check_a_bounded, compress};
    use crate::invariants::classify;
    use crate::linalg::{approx_eq, max_abs};
    use crate::parallelism::{radius_parallel, seminorm_parallel, PARALLEL_TOL};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn kinds_have_the_advertised_boundedness() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 2..=6 {
            let ctx = context_with_rank(n, 1, &mut rng).unwrap();
            assert!(check_a_bounded(&ctx, &bounded_operator(&ctx, &mut rng)).unwrap());
            assert!(!check_a_bounded(&ctx, &null_violating_operator(&ctx, &mut rng)).unwrap());
            assert!(!check_a_bounded(&ctx, &random_gaussian_matrix(n, n, &mut rng)).unwrap());
        }
    }

    #[test]
    fn random_context_respects_rank_cap() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 2..=6 {
            for _ in 0..10 {
                let ctx = random_context(n, &mut rng).unwrap();
                assert!(ctx.rank() >= 1 && ctx.rank() <= MAX_RANK.min(n));
            }
        }
    }

    #[test]
    fn kind_mix_is_roughly_forty_forty_twenty() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut counts = [0usize; 3];
        for _ in 0..10_000 {
            counts[random_kind(&mut rng) as usize] += 1;
        }
        assert!((3700..4300).contains(&counts[0]));
        assert!((3700..4300).contains(&counts[1]));
        assert!((1700..2300).contains(&counts[2]));
    }

    #[test]
    fn lifted_operators_have_prescribed_compressions() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ctx = context_with_rank(5, 3, &mut rng).unwrap();
        for kind in [NormaloidKind::Hermitian, NormaloidKind::Normal] {
            let t = lifted_normaloid(&ctx, kind, true, &mut rng).unwrap();
            let m = compress(&ctx, &t).unwrap().into_matrix();
            let commutator = m.adjoint() * &m - &m * m.adjoint();
            assert!(max_abs(&commutator) <= 1e-9 * (1.0 + max_abs(&m)).powi(2));
            assert!(classify(&ctx, &t, 1e-9, 0).unwrap().a_normaloid);
        }
        let u = lifted_unitary(&ctx, true, &mut rng).unwrap();
        let q = compress(&ctx, &u).unwrap().into_matrix();
        assert!(approx_eq(&(q.adjoint() * &q), &ComplexMatrix::identity(3, 3), 1e-9));
        assert!(classify(&ctx, &u, 1e-9, 0).unwrap().a_unitary);
    }

    #[test]
    fn constructed_pairs_are_parallel() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 2..=5 {
            let ctx = random_context(n, &mut rng).unwrap();
            let (t, s) = seminorm_parallel_pair(&ctx, &mut rng).unwrap();
            assert!(seminorm_parallel(&ctx, &t, &s, PARALLEL_TOL, 0).unwrap().verdict);
            let (t, s) = hyponormal_pair(&ctx, &mut rng).unwrap();
            assert!(classify(&ctx, &t, 1e-9, 0).unwrap().a_hyponormal);
            assert!(radius_parallel(&ctx, &t, &s, PARALLEL_TOL, 0).unwrap().verdict);
        }
    }
}
