//! A-boundedness, A-adjoints, and the compressed operator.
//!
//! An operator `T` that maps `N(A)` into itself induces a unique operator on
//! the Hilbert space `R(A^{1/2})`. In the orthonormal basis
//! `b_i = A^{1/2} v_i = sqrt(sigma_i) v_i` that operator is the `r x r` matrix
//!
//! ```text
//! M = diag(sigma)^{1/2} (V* T V) diag(sigma)^{-1/2}
//! ```
//!
//! and every A-quantity of `T` (seminorm, numerical radius, Davis-Wielandt
//! radius, spectral radius) is the classical quantity of `M`.

use crate::context::PositiveContext;
use crate::error::{Error, Result};
use crate::extended::ExtReal;
use crate::linalg::{c, max_abs, spectral_norm, ComplexMatrix};

/// Relative residual below which a range/kernel inclusion is accepted.
pub const INCLUSION_TOL: f64 = 1e-10;

/// Outcome of a residual-vs-threshold inclusion test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InclusionCheck {
    pub holds: bool,
    pub residual: f64,
    pub threshold: f64,
}

impl InclusionCheck {
    fn new(residual: f64, threshold: f64) -> Self {
        InclusionCheck {
            holds: residual <= threshold,
            residual,
            threshold,
        }
    }

    /// Residual within a factor of ten of the threshold, on either side.
    pub fn is_marginal(&self) -> bool {
        self.residual > self.threshold / 10.0 && self.residual <= self.threshold * 10.0
    }
}

fn inclusion_threshold(ctx: &PositiveContext, t: &ComplexMatrix) -> f64 {
    INCLUSION_TOL * (1.0 + ctx.norm() * spectral_norm(t))
}

/// `|A T Z|_max` against its threshold: does `T` map `N(A)` into `N(A)`?
pub fn a_boundedness(ctx: &PositiveContext, t: &ComplexMatrix) -> Result<InclusionCheck> {
    ctx.check_operator(t)?;
    let threshold = inclusion_threshold(ctx, t);
    if ctx.null_basis().ncols() == 0 {
        return Ok(InclusionCheck::new(0.0, threshold));
    }
    let residual = max_abs(&(ctx.a() * t * ctx.null_basis()));
    Ok(InclusionCheck::new(residual, threshold))
}

pub fn check_a_bounded(ctx: &PositiveContext, t: &ComplexMatrix) -> Result<bool> {
    Ok(a_boundedness(ctx, t)?.holds)
}

/// Douglas range inclusion `R(T* A) ⊆ R(A)`, via `|(I - A A^+) T* A|_max`.
pub fn a_adjointability(ctx: &PositiveContext, t: &ComplexMatrix) -> Result<InclusionCheck> {
    ctx.check_operator(t)?;
    let n = ctx.dim();
    let complement = ComplexMatrix::identity(n, n) - ctx.a() * ctx.pinv_a();
    let residual = max_abs(&(complement * t.adjoint() * ctx.a()));
    Ok(InclusionCheck::new(residual, inclusion_threshold(ctx, t)))
}

pub fn check_a_adjointable(ctx: &PositiveContext, t: &ComplexMatrix) -> Result<bool> {
    Ok(a_adjointability(ctx, t)?.holds)
}

/// `A T = 0` up to the inclusion tolerance.
pub fn annihilated_by_a(ctx: &PositiveContext, t: &ComplexMatrix) -> Result<bool> {
    ctx.check_operator(t)?;
    Ok(max_abs(&(ctx.a() * t)) <= inclusion_threshold(ctx, t))
}

/// The matrix of the operator induced by an A-bounded `T` on `R(A^{1/2})`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressedOperator {
    matrix: ComplexMatrix,
}

impl CompressedOperator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }
}

/// `diag(sigma)^{1/2} (V* T V) diag(sigma)^{-1/2}`; fails with
/// [`Error::NotABounded`] unless `T(N(A)) ⊆ N(A)`.
pub fn compress(ctx: &PositiveContext, t: &ComplexMatrix) -> Result<CompressedOperator> {
    if !check_a_bounded(ctx, t)? {
        return Err(Error::NotABounded);
    }
    let v = ctx.range_basis();
    let mut m = v.adjoint() * t * v;
    let sigma = ctx.sigma();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            m[(i, j)] *= c((sigma[i] / sigma[j]).sqrt());
        }
    }
    Ok(CompressedOperator { matrix: m })
}

/// The distinguished A-adjoint `T# = A^+ T* A` (reduced solution of `A X = T* A`).
pub fn sharp(ctx: &PositiveContext, t: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !check_a_adjointable(ctx, t)? {
        return Err(Error::NotAAdjointable);
    }
    Ok(ctx.pinv_a() * t.adjoint() * ctx.a())
}

/// `|T|_A`, or `+inf` when `T` is not A-bounded.
pub fn op_seminorm(ctx: &PositiveContext, t: &ComplexMatrix) -> Result<ExtReal> {
    match compress(ctx, t) {
        Ok(m) => Ok(ExtReal::Finite(spectral_norm(m.matrix()))),
        Err(Error::NotABounded) => Ok(ExtReal::Infinite),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{approx_eq, diag_real, identity, random_gaussian_matrix, random_gaussian_vector};
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn real(rows: usize, data: &[f64]) -> ComplexMatrix {
        DMatrix::from_row_slice(rows, rows, &data.iter().map(|&x| c(x)).collect::<Vec<_>>())
    }

    fn swap13() -> ComplexMatrix {
        real(3, &[0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0])
    }

    /// Random A of the given nullity and a random operator mapping N(A) into N(A).
    fn bounded_instance(n: usize, nullity: usize, seed: u64) -> (PositiveContext, ComplexMatrix) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_gaussian_matrix(n, n - nullity, &mut rng);
        let ctx = PositiveContext::new(&(&g * g.adjoint())).unwrap();
        let raw = random_gaussian_matrix(n, n, &mut rng);
        let p = ctx.proj_a();
        let q = identity(n) - p;
        let t = &raw - p * &raw * q;
        (ctx, t)
    }

    #[test]
    fn boundedness_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let id = PositiveContext::new(&identity(3)).unwrap();
        assert!(check_a_bounded(&id, &random_gaussian_matrix(3, 3, &mut rng)).unwrap());

        let first = PositiveContext::new(&diag_real(&[1.0, 0.0, 0.0])).unwrap();
        assert!(!check_a_bounded(&first, &swap13()).unwrap());
        let last = PositiveContext::new(&diag_real(&[0.0, 0.0, 1.0])).unwrap();
        assert!(!check_a_bounded(&last, &swap13()).unwrap());
        assert!(check_a_bounded(&first, &identity(3)).unwrap());
    }

    #[test]
    fn adjointability_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let t = random_gaussian_matrix(3, 3, &mut rng);
        let id = PositiveContext::new(&identity(3)).unwrap();
        assert!(check_a_adjointable(&id, &t).unwrap());
        let inv = PositiveContext::new(&diag_real(&[3.0, 1.0, 0.5])).unwrap();
        assert!(check_a_adjointable(&inv, &t).unwrap());

        // T*A = e3 e1^T, whose range e3 lies outside R(A) = span{e1}
        let first = PositiveContext::new(&diag_real(&[1.0, 0.0, 0.0])).unwrap();
        let check = a_adjointability(&first, &swap13()).unwrap();
        assert!(!check.holds);
        assert_abs_diff_eq!(check.residual, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn compress_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = random_gaussian_matrix(3, 3, &mut rng);
        let id = PositiveContext::new(&identity(3)).unwrap();
        assert!(approx_eq(compress(&id, &t).unwrap().matrix(), &t, 1e-14));

        let ctx = PositiveContext::new(&diag_real(&[4.0, 1.0])).unwrap();
        let t = real(2, &[1.0, 1.0, 0.0, 1.0]);
        let m = compress(&ctx, &t).unwrap();
        assert!(approx_eq(m.matrix(), &real(2, &[1.0, 2.0, 0.0, 1.0]), 1e-14));

        let zero = compress(&ctx, &ComplexMatrix::zeros(2, 2)).unwrap();
        assert_eq!(max_abs(zero.matrix()), 0.0);

        let first = PositiveContext::new(&diag_real(&[1.0, 0.0, 0.0])).unwrap();
        assert_eq!(compress(&first, &swap13()), Err(Error::NotABounded));
    }

    #[test]
    fn compression_intertwines() {
        for (nullity, seed) in [(0, 4), (1, 5), (2, 6), (3, 7)] {
            let (ctx, t) = bounded_instance(5, nullity, seed);
            let m = compress(&ctx, &t).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed + 100);
            for _ in 0..20 {
                let x = random_gaussian_vector(5, &mut rng);
                let lhs = ctx.coords(&(&t * &x)).unwrap();
                let rhs = m.matrix() * ctx.coords(&x).unwrap();
                assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + x.norm()));
            }
        }
    }

    #[test]
    fn compression_is_multiplicative() {
        let (ctx, t) = bounded_instance(5, 2, 9);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let raw = random_gaussian_matrix(5, 5, &mut rng);
        let q = identity(5) - ctx.proj_a();
        let s = &raw - ctx.proj_a() * &raw * &q;
        let product = compress(&ctx, &(&t * &s)).unwrap();
        let expected = compress(&ctx, &t).unwrap().matrix() * compress(&ctx, &s).unwrap().matrix();
        assert!(approx_eq(product.matrix(), &expected, 1e-9));
    }

    #[test]
    fn sharp_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let t = random_gaussian_matrix(3, 3, &mut rng);
        let id = PositiveContext::new(&identity(3)).unwrap();
        assert!(approx_eq(&sharp(&id, &t).unwrap(), &t.adjoint(), 1e-14));

        let ctx = PositiveContext::new(&diag_real(&[1.0, 2.0])).unwrap();
        let t = real(2, &[0.0, 1.0, 0.0, 0.0]);
        let s = sharp(&ctx, &t).unwrap();
        assert!(approx_eq(&s, &real(2, &[0.0, 0.0, 0.5, 0.0]), 1e-14));
        assert!(approx_eq(&(ctx.a() * &s), &(t.adjoint() * ctx.a()), 1e-14));

        let (ctx, _) = bounded_instance(4, 2, 12);
        assert!(approx_eq(&sharp(&ctx, &identity(4)).unwrap(), ctx.proj_a(), 1e-10));

        let first = PositiveContext::new(&diag_real(&[1.0, 0.0, 0.0])).unwrap();
        assert_eq!(sharp(&first, &swap13()), Err(Error::NotAAdjointable));
    }

    #[test]
    fn sharp_defining_identities() {
        let (ctx, t) = bounded_instance(5, 2, 13);
        let s = sharp(&ctx, &t).unwrap();
        assert!(approx_eq(&(ctx.a() * &s), &(t.adjoint() * ctx.a()), 1e-9));
        let twice = sharp(&ctx, &s).unwrap();
        let expected = ctx.proj_a() * &t * ctx.proj_a();
        assert!(approx_eq(&twice, &expected, 1e-9));
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..20 {
            let x = random_gaussian_vector(5, &mut rng);
            let y = random_gaussian_vector(5, &mut rng);
            let lhs = ctx.inner(&(&t * &x), &y).unwrap();
            let rhs = ctx.inner(&x, &(&s * &y)).unwrap();
            assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + x.norm() * y.norm()));
        }
    }

    #[test]
    fn seminorm_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let t = random_gaussian_matrix(3, 3, &mut rng);
        let id = PositiveContext::new(&identity(3)).unwrap();
        assert_abs_diff_eq!(op_seminorm(&id, &t).unwrap().finite().unwrap(), spectral_norm(&t), epsilon = 1e-13);

        let first = PositiveContext::new(&diag_real(&[1.0, 0.0, 0.0])).unwrap();
        assert_eq!(op_seminorm(&first, &swap13()).unwrap(), ExtReal::Infinite);

        let ctx = PositiveContext::new(&diag_real(&[4.0, 1.0])).unwrap();
        let value = op_seminorm(&ctx, &real(2, &[1.0, 1.0, 0.0, 1.0])).unwrap();
        assert_abs_diff_eq!(value.finite().unwrap(), 1.0 + 2f64.sqrt(), epsilon = 1e-13);
    }

    #[test]
    fn seminorm_bounds_every_sample() {
        for (nullity, seed) in [(0, 16), (1, 17), (3, 18)] {
            let (ctx, t) = bounded_instance(5, nullity, seed);
            let norm = op_seminorm(&ctx, &t).unwrap().finite().unwrap();
            for x in ctx.sample_unit(1000, seed, 1.0) {
                let image = ctx.seminorm(&(&t * &x)).unwrap();
                assert!(image <= norm * ctx.seminorm(&x).unwrap() + 1e-9);
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let ctx = PositiveContext::new(&identity(3)).unwrap();
        assert!(matches!(
            check_a_bounded(&ctx, &identity(2)),
            Err(Error::DimensionMismatch { expected: 3, actual: 2 })
        ));
        assert!(matches!(op_seminorm(&ctx, &identity(2)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn marginal_residuals_are_flagged() {
        let check = InclusionCheck::new(5e-11, 1e-10);
        assert!(check.holds && check.is_marginal());
        let check = InclusionCheck::new(1e-13, 1e-10);
        assert!(check.holds && !check.is_marginal());
        let check = InclusionCheck::new(1.0, 1e-10);
        assert!(!check.holds && !check.is_marginal());
    }
}
