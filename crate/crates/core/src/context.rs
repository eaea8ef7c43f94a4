//! The weight operator `A` and the semi-inner product it induces.
//!
//! Conventions: `<x|y>_A = <Ax, y> = y* A x`, linear in the first slot and
//! conjugate-linear in the second.
//!
//! With `A = V diag(sigma) V*` restricted to its range, the *compressed
//! coordinates* of a vector `x` are `diag(sigma)^{1/2} V* x`. They are the
//! coordinates of `Ax` in the orthonormal basis `{A^{1/2} v_i}` of
//! `R(A^{1/2})`, so `|x|_A` is their Euclidean norm and every A-bounded
//! operator acts on them as an `r x r` matrix (see [`crate::compression`]).

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    c, ensure_finite, ensure_square, herm_eig, random_gaussian_vector, random_unit_vector,
    ComplexMatrix, ComplexVector,
};

/// A validated nonzero positive semidefinite matrix with its spectral data.
#[derive(Debug, Clone)]
pub struct PositiveContext {
    a: ComplexMatrix,
    sqrt_a: ComplexMatrix,
    pinv_a: ComplexMatrix,
    proj_a: ComplexMatrix,
    range_basis: ComplexMatrix,
    sigma: Vec<f64>,
    null_basis: ComplexMatrix,
    eps_rank: f64,
}

/// Default rank cutoff: `n * |A|_2 * 2^-40`.
pub fn default_rank_cutoff(n: usize, norm: f64) -> f64 {
    n as f64 * norm * 2f64.powi(-40)
}

/// Relative eigenvalue gap below which range directions are treated as one
/// eigenspace when choosing the basis.
const CLUSTER_TOL: f64 = 1e-12;

/// Orthonormal basis of the column space of `q` (orthonormal columns) built
/// greedily from the standard basis vectors with the largest projections.
/// Eigenvectors of a repeated eigenvalue are only defined up to a unitary
/// mix; this fixes the choice, so that e.g. `A = I` yields `V = I`.
fn canonical_basis(q: &ComplexMatrix) -> ComplexMatrix {
    let (n, k) = q.shape();
    let mut basis = ComplexMatrix::zeros(n, k);
    for j in 0..k {
        let done = basis.columns(0, j).into_owned();
        let mut best: Option<(f64, ComplexVector)> = None;
        for i in 0..n {
            // component of e_i inside span(q), minus what is already covered
            let mut v = q * q.row(i).adjoint();
            for _ in 0..2 {
                let overlap = done.adjoint() * &v;
                v -= &done * overlap;
            }
            let size = v.norm();
            if best.as_ref().map_or(true, |(b, _)| size > *b + 1e-12) {
                best = Some((size, v));
            }
        }
        let (size, v) = best.expect("n > 0");
        basis.set_column(j, &(v / c(size)));
    }
    basis
}

/// Validates `A` and precomputes `A^{1/2}`, `A^+`, `P_A` and the range/null
/// bases. Eigenvalues at or below `eps_rank` count as exact zeros.
pub fn build_context(a: &ComplexMatrix, eps_rank: Option<f64>) -> Result<PositiveContext> {
    let n = ensure_square(a)?;
    ensure_finite(a)?;
    let eig = herm_eig(a)?;
    let norm = eig.eigenvalues.iter().fold(0.0f64, |acc, &w| acc.max(w.abs()));
    let eps_rank = eps_rank.unwrap_or_else(|| default_rank_cutoff(n, norm));

    let min_eigenvalue = eig.eigenvalues[0];
    if min_eigenvalue < -eps_rank {
        return Err(Error::NotPositive { min_eigenvalue });
    }

    // ascending order: null directions first, range directions after
    let null_count = eig.eigenvalues.iter().filter(|&&w| w <= eps_rank).count();
    if null_count == n {
        return Err(Error::ZeroOperator);
    }
    let rank = n - null_count;

    let range_idx: Vec<usize> = (null_count..n).rev().collect();
    let sigma: Vec<f64> = range_idx.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut range_basis = DMatrix::from_fn(n, rank, |i, j| eig.eigenvectors[(i, range_idx[j])]);
    let null_basis = canonical_basis(&DMatrix::from_fn(n, null_count, |i, j| eig.eigenvectors[(i, j)]));

    let cluster_tol = CLUSTER_TOL * norm;
    let mut start = 0;
    while start < rank {
        let mut end = start + 1;
        while end < rank && sigma[start] - sigma[end] <= cluster_tol {
            end += 1;
        }
        if end - start > 1 {
            let block = canonical_basis(&range_basis.columns(start, end - start).into_owned());
            range_basis.columns_mut(start, end - start).copy_from(&block);
        }
        start = end;
    }

    let spectral = |f: &dyn Fn(f64) -> f64| {
        let mut scaled = range_basis.clone();
        for (j, &s) in sigma.iter().enumerate() {
            scaled.column_mut(j).scale_mut(f(s));
        }
        &scaled * range_basis.adjoint()
    };
    let sqrt_a = spectral(&|s| s.sqrt());
    let pinv_a = spectral(&|s| 1.0 / s);
    let proj_a = &range_basis * range_basis.adjoint();

    Ok(PositiveContext {
        a: a.clone(),
        sqrt_a,
        pinv_a,
        proj_a,
        range_basis,
        sigma,
        null_basis,
        eps_rank,
    })
}

impl PositiveContext {
    pub fn new(a: &ComplexMatrix) -> Result<Self> {
        build_context(a, None)
    }

    /// Ambient dimension `n`.
    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    pub fn a(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn sqrt_a(&self) -> &ComplexMatrix {
        &self.sqrt_a
    }

    /// Moore-Penrose inverse `A^+`.
    pub fn pinv_a(&self) -> &ComplexMatrix {
        &self.pinv_a
    }

    /// Orthogonal projection onto `R(A)`.
    pub fn proj_a(&self) -> &ComplexMatrix {
        &self.proj_a
    }

    /// `n x r`, orthonormal eigenvectors for the positive eigenvalues in
    /// descending order.
    pub fn range_basis(&self) -> &ComplexMatrix {
        &self.range_basis
    }

    /// Positive eigenvalues, descending.
    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    /// `n x (n - r)`, orthonormal basis of `N(A)`.
    pub fn null_basis(&self) -> &ComplexMatrix {
        &self.null_basis
    }

    pub fn eps_rank(&self) -> f64 {
        self.eps_rank
    }

    /// `|A|_2`.
    pub fn norm(&self) -> f64 {
        self.sigma[0]
    }

    fn check_len(&self, x: &ComplexVector) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        Ok(())
    }

    pub(crate) fn check_operator(&self, t: &ComplexMatrix) -> Result<()> {
        let n = ensure_square(t)?;
        if n != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: n,
            });
        }
        Ok(())
    }

    /// Compressed coordinates `diag(sigma)^{1/2} V* x` of `Ax`.
    pub fn coords(&self, x: &ComplexVector) -> Result<ComplexVector> {
        self.check_len(x)?;
        let mut y = self.range_basis.adjoint() * x;
        for (yi, &s) in y.iter_mut().zip(&self.sigma) {
            *yi *= s.sqrt();
        }
        Ok(y)
    }

    /// The vector `V diag(sigma)^{-1/2} c` in `R(A)` whose compressed
    /// coordinates are `c`.
    pub fn lift_vector(&self, coords: &ComplexVector) -> Result<ComplexVector> {
        if coords.len() != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                actual: coords.len(),
            });
        }
        let scaled = ComplexVector::from_iterator(
            self.rank(),
            coords.iter().zip(&self.sigma).map(|(z, &s)| z / s.sqrt()),
        );
        Ok(&self.range_basis * scaled)
    }

    /// The operator `V diag(sigma)^{-1/2} M diag(sigma)^{1/2} V*` whose
    /// compression is exactly `M` and which vanishes on `N(A)`.
    pub fn lift_operator(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        let r = ensure_square(m)?;
        if r != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                actual: r,
            });
        }
        let left = DMatrix::from_fn(self.dim(), r, |i, j| {
            self.range_basis[(i, j)] / self.sigma[j].sqrt()
        });
        let right = DMatrix::from_fn(r, self.dim(), |i, j| {
            self.range_basis[(j, i)].conj() * self.sigma[i].sqrt()
        });
        Ok(left * m * right)
    }

    /// `<x|y>_A = <Ax, y>`.
    pub fn inner(&self, x: &ComplexVector, y: &ComplexVector) -> Result<Complex64> {
        let cx = self.coords(x)?;
        let cy = self.coords(y)?;
        Ok(cy.dotc(&cx))
    }

    /// `|x|_A = <x|x>_A^{1/2}`.
    pub fn seminorm(&self, x: &ComplexVector) -> Result<f64> {
        Ok(self.coords(x)?.norm())
    }

    /// `count` vectors of unit A-seminorm, deterministic per `seed`.
    ///
    /// Each is `u / |u|_A + null_scale * t * z` with `u` a complex Gaussian
    /// vector in `R(A)`, `z` a random unit vector of `N(A)` (absent when `A`
    /// is invertible) and `t` uniform on `[0, 1]`.
    pub fn sample_unit(&self, count: usize, seed: u64, null_scale: f64) -> Vec<ComplexVector> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nullity = self.null_basis.ncols();
        (0..count)
            .map(|_| {
                let u = &self.range_basis * random_gaussian_vector(self.rank(), &mut rng);
                let norm = self.seminorm(&u).expect("length n");
                let mut x = u / c(norm);
                if nullity > 0 {
                    let z = &self.null_basis * random_unit_vector(nullity, &mut rng);
                    let t: f64 = rng.gen();
                    x += z * c(null_scale * t);
                }
                x
            })
            .collect()
    }
}
