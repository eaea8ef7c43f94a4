//! Dense complex kernels on ordinary (Hilbert-space) matrices.
//!
//! Eigen- and singular-value factorizations come from `nalgebra`; the
//! numerical radius and Davis-Wielandt radius are computed here.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::ascent::{maximize_on_sphere, AscentConfig, SphereObjective};
use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

/// Relative asymmetry allowed for inputs declared Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Number of uniform points on `[0, pi)` used to localize the numerical radius.
pub const THETA_GRID: usize = 1024;

const GOLDEN_WIDTH: f64 = 1e-12;
const REFINED_BRACKETS: usize = 4;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn ensure_nonempty(m: &ComplexMatrix) -> Result<()> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Err(Error::Empty);
    }
    Ok(())
}

pub fn ensure_square(m: &ComplexMatrix) -> Result<usize> {
    ensure_nonempty(m)?;
    if m.nrows() != m.ncols() {
        return Err(Error::NonSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

pub fn ensure_finite(m: &ComplexMatrix) -> Result<()> {
    for col in 0..m.ncols() {
        for row in 0..m.nrows() {
            let z = m[(row, col)];
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite { row, col });
            }
        }
    }
    Ok(())
}

/// Largest entry modulus.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()) * c(0.5)
}

/// `max|X - Y| <= tol * (1 + max(|X|, |Y|))`, entrywise maxima.
pub fn approx_eq(x: &ComplexMatrix, y: &ComplexMatrix, tol: f64) -> bool {
    x.shape() == y.shape() && max_abs(&(x - y)) <= tol * (1.0 + max_abs(x).max(max_abs(y)))
}

pub fn identity(n: usize) -> ComplexMatrix {
    DMatrix::identity(n, n)
}

/// Real diagonal matrix as a complex matrix.
pub fn diag_real(values: &[f64]) -> ComplexMatrix {
    let n = values.len();
    DMatrix::from_fn(n, n, |i, j| if i == j { c(values[i]) } else { c(0.0) })
}

pub fn random_gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    DMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

pub fn random_gaussian_vector<R: Rng + ?Sized>(len: usize, rng: &mut R) -> ComplexVector {
    DVector::from_fn(len, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Uniformly distributed point on the unit sphere of `C^len`.
pub fn random_unit_vector<R: Rng + ?Sized>(len: usize, rng: &mut R) -> ComplexVector {
    loop {
        let v = random_gaussian_vector(len, rng);
        let norm = v.norm();
        if norm > 1e-8 {
            return v / c(norm);
        }
    }
}

/// Haar-distributed unitary matrix (QR of a complex Gaussian matrix with
/// the phases of `R`'s diagonal absorbed into `Q`).
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let qr = random_gaussian_matrix(n, n, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / c(d.norm()) } else { c(1.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Ascending eigenvalues and matching orthonormal eigenvectors (columns) of a
/// Hermitian matrix.
#[derive(Debug, Clone)]
pub struct EigResult {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: ComplexMatrix,
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Each eigenvector is normalized so that its first largest-modulus entry is
/// real and positive, which makes the output reproducible for diagonal and
/// other structured inputs.
pub fn herm_eig(h: &ComplexMatrix) -> Result<EigResult> {
    let n = ensure_square(h)?;
    ensure_finite(h)?;
    let residual = max_abs(&(h - h.adjoint()));
    if residual > HERMITIAN_TOL * (1.0 + max_abs(h)) {
        return Err(Error::NotHermitian { residual });
    }
    let eig = hermitian_part(h).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(src).into_owned();
        let peak = v.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
        if let Some(anchor) = v.iter().find(|z| z.norm() >= peak - 1e-12).copied() {
            v *= anchor.conj() / c(anchor.norm());
        }
        eigenvectors.set_column(dst, &v);
    }
    Ok(EigResult {
        eigenvalues,
        eigenvectors,
    })
}

fn hermitian_eigenvalues(h: &ComplexMatrix) -> DVector<f64> {
    h.clone().symmetric_eigenvalues()
}

/// Largest singular value.
pub fn spectral_norm(m: &ComplexMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().iter().fold(0.0, |acc, &s| acc.max(s))
}

/// Unit vector `v` maximizing `|Mv|`.
pub fn top_right_singular_vector(m: &ComplexMatrix) -> ComplexVector {
    let gram = hermitian_part(&(m.adjoint() * m));
    let eig = gram.symmetric_eigen();
    let k = eig.eigenvalues.imax();
    eig.eigenvectors.column(k).into_owned()
}

/// Eigenvalues of a general square matrix (complex Schur form).
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Option<ComplexVector>> {
    ensure_square(m)?;
    Ok(m.clone().schur().eigenvalues())
}

/// Maximum eigenvalue modulus.
///
/// Eigenvalues come from the complex Schur form. Should that ever fail to
/// deliver a triangular factor, the fallback is the power-norm estimate
/// `|M^64|^(1/64)`, evaluated with rescaling to avoid overflow.
pub fn spectral_radius(m: &ComplexMatrix) -> Result<f64> {
    if let Some(values) = eigenvalues(m)? {
        return Ok(values.iter().fold(0.0, |acc, z| acc.max(z.norm())));
    }
    Ok(power_norm_radius(m, 64))
}

fn power_norm_radius(m: &ComplexMatrix, k: u32) -> f64 {
    // M^k by repeated squaring; `log_scale` is log of the factor divided out
    // of the current power so far.
    let mut p = m.clone();
    let mut log_scale = 0.0;
    let mut power = 1u32;
    while power < k {
        let norm = spectral_norm(&p);
        if norm == 0.0 {
            return 0.0;
        }
        p /= c(norm);
        log_scale = 2.0 * (log_scale + norm.ln());
        p = &p * &p;
        power *= 2;
    }
    let norm = spectral_norm(&p);
    if norm == 0.0 {
        return 0.0;
    }
    ((norm.ln() + log_scale) / power as f64).exp()
}

/// `lambda_max(Re(e^{i theta} M))`, together with `-lambda_min`, whichever is
/// larger: the support of the numerical range in directions `theta` and
/// `theta + pi` at once.
fn rotated_support(m: &ComplexMatrix, theta: f64) -> f64 {
    let rotated = m * Complex64::from_polar(1.0, theta);
    let values = hermitian_eigenvalues(&hermitian_part(&rotated));
    let hi = values.iter().fold(f64::NEG_INFINITY, |acc, &v| acc.max(v));
    let lo = values.iter().fold(f64::INFINITY, |acc, &v| acc.min(v));
    hi.max(-lo)
}

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, width: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > width {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Numerical radius together with the angle and unit vector attaining it.
#[derive(Debug, Clone)]
pub struct NumericalRadius {
    pub value: f64,
    pub theta: f64,
    /// Unit `c` with `|c* M c| = value`.
    pub witness: ComplexVector,
}

/// `sup_theta lambda_max((e^{i theta} M + e^{-i theta} M*) / 2)`.
pub fn numerical_radius(m: &ComplexMatrix, tol: f64) -> Result<f64> {
    Ok(numerical_radius_witness(m, tol)?.value)
}

/// Numerical radius by a uniform theta grid followed by golden-section
/// refinement of the best local maxima of the grid.
pub fn numerical_radius_witness(m: &ComplexMatrix, tol: f64) -> Result<NumericalRadius> {
    let n = ensure_square(m)?;
    let step = std::f64::consts::PI / THETA_GRID as f64;
    let grid: Vec<f64> = (0..THETA_GRID)
        .map(|k| rotated_support(m, k as f64 * step))
        .collect();

    let mut peaks: Vec<usize> = (0..THETA_GRID)
        .filter(|&k| {
            let prev = grid[(k + THETA_GRID - 1) % THETA_GRID];
            let next = grid[(k + 1) % THETA_GRID];
            grid[k] >= prev && grid[k] >= next
        })
        .collect();
    peaks.sort_by(|&a, &b| grid[b].total_cmp(&grid[a]));
    peaks.truncate(REFINED_BRACKETS);

    let best_grid = (0..THETA_GRID)
        .max_by(|&a, &b| grid[a].total_cmp(&grid[b]))
        .expect("non-empty grid");
    let (mut theta, mut value) = (best_grid as f64 * step, grid[best_grid]);
    let width = GOLDEN_WIDTH.min(tol.max(f64::EPSILON));
    for k in peaks {
        let center = k as f64 * step;
        let (t, v) = golden_max(|t| rotated_support(m, t), center - step, center + step, width);
        if v > value {
            theta = t;
            value = v;
        }
    }

    let rotated = hermitian_part(&(m * Complex64::from_polar(1.0, theta)));
    let eig = rotated.symmetric_eigen();
    let hi = eig.eigenvalues.imax();
    let lo = eig.eigenvalues.imin();
    let k = if eig.eigenvalues[hi] >= -eig.eigenvalues[lo] { hi } else { lo };
    let witness = if n > 0 {
        eig.eigenvectors.column(k).into_owned()
    } else {
        DVector::zeros(0)
    };
    let attained = witness.dotc(&(m * &witness)).norm();
    Ok(NumericalRadius {
        value: value.max(attained),
        theta,
        witness,
    })
}

struct DwObjective<'a> {
    m: &'a ComplexMatrix,
    m_adj: ComplexMatrix,
}

impl SphereObjective for DwObjective<'_> {
    fn value(&self, y: &ComplexVector) -> f64 {
        let my = self.m * y;
        let q = y.dotc(&my);
        let p = my.norm_squared();
        q.norm_sqr() + p * p
    }

    fn gradient(&self, y: &ComplexVector) -> ComplexVector {
        let my = self.m * y;
        let mhy = &self.m_adj * y;
        let mhmy = &self.m_adj * &my;
        let q = y.dotc(&my);
        let p = my.norm_squared();
        (my * q.conj() + mhy * q + mhmy * c(2.0 * p)) * c(2.0)
    }
}

/// Davis-Wielandt radius with the maximizing unit vector.
#[derive(Debug, Clone)]
pub struct DwRadius {
    pub value: f64,
    pub witness: ComplexVector,
}

/// `sup { sqrt(|y*My|^2 + |My|^4) : |y| = 1 }`.
pub fn dw_radius(m: &ComplexMatrix, tol: f64, seed: u64) -> Result<f64> {
    Ok(dw_radius_witness(m, tol, seed)?.value)
}

/// Multi-start projected gradient ascent of `|y*My|^2 + |My|^4`.
///
/// Besides the 64 seeded random starts, the ascent is started from the
/// numerical-radius witness and the top right singular vector, so the result
/// never falls below `max(omega(M), |M|^2)`.
pub fn dw_radius_witness(m: &ComplexMatrix, tol: f64, seed: u64) -> Result<DwRadius> {
    let n = ensure_square(m)?;
    if max_abs(m) == 0.0 {
        let mut e1 = DVector::zeros(n);
        e1[0] = c(1.0);
        return Ok(DwRadius {
            value: 0.0,
            witness: e1,
        });
    }
    let radius = numerical_radius_witness(m, tol)?;
    let starts = [radius.witness, top_right_singular_vector(m)];
    let objective = DwObjective {
        m,
        m_adj: m.adjoint(),
    };
    let best = maximize_on_sphere(&objective, n, &starts, seed, &AscentConfig::default());
    Ok(DwRadius {
        value: best.value.max(0.0).sqrt(),
        witness: best.point,
    })
}
