//! Brute-force lower bounds for the suprema over the A-unit sphere.
//!
//! Every value is computed from the definitions in ambient coordinates with
//! the raw matrix `A` (`<u|v>_A = v* A u`), without spectral data or the
//! compressed operator, so it can be used to check those code paths.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::context::PositiveContext;
use crate::error::{Error, Result};
use crate::linalg::{c, random_gaussian_vector, ComplexMatrix, ComplexVector};

/// Local search sweeps applied to each candidate.
pub const REFINE_SWEEPS: usize = 200;

/// Samples per block; the running maximum restarts at each block boundary.
pub const BLOCK: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Functional {
    /// `|Tx|_A`
    #[serde(rename = "opnorm")]
    OpNorm,
    /// `|<Tx|x>_A|`
    #[serde(rename = "omega")]
    Omega,
    /// `sqrt(|<Tx|x>_A|^2 + |Tx|_A^4)`
    #[serde(rename = "domega")]
    DOmega,
    /// `|<Tx|Sx>_A|`
    #[serde(rename = "pair-seminorm")]
    PairSeminorm,
    /// `|<Tx|x>_A| |<Sx|x>_A|`
    #[serde(rename = "pair-radius")]
    PairRadius,
}

impl Functional {
    pub fn needs_pair(self) -> bool {
        matches!(self, Functional::PairSeminorm | Functional::PairRadius)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleEstimate {
    pub functional: Functional,
    pub value: f64,
    pub samples: usize,
    pub refined: bool,
    pub seed: u64,
}

struct Evaluator<'a> {
    a: &'a ComplexMatrix,
    t: &'a ComplexMatrix,
    s: Option<&'a ComplexMatrix>,
    functional: Functional,
    /// Minimum of `|x|_A^2 / |x|^2`. Closer to `N(A)` the rounding error
    /// in `A T x` dominates the normalized value and the local search would
    /// chase it.
    floor: f64,
}

impl Evaluator<'_> {
    fn form(&self, u: &ComplexVector, v: &ComplexVector) -> Complex64 {
        v.dotc(&(self.a * u))
    }

    /// Functional at `x / |x|_A`, or `None` when `|x|_A` is negligible.
    fn value(&self, x: &ComplexVector) -> Option<f64> {
        let weight = self.form(x, x).re;
        if !(weight > self.floor * x.norm_squared()) {
            return None;
        }
        let x = x / c(weight.sqrt());
        let tx = self.t * &x;
        let value = match self.functional {
            Functional::OpNorm => self.form(&tx, &tx).re.max(0.0).sqrt(),
            Functional::Omega => self.form(&tx, &x).norm(),
            Functional::DOmega => {
                let lambda = self.form(&tx, &x).norm_sqr();
                let mu = self.form(&tx, &tx).re.max(0.0);
                (lambda + mu * mu).sqrt()
            }
            Functional::PairSeminorm => {
                let sx = self.s.expect("checked") * &x;
                self.form(&tx, &sx).norm()
            }
            Functional::PairRadius => {
                let sx = self.s.expect("checked") * &x;
                self.form(&tx, &x).norm() * self.form(&sx, &x).norm()
            }
        };
        Some(value)
    }

    /// Pattern search: perturb each coordinate by `+-r` and `+-i r`, keep
    /// improvements, halve `r` after a sweep without one.
    fn refine(&self, mut x: ComplexVector, mut f: f64) -> f64 {
        let directions = [c(1.0), c(-1.0), Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0)];
        let mut radius = 0.25 * x.norm();
        for _ in 0..REFINE_SWEEPS {
            let mut improved = false;
            for k in 0..x.len() {
                for d in directions {
                    let mut y = x.clone();
                    y[k] += d * c(radius);
                    if let Some(g) = self.value(&y) {
                        if g > f {
                            x = y;
                            f = g;
                            improved = true;
                        }
                    }
                }
            }
            if !improved {
                radius *= 0.5;
                if radius < 1e-12 * x.norm() {
                    break;
                }
            }
        }
        f
    }
}

/// Samples `samples` Gaussian vectors, normalizes each by its own A-seminorm
/// and evaluates the functional; then refines every sample that set a new
/// running maximum within its block of [`BLOCK`] samples.
///
/// Restarting the running maximum per block gives one refined candidate
/// family per block, so a single sample in the basin of a lower local
/// maximum cannot capture the whole estimate. The candidates for a prefix of
/// the sample stream are a prefix of the candidates for the full stream,
/// hence the estimate for `samples = k` never exceeds the one for a larger
/// count with the same seed.
pub fn oracle_estimate(
    ctx: &PositiveContext,
    t: &ComplexMatrix,
    s: Option<&ComplexMatrix>,
    functional: Functional,
    samples: usize,
    seed: u64,
) -> Result<OracleEstimate> {
    let n = ctx.dim();
    for op in std::iter::once(t).chain(s) {
        if op.nrows() != n || op.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: op.nrows(),
            });
        }
    }
    if functional.needs_pair() && s.is_none() {
        return Err(Error::MissingOperand);
    }
    if samples == 0 {
        return Err(Error::NoSamples);
    }
    let eval = Evaluator {
        a: ctx.a(),
        t,
        s,
        functional,
        floor: 1e-8 * ctx.norm(),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::NEG_INFINITY;
    let mut running = f64::NEG_INFINITY;
    let mut records = Vec::new();
    for k in 0..samples {
        if k % BLOCK == 0 {
            running = f64::NEG_INFINITY;
        }
        let x = random_gaussian_vector(n, &mut rng);
        if let Some(f) = eval.value(&x) {
            best = best.max(f);
            if f > running {
                running = f;
                records.push((x, f));
            }
        }
    }
    let refined = !records.is_empty();
    let value = records
        .into_iter()
        .map(|(x, f)| eval.refine(x, f))
        .fold(best.max(0.0), f64::max);
    Ok(OracleEstimate {
        functional,
        value,
        samples,
        refined,
        seed,
    })
}
