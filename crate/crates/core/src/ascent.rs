//! Multi-start Riemannian gradient ascent on the complex unit sphere.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::{random_unit_vector, ComplexVector};

/// A smooth real function on the unit sphere of `C^dim`.
pub(crate) trait SphereObjective {
    fn value(&self, y: &ComplexVector) -> f64;

    /// Euclidean gradient with respect to the real coordinates of `y`,
    /// packed as a complex vector (twice the Wirtinger derivative d/d(conj y)).
    fn gradient(&self, y: &ComplexVector) -> ComplexVector;
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct AscentConfig {
    pub random_starts: usize,
    pub max_iterations: usize,
    pub min_change: f64,
}

impl Default for AscentConfig {
    fn default() -> Self {
        AscentConfig {
            random_starts: 64,
            max_iterations: 20_000,
            min_change: 1e-12,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct AscentResult {
    pub value: f64,
    pub point: ComplexVector,
    /// Converged objective value of every start, in start order.
    pub local_maxima: Vec<f64>,
}

/// Runs the ascent from each of `fixed_starts` and from `config.random_starts`
/// seeded random starts; returns the best point found.
pub(crate) fn maximize_on_sphere<F: SphereObjective>(
    objective: &F,
    dim: usize,
    fixed_starts: &[ComplexVector],
    seed: u64,
    config: &AscentConfig,
) -> AscentResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts: Vec<ComplexVector> = fixed_starts
        .iter()
        .filter(|s| s.len() == dim && s.norm() > 0.0)
        .map(|s| s.normalize())
        .collect();
    starts.extend((0..config.random_starts).map(|_| random_unit_vector(dim, &mut rng)));
    if starts.is_empty() {
        let mut e1 = DVector::zeros(dim);
        e1[0] = Complex64::new(1.0, 0.0);
        starts.push(e1);
    }

    let mut best: Option<(f64, ComplexVector)> = None;
    let mut local_maxima = Vec::with_capacity(starts.len());
    for start in starts {
        let (value, point) = ascend(objective, start, config);
        local_maxima.push(value);
        if best.as_ref().map_or(true, |(b, _)| value > *b) {
            best = Some((value, point));
        }
    }
    let (value, point) = best.expect("at least one start");
    AscentResult {
        value,
        point,
        local_maxima,
    }
}

fn tangent_gradient<F: SphereObjective>(objective: &F, y: &ComplexVector) -> ComplexVector {
    let g = objective.gradient(y);
    let radial = y.dotc(&g).re;
    g - y * Complex64::new(radial, 0.0)
}

fn ascend<F: SphereObjective>(
    objective: &F,
    mut y: ComplexVector,
    config: &AscentConfig,
) -> (f64, ComplexVector) {
    let mut f = objective.value(&y);
    let mut step = 1.0;
    for _ in 0..config.max_iterations {
        let g = tangent_gradient(objective, &y);
        let g_sq = g.norm_squared();
        if g_sq <= 1e-30 * (1.0 + f * f) {
            break;
        }
        let mut accepted = None;
        let mut t = step;
        while t > 1e-18 {
            let candidate = (&y + &g * Complex64::new(t, 0.0)).normalize();
            let fc = objective.value(&candidate);
            if fc >= f + 1e-4 * t * g_sq {
                accepted = Some((candidate, fc, t));
                break;
            }
            t *= 0.5;
        }
        let Some((candidate, fc, t)) = accepted else {
            break;
        };
        let change = fc - f;
        y = candidate;
        f = fc;
        step = t * 2.0;
        if change < config.min_change * (1.0 + f.abs()) {
            break;
        }
    }
    (f, y)
}
