//! Shared helpers for the benchmark targets, plus the iteration-count
//! budget that the convergence analysis promises: the number of steps to a
//! fixed tolerance stays within a constant times `N·n·log³(N·n/tol)`.

use opnorm_core::{ConvergenceReport, DenseMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seeded dense positive test matrix.
pub fn random_positive(n: usize, seed: u64) -> DenseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DenseMatrix::random(n, n, 0.01, 1.0, &mut rng)
}

/// `N·n·log³(N·n/tol)`: the analysis-side iteration budget for a run.
pub fn iteration_budget(report: &ConvergenceReport, cols: usize, tol: f64) -> f64 {
    let nn = report.n_param * cols as f64;
    nn * (nn / tol).ln().powi(3)
}

/// The empirical constant `iterations / budget`; recorded per run so that
/// regressions in convergence behavior show up as a growing constant.
pub fn iteration_constant(report: &ConvergenceReport, cols: usize, tol: f64) -> f64 {
    report.iterations as f64 / iteration_budget(report, cols, tol)
}
