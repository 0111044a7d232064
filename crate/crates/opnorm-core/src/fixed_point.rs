//! The fixed-point iteration for q↦p norms of nonnegative matrices, with
//! certified sandwich bounds from the min/max potentials.
//!
//! The iteration map sends a strictly positive vector `x` to `Sx` with
//! `(Sx)_i = (Σ_k a_ki (A_k x)^{p−1})^{1/(q−1)}` (`A_k` is the `k`th row),
//! which for p = q = 2 reduces to multiplication by `AᵀA`. Critical points
//! of `f(x) = ‖Ax‖_p/‖x‖_q` are exactly the positive fixed points, and for
//! a positive matrix with `1 < p <= q` there is a unique one, the global
//! maximizer. For any positive unit vector the potentials
//! `m(x) = min_i (Sx)_i/x_i` and `M(x) = max_i (Sx)_i/x_i` sandwich the
//! norm: `m^{q−1} <= ‖A‖_{q↦p}^p <= M^{q−1}`, so the loop can stop with a
//! certificate as soon as `M/m` is close enough to 1.

use crate::bounds::{BoundsMethod, CertifiedBounds};
use crate::error::{Error, Result};
use crate::matrix::{positivity_shift, DenseMatrix, PositiveMatrix, UnitVector, DEFAULT_SHIFT_DELTA};
use crate::norms::norm_ratio;
use crate::params::NormParams;

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 100_000;

/// The min/max ratios `(Sx)_i / x_i` at a positive unit vector.
#[derive(Debug, Clone, Copy)]
pub struct Potentials {
    pub min: f64,
    pub max: f64,
}

impl Potentials {
    pub fn ratio(&self) -> f64 {
        self.max / self.min
    }

    /// The certified norm bounds `[m^{(q−1)/p}, M^{(q−1)/p}]` implied by the
    /// sandwich, valid for the matrix the potentials were measured on.
    pub fn norm_bounds(&self, params: &NormParams) -> CertifiedBounds {
        let e = (params.q() - 1.0) / params.p();
        CertifiedBounds {
            lower: self.min.powf(e),
            upper: self.max.powf(e),
            method: BoundsMethod::Sandwich,
        }
    }
}

/// One recorded step of the iteration: the unit iterate, its potentials, and
/// the objective value on the shifted matrix.
#[derive(Debug, Clone)]
pub struct IterationState {
    pub x: UnitVector,
    pub pot_min: f64,
    pub pot_max: f64,
    pub objective: f64,
    pub iteration: usize,
}

impl IterationState {
    pub fn norm_bounds(&self, params: &NormParams) -> CertifiedBounds {
        Potentials {
            min: self.pot_min,
            max: self.pot_max,
        }
        .norm_bounds(params)
    }
}

#[derive(Debug, Clone)]
pub struct IterationOptions {
    /// Stop once `M/m <= 1 + tol`.
    pub tol: f64,
    pub max_iter: usize,
    /// Perturbation budget handed to the positivity shift.
    pub shift_delta: f64,
    /// Record an [`IterationState`] per step (costs memory on long runs).
    pub record_trace: bool,
    /// Starting vector; defaults to the uniform vector.
    pub start: Option<Vec<f64>>,
}

impl Default for IterationOptions {
    fn default() -> Self {
        IterationOptions {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            shift_delta: DEFAULT_SHIFT_DELTA,
            record_trace: false,
            start: None,
        }
    }
}

/// The outcome of a norm computation.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    /// Certified bounds on the norm of the *input* matrix: the sandwich for
    /// the shifted matrix, corrected by the exact norm of the shift term.
    pub bounds: CertifiedBounds,
    /// `f(x_final)` evaluated on the unshifted input matrix; a true lower
    /// bound on the norm by evaluation.
    pub estimate: f64,
    pub maximizer: UnitVector,
    pub iterations: usize,
    pub converged: bool,
    /// Final `M/m`.
    pub potential_ratio: f64,
    /// `N` of the shifted matrix (reciprocal of its smallest entry).
    pub n_param: f64,
    /// The per-entry shift that was applied.
    pub epsilon: f64,
    /// Max entry of the input matrix (the scale factor removed before
    /// iterating).
    pub scale: f64,
    /// Per-step states; empty unless `record_trace` was set.
    pub trace: Vec<IterationState>,
}

/// Apply the iteration map `S` to a strictly positive vector.
///
/// Output is strictly positive, and `S(λx) = λ^{(p−1)/(q−1)} S(x)`.
pub fn iteration_map(a: &PositiveMatrix, x: &[f64], params: &NormParams) -> Result<Vec<f64>> {
    if !params.is_iteration_range() {
        return Err(Error::InvalidParams(
            "iteration map requires finite 1 < p <= q".into(),
        ));
    }
    let mat = a.base();
    if x.len() != mat.cols() {
        return Err(Error::InvalidInput(format!(
            "vector length {} does not match {} columns",
            x.len(),
            mat.cols()
        )));
    }
    if x.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidInput(
            "iteration map requires a strictly positive vector".into(),
        ));
    }
    let p = params.p();
    let q = params.q();

    let y = mat.matvec(x);
    let y_max = y.iter().fold(0.0_f64, |acc, &v| acc.max(v));
    // Factor y_max out of the inner powers so large p stays in range:
    // (Sx)_i = y_max^{(p−1)/(q−1)} (Σ_k a_ki (y_k/y_max)^{p−1})^{1/(q−1)}.
    let weights: Vec<f64> = y.iter().map(|&v| (v / y_max).powf(p - 1.0)).collect();
    let sums = mat.transpose_matvec(&weights);
    let outer = y_max.powf((p - 1.0) / (q - 1.0));
    let s: Vec<f64> = sums
        .iter()
        .map(|&v| outer * v.powf(1.0 / (q - 1.0)))
        .collect();
    if s.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidInput(
            "iteration map produced a nonpositive coordinate".into(),
        ));
    }
    Ok(s)
}

/// The potentials `m(x) = min_i (Sx)_i/x_i` and `M(x) = max_i (Sx)_i/x_i`
/// at a strictly positive unit vector.
pub fn potentials(a: &PositiveMatrix, x: &UnitVector, params: &NormParams) -> Result<Potentials> {
    let s = iteration_map(a, x.coords(), params)?;
    Ok(ratio_extremes(&s, x.coords()))
}

fn ratio_extremes(s: &[f64], x: &[f64]) -> Potentials {
    let mut min = f64::INFINITY;
    let mut max = 0.0_f64;
    for (si, xi) in s.iter().zip(x) {
        let r = si / xi;
        min = min.min(r);
        max = max.max(r);
    }
    Potentials { min, max }
}

/// Compute `‖A‖_{q↦p}` for a nonnegative matrix with `1 < p <= q`.
///
/// Applies the positivity shift, runs the iteration until `M/m <= 1 + tol`
/// or `max_iter`, and reports certified bounds valid for the input matrix.
/// A run that hits `max_iter` is returned with `converged = false`; its
/// bounds are still valid, just wider than requested.
pub fn compute_norm(
    a: &DenseMatrix,
    params: &NormParams,
    tol: f64,
    max_iter: usize,
) -> Result<ConvergenceReport> {
    compute_norm_with(
        a,
        params,
        &IterationOptions {
            tol,
            max_iter,
            ..IterationOptions::default()
        },
    )
}

pub fn compute_norm_with(
    a: &DenseMatrix,
    params: &NormParams,
    opts: &IterationOptions,
) -> Result<ConvergenceReport> {
    if !params.is_iteration_range() {
        return Err(Error::InvalidParams(format!(
            "the iteration requires finite 1 < p <= q (got p = {}, q = {}); \
             use the oracle paths for other ranges",
            params.p(),
            params.q()
        )));
    }
    if !(opts.tol > 0.0) || !opts.tol.is_finite() {
        return Err(Error::InvalidParams("tolerance must be positive".into()));
    }
    let shifted = positivity_shift(a, opts.shift_delta)?;
    let mat = shifted.base();
    let q = params.q();

    let mut x = match &opts.start {
        Some(v) => {
            if v.iter().any(|&c| !(c > 0.0)) {
                return Err(Error::InvalidInput(
                    "start vector must be strictly positive".into(),
                ));
            }
            UnitVector::normalized(v.clone(), q)?
        }
        None => UnitVector::uniform(mat.cols(), q),
    };
    if x.len() != mat.cols() {
        return Err(Error::InvalidInput(format!(
            "start vector length {} does not match {} columns",
            x.len(),
            mat.cols()
        )));
    }

    let mut trace = Vec::new();
    let mut steps = 0usize;
    let (pots, converged) = loop {
        let s = iteration_map(&shifted, x.coords(), params)?;
        let pots = ratio_extremes(&s, x.coords());
        if opts.record_trace {
            let objective = norm_ratio(mat, x.coords(), params)?;
            trace.push(IterationState {
                x: x.clone(),
                pot_min: pots.min,
                pot_max: pots.max,
                objective,
                iteration: steps,
            });
        }
        if pots.ratio() <= 1.0 + opts.tol {
            break (pots, true);
        }
        if steps >= opts.max_iter {
            break (pots, false);
        }
        x = UnitVector::normalized(s, q)?;
        steps += 1;
    };

    let shifted_bounds = pots.norm_bounds(params);
    let estimate = norm_ratio(a, x.coords(), params)?;

    // Map bounds for the shifted matrix back to the input: with B the
    // max-scaled input, the iteration ran on (B + εJ)/(1+ε), so
    // ‖B + εJ‖ = (1+ε)·‖shifted‖ and ‖B‖ lies within ‖εJ‖ of it.
    let correction = shifted.shift_operator_norm(params);
    let scale = shifted.original_max();
    let grow = 1.0 + shifted.epsilon();
    let lower = (scale * (grow * shifted_bounds.lower - correction))
        .max(0.0)
        .min(estimate);
    let upper = (scale * grow * shifted_bounds.upper).max(estimate);

    Ok(ConvergenceReport {
        bounds: CertifiedBounds {
            lower,
            upper,
            method: BoundsMethod::Sandwich,
        },
        estimate,
        maximizer: x,
        iterations: steps,
        converged,
        potential_ratio: pots.ratio(),
        n_param: shifted.n_param(),
        epsilon: shifted.epsilon(),
        scale,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::lp_norm;

    fn mat(rows: &[Vec<f64>]) -> DenseMatrix {
        DenseMatrix::from_rows(rows).unwrap()
    }

    fn pp(p: f64, q: f64) -> NormParams {
        NormParams::new(p, q).unwrap()
    }

    #[test]
    fn identity_is_a_fixed_direction_for_p_equals_q_two() {
        // With a vanishing shift, S on the identity is A'Ax = x.
        let shifted = positivity_shift(&DenseMatrix::identity(2), 1e-12).unwrap();
        let s = iteration_map(&shifted, &[1.0, 1.0], &pp(2.0, 2.0)).unwrap();
        assert!((s[0] - 1.0).abs() < 1e-9);
        assert!((s[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn all_ones_map_is_transpose_times_product() {
        // Hand evaluation of A'(A1) for the 2x2 all-ones matrix: A1 = (2,2),
        // A'(2,2) = (4,4). (The shift is a no-op here: every entry is already
        // the max.)
        let shifted = positivity_shift(&mat(&[vec![1.0, 1.0], vec![1.0, 1.0]]), 1e-9).unwrap();
        let s = iteration_map(&shifted, &[1.0, 1.0], &pp(2.0, 2.0)).unwrap();
        assert!((s[0] - 4.0).abs() < 1e-12);
        assert!((s[1] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn map_is_homogeneous_of_degree_p_minus_one_over_q_minus_one() {
        let a = positivity_shift(&mat(&[vec![0.9, 0.3], vec![0.2, 0.7]]), 1e-6).unwrap();
        let params = pp(3.0, 5.0);
        let x = [0.4, 1.3];
        let x2: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let s1 = iteration_map(&a, &x, &params).unwrap();
        let s2 = iteration_map(&a, &x2, &params).unwrap();
        let factor = 2.0_f64.powf(2.0 / 4.0);
        for (a, b) in s1.iter().zip(&s2) {
            assert!((b / a - factor).abs() < 1e-12);
        }
    }

    #[test]
    fn map_rejects_nonpositive_vectors() {
        let a = positivity_shift(&DenseMatrix::identity(2), 1e-6).unwrap();
        assert!(iteration_map(&a, &[1.0, 0.0], &pp(2.0, 2.0)).is_err());
        assert!(iteration_map(&a, &[1.0, -1.0], &pp(2.0, 2.0)).is_err());
    }

    #[test]
    fn potentials_collapse_at_the_all_ones_fixed_point() {
        // The uniform vector is the exact maximizer of the all-ones matrix:
        // both potentials equal 4 and the norm bounds collapse to [2, 2].
        let shifted = positivity_shift(&mat(&[vec![1.0, 1.0], vec![1.0, 1.0]]), 1e-9).unwrap();
        let params = pp(2.0, 2.0);
        let x = UnitVector::normalized(vec![1.0, 1.0], 2.0).unwrap();
        let pots = potentials(&shifted, &x, &params).unwrap();
        assert!((pots.min - 4.0).abs() < 1e-12);
        assert!((pots.max - 4.0).abs() < 1e-12);
        let bounds = pots.norm_bounds(&params);
        assert!((bounds.lower - 2.0).abs() < 1e-12);
        assert!((bounds.upper - 2.0).abs() < 1e-12);
    }

    #[test]
    fn potentials_are_ordered() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let a = DenseMatrix::random(3, 4, 0.05, 1.0, &mut rng);
            let shifted = positivity_shift(&a, 1e-6).unwrap();
            let x = UnitVector::normalized(
                (0..4).map(|_| rand::Rng::random_range(&mut rng, 0.1..1.0)).collect(),
                3.0,
            )
            .unwrap();
            let pots = potentials(&shifted, &x, &pp(2.0, 3.0)).unwrap();
            assert!(pots.min <= pots.max);
        }
    }

    #[test]
    fn diagonal_norm_is_top_entry() {
        let a = mat(&[vec![1.0, 0.0], vec![0.0, 2.0]]);
        let report = compute_norm(&a, &pp(2.0, 2.0), 1e-9, 100_000).unwrap();
        assert!(report.converged);
        assert!((report.estimate - 2.0).abs() < 1e-6);
        assert!(report.bounds.contains(2.0));
        // Maximizer concentrates on the second coordinate.
        assert!(report.maximizer.coords()[1] > 0.99);
    }

    #[test]
    fn two_by_two_matches_eigen_value() {
        // Largest singular value of [[1,2],[3,1]] from the characteristic
        // polynomial of A'A: lambda = (15 + sqrt(125)) / 2.
        let expected = ((15.0 + 125.0_f64.sqrt()) / 2.0).sqrt();
        let a = mat(&[vec![1.0, 2.0], vec![3.0, 1.0]]);
        let report = compute_norm(&a, &pp(2.0, 2.0), 1e-10, 100_000).unwrap();
        assert!(report.converged);
        assert!((report.estimate - expected).abs() < 1e-8 * expected);
        assert!(report.bounds.contains(expected));
    }

    #[test]
    fn identity_three_mixed_exponents() {
        // ‖I‖_{3↦2} = max ‖x‖₂/‖x‖₃ = 3^{1/6} at the uniform vector.
        let expected = 3.0_f64.powf(1.0 / 6.0);
        let a = DenseMatrix::identity(3);
        let report = compute_norm(&a, &pp(2.0, 3.0), 1e-9, 100_000).unwrap();
        assert!(report.converged);
        assert!((report.estimate - expected).abs() < 1e-7);
        let c = report.maximizer.coords();
        assert!((c[0] - c[1]).abs() < 1e-5 && (c[1] - c[2]).abs() < 1e-5);
    }

    #[test]
    fn rank_one_matches_holder_closed_form() {
        // For A = uv' the norm is ‖u‖_p·‖v‖_{q′} with maximizer ∝ v^{q′/q}.
        let u = [0.7, 1.3, 0.4];
        let v = [0.9, 0.2, 1.1, 0.5];
        let rows: Vec<Vec<f64>> = u.iter().map(|&ui| v.iter().map(|&vj| ui * vj).collect()).collect();
        let a = mat(&rows);
        let params = pp(2.5, 3.5);
        let qd = params.q_dual();
        let expected = lp_norm(&u, 2.5).unwrap() * lp_norm(&v, qd).unwrap();
        let report = compute_norm(&a, &params, 1e-10, 200_000).unwrap();
        assert!(report.converged);
        assert!((report.estimate - expected).abs() < 1e-8 * expected);

        let direction: Vec<f64> = v.iter().map(|&vj| vj.powf(qd / params.q())).collect();
        let expected_x = UnitVector::normalized(direction, params.q()).unwrap();
        assert!(report.maximizer.l1_distance(&expected_x) < 1e-5);
    }

    #[test]
    fn unconverged_runs_still_carry_valid_bounds() {
        let a = mat(&[vec![1.0, 2.0], vec![3.0, 1.0]]);
        let report = compute_norm(&a, &pp(2.0, 2.0), 1e-12, 1).unwrap();
        assert!(!report.converged);
        let expected = ((15.0 + 125.0_f64.sqrt()) / 2.0).sqrt();
        assert!(report.bounds.lower <= expected && expected <= report.bounds.upper);
    }

    #[test]
    fn invalid_ranges_are_rejected() {
        let a = DenseMatrix::identity(2);
        let bad = NormParams::general(3.0, 2.0).unwrap();
        assert!(matches!(
            compute_norm(&a, &bad, 1e-9, 10),
            Err(Error::InvalidParams(_))
        ));
        let neg = mat(&[vec![1.0, -1.0], vec![0.0, 1.0]]);
        assert!(compute_norm(&neg, &pp(2.0, 2.0), 1e-9, 10).is_err());
    }

    #[test]
    fn report_invariants_hold_on_random_instances() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for trial in 0..25 {
            let r = rng.random_range(1..=5);
            let c = rng.random_range(1..=5);
            let a = DenseMatrix::random(r, c, 0.02, 1.0, &mut rng);
            let p = rng.random_range(1.2..4.0);
            let q = rng.random_range(p..6.0);
            let params = pp(p, q);
            let report = compute_norm(&a, &params, 1e-9, 200_000).unwrap();
            assert!(report.converged, "trial {trial} did not converge");
            assert!(report.potential_ratio <= 1.0 + 1e-9);
            assert!(report.bounds.lower <= report.estimate);
            assert!(report.estimate <= report.bounds.upper);
        }
    }
}
