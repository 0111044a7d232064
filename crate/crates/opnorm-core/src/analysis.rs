//! First- and second-order verification machinery for the norm objective:
//! analytic gradient, critical-point residuals, the Hessian as a quadratic
//! form, and an empirical probe of the stability of the maximizer.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, PositiveMatrix, UnitVector};
use crate::norms::{lp_norm, norm_ratio};
use crate::params::NormParams;

/// Relative residual above which a point is rejected as non-critical by
/// [`hessian_quadratic_form`]. A converged iteration lands many orders of
/// magnitude below this.
const RESIDUAL_GATE: f64 = 1e-4;

/// Analytic gradient of `f(x) = ‖Ax‖_p/‖x‖_q` at a strictly positive point:
///
/// `∂f/∂x_i = f(x)·(Σ_k (A_k x)^{p−1} a_ki / ‖Ax‖_p^p − x_i^{q−1} / ‖x‖_q^q)`.
pub fn gradient(a: &DenseMatrix, x: &[f64], params: &NormParams) -> Result<Vec<f64>> {
    check_positive(a, x)?;
    let p = params.p();
    let q = params.q();
    let y = a.matvec(x);
    let np = lp_norm(&y, p)?;
    let nq = lp_norm(x, q)?;
    let f = np / nq;
    // (A_k x)^{p−1} / ‖Ax‖_p^p  ==  ((A_k x)/‖Ax‖_p)^{p−1} / ‖Ax‖_p
    let wy: Vec<f64> = y.iter().map(|&v| (v / np).powf(p - 1.0)).collect();
    let lhs = a.transpose_matvec(&wy);
    Ok(x.iter()
        .enumerate()
        .map(|(i, &xi)| f * (lhs[i] / np - (xi / nq).powf(q - 1.0) / nq))
        .collect())
}

/// Max over coordinates of the defect in the critical-point equation
/// `x_i^{q−1} = (‖x‖_q^q / ‖Ax‖_p^p) · Σ_k a_ki (A_k x)^{p−1}`.
pub fn critical_residual(a: &DenseMatrix, x: &[f64], params: &NormParams) -> Result<f64> {
    check_positive(a, x)?;
    let p = params.p();
    let q = params.q();
    let y = a.matvec(x);
    let np = lp_norm(&y, p)?;
    let nq = lp_norm(x, q)?;
    let wy: Vec<f64> = y.iter().map(|&v| v.powf(p - 1.0)).collect();
    let sums = a.transpose_matvec(&wy);
    let factor = nq.powf(q) / np.powf(p);
    let mut worst = 0.0_f64;
    for (i, &xi) in x.iter().enumerate() {
        let defect = (xi.powf(q - 1.0) - factor * sums[i]).abs();
        worst = worst.max(defect);
    }
    Ok(worst)
}

/// The Hessian of `f` at a critical point `z`, applied as a quadratic form
/// to a direction.
///
/// The point is normalized internally to `‖z‖_q = 1` and the matrix scaled
/// so `‖Az‖_p = 1`; under those normalizations the form splits as `T₁ + T₂`
/// with
///
/// `T₁ = p(p−1)·(Σ_k (A_k z)^{p−2} (A_k ε)² − Σ_i z_i^{q−2} ε_i²)`
/// `T₂ = p(q−p)·((Σ_i z_i^{q−1} ε_i)² − Σ_i z_i^{q−2} ε_i²)`,
///
/// both nonpositive for `p <= q`, which is what makes every critical point a
/// local maximum. Returns an error when `z` fails the critical-point
/// residual gate.
pub fn hessian_quadratic_form(
    a: &DenseMatrix,
    z: &[f64],
    direction: &[f64],
    params: &NormParams,
) -> Result<f64> {
    let (t1, t2) = hessian_form_terms(a, z, direction, params)?;
    Ok(t1 + t2)
}

/// The two summands of the quadratic form. `T₂` carries the `(q−p)` factor
/// and is nonpositive on its own whenever `q >= p` (its bracket is a
/// Cauchy-Schwarz defect); `T₁` is nonpositive at any critical point.
pub fn hessian_form_terms(
    a: &DenseMatrix,
    z: &[f64],
    direction: &[f64],
    params: &NormParams,
) -> Result<(f64, f64)> {
    check_positive(a, z)?;
    if direction.len() != z.len() {
        return Err(Error::InvalidInput("direction length mismatch".into()));
    }
    let p = params.p();
    let q = params.q();

    // Normalize: unit z in q-norm, then unit Az in p-norm via matrix scaling.
    let nq = lp_norm(z, q)?;
    let z: Vec<f64> = z.iter().map(|v| v / nq).collect();
    let y = a.matvec(&z);
    let np = lp_norm(&y, p)?;
    if np == 0.0 {
        return Err(Error::InvalidInput("Az vanishes".into()));
    }
    let a = a.scaled(1.0 / np);
    let y: Vec<f64> = y.iter().map(|v| v / np).collect();

    let scale = z
        .iter()
        .fold(0.0_f64, |acc, &zi| acc.max(zi.powf(q - 1.0)));
    let residual = critical_residual(&a, &z, params)?;
    if residual > RESIDUAL_GATE * scale {
        return Err(Error::InvalidInput(format!(
            "point is not critical: residual {residual:.3e} exceeds the gate"
        )));
    }

    let a_eps = a.matvec(direction);
    let curvature: f64 = y
        .iter()
        .zip(&a_eps)
        .map(|(&yk, &ak)| yk.powf(p - 2.0) * ak * ak)
        .sum();
    let weighted_sq: f64 = z
        .iter()
        .zip(direction)
        .map(|(&zi, &ei)| zi.powf(q - 2.0) * ei * ei)
        .sum();
    let projection: f64 = z
        .iter()
        .zip(direction)
        .map(|(&zi, &ei)| zi.powf(q - 1.0) * ei)
        .sum();

    let t1 = p * (p - 1.0) * (curvature - weighted_sq);
    let t2 = p * (q - p) * (projection * projection - weighted_sq);
    Ok((t1, t2))
}

/// Summary of first- and second-order optimality at a candidate maximizer.
#[derive(Debug, Clone)]
pub struct CriticalityReport {
    /// `‖∇f‖_∞` at the point.
    pub grad_norm: f64,
    /// Max defect of the critical-point equation.
    pub residual: f64,
    /// Largest Hessian quadratic form over the sampled directions.
    pub hessian_max_quadform: f64,
}

/// Evaluate gradient, residual, and the Hessian form over `directions`
/// random directions (seeded, deterministic).
pub fn assess_criticality(
    a: &DenseMatrix,
    x: &[f64],
    params: &NormParams,
    directions: usize,
    seed: u64,
) -> Result<CriticalityReport> {
    let grad = gradient(a, x, params)?;
    let grad_norm = grad.iter().fold(0.0_f64, |acc, g| acc.max(g.abs()));
    let residual = critical_residual(a, x, params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..directions {
        let dir: Vec<f64> = (0..x.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        if dir.iter().all(|&d| d == 0.0) {
            continue;
        }
        worst = worst.max(hessian_quadratic_form(a, x, &dir, params)?);
    }
    Ok(CriticalityReport {
        grad_norm,
        residual,
        hessian_max_quadform: worst,
    })
}

/// Outcome of sampling the objective on a shell at ℓ₁ distance `delta`
/// around a reported maximizer.
#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub delta: f64,
    pub trials: usize,
    /// Smallest and largest observed `f(x*) − f(x)` over the shell.
    pub min_gap: f64,
    pub max_gap: f64,
    /// Whether every sample satisfied `f(x) <= f(x*)·(1 − δ²/(Nn)⁶)`.
    pub all_within_bound: bool,
    /// Whether every sample was strictly below `f(x*)`.
    pub all_strictly_below: bool,
    /// The factor `1 − δ²/(Nn)⁶` the bound check used.
    pub bound_factor: f64,
}

/// Probe the stability claim around a maximizer: sample unit-q points at ℓ₁
/// distance `delta` from `xstar` and compare `f` against
/// `f(x*)·(1 − δ²/(Nn)⁶)`. Only `p = q` is covered by the claim, so other
/// pairs are rejected. Report-only: no assertion is made here.
pub fn stability_probe(
    a: &PositiveMatrix,
    xstar: &UnitVector,
    delta: f64,
    trials: usize,
    params: &NormParams,
    seed: u64,
) -> Result<StabilityReport> {
    if params.p() != params.q() {
        return Err(Error::InvalidParams(
            "the stability probe covers only p = q".into(),
        ));
    }
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::InvalidParams("delta must be nonnegative".into()));
    }
    let mat = a.base();
    let q = params.q();
    let n = mat.cols() as f64;
    let nn = a.n_param() * n;
    let bound_factor = (1.0 - delta * delta / nn.powi(6)).max(0.0);
    let f_star = norm_ratio(mat, xstar.coords(), params)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_gap = f64::INFINITY;
    let mut max_gap = f64::NEG_INFINITY;
    let mut all_within = true;
    let mut all_below = true;
    let mut done = 0usize;

    if delta == 0.0 {
        return Ok(StabilityReport {
            delta,
            trials,
            min_gap: 0.0,
            max_gap: 0.0,
            all_within_bound: true,
            all_strictly_below: false,
            bound_factor,
        });
    }

    let mut attempts = 0usize;
    while done < trials && attempts < trials * 20 {
        attempts += 1;
        let dir: Vec<f64> = (0..xstar.len())
            .map(|_| rng.random_range(-1.0..1.0_f64))
            .collect();
        if dir.iter().all(|&d| d == 0.0) {
            continue;
        }
        match point_at_l1_distance(xstar, &dir, delta, q) {
            Some(x) => {
                let f = norm_ratio(mat, x.coords(), params)?;
                let gap = f_star - f;
                min_gap = min_gap.min(gap);
                max_gap = max_gap.max(gap);
                if f > f_star * bound_factor {
                    all_within = false;
                }
                if f >= f_star {
                    all_below = false;
                }
                done += 1;
            }
            None => continue,
        }
    }
    if done == 0 {
        return Err(Error::InvalidInput(
            "could not construct any sample at the requested distance".into(),
        ));
    }

    Ok(StabilityReport {
        delta,
        trials: done,
        min_gap,
        max_gap,
        all_within_bound: all_within,
        all_strictly_below: all_below,
        bound_factor,
    })
}

/// Bisect a step along `dir` (renormalized to the unit q-sphere) until the
/// ℓ₁ distance from `xstar` equals `delta`. Returns None when the direction
/// leaves the nonnegative orthant before reaching the target distance.
fn point_at_l1_distance(
    xstar: &UnitVector,
    dir: &[f64],
    delta: f64,
    q: f64,
) -> Option<UnitVector> {
    let place = |t: f64| -> Option<UnitVector> {
        let cand: Vec<f64> = xstar
            .coords()
            .iter()
            .zip(dir)
            .map(|(x, d)| x + t * d)
            .collect();
        if cand.iter().any(|&c| c < 0.0) {
            return None;
        }
        UnitVector::normalized(cand, q).ok()
    };
    let dist = |x: &UnitVector| x.l1_distance(xstar);

    // Expand until the shell is crossed.
    let mut hi = delta.max(1e-12);
    let mut x_hi = place(hi)?;
    let mut grow = 0;
    while dist(&x_hi) < delta {
        hi *= 2.0;
        x_hi = place(hi)?;
        grow += 1;
        if grow > 200 {
            return None;
        }
    }
    let mut lo = 0.0_f64;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let x_mid = place(mid)?;
        if dist(&x_mid) < delta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = place(hi)?;
    let err = (dist(&x) - delta).abs();
    if err <= delta * 1e-6 {
        Some(x)
    } else {
        None
    }
}

fn check_positive(a: &DenseMatrix, x: &[f64]) -> Result<()> {
    if x.len() != a.cols() {
        return Err(Error::InvalidInput(format!(
            "vector length {} does not match {} columns",
            x.len(),
            a.cols()
        )));
    }
    if x.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidInput(
            "point must be strictly positive".into(),
        ));
    }
    Ok(())
}
