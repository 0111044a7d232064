//! Vector `ℓ_p` norms, the norm ratio objective, and the transpose-duality
//! transform between parameter ranges.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::params::NormParams;

/// `(Σ |v_i|^p)^{1/p}`, or `max |v_i|` when `p` is the infinity sentinel.
///
/// Computed with max-factoring, `v_max · (Σ (|v_i|/v_max)^p)^{1/p}`, so that
/// exponents up to the ~50 range stay clear of overflow.
pub fn lp_norm(v: &[f64], p: f64) -> Result<f64> {
    if p.is_nan() || !(p >= 1.0) {
        return Err(Error::InvalidParams(format!("norm exponent must be >= 1, got {p}")));
    }
    let mut vmax = 0.0_f64;
    for &x in v {
        if !x.is_finite() {
            return Err(Error::InvalidInput("non-finite vector entry".into()));
        }
        vmax = vmax.max(x.abs());
    }
    if vmax == 0.0 || p.is_infinite() {
        return Ok(vmax);
    }
    if p == 1.0 {
        return Ok(v.iter().map(|x| x.abs()).sum());
    }
    if p == 2.0 {
        let s: f64 = v.iter().map(|x| (x / vmax) * (x / vmax)).sum();
        return Ok(vmax * s.sqrt());
    }
    let s: f64 = v.iter().map(|x| (x.abs() / vmax).powf(p)).sum();
    Ok(vmax * s.powf(1.0 / p))
}

/// The objective `f(x) = ‖Ax‖_p / ‖x‖_q`. Scale-invariant in `x`; defined
/// for any sign pattern of `A` and `x`.
pub fn norm_ratio(a: &DenseMatrix, x: &[f64], params: &NormParams) -> Result<f64> {
    if x.len() != a.cols() {
        return Err(Error::InvalidInput(format!(
            "vector length {} does not match {} columns",
            x.len(),
            a.cols()
        )));
    }
    let denom = lp_norm(x, params.q())?;
    if denom == 0.0 {
        return Err(Error::InvalidInput(
            "norm ratio is undefined at the zero vector".into(),
        ));
    }
    Ok(lp_norm(&a.matvec(x), params.p())? / denom)
}

/// Transpose duality: `‖A‖_{q↦p} = ‖Aᵀ‖_{p′↦q′}`. Returns the transposed
/// matrix together with the dual parameter pair (q′ in the output role, p′
/// in the input role), which stays inside the iteration range whenever the
/// input pair was.
pub fn dualize(a: &DenseMatrix, params: &NormParams) -> Result<(DenseMatrix, NormParams)> {
    Ok((a.transpose(), params.dual()?))
}
