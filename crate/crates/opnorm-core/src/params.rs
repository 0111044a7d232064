//! Exponent pairs (p, q) for the q↦p operator norm `max ‖Ax‖_p / ‖x‖_q`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parse an exponent from a command line or manifest: a real ≥ 1, or `inf`.
pub fn parse_exponent(s: &str) -> Result<f64> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
        return Ok(f64::INFINITY);
    }
    let v: f64 = t
        .parse()
        .map_err(|_| Error::InvalidParams(format!("cannot parse exponent `{s}`")))?;
    if !(v >= 1.0) {
        return Err(Error::InvalidParams(format!(
            "exponent must be >= 1, got {v}"
        )));
    }
    Ok(v)
}

/// The exponent pair of a q↦p norm problem.
///
/// `p` is the output (numerator) exponent, `q` the input (denominator)
/// exponent. The fixed-point iteration is valid only for finite
/// `1 < p <= q`; the oracle and baseline paths accept any pair with both
/// exponents ≥ 1, including the infinity sentinel (`f64::INFINITY`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormParams {
    p: f64,
    q: f64,
}

impl NormParams {
    /// Exponents in the iteration's validity range: finite, `1 < p <= q`.
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !p.is_finite() || !q.is_finite() {
            return Err(Error::InvalidParams(
                "iteration exponents must be finite".into(),
            ));
        }
        if !(p > 1.0) {
            return Err(Error::InvalidParams(format!(
                "iteration requires p > 1, got p = {p}"
            )));
        }
        if !(q >= p) {
            return Err(Error::InvalidParams(format!(
                "iteration requires q >= p, got p = {p}, q = {q}"
            )));
        }
        Ok(NormParams { p, q })
    }

    /// Any exponent pair with `p, q >= 1`; infinity is allowed in either slot.
    /// Pairs outside the iteration range are usable only by oracle and
    /// baseline paths.
    pub fn general(p: f64, q: f64) -> Result<Self> {
        if p.is_nan() || q.is_nan() || !(p >= 1.0) || !(q >= 1.0) {
            return Err(Error::InvalidParams(format!(
                "exponents must be >= 1, got p = {p}, q = {q}"
            )));
        }
        Ok(NormParams { p, q })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Dual exponent p′ with 1/p + 1/p′ = 1.
    pub fn p_dual(&self) -> f64 {
        dual_exponent(self.p)
    }

    /// Dual exponent q′ with 1/q + 1/q′ = 1.
    pub fn q_dual(&self) -> f64 {
        dual_exponent(self.q)
    }

    /// Whether the pair lies in the fixed-point iteration's validity range.
    pub fn is_iteration_range(&self) -> bool {
        self.p.is_finite() && self.q.is_finite() && self.p > 1.0 && self.q >= self.p
    }

    /// The parameters of the transpose-dual problem: computing ‖A‖_{q↦p}
    /// is equivalent to computing ‖Aᵀ‖_{p′↦q′}, so the dual pair has q′ in
    /// the output role and p′ in the input role. If p <= q then q′ <= p′,
    /// so validity for the iteration is preserved.
    pub fn dual(&self) -> Result<NormParams> {
        if !self.p.is_finite() || !self.q.is_finite() || self.p <= 1.0 || self.q <= 1.0 {
            return Err(Error::InvalidParams(
                "duality requires finite p, q > 1".into(),
            ));
        }
        NormParams::general(self.q_dual(), self.p_dual())
    }
}

fn dual_exponent(p: f64) -> f64 {
    if p.is_infinite() {
        1.0
    } else if p == 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dual_identity_holds() {
        for &(p, q) in &[(1.5, 2.0), (2.0, 2.0), (3.0, 4.0), (1.1, 8.0), (7.0, 50.0)] {
            let params = NormParams::new(p, q).unwrap();
            assert!((1.0 / params.p() + 1.0 / params.p_dual() - 1.0).abs() < 1e-15);
            assert!((1.0 / params.q() + 1.0 / params.q_dual() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn iteration_range_is_gated() {
        assert!(NormParams::new(3.0, 2.0).is_err());
        assert!(NormParams::new(1.0, 2.0).is_err());
        assert!(NormParams::new(2.0, f64::INFINITY).is_err());
        assert!(NormParams::new(2.0, 2.0).unwrap().is_iteration_range());

        let general = NormParams::general(3.0, 2.0).unwrap();
        assert!(!general.is_iteration_range());
        let inf = NormParams::general(3.0, f64::INFINITY).unwrap();
        assert!(!inf.is_iteration_range());
    }

    #[test]
    fn dual_swaps_roles() {
        let params = NormParams::new(3.0, 4.0).unwrap();
        let dual = params.dual().unwrap();
        // Output role gets q' = 4/3, input role gets p' = 3/2.
        assert!((dual.p() - 4.0 / 3.0).abs() < 1e-15);
        assert!((dual.q() - 1.5).abs() < 1e-15);
        assert!(dual.is_iteration_range());
    }

    #[test]
    fn self_dual_at_two() {
        let params = NormParams::new(2.0, 2.0).unwrap();
        let dual = params.dual().unwrap();
        assert_eq!(dual.p(), 2.0);
        assert_eq!(dual.q(), 2.0);
    }

    #[test]
    fn parses_infinity_spelling() {
        assert!(parse_exponent("inf").unwrap().is_infinite());
        assert!(parse_exponent("Infinity").unwrap().is_infinite());
        assert_eq!(parse_exponent("2.5").unwrap(), 2.5);
        assert!(parse_exponent("0.5").is_err());
        assert!(parse_exponent("nope").is_err());
    }
}
