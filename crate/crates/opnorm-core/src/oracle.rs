//! Independent ground truth at desk scale: multistart projected-gradient
//! search over the q-sphere, exact sign enumeration for ∞↦p norms, and the
//! interpolation baseline built from the exactly computable 1, 2 and ∞
//! anchors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::{BoundsMethod, CertifiedBounds};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::norms::{lp_norm, norm_ratio};
use crate::params::NormParams;

pub const DEFAULT_RESTARTS: usize = 32;

const ASCENT_MAX_ITERS: usize = 6_000;
const SIGN_ENUM_MAX_COLUMNS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMethod {
    /// Projected-gradient ascent from random restarts.
    Multistart,
    /// Exhaustive enumeration of sign patterns.
    SignEnumeration,
}

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub value: f64,
    pub witness: Vec<f64>,
    pub method: OracleMethod,
    /// True when every candidate was examined, so the value is exact rather
    /// than a best-found lower bound.
    pub exhaustive: bool,
}

/// Best value of `‖Ax‖_p/‖x‖_q` found by projected-gradient ascent on the
/// q-sphere from `restarts` random starts. Deterministic for a given seed.
/// Any sign pattern of `A` is allowed; for nonnegative matrices the search
/// is folded into the nonnegative orthant, where the maximizer is known to
/// live.
pub fn brute_norm(
    a: &DenseMatrix,
    params: &NormParams,
    restarts: usize,
    seed: u64,
) -> Result<OracleResult> {
    brute_norm_seeded(a, params, restarts, seed, &[])
}

/// [`brute_norm`] with extra caller-supplied starting vectors searched in
/// addition to the random restarts.
pub fn brute_norm_seeded(
    a: &DenseMatrix,
    params: &NormParams,
    restarts: usize,
    seed: u64,
    extra_starts: &[Vec<f64>],
) -> Result<OracleResult> {
    if !params.p().is_finite() || !params.q().is_finite() {
        return Err(Error::InvalidParams(
            "the multistart oracle needs finite exponents; use sign enumeration for q = inf".into(),
        ));
    }
    if restarts == 0 && extra_starts.is_empty() {
        return Err(Error::InvalidParams("need at least one start".into()));
    }
    let n = a.cols();
    let nonneg = a.is_nonnegative();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut best_val = f64::NEG_INFINITY;
    let mut best_x = vec![0.0; n];
    let mut consider = |x0: Vec<f64>| -> Result<()> {
        let (val, x) = ascend(a, params, x0, nonneg)?;
        if val > best_val {
            best_val = val;
            best_x = x;
        }
        Ok(())
    };

    for r in 0..restarts {
        let x0: Vec<f64> = if r == 0 {
            vec![1.0; n]
        } else {
            (0..n)
                .map(|_| {
                    let g = standard_normal(&mut rng);
                    if nonneg {
                        g.abs().max(1e-6)
                    } else {
                        g
                    }
                })
                .collect()
        };
        consider(x0)?;
    }
    for s in extra_starts {
        if s.len() == n && s.iter().any(|&v| v != 0.0) {
            consider(s.clone())?;
        }
    }

    Ok(OracleResult {
        value: best_val,
        witness: best_x,
        method: OracleMethod::Multistart,
        exhaustive: false,
    })
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller from two uniforms.
    let u1: f64 = rng.random::<f64>().max(1e-15);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Gradient of `f(x) = ‖Ax‖_p/‖x‖_q` for arbitrary sign patterns.
fn ratio_gradient(a: &DenseMatrix, x: &[f64], p: f64, q: f64, np: f64, nq: f64, y: &[f64]) -> Vec<f64> {
    let f = np / nq;
    // Σ_k a_ki sgn(y_k) |y_k|^{p−1} / ‖y‖_p^p, with |y|/‖y‖ factored to stay
    // in range for large p.
    let wy: Vec<f64> = y
        .iter()
        .map(|&v| v.signum() * (v.abs() / np).powf(p - 1.0))
        .collect();
    let lhs = a.transpose_matvec(&wy);
    x.iter()
        .enumerate()
        .map(|(i, &xi)| {
            let rhs = xi.signum() * (xi.abs() / nq).powf(q - 1.0);
            f * (lhs[i] / np - rhs / nq)
        })
        .collect()
}

fn normalize_q(x: &mut [f64], q: f64) -> Result<f64> {
    let n = lp_norm(x, q)?;
    if n == 0.0 {
        return Err(Error::InvalidInput("zero vector in ascent".into()));
    }
    for v in x.iter_mut() {
        *v /= n;
    }
    Ok(n)
}

/// Gradient ascent with renormalization and a doubling/halving step search.
fn ascend(
    a: &DenseMatrix,
    params: &NormParams,
    mut x: Vec<f64>,
    clamp_nonneg: bool,
) -> Result<(f64, Vec<f64>)> {
    let p = params.p();
    let q = params.q();
    if clamp_nonneg {
        for v in x.iter_mut() {
            *v = v.abs();
        }
    }
    normalize_q(&mut x, q)?;
    let mut fx = norm_ratio(a, &x, params)?;
    let mut step = 0.25_f64;
    let mut stalls = 0usize;

    for _ in 0..ASCENT_MAX_ITERS {
        let y = a.matvec(&x);
        let np = lp_norm(&y, p)?;
        let nq = 1.0; // x is q-normalized
        if np == 0.0 {
            break;
        }
        let g = ratio_gradient(a, &x, p, q, np, nq, &y);
        let gmax = g.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
        if gmax <= 1e-16 * fx.max(1.0) {
            break;
        }

        let mut improved = false;
        while step > 1e-18 {
            let mut cand: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi + step * gi).collect();
            if clamp_nonneg {
                for v in cand.iter_mut() {
                    *v = v.abs();
                }
            }
            if normalize_q(&mut cand, q).is_err() {
                step *= 0.5;
                continue;
            }
            let fc = norm_ratio(a, &cand, params)?;
            if fc > fx {
                x = cand;
                fx = fc;
                step = (step * 2.0).min(1e4);
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if improved {
            stalls = 0;
        } else {
            stalls += 1;
            if stalls >= 2 {
                break;
            }
            step = 0.25;
        }
    }
    Ok((fx, x))
}

/// Exact `max over x in {−1,+1}^n of ‖Σ_i x_i v_i‖_p`: the ∞↦p norm of the
/// matrix whose columns are the given vectors. Enumerates all sign patterns
/// with a Gray-code walk (the global sign is fixed, halving the work).
pub fn longest_vector(columns: &[Vec<f64>], p: f64) -> Result<OracleResult> {
    let n = columns.len();
    if n == 0 {
        return Err(Error::InvalidInput("no columns given".into()));
    }
    if n > SIGN_ENUM_MAX_COLUMNS {
        return Err(Error::SizeLimit(format!(
            "sign enumeration handles at most {SIGN_ENUM_MAX_COLUMNS} columns, got {n}"
        )));
    }
    let m = columns[0].len();
    if columns.iter().any(|c| c.len() != m) {
        return Err(Error::InvalidInput("columns have mismatched lengths".into()));
    }

    let mut signs = vec![1.0_f64; n];
    let mut sum = vec![0.0_f64; m];
    for c in columns {
        for (s, v) in sum.iter_mut().zip(c) {
            *s += v;
        }
    }
    let mut best = lp_norm(&sum, p)?;
    let mut best_signs = signs.clone();

    let total: u64 = 1 << (n - 1);
    for g in 1..total {
        // Gray code: consecutive patterns differ in exactly one sign, so the
        // running sum is updated in O(m).
        let flip = g.trailing_zeros() as usize + 1;
        signs[flip] = -signs[flip];
        for (s, v) in sum.iter_mut().zip(&columns[flip]) {
            *s += 2.0 * signs[flip] * v;
        }
        let val = lp_norm(&sum, p)?;
        if val > best {
            best = val;
            best_signs.copy_from_slice(&signs);
        }
    }

    Ok(OracleResult {
        value: best,
        witness: best_signs,
        method: OracleMethod::SignEnumeration,
        exhaustive: true,
    })
}

/// Largest singular value and the corresponding right singular vector, by
/// power iteration on `AᵀA` driven to a 1e-13 relative stationarity.
pub fn power_method_top_singular(a: &DenseMatrix) -> (f64, Vec<f64>) {
    let n = a.cols();
    // A ramp start avoids being orthogonal to the top singular vector for
    // sign-structured matrices.
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64) * 1e-3).collect();
    let nv = lp_norm(&v, 2.0).expect("finite start");
    v.iter_mut().for_each(|x| *x /= nv);

    let mut sigma = 0.0_f64;
    for _ in 0..100_000 {
        let w = a.matvec(&v);
        let u = a.transpose_matvec(&w);
        let norm = lp_norm(&u, 2.0).expect("finite iterate");
        if norm == 0.0 {
            return (0.0, v);
        }
        v = u.into_iter().map(|x| x / norm).collect();
        let s = lp_norm(&a.matvec(&v), 2.0).expect("finite iterate");
        if (s - sigma).abs() <= 1e-13 * s.max(f64::MIN_POSITIVE) {
            return (s, v);
        }
        sigma = s;
    }
    (sigma, v)
}

/// Interpolation baseline for the p↦p norm of an arbitrary matrix.
///
/// Lower bound: the ratio at the best of the three exact maximizers (the
/// basis vector of the heaviest column for ℓ₁, the top singular vector for
/// ℓ₂, the row-sign vector of the heaviest row for ℓ∞). Upper bound:
/// two-segment interpolation between anchors (1,2) for p <= 2 and (2,∞)
/// for p >= 2. The gap between the two is at most `n^{1/4}`.
pub fn interpolation_estimate(a: &DenseMatrix, p: f64) -> Result<CertifiedBounds> {
    if p.is_nan() || !(p >= 1.0) {
        return Err(Error::InvalidParams(format!("exponent must be >= 1, got {p}")));
    }

    // Exactly computable anchors.
    let mut best_col = 0usize;
    let mut norm1 = 0.0_f64;
    for j in 0..a.cols() {
        let s: f64 = (0..a.rows()).map(|i| a.get(i, j).abs()).sum();
        if s > norm1 {
            norm1 = s;
            best_col = j;
        }
    }
    let mut best_row = 0usize;
    let mut norm_inf = 0.0_f64;
    for i in 0..a.rows() {
        let s: f64 = a.row(i).iter().map(|v| v.abs()).sum();
        if s > norm_inf {
            norm_inf = s;
            best_row = i;
        }
    }
    let (norm2, singular_vec) = power_method_top_singular(a);

    let upper = if p == 1.0 {
        norm1
    } else if p == 2.0 {
        norm2
    } else if p.is_infinite() {
        norm_inf
    } else if p < 2.0 {
        // 1/p = (1-t)/1 + t/2  =>  t = 2(1 - 1/p)
        let t = 2.0 * (1.0 - 1.0 / p);
        norm1.powf(1.0 - t) * norm2.powf(t)
    } else {
        // 1/p = (1-t)/2  =>  t = 1 - 2/p
        let t = 1.0 - 2.0 / p;
        norm2.powf(1.0 - t) * norm_inf.powf(t)
    };

    let params = NormParams::general(p, p)?;
    let mut candidates: Vec<Vec<f64>> = Vec::new();
    let mut e = vec![0.0; a.cols()];
    e[best_col] = 1.0;
    candidates.push(e);
    candidates.push(singular_vec);
    candidates.push(
        a.row(best_row)
            .iter()
            .map(|&v| if v < 0.0 { -1.0 } else { 1.0 })
            .collect(),
    );
    let mut lower = 0.0_f64;
    for c in &candidates {
        if c.iter().all(|&v| v == 0.0) {
            continue;
        }
        lower = lower.max(norm_ratio(a, c, &params)?);
    }

    Ok(CertifiedBounds {
        lower: lower.min(upper),
        upper: upper.max(lower),
        method: BoundsMethod::Interpolation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[Vec<f64>]) -> DenseMatrix {
        DenseMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn diagonal_norm() {
        let a = mat(&[vec![1.0, 0.0], vec![0.0, 2.0]]);
        let params = NormParams::new(2.0, 2.0).unwrap();
        let r = brute_norm(&a, &params, 8, 0).unwrap();
        assert!((r.value - 2.0).abs() < 1e-9);
        assert!(!r.exhaustive);
    }

    #[test]
    fn matches_eigen_value_on_two_by_two() {
        let expected = ((15.0 + 125.0_f64.sqrt()) / 2.0).sqrt();
        let a = mat(&[vec![1.0, 2.0], vec![3.0, 1.0]]);
        let params = NormParams::new(2.0, 2.0).unwrap();
        let r = brute_norm(&a, &params, 8, 1).unwrap();
        assert!((r.value - expected).abs() < 1e-8 * expected);
    }

    #[test]
    fn witness_reproduces_value() {
        let a = mat(&[vec![0.4, 1.2, 0.1], vec![0.8, 0.3, 0.9]]);
        let params = NormParams::new(2.2, 3.7).unwrap();
        let r = brute_norm(&a, &params, 16, 3).unwrap();
        let again = norm_ratio(&a, &r.witness, &params).unwrap();
        assert!((again - r.value).abs() <= 1e-10 * r.value);
    }

    #[test]
    fn is_deterministic_for_a_seed() {
        let a = mat(&[vec![0.5, -1.2], vec![0.7, 0.4], vec![-0.9, 0.2]]);
        let params = NormParams::general(3.0, 2.0).unwrap();
        let r1 = brute_norm(&a, &params, 12, 9).unwrap();
        let r2 = brute_norm(&a, &params, 12, 9).unwrap();
        assert_eq!(r1.value, r2.value);
        assert_eq!(r1.witness, r2.witness);
    }

    #[test]
    fn sign_enumeration_on_orthogonal_columns() {
        let cols = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let r = longest_vector(&cols, 2.0).unwrap();
        assert!((r.value - 2.0_f64.sqrt()).abs() < 1e-12);
        assert!(r.exhaustive);
        assert_eq!(r.witness.len(), 2);
    }

    #[test]
    fn sign_enumeration_three_columns_cubic() {
        // Columns (1,0), (0,1), (1,1): the all-plus pattern reaches (2,2),
        // so the value is ‖(2,2)‖₃ = 2·2^{1/3}.
        let cols = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        let r = longest_vector(&cols, 3.0).unwrap();
        let expected = 2.0 * 2.0_f64.powf(1.0 / 3.0);
        assert!((r.value - expected).abs() < 1e-12);
    }

    #[test]
    fn antipodal_pair_doubles() {
        let v = vec![0.3, -0.7, 1.1];
        let neg: Vec<f64> = v.iter().map(|x| -x).collect();
        for p in [1.0, 2.5, 7.0] {
            let r = longest_vector(&[v.clone(), neg.clone()], p).unwrap();
            let expected = 2.0 * lp_norm(&v, p).unwrap();
            assert!((r.value - expected).abs() < 1e-12 * expected);
            // The witness must use opposite signs on the pair.
            assert!(r.witness[0] * r.witness[1] < 0.0);
        }
    }

    #[test]
    fn sign_enumeration_caps_size() {
        let cols = vec![vec![1.0]; 25];
        assert!(matches!(longest_vector(&cols, 2.0), Err(Error::SizeLimit(_))));
    }

    #[test]
    fn power_method_matches_closed_form() {
        let a = mat(&[vec![1.0, 2.0], vec![3.0, 1.0]]);
        let (sigma, _) = power_method_top_singular(&a);
        let expected = ((15.0 + 125.0_f64.sqrt()) / 2.0).sqrt();
        assert!((sigma - expected).abs() < 1e-10 * expected);
    }

    #[test]
    fn interpolation_collapses_at_anchors() {
        let a = mat(&[vec![1.0, -2.0], vec![0.5, 1.5]]);
        let b2 = interpolation_estimate(&a, 2.0).unwrap();
        assert!((b2.upper - b2.lower).abs() < 1e-9 * b2.upper);
        let b1 = interpolation_estimate(&a, 1.0).unwrap();
        assert!((b1.upper - 3.5).abs() < 1e-12);
        assert!((b1.upper - b1.lower).abs() < 1e-9 * b1.upper);
    }

    #[test]
    fn interpolation_on_identity_is_tight() {
        let a = DenseMatrix::identity(5);
        for p in [1.0, 1.7, 2.0, 3.0, 10.0, f64::INFINITY] {
            let b = interpolation_estimate(&a, p).unwrap();
            assert!((b.lower - 1.0).abs() < 1e-9, "p = {p}");
            assert!((b.upper - 1.0).abs() < 1e-9, "p = {p}");
        }
    }

    #[test]
    fn interpolation_brackets_the_oracle() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let a = DenseMatrix::random(4, 4, -1.0, 1.0, &mut rng);
            for p in [1.4, 3.0, 4.0] {
                let b = interpolation_estimate(&a, p).unwrap();
                let params = NormParams::general(p, p).unwrap();
                let r = brute_norm(&a, &params, 24, 5).unwrap();
                assert!(b.lower <= r.value * (1.0 + 1e-9));
                assert!(r.value <= b.upper * (1.0 + 1e-9));
            }
        }
    }
}
