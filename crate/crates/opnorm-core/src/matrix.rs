//! Dense matrices, q-normalized vectors, and the positivity shift that puts a
//! nonnegative matrix into the `[1/N, 1]` entry range the iteration needs.

use rand::Rng;

use crate::error::{Error, Result};
use crate::norms::lp_norm;
use crate::params::NormParams;

/// Default perturbation budget for [`positivity_shift`]. Keeps the
/// shift-induced relative error on the norm below typical convergence
/// tolerances.
pub const DEFAULT_SHIFT_DELTA: f64 = 1e-6;

/// A dense real matrix in row-major storage. Entries are always finite.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInput(
                "matrix dimensions must be positive".into(),
            ));
        }
        if entries.len() != rows * cols {
            return Err(Error::InvalidInput(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if entries.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidInput("matrix entries must be finite".into()));
        }
        Ok(DenseMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidInput("matrix has no rows".into()));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidInput("ragged rows".into()));
        }
        DenseMatrix::new(rows.len(), cols, rows.concat())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            entries: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// A matrix with entries drawn uniformly from `[lo, hi)`.
    pub fn random(rows: usize, cols: usize, lo: f64, hi: f64, rng: &mut impl Rng) -> Self {
        let entries = (0..rows * cols)
            .map(|_| rng.random_range(lo..hi))
            .collect();
        DenseMatrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.entries[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "matvec dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `Aᵀ y` without materializing the transpose.
    pub fn transpose_matvec(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.rows, "transpose_matvec dimension mismatch");
        let mut out = vec![0.0; self.cols];
        for (i, &yi) in y.iter().enumerate() {
            if yi == 0.0 {
                continue;
            }
            for (j, &a) in self.row(i).iter().enumerate() {
                out[j] += a * yi;
            }
        }
        out
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut t = DenseMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn scaled(&self, c: f64) -> DenseMatrix {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e * c).collect(),
        }
    }

    pub fn scale_column(&mut self, j: usize, c: f64) {
        for i in 0..self.rows {
            let v = self.get(i, j);
            self.set(i, j, v * c);
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |acc, e| acc.max(e.abs()))
    }

    pub fn min_entry(&self) -> f64 {
        self.entries
            .iter()
            .fold(f64::INFINITY, |acc, &e| acc.min(e))
    }

    pub fn is_nonnegative(&self) -> bool {
        self.entries.iter().all(|&e| e >= 0.0)
    }
}

/// A nonnegative vector on the unit sphere of the `ℓ_q` norm.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVector {
    coords: Vec<f64>,
    norm_exponent: f64,
}

impl UnitVector {
    /// Normalize a nonnegative, nonzero vector onto the unit q-sphere.
    pub fn normalized(coords: Vec<f64>, q: f64) -> Result<Self> {
        if coords.iter().any(|&c| !(c >= 0.0) || !c.is_finite()) {
            return Err(Error::InvalidInput(
                "unit vector coordinates must be nonnegative and finite".into(),
            ));
        }
        let norm = lp_norm(&coords, q)?;
        if norm == 0.0 {
            return Err(Error::InvalidInput("cannot normalize the zero vector".into()));
        }
        let coords = coords.into_iter().map(|c| c / norm).collect();
        Ok(UnitVector {
            coords,
            norm_exponent: q,
        })
    }

    /// The uniform vector `1 / ‖1‖_q`.
    pub fn uniform(n: usize, q: f64) -> Self {
        let c = if q.is_finite() {
            (n as f64).powf(-1.0 / q)
        } else {
            1.0
        };
        UnitVector {
            coords: vec![c; n],
            norm_exponent: q,
        }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn norm_exponent(&self) -> f64 {
        self.norm_exponent
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.coords.iter().all(|&c| c > 0.0)
    }

    pub fn l1_distance(&self, other: &UnitVector) -> f64 {
        self.coords
            .iter()
            .zip(other.coords.iter())
            .map(|(a, b)| (a - b).abs())
            .sum()
    }
}

/// A max-scaled, shifted matrix with entries in `[1/N, 1]` and max entry
/// exactly 1. `N` is the reciprocal of the smallest entry.
#[derive(Debug, Clone)]
pub struct PositiveMatrix {
    base: DenseMatrix,
    n_param: f64,
    original_max: f64,
    epsilon: f64,
    shift_applied: bool,
}

impl PositiveMatrix {
    /// Wrap a strictly positive matrix without shifting: the matrix is
    /// max-scaled to 1 and `N` is read off its smallest entry.
    pub fn from_positive(a: &DenseMatrix) -> Result<Self> {
        if a.min_entry() <= 0.0 {
            return Err(Error::InvalidInput(
                "matrix must have strictly positive entries".into(),
            ));
        }
        let max = a.max_abs();
        let base = a.scaled(1.0 / max);
        let n_param = 1.0 / base.min_entry();
        Ok(PositiveMatrix {
            base,
            n_param,
            original_max: max,
            epsilon: 0.0,
            shift_applied: false,
        })
    }

    /// The scaled, shifted matrix the iteration actually runs on.
    pub fn base(&self) -> &DenseMatrix {
        &self.base
    }

    /// `N`: reciprocal of the smallest entry.
    pub fn n_param(&self) -> f64 {
        self.n_param
    }

    /// The max entry of the input matrix; the scale factor that maps norms
    /// of `base` times `(1 + epsilon)` back to norms of the input.
    pub fn original_max(&self) -> f64 {
        self.original_max
    }

    /// The per-entry shift applied after max-scaling.
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn shift_applied(&self) -> bool {
        self.shift_applied
    }

    /// The exact q↦p operator norm of the all-ε matrix that was added:
    /// `ε · rows^{1/p} · cols^{1 − 1/q}` (the uniform vector maximizes it).
    /// This is the correction term that makes bounds computed for the
    /// shifted matrix valid for the unshifted one.
    pub fn shift_operator_norm(&self, params: &NormParams) -> f64 {
        let r = self.base.rows() as f64;
        let c = self.base.cols() as f64;
        self.epsilon * r.powf(1.0 / params.p()) * c.powf(1.0 - 1.0 / params.q())
    }
}

/// Scale a nonnegative matrix so its max entry is 1, add
/// `ε = δ / (rows + cols)²` to every entry, and rescale so the max entry is
/// exactly 1 again. The result has entries in `[1/N, 1]` with
/// `N = 1/min-entry`, and the induced relative perturbation of the norm is
/// at most `ε · rows^{1/p} · cols^{1−1/q}`.
pub fn positivity_shift(a: &DenseMatrix, delta: f64) -> Result<PositiveMatrix> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidParams(format!(
            "shift delta must be positive and finite, got {delta}"
        )));
    }
    if !a.is_nonnegative() {
        return Err(Error::InvalidInput(
            "positivity shift requires a nonnegative matrix".into(),
        ));
    }
    let max = a.max_abs();
    if max == 0.0 {
        return Err(Error::InvalidInput(
            "positivity shift rejects the all-zero matrix".into(),
        ));
    }
    let dims = (a.rows() + a.cols()) as f64;
    let epsilon = delta / (dims * dims);
    let denom = 1.0 + epsilon;
    let entries = a
        .entries()
        .iter()
        .map(|&e| (e / max + epsilon) / denom)
        .collect();
    let base = DenseMatrix {
        rows: a.rows(),
        cols: a.cols(),
        entries,
    };
    let n_param = 1.0 / base.min_entry();
    Ok(PositiveMatrix {
        base,
        n_param,
        original_max: max,
        epsilon,
        shift_applied: true,
    })
}
