//! Generators for the hardness-reduction corpus: cut-gadget matrices built
//! from regular graphs, Kronecker amplification with integer column weights,
//! and the weighted-to-plain lift that turns a weighted ratio into an
//! ordinary q↦p norm.

use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::norms::lp_norm;
use crate::params::NormParams;

const MAX_CUT_ENUM_LIMIT: usize = 16;

/// A simple d-regular graph.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    degree: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Validates simplicity (no loops, no duplicates) and regularity.
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("graph needs at least one vertex".into()));
        }
        let mut degrees = vec![0usize; n];
        let mut seen = std::collections::HashSet::new();
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return Err(Error::InvalidInput(format!(
                    "edge ({u}, {v}) out of range for {n} vertices"
                )));
            }
            if u == v {
                return Err(Error::InvalidInput(format!("self-loop at vertex {u}")));
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(Error::InvalidInput(format!(
                    "duplicate edge ({}, {})",
                    key.0, key.1
                )));
            }
            degrees[u] += 1;
            degrees[v] += 1;
        }
        let degree = degrees[0];
        if degrees.iter().any(|&d| d != degree) {
            return Err(Error::InvalidInput("graph is not regular".into()));
        }
        if degree == 0 {
            return Err(Error::InvalidInput("graph has no edges".into()));
        }
        let edges = edges
            .into_iter()
            .map(|(u, v)| (u.min(v), u.max(v)))
            .collect();
        Ok(Graph { n, degree, edges })
    }

    /// The n-cycle (n >= 3).
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidInput("a cycle needs at least 3 vertices".into()));
        }
        let edges = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::new(n, edges)
    }

    /// The complete graph on n vertices (n >= 2).
    pub fn complete(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(
                "a complete graph needs at least 2 vertices".into(),
            ));
        }
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                edges.push((u, v));
            }
        }
        Graph::new(n, edges)
    }

    /// The k-dimensional hypercube on 2^k vertices (k >= 1).
    pub fn hypercube(k: usize) -> Result<Self> {
        if k == 0 || k > 20 {
            return Err(Error::InvalidInput("hypercube dimension must be in 1..=20".into()));
        }
        let n = 1usize << k;
        let mut edges = Vec::new();
        for u in 0..n {
            for b in 0..k {
                let v = u ^ (1 << b);
                if u < v {
                    edges.push((u, v));
                }
            }
        }
        Graph::new(n, edges)
    }

    /// Parse an edge-list file: one `u<TAB>v` pair per line, vertices
    /// 0-based, `#` comments allowed.
    pub fn from_edge_list<R: std::io::Read>(reader: R) -> Result<Self> {
        let reader = std::io::BufReader::new(reader);
        let mut edges = Vec::new();
        let mut max_vertex = 0usize;
        for (i, line) in reader.lines().enumerate() {
            let lineno = i + 1;
            let line = line?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = t.split_whitespace().collect();
            if toks.len() != 2 {
                return Err(Error::format(lineno, "expected `u v`"));
            }
            let u: usize = toks[0]
                .parse()
                .map_err(|_| Error::format(lineno, "bad vertex id"))?;
            let v: usize = toks[1]
                .parse()
                .map_err(|_| Error::format(lineno, "bad vertex id"))?;
            max_vertex = max_vertex.max(u).max(v);
            edges.push((u, v));
        }
        Graph::new(max_vertex + 1, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    fn cut_size(&self, side: &[bool]) -> usize {
        self.edges
            .iter()
            .filter(|&&(u, v)| side[u] != side[v])
            .count()
    }
}

/// Deterministic largest-improvement local search for a big cut. Returns
/// the side assignment and the number of cut edges; no optimality claim.
pub fn greedy_max_cut(g: &Graph) -> (Vec<bool>, usize) {
    let mut side = vec![false; g.n()];
    loop {
        let mut best_gain = 0isize;
        let mut best_vertex = None;
        for v in 0..g.n() {
            let mut gain = 0isize;
            for &(a, b) in g.edges() {
                if a != v && b != v {
                    continue;
                }
                let other = if a == v { b } else { a };
                if side[v] == side[other] {
                    gain += 1;
                } else {
                    gain -= 1;
                }
            }
            if gain > best_gain {
                best_gain = gain;
                best_vertex = Some(v);
            }
        }
        match best_vertex {
            Some(v) => side[v] = !side[v],
            None => break,
        }
    }
    let cut = g.cut_size(&side);
    (side, cut)
}

/// Exact MaxCut by enumeration; capped at 16 vertices.
pub fn max_cut_exact(g: &Graph) -> Result<usize> {
    if g.n() > MAX_CUT_ENUM_LIMIT {
        return Err(Error::SizeLimit(format!(
            "exact MaxCut enumeration handles at most {MAX_CUT_ENUM_LIMIT} vertices"
        )));
    }
    let n = g.n();
    let mut best = 0usize;
    // The last vertex can be pinned to one side.
    for mask in 0..(1u32 << (n - 1)) {
        let side: Vec<bool> = (0..n).map(|v| v < n - 1 && (mask >> v) & 1 == 1).collect();
        best = best.max(g.cut_size(&side));
    }
    Ok(best)
}

/// A cut-gadget instance: the `5|E| x (n+1)` matrix whose ratio of p-th
/// powers `‖Mv‖_p^p / ‖v‖_p^p` equals the gadget objective after the change
/// of variable that scales the coupling coordinate by `n^{1/p}`.
#[derive(Debug, Clone)]
pub struct GadgetInstance {
    pub matrix: DenseMatrix,
    pub c: f64,
    pub p: f64,
    pub graph: Graph,
    /// `(n^{1/p}, ±1, ..., ±1)` for the greedy cut.
    pub witness: Vec<f64>,
    pub cut_size: usize,
    /// `C·d·2^{p−1} + (cut/n)·2^{p−1}`, the ratio of p-th powers at the
    /// witness.
    pub expected_ratio_at_witness: f64,
}

/// Build the gadget matrix for a d-regular graph.
///
/// Per edge {i, j} the five rows are the difference row (+1 at i, −1 at j)
/// and four coupling rows pairing column 0 (entry `n^{−1/p}`) with ∓1 at i
/// and at j. The four coupling rows are scaled by `C^{1/p}` so that summing
/// p-th powers over the edge reproduces the `C·d` weighting of the gadget
/// objective; the unscaled rows alone would weight the coupling terms by
/// `d` only.
pub fn build_gadget(graph: &Graph, c: f64, p: f64) -> Result<GadgetInstance> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::InvalidParams("gadget constant C must be positive".into()));
    }
    if !(p > 2.0) || !p.is_finite() {
        return Err(Error::InvalidParams(
            "the gadget construction requires p > 2".into(),
        ));
    }
    let n = graph.n();
    let e = graph.edges().len();
    let mut m = DenseMatrix::zeros(5 * e, n + 1);
    let cw = c.powf(1.0 / p);
    let z0 = (n as f64).powf(-1.0 / p);
    for (ei, &(i, j)) in graph.edges().iter().enumerate() {
        let r = 5 * ei;
        m.set(r, 1 + i, 1.0);
        m.set(r, 1 + j, -1.0);
        m.set(r + 1, 0, cw * z0);
        m.set(r + 1, 1 + i, -cw);
        m.set(r + 2, 0, cw * z0);
        m.set(r + 2, 1 + i, cw);
        m.set(r + 3, 0, cw * z0);
        m.set(r + 3, 1 + j, -cw);
        m.set(r + 4, 0, cw * z0);
        m.set(r + 4, 1 + j, cw);
    }

    let (side, cut_size) = greedy_max_cut(graph);
    let mut witness = Vec::with_capacity(n + 1);
    witness.push((n as f64).powf(1.0 / p));
    witness.extend(side.iter().map(|&s| if s { 1.0 } else { -1.0 }));

    let d = graph.degree() as f64;
    let expected = c * d * 2.0_f64.powf(p - 1.0)
        + (cut_size as f64 / n as f64) * 2.0_f64.powf(p - 1.0);

    Ok(GadgetInstance {
        matrix: m,
        c,
        p,
        graph: graph.clone(),
        witness,
        cut_size,
        expected_ratio_at_witness: expected,
    })
}

/// The gadget objective evaluated directly in the original variables.
pub fn gadget_objective(graph: &Graph, c: f64, p: f64, x0: f64, x: &[f64]) -> f64 {
    let d = graph.degree() as f64;
    let mut cut_terms = 0.0;
    for &(i, j) in graph.edges() {
        cut_terms += (x[i] - x[j]).abs().powf(p);
    }
    let mut coupling = 0.0;
    for &xi in x {
        coupling += (x0 + xi).abs().powf(p) + (x0 - xi).abs().powf(p);
    }
    let numer = cut_terms + c * d * coupling;
    let denom = graph.n() as f64 * x0.abs().powf(p) + x.iter().map(|v| v.abs().powf(p)).sum::<f64>();
    numer / denom
}

/// The per-edge term `(|x−y|^p + C(|1+x|^p + |1−x|^p + |1+y|^p + |1−y|^p))
/// / (2 + |x|^p + |y|^p)`.
pub fn edge_term(x: f64, y: f64, c: f64, p: f64) -> f64 {
    let numer = (x - y).abs().powf(p)
        + c * ((1.0 + x).abs().powf(p)
            + (1.0 - x).abs().powf(p)
            + (1.0 + y).abs().powf(p)
            + (1.0 - y).abs().powf(p));
    numer / (2.0 + x.abs().powf(p) + y.abs().powf(p))
}

/// `(|1+x|^p + |1−x|^p) / (1 + |x|^p)`, which stays below `2^{p−1}` for
/// p > 2 with equality only at |x| = 1.
pub fn symmetric_ratio(x: f64, p: f64) -> f64 {
    ((1.0 + x).abs().powf(p) + (1.0 - x).abs().powf(p)) / (1.0 + x.abs().powf(p))
}

/// The slack `2^{p−1} − symmetric_ratio` minimized over |x| outside
/// `[1−eps, 1+eps]`, measured by a dense scan.
pub fn symmetric_ratio_slack(p: f64, eps: f64) -> f64 {
    let cap = 2.0_f64.powf(p - 1.0);
    let mut slack = f64::INFINITY;
    let steps = 4000;
    for k in 0..=steps {
        let x = (1.0 - eps) * k as f64 / steps as f64;
        slack = slack.min(cap - symmetric_ratio(x, p));
    }
    for k in 0..=steps {
        // Beyond |x| ~ 60 the ratio has decayed towards 2.
        let x = (1.0 + eps) + (60.0 - (1.0 + eps)) * k as f64 / steps as f64;
        slack = slack.min(cap - symmetric_ratio(x, p));
    }
    slack
}

/// A constant large enough for the gadget soundness analysis at margin
/// `eps`: `2^{p+2} / δ(eps)` with the slack measured empirically.
pub fn recommended_c(p: f64, eps: f64) -> f64 {
    2.0_f64.powf(p + 2.0) / symmetric_ratio_slack(p, eps)
}

/// Ratio of p-th powers `‖Ax‖_p^p / ‖x‖_p^p`.
pub fn power_ratio(a: &DenseMatrix, x: &[f64], p: f64) -> Result<f64> {
    let num = lp_norm(&a.matvec(x), p)?.powf(p);
    let den = lp_norm(x, p)?.powf(p);
    if den == 0.0 {
        return Err(Error::InvalidInput("zero vector".into()));
    }
    Ok(num / den)
}

/// Weighted ratio of p-th powers `‖Ax‖_p^p / Σ_i α_i |x_i|^p`.
pub fn weighted_ratio(a: &DenseMatrix, alpha: &[u64], x: &[f64], p: f64) -> Result<f64> {
    if alpha.len() != x.len() || x.len() != a.cols() {
        return Err(Error::InvalidInput("weight/vector length mismatch".into()));
    }
    let num = lp_norm(&a.matvec(x), p)?.powf(p);
    let den: f64 = alpha
        .iter()
        .zip(x)
        .map(|(&w, &xi)| w as f64 * xi.abs().powf(p))
        .sum();
    if den == 0.0 {
        return Err(Error::InvalidInput("zero vector".into()));
    }
    Ok(num / den)
}

/// Kronecker product, zero-padding rectangular inputs to square first (which
/// leaves the operator norm unchanged). `max_dim` caps the output dimension.
pub fn tensor_product(m: &DenseMatrix, n: &DenseMatrix, max_dim: usize) -> Result<DenseMatrix> {
    let a = pad_square(m);
    let b = pad_square(n);
    let dim = a
        .rows()
        .checked_mul(b.rows())
        .ok_or_else(|| Error::SizeLimit("tensor dimension overflow".into()))?;
    if dim > max_dim {
        return Err(Error::SizeLimit(format!(
            "tensor product dimension {dim} exceeds the cap {max_dim}"
        )));
    }
    Ok(kron_raw(&a, &b))
}

fn pad_square(m: &DenseMatrix) -> DenseMatrix {
    if m.rows() == m.cols() {
        return m.clone();
    }
    let s = m.rows().max(m.cols());
    let mut out = DenseMatrix::zeros(s, s);
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            out.set(i, j, m.get(i, j));
        }
    }
    out
}

/// Plain Kronecker product of possibly rectangular matrices: block (i, j)
/// is `m_ij · N`.
fn kron_raw(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let mut out = DenseMatrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let v = a.get(i, j);
            if v == 0.0 {
                continue;
            }
            for k in 0..b.rows() {
                for l in 0..b.cols() {
                    out.set(i * b.rows() + k, j * b.cols() + l, v * b.get(k, l));
                }
            }
        }
    }
    out
}

/// A weighted instance: maximize `‖Ay‖_p / (Σ_i α_i |y_i|^p)^{1/p}` with
/// positive integer weights.
#[derive(Debug, Clone)]
pub struct WeightedInstance {
    pub matrix: DenseMatrix,
    pub alpha: Vec<u64>,
    pub p: f64,
    /// A ±1 assignment attaining `expected_ratio_at_witness`.
    pub witness: Vec<f64>,
    /// Weighted ratio of p-th powers at the witness.
    pub expected_ratio_at_witness: f64,
    pub tensor_order: usize,
}

/// The k-fold Kronecker power of a gadget, re-expressed in per-tuple
/// variables with integer weights `α_I = n^{w(I)}`, where `w(I)` counts the
/// coupling coordinate's appearances in the tuple `I`.
///
/// The change of variable is absorbed into the matrix by scaling column `I`
/// by `α_I^{1/p}`, so the witness is a plain ±1 vector and its weighted
/// ratio is exactly the k-th power of the base gadget's witness ratio. The
/// Kronecker power here is taken over the raw rectangular gadget (no square
/// padding): padding would append dead columns and the witness would no
/// longer be all-±1.
pub fn amplify(inst: &GadgetInstance, k: usize, max_dim: usize) -> Result<WeightedInstance> {
    if k == 0 {
        return Err(Error::InvalidParams("tensor order k must be >= 1".into()));
    }
    let n = inst.graph.n();
    let base_cols = n + 1;
    let base_rows = inst.matrix.rows();
    let mut cols = 1usize;
    let mut rows = 1usize;
    for _ in 0..k {
        cols = cols
            .checked_mul(base_cols)
            .filter(|&c| c <= max_dim)
            .ok_or_else(|| Error::SizeLimit(format!("(n+1)^k exceeds the cap {max_dim}")))?;
        rows = rows
            .checked_mul(base_rows)
            .filter(|&r| r <= max_dim)
            .ok_or_else(|| Error::SizeLimit(format!("(5|E|)^k exceeds the cap {max_dim}")))?;
    }

    let mut m = inst.matrix.clone();
    for _ in 1..k {
        m = kron_raw(&m, &inst.matrix);
    }

    // Column I <-> the base-(n+1) digit string of its index; a zero digit
    // selects the coupling coordinate.
    let mut alpha = Vec::with_capacity(cols);
    let mut witness = Vec::with_capacity(cols);
    for idx in 0..cols {
        let mut rest = idx;
        let mut zeros = 0u32;
        let mut sign = 1.0_f64;
        for _ in 0..k {
            let digit = rest % base_cols;
            rest /= base_cols;
            if digit == 0 {
                zeros += 1;
            } else if inst.witness[digit] < 0.0 {
                sign = -sign;
            }
        }
        alpha.push((n as u64).pow(zeros));
        witness.push(sign);
    }
    for (j, &w) in alpha.iter().enumerate() {
        m.scale_column(j, (w as f64).powf(1.0 / inst.p));
    }

    Ok(WeightedInstance {
        matrix: m,
        alpha,
        p: inst.p,
        witness,
        expected_ratio_at_witness: inst.expected_ratio_at_witness.powi(k as i32),
        tensor_order: k,
    })
}

/// A weighted instance lifted to a plain q↦p norm problem.
#[derive(Debug, Clone)]
pub struct LiftedInstance {
    pub matrix: DenseMatrix,
    pub params: NormParams,
    pub alpha: Vec<u64>,
    /// Witness in the lifted variables: `z_i = α_i^{1/q} · (±1)`.
    pub witness: Vec<f64>,
    /// The plain norm ratio `‖Az‖_p / ‖z‖_q` at the witness.
    pub expected_ratio_at_witness: f64,
    /// `(Σ_i α_i)^{1/p − 1/q}`: the factor by which a ±1 assignment's
    /// weighted p-ratio transfers to the lifted objective.
    pub completeness_factor: f64,
}

/// Substitute `z_i = α_i^{1/q} y_i` so that the weighted objective
/// `‖Ay‖_p / (Σ α_i |y_i|^q)^{1/q}` becomes the plain norm
/// `‖A·diag(α^{−1/q})‖_{q↦p}`.
pub fn lift_to_qp(inst: &WeightedInstance, p: f64, q: f64) -> Result<LiftedInstance> {
    if (p - inst.p).abs() > 1e-12 {
        return Err(Error::InvalidParams(format!(
            "numerator exponent {p} does not match the instance's p = {}",
            inst.p
        )));
    }
    let params = NormParams::new(p, q)?;
    let mut matrix = inst.matrix.clone();
    for (j, &w) in inst.alpha.iter().enumerate() {
        matrix.scale_column(j, (w as f64).powf(-1.0 / q));
    }
    let witness: Vec<f64> = inst
        .alpha
        .iter()
        .zip(&inst.witness)
        .map(|(&w, &s)| (w as f64).powf(1.0 / q) * s)
        .collect();

    let weight_sum: f64 = inst.alpha.iter().map(|&w| w as f64).sum();
    let completeness_factor = weight_sum.powf(1.0 / p - 1.0 / q);
    // ‖Bx‖_p at the ±1 witness has p-th power (weighted ratio)·Σα, and the
    // lifted denominator at the witness is (Σα)^{1/q}.
    let expected_ratio_at_witness =
        (inst.expected_ratio_at_witness * weight_sum).powf(1.0 / p) / weight_sum.powf(1.0 / q);

    Ok(LiftedInstance {
        matrix,
        params,
        alpha: inst.alpha.clone(),
        witness,
        expected_ratio_at_witness,
        completeness_factor,
    })
}

/// Instance kinds emitted by the generator front end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InstanceKind {
    /// Plain gadget matrix; `expected_ratio_at_witness` is a ratio of p-th
    /// powers of norms.
    Gadget,
    /// Amplified weighted instance; the expected value is the weighted ratio
    /// of p-th powers.
    Tensor,
    /// Lifted q↦p instance; the expected value is a plain norm ratio.
    Lift,
}

/// Sidecar metadata written next to every generated matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceManifest {
    pub kind: InstanceKind,
    pub matrix_file: String,
    pub c: f64,
    pub p: f64,
    pub q: f64,
    pub k: usize,
    pub graph_vertices: usize,
    pub graph_degree: usize,
    pub alphas: Option<Vec<u64>>,
    pub witness: Vec<f64>,
    pub cut_size: usize,
    pub expected_ratio_at_witness: f64,
    pub completeness_factor: Option<f64>,
    pub seed: u64,
}
