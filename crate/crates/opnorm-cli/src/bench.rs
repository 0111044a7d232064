//! `opnorm bench`: time the iteration on seeded random positive matrices and
//! report the empirical iteration-count constant against the
//! `N·n·log³(N·n/tol)` budget.

use opnorm_core::{compute_norm, DenseMatrix, NormParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::CliError;

pub fn run(sizes: &str, p: f64, q: f64, tol: f64, seed: u64) -> Result<i32, CliError> {
    let params = NormParams::new(p, q)?;
    let sizes: Vec<usize> = sizes
        .split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| CliError::invalid(format!("bad size `{s}`")))
        })
        .collect::<Result<_, _>>()?;

    let mut rows = Vec::new();
    for (i, &n) in sizes.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
        let a = DenseMatrix::random(n, n, 0.01, 1.0, &mut rng);
        let start = std::time::Instant::now();
        let rep = compute_norm(&a, &params, tol, 1_000_000)?;
        let wall_ms = start.elapsed().as_secs_f64() * 1e3;
        // Iteration budget from the convergence analysis: N·n·log³(N·n/tol).
        let nn = rep.n_param * n as f64;
        let budget = nn * (nn / tol).ln().powi(3);
        rows.push(serde_json::json!({
            "n": n,
            "estimate": rep.estimate,
            "iterations": rep.iterations,
            "converged": rep.converged,
            "wall_time_ms": wall_ms,
            "n_param": rep.n_param,
            "iteration_budget": budget,
            "iteration_constant": rep.iterations as f64 / budget,
        }));
    }
    println!(
        "{}",
        serde_json::json!({
            "command": "bench",
            "params": { "p": p, "q": q, "tol": tol, "seed": seed },
            "runs": rows,
        })
    );
    Ok(0)
}
