//! `opnorm verify`: re-derive everything a manifest claims about its
//! instance. Exit code 0 only when every check passes.

use std::path::Path;

use opnorm_core::instances::{weighted_ratio, InstanceKind, InstanceManifest, power_ratio};
use opnorm_core::{brute_norm_seeded, compute_norm, norm_ratio, DenseMatrix, NormParams};

use crate::gen::load_manifest;
use crate::CliError;

const REL_TOL: f64 = 1e-9;

struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn rel_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= REL_TOL * b.abs().max(1.0)
}

pub fn run(manifest_path: &Path) -> Result<i32, CliError> {
    let (manifest, matrix) = load_manifest(manifest_path)?;
    let mut checks = Vec::new();

    checks.push(finite_check(&manifest));
    checks.push(witness_check(&manifest, &matrix)?);
    checks.push(search_check(&manifest, &matrix)?);
    if manifest.kind == InstanceKind::Lift {
        checks.push(completeness_check(&manifest));
    }

    let all_pass = checks.iter().all(|c| c.pass);
    for c in &checks {
        eprintln!(
            "{} - {}: {}",
            if c.pass { "ok  " } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    println!(
        "{}",
        serde_json::json!({
            "command": "verify",
            "manifest": manifest_path.display().to_string(),
            "kind": manifest.kind,
            "pass": all_pass,
            "checks": checks.iter().map(|c| serde_json::json!({
                "name": c.name,
                "pass": c.pass,
                "detail": c.detail,
            })).collect::<Vec<_>>(),
        })
    );
    Ok(if all_pass { 0 } else { 1 })
}

/// No NaN or infinity anywhere in the manifest's numeric payload.
fn finite_check(m: &InstanceManifest) -> Check {
    let mut vals = vec![m.c, m.p, m.q, m.expected_ratio_at_witness];
    vals.extend(&m.witness);
    if let Some(cf) = m.completeness_factor {
        vals.push(cf);
    }
    let pass = vals.iter().all(|v| v.is_finite());
    Check {
        name: "finite-values",
        pass,
        detail: if pass {
            "all numeric fields finite".into()
        } else {
            "non-finite value in manifest".into()
        },
    }
}

/// The witness reproduces the recorded expected value under the kind's
/// evaluation convention.
fn witness_check(m: &InstanceManifest, a: &DenseMatrix) -> Result<Check, CliError> {
    let got = match m.kind {
        InstanceKind::Gadget => power_ratio(a, &m.witness, m.p)?,
        InstanceKind::Tensor => {
            let alphas = m
                .alphas
                .as_ref()
                .ok_or_else(|| CliError::invalid("tensor manifest lacks alphas"))?;
            weighted_ratio(a, alphas, &m.witness, m.p)?
        }
        InstanceKind::Lift => {
            let params = NormParams::new(m.p, m.q)?;
            norm_ratio(a, &m.witness, &params)?
        }
    };
    let pass = got.is_finite() && rel_close(got, m.expected_ratio_at_witness);
    Ok(Check {
        name: "witness-ratio",
        pass,
        detail: format!("recomputed {got}, manifest {}", m.expected_ratio_at_witness),
    })
}

/// A search (or, when applicable, the certified iteration) must dominate the
/// witness value.
fn search_check(m: &InstanceManifest, a: &DenseMatrix) -> Result<Check, CliError> {
    // Plain norm-ratio value the witness attains.
    let params = match m.kind {
        InstanceKind::Lift => NormParams::new(m.p, m.q)?,
        _ => NormParams::general(m.p, m.p)?,
    };
    let witness_ratio = norm_ratio(a, &m.witness, &params)?;

    if a.is_nonnegative() && params.is_iteration_range() {
        let rep = compute_norm(a, &params, 1e-9, 200_000)?;
        let pass = rep.estimate >= witness_ratio * (1.0 - REL_TOL)
            && rep.bounds.lower <= rep.estimate
            && rep.estimate <= rep.bounds.upper
            && rep.estimate.is_finite();
        return Ok(Check {
            name: "norm-dominates-witness",
            pass,
            detail: format!(
                "certified estimate {} vs witness ratio {witness_ratio}",
                rep.estimate
            ),
        });
    }

    let found = brute_norm_seeded(a, &params, 16, m.seed, &[m.witness.clone()])?;
    let pass = found.value.is_finite() && found.value >= witness_ratio * (1.0 - REL_TOL);
    Ok(Check {
        name: "norm-dominates-witness",
        pass,
        detail: format!("search value {} vs witness ratio {witness_ratio}", found.value),
    })
}

fn completeness_check(m: &InstanceManifest) -> Check {
    let (pass, detail) = match &m.alphas {
        Some(alphas) => {
            let sum: f64 = alphas.iter().map(|&a| a as f64).sum();
            let expected = sum.powf(1.0 / m.p - 1.0 / m.q);
            match m.completeness_factor {
                Some(cf) if rel_close(cf, expected) => {
                    (true, format!("(Σα)^(1/p−1/q) = {expected}"))
                }
                Some(cf) => (false, format!("manifest {cf}, recomputed {expected}")),
                None => (false, "missing completeness factor".into()),
            }
        }
        None => (false, "missing alphas".into()),
    };
    Check {
        name: "completeness-factor",
        pass,
        detail,
    }
}
