//! The JSON run report printed on standard output. The key set is part of
//! the tool's contract and covered by a golden structure test.

use serde::Serialize;

/// Exponents serialize as numbers, with the infinity sentinel spelled "inf".
#[derive(Debug, Clone, Copy)]
pub struct ExponentField(pub f64);

impl Serialize for ExponentField {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ParamsEcho {
    pub p: ExponentField,
    pub q: Option<ExponentField>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub restarts: Option<usize>,
    pub seed: u64,
}

#[derive(Debug, Serialize)]
pub struct BoundsField {
    pub lower: f64,
    /// Absent when the method provides only a lower bound (multistart search).
    pub upper: Option<f64>,
    pub method: String,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub input: String,
    pub params: ParamsEcho,
    pub bounds: BoundsField,
    pub estimate: f64,
    pub iterations: Option<usize>,
    pub converged: Option<bool>,
    pub exhaustive: Option<bool>,
    pub wall_time_ms: f64,
    pub maximizer: Option<Vec<f64>>,
    pub manifest: Option<String>,
}

impl RunReport {
    pub fn print(&self) {
        println!("{}", serde_json::to_string_pretty(self).expect("report serializes"));
    }
}
