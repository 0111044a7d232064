//! `opnorm gen`: emit gadget / tensor / lift instances as a Matrix Market
//! file plus a JSON manifest with the witness and its expected value.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Subcommand};
use opnorm_core::instances::{
    amplify, build_gadget, lift_to_qp, recommended_c, Graph, InstanceKind, InstanceManifest,
};
use opnorm_core::io::{write_matrix_path, OutputFormat};
use opnorm_core::Error;

use crate::CliError;

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// The 5|E| x (n+1) cut-gadget matrix of a regular graph
    Gadget {
        #[command(flatten)]
        base: GadgetArgs,
    },
    /// k-fold tensor amplification with integer column weights
    Tensor {
        #[command(flatten)]
        base: GadgetArgs,
        /// Tensor order (k >= 1)
        #[arg(long)]
        k: usize,
    },
    /// Weighted instance lifted to a plain q->p norm problem
    Lift {
        #[command(flatten)]
        base: GadgetArgs,
        /// Tensor order before lifting
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Input-side exponent of the lifted problem (q >= p)
        #[arg(long)]
        q: f64,
    },
}

#[derive(Debug, Args)]
pub struct GadgetArgs {
    /// Built-in graph: cycleN, completeN, or hypercubeK
    #[arg(long, conflicts_with = "graph")]
    pub builtin: Option<String>,
    /// Edge-list TSV file (one `u v` pair per line, 0-based)
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Gadget constant; defaults to the soundness-regime value for margin 0.2
    #[arg(long)]
    pub c: Option<f64>,
    /// Output-side exponent (p > 2)
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory (created if missing)
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_builtin(name: &str) -> Result<Graph, Error> {
    let take = |prefix: &str| -> Option<usize> {
        name.strip_prefix(prefix).and_then(|s| s.parse().ok())
    };
    if let Some(n) = take("cycle") {
        Graph::cycle(n)
    } else if let Some(n) = take("complete") {
        Graph::complete(n)
    } else if let Some(k) = take("hypercube") {
        Graph::hypercube(k)
    } else {
        Err(Error::InvalidInput(format!(
            "unknown builtin graph `{name}` (expected cycleN, completeN, or hypercubeK)"
        )))
    }
}

fn load_graph(args: &GadgetArgs) -> Result<Graph, CliError> {
    match (&args.builtin, &args.graph) {
        (Some(name), None) => Ok(parse_builtin(name)?),
        (None, Some(path)) => Ok(Graph::from_edge_list(fs::File::open(path)?)?),
        _ => Err(CliError::invalid(
            "give exactly one of --builtin or --graph",
        )),
    }
}

pub fn run(cmd: &GenCommand, max_dim: usize) -> Result<PathBuf, CliError> {
    let (base, kind, k, lift_q) = match cmd {
        GenCommand::Gadget { base } => (base, InstanceKind::Gadget, 1, None),
        GenCommand::Tensor { base, k } => (base, InstanceKind::Tensor, *k, None),
        GenCommand::Lift { base, k, q } => (base, InstanceKind::Lift, *k, Some(*q)),
    };
    let graph = load_graph(base)?;
    // Gate on the graph before the 5|E| x (n+1) matrix is materialized.
    let rows = 5 * graph.edges().len();
    let cols = graph.n() + 1;
    if rows > max_dim || cols > max_dim {
        return Err(CliError::invalid(format!(
            "gadget dimensions {rows}x{cols} exceed the cap {max_dim} \
             (set OPNORM_MAX_DIM to raise it)"
        )));
    }
    let c = base.c.unwrap_or_else(|| recommended_c(base.p, 0.2));
    let gadget = build_gadget(&graph, c, base.p)?;

    fs::create_dir_all(&base.out)?;
    let (file_stem, matrix, manifest) = match kind {
        InstanceKind::Gadget => {
            let manifest = InstanceManifest {
                kind,
                matrix_file: "gadget.mtx".into(),
                c,
                p: base.p,
                q: base.p,
                k: 1,
                graph_vertices: graph.n(),
                graph_degree: graph.degree(),
                alphas: None,
                witness: gadget.witness.clone(),
                cut_size: gadget.cut_size,
                expected_ratio_at_witness: gadget.expected_ratio_at_witness,
                completeness_factor: None,
                seed: base.seed,
            };
            ("gadget.mtx", gadget.matrix.clone(), manifest)
        }
        InstanceKind::Tensor => {
            let amp = amplify(&gadget, k, max_dim)?;
            let manifest = InstanceManifest {
                kind,
                matrix_file: "tensor.mtx".into(),
                c,
                p: base.p,
                q: base.p,
                k,
                graph_vertices: graph.n(),
                graph_degree: graph.degree(),
                alphas: Some(amp.alpha.clone()),
                witness: amp.witness.clone(),
                cut_size: gadget.cut_size,
                expected_ratio_at_witness: amp.expected_ratio_at_witness,
                completeness_factor: None,
                seed: base.seed,
            };
            ("tensor.mtx", amp.matrix, manifest)
        }
        InstanceKind::Lift => {
            let amp = amplify(&gadget, k, max_dim)?;
            let q = lift_q.expect("lift carries q");
            let lifted = lift_to_qp(&amp, base.p, q)?;
            let manifest = InstanceManifest {
                kind,
                matrix_file: "lift.mtx".into(),
                c,
                p: base.p,
                q,
                k,
                graph_vertices: graph.n(),
                graph_degree: graph.degree(),
                alphas: Some(lifted.alpha.clone()),
                witness: lifted.witness.clone(),
                cut_size: gadget.cut_size,
                expected_ratio_at_witness: lifted.expected_ratio_at_witness,
                completeness_factor: Some(lifted.completeness_factor),
                seed: base.seed,
            };
            ("lift.mtx", lifted.matrix, manifest)
        }
    };

    let matrix_path = base.out.join(file_stem);
    write_matrix_path(&matrix_path, &matrix, OutputFormat::MatrixMarketCoordinate)?;
    let manifest_path = base.out.join("manifest.json");
    fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)?)?;

    println!(
        "{}",
        serde_json::json!({
            "command": "gen",
            "kind": manifest.kind,
            "matrix": matrix_path.display().to_string(),
            "manifest": manifest_path.display().to_string(),
            "rows": matrix.rows(),
            "cols": matrix.cols(),
            "cut_size": manifest.cut_size,
            "expected_ratio_at_witness": manifest.expected_ratio_at_witness,
        })
    );
    Ok(manifest_path)
}

/// Read a manifest and the matrix it points at (relative to its directory).
pub fn load_manifest(path: &Path) -> Result<(InstanceManifest, opnorm_core::DenseMatrix), CliError> {
    let text = fs::read_to_string(path)?;
    let manifest: InstanceManifest =
        serde_json::from_str(&text).map_err(|e| CliError::invalid(format!("bad manifest: {e}")))?;
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let matrix = opnorm_core::io::read_matrix_path(&dir.join(&manifest.matrix_file))?;
    Ok((manifest, matrix))
}
