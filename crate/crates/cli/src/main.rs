//! `envspec`: compile FFFT circuits, optimise CZ circuits and run the
//! spectral-function protocol from the command line.

mod manifest;
mod report;
mod spectral;
mod verify;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::json;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use envspec::circuit::write_circuit;
use envspec::czopt::{decimate_with_steps, verify_equivalence, CzGraph, DEFAULT_DEPTH_PENALTY};
use envspec::fft::{compile_fft, interleave_circuit, interleave_cz_graph, interleave_permutation, FftPlan, InterleaveStrategy};

use manifest::{manifest_path, sibling, RunManifest};

#[derive(Debug, Parser)]
#[command(name = "envspec", version, about = "Fermionic Fourier transforms, CZ-circuit optimisation and spectral-function simulation")]
struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true, env = "ENVSPEC_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compile an N-mode FFFT circuit.
    CompileFft {
        #[arg(long)]
        modes: usize,
        /// 2 or 3; inferred from --modes when omitted.
        #[arg(long)]
        radix: Option<usize>,
        /// local-fswap, cx-ladder, graph-decimated or imported.
        #[arg(long, default_value = "cx-ladder")]
        interleave: InterleaveStrategy,
        /// Circuit text file; metadata goes to the same path with a .json extension.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Realise a CZ graph with fewer two-qubit gates by greedy decimation.
    OptimizeCz {
        /// Edge list, one `i j` pair per line.
        #[arg(long, conflicts_with = "interleave_modes", required_unless_present = "interleave_modes")]
        graph: Option<PathBuf>,
        /// Use the inversion graph of the N-mode interleave instead of a file.
        #[arg(long)]
        interleave_modes: Option<usize>,
        /// Radix for --interleave-modes.
        #[arg(long, default_value_t = 3)]
        radix: usize,
        #[arg(long, default_value_t = DEFAULT_DEPTH_PENALTY)]
        depth_penalty: f64,
        #[arg(long)]
        out: PathBuf,
        /// Report JSON; defaults to the circuit path with a .json extension.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Evaluate n(k) over a (k, ω) grid for a TOML protocol config.
    SimulateSpectral {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = spectral::MethodArg::Auto)]
        method: spectral::MethodArg,
        /// CSV output; metadata goes to the same path with a .json extension.
        #[arg(long, default_value = "spectral.csv")]
        out: PathBuf,
        /// Replace each value by the mean of this many simulated Z-basis shots.
        #[arg(long)]
        shots: Option<u32>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Error of the environment method and of the baseline against the exact
    /// reference, per Trotter step count.
    CompareTrotter {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated step counts; 0 is continuous time.
        #[arg(long, value_delimiter = ',', default_values_t = vec![1, 2, 3, 4, 5, 6, 8, 10, 20, 0])]
        steps: Vec<usize>,
        #[arg(long, default_value = "trotter.csv")]
        out: PathBuf,
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Run the oracle-equivalence suite; exits nonzero on any failure.
    Verify {
        /// Skip the slower checks (27-mode dense transfer matrices, N = 200 Gaussian runs).
        #[arg(long)]
        quick: bool,
    },
    /// Two-qubit gate count and depth of every interleave strategy.
    Report {
        /// Largest mode count in the table.
        #[arg(long, default_value_t = 81)]
        max_modes: usize,
        #[arg(long, default_value = "report.csv")]
        out: PathBuf,
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    if let Some(n) = cli.threads {
        if n == 0 {
            bail!("`threads` must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the thread pool")?;
    }
    match cli.command {
        Command::CompileFft { modes, radix, interleave, out, manifest } => {
            compile(modes, radix, interleave, &out, manifest.as_deref())?
        }
        Command::OptimizeCz { graph, interleave_modes, radix, depth_penalty, out, report, manifest } => {
            let source = match (graph, interleave_modes) {
                (Some(p), _) => GraphSource::File(p),
                (None, Some(n)) => GraphSource::Interleave(n, radix),
                (None, None) => bail!("either `--graph` or `--interleave-modes` is required"),
            };
            optimize(source, depth_penalty, &out, report.as_deref(), manifest.as_deref())?
        }
        Command::SimulateSpectral { config, method, out, shots, seed, manifest } => {
            spectral::simulate(&config, method, &out, shots, seed, manifest.as_deref())?
        }
        Command::CompareTrotter { config, steps, out, manifest } => {
            spectral::compare(&config, &steps, &out, manifest.as_deref())?
        }
        Command::Verify { quick } => {
            return Ok(if verify::run(quick) { ExitCode::SUCCESS } else { ExitCode::FAILURE });
        }
        Command::Report { max_modes, out, manifest } => report::run(max_modes, &out, manifest.as_deref())?,
    }
    Ok(ExitCode::SUCCESS)
}

fn compile(modes: usize, radix: Option<usize>, strategy: InterleaveStrategy, out: &Path, manifest: Option<&Path>) -> Result<()> {
    let radix = match radix {
        Some(r) => r,
        None => FftPlan::radix_for(modes).with_context(|| format!("`modes`: {modes} is not a power of 2 or 3"))?,
    };
    let plan = FftPlan::new(modes, radix, strategy)?;
    let circuit = compile_fft(&plan)?;
    let interleave = if modes > radix {
        let c = interleave_circuit(&interleave_permutation(modes, radix)?, strategy)?;
        Some(json!({ "two_qubit_count": c.two_qubit_count(), "two_qubit_depth": c.two_qubit_depth() }))
    } else {
        None
    };
    let meta = json!({
        "modes": modes,
        "radix": radix,
        "strategy": strategy.name(),
        "gates": circuit.len(),
        "two_qubit_count": circuit.two_qubit_count(),
        "two_qubit_depth": circuit.two_qubit_depth(),
        "top_level_interleave": interleave,
    });
    let mut m = RunManifest::new("compile-fft", json!({ "modes": modes, "radix": radix, "interleave": strategy.name() }), None);
    m.write(out, write_circuit(&circuit).as_bytes())?;
    m.write(&sibling(out, "json"), pretty(&meta)?.as_bytes())?;
    m.save(&manifest_path(out, manifest))?;
    println!("{}", pretty(&meta)?.trim_end());
    Ok(())
}

enum GraphSource {
    File(PathBuf),
    Interleave(usize, usize),
}

fn optimize(source: GraphSource, depth_penalty: f64, out: &Path, report: Option<&Path>, manifest: Option<&Path>) -> Result<()> {
    if !depth_penalty.is_finite() || depth_penalty < 0.0 {
        bail!("`depth-penalty` must be a finite non-negative number, got {depth_penalty}");
    }
    let (graph, input) = match &source {
        GraphSource::File(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            let g = CzGraph::parse_edge_list(&text, None).with_context(|| format!("`graph`: {}", p.display()))?;
            (g, json!({ "graph": p.display().to_string(), "graph_sha256": manifest::digest(text.as_bytes()) }))
        }
        GraphSource::Interleave(n, r) => {
            let g = interleave_cz_graph(&interleave_permutation(*n, *r)?);
            (g, json!({ "interleave_modes": n, "radix": r }))
        }
    };
    let (circuit, steps) = decimate_with_steps(&graph, depth_penalty);
    if !verify_equivalence(&circuit, &graph)? {
        bail!("decimated circuit is not equivalent to the input graph");
    }
    let report_json = json!({
        "edges_in": graph.num_edges(),
        "gates_out": circuit.two_qubit_count(),
        "depth_out": circuit.two_qubit_depth(),
        "steps": steps,
    });
    let mut config = input;
    config["depth_penalty"] = json!(depth_penalty);
    let mut m = RunManifest::new("optimize-cz", config, None);
    m.write(out, write_circuit(&circuit).as_bytes())?;
    let report_path = report.map(Path::to_path_buf).unwrap_or_else(|| sibling(out, "json"));
    m.write(&report_path, pretty(&report_json)?.as_bytes())?;
    m.save(&manifest_path(out, manifest))?;
    println!(
        "edges_in {} gates_out {} depth_out {} steps {}",
        graph.num_edges(),
        circuit.two_qubit_count(),
        circuit.two_qubit_depth(),
        steps.len()
    );
    Ok(())
}

pub(crate) fn pretty(v: &impl serde::Serialize) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}
