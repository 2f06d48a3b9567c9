//! Command-line front end: instance generation, certification, colouring,
//! extraction, batch experiments and offline validation.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use tightpath::connectors::ClusterFamily;
use tightpath::extraction::{run_pipeline, Host, PipelineParams};
use tightpath::graph::{certify_p1, sample_expander, CertifyMode, ExpanderParams};
use tightpath::harness::{
    colour_cluster_mixer, colour_connector_killer, colour_uniform, run_experiment, trial_rng, ExperimentConfig,
    MAX_ORACLE_CAP,
};
use tightpath::hypergraph::{brute_force_longest_mono_tight_path, validate_tight_path};
use tightpath::{Colour, Error, Graph, Hypergraph3, TightPath3, TwoColoring};

#[derive(Parser)]
#[command(name = "tightpath", version, about = "Monochromatic tight paths in blown-up graph powers")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Base seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Pipeline parameters as JSON.
    #[arg(long, global = true)]
    params: Option<PathBuf>,
    /// Use the original constants (and enforce their identities).
    #[arg(long, global = true)]
    strict_constants: bool,
    /// Where to write the JSON report.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Run the exhaustive oracle on hypergraphs with at most this many vertices.
    #[arg(long, global = true)]
    oracle_cap: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a random regular graph, optionally with its host hypergraph.
    Sample {
        #[arg(long)]
        vertices: usize,
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        out: PathBuf,
        /// Also write the triangle hypergraph of the blown-up power.
        #[arg(long)]
        hypergraph: Option<PathBuf>,
    },
    /// Check the expansion property of a graph.
    Certify {
        #[arg(long)]
        graph: PathBuf,
        /// Scale: sets of size ceil(eps * n) must span an edge.
        #[arg(long)]
        n: usize,
        /// Sample this many set pairs instead of the spectral bound.
        #[arg(long)]
        sampled: Option<usize>,
    },
    /// Colour a hypergraph.
    Colour {
        #[arg(long)]
        hypergraph: PathBuf,
        #[arg(long, value_enum)]
        colourer: ColourerArg,
        #[arg(long, default_value_t = 0.5)]
        p_blue: f64,
        /// Size of the consecutive vertex blocks treated as clusters.
        #[arg(long)]
        cluster_size: Option<usize>,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the pipeline on a graph and a colouring of its host hypergraph.
    Extract {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        colouring: PathBuf,
        /// Where to write the path file on success.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a batch experiment from a JSON config.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Directory for replayable per-trial files.
        #[arg(long)]
        artifacts: Option<PathBuf>,
    },
    /// Re-check a path file against a hypergraph and colouring.
    Validate {
        #[arg(long)]
        hypergraph: PathBuf,
        #[arg(long)]
        colouring: PathBuf,
        #[arg(long)]
        path: PathBuf,
        #[arg(long, default_value_t = 0)]
        min_length: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ColourerArg {
    Uniform,
    AllBlue,
    AllRed,
    Killer,
    Mixer,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Hypothesis(_) => 2,
        Error::Fault(_) => 3,
        _ => 4,
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn load_params(global: &Global) -> Result<PipelineParams, Error> {
    let mut params = match &global.params {
        Some(path) => serde_json::from_str(&read(path)?)
            .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?,
        None => PipelineParams::relaxed(2, 3, 6, 6, 1, 3),
    };
    if global.strict_constants {
        params.strict_constants = true;
    }
    params.validate()?;
    Ok(params)
}

fn write_report<T: Serialize>(global: &Global, value: &T) -> Result<(), Error> {
    let json = serde_json::to_string_pretty(value).expect("report serialises");
    match &global.report {
        Some(path) => fs::write(path, json + "\n")?,
        None => println!("{json}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8, Error> {
    let g = &cli.global;
    match cli.command {
        Command::Sample { vertices, degree, out, hypergraph } => {
            let params = load_params(g)?;
            let ep = ExpanderParams { eps: params.eps, a: vertices, b: degree, seed: g.seed };
            ep.validate()?;
            let graph = sample_expander(&ep, 1)?;
            fs::write(&out, graph.to_text())?;
            if let Some(path) = hypergraph {
                let host = Host::build(&graph, params.k, params.t_prime)?;
                fs::write(path, host.h.to_text())?;
            }
            Ok(0)
        }
        Command::Certify { graph, n, sampled } => {
            let params = load_params(g)?;
            let graph = Graph::from_text(&read(&graph)?)?;
            let mode = match sampled {
                Some(trials) => CertifyMode::Sampled { trials, seed: g.seed },
                None => CertifyMode::spectral(),
            };
            let cert = certify_p1(&graph, params.eps, n, mode)?;
            write_report(g, &cert)?;
            Ok(if cert.passed { 0 } else { 2 })
        }
        Command::Colour { hypergraph, colourer, p_blue, cluster_size, budget, out } => {
            let h = Hypergraph3::from_text(&read(&hypergraph)?)?;
            let mut rng = trial_rng(g.seed, 0);
            let clusters = |size: Option<usize>| -> Result<Vec<Vec<usize>>, Error> {
                let size = size
                    .or_else(|| h.cluster_map().map(|m| m.iter().filter(|&&o| o == 0).count()))
                    .filter(|&s| s > 0)
                    .ok_or_else(|| Error::InvalidInput("--cluster-size is required".into()))?;
                Ok((0..h.num_vertices() / size).map(|i| (i * size..(i + 1) * size).collect()).collect())
            };
            let c = match colourer {
                ColourerArg::Uniform => colour_uniform(&h, p_blue, &mut rng),
                ColourerArg::AllBlue => TwoColoring::monochromatic(&h, Colour::Blue),
                ColourerArg::AllRed => TwoColoring::monochromatic(&h, Colour::Red),
                ColourerArg::Killer => {
                    let family = ClusterFamily::new(clusters(cluster_size)?.into_iter().enumerate(), Colour::Blue)?;
                    let outcome = colour_connector_killer(&h, &family, p_blue, g.seed);
                    if outcome.residual > 0 {
                        eprintln!("{} blue connectors survived", outcome.residual);
                    }
                    outcome.colouring
                }
                ColourerArg::Mixer => {
                    let t = load_params(g)?.t;
                    colour_cluster_mixer(&h, &clusters(cluster_size)?, t, budget, &mut rng)?.0
                }
            };
            fs::write(out, c.to_text())?;
            Ok(0)
        }
        Command::Extract { graph, colouring, out } => {
            let params = load_params(g)?;
            let graph = Graph::from_text(&read(&graph)?)?;
            let host = Host::build(&graph, params.k, params.t_prime)?;
            let c = TwoColoring::from_text(&host.h, &read(&colouring)?)?;
            let report = run_pipeline(&host, &params, &c);
            let oracle = match g.oracle_cap {
                Some(cap) if cap > MAX_ORACLE_CAP => {
                    return Err(Error::InvalidInput(format!("--oracle-cap must be at most {MAX_ORACLE_CAP}")))
                }
                Some(cap) if host.h.num_vertices() <= cap => {
                    Some(brute_force_longest_mono_tight_path(&host.h, &c, host.h.num_vertices())?.1.len())
                }
                _ => None,
            };
            #[derive(Serialize)]
            struct Extracted<'a> {
                #[serde(flatten)]
                report: &'a tightpath::extraction::PipelineReport,
                oracle_length: Option<usize>,
            }
            write_report(g, &Extracted { report: &report, oracle_length: oracle })?;
            if let (Some(out), Some(colour), Some(path)) = (out, report.colour, &report.path) {
                if report.succeeded() {
                    fs::write(out, TightPath3::new(path.clone()).to_text(colour))?;
                }
            }
            Ok(match &report.failure {
                None => 0,
                Some(f) if f.class == "hypothesis" => 2,
                Some(f) if f.class == "fault" => 3,
                Some(_) => 4,
            })
        }
        Command::Experiment { config, artifacts } => {
            let mut cfg: ExperimentConfig = serde_json::from_str(&read(&config)?)
                .map_err(|e| Error::InvalidInput(format!("{}: {e}", config.display())))?;
            if let Some(cap) = g.oracle_cap {
                cfg.oracle_cap = cap;
            }
            if g.strict_constants {
                cfg.params.strict_constants = true;
            }
            if g.seed != 0 {
                cfg.seed = g.seed;
            }
            if artifacts.is_some() {
                cfg.artifacts = artifacts;
            }
            let report = run_experiment(&cfg)?;
            match &g.report {
                Some(path) => fs::write(path, report.to_json() + "\n")?,
                None => println!("{}", report.to_json()),
            }
            let agg = &report.aggregate;
            eprintln!(
                "{} trials: {} successes ({} blue, {} red branch), {} hypothesis failures, {} faults",
                agg.trials, agg.successes, agg.blue_branch, agg.red_branch, agg.hypothesis_failures, agg.faults
            );
            Ok(if agg.faults > 0 || agg.invalid_outputs > 0 || agg.oracle_violations > 0 { 3 } else { 0 })
        }
        Command::Validate { hypergraph, colouring, path, min_length } => {
            let h = Hypergraph3::from_text(&read(&hypergraph)?)?;
            let c = TwoColoring::from_text(&h, &read(&colouring)?)?;
            let (colour, p) = TightPath3::from_text(&read(&path)?)?;
            match validate_tight_path(&h, &c, &p, colour) {
                Ok(()) if p.len() >= min_length => {
                    println!("valid {colour} tight path on {} vertices", p.len());
                    Ok(0)
                }
                Ok(()) => {
                    println!("path has {} vertices, fewer than {min_length}", p.len());
                    Ok(3)
                }
                Err(e) => {
                    println!("invalid: {e}");
                    Ok(3)
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
