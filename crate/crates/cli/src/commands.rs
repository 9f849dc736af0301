//! One function per subcommand. Each returns the process exit code; any
//! `Err` is an input error (exit 1).

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand, ValueEnum};
use nnsp_core::{
    boundary_adjacent, certify_nnsp_with, chain_graph_experiment, grid_graph, max_kappa_with,
    per_cluster, recover, tv, two_cluster_chain, uniform_random, CertifyOptions, ChainParams,
    Instance, PickRule, SamplingSet, SolverConfig,
};

use crate::exit;
use crate::experiment;
use crate::io;
use crate::report::{CertificateSummary, CertifyOutput, RecoverOutput};

#[derive(Debug, Args)]
pub struct CertifyArgs {
    /// Edge list `i,j,weight`.
    #[arg(long)]
    pub graph: PathBuf,
    /// Partition `node,cluster`.
    #[arg(long)]
    pub partition: PathBuf,
    /// Sampling set, one node per line.
    #[arg(long)]
    pub samples: PathBuf,
    /// Check the property at this strength.
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Also locate the largest certified strength.
    #[arg(long)]
    pub max_kappa: bool,
    /// Largest boundary to enumerate.
    #[arg(long, default_value_t = 30)]
    pub signature_cap: usize,
    /// Write one witness flow as CSV `edge_index,flow`.
    #[arg(long)]
    pub flows_out: Option<PathBuf>,
    /// Which witness to write, in enumeration order.
    #[arg(long, default_value_t = 0)]
    pub witness: usize,
}

/// Exit 0 when every requested check passes (certified at `--kappa`, and
/// `κ* > 1` with `--max-kappa`), 2 otherwise.
pub fn certify(args: &CertifyArgs) -> Result<u8> {
    if args.kappa.is_none() && !args.max_kappa {
        bail!("give --kappa, --max-kappa, or both");
    }
    let (graph, ids) = io::read_edge_list(&args.graph)?;
    let part = io::read_partition(&args.partition, &ids)?;
    let samples = io::read_nodes(&args.samples, &ids)?;
    let opts = CertifyOptions {
        signature_cap: args.signature_cap,
        keep_witnesses: args.flows_out.is_some(),
        ..CertifyOptions::default()
    };

    let mut ok = true;
    let mut out = CertifyOutput {
        certificate: None,
        max_kappa: None,
    };
    if let Some(kappa) = args.kappa {
        let cert = certify_nnsp_with(&graph, &part, &samples, kappa, &opts)?;
        ok &= cert.certified();
        if let Some(path) = &args.flows_out {
            match cert.witnesses().get(args.witness) {
                Some((_, flow)) => io::write_flow(path, flow)?,
                None if cert.certified() => bail!(
                    "--witness {} out of range ({} witnesses)",
                    args.witness,
                    cert.witnesses().len()
                ),
                None => eprintln!("refuted; no flow written"),
            }
        }
        out.certificate = Some(CertificateSummary::new(&cert, &graph, &ids));
    }
    if args.max_kappa {
        let star = max_kappa_with(&graph, &part, &samples, &opts)?;
        ok &= star > 1.0;
        out.max_kappa = Some(star);
    }
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(if ok { exit::OK } else { exit::REFUTED })
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    #[arg(long, default_value_t = SolverConfig::default().max_iterations)]
    pub max_iterations: usize,
    #[arg(long, default_value_t = SolverConfig::default().tolerance)]
    pub tolerance: f64,
    #[arg(long, default_value_t = SolverConfig::default().step_scale)]
    pub step_scale: f64,
    #[arg(long, default_value_t = SolverConfig::default().trace_every)]
    pub trace_every: usize,
}

impl From<&SolverArgs> for SolverConfig {
    fn from(a: &SolverArgs) -> Self {
        SolverConfig {
            max_iterations: a.max_iterations,
            tolerance: a.tolerance,
            step_scale: a.step_scale,
            trace_every: a.trace_every,
        }
    }
}

#[derive(Debug, Args)]
pub struct RecoverArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Observed values `node,value`.
    #[arg(long)]
    pub observations: PathBuf,
    /// Write `recovered.csv` and `trace.csv` here; without it the recovered
    /// signal goes to standard output.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

/// Exit 0 on convergence, 3 when the iteration limit is hit (the signal is
/// still written).
pub fn recover_cmd(args: &RecoverArgs) -> Result<u8> {
    let (graph, ids) = io::read_edge_list(&args.graph)?;
    let obs = io::read_observations(&args.observations, &ids)?;
    let res = recover(&graph, &obs, &SolverConfig::from(&args.solver))?;
    match &args.out_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)
                .with_context(|| format!("cannot create {}", dir.display()))?;
            io::write_signal(Some(&dir.join("recovered.csv")), &res.signal, &ids)?;
            io::write_trace(&dir.join("trace.csv"), &res.trace)?;
            let summary = RecoverOutput {
                iterations: res.iterations,
                converged: res.converged,
                tv: tv(&graph, &res.signal)?,
                sampled: obs.samples().len(),
                nodes: graph.node_count(),
            };
            println!("{}", serde_json::to_string_pretty(&summary)?);
        }
        None => io::write_signal(None, &res.signal, &ids)?,
    }
    if !res.converged {
        eprintln!(
            "stopped after {} iterations without converging",
            res.iterations
        );
        return Ok(exit::NOT_CONVERGED);
    }
    Ok(exit::OK)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    /// Middle node of every cluster.
    PerCluster,
    /// Lowest-id node of every cluster.
    LowestId,
    /// Endpoints of every boundary edge.
    Boundary,
    /// `--budget` nodes uniformly at random.
    Uniform,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Required by every strategy except `uniform`.
    #[arg(long)]
    pub partition: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub strategy: Strategy,
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn sample(args: &SampleArgs) -> Result<u8> {
    let (graph, ids) = io::read_edge_list(&args.graph)?;
    let partition = || -> Result<_> {
        let path = args
            .partition
            .as_ref()
            .context("this strategy needs --partition")?;
        io::read_partition(path, &ids)
    };
    let nodes: Vec<usize> = match args.strategy {
        Strategy::PerCluster => per_cluster(&partition()?, PickRule::Middle)
            .nodes()
            .to_vec(),
        Strategy::LowestId => per_cluster(&partition()?, PickRule::LowestId)
            .nodes()
            .to_vec(),
        Strategy::Boundary => match boundary_adjacent(&graph, &partition()?)? {
            Some(set) => set.nodes().to_vec(),
            None => {
                eprintln!("warning: the partition has no boundary edges; empty sampling set");
                Vec::new()
            }
        },
        Strategy::Uniform => {
            let budget = args.budget.context("uniform sampling needs --budget")?;
            uniform_random(graph.node_count(), budget, args.seed)?
                .nodes()
                .to_vec()
        }
    };
    io::write_nodes(args.out.as_deref(), &nodes, &ids)?;
    Ok(exit::OK)
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// JSON experiment config.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
}

pub fn experiment_cmd(args: &ExperimentArgs) -> Result<u8> {
    let (cfg, digest) = experiment::load_config(&args.config)?;
    let report = experiment::run(&cfg, &digest, &args.out_dir)?;
    match report {
        experiment::Report::Chain(r) => {
            for s in &r.sets {
                println!(
                    "{}: mse {:.3e}, max error {:.3e}, kappa* {:.3}",
                    s.name, s.mse, s.max_abs_error, s.max_kappa
                );
            }
        }
        experiment::Report::Roadmap(r) => {
            for s in &r.seeds {
                println!(
                    "seed {}: |M| = {}, mse M1 {:.3e}, mean mse M2 {:.3e}",
                    s.seed, s.samples, s.mse_m1, s.mean_mse_m2
                );
            }
            println!(
                "overall: mse M1 {:.3e}, mean mse M2 {:.3e}",
                r.mean_mse_m1, r.mean_mse_m2
            );
        }
    }
    println!("report: {}", args.out_dir.join("report.json").display());
    Ok(exit::OK)
}

#[derive(Debug, Subcommand)]
pub enum Generate {
    /// Chain of consecutive equal clusters, with its middle-node and
    /// two-clusters-skipped sampling sets.
    Chain {
        #[arg(long, default_value_t = 100)]
        nodes: usize,
        #[arg(long, default_value_t = 10)]
        clusters: usize,
        #[arg(long, default_value_t = 4.0)]
        w_in: f64,
        #[arg(long, default_value_t = 2.0)]
        w_out: f64,
    },
    /// Two halves joined by one edge of weight `1/delta`, sampled at both ends.
    TwoCluster {
        #[arg(long, default_value_t = 10)]
        nodes: usize,
        #[arg(long)]
        delta: f64,
    },
    /// Unit-weight 4-neighbour grid (edge list only).
    Grid {
        #[arg(long, default_value_t = 20)]
        rows: usize,
        #[arg(long, default_value_t = 20)]
        cols: usize,
    },
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(subcommand)]
    pub kind: Generate,
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
}

fn write_instance(dir: &Path, inst: &Instance) -> Result<()> {
    io::write_edge_list(&dir.join("graph.csv"), &inst.graph, &inst.ids)?;
    io::write_partition(&dir.join("partition.csv"), &inst.partition, &inst.ids)?;
    io::write_signal(Some(&dir.join("signal.csv")), &inst.signal, &inst.ids)?;
    Ok(())
}

/// Writes `graph.csv`, and for clustered instances `partition.csv`,
/// `signal.csv` and sampling sets with their observations.
pub fn generate(args: &GenerateArgs) -> Result<u8> {
    let dir = &args.out_dir;
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let sets: Vec<(&str, SamplingSet, Instance)> = match args.kind {
        Generate::Chain {
            nodes,
            clusters,
            w_in,
            w_out,
        } => {
            let inst = chain_graph_experiment(&ChainParams {
                nodes,
                clusters,
                w_in,
                w_out,
                ..ChainParams::default()
            })?;
            let m1 = per_cluster(&inst.partition, PickRule::Middle);
            let skipped: Vec<usize> = [1, 3].into_iter().filter(|&c| c < clusters).collect();
            let m2 = nnsp_core::per_cluster_skipping(&inst.partition, PickRule::Middle, &skipped)?;
            vec![("m1", m1, inst.clone()), ("m2", m2, inst)]
        }
        Generate::TwoCluster { nodes, delta } => {
            let inst = two_cluster_chain(nodes, delta)?;
            let ends = SamplingSet::new(nodes, [0, nodes - 1])?;
            vec![("ends", ends, inst)]
        }
        Generate::Grid { rows, cols } => {
            let (graph, ids) = grid_graph(rows, cols)?;
            io::write_edge_list(&dir.join("graph.csv"), &graph, &ids)?;
            return Ok(exit::OK);
        }
    };
    write_instance(dir, &sets[0].2)?;
    for (name, set, inst) in &sets {
        io::write_nodes(
            Some(&dir.join(format!("{name}.csv"))),
            set.nodes(),
            &inst.ids,
        )?;
        io::write_observations(
            &dir.join(format!("{name}_observations.csv")),
            &inst.signal,
            set.nodes(),
            &inst.ids,
        )?;
    }
    Ok(exit::OK)
}
