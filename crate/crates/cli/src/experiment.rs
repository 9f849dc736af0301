//! The chain and roadmap experiments.
//!
//! Reports contain no timings or absolute paths, so identical configs give
//! byte-identical outputs.

use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use nnsp_core::{
    boundary, boundary_adjacent, certify_nnsp, chain_graph_experiment, clustered_signal,
    geodesic_partition, max_kappa, mse, per_cluster, per_cluster_skipping, recover, uniform_random,
    ChainParams, ClusterCoefficients, GraphSignal, NodeIds, Observation, PickRule, SamplingSet,
    SolverConfig, WeightedGraph, GENERATOR,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::io;
use crate::report::{CertificateSummary, SolverSettings};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Chain,
    Roadmap,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Weights {
    pub w_in: f64,
    pub w_out: f64,
}

impl Default for Weights {
    fn default() -> Self {
        Weights {
            w_in: 4.0,
            w_out: 2.0,
        }
    }
}

/// Experiment description, read from JSON. `graph_path` is resolved
/// relative to the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub graph_path: Option<PathBuf>,
    #[serde(default)]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub weights: Weights,
    #[serde(default = "default_centers")]
    pub cluster_centers: usize,
    #[serde(default = "default_runs")]
    pub runs: usize,
    /// Cluster values, cycled over the clusters. Defaults to `[1, 5]` for
    /// the chain and `[1, 5, 3]` for the roadmap.
    #[serde(default)]
    pub coefficients: Option<Vec<f64>>,
    /// Chain length and cluster count (chain only).
    #[serde(default = "default_nodes")]
    pub nodes: usize,
    #[serde(default = "default_clusters")]
    pub clusters: usize,
    #[serde(default)]
    pub solver: SolverSettings,
}

fn default_centers() -> usize {
    3
}
fn default_runs() -> usize {
    100
}
fn default_nodes() -> usize {
    100
}
fn default_clusters() -> usize {
    10
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        ensure!(self.runs >= 1, "runs must be at least 1");
        let w = self.weights;
        ensure!(
            w.w_in > 0.0 && w.w_out > 0.0 && w.w_in.is_finite() && w.w_out.is_finite(),
            "weights must be positive"
        );
        if let Some(c) = &self.coefficients {
            ensure!(!c.is_empty(), "coefficients must not be empty");
        }
        if self.experiment == ExperimentKind::Roadmap {
            ensure!(
                self.graph_path.is_some(),
                "roadmap experiment requires graph_path"
            );
            ensure!(
                !self.seeds.is_empty(),
                "roadmap experiment requires at least one seed"
            );
            ensure!(
                self.cluster_centers >= 1,
                "cluster_centers must be at least 1"
            );
        }
        Ok(())
    }
}

/// Reads and validates a config, returning it with the SHA-256 of its bytes.
pub fn load_config(path: &Path) -> Result<(ExperimentConfig, String)> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    let mut cfg: ExperimentConfig = serde_json::from_str(&text)
        .with_context(|| format!("invalid config {}", path.display()))?;
    cfg.validate()?;
    if let Some(p) = &cfg.graph_path {
        if p.is_relative() {
            let base = path.parent().unwrap_or(Path::new("."));
            cfg.graph_path = Some(base.join(p));
        }
    }
    Ok((cfg, io::digest(path)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetReport {
    pub name: String,
    pub rule: String,
    pub nodes: Vec<u64>,
    pub mse: f64,
    pub max_abs_error: f64,
    pub iterations: usize,
    pub converged: bool,
    pub max_kappa: f64,
    pub certificate: CertificateSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub experiment: ExperimentKind,
    pub config_digest: String,
    pub generator: String,
    pub solver: SolverSettings,
    pub weights: Weights,
    pub nodes: usize,
    pub clusters: usize,
    pub coefficients: Vec<f64>,
    pub sets: Vec<SetReport>,
    /// CSV `node,true,recovered_M1,recovered_M2`, relative to the output directory.
    pub signals_csv: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub file_nodes: usize,
    pub file_edges: usize,
    pub nodes: usize,
    pub edges: usize,
    /// Nodes outside the largest connected component, which are not used.
    pub dropped_nodes: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedReport {
    pub seed: u64,
    pub centers: Vec<u64>,
    pub cluster_sizes: Vec<usize>,
    pub boundary_size: usize,
    pub samples: usize,
    pub mse_m1: f64,
    pub converged_m1: bool,
    /// Seeds of the random sets, `(seed << 32) | run`.
    pub run_seeds: Vec<u64>,
    pub mse_m2: Vec<f64>,
    pub unconverged_m2: usize,
    pub mean_mse_m2: f64,
    /// CSV `node,cluster,true,recovered_M1,recovered_M2_run0`.
    pub signals_csv: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoadmapReport {
    pub experiment: ExperimentKind,
    pub config_digest: String,
    pub graph_digest: String,
    pub generator: String,
    pub solver: SolverSettings,
    pub weights: Weights,
    pub coefficients: Vec<f64>,
    pub runs: usize,
    pub graph: GraphSummary,
    pub seeds: Vec<SeedReport>,
    /// Mean over seeds of the boundary-adjacent error.
    pub mean_mse_m1: f64,
    /// Mean over every random run of every seed.
    pub mean_mse_m2: f64,
    /// CSV `seed,run,strategy,mse`.
    pub runs_csv: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Report {
    Chain(ChainReport),
    Roadmap(RoadmapReport),
}

/// Runs the configured experiment, writing CSVs and `report.json` into
/// `out_dir`.
pub fn run(cfg: &ExperimentConfig, config_digest: &str, out_dir: &Path) -> Result<Report> {
    cfg.validate()?;
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create {}", out_dir.display()))?;
    let report = match cfg.experiment {
        ExperimentKind::Chain => Report::Chain(run_chain(cfg, config_digest, out_dir)?),
        ExperimentKind::Roadmap => Report::Roadmap(run_roadmap(cfg, config_digest, out_dir)?),
    };
    let path = out_dir.join("report.json");
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    std::fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(report)
}

fn solve(
    graph: &WeightedGraph,
    truth: &GraphSignal,
    samples: &SamplingSet,
    cfg: &SolverConfig,
) -> Result<(GraphSignal, usize, bool)> {
    let obs = Observation::of_signal(truth, samples)?;
    let res = recover(graph, &obs, cfg)?;
    Ok((res.signal, res.iterations, res.converged))
}

pub fn run_chain(
    cfg: &ExperimentConfig,
    config_digest: &str,
    out_dir: &Path,
) -> Result<ChainReport> {
    let coefficients = cfg.coefficients.clone().unwrap_or_else(|| vec![1.0, 5.0]);
    let inst = chain_graph_experiment(&ChainParams {
        nodes: cfg.nodes,
        clusters: cfg.clusters,
        w_in: cfg.weights.w_in,
        w_out: cfg.weights.w_out,
        coefficients: coefficients.clone(),
    })?;
    let solver = SolverConfig::from(cfg.solver);
    let m1 = per_cluster(&inst.partition, PickRule::Middle);
    let skipped: Vec<usize> = [1, 3].into_iter().filter(|&c| c < cfg.clusters).collect();
    let m2 = per_cluster_skipping(&inst.partition, PickRule::Middle, &skipped)?;
    let sets = [
        ("M1", "middle node of every cluster".to_string(), m1),
        (
            "M2",
            format!(
                "middle node of every cluster except {:?}, topped up with the lowest unused nodes of the others",
                skipped.iter().map(|c| c + 1).collect::<Vec<_>>()
            ),
            m2,
        ),
    ];

    let mut reports = Vec::new();
    let mut recovered = Vec::new();
    for (name, rule, samples) in sets {
        let (signal, iterations, converged) = solve(&inst.graph, &inst.signal, &samples, &solver)?;
        let kappa_star = max_kappa(&inst.graph, &inst.partition, &samples)?;
        let cert = certify_nnsp(&inst.graph, &inst.partition, &samples, 2.0)?;
        reports.push(SetReport {
            name: name.to_string(),
            rule,
            nodes: samples
                .nodes()
                .iter()
                .map(|&i| inst.ids.original(i))
                .collect(),
            mse: mse(&signal, &inst.signal)?,
            max_abs_error: signal.max_abs_diff(&inst.signal)?,
            iterations,
            converged,
            max_kappa: kappa_star,
            certificate: CertificateSummary::new(&cert, &inst.graph, &inst.ids),
        });
        recovered.push(signal);
    }

    let signals_csv = "chain_signals.csv".to_string();
    let mut w = io::writer(Some(&out_dir.join(&signals_csv)))?;
    w.write_record(["node", "true", "recovered_M1", "recovered_M2"])?;
    let columns = inst
        .signal
        .values()
        .iter()
        .zip(recovered[0].values())
        .zip(recovered[1].values());
    for (i, ((t, a), b)) in columns.enumerate() {
        w.serialize((inst.ids.original(i), t, a, b))?;
    }
    w.flush()?;

    Ok(ChainReport {
        experiment: ExperimentKind::Chain,
        config_digest: config_digest.to_string(),
        generator: GENERATOR.to_string(),
        solver: cfg.solver,
        weights: cfg.weights,
        nodes: cfg.nodes,
        clusters: cfg.clusters,
        coefficients,
        sets: reports,
        signals_csv,
    })
}

/// Restricts to the largest connected component (first one on ties).
fn largest_component(
    graph: WeightedGraph,
    ids: NodeIds,
) -> Result<(WeightedGraph, NodeIds, Vec<u64>)> {
    let components = graph.components();
    if components.len() == 1 {
        return Ok((graph, ids, Vec::new()));
    }
    let keep = components
        .iter()
        .enumerate()
        .max_by_key(|(k, c)| (c.len(), std::cmp::Reverse(*k)))
        .map(|(_, c)| c.clone())
        .expect("a graph has at least one component");
    let mut dropped: Vec<u64> = components
        .iter()
        .filter(|c| **c != keep)
        .flatten()
        .map(|&i| ids.original(i))
        .collect();
    dropped.sort_unstable();
    let sub = graph.induced(&keep)?;
    let sub_ids = ids.restrict(&keep);
    Ok((sub, sub_ids, dropped))
}

/// Seed of the `run`-th random sampling set drawn under `seed`.
pub fn run_seed(seed: u64, run: usize) -> u64 {
    (seed << 32) | run as u64
}

pub fn run_roadmap(
    cfg: &ExperimentConfig,
    config_digest: &str,
    out_dir: &Path,
) -> Result<RoadmapReport> {
    let Some(path) = &cfg.graph_path else {
        bail!("roadmap experiment requires graph_path");
    };
    let graph_digest = io::digest(path)?;
    let (graph, ids) = io::read_edge_list(path)?;
    let (file_nodes, file_edges) = (graph.node_count(), graph.edge_count());
    let (graph, ids, dropped_nodes) = largest_component(graph, ids)?;
    let n = graph.node_count();
    ensure!(
        cfg.cluster_centers <= n,
        "cluster_centers ({}) exceeds the node count ({n})",
        cfg.cluster_centers
    );
    let coefficients = cfg
        .coefficients
        .clone()
        .unwrap_or_else(|| vec![1.0, 5.0, 3.0]);
    let solver = SolverConfig::from(cfg.solver);

    let mut seeds = Vec::new();
    let mut runs_rows = Vec::new();
    for &seed in &cfg.seeds {
        let centers = uniform_random(n, cfg.cluster_centers, seed)?;
        let part = geodesic_partition(&graph, centers.nodes())?;
        let bnd = boundary(&graph, &part)?;
        let weights: Vec<f64> = (0..graph.edge_count())
            .map(|e| {
                if bnd.contains(e) {
                    cfg.weights.w_out
                } else {
                    cfg.weights.w_in
                }
            })
            .collect();
        let g = graph.with_weights(&weights)?;
        let a = ClusterCoefficients::new(
            (0..part.cluster_count())
                .map(|c| coefficients[c % coefficients.len()])
                .collect(),
        )?;
        let truth = clustered_signal(&g, &part, &a)?;

        let m1 = boundary_adjacent(&g, &part)?
            .with_context(|| format!("seed {seed}: the partition has no boundary"))?;
        let (x1, _, converged_m1) = solve(&g, &truth, &m1, &solver)?;
        let mse_m1 = mse(&x1, &truth)?;

        let run_seeds: Vec<u64> = (0..cfg.runs).map(|r| run_seed(seed, r)).collect();
        let outcomes = run_seeds
            .par_iter()
            .map(|&s| {
                let m2 = uniform_random(n, m1.len(), s)?;
                let (x, _, converged) = solve(&g, &truth, &m2, &solver)?;
                Ok((mse(&x, &truth)?, converged, x))
            })
            .collect::<Result<Vec<_>>>()?;
        let mse_m2: Vec<f64> = outcomes.iter().map(|o| o.0).collect();
        let unconverged_m2 = outcomes.iter().filter(|o| !o.1).count();
        let mean_mse_m2 = mse_m2.iter().sum::<f64>() / mse_m2.len() as f64;

        runs_rows.push((seed, None, mse_m1));
        for (r, &v) in mse_m2.iter().enumerate() {
            runs_rows.push((seed, Some(r), v));
        }

        let signals_csv = format!("roadmap_seed{seed}.csv");
        let mut w = io::writer(Some(&out_dir.join(&signals_csv)))?;
        w.write_record([
            "node",
            "cluster",
            "true",
            "recovered_M1",
            "recovered_M2_run0",
        ])?;
        for i in 0..n {
            w.serialize((
                ids.original(i),
                part.cluster_of(i),
                truth[i],
                x1[i],
                outcomes[0].2[i],
            ))?;
        }
        w.flush()?;

        seeds.push(SeedReport {
            seed,
            centers: centers.nodes().iter().map(|&i| ids.original(i)).collect(),
            cluster_sizes: part.clusters().iter().map(Vec::len).collect(),
            boundary_size: bnd.len(),
            samples: m1.len(),
            mse_m1,
            converged_m1,
            run_seeds,
            mse_m2,
            unconverged_m2,
            mean_mse_m2,
            signals_csv,
        });
    }

    let runs_csv = "roadmap_runs.csv".to_string();
    let mut w = io::writer(Some(&out_dir.join(&runs_csv)))?;
    w.write_record(["seed", "run", "strategy", "mse"])?;
    for (seed, run, v) in &runs_rows {
        match run {
            None => w.serialize((seed, "", "boundary_adjacent", v))?,
            Some(r) => w.serialize((seed, r.to_string(), "uniform_random", v))?,
        }
    }
    w.flush()?;

    let mean_mse_m1 = seeds.iter().map(|s| s.mse_m1).sum::<f64>() / seeds.len() as f64;
    let all: Vec<f64> = seeds
        .iter()
        .flat_map(|s| s.mse_m2.iter().copied())
        .collect();
    let mean_mse_m2 = all.iter().sum::<f64>() / all.len() as f64;
    Ok(RoadmapReport {
        experiment: ExperimentKind::Roadmap,
        config_digest: config_digest.to_string(),
        graph_digest,
        generator: GENERATOR.to_string(),
        solver: cfg.solver,
        weights: cfg.weights,
        coefficients,
        runs: cfg.runs,
        graph: GraphSummary {
            file_nodes,
            file_edges,
            nodes: n,
            edges: graph.edge_count(),
            dropped_nodes,
        },
        seeds,
        mean_mse_m1,
        mean_mse_m2,
        runs_csv,
    })
}
