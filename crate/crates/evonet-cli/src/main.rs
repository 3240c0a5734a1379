//! Command-line pipeline for growing directed networks and estimating the
//! tail and extremal indices of their influence-score distributions.
//!
//! Exit codes: 0 success, 1 usage error, 2 data/processing error,
//! 3 success with a convergence flag raised.

mod config;
mod io;
mod pipeline;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use config::ExperimentConfig;
use evonet::attachment::evolve;
use evonet::community::{classify_new_nodes, louvain_directed, Direction};
use evonet::evt::{
    default_u_grid, discrepancy_thresholds, hill, intervals_estimator, kgaps_estimator,
    kgaps_grid_select, modified_intervals, plateau_theta, select_k_bootstrap, sequence_gaps,
    BootstrapMode, BootstrapOptions, GapEstimator, CVM_CRITICAL_95,
};
use evonet::generators::build_seed;
use evonet::graph::{ingest_snap, NodeId};
use evonet::scores::{max_linear, pagerank, DanglingMode, PrParams};
use evonet::stats::quantile;
use evonet::theory::{predict_indices, CommunityEvtSummary, DependenceGate};

#[derive(Parser)]
#[command(name = "evonet", version, about = "Evolving-network tail and extremal index pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Override the config rng seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Output format for single-result commands.
    #[arg(long, default_value = "json")]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a multi-component TBT seed graph from a config.
    GenerateSeed {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Ingest a SNAP edge list, optionally extracting a subgraph.
    Ingest {
        #[arg(long)]
        input: PathBuf,
        /// Extraction mode: comma-separated node ids file for `induced`.
        #[arg(long)]
        induced_nodes: Option<PathBuf>,
        /// BFS-ball root (with --radius).
        #[arg(long)]
        root: Option<usize>,
        #[arg(long)]
        radius: Option<usize>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Evolve a graph by preferential attachment.
    Evolve {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Scale-free PageRank scores of a graph.
    Pagerank {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 0.85)]
        damping: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 1000)]
        max_iter: usize,
        #[arg(long, default_value = "literal")]
        mode: DanglingModeArg,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Max-Linear Model scores of a graph.
    Mlm {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 0.85)]
        damping: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Directed Louvain communities.
    Communities {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        target_nc: Option<usize>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Classify appended nodes by their links into seed communities.
    Classify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        communities: PathBuf,
        #[arg(long)]
        log: PathBuf,
        #[arg(long, default_value = "in")]
        direction: DirectionArg,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Tail-index estimate of a score sample.
    Tail {
        #[arg(long)]
        input: PathBuf,
        /// `auto` for bootstrap selection or an explicit integer.
        #[arg(long, default_value = "auto")]
        k: String,
        #[arg(long, default_value_t = 500)]
        resamples: usize,
        #[arg(long, default_value_t = 0.95)]
        level: f64,
        #[arg(long, default_value = "single")]
        mode: BootstrapModeArg,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Extremal-index estimate of a score sequence or graph.
    Extremal {
        #[arg(long)]
        estimator: ExtremalArg,
        /// Score CSV; node-id order is the sequence order.
        #[arg(long)]
        scores: PathBuf,
        /// Graph for the modified-intervals estimator.
        #[arg(long)]
        graph: Option<PathBuf>,
        /// Threshold: `q95`-style quantile or an absolute value.
        #[arg(long, default_value = "q95")]
        u: String,
        #[arg(long, default_value_t = 0)]
        k_gap: u64,
        #[arg(long)]
        exclude_ones: bool,
        #[arg(long, default_value_t = 10)]
        max_path_len: usize,
        #[arg(long, default_value_t = 15)]
        u_grid_points: usize,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Tail/extremal-index predictions for classes of attached nodes.
    Predict {
        /// JSON array of community summaries.
        #[arg(long)]
        communities: PathBuf,
        /// JSON array of {class_index, links} objects.
        #[arg(long)]
        classes: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Run the full experiment pipeline from a config.
    RunExperiment {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum DanglingModeArg {
    Literal,
    Redistribute,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum DirectionArg {
    In,
    Out,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum BootstrapModeArg {
    Single,
    Double,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ExtremalArg {
    Intervals,
    Kgaps,
    Plateau,
    Idis,
    K0dis,
    Kgrid,
    ModifiedIntervals,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are successes, anything else is usage
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(flagged) => {
            if flagged {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Returns true when the run succeeded but a convergence flag was raised.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::GenerateSeed { config, common } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(s) = common.seed {
                cfg.rng_seed = s;
            }
            let spec = cfg
                .seed_spec()
                .context("config seed_graph is not of type tbt")?;
            let seed = build_seed(&spec, cfg.rng_seed)?;
            std::fs::create_dir_all(&common.out)?;
            let mut w = std::io::BufWriter::new(std::fs::File::create(common.out.join("seed.snap"))?);
            seed.graph.write_snap(&mut w)?;
            let part = evonet::community::CommunityPartition::from_labels(&seed.component_of, f64::NAN);
            io::write_partition(&common.out.join("components.csv"), &part)?;
            println!("seed: {} nodes, {} edges", seed.graph.node_count(), seed.graph.edge_count());
            Ok(false)
        }
        Command::Ingest { input, induced_nodes, root, radius, common } => {
            let report = ingest_snap(&input)?;
            std::fs::create_dir_all(&common.out)?;
            let graph = match (induced_nodes, root, radius) {
                (Some(path), None, None) => {
                    let text = std::fs::read_to_string(&path)?;
                    let keep: Vec<NodeId> = text
                        .split([',', '\n', ' '])
                        .filter(|t| !t.trim().is_empty())
                        .map(|t| t.trim().parse::<usize>().map(NodeId))
                        .collect::<std::result::Result<_, _>>()?;
                    report.graph.induced_subgraph(&keep).0
                }
                (None, Some(root), Some(radius)) => {
                    let ball = report.graph.bfs_ball(NodeId(root), radius);
                    report.graph.induced_subgraph(&ball).0
                }
                (None, None, None) => report.graph,
                _ => bail!("use either --induced-nodes or --root with --radius"),
            };
            let mut w = std::io::BufWriter::new(std::fs::File::create(common.out.join("graph.snap"))?);
            graph.write_snap(&mut w)?;
            let mut map = std::io::BufWriter::new(std::fs::File::create(common.out.join("id_map.csv"))?);
            use std::io::Write;
            writeln!(map, "dense_id,original_id")?;
            for (i, orig) in report.original_ids.iter().enumerate() {
                writeln!(map, "{i},{orig}")?;
            }
            println!(
                "ingested {} nodes, {} edges ({} self-loops skipped)",
                graph.node_count(),
                graph.edge_count(),
                report.self_loops_skipped
            );
            Ok(false)
        }
        Command::Evolve { graph, config, common } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(s) = common.seed {
                cfg.rng_seed = s;
            }
            let mut g = ingest_snap(&graph)?.graph;
            let log = evolve(&mut g, &cfg.pa, cfg.rng_seed)?;
            std::fs::create_dir_all(&common.out)?;
            let mut w = std::io::BufWriter::new(std::fs::File::create(common.out.join("evolved.snap"))?);
            g.write_snap(&mut w)?;
            io::write_log(&common.out.join("evolution_log.csv"), &log)?;
            println!("evolved: {} nodes, {} edges, N0 = {}", g.node_count(), g.edge_count(), log.new_nodes().len());
            Ok(false)
        }
        Command::Pagerank { graph, damping, tol, max_iter, mode, common } => {
            let g = ingest_snap(&graph)?.graph;
            let params = PrParams {
                c: damping,
                tol,
                max_iter,
                dangling_mode: match mode {
                    DanglingModeArg::Literal => DanglingMode::Literal,
                    DanglingModeArg::Redistribute => DanglingMode::Redistribute,
                },
            };
            let out = pagerank(&g, &params)?;
            std::fs::create_dir_all(&common.out)?;
            io::write_scores(&common.out.join("scores.csv"), &out.scores)?;
            println!("pagerank: {} iterations, converged = {}", out.iterations, out.converged);
            Ok(!out.converged)
        }
        Command::Mlm { graph, damping, tol, common } => {
            let g = ingest_snap(&graph)?.graph;
            let params = PrParams { c: damping, tol, ..PrParams::default() };
            let q = vec![1.0 - damping; g.node_count()];
            let scores = max_linear(&g, &params, &q)?;
            std::fs::create_dir_all(&common.out)?;
            io::write_scores(&common.out.join("scores.csv"), &scores)?;
            println!("mlm: {} nodes scored", scores.len());
            Ok(false)
        }
        Command::Communities { graph, target_nc, common } => {
            let g = ingest_snap(&graph)?.graph;
            let mut part = louvain_directed(&g, common.seed.unwrap_or(0))?;
            if let Some(t) = target_nc {
                if part.community_count > t {
                    part = part.merged_to(t);
                }
            }
            std::fs::create_dir_all(&common.out)?;
            io::write_partition(&common.out.join("communities.csv"), &part)?;
            println!("communities: {} (modularity {:.4})", part.community_count, part.modularity);
            Ok(false)
        }
        Command::Classify { graph, communities, log, direction, common } => {
            let g = ingest_snap(&graph)?.graph;
            let part = io::read_partition(&communities)?;
            let log = io::read_log(&log)?;
            let direction = match direction {
                DirectionArg::In => Direction::In,
                DirectionArg::Out => Direction::Out,
            };
            let classified = classify_new_nodes(&g, &part, &log.new_nodes(), direction)?;
            std::fs::create_dir_all(&common.out)?;
            io::write_classes(&common.out.join("classes.csv"), &classified)?;
            println!("classified {} nodes", classified.len());
            Ok(false)
        }
        Command::Tail { input, k, resamples, level, mode, common } => {
            let scores = io::read_scores(&input)?;
            let estimate = if k == "auto" {
                let opts = BootstrapOptions {
                    resamples,
                    level,
                    mode: match mode {
                        BootstrapModeArg::Single => BootstrapMode::Single,
                        BootstrapModeArg::Double => BootstrapMode::Double,
                    },
                    rng_seed: common.seed.unwrap_or(0),
                };
                select_k_bootstrap(&scores.values, &opts)?
            } else {
                let k: usize = k.parse().context("--k must be `auto` or an integer")?;
                let alpha = hill(&scores.values, k)?;
                evonet::evt::TailEstimate {
                    alpha_hat: alpha,
                    k_used: k,
                    ci: (alpha, alpha),
                    ci_level: level,
                    k_selection: evonet::evt::KSelection::Fixed,
                }
            };
            emit(&common, &estimate, |t| {
                format!(
                    "alpha_hat,k_used,ci_lo,ci_hi,ci_level\n{},{},{},{},{}\n",
                    t.alpha_hat, t.k_used, t.ci.0, t.ci.1, t.ci_level
                )
            })?;
            Ok(false)
        }
        Command::Extremal {
            estimator,
            scores,
            graph,
            u,
            k_gap,
            exclude_ones,
            max_path_len,
            u_grid_points,
            common,
        } => {
            let score_vec = io::read_scores(&scores)?;
            let series = &score_vec.values;
            let threshold = parse_threshold(&u, series)?;
            #[derive(serde::Serialize)]
            struct Out {
                estimator: String,
                theta: f64,
                threshold: Option<f64>,
                details: serde_json::Value,
            }
            let out = match estimator {
                ExtremalArg::Intervals => {
                    let gaps = sequence_gaps(series, threshold)?;
                    let theta = intervals_estimator(&gaps, exclude_ones)?;
                    Out {
                        estimator: "intervals".into(),
                        theta,
                        threshold: Some(threshold),
                        details: serde_json::json!({"exceedances": gaps.exceedance_count}),
                    }
                }
                ExtremalArg::Kgaps => {
                    let gaps = sequence_gaps(series, threshold)?;
                    let theta = kgaps_estimator(&gaps, k_gap)?;
                    Out {
                        estimator: "kgaps".into(),
                        theta,
                        threshold: Some(threshold),
                        details: serde_json::json!({"k_gap": k_gap}),
                    }
                }
                ExtremalArg::Plateau => {
                    let grid = default_u_grid(series, u_grid_points.max(10));
                    let res = plateau_theta(series, &grid)?;
                    Out {
                        estimator: "plateau".into(),
                        theta: res.theta,
                        threshold: None,
                        details: serde_json::json!({"fallback": res.fallback}),
                    }
                }
                ExtremalArg::Idis | ExtremalArg::K0dis => {
                    let grid = default_u_grid(series, u_grid_points.max(10));
                    let est = if matches!(estimator, ExtremalArg::Idis) {
                        GapEstimator::Intervals { exclude_ones }
                    } else {
                        GapEstimator::KGaps { k: 0 }
                    };
                    let res = discrepancy_thresholds(series, est, &grid, CVM_CRITICAL_95)?;
                    Out {
                        estimator: if matches!(estimator, ExtremalArg::Idis) { "idis" } else { "k0dis" }
                            .into(),
                        theta: res.theta1,
                        threshold: None,
                        details: serde_json::json!({
                            "theta1": res.theta1,
                            "theta2": res.theta2,
                            "fallback": res.fallback,
                            "accepted_thresholds": res.accepted.len(),
                        }),
                    }
                }
                ExtremalArg::Kgrid => {
                    let grid = default_u_grid(series, u_grid_points.max(10));
                    let (k, res) = kgaps_grid_select(series, &grid, 5, CVM_CRITICAL_95)?;
                    Out {
                        estimator: "kgrid".into(),
                        theta: res.theta1,
                        threshold: None,
                        details: serde_json::json!({"k_gap": k, "theta2": res.theta2, "fallback": res.fallback}),
                    }
                }
                ExtremalArg::ModifiedIntervals => {
                    let path = graph.context("--graph is required for modified-intervals")?;
                    let g = ingest_snap(&path)?.graph;
                    if g.node_count() != series.len() {
                        bail!(
                            "graph has {} nodes but scores have {} rows",
                            g.node_count(),
                            series.len()
                        );
                    }
                    let est = modified_intervals(&g, &score_vec, threshold, max_path_len)?;
                    Out {
                        estimator: "modified-intervals".into(),
                        theta: est.theta_hat,
                        threshold: Some(threshold),
                        details: serde_json::json!({}),
                    }
                }
            };
            emit(&common, &out, |o| format!("estimator,theta,threshold\n{},{},{}\n", o.estimator, o.theta, o.threshold.unwrap_or(f64::NAN)))?;
            Ok(false)
        }
        Command::Predict { communities, classes, common } => {
            let comms: Vec<CommunityEvtSummary<f64>> = {
                #[derive(serde::Deserialize)]
                struct In {
                    alpha_hat: f64,
                    ci: (f64, f64),
                    theta: f64,
                    stationary: bool,
                    sample_max: f64,
                }
                let text = std::fs::read_to_string(&communities)?;
                let raw: Vec<In> = serde_json::from_str(&text)?;
                raw.into_iter()
                    .map(|r| CommunityEvtSummary {
                        tail: evonet::evt::TailEstimate {
                            alpha_hat: r.alpha_hat,
                            k_used: 0,
                            ci: r.ci,
                            ci_level: 0.95,
                            k_selection: evonet::evt::KSelection::Fixed,
                        },
                        theta: r.theta,
                        stationary: r.stationary,
                        sample_max: r.sample_max,
                    })
                    .collect()
            };
            #[derive(serde::Deserialize)]
            struct ClassIn {
                class_index: usize,
                links: Vec<usize>,
            }
            let links: Vec<ClassIn> = serde_json::from_str(&std::fs::read_to_string(&classes)?)?;
            let links: Vec<(usize, Vec<usize>)> =
                links.into_iter().map(|c| (c.class_index, c.links)).collect();
            let preds = predict_indices(&comms, &links, DependenceGate::pass())?;
            emit(&common, &preds, |p| {
                let mut s = String::from("class,k_pred,theta_mlm,theta_pr,basis\n");
                for pr in p {
                    s.push_str(&format!(
                        "{},{},{:?},{:?},{:?}\n",
                        pr.class_index, pr.k_pred, pr.theta_mlm, pr.theta_pr, pr.basis
                    ));
                }
                s
            })?;
            Ok(false)
        }
        Command::RunExperiment { config, common } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(s) = common.seed {
                cfg.rng_seed = s;
            }
            if common.out != Path::new("out") {
                cfg.output_dir = common.out.to_string_lossy().into_owned();
            }
            let bundle = pipeline::run_experiment(&cfg)?;
            println!(
                "experiment done: N0 = {}, outputs in {:?} (config {})",
                bundle.n0, bundle.output_dir, bundle.config_hash
            );
            for w in &bundle.warnings {
                eprintln!("warning: {w}");
            }
            Ok(!bundle.pagerank_converged)
        }
    }
}

fn parse_threshold(u: &str, series: &[f64]) -> Result<f64> {
    if let Some(q) = u.strip_prefix('q') {
        let q: f64 = q.parse().context("quantile like q95")?;
        Ok(quantile(series, q / 100.0))
    } else {
        Ok(u.parse()?)
    }
}

fn emit<T: serde::Serialize>(common: &CommonOpts, value: &T, to_csv: impl Fn(&T) -> String) -> Result<()> {
    match common.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(value)?),
        Format::Csv => print!("{}", to_csv(value)),
    }
    Ok(())
}
