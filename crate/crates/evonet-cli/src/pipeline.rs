//! End-to-end experiment: seed -> communities -> diagnostics -> ranking ->
//! evolution -> classification -> scoring -> estimation -> prediction.
//!
//! Every stage writes its outputs under the configured directory so any
//! stage can also be rerun standalone through the matching subcommand. All
//! CSV rows carry the rng seed and the config hash.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;

use evonet::attachment::{evolve, PaParams};
use evonet::community::{
    classify_new_nodes, louvain_directed, mean_excess, ClassifiedNode, CommunityPartition,
    Direction, MeanExcessCurve,
};
use evonet::evt::{
    discrepancy_thresholds, graph_inter_exceedances, hill, intervals_estimator, kgaps_grid_select,
    plateau_theta, select_k_bootstrap, sequence_gaps, BootstrapMode, BootstrapOptions,
    GapEstimator, TailEstimate, CVM_CRITICAL_95,
};
use evonet::generators::build_seed;
use evonet::graph::{ingest_snap, DirectedGraph, NodeId};
use evonet::scores::{max_linear, pagerank, ScoreVector};
use evonet::stats::{quantile, quantile_grid};
use evonet::theory::{
    dominance_diagnostics, predict_indices, CommunityEvtSummary, DependenceGate, TheoryPrediction,
};

use crate::config::{BootstrapModeConfig, Extraction, ExperimentConfig, SeedGraphConfig};
use crate::io;

/// Paths of everything the run produced.
#[derive(Debug, Serialize)]
pub struct ResultsBundle {
    pub output_dir: PathBuf,
    pub config_hash: String,
    pub n0: usize,
    pub class_sizes_in: Vec<usize>,
    pub class_sizes_out: Vec<usize>,
    pub pagerank_converged: bool,
    pub warnings: Vec<String>,
}

struct Ctx {
    cfg: ExperimentConfig,
    hash: String,
    out: PathBuf,
    warnings: Vec<String>,
}

impl Ctx {
    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultsBundle> {
    let out = PathBuf::from(&cfg.output_dir);
    std::fs::create_dir_all(&out).with_context(|| format!("create {out:?}"))?;
    let mut ctx = Ctx { cfg: cfg.clone(), hash: cfg.hash(), out, warnings: Vec::new() };

    // --- stage: seed graph + communities -------------------------------
    let (seed_graph, mut partition) = build_seed_stage(&mut ctx).context("seed stage")?;
    let pr_params = ctx.cfg.pagerank.to_params();

    // --- stage: seed scores + stationarity diagnostics ------------------
    let seed_pr = pagerank(&seed_graph, &pr_params).context("seed pagerank")?;
    if !seed_pr.converged {
        ctx.warnings.push("seed pagerank did not converge".into());
    }
    io::write_scores(&ctx.path("scores_seed_pagerank.csv"), &seed_pr.scores)?;

    // --- stage: per-community tail ranking ------------------------------
    let members = partition.members();
    let mut before: Vec<Option<TailEstimate<f64>>> = Vec::new();
    for m in &members {
        let sample: Vec<f64> = m.iter().map(|v| seed_pr.scores.get(*v)).collect();
        before.push(tail_estimate(&ctx, &sample, 1));
    }
    // rank communities by ascending tail estimate; unestimable ones go last
    let mut order: Vec<usize> = (0..partition.community_count).collect();
    order.sort_by(|&a, &b| {
        let ka = before[a].as_ref().map(|t| t.alpha_hat).unwrap_or(f64::INFINITY);
        let kb = before[b].as_ref().map(|t| t.alpha_hat).unwrap_or(f64::INFINITY);
        ka.partial_cmp(&kb).expect("finite estimates").then(a.cmp(&b))
    });
    let mut new_of_old = vec![0usize; partition.community_count];
    for (new, &old) in order.iter().enumerate() {
        new_of_old[old] = new;
    }
    partition = partition.relabeled(&new_of_old);
    let mut before_ranked: Vec<Option<TailEstimate<f64>>> = vec![None; before.len()];
    for (old, est) in before.into_iter().enumerate() {
        before_ranked[new_of_old[old]] = est;
    }
    io::write_partition(&ctx.path("components.csv"), &partition)?;

    let members = partition.members();
    let n_c = partition.community_count;

    // stationarity proxy per ranked community
    let mut stationary = vec![false; n_c];
    let mut mean_excess_rows: Vec<(String, MeanExcessCurve<f64>)> = Vec::new();
    for (c, m) in members.iter().enumerate() {
        let sample: Vec<f64> = m.iter().map(|v| seed_pr.scores.get(*v)).collect();
        if sample.len() >= 25 {
            let grid = quantile_grid(&sample, 0.5, 0.95, 10);
            match mean_excess(&sample, &grid) {
                Ok(curve) => {
                    stationary[c] = curve.pareto_type();
                    mean_excess_rows.push((format!("community_{}", c + 1), curve));
                }
                Err(e) => ctx.warnings.push(format!("mean excess community_{}: {e}", c + 1)),
            }
        }
    }

    // --- stage: evolution with checkpoints ------------------------------
    let mut graph = seed_graph.clone();
    let seed_node_count = graph.node_count();
    let e_init = graph.edge_count();
    let mut curve_rows: Vec<CurveRow> = Vec::new();
    let checkpoints = ctx.cfg.checkpoints.max(1);
    let chunk = (ctx.cfg.pa.steps / checkpoints).max(1);
    let mut all_records = Vec::new();
    let mut done = 0usize;
    let mut cp_index = 0usize;
    while done < ctx.cfg.pa.steps {
        let this = chunk.min(ctx.cfg.pa.steps - done);
        let p = PaParams { steps: this, ..ctx.cfg.pa.clone() };
        let log = evolve(&mut graph, &p, ctx.cfg.rng_seed.wrapping_add(1000 + cp_index as u64))
            .context("evolution stage")?;
        all_records.extend(log.records);
        done += this;
        cp_index += 1;

        let cp_pr = pagerank(&graph, &pr_params)?;
        let ratio = (graph.edge_count() - e_init) as f64 / e_init.max(1) as f64;
        for (c, m) in members.iter().enumerate() {
            let sample: Vec<f64> = m.iter().map(|v| cp_pr.scores.get(*v)).collect();
            if let Some(a) = fixed_k_hill(&ctx, &sample) {
                curve_rows.push(CurveRow {
                    entity: format!("community_{}", c + 1),
                    checkpoint: cp_index,
                    edges_added: graph.edge_count() - e_init,
                    edge_ratio: ratio,
                    alpha_hat: a,
                });
            }
        }
        // class curves: classify what exists so far
        let new_so_far: Vec<NodeId> = (seed_node_count..graph.node_count()).map(NodeId).collect();
        if !new_so_far.is_empty() {
            for direction in [Direction::In, Direction::Out] {
                let classified = classify_new_nodes(&graph, &partition, &new_so_far, direction)?;
                for class in 1..=n_c {
                    let sample: Vec<f64> = classified
                        .iter()
                        .filter(|c| c.label.class_index == class)
                        .map(|c| cp_pr.scores.get(c.node))
                        .collect();
                    if sample.len() >= 50 {
                        if let Some(a) = fixed_k_hill(&ctx, &sample) {
                            curve_rows.push(CurveRow {
                                entity: format!("class_{}_{}", dir_tag(direction), class),
                                checkpoint: cp_index,
                                edges_added: graph.edge_count() - e_init,
                                edge_ratio: ratio,
                                alpha_hat: a,
                            });
                        }
                    }
                }
            }
        }
    }
    let log = evonet::attachment::EvolutionLog { records: all_records };
    let n0 = log.new_nodes().len();
    io::write_log(&ctx.path("evolution_log.csv"), &log)?;
    {
        let mut w = BufWriter::new(File::create(ctx.path("evolved.snap"))?);
        graph.write_snap(&mut w)?;
    }

    // --- stage: final scores --------------------------------------------
    let final_pr = pagerank(&graph, &pr_params)?;
    if !final_pr.converged {
        ctx.warnings.push("final pagerank did not converge".into());
    }
    let q = vec![1.0 - ctx.cfg.pagerank.c; graph.node_count()];
    let final_mlm = max_linear(&graph, &pr_params, &q)?;
    io::write_scores(&ctx.path("scores_final_pagerank.csv"), &final_pr.scores)?;
    io::write_scores(&ctx.path("scores_final_mlm.csv"), &final_mlm)?;

    // --- stage: classification ------------------------------------------
    let new_nodes: Vec<NodeId> = (seed_node_count..graph.node_count()).map(NodeId).collect();
    let classified_in = classify_new_nodes(&graph, &partition, &new_nodes, Direction::In)?;
    let classified_out = classify_new_nodes(&graph, &partition, &new_nodes, Direction::Out)?;
    io::write_classes(&ctx.path("classes_in.csv"), &classified_in)?;
    io::write_classes(&ctx.path("classes_out.csv"), &classified_out)?;
    let class_sizes = |classified: &[ClassifiedNode]| -> Vec<usize> {
        let mut sizes = vec![0usize; n_c + 1];
        for c in classified {
            sizes[c.label.class_index - 1] += 1;
        }
        sizes
    };
    let class_sizes_in = class_sizes(&classified_in);
    let class_sizes_out = class_sizes(&classified_out);

    // --- stage: estimation -----------------------------------------------
    let mut table1 = Table::new(
        ctx.path("table1.csv"),
        "seed,config_hash,entity,phase,n,alpha_hat,k_used,ci_lo,ci_hi,ci_level",
    )?;
    let mut table2 = Table::new(
        ctx.path("table2.csv"),
        "seed,config_hash,entity,theta_ia1,ia1_fallback,theta_idis1,theta_idis2,idis_fallback,theta_k0dis1,theta_k0dis2,k0dis_fallback,theta_kgrid1,kgrid_k,theta_mod_intervals",
    )?;
    let mut hill_rows = Table::new(ctx.path("hill_vs_k.csv"), "seed,config_hash,entity,k,alpha_hat")?;

    let mut summaries: Vec<Option<CommunityEvtSummary<f64>>> = vec![None; n_c];
    for (c, m) in members.iter().enumerate() {
        let entity = format!("community_{}", c + 1);
        let sample_before: Vec<f64> = m.iter().map(|v| seed_pr.scores.get(*v)).collect();
        let sample_after: Vec<f64> = m.iter().map(|v| final_pr.scores.get(*v)).collect();
        if let Some(t) = before_ranked[c].as_ref() {
            table1.tail_row(&ctx, &entity, "before", sample_before.len(), t)?;
        }
        if let Some(t) = tail_estimate(&ctx, &sample_after, 2) {
            table1.tail_row(&ctx, &entity, "after", sample_after.len(), &t)?;
        }
        hill_curve(&ctx, &mut hill_rows, &entity, &sample_after)?;

        // extremal estimates on the appearance-ordered member scores plus
        // the graph-modified intervals estimator on the community subgraph
        let ext = extremal_suite(&ctx, &sample_after, Some((&graph, m)), &final_pr.scores)?;
        table2.extremal_row(&ctx, &entity, &ext)?;

        // prediction inputs use the seed-side estimates (the communities are
        // the columns of the seed scheme)
        if let Some(t) = before_ranked[c].clone() {
            let theta = sequence_theta_for_summary(&ctx, &sample_before);
            let sample_max = sample_before.iter().cloned().fold(f64::MIN, f64::max);
            summaries[c] = Some(CommunityEvtSummary {
                tail: t,
                theta: theta.unwrap_or(f64::NAN),
                stationary: stationary[c] && theta.is_some(),
                sample_max,
            });
        }

        // mean excess of the evolved community for the bundle curves
        if sample_after.len() >= 25 {
            let grid = quantile_grid(&sample_after, 0.5, 0.95, 10);
            if let Ok(curve) = mean_excess(&sample_after, &grid) {
                mean_excess_rows.push((format!("{entity}_after"), curve));
            }
        }
    }

    for (direction, classified) in
        [(Direction::In, &classified_in), (Direction::Out, &classified_out)]
    {
        for class in 1..=n_c {
            let entity = format!("class_{}_{}", dir_tag(direction), class);
            // appearance order = node id order
            let mut rows: Vec<(NodeId, f64)> = classified
                .iter()
                .filter(|c| c.label.class_index == class)
                .map(|c| (c.node, final_pr.scores.get(c.node)))
                .collect();
            rows.sort_by_key(|&(v, _)| v);
            let sample: Vec<f64> = rows.into_iter().map(|(_, s)| s).collect();
            if sample.is_empty() {
                continue;
            }
            if let Some(t) = tail_estimate(&ctx, &sample, 3) {
                table1.tail_row(&ctx, &entity, "after", sample.len(), &t)?;
            }
            hill_curve(&ctx, &mut hill_rows, &entity, &sample)?;
            let ext = extremal_suite(&ctx, &sample, None, &final_pr.scores)?;
            table2.extremal_row(&ctx, &entity, &ext)?;
            if sample.len() >= 25 {
                let grid = quantile_grid(&sample, 0.5, 0.95, 10);
                if let Ok(curve) = mean_excess(&sample, &grid) {
                    mean_excess_rows.push((entity.clone(), curve));
                }
            }
        }
    }

    // --- stage: theory predictions ---------------------------------------
    for (direction, classified) in
        [(Direction::In, &classified_in), (Direction::Out, &classified_out)]
    {
        let preds = predictions_for(&ctx, &summaries, classified, &members, &seed_pr.scores, n_c)?;
        io::write_json(
            &ctx.path(&format!("predictions_{}.json", dir_tag(direction))),
            &preds,
        )?;
    }

    // --- emit curves ------------------------------------------------------
    let mut me_table = Table::new(
        ctx.path("mean_excess.csv"),
        "seed,config_hash,entity,threshold,value,slope,intercept,r2,pareto_type",
    )?;
    for (entity, curve) in &mean_excess_rows {
        for (u, v) in curve.thresholds.iter().zip(&curve.values) {
            me_table.row(&ctx, &format!(
                "{entity},{u},{v},{},{},{},{}",
                curve.slope,
                curve.intercept,
                curve.r2,
                curve.pareto_type()
            ))?;
        }
    }
    let mut curve_table = Table::new(
        ctx.path("alpha_vs_edge_ratio.csv"),
        "seed,config_hash,entity,checkpoint,edges_added,edge_ratio,alpha_hat",
    )?;
    for r in &curve_rows {
        curve_table.row(&ctx, &format!(
            "{},{},{},{},{}",
            r.entity, r.checkpoint, r.edges_added, r.edge_ratio, r.alpha_hat
        ))?;
    }

    let bundle = ResultsBundle {
        output_dir: ctx.out.clone(),
        config_hash: ctx.hash.clone(),
        n0,
        class_sizes_in,
        class_sizes_out,
        pagerank_converged: seed_pr.converged && final_pr.converged,
        warnings: ctx.warnings.clone(),
    };
    io::write_json(&ctx.path("meta.json"), &bundle)?;
    Ok(bundle)
}

fn dir_tag(d: Direction) -> &'static str {
    match d {
        Direction::In => "in",
        Direction::Out => "out",
    }
}

/// Build or ingest the seed graph and derive its community partition:
/// generated seeds use the component labels, ingested graphs run Louvain.
fn build_seed_stage(ctx: &mut Ctx) -> Result<(DirectedGraph, CommunityPartition)> {
    let (graph, partition) = match &ctx.cfg.seed_graph {
        SeedGraphConfig::Tbt { .. } => {
            let spec = ctx.cfg.seed_spec().expect("tbt config");
            let seed = build_seed(&spec, ctx.cfg.rng_seed)?;
            let q = evonet::community::directed_modularity(&seed.graph, &seed.component_of);
            let partition = CommunityPartition::from_labels(&seed.component_of, q);
            (seed.graph, partition)
        }
        SeedGraphConfig::Snap { path, extraction } => {
            let report = ingest_snap(Path::new(path))?;
            if report.self_loops_skipped > 0 {
                ctx.warnings.push(format!("{} self-loop edges skipped", report.self_loops_skipped));
            }
            let graph = match extraction {
                None => report.graph,
                Some(Extraction::Induced { nodes }) => {
                    let keep: Vec<NodeId> = nodes.iter().map(|&i| NodeId(i)).collect();
                    report.graph.induced_subgraph(&keep).0
                }
                Some(Extraction::BfsBall { root, radius }) => {
                    let ball = report.graph.bfs_ball(NodeId(*root), *radius);
                    report.graph.induced_subgraph(&ball).0
                }
            };
            let mut partition = louvain_directed(&graph, ctx.cfg.rng_seed)?;
            if let Some(target) = ctx.cfg.communities.target_nc {
                if partition.community_count > target {
                    partition = partition.merged_to(target);
                }
            }
            (graph, partition)
        }
    };
    if graph.node_count() == 0 {
        bail!("seed graph is empty");
    }
    {
        let mut w = BufWriter::new(File::create(ctx.path("seed.snap"))?);
        graph.write_snap(&mut w)?;
    }
    Ok((graph, partition))
}

fn bootstrap_options(ctx: &Ctx, salt: u64) -> BootstrapOptions {
    BootstrapOptions {
        resamples: ctx.cfg.estimators.bootstrap_resamples,
        level: ctx.cfg.estimators.ci_level,
        mode: match ctx.cfg.estimators.bootstrap_mode {
            BootstrapModeConfig::Single => BootstrapMode::Single,
            BootstrapModeConfig::Double => BootstrapMode::Double,
        },
        rng_seed: ctx.cfg.rng_seed.wrapping_mul(31).wrapping_add(salt),
    }
}

fn tail_estimate(ctx: &Ctx, sample: &[f64], salt: u64) -> Option<TailEstimate<f64>> {
    select_k_bootstrap(sample, &bootstrap_options(ctx, salt)).ok()
}

fn fixed_k_hill(ctx: &Ctx, sample: &[f64]) -> Option<f64> {
    let k = ((sample.len() as f64 * ctx.cfg.estimators.curve_k_fraction) as usize).max(10);
    hill(sample, k).ok()
}

fn hill_curve(ctx: &Ctx, table: &mut Table, entity: &str, sample: &[f64]) -> Result<()> {
    let n = sample.len();
    if n < 30 {
        return Ok(());
    }
    for i in 1..=30usize {
        let k = (n * i / 60).max(2).min(n - 1);
        if let Ok(a) = hill(sample, k) {
            table.row(ctx, &format!("{entity},{k},{a}"))?;
        }
    }
    Ok(())
}

/// All extremal estimates for one entity.
struct ExtremalSuite {
    ia1: Option<(f64, bool)>,
    idis: Option<(f64, f64, bool)>,
    k0dis: Option<(f64, f64, bool)>,
    kgrid: Option<(f64, u64)>,
    modified: Option<f64>,
}

fn extremal_suite(
    ctx: &Ctx,
    series: &[f64],
    community_subgraph: Option<(&DirectedGraph, &[NodeId])>,
    all_scores: &ScoreVector<f64>,
) -> Result<ExtremalSuite> {
    let mut suite = ExtremalSuite { ia1: None, idis: None, k0dis: None, kgrid: None, modified: None };
    if series.len() >= 30 {
        let grid = quantile_grid(series, 0.5, 0.995, ctx.cfg.estimators.u_grid_points.max(10));
        suite.ia1 = plateau_theta(series, &grid).ok().map(|p| (p.theta, p.fallback));
        suite.idis = discrepancy_thresholds(
            series,
            GapEstimator::Intervals { exclude_ones: ctx.cfg.estimators.exclude_ones },
            &grid,
            CVM_CRITICAL_95,
        )
        .ok()
        .map(|d| (d.theta1, d.theta2, d.fallback));
        suite.k0dis = discrepancy_thresholds(series, GapEstimator::KGaps { k: 0 }, &grid, CVM_CRITICAL_95)
            .ok()
            .map(|d| (d.theta1, d.theta2, d.fallback));
        suite.kgrid = kgaps_grid_select(series, &grid, ctx.cfg.estimators.k_gap_max, CVM_CRITICAL_95)
            .ok()
            .map(|(k, d)| (d.theta1, k));
    }
    if let Some((graph, members)) = community_subgraph {
        let (sub, originals) = graph.induced_subgraph(members);
        let sub_scores = ScoreVector {
            values: originals.iter().map(|v| all_scores.get(*v)).collect(),
            kind: all_scores.kind,
            scale: all_scores.scale,
        };
        let u = quantile(&sub_scores.values, 0.95);
        suite.modified = graph_inter_exceedances(&sub, &sub_scores, u, ctx.cfg.estimators.max_path_len)
            .and_then(|g| intervals_estimator(&g.gaps, false))
            .ok();
    }
    Ok(suite)
}

/// Point estimate of theta for the prediction summary: the intervals
/// estimator at the 95% quantile of the community's seed scores.
fn sequence_theta_for_summary(_ctx: &Ctx, series: &[f64]) -> Option<f64> {
    if series.len() < 30 {
        return None;
    }
    let u = quantile(series, 0.95);
    sequence_gaps(series, u).and_then(|g| intervals_estimator(&g, false)).ok()
}

fn predictions_for(
    ctx: &Ctx,
    summaries: &[Option<CommunityEvtSummary<f64>>],
    classified: &[ClassifiedNode],
    members: &[Vec<NodeId>],
    seed_scores: &ScoreVector<f64>,
    n_c: usize,
) -> Result<Vec<TheoryPrediction<f64>>> {
    // class links from the code digits; class n_c + 1 has none and is skipped
    let mut links: Vec<(usize, Vec<usize>)> = Vec::new();
    for class in 1..=n_c {
        let mut linked: Vec<usize> = classified
            .iter()
            .filter(|c| c.label.class_index == class)
            .flat_map(|c| {
                c.code
                    .digits()
                    .iter()
                    .enumerate()
                    .filter(|(_, &d)| d != 0)
                    .map(|(i, _)| i)
                    .collect::<Vec<_>>()
            })
            .collect();
        linked.sort_unstable();
        linked.dedup();
        if !linked.is_empty() {
            links.push((class, linked));
        }
    }
    let known: Vec<CommunityEvtSummary<f64>> = summaries
        .iter()
        .map(|s| {
            s.clone().unwrap_or(CommunityEvtSummary {
                tail: TailEstimate {
                    alpha_hat: f64::INFINITY,
                    k_used: 0,
                    ci: (f64::INFINITY, f64::INFINITY),
                    ci_level: ctx.cfg.estimators.ci_level,
                    k_selection: evonet::evt::KSelection::Fixed,
                },
                theta: f64::NAN,
                stationary: false,
                sample_max: f64::MIN,
            })
        })
        .collect();

    // dependence gate from the pairwise joint-exceedance diagnostics over the
    // community seed-score columns (truncated to the shortest community)
    let gate = if members.len() >= 2 {
        let min_len = members.iter().map(|m| m.len()).min().unwrap_or(0);
        if min_len >= 30 {
            let columns: Vec<Vec<f64>> = members
                .iter()
                .map(|m| m.iter().take(min_len).map(|v| seed_scores.get(*v)).collect())
                .collect();
            let pooled: Vec<f64> = columns.iter().flatten().copied().collect();
            let u = quantile(&pooled, 0.95);
            let rep = dominance_diagnostics(&columns, u);
            DependenceGate {
                weak_dependence_ok: rep.weak_dependence_ok,
                homogeneous_ok: rep.ratio_spread <= evonet::theory::WEAK_DEPENDENCE_TOLERANCE,
            }
        } else {
            DependenceGate::pass()
        }
    } else {
        DependenceGate::pass()
    };

    Ok(predict_indices(&known, &links, gate)?)
}

struct CurveRow {
    entity: String,
    checkpoint: usize,
    edges_added: usize,
    edge_ratio: f64,
    alpha_hat: f64,
}

/// CSV table whose rows are prefixed with the run seed and config hash.
struct Table {
    w: BufWriter<File>,
}

impl Table {
    fn new(path: PathBuf, header: &str) -> Result<Self> {
        let mut w = BufWriter::new(File::create(&path).with_context(|| format!("create {path:?}"))?);
        writeln!(w, "{header}")?;
        Ok(Table { w })
    }

    fn row(&mut self, ctx: &Ctx, rest: &str) -> Result<()> {
        writeln!(self.w, "{},{},{rest}", ctx.cfg.rng_seed, ctx.hash)?;
        Ok(())
    }

    fn tail_row(
        &mut self,
        ctx: &Ctx,
        entity: &str,
        phase: &str,
        n: usize,
        t: &TailEstimate<f64>,
    ) -> Result<()> {
        self.row(ctx, &format!(
            "{entity},{phase},{n},{},{},{},{},{}",
            t.alpha_hat, t.k_used, t.ci.0, t.ci.1, t.ci_level
        ))
    }

    fn extremal_row(&mut self, ctx: &Ctx, entity: &str, s: &ExtremalSuite) -> Result<()> {
        fn opt(v: Option<f64>) -> String {
            v.map(|x| x.to_string()).unwrap_or_default()
        }
        let (ia1, ia1_fb) = s.ia1.map(|(t, f)| (Some(t), Some(f))).unwrap_or((None, None));
        let (id1, id2, id_fb) = s
            .idis
            .map(|(a, b, f)| (Some(a), Some(b), Some(f)))
            .unwrap_or((None, None, None));
        let (k01, k02, k0_fb) = s
            .k0dis
            .map(|(a, b, f)| (Some(a), Some(b), Some(f)))
            .unwrap_or((None, None, None));
        let (kg, kgk) = s.kgrid.map(|(t, k)| (Some(t), Some(k))).unwrap_or((None, None));
        self.row(ctx, &format!(
            "{entity},{},{},{},{},{},{},{},{},{},{},{}",
            opt(ia1),
            ia1_fb.map(|b| b.to_string()).unwrap_or_default(),
            opt(id1),
            opt(id2),
            id_fb.map(|b| b.to_string()).unwrap_or_default(),
            opt(k01),
            opt(k02),
            k0_fb.map(|b| b.to_string()).unwrap_or_default(),
            opt(kg),
            kgk.map(|k| k.to_string()).unwrap_or_default(),
            opt(s.modified),
        ))
    }
}
