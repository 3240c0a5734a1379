//! File formats shared by the subcommands: plain CSV tables and JSON blobs.
//! Every pipeline stage is invocable on its own, so all intermediate state
//! round-trips through these files.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};

use evonet::attachment::{EvolutionLog, Scheme, StepRecord};
use evonet::community::{ClassifiedNode, CommunityPartition};
use evonet::graph::NodeId;
use evonet::scores::{ScoreKind, ScoreScale, ScoreVector};

pub fn write_scores(path: &Path, scores: &ScoreVector<f64>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    scores.write_csv(&mut w)?;
    Ok(())
}

/// Read `node_id,score` rows; scores are returned in node-id order.
pub fn read_scores(path: &Path) -> Result<ScoreVector<f64>> {
    let reader = BufReader::new(File::open(path).with_context(|| format!("open {path:?}"))?);
    let mut rows: Vec<(usize, f64)> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if i == 0 && line.starts_with("node_id") {
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let id: usize = parts
            .next()
            .context("missing node_id")?
            .trim()
            .parse()
            .with_context(|| format!("bad node_id on line {}", i + 1))?;
        let score: f64 = parts
            .next()
            .context("missing score")?
            .trim()
            .parse()
            .with_context(|| format!("bad score on line {}", i + 1))?;
        rows.push((id, score));
    }
    rows.sort_by_key(|&(id, _)| id);
    for (pos, &(id, _)) in rows.iter().enumerate() {
        if pos != id {
            bail!("score rows are not dense: expected node {pos}, found {id}");
        }
    }
    Ok(ScoreVector {
        values: rows.into_iter().map(|(_, s)| s).collect(),
        kind: ScoreKind::PageRank,
        scale: ScoreScale::ScaleFree,
    })
}

pub fn write_partition(path: &Path, partition: &CommunityPartition) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "node_id,community")?;
    for (i, c) in partition.assignment.iter().enumerate() {
        writeln!(w, "{i},{c}")?;
    }
    Ok(())
}

pub fn read_partition(path: &Path) -> Result<CommunityPartition> {
    let reader = BufReader::new(File::open(path).with_context(|| format!("open {path:?}"))?);
    let mut rows: Vec<(usize, usize)> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if i == 0 && line.starts_with("node_id") {
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let id: usize = parts.next().context("missing node_id")?.trim().parse()?;
        let c: usize = parts.next().context("missing community")?.trim().parse()?;
        rows.push((id, c));
    }
    rows.sort_by_key(|&(id, _)| id);
    for (pos, &(id, _)) in rows.iter().enumerate() {
        if pos != id {
            bail!("partition rows are not dense: expected node {pos}, found {id}");
        }
    }
    let labels: Vec<usize> = rows.into_iter().map(|(_, c)| c).collect();
    Ok(CommunityPartition::from_labels(&labels, f64::NAN))
}

pub fn write_log(path: &Path, log: &EvolutionLog) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    log.write_csv(&mut w)?;
    Ok(())
}

pub fn read_log(path: &Path) -> Result<EvolutionLog> {
    let reader = BufReader::new(File::open(path).with_context(|| format!("open {path:?}"))?);
    let mut records = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if i == 0 && line.starts_with("step,") {
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 5 {
            bail!("log line {} has {} fields, expected 5", i + 1, parts.len());
        }
        let step: usize = parts[0].trim().parse()?;
        let scheme = match parts[1].trim() {
            "alpha" => Scheme::Alpha,
            "beta" => Scheme::Beta,
            "gamma" => Scheme::Gamma,
            other => bail!("unknown scheme {other:?} on line {}", i + 1),
        };
        let new_node = if parts[2].trim().is_empty() {
            None
        } else {
            Some(NodeId(parts[2].trim().parse()?))
        };
        let edge = (NodeId(parts[3].trim().parse()?), NodeId(parts[4].trim().parse()?));
        records.push(StepRecord { step, scheme, new_node, edge });
    }
    Ok(EvolutionLog { records })
}

pub fn write_classes(path: &Path, classes: &[ClassifiedNode]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "node_id,class,code")?;
    for c in classes {
        writeln!(w, "{},{},{}", c.node, c.label.class_index, c.code)?;
    }
    Ok(())
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    Ok(())
}
