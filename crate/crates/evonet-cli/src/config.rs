//! Experiment configuration: one JSON document drives the whole pipeline.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use evonet::attachment::PaParams;
use evonet::generators::{BiDegreeSpec, SeedSpec};
use evonet::scores::{DanglingMode, PrParams};

/// Where the seed graph comes from: generated TBT components or a SNAP file.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SeedGraphConfig {
    Tbt {
        components: Vec<BiDegreeSpec>,
        cross_edges: usize,
    },
    Snap {
        path: String,
        #[serde(default)]
        extraction: Option<Extraction>,
    },
}

/// Optional subgraph extraction after ingestion. The paper does not say how
/// its subnetworks were cut, so both modes are exposed.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Extraction {
    Induced { nodes: Vec<usize> },
    BfsBall { root: usize, radius: usize },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimatorConfig {
    pub bootstrap_resamples: usize,
    pub ci_level: f64,
    pub bootstrap_mode: BootstrapModeConfig,
    /// Number of thresholds in the 50%..99.5% quantile grid.
    pub u_grid_points: usize,
    /// K grid upper bound for the K-gaps selection.
    pub k_gap_max: u64,
    pub exclude_ones: bool,
    pub max_path_len: usize,
    /// Fixed-k percentage used for checkpoint curves (fraction of sample).
    pub curve_k_fraction: f64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BootstrapModeConfig {
    Single,
    Double,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            bootstrap_resamples: 500,
            ci_level: 0.975,
            bootstrap_mode: BootstrapModeConfig::Single,
            u_grid_points: 15,
            k_gap_max: 5,
            exclude_ones: false,
            max_path_len: 10,
            curve_k_fraction: 0.1,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct CommunityConfig {
    /// Merge smallest communities until this many remain (None: emergent).
    pub target_nc: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct PagerankConfig {
    pub c: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub dangling_mode: DanglingMode,
}

impl Default for PagerankConfig {
    fn default() -> Self {
        Self { c: 0.85, tol: 1e-10, max_iter: 1000, dangling_mode: DanglingMode::Literal }
    }
}

impl PagerankConfig {
    pub fn to_params(&self) -> PrParams<f64> {
        PrParams { c: self.c, tol: self.tol, max_iter: self.max_iter, dangling_mode: self.dangling_mode }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub rng_seed: u64,
    pub seed_graph: SeedGraphConfig,
    pub pa: PaParams,
    #[serde(default)]
    pub pagerank: PagerankConfig,
    #[serde(default)]
    pub estimators: EstimatorConfig,
    #[serde(default)]
    pub communities: CommunityConfig,
    /// Checkpoints for the alpha-vs-edge-ratio curve.
    #[serde(default = "default_checkpoints")]
    pub checkpoints: usize,
    pub output_dir: String,
}

fn default_checkpoints() -> usize {
    20
}

impl ExperimentConfig {
    pub fn load(path: &std::path::Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Stable hash of the canonical JSON serialization; recorded in every
    /// output row so result files are traceable to their configuration.
    /// The output directory is not part of the hash: two runs of the same
    /// experiment into different directories are the same experiment.
    pub fn hash(&self) -> String {
        let mut value = serde_json::to_value(self).expect("config serializes");
        if let Some(obj) = value.as_object_mut() {
            obj.remove("output_dir");
        }
        let canon = serde_json::to_string(&value).expect("value serializes");
        let digest = Sha256::digest(canon.as_bytes());
        let mut hex = String::with_capacity(12);
        for b in digest.iter().take(6) {
            hex.push_str(&format!("{b:02x}"));
        }
        hex
    }

    pub fn seed_spec(&self) -> Option<SeedSpec> {
        match &self.seed_graph {
            SeedGraphConfig::Tbt { components, cross_edges } => {
                Some(SeedSpec { components: components.clone(), cross_edges: *cross_edges })
            }
            SeedGraphConfig::Snap { .. } => None,
        }
    }
}
