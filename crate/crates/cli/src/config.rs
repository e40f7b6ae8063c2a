//! Experiment configuration files.
//!
//! A config is a JSON object with a `kind` discriminator naming the
//! subcommand it parameterizes. Unknown keys are rejected. Every path in a
//! config is resolved relative to the config file itself, so experiment
//! manifests can travel with their data. Precedence, lowest to highest:
//! built-in defaults, command-line flags, config file.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Result};
use serde::Deserialize;

use spectral_econ_core::Error;

macro_rules! overlay {
    ($base:ident, $over:ident: $($field:ident),* $(,)?) => {
        $( if $over.$field.is_some() { $base.$field = $over.$field; } )*
    };
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CentralityParams {
    pub measure: Option<String>,
    pub graph: Option<PathBuf>,
    pub direction: Option<String>,
    pub delta: Option<f64>,
    pub z: Option<String>,
    pub out: Option<PathBuf>,
}

impl CentralityParams {
    pub fn overlay(&mut self, over: CentralityParams) {
        let base = self;
        overlay!(base, over: measure, graph, direction, delta, z, out);
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DegrootSimulateParams {
    pub matrix: Option<PathBuf>,
    pub x0: Option<String>,
    pub t_max: Option<usize>,
    pub tol: Option<f64>,
    pub stride: Option<usize>,
    pub out: Option<PathBuf>,
}

impl DegrootSimulateParams {
    pub fn overlay(&mut self, over: DegrootSimulateParams) {
        let base = self;
        overlay!(base, over: matrix, x0, t_max, tol, stride, out);
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DegrootConsensusParams {
    pub matrix: Option<PathBuf>,
    pub x0: Option<String>,
    pub out: Option<PathBuf>,
}

impl DegrootConsensusParams {
    pub fn overlay(&mut self, over: DegrootConsensusParams) {
        let base = self;
        overlay!(base, over: matrix, x0, out);
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DegrootWisdomParams {
    /// `uniform`, `celebrity`, or `erdos`.
    pub family: Option<String>,
    pub sizes: Option<Vec<usize>>,
    /// Edge-probability multiplier for the `erdos` family:
    /// `p = p_scale * ln(n) / n`.
    pub p_scale: Option<f64>,
    /// Crowd-wisdom replicates per size (0 skips the experiment).
    pub replicates: Option<usize>,
    pub noise_sd: Option<f64>,
    pub mu: Option<f64>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
}

impl DegrootWisdomParams {
    pub fn overlay(&mut self, over: DegrootWisdomParams) {
        let base = self;
        overlay!(base, over: family, sizes, p_scale, replicates, noise_sd, mu, seed, threads, out);
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameParams {
    pub game: Option<PathBuf>,
    pub x0: Option<String>,
    pub t_max: Option<usize>,
    pub tol: Option<f64>,
    /// `closed-form` or `empirical` (price-of-anarchy action only).
    pub mode: Option<String>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

impl GameParams {
    pub fn overlay(&mut self, over: GameParams) {
        let base = self;
        overlay!(base, over: game, x0, t_max, tol, mode, seed, out);
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoodsParams {
    pub model: Option<PathBuf>,
    /// Evaluation point (defaults to the origin).
    pub x: Option<String>,
    pub tol: Option<f64>,
    pub eta: Option<f64>,
    pub out: Option<PathBuf>,
}

impl GoodsParams {
    pub fn overlay(&mut self, over: GoodsParams) {
        let base = self;
        overlay!(base, over: model, x, tol, eta, out);
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketParams {
    pub scenario: Option<PathBuf>,
    /// Size of the built-in block example, used when no scenario file is
    /// given.
    pub n: Option<usize>,
    pub tau: Option<f64>,
    pub target: Option<f64>,
    pub margin: Option<f64>,
    pub noise_sd: Option<f64>,
    pub replicate: Option<u64>,
    pub replicates: Option<u64>,
    pub epsilon: Option<f64>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
}

impl MarketParams {
    pub fn overlay(&mut self, over: MarketParams) {
        let base = self;
        overlay!(base, over: scenario, n, tau, target, margin, noise_sd, replicate,
                 replicates, epsilon, seed, threads, out);
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FigureParams {
    pub graph: Option<PathBuf>,
    pub scores: Option<PathBuf>,
    pub coords: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub scenario: Option<PathBuf>,
    pub n: Option<usize>,
    pub replicate: Option<u64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

impl FigureParams {
    pub fn overlay(&mut self, over: FigureParams) {
        let base = self;
        overlay!(base, over: graph, scores, coords, model, scenario, n, replicate, seed, out);
    }
}

/// The tagged union stored in a config file.
#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ConfigDoc {
    Centrality(CentralityParams),
    DegrootSimulate(DegrootSimulateParams),
    DegrootConsensus(DegrootConsensusParams),
    DegrootWisdom(DegrootWisdomParams),
    Game(GameParams),
    Goods(GoodsParams),
    MarketDesign(MarketParams),
    MarketCertify(MarketParams),
    MarketBlockDemo(MarketParams),
    Figure(FigureParams),
}

impl ConfigDoc {
    pub fn kind_name(&self) -> &'static str {
        match self {
            ConfigDoc::Centrality(_) => "centrality",
            ConfigDoc::DegrootSimulate(_) => "degroot-simulate",
            ConfigDoc::DegrootConsensus(_) => "degroot-consensus",
            ConfigDoc::DegrootWisdom(_) => "degroot-wisdom",
            ConfigDoc::Game(_) => "game",
            ConfigDoc::Goods(_) => "goods",
            ConfigDoc::MarketDesign(_) => "market-design",
            ConfigDoc::MarketCertify(_) => "market-certify",
            ConfigDoc::MarketBlockDemo(_) => "market-block-demo",
            ConfigDoc::Figure(_) => "figure",
        }
    }
}

/// Loads a config and rebases its relative paths onto the config's parent
/// directory.
pub fn load(path: &Path) -> Result<ConfigDoc> {
    let text = fs::read_to_string(path).map_err(|e| {
        anyhow!(Error::InvalidInput(format!(
            "cannot read config {}: {e}",
            path.display()
        )))
    })?;
    let mut doc: ConfigDoc = serde_json::from_str(&text).map_err(|e| {
        anyhow!(Error::InvalidInput(format!(
            "config {}: {e}",
            path.display()
        )))
    })?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    rebase(&mut doc, base);
    Ok(doc)
}

fn rebase_path(p: &mut Option<PathBuf>, base: &Path) {
    if let Some(path) = p {
        if path.is_relative() {
            *path = base.join(&path);
        }
    }
}

fn rebase(doc: &mut ConfigDoc, base: &Path) {
    match doc {
        ConfigDoc::Centrality(p) => {
            rebase_path(&mut p.graph, base);
            rebase_path(&mut p.out, base);
        }
        ConfigDoc::DegrootSimulate(p) => {
            rebase_path(&mut p.matrix, base);
            rebase_path(&mut p.out, base);
        }
        ConfigDoc::DegrootConsensus(p) => {
            rebase_path(&mut p.matrix, base);
            rebase_path(&mut p.out, base);
        }
        ConfigDoc::DegrootWisdom(p) => rebase_path(&mut p.out, base),
        ConfigDoc::Game(p) => {
            rebase_path(&mut p.game, base);
            rebase_path(&mut p.out, base);
        }
        ConfigDoc::Goods(p) => {
            rebase_path(&mut p.model, base);
            rebase_path(&mut p.out, base);
        }
        ConfigDoc::MarketDesign(p) | ConfigDoc::MarketCertify(p) | ConfigDoc::MarketBlockDemo(p) => {
            rebase_path(&mut p.scenario, base);
            rebase_path(&mut p.out, base);
        }
        ConfigDoc::Figure(p) => {
            rebase_path(&mut p.graph, base);
            rebase_path(&mut p.scores, base);
            rebase_path(&mut p.coords, base);
            rebase_path(&mut p.model, base);
            rebase_path(&mut p.scenario, base);
            rebase_path(&mut p.out, base);
        }
    }
}

/// Fails when a config's kind does not match the invoked subcommand.
pub fn expect_kind(doc: &ConfigDoc, expected: &str) -> Result<()> {
    if doc.kind_name() != expected {
        bail!(Error::InvalidInput(format!(
            "config kind {:?} does not match subcommand {expected:?}",
            doc.kind_name()
        )));
    }
    Ok(())
}
