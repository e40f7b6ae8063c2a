//! Implementations behind each CLI subcommand: load inputs, call into the
//! core crate, and emit deterministic JSON (or CSV/SVG) reports.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use spectral_econ_core::centrality::{self, Direction};
use spectral_econ_core::degroot::{self, Opinions, SimulateOptions, StochasticMatrix};
use spectral_econ_core::game::{self, GameSpec, PoaMode};
use spectral_econ_core::market::{self, DesignOptions, MarketScenario};
use spectral_econ_core::public_goods::{self, ParetoClass, UtilityModel};
use spectral_econ_core::spectral::Side;
use spectral_econ_core::{Error, SquareMatrix};

use crate::config::{
    CentralityParams, DegrootConsensusParams, DegrootSimulateParams, DegrootWisdomParams,
    FigureParams, GameParams, GoodsParams, MarketParams,
};
use crate::figures;
use crate::formats::{self, MatrixJson};
use crate::jsonfmt;

/// What a command produced and where it should land. JSON goes to stdout
/// when no output path is set; a `.csv` destination selects the tabular
/// rendering when one exists; `.svg` content is written verbatim.
pub struct CommandOutput {
    pub json: String,
    pub csv: Option<String>,
    pub svg: Option<String>,
    pub out: Option<PathBuf>,
}

impl CommandOutput {
    fn json_only(report: &impl Serialize, out: Option<PathBuf>) -> Result<Self> {
        Ok(CommandOutput {
            json: jsonfmt::to_string(report)?,
            csv: None,
            svg: None,
            out,
        })
    }

    pub fn write(self) -> Result<()> {
        match self.out {
            None => {
                print!("{}", self.json);
                Ok(())
            }
            Some(path) => {
                let ext = path.extension().and_then(|e| e.to_str());
                let body = match ext {
                    Some("csv") => self.csv.as_deref().unwrap_or(&self.json),
                    Some("svg") => self
                        .svg
                        .as_deref()
                        .ok_or_else(|| anyhow!(Error::InvalidInput(
                            "this command does not produce SVG output".into()
                        )))?,
                    _ => &self.json,
                };
                fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
                Ok(())
            }
        }
    }
}

fn require<T>(opt: Option<T>, what: &str) -> Result<T> {
    opt.ok_or_else(|| anyhow!(Error::InvalidInput(format!("missing required {what}"))))
}

fn node_names(m: &SquareMatrix) -> Vec<String> {
    match m.labels() {
        Some(l) => l.to_vec(),
        None => (0..m.n()).map(|i| i.to_string()).collect(),
    }
}

/// Runs `f` inside a rayon pool of the requested width. Per-index seeding
/// keeps results identical across widths.
pub fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        if t == 0 {
            bail!(Error::InvalidInput("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| anyhow!(Error::Numeric(format!("thread pool: {e}"))))?;
    Ok(pool.install(f))
}

// ---------------------------------------------------------------- centrality

#[derive(Serialize)]
struct CentralityReport {
    command: &'static str,
    measure: String,
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    direction: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    z: Option<Vec<f64>>,
    normalization: String,
    nodes: Vec<String>,
    scores: Vec<f64>,
}

pub fn run_centrality(p: &CentralityParams) -> Result<CommandOutput> {
    let measure = require(p.measure.clone(), "measure (degree|eigenvector|katz)")?;
    let graph_path = require(p.graph.clone(), "--graph")?;
    let m = formats::read_matrix(&graph_path)?;
    let base = graph_path.parent().unwrap_or(Path::new(".")).to_path_buf();

    let (result, direction, delta, z) = match measure.as_str() {
        "degree" => {
            let direction = match p.direction.as_deref().unwrap_or("undirected") {
                "in" => Direction::In,
                "out" => Direction::Out,
                "undirected" => Direction::Undirected,
                other => bail!(Error::InvalidInput(format!(
                    "unknown direction {other:?} (expected in|out|undirected)"
                ))),
            };
            (
                centrality::degree_centrality(&m, direction)?,
                p.direction.clone().or(Some("undirected".into())),
                None,
                None,
            )
        }
        "eigenvector" => (centrality::eigenvector_centrality(&m)?, None, None, None),
        "katz" => {
            let delta = require(p.delta, "--delta")?;
            let z = formats::parse_vector_arg(p.z.as_deref().unwrap_or("ones"), m.n(), &base)?;
            (
                centrality::katz_bonacich(&m, delta, &z, Side::Left)?,
                None,
                Some(delta),
                Some(z),
            )
        }
        other => bail!(Error::InvalidInput(format!(
            "unknown measure {other:?} (expected degree|eigenvector|katz)"
        ))),
    };

    let nodes = node_names(&m);
    let report = CentralityReport {
        command: "centrality",
        measure,
        n: m.n(),
        direction,
        delta,
        z,
        normalization: match result.normalization {
            centrality::Normalization::SumOne => "sum-1".into(),
            centrality::Normalization::Raw => "raw".into(),
        },
        nodes: nodes.clone(),
        scores: result.scores.clone(),
    };
    let mut csv = String::from("node,score\n");
    for (name, score) in nodes.iter().zip(&result.scores) {
        csv.push_str(&format!("{name},{score:.16e}\n"));
    }
    Ok(CommandOutput {
        json: jsonfmt::to_string(&report)?,
        csv: Some(csv),
        svg: None,
        out: p.out.clone(),
    })
}

// ------------------------------------------------------------------- degroot

fn load_stochastic(path: &Path) -> Result<StochasticMatrix> {
    Ok(StochasticMatrix::new(formats::read_matrix(path)?)?)
}

fn parse_opinions(arg: &str, n: usize, base: &Path) -> Result<Opinions> {
    // Scalar opinions: a vector source; rows with ';' separate dimensions
    // per node ("0.1,0.2;0.3,0.4" = two nodes, two dims).
    if arg.contains(';') {
        let rows: Vec<Vec<f64>> = arg
            .split(';')
            .map(|row| {
                row.split(',')
                    .map(|t| t.trim().parse::<f64>())
                    .collect::<std::result::Result<Vec<f64>, _>>()
            })
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| anyhow!(Error::InvalidInput(format!("bad opinion matrix: {e}"))))?;
        if rows.len() != n {
            bail!(Error::InvalidInput(format!(
                "{} opinion rows for {n} agents",
                rows.len()
            )));
        }
        return Ok(Opinions::new(&rows)?);
    }
    Ok(Opinions::scalar(&formats::parse_vector_arg(arg, n, base)?))
}

#[derive(Serialize)]
struct TrajectoryRow {
    t: usize,
    node: usize,
    dim: usize,
    value: f64,
}

#[derive(Serialize)]
struct SimulateReport {
    command: &'static str,
    n: usize,
    dim: usize,
    steps: usize,
    converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    consensus: Option<Vec<f64>>,
    trajectory: Vec<TrajectoryRow>,
}

pub fn run_degroot_simulate(p: &DegrootSimulateParams) -> Result<CommandOutput> {
    let matrix_path = require(p.matrix.clone(), "--matrix")?;
    let m = load_stochastic(&matrix_path)?;
    let base = matrix_path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let x0 = parse_opinions(
        require(p.x0.as_deref(), "--x0")?,
        m.n(),
        &base,
    )?;
    let opts = SimulateOptions {
        t_max: p.t_max.unwrap_or(100_000),
        tol: p.tol.unwrap_or(1e-9),
        stride: p.stride.unwrap_or(1),
    };
    let run = degroot::simulate(&m, &x0, &opts)?;
    let mut trajectory = Vec::new();
    for (t, state) in &run.states {
        for node in 0..state.n() {
            for dim in 0..state.dim() {
                trajectory.push(TrajectoryRow {
                    t: *t,
                    node,
                    dim,
                    value: state.get(node, dim),
                });
            }
        }
    }
    let report = SimulateReport {
        command: "degroot-simulate",
        n: m.n(),
        dim: x0.dim(),
        steps: run.steps,
        converged: run.converged,
        consensus: run.consensus.clone(),
        trajectory,
    };
    let mut csv = String::from("t,node,dim,value\n");
    for row in &report.trajectory {
        csv.push_str(&format!(
            "{},{},{},{:.16e}\n",
            row.t, row.node, row.dim, row.value
        ));
    }
    Ok(CommandOutput {
        json: jsonfmt::to_string(&report)?,
        csv: Some(csv),
        svg: None,
        out: p.out.clone(),
    })
}

#[derive(Serialize)]
struct ConsensusReport {
    command: &'static str,
    n: usize,
    consensus: Vec<f64>,
    influence_weights: Vec<f64>,
}

pub fn run_degroot_consensus(p: &DegrootConsensusParams) -> Result<CommandOutput> {
    let matrix_path = require(p.matrix.clone(), "--matrix")?;
    let m = load_stochastic(&matrix_path)?;
    let base = matrix_path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let x0 = parse_opinions(require(p.x0.as_deref(), "--x0")?, m.n(), &base)?;
    let consensus = degroot::consensus_value(&m, &x0)?;
    let weights = degroot::influence_weights(&m)?;
    let report = ConsensusReport {
        command: "degroot-consensus",
        n: m.n(),
        consensus,
        influence_weights: weights.scores,
    };
    CommandOutput::json_only(&report, p.out.clone())
}

#[derive(Serialize)]
struct WisdomEntry {
    n: usize,
    max_influence: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    consensus_sd: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    theoretical_sd: Option<f64>,
}

#[derive(Serialize)]
struct WisdomReport {
    command: &'static str,
    family: String,
    seed: u64,
    entries: Vec<WisdomEntry>,
}

pub fn run_degroot_wisdom(p: &DegrootWisdomParams) -> Result<CommandOutput> {
    let family = p.family.clone().unwrap_or_else(|| "uniform".into());
    let sizes = p.sizes.clone().unwrap_or_else(|| vec![10, 20, 40, 80]);
    let seed = p.seed.unwrap_or(0);
    let replicates = p.replicates.unwrap_or(0);
    let noise_sd = p.noise_sd.unwrap_or(1.0);
    let mu = p.mu.unwrap_or(0.0);

    let mut matrices = Vec::new();
    for &n in &sizes {
        let m = match family.as_str() {
            "uniform" => degroot::uniform_matrix(n)?,
            "celebrity" => degroot::celebrity_matrix(n)?,
            "erdos" => {
                let scale = p.p_scale.unwrap_or(3.0);
                let prob = (scale * (n as f64).ln() / n as f64).min(1.0);
                degroot::erdos_renyi_stochastic(n, prob, seed)?
            }
            other => bail!(Error::InvalidInput(format!(
                "unknown family {other:?} (expected uniform|celebrity|erdos)"
            ))),
        };
        matrices.push(m);
    }

    let mut entries = Vec::new();
    for m in &matrices {
        let weights = degroot::influence_weights(m)?;
        let max_influence = weights.scores.iter().cloned().fold(f64::MIN, f64::max);
        let (consensus_sd, theoretical_sd) = if replicates >= 2 {
            let scores = weights.scores.clone();
            let samples: Vec<f64> = with_pool(p.threads, || {
                use rayon::prelude::*;
                (0..replicates as u64)
                    .into_par_iter()
                    .map(|r| degroot::crowd_wisdom_replicate(&scores, mu, noise_sd, seed, r))
                    .collect()
            })?;
            let outcome = degroot::summarize_crowd_wisdom(&scores, noise_sd, &samples);
            (Some(outcome.consensus_sd), Some(outcome.theoretical_sd))
        } else {
            (None, None)
        };
        entries.push(WisdomEntry {
            n: m.n(),
            max_influence,
            consensus_sd,
            theoretical_sd,
        });
    }
    let report = WisdomReport {
        command: "degroot-wisdom",
        family,
        seed,
        entries,
    };
    CommandOutput::json_only(&report, p.out.clone())
}

// ---------------------------------------------------------------------- game

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameJson {
    pub gamma: Vec<f64>,
    pub beta: Vec<f64>,
    pub g: MatrixJson,
}

fn load_game(path: &Path) -> Result<(GameSpec, bool)> {
    let text = fs::read_to_string(path)
        .map_err(|e| anyhow!(Error::InvalidInput(format!("{}: {e}", path.display()))))?;
    let doc: GameJson = serde_json::from_str(&text)
        .map_err(|e| anyhow!(Error::InvalidInput(format!("{}: {e}", path.display()))))?;
    let g = formats::matrix_from_json(&doc.g)?;
    let uniform_gamma = doc
        .gamma
        .windows(2)
        .all(|w| (w[0] - w[1]).abs() <= 1e-12 * w[0].abs().max(1.0));
    Ok((
        GameSpec {
            gamma: doc.gamma,
            beta: doc.beta,
            g,
        },
        uniform_gamma,
    ))
}

#[derive(Serialize)]
struct GameReport {
    command: &'static str,
    action: String,
    n: usize,
    rho: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    x_star: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    all_nonnegative: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    keyness: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    welfare_nash: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    x_eff: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    welfare_eff: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    poa_closed_form: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    poa_empirical: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    poa_maximizer: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    converged: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    diverged: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trajectory: Option<Vec<Vec<f64>>>,
}

pub fn run_game(action: &str, p: &GameParams) -> Result<CommandOutput> {
    let game_path = require(p.game.clone(), "--game")?;
    let (spec, uniform_gamma) = load_game(&game_path)?;
    let ng = game::normalize(&spec)?;
    let base = game_path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let mut report = GameReport {
        command: "game",
        action: action.to_string(),
        n: ng.m.n(),
        rho: ng.rho,
        x_star: None,
        all_nonnegative: None,
        keyness: None,
        welfare_nash: None,
        x_eff: None,
        welfare_eff: None,
        poa_closed_form: None,
        poa_empirical: None,
        poa_maximizer: None,
        converged: None,
        diverged: None,
        trajectory: None,
    };
    let mut csv = None;
    match action {
        "nash" => {
            let full = game::analyze(&ng)?;
            report.x_star = Some(full.x_star.clone());
            report.all_nonnegative = Some(full.all_nonnegative);
            report.keyness = Some(full.keyness);
            if uniform_gamma {
                report.welfare_nash = full.welfare_nash;
                report.x_eff = full.x_eff;
                report.welfare_eff = full.welfare_eff;
                report.poa_closed_form = full.poa_closed_form;
            }
            let mut table = String::from("node,action\n");
            for (i, x) in full.x_star.iter().enumerate() {
                table.push_str(&format!("{i},{x:.16e}\n"));
            }
            csv = Some(table);
        }
        "dynamics" => {
            let x0 = match p.x0.as_deref() {
                Some(arg) => formats::parse_vector_arg(arg, ng.m.n(), &base)?,
                None => vec![0.0; ng.m.n()],
            };
            let run = game::best_response_dynamics(
                &ng,
                &x0,
                p.t_max.unwrap_or(1000),
                p.tol.unwrap_or(1e-10),
            )?;
            let mut table = String::from("t,node,action\n");
            for (t, x) in run.trajectory.iter().enumerate() {
                for (node, v) in x.iter().enumerate() {
                    table.push_str(&format!("{t},{node},{v:.16e}\n"));
                }
            }
            csv = Some(table);
            report.converged = Some(run.converged);
            report.diverged = Some(run.diverged);
            report.trajectory = Some(run.trajectory);
        }
        "keyness" => {
            report.keyness = Some(game::keyness(&ng)?);
        }
        "poa" => {
            let mode = p.mode.as_deref().unwrap_or("closed-form");
            report.poa_closed_form =
                Some(game::price_of_anarchy(&ng, PoaMode::ClosedForm)?.value);
            if mode == "empirical" {
                let opts = game::PoaSearchOptions {
                    seed: p.seed.unwrap_or(0),
                    ..Default::default()
                };
                let out = game::empirical_poa(&ng, &opts)?;
                report.poa_empirical = Some(out.value);
                report.poa_maximizer = out.maximizer;
            } else if mode != "closed-form" {
                bail!(Error::InvalidInput(format!(
                    "unknown poa mode {mode:?} (expected closed-form|empirical)"
                )));
            }
        }
        other => bail!(Error::InvalidInput(format!(
            "unknown game action {other:?} (expected nash|dynamics|keyness|poa)"
        ))),
    }
    Ok(CommandOutput {
        json: jsonfmt::to_string(&report)?,
        csv,
        svg: None,
        out: p.out.clone(),
    })
}

// --------------------------------------------------------------------- goods

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoodsModelJson {
    pub family: String,
    pub g: MatrixJson,
    #[serde(default)]
    pub c_shift: Option<Vec<f64>>,
}

pub fn load_goods_model(path: &Path) -> Result<Box<dyn UtilityModel>> {
    let text = fs::read_to_string(path)
        .map_err(|e| anyhow!(Error::InvalidInput(format!("{}: {e}", path.display()))))?;
    let doc: GoodsModelJson = serde_json::from_str(&text)
        .map_err(|e| anyhow!(Error::InvalidInput(format!("{}: {e}", path.display()))))?;
    let g = formats::matrix_from_json(&doc.g)?;
    let c_shift = doc.c_shift.unwrap_or_else(|| vec![1.0; g.n()]);
    match doc.family.as_str() {
        "linear" => Ok(Box::new(public_goods::linear_benefit_family(g, c_shift)?)),
        "log" => Ok(Box::new(public_goods::log_benefit_family(g, c_shift)?)),
        other => bail!(Error::InvalidInput(format!(
            "unknown utility family {other:?} (expected linear|log)"
        ))),
    }
}

fn class_name(c: ParetoClass) -> &'static str {
    match c {
        ParetoClass::ImprovableUp => "improvable_up",
        ParetoClass::ImprovableDown => "improvable_down",
        ParetoClass::Efficient => "efficient",
    }
}

#[derive(Serialize)]
struct GoodsReport {
    command: &'static str,
    action: String,
    n: usize,
    x: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    classification: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    direction: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stationarity_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    first_order_gains: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    realized_gains: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rho_full: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    improvable: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    removals: Option<Vec<RemovalRow>>,
}

#[derive(Serialize)]
struct RemovalRow {
    agent: usize,
    rho_without: f64,
    essential: bool,
}

pub fn run_goods(action: &str, p: &GoodsParams) -> Result<CommandOutput> {
    let model_path = require(p.model.clone(), "--model")?;
    let model = load_goods_model(&model_path)?;
    let n = model.agents();
    let base = model_path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let x = match p.x.as_deref() {
        Some(arg) => formats::parse_vector_arg(arg, n, &base)?,
        None => vec![0.0; n],
    };
    let tol = p.tol.unwrap_or(1e-6);
    let mut report = GoodsReport {
        command: "goods",
        action: action.to_string(),
        n,
        x: x.clone(),
        rho: None,
        classification: None,
        direction: None,
        weights: None,
        stationarity_residual: None,
        first_order_gains: None,
        realized_gains: None,
        eta: None,
        rho_full: None,
        improvable: None,
        removals: None,
    };
    match action {
        "classify" => {
            let verdict = public_goods::pareto_classify(model.as_ref(), &x, tol)?;
            report.rho = Some(verdict.rho);
            report.classification = Some(class_name(verdict.classification).into());
            report.direction = verdict.direction;
            if let Some(theta) = &verdict.weights {
                report.stationarity_residual =
                    Some(public_goods::stationarity_residual(model.as_ref(), &x, theta)?);
            }
            report.weights = verdict.weights;
        }
        "improve" => {
            let verdict = public_goods::pareto_classify(model.as_ref(), &x, tol)?;
            report.rho = Some(verdict.rho);
            report.classification = Some(class_name(verdict.classification).into());
            match &verdict.direction {
                Some(direction) => {
                    let eta = p.eta.unwrap_or(1e-3);
                    let check =
                        public_goods::verify_improvement(model.as_ref(), &x, direction, eta)?;
                    report.direction = Some(direction.clone());
                    report.eta = Some(eta);
                    report.first_order_gains = Some(check.first_order);
                    report.realized_gains = Some(check.realized);
                }
                None => {
                    let theta = verdict.weights.clone().expect("efficient verdict");
                    report.stationarity_residual = Some(public_goods::stationarity_residual(
                        model.as_ref(),
                        &x,
                        &theta,
                    )?);
                    report.weights = Some(theta);
                }
            }
        }
        "essential" => {
            let scan = public_goods::essential_agents(model.as_ref())?;
            report.rho_full = Some(scan.rho_full);
            report.improvable = Some(scan.improvable);
            report.removals = Some(
                scan.removals
                    .iter()
                    .map(|r| RemovalRow {
                        agent: r.agent,
                        rho_without: r.rho_without,
                        essential: r.essential,
                    })
                    .collect(),
            );
        }
        other => bail!(Error::InvalidInput(format!(
            "unknown goods action {other:?} (expected classify|essential|improve)"
        ))),
    }
    CommandOutput::json_only(&report, p.out.clone())
}

// -------------------------------------------------------------------- market

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioJson {
    pub m: ScenarioMatrix,
    pub q0: ScenarioQ0,
    #[serde(default)]
    pub noise_sd: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum ScenarioMatrix {
    Block { block: BlockSpec },
    Inline(MatrixJson),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockSpec {
    pub n: usize,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum ScenarioQ0 {
    Keyword(String),
    Values(Vec<f64>),
}

/// Builds the scenario from a file (or the built-in block example when only
/// `--n` is given), then applies seed and noise overrides from flags.
fn load_scenario(p: &MarketParams) -> Result<MarketScenario> {
    let base = match (&p.scenario, p.n) {
        (Some(path), _) => {
            let text = fs::read_to_string(path)
                .map_err(|e| anyhow!(Error::InvalidInput(format!("{}: {e}", path.display()))))?;
            let doc: ScenarioJson = serde_json::from_str(&text)
                .map_err(|e| anyhow!(Error::InvalidInput(format!("{}: {e}", path.display()))))?;
            let m = match &doc.m {
                ScenarioMatrix::Block { block } => {
                    market::block_example(block.n)?.matrix().clone()
                }
                ScenarioMatrix::Inline(json) => formats::matrix_from_json(json)?,
            };
            let q0 = match &doc.q0 {
                ScenarioQ0::Values(values) => values.clone(),
                ScenarioQ0::Keyword(word) if word == "top_eigenvector" => {
                    // Positive magnitude profile of the dominant mode plus a
                    // 0.1 uniform floor, matching the built-in example.
                    let probe = MarketScenario::new(m.clone(), vec![1.0; m.n()], 0.0, 0)?;
                    let w1 = probe.top_eigenvector();
                    let sup = w1.iter().fold(0.0f64, |a, b| a.max(b.abs()));
                    w1.iter().map(|v| v.abs() / sup + 0.1).collect()
                }
                ScenarioQ0::Keyword(other) => bail!(Error::InvalidInput(format!(
                    "unknown q0 keyword {other:?} (expected \"top_eigenvector\")"
                ))),
            };
            MarketScenario::new(
                m,
                q0,
                doc.noise_sd.unwrap_or(1.0),
                doc.seed.unwrap_or(0),
            )?
        }
        (None, Some(n)) => market::block_example(n)?,
        (None, None) => bail!(Error::InvalidInput(
            "market commands need --scenario FILE or --n SIZE".into()
        )),
    };
    let noise_sd = p.noise_sd.unwrap_or(base.noise_sd());
    let seed = p.seed.unwrap_or(base.seed());
    Ok(market::with_noise(&base, noise_sd, seed)?)
}

fn default_tau(scenario: &MarketScenario, tau: Option<f64>) -> f64 {
    // 2.5 sigma sqrt(n) sits above the Wigner bulk edge 2 sigma sqrt(n).
    tau.unwrap_or_else(|| {
        (2.5 * scenario.noise_sd() * (scenario.n() as f64).sqrt()).max(1e-9)
    })
}

#[derive(Serialize)]
struct DesignReport {
    command: &'static str,
    n: usize,
    seed: u64,
    replicate: u64,
    noise_sd: f64,
    tau: f64,
    target: f64,
    margin: f64,
    top_space_dim: usize,
    estimated_welfare: f64,
    true_welfare: f64,
    alignment: f64,
    success: bool,
    sigma: Vec<f64>,
}

pub fn run_market_design(p: &MarketParams) -> Result<CommandOutput> {
    let scenario = load_scenario(p)?;
    let tau = default_tau(&scenario, p.tau);
    let mut opts = DesignOptions::new(tau, p.target.unwrap_or(1.0));
    if let Some(margin) = p.margin {
        opts.margin = margin;
    }
    let replicate = p.replicate.unwrap_or(0);
    let obs = market::observe_replicate(&scenario, replicate);
    let designed = market::design_intervention(&obs, &opts)?;
    let evaluated = market::evaluate_design(&scenario, &designed)?;
    let true_welfare = evaluated.true_welfare.expect("evaluated design");
    let report = DesignReport {
        command: "market-design",
        n: scenario.n(),
        seed: scenario.seed(),
        replicate,
        noise_sd: scenario.noise_sd(),
        tau,
        target: opts.target,
        margin: opts.margin,
        top_space_dim: evaluated.top_space_dim,
        estimated_welfare: evaluated.estimated_welfare,
        true_welfare,
        alignment: evaluated.alignment.expect("evaluated design"),
        success: true_welfare >= opts.target,
        sigma: evaluated.sigma,
    };
    CommandOutput::json_only(&report, p.out.clone())
}

#[derive(Serialize)]
struct ReplicateRow {
    replicate: u64,
    success: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    true_welfare: Option<f64>,
    alignment: f64,
    noise_norm: f64,
    davis_kahan_bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    design_error: Option<String>,
}

#[derive(Serialize)]
struct CertifyReport {
    command: &'static str,
    n: usize,
    seed: u64,
    noise_sd: f64,
    tau: f64,
    target: f64,
    margin: f64,
    replicates: u64,
    epsilon: f64,
    success_rate: f64,
    mean_alignment: f64,
    min_alignment: f64,
    davis_kahan_bound: f64,
    meets_epsilon: bool,
    top_modulus: f64,
    second_modulus: f64,
    spectral_gap: f64,
    per_replicate: Vec<ReplicateRow>,
}

fn certify_report(
    command: &'static str,
    p: &MarketParams,
    scenario: &MarketScenario,
) -> Result<CertifyReport> {
    let tau = default_tau(scenario, p.tau);
    let mut opts = DesignOptions::new(tau, p.target.unwrap_or(1.0));
    if let Some(margin) = p.margin {
        opts.margin = margin;
    }
    let replicates = p.replicates.unwrap_or(100);
    let epsilon = p.epsilon.unwrap_or(0.05);
    let records: Result<Vec<market::ReplicateRecord>, Error> = with_pool(p.threads, || {
        use rayon::prelude::*;
        (0..replicates)
            .into_par_iter()
            .map(|r| market::certify_replicate(scenario, &opts, r))
            .collect()
    })?;
    let outcome = market::summarize_certification(records?, epsilon)?;
    let mut moduli: Vec<f64> = scenario.eigen().values.iter().map(|l| l.abs()).collect();
    moduli.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let top_modulus = moduli[moduli.len() - 1];
    let second_modulus = if moduli.len() >= 2 {
        moduli[moduli.len() - 2]
    } else {
        0.0
    };
    let min_alignment = outcome
        .replicates
        .iter()
        .map(|r| r.alignment)
        .fold(f64::INFINITY, f64::min);
    Ok(CertifyReport {
        command,
        n: scenario.n(),
        seed: scenario.seed(),
        noise_sd: scenario.noise_sd(),
        tau,
        target: opts.target,
        margin: opts.margin,
        replicates,
        epsilon,
        success_rate: outcome.success_rate,
        mean_alignment: outcome.mean_alignment,
        min_alignment,
        davis_kahan_bound: outcome.davis_kahan_bound,
        meets_epsilon: outcome.meets_epsilon,
        top_modulus,
        second_modulus,
        spectral_gap: top_modulus - second_modulus,
        per_replicate: outcome
            .replicates
            .iter()
            .map(|r| ReplicateRow {
                replicate: r.replicate,
                success: r.success,
                true_welfare: r.true_welfare,
                alignment: r.alignment,
                noise_norm: r.noise_norm,
                davis_kahan_bound: r.davis_kahan_bound,
                design_error: r.design_error.as_ref().map(|e| e.to_string()),
            })
            .collect(),
    })
}

pub fn run_market_certify(p: &MarketParams) -> Result<CommandOutput> {
    let scenario = load_scenario(p)?;
    let report = certify_report("market-certify", p, &scenario)?;
    CommandOutput::json_only(&report, p.out.clone())
}

pub fn run_market_block_demo(p: &MarketParams) -> Result<CommandOutput> {
    let n = require(p.n, "--n")?;
    let mut with_defaults = p.clone();
    with_defaults.scenario = None;
    with_defaults.n = Some(n);
    with_defaults.replicates = Some(p.replicates.unwrap_or(20));
    let scenario = load_scenario(&with_defaults)?;
    let report = certify_report("market-block-demo", &with_defaults, &scenario)?;
    CommandOutput::json_only(&report, p.out.clone())
}

// ------------------------------------------------------------------- figures

fn read_coords(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = fs::read_to_string(path)
        .map_err(|e| anyhow!(Error::InvalidInput(format!("{}: {e}", path.display()))))?;
    let pairs: Vec<[f64; 2]> = serde_json::from_str(&text)
        .map_err(|e| anyhow!(Error::InvalidInput(format!("{}: {e}", path.display()))))?;
    Ok(pairs.iter().map(|p| (p[0], p[1])).collect())
}

fn read_scores_csv(path: &Path, n: usize) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path)
        .map_err(|e| anyhow!(Error::InvalidInput(format!("{}: {e}", path.display()))))?;
    let mut scores = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || lineno == 0 && line.starts_with("node") {
            continue;
        }
        let value = line
            .rsplit(',')
            .next()
            .ok_or_else(|| anyhow!(Error::InvalidInput(format!("line {}", lineno + 1))))?;
        scores.push(value.trim().parse::<f64>().map_err(|e| {
            anyhow!(Error::InvalidInput(format!("line {}: {e}", lineno + 1)))
        })?);
    }
    if scores.len() != n {
        bail!(Error::InvalidInput(format!(
            "{} scores for {n} nodes",
            scores.len()
        )));
    }
    Ok(scores)
}

pub fn run_figure(kind: &str, p: &FigureParams) -> Result<CommandOutput> {
    let svg = match kind {
        "fig1" => {
            let graph_path = require(p.graph.clone(), "--graph")?;
            let m = formats::read_matrix(&graph_path)?;
            let scores = match &p.scores {
                Some(path) => read_scores_csv(path, m.n())?,
                None => centrality::degree_centrality(&m, Direction::Undirected)?.scores,
            };
            let coords = match &p.coords {
                Some(path) => Some(read_coords(path)?),
                None => None,
            };
            figures::node_link_svg(&m, &scores, coords.as_deref())?
        }
        "fig2" => {
            let path = require(p.model.clone(), "--model")?;
            // Accept either a goods model or a bare matrix file.
            let m = if path.extension().and_then(|e| e.to_str()) == Some("json") {
                let text = fs::read_to_string(&path).map_err(|e| {
                    anyhow!(Error::InvalidInput(format!("{}: {e}", path.display())))
                })?;
                if let Ok(doc) = serde_json::from_str::<GoodsModelJson>(&text) {
                    formats::matrix_from_json(&doc.g)?
                } else {
                    formats::read_matrix(&path)?
                }
            } else {
                formats::read_matrix(&path)?
            };
            let coords = match &p.coords {
                Some(path) => Some(read_coords(path)?),
                None => None,
            };
            figures::digraph_svg(&m, coords.as_deref())?
        }
        "fig4" => {
            let market_params = MarketParams {
                scenario: p.scenario.clone(),
                n: p.n,
                seed: p.seed,
                ..Default::default()
            };
            let scenario = load_scenario(&market_params)?;
            let replicate = p.replicate.unwrap_or(0);
            let obs = market::observe_replicate(&scenario, replicate);
            let w1 = scenario.top_eigenvector();
            let hat_eigen = spectral_econ_core::linalg::symmetric_eigen(&obs.m_hat)?;
            let w1_hat = hat_eigen.vector(hat_eigen.top_modulus_index());
            figures::heatmap_panels_svg(
                scenario.matrix(),
                &figures::rank_one(&w1),
                &obs.m_hat,
                &figures::rank_one(&w1_hat),
            )
        }
        other => bail!(Error::InvalidInput(format!(
            "unknown figure {other:?} (expected fig1|fig2|fig4)"
        ))),
    };
    let out = p.out.clone();
    if out.is_none() {
        bail!(Error::InvalidInput(
            "figures need --out FILE.svg".into()
        ));
    }
    Ok(CommandOutput {
        json: String::new(),
        csv: None,
        svg: Some(svg),
        out,
    })
}
