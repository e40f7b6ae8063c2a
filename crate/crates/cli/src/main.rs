use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use spectral_econ::commands::{self, CommandOutput};
use spectral_econ::config::{self, ConfigDoc};
use spectral_econ::exit_code_for;

/// Spectral analysis of economic networks: centrality scores, averaging
/// opinion dynamics, linear-quadratic network games, public-goods Pareto
/// tests, and robust market interventions under noisy measurement.
#[derive(Parser)]
#[command(name = "spectral-econ", version, arg_required_else_help = true)]
struct Cli {
    /// Base seed for randomized experiments.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for replicated experiments (default: all cores).
    #[arg(long, global = true, env = "SPECTRAL_ECON_THREADS")]
    threads: Option<usize>,
    /// Report destination (stdout when omitted); .csv and .svg pick the
    /// matching rendering where available.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON experiment config; its values override command-line flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Node scores: degree, eigenvector, or Katz-Bonacich.
    Centrality {
        /// degree | eigenvector | katz
        measure: String,
        #[arg(long)]
        graph: Option<PathBuf>,
        /// in | out | undirected (degree only)
        #[arg(long)]
        direction: Option<String>,
        /// Decay parameter (katz only; requires delta * rho < 1).
        #[arg(long)]
        delta: Option<f64>,
        /// Exogenous term: "ones", an inline list, or a file (katz only).
        #[arg(long)]
        z: Option<String>,
    },
    /// Averaging opinion dynamics.
    Degroot {
        #[command(subcommand)]
        action: DegrootCmd,
    },
    /// Linear-quadratic network games.
    Game {
        /// nash | dynamics | keyness | poa
        action: String,
        #[arg(long)]
        game: Option<PathBuf>,
        #[arg(long)]
        x0: Option<String>,
        #[arg(long = "t-max")]
        t_max: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        /// closed-form | empirical (poa only)
        #[arg(long)]
        mode: Option<String>,
    },
    /// Public-goods Pareto analysis.
    Goods {
        /// classify | essential | improve
        action: String,
        #[arg(long)]
        model: Option<PathBuf>,
        /// Evaluation point (inline list or file; defaults to the origin).
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        tol: Option<f64>,
        /// Step size for realized-gain checks (improve only).
        #[arg(long)]
        eta: Option<f64>,
    },
    /// Market interventions under noisy measurement.
    Market {
        #[command(subcommand)]
        action: MarketCmd,
    },
    /// SVG figures.
    Figures {
        /// fig1 | fig2 | fig4
        kind: String,
        #[arg(long)]
        graph: Option<PathBuf>,
        /// node,score CSV produced by the centrality command (fig1).
        #[arg(long)]
        scores: Option<PathBuf>,
        /// JSON [[x, y], ...] node coordinates (fig1/fig2).
        #[arg(long)]
        coords: Option<PathBuf>,
        /// Goods model or matrix file (fig2).
        #[arg(long)]
        model: Option<PathBuf>,
        /// Market scenario file (fig4).
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// Built-in block scenario size (fig4).
        #[arg(long)]
        n: Option<usize>,
        /// Observation replicate index (fig4).
        #[arg(long)]
        replicate: Option<u64>,
    },
}

#[derive(Subcommand)]
enum DegrootCmd {
    /// Iterate x(t+1) = M x(t) and report the trajectory.
    Simulate {
        #[arg(long)]
        matrix: Option<PathBuf>,
        /// Initial opinions: list/file; use ';' between nodes for vector
        /// opinions.
        #[arg(long)]
        x0: Option<String>,
        #[arg(long = "t-max")]
        t_max: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        /// Keep every k-th state in the report.
        #[arg(long)]
        stride: Option<usize>,
    },
    /// Predict the consensus from the influence weights, no simulation.
    Consensus {
        #[arg(long)]
        matrix: Option<PathBuf>,
        #[arg(long)]
        x0: Option<String>,
    },
    /// Max-influence trend over a growing matrix family, with optional
    /// crowd-wisdom variance checks.
    Wisdom {
        /// uniform | celebrity | erdos
        #[arg(long)]
        family: Option<String>,
        /// Family sizes, e.g. --sizes 10,20,40
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        /// Edge-probability multiplier for erdos: p = scale * ln(n)/n.
        #[arg(long = "p-scale")]
        p_scale: Option<f64>,
        /// Crowd-wisdom replicates per size (0 = skip).
        #[arg(long)]
        replicates: Option<usize>,
        #[arg(long = "noise-sd")]
        noise_sd: Option<f64>,
        #[arg(long)]
        mu: Option<f64>,
    },
}

#[derive(Clone, clap::Args)]
struct MarketArgs {
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Size of the built-in block scenario.
    #[arg(long)]
    n: Option<usize>,
    /// Eigenvalue inclusion threshold (default 2.5 * noise_sd * sqrt(n)).
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    target: Option<f64>,
    #[arg(long)]
    margin: Option<f64>,
    #[arg(long = "noise-sd")]
    noise_sd: Option<f64>,
    /// Observation replicate (design only).
    #[arg(long)]
    replicate: Option<u64>,
    #[arg(long)]
    replicates: Option<u64>,
    #[arg(long)]
    epsilon: Option<f64>,
}

#[derive(Subcommand)]
enum MarketCmd {
    /// One observation, one designed intervention, evaluated against truth.
    Design(MarketArgs),
    /// Monte Carlo certification of the design rule.
    Certify(MarketArgs),
    /// Certification of the built-in three-sector block scenario.
    BlockDemo(MarketArgs),
}

impl MarketArgs {
    fn into_params(self, cli_seed: Option<u64>, threads: Option<usize>, out: Option<PathBuf>) -> config::MarketParams {
        config::MarketParams {
            scenario: self.scenario,
            n: self.n,
            tau: self.tau,
            target: self.target,
            margin: self.margin,
            noise_sd: self.noise_sd,
            replicate: self.replicate,
            replicates: self.replicates,
            epsilon: self.epsilon,
            seed: cli_seed,
            threads,
            out,
        }
    }
}

fn load_config_if_any(path: &Option<PathBuf>) -> anyhow::Result<Option<ConfigDoc>> {
    match path {
        Some(p) => Ok(Some(config::load(p)?)),
        None => Ok(None),
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<CommandOutput> {
    let doc = load_config_if_any(&cli.config)?;
    let seed = cli.seed;
    let threads = cli.threads;
    let out = cli.out;
    match cli.command {
        Cmd::Centrality {
            measure,
            graph,
            direction,
            delta,
            z,
        } => {
            let mut params = config::CentralityParams {
                measure: Some(measure),
                graph,
                direction,
                delta,
                z,
                out,
            };
            if let Some(doc) = doc {
                config::expect_kind(&doc, "centrality")?;
                if let ConfigDoc::Centrality(over) = doc {
                    params.overlay(over);
                }
            }
            commands::run_centrality(&params)
        }
        Cmd::Degroot { action } => match action {
            DegrootCmd::Simulate {
                matrix,
                x0,
                t_max,
                tol,
                stride,
            } => {
                let mut params = config::DegrootSimulateParams {
                    matrix,
                    x0,
                    t_max,
                    tol,
                    stride,
                    out,
                };
                if let Some(doc) = doc {
                    config::expect_kind(&doc, "degroot-simulate")?;
                    if let ConfigDoc::DegrootSimulate(over) = doc {
                        params.overlay(over);
                    }
                }
                commands::run_degroot_simulate(&params)
            }
            DegrootCmd::Consensus { matrix, x0 } => {
                let mut params = config::DegrootConsensusParams { matrix, x0, out };
                if let Some(doc) = doc {
                    config::expect_kind(&doc, "degroot-consensus")?;
                    if let ConfigDoc::DegrootConsensus(over) = doc {
                        params.overlay(over);
                    }
                }
                commands::run_degroot_consensus(&params)
            }
            DegrootCmd::Wisdom {
                family,
                sizes,
                p_scale,
                replicates,
                noise_sd,
                mu,
            } => {
                let mut params = config::DegrootWisdomParams {
                    family,
                    sizes,
                    p_scale,
                    replicates,
                    noise_sd,
                    mu,
                    seed,
                    threads,
                    out,
                };
                if let Some(doc) = doc {
                    config::expect_kind(&doc, "degroot-wisdom")?;
                    if let ConfigDoc::DegrootWisdom(over) = doc {
                        params.overlay(over);
                    }
                }
                commands::run_degroot_wisdom(&params)
            }
        },
        Cmd::Game {
            action,
            game,
            x0,
            t_max,
            tol,
            mode,
        } => {
            let mut params = config::GameParams {
                game,
                x0,
                t_max,
                tol,
                mode,
                seed,
                out,
            };
            if let Some(doc) = doc {
                config::expect_kind(&doc, "game")?;
                if let ConfigDoc::Game(over) = doc {
                    params.overlay(over);
                }
            }
            commands::run_game(&action, &params)
        }
        Cmd::Goods {
            action,
            model,
            x,
            tol,
            eta,
        } => {
            let mut params = config::GoodsParams {
                model,
                x,
                tol,
                eta,
                out,
            };
            if let Some(doc) = doc {
                config::expect_kind(&doc, "goods")?;
                if let ConfigDoc::Goods(over) = doc {
                    params.overlay(over);
                }
            }
            commands::run_goods(&action, &params)
        }
        Cmd::Market { action } => match action {
            MarketCmd::Design(args) => {
                let mut params = args.into_params(seed, threads, out);
                if let Some(doc) = doc {
                    config::expect_kind(&doc, "market-design")?;
                    if let ConfigDoc::MarketDesign(over) = doc {
                        params.overlay(over);
                    }
                }
                commands::run_market_design(&params)
            }
            MarketCmd::Certify(args) => {
                let mut params = args.into_params(seed, threads, out);
                if let Some(doc) = doc {
                    config::expect_kind(&doc, "market-certify")?;
                    if let ConfigDoc::MarketCertify(over) = doc {
                        params.overlay(over);
                    }
                }
                commands::run_market_certify(&params)
            }
            MarketCmd::BlockDemo(args) => {
                let mut params = args.into_params(seed, threads, out);
                if let Some(doc) = doc {
                    config::expect_kind(&doc, "market-block-demo")?;
                    if let ConfigDoc::MarketBlockDemo(over) = doc {
                        params.overlay(over);
                    }
                }
                commands::run_market_block_demo(&params)
            }
        },
        Cmd::Figures {
            kind,
            graph,
            scores,
            coords,
            model,
            scenario,
            n,
            replicate,
        } => {
            let mut params = config::FigureParams {
                graph,
                scores,
                coords,
                model,
                scenario,
                n,
                replicate,
                seed,
                out,
            };
            if let Some(doc) = doc {
                config::expect_kind(&doc, "figure")?;
                if let ConfigDoc::Figure(over) = doc {
                    params.overlay(over);
                }
            }
            commands::run_figure(&kind, &params)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli).and_then(CommandOutput::write) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("spectral-econ: {err:#}");
            ExitCode::from(exit_code_for(&err) as u8)
        }
    }
}
