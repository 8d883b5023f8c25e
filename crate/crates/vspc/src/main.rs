use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use vspc::io::{read_edge_list, read_file, read_ownership};
use vspc::report::{self, DynamicsReport, EquilibriumOutput, OptimumOutput, SolveReport};
use vspc::sweep::{linspace, poa_curve_csv, run_sweep, sweep_csv, SweepSpec};
use vspc::{Error, Result};
use vspc_core::analysis::{optimal_social_cost, SearchSpace};
use vspc_core::epidemic::{epidemic_threshold, steady_state_with, EpidemicParams, SolverSettings};
use vspc_core::game::{DynamicsConfig, Evaluator, GameParams};
use vspc_core::graph::{connected_graph_count, enumerate_connected_graphs, enumerate_trees};

#[derive(Parser)]
#[command(name = "vspc", version, about = "Epidemic-aware network formation game toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// NIMFA steady state of a graph file.
    Solve {
        graph: PathBuf,
        #[arg(long)]
        tau: f64,
        #[arg(long)]
        tol: Option<f64>,
        /// Print JSON instead of one value per line.
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact Nash check of an owned graph; prints JSON.
    Equilibrium {
        graph: PathBuf,
        ownership: PathBuf,
        #[command(flatten)]
        game: GameArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Drop/add best-response dynamics from a random connected graph.
    Dynamics {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        game: GameArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        t_max: usize,
        #[arg(long, default_value_t = 0.5)]
        p_init: f64,
        /// Write the action log (CSV) here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a sweep spec file and emit CSV.
    Sweep {
        spec: PathBuf,
        /// Overrides the spec's `out` key.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Path-versus-star price of anarchy over a tau range; emits CSV.
    PoaCurve {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
        #[arg(long)]
        zero_gamma: bool,
        #[arg(long)]
        no_virus: bool,
        #[arg(long, default_value_t = 0.1)]
        tau_min: f64,
        #[arg(long, default_value_t = 20.0)]
        tau_max: f64,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count or list labeled trees or connected graphs; with --tau, find the
    /// social optimum among them.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Space::Connected)]
        space: Space,
        #[arg(long)]
        list: bool,
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
        #[arg(long)]
        zero_gamma: bool,
        #[arg(long)]
        no_virus: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Space {
    Trees,
    Connected,
}

impl From<Space> for SearchSpace {
    fn from(s: Space) -> Self {
        match s {
            Space::Trees => SearchSpace::Trees,
            Space::Connected => SearchSpace::AllConnected,
        }
    }
}

#[derive(Args)]
struct GameArgs {
    #[arg(long)]
    alpha: f64,
    /// Ignored with --zero-gamma.
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    #[arg(long)]
    tau: f64,
    /// Hopcounts cost nothing; disconnection is still infinitely costly.
    #[arg(long)]
    zero_gamma: bool,
    /// Drop the infection term from every cost.
    #[arg(long)]
    no_virus: bool,
    #[arg(long)]
    tol: Option<f64>,
}

fn params(alpha: f64, gamma: f64, tau: f64, zero_gamma: bool, no_virus: bool, tol: Option<f64>) -> Result<GameParams> {
    let mut p = if zero_gamma { GameParams::zero_gamma(alpha, tau)? } else { GameParams::new(alpha, gamma, tau)? };
    p = p.with_no_virus(no_virus);
    if let Some(tol) = tol {
        p.solver.tol = checked_tol(tol)?;
    }
    Ok(p)
}

fn checked_tol(tol: f64) -> Result<f64> {
    if tol.is_finite() && tol > 0.0 {
        Ok(tol)
    } else {
        Err(vspc_core::Error::InvalidParameter("tol must be positive").into())
    }
}

impl GameArgs {
    fn params(&self) -> Result<GameParams> {
        params(self.alpha, self.gamma, self.tau, self.zero_gamma, self.no_virus, self.tol)
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| Error::Io { path: path.to_owned(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json(value: &impl serde::Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve { graph, tau, tol, json: as_json, out } => {
            let g = read_edge_list(&graph)?;
            let mut s = SolverSettings::default();
            if let Some(tol) = tol {
                s.tol = checked_tol(tol)?;
            }
            let st = steady_state_with(&g, &EpidemicParams::new(tau)?, &s)?;
            if !st.converged {
                return Err(vspc_core::Error::NotConverged { iterations: st.iterations, residual: st.residual }.into());
            }
            let threshold = if g.link_count() == 0 { None } else { Some(epidemic_threshold(&g)?) };
            let r = SolveReport::new(&g, tau, threshold, &st);
            let text = if as_json { json(&r)? } else { r.to_text() };
            emit(&text, out.as_deref())
        }
        Command::Equilibrium { graph, ownership, game, out } => {
            let g = read_edge_list(&graph)?;
            let own = read_ownership(&ownership, &g)?;
            let p = game.params()?;
            let mut ev = Evaluator::new(p);
            let r = ev.is_nash_exact(&g, &own)?;
            let j = ev.social_cost(&g)?;
            let costs = (0..g.n()).map(|i| Ok(ev.player_cost(&g, &own, i)?.total)).collect::<Result<Vec<_>>>()?;
            emit(&json(&EquilibriumOutput::new(&p, r, j, costs))?, out.as_deref())
        }
        Command::Dynamics { n, game, seed, t_max, p_init, out } => {
            let p = game.params()?;
            let mut ev = Evaluator::new(p);
            let tr = ev.run_dynamics(&DynamicsConfig { n, seed, p_init, t_max })?;
            let (g, own) = tr.terminal();
            let ad = ev.is_ad_stable(g, own)?;
            let j = ev.social_cost(g)?;
            print!("{}", json(&DynamicsReport::new(seed, &p, &tr, ad, j))?);
            if let Some(path) = out {
                emit(&report::actions_text(&tr), Some(&path))?;
            }
            Ok(())
        }
        Command::Sweep { spec, out } => {
            let text = read_file(&spec)?;
            let mut s = SweepSpec::parse(&text)?;
            if out.is_some() {
                s.out = out;
            }
            let csv = sweep_csv(&run_sweep(&s)?)?;
            emit(&csv, s.out.as_deref())
        }
        Command::PoaCurve { n, alpha, gamma, zero_gamma, no_virus, tau_min, tau_max, steps, out } => {
            if !(tau_min > 0.0 && tau_max >= tau_min && steps > 0) {
                return Err(vspc_core::Error::InvalidParameter("need 0 < tau-min <= tau-max and steps > 0").into());
            }
            let p = params(alpha, gamma, tau_min, zero_gamma, no_virus, None)?;
            emit(&poa_curve_csv(n, &p, &linspace(tau_min, tau_max, steps))?, out.as_deref())
        }
        Command::Enumerate { n, space, list, tau, alpha, gamma, zero_gamma, no_virus, out } => {
            let mut text = String::new();
            if let Some(tau) = tau {
                let p = params(alpha, gamma, tau, zero_gamma, no_virus, None)?;
                let r = optimal_social_cost(n, &p, space.into())?;
                let o = OptimumOutput {
                    n,
                    params: (&p).into(),
                    space: match space {
                        Space::Trees => "trees",
                        Space::Connected => "connected",
                    },
                    graphs_examined: r.graphs_examined,
                    ties: r.ties,
                    best_cost: r.best_cost,
                    edges: report::edges(&r.best_graph),
                };
                text = json(&o)?;
            } else if list {
                let graphs: Box<dyn Iterator<Item = _>> = match space {
                    Space::Trees => Box::new(enumerate_trees(n)?),
                    Space::Connected => Box::new(enumerate_connected_graphs(n)?),
                };
                for g in graphs {
                    let e: Vec<String> = g.links().map(|(u, v)| format!("{u}-{v}")).collect();
                    text.push_str(&e.join(" "));
                    text.push('\n');
                }
            } else {
                let count = match space {
                    Space::Trees => enumerate_trees(n)?.count(),
                    Space::Connected => connected_graph_count(n)?,
                };
                text = format!("{count}\n");
            }
            emit(&text, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
