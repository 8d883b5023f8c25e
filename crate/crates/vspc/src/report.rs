//! JSON shapes printed by the CLI. Graphs appear as edge lists.

use serde::Serialize;
use vspc_core::epidemic::SteadyState;
use vspc_core::game::{Deviation, EquilibriumReport, GameParams, OwnershipProfile, Termination, Trajectory};
use vspc_core::Graph;

pub fn edges(g: &Graph) -> Vec<(usize, usize)> {
    g.links().collect()
}

/// Parameters as shown to users; `gamma` is the hop weight actually used.
#[derive(Clone, Debug, Serialize)]
pub struct ParamsView {
    pub alpha: f64,
    pub gamma: f64,
    pub tau: f64,
    pub zero_gamma: bool,
    pub no_virus: bool,
}

impl From<&GameParams> for ParamsView {
    fn from(p: &GameParams) -> Self {
        ParamsView { alpha: p.alpha, gamma: p.hop_weight(), tau: p.tau(), zero_gamma: p.zero_gamma, no_virus: p.no_virus }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub n: usize,
    pub tau: f64,
    /// `None` for a graph without links.
    pub threshold: Option<f64>,
    pub below_threshold: bool,
    pub v: Vec<f64>,
    pub total: f64,
    pub converged: bool,
    pub iterations: usize,
    pub residual: f64,
}

impl SolveReport {
    pub fn new(g: &Graph, tau: f64, threshold: Option<f64>, s: &SteadyState) -> Self {
        SolveReport {
            n: g.n(),
            tau,
            threshold,
            below_threshold: s.is_zero(),
            v: s.v.clone(),
            total: s.total(),
            converged: s.converged,
            iterations: s.iterations,
            residual: s.residual,
        }
    }

    /// One value per line with six decimals, then `#` summary lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for x in &self.v {
            out.push_str(&format!("{x:.6}\n"));
        }
        match self.threshold {
            Some(t) => out.push_str(&format!("# threshold tau_c = {t:.6}\n")),
            None => out.push_str("# threshold undefined (no links)\n"),
        }
        if self.below_threshold {
            out.push_str("# below threshold: the infection dies out\n");
        }
        out.push_str(&format!(
            "# total = {:.6}, iterations = {}, residual = {:e}, converged = {}\n",
            self.total, self.iterations, self.residual, self.converged
        ));
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EquilibriumOutput {
    pub params: ParamsView,
    pub exact_ne: bool,
    pub ad_stable: bool,
    pub best_deviation: Option<Deviation>,
    pub deviations_checked: u64,
    #[serde(rename = "J")]
    pub social_cost: f64,
    pub player_costs: Vec<f64>,
}

impl EquilibriumOutput {
    pub fn new(p: &GameParams, r: EquilibriumReport, social_cost: f64, player_costs: Vec<f64>) -> Self {
        EquilibriumOutput {
            params: p.into(),
            exact_ne: r.exact_ne,
            ad_stable: r.ad_stable,
            best_deviation: r.best_deviation,
            deviations_checked: r.deviations_checked,
            social_cost,
            player_costs,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DynamicsReport {
    pub n: usize,
    pub seed: u64,
    pub params: ParamsView,
    pub termination: Termination,
    pub slots: usize,
    pub links: usize,
    pub edges: Vec<(usize, usize)>,
    /// `(u, v, owner)` triples of the terminal state.
    pub ownership: Vec<(usize, usize, usize)>,
    pub ad_stable: bool,
    #[serde(rename = "J")]
    pub social_cost: f64,
}

impl DynamicsReport {
    pub fn new(seed: u64, p: &GameParams, tr: &Trajectory, ad_stable: bool, social_cost: f64) -> Self {
        let (g, own): &(Graph, OwnershipProfile) = tr.terminal();
        DynamicsReport {
            n: g.n(),
            seed,
            params: p.into(),
            termination: tr.termination,
            slots: tr.slots.len(),
            links: g.link_count(),
            edges: edges(g),
            ownership: own.triples(),
            ad_stable,
            social_cost,
        }
    }
}

/// Action log of a dynamics run, one line per decision.
pub fn actions_text(tr: &Trajectory) -> String {
    let mut out = String::from("t,node,action,counterpart,J_before,J_after\n");
    for a in &tr.actions {
        let c = a.counterpart.map(|c| c.to_string()).unwrap_or_default();
        out.push_str(&format!("{},{},{:?},{},{},{}\n", a.t, a.node, a.kind, c, a.cost_before, a.cost_after));
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct OptimumOutput {
    pub n: usize,
    pub params: ParamsView,
    pub space: &'static str,
    pub graphs_examined: u64,
    pub ties: usize,
    #[serde(rename = "J")]
    pub best_cost: f64,
    pub edges: Vec<(usize, usize)>,
}
