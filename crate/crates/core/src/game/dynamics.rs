//! Sequential best-response heuristic with single-link drops and adds.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Evaluator, GameParams, OwnershipProfile};
use crate::graph::{bit, Graph};
use crate::{Error, Result};

/// Rejection sampling gives up after this many disconnected draws.
const MAX_SAMPLING_ATTEMPTS: u32 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DynamicsConfig {
    pub n: usize,
    pub seed: u64,
    /// Link probability of the initial `G(n, p_init)` draw.
    pub p_init: f64,
    pub t_max: usize,
}

impl DynamicsConfig {
    pub fn new(n: usize, seed: u64) -> Self {
        DynamicsConfig { n, seed, p_init: 0.5, t_max: 200 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum ActionKind {
    /// Drop one owned link.
    D,
    /// Add one link, paid for by the actor.
    A,
    /// Do nothing.
    N,
}

/// One half-move of a node within a slot.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Action {
    /// Slot index, from 1.
    pub t: usize,
    pub node: usize,
    pub kind: ActionKind,
    pub counterpart: Option<usize>,
    pub cost_before: f64,
    pub cost_after: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(tag = "status", rename_all = "lowercase"))]
pub enum Termination {
    /// Slot `slots` was all-N.
    Converged { slots: usize },
    /// `t_max` slots ran without a quiet one.
    Budget,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub initial: (Graph, OwnershipProfile),
    /// State at the end of every slot.
    pub slots: Vec<(Graph, OwnershipProfile)>,
    pub actions: Vec<Action>,
    pub termination: Termination,
}

impl Trajectory {
    pub fn terminal(&self) -> &(Graph, OwnershipProfile) {
        self.slots.last().unwrap_or(&self.initial)
    }

    pub fn converged(&self) -> bool {
        matches!(self.termination, Termination::Converged { .. })
    }
}

/// Connected `G(n, p_init)` sample with every link owned by an endpoint
/// chosen uniformly, all drawn from one ChaCha8 stream seeded by `seed`.
pub fn random_connected_profile(n: usize, p_init: f64, seed: u64) -> Result<(Graph, OwnershipProfile)> {
    if !(p_init > 0.0 && p_init <= 1.0) {
        return Err(Error::InvalidParameter("p_init must lie in (0, 1]"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_SAMPLING_ATTEMPTS {
        let mut triples = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen_bool(p_init) {
                    let owner = if rng.gen_bool(0.5) { i } else { j };
                    triples.push((i, j, owner));
                }
            }
        }
        let own = OwnershipProfile::from_triples(n, &triples)?;
        let g = own.graph();
        if g.is_connected() {
            return Ok((g, own));
        }
    }
    Err(Error::InvalidParameter("p_init too small to sample a connected graph"))
}

impl Evaluator {
    /// Runs the heuristic from a given state.
    ///
    /// Within a slot nodes act in index order; each first takes its best
    /// improving drop, then on the resulting graph its best improving add.
    /// Ties go to the lowest counterpart.
    pub fn run_dynamics_from(&mut self, g: Graph, own: OwnershipProfile, t_max: usize) -> Result<Trajectory> {
        if t_max == 0 {
            return Err(Error::InvalidParameter("t_max must be at least 1"));
        }
        own.check_against(&g)?;
        let eps = self.params.improvement_epsilon;
        let initial = (g.clone(), own.clone());
        let (mut g, mut own) = (g, own);
        let mut slots = Vec::new();
        let mut actions = Vec::new();
        let mut termination = Termination::Budget;
        for t in 1..=t_max {
            let mut quiet = true;
            for i in 0..g.n() {
                let before = self.cost_with_links(&g, i, own.k(i))?;
                let action = match self.best_drop(&g, &own, i)? {
                    Some((j, d)) if d < -eps => {
                        g.clear_link(i, j);
                        own.set_owned(i, own.owned(i) & !bit(j));
                        let after = self.cost_with_links(&g, i, own.k(i))?;
                        Action { t, node: i, kind: ActionKind::D, counterpart: Some(j), cost_before: before, cost_after: after }
                    }
                    _ => Action { t, node: i, kind: ActionKind::N, counterpart: None, cost_before: before, cost_after: before },
                };
                quiet &= action.kind == ActionKind::N;
                actions.push(action);

                let before = action.cost_after;
                let action = match self.best_add(&g, &own, i)? {
                    Some((j, d)) if d < -eps => {
                        g.set_link(i, j);
                        own.set_owned(i, own.owned(i) | bit(j));
                        let after = self.cost_with_links(&g, i, own.k(i))?;
                        Action { t, node: i, kind: ActionKind::A, counterpart: Some(j), cost_before: before, cost_after: after }
                    }
                    _ => Action { t, node: i, kind: ActionKind::N, counterpart: None, cost_before: before, cost_after: before },
                };
                quiet &= action.kind == ActionKind::N;
                actions.push(action);
            }
            slots.push((g.clone(), own.clone()));
            if quiet {
                termination = Termination::Converged { slots: t };
                break;
            }
        }
        Ok(Trajectory { initial, slots, actions, termination })
    }

    /// Runs the heuristic from a seeded connected random graph.
    pub fn run_dynamics(&mut self, cfg: &DynamicsConfig) -> Result<Trajectory> {
        let (g, own) = random_connected_profile(cfg.n, cfg.p_init, cfg.seed)?;
        self.run_dynamics_from(g, own, cfg.t_max)
    }
}

/// One-shot [`Evaluator::run_dynamics`].
pub fn run_dynamics(n: usize, p: &GameParams, seed: u64, p_init: f64, t_max: usize) -> Result<Trajectory> {
    Evaluator::new(*p).run_dynamics(&DynamicsConfig { n, seed, p_init, t_max })
}
