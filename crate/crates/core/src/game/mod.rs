//! The VSPC game: ownership profiles, costs, equilibria and dynamics.
//!
//! Player `i` pays
//!
//! ```text
//! J_i = alpha * k_i + gamma * sum_j h(i, j) + v_i
//! ```
//!
//! where `k_i` is the number of links it installed, `h` the hopcount and
//! `v_i` its metastable infection probability. Both endpoints use a link but
//! only its owner pays for it, and a player can only add or remove links it
//! owns.

use alloc::vec::Vec;

use crate::epidemic::{EpidemicParams, SolverSettings, SteadyStateCache};
use crate::graph::{bit, full_mask, Bits, Graph};
use crate::{Error, Result};

mod dynamics;
mod nash;

pub use dynamics::{
    random_connected_profile, run_dynamics, Action, ActionKind, DynamicsConfig, Termination,
    Trajectory,
};
pub use nash::{
    deviated_graph, deviation_candidates, deviation_space, is_ad_stable, is_nash_exact, Deviation,
    DeviationKind, EquilibriumReport, StrategySets, DEVIATION_BUDGET,
};

pub const DEFAULT_IMPROVEMENT_EPSILON: f64 = 1e-9;

/// Cost weights and solver settings shared by all players.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct GameParams {
    pub alpha: f64,
    pub gamma: f64,
    pub epidemic: EpidemicParams,
    /// The `gamma -> 0` limit: hop terms vanish, but disconnection still
    /// makes a cost infinite.
    pub zero_gamma: bool,
    /// Bypass the epidemic solver and use `v = 0` everywhere.
    pub no_virus: bool,
    pub solver: SolverSettings,
    /// A deviation counts as improving only below `-improvement_epsilon`.
    pub improvement_epsilon: f64,
}

impl GameParams {
    pub fn new(alpha: f64, gamma: f64, tau: f64) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter("alpha must be finite and non-negative"));
        }
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParameter("gamma must be finite and non-negative"));
        }
        Ok(GameParams {
            alpha,
            gamma,
            epidemic: EpidemicParams::new(tau)?,
            zero_gamma: false,
            no_virus: false,
            solver: SolverSettings::default(),
            improvement_epsilon: DEFAULT_IMPROVEMENT_EPSILON,
        })
    }

    /// Zero-gamma game with link weight `alpha`.
    pub fn zero_gamma(alpha: f64, tau: f64) -> Result<Self> {
        let mut p = GameParams::new(alpha, 0.0, tau)?;
        p.zero_gamma = true;
        Ok(p)
    }

    pub fn with_no_virus(mut self, no_virus: bool) -> Self {
        self.no_virus = no_virus;
        self
    }

    /// Same weights and flags with a different effective infection rate.
    pub fn with_tau(mut self, tau: f64) -> Result<Self> {
        self.epidemic = EpidemicParams::new(tau)?;
        Ok(self)
    }

    #[inline]
    pub fn tau(&self) -> f64 {
        self.epidemic.tau()
    }

    /// Weight applied to hopcounts (zero in zero-gamma mode).
    #[inline]
    pub fn hop_weight(&self) -> f64 {
        if self.zero_gamma {
            0.0
        } else {
            self.gamma
        }
    }
}

/// Who paid for each link. `owned[i]` is the neighbor mask of links
/// installed by `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OwnershipProfile {
    owned: Vec<u64>,
}

impl OwnershipProfile {
    /// From `(u, v, owner)` triples; `owner` must be `u` or `v` and each link
    /// may appear once.
    pub fn from_triples(n: usize, triples: &[(usize, usize, usize)]) -> Result<Self> {
        let mut g = Graph::empty(n)?;
        let mut owned = alloc::vec![0u64; n];
        for &(u, v, owner) in triples {
            if g.has_link(u, v) {
                return Err(Error::OwnershipMismatch("link listed twice"));
            }
            g.add_link(u, v)?;
            if owner != u && owner != v {
                return Err(Error::OwnershipMismatch("owner is not an endpoint of its link"));
            }
            let other = if owner == u { v } else { u };
            owned[owner] |= bit(other);
        }
        Ok(OwnershipProfile { owned })
    }

    /// Assigns every link of `g` with `owner_of(i, j)` for `i < j`.
    pub fn from_fn(g: &Graph, mut owner_of: impl FnMut(usize, usize) -> usize) -> Result<Self> {
        let mut owned = alloc::vec![0u64; g.n()];
        for (i, j) in g.links() {
            let o = owner_of(i, j);
            if o == i {
                owned[i] |= bit(j);
            } else if o == j {
                owned[j] |= bit(i);
            } else {
                return Err(Error::OwnershipMismatch("owner is not an endpoint of its link"));
            }
        }
        Ok(OwnershipProfile { owned })
    }

    /// The lower-indexed endpoint pays for every link.
    pub fn lower_endpoint(g: &Graph) -> Self {
        Self::from_fn(g, |i, _| i).expect("lower endpoint is an endpoint")
    }

    /// Star centered at 0 with the center paying for all links.
    pub fn center_owned_star(n: usize) -> Result<Self> {
        let g = Graph::star(n)?;
        Self::from_fn(&g, |i, _| i)
    }

    /// Path `0 - 1 - ... - (n-1)` where node `i >= 1` pays for its link to
    /// `i - 1` and node 0 pays for nothing.
    pub fn chain_path(n: usize) -> Result<Self> {
        let g = Graph::path(n)?;
        Self::from_fn(&g, |_, j| j)
    }

    /// Every ownership profile of `g` (`2^L` of them).
    pub fn enumerate(g: &Graph) -> impl Iterator<Item = OwnershipProfile> + '_ {
        let links: Vec<(usize, usize)> = g.links().collect();
        let total = 1u64 << links.len();
        (0..total).map(move |choice| {
            let mut owned = alloc::vec![0u64; g.n()];
            for (k, &(i, j)) in links.iter().enumerate() {
                if choice >> k & 1 == 0 {
                    owned[i] |= bit(j);
                } else {
                    owned[j] |= bit(i);
                }
            }
            OwnershipProfile { owned }
        })
    }

    pub fn n(&self) -> usize {
        self.owned.len()
    }

    /// Mask of counterparts of links owned by `i`.
    #[inline]
    pub fn owned(&self, i: usize) -> u64 {
        self.owned[i]
    }

    /// `k_i`.
    #[inline]
    pub fn k(&self, i: usize) -> usize {
        self.owned[i].count_ones() as usize
    }

    /// Counterparts of the links `i` owns, ascending.
    pub fn strategy(&self, i: usize) -> Vec<usize> {
        Bits(self.owned[i]).collect()
    }

    /// Owner of link `{u, v}`, if present.
    pub fn owner(&self, u: usize, v: usize) -> Option<usize> {
        if u >= self.n() || v >= self.n() {
            return None;
        }
        if self.owned[u] & bit(v) != 0 {
            Some(u)
        } else if self.owned[v] & bit(u) != 0 {
            Some(v)
        } else {
            None
        }
    }

    /// `(u, v, owner)` for every link, `u < v`.
    pub fn triples(&self) -> Vec<(usize, usize, usize)> {
        let g = self.graph();
        g.links().map(|(u, v)| (u, v, self.owner(u, v).expect("link has an owner"))).collect()
    }

    /// Links installed by anyone.
    pub fn graph(&self) -> Graph {
        let n = self.n();
        let mut rows = self.owned.clone();
        for (i, &own) in self.owned.iter().enumerate() {
            for j in Bits(own) {
                rows[j] |= bit(i);
            }
        }
        debug_assert!(rows.iter().all(|r| r & !full_mask(n) == 0));
        Graph::from_rows_unchecked(rows)
    }

    /// Mask of `i`'s neighbors whose link to `i` is paid for by them.
    pub(crate) fn fixed_for(&self, i: usize) -> u64 {
        let mut m = 0;
        for (j, &own) in self.owned.iter().enumerate() {
            if own & bit(i) != 0 {
                m |= bit(j);
            }
        }
        m
    }

    /// Errors unless every link of `g` has exactly one owner and no other
    /// links are owned.
    pub fn check_against(&self, g: &Graph) -> Result<()> {
        if self.n() != g.n() {
            return Err(Error::OwnershipMismatch("node counts differ"));
        }
        for (i, &own) in self.owned.iter().enumerate() {
            if own & bit(i) != 0 {
                return Err(Error::OwnershipMismatch("self-owned link"));
            }
            for j in Bits(own) {
                if self.owned[j] & bit(i) != 0 {
                    return Err(Error::OwnershipMismatch("link owned by both endpoints"));
                }
            }
        }
        if &self.graph() != g {
            return Err(Error::OwnershipMismatch("owned links differ from the graph"));
        }
        Ok(())
    }

    pub(crate) fn set_owned(&mut self, i: usize, mask: u64) {
        self.owned[i] = mask;
    }
}

/// The three terms of `J_i`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CostBreakdown {
    pub link_cost: f64,
    pub hop_cost: f64,
    pub infection: f64,
    /// `f64::INFINITY` when some node is unreachable from the player.
    pub total: f64,
    pub is_finite: bool,
}

/// The terms of the social cost `J = alpha L + gamma sum_ij h(i,j) + sum_i v_i`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SocialCost {
    pub links: usize,
    /// Ordered-pair hopcount sum; `None` when disconnected.
    pub hop_total: Option<u64>,
    pub infection: f64,
    pub total: f64,
}

/// Cost evaluation with a private steady-state cache.
#[derive(Clone, Debug)]
pub struct Evaluator {
    params: GameParams,
    cache: SteadyStateCache,
}

impl Evaluator {
    pub fn new(params: GameParams) -> Self {
        Evaluator { params, cache: SteadyStateCache::new() }
    }

    pub fn with_cache(params: GameParams, cache: SteadyStateCache) -> Self {
        Evaluator { params, cache }
    }

    pub fn params(&self) -> &GameParams {
        &self.params
    }

    pub fn cache(&self) -> &SteadyStateCache {
        &self.cache
    }

    /// Metastable probabilities under these parameters (zeros with
    /// `no_virus`).
    pub fn infection(&mut self, g: &Graph) -> Result<Vec<f64>> {
        if self.params.no_virus {
            return Ok(alloc::vec![0.0; g.n()]);
        }
        let s = self.cache.get_or_solve(g, &self.params.epidemic, &self.params.solver)?;
        if !s.converged {
            return Err(Error::NotConverged { iterations: s.iterations, residual: s.residual });
        }
        Ok(s.v.clone())
    }

    fn infection_of(&mut self, g: &Graph, i: usize) -> Result<f64> {
        if self.params.no_virus {
            return Ok(0.0);
        }
        let s = self.cache.get_or_solve(g, &self.params.epidemic, &self.params.solver)?;
        if !s.converged {
            return Err(Error::NotConverged { iterations: s.iterations, residual: s.residual });
        }
        Ok(s.v[i])
    }

    /// `J_i` of player `i` owning `k` links in `g`; infinite when `g` is
    /// disconnected.
    pub(crate) fn cost_with_links(&mut self, g: &Graph, i: usize, k: usize) -> Result<f64> {
        Ok(self.breakdown_with_links(g, i, k)?.total)
    }

    fn breakdown_with_links(&mut self, g: &Graph, i: usize, k: usize) -> Result<CostBreakdown> {
        let link_cost = self.params.alpha * k as f64;
        let Some(hops) = g.hop_sum(i) else {
            return Ok(CostBreakdown {
                link_cost,
                hop_cost: f64::INFINITY,
                infection: f64::NAN,
                total: f64::INFINITY,
                is_finite: false,
            });
        };
        let hop_cost = self.params.hop_weight() * hops as f64;
        let infection = self.infection_of(g, i)?;
        Ok(CostBreakdown {
            link_cost,
            hop_cost,
            infection,
            total: link_cost + hop_cost + infection,
            is_finite: true,
        })
    }

    /// Cost of player `i`.
    pub fn player_cost(&mut self, g: &Graph, own: &OwnershipProfile, i: usize) -> Result<CostBreakdown> {
        own.check_against(g)?;
        if i >= g.n() {
            return Err(Error::NodeOutOfRange { node: i, n: g.n() });
        }
        self.breakdown_with_links(g, i, own.k(i))
    }

    pub fn social_breakdown(&mut self, g: &Graph) -> Result<SocialCost> {
        let links = g.link_count();
        let hop_total = (0..g.n()).try_fold(0u64, |acc, i| Some(acc + g.hop_sum(i)?));
        let Some(hops) = hop_total else {
            return Ok(SocialCost { links, hop_total, infection: f64::NAN, total: f64::INFINITY });
        };
        let infection: f64 = self.infection(g)?.iter().sum();
        let total = self.params.alpha * links as f64 + self.params.hop_weight() * hops as f64 + infection;
        Ok(SocialCost { links, hop_total, infection, total })
    }

    /// Social cost; independent of who owns which link.
    pub fn social_cost(&mut self, g: &Graph) -> Result<f64> {
        Ok(self.social_breakdown(g)?.total)
    }
}

/// One-shot [`Evaluator::player_cost`].
pub fn player_cost(g: &Graph, own: &OwnershipProfile, i: usize, p: &GameParams) -> Result<CostBreakdown> {
    Evaluator::new(*p).player_cost(g, own, i)
}

/// One-shot [`Evaluator::social_cost`].
pub fn social_cost(g: &Graph, p: &GameParams) -> Result<f64> {
    Evaluator::new(*p).social_cost(g)
}

/// Infection vector without touching any cache.
pub(crate) fn solve_infection(g: &Graph, p: &GameParams) -> Result<Vec<f64>> {
    if p.no_virus {
        return Ok(alloc::vec![0.0; g.n()]);
    }
    let s = crate::epidemic::steady_state_with(g, &p.epidemic, &p.solver)?;
    if !s.converged {
        return Err(Error::NotConverged { iterations: s.iterations, residual: s.residual });
    }
    Ok(s.v)
}

/// `after - before`, treating a move between two infinite costs as no
/// change.
#[inline]
pub(crate) fn cost_delta(before: f64, after: f64) -> f64 {
    match (before.is_finite(), after.is_finite()) {
        (true, true) => after - before,
        (false, true) => f64::NEG_INFINITY,
        (true, false) => f64::INFINITY,
        (false, false) => 0.0,
    }
}
