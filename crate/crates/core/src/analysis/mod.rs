//! Exhaustive optima, equilibrium censuses, PoA/PoS, closed forms, bounds
//! and the parameter-regime classifier.
//!
//! Searches are over labeled graphs. Costs within a relative
//! [`TIE_RELATIVE_TOL`] of each other count as ties; among tied graphs the
//! one with the lowest adjacency rows wins.

use alloc::vec::Vec;

use crate::epidemic::SteadyStateCache;
use crate::game::{solve_infection, Evaluator, GameParams, OwnershipProfile};
use crate::graph::{enumerate_connected_graphs, enumerate_trees, Graph, MAX_CONNECTED_NODES, MAX_TREE_NODES};
use crate::{Error, Result};

mod bounds;
mod regime;

pub use bounds::{
    closed_form_costs, path_star_poa, high_tau_poa_bound, poa_curve, structural_bounds, ClosedForms,
    PoaPoint, StructuralBounds,
};
pub use regime::{regime_classify, PoaPrediction, RegimeCase, RegimeClassification, BOUNDARY_BAND};

pub const TIE_RELATIVE_TOL: f64 = 1e-10;

/// Largest number of (graph, ownership) profiles [`exact_equilibria`] scans.
pub const PROFILE_BUDGET: u64 = 10_000_000;

/// Steady-state entries kept by the evaluators used in censuses.
const CENSUS_CACHE_CAPACITY: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SearchSpace {
    /// All `n^(n-2)` labeled trees, `2 <= n <= 10`.
    Trees,
    /// All labeled connected graphs, `2 <= n <= 7`.
    AllConnected,
}

impl SearchSpace {
    pub fn max_nodes(self) -> usize {
        match self {
            SearchSpace::Trees => MAX_TREE_NODES,
            SearchSpace::AllConnected => MAX_CONNECTED_NODES,
        }
    }

    /// Every graph of the space, in enumeration order.
    pub fn graphs(self, n: usize) -> Result<alloc::boxed::Box<dyn Iterator<Item = Graph>>> {
        Ok(match self {
            SearchSpace::Trees => alloc::boxed::Box::new(enumerate_trees(n)?),
            SearchSpace::AllConnected => alloc::boxed::Box::new(enumerate_connected_graphs(n)?),
        })
    }
}

#[inline]
fn tie_tol(c: f64) -> f64 {
    TIE_RELATIVE_TOL * c.abs().max(1.0)
}

/// Running minimum (and optionally maximum) with the graphs attaining it.
struct Extremes {
    min: f64,
    argmin: Vec<(f64, Graph)>,
    max: f64,
    argmax: Option<Vec<(f64, Graph)>>,
}

impl Extremes {
    fn new(track_max: bool) -> Self {
        Extremes {
            min: f64::INFINITY,
            argmin: Vec::new(),
            max: f64::NEG_INFINITY,
            argmax: track_max.then(Vec::new),
        }
    }

    fn push(&mut self, c: f64, g: &Graph) {
        if c <= self.min + tie_tol(self.min) || self.argmin.is_empty() {
            if c < self.min {
                self.min = c;
                let cut = self.min + tie_tol(self.min);
                self.argmin.retain(|(x, _)| *x <= cut);
            }
            self.argmin.push((c, g.clone()));
        }
        if let Some(argmax) = self.argmax.as_mut() {
            if c >= self.max - tie_tol(self.max) || argmax.is_empty() {
                if c > self.max {
                    self.max = c;
                    let cut = self.max - tie_tol(self.max);
                    argmax.retain(|(x, _)| *x >= cut);
                }
                argmax.push((c, g.clone()));
            }
        }
    }
}

fn sorted_graphs(v: Vec<(f64, Graph)>) -> Vec<Graph> {
    let mut gs: Vec<Graph> = v.into_iter().map(|(_, g)| g).collect();
    gs.sort();
    gs
}

/// Social cost with a fresh solve; infinite when disconnected.
fn uncached_social_cost(g: &Graph, p: &GameParams) -> Result<f64> {
    let mut hops = 0u64;
    for i in 0..g.n() {
        match g.hop_sum(i) {
            Some(h) => hops += h,
            None => return Ok(f64::INFINITY),
        }
    }
    let infection: f64 = solve_infection(g, p)?.iter().sum();
    Ok(p.alpha * g.link_count() as f64 + p.hop_weight() * hops as f64 + infection)
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct OptimumResult {
    pub best_graph: Graph,
    #[cfg_attr(feature = "serde", serde(rename = "J"))]
    pub best_cost: f64,
    pub search_space: SearchSpace,
    pub graphs_examined: u64,
    /// Labeled graphs whose cost ties with the optimum (at least 1).
    pub ties: usize,
}

fn check_space(n: usize, space: SearchSpace) -> Result<()> {
    if !(2..=space.max_nodes()).contains(&n) {
        return Err(Error::UnsupportedSize { n, min: 2, max: space.max_nodes() });
    }
    Ok(())
}

/// Exhaustive minimum of the social cost over a search space.
pub fn optimal_social_cost(n: usize, p: &GameParams, space: SearchSpace) -> Result<OptimumResult> {
    check_space(n, space)?;
    let mut ext = Extremes::new(false);
    let mut examined = 0u64;
    for g in space.graphs(n)? {
        examined += 1;
        ext.push(uncached_social_cost(&g, p)?, &g);
    }
    let ties = ext.argmin.len();
    let best_graph = sorted_graphs(ext.argmin).swap_remove(0);
    Ok(OptimumResult { best_graph, best_cost: ext.min, search_space: space, graphs_examined: examined, ties })
}

/// Cheapest and costliest labeled trees.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TreeExtremes {
    pub min_cost: f64,
    pub max_cost: f64,
    /// Every tree within tie tolerance of the minimum, sorted.
    pub argmin: Vec<Graph>,
    pub argmax: Vec<Graph>,
    pub trees_examined: u64,
}

impl TreeExtremes {
    /// Lowest-labeled minimizer.
    pub fn best(&self) -> &Graph {
        &self.argmin[0]
    }

    pub fn worst(&self) -> &Graph {
        &self.argmax[0]
    }
}

/// Exhaustive min and max of the zero-gamma social cost over labeled trees.
pub fn tree_extremes(n: usize, p: &GameParams) -> Result<TreeExtremes> {
    if !p.zero_gamma {
        return Err(Error::InvalidParameter("tree extremes are defined for the zero-gamma game"));
    }
    if !(3..=9).contains(&n) {
        return Err(Error::UnsupportedSize { n, min: 3, max: 9 });
    }
    let mut ext = Extremes::new(true);
    let mut examined = 0u64;
    for g in enumerate_trees(n)? {
        examined += 1;
        ext.push(uncached_social_cost(&g, p)?, &g);
    }
    Ok(TreeExtremes {
        min_cost: ext.min,
        max_cost: ext.max,
        argmin: sorted_graphs(ext.argmin),
        argmax: sorted_graphs(ext.argmax.expect("tracked")),
        trees_examined: examined,
    })
}

/// Every exact Nash equilibrium of a search space.
#[derive(Clone, Debug, PartialEq)]
pub struct EquilibriumCensus {
    pub equilibria: Vec<(Graph, OwnershipProfile)>,
    /// Graphs of the space none of whose ownership profiles is an equilibrium.
    pub graphs_without_equilibrium: Vec<Graph>,
    pub graphs_examined: u64,
    pub profiles_checked: u64,
}

/// Checks every ownership profile of every graph in the space.
///
/// Refuses with [`Error::BudgetExceeded`] when the space holds more than
/// [`PROFILE_BUDGET`] profiles.
pub fn exact_equilibria(n: usize, p: &GameParams, space: SearchSpace) -> Result<EquilibriumCensus> {
    check_space(n, space)?;
    let required: u64 = space.graphs(n)?.map(|g| 1u64 << g.link_count()).sum();
    if required > PROFILE_BUDGET {
        return Err(Error::BudgetExceeded { required, budget: PROFILE_BUDGET });
    }
    let mut ev = Evaluator::with_cache(*p, SteadyStateCache::with_capacity(CENSUS_CACHE_CAPACITY));
    let mut census = EquilibriumCensus {
        equilibria: Vec::new(),
        graphs_without_equilibrium: Vec::new(),
        graphs_examined: 0,
        profiles_checked: 0,
    };
    for g in space.graphs(n)? {
        census.graphs_examined += 1;
        let mut found = false;
        for own in OwnershipProfile::enumerate(&g) {
            census.profiles_checked += 1;
            if ev.is_equilibrium(&g, &own)? {
                found = true;
                census.equilibria.push((g.clone(), own));
            }
        }
        if !found {
            census.graphs_without_equilibrium.push(g);
        }
    }
    Ok(census)
}

/// Labeled trees on `n` nodes that admit no equilibrium ownership.
pub fn trees_without_equilibrium(n: usize, p: &GameParams) -> Result<Vec<Graph>> {
    Ok(exact_equilibria(n, p, SearchSpace::Trees)?.graphs_without_equilibrium)
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PoaPos {
    #[cfg_attr(feature = "serde", serde(rename = "PoA"))]
    pub poa: f64,
    #[cfg_attr(feature = "serde", serde(rename = "PoS"))]
    pub pos: f64,
    pub worst_equilibrium_cost: f64,
    pub best_equilibrium_cost: f64,
    pub optimum: OptimumResult,
}

/// Price of anarchy and stability of a set of exact equilibria against the
/// exhaustive optimum of `space`.
///
/// Every profile is re-verified; the first one that is not an exact
/// equilibrium yields [`Error::NotAnEquilibrium`].
pub fn poa_pos(
    n: usize,
    p: &GameParams,
    equilibria: &[(Graph, OwnershipProfile)],
    space: SearchSpace,
) -> Result<PoaPos> {
    if equilibria.is_empty() {
        return Err(Error::NoEquilibria);
    }
    let mut ev = Evaluator::with_cache(*p, SteadyStateCache::with_capacity(CENSUS_CACHE_CAPACITY));
    let mut worst = f64::NEG_INFINITY;
    let mut best = f64::INFINITY;
    for (index, (g, own)) in equilibria.iter().enumerate() {
        if g.n() != n {
            return Err(Error::InvalidParameter("equilibrium has the wrong node count"));
        }
        if !ev.is_equilibrium(g, own)? {
            return Err(Error::NotAnEquilibrium { index });
        }
        let j = ev.social_cost(g)?;
        worst = worst.max(j);
        best = best.min(j);
    }
    let optimum = optimal_social_cost(n, p, space)?;
    Ok(PoaPos {
        poa: worst / optimum.best_cost,
        pos: best / optimum.best_cost,
        worst_equilibrium_cost: worst,
        best_equilibrium_cost: best,
        optimum,
    })
}

/// Per-graph cost ingredients of a whole search space at one `tau`, so the
/// optimum can be re-taken for many `(alpha, gamma)` without re-solving.
#[derive(Clone, Debug)]
pub struct SpaceSummary {
    n: usize,
    space: SearchSpace,
    entries: Vec<SummaryEntry>,
}

#[derive(Clone, Copy, Debug)]
struct SummaryEntry {
    /// Adjacency rows, `n` bits each.
    packed: u128,
    links: u32,
    hop_total: u64,
    infection: f64,
}

fn pack(g: &Graph) -> u128 {
    let n = g.n();
    g.rows().iter().enumerate().fold(0u128, |acc, (i, &r)| acc | (r as u128) << (i * n))
}

fn unpack(n: usize, packed: u128) -> Graph {
    let mask = (1u128 << n) - 1;
    Graph::from_rows_unchecked((0..n).map(|i| (packed >> (i * n) & mask) as u64).collect())
}

impl SpaceSummary {
    /// Solves every graph of the space once under `p`'s epidemic settings.
    pub fn build(n: usize, p: &GameParams, space: SearchSpace) -> Result<Self> {
        check_space(n, space)?;
        let mut entries = Vec::new();
        for g in space.graphs(n)? {
            let hop_total = (0..n).map(|i| g.hop_sum(i).expect("spaces are connected")).sum();
            let infection = solve_infection(&g, p)?.iter().sum();
            entries.push(SummaryEntry { packed: pack(&g), links: g.link_count() as u32, hop_total, infection });
        }
        Ok(SpaceSummary { n, space, entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Optimum for link weight `alpha` and hop weight `hop_weight`.
    pub fn optimum(&self, alpha: f64, hop_weight: f64) -> OptimumResult {
        let cost = |e: &SummaryEntry| alpha * e.links as f64 + hop_weight * e.hop_total as f64 + e.infection;
        let min = self.entries.iter().map(cost).fold(f64::INFINITY, f64::min);
        let cut = min + tie_tol(min);
        let tied: Vec<&SummaryEntry> = self.entries.iter().filter(|e| cost(e) <= cut).collect();
        let best_graph = tied.iter().map(|e| unpack(self.n, e.packed)).min().expect("space is non-empty");
        OptimumResult {
            best_graph,
            best_cost: min,
            search_space: self.space,
            graphs_examined: self.entries.len() as u64,
            ties: tied.len(),
        }
    }
}
