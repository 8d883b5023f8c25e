//! Exact pure Nash verification and single-link (add/drop) stability.

use alloc::vec::Vec;

use super::{cost_delta, Evaluator, GameParams, OwnershipProfile};
use crate::graph::{bit, full_mask, Bits, Graph};
use crate::{Error, Result};

/// Largest deviation space [`Evaluator::is_nash_exact`] will scan.
pub const DEVIATION_BUDGET: u64 = 10_000_000;

/// Nodes `i` may link to when choosing a new strategy: everyone except
/// itself and the neighbors whose links to `i` are paid for by them.
pub fn deviation_candidates(g: &Graph, own: &OwnershipProfile, i: usize) -> u64 {
    full_mask(g.n()) & !bit(i) & !own.fixed_for(i)
}

/// Every strategy set available to player `i`, as counterpart masks
/// (including its current one).
pub fn deviation_space(g: &Graph, own: &OwnershipProfile, i: usize) -> StrategySets {
    StrategySets::new(deviation_candidates(g, own, i))
}

/// All submasks of a candidate mask, from the full mask down to empty.
#[derive(Clone, Debug)]
pub struct StrategySets {
    candidates: u64,
    next: Option<u64>,
}

impl StrategySets {
    fn new(candidates: u64) -> Self {
        StrategySets { candidates, next: Some(candidates) }
    }

    pub fn len(&self) -> u64 {
        1u64 << self.candidates.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl Iterator for StrategySets {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let s = self.next?;
        self.next = if s == 0 { None } else { Some((s - 1) & self.candidates) };
        Some(s)
    }
}

/// The graph after player `i` replaces its owned links by `strategy`.
pub fn deviated_graph(g: &Graph, own: &OwnershipProfile, i: usize, strategy: u64) -> Graph {
    let mut h = g.clone();
    for j in Bits(own.owned(i)) {
        h.clear_link(i, j);
    }
    for j in Bits(strategy) {
        h.set_link(i, j);
    }
    h
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum DeviationKind {
    Drop,
    Add,
    Rewire,
}

/// A unilateral strategy change and its effect on the deviator's cost.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Deviation {
    pub player: usize,
    pub from: Vec<usize>,
    pub to: Vec<usize>,
    /// `J_i(new) - J_i(old)`; negative means the player gains.
    pub delta: f64,
}

impl Deviation {
    pub fn kind(&self) -> DeviationKind {
        let removed = self.from.iter().any(|j| !self.to.contains(j));
        let added = self.to.iter().any(|j| !self.from.contains(j));
        match (removed, added) {
            (true, false) => DeviationKind::Drop,
            (false, true) => DeviationKind::Add,
            _ => DeviationKind::Rewire,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct EquilibriumReport {
    pub exact_ne: bool,
    pub ad_stable: bool,
    /// Most improving deviation, present iff `exact_ne` is false.
    pub best_deviation: Option<Deviation>,
    pub deviations_checked: u64,
}

impl Evaluator {
    /// Size of the exact deviation space over all players.
    pub fn deviation_count(&self, g: &Graph, own: &OwnershipProfile) -> u64 {
        (0..g.n()).map(|i| deviation_space(g, own, i).len()).sum()
    }

    /// Scans every unilateral strategy change of every player.
    ///
    /// Refuses with [`Error::BudgetExceeded`] when the space is larger than
    /// [`DEVIATION_BUDGET`].
    pub fn is_nash_exact(&mut self, g: &Graph, own: &OwnershipProfile) -> Result<EquilibriumReport> {
        own.check_against(g)?;
        let required = self.deviation_count(g, own);
        if required > DEVIATION_BUDGET {
            return Err(Error::BudgetExceeded { required, budget: DEVIATION_BUDGET });
        }
        let eps = self.params.improvement_epsilon;
        let mut best: Option<(usize, u64, f64)> = None;
        let mut checked = 0u64;
        for i in 0..g.n() {
            let current = self.cost_with_links(g, i, own.k(i))?;
            for s in deviation_space(g, own, i) {
                if s == own.owned(i) {
                    continue;
                }
                checked += 1;
                let h = deviated_graph(g, own, i, s);
                let after = self.cost_with_links(&h, i, s.count_ones() as usize)?;
                let delta = cost_delta(current, after);
                if delta < -eps && best.is_none_or(|(_, _, d)| delta < d) {
                    best = Some((i, s, delta));
                }
            }
        }
        let ad_stable = self.is_ad_stable(g, own)?;
        let best_deviation = best.map(|(player, s, delta)| Deviation {
            player,
            from: own.strategy(player),
            to: Bits(s).collect(),
            delta,
        });
        Ok(EquilibriumReport {
            exact_ne: best_deviation.is_none(),
            ad_stable,
            best_deviation,
            deviations_checked: checked,
        })
    }

    /// Same verdict as [`Evaluator::is_nash_exact`], stopping at the first
    /// improving deviation. Single-link moves are tried first.
    pub fn is_equilibrium(&mut self, g: &Graph, own: &OwnershipProfile) -> Result<bool> {
        if !self.is_ad_stable(g, own)? {
            return Ok(false);
        }
        let required = self.deviation_count(g, own);
        if required > DEVIATION_BUDGET {
            return Err(Error::BudgetExceeded { required, budget: DEVIATION_BUDGET });
        }
        let eps = self.params.improvement_epsilon;
        for i in 0..g.n() {
            let current = self.cost_with_links(g, i, own.k(i))?;
            for s in deviation_space(g, own, i) {
                if s == own.owned(i) {
                    continue;
                }
                let h = deviated_graph(g, own, i, s);
                let after = self.cost_with_links(&h, i, s.count_ones() as usize)?;
                if cost_delta(current, after) < -eps {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Best single-link drop for `i` among the links it owns: `(counterpart,
    /// delta)` with the most negative delta, lowest counterpart on ties.
    pub(crate) fn best_drop(&mut self, g: &Graph, own: &OwnershipProfile, i: usize) -> Result<Option<(usize, f64)>> {
        let k = own.k(i);
        let current = self.cost_with_links(g, i, k)?;
        let mut best: Option<(usize, f64)> = None;
        for j in Bits(own.owned(i)) {
            let mut h = g.clone();
            h.clear_link(i, j);
            let delta = cost_delta(current, self.cost_with_links(&h, i, k - 1)?);
            if best.is_none_or(|(_, d)| delta < d) {
                best = Some((j, delta));
            }
        }
        Ok(best)
    }

    /// Best single-link addition paid for by `i`.
    pub(crate) fn best_add(&mut self, g: &Graph, own: &OwnershipProfile, i: usize) -> Result<Option<(usize, f64)>> {
        let k = own.k(i);
        let current = self.cost_with_links(g, i, k)?;
        let absent = full_mask(g.n()) & !bit(i) & !g.neighbors(i);
        let mut best: Option<(usize, f64)> = None;
        for j in Bits(absent) {
            let mut h = g.clone();
            h.set_link(i, j);
            let delta = cost_delta(current, self.cost_with_links(&h, i, k + 1)?);
            if best.is_none_or(|(_, d)| delta < d) {
                best = Some((j, delta));
            }
        }
        Ok(best)
    }

    /// No owner gains by dropping one of its links and nobody gains by
    /// adding one link.
    pub fn is_ad_stable(&mut self, g: &Graph, own: &OwnershipProfile) -> Result<bool> {
        own.check_against(g)?;
        let eps = self.params.improvement_epsilon;
        for i in 0..g.n() {
            for best in [self.best_drop(g, own, i)?, self.best_add(g, own, i)?] {
                if matches!(best, Some((_, d)) if d < -eps) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// One-shot [`Evaluator::is_nash_exact`].
pub fn is_nash_exact(g: &Graph, own: &OwnershipProfile, p: &GameParams) -> Result<EquilibriumReport> {
    Evaluator::new(*p).is_nash_exact(g, own)
}

/// One-shot [`Evaluator::is_ad_stable`].
pub fn is_ad_stable(g: &Graph, own: &OwnershipProfile, p: &GameParams) -> Result<bool> {
    Evaluator::new(*p).is_ad_stable(g, own)
}
