//! NIMFA SIS dynamics on a graph.
//!
//! Node `i` is infected with probability `v_i`. Infected neighbors infect at
//! rate `beta`, infected nodes cure at rate `delta`, and the only epidemic
//! parameter of the metastable state is `tau = beta / delta`. The
//! metastable probabilities solve
//!
//! ```text
//! v_i = 1 - 1 / (1 + tau * sum_j a_ij v_j)
//! ```
//!
//! which has a positive solution on a connected graph iff `tau > 1 / lambda_1`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::graph::{self, spectral, Bits, Graph};
use crate::{Error, Result};

/// `tau * lambda_1` at or below `1 + THRESHOLD_BAND` counts as sub-threshold.
pub const THRESHOLD_BAND: f64 = 1e-12;

/// Effective infection rate, optionally with the underlying rates.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct EpidemicParams {
    tau: f64,
    rates: Option<(f64, f64)>,
}

impl EpidemicParams {
    pub fn new(tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidParameter("tau must be positive and finite"));
        }
        Ok(EpidemicParams { tau, rates: None })
    }

    /// From infection rate `beta` and curing rate `delta`.
    pub fn from_rates(beta: f64, delta: f64) -> Result<Self> {
        if !(beta > 0.0 && delta > 0.0 && beta.is_finite() && delta.is_finite()) {
            return Err(Error::InvalidParameter("beta and delta must be positive and finite"));
        }
        let tau = beta / delta;
        Ok(EpidemicParams { tau, rates: Some((beta, delta)) })
    }

    #[inline]
    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// `(beta, delta)`; defaults to `(tau, 1)` when only `tau` was given.
    pub fn rates(&self) -> (f64, f64) {
        self.rates.unwrap_or((self.tau, 1.0))
    }
}

/// Iteration controls for [`steady_state`].
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SolverSettings {
    pub tol: f64,
    pub max_iter: usize,
    pub spectral_tol: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            tol: 1e-12,
            max_iter: 1_000_000,
            spectral_tol: graph::DEFAULT_SPECTRAL_TOL,
        }
    }
}

/// Metastable infection probabilities `v_i` with convergence metadata.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SteadyState {
    pub v: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    /// Max-norm defect `max_i |v_i - F(v)_i|` of the returned vector.
    pub residual: f64,
}

impl SteadyState {
    pub fn total(&self) -> f64 {
        self.v.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.v.iter().all(|&x| x == 0.0)
    }
}

/// One application of the fixed-point map `F(v)_i = 1 - 1/(1 + tau sum_j a_ij v_j)`.
pub fn fixed_point_map(g: &Graph, tau: f64, v: &[f64]) -> Vec<f64> {
    (0..g.n())
        .map(|i| {
            let s: f64 = Bits(g.neighbors(i)).map(|j| v[j]).sum();
            1.0 - 1.0 / (1.0 + tau * s)
        })
        .collect()
}

/// Max-norm defect of `v` as a fixed point.
pub fn fixed_point_defect(g: &Graph, tau: f64, v: &[f64]) -> f64 {
    fixed_point_map(g, tau, v)
        .iter()
        .zip(v)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Metastable state by fixed-point iteration from the all-ones vector.
///
/// Each connected component is handled on its own: a component with
/// `tau * lambda_1 <= 1 + THRESHOLD_BAND` gets exact zeros, every other one
/// is iterated until the defect drops below `tol`. Iterating from ones is
/// monotonically non-increasing and lands on the metastable branch.
/// Running out of iterations is not an error; the result carries
/// `converged = false` and its residual.
pub fn steady_state(g: &Graph, p: &EpidemicParams, tol: f64, max_iter: usize) -> Result<SteadyState> {
    let settings = SolverSettings { tol, max_iter, ..SolverSettings::default() };
    steady_state_with(g, p, &settings)
}

pub fn steady_state_with(g: &Graph, p: &EpidemicParams, s: &SolverSettings) -> Result<SteadyState> {
    if !(s.tol > 0.0) {
        return Err(Error::InvalidParameter("tolerance must be positive"));
    }
    let tau = p.tau();
    let n = g.n();
    let mut active = 0u64;
    for comp in g.components() {
        if comp.count_ones() < 2 {
            continue;
        }
        let lambda = spectral::spectral_radius_on(g, comp, s.spectral_tol, graph::DEFAULT_SPECTRAL_MAX_ITER)?;
        if tau * lambda > 1.0 + THRESHOLD_BAND {
            active |= comp;
        }
    }

    let mut v = vec![0.0f64; n];
    if active == 0 {
        return Ok(SteadyState { v, converged: true, iterations: 0, residual: 0.0 });
    }
    for i in Bits(active) {
        v[i] = 1.0;
    }
    let mut next = v.clone();
    let mut iterations = 0;
    while iterations < s.max_iter {
        let mut residual = 0.0;
        for i in Bits(active) {
            let mut sum = 0.0;
            for j in Bits(g.neighbors(i)) {
                sum += v[j];
            }
            let f = 1.0 - 1.0 / (1.0 + tau * sum);
            residual = f64::max(residual, (f - v[i]).abs());
            next[i] = f;
        }
        if residual < s.tol {
            return Ok(SteadyState { v, converged: true, iterations, residual });
        }
        core::mem::swap(&mut v, &mut next);
        iterations += 1;
    }
    let residual = Bits(active)
        .map(|i| {
            let sum: f64 = Bits(g.neighbors(i)).map(|j| v[j]).sum();
            (1.0 - 1.0 / (1.0 + tau * sum) - v[i]).abs()
        })
        .fold(0.0, f64::max);
    Ok(SteadyState { v, converged: residual < s.tol, iterations, residual })
}

/// `tau_c = 1 / lambda_1`.
pub fn epidemic_threshold(g: &Graph) -> Result<f64> {
    if g.link_count() == 0 {
        return Err(Error::UndefinedThreshold);
    }
    let lambda = graph::spectral_radius(g, graph::DEFAULT_SPECTRAL_TOL)?;
    Ok(1.0 / lambda)
}

/// `y(tau) = sum_i v_i`; zero iff `tau <= tau_c`.
pub fn total_infection(g: &Graph, p: &EpidemicParams) -> Result<f64> {
    let s = steady_state_with(g, p, &SolverSettings::default())?;
    if !s.converged {
        return Err(Error::NotConverged { iterations: s.iterations, residual: s.residual });
    }
    Ok(s.total())
}

/// Allowed excursion outside `[0, 1]` before an Euler step counts as unstable.
pub const STEP_SLACK: f64 = 1e-9;

/// Integrates `dv_i/dt = beta (1 - v_i) sum_j a_ij v_j - delta v_i` with
/// explicit Euler steps of size `dt` up to `t_end`.
pub fn transient_solve(g: &Graph, p: &EpidemicParams, v0: &[f64], t_end: f64, dt: f64) -> Result<Vec<f64>> {
    if v0.len() != g.n() {
        return Err(Error::InvalidParameter("initial vector length differs from node count"));
    }
    if v0.iter().any(|x| !(0.0..=1.0).contains(x)) {
        return Err(Error::InvalidParameter("initial probabilities must lie in [0, 1]"));
    }
    if !(dt > 0.0) || !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidParameter("need dt > 0 and finite t_end >= 0"));
    }
    let (beta, delta) = p.rates();
    let steps = libm::round(t_end / dt) as usize;
    let mut v = v0.to_vec();
    let mut next = v.clone();
    for _ in 0..steps {
        for i in 0..g.n() {
            let sum: f64 = Bits(g.neighbors(i)).map(|j| v[j]).sum();
            let x = v[i] + dt * (beta * (1.0 - v[i]) * sum - delta * v[i]);
            if !(-STEP_SLACK..=1.0 + STEP_SLACK).contains(&x) {
                return Err(Error::StepInstability { node: i, value: x });
            }
            next[i] = x.clamp(0.0, 1.0);
        }
        core::mem::swap(&mut v, &mut next);
    }
    Ok(v)
}

/// Steady states memoized on `(adjacency rows, tau)`.
///
/// Owned by one worker; parallel callers keep one cache each. The map is
/// cleared wholesale once it holds `capacity` entries.
#[derive(Debug, Clone)]
pub struct SteadyStateCache {
    map: BTreeMap<(Graph, u64), SteadyState>,
    capacity: usize,
    hits: u64,
    misses: u64,
}

impl Default for SteadyStateCache {
    fn default() -> Self {
        Self::with_capacity(1 << 20)
    }
}

impl SteadyStateCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(capacity: usize) -> Self {
        SteadyStateCache { map: BTreeMap::new(), capacity: capacity.max(1), hits: 0, misses: 0 }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn clear(&mut self) {
        self.map.clear();
    }

    /// `(hits, misses)` since creation.
    pub fn stats(&self) -> (u64, u64) {
        (self.hits, self.misses)
    }

    pub fn get_or_solve(&mut self, g: &Graph, p: &EpidemicParams, s: &SolverSettings) -> Result<&SteadyState> {
        let key = (g.clone(), p.tau().to_bits());
        if self.map.contains_key(&key) {
            self.hits += 1;
        } else {
            self.misses += 1;
            let solved = steady_state_with(g, p, s)?;
            if self.map.len() >= self.capacity {
                self.map.clear();
            }
            self.map.insert(key.clone(), solved);
        }
        Ok(&self.map[&key])
    }
}
