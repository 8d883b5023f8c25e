//! Closed-form costs, PoA curves and degree/diameter bounds.

use alloc::vec::Vec;

use super::uncached_social_cost;
use crate::game::{solve_infection, GameParams};
use crate::graph::Graph;
use crate::{Error, Result};

/// Complete graph cost and the high-`tau` star approximation.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ClosedForms {
    pub n: usize,
    /// `N + a(N-1) + 2g(N-1)^2 - ((N-1)^2 + 1) / (tau (N-1))`.
    pub j_star_approx: f64,
    /// `N + a N(N-1)/2 + g N(N-1) - N / (tau (N-1))`; exact for `tau (N-1) > 1`.
    pub j_complete: f64,
    /// `(N-1)(N-2)(a/2 - g + 1/(tau (N-1)))`.
    pub difference: f64,
}

/// Requires `tau (n - 1) > 1`, i.e. `K_n` above its threshold.
pub fn closed_form_costs(n: usize, p: &GameParams) -> Result<ClosedForms> {
    if n < 2 {
        return Err(Error::UnsupportedSize { n, min: 2, max: usize::MAX });
    }
    let (nf, m, tau) = (n as f64, (n - 1) as f64, p.tau());
    if tau * m <= 1.0 {
        return Err(Error::GuardViolation("closed forms need tau (n - 1) > 1"));
    }
    let (a, g) = (p.alpha, p.hop_weight());
    Ok(ClosedForms {
        n,
        j_star_approx: nf + a * m + 2.0 * g * m * m - (m * m + 1.0) / (tau * m),
        j_complete: nf + a * nf * m / 2.0 + g * nf * m - nf / (tau * m),
        difference: m * (m - 1.0) * (a / 2.0 - g + 1.0 / (tau * m)),
    })
}

/// `1 + 1 / (2 (tau (alpha + 1) - 1))`, defined for `tau (alpha + 1) > 1`.
pub fn high_tau_poa_bound(alpha: f64, tau: f64) -> Result<f64> {
    let x = tau * (alpha + 1.0);
    if !(x > 1.0) || !x.is_finite() {
        return Err(Error::GuardViolation("bound needs tau (alpha + 1) > 1"));
    }
    Ok(1.0 + 1.0 / (2.0 * (x - 1.0)))
}

/// Path-versus-star comparison at one `tau`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PoaPoint {
    pub tau: f64,
    pub j_path: f64,
    pub j_star: f64,
    pub path_over_star: f64,
    pub star_over_path: f64,
    #[cfg_attr(feature = "serde", serde(rename = "PoA"))]
    pub poa: f64,
    /// `None` where the closed bound is undefined.
    pub high_tau_bound: Option<f64>,
}

/// `max{J(P_n)/J(K_{1,n-1}), J(K_{1,n-1})/J(P_n)}` from exact solves.
pub fn path_star_poa(n: usize, p: &GameParams) -> Result<PoaPoint> {
    let j_path = uncached_social_cost(&Graph::path(n)?, p)?;
    let j_star = uncached_social_cost(&Graph::star(n)?, p)?;
    let (ps, sp) = (j_path / j_star, j_star / j_path);
    Ok(PoaPoint {
        tau: p.tau(),
        j_path,
        j_star,
        path_over_star: ps,
        star_over_path: sp,
        poa: ps.max(sp),
        high_tau_bound: high_tau_poa_bound(p.alpha, p.tau()).ok(),
    })
}

/// [`path_star_poa`] over a grid of `tau`, other parameters from `p`.
pub fn poa_curve(n: usize, p: &GameParams, taus: &[f64]) -> Result<Vec<PoaPoint>> {
    taus.iter().map(|&tau| path_star_poa(n, &p.with_tau(tau)?)).collect()
}

/// Degree and cost bounds evaluated on one graph. Left and right sides are
/// both reported; nothing here is asserted.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct StructuralBounds {
    pub n: usize,
    pub links: usize,
    pub d_min: usize,
    pub d_max: usize,
    pub diameter: u32,
    /// `sum_i 1/d_i`.
    pub sum_inverse_degree: f64,
    /// `(N (dmin + dmax) - 2L) / (dmin dmax)`; equal to the sum on stars and
    /// regular graphs.
    pub inverse_degree_bound: f64,
    /// `N^2/(2L) + (1/dmin - 1/dmax)(N - 1 - 2L/N)`.
    pub inverse_degree_bound_loose: f64,
    pub social_cost: f64,
    /// `N + 2gN(N-1) + (a - 2g)L - (1/tau) sum_i 1/d_i`.
    pub social_lower_bound: f64,
    pub infection_sum: f64,
    /// `N - sum_i 1/(1 + (tau - 1) d_i)`, a strict lower bound on `infection_sum`.
    pub infection_lower_bound: f64,
    /// `N - 1 + 2 diam g N^2 / (a + 1/(2 tau))`.
    pub link_bound: f64,
    /// `min{sqrt(1 + 4 (a + 1/(2 tau)) / g), N}`; `N` when `g = 0`.
    pub diameter_bound: f64,
}

/// Needs a connected graph with `n >= 2`, `tau > 1` and the epidemic term on.
pub fn structural_bounds(g: &Graph, p: &GameParams) -> Result<StructuralBounds> {
    let n = g.n();
    if n < 2 {
        return Err(Error::GuardViolation("bounds need at least two nodes"));
    }
    let Some(diameter) = g.diameter() else {
        return Err(Error::GuardViolation("bounds need a connected graph"));
    };
    let tau = p.tau();
    if !(tau > 1.0) {
        return Err(Error::GuardViolation("truncation bounds need tau > 1"));
    }
    if p.no_virus {
        return Err(Error::GuardViolation("bounds need the epidemic term"));
    }
    let (a, gam) = (p.alpha, p.hop_weight());
    let degrees = g.degrees();
    let d_min = *degrees.iter().min().expect("n >= 2");
    let d_max = *degrees.iter().max().expect("n >= 2");
    let (nf, lf) = (n as f64, g.link_count() as f64);
    let (lo, hi) = (d_min as f64, d_max as f64);
    let sum_inverse_degree: f64 = degrees.iter().map(|&d| 1.0 / d as f64).sum();
    let infection_sum: f64 = solve_infection(g, p)?.iter().sum();
    let infection_lower_bound = nf - degrees.iter().map(|&d| 1.0 / (1.0 + (tau - 1.0) * d as f64)).sum::<f64>();
    let shifted = a + 1.0 / (2.0 * tau);
    let diameter_bound = if gam > 0.0 { libm::sqrt(1.0 + 4.0 * shifted / gam).min(nf) } else { nf };
    Ok(StructuralBounds {
        n,
        links: g.link_count(),
        d_min,
        d_max,
        diameter,
        sum_inverse_degree,
        inverse_degree_bound: (nf * (lo + hi) - 2.0 * lf) / (lo * hi),
        inverse_degree_bound_loose: nf * nf / (2.0 * lf) + (1.0 / lo - 1.0 / hi) * (nf - 1.0 - 2.0 * lf / nf),
        social_cost: uncached_social_cost(g, p)?,
        social_lower_bound: nf + 2.0 * gam * nf * (nf - 1.0) + (a - 2.0 * gam) * lf - sum_inverse_degree / tau,
        infection_sum,
        infection_lower_bound,
        link_bound: nf - 1.0 + 2.0 * diameter as f64 * gam * nf * nf / shifted,
        diameter_bound,
    })
}
