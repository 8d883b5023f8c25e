//! Which `(alpha, gamma, tau, N)` interval of the general-game PoA result
//! applies, and what it predicts.

use crate::game::GameParams;

/// Relative distance to a threshold below which a classification is
/// flagged as near a boundary.
pub const BOUNDARY_BAND: f64 = 1e-6;

/// Below this, `gamma * d` counts as small.
const SMALL_GAMMA_D: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum RegimeCase {
    #[cfg_attr(feature = "serde", serde(rename = "1a"))]
    Case1a,
    #[cfg_attr(feature = "serde", serde(rename = "1b"))]
    Case1b,
    #[cfg_attr(feature = "serde", serde(rename = "2a"))]
    Case2a,
    #[cfg_attr(feature = "serde", serde(rename = "2b"))]
    Case2b,
    #[cfg_attr(feature = "serde", serde(rename = "3"))]
    Case3,
    #[cfg_attr(feature = "serde", serde(rename = "4"))]
    Case4,
}

impl RegimeCase {
    /// `1`, `2`, `3` or `4`.
    pub fn index(self) -> u8 {
        match self {
            RegimeCase::Case1a | RegimeCase::Case1b => 1,
            RegimeCase::Case2a | RegimeCase::Case2b => 2,
            RegimeCase::Case3 => 3,
            RegimeCase::Case4 => 4,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            RegimeCase::Case1a => "1a",
            RegimeCase::Case1b => "1b",
            RegimeCase::Case2a => "2a",
            RegimeCase::Case2b => "2b",
            RegimeCase::Case3 => "3",
            RegimeCase::Case4 => "4",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", content = "value", rename_all = "snake_case"))]
pub enum PoaPrediction {
    /// PoA equals this value.
    Exact(f64),
    /// PoA is strictly below this value.
    StrictlyBelow(f64),
    /// PoA is the star/path ratio of the zero-gamma analysis.
    StarPathRatio,
    /// Asymptotic order only; the value is the expression inside `O(.)`
    /// where one is given. Never asserted numerically.
    Qualitative(Option<f64>),
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RegimeClassification {
    pub case_id: RegimeCase,
    /// `[2g - 2/(tau(N-1)), 2g - 1/tau, g - 1/(tau(N-1))]`.
    pub thresholds: [f64; 3],
    /// `alpha` lies within [`BOUNDARY_BAND`] of a threshold.
    pub near_boundary: bool,
    /// The conditions of more than one case hold; the lowest index won.
    pub overlapping: bool,
    /// Predicted PoS, when the case fixes it.
    #[cfg_attr(feature = "serde", serde(rename = "PoS"))]
    pub pos: Option<f64>,
    #[cfg_attr(feature = "serde", serde(rename = "PoA"))]
    pub poa: PoaPrediction,
}

/// Classifies `p` for `n` players. Zero-gamma parameters use `gamma = 0` and
/// always take the small-`gamma d` sub-case.
pub fn regime_classify(n: usize, p: &GameParams) -> RegimeClassification {
    let (a, g, tau) = (p.alpha, p.hop_weight(), p.tau());
    let m = (n.max(2) - 1) as f64;
    let t1 = 2.0 * g - 2.0 / (tau * m);
    let t2 = 2.0 * g - 1.0 / tau;
    let t3 = g - 1.0 / (tau * m);

    let holds = [a >= t1, t2 <= a && a <= t1, t3 <= a && a < t2, a < t3];
    let index = holds.iter().position(|&h| h).expect("the four conditions cover the line");
    let overlapping = holds.iter().filter(|&&h| h).count() > 1;
    let near_boundary = [t1, t2, t3].iter().any(|&t| (a - t).abs() <= BOUNDARY_BAND * t.abs().max(1.0));

    let shifted = a + 1.0 / (2.0 * tau);
    let small_gd = p.zero_gamma || g == 0.0 || {
        let d_bound = libm::sqrt(1.0 + 4.0 * shifted / g).min(n as f64);
        g * d_bound < SMALL_GAMMA_D
    };
    let (case_id, pos, poa) = match (index, small_gd) {
        (0, false) => {
            let order = (0.5 + a / shifted) * libm::sqrt(1.0 + 4.0 * shifted / g);
            (RegimeCase::Case1a, Some(1.0), PoaPrediction::Qualitative(Some(order)))
        }
        (0, true) => (RegimeCase::Case1b, Some(1.0), PoaPrediction::StarPathRatio),
        (1, false) => {
            let order = 2.0 * libm::sqrt(g * g + 4.0 * g * shifted) / (a + 2.0 * g) * (1.0 + 2.0 * a / shifted);
            (RegimeCase::Case2a, None, PoaPrediction::Qualitative(Some(order)))
        }
        (1, true) => (RegimeCase::Case2b, None, PoaPrediction::Qualitative(None)),
        (2, _) => (RegimeCase::Case3, None, PoaPrediction::StrictlyBelow(4.0 / 3.0)),
        _ => (RegimeCase::Case4, Some(1.0), PoaPrediction::Exact(1.0)),
    };
    RegimeClassification { case_id, thresholds: [t1, t2, t3], near_boundary, overlapping, pos, poa }
}
