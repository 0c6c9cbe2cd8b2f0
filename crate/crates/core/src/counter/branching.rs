//! Branching-variable scores.

/// Largest exponent evaluated before [`branch_constant`] saturates.
const MAX_EXPONENT: f64 = 690.0;
const SATURATED: f64 = 1e30;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchConfig {
    pub use_td: bool,
    /// Weight of the decomposition depth penalty.
    pub c: f64,
    pub freq_weight: f64,
    pub act_weight: f64,
}

impl Default for BranchConfig {
    fn default() -> Self {
        BranchConfig {
            use_td: false,
            c: 1.0,
            freq_weight: 1.0,
            act_weight: 1.0,
        }
    }
}

/// `100 * exp(n / w) / n` for `n` variables and decomposition width `w`,
/// saturating at `1e30` once `n / w` exceeds 690.
pub fn branch_constant(n: usize, w: usize) -> f64 {
    assert!(n >= 1 && w >= 1, "branch_constant needs n >= 1 and w >= 1");
    let exponent = n as f64 / w as f64;
    if exponent > MAX_EXPONENT {
        return SATURATED;
    }
    (100.0 * exponent.exp() / n as f64).min(SATURATED)
}

/// `freq + act - C * depth`, or `freq + act` without decomposition guidance.
pub fn branch_score(freq: f64, act: f64, depth: f64, cfg: &BranchConfig) -> f64 {
    let base = cfg.freq_weight * freq + cfg.act_weight * act;
    if cfg.use_td {
        base - cfg.c * depth
    } else {
        base
    }
}

/// Activity scaled by the current maximum (0 when the maximum is 0).
pub fn normalize_activity(activity: f64, max_activity: f64) -> f64 {
    if max_activity > 0.0 {
        activity / max_activity
    } else {
        0.0
    }
}
