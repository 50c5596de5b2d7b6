//! Defender beliefs: Bayesian updates, their inversion, and best responses.
//!
//! The defender holds a posterior `q = Pr(malicious | suspicious)` and
//! `p = Pr(malicious | non-suspicious)`. On-path these follow Bayes' rule
//! from the sender mixing `(m, n)` and the prior `theta`; at an unreached
//! information set the belief is unconstrained and must be supplied.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{payoff, DmAction, GameParameters, Signal};

/// Defender posteriors at its two information sets.
///
/// When an information set is reached with probability zero the
/// corresponding `*_on_path` flag is false and the stored belief is an
/// explicitly supplied off-path belief, not a computed one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Beliefs {
    /// Pr(malicious | suspicious request).
    pub q: f64,
    /// Pr(malicious | non-suspicious request).
    pub p: f64,
    /// Whether the suspicious information set has positive prior probability.
    pub q_on_path: bool,
    /// Whether the non-suspicious information set has positive prior probability.
    pub p_on_path: bool,
}

/// Posterior beliefs from the sender mixing `(m, n)` under prior `theta`.
///
/// `q = mθ / (mθ + n(1−θ))` and `p = (1−m)θ / ((1−m)θ + (1−n)(1−θ))` where
/// the denominators are positive; otherwise the supplied off-path belief is
/// used and the on-path flag cleared.
pub fn bayes_update(theta: f64, m: f64, n: f64, off_path_q: f64, off_path_p: f64) -> Beliefs {
    debug_assert!((0.0..=1.0).contains(&theta));
    debug_assert!((0.0..=1.0).contains(&m) && (0.0..=1.0).contains(&n));
    let pr_s = m * theta + n * (1.0 - theta);
    let pr_ns = (1.0 - m) * theta + (1.0 - n) * (1.0 - theta);
    let (q, q_on_path) = if pr_s > 0.0 {
        (m * theta / pr_s, true)
    } else {
        (off_path_q, false)
    };
    let (p, p_on_path) = if pr_ns > 0.0 {
        ((1.0 - m) * theta / pr_ns, true)
    } else {
        (off_path_p, false)
    };
    Beliefs { q, p, q_on_path, p_on_path }
}

/// Result of inverting Bayes' rule for target posteriors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BayesInversion {
    /// The unique mixing pair reproducing the targets.
    Unique { m: f64, n: f64 },
    /// `q_target = p_target = theta`: both Bayes equations degenerate to
    /// `theta = theta`, and every `m = n = t` with `t` in `(0, 1)` works.
    /// This is the complete solution family.
    DiagonalFamily,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InvertBayesError {
    #[error("theta, q_target, p_target must all lie strictly inside (0,1); got theta={theta}, q={q_target}, p={p_target}")]
    OutOfDomain { theta: f64, q_target: f64, p_target: f64 },
    /// No `(m, n)` in the unit square reproduces the targets. With equal
    /// targets this follows from the law of total probability, which forces
    /// `q Pr(S) + p Pr(NS) = theta`.
    #[error("no (m, n) in the unit square yields q={q_target}, p={p_target} at theta={theta}")]
    Infeasible { theta: f64, q_target: f64, p_target: f64 },
}

/// Solve `bayes_update(theta, m, n) = (q_target, p_target)` for `(m, n)`.
///
/// The Bayes equations are linear in `(m, n)` with determinant
/// `θ(1−θ)(p−q)`, so the system is singular exactly when the targets
/// coincide: consistent (the diagonal family) when they also equal `theta`,
/// infeasible otherwise. The nonsingular solution is rejected when it falls
/// outside the unit square.
pub fn invert_bayes(
    theta: f64,
    q_target: f64,
    p_target: f64,
) -> Result<BayesInversion, InvertBayesError> {
    let eps = crate::DEFAULT_EPS;
    let interior = |z: f64| z > 0.0 && z < 1.0;
    if !(interior(theta) && interior(q_target) && interior(p_target)) {
        return Err(InvertBayesError::OutOfDomain { theta, q_target, p_target });
    }
    if (p_target - q_target).abs() <= eps {
        if (q_target - theta).abs() <= eps {
            return Ok(BayesInversion::DiagonalFamily);
        }
        return Err(InvertBayesError::Infeasible { theta, q_target, p_target });
    }
    let m = q_target * (p_target - theta) / (theta * (p_target - q_target));
    let n = (1.0 - q_target) * (p_target - theta) / ((1.0 - theta) * (p_target - q_target));
    if !(-eps..=1.0 + eps).contains(&m) || !(-eps..=1.0 + eps).contains(&n) {
        return Err(InvertBayesError::Infeasible { theta, q_target, p_target });
    }
    Ok(BayesInversion::Unique {
        m: m.clamp(0.0, 1.0),
        n: n.clamp(0.0, 1.0),
    })
}

/// The defender's preferred action at one information set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BestResponse {
    Block,
    Allow,
    /// The two expected utilities differ by at most the tolerance.
    Indifferent,
}

/// Defender expected utilities `(eu_block, eu_allow)` on signal `s` when it
/// assigns probability `belief_ma` to the sender being malicious.
///
/// The difference `eu_block − eu_allow = b(β+κ+φ) − κ` does not involve the
/// processing cost ψ, so the Block/Allow comparison is signal-independent.
pub fn dm_expected_utilities(params: &GameParameters, s: Signal, belief_ma: f64) -> (f64, f64) {
    use crate::game::AppType::{Honest, Malicious};
    let eu_block = belief_ma * payoff(params, Malicious, s, DmAction::Block).dm
        + (1.0 - belief_ma) * payoff(params, Honest, s, DmAction::Block).dm;
    let eu_allow = belief_ma * payoff(params, Malicious, s, DmAction::Allow).dm
        + (1.0 - belief_ma) * payoff(params, Honest, s, DmAction::Allow).dm;
    (eu_block, eu_allow)
}

/// The defender's best response on `s` at belief `belief_ma`.
///
/// Block wins above the threshold `κ/(κ+β+φ)`, Allow below it, and the
/// comparison is the same step function for both signals.
pub fn dm_best_response(
    params: &GameParameters,
    s: Signal,
    belief_ma: f64,
    eps: f64,
) -> BestResponse {
    let (eu_block, eu_allow) = dm_expected_utilities(params, s, belief_ma);
    if eu_block > eu_allow + eps {
        BestResponse::Block
    } else if eu_allow > eu_block + eps {
        BestResponse::Allow
    } else {
        BestResponse::Indifferent
    }
}
