//! Perfect Bayesian Nash equilibria: enumeration, verification, and the
//! mixed-strategy solver.
//!
//! The game's equilibria come in four categories. Separating profiles never
//! survive (the malicious type always imitates whichever signal gets
//! allowed); pooling profiles exist on both sides of the blocking threshold
//! `κ/(κ+β+φ)`; hybrid profiles exist as one-parameter families when the
//! right indifference conditions hold; and the mixed equilibrium pins both
//! posteriors to the threshold, which forces Nature's prior onto it too.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::beliefs::{bayes_update, dm_expected_utilities, BayesInversion, Beliefs};
use crate::game::{
    app_signal_utility, AppType, DmAction, GameParameters, Signal, StrategyProfile,
};

/// The four equilibrium categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PbneCategory {
    /// Types send distinct pure signals.
    Separating,
    /// Types send the same pure signal.
    Pooling,
    /// One type pure, the other mixing.
    Hybrid,
    /// Both types mixing.
    Mixed,
}

impl fmt::Display for PbneCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Separating => f.write_str("separating"),
            Self::Pooling => f.write_str("pooling"),
            Self::Hybrid => f.write_str("hybrid"),
            Self::Mixed => f.write_str("mixed"),
        }
    }
}

/// The belief interval sustaining the planned action at an unreached
/// information set. PBNE leaves off-path beliefs free, so a profile with an
/// off-path action is supported by a whole interval of beliefs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffPathSupport {
    /// The unreached signal.
    pub signal: Signal,
    /// The action planned there.
    pub action: DmAction,
    /// Closed belief interval `[lo, hi]` under which the action is optimal.
    pub lo: f64,
    pub hi: f64,
}

impl fmt::Display for OffPathSupport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.signal {
            Signal::Suspicious => "q",
            Signal::NonSuspicious => "p",
        };
        write!(
            f,
            "{}={} off path; {} in [{}, {}]",
            self.signal, self.action, name, self.lo, self.hi
        )
    }
}

/// A classified equilibrium together with the evidence for it.
#[derive(Debug, Clone, PartialEq)]
pub struct PbneProfile {
    pub category: PbneCategory,
    pub strategy: StrategyProfile,
    /// On-path beliefs from Bayes' rule; off-path entries carry the
    /// representative sustaining belief.
    pub beliefs: Beliefs,
    /// The named conditions under which this profile is an equilibrium.
    pub conditions: Vec<String>,
    /// Present when one information set is unreached.
    pub off_path_support: Option<OffPathSupport>,
    /// Result of the profile's own [`verify_pbne`] cross-check.
    pub verified: bool,
}

/// Options for [`enumerate_pure_pbne`].
#[derive(Debug, Clone)]
pub struct EnumerateOptions {
    /// Indifference tolerance shared with [`verify_pbne`].
    pub eps: f64,
    /// Candidate sustaining beliefs for unreached information sets.
    /// `None` means `{0, κ/(κ+β+φ), 1}`.
    pub off_path_beliefs: Option<Vec<f64>>,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        Self { eps: crate::DEFAULT_EPS, off_path_beliefs: None }
    }
}

impl EnumerateOptions {
    fn grid(&self, params: &GameParameters) -> Vec<f64> {
        match &self.off_path_beliefs {
            Some(g) => g.clone(),
            None => vec![0.0, params.block_threshold(), 1.0],
        }
    }
}

/// Why a candidate profile fails verification.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// An action played with positive probability is not within `eps` of the
    /// best action at that information set's belief.
    DmSuboptimal { signal: Signal, action: DmAction, gain: f64 },
    /// A sender type's signal mixture falls short of its best achievable
    /// expected utility.
    AppDeviates { app: AppType, to: Signal, gain: f64 },
    /// An on-path belief does not match Bayes' rule.
    BeliefMismatch { signal: Signal, expected: f64, actual: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DmSuboptimal { signal, action, gain } => write!(
                f,
                "DM plays {action} on {signal} but switching gains {gain}"
            ),
            Self::AppDeviates { app, to, gain } => {
                write!(f, "{app} deviates to {to} gaining {gain}")
            }
            Self::BeliefMismatch { signal, expected, actual } => write!(
                f,
                "belief on {signal} is {actual} but Bayes gives {expected}"
            ),
        }
    }
}

/// Outcome of [`verify_pbne`].
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationResult {
    pub passed: bool,
    /// The first violated check, with its deviation gain.
    pub violation: Option<Violation>,
}

impl VerificationResult {
    fn pass() -> Self {
        Self { passed: true, violation: None }
    }

    fn fail(violation: Violation) -> Self {
        Self { passed: false, violation: Some(violation) }
    }
}

/// Check whether `(strategy, beliefs)` is a PBNE within tolerance `eps`.
///
/// Three checks, in order:
/// 1. the defender's actions played with positive probability are within
///    `eps` of the best action at each information set's belief (computed
///    on-path, supplied off-path);
/// 2. each sender type's signal mixture is within `eps` of its best
///    achievable expected utility against `(y, x)`;
/// 3. on-path beliefs match Bayes' rule within `eps`.
pub fn verify_pbne(
    params: &GameParameters,
    strategy: &StrategyProfile,
    beliefs: &Beliefs,
    eps: f64,
) -> VerificationResult {
    let theta = params.theta;

    // (a) defender sequential rationality at both information sets.
    for s in [Signal::Suspicious, Signal::NonSuspicious] {
        let belief = match s {
            Signal::Suspicious => beliefs.q,
            Signal::NonSuspicious => beliefs.p,
        };
        let (eu_block, eu_allow) = dm_expected_utilities(params, s, belief);
        let best = eu_block.max(eu_allow);
        let block_prob = strategy.block_prob(s);
        for (a, prob, eu) in [
            (DmAction::Block, block_prob, eu_block),
            (DmAction::Allow, 1.0 - block_prob, eu_allow),
        ] {
            if prob > 0.0 && eu < best - eps {
                return VerificationResult::fail(Violation::DmSuboptimal {
                    signal: s,
                    action: a,
                    gain: best - eu,
                });
            }
        }
    }

    // (b) sender rationality for both types.
    for t in [AppType::Malicious, AppType::Honest] {
        let eu_s = app_signal_utility(params, t, Signal::Suspicious, strategy.y);
        let eu_ns = app_signal_utility(params, t, Signal::NonSuspicious, strategy.x);
        let mix = strategy.suspicious_prob(t);
        let played = mix * eu_s + (1.0 - mix) * eu_ns;
        let best = eu_s.max(eu_ns);
        if played < best - eps {
            let to = if eu_s > eu_ns { Signal::Suspicious } else { Signal::NonSuspicious };
            return VerificationResult::fail(Violation::AppDeviates {
                app: t,
                to,
                gain: best - played,
            });
        }
    }

    // (c) belief consistency on-path.
    let bayes = bayes_update(theta, strategy.m, strategy.n, beliefs.q, beliefs.p);
    if bayes.q_on_path && (beliefs.q - bayes.q).abs() > eps {
        return VerificationResult::fail(Violation::BeliefMismatch {
            signal: Signal::Suspicious,
            expected: bayes.q,
            actual: beliefs.q,
        });
    }
    if bayes.p_on_path && (beliefs.p - bayes.p).abs() > eps {
        return VerificationResult::fail(Violation::BeliefMismatch {
            signal: Signal::NonSuspicious,
            expected: bayes.p,
            actual: beliefs.p,
        });
    }
    VerificationResult::pass()
}

/// Evidence that one separating profile is not an equilibrium: the deviating
/// type and its payoff gain against the defender's best response.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationCertificate {
    /// `(malicious signal, honest signal)` of the separating profile.
    pub sender_profile: (Signal, Signal),
    /// Defender best responses `(on S, on NS)` at the implied beliefs.
    pub dm_response: (DmAction, DmAction),
    pub deviating_type: AppType,
    pub from: Signal,
    pub to: Signal,
    pub on_path_payoff: f64,
    pub deviation_payoff: f64,
    /// `deviation_payoff − on_path_payoff`; strictly positive in the
    /// strict-deviation regime.
    pub gain: f64,
}

/// Both separating profiles refuted.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparatingNonexistence {
    /// Certificate against (S, NS): MA deviates to NS.
    pub s_ns: DeviationCertificate,
    /// Certificate against (NS, S): MA deviates to S.
    pub ns_s: DeviationCertificate,
}

/// The deviation gain is not strictly positive, so the strictness argument
/// behind separating nonexistence fails. Possible only when `α + τ ≤ c^NS`
/// (or `α + τ + u ≤ c^S` for the other profile). Reported, not silently
/// ignored: the certificates are still included.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("separating deviation is weak: gains {0} and {1} are not both strictly positive", .certificates.s_ns.gain, .certificates.ns_s.gain)]
pub struct ParamsMakeDeviationWeak {
    pub certificates: SeparatingNonexistence,
}

/// Refute both separating profiles with explicit deviation certificates.
///
/// Against (S, NS) the beliefs are `q = 1, p = 0`, the defender's best
/// response is (Block, Allow), and the malicious type gains
/// `(α − c^NS) − (−τ)` by deviating to NS. Against (NS, S) it gains
/// `(α + u − c^S) − (−τ)` by deviating to S.
pub fn check_separating(
    params: &GameParameters,
) -> Result<SeparatingNonexistence, ParamsMakeDeviationWeak> {
    let br = |s: Signal, belief: f64| {
        let (eu_block, eu_allow) = dm_expected_utilities(params, s, belief);
        if eu_block >= eu_allow { DmAction::Block } else { DmAction::Allow }
    };

    // (S, NS): q = 1, p = 0. On-path MA is blocked; deviating to NS is allowed.
    let on_path = crate::game::payoff(params, AppType::Malicious, Signal::Suspicious, DmAction::Block).app;
    let deviation =
        crate::game::payoff(params, AppType::Malicious, Signal::NonSuspicious, DmAction::Allow).app;
    let s_ns = DeviationCertificate {
        sender_profile: (Signal::Suspicious, Signal::NonSuspicious),
        dm_response: (br(Signal::Suspicious, 1.0), br(Signal::NonSuspicious, 0.0)),
        deviating_type: AppType::Malicious,
        from: Signal::Suspicious,
        to: Signal::NonSuspicious,
        on_path_payoff: on_path,
        deviation_payoff: deviation,
        gain: deviation - on_path,
    };

    // (NS, S): q = 0, p = 1. On-path MA is blocked; deviating to S is allowed.
    let on_path =
        crate::game::payoff(params, AppType::Malicious, Signal::NonSuspicious, DmAction::Block).app;
    let deviation =
        crate::game::payoff(params, AppType::Malicious, Signal::Suspicious, DmAction::Allow).app;
    let ns_s = DeviationCertificate {
        sender_profile: (Signal::NonSuspicious, Signal::Suspicious),
        dm_response: (br(Signal::Suspicious, 0.0), br(Signal::NonSuspicious, 1.0)),
        deviating_type: AppType::Malicious,
        from: Signal::NonSuspicious,
        to: Signal::Suspicious,
        on_path_payoff: on_path,
        deviation_payoff: deviation,
        gain: deviation - on_path,
    };

    let certificates = SeparatingNonexistence { s_ns, ns_s };
    if certificates.s_ns.gain > 0.0 && certificates.ns_s.gain > 0.0 {
        Ok(certificates)
    } else {
        Err(ParamsMakeDeviationWeak { certificates })
    }
}

/// Enumerate all pure-corner equilibria and the hybrid one-parameter
/// families. Expects validated parameters.
///
/// Every `(m, n, y, x)` in `{0,1}^4` is screened with the same tolerance
/// checks [`verify_pbne`] applies, quantifying over the configured grid of
/// sustaining beliefs at an unreached information set. Hybrid families (one
/// type mixing against a pure defender) are emitted at a representative
/// interior point with the valid mixing interval recorded in `conditions`.
/// Each emitted profile carries its own verification result; an empty list
/// is a valid outcome.
pub fn enumerate_pure_pbne(
    params: &GameParameters,
    opts: &EnumerateOptions,
) -> Vec<PbneProfile> {
    let mut out = Vec::new();
    let grid = opts.grid(params);
    for (m, n) in [(1.0, 1.0), (0.0, 0.0), (1.0, 0.0), (0.0, 1.0)] {
        for (y, x) in [(1.0, 1.0), (0.0, 0.0), (0.0, 1.0), (1.0, 0.0)] {
            if let Some(profile) = try_pure_corner(params, m, n, y, x, opts.eps, &grid) {
                out.push(profile);
            }
        }
    }
    hybrid_families(params, opts.eps, &mut out);
    for profile in &mut out {
        profile.verified =
            verify_pbne(params, &profile.strategy, &profile.beliefs, opts.eps).passed;
    }
    out
}

/// Belief interval `[lo, hi]` under which `action` is a (weak) best
/// response. Non-degenerate for every action: Block is optimal at belief 1,
/// Allow at belief 0, whatever the parameters; at the threshold itself both
/// are.
fn sustaining_interval(params: &GameParameters, action: DmAction) -> (f64, f64) {
    let den = params.kappa + params.beta + params.phi;
    if den <= 0.0 {
        return (0.0, 1.0);
    }
    match action {
        DmAction::Block => (params.kappa / den, 1.0),
        DmAction::Allow => (0.0, params.kappa / den),
    }
}

fn try_pure_corner(
    params: &GameParameters,
    m: f64,
    n: f64,
    y: f64,
    x: f64,
    eps: f64,
    grid: &[f64],
) -> Option<PbneProfile> {
    let theta = params.theta;
    let strategy = StrategyProfile { m, n, y, x };
    let mut conditions = Vec::new();

    // Sender rationality for both types.
    for t in [AppType::Malicious, AppType::Honest] {
        let eu_s = app_signal_utility(params, t, Signal::Suspicious, y);
        let eu_ns = app_signal_utility(params, t, Signal::NonSuspicious, x);
        let plays_s = strategy.suspicious_prob(t) == 1.0;
        let (played, other) = if plays_s { (eu_s, eu_ns) } else { (eu_ns, eu_s) };
        if played < other - eps {
            return None;
        }
        if let Some(cond) = sender_condition(t, plays_s, y, x) {
            conditions.push(cond);
        }
    }

    // Defender rationality, information set by information set.
    let bayes = bayes_update(theta, m, n, f64::NAN, f64::NAN);
    let mut rep_q = bayes.q;
    let mut rep_p = bayes.p;
    let mut off_path_support = None;
    for s in [Signal::Suspicious, Signal::NonSuspicious] {
        let (on_path, belief) = match s {
            Signal::Suspicious => (bayes.q_on_path, bayes.q),
            Signal::NonSuspicious => (bayes.p_on_path, bayes.p),
        };
        let block = strategy.block_prob(s) == 1.0;
        let action = if block { DmAction::Block } else { DmAction::Allow };
        if on_path {
            let (eu_block, eu_allow) = dm_expected_utilities(params, s, belief);
            let (played, other) = if block { (eu_block, eu_allow) } else { (eu_allow, eu_block) };
            if played < other - eps {
                return None;
            }
            if let Some(cond) = dm_condition(action, belief, theta) {
                conditions.push(cond);
            }
        } else {
            // Quantify over the grid of candidate off-path beliefs; the
            // action must be optimal under at least one of them.
            let mut sustaining: Vec<f64> = grid
                .iter()
                .copied()
                .filter(|b| {
                    let (eu_block, eu_allow) = dm_expected_utilities(params, s, *b);
                    let (played, other) =
                        if block { (eu_block, eu_allow) } else { (eu_allow, eu_block) };
                    played >= other - eps
                })
                .collect();
            if sustaining.is_empty() {
                return None;
            }
            sustaining.sort_by(|a, b| a.partial_cmp(b).unwrap());
            // Representative: the extreme sustaining belief, where the
            // action's margin is largest.
            let rep = match action {
                DmAction::Block => *sustaining.last().unwrap(),
                DmAction::Allow => sustaining[0],
            };
            match s {
                Signal::Suspicious => rep_q = rep,
                Signal::NonSuspicious => rep_p = rep,
            }
            let (lo, hi) = sustaining_interval(params, action);
            off_path_support = Some(OffPathSupport { signal: s, action, lo, hi });
        }
    }

    let beliefs = Beliefs {
        q: rep_q,
        p: rep_p,
        q_on_path: bayes.q_on_path,
        p_on_path: bayes.p_on_path,
    };
    let category = if m == n { PbneCategory::Pooling } else { PbneCategory::Separating };
    Some(PbneProfile {
        category,
        strategy,
        beliefs,
        conditions,
        off_path_support,
        verified: false,
    })
}

/// The sender-side equilibrium condition at a pure corner, as a readable
/// inequality. Trivial comparisons (both signals blocked) produce nothing.
fn sender_condition(t: AppType, plays_s: bool, y: f64, x: f64) -> Option<String> {
    let (blocked, on_s, on_ns) = match t {
        AppType::Malicious => ("-tau", "alpha + u - cost_s", "alpha - cost_ns"),
        AppType::Honest => ("-gamma", "sigma + v - cost_s", "sigma - cost_ns"),
    };
    let s_side = if y == 1.0 { blocked } else { on_s };
    let ns_side = if x == 1.0 { blocked } else { on_ns };
    if s_side == ns_side {
        return None;
    }
    Some(if plays_s {
        format!("{s_side} >= {ns_side}")
    } else {
        format!("{ns_side} >= {s_side}")
    })
}

/// The defender-side condition at an on-path information set. Only the
/// pooling case (posterior equal to the prior) is informative; degenerate
/// posteriors of 0 or 1 make the best response parameter-free.
fn dm_condition(action: DmAction, belief: f64, theta: f64) -> Option<String> {
    if (belief - theta).abs() > 1e-12 {
        return None;
    }
    Some(match action {
        DmAction::Block => "theta >= kappa/(beta+kappa+phi)".to_string(),
        DmAction::Allow => "theta <= kappa/(beta+kappa+phi)".to_string(),
    })
}

/// Emit the four hybrid families where they exist.
///
/// With one type mixing, both information sets are on-path, so the defender
/// actions are pinned by Bayes beliefs: (Allow, Allow) families additionally
/// need both types indifferent (`u ≈ c^S − c^NS ≈ v`), while (Block, Block)
/// families make the senders indifferent for free. The mixing parameter
/// ranges over the interval where the defender's on-path action stays
/// optimal; profiles are emitted at the interval midpoint.
fn hybrid_families(params: &GameParameters, eps: f64, out: &mut Vec<PbneProfile>) {
    let theta = params.theta;
    if !(theta > 0.0 && theta < 1.0) {
        return;
    }
    let den = params.kappa + params.beta + params.phi;
    let diff = params.cost_s - params.cost_ns;
    let du = params.u - diff;
    let dv = params.v - diff;
    let indifference_conditions = vec![
        "|u - (cost_s - cost_ns)| <= eps".to_string(),
        "|v - (cost_s - cost_ns)| <= eps".to_string(),
    ];

    // Smallest mixing weight w such that the reached posterior
    // w*theta / (w*theta + (1-theta)) clears `bound`; None when impossible.
    let weight_floor = |bound: f64| -> Option<f64> {
        if bound <= 0.0 {
            return Some(0.0);
        }
        if bound >= 1.0 {
            return None;
        }
        Some(bound * (1.0 - theta) / (theta * (1.0 - bound)))
    };

    // Interval descriptions honoring the open interior (0, 1).
    let above = |lo: f64| {
        if lo > 0.0 {
            format!("[{lo}, 1)")
        } else {
            "(0, 1)".to_string()
        }
    };
    let below = |hi: f64| {
        if hi < 1.0 {
            format!("(0, {hi}]")
        } else {
            "(0, 1)".to_string()
        }
    };

    if du.abs() <= eps && dv.abs() <= eps {
        // Allow-everywhere families. The posterior at the pooled-on signal
        // must stay at or below the threshold, i.e. the mixing type must
        // send that signal often enough to dilute it.
        let allow_cap = if den <= 0.0 { 1.0 } else { ((params.kappa + eps) / den).min(1.0) };
        // q(n) = theta / (theta + n(1-theta)) <= cap  <=>  n >= floor(cap).
        let n_floor = if den <= 0.0 {
            Some(0.0)
        } else if allow_cap <= 0.0 {
            None
        } else if allow_cap >= 1.0 {
            Some(0.0)
        } else {
            Some(theta * (1.0 - allow_cap) / (allow_cap * (1.0 - theta)))
        };
        if let Some(lo) = n_floor {
            if lo < 1.0 {
                // (S, (S, NS)): malicious pure S, honest mixing n in [lo, 1).
                let rep = (lo.max(0.0) + 1.0) / 2.0;
                let mut conditions = indifference_conditions.clone();
                conditions.push("q <= kappa/(beta+kappa+phi)".to_string());
                conditions.push(format!("family: n in {}", above(lo.max(0.0))));
                push_hybrid(params, 1.0, rep, 0.0, 0.0, conditions, out);

                // (NS, (S, NS)): malicious pure NS, honest mixing with the
                // same dilution constraint on the NS posterior.
                let hi = 1.0 - lo.max(0.0);
                let rep = hi / 2.0;
                let mut conditions = indifference_conditions.clone();
                conditions.push("p <= kappa/(beta+kappa+phi)".to_string());
                conditions.push(format!("family: n in {}", below(hi)));
                push_hybrid(params, 0.0, rep, 0.0, 0.0, conditions, out);
            }
        }
    }

    // Block-everywhere families: senders are indifferent automatically; the
    // reached posterior must stay at or above the threshold.
    let block_floor = if den <= 0.0 { 0.0 } else { (params.kappa - eps).max(0.0) / den };
    if let Some(lo) = weight_floor(block_floor) {
        if lo < 1.0 {
            // ((S, NS), S): honest pure S, malicious mixing m in [lo, 1).
            let rep = (lo.max(0.0) + 1.0) / 2.0;
            let conditions = vec![
                "q >= kappa/(beta+kappa+phi)".to_string(),
                format!("family: m in {}", above(lo.max(0.0))),
            ];
            push_hybrid(params, rep, 1.0, 1.0, 1.0, conditions, out);

            // ((S, NS), NS): honest pure NS, malicious mixing with the NS
            // posterior above threshold.
            let hi = 1.0 - lo.max(0.0);
            let rep = hi / 2.0;
            let conditions = vec![
                "p >= kappa/(beta+kappa+phi)".to_string(),
                format!("family: m in {}", below(hi)),
            ];
            push_hybrid(params, rep, 0.0, 1.0, 1.0, conditions, out);
        }
    }
}

fn push_hybrid(
    params: &GameParameters,
    m: f64,
    n: f64,
    y: f64,
    x: f64,
    conditions: Vec<String>,
    out: &mut Vec<PbneProfile>,
) {
    let beliefs = bayes_update(params.theta, m, n, f64::NAN, f64::NAN);
    debug_assert!(beliefs.q_on_path && beliefs.p_on_path);
    out.push(PbneProfile {
        category: PbneCategory::Hybrid,
        strategy: StrategyProfile { m, n, y, x },
        beliefs,
        conditions,
        off_path_support: None,
        verified: false,
    });
}

/// A mixing description: a point or the whole open unit interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MixingFamily {
    Point(f64),
    /// Any `t` in `(0, 1)`, with both types mixing identically (`m = n = t`).
    OpenUnitInterval,
}

impl fmt::Display for MixingFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Point(t) => write!(f, "{t}"),
            Self::OpenUnitInterval => f.write_str("any t in (0,1)"),
        }
    }
}

/// The mixed-strategy equilibrium.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedPbne {
    /// Defender block probability on a non-suspicious request.
    pub x: f64,
    /// Defender block probability on a suspicious request.
    pub y: f64,
    /// Posterior pinned by defender indifference on S: `κ/(κ+β+φ)`.
    pub q_star: f64,
    /// Posterior pinned by defender indifference on NS: the same value.
    pub p_star: f64,
    pub m_family: MixingFamily,
    pub n_family: MixingFamily,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MixedPbneError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("theta must lie strictly inside (0,1); got {theta}")]
    ThetaOutOfRange { theta: f64 },
    /// The sender indifference system has determinant ~0 and is not solved
    /// by the all-allow point.
    #[error("sender indifference system is singular (det={det}) and inconsistent")]
    SingularIndifferenceSystem { det: f64 },
    #[error("indifference mixing (y={y}, x={x}) falls outside [0,1]^2")]
    InfeasibleMixing { y: f64, x: f64 },
    /// Defender indifference pins both posteriors to `κ/(κ+β+φ)`, and the
    /// law of total probability then forces `theta` onto the same value.
    #[error("mixed equilibrium requires theta = kappa/(kappa+beta+phi) = {threshold}; got theta = {theta}")]
    ThetaMismatch { theta: f64, threshold: f64 },
}

/// Solve for the mixed-strategy equilibrium.
///
/// Step 1 makes both sender types indifferent by solving
///
/// ```text
/// y(τ+α+u−c^S) − x(τ+α−c^NS)  = u − c^S + c^NS
/// y(γ+σ+v−c^S) − x(γ+σ−c^NS) = v − c^S + c^NS
/// ```
///
/// by Cramer's rule. Both indifference lines pass through the all-block
/// point `(y, x) = (1, 1)`, since blocked senders are indifferent no matter
/// what they send, so a nonsingular system always yields exactly that point.
/// The system degenerates to a whole line exactly when
/// `u = v = c^S − c^NS`; the canonical representative `(0, 0)` is returned
/// then (the right-hand side is zero). Step 2 pins `q* = p* = κ/(κ+β+φ)` by
/// defender indifference. Step 3 inverts Bayes' rule: equal posteriors force
/// `theta` to equal the threshold (law of total probability), in which case
/// the sender mixing is the whole family `m = n = t`, `t ∈ (0,1)`.
pub fn solve_mixed(params: &GameParameters, eps: f64) -> Result<MixedPbne, MixedPbneError> {
    let report = params.validate();
    if !report.is_valid() {
        return Err(MixedPbneError::InvalidParams(report.to_string()));
    }
    let theta = params.theta;
    if !(theta > 0.0 && theta < 1.0) {
        return Err(MixedPbneError::ThetaOutOfRange { theta });
    }

    let a11 = params.tau + params.alpha + params.u - params.cost_s;
    let a12 = -(params.tau + params.alpha - params.cost_ns);
    let b1 = params.u - params.cost_s + params.cost_ns;
    let a21 = params.gamma + params.sigma + params.v - params.cost_s;
    let a22 = -(params.gamma + params.sigma - params.cost_ns);
    let b2 = params.v - params.cost_s + params.cost_ns;
    let det = a11 * a22 - a12 * a21;

    let (y, x) = if det.abs() > eps {
        ((b1 * a22 - a12 * b2) / det, (a11 * b2 - b1 * a21) / det)
    } else if b1.abs() <= eps && b2.abs() <= eps {
        (0.0, 0.0)
    } else {
        return Err(MixedPbneError::SingularIndifferenceSystem { det });
    };
    if !(-eps..=1.0 + eps).contains(&y) || !(-eps..=1.0 + eps).contains(&x) {
        return Err(MixedPbneError::InfeasibleMixing { y, x });
    }
    let (y, x) = (y.clamp(0.0, 1.0), x.clamp(0.0, 1.0));

    let threshold = params.block_threshold();
    if (theta - threshold).abs() > eps || threshold <= 0.0 || threshold >= 1.0 {
        return Err(MixedPbneError::ThetaMismatch { theta, threshold });
    }

    // Bayes inversion at the pinned posteriors; by construction this is the
    // degenerate diagonal case.
    let (m_family, n_family) = match crate::beliefs::invert_bayes(theta, theta, theta) {
        Ok(BayesInversion::DiagonalFamily) => {
            (MixingFamily::OpenUnitInterval, MixingFamily::OpenUnitInterval)
        }
        Ok(BayesInversion::Unique { m, n }) => (MixingFamily::Point(m), MixingFamily::Point(n)),
        Err(_) => return Err(MixedPbneError::ThetaMismatch { theta, threshold }),
    };

    Ok(MixedPbne { x, y, q_star: threshold, p_star: threshold, m_family, n_family })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::payoff;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9
    }

    fn corner_set(profiles: &[PbneProfile]) -> Vec<(u8, u8, u8, u8)> {
        let mut set: Vec<_> = profiles
            .iter()
            .filter(|e| e.category != PbneCategory::Hybrid)
            .map(|e| {
                (
                    e.strategy.m as u8,
                    e.strategy.n as u8,
                    e.strategy.y as u8,
                    e.strategy.x as u8,
                )
            })
            .collect();
        set.sort_unstable();
        set
    }

    #[test]
    fn separating_certificates_have_expected_gains() {
        let p = GameParameters::default();
        let certs = check_separating(&p).expect("default parameters are strict");
        // MA blocked on S gets -tau; deviating to NS it is allowed and nets
        // alpha - cost_ns, for a gain of 9 - (-5) = 14.
        assert_eq!(certs.s_ns.gain, 14.0);
        assert_eq!(certs.s_ns.deviating_type, AppType::Malicious);
        assert_eq!(certs.s_ns.dm_response, (DmAction::Block, DmAction::Allow));
        // Against (NS, S) the deviation to S nets alpha + u - cost_s.
        assert_eq!(certs.ns_s.deviation_payoff, p.alpha + p.u - p.cost_s);
        assert_eq!(certs.ns_s.gain, 16.0);
    }

    #[test]
    fn all_zero_parameters_make_deviation_weak() {
        let zero = GameParameters {
            theta: 0.5,
            cost_s: 0.0,
            cost_ns: 0.0,
            gamma: 0.0,
            psi_s: 0.0,
            psi_ns: 0.0,
            phi: 0.0,
            tau: 0.0,
            kappa: 0.0,
            alpha: 0.0,
            beta: 0.0,
            sigma: 0.0,
            u: 0.0,
            v: 0.0,
        };
        let err = check_separating(&zero).unwrap_err();
        assert_eq!(err.certificates.s_ns.gain, 0.0);
        assert_eq!(err.certificates.ns_s.gain, 0.0);
    }

    #[test]
    fn default_parameters_pool_with_blocking_above_threshold() {
        // theta = 0.5 >= 0.25: both pooling profiles with (B, B) exist.
        let p = GameParameters::default();
        let found = enumerate_pure_pbne(&p, &EnumerateOptions::default());
        let corners = corner_set(&found);
        assert!(corners.contains(&(1, 1, 1, 1)), "missing (S,S)+(B,B): {corners:?}");
        assert!(corners.contains(&(0, 0, 1, 1)), "missing (NS,NS)+(B,B): {corners:?}");
        assert!(found.iter().all(|e| e.verified));
        assert!(found.iter().all(|e| e.category != PbneCategory::Separating));
    }

    #[test]
    fn low_theta_with_cheap_suspicion_pools_on_allow() {
        // theta = 0.1 < 0.25 and u, v >= cost_s - cost_ns = 1.
        let p = GameParameters { theta: 0.1, ..GameParameters::default() };
        let found = enumerate_pure_pbne(&p, &EnumerateOptions::default());
        let corners = corner_set(&found);
        assert!(corners.contains(&(1, 1, 0, 0)), "missing (S,S)+(A,A): {corners:?}");
        let profile = found
            .iter()
            .find(|e| e.strategy == StrategyProfile { m: 1.0, n: 1.0, y: 0.0, x: 0.0 })
            .unwrap();
        assert!(profile.conditions.iter().any(|c| c.contains("theta <=")));
        assert!(profile
            .conditions
            .iter()
            .any(|c| c == "alpha + u - cost_s >= alpha - cost_ns"));
    }

    #[test]
    fn off_path_support_interval_reported_for_asymmetric_rows() {
        let p = GameParameters { theta: 0.1, ..GameParameters::default() };
        let found = enumerate_pure_pbne(&p, &EnumerateOptions::default());
        // (S,S) + (A on S, B off-path on NS) is sustained by p >= 0.25.
        let profile = found
            .iter()
            .find(|e| e.strategy == StrategyProfile { m: 1.0, n: 1.0, y: 0.0, x: 1.0 })
            .expect("Allow-on-path, Block-off-path pooling row");
        let support = profile.off_path_support.expect("NS is unreached");
        assert_eq!(support.signal, Signal::NonSuspicious);
        assert_eq!(support.action, DmAction::Block);
        assert_eq!(support.lo, 0.25);
        assert_eq!(support.hi, 1.0);
        assert_eq!(profile.beliefs.p, 1.0);
        assert!(!profile.beliefs.p_on_path);
    }

    #[test]
    fn hybrid_block_families_exist_above_threshold() {
        let p = GameParameters::default(); // theta = 0.5 > 0.25
        let found = enumerate_pure_pbne(&p, &EnumerateOptions::default());
        let hybrids: Vec<_> = found
            .iter()
            .filter(|e| e.category == PbneCategory::Hybrid)
            .collect();
        assert_eq!(hybrids.len(), 2, "two Block-everywhere families expected");
        for h in &hybrids {
            assert_eq!((h.strategy.y, h.strategy.x), (1.0, 1.0));
            assert!(h.verified);
        }
        // ((S,NS), S): honest pure S, malicious mixing above the dilution floor.
        assert!(hybrids
            .iter()
            .any(|h| h.strategy.n == 1.0 && h.strategy.m > 0.0 && h.strategy.m < 1.0));
        // ((S,NS), NS).
        assert!(hybrids
            .iter()
            .any(|h| h.strategy.n == 0.0 && h.strategy.m > 0.0 && h.strategy.m < 1.0));
    }

    #[test]
    fn hybrid_allow_families_need_exact_indifference() {
        // u = v = cost_s - cost_ns = 1 and theta below the threshold.
        let p = GameParameters {
            theta: 0.1,
            u: 1.0,
            v: 1.0,
            ..GameParameters::default()
        };
        let found = enumerate_pure_pbne(&p, &EnumerateOptions::default());
        let allow_hybrids: Vec<_> = found
            .iter()
            .filter(|e| {
                e.category == PbneCategory::Hybrid && e.strategy.y == 0.0 && e.strategy.x == 0.0
            })
            .collect();
        assert_eq!(allow_hybrids.len(), 2);
        for h in allow_hybrids {
            assert!(h.verified);
            assert!(h.conditions.iter().any(|c| c.contains("|u - (cost_s - cost_ns)|")));
        }

        // Perturb u away from indifference: the Allow families vanish.
        let p2 = GameParameters { u: 1.5, ..p };
        let found2 = enumerate_pure_pbne(&p2, &EnumerateOptions::default());
        assert!(!found2
            .iter()
            .any(|e| e.category == PbneCategory::Hybrid && e.strategy.y == 0.0));
    }

    #[test]
    fn verify_rejects_pooling_allow_when_suspicion_is_too_costly() {
        // u < cost_s - cost_ns: MA prefers to deviate to NS under (A, A).
        let p = GameParameters { u: 0.25, theta: 0.1, ..GameParameters::default() };
        let strategy = StrategyProfile { m: 1.0, n: 1.0, y: 0.0, x: 0.0 };
        let beliefs = bayes_update(p.theta, 1.0, 1.0, 0.0, 0.0);
        let result = verify_pbne(&p, &strategy, &beliefs, 1e-9);
        assert!(!result.passed);
        match result.violation.unwrap() {
            Violation::AppDeviates { app, to, gain } => {
                assert_eq!(app, AppType::Malicious);
                assert_eq!(to, Signal::NonSuspicious);
                // Gain is (cost_s - cost_ns) - u.
                assert!(close(gain, (p.cost_s - p.cost_ns) - p.u));
            }
            other => panic!("unexpected violation {other:?}"),
        }
    }

    #[test]
    fn verify_rejects_separating_profile_naming_malicious_type() {
        let p = GameParameters::default();
        let strategy = StrategyProfile { m: 1.0, n: 0.0, y: 1.0, x: 0.0 };
        let beliefs = bayes_update(p.theta, 1.0, 0.0, 0.0, 0.0);
        let result = verify_pbne(&p, &strategy, &beliefs, 1e-9);
        assert!(!result.passed);
        assert!(matches!(
            result.violation.unwrap(),
            Violation::AppDeviates { app: AppType::Malicious, .. }
        ));
    }

    #[test]
    fn emitted_profiles_pass_their_own_verifier() {
        for theta in [0.05, 0.25, 0.5, 0.95] {
            let p = GameParameters { theta, ..GameParameters::default() };
            for profile in enumerate_pure_pbne(&p, &EnumerateOptions::default()) {
                assert!(
                    profile.verified,
                    "unverified profile at theta={theta}: {profile:?}"
                );
            }
        }
    }

    #[test]
    fn mixed_solution_at_threshold_theta() {
        let p = GameParameters { theta: 0.25, ..GameParameters::default() };
        let mixed = solve_mixed(&p, 1e-9).unwrap();
        // The nonsingular sender system pins the defender to all-block.
        assert_eq!((mixed.y, mixed.x), (1.0, 1.0));
        assert_eq!(mixed.q_star, 0.25);
        assert_eq!(mixed.p_star, 0.25);
        assert_eq!(mixed.m_family, MixingFamily::OpenUnitInterval);

        // Sender indifference under (y*, x*).
        for t in [AppType::Malicious, AppType::Honest] {
            let eu_s = app_signal_utility(&p, t, Signal::Suspicious, mixed.y);
            let eu_ns = app_signal_utility(&p, t, Signal::NonSuspicious, mixed.x);
            assert!(close(eu_s, eu_ns));
        }
        // Defender indifference at the pinned posterior, both signals.
        for s in [Signal::Suspicious, Signal::NonSuspicious] {
            let (eu_b, eu_a) = dm_expected_utilities(&p, s, mixed.q_star);
            assert!(close(eu_b, eu_a));
        }
    }

    #[test]
    fn mixed_theta_mismatch_away_from_threshold() {
        let p = GameParameters::default(); // theta = 0.5, threshold 0.25
        match solve_mixed(&p, 1e-9) {
            Err(MixedPbneError::ThetaMismatch { theta, threshold }) => {
                assert_eq!(theta, 0.5);
                assert_eq!(threshold, 0.25);
            }
            other => panic!("expected ThetaMismatch, got {other:?}"),
        }
    }

    #[test]
    fn mixed_singular_consistent_case_returns_all_allow() {
        // u = v = cost_s - cost_ns makes both indifference lines coincide;
        // the zero right-hand side admits the all-allow representative.
        let p = GameParameters {
            theta: 0.25,
            u: 1.0,
            v: 1.0,
            ..GameParameters::default()
        };
        let mixed = solve_mixed(&p, 1e-9).unwrap();
        assert_eq!((mixed.x, mixed.y), (0.0, 0.0));
        for t in [AppType::Malicious, AppType::Honest] {
            let eu_s = app_signal_utility(&p, t, Signal::Suspicious, mixed.y);
            let eu_ns = app_signal_utility(&p, t, Signal::NonSuspicious, mixed.x);
            assert!(close(eu_s, eu_ns));
        }
    }

    #[test]
    fn pooling_threshold_matches_hybrid_threshold_form() {
        // theta >= kappa/(beta+kappa+phi) and q >= (1-q)kappa/(beta+phi)
        // are the same condition with q substituted for theta.
        let p = GameParameters::default();
        for i in 0..=100 {
            let b = i as f64 / 100.0;
            let pooled_form = b >= p.kappa / (p.beta + p.kappa + p.phi);
            let hybrid_form = b >= (1.0 - b) * p.kappa / (p.beta + p.phi);
            assert_eq!(pooled_form, hybrid_form, "at belief {b}");
        }
    }

    #[test]
    fn blocked_everywhere_profile_payoffs_match_leaves() {
        // Cross-check the hybrid Block-family representative against leaves.
        let p = GameParameters::default();
        let found = enumerate_pure_pbne(&p, &EnumerateOptions::default());
        let h = found
            .iter()
            .find(|e| e.category == PbneCategory::Hybrid && e.strategy.n == 1.0)
            .unwrap();
        let eu = crate::game::expected_payoffs(&p, &h.strategy);
        assert_eq!(eu.ma, payoff(&p, AppType::Malicious, Signal::Suspicious, DmAction::Block).app);
        assert_eq!(eu.ha, payoff(&p, AppType::Honest, Signal::Suspicious, DmAction::Block).app);
    }
}
