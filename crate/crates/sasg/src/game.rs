//! The stage game: domain types, parameter validation, and payoffs.
//!
//! Nature draws the application's type (malicious with probability `theta`),
//! the application sends a signal, the defense mechanism allows or blocks.
//! Each of the eight leaves of that tree pays out a `(app, dm)` utility pair
//! built from the cost/benefit parameters in [`GameParameters`].

use std::fmt;

use serde::{Deserialize, Serialize};

/// The sender's private type, drawn by Nature at the root of the stage game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AppType {
    /// Tries to infer private user data from sensor readings.
    Malicious,
    /// Provides a legitimate service backed by sensor data.
    Honest,
}

impl fmt::Display for AppType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Malicious => f.write_str("MA"),
            Self::Honest => f.write_str("HA"),
        }
    }
}

/// The request signal observed by the defense mechanism.
///
/// What makes a request suspicious (frequency, sampling rate, relevance to
/// the advertised service) is abstracted away; the signal is just a label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Signal {
    Suspicious,
    NonSuspicious,
}

impl Signal {
    /// The other signal.
    pub fn other(self) -> Self {
        match self {
            Self::Suspicious => Self::NonSuspicious,
            Self::NonSuspicious => Self::Suspicious,
        }
    }
}

impl fmt::Display for Signal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Suspicious => f.write_str("S"),
            Self::NonSuspicious => f.write_str("NS"),
        }
    }
}

/// The defense mechanism's response to a request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DmAction {
    Block,
    Allow,
}

impl fmt::Display for DmAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Block => f.write_str("B"),
            Self::Allow => f.write_str("A"),
        }
    }
}

/// All cost/benefit scalars of the stage game plus Nature's probability.
///
/// Values are dimensionless normalized utilities; no unit system or internal
/// rescaling is applied. Field names follow the model's symbols: `cost_s` /
/// `cost_ns` are the app's processing costs c^S ≥ c^NS, `psi_s` / `psi_ns`
/// the defender's processing costs ψ^S ≥ ψ^NS, and so on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameParameters {
    /// Probability that Nature selects the malicious type.
    pub theta: f64,
    /// App cost of a processed suspicious request (c^S).
    pub cost_s: f64,
    /// App cost of a processed non-suspicious request (c^NS).
    pub cost_ns: f64,
    /// Honest app's cost when its request is blocked (γ).
    pub gamma: f64,
    /// Defender cost of processing a suspicious request (ψ^S).
    pub psi_s: f64,
    /// Defender cost of processing a non-suspicious request (ψ^NS).
    pub psi_ns: f64,
    /// Defender cost of allowing a malicious request (φ).
    pub phi: f64,
    /// Malicious app's cost when its request is blocked (τ).
    pub tau: f64,
    /// Defender cost of blocking an honest request (κ).
    pub kappa: f64,
    /// Malicious app's benefit when its request is allowed (α).
    pub alpha: f64,
    /// Defender benefit of blocking a malicious request (β).
    pub beta: f64,
    /// Honest app's benefit when its request is allowed (σ).
    pub sigma: f64,
    /// Malicious app's extra benefit from a suspicious over a non-suspicious
    /// request (u).
    pub u: f64,
    /// Honest app's extra benefit from a suspicious over a non-suspicious
    /// request (v).
    pub v: f64,
}

impl Default for GameParameters {
    /// Canonical defaults. Not calibrated to any real system; chosen so that
    /// every ordering constraint holds strictly and the blocking threshold
    /// κ/(κ+β+φ) = 0.25 is interior, which exercises both branches of every
    /// equilibrium condition.
    fn default() -> Self {
        Self {
            theta: 0.5,
            cost_s: 2.0,
            cost_ns: 1.0,
            gamma: 4.0,
            psi_s: 1.0,
            psi_ns: 0.5,
            phi: 6.0,
            tau: 5.0,
            kappa: 4.0,
            alpha: 10.0,
            beta: 6.0,
            sigma: 8.0,
            u: 3.0,
            v: 2.0,
        }
    }
}

impl GameParameters {
    /// Belief level at which the defender switches from Allow to Block:
    /// κ/(κ+β+φ). Identical for both signals since the processing cost ψ
    /// cancels out of the Block-vs-Allow comparison.
    ///
    /// When κ = β = φ = 0 the defender is indifferent at every belief; the
    /// threshold is reported as 0 by convention.
    pub fn block_threshold(&self) -> f64 {
        let den = self.kappa + self.beta + self.phi;
        if den > 0.0 {
            self.kappa / den
        } else {
            0.0
        }
    }

    /// Same parameters with Nature's probability replaced.
    pub fn with_theta(&self, theta: f64) -> Self {
        Self { theta, ..*self }
    }

    /// Check every parameter invariant, returning all violations.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let fields = [
            ("theta", self.theta),
            ("cost_s", self.cost_s),
            ("cost_ns", self.cost_ns),
            ("gamma", self.gamma),
            ("psi_s", self.psi_s),
            ("psi_ns", self.psi_ns),
            ("phi", self.phi),
            ("tau", self.tau),
            ("kappa", self.kappa),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("sigma", self.sigma),
            ("u", self.u),
            ("v", self.v),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                violations.push(format!("{name} must be finite, got {value}"));
            }
        }
        if !(0.0..=1.0).contains(&self.theta) {
            violations.push(format!("theta in [0,1] violated: theta={}", self.theta));
        }
        if self.cost_ns < 0.0 {
            violations.push(format!("cost_ns >= 0 violated: cost_ns={}", self.cost_ns));
        }
        if self.cost_s < self.cost_ns {
            violations.push(format!(
                "cost_s >= cost_ns violated: cost_s={}, cost_ns={}",
                self.cost_s, self.cost_ns
            ));
        }
        if self.psi_ns < 0.0 {
            violations.push(format!("psi_ns >= 0 violated: psi_ns={}", self.psi_ns));
        }
        if self.psi_s < self.psi_ns {
            violations.push(format!(
                "psi_s >= psi_ns violated: psi_s={}, psi_ns={}",
                self.psi_s, self.psi_ns
            ));
        }
        let nonneg = [
            ("gamma", self.gamma),
            ("phi", self.phi),
            ("tau", self.tau),
            ("kappa", self.kappa),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("sigma", self.sigma),
            ("u", self.u),
            ("v", self.v),
        ];
        for (name, value) in nonneg {
            if value < 0.0 {
                violations.push(format!("{name} >= 0 violated: {name}={value}"));
            }
        }
        ValidationReport { violations }
    }
}

/// Outcome of [`GameParameters::validate`]. Advisory rather than a hard
/// constructor failure, so sweeps can probe constraint violations on
/// purpose; solver entry points require a clean report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    violations: Vec<String>,
}

impl ValidationReport {
    /// True when no invariant is violated.
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    /// The violated invariants, one message each.
    pub fn violations(&self) -> &[String] {
        &self.violations
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            f.write_str("valid")
        } else {
            f.write_str(&self.violations.join("; "))
        }
    }
}

/// One leaf's utility pair; `app` first, `dm` second.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PayoffPair {
    pub app: f64,
    pub dm: f64,
}

/// A behavior strategy for both players.
///
/// `m` / `n` are the probabilities that the malicious / honest type sends a
/// suspicious request; `y` / `x` are the probabilities that the defender
/// blocks a suspicious / non-suspicious request. Pure strategies are the
/// `{0, 1}` corners.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategyProfile {
    pub m: f64,
    pub n: f64,
    pub y: f64,
    pub x: f64,
}

impl StrategyProfile {
    /// Probability that `t` sends a suspicious request.
    pub fn suspicious_prob(&self, t: AppType) -> f64 {
        match t {
            AppType::Malicious => self.m,
            AppType::Honest => self.n,
        }
    }

    /// Probability that the defender blocks signal `s`.
    pub fn block_prob(&self, s: Signal) -> f64 {
        match s {
            Signal::Suspicious => self.y,
            Signal::NonSuspicious => self.x,
        }
    }

    /// True when all four components lie in `[0, 1]`.
    pub fn is_well_formed(&self) -> bool {
        [self.m, self.n, self.y, self.x]
            .iter()
            .all(|c| (0.0..=1.0).contains(c))
    }
}

/// The stage-game payoff pair at leaf `(t, s, a)`.
///
/// The full table, with the app's utility first:
///
/// | leaf        | app          | dm        |
/// |-------------|--------------|-----------|
/// | (MA, S, B)  | −τ           | β − ψ^S   |
/// | (MA, S, A)  | α + u − c^S  | −φ − ψ^S  |
/// | (MA, NS, B) | −τ           | β − ψ^NS  |
/// | (MA, NS, A) | α − c^NS     | −φ − ψ^NS |
/// | (HA, S, B)  | −γ           | −κ − ψ^S  |
/// | (HA, S, A)  | σ + v − c^S  | −ψ^S      |
/// | (HA, NS, B) | −γ           | −κ − ψ^NS |
/// | (HA, NS, A) | σ − c^NS     | −ψ^NS     |
pub fn payoff(params: &GameParameters, t: AppType, s: Signal, a: DmAction) -> PayoffPair {
    let app_cost = match s {
        Signal::Suspicious => params.cost_s,
        Signal::NonSuspicious => params.cost_ns,
    };
    let dm_cost = match s {
        Signal::Suspicious => params.psi_s,
        Signal::NonSuspicious => params.psi_ns,
    };
    match (t, a) {
        (AppType::Malicious, DmAction::Block) => PayoffPair {
            app: -params.tau,
            dm: params.beta - dm_cost,
        },
        (AppType::Malicious, DmAction::Allow) => {
            let bonus = if s == Signal::Suspicious { params.u } else { 0.0 };
            PayoffPair {
                app: params.alpha + bonus - app_cost,
                dm: -params.phi - dm_cost,
            }
        }
        (AppType::Honest, DmAction::Block) => PayoffPair {
            app: -params.gamma,
            dm: -params.kappa - dm_cost,
        },
        (AppType::Honest, DmAction::Allow) => {
            let bonus = if s == Signal::Suspicious { params.v } else { 0.0 };
            PayoffPair {
                app: params.sigma + bonus - app_cost,
                dm: -dm_cost,
            }
        }
    }
}

/// Expected utility for type `t` of sending `s` when the defender blocks that
/// signal with probability `block_prob`.
pub fn app_signal_utility(params: &GameParameters, t: AppType, s: Signal, block_prob: f64) -> f64 {
    block_prob * payoff(params, t, s, DmAction::Block).app
        + (1.0 - block_prob) * payoff(params, t, s, DmAction::Allow).app
}

/// Expected payoffs under a behavior strategy profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectedPayoffs {
    /// Malicious type's expected utility (conditional on being malicious).
    pub ma: f64,
    /// Honest type's expected utility (conditional on being honest).
    pub ha: f64,
    /// Defender's ex-ante expected utility: the θ-weighted sum over Nature,
    /// signals, and actions of the eight leaves.
    pub dm: f64,
}

/// Expected utilities of all players under `profile`.
///
/// Multilinear in each of `m`, `n`, `y`, `x`; at a pure corner it reproduces
/// the corresponding leaf values.
pub fn expected_payoffs(params: &GameParameters, profile: &StrategyProfile) -> ExpectedPayoffs {
    let ma = profile.m
        * app_signal_utility(params, AppType::Malicious, Signal::Suspicious, profile.y)
        + (1.0 - profile.m)
            * app_signal_utility(params, AppType::Malicious, Signal::NonSuspicious, profile.x);
    let ha = profile.n * app_signal_utility(params, AppType::Honest, Signal::Suspicious, profile.y)
        + (1.0 - profile.n)
            * app_signal_utility(params, AppType::Honest, Signal::NonSuspicious, profile.x);

    let mut dm = 0.0;
    for (t, t_prob) in [
        (AppType::Malicious, params.theta),
        (AppType::Honest, 1.0 - params.theta),
    ] {
        let s_prob = profile.suspicious_prob(t);
        for (s, reach) in [
            (Signal::Suspicious, s_prob),
            (Signal::NonSuspicious, 1.0 - s_prob),
        ] {
            let block = profile.block_prob(s);
            for (a, a_prob) in [(DmAction::Block, block), (DmAction::Allow, 1.0 - block)] {
                dm += t_prob * reach * a_prob * payoff(params, t, s, a).dm;
            }
        }
    }
    ExpectedPayoffs { ma, ha, dm }
}
