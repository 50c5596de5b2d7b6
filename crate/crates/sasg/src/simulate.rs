//! Seeded Monte Carlo sweeps and the infinitely repeated game.
//!
//! Sweeps replay one of four single-stage strategy scenarios across a grid
//! of Nature's probabilities and report per-type conditional payoff averages
//! next to the defender's average utility. [`expected_sweep`] provides the
//! closed-form expectations the Monte Carlo estimates, for use as a
//! statistical oracle. The repeated game plays a reward/punishment pair with
//! a periodic strategy reset and an honest-type deviation inside each
//! interval, with discounted and plain cumulative utilities recorded per
//! stage.
//!
//! Everything is driven by a counter-based RNG with one substream per grid
//! point, so identical configs produce bit-identical output regardless of
//! evaluation order.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::beliefs::{bayes_update, dm_expected_utilities};
use crate::game::{payoff, AppType, DmAction, GameParameters, Signal, StrategyProfile};

/// The four single-stage strategy scenarios a sweep can replay.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// Malicious sends S, honest sends NS; the defender plays the matching
    /// best response (Block on S, Allow on NS).
    SeparatingSns,
    /// Both types send S; the defender best-responds at the pooled posterior
    /// `q = theta`.
    PoolingSs,
    /// Honest sends S; malicious mixes with a fresh uniform `m` each
    /// iteration; the defender best-responds at the implied Bayes beliefs.
    HybridMsHs,
    /// All of `m, n, y, x` are drawn uniformly each iteration.
    MixedRandom,
}

impl Scenario {
    /// Stable name used in output file names.
    pub fn slug(&self) -> &'static str {
        match self {
            Self::SeparatingSns => "separating_sns",
            Self::PoolingSs => "pooling_ss",
            Self::HybridMsHs => "hybrid_ms_hs",
            Self::MixedRandom => "mixed_random",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

/// Configuration of a Monte Carlo θ-sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    pub params: GameParameters,
    pub scenario: Scenario,
    /// Strictly increasing grid of Nature's probabilities; each grid value
    /// replaces `params.theta` at its point.
    pub theta_grid: Vec<f64>,
    pub iterations_per_point: u32,
    pub seed: u64,
    /// Belief used at an information set the scenario never reaches.
    pub off_path_belief: f64,
}

impl SweepConfig {
    /// A sweep of `scenario` over the standard 0.0..=1.0 grid in steps of
    /// 0.1, 500 iterations per point.
    pub fn standard(params: GameParameters, scenario: Scenario, seed: u64) -> Self {
        Self {
            params,
            scenario,
            theta_grid: (0..=10).map(|k| k as f64 / 10.0).collect(),
            iterations_per_point: 500,
            seed,
            off_path_belief: 1.0,
        }
    }

    fn validate(&self) -> Result<(), SimError> {
        let report = self.params.validate();
        if !report.is_valid() {
            return Err(SimError::InvalidParams(report.to_string()));
        }
        if self.theta_grid.is_empty() {
            return Err(SimError::InvalidConfig("theta_grid must be non-empty".into()));
        }
        for w in self.theta_grid.windows(2) {
            if w[1] <= w[0] {
                return Err(SimError::InvalidConfig(format!(
                    "theta_grid must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        if self.theta_grid.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return Err(SimError::InvalidConfig("theta_grid values must lie in [0,1]".into()));
        }
        if self.iterations_per_point < 1 {
            return Err(SimError::InvalidConfig("iterations_per_point must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.off_path_belief) {
            return Err(SimError::InvalidConfig("off_path_belief must lie in [0,1]".into()));
        }
        Ok(())
    }
}

/// One grid point of a sweep. Per-type averages are conditional on the type
/// actually being drawn; a cell with zero samples is reported as absent
/// rather than zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub theta: f64,
    pub avg_payoff_ma: Option<f64>,
    pub avg_payoff_ha: Option<f64>,
    pub avg_eu_dm: f64,
    pub n_ma_samples: u32,
    pub n_ha_samples: u32,
    /// Sample standard errors, for statistical comparison against
    /// [`expected_sweep`]. Absent below two samples.
    pub stderr_ma: Option<f64>,
    pub stderr_ha: Option<f64>,
    pub stderr_dm: Option<f64>,
}

/// One grid point of the closed-form oracle. Per-type values are the exact
/// conditional expectations, well-defined even where the Monte Carlo cell
/// would be empty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectedRow {
    pub theta: f64,
    pub payoff_ma: f64,
    pub payoff_ha: f64,
    pub eu_dm: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid game parameters: {0}")]
    InvalidParams(String),
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
}

#[derive(Default)]
struct RunningStats {
    n: u32,
    sum: f64,
    sumsq: f64,
}

impl RunningStats {
    fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sumsq += x * x;
    }

    fn mean(&self) -> Option<f64> {
        (self.n > 0).then(|| self.sum / self.n as f64)
    }

    fn stderr(&self) -> Option<f64> {
        if self.n < 2 {
            return None;
        }
        let n = self.n as f64;
        let var = ((self.sumsq - self.sum * self.sum / n) / (n - 1.0)).max(0.0);
        Some((var / n).sqrt())
    }
}

/// Defender blocks iff blocking is weakly better at this belief. Ties
/// resolve to Block, matching the non-strict inequality in the pooling
/// equilibrium condition.
fn dm_blocks(params: &GameParameters, s: Signal, belief: f64) -> bool {
    let (eu_block, eu_allow) = dm_expected_utilities(params, s, belief);
    eu_block >= eu_allow
}

/// Run the Monte Carlo sweep. Deterministic given `(config, seed)`: each
/// grid point owns RNG substream `point_index`, and within an iteration the
/// draw order is fixed (scenario mixing first, then type, signal, action).
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>, SimError> {
    cfg.validate()?;
    let mut rows = Vec::with_capacity(cfg.theta_grid.len());
    for (idx, &theta) in cfg.theta_grid.iter().enumerate() {
        let params = cfg.params.with_theta(theta);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(idx as u64);
        let mut ma = RunningStats::default();
        let mut ha = RunningStats::default();
        let mut dm = RunningStats::default();
        for _ in 0..cfg.iterations_per_point {
            let (t, s, a) = play_stage(cfg.scenario, &params, cfg.off_path_belief, &mut rng);
            let pay = payoff(&params, t, s, a);
            match t {
                AppType::Malicious => ma.push(pay.app),
                AppType::Honest => ha.push(pay.app),
            }
            dm.push(pay.dm);
        }
        rows.push(SweepRow {
            theta,
            avg_payoff_ma: ma.mean(),
            avg_payoff_ha: ha.mean(),
            avg_eu_dm: dm.mean().expect("iterations_per_point >= 1"),
            n_ma_samples: ma.n,
            n_ha_samples: ha.n,
            stderr_ma: ma.stderr(),
            stderr_ha: ha.stderr(),
            stderr_dm: dm.stderr(),
        });
    }
    Ok(rows)
}

fn play_stage(
    scenario: Scenario,
    params: &GameParameters,
    off_path_belief: f64,
    rng: &mut ChaCha8Rng,
) -> (AppType, Signal, DmAction) {
    let theta = params.theta;
    let draw_type =
        |rng: &mut ChaCha8Rng| if rng.gen_bool(theta) { AppType::Malicious } else { AppType::Honest };
    match scenario {
        Scenario::SeparatingSns => {
            let t = draw_type(rng);
            let s = match t {
                AppType::Malicious => Signal::Suspicious,
                AppType::Honest => Signal::NonSuspicious,
            };
            // Best response to the separating beliefs q = 1, p = 0.
            let a = match s {
                Signal::Suspicious => DmAction::Block,
                Signal::NonSuspicious => DmAction::Allow,
            };
            (t, s, a)
        }
        Scenario::PoolingSs => {
            let t = draw_type(rng);
            let s = Signal::Suspicious;
            let a = if dm_blocks(params, s, theta) { DmAction::Block } else { DmAction::Allow };
            (t, s, a)
        }
        Scenario::HybridMsHs => {
            let m = rng.gen::<f64>();
            let t = draw_type(rng);
            let s = match t {
                AppType::Malicious => {
                    if rng.gen_bool(m) {
                        Signal::Suspicious
                    } else {
                        Signal::NonSuspicious
                    }
                }
                AppType::Honest => Signal::Suspicious,
            };
            let beliefs = bayes_update(theta, m, 1.0, off_path_belief, off_path_belief);
            let belief = match s {
                Signal::Suspicious => beliefs.q,
                Signal::NonSuspicious => beliefs.p,
            };
            let a = if dm_blocks(params, s, belief) { DmAction::Block } else { DmAction::Allow };
            (t, s, a)
        }
        Scenario::MixedRandom => {
            let profile = StrategyProfile {
                m: rng.gen::<f64>(),
                n: rng.gen::<f64>(),
                y: rng.gen::<f64>(),
                x: rng.gen::<f64>(),
            };
            let t = draw_type(rng);
            let s = if rng.gen_bool(profile.suspicious_prob(t)) {
                Signal::Suspicious
            } else {
                Signal::NonSuspicious
            };
            let a = if rng.gen_bool(profile.block_prob(s)) {
                DmAction::Block
            } else {
                DmAction::Allow
            };
            (t, s, a)
        }
    }
}

/// Fraction of the uniform `m` draw on which the defender allows a
/// suspicious request in the hybrid scenario, i.e. the measure of
/// `{m : q(m) < threshold}` where `q(m) = mθ / (mθ + (1−θ))`.
fn hybrid_allow_measure(params: &GameParameters) -> f64 {
    let theta = params.theta;
    let den = params.kappa + params.beta + params.phi;
    if theta >= 1.0 {
        // q = 1 everywhere; Block iff beta + phi >= 0, always true.
        return 0.0;
    }
    if den <= 0.0 {
        // Indifferent everywhere; ties block.
        return 0.0;
    }
    let thr = params.kappa / den;
    if thr <= 0.0 {
        return 0.0;
    }
    if theta <= 0.0 {
        // q = 0 < thr everywhere.
        return 1.0;
    }
    if thr >= 1.0 {
        // q(m) < 1 for theta < 1.
        return 1.0;
    }
    (thr * (1.0 - theta) / (theta * (1.0 - thr))).clamp(0.0, 1.0)
}

/// Closed-form expectations of [`run_sweep`], cell by cell.
///
/// For fixed pure defender responses the rows are linear in θ; the hybrid
/// scenario integrates over the uniform `m` draw; the mixed scenario's
/// expectation is the multilinear payoff at the mean profile
/// `(0.5, 0.5, 0.5, 0.5)`.
pub fn expected_sweep(cfg: &SweepConfig) -> Result<Vec<ExpectedRow>, SimError> {
    cfg.validate()?;
    let mut rows = Vec::with_capacity(cfg.theta_grid.len());
    for &theta in &cfg.theta_grid {
        let params = cfg.params.with_theta(theta);
        let pay = |t, s, a| payoff(&params, t, s, a);
        use AppType::{Honest, Malicious};
        use DmAction::{Allow, Block};
        use Signal::{NonSuspicious as Ns, Suspicious as S};
        let row = match cfg.scenario {
            Scenario::SeparatingSns => ExpectedRow {
                theta,
                payoff_ma: pay(Malicious, S, Block).app,
                payoff_ha: pay(Honest, Ns, Allow).app,
                eu_dm: theta * pay(Malicious, S, Block).dm
                    + (1.0 - theta) * pay(Honest, Ns, Allow).dm,
            },
            Scenario::PoolingSs => {
                let a = if dm_blocks(&params, S, theta) { Block } else { Allow };
                ExpectedRow {
                    theta,
                    payoff_ma: pay(Malicious, S, a).app,
                    payoff_ha: pay(Honest, S, a).app,
                    eu_dm: theta * pay(Malicious, S, a).dm + (1.0 - theta) * pay(Honest, S, a).dm,
                }
            }
            Scenario::HybridMsHs => {
                // Allow on S for m below the cutoff `c`, Block above; NS is
                // reached only by the malicious type and always blocked
                // (posterior 1). Integrals of m and (1-m) over the two
                // regions give the weights below.
                let c = hybrid_allow_measure(&params);
                let allow_w = c * c / 2.0; // ∫_0^c m dm
                let block_w = (1.0 - c * c) / 2.0; // ∫_c^1 m dm
                let ns_w = 0.5; // ∫_0^1 (1-m) dm
                ExpectedRow {
                    theta,
                    payoff_ma: pay(Malicious, S, Allow).app * allow_w
                        + pay(Malicious, S, Block).app * block_w
                        + pay(Malicious, Ns, Block).app * ns_w,
                    payoff_ha: c * pay(Honest, S, Allow).app + (1.0 - c) * pay(Honest, S, Block).app,
                    eu_dm: theta
                        * (pay(Malicious, S, Allow).dm * allow_w
                            + pay(Malicious, S, Block).dm * block_w
                            + pay(Malicious, Ns, Block).dm * ns_w)
                        + (1.0 - theta)
                            * (c * pay(Honest, S, Allow).dm
                                + (1.0 - c) * pay(Honest, S, Block).dm),
                }
            }
            Scenario::MixedRandom => {
                let mid = StrategyProfile { m: 0.5, n: 0.5, y: 0.5, x: 0.5 };
                let eu = crate::game::expected_payoffs(&params, &mid);
                ExpectedRow { theta, payoff_ma: eu.ma, payoff_ha: eu.ha, eu_dm: eu.dm }
            }
        };
        rows.push(row);
    }
    Ok(rows)
}

/// Which strategy pair is in force at a stage of the repeated game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `{(S,NS), NS, (B, A)}`: malicious mixes, honest sends NS, the
    /// defender blocks S and allows NS.
    Reward,
    /// `{(S,NS), NS, (B, B)}`: the defender blocks everything.
    Punishment,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Reward => f.write_str("reward"),
            Self::Punishment => f.write_str("punishment"),
        }
    }
}

/// Configuration of a repeated-game run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepeatedGameConfig {
    pub params: GameParameters,
    /// Discount factor δ in [0, 1].
    pub delta: f64,
    /// Truncation horizon for the infinite game. Stages past the point where
    /// δ^t underflows the working tolerance contribute nothing.
    pub horizon: u32,
    /// Strategies reset to Reward every this many stages.
    pub reset_interval: u32,
    /// Stage within each interval at which the honest type deviates to S.
    /// The defender observes the deviation in the history at the stage's end
    /// and punishes from the next stage until the interval resets.
    pub deviation_stage_offset: u32,
    /// The malicious type's randomization weight on S under both regimes.
    pub ma_suspicious_prob: f64,
    pub use_discounting: bool,
    pub seed: u64,
}

impl Default for RepeatedGameConfig {
    fn default() -> Self {
        Self {
            params: GameParameters::default(),
            delta: 1.0,
            horizon: 1000,
            reset_interval: 100,
            deviation_stage_offset: 50,
            ma_suspicious_prob: 0.5,
            use_discounting: true,
            seed: 0,
        }
    }
}

impl RepeatedGameConfig {
    fn validate(&self) -> Result<(), SimError> {
        let report = self.params.validate();
        if !report.is_valid() {
            return Err(SimError::InvalidParams(report.to_string()));
        }
        if !(0.0..=1.0).contains(&self.delta) {
            return Err(SimError::InvalidConfig(format!(
                "delta in [0,1] violated: delta={}",
                self.delta
            )));
        }
        if self.horizon < 1 {
            return Err(SimError::InvalidConfig("horizon must be >= 1".into()));
        }
        if self.reset_interval < 2 {
            return Err(SimError::InvalidConfig("reset_interval must be >= 2".into()));
        }
        if self.deviation_stage_offset < 1 || self.deviation_stage_offset >= self.reset_interval {
            return Err(SimError::InvalidConfig(format!(
                "deviation_stage_offset must satisfy 1 <= offset < reset_interval, got {} with interval {}",
                self.deviation_stage_offset, self.reset_interval
            )));
        }
        if !(0.0..=1.0).contains(&self.ma_suspicious_prob) {
            return Err(SimError::InvalidConfig("ma_suspicious_prob must lie in [0,1]".into()));
        }
        Ok(())
    }
}

/// Per-player running totals.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlayerTotals {
    pub ma: f64,
    pub ha: f64,
    pub dm: f64,
}

/// One stage of a repeated-game trace.
#[derive(Debug, Clone, PartialEq)]
pub struct StageRecord {
    /// 1-based stage index.
    pub stage: u32,
    pub app_type: AppType,
    pub signal: Signal,
    pub action: DmAction,
    pub regime: Regime,
    /// True when the honest type's strategy deviates to S this stage.
    pub ha_deviated: bool,
    /// Realized stage payoffs; the type not drawn this stage earns 0.
    pub u_ma: f64,
    pub u_ha: f64,
    pub u_dm: f64,
    /// Discounted cumulative sums `Σ δ^(t−1) u_t` through this stage.
    pub cum_discounted: PlayerTotals,
    /// Plain (undiscounted) cumulative sums through this stage.
    pub cum_plain: PlayerTotals,
}

/// Full trace of a repeated-game run.
#[derive(Debug, Clone, PartialEq)]
pub struct RepeatedGameTrace {
    pub stages: Vec<StageRecord>,
    pub final_discounted: PlayerTotals,
    pub final_plain: PlayerTotals,
    /// Normalized average utilities: `(1−δ) Σ δ^(t−1) u_t` for δ < 1, and
    /// the arithmetic stage mean for δ = 1 (the limit-of-means reading).
    pub normalized: PlayerTotals,
}

/// Simulate the repeated game.
///
/// Each stage is a sequential stage game: Nature draws the type, the sender
/// signals per the active regime, and the defender responds with the
/// regime's mapping. Within each reset interval the honest type's strategy
/// deviates to S at `deviation_stage_offset`; the deviation enters the
/// common history at the stage's end and the defender plays Punishment from
/// the next stage until the interval resets.
pub fn run_repeated(cfg: &RepeatedGameConfig) -> Result<RepeatedGameTrace, SimError> {
    cfg.validate()?;
    let params = &cfg.params;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut stages = Vec::with_capacity(cfg.horizon as usize);
    let mut disc = PlayerTotals::default();
    let mut plain = PlayerTotals::default();
    let mut weight = 1.0;
    for stage in 1..=cfg.horizon {
        let idx = (stage - 1) % cfg.reset_interval + 1;
        let regime = if idx <= cfg.deviation_stage_offset { Regime::Reward } else { Regime::Punishment };
        let ha_deviated = regime == Regime::Reward && idx == cfg.deviation_stage_offset;

        let t = if rng.gen_bool(params.theta) { AppType::Malicious } else { AppType::Honest };
        let s = match t {
            AppType::Malicious => {
                if rng.gen_bool(cfg.ma_suspicious_prob) {
                    Signal::Suspicious
                } else {
                    Signal::NonSuspicious
                }
            }
            AppType::Honest => {
                if ha_deviated {
                    Signal::Suspicious
                } else {
                    Signal::NonSuspicious
                }
            }
        };
        let a = match (regime, s) {
            (Regime::Reward, Signal::Suspicious) => DmAction::Block,
            (Regime::Reward, Signal::NonSuspicious) => DmAction::Allow,
            (Regime::Punishment, _) => DmAction::Block,
        };
        let pay = payoff(params, t, s, a);
        let (u_ma, u_ha) = match t {
            AppType::Malicious => (pay.app, 0.0),
            AppType::Honest => (0.0, pay.app),
        };
        let u_dm = pay.dm;

        disc.ma += weight * u_ma;
        disc.ha += weight * u_ha;
        disc.dm += weight * u_dm;
        plain.ma += u_ma;
        plain.ha += u_ha;
        plain.dm += u_dm;

        stages.push(StageRecord {
            stage,
            app_type: t,
            signal: s,
            action: a,
            regime,
            ha_deviated,
            u_ma,
            u_ha,
            u_dm,
            cum_discounted: disc,
            cum_plain: plain,
        });
        weight *= cfg.delta;
    }

    let normalized = if cfg.delta < 1.0 {
        PlayerTotals {
            ma: (1.0 - cfg.delta) * disc.ma,
            ha: (1.0 - cfg.delta) * disc.ha,
            dm: (1.0 - cfg.delta) * disc.dm,
        }
    } else {
        let t = cfg.horizon as f64;
        PlayerTotals { ma: plain.ma / t, ha: plain.ha / t, dm: plain.dm / t }
    };

    Ok(RepeatedGameTrace { stages, final_discounted: disc, final_plain: plain, normalized })
}
