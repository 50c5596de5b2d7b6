//! Config loading and the CSV-writing commands behind the `sasg` binary.
//!
//! One JSON config drives one command per invocation. Unknown keys are
//! errors, not warnings, so a misspelled parameter (`psi_s` vs `psi_ns`)
//! cannot silently fall back to a default. All CSV output uses `.` decimals,
//! `,` separators, `\n` line endings, and always writes a header; floats are
//! written in the shortest form that parses back to the identical value, so
//! files are byte-stable golden-test material.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::equilibria::{enumerate_pure_pbne, solve_mixed, EnumerateOptions, PbneProfile};
use crate::game::GameParameters;
use crate::simulate::{
    expected_sweep, run_repeated, run_sweep, RepeatedGameConfig, RepeatedGameTrace, Scenario,
    SweepConfig,
};

/// Exit code for configuration problems (parse errors, invariant
/// violations, unwritable paths).
pub const EXIT_CONFIG: u8 = 2;
/// Exit code for an internal verification failure: an emitted profile
/// failed its own oracle.
pub const EXIT_VERIFICATION: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("verification failure: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => EXIT_CONFIG,
            Self::Verification(_) => EXIT_VERIFICATION,
        }
    }
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Top-level run configuration: shared parameters plus exactly one command
/// block.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: GameParameters,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub enumerate: Option<EnumerateBlock>,
    #[serde(default)]
    pub sweep: Option<SweepBlock>,
    #[serde(default)]
    pub repeated: Option<RepeatedBlock>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnumerateBlock {
    /// Indifference tolerance; `SAG_EPS` takes precedence, then this, then
    /// the crate default.
    #[serde(default)]
    pub eps: Option<f64>,
    /// Candidate sustaining beliefs for unreached information sets; default
    /// `{0, kappa/(kappa+beta+phi), 1}`.
    #[serde(default)]
    pub off_path_beliefs: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub scenario: Scenario,
    pub theta_grid: Vec<f64>,
    #[serde(default = "default_iterations")]
    pub iterations_per_point: u32,
    #[serde(default = "default_off_path_belief")]
    pub off_path_belief: f64,
}

fn default_iterations() -> u32 {
    500
}

fn default_off_path_belief() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepeatedBlock {
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_horizon")]
    pub horizon: u32,
    #[serde(default = "default_reset_interval")]
    pub reset_interval: u32,
    #[serde(default = "default_deviation_offset")]
    pub deviation_stage_offset: u32,
    #[serde(default = "default_ma_suspicious_prob")]
    pub ma_suspicious_prob: f64,
    #[serde(default = "default_use_discounting")]
    pub use_discounting: bool,
}

fn default_delta() -> f64 {
    1.0
}

fn default_horizon() -> u32 {
    1000
}

fn default_reset_interval() -> u32 {
    100
}

fn default_deviation_offset() -> u32 {
    50
}

fn default_ma_suspicious_prob() -> f64 {
    0.5
}

fn default_use_discounting() -> bool {
    true
}

/// The command a config is for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Enumerate,
    Sweep,
    Repeated,
}

impl CommandKind {
    fn name(&self) -> &'static str {
        match self {
            Self::Enumerate => "enumerate",
            Self::Sweep => "sweep",
            Self::Repeated => "repeated",
        }
    }
}

/// Parse a config file and check that exactly one command block is present
/// and that it matches the requested command.
pub fn load_config(path: &Path, command: CommandKind) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
    let cfg: RunConfig = serde_json::from_str(&text)
        .map_err(|e| config_err(format!("cannot parse {}: {e}", path.display())))?;
    let blocks = [
        cfg.enumerate.is_some(),
        cfg.sweep.is_some(),
        cfg.repeated.is_some(),
    ];
    let active = blocks.iter().filter(|b| **b).count();
    if active != 1 {
        return Err(config_err(format!(
            "exactly one of the enumerate/sweep/repeated blocks must be present, found {active}"
        )));
    }
    let matches = match command {
        CommandKind::Enumerate => cfg.enumerate.is_some(),
        CommandKind::Sweep => cfg.sweep.is_some(),
        CommandKind::Repeated => cfg.repeated.is_some(),
    };
    if !matches {
        return Err(config_err(format!(
            "config has no `{}` block for the {} command",
            command.name(),
            command.name()
        )));
    }
    Ok(cfg)
}

/// Validated parameters or a config error naming every violated invariant.
fn require_valid_params(params: &GameParameters) -> Result<(), CliError> {
    let report = params.validate();
    if report.is_valid() {
        Ok(())
    } else {
        Err(config_err(format!("invalid params: {report}")))
    }
}

/// Effective indifference tolerance: `SAG_EPS` env var, then the config
/// value, then the crate default.
pub fn effective_eps(block_eps: Option<f64>) -> Result<f64, CliError> {
    if let Ok(raw) = std::env::var("SAG_EPS") {
        let eps: f64 = raw
            .parse()
            .map_err(|_| config_err(format!("SAG_EPS must be a float, got {raw:?}")))?;
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(config_err(format!("SAG_EPS must be finite and >= 0, got {eps}")));
        }
        return Ok(eps);
    }
    Ok(block_eps.unwrap_or(crate::DEFAULT_EPS))
}

fn ensure_out_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| config_err(format!("cannot create output dir {}: {e}", dir.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let mut f = fs::File::create(path)
        .map_err(|e| config_err(format!("cannot write {}: {e}", path.display())))?;
    f.write_all(bytes)
        .map_err(|e| config_err(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

/// Shortest decimal form that parses back to the identical f64.
fn fmt_f64(v: f64) -> String {
    let mut buf = ryu_format(v);
    // Keep integral values readable ("5" rather than "5.0" is ambiguous to
    // some readers; keep ryu's canonical "5.0").
    if buf == "-0.0" {
        buf = "0.0".to_string();
    }
    buf
}

fn ryu_format(v: f64) -> String {
    let mut writer = csv::WriterBuilder::new().from_writer(vec![]);
    writer.serialize((v,)).expect("in-memory write");
    let bytes = writer.into_inner().expect("in-memory flush");
    String::from_utf8(bytes).expect("utf8").trim_end().to_string()
}

#[derive(Serialize)]
struct SweepCsvRow {
    theta: f64,
    avg_payoff_ma: Option<f64>,
    avg_payoff_ha: Option<f64>,
    avg_eu_dm: f64,
    n_ma_samples: u32,
    n_ha_samples: u32,
}

#[derive(Serialize)]
struct ExpectedCsvRow {
    theta: f64,
    avg_payoff_ma: f64,
    avg_payoff_ha: f64,
    avg_eu_dm: f64,
}

#[derive(Serialize)]
struct TraceCsvRow {
    stage: u32,
    #[serde(rename = "type")]
    app_type: String,
    signal: String,
    action: String,
    regime: String,
    u_ma: f64,
    u_ha: f64,
    u_dm: f64,
    cum_ma: f64,
    cum_ha: f64,
    cum_dm: f64,
}

fn csv_bytes<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Vec<u8> {
    let mut writer = csv::WriterBuilder::new().from_writer(vec![]);
    for row in rows {
        writer.serialize(row).expect("in-memory CSV write");
    }
    writer.into_inner().expect("in-memory CSV flush")
}

/// Write `pbne.csv` and report the enumeration on stdout.
///
/// Every row must carry `verified=true`; otherwise the error maps to exit
/// code 3 after the file (including the failing rows) has been written.
pub fn cmd_enumerate(cfg: &RunConfig, out_dir: &Path) -> Result<(), CliError> {
    let block = cfg.enumerate.as_ref().expect("checked by load_config");
    require_valid_params(&cfg.params)?;
    let eps = effective_eps(block.eps)?;
    if let Some(grid) = &block.off_path_beliefs {
        if grid.is_empty() || grid.iter().any(|b| !(0.0..=1.0).contains(b)) {
            return Err(config_err("off_path_beliefs must be a non-empty list within [0,1]"));
        }
    }
    let opts = EnumerateOptions { eps, off_path_beliefs: block.off_path_beliefs.clone() };
    let profiles = enumerate_pure_pbne(&cfg.params, &opts);

    ensure_out_dir(out_dir)?;
    let mut writer = csv::WriterBuilder::new().from_writer(vec![]);
    writer
        .write_record([
            "category",
            "m",
            "n",
            "y",
            "x",
            "q",
            "p",
            "conditions",
            "off_path_support",
            "verified",
        ])
        .expect("in-memory CSV write");
    for e in &profiles {
        writer
            .write_record([
                e.category.to_string(),
                fmt_f64(e.strategy.m),
                fmt_f64(e.strategy.n),
                fmt_f64(e.strategy.y),
                fmt_f64(e.strategy.x),
                fmt_f64(e.beliefs.q),
                fmt_f64(e.beliefs.p),
                e.conditions.join("; "),
                e.off_path_support.map(|s| s.to_string()).unwrap_or_default(),
                e.verified.to_string(),
            ])
            .expect("in-memory CSV write");
    }
    let bytes = writer.into_inner().expect("in-memory CSV flush");
    write_file(&out_dir.join("pbne.csv"), &bytes)?;

    print_enumeration_summary(cfg, &profiles, eps);

    let failed: Vec<_> = profiles.iter().filter(|e| !e.verified).collect();
    if !failed.is_empty() {
        return Err(CliError::Verification(format!(
            "{} emitted profile(s) failed the deviation oracle",
            failed.len()
        )));
    }
    Ok(())
}

fn print_enumeration_summary(cfg: &RunConfig, profiles: &[PbneProfile], eps: f64) {
    let count = |c| profiles.iter().filter(|e| e.category == c).count();
    use crate::equilibria::PbneCategory::*;
    println!(
        "enumerated {} equilibria at theta={} (threshold {}): {} pooling, {} hybrid, {} separating",
        profiles.len(),
        cfg.params.theta,
        cfg.params.block_threshold(),
        count(Pooling),
        count(Hybrid),
        count(Separating),
    );
    match solve_mixed(&cfg.params, eps) {
        Ok(mixed) => println!(
            "mixed equilibrium: DM mixes (y={}, x={}), posteriors pinned at {}, sender family m = n = {}",
            mixed.y, mixed.x, mixed.q_star, mixed.m_family
        ),
        Err(e) => println!("mixed equilibrium: none ({e})"),
    }
}

/// Write `sweep_<scenario>.csv` plus the closed-form
/// `sweep_<scenario>_expected.csv`.
pub fn cmd_sweep(cfg: &RunConfig, out_dir: &Path, seed: u64) -> Result<(), CliError> {
    let block = cfg.sweep.as_ref().expect("checked by load_config");
    require_valid_params(&cfg.params)?;
    let sweep_cfg = SweepConfig {
        params: cfg.params,
        scenario: block.scenario,
        theta_grid: block.theta_grid.clone(),
        iterations_per_point: block.iterations_per_point,
        seed,
        off_path_belief: block.off_path_belief,
    };
    let rows = run_sweep(&sweep_cfg).map_err(|e| config_err(e.to_string()))?;
    let expected = expected_sweep(&sweep_cfg).map_err(|e| config_err(e.to_string()))?;

    ensure_out_dir(out_dir)?;
    let bytes = csv_bytes(rows.iter().map(|r| SweepCsvRow {
        theta: r.theta,
        avg_payoff_ma: r.avg_payoff_ma,
        avg_payoff_ha: r.avg_payoff_ha,
        avg_eu_dm: r.avg_eu_dm,
        n_ma_samples: r.n_ma_samples,
        n_ha_samples: r.n_ha_samples,
    }));
    let name = format!("sweep_{}.csv", block.scenario.slug());
    write_file(&out_dir.join(&name), &bytes)?;

    let bytes = csv_bytes(expected.iter().map(|r| ExpectedCsvRow {
        theta: r.theta,
        avg_payoff_ma: r.payoff_ma,
        avg_payoff_ha: r.payoff_ha,
        avg_eu_dm: r.eu_dm,
    }));
    let expected_name = format!("sweep_{}_expected.csv", block.scenario.slug());
    write_file(&out_dir.join(&expected_name), &bytes)?;

    println!(
        "swept {} over {} grid points x {} iterations (seed {seed}) -> {name}, {expected_name}",
        block.scenario,
        rows.len(),
        block.iterations_per_point
    );
    Ok(())
}

/// Write `repeated_trace.csv` and `repeated_summary.csv`.
pub fn cmd_repeated(cfg: &RunConfig, out_dir: &Path, seed: u64) -> Result<(), CliError> {
    let block = cfg.repeated.as_ref().expect("checked by load_config");
    require_valid_params(&cfg.params)?;
    let run_cfg = RepeatedGameConfig {
        params: cfg.params,
        delta: block.delta,
        horizon: block.horizon,
        reset_interval: block.reset_interval,
        deviation_stage_offset: block.deviation_stage_offset,
        ma_suspicious_prob: block.ma_suspicious_prob,
        use_discounting: block.use_discounting,
        seed,
    };
    let trace = run_repeated(&run_cfg).map_err(|e| config_err(e.to_string()))?;

    ensure_out_dir(out_dir)?;
    let bytes = csv_bytes(trace.stages.iter().map(|rec| {
        let cum = if block.use_discounting { rec.cum_discounted } else { rec.cum_plain };
        TraceCsvRow {
            stage: rec.stage,
            app_type: rec.app_type.to_string(),
            signal: rec.signal.to_string(),
            action: rec.action.to_string(),
            regime: rec.regime.to_string(),
            u_ma: rec.u_ma,
            u_ha: rec.u_ha,
            u_dm: rec.u_dm,
            cum_ma: cum.ma,
            cum_ha: cum.ha,
            cum_dm: cum.dm,
        }
    }));
    write_file(&out_dir.join("repeated_trace.csv"), &bytes)?;
    write_file(&out_dir.join("repeated_summary.csv"), &summary_csv(&trace))?;

    println!(
        "repeated game over {} stages (delta={}, seed {seed}): final cum MA={} HA={} DM={}",
        block.horizon,
        block.delta,
        fmt_f64(trace.final_discounted.ma),
        fmt_f64(trace.final_discounted.ha),
        fmt_f64(trace.final_discounted.dm),
    );
    Ok(())
}

fn summary_csv(trace: &RepeatedGameTrace) -> Vec<u8> {
    #[derive(Serialize)]
    struct SummaryRow {
        quantity: &'static str,
        ma: f64,
        ha: f64,
        dm: f64,
    }
    csv_bytes([
        SummaryRow {
            quantity: "final_cumulative_discounted",
            ma: trace.final_discounted.ma,
            ha: trace.final_discounted.ha,
            dm: trace.final_discounted.dm,
        },
        SummaryRow {
            quantity: "final_cumulative_plain",
            ma: trace.final_plain.ma,
            ha: trace.final_plain.ha,
            dm: trace.final_plain.dm,
        },
        SummaryRow {
            quantity: "normalized_average",
            ma: trace.normalized.ma,
            ha: trace.normalized.ha,
            dm: trace.normalized.dm,
        },
    ])
}
