//! Run configuration: one flat flag set shared by every pipeline command.

use anyhow::{bail, Context};
use clap::{Parser, ValueEnum};
use ranklab_core::market::MarketModel;
use ranklab_core::portfolio::BaselineTheta;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Estimate the market parameters from a price panel.
    CalibrateMarket,
    /// Estimate the baseline position counts by simulated moments.
    CalibrateTheta,
    /// Joint Sharpe-equality test (on data, or as a simulated level study).
    TestSharpe,
    /// Solve the rank-optimization policy by backward induction.
    SolvePolicy,
    /// Tournament Monte Carlo (stylized or bootstrap environment).
    RunArena,
    /// Descriptive diagnostics of submitted portfolios.
    Empirics,
    /// Full pipeline: every table and figure series this toolkit produces.
    ReproduceAll,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ArenaEnv {
    Stylized,
    Bootstrap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FocalKind {
    Baseline,
    Tangency,
    RankOpt,
    Bootstrapped,
}

/// Tournament simulation and inference pipelines.
///
/// Every run is a pure function of its inputs and --seed; all outputs are
/// CSV files (plus a JSON manifest) under --out.
#[derive(Debug, Clone, Parser)]
#[command(name = "ranklab", version, about)]
pub struct RunConfig {
    /// Pipeline to run.
    #[arg(long)]
    pub cmd: Command,

    /// Daily close prices CSV (date,asset_id,close).
    #[arg(long)]
    pub prices: Option<PathBuf>,

    /// Submitted weights CSV (team_id,interval,asset_id,weight).
    #[arg(long)]
    pub submissions: Option<PathBuf>,

    /// Leaderboard CSV (team_id,window,ir,rank), an alternative
    /// calibrate-theta input.
    #[arg(long)]
    pub leaderboard: Option<PathBuf>,

    /// Market parameters as a key=value file; defaults to the stylized
    /// competition calibration when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Precomputed policy CSV (m,delta,beta_plus,value) for rank-opt focal
    /// strategies.
    #[arg(long)]
    pub policy: Option<PathBuf>,

    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,

    /// RNG seed; mandatory, never defaulted from the clock.
    #[arg(long)]
    pub seed: u64,

    /// Replication count (arena replications, level-study replications).
    #[arg(long)]
    pub reps: Option<usize>,

    /// Wild-bootstrap draws.
    #[arg(long)]
    pub boot: Option<usize>,

    /// Simulated panels per (theta, interval) in the moment matching.
    #[arg(long, default_value_t = 1000)]
    pub n_sim: usize,

    /// Simulated paths per transition-kernel cell.
    #[arg(long, default_value_t = 10_000)]
    pub paths: usize,

    /// Comma-separated test levels.
    #[arg(long, default_value = "0.01,0.05,0.1", value_parser = parse_alphas)]
    pub alpha: Alphas,

    /// Target rank of the optimization policy.
    #[arg(long, default_value_t = 1)]
    pub q: usize,

    /// Team count of simulated competitions.
    #[arg(long, default_value_t = 163)]
    pub k: usize,

    /// Predictability share for tangency focal strategies.
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,

    /// Arena environment.
    #[arg(long, value_enum, default_value_t = ArenaEnv::Stylized)]
    pub env: ArenaEnv,

    /// Focal strategy.
    #[arg(long, value_enum, default_value_t = FocalKind::Baseline)]
    pub focal: FocalKind,

    /// Baseline position counts n_plus,n_zero,n_minus.
    #[arg(long, default_value = "38,29,33", value_parser = parse_theta)]
    pub theta: ThetaArg,

    /// Run the simulated level study instead of the data test.
    #[arg(long, default_value_t = false)]
    pub level_study: bool,

    /// Reduced replication counts for a quick full pipeline.
    #[arg(long, default_value_t = false)]
    pub desk_scale: bool,

    /// Treat ingestion validation warnings as errors.
    #[arg(long, default_value_t = false)]
    pub strict: bool,

    /// Number of submission intervals in ingested data.
    #[arg(long, default_value_t = 12)]
    pub intervals: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Alphas(pub Vec<f64>);

fn parse_alphas(s: &str) -> Result<Alphas, String> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let a: f64 = part.trim().parse().map_err(|e| format!("bad alpha {part:?}: {e}"))?;
        if !(0.0..1.0).contains(&a) || a == 0.0 {
            return Err(format!("alpha {a} outside (0, 1)"));
        }
        out.push(a);
    }
    if out.is_empty() {
        return Err("need at least one alpha".into());
    }
    Ok(Alphas(out))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThetaArg(pub usize, pub usize, pub usize);

fn parse_theta(s: &str) -> Result<ThetaArg, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err("theta must be n_plus,n_zero,n_minus".into());
    }
    let vals: Vec<usize> = parts
        .iter()
        .map(|p| p.trim().parse().map_err(|e| format!("bad count {p:?}: {e}")))
        .collect::<Result<_, String>>()?;
    Ok(ThetaArg(vals[0], vals[1], vals[2]))
}

impl RunConfig {
    /// Market model from --config, or the stylized competition defaults.
    pub fn market_model(&self) -> anyhow::Result<MarketModel> {
        match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                Ok(ranklab_core::io::parse_market_config(&text)?)
            }
            None => Ok(MarketModel::competition_default(0.0)?),
        }
    }

    pub fn baseline_theta(&self) -> anyhow::Result<BaselineTheta> {
        let ThetaArg(p, z, m) = self.theta;
        Ok(BaselineTheta::new(p, z, m)?)
    }

    pub fn require_prices(&self) -> anyhow::Result<&PathBuf> {
        match &self.prices {
            Some(p) => Ok(p),
            None => bail!("this command requires --prices"),
        }
    }

    pub fn require_submissions(&self) -> anyhow::Result<&PathBuf> {
        match &self.submissions {
            Some(p) => Ok(p),
            None => bail!("this command requires --submissions"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_minimal_command_line() {
        let cfg = RunConfig::parse_from([
            "ranklab",
            "--cmd",
            "run-arena",
            "--out",
            "/tmp/x",
            "--seed",
            "7",
        ]);
        assert_eq!(cfg.cmd, Command::RunArena);
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.alpha.0, vec![0.01, 0.05, 0.1]);
        assert_eq!(cfg.k, 163);
    }

    #[test]
    fn rejects_missing_seed() {
        let res = RunConfig::try_parse_from(["ranklab", "--cmd", "empirics", "--out", "/tmp/x"]);
        assert!(res.is_err());
    }

    #[test]
    fn parses_alpha_lists_and_theta() {
        let cfg = RunConfig::parse_from([
            "ranklab",
            "--cmd",
            "test-sharpe",
            "--out",
            "/tmp/x",
            "--seed",
            "1",
            "--alpha",
            "0.05,0.1",
            "--theta",
            "50,20,30",
        ]);
        assert_eq!(cfg.alpha.0, vec![0.05, 0.1]);
        assert_eq!(cfg.theta, ThetaArg(50, 20, 30));
        assert!(RunConfig::try_parse_from([
            "ranklab", "--cmd", "test-sharpe", "--out", "x", "--seed", "1", "--alpha", "1.5",
        ])
        .is_err());
    }
}
