//! reproduce-all: the full pipeline. Every stage is deterministic in
//! (inputs, flags, seed); stages that need market data are marked skipped
//! when no data is supplied, and synthetic stand-ins keep the simulation
//! stages running either way. Any stage failure aborts with the stage name
//! after writing the partial manifest.

use super::sig;
use crate::config::RunConfig;
use crate::ingest::{self, IngestedPrices};
use crate::manifest::{emit, Manifest};
use anyhow::bail;
use ranklab_core::arena::{
    leaderboard_stats, position_effects, run_bootstrap, run_stylized, simulate_a2_boards,
    ArenaConfig, ArenaReport, BoardIr, FocalStrategy,
};
use ranklab_core::dp_policy::{build_kernel, default_delta_grid, solve, RankPolicy};
use ranklab_core::empirics::{median_split_table, rank_change_profile, team_exposures};
use ranklab_core::io::SubmissionPanel;
use ranklab_core::market::{sample_returns, MarketModel, ReturnPanel};
use ranklab_core::msm::{estimate_theta, MomentTarget};
use ranklab_core::portfolio::BaselineTheta;
use ranklab_core::rng;
use ranklab_core::scoring::ScoreBoard;
use ranklab_core::sharpe_test::{level_study, test_sharpe_equality};
use std::path::PathBuf;

/// Replication counts per pipeline scale.
struct Scale {
    msm_n_sim: usize,
    level_reps: usize,
    level_boot: usize,
    kernel_paths: usize,
    arena_reps: usize,
    bootstrap_reps: usize,
    board_sims: usize,
    position_sims: usize,
}

impl Scale {
    fn from(config: &RunConfig) -> Self {
        if config.desk_scale {
            Self {
                msm_n_sim: config.n_sim.min(200),
                level_reps: config.reps.unwrap_or(200),
                level_boot: config.boot.unwrap_or(100),
                kernel_paths: config.paths.min(2000),
                arena_reps: config.reps.unwrap_or(2000),
                bootstrap_reps: config.reps.unwrap_or(1000),
                board_sims: 300,
                position_sims: 500,
            }
        } else {
            Self {
                msm_n_sim: config.n_sim,
                level_reps: config.reps.unwrap_or(1000),
                level_boot: config.boot.unwrap_or(1000),
                kernel_paths: config.paths,
                arena_reps: config.reps.unwrap_or(100_000),
                bootstrap_reps: config.reps.unwrap_or(10_000),
                board_sims: 10_000,
                position_sims: 2_000,
            }
        }
    }
}

struct Pipeline<'a> {
    config: &'a RunConfig,
    scale: Scale,
    manifest: Manifest,
    data: Option<(IngestedPrices, SubmissionPanel)>,
    model: MarketModel,
    theta: BaselineTheta,
}

pub fn run(config: &RunConfig) -> anyhow::Result<PathBuf> {
    let manifest = Manifest::new("reproduce-all", config.seed, config.desk_scale);
    let scale = Scale::from(config);

    // Ingestion is stage zero: a present-but-broken file is a hard error,
    // an absent file just degrades to the synthetic pipeline.
    let data = match (&config.prices, &config.submissions) {
        (Some(_), Some(_)) => {
            let prices = ingest::load_prices(config)?;
            let subs = ingest::load_submissions(config, &prices)?;
            Some((prices, subs))
        }
        _ => None,
    };

    let mut pipeline = Pipeline {
        config,
        scale,
        manifest,
        data,
        model: config.market_model()?,
        theta: config.baseline_theta()?,
    };
    pipeline.run_all()?;
    pipeline.manifest.finalize(&config.out)
}

macro_rules! stage {
    ($self:ident, $name:expr, $body:expr) => {{
        eprintln!("[reproduce-all] {}", $name);
        match $body {
            Ok(artifacts) => $self.manifest.record_written($name, artifacts),
            Err(e) => {
                $self.manifest.record_failed($name, &format!("{e:#}"));
                let manifest = std::mem::replace(
                    &mut $self.manifest,
                    Manifest::new("reproduce-all", $self.config.seed, $self.config.desk_scale),
                );
                manifest.finalize(&$self.config.out)?;
                bail!("stage {} failed: {e:#}", $name);
            }
        }
    }};
}

impl Pipeline<'_> {
    fn run_all(&mut self) -> anyhow::Result<()> {
        stage!(self, "market", self.stage_market());

        if self.data.is_some() || self.config.leaderboard.is_some() {
            stage!(self, "theta", self.stage_theta());
        } else {
            self.manifest.record_skipped("theta", "needs --submissions or --leaderboard");
        }

        stage!(self, "leaderboard-stats", self.stage_leaderboard_stats());
        stage!(self, "level-study", self.stage_level_study());

        if self.data.is_some() {
            stage!(self, "test-sharpe", self.stage_test_sharpe());
        } else {
            self.manifest.record_skipped("test-sharpe", "needs --prices and --submissions");
        }

        // The second target rank follows the paper's q = 20, capped for
        // small test fields.
        let q_second = 20.min(self.config.k.saturating_sub(1)).max(1);
        let policies = {
            let mut out = Vec::new();
            for q in [1usize, q_second] {
                let name = format!("policy-q{q}");
                eprintln!("[reproduce-all] {name}");
                match self.stage_policy(q) {
                    Ok((policy, artifacts)) => {
                        self.manifest.record_written(&name, artifacts);
                        out.push(policy);
                    }
                    Err(e) => {
                        self.manifest.record_failed(&name, &format!("{e:#}"));
                        let manifest = std::mem::replace(
                            &mut self.manifest,
                            Manifest::new(
                                "reproduce-all",
                                self.config.seed,
                                self.config.desk_scale,
                            ),
                        );
                        manifest.finalize(&self.config.out)?;
                        bail!("stage {name} failed: {e:#}");
                    }
                }
            }
            out
        };

        stage!(self, "stylized-arena", self.stage_stylized_arena(&policies, q_second));

        if self.data.is_some() {
            stage!(self, "bootstrap-arena", self.stage_bootstrap_arena(&policies, q_second));
            stage!(self, "empirics", self.stage_empirics());
        } else {
            self.manifest.record_skipped("bootstrap-arena", "needs --prices and --submissions");
            self.manifest.record_skipped("empirics", "needs --prices and --submissions");
        }

        stage!(self, "position-effects", self.stage_position_effects());
        Ok(())
    }

    /// Calibrates the market from data when present; otherwise records the
    /// configured (or default) stylized parameters.
    fn stage_market(&mut self) -> anyhow::Result<Vec<String>> {
        if let Some((prices, _)) = &self.data {
            let (sigma_rr, sigma_rr_prime) =
                ranklab_core::market::fit_covariance_cs(&prices.returns)?;
            let mu = ranklab_core::market::daily_mean_from_annual(0.0975, 252)?;
            self.model = MarketModel::new(
                mu,
                sigma_rr,
                sigma_rr_prime,
                0.0,
                prices.returns.n_assets(),
                prices.returns.calendar().days_per_interval(),
            )?;
        }
        let text = format!(
            "# reproduce-all market parameters (seed {})\n\
             mu_r = {}\nsigma_rr = {}\nsigma_rr_prime = {}\nlambda = 0\n\
             n_assets = {}\ndays_per_interval = {}\n",
            self.config.seed,
            self.model.mu_r(),
            self.model.sigma_rr(),
            self.model.sigma_rr_prime(),
            self.model.n_assets(),
            self.model.days_per_interval(),
        );
        Ok(vec![emit(&self.config.out, "market_config.cfg", &text)?])
    }

    /// Moment-matching calibration of the baseline counts from the observed
    /// leaderboard.
    fn stage_theta(&mut self) -> anyhow::Result<Vec<String>> {
        let mut artifacts = Vec::new();
        let (sections, returns): (Vec<Vec<f64>>, &ReturnPanel) = match &self.data {
            Some((prices, subs)) => {
                let full = subs.full_period_teams();
                if full.len() < 4 {
                    bail!("need at least 4 full-period teams");
                }
                let board = ScoreBoard::new(subs, &prices.returns)?;
                artifacts
                    .push(emit(&self.config.out, "leaderboard.csv", &board.to_leaderboard_csv())?);
                let sections = (0..prices.returns.calendar().n_intervals())
                    .map(|m| {
                        let ir = board.interval_ir(m);
                        full.iter().map(|&k| ir[k]).collect()
                    })
                    .collect();
                (sections, &prices.returns)
            }
            None => bail!("theta stage needs ingested data"),
        };
        let n_teams = sections[0].len();
        let target = MomentTarget::from_leaderboard(&sections)?;
        let estimate = estimate_theta(
            &target,
            returns,
            n_teams,
            self.scale.msm_n_sim,
            rng::substream(self.config.seed, rng::DOMAIN_MSM, 0),
        )?;
        self.theta = estimate.theta;
        let csv = format!(
            "n_plus,n_zero,n_minus,objective\n{},{},{},{}\n",
            estimate.theta.n_plus(),
            estimate.theta.n_zero(),
            estimate.theta.n_minus(),
            sig(estimate.objective)
        );
        artifacts.push(emit(&self.config.out, "theta_estimate.csv", &csv)?);
        Ok(artifacts)
    }

    /// Observed (or synthetic stand-in) leaderboard statistics against the
    /// simulated baseline field.
    fn stage_leaderboard_stats(&mut self) -> anyhow::Result<Vec<String>> {
        let seed = rng::substream(self.config.seed, rng::DOMAIN_ARENA, 1);
        let (panel, observed): (ReturnPanel, BoardIr) = match &self.data {
            Some((prices, subs)) => {
                let board = ScoreBoard::new(subs, &prices.returns)?;
                let full = subs.full_period_teams();
                let per_interval: Vec<Vec<f64>> = (0..prices.returns.calendar().n_intervals())
                    .map(|m| {
                        let ir = board.interval_ir(m);
                        full.iter().map(|&k| ir[k]).collect()
                    })
                    .collect();
                let total_all = board.global_ir();
                let total = full.iter().map(|&k| total_all[k]).collect();
                (prices.returns.clone(), BoardIr { per_interval, total })
            }
            None => {
                // Synthetic stand-in: one simulated "observed" competition.
                let panel =
                    sample_returns(&self.model, 12 * self.model.days_per_interval(), seed)?;
                let observed = simulate_a2_boards(&panel, &self.theta, self.config.k, 1, seed ^ 1)?
                    .pop()
                    .expect("one simulated board");
                (panel, observed)
            }
        };
        let boards =
            simulate_a2_boards(&panel, &self.theta, self.config.k, self.scale.board_sims, seed ^ 2)?;
        let rows = leaderboard_stats(&boards, Some(&observed))?;

        let mut csv = String::from(
            "window,mean_obs,mean_sim,mean_sim_sd,sd_obs,sd_sim,sd_sim_sd,\
             q01_obs,q01_sim,q01_sim_sd,q99_obs,q99_sim,q99_sim_sd\n",
        );
        for row in &rows {
            let obs = row.observed.expect("observed board supplied");
            csv.push_str(&row.window);
            for j in 0..4 {
                csv.push_str(&format!(
                    ",{},{},{}",
                    sig(obs[j]),
                    sig(row.sim_mean[j]),
                    sig(row.sim_sd[j])
                ));
            }
            csv.push('\n');
        }
        Ok(vec![emit(&self.config.out, "leaderboard_stats.csv", &csv)?])
    }

    fn stage_level_study(&mut self) -> anyhow::Result<Vec<String>> {
        let study = level_study(
            &self.model,
            &self.theta,
            &[5, 50, 163],
            self.scale.level_reps,
            Some(self.scale.level_boot),
            &self.config.alpha.0,
            12,
            rng::substream(self.config.seed, rng::DOMAIN_LEVEL_STUDY, 0),
        )?;
        let table = |bootstrap: bool| {
            let rates = if bootstrap {
                study.bootstrap_rates.as_ref().expect("bootstrap requested")
            } else {
                &study.asymptotic_rates
            };
            let mut out = String::from("alpha,k5,k50,k163\n");
            for (ai, &alpha) in study.alphas.iter().enumerate() {
                out.push_str(&sig(alpha));
                for ki in 0..study.k_values.len() {
                    out.push_str(&format!(",{}", sig(rates[ki][ai])));
                }
                out.push('\n');
            }
            out
        };
        Ok(vec![
            emit(&self.config.out, "level_asymptotic.csv", &table(false))?,
            emit(&self.config.out, "level_bootstrap.csv", &table(true))?,
        ])
    }

    fn stage_test_sharpe(&mut self) -> anyhow::Result<Vec<String>> {
        let (prices, subs) = self.data.as_ref().expect("guarded by caller");
        let n_boot = if self.config.desk_scale { 200 } else { 1000 };
        let report = test_sharpe_equality(
            subs,
            &prices.returns,
            None,
            n_boot,
            &self.config.alpha.0,
            rng::substream(self.config.seed, rng::DOMAIN_BOOTSTRAP, 0),
        )?;
        let p = report.p_bootstrap.unwrap_or(report.p_asymptotic);
        let csv = format!(
            "test,t2,dof,p_asymptotic,p_bootstrap\njoint Sharpe equality (wild bootstrap),{},{},{},{}\n",
            sig(report.t2),
            report.dof,
            sig(report.p_asymptotic),
            sig(p)
        );
        Ok(vec![emit(&self.config.out, "pvalue_table.csv", &csv)?])
    }

    fn stage_policy(&mut self, q: usize) -> anyhow::Result<(RankPolicy, Vec<String>)> {
        let kernel = build_kernel(
            &self.model,
            &self.theta,
            q,
            self.config.k,
            12,
            self.scale.kernel_paths,
            rng::substream(self.config.seed, rng::DOMAIN_KERNEL, q as u64),
        )?;
        let policy = solve(&kernel, &default_delta_grid())?;
        let artifact = emit(&self.config.out, &format!("policy_q{q}.csv"), &policy.to_csv_string())?;
        Ok((policy, vec![artifact]))
    }

    fn stage_stylized_arena(
        &mut self,
        policies: &[RankPolicy],
        q_second: usize,
    ) -> anyhow::Result<Vec<String>> {
        let rows: Vec<(String, FocalStrategy)> = vec![
            ("baseline".into(), FocalStrategy::Baseline),
            ("tangency_lambda_0".into(), FocalStrategy::Tangency { lambda: 0.0 }),
            ("tangency_lambda_3e-4".into(), FocalStrategy::Tangency { lambda: 0.0003 }),
            ("rank_opt_q1".into(), FocalStrategy::RankOpt(policies[0].clone())),
            (format!("rank_opt_q{q_second}"), FocalStrategy::RankOpt(policies[1].clone())),
        ];
        let arena_config = ArenaConfig::new(
            self.config.k,
            self.scale.arena_reps,
            rng::substream(self.config.seed, rng::DOMAIN_ARENA, 10),
        )?;
        let mut reports = Vec::new();
        for (name, strategy) in &rows {
            eprintln!("[reproduce-all]   stylized focal = {name}");
            reports.push((name.clone(), run_stylized(&arena_config, &self.model, &self.theta, strategy)?));
        }
        write_arena_tables(&self.config.out, "stylized", &reports)
    }

    fn stage_bootstrap_arena(
        &mut self,
        policies: &[RankPolicy],
        q_second: usize,
    ) -> anyhow::Result<Vec<String>> {
        let (prices, subs) = self.data.as_ref().expect("guarded by caller");
        let rows: Vec<(String, FocalStrategy)> = vec![
            ("bootstrapped".into(), FocalStrategy::Bootstrapped),
            ("rank_opt_q1".into(), FocalStrategy::RankOpt(policies[0].clone())),
            (format!("rank_opt_q{q_second}"), FocalStrategy::RankOpt(policies[1].clone())),
        ];
        let arena_config = ArenaConfig::new(
            self.config.k,
            self.scale.bootstrap_reps,
            rng::substream(self.config.seed, rng::DOMAIN_ARENA, 11),
        )?;
        let mut reports = Vec::new();
        for (name, strategy) in &rows {
            eprintln!("[reproduce-all]   bootstrap focal = {name}");
            reports.push((name.clone(), run_bootstrap(&arena_config, &prices.returns, subs, strategy)?));
        }
        write_arena_tables(&self.config.out, "bootstrap", &reports)
    }

    fn stage_empirics(&mut self) -> anyhow::Result<Vec<String>> {
        let (prices, subs) = self.data.as_ref().expect("guarded by caller");
        let board = ScoreBoard::new(subs, &prices.returns)?;
        let exposures = team_exposures(subs, &prices.returns)?;
        let mut artifacts = Vec::new();

        let profile = rank_change_profile(&board, &exposures);
        let mut prof = String::from("m,bin_low,count,mean_abs_rank_change,se\n");
        for row in &profile {
            prof.push_str(&format!(
                "{},{},{},{},{}\n",
                row.interval,
                sig(row.bin_low),
                row.count,
                sig(row.mean_abs_change),
                sig(row.se)
            ));
        }
        artifacts.push(emit(&self.config.out, "rank_change_profile.csv", &prof)?);

        let split = median_split_table(&exposures, &board, &prices.returns, &[5, 10])?;
        let mut table = String::from(
            "period,benchmark_ir,median_beta,p_below_q5,p_above_q5,p_below_q10,p_above_q10\n",
        );
        for row in &split {
            table.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                row.period,
                sig(row.benchmark_ir),
                sig(row.median_beta),
                sig(row.below[0]),
                sig(row.above[0]),
                sig(row.below[1]),
                sig(row.above[1])
            ));
        }
        artifacts.push(emit(&self.config.out, "median_split.csv", &table)?);
        Ok(artifacts)
    }

    fn stage_position_effects(&mut self) -> anyhow::Result<Vec<String>> {
        let n_zeros: Vec<usize> = (0..self.model.n_assets()).step_by(10).collect();
        let shares: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let cells = position_effects(
            &self.model,
            &self.theta,
            &n_zeros,
            &shares,
            self.scale.position_sims,
            rng::substream(self.config.seed, rng::DOMAIN_ARENA, 12),
        )?;
        let mut csv = String::from(
            "n_zero,short_share,mean_ir,sd_ir,q95_ir,mean_diff,sd_diff,q95_diff\n",
        );
        for c in &cells {
            csv.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                c.n_zero,
                sig(c.short_share),
                sig(c.mean_ir),
                sig(c.sd_ir),
                sig(c.q95_ir),
                sig(c.mean_diff),
                sig(c.sd_diff),
                sig(c.q95_diff)
            ));
        }
        Ok(vec![emit(&self.config.out, "position_effects.csv", &csv)?])
    }
}

/// Emits the comparison table plus per-strategy rank histograms.
fn write_arena_tables(
    out: &std::path::Path,
    env: &str,
    reports: &[(String, ArenaReport)],
) -> anyhow::Result<Vec<String>> {
    let mut artifacts = Vec::new();
    let mut table = String::from("portfolio,mean_ir,mean_beta_plus,p1,p5,p10,p20\n");
    for (name, report) in reports {
        table.push_str(&format!("{},{},{}", name, sig(report.mean_ir), sig(report.mean_beta_plus)));
        for &(_, p) in &report.prob_rank_leq {
            table.push_str(&format!(",{}", sig(p)));
        }
        table.push('\n');
    }
    artifacts.push(emit(out, &format!("arena_{env}.csv"), &table)?);

    let k = reports[0].1.rank_histogram.len();
    let mut hist = String::from("rank");
    for (name, _) in reports {
        hist.push_str(&format!(",{name}"));
    }
    hist.push('\n');
    for r in 0..k {
        hist.push_str(&format!("{}", r + 1));
        for (_, report) in reports {
            hist.push_str(&format!(",{}", report.rank_histogram[r]));
        }
        hist.push('\n');
    }
    artifacts.push(emit(out, &format!("rank_histograms_{env}.csv"), &hist)?);
    Ok(artifacts)
}
