//! Data ingestion shared by the pipeline commands.

use crate::config::RunConfig;
use anyhow::Context;
use ranklab_core::io::{PricePanel, SubmissionPanel};
use ranklab_core::market::ReturnPanel;

/// Prices and derived returns for one run.
pub struct IngestedPrices {
    pub prices: PricePanel,
    pub returns: ReturnPanel,
}

pub fn load_prices(config: &RunConfig) -> anyhow::Result<IngestedPrices> {
    let path = config.require_prices()?;
    let prices =
        PricePanel::from_csv_path(path).with_context(|| format!("ingesting {}", path.display()))?;
    let returns = prices.to_returns(config.intervals)?;
    Ok(IngestedPrices { prices, returns })
}

/// Loads submissions against the price panel's asset registry, reporting
/// (or, under --strict, rejecting) constraint violations.
pub fn load_submissions(
    config: &RunConfig,
    prices: &IngestedPrices,
) -> anyhow::Result<SubmissionPanel> {
    let path = config.require_submissions()?;
    let subs = SubmissionPanel::from_csv_path(
        path,
        prices.prices.asset_ids(),
        config.intervals,
        config.strict,
    )
    .with_context(|| format!("ingesting {}", path.display()))?;
    for v in subs.violations() {
        eprintln!(
            "warning: team {} interval {}: gross exposure {:.6} outside [0.25, 1]",
            v.team_id, v.interval, v.gross
        );
    }
    Ok(subs)
}
