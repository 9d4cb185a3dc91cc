//! Direct check of E[IR] for the equal-weight long portfolio.

use ranklab_core::{market, rng, scoring};

fn main() {
    let model = market::MarketModel::competition_default(0.0).unwrap();
    let n_reps = 4000;
    let mut sum_ir = 0.0;
    let mut sum_ir_sq = 0.0;
    // Also track the mean daily log return and its sd for diagnosis.
    let mut lr_mean_acc = 0.0;
    let mut lr_sd_acc = 0.0;
    for rep in 0..n_reps {
        let panel = market::sample_returns(&model, 240, rng::substream(9, 1, rep)).unwrap();
        let series: Vec<f64> = (0..240)
            .map(|t| (panel.returns().column(t).sum() / 100.0).ln_1p())
            .collect();
        let ir = scoring::ir(&series).unwrap();
        sum_ir += ir;
        sum_ir_sq += ir * ir;
        let m = series.iter().sum::<f64>() / 240.0;
        lr_mean_acc += m;
        lr_sd_acc +=
            (series.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / 239.0).sqrt();
    }
    let n = n_reps as f64;
    let mean_ir = sum_ir / n;
    let sd_ir = (sum_ir_sq / n - mean_ir * mean_ir).sqrt();
    println!("E[IR] = {mean_ir:.4} (sd {sd_ir:.3}, se {:.4})", sd_ir / n.sqrt());
    println!("mean daily lr = {:.6e} (expect ~3.03e-4)", lr_mean_acc / n);
    println!("mean daily sd = {:.6e} (expect ~1.151e-2)", lr_sd_acc / n);
}
