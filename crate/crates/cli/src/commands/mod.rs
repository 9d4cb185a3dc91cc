pub mod calibrate_market;
pub mod calibrate_theta;
pub mod empirics_cmd;
pub mod reproduce;
pub mod run_arena;
pub mod solve_policy;
pub mod test_sharpe;

use ranklab_core::io::format_sig;

/// Table rendering at 6 significant digits (the report convention; data
/// exchange files keep full precision instead).
pub fn sig(x: f64) -> String {
    format_sig(x, 6)
}
