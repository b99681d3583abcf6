//! Experiment configuration, bound-verification campaigns and figure CSVs.

pub mod config;
pub mod figures;
pub mod stats;
pub mod verify;

pub use config::ExperimentConfig;
pub use figures::{run_figure_campaign, Figure, FigureConfig, FigureOutput, ResultRow};
pub use stats::Summary;
pub use verify::{verify_bounds, BoundCheck, Campaign, CampaignConfig, Direction, VerificationReport, Verdict};

/// Formats with six significant digits, trailing zeros removed.
pub fn format_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, e) = sci.split_once('e').expect("exponent");
    let exp: i32 = e.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}
