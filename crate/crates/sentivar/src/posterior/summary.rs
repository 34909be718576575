//! Per-parameter posterior summary in the five-column estimation-table
//! layout: mean, SD, equal-tailed 95% interval, Geweke CD, inefficiency
//! factor. Parameters are the increment standard deviations of the three
//! state blocks, labeled by index.

use std::path::Path;

use crate::error::{Error, Result};
use crate::posterior::diagnostics::{geweke_cd, inefficiency_factor};
use crate::stats::{mean, quantile, sorted_copy, std_dev};
use crate::tvp::PosteriorDraws;

pub const SUMMARY_HEADER: &str = "parameter,mean,sd,ci_low,ci_high,geweke_cd,inefficiency";

#[derive(Debug, Clone)]
pub struct ParamSummary {
    pub name: String,
    pub mean: f64,
    pub sd: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Absent when the chain is too short or has no variance.
    pub geweke_cd: Option<f64>,
    pub inefficiency: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct PosteriorSummary {
    pub params: Vec<ParamSummary>,
    pub n_draws: usize,
}

/// Summarize one scalar chain.
pub fn summarize_chain(name: &str, chain: &[f64]) -> ParamSummary {
    let sorted = sorted_copy(chain);
    ParamSummary {
        name: name.to_string(),
        mean: mean(chain),
        sd: std_dev(chain),
        ci_low: quantile(&sorted, 0.025),
        ci_high: quantile(&sorted, 0.975),
        geweke_cd: geweke_cd(chain).ok(),
        inefficiency: inefficiency_factor(chain).ok(),
    }
}

/// Summarize every hyperparameter (as increment standard deviations).
pub fn summarize(draws: &PosteriorDraws) -> Result<PosteriorSummary> {
    let n_draws = draws.n_draws();
    if n_draws < 100 {
        return Err(Error::invalid(format!(
            "posterior summary needs at least 100 retained draws, got {n_draws}"
        )));
    }
    let params = draws
        .hyper_sd_chains()
        .into_iter()
        .map(|(name, chain)| summarize_chain(&name, &chain))
        .collect();
    Ok(PosteriorSummary { params, n_draws })
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x}"),
        None => "nan".to_string(),
    }
}

pub fn write_summary_csv(path: &Path, summary: &PosteriorSummary) -> Result<()> {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for p in &summary.params {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            p.name,
            p.mean,
            p.sd,
            p.ci_low,
            p.ci_high,
            fmt_opt(p.geweke_cd),
            fmt_opt(p.inefficiency)
        ));
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}
