//! Convergence screens for a single chain: the Geweke CD z-statistic and
//! the inefficiency factor (autocorrelation time).

use crate::error::{Error, Result};
use crate::stats::{autocovariance, long_run_variance, mean, parzen_weight};

/// Parzen truncation rule 4 * (n/100)^{1/4}, at least one lag.
fn geweke_bandwidth(n: usize) -> usize {
    ((4.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize).max(1)
}

/// Geweke convergence diagnostic: z-score between the mean of the first
/// 10% and the last 50% of the chain, studentized by Parzen-window
/// long-run variances estimated per window.
pub fn geweke_cd(chain: &[f64]) -> Result<f64> {
    let n = chain.len();
    if n < 400 {
        return Err(Error::invalid(format!(
            "Geweke CD needs a chain of at least 400 draws, got {n}"
        )));
    }
    let n_a = n / 10;
    let n_b = n / 2;
    let window_a = &chain[..n_a];
    let window_b = &chain[n - n_b..];
    let s_a = long_run_variance(window_a, geweke_bandwidth(n_a));
    let s_b = long_run_variance(window_b, geweke_bandwidth(n_b));
    if s_a <= 0.0 || s_b <= 0.0 {
        return Err(Error::invalid(
            "Geweke CD undefined: zero-variance window",
        ));
    }
    Ok((mean(window_a) - mean(window_b)) / (s_a / n_a as f64 + s_b / n_b as f64).sqrt())
}

/// Inefficiency factor 1 + 2 * sum_s w_Parzen(s/B) rho_s with bandwidth
/// B = 500 (or a tenth of the chain when shorter), floored at zero.
pub fn inefficiency_factor(chain: &[f64]) -> Result<f64> {
    let n = chain.len();
    if n < 1000 {
        return Err(Error::invalid(format!(
            "inefficiency factor needs a chain of at least 1000 draws, got {n}"
        )));
    }
    let bandwidth = 500.min(n / 10);
    let gamma0 = autocovariance(chain, 0);
    if gamma0 <= 0.0 {
        return Err(Error::invalid(
            "inefficiency factor undefined: zero-variance chain",
        ));
    }
    let mut acc = 0.0;
    for s in 1..=bandwidth {
        acc += parzen_weight(s as f64 / bandwidth as f64) * autocovariance(chain, s) / gamma0;
    }
    Ok((1.0 + 2.0 * acc).max(0.0))
}
