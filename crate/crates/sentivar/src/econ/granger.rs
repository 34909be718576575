//! Pairwise Granger causality F-test.
//!
//! The unrestricted regression explains y_t by a constant, p lags of y, and
//! p lags of x; the restricted one drops the x lags. The statistic is
//! `F = ((RSS_r - RSS_u)/p) / (RSS_u/(T - 2p - 1))` with T the regression
//! sample size, referred to the F(p, T-2p-1) distribution.

use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use crate::error::{Error, Result};
use crate::stats::ols_qr;

#[derive(Debug, Clone)]
pub struct GrangerResult {
    pub cause: String,
    pub effect: String,
    pub lag: usize,
    pub f_stat: f64,
    pub p_value: f64,
    /// (numerator, denominator) degrees of freedom.
    pub df: (usize, usize),
}

impl GrangerResult {
    pub fn hypothesis(&self) -> String {
        format!("{} does not Granger-cause {}", self.cause, self.effect)
    }
}

/// Test whether `x` Granger-causes `y` at the given lag order.
pub fn granger_test(
    x: &[f64],
    y: &[f64],
    lag: usize,
    cause_name: &str,
    effect_name: &str,
) -> Result<GrangerResult> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!(
            "series lengths differ: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if lag == 0 {
        return Err(Error::invalid("Granger lag order must be positive"));
    }
    let t_raw = y.len();
    if t_raw <= lag {
        return Err(Error::invalid("series shorter than the lag order"));
    }
    let n = t_raw - lag;
    let k_u = 2 * lag + 1;
    if n <= k_u {
        return Err(Error::invalid(format!(
            "need T - 2*lag - 1 > 0 on the regression sample; have {n} rows for {k_u} regressors"
        )));
    }

    let mut x_u = DMatrix::zeros(n, k_u);
    let mut names = Vec::with_capacity(k_u);
    for r in 0..n {
        x_u[(r, 0)] = 1.0;
    }
    names.push("const".to_string());
    for j in 1..=lag {
        for r in 0..n {
            x_u[(r, j)] = y[lag + r - j];
        }
        names.push(format!("{effect_name}.l{j}"));
    }
    for j in 1..=lag {
        for r in 0..n {
            x_u[(r, lag + j)] = x[lag + r - j];
        }
        names.push(format!("{cause_name}.l{j}"));
    }
    let resp = DVector::from_iterator(n, (0..n).map(|r| y[lag + r]));

    let fit_u = ols_qr(&x_u, &resp, &names)?;
    let x_r = x_u.columns(0, lag + 1).clone_owned();
    let fit_r = ols_qr(&x_r, &resp, &names[..lag + 1].to_vec())?;

    let df_num = lag;
    let df_den = n - k_u;
    let f_stat = ((fit_r.rss - fit_u.rss) / df_num as f64) / (fit_u.rss / df_den as f64);
    let f_stat = f_stat.max(0.0);
    let dist = FisherSnedecor::new(df_num as f64, df_den as f64)
        .map_err(|e| Error::invalid(format!("F distribution: {e}")))?;
    let p_value = dist.sf(f_stat);
    Ok(GrangerResult {
        cause: cause_name.to_string(),
        effect: effect_name.to_string(),
        lag,
        f_stat,
        p_value,
        df: (df_num, df_den),
    })
}

/// All six pairwise hypotheses among the named series, in a stable order.
pub fn granger_all_pairs(
    series: &[(&str, &[f64])],
    lag: usize,
) -> Result<Vec<GrangerResult>> {
    let mut out = Vec::new();
    for (i, (cause, xs)) in series.iter().enumerate() {
        for (j, (effect, ys)) in series.iter().enumerate() {
            if i != j {
                out.push(granger_test(xs, ys, lag, cause, effect)?);
            }
        }
    }
    Ok(out)
}
