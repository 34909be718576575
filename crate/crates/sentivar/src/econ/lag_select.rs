//! VAR lag-order selection over a common estimation sample.
//!
//! All candidate orders 0..=max_lag are fit on the rows that remain after
//! trimming max_lag initial observations, so the criteria are comparable.
//! Reported columns are log-likelihood, the sequential modified LR
//! statistic, final prediction error, Akaike, Schwarz, and Hannan-Quinn.

use nalgebra::DMatrix;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::ingest::AlignedPanel;

#[derive(Debug, Clone)]
pub struct LagRow {
    pub lag: usize,
    pub loglik: f64,
    /// Modified LR statistic against lag-1 fewer; absent at lag 0.
    pub lr: Option<f64>,
    pub lr_pvalue: Option<f64>,
    pub fpe: f64,
    pub aic: f64,
    pub sc: f64,
    pub hq: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SelectedLags {
    /// Largest order whose sequential LR test rejects at 5%.
    pub lr: usize,
    pub fpe: usize,
    pub aic: usize,
    pub sc: usize,
    pub hq: usize,
}

#[derive(Debug, Clone)]
pub struct LagSelectionTable {
    pub rows: Vec<LagRow>,
    pub selected: SelectedLags,
    pub n_vars: usize,
    pub n_obs: usize,
}

/// Select the VAR lag order for the aligned (sent, rv, dturn) panel.
pub fn select_var_lag(panel: &AlignedPanel, max_lag: usize) -> Result<LagSelectionTable> {
    let t = panel.len();
    let mut y = DMatrix::zeros(t, 3);
    for i in 0..t {
        y[(i, 0)] = panel.sent[i];
        y[(i, 1)] = panel.rv[i];
        y[(i, 2)] = panel.dturn[i];
    }
    select_var_lag_matrix(&y, max_lag)
}

/// Same selection on a raw T x n data matrix.
pub fn select_var_lag_matrix(y: &DMatrix<f64>, max_lag: usize) -> Result<LagSelectionTable> {
    let t = y.nrows();
    let n = y.ncols();
    if max_lag == 0 {
        return Err(Error::invalid("max_lag must be at least 1"));
    }
    if t <= n * max_lag + max_lag + 10 {
        return Err(Error::invalid(format!(
            "sample of {t} rows too short for lag selection up to {max_lag} with {n} variables"
        )));
    }
    let t_eff = t - max_lag;
    let mut rows: Vec<LagRow> = Vec::with_capacity(max_lag + 1);
    let mut prev_logdet: Option<f64> = None;
    let chi2 = ChiSquared::new((n * n) as f64).expect("n^2 > 0");

    for m in 0..=max_lag {
        let k_per_eq = 1 + n * m;
        let mut x = DMatrix::zeros(t_eff, k_per_eq);
        for r in 0..t_eff {
            x[(r, 0)] = 1.0;
            for lag in 1..=m {
                for j in 0..n {
                    x[(r, 1 + (lag - 1) * n + j)] = y[(max_lag + r - lag, j)];
                }
            }
        }
        let resp = y.rows(max_lag, t_eff).clone_owned();
        // Multivariate OLS with a shared design: solve once via QR.
        let qr = x.clone().qr();
        let r_mat = qr.r();
        let max_diag = (0..k_per_eq).map(|i| r_mat[(i, i)].abs()).fold(0.0, f64::max);
        if (0..k_per_eq).any(|i| r_mat[(i, i)].abs() <= max_diag * 1e-10) {
            return Err(Error::Collinear {
                columns: vec![format!("VAR({m}) design matrix")],
            });
        }
        let qty = qr.q().transpose() * &resp;
        let coef = r_mat
            .view((0, 0), (k_per_eq, k_per_eq))
            .solve_upper_triangular(&qty.rows(0, k_per_eq).clone_owned())
            .ok_or_else(|| Error::Singular {
                context: format!("VAR({m}) coefficient solve"),
            })?;
        let resid = &resp - &x * &coef;
        let sigma = resid.transpose() * &resid / t_eff as f64;
        let chol = sigma.clone().cholesky().ok_or_else(|| Error::Singular {
            context: format!("residual covariance at lag {m}"),
        })?;
        let logdet: f64 = (0..n).map(|i| chol.l()[(i, i)].ln() * 2.0).sum();

        let tf = t_eff as f64;
        let nf = n as f64;
        let kf = k_per_eq as f64;
        let loglik = -0.5 * tf * (nf * (1.0 + (2.0 * std::f64::consts::PI).ln()) + logdet);
        let total_params = nf * kf;
        let aic = -2.0 * loglik / tf + 2.0 * total_params / tf;
        let sc = -2.0 * loglik / tf + tf.ln() * total_params / tf;
        let hq = -2.0 * loglik / tf + 2.0 * tf.ln().ln() * total_params / tf;
        let fpe = logdet.exp() * ((tf + kf) / (tf - kf)).powi(n as i32);
        let (lr, lr_p) = match prev_logdet {
            Some(prev) if m >= 1 => {
                let stat = ((tf - kf) * (prev - logdet)).max(0.0);
                let p = chi2.sf(stat);
                (Some(stat), Some(p))
            }
            _ => (None, None),
        };
        prev_logdet = Some(logdet);
        rows.push(LagRow {
            lag: m,
            loglik,
            lr,
            lr_pvalue: lr_p,
            fpe,
            aic,
            sc,
            hq,
        });
    }

    let argmin = |f: &dyn Fn(&LagRow) -> f64| -> usize {
        rows.iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| f(a).partial_cmp(&f(b)).unwrap())
            .map(|(i, _)| i)
            .unwrap()
    };
    let lr_pick = rows
        .iter()
        .rev()
        .find(|r| r.lr_pvalue.is_some_and(|p| p < 0.05))
        .map(|r| r.lag)
        .unwrap_or(0);
    let selected = SelectedLags {
        lr: lr_pick,
        fpe: argmin(&|r: &LagRow| r.fpe),
        aic: argmin(&|r: &LagRow| r.aic),
        sc: argmin(&|r: &LagRow| r.sc),
        hq: argmin(&|r: &LagRow| r.hq),
    };
    Ok(LagSelectionTable {
        rows,
        selected,
        n_vars: n,
        n_obs: t_eff,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;
    use rand_distr::StandardNormal;

    fn simulate_var1(t: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let a = [[0.6, 0.2, 0.0], [-0.1, 0.5, 0.1], [0.0, 0.2, 0.4]];
        let mut y = DMatrix::zeros(t, 3);
        for r in 1..t {
            for i in 0..3 {
                let mut v: f64 = rng.sample(StandardNormal);
                for j in 0..3 {
                    v += a[i][j] * y[(r - 1, j)];
                }
                y[(r, i)] = v;
            }
        }
        y
    }

    #[test]
    fn strong_var1_selects_one() {
        let y = simulate_var1(1000, 314);
        let table = select_var_lag_matrix(&y, 6).unwrap();
        assert_eq!(table.selected.aic, 1, "{:?}", table.selected);
        assert_eq!(table.selected.sc, 1);
        assert_eq!(table.selected.hq, 1);
        assert_eq!(table.selected.lr, 1);
    }

    #[test]
    fn white_noise_selects_zero_by_sc_hq() {
        let mut rng = ChaCha20Rng::seed_from_u64(2718);
        let mut y = DMatrix::zeros(1000, 3);
        for r in 0..1000 {
            for c in 0..3 {
                y[(r, c)] = rng.sample(StandardNormal);
            }
        }
        let table = select_var_lag_matrix(&y, 6).unwrap();
        assert_eq!(table.selected.sc, 0);
        assert_eq!(table.selected.hq, 0);
    }

    #[test]
    fn loglik_nondecreasing_on_common_sample() {
        let y = simulate_var1(400, 99);
        let table = select_var_lag_matrix(&y, 8).unwrap();
        for w in table.rows.windows(2) {
            assert!(
                w[1].loglik >= w[0].loglik - 1e-8,
                "LogL fell from {} to {}",
                w[0].loglik,
                w[1].loglik
            );
        }
    }

    #[test]
    fn insufficient_sample_errors() {
        let y = DMatrix::zeros(30, 3);
        assert!(select_var_lag_matrix(&y, 8).is_err());
    }
}
