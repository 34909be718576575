//! Small numeric helpers shared across modules: sample moments, quantiles,
//! autocovariances, Parzen-window spectral estimates, and a QR-based OLS.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance (n − 1 denominator).
pub fn variance(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64
}

pub fn std_dev(xs: &[f64]) -> f64 {
    variance(xs).sqrt()
}

/// Adjusted Fisher-Pearson sample skewness G1 = g1 * sqrt(n(n-1)) / (n-2).
pub fn sample_skewness(xs: &[f64]) -> Result<f64> {
    let n = xs.len();
    if n < 3 {
        return Err(Error::invalid(format!(
            "skewness needs at least 3 observations, got {n}"
        )));
    }
    let m = mean(xs);
    let nf = n as f64;
    let m2 = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / nf;
    let m3 = xs.iter().map(|x| (x - m).powi(3)).sum::<f64>() / nf;
    if m2 <= 0.0 {
        return Err(Error::invalid(
            "skewness undefined for a constant series (zero variance)",
        ));
    }
    let g1 = m3 / m2.powf(1.5);
    Ok(g1 * (nf * (nf - 1.0)).sqrt() / (nf - 2.0))
}

/// Quantile with linear interpolation between order statistics
/// (position (n-1)·p, the numpy default).
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty());
    assert!((0.0..=1.0).contains(&p));
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = (n - 1) as f64 * p;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

pub fn sorted_copy(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("NaN in quantile input"));
    v
}

/// Biased (1/n) sample autocovariance at the given lag.
pub fn autocovariance(xs: &[f64], lag: usize) -> f64 {
    let n = xs.len();
    if lag >= n {
        return 0.0;
    }
    let m = mean(xs);
    (0..n - lag)
        .map(|i| (xs[i] - m) * (xs[i + lag] - m))
        .sum::<f64>()
        / n as f64
}

/// Parzen lag window on [0, 1].
pub fn parzen_weight(u: f64) -> f64 {
    let u = u.abs();
    if u <= 0.5 {
        1.0 - 6.0 * u * u + 6.0 * u * u * u
    } else if u <= 1.0 {
        2.0 * (1.0 - u).powi(3)
    } else {
        0.0
    }
}

/// Long-run variance (spectral density at frequency zero times 2π-free
/// normalization): gamma_0 + 2 Σ_{s=1..b} w(s/b) gamma_s.
pub fn long_run_variance(xs: &[f64], bandwidth: usize) -> f64 {
    let mut s = autocovariance(xs, 0);
    for lag in 1..=bandwidth.min(xs.len().saturating_sub(1)) {
        s += 2.0 * parzen_weight(lag as f64 / bandwidth as f64) * autocovariance(xs, lag);
    }
    s
}

/// OLS fit of y on the columns of x.
#[derive(Debug, Clone)]
pub struct OlsFit {
    pub coef: DVector<f64>,
    pub residuals: DVector<f64>,
    pub rss: f64,
    /// Standard errors; `None` when there are no spare degrees of freedom.
    pub std_errors: Option<DVector<f64>>,
    pub n_obs: usize,
    pub n_params: usize,
}

impl OlsFit {
    pub fn t_ratio(&self, j: usize) -> Option<f64> {
        self.std_errors.as_ref().map(|se| self.coef[j] / se[j])
    }

    /// Gaussian log-likelihood at the MLE variance rss/n.
    pub fn loglik(&self) -> f64 {
        let n = self.n_obs as f64;
        let s2 = (self.rss / n).max(f64::MIN_POSITIVE);
        -0.5 * n * ((2.0 * std::f64::consts::PI * s2).ln() + 1.0)
    }
}

/// Householder-QR least squares. Errors on rank deficiency, naming the
/// offending columns (the oracle route via normal equations lives in tests).
pub fn ols_qr(x: &DMatrix<f64>, y: &DVector<f64>, col_names: &[String]) -> Result<OlsFit> {
    let n = x.nrows();
    let k = x.ncols();
    assert_eq!(n, y.len(), "design and response rows differ");
    if n < k {
        return Err(Error::invalid(format!(
            "{n} observations cannot identify {k} regressors"
        )));
    }
    let qr = x.clone().qr();
    let r = qr.r();
    // Relative tolerance on the R diagonal flags (near-)collinear columns.
    let max_diag = (0..k).map(|i| r[(i, i)].abs()).fold(0.0_f64, f64::max);
    let tol = max_diag * 1e-10;
    let degenerate: Vec<String> = (0..k)
        .filter(|&i| r[(i, i)].abs() <= tol)
        .map(|i| {
            col_names
                .get(i)
                .cloned()
                .unwrap_or_else(|| format!("column {i}"))
        })
        .collect();
    if !degenerate.is_empty() {
        return Err(Error::Collinear {
            columns: degenerate,
        });
    }
    let qty = qr.q().transpose() * y;
    let coef = r
        .view((0, 0), (k, k))
        .solve_upper_triangular(&qty.rows(0, k).clone_owned())
        .ok_or_else(|| Error::Singular {
            context: "triangular solve in OLS".to_string(),
        })?;
    let resid = y - x * &coef;
    let rss = resid.dot(&resid);
    let std_errors = if n > k {
        let s2 = rss / (n - k) as f64;
        // (X'X)^{-1} = R^{-1} R^{-T}; column solves against R avoid forming it.
        let rtop = r.view((0, 0), (k, k)).clone_owned();
        let mut se = DVector::zeros(k);
        for j in 0..k {
            let mut e = DVector::zeros(k);
            e[j] = 1.0;
            let col = rtop
                .transpose()
                .solve_lower_triangular(&e)
                .ok_or_else(|| Error::Singular {
                    context: "R' solve in OLS standard errors".to_string(),
                })?;
            se[j] = (s2 * col.dot(&col)).sqrt();
        }
        Some(se)
    } else {
        None
    };
    Ok(OlsFit {
        coef,
        residuals: resid,
        rss,
        std_errors,
        n_obs: n,
        n_params: k,
    })
}
