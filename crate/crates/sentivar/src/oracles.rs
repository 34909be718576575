//! Independent brute-force reference computations used only for
//! verification. Everything here deliberately avoids the code paths it
//! checks: dense joint-Gaussian algebra instead of the Kalman filter,
//! explicit normal equations instead of QR, matrix MA recursions instead of
//! companion propagation.

#![doc(hidden)]

use nalgebra::{DMatrix, DVector};

use crate::ssm::LinearGaussianSsm;

/// Joint mean and covariance of the stacked states (T*k) implied by the
/// model, built by direct recursion on cross-covariances.
fn dense_state_moments(model: &LinearGaussianSsm) -> (DVector<f64>, DMatrix<f64>) {
    let t_len = model.n_steps();
    let k = model.state_dim();
    let f = &model.transition;
    let mut mean = DVector::zeros(t_len * k);
    let mut cov = DMatrix::zeros(t_len * k, t_len * k);

    let mut mu = model.init_mean.clone();
    mean.rows_mut(0, k).copy_from(&mu);
    cov.view_mut((0, 0), (k, k)).copy_from(&model.init_cov);
    for t in 1..t_len {
        mu = f * mu;
        mean.rows_mut(t * k, k).copy_from(&mu);
        // Cov(a_t, a_s) = F * Cov(a_{t-1}, a_s) for s < t
        for s in 0..t {
            let prev = cov.view(((t - 1) * k, s * k), (k, k)).clone_owned();
            let block = f * prev;
            cov.view_mut((t * k, s * k), (k, k)).copy_from(&block);
            cov.view_mut((s * k, t * k), (k, k)).copy_from(&block.transpose());
        }
        let prev_diag = cov.view(((t - 1) * k, (t - 1) * k), (k, k)).clone_owned();
        let diag = f * prev_diag * f.transpose() + model.state_noise.at(t - 1);
        cov.view_mut((t * k, t * k), (k, k)).copy_from(&diag);
    }
    (mean, cov)
}

/// Stacked observation moments and the state-observation cross covariance.
fn dense_obs_moments(
    model: &LinearGaussianSsm,
) -> (DVector<f64>, DMatrix<f64>, DMatrix<f64>, DVector<f64>, DMatrix<f64>) {
    let t_len = model.n_steps();
    let k = model.state_dim();
    let m = model.obs_dim();
    let (state_mean, state_cov) = dense_state_moments(model);
    let mut z_block = DMatrix::zeros(t_len * m, t_len * k);
    let mut h_block = DMatrix::zeros(t_len * m, t_len * m);
    for t in 0..t_len {
        z_block
            .view_mut((t * m, t * k), (m, k))
            .copy_from(&model.obs_mats[t]);
        h_block
            .view_mut((t * m, t * m), (m, m))
            .copy_from(&model.obs_covs[t]);
    }
    let obs_mean = &z_block * &state_mean;
    let cross = &state_cov * z_block.transpose(); // Cov(states, obs)
    let obs_cov = &z_block * &cross + h_block;
    (obs_mean, obs_cov, cross, state_mean, state_cov)
}

fn stack_obs(obs: &[DVector<f64>]) -> DVector<f64> {
    let m = obs[0].len();
    let mut y = DVector::zeros(obs.len() * m);
    for (t, o) in obs.iter().enumerate() {
        y.rows_mut(t * m, m).copy_from(o);
    }
    y
}

/// Log-density of the stacked observations under the dense joint normal.
pub fn dense_joint_loglik(model: &LinearGaussianSsm, obs: &[DVector<f64>]) -> f64 {
    let (obs_mean, obs_cov, _, _, _) = dense_obs_moments(model);
    let y = stack_obs(obs);
    let d = &y - obs_mean;
    let n = y.len();
    let chol = obs_cov.cholesky().expect("oracle observation covariance PD");
    let logdet: f64 = (0..n).map(|i| chol.l()[(i, i)].ln()).sum::<f64>() * 2.0;
    let sol = chol.solve(&d);
    -0.5 * (n as f64 * (2.0 * std::f64::consts::PI).ln() + logdet + d.dot(&sol))
}

/// Conditional mean (T x k) and covariance (Tk x Tk) of the states given
/// all observations, from the partitioned joint normal.
pub fn dense_conditional_moments(
    model: &LinearGaussianSsm,
    obs: &[DVector<f64>],
) -> (DMatrix<f64>, DMatrix<f64>) {
    let t_len = model.n_steps();
    let k = model.state_dim();
    let (obs_mean, obs_cov, cross, state_mean, state_cov) = dense_obs_moments(model);
    let y = stack_obs(obs);
    let chol = obs_cov.cholesky().expect("oracle observation covariance PD");
    let gain = chol.solve(&cross.transpose()); // obs_cov^{-1} Cov(obs, states)
    let cond_mean_vec = &state_mean + gain.transpose() * (&y - obs_mean);
    let cond_cov = &state_cov - cross * gain;
    let mut cond_mean = DMatrix::zeros(t_len, k);
    for t in 0..t_len {
        cond_mean
            .row_mut(t)
            .copy_from(&cond_mean_vec.rows(t * k, k).transpose());
    }
    (cond_mean, cond_cov)
}

/// Granger F-statistic by explicitly formed normal equations.
pub fn granger_f_normal_equations(x: &[f64], y: &[f64], lag: usize) -> f64 {
    let n = y.len() - lag;
    let k_u = 2 * lag + 1;
    let mut xu = DMatrix::zeros(n, k_u);
    for r in 0..n {
        xu[(r, 0)] = 1.0;
        for j in 1..=lag {
            xu[(r, j)] = y[lag + r - j];
            xu[(r, lag + j)] = x[lag + r - j];
        }
    }
    let yy = DVector::from_iterator(n, (0..n).map(|r| y[lag + r]));
    let rss = |xm: &DMatrix<f64>| -> f64 {
        let xtx = xm.transpose() * xm;
        let xty = xm.transpose() * &yy;
        let beta = xtx.try_inverse().expect("oracle X'X invertible") * xty;
        let resid = &yy - xm * beta;
        resid.dot(&resid)
    };
    let rss_u = rss(&xu);
    let rss_r = rss(&xu.columns(0, lag + 1).clone_owned());
    ((rss_r - rss_u) / lag as f64) / (rss_u / (n - k_u) as f64)
}

/// Impulse responses of a fixed-coefficient VAR by the matrix MA recursion
/// Psi_0 = I, Psi_s = sum_{i=1..min(s,p)} B_i Psi_{s-i}; the response to an
/// impact vector is Psi_s times that vector.
pub fn ma_recursion_irf(
    b_mats: &[DMatrix<f64>],
    impact: &DVector<f64>,
    max_horizon: usize,
) -> Vec<DVector<f64>> {
    let n = impact.len();
    let p = b_mats.len();
    let mut psis: Vec<DMatrix<f64>> = vec![DMatrix::identity(n, n)];
    for s in 1..=max_horizon {
        let mut psi = DMatrix::zeros(n, n);
        for i in 1..=p.min(s) {
            psi += &b_mats[i - 1] * &psis[s - i];
        }
        psis.push(psi);
    }
    psis.iter().map(|psi| psi * impact).collect()
}

/// Stationary autocovariance Gamma(lag) of a stable VAR(p) with innovation
/// covariance `sigma`, via fixed-point iteration on the companion form.
pub fn var_autocovariance(
    b_mats: &[DMatrix<f64>],
    sigma: &DMatrix<f64>,
    lag: usize,
) -> DMatrix<f64> {
    let n = sigma.nrows();
    let p = b_mats.len();
    let np = n * p;
    let mut companion = DMatrix::zeros(np, np);
    for (i, b) in b_mats.iter().enumerate() {
        companion.view_mut((0, i * n), (n, n)).copy_from(b);
    }
    for i in 0..n * (p - 1) {
        companion[(n + i, i)] = 1.0;
    }
    let mut q_comp = DMatrix::zeros(np, np);
    q_comp.view_mut((0, 0), (n, n)).copy_from(sigma);
    let mut gamma = q_comp.clone();
    for _ in 0..20_000 {
        let next = &companion * &gamma * companion.transpose() + &q_comp;
        let diff = (&next - &gamma).amax();
        gamma = next;
        if diff < 1e-14 {
            break;
        }
    }
    let mut shifted = gamma.clone();
    for _ in 0..lag {
        shifted = &companion * shifted;
    }
    shifted.view((0, 0), (n, n)).clone_owned()
}
