//! Kalman filter, fast state smoother, and the mean-correction simulation
//! smoother. The backward pass uses the disturbance-smoother recursion, so
//! no predictive covariance is ever inverted; zero state noise and
//! degenerate initial covariances are handled exactly.

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::ssm::model::{LinearGaussianSsm, StateNoise};

const LN_2PI: f64 = 1.837877066409345483560659472811;

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in i + 1..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

/// Forward-pass products needed by the likelihood and the backward pass.
struct FilterPass {
    loglik: f64,
    /// F_t^{-1} v_t per step.
    finv_v: Vec<DVector<f64>>,
    /// Predictive-form gain K_t = F P_t Z_t' F_t^{-1} per step.
    gains: Vec<DMatrix<f64>>,
}

fn filter_pass(model: &LinearGaussianSsm, obs: &[DVector<f64>]) -> Result<FilterPass> {
    let t_len = model.n_steps();
    let m = model.obs_dim();
    if obs.len() != t_len {
        return Err(Error::invalid(format!(
            "model covers {t_len} steps but {} observations were given",
            obs.len()
        )));
    }
    for (t, y) in obs.iter().enumerate() {
        if y.len() != m {
            return Err(Error::invalid(format!(
                "observation at step {t} has dimension {}, expected {m}",
                y.len()
            )));
        }
    }
    let mut a = model.init_mean.clone();
    let mut p = model.init_cov.clone();
    let mut loglik = 0.0;
    let mut finv_v = Vec::with_capacity(t_len);
    let mut gains = Vec::with_capacity(t_len);

    for t in 0..t_len {
        let z = &model.obs_mats[t];
        let c = &p * z.transpose(); // P_t Z_t'
        let mut f = z * &c;
        f += &model.obs_covs[t];
        symmetrize(&mut f);
        let chol = Cholesky::new(f).ok_or_else(|| Error::Singular {
            context: format!("innovation covariance at step {t}"),
        })?;
        let v = &obs[t] - z * &a;
        let fv = chol.solve(&v);
        let logdet: f64 = (0..m).map(|i| chol.l()[(i, i)].ln()).sum::<f64>() * 2.0;
        loglik -= 0.5 * (m as f64 * LN_2PI + logdet + v.dot(&fv));

        // x = F_t^{-1} (P_t Z_t')' ; filtered update and gain reuse it.
        let x = chol.solve(&c.transpose());
        a += &c * &fv;
        p -= &c * &x;
        symmetrize(&mut p);
        let gain = if model.transition_is_identity {
            x.transpose()
        } else {
            &model.transition * x.transpose()
        };
        finv_v.push(fv);
        gains.push(gain);

        if t + 1 < t_len {
            let q = model.state_noise.at(t);
            if model.transition_is_identity {
                p += q;
            } else {
                a = &model.transition * a;
                p = &model.transition * p * model.transition.transpose() + q;
                symmetrize(&mut p);
            }
        }
    }
    Ok(FilterPass {
        loglik,
        finv_v,
        gains,
    })
}

/// Backward recursion r_{t-1} = Z_t' F_t^{-1} v_t + L_t' r_t with r_T = 0;
/// entry `t` of the result is r_t in that indexing.
fn backward_r(model: &LinearGaussianSsm, pass: &FilterPass) -> Vec<DVector<f64>> {
    let t_len = model.n_steps();
    let k = model.state_dim();
    let mut rs = vec![DVector::zeros(k); t_len + 1];
    for t in (0..t_len).rev() {
        let z = &model.obs_mats[t];
        // L_t' r = F' r - Z_t' (K_t' r)
        let kr = pass.gains[t].transpose() * &rs[t + 1];
        let tmp = &pass.finv_v[t] - kr;
        let mut r = z.transpose() * tmp;
        if model.transition_is_identity {
            r += &rs[t + 1];
        } else {
            r += model.transition.transpose() * &rs[t + 1];
        }
        rs[t] = r;
    }
    rs
}

fn fast_smooth(model: &LinearGaussianSsm, pass: &FilterPass) -> DMatrix<f64> {
    let t_len = model.n_steps();
    let k = model.state_dim();
    let rs = backward_r(model, pass);
    let mut out = DMatrix::zeros(t_len, k);
    let mut cur = &model.init_mean + &model.init_cov * &rs[0];
    out.row_mut(0).copy_from(&cur.transpose());
    for t in 0..t_len - 1 {
        let q = model.state_noise.at(t);
        let mut next = if model.transition_is_identity {
            cur.clone()
        } else {
            &model.transition * &cur
        };
        next += q * &rs[t + 1];
        out.row_mut(t + 1).copy_from(&next.transpose());
        cur = next;
    }
    out
}

/// Exact Gaussian log-likelihood by prediction-error decomposition.
pub fn kalman_loglik(model: &LinearGaussianSsm, obs: &[DVector<f64>]) -> Result<f64> {
    Ok(filter_pass(model, obs)?.loglik)
}

/// Smoothed state mean E[a_t | y_1..T] for every t, as a T x k matrix.
pub fn smoothed_state_mean(model: &LinearGaussianSsm, obs: &[DVector<f64>]) -> Result<DMatrix<f64>> {
    let pass = filter_pass(model, obs)?;
    Ok(fast_smooth(model, &pass))
}

/// Symmetric square root of a PSD matrix: Cholesky when positive definite,
/// otherwise an eigenvalue square root with small negatives clamped.
fn psd_sqrt(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if m.amax() == 0.0 {
        return Ok(DMatrix::zeros(m.nrows(), m.ncols()));
    }
    if let Some(chol) = Cholesky::new(m.clone()) {
        return Ok(chol.unpack());
    }
    let eig = m.clone().symmetric_eigen();
    let max_ev = eig.eigenvalues.amax();
    let mut sqrt_vals = eig.eigenvalues.clone();
    for v in sqrt_vals.iter_mut() {
        if *v < -1e-8 * max_ev {
            return Err(Error::Singular {
                context: "square root of an indefinite covariance".to_string(),
            });
        }
        *v = v.max(0.0).sqrt();
    }
    let mut u = eig.eigenvectors;
    for (j, s) in sqrt_vals.iter().enumerate() {
        u.column_mut(j).scale_mut(*s);
    }
    Ok(u)
}

fn standard_normal_vector<R: Rng + ?Sized>(k: usize, rng: &mut R) -> DVector<f64> {
    DVector::from_iterator(k, (0..k).map(|_| rng.sample::<f64, _>(StandardNormal)))
}

/// One exact draw from p(a_1..T | y_1..T) by mean correction: simulate an
/// unconditional path and observations, smooth both, and shift.
///
/// The random stream is consumed in a fixed order (initial state, then per
/// step the observation noise followed by the state noise), so a seeded
/// generator reproduces the draw bit for bit.
pub fn simulation_smoother<R: Rng + ?Sized>(
    model: &LinearGaussianSsm,
    obs: &[DVector<f64>],
    rng: &mut R,
) -> Result<DMatrix<f64>> {
    let t_len = model.n_steps();
    let k = model.state_dim();
    let m = model.obs_dim();

    let sqrt_p0 = psd_sqrt(&model.init_cov)?;
    let sqrt_q_const = match &model.state_noise {
        StateNoise::Constant(q) => Some(psd_sqrt(q)?),
        StateNoise::PerStep(_) => None,
    };

    let mut alpha_plus = DMatrix::zeros(t_len, k);
    let mut y_plus: Vec<DVector<f64>> = Vec::with_capacity(t_len);
    let mut state = &model.init_mean + &sqrt_p0 * standard_normal_vector(k, rng);
    for t in 0..t_len {
        alpha_plus.row_mut(t).copy_from(&state.transpose());
        let h_sqrt = psd_sqrt(&model.obs_covs[t])?;
        let y = &model.obs_mats[t] * &state + h_sqrt * standard_normal_vector(m, rng);
        y_plus.push(y);
        if t + 1 < t_len {
            let noise = match &sqrt_q_const {
                Some(sq) => sq * standard_normal_vector(k, rng),
                None => psd_sqrt(model.state_noise.at(t))? * standard_normal_vector(k, rng),
            };
            state = if model.transition_is_identity {
                state + noise
            } else {
                &model.transition * state + noise
            };
        }
    }

    let smoothed_obs = smoothed_state_mean(model, obs)?;
    let smoothed_plus = smoothed_state_mean(model, &y_plus)?;
    Ok(smoothed_obs + alpha_plus - smoothed_plus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn mat(r: usize, c: usize, vals: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(r, c, vals)
    }

    /// Random small PSD model for oracle comparisons.
    fn random_model(
        rng: &mut ChaCha20Rng,
        t_len: usize,
        k: usize,
        m: usize,
    ) -> (LinearGaussianSsm, Vec<DVector<f64>>) {
        let rand_psd = |rng: &mut ChaCha20Rng, n: usize| -> DMatrix<f64> {
            let a = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
            &a * a.transpose() + DMatrix::identity(n, n) * 0.3
        };
        let obs_mats: Vec<DMatrix<f64>> = (0..t_len)
            .map(|_| DMatrix::from_fn(m, k, |_, _| rng.sample::<f64, _>(StandardNormal)))
            .collect();
        let obs_covs: Vec<DMatrix<f64>> = (0..t_len).map(|_| rand_psd(rng, m)).collect();
        let mut transition = DMatrix::from_fn(k, k, |_, _| rng.sample::<f64, _>(StandardNormal));
        transition *= 0.5 / k as f64;
        for i in 0..k {
            transition[(i, i)] += 0.5;
        }
        let q = rand_psd(rng, k) * 0.5;
        let init_mean = DVector::from_fn(k, |_, _| rng.sample::<f64, _>(StandardNormal));
        let init_cov = rand_psd(rng, k);
        let model = LinearGaussianSsm::new(
            obs_mats,
            obs_covs,
            transition,
            StateNoise::Constant(q),
            init_mean,
            init_cov,
        )
        .unwrap();
        let obs: Vec<DVector<f64>> = (0..t_len)
            .map(|_| DVector::from_fn(m, |_, _| rng.sample::<f64, _>(StandardNormal) * 2.0))
            .collect();
        (model, obs)
    }

    #[test]
    fn loglik_matches_dense_joint_density() {
        let mut rng = ChaCha20Rng::seed_from_u64(1234);
        for rep in 0..20 {
            let t_len = 2 + rep % 6;
            let k = 1 + rep % 3;
            let m = 1 + rep % 2;
            let (model, obs) = random_model(&mut rng, t_len, k, m);
            let fast = kalman_loglik(&model, &obs).unwrap();
            let dense = oracles::dense_joint_loglik(&model, &obs);
            assert!(
                (fast - dense).abs() < 1e-8,
                "rep {rep}: filter {fast} vs dense {dense}"
            );
        }
    }

    #[test]
    fn degenerate_state_reduces_to_iid_normal() {
        // Q = 0, Z = I, P0 = 0: observations are iid N(mean0, H).
        let k = 2;
        let t_len = 8;
        let h = mat(2, 2, &[1.3, 0.4, 0.4, 0.9]);
        let mean0 = DVector::from_row_slice(&[0.7, -0.2]);
        let model = LinearGaussianSsm::random_walk(
            vec![DMatrix::identity(k, k); t_len],
            vec![h.clone(); t_len],
            StateNoise::Constant(DMatrix::zeros(k, k)),
            mean0.clone(),
            DMatrix::zeros(k, k),
        )
        .unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let obs: Vec<DVector<f64>> = (0..t_len)
            .map(|_| DVector::from_fn(k, |_, _| rng.sample::<f64, _>(StandardNormal)))
            .collect();
        let loglik = kalman_loglik(&model, &obs).unwrap();
        let chol = Cholesky::new(h).unwrap();
        let logdet: f64 = (0..k).map(|i| chol.l()[(i, i)].ln()).sum::<f64>() * 2.0;
        let direct: f64 = obs
            .iter()
            .map(|y| {
                let d = y - &mean0;
                let sol = chol.solve(&d);
                -0.5 * (k as f64 * LN_2PI + logdet + d.dot(&sol))
            })
            .sum();
        assert!((loglik - direct).abs() < 1e-10);
    }

    #[test]
    fn single_observation_conjugate_formula() {
        // y ~ N(Z mean0, Z P0 Z' + H), the one-step marginal likelihood.
        let z = mat(1, 2, &[1.0, -0.5]);
        let h = mat(1, 1, &[0.49]);
        let p0 = mat(2, 2, &[2.0, 0.3, 0.3, 1.0]);
        let mean0 = DVector::from_row_slice(&[0.2, 0.8]);
        let model = LinearGaussianSsm::random_walk(
            vec![z.clone()],
            vec![h.clone()],
            StateNoise::Constant(DMatrix::zeros(2, 2)),
            mean0.clone(),
            p0.clone(),
        )
        .unwrap();
        let y = DVector::from_row_slice(&[1.1]);
        let loglik = kalman_loglik(&model, &[y.clone()]).unwrap();
        let var = (&z * &p0 * z.transpose() + &h)[(0, 0)];
        let mean = (&z * &mean0)[0];
        let direct = -0.5 * (LN_2PI + var.ln() + (y[0] - mean).powi(2) / var);
        assert!((loglik - direct).abs() < 1e-12);
    }

    #[test]
    fn smoothed_mean_matches_dense_conditional() {
        let mut rng = ChaCha20Rng::seed_from_u64(77);
        for rep in 0..10 {
            let (model, obs) = random_model(&mut rng, 2 + rep % 5, 1 + rep % 3, 1 + rep % 2);
            let fast = smoothed_state_mean(&model, &obs).unwrap();
            let (dense_mean, _) = oracles::dense_conditional_moments(&model, &obs);
            assert!(
                (&fast - &dense_mean).amax() < 1e-8,
                "rep {rep}: max deviation {}",
                (&fast - &dense_mean).amax()
            );
        }
    }

    #[test]
    fn smoother_is_deterministic_given_seed() {
        let mut rng_a = ChaCha20Rng::seed_from_u64(5);
        let mut rng_b = ChaCha20Rng::seed_from_u64(5);
        let (model, obs) = random_model(&mut ChaCha20Rng::seed_from_u64(2), 6, 2, 1);
        let d1 = simulation_smoother(&model, &obs, &mut rng_a).unwrap();
        let d2 = simulation_smoother(&model, &obs, &mut rng_b).unwrap();
        assert_eq!(d1, d2);
    }

    #[test]
    fn zero_state_noise_draws_are_constant_and_match_gls() {
        // With Q = 0 the state is one unknown vector; the posterior is the
        // conjugate Gaussian combination of prior and all observations.
        let k = 2;
        let t_len = 12;
        let mut rng = ChaCha20Rng::seed_from_u64(31);
        let obs_mats: Vec<DMatrix<f64>> = (0..t_len)
            .map(|_| DMatrix::from_fn(1, k, |_, _| rng.sample::<f64, _>(StandardNormal)))
            .collect();
        let h = mat(1, 1, &[0.64]);
        let p0 = DMatrix::identity(k, k) * 4.0;
        let mean0 = DVector::zeros(k);
        let model = LinearGaussianSsm::random_walk(
            obs_mats.clone(),
            vec![h.clone(); t_len],
            StateNoise::Constant(DMatrix::zeros(k, k)),
            mean0.clone(),
            p0.clone(),
        )
        .unwrap();
        let truth = DVector::from_row_slice(&[1.5, -0.7]);
        let obs: Vec<DVector<f64>> = obs_mats
            .iter()
            .map(|z| z * &truth + DVector::from_row_slice(&[0.8 * rng.sample::<f64, _>(StandardNormal)]))
            .collect();

        // conjugate posterior
        let mut prec = p0.clone().try_inverse().unwrap();
        let mut rhs = prec.clone() * &mean0;
        for (z, y) in obs_mats.iter().zip(obs.iter()) {
            prec += z.transpose() * z / h[(0, 0)];
            rhs += z.transpose() * y / h[(0, 0)];
        }
        let post_cov = prec.try_inverse().unwrap();
        let post_mean = &post_cov * rhs;

        let n_draws = 40_000;
        let mut sum = DVector::zeros(k);
        let mut sum_sq = DMatrix::zeros(k, k);
        for _ in 0..n_draws {
            let draw = simulation_smoother(&model, &obs, &mut rng).unwrap();
            // constant across time, exactly
            for t in 1..t_len {
                for j in 0..k {
                    assert_eq!(draw[(t, j)], draw[(0, j)]);
                }
            }
            let row = draw.row(0).transpose();
            sum += &row;
            sum_sq += &row * row.transpose();
        }
        let emp_mean = sum / n_draws as f64;
        let emp_cov = sum_sq / n_draws as f64 - &emp_mean * emp_mean.transpose();
        for j in 0..k {
            let se = (post_cov[(j, j)] / n_draws as f64).sqrt();
            assert!(
                (emp_mean[j] - post_mean[j]).abs() < 4.0 * se,
                "mean[{j}]: {} vs {}",
                emp_mean[j],
                post_mean[j]
            );
            assert!((emp_cov[(j, j)] - post_cov[(j, j)]).abs() < 0.05 * post_cov[(j, j)].max(1e-4));
        }
    }

    #[test]
    fn huge_observation_noise_reverts_to_prior_increments() {
        // With nearly uninformative observations the smoothed increments
        // should carry the prior random-walk variance Q.
        let t_len = 400;
        let q = 0.25;
        let model = LinearGaussianSsm::random_walk(
            vec![mat(1, 1, &[1.0]); t_len],
            vec![mat(1, 1, &[1e8]); t_len],
            StateNoise::Constant(mat(1, 1, &[q])),
            DVector::zeros(1),
            mat(1, 1, &[1.0]),
        )
        .unwrap();
        let obs: Vec<DVector<f64>> = (0..t_len).map(|_| DVector::zeros(1)).collect();
        let mut rng = ChaCha20Rng::seed_from_u64(123);
        let mut incs = Vec::new();
        for _ in 0..40 {
            let draw = simulation_smoother(&model, &obs, &mut rng).unwrap();
            for t in 1..t_len {
                incs.push(draw[(t, 0)] - draw[(t - 1, 0)]);
            }
        }
        let var = crate::stats::variance(&incs);
        assert!(
            (var - q).abs() < 0.02,
            "increment variance {var} should be near {q}"
        );
    }
}
