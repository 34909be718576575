//! Model container for a time-varying linear-Gaussian state-space form.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// State-innovation covariance: one matrix reused for every transition, or
/// one per step (the t-th entry carries state t to t+1).
#[derive(Debug, Clone)]
pub enum StateNoise {
    Constant(DMatrix<f64>),
    PerStep(Vec<DMatrix<f64>>),
}

impl StateNoise {
    pub fn at(&self, t: usize) -> &DMatrix<f64> {
        match self {
            StateNoise::Constant(q) => q,
            StateNoise::PerStep(qs) => &qs[t],
        }
    }
}

/// Time-varying linear-Gaussian state-space model
///
/// ```text
/// y_t = Z_t a_t + e_t,      e_t ~ N(0, H_t),      t = 1..T
/// a_{t+1} = F a_t + n_t,    n_t ~ N(0, Q_t),      t = 1..T-1
/// a_1 ~ N(mean0, cov0)
/// ```
///
/// The transition matrix is shared across time; random-walk states use the
/// identity, which the filter detects and fast-paths.
#[derive(Debug, Clone)]
pub struct LinearGaussianSsm {
    pub obs_mats: Vec<DMatrix<f64>>,
    pub obs_covs: Vec<DMatrix<f64>>,
    pub transition: DMatrix<f64>,
    pub state_noise: StateNoise,
    pub init_mean: DVector<f64>,
    pub init_cov: DMatrix<f64>,
    pub(crate) transition_is_identity: bool,
}

const SYM_TOL: f64 = 1e-8;

fn check_symmetric(m: &DMatrix<f64>, what: &str) -> Result<()> {
    let scale = m.amax().max(1.0);
    for i in 0..m.nrows() {
        for j in i + 1..m.ncols() {
            if (m[(i, j)] - m[(j, i)]).abs() > SYM_TOL * scale {
                return Err(Error::invalid(format!("{what} is not symmetric")));
            }
        }
        if m[(i, i)] < -SYM_TOL * scale {
            return Err(Error::invalid(format!("{what} has a negative diagonal")));
        }
    }
    Ok(())
}

impl LinearGaussianSsm {
    pub fn new(
        obs_mats: Vec<DMatrix<f64>>,
        obs_covs: Vec<DMatrix<f64>>,
        transition: DMatrix<f64>,
        state_noise: StateNoise,
        init_mean: DVector<f64>,
        init_cov: DMatrix<f64>,
    ) -> Result<Self> {
        let t_len = obs_mats.len();
        if t_len == 0 {
            return Err(Error::invalid("state-space model needs at least one step"));
        }
        if obs_covs.len() != t_len {
            return Err(Error::invalid(format!(
                "got {} observation matrices but {} observation covariances",
                t_len,
                obs_covs.len()
            )));
        }
        let k = init_mean.len();
        let m = obs_mats[0].nrows();
        if transition.nrows() != k || transition.ncols() != k {
            return Err(Error::invalid("transition matrix dimension mismatch"));
        }
        if init_cov.nrows() != k || init_cov.ncols() != k {
            return Err(Error::invalid("initial covariance dimension mismatch"));
        }
        for (t, z) in obs_mats.iter().enumerate() {
            if z.nrows() != m || z.ncols() != k {
                return Err(Error::invalid(format!(
                    "observation matrix at step {t} is {}x{}, expected {m}x{k}",
                    z.nrows(),
                    z.ncols()
                )));
            }
        }
        for (t, h) in obs_covs.iter().enumerate() {
            if h.nrows() != m || h.ncols() != m {
                return Err(Error::invalid(format!(
                    "observation covariance at step {t} has wrong dimension"
                )));
            }
            check_symmetric(h, &format!("observation covariance at step {t}"))?;
        }
        match &state_noise {
            StateNoise::Constant(q) => {
                if q.nrows() != k || q.ncols() != k {
                    return Err(Error::invalid("state covariance dimension mismatch"));
                }
                check_symmetric(q, "state covariance")?;
            }
            StateNoise::PerStep(qs) => {
                if t_len > 1 && qs.len() != t_len - 1 {
                    return Err(Error::invalid(format!(
                        "need {} per-step state covariances, got {}",
                        t_len - 1,
                        qs.len()
                    )));
                }
                for (t, q) in qs.iter().enumerate() {
                    if q.nrows() != k || q.ncols() != k {
                        return Err(Error::invalid(format!(
                            "state covariance at step {t} has wrong dimension"
                        )));
                    }
                    check_symmetric(q, &format!("state covariance at step {t}"))?;
                }
            }
        }
        check_symmetric(&init_cov, "initial covariance")?;
        let transition_is_identity = transition == DMatrix::identity(k, k);
        Ok(LinearGaussianSsm {
            obs_mats,
            obs_covs,
            transition,
            state_noise,
            init_mean,
            init_cov,
            transition_is_identity,
        })
    }

    /// Convenience constructor for random-walk states (identity transition).
    pub fn random_walk(
        obs_mats: Vec<DMatrix<f64>>,
        obs_covs: Vec<DMatrix<f64>>,
        state_noise: StateNoise,
        init_mean: DVector<f64>,
        init_cov: DMatrix<f64>,
    ) -> Result<Self> {
        let k = init_mean.len();
        LinearGaussianSsm::new(
            obs_mats,
            obs_covs,
            DMatrix::identity(k, k),
            state_noise,
            init_mean,
            init_cov,
        )
    }

    pub fn n_steps(&self) -> usize {
        self.obs_mats.len()
    }

    pub fn state_dim(&self) -> usize {
        self.init_mean.len()
    }

    pub fn obs_dim(&self) -> usize {
        self.obs_mats[0].nrows()
    }
}
