//! Linear-Gaussian state-space machinery: Kalman filter log-likelihood,
//! an exact simulation smoother for drawing whole state paths, and the
//! auxiliary-mixture device used by the stochastic-volatility block.

mod filter;
mod mixture;
mod model;

pub use filter::{kalman_loglik, simulation_smoother, smoothed_state_mean};
pub use mixture::{
    log_sq_transform, sv_auxiliary_sample, MixtureComponent, LOG_CHI2_MIXTURE, SV_OFFSET,
};
pub use model::{LinearGaussianSsm, StateNoise};
