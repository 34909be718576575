//! Time-varying-parameter VAR with stochastic volatility.
//!
//! Structural form: `A_t y_t = F_1t y_{t-1} + ... + F_pt y_{t-p} + u_t`
//! with `A_t` unit lower triangular and `u_t ~ N(0, S_t S_t')`,
//! `S_t = diag(exp(h_t/2))`. In reduced form
//! `y_t = [c_t +] B_1t y_{t-1} + ... + B_pt y_{t-p} + e_t`,
//! `e_t ~ N(0, A_t^{-1} S_t S_t' A_t^{-T})`. The stacked coefficient vector
//! `beta_t`, the free elements `a_t` of `A_t`, and the log variances `h_t`
//! all follow first-order random walks; their increment precisions carry
//! Gamma priors. Estimation is a fixed-scan Gibbs sampler (beta, a, h,
//! hyperparameters) built on the exact simulation smoother.

mod draws;
mod regressors;
mod sampler;
mod spec;

pub use draws::{read_draw_store, write_draw_store, PosteriorDraws};
pub use regressors::{build_a_matrix, build_regressors, unstack_coefficients, VarData};
pub use sampler::{run_mcmc, run_mcmc_on_matrix, GibbsSampler};
pub use spec::{GammaPrior, InterceptMode, McmcConfig, PriorSpec, TvpVarSpec};
