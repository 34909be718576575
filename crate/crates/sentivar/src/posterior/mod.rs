//! Posterior summaries, convergence diagnostics, and time-varying
//! impulse-response surfaces.

mod diagnostics;
mod irf;
mod summary;

pub use diagnostics::{geweke_cd, inefficiency_factor};
pub use irf::{
    tv_irf, write_irf_profile_csv, write_irf_trace_csv, IrfMode, IrfSurface,
};
pub use summary::{
    summarize, summarize_chain, write_summary_csv, ParamSummary, PosteriorSummary,
    SUMMARY_HEADER,
};
