//! Classical pre-estimation tests: ADF unit-root test with MacKinnon
//! response-surface p-values, VAR lag-order selection by the six usual
//! criteria, and pairwise Granger causality F-tests.

mod adf;
mod granger;
mod lag_select;

pub use adf::{adf_test, mackinnon_p, AdfResult, AdfSpec, Deterministic, LagChoice};
pub use granger::{granger_test, GrangerResult};
pub use lag_select::{
    select_var_lag, select_var_lag_matrix, LagRow, LagSelectionTable, SelectedLags,
};
