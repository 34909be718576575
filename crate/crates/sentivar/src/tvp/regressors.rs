//! Regressor construction and the stacking convention.
//!
//! With x_t = ([1,] y'_{t-1}, ..., y'_{t-p}) the observation matrix is
//! X_t = I_n (x) x_t' and the coefficient state stacks the rows of
//! [c_t B_1t ... B_pt]: equation i occupies the slice
//! beta[i*k_x .. (i+1)*k_x] in regressor order.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::tvp::spec::TvpVarSpec;

/// Effective-sample regressors and observations for the VAR.
#[derive(Debug, Clone)]
pub struct VarData {
    /// x_t per effective time, each of length k_x.
    pub x_rows: Vec<DVector<f64>>,
    /// y_t per effective time, each of length n (ordered per the spec).
    pub obs: Vec<DVector<f64>>,
    /// Per-variable offsets removed before estimation (zeros unless the
    /// intercept mode demeans).
    pub offsets: Vec<f64>,
}

impl VarData {
    pub fn t_eff(&self) -> usize {
        self.obs.len()
    }

    /// Dense X_t = I_n (x) x_t'.
    pub fn obs_matrix(&self, t: usize, n_vars: usize) -> DMatrix<f64> {
        let k_x = self.x_rows[t].len();
        let mut z = DMatrix::zeros(n_vars, n_vars * k_x);
        for i in 0..n_vars {
            for j in 0..k_x {
                z[(i, i * k_x + j)] = self.x_rows[t][j];
            }
        }
        z
    }
}

/// Build the effective-sample regressors from a T x n data matrix whose
/// columns are already in identification order. The first `lag_order` rows
/// are consumed as initial conditions.
pub fn build_regressors(data: &DMatrix<f64>, spec: &TvpVarSpec) -> Result<VarData> {
    spec.validate()?;
    let t_len = data.nrows();
    let n = spec.n_vars;
    let p = spec.lag_order;
    if data.ncols() != n {
        return Err(Error::invalid(format!(
            "data has {} columns, spec expects {n}",
            data.ncols()
        )));
    }
    if t_len <= p {
        return Err(Error::invalid(format!(
            "sample of {t_len} rows cannot support lag order {p}"
        )));
    }

    let (work, offsets) = if spec.intercept_mode == crate::tvp::InterceptMode::DemeanedConstant {
        let mut offsets = vec![0.0; n];
        let mut demeaned = data.clone();
        for j in 0..n {
            let mean = data.column(j).sum() / t_len as f64;
            offsets[j] = mean;
            for i in 0..t_len {
                demeaned[(i, j)] -= mean;
            }
        }
        (demeaned, offsets)
    } else {
        (data.clone(), vec![0.0; n])
    };

    let k_x = spec.k_x();
    let with_const = spec.intercept_mode.has_intercept_state();
    let mut x_rows = Vec::with_capacity(t_len - p);
    let mut obs = Vec::with_capacity(t_len - p);
    for t in p..t_len {
        let mut x = DVector::zeros(k_x);
        let mut col = 0;
        if with_const {
            x[0] = 1.0;
            col = 1;
        }
        for lag in 1..=p {
            for j in 0..n {
                x[col] = work[(t - lag, j)];
                col += 1;
            }
        }
        x_rows.push(x);
        obs.push(work.row(t).transpose().clone_owned());
    }
    Ok(VarData {
        x_rows,
        obs,
        offsets,
    })
}

/// Split one stacked coefficient vector back into the intercept (when
/// present) and the lag matrices B_1..B_p.
pub fn unstack_coefficients(
    beta: &[f64],
    spec: &TvpVarSpec,
) -> (Option<DVector<f64>>, Vec<DMatrix<f64>>) {
    let n = spec.n_vars;
    let p = spec.lag_order;
    let k_x = spec.k_x();
    debug_assert_eq!(beta.len(), n * k_x);
    let with_const = spec.intercept_mode.has_intercept_state();
    let intercept = if with_const {
        Some(DVector::from_iterator(
            n,
            (0..n).map(|i| beta[i * k_x]),
        ))
    } else {
        None
    };
    let base = usize::from(with_const);
    let mats = (1..=p)
        .map(|lag| {
            DMatrix::from_fn(n, n, |i, j| beta[i * k_x + base + (lag - 1) * n + j])
        })
        .collect();
    (intercept, mats)
}

/// Rebuild the unit-lower-triangular A_t from its free elements, stacked
/// row by row: (a_21, a_31, a_32, ...).
pub fn build_a_matrix(a_free: &[f64], n: usize) -> DMatrix<f64> {
    let mut a = DMatrix::identity(n, n);
    let mut idx = 0;
    for i in 1..n {
        for j in 0..i {
            a[(i, j)] = a_free[idx];
            idx += 1;
        }
    }
    debug_assert_eq!(idx, a_free.len());
    a
}
