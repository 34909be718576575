//! Time-varying impulse responses.
//!
//! At each requested date the reduced-form lag matrices and the
//! contemporaneous matrix are frozen at their date-t values. A shock to
//! variable j has size sigma_bar_j, the sample-average stochastic
//! volatility exp(h_jt/2) of that variable, so responses are comparable
//! across dates; the impact vector is A_t^{-1} (sigma_bar_j e_j) and later
//! horizons propagate through the companion form.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use std::path::Path;

use crate::error::{Error, Result};
use crate::tvp::{unstack_coefficients, PosteriorDraws, TvpVarSpec};

/// Whether responses average per-draw surfaces or use the posterior-mean
/// state paths (the documented fast mode).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IrfMode {
    PerDraw,
    PosteriorMean,
}

/// Responses indexed by (shock, response, date, horizon).
#[derive(Debug, Clone)]
pub struct IrfSurface {
    pub variable_names: Vec<String>,
    pub date_labels: Vec<String>,
    pub date_indices: Vec<usize>,
    pub horizons: Vec<usize>,
    /// Shock-size convention record: sigma_bar per shock variable.
    pub shock_sizes: Vec<f64>,
    pub mode: IrfMode,
    n_vars: usize,
    values: Vec<f64>,
}

impl IrfSurface {
    fn index(&self, shock: usize, response: usize, date_pos: usize, horizon_pos: usize) -> usize {
        ((shock * self.n_vars + response) * self.date_indices.len() + date_pos)
            * self.horizons.len()
            + horizon_pos
    }

    pub fn response(
        &self,
        shock: usize,
        response: usize,
        date_pos: usize,
        horizon_pos: usize,
    ) -> f64 {
        self.values[self.index(shock, response, date_pos, horizon_pos)]
    }
}

pub(crate) fn companion_matrix(b_mats: &[DMatrix<f64>]) -> DMatrix<f64> {
    let n = b_mats[0].nrows();
    let p = b_mats.len();
    let np = n * p;
    let mut c = DMatrix::zeros(np, np);
    for (i, b) in b_mats.iter().enumerate() {
        c.view_mut((0, i * n), (n, n)).copy_from(b);
    }
    for i in 0..n * (p - 1) {
        c[(n + i, i)] = 1.0;
    }
    c
}

/// Responses at horizons 0..=max_h to an impact vector, by repeated
/// companion-matrix multiplication of the stacked state.
pub(crate) fn propagate_companion(
    b_mats: &[DMatrix<f64>],
    impact: &DVector<f64>,
    max_h: usize,
) -> Vec<DVector<f64>> {
    let n = impact.len();
    let comp = companion_matrix(b_mats);
    let np = comp.nrows();
    let mut state = DVector::zeros(np);
    state.rows_mut(0, n).copy_from(impact);
    let mut out = Vec::with_capacity(max_h + 1);
    out.push(impact.clone());
    for _ in 1..=max_h {
        state = &comp * state;
        out.push(state.rows(0, n).clone_owned());
    }
    out
}

/// Unit-lower-triangular inverse by forward substitution.
fn lower_unit_inverse(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    a.solve_lower_triangular(&DMatrix::identity(n, n))
        .expect("unit lower triangular is invertible")
}

struct PathSlices<'a> {
    beta: &'a dyn Fn(usize, usize) -> f64, // (t, i)
    a: &'a dyn Fn(usize, usize) -> f64,
    sigma_bar: &'a [f64],
}

fn responses_for_date(
    spec: &TvpVarSpec,
    paths: &PathSlices<'_>,
    t: usize,
    max_h: usize,
) -> Vec<Vec<DVector<f64>>> {
    let n = spec.n_vars;
    let k_a = spec.k_a();
    let a_free: Vec<f64> = (0..k_a).map(|i| (paths.a)(t, i)).collect();
    let a_mat = crate::tvp::build_a_matrix(&a_free, n);
    let a_inv = lower_unit_inverse(&a_mat);
    let beta_row: Vec<f64> = (0..spec.k_beta()).map(|i| (paths.beta)(t, i)).collect();
    let (_, b_mats) = unstack_coefficients(&beta_row, spec);
    (0..n)
        .map(|shock| {
            let impact = a_inv.column(shock) * paths.sigma_bar[shock];
            propagate_companion(&b_mats, &impact.clone_owned(), max_h)
        })
        .collect()
}

/// Compute the impulse-response surface over the requested dates and
/// horizons. Per-draw mode accumulates draws in index order at every date,
/// so results do not depend on the parallel schedule across dates.
pub fn tv_irf(
    draws: &PosteriorDraws,
    mode: IrfMode,
    date_indices: &[usize],
    horizons: &[usize],
) -> Result<IrfSurface> {
    if draws.n_draws() == 0 {
        return Err(Error::invalid("no retained draws"));
    }
    if date_indices.is_empty() || horizons.is_empty() {
        return Err(Error::invalid("need at least one date and one horizon"));
    }
    for &t in date_indices {
        if t >= draws.t_eff {
            return Err(Error::invalid(format!(
                "date index {t} outside the effective sample 0..{}",
                draws.t_eff
            )));
        }
    }
    let spec = &draws.spec;
    let n = spec.n_vars;
    let max_h = *horizons.iter().max().unwrap();
    let n_dates = date_indices.len();
    let n_h = horizons.len();

    // sigma_bar per draw (time-average volatility), plus its posterior mean
    let sigma_bar_for = |draw: usize| -> Vec<f64> {
        (0..n)
            .map(|j| {
                let mut acc = 0.0;
                for t in 0..draws.t_eff {
                    acc += (0.5 * draws.h_at(draw, t, j)).exp();
                }
                acc / draws.t_eff as f64
            })
            .collect()
    };

    let (mean_beta, mean_a, mean_h) = match mode {
        IrfMode::PosteriorMean => {
            let (b, a, h) = draws.mean_paths();
            (Some(b), Some(a), Some(h))
        }
        IrfMode::PerDraw => (None, None, None),
    };

    let mut shock_sizes = vec![0.0; n];
    match mode {
        IrfMode::PerDraw => {
            for d in 0..draws.n_draws() {
                let s = sigma_bar_for(d);
                for j in 0..n {
                    shock_sizes[j] += s[j];
                }
            }
            for v in shock_sizes.iter_mut() {
                *v /= draws.n_draws() as f64;
            }
        }
        IrfMode::PosteriorMean => {
            let h = mean_h.as_ref().unwrap();
            for j in 0..n {
                let mut acc = 0.0;
                for t in 0..draws.t_eff {
                    acc += (0.5 * h[(t, j)]).exp();
                }
                shock_sizes[j] = acc / draws.t_eff as f64;
            }
        }
    }

    // per-date blocks, parallel across dates, draw order fixed within
    let per_date: Vec<Vec<f64>> = date_indices
        .par_iter()
        .map(|&t| {
            let mut acc = vec![0.0; n * n * n_h];
            match mode {
                IrfMode::PerDraw => {
                    for d in 0..draws.n_draws() {
                        let sigma_bar = sigma_bar_for(d);
                        let beta = |tt: usize, i: usize| draws.beta_at(d, tt, i);
                        let a = |tt: usize, i: usize| draws.a_at(d, tt, i);
                        let slices = PathSlices {
                            beta: &beta,
                            a: &a,
                            sigma_bar: &sigma_bar,
                        };
                        let resp = responses_for_date(spec, &slices, t, max_h);
                        for shock in 0..n {
                            for (hp, &s) in horizons.iter().enumerate() {
                                for r in 0..n {
                                    acc[(shock * n + r) * n_h + hp] += resp[shock][s][r];
                                }
                            }
                        }
                    }
                    for v in acc.iter_mut() {
                        *v /= draws.n_draws() as f64;
                    }
                }
                IrfMode::PosteriorMean => {
                    let mb = mean_beta.as_ref().unwrap();
                    let ma = mean_a.as_ref().unwrap();
                    let beta = |tt: usize, i: usize| mb[(tt, i)];
                    let a = |tt: usize, i: usize| ma[(tt, i)];
                    let slices = PathSlices {
                        beta: &beta,
                        a: &a,
                        sigma_bar: &shock_sizes,
                    };
                    let resp = responses_for_date(spec, &slices, t, max_h);
                    for shock in 0..n {
                        for (hp, &s) in horizons.iter().enumerate() {
                            for r in 0..n {
                                acc[(shock * n + r) * n_h + hp] = resp[shock][s][r];
                            }
                        }
                    }
                }
            }
            acc
        })
        .collect();

    let mut values = vec![0.0; n * n * n_dates * n_h];
    for (dp, block) in per_date.iter().enumerate() {
        for shock in 0..n {
            for r in 0..n {
                for hp in 0..n_h {
                    values[((shock * n + r) * n_dates + dp) * n_h + hp] =
                        block[(shock * n + r) * n_h + hp];
                }
            }
        }
    }
    let date_labels = date_indices
        .iter()
        .map(|&t| {
            draws
                .dates
                .get(t)
                .map(|d| d.to_string())
                .unwrap_or_else(|| format!("t{t}"))
        })
        .collect();
    Ok(IrfSurface {
        variable_names: spec.variable_order.clone(),
        date_labels,
        date_indices: date_indices.to_vec(),
        horizons: horizons.to_vec(),
        shock_sizes,
        mode,
        n_vars: n,
        values,
    })
}

pub const IRF_TRACE_HEADER: &str = "shock,response,horizon,date,value";
pub const IRF_PROFILE_HEADER: &str = "shock,response,date,horizon,value";

/// Fixed-horizon traces: response against date for each kept horizon.
pub fn write_irf_trace_csv(path: &Path, surface: &IrfSurface) -> Result<()> {
    let mut out = String::from(IRF_TRACE_HEADER);
    out.push('\n');
    let n = surface.n_vars;
    for shock in 0..n {
        for resp in 0..n {
            for (hp, &h) in surface.horizons.iter().enumerate() {
                for dp in 0..surface.date_indices.len() {
                    out.push_str(&format!(
                        "{},{},{},{},{}\n",
                        surface.variable_names[shock],
                        surface.variable_names[resp],
                        h,
                        surface.date_labels[dp],
                        surface.response(shock, resp, dp, hp)
                    ));
                }
            }
        }
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Fixed-date profiles: response against horizon for each kept date.
pub fn write_irf_profile_csv(path: &Path, surface: &IrfSurface) -> Result<()> {
    let mut out = String::from(IRF_PROFILE_HEADER);
    out.push('\n');
    let n = surface.n_vars;
    for shock in 0..n {
        for resp in 0..n {
            for dp in 0..surface.date_indices.len() {
                for (hp, &h) in surface.horizons.iter().enumerate() {
                    out.push_str(&format!(
                        "{},{},{},{},{}\n",
                        surface.variable_names[shock],
                        surface.variable_names[resp],
                        surface.date_labels[dp],
                        h,
                        surface.response(shock, resp, dp, hp)
                    ));
                }
            }
        }
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}
