//! Forward simulation of the TVP-VAR-SV model with known ground truth, for
//! recovery experiments and end-to-end pipeline runs on generated inputs.

use chrono::{Datelike, NaiveDate, Weekday};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::ingest::{CommentRecord, Label, MarketBar};
use crate::tvp::{build_a_matrix, unstack_coefficients, TvpVarSpec};

/// Ground-truth path generator for one state block.
#[derive(Debug, Clone)]
pub enum PathSpec {
    /// The same vector at every date.
    Constant(Vec<f64>),
    /// First-order random walk from `start` with per-element increment SDs.
    RandomWalk {
        start: Vec<f64>,
        increment_sd: Vec<f64>,
    },
}

impl PathSpec {
    fn dim(&self) -> usize {
        match self {
            PathSpec::Constant(v) => v.len(),
            PathSpec::RandomWalk { start, .. } => start.len(),
        }
    }

    fn generate<R: Rng + ?Sized>(&self, t_eff: usize, rng: &mut R) -> DMatrix<f64> {
        let dim = self.dim();
        let mut out = DMatrix::zeros(t_eff, dim);
        match self {
            PathSpec::Constant(v) => {
                for t in 0..t_eff {
                    for (j, &x) in v.iter().enumerate() {
                        out[(t, j)] = x;
                    }
                }
            }
            PathSpec::RandomWalk {
                start,
                increment_sd,
            } => {
                let mut cur = start.clone();
                for t in 0..t_eff {
                    for j in 0..dim {
                        out[(t, j)] = cur[j];
                    }
                    for j in 0..dim {
                        let e: f64 = rng.sample(StandardNormal);
                        cur[j] += increment_sd[j] * e;
                    }
                }
            }
        }
        out
    }
}

/// Data-generating process description.
#[derive(Debug, Clone)]
pub struct DgpSpec {
    pub spec: TvpVarSpec,
    /// Total observation count, including the lag_order initial rows.
    pub t_len: usize,
    pub beta: PathSpec,
    pub a: PathSpec,
    pub h: PathSpec,
    pub seed: u64,
}

/// Simulated data together with the ground-truth state paths over the
/// effective sample.
#[derive(Debug, Clone)]
pub struct SimOutput {
    /// t_len x n observations, columns in identification order.
    pub data: DMatrix<f64>,
    pub beta_path: DMatrix<f64>,
    pub a_path: DMatrix<f64>,
    pub h_path: DMatrix<f64>,
}

const MAX_STABILITY_ATTEMPTS: usize = 1000;
const STABILITY_RADIUS: f64 = 0.98;

fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    m.complex_eigenvalues().iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn companion_radius(beta_row: &[f64], spec: &TvpVarSpec) -> f64 {
    let (_, b_mats) = unstack_coefficients(beta_row, spec);
    let n = spec.n_vars;
    let p = spec.lag_order;
    let np = n * p;
    let mut comp = DMatrix::zeros(np, np);
    for (i, b) in b_mats.iter().enumerate() {
        comp.view_mut((0, i * n), (n, n)).copy_from(b);
    }
    for i in 0..n * (p - 1) {
        comp[(n + i, i)] = 1.0;
    }
    spectral_radius(&comp)
}

impl DgpSpec {
    fn validate(&self) -> Result<()> {
        if self.spec.n_vars == 0 || self.spec.lag_order == 0 {
            return Err(Error::invalid("DGP needs at least one variable and lag"));
        }
        if self.t_len < 50 {
            return Err(Error::invalid(format!(
                "DGP sample length {} below the minimum of 50",
                self.t_len
            )));
        }
        if self.t_len <= self.spec.lag_order {
            return Err(Error::invalid("sample shorter than the lag order"));
        }
        if self.beta.dim() != self.spec.k_beta() {
            return Err(Error::invalid(format!(
                "beta path dimension {} does not match k_beta {}",
                self.beta.dim(),
                self.spec.k_beta()
            )));
        }
        if self.a.dim() != self.spec.k_a() {
            return Err(Error::invalid("a path dimension mismatch"));
        }
        if self.h.dim() != self.spec.n_vars {
            return Err(Error::invalid("h path dimension mismatch"));
        }
        Ok(())
    }
}

/// Run the model forward: states evolve as random walks, observations are
/// drawn from the implied reduced form. Deterministic per seed; coefficient
/// paths whose companion matrix ever leaves the stability region are
/// resampled, up to a limit.
pub fn simulate(dgp: &DgpSpec) -> Result<SimOutput> {
    dgp.validate()?;
    let spec = &dgp.spec;
    let n = spec.n_vars;
    let p = spec.lag_order;
    let t_eff = dgp.t_len - p;
    let mut rng = ChaCha20Rng::seed_from_u64(dgp.seed);

    let mut beta_path = None;
    for attempt in 0..=MAX_STABILITY_ATTEMPTS {
        if attempt == MAX_STABILITY_ATTEMPTS {
            return Err(Error::invalid(format!(
                "no stable coefficient path found in {MAX_STABILITY_ATTEMPTS} attempts \
                 (spectral radius must stay below {STABILITY_RADIUS})"
            )));
        }
        let candidate = dgp.beta.generate(t_eff, &mut rng);
        let stable = (0..t_eff).all(|t| {
            let row: Vec<f64> = candidate.row(t).iter().cloned().collect();
            companion_radius(&row, spec) <= STABILITY_RADIUS
        });
        if stable {
            beta_path = Some(candidate);
            break;
        }
        if matches!(dgp.beta, PathSpec::Constant(_)) {
            // a constant explosive path can never be resampled into the
            // stability region
            return Err(Error::invalid(format!(
                "constant coefficient path has companion spectral radius above {STABILITY_RADIUS}"
            )));
        }
    }
    let beta_path = beta_path.expect("loop either sets the path or errors");
    let a_path = dgp.a.generate(t_eff, &mut rng);
    let h_path = dgp.h.generate(t_eff, &mut rng);

    let mut data = DMatrix::zeros(dgp.t_len, n);
    for t in 0..p {
        for j in 0..n {
            data[(t, j)] = rng.sample::<f64, _>(StandardNormal);
        }
    }
    let k_x = spec.k_x();
    let with_const = spec.intercept_mode.has_intercept_state();
    for t in p..dgp.t_len {
        let s = t - p; // state index
        let mut x = DVector::zeros(k_x);
        let mut col = 0;
        if with_const {
            x[0] = 1.0;
            col = 1;
        }
        for lag in 1..=p {
            for j in 0..n {
                x[col] = data[(t - lag, j)];
                col += 1;
            }
        }
        // structural shock, then reduced-form error e = A^{-1} S eps
        let a_row: Vec<f64> = a_path.row(s).iter().cloned().collect();
        let a_mat = build_a_matrix(&a_row, n);
        let eps = DVector::from_fn(n, |j, _| {
            (0.5 * h_path[(s, j)]).exp() * rng.sample::<f64, _>(StandardNormal)
        });
        let e = a_mat
            .solve_lower_triangular(&eps)
            .expect("unit lower triangular");
        for i in 0..n {
            let mut fitted = 0.0;
            for j in 0..k_x {
                fitted += x[j] * beta_path[(s, i * k_x + j)];
            }
            data[(t, i)] = fitted + e[i];
        }
    }
    Ok(SimOutput {
        data,
        beta_path,
        a_path,
        h_path,
    })
}

/// A convenient stable constant-coefficient DGP for recovery studies:
/// diagonal-dominant lag-1 block, decaying higher lags.
pub fn stable_constant_beta(spec: &TvpVarSpec, scale: f64) -> Vec<f64> {
    let n = spec.n_vars;
    let p = spec.lag_order;
    let k_x = spec.k_x();
    let mut beta = vec![0.0; spec.k_beta()];
    let base = usize::from(spec.intercept_mode.has_intercept_state());
    for i in 0..n {
        for lag in 1..=p {
            for j in 0..n {
                let idx = i * k_x + base + (lag - 1) * n + j;
                let decay = scale / lag as f64;
                beta[idx] = if i == j {
                    0.4 * decay
                } else {
                    0.1 * decay * if (i + j + lag) % 2 == 0 { 1.0 } else { -1.0 }
                };
            }
        }
    }
    beta
}

/// Generated CSV inputs for the batch pipeline.
#[derive(Debug, Clone)]
pub struct PipelineInputs {
    pub comments_path: PathBuf,
    pub market_path: PathBuf,
    /// Scaling applied to the first simulated variable so it fits the
    /// sentiment-index range.
    pub sent_scale: f64,
}

fn next_trading_day(d: NaiveDate) -> NaiveDate {
    let mut next = d.succ_opt().expect("date range");
    while matches!(next.weekday(), Weekday::Sat | Weekday::Sun) {
        next = next.succ_opt().expect("date range");
    }
    next
}

/// Emit comments.csv and market.csv reproducing the simulated trivariate
/// panel through the ingestion path. The first simulated variable is
/// rescaled into the index range and quantized to message counts (40
/// opinionated messages per day), the second is shifted positive to act as
/// a volatility column, and the third is integrated into a positive
/// turnover level whose first difference recovers it.
pub fn emit_pipeline_inputs(dir: &Path, dgp: &DgpSpec) -> Result<(PipelineInputs, SimOutput)> {
    if dgp.spec.n_vars != 3 {
        return Err(Error::invalid(
            "pipeline input emission needs the trivariate model",
        ));
    }
    let sim = simulate(dgp)?;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let t_len = dgp.t_len;
    let mut rng = ChaCha20Rng::seed_from_u64(dgp.seed ^ 0x5EED_CAFE);

    let mut dates = Vec::with_capacity(t_len);
    let mut d = NaiveDate::from_ymd_opt(2018, 1, 2).expect("valid date");
    for _ in 0..t_len {
        dates.push(d);
        d = next_trading_day(d);
    }

    // sentiment column: scale into [-0.95, 0.95]
    let sent_raw: Vec<f64> = (0..t_len).map(|t| sim.data[(t, 0)]).collect();
    let max_abs = sent_raw.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let sent_scale = if max_abs > 0.95 { 0.95 / max_abs } else { 1.0 };

    // volatility column: shift positive
    let rv_raw: Vec<f64> = (0..t_len).map(|t| sim.data[(t, 1)]).collect();
    let rv_min = rv_raw.iter().cloned().fold(f64::INFINITY, f64::min);
    let rv_shift = if rv_min < 0.05 { 0.05 - rv_min } else { 0.0 };

    // turnover level integrates the third column
    let mut cum = vec![0.0; t_len];
    for t in 1..t_len {
        cum[t] = cum[t - 1] + sim.data[(t, 2)];
    }
    let cum_min = cum.iter().cloned().fold(f64::INFINITY, f64::min);
    let turn_base = 0.5 - cum_min.min(0.0);

    let mut bars = Vec::with_capacity(t_len);
    for t in 0..t_len {
        bars.push(MarketBar {
            date: dates[t],
            turnover: turn_base + cum[t],
            rv: rv_raw[t] + rv_shift,
        });
    }
    let market_path = dir.join("market.csv");
    crate::ingest::write_market_csv(&market_path, &bars)?;

    // comments: 40 opinionated messages whose positive/negative split
    // reproduces the scaled sentiment to the nearest 1/20, plus neutral
    // filler and a long comment that the length filter must drop
    const OPINIONATED: usize = 40;
    let mut comments: Vec<CommentRecord> = Vec::new();
    for t in 0..t_len {
        let target = sent_raw[t] * sent_scale;
        let n_pos = ((OPINIONATED as f64 / 2.0) * (1.0 + target))
            .round()
            .clamp(0.0, OPINIONATED as f64) as usize;
        let n_neg = OPINIONATED - n_pos;
        let mut push = |label: Label, rng: &mut ChaCha20Rng| {
            let readership = 50 + (rng.gen::<u64>() % 5000);
            let (pos_prob, neg_prob) = match label {
                Label::Positive => (0.9, 0.05),
                Label::Negative => (0.05, 0.9),
                Label::Neutral => (0.2, 0.2),
            };
            comments.push(CommentRecord {
                date: dates[t],
                text_length: 20 + (rng.gen::<u32>() % 120),
                readership,
                replies: rng.gen::<u64>() % 20,
                label,
                pos_prob,
                neg_prob,
            });
        };
        for _ in 0..n_pos {
            push(Label::Positive, &mut rng);
        }
        for _ in 0..n_neg {
            push(Label::Negative, &mut rng);
        }
        for _ in 0..3 {
            push(Label::Neutral, &mut rng);
        }
        // an over-length comment the filter must remove; give it a huge
        // readership so surviving would distort the split
        comments.push(CommentRecord {
            date: dates[t],
            text_length: 150 + (rng.gen::<u32>() % 500),
            readership: 1_000_000,
            replies: 0,
            label: Label::Negative,
            pos_prob: 0.05,
            neg_prob: 0.9,
        });
    }
    let comments_path = dir.join("comments.csv");
    crate::ingest::write_comments_csv(&comments_path, &comments)?;

    Ok((
        PipelineInputs {
            comments_path,
            market_path,
            sent_scale,
        },
        sim,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles;
    use crate::stats;
    use crate::tvp::InterceptMode;

    fn spec(n: usize, p: usize) -> TvpVarSpec {
        TvpVarSpec {
            n_vars: n,
            lag_order: p,
            variable_order: (0..n).map(|i| format!("v{i}")).collect(),
            intercept_mode: InterceptMode::None,
        }
    }

    #[test]
    fn constant_var_matches_yule_walker_autocovariance() {
        let s = spec(2, 1);
        let beta = vec![0.6, 0.2, -0.1, 0.4]; // row-major [B1]
        let dgp = DgpSpec {
            spec: s.clone(),
            t_len: 50_000,
            beta: PathSpec::Constant(beta.clone()),
            a: PathSpec::Constant(vec![0.0]),
            h: PathSpec::Constant(vec![0.0, 0.0]),
            seed: 11,
        };
        let sim = simulate(&dgp).unwrap();
        let b1 = DMatrix::from_row_slice(2, 2, &[0.6, 0.2, -0.1, 0.4]);
        let gamma0 = oracles::var_autocovariance(&[b1.clone()], &DMatrix::identity(2, 2), 0);
        let gamma1 = oracles::var_autocovariance(&[b1], &DMatrix::identity(2, 2), 1);
        let t = sim.data.nrows();
        let mean: Vec<f64> = (0..2).map(|j| sim.data.column(j).sum() / t as f64).collect();
        let emp = |lag: usize, i: usize, j: usize| -> f64 {
            let mut acc = 0.0;
            for r in lag..t {
                acc += (sim.data[(r, i)] - mean[i]) * (sim.data[(r - lag, j)] - mean[j]);
            }
            acc / t as f64
        };
        for i in 0..2 {
            for j in 0..2 {
                let e0 = emp(0, i, j);
                assert!(
                    (e0 - gamma0[(i, j)]).abs() < 0.05 * gamma0[(i, i)].max(gamma0[(j, j)]),
                    "gamma0[{i}{j}] {e0} vs {}",
                    gamma0[(i, j)]
                );
                let e1 = emp(1, i, j);
                assert!(
                    (e1 - gamma1[(i, j)]).abs() < 0.05 * gamma0[(i, i)].max(gamma0[(j, j)]),
                    "gamma1[{i}{j}] {e1} vs {}",
                    gamma1[(i, j)]
                );
            }
        }
    }

    #[test]
    fn same_seed_reproduces_output() {
        let s = spec(3, 2);
        let dgp = DgpSpec {
            spec: s.clone(),
            t_len: 120,
            beta: PathSpec::RandomWalk {
                start: stable_constant_beta(&s, 1.0),
                increment_sd: vec![0.002; s.k_beta()],
            },
            a: PathSpec::RandomWalk {
                start: vec![-0.3, 0.1, 0.05],
                increment_sd: vec![0.005; 3],
            },
            h: PathSpec::RandomWalk {
                start: vec![0.0, -0.5, 0.5],
                increment_sd: vec![0.01; 3],
            },
            seed: 42,
        };
        let a = simulate(&dgp).unwrap();
        let b = simulate(&dgp).unwrap();
        assert_eq!(a.data, b.data);
        assert_eq!(a.beta_path, b.beta_path);
    }

    #[test]
    fn scalar_ar_half_has_half_autocorrelation() {
        let s = TvpVarSpec {
            n_vars: 1,
            lag_order: 1,
            variable_order: vec!["y".into()],
            intercept_mode: InterceptMode::None,
        };
        let dgp = DgpSpec {
            spec: s,
            t_len: 10_000,
            beta: PathSpec::Constant(vec![0.5]),
            a: PathSpec::Constant(vec![]),
            h: PathSpec::Constant(vec![0.0]),
            seed: 7,
        };
        let sim = simulate(&dgp).unwrap();
        let y: Vec<f64> = (0..sim.data.nrows()).map(|t| sim.data[(t, 0)]).collect();
        let rho = stats::autocovariance(&y, 1) / stats::autocovariance(&y, 0);
        assert!((rho - 0.5).abs() < 0.02, "lag-1 autocorrelation {rho}");
    }

    #[test]
    fn explosive_constant_path_is_rejected() {
        let s = spec(2, 1);
        let dgp = DgpSpec {
            spec: s,
            t_len: 100,
            beta: PathSpec::Constant(vec![1.2, 0.0, 0.0, 1.1]),
            a: PathSpec::Constant(vec![0.0]),
            h: PathSpec::Constant(vec![0.0, 0.0]),
            seed: 3,
        };
        assert!(simulate(&dgp).is_err());
    }

    #[test]
    fn random_walk_volatility_leaves_arch_signature() {
        let s = spec(2, 1);
        let dgp = DgpSpec {
            spec: s.clone(),
            t_len: 2_000,
            beta: PathSpec::Constant(vec![0.0; 4]),
            a: PathSpec::Constant(vec![0.0]),
            h: PathSpec::RandomWalk {
                start: vec![0.0, 0.0],
                increment_sd: vec![0.15, 0.15],
            },
            seed: 99,
        };
        let sim = simulate(&dgp).unwrap();
        let sq: Vec<f64> = (0..sim.data.nrows()).map(|t| sim.data[(t, 0)].powi(2)).collect();
        let rho = stats::autocovariance(&sq, 1) / stats::autocovariance(&sq, 0);
        let threshold = 4.0 / (sq.len() as f64).sqrt();
        assert!(
            rho > threshold,
            "squared-residual autocorrelation {rho} below detection threshold {threshold}"
        );
    }

    #[test]
    fn pipeline_inputs_reproduce_market_columns() {
        let s = TvpVarSpec::default();
        let dgp = DgpSpec {
            spec: s.clone(),
            t_len: 60,
            beta: PathSpec::Constant(stable_constant_beta(&s, 0.8)),
            a: PathSpec::Constant(vec![-0.2, 0.1, 0.0]),
            h: PathSpec::Constant(vec![-2.0, -2.0, -2.0]),
            seed: 5,
        };
        let dir = tempfile::tempdir().unwrap();
        let (inputs, sim) = emit_pipeline_inputs(dir.path(), &dgp).unwrap();
        let bars = crate::ingest::load_market(&inputs.market_path).unwrap();
        assert_eq!(bars.len(), 60);
        // first differences of the emitted turnover recover column 2
        for t in 1..60 {
            let d = bars[t].turnover - bars[t - 1].turnover;
            assert!((d - sim.data[(t, 2)]).abs() < 1e-9);
        }
        let comments = crate::ingest::load_comments(&inputs.comments_path).unwrap();
        let filtered = crate::ingest::filter_comments(&comments, 150, 50);
        let sent = crate::sentiment::daily_bullishness(&filtered, crate::sentiment::WeightScheme::Unit);
        assert_eq!(sent.len(), 60);
        for (t, day) in sent.days.iter().enumerate() {
            let target = sim.data[(t, 0)] * inputs.sent_scale;
            assert!(
                (day.value - target).abs() <= 0.5 / 20.0 + 1e-9,
                "day {t}: index {} vs target {target}",
                day.value
            );
        }
    }
}
