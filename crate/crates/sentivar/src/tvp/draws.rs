//! Retained-draw storage and the on-disk draw store.
//!
//! State paths are stored single-precision (a full run keeps tens of
//! millions of path values; the Monte Carlo error of any summary dwarfs the
//! rounding), hyperparameter draws in double precision. On disk each state
//! family is one binary file: an eight-byte magic, a JSON header carrying
//! the model/prior/chain metadata and dimensions, then the little-endian
//! payload.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tvp::spec::{McmcConfig, PriorSpec, TvpVarSpec};

/// Retained MCMC draws of all latent paths and hyperparameter variances.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorDraws {
    pub spec: TvpVarSpec,
    pub prior: PriorSpec,
    pub config: McmcConfig,
    /// Effective-sample dates (empty when estimated from a raw matrix).
    pub dates: Vec<NaiveDate>,
    /// Demeaning offsets applied before estimation (zeros otherwise).
    pub offsets: Vec<f64>,
    pub t_eff: usize,
    /// Per draw: row-major t_eff x k_beta coefficient path.
    pub beta: Vec<Vec<f32>>,
    /// Per draw: row-major t_eff x k_a free-element path.
    pub a_free: Vec<Vec<f32>>,
    /// Per draw: row-major t_eff x n log-variance path.
    pub log_vol: Vec<Vec<f32>>,
    pub hyper_var_beta: Vec<Vec<f64>>,
    pub hyper_var_a: Vec<Vec<f64>>,
    pub hyper_var_h: Vec<Vec<f64>>,
}

impl PosteriorDraws {
    pub fn empty(
        spec: TvpVarSpec,
        prior: PriorSpec,
        config: McmcConfig,
        dates: Vec<NaiveDate>,
        offsets: Vec<f64>,
        t_eff: usize,
    ) -> Self {
        let cap = config.retained();
        PosteriorDraws {
            spec,
            prior,
            config,
            dates,
            offsets,
            t_eff,
            beta: Vec::with_capacity(cap),
            a_free: Vec::with_capacity(cap),
            log_vol: Vec::with_capacity(cap),
            hyper_var_beta: Vec::with_capacity(cap),
            hyper_var_a: Vec::with_capacity(cap),
            hyper_var_h: Vec::with_capacity(cap),
        }
    }

    pub fn push_draw(
        &mut self,
        beta: &DMatrix<f64>,
        a_free: &DMatrix<f64>,
        log_vol: &DMatrix<f64>,
        var_beta: &DVector<f64>,
        var_a: &DVector<f64>,
        var_h: &DVector<f64>,
    ) {
        let flatten = |m: &DMatrix<f64>| -> Vec<f32> {
            let mut out = Vec::with_capacity(m.nrows() * m.ncols());
            for r in 0..m.nrows() {
                for c in 0..m.ncols() {
                    out.push(m[(r, c)] as f32);
                }
            }
            out
        };
        self.beta.push(flatten(beta));
        self.a_free.push(flatten(a_free));
        self.log_vol.push(flatten(log_vol));
        self.hyper_var_beta.push(var_beta.iter().cloned().collect());
        self.hyper_var_a.push(var_a.iter().cloned().collect());
        self.hyper_var_h.push(var_h.iter().cloned().collect());
    }

    pub fn n_draws(&self) -> usize {
        self.beta.len()
    }

    pub fn k_beta(&self) -> usize {
        self.spec.k_beta()
    }

    pub fn beta_at(&self, draw: usize, t: usize, i: usize) -> f64 {
        self.beta[draw][t * self.k_beta() + i] as f64
    }

    pub fn a_at(&self, draw: usize, t: usize, i: usize) -> f64 {
        self.a_free[draw][t * self.spec.k_a() + i] as f64
    }

    pub fn h_at(&self, draw: usize, t: usize, j: usize) -> f64 {
        self.log_vol[draw][t * self.spec.n_vars + j] as f64
    }

    /// Posterior-mean paths (over draws) of beta, a, and h.
    pub fn mean_paths(&self) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
        let nd = self.n_draws() as f64;
        let mean_of = |family: &[Vec<f32>], cols: usize| -> DMatrix<f64> {
            let mut m = DMatrix::zeros(self.t_eff, cols);
            for draw in family {
                for t in 0..self.t_eff {
                    for c in 0..cols {
                        m[(t, c)] += draw[t * cols + c] as f64;
                    }
                }
            }
            m / nd
        };
        (
            mean_of(&self.beta, self.k_beta()),
            mean_of(&self.a_free, self.spec.k_a()),
            mean_of(&self.log_vol, self.spec.n_vars),
        )
    }

    /// Hyperparameter draws mapped to increment standard deviations, with
    /// their report labels (1-based indices).
    pub fn hyper_sd_chains(&self) -> Vec<(String, Vec<f64>)> {
        let mut out = Vec::new();
        let push_block = |out: &mut Vec<(String, Vec<f64>)>, name: &str, block: &[Vec<f64>]| {
            if block.is_empty() {
                return;
            }
            let dim = block[0].len();
            for i in 0..dim {
                let chain: Vec<f64> = block.iter().map(|d| d[i].sqrt()).collect();
                out.push((format!("sigma_{name}_{}", i + 1), chain));
            }
        };
        push_block(&mut out, "beta", &self.hyper_var_beta);
        push_block(&mut out, "a", &self.hyper_var_a);
        push_block(&mut out, "h", &self.hyper_var_h);
        out
    }
}

const MAGIC: &[u8; 8] = b"SVDRAWS1";

#[derive(Debug, Serialize, Deserialize)]
struct StoreHeader {
    family: String,
    run_id: String,
    spec: TvpVarSpec,
    prior: PriorSpec,
    config: McmcConfig,
    dates: Vec<NaiveDate>,
    offsets: Vec<f64>,
    t_eff: usize,
    n_draws: usize,
    rows: usize,
    cols: usize,
    dtype: String,
    /// For the hyper file: dimensions of the beta/a/h variance blocks.
    blocks: Option<[usize; 3]>,
}

fn write_family_f32(
    path: &Path,
    header: &StoreHeader,
    draws: &[Vec<f32>],
) -> Result<()> {
    let mut buf: Vec<u8> = Vec::new();
    buf.extend_from_slice(MAGIC);
    let hj = serde_json::to_vec(header).expect("header serializes");
    buf.extend_from_slice(&(hj.len() as u32).to_le_bytes());
    buf.extend_from_slice(&hj);
    for d in draws {
        for v in d {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    std::fs::write(path, buf).map_err(|e| Error::io(path, e))
}

fn write_family_f64(path: &Path, header: &StoreHeader, rows: &[Vec<f64>]) -> Result<()> {
    let mut buf: Vec<u8> = Vec::new();
    buf.extend_from_slice(MAGIC);
    let hj = serde_json::to_vec(header).expect("header serializes");
    buf.extend_from_slice(&(hj.len() as u32).to_le_bytes());
    buf.extend_from_slice(&hj);
    for d in rows {
        for v in d {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    std::fs::write(path, buf).map_err(|e| Error::io(path, e))
}

fn read_header(path: &Path, bytes: &[u8]) -> Result<(StoreHeader, usize)> {
    if bytes.len() < 12 || &bytes[0..8] != MAGIC {
        return Err(Error::invalid(format!(
            "{} is not a draw-store file",
            path.display()
        )));
    }
    let hlen = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let header: StoreHeader = serde_json::from_slice(&bytes[12..12 + hlen])
        .map_err(|e| Error::invalid(format!("{}: bad header: {e}", path.display())))?;
    Ok((header, 12 + hlen))
}

/// Persist all four families (`beta`, `a`, `h`, `hyper`) under `dir`.
pub fn write_draw_store(dir: &Path, draws: &PosteriorDraws, run_id: &str) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let base_header = |family: &str, rows: usize, cols: usize, dtype: &str| StoreHeader {
        family: family.to_string(),
        run_id: run_id.to_string(),
        spec: draws.spec.clone(),
        prior: draws.prior.clone(),
        config: draws.config,
        dates: draws.dates.clone(),
        offsets: draws.offsets.clone(),
        t_eff: draws.t_eff,
        n_draws: draws.n_draws(),
        rows,
        cols,
        dtype: dtype.to_string(),
        blocks: None,
    };
    let mut written = Vec::new();

    let beta_path = dir.join("beta.draws");
    write_family_f32(
        &beta_path,
        &base_header("beta", draws.t_eff, draws.k_beta(), "f32"),
        &draws.beta,
    )?;
    written.push(beta_path);

    let a_path = dir.join("a.draws");
    write_family_f32(
        &a_path,
        &base_header("a", draws.t_eff, draws.spec.k_a(), "f32"),
        &draws.a_free,
    )?;
    written.push(a_path);

    let h_path = dir.join("h.draws");
    write_family_f32(
        &h_path,
        &base_header("h", draws.t_eff, draws.spec.n_vars, "f32"),
        &draws.log_vol,
    )?;
    written.push(h_path);

    let blocks = [
        draws.spec.k_beta(),
        draws.spec.k_a(),
        draws.spec.n_vars,
    ];
    let mut hyper_header = base_header("hyper", 1, blocks.iter().sum(), "f64");
    hyper_header.blocks = Some(blocks);
    let hyper_rows: Vec<Vec<f64>> = (0..draws.n_draws())
        .map(|d| {
            let mut row = draws.hyper_var_beta[d].clone();
            row.extend_from_slice(&draws.hyper_var_a[d]);
            row.extend_from_slice(&draws.hyper_var_h[d]);
            row
        })
        .collect();
    let hyper_path = dir.join("hyper.draws");
    write_family_f64(&hyper_path, &hyper_header, &hyper_rows)?;
    written.push(hyper_path);
    Ok(written)
}

fn read_f32_family(dir: &Path, name: &str) -> Result<(StoreHeader, Vec<Vec<f32>>)> {
    let path = dir.join(name);
    let mut bytes = Vec::new();
    std::fs::File::open(&path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(&path, e))?;
    let (header, offset) = read_header(&path, &bytes)?;
    let per_draw = header.rows * header.cols;
    let expected = offset + header.n_draws * per_draw * 4;
    if bytes.len() != expected {
        return Err(Error::invalid(format!(
            "{}: expected {expected} bytes, found {}",
            path.display(),
            bytes.len()
        )));
    }
    let mut draws = Vec::with_capacity(header.n_draws);
    let mut pos = offset;
    for _ in 0..header.n_draws {
        let mut d = Vec::with_capacity(per_draw);
        for _ in 0..per_draw {
            d.push(f32::from_le_bytes(bytes[pos..pos + 4].try_into().unwrap()));
            pos += 4;
        }
        draws.push(d);
    }
    Ok((header, draws))
}

/// Load a draw store written by [`write_draw_store`].
pub fn read_draw_store(dir: &Path) -> Result<PosteriorDraws> {
    let (beta_header, beta) = read_f32_family(dir, "beta.draws")?;
    let (_, a_free) = read_f32_family(dir, "a.draws")?;
    let (_, log_vol) = read_f32_family(dir, "h.draws")?;

    let hyper_path = dir.join("hyper.draws");
    let mut bytes = Vec::new();
    std::fs::File::open(&hyper_path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(&hyper_path, e))?;
    let (hyper_header, offset) = read_header(&hyper_path, &bytes)?;
    let blocks = hyper_header
        .blocks
        .ok_or_else(|| Error::invalid("hyper.draws header lacks block sizes"))?;
    let per_draw: usize = blocks.iter().sum();
    let mut pos = offset;
    let mut hyper_var_beta = Vec::with_capacity(hyper_header.n_draws);
    let mut hyper_var_a = Vec::with_capacity(hyper_header.n_draws);
    let mut hyper_var_h = Vec::with_capacity(hyper_header.n_draws);
    if bytes.len() != offset + hyper_header.n_draws * per_draw * 8 {
        return Err(Error::invalid(format!(
            "{}: truncated payload",
            hyper_path.display()
        )));
    }
    for _ in 0..hyper_header.n_draws {
        let mut read_block = |len: usize| -> Vec<f64> {
            let mut v = Vec::with_capacity(len);
            for _ in 0..len {
                v.push(f64::from_le_bytes(bytes[pos..pos + 8].try_into().unwrap()));
                pos += 8;
            }
            v
        };
        hyper_var_beta.push(read_block(blocks[0]));
        hyper_var_a.push(read_block(blocks[1]));
        hyper_var_h.push(read_block(blocks[2]));
    }

    Ok(PosteriorDraws {
        spec: beta_header.spec,
        prior: beta_header.prior,
        config: beta_header.config,
        dates: beta_header.dates,
        offsets: beta_header.offsets,
        t_eff: beta_header.t_eff,
        beta,
        a_free,
        log_vol,
        hyper_var_beta,
        hyper_var_a,
        hyper_var_h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tvp::spec::InterceptMode;

    #[test]
    fn store_round_trips() {
        let spec = TvpVarSpec {
            n_vars: 2,
            lag_order: 1,
            variable_order: vec!["a".into(), "b".into()],
            intercept_mode: InterceptMode::None,
        };
        let cfg = McmcConfig {
            iterations: 5,
            burn_in: 2,
            thin: 1,
            seed: 9,
        };
        let mut draws = PosteriorDraws::empty(
            spec,
            PriorSpec::default(),
            cfg,
            vec![NaiveDate::from_ymd_opt(2018, 1, 3).unwrap()],
            vec![0.0, 0.0],
            4,
        );
        for i in 0..3 {
            let beta = DMatrix::from_fn(4, 4, |r, c| (i + r + c) as f64 * 0.1);
            let a = DMatrix::from_fn(4, 1, |r, _| r as f64 - i as f64);
            let h = DMatrix::from_fn(4, 2, |r, c| (r * 2 + c) as f64 * 0.01);
            draws.push_draw(
                &beta,
                &a,
                &h,
                &DVector::from_element(4, 1e-5 * (i + 1) as f64),
                &DVector::from_element(1, 2e-5),
                &DVector::from_element(2, 3e-5),
            );
        }
        let dir = tempfile::tempdir().unwrap();
        write_draw_store(dir.path(), &draws, "testrun").unwrap();
        let back = read_draw_store(dir.path()).unwrap();
        assert_eq!(draws, back);
    }
}
