//! Ten-component normal mixture approximation to the log-chi-square(1)
//! distribution (Omori, Chib, Shephard & Nakajima 2007) and the indicator
//! sampler that linearizes the stochastic-volatility observation equation.

use rand::Rng;

/// One mixture component; `variance` is the component variance, not the
/// standard deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureComponent {
    pub probability: f64,
    pub mean: f64,
    pub variance: f64,
}

/// The fixed 10-component table approximating log chi-square(1).
pub const LOG_CHI2_MIXTURE: [MixtureComponent; 10] = [
    MixtureComponent { probability: 0.00609, mean: 1.92677, variance: 0.11265 },
    MixtureComponent { probability: 0.04775, mean: 1.34744, variance: 0.17788 },
    MixtureComponent { probability: 0.13057, mean: 0.73504, variance: 0.26768 },
    MixtureComponent { probability: 0.20674, mean: 0.02266, variance: 0.40611 },
    MixtureComponent { probability: 0.22715, mean: -0.85173, variance: 0.62699 },
    MixtureComponent { probability: 0.18842, mean: -1.97278, variance: 0.98583 },
    MixtureComponent { probability: 0.12047, mean: -3.46788, variance: 1.57469 },
    MixtureComponent { probability: 0.05591, mean: -5.55246, variance: 2.54498 },
    MixtureComponent { probability: 0.01575, mean: -8.68384, variance: 4.16591 },
    MixtureComponent { probability: 0.00115, mean: -14.65000, variance: 7.33342 },
];

/// Offset inside log(value^2 + offset), guarding exact zeros.
pub const SV_OFFSET: f64 = 1e-6;

/// Linearized observations log(w_t^2 + offset) for the volatility block.
pub fn log_sq_transform(values: &[f64]) -> Vec<f64> {
    values.iter().map(|w| (w * w + SV_OFFSET).ln()).collect()
}

/// Sample one mixture indicator per step: component i with probability
/// proportional to p_i times the normal density of (log_sq_obs_t - h_t)
/// under component i.
pub fn sv_auxiliary_sample<R: Rng + ?Sized>(
    log_sq_obs: &[f64],
    h_path: &[f64],
    components: &[MixtureComponent],
    rng: &mut R,
) -> Vec<usize> {
    assert_eq!(log_sq_obs.len(), h_path.len());
    assert!(!components.is_empty());
    let mut out = Vec::with_capacity(log_sq_obs.len());
    let mut log_weights = vec![0.0_f64; components.len()];
    for (&x, &h) in log_sq_obs.iter().zip(h_path.iter()) {
        let resid = x - h;
        let mut max_lw = f64::NEG_INFINITY;
        for (i, c) in components.iter().enumerate() {
            let d = resid - c.mean;
            let lw = c.probability.ln() - 0.5 * c.variance.ln() - d * d / (2.0 * c.variance);
            log_weights[i] = lw;
            if lw > max_lw {
                max_lw = lw;
            }
        }
        let mut total = 0.0;
        for lw in log_weights.iter_mut() {
            *lw = (*lw - max_lw).exp();
            total += *lw;
        }
        let u: f64 = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut pick = components.len() - 1;
        for (i, w) in log_weights.iter().enumerate() {
            acc += w;
            if u < acc {
                pick = i;
                break;
            }
        }
        out.push(pick);
    }
    out
}
