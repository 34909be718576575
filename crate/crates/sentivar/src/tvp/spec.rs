//! Model dimensions, priors, and sampler configuration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Intercept handling in the reduced form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterceptMode {
    /// A time-varying intercept column joins the coefficient state.
    TimeVarying,
    /// No intercept state; the data are demeaned before estimation and the
    /// offsets recorded, reproducing the intercept-free stacked dimension.
    DemeanedConstant,
    /// No intercept at all.
    None,
}

impl InterceptMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "time_varying" => Some(InterceptMode::TimeVarying),
            "demeaned_constant" => Some(InterceptMode::DemeanedConstant),
            "none" => Some(InterceptMode::None),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            InterceptMode::TimeVarying => "time_varying",
            InterceptMode::DemeanedConstant => "demeaned_constant",
            InterceptMode::None => "none",
        }
    }

    pub fn has_intercept_state(self) -> bool {
        matches!(self, InterceptMode::TimeVarying)
    }
}

/// Dimensions and identification ordering of the model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TvpVarSpec {
    pub n_vars: usize,
    pub lag_order: usize,
    /// Recursive-identification ordering; must be a permutation of the
    /// panel columns when estimating from a panel.
    pub variable_order: Vec<String>,
    pub intercept_mode: InterceptMode,
}

impl Default for TvpVarSpec {
    fn default() -> Self {
        TvpVarSpec {
            n_vars: 3,
            lag_order: 3,
            variable_order: vec!["sent".to_string(), "rv".to_string(), "dturn".to_string()],
            intercept_mode: InterceptMode::TimeVarying,
        }
    }
}

impl TvpVarSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_vars < 2 {
            return Err(Error::invalid("model needs at least 2 variables"));
        }
        if self.lag_order < 1 {
            return Err(Error::invalid("lag order must be at least 1"));
        }
        if self.variable_order.len() != self.n_vars {
            return Err(Error::invalid(format!(
                "variable_order lists {} names for {} variables",
                self.variable_order.len(),
                self.n_vars
            )));
        }
        Ok(())
    }

    /// Regressors per equation: optional intercept plus n*p lags.
    pub fn k_x(&self) -> usize {
        let base = self.n_vars * self.lag_order;
        if self.intercept_mode.has_intercept_state() {
            base + 1
        } else {
            base
        }
    }

    /// Stacked coefficient-state dimension n * k_x.
    pub fn k_beta(&self) -> usize {
        self.n_vars * self.k_x()
    }

    /// Free elements of the unit-lower-triangular A_t.
    pub fn k_a(&self) -> usize {
        self.n_vars * (self.n_vars - 1) / 2
    }
}

/// Gamma(shape, rate) prior on a random-walk increment precision
/// (the inverse of the increment variance). Mean precision is shape/rate.
/// This is the shape-RATE convention; confusing it with shape-scale would
/// silently change the prior by a factor of rate^2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaPrior {
    pub shape: f64,
    pub rate: f64,
}

impl GammaPrior {
    pub fn new(shape: f64, rate: f64) -> Self {
        GammaPrior { shape, rate }
    }

    /// Prior mean of the increment standard deviation's square, i.e.
    /// E[1/precision] = rate/(shape-1); defined for shape > 1.
    pub fn mean_variance(&self) -> f64 {
        self.rate / (self.shape - 1.0)
    }
}

/// Priors for the three increment-precision blocks plus the common initial
/// state law N(0, scale * I).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorSpec {
    pub beta_precision: GammaPrior,
    pub a_precision: GammaPrior,
    pub h_precision: GammaPrior,
    pub init_state_scale: f64,
}

impl Default for PriorSpec {
    fn default() -> Self {
        PriorSpec {
            beta_precision: GammaPrior::new(20.0, 1e-4),
            a_precision: GammaPrior::new(4.0, 1e-4),
            h_precision: GammaPrior::new(4.0, 1e-4),
            init_state_scale: 10.0,
        }
    }
}

impl PriorSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, g) in [
            ("beta", self.beta_precision),
            ("a", self.a_precision),
            ("h", self.h_precision),
        ] {
            if !(g.shape > 0.0) || !(g.rate > 0.0) {
                return Err(Error::invalid(format!(
                    "{name} precision prior needs positive shape and rate"
                )));
            }
        }
        if !(self.init_state_scale > 0.0) {
            return Err(Error::invalid("initial state covariance must be positive"));
        }
        Ok(())
    }
}

/// Chain length and seeding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McmcConfig {
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
}

impl Default for McmcConfig {
    fn default() -> Self {
        McmcConfig {
            iterations: 11_000,
            burn_in: 1_000,
            thin: 1,
            seed: 1,
        }
    }
}

impl McmcConfig {
    pub fn validate(&self) -> Result<()> {
        if self.burn_in >= self.iterations {
            return Err(Error::invalid(format!(
                "burn_in {} must be below iterations {}",
                self.burn_in, self.iterations
            )));
        }
        if self.thin == 0 {
            return Err(Error::invalid("thin must be at least 1"));
        }
        Ok(())
    }

    pub fn retained(&self) -> usize {
        (self.iterations - self.burn_in) / self.thin
    }
}
