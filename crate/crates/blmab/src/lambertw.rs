//! Principal-branch Lambert W and the exploration-fraction formulas built on it.
//!
//! `W(x)` is the inverse of `w ↦ w·e^w` on `[0, ∞)`. The exploration fraction
//! `alpha` decides how many early arrivals an admission-capped policy keeps:
//! `ceil(alpha * T)` arms out of a horizon of `T` rounds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default weight of the exploitation term in the admission trade-off.
/// This value makes the cap regret-optimal; callers may override it.
pub const DEFAULT_TRADEOFF: f64 = 0.5;

/// Exploration fractions above this leave the supporting regret bound vacuous.
pub const FEASIBLE_ALPHA: f64 = 1.0 / 36.0;

/// Solver settings for [`lambert_w0`].
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct WEvalConfig {
    /// Absolute residual target on `w·e^w - x`. Where this undercuts the
    /// evaluation noise of `w·e^w` itself, about `x·(W(x)+4)` ulps (the
    /// exponential amplifies one ulp of `w` by a factor `1+w`), the noise
    /// floor is used instead; that floor keeps `w` correct to machine
    /// precision.
    pub tolerance: f64,
    pub max_iterations: u32,
}

impl Default for WEvalConfig {
    fn default() -> Self {
        Self { tolerance: 1e-12, max_iterations: 50 }
    }
}

/// Principal branch `W(x)` for `x >= 0` by Halley iteration.
///
/// Initial guess: `ln(1+x)` below `e`, `ln x - ln ln x` from `e` on. Both lie
/// in the convergence basin, and three to four iterations reach the residual
/// floor everywhere on `[0, 1e9]`.
pub fn lambert_w0(x: f64, cfg: &WEvalConfig) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::domain(format!(
            "lambert_w0 requires a finite x >= 0, got {x}"
        )));
    }
    if !(cfg.tolerance > 0.0) || cfg.max_iterations == 0 {
        return Err(Error::domain(
            "lambert_w0 requires tolerance > 0 and max_iterations >= 1".to_string(),
        ));
    }
    if x == 0.0 {
        return Ok(0.0);
    }

    let mut w = if x < std::f64::consts::E {
        x.ln_1p()
    } else {
        let l = x.ln();
        l - l.ln()
    };

    let mut residual = f64::INFINITY;
    for _ in 0..cfg.max_iterations {
        let ew = w.exp();
        let f = w * ew - x;
        residual = f.abs();
        let noise_floor = 2.0 * f64::EPSILON * x * (w.abs() + 4.0);
        if residual <= cfg.tolerance.max(noise_floor) {
            return Ok(w.max(0.0));
        }
        // Halley step for f(w) = w e^w - x.
        let wp1 = w + 1.0;
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        w -= f / denom;
    }

    Err(Error::Convergence { iterations: cfg.max_iterations, residual })
}

/// Tail family of the best arm's arrival time, with its parameter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailParam {
    SubExponential { lambda: f64 },
    SubPareto { beta: f64 },
}

impl TailParam {
    pub fn value(&self) -> f64 {
        match *self {
            TailParam::SubExponential { lambda } => lambda,
            TailParam::SubPareto { beta } => beta,
        }
    }

    fn validate(&self) -> Result<()> {
        let v = self.value();
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::domain(format!("tail parameter must be finite and positive, got {v}")));
        }
        Ok(())
    }
}

/// Inputs of the exploration-fraction formulas.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct AlphaParams {
    pub horizon: u64,
    pub tail: TailParam,
    /// Trade-off weight `c > 0`; see [`DEFAULT_TRADEOFF`].
    pub c: f64,
}

impl AlphaParams {
    pub fn new(horizon: u64, tail: TailParam, c: f64) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::domain("horizon must be >= 1".to_string()));
        }
        tail.validate()?;
        if !c.is_finite() || c <= 0.0 {
            return Err(Error::domain(format!("trade-off weight c must be finite and positive, got {c}")));
        }
        Ok(Self { horizon, tail, c })
    }

    /// Exploration fraction for this parameter set.
    pub fn alpha(&self) -> Result<f64> {
        match self.tail {
            TailParam::SubExponential { lambda } => alpha_subexp(self.horizon, lambda, self.c),
            TailParam::SubPareto { beta } => alpha_subpareto(self.horizon, beta, self.c),
        }
    }
}

/// `alpha = W(lambda*T/c) / (lambda*T/c)`, clamped into `(0, 1]`.
pub fn alpha_subexp(horizon: u64, lambda: f64, c: f64) -> Result<f64> {
    let p = AlphaParams::new(horizon, TailParam::SubExponential { lambda }, c)?;
    let x = lambda * p.horizon as f64 / c;
    let w = lambert_w0(x, &WEvalConfig::default())?;
    // w/x = exp(-W(x)) <= 1 for x > 0; the clamp only guards rounding.
    Ok((w / x).min(1.0))
}

/// `alpha = T^(-beta / (beta + c))`, clamped into `(0, 1]`.
pub fn alpha_subpareto(horizon: u64, beta: f64, c: f64) -> Result<f64> {
    let p = AlphaParams::new(horizon, TailParam::SubPareto { beta }, c)?;
    Ok((p.horizon as f64).powf(-beta / (beta + c)).min(1.0))
}

/// Smallest real horizon beyond which `alpha_subexp < 1/36`.
pub fn min_horizon_subexp(lambda: f64, c: f64) -> Result<f64> {
    TailParam::SubExponential { lambda }.validate()?;
    if !c.is_finite() || c <= 0.0 {
        return Err(Error::domain(format!("trade-off weight c must be finite and positive, got {c}")));
    }
    Ok(36.0 * c * 36f64.ln() / lambda)
}

/// Smallest real horizon beyond which `alpha_subpareto < 1/36`.
pub fn min_horizon_subpareto(beta: f64, c: f64) -> Result<f64> {
    TailParam::SubPareto { beta }.validate()?;
    if !c.is_finite() || c <= 0.0 {
        return Err(Error::domain(format!("trade-off weight c must be finite and positive, got {c}")));
    }
    Ok(36f64.powf((c + beta) / beta))
}
