//! Regret-exponent fitting and parametric-uncertainty formulas.
//!
//! The empirical exponent gamma is the power such that expected regret is
//! approximately `xi * T^gamma`. Two fitters are provided: a grid scan over
//! gamma with the scale anchored at the largest horizon, and an ordinary
//! least-squares slope in log-log space. On exact power-law data they agree
//! to grid resolution.

use serde::Serialize;

use crate::engine::RegretCurve;
use crate::error::{Error, Result};

/// Result of the grid scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridFit {
    /// Exponent on the 0.01 grid minimizing the sum of squared errors.
    pub gamma: f64,
    /// Scale constant `R(T_max) / T_max^gamma`.
    pub xi: f64,
    /// Sum of squared errors at the chosen exponent.
    pub sse: f64,
}

/// Both fits plus their disagreement and an optional theoretical exponent.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FitReport {
    pub gamma_grid: f64,
    pub xi: f64,
    pub sse: f64,
    pub gamma_loglog: f64,
    /// `|gamma_grid - gamma_loglog|`.
    pub gamma_delta: f64,
    pub theoretical_gamma: Option<f64>,
}

fn fit_points(curve: &RegretCurve) -> Result<Vec<(f64, f64)>> {
    if curve.points.len() < 2 {
        return Err(Error::Fit("exponent fits need at least two points".to_string()));
    }
    curve.validate().map_err(|e| Error::Fit(e.to_string()))?;
    let mut pairs = Vec::with_capacity(curve.points.len());
    for p in &curve.points {
        if p.mean_regret <= 0.0 {
            return Err(Error::Fit(format!(
                "exponent fits need positive regrets; horizon {} has {}",
                p.horizon, p.mean_regret
            )));
        }
        pairs.push((p.horizon as f64, p.mean_regret));
    }
    Ok(pairs)
}

/// Scans gamma over {0.00, 0.01, ..., 1.00}. For each candidate the scale is
/// `xi = R(T_max) / T_max^gamma` and the score is the sum of squared errors
/// of `xi * T^gamma` against the curve; the smallest gamma wins ties.
pub fn fit_exponent_grid(curve: &RegretCurve) -> Result<GridFit> {
    let pairs = fit_points(curve)?;
    let &(t_max, r_max) = pairs.last().expect("validated nonempty");
    let mut best: Option<GridFit> = None;
    for i in 0..=100u32 {
        let gamma = f64::from(i) / 100.0;
        let xi = r_max / t_max.powf(gamma);
        let sse: f64 = pairs.iter().map(|&(t, r)| (r - xi * t.powf(gamma)).powi(2)).sum();
        if best.map_or(true, |b| sse < b.sse) {
            best = Some(GridFit { gamma, xi, sse });
        }
    }
    Ok(best.expect("grid is nonempty"))
}

/// Ordinary least-squares slope of `ln R` against `ln T`.
pub fn fit_exponent_loglog(curve: &RegretCurve) -> Result<f64> {
    let pairs = fit_points(curve)?;
    let logs: Vec<(f64, f64)> = pairs.iter().map(|&(t, r)| (t.ln(), r.ln())).collect();
    let n = logs.len() as f64;
    let x_bar = logs.iter().map(|&(x, _)| x).sum::<f64>() / n;
    let y_bar = logs.iter().map(|&(_, y)| y).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|&(x, y)| (x - x_bar) * (y - y_bar)).sum();
    let sxx: f64 = logs.iter().map(|&(x, _)| (x - x_bar).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::Fit("log-log fit needs at least two distinct horizons".to_string()));
    }
    Ok(sxy / sxx)
}

/// Runs both fitters and records their disagreement.
pub fn fit_report(curve: &RegretCurve, theoretical_gamma: Option<f64>) -> Result<FitReport> {
    let grid = fit_exponent_grid(curve)?;
    let loglog = fit_exponent_loglog(curve)?;
    Ok(FitReport {
        gamma_grid: grid.gamma,
        xi: grid.xi,
        sse: grid.sse,
        gamma_loglog: loglog,
        gamma_delta: (grid.gamma - loglog).abs(),
        theoretical_gamma,
    })
}

/// Regret exponent guaranteed under a power-law arrival tail with known
/// parameter: `(1 + beta) / (1 + 2*beta)`. Decreases from 1 toward 1/2 as
/// the tail sharpens.
pub fn theoretical_exponent_subpareto(beta: f64) -> Result<f64> {
    if !beta.is_finite() || beta <= 0.0 {
        return Err(Error::domain(format!("beta must be finite and positive, got {beta}")));
    }
    Ok((1.0 + beta) / (1.0 + 2.0 * beta))
}

/// Which side the learned tail parameter landed on relative to the truth.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EstimateSide {
    /// Learned exponent above the true one.
    Over,
    /// Learned exponent at or below the true one.
    Under,
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() || v <= 0.0 {
        return Err(Error::domain(format!("{name} must be finite and positive, got {v}")));
    }
    Ok(())
}

/// Cost of parametric uncertainty under an exponential arrival tail: the
/// ratio of the regret with a learned rate (off by `mu` in mean) to the
/// regret with the true rate, `(sqrt(T / ln T))^(mu*lambda)` while
/// `mu*lambda < 1` and exactly 1 beyond (the learned-rate bound is no longer
/// sharper than the trivial one there).
pub fn cpu_subexp(lambda: f64, mu: f64, horizon: f64) -> Result<f64> {
    check_positive("lambda", lambda)?;
    check_positive("mu", mu)?;
    if !horizon.is_finite() || horizon < 3.0 {
        return Err(Error::domain(format!("horizon must be at least 3, got {horizon}")));
    }
    let product = mu * lambda;
    if product >= 1.0 {
        return Ok(1.0);
    }
    Ok((horizon / horizon.ln()).sqrt().powf(product))
}

/// T-exponent of the cost of parametric uncertainty under a power-law tail
/// with `beta >= 1`: `2*mu*beta*(beta-1) / ((1+2b)(1+2b-3mu(beta-1)))` when
/// the estimate overshoots, `mu*(beta-1)^2 / ((1+2b)(1+2b+3mu(beta-1)))`
/// otherwise (`b = beta`). The overshoot case requires `mu < 1/(beta-1)`,
/// without which the learned-parameter bound breaks down.
pub fn cpu_subpareto(beta: f64, mu: f64, side: EstimateSide) -> Result<f64> {
    check_positive("mu", mu)?;
    if !beta.is_finite() || beta < 1.0 {
        return Err(Error::domain(format!("beta must be at least 1, got {beta}")));
    }
    let b2 = 1.0 + 2.0 * beta;
    let gap = beta - 1.0;
    match side {
        EstimateSide::Over => {
            if mu * gap >= 1.0 {
                return Err(Error::domain(format!(
                    "overshoot case needs mu < 1/(beta-1); got mu={mu}, beta={beta}"
                )));
            }
            Ok(2.0 * mu * beta * gap / (b2 * (b2 - 3.0 * mu * gap)))
        }
        EstimateSide::Under => Ok(mu * gap * gap / (b2 * (b2 + 3.0 * mu * gap))),
    }
}

/// Regret exponent when the exponential-tail rate is learned to mean
/// accuracy `mu`: `(1 + mu*lambda) / 2`, saturating at linear regret once
/// `mu*lambda >= 1`.
pub fn learned_exponent_subexp(lambda: f64, mu: f64) -> Result<f64> {
    check_positive("lambda", lambda)?;
    check_positive("mu", mu)?;
    Ok(((1.0 + mu * lambda) / 2.0).min(1.0))
}

/// Regret exponent when the power-law tail parameter is learned to mean
/// accuracy `mu`. Both cases recover `(1 + beta) / (1 + 2*beta)` as
/// `mu -> 0`.
pub fn learned_exponent_subpareto(beta: f64, mu: f64, side: EstimateSide) -> Result<f64> {
    check_positive("mu", mu)?;
    if !beta.is_finite() || beta < 1.0 {
        return Err(Error::domain(format!("beta must be at least 1, got {beta}")));
    }
    let gap = beta - 1.0;
    match side {
        EstimateSide::Over => {
            if mu * gap >= 1.0 {
                return Err(Error::domain(format!(
                    "overshoot case needs mu < 1/(beta-1); got mu={mu}, beta={beta}"
                )));
            }
            Ok(1.0 - beta * (1.0 - mu * gap) / (1.0 + 2.0 * beta - 3.0 * mu * gap))
        }
        EstimateSide::Under => {
            Ok((1.0 + beta + 2.0 * mu * gap) / (1.0 + 2.0 * beta + 3.0 * mu * gap))
        }
    }
}
