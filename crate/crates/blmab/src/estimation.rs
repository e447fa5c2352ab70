//! Tail-parameter learning: Hoeffding sample-size calculator, mean-inversion
//! estimators, calibration-draw samplers, event-time file fitting, and the
//! learned-parameter simulation harness.
//!
//! Both estimators invert a mean relation: an exponential rate from
//! `mean = 1/lambda` (truncation ignored, valid once `lambda * T` is large),
//! and a power-law parameter from `mean = beta/(beta-1)` (defined only for
//! `beta > 1`). Event-time files additionally get the maximum-likelihood
//! estimate `n / sum(ln t_i)`.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use rand::Rng;
use serde::Serialize;

use crate::arrivals::Tail;
use crate::engine::{expected_regret, PolicySpec, RegretCurve, SweepConfig};
use crate::error::{Error, Result};
use crate::lambertw::{alpha_subexp, alpha_subpareto};
use crate::seeding::SimRng;

/// Number of calibration samples for mean accuracy `mu` at confidence
/// `1 - delta` when samples are bounded by `horizon`:
/// `ceil(T^2 * ln(2/delta) / (2 * mu^2))`.
pub fn required_samples(horizon: u64, mu: f64, delta: f64) -> Result<u64> {
    if horizon == 0 {
        return Err(Error::domain("horizon must be >= 1".to_string()));
    }
    if !mu.is_finite() || mu <= 0.0 {
        return Err(Error::domain(format!("mu must be finite and positive, got {mu}")));
    }
    if !delta.is_finite() || delta <= 0.0 || delta >= 1.0 {
        return Err(Error::domain(format!("delta must lie in (0, 1), got {delta}")));
    }
    let t = horizon as f64;
    Ok((t * t * (2.0 / delta).ln() / (2.0 * mu * mu)).ceil() as u64)
}

fn positive_mean(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::domain("estimators need at least one sample".to_string()));
    }
    for (i, &x) in samples.iter().enumerate() {
        if !x.is_finite() || x <= 0.0 {
            return Err(Error::domain(format!("sample {i} must be finite and positive, got {x}")));
        }
    }
    Ok(samples.iter().sum::<f64>() / samples.len() as f64)
}

/// Rate estimate `1 / mean(samples)`.
pub fn estimate_lambda(samples: &[f64]) -> Result<f64> {
    Ok(1.0 / positive_mean(samples)?)
}

/// Power-law estimate from the mean relation `mean = beta/(beta-1)`,
/// inverted to `beta = mean/(mean-1)`. A sample mean at or below 1 leaves
/// the estimator undefined and is surfaced as an error, not clamped.
pub fn estimate_beta(samples: &[f64]) -> Result<f64> {
    let mean = positive_mean(samples)?;
    beta_from_mean(mean)
}

fn beta_from_mean(mean: f64) -> Result<f64> {
    if mean <= 1.0 {
        return Err(Error::Estimation(format!(
            "mean-inversion estimate needs a sample mean > 1, got {mean}"
        )));
    }
    Ok(mean / (mean - 1.0))
}

fn unit_open(rng: &mut SimRng) -> f64 {
    // (0, 1): a 0 draw would put the exponential sample at exactly 0 and the
    // power-law sample at infinity.
    loop {
        let u = rng.gen::<f64>();
        if u > 0.0 {
            return u;
        }
    }
}

/// Inverse-CDF draw from an exponential with rate `lambda` truncated at
/// `horizon`. Returns a value in `(0, horizon]`.
pub fn sample_truncated_exp(lambda: f64, horizon: u64, rng: &mut SimRng) -> Result<f64> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::domain(format!("lambda must be finite and positive, got {lambda}")));
    }
    if horizon == 0 {
        return Err(Error::domain("horizon must be >= 1".to_string()));
    }
    let mass = -(-lambda * horizon as f64).exp_m1();
    let u = unit_open(rng);
    Ok(-(-u * mass).ln_1p() / lambda)
}

/// Inverse-CDF draw from the power law with survival `t^(-beta)` on
/// `[1, inf)`.
pub fn sample_pareto(beta: f64, rng: &mut SimRng) -> Result<f64> {
    if !beta.is_finite() || beta <= 0.0 {
        return Err(Error::domain(format!("beta must be finite and positive, got {beta}")));
    }
    Ok(unit_open(rng).powf(-1.0 / beta))
}

/// A learned arrival tail and the calibration budget behind it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LearnedTail {
    /// Family with the *estimated* parameter.
    pub tail: Tail,
    pub n_samples: u64,
    /// Target mean accuracy.
    pub mu: f64,
    /// Target confidence complement.
    pub delta: f64,
}

impl LearnedTail {
    pub fn new(tail: Tail, n_samples: u64, mu: f64, delta: f64) -> Result<Self> {
        match tail {
            Tail::SubExponential { lambda } => {
                if !lambda.is_finite() || lambda <= 0.0 {
                    return Err(Error::domain(format!(
                        "learned rate must be finite and positive, got {lambda}"
                    )));
                }
            }
            Tail::SubPareto { beta } => {
                if !beta.is_finite() || beta <= 1.0 {
                    return Err(Error::domain(format!(
                        "learned power-law parameter must exceed 1 (mean undefined otherwise), got {beta}"
                    )));
                }
            }
            Tail::Uniform => {
                return Err(Error::domain(
                    "the uniform arrival law has no parameter to learn".to_string(),
                ))
            }
        }
        if n_samples == 0 {
            return Err(Error::domain("a learned tail needs at least one sample".to_string()));
        }
        if !mu.is_finite() || mu <= 0.0 {
            return Err(Error::domain(format!("mu must be finite and positive, got {mu}")));
        }
        if !delta.is_finite() || delta <= 0.0 || delta >= 1.0 {
            return Err(Error::domain(format!("delta must lie in (0, 1), got {delta}")));
        }
        Ok(Self { tail, n_samples, mu, delta })
    }
}

/// Streams `n_samples` truncated-exponential draws and inverts their mean.
/// The draws are discarded as they go, so the calibration budget can be in
/// the hundreds of millions without allocation.
pub fn learn_lambda(
    true_lambda: f64,
    horizon: u64,
    n_samples: u64,
    mu: f64,
    delta: f64,
    rng: &mut SimRng,
) -> Result<LearnedTail> {
    if n_samples == 0 {
        return Err(Error::domain("calibration needs at least one sample".to_string()));
    }
    let mut sum = 0.0f64;
    for _ in 0..n_samples {
        sum += sample_truncated_exp(true_lambda, horizon, rng)?;
    }
    let lambda = 1.0 / (sum / n_samples as f64);
    LearnedTail::new(Tail::SubExponential { lambda }, n_samples, mu, delta)
}

/// Streams `n_samples` power-law draws and inverts their mean. Requires the
/// empirical mean to exceed 1, which holds surely here since every draw
/// exceeds 1.
pub fn learn_beta(
    true_beta: f64,
    n_samples: u64,
    mu: f64,
    delta: f64,
    rng: &mut SimRng,
) -> Result<LearnedTail> {
    if n_samples == 0 {
        return Err(Error::domain("calibration needs at least one sample".to_string()));
    }
    let mut sum = 0.0f64;
    for _ in 0..n_samples {
        sum += sample_pareto(true_beta, rng)?;
    }
    let beta = beta_from_mean(sum / n_samples as f64)?;
    LearnedTail::new(Tail::SubPareto { beta }, n_samples, mu, delta)
}

/// Estimates from a raw event-time stream, all families at once.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EventTimeFit {
    pub n_samples: u64,
    pub mean: f64,
    /// `1 / mean`.
    pub lambda_hat: f64,
    /// Maximum-likelihood power-law estimate `n / sum(ln t)`; present only
    /// when every time is >= 1 and at least one exceeds it.
    pub beta_mle: Option<f64>,
    /// Mean-inversion power-law estimate `mean/(mean-1)`; present only when
    /// the mean exceeds 1.
    pub beta_mean: Option<f64>,
}

/// Parses one positive decimal event time per line. Blank lines are
/// skipped; a single leading non-numeric line is treated as a header.
/// Anything else malformed is a parse error carrying its 1-based line
/// number.
pub fn fit_from_event_times(reader: impl BufRead) -> Result<EventTimeFit> {
    let mut n = 0u64;
    let mut sum = 0.0f64;
    let mut log_sum = 0.0f64;
    let mut all_at_least_one = true;
    let mut header_allowed = true;
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        let value = match text.parse::<f64>() {
            Ok(v) => v,
            Err(_) if header_allowed => {
                header_allowed = false;
                continue;
            }
            Err(e) => {
                return Err(Error::Parse { line: line_no, message: format!("{text:?}: {e}") })
            }
        };
        header_allowed = false;
        if !value.is_finite() || value <= 0.0 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("event times must be finite and positive, got {value}"),
            });
        }
        n += 1;
        sum += value;
        log_sum += value.ln();
        all_at_least_one &= value >= 1.0;
    }
    if n < 2 {
        return Err(Error::Data(format!("need at least 2 event times, found {n}")));
    }
    let mean = sum / n as f64;
    Ok(EventTimeFit {
        n_samples: n,
        mean,
        lambda_hat: 1.0 / mean,
        beta_mle: (all_at_least_one && log_sum > 0.0).then(|| n as f64 / log_sum),
        beta_mean: (mean > 1.0).then(|| mean / (mean - 1.0)),
    })
}

pub fn fit_event_time_file(path: &Path) -> Result<EventTimeFit> {
    fit_from_event_times(BufReader::new(File::open(path)?))
}

/// Runs the admission-capped sweep with the exploration fraction computed
/// from a learned tail while instances still come from the configured true
/// tail. With a perfectly learned parameter this reproduces the
/// known-parameter sweep bit for bit under the same master seed.
pub fn blmoss_with_learned(cfg: &SweepConfig, learned: &LearnedTail) -> Result<RegretCurve> {
    let (c, norm) = match cfg.policy {
        PolicySpec::BlMoss { c, norm, .. } => (c, norm),
        _ => {
            return Err(Error::config(
                "learned-parameter runs use the admission-capped policy".to_string(),
            ))
        }
    };
    match (cfg.tail, learned.tail) {
        (Tail::SubExponential { .. }, Tail::SubExponential { .. })
        | (Tail::SubPareto { .. }, Tail::SubPareto { .. }) => {}
        (true_tail, learned_tail) => {
            return Err(Error::config(format!(
                "learned family {} does not match instance family {}",
                learned_tail.label(),
                true_tail.label()
            )))
        }
    }
    if cfg.horizons.is_empty() {
        return Err(Error::config("sweep needs at least one horizon".to_string()));
    }
    for pair in cfg.horizons.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::config("sweep horizons must strictly increase".to_string()));
        }
    }
    let mut points = Vec::with_capacity(cfg.horizons.len());
    for &horizon in &cfg.horizons {
        let alpha = match learned.tail {
            Tail::SubExponential { lambda } => alpha_subexp(horizon, lambda, c)?,
            Tail::SubPareto { beta } => alpha_subpareto(horizon, beta, c)?,
            Tail::Uniform => unreachable!("rejected above"),
        };
        let mut point_cfg = cfg.point_config(horizon)?;
        point_cfg.policy = PolicySpec::BlMoss { c, norm, alpha_override: Some(alpha) };
        points.push(expected_regret(&point_cfg)?);
    }
    let curve = RegretCurve { points };
    curve.validate()?;
    Ok(curve)
}
