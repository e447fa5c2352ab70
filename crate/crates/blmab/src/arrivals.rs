//! Arrival laws for the best arm and construction of simulation instances.
//!
//! A horizon of `T` rounds sees at most one new arm per round. The round at
//! which the best arm arrives follows a law supported on `{1, ..., T}`,
//! obtained by truncating a reference distribution `F` to the horizon:
//! `P(X <= t) = F(t) / F(T)`.
//!
//! The sub-Pareto reference uses the shifted form `F(t) = 1 - (t+1)^(-beta)`
//! so that the polynomial tail bound holds strictly on the whole support.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeding::SimRng;

/// Arrival-law family for the best arm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "family")]
pub enum Tail {
    /// `F(t) = 1 - exp(-lambda * t)`.
    SubExponential { lambda: f64 },
    /// `F(t) = 1 - (t + 1)^(-beta)`.
    SubPareto { beta: f64 },
    /// `F(t) = t / T`: no tail assumption at all.
    Uniform,
}

impl Tail {
    pub fn parameter(&self) -> Option<f64> {
        match *self {
            Tail::SubExponential { lambda } => Some(lambda),
            Tail::SubPareto { beta } => Some(beta),
            Tail::Uniform => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Tail::SubExponential { .. } => "subexp",
            Tail::SubPareto { .. } => "subpareto",
            Tail::Uniform => "uniform",
        }
    }
}

/// An arrival law truncated to a concrete horizon.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailModel {
    pub tail: Tail,
    pub horizon: u64,
}

impl TailModel {
    pub fn new(tail: Tail, horizon: u64) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::domain("horizon must be >= 1".to_string()));
        }
        if let Some(p) = tail.parameter() {
            if !p.is_finite() || p <= 0.0 {
                return Err(Error::domain(format!(
                    "tail parameter must be finite and positive, got {p}"
                )));
            }
        }
        Ok(Self { tail, horizon })
    }

    /// Untruncated reference CDF at a real-valued `t >= 0`.
    fn reference_cdf(&self, t: f64) -> f64 {
        match self.tail {
            // -expm1(-x) = 1 - e^(-x) without cancellation.
            Tail::SubExponential { lambda } => -(-lambda * t).exp_m1(),
            Tail::SubPareto { beta } => -(-beta * (t + 1.0).ln()).exp_m1(),
            Tail::Uniform => t / self.horizon as f64,
        }
    }
}

/// `P(X <= t)` for the law truncated to `{1, ..., T}`.
pub fn truncated_cdf(model: &TailModel, t: u64) -> Result<f64> {
    if t == 0 || t > model.horizon {
        return Err(Error::domain(format!(
            "t = {t} outside the support 1..={}",
            model.horizon
        )));
    }
    let num = model.reference_cdf(t as f64);
    let den = model.reference_cdf(model.horizon as f64);
    Ok((num / den).min(1.0))
}

/// `P(X = t)` under the truncated law.
pub fn arrival_pmf(model: &TailModel, t: u64) -> Result<f64> {
    let hi = truncated_cdf(model, t)?;
    let lo = if t == 1 { 0.0 } else { truncated_cdf(model, t - 1)? };
    Ok(hi - lo)
}

/// Draws an arrival round by inverting the truncated CDF.
///
/// Returns the smallest `t` with `truncated_cdf(t) >= u` for `u ~ U[0, 1)`;
/// binary search keeps this `O(log T)` without materializing the pmf.
pub fn sample_best_arrival(model: &TailModel, rng: &mut SimRng) -> u64 {
    let u = rng.gen::<f64>();
    let den = model.reference_cdf(model.horizon as f64);
    let target = u * den;
    let mut lo = 1u64;
    let mut hi = model.horizon;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if model.reference_cdf(mid as f64) >= target {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

/// How sub-instance qualities are produced when an instance is resampled.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QualityScheme {
    /// Best arm's quality uniform on (0, 1); every other arm uniform on
    /// (0, q_best). The best arm's position is part of the instance identity
    /// and survives resampling.
    BestAnchored,
    /// Deterministic qualities: `0.5 + epsilon` for the best arm, `0.5`
    /// elsewhere. Resampling is the identity.
    TwoLevel { epsilon: f64 },
    /// Qualities i.i.d. uniform on [0, 1); the best arm is recomputed as the
    /// argmax after each resample.
    Iid,
}

/// A fully materialized simulation instance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BanditInstance {
    pub horizon: u64,
    /// Round at which each arm becomes available; non-decreasing in the arm
    /// index, with at most one arrival per round.
    pub arrival_times: Vec<u64>,
    /// Mean reward of each arm, in [0, 1].
    pub qualities: Vec<f64>,
    /// Argmax of `qualities`, ties broken toward the lowest index.
    pub best_arm: usize,
    pub scheme: QualityScheme,
}

impl BanditInstance {
    pub fn n_arms(&self) -> usize {
        self.arrival_times.len()
    }

    /// Round at which the best arm becomes available.
    pub fn best_arrival(&self) -> u64 {
        self.arrival_times[self.best_arm]
    }
}

fn positive_unit(rng: &mut SimRng) -> f64 {
    // Rejects the single value 0.0 so the anchored best arm stays a strict
    // argmax.
    loop {
        let u = rng.gen::<f64>();
        if u > 0.0 {
            return u;
        }
    }
}

fn anchored_qualities(n_arms: usize, best: usize, rng: &mut SimRng) -> Vec<f64> {
    let q_star = positive_unit(rng);
    let mut qualities = vec![0.0; n_arms];
    for (i, q) in qualities.iter_mut().enumerate() {
        *q = if i == best { q_star } else { q_star * rng.gen::<f64>() };
    }
    qualities
}

fn two_level_qualities(n_arms: usize, best: usize, epsilon: f64) -> Vec<f64> {
    let mut qualities = vec![0.5; n_arms];
    qualities[best] = 0.5 + epsilon;
    qualities
}

fn argmax_lowest(qualities: &[f64]) -> usize {
    let mut best = 0;
    for (i, q) in qualities.iter().enumerate().skip(1) {
        if *q > qualities[best] {
            best = i;
        }
    }
    best
}

/// Builds an instance with one arrival per round and anchored qualities.
///
/// Arm `i` (0-based) arrives at round `i + 1`; the best arm's position is
/// drawn from the truncated arrival law.
pub fn build_instance(model: &TailModel, rng: &mut SimRng) -> Result<BanditInstance> {
    TailModel::new(model.tail, model.horizon)?;
    let n = model.horizon as usize;
    let best = (sample_best_arrival(model, rng) - 1) as usize;
    let qualities = anchored_qualities(n, best, rng);
    Ok(BanditInstance {
        horizon: model.horizon,
        arrival_times: (1..=model.horizon).collect(),
        qualities,
        best_arm: best,
        scheme: QualityScheme::BestAnchored,
    })
}

/// Builds an instance with one arrival per round and two-level qualities.
///
/// `epsilon` is the gap of the single distinguished arm over the `0.5` crowd;
/// `epsilon = 0` produces a degenerate instance on which every policy has
/// zero regret.
pub fn build_two_level_instance(
    model: &TailModel,
    epsilon: f64,
    rng: &mut SimRng,
) -> Result<BanditInstance> {
    TailModel::new(model.tail, model.horizon)?;
    if !(0.0..=0.5).contains(&epsilon) {
        return Err(Error::domain(format!("epsilon must lie in [0, 0.5], got {epsilon}")));
    }
    let n = model.horizon as usize;
    let best = (sample_best_arrival(model, rng) - 1) as usize;
    Ok(BanditInstance {
        horizon: model.horizon,
        arrival_times: (1..=model.horizon).collect(),
        qualities: two_level_qualities(n, best, epsilon),
        best_arm: best,
        scheme: QualityScheme::TwoLevel { epsilon },
    })
}

/// Redraws qualities under the instance's scheme, keeping the arrival
/// schedule. For anchored and two-level schemes the best arm's position is
/// preserved; for i.i.d. qualities the argmax is recomputed.
pub fn resample_qualities(instance: &BanditInstance, rng: &mut SimRng) -> BanditInstance {
    let mut out = instance.clone();
    match instance.scheme {
        QualityScheme::BestAnchored => {
            out.qualities = anchored_qualities(instance.n_arms(), instance.best_arm, rng);
        }
        QualityScheme::TwoLevel { .. } => {}
        QualityScheme::Iid => {
            out.qualities = (0..instance.n_arms()).map(|_| rng.gen::<f64>()).collect();
            out.best_arm = argmax_lowest(&out.qualities);
        }
    }
    out
}

/// Arrival schedule given by a cumulative rate function.
///
/// `fractions[t]` is the fraction of the `total_arms` pool that has arrived
/// by round `t`, for `t` in `0..=horizon`. The number arrived by round `t`
/// is `round(total_arms * fractions[t])`, and the model allows at most one
/// arrival per round.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArrivalRateProcess {
    horizon: u64,
    total_arms: u64,
    fractions: Vec<f64>,
}

impl ArrivalRateProcess {
    pub fn new(fractions: Vec<f64>, total_arms: u64) -> Result<Self> {
        if fractions.len() < 2 {
            return Err(Error::domain("rate process needs fractions for rounds 0..=T".to_string()));
        }
        if total_arms == 0 {
            return Err(Error::domain("rate process needs at least one arm".to_string()));
        }
        let horizon = (fractions.len() - 1) as u64;
        if fractions[0] != 0.0 {
            return Err(Error::domain("arrival fraction at round 0 must be 0".to_string()));
        }
        let last = *fractions.last().unwrap();
        if (last - 1.0).abs() > 1e-9 {
            return Err(Error::domain(format!(
                "arrival fraction at the horizon must be 1, got {last}"
            )));
        }
        let mut prev_count = 0u64;
        for (t, pair) in fractions.windows(2).enumerate() {
            if !(pair[1].is_finite() && pair[1] >= pair[0]) {
                return Err(Error::domain(format!(
                    "arrival fractions must be finite and non-decreasing (round {})",
                    t + 1
                )));
            }
            let count = (total_arms as f64 * pair[1]).round() as u64;
            if count > prev_count + 1 {
                return Err(Error::domain(format!(
                    "more than one arrival in round {}: {} -> {}",
                    t + 1,
                    prev_count,
                    count
                )));
            }
            prev_count = count;
        }
        if prev_count != total_arms {
            return Err(Error::domain(format!(
                "rounded arrival counts reach {prev_count}, expected {total_arms}"
            )));
        }
        Ok(Self { horizon, total_arms, fractions })
    }

    /// Samples `f` at integer rounds. `f(0)` must be 0 and `f(horizon)` 1.
    pub fn from_fn(horizon: u64, total_arms: u64, f: impl Fn(u64) -> f64) -> Result<Self> {
        let fractions = (0..=horizon).map(f).collect();
        Self::new(fractions, total_arms)
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn total_arms(&self) -> u64 {
        self.total_arms
    }

    pub fn fraction_at(&self, t: u64) -> f64 {
        self.fractions[t as usize]
    }

    /// Number of arms arrived by round `t`.
    pub fn arrived_by(&self, t: u64) -> u64 {
        (self.total_arms as f64 * self.fractions[t as usize]).round() as u64
    }
}

/// Builds an instance whose arrivals follow the rate process and whose
/// qualities are i.i.d. uniform, so each arm is equally likely to be best.
pub fn build_rate_instance(process: &ArrivalRateProcess, rng: &mut SimRng) -> Result<BanditInstance> {
    let n = process.total_arms as usize;
    let mut arrival_times = Vec::with_capacity(n);
    let mut arrived = 0u64;
    for t in 1..=process.horizon {
        let count = process.arrived_by(t);
        debug_assert!(count <= arrived + 1);
        if count > arrived {
            arrival_times.push(t);
            arrived = count;
        }
    }
    let qualities: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
    let best_arm = argmax_lowest(&qualities);
    Ok(BanditInstance {
        horizon: process.horizon,
        arrival_times,
        qualities,
        best_arm,
        scheme: QualityScheme::Iid,
    })
}
