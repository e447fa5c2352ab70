//! Index policies over an arm pool that grows during the run.
//!
//! All policies share one state type. Arms enter via [`PolicyState::offer_arm`]
//! in arrival order; [`PolicyState::select`] returns the arm to pull and
//! [`PolicyState::update`] records the observed binary reward.
//!
//! Selection always means: highest index wins, ties go to the earliest
//! arrival, and unpulled arms carry a `+inf` sentinel (so each tracked arm is
//! pulled once before any index comparison matters).

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeding::SimRng;

/// Index of an arm under the horizon-aware exploration bonus:
/// `mean + sqrt(max(ln(T / (k * N)), 0) / N)`, with `+inf` for unpulled arms.
pub fn moss_index(mean: f64, pulls: u64, horizon: u64, k: u64) -> f64 {
    if pulls == 0 {
        return f64::INFINITY;
    }
    let n = pulls as f64;
    let ratio = horizon as f64 / (k as f64 * n);
    mean + (ratio.ln().max(0.0) / n).sqrt()
}

/// Index of an arm under the round-aware exploration bonus:
/// `mean + sqrt(2 * ln(t) / N)`, with `+inf` for unpulled arms.
pub fn ucb1_index(mean: f64, pulls: u64, round: u64) -> f64 {
    if pulls == 0 {
        return f64::INFINITY;
    }
    mean + (2.0 * (round as f64).ln() / pulls as f64).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    BlMoss,
    Moss,
    Ucb1,
    Thompson,
}

impl PolicyKind {
    pub fn label(&self) -> &'static str {
        match self {
            PolicyKind::BlMoss => "blmoss",
            PolicyKind::Moss => "moss",
            PolicyKind::Ucb1 => "ucb1",
            PolicyKind::Thompson => "thompson",
        }
    }
}

/// Which arm count `k` the admission-capped policy feeds into its index.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MossNormalization {
    /// `k` is the fixed admission cap `ceil(alpha * T)`.
    #[default]
    AdmissionCap,
    /// `k` is the number of arms admitted so far (comparison mode).
    AdmittedCount,
}

/// Pull count and summed reward of one arm.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct ArmStats {
    pub pulls: u64,
    pub reward_sum: f64,
}

impl ArmStats {
    /// Empirical mean; 0.0 before the first pull. Selection never consults
    /// the mean of an unpulled arm (the sentinel short-circuits first).
    pub fn mean(&self) -> f64 {
        if self.pulls == 0 {
            0.0
        } else {
            self.reward_sum / self.pulls as f64
        }
    }
}

/// Number of admitted arms for an exploration fraction: `ceil(alpha * T)`,
/// clamped into `[1, T]`.
///
/// The tiny relative guard keeps products that are integers in exact
/// arithmetic (such as `T^(1/2)` of a perfect square) from ceiling one slot
/// too high after floating-point round-off.
pub fn admission_cap(alpha: f64, horizon: u64) -> u64 {
    let product = alpha * horizon as f64;
    let guarded = product - product.abs() * 1e-12;
    (guarded.ceil() as u64).clamp(1, horizon)
}

#[derive(Clone, Copy, Debug)]
struct HeapEntry {
    index: f64,
    slot: usize,
    generation: u32,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for HeapEntry {}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Max-heap: greater index first, then earlier slot (arrival order).
        self.index
            .total_cmp(&other.index)
            .then_with(|| other.slot.cmp(&self.slot))
    }
}

#[derive(Clone, Copy, Debug)]
enum KRule {
    Fixed(u64),
    AdmittedCount,
}

#[derive(Clone, Debug)]
enum Selector {
    /// Lazy max-heap for indices that change only for the arm just pulled.
    /// Stale entries are recognized by their generation and discarded on pop.
    IndexMax { heap: BinaryHeap<HeapEntry>, k: KRule },
    /// Arms bucketed by `(pulls, successes)`: every arm in a bucket shares
    /// the same round-dependent index, so one evaluation per bucket suffices.
    Grouped { groups: BTreeMap<(u64, u64), BTreeSet<usize>> },
    /// Posterior sampling; indices are drawn fresh every round.
    PosteriorSample,
}

#[derive(Clone, Debug)]
struct TrackedArm {
    id: usize,
    stats: ArmStats,
    generation: u32,
}

/// Shared state of every policy in this module.
#[derive(Clone, Debug)]
pub struct PolicyState {
    kind: PolicyKind,
    horizon: u64,
    alpha: Option<f64>,
    cap: Option<u64>,
    arms: Vec<TrackedArm>,
    slot_of: Vec<Option<usize>>,
    selector: Selector,
}

impl PolicyState {
    /// Admission-capped policy: only the first `ceil(alpha * T)` offered arms
    /// are ever tracked; the index uses `k = cap`.
    pub fn bl_moss(horizon: u64, alpha: f64) -> Result<Self> {
        Self::bl_moss_with(horizon, alpha, MossNormalization::AdmissionCap)
    }

    pub fn bl_moss_with(horizon: u64, alpha: f64, norm: MossNormalization) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::domain("horizon must be >= 1".to_string()));
        }
        if !alpha.is_finite() || alpha <= 0.0 || alpha > 1.0 {
            return Err(Error::domain(format!("alpha must lie in (0, 1], got {alpha}")));
        }
        let cap = admission_cap(alpha, horizon);
        let k = match norm {
            MossNormalization::AdmissionCap => KRule::Fixed(cap),
            MossNormalization::AdmittedCount => KRule::AdmittedCount,
        };
        Ok(Self {
            kind: PolicyKind::BlMoss,
            horizon,
            alpha: Some(alpha),
            cap: Some(cap),
            arms: Vec::new(),
            slot_of: Vec::new(),
            selector: Selector::IndexMax { heap: BinaryHeap::new(), k },
        })
    }

    /// Horizon-aware index policy over every offered arm, with a fixed `k`.
    pub fn moss(horizon: u64, k: u64) -> Result<Self> {
        if horizon == 0 || k == 0 {
            return Err(Error::domain("horizon and k must be >= 1".to_string()));
        }
        Ok(Self {
            kind: PolicyKind::Moss,
            horizon,
            alpha: None,
            cap: None,
            arms: Vec::new(),
            slot_of: Vec::new(),
            selector: Selector::IndexMax { heap: BinaryHeap::new(), k: KRule::Fixed(k) },
        })
    }

    pub fn ucb1(horizon: u64) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::domain("horizon must be >= 1".to_string()));
        }
        Ok(Self {
            kind: PolicyKind::Ucb1,
            horizon,
            alpha: None,
            cap: None,
            arms: Vec::new(),
            slot_of: Vec::new(),
            selector: Selector::Grouped { groups: BTreeMap::new() },
        })
    }

    pub fn thompson(horizon: u64) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::domain("horizon must be >= 1".to_string()));
        }
        Ok(Self {
            kind: PolicyKind::Thompson,
            horizon,
            alpha: None,
            cap: None,
            arms: Vec::new(),
            slot_of: Vec::new(),
            selector: Selector::PosteriorSample,
        })
    }

    pub fn kind(&self) -> PolicyKind {
        self.kind
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn alpha(&self) -> Option<f64> {
        self.alpha
    }

    /// Admission cap, if this policy has one.
    pub fn cap(&self) -> Option<u64> {
        self.cap
    }

    /// Number of arms currently tracked.
    pub fn admitted(&self) -> usize {
        self.arms.len()
    }

    pub fn stats(&self, arm: usize) -> Option<&ArmStats> {
        let slot = self.slot_of.get(arm).copied().flatten()?;
        Some(&self.arms[slot].stats)
    }

    /// Beta posterior `(successes + 1, failures + 1)` of a tracked arm.
    pub fn posterior(&self, arm: usize) -> Option<(f64, f64)> {
        let stats = self.stats(arm)?;
        Some((stats.reward_sum + 1.0, (stats.pulls as f64 - stats.reward_sum) + 1.0))
    }

    /// Presents a newly arrived arm. Returns whether the policy tracks it.
    /// Offering the same arm twice is a caller bug.
    pub fn offer_arm(&mut self, arm: usize) -> bool {
        if arm < self.slot_of.len() {
            assert!(self.slot_of[arm].is_none(), "arm {arm} offered twice");
        }
        if let Some(cap) = self.cap {
            if self.arms.len() as u64 >= cap {
                return false;
            }
        }
        let slot = self.arms.len();
        if arm >= self.slot_of.len() {
            self.slot_of.resize(arm + 1, None);
        }
        self.slot_of[arm] = Some(slot);
        self.arms.push(TrackedArm { id: arm, stats: ArmStats::default(), generation: 0 });
        match &mut self.selector {
            Selector::IndexMax { heap, k } => match k {
                KRule::Fixed(_) => {
                    heap.push(HeapEntry { index: f64::INFINITY, slot, generation: 0 });
                }
                KRule::AdmittedCount => {
                    // The shared k changed, so every index changed: rebuild.
                    let k = self.arms.len().max(1) as u64;
                    let entries: Vec<HeapEntry> = self
                        .arms
                        .iter()
                        .enumerate()
                        .map(|(s, a)| HeapEntry {
                            index: moss_index(a.stats.mean(), a.stats.pulls, self.horizon, k),
                            slot: s,
                            generation: a.generation,
                        })
                        .collect();
                    *heap = BinaryHeap::from(entries);
                }
            },
            Selector::Grouped { groups } => {
                groups.entry((0, 0)).or_default().insert(slot);
            }
            Selector::PosteriorSample => {}
        }
        true
    }

    /// Picks the arm to pull in `round` (1-based). Only posterior sampling
    /// consumes randomness.
    pub fn select(&mut self, round: u64, rng: &mut SimRng) -> Result<usize> {
        if round == 0 {
            return Err(Error::domain("rounds are 1-based".to_string()));
        }
        if self.arms.is_empty() {
            return Err(Error::state("select called before any arm was admitted".to_string()));
        }
        match &mut self.selector {
            Selector::IndexMax { heap, .. } => loop {
                let top = *heap.peek().expect("heap holds one live entry per arm");
                if self.arms[top.slot].generation == top.generation {
                    return Ok(self.arms[top.slot].id);
                }
                heap.pop();
            },
            Selector::Grouped { groups } => {
                let mut best: Option<(f64, usize)> = None;
                for (&(pulls, successes), members) in groups.iter() {
                    let mean = if pulls == 0 { 0.0 } else { successes as f64 / pulls as f64 };
                    let index = ucb1_index(mean, pulls, round);
                    let slot = *members.first().expect("empty groups are removed");
                    best = match best {
                        None => Some((index, slot)),
                        Some((bi, bs)) => {
                            if index > bi || (index == bi && slot < bs) {
                                Some((index, slot))
                            } else {
                                Some((bi, bs))
                            }
                        }
                    };
                }
                let (_, slot) = best.expect("at least one group when arms exist");
                Ok(self.arms[slot].id)
            }
            Selector::PosteriorSample => {
                let mut best_theta = f64::NEG_INFINITY;
                let mut best_slot = 0usize;
                for (slot, arm) in self.arms.iter().enumerate() {
                    let a = arm.stats.reward_sum + 1.0;
                    let b = (arm.stats.pulls as f64 - arm.stats.reward_sum) + 1.0;
                    let theta = Beta::new(a, b)
                        .map_err(|e| Error::state(format!("invalid posterior: {e}")))?
                        .sample(rng);
                    if theta > best_theta {
                        best_theta = theta;
                        best_slot = slot;
                    }
                }
                Ok(self.arms[best_slot].id)
            }
        }
    }

    /// Admits a newly arrived arm (if any), then selects. This is the one
    /// round body shared by every policy here.
    pub fn step(&mut self, round: u64, newly_arrived: Option<usize>, rng: &mut SimRng) -> Result<usize> {
        if let Some(arm) = newly_arrived {
            self.offer_arm(arm);
        }
        self.select(round, rng)
    }

    /// Records a binary reward for a tracked arm.
    pub fn update(&mut self, arm: usize, reward: bool) -> Result<()> {
        let slot = self
            .slot_of
            .get(arm)
            .copied()
            .flatten()
            .ok_or_else(|| Error::state(format!("arm {arm} is not tracked")))?;
        let old = self.arms[slot].stats;
        {
            let stats = &mut self.arms[slot].stats;
            stats.pulls += 1;
            stats.reward_sum += f64::from(u8::from(reward));
        }
        self.arms[slot].generation += 1;
        let generation = self.arms[slot].generation;
        let new_stats = self.arms[slot].stats;
        let n_arms = self.arms.len().max(1) as u64;
        let horizon = self.horizon;
        match &mut self.selector {
            Selector::IndexMax { heap, k } => {
                let k = match k {
                    KRule::Fixed(k) => *k,
                    KRule::AdmittedCount => n_arms,
                };
                let index = moss_index(new_stats.mean(), new_stats.pulls, horizon, k);
                heap.push(HeapEntry { index, slot, generation });
            }
            Selector::Grouped { groups } => {
                let old_key = (old.pulls, old.reward_sum as u64);
                let new_key = (old.pulls + 1, old.reward_sum as u64 + u64::from(reward));
                let members = groups.get_mut(&old_key).expect("arm was registered in a group");
                members.remove(&slot);
                if members.is_empty() {
                    groups.remove(&old_key);
                }
                groups.entry(new_key).or_default().insert(slot);
            }
            Selector::PosteriorSample => {}
        }
        Ok(())
    }
}
