//! Position distributions and the statistics computed from them.

use rand::distributions::{Distribution as _, WeightedIndex};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channels::NoiseSpec;
use crate::classical::ClassicalDistribution;
use crate::dynamics::{Protocol, WalkState};
use crate::hilbert::Topology;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DistributionMeta {
    pub steps: Option<usize>,
    pub protocol: Option<Protocol>,
    pub noise: Option<NoiseSpec>,
}

/// Probabilities over the contiguous positions `offset..offset + probs.len()`.
///
/// `normalized` is false for the surviving part of an absorbing walk, whose
/// total is the survival probability.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub offset: i64,
    pub probs: Vec<f64>,
    pub topology: Topology,
    pub normalized: bool,
    pub meta: DistributionMeta,
}

impl Distribution {
    pub fn new(offset: i64, probs: Vec<f64>, topology: Topology) -> Self {
        let total: f64 = probs.iter().sum();
        Self { offset, probs, topology, normalized: (total - 1.0).abs() < 1e-10, meta: DistributionMeta::default() }
    }

    pub fn with_meta(mut self, meta: DistributionMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn get(&self, k: i64) -> f64 {
        let i = k - self.offset;
        if i < 0 {
            return 0.0;
        }
        self.probs.get(i as usize).copied().unwrap_or(0.0)
    }

    pub fn positions(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.probs.iter().enumerate().map(move |(i, &p)| (self.offset + i as i64, p))
    }

    pub fn range(&self) -> (i64, i64) {
        (self.offset, self.offset + self.probs.len() as i64 - 1)
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.positions().map(|(k, p)| k as f64 * p).sum::<f64>() / self.total()
    }

    pub fn std_dev(&self) -> f64 {
        let m = self.mean();
        let var = self.positions().map(|(k, p)| (k as f64 - m).powi(2) * p).sum::<f64>() / self.total();
        var.max(0.0).sqrt()
    }

    /// `k → -k`.
    pub fn mirrored(&self) -> Distribution {
        let mut probs = self.probs.clone();
        probs.reverse();
        Distribution { offset: -self.range().1, probs, ..self.clone() }
    }

    /// Mass with `|k| > threshold`.
    pub fn tail_mass(&self, threshold: f64) -> f64 {
        self.positions().filter(|(k, _)| (*k as f64).abs() > threshold).map(|(_, p)| p).sum()
    }

    /// Mass on `(√n, n/√2) ∪ (-n/√2, -√n)`, open intervals.
    pub fn interval_mass(&self, n: usize) -> f64 {
        let (a, b) = ((n as f64).sqrt(), n as f64 / std::f64::consts::SQRT_2);
        self.positions()
            .filter(|(k, _)| {
                let x = (*k as f64).abs();
                x > a && x < b
            })
            .map(|(_, p)| p)
            .sum()
    }

    /// Mass on positions whose parity differs from `n`.
    pub fn off_parity_mass(&self, n: usize) -> f64 {
        self.positions().filter(|(k, _)| (k - n as i64).rem_euclid(2) != 0).map(|(_, p)| p).sum()
    }

    /// Divides by the total mass; returns `None` for an empty distribution.
    pub fn renormalized(&self) -> Option<Distribution> {
        let t = self.total();
        if t <= 0.0 {
            return None;
        }
        let mut d = self.clone();
        d.probs.iter_mut().for_each(|p| *p /= t);
        d.normalized = true;
        Some(d)
    }
}

impl From<&ClassicalDistribution> for Distribution {
    fn from(c: &ClassicalDistribution) -> Self {
        Distribution::new(c.offset, c.probs.clone(), Topology::Line)
    }
}

/// `p(k) = Σ_c ⟨c,k|ρ|c,k⟩`.
pub fn position_distribution<S: WalkState>(state: &S) -> Distribution {
    let space = state.space();
    Distribution::new(space.bounds().0, state.position_probabilities(), space.topology())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PreFlip {
    None,
    /// σx with probability ½ before a coin-selective readout, evaluated as
    /// the exact mixture.
    RandomSigmaX,
}

/// Position distribution conditioned on one coin outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct CoinConditional {
    /// Probability of the coin outcome.
    pub weight: f64,
    /// Renormalized; all zeros when `empty`.
    pub distribution: Distribution,
    pub empty: bool,
}

pub fn conditional_distributions<S: WalkState>(state: &S, pre_flip: PreFlip) -> [CoinConditional; 2] {
    let space = state.space();
    let [mut p0, mut p1] = state.coin_position_probabilities();
    if pre_flip == PreFlip::RandomSigmaX {
        let mixed: Vec<f64> = p0.iter().zip(&p1).map(|(a, b)| 0.5 * (a + b)).collect();
        p0 = mixed.clone();
        p1 = mixed;
    }
    [p0, p1].map(|probs| {
        let raw = Distribution::new(space.bounds().0, probs, space.topology());
        let weight = raw.total();
        match raw.renormalized() {
            Some(distribution) => CoinConditional { weight, distribution, empty: false },
            None => CoinConditional { weight, distribution: raw, empty: true },
        }
    })
}

/// `½ Σ_k |p(k) - q(k)|` over the union of both supports.
pub fn tv_distance(a: &Distribution, b: &Distribution) -> f64 {
    let lo = a.range().0.min(b.range().0);
    let hi = a.range().1.max(b.range().1);
    0.5 * (lo..=hi).map(|k| (a.get(k) - b.get(k)).abs()).sum::<f64>()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub mean: f64,
    pub std_dev: f64,
    pub tv_distance: Option<f64>,
    /// Mass on `(√n, n/√2)` and its mirror, `n` taken from the metadata.
    pub interval_mass: f64,
}

pub fn summary(dist: &Distribution, reference: Option<&Distribution>) -> SummaryStats {
    SummaryStats {
        mean: dist.mean(),
        std_dev: dist.std_dev(),
        tv_distance: reference.map(|r| tv_distance(dist, r)),
        interval_mass: dist.meta.steps.map_or(0.0, |n| dist.interval_mass(n)),
    }
}

/// Empirical distribution of `shots` i.i.d. draws from `dist`.
pub fn sample_positions<R: Rng + ?Sized>(dist: &Distribution, shots: usize, rng: &mut R) -> Distribution {
    let mut counts = vec![0usize; dist.probs.len()];
    let sampler = WeightedIndex::new(&dist.probs).expect("distribution has positive mass");
    for _ in 0..shots {
        counts[sampler.sample(rng)] += 1;
    }
    empirical(dist.offset, dist.topology, &counts, shots).with_meta(dist.meta.clone())
}

pub(crate) fn empirical(offset: i64, topology: Topology, counts: &[usize], shots: usize) -> Distribution {
    let probs = counts.iter().map(|&c| c as f64 / shots as f64).collect();
    let mut d = Distribution::new(offset, probs, topology);
    d.normalized = true;
    d
}
