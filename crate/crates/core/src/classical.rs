//! Classical random-walk baselines.

use serde::{Deserialize, Serialize};

/// Probability mass over the contiguous positions `offset..offset + len`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalDistribution {
    pub offset: i64,
    pub probs: Vec<f64>,
}

impl ClassicalDistribution {
    pub fn delta(k: i64) -> Self {
        Self { offset: k, probs: vec![1.0] }
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

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.positions().map(|(k, p)| k as f64 * p).sum::<f64>() / self.total()
    }

    pub fn std_dev(&self) -> f64 {
        let m = self.mean();
        let var = self.positions().map(|(k, p)| (k as f64 - m).powi(2) * p).sum::<f64>() / self.total();
        var.sqrt()
    }
}

/// `p(n, k) = C(n, (n+k)/2) / 2^n` on `k = -n..=n`.
///
/// Rows of Pascal's triangle are built already divided by `2^r`, so nothing
/// overflows and no factorials are formed.
pub fn binomial_walk(n: usize) -> ClassicalDistribution {
    let mut row = vec![1.0f64];
    for _ in 0..n {
        let mut next = vec![0.0; row.len() + 1];
        for (j, &x) in row.iter().enumerate() {
            next[j] += 0.5 * x;
            next[j + 1] += 0.5 * x;
        }
        row = next;
    }
    // row[j] is the probability of j right-moves: k = 2j - n
    let mut probs = vec![0.0; 2 * n + 1];
    for (j, &x) in row.iter().enumerate() {
        probs[2 * j] = x;
    }
    ClassicalDistribution { offset: -(n as i64), probs }
}

/// One step of the fair classical walk. Mass arriving on a barrier is
/// removed and returned.
pub fn classical_dp_step(dist: &ClassicalDistribution, barriers: &[i64]) -> (ClassicalDistribution, f64) {
    let mut probs = vec![0.0; dist.probs.len() + 2];
    for (i, &x) in dist.probs.iter().enumerate() {
        probs[i] += 0.5 * x;
        probs[i + 2] += 0.5 * x;
    }
    let mut next = ClassicalDistribution { offset: dist.offset - 1, probs };
    let mut absorbed = 0.0;
    for &b in barriers {
        let i = b - next.offset;
        if i >= 0 && (i as usize) < next.probs.len() {
            absorbed += next.probs[i as usize];
            next.probs[i as usize] = 0.0;
        }
    }
    (next, absorbed)
}

/// Absorption time series: entry `t-1` is `(increment, cumulative)` after step `t`.
pub fn classical_absorption(start: i64, barriers: &[i64], n: usize) -> Vec<(f64, f64)> {
    let mut dist = ClassicalDistribution::delta(start);
    let mut cumulative = 0.0;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let (next, absorbed) = classical_dp_step(&dist, barriers);
        cumulative += absorbed;
        out.push((absorbed, cumulative));
        dist = next;
    }
    out
}
