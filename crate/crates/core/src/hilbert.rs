//! States over the composite coin ⊗ position space.
//!
//! Flat index convention, shared by every module: the basis state
//! `|c⟩ ⊗ |k⟩` sits at `c · dim + pos_index(k)`, i.e. coin-major. A
//! [`PureState`] is a vector of `2 · dim` amplitudes and a
//! [`DensityOperator`] is a dense row-major `2·dim × 2·dim` matrix with the
//! same row and column ordering.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WalkError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Line,
    Circle,
}

impl Topology {
    pub fn name(self) -> &'static str {
        match self {
            Topology::Line => "line",
            Topology::Circle => "circle",
        }
    }
}

/// Lattice sites available to the walker.
///
/// A line is a finite window `[lo, hi]` of the infinite line; the usual
/// window is symmetric, `[-n_max, n_max]`. A circle has `N` sites `0..N`
/// with positions identified modulo `N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PositionSpace {
    topology: Topology,
    lo: i64,
    hi: i64,
}

impl PositionSpace {
    /// Symmetric line window `[-n_max, n_max]`.
    pub fn line(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(WalkError::InvalidSpace("line half-width must be >= 1".into()));
        }
        let n = n_max as i64;
        Ok(Self { topology: Topology::Line, lo: -n, hi: n })
    }

    /// Line window `[lo, hi]`, used for one-sided bounded walks where only
    /// one direction needs room to grow.
    pub fn line_range(lo: i64, hi: i64) -> Result<Self> {
        if hi <= lo {
            return Err(WalkError::InvalidSpace(format!("empty line window [{lo}, {hi}]")));
        }
        Ok(Self { topology: Topology::Line, lo, hi })
    }

    pub fn circle(sites: usize) -> Result<Self> {
        if sites < 2 {
            return Err(WalkError::InvalidSpace("circle needs at least 2 sites".into()));
        }
        Ok(Self { topology: Topology::Circle, lo: 0, hi: sites as i64 - 1 })
    }

    /// Re-checks the invariants; needed after deserialization.
    pub fn validate(&self) -> Result<()> {
        match self.topology {
            Topology::Line if self.hi <= self.lo => {
                Err(WalkError::InvalidSpace(format!("empty line window [{}, {}]", self.lo, self.hi)))
            }
            Topology::Circle if self.lo != 0 || self.hi < 1 => {
                Err(WalkError::InvalidSpace("circle needs at least 2 sites starting at 0".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    /// Number of sites.
    pub fn dim(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    /// Half-width for a line (largest |k| in the window), site count for a circle.
    pub fn extent(&self) -> usize {
        match self.topology {
            Topology::Line => self.lo.unsigned_abs().max(self.hi.unsigned_abs()) as usize,
            Topology::Circle => self.dim(),
        }
    }

    pub fn bounds(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }

    pub fn contains(&self, k: i64) -> bool {
        (self.lo..=self.hi).contains(&k)
    }

    pub fn index_of(&self, k: i64) -> Result<usize> {
        if self.contains(k) {
            Ok((k - self.lo) as usize)
        } else {
            Err(WalkError::PositionOutOfRange { position: k, lo: self.lo, hi: self.hi })
        }
    }

    pub fn position_of(&self, index: usize) -> i64 {
        self.lo + index as i64
    }

    pub fn positions(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }

    #[inline]
    pub fn flat_index(&self, coin: usize, pos_index: usize) -> usize {
        coin * self.dim() + pos_index
    }

    /// Inverse of [`flat_index`](Self::flat_index): `(coin, pos_index)`.
    #[inline]
    pub fn split_index(&self, flat: usize) -> (usize, usize) {
        (flat / self.dim(), flat % self.dim())
    }

    /// The same line window widened by `margin` sites on each side.
    pub fn grown(&self, margin: usize) -> Result<Self> {
        match self.topology {
            Topology::Line => {
                let m = margin as i64;
                Ok(Self { topology: Topology::Line, lo: self.lo - m, hi: self.hi + m })
            }
            Topology::Circle => Err(WalkError::UnsupportedTopology("circle")),
        }
    }
}

/// Internal (coin) state `a0|0⟩ + a1|1⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoinState {
    pub a0: C64,
    pub a1: C64,
}

impl CoinState {
    pub const fn new(a0: C64, a1: C64) -> Self {
        Self { a0, a1 }
    }

    /// `(|0⟩ + i|1⟩)/√2`, the initial coin of the standard Hadamard walk.
    pub fn symmetric() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::new(C64::new(s, 0.0), C64::new(0.0, s))
    }

    /// `(|0⟩ + |1⟩)/√2`, paired with the π/2-pulse coin.
    pub fn plus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::new(C64::new(s, 0.0), C64::new(s, 0.0))
    }

    pub fn zero() -> Self {
        Self::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0))
    }

    pub fn one() -> Self {
        Self::new(C64::new(0.0, 0.0), C64::new(1.0, 0.0))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a0.norm_sqr() + self.a1.norm_sqr()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.norm_sqr();
        if (n - 1.0).abs() <= 1e-12 {
            Ok(())
        } else {
            Err(WalkError::UnnormalizedCoin(n))
        }
    }

    pub fn as_array(&self) -> [C64; 2] {
        [self.a0, self.a1]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    space: PositionSpace,
    amps: Vec<C64>,
}

/// `coin ⊗ |k0⟩`.
pub fn make_initial(space: PositionSpace, coin: CoinState, k0: i64) -> Result<PureState> {
    coin.validate()?;
    let idx = space.index_of(k0)?;
    let mut psi = PureState::zeroed(space);
    psi.amps[space.flat_index(0, idx)] = coin.a0;
    psi.amps[space.flat_index(1, idx)] = coin.a1;
    Ok(psi)
}

impl PureState {
    pub fn zeroed(space: PositionSpace) -> Self {
        Self { space, amps: vec![C64::new(0.0, 0.0); 2 * space.dim()] }
    }

    pub fn from_amplitudes(space: PositionSpace, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != 2 * space.dim() {
            return Err(WalkError::SpaceMismatch);
        }
        Ok(Self { space, amps })
    }

    pub fn space(&self) -> &PositionSpace {
        &self.space
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub(crate) fn amps_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn amplitude(&self, coin: usize, k: i64) -> Result<C64> {
        let idx = self.space.index_of(k)?;
        Ok(self.amps[self.space.flat_index(coin, idx)])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `|a0(k)|²` and `|a1(k)|²` by position index.
    pub fn coin_position_probabilities(&self) -> [Vec<f64>; 2] {
        let dim = self.space.dim();
        [
            self.amps[..dim].iter().map(|a| a.norm_sqr()).collect(),
            self.amps[dim..].iter().map(|a| a.norm_sqr()).collect(),
        ]
    }

    pub fn position_probabilities(&self) -> Vec<f64> {
        let dim = self.space.dim();
        (0..dim)
            .map(|i| self.amps[i].norm_sqr() + self.amps[dim + i].norm_sqr())
            .collect()
    }

    /// Applies `1 - |k⟩⟨k|` (both coin states) and returns the removed probability.
    pub fn zero_position(&mut self, pos_index: usize) -> f64 {
        let dim = self.space.dim();
        let mut removed = 0.0;
        for c in 0..2 {
            let a = &mut self.amps[c * dim + pos_index];
            removed += a.norm_sqr();
            *a = C64::new(0.0, 0.0);
        }
        removed
    }

    /// Re-embeds the state in a line window `margin` sites wider on each side.
    pub fn grow_window(&self, margin: usize) -> Result<PureState> {
        let space = self.space.grown(margin)?;
        let (old, new) = (self.space.dim(), space.dim());
        let mut amps = vec![C64::new(0.0, 0.0); 2 * new];
        for c in 0..2 {
            amps[c * new + margin..c * new + margin + old]
                .copy_from_slice(&self.amps[c * old..(c + 1) * old]);
        }
        Ok(PureState { space, amps })
    }
}

/// Dense density operator over coin ⊗ position.
///
/// Entries outside the tracked position support (in both coin sectors) are
/// exactly zero; kernels only touch the support block. The support only
/// ever grows.
#[derive(Debug)]
pub struct DensityOperator {
    space: PositionSpace,
    data: Vec<C64>,
    normalized: bool,
    support: (usize, usize),
    scratch: Vec<C64>,
}

impl Clone for DensityOperator {
    fn clone(&self) -> Self {
        Self {
            space: self.space,
            data: self.data.clone(),
            normalized: self.normalized,
            support: self.support,
            scratch: Vec::new(),
        }
    }
}

impl PartialEq for DensityOperator {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space && self.normalized == other.normalized && self.data == other.data
    }
}

/// `|ψ⟩⟨ψ|`
pub fn to_density(psi: &PureState) -> DensityOperator {
    DensityOperator::from_pure(psi)
}

impl DensityOperator {
    pub fn from_pure(psi: &PureState) -> Self {
        let space = psi.space;
        let n = psi.amps.len();
        let mut data = vec![C64::new(0.0, 0.0); n * n];
        for (r, row) in data.chunks_mut(n).enumerate() {
            let ar = psi.amps[r];
            if ar == C64::new(0.0, 0.0) {
                continue;
            }
            for (x, ac) in row.iter_mut().zip(&psi.amps) {
                *x = ar * ac.conj();
            }
        }
        let support = match space.topology {
            Topology::Circle => (0, space.dim() - 1),
            Topology::Line => {
                let probs = psi.position_probabilities();
                let first = probs.iter().position(|&p| p != 0.0);
                let last = probs.iter().rposition(|&p| p != 0.0);
                match (first, last) {
                    (Some(a), Some(b)) => (a, b),
                    _ => (0, 0),
                }
            }
        };
        Self { space, data, normalized: true, support, scratch: Vec::new() }
    }

    /// Wraps an explicit `2·dim × 2·dim` row-major matrix.
    pub fn from_matrix(space: PositionSpace, data: Vec<C64>) -> Result<Self> {
        let n = 2 * space.dim();
        if data.len() != n * n {
            return Err(WalkError::SpaceMismatch);
        }
        Ok(Self { space, data, normalized: true, support: (0, space.dim() - 1), scratch: Vec::new() })
    }

    pub fn space(&self) -> &PositionSpace {
        &self.space
    }

    /// Side length `2 · dim` of the matrix.
    pub fn matrix_dim(&self) -> usize {
        2 * self.space.dim()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.matrix_dim() + col]
    }

    /// False once probability has been projected out (absorbing barriers);
    /// the trace is then the survival probability.
    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn mark_unnormalized(&mut self) {
        self.normalized = false;
    }

    /// Inclusive position-index bounds outside of which every entry is zero.
    pub fn support(&self) -> (usize, usize) {
        self.support
    }

    pub fn trace(&self) -> f64 {
        let n = self.matrix_dim();
        (0..n).map(|i| self.data[i * n + i].re).sum()
    }

    /// `tr(ρ²)`; assumes Hermiticity.
    pub fn purity(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum()
    }

    /// `max |ρ - ρ†|` elementwise.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.matrix_dim();
        let mut m: f64 = 0.0;
        for r in 0..n {
            for c in r..n {
                m = m.max((self.data[r * n + c] - self.data[c * n + r].conj()).norm());
            }
        }
        m
    }

    pub fn position_probabilities(&self) -> Vec<f64> {
        let [p0, p1] = self.coin_position_probabilities();
        p0.iter().zip(&p1).map(|(a, b)| a + b).collect()
    }

    pub fn coin_position_probabilities(&self) -> [Vec<f64>; 2] {
        let dim = self.space.dim();
        let n = self.matrix_dim();
        let diag = |c: usize| -> Vec<f64> {
            (0..dim)
                .map(|i| {
                    let f = c * dim + i;
                    self.data[f * n + f].re
                })
                .collect()
        };
        [diag(0), diag(1)]
    }

    /// Applies `(1 - P_k) ρ (1 - P_k)` with `P_k = 1_coin ⊗ |k⟩⟨k|` and
    /// returns `tr(P_k ρ)`. Leaves the operator unnormalized.
    pub fn zero_position(&mut self, pos_index: usize) -> f64 {
        let dim = self.space.dim();
        let n = self.matrix_dim();
        let mut removed = 0.0;
        for c in 0..2 {
            let f = c * dim + pos_index;
            removed += self.data[f * n + f].re;
            self.data[f * n..(f + 1) * n].fill(C64::new(0.0, 0.0));
            for r in 0..n {
                self.data[r * n + f] = C64::new(0.0, 0.0);
            }
        }
        self.normalized = false;
        removed
    }

    pub fn grow_window(&self, margin: usize) -> Result<DensityOperator> {
        let space = self.space.grown(margin)?;
        let (old_dim, new_dim) = (self.space.dim(), space.dim());
        let (old_n, new_n) = (2 * old_dim, 2 * new_dim);
        let remap = |f: usize| {
            let (c, i) = (f / old_dim, f % old_dim);
            c * new_dim + i + margin
        };
        let mut data = vec![C64::new(0.0, 0.0); new_n * new_n];
        for r in 0..old_n {
            let nr = remap(r);
            for c in 0..old_n {
                data[nr * new_n + remap(c)] = self.data[r * old_n + c];
            }
        }
        Ok(DensityOperator {
            space,
            data,
            normalized: self.normalized,
            support: (self.support.0 + margin, self.support.1 + margin),
            scratch: Vec::new(),
        })
    }

    pub(crate) fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub(crate) fn set_support(&mut self, support: (usize, usize)) {
        self.support = support;
    }

    /// Moves out the data and a scratch buffer of equal size whose entries
    /// outside the current support are zero.
    pub(crate) fn take_buffers(&mut self) -> (Vec<C64>, Vec<C64>) {
        let data = std::mem::take(&mut self.data);
        let mut scratch = std::mem::take(&mut self.scratch);
        if scratch.len() != data.len() {
            scratch = vec![C64::new(0.0, 0.0); data.len()];
        }
        (data, scratch)
    }

    pub(crate) fn restore_buffers(&mut self, data: Vec<C64>, scratch: Vec<C64>) {
        self.data = data;
        self.scratch = scratch;
    }
}
