//! The three noise channels as exact maps on density operators, and their
//! random-unitary unravelings for trajectory sampling.
//!
//! * depolarizing: `p·UρU† + (1-p)·½1 ⊗ tr_coin ρ`
//! * dephasing: `p'·UρU† + (1-p')·Uσ3ρσ3U†`
//! * tunneling: `q·ρ + (1-q)/2·(U₊ρU₊† + U₋ρU₋†)`, coin-independent
//!
//! The depolarizing noise branch replaces the coin by the maximally mixed
//! state, so whether `U` is applied before it makes no difference. Its
//! unraveling follows the Pauli-mixture form literally: the noise branch is
//! a uniformly random `σ_k` without `U`.

use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{CoinOperator, Protocol, StepPlan, Translation, WalkState};
use crate::error::{check_unit, Result, WalkError};
use crate::exec::Execution;
use crate::hilbert::{make_initial, to_density, CoinState, DensityOperator, PositionSpace};
use crate::kernels::{self, Displacement};
use crate::mat2::{self, Mat2};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChannelSet {
    pub depolarizing: bool,
    pub dephasing: bool,
    pub tunneling: bool,
}

/// Noise parameters. `p`, `p_prime` and `q` are the probabilities that the
/// ideal operation happens; a parameter only matters if its channel is
/// enabled.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub p: f64,
    pub p_prime: f64,
    pub q: f64,
    pub enabled: ChannelSet,
    /// Permits depolarizing and dephasing in the same run.
    #[serde(default)]
    pub allow_composed: bool,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self::noiseless()
    }
}

impl NoiseSpec {
    pub fn noiseless() -> Self {
        Self { p: 1.0, p_prime: 1.0, q: 1.0, enabled: ChannelSet::default(), allow_composed: false }
    }

    pub fn depolarizing(p: f64) -> Self {
        let mut n = Self::noiseless();
        n.p = p;
        n.enabled.depolarizing = true;
        n
    }

    pub fn dephasing(p_prime: f64) -> Self {
        let mut n = Self::noiseless();
        n.p_prime = p_prime;
        n.enabled.dephasing = true;
        n
    }

    pub fn tunneling(q: f64) -> Self {
        Self::noiseless().with_tunneling(q)
    }

    pub fn with_tunneling(mut self, q: f64) -> Self {
        self.q = q;
        self.enabled.tunneling = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_unit("p", self.p)?;
        check_unit("p_prime", self.p_prime)?;
        check_unit("q", self.q)?;
        if self.enabled.depolarizing && self.enabled.dephasing && !self.allow_composed {
            return Err(WalkError::InvalidNoise(
                "depolarizing and dephasing together require allow_composed".into(),
            ));
        }
        Ok(())
    }

    pub fn tunneling_active(&self) -> bool {
        self.enabled.tunneling && self.q < 1.0
    }

    /// True when every enabled channel is the identity.
    pub fn is_noiseless(&self) -> bool {
        !(self.enabled.depolarizing && self.p < 1.0)
            && !(self.enabled.dephasing && self.p_prime < 1.0)
            && !self.tunneling_active()
    }

    /// Combinations outside the reference parameter sets.
    pub fn nonstandard_reasons(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.enabled.depolarizing && self.enabled.dephasing {
            out.push("depolarizing and dephasing composed");
        }
        if self.enabled.dephasing && self.enabled.tunneling {
            out.push("dephasing composed with tunneling");
        }
        out
    }

    /// Sites the support can travel per step.
    pub fn sites_per_step(&self) -> usize {
        if self.tunneling_active() {
            2
        } else {
            1
        }
    }

    /// Short label such as `p0.99_q0.95`, used in file names.
    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        if self.enabled.depolarizing {
            parts.push(format!("p{}", self.p));
        }
        if self.enabled.dephasing {
            parts.push(format!("pp{}", self.p_prime));
        }
        if self.enabled.tunneling {
            parts.push(format!("q{}", self.q));
        }
        if parts.is_empty() {
            "ideal".to_string()
        } else {
            parts.join("_")
        }
    }
}

/// Where tunneling acts within a step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TunnelingOrder {
    #[default]
    AfterShift,
    BeforeShift,
}

fn depolarize_block(u: &Mat2, p: f64, b: &Mat2) -> Mat2 {
    let ideal = mat2::conjugate(u, b);
    let half_tr = mat2::trace(b) * 0.5;
    let mixed = mat2::scale(&mat2::IDENTITY, half_tr * (1.0 - p));
    mat2::add(&mat2::scale(&ideal, C64::new(p, 0.0)), &mixed)
}

fn dephase_block(u: &Mat2, p_prime: f64, b: &Mat2) -> Mat2 {
    // p'·B + (1-p')·σ3 B σ3 scales the coin coherences by 2p' - 1
    let s = C64::new(2.0 * p_prime - 1.0, 0.0);
    let d = [[b[0][0], b[0][1] * s], [b[1][0] * s, b[1][1]]];
    mat2::conjugate(u, &d)
}

pub fn depolarizing_coin(
    rho: &mut DensityOperator,
    u: &CoinOperator,
    p: f64,
    exec: Execution,
) -> Result<()> {
    check_unit("p", p)?;
    let u = *u.matrix();
    kernels::map_coin_blocks(rho, exec, |b| depolarize_block(&u, p, b));
    Ok(())
}

pub fn dephasing_coin(
    rho: &mut DensityOperator,
    u: &CoinOperator,
    p_prime: f64,
    exec: Execution,
) -> Result<()> {
    check_unit("p_prime", p_prime)?;
    let u = *u.matrix();
    kernels::map_coin_blocks(rho, exec, |b| dephase_block(&u, p_prime, b));
    Ok(())
}

pub fn tunneling(rho: &mut DensityOperator, q: f64, exec: Execution) -> Result<()> {
    check_unit("q", q)?;
    if q == 1.0 {
        return Ok(());
    }
    let side = (1.0 - q) / 2.0;
    let terms = [
        Displacement { weight: q, offsets: [0, 0] },
        Displacement { weight: side, offsets: [1, 1] },
        Displacement { weight: side, offsets: [-1, -1] },
    ];
    kernels::displace_density(rho, &terms, exec)
}

/// The coin part of a noisy step: `U` combined with whichever coin channel
/// is enabled (composed as depolarizing, then dephasing without `U`).
pub fn coin_channel(
    rho: &mut DensityOperator,
    u: &CoinOperator,
    noise: &NoiseSpec,
    exec: Execution,
) -> Result<()> {
    match (noise.enabled.depolarizing, noise.enabled.dephasing) {
        (false, false) => {
            rho.apply_coin(u, exec);
            Ok(())
        }
        (true, false) => depolarizing_coin(rho, u, noise.p, exec),
        (false, true) => dephasing_coin(rho, u, noise.p_prime, exec),
        (true, true) => {
            depolarizing_coin(rho, u, noise.p, exec)?;
            dephasing_coin(rho, &CoinOperator::identity(), noise.p_prime, exec)
        }
    }
}

/// Coin channel, controlled shift and tunneling for one step.
pub fn noisy_step(
    rho: &mut DensityOperator,
    plan: &StepPlan,
    noise: &NoiseSpec,
    order: TunnelingOrder,
    exec: Execution,
) -> Result<()> {
    coin_channel(rho, &plan.coin, noise, exec)?;
    let q = if noise.enabled.tunneling { noise.q } else { 1.0 };
    match order {
        TunnelingOrder::AfterShift => {
            rho.shift(plan.shift, exec)?;
            tunneling(rho, q, exec)
        }
        TunnelingOrder::BeforeShift => {
            tunneling(rho, q, exec)?;
            rho.shift(plan.shift, exec)
        }
    }
}

/// Applies steps `first..first + count` with noise.
pub fn evolve_noisy(
    rho: &mut DensityOperator,
    protocol: &Protocol,
    noise: &NoiseSpec,
    order: TunnelingOrder,
    first: usize,
    count: usize,
    exec: Execution,
) -> Result<()> {
    noise.validate()?;
    for m in first..first + count {
        noisy_step(rho, &protocol.plan(m), noise, order, exec)?;
    }
    Ok(())
}

/// Exact density-operator walk of `n` noisy steps from `initial ⊗ |k0⟩`.
#[allow(clippy::too_many_arguments)]
pub fn run_density(
    space: PositionSpace,
    protocol: &Protocol,
    initial: CoinState,
    k0: i64,
    noise: &NoiseSpec,
    order: TunnelingOrder,
    n: usize,
    exec: Execution,
) -> Result<DensityOperator> {
    let mut rho = to_density(&make_initial(space, initial, k0)?);
    evolve_noisy(&mut rho, protocol, noise, order, 0, n, exec)?;
    Ok(rho)
}

/// Which unitary of the mixture was drawn for the coin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoinBranch {
    Ideal,
    /// Depolarizing noise branch `σ_k`.
    Pauli(usize),
    /// `U σ3`
    Dephased,
    /// Pauli branch followed by a σ3 phase flip (composed noise only).
    PauliDephased(usize),
}

/// One sampled step of an unraveled channel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Branch {
    pub kind: CoinBranch,
    pub coin: CoinOperator,
    pub tunnel: Option<Translation>,
}

/// Draws one unitary branch with the channel's mixture weights.
pub fn unravel<R: Rng + ?Sized>(noise: &NoiseSpec, u: &CoinOperator, rng: &mut R) -> Branch {
    let (mut kind, mut coin) = (CoinBranch::Ideal, *u);
    if noise.enabled.depolarizing {
        let r: f64 = rng.gen();
        if r >= noise.p {
            let k = (((r - noise.p) / (1.0 - noise.p)) * 4.0) as usize;
            let k = k.min(3);
            kind = CoinBranch::Pauli(k);
            coin = CoinOperator::pauli(k);
        }
    }
    if noise.enabled.dephasing {
        let r: f64 = rng.gen();
        if r >= noise.p_prime {
            coin = if noise.enabled.depolarizing {
                CoinOperator::sigma_z().then_after(&coin)
            } else {
                coin.then_after(&CoinOperator::sigma_z())
            };
            kind = match kind {
                CoinBranch::Pauli(k) => CoinBranch::PauliDephased(k),
                _ => CoinBranch::Dephased,
            };
        }
    }
    let mut tunnel = None;
    if noise.enabled.tunneling {
        let r: f64 = rng.gen();
        if r >= noise.q {
            let half = noise.q + (1.0 - noise.q) / 2.0;
            tunnel = Some(if r < half { Translation::Left } else { Translation::Right });
        }
    }
    Branch { kind, coin, tunnel }
}
