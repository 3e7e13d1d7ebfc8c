//! Walks bounded by absorbing barriers.
//!
//! After every movement (the controlled shift and, when enabled, the
//! tunneling displacement) each barrier site is measured with
//! `P_b = 1_coin ⊗ |b⟩⟨b|`. The state is kept unnormalized, so its trace
//! is the survival probability and the removed mass `tr(P_b ρ)` is the
//! absorption increment. Measuring after each movement means a particle
//! can never step over a barrier, even when shift and tunneling together
//! move it two sites in one step.

use serde::{Deserialize, Serialize};

use crate::channels::{coin_channel, tunneling, NoiseSpec, TunnelingOrder};
use crate::dynamics::{Protocol, StepPlan, WalkState};
use crate::error::{Result, WalkError};
use crate::exec::Execution;
use crate::hilbert::{make_initial, to_density, CoinState, DensityOperator, PositionSpace};
use crate::measurement::{position_distribution, Distribution};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BarrierConfig {
    /// One or two barrier positions.
    pub barriers: Vec<i64>,
    pub max_steps: usize,
    #[serde(default)]
    pub start: i64,
}

impl BarrierConfig {
    pub fn new(barriers: Vec<i64>, max_steps: usize) -> Result<Self> {
        let cfg = Self { barriers, max_steps, start: 0 };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.barriers.is_empty() || self.barriers.len() > 2 {
            return Err(WalkError::InvalidBarrier("need one or two barriers".into()));
        }
        if self.barriers.contains(&self.start) {
            return Err(WalkError::InvalidBarrier(format!("barrier on the start site {}", self.start)));
        }
        if self.barriers.len() == 2 && self.barriers[0] == self.barriers[1] {
            return Err(WalkError::InvalidBarrier("barriers coincide".into()));
        }
        Ok(())
    }

    /// Smallest line window that holds every reachable site. Under
    /// after-move timing nothing gets past a barrier, so the window ends
    /// there.
    pub fn window(&self, noise: &NoiseSpec, timing: BarrierTiming) -> Result<PositionSpace> {
        let reach = (self.max_steps * noise.sites_per_step()).max(1) as i64;
        let (mut lo, mut hi) = (self.start - reach, self.start + reach);
        if timing == BarrierTiming::AfterMove {
            if let Some(&left) = self.barriers.iter().filter(|&&b| b < self.start).max() {
                lo = lo.max(left);
            }
            if let Some(&right) = self.barriers.iter().filter(|&&b| b > self.start).min() {
                hi = hi.min(right);
            }
        }
        PositionSpace::line_range(lo, hi)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BarrierTiming {
    /// Measure after every movement.
    #[default]
    AfterMove,
    /// Measure once per step, before the coin.
    BeforeCoin,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoundedOptions {
    pub tunneling: TunnelingOrder,
    pub barrier: BarrierTiming,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbsorptionRecord {
    pub step: usize,
    pub increment: f64,
    pub cumulative: f64,
    pub surviving: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundedRun {
    pub records: Vec<AbsorptionRecord>,
    /// Unnormalized distribution of the walkers still on the lattice.
    pub survivors: Distribution,
}

fn barrier_indices(space: &PositionSpace, cfg: &BarrierConfig) -> Vec<usize> {
    cfg.barriers.iter().filter_map(|&b| space.index_of(b).ok()).collect()
}

fn project<S: WalkState>(state: &mut S, idx: &[usize]) -> f64 {
    idx.iter().map(|&i| state.zero_position(i)).sum()
}

fn step_with_barriers<S, C, T>(
    state: &mut S,
    plan: &StepPlan,
    opts: BoundedOptions,
    idx: &[usize],
    exec: Execution,
    coin: C,
    tunnel: T,
) -> Result<f64>
where
    S: WalkState,
    C: FnOnce(&mut S) -> Result<()>,
    T: FnOnce(&mut S) -> Result<()>,
{
    let after_move = opts.barrier == BarrierTiming::AfterMove;
    let mut absorbed = 0.0;
    if !after_move {
        absorbed += project(state, idx);
    }
    coin(state)?;
    let mut tunnel = Some(tunnel);
    let shift_first = opts.tunneling == TunnelingOrder::AfterShift;
    for is_shift in [shift_first, !shift_first] {
        if is_shift {
            state.shift(plan.shift, exec)?;
        } else if let Some(t) = tunnel.take() {
            t(state)?;
        }
        if after_move {
            absorbed += project(state, idx);
        }
    }
    Ok(absorbed)
}

/// One noisy step followed by the barrier measurements; returns the
/// absorbed probability.
pub fn bounded_step(
    rho: &mut DensityOperator,
    plan: &StepPlan,
    noise: &NoiseSpec,
    cfg: &BarrierConfig,
    opts: BoundedOptions,
    exec: Execution,
) -> Result<f64> {
    let idx = barrier_indices(rho.space(), cfg);
    let q = if noise.enabled.tunneling { noise.q } else { 1.0 };
    rho.mark_unnormalized();
    step_with_barriers(
        rho,
        plan,
        opts,
        &idx,
        exec,
        |r| coin_channel(r, &plan.coin, noise, exec),
        |r| tunneling(r, q, exec),
    )
}

fn run_series<S: WalkState>(
    state: &mut S,
    cfg: &BarrierConfig,
    protocol: &Protocol,
    mut step: impl FnMut(&mut S, &StepPlan) -> Result<f64>,
) -> Result<Vec<AbsorptionRecord>> {
    let mut cumulative = 0.0;
    let mut records = Vec::with_capacity(cfg.max_steps);
    for m in 0..cfg.max_steps {
        let increment = step(state, &protocol.plan(m))?;
        cumulative += increment;
        records.push(AbsorptionRecord { step: m + 1, increment, cumulative, surviving: state.total_probability() });
    }
    Ok(records)
}

/// Absorption time series for steps `1..=cfg.max_steps`, starting from the
/// protocol's paired initial coin.
pub fn run_bounded(
    cfg: &BarrierConfig,
    protocol: &Protocol,
    noise: &NoiseSpec,
    opts: BoundedOptions,
    exec: Execution,
) -> Result<BoundedRun> {
    run_bounded_from(cfg, protocol, protocol.initial_coin(), noise, opts, exec)
}

pub fn run_bounded_from(
    cfg: &BarrierConfig,
    protocol: &Protocol,
    initial: CoinState,
    noise: &NoiseSpec,
    opts: BoundedOptions,
    exec: Execution,
) -> Result<BoundedRun> {
    cfg.validate()?;
    noise.validate()?;
    let space = cfg.window(noise, opts.barrier)?;
    let psi = make_initial(space, initial, cfg.start)?;
    let idx = barrier_indices(&space, cfg);

    if noise.is_noiseless() {
        // pure states stay pure under projection; no density operator needed
        let mut psi = psi;
        let records = run_series(&mut psi, cfg, protocol, |s, plan| {
            step_with_barriers(s, plan, opts, &idx, exec, |s| {
                s.apply_coin(&plan.coin, exec);
                Ok(())
            }, |_| Ok(()))
        })?;
        let mut survivors = position_distribution(&psi);
        survivors.normalized = false;
        return Ok(BoundedRun { records, survivors });
    }

    let mut rho = to_density(&psi);
    let records = run_series(&mut rho, cfg, protocol, |r, plan| bounded_step(r, plan, noise, cfg, opts, exec))?;
    let mut survivors = position_distribution(&rho);
    survivors.normalized = false;
    Ok(BoundedRun { records, survivors })
}
