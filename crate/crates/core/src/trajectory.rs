//! Monte Carlo unraveling: each trajectory is a pure-state walk that draws
//! one unitary branch of every channel per step.
//!
//! Trajectory `i` under seed `s` uses ChaCha8 stream `i` of key `s`, and
//! trajectories are reduced in fixed-size chunks in index order, so
//! aggregates are bit-identical regardless of thread count or execution mode.

use rand::distributions::{Distribution as _, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channels::{unravel, NoiseSpec, TunnelingOrder};
use crate::dynamics::{Protocol, WalkState};
use crate::error::Result;
use crate::exec::{map_indexed, Execution};
use crate::hilbert::{make_initial, CoinState, PositionSpace, PureState};
use crate::measurement::{empirical, Distribution, DistributionMeta};

const CHUNK: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectorySpec {
    pub space: PositionSpace,
    pub protocol: Protocol,
    pub initial: CoinState,
    pub start: i64,
    pub noise: NoiseSpec,
    pub steps: usize,
    pub order: TunnelingOrder,
}

pub fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn run_trajectory<R: Rng + ?Sized>(spec: &TrajectorySpec, rng: &mut R) -> Result<PureState> {
    spec.noise.validate()?;
    let mut psi = make_initial(spec.space, spec.initial, spec.start)?;
    let exec = Execution::Sequential;
    for m in 0..spec.steps {
        let plan = spec.protocol.plan(m);
        let branch = unravel(&spec.noise, &plan.coin, rng);
        psi.apply_coin(&branch.coin, exec);
        match (spec.order, branch.tunnel) {
            (_, None) => psi.shift(plan.shift, exec)?,
            (TunnelingOrder::AfterShift, Some(t)) => {
                psi.shift(plan.shift, exec)?;
                psi.translate(t, exec)?;
            }
            (TunnelingOrder::BeforeShift, Some(t)) => {
                psi.translate(t, exec)?;
                psi.shift(plan.shift, exec)?;
            }
        }
    }
    Ok(psi)
}

fn meta(spec: &TrajectorySpec) -> DistributionMeta {
    DistributionMeta { steps: Some(spec.steps), protocol: Some(spec.protocol), noise: Some(spec.noise) }
}

/// Mean of the exact per-trajectory position distributions over `count`
/// trajectories; converges to the density-operator result.
pub fn trajectory_average(
    spec: &TrajectorySpec,
    count: usize,
    seed: u64,
    exec: Execution,
) -> Result<Distribution> {
    let dim = spec.space.dim();
    let chunks = count.div_ceil(CHUNK);
    let partial = map_indexed(exec, chunks, |c| -> Result<Vec<f64>> {
        let mut acc = vec![0.0; dim];
        for i in c * CHUNK..((c + 1) * CHUNK).min(count) {
            let psi = run_trajectory(spec, &mut trajectory_rng(seed, i as u64))?;
            for (a, p) in acc.iter_mut().zip(psi.position_probabilities()) {
                *a += p;
            }
        }
        Ok(acc)
    });
    let mut total = vec![0.0; dim];
    for chunk in partial {
        for (t, p) in total.iter_mut().zip(chunk?) {
            *t += p;
        }
    }
    total.iter_mut().for_each(|t| *t /= count as f64);
    Ok(Distribution::new(spec.space.bounds().0, total, spec.space.topology()).with_meta(meta(spec)))
}

/// One simulated trajectory and one position readout per shot.
pub fn sample_trajectories(
    spec: &TrajectorySpec,
    shots: usize,
    seed: u64,
    exec: Execution,
) -> Result<Distribution> {
    let dim = spec.space.dim();
    let chunks = shots.div_ceil(CHUNK);
    let partial = map_indexed(exec, chunks, |c| -> Result<Vec<usize>> {
        let mut counts = vec![0usize; dim];
        for i in c * CHUNK..((c + 1) * CHUNK).min(shots) {
            let mut rng = trajectory_rng(seed, i as u64);
            let psi = run_trajectory(spec, &mut rng)?;
            let w = WeightedIndex::new(psi.position_probabilities()).expect("trajectory state has mass");
            counts[w.sample(&mut rng)] += 1;
        }
        Ok(counts)
    });
    let mut counts = vec![0usize; dim];
    for chunk in partial {
        for (t, c) in counts.iter_mut().zip(chunk?) {
            *t += c;
        }
    }
    Ok(empirical(spec.space.bounds().0, spec.space.topology(), &counts, shots).with_meta(meta(spec)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::run_density;
    use crate::dynamics::{run_standard, CoinChoice};
    use crate::measurement::{position_distribution, tv_distance};

    fn spec(noise: NoiseSpec, steps: usize) -> TrajectorySpec {
        let protocol = Protocol::standard(CoinChoice::Hadamard);
        TrajectorySpec {
            space: PositionSpace::line(steps * noise.sites_per_step()).unwrap(),
            protocol,
            initial: protocol.initial_coin(),
            start: 0,
            noise,
            steps,
            order: TunnelingOrder::AfterShift,
        }
    }

    #[test]
    fn noiseless_trajectory_is_the_pure_walk() {
        let s = spec(NoiseSpec::noiseless(), 20);
        let psi = run_trajectory(&s, &mut trajectory_rng(1, 0)).unwrap();
        assert_eq!(psi, run_standard(s.space, CoinChoice::Hadamard, 20).unwrap());
    }

    #[test]
    fn average_matches_exact_channel() {
        let noise = NoiseSpec::depolarizing(0.9).with_tunneling(0.95);
        let s = spec(noise, 20);
        let exact = run_density(s.space, &s.protocol, s.initial, 0, &noise, s.order, 20, Execution::Sequential).unwrap();
        let exact = position_distribution(&exact);
        let avg = trajectory_average(&s, 2000, 3, Execution::Parallel).unwrap();
        let tv = tv_distance(&avg, &exact);
        assert!(tv < 3.0 / 2000f64.sqrt(), "{tv}");
    }

    #[test]
    fn execution_mode_does_not_change_results() {
        let s = spec(NoiseSpec::dephasing(0.8).with_tunneling(0.9), 15);
        let a = trajectory_average(&s, 300, 11, Execution::Sequential).unwrap();
        let b = trajectory_average(&s, 300, 11, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        let a = sample_trajectories(&s, 300, 11, Execution::Sequential).unwrap();
        let b = sample_trajectories(&s, 300, 11, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        assert!((a.total() - 1.0).abs() < 1e-12);
    }
}
