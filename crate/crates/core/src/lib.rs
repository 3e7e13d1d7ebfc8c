//! Discrete-time coined quantum walks on a line or a circle, with coin
//! decoherence, tunneling, absorbing barriers and a classical baseline.
//!
//! Pure states evolve as amplitude vectors over coin ⊗ position; noisy walks
//! evolve a dense density operator, or are unraveled into pure-state
//! trajectories. Heavy kernels are data-parallel through rayon when the
//! `parallel` feature is on (the default); [`Execution::Sequential`] selects
//! the serial path at runtime and gives bit-identical results.

pub mod absorbing;
pub mod channels;
pub mod classical;
pub mod dynamics;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod hilbert;
mod kernels;
mod mat2;
pub mod measurement;
pub mod trajectory;

pub use absorbing::{run_bounded, AbsorptionRecord, BarrierConfig, BarrierTiming, BoundedOptions, BoundedRun};
pub use channels::{run_density, NoiseSpec, TunnelingOrder};
pub use classical::{binomial_walk, classical_absorption, ClassicalDistribution};
pub use dynamics::{
    conjugated_hadamard, hadamard, half_pi_pulse, run_pure, run_standard, run_symmetrized, CoinChoice,
    CoinOperator, Protocol, Variant, WalkState,
};
pub use error::{Result, WalkError};
pub use exec::Execution;
pub use experiments::{preset, run_experiment, ExperimentConfig, Manifest, Mode, PresetName};
pub use hilbert::{make_initial, to_density, CoinState, DensityOperator, PositionSpace, PureState, Topology};
pub use mat2::Mat2;
pub use measurement::{position_distribution, tv_distance, Distribution, SummaryStats};
pub use num_complex::Complex64 as C64;
pub use trajectory::{trajectory_average, TrajectorySpec};
