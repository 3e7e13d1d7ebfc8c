//! Coin operators, the controlled shift and complete walk protocols.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::Result;
use crate::exec::Execution;
use crate::hilbert::{make_initial, CoinState, DensityOperator, PositionSpace, PureState};
use crate::kernels::{self, Displacement};
use crate::mat2::{self, Mat2};

/// A 2×2 unitary acting on the coin factor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoinOperator(Mat2);

impl CoinOperator {
    pub const fn from_matrix(m: Mat2) -> Self {
        Self(m)
    }

    pub fn identity() -> Self {
        Self(mat2::IDENTITY)
    }

    /// `σ_k` with `σ_0 = 1`.
    pub fn pauli(k: usize) -> Self {
        Self(mat2::PAULIS[k])
    }

    pub fn sigma_x() -> Self {
        Self(mat2::SIGMA_X)
    }

    pub fn sigma_z() -> Self {
        Self(mat2::SIGMA_Z)
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    /// Matrix product `self · rhs` (rhs acts first).
    pub fn then_after(&self, rhs: &CoinOperator) -> CoinOperator {
        Self(mat2::mul(&self.0, &rhs.0))
    }

    pub fn adjoint(&self) -> CoinOperator {
        Self(mat2::adjoint(&self.0))
    }

    pub fn apply(&self, coin: CoinState) -> CoinState {
        let [a0, a1] = mat2::apply(&self.0, coin.as_array());
        CoinState::new(a0, a1)
    }

    pub fn det(&self) -> C64 {
        mat2::det(&self.0)
    }

    /// `max |U†U - 1|` elementwise.
    pub fn unitarity_residual(&self) -> f64 {
        mat2::max_abs_diff(&mat2::mul(&mat2::adjoint(&self.0), &self.0), &mat2::IDENTITY)
    }

    pub fn max_abs_diff(&self, other: &CoinOperator) -> f64 {
        mat2::max_abs_diff(&self.0, &other.0)
    }
}

pub fn hadamard() -> CoinOperator {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    CoinOperator([[h, h], [h, -h]])
}

/// `exp(-iπ/4 σ) = (1 - iσ)/√2` for a Pauli matrix σ.
fn quarter_turn(sigma: &Mat2) -> CoinOperator {
    let minus_i = C64::new(0.0, -1.0);
    let m = mat2::add(&mat2::IDENTITY, &mat2::scale(sigma, minus_i));
    CoinOperator(mat2::scale(&m, C64::new(FRAC_1_SQRT_2, 0.0)))
}

/// `exp(-iπ/4 σx) = [[1, -i], [-i, 1]]/√2`.
pub fn half_pi_pulse() -> CoinOperator {
    quarter_turn(&mat2::SIGMA_X)
}

/// `e^{-iπ/4 σx} e^{-iπ/4 σy} e^{-iπ/4 σz}`, equal to `-i·H`.
pub fn hadamard_from_three_pulses() -> CoinOperator {
    quarter_turn(&mat2::SIGMA_X)
        .then_after(&quarter_turn(&mat2::SIGMA_Y))
        .then_after(&quarter_turn(&mat2::SIGMA_Z))
}

/// `H' = σx H σx`.
pub fn conjugated_hadamard() -> CoinOperator {
    let x = CoinOperator::sigma_x();
    x.then_after(&hadamard()).then_after(&x)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoinChoice {
    Hadamard,
    #[serde(rename = "halfpi")]
    HalfPiPulse,
}

impl CoinChoice {
    pub fn operator(self) -> CoinOperator {
        match self {
            CoinChoice::Hadamard => hadamard(),
            CoinChoice::HalfPiPulse => half_pi_pulse(),
        }
    }

    /// The initial coin state this coin is designed to be used with.
    pub fn paired_initial(self) -> CoinState {
        match self {
            CoinChoice::Hadamard => CoinState::symmetric(),
            CoinChoice::HalfPiPulse => CoinState::plus(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Coin then shift at every step.
    Standard,
    /// σx pulses every step with alternating lattice motion; the coin
    /// alternates between `C` and `σx C σx`.
    Symmetrized,
}

/// Direction convention of the controlled shift for one step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ShiftDirection {
    /// `S`: coin 0 moves to `k-1`, coin 1 to `k+1`.
    Forward,
    /// `σx S σx = S†`: coin 0 moves to `k+1`, coin 1 to `k-1`.
    Mirrored,
}

impl ShiftDirection {
    pub fn offsets(self) -> [i64; 2] {
        match self {
            ShiftDirection::Forward => [-1, 1],
            ShiftDirection::Mirrored => [1, -1],
        }
    }
}

/// Coin-independent translation by one site (`U₋` or `U₊`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Translation {
    Left,
    Right,
}

impl Translation {
    pub fn offsets(self) -> [i64; 2] {
        match self {
            Translation::Left => [-1, -1],
            Translation::Right => [1, 1],
        }
    }
}

/// What happens during one step of a protocol.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepPlan {
    pub coin: CoinOperator,
    pub shift: ShiftDirection,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Protocol {
    pub variant: Variant,
    pub coin: CoinChoice,
}

impl Protocol {
    pub fn standard(coin: CoinChoice) -> Self {
        Self { variant: Variant::Standard, coin }
    }

    pub fn symmetrized() -> Self {
        Self { variant: Variant::Symmetrized, coin: CoinChoice::Hadamard }
    }

    pub fn initial_coin(&self) -> CoinState {
        self.coin.paired_initial()
    }

    /// Operations for step `m` (0-based).
    ///
    /// Symmetrized: the pulse at `t_0` is `C`; at `t_m` a σx is followed by
    /// `C` (m even) or `C' = σx C σx` (m odd), i.e. `Cσx` or `σx C`. The
    /// lattice carrying coin 0 moves left on even intervals and right on odd
    /// ones.
    pub fn plan(&self, m: usize) -> StepPlan {
        let c = self.coin.operator();
        match self.variant {
            Variant::Standard => StepPlan { coin: c, shift: ShiftDirection::Forward },
            Variant::Symmetrized => {
                let x = CoinOperator::sigma_x();
                if m == 0 {
                    StepPlan { coin: c, shift: ShiftDirection::Forward }
                } else if m % 2 == 1 {
                    let c_prime = x.then_after(&c).then_after(&x);
                    StepPlan { coin: c_prime.then_after(&x), shift: ShiftDirection::Mirrored }
                } else {
                    StepPlan { coin: c.then_after(&x), shift: ShiftDirection::Forward }
                }
            }
        }
    }
}

/// Common surface of pure states and density operators.
pub trait WalkState: Clone + Send + Sync {
    fn space(&self) -> &PositionSpace;
    /// `U ⊗ 1`
    fn apply_coin(&mut self, coin: &CoinOperator, exec: Execution);
    fn shift(&mut self, dir: ShiftDirection, exec: Execution) -> Result<()>;
    fn translate(&mut self, dir: Translation, exec: Execution) -> Result<()>;
    /// Projects out position `pos_index`; returns the removed probability.
    fn zero_position(&mut self, pos_index: usize) -> f64;
    fn position_probabilities(&self) -> Vec<f64>;
    fn coin_position_probabilities(&self) -> [Vec<f64>; 2];
    /// Norm² or trace.
    fn total_probability(&self) -> f64;
}

impl WalkState for PureState {
    fn space(&self) -> &PositionSpace {
        PureState::space(self)
    }

    fn apply_coin(&mut self, coin: &CoinOperator, _exec: Execution) {
        kernels::map_coin_amplitudes(self, coin.matrix());
    }

    fn shift(&mut self, dir: ShiftDirection, _exec: Execution) -> Result<()> {
        kernels::displace_pure(self, dir.offsets())
    }

    fn translate(&mut self, dir: Translation, _exec: Execution) -> Result<()> {
        kernels::displace_pure(self, dir.offsets())
    }

    fn zero_position(&mut self, pos_index: usize) -> f64 {
        PureState::zero_position(self, pos_index)
    }

    fn position_probabilities(&self) -> Vec<f64> {
        PureState::position_probabilities(self)
    }

    fn coin_position_probabilities(&self) -> [Vec<f64>; 2] {
        PureState::coin_position_probabilities(self)
    }

    fn total_probability(&self) -> f64 {
        self.norm_sqr()
    }
}

impl WalkState for DensityOperator {
    fn space(&self) -> &PositionSpace {
        DensityOperator::space(self)
    }

    fn apply_coin(&mut self, coin: &CoinOperator, exec: Execution) {
        let u = *coin.matrix();
        kernels::map_coin_blocks(self, exec, |b| mat2::conjugate(&u, b));
    }

    fn shift(&mut self, dir: ShiftDirection, exec: Execution) -> Result<()> {
        kernels::displace_density(self, &[Displacement { weight: 1.0, offsets: dir.offsets() }], exec)
    }

    fn translate(&mut self, dir: Translation, exec: Execution) -> Result<()> {
        kernels::displace_density(self, &[Displacement { weight: 1.0, offsets: dir.offsets() }], exec)
    }

    fn zero_position(&mut self, pos_index: usize) -> f64 {
        DensityOperator::zero_position(self, pos_index)
    }

    fn position_probabilities(&self) -> Vec<f64> {
        DensityOperator::position_probabilities(self)
    }

    fn coin_position_probabilities(&self) -> [Vec<f64>; 2] {
        DensityOperator::coin_position_probabilities(self)
    }

    fn total_probability(&self) -> f64 {
        self.trace()
    }
}

pub fn apply_coin<S: WalkState>(state: &mut S, coin: &CoinOperator, exec: Execution) {
    state.apply_coin(coin, exec);
}

pub fn shift<S: WalkState>(state: &mut S, exec: Execution) -> Result<()> {
    state.shift(ShiftDirection::Forward, exec)
}

/// One standard step: coin, then controlled shift.
pub fn step<S: WalkState>(state: &mut S, coin: &CoinOperator, exec: Execution) -> Result<()> {
    state.apply_coin(coin, exec);
    state.shift(ShiftDirection::Forward, exec)
}

/// Applies steps `first..first + count` of `protocol` without noise.
pub fn evolve<S: WalkState>(
    state: &mut S,
    protocol: &Protocol,
    first: usize,
    count: usize,
    exec: Execution,
) -> Result<()> {
    for m in first..first + count {
        let plan = protocol.plan(m);
        state.apply_coin(&plan.coin, exec);
        state.shift(plan.shift, exec)?;
    }
    Ok(())
}

/// Noiseless walk of `n` steps from `initial ⊗ |k0⟩`.
pub fn run_pure(
    space: PositionSpace,
    protocol: &Protocol,
    initial: CoinState,
    k0: i64,
    n: usize,
) -> Result<PureState> {
    let mut psi = make_initial(space, initial, k0)?;
    evolve(&mut psi, protocol, 0, n, Execution::Sequential)?;
    Ok(psi)
}

/// `(S·C)^n` applied to the coin's paired initial state at the origin.
pub fn run_standard(space: PositionSpace, coin: CoinChoice, n: usize) -> Result<PureState> {
    let protocol = Protocol::standard(coin);
    run_pure(space, &protocol, protocol.initial_coin(), 0, n)
}

/// The symmetrized Hadamard protocol; its position distribution after `n`
/// steps equals the standard walk's. The coin is σx-flipped relative to the
/// standard walk after an even number `n ≥ 2` of steps.
pub fn run_symmetrized(space: PositionSpace, n: usize) -> Result<PureState> {
    let protocol = Protocol::symmetrized();
    run_pure(space, &protocol, protocol.initial_coin(), 0, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::to_density;
    use approx::assert_abs_diff_eq;

    const S: f64 = FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn close(a: CoinState, b: CoinState) -> bool {
        (a.a0 - b.a0).norm() < 1e-15 && (a.a1 - b.a1).norm() < 1e-15
    }

    #[test]
    fn hadamard_action() {
        let h = hadamard();
        assert!(close(h.apply(CoinState::zero()), CoinState::new(c(S, 0.0), c(S, 0.0))));
        assert!(close(h.apply(CoinState::one()), CoinState::new(c(S, 0.0), c(-S, 0.0))));
        assert!(h.then_after(&h).max_abs_diff(&CoinOperator::identity()) < 1e-15);
    }

    #[test]
    fn half_pi_pulse_closed_form() {
        let u = half_pi_pulse();
        assert!(close(u.apply(CoinState::zero()), CoinState::new(c(S, 0.0), c(0.0, -S))));
        // e^{-iπ/2 σx} = -i σx
        let minus_i_x = CoinOperator::from_matrix([[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, -1.0), c(0.0, 0.0)]]);
        assert!(u.then_after(&u).max_abs_diff(&minus_i_x) < 1e-15);
        assert!(u.unitarity_residual() < 1e-15);
    }

    #[test]
    fn three_pulses_match_hadamard_up_to_phase() {
        let t = hadamard_from_three_pulses();
        let m = t.adjoint().then_after(&hadamard());
        let m = m.matrix();
        assert!(m[0][1].norm() < 1e-12 && m[1][0].norm() < 1e-12);
        assert!((m[0][0] - m[1][1]).norm() < 1e-12);
        assert_abs_diff_eq!(m[0][0].norm(), 1.0, epsilon = 1e-12);
        // |⟨T, H⟩_F| = 2
        let mut overlap = c(0.0, 0.0);
        for r in 0..2 {
            for col in 0..2 {
                overlap += t.matrix()[r][col].conj() * hadamard().matrix()[r][col];
            }
        }
        assert_abs_diff_eq!(overlap.norm(), 2.0, epsilon = 1e-12);
        assert!(t.unitarity_residual() < 1e-15);
        assert_abs_diff_eq!(t.det().norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn conjugated_hadamard_by_hand() {
        // σx H σx = [[-1, 1], [1, 1]]/√2
        let hp = conjugated_hadamard();
        assert!(close(hp.apply(CoinState::zero()), CoinState::new(c(-S, 0.0), c(S, 0.0))));
        assert!(hp.then_after(&hp).max_abs_diff(&CoinOperator::identity()) < 1e-15);
        let expected = CoinOperator::from_matrix([[c(-S, 0.0), c(S, 0.0)], [c(S, 0.0), c(S, 0.0)]]);
        assert!(hp.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn coin_on_initial_state() {
        let space = PositionSpace::line(2).unwrap();
        let mut psi = make_initial(space, CoinState::symmetric(), 0).unwrap();
        apply_coin(&mut psi, &hadamard(), Execution::Sequential);
        assert!((psi.amplitude(0, 0).unwrap() - c(0.5, 0.5)).norm() < 1e-15);
        assert!((psi.amplitude(1, 0).unwrap() - c(0.5, -0.5)).norm() < 1e-15);

        let before = psi.clone();
        apply_coin(&mut psi, &CoinOperator::identity(), Execution::Sequential);
        assert_eq!(psi, before);
    }

    #[test]
    fn shift_moves_by_coin() {
        let space = PositionSpace::line(3).unwrap();
        let mut psi = make_initial(space, CoinState::zero(), 1).unwrap();
        shift(&mut psi, Execution::Sequential).unwrap();
        assert_eq!(psi.amplitude(0, 0).unwrap(), c(1.0, 0.0));

        let circle = PositionSpace::circle(5).unwrap();
        let mut psi = make_initial(circle, CoinState::one(), 4).unwrap();
        shift(&mut psi, Execution::Sequential).unwrap();
        assert_eq!(psi.amplitude(1, 0).unwrap(), c(1.0, 0.0));
        let mut rho = to_density(&make_initial(circle, CoinState::one(), 4).unwrap());
        WalkState::shift(&mut rho, ShiftDirection::Forward, Execution::Sequential).unwrap();
        let f = circle.flat_index(1, 0);
        assert_eq!(rho.get(f, f), c(1.0, 0.0));
    }

    #[test]
    fn shift_overflow_is_reported() {
        let space = PositionSpace::line(1).unwrap();
        let mut psi = make_initial(space, CoinState::zero(), -1).unwrap();
        let snapshot = psi.clone();
        assert!(shift(&mut psi, Execution::Sequential).is_err());
        assert_eq!(psi, snapshot);
        let mut rho = to_density(&snapshot);
        assert!(shift(&mut rho, Execution::Sequential).is_err());
    }

    #[test]
    fn shift_then_inverse_is_identity() {
        let space = PositionSpace::line(4).unwrap();
        let psi0 = run_standard(space, CoinChoice::Hadamard, 2).unwrap();
        let mut psi = psi0.clone();
        psi.shift(ShiftDirection::Forward, Execution::Sequential).unwrap();
        assert_abs_diff_eq!(psi.norm_sqr(), 1.0, epsilon = 1e-15);
        psi.shift(ShiftDirection::Mirrored, Execution::Sequential).unwrap();
        assert_eq!(psi, psi0);
    }

    fn probs_at(psi: &PureState, ks: &[i64]) -> Vec<f64> {
        let p = psi.position_probabilities();
        ks.iter().map(|&k| p[psi.space().index_of(k).unwrap()]).collect()
    }

    #[test]
    fn first_steps_by_hand() {
        let space = PositionSpace::line(4).unwrap();
        let p1 = probs_at(&run_standard(space, CoinChoice::Hadamard, 1).unwrap(), &[-1, 1]);
        let p2 = probs_at(&run_standard(space, CoinChoice::Hadamard, 2).unwrap(), &[-2, 0, 2]);
        let p3 = probs_at(&run_standard(space, CoinChoice::Hadamard, 3).unwrap(), &[-3, -1, 1, 3]);
        for (got, want) in p1.iter().zip([0.5, 0.5]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-15);
        }
        for (got, want) in p2.iter().zip([0.25, 0.5, 0.25]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-15);
        }
        for (got, want) in p3.iter().zip([0.125, 0.375, 0.375, 0.125]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-15);
        }
    }

    #[test]
    fn zero_steps_is_initial_state() {
        let space = PositionSpace::line(3).unwrap();
        let psi = run_standard(space, CoinChoice::Hadamard, 0).unwrap();
        assert_eq!(psi, make_initial(space, CoinState::symmetric(), 0).unwrap());
        assert_eq!(run_symmetrized(space, 0).unwrap(), psi);
    }

    #[test]
    fn symmetrized_matches_standard_small_n() {
        let space = PositionSpace::line(8).unwrap();
        for n in 1..=6 {
            let a = run_standard(space, CoinChoice::Hadamard, n).unwrap().position_probabilities();
            let b = run_symmetrized(space, n).unwrap().position_probabilities();
            for (x, y) in a.iter().zip(&b) {
                assert_abs_diff_eq!(x, y, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn symmetrized_state_is_flipped_standard_state() {
        // resolves the readout question: the coin is σx-flipped for even n ≥ 2
        let space = PositionSpace::line(8).unwrap();
        for n in 1..=6 {
            let a = run_standard(space, CoinChoice::Hadamard, n).unwrap();
            let b = run_symmetrized(space, n).unwrap();
            let mut a_flipped = a.clone();
            a_flipped.apply_coin(&CoinOperator::sigma_x(), Execution::Sequential);
            let target = if n % 2 == 0 { &a_flipped } else { &a };
            let diff = target.amps().iter().zip(b.amps()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            assert!(diff < 1e-12, "n={n}: {diff}");
        }
    }

    #[test]
    fn density_and_pure_paths_agree() {
        let space = PositionSpace::line(6).unwrap();
        let protocol = Protocol::standard(CoinChoice::Hadamard);
        let psi = run_pure(space, &protocol, CoinState::symmetric(), 0, 5).unwrap();
        let mut rho = to_density(&make_initial(space, CoinState::symmetric(), 0).unwrap());
        evolve(&mut rho, &protocol, 0, 5, Execution::Sequential).unwrap();
        let expected = to_density(&psi);
        let diff = rho.as_slice().iter().zip(expected.as_slice()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(diff < 1e-14);
        assert_eq!(rho.support(), (1, 11));
    }

    #[test]
    fn half_pi_protocol_is_symmetric() {
        let space = PositionSpace::line(100).unwrap();
        let p = run_standard(space, CoinChoice::HalfPiPulse, 100).unwrap().position_probabilities();
        let dim = p.len();
        for i in 0..dim {
            assert_abs_diff_eq!(p[i], p[dim - 1 - i], epsilon = 1e-10);
        }
    }
}
