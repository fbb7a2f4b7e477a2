//! Event-driven simulation of the switched process in polar coordinates.
//!
//! Between jumps the flow is applied in closed form through [`expm2`], so the
//! only randomness is in the holding times and nothing is discretized. The
//! radius is tracked as `log r`; the Cartesian state is never formed.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angular::averaged_profile;
use crate::error::{domain, Result};
use crate::planar::{expm2, reduce_two_pi, require_hurwitz, Mat2};

/// Two Hurwitz matrices, the stationary weight `lam` of state 1 and the jump
/// rate scale `beta`. State `i` is left at rate `beta * lambda_i` with
/// `lambda_0 = lam`, `lambda_1 = 1 - lam`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwitchedSystem {
    pub a0: Mat2,
    pub a1: Mat2,
    pub lam: f64,
    pub beta: f64,
}

impl SwitchedSystem {
    pub fn new(a0: Mat2, a1: Mat2, lam: f64, beta: f64) -> Result<Self> {
        require_hurwitz(&a0, "A0")?;
        require_hurwitz(&a1, "A1")?;
        if !(lam > 0.0 && lam < 1.0) {
            return domain(format!("lambda = {lam} must lie in (0, 1)"));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return domain(format!("beta = {beta} must be positive and finite"));
        }
        Ok(Self { a0, a1, lam, beta })
    }

    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        Self::new(self.a0, self.a1, self.lam, beta)
    }

    pub fn matrix(&self, i: u8) -> &Mat2 {
        if i == 0 {
            &self.a0
        } else {
            &self.a1
        }
    }

    /// `lambda_i`.
    pub fn weight(&self, i: u8) -> f64 {
        if i == 0 {
            self.lam
        } else {
            1.0 - self.lam
        }
    }

    /// Rate of leaving state `i`.
    pub fn jump_rate(&self, i: u8) -> f64 {
        self.beta * self.weight(i)
    }

    /// `θ_+ + 0.1` when the averaged matrix is hyperbolic, otherwise `0.1`.
    pub fn default_initial_angle(&self) -> f64 {
        match averaged_profile(&self.a0, &self.a1, self.lam) {
            Ok(p) => reduce_two_pi(p.theta_plus + 0.1),
            Err(_) => 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryState {
    pub log_r: f64,
    /// Angle in `[0, 2π)`.
    pub theta: f64,
    pub i: u8,
    pub t: f64,
}

impl TrajectoryState {
    pub fn new(theta: f64, i: u8) -> Self {
        Self {
            log_r: 0.0,
            theta: reduce_two_pi(theta),
            i: i.min(1),
            t: 0.0,
        }
    }
}

/// `exp(tA) v` as `(log_scale, w)` with `exp(tA) v = e^{log_scale} w`. The
/// trace part is factored out and the traceless part is applied in chunks
/// short enough that no entry overflows; `w` is renormalized between chunks only.
pub fn flow_vector(a: &Mat2, t: f64, v: [f64; 2]) -> (f64, [f64; 2]) {
    let m = 0.5 * a.trace();
    let n = *a - Mat2::scalar(m);
    let delta2 = -n.det();
    let max_chunk = if delta2 > 0.0 {
        40.0 / delta2.sqrt()
    } else {
        f64::INFINITY
    };
    if t <= max_chunk {
        return (m * t, expm2(&n, t).apply(v));
    }
    let mut w = v;
    let mut log_scale = m * t;
    let mut remaining = t;
    while remaining > 0.0 {
        let h = remaining.min(max_chunk);
        let y = expm2(&n, h).apply(w);
        let nrm = y[0].hypot(y[1]);
        log_scale += nrm.ln();
        w = [y[0] / nrm, y[1] / nrm];
        remaining -= h;
    }
    (log_scale, w)
}

/// Apply `exp(tA)` to the unit vector at angle `theta`. Returns the increment of
/// `log r` and the new angle.
pub fn flow_polar(a: &Mat2, t: f64, theta: f64) -> (f64, f64) {
    let (log_scale, y) = flow_vector(a, t, [theta.cos(), theta.sin()]);
    let nrm = y[0].hypot(y[1]);
    (log_scale + nrm.ln(), reduce_two_pi(y[1].atan2(y[0])))
}

/// Flow for time `s` in the current discrete state, without switching.
pub fn advance(state: &TrajectoryState, sys: &SwitchedSystem, s: f64) -> TrajectoryState {
    let (dlog, theta) = flow_polar(sys.matrix(state.i), s, state.theta);
    TrajectoryState {
        log_r: state.log_r + dlog,
        theta,
        i: state.i,
        t: state.t + s,
    }
}

/// Holding time in state `i`.
pub fn holding_time<R: Rng + ?Sized>(sys: &SwitchedSystem, i: u8, rng: &mut R) -> f64 {
    let e: f64 = rng.sample(Exp1);
    e / sys.jump_rate(i)
}

/// One holding interval followed by a switch.
pub fn step<R: Rng + ?Sized>(
    state: &TrajectoryState,
    sys: &SwitchedSystem,
    rng: &mut R,
) -> TrajectoryState {
    let s = holding_time(sys, state.i, rng);
    let mut next = advance(state, sys, s);
    next.i = 1 - state.i;
    next
}

/// Run until `state.t + duration`, cutting the last holding interval at the end.
/// Holding times are exponential, so resuming from the returned state with a
/// fresh draw continues the same process in law.
pub fn run_for<R: Rng + ?Sized>(
    state: &TrajectoryState,
    sys: &SwitchedSystem,
    duration: f64,
    rng: &mut R,
) -> TrajectoryState {
    let end = state.t + duration;
    let mut st = *state;
    loop {
        let s = holding_time(sys, st.i, rng);
        if st.t + s >= end {
            let mut last = advance(&st, sys, end - st.t);
            last.t = end;
            return last;
        }
        st = advance(&st, sys, s);
        st.i = 1 - st.i;
    }
}

/// Random number generator for replica `r` of master seed `seed`.
pub fn replica_rng(seed: u64, r: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(r);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovEstimate {
    pub value: f64,
    pub std_error: f64,
    pub horizon: f64,
    pub replicas: usize,
    pub seed: u64,
    /// Set when there were fewer than two replicas, so `std_error` is zero by convention.
    pub single_replica: bool,
    pub replica_values: Vec<f64>,
}

/// Mean and standard error of independent replica values.
pub fn replicate_ci(values: &[f64], horizon: f64, seed: u64) -> LyapunovEstimate {
    let n = values.len();
    let mean = if n == 0 {
        f64::NAN
    } else {
        values.iter().sum::<f64>() / n as f64
    };
    let std_error = if n < 2 {
        0.0
    } else {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        (var / n as f64).sqrt()
    };
    LyapunovEstimate {
        value: mean,
        std_error,
        horizon,
        replicas: n,
        seed,
        single_replica: n < 2,
        replica_values: values.to_vec(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiConfig {
    pub horizon: f64,
    pub replicas: usize,
    pub seed: u64,
    /// Time simulated and discarded before the measured window.
    pub burn_in: f64,
}

impl Default for ChiConfig {
    fn default() -> Self {
        Self {
            horizon: 1e5,
            replicas: 32,
            seed: 0,
            burn_in: 0.0,
        }
    }
}

/// Monte Carlo estimate of the top Lyapunov exponent: `log r / horizon`
/// averaged over replicas.
pub fn simulate_chi(
    sys: &SwitchedSystem,
    theta0: f64,
    i0: u8,
    horizon: f64,
    replicas: usize,
    seed: u64,
) -> Result<LyapunovEstimate> {
    simulate_chi_with(
        sys,
        theta0,
        i0,
        &ChiConfig {
            horizon,
            replicas,
            seed,
            burn_in: 0.0,
        },
    )
}

pub fn simulate_chi_with(
    sys: &SwitchedSystem,
    theta0: f64,
    i0: u8,
    cfg: &ChiConfig,
) -> Result<LyapunovEstimate> {
    if !(cfg.horizon > 0.0 && cfg.horizon.is_finite()) {
        return domain(format!(
            "horizon = {} must be positive and finite",
            cfg.horizon
        ));
    }
    if cfg.replicas == 0 {
        return domain("replicas must be at least 1");
    }
    if !(cfg.burn_in >= 0.0 && cfg.burn_in.is_finite()) {
        return domain(format!("burn-in = {} must be nonnegative", cfg.burn_in));
    }
    let start = TrajectoryState::new(theta0, i0);
    let values: Vec<f64> = (0..cfg.replicas as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(cfg.seed, r);
            let mut st = start;
            if cfg.burn_in > 0.0 {
                st = run_for(&st, sys, cfg.burn_in, &mut rng);
                st.log_r = 0.0;
            }
            run_for(&st, sys, cfg.horizon, &mut rng).log_r / cfg.horizon
        })
        .collect();
    Ok(replicate_ci(&values, cfg.horizon, cfg.seed))
}

/// Time-sampled occupation of `(θ mod π, i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupationHistogram {
    pub bins: usize,
    /// Normalized weights, `weights[k][i]` for bin `[kπ/bins, (k+1)π/bins)`.
    pub weights: Vec<[f64; 2]>,
    pub samples: u64,
}

impl OccupationHistogram {
    pub fn bin_width(&self) -> f64 {
        PI / self.bins as f64
    }

    pub fn state_fraction(&self, i: usize) -> f64 {
        self.weights.iter().map(|w| w[i]).sum()
    }
}

fn bin_of(theta: f64, bins: usize) -> usize {
    let folded = theta.rem_euclid(PI);
    ((folded / PI * bins as f64) as usize).min(bins - 1)
}

pub fn occupation_histogram(
    sys: &SwitchedSystem,
    theta0: f64,
    i0: u8,
    horizon: f64,
    bins: usize,
    dt_sample: f64,
    seed: u64,
) -> Result<OccupationHistogram> {
    if bins < 2 {
        return domain("bins must be at least 2");
    }
    if !(dt_sample > 0.0 && dt_sample.is_finite()) {
        return domain(format!("dt_sample = {dt_sample} must be positive"));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return domain(format!("horizon = {horizon} must be positive and finite"));
    }
    let mut rng = replica_rng(seed, 0);
    let mut counts = vec![[0u64; 2]; bins];
    let mut st = TrajectoryState::new(theta0, i0);
    let mut next_sample = 0.0;
    let mut total = 0u64;
    while st.t < horizon {
        let s = holding_time(sys, st.i, &mut rng).min(horizon - st.t);
        let end = st.t + s;
        let a = sys.matrix(st.i);
        // Sample on the fixed time grid; each sample is flowed from the previous one.
        let mut cur_t = st.t;
        let mut cur_theta = st.theta;
        while next_sample < end {
            let (_, th) = flow_polar(a, next_sample - cur_t, cur_theta);
            counts[bin_of(th, bins)][st.i as usize] += 1;
            total += 1;
            cur_t = next_sample;
            cur_theta = th;
            next_sample += dt_sample;
        }
        st = advance(&st, sys, s);
        st.i = 1 - st.i;
    }
    let weights = counts
        .iter()
        .map(|c| [c[0] as f64 / total as f64, c[1] as f64 / total as f64])
        .collect();
    Ok(OccupationHistogram {
        bins,
        weights,
        samples: total,
    })
}

/// Jump-by-jump record of a trajectory: the holding time spent in each state
/// and the state right after each switch.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpPath {
    pub holding: Vec<f64>,
    pub states: Vec<u8>,
    pub after: Vec<TrajectoryState>,
}

/// Simulate `k` switches from `(theta0, i0)`.
pub fn simulate_jumps<R: Rng + ?Sized>(
    sys: &SwitchedSystem,
    theta0: f64,
    i0: u8,
    k: usize,
    rng: &mut R,
) -> JumpPath {
    let mut st = TrajectoryState::new(theta0, i0);
    let mut path = JumpPath {
        holding: Vec::with_capacity(k),
        states: Vec::with_capacity(k),
        after: Vec::with_capacity(k),
    };
    for _ in 0..k {
        let s = holding_time(sys, st.i, rng);
        path.holding.push(s);
        path.states.push(st.i);
        st = advance(&st, sys, s);
        st.i = 1 - st.i;
        path.after.push(st);
    }
    path
}
