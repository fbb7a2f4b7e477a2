//! Random matrix products along the embedded jump chain.
//!
//! Sampling the process at its jump times gives `Z_k = U_k ⋯ U_1 X_0` with
//! `U_l = exp(S_l A_{i_l})`, `S_l ~ Exp(β λ_{i_l})`. With alternating states the
//! per-step exponent is `χ(β) / (2λ(1−λ)β)`. Drawing the state uniformly at
//! every step instead gives `χ(β/2) / (2λ(1−λ)β)`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::pdmp::{flow_vector, holding_time, replica_rng, simulate_jumps, SwitchedSystem};
use crate::planar::{expm2, Mat2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProductVariant {
    /// `i_0 = 0`, then states alternate.
    Alternating,
    /// State drawn uniformly from `{0, 1}` at every step.
    IidHalfsum,
}

impl ProductVariant {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Alternating => "alternating",
            Self::IidHalfsum => "iid-halfsum",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductEstimate {
    pub value: f64,
    pub std_error: f64,
    pub steps: usize,
    pub replicas: usize,
    pub seed: u64,
    pub variant: ProductVariant,
    pub replica_values: Vec<f64>,
}

/// Lower and upper bounds on the carried vector norm before a forced renormalization.
const NORM_GUARD: (f64, f64) = (1e-150, 1e150);

/// `exp(S A_i)` with `S ~ Exp(β λ_i)`.
pub fn sample_factor<R: Rng + ?Sized>(sys: &SwitchedSystem, i: u8, rng: &mut R) -> Mat2 {
    let s = holding_time(sys, i, rng);
    expm2(sys.matrix(i), s)
}

/// Per-step limit predicted from `χ`: `chi / (2λ(1−λ)β)`.
pub fn predicted_exponent(chi: f64, sys: &SwitchedSystem) -> f64 {
    chi / (2.0 * sys.lam * (1.0 - sys.lam) * sys.beta)
}

/// Product state carried across steps.
struct Carried {
    v: [f64; 2],
    log_norm: f64,
    since_renorm: usize,
}

impl Carried {
    fn new() -> Self {
        Self {
            v: [1.0, 0.0],
            log_norm: 0.0,
            since_renorm: 0,
        }
    }

    fn apply(&mut self, a: &Mat2, s: f64, period: usize) {
        let (log_scale, w) = flow_vector(a, s, self.v);
        self.log_norm += log_scale;
        self.v = w;
        self.since_renorm += 1;
        let nrm = w[0].hypot(w[1]);
        if self.since_renorm >= period || !(NORM_GUARD.0..=NORM_GUARD.1).contains(&nrm) {
            self.log_norm += nrm.ln();
            self.v = [w[0] / nrm, w[1] / nrm];
            self.since_renorm = 0;
        }
    }

    fn total(&self) -> f64 {
        self.log_norm + self.v[0].hypot(self.v[1]).ln()
    }
}

fn next_state<R: Rng + ?Sized>(variant: ProductVariant, step: usize, rng: &mut R) -> u8 {
    match variant {
        ProductVariant::Alternating => (step % 2) as u8,
        ProductVariant::IidHalfsum => rng.random_range(0..2u8),
    }
}

fn run_product(
    sys: &SwitchedSystem,
    variant: ProductVariant,
    k: usize,
    seed: u64,
    r: u64,
    period: usize,
) -> f64 {
    let mut rng = replica_rng(seed, r);
    let mut c = Carried::new();
    for step in 0..k {
        let i = next_state(variant, step, &mut rng);
        let s = holding_time(sys, i, &mut rng);
        c.apply(sys.matrix(i), s, period);
    }
    c.total() / k as f64
}

/// Top Lyapunov exponent per step of the product, estimated from the growth
/// of `e_1` under the product, renormalized every `renorm_period` steps.
pub fn product_lyapunov_with(
    sys: &SwitchedSystem,
    variant: ProductVariant,
    k: usize,
    replicas: usize,
    seed: u64,
    renorm_period: usize,
) -> Result<ProductEstimate> {
    if k == 0 {
        return domain("steps must be at least 1");
    }
    if replicas == 0 {
        return domain("replicas must be at least 1");
    }
    if renorm_period == 0 {
        return domain("renormalization period must be at least 1");
    }
    let values: Vec<f64> = (0..replicas as u64)
        .into_par_iter()
        .map(|r| run_product(sys, variant, k, seed, r, renorm_period))
        .collect();
    let ci = crate::pdmp::replicate_ci(&values, k as f64, seed);
    Ok(ProductEstimate {
        value: ci.value,
        std_error: ci.std_error,
        steps: k,
        replicas,
        seed,
        variant,
        replica_values: values,
    })
}

pub fn product_lyapunov(
    sys: &SwitchedSystem,
    variant: ProductVariant,
    k: usize,
    replicas: usize,
    seed: u64,
) -> Result<ProductEstimate> {
    product_lyapunov_with(sys, variant, k, replicas, seed, 1000)
}

/// Running estimate `(step, log‖product e_1‖ / step)` of replica 0, recorded
/// every `every` steps.
pub fn running_estimate(
    sys: &SwitchedSystem,
    variant: ProductVariant,
    k: usize,
    seed: u64,
    every: usize,
) -> Result<Vec<(usize, f64)>> {
    if k == 0 || every == 0 {
        return domain("steps and recording interval must be at least 1");
    }
    let mut rng = replica_rng(seed, 0);
    let mut c = Carried::new();
    let mut out = Vec::with_capacity(k / every + 1);
    for step in 0..k {
        let i = next_state(variant, step, &mut rng);
        let s = holding_time(sys, i, &mut rng);
        c.apply(sys.matrix(i), s, 1000);
        if (step + 1) % every == 0 || step + 1 == k {
            out.push((step + 1, c.total() / (step + 1) as f64));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddedChainReport {
    pub k: usize,
    /// `max_l |log‖U_l⋯U_1 e_1‖ − log r(T_l)|`.
    pub max_abs_discrepancy: f64,
    pub log_norm_product: f64,
    pub log_r_trajectory: f64,
    /// `T_k / k`.
    pub mean_holding_time: f64,
    pub mean_holding_time_std_error: f64,
    /// `1 / (2λ(1−λ)β)`.
    pub expected_mean_holding_time: f64,
}

/// Simulate one trajectory from `(e_1, i = 0)` and rebuild its position at each
/// jump time as an explicit matrix product with the same holding times.
pub fn embedded_chain_check(
    sys: &SwitchedSystem,
    k: usize,
    seed: u64,
) -> Result<EmbeddedChainReport> {
    if k == 0 {
        return domain("k must be at least 1");
    }
    let mut rng = replica_rng(seed, 0);
    let path = simulate_jumps(sys, 0.0, 0, k, &mut rng);
    // Product kept as (log scale, Frobenius-normalized matrix).
    let mut p = Mat2::identity();
    let mut log_scale = 0.0;
    let mut max_dev: f64 = 0.0;
    let mut last = 0.0;
    for (l, (&s, &i)) in path.holding.iter().zip(&path.states).enumerate() {
        p = expm2(sys.matrix(i), s) * p;
        let f = p.frobenius();
        log_scale += f.ln();
        p = p * (1.0 / f);
        let col = p.apply([1.0, 0.0]);
        last = log_scale + col[0].hypot(col[1]).ln();
        max_dev = max_dev.max((last - path.after[l].log_r).abs());
    }
    let n = k as f64;
    let mean = path.holding.iter().sum::<f64>() / n;
    let var = if k > 1 {
        path.holding.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(EmbeddedChainReport {
        k,
        max_abs_discrepancy: max_dev,
        log_norm_product: last,
        log_r_trajectory: path.after[k - 1].log_r,
        mean_holding_time: mean,
        mean_holding_time_std_error: (var / n).sqrt(),
        expected_mean_holding_time: 1.0 / (2.0 * sys.lam * (1.0 - sys.lam) * sys.beta),
    })
}
