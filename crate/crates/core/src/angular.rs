//! Dynamics of the direction `e_θ = (cos θ, sin θ)` under the linear flows.
//!
//! Between jumps the angle obeys `θ̇ = d_i(θ)` with `d_i(θ) = ⟨A_i e_θ, e_{θ+π/2}⟩`,
//! and the log-radius grows at rate `⟨A_i e_θ, e_θ⟩`. Both are π-periodic; the
//! zeros of `d_i` are exactly the eigen-directions of `A_i`. This module also
//! sorts a pair `(A0, A1)` into the possible zero configurations relative to the
//! averaged field and decides whether the angular process has one or two
//! recurrent classes.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::planar::{convex_combination, eigen2, reduce_pi, Eigenvalues, Mat2, SpectrumKind};

/// Default threshold for treating a drift value as zero.
pub const ZERO_TOL: f64 = 1e-10;

/// Angular drift `⟨A e_θ, e_{θ+π/2}⟩`.
pub fn angular_drift(a: &Mat2, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    (a.a22 - a.a11) * s * c + a.a21 * c * c - a.a12 * s * s
}

/// Radial rate `⟨A e_θ, e_θ⟩`.
pub fn radial_rate(a: &Mat2, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    a.a11 * c * c + (a.a12 + a.a21) * s * c + a.a22 * s * s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroParity {
    SignChanging,
    Touching,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleZero {
    /// In `[0, π)`.
    pub angle: f64,
    pub parity: ZeroParity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleZeros {
    pub zeros: Vec<CircleZero>,
    pub is_identically_zero: bool,
}

fn is_scalar(a: &Mat2, tol: f64) -> bool {
    let scale = a.max_abs().max(1.0);
    a.a12.abs() <= tol * scale && a.a21.abs() <= tol * scale && (a.a11 - a.a22).abs() <= tol * scale
}

/// Zeros of the drift per half-turn, read off the eigen-directions and tagged
/// by the sign of `d` on either side.
pub fn circle_zeros(a: &Mat2, tol: f64) -> CircleZeros {
    if is_scalar(a, tol) {
        return CircleZeros {
            zeros: Vec::new(),
            is_identically_zero: true,
        };
    }
    let spec = eigen2(a);
    let angles: Vec<f64> = match (spec.kind, spec.eigen_angles) {
        (SpectrumKind::ComplexPair, _) | (_, None) => Vec::new(),
        (SpectrumKind::RealRepeated, Some([th, _])) => vec![th],
        (SpectrumKind::RealDistinct, Some([t0, t1])) => {
            let mut v = vec![t0, t1];
            v.sort_by(f64::total_cmp);
            v
        }
    };
    let zeros = angles
        .iter()
        .enumerate()
        .map(|(k, &th)| {
            // Probe no further than a quarter of the way to the neighbouring zero.
            let gap = if angles.len() == 2 {
                let other = angles[1 - k];
                let d = (th - other).abs();
                d.min(PI - d)
            } else {
                PI
            };
            let h = (gap / 4.0).min(1e-3);
            let left = angular_drift(a, th - h);
            let right = angular_drift(a, th + h);
            let parity = if left * right < 0.0 {
                ZeroParity::SignChanging
            } else {
                ZeroParity::Touching
            };
            CircleZero { angle: th, parity }
        })
        .collect();
    CircleZeros {
        zeros,
        is_identically_zero: false,
    }
}

/// Hyperbolic structure of the averaged matrix `A_λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AveragedProfile {
    /// Direction of the negative eigenvalue `−λ_−`, in `[0, π)`.
    pub theta_minus: f64,
    /// Direction of the positive eigenvalue `λ_+`, in `[0, π)`.
    pub theta_plus: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub lam: f64,
    pub averaged: Mat2,
}

impl AveragedProfile {
    /// `θ_+` lifted into `(θ_−, θ_− + π)`, where the averaged drift is positive
    /// before it and negative after it.
    pub fn theta_plus_lifted(&self) -> f64 {
        if self.theta_plus > self.theta_minus {
            self.theta_plus
        } else {
            self.theta_plus + PI
        }
    }

    /// Lift an angle into `[θ_−, θ_− + π)`.
    pub fn lift(&self, theta: f64) -> f64 {
        self.theta_minus + (theta - self.theta_minus).rem_euclid(PI)
    }

    pub fn averaged_drift(&self, theta: f64) -> f64 {
        angular_drift(&self.averaged, theta)
    }
}

/// Eigen-directions and eigenvalues of `A_λ`, which must have real eigenvalues
/// of opposite signs.
pub fn averaged_profile(a0: &Mat2, a1: &Mat2, lam: f64) -> Result<AveragedProfile> {
    let avg = convex_combination(a0, a1, lam)?;
    let det = avg.det();
    if !(det < 0.0) {
        return Err(Error::NoHyperbolicSplit { det });
    }
    let spec = eigen2(&avg);
    let (Eigenvalues::Real([neg, pos]), Some([th_neg, th_pos])) =
        (spec.eigenvalues, spec.eigen_angles)
    else {
        return Err(Error::NoHyperbolicSplit { det });
    };
    Ok(AveragedProfile {
        theta_minus: th_neg,
        theta_plus: th_pos,
        lambda_plus: pos,
        lambda_minus: -neg,
        lam,
        averaged: avg,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseLabel {
    #[serde(rename = "a")]
    A,
    #[serde(rename = "b")]
    B,
    #[serde(rename = "c")]
    C,
    #[serde(rename = "d")]
    D,
    #[serde(rename = "e")]
    E,
    #[serde(rename = "f")]
    F,
    #[serde(rename = "ergodic-no-zeros")]
    ErgodicNoZeros,
}

impl CaseLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            CaseLabel::A => "a",
            CaseLabel::B => "b",
            CaseLabel::C => "c",
            CaseLabel::D => "d",
            CaseLabel::E => "e",
            CaseLabel::F => "f",
            CaseLabel::ErgodicNoZeros => "ergodic-no-zeros",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    UniqueInvariantMeasure,
    TwoRecurrentClasses,
}

/// Zeros of one drift, lifted into `(θ_−, θ_− + π)` and split by side of `θ_+`.
/// A touching zero appears twice (a coincident pair).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SideZeros {
    /// In `(θ_−, θ_+)`.
    pub lower: Vec<f64>,
    /// In `(θ_+, θ_− + π)`.
    pub upper: Vec<f64>,
}

impl SideZeros {
    fn count(&self) -> usize {
        self.lower.len() + self.upper.len()
    }

    fn all(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.lower.iter().chain(&self.upper).copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleInterval {
    /// In `[0, π)`.
    pub start: f64,
    /// `start + length`, possibly beyond π.
    pub end: f64,
}

impl AngleInterval {
    fn from_lifted(lo: f64, hi: f64) -> Self {
        let start = reduce_pi(lo);
        AngleInterval {
            start,
            end: start + (hi - lo),
        }
    }

    pub fn length(&self) -> f64 {
        self.end - self.start
    }

    /// Membership of `theta` modulo π.
    pub fn contains(&self, theta: f64) -> bool {
        let off = (theta - self.start).rem_euclid(PI);
        off > 0.0 && off < self.length()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub label: CaseLabel,
    pub verdict: Verdict,
    pub invariant_interval: Option<AngleInterval>,
    /// The roles of `A0` and `A1` (and `λ ↔ 1 − λ`) were exchanged so that
    /// `d_0(θ_+) < 0 < d_1(θ_+)`; zero data below refer to the swapped labels.
    pub swapped: bool,
    /// Some drift has a touching (double) zero.
    pub degenerate: bool,
    pub profile: AveragedProfile,
    pub zeros_d0: SideZeros,
    pub zeros_d1: SideZeros,
}

fn side_zeros(a: &Mat2, profile: &AveragedProfile, tol: f64) -> Result<(SideZeros, bool)> {
    let cz = circle_zeros(a, tol);
    if cz.is_identically_zero {
        return Err(Error::NumericalDegeneracy(
            "drift vanishes identically".into(),
        ));
    }
    let tp = profile.theta_plus_lifted();
    let mut sz = SideZeros::default();
    let mut touching = false;
    for z in &cz.zeros {
        let lifted = profile.lift(z.angle);
        let copies = match z.parity {
            ZeroParity::SignChanging => 1,
            ZeroParity::Touching => {
                touching = true;
                2
            }
        };
        for _ in 0..copies {
            if lifted < tp {
                sz.lower.push(lifted);
            } else {
                sz.upper.push(lifted);
            }
        }
    }
    Ok((sz, touching))
}

/// Sort the pair into the zero configurations (a)–(f) relative to the averaged
/// field and decide the recurrence structure of the angular process.
pub fn classify(a0: &Mat2, a1: &Mat2, lam: f64, tol: f64) -> Result<CaseReport> {
    let profile = averaged_profile(a0, a1, lam)?;
    let tp = profile.theta_plus_lifted();
    for (name, th) in [("theta_plus", tp), ("theta_minus", profile.theta_minus)] {
        let d0 = angular_drift(a0, th);
        if d0.abs() < tol || angular_drift(a1, th).abs() < tol {
            return Err(Error::NumericalDegeneracy(format!(
                "a drift vanishes at {name} of the averaged matrix"
            )));
        }
    }
    let swapped = angular_drift(a0, tp) > 0.0;
    let (m0, m1) = if swapped { (a1, a0) } else { (a0, a1) };
    let (z0, t0) = side_zeros(m0, &profile, tol)?;
    let (z1, t1) = side_zeros(m1, &profile, tol)?;

    let unclassified = || {
        Error::NumericalDegeneracy(format!(
            "zero configuration matches no case: d0 {z0:?}, d1 {z1:?}"
        ))
    };

    let (label, interval) = match (z0.count(), z1.count()) {
        (0, 0) => (CaseLabel::ErgodicNoZeros, None),
        (2, 0) if z0.upper.is_empty() => (CaseLabel::A, None),
        (0, 2) if z1.lower.is_empty() => (CaseLabel::B, None),
        (2, 2) => {
            let all0 = z0.all();
            let all1 = z1.all();
            if z0.lower.len() == 2 && z1.upper.len() == 2 {
                // Invariant arc between the last zero of d0 and the first of d1.
                (CaseLabel::E, Some((all0[1], all1[0])))
            } else if z1.upper.len() == 2 && z0.upper.len() == 2 {
                let inside = all0.iter().all(|&z| z >= all1[0] && z <= all1[1]);
                if !inside {
                    return Err(unclassified());
                }
                (CaseLabel::C, None)
            } else if z0.lower.len() == 2 && z1.lower.len() == 2 {
                let inside = all1.iter().all(|&z| z >= all0[0] && z <= all0[1]);
                if !inside {
                    return Err(unclassified());
                }
                (CaseLabel::D, None)
            } else if z0.lower.len() == 1 && z1.lower.len() == 1 {
                let (t0m, t0big) = (all0[0], all0[1]);
                let (t1m, t1big) = (all1[0], all1[1]);
                if !(t1m < t0m && t0m < tp && tp < t1big && t1big < t0big) {
                    return Err(unclassified());
                }
                (CaseLabel::F, Some((t0m, t1big)))
            } else {
                return Err(unclassified());
            }
        }
        _ => return Err(unclassified()),
    };
    let verdict = if interval.is_some() {
        Verdict::TwoRecurrentClasses
    } else {
        Verdict::UniqueInvariantMeasure
    };
    Ok(CaseReport {
        label,
        verdict,
        invariant_interval: interval.map(|(lo, hi)| AngleInterval::from_lifted(lo, hi)),
        swapped,
        degenerate: t0 || t1,
        profile,
        zeros_d0: z0,
        zeros_d1: z1,
    })
}
