//! Closed-form invariant densities and Lyapunov exponents for the two explicit
//! families with `lambda = 1/2`.
//!
//! Rotations (`a, b > 0`):
//! `A0 = [[-1, ab], [-a/b, -1]]`, `A1 = [[-1, -a/b], [ab, -1]]`.
//!
//! Jordan (`b > 0`):
//! `A0 = [[-1, 2b], [0, -1]]`, `A1 = [[-1, 0], [2b, -1]]`, restricted to the
//! recurrent class `(0, π/2)`.
//!
//! In both cases the angular process has density
//! `μ_β(dθ, i) = e^{βv(θ)} / (C(β) |d_i(θ)|)`, where `v' = -(1/d_0 + 1/d_1)/2`.
//! All integrands are evaluated with `e^{β(v - v_max)}` so that nothing
//! overflows; breakpoints are placed geometrically around the peak of `v` and,
//! for the Jordan family, toward the essential zeros at the endpoints.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use crate::angular::{angular_drift, radial_rate};
use crate::error::{domain, Error, Result};
use crate::pdmp::SwitchedSystem;
use crate::planar::Mat2;
use crate::quad::{integrate, integrate_relative_to_first, QuadConfig};
use crate::roots::brent;

/// Below this Gaussian width around the peak the quadrature is replaced by the
/// leading-order Laplace value.
pub const LAPLACE_WIDTH: f64 = 1e-7;

/// `e^{-745}` is below the smallest subnormal double.
const EXP_UNDERFLOW: f64 = 745.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum ExactModel {
    Rotations { a: f64, b: f64 },
    Jordan { b: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Support {
    /// `[0, 2π)`.
    Circle,
    /// An open arc `(lo, hi)`.
    Arc { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChiMethod {
    Quadrature,
    Laplace,
    AnalyticLimit,
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        domain(format!("{name} = {x} must be positive and finite"))
    }
}

/// `v(θ) = (1/2a)(arctan(b tanθ) − arctan(b⁻¹ tanθ))`, written as
/// `(1/2a) arctan(k sin 2θ)` with `k = (b − 1/b)/2`, which is smooth and
/// π-periodic with no case split at `θ = π/2`.
pub fn v_rotation(theta: f64, a: f64, b: f64) -> f64 {
    let k = 0.5 * (b - 1.0 / b);
    (k * (2.0 * theta).sin()).atan() / (2.0 * a)
}

/// `v(θ) = −1/(2b sin 2θ)` on `(0, π/2)`.
pub fn v_jordan(theta: f64, b: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < FRAC_PI_2) {
        return domain(format!("theta = {theta} outside (0, pi/2)"));
    }
    Ok(-1.0 / (2.0 * b * (2.0 * theta).sin()))
}

impl ExactModel {
    pub fn rotations(a: f64, b: f64) -> Result<Self> {
        positive("a", a)?;
        positive("b", b)?;
        Ok(Self::Rotations { a, b })
    }

    pub fn jordan(b: f64) -> Result<Self> {
        positive("b", b)?;
        Ok(Self::Jordan { b })
    }

    pub fn matrices(&self) -> (Mat2, Mat2) {
        match *self {
            Self::Rotations { a, b } => (
                Mat2::new(-1.0, a * b, -a / b, -1.0),
                Mat2::new(-1.0, -a / b, a * b, -1.0),
            ),
            Self::Jordan { b } => (
                Mat2::new(-1.0, 2.0 * b, 0.0, -1.0),
                Mat2::new(-1.0, 0.0, 2.0 * b, -1.0),
            ),
        }
    }

    pub fn system(&self, beta: f64) -> Result<SwitchedSystem> {
        let (a0, a1) = self.matrices();
        SwitchedSystem::new(a0, a1, 0.5, beta)
    }

    pub fn support(&self) -> Support {
        match self {
            Self::Rotations { .. } => Support::Circle,
            Self::Jordan { .. } => Support::Arc {
                lo: 0.0,
                hi: FRAC_PI_2,
            },
        }
    }

    pub fn drift(&self, i: u8, theta: f64) -> f64 {
        let (a0, a1) = self.matrices();
        angular_drift(if i == 0 { &a0 } else { &a1 }, theta)
    }

    /// Radial rate; identical for both states in these families.
    pub fn radial(&self, theta: f64) -> f64 {
        radial_rate(&self.matrices().0, theta)
    }

    /// The potential; `-inf` outside the Jordan support.
    pub fn potential(&self, theta: f64) -> f64 {
        match *self {
            Self::Rotations { a, b } => v_rotation(theta, a, b),
            Self::Jordan { b } => v_jordan(theta, b).unwrap_or(f64::NEG_INFINITY),
        }
    }

    /// Location of the maximum of `v` inside `[0, π)`, or `None` when `v` is constant.
    pub fn peak(&self) -> Option<f64> {
        match *self {
            Self::Rotations { b, .. } if b > 1.0 => Some(FRAC_PI_4),
            Self::Rotations { b, .. } if b < 1.0 => Some(3.0 * FRAC_PI_4),
            Self::Rotations { .. } => None,
            Self::Jordan { .. } => Some(FRAC_PI_4),
        }
    }

    fn v_max(&self) -> f64 {
        self.peak().map_or(0.0, |p| self.potential(p))
    }

    /// `|v''|` at the peak.
    fn peak_curvature(&self) -> f64 {
        match *self {
            Self::Rotations { a, b } => {
                let k = 0.5 * (b - 1.0 / b);
                2.0 * k.abs() / (a * (1.0 + k * k))
            }
            Self::Jordan { b } => 2.0 / b,
        }
    }

    /// `(χ(0), lim χ(β) as β → ∞)`.
    pub fn chi_limits(&self) -> ChiLimits {
        match *self {
            Self::Rotations { a, b } => ChiLimits {
                at_zero: -1.0,
                at_infinity: a * (b * b - 1.0).abs() / (2.0 * b) - 1.0,
                at_zero_analytic_only: false,
            },
            Self::Jordan { b } => ChiLimits {
                at_zero: -1.0,
                at_infinity: b - 1.0,
                at_zero_analytic_only: true,
            },
        }
    }

    /// Whether `χ` changes sign, i.e. its limit at infinity is positive.
    pub fn admits_transition(&self) -> bool {
        match *self {
            Self::Rotations { a, b } => a * (b - 1.0 / b).abs() > 2.0,
            Self::Jordan { b } => b > 1.0,
        }
    }

    fn transition_condition(&self) -> &'static str {
        match self {
            Self::Rotations { .. } => "a*|b - 1/b| <= 2 (for b > 1: b <= (1+sqrt(1+a^2))/a)",
            Self::Jordan { .. } => "b <= 1",
        }
    }

    fn check_beta(&self, beta: f64) -> Result<()> {
        match self {
            Self::Rotations { .. } if beta >= 0.0 && beta.is_finite() => Ok(()),
            Self::Jordan { .. } if beta > 0.0 && beta.is_finite() => Ok(()),
            Self::Rotations { .. } => domain(format!("beta = {beta} must be nonnegative and finite")),
            Self::Jordan { .. } => domain(format!(
                "beta = {beta} must be positive for the Jordan family (the normalizer diverges at 0)"
            )),
        }
    }

    /// Integration range and breakpoints for a given `beta`.
    fn breakpoints(&self, beta: f64) -> Vec<f64> {
        let mut pts = Vec::new();
        let (lo, hi) = match *self {
            Self::Rotations { .. } => {
                pts.extend((0..=8).map(|k| k as f64 * FRAC_PI_4));
                (0.0, 2.0 * PI)
            }
            Self::Jordan { b } => {
                let s_min = beta / (beta + 2.0 * b * EXP_UNDERFLOW);
                let th_min = 0.5 * s_min.asin();
                let mut x = th_min;
                while x < FRAC_PI_4 {
                    pts.push(x);
                    pts.push(FRAC_PI_2 - x);
                    x *= 2.0;
                }
                pts.push(FRAC_PI_4);
                (th_min, FRAC_PI_2 - th_min)
            }
        };
        if let Some(p) = self.peak() {
            let curv = beta * self.peak_curvature();
            if curv > 0.0 {
                let w = 1.0 / curv.sqrt();
                let centers: Vec<f64> = match self {
                    Self::Rotations { .. } => vec![p, p + PI],
                    Self::Jordan { .. } => vec![p],
                };
                for c in centers {
                    let mut h = w;
                    while h < FRAC_PI_4 {
                        pts.push(c - h);
                        pts.push(c + h);
                        h *= 2.0;
                    }
                }
            }
        }
        pts.retain(|&x| x >= lo && x <= hi);
        pts.push(lo);
        pts.push(hi);
        pts.sort_by(f64::total_cmp);
        let scale = hi.abs().max(1.0);
        pts.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * scale);
        pts
    }

    /// Unnormalized per-state density `e^{β(v − v_max)} / |d_i|`.
    pub fn scaled_weights(&self, beta: f64, theta: f64) -> [f64; 2] {
        let v = self.potential(theta);
        if v == f64::NEG_INFINITY {
            return [0.0, 0.0];
        }
        let e = if beta == 0.0 {
            1.0
        } else {
            (beta * (v - self.v_max())).exp()
        };
        if e == 0.0 {
            return [0.0, 0.0];
        }
        [
            e / self.drift(0, theta).abs(),
            e / self.drift(1, theta).abs(),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiLimits {
    pub at_zero: f64,
    pub at_infinity: f64,
    /// The value at zero is the stated limit, not a quadrature result.
    pub at_zero_analytic_only: bool,
}

fn quad_cfg() -> QuadConfig {
    QuadConfig {
        abs_tol: 1e-300,
        rel_tol: 1e-13,
        max_intervals: 50_000,
    }
}

/// Moments of the scaled density: `[C, ∫(𝒜−𝒜*)w, ∫(v−v*)w, ∫(𝒜−𝒜*)(v−v*)w]`,
/// with starred values taken at the peak.
struct Moments {
    values: [f64; 4],
    errors: [f64; 4],
    radial_peak: f64,
}

fn moments(model: &ExactModel, beta: f64) -> Result<Moments> {
    let vmax = model.v_max();
    let radial_peak = model.peak().map_or(model.radial(0.0), |p| model.radial(p));
    let f = |th: f64| {
        let w = model.scaled_weights(beta, th);
        let w = w[0] + w[1];
        if w == 0.0 {
            return [0.0; 4];
        }
        let da = model.radial(th) - radial_peak;
        let dv = model.potential(th) - vmax;
        [w, da * w, dv * w, da * dv * w]
    };
    let r = integrate_relative_to_first(f, &model.breakpoints(beta), &quad_cfg(), [1.0; 4])?;
    Ok(Moments {
        values: r.value,
        errors: r.abs_error,
        radial_peak,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiExact {
    pub value: f64,
    pub abs_error: f64,
    pub method: ChiMethod,
}

fn laplace_width(model: &ExactModel, beta: f64) -> Option<f64> {
    model.peak()?;
    let c = beta * model.peak_curvature();
    (c > 0.0).then(|| 1.0 / c.sqrt())
}

/// `χ(β) = ∫ 𝒜 dμ_β`.
pub fn chi_exact_report(model: &ExactModel, beta: f64) -> Result<ChiExact> {
    model.check_beta(beta)?;
    if let (Some(w), Some(p)) = (laplace_width(model, beta), model.peak()) {
        if w < LAPLACE_WIDTH {
            return Ok(ChiExact {
                value: model.radial(p),
                abs_error: w,
                method: ChiMethod::Laplace,
            });
        }
    }
    let m = moments(model, beta)?;
    let [c, na, _, _] = m.values;
    if !(c > 0.0) {
        return Err(Error::Quadrature(format!("normalizer {c} is not positive")));
    }
    let value = m.radial_peak + na / c;
    let abs_error = m.errors[1] / c + na.abs() * m.errors[0] / (c * c);
    Ok(ChiExact {
        value,
        abs_error,
        method: ChiMethod::Quadrature,
    })
}

pub fn chi_exact(model: &ExactModel, beta: f64) -> Result<f64> {
    chi_exact_report(model, beta).map(|r| r.value)
}

/// `χ'(β) = Cov_μβ(𝒜, v)`, by quadrature.
pub fn chi_derivative(model: &ExactModel, beta: f64) -> Result<f64> {
    model.check_beta(beta)?;
    let m = moments(model, beta)?;
    let [c, na, nv, nav] = m.values;
    Ok(nav / c - (na / c) * (nv / c))
}

/// Sign of `χ'(β)`: `-1`, `0` or `1`. Covariances below `1e-14` in magnitude count as zero.
pub fn chi_derivative_sign(model: &ExactModel, beta: f64) -> Result<i8> {
    let cov = chi_derivative(model, beta)?;
    Ok(if cov.abs() < 1e-14 {
        0
    } else if cov > 0.0 {
        1
    } else {
        -1
    })
}

/// The unique zero of `χ`, located by bracket expansion from `β = 1` followed
/// by Brent's method. Stops once `|χ| <= tol` or the bracket is at rounding level.
pub fn beta_c(model: &ExactModel, tol: f64) -> Result<f64> {
    if !model.admits_transition() {
        return Err(Error::NoTransition(
            model.transition_condition().to_string(),
        ));
    }
    let f = |beta: f64| chi_exact(model, beta);
    let (mut lo, mut hi) = (1.0, 1.0);
    let mut f1 = f(1.0)?;
    let mut guard = 0;
    if f1 < 0.0 {
        while f1 < 0.0 {
            lo = hi;
            hi *= 2.0;
            f1 = f(hi)?;
            guard += 1;
            if guard > 200 {
                return Err(Error::NumericalDegeneracy(
                    "no sign change found up to beta = 2^200".into(),
                ));
            }
        }
    } else {
        while f1 >= 0.0 {
            hi = lo;
            lo *= 0.5;
            f1 = f(lo)?;
            guard += 1;
            if guard > 200 {
                return Err(Error::NumericalDegeneracy(
                    "no sign change found down to beta = 2^-200".into(),
                ));
            }
        }
    }
    let r = brent(f, lo, hi, 1e-13 * hi, tol, 200)?;
    Ok(r.root)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityEvaluation {
    pub model: ExactModel,
    pub beta: f64,
    pub support: Support,
    pub theta: Vec<f64>,
    /// Normalized density `(ρ_0(θ), ρ_1(θ))` at each grid angle.
    pub weights: Vec<[f64; 2]>,
    /// `C(β)`; may overflow to infinity for very large `β`, see `log_c_beta`.
    pub c_beta: f64,
    pub log_c_beta: f64,
    /// Total mass of the normalized density, by separate quadrature of each state.
    pub total_mass: f64,
}

/// Evaluate the invariant density on a grid of `grid_points` uniformly spaced
/// angles of the support merged with the quadrature breakpoints.
pub fn density(model: &ExactModel, beta: f64, grid_points: usize) -> Result<DensityEvaluation> {
    model.check_beta(beta)?;
    let breaks = model.breakpoints(beta);
    let cfg = quad_cfg();
    let per_state = integrate(|th| model.scaled_weights(beta, th), &breaks, &cfg)?;
    let c_scaled = per_state.value[0] + per_state.value[1];
    if !(c_scaled > 0.0) {
        return Err(Error::Quadrature(format!(
            "normalizer {c_scaled} is not positive"
        )));
    }
    let log_c_beta = c_scaled.ln() + beta * model.v_max();
    let (lo, hi) = (breaks[0], breaks[breaks.len() - 1]);
    let n = grid_points.max(2);
    let mut theta: Vec<f64> = (0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .collect();
    theta.extend_from_slice(&breaks);
    theta.sort_by(f64::total_cmp);
    theta.dedup();
    let weights = theta
        .iter()
        .map(|&th| {
            let w = model.scaled_weights(beta, th);
            [w[0] / c_scaled, w[1] / c_scaled]
        })
        .collect();
    Ok(DensityEvaluation {
        model: *model,
        beta,
        support: model.support(),
        theta,
        weights,
        c_beta: log_c_beta.exp(),
        log_c_beta,
        total_mass: (per_state.value[0] + per_state.value[1]) / c_scaled,
    })
}

/// Mass of `(θ mod π, i)` in each of `bins` equal bins of `[0, π)`.
pub fn bin_masses(model: &ExactModel, beta: f64, bins: usize) -> Result<Vec<[f64; 2]>> {
    model.check_beta(beta)?;
    if bins == 0 {
        return domain("bins must be positive");
    }
    let breaks = model.breakpoints(beta);
    let cfg = quad_cfg();
    let total = integrate(|th| model.scaled_weights(beta, th), &breaks, &cfg)?;
    let c = total.value[0] + total.value[1];
    let (lo, hi) = (breaks[0], breaks[breaks.len() - 1]);
    let width = PI / bins as f64;
    let mut out = vec![[0.0; 2]; bins];
    let shifts: &[f64] = match model {
        ExactModel::Rotations { .. } => &[0.0, PI],
        ExactModel::Jordan { .. } => &[0.0],
    };
    for (k, slot) in out.iter_mut().enumerate() {
        for &shift in shifts {
            let a = (shift + k as f64 * width).max(lo);
            let b = (shift + (k + 1) as f64 * width).min(hi);
            if !(a < b) {
                continue;
            }
            let mut pts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
            pts.insert(0, a);
            pts.push(b);
            let r = integrate(|th| model.scaled_weights(beta, th), &pts, &cfg)?;
            slot[0] += r.value[0] / c;
            slot[1] += r.value[1] / c;
        }
    }
    Ok(out)
}

/// `∫ L_β f dμ_β` with `L_β f(θ, i) = d_i f'(θ, i) + (β/2)(f(θ, 1−i) − f(θ, i))`.
/// `df` is the derivative of `f` in `θ`.
pub fn stationarity_residual<F, D>(model: &ExactModel, beta: f64, f: F, df: D) -> Result<f64>
where
    F: Fn(f64, u8) -> f64,
    D: Fn(f64, u8) -> f64,
{
    model.check_beta(beta)?;
    let g = |th: f64| {
        let w = model.scaled_weights(beta, th);
        if w[0] == 0.0 && w[1] == 0.0 {
            return [0.0; 2];
        }
        let mut lf = 0.0;
        for i in 0..2u8 {
            let gen = model.drift(i, th) * df(th, i) + 0.5 * beta * (f(th, 1 - i) - f(th, i));
            lf += gen * w[i as usize];
        }
        [lf, w[0] + w[1]]
    };
    let scale = 10.0 * beta.max(1.0);
    let r = integrate_relative_to_first(
        |th| {
            let [x, y] = g(th);
            [y, x]
        },
        &model.breakpoints(beta),
        &quad_cfg(),
        [1.0, scale],
    )?;
    Ok(r.value[1] / r.value[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn v_rotation_examples() {
        assert_eq!(v_rotation(0.0, 1.0, 3.0), 0.0);
        assert!(v_rotation(FRAC_PI_2, 1.0, 3.0).abs() < 1e-16);
        let expected = 0.5 * (3f64.atan() - (1.0f64 / 3.0).atan());
        assert!((v_rotation(FRAC_PI_4, 1.0, 3.0) - expected).abs() < 1e-15);
        assert!((expected - (FRAC_PI_2 - 2.0 * (1.0f64 / 3.0).atan()) / 2.0).abs() < 1e-15);
        assert!((expected - 0.463648).abs() < 1e-6);
    }

    #[test]
    fn v_rotation_matches_two_arctan_form_off_the_pole() {
        for k in 1..40 {
            let th = -1.5 + 3.0 * k as f64 / 40.0;
            let t = th.tan();
            let direct = ((2.5 * t).atan() - (t / 2.5).atan()) / (2.0 * 0.7);
            assert!((v_rotation(th, 0.7, 2.5) - direct).abs() < 1e-14);
        }
    }

    #[test]
    fn v_jordan_examples() {
        assert!((v_jordan(FRAC_PI_4, 2.0).unwrap() + 0.25).abs() < 1e-15);
        assert!(
            (v_jordan(0.3, 2.0).unwrap() - v_jordan(FRAC_PI_2 - 0.3, 2.0).unwrap()).abs() < 1e-14
        );
        assert!(v_jordan(1e-3, 2.0).unwrap() < v_jordan(1e-2, 2.0).unwrap());
        assert!(v_jordan(0.0, 2.0).is_err());
        assert!(v_jordan(FRAC_PI_2, 2.0).is_err());
    }

    #[test]
    fn potential_solves_its_ode() {
        for model in [
            ExactModel::Rotations { a: 1.3, b: 2.2 },
            ExactModel::Jordan { b: 1.7 },
        ] {
            for k in 1..20 {
                let th = 0.05 + 1.4 * k as f64 / 20.0;
                let h = 1e-5;
                let dv = (model.potential(th + h) - model.potential(th - h)) / (2.0 * h);
                let rhs = -0.5 * (1.0 / model.drift(0, th) + 1.0 / model.drift(1, th));
                assert!(
                    (dv - rhs).abs() < 1e-7 * rhs.abs().max(1.0),
                    "{model:?} {th}"
                );
            }
        }
    }

    #[test]
    fn chi_at_zero_rotations() {
        let m = ExactModel::rotations(1.0, 3.0).unwrap();
        assert!((chi_exact(&m, 0.0).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn rotations_b_one_is_flat() {
        let m = ExactModel::rotations(1.0, 1.0).unwrap();
        assert!((chi_exact(&m, 5.0).unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(chi_derivative_sign(&m, 5.0).unwrap(), 0);
        let l = m.chi_limits();
        assert_eq!((l.at_zero, l.at_infinity), (-1.0, -1.0));
    }

    #[test]
    fn limits_examples() {
        let l = ExactModel::Rotations { a: 1.0, b: 3.0 }.chi_limits();
        assert!((l.at_infinity - 1.0 / 3.0).abs() < 1e-15);
        let l = ExactModel::Jordan { b: 2.0 }.chi_limits();
        assert_eq!((l.at_zero, l.at_infinity), (-1.0, 1.0));
        assert!(l.at_zero_analytic_only);
    }

    #[test]
    fn jordan_rejects_zero_beta() {
        let m = ExactModel::jordan(2.0).unwrap();
        assert!(chi_exact(&m, 0.0).is_err());
        assert!(density(&m, 0.0, 10).is_err());
    }

    #[test]
    fn no_transition_for_small_b() {
        let m = ExactModel::rotations(1.0, 2.0).unwrap();
        assert!(matches!(beta_c(&m, 1e-12), Err(Error::NoTransition(_))));
        assert!(matches!(
            beta_c(&ExactModel::Jordan { b: 0.8 }, 1e-12),
            Err(Error::NoTransition(_))
        ));
    }

    #[test]
    fn beta_c_brackets_sign_change() {
        for m in [
            ExactModel::Rotations { a: 1.0, b: 3.0 },
            ExactModel::Jordan { b: 2.0 },
        ] {
            let bc = beta_c(&m, 1e-12).unwrap();
            assert!(chi_exact(&m, 0.9 * bc).unwrap() < 0.0);
            assert!(chi_exact(&m, 1.1 * bc).unwrap() > 0.0);
        }
    }

    #[test]
    fn laplace_branch_for_huge_beta() {
        let m = ExactModel::Rotations { a: 1.0, b: 3.0 };
        let r = chi_exact_report(&m, 1e16).unwrap();
        assert_eq!(r.method, ChiMethod::Laplace);
        assert!((r.value - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn density_is_normalized() {
        for (m, beta) in [
            (ExactModel::Rotations { a: 1.0, b: 3.0 }, 2.0),
            (ExactModel::Jordan { b: 2.0 }, 0.5),
        ] {
            let d = density(&m, beta, 101).unwrap();
            assert!((d.total_mass - 1.0).abs() < 1e-12);
            let masses = bin_masses(&m, beta, 16).unwrap();
            let s: f64 = masses.iter().map(|w| w[0] + w[1]).sum();
            assert!((s - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn stationarity_of_constant() {
        let m = ExactModel::Rotations { a: 1.0, b: 3.0 };
        let r = stationarity_residual(&m, 2.0, |_, _| 1.0, |_, _| 0.0).unwrap();
        assert_eq!(r, 0.0);
    }
}
