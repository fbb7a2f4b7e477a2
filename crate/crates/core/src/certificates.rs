//! Quadratic Lyapunov certificate for slow switching.
//!
//! With `V_i(x) = ⟨M_i x, x⟩` and `A_iᵀM_i + M_iA_i = −I`, the flow in state `i`
//! satisfies `2⟨M_i x, A_i x⟩ ≤ −2ρ V_i(x)`. A jump out of `i` multiplies `V` by
//! at most `κ_i = max_x V_{1−i}(x)/V_i(x)`, so the generator obeys
//! `L_β V ≤ −(2ρ − β max_i λ_i(κ_i − 1)) V`. The certificate uses the weaker
//! rate `ρ − β max_i λ_i(κ_i − 1)`, which is positive for `β < β₁`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::planar::{require_hurwitz, solve_lyapunov, Mat2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractionCertificate {
    pub m0: Mat2,
    pub m1: Mat2,
    pub rho: f64,
    pub kappa0: f64,
    pub kappa1: f64,
    pub lam: f64,
    /// `+inf` when both `κ_i <= 1`.
    pub beta1: f64,
}

impl ContractionCertificate {
    /// Guaranteed decay rate `ρ − β max_i λ_i(κ_i − 1)`; positive for `β < β₁`.
    pub fn guaranteed_rate(&self, beta: f64) -> f64 {
        self.rho - beta * self.jump_penalty()
    }

    fn jump_penalty(&self) -> f64 {
        let p0 = self.lam * (self.kappa0 - 1.0);
        let p1 = (1.0 - self.lam) * (self.kappa1 - 1.0);
        p0.max(p1).max(0.0)
    }
}

fn require_spd(m: &Mat2, name: &str) -> Result<()> {
    if m.is_finite() && m.is_symmetric(1e-12 * m.max_abs().max(1.0)) && m.is_positive_definite() {
        Ok(())
    } else {
        Err(Error::NotSpd(name.to_string()))
    }
}

/// Largest `γ` with `det(M − γN) = 0`, i.e. `max_x ⟨x, Mx⟩ / ⟨x, Nx⟩`.
pub fn gen_eig_max(m: &Mat2, n: &Mat2) -> Result<f64> {
    require_spd(m, "M")?;
    require_spd(n, "N")?;
    // Largest eigenvalue of L⁻¹ M L⁻ᵀ with N = L Lᵀ. The hypot form stays
    // accurate when M ∝ N, where the characteristic quadratic has a double root.
    let n12 = 0.5 * (n.a12 + n.a21);
    let l11 = n.a11.sqrt();
    let l21 = n12 / l11;
    let l22 = (n.a22 - l21 * l21).sqrt();
    let m12 = 0.5 * (m.a12 + m.a21);
    // C = L⁻¹ M L⁻ᵀ, symmetric.
    let c11 = m.a11 / (l11 * l11);
    let c12 = (m12 - l21 * m.a11 / l11) / (l11 * l22);
    let c22 = (m.a22 - 2.0 * l21 * m12 / l11 + l21 * l21 * m.a11 / (l11 * l11)) / (l22 * l22);
    Ok(Mat2::new(c11, c12, c12, c22).sym_eigenvalues()[1])
}

pub fn small_beta_certificate(a0: &Mat2, a1: &Mat2, lam: f64) -> Result<ContractionCertificate> {
    require_hurwitz(a0, "A0")?;
    require_hurwitz(a1, "A1")?;
    if !(lam > 0.0 && lam < 1.0) {
        return crate::error::domain(format!("lambda = {lam} must lie in (0, 1)"));
    }
    let q = Mat2::identity();
    let m0 = solve_lyapunov(a0, &q)?;
    let m1 = solve_lyapunov(a1, &q)?;
    let lmax = |m: &Mat2| m.sym_eigenvalues()[1];
    let rho = (1.0 / (2.0 * lmax(&m0))).min(1.0 / (2.0 * lmax(&m1)));
    let kappa0 = gen_eig_max(&m1, &m0)?;
    let kappa1 = gen_eig_max(&m0, &m1)?;
    let mut cert = ContractionCertificate {
        m0,
        m1,
        rho,
        kappa0,
        kappa1,
        lam,
        beta1: f64::INFINITY,
    };
    let pen = cert.jump_penalty();
    if pen > 0.0 {
        cert.beta1 = rho / pen;
    }
    Ok(cert)
}

/// Maximum over `samples` equally spaced unit directions and both states of
/// `L_β V(x, i) / V_i(x)` with `L_β V(x, i) = 2⟨M_i x, A_i x⟩ + βλ_i(V_{1−i}(x) − V_i(x))`.
pub fn certificate_drift_check(
    cert: &ContractionCertificate,
    a0: &Mat2,
    a1: &Mat2,
    lam: f64,
    beta: f64,
    samples: usize,
) -> f64 {
    let n = samples.max(1);
    let ms = [cert.m0, cert.m1];
    let as_ = [*a0, *a1];
    let lams = [lam, 1.0 - lam];
    let mut worst = f64::NEG_INFINITY;
    for k in 0..n {
        // Quadratic forms are even, so half a turn covers every direction.
        let th = std::f64::consts::PI * k as f64 / n as f64;
        let x = [th.cos(), th.sin()];
        for i in 0..2 {
            let vi = ms[i].quadratic_form(x);
            let vj = ms[1 - i].quadratic_form(x);
            let mx = ms[i].apply(x);
            let ax = as_[i].apply(x);
            let flow = 2.0 * (mx[0] * ax[0] + mx[1] * ax[1]);
            let ratio = (flow + beta * lams[i] * (vj - vi)) / vi;
            worst = worst.max(ratio);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gen_eig_examples() {
        let i = Mat2::identity();
        assert!((gen_eig_max(&i, &i).unwrap() - 1.0).abs() < 1e-15);
        assert!((gen_eig_max(&Mat2::diag(4.0, 1.0), &i).unwrap() - 4.0).abs() < 1e-15);
        assert!(gen_eig_max(&Mat2::diag(-1.0, 1.0), &i).is_err());
        assert!(gen_eig_max(&i, &Mat2::new(1.0, 2.0, 0.0, 1.0)).is_err());
    }

    #[test]
    fn gen_eig_matches_angular_scan() {
        let m = Mat2::new(2.0, 0.7, 0.7, 1.0);
        let n = Mat2::new(1.5, -0.4, -0.4, 0.8);
        let scan = (0..10_000)
            .map(|k| {
                let t = std::f64::consts::PI * k as f64 / 10_000.0;
                let x = [t.cos(), t.sin()];
                m.quadratic_form(x) / n.quadratic_form(x)
            })
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((gen_eig_max(&m, &n).unwrap() - scan).abs() < 1e-6);
    }

    #[test]
    fn identical_minus_identity_is_unconditional() {
        let a = Mat2::scalar(-1.0);
        let c = small_beta_certificate(&a, &a, 0.5).unwrap();
        assert!((c.kappa0 - 1.0).abs() < 1e-15 && (c.kappa1 - 1.0).abs() < 1e-15);
        assert!(c.beta1.is_infinite());
        assert!((c.rho - 1.0).abs() < 1e-15);
        let r = certificate_drift_check(&c, &a, &a, 0.5, 0.0, 100);
        assert!(r <= -2.0 * c.rho + 1e-10);
    }

    #[test]
    fn rejects_non_hurwitz() {
        let a = Mat2::scalar(-1.0);
        assert!(matches!(
            small_beta_certificate(&Mat2::diag(1.0, -1.0), &a, 0.5),
            Err(Error::NotHurwitz(_))
        ));
    }
}
