//! Exact linear algebra for real 2×2 matrices.
//!
//! Everything here is closed form: spectra from the trace/determinant
//! discriminant, the matrix exponential from the Cayley–Hamilton reduction
//! `exp(tA) = e^{mt}(c(t)·I + s(t)·(A − mI))`, and the Lyapunov equation as a
//! 3×3 linear solve on the independent entries of a symmetric matrix.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Error, Result};

/// Relative tolerance on the discriminant below which eigenvalues count as repeated.
const REPEATED_TOL: f64 = 64.0 * f64::EPSILON;

/// Below this value of `|δ|·t` the exponential uses its Taylor form in `δ²t²`.
const EXPM_SERIES_CUTOFF: f64 = 1e-4;

/// Relative tie band for the criterion comparison.
pub const CRITERION_TIE_TOL: f64 = 1e-12;

/// A real 2×2 matrix, row major.
#[derive(Clone, Copy, PartialEq, Default)]
pub struct Mat2 {
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
}

impl Mat2 {
    pub const fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Self { a11, a12, a21, a22 }
    }

    pub const fn from_rows(rows: [[f64; 2]; 2]) -> Self {
        Self::new(rows[0][0], rows[0][1], rows[1][0], rows[1][1])
    }

    pub const fn identity() -> Self {
        Self::new(1.0, 0.0, 0.0, 1.0)
    }

    pub const fn scalar(c: f64) -> Self {
        Self::new(c, 0.0, 0.0, c)
    }

    pub const fn diag(d1: f64, d2: f64) -> Self {
        Self::new(d1, 0.0, 0.0, d2)
    }

    pub fn rows(&self) -> [[f64; 2]; 2] {
        [[self.a11, self.a12], [self.a21, self.a22]]
    }

    pub fn trace(&self) -> f64 {
        self.a11 + self.a22
    }

    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.a11, self.a21, self.a12, self.a22)
    }

    pub fn is_finite(&self) -> bool {
        self.a11.is_finite() && self.a12.is_finite() && self.a21.is_finite() && self.a22.is_finite()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.a11
            .abs()
            .max(self.a12.abs())
            .max(self.a21.abs())
            .max(self.a22.abs())
    }

    pub fn frobenius(&self) -> f64 {
        (self.a11 * self.a11 + self.a12 * self.a12 + self.a21 * self.a21 + self.a22 * self.a22)
            .sqrt()
    }

    /// Spectral (operator 2-) norm.
    pub fn op_norm(&self) -> f64 {
        // σ_max² = (‖A‖_F² + sqrt(‖A‖_F⁴ − 4 det²)) / 2, written to avoid cancellation.
        let p = (self.a11 + self.a22).hypot(self.a21 - self.a12);
        let q = (self.a11 - self.a22).hypot(self.a21 + self.a12);
        0.5 * (p + q)
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.a11 * v[0] + self.a12 * v[1],
            self.a21 * v[0] + self.a22 * v[1],
        ]
    }

    /// `⟨x, Ax⟩`.
    pub fn quadratic_form(&self, x: [f64; 2]) -> f64 {
        let y = self.apply(x);
        x[0] * y[0] + x[1] * y[1]
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (self.a12 - self.a21).abs() <= tol * self.max_abs().max(1.0)
    }

    /// Eigenvalues of the symmetric part, ascending.
    pub fn sym_eigenvalues(&self) -> [f64; 2] {
        let m = 0.5 * (self.a11 + self.a22);
        let off = 0.5 * (self.a12 + self.a21);
        let r = (0.5 * (self.a11 - self.a22)).hypot(off);
        [m - r, m + r]
    }

    /// Positive definiteness of a symmetric matrix (the symmetric part is used).
    pub fn is_positive_definite(&self) -> bool {
        self.a11 > 0.0 && self.a22 > 0.0 && self.sym_eigenvalues()[0] > 0.0
    }
}

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{:?}, {:?}], [{:?}, {:?}]]",
            self.a11, self.a12, self.a21, self.a22
        )
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a11 + o.a11,
            self.a12 + o.a12,
            self.a21 + o.a21,
            self.a22 + o.a22,
        )
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a11 - o.a11,
            self.a12 - o.a12,
            self.a21 - o.a21,
            self.a22 - o.a22,
        )
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        Mat2::new(-self.a11, -self.a12, -self.a21, -self.a22)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a11 * o.a11 + self.a12 * o.a21,
            self.a11 * o.a12 + self.a12 * o.a22,
            self.a21 * o.a11 + self.a22 * o.a21,
            self.a21 * o.a12 + self.a22 * o.a22,
        )
    }
}

impl Mul<f64> for Mat2 {
    type Output = Mat2;
    fn mul(self, c: f64) -> Mat2 {
        Mat2::new(self.a11 * c, self.a12 * c, self.a21 * c, self.a22 * c)
    }
}

impl Mul<Mat2> for f64 {
    type Output = Mat2;
    fn mul(self, m: Mat2) -> Mat2 {
        m * self
    }
}

impl Serialize for Mat2 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Mat2 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = <[[f64; 2]; 2]>::deserialize(d)?;
        Ok(Mat2::from_rows(rows))
    }
}

/// Shape of a 2×2 spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumKind {
    RealDistinct,
    RealRepeated,
    ComplexPair,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Eigenvalues {
    /// Ascending.
    Real([f64; 2]),
    Complex {
        re: f64,
        im: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub kind: SpectrumKind,
    pub eigenvalues: Eigenvalues,
    /// Angles in `[0, π)` of the eigen-directions, paired with `eigenvalues`.
    /// A defective repeated eigenvalue reports its single direction twice; a
    /// scalar matrix reports the coordinate axes.
    pub eigen_angles: Option<[f64; 2]>,
}

impl Spectrum {
    pub fn real_parts(&self) -> [f64; 2] {
        match self.eigenvalues {
            Eigenvalues::Real(v) => v,
            Eigenvalues::Complex { re, .. } => [re, re],
        }
    }

    pub fn sum(&self) -> f64 {
        let r = self.real_parts();
        r[0] + r[1]
    }

    /// Product of eigenvalues (`|λ|²` for a complex pair).
    pub fn product(&self) -> f64 {
        match self.eigenvalues {
            Eigenvalues::Real(v) => v[0] * v[1],
            Eigenvalues::Complex { re, im } => re * re + im * im,
        }
    }

    pub fn max_real_part(&self) -> f64 {
        let r = self.real_parts();
        r[0].max(r[1])
    }
}

/// Reduce an angle to `[0, π)`.
pub fn reduce_pi(theta: f64) -> f64 {
    let r = theta.rem_euclid(PI);
    if r >= PI {
        0.0
    } else {
        r
    }
}

/// Reduce an angle to `[0, 2π)`.
pub fn reduce_two_pi(theta: f64) -> f64 {
    let r = theta.rem_euclid(2.0 * PI);
    if r >= 2.0 * PI {
        0.0
    } else {
        r
    }
}

/// Half the difference of the diagonal squared plus the off-diagonal product:
/// `(Tr A / 2)² − det A` without the cancellation of the naive form.
fn half_discriminant(a: &Mat2) -> f64 {
    let h = 0.5 * (a.a11 - a.a22);
    h * h + a.a12 * a.a21
}

/// Direction of the eigenvector for the real eigenvalue `mu`, or `None` when
/// `A − μI` vanishes (scalar matrix).
fn eigen_angle(a: &Mat2, mu: f64) -> Option<f64> {
    let u = [a.a12, mu - a.a11];
    let w = [mu - a.a22, a.a21];
    let nu = u[0].hypot(u[1]);
    let nw = w[0].hypot(w[1]);
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    if nu.max(nw) <= 16.0 * f64::EPSILON * scale {
        return None;
    }
    let v = if nu >= nw { u } else { w };
    Some(reduce_pi(v[1].atan2(v[0])))
}

/// Characteristic roots and eigen-directions of `a`.
pub fn eigen2(a: &Mat2) -> Spectrum {
    let m = 0.5 * a.trace();
    let disc = half_discriminant(a);
    let scale = a.max_abs();
    if disc.abs() <= REPEATED_TOL * scale * scale {
        let angles = match eigen_angle(a, m) {
            Some(th) => [th, th],
            None => [0.0, PI / 2.0],
        };
        return Spectrum {
            kind: SpectrumKind::RealRepeated,
            eigenvalues: Eigenvalues::Real([m, m]),
            eigen_angles: Some(angles),
        };
    }
    if disc < 0.0 {
        return Spectrum {
            kind: SpectrumKind::ComplexPair,
            eigenvalues: Eigenvalues::Complex {
                re: m,
                im: (-disc).sqrt(),
            },
            eigen_angles: None,
        };
    }
    let root = disc.sqrt();
    // Larger-magnitude root first, the other from the determinant.
    let big = if m >= 0.0 { m + root } else { m - root };
    let small = if big != 0.0 { a.det() / big } else { -big };
    let (lo, hi) = if big < small {
        (big, small)
    } else {
        (small, big)
    };
    let th_lo = eigen_angle(a, lo).unwrap_or(0.0);
    let th_hi = eigen_angle(a, hi).unwrap_or(PI / 2.0);
    Spectrum {
        kind: SpectrumKind::RealDistinct,
        eigenvalues: Eigenvalues::Real([lo, hi]),
        eigen_angles: Some([th_lo, th_hi]),
    }
}

/// Both eigenvalues have negative real part; for 2×2 this is `Tr < 0, det > 0`.
pub fn is_hurwitz(a: &Mat2) -> bool {
    a.is_finite() && a.trace() < 0.0 && a.det() > 0.0
}

/// `(1 − λ)A0 + λA1`.
pub fn convex_combination(a0: &Mat2, a1: &Mat2, lam: f64) -> Result<Mat2> {
    if !(0.0..=1.0).contains(&lam) {
        return domain(format!("lambda = {lam} outside [0, 1]"));
    }
    Ok(*a0 * (1.0 - lam) + *a1 * lam)
}

pub(crate) fn require_hurwitz(a: &Mat2, name: &str) -> Result<()> {
    if is_hurwitz(a) {
        Ok(())
    } else {
        Err(Error::NotHurwitz(name.to_string()))
    }
}

/// Outcome of the trace/determinant stability-loss test for a Hurwitz pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    /// `Tr(A0)Tr(A1) − Tr(A0 A1)`.
    pub lhs: f64,
    /// `−2 sqrt(det A0 det A1)`.
    pub rhs: f64,
    pub holds: bool,
    /// `lhs` and `rhs` agree within the tie band; `holds` is then false.
    pub boundary: bool,
    /// Open interval of λ in (0, 1) where `det(A_λ) < 0`.
    pub lambda_window: Option<(f64, f64)>,
}

/// Coefficients of `det(A0 + λ(A1 − A0)) = c0 + c1 λ + c2 λ²`.
fn det_quadratic(a0: &Mat2, a1: &Mat2) -> [f64; 3] {
    let d = *a1 - *a0;
    let c0 = a0.det();
    let c1 = a0.a11 * d.a22 + a0.a22 * d.a11 - a0.a12 * d.a21 - a0.a21 * d.a12;
    let c2 = d.det();
    [c0, c1, c2]
}

fn det_window(a0: &Mat2, a1: &Mat2) -> Option<(f64, f64)> {
    let [c0, c1, c2] = det_quadratic(a0, a1);
    // Endpoints have positive determinant, so a negative region needs an
    // upward parabola whose vertex lies in (0, 1) below zero.
    if c2 <= 0.0 {
        return None;
    }
    let vertex = -c1 / (2.0 * c2);
    if !(vertex > 0.0 && vertex < 1.0) {
        return None;
    }
    let disc = c1 * c1 - 4.0 * c2 * c0;
    if disc <= 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let q = -0.5 * (c1 + c1.signum() * sq);
    let (r1, r2) = if q != 0.0 {
        (q / c2, c0 / q)
    } else {
        (vertex, vertex)
    };
    let (lo, hi) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
    let lo = lo.max(0.0);
    let hi = hi.min(1.0);
    (lo < hi).then_some((lo, hi))
}

/// The hyperbolicity criterion for a Hurwitz pair together with the λ-window
/// on which the averaged matrix has real eigenvalues of opposite signs.
pub fn bbm_criterion(a0: &Mat2, a1: &Mat2) -> Result<CriterionReport> {
    require_hurwitz(a0, "A0")?;
    require_hurwitz(a1, "A1")?;
    let lhs = a0.trace() * a1.trace() - (*a0 * *a1).trace();
    let rhs = -2.0 * (a0.det() * a1.det()).sqrt();
    let band = CRITERION_TIE_TOL * lhs.abs().max(rhs.abs()).max(1.0);
    let boundary = (lhs - rhs).abs() <= band;
    let holds = !boundary && lhs < rhs;
    Ok(CriterionReport {
        lhs,
        rhs,
        holds,
        boundary,
        lambda_window: det_window(a0, a1),
    })
}

/// Brute-force λ-window: scan `det(A_λ)` on a uniform grid, polish the grid
/// minimum by golden-section search, and bisect the sign changes.
pub fn lambda_window_scan(a0: &Mat2, a1: &Mat2, grid_size: usize) -> Result<Option<(f64, f64)>> {
    require_hurwitz(a0, "A0")?;
    require_hurwitz(a1, "A1")?;
    if grid_size == 0 {
        return domain("grid_size must be positive");
    }
    let det_at = |lam: f64| (*a0 * (1.0 - lam) + *a1 * lam).det();
    let n = grid_size;
    let grid: Vec<f64> = (0..=n).map(|k| det_at(k as f64 / n as f64)).collect();
    let (kmin, _) = grid
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .expect("grid is non-empty");

    // Seed point with a negative determinant, if any.
    let h = 1.0 / n as f64;
    let mut inside = if grid[kmin] < 0.0 {
        Some(kmin as f64 * h)
    } else {
        None
    };
    if inside.is_none() {
        let lo = (kmin.saturating_sub(1)) as f64 * h;
        let hi = ((kmin + 1).min(n)) as f64 * h;
        let (x, fx) = golden_min(det_at, lo, hi);
        if fx < 0.0 {
            inside = Some(x);
        }
    }
    let Some(x_in) = inside else {
        return Ok(None);
    };

    // Walk outward on the grid to the first non-negative sample each side.
    let k_in = (x_in / h).floor() as usize;
    let mut left = k_in;
    while left > 0 && grid[left] < 0.0 {
        left -= 1;
    }
    let mut right = (k_in + 1).min(n);
    while right < n && grid[right] < 0.0 {
        right += 1;
    }
    let a_lo = bisect_sign(det_at, left as f64 * h, x_in);
    let a_hi = bisect_sign(det_at, x_in, right as f64 * h);
    Ok(Some((a_lo, a_hi)))
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-15 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Bisection for the sign change of `f` between `a` and `b`; returns the midpoint
/// of the final bracket.
fn bisect_sign(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a.min(b) || m >= a.max(b) {
            break;
        }
        let fm = f(m);
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// `exp(tA)` in closed form.
pub fn expm2(a: &Mat2, t: f64) -> Mat2 {
    let m = 0.5 * a.trace();
    let delta2 = half_discriminant(a);
    let b = *a - Mat2::scalar(m);
    // c = cosh(δt), s = sinh(δt)/δ, analytically continued to δ² < 0.
    let q = delta2 * t * t;
    let (c, s, growth) = if q.abs() < EXPM_SERIES_CUTOFF * EXPM_SERIES_CUTOFF {
        let c = 1.0 + q / 2.0 + q * q / 24.0 + q * q * q / 720.0;
        let s = t * (1.0 + q / 6.0 + q * q / 120.0 + q * q * q / 5040.0);
        (c, s, (m * t).exp())
    } else if delta2 > 0.0 {
        let d = delta2.sqrt();
        let x = d * t;
        if x.abs() < 20.0 {
            (x.cosh(), x.sinh() / d, (m * t).exp())
        } else {
            // e^{mt}cosh(x) = e^{mt+|x|}(1 + e^{-2|x|})/2, with the exponents merged.
            let ax = x.abs();
            let tail = (-2.0 * ax).exp();
            let c = 0.5 * (1.0 + tail);
            let s = 0.5 * (1.0 - tail) * x.signum() / d;
            (c, s, (m * t + ax).exp())
        }
    } else {
        let w = (-delta2).sqrt();
        let x = w * t;
        (x.cos(), x.sin() / w, (m * t).exp())
    };
    (Mat2::identity() * c + b * s) * growth
}

/// Symmetric `M` with `AᵀM + MA = −Q`, for Hurwitz `A` and symmetric positive definite `Q`.
pub fn solve_lyapunov(a: &Mat2, q: &Mat2) -> Result<Mat2> {
    require_hurwitz(a, "A")?;
    if !q.is_symmetric(1e-12) || !q.is_positive_definite() {
        return Err(Error::NotSpd("Q".into()));
    }
    let (p, r, s, u) = (a.a11, a.a12, a.a21, a.a22);
    let sys = [
        [2.0 * p, 2.0 * s, 0.0],
        [r, p + u, s],
        [0.0, 2.0 * r, 2.0 * u],
    ];
    let rhs = [-q.a11, -0.5 * (q.a12 + q.a21), -q.a22];
    let x = solve3(sys, rhs)
        .ok_or_else(|| Error::NumericalDegeneracy("singular Lyapunov operator".into()))?;
    let m = Mat2::new(x[0], x[1], x[1], x[2]);
    if !m.is_positive_definite() {
        return Err(Error::NumericalDegeneracy(
            "Lyapunov solution not positive definite".into(),
        ));
    }
    Ok(m)
}

/// Gaussian elimination with partial pivoting.
pub(crate) fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col] == 0.0 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let mut acc = b[row];
        for k in row + 1..3 {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex1(b: f64) -> (Mat2, Mat2) {
        (
            Mat2::new(-1.0, 2.0 * b, 0.0, -1.0),
            Mat2::new(-1.0, 0.0, 2.0 * b, -1.0),
        )
    }

    fn ex2(a: f64, b: f64) -> (Mat2, Mat2) {
        (
            Mat2::new(-1.0, a * b, -a / b, -1.0),
            Mat2::new(-1.0, -a / b, a * b, -1.0),
        )
    }

    /// Scaled-and-squared Taylor series, independent of the closed form.
    fn expm_series(a: &Mat2, t: f64) -> Mat2 {
        let ta = *a * t;
        let mut s = 0;
        while ta.max_abs() / 2f64.powi(s) > 0.5 {
            s += 1;
        }
        let x = ta * (1.0 / 2f64.powi(s));
        let mut term = Mat2::identity();
        let mut sum = Mat2::identity();
        for k in 1..30 {
            term = term * x * (1.0 / k as f64);
            sum = sum + term;
        }
        for _ in 0..s {
            sum = sum * sum;
        }
        sum
    }

    fn close(a: &Mat2, b: &Mat2, tol: f64) -> bool {
        (*a - *b).max_abs() <= tol * b.max_abs().max(1.0)
    }

    #[test]
    fn eigen2_scalar_matrix_is_repeated() {
        let s = eigen2(&Mat2::scalar(-1.0));
        assert_eq!(s.kind, SpectrumKind::RealRepeated);
        assert_eq!(s.eigenvalues, Eigenvalues::Real([-1.0, -1.0]));
        assert!(s.eigen_angles.is_some());
    }

    #[test]
    fn eigen2_example1_average() {
        let (a0, a1) = ex1(2.0);
        let avg = convex_combination(&a0, &a1, 0.5).unwrap();
        let s = eigen2(&avg);
        assert_eq!(s.kind, SpectrumKind::RealDistinct);
        let Eigenvalues::Real([lo, hi]) = s.eigenvalues else {
            panic!()
        };
        assert!((lo + 3.0).abs() < 1e-14 && (hi - 1.0).abs() < 1e-14);
        let [th_lo, th_hi] = s.eigen_angles.unwrap();
        assert!((th_hi - PI / 4.0).abs() < 1e-14);
        assert!((th_lo - 3.0 * PI / 4.0).abs() < 1e-14);
    }

    #[test]
    fn eigen2_example2_complex() {
        let (a0, _) = ex2(1.0, 3.0);
        let s = eigen2(&a0);
        assert_eq!(s.kind, SpectrumKind::ComplexPair);
        let Eigenvalues::Complex { re, im } = s.eigenvalues else {
            panic!()
        };
        assert!((re + 1.0).abs() < 1e-15 && (im - 1.0).abs() < 1e-14);
        assert!(s.eigen_angles.is_none());
    }

    #[test]
    fn eigen2_defective_jordan_block() {
        let (a0, _) = ex1(2.0);
        let s = eigen2(&a0);
        assert_eq!(s.kind, SpectrumKind::RealRepeated);
        assert_eq!(s.eigen_angles, Some([0.0, 0.0]));
    }

    #[test]
    fn hurwitz_examples() {
        assert!(is_hurwitz(&Mat2::scalar(-1.0)));
        let (a0, a1) = ex1(2.0);
        assert!(!is_hurwitz(&convex_combination(&a0, &a1, 0.5).unwrap()));
        assert!(!is_hurwitz(&Mat2::new(0.0, 1.0, -1.0, 0.0)));
    }

    #[test]
    fn convex_combination_cases() {
        let (a0, a1) = ex2(1.0, 3.0);
        assert_eq!(convex_combination(&a0, &a1, 0.0).unwrap(), a0);
        let half = convex_combination(&a0, &a1, 0.5).unwrap();
        let off = (3.0 - 1.0 / 3.0) / 2.0;
        assert!(close(&half, &Mat2::new(-1.0, off, off, -1.0), 1e-15));
        let (j0, j1) = ex1(2.0);
        assert_eq!(
            convex_combination(&j0, &j1, 0.5).unwrap(),
            Mat2::new(-1.0, 2.0, 2.0, -1.0)
        );
        assert!(matches!(
            convex_combination(&a0, &a1, 1.5),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn criterion_examples() {
        let (a0, a1) = ex2(1.0, 3.0);
        let r = bbm_criterion(&a0, &a1).unwrap();
        assert!((r.lhs - (2.0 - (9.0 + 1.0 / 9.0))).abs() < 1e-12);
        assert!((r.rhs + 4.0).abs() < 1e-12);
        assert!(r.holds && !r.boundary);
        let (lo, hi) = r.lambda_window.unwrap();
        assert!(lo < 0.5 && 0.5 < hi);

        let (j0, j1) = ex1(2.0);
        let r = bbm_criterion(&j0, &j1).unwrap();
        assert!((r.lhs + 14.0).abs() < 1e-12 && (r.rhs + 2.0).abs() < 1e-12 && r.holds);

        let m = Mat2::scalar(-1.0);
        let r = bbm_criterion(&m, &m).unwrap();
        assert_eq!(
            (r.lhs, r.rhs, r.holds, r.lambda_window),
            (2.0, -2.0, false, None)
        );
    }

    #[test]
    fn criterion_rejects_non_hurwitz() {
        let bad = Mat2::diag(1.0, -1.0);
        let good = Mat2::scalar(-1.0);
        assert_eq!(
            bbm_criterion(&bad, &good),
            Err(Error::NotHurwitz("A0".into()))
        );
        assert_eq!(
            bbm_criterion(&good, &bad),
            Err(Error::NotHurwitz("A1".into()))
        );
    }

    #[test]
    fn window_scan_matches_quadratic_roots() {
        let (a0, a1) = ex1(2.0);
        let (lo, hi) = lambda_window_scan(&a0, &a1, 1000).unwrap().unwrap();
        // Roots of λ(1 − λ) = 1/(4b²).
        let r = (1.0 - (1.0f64 - 4.0 / 16.0).sqrt()) / 2.0;
        assert!((lo - r).abs() < 1e-12 && (hi - (1.0 - r)).abs() < 1e-12);
        assert!((lo - 0.0670).abs() < 1e-4);
        let m = Mat2::new(-2.0, 1.0, 0.0, -1.0);
        assert_eq!(lambda_window_scan(&m, &m, 100).unwrap(), None);
        let (b0, b1) = ex2(1.0, 3.0);
        let (lo, hi) = lambda_window_scan(&b0, &b1, 100).unwrap().unwrap();
        assert!(lo < 0.5 && 0.5 < hi);
    }

    #[test]
    fn expm_zero_time_is_identity() {
        let (a0, _) = ex2(1.0, 3.0);
        assert_eq!(expm2(&a0, 0.0), Mat2::identity());
    }

    #[test]
    fn expm_jordan_block() {
        let b = 2.0;
        let (a0, _) = ex1(b);
        for &s in &[1e-6, 0.3, 1.0, 4.0] {
            let want = Mat2::new(1.0, 2.0 * b * s, 0.0, 1.0) * (-s).exp();
            assert!(close(&expm2(&a0, s), &want, 1e-14));
            assert!(close(&expm_series(&a0, s), &want, 1e-13));
        }
    }

    #[test]
    fn expm_rotation_family() {
        let (a, b) = (1.3, 3.0);
        let (a0, _) = ex2(a, b);
        for &t in &[1e-7, 0.5, 2.0, 5.0] {
            let (c, s) = ((a * t).cos(), (a * t).sin());
            let want = Mat2::new(c, b * s, -s / b, c) * (-t).exp();
            assert!(close(&expm2(&a0, t), &want, 1e-13));
        }
    }

    #[test]
    fn expm_large_hyperbolic_argument() {
        let a = Mat2::new(0.0, 30.0, 30.0, 0.0);
        let e = expm2(&a, 2.0);
        let want = Mat2::new(60f64.cosh(), 60f64.sinh(), 60f64.sinh(), 60f64.cosh());
        assert!(close(&e, &want, 1e-13));
    }

    #[test]
    fn lyapunov_examples() {
        let m = solve_lyapunov(&Mat2::scalar(-1.0), &Mat2::identity()).unwrap();
        assert!(close(&m, &Mat2::scalar(0.5), 1e-15));
        let m = solve_lyapunov(&Mat2::diag(-1.0, -2.0), &Mat2::identity()).unwrap();
        assert!(close(&m, &Mat2::diag(0.5, 0.25), 1e-15));
    }

    #[test]
    fn lyapunov_jordan_block_against_direct_solve() {
        // A = [[-1, 2], [0, -1]]: entries solve
        //   -2 m11 = -1, 2 m11 - 2 m12 = 0, 4 m12 - 2 m22 = -1.
        let (a0, _) = ex1(1.0);
        let m = solve_lyapunov(&a0, &Mat2::identity()).unwrap();
        assert!(close(&m, &Mat2::new(0.5, 0.5, 0.5, 1.5), 1e-14));
        let res = a0.transpose() * m + m * a0 + Mat2::identity();
        assert!(res.max_abs() < 1e-14);
        assert!(m.is_positive_definite());
    }

    #[test]
    fn lyapunov_rejects_bad_inputs() {
        assert!(matches!(
            solve_lyapunov(&Mat2::diag(1.0, -1.0), &Mat2::identity()),
            Err(Error::NotHurwitz(_))
        ));
        assert!(matches!(
            solve_lyapunov(&Mat2::scalar(-1.0), &Mat2::diag(1.0, -1.0)),
            Err(Error::NotSpd(_))
        ));
    }

    #[test]
    fn op_norm_matches_singular_values() {
        let a = Mat2::new(1.0, 2.0, 3.0, 4.0);
        let ata = a.transpose() * a;
        let want = ata.sym_eigenvalues()[1].sqrt();
        assert!((a.op_norm() - want).abs() < 1e-13);
    }
}
