//! Globally adaptive Gauss–Kronrod (10/21) quadrature for vector integrands.
//!
//! The caller supplies breakpoints; intervals are bisected in order of their
//! error estimate until the total estimated error of every component is within
//! tolerance. Sharp features must be bracketed by breakpoints, since a single
//! 21-point rule cannot see a peak much narrower than its node spacing.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
];

/// Gauss weights for the odd-indexed Kronrod nodes.
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077958109831074,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-14,
            rel_tol: 1e-12,
            max_intervals: 20_000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult<const N: usize> {
    pub value: [f64; N],
    pub abs_error: [f64; N],
    pub intervals: usize,
}

struct Piece<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: [f64; N],
    absint: [f64; N],
    /// Largest error component, normalized by each component's tolerance.
    key: f64,
}

impl<const N: usize> PartialEq for Piece<N> {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}
impl<const N: usize> Eq for Piece<N> {}
impl<const N: usize> PartialOrd for Piece<N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<const N: usize> Ord for Piece<N> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.total_cmp(&other.key)
    }
}

type Rule<const N: usize> = ([f64; N], [f64; N], [f64; N]);

/// Returns (value, error estimate, integral of |f|) per component.
fn gk21<const N: usize, F: Fn(f64) -> [f64; N]>(f: &F, a: f64, b: f64) -> Rule<N> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = [0.0; N];
    let mut gauss = [0.0; N];
    let mut res_abs = [0.0; N];
    for j in 0..N {
        kron[j] = fc[j] * WGK[10];
        res_abs[j] = (fc[j] * WGK[10]).abs();
    }
    let mut samples = [([0.0; N], [0.0; N]); 10];
    for (k, sample) in samples.iter_mut().enumerate() {
        let dx = h * XGK[k];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        for j in 0..N {
            let s = f1[j] + f2[j];
            kron[j] += WGK[k] * s;
            res_abs[j] += WGK[k] * (f1[j].abs() + f2[j].abs());
            if k % 2 == 1 {
                gauss[j] += WG[k / 2] * s;
            }
        }
        *sample = (f1, f2);
    }
    let mut value = [0.0; N];
    let mut error = [0.0; N];
    let mut absint = [0.0; N];
    for j in 0..N {
        let mean = 0.5 * kron[j];
        let mut asc = WGK[10] * (fc[j] - mean).abs();
        for (k, (f1, f2)) in samples.iter().enumerate() {
            asc += WGK[k] * ((f1[j] - mean).abs() + (f2[j] - mean).abs());
        }
        let asc = asc * h.abs();
        let abs = res_abs[j] * h.abs();
        value[j] = kron[j] * h;
        let mut err = ((kron[j] - gauss[j]) * h).abs();
        if asc != 0.0 && err != 0.0 {
            err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
        }
        if abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
            err = err.max(50.0 * f64::EPSILON * abs);
        }
        error[j] = err;
        absint[j] = abs;
    }
    (value, error, absint)
}

/// Per-component tolerance. The last term keeps components whose value cancels
/// to near zero from chasing an error below the rounding floor of the rule.
fn tolerance<const N: usize>(
    total: &[f64; N],
    absint: &[f64; N],
    cfg: &QuadConfig,
    scales: Option<&[f64; N]>,
) -> [f64; N] {
    let mut tol = [0.0; N];
    for j in 0..N {
        tol[j] = cfg
            .abs_tol
            .max(cfg.rel_tol * total[j].abs())
            .max(100.0 * f64::EPSILON * absint[j]);
        if let Some(sc) = scales {
            tol[j] = tol[j].max(cfg.rel_tol * sc[j] * total[0].abs());
        }
    }
    tol
}

fn normalized_key<const N: usize>(err: &[f64; N], tol: &[f64; N]) -> f64 {
    err.iter().zip(tol).map(|(e, t)| e / t).fold(0.0, f64::max)
}

/// Integrate `f` over `[breaks[0], breaks[last]]`, splitting first at every
/// breakpoint. Breakpoints must be sorted ascending.
pub fn integrate<const N: usize, F>(f: F, breaks: &[f64], cfg: &QuadConfig) -> Result<QuadResult<N>>
where
    F: Fn(f64) -> [f64; N],
{
    integrate_impl(f, breaks, cfg, None)
}

/// As [`integrate`], but component `j` is also accepted once its error is below
/// `rel_tol * scales[j] * |value[0]|`. Meant for ratios against a normalizer
/// held in component 0, where the other components may cancel to zero.
pub fn integrate_relative_to_first<const N: usize, F>(
    f: F,
    breaks: &[f64],
    cfg: &QuadConfig,
    scales: [f64; N],
) -> Result<QuadResult<N>>
where
    F: Fn(f64) -> [f64; N],
{
    integrate_impl(f, breaks, cfg, Some(&scales))
}

fn integrate_impl<const N: usize, F>(
    f: F,
    breaks: &[f64],
    cfg: &QuadConfig,
    scales: Option<&[f64; N]>,
) -> Result<QuadResult<N>>
where
    F: Fn(f64) -> [f64; N],
{
    if breaks.len() < 2 || breaks.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Quadrature(
            "breakpoints must be strictly increasing".into(),
        ));
    }
    let mut heap = BinaryHeap::new();
    let mut total = [0.0; N];
    let mut total_err = [0.0; N];
    let mut total_abs = [0.0; N];
    for w in breaks.windows(2) {
        let (v, e, m) = gk21(&f, w[0], w[1]);
        for j in 0..N {
            total[j] += v[j];
            total_err[j] += e[j];
            total_abs[j] += m[j];
        }
        heap.push(Piece {
            a: w[0],
            b: w[1],
            value: v,
            error: e,
            absint: m,
            key: 0.0,
        });
    }
    let rekey = |heap: BinaryHeap<Piece<N>>, tol: &[f64; N]| -> BinaryHeap<Piece<N>> {
        heap.into_iter()
            .map(|mut p| {
                p.key = normalized_key(&p.error, tol);
                p
            })
            .collect()
    };
    let mut tol = tolerance(&total, &total_abs, cfg, scales);
    heap = rekey(heap, &tol);

    let mut steps = 0usize;
    while normalized_key(&total_err, &tol) > 1.0 {
        if heap.len() >= cfg.max_intervals {
            return Err(Error::Quadrature(format!(
                "interval budget {} exhausted, error {:?} vs tolerance {:?}",
                cfg.max_intervals, total_err, tol
            )));
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // Interval cannot be split further in floating point.
            heap.push(Piece { key: 0.0, ..worst });
            if heap.iter().all(|p| p.key == 0.0) {
                break;
            }
            continue;
        }
        let (v1, e1, m1) = gk21(&f, worst.a, mid);
        let (v2, e2, m2) = gk21(&f, mid, worst.b);
        for j in 0..N {
            total[j] += v1[j] + v2[j] - worst.value[j];
            total_err[j] += e1[j] + e2[j] - worst.error[j];
            total_abs[j] += m1[j] + m2[j] - worst.absint[j];
        }
        heap.push(Piece {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
            absint: m1,
            key: normalized_key(&e1, &tol),
        });
        heap.push(Piece {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
            absint: m2,
            key: normalized_key(&e2, &tol),
        });
        steps += 1;
        // Tolerances drift with the running total; refresh the ordering now and then.
        if steps.is_multiple_of(64) {
            // Recompute sums from scratch to shed accumulated rounding.
            total = [0.0; N];
            total_err = [0.0; N];
            total_abs = [0.0; N];
            for p in heap.iter() {
                for j in 0..N {
                    total[j] += p.value[j];
                    total_err[j] += p.error[j];
                    total_abs[j] += p.absint[j];
                }
            }
            tol = tolerance(&total, &total_abs, cfg, scales);
            heap = rekey(heap, &tol);
        }
    }
    let mut value = [0.0; N];
    let mut abs_error = [0.0; N];
    for p in heap.iter() {
        for j in 0..N {
            value[j] += p.value[j];
            abs_error[j] += p.error[j];
        }
    }
    Ok(QuadResult {
        value,
        abs_error,
        intervals: heap.len(),
    })
}

/// Scalar convenience wrapper.
pub fn integrate_scalar<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    cfg: &QuadConfig,
) -> Result<(f64, f64)> {
    let r = integrate(|x| [f(x)], breaks, cfg)?;
    Ok((r.value[0], r.abs_error[0]))
}
