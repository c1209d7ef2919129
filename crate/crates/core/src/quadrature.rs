//! Globally adaptive 21-point Gauss–Kronrod quadrature for complex integrands.

use num_complex::Complex64;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

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

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208292293160,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadTolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for QuadTolerance {
    fn default() -> Self {
        Self { abs: 1e-12, rel: 1e-10, max_intervals: 200_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
    /// Integral of `|f|`, useful as a cancellation scale.
    pub magnitude: f64,
}

struct Piece {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    magnitude: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Piece {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[10];
    let mut g = Complex64::new(0.0, 0.0);
    let mut mag = fc.norm() * WGK[10];
    for i in 0..10 {
        let dx = h * XGK[i];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        k += (f1 + f2) * WGK[i];
        mag += (f1.norm() + f2.norm()) * WGK[i];
        if i % 2 == 1 {
            g += (f1 + f2) * WG[i / 2];
        }
    }
    let value = k * h;
    let error = ((k - g) * h).norm();
    Piece { a, b, value, error, magnitude: mag * h.abs() }
}

/// Integrates `f` over `[points[0], points[last]]`, starting from the
/// partition given by `points`.
pub fn integrate<F>(f: F, points: &[f64], tol: QuadTolerance) -> Result<Estimate>
where
    F: Fn(f64) -> Complex64,
{
    assert!(points.len() >= 2, "need at least one interval");
    let mut heap = BinaryHeap::new();
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut mag = 0.0;
    for w in points.windows(2) {
        let p = kronrod(&f, w[0], w[1]);
        total += p.value;
        err += p.error;
        mag += p.magnitude;
        heap.push(p);
    }
    let mut count = heap.len();
    loop {
        if !(total.re.is_finite() && total.im.is_finite()) {
            return Err(Error::QuadratureFailure { achieved: f64::INFINITY, requested: tol.abs });
        }
        // Below ~50ε·∫|f| the error estimate is roundoff and splitting cannot help.
        let target = tol.abs.max(tol.rel * total.norm()).max(50.0 * f64::EPSILON * mag);
        if err <= target {
            return Ok(Estimate { value: total, error: err, magnitude: mag });
        }
        if count >= tol.max_intervals {
            return Err(Error::QuadratureFailure { achieved: err, requested: target });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval can no longer be split in floating point.
            return Err(Error::QuadratureFailure { achieved: err, requested: target });
        }
        let l = kronrod(&f, worst.a, mid);
        let r = kronrod(&f, mid, worst.b);
        total += l.value + r.value - worst.value;
        err += l.error + r.error - worst.error;
        mag += l.magnitude + r.magnitude - worst.magnitude;
        heap.push(l);
        heap.push(r);
        count += 1;
    }
}

/// Evenly spaced breakpoints with spacing at most `h`.
pub fn uniform_points(a: f64, b: f64, h: f64) -> Vec<f64> {
    let n = (((b - a) / h).ceil() as usize).max(1);
    (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let e = integrate(
            |x| Complex64::new(x.powi(9), 3.0 * x * x),
            &[0.0, 2.0],
            QuadTolerance::default(),
        )
        .unwrap();
        assert!((e.value.re - 102.4).abs() < 1e-11);
        assert!((e.value.im - 8.0).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_exponential() {
        let k = Complex64::new(7.0, 0.3);
        let i = Complex64::new(0.0, 1.0);
        let e = integrate(|x| (i * k * x).exp(), &uniform_points(0.0, 5.0, 0.5), QuadTolerance::default())
            .unwrap();
        let exact = ((i * k * 5.0).exp() - 1.0) / (i * k);
        assert!((e.value - exact).norm() < 1e-12);
    }

    #[test]
    fn endpoint_singularity_converges() {
        let e = integrate(|x| Complex64::new(x.sqrt(), 0.0), &[0.0, 1.0], QuadTolerance::default())
            .unwrap();
        assert!((e.value.re - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn non_finite_integrand_fails() {
        let r = integrate(|_| Complex64::new(f64::NAN, 0.0), &[0.0, 1.0], QuadTolerance::default());
        assert!(matches!(r, Err(Error::QuadratureFailure { .. })));
    }
}
