//! Brute-force verifiers: Gaussian-regularized quadrature of products,
//! direct norms, and the finite-square-well bound-state conditions.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::products::StateRef;
use crate::quadrature::{integrate, uniform_points, QuadTolerance};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `ln(1e32)` rounded up; the Gaussian envelope margin used for truncation.
pub const ENVELOPE_MARGIN: f64 = 73.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Strictly decreasing, positive.
    pub lambda_sequence: Vec<f64>,
    pub envelope_margin: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            lambda_sequence: (1..=8).map(|e| 10f64.powi(-e)).collect(),
            envelope_margin: ENVELOPE_MARGIN,
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_intervals: 2_000_000,
        }
    }
}

impl QuadratureConfig {
    pub fn with_lambdas(lambdas: Vec<f64>) -> Result<Self> {
        let cfg = Self { lambda_sequence: lambdas, ..Self::default() };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let l = &self.lambda_sequence;
        if l.is_empty() || l.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
            return Err(Error::InvalidConfig("lambda sequence must be non-empty and positive".into()));
        }
        if l.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidConfig("lambda sequence must be strictly decreasing".into()));
        }
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::InvalidConfig("tolerances must be positive".into()));
        }
        Ok(())
    }

    /// Sequence suited to the pair: pairs with an exterior term that grows
    /// along every admissible ray keep `g²/4λ ≤ 20` so the peak `e^{g²/4λ}`
    /// stays representable.
    pub fn for_pair(a: &StateRef, b: &StateRef) -> Self {
        let g = exterior_terms(a, b).iter().map(|t| best_ray(t.k).1.max(0.0)).fold(0.0, f64::max);
        if g > 0.0 {
            let lambdas = [1.0, 2.0, 4.0, 7.0, 10.0, 14.0, 20.0].iter().map(|s| g * g / (4.0 * s)).collect();
            Self { lambda_sequence: lambdas, ..Self::default() }
        } else {
            Self::default()
        }
    }
}

/// Exterior piece `coefficient·∫_{x0}^∞ e^{ikx − λx²} dx`; left-side terms are
/// mirrored onto the positive half line.
struct RayTerm {
    coefficient: Complex64,
    k: Complex64,
    x0: f64,
}

fn exterior_terms(a: &StateRef, b: &StateRef) -> Vec<RayTerm> {
    let (ea, eb) = (a.exterior(), b.exterior());
    let length = a.potential().length();
    let sign = [1.0, -1.0];
    let mut out = Vec::new();
    for s in 0..2 {
        for r in 0..2 {
            let kappa = sign[r] * b.z - sign[s] * a.z.conj();
            let cl = ea.left[s].conj() * eb.left[r];
            let cr = ea.right[s].conj() * eb.right[r];
            if cl != Complex64::new(0.0, 0.0) {
                out.push(RayTerm { coefficient: cl, k: -kappa, x0: 0.0 });
            }
            if cr != Complex64::new(0.0, 0.0) {
                out.push(RayTerm { coefficient: cr, k: kappa, x0: length });
            }
        }
    }
    out
}

/// Ray angle `θ` with `|θ| < π/4` (so the Gaussian still dominates at
/// infinity) along which `e^{ikx}` decays, and the resulting rate of
/// `|e^{ikx}|` per unit length. Falls back to the real axis when no such
/// angle exists.
fn best_ray(k: Complex64) -> (f64, f64) {
    let rate = |th: f64| -(k * Complex64::from_polar(1.0, th)).im;
    if k.norm() == 0.0 {
        return (0.0, 0.0);
    }
    // |e^{ikx}| decays along arg x = θ iff arg k + θ ∈ (0, π).
    let phi = k.arg();
    let quarter = std::f64::consts::FRAC_PI_4;
    let two_pi = 2.0 * std::f64::consts::PI;
    let Some((lo, hi)) = [0.0, -two_pi, two_pi]
        .iter()
        .map(|off| ((-phi + off).max(-quarter), (std::f64::consts::PI - phi + off).min(quarter)))
        .find(|(lo, hi)| lo < hi)
    else {
        return (0.0, rate(0.0));
    };
    let th = 0.5 * (lo + hi);
    (th, rate(th))
}

/// `∫_{x0}^∞ e^{ikx − λx²} dx` along `x = x0 + t·e^{iθ}`. Equal to the
/// real-line integral because the Gaussian vanishes on the closing arc.
fn ray_integral(k: Complex64, x0: f64, lambda: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
    let (theta, rate) = best_ray(k);
    let u = Complex64::from_polar(1.0, theta);
    let damp = lambda * (2.0 * theta).cos();
    let mut t_max = truncation(rate.max(0.0), damp, cfg.envelope_margin);
    if rate < 0.0 {
        t_max = t_max.min(0.5 * cfg.envelope_margin / -rate);
    }
    let f = |t: f64| {
        let x = x0 + t * u;
        u * (I * k * x - lambda * x * x).exp()
    };
    let freq = (k * u).re.abs();
    let h = 4.0 * std::f64::consts::PI / (freq + 0.5);
    let points = uniform_points(0.0, t_max, h.min(t_max));
    let coarse = QuadTolerance { abs: 0.0, rel: 1e-3, max_intervals: cfg.max_intervals };
    let magnitude = integrate(|t| Complex64::new(f(t).norm(), 0.0), &points, coarse)?.value.re;
    let tol = QuadTolerance {
        abs: cfg.abs_tol.max(1e-14 * magnitude),
        rel: cfg.rel_tol,
        max_intervals: cfg.max_intervals,
    };
    Ok(integrate(f, &points, tol)?.value)
}

/// Truncation point where the Gaussian beats growth rate `g` by the margin.
pub fn truncation(g: f64, lambda: f64, margin: f64) -> f64 {
    (g + (g * g + margin * lambda).sqrt()) / lambda
}

/// `∫ e^{−λx²} Φ_a*(x) Φ_b(x) dx` over the real line. The interior is
/// integrated directly; each exterior exponential term along its own ray.
pub fn regularized_product(a: &StateRef, b: &StateRef, lambda: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
    if a.potential() != b.potential() {
        return Err(Error::SamePotentialRequired);
    }
    let (sa, sb) = (a.solution(), b.solution());
    let tol = QuadTolerance { abs: cfg.abs_tol, rel: cfg.rel_tol, max_intervals: cfg.max_intervals };
    let mut total = integrate(
        |x| sa.eval(x).conj() * sb.eval(x) * (-lambda * x * x).exp(),
        &a.potential().edges(),
        tol,
    )?
    .value;
    for t in exterior_terms(a, b) {
        total += t.coefficient * ray_integral(t.k, t.x0, lambda, cfg)?;
    }
    Ok(total)
}

pub fn numeric_product(a: &StateRef, b: &StateRef, cfg: &QuadratureConfig) -> Result<Vec<(f64, Complex64)>> {
    cfg.validate()?;
    cfg.lambda_sequence
        .par_iter()
        .map(|&l| regularized_product(a, b, l, cfg).map(|v| (l, v)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Trend {
    /// Limit is zero.
    Decay,
    /// Finite nonzero limit, extrapolated to `λ = 0`.
    Converge(Complex64),
    Growth,
}

/// Extrapolates `v(λ)` to `λ = 0` through the last three samples.
pub fn richardson(seq: &[(f64, Complex64)]) -> Complex64 {
    let n = seq.len();
    let pts = &seq[n.saturating_sub(3)..];
    let mut lim = Complex64::new(0.0, 0.0);
    for (i, (li, vi)) in pts.iter().enumerate() {
        let mut w = 1.0;
        for (j, (lj, _)) in pts.iter().enumerate() {
            if i != j {
                w *= lj / (lj - li);
            }
        }
        lim += vi * w;
    }
    lim
}

/// Trend of a λ-sequence: growth by more than `1e3` or like at least
/// `λ^{-1/4}` over the last two steps, decay faster than `λ^{1/2}` or to a
/// negligible extrapolated limit, otherwise convergence.
pub fn classify_trend(seq: &[(f64, Complex64)]) -> Trend {
    let n = seq.len();
    let first = seq[0].1.norm();
    let last = seq[n - 1].1.norm();
    let slope = |i: usize| (seq[i].1.norm() / seq[i - 1].1.norm()).ln() / (seq[i - 1].0 / seq[i].0).ln();
    if last > 1e3 * first || (n >= 3 && slope(n - 1) >= 0.25 && slope(n - 2) >= 0.25) {
        return Trend::Growth;
    }
    let span = seq[0].0 / seq[seq.len() - 1].0;
    let peak = seq.iter().map(|(_, v)| v.norm()).fold(0.0, f64::max);
    let lim = richardson(seq);
    if last < peak * span.powf(-0.5) || lim.norm() < 1e-9 * peak {
        Trend::Decay
    } else {
        Trend::Converge(lim)
    }
}

/// `√(⟨a|a⟩_λ ⟨b|b⟩_λ)` at the given λ, the Cauchy–Schwarz bound of `|⟨a|b⟩_λ|`.
pub fn cauchy_schwarz_scale(a: &StateRef, b: &StateRef, lambda: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let na = regularized_product(a, a, lambda, cfg)?.re;
    let nb = regularized_product(b, b, lambda, cfg)?.re;
    Ok((na * nb).sqrt())
}

/// `∫|Φ|²` of a bound state: adaptive quadrature over `[0, L]` plus the
/// exponential tails integrated in closed form.
pub fn direct_norm(a: &StateRef) -> Result<f64> {
    let sol = a.solution();
    let pot = a.potential();
    let tol = QuadTolerance { abs: 0.0, rel: 1e-13, max_intervals: 100_000 };
    let interior = integrate(|x| Complex64::new(sol.eval(x).norm_sqr(), 0.0), &pot.edges(), tol)?.value.re;
    let mut tails = Complex64::new(0.0, 0.0);
    for t in exterior_terms(a, a) {
        if t.k.im <= 0.0 {
            return Err(Error::NotBound);
        }
        tails += t.coefficient * (I * t.k * t.x0).exp() * I / t.k;
    }
    Ok(interior + tails.re)
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Bound-state decay constants `q` of a square well of depth `|v|` and width
/// `l`, from the even and odd matching conditions of the centred well.
/// Ascending.
pub fn square_well_bound_oracle(mass: f64, v: f64, l: f64) -> Vec<f64> {
    assert!(v < 0.0 && mass > 0.0 && l > 0.0, "need a well");
    let big_k = (2.0 * mass * -v).sqrt();
    let a = 0.5 * l;
    let q = |k: f64| (big_k * big_k - k * k).max(0.0).sqrt();
    let even = |k: f64| k * (k * a).tan() - q(k);
    let odd = |k: f64| -k / (k * a).tan() - q(k);
    let half_pi = 0.5 * std::f64::consts::PI;
    let mut out = Vec::new();
    let mut n = 0;
    loop {
        let lo = n as f64 * half_pi / a;
        if lo >= big_k {
            break;
        }
        let hi = ((n + 1) as f64 * half_pi / a).min(big_k);
        let f: &dyn Fn(f64) -> f64 = if n % 2 == 0 { &even } else { &odd };
        let eps = 1e-15 * big_k;
        let (l0, h0) = (lo + eps, hi - eps);
        if h0 > l0 && f(l0) < 0.0 && f(h0) > 0.0 {
            out.push(q(bisect(f, l0, h0)));
        }
        n += 1;
    }
    out.sort_by(f64::total_cmp);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{square_denominators, Family, PotentialSpec};
    use crate::products::{bound_norm, master_inner_product, Tag};
    use crate::spectrum::{find_spectrum, SearchRegion};

    #[test]
    fn square_well_counts_and_roots() {
        let q = square_well_bound_oracle(1.0, -8.0, 1.0);
        assert_eq!(q.len(), 2);
        for qi in &q {
            let (dp, _) = square_denominators(1.0, -8.0, 1.0, Complex64::new(0.0, *qi));
            assert!(dp.norm() < 1e-8, "{qi}: {dp}");
        }
        assert_eq!(square_well_bound_oracle(1.0, -1e-4, 1.0).len(), 1);
        for (v, l) in [(-3.0, 2.0), (-20.0, 1.5), (-50.0, 0.7)] {
            let bound = ((l * (2.0f64 * -v).sqrt()) / std::f64::consts::PI).ceil() as usize;
            assert_eq!(square_well_bound_oracle(1.0, v, l).len(), bound);
        }
    }

    #[test]
    fn lambda_sequence_validation() {
        assert!(QuadratureConfig::with_lambdas(vec![0.1, 0.01]).is_ok());
        assert!(QuadratureConfig::with_lambdas(vec![0.01, 0.1]).is_err());
        assert!(QuadratureConfig::with_lambdas(vec![0.1, -0.01]).is_err());
        assert!(QuadratureConfig::with_lambdas(vec![]).is_err());
    }

    #[test]
    fn richardson_is_exact_for_quadratics() {
        let seq: Vec<_> = [0.3, 0.1, 0.05]
            .iter()
            .map(|&l| (l, Complex64::new(2.0 + 3.0 * l - l * l, -1.0 + l)))
            .collect();
        assert!((richardson(&seq) - Complex64::new(2.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn bound_pair_and_norm() {
        let pot = PotentialSpec::square(1.0, -8.0, 1.0).unwrap();
        let r = SearchRegion::new(-0.3, 0.2, 0.01, 6.0).unwrap();
        let sp = find_spectrum(&pot, Family::IN, &r).unwrap();
        let s: Vec<_> = sp.iter().enumerate().map(|(i, p)| StateRef::discrete(&pot, p, i + 1).unwrap()).collect();
        let cfg = QuadratureConfig::default();
        let seq = numeric_product(&s[0], &s[1], &cfg).unwrap();
        assert!(seq.last().unwrap().1.norm() < 1e-6);
        assert_eq!(master_inner_product(&s[0], &s[1]).unwrap().tag(), Tag::Zero);
        let norm = bound_norm(&s[0]).unwrap();
        assert!((direct_norm(&s[0]).unwrap() - norm).abs() < 1e-9 * norm);
        let seq = numeric_product(&s[0], &s[0], &cfg).unwrap();
        assert!((seq.last().unwrap().1.re - norm).abs() < 1e-6 * norm);
    }

    #[test]
    fn resonance_self_product_blows_up() {
        let pot = PotentialSpec::from_pairs(1.0, &[(1.0, 0.5), (1.5, -4.0), (1.0, 0.5)]).unwrap();
        let r = SearchRegion::new(1.0, 2.5, -1.0, -0.1).unwrap();
        let sp = find_spectrum(&pot, Family::IN, &r).unwrap();
        let z = StateRef::discrete(&pot, &sp[0], 1).unwrap();
        let cfg = QuadratureConfig::for_pair(&z, &z);
        let seq = numeric_product(&z, &z, &cfg).unwrap();
        assert!(seq.last().unwrap().1.norm() / seq[0].1.norm() > 1e3);
        assert_eq!(classify_trend(&seq), Trend::Growth);
    }
}
