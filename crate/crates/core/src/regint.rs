//! Gaussian-regularized half-line integrals
//! `J(k, λ) = ∫₀^∞ e^{−λx²} e^{ikx} dx` and their `λ → 0` prescription `I(k)`.

use errorfunctions::ComplexErrorFunctions;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Value of the prescription `I(k) = lim_{λ→0} J(k, λ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag")]
pub enum RegIntValue {
    /// `i/k`, for `k` strictly inside the convergence region.
    Finite { value: Complex64 },
    Divergent,
    /// Real `k ≠ 0`: `I(k) = pv_coeff·PV(1/k) + delta_coeff·δ(k)`.
    Distribution { k: f64, pv_coeff: Complex64, delta_coeff: f64 },
}

impl RegIntValue {
    pub fn label(&self) -> &'static str {
        match self {
            RegIntValue::Finite { .. } => "Finite",
            RegIntValue::Divergent => "Divergent",
            RegIntValue::Distribution { .. } => "Distribution",
        }
    }
}

/// `exp(w)` that saturates to signed infinities instead of producing NaN.
fn exp_saturating(w: Complex64) -> Complex64 {
    if w.re < 700.0 {
        return w.exp();
    }
    let (s, c) = w.im.sin_cos();
    let part = |t: f64| if t == 0.0 { 0.0 } else { f64::INFINITY.copysign(t) };
    Complex64::new(part(c), part(s))
}

/// Faddeeva function `w(z) = e^{−z²} erfc(−iz)`, finite wherever the
/// result is representable and saturating to infinity otherwise.
pub fn faddeeva(z: Complex64) -> Complex64 {
    if z.im >= 0.0 {
        z.w()
    } else {
        2.0 * exp_saturating(-z * z) - (-z).w()
    }
}

/// `J(k, λ) = (√π / 2√λ)·w(k / 2√λ)`.
pub fn gaussian_j(k: Complex64, lambda: f64) -> Complex64 {
    assert!(lambda > 0.0, "lambda must be positive");
    let s = 2.0 * lambda.sqrt();
    let pref = PI.sqrt() / s;
    if k == Complex64::new(0.0, 0.0) {
        return Complex64::new(pref, 0.0);
    }
    pref * faddeeva(k / s)
}

/// True when `k` lies in the closed divergence wedge, i.e. `Im k < 0` and
/// `|Re k| ≤ |Im k|`. This is `arg k ∉ (−π/4, 5π/4)` with boundary rays
/// counted as divergent.
pub fn in_divergence_wedge(k: Complex64) -> bool {
    k.im < 0.0 && k.re.abs() <= -k.im
}

pub fn reg_i(k: Complex64) -> RegIntValue {
    if k == Complex64::new(0.0, 0.0) {
        return RegIntValue::Divergent;
    }
    if k.im == 0.0 {
        return RegIntValue::Distribution { k: k.re, pv_coeff: I, delta_coeff: PI };
    }
    if in_divergence_wedge(k) {
        RegIntValue::Divergent
    } else {
        RegIntValue::Finite { value: I / k }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WedgeClass {
    Convergent,
    Divergent,
}

/// Divergence wedge with apex `conj(z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wedge {
    pub apex: Complex64,
}

impl Wedge {
    pub fn of(z: Complex64) -> Self {
        Self { apex: z.conj() }
    }

    /// True when `z_prime` falls in the (closed) wedge.
    pub fn test(&self, z_prime: Complex64) -> bool {
        let k = z_prime - self.apex;
        k == Complex64::new(0.0, 0.0) || in_divergence_wedge(k)
    }
}

/// Wedge rule for background states: divergent iff `z' − z*` lies in the wedge.
pub fn wedge_classify(z: Complex64, z_prime: Complex64) -> WedgeClass {
    if Wedge::of(z).test(z_prime) {
        WedgeClass::Divergent
    } else {
        WedgeClass::Convergent
    }
}
