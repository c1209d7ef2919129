//! Master Inner Product of any two states over the same potential.
//!
//! Each state is represented by its exterior coefficients on both sides of
//! `[0, L]` plus its interior solution. The half-line pieces become
//! regularized integrals `I(k)`, the interior piece comes from the boundary
//! Wronskian (or an exact per-segment overlap when `z_a*² = z_b²`).

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::potential::{
    amplitudes, Amplitudes, Boundary, ExteriorForm, Family, MasterSolution,
    PotentialSpec, SegmentForm,
};
use crate::quadrature::{integrate, QuadTolerance};
use crate::regint::{reg_i, RegIntValue, Wedge};
use crate::spectrum::{boundary_data, boundary_data_dz, Kind, SpectralPoint};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "index")]
pub enum StateKind {
    Bound(usize),
    AntiBound(usize),
    Resonance(usize),
    AntiResonance(usize),
    IncomingResonance(usize),
    Scattering(f64),
    Background,
}

impl StateKind {
    pub fn is_discrete(&self) -> bool {
        !matches!(self, StateKind::Scattering(_) | StateKind::Background)
    }
}

/// A state of the potential: a Master Solution at momentum `z`, possibly
/// rescaled, with the incident term removed for discrete states.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateRef {
    pub kind: StateKind,
    pub label: String,
    pub z: Complex64,
    pub amplitudes: Amplitudes,
    /// Overall factor applied to the Master Solution.
    pub scale: Complex64,
    #[serde(skip)]
    potential: PotentialSpec,
}

impl StateRef {
    /// Discrete state at a located zero of `D`. `index` is the 1-based
    /// ordinal within its kind.
    pub fn discrete(pot: &PotentialSpec, sp: &SpectralPoint, index: usize) -> Result<Self> {
        let amps = amplitudes(pot, sp.z, sp.family)?;
        let kind = match (sp.kind, sp.family.bc) {
            (Kind::Bound, _) => StateKind::Bound(index),
            (Kind::AntiBound, _) => StateKind::AntiBound(index),
            (Kind::Resonance, Boundary::In) => StateKind::Resonance(index),
            (Kind::Resonance, Boundary::Out) => StateKind::IncomingResonance(index),
            (Kind::AntiResonance, _) => StateKind::AntiResonance(index),
        };
        let label = match kind {
            StateKind::Bound(i) => format!("phi{i}"),
            StateKind::AntiBound(i) => format!("phi{i}'"),
            StateKind::Resonance(n) => format!("z{n}"),
            StateKind::AntiResonance(n) => format!("z-{n}"),
            StateKind::IncomingResonance(n) => format!("~z{n}"),
            _ => unreachable!(),
        };
        Ok(Self { kind, label, z: sp.z, amplitudes: amps, scale: Complex64::new(1.0, 0.0), potential: pot.clone() })
    }

    /// Scattering state of real momentum `p > 0`, normalized to `δ(E − E')`.
    pub fn scattering(pot: &PotentialSpec, p: f64, family: Family) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::InvalidConfig(format!("scattering momentum must be positive, got {p}")));
        }
        let z = Complex64::new(p, 0.0);
        let amps = amplitudes(pot, z, family)?;
        Ok(Self {
            kind: StateKind::Scattering(p),
            label: format!("E(p={p})"),
            z,
            amplitudes: amps,
            scale: 1.0 / amps.d,
            potential: pot.clone(),
        })
    }

    /// Unnormalized Master Solution at arbitrary complex `z`.
    pub fn background(pot: &PotentialSpec, z: Complex64, family: Family) -> Result<Self> {
        let amps = amplitudes(pot, z, family)?;
        Ok(Self {
            kind: StateKind::Background,
            label: format!("B({}{:+}i)", z.re, z.im),
            z,
            amplitudes: amps,
            scale: Complex64::new(1.0, 0.0),
            potential: pot.clone(),
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn potential(&self) -> &PotentialSpec {
        &self.potential
    }

    pub fn family(&self) -> Family {
        self.amplitudes.family
    }

    /// Bound state rescaled to unit norm.
    pub fn normalized(&self) -> Result<Self> {
        let norm = bound_norm(self)?;
        let mut out = self.clone();
        out.scale /= norm.sqrt();
        Ok(out)
    }

    pub fn exterior(&self) -> ExteriorForm {
        ExteriorForm::from_amplitudes(&self.amplitudes, self.potential.length(), self.kind.is_discrete())
            .scaled(self.scale)
    }

    pub fn solution(&self) -> MasterSolution {
        MasterSolution::from_exterior(&self.potential, self.exterior())
    }

    /// Exponential growth rate of `|Φ|` for `|x| → ∞` (negative when decaying).
    pub fn growth_rate(&self) -> f64 {
        let e = self.exterior();
        let z = self.z;
        let mut g = f64::NEG_INFINITY;
        // e^{±izx}: modulus e^{∓Im z·x}; left side x → −∞, right side x → +∞.
        for (c, rate) in [(e.left[0], z.im), (e.left[1], -z.im), (e.right[0], -z.im), (e.right[1], z.im)] {
            if c != Complex64::new(0.0, 0.0) {
                g = g.max(rate);
            }
        }
        g
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tag {
    Zero,
    FiniteValue,
    KroneckerDelta,
    DiracDelta,
    Divergent,
}

impl Tag {
    pub fn symbol(&self) -> &'static str {
        match self {
            Tag::Zero => "0",
            Tag::FiniteValue => "F",
            Tag::KroneckerDelta => "1",
            Tag::DiracDelta => "δ",
            Tag::Divergent => "∞",
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag")]
pub enum ProductValue {
    Zero,
    FiniteValue { value: Complex64 },
    /// Bound-state self product; `norm` is `⟨φ|φ⟩`.
    KroneckerDelta { norm: f64 },
    /// Coefficient of `δ(p − p')`; equals `m/p` for normalized states of one
    /// family, which is `δ(E − E')` with unit weight.
    DiracDelta { coefficient: Complex64 },
    /// Divergent through the term `I(k)`; `wedge` has apex `conj(z_a)` and
    /// `probe` is `z_b`.
    Divergent { wedge: Wedge, probe: Complex64, k: Complex64 },
}

impl ProductValue {
    pub fn tag(&self) -> Tag {
        match self {
            ProductValue::Zero => Tag::Zero,
            ProductValue::FiniteValue { .. } => Tag::FiniteValue,
            ProductValue::KroneckerDelta { .. } => Tag::KroneckerDelta,
            ProductValue::DiracDelta { .. } => Tag::DiracDelta,
            ProductValue::Divergent { .. } => Tag::Divergent,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

/// One half-line term `coefficient · I(k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub side: Side,
    pub k: Complex64,
    pub coefficient: Complex64,
    pub integral: RegIntValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Product {
    pub value: ProductValue,
    /// Assembled finite value before the zero test, when one exists.
    pub raw: Option<Complex64>,
    /// `|raw| / scale`.
    pub residual: f64,
    /// Largest magnitude among the assembled pieces.
    pub scale: f64,
    pub terms: Vec<Term>,
}

impl Product {
    pub fn tag(&self) -> Tag {
        self.value.tag()
    }
}

impl fmt::Display for Product {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value {
            ProductValue::Zero => write!(f, "Zero (residual {:.1e})", self.residual),
            ProductValue::FiniteValue { value } => write!(f, "FiniteValue {} {:+}i", value.re, value.im),
            ProductValue::KroneckerDelta { norm } => write!(f, "KroneckerDelta (norm {norm})"),
            ProductValue::DiracDelta { coefficient } => {
                write!(f, "DiracDelta (coefficient {} {:+}i)", coefficient.re, coefficient.im)
            }
            ProductValue::Divergent { wedge, probe, k } => write!(
                f,
                "Divergent (I(k) at k = {} {:+}i; wedge apex {} {:+}i, probe {} {:+}i)",
                k.re, k.im, wedge.apex.re, wedge.apex.im, probe.re, probe.im
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductConfig {
    /// Relative threshold below which an assembled finite value is Zero.
    pub zero_tol: f64,
    /// Momentum coincidence threshold for δ and norm detection.
    pub coincidence: f64,
    /// Half-line terms whose coefficient is below this fraction of the
    /// largest coefficient are dropped as round-off.
    pub negligible: f64,
}

impl Default for ProductConfig {
    fn default() -> Self {
        Self { zero_tol: 1e-9, coincidence: 1e-12, negligible: 1e-13 }
    }
}

fn half_line_terms(a: &StateRef, b: &StateRef, negligible: f64) -> Vec<Term> {
    let (ea, eb) = (a.exterior(), b.exterior());
    let (za, zb) = (a.z, b.z);
    let length = a.potential.length();
    let sign = [1.0, -1.0];
    let mut raw = Vec::with_capacity(8);
    for s in 0..2 {
        for t in 0..2 {
            // conj(e^{iσ z_a x}) e^{iτ z_b x} = e^{iκx}
            let kappa = sign[t] * zb - sign[s] * za.conj();
            raw.push((Side::Left, -kappa, ea.left[s].conj() * eb.left[t]));
            raw.push((Side::Right, kappa, ea.right[s].conj() * eb.right[t] * (I * kappa * length).exp()));
        }
    }
    let max = raw.iter().map(|r| r.2.norm()).fold(0.0, f64::max);
    raw.into_iter()
        .filter(|r| r.2.norm() > negligible * max && r.2 != Complex64::new(0.0, 0.0))
        .map(|(side, k, coefficient)| Term { side, k, coefficient, integral: reg_i(k) })
        .collect()
}

fn boundary_wronskian(a: &StateRef, b: &StateRef) -> (Complex64, Complex64) {
    let (ea, eb) = (a.exterior(), b.exterior());
    let length = a.potential.length();
    let w = |fa: (Complex64, Complex64), fb: (Complex64, Complex64)| fa.0.conj() * fb.1 - fb.0 * fa.1.conj();
    (
        w(ea.eval_left(0.0), eb.eval_left(0.0)),
        w(ea.eval_right(length), eb.eval_right(length)),
    )
}

fn energy_gap(a: &StateRef, b: &StateRef) -> (Complex64, f64) {
    let gap = a.z.conj().powi(2) - b.z.powi(2);
    (gap, gap.norm() / (a.z.norm_sqr() + b.z.norm_sqr()).max(1e-300))
}

/// `∫₀ᴸ Φ_a* Φ_b` from boundary data only, `[W(Φ_a*, Φ_b)]₀ᴸ / (z_a*² − z_b²)`.
pub fn wronskian_interior(a: &StateRef, b: &StateRef) -> Result<Complex64> {
    if a.potential != b.potential {
        return Err(Error::SamePotentialRequired);
    }
    let (gap, rel) = energy_gap(a, b);
    if rel < 1e-12 {
        return Err(Error::DegenerateEnergyPair);
    }
    let (w0, wl) = boundary_wronskian(a, b);
    Ok((wl - w0) / gap)
}

/// `∫₀^w e^{iκt} dt`.
fn segment_exponential(kappa: Complex64, w: f64) -> Complex64 {
    let u = I * kappa * w;
    if u.norm() < 1e-3 {
        let mut term = Complex64::new(w, 0.0);
        let mut sum = term;
        for n in 1..8 {
            term *= u / (n as f64 + 1.0);
            sum += term;
        }
        sum
    } else {
        (u.exp() - 1.0) / (I * kappa)
    }
}

/// `∫₀ᴸ Φ_a* Φ_b` by exact per-segment exponential integrals, valid for any pair.
pub fn exact_interior(a: &StateRef, b: &StateRef) -> Result<Complex64> {
    if a.potential != b.potential {
        return Err(Error::SamePotentialRequired);
    }
    let (sa, sb) = (a.solution(), b.solution());
    let (ia, ib) = (&sa.interior, &sb.interior);
    let mut total = Complex64::new(0.0, 0.0);
    for j in 0..ia.coefficients.len() {
        let w = ia.edges[j + 1] - ia.edges[j];
        match (ia.coefficients[j], ib.coefficients[j]) {
            (SegmentForm::Exponential { a: a1, b: b1 }, SegmentForm::Exponential { a: a2, b: b2 }) => {
                let (ka, kb) = (ia.local_momenta[j], ib.local_momenta[j]);
                for (ca, sa) in [(a1, 1.0), (b1, -1.0)] {
                    for (cb, sb) in [(a2, 1.0), (b2, -1.0)] {
                        let kappa = sb * kb - sa * ka.conj();
                        total += ca.conj() * cb * segment_exponential(kappa, w);
                    }
                }
            }
            _ => {
                let x0 = ia.edges[j];
                let tol = QuadTolerance { abs: 0.0, rel: 1e-13, max_intervals: 10_000 };
                total += integrate(|x| sa.eval(x).conj() * sb.eval(x), &[x0, x0 + w], tol)?.value;
            }
        }
    }
    Ok(total)
}

pub fn master_inner_product(a: &StateRef, b: &StateRef) -> Result<Product> {
    master_inner_product_with(a, b, &ProductConfig::default())
}

pub fn master_inner_product_with(a: &StateRef, b: &StateRef, cfg: &ProductConfig) -> Result<Product> {
    if a.potential != b.potential {
        return Err(Error::SamePotentialRequired);
    }
    let terms = half_line_terms(a, b, cfg.negligible);
    let same_z = (a.z - b.z).norm() <= cfg.coincidence * (1.0 + a.z.norm());

    if let (StateKind::Scattering(_), StateKind::Scattering(_)) = (a.kind, b.kind) {
        if same_z {
            let kzero = |t: &Term| t.k.norm() <= cfg.coincidence * (1.0 + a.z.norm());
            let coefficient: Complex64 = PI * terms.iter().filter(|t| kzero(t)).map(|t| t.coefficient).sum::<Complex64>();
            return Ok(Product {
                value: ProductValue::DiracDelta { coefficient },
                raw: None,
                residual: 0.0,
                scale: coefficient.norm(),
                terms,
            });
        }
    }

    if let Some(t) = terms.iter().find(|t| t.integral == RegIntValue::Divergent) {
        let value = ProductValue::Divergent { wedge: Wedge::of(a.z), probe: b.z, k: t.k };
        return Ok(Product { value, raw: None, residual: 0.0, scale: 0.0, terms });
    }

    let mut total = Complex64::new(0.0, 0.0);
    let mut scale: f64 = 0.0;
    for t in &terms {
        // Real k ≠ 0 contributes its principal value i/k; δ(k) vanishes there.
        let v = t.coefficient * I / t.k;
        scale = scale.max(v.norm());
        total += v;
    }
    let (gap, rel) = energy_gap(a, b);
    let interior = if rel < 1e-8 {
        exact_interior(a, b)?
    } else {
        let (w0, wl) = boundary_wronskian(a, b);
        scale = scale.max(w0.norm().max(wl.norm()) / gap.norm());
        (wl - w0) / gap
    };
    scale = scale.max(interior.norm());
    total += interior;

    let residual = total.norm() / scale.max(1e-300);
    let value = if residual < cfg.zero_tol {
        ProductValue::Zero
    } else if same_z && matches!((a.kind, b.kind), (StateKind::Bound(i), StateKind::Bound(j)) if i == j)
        && a.family() == b.family()
    {
        ProductValue::KroneckerDelta { norm: total.re }
    } else {
        ProductValue::FiniteValue { value: total }
    };
    Ok(Product { value, raw: Some(total), residual, scale, terms })
}

fn require_bound(a: &StateRef) -> Result<()> {
    let q = match a.family().bc {
        Boundary::In => a.z.im,
        Boundary::Out => -a.z.im,
    };
    if matches!(a.kind, StateKind::Bound(_)) && q > 0.0 {
        Ok(())
    } else {
        Err(Error::NotBound)
    }
}

/// `∫|Φ|²` over the real line of the two exterior tails.
fn tail_weight(a: &StateRef) -> f64 {
    half_line_terms(a, a, 0.0)
        .iter()
        .map(|t| (t.coefficient * I / t.k).re)
        .sum()
}

/// Norm of a bound state by the method of quadratures: the interior weight
/// follows from the boundary Wronskian of `Φ` with its momentum derivative,
/// the exterior tails are integrated analytically.
pub fn bound_norm(a: &StateRef) -> Result<f64> {
    require_bound(a)?;
    let (pot, z, fam) = (&a.potential, a.z, a.family());
    let u = boundary_data(pot, z, fam);
    let v = boundary_data_dz(pot, z, fam);
    let b = |u: Complex64, du: Complex64, v: Complex64, dv: Complex64| u.conj() * dv - v * du.conj();
    let delta_b = b(u[2], u[3], v[2], v[3]) - b(u[0], u[1], v[0], v[1]);
    // (z*² − z²)∫u*v − 2z∫|u|² = ΔB, and z*² = z² on the imaginary axis.
    let reduced_weight = (-delta_b / (2.0 * z)).re;
    let sol = a.solution();
    let s = if u[0].norm() >= u[2].norm() {
        sol.eval(0.0) / u[0]
    } else {
        sol.interior.eval(pot.length()).0 / u[2]
    };
    Ok(s.norm_sqr() * reduced_weight + tail_weight(a))
}

/// Norm obtained by doubling the exterior tail weight, i.e. assuming the
/// interior weight equals the exterior one. For a right-moving state this is
/// `(m/2πq²)(|R|² + |T|²e^{−2qL})`. Differs from [`bound_norm`] in general.
pub fn bound_norm_tail_doubling(a: &StateRef) -> Result<f64> {
    require_bound(a)?;
    Ok(2.0 * tail_weight(a))
}

/// Tag matrix and full products for an ordered list of states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductTable {
    pub labels: Vec<String>,
    pub cells: Vec<Vec<Product>>,
}

impl ProductTable {
    pub fn tags(&self) -> Vec<Vec<Tag>> {
        self.cells.iter().map(|row| row.iter().map(|c| c.tag()).collect()).collect()
    }
}

pub fn product_table(pot: &PotentialSpec, states: &[StateRef]) -> Result<ProductTable> {
    if states.iter().any(|s| &s.potential != pot) {
        return Err(Error::SamePotentialRequired);
    }
    let n = states.len();
    let flat: Vec<Result<Product>> = (0..n * n)
        .into_par_iter()
        .map(|idx| master_inner_product(&states[idx / n], &states[idx % n]))
        .collect();
    let mut cells = Vec::with_capacity(n);
    let mut it = flat.into_iter();
    for _ in 0..n {
        let row: Result<Vec<Product>> = it.by_ref().take(n).collect();
        cells.push(row?);
    }
    Ok(ProductTable { labels: states.iter().map(|s| s.label.clone()).collect(), cells })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{find_spectrum, SearchRegion};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn well() -> PotentialSpec {
        PotentialSpec::square(1.0, -8.0, 1.0).unwrap()
    }

    fn bound_states(pot: &PotentialSpec) -> Vec<StateRef> {
        let r = SearchRegion::new(-0.3, 0.2, 0.01, 9.0).unwrap();
        find_spectrum(pot, Family::IN, &r)
            .unwrap()
            .iter()
            .enumerate()
            .map(|(i, sp)| StateRef::discrete(pot, sp, i + 1).unwrap())
            .collect()
    }

    fn interior_quadrature(a: &StateRef, b: &StateRef) -> Complex64 {
        let (sa, sb) = (a.solution(), b.solution());
        let tol = QuadTolerance { abs: 0.0, rel: 1e-13, max_intervals: 10_000 };
        integrate(|x| sa.eval(x).conj() * sb.eval(x), &a.potential().edges(), tol).unwrap().value
    }

    #[test]
    fn bound_states_are_orthogonal() {
        let p = well();
        let b = bound_states(&p);
        let pr = master_inner_product(&b[0], &b[1]).unwrap();
        assert_eq!(pr.tag(), Tag::Zero);
        assert!(pr.residual < 1e-10);
    }

    #[test]
    fn wronskian_matches_closed_form_for_bound_pair() {
        let p = PotentialSpec::from_pairs(1.0, &[(0.4, -30.0), (0.6, -12.0)]).unwrap();
        let b = bound_states(&p);
        assert!(b.len() >= 2);
        let (qi, qj) = (b[0].z.im, b[1].z.im);
        let (ai, aj) = (b[0].amplitudes, b[1].amplitudes);
        let expect = -(1.0 / (qi + qj)) / (2.0 * PI) * (1.0 / (qi * qj).sqrt())
            * (ai.r.conj() * aj.r + ai.t.conj() * aj.t * (-(qi + qj)).exp());
        let got = wronskian_interior(&b[0], &b[1]).unwrap();
        assert!((got - expect).norm() < 1e-12 * expect.norm(), "{got} vs {expect}");
        assert_eq!(wronskian_interior(&b[0], &b[0]), Err(Error::DegenerateEnergyPair));
    }

    #[test]
    fn bound_norm_matches_quadrature() {
        let p = well();
        for s in bound_states(&p) {
            let direct = interior_quadrature(&s, &s).re + tail_weight(&s);
            let n = bound_norm(&s).unwrap();
            assert!((n - direct).abs() < 1e-8 * direct, "{n} vs {direct}");
            let kd = master_inner_product(&s, &s).unwrap();
            match kd.value {
                ProductValue::KroneckerDelta { norm } => assert!((norm - direct).abs() < 1e-10 * direct),
                other => panic!("{other:?}"),
            }
            let hat = s.normalized().unwrap();
            match master_inner_product(&hat, &hat).unwrap().value {
                ProductValue::KroneckerDelta { norm } => assert!((norm - 1.0).abs() < 1e-8),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn tail_doubling_formula_is_the_closed_form() {
        let p = well();
        for s in bound_states(&p) {
            let q = s.z.im;
            let a = s.amplitudes;
            let closed = 1.0 / (2.0 * PI) / (q * q) * (a.r.norm_sqr() + a.t.norm_sqr() * (-2.0 * q).exp());
            assert!((bound_norm_tail_doubling(&s).unwrap() - closed).abs() < 1e-12 * closed);
        }
    }

    #[test]
    fn bound_and_scattering_are_orthogonal() {
        let p = well();
        for s in bound_states(&p) {
            for k in [0.3, 1.0, 2.5] {
                for fam in Family::ALL {
                    let e = StateRef::scattering(&p, k, fam).unwrap();
                    let pr = master_inner_product(&s, &e).unwrap();
                    assert_eq!(pr.tag(), Tag::Zero, "p={k} {fam}: {pr}");
                }
            }
        }
    }

    #[test]
    fn scattering_delta_and_pv_cancellation() {
        let p = PotentialSpec::from_pairs(2.0, &[(0.5, 1.0), (0.8, -2.0)]).unwrap();
        let e = StateRef::scattering(&p, 1.3, Family::IN).unwrap();
        match master_inner_product(&e, &e).unwrap().value {
            ProductValue::DiracDelta { coefficient } => {
                assert!((coefficient - c(2.0 / 1.3, 0.0)).norm() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
        let e2 = StateRef::scattering(&p, 1.7, Family::IN).unwrap();
        let pr = master_inner_product(&e, &e2).unwrap();
        assert_eq!(pr.tag(), Tag::Zero);
        assert!(pr.residual < 1e-9);
    }

    #[test]
    fn background_wedge_rule_for_free_states() {
        let p = PotentialSpec::square(1.0, 0.0, 1.0).unwrap();
        let a = StateRef::background(&p, c(1.0, -0.5), Family::IN).unwrap();
        let b = StateRef::background(&p, c(2.0, -0.2), Family::IN).unwrap();
        assert_eq!(master_inner_product(&a, &a).unwrap().tag(), Tag::Divergent);
        assert_eq!(master_inner_product(&a, &b).unwrap().tag(), Tag::Zero);
    }

    #[test]
    fn wronskian_agrees_with_quadrature_for_backgrounds() {
        let p = PotentialSpec::square(1.0, 0.0, 1.5).unwrap();
        let a = StateRef::background(&p, c(1.2, -0.4), Family::IN).unwrap();
        let b = StateRef::background(&p, c(-0.7, 0.3), Family::IN).unwrap();
        let w = wronskian_interior(&a, &b).unwrap();
        let q = interior_quadrature(&a, &b);
        assert!((w - q).norm() < 1e-10 * q.norm());
        let e = StateRef::scattering(&p, 1.0, Family::IN).unwrap();
        assert_eq!(wronskian_interior(&e, &e), Err(Error::DegenerateEnergyPair));
    }

    #[test]
    fn exact_interior_agrees_with_quadrature() {
        let p = PotentialSpec::from_pairs(1.0, &[(0.5, 2.0), (0.7, -3.0), (0.4, 0.0)]).unwrap();
        let a = StateRef::background(&p, c(1.2, -0.4), Family::IN).unwrap();
        let b = StateRef::background(&p, c(1.2, 0.4), Family::OUT_LEFT).unwrap();
        let e = exact_interior(&a, &b).unwrap();
        let q = interior_quadrature(&a, &b);
        assert!((e - q).norm() < 1e-11 * q.norm());
    }

    #[test]
    fn different_potentials_are_rejected() {
        let a = StateRef::scattering(&well(), 1.0, Family::IN).unwrap();
        let b = StateRef::scattering(&PotentialSpec::square(1.0, -7.0, 1.0).unwrap(), 1.0, Family::IN).unwrap();
        assert_eq!(master_inner_product(&a, &b), Err(Error::SamePotentialRequired));
    }

    #[test]
    fn products_are_conjugate_symmetric() {
        let p = PotentialSpec::from_pairs(1.0, &[(1.0, 0.5), (1.5, -4.0), (1.0, 0.5)]).unwrap();
        let states = [
            StateRef::background(&p, c(1.0, -0.3), Family::IN).unwrap(),
            StateRef::background(&p, c(-0.6, 0.8), Family::OUT).unwrap(),
            StateRef::background(&p, c(0.4, 1.1), Family::IN_LEFT).unwrap(),
            StateRef::scattering(&p, 1.4, Family::IN).unwrap(),
        ];
        for a in &states {
            for b in &states {
                let ab = master_inner_product(a, b).unwrap();
                let ba = master_inner_product(b, a).unwrap();
                assert_eq!(ab.tag(), ba.tag(), "{} {}", a.label, b.label);
                if let (ProductValue::FiniteValue { value: x }, ProductValue::FiniteValue { value: y }) = (ab.value, ba.value) {
                    assert!((x - y.conj()).norm() < 1e-9 * x.norm());
                }
            }
        }
    }
}

#[cfg(test)]
mod properties {
    use super::*;
    use crate::oracle::direct_norm;
    use crate::potential::strategies::*;
    use crate::spectrum::{find_spectrum, Kind, SearchRegion};
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn products_are_hermitian(pot in potential(), za in momentum(), zb in momentum(), fa in family(), fb in family()) {
            let a = StateRef::background(&pot, za, fa).unwrap();
            let b = StateRef::background(&pot, zb, fb).unwrap();
            let ab = master_inner_product(&a, &b).unwrap();
            let ba = master_inner_product(&b, &a).unwrap();
            prop_assert_eq!(ab.tag(), ba.tag());
            if let (ProductValue::FiniteValue { value: x }, ProductValue::FiniteValue { value: y }) = (ab.value, ba.value) {
                prop_assert!((x - y.conj()).norm() <= 1e-8 * x.norm());
            }
        }

        #[test]
        fn wronskian_matches_segment_overlaps(pot in potential(), za in momentum(), zb in momentum(), fa in family(), fb in family()) {
            let a = StateRef::background(&pot, za, fa).unwrap();
            let b = StateRef::background(&pot, zb, fb).unwrap();
            let gap = (za.conj() * za.conj() - zb * zb).norm() / (za.norm_sqr() + zb.norm_sqr());
            prop_assume!(gap > 1e-3);
            let w = wronskian_interior(&a, &b).unwrap();
            let e = exact_interior(&a, &b).unwrap();
            let (w0, wl) = boundary_wronskian(&a, &b);
            let scale = w0.norm().max(wl.norm()) / (za.conj() * za.conj() - zb * zb).norm();
            prop_assert!((w - e).norm() <= 1e-12 * scale + 1e-8 * e.norm(), "{} vs {}", w, e);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn bound_states_are_orthonormal(pot in well()) {
            let depth = pot.segments().iter().map(|s| -s.height).fold(0.0, f64::max);
            let region = SearchRegion::new(-0.5, 0.5, 0.03, (2.0 * depth).sqrt() + 0.5).unwrap();
            let found = find_spectrum(&pot, Family::IN, &region).unwrap();
            let bound: Vec<StateRef> = found
                .iter()
                .filter(|p| p.kind == Kind::Bound)
                .enumerate()
                .map(|(i, p)| StateRef::discrete(&pot, p, i + 1).unwrap())
                .collect();
            prop_assert!(!bound.is_empty());
            for (i, a) in bound.iter().enumerate() {
                let d = direct_norm(a).unwrap();
                prop_assert!((bound_norm(a).unwrap() - d).abs() <= 1e-8 * d);
                for (j, b) in bound.iter().enumerate() {
                    let tag = master_inner_product(a, b).unwrap().tag();
                    prop_assert_eq!(tag, if i == j { Tag::KroneckerDelta } else { Tag::Zero });
                }
            }
        }
    }
}
