//! Location and classification of the zeros of the denominators `D±(z)`.
//!
//! Counting and refinement run on the entire factor `G = D / (∓2i p̂_ref)`
//! (see [`reduced_denominator`]), so the principal-branch cut of `p̂_ref`
//! never enters the argument principle and the meaningless zeros at
//! `p̂_ref = 0` are absent by construction.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};
use crate::potential::{
    amplitudes_unchecked, reduced_amplitudes, reduced_denominator, Boundary, ExteriorForm, Family, MasterSolution,
    PotentialSpec,
};
use crate::quadrature::{integrate, QuadTolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Kind {
    Bound,
    AntiBound,
    Resonance,
    AntiResonance,
}

impl Kind {
    pub fn label(&self) -> &'static str {
        match self {
            Kind::Bound => "Bound",
            Kind::AntiBound => "AntiBound",
            Kind::Resonance => "Resonance",
            Kind::AntiResonance => "AntiResonance",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    pub z: Complex64,
    pub energy: Complex64,
    pub kind: Kind,
    pub family: Family,
    /// `|D(z)|` at the refined root.
    pub residual: f64,
    /// Last Newton step relative to `1 + |z|`, i.e. `|D| / (|D'| (1 + |z|))`.
    pub relative_residual: f64,
}

/// Closed rectangle of the complex momentum plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchRegion {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub max_depth: usize,
    /// Points never reported as spectral points. The potential's own
    /// degenerate momenta and `z = 0` are always added.
    pub exclusions: Vec<Complex64>,
}

impl SearchRegion {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let ok = [re_min, re_max, im_min, im_max].iter().all(|v| v.is_finite())
            && re_max > re_min
            && im_max > im_min;
        if !ok {
            return Err(Error::InvalidRegion(format!(
                "[{re_min}, {re_max}] x [{im_min}, {im_max}] is degenerate"
            )));
        }
        Ok(Self { re_min, re_max, im_min, im_max, max_depth: 40, exclusions: Vec::new() })
    }

    pub fn with_max_depth(mut self, depth: usize) -> Result<Self> {
        if depth == 0 {
            return Err(Error::InvalidRegion("max depth must be at least 1".into()));
        }
        self.max_depth = depth;
        Ok(self)
    }

    pub fn with_exclusions(mut self, points: Vec<Complex64>) -> Self {
        self.exclusions = points;
        self
    }

    /// Image under `z → −conj(z)`.
    pub fn mirrored(&self) -> Self {
        Self { re_min: -self.re_max, re_max: -self.re_min, ..self.clone() }
    }

    /// Image under `z → conj(z)`.
    pub fn conjugated(&self) -> Self {
        Self { im_min: -self.im_max, im_max: -self.im_min, ..self.clone() }
    }

    pub fn diameter(&self) -> f64 {
        (self.re_max - self.re_min).hypot(self.im_max - self.im_min)
    }

    fn rect(&self) -> Rect {
        Rect { re0: self.re_min, re1: self.re_max, im0: self.im_min, im1: self.im_max }
    }
}

/// Numerical settings of the root search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumConfig {
    pub root_tol: f64,
    pub axis_tol: f64,
    pub max_newton_iter: usize,
    pub contour_tol: f64,
    pub jitter: f64,
    pub jitter_attempts: usize,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            root_tol: 1e-10,
            axis_tol: 1e-8,
            max_newton_iter: 50,
            contour_tol: 1e-8,
            jitter: 1e-6,
            jitter_attempts: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Rect {
    re0: f64,
    re1: f64,
    im0: f64,
    im1: f64,
}

impl Rect {
    fn diameter(&self) -> f64 {
        (self.re1 - self.re0).hypot(self.im1 - self.im0)
    }

    fn expanded(&self, d: f64) -> Rect {
        Rect { re0: self.re0 - d, re1: self.re1 + d, im0: self.im0 - d, im1: self.im1 + d }
    }

    fn contains(&self, z: Complex64, slack: f64) -> bool {
        z.re >= self.re0 - slack
            && z.re <= self.re1 + slack
            && z.im >= self.im0 - slack
            && z.im <= self.im1 + slack
    }

    fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.re0 + self.re1), 0.5 * (self.im0 + self.im1))
    }

    // Off-centre split keeps symmetry lines (e.g. the imaginary axis) away
    // from the sub-rectangle edges.
    fn split(&self) -> [Rect; 4] {
        let xm = self.re0 + 0.5371 * (self.re1 - self.re0);
        let ym = self.im0 + 0.4787 * (self.im1 - self.im0);
        [
            Rect { re0: self.re0, re1: xm, im0: self.im0, im1: ym },
            Rect { re0: xm, re1: self.re1, im0: self.im0, im1: ym },
            Rect { re0: self.re0, re1: xm, im0: ym, im1: self.im1 },
            Rect { re0: xm, re1: self.re1, im0: ym, im1: self.im1 },
        ]
    }
}

struct TooClose {
    min_modulus: f64,
    median: f64,
}

struct Denominator<'a> {
    pot: &'a PotentialSpec,
    fam: Family,
    /// Contour samples per unit length.
    density: f64,
}

impl<'a> Denominator<'a> {
    fn new(pot: &'a PotentialSpec, fam: Family) -> Self {
        let density = 8.0 * (1.0 + pot.length() * pot.mass().sqrt());
        Self { pot, fam, density }
    }

    fn g(&self, z: Complex64) -> Complex64 {
        reduced_denominator(self.pot, z, self.fam)
    }

    fn dg(&self, z: Complex64) -> Complex64 {
        let h = 1e-7 * z.norm().max(1e-3);
        (self.g(z + h) - self.g(z - h)) / (2.0 * h)
    }

    /// Winding number of `G` around the rectangle, by phase tracking.
    fn winding(&self, r: &Rect, contour_tol: f64) -> std::result::Result<i64, TooClose> {
        let corners = [
            Complex64::new(r.re0, r.im0),
            Complex64::new(r.re1, r.im0),
            Complex64::new(r.re1, r.im1),
            Complex64::new(r.re0, r.im1),
        ];
        let mut total = 0.0;
        for e in 0..4 {
            let (a, b) = (corners[e], corners[(e + 1) % 4]);
            let n = ((b - a).norm() * self.density).ceil().max(16.0) as usize;
            let pts: Vec<Complex64> = (0..=n).map(|i| a + (b - a) * (i as f64 / n as f64)).collect();
            let vals: Vec<Complex64> = pts.iter().map(|&z| self.g(z)).collect();
            let mods: Vec<f64> = vals.iter().map(|v| v.norm()).collect();
            for i in 0..n {
                // G can vary by many orders of magnitude along a long edge, so
                // the reference modulus is a median over neighbouring samples.
                let lo = i.saturating_sub(4);
                let hi = (i + 5).min(n);
                let mut window: Vec<f64> = mods[lo..=hi].to_vec();
                window.sort_by(f64::total_cmp);
                let median = window[window.len() / 2];
                let floor = contour_tol * median;
                let mut state = Refine { total: 0.0, floor, min_modulus: f64::INFINITY };
                if !self.refine(pts[i], vals[i], pts[i + 1], vals[i + 1], 0, &mut state) {
                    return Err(TooClose { min_modulus: state.min_modulus, median });
                }
                total += state.total;
            }
        }
        Ok((total / (2.0 * std::f64::consts::PI)).round() as i64)
    }

    fn refine(
        &self,
        a: Complex64,
        ga: Complex64,
        b: Complex64,
        gb: Complex64,
        depth: usize,
        st: &mut Refine,
    ) -> bool {
        for v in [ga, gb] {
            let m = v.norm();
            st.min_modulus = st.min_modulus.min(m);
            if !(m > st.floor) || !m.is_finite() {
                return false;
            }
        }
        let delta = (gb / ga).arg();
        let mid = 0.5 * (a + b);
        let gm = self.g(mid);
        let m = gm.norm();
        st.min_modulus = st.min_modulus.min(m);
        if !(m > st.floor) {
            return false;
        }
        let split_sum = (gm / ga).arg() + (gb / gm).arg();
        if delta.abs() <= std::f64::consts::FRAC_PI_4 && (split_sum - delta).abs() < 1e-3 {
            st.total += delta;
            return true;
        }
        if depth >= 48 {
            return false;
        }
        self.refine(a, ga, mid, gm, depth + 1, st) && self.refine(mid, gm, b, gb, depth + 1, st)
    }

    /// Winding number with up to `attempts` outward jitters of the contour.
    fn count(&self, r: &Rect, cfg: &SpectrumConfig) -> Result<(i64, Rect)> {
        let mut rect = *r;
        let mut last = TooClose { min_modulus: 0.0, median: 0.0 };
        for attempt in 0..=cfg.jitter_attempts {
            if attempt > 0 {
                rect = r.expanded(cfg.jitter * r.diameter() * attempt as f64);
            }
            match self.winding(&rect, cfg.contour_tol) {
                Ok(n) => return Ok((n, rect)),
                Err(e) => last = e,
            }
        }
        Err(Error::ContourTooClose { min_modulus: last.min_modulus, median: last.median })
    }

    /// Newton iteration on `G`; returns the root and the final relative step.
    fn newton(&self, z0: Complex64, cfg: &SpectrumConfig) -> Result<(Complex64, f64)> {
        let mut z = z0;
        let mut last_rel = f64::INFINITY;
        for _ in 0..cfg.max_newton_iter {
            let d = self.dg(z);
            let step = self.g(z) / d;
            if !(step.re.is_finite() && step.im.is_finite()) {
                break;
            }
            z -= step;
            let rel = step.norm() / (1.0 + z.norm());
            if rel < 1e-15 || (rel < cfg.root_tol && rel >= 0.5 * last_rel) {
                return Ok((z, rel));
            }
            last_rel = rel;
        }
        let d = self.dg(z);
        let rel = (self.g(z) / d).norm() / (1.0 + z.norm());
        if rel < cfg.root_tol {
            Ok((z, rel))
        } else {
            Err(Error::NonConvergence { last: z, residual: rel })
        }
    }
}

struct Refine {
    total: f64,
    floor: f64,
    min_modulus: f64,
}

/// Number of zeros of `D` (for the given family) inside the region, not
/// counting the meaningless zeros at vanishing reference momentum.
pub fn count_zeros(pot: &PotentialSpec, fam: Family, region: &SearchRegion) -> Result<usize> {
    count_zeros_with(pot, fam, region, &SpectrumConfig::default())
}

pub fn count_zeros_with(
    pot: &PotentialSpec,
    fam: Family,
    region: &SearchRegion,
    cfg: &SpectrumConfig,
) -> Result<usize> {
    let den = Denominator::new(pot, fam);
    let (n, _) = den.count(&region.rect(), cfg)?;
    Ok(n.max(0) as usize)
}

/// Outcome of a spectrum search, including roots dropped as exclusion points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSearch {
    pub points: Vec<SpectralPoint>,
    pub excluded: Vec<(Complex64, String)>,
}

pub fn find_spectrum(
    pot: &PotentialSpec,
    fam: Family,
    region: &SearchRegion,
) -> Result<Vec<SpectralPoint>> {
    Ok(search_spectrum(pot, fam, region, &SpectrumConfig::default())?.points)
}

pub fn search_spectrum(
    pot: &PotentialSpec,
    fam: Family,
    region: &SearchRegion,
    cfg: &SpectrumConfig,
) -> Result<SpectrumSearch> {
    let den = Denominator::new(pot, fam);
    let roots = search_rect(&den, &region.rect(), 0, region.max_depth, cfg)?;

    let mut exclusions = region.exclusions.clone();
    exclusions.extend(pot.exclusion_points());
    let mut points: Vec<SpectralPoint> = Vec::new();
    let mut excluded = Vec::new();
    for (z, _) in roots {
        let tol = 1e-8 * (1.0 + z.norm());
        if z.norm() < tol {
            excluded.push((z, "zero momentum is not a spectral point".to_string()));
            continue;
        }
        if exclusions.iter().any(|e| (e - z).norm() < tol) {
            excluded.push((z, "degenerate local momentum: meaningless zero".to_string()));
            continue;
        }
        let z = if z.re.abs() < cfg.axis_tol * (1.0 + z.norm()) {
            // Newton from a point on the axis stays on the axis (G is real there).
            den.newton(Complex64::new(0.0, z.im), cfg).map(|r| r.0).unwrap_or(z)
        } else {
            z
        };
        if points.iter().any(|p| (p.z - z).norm() < 1e-8 * (1.0 + z.norm())) {
            continue;
        }
        points.push(make_point(pot, fam, z, cfg));
    }
    points.sort_by(|a, b| a.z.re.total_cmp(&b.z.re).then(a.z.im.total_cmp(&b.z.im)));
    Ok(SpectrumSearch { points, excluded })
}

/// Newton step length `|G/G'|` at `z`, relative to `1 + |z|`.
pub fn relative_residual(pot: &PotentialSpec, fam: Family, z: Complex64) -> f64 {
    let den = Denominator::new(pot, fam);
    (den.g(z) / den.dg(z)).norm() / (1.0 + z.norm())
}

fn make_point(pot: &PotentialSpec, fam: Family, z: Complex64, cfg: &SpectrumConfig) -> SpectralPoint {
    let z = if z.re.abs() < cfg.axis_tol * (1.0 + z.norm()) { Complex64::new(0.0, z.im) } else { z };
    let rel = relative_residual(pot, fam, z);
    let amps = amplitudes_unchecked(pot, z, fam);
    SpectralPoint {
        z,
        energy: z * z / (2.0 * pot.mass()),
        kind: classify(z, fam, cfg.axis_tol),
        family: fam,
        residual: amps.d.norm(),
        relative_residual: rel,
    }
}

/// Classification by location. On the imaginary axis the state is bound when
/// its exterior decays: `Im z > 0` for `In` families and `Im z < 0` for `Out`
/// families (their time-reversed copies).
pub fn classify(z: Complex64, fam: Family, axis_tol: f64) -> Kind {
    if z.re.abs() < axis_tol * (1.0 + z.norm()) {
        let decaying = match fam.bc {
            Boundary::In => z.im > 0.0,
            Boundary::Out => z.im < 0.0,
        };
        if decaying {
            Kind::Bound
        } else {
            Kind::AntiBound
        }
    } else if z.re > 0.0 {
        Kind::Resonance
    } else {
        Kind::AntiResonance
    }
}

fn search_rect(
    den: &Denominator,
    r: &Rect,
    depth: usize,
    max_depth: usize,
    cfg: &SpectrumConfig,
) -> Result<Vec<(Complex64, f64)>> {
    let (n, rect) = den.count(r, cfg)?;
    if n <= 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        if let Ok((z, rel)) = den.newton(rect.center(), cfg) {
            if rect.contains(z, 1e-9 * rect.diameter()) {
                return Ok(vec![(z, rel)]);
            }
        }
    }
    if depth >= max_depth {
        if n == 1 {
            let (z, rel) = den.newton(rect.center(), cfg)?;
            return Err(Error::NonConvergence { last: z, residual: rel });
        }
        return Err(Error::MaxDepthExceeded { depth, near: rect.center() });
    }
    let parts = rect.split();
    let results: Vec<Result<Vec<(Complex64, f64)>>> = {
        use rayon::prelude::*;
        parts.par_iter().map(|p| search_rect(den, p, depth + 1, max_depth, cfg)).collect()
    };
    let mut out = Vec::new();
    for res in results {
        out.extend(res?);
    }
    Ok(out)
}

/// Boundary data `(u(0), u_x(0), u(L), u_x(L))` of the entire (reduced)
/// Master Solution family.
pub(crate) fn boundary_data(pot: &PotentialSpec, z: Complex64, fam: Family) -> [Complex64; 4] {
    let amps = reduced_amplitudes(pot, z, fam);
    let ms = MasterSolution::new(pot, &amps);
    let (u0, d0) = ms.eval_with_derivative(0.0);
    let (ul, dl) = ms.interior.eval(pot.length());
    [u0, d0, ul, dl]
}

/// Momentum derivative of [`boundary_data`] by the Cauchy integral over a
/// circle around `z`. The data are entire in `z`, so the trapezoidal rule
/// converges geometrically; the radius keeps the nodes away from segment
/// thresholds, where the interior evaluation loses digits.
pub(crate) fn boundary_data_dz(pot: &PotentialSpec, z: Complex64, fam: Family) -> [Complex64; 4] {
    const N: usize = 32;
    let thresholds = pot.exclusion_points();
    let clearance = |r: f64| thresholds.iter().map(|t| ((t - z).norm() - r).abs()).fold(f64::INFINITY, f64::min);
    let r = [0.2, 0.13, 0.3, 0.08].into_iter().max_by(|a, b| clearance(*a).total_cmp(&clearance(*b))).unwrap();
    let mut out = [Complex64::new(0.0, 0.0); 4];
    for k in 0..N {
        let e = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / N as f64);
        let f = boundary_data(pot, z + r * e, fam);
        for i in 0..4 {
            out[i] += f[i] / e;
        }
    }
    out.map(|v| v / (N as f64 * r))
}

/// `∫₀ᴸ |u|²` of the discrete state at `sp` by adaptive quadrature.
fn interior_weight(pot: &PotentialSpec, sp: &SpectralPoint) -> Result<f64> {
    let amps = reduced_amplitudes(pot, sp.z, sp.family);
    let ms = MasterSolution::from_exterior(pot, ExteriorForm::from_amplitudes(&amps, pot.length(), true));
    let tol = QuadTolerance { abs: 0.0, rel: 1e-12, max_intervals: 10_000 };
    Ok(integrate(|x| Complex64::new(ms.eval(x).norm_sqr(), 0.0), &pot.edges(), tol)?.value.re)
}

fn pole_sign(fam: Family) -> f64 {
    match fam.bc {
        Boundary::In => -1.0,
        Boundary::Out => 1.0,
    }
}

/// `β_pred = ∓(|u(0)|² + |u(L)|²) / (2∫₀ᴸ|u|²)` for a resonance, with the upper
/// sign for outgoing (`In`) states. Returns `|Im z − β_pred| / |Im z|`.
pub fn verify_pole_location(pot: &PotentialSpec, sp: &SpectralPoint) -> Result<f64> {
    if sp.z.re.abs() < 1e-8 * (1.0 + sp.z.norm()) {
        return Err(Error::NotAResonance(sp.z));
    }
    let beta = predicted_beta(pot, sp)?;
    Ok((sp.z.im - beta).abs() / sp.z.im.abs())
}

fn predicted_beta(pot: &PotentialSpec, sp: &SpectralPoint) -> Result<f64> {
    let [u0, _, ul, _] = boundary_data(pot, sp.z, sp.family);
    let w = interior_weight(pot, sp)?;
    Ok(pole_sign(sp.family) * (u0.norm_sqr() + ul.norm_sqr()) / (2.0 * w))
}

/// Result of the pole-location check on the imaginary axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImaginaryPoleCheck {
    pub beta: f64,
    /// Prediction of the identity assuming the momentum derivative obeys the
    /// differentiated Siegert conditions at both ends.
    pub beta_stated: f64,
    /// Prediction with the actual boundary behaviour of the momentum
    /// derivative, which picks up a `2iz N D'(z)` defect on the incident side.
    pub beta_corrected: f64,
    pub stated_residual: f64,
    pub corrected_residual: f64,
}

/// Pole-location identity for a zero on the imaginary axis, built from the
/// momentum derivative `u' = ∂_z u` of the Master Solution.
pub fn verify_pole_location_imaginary(
    pot: &PotentialSpec,
    sp: &SpectralPoint,
) -> Result<ImaginaryPoleCheck> {
    let beta = sp.z.im;
    let beta_stated = predicted_beta(pot, sp)?;
    let w = interior_weight(pot, sp)?;
    let [u0, d0, ul, dl] = boundary_data(pot, sp.z, sp.family);
    let [v0, e0, vl, el] = boundary_data_dz(pot, sp.z, sp.family);
    // B = u* ∂ₓu' − u' ∂ₓu*, and −2iβ ∫|u|² = B(L) − B(0) at Re z = 0.
    let b = |u: Complex64, du: Complex64, v: Complex64, dv: Complex64| u.conj() * dv - v * du.conj();
    let delta_b = b(ul, dl, vl, el) - b(u0, d0, v0, e0);
    let beta_corrected = (Complex64::new(0.0, 1.0) * delta_b / (2.0 * w)).re;
    Ok(ImaginaryPoleCheck {
        beta,
        beta_stated,
        beta_corrected,
        stated_residual: (beta - beta_stated).abs() / beta.abs(),
        corrected_residual: (beta - beta_corrected).abs() / beta.abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{amplitudes, square_denominators};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn well() -> PotentialSpec {
        PotentialSpec::square(1.0, -8.0, 1.0).unwrap()
    }

    #[test]
    fn free_particle_has_no_zeros() {
        let p = PotentialSpec::square(1.0, 0.0, 1.0).unwrap();
        let r = SearchRegion::new(0.5, 6.0, -4.0, 3.0).unwrap();
        assert_eq!(count_zeros(&p, Family::IN, &r).unwrap(), 0);
        // Region touching z = 0: the threshold zero of G is found and excluded.
        let r = SearchRegion::new(-3.0, 3.0, -3.0, 0.0).unwrap();
        let s = search_spectrum(&p, Family::IN, &r, &SpectrumConfig::default()).unwrap();
        assert!(s.points.is_empty());
    }

    #[test]
    fn bound_states_of_the_well() {
        let r = SearchRegion::new(-0.3, 0.2, 0.01, 6.0).unwrap();
        let pts = find_spectrum(&well(), Family::IN, &r).unwrap();
        let q: Vec<f64> = pts.iter().map(|p| p.z.im).collect();
        assert_eq!(pts.len(), 2);
        assert!(pts.iter().all(|p| p.kind == Kind::Bound && p.z.re == 0.0));
        assert!((q[0] - 1.27609009657048).abs() < 1e-10);
        assert!((q[1] - 3.42892107333005).abs() < 1e-10);
    }

    #[test]
    fn resonances_satisfy_pole_law_and_mirror() {
        let p = well();
        let r = SearchRegion::new(-8.0, 8.0, -4.0, -0.01).unwrap();
        let pts = find_spectrum(&p, Family::IN, &r).unwrap();
        assert!(!pts.is_empty());
        assert_eq!(pts.len(), count_zeros(&p, Family::IN, &r).unwrap());
        for sp in &pts {
            assert!(sp.z.im < 0.0);
            let (dp, _) = square_denominators(1.0, -8.0, 1.0, sp.z);
            assert!(dp.norm() < 1e-8 * (1.0 + sp.z.norm_sqr()), "{}", sp.z);
            let mirror = -sp.z.conj();
            assert!(pts.iter().any(|o| (o.z - mirror).norm() < 1e-10));
            if sp.kind == Kind::Resonance {
                assert!(verify_pole_location(&p, sp).unwrap() < 1e-6);
            }
        }
        let first = pts.iter().find(|s| s.kind == Kind::Resonance).unwrap();
        assert!((first.z - c(4.00555033, -2.57619704)).norm() < 1e-7);
    }

    #[test]
    fn out_family_is_conjugate() {
        let p = PotentialSpec::from_pairs(1.0, &[(1.0, 0.5), (1.5, -4.0), (1.0, 0.5)]).unwrap();
        let r = SearchRegion::new(-4.0, 4.0, -2.0, -0.05).unwrap();
        let a = find_spectrum(&p, Family::IN, &r).unwrap();
        let b = find_spectrum(&p, Family::OUT, &r.conjugated()).unwrap();
        assert_eq!(a.len(), b.len());
        for sp in &a {
            assert!(b.iter().any(|o| (o.z - sp.z.conj()).norm() < 1e-10));
        }
        for sp in &b {
            let d = amplitudes(&p, sp.z, Family::OUT).unwrap().d;
            assert!(d.norm() < 1e-8 * (1.0 + sp.z.norm_sqr()));
        }
    }

    #[test]
    fn anti_bound_identity() {
        let p = PotentialSpec::square(1.0, -0.5, 1.0).unwrap();
        let r = SearchRegion::new(-0.2, 0.3, -6.0, -0.05).unwrap();
        let pts = find_spectrum(&p, Family::IN, &r).unwrap();
        let ab = pts.iter().find(|s| s.kind == Kind::AntiBound).unwrap();
        let chk = verify_pole_location_imaginary(&p, ab).unwrap();
        assert!(chk.corrected_residual < 1e-6, "{chk:?}");
        assert!(chk.stated_residual > 1e-3, "{chk:?}");
        assert!(matches!(verify_pole_location(&p, ab), Err(Error::NotAResonance(_))));
    }

    #[test]
    fn classification_by_family() {
        assert_eq!(classify(c(0.0, 1.0), Family::IN, 1e-8), Kind::Bound);
        assert_eq!(classify(c(0.0, -1.0), Family::IN, 1e-8), Kind::AntiBound);
        assert_eq!(classify(c(0.0, -1.0), Family::OUT, 1e-8), Kind::Bound);
        assert_eq!(classify(c(2.0, -1.0), Family::IN, 1e-8), Kind::Resonance);
        assert_eq!(classify(c(-2.0, -1.0), Family::IN, 1e-8), Kind::AntiResonance);
    }

    #[test]
    fn region_validation() {
        assert!(SearchRegion::new(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(SearchRegion::new(0.0, 1.0, 0.0, 1.0).unwrap().with_max_depth(0).is_err());
    }
}

#[cfg(test)]
mod properties {
    use super::*;
    use crate::potential::strategies::potential;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn located_zeros_are_refined_and_mirrored(pot in potential()) {
            let region = SearchRegion::new(-4.0, 4.0, -2.0, 2.0).unwrap();
            for fam in [Family::IN, Family::OUT] {
                let Ok(points) = find_spectrum(&pot, fam, &region) else {
                    // A zero on the rectangle edge is reported, not hidden.
                    continue;
                };
                prop_assert!(points.len() as i64 <= count_zeros(&pot, fam, &region).unwrap() as i64);
                for p in &points {
                    prop_assert!(relative_residual(&pot, fam, p.z) < 1e-10);
                    prop_assert!(relative_residual(&pot, fam, -p.z.conj()) < 1e-10);
                }
            }
        }
    }
}
