//! Piecewise-constant cut-off potentials and the Master Solution.
//!
//! Wavefunctions are built by propagating the value-derivative pair
//! `(Φ, Φ')` through the segments with 2×2 transfer matrices. All matrix
//! entries depend on the local momentum only through `p̂²`, so they are
//! entire in `z` and no branch choice leaks into the propagation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Below this value of `|p̂ w|` the segment matrix uses its Taylor series.
pub const SERIES_SWITCHOVER: f64 = 1e-4;

/// Default threshold for `|p̂_j|` below which a momentum is rejected as degenerate.
pub const DEFAULT_LOCAL_MOMENTUM_TOL: f64 = 1e-12;

pub type Matrix2 = [[Complex64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub width: f64,
    pub height: f64,
}

#[derive(Deserialize)]
struct RawPotential {
    #[serde(default = "default_mass")]
    mass: f64,
    segments: Vec<Segment>,
}

fn default_mass() -> f64 {
    1.0
}

impl TryFrom<RawPotential> for PotentialSpec {
    type Error = Error;
    fn try_from(raw: RawPotential) -> Result<Self> {
        PotentialSpec::new(raw.mass, raw.segments)
    }
}

/// A potential that is constant on each of a list of adjacent segments
/// covering `[0, L]` and zero elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPotential")]
pub struct PotentialSpec {
    mass: f64,
    segments: Vec<Segment>,
}

impl PotentialSpec {
    pub fn new(mass: f64, segments: Vec<Segment>) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidPotential(format!("mass must be positive, got {mass}")));
        }
        if segments.is_empty() {
            return Err(Error::InvalidPotential("at least one segment is required".into()));
        }
        for (j, s) in segments.iter().enumerate() {
            if !(s.width.is_finite() && s.width > 0.0) {
                return Err(Error::InvalidPotential(format!(
                    "segment {j} has non-positive width {}",
                    s.width
                )));
            }
            if !s.height.is_finite() {
                return Err(Error::InvalidPotential(format!("segment {j} has non-finite height")));
            }
        }
        Ok(Self { mass, segments })
    }

    /// Single-segment potential of the given height and width.
    pub fn square(mass: f64, height: f64, width: f64) -> Result<Self> {
        Self::new(mass, vec![Segment { width, height }])
    }

    /// Builds a potential from `(width, height)` pairs.
    pub fn from_pairs(mass: f64, pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            mass,
            pairs.iter().map(|&(width, height)| Segment { width, height }).collect(),
        )
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn length(&self) -> f64 {
        self.segments.iter().map(|s| s.width).sum()
    }

    /// The same potential mirrored about the centre of `[0, L]`.
    pub fn reversed(&self) -> Self {
        let mut segments = self.segments.clone();
        segments.reverse();
        Self { mass: self.mass, segments }
    }

    pub fn is_symmetric(&self) -> bool {
        self.segments == self.reversed().segments
    }

    /// Left edges of the segments followed by `L`.
    pub fn edges(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.segments.len() + 1);
        let mut x = 0.0;
        out.push(x);
        for s in &self.segments {
            x += s.width;
            out.push(x);
        }
        out
    }

    /// Potential value at `x` (zero outside `[0, L]`).
    pub fn value_at(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let mut left = 0.0;
        for s in &self.segments {
            if x < left + s.width {
                return s.height;
            }
            left += s.width;
        }
        0.0
    }

    /// Squared local momentum `z² − 2mV_j` of segment `j`.
    pub fn local_momentum_sq(&self, j: usize, z: Complex64) -> Complex64 {
        z * z - 2.0 * self.mass * self.segments[j].height
    }

    /// Local momentum `p̂_j = √(z² − 2mV_j)` on the principal branch.
    pub fn local_momentum(&self, j: usize, z: Complex64) -> Complex64 {
        self.local_momentum_sq(j, z).sqrt()
    }

    /// Index of the deepest segment (lowest height, first on ties). Its local
    /// momentum fixes the overall scale of the denominators.
    pub fn reference_segment(&self) -> usize {
        let mut best = 0;
        for (j, s) in self.segments.iter().enumerate() {
            if s.height < self.segments[best].height {
                best = j;
            }
        }
        best
    }

    /// Momenta `±√(2mV_j)` at which some local momentum vanishes.
    pub fn exclusion_points(&self) -> Vec<Complex64> {
        let mut out: Vec<Complex64> = Vec::new();
        for s in &self.segments {
            if s.height == 0.0 {
                continue;
            }
            let p = Complex64::new(2.0 * self.mass * s.height, 0.0).sqrt();
            for c in [p, -p] {
                if !out.iter().any(|o| (o - c).norm() < 1e-14 * (1.0 + c.norm())) {
                    out.push(c);
                }
            }
        }
        out
    }
}

/// Direction of the incident wave.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Right,
    Left,
}

/// Boundary-condition type: `In` families share the denominator `D₊`
/// (outgoing Siegert conditions), `Out` families share `D₋`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    In,
    Out,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Family {
    pub direction: Direction,
    pub bc: Boundary,
}

impl Family {
    pub const IN: Family = Family { direction: Direction::Right, bc: Boundary::In };
    pub const OUT: Family = Family { direction: Direction::Right, bc: Boundary::Out };
    pub const IN_LEFT: Family = Family { direction: Direction::Left, bc: Boundary::In };
    pub const OUT_LEFT: Family = Family { direction: Direction::Left, bc: Boundary::Out };

    pub const ALL: [Family; 4] = [Self::IN, Self::OUT, Self::IN_LEFT, Self::OUT_LEFT];

    pub fn label(&self) -> &'static str {
        match (self.bc, self.direction) {
            (Boundary::In, Direction::Right) => "in",
            (Boundary::Out, Direction::Right) => "out",
            (Boundary::In, Direction::Left) => "in-left",
            (Boundary::Out, Direction::Left) => "out-left",
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        Self::ALL.into_iter().find(|f| f.label() == s)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Propagator of a constant-potential segment of width `w` with squared local
/// momentum `k2`: `[[cos kw, sin(kw)/k], [−k sin kw, cos kw]]`.
pub fn segment_matrix(k2: Complex64, w: f64) -> Matrix2 {
    let (c, s) = cos_sinc(k2, w);
    [[c, s], [-k2 * s, c]]
}

/// `(cos(kw), sin(kw)/k)` as functions of `k² `, with the series form near `k = 0`.
fn cos_sinc(k2: Complex64, w: f64) -> (Complex64, Complex64) {
    let k = k2.sqrt();
    if k.norm() * w.abs() < SERIES_SWITCHOVER {
        let u = k2 * (w * w);
        let c = 1.0 - u / 2.0 + u * u / 24.0;
        let s = w * (1.0 - u / 6.0 + u * u / 120.0);
        (c, s)
    } else {
        let kw = k * w;
        (kw.cos(), kw.sin() / k)
    }
}

pub fn mat_mul(a: &Matrix2, b: &Matrix2) -> Matrix2 {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn det(m: &Matrix2) -> Complex64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

fn apply(m: &Matrix2, v: (Complex64, Complex64)) -> (Complex64, Complex64) {
    (m[0][0] * v.0 + m[0][1] * v.1, m[1][0] * v.0 + m[1][1] * v.1)
}

/// Transfer matrix across `[0, L]`, using the limiting series wherever a local
/// momentum vanishes.
pub fn transfer_matrix_limiting(pot: &PotentialSpec, z: Complex64) -> Matrix2 {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut m = [[one, zero], [zero, one]];
    for (j, s) in pot.segments().iter().enumerate() {
        m = mat_mul(&segment_matrix(pot.local_momentum_sq(j, z), s.width), &m);
    }
    m
}

/// Transfer matrix mapping `(Φ(0), Φ'(0))` to `(Φ(L), Φ'(L))`.
pub fn transfer_matrix(pot: &PotentialSpec, z: Complex64) -> Result<Matrix2> {
    transfer_matrix_with_tol(pot, z, DEFAULT_LOCAL_MOMENTUM_TOL)
}

pub fn transfer_matrix_with_tol(pot: &PotentialSpec, z: Complex64, tol: f64) -> Result<Matrix2> {
    check_local_momenta(pot, z, tol)?;
    Ok(transfer_matrix_limiting(pot, z))
}

fn check_local_momenta(pot: &PotentialSpec, z: Complex64, tol: f64) -> Result<()> {
    for j in 0..pot.segments().len() {
        if pot.local_momentum(j, z).norm() < tol {
            return Err(Error::DegenerateLocalMomentum { z, segment: j });
        }
    }
    Ok(())
}

/// Amplitudes of the Master Solution at momentum `z`.
///
/// For right-moving families the exterior pieces are
/// `N(D e^{±izx} + R e^{∓izx})` for `x ≤ 0` and `N T e^{±izx}` for `x ≥ L`
/// (upper signs for `In`). Left-moving families are the mirror images: the
/// amplitudes are those of the reversed potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Amplitudes {
    pub z: Complex64,
    pub family: Family,
    pub d: Complex64,
    pub r: Complex64,
    pub t: Complex64,
    pub n: Complex64,
}

/// Normalization `√m / √(2πz)` on the principal branch.
pub fn normalization(mass: f64, z: Complex64) -> Complex64 {
    Complex64::new(mass, 0.0).sqrt() / (2.0 * PI * z).sqrt()
}

/// Entire factor of the `In` right-moving amplitudes, `(D, R, T) / c`.
fn in_factors(m: &Matrix2, z: Complex64, length: f64) -> (Complex64, Complex64, Complex64) {
    let (a, b, c, d) = (m[0][0], m[0][1], m[1][0], m[1][1]);
    let iz = I * z;
    let z2 = z * z;
    (
        iz * (a + d) + z2 * b - c,
        iz * (d - a) + z2 * b + c,
        2.0 * iz * (-iz * length).exp(),
    )
}

/// Branch-free part of the denominator: `D(z) = c(z)·G(z)` where `c` is
/// `∓2i p̂_ref`. `G` is entire and shares all zeros of `D` except the spurious
/// ones where `p̂_ref` vanishes.
pub fn reduced_denominator(pot: &PotentialSpec, z: Complex64, fam: Family) -> Complex64 {
    reduced_factors(pot, z, fam).0
}

fn scale_factor(pot: &PotentialSpec, z: Complex64, bc: Boundary) -> Complex64 {
    let p_ref = pot.local_momentum(pot.reference_segment(), z);
    match bc {
        Boundary::In => -2.0 * I * p_ref,
        Boundary::Out => 2.0 * I * p_ref,
    }
}

/// Amplitudes without the degeneracy checks. Used internally for
/// finite-difference derivatives.
pub fn amplitudes_unchecked(pot: &PotentialSpec, z: Complex64, fam: Family) -> Amplitudes {
    let (g, r, t) = reduced_factors(pot, z, fam);
    let c = scale_factor(pot, z, fam.bc);
    Amplitudes {
        z,
        family: fam,
        d: c * g,
        r: c * r,
        t: c * t,
        n: normalization(pot.mass(), z),
    }
}

/// Amplitudes with the scale factor `∓2i p̂_ref` and the normalization removed.
/// Every component is entire in `z`, which makes these the right family for
/// momentum derivatives taken across the imaginary axis.
pub fn reduced_amplitudes(pot: &PotentialSpec, z: Complex64, fam: Family) -> Amplitudes {
    let (d, r, t) = reduced_factors(pot, z, fam);
    Amplitudes { z, family: fam, d, r, t, n: Complex64::new(1.0, 0.0) }
}

fn reduced_factors(pot: &PotentialSpec, z: Complex64, fam: Family) -> (Complex64, Complex64, Complex64) {
    let m = transfer_matrix_limiting(pot, z);
    let m = match fam.direction {
        Direction::Right => m,
        Direction::Left => [[m[1][1], m[0][1]], [m[1][0], m[0][0]]],
    };
    let zs = match fam.bc {
        Boundary::In => z,
        Boundary::Out => -z,
    };
    in_factors(&m, zs, pot.length())
}

pub fn amplitudes(pot: &PotentialSpec, z: Complex64, fam: Family) -> Result<Amplitudes> {
    amplitudes_with_tol(pot, z, fam, DEFAULT_LOCAL_MOMENTUM_TOL)
}

pub fn amplitudes_with_tol(
    pot: &PotentialSpec,
    z: Complex64,
    fam: Family,
    tol: f64,
) -> Result<Amplitudes> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroMomentum);
    }
    check_local_momenta(pot, z, tol)?;
    Ok(amplitudes_unchecked(pot, z, fam))
}

/// Closed-form single-segment denominators `(D₊, D₋)` for a square barrier of
/// height `v` and width `l`.
pub fn square_denominators(mass: f64, v: f64, l: f64, z: Complex64) -> (Complex64, Complex64) {
    let ph = (z * z - 2.0 * mass * v).sqrt();
    let dp = (z + ph).powi(2) * (-I * ph * l).exp() - (z - ph).powi(2) * (I * ph * l).exp();
    let dm = (z + ph).powi(2) * (I * ph * l).exp() - (z - ph).powi(2) * (-I * ph * l).exp();
    (dp, dm)
}

/// Coefficients of `e^{+izx}` and `e^{−izx}` on each side of `[0, L]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExteriorForm {
    pub z: Complex64,
    pub left: [Complex64; 2],
    pub right: [Complex64; 2],
}

impl ExteriorForm {
    /// Exterior coefficients of the Master Solution, with `N` folded in.
    /// With `drop_incident`, the `D` term is removed exactly (discrete states).
    pub fn from_amplitudes(amps: &Amplitudes, length: f64, drop_incident: bool) -> Self {
        let z = amps.z;
        let d = if drop_incident { Complex64::new(0.0, 0.0) } else { amps.d };
        let (r, t) = (amps.r, amps.t);
        let zero = Complex64::new(0.0, 0.0);
        let ep = (I * z * length).exp();
        let em = (-I * z * length).exp();
        let (left, right) = match (amps.family.bc, amps.family.direction) {
            (Boundary::In, Direction::Right) => ([d, r], [t, zero]),
            (Boundary::Out, Direction::Right) => ([r, d], [zero, t]),
            (Boundary::In, Direction::Left) => ([zero, t * ep], [r * em, d * ep]),
            (Boundary::Out, Direction::Left) => ([t * em, zero], [d * em, r * ep]),
        };
        let n = amps.n;
        Self {
            z,
            left: [n * left[0], n * left[1]],
            right: [n * right[0], n * right[1]],
        }
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self {
            z: self.z,
            left: [s * self.left[0], s * self.left[1]],
            right: [s * self.right[0], s * self.right[1]],
        }
    }

    fn eval_pair(c: &[Complex64; 2], z: Complex64, x: f64) -> (Complex64, Complex64) {
        let ep = (I * z * x).exp();
        let em = (-I * z * x).exp();
        let a = c[0] * ep;
        let b = c[1] * em;
        (a + b, I * z * (a - b))
    }

    pub fn eval_left(&self, x: f64) -> (Complex64, Complex64) {
        Self::eval_pair(&self.left, self.z, x)
    }

    pub fn eval_right(&self, x: f64) -> (Complex64, Complex64) {
        Self::eval_pair(&self.right, self.z, x)
    }
}

/// Representation of one constant-potential segment of the interior solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SegmentForm {
    /// `a e^{i p̂ t} + b e^{−i p̂ t}` in local coordinate `t = x − x_j`.
    Exponential { a: Complex64, b: Complex64 },
    /// `value + slope·t`, used when `|p̂ w|` is below the series switchover.
    Linear { value: Complex64, slope: Complex64 },
}

/// Interior solution on `[0, L]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteriorState {
    /// Principal-branch local momenta `p̂_j`.
    pub local_momenta: Vec<Complex64>,
    /// Squared local momenta; the propagation only uses these.
    pub local_momenta_sq: Vec<Complex64>,
    /// Segment edges `x_0 = 0, …, x_n = L`.
    pub edges: Vec<f64>,
    /// `(Φ, Φ')` at each edge.
    pub edge_values: Vec<(Complex64, Complex64)>,
    pub coefficients: Vec<SegmentForm>,
}

impl InteriorState {
    /// Propagates `(Φ(0), Φ'(0))` through the potential.
    pub fn propagate(pot: &PotentialSpec, z: Complex64, start: (Complex64, Complex64)) -> Self {
        let edges = pot.edges();
        let n = pot.segments().len();
        let mut local_momenta = Vec::with_capacity(n);
        let mut local_momenta_sq = Vec::with_capacity(n);
        let mut edge_values = Vec::with_capacity(n + 1);
        let mut coefficients = Vec::with_capacity(n);
        let mut v = start;
        edge_values.push(v);
        for (j, s) in pot.segments().iter().enumerate() {
            let k2 = pot.local_momentum_sq(j, z);
            let k = k2.sqrt();
            local_momenta.push(k);
            local_momenta_sq.push(k2);
            coefficients.push(if k.norm() * s.width < SERIES_SWITCHOVER {
                SegmentForm::Linear { value: v.0, slope: v.1 }
            } else {
                let d = v.1 / (I * k);
                SegmentForm::Exponential { a: 0.5 * (v.0 + d), b: 0.5 * (v.0 - d) }
            });
            v = apply(&segment_matrix(k2, s.width), v);
            edge_values.push(v);
        }
        Self { local_momenta, local_momenta_sq, edges, edge_values, coefficients }
    }

    /// Interior from the data at both ends. Each edge takes the value from
    /// the sweep (forward from `x = 0` or backward from `x = L`) with the
    /// smaller accumulated roundoff bound, so solutions decaying in either
    /// direction stay accurate.
    pub fn two_sided(
        pot: &PotentialSpec,
        z: Complex64,
        start: (Complex64, Complex64),
        end: (Complex64, Complex64),
    ) -> Self {
        let mut state = Self::propagate(pot, z, start);
        let n = state.coefficients.len();
        let size = |v: (Complex64, Complex64)| v.0.norm().max(v.1.norm());
        let norm = |m: &Matrix2| m.iter().map(|r| r[0].norm() + r[1].norm()).fold(0.0, f64::max);
        let mut fwd = vec![f64::EPSILON * size(start); n + 1];
        for j in 0..n {
            let m = segment_matrix(state.local_momenta_sq[j], pot.segments()[j].width);
            fwd[j + 1] = norm(&m) * fwd[j] + f64::EPSILON * size(state.edge_values[j + 1]);
        }
        let mut back = end;
        let mut err = f64::EPSILON * size(end);
        for j in (0..n).rev() {
            if err < fwd[j + 1] {
                state.edge_values[j + 1] = back;
            }
            let m = segment_matrix(state.local_momenta_sq[j], -pot.segments()[j].width);
            back = apply(&m, back);
            err = norm(&m) * err + f64::EPSILON * size(back);
        }
        for j in 0..n {
            let (k, v) = (state.local_momenta[j], state.edge_values[j]);
            state.coefficients[j] = if k.norm() * pot.segments()[j].width < SERIES_SWITCHOVER {
                SegmentForm::Linear { value: v.0, slope: v.1 }
            } else {
                let d = v.1 / (I * k);
                SegmentForm::Exponential { a: 0.5 * (v.0 + d), b: 0.5 * (v.0 - d) }
            };
        }
        state
    }

    /// `(Φ, Φ')` at `x ∈ [0, L]`.
    pub fn eval(&self, x: f64) -> (Complex64, Complex64) {
        let n = self.local_momenta.len();
        let mut j = match self.edges.binary_search_by(|e| e.partial_cmp(&x).unwrap()) {
            Ok(i) => i,
            Err(i) => i.saturating_sub(1),
        };
        if j >= n {
            j = n - 1;
        }
        let t = x - self.edges[j];
        apply(&segment_matrix(self.local_momenta_sq[j], t), self.edge_values[j])
    }
}

/// Master Solution `Φ(x; z)` ready for pointwise evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct MasterSolution {
    pub exterior: ExteriorForm,
    pub interior: InteriorState,
    length: f64,
}

impl MasterSolution {
    pub fn new(pot: &PotentialSpec, amps: &Amplitudes) -> Self {
        Self::from_exterior(pot, ExteriorForm::from_amplitudes(amps, pot.length(), false))
    }

    /// Builds the interior from the exterior data at `x = 0` and `x = L`.
    pub fn from_exterior(pot: &PotentialSpec, exterior: ExteriorForm) -> Self {
        let (start, end) = (exterior.eval_left(0.0), exterior.eval_right(pot.length()));
        Self {
            exterior,
            interior: InteriorState::two_sided(pot, exterior.z, start, end),
            length: pot.length(),
        }
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.eval_with_derivative(x).0
    }

    pub fn eval_with_derivative(&self, x: f64) -> (Complex64, Complex64) {
        if x <= 0.0 {
            self.exterior.eval_left(x)
        } else if x >= self.length {
            self.exterior.eval_right(x)
        } else {
            self.interior.eval(x)
        }
    }
}

/// `Φ(x)` of the Master Solution with the given amplitudes.
pub fn master_solution_eval(pot: &PotentialSpec, amps: &Amplitudes, x: f64) -> Complex64 {
    MasterSolution::new(pot, amps).eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn well() -> PotentialSpec {
        PotentialSpec::square(1.0, -8.0, 1.0).unwrap()
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn rejects_bad_potentials() {
        assert!(PotentialSpec::new(1.0, vec![]).is_err());
        assert!(PotentialSpec::square(0.0, 1.0, 1.0).is_err());
        assert!(PotentialSpec::square(1.0, 1.0, -1.0).is_err());
        assert!(PotentialSpec::from_json(r#"{"mass":1,"segments":[{"width":0,"height":1}]}"#).is_err());
    }

    #[test]
    fn json_round_trip() {
        let p = PotentialSpec::from_pairs(2.0, &[(1.0, 0.5), (0.5, -3.0)]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(PotentialSpec::from_json(&s).unwrap(), p);
        assert_eq!(p.length(), 1.5);
    }

    #[test]
    fn free_transfer_matrix() {
        let p = PotentialSpec::square(1.0, 0.0, 2.0).unwrap();
        let z = c(1.3, -0.4);
        let m = transfer_matrix(&p, z).unwrap();
        let zl = z * 2.0;
        assert!(rel(m[0][0], zl.cos()) < 1e-14);
        assert!(rel(m[0][1], zl.sin() / z) < 1e-14);
        assert!(rel(m[1][0], -z * zl.sin()) < 1e-14);
    }

    #[test]
    fn single_segment_matrix_closed_form() {
        let z = c(2.0, 0.0);
        let m = transfer_matrix(&well(), z).unwrap();
        let ph = 20f64.sqrt();
        assert!((m[0][0].re - ph.cos()).abs() < 1e-14);
        assert!((m[0][1].re - ph.sin() / ph).abs() < 1e-14);
        assert!((m[1][0].re + ph * ph.sin()).abs() < 1e-13);
    }

    #[test]
    fn degenerate_momentum_is_reported_and_limit_is_finite() {
        let p = well();
        let z = c(0.0, 4.0);
        assert!(matches!(
            transfer_matrix(&p, z),
            Err(Error::DegenerateLocalMomentum { segment: 0, .. })
        ));
        let m = transfer_matrix_limiting(&p, z);
        assert!((m[0][1] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((det(&m) - 1.0).norm() < 1e-15);
        assert_eq!(amplitudes(&p, c(0.0, 0.0), Family::IN), Err(Error::ZeroMomentum));
    }

    #[test]
    fn series_matches_trig_near_switchover() {
        let w = 1.0;
        let k2 = c(0.9e-4, 0.2e-4).powi(2);
        let (cs, ss) = cos_sinc(k2, w);
        let k = k2.sqrt();
        assert!(rel(cs, (k * w).cos()) < 1e-15);
        assert!(rel(ss, (k * w).sin() / k) < 1e-12);
    }

    #[test]
    fn free_particle_amplitudes() {
        let p = PotentialSpec::square(1.0, 0.0, 1.5).unwrap();
        let z = c(0.7, -0.3);
        let a = amplitudes(&p, z, Family::IN).unwrap();
        let expect = 4.0 * z * z * (-I * z * 1.5).exp();
        assert!(a.r.norm() < 1e-14 * expect.norm());
        assert!(rel(a.d, expect) < 1e-14);
        assert!(rel(a.t, expect) < 1e-14);
        let ms = MasterSolution::new(&p, &a);
        assert!(rel(ms.eval(1.5), a.n * 4.0 * z * z) < 1e-13);
    }

    #[test]
    fn square_well_anchor() {
        let p = well();
        let z = c(2.0, 0.0);
        let (dp, dm) = square_denominators(1.0, -8.0, 1.0, z);
        assert!(rel(amplitudes(&p, z, Family::IN).unwrap().d, dp) < 1e-13);
        assert!(rel(amplitudes(&p, z, Family::OUT).unwrap().d, dm) < 1e-13);
    }

    #[test]
    fn real_axis_unitarity() {
        let p = PotentialSpec::from_pairs(1.0, &[(0.4, 2.0), (0.7, -3.0), (0.3, 1.0)]).unwrap();
        for pm in [0.3, 1.0, 2.7, 6.0] {
            for fam in [Family::IN, Family::IN_LEFT] {
                let a = amplitudes(&p, c(pm, 0.0), fam).unwrap();
                let u = (a.r.norm_sqr() + a.t.norm_sqr()) / a.d.norm_sqr();
                assert!((u - 1.0).abs() < 1e-12, "p={pm} {fam}: {u}");
            }
        }
    }

    #[test]
    fn left_family_matches_reversed_potential() {
        let p = PotentialSpec::from_pairs(1.0, &[(0.4, 2.0), (0.7, -3.0)]).unwrap();
        let z = c(1.1, -0.2);
        let a = amplitudes(&p, z, Family::IN_LEFT).unwrap();
        let b = amplitudes(&p.reversed(), z, Family::IN).unwrap();
        assert!(rel(a.d, b.d) < 1e-13 && rel(a.r, b.r) < 1e-13 && rel(a.t, b.t) < 1e-13);
        let ms = MasterSolution::new(&p, &a);
        let mr = MasterSolution::new(&p.reversed(), &b);
        for x in [-0.5, 0.2, 0.6, 1.0, 1.7] {
            assert!(rel(ms.eval(x), mr.eval(1.1 - x)) < 1e-11, "x={x}");
        }
    }

    #[test]
    fn matching_at_boundaries() {
        let p = PotentialSpec::from_pairs(1.0, &[(0.4, 2.0), (0.7, -3.0), (0.5, 0.0)]).unwrap();
        let z = c(1.7, -0.6);
        for fam in Family::ALL {
            let a = amplitudes(&p, z, fam).unwrap();
            let ms = MasterSolution::new(&p, &a);
            let inner = ms.interior.eval(p.length());
            let outer = ms.exterior.eval_right(p.length());
            assert!(rel(inner.0, outer.0) < 1e-11, "{fam}");
            assert!(rel(inner.1, outer.1) < 1e-11, "{fam}");
        }
    }

    #[test]
    fn exclusion_points_of_well_and_barrier() {
        let p = PotentialSpec::from_pairs(1.0, &[(1.0, -8.0), (1.0, 2.0)]).unwrap();
        let e = p.exclusion_points();
        assert_eq!(e.len(), 4);
        assert!(e.iter().any(|z| (z - c(0.0, 4.0)).norm() < 1e-14));
        assert!(e.iter().any(|z| (z - c(-2.0, 0.0)).norm() < 1e-14));
    }
}


#[cfg(test)]
mod properties {
    use super::strategies::*;
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn denominators_are_conjugate_pairs(pot in potential(), z in momentum()) {
            let dp = amplitudes(&pot, z.conj(), Family::IN).unwrap();
            let dm = amplitudes(&pot, z, Family::OUT).unwrap();
            prop_assert!((dm.d - dp.d.conj()).norm() <= 1e-10 * dm.d.norm());
            prop_assert!((dm.r - dp.r.conj()).norm() <= 1e-10 * dm.r.norm().max(dm.d.norm()));
        }

        #[test]
        fn master_solution_is_smooth_at_interfaces(pot in potential(), z in momentum(), fam in family()) {
            let s = MasterSolution::new(&pot, &amplitudes(&pot, z, fam).unwrap());
            let scale = (0..=20).map(|i| s.eval(pot.length() * i as f64 / 20.0).norm()).fold(0.0, f64::max);
            for x in pot.edges() {
                let (u0, d0) = s.eval_with_derivative(x - 1e-9);
                let (u1, d1) = s.eval_with_derivative(x + 1e-9);
                prop_assert!((u1 - u0).norm() <= 1e-6 * scale);
                prop_assert!((d1 - d0).norm() <= 1e-5 * scale * (1.0 + z.norm()));
            }
        }
    }
}
