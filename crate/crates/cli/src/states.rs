use num_complex::Complex64;
use qprod_core::potential::{Family, PotentialSpec};
use qprod_core::products::StateRef;
use qprod_core::spectrum::{search_spectrum, Kind, SearchRegion, SpectralPoint, SpectrumConfig};

use crate::args::{parse_complex, Common, FamilyArg};
use crate::output::Failure;

pub fn region(common: &Common) -> Result<SearchRegion, Failure> {
    let [a, b, c, d] = common.region;
    Ok(SearchRegion::new(a, b, c, d)?)
}

pub fn spectrum_config(common: &Common) -> Result<SpectrumConfig, Failure> {
    let mut cfg = SpectrumConfig::default();
    if let Some(t) = common.tol_root {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Failure::Usage(format!("--tol-root must be positive, got {t}")));
        }
        cfg.root_tol = t;
    }
    Ok(cfg)
}

pub fn families(arg: Option<FamilyArg>) -> Vec<Family> {
    match arg {
        None => vec![Family::IN, Family::OUT],
        Some(FamilyArg::In) => vec![Family::IN],
        Some(FamilyArg::Out) => vec![Family::OUT],
    }
}

/// Spectrum of the requested families. When both are searched, the
/// time-reversed copies of bound and anti-bound states found by the `Out`
/// family are dropped so each such state is listed once. A failing family
/// leaves the points found so far together with the error.
pub fn search(
    pot: &PotentialSpec,
    region: &SearchRegion,
    cfg: &SpectrumConfig,
    fams: &[Family],
) -> (Vec<SpectralPoint>, Option<Failure>) {
    let mut points = Vec::new();
    for &fam in fams {
        match search_spectrum(pot, fam, region, cfg) {
            Ok(found) => {
                log::info!("{} family: {} points, {} excluded", fam, found.points.len(), found.excluded.len());
                for (z, why) in &found.excluded {
                    log::debug!("excluded {z}: {why}");
                }
                let dedup = fams.len() > 1 && fam == Family::OUT;
                points.extend(
                    found
                        .points
                        .into_iter()
                        .filter(|p| !(dedup && matches!(p.kind, Kind::Bound | Kind::AntiBound))),
                );
            }
            Err(e) => return (points, Some(e.into())),
        }
    }
    (points, None)
}

/// Discrete states of a region, each kind indexed from 1 by increasing `|z|`.
pub struct Catalog {
    pot: PotentialSpec,
    bound: Vec<SpectralPoint>,
    anti_bound: Vec<SpectralPoint>,
    resonances: Vec<SpectralPoint>,
    anti_resonances: Vec<SpectralPoint>,
    incoming: Vec<SpectralPoint>,
}

impl Catalog {
    pub fn new(pot: &PotentialSpec, region: &SearchRegion, cfg: &SpectrumConfig) -> Result<Self, Failure> {
        let (points, err) = search(pot, region, cfg, &[Family::IN, Family::OUT]);
        if let Some(e) = err {
            return Err(e);
        }
        let pick = |fam: Family, kind: Kind| {
            let mut v: Vec<SpectralPoint> = points.iter().filter(|p| p.family == fam && p.kind == kind).copied().collect();
            v.sort_by(|a, b| a.z.norm().total_cmp(&b.z.norm()));
            v
        };
        Ok(Self {
            pot: pot.clone(),
            bound: pick(Family::IN, Kind::Bound),
            anti_bound: pick(Family::IN, Kind::AntiBound),
            resonances: pick(Family::IN, Kind::Resonance),
            anti_resonances: pick(Family::IN, Kind::AntiResonance),
            incoming: pick(Family::OUT, Kind::Resonance),
        })
    }

    fn nth(&self, list: &[SpectralPoint], what: &str, index: usize) -> Result<StateRef, Failure> {
        if index == 0 || index > list.len() {
            return Err(Failure::Usage(format!(
                "no {what} state {index} in the search region ({} found)",
                list.len()
            )));
        }
        Ok(StateRef::discrete(&self.pot, &list[index - 1], index)?)
    }

    pub fn resolve(&self, spec: &str) -> Result<StateRef, Failure> {
        let bad = |why: &str| Failure::Usage(format!("state '{spec}': {why}"));
        let mut parts = spec.splitn(3, ':');
        let kind = parts.next().unwrap_or_default();
        let arg = parts.next().ok_or_else(|| bad("missing argument"))?;
        let rest = parts.next();
        let index = || arg.parse::<usize>().map_err(|_| bad("expected a positive index"));
        let family = |default: Family| match rest {
            None => Ok(default),
            Some(f) => Family::parse(f).ok_or_else(|| bad("family must be in, out, in-left or out-left")),
        };
        let discrete_only = || if rest.is_some() { Err(bad("discrete states take no family")) } else { Ok(()) };
        match kind {
            "bound" => discrete_only().and_then(|_| self.nth(&self.bound, "bound", index()?)),
            "antibound" => discrete_only().and_then(|_| self.nth(&self.anti_bound, "anti-bound", index()?)),
            "resonance" => discrete_only().and_then(|_| self.nth(&self.resonances, "resonance", index()?)),
            "antiresonance" => {
                discrete_only().and_then(|_| self.nth(&self.anti_resonances, "anti-resonance", index()?))
            }
            "incoming" => discrete_only().and_then(|_| self.nth(&self.incoming, "incoming resonance", index()?)),
            "scattering" => {
                let p = arg.parse::<f64>().map_err(|_| bad("expected a momentum"))?;
                Ok(StateRef::scattering(&self.pot, p, family(Family::IN)?)?)
            }
            "background" => {
                let [re, im] = parse_complex(arg).map_err(|e| bad(&e))?;
                Ok(StateRef::background(&self.pot, Complex64::new(re, im), family(Family::IN)?)?)
            }
            _ => Err(bad("unknown kind")),
        }
    }

    /// Bound states from the deepest up, anti-bound states outward, the
    /// first resonance, the second incoming resonance (the first when only
    /// one exists), a scattering state at half the first resonance momentum
    /// and a background state just inside the first resonance.
    pub fn default_table(&self) -> Result<Vec<StateRef>, Failure> {
        let mut out = Vec::new();
        for i in (1..=self.bound.len()).rev() {
            out.push(self.nth(&self.bound, "bound", i)?);
        }
        for i in 1..=self.anti_bound.len() {
            out.push(self.nth(&self.anti_bound, "anti-bound", i)?);
        }
        if !self.resonances.is_empty() {
            out.push(self.nth(&self.resonances, "resonance", 1)?);
        }
        if !self.incoming.is_empty() {
            out.push(self.nth(&self.incoming, "incoming resonance", self.incoming.len().min(2))?);
        }
        let (p, b) = match self.resonances.first() {
            Some(r) => (0.5 * r.z.re, Complex64::new(0.9 * r.z.re, 0.6 * r.z.im)),
            None => (1.3, Complex64::new(2.0, -0.5)),
        };
        out.push(StateRef::scattering(&self.pot, p, Family::IN)?);
        out.push(StateRef::background(&self.pot, b, Family::IN)?);
        Ok(out)
    }
}
