use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use qprod_core::oracle::{classify_trend, direct_norm, numeric_product, QuadratureConfig, Trend};
use qprod_core::potential::{amplitudes, Family, PotentialSpec};
use qprod_core::products::{
    bound_norm, master_inner_product, product_table, wronskian_interior, Product, StateRef, Tag,
};
use qprod_core::quadrature::{integrate, QuadTolerance};
use qprod_core::regint::{gaussian_j, reg_i, Wedge};
use qprod_core::spectrum::{
    relative_residual, verify_pole_location, verify_pole_location_imaginary, Kind, SpectralPoint,
};

use crate::args::{Common, FigureArgs, Format, ProductArgs, RegintArgs, TableArgs};
use crate::output::{complex, csv_bytes, emit, json_bytes, load_potential, num, Failure};
use crate::states::{families, region, search, spectrum_config, Catalog};
use crate::svg;

const SPECTRUM_HEADER: [&str; 7] = ["kind", "family", "re_z", "im_z", "re_E", "im_E", "residual"];

fn spectrum_rows(points: &[SpectralPoint]) -> Vec<Vec<String>> {
    points
        .iter()
        .map(|p| {
            vec![
                p.kind.to_string(),
                p.family.to_string(),
                num(p.z.re),
                num(p.z.im),
                num(p.energy.re),
                num(p.energy.im),
                num(p.residual),
            ]
        })
        .collect()
}

fn no_svg(cmd: &str) -> Failure {
    Failure::Usage(format!("{cmd} does not produce SVG"))
}

fn catalog(c: &Common) -> Result<(PotentialSpec, Catalog), Failure> {
    let pot = load_potential(&c.potential)?;
    let cat = Catalog::new(&pot, &region(c)?, &spectrum_config(c)?)?;
    Ok((pot, cat))
}

pub fn spectrum(c: &Common) -> Result<(), Failure> {
    let pot = load_potential(&c.potential)?;
    let (region, cfg) = (region(c)?, spectrum_config(c)?);
    let format = c.format.unwrap_or(Format::Csv);
    if format == Format::Svg {
        return Err(no_svg("spectrum"));
    }
    let (points, err) = search(&pot, &region, &cfg, &families(c.family));
    let bytes = match format {
        Format::Json => json_bytes(&points)?,
        _ => csv_bytes(&SPECTRUM_HEADER, &spectrum_rows(&points))?,
    };
    emit(c.out.as_deref(), &bytes)?;
    err.map_or(Ok(()), Err)
}

pub fn figure(a: &FigureArgs) -> Result<(), Failure> {
    let c = &a.common;
    let pot = load_potential(&c.potential)?;
    let (region, cfg) = (region(c)?, spectrum_config(c)?);
    let (points, err) = search(&pot, &region, &cfg, &families(c.family));
    let bytes = match c.format.unwrap_or(Format::Svg) {
        Format::Csv => csv_bytes(&SPECTRUM_HEADER, &spectrum_rows(&points))?,
        Format::Json => json_bytes(&points)?,
        Format::Svg => {
            let wedge = match &a.wedge {
                Some(spec) => {
                    let s = Catalog::new(&pot, &region, &cfg)?.resolve(spec)?;
                    Some((Wedge::of(s.z), s.label))
                }
                None => None,
            };
            let [r0, r1, i0, i1] = c.region;
            svg::figure(&points, (r0, r1), (i0, i1), wedge).into_bytes()
        }
    };
    emit(c.out.as_deref(), &bytes)?;
    err.map_or(Ok(()), Err)
}

fn trend_label(t: Trend) -> String {
    match t {
        Trend::Decay => "Decay".into(),
        Trend::Growth => "Growth".into(),
        Trend::Converge(l) => format!("Converge {}", complex(l)),
    }
}

#[derive(Serialize)]
struct ProductReport<'a> {
    bra: &'a str,
    ket: &'a str,
    product: &'a Product,
    #[serde(skip_serializing_if = "Option::is_none")]
    sequence: Option<Vec<(f64, Complex64)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trend: Option<Trend>,
}

pub fn product(a: &ProductArgs) -> Result<(), Failure> {
    let c = &a.common;
    let (_, cat) = catalog(c)?;
    let (bra, ket) = (cat.resolve(&a.bra)?, cat.resolve(&a.ket)?);
    let p = master_inner_product(&bra, &ket)?;
    let sequence = match &c.lambda_seq {
        Some(l) => Some(numeric_product(&bra, &ket, &QuadratureConfig::with_lambdas(l.clone())?)?),
        None => None,
    };
    let trend = sequence.as_deref().map(classify_trend);
    let bytes = match c.format {
        Some(Format::Svg) => return Err(no_svg("product")),
        Some(Format::Json) => json_bytes(&ProductReport { bra: &bra.label, ket: &ket.label, product: &p, sequence, trend })?,
        Some(Format::Csv) => {
            let (re, im) = match p.raw {
                Some(v) => (num(v.re), num(v.im)),
                None => (String::new(), String::new()),
            };
            let row = vec![bra.label.clone(), ket.label.clone(), format!("{:?}", p.tag()), re, im, num(p.residual)];
            csv_bytes(&["bra", "ket", "tag", "re", "im", "residual"], &[row])?
        }
        None => {
            let mut s = format!("<{}|{}> = {p}\n", bra.label, ket.label);
            if let (Some(seq), Some(t)) = (&sequence, trend) {
                for (l, v) in seq {
                    let _ = writeln!(s, "  lambda {} : {}", num(*l), complex(*v));
                }
                let _ = writeln!(s, "  trend: {}", trend_label(t));
            }
            s.into_bytes()
        }
    };
    emit(c.out.as_deref(), &bytes)
}

pub fn table(a: &TableArgs) -> Result<(), Failure> {
    let c = &a.common;
    let (pot, cat) = catalog(c)?;
    let states: Vec<StateRef> = if a.states.is_empty() {
        cat.default_table()?
    } else {
        a.states.iter().map(|s| cat.resolve(s)).collect::<Result<_, _>>()?
    };
    log::info!("table over {} states", states.len());
    let t = product_table(&pot, &states)?;
    if let Some(path) = &a.detail {
        emit(Some(path), &json_bytes(&t)?)?;
    }
    let bytes = match c.format.unwrap_or(Format::Csv) {
        Format::Svg => return Err(no_svg("table")),
        Format::Json => json_bytes(&t)?,
        Format::Csv => {
            let mut header = vec![""];
            header.extend(t.labels.iter().map(String::as_str));
            let rows: Vec<Vec<String>> = t
                .labels
                .iter()
                .zip(t.tags())
                .map(|(l, row)| std::iter::once(l.clone()).chain(row.iter().map(|g| g.symbol().to_string())).collect())
                .collect();
            csv_bytes(&header, &rows)?
        }
    };
    emit(c.out.as_deref(), &bytes)
}

pub fn regint(a: &RegintArgs) -> Result<(), Failure> {
    let lambdas = match &a.lambda_seq {
        Some(l) => QuadratureConfig::with_lambdas(l.clone())?.lambda_sequence,
        None => QuadratureConfig::default().lambda_sequence,
    };
    let mut rows = Vec::new();
    for &[re, im] in &a.k {
        let k = Complex64::new(re, im);
        let class = reg_i(k).label();
        for &l in &lambdas {
            let j = gaussian_j(k, l);
            rows.push(vec![num(re), num(im), num(l), num(j.re), num(j.im), class.to_string()]);
        }
    }
    let bytes = match a.format.unwrap_or(Format::Csv) {
        Format::Svg => return Err(no_svg("regint")),
        Format::Json => {
            let v: Vec<_> = a
                .k
                .iter()
                .map(|&[re, im]| {
                    let k = Complex64::new(re, im);
                    serde_json::json!({
                        "k": k,
                        "limit": reg_i(k),
                        "sequence": lambdas.iter().map(|&l| (l, gaussian_j(k, l))).collect::<Vec<_>>(),
                    })
                })
                .collect();
            json_bytes(&v)?
        }
        Format::Csv => csv_bytes(&["k_re", "k_im", "lambda", "j_re", "j_im", "classification"], &rows)?,
    };
    emit(a.out.as_deref(), &bytes)
}

struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

pub fn verify(c: &Common) -> Result<(), Failure> {
    let pot = load_potential(&c.potential)?;
    let (region, cfg) = (region(c)?, spectrum_config(c)?);
    let (points, err) = search(&pot, &region, &cfg, &[Family::IN, Family::OUT]);
    if let Some(e) = err {
        return Err(e);
    }
    let mut checks = Vec::new();

    let grid: Vec<Complex64> = (0..25)
        .map(|i| Complex64::new(-4.0 + 2.0 * (i % 5) as f64 + 0.37, -3.0 + 1.5 * (i / 5) as f64 + 0.21))
        .collect();
    let conj = worst(grid.iter().filter_map(|&z| {
        let dp = amplitudes(&pot, z.conj(), Family::IN).ok()?.d;
        let dm = amplitudes(&pot, z, Family::OUT).ok()?.d;
        Some((dm - dp.conj()).norm() / dm.norm())
    }));
    checks.push(Check { name: "conjugation symmetry", pass: conj < 1e-12, detail: format!("max |D-(z) - conj D+(conj z)|/|D-| = {conj:.1e}") });

    let mirror = worst(points.iter().map(|p| relative_residual(&pot, p.family, -p.z.conj())));
    checks.push(Check { name: "mirror symmetry", pass: mirror < 1e-10, detail: format!("max residual at -conj(z) over {} zeros: {mirror:.1e}", points.len()) });

    let resonances: Vec<&SpectralPoint> = points.iter().filter(|p| p.z.re != 0.0).collect();
    let pole = worst(resonances.iter().map(|p| verify_pole_location(&pot, p)).collect::<Result<Vec<_>, _>>()?);
    checks.push(Check { name: "pole location (resonances)", pass: pole < 1e-6, detail: format!("max relative residual over {}: {pole:.1e}", resonances.len()) });

    let axis: Vec<&SpectralPoint> = points.iter().filter(|p| p.kind == Kind::AntiBound).collect();
    let axis_checks = axis.iter().map(|p| verify_pole_location_imaginary(&pot, p)).collect::<Result<Vec<_>, _>>()?;
    let corrected = worst(axis_checks.iter().map(|c| c.corrected_residual));
    let stated = worst(axis_checks.iter().map(|c| c.stated_residual));
    checks.push(Check {
        name: "pole location (anti-bound)",
        pass: corrected < 1e-6,
        detail: format!("max relative residual over {} with the incident-side boundary term: {corrected:.1e} (without it: {stated:.1e})", axis.len()),
    });

    let mut bound: Vec<&SpectralPoint> = points.iter().filter(|p| p.kind == Kind::Bound).collect();
    bound.sort_by(|a, b| a.z.im.total_cmp(&b.z.im));
    let states = bound.iter().enumerate().map(|(i, p)| StateRef::discrete(&pot, p, i + 1)).collect::<Result<Vec<_>, _>>()?;
    let mut norm_dev: f64 = 0.0;
    for s in &states {
        let d = direct_norm(s)?;
        norm_dev = norm_dev.max((bound_norm(s)? - d).abs() / d);
    }
    checks.push(Check { name: "bound-state norm", pass: norm_dev < 1e-8, detail: format!("max deviation from direct quadrature over {}: {norm_dev:.1e}", states.len()) });

    let mut nonzero = 0;
    for a in &states {
        for b in &states {
            if a.z != b.z && master_inner_product(a, b)?.tag() != Tag::Zero {
                nonzero += 1;
            }
        }
    }
    checks.push(Check { name: "bound-state orthogonality", pass: nonzero == 0, detail: format!("{nonzero} nonzero cross products") });

    let tol = QuadTolerance { abs: 0.0, rel: 1e-13, max_intervals: 100_000 };
    let mut wr: f64 = 0.0;
    for i in 0..12 {
        let za = grid[(7 * i) % 25];
        let zb = grid[(11 * i + 3) % 25];
        let (Ok(a), Ok(b)) = (StateRef::background(&pot, za, Family::ALL[i % 4]), StateRef::background(&pot, zb, Family::ALL[(i / 4) % 4])) else {
            continue;
        };
        let Ok(w) = wronskian_interior(&a, &b) else {
            continue;
        };
        let (sa, sb) = (a.solution(), b.solution());
        let q = integrate(|x| sa.eval(x).conj() * sb.eval(x), &pot.edges(), tol)?.value;
        wr = wr.max((w - q).norm() / q.norm());
    }
    checks.push(Check { name: "Wronskian reduction", pass: wr < 1e-9, detail: format!("max deviation from interior quadrature: {wr:.1e}") });

    let lim = worst([Complex64::new(1.0, 0.5), Complex64::new(-2.0, 1.0), Complex64::new(0.3, 3.0)].map(|k| {
        let exact = Complex64::new(0.0, 1.0) / k;
        (gaussian_j(k, 1e-8) - exact).norm() / exact.norm()
    }));
    checks.push(Check { name: "regularization limit", pass: lim < 1e-4, detail: format!("max |J(k,1e-8) - i/k|/|i/k| = {lim:.1e}") });

    let mut report = String::new();
    for ch in &checks {
        let _ = writeln!(report, "{} {}: {}", if ch.pass { "PASS" } else { "FAIL" }, ch.name, ch.detail);
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    let _ = writeln!(report, "{} of {} checks passed", checks.len() - failed, checks.len());
    emit(c.out.as_deref(), report.as_bytes())?;
    if failed > 0 {
        return Err(Failure::Numeric(format!("{failed} verification checks failed")));
    }
    Ok(())
}
