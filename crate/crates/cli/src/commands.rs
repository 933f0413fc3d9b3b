use std::fmt;
use std::path::Path;

use anyhow::{bail, Context, Result};
use num_complex::Complex64;

use invsq::counterexample::sharpness_scan;
use invsq::hankel::{
    clear_kernel_cache, hankel_transform, make_grid, relative_l2, GridPair, GridScheme, ModeField, PotentialSetup,
    RadialGrid, Space,
};
use invsq::harmonics::{
    adjoint_orthogonality_norm, almost_orthogonality_norm, norm_equivalence_scan, sobolev_norm_hankel, DyadicIndex,
};
use invsq::maximal::{order_maxima, weighted_ratio_scan, TnuSweep, WeightSpec};
use invsq::propagator::{evolve, prepare, InitialData};
use invsq::report::ExperimentReport;
use invsq::specfun::{check_regime_bound, classify_regime, fit_regime_constants, regime_lattice, BesselOrder, RegimeTag};

use crate::{Command, SetupArgs};

/// Invalid input; the process exits with status 2.
#[derive(Debug)]
pub struct Usage(pub String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, pass: bool, detail: String) -> Self {
        Self { name: name.into(), pass, detail }
    }
}

macro_rules! usage {
    ($($fmt:tt)+) => {
        return Err(Usage(format!($($fmt)+)).into())
    };
}

impl SetupArgs {
    fn build(&self) -> Result<PotentialSetup> {
        PotentialSetup::new(self.n, self.a).map_err(|e| Usage(format!("invalid --n/--a: {e}")).into())
    }
}

pub fn name(command: &Command) -> &'static str {
    match command {
        Command::BesselCheck { .. } => "bessel-check",
        Command::HankelSelftest { .. } => "hankel-selftest",
        Command::OrthoScan { .. } => "ortho-scan",
        Command::SobolevCheck { .. } => "sobolev-check",
        Command::Propagate { .. } => "propagate",
        Command::MaximalScan { .. } => "maximal-scan",
        Command::TnuBound { .. } => "tnu-bound",
        Command::Counterexample { .. } => "counterexample",
    }
}

fn list<T: fmt::Debug>(v: &[T]) -> String {
    v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",")
}

/// Every effective setting of the command, flags and defaults alike.
pub fn echo(command: &Command) -> Vec<(&'static str, String)> {
    let setup = |s: &SetupArgs| vec![("n", s.n.to_string()), ("a", format!("{:?}", s.a))];
    match command {
        Command::BesselCheck { kmin, kmax, rmin, rmax, per_decade } => vec![
            ("kmin", kmin.to_string()),
            ("kmax", kmax.to_string()),
            ("rmin", format!("{rmin:?}")),
            ("rmax", format!("{rmax:?}")),
            ("per-decade", per_decade.to_string()),
        ],
        Command::HankelSelftest { setup: s, kmax, rmax, q, scheme, export_grid } => {
            let mut v = setup(s);
            v.extend([
                ("kmax", kmax.to_string()),
                ("rmax", format!("{rmax:?}")),
                ("q", q.to_string()),
                ("scheme", scheme.clone()),
            ]);
            if let Some(p) = export_grid {
                v.push(("export-grid", p.display().to_string()));
            }
            v
        }
        Command::OrthoScan { setup: s, k, dmax, rmax, q } => {
            let mut v = setup(s);
            v.extend([("k", list(k)), ("dmax", dmax.to_string()), ("rmax", format!("{rmax:?}")), ("q", q.to_string())]);
            v
        }
        Command::SobolevCheck { setup: s, k, s: orders, mmax_exp } => {
            let mut v = setup(s);
            v.extend([("k", list(k)), ("s", list(orders)), ("mmax-exp", format!("{mmax_exp:?}"))]);
            v
        }
        Command::Propagate { setup: s, kmax, rmax, q, t, data } => {
            let mut v = setup(s);
            v.extend([("kmax", kmax.to_string()), ("rmax", format!("{rmax:?}")), ("q", q.to_string()), ("t", list(t))]);
            if let Some(p) = data {
                v.push(("data", p.display().to_string()));
            }
            v
        }
        Command::MaximalScan { setup: s, beta, s: order, scale_sweep, times, radius } => {
            let mut v = setup(s);
            v.extend([
                ("beta", format!("{beta:?}")),
                ("s", format!("{order:?}")),
                ("scale-sweep", scale_sweep.clone()),
                ("times", format!("{times:?}")),
                ("radius", format!("{radius:?}")),
            ]);
            v
        }
        Command::TnuBound { nu_max, nu_step, trials, samples, ascent, seed } => vec![
            ("nu-max", format!("{nu_max:?}")),
            ("nu-step", format!("{nu_step:?}")),
            ("trials", trials.to_string()),
            ("samples", samples.to_string()),
            ("ascent", ascent.to_string()),
            ("seed", seed.to_string()),
        ],
        Command::Counterexample { setup: s, nmin, nmax, s: orders } => {
            let mut v = setup(s);
            v.extend([("nmin", format!("{nmin:?}")), ("nmax", format!("{nmax:?}")), ("s", list(orders))]);
            v
        }
    }
}

pub fn run(command: &Command) -> Result<(ExperimentReport, Vec<Check>)> {
    let start = std::time::Instant::now();
    let (mut report, checks) = match command {
        Command::BesselCheck { kmin, kmax, rmin, rmax, per_decade } => {
            bessel_check(*kmin, *kmax, (*rmin, *rmax), *per_decade)?
        }
        Command::HankelSelftest { setup, kmax, rmax, q, scheme, export_grid } => {
            hankel_selftest(&setup.build()?, *kmax, *rmax, *q, scheme, export_grid.as_deref())?
        }
        Command::OrthoScan { setup, k, dmax, rmax, q } => ortho_scan(&setup.build()?, k, *dmax, *rmax, *q)?,
        Command::SobolevCheck { setup, k, s, mmax_exp } => sobolev_check(&setup.build()?, k, s, *mmax_exp)?,
        Command::Propagate { setup, kmax, rmax, q, t, data } => {
            propagate(setup.build()?, *kmax, *rmax, *q, t, data.as_deref())?
        }
        Command::MaximalScan { setup, beta, s, scale_sweep, times, radius } => {
            maximal_scan(&setup.build()?, *beta, *s, scale_sweep, *times, *radius)?
        }
        Command::TnuBound { nu_max, nu_step, trials, samples, ascent, seed } => {
            tnu_bound(*nu_max, *nu_step, *trials, *samples, *ascent, *seed)?
        }
        Command::Counterexample { setup, nmin, nmax, s } => counterexample(setup.build()?, *nmin, *nmax, s)?,
    };
    clear_kernel_cache();
    report.wall_time = Some(start.elapsed());
    Ok((report, checks))
}

fn bessel_check(kmin: u32, kmax: u32, range: (f64, f64), per_decade: usize) -> Result<(ExperimentReport, Vec<Check>)> {
    if kmin > kmax {
        usage!("--kmin {kmin} exceeds --kmax {kmax}");
    }
    if !(range.0 > 0.0 && range.1 > range.0) {
        usage!("--rmin and --rmax must satisfy 0 < rmin < rmax");
    }
    if per_decade == 0 {
        usage!("--per-decade must be positive");
    }
    let ks: Vec<u32> = (kmin..=kmax).collect();
    let lattices: Vec<Vec<f64>> = ks.iter().map(|&k| regime_lattice(k as f64, range.0, range.1, per_decade)).collect();
    let fits = fit_regime_constants(&ks, &lattices);
    let mut report = ExperimentReport::new(["k", "r", "regime", "lhs", "envelope", "constant", "satisfied"]);
    let mut checks = Vec::new();
    for (i, tag) in RegimeTag::ALL.iter().enumerate() {
        let fit = &fits[i];
        report.metadata.insert(format!("regime.{i}"), tag.name().into());
        report.metadata.insert(format!("regime.{}.constant", tag.name()), format!("{:?}", fit.big_c));
        report.metadata.insert(format!("regime.{}.decay", tag.name()), format!("{:?}", fit.small_c));
        report.metadata.insert(format!("regime.{}.spread", tag.name()), format!("{:?}", fit.spread));
        checks.push(Check::new(
            format!("regime-spread[{}]", tag.name()),
            fit.spread < 4.0,
            format!("{:.3} (< 4)", fit.spread),
        ));
        checks.push(Check::new(
            format!("regime-violations[{}]", tag.name()),
            fit.violations == 0,
            format!("{} at C = {:.4}", fit.violations, fit.big_c),
        ));
    }
    for (&k, rs) in ks.iter().zip(&lattices) {
        for &r in rs {
            let regime = classify_regime(k as f64, r);
            let i = RegimeTag::ALL.iter().position(|t| *t == regime).unwrap();
            let b = check_regime_bound(k, r, fits[i].big_c, fits[i].small_c)?;
            let row = vec![k as f64, r, i as f64, b.lhs, b.rhs_envelope, b.constant_used, b.satisfied as u8 as f64];
            report.push(row)?;
        }
    }
    Ok((report, checks))
}

fn radial_grid(r_max: f64, q: usize, scheme: &str) -> Result<RadialGrid> {
    let scheme = match scheme {
        "gl" => GridScheme::CompositeGaussLegendre,
        "uniform" => GridScheme::Uniform,
        other => usage!("--scheme must be gl or uniform, got {other:?}"),
    };
    make_grid(r_max, q, scheme).map_err(|e| Usage(format!("invalid --rmax/--q: {e}")).into())
}

fn hankel_selftest(
    setup: &PotentialSetup,
    kmax: usize,
    r_max: f64,
    q: usize,
    scheme: &str,
    export: Option<&Path>,
) -> Result<(ExperimentReport, Vec<Check>)> {
    let g = radial_grid(r_max, q, scheme)?;
    if let Some(path) = export {
        std::fs::write(path, g.to_csv()).with_context(|| format!("writing {}", path.display()))?;
    }
    let m = g.measure(setup.n());
    let bump = |centre: f64, width: f64, phase: f64| {
        let (centre, width) = (centre * r_max, width * r_max);
        ModeField::from_fn(0, 1, Space::Physical, &g, move |r| {
            Complex64::from_polar((-(r - centre).powi(2) / (2.0 * width * width)).exp(), phase * r)
        })
    };
    let f = bump(0.125, 0.02, 0.7);
    let other = bump(0.2, 0.035, -1.3);
    let mut report = ExperimentReport::new(["k", "nu", "involution", "isometry", "self_adjoint"]);
    for k in 0..=kmax {
        let nu = BesselOrder::new(setup.nu(k))?;
        let h = hankel_transform(setup, nu, &f, &g)?;
        let back = hankel_transform(setup, nu, &h, &g)?;
        let involution = relative_l2(&back.values, &f.values, &m);
        let isometry = (h.norm(&g, setup.n()) / f.norm(&g, setup.n()) - 1.0).abs();
        let mut h_other = hankel_transform(setup, nu, &other, &g)?;
        let mut hf = h.clone();
        hf.space = Space::Physical;
        h_other.space = Space::Physical;
        let gap = (hf.inner(&other, &g, setup.n()) - f.inner(&h_other, &g, setup.n())).norm();
        let adjoint = gap / (f.norm(&g, setup.n()) * other.norm(&g, setup.n()));
        report.push(vec![k as f64, nu.value(), involution, isometry, adjoint])?;
    }
    let worst = |col: &str| report.column(col).unwrap().into_iter().fold(0.0, f64::max);
    let checks = vec![
        Check::new("involution", worst("involution") <= 1e-6, format!("{:.2e} (<= 1e-6)", worst("involution"))),
        Check::new("isometry", worst("isometry") <= 1e-6, format!("{:.2e} (<= 1e-6)", worst("isometry"))),
        Check::new("self-adjoint", worst("self_adjoint") <= 1e-8, format!("{:.2e} (<= 1e-8)", worst("self_adjoint"))),
    ];
    Ok((report, checks))
}

/// Least-squares slope of `y` against `x` on linear axes, with its standard error.
fn linear_fit(rows: &[(f64, f64)]) -> (f64, f64) {
    let m = rows.len() as f64;
    let (mx, my) = rows.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0 / m, a.1 + p.1 / m));
    let sxx: f64 = rows.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = rows.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx;
    let ssr: f64 = rows.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
    (slope, (ssr / (m - 2.0) / sxx).sqrt())
}

fn ortho_scan(
    setup: &PotentialSetup,
    ks: &[usize],
    dmax: u32,
    r_max: f64,
    q: usize,
) -> Result<(ExperimentReport, Vec<Check>)> {
    if dmax < 2 {
        usage!("--dmax must be at least 2, got {dmax}");
    }
    let grids = GridPair::self_dual(radial_grid(r_max, q, "gl")?);
    let mut report = ExperimentReport::new(["k", "j", "jprime", "opnorm"]);
    let mut checks = Vec::new();
    let mut asymmetry = 0.0f64;
    for &k in ks {
        let mut rows = Vec::new();
        for d in 1..=dmax as i32 {
            for (j, jp) in [(0, d), (d, 0)] {
                let norm = almost_orthogonality_norm(setup, k, DyadicIndex(j), DyadicIndex(jp), &grids)?;
                let adjoint = adjoint_orthogonality_norm(setup, k, DyadicIndex(j), DyadicIndex(jp), &grids)?;
                asymmetry = asymmetry.max((norm - adjoint).abs());
                report.push(vec![k as f64, j as f64, jp as f64, norm])?;
                rows.push((d as f64, norm.log2()));
            }
        }
        let fit = linear_fit(&rows);
        report.fitted_slopes.insert(format!("log2_decay[{k}]"), fit);
        checks.push(Check::new(format!("decay[{k}]"), fit.0 <= -0.9, format!("{:.3} (<= -0.9)", fit.0)));
    }
    report.metadata.insert("asymmetry".into(), format!("{asymmetry:?}"));
    checks.push(Check::new("symmetry", asymmetry <= 1e-8, format!("{asymmetry:.2e} (<= 1e-8)")));
    Ok((report, checks))
}

fn panels(top: f64, width: f64) -> Vec<f64> {
    let count = (top / width).round() as usize;
    (0..=count).map(|i| top * i as f64 / count as f64).collect()
}

fn sobolev_check(
    setup: &PotentialSetup,
    ks: &[usize],
    s_list: &[f64],
    mmax_exp: f64,
) -> Result<(ExperimentReport, Vec<Check>)> {
    if !(1.5..=5.0).contains(&mmax_exp) {
        usage!("--mmax-exp must lie in [1.5, 5], got {mmax_exp}");
    }
    let grids = GridPair::self_dual(make_grid(16.0, 1024, GridScheme::CompositeGaussLegendre)?);
    let modes: Vec<ModeField> = (0..3)
        .map(|k| {
            let p = setup.nu(k) - setup.alpha();
            ModeField::from_real(k, 1, Space::Physical, &grids.physical, |r| {
                (1.3 * r).powf(p) * (-(1.3 * r).powi(2) / 2.0).exp()
            })
        })
        .collect();
    let l2: f64 = modes.iter().map(|m| m.norm_sqr(&grids.physical, setup.n())).sum::<f64>().sqrt();
    let plancherel = (sobolev_norm_hankel(setup, &modes, 0.0, 0.0, &grids)? / l2 - 1.0).abs();

    let top = 8.0 * 2f64.powf(mmax_exp);
    let grids = GridPair::new(RadialGrid::from_panels(&panels(24.0, 0.1), 16)?, RadialGrid::from_panels(&panels(top, 0.4), 16)?);
    let steps = (2.0 * mmax_exp).floor() as i32;
    let scales: Vec<f64> = (0..=steps).map(|j| 2f64.powf(j as f64 / 2.0)).collect();
    let scan = norm_equivalence_scan(setup, ks, s_list, &scales, &grids)?;

    let mut report = ExperimentReport::new(["k", "s", "sprime", "M", "ratio"]);
    report.metadata = scan.metadata.clone();
    report.metadata.insert("plancherel".into(), format!("{plancherel:?}"));
    report.fitted_slopes = scan.fitted_slopes.clone();
    for row in &scan.rows {
        report.push(vec![row[0], row[1], 0.0, row[2], row[3]])?;
    }
    let mut checks = vec![Check::new("plancherel", plancherel <= 1e-5, format!("{plancherel:.2e} (<= 1e-5)"))];
    for (name, (slope, _)) in &scan.fitted_slopes {
        checks.push(Check::new(format!("scale-trend {name}"), slope.abs() <= 0.05, format!("{slope:.4} (|.| <= 0.05)")));
    }
    Ok((report, checks))
}

/// Mode blocks of `r, Re a, Im a` rows, each opened by `# k=K ell=L`; rows
/// before any header belong to `k = 0, ell = 1`.
fn read_modes(text: &str) -> Result<Vec<(usize, usize, Vec<(f64, Complex64)>)>> {
    let mut blocks: Vec<(usize, usize, Vec<(f64, Complex64)>)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('#') {
            let (mut k, mut ell) = (None, 1);
            for part in header.split_whitespace() {
                match part.split_once('=') {
                    Some(("k", v)) => k = Some(v.parse().with_context(|| format!("data line {}: bad k", i + 1))?),
                    Some(("ell", v)) => ell = v.parse().with_context(|| format!("data line {}: bad ell", i + 1))?,
                    _ => {}
                }
            }
            if let Some(k) = k {
                blocks.push((k, ell, Vec::new()));
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: Option<Vec<f64>> = fields.iter().map(|f| f.parse().ok()).collect();
        let Some(v) = parsed.filter(|v| v.len() == 3) else {
            if blocks.is_empty() && i == 0 {
                continue;
            }
            bail!("data line {}: expected r, Re a, Im a", i + 1);
        };
        if blocks.is_empty() {
            blocks.push((0, 1, Vec::new()));
        }
        blocks.last_mut().unwrap().2.push((v[0], Complex64::new(v[1], v[2])));
    }
    for (k, ell, rows) in &blocks {
        if rows.len() < 2 || rows.windows(2).any(|p| p[1].0 <= p[0].0) {
            bail!("mode ({k}, {ell}) needs at least two rows with increasing r");
        }
    }
    Ok(blocks)
}

/// Linear interpolation, zero outside the sampled range.
fn interpolate(rows: &[(f64, Complex64)], r: f64) -> Complex64 {
    if r < rows[0].0 || r > rows[rows.len() - 1].0 {
        return Complex64::new(0.0, 0.0);
    }
    let i = rows.partition_point(|p| p.0 <= r).clamp(1, rows.len() - 1);
    let (a, b) = (rows[i - 1], rows[i]);
    let w = (r - a.0) / (b.0 - a.0);
    a.1 * (1.0 - w) + b.1 * w
}

fn propagate(
    setup: PotentialSetup,
    kmax: usize,
    r_max: f64,
    q: usize,
    times: &[f64],
    data: Option<&Path>,
) -> Result<(ExperimentReport, Vec<Check>)> {
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        usage!("--t values must be finite and nonnegative");
    }
    let grids = GridPair::self_dual(radial_grid(r_max, q, "gl")?);
    let initial = match data {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let modes = read_modes(&text)?
                .into_iter()
                .map(|(k, ell, rows)| ModeField::from_fn(k, ell, Space::Physical, &grids.physical, |r| interpolate(&rows, r)))
                .collect();
            InitialData::new(setup, grids, modes, kmax)?
        }
        None => {
            let p = setup.nu(0) - setup.alpha();
            InitialData::radial(setup, grids, |r| Complex64::new(r.powf(p) * (-r * r).exp(), 0.0))?
        }
    };
    let state = prepare(&initial)?;
    let mut report = ExperimentReport::new(["t", "k", "ell", "r", "re_u", "im_u", "abs_u"]);
    let mut drift = 0.0f64;
    for &t in times {
        let snap = evolve(&state, t)?;
        drift = drift.max((snap.norm(&state.grids, setup.n()) / initial.norm() - 1.0).abs());
        for m in &snap.modes {
            for (v, r) in m.values.iter().zip(state.grids.physical.nodes()) {
                report.push(vec![t, m.k as f64, m.ell as f64, *r, v.re, v.im, v.norm()])?;
            }
        }
    }
    report.metadata.insert("norm_drift".into(), format!("{drift:?}"));
    let checks = vec![Check::new("unitarity", drift <= 1e-6, format!("{drift:.2e} (<= 1e-6)"))];
    Ok((report, checks))
}

/// `N1..N2` with both ends powers of two.
fn scale_range(text: &str) -> Result<Vec<f64>> {
    let parsed = text.split_once("..").and_then(|(a, b)| Some((a.trim().parse::<f64>().ok()?, b.trim().parse::<f64>().ok()?)));
    let Some((lo, hi)) = parsed else {
        usage!("--scale-sweep must look like N1..N2, got {text:?}");
    };
    let power = |x: f64| x > 0.0 && x.log2().fract() == 0.0;
    if !(power(lo) && power(hi) && lo <= hi) {
        usage!("--scale-sweep ends must be powers of two with N1 <= N2, got {text:?}");
    }
    let (a, b) = (lo.log2() as i32, hi.log2() as i32);
    Ok((a..=b).map(|e| 2f64.powi(e)).collect())
}

fn maximal_scan(
    setup: &PotentialSetup,
    beta: f64,
    s: f64,
    sweep: &str,
    times: f64,
    radius: f64,
) -> Result<(ExperimentReport, Vec<Check>)> {
    let factors = scale_range(sweep)?;
    let w = WeightSpec::new(beta).map_err(|e| Usage(format!("invalid --beta: {e}")))?;
    if !(times > 0.0) {
        usage!("--times must be positive, got {times}");
    }
    if !(radius > 0.0) {
        usage!("--radius must be positive, got {radius}");
    }
    let report = weighted_ratio_scan(setup, w, s, &factors, radius, times)?;
    let checks = match report.slope("ratio") {
        Some(slope) => vec![Check::new("ratio-trend", slope <= 0.05, format!("{slope:.4} (<= 0.05)"))],
        None => vec![Check::new("ratio-trend", false, "fewer than 4 scales".into())],
    };
    Ok((report, checks))
}

fn tnu_bound(
    nu_max: f64,
    nu_step: f64,
    trials: usize,
    samples: usize,
    ascent: usize,
    seed: u64,
) -> Result<(ExperimentReport, Vec<Check>)> {
    if !(nu_max >= 0.0 && nu_step > 0.0) {
        usage!("--nu-max must be nonnegative and --nu-step positive");
    }
    if trials == 0 || samples == 0 {
        usage!("--trials and --samples must be positive");
    }
    let count = (nu_max / nu_step + 1e-9).floor() as usize;
    let orders = (0..=count).map(|i| i as f64 * nu_step).collect();
    let sweep = TnuSweep { orders, intervals: trials, samples, ascent_rounds: ascent, seed };
    let report = sweep.run()?;
    let mut maxima: Vec<f64> = order_maxima(&report).into_iter().map(|p| p.1).collect();
    let largest = maxima.iter().copied().fold(0.0, f64::max);
    maxima.sort_by(f64::total_cmp);
    let median = maxima[maxima.len() / 2];
    let mut checks = vec![Check::new(
        "max-over-median",
        largest <= 3.0 * median,
        format!("{:.3} (<= 3)", largest / median),
    )];
    match report.slope("norm") {
        Some(slope) => checks.push(Check::new("order-trend", slope.abs() <= 0.05, format!("{slope:.4} (|.| <= 0.05)"))),
        None => checks.push(Check::new("order-trend", false, "fewer than 4 orders".into())),
    }
    Ok((report, checks))
}

fn counterexample(setup: PotentialSetup, nmin: f64, nmax: f64, s_list: &[f64]) -> Result<(ExperimentReport, Vec<Check>)> {
    let range = scale_range(&format!("{nmin}..{nmax}")).map_err(|_| Usage(format!("--nmin and --nmax must be powers of two, got {nmin} and {nmax}")))?;
    if range.len() < 5 {
        usage!("the scan needs at least 5 scales between --nmin and --nmax");
    }
    if s_list.is_empty() {
        usage!("at least one --s is required");
    }
    let report = sharpness_scan(setup, &range, s_list)?;
    let n = setup.n() as f64;
    let mut checks = Vec::new();
    let mut expect = |name: String, slope: Option<f64>, target: f64| {
        let slope = slope.unwrap_or(f64::NAN);
        checks.push(Check::new(name, (slope - target).abs() <= 0.05, format!("{slope:.3} ({target:.3} +- 0.05)")));
    };
    expect("ustar-slope".into(), report.slope("ustar"), n / 2.0);
    for s in s_list {
        expect(format!("hs-slope[{s}]"), report.slope(&format!("hs_norm_sq[{s}]")), 2.0 * s + n - 0.5);
        expect(format!("ratio-slope[{s}]"), report.slope(&format!("ratio[{s}]")), 0.5 - 2.0 * s);
    }
    Ok((report, checks))
}
