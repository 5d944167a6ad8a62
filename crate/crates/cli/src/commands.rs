//! Subcommand implementations. Each one validates its whole configuration up
//! front and reports every problem at once.

use std::f64::consts::PI;
use std::path::PathBuf;

use mnl_core::io::{read_field, write_field};
use mnl_core::littlewood_paley::max_admissible_level;
use mnl_core::mixed_norm::InterpolationParams;
use mnl_core::space_norms::space_norm;
use mnl_core::verifier::ratios::check_balance;
use mnl_core::verifier::{
    FieldKind, Lemma1Suite, MixedNppSuite, NppSuite, SeqNppSuite, SobolevParams, SobolevSuite, SubaddSuite,
    SweepSuite, VerificationReport, SLOPE_TOLERANCE,
};
use mnl_core::{build_family, Anisotropy, GridSpec, MixedExponents, SampledField, SpaceFamily, SpaceParams};
use serde::Serialize;

use crate::config::{Checker, ConfigError, Settings};
use crate::output::{combined_csv, write_atomic, Envelope};

pub const FAMILIES: [&str; 6] = ["npp", "mixed-npp", "seq-npp", "sobolev", "lemma1", "subadd"];

const DEFAULT_TRIALS: usize = 100;

fn core_err(e: mnl_core::Error) -> ConfigError {
    ConfigError::single(e.to_string())
}

fn parse_family(c: &mut Checker, field: &str, raw: Option<&str>) -> Option<SpaceFamily> {
    match raw.unwrap_or("F") {
        "F" | "f" => Some(SpaceFamily::F),
        "B" | "b" => Some(SpaceFamily::B),
        other => {
            c.fail(format!("{field}: `{other}` is not B or F"));
            None
        }
    }
}

fn parse_kind(c: &mut Checker, raw: &str) -> Option<FieldKind> {
    match raw.trim() {
        "random-rect" => Some(FieldKind::RandomRect),
        "dirichlet" => Some(FieldKind::Dirichlet),
        "gaussian-bump" => Some(FieldKind::GaussianBump),
        other => {
            c.fail(format!(
                "kind: `{other}` is not one of random-rect, dirichlet, gaussian-bump"
            ));
            None
        }
    }
}

fn grid(c: &mut Checker, s: &Settings, n: usize, samples: usize) -> Option<GridSpec> {
    let samples = c.samples(s.samples.as_deref(), samples, n)?;
    let periods = match &s.period {
        Some(_) => c.list("period", s.period.as_deref(), "1", n)?,
        None => vec![2.0 * PI; n],
    };
    c.check("grid", GridSpec::new(samples, periods))
}

fn exponents(c: &mut Checker, field: &str, raw: Option<&str>, default: &str, n: usize) -> Option<MixedExponents> {
    let v = c.list(field, raw, default, n)?;
    c.check(field, MixedExponents::new(v))
}

fn aniso(c: &mut Checker, s: &Settings, n: usize) -> Option<Anisotropy> {
    let v = c.list("aniso", s.aniso.as_deref(), "1", n)?;
    c.check("aniso", Anisotropy::new(v))
}

/// Half-widths must stay strictly below Nyquist on every axis.
fn check_rect(c: &mut Checker, field: &str, grid: &GridSpec, rect: &[f64]) {
    for (axis, r) in rect.iter().enumerate() {
        if *r >= grid.nyquist(axis) {
            c.fail(format!(
                "{field}: half-width {r} on axis {} reaches Nyquist {}",
                axis + 1,
                grid.nyquist(axis)
            ));
        }
    }
}

fn check_order(c: &mut Checker, p: &MixedExponents, r: &MixedExponents) {
    for (axis, (pk, rk)) in p.as_slice().iter().zip(r.as_slice()).enumerate() {
        if pk > rk {
            c.fail(format!("p/r: p_{} = {pk} exceeds r_{} = {rk}", axis + 1, axis + 1));
        }
    }
}

fn check_level(c: &mut Checker, grid: &GridSpec, aniso: &Anisotropy, jmax: usize) {
    match max_admissible_level(grid, aniso) {
        Some(top) if jmax <= top => {}
        Some(top) => c.fail(format!("jmax: {jmax} exceeds the largest level {top} this grid resolves")),
        None => c.fail("jmax: grid too coarse for any Littlewood-Paley level"),
    }
}

/// A fully validated verification job.
enum Job {
    Npp(NppSuite),
    Mixed(MixedNppSuite),
    Seq(SeqNppSuite),
    Sobolev(SobolevSuite),
    Lemma1(Lemma1Suite),
    Subadd(SubaddSuite),
}

impl Job {
    fn run(&self) -> mnl_core::Result<VerificationReport> {
        match self {
            Job::Npp(s) => s.run(),
            Job::Mixed(s) => s.run(),
            Job::Seq(s) => s.run(),
            Job::Sobolev(s) => s.run(),
            Job::Lemma1(s) => s.run(),
            Job::Subadd(s) => s.run(),
        }
    }
}

fn plan(family: &str, s: &Settings, c: &mut Checker) -> Option<Job> {
    let seed = s.seed.unwrap_or(0);
    let trials = s.trials.unwrap_or(DEFAULT_TRIALS);
    match family {
        "npp" => {
            let n = s.n.unwrap_or(1);
            let grid = grid(c, s, n, 256);
            let p = c.scalar("p", s.p.as_deref(), "1");
            let r = c.scalar("r", s.r.as_deref(), "inf");
            let radius = c.scalar("R", s.radius.as_deref(), "8");
            let kind = parse_kind(c, s.kind.as_deref().unwrap_or("random-rect"));
            if let (Some(p), Some(r)) = (p, r) {
                if p > r {
                    c.fail(format!("p/r: p = {p} exceeds r = {r}"));
                }
            }
            if let (Some(grid), Some(radius)) = (&grid, radius) {
                check_rect(c, "R", grid, &vec![radius / (n as f64).sqrt(); n]);
            }
            let (grid, p, r, radius, kind) = (grid?, p?, r?, radius?, kind?);
            Some(Job::Npp(NppSuite {
                grid,
                p,
                r,
                radius,
                kind,
                trials,
                seed,
            }))
        }
        "mixed-npp" => {
            let n = s.n.unwrap_or(2);
            let grid = grid(c, s, n, 64);
            let p = exponents(c, "p", s.p.as_deref(), "1,2", n);
            let r = exponents(c, "r", s.r.as_deref(), "2,inf", n);
            let rect = c.list("R", s.radius.as_deref(), "4,8", n);
            let kind = parse_kind(c, s.kind.as_deref().unwrap_or("random-rect"));
            if let (Some(p), Some(r)) = (&p, &r) {
                check_order(c, p, r);
            }
            if let (Some(grid), Some(rect)) = (&grid, &rect) {
                check_rect(c, "R", grid, rect);
            }
            let (grid, p, r, rect, kind) = (grid?, p?, r?, rect?, kind?);
            Some(Job::Mixed(MixedNppSuite {
                grid,
                p,
                r,
                rect,
                kind,
                trials,
                seed,
            }))
        }
        "seq-npp" => {
            let n = s.n.unwrap_or(2);
            let grid = grid(c, s, n, 32);
            let aniso = aniso(c, s, n);
            let p = exponents(c, "p", s.p.as_deref(), "1,2", n);
            let r = exponents(c, "r", s.r.as_deref(), "2,2", n);
            let q = c.scalar("q", s.q.as_deref(), "2");
            let jmax = s.jmax.unwrap_or(2);
            if let (Some(p), Some(r)) = (&p, &r) {
                check_order(c, p, r);
                if p == r {
                    c.fail("p/r: the sequence inequality needs p != r");
                }
                if !r.is_finite() {
                    c.fail("r: every r_k must be finite");
                }
            }
            if let (Some(grid), Some(aniso)) = (&grid, &aniso) {
                check_level(c, grid, aniso, jmax);
            }
            let (grid, aniso, p, r, q) = (grid?, aniso?, p?, r?, q?);
            Some(Job::Seq(SeqNppSuite {
                grid,
                aniso,
                jmax,
                p,
                r,
                q,
                trials,
                seed,
            }))
        }
        "sobolev" => {
            let n = s.n.unwrap_or(2);
            let grid = grid(c, s, n, 64);
            let aniso = aniso(c, s, n);
            let p = exponents(c, "p", s.p.as_deref(), "1", n);
            let r = exponents(c, "r", s.r.as_deref(), "2", n);
            let q = c.scalar("q", s.q.as_deref(), "2");
            let target = parse_family(c, "family", s.family.as_deref());
            let jmax = s.jmax.unwrap_or(3);
            let (smooth, t) = (s.s.unwrap_or(1.0), s.t.unwrap_or(0.0));
            if smooth <= t {
                c.fail(format!("s/t: need s > t, got s = {smooth}, t = {t}"));
            }
            if let (Some(p), Some(r)) = (&p, &r) {
                check_order(c, p, r);
                if target == Some(SpaceFamily::F) && !(p.is_finite() && r.is_finite()) {
                    c.fail("p/r: the F-space embedding needs finite exponents");
                }
                if let Some(aniso) = &aniso {
                    c.check("s/t", check_balance(aniso, smooth, t, p, r));
                }
            }
            if let (Some(grid), Some(aniso)) = (&grid, &aniso) {
                check_level(c, grid, aniso, jmax);
            }
            let (grid, aniso, p, r, q, target) = (grid?, aniso?, p?, r?, q?, target?);
            Some(Job::Sobolev(SobolevSuite {
                grid,
                aniso,
                jmax,
                params: SobolevParams {
                    s: smooth,
                    t,
                    p,
                    r,
                    q,
                    target,
                },
                trials,
                seed,
            }))
        }
        "lemma1" => {
            let base = Lemma1Suite::default();
            let q = c.scalar("q", s.q.as_deref(), "1")?;
            let search = InterpolationParams { q, ..base.search };
            c.check("q", search.validate());
            Some(Job::Lemma1(Lemma1Suite {
                trials,
                search,
                seed,
                ..base
            }))
        }
        "subadd" => {
            let n = s.n.unwrap_or(2);
            let grid = grid(c, s, n, 16);
            let p = exponents(c, "p", s.p.as_deref(), "1/2,inf", n);
            let rect = c.list("R", s.radius.as_deref(), "3", n);
            if let (Some(grid), Some(rect)) = (&grid, &rect) {
                check_rect(c, "R", grid, rect);
            }
            let (grid, p, rect) = (grid?, p?, rect?);
            Some(Job::Subadd(SubaddSuite {
                grid,
                rect,
                p,
                trials,
                seed,
            }))
        }
        other => {
            c.fail(format!("ineq: `{other}` is not one of {} or all", FAMILIES.join(", ")));
            None
        }
    }
}

/// Outcome of a subcommand: the exit status to report.
pub struct Outcome {
    pub passed: bool,
}

fn emit(command: &str, reports: &[VerificationReport], s: &Settings) -> Result<Outcome, ConfigError> {
    let envelope = Envelope::new(command, reports);
    let json = serde_json::to_string_pretty(&envelope).map_err(|e| ConfigError::single(e.to_string()))?;
    if let Some(path) = &s.csv {
        write_atomic(path, combined_csv(reports).as_bytes())
            .map_err(|e| ConfigError::single(format!("csv: cannot write {}: {e}", path.display())))?;
    }
    match &s.json {
        Some(path) => {
            write_atomic(path, json.as_bytes())
                .map_err(|e| ConfigError::single(format!("json: cannot write {}: {e}", path.display())))?;
            for f in &envelope.families {
                println!("{}: {:?} (c_emp = {})", f.family, f.verdict, f.c_emp);
            }
        }
        None => println!("{json}"),
    }
    Ok(Outcome {
        passed: envelope.verdict.passed(),
    })
}

pub fn verify(s: &Settings) -> Result<Outcome, ConfigError> {
    let ineq = s.ineq.as_deref().unwrap_or("all");
    let mut c = Checker::default();
    let jobs: Vec<Job> = if ineq == "all" {
        // families keep their own defaults; only the sampling controls are shared
        let shared = Settings {
            seed: s.seed,
            trials: s.trials,
            ..Default::default()
        };
        FAMILIES.iter().filter_map(|f| plan(f, &shared, &mut c)).collect()
    } else {
        plan(ineq, s, &mut c).into_iter().collect()
    };
    c.finish()?;
    let reports = jobs
        .iter()
        .map(Job::run)
        .collect::<mnl_core::Result<Vec<_>>>()
        .map_err(core_err)?;
    emit("verify", &reports, s)
}

pub fn sweep(s: &Settings) -> Result<Outcome, ConfigError> {
    let mut c = Checker::default();
    let n = s.n.unwrap_or(1);
    let samples = c.samples(s.samples.as_deref(), 256, 1).map(|v| v[0]);
    let p = c.scalar("p", s.p.as_deref(), "1");
    let r = c.scalar("r", s.r.as_deref(), "inf");
    let radii = s
        .radii
        .as_deref()
        .unwrap_or("2,4,8,16,32,64")
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| c.fail("radii: not a list of numbers"))
        .ok();
    let kinds: Vec<FieldKind> = s
        .kinds
        .as_deref()
        .unwrap_or("dirichlet,gaussian-bump,random-rect")
        .split(',')
        .filter_map(|k| parse_kind(&mut c, k))
        .collect();
    if let (Some(p), Some(r)) = (p, r) {
        if p > r {
            c.fail(format!("p/r: p = {p} exceeds r = {r}"));
        }
    }
    if let (Some(radii), Some(samples)) = (&radii, samples) {
        if radii.len() < 3 {
            c.fail(format!("radii: a sweep needs at least 3 radii, got {}", radii.len()));
        }
        let nyquist = samples as f64 / 2.0;
        if let Some(bad) = radii.iter().find(|x| !(**x > 0.0 && **x < nyquist)) {
            c.fail(format!("radii: {bad} is outside (0, Nyquist = {nyquist})"));
        }
    }
    c.finish()?;
    let suite = SweepSuite {
        ndim: n,
        samples: samples.unwrap_or_default(),
        p: p.unwrap_or_default(),
        r: r.unwrap_or_default(),
        radii: radii.unwrap_or_default(),
        kinds,
        trials: s.trials.unwrap_or(20),
        seed: s.seed.unwrap_or(0),
        tolerance: s.tolerance.unwrap_or(SLOPE_TOLERANCE),
    };
    let report = suite.run().map_err(core_err)?;
    emit("sweep", &[report], s)
}

fn load_input(c: &mut Checker, s: &Settings) -> Option<SampledField> {
    match &s.input {
        Some(path) => c.check("input", read_field(path)),
        None => {
            c.fail("input: an MNF1 field file is required");
            None
        }
    }
}

fn level(c: &mut Checker, s: &Settings, field: &SampledField, aniso: &Anisotropy) -> Option<usize> {
    match s.jmax {
        Some(j) => {
            check_level(c, field.spec(), aniso, j);
            Some(j)
        }
        None => {
            let top = max_admissible_level(field.spec(), aniso);
            if top.is_none() {
                c.fail("jmax: grid too coarse for any Littlewood-Paley level");
            }
            top
        }
    }
}

pub fn norm(s: &Settings) -> Result<Outcome, ConfigError> {
    let mut c = Checker::default();
    let field = load_input(&mut c, s);
    let n = field.as_ref().map_or(s.n.unwrap_or(1), |f| f.spec().ndim());
    let aniso = aniso(&mut c, s, n);
    let p = exponents(&mut c, "p", s.p.as_deref(), "2", n);
    let q = c.scalar("q", s.q.as_deref(), "2");
    let family = parse_family(&mut c, "family", s.family.as_deref());
    let jmax = match (&field, &aniso) {
        (Some(f), Some(a)) => level(&mut c, s, f, a),
        _ => None,
    };
    let params = match (aniso.clone(), p, q, family) {
        (Some(a), Some(p), Some(q), Some(fam)) => c.check("params", SpaceParams::new(fam, s.s.unwrap_or(0.0), a, p, q)),
        _ => None,
    };
    c.finish()?;
    let (field, aniso, jmax, params) = (field.unwrap(), aniso.unwrap(), jmax.unwrap(), params.unwrap());
    let family = build_family(field.spec(), &aniso, jmax).map_err(core_err)?;
    let bands = family.decompose(&field).map_err(core_err)?;
    let value = space_norm(&bands, &params).map_err(core_err)?;
    println!("{value}");
    Ok(Outcome { passed: true })
}

#[derive(Serialize)]
struct DecomposeSummary {
    jmax: usize,
    bands: Vec<PathBuf>,
}

pub fn decompose(s: &Settings) -> Result<Outcome, ConfigError> {
    let mut c = Checker::default();
    let field = load_input(&mut c, s);
    let n = field.as_ref().map_or(1, |f| f.spec().ndim());
    let aniso = aniso(&mut c, s, n);
    let jmax = match (&field, &aniso) {
        (Some(f), Some(a)) => level(&mut c, s, f, a),
        _ => None,
    };
    if s.out_dir.is_none() {
        c.fail("out_dir: a directory for the band files is required");
    }
    c.finish()?;
    let (field, aniso, jmax) = (field.unwrap(), aniso.unwrap(), jmax.unwrap());
    let dir = s.out_dir.clone().unwrap();
    std::fs::create_dir_all(&dir)
        .map_err(|e| ConfigError::single(format!("out_dir: cannot create {}: {e}", dir.display())))?;
    let family = build_family(field.spec(), &aniso, jmax).map_err(core_err)?;
    let bands = family.decompose(&field).map_err(core_err)?;
    let mut paths = Vec::with_capacity(bands.len());
    for (j, band) in bands.iter().enumerate() {
        let path = dir.join(format!("band_{j:02}.mnf1"));
        let tmp = dir.join(format!(".band_{j:02}.mnf1.tmp"));
        write_field(band, &tmp).map_err(core_err)?;
        std::fs::rename(&tmp, &path)
            .map_err(|e| ConfigError::single(format!("out_dir: cannot write {}: {e}", path.display())))?;
        paths.push(path);
    }
    let summary = DecomposeSummary { jmax, bands: paths };
    println!("{}", serde_json::to_string_pretty(&summary).map_err(|e| ConfigError::single(e.to_string()))?);
    Ok(Outcome { passed: true })
}
