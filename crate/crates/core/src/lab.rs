//! Seeded experiments: Zeroing run time against `Q0(r)`, the slowdown of
//! derivations as `r` approaches 1, and a repeated-root probe.
//!
//! All randomness flows from one `ChaCha8Rng` seeded by the config. Inputs are
//! drawn sequentially and the runs are then spread over threads with rayon;
//! results come back in draw order, so output is identical for any thread
//! count.

use std::fmt::Write as _;
use std::io::Write;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::poly::{Polynomial, Rat};
use crate::recurrence::Recurrence;
use crate::roots::all_roots_numeric;
use crate::zeroing::{Termination, Zeroing, ZeroingError, ZeroingOptions};

pub const CSV_HEADER: [&str; 7] =
    ["degree", "poly_id", "p_coeffs", "q0_at_r", "steps", "terminated", "q1_nonpos_step"];

/// Marker written for steps of runs that did not terminate.
pub const NA: &str = "NA";

#[derive(Debug, Error)]
pub enum LabError {
    #[error("no non-degenerate ZLRR of degree {degree} with coefficient bound {bound}")]
    NoValidZlrr { degree: usize, bound: u32 },
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Zeroing(#[from] ZeroingError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub min_degree: usize,
    pub max_degree: usize,
    pub polys_per_degree: usize,
    pub samples_per_poly: usize,
    pub coeff_bound: u32,
    pub beta_bound: i64,
    pub seed: u64,
    pub budget: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            min_degree: 3,
            max_degree: 6,
            polys_per_degree: 10,
            samples_per_poly: 500,
            coeff_bound: 9,
            beta_bound: 10,
            seed: 42,
            budget: crate::zeroing::DEFAULT_BUDGET,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), LabError> {
        if self.min_degree < 3 || self.max_degree < self.min_degree {
            return Err(LabError::Config("degrees must satisfy 3 <= min <= max".into()));
        }
        if self.coeff_bound == 0 || self.beta_bound <= 0 || self.budget == 0 {
            return Err(LabError::Config("bounds and budget must be positive".into()));
        }
        Ok(())
    }
}

/// Uniform ZLRR with `c_1 = 0`, `c_2..c_{L-1}` in `[0, bound]` and `c_L` in
/// `[1, bound]`, redrawn until non-degenerate.
///
/// Degree 2 always fails: `[0, c]` has support `{2}`.
pub fn random_zlrr<R: Rng>(degree: usize, coeff_bound: u32, rng: &mut R) -> Result<Recurrence, LabError> {
    if degree < 3 || coeff_bound == 0 {
        return Err(LabError::NoValidZlrr { degree, bound: coeff_bound });
    }
    loop {
        let mut c = vec![0u32; degree];
        for ci in c.iter_mut().take(degree - 1).skip(1) {
            *ci = rng.gen_range(0..=coeff_bound);
        }
        c[degree - 1] = rng.gen_range(1..=coeff_bound);
        if let Ok(rec) = Recurrence::new(c.into_iter().map(BigInt::from).collect()) {
            return Ok(rec);
        }
    }
}

/// Uniform integer vector in `[-bound, bound]^k`, not all zero.
pub fn random_beta<R: Rng>(k: usize, bound: i64, rng: &mut R) -> Vec<Rat> {
    loop {
        let v: Vec<i64> = (0..k).map(|_| rng.gen_range(-bound..=bound)).collect();
        if v.iter().any(|&x| x != 0) {
            return v.into_iter().map(|x| Rat::from_integer(x.into())).collect();
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub degree: usize,
    pub poly_id: usize,
    pub sample_id: usize,
    /// Coefficients of `P`, highest power first.
    pub p_coeffs: Vec<BigInt>,
    pub q0_at_r: f64,
    /// Exact sign of `Q0(r)`.
    pub sign: i8,
    pub steps: Option<usize>,
    pub terminated: bool,
    pub q1_nonpos_step: Option<usize>,
    pub tail_bound_ok: Option<bool>,
}

struct PolyJob {
    degree: usize,
    poly_id: usize,
    zeroing: Zeroing,
    r_mid: Rat,
    betas: Vec<Vec<Rat>>,
}

pub fn runtime_experiment(cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>, LabError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut jobs = Vec::new();
    let width = Rat::new(1.into(), BigInt::from(10u64).pow(12));
    for degree in cfg.min_degree..=cfg.max_degree {
        for poly_id in 0..cfg.polys_per_degree {
            let rec = random_zlrr(degree, cfg.coeff_bound, &mut rng)?;
            let zeroing = Zeroing::from_recurrence(&rec)?;
            let r_mid = zeroing.enclosure().refine(&width).map_err(ZeroingError::from)?.midpoint();
            let betas = (0..cfg.samples_per_poly)
                .map(|_| random_beta(degree, cfg.beta_bound, &mut rng))
                .collect();
            jobs.push(PolyJob { degree, poly_id, zeroing, r_mid, betas });
        }
    }
    let opts = ZeroingOptions { budget: cfg.budget, force: false, keep_trace: false };
    let tasks: Vec<(&PolyJob, usize)> =
        jobs.iter().flat_map(|j| (0..j.betas.len()).map(move |s| (j, s))).collect();
    tasks
        .par_iter()
        .map(|&(job, sample_id)| trial(job, sample_id, &opts))
        .collect()
}

fn trial(job: &PolyJob, sample_id: usize, opts: &ZeroingOptions) -> Result<TrialRecord, LabError> {
    let beta = &job.betas[sample_id];
    let tr = job.zeroing.run(beta, opts)?;
    let q0 = job.zeroing.q0(beta)?;
    let q0_at_r = q0.eval(&job.r_mid).to_f64().unwrap_or(f64::NAN);
    let p_coeffs = job
        .zeroing
        .poly()
        .coeffs()
        .iter()
        .rev()
        .map(|c| c.to_integer())
        .collect();
    let terminated = tr.terminated_at().is_some();
    Ok(TrialRecord {
        degree: job.degree,
        poly_id: job.poly_id,
        sample_id,
        p_coeffs,
        q0_at_r,
        sign: tr.sign_q0_at_r(),
        steps: tr.terminated_at(),
        terminated,
        q1_nonpos_step: terminated.then(|| tr.q1_nonpositive_at()),
        tail_bound_ok: tr.tail_bound_holds(),
    })
}

pub fn write_csv<W: Write>(records: &[TrialRecord], out: W) -> Result<(), LabError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        let coeffs: Vec<String> = r.p_coeffs.iter().map(BigInt::to_string).collect();
        w.write_record([
            r.degree.to_string(),
            r.poly_id.to_string(),
            coeffs.join(";"),
            format!("{}", r.q0_at_r),
            r.steps.map_or_else(|| NA.to_string(), |s| s.to_string()),
            r.terminated.to_string(),
            r.q1_nonpos_step.map_or_else(|| NA.to_string(), |s| s.to_string()),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a CSV written by [`write_csv`]. Fields the CSV does not carry are
/// filled in: `sample_id` counts rows within a polynomial, `sign` is -1 for
/// terminated rows and the sign of `q0_at_r` otherwise, `tail_bound_ok` is
/// left empty.
pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<TrialRecord>, LabError> {
    let mut rd = csv::Reader::from_reader(input);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(LabError::Config(format!("unexpected CSV header {header:?}")));
    }
    let mut out: Vec<TrialRecord> = Vec::new();
    for (line, row) in rd.records().enumerate() {
        let row = row?;
        let bad = |what: &str| LabError::Config(format!("row {}: bad {what}", line + 2));
        let opt = |s: &str| -> Result<Option<usize>, LabError> {
            if s == NA {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|_| bad("count"))
            }
        };
        let degree: usize = row[0].parse().map_err(|_| bad("degree"))?;
        let poly_id: usize = row[1].parse().map_err(|_| bad("poly_id"))?;
        let p_coeffs = row[2]
            .split(';')
            .map(|c| c.parse::<BigInt>().map_err(|_| bad("p_coeffs")))
            .collect::<Result<Vec<_>, _>>()?;
        let q0_at_r: f64 = row[3].parse().map_err(|_| bad("q0_at_r"))?;
        let terminated: bool = row[5].parse().map_err(|_| bad("terminated"))?;
        let sample_id = match out.last() {
            Some(prev) if prev.degree == degree && prev.poly_id == poly_id => prev.sample_id + 1,
            _ => 0,
        };
        out.push(TrialRecord {
            degree,
            poly_id,
            sample_id,
            p_coeffs,
            q0_at_r,
            sign: if terminated { -1 } else { crate::analysis::sign_f64(q0_at_r).max(0) },
            steps: opt(&row[4])?,
            terminated,
            q1_nonpos_step: opt(&row[6])?,
            tail_bound_ok: None,
        });
    }
    Ok(out)
}

/// Spearman rank correlation with average ranks for ties. `None` for fewer
/// than two points or a constant column.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let rx = ranks(xs);
    let ry = ranks(ys);
    let n = rx.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = avg;
        }
        i = j + 1;
    }
    out
}

/// Per-degree Spearman correlation of `|Q0(r)|` against steps over the
/// terminated records.
pub fn correlation_by_degree(records: &[TrialRecord]) -> Vec<(usize, usize, Option<f64>)> {
    let mut degrees: Vec<usize> = records.iter().map(|r| r.degree).collect();
    degrees.sort_unstable();
    degrees.dedup();
    degrees
        .into_iter()
        .map(|d| {
            let (xs, ys): (Vec<f64>, Vec<f64>) = records
                .iter()
                .filter(|r| r.degree == d && r.terminated)
                .map(|r| (r.q0_at_r.abs(), r.steps.unwrap_or(0) as f64))
                .unzip();
            (d, xs.len(), spearman(&xs, &ys))
        })
        .collect()
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Log-log scatter of steps against `|Q0(r)|`, one colour per degree.
/// Points with zero steps or `Q0(r) = 0` have no place on a log axis and are
/// left out.
pub fn scatter_svg(records: &[TrialRecord]) -> String {
    let (w, h, margin) = (720.0, 480.0, 60.0);
    let pts: Vec<(usize, f64, f64)> = records
        .iter()
        .filter(|r| r.terminated && r.steps.unwrap_or(0) > 0 && r.q0_at_r != 0.0)
        .map(|r| (r.degree, r.q0_at_r.abs().log10(), (r.steps.unwrap_or(1) as f64).log10()))
        .collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, 0.0f64, f64::MIN);
    for &(_, x, y) in &pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if pts.is_empty() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    let (x0, x1) = (x0.floor(), x1.ceil().max(x0.floor() + 1.0));
    let (y0, y1) = (y0.floor(), y1.ceil().max(y0.floor() + 1.0));
    let sx = |x: f64| margin + (x - x0) / (x1 - x0) * (w - 2.0 * margin);
    let sy = |y: f64| h - margin - (y - y0) / (y1 - y0) * (h - 2.0 * margin);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{margin}" y="{margin}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        w - 2.0 * margin,
        h - 2.0 * margin
    );
    for e in x0 as i32..=x1 as i32 {
        let x = sx(e as f64);
        let _ = writeln!(s, r#"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="black"/>"#, h - margin, h - margin + 5.0);
        let _ = writeln!(s, r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">1e{e}</text>"#, h - margin + 18.0);
    }
    for e in y0 as i32..=y1 as i32 {
        let y = sy(e as f64);
        let _ = writeln!(s, r#"<line x1="{:.1}" y1="{y:.1}" x2="{margin}" y2="{y:.1}" stroke="black"/>"#, margin - 5.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">1e{e}</text>"#, margin - 8.0, y + 4.0);
    }
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">|Q0(r)|</text>"#, w / 2.0, h - 15.0);
    let _ = writeln!(
        s,
        r#"<text x="15" y="{:.1}" text-anchor="middle" transform="rotate(-90 15 {:.1})">steps</text>"#,
        h / 2.0,
        h / 2.0
    );
    let mut degrees: Vec<usize> = pts.iter().map(|p| p.0).collect();
    degrees.sort_unstable();
    degrees.dedup();
    for (i, d) in degrees.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let _ = writeln!(s, r#"<g fill="{color}" fill-opacity="0.5">"#);
        for &(_, x, y) in pts.iter().filter(|p| p.0 == *d) {
            let _ = writeln!(s, r#"<circle cx="{:.1}" cy="{:.1}" r="2"/>"#, sx(x), sy(y));
        }
        let _ = writeln!(s, "</g>");
        let ly = margin + 15.0 + 16.0 * i as f64;
        let _ = writeln!(s, r#"<circle cx="{:.1}" cy="{:.1}" r="4" fill="{color}"/>"#, w - margin - 70.0, ly - 4.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{ly:.1}">degree {d}</text>"#, w - margin - 60.0);
    }
    s.push_str("</svg>\n");
    s
}

/// `x^{s+2} - x - 1` for `s` in `range`, as recurrences `[0; s] ++ [1, 1]`.
pub fn slowdown_family(range: std::ops::RangeInclusive<usize>) -> Vec<Recurrence> {
    range
        .map(|s| {
            let mut c = vec![BigInt::zero(); s];
            c.push(1.into());
            c.push(1.into());
            Recurrence::new(c).expect("gcd of {s+1, s+2} is 1")
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlowdownRecord {
    pub order: usize,
    pub r: f64,
    /// `None` when the budget ran out.
    pub t0: Option<usize>,
    pub derived_degree: Option<usize>,
}

/// Derivation with prefix `(1, -1)` for every member of `family`.
pub fn slowdown_experiment(family: &[Recurrence], budget: usize) -> Result<Vec<SlowdownRecord>, LabError> {
    let width = Rat::new(1.into(), BigInt::from(10u64).pow(15));
    family
        .iter()
        .map(|rec| {
            let z = Zeroing::from_recurrence(rec)?;
            let r = z
                .enclosure()
                .refine(&width)
                .map_err(ZeroingError::from)?
                .midpoint()
                .to_f64()
                .unwrap_or(f64::NAN);
            let gamma = [Rat::from_integer(1.into()), Rat::from_integer((-1).into())];
            let (t0, derived_degree) = match z.run_modified(&gamma, budget) {
                Ok(d) => (Some(d.t0), d.p.degree()),
                Err(ZeroingError::BudgetExhausted { .. }) => (None, None),
                Err(e) => return Err(e.into()),
            };
            Ok(SlowdownRecord { order: rec.order(), r, t0, derived_degree })
        })
        .collect()
}

/// Prints, for a characteristic polynomial with repeated roots, the value
/// `Q0(r_1) / prod_j (r_1 - r_j)^{m_j}` next to `q(1,t) / r^t` along a forced
/// run. Nothing is checked; the output is for inspection only.
pub fn repeated_root_probe<W: Write + ?Sized>(
    p: &Polynomial,
    beta: &[Rat],
    horizon: usize,
    out: &mut W,
) -> Result<(), LabError> {
    let z = Zeroing::new(p)?;
    let roots = all_roots_numeric(p, 30).map_err(ZeroingError::from)?;
    let r1 = roots.roots()[0].to_c64();
    let mut den = num_complex::Complex64::new(1.0, 0.0);
    for r in &roots.roots()[1..] {
        den *= (r1 - r.to_c64()).powu(r.multiplicity as u32);
    }
    let width = Rat::new(1.into(), BigInt::from(10u64).pow(40));
    let enc = z.enclosure().refine(&width).map_err(ZeroingError::from)?;
    let q0 = z.q0(beta)?;
    let num = q0.eval(&enc.midpoint()).to_f64().unwrap_or(f64::NAN);
    writeln!(out, "P = {p}; multiplicities {:?}", roots.roots().iter().map(|r| r.multiplicity).collect::<Vec<_>>())?;
    writeln!(out, "candidate a1 = {}", num / den.re)?;
    let opts = ZeroingOptions { budget: horizon, force: true, keep_trace: true };
    let tr = z.run(beta, &opts)?;
    let q1 = tr.q1_sequence();
    let r = enc.midpoint();
    let mut t = 25;
    while t < q1.len() {
        writeln!(out, "t={t}\tq(1,t)/r^t={}", crate::analysis::scaled_by_power(&q1[t], &r, t))?;
        t *= 2;
    }
    if let Termination::TerminatedAt(t) = tr.termination() {
        writeln!(out, "run terminated at t={t}")?;
    }
    Ok(())
}
