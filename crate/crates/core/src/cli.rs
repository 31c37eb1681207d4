//! Command-line front end. [`run`] takes the arguments and output streams and
//! returns the process exit code, so it can be driven from tests.
//!
//! Exit codes: 0 success, 1 invalid input, 2 mathematical refusal, 3 budget
//! exhausted.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

use crate::analysis::{binet_squarefree, predict_divergence, reconstruct_terms, AnalysisError};
use crate::lab::{
    correlation_by_degree, read_csv, repeated_root_probe, runtime_experiment, scatter_svg, slowdown_experiment,
    slowdown_family, write_csv, ExperimentConfig, LabError,
};
use crate::poly::{parse_rational, Polynomial, Rat};
use crate::recurrence::{Recurrence, RecurrenceError, RecurrenceFile};
use crate::roots::RootsError;
use crate::zeroing::{derive_plrr, DerivationResult, Termination, Zeroing, ZeroingError, ZeroingOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_REFUSED: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "zlrr", version, about = "Zeroing Algorithm, derived recurrences and divergence analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Input {
    /// Recurrence coefficients c_1,...,c_L (comma separated)
    #[arg(long, allow_hyphen_values = true)]
    pub coeffs: Option<String>,
    /// JSON recurrence file: {"coefficients": [...], "initial": [...]}
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a recurrence as PLRR or s-deep ZLRR
    Classify {
        #[command(flatten)]
        input: Input,
    },
    /// Derive a PLRR from a recurrence with leading coefficients (1, -n) or a given prefix
    Convert {
        #[command(flatten)]
        input: Input,
        /// Second leading coefficient is -n; must be below the principal root
        #[arg(long, default_value_t = 1)]
        n: u64,
        /// Explicit prefix gamma_1,...,gamma_m (overrides --n)
        #[arg(long, allow_hyphen_values = true)]
        gamma: Option<String>,
        #[arg(long, default_value_t = crate::zeroing::DEFAULT_BUDGET)]
        budget: usize,
        /// Write the derived recurrence as JSON
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the Zeroing Algorithm on Q0 = beta_1 x^(k-1) + ... + beta_k
    Zeroing {
        #[command(flatten)]
        input: Input,
        /// beta_1,...,beta_k (integers or p/q)
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        /// Print one row of Q_t coefficients per step
        #[arg(long)]
        trace: bool,
        /// Iterate up to the budget even when Q0(r) >= 0
        #[arg(long)]
        force: bool,
        #[arg(long, default_value_t = crate::zeroing::DEFAULT_BUDGET)]
        budget: usize,
        /// Write the trace here instead of standard output
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Predict the sign of divergence from initial values a_1..a_k
    Predict {
        #[command(flatten)]
        input: Input,
        /// a_1,...,a_k (falls back to "initial" in --file)
        #[arg(long, allow_hyphen_values = true)]
        init: Option<String>,
    },
    /// Roots and Binet coefficients 1/P'(r_i) of a squarefree characteristic polynomial
    Binet {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 30)]
        digits: u32,
        /// Also print the first N reconstructed unit-impulse terms
        #[arg(long)]
        terms: Option<usize>,
    },
    /// Seeded experiments
    Lab {
        #[arg(long, value_enum, default_value_t = Experiment::Runtime)]
        experiment: Experiment,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        polys: usize,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 3)]
        min_degree: usize,
        #[arg(long, default_value_t = 6)]
        max_degree: usize,
        #[arg(long, default_value_t = 9)]
        coeff_bound: u32,
        #[arg(long, default_value_t = 10)]
        beta_bound: i64,
        /// Largest s in the x^(s+2)-x-1 family (slowdown)
        #[arg(long, default_value_t = 8)]
        max_s: usize,
        #[arg(long, default_value_t = crate::zeroing::DEFAULT_BUDGET)]
        budget: usize,
        /// CSV output path (runtime)
        #[arg(long)]
        out: Option<PathBuf>,
        /// SVG scatter plot path (runtime)
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Polynomial for the repeated-root probe, e.g. "x^3-x^2-5x-3"
        #[arg(long)]
        poly: Option<String>,
        /// beta for the repeated-root probe
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<String>,
    },
    /// Render a runtime CSV as a log-log SVG scatter plot
    Plot {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Experiment {
    Runtime,
    Slowdown,
    Probe,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INPUT, message: message.into() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::input(e.to_string())
    }
}

impl From<RecurrenceError> for Failure {
    fn from(e: RecurrenceError) -> Self {
        Failure::input(e.to_string())
    }
}

impl From<RootsError> for Failure {
    fn from(e: RootsError) -> Self {
        let code = match e {
            RootsError::PrecisionUnreachable { .. } => EXIT_BUDGET,
            RootsError::NotCharacteristic(_) => EXIT_REFUSED,
            _ => EXIT_INPUT,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<ZeroingError> for Failure {
    fn from(e: ZeroingError) -> Self {
        let code = match &e {
            ZeroingError::BudgetExhausted { .. } => EXIT_BUDGET,
            ZeroingError::GammaNotPositiveAtRoot | ZeroingError::NTooLarge | ZeroingError::InvariantViolated(_) => {
                EXIT_REFUSED
            }
            ZeroingError::Roots(r) => return r.clone().into(),
            _ => EXIT_INPUT,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Roots(r) => r.into(),
            AnalysisError::Zeroing(z) => z.into(),
            AnalysisError::AllZeroInit | AnalysisError::Recurrence(_) | AnalysisError::Poly(_) => {
                Failure::input(e.to_string())
            }
            _ => Failure { code: EXIT_REFUSED, message: e.to_string() },
        }
    }
}

impl From<LabError> for Failure {
    fn from(e: LabError) -> Self {
        match e {
            LabError::Zeroing(z) => z.into(),
            other => Failure::input(other.to_string()),
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        Command::Classify { input } => classify(&input, out),
        Command::Convert { input, n, gamma, budget, out: path } => {
            convert(&input, n, gamma.as_deref(), budget, path.as_deref(), out)
        }
        Command::Zeroing { input, beta, trace, force, budget, out: path } => {
            zeroing(&input, &beta, trace, force, budget, path.as_deref(), out)
        }
        Command::Predict { input, init } => predict(&input, init.as_deref(), out),
        Command::Binet { input, digits, terms } => binet(&input, digits, terms, out),
        Command::Lab {
            experiment,
            seed,
            polys,
            samples,
            min_degree,
            max_degree,
            coeff_bound,
            beta_bound,
            max_s,
            budget,
            out: path,
            svg,
            poly,
            beta,
        } => {
            let cfg = ExperimentConfig {
                min_degree,
                max_degree,
                polys_per_degree: polys,
                samples_per_poly: samples,
                coeff_bound,
                beta_bound,
                seed,
                budget,
            };
            match experiment {
                Experiment::Runtime => lab_runtime(&cfg, path.as_deref(), svg.as_deref(), out),
                Experiment::Slowdown => lab_slowdown(max_s, budget, out),
                Experiment::Probe => lab_probe(poly.as_deref(), beta.as_deref(), budget, out),
            }
        }
        Command::Plot { csv, out: path } => plot(&csv, &path, out),
    }
}

fn parse_list(s: &str, what: &str) -> Result<Vec<Rat>, Failure> {
    s.split(',')
        .map(|t| parse_rational(t).ok_or_else(|| Failure::input(format!("bad {what} value {:?}", t.trim()))))
        .collect()
}

/// Raw coefficients and optional initial values, before validation.
fn read_input(input: &Input) -> Result<(Vec<BigInt>, Option<Vec<Rat>>), Failure> {
    match (&input.coeffs, &input.file) {
        (Some(_), Some(_)) => Err(Failure::input("give either --coeffs or --file, not both")),
        (None, None) => Err(Failure::input("one of --coeffs or --file is required")),
        (Some(c), None) => {
            let coeffs = c
                .split(',')
                .map(|t| t.trim().parse::<BigInt>().map_err(|_| Failure::input(format!("bad coefficient {:?}", t.trim()))))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((coeffs, None))
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
            let file = RecurrenceFile::parse(&text)?;
            let coeffs = file.raw_coefficients()?;
            Ok((coeffs, file.initial_values()?))
        }
    }
}

fn read_recurrence(input: &Input) -> Result<(Recurrence, Option<Vec<Rat>>), Failure> {
    let (coeffs, init) = read_input(input)?;
    Ok((Recurrence::new(coeffs)?, init))
}

fn classify(input: &Input, out: &mut dyn Write) -> Result<i32, Failure> {
    let (coeffs, _) = read_input(input)?;
    match Recurrence::new(coeffs) {
        Ok(rec) => {
            writeln!(out, "{}", rec.classification())?;
            writeln!(out, "characteristic polynomial: {}", rec.characteristic_polynomial())?;
            writeln!(out, "relation: {}", rec.relation_string("G"))?;
        }
        Err(e @ RecurrenceError::Degenerate { .. }) => writeln!(out, "{e}")?,
        Err(e) => return Err(e.into()),
    }
    Ok(EXIT_OK)
}

fn convert(
    input: &Input,
    n: u64,
    gamma: Option<&str>,
    budget: usize,
    path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let (rec, _) = read_recurrence(input)?;
    let d: DerivationResult = match gamma {
        Some(g) => Zeroing::from_recurrence(&rec)?.run_modified(&parse_list(g, "gamma")?, budget)?,
        None => derive_plrr(&rec, n, budget)?,
    };
    writeln!(out, "derived polynomial: {}", d.p)?;
    match &d.derived_recurrence {
        Some(plrr) => writeln!(out, "derived recurrence: {}", plrr.relation_string("H"))?,
        None => writeln!(out, "derived recurrence: none (polynomial is not monic and integral)")?,
    }
    writeln!(out, "quotient: {}", d.quotient)?;
    writeln!(out, "t0: {}", d.t0)?;
    if let Some(path) = path {
        let Some(plrr) = &d.derived_recurrence else {
            return Err(Failure { code: EXIT_REFUSED, message: "no derived recurrence to write".into() });
        };
        let json = serde_json::to_string_pretty(&RecurrenceFile::from_recurrence(plrr, None))
            .map_err(|e| Failure::input(e.to_string()))?;
        std::fs::write(path, json + "\n")?;
    }
    Ok(EXIT_OK)
}

fn trace_row(q: &Polynomial, k: usize) -> String {
    (1..=k).map(|n| q.coeff(k - n).to_string()).collect::<Vec<_>>().join("\t")
}

fn zeroing(
    input: &Input,
    beta: &str,
    trace: bool,
    force: bool,
    budget: usize,
    path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let (rec, _) = read_recurrence(input)?;
    let beta = parse_list(beta, "beta")?;
    let z = Zeroing::from_recurrence(&rec)?;
    let opts = ZeroingOptions { budget, force, keep_trace: trace };
    let tr = z.run(&beta, &opts)?;
    let k = z.k();
    let mut text = String::new();
    if trace {
        for q in tr.polys().iter().skip(1) {
            text.push_str(&trace_row(q, k));
            text.push('\n');
        }
    }
    let code = match tr.termination() {
        Termination::TerminatedAt(t) => {
            text.push_str(&format!("terminated t={t}\n"));
            EXIT_OK
        }
        Termination::WontTerminate { sign } => {
            writeln!(out, "Q0(r) >= 0: algorithm will not terminate")?;
            text.push_str(&format!("non-terminating sign={sign}\n"));
            EXIT_REFUSED
        }
        Termination::Budget { steps } => {
            let sign = tr.sign_q0_at_r();
            if sign >= 0 {
                text.push_str(&format!("non-terminating sign={sign}\n"));
            }
            writeln!(out, "budget of {steps} steps exhausted")?;
            EXIT_BUDGET
        }
    };
    match path {
        Some(p) => {
            std::fs::write(p, &text)?;
            if let Some(t) = tr.terminated_at() {
                writeln!(out, "terminated t={t}; final Q={}", tr.final_q())?;
            }
        }
        None => out.write_all(text.as_bytes())?,
    }
    Ok(code)
}

fn predict(input: &Input, init: Option<&str>, out: &mut dyn Write) -> Result<i32, Failure> {
    let (rec, file_init) = read_recurrence(input)?;
    let init = match (init, file_init) {
        (Some(s), _) => parse_list(s, "init")?,
        (None, Some(v)) => v,
        (None, None) => return Err(Failure::input("initial values required (--init or \"initial\" in --file)")),
    };
    let verdict = predict_divergence(&rec, &init)?;
    writeln!(out, "{verdict}")?;
    Ok(EXIT_OK)
}

fn binet(input: &Input, digits: u32, terms: Option<usize>, out: &mut dyn Write) -> Result<i32, Failure> {
    let (rec, _) = read_recurrence(input)?;
    let p = rec.characteristic_polynomial();
    let b = binet_squarefree(&p, digits)?;
    let prec = digits as usize;
    writeln!(out, "P(x) = {p}")?;
    writeln!(out, "root\t1/P'(root)")?;
    for (r, c) in b.roots.roots().iter().zip(&b.coeffs) {
        writeln!(out, "{:.prec$}\t{:.prec$}", r.value, c)?;
    }
    if let Some(n) = terms {
        let t = reconstruct_terms(&b, n)?;
        let shown: Vec<String> = t.iter().map(|x| format!("{:.6}", x)).collect();
        writeln!(out, "terms: {}", shown.join(", "))?;
    }
    Ok(EXIT_OK)
}

fn lab_runtime(
    cfg: &ExperimentConfig,
    csv_path: Option<&Path>,
    svg_path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let records = runtime_experiment(cfg)?;
    writeln!(out, "trials: {}", records.len())?;
    for (degree, n, rho) in correlation_by_degree(&records) {
        let rho = rho.map_or_else(|| "n/a".to_string(), |r| format!("{r:.4}"));
        writeln!(out, "degree {degree}: terminated {n}, spearman {rho}")?;
    }
    if let Some(p) = csv_path {
        write_csv(&records, File::create(p)?)?;
    }
    if let Some(p) = svg_path {
        std::fs::write(p, scatter_svg(&records))?;
    }
    Ok(EXIT_OK)
}

fn lab_slowdown(max_s: usize, budget: usize, out: &mut dyn Write) -> Result<i32, Failure> {
    if max_s == 0 {
        return Err(Failure::input("--max-s must be at least 1"));
    }
    let family = slowdown_family(1..=max_s);
    let recs = slowdown_experiment(&family, budget)?;
    writeln!(out, "s\tr\tt0\tderived_degree")?;
    let mut exhausted = false;
    for (s, rec) in (1..).zip(&recs) {
        let t0 = rec.t0.map_or_else(|| "NA".to_string(), |t| t.to_string());
        let deg = rec.derived_degree.map_or_else(|| "NA".to_string(), |t| t.to_string());
        writeln!(out, "{s}\t{:.12}\t{t0}\t{deg}", rec.r)?;
        exhausted |= rec.t0.is_none();
    }
    Ok(if exhausted { EXIT_BUDGET } else { EXIT_OK })
}

fn lab_probe(poly: Option<&str>, beta: Option<&str>, budget: usize, out: &mut dyn Write) -> Result<i32, Failure> {
    let p: Polynomial = poly
        .ok_or_else(|| Failure::input("--poly is required for the probe"))?
        .parse()
        .map_err(|e: crate::poly::PolyError| Failure::input(e.to_string()))?;
    let beta = parse_list(beta.ok_or_else(|| Failure::input("--beta is required for the probe"))?, "beta")?;
    repeated_root_probe(&p, &beta, budget.min(2000), &mut *out)?;
    Ok(EXIT_OK)
}

fn plot(csv_path: &Path, svg_path: &Path, out: &mut dyn Write) -> Result<i32, Failure> {
    let file = File::open(csv_path).map_err(|e| Failure::input(format!("{}: {e}", csv_path.display())))?;
    let records = read_csv(BufReader::new(file))?;
    std::fs::write(svg_path, scatter_svg(&records))?;
    writeln!(out, "plotted {} records to {}", records.len(), svg_path.display())?;
    Ok(EXIT_OK)
}
