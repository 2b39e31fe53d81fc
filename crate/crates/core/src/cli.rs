//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for runtime or budget failures, 2 for usage errors.

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::construction::{construct_pw, construct_rm, load_info_set, CodeConfig};
use crate::dyadic::DyadicRational;
use crate::error::Error;
use crate::oracle::{
    ensemble_average_exact, ensemble_average_mc, exact_spectrum, Measurement, MonteCarloEstimate,
    WeightHistogram,
};
use crate::pretransform::{crc_transform, pac_transform, random_transform, BitString, PreTransform};
use crate::report::{CodeSection, Entry, SpectrumReport, TransformSection};
use crate::scl::collect_low_weight;
use crate::spectrum::{avg_nmin, avg_spectrum};

/// Environment variable consulted for the default worker count.
pub const THREADS_ENV: &str = "POLAR_SPECTRUM_THREADS";

#[derive(Debug, Parser)]
#[command(name = "polar-spectrum", version, about = "Weight spectra of pre-transformed polar codes")]
pub struct Cli {
    /// Worker threads for enumeration and sampling loops (results do not depend on it).
    #[arg(long, global = true, env = THREADS_ENV)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ensemble-average spectrum E[N_d] by the exact recursion.
    AvgSpectrum(AvgSpectrumArgs),
    /// Average number of minimum-weight codewords, d_min = smallest row weight.
    Nmin(CodeArgs),
    /// Spectrum of one concrete pre-transformed code.
    ExactSpectrum(ExactSpectrumArgs),
    /// Ensemble spectrum by sampling transforms or by exhaustive enumeration.
    Ensemble(EnsembleArgs),
    /// Print the information set, one index per line.
    InfoSet(CodeArgs),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Construction {
    Rm,
    Pw,
    File(PathBuf),
}

impl FromStr for Construction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "rm" => Ok(Construction::Rm),
            "pw" => Ok(Construction::Pw),
            _ => match s.strip_prefix("file:") {
                Some(p) if !p.is_empty() => Ok(Construction::File(p.into())),
                _ => Err(format!("expected rm, pw or file:PATH, got {s:?}")),
            },
        }
    }
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Construction::Rm => f.write_str("rm"),
            Construction::Pw => f.write_str("pw"),
            Construction::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TransformSpec {
    Identity,
    Random(u64),
    Pac(String),
    Crc { poly: String, k_prime: usize },
}

impl FromStr for TransformSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "identity" {
            return Ok(TransformSpec::Identity);
        }
        let (kind, arg) = s
            .split_once(':')
            .ok_or_else(|| format!("expected identity, random:SEED, pac:POLY or crc:POLY,KPRIME, got {s:?}"))?;
        match kind {
            "random" => arg
                .parse()
                .map(TransformSpec::Random)
                .map_err(|_| format!("bad seed {arg:?}")),
            "pac" => {
                BitString::parse(arg).map_err(|e| e.to_string())?;
                Ok(TransformSpec::Pac(arg.to_string()))
            }
            "crc" => {
                let (poly, kp) = arg
                    .split_once(',')
                    .ok_or_else(|| format!("expected crc:POLY,KPRIME, got {s:?}"))?;
                BitString::parse(poly).map_err(|e| e.to_string())?;
                let k_prime = kp.parse().map_err(|_| format!("bad K' {kp:?}"))?;
                Ok(TransformSpec::Crc {
                    poly: poly.to_string(),
                    k_prime,
                })
            }
            _ => Err(format!("unknown transform kind {kind:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodSpec {
    Brute,
    Scl(usize),
    Exhaustive,
}

impl FromStr for MethodSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "brute" => Ok(MethodSpec::Brute),
            "exhaustive" => Ok(MethodSpec::Exhaustive),
            _ => match s.strip_prefix("scl:").map(str::parse::<usize>) {
                Some(Ok(l)) if l >= 1 => Ok(MethodSpec::Scl(l)),
                _ => Err(format!("expected brute, exhaustive or scl:L with L >= 1, got {s:?}")),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct CodeArgs {
    /// Code length N (a power of two).
    #[arg(long)]
    pub n: usize,
    /// Code dimension K; optional with file:PATH, where it must match the file if given.
    #[arg(long)]
    pub k: Option<usize>,
    /// Information-set rule: rm, pw or file:PATH.
    #[arg(long)]
    pub construction: Construction,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Render decimals with this many fractional digits (round half to even).
    #[arg(long)]
    pub round: Option<u32>,
    /// Write to a file instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AvgSpectrumArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    /// Largest weight reported.
    #[arg(long)]
    pub dmax: usize,
    /// Check total mass (needs dmax = N), zero mass below d_min and parity zeros.
    #[arg(long)]
    pub verify: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ExactSpectrumArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    /// identity, random:SEED, pac:POLY or crc:POLY,KPRIME.
    #[arg(long, default_value = "identity")]
    pub transform: TransformSpec,
    /// brute or scl:L.
    #[arg(long, default_value = "brute")]
    pub method: MethodSpec,
    /// Largest weight reported (default N).
    #[arg(long)]
    pub dmax: Option<usize>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct EnsembleArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    /// Number of sampled transforms.
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    /// Master seed; sample k uses the k-th derived seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// brute, scl:L, or exhaustive (exact average over every transform).
    #[arg(long, default_value = "brute")]
    pub method: MethodSpec,
    /// Largest weight reported (default N).
    #[arg(long)]
    pub dmax: Option<usize>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn build_code(args: &CodeArgs, k_override: Option<usize>) -> Result<CodeConfig, CliError> {
    let k = k_override.or(args.k);
    let cfg = match &args.construction {
        Construction::Rm | Construction::Pw => {
            let k = k.ok_or_else(|| CliError::Usage("--k is required for rm and pw".into()))?;
            if args.construction == Construction::Rm {
                construct_rm(args.n, k)?
            } else {
                construct_pw(args.n, k)?
            }
        }
        Construction::File(path) => {
            let cfg = load_info_set(path, args.n)?;
            if let Some(k) = k {
                if k != cfg.k() {
                    return Err(CliError::Runtime(format!(
                        "{} lists {} indices, expected {k}",
                        path.display(),
                        cfg.k()
                    )));
                }
            }
            cfg
        }
    };
    Ok(cfg)
}

fn code_section(cfg: &CodeConfig, args: &CodeArgs) -> CodeSection {
    CodeSection {
        n: cfg.n(),
        k: cfg.k(),
        construction: args.construction.to_string(),
        info_set: cfg.info_set().to_vec(),
    }
}

fn check_dmax(dmax: Option<usize>, n: usize) -> Result<usize, CliError> {
    match dmax {
        None => Ok(n),
        Some(d) if (1..=n).contains(&d) => Ok(d),
        Some(d) => Err(CliError::Usage(format!("--dmax {d} outside [1, {n}]"))),
    }
}

fn render_exact(v: &DyadicRational, round: Option<u32>) -> String {
    match round {
        Some(digits) => v.to_decimal_rounded(digits),
        None => v.to_decimal(),
    }
}

fn render_float(v: f64, round: Option<u32>) -> String {
    match round {
        Some(digits) => format!("{v:.*}", digits as usize),
        None => v.to_string(),
    }
}

fn exact_entry(d: usize, v: &DyadicRational, round: Option<u32>) -> Entry {
    Entry {
        d,
        exact: Some(v.into()),
        decimal: render_exact(v, round),
        variance: None,
        samples: None,
        saturated: None,
    }
}

fn histogram_entries(h: &WeightHistogram, dmax: usize, round: Option<u32>, scl: bool) -> Vec<Entry> {
    (1..=dmax)
        .filter(|&d| h.count(d) > 0)
        .map(|d| {
            let mut e = exact_entry(d, &DyadicRational::from(h.count(d)), round);
            if scl {
                e.saturated = Some(h.is_saturated(d));
            }
            e
        })
        .collect()
}

fn monte_carlo_entries(est: &MonteCarloEstimate, dmax: usize, round: Option<u32>) -> Vec<Entry> {
    let scl = matches!(est.method(), Measurement::Scl { .. });
    (1..=dmax)
        .filter(|&d| est.sum(d) > 0)
        .map(|d| Entry {
            d,
            exact: None,
            decimal: render_float(est.mean(d), round),
            variance: Some(est.variance(d)),
            samples: Some(est.samples()),
            saturated: scl.then(|| est.is_saturated(d)),
        })
        .collect()
}

fn ensemble_section() -> TransformSection {
    TransformSection {
        kind: "ensemble".into(),
        seed: None,
        polynomial: None,
        k_prime: None,
    }
}

fn emit(report: &SpectrumReport, out: &OutputArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let text = match out.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    match &out.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Runtime(e.to_string())),
    }
}

fn cmd_avg_spectrum(args: &AvgSpectrumArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = build_code(&args.code, None)?;
    let dmax = check_dmax(Some(args.dmax), cfg.n())?;
    if args.verify && dmax != cfg.n() {
        return Err(CliError::Usage(format!("--verify needs --dmax {}", cfg.n())));
    }
    let spectrum = avg_spectrum(&cfg, dmax)?;
    if args.verify {
        let problems = spectrum.check_invariants();
        if !problems.is_empty() {
            return Err(CliError::Runtime(format!("verification failed: {}", problems.join("; "))));
        }
    }
    let report = SpectrumReport {
        code: code_section(&cfg, &args.code),
        transform: ensemble_section(),
        method: "recursion".into(),
        list_size: None,
        samples: None,
        seed: None,
        entries: spectrum
            .iter()
            .map(|(d, v)| exact_entry(d, v, args.out.round))
            .collect(),
    };
    emit(&report, &args.out, stdout)
}

fn cmd_nmin(args: &CodeArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = build_code(args, None)?;
    let (dmin, value) = avg_nmin(&cfg)?;
    let report = SpectrumReport {
        code: code_section(&cfg, args),
        transform: ensemble_section(),
        method: "recursion".into(),
        list_size: None,
        samples: None,
        seed: None,
        entries: vec![exact_entry(dmin, &value, None)],
    };
    stdout
        .write_all(report.to_json().as_bytes())
        .map_err(|e| CliError::Runtime(e.to_string()))
}

fn build_transform(
    args: &ExactSpectrumArgs,
) -> Result<(CodeConfig, PreTransform, TransformSection), CliError> {
    let mut section = TransformSection {
        kind: String::new(),
        seed: None,
        polynomial: None,
        k_prime: None,
    };
    let out = match &args.transform {
        TransformSpec::Identity => {
            section.kind = "identity".into();
            let cfg = build_code(&args.code, None)?;
            let t = PreTransform::identity(&cfg);
            (cfg, t)
        }
        TransformSpec::Random(seed) => {
            section.kind = "random".into();
            section.seed = Some(*seed);
            let cfg = build_code(&args.code, None)?;
            let t = random_transform(&cfg, *seed);
            (cfg, t)
        }
        TransformSpec::Pac(poly) => {
            section.kind = "pac".into();
            section.polynomial = Some(poly.clone());
            let cfg = build_code(&args.code, None)?;
            let coeffs = BitString::parse(poly)?;
            let t = pac_transform(&cfg, coeffs.bits())?;
            (cfg, t)
        }
        TransformSpec::Crc { poly, k_prime } => {
            section.kind = "crc".into();
            section.polynomial = Some(poly.clone());
            section.k_prime = Some(*k_prime);
            let k = args
                .code
                .k
                .ok_or_else(|| CliError::Usage("--k is required with a crc transform".into()))?;
            let outer = build_code(&args.code, Some(*k_prime))?;
            let g = BitString::parse(poly)?;
            crc_transform(&outer, k, g.bits())?
        }
    };
    Ok((out.0, out.1, section))
}

fn cmd_exact_spectrum(args: &ExactSpectrumArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let (cfg, t, section) = build_transform(args)?;
    let dmax = check_dmax(args.dmax, cfg.n())?;
    let (method, list_size, hist) = match args.method {
        MethodSpec::Brute => {
            let h = exact_spectrum(&cfg, &t).map_err(|e| match e {
                Error::BudgetExceeded { .. } => {
                    CliError::Runtime(format!("{e}; use --method scl:L for large codes"))
                }
                e => e.into(),
            })?;
            ("brute", None, h)
        }
        MethodSpec::Scl(l) => ("scl", Some(l), collect_low_weight(&cfg, &t, l)?),
        MethodSpec::Exhaustive => {
            return Err(CliError::Usage(
                "exhaustive applies to the ensemble command".into(),
            ))
        }
    };
    let report = SpectrumReport {
        code: code_section(&cfg, &args.code),
        transform: section,
        method: method.into(),
        list_size,
        samples: None,
        seed: None,
        entries: histogram_entries(&hist, dmax, args.out.round, list_size.is_some()),
    };
    emit(&report, &args.out, stdout)
}

fn cmd_ensemble(args: &EnsembleArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = build_code(&args.code, None)?;
    let dmax = check_dmax(args.dmax, cfg.n())?;
    let report = match args.method {
        MethodSpec::Exhaustive => {
            let avg = ensemble_average_exact(&cfg)?;
            SpectrumReport {
                code: code_section(&cfg, &args.code),
                transform: ensemble_section(),
                method: "exhaustive-ensemble".into(),
                list_size: None,
                samples: Some(avg.transforms()),
                seed: None,
                entries: (1..=dmax)
                    .filter(|&d| !avg.mean(d).is_zero())
                    .map(|d| exact_entry(d, &avg.mean(d), args.out.round))
                    .collect(),
            }
        }
        MethodSpec::Brute | MethodSpec::Scl(_) => {
            let (measure, list_size) = match args.method {
                MethodSpec::Scl(l) => (Measurement::Scl { list_size: l }, Some(l)),
                _ => (Measurement::Brute, None),
            };
            let est = ensemble_average_mc(&cfg, args.seed, args.samples, measure)?;
            SpectrumReport {
                code: code_section(&cfg, &args.code),
                transform: TransformSection {
                    kind: "random".into(),
                    seed: Some(args.seed),
                    polynomial: None,
                    k_prime: None,
                },
                method: "monte-carlo".into(),
                list_size,
                samples: Some(args.samples),
                seed: Some(args.seed),
                entries: monte_carlo_entries(&est, dmax, args.out.round),
            }
        }
    };
    emit(&report, &args.out, stdout)
}

fn cmd_info_set(args: &CodeArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = build_code(args, None)?;
    let mut text = String::new();
    for i in cfg.info_set() {
        text.push_str(&i.to_string());
        text.push('\n');
    }
    stdout
        .write_all(text.as_bytes())
        .map_err(|e| CliError::Runtime(e.to_string()))
}

/// Parses `argv` and runs the command, writing reports to `stdout`.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let text = e.to_string();
            let text = text.strip_prefix("error: ").unwrap_or(&text).trim_end();
            return Err(CliError::Usage(text.to_string()));
        }
        Err(e) => {
            // --help / --version
            stdout
                .write_all(e.to_string().as_bytes())
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            return Ok(());
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        pool = pool.num_threads(t);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Runtime(format!("cannot start worker pool: {e}")))?;
    let mut buf = Vec::new();
    pool.install(|| match &cli.command {
        Command::AvgSpectrum(a) => cmd_avg_spectrum(a, &mut buf),
        Command::Nmin(a) => cmd_nmin(a, &mut buf),
        Command::ExactSpectrum(a) => cmd_exact_spectrum(a, &mut buf),
        Command::Ensemble(a) => cmd_ensemble(a, &mut buf),
        Command::InfoSet(a) => cmd_info_set(a, &mut buf),
    })?;
    stdout
        .write_all(&buf)
        .and_then(|()| stdout.flush())
        .map_err(|e| CliError::Runtime(e.to_string()))
}
