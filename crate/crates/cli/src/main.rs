//! `cantor-spectra`: evaluate the quarter Cantor transform, emit spectral
//! function data, and run the spectrum and operator checks.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 usage or configuration
//! error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use cantor_spectra::digits::{invariance_check, orthogonality_check};
use cantor_spectra::operators::{cuntz_check, lemma_us1_check, w_tilde_bijection_check};
use cantor_spectra::product::{muhat_atoms, muhat_trunc, MAX_ATOM_LEVEL};
use cantor_spectra::spectral::{
    completeness_defect, format_significant, required_radius, sample_grid, CSV_SIGNIFICANT_DIGITS,
};
use cantor_spectra::{CheckReport, Component, DigitSystem, Grid64, ProductConfig64};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "cantor-spectra", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate the truncated transform at t, with its tail bound and the atom-sum cross-check.
    EvalMu(EvalMuArgs),
    /// Emit c0, c1 and c0+c1 on a grid (defaults: 16 factors, 128 terms).
    Figure1(Figure1Args),
    /// Exact orthogonality plus completeness defect for a candidate spectrum.
    CheckSpectrum(CheckSpectrumArgs),
    /// Cuntz relations, invariance, the U_p/S_1 intertwining and the W bijection.
    CheckOperators(CheckOperatorsArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SetKind {
    Canonical,
    Scaled,
    Additive,
}

#[derive(Args, Debug)]
struct GridArgs {
    #[arg(long, default_value_t = -2.0, allow_negative_numbers = true)]
    from: f64,
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    to: f64,
    #[arg(long, default_value_t = 0.01)]
    step: f64,
}

impl GridArgs {
    fn grid(&self) -> Result<Grid64, String> {
        Grid64::new(self.from, self.to, self.step).map_err(|e| e.to_string())
    }
}

#[derive(Args, Debug)]
struct EvalMuArgs {
    #[arg(long, allow_negative_numbers = true)]
    t: f64,
    #[arg(long, default_value_t = 16)]
    factors: u32,
    /// Atom-oracle level (default: min(factors, 20)).
    #[arg(long)]
    atom_level: Option<u32>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args, Debug)]
struct Figure1Args {
    #[command(flatten)]
    grid: GridArgs,
    /// Level m: the sums run over 2^m frequencies.
    #[arg(long = "m", alias = "level", default_value_t = 7)]
    level: u32,
    #[arg(long, default_value_t = 16)]
    factors: u32,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args, Debug)]
struct CheckSpectrumArgs {
    #[arg(long, value_enum)]
    set: SetKind,
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    p: i64,
    #[arg(long = "m", alias = "level", default_value_t = 12)]
    level: u32,
    #[arg(long, default_value_t = 20)]
    factors: u32,
    #[command(flatten)]
    grid: GridArgs,
    /// Largest accepted deficiency 1 - c(t).
    #[arg(long, default_value_t = 1e-3)]
    threshold: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CheckOperatorsArgs {
    #[arg(long, allow_negative_numbers = true)]
    p: i64,
    #[arg(long = "m", alias = "level", default_value_t = 8)]
    level: u32,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Outcome {
    Pass,
    Fail,
}

fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>, String> {
    match path {
        Some(p) => File::create(p)
            .map(|f| Box::new(BufWriter::new(f)) as Box<dyn Write>)
            .map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), String> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| e.to_string())?;
    writeln!(out)
        .and_then(|_| out.flush())
        .map_err(|e| e.to_string())
}

fn sig(x: f64) -> String {
    format_significant(x, CSV_SIGNIFICANT_DIGITS)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct EvalMuOutput {
    t: f64,
    factors: u32,
    value: f64,
    tail_bound: f64,
    atom_level: u32,
    atom_value: f64,
    oracle_difference: f64,
}

fn eval_mu(args: &EvalMuArgs) -> Result<Outcome, String> {
    let cfg =
        ProductConfig64::new(args.factors, args.t.abs().max(1.0)).map_err(|e| e.to_string())?;
    let atom_level = args.atom_level.unwrap_or(args.factors.min(20));
    if atom_level == 0 || atom_level > MAX_ATOM_LEVEL {
        return Err(format!("atom level must be in 1..={MAX_ATOM_LEVEL}"));
    }
    let value = muhat_trunc(args.t, &cfg).map_err(|e| e.to_string())?;
    let atom_value = muhat_atoms(args.t, atom_level).map_err(|e| e.to_string())?;
    let report = EvalMuOutput {
        t: args.t,
        factors: args.factors,
        value,
        tail_bound: cfg.tail_bound(),
        atom_level,
        atom_value,
        oracle_difference: (value - atom_value).abs(),
    };
    let mut out = output(None)?;
    match args.format {
        Format::Json => write_json(&mut out, &report)?,
        _ => {
            let text = format!(
                "t = {}\nfactors = {}\nvalue = {}\ntail_bound = {}\natom_level = {}\natom_value = {}\noracle_difference = {}\n",
                sig(report.t),
                report.factors,
                sig(report.value),
                sig(report.tail_bound),
                report.atom_level,
                sig(report.atom_value),
                sig(report.oracle_difference),
            );
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| e.to_string())?;
        }
    }
    Ok(Outcome::Pass)
}

fn figure1(args: &Figure1Args) -> Result<Outcome, String> {
    let grid = args.grid.grid()?;
    let components = [
        Component::Residue(0),
        Component::Residue(1),
        Component::ResidueSum(0, 1),
    ];
    let radius = required_radius(&components, &grid, args.level).map_err(|e| e.to_string())?;
    let cfg = ProductConfig64::new(args.factors, radius).map_err(|e| e.to_string())?;
    let sample = sample_grid(&components, &grid, args.level, &cfg).map_err(|e| e.to_string())?;
    let mut out = output(args.out.as_ref())?;
    match args.format {
        Format::Json => write_json(&mut out, &sample)?,
        _ => sample
            .write_csv(&mut out)
            .and_then(|_| out.flush())
            .map_err(|e| e.to_string())?,
    }
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct SpectrumOutput<'a> {
    orthogonality: &'a CheckReport,
    completeness: cantor_spectra::DefectReport64,
    pass: bool,
}

fn check_spectrum(args: &CheckSpectrumArgs) -> Result<Outcome, String> {
    let ds = match args.set {
        SetKind::Canonical => DigitSystem::canonical(),
        SetKind::Scaled => DigitSystem::scaled(args.p).map_err(|e| e.to_string())?,
        SetKind::Additive => DigitSystem::additive(args.p).map_err(|e| e.to_string())?,
    };
    if args.threshold.is_nan() || args.threshold <= 0.0 {
        return Err("threshold must be positive".into());
    }
    let grid = args.grid.grid()?;
    let set = ds.enumerate(args.level).map_err(|e| e.to_string())?;
    let orthogonality = orthogonality_check(&set).map_err(|e| e.to_string())?;
    let radius = required_radius(&[Component::Spectrum(ds.clone())], &grid, args.level)
        .map_err(|e| e.to_string())?;
    let cfg = ProductConfig64::new(args.factors, radius).map_err(|e| e.to_string())?;
    let defect = completeness_defect(&ds, &grid, args.level, &cfg).map_err(|e| e.to_string())?;
    let completeness = defect.report(args.threshold);
    let pass = orthogonality.pass() && completeness.pass;
    eprintln!("{orthogonality}");
    eprintln!(
        "{} completeness set={} m={} maxDeficiency={} maxOvershoot={}",
        if completeness.pass { "PASS" } else { "FAIL" },
        ds,
        args.level,
        sig(completeness.max_deficiency),
        sig(completeness.max_overshoot)
    );
    let mut out = output(args.out.as_ref())?;
    write_json(
        &mut out,
        &SpectrumOutput {
            orthogonality: &orthogonality,
            completeness,
            pass,
        },
    )?;
    Ok(if pass { Outcome::Pass } else { Outcome::Fail })
}

fn check_operators(args: &CheckOperatorsArgs) -> Result<Outcome, String> {
    if args.p < 1 || args.p % 2 == 0 {
        return Err(format!("p must be an odd positive integer, got {}", args.p));
    }
    let reports = vec![
        cuntz_check(args.level),
        invariance_check(args.level),
        lemma_us1_check(args.p, args.level),
        w_tilde_bijection_check(args.p, args.level),
    ]
    .into_iter()
    .collect::<Result<Vec<_>, _>>()
    .map_err(|e| e.to_string())?;
    let mut out = output(args.out.as_ref())?;
    match args.format {
        Format::Json => {
            for r in &reports {
                eprintln!("{r}");
            }
            write_json(&mut out, &reports)?;
        }
        _ => {
            for r in &reports {
                writeln!(out, "{r}").map_err(|e| e.to_string())?;
            }
            out.flush().map_err(|e| e.to_string())?;
        }
    }
    Ok(if reports.iter().all(CheckReport::pass) {
        Outcome::Pass
    } else {
        Outcome::Fail
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let result = match &cli.command {
        Command::EvalMu(a) => eval_mu(a),
        Command::Figure1(a) => figure1(a),
        Command::CheckSpectrum(a) => check_spectrum(a),
        Command::CheckOperators(a) => check_operators(a),
    };
    match result {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
