//! Command-line surface for the chainlet experiments and checks.
//!
//! Exit codes: 0 when the verdict passes, 1 when it fails, 2 on usage errors
//! and malformed input.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chainlet::forms::{
    integrate_element_chain, integrate_poly_chain, stokes_residual, Domain, FormJet, Mode, PolyForm,
};
use chainlet::lab::{run_experiment, Params, EXPERIMENTS};
use chainlet::norms::{lower_bound, upper_bound, Decomposition};
use chainlet::{ElementChain, PolyChain};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Parser)]
#[command(name = "chainlet", version, about = "Polyhedral chains, chainlet norms and the Stokes family of identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run or list the built-in experiments.
    Experiment {
        #[command(subcommand)]
        action: ExperimentAction,
    },
    /// Integrate a polynomial form over a chain.
    Integrate {
        /// Chain JSON: a polyhedral chain (`terms`) or an element chain (`entries`).
        #[arg(long)]
        chain: PathBuf,
        /// Polynomial form JSON.
        #[arg(long)]
        form: PathBuf,
        /// Polynomial exactness of the simplex quadrature.
        #[arg(long, default_value_t = chainlet::forms::DEFAULT_DEGREE)]
        degree: usize,
    },
    /// Evaluate both sides of a Stokes-family identity.
    StokesCheck {
        /// Chain JSON: a polyhedral chain (`terms`) or an element chain (`entries`).
        #[arg(long)]
        chain: PathBuf,
        /// Polynomial form JSON.
        #[arg(long)]
        form: PathBuf,
        #[arg(long, default_value = "stokes")]
        mode: ModeArg,
        /// Polynomial exactness of the simplex quadrature.
        #[arg(long, default_value_t = chainlet::forms::DEFAULT_DEGREE)]
        degree: usize,
        /// Relative tolerance on |lhs − rhs| for exit code 0.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Certified bounds on the natural norm of a polyhedral chain.
    NormBound {
        /// Polyhedral chain JSON.
        #[arg(long)]
        chain: PathBuf,
        /// Decomposition JSON; the trivial decomposition is used when absent.
        #[arg(long)]
        decomposition: Option<PathBuf>,
        /// Norm order used with the trivial decomposition.
        #[arg(long, default_value_t = 1)]
        r: usize,
        /// A form for the dual lower bound.
        #[arg(long, requires = "certified_norm")]
        form: Option<PathBuf>,
        /// Upper bound on the natural norm of `--form`.
        #[arg(long)]
        certified_norm: Option<f64>,
    },
}

#[derive(Subcommand)]
enum ExperimentAction {
    /// List the experiment names.
    List,
    /// Run one experiment and write its report.
    Run {
        /// Experiment name; see `experiment list`.
        name: String,
        /// Depth, stage count or trial count, depending on the experiment.
        #[arg(long)]
        depth: Option<usize>,
        /// Norm order, where the experiment uses one.
        #[arg(long)]
        r: Option<usize>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Seed for the randomized experiments.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Override the experiment's acceptance tolerance.
        #[arg(long)]
        tol: Option<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Stokes,
    Star,
    Divergence,
    Curl,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Stokes => Mode::Stokes,
            ModeArg::Star => Mode::Star,
            ModeArg::Divergence => Mode::Divergence,
            ModeArg::Curl => Mode::Curl,
        }
    }
}

/// A failure carrying its exit code.
struct Failure(u8, String);

impl From<chainlet::Error> for Failure {
    fn from(e: chainlet::Error) -> Self {
        Failure(2, e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(2, format!("{}: {e}", path.display())))
}

fn parse<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| Failure(2, format!("{}:{}:{}: {e}", path.display(), e.line(), e.column())))
}

enum AnyChain {
    Poly(PolyChain),
    Elements(ElementChain),
}

impl AnyChain {
    fn domain(&self) -> Domain<'_> {
        match self {
            AnyChain::Poly(p) => Domain::Poly(p),
            AnyChain::Elements(a) => Domain::Elements(a),
        }
    }
}

/// Reads a polyhedral chain (`terms`) or an element chain (`entries`).
fn read_chain(path: &Path) -> Result<AnyChain, Failure> {
    let text = read(path)?;
    let value: serde_json::Value = parse(path, &text)?;
    if value.get("terms").is_some() {
        Ok(AnyChain::Poly(parse(path, &text)?))
    } else if value.get("entries").is_some() {
        Ok(AnyChain::Elements(parse(path, &text)?))
    } else {
        Err(Failure(2, format!("{}: expected a chain with `terms` or `entries`", path.display())))
    }
}

fn read_form(path: &Path) -> Result<FormJet, Failure> {
    let form: PolyForm = parse(path, &read(path)?)?;
    Ok(FormJet::from_poly(form).with_name(path.display().to_string()))
}

fn print_json(v: &impl serde::Serialize) {
    println!("{}", serde_json::to_string_pretty(v).expect("values serialize"));
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Experiment { action: ExperimentAction::List } => {
            for name in EXPERIMENTS {
                println!("{name}");
            }
            Ok(0)
        }
        Command::Experiment { action: ExperimentAction::Run { name, depth, r, out, format, seed, tol } } => {
            let report = run_experiment(&name, &Params { depth, r, seed, tol })?;
            let text = match format {
                Format::Json => report.to_json() + "\n",
                Format::Csv => report.to_csv(),
            };
            match out {
                Some(path) => fs::write(&path, text).map_err(|e| Failure(2, format!("{}: {e}", path.display())))?,
                None => print!("{text}"),
            }
            for c in report.verdict.checks.iter().filter(|c| !c.pass) {
                eprintln!("check failed: {}: {}", c.name, c.detail);
            }
            Ok(if report.verdict.pass { 0 } else { 1 })
        }
        Command::Integrate { chain, form, degree } => {
            let (chain, form) = (read_chain(&chain)?, read_form(&form)?);
            let value = match &chain {
                AnyChain::Poly(p) => integrate_poly_chain(p, &form, degree)?,
                AnyChain::Elements(a) => integrate_element_chain(a, &form)?,
            };
            print_json(&json!({ "integral": value }));
            Ok(0)
        }
        Command::StokesCheck { chain, form, mode, degree, tol } => {
            let (chain, form) = (read_chain(&chain)?, read_form(&form)?);
            let res = stokes_residual(chain.domain(), &form, mode.into(), degree)?;
            print_json(&res);
            Ok(if res.residual <= tol * (1.0 + res.lhs.abs()) { 0 } else { 1 })
        }
        Command::NormBound { chain, decomposition, r, form, certified_norm } => {
            let AnyChain::Poly(p) = read_chain(&chain)? else {
                return Err(Failure(2, "norm bounds take a polyhedral chain".into()));
            };
            let dec = match &decomposition {
                Some(path) => parse::<Decomposition>(path, &read(path)?)?,
                None => Decomposition::trivial(&p, r),
            };
            let upper = upper_bound(&p, &dec)?.with_target(chain.display().to_string());
            let mut bounds = vec![serde_json::to_value(&upper).expect("bounds serialize")];
            let mut ok = true;
            if let (Some(path), Some(c)) = (form, certified_norm) {
                let lower = lower_bound(Domain::Poly(&p), &read_form(&path)?, c, upper.r, false)?
                    .with_target(chain.display().to_string());
                ok = lower.value <= upper.value * (1.0 + 1e-9);
                bounds.push(serde_json::to_value(&lower).expect("bounds serialize"));
            }
            print_json(&bounds);
            Ok(if ok { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
