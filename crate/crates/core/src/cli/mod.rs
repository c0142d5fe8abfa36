//! The `polyprg` command line.
//!
//! Exit status: 0 on success, 1 when a manifest bound failed, 2 on any
//! error (bad input, schema violation, infeasible budget).

pub mod count;
pub mod manifest;

pub use count::{count, lab_preset, sig17, CountMode, CountOptions, CountResult, IpInstance};
pub use manifest::{run_manifest, Experiment, Manifest, Outcome, Summary};

use crate::algebra::SeedStream;
use crate::error::{Error, Result};
use crate::generators::{derive_params, seed_length, CnfFoolerSpec, Constants, Generator, GeneratorParams};
use clap::{Parser, Subcommand};
use std::ffi::OsString;
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(
    name = "polyprg",
    version,
    about = "Deterministic counting for {0,1} integer programs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the number of solutions of `A01 x <= b01` over {0,1}^n.
    Count {
        /// IpInstance JSON file.
        instance: PathBuf,
        /// Additive accuracy on the fraction.
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        /// all-seeds, strided:N, exact or factored.
        #[arg(long, default_value = "all-seeds")]
        mode: String,
        /// GeneratorParams JSON file overriding the defaults.
        #[arg(long)]
        params: Option<PathBuf>,
        /// Directory for count.json.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Largest n for exact cube enumeration.
        #[arg(long, default_value_t = crate::enumerate::DEFAULT_CUBE_CAP)]
        enum_cap: usize,
        /// Standardize the rows before evaluating the generator.
        #[arg(long)]
        standardize: bool,
        /// Print the CountResult JSON instead of text.
        #[arg(long)]
        json: bool,
        /// Print nothing on stdout (the notice still goes to stderr).
        #[arg(long)]
        quiet: bool,
    },
    /// Run every experiment of a manifest and write its reports.
    RunManifest {
        manifest: PathBuf,
        /// Output directory, overriding the manifest's own.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print theory-mode parameters and their seed length.
    Params {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        #[arg(long, default_value_t = 1.0)]
        c1: f64,
        #[arg(long, default_value_t = 1.0)]
        c2: f64,
        #[arg(long, default_value_t = 1.0)]
        c_beta: f64,
        /// Taylor order.
        #[arg(long, default_value_t = 3)]
        d: u32,
    },
    /// Evaluate the generator on one seed.
    Generate {
        /// GeneratorParams JSON file.
        #[arg(long)]
        params: PathBuf,
        /// Seed as hex, most significant bit of the first digit first.
        #[arg(long)]
        seed: String,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn with_path(path: &Path, e: Error) -> Error {
    match e {
        Error::Schema(s) => Error::Schema(format!("{}: {s}", path.display())),
        other => other,
    }
}

fn load_params(path: &Path) -> Result<GeneratorParams> {
    GeneratorParams::from_json(&read(path)?).map_err(|e| with_path(path, e))
}

/// Executes a parsed command, returning the exit status.
pub fn execute(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Count {
            instance,
            delta,
            eps,
            mode,
            params,
            out,
            enum_cap,
            standardize,
            json,
            quiet,
        } => {
            let ip = IpInstance::parse(&read(&instance)?).map_err(|e| with_path(&instance, e))?;
            let opts = CountOptions {
                delta,
                eps,
                mode: mode.parse()?,
                params: params.as_deref().map(load_params).transpose()?,
                enum_cap,
                standardize,
            };
            let r = count(&ip, &opts)?;
            if let Some(n) = &r.notice {
                eprintln!("{n}");
            }
            let doc = serde_json::to_string_pretty(&r)? + "\n";
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
                let path = dir.join("count.json");
                std::fs::write(&path, &doc).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            }
            match (quiet, json) {
                (true, _) => {}
                (false, true) => print!("{doc}"),
                (false, false) => print!("{}", r.to_text()),
            }
            Ok(0)
        }
        Command::RunManifest { manifest, out } => {
            let s = run_manifest(&manifest, out.as_deref())?;
            for o in &s.outcomes {
                let status = match o.held {
                    Some(true) => "held",
                    Some(false) => "FAILED",
                    None => "not asserted",
                };
                println!("{} [{}]: {status}", o.id, o.kind);
                if let Some(n) = &o.note {
                    println!("  note: {n}");
                }
            }
            Ok(if s.all_held { 0 } else { 1 })
        }
        Command::Params {
            n,
            m,
            delta,
            eps,
            c1,
            c2,
            c_beta,
            d,
        } => {
            let c = Constants {
                c1,
                c2,
                c_beta,
                d,
                ..Constants::default()
            };
            let p = derive_params(n, m, delta, eps, c)?;
            let (bits, _) = seed_length(&p)?;
            println!("{}", p.to_json()?);
            println!("seed bits = {bits}");
            Ok(0)
        }
        Command::Generate { params, seed } => {
            let p = load_params(&params)?;
            let g = Generator::full(&p, &CnfFoolerSpec::from_params(&p))?;
            let (bits, _) = seed_length(&p)?;
            let z = g.generate(&SeedStream::from_hex(&seed, bits)?)?;
            println!("{z}");
            Ok(0)
        }
    }
}

/// Parses `args`, runs the command and reports errors on stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

pub fn main_entry() -> i32 {
    run(std::env::args_os())
}
