//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 for configuration errors, 3 for numerical
//! failures (including certificates contradicted by the `lambda*` sign).

mod commands;
mod config;

pub use commands::{agreement, certify_one, classify_config_for, Bundle, Report};
pub use config::{set_param, CertifyConfig, Family, Grid, Linspace, RunConfig, ScanConfig, ScanKind, PARAMS};

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "tipping", version, about = "Tracking and tipping in scalar concave nonautonomous ODEs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for the output files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: number of processors).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Bisection tolerance of lambda*.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Also write whitespace-separated tables for plotting.
    #[arg(long, global = true)]
    pub emit_plot_data: bool,
    /// Add the lambda* sign to certificate runs.
    #[arg(long, global = true)]
    pub cross_check: bool,
    /// Model identifier (see `models`).
    #[arg(long, global = true)]
    pub model: Option<String>,
    /// Transition: arctan, neg-arctan, polygonal, step or zero.
    #[arg(long, global = true)]
    pub transition: Option<String>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub c: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub d: Option<f64>,
    #[arg(long, global = true)]
    pub h: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub s: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub l: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub p0: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Tracking, tipping or boundary verdict.
    Classify,
    /// Bisection for lambda*.
    LambdaStar,
    /// Parameter scan of lambda*.
    Scan,
    /// Certificate ladder.
    Certify,
    /// List the registered models.
    Models,
}

impl Cli {
    /// Loads the configuration file and applies the flags on top of it.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?;
                RunConfig::from_json(&text)?
            }
            None => RunConfig::default(),
        };
        if let Some(m) = &self.model {
            cfg.model.id = m.clone();
        }
        if let Some(t) = &self.transition {
            cfg.model.transition = Some(t.clone());
        }
        for (name, v) in [
            ("c", self.c),
            ("d", self.d),
            ("h", self.h),
            ("s", self.s),
            ("l", self.l),
            ("alpha", self.alpha),
            ("p0", self.p0),
        ] {
            if let Some(v) = v {
                set_param(&mut cfg.model, name, v)?;
            }
        }
        if let Some(t) = self.tol {
            cfg.tol = t;
        }
        if self.workers.is_some() {
            cfg.workers = self.workers;
        }
        if self.out.is_some() {
            cfg.out = self.out.clone();
        }
        cfg.emit_plot_data |= self.emit_plot_data;
        cfg.cross_check |= self.cross_check;
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::InvalidParameter(_) | Error::Io(_) => EXIT_CONFIG,
        _ => EXIT_NUMERICAL,
    }
}

/// Runs one command on a validated configuration.
pub fn execute(command: Command, cfg: &RunConfig) -> Result<Report> {
    let run = || match command {
        Command::Classify => commands::classify_cmd(cfg),
        Command::LambdaStar => commands::lambda_star_cmd(cfg),
        Command::Scan => commands::scan_cmd(cfg),
        Command::Certify => commands::certify_cmd(cfg),
        Command::Models => Ok(commands::models()),
    };
    match cfg.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {n} workers: {e}")))?
            .install(run),
        None => run(),
    }
}

fn write_report(cfg: &RunConfig, report: &Report) -> Result<()> {
    match &cfg.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            for (name, text) in &report.files {
                std::fs::write(dir.join(name), text)?;
            }
        }
        None => print!("{}", report.stdout),
    }
    Ok(())
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let cfg = match cli.resolve() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let report = match execute(cli.command, &cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    if let Err(e) = write_report(&cfg, &report) {
        eprintln!("error: {e}");
        return exit_code(&e);
    }
    match &report.failure {
        Some(msg) => {
            eprintln!("error: {msg}");
            EXIT_NUMERICAL
        }
        None => 0,
    }
}
