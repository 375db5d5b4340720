//! Command-line front end: the presentation format, subcommand dispatch and
//! structured reports.

pub mod commands;
pub mod document;
pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cochain_core::resolution::DEFAULT_STAGES;
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "cochain", version, about = "Regularity computations for connected cochain DG algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct Common {
    /// Presentation file in the text format.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Catalog family: square-zero, polynomial, exterior-on-one, ground-field,
    /// acyclic, truncated-polynomial, hybrid.
    #[arg(long, global = true)]
    pub family: Option<String>,
    /// Family parameter (generator degree).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub param: Option<i32>,
    /// Ground field for catalog families: Q or Fp.
    #[arg(long, global = true, default_value = "Q")]
    pub field: String,
    /// Algebra of the input document (default: the first one).
    #[arg(long, global = true)]
    pub algebra: Option<String>,
    /// Module: a document name, or k, free, zero, suspended:N, truncated:L, cone:LABEL.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub module: Option<String>,
    /// Resolution stages.
    #[arg(long, global = true, default_value_t = DEFAULT_STAGES)]
    pub stages: usize,
    /// Degree window LO..HI for resolutions and derived objects.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub window: Option<String>,
    /// Also write the JSON report to FILE.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Print the JSON report instead of text.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub json: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RegimeChoice {
    Auto,
    Finite,
    Poly,
}

#[derive(Clone, Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Check the axioms of the algebra and modules.
    Validate,
    /// Cohomology dimensions of a module (or the algebra).
    Cohomology,
    /// Minimal semi-free resolution.
    Resolve,
    /// Ext regularity.
    Extreg,
    /// Koszul test of a module (or of the algebra through k).
    Koszul,
    /// Castelnuovo-Mumford regularity.
    Cmreg {
        #[arg(long, value_enum, default_value_t = RegimeChoice::Auto)]
        regime: RegimeChoice,
    },
    /// Derived torsion of a module.
    Gamma,
    /// The dualizing bimodule and its actions.
    Dualizing,
    /// Double duality through the dualizing module.
    DualityCheck,
    /// Local duality against the linear dual of the torsion.
    LocalDuality,
    /// E2 page of the Čech spectral sequence.
    E2 {
        #[arg(long, value_delimiter = ',')]
        params: Vec<String>,
    },
    /// Regularity inequalities for a module, or over a catalog sweep.
    CheckRegularity {
        /// Also test the Koszul property of the shifted truncation at t.
        #[arg(long, allow_hyphen_values = true)]
        truncation: Option<i32>,
    },
    /// Emit a catalog family as a document.
    Catalog,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Cohomology => "cohomology",
            Command::Resolve => "resolve",
            Command::Extreg => "extreg",
            Command::Koszul => "koszul",
            Command::Cmreg { .. } => "cmreg",
            Command::Gamma => "gamma",
            Command::Dualizing => "dualizing",
            Command::DualityCheck => "duality-check",
            Command::LocalDuality => "local-duality",
            Command::E2 { .. } => "e2",
            Command::CheckRegularity { .. } => "check-regularity",
            Command::Catalog => "catalog",
        }
    }
}

pub use commands::run;
