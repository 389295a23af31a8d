use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "tol", version, about = "ToLang interpreter, lowering and EOPs accounting")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Pretty,
}

#[derive(Args, Clone, Debug)]
pub struct Bindings {
    /// Tensor input from a JSON tensor file, `name=path`.
    #[arg(short, long = "input", value_name = "NAME=PATH")]
    pub inputs: Vec<String>,
    /// Numeric input given inline, `name=value` (integer, float, true/false, +Inf, -Inf).
    #[arg(long = "set", value_name = "NAME=VALUE")]
    pub sets: Vec<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand)]
pub enum Command {
    /// Evaluate a program and print its outputs.
    Run {
        /// Program file, or the name of a bundled case study.
        program: String,
        #[command(flatten)]
        bindings: Bindings,
        /// Include the elementary-operation report.
        #[arg(long)]
        eops: bool,
        /// Evaluate every definition application afresh.
        #[arg(long)]
        no_memo: bool,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Print only the elementary-operation report of a run.
    Cost {
        program: String,
        #[command(flatten)]
        bindings: Bindings,
        #[arg(long)]
        no_memo: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Parse a program and print it canonically, or as AST JSON.
    Parse {
        program: String,
        #[arg(long)]
        ast: bool,
    },
    /// Print the canonical formatting of a program.
    Fmt {
        program: String,
        /// Rewrite the file in place.
        #[arg(long)]
        write: bool,
    },
    /// Lower the program result to an atomic expression for concrete input shapes.
    Lower {
        program: String,
        /// Input shapes, `name=[d1,d2,...]` with an optional `:SPACE` suffix, comma separated.
        #[arg(long, value_name = "SHAPES", default_value = "")]
        shapes: String,
        /// Numeric inputs folded into the tree, `name=value`.
        #[arg(long = "set", value_name = "NAME=VALUE")]
        sets: Vec<String>,
        /// Also evaluate both forms on random inputs and compare.
        #[arg(long)]
        check: bool,
        #[arg(long, default_value_t = 20)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// The ONNX operator library.
    Onnx {
        #[command(subcommand)]
        command: OnnxCommand,
    },
}

#[derive(Subcommand)]
pub enum OnnxCommand {
    /// List the operators with their status and cost formulas.
    List {
        #[arg(long, value_enum, default_value_t = Format::Pretty)]
        format: Format,
    },
    /// Run one operator on tensor files.
    Run {
        name: String,
        #[command(flatten)]
        bindings: Bindings,
        #[arg(long)]
        eops: bool,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Regenerate the golden EOPs tables and compare them with the checked-in copies.
    Goldens {
        #[arg(long, default_value = "goldens")]
        dir: PathBuf,
        /// Write the regenerated tables instead of comparing.
        #[arg(long)]
        update: bool,
    },
}
