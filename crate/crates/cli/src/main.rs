use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ucp_core::karner::{ModelTag, RatePolicy};
use ucp_core::mlp::Algorithm;
use ucp_core::model::TransactionPolicy;
use ucp_core::report::Format;
use ucp_core::Error;

mod commands;

/// Size software projects from their use case models.
#[derive(Parser, Debug)]
#[command(name = "ucp", version, about, long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Estimate size and effort for every project in a corpus
    Estimate {
        #[command(flatten)]
        input: CorpusArg,
        #[command(flatten)]
        models: ModelArgs,
        #[command(flatten)]
        policy: PolicyArgs,
        #[command(flatten)]
        rate: RateArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Print the graduated use-case weight table next to the three-band weights
    FuzzyTable {
        /// Fuzzy configuration file (defaults to the shipped one)
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Train the neural size model on a corpus with actual sizes
    Train {
        #[command(flatten)]
        input: CorpusArg,
        /// Where to write the trained model
        #[arg(long, value_name = "FILE")]
        out_model: PathBuf,
        /// Comma-separated ids of the training projects
        #[arg(long, value_delimiter = ',', conflicts_with = "train_fraction")]
        train_ids: Vec<String>,
        /// Train on a seeded random fraction of the corpus
        #[arg(long)]
        train_fraction: Option<f64>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = AlgorithmArg::Lm)]
        algorithm: AlgorithmArg,
        /// Hidden-layer width (14..=25)
        #[arg(long, default_value_t = 20)]
        hidden: usize,
        #[arg(long, default_value_t = 500)]
        epochs: usize,
        /// Learning rate for gradient backprop
        #[arg(long, default_value_t = 0.01)]
        learning_rate: f64,
        #[command(flatten)]
        policy: PolicyArgs,
        #[command(flatten)]
        rate: RateArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Predict UUCP with a trained model
    Predict {
        #[command(flatten)]
        input: CorpusArg,
        #[arg(long, value_name = "FILE")]
        model_file: PathBuf,
        #[command(flatten)]
        rate: RateArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Compare model estimates against actual sizes (MRE, MER, error)
    Evaluate {
        /// Corpus whose projects carry actual sizes or efforts
        #[arg(
            long,
            value_name = "FILE",
            required_unless_present = "estimates",
            conflicts_with = "estimates"
        )]
        corpus: Option<PathBuf>,
        /// CSV of precomputed estimates: project_id,[stage,]actual,karner,fuzzy,...
        #[arg(long, value_name = "FILE")]
        estimates: Option<PathBuf>,
        /// Report per extend/include stage
        #[arg(long)]
        by_stage: bool,
        #[command(flatten)]
        models: ModelArgs,
        #[command(flatten)]
        policy: PolicyArgs,
        #[command(flatten)]
        rate: RateArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Export one CSV row per corpus project (counts, stage, factors, actuals)
    Summary {
        #[command(flatten)]
        input: CorpusArg,
        /// Write to this file instead of stdout
        #[arg(long, short = 'o', value_name = "FILE")]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct CorpusArg {
    /// Corpus file (JSON)
    #[arg(long, value_name = "FILE")]
    corpus: PathBuf,
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// Models to run; defaults to karner and fuzzy, plus mlp with --model-file
    #[arg(long = "model", value_enum, value_delimiter = ',')]
    models: Vec<ModelArg>,
    /// Trained neural model file
    #[arg(long, value_name = "FILE")]
    model_file: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PolicyArgs {
    /// Weight of each extension-step transaction, in [0, 1]
    #[arg(long, conflicts_with = "discounted")]
    extension_weight: Option<f64>,
    /// Count extension steps at 30%
    #[arg(long)]
    discounted: bool,
}

impl PolicyArgs {
    fn policy(&self) -> Result<TransactionPolicy, Error> {
        match (self.extension_weight, self.discounted) {
            (Some(w), _) => TransactionPolicy::new(w),
            (None, true) => Ok(TransactionPolicy::DISCOUNTED),
            (None, false) => Ok(TransactionPolicy::FULL),
        }
    }
}

#[derive(Args, Debug)]
struct RateArgs {
    /// Effort rate rule
    #[arg(long, value_enum, default_value_t = RateArg::Schneider)]
    rate: RateArg,
    /// Apply 28 ph/UCP to high-risk teams instead of omitting effort
    #[arg(long)]
    force_rate: bool,
}

impl RateArgs {
    fn policy(&self) -> Result<RatePolicy, Error> {
        match (self.rate, self.force_rate) {
            (RateArg::Karner, true) => Err(Error::invalid("", "--force-rate", "only applies with --rate schneider")),
            (RateArg::Karner, false) => Ok(RatePolicy::Karner),
            (RateArg::Schneider, false) => Ok(RatePolicy::Schneider),
            (RateArg::Schneider, true) => Ok(RatePolicy::SchneiderForced),
        }
    }
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = FormatArg::Table)]
    format: FormatArg,
    /// Write to this file instead of stdout
    #[arg(long, short = 'o', value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModelArg {
    Karner,
    Fuzzy,
    Mlp,
}

impl From<ModelArg> for ModelTag {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Karner => ModelTag::Karner,
            ModelArg::Fuzzy => ModelTag::Fuzzy,
            ModelArg::Mlp => ModelTag::Mlp,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RateArg {
    /// Schneider's rule: 20 or 28 ph/UCP by environmental ratings
    Schneider,
    /// Flat 20 ph/UCP
    Karner,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Table,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Table => Format::Table,
            FormatArg::Csv => Format::Csv,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AlgorithmArg {
    /// Levenberg-Marquardt
    Lm,
    /// Plain gradient descent
    Backprop,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Lm => Algorithm::LevenbergMarquardt,
            AlgorithmArg::Backprop => Algorithm::GradientBackprop,
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Validation(_) | Error::HighRisk { .. } | Error::Parse { .. } => 1,
        Error::Io(_) => 2,
        Error::Numeric(_) | Error::Convergence(_) => 3,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
