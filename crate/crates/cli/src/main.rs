use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod output;

use output::CliError;

#[derive(Parser, Debug)]
#[command(name = "holder", version, about = "Hölder divergences, centroids, clustering and mixture bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Divergence between two distributions of the same family.
    Div(DivArgs),
    /// Centroid of a weighted set of distributions.
    Centroid(CentroidArgs),
    /// Variational k-means on a distribution set or on a generated toy set.
    Cluster(ClusterArgs),
    /// Clustering-accuracy table over sample sizes and exponents (CSV).
    Table1(Table1Args),
    /// Divergence maps over the probability simplex or the Gaussian (μ, σ) plane (CSV).
    Grid(GridArgs),
    /// Bounds on the pseudo-divergence between two univariate mixtures.
    Bounds(BoundsArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum DivVariant {
    Hpd,
    Hd,
    SymHpd,
    SymHd,
    Cs,
    Escort,
    Bhat,
}

#[derive(Args, Debug)]
pub struct DivArgs {
    /// JSON file with {"p": ..., "q": ...} or a two-element array.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub variant: DivVariant,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Also evaluate the divergence from its integral definition.
    #[arg(long)]
    pub oracle: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum CentroidVariant {
    Hpd,
    Hd,
    SymHpd,
    SymHd,
    LeftHpd,
    LeftHd,
}

#[derive(Args, Debug)]
pub struct CentroidArgs {
    /// JSON file with {"distributions": [...], "weights": [...]} or an array of distributions.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub variant: CentroidVariant,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub gamma: Option<f64>,
}

#[derive(Args, Debug)]
pub struct ClusterArgs {
    /// JSON array of distributions (or {"distributions": [...]}).
    #[arg(long, conflicts_with = "toy", required_unless_present = "toy")]
    pub input: Option<PathBuf>,
    /// Generate a two-cluster toy set of this many 2D Gaussians instead.
    #[arg(long)]
    pub toy: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pub clusters: usize,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub gamma: f64,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct Table1Args {
    #[arg(long, default_value_t = 500)]
    pub runs: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_delimiter = ',', default_values_t = vec![50, 100])]
    pub sizes: Vec<usize>,
    /// Values used for α = γ.
    #[arg(long, value_delimiter = ',', default_values_t = vec![1.1, 1.5, 2.0, 10.0])]
    pub alphas: Vec<f64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Figure {
    Simplex,
    Gaussian,
}

#[derive(Args, Debug)]
pub struct GridArgs {
    #[arg(long, value_enum)]
    pub figure: Figure,
    /// Simplex: three probabilities (fractions like 1/3 allowed). Gaussian: mean,sd.
    #[arg(long)]
    pub reference: Option<String>,
    #[arg(long, value_delimiter = ',', default_values_t = vec![4.0, 2.0, 4.0 / 3.0])]
    pub alpha_list: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.5, 1.0, 2.0, 5.0, 10.0])]
    pub gamma_list: Vec<f64>,
    /// α of the proper-divergence columns.
    #[arg(long, default_value_t = 2.0)]
    pub hd_alpha: f64,
    #[arg(long, default_value_t = 60)]
    pub resolution: usize,
    #[arg(long, default_value = "-3,3", allow_hyphen_values = true)]
    pub mu_range: String,
    #[arg(long, default_value = "0.25,3")]
    pub sigma_range: String,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    /// First mixture JSON: {"family": ..., "weights": [...], "components": [...]}.
    #[arg(long)]
    pub m: PathBuf,
    /// Second mixture JSON.
    #[arg(long)]
    pub n: PathBuf,
    #[arg(long)]
    pub alpha: f64,
    /// Extra equal cuts of the central window in each partition.
    #[arg(long, default_value_t = 0)]
    pub resolution: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&CliError::Usage(e.render().to_string().trim().to_string())),
    };
    let result = match &cli.command {
        Command::Div(args) => commands::div(args),
        Command::Centroid(args) => commands::centroid(args),
        Command::Cluster(args) => commands::cluster(args),
        Command::Table1(args) => commands::table1(args),
        Command::Grid(args) => commands::grid(args),
        Command::Bounds(args) => commands::bounds(args),
    };
    match result {
        Ok(text) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
                return ExitCode::FAILURE;
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}

fn fail(e: &CliError) -> ExitCode {
    println!("{}", e.to_json());
    ExitCode::from(e.exit_code())
}
