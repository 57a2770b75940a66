mod commands;
mod error;
mod workdir;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use error::error_json;
use workdir::Workdir;

#[derive(Debug, Parser)]
#[command(name = "revaudit", version, about = "Citation-bias audit pipeline for peer-review data")]
struct Cli {
    /// Artifact directory shared by all stages.
    #[arg(long, global = true, env = "REVAUDIT_WORKDIR", default_value = ".")]
    workdir: PathBuf,

    /// Venue configuration (JSON); overrides the one stored in the workdir.
    #[arg(long, global = true)]
    venue_config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate a raw dataset directory and store it in canonical form.
    Ingest(IngestArgs),
    /// Build the citation relation from reference lists.
    ExtractCitations(ExtractArgs),
    /// Solve a reviewer assignment with a citation bonus.
    Assign(AssignArgs),
    /// Produce the analysis-eligible dataset.
    Filter(FilterArgs),
    /// Run the parametric or non-parametric test.
    Analyze(AnalyzeArgs),
    /// Ranking movement from a one-point score increase.
    EffectSize(EffectSizeArgs),
    /// Generate a synthetic conference with planted ground truth.
    Simulate(SimulateArgs),
    /// Residual and Q-Q plot data for the parametric fit.
    Diagnostics,
    /// Render the result table from the analysis artifacts.
    Report,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Directory with reviewers.jsonl, submissions.jsonl, reviews.jsonl and
    /// optionally venue.json.
    #[arg(long)]
    pub input: PathBuf,
    /// references.jsonl replacing the submissions' reference entries.
    #[arg(long)]
    pub references: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Manual decisions (`submission_id,reviewer_id,cited`).
    #[arg(long)]
    pub overrides: Option<PathBuf>,
    /// Draw this many pairs per stratum into audit_cited.csv / audit_uncited.csv.
    #[arg(long, requires = "seed")]
    pub audit_size: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct AssignArgs {
    /// `submission_id,reviewer_id,sim` for every candidate pair.
    #[arg(long)]
    pub similarity: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    #[arg(long)]
    pub paper_load: usize,
    #[arg(long)]
    pub reviewer_cap: usize,
    /// Bids/preferences (`submission_id,reviewer_id,value`): unwilling pairs
    /// are forbidden, pairs without a value are penalized.
    #[arg(long, value_name = "PREFERENCES_CSV")]
    pub forbid_from_bids: Option<PathBuf>,
    #[arg(long, default_value_t = revaudit::assignment::DEFAULT_MISSING_PENALTY)]
    pub missing_penalty: f64,
    /// Manual edits (`action,submission_id,reviewer_id`) applied after the solve.
    #[arg(long)]
    pub edits: Option<PathBuf>,
    /// Comma-separated λ values; writes sweep.csv.
    #[arg(long, value_delimiter = ',')]
    pub sweep: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    /// Replace observed scores with the simulated latent scores from
    /// ground_truth.json.
    #[arg(long)]
    pub latent: bool,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("method").required(true).args(["parametric", "nonparametric"])))]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub parametric: bool,
    #[arg(long)]
    pub nonparametric: bool,
    #[arg(long, default_value_t = revaudit::nonparametric::DEFAULT_ITERATIONS)]
    pub iterations: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 0.1)]
    pub overlap_tolerance: f64,
    /// Enumerate all sign patterns instead of sampling them.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Preset {
    Ec,
    Icml,
}

#[derive(Debug, Args)]
pub struct EffectSizeArgs {
    /// Let scores at the scale maximum rise past it.
    #[arg(long)]
    pub uncapped: bool,
    /// Average per-submission means instead of all pairs.
    #[arg(long)]
    pub per_submission: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value = "ec")]
    pub preset: Preset,
    /// Full generator configuration (JSON); replaces the preset.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub alpha_star: Option<f64>,
    #[arg(long)]
    pub sigma0: Option<f64>,
    #[arg(long)]
    pub n_submissions: Option<usize>,
    #[arg(long)]
    pub n_reviewers: Option<usize>,
    #[arg(long)]
    pub citation_prevalence: Option<f64>,
    #[arg(long)]
    pub confounder_correlation: Option<f64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let message = e.render().to_string();
            let first = message.lines().next().unwrap_or("").trim_start_matches("error: ").to_owned();
            eprintln!("{}", error_json("usage", first));
            return ExitCode::from(2);
        }
    };
    let wd = Workdir::new(cli.workdir, cli.venue_config);
    let result = match cli.command {
        Command::Ingest(a) => commands::ingest(&wd, &a),
        Command::ExtractCitations(a) => commands::extract_citations(&wd, &a),
        Command::Assign(a) => commands::assign(&wd, &a),
        Command::Filter(a) => commands::filter(&wd, &a),
        Command::Analyze(a) => commands::analyze(&wd, &a),
        Command::EffectSize(a) => commands::effect_size(&wd, &a),
        Command::Simulate(a) => commands::simulate(&wd, &a),
        Command::Diagnostics => commands::diagnostics(&wd),
        Command::Report => commands::report(&wd),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", error_json(e.kind(), e.to_string()));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
