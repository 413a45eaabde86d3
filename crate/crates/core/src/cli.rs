//! Command-line front end. Reports go to standard output, or atomically to
//! `--out`; diagnostics go to standard error.
//!
//! Exit codes: 0 on success, 1 on data or validation errors, 2 on usage
//! errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::electre::{classify, ElectreThresholds};
use crate::error::{Error, Result};
use crate::ga::{self, GaConfig, NetFlowFitness};
use crate::io::{self as fio, CriteriaConfig};
use crate::model::{DecisionMatrix, PreferenceFunction};
use crate::objectives::{evaluate_portfolio, WeightVector, DEFAULT_PENALTY};
use crate::promethee::{
    flows, preference_index_matrix, rank_promethee_i, rank_promethee_ii, PrometheeOutcome,
};
use crate::report::{Format, Report};
use crate::screening::screen;

pub const SEED_ENV: &str = "LOCUS_MCDA_SEED";

#[derive(Debug, Parser)]
#[command(name = "locus-mcda", version, about = "Outranking analysis of candidate locations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check every alternative against the hard conditions in the config.
    Screen {
        #[command(flatten)]
        input: MatrixInput,
        #[command(flatten)]
        output: Output,
    },
    /// PROMETHEE flows and ranking from a matrix, a Π matrix or a flow table.
    RankPromethee(RankPromethee),
    /// ELECTRE pairwise outranking relations.
    RankElectre(RankElectre),
    /// Genetic search for the criterion profile with the highest net flow.
    Optimize(Optimize),
    /// Expected return, variance and penalized score of a weight vector.
    Objectives(Objectives),
}

#[derive(Debug, Args)]
pub struct MatrixInput {
    /// Decision matrix CSV: an alternative column, then one column per criterion.
    #[arg(long, value_name = "CSV")]
    pub matrix: PathBuf,
    /// Criteria config JSON.
    #[arg(long, value_name = "JSON")]
    pub config: PathBuf,
}

#[derive(Debug, Args)]
pub struct Output {
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write the report to this file instead of standard output.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["pi", "matrix", "flows"]))]
pub struct RankPromethee {
    /// Precomputed preference index matrix CSV.
    #[arg(long, value_name = "CSV")]
    pub pi: Option<PathBuf>,
    /// Decision matrix CSV; requires --config.
    #[arg(long, value_name = "CSV", requires = "config")]
    pub matrix: Option<PathBuf>,
    /// Flow table CSV with phi_plus, phi_minus and phi_net columns.
    #[arg(long, value_name = "CSV")]
    pub flows: Option<PathBuf>,
    #[arg(long, value_name = "JSON", requires = "matrix")]
    pub config: Option<PathBuf>,
    /// Preference function for criteria whose config names none, e.g.
    /// `usual`, `v_shape:p=2`, `level:q=1,p=3`, `gaussian:s=0.5`.
    #[arg(long, value_name = "FN", default_value = "usual")]
    pub pref_fn: PreferenceFunction,
    /// Drop alternatives that break a condition before ranking.
    #[arg(long, requires = "matrix")]
    pub screen: bool,
    /// Report the PROMETHEE I partial preorder instead of the total ranking.
    #[arg(long)]
    pub partial: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct RankElectre {
    #[command(flatten)]
    pub input: MatrixInput,
    /// Concordance threshold.
    #[arg(long, default_value_t = 0.7)]
    pub s: f64,
    /// Veto threshold on range-normalized discordance.
    #[arg(long, default_value_t = 0.3)]
    pub v: f64,
    #[arg(long)]
    pub screen: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct Optimize {
    #[command(flatten)]
    pub input: MatrixInput,
    /// Random seed; falls back to the environment, then to 42.
    #[arg(long, env = SEED_ENV, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 50)]
    pub pop: usize,
    #[arg(long, default_value_t = 200)]
    pub gens: usize,
    /// Crossover rate.
    #[arg(long, default_value_t = 0.9)]
    pub cx: f64,
    /// Per-gene mutation rate.
    #[arg(long = "mut", default_value_t = 0.05)]
    pub mutation: f64,
    /// Individuals carried over unchanged each generation.
    #[arg(long, default_value_t = 2)]
    pub elite: usize,
    /// Evaluate every chromosome, even repeats.
    #[arg(long)]
    pub no_cache: bool,
    /// Use only feasible alternatives as the reference set.
    #[arg(long)]
    pub screen: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct Objectives {
    /// Portfolio JSON with `mu`, `cov` and optional `target_return`, `variance_budget`.
    #[arg(long, value_name = "JSON")]
    pub portfolio: PathBuf,
    /// Comma-separated asset weights.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub weights: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_PENALTY)]
    pub penalty: f64,
    #[command(flatten)]
    pub output: Output,
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                2
            } else {
                let _ = stdout.write_all(text.as_bytes());
                0
            };
        }
    };
    match execute(&cli.command) {
        Ok((output, text)) => match emit(output, &text, stdout) {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(stderr, "error: {e}");
                1
            }
        },
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}

fn emit(output: &Output, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match &output.out {
        Some(path) => fio::write_atomic(path, text.as_bytes()),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

fn execute(command: &Command) -> Result<(&Output, String)> {
    match command {
        Command::Screen { input, output } => {
            let (config, matrix) = load(input, PreferenceFunction::Usual)?;
            let report = screen(&matrix, &config.conditions()?).map_err(|e| in_file(&input.config, e))?;
            Ok((output, report.render(output.format)))
        }
        Command::RankPromethee(cmd) => Ok((&cmd.output, rank_promethee(cmd)?)),
        Command::RankElectre(cmd) => {
            let (config, matrix) = load(&cmd.input, PreferenceFunction::Usual)?;
            let matrix = screened(&cmd.input, &config, matrix, cmd.screen)?;
            let t = ElectreThresholds::new(cmd.s, cmd.v).map_err(|e| Error::file("--s/--v", e))?;
            t.check_admissible(&matrix).map_err(|e| Error::file("--s", e))?;
            let table = classify(&matrix, &t).map_err(|e| in_file(&cmd.input.matrix, e))?;
            Ok((&cmd.output, table.render(cmd.output.format)))
        }
        Command::Optimize(cmd) => {
            let (config, matrix) = load(&cmd.input, PreferenceFunction::Usual)?;
            let conds = config.conditions()?;
            let reference = screened(&cmd.input, &config, matrix, cmd.screen)?;
            let ga_config = GaConfig {
                population_size: cmd.pop,
                generations: cmd.gens,
                crossover_rate: cmd.cx,
                mutation_rate: cmd.mutation,
                elitism_count: cmd.elite,
                seed: cmd.seed,
                use_cache: !cmd.no_cache,
                ..GaConfig::default()
            };
            ga_config
                .validate()
                .map_err(|e| Error::file("--pop/--gens/--cx/--mut/--elite", e))?;
            let bounds = ga::default_bounds(&reference, &conds).map_err(|e| in_file(&cmd.input.config, e))?;
            let fitness = NetFlowFitness::new(&reference)
                .and_then(|f| f.with_conditions(&conds))
                .map_err(|e| in_file(&cmd.input.matrix, e))?;
            let report = ga::run_with(&ga_config, &fitness, &bounds, &[]).map_err(|e| in_file(&cmd.input.matrix, e))?;
            Ok((&cmd.output, report.render(cmd.output.format)))
        }
        Command::Objectives(cmd) => {
            let spec = fio::load_portfolio(&cmd.portfolio)?;
            if !cmd.penalty.is_finite() || cmd.penalty < 0.0 {
                return Err(Error::file("--penalty", format!("{} is not a non-negative number", cmd.penalty)));
            }
            if cmd.weights.len() != spec.n_assets() {
                return Err(Error::file(
                    "--weights",
                    format!("{} weights given for {} assets in {}", cmd.weights.len(), spec.n_assets(), cmd.portfolio.display()),
                ));
            }
            let eval = evaluate_portfolio(&WeightVector(cmd.weights.clone()), &spec, cmd.penalty)
                .map_err(|e| Error::file("--weights", e))?;
            Ok((&cmd.output, eval.render(cmd.output.format)))
        }
    }
}

fn rank_promethee(cmd: &RankPromethee) -> Result<String> {
    let outcome = if let Some(path) = &cmd.pi {
        let pi = fio::load_pi_matrix(path)?;
        PrometheeOutcome::from_pi(&pi).map_err(|e| in_file(path, e))?
    } else if let Some(path) = &cmd.flows {
        let flows = fio::load_flow_table(path)?;
        let ranking = rank_promethee_ii(&flows);
        PrometheeOutcome { flows, ranking }
    } else {
        let input = MatrixInput {
            matrix: cmd.matrix.clone().expect("clap enforces a source"),
            config: cmd.config.clone().expect("clap requires --config with --matrix"),
        };
        let (config, matrix) = load(&input, cmd.pref_fn)?;
        let matrix = screened(&input, &config, matrix, cmd.screen)?;
        let pi = preference_index_matrix(&matrix).map_err(|e| in_file(&input.matrix, e))?;
        let flows = flows(&pi).map_err(|e| in_file(&input.matrix, e))?;
        let ranking = rank_promethee_ii(&flows);
        PrometheeOutcome { flows, ranking }
    };
    Ok(if cmd.partial {
        rank_promethee_i(&outcome.flows).render(cmd.output.format)
    } else {
        outcome.render(cmd.output.format)
    })
}

fn load(input: &MatrixInput, default_preference: PreferenceFunction) -> Result<(CriteriaConfig, DecisionMatrix)> {
    let config = CriteriaConfig::load(&input.config)?;
    let matrix = fio::load_matrix_with(&input.matrix, &config, default_preference)?;
    Ok((config, matrix))
}

fn screened(input: &MatrixInput, config: &CriteriaConfig, matrix: DecisionMatrix, apply: bool) -> Result<DecisionMatrix> {
    if !apply {
        return Ok(matrix);
    }
    let report = screen(&matrix, &config.conditions()?).map_err(|e| in_file(&input.config, e))?;
    if report.feasible_ids().is_empty() {
        return Err(Error::file(
            input.matrix.display().to_string(),
            format!("--screen: no alternative satisfies the conditions in {}", input.config.display()),
        ));
    }
    report.apply(&matrix).map_err(|e| in_file(&input.matrix, e))
}

fn in_file(path: &Path, e: Error) -> Error {
    match e {
        Error::Parse { .. } | Error::File { .. } | Error::Io { .. } => e,
        other => Error::file(path.display().to_string(), other),
    }
}
