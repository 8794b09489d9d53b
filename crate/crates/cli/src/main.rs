//! `clustercert` command-line front end.
//!
//! Exit codes: 0 certified (or verb succeeded), 3 not certified, 2 error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use clustercert::bounds::{opt_lower_bound, opt_solve_numeric, OptSolution, DEFAULT_RESOLUTION};
use clustercert::discretize::{discretize, inflated_params, CellMass, InflatedParams, DEFAULT_DENOMINATOR_BOUND};
use clustercert::generators::{
    generate, AdversarialSpec, BlobSpec, Generated, GeneratorSpec, ModelSpec, RandomSpec, RandomStyle,
};
use clustercert::greedy::{greedy_structure, GreedyOptions, StageSelection, DEFAULT_CLIQUE_BUDGET};
use clustercert::io::{parse_space_json, read_point_cloud, space_to_json, write_point_cloud, PointMetric};
use clustercert::oracle::{max_structure_bruteforce, DEFAULT_ORACLE_LIMIT};
use clustercert::report::{bytes_digest, certify_with_digest, CertifyOptions, DEFAULT_HISTOGRAM_BINS};
use clustercert::stats::{compute_stats, BetaMethod, HistogramBin, DEFAULT_ANTICLIQUE_BUDGET};
use clustercert::{Error, FiniteMetricSpace, ScaleParams, Workers};

const EXIT_NOT_CERTIFIED: u8 = 3;
const EXIT_ERROR: u8 = 2;

#[derive(Parser)]
#[command(name = "clustercert", version, about = "Certify cluster structure in finite weighted semimetric spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline; prints the certification report.
    Certify(CertifyArgs),
    /// Check that an input is a valid space.
    Validate(InputArgs),
    /// Medium-edge and anticlique statistics.
    Stats(StatsArgs),
    /// Greedy cluster structure and its decomposition.
    Greedy(GreedyArgs),
    /// Exhaustive maximum structure (small inputs only).
    Oracle(OracleArgs),
    /// Solve the constrained top-k minimisation behind the bound.
    OptSolve(OptSolveArgs),
    /// Generate an instance.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Collapse a space onto epsilon-cells.
    Discretize(DiscretizeArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Space JSON, or a point-cloud CSV (by `.csv` extension).
    #[arg(value_name = "INPUT", required_unless_present = "input")]
    path: Option<PathBuf>,
    #[arg(long, conflicts_with = "path")]
    input: Option<PathBuf>,
    /// Metric for point-cloud inputs.
    #[arg(long, default_value = "euclidean")]
    metric: PointMetric,
}

#[derive(Args)]
struct ScaleArgs {
    #[arg(long)]
    r: f64,
    #[arg(long)]
    k: usize,
    /// Upper end of the medium band as a multiple of r. Values other than 3
    /// are for exploration and do not give a certificate.
    #[arg(long, default_value_t = ScaleParams::CERTIFIED_MEDIUM_MULTIPLIER)]
    medium_multiplier: f64,
}

#[derive(Args)]
struct BetaArgs {
    /// Node budget for exact anticlique enumeration.
    #[arg(long, default_value_t = DEFAULT_ANTICLIQUE_BUDGET)]
    anticlique_budget: u64,
    /// Estimate beta by sampling this many tuples (needs --seed).
    #[arg(long)]
    mc_samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Never sample; fail when the exact budget runs out.
    #[arg(long, conflicts_with = "approx")]
    exact: bool,
    /// Accept budget-limited clique incumbents and fall back to sampling
    /// for beta (with --mc-samples, default 100000).
    #[arg(long)]
    approx: bool,
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    scale: ScaleArgs,
    #[command(flatten)]
    beta: BetaArgs,
    /// Use this alpha instead of the computed one.
    #[arg(long)]
    alpha: Option<f64>,
    /// Use this beta instead of the computed one.
    #[arg(long = "beta")]
    beta_value: Option<f64>,
    /// Node budget per maximum-cluster search.
    #[arg(long, default_value_t = DEFAULT_CLIQUE_BUDGET)]
    budget: u64,
    /// Build the structure from the first k greedy stages rather than the
    /// k heaviest.
    #[arg(long)]
    first_k: bool,
    /// Also run the exhaustive search.
    #[arg(long)]
    oracle: bool,
    #[arg(long, default_value_t = DEFAULT_ORACLE_LIMIT)]
    oracle_limit: usize,
    #[arg(long, default_value_t = DEFAULT_HISTOGRAM_BINS)]
    bins: usize,
    /// Write the distance histogram as CSV.
    #[arg(long)]
    emit_histogram: Option<PathBuf>,
    /// Leave timings out so reports are byte-reproducible.
    #[arg(long)]
    no_timings: bool,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    scale: ScaleArgs,
    #[command(flatten)]
    beta: BetaArgs,
    #[arg(long, default_value_t = DEFAULT_HISTOGRAM_BINS)]
    bins: usize,
    #[arg(long)]
    emit_histogram: Option<PathBuf>,
}

#[derive(Args)]
struct GreedyArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    scale: ScaleArgs,
    #[arg(long, default_value_t = DEFAULT_CLIQUE_BUDGET)]
    budget: u64,
    #[arg(long)]
    approx: bool,
    #[arg(long)]
    first_k: bool,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    scale: ScaleArgs,
    #[arg(long, default_value_t = DEFAULT_ORACLE_LIMIT)]
    limit: usize,
}

#[derive(Args)]
struct OptSolveArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    c: f64,
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    resolution: f64,
}

#[derive(Args)]
struct OutArgs {
    /// Output file; standard output when absent. A provenance record is
    /// written next to it as `<out>.prov.json`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GenCommand {
    /// Separated groups with short inner distances.
    Model {
        #[arg(long)]
        clusters: usize,
        #[arg(long)]
        points: usize,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        separation: f64,
        #[arg(long)]
        seed: u64,
        /// Allow r < separation <= 3r.
        #[arg(long)]
        weak: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// s groups of m points, 2r' apart inside a group and r' across.
    Adversarial {
        #[arg(long)]
        s: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        r_prime: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Gaussian blobs as a point-cloud CSV.
    Blobs {
        #[arg(long)]
        blobs: usize,
        #[arg(long)]
        points: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long)]
        spread: f64,
        #[arg(long)]
        separation: f64,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Random points in the unit square, or random semimetric distances.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value = "uniform-cube")]
        style: StyleArg,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StyleArg {
    UniformCube,
    RandomSemimetric,
}

#[derive(Args)]
struct DiscretizeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    epsilon: f64,
    #[arg(long, default_value_t = DEFAULT_DENOMINATOR_BOUND)]
    denominator_bound: u64,
    /// Quotient space JSON.
    #[arg(long)]
    out: PathBuf,
    /// Cell to original-index mapping; defaults to `<out>.mapping.json`.
    #[arg(long)]
    mapping: Option<PathBuf>,
    /// With --k, also report the inflated alpha and beta.
    #[arg(long, requires = "k")]
    r: Option<f64>,
    #[arg(long, requires = "r")]
    k: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_ANTICLIQUE_BUDGET)]
    anticlique_budget: u64,
}

impl ScaleArgs {
    fn params(&self) -> anyhow::Result<ScaleParams> {
        Ok(ScaleParams::new(self.r, self.k)?.with_medium_multiplier(self.medium_multiplier)?)
    }
}

impl BetaArgs {
    fn method(&self) -> anyhow::Result<BetaMethod> {
        let sampled = |samples: u64| -> anyhow::Result<(u64, u64)> {
            let seed = self
                .seed
                .ok_or_else(|| anyhow!("--seed is required when sampling anticliques"))?;
            Ok((samples, seed))
        };
        Ok(match (self.mc_samples, self.approx) {
            (Some(n), false) if self.exact => bail!("--mc-samples {n} contradicts --exact"),
            (Some(n), false) => {
                let (samples, seed) = sampled(n)?;
                BetaMethod::MonteCarlo { samples, seed }
            }
            (n, true) => {
                let (samples, seed) = sampled(n.unwrap_or(100_000))?;
                BetaMethod::ExactOrSampled {
                    budget: self.anticlique_budget,
                    samples,
                    seed,
                }
            }
            (None, false) => BetaMethod::Exact {
                budget: self.anticlique_budget,
            },
        })
    }
}

struct Loaded {
    space: FiniteMetricSpace,
    digest: String,
}

fn load(args: &InputArgs) -> anyhow::Result<Loaded> {
    let path = args
        .path
        .as_ref()
        .or(args.input.as_ref())
        .ok_or_else(|| anyhow!("no input given"))?;
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let source = path.display().to_string();
    let is_csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let space = if is_csv {
        read_point_cloud(bytes.as_slice(), &source)
            .and_then(|cloud| cloud.to_space(args.metric))
            .with_context(|| format!("loading {source}"))?
    } else {
        let text = std::str::from_utf8(&bytes).with_context(|| format!("{source} is not UTF-8"))?;
        parse_space_json(text, &source).with_context(|| format!("loading {source}"))?
    };
    Ok(Loaded {
        space,
        digest: bytes_digest(&bytes),
    })
}

/// Writes through a temporary sibling and renames, so readers never see a
/// partial file.
fn write_atomic(path: &Path, contents: &[u8]) -> anyhow::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming onto {}", path.display()))?;
    Ok(())
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    let mut text = text.to_owned();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match out {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("output serialises")
}

fn histogram_csv(path: &Path, bins: &[HistogramBin]) -> anyhow::Result<()> {
    let mut text = String::from("lower,upper,mass\n");
    for b in bins {
        let upper = b.upper.map(|u| u.to_string()).unwrap_or_else(|| "inf".into());
        text.push_str(&format!("{},{},{}\n", b.lower, upper, b.mass));
    }
    write_atomic(path, text.as_bytes())
}

fn run_certify(args: &CertifyArgs) -> anyhow::Result<u8> {
    let loaded = load(&args.input)?;
    let params = args.scale.params()?;
    let options = CertifyOptions {
        alpha: args.alpha,
        beta: args.beta_value,
        greedy: GreedyOptions {
            budget: args.budget,
            approx: args.beta.approx,
        },
        beta_method: args.beta.method()?,
        histogram_bins: args.bins,
        oracle: args.oracle,
        oracle_limit: args.oracle_limit,
        selection: selection(args.first_k),
        workers: Workers::from_env(),
        timings: !args.no_timings,
    };
    let report = certify_with_digest(&loaded.space, &params, &options, loaded.digest)?;
    if let Some(path) = &args.emit_histogram {
        histogram_csv(path, &report.stats.histogram)?;
    }
    emit(args.out.as_deref(), &report.to_json())?;
    Ok(if report.certified { 0 } else { EXIT_NOT_CERTIFIED })
}

fn selection(first_k: bool) -> StageSelection {
    if first_k {
        StageSelection::First
    } else {
        StageSelection::Heaviest
    }
}

#[derive(Serialize)]
struct ValidateOutput {
    valid: bool,
    n: usize,
    total_measure: f64,
    uniform: bool,
    triangle_holds: bool,
    input_digest: String,
}

#[derive(Serialize)]
struct GreedyOutput {
    structure: clustercert::ClusterStructure,
    decomposition: clustercert::GreedyDecomposition,
    coverage_ratio: f64,
}

#[derive(Serialize)]
struct OptOutput {
    #[serde(flatten)]
    solution: OptSolution,
    lower_bound: f64,
    bound_valid: bool,
    gap: f64,
}

#[derive(Serialize)]
struct DiscretizeOutput {
    epsilon: f64,
    points: usize,
    cells: usize,
    masses: Vec<CellMass>,
    exact_fallbacks: usize,
    quotient: String,
    mapping: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    inflated: Option<InflatedParams>,
}

#[derive(Serialize)]
struct Provenance<'a> {
    generator: &'a GeneratorSpec,
    tool_version: &'static str,
}

fn run_gen(command: &GenCommand) -> anyhow::Result<()> {
    let (spec, out) = match command {
        GenCommand::Model {
            clusters,
            points,
            r,
            separation,
            seed,
            weak,
            out,
        } => (
            GeneratorSpec::Model(ModelSpec {
                clusters: *clusters,
                points_per_cluster: *points,
                r: *r,
                separation: *separation,
                seed: *seed,
                allow_weak_separation: *weak,
            }),
            out,
        ),
        GenCommand::Adversarial { s, m, r, r_prime, out } => (
            GeneratorSpec::Adversarial(AdversarialSpec {
                groups: *s,
                group_size: *m,
                r: *r,
                r_prime: *r_prime,
            }),
            out,
        ),
        GenCommand::Blobs {
            blobs,
            points,
            dim,
            spread,
            separation,
            seed,
            out,
        } => (
            GeneratorSpec::Blobs(BlobSpec {
                blobs: *blobs,
                points_per_blob: *points,
                dim: *dim,
                spread: *spread,
                separation: *separation,
                seed: *seed,
            }),
            out,
        ),
        GenCommand::Random { n, seed, style, out } => (
            GeneratorSpec::Random(RandomSpec {
                n: *n,
                seed: *seed,
                style: match style {
                    StyleArg::UniformCube => RandomStyle::UniformCube,
                    StyleArg::RandomSemimetric => RandomStyle::RandomSemimetric,
                },
            }),
            out,
        ),
    };
    let text = match generate(&spec)? {
        Generated::Space(space) => space_to_json(&space, false),
        Generated::Cloud(cloud) => {
            let mut buf = Vec::new();
            write_point_cloud(&mut buf, &cloud)?;
            String::from_utf8(buf).expect("csv output is UTF-8")
        }
    };
    emit(out.out.as_deref(), &text)?;
    if let Some(path) = &out.out {
        let mut sidecar = path.as_os_str().to_owned();
        sidecar.push(".prov.json");
        let record = Provenance {
            generator: &spec,
            tool_version: env!("CARGO_PKG_VERSION"),
        };
        write_atomic(Path::new(&sidecar), to_json(&record).as_bytes())?;
    }
    Ok(())
}

fn run_discretize(args: &DiscretizeArgs) -> anyhow::Result<()> {
    let loaded = load(&args.input)?;
    let space = &loaded.space;
    let d = discretize(space, args.epsilon, args.denominator_bound)?;
    let inflated = match (args.r, args.k) {
        (Some(r), Some(k)) => {
            let params = ScaleParams::new(r, k)?;
            let beta = clustercert::stats::beta_min(space, &params, args.anticlique_budget)?;
            Some(inflated_params(space, &params, args.epsilon, beta)?)
        }
        _ => None,
    };
    let mapping = args.mapping.clone().unwrap_or_else(|| {
        let mut p = args.out.as_os_str().to_owned();
        p.push(".mapping.json");
        PathBuf::from(p)
    });
    write_atomic(&args.out, space_to_json(&d.quotient.space, false).as_bytes())?;
    write_atomic(&mapping, to_json(&d.cells).as_bytes())?;
    let output = DiscretizeOutput {
        epsilon: args.epsilon,
        points: space.n(),
        cells: d.cells.len(),
        exact_fallbacks: d.quotient.masses.iter().filter(|m| m.numerator.is_none()).count(),
        masses: d.quotient.masses,
        quotient: args.out.display().to_string(),
        mapping: mapping.display().to_string(),
        inflated,
    };
    emit(None, &to_json(&output))
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let workers = Workers::from_env();
    match cli.command {
        Command::Certify(args) => return run_certify(&args),
        Command::Validate(args) => {
            let loaded = load(&args)?;
            let s = &loaded.space;
            emit(
                None,
                &to_json(&ValidateOutput {
                    valid: true,
                    n: s.n(),
                    total_measure: s.total_measure(),
                    uniform: s.is_uniform(),
                    triangle_holds: s.triangle_holds(),
                    input_digest: loaded.digest,
                }),
            )?;
        }
        Command::Stats(args) => {
            let loaded = load(&args.input)?;
            let params = args.scale.params()?;
            let method = args.beta.method()?;
            let stats = workers.install(|| compute_stats(&loaded.space, &params, method, args.bins))?;
            if let Some(path) = &args.emit_histogram {
                histogram_csv(path, &stats.histogram)?;
            }
            emit(None, &to_json(&stats))?;
        }
        Command::Greedy(args) => {
            let loaded = load(&args.input)?;
            let params = args.scale.params()?;
            let options = GreedyOptions {
                budget: args.budget,
                approx: args.approx,
            };
            let (structure, decomposition) =
                greedy_structure(&loaded.space, &params, &options, selection(args.first_k))?;
            let coverage_ratio = structure.measure / loaded.space.total_measure();
            emit(
                None,
                &to_json(&GreedyOutput {
                    structure,
                    decomposition,
                    coverage_ratio,
                }),
            )?;
        }
        Command::Oracle(args) => {
            let loaded = load(&args.input)?;
            let params = args.scale.params()?;
            let result = max_structure_bruteforce(&loaded.space, &params, args.limit)?;
            emit(None, &to_json(&result))?;
        }
        Command::OptSolve(args) => {
            let solution = opt_solve_numeric(args.n, args.k, args.c, args.resolution)?;
            let (lower_bound, bound_valid) = opt_lower_bound(args.c, args.k);
            let gap = solution.objective - lower_bound;
            emit(
                None,
                &to_json(&OptOutput {
                    solution,
                    lower_bound,
                    bound_valid,
                    gap,
                }),
            )?;
        }
        Command::Gen(command) => run_gen(&command)?,
        Command::Discretize(args) => run_discretize(&args)?,
    }
    Ok(0)
}

fn hint(err: &anyhow::Error) -> Option<&'static str> {
    match err.downcast_ref::<Error>()? {
        Error::BudgetExceeded { .. } => {
            Some("raise --anticlique-budget, or estimate beta with --mc-samples N --seed S (or --approx)")
        }
        Error::ClusterBudgetExceeded { .. } => {
            Some("raise --budget, or pass --approx to accept the best cluster found so far")
        }
        Error::TooLarge { .. } => Some("the exhaustive search is for small inputs; raise --limit with care"),
        _ => None,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            if let Some(h) = hint(&err) {
                eprintln!("hint: {h}");
            }
            ExitCode::from(EXIT_ERROR)
        }
    }
}
