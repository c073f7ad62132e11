use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use backperm::audit::{
    check_backwards_uniform, check_maxwise, check_minwise, efficiency_witness, equivalence_report_graph,
    lower_bound_certificate_graph, min_backwards_alpha,
};
use backperm::construct::{
    alpha_uniform_family, dk_distribution, dk_permutation, lcm_family, pebble, ConstructionSidecar, DkParams,
    PebbleOptions, PreconditionCheck,
};
use backperm::experiments::stats::trial_rng;
use backperm::experiments::{
    incremental_cost_experiment, kkt_single_batch, quicksort_comparisons, DistributionSource, DkSource,
    ExperimentResult, FamilySource, FixedSubsets, MemorylessSource, PermutationSource, SubsetSource, UniformSource,
    UniformSubsets, WeightedGraph,
};
use backperm::format::{detect_kind, parse_distribution, parse_family, write_distribution, write_family, PermutationFileKind};
use backperm::oracle::{brute_conditional_last, brute_expected_cost, brute_maxwise, brute_minwise, exact_entropy};
use backperm::transition::TransitionGraphJson;
use backperm::{
    build_transition_graph, uniform_transition_graph, Error, Limits, PermutationDistribution, PermutationFamily,
    Rational, Result, SubsetMask, TransitionGraph,
};

#[derive(Parser, Debug)]
#[command(name = "backperm", version, about = "Construct, audit and experiment with permutation distributions")]
struct Cli {
    #[command(flatten)]
    caps: Caps,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Caps {
    /// Largest n for explicit enumeration of S_n.
    #[arg(long, global = true, default_value_t = 8)]
    explicit_cap: usize,
    /// Largest n for subset-lattice work.
    #[arg(long, global = true, default_value_t = 20)]
    lattice_cap: usize,
    /// Largest family or support size.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    family_cap: u128,
}

impl Caps {
    fn limits(&self) -> Limits {
        Limits {
            explicit_n: self.explicit_cap,
            lattice_n: self.lattice_cap,
            family_size: self.family_cap,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a permutation family.
    Construct {
        #[command(subcommand)]
        which: Construct,
    },
    /// Audit a family or distribution file.
    Audit(AuditArgs),
    /// Run a randomized experiment.
    Experiment {
        #[command(subcommand)]
        which: Experiment,
    },
    /// Brute-force probabilities and expectations of a family or distribution.
    Oracle(OracleArgs),
}

#[derive(Args, Debug)]
struct OutArg {
    /// Output file. A sidecar JSON is written to `<out>.json`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SeedArg {
    #[arg(long, env = "BACKPERM_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Construct {
    /// The exact minwise family of size lcm(1..n).
    Lcm {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Round a transition graph into t permutations.
    Pebble {
        /// Transition graph JSON.
        #[arg(long, conflicts_with = "uniform", required_unless_present = "uniform")]
        graph: Option<PathBuf>,
        /// Use the transition graph of U(S_n).
        #[arg(long)]
        uniform: Option<usize>,
        #[arg(long)]
        t: u64,
        #[arg(long, default_value = "1")]
        epsilon: Rational,
        #[arg(long, value_enum, default_value_t = CheckArg::Full)]
        check: CheckArg,
        #[command(flatten)]
        out: OutArg,
    },
    /// The recursive D_k distribution on 2^k·t elements.
    Dk {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        t: usize,
        /// Draw this many samples instead of writing the exact distribution.
        #[arg(long)]
        samples: Option<usize>,
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        out: OutArg,
    },
    /// A small backwards alpha-uniform family.
    AlphaUniform {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        alpha: u64,
        #[arg(long, default_value = "1")]
        epsilon: Rational,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CheckArg {
    Full,
    LowerBound,
    Distinctness,
    None,
}

impl From<CheckArg> for PreconditionCheck {
    fn from(c: CheckArg) -> Self {
        match c {
            CheckArg::Full => PreconditionCheck::Full,
            CheckArg::LowerBound => PreconditionCheck::LowerBoundOnly,
            CheckArg::Distinctness => PreconditionCheck::DistinctnessOnly,
            CheckArg::None => PreconditionCheck::None,
        }
    }
}

#[derive(Args, Debug)]
struct AuditArgs {
    /// Family or distribution file.
    input: PathBuf,
    /// Backwards-uniformity parameters to check.
    #[arg(long, value_delimiter = ',')]
    alpha: Vec<Rational>,
    /// Tolerance for the minwise and maxwise checks.
    #[arg(long, default_value = "0")]
    epsilon: Rational,
}

#[derive(Subcommand, Debug)]
enum Experiment {
    /// Comparisons of quicksort with pivots in insertion order.
    Quicksort {
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// One sampling round of the randomized MST algorithm.
    Kkt {
        /// Edge list `n m` then `u v w` lines.
        #[arg(long, conflicts_with = "complete", required_unless_present = "complete")]
        graph: Option<PathBuf>,
        /// Use K_n with random distinct weights drawn from --graph-seed.
        #[arg(long)]
        complete: Option<usize>,
        #[arg(long, default_value_t = 0)]
        graph_seed: u64,
        #[arg(long, default_value = "1/2")]
        p: Rational,
        /// Sample uniformly from the subsets listed in this file (one line of
        /// 0-based edge indices each) instead of all size-pm subsets.
        #[arg(long)]
        subsets: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Total cost of the adversarial cost function of a reference file.
    Generic {
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        source: SourceArgs,
        /// Family or distribution whose adversarial cost function is charged.
        /// Defaults to the source input.
        #[arg(long)]
        cost_from: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum SourceKind {
    Uniform,
    Family,
    Distribution,
    Memoryless,
    Dk,
}

#[derive(Args, Debug)]
struct SourceArgs {
    #[arg(long, value_enum, default_value_t = SourceKind::Uniform)]
    source: SourceKind,
    /// Input file for family, distribution and memoryless sources.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    t: Option<usize>,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[command(flatten)]
    seed: SeedArg,
    /// CSV of per-trial values. The JSON summary goes to `<out>.json`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(value_enum)]
    query: OracleQuery,
    /// Family or distribution file.
    input: PathBuf,
    /// Comma-separated members of Y.
    #[arg(long, value_delimiter = ',')]
    set: Vec<usize>,
    #[arg(long)]
    element: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OracleQuery {
    Minwise,
    Maxwise,
    Conditional,
    /// Expected cost of the adversarial cost function.
    Cost,
    Entropy,
}

fn read(path: &Path) -> Result<String> {
    Ok(fs::read_to_string(path)?)
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn pretty(v: Value) -> Result<String> {
    Ok(serde_json::to_string_pretty(&v)?)
}

/// Reads a family or distribution file as a distribution.
fn load_distribution(path: &Path) -> Result<PermutationDistribution> {
    let text = read(path)?;
    match detect_kind(&text)? {
        PermutationFileKind::Family => PermutationDistribution::uniform_over(&parse_family(&text)?),
        PermutationFileKind::Distribution => parse_distribution(&text),
    }
}

fn load_graph(path: &Path) -> Result<TransitionGraph> {
    let json: TransitionGraphJson = serde_json::from_str(&read(path)?)?;
    TransitionGraph::from_json(&json)
}

/// Writes the primary artifact and the sidecar, or prints the artifact when
/// no output path is given.
fn emit(body: &str, out: &OutArg, sidecar: &ConstructionSidecar) -> Result<()> {
    match &out.out {
        Some(path) => {
            fs::write(path, body)?;
            let side = pretty(serde_json::to_value(sidecar)?)?;
            fs::write(with_suffix(path, ".json"), format!("{side}\n"))?;
            println!("{side}");
        }
        None => print!("{body}"),
    }
    Ok(())
}

fn family_audits(family: &PermutationFamily, limits: &Limits) -> Result<(Rational, Value)> {
    let d = PermutationDistribution::uniform_over(family)?;
    let g = build_transition_graph(&d)?;
    let alpha = min_backwards_alpha(&g);
    let audits = json!({
        "size": family.t(),
        "pairwise_distinct": family.is_pairwise_distinct(),
        "equivalence": equivalence_report_graph(&g, limits).ok(),
        "efficiency_witness": efficiency_witness(&g),
        "entropy": d.entropy(),
    });
    Ok((alpha, audits))
}

fn cmd_construct(which: &Construct, limits: &Limits) -> Result<()> {
    match which {
        Construct::Lcm { n, out } => {
            let family = lcm_family(*n, limits)?;
            let (alpha, audits) = family_audits(&family, limits)?;
            let side = ConstructionSidecar {
                construction: "lcm".into(),
                parameters: json!({ "n": n }),
                seed: None,
                achieved_alpha: Some(alpha),
                audits,
            };
            emit(&write_family(&family), out, &side)
        }
        Construct::Pebble {
            graph,
            uniform,
            t,
            epsilon,
            check,
            out,
        } => {
            let g = match (graph, uniform) {
                (Some(path), _) => load_graph(path)?,
                (None, Some(n)) => uniform_transition_graph(*n, limits)?,
                (None, None) => return Err(Error::InvalidArgument("give --graph or --uniform".into())),
            };
            let opts = PebbleOptions {
                t: *t,
                epsilon: epsilon.clone(),
                check: (*check).into(),
            };
            let outcome = pebble(&g, &opts, limits)?;
            let (alpha, mut audits) = family_audits(&outcome.family, limits)?;
            audits["exact_clause"] = json!(outcome.exact_clause);
            audits["t_lower_bound"] = json!(outcome.t_lower_bound);
            audits["distinct_t_max"] = json!(outcome.distinct_t_max);
            let side = ConstructionSidecar {
                construction: "pebble".into(),
                parameters: json!({ "n": g.n(), "t": t, "epsilon": epsilon, "check": opts.check }),
                seed: None,
                achieved_alpha: Some(alpha),
                audits,
            };
            emit(&write_family(&outcome.family), out, &side)
        }
        Construct::Dk { k, t, samples, seed, out } => {
            let params = DkParams::new(*k, *t)?;
            let n = params.ground_size();
            let parameters = json!({ "k": k, "t": t, "n": n, "samples": samples });
            match samples {
                Some(count) => {
                    let members = (0..*count as u64)
                        .map(|i| dk_permutation(params, &mut trial_rng(seed.seed, i)))
                        .collect();
                    let family = PermutationFamily::new(n, members)?;
                    let side = ConstructionSidecar {
                        construction: "dk".into(),
                        parameters,
                        seed: Some(seed.seed),
                        achieved_alpha: None,
                        audits: json!({ "size": family.t(), "pairwise_distinct": family.is_pairwise_distinct() }),
                    };
                    emit(&write_family(&family), out, &side)
                }
                None => {
                    let d = dk_distribution(params, limits)?;
                    let g = build_transition_graph(&d)?;
                    let side = ConstructionSidecar {
                        construction: "dk".into(),
                        parameters,
                        seed: None,
                        achieved_alpha: Some(min_backwards_alpha(&g)),
                        audits: json!({
                            "support": d.len(),
                            "efficiency_witness": efficiency_witness(&g),
                            "entropy": d.entropy(),
                        }),
                    };
                    emit(&write_distribution(&d), out, &side)
                }
            }
        }
        Construct::AlphaUniform { n, alpha, epsilon, out } => {
            let outcome = alpha_uniform_family(*n, *alpha, epsilon, limits)?;
            let side = ConstructionSidecar {
                construction: "alpha-uniform".into(),
                parameters: json!({ "n": n, "alpha": alpha, "epsilon": epsilon }),
                seed: None,
                achieved_alpha: Some(outcome.achieved_alpha.clone()),
                audits: serde_json::to_value(&outcome)?,
            };
            emit(&write_family(&outcome.family), out, &side)
        }
    }
}

fn cmd_audit(args: &AuditArgs, limits: &Limits) -> Result<()> {
    let d = load_distribution(&args.input)?;
    let g = build_transition_graph(&d)?;
    let uniform: Vec<_> = args.alpha.iter().map(|a| check_backwards_uniform(&g, a)).collect();
    let report = json!({
        "n": d.n(),
        "support": d.len(),
        "equivalence": equivalence_report_graph(&g, limits)?,
        "backwards_uniform": uniform,
        "min_backwards_alpha": min_backwards_alpha(&g),
        "minwise": check_minwise(&d, &args.epsilon, limits)?,
        "maxwise": check_maxwise(&d, &args.epsilon, limits)?,
        "efficiency_witness": efficiency_witness(&g),
        "entropy": d.entropy(),
        "certificate": lower_bound_certificate_graph(&g, d.entropy())?,
    });
    println!("{}", pretty(report)?);
    Ok(())
}

fn build_source(args: &SourceArgs, n: Option<usize>, limits: &Limits) -> Result<Box<dyn PermutationSource>> {
    let need_input = || {
        args.input
            .as_deref()
            .ok_or_else(|| Error::InvalidArgument("this source needs --input".into()))
    };
    let source: Box<dyn PermutationSource> = match args.source {
        SourceKind::Uniform => {
            let n = n.ok_or_else(|| Error::InvalidArgument("the uniform source needs --n".into()))?;
            Box::new(UniformSource::new(n)?)
        }
        SourceKind::Family => {
            let path = need_input()?;
            Box::new(FamilySource::new(parse_family(&read(path)?)?, path.display().to_string()))
        }
        SourceKind::Distribution => {
            let path = need_input()?;
            Box::new(DistributionSource::new(load_distribution(path)?, path.display().to_string()))
        }
        SourceKind::Memoryless => {
            let path = need_input()?;
            let g = match load_graph(path) {
                Ok(g) => g,
                Err(_) => build_transition_graph(&load_distribution(path)?)?,
            };
            limits.check_lattice(g.n())?;
            Box::new(MemorylessSource::new(g))
        }
        SourceKind::Dk => {
            let (k, t) = args
                .k
                .zip(args.t)
                .ok_or_else(|| Error::InvalidArgument("the dk source needs --k and --t".into()))?;
            Box::new(DkSource::new(DkParams::new(k, t)?))
        }
    };
    if let Some(n) = n {
        if n != source.n() {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: source.n(),
            });
        }
    }
    Ok(source)
}

fn finish_experiment(result: &ExperimentResult, run: &RunArgs) -> Result<()> {
    let summary = pretty(serde_json::to_value(result)?)?;
    if let Some(path) = &run.out {
        fs::write(path, result.to_csv())?;
        fs::write(with_suffix(path, ".json"), format!("{summary}\n"))?;
    }
    println!("{summary}");
    Ok(())
}

fn parse_subsets(text: &str) -> Result<Vec<Vec<usize>>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| {
            l.split_whitespace()
                .map(|tok| {
                    tok.parse().map_err(|_| Error::Parse {
                        line: i + 1,
                        message: format!("bad edge index `{tok}`"),
                    })
                })
                .collect()
        })
        .collect()
}

fn cmd_experiment(which: &Experiment, limits: &Limits) -> Result<()> {
    match which {
        Experiment::Quicksort { n, source, run } => {
            let src = build_source(source, *n, limits)?;
            let result = quicksort_comparisons(src.as_ref(), run.trials, run.seed.seed)?;
            finish_experiment(&result, run)
        }
        Experiment::Kkt {
            graph,
            complete,
            graph_seed,
            p,
            subsets,
            run,
        } => {
            let g = match (graph, complete) {
                (Some(path), _) => WeightedGraph::parse(&read(path)?)?,
                (None, Some(n)) => WeightedGraph::complete_random(*n, *graph_seed)?,
                (None, None) => return Err(Error::InvalidArgument("give --graph or --complete".into())),
            };
            let sampler: Box<dyn SubsetSource> = match subsets {
                Some(path) => {
                    let choices = parse_subsets(&read(path)?)?;
                    if let Some(&bad) = choices.iter().flatten().find(|&&e| e >= g.m()) {
                        return Err(Error::InvalidArgument(format!("edge index {bad} out of range")));
                    }
                    Box::new(FixedSubsets::new(choices)?)
                }
                None => Box::new(UniformSubsets),
            };
            let result = kkt_single_batch(&g, p, sampler.as_ref(), run.trials, run.seed.seed)?;
            finish_experiment(&result, run)
        }
        Experiment::Generic {
            n,
            source,
            cost_from,
            run,
        } => {
            let src = build_source(source, *n, limits)?;
            let reference = cost_from
                .as_deref()
                .or(source.input.as_deref())
                .ok_or_else(|| Error::InvalidArgument("give --cost-from or an --input source".into()))?;
            let g = build_transition_graph(&load_distribution(reference)?)?;
            let cost = backperm::audit::adversarial_cost_function(&g);
            let result = incremental_cost_experiment(src.as_ref(), &cost, run.trials, run.seed.seed)?
                .with_extra("cost_from", reference.display().to_string())
                .with_extra("reference_efficiency_witness", efficiency_witness(&g).to_string());
            finish_experiment(&result, run)
        }
    }
}

fn cmd_oracle(args: &OracleArgs) -> Result<()> {
    let d = load_distribution(&args.input)?;
    let query = || -> Result<(SubsetMask, usize)> {
        let y = SubsetMask::from_elements(d.n(), args.set.iter().copied())?;
        let x = args
            .element
            .ok_or_else(|| Error::InvalidArgument("this query needs --element".into()))?;
        Ok((y, x))
    };
    let value = match args.query {
        OracleQuery::Minwise => {
            let (y, x) = query()?;
            json!(brute_minwise(&d, y, x)?)
        }
        OracleQuery::Maxwise => {
            let (y, x) = query()?;
            json!(brute_maxwise(&d, y, x)?)
        }
        OracleQuery::Conditional => {
            let (y, x) = query()?;
            json!(brute_conditional_last(&d, y, x)?)
        }
        OracleQuery::Cost => {
            let c = backperm::audit::adversarial_cost_function(&build_transition_graph(&d)?);
            json!(brute_expected_cost(&d, &c)?)
        }
        OracleQuery::Entropy => json!(exact_entropy(&d)),
    };
    println!("{}", json!({ "query": format!("{:?}", args.query).to_lowercase(), "value": value }));
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    let limits = cli.caps.limits();
    match &cli.command {
        Command::Construct { which } => cmd_construct(which, &limits),
        Command::Audit(args) => cmd_audit(args, &limits),
        Command::Experiment { which } => cmd_experiment(which, &limits),
        Command::Oracle(args) => cmd_oracle(args),
    }
}

fn fail(kind: &str, message: String) -> ExitCode {
    eprintln!("{}", json!({ "error": kind, "message": message }));
    ExitCode::FAILURE
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let message = text
                .lines()
                .map(str::trim)
                .take_while(|l| !l.starts_with("Usage:"))
                .filter(|l| !l.is_empty())
                .collect::<Vec<_>>()
                .join(" ");
            return fail("UsageError", message);
        }
    };
    log::debug!("{cli:?}");
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e.kind(), e.to_string()),
    }
}
