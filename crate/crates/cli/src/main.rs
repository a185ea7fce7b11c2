mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use davenport_core::bounds::{
    bound_report, error_ratio, lemma_chain_check, theorem6_bounds, BoundReport, ChainStatus, MultiPrimeSpec,
};
use davenport_core::cache::{Cache, CacheEntry, CacheStatus};
use davenport_core::constructive::{
    conjecture1_check, lemma13_case1, lemma13_case2, lemma15_augment, prop14_extract, theorem2_decide, Checkpoint,
    ConjectureOptions, ConjectureStatus, Extraction,
};
use davenport_core::extremal::{construct_extremal, verify_deficiency, ExtremalRecipe, RecipeSource};
use davenport_core::group::{abelian_groups_of_order, canonicalize};
use davenport_core::io::SequenceFile;
use davenport_core::pairs::{normalize, PairSequence};
use davenport_core::search::{compute, ComputeResult, Invariant, SearchBudget};
use davenport_core::{BoundsError, ConstructionError, GSequence, GroupSpec, SearchError, SequenceError};
use serde::Serialize;
use serde_json::{json, Value};

use output::{emit, Format, Output};

const EXIT_BUDGET: u8 = 2;
const EXIT_INVALID: u8 = 3;
const EXIT_COUNTEREXAMPLE: u8 = 4;
const EXIT_INTERNAL: u8 = 1;

/// Default node budget per group for `verify lemmas`.
const LEMMA_NODE_BUDGET: u64 = 20_000_000;

#[derive(Parser)]
#[command(name = "davenport", version, about = "Zero-sum invariants of finite abelian groups")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Stop a search after this many nodes (lifts the size guard).
    #[arg(long, global = true)]
    budget_nodes: Option<u64>,
    /// Stop a search after this many seconds (lifts the size guard).
    #[arg(long, global = true)]
    budget_seconds: Option<f64>,
    /// Sequential search and reproducible output bytes.
    #[arg(long, global = true)]
    deterministic: bool,
    /// JSON file of previously computed values.
    #[arg(long, global = true, value_name = "FILE")]
    cache: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute D, D_r, eta or eta_r exactly.
    Exact {
        /// `davenport` or `eta`.
        invariant: Invariant,
        #[arg(long)]
        group: GroupSpec,
        #[arg(long, default_value_t = 1)]
        r: u64,
    },
    /// Collect every closed-form bound that applies.
    Bounds {
        #[arg(long)]
        group: GroupSpec,
        #[arg(long, default_value_t = 1)]
        r: u64,
        #[arg(long, default_value = "davenport")]
        invariant: Invariant,
    },
    /// Multi-prime sandwich and its relative gap for r = 1..max-r.
    Ratio {
        #[arg(long)]
        group: GroupSpec,
        #[arg(long, default_value_t = 5)]
        max_r: u64,
    },
    /// Build an extremal sequence and check it has no r disjoint zero-sums.
    Construct {
        /// thm3, thm4, cor5.1-S, cor5.2-S1 or cor5.2-S2.
        #[arg(long)]
        recipe: RecipeSource,
        /// `p=3 e=1,2 m=1 n=1 r=2`; m, n and r default to 1.
        #[arg(long, num_args = 1.., required = true)]
        params: Vec<String>,
        /// Also write the sequence file here.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Extract a certified zero-sum from a sequence over H × C_q.
    Extract {
        method: ExtractMethod,
        #[arg(long)]
        input: PathBuf,
        /// Positions of one x-zero-sum, comma-separated (repeat per member).
        #[arg(long)]
        family: Vec<String>,
        /// Positions of an x-zero-sum whose length is a multiple of q.
        #[arg(long)]
        subset: Option<String>,
        /// Positions of a proper zero-sum of the augmented sequence.
        #[arg(long)]
        witness: Option<String>,
    },
    /// Find a zero-sum or certify a counterexample.
    Decide {
        method: DecideMethod,
        #[arg(long)]
        input: PathBuf,
    },
    /// Exhaustive check over structured sequences.
    Check {
        which: CheckTarget,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        d: u64,
        /// Continue from a saved checkpoint.
        #[arg(long)]
        resume: Option<PathBuf>,
        /// Write progress here.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Check the subgroup and quotient inequalities on every group in a range.
    Verify {
        which: VerifyTarget,
        #[arg(long)]
        max_order: u64,
        #[arg(long, default_value_t = 3)]
        max_r: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ExtractMethod {
    Prop14,
    Lemma13,
    Lemma15,
}

#[derive(Clone, Copy, ValueEnum)]
enum DecideMethod {
    Thm2,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckTarget {
    Conjecture1,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyTarget {
    Lemmas,
}

/// A failed command: exit status and message.
struct Exit {
    code: u8,
    message: String,
    output: Option<Output>,
}

impl Exit {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Exit { code, message: message.into(), output: None }
    }

    fn invalid(message: impl ToString) -> Self {
        Exit::new(EXIT_INVALID, message.to_string())
    }

    fn with_output(mut self, out: Output) -> Self {
        self.output = Some(out);
        self
    }
}

impl From<ConstructionError> for Exit {
    fn from(e: ConstructionError) -> Self {
        match e {
            ConstructionError::Counterexample(s) => match write_counterexample(&SequenceFile::from_sequence(&s)) {
                Ok(path) => Exit::new(EXIT_COUNTEREXAMPLE, format!("counterexample written to {}", path.display())),
                Err(e) => e,
            },
            ConstructionError::Inconsistency(m) => Exit::new(EXIT_INTERNAL, format!("internal inconsistency: {m}")),
            other => Exit::invalid(other),
        }
    }
}

impl From<BoundsError> for Exit {
    fn from(e: BoundsError) -> Self {
        match e {
            BoundsError::Contradiction(m) => Exit::new(EXIT_INTERNAL, format!("contradictory bounds: {m}")),
            other => Exit::invalid(other),
        }
    }
}

impl From<SequenceError> for Exit {
    fn from(e: SequenceError) -> Self {
        Exit::invalid(e)
    }
}

struct Ctx {
    format: Format,
    budget: SearchBudget,
    deterministic: bool,
    cache: Option<Cache>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_INVALID) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(exit) => {
            eprintln!("error: {}", exit.message);
            ExitCode::from(exit.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Exit> {
    let mut budget = SearchBudget { deterministic: cli.deterministic, ..SearchBudget::default() };
    budget.max_nodes = cli.budget_nodes;
    if let Some(s) = cli.budget_seconds {
        let t = Duration::try_from_secs_f64(s).map_err(|e| Exit::invalid(format!("--budget-seconds: {e}")))?;
        budget.max_time = Some(t);
    }
    let cache = match &cli.cache {
        Some(path) => Some(Cache::open(path).map_err(Exit::invalid)?),
        None => None,
    };
    let mut ctx = Ctx { format: cli.format, budget, deterministic: cli.deterministic, cache };
    let result = match cli.command {
        Command::Exact { invariant, group, r } => cmd_exact(&mut ctx, &group, invariant, r),
        Command::Bounds { group, r, invariant } => cmd_bounds(&ctx, &group, invariant, r),
        Command::Ratio { group, max_r } => cmd_ratio(&group, max_r),
        Command::Construct { recipe, params, output } => cmd_construct(recipe, &params, output.as_deref()),
        Command::Extract { method, input, family, subset, witness } => {
            cmd_extract(method, &input, &family, subset.as_deref(), witness.as_deref())
        }
        Command::Decide { method: DecideMethod::Thm2, input } => cmd_decide(&input),
        Command::Check { which: CheckTarget::Conjecture1, p, q, d, resume, checkpoint } => {
            cmd_conjecture(&ctx, p, q, d, resume.as_deref(), checkpoint)
        }
        Command::Verify { which: VerifyTarget::Lemmas, max_order, max_r } => cmd_lemmas(&ctx, max_order, max_r),
    };
    let format = ctx.format;
    if let Some(cache) = &ctx.cache {
        cache.save().map_err(|e| Exit::new(EXIT_INTERNAL, e.to_string()))?;
    }
    match result {
        Ok(out) => emit(&out, format).map_err(|e| Exit::new(EXIT_INTERNAL, e.to_string())),
        Err(mut exit) => {
            if let Some(out) = exit.output.take() {
                emit(&out, format).map_err(|e| Exit::new(EXIT_INTERNAL, e.to_string()))?;
            }
            Err(exit)
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("plain data")
}

/// Writes `counterexample-<unix seconds>.json` in the working directory.
fn write_counterexample(file: &SequenceFile) -> Result<PathBuf, Exit> {
    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let mut path = PathBuf::from(format!("counterexample-{secs}.json"));
    let mut k = 1;
    while path.exists() {
        path = PathBuf::from(format!("counterexample-{secs}-{k}.json"));
        k += 1;
    }
    fs::write(&path, file.to_text()).map_err(|e| Exit::new(EXIT_INTERNAL, format!("{}: {e}", path.display())))?;
    Ok(path)
}

fn notice_canonical(g: &GroupSpec) {
    let c = canonicalize(g);
    if &c != g {
        eprintln!("note: {g} canonicalized to {c}");
    }
}

#[derive(Serialize)]
struct Report {
    #[serde(flatten)]
    bounds: BoundReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<SequenceFile>,
    runtime_ms: u64,
    nodes: u64,
}

fn cmd_exact(ctx: &mut Ctx, g: &GroupSpec, inv: Invariant, r: u64) -> Result<Output, Exit> {
    if r == 0 {
        return Err(Exit::invalid("r must be at least 1"));
    }
    notice_canonical(g);
    let cached = ctx.cache.as_ref().and_then(|c| c.get(g, inv, r)).cloned();
    let start = Instant::now();
    let deterministic = ctx.deterministic;
    let runtime = |start: Instant| if deterministic { 0 } else { start.elapsed().as_millis() as u64 };
    if let Some(entry) = cached.as_ref().filter(|e| e.status == CacheStatus::Exact && !ctx.deterministic) {
        let bounds = bound_report(g, inv, r, Some(entry.value))?;
        return Ok(Output::Record(to_value(&Report { bounds, certificate: None, runtime_ms: 0, nodes: 0 })));
    }
    match compute(g, inv, r, &ctx.budget) {
        Ok(ComputeResult { value, certificate, nodes }) => {
            if let Some(entry) = cached.filter(|e| e.status == CacheStatus::Exact) {
                if entry.value != value {
                    return Err(Exit::new(
                        EXIT_INTERNAL,
                        format!("cached value {} disagrees with computed {value}", entry.value),
                    ));
                }
            }
            record(ctx, CacheEntry::new(g, inv, r, value, CacheStatus::Exact))?;
            let bounds = bound_report(g, inv, r, Some(value))?;
            let certificate = Some(SequenceFile::from_sequence(&certificate));
            let report = Report { bounds, certificate, runtime_ms: runtime(start), nodes };
            Ok(Output::Record(to_value(&report)))
        }
        Err(SearchError::BudgetExceeded { lower_bound, nodes, certificate }) => {
            record(ctx, CacheEntry::new(g, inv, r, lower_bound, CacheStatus::LowerBound))?;
            let mut bounds = bound_report(g, inv, r, None)?;
            bounds.lower = bounds.lower.max(lower_bound);
            let certificate = Some(SequenceFile::from_sequence(&certificate));
            let report = Report { bounds, certificate, runtime_ms: runtime(start), nodes };
            Err(Exit::new(EXIT_BUDGET, format!("budget exhausted after {nodes} nodes; best lower bound {lower_bound}"))
                .with_output(Output::Record(to_value(&report))))
        }
        Err(e @ SearchError::SizeGuard { .. }) => {
            Err(Exit::new(EXIT_BUDGET, format!("{e}; pass --budget-nodes or --budget-seconds to search anyway")))
        }
        Err(e) => Err(Exit::invalid(e)),
    }
}

fn record(ctx: &mut Ctx, entry: CacheEntry) -> Result<(), Exit> {
    if let Some(cache) = ctx.cache.as_mut() {
        cache.record(entry).map_err(|e| Exit::new(EXIT_INTERNAL, e.to_string()))?;
    }
    Ok(())
}

fn cmd_bounds(ctx: &Ctx, g: &GroupSpec, inv: Invariant, r: u64) -> Result<Output, Exit> {
    if r == 0 {
        return Err(Exit::invalid("r must be at least 1"));
    }
    notice_canonical(g);
    let exact = ctx
        .cache
        .as_ref()
        .and_then(|c| c.get(g, inv, r))
        .filter(|e| e.status == CacheStatus::Exact)
        .map(|e| e.value);
    Ok(Output::Record(to_value(&bound_report(g, inv, r, exact)?)))
}

fn cmd_ratio(g: &GroupSpec, max_r: u64) -> Result<Output, Exit> {
    let spec = MultiPrimeSpec::from_group(g)?;
    let mut rows = Vec::new();
    for r in 1..=max_r {
        let bounds = theorem6_bounds(&spec, r)?;
        let Some(sandwich) = bounds.value() else {
            return Err(Exit::invalid(bounds.reason().unwrap_or("bounds do not apply").to_string()));
        };
        let ratio = error_ratio(&spec, r)?.into_value().expect("applies with the bounds");
        let decimal = ratio.numer().to_string().parse::<f64>().unwrap_or(f64::NAN)
            / ratio.denom().to_string().parse::<f64>().unwrap_or(f64::NAN);
        rows.push(json!({
            "r": r,
            "lower": sandwich.lower.to_string().parse::<u64>().ok(),
            "upper": sandwich.upper.to_string().parse::<u64>().ok(),
            "error_ratio": ratio.to_string(),
            "error_ratio_decimal": decimal,
        }));
    }
    Ok(Output::Records(rows))
}

fn parse_params(params: &[String]) -> Result<(u64, Vec<u32>, u64, u64, u64), Exit> {
    let (mut p, mut e, mut m, mut n, mut r) = (None, None, 1, 1, 1);
    for item in params.iter().flat_map(|s| s.split_whitespace()) {
        let (k, v) = item.split_once('=').ok_or_else(|| Exit::invalid(format!("parameter `{item}` is not key=value")))?;
        let num = |v: &str| v.parse::<u64>().map_err(|_| Exit::invalid(format!("parameter `{k}`: `{v}` is not a number")));
        match k {
            "p" => p = Some(num(v)?),
            "e" | "exps" => {
                let exps = v
                    .split(',')
                    .map(|x| x.trim().parse::<u32>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| Exit::invalid(format!("parameter `e`: `{v}` is not a list of exponents")))?;
                e = Some(exps);
            }
            "m" => m = num(v)?,
            "n" => n = num(v)?,
            "r" => r = num(v)?,
            other => return Err(Exit::invalid(format!("unknown parameter `{other}`"))),
        }
    }
    let p = p.ok_or_else(|| Exit::invalid("missing parameter p"))?;
    let e = e.ok_or_else(|| Exit::invalid("missing parameter e"))?;
    Ok((p, e, m, n, r))
}

fn cmd_construct(source: RecipeSource, params: &[String], output: Option<&Path>) -> Result<Output, Exit> {
    let (p, exps, m, n, r) = parse_params(params)?;
    let recipe = ExtremalRecipe::new(source, p, exps, m, n, r)?;
    let seq = construct_extremal(&recipe)?;
    let file = SequenceFile::from_sequence(&seq);
    if let Some(path) = output {
        fs::write(path, file.to_text()).map_err(|e| Exit::new(EXIT_INTERNAL, format!("{}: {e}", path.display())))?;
    }
    let verdict = verify_deficiency(&seq, r);
    let mut record = json!({
        "recipe": source.tag(),
        "group": recipe.group()?,
        "r": r,
        "claimed_bound": recipe.claimed_bound()?.to_string().parse::<u64>().ok(),
        "length": seq.len(),
        "deficient": verdict.as_ref().ok(),
        "sequence": file,
    });
    match verdict {
        Ok(true) => Ok(Output::Record(record)),
        Ok(false) => {
            let path = write_counterexample(&file)?;
            record["counterexample_file"] = json!(path.display().to_string());
            Err(Exit::new(EXIT_COUNTEREXAMPLE, format!("sequence has {r} disjoint zero-sums; written to {}", path.display()))
                .with_output(Output::Record(record)))
        }
        Err(e) => Err(Exit::new(EXIT_BUDGET, format!("deficiency not verified: {e}")).with_output(Output::Record(record))),
    }
}

fn read_pairs(path: &Path) -> Result<PairSequence, Exit> {
    let text = fs::read_to_string(path).map_err(|e| Exit::invalid(format!("{}: {e}", path.display())))?;
    Ok(SequenceFile::parse(&text)?.to_pairs()?)
}

fn positions(list: &str) -> Result<Vec<usize>, Exit> {
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<usize>().map_err(|_| Exit::invalid(format!("`{s}` is not a position"))))
        .collect()
}

/// `p` and `d` of `C_p^d`, read from the x-coordinate group.
fn elementary(s: &PairSequence) -> Result<(u64, u64), Exit> {
    let h = s.h();
    let p = *h.orders().first().ok_or_else(|| Exit::invalid("x-coordinate group is trivial"))?;
    if h.orders().iter().any(|&o| o != p) {
        return Err(Exit::invalid(format!("x-coordinates must lie in an elementary group, found {h}")));
    }
    Ok((p, h.len() as u64))
}

fn extraction_output(method: &str, s: &PairSequence, w: &Extraction) -> Result<Output, Exit> {
    if !w.is_valid_for(s) {
        return Err(Exit::new(EXIT_INTERNAL, "returned witness failed validation"));
    }
    let sub = GSequence::from_elements(s.group(), w.positions.iter().map(|&i| s.element(i)))
        .map_err(|e| Exit::new(EXIT_INTERNAL, e.to_string()))?;
    Ok(Output::Record(json!({
        "method": method,
        "route": w.route,
        "length": w.positions.len(),
        "positions": w.positions,
        "subsequence": SequenceFile::from_sequence(&sub),
    })))
}

fn cmd_extract(
    method: ExtractMethod,
    input: &Path,
    family: &[String],
    subset: Option<&str>,
    witness: Option<&str>,
) -> Result<Output, Exit> {
    let s = read_pairs(input)?;
    match method {
        ExtractMethod::Prop14 => {
            let (p, d) = elementary(&s)?;
            let (st, perm) = normalize(&s, p, d)?;
            let w = prop14_extract(&st)?;
            let mut mapped: Vec<usize> = w.positions.iter().map(|&k| perm[k]).collect();
            mapped.sort_unstable();
            let w = Extraction { positions: mapped, ..w };
            extraction_output("prop14", &s, &w)
        }
        ExtractMethod::Lemma13 => {
            let w = match (family.is_empty(), subset) {
                (false, None) => {
                    let fam = family.iter().map(|m| positions(m)).collect::<Result<Vec<_>, _>>()?;
                    lemma13_case1(&s, &fam)?
                }
                (true, Some(t)) => lemma13_case2(&s, &positions(t)?)?,
                _ => return Err(Exit::invalid("give either --family (repeated) or --subset")),
            };
            extraction_output("lemma13", &s, &w)
        }
        ExtractMethod::Lemma15 => {
            let aug = lemma15_augment(&s);
            match witness {
                Some(list) => {
                    let w = aug.pullback(&positions(list)?)?;
                    extraction_output("lemma15", &s, &w)
                }
                None => Ok(Output::Record(json!({
                    "method": "lemma15",
                    "appended": aug.appended(),
                    "augmented": SequenceFile::from_pairs(aug.sequence()),
                }))),
            }
        }
    }
}

fn cmd_decide(input: &Path) -> Result<Output, Exit> {
    let s = read_pairs(input)?;
    let (p, d) = elementary(&s)?;
    let w = theorem2_decide(&s, p, d)?;
    extraction_output("thm2", &s, &w)
}

fn cmd_conjecture(
    ctx: &Ctx,
    p: u64,
    q: u64,
    d: u64,
    resume: Option<&Path>,
    checkpoint: Option<PathBuf>,
) -> Result<Output, Exit> {
    let resume = resume.map(Checkpoint::load).transpose()?;
    let done = resume.as_ref().map_or(0, |c| c.candidates_checked);
    let opts = ConjectureOptions {
        max_candidates: ctx.budget.max_nodes.map(|n| done.saturating_add(n)),
        max_time: ctx.budget.max_time,
        checkpoint_path: checkpoint,
        resume,
    };
    let verdict = conjecture1_check(p, q, d, &opts)?;
    let mut record = json!({
        "p": p,
        "q": q,
        "d": d,
        "status": verdict.status,
        "search_space_size": verdict.search_space_size,
        "candidates_checked": verdict.candidates_checked,
        "checkpoint": verdict.checkpoint,
    });
    match verdict.status {
        ConjectureStatus::Verified => Ok(Output::Record(record)),
        ConjectureStatus::BudgetExceeded => {
            Err(Exit::new(EXIT_BUDGET, "budget exhausted before the check finished").with_output(Output::Record(record)))
        }
        ConjectureStatus::Counterexample => {
            let cex = verdict.counterexample.as_ref().expect("counterexample present");
            let path = write_counterexample(&SequenceFile::from_pairs(&cex.to_pair_sequence()))?;
            record["counterexample_file"] = json!(path.display().to_string());
            Err(Exit::new(EXIT_COUNTEREXAMPLE, format!("counterexample written to {}", path.display()))
                .with_output(Output::Record(record)))
        }
    }
}

fn cmd_lemmas(ctx: &Ctx, max_order: u64, max_r: u64) -> Result<Output, Exit> {
    if max_r == 0 {
        return Err(Exit::invalid("max-r must be at least 1"));
    }
    let mut budget = ctx.budget.clone();
    if budget.max_nodes.is_none() && budget.max_time.is_none() {
        budget.max_nodes = Some(LEMMA_NODE_BUDGET);
    }
    let mut rows = Vec::new();
    let mut failures = 0;
    for n in 2..=max_order {
        for g in abelian_groups_of_order(n) {
            let rep = lemma_chain_check(&g, max_r, &budget);
            for f in rep.failures() {
                eprintln!("FAIL {g}: {:?} r={} {}", f.inequality, f.r, f.detail);
            }
            failures += rep.count(ChainStatus::Fail);
            rows.push(json!({
                "group": g,
                "pass": rep.count(ChainStatus::Pass),
                "fail": rep.count(ChainStatus::Fail),
                "vacuous": rep.count(ChainStatus::Vacuous),
                "skipped": rep.count(ChainStatus::Skipped),
            }));
        }
    }
    if failures > 0 {
        return Err(Exit::new(EXIT_COUNTEREXAMPLE, format!("{failures} inequality instances failed"))
            .with_output(Output::Records(rows)));
    }
    Ok(Output::Records(rows))
}
