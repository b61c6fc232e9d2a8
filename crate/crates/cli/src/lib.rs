//! Command implementations behind the `gmarkov` binary.

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gmarkov_core::address::TreeKind;
use gmarkov_core::cohn::{self, CohnTriple};
use gmarkov_core::criterion::{self, UniquenessVerdict};
use gmarkov_core::farey::{self, Fraction};
use gmarkov_core::markov_tree::{self, MarkovTriple};
use gmarkov_core::numtheory::{is_probable_prime_with_rounds, Budget};
use gmarkov_core::report::Report;
use gmarkov_core::verify;
use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

/// Default hard cap on enumeration depth.
pub const DEPTH_CAP: usize = 16;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] gmarkov_core::error::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Whether the selected checks held.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Failed,
}

impl Outcome {
    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Success => 0,
            Outcome::Failed => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TreeSel {
    Mt,
    Lmt,
    Wmt,
    Wgct,
    Gct,
    Lgct,
}

impl TreeSel {
    pub fn kind(self) -> TreeKind {
        match self {
            TreeSel::Wmt | TreeSel::Wgct => TreeKind::Wide,
            TreeSel::Mt | TreeSel::Gct => TreeKind::Main,
            TreeSel::Lmt | TreeSel::Lgct => TreeKind::Left,
        }
    }

    pub fn is_cohn(self) -> bool {
        matches!(self, TreeSel::Wgct | TreeSel::Gct | TreeSel::Lgct)
    }
}

/// An inclusive range of `k`: `5`, `0..10` or `0..=10`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KRange {
    pub start: u64,
    pub end: u64,
}

impl KRange {
    pub fn single(k: u64) -> Self {
        Self { start: k, end: k }
    }

    pub fn iter(self) -> impl Iterator<Item = u64> {
        self.start..=self.end
    }

    pub fn len(self) -> u64 {
        self.end - self.start + 1
    }

    pub fn is_empty(self) -> bool {
        false
    }
}

impl FromStr for KRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let num = |t: &str| t.trim().parse::<u64>().map_err(|e| format!("bad k {t:?}: {e}"));
        let (start, end) = match s.split_once("..") {
            Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
            None => {
                let k = num(s)?;
                (k, k)
            }
        };
        if start > end {
            return Err(format!("empty k range {s}"));
        }
        Ok(Self { start, end })
    }
}

impl fmt::Display for KRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.start == self.end {
            write!(f, "{}", self.start)
        } else {
            write!(f, "{}..{}", self.start, self.end)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Trees,
    Cohn,
    Farey,
    Criterion,
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Prime shapes, then the solution count, then the 2^(n-1) bound.
    Best,
    Criterion,
    Shape,
    Bound,
}

#[derive(Debug, Parser)]
#[command(name = "gmarkov", version, about = "Generalized Markov triples, Cohn matrices and uniqueness checks")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Pollard rho iterations per factorization.
    #[arg(long, global = true, env = "GMARKOV_RHO_BUDGET", default_value_t = Budget::DEFAULT_RHO_ITERATIONS)]
    pub rho_budget: u64,
    /// Extra Miller-Rabin rounds on top of BPSW above 64 bits.
    #[arg(long, global = true, env = "GMARKOV_PRIME_ROUNDS", default_value_t = 0)]
    pub prime_rounds: u32,
    #[arg(long, global = true, default_value_t = DEPTH_CAP)]
    pub depth_cap: usize,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Print the vertices of a tree in (depth, address) order.
    Enumerate {
        #[arg(long, default_value = "0")]
        k: KRange,
        #[arg(long, value_enum, default_value = "mt")]
        tree: TreeSel,
        #[arg(long)]
        depth: usize,
        /// Root parameter of the Cohn trees (default -k).
        #[arg(long, allow_hyphen_values = true)]
        l: Option<i64>,
    },
    /// Sorted primes among all entries of LMT(k) to the given depth.
    Primes {
        #[arg(long, default_value = "0..10")]
        k: KRange,
        #[arg(long, default_value_t = 10)]
        depth: usize,
    },
    /// Run invariant suites; exits 1 on any failure.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value = "0..10")]
        k: KRange,
        #[arg(long, default_value_t = 10)]
        depth: usize,
        #[arg(long, allow_hyphen_values = true)]
        l: Option<i64>,
        /// Random matrix samples for the trace identity and lemmas.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, hide = true)]
        fault_broken_mediant: bool,
    },
    /// m_t and u_t for a fraction t in [0, 1].
    Label {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        t: Fraction,
    },
    /// Uniqueness verdict for b as a maximum.
    Criterion {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        b: BigUint,
        #[arg(long, value_enum, default_value = "best")]
        method: Method,
    },
}

/// Settings shared by the tree-walking commands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub ks: KRange,
    pub depth: usize,
    pub depth_cap: usize,
    pub tree: TreeSel,
    pub l: Option<i64>,
    pub format: Format,
    pub budget: Budget,
    pub prime_rounds: u32,
    pub threads: Option<usize>,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(global: &GlobalOpts, ks: KRange, depth: usize) -> Self {
        Self {
            ks,
            depth,
            depth_cap: global.depth_cap,
            tree: TreeSel::Mt,
            l: None,
            format: global.format,
            budget: Budget::new(global.rho_budget),
            prime_rounds: global.prime_rounds,
            threads: global.threads,
            output: global.output.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.depth > self.depth_cap {
            return Err(CliError::Usage(format!("depth {} exceeds the cap {}", self.depth, self.depth_cap)));
        }
        if self.budget.rho_iterations == 0 {
            return Err(CliError::Usage("the rho budget must be positive".into()));
        }
        if self.threads == Some(0) {
            return Err(CliError::Usage("threads must be positive".into()));
        }
        Ok(())
    }

    fn l_for(&self, k: u64) -> i64 {
        self.l.unwrap_or(-(k as i64))
    }
}

/// Runs `cli`, writing to `--output` or stdout.
pub fn run(cli: &Cli) -> Result<Outcome> {
    if let Some(n) = cli.global.threads {
        if n == 0 {
            return Err(CliError::Usage("threads must be positive".into()));
        }
        // a second call in one process keeps the first pool, which is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let mut out: Box<dyn Write> = match &cli.global.output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let outcome = run_to(cli, &mut out)?;
    out.flush()?;
    Ok(outcome)
}

/// Runs `cli`, writing to `out`.
pub fn run_to(cli: &Cli, out: &mut dyn Write) -> Result<Outcome> {
    let g = &cli.global;
    if g.rho_budget == 0 {
        return Err(CliError::Usage("the rho budget must be positive".into()));
    }
    match &cli.command {
        Command::Enumerate { k, tree, depth, l } => {
            let mut config = RunConfig::new(g, *k, *depth);
            config.tree = *tree;
            config.l = *l;
            config.validate()?;
            cmd_enumerate(&config, out)
        }
        Command::Primes { k, depth } => {
            let config = RunConfig::new(g, *k, *depth);
            config.validate()?;
            cmd_primes(&config, out)
        }
        Command::Verify { suite, k, depth, l, samples, seed, fault_broken_mediant } => {
            let mut config = RunConfig::new(g, *k, *depth);
            config.l = *l;
            config.validate()?;
            let opts = VerifyOpts {
                suite: *suite,
                samples: *samples,
                seed: *seed,
                broken_mediant: *fault_broken_mediant,
            };
            cmd_verify(&config, &opts, out)
        }
        Command::Label { k, t } => cmd_label(*k, t, g.format, out),
        Command::Criterion { k, b, method } => {
            cmd_criterion(*k, b, *method, Budget::new(g.rho_budget), g.format, out)
        }
    }
}

fn markov_row(t: &MarkovTriple, format: Format) -> Result<String> {
    let addr = t.address().cloned().unwrap_or_default();
    Ok(match format {
        Format::Text => format!("{}\t{}\t{}\t({}, {}, {})", t.k(), addr.depth(), show(&addr), t.a(), t.b(), t.c()),
        Format::Csv => format!("{},{},{},{},{},{}", t.k(), addr.depth(), addr, t.a(), t.b(), t.c()),
        Format::Json => json_line(t)?,
    })
}

fn cohn_row(t: &CohnTriple, format: Format) -> Result<String> {
    let addr = t.address().cloned().unwrap_or_default();
    let l = t.l().map(|l| l.to_string()).unwrap_or_default();
    let [a, b, c] = t.markov_entries();
    let [p, q, r] = t.matrices();
    Ok(match format {
        Format::Text => format!("{}\t{}\t{}\t{}\tP = {p}\tQ = {q}\tR = {r}", t.k(), l, addr.depth(), show(&addr)),
        Format::Csv => {
            let flat = |m: &cohn::Mat2| m.entries().map(|e| e.to_string()).join(" ");
            format!(
                "{},{},{},{},{a},{b},{c},{},{},{}",
                t.k(),
                l,
                addr.depth(),
                addr,
                flat(p),
                flat(q),
                flat(r)
            )
        }
        Format::Json => json_line(t)?,
    })
}

fn show(addr: &gmarkov_core::address::TreeAddress) -> String {
    if addr.is_root() {
        "root".into()
    } else {
        addr.to_string()
    }
}

fn json_line<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string(value).map_err(|e| CliError::Io(e.into()))
}

/// Writes every vertex of the selected tree for each `k`.
pub fn cmd_enumerate(config: &RunConfig, out: &mut dyn Write) -> Result<Outcome> {
    if config.format == Format::Csv {
        if config.tree.is_cohn() {
            writeln!(out, "k,l,depth,address,a,b,c,P,Q,R")?;
        } else {
            writeln!(out, "k,depth,address,a,b,c")?;
        }
    }
    for k in config.ks.iter() {
        let rows: Vec<String> = if config.tree.is_cohn() {
            cohn::enumerate_cohn(k, config.l_for(k), config.depth, config.tree.kind())
                .par_iter()
                .map(|t| cohn_row(t, config.format))
                .collect::<Result<_>>()?
        } else {
            markov_tree::enumerate_levels(k, config.depth, config.tree.kind())
                .into_iter()
                .flatten()
                .collect::<Vec<_>>()
                .par_iter()
                .map(|t| markov_row(t, config.format))
                .collect::<Result<_>>()?
        };
        for row in rows {
            writeln!(out, "{row}")?;
        }
    }
    Ok(Outcome::Success)
}

/// All distinct entries of LMT(k) to `depth` that are probable primes,
/// ascending.
pub fn lmt_primes(k: u64, depth: usize, rounds: u32) -> Vec<BigUint> {
    let mut values: Vec<BigUint> = markov_tree::enumerate_levels(k, depth, TreeKind::Left)
        .into_iter()
        .flatten()
        .flat_map(|t| [t.a().clone(), t.b().clone(), t.c().clone()])
        .collect();
    values.sort();
    values.dedup();
    values
        .into_par_iter()
        .filter(|v| is_probable_prime_with_rounds(v, rounds))
        .collect()
}

#[derive(Serialize)]
struct PrimeList {
    k: String,
    depth: usize,
    count: usize,
    primes: Vec<String>,
}

pub fn cmd_primes(config: &RunConfig, out: &mut dyn Write) -> Result<Outcome> {
    if config.format == Format::Csv {
        writeln!(out, "k,prime")?;
    }
    let many = config.ks.len() > 1;
    for k in config.ks.iter() {
        let primes = lmt_primes(k, config.depth, config.prime_rounds);
        match config.format {
            Format::Text => {
                if many {
                    writeln!(out, "# k = {k}: {} primes", primes.len())?;
                }
                for p in &primes {
                    writeln!(out, "{p}")?;
                }
            }
            Format::Csv => {
                for p in &primes {
                    writeln!(out, "{k},{p}")?;
                }
            }
            Format::Json => {
                let list = PrimeList {
                    k: k.to_string(),
                    depth: config.depth,
                    count: primes.len(),
                    primes: primes.iter().map(|p| p.to_string()).collect(),
                };
                writeln!(out, "{}", json_line(&list)?)?;
            }
        }
    }
    Ok(Outcome::Success)
}

#[derive(Debug, Clone)]
pub struct VerifyOpts {
    pub suite: Suite,
    pub samples: usize,
    pub seed: u64,
    /// Builds the Farey tree with a faulty mediant, to exercise the failure path.
    pub broken_mediant: bool,
}

#[derive(Debug, Serialize)]
pub struct VerifySummary {
    pub passed: bool,
    pub reports: Vec<Report>,
}

/// `(a+c)/(b+d+1)`: wrong on purpose.
fn broken_mediant(p: &Fraction, q: &Fraction) -> gmarkov_core::error::Result<Fraction> {
    Fraction::new(p.num() + q.num(), p.den() + q.den() + 1)
}

/// Runs the selected suites and collects their reports.
pub fn run_suites(config: &RunConfig, opts: &VerifyOpts) -> Result<Vec<Report>> {
    let selected = |s: Suite| opts.suite == Suite::All || opts.suite == s;
    let depth = config.depth;
    let mut reports = Vec::new();
    if selected(Suite::Trees) {
        for k in config.ks.iter() {
            reports.extend(verify::trees_suite(k, depth));
        }
        reports.push(verify::square_suite(depth.min(8)));
    }
    if selected(Suite::Cohn) {
        let lemma_samples = opts.samples.min(200);
        for k in config.ks.iter() {
            reports.extend(verify::cohn_suite(k, config.l_for(k), depth, lemma_samples, opts.seed ^ k));
        }
    }
    if selected(Suite::Farey) {
        reports.push(if opts.broken_mediant {
            verify::farey_suite_with(depth, broken_mediant)
        } else {
            verify::farey_suite(depth)
        });
        for k in config.ks.iter() {
            reports.push(verify::labels_suite(k, depth));
        }
    }
    if selected(Suite::Criterion) {
        for k in config.ks.iter() {
            reports.extend(verify::criterion_suite(k, depth, config.budget)?);
        }
    }
    if selected(Suite::Identity) {
        reports.push(verify::identity_suite(opts.samples, opts.seed));
    }
    Ok(reports)
}

/// Text mode prints one line per report and, on failure, the JSON summary
/// of the failed reports; JSON mode prints the full summary.
pub fn cmd_verify(config: &RunConfig, opts: &VerifyOpts, out: &mut dyn Write) -> Result<Outcome> {
    let reports = run_suites(config, opts)?;
    let passed = reports.iter().all(Report::passed);
    match config.format {
        Format::Json => {
            writeln!(out, "{}", json_line(&VerifySummary { passed, reports })?)?;
        }
        Format::Text | Format::Csv => {
            for r in &reports {
                let mark = if r.passed() { "PASS" } else { "FAIL" };
                if config.format == Format::Csv {
                    writeln!(out, "{mark},{},{},{}", r.name, r.checked, r.failed)?;
                } else {
                    writeln!(out, "{mark}  {}  ({} checked, {} failed)", r.name, r.checked, r.failed)?;
                }
            }
            if !passed {
                let failed: Vec<Report> = reports.into_iter().filter(|r| !r.passed()).collect();
                let summary = VerifySummary { passed, reports: failed };
                writeln!(out, "{}", json_line(&summary)?)?;
            }
        }
    }
    Ok(if passed { Outcome::Success } else { Outcome::Failed })
}

pub fn cmd_label(k: u64, t: &Fraction, format: Format, out: &mut dyn Write) -> Result<Outcome> {
    let l = farey::label(k, t)?;
    let u = l.u_t.as_ref().map(|u| u.to_string());
    match format {
        Format::Text => writeln!(out, "m = {}, u = {}", l.m_t, u.as_deref().unwrap_or("undefined"))?,
        Format::Csv => writeln!(out, "k,t,m_t,u_t\n{},{},{},{}", l.k, l.t, l.m_t, u.unwrap_or_default())?,
        Format::Json => writeln!(out, "{}", json_line(&l)?)?,
    }
    Ok(Outcome::Success)
}

/// The verdict from `method`; `Bound` reports the `2^(n-1)` limit as a
/// `BoundOnly` verdict.
pub fn verdict(k: u64, b: &BigUint, method: Method, budget: Budget) -> Result<UniquenessVerdict> {
    Ok(match method {
        Method::Best => criterion::best_verdict(k, b, budget)?,
        Method::Criterion => criterion::criterion_applies(k, b, budget)?,
        Method::Shape => criterion::prime_shape_verdict(k, b, budget)?,
        Method::Bound => {
            let limit = criterion::bound_2_pow(k, b, budget)?;
            let mut v = criterion::prime_shape_verdict(k, b, budget)?;
            v.verdict = criterion::Verdict::BoundOnly(limit);
            v
        }
    })
}

pub fn cmd_criterion(
    k: u64,
    b: &BigUint,
    method: Method,
    budget: Budget,
    format: Format,
    out: &mut dyn Write,
) -> Result<Outcome> {
    let v = verdict(k, b, method, budget)?;
    let solutions = v
        .solutions
        .as_ref()
        .filter(|s| s.is_complete())
        .map(|s| s.residues().iter().map(|r| r.to_string()).collect::<Vec<_>>());
    let bound = match &v.verdict {
        criterion::Verdict::BoundOnly(limit) => limit.to_string(),
        _ => String::new(),
    };
    match format {
        Format::Text => {
            write!(out, "{}", v.verdict)?;
            if !bound.is_empty() {
                write!(out, " (at most {bound})")?;
            }
            if let Some(s) = &solutions {
                write!(out, ", solutions [{}]", s.join(", "))?;
            }
            if let Some(note) = &v.note {
                write!(out, ", {note}")?;
            }
            writeln!(out)?;
        }
        Format::Csv => {
            let s = solutions.map(|s| s.join(" ")).unwrap_or_default();
            writeln!(out, "k,b,verdict,solutions,bound\n{k},{b},{},{s},{bound}", v.verdict)?;
        }
        Format::Json => writeln!(out, "{}", json_line(&v)?)?,
    }
    Ok(Outcome::Success)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (Result<Outcome>, String) {
        let cli = Cli::try_parse_from(std::iter::once("gmarkov").chain(args.iter().copied())).unwrap();
        let mut buf = Vec::new();
        let r = run_to(&cli, &mut buf);
        (r, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn k_ranges() {
        assert_eq!("5".parse::<KRange>().unwrap(), KRange::single(5));
        assert_eq!("0..10".parse::<KRange>().unwrap().len(), 11);
        assert_eq!("2..=4".parse::<KRange>().unwrap(), KRange { start: 2, end: 4 });
        assert!("4..2".parse::<KRange>().is_err());
        assert!("x".parse::<KRange>().is_err());
    }

    #[test]
    fn depth_over_cap_is_usage_error() {
        let (r, _) = run_args(&["enumerate", "--depth", "17"]);
        assert!(matches!(r, Err(CliError::Usage(_))));
        let (r, out) = run_args(&["--depth-cap", "20", "enumerate", "--tree", "wmt", "--depth", "0"]);
        assert!(r.is_ok());
        assert_eq!(out.lines().count(), 1);
    }

    #[test]
    fn enumerate_text_and_csv() {
        let (_, out) = run_args(&["enumerate", "--k", "1", "--tree", "lmt", "--depth", "0"]);
        assert_eq!(out, "1\t0\troot\t(1, 13, 3)\n");
        let (_, out) = run_args(&["--format", "csv", "enumerate", "--tree", "mt", "--depth", "1"]);
        assert_eq!(out, "k,depth,address,a,b,c\n0,0,,1,2,1\n0,1,L,1,5,2\n0,1,R,2,5,1\n");
    }

    #[test]
    fn cohn_rows_carry_l() {
        let (_, out) = run_args(&["--format", "csv", "enumerate", "--k", "2", "--tree", "lgct", "--depth", "0"]);
        assert_eq!(out.lines().nth(1).unwrap(), "2,-2,0,,1,25,4,-2 1 -19 9,4 25 35 219,1 4 8 33");
    }

    #[test]
    fn label_and_criterion_text() {
        assert_eq!(run_args(&["label", "--k", "0", "--t", "1/2"]).1, "m = 5, u = 2\n");
        assert_eq!(run_args(&["criterion", "--k", "7", "--b", "9"]).1, "Unknown, solutions [1, 4, 7]\n");
        assert_eq!(run_args(&["criterion", "--k", "0", "--b", "29"]).1, "UniqueByPrimeOr2p\n");
    }

    #[test]
    fn label_domain_error() {
        let (r, _) = run_args(&["label", "--k", "0", "--t", "3/2"]);
        assert!(matches!(r, Err(CliError::Core(_))));
    }
}
