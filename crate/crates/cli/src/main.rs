use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use kneserlab::bounds::{self, BoundReport};
use kneserlab::families;
use kneserlab::io;
use kneserlab::kneser;
use kneserlab::lowint::{self, SpreadSample};
use kneserlab::search::{self, Budget, SearchOptions};
use kneserlab::{Exec, Family, KSet, Params};

#[derive(Parser)]
#[command(name = "kneserlab", version, about = "Families of k-sets and their Kneser subgraphs")]
struct Cli {
    /// Worker threads for the parallel kernels; 1 runs everything sequentially.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Exit with status 4 when an assertable bound is violated.
    #[arg(long, global = true)]
    test_mode: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a named family and write it as JSON.
    Construct(ConstructArgs),
    /// Size, maximum degree, edges, covering number and c(1), c(2) of a family file.
    Measure { file: PathBuf },
    /// Evaluate bound checkers on a family file.
    Bounds(BoundsArgs),
    /// Exact minimum of the maximum degree or the edge count over m-member families.
    Search(SearchArgs),
    /// Generate a family with small pairwise intersections.
    Spread(SpreadArgs),
    /// Exact degree of G_s beside the lower bounds for two-element covers.
    Tightness {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        s: usize,
    },
    /// Compare the closed-form second eigenvalue of KG(n,k) with its spectrum.
    Spectral {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyKind {
    Star,
    StarPlus,
    Hm,
    #[value(name = "D")]
    D,
    #[value(name = "E")]
    E,
    #[value(name = "W")]
    W,
    #[value(name = "Wprime")]
    Wprime,
    #[value(name = "G")]
    G,
    Lex,
    Random,
}

#[derive(clap::Args)]
struct ConstructArgs {
    #[arg(long, value_enum)]
    family: FamilyKind,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    /// Center element.
    #[arg(long, default_value_t = 1)]
    x: usize,
    /// Extra set for star-plus, comma separated (default [2, k+1]).
    #[arg(long)]
    t: Option<String>,
    /// The set avoiding x for hm and D.
    #[arg(long)]
    f0: Option<String>,
    /// The set through x disjoint from f0, for D.
    #[arg(long)]
    fprime: Option<String>,
    #[arg(long)]
    i: Option<usize>,
    #[arg(long)]
    l: Option<usize>,
    #[arg(long)]
    lp: Option<usize>,
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// For random: redraw until the family has a disjoint pair.
    #[arg(long)]
    non_intersecting: bool,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Check {
    All,
    Kkk,
    Eq55,
    Eq67,
    Eq8,
    Eq3,
    Split,
    Thm3,
    Regime,
}

#[derive(clap::Args)]
struct BoundsArgs {
    file: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "all")]
    check: Vec<Check>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// First element of the pair for split, thm3 and regime (default: most frequent).
    #[arg(long)]
    x: Option<usize>,
    /// Second element of the pair (default: next most frequent).
    #[arg(long)]
    y: Option<usize>,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    MaxDegree,
    Edges,
}

#[derive(clap::Args)]
struct SearchArgs {
    #[arg(long, value_enum)]
    objective: ObjectiveArg,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    /// Only explore families whose first member contains 1.
    #[arg(long)]
    symmetry: bool,
    /// Node budget (default from KNESERLAB_BUDGET_NODES, else 2e8).
    #[arg(long)]
    max_nodes: Option<u64>,
    #[arg(long)]
    max_seconds: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpreadMode {
    Polynomial,
    MonteCarlo,
}

#[derive(clap::Args)]
struct SpreadArgs {
    #[arg(long, value_enum)]
    mode: SpreadMode,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    /// Polynomial degree.
    #[arg(long, default_value_t = 1)]
    d: u32,
    /// Exponent of the target size k^c.
    #[arg(long, default_value_t = 1)]
    c: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 50)]
    retries: usize,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Lib(kneserlab::Error),
    Budget(String),
    Violation(String),
}

impl From<kneserlab::Error> for Failure {
    fn from(e: kneserlab::Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Lib(kneserlab::Error::Resource(_)) | Failure::Budget(_) => 3,
            Failure::Lib(_) => 2,
            Failure::Violation(_) => 4,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) | Failure::Budget(m) | Failure::Violation(m) => m.clone(),
            Failure::Lib(e) => e.to_string(),
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: Cli) -> Outcome {
    let exec = configure_jobs(cli.jobs)?;
    match cli.command {
        Command::Construct(args) => construct(args),
        Command::Measure { file } => measure(&file, exec),
        Command::Bounds(args) => bounds_cmd(args, cli.test_mode),
        Command::Search(args) => search_cmd(args, exec),
        Command::Spread(args) => spread(args),
        Command::Tightness { n, k, s } => {
            let report = bounds::tightness_dashboard(Params::new(n, k)?, s)?;
            print!("{}", report.render());
            let bad = [&report.form1, &report.form2].iter().any(|r| !r.holds());
            if cli.test_mode && bad {
                return Err(Failure::Violation("exact degree below a lower bound".into()));
            }
            Ok(())
        }
        Command::Spectral { n, k } => spectral(n, k, cli.test_mode),
    }
}

fn configure_jobs(jobs: Option<usize>) -> Result<Exec, Failure> {
    match jobs {
        Some(0) => Err(Failure::Usage("--jobs must be at least 1".into())),
        Some(1) => Ok(Exec::Sequential),
        #[cfg(feature = "parallel")]
        Some(j) => {
            rayon::ThreadPoolBuilder::new()
                .num_threads(j)
                .build_global()
                .map_err(|e| Failure::Usage(format!("thread pool: {e}")))?;
            Ok(Exec::Parallel)
        }
        #[cfg(not(feature = "parallel"))]
        Some(_) => Ok(Exec::Sequential),
        None => Ok(Exec::default()),
    }
}

fn parse_set(text: &str) -> Result<KSet, Failure> {
    let items = text
        .split(',')
        .map(|t| t.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::Usage(format!("bad set {text:?}: {e}")))?;
    Ok(KSet::from_elements(items)?)
}

fn need<T>(v: Option<T>, name: &str) -> Result<T, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("this family needs --{name}")))
}

fn emit(text: &str, out: Option<&PathBuf>) -> Outcome {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(path: &PathBuf) -> Result<Family, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    Ok(io::read_family(&text)?.0)
}

fn construct(a: ConstructArgs) -> Outcome {
    let p = Params::new(a.n, a.k)?;
    let default_f0 = || KSet::interval(2, a.k + 1);
    let f = match a.family {
        FamilyKind::Star => families::make_star(a.x, p)?,
        FamilyKind::StarPlus => {
            let t = match &a.t {
                Some(t) => parse_set(t)?,
                None => default_f0()?,
            };
            families::make_star_plus(a.x, t, p)?
        }
        FamilyKind::Hm => {
            let f0 = match &a.f0 {
                Some(t) => parse_set(t)?,
                None => default_f0()?,
            };
            families::make_hilton_milner(a.x, f0, p)?
        }
        FamilyKind::D => match (&a.f0, &a.fprime) {
            (Some(f0), Some(fp)) => families::make_d(a.x, parse_set(f0)?, parse_set(fp)?, p)?,
            (None, None) => families::make_d_canonical(p)?,
            _ => return Err(Failure::Usage("give both --f0 and --fprime, or neither".into())),
        },
        FamilyKind::E => families::make_e(need(a.i, "i")?, p)?,
        FamilyKind::W => families::make_w(need(a.l, "l")?, p)?,
        FamilyKind::Wprime => families::make_w_prime(need(a.l, "l")?, need(a.lp, "lp")?, p)?,
        FamilyKind::G => families::make_tightness_g(need(a.s, "s")?, p)?,
        FamilyKind::Lex => kneserlab::setkit::lex_family(need(a.m, "m")? as u128, p)?,
        FamilyKind::Random => families::make_random(need(a.m, "m")?, p, a.seed, a.non_intersecting)?,
    };
    emit(&io::write_family(&f, None), a.out.as_ref())
}

fn measure(path: &PathBuf, exec: Exec) -> Outcome {
    let f = load(path)?;
    let k = f.params().k();
    let d = if f.is_empty() { None } else { Some(kneser::max_degree_with(&f, exec)?.max) };
    let c = |i: usize| -> Result<Option<String>, Failure> {
        if f.is_empty() || i > k {
            return Ok(None);
        }
        Ok(Some(kneser::c_profile(&f, i)?.value.to_string()))
    };
    let out = json!({
        "n": f.params().n(),
        "k": k,
        "size": f.len(),
        "d": d,
        "e": kneser::edge_count_with(&f, exec),
        "tau": kneser::covering_number(&f).size,
        "c1": c(1)?,
        "c2": c(2)?,
        "intersecting": kneser::is_intersecting_with(&f, exec),
    });
    println!("{}", serde_json::to_string_pretty(&out).expect("json"));
    Ok(())
}

/// Elements ordered by how many members contain them, most first.
fn by_frequency(f: &Family) -> Vec<usize> {
    let counts = kneser::element_counts(f);
    let mut elems: Vec<usize> = (1..=f.params().n()).collect();
    elems.sort_by(|a, b| counts[*b].cmp(&counts[*a]).then(a.cmp(b)));
    elems
}

fn bounds_cmd(a: BoundsArgs, test_mode: bool) -> Outcome {
    let f = load(&a.file)?;
    let p = f.params();
    let all = a.check.contains(&Check::All);
    let wants = |c: Check| all || a.check.contains(&c);
    let order = by_frequency(&f);
    let x = a.x.unwrap_or(order[0]);
    let y = a.y.unwrap_or_else(|| order.iter().copied().find(|&e| e != x).unwrap_or(x));
    let mut reports: Vec<BoundReport> = Vec::new();
    // With `all`, checks whose preconditions fail are skipped; a check asked
    // for by name reports the failure.
    let mut take = |c: Check, r: kneserlab::Result<Vec<BoundReport>>| -> Outcome {
        match r {
            Ok(rs) => reports.extend(rs),
            Err(e) if all && !a.check.contains(&c) => eprintln!("skipped {}: {e}", check_name(c)),
            Err(e) => return Err(e.into()),
        }
        Ok(())
    };
    if wants(Check::Kkk) {
        take(Check::Kkk, bounds::kkk_balogh_check(&f).map(|r| vec![r]))?;
    }
    if wants(Check::Eq55) {
        take(Check::Eq55, bounds::eq55_check(&f).map(|r| vec![r]))?;
    }
    if wants(Check::Eq67) {
        let r = (1..p.k())
            .map(|i| bounds::eq67_check(&f, i).map(|(a, b)| [a, b]))
            .collect::<kneserlab::Result<Vec<_>>>()
            .map(|v| v.into_iter().flatten().collect());
        take(Check::Eq67, r)?;
    }
    if wants(Check::Eq8) {
        take(Check::Eq8, bounds::eq8_check(&f).map(|r| vec![r]))?;
    }
    if wants(Check::Eq3) {
        take(Check::Eq3, bounds::eq3_check(&f).map(|r| vec![r]))?;
    }
    if wants(Check::Split) {
        let r = bounds::SplitFamily::new(&f, x, y).and_then(|s| {
            let b = bounds::split_degree_bound(&s)?;
            let [a, c] = b.eq9;
            Ok(vec![bounds::mixing_check_split(&s), a, c, b.eq17])
        });
        take(Check::Split, r)?;
        take(Check::Split, bounds::eq667_check(p).map(|r| vec![r]))?;
    }
    if wants(Check::Thm3) {
        take(Check::Thm3, bounds::thm3_lower(&f, x, y).map(|(a, b)| vec![a, b]))?;
    }
    if wants(Check::Regime) {
        let r = match f.iter().find(|u| !u.contains(x)) {
            Some(&u) => bounds::regime_bounds_report(&f, x, u, a.y),
            None => Err(kneserlab::Error::Precondition(format!("every member contains {x}"))),
        };
        take(Check::Regime, r)?;
    }
    let text = match a.format {
        Format::Csv => io::reports_csv(&reports)?,
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&io::reports_json(&reports)).expect("json")),
    };
    emit(&text, a.out.as_ref())?;
    let violated: Vec<&str> = reports.iter().filter(|r| r.violated()).map(|r| r.name.as_str()).collect();
    if test_mode && !violated.is_empty() {
        return Err(Failure::Violation(format!("violated: {}", violated.join(", "))));
    }
    Ok(())
}

fn check_name(c: Check) -> &'static str {
    match c {
        Check::All => "all",
        Check::Kkk => "kkk",
        Check::Eq55 => "eq55",
        Check::Eq67 => "eq67",
        Check::Eq8 => "eq8",
        Check::Eq3 => "eq3",
        Check::Split => "split",
        Check::Thm3 => "thm3",
        Check::Regime => "regime",
    }
}

fn search_cmd(a: SearchArgs, exec: Exec) -> Outcome {
    let p = Params::new(a.n, a.k)?;
    let mut budget = Budget::from_env();
    if let Some(nodes) = a.max_nodes {
        budget.max_nodes = nodes;
    }
    budget.max_time = a.max_seconds.map(Duration::from_secs_f64);
    let opts = SearchOptions { symmetry: a.symmetry, exec };
    let r = match a.objective {
        ObjectiveArg::MaxDegree => search::min_max_degree(a.m, p, budget, opts)?,
        ObjectiveArg::Edges => search::min_edges(a.m, p, budget, opts)?,
    };
    println!("{}", serde_json::to_string_pretty(&io::search_result_json(&r)).expect("json"));
    if !r.proven_optimal {
        return Err(Failure::Budget(format!(
            "budget exhausted after {} nodes; result is the best found",
            r.nodes_explored
        )));
    }
    Ok(())
}

fn spread(a: SpreadArgs) -> Outcome {
    let p = Params::new(a.n, a.k)?;
    let s = match a.mode {
        SpreadMode::Polynomial => lowint::polynomial_spread(p, a.d, a.seed)?,
        SpreadMode::MonteCarlo => {
            let g = Family::new(p, kneserlab::setkit::enumerate_all(p)?)?;
            match lowint::sample_spread(&g, a.c, a.seed, a.retries)? {
                SpreadSample::Success(s) => s,
                SpreadSample::Exhausted { attempts, target_size, max_spread, .. } => {
                    for (i, t) in attempts.iter().enumerate() {
                        eprintln!("attempt {}: size {} spread {}", i + 1, t.size, t.spread);
                    }
                    return Err(Failure::Budget(format!(
                        "no draw with size >= {target_size} and spread <= {max_spread} in {} attempts",
                        attempts.len()
                    )));
                }
            }
        }
    };
    emit(&io::write_spread_family(&s), a.out.as_ref())
}

fn spectral(n: usize, k: usize, test_mode: bool) -> Outcome {
    let p = Params::new(n, k)?;
    let closed = bounds::kneser_lambda(p);
    let measured = bounds::second_abs_eigenvalue(p)?;
    let closed_f: f64 = closed.to_string().parse().expect("integer");
    let ok = (measured - closed_f).abs() < 1e-6 * closed_f.max(1.0);
    let out = json!({
        "n": n,
        "k": k,
        "lambda_closed_form": closed.to_string(),
        "lambda_spectrum": measured,
        "match": ok,
    });
    println!("{}", serde_json::to_string_pretty(&out).expect("json"));
    if test_mode && !ok {
        return Err(Failure::Violation("spectrum disagrees with the closed form".into()));
    }
    Ok(())
}
