mod cache;
mod catalog;
mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use crystalk_core::lattice::{self, InvolutiveLattice};
use crystalk_core::oracle::{self, DEFAULT_GRID_DENOMINATOR, EXTERIOR_MAX_N, GRID_SWEEP_MAX_N};
use crystalk_core::repring::ModuleTables;
use crystalk_core::toruskt::{self, KRankReport, Report, SCHEMA_VERSION};
use crystalk_core::ScopeFlag;
use serde::de::DeserializeOwned;
use serde::Serialize;

use cache::{Cache, CacheKey};
use output::{ClassifyOutput, RanksOutput, Route, RouteResult, SkippedRoute};

#[derive(Debug)]
pub enum CliError {
    Input(String),
    NotInvolution(String),
    Invariant(String),
    Scope(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::NotInvolution(_) => 3,
            CliError::Invariant(_) => 4,
            CliError::Scope(_) => 5,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::NotInvolution(m) | CliError::Invariant(m) | CliError::Scope(m) => m,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum RouteArg {
    Delocalized,
    Kunneth,
    Both,
}

/// Equivariant K-theory of Z/2 acting on the n-torus, and K-theory of the
/// group C*-algebra of Zⁿ ⋊ Z/2.
#[derive(Parser, Debug)]
#[command(name = "crystalk", version)]
struct Cli {
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: Format,
    /// Append-only JSON-lines results cache.
    #[arg(long, global = true, value_name = "PATH")]
    cache: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct InputArgs {
    /// JSON file {"n": .., "matrix": [[..]]}; stdin if omitted or "-".
    file: Option<PathBuf>,
    /// Use a catalog entry instead of a file.
    #[arg(long, conflicts_with = "file")]
    entry: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Invariants, class, fixed set and block decomposition.
    Classify(InputArgs),
    /// Ranks of the equivariant K-theory of the torus.
    Ranks {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value = "both")]
        route: RouteArg,
    },
    /// K-theory of the reduced group C*-algebra.
    Cstar(InputArgs),
    /// Run the oracle suite on a generated corpus.
    Verify {
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Conjugates per invariant class.
        #[arg(long, default_value_t = 3)]
        count: usize,
        #[arg(long, default_value_t = DEFAULT_GRID_DENOMINATOR)]
        grid_denominator: u64,
        /// Also write the corpus as JSON.
        #[arg(long, value_name = "PATH")]
        save_corpus: Option<PathBuf>,
    },
    /// Built-in example lattices.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand, Debug)]
enum CatalogAction {
    List,
    Show { name: String },
    /// Recompute every entry and compare with its stored values.
    Check,
}

fn emit<T: Serialize>(format: Format, value: &T, text: impl FnOnce(&T) -> String) {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(value).expect("output serializes")),
        Format::Text => print!("{}", text(value)),
    }
}

/// Runs `compute` unless the cache already holds a result for `key`.
fn cached<T: Serialize + DeserializeOwned>(
    cache: Option<&Cache>,
    key: impl FnOnce() -> CacheKey,
    compute: impl FnOnce() -> Result<T, CliError>,
) -> Result<T, CliError> {
    let Some(cache) = cache else { return compute() };
    let key = key();
    if let Some(v) = cache.lookup(&key)? {
        if let Ok(t) = serde_json::from_value(v) {
            return Ok(t);
        }
    }
    let t = compute()?;
    cache.append(key, serde_json::to_value(&t).expect("output serializes"))?;
    Ok(t)
}

fn classify(l: &InvolutiveLattice) -> ClassifyOutput {
    let inv = lattice::invariants(l);
    let dec = lattice::decompose(l);
    ClassifyOutput {
        spec_version: SCHEMA_VERSION.to_string(),
        input: toruskt::InputMatrix { n: l.rank(), matrix: l.matrix().clone() },
        invariants: inv,
        class: lattice::classify(l),
        fixed_set: toruskt::fixed_set(l),
        blocks: dec.blocks,
        basis: dec.basis,
    }
}

fn delocalized_route(l: &InvolutiveLattice) -> Report {
    let mut d = toruskt::k_ranks_delocalized(l);
    if d.scope_flag == ScopeFlag::RationalOnly {
        d.caveat = toruskt::integral_k_theory(l).caveat;
    }
    Report::from_k_theory(l, &d)
}

/// The fixed-point rank formula fed with cohomology from explicit exterior powers.
fn exterior_route(l: &InvolutiveLattice) -> Result<Report, String> {
    let coh = oracle::exterior_action_invariants(l.matrix()).map_err(|e| e.to_string())?;
    let (f0, f1) = toruskt::fixed_set(l).k_ranks();
    let reference = toruskt::k_ranks_delocalized(l);
    let k = KRankReport {
        k0: coh.even_inv + f0,
        k1: coh.odd_inv + f1,
        caveat: toruskt::integral_k_theory(l).caveat,
        ..reference
    };
    Ok(Report::from_k_theory(l, &k))
}

fn ranks(l: &InvolutiveLattice, route: RouteArg) -> Result<RanksOutput, CliError> {
    let kunneth = || toruskt::kunneth_assembly(l).map(|k| Report::from_k_theory(l, &k));
    let out = match route {
        RouteArg::Delocalized => {
            RanksOutput::new(vec![RouteResult { route: Route::Delocalized, report: delocalized_route(l) }], vec![])
        }
        RouteArg::Kunneth => {
            let report = kunneth().map_err(|e| CliError::Scope(e.to_string()))?;
            RanksOutput::new(vec![RouteResult { route: Route::Kunneth, report }], vec![])
        }
        RouteArg::Both => {
            let mut routes = vec![RouteResult { route: Route::Delocalized, report: delocalized_route(l) }];
            let mut skipped = vec![];
            match kunneth() {
                Ok(report) => routes.push(RouteResult { route: Route::Kunneth, report }),
                Err(e) => {
                    skipped.push(SkippedRoute { route: Route::Kunneth, reason: e.to_string() });
                    match exterior_route(l) {
                        Ok(report) => routes.push(RouteResult { route: Route::ExteriorOracle, report }),
                        Err(reason) => skipped.push(SkippedRoute { route: Route::ExteriorOracle, reason }),
                    }
                }
            }
            RanksOutput::new(routes, skipped)
        }
    };
    Ok(out)
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Err(e) = ModuleTables::global() {
        return Err(CliError::Input(e.to_string()));
    }
    let cache = cli.cache.as_deref().map(Cache::new);
    let cache = cache.as_ref();
    let key = |command: &str, l: &InvolutiveLattice| CacheKey::new(command, l.matrix(), lattice::invariants(l));

    match cli.command {
        Command::Classify(args) => {
            let l = input::load(args.file.as_deref(), args.entry.as_deref())?;
            let out = cached(cache, || key("classify", &l), || Ok(classify(&l)))?;
            emit(cli.format, &out, output::classify_text);
        }
        Command::Ranks { input: args, route } => {
            let l = input::load(args.file.as_deref(), args.entry.as_deref())?;
            let name = format!("ranks --route {}", route.to_possible_value().unwrap().get_name());
            let out = cached(cache, || key(&name, &l), || ranks(&l, route))?;
            emit(cli.format, &out, output::ranks_text);
            if !out.agree {
                return Err(CliError::Invariant("rank routes disagree".into()));
            }
        }
        Command::Cstar(args) => {
            let l = input::load(args.file.as_deref(), args.entry.as_deref())?;
            let out = cached(cache, || key("cstar", &l), || Ok(Report::group_cstar(&l)))?;
            emit(cli.format, &out, output::report_text);
        }
        Command::Verify { n, seed, count, grid_denominator, save_corpus } => {
            if n == 0 || count == 0 {
                return Err(CliError::Input("verify needs n >= 1 and count >= 1".into()));
            }
            if n > EXTERIOR_MAX_N {
                return Err(CliError::Input(format!(
                    "n = {n} is outside the oracle bounds: the grid oracle runs for n <= {GRID_SWEEP_MAX_N} and the \
                     exterior oracle for n <= {EXTERIOR_MAX_N}; both skipped"
                )));
            }
            let corpus = oracle::involution_corpus(n, seed, count);
            if let Some(path) = save_corpus {
                let text = serde_json::to_string_pretty(&corpus).expect("corpus serializes");
                std::fs::write(&path, text + "\n")
                    .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
            }
            let summary = oracle::verify_corpus(&corpus, grid_denominator);
            emit(cli.format, &summary, output::verify_text);
            if !summary.all_pass() {
                return Err(CliError::Invariant("oracle mismatch".into()));
            }
        }
        Command::Catalog { action } => match action {
            CatalogAction::List => emit(cli.format, &catalog::entries(), |e| output::catalog_list_text(e)),
            CatalogAction::Show { name } => emit(cli.format, catalog::find(&name)?, output::catalog_show_text),
            CatalogAction::Check => {
                let lines = catalog::check();
                emit(cli.format, &lines, |l| output::catalog_check_text(l));
                if lines.iter().any(|l| !l.ok) {
                    return Err(CliError::Invariant("catalog entry does not recompute to its stored values".into()));
                }
            }
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
