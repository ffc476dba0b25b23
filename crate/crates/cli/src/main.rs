use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use frobsieve::cache::{self, CacheError, TraceCache};
use frobsieve::cyclotomic::{self, CongruenceCondition, CyclotomicError};
use frobsieve::field::{FieldError, FiniteField};
use frobsieve::formula::{self, FormulaError};
use frobsieve::groups::{self, GroupError, GroupFamily, GroupSpec};
use frobsieve::sieve::{self, rational_json, SieveConfig, SieveError};
use frobsieve::trace::{self, Embedding, TraceError, TraceTable, TraceValues};

#[derive(Parser, Debug)]
#[command(name = "frobsieve", version, about = "Trace functions, classical groups and Frobenius sieves")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write output here instead of stdout.
    #[arg(long, short = 'o', global = true)]
    out: Option<PathBuf>,
    /// Table cache directory (overrides $FROBSIEVE_CACHE_DIR).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Hyper-Kloosterman table as CSV.
    Kloosterman(KloostermanArgs),
    /// Group order, exponents and Gaussian sums as JSON.
    GaussSum(GaussArgs),
    /// Densities of a definable set over a prime range.
    FormulaDensity(FormulaArgs),
    /// Count primes l <= L with l = a (mod m).
    Primes(PrimesArgs),
    /// Degree-1 prime ideals of Z[zeta_d] of norm <= L.
    Ideals(IdealsArgs),
    /// Full sieve run from a JSON config.
    Sieve(SieveArgs),
}

#[derive(Args, Debug, Serialize)]
struct KloostermanArgs {
    #[arg(short)]
    p: u64,
    #[arg(short, default_value_t = 1)]
    e: u32,
    #[arg(short)]
    n: u32,
    /// Complex values under zeta -> e^{2 pi i k/d}.
    #[arg(long, conflicts_with = "residue")]
    complex: bool,
    #[arg(long, default_value_t = 1)]
    k: u64,
    /// Residues modulo the canonical ideal above this prime.
    #[arg(long)]
    residue: Option<u64>,
    #[arg(long)]
    normalized: bool,
}

#[derive(Args, Debug, Serialize)]
struct GaussArgs {
    #[arg(long)]
    family: GroupFamily,
    #[arg(short)]
    n: usize,
    #[arg(short = 'l', long = "ell")]
    ell: u64,
    #[arg(long, default_value_t = groups::DEFAULT_GROUP_CAP)]
    cap: u64,
    /// Also write the trace histogram as CSV.
    #[arg(long)]
    histogram_csv: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct FormulaArgs {
    formula: String,
    /// Inclusive range `a..b`.
    #[arg(long)]
    primes: String,
}

#[derive(Args, Debug, Serialize)]
struct PrimesArgs {
    #[arg(short)]
    a: u64,
    #[arg(short)]
    m: u64,
    #[arg(short = 'L')]
    bound: u64,
}

#[derive(Args, Debug, Serialize)]
struct IdealsArgs {
    #[arg(short)]
    d: u64,
    #[arg(short = 'L')]
    bound: u64,
    /// Congruence condition modulus m'.
    #[arg(long)]
    cond_modulus: Option<u64>,
    /// Allowed classes mod m', comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    cond_classes: Vec<u64>,
}

#[derive(Args, Debug)]
struct SieveArgs {
    /// JSON sieve config.
    config: PathBuf,
    /// Override the characteristic.
    #[arg(short)]
    p: Option<u64>,
    /// Override the extension degree.
    #[arg(short)]
    e: Option<u32>,
    /// Override the norm bound L on sieving ideals.
    #[arg(short = 'L', long)]
    bound: Option<u64>,
    #[arg(long, conflicts_with = "unnormalized")]
    normalized: bool,
    #[arg(long)]
    unnormalized: bool,
    /// Largest group order to enumerate exactly.
    #[arg(long)]
    group_cap: Option<u64>,
    /// Write the per-x survivor mask as CSV.
    #[arg(long)]
    mask_csv: Option<PathBuf>,
    /// Add wall-clock time to the report (breaks byte-identical output).
    #[arg(long)]
    timing: bool,
}

/// An error with its exit code: 2 validation, 3 resources, 4 internal.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn validation(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

fn field_code(e: &FieldError) -> u8 {
    match e {
        FieldError::FieldTooLarge(_) => 3,
        _ => 2,
    }
}

fn trace_code(e: &TraceError) -> u8 {
    match e {
        TraceError::FieldTooLarge(_) => 3,
        TraceError::TableMismatch(_) => 4,
        TraceError::Field(f) => field_code(f),
        _ => 2,
    }
}

fn group_code(e: &GroupError) -> u8 {
    match e {
        GroupError::GroupTooLarge(_) => 3,
        GroupError::InternalInvariant(_) => 4,
        _ => 2,
    }
}

fn formula_code(e: &FormulaError) -> u8 {
    match e {
        FormulaError::DepthExceeded { .. } | FormulaError::FieldTooLargeForDepth { .. } => 3,
        _ => 2,
    }
}

macro_rules! failure_from {
    ($t:ty, $code:expr) => {
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                #[allow(clippy::redundant_closure_call)]
                let code = ($code)(&e);
                Failure {
                    code,
                    message: e.to_string(),
                }
            }
        }
    };
}

failure_from!(FieldError, field_code);
failure_from!(TraceError, trace_code);
failure_from!(GroupError, group_code);
failure_from!(FormulaError, formula_code);
failure_from!(CyclotomicError, |_: &CyclotomicError| 2);
failure_from!(CacheError, |_: &CacheError| 3);
failure_from!(std::io::Error, |_: &std::io::Error| 3);
failure_from!(serde_json::Error, |_: &serde_json::Error| 2);
failure_from!(SieveError, |e: &SieveError| match e {
    SieveError::TableMismatch(_) => 4,
    SieveError::Trace(t) => trace_code(t),
    SieveError::Group(g) => group_code(g),
    SieveError::Formula(f) => formula_code(f),
    SieveError::Field(f) => field_code(f),
    _ => 2,
});

fn envelope(command: &str, config: Value, result: Value) -> Value {
    json!({
        "tool": "frobsieve",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": config,
        "result": result,
    })
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

/// 12 decimals, without a sign on values that round to zero.
fn fixed(v: f64) -> String {
    let s = format!("{v:.12}");
    match s.strip_prefix('-') {
        Some(rest) if rest.chars().all(|c| c == '0' || c == '.') => rest.to_string(),
        _ => s,
    }
}

fn table_csv(t: &TraceTable) -> String {
    let mut s = String::new();
    match &t.values {
        TraceValues::Residue(v) => {
            s.push_str("x_index,value\n");
            for (x, r) in t.domain_indices().iter().zip(v) {
                s.push_str(&format!("{x},{r}\n"));
            }
        }
        TraceValues::Complex(v) => {
            s.push_str("x_index,re,im\n");
            for (x, z) in t.domain_indices().iter().zip(v) {
                s.push_str(&format!("{x},{},{}\n", fixed(z.re), fixed(z.im)));
            }
        }
    }
    s
}

fn cache_for(cli: &Cli) -> Option<TraceCache> {
    cli.cache_dir.clone().map(TraceCache::new).or_else(TraceCache::from_env)
}

fn cmd_kloosterman(cli: &Cli, a: &KloostermanArgs) -> Result<String, Failure> {
    let field = FiniteField::new(a.p, a.e)?;
    let table = match a.residue {
        Some(ell) => {
            let emb = Embedding::residue(a.p, ell)?;
            let ideal = emb.ideal().unwrap().clone();
            cache::kloosterman_table_cached(a.n, &field, &ideal, cache_for(cli).as_ref())?
        }
        None if a.complex => trace::kloosterman_table(a.n, &field, &Embedding::Complex { k: a.k })?,
        None => return Err(Failure::validation("choose --complex or --residue ELL")),
    };
    let table = if a.normalized { trace::normalize(&table)? } else { table };
    Ok(table_csv(&table))
}

fn cmd_gauss_sum(a: &GaussArgs) -> Result<String, Failure> {
    let spec = GroupSpec::new(a.family, a.n, a.ell)?.with_cap(a.cap);
    let hist = groups::trace_histogram(&spec)?;
    let meta = groups::metadata(&spec)?;
    let (max, c) = groups::gauss_sum_max(&hist);
    let alpha = groups::alpha_exponent(a.family, a.n)?;
    let alpha_f = *alpha.numer() as f64 / *alpha.denom() as f64;
    if let Some(path) = &a.histogram_csv {
        fs::write(path, hist.to_csv())?;
    }
    let mut result = serde_json::to_value(meta)?;
    result["gauss_sum_max"] = json!(max);
    result["attaining_c"] = json!(c);
    result["scaled_by_ell_alpha"] = json!(max * (a.ell as f64).powf(alpha_f));
    result["histogram"] = json!(hist.counts);
    Ok(pretty(&envelope("gauss-sum", serde_json::to_value(a)?, result)))
}

fn parse_range(s: &str) -> Result<(u64, u64), Failure> {
    let bad = || Failure::validation(format!("bad prime range '{s}', expected a..b"));
    let (lo, hi) = s.split_once("..").ok_or_else(bad)?;
    let lo = lo.trim().parse().map_err(|_| bad())?;
    let hi = hi.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
    Ok((lo, hi))
}

fn cmd_formula_density(a: &FormulaArgs) -> Result<String, Failure> {
    let phi = formula::parse_formula(&a.formula)?;
    let (lo, hi) = parse_range(&a.primes)?;
    let primes: Vec<u64> = frobsieve::arith::primes_up_to(hi).into_iter().filter(|&l| l >= lo).collect();
    let report = formula::cdm_scan(&phi, &primes)?;
    let rows: Vec<Value> = report
        .rows
        .iter()
        .map(|r| json!({"ell": r.ell, "count": r.count, "density": rational_json(&r.density), "density_f64": r.density_f64}))
        .collect();
    let result = json!({
        "formula": phi.to_string(),
        "rows": rows,
        "clusters": report.clusters,
        "max_scaled_deviation": report.max_scaled_deviation,
    });
    Ok(pretty(&envelope("formula-density", serde_json::to_value(a)?, result)))
}

fn cmd_primes(a: &PrimesArgs) -> Result<String, Failure> {
    let count = cyclotomic::prime_count(a.a, a.m, a.bound)?;
    let primes: Vec<u64> = frobsieve::arith::primes_up_to(a.bound)
        .into_iter()
        .filter(|&l| l % a.m == a.a % a.m)
        .collect();
    let result = json!({"count": count, "primes": primes});
    Ok(pretty(&envelope("primes", serde_json::to_value(a)?, result)))
}

fn cmd_ideals(a: &IdealsArgs) -> Result<String, Failure> {
    let cond = a.cond_modulus.map(|m| CongruenceCondition::new(m, a.cond_classes.clone()));
    let ideals = cyclotomic::deg1_prime_ideals(a.d, a.bound, cond.as_ref())?;
    let result = json!({
        "ideals": ideals,
        "lambda_cardinality": cyclotomic::lambda_cardinality(&ideals),
    });
    Ok(pretty(&envelope("ideals", serde_json::to_value(a)?, result)))
}

fn cmd_sieve(cli: &Cli, a: &SieveArgs) -> Result<String, Failure> {
    let text = fs::read_to_string(&a.config)
        .map_err(|e| Failure::validation(format!("cannot read {}: {e}", a.config.display())))?;
    let mut cfg: SieveConfig = serde_json::from_str(&text)?;
    if let Some(p) = a.p {
        cfg.p = p;
    }
    if let Some(e) = a.e {
        cfg.e = e;
    }
    if a.bound.is_some() {
        cfg.bound = a.bound;
    }
    if a.normalized {
        cfg.normalized = true;
    }
    if a.unnormalized {
        cfg.normalized = false;
    }
    if let Some(cap) = a.group_cap {
        cfg.group_cap = cap;
    }
    let start = Instant::now();
    let (mut report, counts) = sieve::density_report(&cfg, cache_for(cli).as_ref())?;
    if a.timing {
        report.runtime_ms = Some(start.elapsed().as_millis() as u64);
    }
    if let Some(path) = &a.mask_csv {
        fs::write(path, sieve::survivor_mask_csv(&counts))?;
    }
    let config = serde_json::to_value(&cfg)?;
    Ok(pretty(&envelope("sieve", config, serde_json::to_value(report)?)))
}

fn run(cli: &Cli) -> Result<String, Failure> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::validation(e.to_string()))?;
    }
    match &cli.command {
        Command::Kloosterman(a) => cmd_kloosterman(cli, a),
        Command::GaussSum(a) => cmd_gauss_sum(a),
        Command::FormulaDensity(a) => cmd_formula_density(a),
        Command::Primes(a) => cmd_primes(a),
        Command::Ideals(a) => cmd_ideals(a),
        Command::Sieve(a) => cmd_sieve(cli, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|text| match &cli.out {
        Some(path) => fs::write(path, text).map_err(Failure::from),
        None => {
            print!("{text}");
            Ok(())
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
