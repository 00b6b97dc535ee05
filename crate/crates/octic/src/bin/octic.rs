//! Command-line driver for the octic search engine.
//!
//! Subcommands:
//!
//! * `tables`    — build and cache the aggregate count tables;
//! * `count`     — point counts of one surface over the 25 prime fields;
//! * `search`    — enumerate a coefficient range and match newforms;
//! * `transform` — apply a correspondence to a coefficient vector;
//! * `estimate`  — exact chance-match statistics;
//! * `etaform`   — expand an eta product into a newform table file.
//!
//! Exit codes: 0 success, 1 bad usage (flag syntax or values), 2 bad or
//! missing input data (tables, form files, checkpoints), 3 I/O failure.
//! All stdout output is deterministic given the flags and input files;
//! timing goes to stderr. `--threads` never changes any output byte.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use num_bigint::BigUint;

use octic::count::{count_points_naive, AggregateTable, Scheme, TableSet};
use octic::field::PRIMES;
use octic::newform::{default_twists, eta_product_record, load_table, save_table, EtaProductSpec};
use octic::search::{parse_letters, run_search, SearchOptions, SearchRange, PRESET_NAMES};
use octic::transform::{self, Substituted};
use octic::{stats, Error, Letter, Octic, Result};

#[derive(Parser)]
#[command(
    name = "octic",
    version,
    about = "Point counts of octic double solids and searches for newform matches"
)]
struct Cli {
    /// Suppress progress and timing output on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build (or verify) the cached aggregate count tables.
    Tables(TablesArgs),
    /// Count points of one surface over the supported prime fields.
    Count(CountArgs),
    /// Enumerate a coefficient range and match counts against newforms.
    Search(Box<SearchArgs>),
    /// Apply a correspondence transform to a coefficient vector.
    Transform(TransformArgs),
    /// Print the exact chance-match statistics.
    Estimate(EstimateArgs),
    /// Expand an eta product into a one-record newform table file.
    Etaform(EtaformArgs),
}

#[derive(clap::Args)]
struct TablesArgs {
    /// Directory for the cached tables.
    #[arg(long, env = "OCTIC_CACHE_DIR", default_value = "octic-tables")]
    cache_dir: PathBuf,
    /// Build only this scheme (default: all three).
    #[arg(long, value_parser = parse_scheme)]
    scheme: Option<Scheme>,
    /// Worker threads for table building.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(clap::Args)]
struct CountArgs {
    /// Coefficient vector, e.g. `b=1,r=-2`.
    #[arg(long)]
    coeffs: String,
    /// Count over this prime only (default: all 25).
    #[arg(long)]
    prime: Option<u32>,
    /// Count by full enumeration instead of the aggregate tables.
    #[arg(long)]
    naive: bool,
    /// Aggregation scheme for the fast path.
    #[arg(long, default_value = "key-mod-squares", value_parser = parse_scheme)]
    scheme: Scheme,
    /// Directory with cached tables (used when present; otherwise the
    /// needed tables are built in memory).
    #[arg(long, env = "OCTIC_CACHE_DIR", default_value = "octic-tables")]
    cache_dir: PathBuf,
}

#[derive(clap::Args)]
struct SearchArgs {
    /// Start from a named range preset.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(PRESET_NAMES))]
    preset: Option<String>,
    /// Letter subset, e.g. `BRUCH` (default: all 15 letters).
    #[arg(long)]
    letters: Option<String>,
    /// Minimum support size Φ.
    #[arg(long)]
    phi_min: Option<u32>,
    /// Maximum support size Φ.
    #[arg(long)]
    phi_max: Option<u32>,
    /// Minimum coefficient 1-norm Ψ.
    #[arg(long)]
    psi_min: Option<u64>,
    /// Maximum coefficient 1-norm Ψ (required unless --preset is given).
    #[arg(long)]
    psi_max: Option<u64>,
    /// Agreement threshold (primes out of 25).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=25))]
    threshold: Option<u32>,
    /// Comma-separated twist set, e.g. `1,-1,-4` (default: fundamental
    /// discriminants up to 24 plus ±1).
    #[arg(long, allow_hyphen_values = true)]
    twists: Option<String>,
    /// Newform coefficient table to match against.
    #[arg(long)]
    forms: PathBuf,
    /// Results file to write.
    #[arg(long)]
    out: PathBuf,
    /// Checkpoint file; if it exists, the search resumes behind it.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Directory with cached tables (build them first with `tables`).
    #[arg(long, env = "OCTIC_CACHE_DIR", default_value = "octic-tables")]
    cache_dir: PathBuf,
    /// Aggregation scheme to count with.
    #[arg(long, default_value = "key-mod-squares", value_parser = parse_scheme)]
    scheme: Scheme,
    /// Worker threads (never affects output bytes).
    #[arg(long)]
    threads: Option<usize>,
    /// Candidates per work chunk (checkpoint granularity).
    #[arg(long)]
    chunk_size: Option<usize>,
    /// Evaluate every prime for every form even after a form is out of
    /// reach (slower; the hit set is identical).
    #[arg(long)]
    no_early_abort: bool,
    /// Stop after this many chunks (for testing interrupted runs).
    #[arg(long)]
    stop_after_chunks: Option<u64>,
}

#[derive(clap::Args)]
struct TransformArgs {
    /// One of: invert, segre, signchange, coordchange, subst.
    #[arg(long)]
    op: String,
    /// Coefficient vector, e.g. `c=1`.
    #[arg(long)]
    coeffs: String,
    /// Scaling parameter for `coordchange` (any λ except 0 and −4).
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<i64>,
    /// 4×4 integer matrix for `subst`, rows separated by `;`,
    /// e.g. `1,1,0,0;1,-1,0,0;0,0,1,1;0,0,1,-1`.
    #[arg(long, allow_hyphen_values = true)]
    matrix: Option<String>,
}

#[derive(clap::Args)]
struct EstimateArgs {
    /// Number of surfaces tried (plain decimal or scientific, e.g. 4e11).
    #[arg(long)]
    octics: String,
    /// Number of newforms compared against.
    #[arg(long)]
    forms: String,
}

#[derive(clap::Args)]
struct EtaformArgs {
    /// Eta product as `m:e` pairs, e.g. `1:2,2:2,3:2,6:2`.
    #[arg(long)]
    spec: String,
    /// Newform table file to write.
    #[arg(long)]
    out: PathBuf,
}

fn parse_scheme(s: &str) -> std::result::Result<Scheme, String> {
    Scheme::from_str(s).map_err(|e| e.to_string())
}

fn default_threads() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

/// Maps library errors onto the documented exit codes: bad argument
/// values are usage errors, bad input files are data errors.
fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io { .. } => 3,
        Error::BadTableLine { .. }
        | Error::BadNewform(_)
        | Error::BadCache { .. }
        | Error::BadCheckpoint { .. }
        | Error::Overflow(_) => 2,
        _ => 1,
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let quiet = cli.quiet;
    let result = match cli.cmd {
        Cmd::Tables(a) => cmd_tables(a, quiet),
        Cmd::Count(a) => cmd_count(a),
        Cmd::Search(a) => cmd_search(*a, quiet),
        Cmd::Transform(a) => cmd_transform(a),
        Cmd::Estimate(a) => cmd_estimate(a),
        Cmd::Etaform(a) => cmd_etaform(a, quiet),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(exit_code(&e));
    }
}

fn cmd_tables(a: TablesArgs, quiet: bool) -> Result<()> {
    std::fs::create_dir_all(&a.cache_dir)
        .map_err(|e| Error::io(format!("creating cache dir {}", a.cache_dir.display()), e))?;
    let threads = a.threads.unwrap_or_else(default_threads).max(1);
    let schemes: Vec<Scheme> = match a.scheme {
        Some(s) => vec![s],
        None => Scheme::ALL.to_vec(),
    };
    let mut total = 0u64;
    for (i, &scheme) in schemes.iter().enumerate() {
        let cached = TableSet::cache_complete(&a.cache_dir, scheme);
        if !quiet && !cached {
            eprintln!("building {} tables ...", scheme.as_str());
        }
        let set = TableSet::load_or_build(&a.cache_dir, scheme, threads)?;
        if i == 0 {
            total = (0..25).map(|k| set.table(k).points_covered()).sum();
            println!("total points over the 25 prime fields: {total}");
        }
        let classes = set.total_classes();
        // Per-mille by integer arithmetic, printed as a percentage with
        // one decimal: no floats, no locale.
        let pm = classes * 1000 / total;
        println!(
            "scheme {}: {classes} aggregate classes ({}.{}% of {total})",
            scheme.as_str(),
            pm / 10,
            pm % 10
        );
    }
    Ok(())
}

fn cmd_count(a: CountArgs) -> Result<()> {
    let v: Octic = a.coeffs.parse()?;
    if v.is_zero() {
        return Err(Error::DegenerateOctic);
    }
    let primes: Vec<u32> = match a.prime {
        Some(p) => {
            if !PRIMES.contains(&p) {
                return Err(Error::UnsupportedPrime(p));
            }
            vec![p]
        }
        None => PRIMES.to_vec(),
    };
    let print_line = |p: u32, c: u64| {
        let r = (1 - c as i64).rem_euclid(p as i64);
        println!("p={p} count={c} residue={r}");
    };
    if a.naive {
        for p in primes {
            print_line(p, count_points_naive(&v, p, false)?);
        }
    } else if TableSet::cache_complete(&a.cache_dir, a.scheme) {
        let set = TableSet::load_dir(&a.cache_dir, a.scheme)?;
        for p in primes {
            print_line(p, set.count_at(&v, p)?);
        }
    } else {
        for p in primes {
            let table = AggregateTable::build(p, a.scheme)?;
            print_line(p, table.count(&v));
        }
    }
    Ok(())
}

fn parse_twists(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(|d| {
            d.trim()
                .parse()
                .map_err(|_| Error::BadRange(format!("bad twist {d:?}")))
        })
        .collect()
}

fn cmd_search(a: SearchArgs, quiet: bool) -> Result<()> {
    // Resolve the range: preset first, explicit flags override.
    let base = match &a.preset {
        Some(name) => Some(SearchRange::preset(name)?),
        None => None,
    };
    let letters = match (&a.letters, &base) {
        (Some(s), _) => parse_letters(s)?,
        (None, Some(b)) => b.letters().to_vec(),
        (None, None) => Letter::ALL.to_vec(),
    };
    let (dphi, dpsi, dthr, dtw) = match &base {
        Some(b) => (b.phi(), b.psi(), b.threshold(), b.twists().to_vec()),
        None => (
            (1, letters.len() as u32),
            (1, 0),
            21,
            default_twists(),
        ),
    };
    let psi_max = match (a.psi_max, &base) {
        (Some(x), _) => x,
        (None, Some(_)) => dpsi.1,
        (None, None) => {
            return Err(Error::BadRange(
                "--psi-max is required unless --preset is given".into(),
            ))
        }
    };
    let range = SearchRange::new(
        &letters,
        (a.phi_min.unwrap_or(dphi.0), a.phi_max.unwrap_or(dphi.1)),
        (a.psi_min.unwrap_or(dpsi.0), psi_max),
        a.threshold.unwrap_or(dthr),
        match &a.twists {
            Some(s) => parse_twists(s)?,
            None => dtw,
        },
    )?;

    let forms = load_table(&a.forms)?;
    if !TableSet::cache_complete(&a.cache_dir, a.scheme) {
        return Err(Error::BadCache {
            path: a.cache_dir.display().to_string(),
            reason: format!(
                "no cached count tables for scheme {}; run `octic tables` first",
                a.scheme.as_str()
            ),
        });
    }
    let tables = TableSet::load_dir(&a.cache_dir, a.scheme)?;
    let opts = SearchOptions {
        threads: a.threads.unwrap_or_else(default_threads).max(1),
        chunk_size: a.chunk_size.unwrap_or(1 << 16),
        early_abort: !a.no_early_abort,
        stop_after_chunks: a.stop_after_chunks,
    };
    if !quiet {
        eprintln!(
            "searching {} candidates against {} forms × {} twists",
            range.cardinality(),
            forms.len(),
            range.twists().len()
        );
    }
    let sum = run_search(
        &range,
        &tables,
        &forms,
        &a.out,
        a.checkpoint.as_deref(),
        &opts,
    )?;
    println!("range: {}", range.descriptor());
    println!("candidates: {}", sum.candidates);
    println!("hits: {}", sum.hits);
    println!("complete: {}", sum.complete);
    if !quiet {
        let secs = sum.elapsed.as_secs_f64();
        let rate = if secs > 0.0 {
            sum.new_candidates as f64 / secs
        } else {
            0.0
        };
        eprintln!(
            "this run: {} candidates in {:.2}s ({:.0}/s){}",
            sum.new_candidates,
            secs,
            rate,
            if sum.resumed { ", resumed" } else { "" }
        );
    }
    Ok(())
}

fn parse_matrix(s: &str) -> Result<[[i64; 4]; 4]> {
    let bad = || {
        Error::BadRange(format!(
            "bad matrix {s:?}: expected 4 rows of 4 integers, rows separated by ';'"
        ))
    };
    let mut m = [[0i64; 4]; 4];
    let rows: Vec<&str> = s.split(';').collect();
    if rows.len() != 4 {
        return Err(bad());
    }
    for (i, row) in rows.iter().enumerate() {
        let entries: Vec<&str> = row.split(',').collect();
        if entries.len() != 4 {
            return Err(bad());
        }
        for (j, e) in entries.iter().enumerate() {
            m[i][j] = e.trim().parse().map_err(|_| bad())?;
        }
    }
    Ok(m)
}

fn cmd_transform(a: TransformArgs) -> Result<()> {
    let v: Octic = a.coeffs.parse()?;
    let w = match a.op.as_str() {
        "invert" => transform::inversion(&v)?,
        "segre" => transform::segre(&v)?,
        "signchange" => transform::sign_change(&v)?,
        "coordchange" => {
            let lambda = a.lambda.ok_or_else(|| {
                Error::BadRange("--lambda is required for op coordchange".into())
            })?;
            transform::coordinate_change(&v, lambda)?
        }
        "subst" => {
            let m = parse_matrix(a.matrix.as_deref().ok_or_else(|| {
                Error::BadRange("--matrix is required for op subst".into())
            })?)?;
            match transform::linear_substitution(&v, &m)? {
                Substituted::Symmetric(w) => w,
                Substituted::NotSymmetric => {
                    return Err(Error::Precondition(
                        "the substituted polynomial is not invariant under \
                         coordinate permutations, so it has no coefficient vector"
                            .into(),
                    ))
                }
            }
        }
        other => {
            return Err(Error::BadRange(format!(
                "unknown transform op {other:?}; known ops: invert, segre, \
                 signchange, coordchange, subst"
            )))
        }
    };
    println!("{w}");
    Ok(())
}

/// Parses a nonnegative integer in plain decimal or scientific notation
/// (`4e11`, `2.5e3`); the value must be integral.
fn parse_big(s: &str) -> Result<BigUint> {
    let bad = || {
        Error::BadRange(format!(
            "cannot parse {s:?} as a nonnegative integer (plain decimal or scientific, e.g. 4e11)"
        ))
    };
    let t = s.trim();
    let Some((mantissa, exp)) = t.split_once(['e', 'E']) else {
        return BigUint::from_str(t).map_err(|_| bad());
    };
    let exp: u32 = exp.parse().map_err(|_| bad())?;
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    let all_digits = |p: &str| p.chars().all(|c| c.is_ascii_digit());
    if !all_digits(int) || !all_digits(frac) {
        return Err(bad());
    }
    let frac_len = frac.len() as u32;
    if exp < frac_len {
        return Err(bad()); // e.g. 4.51e1 is not an integer
    }
    let digits: BigUint = format!("{int}{frac}").parse().map_err(|_| bad())?;
    Ok(digits * BigUint::from(10u32).pow(exp - frac_len))
}

fn cmd_estimate(a: EstimateArgs) -> Result<()> {
    let octics = parse_big(&a.octics)?;
    let forms = parse_big(&a.forms)?;
    let chance = stats::chance_possibilities();
    let sample = stats::sample_space_size();
    println!("residue tuples within 4 misses of a target (1+e1+e2+e3+e4): {chance}");
    println!("residue sample space (product of the 25 primes): {sample}");
    println!("octics: {octics}");
    println!("newforms: {forms}");
    let rate = stats::expected_false_positives(&octics, &forms);
    println!(
        "expected chance matches: {}/{} = {}",
        rate.numer(),
        rate.denom(),
        stats::scientific(&rate, 4)
    );
    Ok(())
}

fn cmd_etaform(a: EtaformArgs, quiet: bool) -> Result<()> {
    let spec = EtaProductSpec::parse(&a.spec)?;
    let record = eta_product_record(&spec)?;
    save_table(&a.out, std::slice::from_ref(&record))?;
    let mut line = record.label.clone();
    for c in record.ap {
        line.push(' ');
        line.push_str(&c.to_string());
    }
    println!("{line}");
    if !quiet {
        eprintln!("wrote 1 record to {}", a.out.display());
    }
    Ok(())
}
