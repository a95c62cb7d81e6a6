//! Operator-facing commands over the ternary-form library: single-shot
//! local queries, progression verification, long-running candidate sweeps
//! with resumable checkpoints, and CSV export of the scan datasets.
//!
//! Exit codes: 0 success or verified; 1 mathematically negative outcome
//! (gaps found by `verify`); 2 usage errors; 3 `gaps` on a form without a
//! unique anisotropic prime; 4 runtime failures.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use tqf_core::arith::is_prime;
use tqf_core::gaps::{
    self, alpha_survey, format_significant, gap_report, scan_family, Family,
};
use tqf_core::local::{anisotropic_places, companion_form};
use tqf_core::search::{search_range, SearchConfig, DEFAULT_SWEEP_BOUND};
use tqf_core::sieve::{sieve_progression, BlockPlan, DEFAULT_MEMORY_BUDGET};
use tqf_core::Form;

/// Memory budget override, in bytes.
const MEMORY_BUDGET_ENV: &str = "TQF_MEMORY_BUDGET";

#[derive(Parser)]
#[command(
    name = "tqf",
    version,
    about = "Local analysis, representation sieves and candidate searches for diagonal ternary quadratic forms",
    after_help = "Alpha ratios are gap counts divided by p ln p (natural logarithm).\n\
                  Set TQF_MEMORY_BUDGET (bytes) to override the 1 GiB sieve budget."
)]
struct Cli {
    /// Worker threads (default: all available cores). Output bytes never
    /// depend on this, only wall time does.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the form <1,q,p> anisotropic exactly at the given prime
    Companion { p: u64 },
    /// Gap set of a form anisotropic at exactly one prime (auto-detected)
    Gaps {
        a: u64,
        b: u64,
        c: u64,
        /// Inclusive sieve bound
        #[arg(long)]
        bound: u64,
        /// Write the gap list as CSV (columns n,l) to this path
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Sweep primes in [pmin, pmax] for candidate (p,l)-universal forms
    Search {
        #[arg(long)]
        pmin: u64,
        #[arg(long)]
        pmax: u64,
        /// Certification bound per (p,l) pair
        #[arg(long, default_value_t = DEFAULT_SWEEP_BOUND)]
        bound: u64,
        /// Append one JSON record per finished pair; resumes after a kill
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// List the elements of S_{k,l} up to a bound that a form misses
    Verify {
        a: u64,
        b: u64,
        c: u64,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        l: u64,
        #[arg(long)]
        bound: u64,
    },
    /// Per-class gap histogram for a form family over a prime range
    Scan {
        /// One of: 1,1,p  1,2,p  1,3,p
        #[arg(long)]
        family: String,
        #[arg(long)]
        pmin: u64,
        #[arg(long)]
        pmax: u64,
        /// Gap bound per prime is multiplier * p
        #[arg(long, default_value_t = 120_000)]
        multiplier: u64,
        /// Write rows as CSV to this path (default: stdout)
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Alpha ratios of all small-discriminant forms with one anisotropic prime
    Alpha {
        #[arg(long)]
        pmax: u64,
        /// Survey forms with discriminant below disc-mult * p
        #[arg(long = "disc-mult", default_value_t = 30)]
        disc_mult: u64,
        /// Gap bound per form is gap-mult * p
        #[arg(long = "gap-mult", default_value_t = 120_000)]
        gap_mult: u64,
        /// Write rows as CSV to this path (default: stdout)
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .is_err()
        {
            eprintln!("error: worker pool already initialized");
            return ExitCode::from(4);
        }
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(4)
        }
    }
}

fn memory_budget() -> anyhow::Result<u64> {
    match std::env::var(MEMORY_BUDGET_ENV) {
        Ok(s) => s
            .trim()
            .parse::<u64>()
            .with_context(|| format!("{MEMORY_BUDGET_ENV} must be a byte count, got {s:?}")),
        Err(_) => Ok(DEFAULT_MEMORY_BUDGET),
    }
}

fn plan() -> anyhow::Result<BlockPlan> {
    let mut plan = BlockPlan::default();
    plan.memory_budget = memory_budget()?;
    Ok(plan)
}

fn csv_sink(path: Option<&PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    match path {
        Some(p) => {
            let f = File::create(p).with_context(|| format!("creating {}", p.display()))?;
            Ok(Box::new(f))
        }
        None => Ok(Box::new(io::stdout())),
    }
}

fn run(command: Command) -> anyhow::Result<ExitCode> {
    match command {
        Command::Companion { p } => cmd_companion(p),
        Command::Gaps { a, b, c, bound, csv } => cmd_gaps(a, b, c, bound, csv),
        Command::Search {
            pmin,
            pmax,
            bound,
            checkpoint,
        } => cmd_search(pmin, pmax, bound, checkpoint),
        Command::Verify { a, b, c, k, l, bound } => cmd_verify(a, b, c, k, l, bound),
        Command::Scan {
            family,
            pmin,
            pmax,
            multiplier,
            csv,
        } => cmd_scan(&family, pmin, pmax, multiplier, csv),
        Command::Alpha {
            pmax,
            disc_mult,
            gap_mult,
            csv,
        } => cmd_alpha(pmax, disc_mult, gap_mult, csv),
    }
}

fn usage_error(msg: &str) -> anyhow::Result<ExitCode> {
    eprintln!("error: {msg}");
    Ok(ExitCode::from(2))
}

fn cmd_companion(p: u64) -> anyhow::Result<ExitCode> {
    if !is_prime(p) {
        return usage_error(&format!("{p} is not prime"));
    }
    let res = companion_form(p)?;
    let [a, b, c] = res.form.coefficients();
    println!("{} anisotropic exactly at {{{}}}", res.form, res.p);
    println!("RESULT companion p={} q={} form={},{},{}", res.p, res.q, a, b, c);
    Ok(ExitCode::SUCCESS)
}

fn cmd_gaps(a: u64, b: u64, c: u64, bound: u64, csv: Option<PathBuf>) -> anyhow::Result<ExitCode> {
    let form = match Form::new(a, b, c) {
        Ok(f) => f,
        Err(e) => return usage_error(&e.to_string()),
    };
    let places = anisotropic_places(&form);
    if places.len() != 1 {
        eprintln!(
            "error: {form} is anisotropic at {places:?}; the gap statistic needs exactly one prime"
        );
        return Ok(ExitCode::from(3));
    }
    let p = places[0];
    let report = gap_report(&form, p, bound, &plan()?)?;
    if let Some(path) = csv.as_ref() {
        let sink = csv_sink(Some(path))?;
        gaps::write_gaps_csv(&report, sink)?;
    }
    let shown = report.gaps.iter().take(100).cloned().collect::<Vec<_>>();
    if !shown.is_empty() {
        println!(
            "first gaps: {}",
            shown
                .iter()
                .map(u64::to_string)
                .collect::<Vec<_>>()
                .join(" ")
        );
    }
    println!(
        "{} gaps in [0,{}] outside the zero class mod {}, alpha={} (gaps/(p ln p), natural log)",
        report.gaps.len(),
        bound,
        p,
        format_significant(report.alpha, 6),
    );
    println!(
        "RESULT gaps form={a},{b},{c} p={p} bound={bound} count={} alpha={} spinor_safe={}",
        report.gaps.len(),
        format_significant(report.alpha, 6),
        report.spinor_safe
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_search(
    pmin: u64,
    pmax: u64,
    bound: u64,
    checkpoint: Option<PathBuf>,
) -> anyhow::Result<ExitCode> {
    if pmin > pmax {
        return usage_error(&format!("empty prime range [{pmin}, {pmax}]"));
    }
    let mut cfg = SearchConfig::with_bound(bound);
    cfg.plan = plan()?;
    let summary = search_range(pmin, pmax, &cfg, checkpoint.as_deref(), |report| {
        eprintln!(
            "[search] p={} l={} triples={} survivors={} refuted={}",
            report.p,
            report.l,
            report.triples_examined,
            report.survivors.len(),
            report.refuted.len()
        );
    })?;
    for (p, l, form) in &summary.survivors {
        let [a, b, c] = form.coefficients();
        println!("CANDIDATE p={p} l={l} form={a},{b},{c} bound={bound} (candidate up to bound, not proven universal)");
    }
    println!(
        "RESULT search pmin={pmin} pmax={pmax} bound={bound} pairs={} resumed={} refuted={} survivors={}",
        summary.pairs,
        summary.resumed_pairs,
        summary.refuted_total,
        summary.survivors.len()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(a: u64, b: u64, c: u64, k: u64, l: u64, bound: u64) -> anyhow::Result<ExitCode> {
    let form = match Form::new(a, b, c) {
        Ok(f) => f,
        Err(e) => return usage_error(&e.to_string()),
    };
    if k == 0 || l == 0 {
        return usage_error("k and l must be positive");
    }
    let gaps = sieve_progression(&form, k, l, bound, &plan()?)?;
    if gaps.is_empty() {
        println!("{form} represents all of S_{{{k},{l}}} up to {bound}");
        println!("RESULT verify form={a},{b},{c} k={k} l={l} bound={bound} gaps=0");
        Ok(ExitCode::SUCCESS)
    } else {
        let shown: Vec<String> = gaps.iter().take(100).map(u64::to_string).collect();
        println!(
            "{form} misses {} element(s) of S_{{{k},{l}}} up to {bound}",
            gaps.len()
        );
        println!("first gaps: {}", shown.join(" "));
        println!(
            "RESULT verify form={a},{b},{c} k={k} l={l} bound={bound} gaps={}",
            gaps.len()
        );
        Ok(ExitCode::from(1))
    }
}

fn cmd_scan(
    family: &str,
    pmin: u64,
    pmax: u64,
    multiplier: u64,
    csv: Option<PathBuf>,
) -> anyhow::Result<ExitCode> {
    let family = match Family::parse(family) {
        Some(f) => f,
        None => {
            return usage_error(&format!(
                "unknown family {family:?}; expected one of 1,1,p 1,2,p 1,3,p"
            ))
        }
    };
    let scan = scan_family(family, pmin, pmax, multiplier, &plan()?)?;
    let sink = csv_sink(csv.as_ref())?;
    gaps::write_scan_csv(&scan.rows, sink)?;
    for &p in &scan.skipped {
        eprintln!("[scan] skipped p={p}: {} not anisotropic exactly there", family.form_at(p));
    }
    let admissible: std::collections::BTreeSet<u64> = scan.rows.iter().map(|r| r.p).collect();
    if admissible.is_empty() {
        println!("0 admissible primes in [{pmin}, {pmax}] for family {family}");
    }
    let candidates = scan.zero_class_pairs();
    for (p, l) in &candidates {
        println!("CANDIDATE p={p} l={l} form={} bound={} (no gaps in this class up to the bound)", family.form_at(*p), multiplier * p);
    }
    println!(
        "RESULT scan family={family} pmin={pmin} pmax={pmax} multiplier={multiplier} primes={} skipped={} rows={} candidates={}",
        admissible.len(),
        scan.skipped.len(),
        scan.rows.len(),
        candidates.len()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_alpha(
    pmax: u64,
    disc_mult: u64,
    gap_mult: u64,
    csv: Option<PathBuf>,
) -> anyhow::Result<ExitCode> {
    let rows = alpha_survey(pmax, disc_mult, gap_mult, &plan()?)?;
    let sink = csv_sink(csv.as_ref())?;
    gaps::write_alpha_csv(&rows, sink)?;
    let truncated = rows.iter().filter(|r| r.truncated()).count();
    println!(
        "RESULT alpha pmax={pmax} disc_mult={disc_mult} gap_mult={gap_mult} forms={} truncated={}",
        rows.len(),
        truncated
    );
    Ok(ExitCode::SUCCESS)
}
