//! Pruned exhaustive search for diagonal ternary candidates over `S_{p,l}`.
//!
//! For a prime `p` and residue `1 <= l < p`, any form representing all of
//! `S_{p,l}` can be normalized to a triple `(a, b, c)` with
//!
//! * squarefree coefficients, sorted `a <= b <= c`;
//! * `a <= l` (the form represents `l`), and `a <= l/2` when `l` is not
//!   squarefree;
//! * `<a,b>` representing `l`;
//! * `p | b` or `p | c`;
//! * `b` at most the least missing progression element of `<a>`, and `c`
//!   at most that of `<a,b>`.
//!
//! The search enumerates exactly those triples and certifies each against
//! the progression up to a configurable bound. Survivors are *candidates up
//! to the bound*, never established universal forms; refutations carry the
//! least witness gap, re-checked by the independent single-value test.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::is_prime;
use crate::form::Form;
use crate::sieve::{
    first_unrepresented, represents, sieve_progression, BlockPlan, EValue, SieveError, SubForm,
};
use crate::tables::{NumberTables, TableError};

/// Cap on the least-missing-element searches used for the b and c bounds.
pub const DEFAULT_E_SEARCH_CAP: u64 = 100_000_000;

/// Default certification bound for range sweeps.
pub const DEFAULT_SWEEP_BOUND: u64 = 1_000_000;

/// Default certification bound for single-pair deep checks.
pub const DEFAULT_DEEP_BOUND: u64 = 1_000_000_000;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("(p={p}, l={l}) is not a valid pair: p must be prime and 1 <= l < p")]
    InvalidPair { p: u64, l: u64 },
    #[error("every element of S_{{{k},{l}}} up to {cap} is represented by {subform}; raise the e-search cap")]
    ESearchExhausted {
        subform: String,
        k: u64,
        l: u64,
        cap: u64,
    },
    #[error(transparent)]
    Sieve(#[from] SieveError),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error("checkpoint I/O: {0}")]
    CheckpointIo(#[from] std::io::Error),
    #[error("checkpoint line {line} is not a valid record: {message}")]
    CheckpointParse { line: usize, message: String },
    #[error("checkpoint record {index} is (p={found_p}, l={found_l}, bound={found_bound}), expected (p={expected_p}, l={expected_l}, bound={expected_bound}); was the sweep configuration changed?")]
    CheckpointMismatch {
        index: usize,
        found_p: u64,
        found_l: u64,
        found_bound: u64,
        expected_p: u64,
        expected_l: u64,
        expected_bound: u64,
    },
    #[error("checkpoint has {found} records but the sweep only has {expected} pairs")]
    CheckpointTooLong { found: usize, expected: usize },
}

/// Tunables for a search run.
#[derive(Clone, Copy, Debug)]
pub struct SearchConfig {
    /// Progression bound up to which each admissible form is certified.
    pub certify_bound: u64,
    /// Cap for the least-missing-element searches.
    pub e_search_cap: u64,
    /// First staged certification bound; most forms are refuted here.
    pub first_stage: u64,
    /// Growth factor between stages.
    pub stage_factor: u64,
    pub plan: BlockPlan,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            certify_bound: DEFAULT_SWEEP_BOUND,
            e_search_cap: DEFAULT_E_SEARCH_CAP,
            first_stage: 10_000,
            stage_factor: 10,
            plan: BlockPlan::default(),
        }
    }
}

impl SearchConfig {
    pub fn with_bound(certify_bound: u64) -> Self {
        SearchConfig {
            certify_bound,
            ..SearchConfig::default()
        }
    }

    /// Certification bounds in increasing order, ending exactly at the
    /// certify bound. A gap found at the first nonempty stage is the least
    /// gap overall, so staging never changes the reported witness.
    fn stages(&self) -> Vec<u64> {
        let mut out = Vec::new();
        let mut s = self.first_stage.max(1).min(self.certify_bound);
        while s < self.certify_bound {
            out.push(s);
            if self.stage_factor < 2 {
                break;
            }
            s = s.saturating_mul(self.stage_factor);
        }
        out.push(self.certify_bound);
        out
    }
}

/// A refuted form together with the least progression element it misses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Refutation {
    pub form: Form,
    pub witness: u64,
}

/// Outcome of the search for one (p, l) pair. Survivors are candidates up
/// to the stated bound only.
#[derive(Clone, Debug)]
pub struct CandidateReport {
    pub p: u64,
    pub l: u64,
    pub survivors: Vec<Form>,
    pub refuted: Vec<Refutation>,
    pub certify_bound: u64,
    pub triples_examined: u64,
}

fn e_bound(
    subform: SubForm,
    p: u64,
    l: u64,
    cap: u64,
) -> Result<u64, SearchError> {
    match first_unrepresented(&subform, p, l, cap) {
        EValue::Found(n) => Ok(n),
        EValue::Exhausted => Err(SearchError::ESearchExhausted {
            subform: subform.to_string(),
            k: p,
            l,
            cap,
        }),
    }
}

/// The admissible triples for (p, l), in lexicographic (a, b, c) order.
pub fn admissible_triples(
    p: u64,
    l: u64,
    tables: &NumberTables,
    e_search_cap: u64,
) -> Result<Vec<Form>, SearchError> {
    if !is_prime(p) || l == 0 || l >= p {
        return Err(SearchError::InvalidPair { p, l });
    }
    let a_max = if tables.is_squarefree(l) { l } else { l / 2 };
    let mut out = Vec::new();
    for a in 1..=a_max {
        if !tables.is_squarefree(a) {
            continue;
        }
        let e_a = e_bound(SubForm::Unary(a), p, l, e_search_cap)?;
        for b in a..=e_a {
            if !tables.is_squarefree(b) {
                continue;
            }
            if !SubForm::Binary(a, b).represents(l) {
                continue;
            }
            let e_ab = e_bound(SubForm::Binary(a, b), p, l, e_search_cap)?;
            for c in b..=e_ab {
                if b % p != 0 && c % p != 0 {
                    continue;
                }
                if !tables.is_squarefree(c) {
                    continue;
                }
                out.push(Form::new(a, b, c).expect("positive coefficients"));
            }
        }
    }
    Ok(out)
}

/// Certifies every admissible triple for (p, l) against
/// `S_{p,l} ∩ [0, certify_bound]`. Certification is staged: forms are first
/// checked to a small bound and only survivors escalate, which leaves the
/// least-gap witness unchanged.
pub fn search_pair(
    p: u64,
    l: u64,
    cfg: &SearchConfig,
    tables: &NumberTables,
) -> Result<CandidateReport, SearchError> {
    let triples = admissible_triples(p, l, tables, cfg.e_search_cap)?;
    let stages = cfg.stages();
    let outcomes: Vec<Option<u64>> = triples
        .par_iter()
        .map(|form| {
            for &stage in &stages {
                let gaps = sieve_progression(form, p, l, stage, &cfg.plan)?;
                if let Some(&g) = gaps.first() {
                    assert!(
                        represents(form, g).is_none(),
                        "refutation witness {g} for {form} failed re-verification"
                    );
                    return Ok(Some(g));
                }
            }
            Ok(None)
        })
        .collect::<Result<_, SearchError>>()?;
    let mut survivors = Vec::new();
    let mut refuted = Vec::new();
    for (form, outcome) in triples.iter().zip(&outcomes) {
        match outcome {
            None => survivors.push(*form),
            Some(witness) => refuted.push(Refutation {
                form: *form,
                witness: *witness,
            }),
        }
    }
    Ok(CandidateReport {
        p,
        l,
        survivors,
        refuted,
        certify_bound: cfg.certify_bound,
        triples_examined: triples.len() as u64,
    })
}

/// One line of the checkpoint file; `status` is `"done"` for completed
/// pairs. Records are appended in sweep order, one JSON object per line.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CheckpointRecord {
    pub p: u64,
    pub l: u64,
    pub status: String,
    pub survivors: Vec<[u64; 3]>,
    pub refuted_count: u64,
    pub bound: u64,
}

impl CheckpointRecord {
    fn from_report(report: &CandidateReport) -> CheckpointRecord {
        CheckpointRecord {
            p: report.p,
            l: report.l,
            status: "done".to_string(),
            survivors: report.survivors.iter().map(|f| f.coefficients()).collect(),
            refuted_count: report.refuted.len() as u64,
            bound: report.certify_bound,
        }
    }
}

/// Replays a checkpoint file. A trailing record that is incomplete — a
/// partial line from an interrupted write, or one not marked done — is
/// discarded by truncating the file, so a resumed sweep appends exactly
/// where the durable prefix ends. Bad records elsewhere are errors.
fn load_checkpoint(path: &Path) -> Result<Vec<CheckpointRecord>, SearchError> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(e.into()),
    };
    let mut reader = BufReader::new(file);
    let mut records = Vec::new();
    let mut durable_end: u64 = 0;
    let mut line_no = 0usize;
    let mut buf = String::new();
    loop {
        buf.clear();
        let n = reader.read_line(&mut buf)?;
        if n == 0 {
            break;
        }
        line_no += 1;
        let complete_line = buf.ends_with('\n');
        let parsed: Result<CheckpointRecord, _> = serde_json::from_str(buf.trim_end());
        match parsed {
            Ok(rec) if rec.status == "done" && complete_line => {
                durable_end += n as u64;
                records.push(rec);
            }
            _ => {
                // only the final record may be incomplete
                let mut rest = String::new();
                reader.read_to_string(&mut rest)?;
                if !rest.trim().is_empty() {
                    return Err(SearchError::CheckpointParse {
                        line: line_no,
                        message: "unreadable record followed by more data".to_string(),
                    });
                }
                let f = OpenOptions::new().write(true).open(path)?;
                f.set_len(durable_end)?;
                break;
            }
        }
    }
    Ok(records)
}

/// Totals of a sweep over a prime range.
#[derive(Clone, Debug, Default)]
pub struct SweepSummary {
    pub pairs: u64,
    pub resumed_pairs: u64,
    pub refuted_total: u64,
    /// Surviving candidates as (p, l, form), in sweep order.
    pub survivors: Vec<(u64, u64, Form)>,
}

fn pair_sequence(p_min: u64, p_max: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for p in p_min.max(2)..=p_max {
        if is_prime(p) {
            for l in 1..p {
                out.push((p, l));
            }
        }
    }
    out
}

/// Sweeps every prime in `[p_min, p_max]` and every residue `1 <= l < p`,
/// in ascending (p, l) order. With a checkpoint path, completed pairs are
/// appended one JSON record per line after each pair finishes, and a
/// restarted sweep resumes after the durable prefix, producing a final file
/// byte-identical to an uninterrupted run. `progress` is invoked for each
/// freshly computed pair.
pub fn search_range(
    p_min: u64,
    p_max: u64,
    cfg: &SearchConfig,
    checkpoint: Option<&Path>,
    mut progress: impl FnMut(&CandidateReport),
) -> Result<SweepSummary, SearchError> {
    let pairs = pair_sequence(p_min, p_max);
    let mut summary = SweepSummary {
        pairs: pairs.len() as u64,
        ..SweepSummary::default()
    };

    // replay
    let done = match checkpoint {
        Some(path) => load_checkpoint(path)?,
        None => Vec::new(),
    };
    if done.len() > pairs.len() {
        return Err(SearchError::CheckpointTooLong {
            found: done.len(),
            expected: pairs.len(),
        });
    }
    for (i, rec) in done.iter().enumerate() {
        let (p, l) = pairs[i];
        if rec.p != p || rec.l != l || rec.bound != cfg.certify_bound {
            return Err(SearchError::CheckpointMismatch {
                index: i,
                found_p: rec.p,
                found_l: rec.l,
                found_bound: rec.bound,
                expected_p: p,
                expected_l: l,
                expected_bound: cfg.certify_bound,
            });
        }
        summary.resumed_pairs += 1;
        summary.refuted_total += rec.refuted_count;
        for t in &rec.survivors {
            let form = Form::try_from(*t).map_err(|e| SearchError::CheckpointParse {
                line: i + 1,
                message: e.to_string(),
            })?;
            summary.survivors.push((rec.p, rec.l, form));
        }
    }

    let mut sink = match checkpoint {
        Some(path) => Some(OpenOptions::new().create(true).append(true).open(path)?),
        None => None,
    };

    let tables = NumberTables::build(p_max.max(2).max(1_000_000))?;
    let remaining = &pairs[done.len()..];
    // group the remaining pairs by prime; residues of one prime run in
    // parallel, records append strictly in sweep order
    let mut idx = 0usize;
    while idx < remaining.len() {
        let p = remaining[idx].0;
        let mut end = idx;
        while end < remaining.len() && remaining[end].0 == p {
            end += 1;
        }
        let batch = &remaining[idx..end];
        let reports: Vec<CandidateReport> = batch
            .par_iter()
            .map(|&(p, l)| search_pair(p, l, cfg, &tables))
            .collect::<Result<_, SearchError>>()?;
        for report in &reports {
            if let Some(f) = sink.as_mut() {
                let rec = CheckpointRecord::from_report(report);
                let mut line = serde_json::to_string(&rec).expect("record serializes");
                line.push('\n');
                f.write_all(line.as_bytes())?;
                f.flush()?;
            }
            summary.refuted_total += report.refuted.len() as u64;
            for s in &report.survivors {
                summary.survivors.push((report.p, report.l, *s));
            }
            progress(report);
        }
        idx = end;
    }
    Ok(summary)
}
