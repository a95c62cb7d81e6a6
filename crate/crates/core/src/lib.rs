//! Deciding local properties of positive diagonal ternary quadratic forms,
//! sieving the integers they represent, searching for candidate forms that
//! cover an arithmetic progression, and measuring the gap statistics of
//! forms that miss one.
//!
//! The crate is organized bottom-up:
//!
//! * [`arith`] — integer square roots, primality, squarefree parts;
//! * [`form`] — the [`Form`] and [`Progression`] domain types;
//! * [`tables`] — sieved prime/squarefree flag tables;
//! * [`local`] — residue symbols, Hilbert symbols, anisotropy, companion
//!   forms and progression witnesses;
//! * [`sieve`] — blocked representation sieves and single-value tests;
//! * [`gaps`] — gap sets, the alpha statistic, family scans and surveys;
//! * [`search`] — the pruned candidate search with resumable checkpoints.

pub mod arith;
mod bits;
pub mod form;
pub mod gaps;
pub mod local;
pub mod search;
pub mod sieve;
pub mod tables;

pub use form::{Form, FormError, Progression, ProgressionError};
pub use gaps::{AlphaRow, Family, FamilyScan, GapReport, GapsError, HistogramRow};
pub use local::{AlmostUniversalWitness, CompanionResult, LocalError, Place};
pub use search::{CandidateReport, Refutation, SearchConfig, SearchError, SweepSummary};
pub use sieve::{BlockPlan, EValue, RepBitmap, SieveError, SubForm};
pub use tables::{NumberTables, TableError};
