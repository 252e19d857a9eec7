//! Grammatical inference for deterministic real-time one-counter automata.
//!
//! This crate implements a family of learning algorithms for one-counter
//! languages, together with the plumbing needed to run them as experiments:
//!
//! * [`rpni`] — classical passive DFA learning by evidence-driven state
//!   merging over a prefix tree acceptor.
//! * [`opni`] — passive learning of deterministic real-time one-counter
//!   automata (DROCA): sample words are annotated with counter signs,
//!   the alphabet is enriched with *action* letters describing per-letter
//!   counter effects, RPNI runs on the enriched sample, and a one-counter
//!   machine is extracted from the resulting DFA.
//! * [`opnil`] — an active learning loop in the style of L*: an observation
//!   table with counter-aware closure/consistency conditions drives
//!   membership, counter-value, and synchronous-equivalence queries against
//!   a simulated [`teacher`], invoking OPNI as the passive subroutine. A
//!   specialised mode handles visibly one-counter automata (VOCA), whose
//!   counter actions are fixed by an alphabet partition.
//! * [`randgen`] + [`bench`] — seeded random generation of benchmark
//!   machines and a sweep harness emitting per-task metrics as CSV.
//!
//! The machine models, word orders, sample containers, and text formats live
//! in [`alphabet`], [`samples`], [`automata`], and [`textio`].
//!
//! Conventions used throughout:
//!
//! * Letters and states are dense `u32` indices; an [`alphabet::Alphabet`]
//!   owns the display names and the fixed total order on letters.
//! * Transition maps may be partial. A word whose run hits a missing
//!   transition (or would drive the counter negative) is *stuck* and is
//!   rejected; its counter effect is undefined.
//! * All algorithms are deterministic: identical inputs (including seeds and
//!   alphabet order) produce identical outputs.

pub mod alphabet;
pub mod automata;
pub mod bench;
pub mod opni;
pub mod opnil;
pub mod randgen;
pub mod rpni;
pub mod samples;
pub mod teacher;
pub mod textio;

/// Errors surfaced by learning, parsing, validation, and generation.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller-supplied value violates a documented precondition.
    #[error("input error: {0}")]
    Input(String),
    /// Text that fails to parse as an automaton, sample, or counter map.
    #[error("parse error: line {line}: {msg}")]
    Parse {
        /// 1-based line number in the offending document.
        line: usize,
        /// Description of the malformation.
        msg: String,
    },
    /// A sample set whose positive and negative words overlap, or an
    /// enrichment that would place one word on both sides.
    #[error("inconsistent sample: {0}")]
    Inconsistent(String),
    /// DROCA extraction failed because the learned DFA lacks a usable
    /// action edge (a violation of the invariant the merge phase
    /// maintains for consistent inputs).
    #[error("extraction error: {0}")]
    Extraction(String),
    /// Random generation exhausted its restart budget.
    #[error("generation error: {0}")]
    Generation(String),
    /// An active-learning run exceeded its limits.
    #[error("timeout: {0}")]
    Timeout(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
