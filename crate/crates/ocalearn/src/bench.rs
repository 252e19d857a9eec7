//! Benchmark sweeps: generate random targets, learn each one actively, and
//! record per-instance metrics as CSV rows.
//!
//! A sweep is a grid over state counts and alphabet sizes; every cell gets
//! `per_cell` instances. Instances are independent (each owns its teacher
//! and table) and run on the rayon pool, but records are emitted in the
//! deterministic grid order regardless of scheduling.
//!
//! # Seeding
//!
//! Each instance derives its generator seed from the master seed and its
//! grid coordinates, so any instance can be reproduced in isolation:
//!
//! ```text
//! s ← splitmix(master)
//! for v in [n_states, alphabet_size, index]:
//!     s ← splitmix(s xor (v · 0x9E3779B97F4A7C15))
//! ```
//!
//! where `splitmix(x)` is the first output of [`SplitMix64`] seeded with
//! `x`. Wall-clock time is measured around the learning call only;
//! generation is excluded.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::opnil::{learn_droca, learn_voca, LearnLimits, RunReport};
use crate::randgen::{random_droca, random_voca, GenConfig, SplitMix64};
use crate::teacher::{Machine, Teacher};
use crate::{Error, Result};

/// Which machine family a sweep draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MachineKind {
    /// Deterministic real-time one-counter automata.
    Droca,
    /// Visibly one-counter automata.
    Voca,
}

impl MachineKind {
    /// The lowercase name used in CSV rows and CLI flags.
    pub fn name(self) -> &'static str {
        match self {
            MachineKind::Droca => "droca",
            MachineKind::Voca => "voca",
        }
    }
}

impl std::fmt::Display for MachineKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MachineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<MachineKind> {
        match s {
            "droca" => Ok(MachineKind::Droca),
            "voca" => Ok(MachineKind::Voca),
            other => Err(Error::Input(format!(
                "unknown machine kind {other:?}; expected droca or voca"
            ))),
        }
    }
}

/// The exact header line of sweep CSV files.
pub const CSV_HEADER: &str = "kind,n_states,alphabet_size,seed,success,wall_ms,\
eq_queries,mq_count,cv_count,learned_states,longest_cex_len,table_rows,table_cols";

/// One benchmark instance's outcome — one CSV row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchRecord {
    /// Machine family of the target.
    pub kind: MachineKind,
    /// States requested from the generator.
    pub n_states: u32,
    /// Letters in the target's alphabet.
    pub alphabet_size: usize,
    /// The instance's derived generator seed.
    pub seed: u64,
    /// Whether learning ended with a (presumed-)equivalent hypothesis.
    pub success: bool,
    /// Wall time of the learning call, milliseconds.
    pub wall_ms: u64,
    /// Equivalence queries issued (one per hypothesis).
    pub eq_queries: u64,
    /// Membership queries issued.
    pub mq_count: u64,
    /// Counter-value queries issued.
    pub cv_count: u64,
    /// States of the final hypothesis (0 if none was produced).
    pub learned_states: u32,
    /// Longest counterexample processed.
    pub longest_cex_len: usize,
    /// Final observation-table rows.
    pub table_rows: usize,
    /// Final observation-table columns.
    pub table_cols: usize,
}

impl BenchRecord {
    /// The record as one CSV row (no trailing newline).
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.kind,
            self.n_states,
            self.alphabet_size,
            self.seed,
            self.success,
            self.wall_ms,
            self.eq_queries,
            self.mq_count,
            self.cv_count,
            self.learned_states,
            self.longest_cex_len,
            self.table_rows,
            self.table_cols
        )
    }

    fn from_report(
        kind: MachineKind,
        n_states: u32,
        alphabet_size: usize,
        seed: u64,
        report: &RunReport,
    ) -> BenchRecord {
        BenchRecord {
            kind,
            n_states,
            alphabet_size,
            seed,
            success: report.success,
            wall_ms: report.wall_ms,
            eq_queries: report.rounds,
            mq_count: report.mq_count,
            cv_count: report.cv_count,
            learned_states: report.learned_states,
            longest_cex_len: report.longest_cex_len,
            table_rows: report.table_rows,
            table_cols: report.table_cols,
        }
    }
}

/// Parameters of one sweep.
#[derive(Debug, Clone)]
pub struct BenchConfig {
    /// Machine family to generate and learn.
    pub kind: MachineKind,
    /// State counts to sweep, in emission order.
    pub n_states: Vec<u32>,
    /// Alphabet sizes to sweep, in emission order.
    pub alphabet_sizes: Vec<usize>,
    /// Instances per (states, alphabet) cell.
    pub per_cell: u32,
    /// Master seed; instance seeds derive from it.
    pub master_seed: u64,
    /// Learning budgets applied to every instance.
    pub limits: LearnLimits,
}

/// The derived seed of instance `index` in cell `(n_states,
/// alphabet_size)`; see the module docs for the folding rule.
pub fn instance_seed(master: u64, n_states: u32, alphabet_size: usize, index: u32) -> u64 {
    let mut s = SplitMix64::new(master).next_u64();
    for v in [u64::from(n_states), alphabet_size as u64, u64::from(index)] {
        s = SplitMix64::new(s ^ v.wrapping_mul(0x9E37_79B9_7F4A_7C15)).next_u64();
    }
    s
}

/// Generates and learns one instance. Failures never propagate: a
/// generation error or a learning run that times out before any hypothesis
/// yields a `success = false` record with the counts gathered so far.
pub fn run_instance(
    kind: MachineKind,
    n_states: u32,
    alphabet_size: usize,
    seed: u64,
    limits: &LearnLimits,
) -> BenchRecord {
    let gen = GenConfig { n_states, alphabet_size, seed, ..GenConfig::default() };
    let failure = |wall_ms, mq, cv, eq| BenchRecord {
        kind,
        n_states,
        alphabet_size,
        seed,
        success: false,
        wall_ms,
        eq_queries: eq,
        mq_count: mq,
        cv_count: cv,
        learned_states: 0,
        longest_cex_len: 0,
        table_rows: 0,
        table_cols: 0,
    };
    let target = match kind {
        MachineKind::Droca => random_droca(&gen).map(Machine::Droca),
        MachineKind::Voca => random_voca(&gen).map(Machine::Voca),
    };
    let Ok(target) = target else {
        return failure(0, 0, 0, 0);
    };
    let mut teacher = Teacher::new(target, limits.msq);
    let started = Instant::now();
    let outcome = match kind {
        MachineKind::Droca => learn_droca(&mut teacher, limits).map(|(_, r)| r),
        MachineKind::Voca => learn_voca(&mut teacher, limits).map(|(_, r)| r),
    };
    match outcome {
        Ok(report) => BenchRecord::from_report(kind, n_states, alphabet_size, seed, &report),
        Err(_) => {
            let stats = teacher.stats();
            failure(started.elapsed().as_millis() as u64, stats.mq, stats.cv, stats.msq)
        }
    }
}

/// Runs the whole sweep on the rayon pool and returns records in grid
/// order: states outer, alphabet sizes inner, then instance index.
pub fn run_bench(config: &BenchConfig) -> Vec<BenchRecord> {
    let mut tasks = Vec::new();
    for &n in &config.n_states {
        for &k in &config.alphabet_sizes {
            for index in 0..config.per_cell {
                tasks.push((n, k, instance_seed(config.master_seed, n, k, index)));
            }
        }
    }
    tasks
        .into_par_iter()
        .map(|(n, k, seed)| run_instance(config.kind, n, k, seed, &config.limits))
        .collect()
}

/// Renders records as a CSV document with the exact schema header.
pub fn render_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

/// Header of the companion summary CSV.
pub const SUMMARY_HEADER: &str = "kind,n_states,alphabet_size,instances,successes,\
avg_wall_ms,avg_eq_queries,avg_mq_count,avg_cv_count,avg_learned_states,\
avg_longest_cex_len,avg_table_rows,avg_table_cols";

/// Renders the per-cell summary: instance and success counts, plus means
/// over the successful runs only (empty fields when a cell has none).
pub fn render_summary(records: &[BenchRecord]) -> String {
    let mut cells: Vec<(MachineKind, u32, usize)> = Vec::new();
    for r in records {
        let key = (r.kind, r.n_states, r.alphabet_size);
        if !cells.contains(&key) {
            cells.push(key);
        }
    }
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for (kind, n, k) in cells {
        let members: Vec<&BenchRecord> = records
            .iter()
            .filter(|r| (r.kind, r.n_states, r.alphabet_size) == (kind, n, k))
            .collect();
        let wins: Vec<&&BenchRecord> = members.iter().filter(|r| r.success).collect();
        write!(out, "{kind},{n},{k},{},{}", members.len(), wins.len()).expect("string write");
        let sums = wins.iter().fold([0f64; 8], |mut acc, r| {
            let vals = [
                r.wall_ms as f64,
                r.eq_queries as f64,
                r.mq_count as f64,
                r.cv_count as f64,
                f64::from(r.learned_states),
                r.longest_cex_len as f64,
                r.table_rows as f64,
                r.table_cols as f64,
            ];
            for (a, v) in acc.iter_mut().zip(vals) {
                *a += v;
            }
            acc
        });
        for s in sums {
            out.push(',');
            if !wins.is_empty() {
                write!(out, "{:.2}", s / wins.len() as f64).expect("string write");
            }
        }
        out.push('\n');
    }
    out
}

/// Writes the records CSV to `path` and the summary next to it at
/// `<stem>.summary.csv`.
pub fn write_reports(records: &[BenchRecord], path: &Path) -> Result<()> {
    std::fs::write(path, render_csv(records))
        .map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))?;
    let summary_path = path.with_extension("summary.csv");
    std::fs::write(&summary_path, render_summary(records))
        .map_err(|e| Error::Input(format!("cannot write {}: {e}", summary_path.display())))?;
    Ok(())
}
