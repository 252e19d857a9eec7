//! Command-line interface: generation, passive and active learning,
//! equivalence/consistency checking, and benchmark sweeps.
//!
//! Exit codes: `0` success, `1` semantic negative (a counterexample or an
//! inconsistent sample), `2` input error (bad arguments, parse failures,
//! generation failures), `3` learning limits hit.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use ocalearn::bench::{run_bench, write_reports, BenchConfig, MachineKind};
use ocalearn::opni::{check_consistency, opni};
use ocalearn::opnil::{learn_droca, learn_voca, LearnLimits, RunReport, RunVerdict};
use ocalearn::randgen::{random_droca, random_voca, GenConfig};
use ocalearn::teacher::{EquivalenceVerdict, Machine, Teacher, TeacherLimits};
use ocalearn::textio::{
    decode_counter_map, decode_machine, decode_samples, derive_alphabet, encode_machine,
    machine_to_dot, MachineDoc,
};
use ocalearn::{Error, Result};

#[derive(Parser)]
#[command(
    name = "ocalearn",
    version,
    about = "Learn deterministic one-counter automata, passively and actively"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random machine from a seed.
    Generate(GenerateArgs),
    /// Learn a machine from a labelled sample and counter values.
    LearnPassive(LearnPassiveArgs),
    /// Learn a machine by querying a teacher built from a target file.
    LearnActive(LearnActiveArgs),
    /// Compare two machines, or a machine against a sample.
    Check(CheckArgs),
    /// Sweep a grid of random instances and write CSV metrics.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Machine family: droca or voca.
    kind: String,
    /// Number of states.
    n_states: u32,
    /// Number of letters.
    alphabet_size: usize,
    /// Generator seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a Graphviz rendering here.
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Args)]
struct LearnPassiveArgs {
    /// Sample file: one `+<TAB>word` or `-<TAB>word` per line.
    #[arg(long)]
    sample: PathBuf,
    /// Counter-value file: one `word<TAB>value` per sample prefix.
    #[arg(long)]
    counters: PathBuf,
    /// Output file for the learned machine (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a Graphviz rendering here.
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Args)]
struct LearnActiveArgs {
    /// Target machine file; the teacher simulates it.
    #[arg(long)]
    target: PathBuf,
    /// Force a mode: droca (ignore any partition) or voca.
    #[arg(long)]
    kind: Option<String>,
    /// Output file for the hypothesis (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a Graphviz rendering here.
    #[arg(long)]
    dot: Option<PathBuf>,
    #[command(flatten)]
    limits: LimitArgs,
}

#[derive(Args)]
struct CheckArgs {
    /// First machine file.
    machine: PathBuf,
    /// Second machine file (omit when checking against a sample).
    other: Option<PathBuf>,
    /// Sample file to check the machine against.
    #[arg(long, conflicts_with = "other")]
    sample: Option<PathBuf>,
    /// Counter-value file accompanying --sample (droca machines).
    #[arg(long, requires = "sample")]
    counters: Option<PathBuf>,
    /// Equivalence search depth: longest counterexample considered.
    #[arg(long, default_value_t = 64)]
    max_len: usize,
    /// Equivalence search width: product configurations explored.
    #[arg(long, default_value_t = 1_000_000)]
    max_configs: usize,
}

#[derive(Args)]
struct BenchArgs {
    /// Machine family: droca or voca.
    #[arg(long, default_value = "droca")]
    kind: String,
    /// State counts: a value, inclusive range `lo-hi`, or comma list.
    #[arg(long, default_value = "2-8")]
    states: String,
    /// Alphabet sizes, same syntax as --states.
    #[arg(long, default_value = "2")]
    alphabets: String,
    /// Instances per (states, alphabet) cell.
    #[arg(long, default_value_t = 5)]
    per_cell: u32,
    /// Master seed; per-instance seeds derive from it.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output CSV path; a `<stem>.summary.csv` is written next to it.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    limits: LimitArgs,
}

#[derive(Args)]
struct LimitArgs {
    /// Wall-clock budget per learning run, in seconds.
    #[arg(long, default_value_t = 300)]
    timeout_s: u64,
    /// Maximum equivalence rounds per run.
    #[arg(long, default_value_t = 200)]
    max_rounds: u64,
    /// Equivalence search depth: longest counterexample considered.
    #[arg(long, default_value_t = 64)]
    max_len: usize,
    /// Equivalence search width: product configurations explored.
    #[arg(long, default_value_t = 1_000_000)]
    max_configs: usize,
}

impl LimitArgs {
    fn to_limits(&self) -> LearnLimits {
        LearnLimits {
            max_rounds: self.max_rounds,
            wall_budget: Some(Duration::from_secs(self.timeout_s)),
            msq: TeacherLimits { max_cex_len: self.max_len, max_configs: self.max_configs },
        }
    }
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Generate(a) => cmd_generate(&a),
        Command::LearnPassive(a) => cmd_learn_passive(&a),
        Command::LearnActive(a) => cmd_learn_active(&a),
        Command::Check(a) => cmd_check(&a),
        Command::Bench(a) => cmd_bench(&a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Timeout(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

/// Honors `OCALEARN_THREADS` before rayon builds its default pool.
fn init_thread_pool() {
    if let Ok(v) = std::env::var("OCALEARN_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
}

fn write_output(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(p) => std::fs::write(p, content)
            .map_err(|e| Error::Input(format!("cannot write {}: {e}", p.display()))),
    }
}

fn write_dot(path: Option<&Path>, doc: &MachineDoc) -> Result<()> {
    if let Some(p) = path {
        write_output(Some(p), &machine_to_dot(doc))?;
    }
    Ok(())
}

/// Loads a one-counter machine file; DFA documents are rejected.
fn load_machine(path: &Path) -> Result<Machine> {
    match decode_machine(&read_file(path)?)? {
        MachineDoc::Droca(m) => Ok(Machine::Droca(m)),
        MachineDoc::Voca(v) => Ok(Machine::Voca(v)),
        MachineDoc::Dfa(_) => Err(Error::Input(format!(
            "{} holds a plain DFA; this command needs a one-counter machine",
            path.display()
        ))),
    }
}

fn cmd_generate(a: &GenerateArgs) -> Result<ExitCode> {
    let kind: MachineKind = a.kind.parse()?;
    let cfg = GenConfig {
        n_states: a.n_states,
        alphabet_size: a.alphabet_size,
        seed: a.seed,
        ..GenConfig::default()
    };
    let doc = match kind {
        MachineKind::Droca => MachineDoc::Droca(random_droca(&cfg)?),
        MachineKind::Voca => MachineDoc::Voca(random_voca(&cfg)?),
    };
    write_output(a.out.as_deref(), &encode_machine(&doc))?;
    write_dot(a.dot.as_deref(), &doc)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_learn_passive(a: &LearnPassiveArgs) -> Result<ExitCode> {
    let sample_text = read_file(&a.sample)?;
    let ce_text = read_file(&a.counters)?;
    let alpha = derive_alphabet(&[&sample_text, &ce_text])?;
    let sample = decode_samples(&alpha, &sample_text)?;
    let ce = decode_counter_map(&alpha, &ce_text)?;
    let machine = opni(&sample, &ce, &alpha)?;
    println!("consistent: {}", check_consistency(&machine, &sample, &ce));
    println!("states: {}", machine.n_states());
    let doc = MachineDoc::Droca(machine);
    write_output(a.out.as_deref(), &encode_machine(&doc))?;
    write_dot(a.dot.as_deref(), &doc)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_learn_active(a: &LearnActiveArgs) -> Result<ExitCode> {
    let mut target = load_machine(&a.target)?;
    if let Some(kind) = &a.kind {
        target = match (kind.parse::<MachineKind>()?, target) {
            (MachineKind::Droca, Machine::Voca(v)) => Machine::Droca(v.into_base()),
            (MachineKind::Voca, Machine::Droca(_)) => {
                return Err(Error::Input(
                    "--kind voca needs a target file with a letter partition".into(),
                ));
            }
            (_, t) => t,
        };
    }
    let target_states = target.n_states();
    let alphabet_size = target.alphabet().len();
    let voca_mode = matches!(target, Machine::Voca(_));
    let limits = a.limits.to_limits();
    let mut teacher = Teacher::new(target, limits.msq);
    let outcome = if voca_mode {
        learn_voca(&mut teacher, &limits).map(|(v, r)| (MachineDoc::Voca(v), r))
    } else {
        learn_droca(&mut teacher, &limits).map(|(m, r)| (MachineDoc::Droca(m), r))
    };
    let (doc, report) = outcome?;
    print_report(
        if voca_mode { MachineKind::Voca } else { MachineKind::Droca },
        target_states,
        alphabet_size,
        &report,
    );
    write_output(a.out.as_deref(), &encode_machine(&doc))?;
    write_dot(a.dot.as_deref(), &doc)?;
    Ok(if report.success { ExitCode::SUCCESS } else { ExitCode::from(3) })
}

fn print_report(kind: MachineKind, n_states: u32, alphabet_size: usize, r: &RunReport) {
    println!("kind: {kind}");
    println!("n_states: {n_states}");
    println!("alphabet_size: {alphabet_size}");
    println!("success: {}", r.success);
    println!(
        "verdict: {}",
        match r.verdict {
            RunVerdict::Equivalent => "equivalent".to_string(),
            RunVerdict::PresumedEquivalent(b) => format!("presumed-equivalent (bound {b})"),
            RunVerdict::Timeout => "timeout".to_string(),
        }
    );
    println!("wall_ms: {}", r.wall_ms);
    println!("eq_queries: {}", r.rounds);
    println!("mq_count: {}", r.mq_count);
    println!("cv_count: {}", r.cv_count);
    println!("learned_states: {}", r.learned_states);
    println!("longest_cex_len: {}", r.longest_cex_len);
    println!("table_rows: {}", r.table_rows);
    println!("table_cols: {}", r.table_cols);
}

fn cmd_check(a: &CheckArgs) -> Result<ExitCode> {
    match (&a.other, &a.sample) {
        (Some(other), None) => cmd_check_equiv(&a.machine, other, a.max_len, a.max_configs),
        (None, Some(sample)) => {
            cmd_check_sample(&a.machine, sample, a.counters.as_deref())
        }
        (None, None) => Err(Error::Input(
            "check needs either a second machine or --sample".into(),
        )),
        (Some(_), Some(_)) => unreachable!("clap rejects the combination"),
    }
}

fn cmd_check_equiv(
    path_a: &Path,
    path_b: &Path,
    max_len: usize,
    max_configs: usize,
) -> Result<ExitCode> {
    let ma = load_machine(path_a)?;
    let mb = load_machine(path_b)?;
    if ma.alphabet() != mb.alphabet() {
        return Err(Error::Input(format!(
            "alphabets differ: {} vs {}",
            ma.alphabet(),
            mb.alphabet()
        )));
    }
    let mut teacher = Teacher::new(ma, TeacherLimits { max_cex_len: max_len, max_configs });
    let alphabet = teacher.alphabet().clone();
    match teacher.msq(&mb.complete())? {
        EquivalenceVerdict::Equivalent => {
            println!("equivalent");
            Ok(ExitCode::SUCCESS)
        }
        EquivalenceVerdict::PresumedEquivalent(bound) => {
            println!("presumed-equivalent (bound {bound})");
            Ok(ExitCode::SUCCESS)
        }
        EquivalenceVerdict::Counterexample(w, kind) => {
            println!("counterexample {} {}", alphabet.format_word(&w), kind.name());
            Ok(ExitCode::from(1))
        }
    }
}

fn cmd_check_sample(
    machine_path: &Path,
    sample_path: &Path,
    counters_path: Option<&Path>,
) -> Result<ExitCode> {
    let machine = load_machine(machine_path)?;
    let alpha = machine.alphabet().clone();
    let sample = decode_samples(&alpha, &read_file(sample_path)?)?;
    let ok = match &machine {
        Machine::Droca(m) => {
            let Some(cp) = counters_path else {
                return Err(Error::Input(
                    "checking a droca against a sample needs --counters".into(),
                ));
            };
            let ce = decode_counter_map(&alpha, &read_file(cp)?)?;
            check_consistency(m, &sample, &ce)
        }
        Machine::Voca(v) => {
            if counters_path.is_some() {
                return Err(Error::Input(
                    "voca counter values come from the partition; omit --counters".into(),
                ));
            }
            let total = v.complete_with_sink();
            let mut ok = true;
            for (w, want) in sample
                .positives()
                .iter()
                .map(|w| (w, true))
                .chain(sample.negatives().iter().map(|w| (w, false)))
            {
                ok = ok && total.base().accepts(w)? == want;
            }
            ok
        }
    };
    println!("{}", if ok { "consistent" } else { "inconsistent" });
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

/// Parses `5`, `2-8`, or `2,4,6` (commas may join either form).
fn parse_grid_axis(text: &str) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if let Some((lo, hi)) = part.split_once('-') {
            let lo: u64 = lo.trim().parse().map_err(|_| bad_axis(text))?;
            let hi: u64 = hi.trim().parse().map_err(|_| bad_axis(text))?;
            if lo > hi {
                return Err(bad_axis(text));
            }
            out.extend(lo..=hi);
        } else {
            out.push(part.parse().map_err(|_| bad_axis(text))?);
        }
    }
    if out.is_empty() {
        return Err(bad_axis(text));
    }
    Ok(out)
}

fn bad_axis(text: &str) -> Error {
    Error::Input(format!(
        "cannot parse {text:?}: expected a number, an inclusive range lo-hi, or a comma list"
    ))
}

fn cmd_bench(a: &BenchArgs) -> Result<ExitCode> {
    let config = BenchConfig {
        kind: a.kind.parse()?,
        n_states: parse_grid_axis(&a.states)?
            .into_iter()
            .map(|n| u32::try_from(n).map_err(|_| bad_axis(&a.states)))
            .collect::<Result<_>>()?,
        alphabet_sizes: parse_grid_axis(&a.alphabets)?
            .into_iter()
            .map(|n| n as usize)
            .collect(),
        per_cell: a.per_cell,
        master_seed: a.seed,
        limits: a.limits.to_limits(),
    };
    let records = run_bench(&config);
    write_reports(&records, &a.out)?;
    let successes = records.iter().filter(|r| r.success).count();
    println!("instances: {}", records.len());
    println!("successes: {successes}");
    println!("csv: {}", a.out.display());
    Ok(ExitCode::SUCCESS)
}
