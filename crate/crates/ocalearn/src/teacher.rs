//! A simulated oracle over a hidden target machine.
//!
//! The teacher answers three kinds of queries about a fixed target that the
//! learner never sees directly:
//!
//! * **membership** — is the word in the language? ([`Teacher::mq`])
//! * **counter value** — what counter value does the word reach?
//!   ([`Teacher::cv`])
//! * **minimal synchronous equivalence** — is the hypothesis equivalent to
//!   the target *and* counter-synchronous with it, and if not, what is the
//!   llex-least word telling them apart? ([`Teacher::msq`])
//!
//! The equivalence search explores the synchronized product of target and
//! hypothesis breadth-first. Because the product of counter-synchronous
//! machines is itself a one-counter system, the search is exact whenever it
//! closes; when it has to cut a branch (counter or configuration budget) the
//! verdict degrades to [`EquivalenceVerdict::PresumedEquivalent`] with the
//! length up to which every word was checked.
//!
//! [`brute_force_equiv`] is the desk-scale ground truth used by tests and
//! the `check` command: it simply runs every word up to a length bound.

use std::collections::HashSet;
use std::sync::Arc;

use crate::alphabet::{Alphabet, Letter, Word};
use crate::automata::{Droca, State, Voca};
use crate::{Error, Result};

/// Either kind of one-counter machine, as used for targets and hypotheses.
#[derive(Debug, Clone)]
pub enum Machine {
    /// A deterministic real-time one-counter automaton.
    Droca(Droca),
    /// A visibly one-counter automaton.
    Voca(Voca),
}

impl From<Droca> for Machine {
    fn from(m: Droca) -> Machine {
        Machine::Droca(m)
    }
}

impl From<Voca> for Machine {
    fn from(m: Voca) -> Machine {
        Machine::Voca(m)
    }
}

impl Machine {
    /// The shared run engine: a VOCA runs exactly as its underlying DROCA.
    pub fn as_droca(&self) -> &Droca {
        match self {
            Machine::Droca(m) => m,
            Machine::Voca(m) => m.base(),
        }
    }

    /// The alphabet.
    pub fn alphabet(&self) -> &Arc<Alphabet> {
        self.as_droca().alphabet()
    }

    /// Number of control states.
    pub fn n_states(&self) -> u32 {
        self.as_droca().n_states()
    }

    /// `"droca"` or `"voca"`.
    pub fn kind_name(&self) -> &'static str {
        match self {
            Machine::Droca(_) => "droca",
            Machine::Voca(_) => "voca",
        }
    }

    /// Totalises the machine with a sink, respecting visibility for VOCAs
    /// (zero-level entries on return letters stay undefined).
    pub fn complete(&self) -> Machine {
        match self {
            Machine::Droca(m) => Machine::Droca(m.complete_with_sink()),
            Machine::Voca(m) => Machine::Voca(m.complete_with_sink()),
        }
    }

    /// Membership and counter value of a word in one pass: `(accepted,
    /// counter)`, where a stuck run rejects and has counter `None`.
    pub fn observe(&self, w: &[Letter]) -> Result<(bool, Option<u64>)> {
        let m = self.as_droca();
        match m.run(w)? {
            crate::automata::RunResult::Completed(cs) => {
                let last = cs.last().expect("a run has at least the start configuration");
                Ok((m.is_final(last.state), Some(last.counter)))
            }
            crate::automata::RunResult::Stuck(_) => Ok((false, None)),
        }
    }
}

/// How many queries of each kind a teacher has answered.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QueryStats {
    /// Membership queries.
    pub mq: u64,
    /// Counter-value queries.
    pub cv: u64,
    /// Equivalence queries.
    pub msq: u64,
}

/// Budgets for the equivalence search.
#[derive(Debug, Clone, Copy)]
pub struct TeacherLimits {
    /// Longest counterexample the product search may look for; beyond it,
    /// the verdict is presumed equivalence.
    pub max_cex_len: usize,
    /// Cap on stored product configurations.
    pub max_configs: usize,
}

impl Default for TeacherLimits {
    fn default() -> TeacherLimits {
        TeacherLimits { max_cex_len: 64, max_configs: 1_000_000 }
    }
}

/// What distinguishes two machines at a counterexample word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MismatchKind {
    /// One machine accepts the word, the other rejects it.
    Membership,
    /// The counter values differ (a missing run counts as `⊥`).
    CounterValue,
}

impl MismatchKind {
    /// The lowercase name used in CLI output.
    pub fn name(self) -> &'static str {
        match self {
            MismatchKind::Membership => "membership",
            MismatchKind::CounterValue => "counter",
        }
    }
}

/// The answer to an equivalence query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EquivalenceVerdict {
    /// The product search closed with no mismatch: the machines are
    /// counter-synchronous and equivalent.
    Equivalent,
    /// The llex-least word (within the searched bound) where the machines
    /// disagree, with what disagrees.
    Counterexample(Word, MismatchKind),
    /// No mismatch found, but the search was cut; every word up to the
    /// reported length was verified.
    PresumedEquivalent(usize),
}

/// The simulated oracle. Owns a completed copy of the target and counts
/// queries.
#[derive(Debug, Clone)]
pub struct Teacher {
    target: Machine,
    stats: QueryStats,
    limits: TeacherLimits,
}

impl Teacher {
    /// Wraps a target machine. The target is totalised with a sink so that
    /// every word has a run (up to visibility for VOCAs): counter values
    /// *freeze* at the point a partial target would have stuck.
    pub fn new(target: Machine, limits: TeacherLimits) -> Teacher {
        Teacher { target: target.complete(), stats: QueryStats::default(), limits }
    }

    /// The completed target. Exposed for verification harnesses; a learner
    /// restricted to queries must not look at it.
    pub fn target(&self) -> &Machine {
        &self.target
    }

    /// The target's alphabet.
    pub fn alphabet(&self) -> &Arc<Alphabet> {
        self.target.alphabet()
    }

    /// The letter partition, when the target is visibly one-counter. The
    /// partition is public knowledge (it is part of the alphabet).
    pub fn partition(&self) -> Option<&[crate::automata::LetterClass]> {
        match &self.target {
            Machine::Droca(_) => None,
            Machine::Voca(m) => Some(m.partition()),
        }
    }

    /// Query counts so far.
    pub fn stats(&self) -> QueryStats {
        self.stats
    }

    /// The equivalence-search budgets.
    pub fn limits(&self) -> TeacherLimits {
        self.limits
    }

    /// Membership query: `1` iff the target accepts `w`.
    pub fn mq(&mut self, w: &[Letter]) -> u8 {
        self.stats.mq += 1;
        let (memb, _) = self.target.observe(w).expect("word over the teacher's alphabet");
        u8::from(memb)
    }

    /// Counter-value query: the counter value the target reaches on `w`,
    /// or `None` when the word has no run (only possible for VOCA targets,
    /// whose completion cannot make invalid words runnable).
    pub fn cv(&mut self, w: &[Letter]) -> Option<u64> {
        self.stats.cv += 1;
        let (_, c) = self.target.observe(w).expect("word over the teacher's alphabet");
        c
    }

    /// Minimal synchronous equivalence query.
    ///
    /// The hypothesis must be over the same alphabet and already completed
    /// with a sink. Words are explored in increasing llex order through the
    /// synchronized product; the first word where membership or counter
    /// values differ is returned. With no mismatch, the verdict is
    /// [`EquivalenceVerdict::Equivalent`] if the search provably closed and
    /// [`EquivalenceVerdict::PresumedEquivalent`] otherwise.
    pub fn msq(&mut self, hypothesis: &Machine) -> Result<EquivalenceVerdict> {
        self.stats.msq += 1;
        let t = self.target.as_droca();
        let h = hypothesis.as_droca();
        if t.alphabet() != h.alphabet() {
            return Err(Error::Input(
                "hypothesis alphabet differs from the teacher's".into(),
            ));
        }
        let complete_enough = match hypothesis {
            Machine::Droca(m) => m.is_complete(),
            Machine::Voca(m) => m.is_visibly_complete(),
        };
        if !complete_enough {
            return Err(Error::Input(
                "hypothesis must be completed with a sink before an equivalence query".into(),
            ));
        }
        if let (Machine::Voca(a), Machine::Voca(b)) = (&self.target, hypothesis) {
            if a.partition() != b.partition() {
                return Err(Error::Input(
                    "hypothesis letter partition differs from the teacher's".into(),
                ));
            }
        }
        let both_voca =
            matches!(&self.target, Machine::Voca(_)) && matches!(hypothesis, Machine::Voca(_));

        // Identical reachable structure short-circuits the search; this is
        // what lets an exactly-learned target with an unbounded counter get
        // a definite verdict.
        if t.canonical_signature() == h.canonical_signature() {
            return Ok(EquivalenceVerdict::Equivalent);
        }

        // Counter cap: the product of counter-synchronous machines is a
        // one-counter system over |Qt|·|Qh| states, plus slack for the two
        // components — a heuristic, made explicit by PresumedEquivalent.
        let counter_cap = u64::from(t.n_states()) * u64::from(h.n_states())
            + u64::from(t.n_states())
            + u64::from(h.n_states());

        #[derive(Clone, Copy)]
        struct Entry {
            qt: State,
            qh: State,
            counter: u64,
            /// Index into the previous level, `u32::MAX` at the root.
            parent: u32,
            letter: Letter,
        }
        let word_of = |levels: &[Vec<Entry>], mut level: usize, mut idx: u32| -> Word {
            let mut out = Vec::with_capacity(level);
            while level > 0 {
                let e = levels[level][idx as usize];
                out.push(e.letter);
                idx = e.parent;
                level -= 1;
            }
            out.reverse();
            out
        };

        if t.is_final(t.initial()) != h.is_final(h.initial()) {
            return Ok(EquivalenceVerdict::Counterexample(
                Vec::new(),
                MismatchKind::Membership,
            ));
        }

        let mut visited: HashSet<(State, State, u64)> = HashSet::new();
        visited.insert((t.initial(), h.initial(), 0));
        let mut levels: Vec<Vec<Entry>> = vec![vec![Entry {
            qt: t.initial(),
            qh: h.initial(),
            counter: 0,
            parent: u32::MAX,
            letter: 0,
        }]];
        // Shortest length at which a branch was cut, if any: words strictly
        // longer are not fully verified.
        let mut cut_at: Option<usize> = None;

        for len in 0..self.limits.max_cex_len {
            let mut next: Vec<Entry> = Vec::new();
            for (idx, e) in levels[len].iter().enumerate() {
                for a in t.alphabet().letters() {
                    let ts = step(t, e.qt, e.counter, a);
                    let hs = step(h, e.qh, e.counter, a);
                    let ((qt2, ct), (qh2, ch)) = match (ts, hs) {
                        (None, None) => continue,
                        (Some((qt2, _)), None) => {
                            assert!(
                                !both_voca,
                                "visibly one-counter machines cannot disagree on run existence"
                            );
                            // Hypothesis side is stuck for good: membership
                            // there is 0 and the counter is ⊥.
                            let mut z = word_of(&levels, len, idx as u32);
                            z.push(a);
                            let kind = if t.is_final(qt2) {
                                MismatchKind::Membership
                            } else {
                                MismatchKind::CounterValue
                            };
                            return Ok(EquivalenceVerdict::Counterexample(z, kind));
                        }
                        (None, Some((qh2, _))) => {
                            assert!(
                                !both_voca,
                                "visibly one-counter machines cannot disagree on run existence"
                            );
                            let mut z = word_of(&levels, len, idx as u32);
                            z.push(a);
                            let kind = if h.is_final(qh2) {
                                MismatchKind::Membership
                            } else {
                                MismatchKind::CounterValue
                            };
                            return Ok(EquivalenceVerdict::Counterexample(z, kind));
                        }
                        (Some(x), Some(y)) => (x, y),
                    };
                    if t.is_final(qt2) != h.is_final(qh2) {
                        let mut z = word_of(&levels, len, idx as u32);
                        z.push(a);
                        return Ok(EquivalenceVerdict::Counterexample(
                            z,
                            MismatchKind::Membership,
                        ));
                    }
                    if ct != ch {
                        let mut z = word_of(&levels, len, idx as u32);
                        z.push(a);
                        return Ok(EquivalenceVerdict::Counterexample(
                            z,
                            MismatchKind::CounterValue,
                        ));
                    }
                    if ct > counter_cap || visited.len() >= self.limits.max_configs {
                        cut_at.get_or_insert(len + 1);
                        continue;
                    }
                    if visited.insert((qt2, qh2, ct)) {
                        next.push(Entry {
                            qt: qt2,
                            qh: qh2,
                            counter: ct,
                            parent: idx as u32,
                            letter: a,
                        });
                    }
                }
            }
            if next.is_empty() {
                return Ok(match cut_at {
                    None => EquivalenceVerdict::Equivalent,
                    Some(c) => EquivalenceVerdict::PresumedEquivalent(c),
                });
            }
            levels.push(next);
        }
        let bound = cut_at.unwrap_or(self.limits.max_cex_len).min(self.limits.max_cex_len);
        Ok(EquivalenceVerdict::PresumedEquivalent(bound))
    }
}

/// One product-compatible step of a machine from `(state, counter)`.
fn step(m: &Droca, q: State, counter: u64, a: Letter) -> Option<(State, u64)> {
    let (to, act) = if counter == 0 { m.zero(q, a) } else { m.pos(q, a) }?;
    Some((to, counter.checked_add_signed(i64::from(act)).expect("counter stays non-negative")))
}

/// Ground-truth comparison by exhaustive enumeration: runs *every* word of
/// length at most `max_len` (in llex order) on both machines and returns the
/// first word whose membership or counter value differs, a missing run
/// counting as counter value `⊥`. Membership takes priority when both
/// differ at the same word.
pub fn brute_force_equiv(
    a: &Machine,
    b: &Machine,
    max_len: usize,
) -> Option<(Word, MismatchKind)> {
    assert_eq!(
        a.alphabet(),
        b.alphabet(),
        "brute-force comparison needs a shared alphabet"
    );
    let k = a.alphabet().len() as Letter;
    for len in 0..=max_len {
        let mut word: Word = vec![0; len];
        loop {
            let (ma, ca) = a.observe(&word).expect("word over the shared alphabet");
            let (mb, cb) = b.observe(&word).expect("word over the shared alphabet");
            if ma != mb {
                return Some((word, MismatchKind::Membership));
            }
            if ca != cb {
                return Some((word, MismatchKind::CounterValue));
            }
            if !next_word_of_same_length(&mut word, k) {
                break;
            }
        }
    }
    None
}

/// Steps a fixed-length word to its lexicographic successor; false once
/// the last word (all letters maximal) wraps.
fn next_word_of_same_length(word: &mut [Letter], k: Letter) -> bool {
    for i in (0..word.len()).rev() {
        if word[i] + 1 < k {
            word[i] += 1;
            for x in &mut word[i + 1..] {
                *x = 0;
            }
            return true;
        }
    }
    false
}
