//! Machine models: DFA, DROCA, VOCA, and their run semantics.
//!
//! A deterministic real-time one-counter automaton ([`Droca`]) extends a DFA
//! with a single non-negative counter. Each transition carries a counter
//! action in `{-1, 0, +1}`; which transition table applies depends on whether
//! the current counter is zero (`delta0`, whose actions are restricted to
//! `{0, +1}`) or positive (`delta1`).
//!
//! Transition maps may be partial. A run that reaches an undefined
//! transition is *stuck*; stuck words are rejected and have no counter
//! effect. A visibly one-counter automaton ([`Voca`]) is a DROCA whose
//! alphabet is partitioned into call/return/internal letters fixing every
//! counter action (+1/−1/0), with no zero-level transitions on return
//! letters (those would drive the counter negative).

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::alphabet::{Alphabet, Letter};
use crate::{Error, Result};

/// A control-state id. States are dense indices `0..n_states`.
pub type State = u32;

/// A counter action: one of `-1`, `0`, `+1`.
pub type CounterAction = i8;

/// A configuration: control state plus counter value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Configuration {
    /// Current control state.
    pub state: State,
    /// Current counter value (never negative).
    pub counter: u64,
}

/// The outcome of running a word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunResult {
    /// The run exists: one configuration per prefix, starting with the
    /// initial configuration (so the sequence has `|w| + 1` entries).
    Completed(Vec<Configuration>),
    /// The run hit an undefined transition while reading the letter at this
    /// 0-based position.
    Stuck(usize),
}

impl RunResult {
    /// The final configuration of a completed run.
    pub fn last(&self) -> Option<Configuration> {
        match self {
            RunResult::Completed(cs) => cs.last().copied(),
            RunResult::Stuck(_) => None,
        }
    }
}

/// A deterministic finite automaton with a possibly partial transition map.
///
/// A missing transition is an implicit rejection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    alphabet: Arc<Alphabet>,
    n_states: u32,
    /// Row-major `(state, letter) → state` table.
    delta: Vec<Option<State>>,
    initial: State,
    finals: Vec<bool>,
}

impl Dfa {
    /// A DFA with `n_states` states and no transitions.
    pub fn empty(alphabet: Arc<Alphabet>, n_states: u32, initial: State) -> Result<Dfa> {
        if n_states == 0 || initial >= n_states {
            return Err(Error::Input(format!(
                "initial state {initial} outside 0..{n_states}"
            )));
        }
        let k = alphabet.len();
        Ok(Dfa {
            alphabet,
            n_states,
            delta: vec![None; n_states as usize * k],
            initial,
            finals: vec![false; n_states as usize],
        })
    }

    fn slot(&self, q: State, a: Letter) -> usize {
        q as usize * self.alphabet.len() + a as usize
    }

    /// The alphabet.
    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    /// Number of states.
    pub fn n_states(&self) -> u32 {
        self.n_states
    }

    /// The initial state.
    pub fn initial(&self) -> State {
        self.initial
    }

    /// Whether `q` is accepting.
    pub fn is_final(&self, q: State) -> bool {
        self.finals[q as usize]
    }

    /// Marks or unmarks `q` as accepting.
    pub fn set_final(&mut self, q: State, f: bool) {
        self.finals[q as usize] = f;
    }

    /// The transition from `q` on `a`, if defined.
    pub fn next(&self, q: State, a: Letter) -> Option<State> {
        self.delta[self.slot(q, a)]
    }

    /// Defines the transition from `q` on `a`.
    pub fn set_next(&mut self, q: State, a: Letter, to: State) -> Result<()> {
        if q >= self.n_states || to >= self.n_states {
            return Err(Error::Input(format!(
                "transition {q} -{a}-> {to} references a state outside 0..{}",
                self.n_states
            )));
        }
        let s = self.slot(q, a);
        self.delta[s] = Some(to);
        Ok(())
    }

    /// Removes the transition from `q` on `a`.
    pub fn clear_next(&mut self, q: State, a: Letter) {
        let s = self.slot(q, a);
        self.delta[s] = None;
    }

    /// The state reached from the initial state on `w`, if every transition
    /// along the way is defined.
    pub fn run(&self, w: &[Letter]) -> Option<State> {
        let mut q = self.initial;
        for &a in w {
            q = self.next(q, a)?;
        }
        Some(q)
    }

    /// True iff `w` completes its run in an accepting state.
    pub fn accepts(&self, w: &[Letter]) -> bool {
        self.run(w).is_some_and(|q| self.is_final(q))
    }

    /// All accepting states, ascending.
    pub fn final_states(&self) -> Vec<State> {
        (0..self.n_states).filter(|&q| self.is_final(q)).collect()
    }
}

/// A deterministic real-time one-counter automaton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Droca {
    alphabet: Arc<Alphabet>,
    n_states: u32,
    /// `(state, letter) → (state, action)` used when the counter is zero;
    /// actions restricted to `{0, +1}`.
    delta0: Vec<Option<(State, CounterAction)>>,
    /// `(state, letter) → (state, action)` used when the counter is
    /// positive; actions in `{-1, 0, +1}`.
    delta1: Vec<Option<(State, CounterAction)>>,
    initial: State,
    finals: Vec<bool>,
}

impl Droca {
    /// A DROCA with `n_states` states and no transitions.
    pub fn empty(alphabet: Arc<Alphabet>, n_states: u32, initial: State) -> Result<Droca> {
        if n_states == 0 || initial >= n_states {
            return Err(Error::Input(format!(
                "initial state {initial} outside 0..{n_states}"
            )));
        }
        let k = alphabet.len();
        Ok(Droca {
            alphabet,
            n_states,
            delta0: vec![None; n_states as usize * k],
            delta1: vec![None; n_states as usize * k],
            initial,
            finals: vec![false; n_states as usize],
        })
    }

    fn slot(&self, q: State, a: Letter) -> usize {
        q as usize * self.alphabet.len() + a as usize
    }

    fn check_edge(&self, q: State, to: State, act: CounterAction, zero: bool) -> Result<()> {
        if q >= self.n_states || to >= self.n_states {
            return Err(Error::Input(format!(
                "transition {q} -> {to} references a state outside 0..{}",
                self.n_states
            )));
        }
        let ok = if zero { (0..=1).contains(&act) } else { (-1..=1).contains(&act) };
        if !ok {
            return Err(Error::Input(format!(
                "counter action {act} not allowed in the {} table",
                if zero { "zero-level" } else { "positive-level" }
            )));
        }
        Ok(())
    }

    /// The alphabet.
    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    /// Number of states.
    pub fn n_states(&self) -> u32 {
        self.n_states
    }

    /// The initial state.
    pub fn initial(&self) -> State {
        self.initial
    }

    /// Whether `q` is accepting.
    pub fn is_final(&self, q: State) -> bool {
        self.finals[q as usize]
    }

    /// Marks or unmarks `q` as accepting.
    pub fn set_final(&mut self, q: State, f: bool) {
        self.finals[q as usize] = f;
    }

    /// All accepting states, ascending.
    pub fn final_states(&self) -> Vec<State> {
        (0..self.n_states).filter(|&q| self.is_final(q)).collect()
    }

    /// The zero-level transition from `q` on `a`.
    pub fn zero(&self, q: State, a: Letter) -> Option<(State, CounterAction)> {
        self.delta0[self.slot(q, a)]
    }

    /// The positive-level transition from `q` on `a`.
    pub fn pos(&self, q: State, a: Letter) -> Option<(State, CounterAction)> {
        self.delta1[self.slot(q, a)]
    }

    /// Defines the zero-level transition from `q` on `a`. The action must be
    /// `0` or `+1` (a decrement from counter zero is impossible).
    pub fn set_zero(&mut self, q: State, a: Letter, to: State, act: CounterAction) -> Result<()> {
        self.check_edge(q, to, act, true)?;
        let s = self.slot(q, a);
        self.delta0[s] = Some((to, act));
        Ok(())
    }

    /// Defines the positive-level transition from `q` on `a`.
    pub fn set_pos(&mut self, q: State, a: Letter, to: State, act: CounterAction) -> Result<()> {
        self.check_edge(q, to, act, false)?;
        let s = self.slot(q, a);
        self.delta1[s] = Some((to, act));
        Ok(())
    }

    /// One transition step from a configuration, if defined.
    pub fn step(&self, c: Configuration, a: Letter) -> Option<Configuration> {
        let table = if c.counter == 0 { &self.delta0 } else { &self.delta1 };
        let (to, act) = table[self.slot(c.state, a)]?;
        let counter = c.counter.checked_add_signed(act as i64).expect("counter stays non-negative");
        Some(Configuration { state: to, counter })
    }

    /// The initial configuration `(initial, 0)`.
    pub fn start(&self) -> Configuration {
        Configuration { state: self.initial, counter: 0 }
    }

    /// Runs `w` from the initial configuration.
    ///
    /// Returns the full configuration sequence (one entry per prefix) or the
    /// position of the first letter whose transition is undefined.
    pub fn run(&self, w: &[Letter]) -> Result<RunResult> {
        self.alphabet.check_word(w)?;
        let mut configs = Vec::with_capacity(w.len() + 1);
        let mut c = self.start();
        configs.push(c);
        for (i, &a) in w.iter().enumerate() {
            match self.step(c, a) {
                Some(next) => {
                    c = next;
                    configs.push(c);
                }
                None => return Ok(RunResult::Stuck(i)),
            }
        }
        Ok(RunResult::Completed(configs))
    }

    /// True iff the run of `w` completes in an accepting state. Stuck runs
    /// are rejections.
    pub fn accepts(&self, w: &[Letter]) -> Result<bool> {
        Ok(match self.run(w)? {
            RunResult::Completed(cs) => self.is_final(cs.last().unwrap().state),
            RunResult::Stuck(_) => false,
        })
    }

    /// The counter effect of `w`: the final counter value of a completed
    /// run, or `None` for a stuck run.
    pub fn counter_effect(&self, w: &[Letter]) -> Result<Option<u64>> {
        Ok(self.run(w)?.last().map(|c| c.counter))
    }

    /// True iff both transition tables are total.
    pub fn is_complete(&self) -> bool {
        self.delta0.iter().all(Option::is_some) && self.delta1.iter().all(Option::is_some)
    }

    /// The set of control states reachable from the initial configuration,
    /// never expanding configurations whose counter exceeds `counter_cutoff`.
    ///
    /// The configuration space is infinite; the cutoff (callers typically
    /// pass twice the state count) is a documented desk-scale heuristic for
    /// control-state reachability, which saturates quickly in practice.
    pub fn reachable_states(&self, counter_cutoff: u64) -> Result<BTreeSet<State>> {
        if counter_cutoff < 1 {
            return Err(Error::Input("counter cutoff must be at least 1".into()));
        }
        let mut seen_states = BTreeSet::new();
        let mut seen_cfg = std::collections::HashSet::new();
        let mut queue = std::collections::VecDeque::new();
        let start = self.start();
        seen_states.insert(start.state);
        seen_cfg.insert(start);
        queue.push_back(start);
        while let Some(c) = queue.pop_front() {
            if c.counter > counter_cutoff {
                continue;
            }
            for a in self.alphabet.letters() {
                if let Some(next) = self.step(c, a) {
                    seen_states.insert(next.state);
                    if next.counter <= counter_cutoff && seen_cfg.insert(next) {
                        queue.push_back(next);
                    }
                }
            }
        }
        Ok(seen_states)
    }

    /// Totalises the machine by adding one fresh non-final sink state:
    /// every undefined `(state, letter)` entry in both tables is redirected
    /// to the sink with counter action `0`, and the sink self-loops on every
    /// letter with action `0`. Previously defined runs are unchanged.
    pub fn complete_with_sink(&self) -> Droca {
        let mut out = Droca::empty(self.alphabet.clone(), self.n_states + 1, self.initial)
            .expect("state count grows");
        let sink = self.n_states;
        for q in 0..self.n_states {
            out.set_final(q, self.is_final(q));
            for a in self.alphabet.letters() {
                let (t0, e0) = self.zero(q, a).unwrap_or((sink, 0));
                let (t1, e1) = self.pos(q, a).unwrap_or((sink, 0));
                out.set_zero(q, a, t0, e0).expect("valid edge");
                out.set_pos(q, a, t1, e1).expect("valid edge");
            }
        }
        for a in self.alphabet.letters() {
            out.set_zero(sink, a, sink, 0).expect("valid edge");
            out.set_pos(sink, a, sink, 0).expect("valid edge");
        }
        out
    }

    /// A canonical renaming-invariant signature of the part of the machine
    /// reachable in the transition graph (ignoring counter semantics).
    ///
    /// Two machines with equal signatures are isomorphic on their reachable
    /// parts and therefore accept the same language with the same counter
    /// effects. Used as a sound (not complete) fast path by equivalence
    /// checks.
    pub fn canonical_signature(&self) -> CanonicalSignature {
        let mut order: Vec<Option<u32>> = vec![None; self.n_states as usize];
        let mut next_id = 0u32;
        let mut queue = std::collections::VecDeque::new();
        order[self.initial as usize] = Some(next_id);
        next_id += 1;
        queue.push_back(self.initial);
        let mut edges = Vec::new();
        let mut finals = Vec::new();
        while let Some(q) = queue.pop_front() {
            finals.push(self.is_final(q));
            // Edge order is fixed (per letter: zero-level then positive-level),
            // so the flat edge list is comparable across machines.
            for a in self.alphabet.letters() {
                for t in [self.zero(q, a), self.pos(q, a)] {
                    match t {
                        None => edges.push(None),
                        Some((to, act)) => {
                            let id = match order[to as usize] {
                                Some(id) => id,
                                None => {
                                    let id = next_id;
                                    order[to as usize] = Some(id);
                                    next_id += 1;
                                    queue.push_back(to);
                                    id
                                }
                            };
                            edges.push(Some((id, act)));
                        }
                    }
                }
            }
        }
        CanonicalSignature { n_reachable: next_id, edges, finals }
    }
}

/// See [`Droca::canonical_signature`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalSignature {
    n_reachable: u32,
    edges: Vec<Option<(u32, CounterAction)>>,
    finals: Vec<bool>,
}

/// The class of a letter in a visibly one-counter alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LetterClass {
    /// Pushes the counter: action `+1`.
    Call,
    /// Pops the counter: action `-1`.
    Ret,
    /// Leaves the counter unchanged: action `0`.
    Int,
}

impl LetterClass {
    /// The counter action this class forces on every transition.
    pub fn action(self) -> CounterAction {
        match self {
            LetterClass::Call => 1,
            LetterClass::Ret => -1,
            LetterClass::Int => 0,
        }
    }
}

/// The counter effect of one letter under a partition: `+1` for call
/// letters, `-1` for return letters, `0` for internal letters.
pub fn voca_letter_effect(partition: &[LetterClass], a: Letter) -> Result<CounterAction> {
    partition
        .get(a as usize)
        .map(|c| c.action())
        .ok_or_else(|| Error::Input(format!("letter {a} is not classified by the partition")))
}

/// A visibly one-counter automaton: a DROCA whose letter partition fixes
/// every counter action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Voca {
    base: Droca,
    partition: Vec<LetterClass>,
}

impl Voca {
    /// Wraps a DROCA and a letter partition, validating that:
    ///
    /// * every letter is classified exactly once (the partition covers the
    ///   alphabet);
    /// * every transition's action matches its letter's class, in both
    ///   tables;
    /// * no zero-level transition exists on a return letter (it would drive
    ///   the counter negative).
    pub fn new(base: Droca, partition: Vec<LetterClass>) -> Result<Voca> {
        let k = base.alphabet().len();
        if partition.len() != k {
            return Err(Error::Input(format!(
                "partition classifies {} letters but the alphabet has {k}",
                partition.len()
            )));
        }
        for q in 0..base.n_states() {
            for a in base.alphabet().letters() {
                let want = partition[a as usize].action();
                if let Some((_, act)) = base.zero(q, a) {
                    if partition[a as usize] == LetterClass::Ret {
                        return Err(Error::Input(format!(
                            "zero-level transition on return letter {}",
                            base.alphabet().name(a)
                        )));
                    }
                    if act != want {
                        return Err(Error::Input(format!(
                            "zero-level action {act} on letter {} contradicts its class",
                            base.alphabet().name(a)
                        )));
                    }
                }
                if let Some((_, act)) = base.pos(q, a) {
                    if act != want {
                        return Err(Error::Input(format!(
                            "positive-level action {act} on letter {} contradicts its class",
                            base.alphabet().name(a)
                        )));
                    }
                }
            }
        }
        Ok(Voca { base, partition })
    }

    /// The underlying DROCA (runs, acceptance, and counter effects are
    /// inherited from it unchanged).
    pub fn base(&self) -> &Droca {
        &self.base
    }

    /// The letter partition.
    pub fn partition(&self) -> &[LetterClass] {
        &self.partition
    }

    /// Consumes the wrapper.
    pub fn into_base(self) -> Droca {
        self.base
    }

    /// The counter effect of a word as forced by the partition alone, or
    /// `None` if the word has no valid run in *any* machine over this
    /// partition (its running sum dips below zero).
    pub fn partition_effect(&self, w: &[Letter]) -> Result<Option<u64>> {
        self.base.alphabet().check_word(w)?;
        let mut c: i64 = 0;
        for &a in w {
            c += voca_letter_effect(&self.partition, a)? as i64;
            if c < 0 {
                return Ok(None);
            }
        }
        Ok(Some(c as u64))
    }

    /// Totalises the machine while respecting visibility: missing
    /// transitions go to a fresh non-final sink with the letter's forced
    /// action, except that zero-level entries on return letters stay
    /// undefined (those words have no valid run by definition).
    pub fn complete_with_sink(&self) -> Voca {
        let base = &self.base;
        let mut out = Droca::empty(base.alphabet().clone(), base.n_states() + 1, base.initial())
            .expect("state count grows");
        let sink = base.n_states();
        for q in 0..=sink {
            if q < sink {
                out.set_final(q, base.is_final(q));
            }
            for a in base.alphabet().letters() {
                let class = self.partition[a as usize];
                let act = class.action();
                if class != LetterClass::Ret {
                    let (t0, e0) = if q < sink { base.zero(q, a).unwrap_or((sink, act)) } else { (sink, act) };
                    out.set_zero(q, a, t0, e0).expect("valid edge");
                }
                let (t1, e1) = if q < sink { base.pos(q, a).unwrap_or((sink, act)) } else { (sink, act) };
                out.set_pos(q, a, t1, e1).expect("valid edge");
            }
        }
        Voca { base: out, partition: self.partition.clone() }
    }

    /// True iff the machine is as complete as visibility allows: both tables
    /// total except zero-level entries on return letters.
    pub fn is_visibly_complete(&self) -> bool {
        let base = &self.base;
        for q in 0..base.n_states() {
            for a in base.alphabet().letters() {
                if self.partition[a as usize] != LetterClass::Ret && base.zero(q, a).is_none() {
                    return false;
                }
                if base.pos(q, a).is_none() {
                    return false;
                }
            }
        }
        true
    }
}

/// Small machines used in documentation, examples, and tests.
pub mod demo {
    use super::*;

    /// A 3-state DROCA over `{a, b}` recognising `{aⁿbᵐ | m > n}`.
    ///
    /// State 0 counts `a`s up; `b`s either pop the counter (state 1) or,
    /// once at zero, move through accepting state 2, which absorbs further
    /// `b`s at zero level. Unlisted transitions are stuck (equivalently: go
    /// to a non-final sink with action `0` after [`Droca::complete_with_sink`]).
    pub fn strict_excess_droca() -> Droca {
        let alpha = Alphabet::latin(2).unwrap().into_arc();
        let (a, b) = (0, 1);
        let mut m = Droca::empty(alpha, 3, 0).unwrap();
        m.set_final(2, true);
        m.set_zero(0, a, 0, 1).unwrap();
        m.set_pos(0, a, 0, 1).unwrap();
        m.set_zero(0, b, 2, 0).unwrap();
        m.set_pos(0, b, 1, -1).unwrap();
        m.set_pos(1, b, 1, -1).unwrap();
        m.set_zero(1, b, 2, 0).unwrap();
        m.set_zero(2, b, 2, 0).unwrap();
        m
    }

    /// A 2-state VOCA over `{a, b}` with `a` a call letter and `b` a return
    /// letter, recognising `{aⁿbᵐ | 1 ≤ m ≤ n}` (words whose running
    /// counter dips below zero have no valid run and are rejected).
    pub fn matched_descent_voca() -> Voca {
        let alpha = Alphabet::latin(2).unwrap().into_arc();
        let (a, b) = (0, 1);
        let mut m = Droca::empty(alpha, 2, 0).unwrap();
        m.set_final(1, true);
        m.set_zero(0, a, 0, 1).unwrap();
        m.set_pos(0, a, 0, 1).unwrap();
        m.set_pos(0, b, 1, -1).unwrap();
        m.set_pos(1, b, 1, -1).unwrap();
        Voca::new(m, vec![LetterClass::Call, LetterClass::Ret]).unwrap()
    }
}
