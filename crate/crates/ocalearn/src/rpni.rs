//! RPNI: passive DFA learning by evidence-driven state merging.
//!
//! The algorithm builds a prefix tree acceptor (PTA) from the positive
//! words, then considers prefix pairs `(u, v)` with `v <llex u` in
//! increasing length-lexicographic pair order, merging the states currently
//! reached by `u` and `v` whenever the merged automaton stays consistent
//! with the full sample (positives accepted, negatives rejected). Merging
//! folds subtrees recursively to restore determinism. Only the positive
//! prefix tree contributes transitions; negative words act purely as
//! constraints on acceptance.
//!
//! Two interchangeable implementations live here:
//!
//! * [`rpni`] — the production path. The PTA carries a union-find overlay
//!   whose merges are speculative (a trail allows rollback). Negative words
//!   are threaded through the structure as *ghost* chains: a ghost edge
//!   never becomes a transition and never forces a fold on its own, but the
//!   moment a real transition appears on its slot the ghost target folds
//!   into the real successor, carrying the negative's rejection constraint
//!   along the run it now continues. A merge is consistent exactly when no
//!   class ends up holding both an accepting and a rejecting word.
//! * [`rpni_reference`] — a direct transcription of the textbook loop
//!   (materialise the pair list, merge, re-check the whole sample).
//!   Quadratic in every direction; kept as the differential-testing oracle
//!   for the engine. `tests::engine_matches_reference` checks the two agree
//!   on randomised samples.

use std::collections::HashMap;
use std::sync::Arc;

use crate::alphabet::{llex_compare, llex_pair_compare, Alphabet, Letter, Word};
use crate::automata::{Dfa, State};
use crate::samples::{prefixes, SampleSet};

/// A prefix tree acceptor: a tree-shaped DFA accepting exactly the positive
/// words, with states named by the prefixes they spell.
#[derive(Debug, Clone)]
pub struct PrefixTreeAcceptor {
    /// The tree as a DFA. States are numbered in llex order of their
    /// representatives, so the root ε is state 0.
    pub dfa: Dfa,
    /// `representative[q]` is the unique prefix spelling state `q`.
    pub representative: Vec<Word>,
}

/// Builds the prefix tree acceptor of a positive word set.
///
/// With no positive words at all the PTA degenerates to a single non-final
/// root (the prefix set of the empty language is empty, but a DFA needs an
/// initial state).
pub fn build_pta(positives: &[Word], alphabet: &Arc<Alphabet>) -> PrefixTreeAcceptor {
    let mut prefs = prefixes(positives.iter());
    if prefs.is_empty() {
        prefs.push(Vec::new());
    }
    let index: HashMap<&[Letter], State> =
        prefs.iter().enumerate().map(|(i, w)| (w.as_slice(), i as State)).collect();
    let mut dfa = Dfa::empty(alphabet.clone(), prefs.len() as u32, 0).expect("non-empty PTA");
    for (i, w) in prefs.iter().enumerate() {
        if !w.is_empty() {
            let parent = index[&w[..w.len() - 1]];
            dfa.set_next(parent, w[w.len() - 1], i as State).expect("tree edge");
        }
    }
    for p in positives {
        dfa.set_final(index[p.as_slice()], true);
    }
    PrefixTreeAcceptor { dfa, representative: prefs }
}

/// True iff the DFA accepts every positive and rejects every negative
/// (a missing transition rejects).
pub fn consistent_with(dfa: &Dfa, sample: &SampleSet) -> bool {
    sample.positives().iter().all(|w| dfa.accepts(w))
        && !sample.negatives().iter().any(|w| dfa.accepts(w))
}

/// Merges `target` into `survivor` and recursively folds their subtrees
/// until the automaton is deterministic again.
///
/// The merged state is final iff either constituent was. States that vanish
/// are removed and the remainder renumbered ascending by smallest original
/// member, so the result's state count drops by the number of folds
/// performed. Merging a state with itself returns the automaton unchanged.
pub fn merge(dfa: &Dfa, target: State, survivor: State) -> Dfa {
    let n = dfa.n_states() as usize;
    let alphabet = dfa.alphabet();
    let k = alphabet.len();

    // Local union-find over the original states; path compression is fine
    // here because nothing is ever rolled back.
    let mut parent: Vec<State> = (0..n as State).collect();
    fn find(parent: &mut [State], mut x: State) -> State {
        while parent[x as usize] != x {
            let up = parent[parent[x as usize] as usize];
            parent[x as usize] = up;
            x = up;
        }
        x
    }

    // Class-level successor table, folded to closure. The smaller id always
    // stays the root so the final renumbering is stable.
    let mut out: Vec<Option<State>> = dfa_rows(dfa);
    let mut stack = vec![(target, survivor)];
    while let Some((x, y)) = stack.pop() {
        let rx = find(&mut parent, x);
        let ry = find(&mut parent, y);
        if rx == ry {
            continue;
        }
        let (root, gone) = if rx < ry { (rx, ry) } else { (ry, rx) };
        parent[gone as usize] = root;
        for a in 0..k {
            match (out[root as usize * k + a], out[gone as usize * k + a]) {
                (None, Some(t)) => out[root as usize * k + a] = Some(t),
                (Some(t1), Some(t2)) => stack.push((t1, t2)),
                _ => {}
            }
        }
    }

    let mut new_id: Vec<Option<State>> = vec![None; n];
    let mut count = 0u32;
    for q in 0..n as State {
        if find(&mut parent, q) == q {
            new_id[q as usize] = Some(count);
            count += 1;
        }
    }
    let init_class = find(&mut parent, dfa.initial());
    let mut merged = Dfa::empty(alphabet.clone(), count, new_id[init_class as usize].unwrap())
        .expect("at least one class");
    for q in 0..n as State {
        let root = find(&mut parent, q);
        let id = new_id[root as usize].unwrap();
        if dfa.is_final(q) {
            merged.set_final(id, true);
        }
        for a in 0..k {
            if let Some(t) = out[root as usize * k + a] {
                let tid = new_id[find(&mut parent, t) as usize].unwrap();
                merged.set_next(id, a as Letter, tid).expect("valid edge");
            }
        }
    }
    merged
}

fn dfa_rows(dfa: &Dfa) -> Vec<Option<State>> {
    let k = dfa.alphabet().len();
    let mut rows = vec![None; dfa.n_states() as usize * k];
    for q in 0..dfa.n_states() {
        for a in dfa.alphabet().letters() {
            rows[q as usize * k + a as usize] = dfa.next(q, a);
        }
    }
    rows
}

/// RPNI, literal transcription: materialise the sorted pair list, and for
/// each pair in order rebuild the merged DFA and re-check the whole sample.
///
/// Quadratic in every direction (the pair list alone is |pref(S+)|²), so it
/// is only suitable for test-sized inputs; it exists as the
/// differential-testing oracle for [`rpni`]. The two functions agree on
/// every input.
pub fn rpni_reference(sample: &SampleSet, alphabet: &Arc<Alphabet>) -> Dfa {
    let pta = build_pta(sample.positives(), alphabet);
    let prefs = &pta.representative;
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for u in 0..prefs.len() {
        for v in 0..prefs.len() {
            if llex_compare(&prefs[v], &prefs[u]) == std::cmp::Ordering::Less {
                pairs.push((u, v));
            }
        }
    }
    pairs.sort_by(|&(u1, v1), &(u2, v2)| {
        llex_pair_compare((&prefs[u1], &prefs[v1]), (&prefs[u2], &prefs[v2]))
    });

    let mut d = pta.dfa;
    for (u, v) in pairs {
        // Evaluate D(u), D(v) in the *current* automaton. Folding preserves
        // the paths of positive prefixes, so these runs stay defined; the
        // guard is defensive totality.
        let (Some(qu), Some(qv)) = (d.run(&prefs[u]), d.run(&prefs[v])) else {
            continue;
        };
        if qu == qv {
            continue;
        }
        let candidate = merge(&d, qu, qv);
        if consistent_with(&candidate, sample) {
            d = candidate;
        }
    }
    d
}

const NONE: u32 = u32::MAX;
const ACCEPT: u8 = 1;
const REJECT: u8 = 2;
const REAL: u8 = 4;

/// The speculative-merge engine: the positive prefix tree plus ghost chains
/// for negatives, under a union-find overlay with rollback.
struct Engine {
    k: usize,
    parent: Vec<u32>,
    size: Vec<u32>,
    /// Bit flags, authoritative at class roots. `REAL` marks classes
    /// containing at least one positive-prefix node.
    label: Vec<u8>,
    /// Real successor table (`n_nodes × k`), authoritative at roots; entries
    /// are node ids (resolve with `find` before use). Only positive-tree
    /// edges and their folds ever appear here.
    out: Vec<u32>,
    /// Ghost successors waiting per `(root, letter)`. Invariant: a pending
    /// list is non-empty only while the matching `out` slot is `NONE`; the
    /// moment the slot gains a real target the list drains by folding every
    /// waiting ghost into that target.
    pending: Vec<Vec<u32>>,
    trail: Vec<TrailOp>,
}

enum TrailOp {
    Union { child: u32, parent: u32, old_label: u8 },
    SetOut { node: u32, letter: usize },
    PendingDrained { node: u32, letter: usize, items: Vec<u32> },
    PendingMoved { child: u32, root: u32, letter: usize, count: usize },
}

impl Engine {
    fn new(k: usize) -> Engine {
        Engine {
            k,
            parent: Vec::new(),
            size: Vec::new(),
            label: Vec::new(),
            out: Vec::new(),
            pending: Vec::new(),
            trail: Vec::new(),
        }
    }

    fn add_node(&mut self, label: u8) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        self.size.push(1);
        self.label.push(label);
        self.out.extend(std::iter::repeat_n(NONE, self.k));
        self.pending.extend(std::iter::repeat_with(Vec::new).take(self.k));
        id
    }

    /// Root lookup. No path compression — compression would break rollback —
    /// but union-by-size keeps chains logarithmic.
    fn find(&self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            x = self.parent[x as usize];
        }
        x
    }

    /// Speculatively merges the classes of `a` and `b`, folding successors
    /// and draining ghost lists whose slots gain real targets. On a label
    /// conflict (a class would hold both an accepting and a rejecting word)
    /// every change is rolled back and `false` is returned.
    fn try_merge(&mut self, a: u32, b: u32) -> bool {
        let snap = self.trail.len();
        let mut stack = vec![(a, b)];
        while let Some((x, y)) = stack.pop() {
            let rx = self.find(x);
            let ry = self.find(y);
            if rx == ry {
                continue;
            }
            let combined = self.label[rx as usize] | self.label[ry as usize];
            if combined & ACCEPT != 0 && combined & REJECT != 0 {
                self.rollback(snap);
                return false;
            }
            let (child, root) = if self.size[rx as usize] <= self.size[ry as usize] {
                (rx, ry)
            } else {
                (ry, rx)
            };
            self.trail.push(TrailOp::Union {
                child,
                parent: root,
                old_label: self.label[root as usize],
            });
            self.parent[child as usize] = root;
            self.size[root as usize] += self.size[child as usize];
            self.label[root as usize] = combined;
            for letter in 0..self.k {
                let c_slot = child as usize * self.k + letter;
                let r_slot = root as usize * self.k + letter;
                match (self.out[c_slot], self.out[r_slot]) {
                    (NONE, NONE) => {
                        // Neither side has a real edge: ghost lists just pool.
                        if !self.pending[c_slot].is_empty() {
                            let moved = std::mem::take(&mut self.pending[c_slot]);
                            let count = moved.len();
                            self.pending[r_slot].extend(moved);
                            self.trail.push(TrailOp::PendingMoved { child, root, letter, count });
                        }
                    }
                    (c_real, NONE) => {
                        // The child brings a real edge; the root's waiting
                        // ghosts now continue their runs through it.
                        self.trail.push(TrailOp::SetOut { node: root, letter });
                        self.out[r_slot] = c_real;
                        if !self.pending[r_slot].is_empty() {
                            let items = std::mem::take(&mut self.pending[r_slot]);
                            for &g in &items {
                                stack.push((c_real, g));
                            }
                            self.trail.push(TrailOp::PendingDrained { node: root, letter, items });
                        }
                    }
                    (NONE, r_real) => {
                        // The root already has a real edge; the child's
                        // ghosts fold into its target.
                        if !self.pending[c_slot].is_empty() {
                            let items = std::mem::take(&mut self.pending[c_slot]);
                            for &g in &items {
                                stack.push((r_real, g));
                            }
                            self.trail.push(TrailOp::PendingDrained { node: child, letter, items });
                        }
                    }
                    (c_real, r_real) => {
                        // Determinism fold; both pending lists are empty by
                        // the invariant.
                        stack.push((r_real, c_real));
                    }
                }
            }
        }
        true
    }

    fn rollback(&mut self, snap: usize) {
        while self.trail.len() > snap {
            match self.trail.pop().unwrap() {
                TrailOp::Union { child, parent, old_label } => {
                    self.parent[child as usize] = child;
                    self.size[parent as usize] -= self.size[child as usize];
                    self.label[parent as usize] = old_label;
                }
                TrailOp::SetOut { node, letter } => {
                    self.out[node as usize * self.k + letter] = NONE;
                }
                TrailOp::PendingDrained { node, letter, items } => {
                    self.pending[node as usize * self.k + letter] = items;
                }
                TrailOp::PendingMoved { child, root, letter, count } => {
                    let r_slot = root as usize * self.k + letter;
                    let keep = self.pending[r_slot].len() - count;
                    let moved = self.pending[r_slot].split_off(keep);
                    self.pending[child as usize * self.k + letter] = moved;
                }
            }
        }
    }
}

/// Builds the engine's starting position from a sample: the positive prefix
/// tree plus ghost chains for the negatives. Returns the engine and the
/// llex-sorted positive prefixes (node `i` represents `pos_prefs[i]`).
fn seed_engine(sample: &SampleSet, alphabet: &Arc<Alphabet>) -> (Engine, Vec<Word>) {
    let k = alphabet.len();
    let mut engine = Engine::new(k);

    // Nodes 0..P-1: pref(S+) in llex order — mirroring the PTA numbering —
    // so the pair loop can address them by llex rank. The root is created
    // even when there are no positives.
    let mut pos_prefs = prefixes(sample.positives().iter());
    if pos_prefs.is_empty() {
        pos_prefs.push(Vec::new());
    }
    let mut node_of: HashMap<Word, u32> = HashMap::new();
    for w in &pos_prefs {
        let id = engine.add_node(REAL);
        if !w.is_empty() {
            let parent = node_of[&w[..w.len() - 1]];
            engine.out[parent as usize * k + w[w.len() - 1] as usize] = id;
        }
        node_of.insert(w.clone(), id);
    }
    for w in sample.positives() {
        engine.label[node_of[w] as usize] |= ACCEPT;
    }

    // Negatives walk the real tree as far as it carries them, then continue
    // as ghost chains: the first off-tree step parks a ghost node in the
    // parent's pending list, and the rest of the word extends the ghost
    // subtree. Shared dead prefixes share chain nodes — two runs leaving
    // the same state carry identical continuations, so pooling them is
    // exact, not an approximation.
    for w in sample.negatives() {
        let mut cur = node_of[&Vec::new()];
        let mut ghostly = false;
        for (i, &letter) in w.iter().enumerate() {
            let next = if ghostly {
                NONE
            } else {
                engine.out[cur as usize * k + letter as usize]
            };
            cur = if next == NONE {
                match node_of.get(&w[..=i]) {
                    Some(&g) => g,
                    None => {
                        let fresh = engine.add_node(0);
                        engine.pending[cur as usize * k + letter as usize].push(fresh);
                        node_of.insert(w[..=i].to_vec(), fresh);
                        fresh
                    }
                }
            } else {
                next
            };
            ghostly = ghostly || next == NONE;
        }
        engine.label[cur as usize] |= REJECT;
    }

    (engine, pos_prefs)
}

/// RPNI over a consistent sample (consistency is enforced by
/// [`SampleSet`]'s constructor, so no error path remains here). Every word
/// must be over the given alphabet.
///
/// Deterministic: a pure function of the sample and the alphabet order.
/// The output accepts every positive and rejects every negative.
pub fn rpni(sample: &SampleSet, alphabet: &Arc<Alphabet>) -> Dfa {
    let (mut engine, pos_prefs) = seed_engine(sample, alphabet);

    // Pair loop in increasing llex pair order. Established classes are kept
    // as a "red" list in creation order (= llex order of their minimal
    // representatives); trying each red class once per prefix visits the
    // same merge attempts as the full `v <llex u` loop, because additional
    // prefixes in an already-tried class make the attempt an identity merge.
    let p = pos_prefs.len();
    let mut red: Vec<u32> = vec![0];
    for u in 1..p {
        let mut merged_away = false;
        for &r in &red {
            let ru = engine.find(u as u32);
            let rv = engine.find(r);
            if ru == rv {
                merged_away = true;
                break;
            }
            if engine.try_merge(ru, rv) {
                merged_away = true;
                break;
            }
        }
        if !merged_away {
            red.push(u as u32);
        }
    }

    extract(&engine, alphabet.len(), alphabet)
}

/// RPNI over the full pair queue, with level-compatible merges first.
///
/// Walks every prefix pair `(u, v)`, `v <llex u`, twice: the first sweep
/// attempts only pairs whose prefixes carry the same `group` value, the
/// second sweep the rest. Within a sweep, pairs run in increasing llex pair
/// order, and each attempt merges the *current* classes of the two
/// prefixes, so classes formed earlier keep growing (unlike the classic
/// first-fit loop, two established classes can still merge later).
///
/// With annotated alphabets the group is the counter sign: consolidating
/// same-sign prefixes first lets the periodic part of the language collapse
/// into well-constrained classes before any sign-crossing compression is
/// tried. Sign-crossing merges share no annotated letters, so almost no
/// evidence can refute them — attempted early they pair levels arbitrarily
/// and the debris blocks the principled merges that come later; attempted
/// last they are exactly the level-sharing compressions that remain sound.
/// Prefixes absent from the map form one group of their own.
pub fn rpni_grouped(
    sample: &SampleSet,
    alphabet: &Arc<Alphabet>,
    group: &HashMap<Word, u8>,
) -> Dfa {
    let (mut engine, pos_prefs) = seed_engine(sample, alphabet);
    let groups: Vec<Option<u8>> = pos_prefs.iter().map(|w| group.get(w).copied()).collect();
    let p = pos_prefs.len();
    for sweep in 0..2 {
        for u in 1..p {
            for v in 0..u {
                let same = groups[u] == groups[v];
                if (sweep == 0) != same {
                    continue;
                }
                let ru = engine.find(u as u32);
                let rv = engine.find(v as u32);
                if ru != rv {
                    engine.try_merge(ru, rv);
                }
            }
        }
    }
    extract(&engine, alphabet.len(), alphabet)
}

/// Reads the quotient automaton out of the engine: classes containing at
/// least one positive-prefix node, with the real transitions between such
/// classes, states numbered in BFS discovery order from the root class.
fn extract(engine: &Engine, k: usize, alphabet: &Arc<Alphabet>) -> Dfa {
    let root = engine.find(0);
    let mut id_of: HashMap<u32, State> = HashMap::new();
    let mut order: Vec<u32> = Vec::new();
    id_of.insert(root, 0);
    order.push(root);
    let mut head = 0;
    while head < order.len() {
        let class = order[head];
        head += 1;
        for letter in 0..k {
            let succ = engine.out[class as usize * k + letter];
            if succ == NONE {
                continue;
            }
            let succ_class = engine.find(succ);
            if engine.label[succ_class as usize] & REAL == 0 {
                continue;
            }
            if let std::collections::hash_map::Entry::Vacant(slot) = id_of.entry(succ_class) {
                slot.insert(order.len() as State);
                order.push(succ_class);
            }
        }
    }
    let mut dfa = Dfa::empty(alphabet.clone(), order.len() as u32, 0).expect("root exists");
    for (i, &class) in order.iter().enumerate() {
        if engine.label[class as usize] & ACCEPT != 0 {
            dfa.set_final(i as State, true);
        }
        for letter in 0..k {
            let succ = engine.out[class as usize * k + letter];
            if succ == NONE {
                continue;
            }
            if let Some(&tid) = id_of.get(&engine.find(succ)) {
                dfa.set_next(i as State, letter as Letter, tid).expect("valid edge");
            }
        }
    }
    dfa
}
