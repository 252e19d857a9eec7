//! Passive DROCA learning: counter-aware encodings, sample enrichment,
//! RPNI invocation, and one-counter extraction.
//!
//! The pipeline turns a sample with counter values into a plain DFA-learning
//! problem and back:
//!
//! 1. every prefix `w` of the sample gets an *action tuple* `Act(w)` — the
//!    sign of its counter value plus the per-letter counter change, with `⊥`
//!    where the sample is silent;
//! 2. words are re-spelled over an *annotated alphabet* (`σ⁰`/`σ¹` according
//!    to the counter sign before reading `σ`) extended with one fresh letter
//!    per distinct action tuple;
//! 3. the enriched sample is handed to [`rpni`](crate::rpni::rpni);
//! 4. [`const_oca`] reads counter actions back off the merged automaton's
//!    accepted action edges.
//!
//! [`opni`] glues the stages together and re-checks the result against the
//! input sample. [`opni_voca`] is the visibly-one-counter variant: counter
//! values come from the letter partition, so no action letters are needed.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::alphabet::{Alphabet, Letter, Word};
use crate::automata::{CounterAction, Dfa, Droca, LetterClass, Voca};
use crate::rpni::{rpni, rpni_grouped};
use crate::samples::{prefixes, CounterMap, SampleSet};
use crate::{Error, Result};

/// The sign of a counter value and the per-letter counter change observed
/// after a sample prefix. `None` (`⊥`) marks letters the sample is silent on.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ActionTuple {
    sign: u8,
    effects: Vec<Option<CounterAction>>,
}

impl ActionTuple {
    /// Builds a tuple, validating that the sign is `0` or `1`, every effect
    /// is in `{-1, 0, +1}`, and no effect is `-1` when the sign is `0` (the
    /// counter cannot decrease from zero).
    pub fn new(sign: u8, effects: Vec<Option<CounterAction>>) -> Result<ActionTuple> {
        if sign > 1 {
            return Err(Error::Input(format!("action-tuple sign {sign} is not 0 or 1")));
        }
        for e in effects.iter().flatten() {
            if !(-1..=1).contains(e) {
                return Err(Error::Input(format!("counter effect {e} outside -1..=1")));
            }
            if sign == 0 && *e == -1 {
                return Err(Error::Input(
                    "a sign-0 action tuple cannot decrement the counter".into(),
                ));
            }
        }
        Ok(ActionTuple { sign, effects })
    }

    /// `0` if the counter was zero after the prefix, `1` if positive.
    pub fn sign(&self) -> u8 {
        self.sign
    }

    /// Per-letter counter effects, indexed by base letter.
    pub fn effects(&self) -> &[Option<CounterAction>] {
        &self.effects
    }

    /// The effect of one letter.
    pub fn effect(&self, a: Letter) -> Option<CounterAction> {
        self.effects[a as usize]
    }
}

impl fmt::Display for ActionTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.sign)?;
        for e in &self.effects {
            match e {
                Some(0) => write!(f, ",0")?,
                Some(v) => write!(f, ",{v:+}")?,
                None => write!(f, ",?")?,
            }
        }
        write!(f, ")")
    }
}

/// The action tuple of one sample prefix: the sign of `ce(w)` plus, for each
/// letter `σ`, the difference `ce(wσ) − ce(w)` where the counter map knows
/// both values (`⊥` otherwise).
pub fn compute_act(w: &[Letter], ce: &CounterMap, alphabet: &Alphabet) -> Result<ActionTuple> {
    let base = ce.get(w).ok_or_else(|| {
        Error::Input(format!(
            "counter value for {} is unknown",
            alphabet.format_word(w)
        ))
    })?;
    let sign = u8::from(base > 0);
    let mut effects = Vec::with_capacity(alphabet.len());
    let mut ext = w.to_vec();
    for a in alphabet.letters() {
        ext.push(a);
        let eff = match ce.get(&ext) {
            Some(c2) => {
                let d = c2 as i64 - base as i64;
                if !(-1..=1).contains(&d) {
                    return Err(Error::Input(format!(
                        "counter map jumps from {base} at {} to {c2} at {}; single steps change the counter by at most one",
                        alphabet.format_word(w),
                        alphabet.format_word(&ext)
                    )));
                }
                Some(d as CounterAction)
            }
            None => None,
        };
        effects.push(eff);
        ext.pop();
    }
    ActionTuple::new(sign, effects)
}

/// Whether two action tuples are compatible: either their signs differ (the
/// annotated alphabet already separates such prefixes), or every position
/// agrees up to `⊥` wildcards. Reflexive and symmetric, but not transitive.
pub fn act_similar(t1: &ActionTuple, t2: &ActionTuple) -> bool {
    assert_eq!(
        t1.effects.len(),
        t2.effects.len(),
        "action tuples over different alphabets"
    );
    if t1.sign != t2.sign {
        return true;
    }
    t1.effects
        .iter()
        .zip(&t2.effects)
        .all(|(a, b)| match (a, b) {
            (Some(x), Some(y)) => x == y,
            _ => true,
        })
}

/// The alphabet the merged automaton works over: every base letter split
/// into a sign-0 and a sign-1 variant, followed by one fresh letter per
/// distinct action tuple.
///
/// Letter layout: annotated letter `σˢ` has index `2σ + s`; the `j`-th
/// action tuple (in first-seen order over the llex-sorted prefixes) has
/// index `2·|Σ| + j`. Names are derived as `{base}0` / `{base}1` and
/// `act{j}`.
#[derive(Debug, Clone)]
pub struct EnrichedAlphabet {
    alphabet: Arc<Alphabet>,
    base: Arc<Alphabet>,
    actions: Vec<ActionTuple>,
}

impl EnrichedAlphabet {
    fn build(base: Arc<Alphabet>, actions: Vec<ActionTuple>) -> Result<EnrichedAlphabet> {
        let mut names = Vec::with_capacity(2 * base.len() + actions.len());
        for a in base.letters() {
            names.push(format!("{}0", base.name(a)));
            names.push(format!("{}1", base.name(a)));
        }
        for j in 0..actions.len() {
            names.push(format!("act{j}"));
        }
        let alphabet = Alphabet::new(names)?.into_arc();
        Ok(EnrichedAlphabet { alphabet, base, actions })
    }

    /// The combined alphabet (annotated letters, then action letters).
    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    /// The original alphabet.
    pub fn base(&self) -> &Arc<Alphabet> {
        &self.base
    }

    /// The distinct action tuples, in canonical (first-seen) order.
    pub fn actions(&self) -> &[ActionTuple] {
        &self.actions
    }

    /// The index of the annotated letter `σˢ`.
    pub fn annotated(&self, base: Letter, sign: u8) -> Letter {
        debug_assert!((base as usize) < self.base.len() && sign <= 1);
        2 * base + Letter::from(sign)
    }

    /// The index of the `j`-th action letter.
    pub fn action_letter(&self, j: usize) -> Letter {
        debug_assert!(j < self.actions.len());
        (2 * self.base.len() + j) as Letter
    }
}

/// Re-spells a word over the annotated alphabet: each letter is tagged with
/// the sign of the counter value reached just before reading it.
pub fn encode_word(w: &[Letter], ce: &CounterMap) -> Result<Word> {
    let mut out = Vec::with_capacity(w.len());
    for i in 0..w.len() {
        let c = ce.get(&w[..i]).ok_or_else(|| {
            Error::Input(format!(
                "counter value for the length-{i} prefix of the word is unknown"
            ))
        })?;
        out.push(2 * w[i] + Letter::from(u8::from(c > 0)));
    }
    Ok(out)
}

/// Enriches a sample for DFA learning.
///
/// The enriched positives are the encodings of `S+` plus, for every sample
/// prefix `w`, the word `Enc(w)·Act(w)`. The enriched negatives are the
/// encodings of `S−` plus every `Enc(w)·op` where the tuple `op` occurs in
/// the sample but is *not* similar to `Act(w)`.
pub fn enrich_sample(
    sample: &SampleSet,
    ce: &CounterMap,
    alphabet: &Arc<Alphabet>,
) -> Result<(SampleSet, EnrichedAlphabet)> {
    ce.validate(sample)?;
    let prefs = prefixes(sample.all_words());
    let mut actions: Vec<ActionTuple> = Vec::new();
    let mut index_of: HashMap<ActionTuple, usize> = HashMap::new();
    let mut act_of: Vec<usize> = Vec::with_capacity(prefs.len());
    for w in &prefs {
        let t = compute_act(w, ce, alphabet)?;
        let next = actions.len();
        let idx = *index_of.entry(t.clone()).or_insert(next);
        if idx == next {
            actions.push(t);
        }
        act_of.push(idx);
    }
    let enr = EnrichedAlphabet::build(alphabet.clone(), actions)?;

    let mut pos: HashMap<Word, String> = HashMap::new();
    for w in sample.positives() {
        pos.entry(encode_word(w, ce)?)
            .or_insert_with(|| format!("Enc({})", alphabet.format_word(w)));
    }
    for (w, &ai) in prefs.iter().zip(&act_of) {
        let mut word = encode_word(w, ce)?;
        word.push(enr.action_letter(ai));
        pos.entry(word)
            .or_insert_with(|| format!("Enc({0})·Act({0})", alphabet.format_word(w)));
    }

    let mut neg: HashMap<Word, String> = HashMap::new();
    for w in sample.negatives() {
        neg.entry(encode_word(w, ce)?)
            .or_insert_with(|| format!("Enc({})", alphabet.format_word(w)));
    }
    for (w, &ai) in prefs.iter().zip(&act_of) {
        for (j, op) in enr.actions().iter().enumerate() {
            if !act_similar(op, &enr.actions()[ai]) {
                let mut word = encode_word(w, ce)?;
                word.push(enr.action_letter(j));
                neg.entry(word).or_insert_with(|| {
                    format!("Enc({})·act{j} (dissimilar tuple)", alphabet.format_word(w))
                });
            }
        }
    }

    for (word, from_pos) in &pos {
        if let Some(from_neg) = neg.get(word) {
            return Err(Error::Inconsistent(format!(
                "enriched word {} is forced positive by {from_pos} and negative by {from_neg}",
                enr.alphabet().format_word(word)
            )));
        }
    }
    let enriched = SampleSet::new(pos.into_keys(), neg.into_keys())?;
    Ok((enriched, enr))
}

/// Extracts a one-counter machine from a merged automaton over an enriched
/// alphabet.
///
/// States, the initial state, and the final states carry over verbatim. For
/// every annotated edge `q →σˢ q′`, the counter action is read off the
/// accepted action edges of `q` with matching sign: the first (in canonical
/// action order) whose tuple fixes `σ` supplies the effect. A missing or
/// all-`⊥` witness set is an extraction error, as is a pair of witnesses
/// that disagree — either means the merged automaton lost the one-counter
/// property.
pub fn const_oca(hat: &Dfa, enr: &EnrichedAlphabet) -> Result<Droca> {
    if hat.alphabet().len() != enr.alphabet().len() {
        return Err(Error::Input(format!(
            "merged automaton has {} letters but the enriched alphabet has {}",
            hat.alphabet().len(),
            enr.alphabet().len()
        )));
    }
    let base = enr.base().clone();
    let mut out = Droca::empty(base.clone(), hat.n_states(), hat.initial())?;
    for q in 0..hat.n_states() {
        out.set_final(q, hat.is_final(q));
    }
    for q in 0..hat.n_states() {
        for sign in 0..=1u8 {
            let witnesses: Vec<&ActionTuple> = enr
                .actions()
                .iter()
                .enumerate()
                .filter(|&(j, t)| {
                    t.sign() == sign
                        && hat
                            .next(q, enr.action_letter(j))
                            .is_some_and(|qf| hat.is_final(qf))
                })
                .map(|(_, t)| t)
                .collect();
            for a in base.letters() {
                let Some(to) = hat.next(q, enr.annotated(a, sign)) else {
                    continue;
                };
                let mut effect: Option<CounterAction> = None;
                for t in &witnesses {
                    if let Some(e) = t.effect(a) {
                        match effect {
                            None => effect = Some(e),
                            Some(prev) if prev != e => {
                                return Err(Error::Extraction(format!(
                                    "state {q}: accepted sign-{sign} witnesses disagree on the effect of {} ({prev:+} vs {e:+})",
                                    base.name(a)
                                )));
                            }
                            Some(_) => {}
                        }
                    }
                }
                let Some(e) = effect else {
                    return Err(Error::Extraction(format!(
                        "state {q}: no accepted sign-{sign} action edge fixes the effect of {}",
                        base.name(a)
                    )));
                };
                let set = if sign == 0 {
                    out.set_zero(q, a, to, e)
                } else {
                    out.set_pos(q, a, to, e)
                };
                set.map_err(|err| {
                    Error::Extraction(format!(
                        "state {q}: effect {e:+} on {} is invalid at this counter level ({err})",
                        base.name(a)
                    ))
                })?;
            }
        }
    }
    Ok(out)
}

/// Whether a machine agrees with a sample: accepts every positive, rejects
/// every negative, and reproduces the counter value of every sample prefix.
///
/// Counter values are compared under *freeze* semantics — the machine is
/// totalised with a sink first, so a word whose original run sticks keeps
/// the counter value reached at the stick point (and is rejected).
pub fn check_consistency(machine: &Droca, sample: &SampleSet, ce: &CounterMap) -> bool {
    let total = machine.complete_with_sink();
    for w in sample.positives() {
        if !matches!(total.accepts(w), Ok(true)) {
            return false;
        }
    }
    for w in sample.negatives() {
        if !matches!(total.accepts(w), Ok(false)) {
            return false;
        }
    }
    for w in &prefixes(sample.all_words()) {
        let Some(want) = ce.get(w) else { return false };
        if !matches!(total.counter_effect(w), Ok(Some(have)) if have == want) {
            return false;
        }
    }
    true
}

/// How the merging step orders its candidate merges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MergeOrder {
    /// Classic first-fit over the llex pair order.
    #[default]
    Llex,
    /// Full pair queue, same-counter-sign merges first (see
    /// [`rpni_grouped`]). The stronger choice for iterated learning, where
    /// samples are sparse and an early sign-crossing merge can
    /// permanently wall off the periodic structure.
    SignGrouped,
}

/// The counter sign of every merge-relevant prefix of the enriched sample,
/// keyed by encoded word: the encodings of sample prefixes and their
/// action-suffixed ghosts (which inherit the base prefix's sign).
fn sign_groups(
    sample: &SampleSet,
    ce: &CounterMap,
    alphabet: &Alphabet,
    enr: &EnrichedAlphabet,
) -> Result<HashMap<Word, u8>> {
    let mut map = HashMap::new();
    for w in &prefixes(sample.all_words()) {
        let v = ce.get(w).ok_or_else(|| {
            Error::Input(format!(
                "counter value for {} is unknown",
                alphabet.format_word(w)
            ))
        })?;
        let sign = u8::from(v > 0);
        let enc = encode_word(w, ce)?;
        let t = compute_act(w, ce, alphabet)?;
        if let Some(j) = enr.actions().iter().position(|x| x == &t) {
            let mut leaf = enc.clone();
            leaf.push(enr.action_letter(j));
            map.insert(leaf, sign);
        }
        map.insert(enc, sign);
    }
    Ok(map)
}

/// Learns a DROCA from a sample with counter values.
///
/// Enriches the sample, runs [`rpni`], and extracts counter actions. The
/// result provably agrees with the sample ([`check_consistency`] is
/// asserted), though it need not equal — or even approximate — whatever
/// machine produced the sample.
pub fn opni(sample: &SampleSet, ce: &CounterMap, alphabet: &Arc<Alphabet>) -> Result<Droca> {
    opni_with(sample, ce, alphabet, MergeOrder::Llex)
}

/// [`opni`] with an explicit merge order.
pub fn opni_with(
    sample: &SampleSet,
    ce: &CounterMap,
    alphabet: &Arc<Alphabet>,
    order: MergeOrder,
) -> Result<Droca> {
    let (enriched, enr) = enrich_sample(sample, ce, alphabet)?;
    let hat = match order {
        MergeOrder::Llex => rpni(&enriched, enr.alphabet()),
        MergeOrder::SignGrouped => {
            let groups = sign_groups(sample, ce, alphabet, &enr)?;
            rpni_grouped(&enriched, enr.alphabet(), &groups)
        }
    };

    for w in sample.positives() {
        assert!(
            hat.accepts(&encode_word(w, ce)?),
            "merged automaton rejects the encoding of positive sample {}",
            alphabet.format_word(w)
        );
    }
    for w in sample.negatives() {
        assert!(
            !hat.accepts(&encode_word(w, ce)?),
            "merged automaton accepts the encoding of negative sample {}",
            alphabet.format_word(w)
        );
    }

    // Prefixes mapped to the same merged state must carry compatible action
    // tuples; a violation would make the extraction below ill-defined.
    let prefs = prefixes(sample.all_words());
    let mut by_state: HashMap<u32, Vec<usize>> = HashMap::new();
    let mut acts = Vec::with_capacity(prefs.len());
    for (i, w) in prefs.iter().enumerate() {
        acts.push(compute_act(w, ce, alphabet)?);
        if let Some(q) = hat.run(&encode_word(w, ce)?) {
            by_state.entry(q).or_default().push(i);
        }
    }
    for group in by_state.values() {
        for (n, &i) in group.iter().enumerate() {
            for &j in &group[n + 1..] {
                assert!(
                    act_similar(&acts[i], &acts[j]),
                    "prefixes {} and {} share a merged state but have incompatible action tuples {} and {}",
                    alphabet.format_word(&prefs[i]),
                    alphabet.format_word(&prefs[j]),
                    acts[i],
                    acts[j]
                );
            }
        }
    }

    let out = const_oca(&hat, &enr)?;
    assert!(
        check_consistency(&out, sample, ce),
        "extracted machine disagrees with its own sample"
    );
    Ok(out)
}

/// The counter value a letter partition forces on a word, or `None` if the
/// running sum dips below zero (the word is invalid for *every* machine over
/// this partition).
pub(crate) fn partition_ce(partition: &[LetterClass], w: &[Letter]) -> Option<u64> {
    let mut c: i64 = 0;
    for &a in w {
        c += i64::from(partition[a as usize].action());
        if c < 0 {
            return None;
        }
    }
    Some(c as u64)
}

/// Learns a visibly one-counter machine from a sample.
///
/// Counter values are determined by the letter partition, so no action
/// letters are needed: the sample is encoded over the annotated alphabet,
/// merged with [`rpni`], and the forced actions are attached to the result.
/// Invalid negative words (running sum below zero) are dropped — every
/// machine over the partition rejects them anyway — while an invalid
/// positive word is an inconsistency error.
pub fn opni_voca(
    sample: &SampleSet,
    alphabet: &Arc<Alphabet>,
    partition: &[LetterClass],
) -> Result<Voca> {
    opni_voca_with(sample, alphabet, partition, MergeOrder::Llex)
}

/// [`opni_voca`] with an explicit merge order.
pub fn opni_voca_with(
    sample: &SampleSet,
    alphabet: &Arc<Alphabet>,
    partition: &[LetterClass],
    order: MergeOrder,
) -> Result<Voca> {
    if partition.len() != alphabet.len() {
        return Err(Error::Input(format!(
            "partition classifies {} letters but the alphabet has {}",
            partition.len(),
            alphabet.len()
        )));
    }
    for w in sample.positives() {
        if partition_ce(partition, w).is_none() {
            return Err(Error::Inconsistent(format!(
                "positive sample {} has no valid run under the visible alphabet",
                alphabet.format_word(w)
            )));
        }
    }
    let kept: Vec<Word> = sample
        .negatives()
        .iter()
        .filter(|w| partition_ce(partition, w).is_some())
        .cloned()
        .collect();

    let mut ce = CounterMap::new([])?;
    for w in sample.positives().iter().chain(&kept) {
        for i in 0..=w.len() {
            let v = partition_ce(partition, &w[..i]).expect("prefixes of valid words are valid");
            ce.insert(w[..i].to_vec(), v);
        }
    }

    let mut names = Vec::with_capacity(2 * alphabet.len());
    for a in alphabet.letters() {
        names.push(format!("{}0", alphabet.name(a)));
        names.push(format!("{}1", alphabet.name(a)));
    }
    let enc_alpha = Alphabet::new(names)?.into_arc();

    let enc_pos: Vec<Word> = sample
        .positives()
        .iter()
        .map(|w| encode_word(w, &ce))
        .collect::<Result<_>>()?;
    let enc_neg: Vec<Word> = kept
        .iter()
        .map(|w| encode_word(w, &ce))
        .collect::<Result<_>>()?;
    let enc_sample = SampleSet::new(enc_pos, enc_neg)?;
    let hat = match order {
        MergeOrder::Llex => rpni(&enc_sample, &enc_alpha),
        MergeOrder::SignGrouped => {
            let mut groups = HashMap::new();
            for w in sample.positives().iter().chain(&kept) {
                for i in 0..=w.len() {
                    let v = partition_ce(partition, &w[..i])
                        .expect("prefixes of valid words are valid");
                    groups.insert(encode_word(&w[..i], &ce)?, u8::from(v > 0));
                }
            }
            rpni_grouped(&enc_sample, &enc_alpha, &groups)
        }
    };

    let mut out = Droca::empty(alphabet.clone(), hat.n_states(), hat.initial())?;
    for q in 0..hat.n_states() {
        out.set_final(q, hat.is_final(q));
    }
    for q in 0..hat.n_states() {
        for a in alphabet.letters() {
            for sign in 0..=1u8 {
                let Some(to) = hat.next(q, 2 * a + Letter::from(sign)) else {
                    continue;
                };
                let act = partition[a as usize].action();
                if sign == 0 && partition[a as usize] == LetterClass::Ret {
                    return Err(Error::Extraction(format!(
                        "zero-level transition on return letter {} survived merging",
                        alphabet.name(a)
                    )));
                }
                let set = if sign == 0 {
                    out.set_zero(q, a, to, act)
                } else {
                    out.set_pos(q, a, to, act)
                };
                set.map_err(|err| Error::Extraction(format!("state {q}: {err}")))?;
            }
        }
    }
    let voca = Voca::new(out, partition.to_vec())?;

    let total = voca.complete_with_sink();
    for w in sample.positives() {
        assert!(
            matches!(total.base().accepts(w), Ok(true)),
            "learned machine rejects positive sample {}",
            alphabet.format_word(w)
        );
    }
    for w in sample.negatives() {
        assert!(
            matches!(total.base().accepts(w), Ok(false)),
            "learned machine accepts negative sample {}",
            alphabet.format_word(w)
        );
    }
    for (w, v) in ce.iter() {
        assert!(
            matches!(total.base().counter_effect(w), Ok(Some(have)) if have == v),
            "learned machine disagrees with the partition on the counter value of {}",
            alphabet.format_word(w)
        );
    }
    Ok(voca)
}

/// The hand-built sample used throughout the documentation and tests:
/// `S+ = {ab, bb}`, `S− = {a, b}` over `{a, b}`, with counter values
/// `ε↦0, a↦1, b↦0, ab↦0, bb↦1`.
///
/// Note the counter values are part of the sample, not derived from any
/// particular machine.
pub fn running_example() -> (SampleSet, CounterMap, Arc<Alphabet>) {
    let alphabet = Alphabet::latin(2).expect("two letters").into_arc();
    let a = 0;
    let b = 1;
    let sample = SampleSet::new(vec![vec![a, b], vec![b, b]], vec![vec![a], vec![b]])
        .expect("consistent sample");
    let ce = CounterMap::new(vec![
        (vec![], 0),
        (vec![a], 1),
        (vec![b], 0),
        (vec![a, b], 0),
        (vec![b, b], 1),
    ])
    .expect("no conflicting entries");
    (sample, ce, alphabet)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::demo;

    fn t(sign: u8, effects: &[Option<CounterAction>]) -> ActionTuple {
        ActionTuple::new(sign, effects.to_vec()).expect("valid tuple")
    }

    #[test]
    fn action_tuple_validation_and_display() {
        assert!(ActionTuple::new(2, vec![]).is_err());
        assert!(ActionTuple::new(0, vec![Some(-1)]).is_err());
        assert!(ActionTuple::new(0, vec![Some(2)]).is_err());
        let r = t(0, &[Some(1), Some(0)]);
        assert_eq!(r.to_string(), "(0,+1,0)");
        let s = t(1, &[None, Some(-1)]);
        assert_eq!(s.to_string(), "(1,?,-1)");
    }

    #[test]
    fn act_similar_examples() {
        let r = t(0, &[Some(1), Some(0)]);
        let s = t(1, &[None, Some(-1)]);
        let u = t(0, &[None, Some(1)]);
        // Same sign, conflicting b-effect.
        assert!(!act_similar(&u, &r));
        // Different signs are always compatible.
        assert!(act_similar(&s, &r));
        // Reflexive and symmetric.
        for x in [&r, &s, &u] {
            assert!(act_similar(x, x));
        }
        assert_eq!(act_similar(&r, &u), act_similar(&u, &r));
    }

    #[test]
    fn compute_act_on_the_running_example() {
        let (sample, ce, alpha) = running_example();
        let _ = &sample;
        let act = |w: &[Letter]| compute_act(w, &ce, &alpha).expect("prefix known");
        assert_eq!(act(&[]), t(0, &[Some(1), Some(0)]));
        assert_eq!(act(&[0]), t(1, &[None, Some(-1)]));
        assert_eq!(act(&[1]), t(0, &[None, Some(1)]));
        assert_eq!(act(&[0, 1]), t(0, &[None, None]));
        assert_eq!(act(&[1, 1]), t(1, &[None, None]));
        // Unknown prefix is an input error.
        assert!(compute_act(&[0, 0], &ce, &alpha).is_err());
    }

    #[test]
    fn encode_word_examples() {
        let (_, ce, _) = running_example();
        // a at zero, then b at positive (ce(a) = 1).
        assert_eq!(encode_word(&[0, 1], &ce).unwrap(), vec![0, 3]);
        assert_eq!(encode_word(&[], &ce).unwrap(), Vec::<Letter>::new());
        // Both bs read at zero.
        assert_eq!(encode_word(&[1, 1], &ce).unwrap(), vec![2, 2]);
        // Missing prefix value.
        assert!(encode_word(&[0, 0, 1], &ce).is_err());
    }

    #[test]
    fn enrich_running_example_exactly() {
        let (sample, ce, alpha) = running_example();
        let (enriched, enr) = enrich_sample(&sample, &ce, &alpha).expect("valid input");
        // Tuples in first-seen order over ε, a, b, ab, bb.
        assert_eq!(
            enr.actions(),
            &[
                t(0, &[Some(1), Some(0)]),  // act0: ε
                t(1, &[None, Some(-1)]),    // act1: a
                t(0, &[None, Some(1)]),     // act2: b
                t(0, &[None, None]),        // act3: ab
                t(1, &[None, None]),        // act4: bb
            ]
        );
        assert_eq!(enr.alphabet().len(), 9);
        assert_eq!(enr.alphabet().name(0), "a0");
        assert_eq!(enr.alphabet().name(3), "b1");
        assert_eq!(enr.alphabet().name(4), "act0");

        // Annotated letters: a0=0, a1=1, b0=2, b1=3; actions start at 4.
        let expected_pos: Vec<Word> = vec![
            vec![4],          // ε·act0
            vec![0, 3],       // Enc(ab)
            vec![0, 5],       // Enc(a)·act1
            vec![2, 2],       // Enc(bb)
            vec![2, 6],       // Enc(b)·act2
            vec![0, 3, 7],    // Enc(ab)·act3
            vec![2, 2, 8],    // Enc(bb)·act4
        ];
        let expected_neg: Vec<Word> = vec![
            vec![0],    // Enc(a)
            vec![2],    // Enc(b)
            vec![6],    // act2 alone: Act(b) dissimilar to Act(ε)
            vec![2, 4], // Enc(b)·act0: Act(ε) dissimilar to Act(b)
        ];
        assert_eq!(enriched.positives(), expected_pos.as_slice());
        assert_eq!(enriched.negatives(), expected_neg.as_slice());
    }

    #[test]
    fn enrich_single_empty_positive() {
        let alpha = Alphabet::latin(2).unwrap().into_arc();
        let sample = SampleSet::new(vec![vec![]], vec![]).unwrap();
        let ce = CounterMap::new(vec![(vec![], 0)]).unwrap();
        let (enriched, enr) = enrich_sample(&sample, &ce, &alpha).unwrap();
        assert_eq!(enr.actions(), &[t(0, &[None, None])]);
        assert_eq!(enriched.positives(), &[vec![], vec![4]]);
        assert!(enriched.negatives().is_empty());
    }

    #[test]
    fn opni_learns_the_running_example() {
        let (sample, ce, alpha) = running_example();
        let m = opni(&sample, &ce, &alpha).expect("learnable");
        assert!(check_consistency(&m, &sample, &ce));
        // Three merged classes, as in the worked example.
        assert_eq!(m.n_states(), 3);
        // Membership and counter values, spelled out.
        assert!(matches!(m.accepts(&[0, 1]), Ok(true)));
        assert!(matches!(m.accepts(&[1, 1]), Ok(true)));
        assert!(matches!(m.accepts(&[0]), Ok(false)));
        assert!(matches!(m.accepts(&[1]), Ok(false)));
        assert!(matches!(m.counter_effect(&[1, 1]), Ok(Some(1))));
        // The positive-level b-transition out of the initial class pops the
        // counter and lands in the accepting class.
        let (to, act) = m.pos(m.initial(), 1).expect("edge exists");
        assert_eq!(act, -1);
        assert!(m.is_final(to));
    }

    #[test]
    fn opni_trivial_sample() {
        let alpha = Alphabet::latin(2).unwrap().into_arc();
        let sample = SampleSet::new(vec![vec![]], vec![]).unwrap();
        let ce = CounterMap::new(vec![(vec![], 0)]).unwrap();
        let m = opni(&sample, &ce, &alpha).expect("learnable");
        assert_eq!(m.n_states(), 1);
        assert!(matches!(m.accepts(&[]), Ok(true)));
    }

    #[test]
    fn consistency_of_the_demo_machine() {
        let m = demo::strict_excess_droca();
        let sample = SampleSet::new(vec![vec![1]], vec![vec![0]]).unwrap();
        let good = CounterMap::new(vec![(vec![], 0), (vec![0], 1), (vec![1], 0)]).unwrap();
        assert!(check_consistency(&m, &sample, &good));
        let bad = CounterMap::new(vec![(vec![], 0), (vec![0], 0), (vec![1], 0)]).unwrap();
        assert!(!check_consistency(&m, &sample, &bad));
    }

    #[test]
    fn opni_consistent_on_random_samples() {
        use crate::randgen::{random_droca, GenConfig, SplitMix64};
        let mut seeder = SplitMix64::new(0x0c0ffee);
        for round in 0..50 {
            let n = 2 + (round % 5) as u32;
            let cfg = GenConfig {
                n_states: n,
                alphabet_size: 2,
                seed: seeder.next_u64(),
                ..GenConfig::default()
            };
            let target = random_droca(&cfg).expect("generable").complete_with_sink();
            // Sample: every word up to length 5, labelled by the target.
            let alpha = target.alphabet().clone();
            let mut pos = Vec::new();
            let mut neg = Vec::new();
            let mut words: Vec<Word> = vec![vec![]];
            let mut frontier: Vec<Word> = vec![vec![]];
            for _ in 0..5 {
                let mut next = Vec::new();
                for w in &frontier {
                    for a in alpha.letters() {
                        let mut w2 = w.clone();
                        w2.push(a);
                        next.push(w2.clone());
                        words.push(w2);
                    }
                }
                frontier = next;
            }
            let mut ce = CounterMap::new([]).unwrap();
            for w in &words {
                if target.accepts(w).unwrap() {
                    pos.push(w.clone());
                } else {
                    neg.push(w.clone());
                }
                ce.insert(w.clone(), target.counter_effect(w).unwrap().expect("complete"));
            }
            let sample = SampleSet::new(pos, neg).unwrap();
            let m = opni(&sample, &ce, &alpha).expect("learnable");
            assert!(check_consistency(&m, &sample, &ce), "round {round}");
        }
    }

    #[test]
    fn opni_voca_on_the_matched_descent_language() {
        let target = demo::matched_descent_voca();
        let alpha = target.base().alphabet().clone();
        let partition = target.partition().to_vec();
        // a = call, b = ret; accepted iff 1 ≤ #b ≤ #a with all as first.
        let pos = vec![vec![0, 1], vec![0, 0, 1], vec![0, 0, 1, 1]];
        let neg = vec![
            vec![],
            vec![0],
            vec![0, 0],
            vec![0, 1, 0],
            vec![1],    // invalid: ret at zero — dropped internally
            vec![1, 0], // invalid prefix — dropped internally
        ];
        let sample = SampleSet::new(pos, neg).unwrap();
        let learned = opni_voca(&sample, &alpha, &partition).expect("learnable");
        let total = learned.complete_with_sink();
        for (w, want) in [
            (vec![0, 1], true),
            (vec![0, 0, 1], true),
            (vec![0, 0, 1, 1], true),
            (vec![], false),
            (vec![0], false),
            (vec![0, 1, 0], false),
            (vec![1], false),
            (vec![1, 0], false),
        ] {
            assert!(
                matches!(total.base().accepts(&w), Ok(got) if got == want),
                "word {w:?}"
            );
        }
        // Counter values follow the partition on valid words.
        assert!(matches!(total.base().counter_effect(&[0, 0, 1]), Ok(Some(1))));
        assert!(matches!(learned.partition_effect(&[1]), Ok(None)));
    }

    #[test]
    fn opni_voca_rejects_invalid_positive() {
        let target = demo::matched_descent_voca();
        let alpha = target.base().alphabet().clone();
        let partition = target.partition().to_vec();
        let sample = SampleSet::new(vec![vec![1]], vec![]).unwrap();
        assert!(matches!(
            opni_voca(&sample, &alpha, &partition),
            Err(Error::Inconsistent(_))
        ));
    }
}
