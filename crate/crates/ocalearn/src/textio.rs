//! Text formats: automata, samples, counter maps, and DOT export.
//!
//! # Automaton format
//!
//! One document per file. Blank lines and `#` comments are ignored.
//!
//! ```text
//! droca                    # or `voca` or `dfa`
//! alphabet: a b            # order defines the fixed letter order
//! call: a                  # voca only: the letter partition
//! ret: b                   # (all three lines required, lists may be empty)
//! int:
//! states: 4                # ids 0..n-1
//! initial: 0
//! finals: 2 3
//! 0 a z -> 1 +1            # third field: z = zero-level, p = positive-level
//! 0 b p -> 2 -1            # last field: -1, 0, or +1
//! ```
//!
//! DFA transition lines omit the level and action fields: `0 a -> 1`.
//!
//! # Sample and counter formats
//!
//! Samples: one record per line, `+<TAB>word` or `-<TAB>word`. Counter
//! files: one `word<TAB>value` line per prefix. Words use concatenated
//! single-character letter names; ε is the literal token `@eps`.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::alphabet::Alphabet;
use crate::automata::{Dfa, Droca, LetterClass, Voca};
use crate::samples::{CounterMap, SampleSet};
use crate::{Error, Result};

/// A parsed automaton document of any of the three kinds.
#[derive(Debug, Clone)]
pub enum MachineDoc {
    /// A plain DFA.
    Dfa(Dfa),
    /// A one-counter machine.
    Droca(Droca),
    /// A visibly one-counter machine.
    Voca(Voca),
}

impl MachineDoc {
    /// The document's kind keyword.
    pub fn kind(&self) -> &'static str {
        match self {
            MachineDoc::Dfa(_) => "dfa",
            MachineDoc::Droca(_) => "droca",
            MachineDoc::Voca(_) => "voca",
        }
    }

    /// The underlying one-counter machine, for `droca` and `voca` documents.
    pub fn as_droca(&self) -> Option<&Droca> {
        match self {
            MachineDoc::Droca(m) => Some(m),
            MachineDoc::Voca(v) => Some(v.base()),
            MachineDoc::Dfa(_) => None,
        }
    }
}

fn action_str(act: i8) -> &'static str {
    match act {
        -1 => "-1",
        0 => "0",
        1 => "+1",
        _ => unreachable!("validated counter action"),
    }
}

/// Serializes a DROCA.
pub fn encode_droca(m: &Droca) -> String {
    let mut s = String::new();
    s.push_str("droca\n");
    encode_droca_body(&mut s, m);
    s
}

fn encode_droca_body(s: &mut String, m: &Droca) {
    let alpha = m.alphabet();
    writeln!(s, "alphabet: {alpha}").unwrap();
    encode_core(s, m);
}

fn encode_core(s: &mut String, m: &Droca) {
    let alpha = m.alphabet();
    writeln!(s, "states: {}", m.n_states()).unwrap();
    writeln!(s, "initial: {}", m.initial()).unwrap();
    let finals: Vec<String> = m.final_states().iter().map(u32::to_string).collect();
    writeln!(s, "finals:{}", finals.iter().map(|f| format!(" {f}")).collect::<String>()).unwrap();
    for q in 0..m.n_states() {
        for a in alpha.letters() {
            if let Some((to, act)) = m.zero(q, a) {
                writeln!(s, "{q} {} z -> {to} {}", alpha.name(a), action_str(act)).unwrap();
            }
            if let Some((to, act)) = m.pos(q, a) {
                writeln!(s, "{q} {} p -> {to} {}", alpha.name(a), action_str(act)).unwrap();
            }
        }
    }
}

/// Serializes a VOCA.
pub fn encode_voca(v: &Voca) -> String {
    let m = v.base();
    let alpha = m.alphabet();
    let mut s = String::new();
    s.push_str("voca\n");
    writeln!(s, "alphabet: {alpha}").unwrap();
    for (kw, class) in [
        ("call", LetterClass::Call),
        ("ret", LetterClass::Ret),
        ("int", LetterClass::Int),
    ] {
        let members: String = alpha
            .letters()
            .filter(|&a| v.partition()[a as usize] == class)
            .map(|a| format!(" {}", alpha.name(a)))
            .collect();
        writeln!(s, "{kw}:{members}").unwrap();
    }
    encode_core(&mut s, m);
    s
}

/// Serializes a DFA.
pub fn encode_dfa(d: &Dfa) -> String {
    let alpha = d.alphabet();
    let mut s = String::new();
    s.push_str("dfa\n");
    writeln!(s, "alphabet: {alpha}").unwrap();
    writeln!(s, "states: {}", d.n_states()).unwrap();
    writeln!(s, "initial: {}", d.initial()).unwrap();
    let finals: Vec<String> = d.final_states().iter().map(u32::to_string).collect();
    writeln!(s, "finals:{}", finals.iter().map(|f| format!(" {f}")).collect::<String>()).unwrap();
    for q in 0..d.n_states() {
        for a in alpha.letters() {
            if let Some(to) = d.next(q, a) {
                writeln!(s, "{q} {} -> {to}", alpha.name(a)).unwrap();
            }
        }
    }
    s
}

/// Serializes any machine document.
pub fn encode_machine(doc: &MachineDoc) -> String {
    match doc {
        MachineDoc::Dfa(d) => encode_dfa(d),
        MachineDoc::Droca(m) => encode_droca(m),
        MachineDoc::Voca(v) => encode_voca(v),
    }
}

struct Lines<'a> {
    iter: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Lines<'a> {
        Lines { iter: text.lines().enumerate() }
    }

    /// The next meaningful line: comments stripped, blank lines skipped.
    /// Returns `(1-based line number, trimmed content)`.
    fn next(&mut self) -> Option<(usize, &'a str)> {
        for (i, raw) in self.iter.by_ref() {
            let line = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            }
            .trim();
            if !line.is_empty() {
                return Some((i + 1, line));
            }
        }
        None
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn expect_field<'a>(
    lines: &mut Lines<'a>,
    key: &str,
) -> std::result::Result<(usize, &'a str), Error> {
    let (n, line) = lines
        .next()
        .ok_or_else(|| parse_err(0, format!("unexpected end of document, expected `{key}:`")))?;
    let rest = line
        .strip_prefix(key)
        .and_then(|r| r.strip_prefix(':'))
        .ok_or_else(|| parse_err(n, format!("expected `{key}: …`, found {line:?}")))?;
    Ok((n, rest.trim()))
}

fn parse_state(tok: &str, n_states: u32, line: usize) -> Result<u32> {
    let q: u32 = tok
        .parse()
        .map_err(|_| parse_err(line, format!("invalid state id {tok:?}")))?;
    if q >= n_states {
        return Err(parse_err(line, format!("state id {q} outside 0..{n_states}")));
    }
    Ok(q)
}

/// Parses an automaton document of any kind.
pub fn decode_machine(text: &str) -> Result<MachineDoc> {
    let mut lines = Lines::new(text);
    let (kind_line, kind) = lines
        .next()
        .ok_or_else(|| parse_err(0, "empty document"))?;
    match kind {
        "dfa" | "droca" | "voca" => {}
        other => {
            return Err(parse_err(
                kind_line,
                format!("unknown machine kind {other:?}, expected dfa, droca, or voca"),
            ))
        }
    }

    let (an, alpha_list) = expect_field(&mut lines, "alphabet")?;
    let names: Vec<&str> = alpha_list.split_whitespace().collect();
    let alphabet = Alphabet::new(names.iter().map(|s| s.to_string()))
        .map_err(|e| parse_err(an, e.to_string()))?
        .into_arc();

    let partition = if kind == "voca" {
        let mut part: Vec<Option<LetterClass>> = vec![None; alphabet.len()];
        for (kw, class) in [
            ("call", LetterClass::Call),
            ("ret", LetterClass::Ret),
            ("int", LetterClass::Int),
        ] {
            let (pn, list) = expect_field(&mut lines, kw)?;
            for name in list.split_whitespace() {
                let l = alphabet.index_of(name).ok_or_else(|| {
                    parse_err(pn, format!("letter {name:?} is not in the alphabet"))
                })?;
                if part[l as usize].is_some() {
                    return Err(parse_err(pn, format!("letter {name:?} classified twice")));
                }
                part[l as usize] = Some(class);
            }
        }
        let mut out = Vec::with_capacity(alphabet.len());
        for (i, c) in part.into_iter().enumerate() {
            out.push(c.ok_or_else(|| {
                parse_err(an, format!("letter {:?} is not classified", alphabet.name(i as u32)))
            })?);
        }
        Some(out)
    } else {
        None
    };

    let (sn, states_str) = expect_field(&mut lines, "states")?;
    let n_states: u32 = states_str
        .parse()
        .map_err(|_| parse_err(sn, format!("invalid state count {states_str:?}")))?;
    if n_states == 0 {
        return Err(parse_err(sn, "state count must be positive"));
    }

    let (inn, init_str) = expect_field(&mut lines, "initial")?;
    let initial = parse_state(init_str, n_states, inn)?;

    let (fln, finals_str) = expect_field(&mut lines, "finals")?;
    let mut finals = vec![false; n_states as usize];
    for tok in finals_str.split_whitespace() {
        finals[parse_state(tok, n_states, fln)? as usize] = true;
    }

    if kind == "dfa" {
        let mut d = Dfa::empty(alphabet.clone(), n_states, initial)
            .map_err(|e| parse_err(sn, e.to_string()))?;
        for (q, f) in finals.iter().enumerate() {
            d.set_final(q as u32, *f);
        }
        while let Some((tn, line)) = lines.next() {
            let toks: Vec<&str> = line.split_whitespace().collect();
            let [q, a, arrow, to] = toks[..] else {
                return Err(parse_err(tn, format!("expected `STATE LETTER -> STATE`, found {line:?}")));
            };
            if arrow != "->" {
                return Err(parse_err(tn, format!("expected `->`, found {arrow:?}")));
            }
            let q = parse_state(q, n_states, tn)?;
            let to = parse_state(to, n_states, tn)?;
            let a = alphabet
                .index_of(a)
                .ok_or_else(|| parse_err(tn, format!("letter {a:?} is not in the alphabet")))?;
            if d.next(q, a).is_some() {
                return Err(parse_err(tn, format!("duplicate transition from state {q} on {a:?}")));
            }
            d.set_next(q, a, to).map_err(|e| parse_err(tn, e.to_string()))?;
        }
        return Ok(MachineDoc::Dfa(d));
    }

    let mut m = Droca::empty(alphabet.clone(), n_states, initial)
        .map_err(|e| parse_err(sn, e.to_string()))?;
    for (q, f) in finals.iter().enumerate() {
        m.set_final(q as u32, *f);
    }
    while let Some((tn, line)) = lines.next() {
        let toks: Vec<&str> = line.split_whitespace().collect();
        let [q, a, level, arrow, to, act] = toks[..] else {
            return Err(parse_err(
                tn,
                format!("expected `STATE LETTER z|p -> STATE ACTION`, found {line:?}"),
            ));
        };
        if arrow != "->" {
            return Err(parse_err(tn, format!("expected `->`, found {arrow:?}")));
        }
        let q = parse_state(q, n_states, tn)?;
        let to = parse_state(to, n_states, tn)?;
        let a = alphabet
            .index_of(a)
            .ok_or_else(|| parse_err(tn, format!("letter {a:?} is not in the alphabet")))?;
        let act: i8 = match act {
            "-1" => -1,
            "0" => 0,
            "+1" | "1" => 1,
            other => return Err(parse_err(tn, format!("invalid counter action {other:?}"))),
        };
        match level {
            "z" => {
                if m.zero(q, a).is_some() {
                    return Err(parse_err(tn, format!("duplicate zero-level transition from {q}")));
                }
                m.set_zero(q, a, to, act).map_err(|e| parse_err(tn, e.to_string()))?;
            }
            "p" => {
                if m.pos(q, a).is_some() {
                    return Err(parse_err(tn, format!("duplicate positive-level transition from {q}")));
                }
                m.set_pos(q, a, to, act).map_err(|e| parse_err(tn, e.to_string()))?;
            }
            other => return Err(parse_err(tn, format!("expected level z or p, found {other:?}"))),
        }
    }

    match partition {
        Some(p) => {
            let v = Voca::new(m, p).map_err(|e| parse_err(0, e.to_string()))?;
            Ok(MachineDoc::Voca(v))
        }
        None => Ok(MachineDoc::Droca(m)),
    }
}

/// Serializes a sample set (`+`/`-` records in llex order).
pub fn encode_samples(alpha: &Alphabet, s: &SampleSet) -> String {
    let mut out = String::new();
    for w in s.positives() {
        writeln!(out, "+\t{}", alpha.format_word(w)).unwrap();
    }
    for w in s.negatives() {
        writeln!(out, "-\t{}", alpha.format_word(w)).unwrap();
    }
    out
}

/// Parses a sample file against an alphabet.
pub fn decode_samples(alpha: &Alphabet, text: &str) -> Result<SampleSet> {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    let mut lines = Lines::new(text);
    while let Some((n, line)) = lines.next() {
        let (sign, word) = line
            .split_once(['\t', ' '])
            .ok_or_else(|| parse_err(n, format!("expected `+<TAB>word` or `-<TAB>word`, found {line:?}")))?;
        let w = alpha
            .parse_word(word.trim())
            .map_err(|e| parse_err(n, e.to_string()))?;
        match sign {
            "+" => pos.push(w),
            "-" => neg.push(w),
            other => return Err(parse_err(n, format!("record must start with + or -, found {other:?}"))),
        }
    }
    SampleSet::new(pos, neg)
}

/// Serializes a counter map (`word<TAB>value` lines in llex order).
pub fn encode_counter_map(alpha: &Alphabet, ce: &CounterMap) -> String {
    let mut out = String::new();
    for (w, v) in ce.sorted_entries() {
        writeln!(out, "{}\t{v}", alpha.format_word(&w)).unwrap();
    }
    out
}

/// Parses a counter file against an alphabet.
pub fn decode_counter_map(alpha: &Alphabet, text: &str) -> Result<CounterMap> {
    let mut entries = Vec::new();
    let mut lines = Lines::new(text);
    while let Some((n, line)) = lines.next() {
        let (word, value) = line
            .split_once(['\t', ' '])
            .ok_or_else(|| parse_err(n, format!("expected `word<TAB>value`, found {line:?}")))?;
        let w = alpha
            .parse_word(word.trim())
            .map_err(|e| parse_err(n, e.to_string()))?;
        let v: u64 = value
            .trim()
            .parse()
            .map_err(|_| parse_err(n, format!("invalid counter value {value:?}")))?;
        entries.push((w, v));
    }
    CounterMap::new(entries)
}

/// The set of distinct letters appearing in sample and counter files,
/// in character order — the default alphabet when none is supplied.
pub fn derive_alphabet(texts: &[&str]) -> Result<Arc<Alphabet>> {
    let mut chars = std::collections::BTreeSet::new();
    for text in texts {
        let mut lines = Lines::new(text);
        while let Some((_, line)) = lines.next() {
            let word = match line.split_once(['\t', ' ']) {
                Some((first, rest)) => {
                    if first == "+" || first == "-" {
                        rest.trim()
                    } else {
                        first
                    }
                }
                None => line,
            };
            if word != "@eps" {
                chars.extend(word.chars());
            }
        }
    }
    if chars.is_empty() {
        return Err(Error::Input(
            "cannot derive an alphabet: no letters occur in the input files".into(),
        ));
    }
    Ok(Alphabet::new(chars.into_iter().map(|c| c.to_string()))?.into_arc())
}

fn dot_header(out: &mut String, initial: u32, n_states: u32, is_final: impl Fn(u32) -> bool) {
    out.push_str("digraph machine {\n  rankdir=LR;\n  node [shape=circle];\n");
    out.push_str("  __start [shape=point];\n");
    writeln!(out, "  __start -> q{initial};").unwrap();
    for q in 0..n_states {
        if is_final(q) {
            writeln!(out, "  q{q} [shape=doublecircle];").unwrap();
        }
    }
}

/// DOT export of a one-counter machine. Edges are labeled
/// `a[=0]/+1` (zero-level) or `a[>0]/-1` (positive-level).
pub fn droca_to_dot(m: &Droca) -> String {
    let alpha = m.alphabet();
    let mut out = String::new();
    dot_header(&mut out, m.initial(), m.n_states(), |q| m.is_final(q));
    for q in 0..m.n_states() {
        for a in alpha.letters() {
            if let Some((to, act)) = m.zero(q, a) {
                writeln!(out, "  q{q} -> q{to} [label=\"{}[=0]/{}\"];", alpha.name(a), action_str(act)).unwrap();
            }
            if let Some((to, act)) = m.pos(q, a) {
                writeln!(out, "  q{q} -> q{to} [label=\"{}[>0]/{}\"];", alpha.name(a), action_str(act)).unwrap();
            }
        }
    }
    out.push_str("}\n");
    out
}

/// DOT export of a DFA, edges labeled by letter.
pub fn dfa_to_dot(d: &Dfa) -> String {
    let alpha = d.alphabet();
    let mut out = String::new();
    dot_header(&mut out, d.initial(), d.n_states(), |q| d.is_final(q));
    for q in 0..d.n_states() {
        for a in alpha.letters() {
            if let Some(to) = d.next(q, a) {
                writeln!(out, "  q{q} -> q{to} [label=\"{}\"];", alpha.name(a)).unwrap();
            }
        }
    }
    out.push_str("}\n");
    out
}

/// DOT export of any machine document.
pub fn machine_to_dot(doc: &MachineDoc) -> String {
    match doc {
        MachineDoc::Dfa(d) => dfa_to_dot(d),
        MachineDoc::Droca(m) => droca_to_dot(m),
        MachineDoc::Voca(v) => droca_to_dot(v.base()),
    }
}
