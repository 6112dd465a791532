//! Small finite automata given as tables.
//!
//! ```text
//! gradedwl-automaton v1
//! props 0
//! channels 1
//! states quiet lit seen
//! init {} quiet
//! init {0} lit
//! on * 1:lit>=1 -> seen
//! else -> quiet
//! accept seen
//! ```
//!
//! `init` rows map a proposition subset (or `*` for every subset not listed)
//! to a state; together they must cover every subset. `on` rows are tried in
//! order: the source state (`*` for any), then constraints `α:STATE>=K`
//! (at least `K` α-successors in `STATE`) and `α:#=N` (exactly `N`
//! α-successors). The first matching row wins; otherwise the mandatory `else`
//! row applies, where `stay` keeps the current state.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use super::{AcceptingSet, Automaton};
use crate::kripke::{ModelError, Multiset, Vocabulary};
use crate::types::TypeError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct TableError {
    pub line: usize,
    pub message: String,
}

/// Constraints on one channel's multiset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelPattern {
    pub channel: u32,
    /// `(state, k)`: at least `k` successors in `state`.
    pub at_least: Vec<(usize, usize)>,
    pub total: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    /// `None` matches every state.
    pub from: Option<usize>,
    pub patterns: Vec<ChannelPattern>,
    pub to: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Else {
    Stay,
    To(usize),
}

#[derive(Debug, Clone)]
pub struct TableAutomaton {
    vocab: Vocabulary,
    names: Vec<String>,
    init: HashMap<Vec<u32>, usize>,
    rules: Vec<Rule>,
    otherwise: Else,
    accept: Vec<usize>,
    accepting: AcceptingSet<usize>,
}

impl TableAutomaton {
    /// `init` must have an entry for every subset of the vocabulary's propositions.
    pub fn new(
        vocab: Vocabulary,
        names: Vec<String>,
        init: HashMap<Vec<u32>, usize>,
        rules: Vec<Rule>,
        otherwise: Else,
        accept: Vec<usize>,
    ) -> Result<Self, String> {
        let n = names.len();
        let props = vocab.props();
        for bits in 0u64..1 << props.len() {
            let subset: Vec<u32> = props.iter().enumerate().filter(|(i, _)| bits & (1 << i) != 0).map(|(_, &p)| p).collect();
            match init.get(&subset) {
                Some(&s) if s < n => {}
                Some(_) => return Err("initial state out of range".into()),
                None => return Err(format!("no initial state for {{{}}}", join(&subset))),
            }
        }
        let in_range = |s: usize| s < n;
        for r in &rules {
            if !r.from.is_none_or(in_range)
                || !in_range(r.to)
                || r.patterns.iter().any(|p| p.at_least.iter().any(|&(s, _)| !in_range(s)))
            {
                return Err("rule mentions an unknown state".into());
            }
            for p in &r.patterns {
                vocab.check_channel(p.channel).map_err(|e| e.to_string())?;
            }
        }
        if let Else::To(s) = otherwise {
            if !in_range(s) {
                return Err("else row names an unknown state".into());
            }
        }
        if accept.iter().any(|&s| !in_range(s)) {
            return Err("accepting state out of range".into());
        }
        let accepting = AcceptingSet::finite(accept.iter().copied());
        Ok(TableAutomaton { vocab, names, init, rules, otherwise, accept, accepting })
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.names[s]
    }

    pub fn states(&self) -> &[String] {
        &self.names
    }

    pub fn accepting_states(&self) -> &[usize] {
        &self.accept
    }

    fn matches(rule: &Rule, incoming: &[Multiset<usize>], previous: usize) -> bool {
        if rule.from.is_some_and(|f| f != previous) {
            return false;
        }
        rule.patterns.iter().all(|p| {
            let n = &incoming[p.channel as usize - 1];
            p.total.is_none_or(|t| n.len() == t) && p.at_least.iter().all(|(s, k)| n.contains_at_least(s, *k))
        })
    }
}

fn join(xs: &[u32]) -> String {
    xs.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}

impl Automaton for TableAutomaton {
    type State = usize;

    fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    fn initial(&self, atoms: &[u32]) -> Result<usize, String> {
        self.init.get(atoms).copied().ok_or_else(|| format!("no initial state for {{{}}}", join(atoms)))
    }

    fn transition(&self, incoming: &[Multiset<usize>], previous: &usize) -> Result<usize, TypeError> {
        for r in &self.rules {
            if Self::matches(r, incoming, *previous) {
                return Ok(r.to);
            }
        }
        Ok(match self.otherwise {
            Else::Stay => *previous,
            Else::To(s) => s,
        })
    }

    fn accepting(&self) -> &AcceptingSet<usize> {
        &self.accepting
    }
}

/// Parses the table format described in the module docs.
pub fn parse_table_automaton(text: &str) -> Result<TableAutomaton, TableError> {
    // '#' also starts `α:#=N` constraints, so comments begin at a line start or after whitespace
    let mut it = text.lines().enumerate().map(|(i, raw)| (i + 1, strip_comment(raw))).filter(|(_, l)| !l.is_empty());
    let err = |line: usize, message: String| TableError { line, message };

    match it.next() {
        Some((_, "gradedwl-automaton v1")) => {}
        Some((line, _)) => return Err(err(line, "expected the header 'gradedwl-automaton v1'".into())),
        None => return Err(err(1, "empty document".into())),
    }

    let mut props: Option<Vec<u32>> = None;
    let mut channels: Option<u32> = None;
    let mut names: Option<Vec<String>> = None;
    let mut init_rows: Vec<(usize, Option<Vec<u32>>, String)> = Vec::new();
    let mut rule_rows: Vec<(usize, String)> = Vec::new();
    let mut otherwise: Option<(usize, String)> = None;
    let mut accept: Vec<(usize, String)> = Vec::new();

    for (line, l) in it {
        let (key, rest) = l.split_once(char::is_whitespace).map_or((l, ""), |(k, r)| (k, r.trim()));
        match key {
            "props" => props = Some(parse_ints(rest).map_err(|m| err(line, m))?),
            "channels" => channels = Some(rest.parse().map_err(|_| err(line, "expected a channel count".into()))?),
            "states" => names = Some(rest.split_whitespace().map(str::to_string).collect()),
            "init" => {
                let (set, state) = if let Some(r) = rest.strip_prefix('*') {
                    (None, r.trim())
                } else {
                    let close = rest.find('}').ok_or_else(|| err(line, "expected '{…}' or '*'".into()))?;
                    let inner = rest
                        .get(1..close)
                        .filter(|_| rest.starts_with('{'))
                        .ok_or_else(|| err(line, "expected '{…}' or '*'".into()))?;
                    let mut set = parse_ints(&inner.replace(',', " ")).map_err(|m| err(line, m))?;
                    set.sort_unstable();
                    set.dedup();
                    (Some(set), rest[close + 1..].trim())
                };
                init_rows.push((line, set, state.to_string()));
            }
            "on" => rule_rows.push((line, rest.to_string())),
            "else" => {
                let target = rest.strip_prefix("->").ok_or_else(|| err(line, "expected 'else -> STATE'".into()))?.trim();
                otherwise = Some((line, target.to_string()));
            }
            "accept" => accept.extend(rest.split_whitespace().map(|s| (line, s.to_string()))),
            other => return Err(err(line, format!("unknown directive '{other}'"))),
        }
    }

    let props = props.unwrap_or_default();
    let channels = channels.ok_or_else(|| err(0, "missing 'channels'".into()))?;
    let vocab = Vocabulary::new(props.iter().copied(), channels).map_err(|e: ModelError| err(0, e.to_string()))?;
    let names = names.ok_or_else(|| err(0, "missing 'states'".into()))?;
    let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    if index.len() != names.len() {
        return Err(err(0, "duplicate state name".into()));
    }
    let state = |line: usize, name: &str| index.get(name).copied().ok_or_else(|| err(line, format!("unknown state '{name}'")));

    let mut init = HashMap::new();
    let mut default = None;
    for (line, set, name) in &init_rows {
        let s = state(*line, name)?;
        match set {
            Some(set) => {
                if let Some(&p) = set.iter().find(|p| !vocab.has_prop(**p)) {
                    return Err(err(*line, format!("proposition {p} is not declared")));
                }
                if init.insert(set.clone(), s).is_some() {
                    return Err(err(*line, "subset listed twice".into()));
                }
            }
            None => default = Some(s),
        }
    }
    if let Some(d) = default {
        let props = vocab.props();
        for bits in 0u64..1 << props.len() {
            let subset: Vec<u32> = props.iter().enumerate().filter(|(i, _)| bits & (1 << i) != 0).map(|(_, &p)| p).collect();
            init.entry(subset).or_insert(d);
        }
    }

    let mut rules = Vec::new();
    for (line, body) in &rule_rows {
        let (lhs, to) = body.split_once("->").ok_or_else(|| err(*line, "expected '->'".into()))?;
        let to = state(*line, to.trim())?;
        let mut tokens = lhs.split_whitespace();
        let from = match tokens.next() {
            Some("*") => None,
            Some(name) => Some(state(*line, name)?),
            None => return Err(err(*line, "expected a source state".into())),
        };
        let mut patterns: Vec<ChannelPattern> = Vec::new();
        for tok in tokens {
            let (ch, cond) = tok.split_once(':').ok_or_else(|| err(*line, format!("bad constraint '{tok}'")))?;
            let channel: u32 = ch.parse().map_err(|_| err(*line, format!("bad channel in '{tok}'")))?;
            vocab.check_channel(channel).map_err(|e| err(*line, e.to_string()))?;
            let at = match patterns.iter().position(|p| p.channel == channel) {
                Some(i) => i,
                None => {
                    patterns.push(ChannelPattern { channel, at_least: Vec::new(), total: None });
                    patterns.len() - 1
                }
            };
            if let Some(n) = cond.strip_prefix("#=") {
                patterns[at].total = Some(n.parse().map_err(|_| err(*line, format!("bad count in '{tok}'")))?);
            } else {
                let (name, k) = cond.split_once(">=").ok_or_else(|| err(*line, format!("bad constraint '{tok}'")))?;
                let k: usize = k.parse().map_err(|_| err(*line, format!("bad count in '{tok}'")))?;
                patterns[at].at_least.push((state(*line, name)?, k));
            }
        }
        rules.push(Rule { from, patterns, to });
    }

    let (else_line, else_target) = otherwise.ok_or_else(|| err(0, "missing the 'else' row".into()))?;
    let otherwise = if else_target == "stay" { Else::Stay } else { Else::To(state(else_line, &else_target)?) };
    let accept = accept.iter().map(|(line, name)| state(*line, name)).collect::<Result<Vec<_>, _>>()?;
    let accept: Vec<usize> = accept.into_iter().collect::<BTreeSet<_>>().into_iter().collect();

    TableAutomaton::new(vocab, names, init, rules, otherwise, accept).map_err(|m| err(0, m))
}

fn strip_comment(raw: &str) -> &str {
    let trimmed = raw.trim();
    if trimmed.starts_with('#') {
        return "";
    }
    match raw.find(" #") {
        Some(i) => raw[..i].trim(),
        None => trimmed,
    }
}

fn parse_ints(s: &str) -> Result<Vec<u32>, String> {
    s.split_whitespace().map(|t| t.parse().map_err(|_| format!("expected an integer, got '{t}'"))).collect()
}
