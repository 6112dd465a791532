//! Plain-text documents: models and type automata.
//!
//! ```text
//! gradedwl-model v1
//! props 0 1
//! channels 2
//! nodes 0 1 2
//! edge 1 0 1
//! edge 2 1 2
//! val 0: 1 2
//! ```
//!
//! A type automaton lists its accepting types, one serialization per line:
//!
//! ```text
//! gradedwl-type-automaton v1
//! props 0
//! channels 1
//! type (d0 [p0])
//! budget-reached degree
//! ```

use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::automaton::{parse_table_automaton, AcceptingSet, TableAutomaton, TypeAutomaton};
use crate::kripke::{KripkeModel, NodeId, Vocabulary};
use crate::stream::BudgetHit;
use crate::types::{parse_type, serialize_type, TypeError, TypeId, TypeTable};

pub const MODEL_HEADER: &str = "gradedwl-model v1";
pub const TYPE_AUTOMATON_HEADER: &str = "gradedwl-type-automaton v1";
pub const TABLE_AUTOMATON_HEADER: &str = "gradedwl-automaton v1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct FormatError {
    /// 0 when the problem is with the document as a whole.
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError { line, message: message.into() }
}

/// Non-blank lines without comments. Type serializations contain `#`, so
/// with `inline` off only whole-line comments are recognized.
fn lines(text: &str, inline: bool) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(move |(i, l)| {
            let l = l.trim();
            let l = if l.starts_with('#') {
                ""
            } else if inline {
                l.split('#').next().unwrap_or("").trim()
            } else {
                l
            };
            (i + 1, l)
        })
        .filter(|(_, l)| !l.is_empty())
}

fn ints(line: usize, s: &str) -> Result<Vec<u32>, FormatError> {
    s.split_whitespace().map(|t| t.parse().map_err(|_| err(line, format!("expected an integer, found '{t}'")))).collect()
}

fn header<'a>(it: &mut impl Iterator<Item = (usize, &'a str)>, expected: &str) -> Result<(), FormatError> {
    match it.next() {
        Some((_, h)) if h == expected => Ok(()),
        Some((line, _)) => Err(err(line, format!("expected the header '{expected}'"))),
        None => Err(err(1, "empty document")),
    }
}

fn vocabulary(props: Option<Vec<u32>>, channels: Option<u32>) -> Result<Vocabulary, FormatError> {
    let channels = channels.ok_or_else(|| err(0, "missing 'channels'"))?;
    Vocabulary::new(props.unwrap_or_default(), channels).map_err(|e| err(0, e.to_string()))
}

pub fn parse_model(text: &str) -> Result<KripkeModel, FormatError> {
    let mut it = lines(text, true);
    header(&mut it, MODEL_HEADER)?;
    let mut props = None;
    let mut channels = None;
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    let mut truths = Vec::new();
    for (line, l) in it {
        let (key, rest) = l.split_once(char::is_whitespace).map_or((l, ""), |(k, r)| (k, r.trim()));
        match key {
            "props" => props = Some(ints(line, rest)?),
            "channels" => channels = Some(rest.parse().map_err(|_| err(line, "expected a channel count"))?),
            "nodes" => nodes.extend(ints(line, rest)?.into_iter().map(|w| (line, w))),
            "edge" => match ints(line, rest)?[..] {
                [c, u, v] => edges.push((line, c, u, v)),
                _ => return Err(err(line, "expected 'edge CHANNEL FROM TO'")),
            },
            "val" => {
                let (p, ws) = rest.split_once(':').ok_or_else(|| err(line, "expected 'val PROP: NODES'"))?;
                let p: u32 = p.trim().parse().map_err(|_| err(line, "expected a proposition index"))?;
                truths.extend(ints(line, ws)?.into_iter().map(|w| (line, p, w)));
            }
            other => return Err(err(line, format!("unknown directive '{other}'"))),
        }
    }
    let vocab = vocabulary(props, channels)?;
    // validate line by line so errors point at the offending row
    let mut seen = std::collections::HashSet::new();
    for &(line, w) in &nodes {
        if !seen.insert(w) {
            return Err(err(line, format!("duplicate node {w}")));
        }
    }
    for &(line, c, u, v) in &edges {
        vocab.check_channel(c).map_err(|e| err(line, e.to_string()))?;
        if let Some(x) = [u, v].into_iter().find(|x| !seen.contains(x)) {
            return Err(err(line, format!("unknown node {x}")));
        }
    }
    for &(line, p, w) in &truths {
        if !vocab.has_prop(p) {
            return Err(err(line, format!("proposition p{p} is not declared")));
        }
        if !seen.contains(&w) {
            return Err(err(line, format!("unknown node {w}")));
        }
    }
    KripkeModel::new(
        vocab,
        nodes.into_iter().map(|(_, w)| NodeId(w)),
        edges.into_iter().map(|(_, c, u, v)| (c, NodeId(u), NodeId(v))),
        truths.into_iter().map(|(_, p, w)| (p, NodeId(w))),
    )
    .map_err(|e| err(0, e.to_string()))
}

pub fn serialize_model(m: &KripkeModel) -> String {
    let v = m.vocabulary();
    let mut out = String::new();
    writeln!(out, "{MODEL_HEADER}").unwrap();
    writeln!(out, "props{}", v.props().iter().map(|p| format!(" {p}")).collect::<String>()).unwrap();
    writeln!(out, "channels {}", v.channels()).unwrap();
    writeln!(out, "nodes{}", m.nodes().iter().map(|w| format!(" {w}")).collect::<String>()).unwrap();
    for (c, u, w) in m.edges() {
        writeln!(out, "edge {c} {u} {w}").unwrap();
    }
    for &p in v.props() {
        let ws = m.valuation(p).expect("declared");
        if !ws.is_empty() {
            writeln!(out, "val {p}:{}", ws.iter().map(|w| format!(" {w}")).collect::<String>()).unwrap();
        }
    }
    out
}

/// A parsed type-automaton document.
#[derive(Debug, Clone)]
pub struct TypeAutomatonDocument {
    pub table: Arc<TypeTable>,
    pub types: Vec<TypeId>,
    pub marker: Option<BudgetHit>,
}

impl TypeAutomatonDocument {
    pub fn automaton(&self) -> TypeAutomaton {
        TypeAutomaton::new(self.table.clone(), AcceptingSet::finite(self.types.iter().copied()))
    }
}

pub fn parse_type_automaton(text: &str) -> Result<TypeAutomatonDocument, FormatError> {
    let mut it = lines(text, false);
    header(&mut it, TYPE_AUTOMATON_HEADER)?;
    let mut props = None;
    let mut channels = None;
    let mut rows = Vec::new();
    let mut marker = None;
    for (line, l) in it {
        let (key, rest) = l.split_once(char::is_whitespace).map_or((l, ""), |(k, r)| (k, r.trim()));
        match key {
            "props" => props = Some(ints(line, rest)?),
            "channels" => channels = Some(rest.parse().map_err(|_| err(line, "expected a channel count"))?),
            "type" => rows.push((line, rest)),
            "budget-reached" => marker = Some(rest.parse::<BudgetHit>().map_err(|m| err(line, m))?),
            other => return Err(err(line, format!("unknown directive '{other}'"))),
        }
    }
    let table = TypeTable::shared(vocabulary(props, channels)?);
    let mut types = Vec::new();
    for (line, text) in rows {
        let id = parse_type(&table, text).map_err(|e| err(line, e.to_string()))?;
        if !table.is_full(id).map_err(|e| err(line, e.to_string()))? {
            return Err(err(line, "accepting states must be full types"));
        }
        types.push(id);
    }
    Ok(TypeAutomatonDocument { table, types, marker })
}

pub fn serialize_type_automaton(table: &TypeTable, types: &[TypeId], marker: Option<BudgetHit>) -> Result<String, TypeError> {
    let v = table.vocabulary();
    let mut out = String::new();
    writeln!(out, "{TYPE_AUTOMATON_HEADER}").unwrap();
    writeln!(out, "props{}", v.props().iter().map(|p| format!(" {p}")).collect::<String>()).unwrap();
    writeln!(out, "channels {}", v.channels()).unwrap();
    for &id in types {
        writeln!(out, "type {}", serialize_type(table, id)?).unwrap();
    }
    if let Some(m) = marker.filter(BudgetHit::any) {
        writeln!(out, "budget-reached {m}").unwrap();
    }
    Ok(out)
}

/// Either automaton document, told apart by its header.
#[derive(Debug, Clone)]
pub enum AutomatonDocument {
    Table(TableAutomaton),
    Types(TypeAutomatonDocument),
}

pub fn parse_automaton(text: &str) -> Result<AutomatonDocument, FormatError> {
    match lines(text, false).next() {
        Some((_, TABLE_AUTOMATON_HEADER)) => {
            parse_table_automaton(text).map(AutomatonDocument::Table).map_err(|e| err(e.line, e.message))
        }
        Some((_, TYPE_AUTOMATON_HEADER)) => parse_type_automaton(text).map(AutomatonDocument::Types),
        Some((line, _)) => Err(err(line, format!("expected '{TABLE_AUTOMATON_HEADER}' or '{TYPE_AUTOMATON_HEADER}'"))),
        None => Err(err(1, "empty document")),
    }
}
