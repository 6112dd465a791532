//! Types as formulas and as canonical text.
//!
//! ```text
//! type    ::= '(' 'd'INT '[' literal* ']' channel* ')'
//! literal ::= 'p'INT | '~p'INT
//! channel ::= '(' 'ch'INT ('#'INT)? entry* ')'
//! entry   ::= '(' ('=' | '>=') INT type ')'
//! ```
//!
//! Entries are ordered by the text of their child, then by count, so the text
//! does not depend on the order in which types were interned.

use std::collections::HashMap;
use std::sync::Arc;

use super::{ChannelProfile, ChildEntry, Count, TypeError, TypeId, TypeNode, TypeTable};
use crate::gmml::Formula;

/// Canonical text of a type. Shared children are printed in full at every occurrence.
pub fn serialize_type(table: &TypeTable, id: TypeId) -> Result<Arc<str>, TypeError> {
    if let Some(text) = table.cached_text(id) {
        return Ok(text);
    }
    let node = table.node(id)?;
    let mut out = format!("(d{} [", node.depth);
    let literals: Vec<String> = table
        .vocabulary()
        .props()
        .iter()
        .map(|p| if node.atoms.binary_search(p).is_ok() { format!("p{p}") } else { format!("~p{p}") })
        .collect();
    out.push_str(&literals.join(" "));
    out.push(']');
    for (c, profile) in node.channels.iter().enumerate() {
        out.push_str(&format!(" (ch{}", c + 1));
        if let Some(total) = profile.total {
            out.push_str(&format!(" #{total}"));
        }
        for (entry, text) in ordered_entries(table, profile)? {
            match entry.count {
                Count::Exactly(n) => out.push_str(&format!(" (={n} {text})")),
                Count::AtLeast(n) => out.push_str(&format!(" (>={n} {text})")),
            }
        }
        out.push(')');
    }
    out.push(')');
    let text: Arc<str> = out.into();
    table.cache_text(id, text.clone());
    Ok(text)
}

/// Entries of a channel in text order, paired with the child's text.
pub(crate) fn ordered_entries(table: &TypeTable, profile: &ChannelProfile) -> Result<Vec<(ChildEntry, Arc<str>)>, TypeError> {
    let mut out =
        profile.entries.iter().map(|e| Ok((*e, serialize_type(table, e.child)?))).collect::<Result<Vec<_>, TypeError>>()?;
    out.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.count.cmp(&b.0.count)));
    Ok(out)
}

/// The type as a GMML formula, refused above the table's size cap.
///
/// Conjuncts come in a fixed order: the atom block, then per channel the
/// successor count, the child clauses in text order, and the closing
/// `¬⟨α⟩≥1(…)` clause when there is no successor count.
pub fn render_type(table: &TypeTable, id: TypeId) -> Result<Formula, TypeError> {
    let size = table.render_size(id)?;
    if size > table.render_cap() {
        return Err(TypeError::SizeCap { size, cap: table.render_cap() });
    }
    let mut memo = HashMap::new();
    let f = render(table, id, &mut memo)?;
    debug_assert_eq!(f.size() as u64, size);
    Ok(f)
}

fn render(table: &TypeTable, id: TypeId, memo: &mut HashMap<TypeId, Formula>) -> Result<Formula, TypeError> {
    if let Some(f) = memo.get(&id) {
        return Ok(f.clone());
    }
    let node = table.node(id)?;
    let atoms = Formula::conjunction(table.vocabulary().props().iter().map(|&p| {
        if node.atoms.binary_search(&p).is_ok() {
            Formula::prop(p)
        } else {
            Formula::not(Formula::prop(p))
        }
    }));
    let mut conjuncts = vec![atoms];
    for (c, profile) in node.channels.iter().enumerate() {
        let channel = c as u32 + 1;
        if let Some(total) = profile.total {
            conjuncts.push(Formula::exactly(channel, total, Formula::Top));
        }
        let entries = ordered_entries(table, profile)?;
        let mut children = Vec::with_capacity(entries.len());
        for (entry, _) in entries {
            let child = render(table, entry.child, memo)?;
            conjuncts.push(match entry.count {
                Count::Exactly(n) => Formula::exactly(channel, n, child.clone()),
                Count::AtLeast(n) => Formula::diamond(channel, n, child.clone()),
            });
            children.push(child);
        }
        if profile.total.is_none() && !children.is_empty() {
            let others = Formula::conjunction(children.into_iter().map(Formula::not));
            conjuncts.push(Formula::not(Formula::diamond(channel, 1, others)));
        }
    }
    let f = Formula::conjunction(conjuncts);
    memo.insert(id, f.clone());
    Ok(f)
}

/// Parses canonical type text back into the table.
pub fn parse_type(table: &TypeTable, text: &str) -> Result<TypeId, TypeError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, table };
    let id = p.parse_type()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(id)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    table: &'a TypeTable,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> TypeError {
        TypeError::Syntax { offset: self.pos, message: message.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(s.as_bytes()) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<(), TypeError> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{s}'")))
        }
    }

    fn integer(&mut self) -> Result<usize, TypeError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or(TypeError::Syntax { offset: start, message: "expected an integer".into() })
    }

    fn parse_type(&mut self) -> Result<TypeId, TypeError> {
        self.expect("(")?;
        self.expect("d")?;
        let depth = u32::try_from(self.integer()?).map_err(|_| self.error("depth out of range"))?;
        self.expect("[")?;
        let mut atoms = Vec::new();
        let mut listed = Vec::new();
        while !self.eat("]") {
            let negated = self.eat("~");
            self.expect("p")?;
            let at = self.pos;
            let p = u32::try_from(self.integer()?).map_err(|_| self.error("proposition out of range"))?;
            if !self.table.vocabulary().has_prop(p) {
                return Err(TypeError::Syntax { offset: at, message: format!("proposition p{p} is not in the vocabulary") });
            }
            listed.push(p);
            if !negated {
                atoms.push(p);
            }
        }
        listed.sort_unstable();
        if listed != self.table.vocabulary().props() {
            return Err(self.error("the atom block must list every proposition once"));
        }
        let mut channels = Vec::new();
        while !self.eat(")") {
            self.expect("(")?;
            self.expect("ch")?;
            let at = self.pos;
            let c = self.integer()?;
            if c != channels.len() + 1 {
                return Err(TypeError::Syntax { offset: at, message: format!("expected channel {}", channels.len() + 1) });
            }
            let mut profile = ChannelProfile::default();
            if self.eat("#") {
                profile.total = Some(self.integer()?);
            }
            while !self.eat(")") {
                self.expect("(")?;
                let exact = if self.eat("=") {
                    true
                } else if self.eat(">=") {
                    false
                } else {
                    return Err(self.error("expected '=' or '>='"));
                };
                self.skip_ws();
                let n = self.integer()?;
                let child = self.parse_type()?;
                self.expect(")")?;
                let count = if exact { Count::Exactly(n) } else { Count::AtLeast(n) };
                profile.entries.push(ChildEntry { child, count });
            }
            channels.push(profile);
        }
        self.table.intern(TypeNode { depth, atoms, channels })
    }
}
