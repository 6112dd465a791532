//! Graded multimodal logic: syntax, concrete grammar, model checking and
//! finite-disjunction algebra.

mod check;
mod disjunction;
mod parse;

use std::fmt;

use serde::Serialize;

use crate::kripke::{ModelError, Vocabulary};

pub use check::{check, equivalent_on, satisfying_positions, Equivalence};
pub use disjunction::{check_disjunction, conjoin_disjunctions, Disjunction, DisjunctionVerdict, FormulaStream};
pub use parse::{parse, ParseError};

/// `φ ::= ⊤ | p_i | ¬φ | (φ ∧ φ) | ⟨α⟩_{≥k} φ`. Derived connectives only exist
/// in the concrete syntax and are expanded by the parser.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Top,
    Prop(u32),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Diamond { channel: u32, count: usize, body: Box<Formula> },
}

impl Formula {
    pub fn prop(p: u32) -> Formula {
        Formula::Prop(p)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    /// `⟨channel⟩_{≥count} body`.
    pub fn diamond(channel: u32, count: usize, body: Formula) -> Formula {
        Formula::Diamond { channel, count, body: Box::new(body) }
    }

    /// `⟨α⟩_{=k} φ := ⟨α⟩_{≥k} φ ∧ ¬⟨α⟩_{≥k+1} φ`.
    pub fn exactly(channel: u32, count: usize, body: Formula) -> Formula {
        Formula::and(Formula::diamond(channel, count, body.clone()), Formula::not(Formula::diamond(channel, count + 1, body)))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(a, Formula::not(b)))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and(Formula::implies(a.clone(), b.clone()), Formula::implies(b, a))
    }

    /// Right-nested conjunction; `⊤` for an empty list.
    pub fn conjunction(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut parts: Vec<Formula> = parts.into_iter().collect();
        let Some(mut acc) = parts.pop() else {
            return Formula::Top;
        };
        while let Some(f) = parts.pop() {
            acc = Formula::and(f, acc);
        }
        acc
    }

    /// Number of nested diamonds.
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Top | Formula::Prop(_) => 0,
            Formula::Not(f) => f.modal_depth(),
            Formula::And(a, b) => a.modal_depth().max(b.modal_depth()),
            Formula::Diamond { body, .. } => body.modal_depth() + 1,
        }
    }

    /// Level-wise, channel-wise maximum grades. `channels` fixes the vector length.
    pub fn width(&self, channels: u32) -> WidthVector {
        let a = channels as usize;
        match self {
            Formula::Top | Formula::Prop(_) => WidthVector::empty(),
            Formula::Not(f) => f.width(channels),
            Formula::And(l, r) => {
                let (l, r) = (l.width(channels), r.width(channels));
                let depth = l.depth().max(r.depth());
                let levels = (0..depth).map(|i| (0..a).map(|c| l.entry(i, c).max(r.entry(i, c))).collect()).collect();
                WidthVector { levels }
            }
            Formula::Diamond { channel, count, body } => {
                let mut head = vec![0; a];
                head[*channel as usize - 1] = *count;
                let mut levels = vec![head];
                levels.extend(body.width(channels).levels);
                WidthVector { levels }
            }
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Top | Formula::Prop(_) => 1,
            Formula::Not(f) => 1 + f.size(),
            Formula::And(a, b) => 1 + a.size() + b.size(),
            Formula::Diamond { body, .. } => 1 + body.size(),
        }
    }

    /// Checks that every proposition and channel belongs to `vocab`.
    pub fn check_vocabulary(&self, vocab: &Vocabulary) -> Result<(), ModelError> {
        match self {
            Formula::Top => Ok(()),
            Formula::Prop(p) if vocab.has_prop(*p) => Ok(()),
            Formula::Prop(p) => Err(ModelError::UnknownProp(*p)),
            Formula::Not(f) => f.check_vocabulary(vocab),
            Formula::And(a, b) => {
                a.check_vocabulary(vocab)?;
                b.check_vocabulary(vocab)
            }
            Formula::Diamond { channel, body, .. } => {
                vocab.check_channel(*channel)?;
                body.check_vocabulary(vocab)
            }
        }
    }
}

/// Prints the core grammar: `T`, `pN`, `~φ`, `(φ & ψ)`, `<α:k>φ`.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Top => write!(f, "T"),
            Formula::Prop(p) => write!(f, "p{p}"),
            Formula::Not(g) => write!(f, "~{g}"),
            Formula::And(a, b) => write!(f, "({a} & {b})"),
            Formula::Diamond { channel, count, body } => write!(f, "<{channel}:{count}>{body}"),
        }
    }
}

/// `(𝐤_1, …, 𝐤_n)`, outermost level first; every level has one entry per channel.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize)]
pub struct WidthVector {
    levels: Vec<Vec<usize>>,
}

impl WidthVector {
    /// `ε`.
    pub fn empty() -> Self {
        WidthVector { levels: Vec::new() }
    }

    pub fn new(levels: Vec<Vec<usize>>) -> Self {
        WidthVector { levels }
    }

    pub fn levels(&self) -> &[Vec<usize>] {
        &self.levels
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    fn entry(&self, level: usize, channel: usize) -> usize {
        self.levels.get(level).and_then(|l| l.get(channel)).copied().unwrap_or(0)
    }
}

impl fmt::Display for WidthVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.levels.is_empty() {
            return write!(f, "ε");
        }
        write!(f, "(")?;
        for (i, l) in self.levels.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            let parts: Vec<String> = l.iter().map(usize::to_string).collect();
            write!(f, "({})", parts.join(","))?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    pub fn arb_formula(props: u32, channels: u32) -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![Just(Formula::Top), (0..props.max(1)).prop_map(Formula::Prop)];
        leaf.prop_recursive(4, 24, 2, move |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
                (1..=channels, 0usize..4, inner).prop_map(|(c, k, b)| Formula::diamond(c, k, b)),
            ]
        })
    }

    #[test]
    fn modal_depth_examples() {
        assert_eq!(Formula::Top.modal_depth(), 0);
        let f = Formula::diamond(1, 2, Formula::and(Formula::prop(0), Formula::diamond(1, 1, Formula::prop(1))));
        assert_eq!(f.modal_depth(), 2);
        assert_eq!(Formula::and(Formula::diamond(1, 0, Formula::Top), Formula::prop(0)).modal_depth(), 1);
    }

    #[test]
    fn width_examples() {
        assert_eq!(Formula::prop(0).width(2), WidthVector::empty());
        assert_eq!(Formula::diamond(2, 5, Formula::prop(0)).width(2), WidthVector::new(vec![vec![0, 5]]));
        let f = Formula::and(
            Formula::diamond(1, 2, Formula::prop(0)),
            Formula::diamond(2, 3, Formula::diamond(1, 1, Formula::prop(1))),
        );
        assert_eq!(f.width(2), WidthVector::new(vec![vec![2, 3], vec![1, 0]]));
        assert_eq!(f.width(2).to_string(), "((2,3),(1,0))");
    }

    proptest! {
        #[test]
        fn width_length_is_modal_depth(f in arb_formula(2, 2)) {
            prop_assert_eq!(f.width(2).depth(), f.modal_depth());
        }
    }
}
