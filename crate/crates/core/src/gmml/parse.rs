//! LL(1) parser for the concrete formula syntax.
//!
//! ```text
//! φ  ::= 'T' | 'p'INT | '~'φ | '(' φ (OP φ)* ')' | '<'INT':'INT'>'φ | '<'INT':=''INT'>'φ
//! OP ::= '&' | '|' | '->' | '<->'
//! ```
//!
//! A parenthesised chain must use a single operator and associates to the right.
//! All sugar (`|`, `->`, `<->`, `<α:=k>`) is expanded while parsing.

use thiserror::Error;

use super::Formula;
use crate::kripke::Vocabulary;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at offset {offset}: {message}")]
pub struct ParseError {
    /// Byte offset into the input.
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    And,
    Or,
    Implies,
    Iff,
}

impl Op {
    fn apply(self, a: Formula, b: Formula) -> Formula {
        match self {
            Op::And => Formula::and(a, b),
            Op::Or => Formula::or(a, b),
            Op::Implies => Formula::implies(a, b),
            Op::Iff => Formula::iff(a, b),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vocab: &'a Vocabulary,
}

/// Parses `text` against `vocab`, rejecting unknown propositions and channels.
pub fn parse(text: &str, vocab: &Vocabulary) -> Result<Formula, ParseError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, vocab };
    let f = p.formula()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(f)
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError { offset: self.pos, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
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

    fn expect(&mut self, s: &str) -> Result<(), ParseError> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{s}'")))
        }
    }

    fn integer(&mut self) -> Result<usize, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| ParseError { offset: start, message: "integer out of range".into() })
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let start = self.pos;
        match self.peek() {
            Some(b'T') => {
                self.pos += 1;
                Ok(Formula::Top)
            }
            Some(b'p') => {
                self.pos += 1;
                let at = self.pos;
                let p = u32::try_from(self.integer()?).map_err(|_| self.error("proposition index out of range"))?;
                if !self.vocab.has_prop(p) {
                    return Err(ParseError { offset: at, message: format!("proposition p{p} is not in the vocabulary") });
                }
                Ok(Formula::Prop(p))
            }
            Some(b'~') => {
                self.pos += 1;
                Ok(Formula::not(self.formula()?))
            }
            Some(b'(') => {
                self.pos += 1;
                self.chain()
            }
            Some(b'<') => {
                self.pos += 1;
                let at = self.pos;
                let channel = u32::try_from(self.integer()?).map_err(|_| self.error("channel out of range"))?;
                if self.vocab.check_channel(channel).is_err() {
                    return Err(ParseError {
                        offset: at,
                        message: format!("channel {channel} is outside 1..={}", self.vocab.channels()),
                    });
                }
                self.expect(":")?;
                let exact = self.eat("=");
                let count = self.integer()?;
                self.expect(">")?;
                let body = self.formula()?;
                Ok(if exact { Formula::exactly(channel, count, body) } else { Formula::diamond(channel, count, body) })
            }
            Some(_) => Err(self.error("expected a formula")),
            None => Err(ParseError { offset: start.max(self.pos), message: "unexpected end of input".into() }),
        }
    }

    fn operator(&mut self) -> Option<Op> {
        if self.eat("&") {
            Some(Op::And)
        } else if self.eat("|") {
            Some(Op::Or)
        } else if self.eat("->") {
            Some(Op::Implies)
        } else if self.eat("<->") {
            Some(Op::Iff)
        } else {
            None
        }
    }

    // after '(': φ (OP φ)* ')'
    fn chain(&mut self) -> Result<Formula, ParseError> {
        let mut operands = vec![self.formula()?];
        let mut op: Option<Op> = None;
        loop {
            if self.eat(")") {
                break;
            }
            let at = self.pos;
            let Some(next) = self.operator() else {
                return Err(self.error("expected an operator or ')'"));
            };
            if op.is_some_and(|o| o != next) {
                return Err(ParseError { offset: at, message: "mixed operators need explicit parentheses".into() });
            }
            op = Some(next);
            operands.push(self.formula()?);
        }
        let mut acc = operands.pop().expect("at least one operand");
        while let Some(f) = operands.pop() {
            acc = op.expect("chains longer than one have an operator").apply(f, acc);
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gmml::tests::arb_formula;
    use proptest::prelude::*;

    fn v(props: &[u32], a: u32) -> Vocabulary {
        Vocabulary::new(props.iter().copied(), a).unwrap()
    }

    #[test]
    fn grammar_examples() {
        let vocab = v(&[0, 1], 2);
        assert_eq!(parse("<1:2> p0", &vocab).unwrap(), Formula::diamond(1, 2, Formula::prop(0)));
        assert_eq!(parse("(p0 & ~p1)", &vocab).unwrap(), Formula::and(Formula::prop(0), Formula::not(Formula::prop(1))));
        assert_eq!(
            parse("<2:=1> T", &vocab).unwrap(),
            Formula::and(Formula::diamond(2, 1, Formula::Top), Formula::not(Formula::diamond(2, 2, Formula::Top)))
        );
    }

    #[test]
    fn sugar_expands() {
        let vocab = v(&[0, 1, 2], 1);
        let (a, b, c) = (Formula::prop(0), Formula::prop(1), Formula::prop(2));
        assert_eq!(parse("(p0 | p1)", &vocab).unwrap(), Formula::or(a.clone(), b.clone()));
        assert_eq!(parse("(p0 -> p1)", &vocab).unwrap(), Formula::implies(a.clone(), b.clone()));
        assert_eq!(parse("(p0 <-> p1)", &vocab).unwrap(), Formula::iff(a.clone(), b.clone()));
        assert_eq!(
            parse("(p0 -> p1 -> p2)", &vocab).unwrap(),
            Formula::implies(a.clone(), Formula::implies(b.clone(), c.clone()))
        );
        assert_eq!(parse("((p0))", &vocab).unwrap(), a);
    }

    #[test]
    fn errors_carry_positions() {
        let vocab = v(&[0], 1);
        let e = parse("(p0 & ", &vocab).unwrap_err();
        assert_eq!(e.offset, 6);
        let e = parse("p3", &vocab).unwrap_err();
        assert_eq!(e.offset, 1);
        assert!(e.message.contains("p3"));
        let e = parse("<2:1>T", &vocab).unwrap_err();
        assert_eq!(e.offset, 1);
        assert!(parse("(p0 & p0 | p0)", &vocab).is_err());
        assert!(parse("p0 p0", &vocab).is_err());
        assert!(parse("", &vocab).is_err());
        assert!(parse("<1:x>T", &vocab).is_err());
    }

    proptest! {
        #[test]
        fn print_then_parse_round_trips(f in arb_formula(3, 2)) {
            let vocab = v(&[0, 1, 2], 2);
            prop_assert_eq!(parse(&f.to_string(), &vocab).unwrap(), f);
        }
    }
}
