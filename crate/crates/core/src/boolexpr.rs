// SPDX-License-Identifier: Apache-2.0

//! Boolean expressions in negation normal form.
//!
//! Expressions are binary AND/OR trees over literals. Negation never appears
//! as a node: the parser pushes it onto literals, so the complement of an
//! expression is a pure structural mirror (AND and OR swapped, literal
//! polarities flipped).
//!
//! Grammar accepted by [`parse_expression`]:
//!
//! ```text
//! expr   := term ("|" term)*
//! term   := factor ("&" factor)*
//! factor := ["!"] atom
//! atom   := IDENT | "(" expr ")"
//! IDENT  := [A-Za-z][A-Za-z0-9_]*
//! ```
//!
//! N-ary chains binarize right-deep: `a & b & c` is `And(a, And(b, c))`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assign::InputAssignment;

/// Rail selected by a literal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Positive,
    /// The complemented rail (`Ā`).
    Negative,
}

impl Polarity {
    pub fn flip(self) -> Self {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }

    /// Value of this rail when the input carries `value`.
    pub fn rail(self, value: bool) -> bool {
        match self {
            Polarity::Positive => value,
            Polarity::Negative => !value,
        }
    }
}

/// An input name together with the rail it reads.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub input: String,
    pub polarity: Polarity,
}

impl Literal {
    pub fn positive(input: impl Into<String>) -> Self {
        Literal {
            input: input.into(),
            polarity: Polarity::Positive,
        }
    }

    pub fn negative(input: impl Into<String>) -> Self {
        Literal {
            input: input.into(),
            polarity: Polarity::Negative,
        }
    }

    pub fn complement(&self) -> Self {
        Literal {
            input: self.input.clone(),
            polarity: self.polarity.flip(),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.polarity {
            Polarity::Positive => write!(f, "{}", self.input),
            Polarity::Negative => write!(f, "!{}", self.input),
        }
    }
}

/// Returns true if `name` matches `[A-Za-z][A-Za-z0-9_]*`.
pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A binary AND/OR tree over literals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BoolExpr {
    Lit(Literal),
    And(Box<BoolExpr>, Box<BoolExpr>),
    Or(Box<BoolExpr>, Box<BoolExpr>),
}

impl BoolExpr {
    pub fn lit(input: impl Into<String>) -> Self {
        BoolExpr::Lit(Literal::positive(input))
    }

    pub fn neg(input: impl Into<String>) -> Self {
        BoolExpr::Lit(Literal::negative(input))
    }

    pub fn and(left: BoolExpr, right: BoolExpr) -> Self {
        BoolExpr::And(Box::new(left), Box::new(right))
    }

    pub fn or(left: BoolExpr, right: BoolExpr) -> Self {
        BoolExpr::Or(Box::new(left), Box::new(right))
    }

    /// Number of literal occurrences (leaves).
    pub fn literal_count(&self) -> usize {
        match self {
            BoolExpr::Lit(_) => 1,
            BoolExpr::And(l, r) | BoolExpr::Or(l, r) => l.literal_count() + r.literal_count(),
        }
    }

    /// Literal occurrences in left-to-right order.
    pub fn literals(&self) -> Vec<&Literal> {
        let mut out = Vec::with_capacity(self.literal_count());
        self.collect_literals(&mut out);
        out
    }

    fn collect_literals<'a>(&'a self, out: &mut Vec<&'a Literal>) {
        match self {
            BoolExpr::Lit(l) => out.push(l),
            BoolExpr::And(l, r) | BoolExpr::Or(l, r) => {
                l.collect_literals(out);
                r.collect_literals(out);
            }
        }
    }

    /// Evaluates with an arbitrary input lookup; `None` from the lookup is
    /// reported as the offending input name.
    pub fn eval_with<F>(&self, lookup: &F) -> Result<bool, String>
    where
        F: Fn(&str) -> Option<bool>,
    {
        match self {
            BoolExpr::Lit(l) => lookup(&l.input)
                .map(|v| l.polarity.rail(v))
                .ok_or_else(|| l.input.clone()),
            BoolExpr::And(l, r) => Ok(l.eval_with(lookup)? && r.eval_with(lookup)?),
            BoolExpr::Or(l, r) => Ok(l.eval_with(lookup)? || r.eval_with(lookup)?),
        }
    }
}

/// Prints in the parser's own syntax with just enough parentheses that
/// reparsing reproduces the identical tree.
impl fmt::Display for BoolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoolExpr::Lit(l) => write!(f, "{l}"),
            BoolExpr::And(l, r) => {
                match **l {
                    BoolExpr::Lit(_) => write!(f, "{l}")?,
                    _ => write!(f, "({l})")?,
                }
                f.write_str(" & ")?;
                match **r {
                    BoolExpr::Or(..) => write!(f, "({r})"),
                    _ => write!(f, "{r}"),
                }
            }
            BoolExpr::Or(l, r) => {
                match **l {
                    BoolExpr::Or(..) => write!(f, "({l})")?,
                    _ => write!(f, "{l}")?,
                }
                write!(f, " | {r}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty expression")]
    Empty,
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("'!' at byte {position} is not followed by an identifier or parenthesized expression")]
    DanglingNegation { position: usize },
    #[error("constant '{text}' at byte {position} has no differential realization")]
    Constant { position: usize, text: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("input '{0}' is not assigned")]
pub struct EvalError(pub String);

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    Number(String),
    And,
    Or,
    Not,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            c if c.is_ascii_whitespace() => {
                i += 1;
                continue;
            }
            '&' => tokens.push((start, Token::And)),
            '|' => tokens.push((start, Token::Or)),
            '!' => tokens.push((start, Token::Not)),
            '(' => tokens.push((start, Token::LParen)),
            ')' => tokens.push((start, Token::RParen)),
            c if c.is_ascii_alphabetic() => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                tokens.push((start, Token::Ident(text[start..i].to_string())));
                continue;
            }
            c if c.is_ascii_digit() => {
                while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                tokens.push((start, Token::Number(text[start..i].to_string())));
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or(c);
                return Err(ParseError::Syntax {
                    position: start,
                    message: format!("unexpected character '{ch}'"),
                });
            }
        }
        i += 1;
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn expr(&mut self) -> Result<BoolExpr, ParseError> {
        let mut terms = vec![self.term()?];
        while self.peek() == Some(&Token::Or) {
            self.pos += 1;
            terms.push(self.term()?);
        }
        Ok(fold_right(terms, BoolExpr::or))
    }

    fn term(&mut self) -> Result<BoolExpr, ParseError> {
        let mut factors = vec![self.factor()?];
        while self.peek() == Some(&Token::And) {
            self.pos += 1;
            factors.push(self.factor()?);
        }
        Ok(fold_right(factors, BoolExpr::and))
    }

    fn factor(&mut self) -> Result<BoolExpr, ParseError> {
        if self.peek() == Some(&Token::Not) {
            let position = self.offset();
            self.pos += 1;
            return match self.peek() {
                Some(Token::Ident(_)) | Some(Token::LParen) | Some(Token::Number(_)) => Ok(complement(&self.atom()?)),
                _ => Err(ParseError::DanglingNegation { position }),
            };
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<BoolExpr, ParseError> {
        let position = self.offset();
        match self.tokens.get(self.pos).map(|(_, t)| t.clone()) {
            Some(Token::Ident(name)) => {
                self.pos += 1;
                if name.eq_ignore_ascii_case("true") || name.eq_ignore_ascii_case("false") {
                    return Err(ParseError::Constant { position, text: name });
                }
                Ok(BoolExpr::lit(name))
            }
            Some(Token::Number(text)) => {
                if text == "0" || text == "1" {
                    Err(ParseError::Constant { position, text })
                } else {
                    Err(ParseError::Syntax {
                        position,
                        message: format!("identifiers must start with a letter, found '{text}'"),
                    })
                }
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(&Token::RParen) {
                    return Err(ParseError::Syntax {
                        position: self.offset(),
                        message: "expected ')'".into(),
                    });
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(tok) => Err(ParseError::Syntax {
                position,
                message: format!("expected identifier or '(', found {}", describe(&tok)),
            }),
            None => Err(ParseError::Syntax {
                position,
                message: "unexpected end of input".into(),
            }),
        }
    }
}

fn describe(tok: &Token) -> &'static str {
    match tok {
        Token::Ident(_) => "identifier",
        Token::Number(_) => "number",
        Token::And => "'&'",
        Token::Or => "'|'",
        Token::Not => "'!'",
        Token::LParen => "'('",
        Token::RParen => "')'",
    }
}

fn fold_right(mut items: Vec<BoolExpr>, join: fn(BoolExpr, BoolExpr) -> BoolExpr) -> BoolExpr {
    let mut acc = items.pop().expect("at least one operand");
    while let Some(prev) = items.pop() {
        acc = join(prev, acc);
    }
    acc
}

/// Parses `text` into a binarized NNF tree.
pub fn parse_expression(text: &str) -> Result<BoolExpr, ParseError> {
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err(ParseError::Empty);
    }
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: text.len(),
    };
    let expr = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        let (position, tok) = &parser.tokens[parser.pos];
        return Err(ParseError::Syntax {
            position: *position,
            message: format!("unexpected {}", describe(tok)),
        });
    }
    Ok(expr)
}

/// De Morgan dual: the NNF of `!e`, mirroring the structure of `e`.
pub fn complement(e: &BoolExpr) -> BoolExpr {
    match e {
        BoolExpr::Lit(l) => BoolExpr::Lit(l.complement()),
        BoolExpr::And(l, r) => BoolExpr::or(complement(l), complement(r)),
        BoolExpr::Or(l, r) => BoolExpr::and(complement(l), complement(r)),
    }
}

pub fn eval_truth(e: &BoolExpr, a: &InputAssignment) -> Result<bool, EvalError> {
    e.eval_with(&|name| a.get(name)).map_err(EvalError)
}

/// Distinct inputs in order of first appearance.
pub fn input_set(e: &BoolExpr) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for lit in e.literals() {
        if !out.contains(&lit.input) {
            out.push(lit.input.clone());
        }
    }
    out
}
