//! Regular expressions over action labels.
//!
//! Grammar: `+` is union, juxtaposition is concatenation, postfix `*` is
//! Kleene star and postfix `^+` means one or more. `()` denotes the empty
//! word. Atoms are labels of the alphabet, split by longest match; use
//! whitespace to separate labels when longest match would pick wrongly.

use thiserror::Error;

use super::{eliminate_epsilon, Fsa};
use crate::models::Sym;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RegexError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("no label of the alphabet starts at offset {offset} ({text:?})")]
    UnknownAtom { offset: usize, text: String },
    #[error("longest-match tokenization leaves {residue:?} at offset {offset}")]
    AmbiguousTokenization { offset: usize, residue: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Atom(usize),
    Plus,
    Star,
    OneOrMore,
    Open,
    Close,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Ast {
    Epsilon,
    Atom(usize),
    Union(Box<Ast>, Box<Ast>),
    Concat(Box<Ast>, Box<Ast>),
    Star(Box<Ast>),
}

fn is_operator(c: char) -> bool {
    matches!(c, '+' | '*' | '(' | ')' | '^') || c.is_whitespace()
}

fn tokenize(text: &str, alphabet: &[String]) -> Result<Vec<(usize, Token)>, RegexError> {
    let mut tokens = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        let tok = match c {
            '+' => Some(Token::Plus),
            '*' => Some(Token::Star),
            '(' => Some(Token::Open),
            ')' => Some(Token::Close),
            '^' => {
                chars.next();
                match chars.peek() {
                    Some(&(_, '+')) => {}
                    _ => {
                        return Err(RegexError::Syntax { offset: i, message: "expected '+' after '^'".into() })
                    }
                }
                Some(Token::OneOrMore)
            }
            _ => None,
        };
        if let Some(tok) = tok {
            chars.next();
            tokens.push((i, tok));
            continue;
        }
        let end = text[i..].find(is_operator).map_or(text.len(), |e| i + e);
        let mut pos = i;
        while pos < end {
            let rest = &text[pos..end];
            let best = alphabet
                .iter()
                .enumerate()
                .filter(|(_, l)| !l.is_empty() && rest.starts_with(l.as_str()))
                .max_by_key(|(_, l)| l.len());
            match best {
                Some((k, l)) => {
                    tokens.push((pos, Token::Atom(k)));
                    pos += l.len();
                }
                None if pos == i => {
                    return Err(RegexError::UnknownAtom { offset: pos, text: rest.to_string() })
                }
                None => {
                    return Err(RegexError::AmbiguousTokenization { offset: pos, residue: rest.to_string() })
                }
            }
        }
        while chars.peek().is_some_and(|&(j, _)| j < end) {
            chars.next();
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|t| &t.1)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.len, |t| t.0)
    }

    fn error(&self, message: &str) -> RegexError {
        RegexError::Syntax { offset: self.offset(), message: message.into() }
    }

    fn union(&mut self) -> Result<Ast, RegexError> {
        let mut left = self.concat()?;
        while self.peek() == Some(&Token::Plus) {
            self.pos += 1;
            let right = self.concat()?;
            left = Ast::Union(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn concat(&mut self) -> Result<Ast, RegexError> {
        let mut left = self.postfix()?;
        while matches!(self.peek(), Some(Token::Atom(_)) | Some(Token::Open)) {
            let right = self.postfix()?;
            left = Ast::Concat(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn postfix(&mut self) -> Result<Ast, RegexError> {
        let mut node = self.primary()?;
        loop {
            match self.peek() {
                Some(Token::Star) => node = Ast::Star(Box::new(node)),
                Some(Token::OneOrMore) => node = Ast::Concat(Box::new(node.clone()), Box::new(Ast::Star(Box::new(node)))),
                _ => return Ok(node),
            }
            self.pos += 1;
        }
    }

    fn primary(&mut self) -> Result<Ast, RegexError> {
        match self.peek().cloned() {
            Some(Token::Atom(k)) => {
                self.pos += 1;
                Ok(Ast::Atom(k))
            }
            Some(Token::Open) => {
                self.pos += 1;
                if self.peek() == Some(&Token::Close) {
                    self.pos += 1;
                    return Ok(Ast::Epsilon);
                }
                let inner = self.union()?;
                if self.peek() != Some(&Token::Close) {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(_) => Err(self.error("expected a label or '('")),
            None => Err(self.error("unexpected end of expression")),
        }
    }
}

struct Builder {
    n: usize,
    transitions: Vec<(usize, Sym, usize)>,
}

impl Builder {
    fn state(&mut self) -> usize {
        self.n += 1;
        self.n - 1
    }

    /// Thompson fragment with one entry and one exit state.
    fn build(&mut self, ast: &Ast) -> (usize, usize) {
        match ast {
            Ast::Epsilon => {
                let (s, t) = (self.state(), self.state());
                self.transitions.push((s, None, t));
                (s, t)
            }
            Ast::Atom(k) => {
                let (s, t) = (self.state(), self.state());
                self.transitions.push((s, Some(*k), t));
                (s, t)
            }
            Ast::Union(a, b) => {
                let s = self.state();
                let (a0, a1) = self.build(a);
                let (b0, b1) = self.build(b);
                let t = self.state();
                self.transitions.extend([(s, None, a0), (s, None, b0), (a1, None, t), (b1, None, t)]);
                (s, t)
            }
            Ast::Concat(a, b) => {
                let (a0, a1) = self.build(a);
                let (b0, b1) = self.build(b);
                self.transitions.push((a1, None, b0));
                (a0, b1)
            }
            Ast::Star(a) => {
                let s = self.state();
                let (a0, a1) = self.build(a);
                let t = self.state();
                self.transitions.extend([(s, None, a0), (s, None, t), (a1, None, a0), (a1, None, t)]);
                (s, t)
            }
        }
    }
}

/// Compiles a regular expression to an ε-free automaton over `alphabet`.
pub fn parse_regex(text: &str, alphabet: &[String]) -> Result<Fsa, RegexError> {
    let mut labels = alphabet.to_vec();
    labels.sort();
    labels.dedup();
    let tokens = tokenize(text, &labels)?;
    if tokens.is_empty() {
        return Err(RegexError::Syntax { offset: 0, message: "empty expression".into() });
    }
    let mut parser = Parser { tokens, pos: 0, len: text.len() };
    let ast = parser.union()?;
    if parser.pos != parser.tokens.len() {
        return Err(parser.error("unexpected token"));
    }
    let mut b = Builder { n: 0, transitions: Vec::new() };
    let (start, end) = b.build(&ast);
    let states = (0..b.n).map(|i| format!("r{i}")).collect();
    let mut finals = vec![false; b.n];
    finals[end] = true;
    let thompson = Fsa::assemble(labels, states, start, finals, b.transitions);
    Ok(eliminate_epsilon(&thompson).trim())
}
