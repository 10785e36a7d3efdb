//! Recursive-descent parser for the concrete formula grammar.
//!
//! Formula precedence, tightest first: prefix operators (`~ X wX F G`,
//! modalities), `U`/`R` (right-associative), `&`, `|`. Path precedence:
//! postfix `*`/`?`, `;`, `+`.

use std::fmt;

use thiserror::Error;

use super::{is_atom_name, Formula, PathExpr};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    /// Unexpected token.
    Syntax,
    /// A symbol or identifier that is not part of the grammar.
    UnknownOperator(String),
    /// An opening bracket whose closing counterpart is missing or mismatched.
    UnbalancedBracket(char),
    /// Well-tokenized input that violates a grammar restriction.
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}", self.describe())]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub column: usize,
    pub expected: Vec<String>,
    pub found: String,
}

impl ParseError {
    fn describe(&self) -> String {
        let what = match &self.kind {
            ParseErrorKind::Syntax => "syntax error".to_string(),
            ParseErrorKind::UnknownOperator(op) => format!("unknown operator `{op}`"),
            ParseErrorKind::UnbalancedBracket(c) => format!("unbalanced `{c}`"),
            ParseErrorKind::Invalid(msg) => msg.clone(),
        };
        let mut s = format!("{}:{}: {what}", self.line, self.column);
        if !self.expected.is_empty() {
            s.push_str(&format!("; expected {}", self.expected.join(", ")));
        }
        s.push_str(&format!("; found {}", self.found));
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Lt,
    Gt,
    LBrack,
    RBrack,
    LParen,
    RParen,
    Question,
    Star,
    Semi,
    Plus,
    Tilde,
    Amp,
    Pipe,
    Ident(String),
    Unknown(String),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Lt => "`<`",
            Tok::Gt => "`>`",
            Tok::LBrack => "`[`",
            Tok::RBrack => "`]`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::Question => "`?`",
            Tok::Star => "`*`",
            Tok::Semi => "`;`",
            Tok::Plus => "`+`",
            Tok::Tilde => "`~`",
            Tok::Amp => "`&`",
            Tok::Pipe => "`|`",
            Tok::Ident(s) | Tok::Unknown(s) => return write!(f, "`{s}`"),
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Vec<Spanned> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut line, mut column) = (1usize, 1usize);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            column += 1;
            i += 1;
            continue;
        }
        let start = (line, column);
        let single = match c {
            '<' => Some(Tok::Lt),
            '>' => Some(Tok::Gt),
            '[' => Some(Tok::LBrack),
            ']' => Some(Tok::RBrack),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '?' => Some(Tok::Question),
            '*' => Some(Tok::Star),
            ';' => Some(Tok::Semi),
            '+' => Some(Tok::Plus),
            '~' => Some(Tok::Tilde),
            '&' => Some(Tok::Amp),
            '|' => Some(Tok::Pipe),
            _ => None,
        };
        let (tok, len) = if let Some(t) = single {
            (t, 1)
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            (Tok::Ident(chars[i..j].iter().collect()), j - i)
        } else {
            let mut j = i + 1;
            while j < chars.len()
                && !chars[j].is_whitespace()
                && !chars[j].is_ascii_alphanumeric()
                && !"[]()?*;+~&|_".contains(chars[j])
            {
                j += 1;
            }
            (Tok::Unknown(chars[i..j].iter().collect()), j - i)
        };
        out.push(Spanned {
            tok,
            line: start.0,
            column: start.1,
        });
        i += len;
        column += len;
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column,
    });
    out
}

/// Result of a path primary: either a program, or a parenthesized formula
/// that still has to become a test or a propositional step.
enum PathItem {
    Path(PathExpr),
    Formula(Formula),
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

/// Parses formula text in the toolkit's concrete grammar.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser {
        toks: lex(text),
        pos: 0,
    };
    let f = p.formula()?;
    match p.peek() {
        Tok::Eof => Ok(f),
        Tok::RParen => Err(p.error(ParseErrorKind::UnbalancedBracket(')'), &["end of input"])),
        Tok::Gt => Err(p.error(ParseErrorKind::UnbalancedBracket('>'), &["end of input"])),
        Tok::RBrack => Err(p.error(ParseErrorKind::UnbalancedBracket(']'), &["end of input"])),
        _ => Err(p.unexpected(&["`&`", "`|`", "`U`", "`R`", "end of input"])),
    }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, kind: ParseErrorKind, expected: &[&str]) -> ParseError {
        let s = &self.toks[self.pos];
        ParseError {
            kind,
            line: s.line,
            column: s.column,
            expected: expected.iter().map(|e| e.to_string()).collect(),
            found: s.tok.to_string(),
        }
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        let kind = match self.peek() {
            Tok::Unknown(s) => ParseErrorKind::UnknownOperator(s.clone()),
            Tok::Ident(s) if !is_keyword(s) && !is_atom_name(s) => {
                if s == "last" {
                    ParseErrorKind::Invalid("`last` is reserved; use `LAST`".into())
                } else {
                    ParseErrorKind::UnknownOperator(s.clone())
                }
            }
            _ => ParseErrorKind::Syntax,
        };
        self.error(kind, expected)
    }

    fn close(&mut self, closer: Tok, opener: char) -> PResult<()> {
        if *self.peek() == closer {
            self.bump();
            return Ok(());
        }
        let expected = closer.to_string();
        match self.peek() {
            _ if opener != '(' => {
                Err(self.error(ParseErrorKind::UnbalancedBracket(opener), &[&expected]))
            }
            Tok::Eof | Tok::RParen | Tok::RBrack | Tok::Gt => {
                Err(self.error(ParseErrorKind::UnbalancedBracket(opener), &[&expected]))
            }
            _ => Err(self.unexpected(&[&expected])),
        }
    }

    fn formula(&mut self) -> PResult<Formula> {
        let mut left = self.conjunction()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            let right = self.conjunction()?;
            left = Formula::or(left, right);
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let mut left = self.binary_temporal()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let right = self.binary_temporal()?;
            left = Formula::and(left, right);
        }
        Ok(left)
    }

    fn binary_temporal(&mut self) -> PResult<Formula> {
        let left = self.unary()?;
        match self.peek() {
            Tok::Ident(s) if s == "U" => {
                self.bump();
                let right = self.binary_temporal()?;
                Ok(Formula::until(left, right))
            }
            Tok::Ident(s) if s == "R" => {
                self.bump();
                let right = self.binary_temporal()?;
                Ok(Formula::release(left, right))
            }
            _ => Ok(left),
        }
    }

    fn unary(&mut self) -> PResult<Formula> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Lt => {
                self.bump();
                let p = self.path()?;
                self.close(Tok::Gt, '<')?;
                Ok(Formula::diamond(p, self.unary()?))
            }
            Tok::LBrack => {
                self.bump();
                let p = self.path()?;
                self.close(Tok::RBrack, '[')?;
                Ok(Formula::boxed(p, self.unary()?))
            }
            Tok::Ident(s) => match s.as_str() {
                "X" => {
                    self.bump();
                    Ok(Formula::next(self.unary()?))
                }
                "wX" => {
                    self.bump();
                    Ok(Formula::weak_next(self.unary()?))
                }
                "F" => {
                    self.bump();
                    Ok(Formula::eventually(self.unary()?))
                }
                "G" => {
                    self.bump();
                    Ok(Formula::always(self.unary()?))
                }
                _ => self.primary(),
            },
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> PResult<Formula> {
        const EXPECTED: &[&str] = &["atom", "`tt`", "`ff`", "`LAST`", "`(`", "`~`", "`<`", "`[`", "`X`", "`wX`", "`F`", "`G`"];
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.close(Tok::RParen, '(')?;
                Ok(f)
            }
            Tok::Ident(s) => {
                let f = match s.as_str() {
                    "tt" | "true" => Formula::True,
                    "ff" | "false" => Formula::False,
                    "LAST" => Formula::Last,
                    name if is_atom_name(name) => Formula::Atom(name.to_string()),
                    _ => return Err(self.unexpected(EXPECTED)),
                };
                self.bump();
                Ok(f)
            }
            _ => Err(self.unexpected(EXPECTED)),
        }
    }

    fn path(&mut self) -> PResult<PathExpr> {
        let mut left = self.path_seq()?;
        while *self.peek() == Tok::Plus {
            self.bump();
            let right = self.path_seq()?;
            left = PathExpr::alt(left, right);
        }
        Ok(left)
    }

    fn path_seq(&mut self) -> PResult<PathExpr> {
        let mut left = self.path_postfix()?;
        while *self.peek() == Tok::Semi {
            self.bump();
            let right = self.path_postfix()?;
            left = PathExpr::seq(left, right);
        }
        Ok(left)
    }

    fn path_postfix(&mut self) -> PResult<PathExpr> {
        let mut item = self.path_primary()?;
        loop {
            match self.peek() {
                Tok::Question => {
                    let f = match item {
                        PathItem::Formula(f) | PathItem::Path(PathExpr::Prop(f)) => f,
                        PathItem::Path(_) => {
                            return Err(self.error(
                                ParseErrorKind::Invalid("only a formula can be tested with `?`".into()),
                                &[],
                            ))
                        }
                    };
                    self.bump();
                    item = PathItem::Path(PathExpr::Test(f));
                }
                Tok::Star => {
                    let p = self.item_to_path(item)?;
                    self.bump();
                    item = PathItem::Path(PathExpr::star(p));
                }
                _ => break,
            }
        }
        self.item_to_path(item)
    }

    fn item_to_path(&self, item: PathItem) -> PResult<PathExpr> {
        match item {
            PathItem::Path(p) => Ok(p),
            PathItem::Formula(f) if f.is_propositional() => Ok(PathExpr::Prop(f)),
            PathItem::Formula(_) => Err(self.error(
                ParseErrorKind::Invalid("a temporal formula inside a path must be a test".into()),
                &["`?`"],
            )),
        }
    }

    fn path_primary(&mut self) -> PResult<PathItem> {
        const EXPECTED: &[&str] = &["atom", "`true`", "`false`", "`(`", "`~`"];
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                match self.path_primary()? {
                    PathItem::Path(PathExpr::Prop(f)) => Ok(PathItem::Path(PathExpr::Prop(Formula::not(f)))),
                    PathItem::Formula(f) => Ok(PathItem::Formula(Formula::not(f))),
                    PathItem::Path(_) => Err(self.error(
                        ParseErrorKind::Invalid("`~` applies only to propositions inside a path".into()),
                        &[],
                    )),
                }
            }
            Tok::LParen => {
                self.bump();
                let save = self.pos;
                let as_path = self.path().and_then(|p| {
                    self.close(Tok::RParen, '(')?;
                    Ok(p)
                });
                match as_path {
                    Ok(p) => Ok(PathItem::Path(p)),
                    Err(path_err) => {
                        let path_reach = self.pos;
                        self.pos = save;
                        match self.formula().and_then(|f| {
                            self.close(Tok::RParen, '(')?;
                            Ok(f)
                        }) {
                            Ok(f) => Ok(PathItem::Formula(f)),
                            Err(formula_err) => {
                                // Report whichever reading got further into the input.
                                if path_reach > self.pos {
                                    Err(path_err)
                                } else {
                                    Err(formula_err)
                                }
                            }
                        }
                    }
                }
            }
            Tok::Ident(s) => {
                let f = match s.as_str() {
                    "tt" | "true" => Formula::True,
                    "ff" | "false" => Formula::False,
                    name if is_atom_name(name) => Formula::Atom(name.to_string()),
                    _ => return Err(self.unexpected(EXPECTED)),
                };
                self.bump();
                Ok(PathItem::Path(PathExpr::Prop(f)))
            }
            _ => Err(self.unexpected(EXPECTED)),
        }
    }
}

fn is_keyword(s: &str) -> bool {
    matches!(
        s,
        "tt" | "ff" | "true" | "false" | "X" | "wX" | "F" | "G" | "U" | "R" | "LAST"
    )
}
