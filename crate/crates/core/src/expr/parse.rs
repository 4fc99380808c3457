//! Recursive-descent parser for the expression DSL.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := base ('^' integer)?
//! base   := rational | symbol | symbol '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! Two small extensions are accepted: a leading `-` on a base (unary minus)
//! and a signed exponent. `i` is the imaginary unit and `exp` the exponential
//! unless either name is declared.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::{ScalarExpr, Symbol, SymbolKind};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Entry {
    Symbol(SymbolKind),
    Func(usize),
}

/// Declared names available to the parser.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymbolTable {
    entries: BTreeMap<String, Entry>,
    order: Vec<String>,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    fn insert(&mut self, name: &str, entry: Entry) -> Result<()> {
        if !is_identifier(name) {
            return Err(Error::Input(format!("`{name}` is not a valid identifier")));
        }
        if self.entries.contains_key(name) {
            return Err(Error::Duplicate(name.to_string()));
        }
        self.entries.insert(name.to_string(), entry);
        self.order.push(name.to_string());
        Ok(())
    }

    pub fn declare(&mut self, name: &str, kind: SymbolKind) -> Result<Symbol> {
        self.insert(name, Entry::Symbol(kind))?;
        Ok(Symbol::new(name, kind))
    }

    pub fn declare_func(&mut self, name: &str, arity: usize) -> Result<()> {
        if arity == 0 {
            return Err(Error::Input(format!("function `{name}` needs at least one argument")));
        }
        self.insert(name, Entry::Func(arity))
    }

    /// Symbols of the given kind in declaration order.
    pub fn symbols_of(&self, kind: SymbolKind) -> Vec<Symbol> {
        self.order
            .iter()
            .filter_map(|n| match self.entries[n] {
                Entry::Symbol(k) if k == kind => Some(Symbol::new(n, k)),
                _ => None,
            })
            .collect()
    }

    pub fn func_arity(&self, name: &str) -> Option<usize> {
        match self.entries.get(name) {
            Some(Entry::Func(n)) => Some(*n),
            _ => None,
        }
    }

    pub fn functions(&self) -> Vec<(String, usize)> {
        self.order
            .iter()
            .filter_map(|n| match self.entries[n] {
                Entry::Func(a) => Some((n.clone(), a)),
                _ => None,
            })
            .collect()
    }

    /// Resolve a name, including `dot` suffixes on time-dependent symbols.
    pub fn resolve(&self, name: &str) -> Option<Symbol> {
        if let Some(Entry::Symbol(kind)) = self.entries.get(name) {
            return Some(Symbol::new(name, *kind));
        }
        let mut base = name;
        let mut dots = 0;
        while let Some(stripped) = base.strip_suffix("dot") {
            base = stripped;
            dots += 1;
            if let Some(Entry::Symbol(kind)) = self.entries.get(base) {
                return kind
                    .is_time_dependent()
                    .then(|| Symbol::new(base, *kind).with_dots(dots));
            }
        }
        None
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic()) && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Op(char),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut line, mut column) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = (line, column);
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
        if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            if j + 1 < chars.len() && chars[j] == '.' && chars[j + 1].is_ascii_digit() {
                j += 1;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
            }
            let lit: String = chars[i..j].iter().collect();
            out.push(Token {
                tok: Tok::Num(parse_decimal(&lit).expect("lexed digits")),
                line: start.0,
                column: start.1,
            });
            column += j - i;
            i = j;
            continue;
        }
        if c.is_ascii_alphabetic() {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[i..j].iter().collect()),
                line: start.0,
                column: start.1,
            });
            column += j - i;
            i = j;
            continue;
        }
        if "+-*/^(),".contains(c) {
            out.push(Token {
                tok: Tok::Op(c),
                line: start.0,
                column: start.1,
            });
            column += 1;
            i += 1;
            continue;
        }
        return Err(Error::Syntax {
            line,
            column,
            message: format!("unexpected character `{c}`"),
        });
    }
    out.push(Token {
        tok: Tok::End,
        line,
        column,
    });
    Ok(out)
}

fn parse_decimal(lit: &str) -> Option<BigRational> {
    match lit.split_once('.') {
        None => BigInt::from_str(lit).ok().map(BigRational::from_integer),
        Some((whole, frac)) => {
            let digits = BigInt::from_str(&format!("{whole}{frac}")).ok()?;
            let scale = num_traits::pow(BigInt::from(10), frac.len());
            Some(BigRational::new(digits, scale))
        }
    }
}

/// Decimal with an optional exponent, as in `1.5e-3`.
fn parse_scientific(text: &str) -> Option<BigRational> {
    match text.split_once(['e', 'E']) {
        None => parse_decimal(text),
        Some((mantissa, exp)) => {
            let m = parse_decimal(mantissa)?;
            let e: i32 = exp.parse().ok()?;
            let ten = BigRational::from_integer(BigInt::from(10));
            Some(m * num_traits::pow(ten, e.unsigned_abs() as usize).pow(e.signum()))
        }
    }
}

/// Parse a signed rational literal such as `-3`, `1/2`, `0.25` or `1e-3`.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let t = text.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let value = match body.split_once('/') {
        Some((n, d)) => {
            let d = parse_scientific(d.trim())?;
            if d.is_zero() {
                return None;
            }
            parse_scientific(n.trim())? / d
        }
        None => parse_scientific(body)?,
    };
    Some(if neg { -value } else { value })
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    table: &'a SymbolTable,
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, tok: &Token, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            line: tok.line,
            column: tok.column,
            message: message.into(),
        })
    }

    fn expect(&mut self, op: char) -> Result<()> {
        let t = self.bump();
        if t.tok == Tok::Op(op) {
            Ok(())
        } else {
            self.error(&t, format!("expected `{op}`"))
        }
    }

    fn expr(&mut self) -> Result<ScalarExpr> {
        let mut acc = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Op('+') => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Tok::Op('-') => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<ScalarExpr> {
        let mut acc = self.factor()?;
        loop {
            match self.peek().tok {
                Tok::Op('*') => {
                    self.bump();
                    acc = acc.mul(&self.factor()?);
                }
                Tok::Op('/') => {
                    self.bump();
                    acc = acc.div(&self.factor()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<ScalarExpr> {
        let base = self.base()?;
        if self.peek().tok != Tok::Op('^') {
            return Ok(base);
        }
        self.bump();
        let negative = if self.peek().tok == Tok::Op('-') {
            self.bump();
            true
        } else {
            false
        };
        let t = self.bump();
        let exp = match &t.tok {
            Tok::Num(n) if n.is_integer() => n.to_integer(),
            _ => return self.error(&t, "exponent must be an integer"),
        };
        let exp: i32 = match i32::try_from(&exp) {
            Ok(e) if e <= 64 => e,
            _ => return self.error(&t, "exponent too large"),
        };
        base.pow(if negative { -exp } else { exp })
    }

    fn base(&mut self) -> Result<ScalarExpr> {
        let t = self.bump();
        match t.tok.clone() {
            Tok::Num(n) => Ok(ScalarExpr::rational(n)),
            Tok::Op('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Op('-') => Ok(self.factor()?.neg()),
            Tok::Ident(name) => {
                if self.peek().tok == Tok::Op('(') {
                    self.call(&t, &name)
                } else if let Some(s) = self.table.resolve(&name) {
                    Ok(ScalarExpr::symbol(s))
                } else if name == "i" {
                    Ok(ScalarExpr::imag())
                } else if self.table.func_arity(&name).is_some() {
                    self.error(&t, format!("function `{name}` used without arguments"))
                } else {
                    Err(Error::Undeclared {
                        name,
                        line: t.line,
                        column: t.column,
                    })
                }
            }
            Tok::End => self.error(&t, "unexpected end of input"),
            Tok::Op(c) => self.error(&t, format!("unexpected `{c}`")),
        }
    }

    fn call(&mut self, at: &Token, name: &str) -> Result<ScalarExpr> {
        let arity = match (self.table.func_arity(name), name) {
            (Some(a), _) => a,
            (None, "exp") if !self.table.contains("exp") => 1,
            _ => {
                return Err(Error::Undeclared {
                    name: name.to_string(),
                    line: at.line,
                    column: at.column,
                })
            }
        };
        self.expect('(')?;
        let mut args = vec![self.expr()?];
        while self.peek().tok == Tok::Op(',') {
            self.bump();
            args.push(self.expr()?);
        }
        self.expect(')')?;
        if args.len() != arity {
            return Err(Error::Arity {
                name: name.to_string(),
                expected: arity,
                got: args.len(),
            });
        }
        Ok(ScalarExpr::func(name, Vec::new(), args))
    }
}

/// Parse DSL text into a canonical expression.
pub fn parse(text: &str, table: &SymbolTable) -> Result<ScalarExpr> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, table };
    let e = p.expr()?;
    let t = p.peek().clone();
    if t.tok != Tok::End {
        return p.error(&t, "unexpected trailing input");
    }
    Ok(e)
}
