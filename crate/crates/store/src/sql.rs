//! The emitted SQL subset: `SELECT DISTINCT ... FROM ... [WHERE ...]` blocks
//! joined by `UNION`, with `=` predicates only.

use std::collections::BTreeSet;

use crate::store::StoreError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dialect {
    Minimal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SqlText {
    pub dialect: Dialect,
    pub text: String,
}

impl SqlText {
    pub fn minimal(text: impl Into<String>) -> Self {
        SqlText { dialect: Dialect::Minimal, text: text.into() }
    }
}

/// Unordered set-semantics result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResultSet {
    pub columns: usize,
    pub rows: BTreeSet<Vec<String>>,
}

impl ResultSet {
    pub fn empty(columns: usize) -> Self {
        ResultSet { columns, rows: BTreeSet::new() }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Operand {
    Col { alias: String, col: String },
    Lit(String),
}

#[derive(Debug, Clone)]
pub(crate) struct SelectBlock {
    pub items: Vec<Operand>,
    pub from: Vec<(String, String)>, // (table, alias)
    pub preds: Vec<(Operand, Operand)>,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Kw(&'static str),
    Ident(String),
    Lit(String),
    Comma,
    Dot,
    Eq,
}

const KEYWORDS: &[&str] = &["SELECT", "DISTINCT", "FROM", "WHERE", "AND", "UNION"];

fn tokenize(text: &str) -> Result<Vec<Tok>, StoreError> {
    let mut toks = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            ',' => {
                chars.next();
                toks.push(Tok::Comma);
            }
            '.' => {
                chars.next();
                toks.push(Tok::Dot);
            }
            '=' => {
                chars.next();
                toks.push(Tok::Eq);
            }
            '\'' => {
                chars.next();
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some('\'') => {
                            // Doubled quote is an escaped quote.
                            if chars.peek() == Some(&'\'') {
                                chars.next();
                                s.push('\'');
                            } else {
                                break;
                            }
                        }
                        Some(c2) => s.push(c2),
                        None => {
                            return Err(StoreError::DialectViolation(
                                "unterminated string literal".into(),
                            ))
                        }
                    }
                }
                toks.push(Tok::Lit(s));
            }
            c if c.is_alphanumeric() || c == '_' => {
                let mut s = String::new();
                while let Some(&c2) = chars.peek() {
                    if c2.is_alphanumeric() || c2 == '_' {
                        s.push(c2);
                        chars.next();
                    } else {
                        break;
                    }
                }
                let upper = s.to_uppercase();
                if let Some(kw) = KEYWORDS.iter().find(|k| **k == upper) {
                    toks.push(Tok::Kw(kw));
                } else {
                    toks.push(Tok::Ident(s));
                }
            }
            other => {
                return Err(StoreError::DialectViolation(format!(
                    "unexpected character `{other}`"
                )))
            }
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn eat_kw(&mut self, kw: &'static str) -> Result<(), StoreError> {
        if self.toks.get(self.pos) == Some(&Tok::Kw(kw)) {
            self.pos += 1;
            Ok(())
        } else {
            Err(StoreError::DialectViolation(format!("expected {kw}")))
        }
    }

    fn peek_kw(&self, kw: &'static str) -> bool {
        self.toks.get(self.pos) == Some(&Tok::Kw(kw))
    }

    fn eat(&mut self, t: Tok, what: &str) -> Result<(), StoreError> {
        if self.toks.get(self.pos) == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(StoreError::DialectViolation(format!("expected {what}")))
        }
    }

    fn ident(&mut self) -> Result<String, StoreError> {
        match self.toks.get(self.pos) {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(StoreError::DialectViolation("expected identifier".into())),
        }
    }

    fn operand(&mut self) -> Result<Operand, StoreError> {
        match self.toks.get(self.pos) {
            Some(Tok::Lit(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(Operand::Lit(s))
            }
            Some(Tok::Ident(_)) => {
                let alias = self.ident()?;
                self.eat(Tok::Dot, "`.`")?;
                let col = self.ident()?;
                Ok(Operand::Col { alias, col })
            }
            _ => Err(StoreError::DialectViolation("expected column or literal".into())),
        }
    }

    fn block(&mut self) -> Result<SelectBlock, StoreError> {
        self.eat_kw("SELECT")?;
        self.eat_kw("DISTINCT")?;
        let mut items = vec![self.operand()?];
        while self.toks.get(self.pos) == Some(&Tok::Comma) {
            self.pos += 1;
            items.push(self.operand()?);
        }
        self.eat_kw("FROM")?;
        let mut from = Vec::new();
        loop {
            let table = self.ident()?;
            let alias = self.ident()?;
            from.push((table, alias));
            if self.toks.get(self.pos) == Some(&Tok::Comma) {
                self.pos += 1;
            } else {
                break;
            }
        }
        let mut preds = Vec::new();
        if self.peek_kw("WHERE") {
            self.pos += 1;
            loop {
                let l = self.operand()?;
                self.eat(Tok::Eq, "`=`")?;
                let r = self.operand()?;
                preds.push((l, r));
                if self.peek_kw("AND") {
                    self.pos += 1;
                } else {
                    break;
                }
            }
        }
        Ok(SelectBlock { items, from, preds })
    }
}

pub(crate) fn parse_sql(sql: &SqlText) -> Result<Vec<SelectBlock>, StoreError> {
    let toks = tokenize(&sql.text)?;
    let mut p = Parser { toks, pos: 0 };
    let mut blocks = vec![p.block()?];
    while p.peek_kw("UNION") {
        p.pos += 1;
        blocks.push(p.block()?);
    }
    if p.pos != p.toks.len() {
        return Err(StoreError::DialectViolation("trailing tokens after query".into()));
    }
    let arity = blocks[0].items.len();
    if blocks.iter().any(|b| b.items.len() != arity) {
        return Err(StoreError::DialectViolation("UNION blocks differ in arity".into()));
    }
    Ok(blocks)
}

/// Escape a literal for embedding in the minimal dialect.
pub fn escape_literal(s: &str) -> String {
    s.replace('\'', "''")
}
