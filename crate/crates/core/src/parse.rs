//! Line-oriented functional syntax for ontologies.
//!
//! One statement per line is the convention, but the tokenizer is
//! whitespace-driven, so several statements on one line also parse.
//! `#` starts a comment running to end of line.

use crate::model::{ABoxAssertion, Axiom, ClassExpr, Ontology, OntologyError};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Lit(String),
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-' || c == '.' || c == ':'
}

fn tokenize(text: &str) -> Result<Vec<Spanned>, OntologyError> {
    let mut toks = Vec::new();
    for (lno, line) in text.lines().enumerate() {
        let line_no = lno + 1;
        let mut chars = line.char_indices().peekable();
        while let Some(&(idx, c)) = chars.peek() {
            let col = idx + 1;
            match c {
                '#' => break,
                c if c.is_whitespace() => {
                    chars.next();
                }
                '(' => {
                    chars.next();
                    toks.push(Spanned { tok: Tok::LParen, line: line_no, col });
                }
                ')' => {
                    chars.next();
                    toks.push(Spanned { tok: Tok::RParen, line: line_no, col });
                }
                '"' => {
                    chars.next();
                    let mut s = String::new();
                    let mut closed = false;
                    for (_, c2) in chars.by_ref() {
                        if c2 == '"' {
                            closed = true;
                            break;
                        }
                        s.push(c2);
                    }
                    if !closed {
                        return Err(OntologyError::Syntax {
                            line: line_no,
                            col,
                            msg: "unterminated string literal".into(),
                        });
                    }
                    toks.push(Spanned { tok: Tok::Lit(s), line: line_no, col });
                }
                c if is_ident_start(c) => {
                    let mut s = String::new();
                    while let Some(&(_, c2)) = chars.peek() {
                        if is_ident_char(c2) {
                            s.push(c2);
                            chars.next();
                        } else {
                            break;
                        }
                    }
                    toks.push(Spanned { tok: Tok::Ident(s), line: line_no, col });
                }
                other => {
                    return Err(OntologyError::Syntax {
                        line: line_no,
                        col,
                        msg: format!("unexpected character `{other}`"),
                    });
                }
            }
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn err_here(&self, msg: &str) -> OntologyError {
        match self.peek() {
            Some(s) => OntologyError::Syntax { line: s.line, col: s.col, msg: msg.into() },
            None => {
                let (line, col) = self
                    .toks
                    .last()
                    .map(|s| (s.line, s.col + 1))
                    .unwrap_or((1, 1));
                OntologyError::Syntax { line, col, msg: format!("{msg} (at end of input)") }
            }
        }
    }

    fn ident(&mut self) -> Result<String, OntologyError> {
        match self.peek() {
            Some(Spanned { tok: Tok::Ident(s), .. }) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.err_here("expected a name")),
        }
    }

    fn literal(&mut self) -> Result<String, OntologyError> {
        match self.peek() {
            Some(Spanned { tok: Tok::Lit(s), .. }) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.err_here("expected a quoted literal")),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), OntologyError> {
        match self.peek() {
            Some(s) if s.tok == tok => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err_here(what)),
        }
    }

    fn class_expr(&mut self) -> Result<ClassExpr, OntologyError> {
        let name = self.ident()?;
        match name.as_str() {
            "Exists" | "ExistsInv" => {
                self.expect(Tok::LParen, "expected `(`")?;
                let p = self.ident()?;
                self.expect(Tok::RParen, "expected `)`")?;
                if name == "Exists" {
                    Ok(ClassExpr::Exists(p))
                } else {
                    Ok(ClassExpr::ExistsInv(p))
                }
            }
            _ => Ok(ClassExpr::Named(name)),
        }
    }
}

/// Statement as parsed, before name resolution.
enum Stmt {
    DeclClass(String),
    DeclObjProp(String),
    DeclDataProp(String),
    DeclIndividual(String),
    Axiom(Axiom),
    Assertion(ABoxAssertion),
}

fn parse_statements(text: &str) -> Result<Vec<Stmt>, OntologyError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0 };
    let mut stmts = Vec::new();
    while p.peek().is_some() {
        let head = p.ident()?;
        p.expect(Tok::LParen, "expected `(`")?;
        let stmt = match head.as_str() {
            "Class" => Stmt::DeclClass(p.ident()?),
            "ObjectProperty" => Stmt::DeclObjProp(p.ident()?),
            "DataProperty" => Stmt::DeclDataProp(p.ident()?),
            "Individual" => Stmt::DeclIndividual(p.ident()?),
            "SubClassOf" => {
                let a = p.class_expr()?;
                let b = p.class_expr()?;
                Stmt::Axiom(Axiom::SubClassOf(a, b))
            }
            "SubPropertyOf" => Stmt::Axiom(Axiom::SubPropertyOf(p.ident()?, p.ident()?)),
            "Domain" => Stmt::Axiom(Axiom::Domain(p.ident()?, p.ident()?)),
            "Range" => Stmt::Axiom(Axiom::Range(p.ident()?, p.ident()?)),
            "InverseOf" => Stmt::Axiom(Axiom::InverseOf(p.ident()?, p.ident()?)),
            "DisjointClasses" => Stmt::Axiom(Axiom::DisjointClasses(p.ident()?, p.ident()?)),
            "ConditionalType" => {
                let body_class = p.ident()?;
                let prop = p.ident()?;
                let value = p.literal()?;
                let head_class = p.ident()?;
                Stmt::Axiom(Axiom::ConditionalType { body_class, prop, value, head_class })
            }
            "ClassAssertion" => Stmt::Assertion(ABoxAssertion::Class(p.ident()?, p.ident()?)),
            "ObjectAssertion" => {
                Stmt::Assertion(ABoxAssertion::Object(p.ident()?, p.ident()?, p.ident()?))
            }
            "DataAssertion" => {
                let s = p.ident()?;
                let prop = p.ident()?;
                let v = p.literal()?;
                Stmt::Assertion(ABoxAssertion::Data(s, prop, v))
            }
            other => {
                p.pos -= 1; // point the error at the head token
                return Err(p.err_here(&format!("unknown statement `{other}`")));
            }
        };
        p.expect(Tok::RParen, "expected `)`")?;
        stmts.push(stmt);
    }
    Ok(stmts)
}

/// Parse an ontology from its concrete syntax.
///
/// Resolution is two-pass: declarations are collected first, so statements
/// may reference names declared later in the file.
pub fn parse_ontology(text: &str) -> Result<Ontology, OntologyError> {
    let stmts = parse_statements(text)?;
    let mut o = Ontology::new();
    for s in &stmts {
        match s {
            Stmt::DeclClass(n) => o.declare_class(n)?,
            Stmt::DeclObjProp(n) => o.declare_object_property(n)?,
            Stmt::DeclDataProp(n) => o.declare_data_property(n)?,
            Stmt::DeclIndividual(n) => o.declare_individual(n)?,
            _ => {}
        }
    }
    for s in stmts {
        match s {
            Stmt::Axiom(ax) => o.add_axiom(ax)?,
            Stmt::Assertion(a) => o.add_assertion(a)?,
            _ => {}
        }
    }
    Ok(o)
}
