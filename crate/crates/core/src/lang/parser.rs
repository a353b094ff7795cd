//! Recursive-descent parser.
//!
//! ```text
//! program := stmt*                       (statements may be separated by `;`)
//! stmt    := decl | let | check | expr
//! decl    := "kind" IDENT | "matoms" IDENT ":" IDENT "^" INT | "catom" IDENT
//! let     := "let" IDENT "=" expr
//! check   := "check" expr
//! expr    := IDENT | INT | qsetlit | IDENT "(" args ")"
//! qsetlit := "{" (elem ("," elem)*)? "}"
//! elem    := expr ("^" INT)?
//! ```

use std::fmt;

use super::lexer::{Span, Token, TokenKind};
use super::LangError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub stmts: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stmt {
    pub node: StmtKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StmtKind {
    KindDecl(Ident),
    MAtomDecl {
        name: Ident,
        kind: Ident,
        count: u64,
    },
    CAtomDecl(Ident),
    Let {
        name: Ident,
        value: Expr,
    },
    Check(Expr),
    Expr(Expr),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expr {
    pub node: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    Name(String),
    Int(u64),
    QSetLit(Vec<ElemTerm>),
    App { op: Op, args: Vec<Expr> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElemTerm {
    pub expr: Expr,
    pub count: u64,
    pub span: Span,
}

macro_rules! ops {
    ($($variant:ident => $name:literal, $min:literal ..= $max:literal;)*) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum Op { $($variant),* }

        impl Op {
            pub const ALL: &'static [Op] = &[$(Op::$variant),*];

            pub fn name(self) -> &'static str {
                match self { $(Op::$variant => $name),* }
            }

            pub fn arity(self) -> (usize, usize) {
                match self { $(Op::$variant => ($min, $max)),* }
            }

            pub fn from_name(s: &str) -> Option<Op> {
                match s { $($name => Some(Op::$variant),)* _ => None }
            }
        }
    };
}

ops! {
    Indist => "indist", 2..=2;
    Qc => "qc", 1..=1;
    Classical => "classical", 1..=1;
    Mem => "mem", 2..=2;
    Pow => "pow", 1..=1;
    Sing => "sing", 2..=2;
    Pair => "pair", 3..=3;
    OPair => "opair", 3..=3;
    Prod => "prod", 2..=2;
    Union => "union", 2..=2;
    BigUnion => "bigunion", 1..=1;
    QFun => "qfun", 3..=3;
    IdQ => "idq", 1..=1;
    Comp => "comp", 2..=2;
    QEquiv => "qequiv", 2..=2;
    Build => "build", 1..=2;
    Audit => "audit", 1..=1;
    Classify => "classify", 2..=2;
    Small => "small", 2..=3;
    Pp => "pp", 2..=2;
    Eq => "eq", 2..=2;
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    eof: Span,
}

fn describe(t: Option<&Token>) -> String {
    match t {
        None => "end of input".into(),
        Some(t) => match t.kind {
            TokenKind::Integer => format!("integer `{}`", t.text),
            TokenKind::String => format!("string \"{}\"", t.text),
            _ => format!("`{}`", t.text),
        },
    }
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.toks.get(self.pos)
    }

    fn peek_at(&self, n: usize) -> Option<&'a Token> {
        self.toks.get(self.pos + n)
    }

    fn here(&self) -> Span {
        self.peek().map(|t| t.span).unwrap_or(self.eof)
    }

    fn bump(&mut self) -> Option<&'a Token> {
        let t = self.toks.get(self.pos);
        self.pos += 1;
        t
    }

    fn fail<T>(&self, expected: &[&str]) -> Result<T, LangError> {
        Err(LangError::Parse {
            span: self.here(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: describe(self.peek()),
        })
    }

    fn punct(&mut self, p: &str) -> Result<Span, LangError> {
        match self.peek() {
            Some(t) if t.is_punct(p) => {
                self.pos += 1;
                Ok(t.span)
            }
            _ => self.fail(&[&format!("`{p}`")]),
        }
    }

    fn ident(&mut self) -> Result<Ident, LangError> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Ident => {
                self.pos += 1;
                Ok(Ident {
                    name: t.text.clone(),
                    span: t.span,
                })
            }
            _ => self.fail(&["identifier"]),
        }
    }

    fn positive_int(&mut self) -> Result<(u64, Span), LangError> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Integer => {
                let n: u64 = t.text.parse().expect("checked by the lexer");
                if n == 0 {
                    return Err(LangError::Parse {
                        span: t.span,
                        expected: vec!["positive integer".into()],
                        found: describe(Some(t)),
                    });
                }
                self.pos += 1;
                Ok((n, t.span))
            }
            _ => self.fail(&["positive integer"]),
        }
    }

    fn program(&mut self) -> Result<Program, LangError> {
        let mut stmts = Vec::new();
        while let Some(t) = self.peek() {
            if t.is_punct(";") {
                self.pos += 1;
                continue;
            }
            stmts.push(self.stmt()?);
        }
        Ok(Program { stmts })
    }

    fn stmt(&mut self) -> Result<Stmt, LangError> {
        let start = self.here();
        let t = self.peek().expect("caller checked");
        let node = if t.is_keyword("kind") {
            self.bump();
            StmtKind::KindDecl(self.ident()?)
        } else if t.is_keyword("matoms") {
            self.bump();
            let name = self.ident()?;
            self.punct(":")?;
            let kind = self.ident()?;
            self.punct("^")?;
            let (count, _) = self.positive_int()?;
            StmtKind::MAtomDecl { name, kind, count }
        } else if t.is_keyword("catom") {
            self.bump();
            StmtKind::CAtomDecl(self.ident()?)
        } else if t.is_keyword("let") {
            self.bump();
            let name = self.ident()?;
            self.punct("=")?;
            StmtKind::Let {
                name,
                value: self.expr()?,
            }
        } else if t.is_keyword("check") {
            self.bump();
            StmtKind::Check(self.expr()?)
        } else {
            StmtKind::Expr(self.expr()?)
        };
        let end = self.toks[self.pos - 1].span;
        Ok(Stmt {
            node,
            span: start.to(end),
        })
    }

    fn expr(&mut self) -> Result<Expr, LangError> {
        let Some(t) = self.peek() else {
            return self.fail(&["expression"]);
        };
        match t.kind {
            TokenKind::Integer => {
                self.pos += 1;
                Ok(Expr {
                    node: ExprKind::Int(t.text.parse().expect("checked by the lexer")),
                    span: t.span,
                })
            }
            TokenKind::Ident => {
                if self.peek_at(1).is_some_and(|n| n.is_punct("(")) {
                    self.app()
                } else {
                    self.pos += 1;
                    Ok(Expr {
                        node: ExprKind::Name(t.text.clone()),
                        span: t.span,
                    })
                }
            }
            TokenKind::Punct if t.text == "{" => self.qset_lit(),
            _ => self.fail(&["expression"]),
        }
    }

    fn app(&mut self) -> Result<Expr, LangError> {
        let name = self.ident()?;
        let Some(op) = Op::from_name(&name.name) else {
            let expected: Vec<String> = Op::ALL.iter().map(|o| o.name().to_string()).collect();
            return Err(LangError::Parse {
                span: name.span,
                expected,
                found: format!("`{}`", name.name),
            });
        };
        self.punct("(")?;
        let mut args = Vec::new();
        if !self.peek().is_some_and(|t| t.is_punct(")")) {
            args.push(self.expr()?);
            while self.peek().is_some_and(|t| t.is_punct(",")) {
                self.pos += 1;
                args.push(self.expr()?);
            }
        }
        let close = match self.peek() {
            Some(t) if t.is_punct(")") => {
                self.pos += 1;
                t.span
            }
            _ => return self.fail(&["`,`", "`)`"]),
        };
        let span = name.span.to(close);
        let (min, max) = op.arity();
        if args.len() < min || args.len() > max {
            let want = if min == max {
                format!("{min}")
            } else {
                format!("{min} to {max}")
            };
            return Err(LangError::Parse {
                span,
                expected: vec![format!("{want} argument(s) for `{op}`")],
                found: format!("{} argument(s)", args.len()),
            });
        }
        Ok(Expr {
            node: ExprKind::App { op, args },
            span,
        })
    }

    fn qset_lit(&mut self) -> Result<Expr, LangError> {
        let open = self.punct("{")?;
        let mut elems = Vec::new();
        if let Some(t) = self.peek() {
            if t.is_punct("}") {
                self.pos += 1;
                return Ok(Expr {
                    node: ExprKind::QSetLit(elems),
                    span: open.to(t.span),
                });
            }
        }
        loop {
            if self.peek().is_none() || self.peek().is_some_and(|t| !starts_expr(t)) {
                return self.fail(&["element", "`}`"]);
            }
            let expr = self.expr()?;
            let mut span = expr.span;
            let mut count = 1;
            if self.peek().is_some_and(|t| t.is_punct("^")) {
                self.pos += 1;
                let (n, s) = self.positive_int()?;
                count = n;
                span = span.to(s);
            }
            elems.push(ElemTerm { expr, count, span });
            match self.peek() {
                Some(t) if t.is_punct(",") => {
                    self.pos += 1;
                }
                Some(t) if t.is_punct("}") => {
                    self.pos += 1;
                    return Ok(Expr {
                        node: ExprKind::QSetLit(elems),
                        span: open.to(t.span),
                    });
                }
                _ => return self.fail(&["`^`", "`,`", "`}`"]),
            }
        }
    }
}

fn starts_expr(t: &Token) -> bool {
    matches!(t.kind, TokenKind::Ident | TokenKind::Integer) || t.is_punct("{")
}

pub fn parse(tokens: &[Token]) -> Result<Program, LangError> {
    let eof = tokens
        .last()
        .map(|t| Span::new(t.span.end, t.span.end))
        .unwrap_or_default();
    Parser {
        toks: tokens,
        pos: 0,
        eof,
    }
    .program()
}

/// Parses a single expression covering all of `tokens`.
pub fn parse_expr(tokens: &[Token]) -> Result<Expr, LangError> {
    let eof = tokens
        .last()
        .map(|t| Span::new(t.span.end, t.span.end))
        .unwrap_or_default();
    let mut p = Parser {
        toks: tokens,
        pos: 0,
        eof,
    };
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.fail(&["end of input"]);
    }
    Ok(e)
}
