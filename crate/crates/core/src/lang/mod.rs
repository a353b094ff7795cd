//! The `.qst` expression language: lexer, parser and evaluator.

mod eval;
mod lexer;
mod parser;

pub use eval::{EvalError, Report, Session, StmtResult, Value};
pub use lexer::{tokenize, Span, Token, TokenKind, KEYWORDS};
pub use parser::{parse, parse_expr, ElemTerm, Expr, ExprKind, Ident, Op, Program, Stmt, StmtKind};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LangError {
    #[error("{message}")]
    Lex { span: Span, message: String },
    #[error("expected {}, found {found}", .expected.join(" or "))]
    Parse {
        span: Span,
        expected: Vec<String>,
        found: String,
    },
    #[error("{error}")]
    Eval { span: Span, error: EvalError },
}

impl LangError {
    pub fn span(&self) -> Span {
        match self {
            LangError::Lex { span, .. }
            | LangError::Parse { span, .. }
            | LangError::Eval { span, .. } => *span,
        }
    }

    pub fn phase(&self) -> &'static str {
        match self {
            LangError::Lex { .. } => "lex error",
            LangError::Parse { .. } => "parse error",
            LangError::Eval { .. } => "error",
        }
    }
}

/// 1-based line and column of a byte offset.
pub fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(src.len());
    let before = &src[..offset];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}
