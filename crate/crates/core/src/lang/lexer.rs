use serde::Serialize;

use super::LangError;

/// Byte range into the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn to(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Ident,
    Integer,
    Keyword,
    Punct,
    String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub span: Span,
}

impl Token {
    pub fn is_punct(&self, p: &str) -> bool {
        self.kind == TokenKind::Punct && self.text == p
    }

    pub fn is_keyword(&self, k: &str) -> bool {
        self.kind == TokenKind::Keyword && self.text == k
    }
}

pub const KEYWORDS: &[&str] = &["kind", "matoms", "catom", "let", "check"];
const PUNCT: &str = "(){},^:;=";

/// Splits source text into tokens. Whitespace and `#` comments are dropped.
pub fn tokenize(src: &str) -> Result<Vec<Token>, LangError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c == b'#' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let text = &src[start..i];
            let kind = if KEYWORDS.contains(&text) {
                TokenKind::Keyword
            } else {
                TokenKind::Ident
            };
            out.push(Token {
                kind,
                text: text.to_string(),
                span: Span::new(start, i),
            });
        } else if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let text = &src[start..i];
            if text.parse::<u64>().is_err() {
                return Err(LangError::Lex {
                    span: Span::new(start, i),
                    message: format!("integer `{text}` is too large"),
                });
            }
            out.push(Token {
                kind: TokenKind::Integer,
                text: text.to_string(),
                span: Span::new(start, i),
            });
        } else if c == b'"' {
            i += 1;
            loop {
                match bytes.get(i) {
                    None | Some(b'\n') => {
                        return Err(LangError::Lex {
                            span: Span::new(start, i),
                            message: "unterminated string".into(),
                        })
                    }
                    Some(b'"') => {
                        i += 1;
                        break;
                    }
                    Some(b'\\') => i += 2,
                    Some(_) => i += 1,
                }
            }
            out.push(Token {
                kind: TokenKind::String,
                text: src[start + 1..i - 1].to_string(),
                span: Span::new(start, i),
            });
        } else if PUNCT.as_bytes().contains(&c) {
            i += 1;
            out.push(Token {
                kind: TokenKind::Punct,
                text: (c as char).to_string(),
                span: Span::new(start, i),
            });
        } else {
            let ch = src[start..].chars().next().expect("in bounds");
            return Err(LangError::Lex {
                span: Span::new(start, start + ch.len_utf8()),
                message: format!("illegal character `{ch}`"),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<(TokenKind, String)> {
        tokenize(src)
            .unwrap()
            .into_iter()
            .map(|t| (t.kind, t.text))
            .collect()
    }

    #[test]
    fn application() {
        use TokenKind::*;
        assert_eq!(
            kinds("qc(x)"),
            vec![
                (Ident, "qc".into()),
                (Punct, "(".into()),
                (Ident, "x".into()),
                (Punct, ")".into())
            ]
        );
    }

    #[test]
    fn literal_with_count() {
        let toks = tokenize("{a, a, b^2}").unwrap();
        assert_eq!(toks.len(), 9);
        assert_eq!(toks[7].kind, TokenKind::Integer);
        assert_eq!(toks[7].text, "2");
    }

    #[test]
    fn illegal_character_has_span() {
        let err = tokenize("qc(λ)").unwrap_err();
        assert_eq!(err.span(), Span::new(3, 5));
    }

    #[test]
    fn comments_and_keywords() {
        let toks = tokenize("kind K # a kind\ncheck x").unwrap();
        assert_eq!(toks.len(), 4);
        assert!(toks[0].is_keyword("kind"));
        assert!(toks[2].is_keyword("check"));
        assert_eq!(toks[3].span, Span::new(22, 23));
    }

    #[test]
    fn spans_cover_token_text() {
        let src = "let s = pow({m^2, A1})  # trailing";
        for t in tokenize(src).unwrap() {
            let raw = &src[t.span.start..t.span.end];
            assert_eq!(raw, t.text);
        }
    }

    #[test]
    fn strings() {
        let toks = tokenize(r#""a b" x"#).unwrap();
        assert_eq!(toks[0].kind, TokenKind::String);
        assert_eq!(toks[0].text, "a b");
        assert!(tokenize("\"open").is_err());
    }
}
