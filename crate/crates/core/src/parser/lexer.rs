use std::fmt;

use super::{ParseError, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Token {
    /// Lowercase-initial identifier (leading underscores allowed).
    Ident(String),
    /// Uppercase-initial identifier; only lexed so we can reject it cleanly.
    Variable(String),
    Int(u64),
    Dot,
    DotDot,
    If,
    Colon,
    Comma,
    Semi,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Amp,
    Star,
    Minus,
    Le,
    Eq,
    Ne,
    Lt,
    Gt,
    Ge,
    Assign,
    Eof,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Ident(s) | Token::Variable(s) => write!(f, "`{s}`"),
            Token::Int(n) => write!(f, "`{n}`"),
            Token::Eof => f.write_str("end of input"),
            other => write!(f, "`{}`", other.text()),
        }
    }
}

impl Token {
    pub(crate) fn text(&self) -> &'static str {
        match self {
            Token::Ident(_) => "identifier",
            Token::Variable(_) => "variable",
            Token::Int(_) => "integer",
            Token::Dot => ".",
            Token::DotDot => "..",
            Token::If => ":-",
            Token::Colon => ":",
            Token::Comma => ",",
            Token::Semi => ";",
            Token::LBrace => "{",
            Token::RBrace => "}",
            Token::LParen => "(",
            Token::RParen => ")",
            Token::Amp => "&",
            Token::Star => "*",
            Token::Minus => "-",
            Token::Le => "<=",
            Token::Eq => "=",
            Token::Ne => "!=",
            Token::Lt => "<",
            Token::Gt => ">",
            Token::Ge => ">=",
            Token::Assign => "=:",
            Token::Eof => "end of input",
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Spanned {
    pub token: Token,
    pub span: SourceSpan,
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut pos = 0;
    let mut line = 1;
    let mut line_start = 0;

    while pos < bytes.len() {
        let c = bytes[pos];
        if c == b'\n' {
            pos += 1;
            line += 1;
            line_start = pos;
            continue;
        }
        if c.is_ascii_whitespace() {
            pos += 1;
            continue;
        }
        if c == b'%' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
            continue;
        }
        let start = pos;
        let column = text[line_start..start].chars().count() + 1;
        let two = bytes.get(pos + 1).copied();
        let (token, len) = match c {
            b'.' if two == Some(b'.') => (Token::DotDot, 2),
            b'.' => (Token::Dot, 1),
            b':' if two == Some(b'-') => (Token::If, 2),
            b':' => (Token::Colon, 1),
            b',' => (Token::Comma, 1),
            b';' => (Token::Semi, 1),
            b'{' => (Token::LBrace, 1),
            b'}' => (Token::RBrace, 1),
            b'(' => (Token::LParen, 1),
            b')' => (Token::RParen, 1),
            b'&' => (Token::Amp, 1),
            b'*' => (Token::Star, 1),
            b'-' => (Token::Minus, 1),
            b'<' if two == Some(b'=') => (Token::Le, 2),
            b'<' => (Token::Lt, 1),
            b'>' if two == Some(b'=') => (Token::Ge, 2),
            b'>' => (Token::Gt, 1),
            b'!' if two == Some(b'=') => (Token::Ne, 2),
            b'=' if two == Some(b':') => (Token::Assign, 2),
            b'=' => (Token::Eq, 1),
            b'0'..=b'9' => {
                let mut end = pos;
                while end < bytes.len() && bytes[end].is_ascii_digit() {
                    end += 1;
                }
                let lit = &text[pos..end];
                let n = lit.parse::<u64>().map_err(|_| {
                    ParseError::new(
                        SourceSpan {
                            start,
                            end,
                            line,
                            column,
                        },
                        format!("integer literal `{lit}` is out of range"),
                        vec![],
                    )
                })?;
                (Token::Int(n), end - pos)
            }
            b'_' | b'a'..=b'z' | b'A'..=b'Z' => {
                let mut end = pos;
                while end < bytes.len() && bytes[end] == b'_' {
                    end += 1;
                }
                let first = bytes.get(end).copied();
                while end < bytes.len()
                    && (bytes[end].is_ascii_alphanumeric()
                        || bytes[end] == b'_'
                        || bytes[end] == b'\'')
                {
                    end += 1;
                }
                let word = text[pos..end].to_string();
                let token = match first {
                    Some(f) if f.is_ascii_lowercase() => Token::Ident(word),
                    Some(f) if f.is_ascii_uppercase() => Token::Variable(word),
                    _ => {
                        return Err(ParseError::new(
                            SourceSpan {
                                start,
                                end,
                                line,
                                column,
                            },
                            format!("`{word}` is not an identifier"),
                            vec![],
                        ))
                    }
                };
                (token, end - pos)
            }
            _ => {
                let ch = text[pos..].chars().next().unwrap_or('?');
                let end = pos + ch.len_utf8();
                return Err(ParseError::new(
                    SourceSpan {
                        start,
                        end,
                        line,
                        column,
                    },
                    format!("unexpected character `{ch}`"),
                    vec![],
                ));
            }
        };
        pos += len;
        out.push(Spanned {
            token,
            span: SourceSpan {
                start,
                end: pos,
                line,
                column,
            },
        });
    }
    let column = text[line_start..].chars().count() + 1;
    out.push(Spanned {
        token: Token::Eof,
        span: SourceSpan {
            start: bytes.len(),
            end: bytes.len(),
            line,
            column,
        },
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(s: &str) -> Vec<Token> {
        tokenize(s).unwrap().into_iter().map(|t| t.token).collect()
    }

    #[test]
    fn compound_operators() {
        assert_eq!(
            kinds("1..3 =: :- <= >= != = : ."),
            vec![
                Token::Int(1),
                Token::DotDot,
                Token::Int(3),
                Token::Assign,
                Token::If,
                Token::Le,
                Token::Ge,
                Token::Ne,
                Token::Eq,
                Token::Colon,
                Token::Dot,
                Token::Eof
            ]
        );
    }

    #[test]
    fn comments_and_positions() {
        let toks = tokenize("% hello\n  ab").unwrap();
        assert_eq!(toks[0].token, Token::Ident("ab".into()));
        assert_eq!(toks[0].span.line, 2);
        assert_eq!(toks[0].span.column, 3);
        assert_eq!(toks[0].span.start, 10);
    }

    #[test]
    fn identifiers_and_variables() {
        assert_eq!(
            kinds("__flingo_y_1")[0],
            Token::Ident("__flingo_y_1".into())
        );
        assert_eq!(kinds("Foo")[0], Token::Variable("Foo".into()));
        assert!(tokenize("a $ b").is_err());
        assert!(tokenize("99999999999999999999999").is_err());
    }
}
