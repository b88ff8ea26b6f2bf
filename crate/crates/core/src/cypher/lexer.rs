use super::error::{CypherError, Position};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Keyword,
    Identifier,
    StringLiteral,
    NumberLiteral,
    Punctuation,
    Operator,
}

/// One lexical token. For keywords `text` is upper-cased; string literals
/// hold the unescaped contents.
#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub offset: usize,
}

impl Token {
    pub fn is_keyword(&self, kw: &str) -> bool {
        self.kind == TokenKind::Keyword && self.text == kw
    }

    pub fn is_punct(&self, p: &str) -> bool {
        matches!(self.kind, TokenKind::Punctuation | TokenKind::Operator) && self.text == p
    }

    /// Words usable where a name is expected (labels, property keys).
    pub fn is_word(&self) -> bool {
        matches!(self.kind, TokenKind::Keyword | TokenKind::Identifier)
    }
}

pub const KEYWORDS: &[&str] = &[
    "MATCH", "WHERE", "RETURN", "DISTINCT", "AS", "ORDER", "BY", "ASC", "DESC", "LIMIT", "AND",
    "OR", "NOT", "IN", "CONTAINS", "COUNT", "COLLECT", "TRUE", "FALSE",
];

/// Reserved write clause heads. Recognized so they can be rejected outright.
pub const WRITE_KEYWORDS: &[&str] = &["CREATE", "MERGE", "SET", "DELETE", "REMOVE", "DROP", "DETACH"];

fn keyword(word: &str) -> Option<String> {
    let upper = word.to_ascii_uppercase();
    (KEYWORDS.contains(&upper.as_str()) || WRITE_KEYWORDS.contains(&upper.as_str())).then_some(upper)
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, CypherError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c == b'/' && bytes.get(i + 1) == Some(&b'/') {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let word = &text[start..i];
            let token = match keyword(word) {
                Some(kw) => Token { kind: TokenKind::Keyword, text: kw, offset: start },
                None => Token { kind: TokenKind::Identifier, text: word.to_string(), offset: start },
            };
            tokens.push(token);
            continue;
        }
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if bytes.get(i) == Some(&b'.') && bytes.get(i + 1).is_some_and(u8::is_ascii_digit) {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if matches!(bytes.get(i), Some(b'e' | b'E')) {
                let mut j = i + 1;
                if matches!(bytes.get(j), Some(b'+' | b'-')) {
                    j += 1;
                }
                if bytes.get(j).is_some_and(u8::is_ascii_digit) {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            tokens.push(Token {
                kind: TokenKind::NumberLiteral,
                text: text[start..i].to_string(),
                offset: start,
            });
            continue;
        }
        if c == b'\'' || c == b'"' {
            let (value, end) = lex_string(text, start)?;
            tokens.push(Token { kind: TokenKind::StringLiteral, text: value, offset: start });
            i = end;
            continue;
        }
        let two = text.get(i..i + 2);
        let (kind, len) = match (two, c) {
            (Some("<>" | "<=" | ">="), _) => (TokenKind::Operator, 2),
            (_, b'=' | b'<' | b'>' | b'-' | b'*') => (TokenKind::Operator, 1),
            (_, b'(' | b')' | b'[' | b']' | b'{' | b'}' | b':' | b',' | b'.' | b';') => {
                (TokenKind::Punctuation, 1)
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(CypherError::Lex {
                    at: Position::of(text, start),
                    message: format!("illegal character {ch:?}"),
                });
            }
        };
        tokens.push(Token { kind, text: text[i..i + len].to_string(), offset: start });
        i += len;
    }
    Ok(tokens)
}

fn lex_string(text: &str, start: usize) -> Result<(String, usize), CypherError> {
    let quote = text.as_bytes()[start] as char;
    let mut out = String::new();
    let mut chars = text[start + 1..].char_indices();
    while let Some((idx, ch)) = chars.next() {
        match ch {
            '\\' => {
                let (_, esc) = chars.next().ok_or_else(|| unterminated(text, start))?;
                out.push(match esc {
                    'n' => '\n',
                    't' => '\t',
                    'r' => '\r',
                    other => other,
                });
            }
            c if c == quote => return Ok((out, start + 1 + idx + 1)),
            c => out.push(c),
        }
    }
    Err(unterminated(text, start))
}

fn unterminated(text: &str, start: usize) -> CypherError {
    CypherError::Lex {
        at: Position::of(text, start),
        message: "unterminated string literal".into(),
    }
}
