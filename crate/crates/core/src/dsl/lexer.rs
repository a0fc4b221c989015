use super::{ParseError, Span};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Nat(u64),
    Semi,
    Eq,
    Colon,
    Arrow,
    Bar,
    Amp,
    Dot,
    Minus,
    Caret,
    Star,
    Comma,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Nat(n) => format!("`{n}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.symbol()),
        }
    }

    pub fn symbol(&self) -> &'static str {
        match self {
            Tok::Semi => ";",
            Tok::Eq => "=",
            Tok::Colon => ":",
            Tok::Arrow => "<->",
            Tok::Bar => "|",
            Tok::Amp => "&",
            Tok::Dot => ".",
            Tok::Minus => "-",
            Tok::Caret => "^",
            Tok::Star => "*",
            Tok::Comma => ",",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrack => "[",
            Tok::RBrack => "]",
            Tok::Ident(_) => "identifier",
            Tok::Nat(_) => "number",
            Tok::Eof => "end of input",
        }
    }
}

pub fn tokenize(text: &str) -> Result<Vec<(Tok, Span)>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1u32, 1u32);
    while i < chars.len() {
        let c = chars[i];
        let span = Span { line, col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += (i - start) as u32;
            out.push((Tok::Ident(chars[start..i].iter().collect()), span));
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let n = s.parse().map_err(|_| ParseError {
                span,
                found: format!("`{s}`"),
                expected: vec!["a number below 2^64".into()],
            })?;
            col += (i - start) as u32;
            out.push((Tok::Nat(n), span));
            continue;
        }
        if c == '<' && chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') {
            i += 3;
            col += 3;
            out.push((Tok::Arrow, span));
            continue;
        }
        let tok = match c {
            ';' => Tok::Semi,
            '=' => Tok::Eq,
            ':' => Tok::Colon,
            '|' => Tok::Bar,
            '&' => Tok::Amp,
            '.' => Tok::Dot,
            '-' => Tok::Minus,
            '^' => Tok::Caret,
            '*' => Tok::Star,
            ',' => Tok::Comma,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBrack,
            ']' => Tok::RBrack,
            other => {
                return Err(ParseError {
                    span,
                    found: format!("`{other}`"),
                    expected: vec!["a token".into()],
                })
            }
        };
        i += 1;
        col += 1;
        out.push((tok, span));
    }
    out.push((Tok::Eof, Span { line, col }));
    Ok(out)
}
