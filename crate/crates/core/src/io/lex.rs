use super::IoError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Int(String),
    Sym(char),
    Newline,
    Eof,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug)]
pub(crate) struct Lexed {
    pub tokens: Vec<Token>,
    /// Comment lines (verbatim, `#` included) that precede every token.
    pub header: Vec<String>,
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '\'' | '.')
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(is_ident_start) && chars.all(is_ident_char)
}

pub(crate) fn lex(text: &str) -> Result<Lexed, IoError> {
    let mut tokens = Vec::new();
    let mut header = Vec::new();
    for (li, raw) in text.lines().enumerate() {
        let line = li + 1;
        let chars: Vec<char> = raw.chars().collect();
        let mut i = 0;
        let before = tokens.len();
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            if c == '#' {
                if tokens.is_empty() {
                    header.push(raw.trim_end().to_string());
                }
                break;
            }
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            let tok = if is_ident_start(c) {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                Tok::Ident(chars[start..i].iter().collect())
            } else if c.is_ascii_digit() || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
                let start = i;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                Tok::Int(chars[start..i].iter().collect())
            } else if "=/(),:{}".contains(c) {
                i += 1;
                Tok::Sym(c)
            } else {
                return Err(IoError::syntax(line, col, format!("unexpected character `{c}`")));
            };
            tokens.push(Token { tok, line, col });
        }
        if tokens.len() > before {
            tokens.push(Token {
                tok: Tok::Newline,
                line,
                col: chars.len() + 1,
            });
        }
    }
    let line = text.lines().count() + 1;
    tokens.push(Token { tok: Tok::Eof, line, col: 1 });
    Ok(Lexed { tokens, header })
}

/// Cursor over a token stream.
pub(crate) struct Cursor {
    tokens: Vec<Token>,
    pos: usize,
}

impl Cursor {
    pub fn new(tokens: Vec<Token>) -> Cursor {
        Cursor { tokens, pos: 0 }
    }

    pub fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    pub fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    pub fn skip_newlines(&mut self) {
        while self.peek().tok == Tok::Newline {
            self.pos += 1;
        }
    }

    pub fn error(&self, message: impl Into<String>) -> IoError {
        let t = self.peek();
        IoError::syntax(t.line, t.col, message)
    }

    pub fn ident(&mut self, what: &str) -> Result<(String, Token), IoError> {
        match self.peek().tok.clone() {
            Tok::Ident(s) => Ok((s, self.next())),
            _ => Err(self.error(format!("expected {what}"))),
        }
    }

    pub fn sym(&mut self, c: char) -> Result<(), IoError> {
        if self.peek().tok == Tok::Sym(c) {
            self.next();
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    pub fn eat_sym(&mut self, c: char) -> bool {
        if self.peek().tok == Tok::Sym(c) {
            self.next();
            true
        } else {
            false
        }
    }

    pub fn end_of_statement(&mut self) -> Result<(), IoError> {
        match self.peek().tok {
            Tok::Newline => {
                self.next();
                Ok(())
            }
            Tok::Eof => Ok(()),
            _ => Err(self.error("expected end of line")),
        }
    }

    /// `<int>` or `<int>/<int>` with a positive denominator.
    pub fn rational(&mut self) -> Result<crate::Rational, IoError> {
        let t = self.peek().clone();
        let Tok::Int(n) = t.tok.clone() else {
            return Err(self.error("expected a number"));
        };
        self.next();
        let mut text = n;
        if self.eat_sym('/') {
            let d = self.peek().clone();
            let Tok::Int(d) = d.tok else {
                return Err(self.error("expected a denominator"));
            };
            self.next();
            text = format!("{text}/{d}");
        }
        crate::scalar::parse_rational(&text)
            .ok_or_else(|| IoError::syntax(t.line, t.col, format!("invalid number `{text}`")))
    }
}
