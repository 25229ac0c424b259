//! Tokenizer and s-expression tree builder.

use super::ast::SourcePos;
use super::SyntaxError;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Atom {
    Int(i64),
    Bool(bool),
    Str(String),
    Symbol(String),
}

#[derive(Debug, Clone)]
pub(crate) enum Sexp {
    Atom(Atom, SourcePos),
    List(Vec<Sexp>, SourcePos),
    Quote(Box<Sexp>, SourcePos),
}

impl Sexp {
    pub(crate) fn pos(&self) -> SourcePos {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) | Sexp::Quote(_, p) => *p,
        }
    }

    pub(crate) fn as_symbol(&self) -> Option<&str> {
        match self {
            Sexp::Atom(Atom::Symbol(s), _) => Some(s),
            _ => None,
        }
    }
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    column: u32,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor {
            chars: text.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn pos(&self) -> SourcePos {
        SourcePos {
            line: self.line,
            column: self.column,
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }
}

fn is_delimiter(c: char) -> bool {
    c.is_whitespace() || matches!(c, '(' | ')' | '[' | ']' | '\'' | '"' | ';')
}

/// Reads every datum in `text`.
pub(crate) fn read_all(text: &str) -> Result<Vec<Sexp>, SyntaxError> {
    let mut cursor = Cursor::new(text);
    let mut out = Vec::new();
    loop {
        cursor.skip_trivia();
        if cursor.peek().is_none() {
            return Ok(out);
        }
        out.push(read_one(&mut cursor)?);
    }
}

fn read_one(cursor: &mut Cursor<'_>) -> Result<Sexp, SyntaxError> {
    cursor.skip_trivia();
    let pos = cursor.pos();
    let Some(c) = cursor.peek() else {
        return Err(SyntaxError::new(pos, "unexpected end of input"));
    };
    match c {
        '(' | '[' => {
            cursor.bump();
            let close = if c == '(' { ')' } else { ']' };
            let mut items = Vec::new();
            loop {
                cursor.skip_trivia();
                match cursor.peek() {
                    None => {
                        return Err(SyntaxError::new(pos, format!("unbalanced '{c}': missing '{close}'")))
                    }
                    Some(d) if d == close => {
                        cursor.bump();
                        return Ok(Sexp::List(items, pos));
                    }
                    Some(d @ (')' | ']')) => {
                        return Err(SyntaxError::new(
                            cursor.pos(),
                            format!("mismatched '{d}' closing '{c}' opened at {pos}"),
                        ))
                    }
                    Some(_) => items.push(read_one(cursor)?),
                }
            }
        }
        ')' | ']' => Err(SyntaxError::new(pos, format!("unexpected '{c}'"))),
        '\'' => {
            cursor.bump();
            let quoted = read_one(cursor)?;
            Ok(Sexp::Quote(Box::new(quoted), pos))
        }
        '"' => {
            cursor.bump();
            let mut s = String::new();
            loop {
                match cursor.bump() {
                    None => return Err(SyntaxError::new(pos, "unterminated string literal")),
                    Some('"') => break,
                    Some('\\') => match cursor.bump() {
                        Some('n') => s.push('\n'),
                        Some('t') => s.push('\t'),
                        Some('\\') => s.push('\\'),
                        Some('"') => s.push('"'),
                        Some(other) => {
                            return Err(SyntaxError::new(cursor.pos(), format!("unknown escape '\\{other}'")))
                        }
                        None => return Err(SyntaxError::new(pos, "unterminated string literal")),
                    },
                    Some(ch) => s.push(ch),
                }
            }
            Ok(Sexp::Atom(Atom::Str(s), pos))
        }
        _ => {
            let mut token = String::new();
            while let Some(ch) = cursor.peek() {
                if is_delimiter(ch) {
                    break;
                }
                token.push(ch);
                cursor.bump();
            }
            Ok(Sexp::Atom(classify(&token, pos)?, pos))
        }
    }
}

fn classify(token: &str, pos: SourcePos) -> Result<Atom, SyntaxError> {
    match token {
        "true" | "#t" => return Ok(Atom::Bool(true)),
        "false" | "#f" => return Ok(Atom::Bool(false)),
        _ => {}
    }
    let digits = token.strip_prefix(['-', '+']).unwrap_or(token);
    if !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit()) {
        return token
            .parse::<i64>()
            .map(Atom::Int)
            .map_err(|_| SyntaxError::new(pos, format!("integer literal out of range: {token}")));
    }
    if token.starts_with('#') {
        return Err(SyntaxError::new(pos, format!("unknown literal {token}")));
    }
    Ok(Atom::Symbol(token.to_string()))
}
