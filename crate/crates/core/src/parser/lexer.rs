//! Indentation-aware tokenizer for the task-program subset of Python.

use super::ast::Span;
use super::{ParseError, ParseErrorKind};

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Name(String),
    Int(i64),
    Float(f64),
    Str(String),
    Op(&'static str),
    Newline,
    Indent,
    Dedent,
    Eof,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

// Longest first so that maximal munch works with a simple prefix scan.
const OPERATORS: &[&str] = &[
    "**=", "//=", ">>=", "<<=", "->", "**", "//", "==", "!=", "<=", ">=", "+=", "-=", "*=", "/=",
    "%=", "&=", "|=", "^=", ":=", "<<", ">>", "+", "-", "*", "/", "%", "<", ">", "=", "(", ")",
    "[", "]", "{", "}", ",", ":", ".", ";", "@", "&", "|", "^", "~",
];

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    Lexer::new(src).run()
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: u32,
    col: u32,
    depth: usize,
    indents: Vec<u32>,
    out: Vec<Token>,
}

impl Lexer {
    fn new(src: &str) -> Self {
        Lexer {
            chars: src.chars().collect(),
            pos: 0,
            line: 1,
            col: 1,
            depth: 0,
            indents: vec![0],
            out: Vec::new(),
        }
    }

    fn peek(&self, off: usize) -> Option<char> {
        self.chars.get(self.pos + off).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.pos).copied()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn here(&self) -> Span {
        Span::new(self.line, self.col)
    }

    fn err(&self, kind: ParseErrorKind, span: Span, msg: impl Into<String>) -> ParseError {
        ParseError::new(kind, span, msg)
    }

    fn push(&mut self, tok: Tok, span: Span) {
        self.out.push(Token { tok, span });
    }

    fn run(mut self) -> Result<Vec<Token>, ParseError> {
        let mut at_line_start = true;
        while self.pos < self.chars.len() {
            if at_line_start && self.depth == 0 {
                at_line_start = false;
                if self.handle_indentation()? {
                    at_line_start = true;
                    continue;
                }
            }
            let c = match self.peek(0) {
                Some(c) => c,
                None => break,
            };
            match c {
                ' ' | '\t' | '\r' | '\x0c' => {
                    self.bump();
                }
                '#' => {
                    while let Some(c) = self.peek(0) {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                '\\' if self.peek(1) == Some('\n') => {
                    self.bump();
                    self.bump();
                }
                '\n' => {
                    let span = self.here();
                    self.bump();
                    if self.depth == 0 {
                        if !matches!(self.out.last().map(|t| &t.tok), Some(Tok::Newline) | None) {
                            self.push(Tok::Newline, span);
                        }
                        at_line_start = true;
                    }
                }
                '"' | '\'' => self.string(None)?,
                c if c.is_ascii_digit() || (c == '.' && self.peek(1).is_some_and(|d| d.is_ascii_digit())) => {
                    self.number()?
                }
                c if c.is_alphabetic() || c == '_' => {
                    let span = self.here();
                    let mut name = String::new();
                    while let Some(c) = self.peek(0) {
                        if c.is_alphanumeric() || c == '_' {
                            name.push(c);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    if matches!(self.peek(0), Some('"' | '\''))
                        && name.len() <= 2
                        && name.chars().all(|c| "rRbBfFuU".contains(c))
                    {
                        self.string(Some((name, span)))?;
                    } else {
                        self.push(Tok::Name(name), span);
                    }
                }
                _ => self.operator()?,
            }
        }
        let end = self.here();
        if !matches!(self.out.last().map(|t| &t.tok), Some(Tok::Newline) | None) {
            self.push(Tok::Newline, end);
        }
        while self.indents.len() > 1 {
            self.indents.pop();
            self.push(Tok::Dedent, end);
        }
        self.push(Tok::Eof, end);
        Ok(self.out)
    }

    /// Measures leading whitespace of a logical line; returns true when the
    /// line is blank or comment-only and was skipped entirely.
    fn handle_indentation(&mut self) -> Result<bool, ParseError> {
        let mut width = 0u32;
        let mut off = 0;
        loop {
            match self.peek(off) {
                Some(' ') => width += 1,
                Some('\t') => width = (width / 8 + 1) * 8,
                Some('\x0c') => width = 0,
                _ => break,
            }
            off += 1;
        }
        match self.peek(off) {
            None | Some('\n') | Some('#') => {
                // blank or comment-only line: consume it without layout effects
                while let Some(c) = self.peek(0) {
                    self.bump();
                    if c == '\n' {
                        break;
                    }
                }
                return Ok(true);
            }
            Some('\r') if self.peek(off + 1) == Some('\n') => {
                for _ in 0..off + 2 {
                    self.bump();
                }
                return Ok(true);
            }
            _ => {}
        }
        for _ in 0..off {
            self.bump();
        }
        let span = self.here();
        let current = *self.indents.last().unwrap_or(&0);
        if width > current {
            self.indents.push(width);
            self.push(Tok::Indent, span);
        } else if width < current {
            while width < *self.indents.last().unwrap_or(&0) {
                self.indents.pop();
                self.push(Tok::Dedent, span);
            }
            if width != *self.indents.last().unwrap_or(&0) {
                return Err(self.err(
                    ParseErrorKind::Syntax,
                    span,
                    "unindent does not match any outer indentation level",
                ));
            }
        }
        Ok(false)
    }

    fn string(&mut self, prefix: Option<(String, Span)>) -> Result<(), ParseError> {
        let span = prefix.as_ref().map_or_else(|| self.here(), |(_, s)| *s);
        if let Some((p, _)) = &prefix {
            let lower = p.to_ascii_lowercase();
            if lower.contains('f') {
                return Err(self.err(ParseErrorKind::UnsupportedFeature, span, "f-string"));
            }
            if lower != "u" {
                return Err(self.err(
                    ParseErrorKind::UnsupportedFeature,
                    span,
                    format!("string prefix `{p}`"),
                ));
            }
        }
        let quote = self.bump().unwrap_or('"');
        let triple = self.peek(0) == Some(quote) && self.peek(1) == Some(quote);
        if triple {
            self.bump();
            self.bump();
        }
        let mut value = String::new();
        loop {
            let c = match self.bump() {
                Some(c) => c,
                None => {
                    return Err(self.err(ParseErrorKind::Syntax, span, "unterminated string literal"))
                }
            };
            if c == quote {
                if !triple {
                    break;
                }
                if self.peek(0) == Some(quote) && self.peek(1) == Some(quote) {
                    self.bump();
                    self.bump();
                    break;
                }
                value.push(c);
                continue;
            }
            match c {
                '\n' if !triple => {
                    return Err(self.err(ParseErrorKind::Syntax, span, "unterminated string literal"))
                }
                '\\' => {
                    let esc = self.bump().ok_or_else(|| {
                        self.err(ParseErrorKind::Syntax, span, "unterminated string literal")
                    })?;
                    match esc {
                        'n' => value.push('\n'),
                        't' => value.push('\t'),
                        'r' => value.push('\r'),
                        '0' => value.push('\0'),
                        '\\' => value.push('\\'),
                        '\'' => value.push('\''),
                        '"' => value.push('"'),
                        '\n' => {}
                        other => {
                            value.push('\\');
                            value.push(other);
                        }
                    }
                }
                c => value.push(c),
            }
        }
        self.push(Tok::Str(value), span);
        Ok(())
    }

    fn number(&mut self) -> Result<(), ParseError> {
        let span = self.here();
        let mut text = String::new();
        let mut is_float = false;
        while let Some(c) = self.peek(0) {
            if c.is_ascii_digit() || c == '_' {
                if c != '_' {
                    text.push(c);
                }
                self.bump();
            } else if c == '.' && !is_float {
                is_float = true;
                text.push(c);
                self.bump();
            } else if (c == 'e' || c == 'E')
                && (self.peek(1).is_some_and(|d| d.is_ascii_digit())
                    || (matches!(self.peek(1), Some('+' | '-'))
                        && self.peek(2).is_some_and(|d| d.is_ascii_digit())))
            {
                is_float = true;
                text.push(c);
                self.bump();
                if let Some(sign @ ('+' | '-')) = self.peek(0) {
                    text.push(sign);
                    self.bump();
                }
            } else {
                break;
            }
        }
        if self.peek(0).is_some_and(|c| c.is_alphabetic() || c == '_') {
            return Err(self.err(ParseErrorKind::Syntax, span, "invalid numeric literal"));
        }
        let tok = if is_float {
            Tok::Float(text.parse().map_err(|_| {
                self.err(ParseErrorKind::Syntax, span, "invalid float literal")
            })?)
        } else {
            Tok::Int(text.parse().map_err(|_| {
                self.err(ParseErrorKind::Syntax, span, "integer literal out of range")
            })?)
        };
        self.push(tok, span);
        Ok(())
    }

    fn operator(&mut self) -> Result<(), ParseError> {
        let span = self.here();
        for op in OPERATORS {
            if op.chars().enumerate().all(|(i, c)| self.peek(i) == Some(c)) {
                for _ in 0..op.len() {
                    self.bump();
                }
                match *op {
                    "(" | "[" | "{" => self.depth += 1,
                    ")" | "]" | "}" => {
                        if self.depth == 0 {
                            return Err(self.err(
                                ParseErrorKind::Syntax,
                                span,
                                format!("unmatched `{op}`"),
                            ));
                        }
                        self.depth -= 1;
                    }
                    _ => {}
                }
                self.push(Tok::Op(op), span);
                return Ok(());
            }
        }
        let c = self.peek(0).unwrap_or('?');
        Err(self.err(ParseErrorKind::Syntax, span, format!("unexpected character `{c}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        tokenize(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn indentation_produces_indent_and_dedent() {
        let t = toks("def f():\n    pass\n");
        assert!(t.contains(&Tok::Indent));
        assert!(t.contains(&Tok::Dedent));
        assert_eq!(t.last(), Some(&Tok::Eof));
    }

    #[test]
    fn newlines_inside_brackets_are_joined() {
        let t = toks("x = f(1,\n      2)\n");
        assert_eq!(t.iter().filter(|t| **t == Tok::Newline).count(), 1);
        assert!(!t.contains(&Tok::Indent));
    }

    #[test]
    fn comment_lines_at_any_indent_are_skipped() {
        let t = toks("if x:\n    a = 1\n# note\n    b = 2\n");
        assert_eq!(t.iter().filter(|t| **t == Tok::Indent).count(), 1);
    }

    #[test]
    fn triple_quoted_string_spans_lines() {
        let t = toks("s = \"\"\"a\n  b\"\"\"\n");
        assert!(t.contains(&Tok::Str("a\n  b".into())));
    }

    #[test]
    fn escapes_are_decoded() {
        assert!(toks(r#"s = "a\"b\n""#).contains(&Tok::Str("a\"b\n".into())));
    }

    #[test]
    fn fstring_is_unsupported() {
        let err = tokenize("x = f\"hi {y}\"\n").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnsupportedFeature);
        assert!(err.message.contains("f-string"));
    }

    #[test]
    fn bad_dedent_is_a_syntax_error() {
        let err = tokenize("if x:\n    a = 1\n  b = 2\n").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Syntax);
        assert_eq!(err.span.line, 3);
    }

    #[test]
    fn numbers() {
        assert_eq!(toks("1 2.5 1e3")[..3], [Tok::Int(1), Tok::Float(2.5), Tok::Float(1000.0)]);
    }
}
