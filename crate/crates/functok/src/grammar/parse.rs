//! Recursive-descent parser for the response grammar.
//!
//! ```text
//! Response := Call (";" Call)* "<nexa_end>"?
//! Call     := "<nexa_i>" "(" ArgList? ")"
//! Arg      := name "=" Value | Value
//! Value    := string | int | float | True | False | None | "[" list "]" | Call
//! ```
//!
//! Literals follow a Python-compatible subset: single- or double-quoted
//! strings with backslash escapes, decimal ints and floats, `True`/`False`,
//! `None`, and bracketed lists.

use super::{ArgValue, CallExpr, GrammarError, Response};
use crate::registry::{FunctionalToken, Registry};

const END_SURFACE: &str = "<nexa_end>";

pub(super) struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    registry: &'a Registry,
}

impl<'a> Parser<'a> {
    pub(super) fn new(src: &'a str, registry: &'a Registry) -> Self {
        Parser {
            src,
            bytes: src.as_bytes(),
            pos: 0,
            registry,
        }
    }

    pub(super) fn parse_response(&mut self) -> Result<Response, GrammarError> {
        self.skip_ws();
        let mut calls = vec![self.parse_call()?];
        loop {
            self.skip_ws();
            if self.eat(b';') {
                self.skip_ws();
                calls.push(self.parse_call()?);
            } else {
                break;
            }
        }
        self.skip_ws();
        let terminated = if self.src[self.pos..].starts_with(END_SURFACE) {
            self.pos += END_SURFACE.len();
            true
        } else {
            false
        };
        self.skip_ws();
        if self.pos < self.bytes.len() {
            if terminated {
                return Err(GrammarError::TrailingGarbage { pos: self.pos });
            }
            return Err(self.syntax("`;`, `<nexa_end>`, or end of input"));
        }
        Ok(Response { calls, terminated })
    }

    fn parse_call(&mut self) -> Result<CallExpr, GrammarError> {
        let token = self.parse_token()?;
        if !self.eat(b'(') {
            return Err(self.syntax("`(`"));
        }
        let mut positional = Vec::new();
        let mut named = Vec::new();
        self.skip_ws();
        if !self.eat(b')') {
            loop {
                self.skip_ws();
                self.parse_arg(&mut positional, &mut named)?;
                self.skip_ws();
                if self.eat(b',') {
                    continue;
                }
                if self.eat(b')') {
                    break;
                }
                return Err(self.syntax("`,` or `)`"));
            }
        }
        Ok(CallExpr {
            token,
            positional,
            named,
        })
    }

    fn parse_token(&mut self) -> Result<FunctionalToken, GrammarError> {
        let start = self.pos;
        if !self.src[self.pos..].starts_with("<nexa_") {
            return Err(self.syntax("`<nexa_i>` token"));
        }
        self.pos += "<nexa_".len();
        let digit_start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == digit_start {
            // `<nexa_end>` in call position is a syntax error, not a call
            self.pos = start;
            return Err(self.syntax("`<nexa_i>` token with a numeric index"));
        }
        if !self.eat(b'>') {
            return Err(self.syntax("`>`"));
        }
        let index: usize = self.src[digit_start..self.pos - 1].parse().map_err(|_| {
            GrammarError::UnknownTokenSurface {
                pos: start,
                surface: self.src[start..self.pos].into(),
            }
        })?;
        match self.registry.spec_at(index) {
            Some(spec) => Ok(FunctionalToken::Bound {
                index,
                function: spec.name.clone(),
            }),
            None => Err(GrammarError::UnknownTokenSurface {
                pos: start,
                surface: self.src[start..self.pos].into(),
            }),
        }
    }

    fn parse_arg(
        &mut self,
        positional: &mut Vec<ArgValue>,
        named: &mut Vec<(String, ArgValue)>,
    ) -> Result<(), GrammarError> {
        // try `name = value` first
        if self
            .bytes
            .get(self.pos)
            .is_some_and(|b| b.is_ascii_alphabetic() || *b == b'_')
        {
            let save = self.pos;
            let ident = self.parse_ident();
            self.skip_ws();
            if self.eat(b'=') {
                self.skip_ws();
                let value = self.parse_value()?;
                named.push((ident, value));
                return Ok(());
            }
            self.pos = save;
        }
        let value = self.parse_value()?;
        if !named.is_empty() {
            // keep Python's ordering rule: positional after named is a syntax error
            return Err(self.syntax("named argument (positional after named)"));
        }
        positional.push(value);
        Ok(())
    }

    fn parse_value(&mut self) -> Result<ArgValue, GrammarError> {
        match self.bytes.get(self.pos) {
            Some(b'"') | Some(b'\'') => self.parse_string(),
            Some(b'[') => self.parse_list(),
            Some(b'<') => Ok(ArgValue::Nested(Box::new(self.parse_call()?))),
            Some(b) if b.is_ascii_digit() || *b == b'-' || *b == b'+' => self.parse_number(),
            Some(b) if b.is_ascii_alphabetic() || *b == b'_' => {
                let start = self.pos;
                let ident = self.parse_ident();
                match ident.as_str() {
                    "True" => Ok(ArgValue::Bool(true)),
                    "False" => Ok(ArgValue::Bool(false)),
                    "None" => Ok(ArgValue::Null),
                    _ => {
                        self.pos = start;
                        Err(self.syntax("a literal, list, or nested call"))
                    }
                }
            }
            _ => Err(self.syntax("a literal, list, or nested call")),
        }
    }

    fn parse_string(&mut self) -> Result<ArgValue, GrammarError> {
        let quote = self.bytes[self.pos];
        self.pos += 1;
        let mut out = String::new();
        loop {
            match self.bytes.get(self.pos) {
                None => return Err(self.syntax("closing string quote")),
                Some(&b) if b == quote => {
                    self.pos += 1;
                    return Ok(ArgValue::Str(out));
                }
                Some(b'\\') => {
                    self.pos += 1;
                    let esc = self
                        .bytes
                        .get(self.pos)
                        .ok_or_else(|| self.syntax("escape character"))?;
                    out.push(match esc {
                        b'\\' => '\\',
                        b'"' => '"',
                        b'\'' => '\'',
                        b'n' => '\n',
                        b't' => '\t',
                        b'r' => '\r',
                        _ => return Err(self.syntax("a valid escape (\\\\ \\\" \\' \\n \\t \\r)")),
                    });
                    self.pos += 1;
                }
                Some(_) => {
                    // consume one full UTF-8 scalar
                    let ch = self.src[self.pos..].chars().next().unwrap();
                    out.push(ch);
                    self.pos += ch.len_utf8();
                }
            }
        }
    }

    fn parse_list(&mut self) -> Result<ArgValue, GrammarError> {
        self.pos += 1; // '['
        let mut items = Vec::new();
        self.skip_ws();
        if self.eat(b']') {
            return Ok(ArgValue::List(items));
        }
        loop {
            self.skip_ws();
            items.push(self.parse_value()?);
            self.skip_ws();
            if self.eat(b',') {
                continue;
            }
            if self.eat(b']') {
                return Ok(ArgValue::List(items));
            }
            return Err(self.syntax("`,` or `]`"));
        }
    }

    fn parse_number(&mut self) -> Result<ArgValue, GrammarError> {
        let start = self.pos;
        if matches!(self.bytes.get(self.pos), Some(b'-') | Some(b'+')) {
            self.pos += 1;
        }
        let digits_start = self.pos;
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|b| b.is_ascii_digit())
        {
            self.pos += 1;
        }
        if self.pos == digits_start {
            return Err(self.syntax("a digit"));
        }
        let mut is_float = false;
        if self.bytes.get(self.pos) == Some(&b'.') {
            is_float = true;
            self.pos += 1;
            while self
                .bytes
                .get(self.pos)
                .is_some_and(|b| b.is_ascii_digit())
            {
                self.pos += 1;
            }
        }
        if matches!(self.bytes.get(self.pos), Some(b'e') | Some(b'E')) {
            is_float = true;
            self.pos += 1;
            if matches!(self.bytes.get(self.pos), Some(b'-') | Some(b'+')) {
                self.pos += 1;
            }
            let exp_start = self.pos;
            while self
                .bytes
                .get(self.pos)
                .is_some_and(|b| b.is_ascii_digit())
            {
                self.pos += 1;
            }
            if self.pos == exp_start {
                return Err(self.syntax("an exponent digit"));
            }
        }
        let text = &self.src[start..self.pos];
        if is_float {
            text.parse::<f64>()
                .map(ArgValue::Float)
                .map_err(|_| self.syntax("a float literal"))
        } else {
            text.parse::<i64>()
                .map(ArgValue::Int)
                .map_err(|_| self.syntax("an integer literal"))
        }
    }

    fn parse_ident(&mut self) -> String {
        let start = self.pos;
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_')
        {
            self.pos += 1;
        }
        self.src[start..self.pos].to_string()
    }

    fn skip_ws(&mut self) {
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|b| b.is_ascii_whitespace())
        {
            self.pos += 1;
        }
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.bytes.get(self.pos) == Some(&b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn syntax(&self, expected: &str) -> GrammarError {
        GrammarError::Syntax {
            pos: self.pos,
            expected: expected.into(),
        }
    }
}
