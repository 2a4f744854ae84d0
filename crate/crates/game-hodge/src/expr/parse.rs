//! Recursive-descent parser for the expression grammar.

use super::{Expr, Func, ParseError};

/// Parse `text` against the declared variable set.
///
/// Unary minus captures the remainder of its term (`-x*y` is `-(x*y)`,
/// `-x^2` is `-(x^2)`); inside a product a minus captures one factor
/// (`a * -b^2` is `a * (-(b^2))`).
pub fn parse<S: AsRef<str>>(text: &str, vars: &[S]) -> Result<Expr, ParseError> {
    let names: Vec<&str> = vars.iter().map(|s| s.as_ref()).collect();
    let mut p = Parser {
        bytes: text.as_bytes(),
        pos: 0,
        vars: &names,
    };
    let expr = p.expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(ParseError::Syntax {
            offset: p.pos,
            message: "unexpected trailing input".to_string(),
        });
    }
    Ok(expr)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    vars: &'a [&'a str],
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn syntax(&self, offset: usize, message: &str) -> ParseError {
        ParseError::Syntax {
            offset,
            message: message.to_string(),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
                }
                Some(b'-') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            let inner = self.term()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
                }
                Some(b'/') => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    lhs = Expr::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.base()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let n = self.uint_exponent()?;
            return Ok(Expr::Pow(Box::new(base), n));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            None => Err(self.syntax(self.pos, "expected expression")),
            Some(b'-') => {
                self.pos += 1;
                let inner = self.factor()?;
                Ok(Expr::Neg(Box::new(inner)))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() == Some(b')') {
                    self.pos += 1;
                    Ok(inner)
                } else {
                    Err(self.syntax(self.pos, "expected `)`"))
                }
            }
            Some(c) if c.is_ascii_digit() => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            Some(_) => Err(self.syntax(self.pos, "expected expression")),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|b| b.is_ascii_digit())
        {
            self.pos += 1;
        }
        if self.bytes.get(self.pos) == Some(&b'.')
            && self
                .bytes
                .get(self.pos + 1)
                .is_some_and(|b| b.is_ascii_digit())
        {
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
            let mut probe = self.pos + 1;
            if matches!(self.bytes.get(probe), Some(b'+') | Some(b'-')) {
                probe += 1;
            }
            if self.bytes.get(probe).is_some_and(|b| b.is_ascii_digit()) {
                self.pos = probe;
                while self
                    .bytes
                    .get(self.pos)
                    .is_some_and(|b| b.is_ascii_digit())
                {
                    self.pos += 1;
                }
            }
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii digits");
        let value: f64 = text
            .parse()
            .map_err(|_| self.syntax(start, "invalid number"))?;
        if !value.is_finite() {
            return Err(self.syntax(start, "number out of range"));
        }
        Ok(Expr::Const(value))
    }

    fn ident(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii ident");
        if self.peek() == Some(b'(') {
            let func = function_by_name(name)
                .ok_or_else(|| ParseError::UnknownFunction {
                    name: name.to_string(),
                    offset: start,
                })?;
            self.pos += 1;
            let arg = self.expr()?;
            if self.peek() == Some(b')') {
                self.pos += 1;
                Ok(Expr::Call(func, Box::new(arg)))
            } else {
                Err(self.syntax(self.pos, "expected `)`"))
            }
        } else if self.vars.iter().any(|v| *v == name) {
            Ok(Expr::Var(name.to_string()))
        } else {
            Err(ParseError::UnknownIdentifier {
                name: name.to_string(),
                offset: start,
            })
        }
    }

    fn uint_exponent(&mut self) -> Result<u32, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if !self
            .bytes
            .get(self.pos)
            .is_some_and(|b| b.is_ascii_digit())
        {
            return Err(ParseError::Exponent { offset: start });
        }
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|b| b.is_ascii_digit())
        {
            self.pos += 1;
        }
        if self.bytes.get(self.pos) == Some(&b'.') {
            return Err(ParseError::Exponent { offset: start });
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii digits");
        let n: u32 = text
            .parse()
            .map_err(|_| ParseError::Exponent { offset: start })?;
        if n > i32::MAX as u32 {
            return Err(ParseError::Exponent { offset: start });
        }
        Ok(n)
    }
}

fn function_by_name(name: &str) -> Option<Func> {
    match name {
        "sin" => Some(Func::Sin),
        "cos" => Some(Func::Cos),
        "exp" => Some(Func::Exp),
        "tanh" => Some(Func::Tanh),
        "bump" => Some(Func::Bump(0)),
        _ => {
            let order = name.strip_prefix("bump_d")?;
            if order.is_empty() || !order.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            order.parse::<u32>().ok().map(Func::Bump)
        }
    }
}
