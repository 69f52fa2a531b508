//! Height expressions `f(x, y)` for graphical initial meshes.
//!
//! Grammar: numbers, the variables `x`, `y`, `r` (= √(x²+y²)), `+ - * / ^`,
//! parentheses, unary minus and the functions `sin`, `cos`, `exp`. `^` binds
//! tighter than unary minus and associates to the right.

use std::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    X,
    Y,
    R,
    Neg(Box<Expr>),
    Bin(Op, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
}

#[derive(Debug, PartialEq)]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at column {}: {}", self.pos + 1, self.msg)
    }
}

impl std::error::Error for ParseError {}

impl Expr {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::X => x,
            Expr::Y => y,
            Expr::R => x.hypot(y),
            Expr::Neg(e) => -e.eval(x, y),
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(x, y), b.eval(x, y));
                match op {
                    Op::Add => a + b,
                    Op::Sub => a - b,
                    Op::Mul => a * b,
                    Op::Div => a / b,
                    Op::Pow => pow(a, b),
                }
            }
            Expr::Call(f, e) => {
                let v = e.eval(x, y);
                match f {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Exp => v.exp(),
                }
            }
        }
    }
}

// Small integer exponents multiply out, so r^2 is exact near r = 0.
fn pow(a: f64, b: f64) -> f64 {
    if b.fract() == 0.0 && b.abs() <= 16.0 {
        a.powi(b as i32)
    } else {
        a.powf(b)
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser {
            src: s.as_bytes(),
            pos: 0,
        };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(e)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> ParseError {
        ParseError {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => Op::Add,
                Some(b'-') => Op::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.term()?));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => Op::Mul,
                Some(b'/') => Op::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.eat(b'^') {
            let exp = self.unary()?;
            return Ok(Expr::Bin(Op::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            None => Err(self.error("unexpected end of expression")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.src.get(self.pos).is_some_and(u8::is_ascii_alphanumeric) {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                let func = match name {
                    "x" => return Ok(Expr::X),
                    "y" => return Ok(Expr::Y),
                    "r" => return Ok(Expr::R),
                    "sin" => Func::Sin,
                    "cos" => Func::Cos,
                    "exp" => Func::Exp,
                    _ => {
                        self.pos = start;
                        return Err(self.error(&format!("unknown name `{name}`")));
                    }
                };
                if !self.eat(b'(') {
                    return Err(self.error(&format!("expected `(` after `{name}`")));
                }
                let arg = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(Expr::Call(func, Box::new(arg)))
            }
            Some(c) => Err(self.error(&format!("unexpected `{}`", c as char))),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.src.get(p.pos).is_some_and(u8::is_ascii_digit) {
                p.pos += 1;
            }
        };
        digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            digits(self);
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                digits(self);
            } else {
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse().map(Expr::Num).map_err(|_| ParseError {
            pos: start,
            msg: format!("bad number `{text}`"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(s: &str, x: f64, y: f64) -> f64 {
        s.parse::<Expr>().unwrap().eval(x, y)
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(eval("1 + 2 * 3", 0.0, 0.0), 7.0);
        assert_eq!(eval("(1 + 2) * 3", 0.0, 0.0), 9.0);
        assert_eq!(eval("2 ^ 3 ^ 2", 0.0, 0.0), 512.0);
        assert_eq!(eval("-2^2", 0.0, 0.0), -4.0);
        assert_eq!(eval("2^-1", 0.0, 0.0), 0.5);
        assert_eq!(eval("8 / 4 / 2", 0.0, 0.0), 1.0);
        assert_eq!(eval("1 - 2 - 3", 0.0, 0.0), -4.0);
        assert_eq!(eval("--1", 0.0, 0.0), 1.0);
    }

    #[test]
    fn variables_and_functions() {
        let (x, y) = (0.3, -0.4);
        assert_eq!(eval("r", x, y), 0.5);
        assert_eq!(eval("0.2*(1-r^2)", x, y), 0.2 * (1.0 - 0.25));
        let wave = 0.1 * (1.0 - 0.25) * (2.0 * x).sin() + 0.05 * y;
        assert!((eval("0.1*(1-r^2)*sin(2*x) + 0.05*y", x, y) - wave).abs() < 1e-16);
        assert_eq!(eval("exp(0) + cos(0)", x, y), 2.0);
        assert_eq!(eval("1.5e-1 * x * y", x, y), 0.15 * x * y);
        assert_eq!(eval("2e1", 0.0, 0.0), 20.0);
    }

    #[test]
    fn errors_point_at_the_problem() {
        let err = "1 + z".parse::<Expr>().unwrap_err();
        assert_eq!(err.pos, 4);
        assert!("sin x".parse::<Expr>().is_err());
        assert!("(1 + 2".parse::<Expr>().is_err());
        assert!("1 +".parse::<Expr>().is_err());
        assert!("1 2".parse::<Expr>().is_err());
        assert!("".parse::<Expr>().is_err());
        assert!("tan(x)".parse::<Expr>().is_err());
    }
}
