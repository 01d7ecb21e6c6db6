//! Recursive-descent parser.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?
//! atom  := number | ident | ident '(' expr ')' | 'pow' '(' expr ',' expr ')' | '(' expr ')'
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-a^b`
//! is `-(a^b)` and `a^b^c` is `a^(b^c)`.

use std::fmt;

use super::ast::{BinOp, Expression, Func};

#[derive(Debug, Clone, PartialEq)]
pub enum ParseErrorKind {
    Syntax {
        found: String,
        expected: Vec<&'static str>,
    },
    UnknownFunction(String),
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ParseError {
    /// Byte offset into the source text.
    pub offset: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::Syntax { found, expected } => write!(
                f,
                "syntax error at byte {}: found {found}, expected one of {}",
                self.offset,
                expected.join(", ")
            ),
            ParseErrorKind::UnknownFunction(name) => {
                write!(f, "unknown function `{name}` at byte {}", self.offset)
            }
            ParseErrorKind::Arity {
                name,
                expected,
                found,
            } => write!(
                f,
                "`{name}` at byte {} takes {expected} argument(s), got {found}",
                self.offset
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(x) => format!("number {x}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

const OPERAND: [&str; 4] = ["number", "identifier", "`(`", "`-`"];

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text = &src[start..i];
                let value: f64 = text.parse().map_err(|_| ParseError {
                    offset: start,
                    kind: ParseErrorKind::Syntax {
                        found: format!("malformed number `{text}`"),
                        expected: vec!["number"],
                    },
                })?;
                out.push((start, Tok::Num(value)));
                continue;
            }
            b'a'..=b'z' => {
                while i < bytes.len()
                    && (bytes[i].is_ascii_lowercase()
                        || bytes[i].is_ascii_digit()
                        || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push((start, Tok::Ident(src[start..i].to_string())));
                continue;
            }
            _ => {
                let ch = src[start..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    offset: start,
                    kind: ParseErrorKind::Syntax {
                        found: format!("character `{ch}`"),
                        expected: OPERAND.to_vec(),
                    },
                });
            }
        };
        i += 1;
        out.push((start, tok));
    }
    out.push((src.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&'static str]) -> ParseError {
        ParseError {
            offset: self.offset(),
            kind: ParseErrorKind::Syntax {
                found: self.peek().describe(),
                expected: expected.to_vec(),
            },
        }
    }

    fn expect(&mut self, tok: Tok, name: &'static str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&[name]))
        }
    }

    fn expr(&mut self) -> Result<Expression, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expression::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expression, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expression::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expression, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expression, ParseError> {
        let base = self.atom()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exponent = self.unary()?;
            return Ok(base.pow(exponent));
        }
        Ok(base)
    }

    fn args(&mut self) -> Result<Vec<Expression>, ParseError> {
        self.expect(Tok::LParen, "`(`")?;
        let mut args = vec![self.expr()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            args.push(self.expr()?);
        }
        self.expect(Tok::RParen, "`)`").map_err(|mut e| {
            if let ParseErrorKind::Syntax { expected, .. } = &mut e.kind {
                *expected = vec!["`)`", "`,`", "`+`", "`-`", "`*`", "`/`", "`^`"];
            }
            e
        })?;
        Ok(args)
    }

    fn atom(&mut self) -> Result<Expression, ParseError> {
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Num(x) => {
                self.bump();
                Ok(Expression::Const(x))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`").map_err(|mut e| {
                    if let ParseErrorKind::Syntax { expected, .. } = &mut e.kind {
                        *expected = vec!["`)`", "`+`", "`-`", "`*`", "`/`", "`^`"];
                    }
                    e
                })?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                let is_call = *self.peek() == Tok::LParen;
                if let Some(func) = Func::from_name(&name) {
                    if !is_call {
                        return Err(self.unexpected(&["`(`"]));
                    }
                    let mut args = self.args()?;
                    if args.len() != 1 {
                        return Err(ParseError {
                            offset,
                            kind: ParseErrorKind::Arity {
                                name,
                                expected: 1,
                                found: args.len(),
                            },
                        });
                    }
                    return Ok(Expression::call(func, args.pop().unwrap()));
                }
                if name == "pow" {
                    if !is_call {
                        return Err(self.unexpected(&["`(`"]));
                    }
                    let args = self.args()?;
                    if args.len() != 2 {
                        return Err(ParseError {
                            offset,
                            kind: ParseErrorKind::Arity {
                                name,
                                expected: 2,
                                found: args.len(),
                            },
                        });
                    }
                    let mut it = args.into_iter();
                    let (a, b) = (it.next().unwrap(), it.next().unwrap());
                    return Ok(a.pow(b));
                }
                if is_call {
                    return Err(ParseError {
                        offset,
                        kind: ParseErrorKind::UnknownFunction(name),
                    });
                }
                if name == "pi" {
                    return Ok(Expression::Const(std::f64::consts::PI));
                }
                Ok(Expression::Var(name))
            }
            _ => Err(self.unexpected(&OPERAND)),
        }
    }
}

/// Parses source text in the model expression language.
pub fn parse(source: &str) -> Result<Expression, ParseError> {
    let mut p = Parser {
        toks: lex(source)?,
        pos: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected(&["`+`", "`-`", "`*`", "`/`", "`^`", "end of input"]));
    }
    Ok(e)
}

impl std::str::FromStr for Expression {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> Expression {
        Expression::var(s)
    }

    #[test]
    fn log_product() {
        assert_eq!(
            parse("2*ln(y)").unwrap(),
            Expression::constant(2.0).mul(Expression::call(Func::Ln, v("y")))
        );
    }

    #[test]
    fn unbalanced_paren_reports_offset() {
        let err = parse("sin(").unwrap_err();
        assert_eq!(err.offset, 4);
        match err.kind {
            ParseErrorKind::Syntax { expected, .. } => assert!(expected.contains(&"number")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn free_variables() {
        let e = parse("tan(0.5*(x1+1))").unwrap();
        assert_eq!(e.free_vars().into_iter().collect::<Vec<_>>(), vec!["x1"]);
        let e = parse("x1+x2*t").unwrap();
        assert_eq!(e.free_vars().len(), 3);
        assert!(parse("3.5").unwrap().free_vars().is_empty());
        assert_eq!(parse("ln(y)+ln(y)").unwrap().free_vars().len(), 1);
    }

    #[test]
    fn precedence() {
        assert_eq!(
            parse("a+b*c").unwrap(),
            v("a").add(v("b").mul(v("c")))
        );
        assert_eq!(
            parse("a^b^c").unwrap(),
            v("a").pow(v("b").pow(v("c")))
        );
        assert_eq!(parse("-a^b").unwrap(), v("a").pow(v("b")).neg());
        assert_eq!(parse("-a*b").unwrap(), v("a").neg().mul(v("b")));
        assert_eq!(parse("a-b-c").unwrap(), v("a").sub(v("b")).sub(v("c")));
        assert_eq!(parse("a^-b").unwrap(), v("a").pow(v("b").neg()));
        assert_eq!(parse("pow(a, 2)").unwrap(), v("a").pow(Expression::constant(2.0)));
    }

    #[test]
    fn numbers() {
        assert_eq!(parse("1.5e-3").unwrap(), Expression::constant(1.5e-3));
        assert_eq!(parse(".5").unwrap(), Expression::constant(0.5));
        assert_eq!(parse("2E2").unwrap(), Expression::constant(200.0));
        assert!(parse("1.2.3").is_err());
    }

    #[test]
    fn error_kinds() {
        assert!(matches!(
            parse("foo(x)").unwrap_err().kind,
            ParseErrorKind::UnknownFunction(ref n) if n == "foo"
        ));
        assert!(matches!(
            parse("sin(x, y)").unwrap_err().kind,
            ParseErrorKind::Arity { expected: 1, found: 2, .. }
        ));
        assert!(matches!(
            parse("pow(x)").unwrap_err().kind,
            ParseErrorKind::Arity { expected: 2, found: 1, .. }
        ));
        // no implicit multiplication
        let err = parse("2x").unwrap_err();
        assert_eq!(err.offset, 1);
        let err = parse("2 (x)").unwrap_err();
        assert_eq!(err.offset, 2);
        // reserved function names are not variables
        assert!(parse("sin + 1").is_err());
        assert!(parse("X").is_err());
        assert!(parse("").is_err());
        assert!(parse("(1").is_err());
    }

    #[test]
    fn print_round_trip() {
        for s in [
            "2*ln(y)",
            "-a^b",
            "(-a)^b",
            "a-(b-c)",
            "a/(b*c)",
            "(a^b)^c",
            "a^-b",
            "--x",
            "-(x+y)*z",
            "exp(-x1^2/2)+sqrt(abs(t))",
            "1e-7*x+3.25",
            "pi*theta",
        ] {
            let e = parse(s).unwrap();
            let printed = e.to_string();
            assert_eq!(parse(&printed).unwrap(), e, "{s} printed as {printed}");
        }
    }

    #[test]
    fn negative_constant_prints_safely() {
        let e = Expression::constant(-2.0).pow(Expression::constant(2.0));
        assert_eq!(e.to_string(), "(-2)^2");
    }
}
