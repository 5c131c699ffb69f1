use super::{BinOp, Func, Node};
use thiserror::Error;

/// Nesting limit for parentheses, unary minus and exponent chains.
const MAX_DEPTH: usize = 200;
/// Token limit; bounds the depth of left-associative operator chains.
const MAX_TOKENS: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unexpected {found} at offset {offset}")]
    UnexpectedToken { found: String, offset: usize },
    #[error("unexpected end of input at offset {offset}")]
    UnexpectedEnd { offset: usize },
    #[error("unbalanced parenthesis at offset {offset}")]
    UnbalancedParen { offset: usize },
    #[error("unknown function `{name}` at offset {offset}")]
    UnknownFunction { name: String, offset: usize },
    #[error("function `{name}` at offset {offset} must be followed by `(`")]
    MissingCall { name: String, offset: usize },
    #[error("invalid number literal `{text}` at offset {offset}")]
    InvalidNumber { text: String, offset: usize },
    #[error("expression nested too deeply at offset {offset}")]
    TooDeep { offset: usize },
    #[error("expression longer than {MAX_TOKENS} tokens (at offset {offset})")]
    TooLong { offset: usize },
}

impl ParseError {
    /// Byte offset into the source where the error was detected.
    pub fn offset(&self) -> usize {
        match self {
            ParseError::UnexpectedToken { offset, .. }
            | ParseError::UnexpectedEnd { offset }
            | ParseError::UnbalancedParen { offset }
            | ParseError::UnknownFunction { offset, .. }
            | ParseError::MissingCall { offset, .. }
            | ParseError::InvalidNumber { offset, .. }
            | ParseError::TooDeep { offset }
            | ParseError::TooLong { offset } => *offset,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Num(v) => format!("number {v}"),
        Tok::Ident(name) => format!("name `{name}`"),
        Tok::Op(c) => format!("`{c}`"),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::End => "end of input".into(),
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        if out.len() >= MAX_TOKENS {
            return Err(ParseError::TooLong { offset: i });
        }
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                out.push((Tok::Op(c as char), i));
                i += 1;
            }
            b'(' => {
                out.push((Tok::LParen, i));
                i += 1;
            }
            b')' => {
                out.push((Tok::RParen, i));
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
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
                match text.parse::<f64>() {
                    Ok(v) if v.is_finite() => out.push((Tok::Num(v), start)),
                    _ => {
                        return Err(ParseError::InvalidNumber {
                            text: text.to_string(),
                            offset: start,
                        })
                    }
                }
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_alphabetic() {
                    i += 1;
                }
                out.push((Tok::Ident(src[start..i].to_string()), start));
            }
            _ => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err(ParseError::UnexpectedToken {
                    found: format!("character {ch:?}"),
                    offset: i,
                });
            }
        }
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self) -> ParseError {
        match self.peek() {
            Tok::End => ParseError::UnexpectedEnd {
                offset: self.offset(),
            },
            Tok::RParen => ParseError::UnbalancedParen {
                offset: self.offset(),
            },
            t => ParseError::UnexpectedToken {
                found: describe(t),
                offset: self.offset(),
            },
        }
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(ParseError::TooDeep {
                offset: self.offset(),
            });
        }
        Ok(())
    }

    fn sum(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek() {
                Tok::Op('+') => BinOp::Add,
                Tok::Op('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.product()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn product(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Op('*') => BinOp::Mul,
                Tok::Op('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        if let Tok::Op('-') = self.peek() {
            self.bump();
            self.enter()?;
            let inner = self.unary()?;
            self.depth -= 1;
            return Ok(Node::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.atom()?;
        if let Tok::Op('^') = self.peek() {
            self.bump();
            self.enter()?;
            // exponent may carry its own sign: 2^-1
            let exp = self.unary()?;
            self.depth -= 1;
            return Ok(Node::Binary(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Node::Num(v))
            }
            Tok::Ident(name) => {
                let (_, at) = self.bump();
                let is_call = matches!(self.peek(), Tok::LParen);
                match (Func::from_name(&name), is_call) {
                    (Some(func), true) => {
                        let arg = self.parenthesized()?;
                        Ok(Node::Call(func, Box::new(arg)))
                    }
                    (Some(_), false) => Err(ParseError::MissingCall { name, offset: at }),
                    (None, true) => Err(ParseError::UnknownFunction { name, offset: at }),
                    (None, false) if name == "pi" => Ok(Node::Pi),
                    (None, false) => Ok(Node::Var(name)),
                }
            }
            Tok::LParen => self.parenthesized(),
            _ => Err(self.unexpected()),
        }
    }

    fn parenthesized(&mut self) -> Result<Node, ParseError> {
        let (_, open) = self.bump();
        self.enter()?;
        let inner = self.sum()?;
        self.depth -= 1;
        match self.peek() {
            Tok::RParen => {
                self.bump();
                Ok(inner)
            }
            Tok::End => Err(ParseError::UnbalancedParen { offset: open }),
            _ => Err(self.unexpected()),
        }
    }
}

pub(super) fn parse(src: &str) -> Result<Node, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        depth: 0,
    };
    let node = p.sum()?;
    match p.peek() {
        Tok::End => Ok(node),
        _ => Err(p.unexpected()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn err(src: &str) -> ParseError {
        parse(src).unwrap_err()
    }

    #[test]
    fn double_plus_reports_offset() {
        let e = err("y++1");
        assert_eq!(e.offset(), 2);
        assert!(matches!(e, ParseError::UnexpectedToken { .. }));
    }

    #[test]
    fn paren_errors() {
        assert_eq!(err("(1+2"), ParseError::UnbalancedParen { offset: 0 });
        assert_eq!(err("1+2)"), ParseError::UnbalancedParen { offset: 3 });
        assert_eq!(err("()").offset(), 1);
    }

    #[test]
    fn function_errors() {
        assert_eq!(
            err("foo(x)"),
            ParseError::UnknownFunction {
                name: "foo".into(),
                offset: 0
            }
        );
        assert!(matches!(
            err("2*sin"),
            ParseError::MissingCall { offset: 2, .. }
        ));
    }

    #[test]
    fn literal_forms() {
        assert_eq!(parse("1.5e3").unwrap(), Node::Num(1500.0));
        assert_eq!(parse(".25").unwrap(), Node::Num(0.25));
        assert_eq!(parse("2E-2").unwrap(), Node::Num(0.02));
        assert!(matches!(
            err("1.2.3"),
            ParseError::InvalidNumber { offset: 0, .. }
        ));
        assert!(matches!(err("1e999"), ParseError::InvalidNumber { .. }));
    }

    #[test]
    fn empty_and_garbage() {
        assert_eq!(err(""), ParseError::UnexpectedEnd { offset: 0 });
        assert_eq!(err("   ").offset(), 3);
        assert_eq!(err("x $ y").offset(), 2);
        assert_eq!(err("x é").offset(), 2);
        assert!(matches!(
            err("x y"),
            ParseError::UnexpectedToken { offset: 2, .. }
        ));
    }

    #[test]
    fn deep_nesting_is_an_error_not_a_crash() {
        let src = "(".repeat(1000) + "1" + &")".repeat(1000);
        assert!(matches!(err(&src), ParseError::TooDeep { .. }));
        let src = "-".repeat(1000) + "1";
        assert!(matches!(err(&src), ParseError::TooDeep { .. }));
        let src = "2^".repeat(1000) + "1";
        assert!(matches!(err(&src), ParseError::TooDeep { .. }));
        let src = "1".to_string() + &"+1".repeat(100_000);
        assert!(matches!(err(&src), ParseError::TooLong { .. }));
        assert!(parse(&("(".repeat(50) + "1" + &")".repeat(50))).is_ok());
    }
}
