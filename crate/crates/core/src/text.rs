//! Textual formula format.
//!
//! ```text
//! mode: commutative
//! field: Q
//! (+ x1 (* x2 x3) (scale 2/3 x_1_4))
//! ```
//!
//! Grammar:
//! `expr := var | "1" | "(+ " wexpr+ ")" | "(* " wexpr+ ")"`,
//! `wexpr := expr | "(scale " rational " " expr ")"`,
//! `var := "x" n | "x_" n "_" n`.
//! Both header lines are optional on input (defaults: commutative, `Q`);
//! `field: Fp` without a prime selects the caller's default prime. Lines
//! starting with `#` are comments.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::ir::{Edge, Formula, Mode, Node, Var};
use crate::scalar::{parse_rational, Field, Scalar, MERSENNE_61};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Atom(String),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn tokenize(body: &[(usize, &str)]) -> Vec<Token> {
    let mut out = Vec::new();
    for &(line, text) in body {
        let mut chars = text.char_indices().peekable();
        while let Some((i, c)) = chars.next() {
            let column = i + 1;
            match c {
                '(' => out.push(Token { tok: Tok::Open, line, column }),
                ')' => out.push(Token { tok: Tok::Close, line, column }),
                c if c.is_whitespace() => {}
                _ => {
                    let mut atom = String::from(c);
                    while let Some(&(_, c)) = chars.peek() {
                        if c == '(' || c == ')' || c.is_whitespace() {
                            break;
                        }
                        atom.push(c);
                        chars.next();
                    }
                    out.push(Token { tok: Tok::Atom(atom), line, column });
                }
            }
        }
    }
    out
}

fn parse_var(atom: &str) -> Option<Var> {
    let rest = atom.strip_prefix('x')?;
    if let Some(pair) = rest.strip_prefix('_') {
        let (a, b) = pair.split_once('_')?;
        let a: u64 = a.parse().ok()?;
        let b: u64 = b.parse().ok()?;
        if a >= 1 << 31 || b >= 1 << 32 {
            return None;
        }
        Some(Var::pair(a, b))
    } else {
        if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let n: u64 = rest.parse().ok()?;
        (n < 1 << 63).then(|| Var::indexed(n))
    }
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    field: Field,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Result<Token> {
        let t = self
            .toks
            .get(self.pos)
            .cloned()
            .ok_or_else(|| syntax(self.end.0, self.end.1, "unexpected end of input"))?;
        self.pos += 1;
        Ok(t)
    }

    fn expr(&mut self) -> Result<Node> {
        let t = self.next()?;
        match t.tok {
            Tok::Atom(a) if a == "1" => Ok(Node::One),
            Tok::Atom(a) => parse_var(&a)
                .map(Node::Var)
                .ok_or_else(|| syntax(t.line, t.column, format!("expected a variable, found `{a}`"))),
            Tok::Close => Err(syntax(t.line, t.column, "unexpected `)`")),
            Tok::Open => {
                let head = self.next()?;
                let is_sum = match &head.tok {
                    Tok::Atom(a) if a == "+" => true,
                    Tok::Atom(a) if a == "*" => false,
                    _ => {
                        return Err(syntax(head.line, head.column, "expected `+` or `*` after `(`"));
                    }
                };
                let mut edges = Vec::new();
                loop {
                    match self.peek() {
                        Some(Token { tok: Tok::Close, .. }) => {
                            self.pos += 1;
                            break;
                        }
                        None => return Err(syntax(self.end.0, self.end.1, "unclosed `(`")),
                        _ => edges.push(self.wexpr()?),
                    }
                }
                if edges.is_empty() {
                    return Err(syntax(t.line, t.column, "gate without children"));
                }
                Ok(if is_sum { Node::Sum(edges) } else { Node::Prod(edges) })
            }
        }
    }

    fn wexpr(&mut self) -> Result<Edge> {
        let is_scale = matches!(
            (self.toks.get(self.pos), self.toks.get(self.pos + 1)),
            (Some(Token { tok: Tok::Open, .. }), Some(Token { tok: Tok::Atom(a), .. })) if a == "scale"
        );
        if !is_scale {
            return Ok(Edge::unit(self.expr()?, self.field));
        }
        self.pos += 2;
        let w = self.next()?;
        let Tok::Atom(text) = &w.tok else {
            return Err(syntax(w.line, w.column, "expected a rational weight"));
        };
        let r = parse_rational(text)
            .ok_or_else(|| syntax(w.line, w.column, format!("invalid rational `{text}`")))?;
        let weight = Scalar::from_rational(&r, self.field).ok_or_else(|| {
            syntax(w.line, w.column, format!("`{text}` has no image in {}", self.field))
        })?;
        let node = self.expr()?;
        let close = self.next()?;
        if close.tok != Tok::Close {
            return Err(syntax(close.line, close.column, "expected `)` closing `scale`"));
        }
        Ok(Edge::new(weight, node))
    }
}

/// Parse with `Fp` defaulting to 2^61 - 1.
pub fn parse(text: &str) -> Result<Formula> {
    parse_with_default_prime(text, MERSENNE_61)
}

pub fn parse_with_default_prime(text: &str, default_prime: u64) -> Result<Formula> {
    let mut mode = Mode::Commutative;
    let mut field = Field::Rational;
    let mut body = Vec::new();
    let mut last = (1, 1);
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let trimmed = line.trim();
        last = (lineno, line.len() + 1);
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if let Some(m) = trimmed.strip_prefix("mode:") {
            mode = match m.trim() {
                "commutative" => Mode::Commutative,
                "noncommutative" => Mode::NonCommutative,
                other => return Err(syntax(lineno, 1, format!("unknown mode `{other}`"))),
            };
        } else if let Some(f) = trimmed.strip_prefix("field:") {
            field = if f.trim() == "Fp" {
                Field::Prime(default_prime)
            } else {
                f.parse().map_err(|e: String| syntax(lineno, 1, e))?
            };
        } else {
            body.push((lineno, line));
        }
    }
    let toks = tokenize(&body);
    let mut p = Parser { toks, pos: 0, field, end: last };
    let root = p.expr()?;
    if let Some(t) = p.peek() {
        return Err(syntax(t.line, t.column, "trailing input after formula"));
    }
    Formula::new(root, mode, field)
}

fn write_node(out: &mut String, node: &Node) {
    match node {
        Node::Var(v) => {
            let _ = write!(out, "{v}");
        }
        Node::One => out.push('1'),
        Node::Sum(edges) | Node::Prod(edges) => {
            out.push_str(if matches!(node, Node::Sum(_)) { "(+" } else { "(*" });
            for e in edges {
                out.push(' ');
                if e.weight.is_one() {
                    write_node(out, &e.node);
                } else {
                    let _ = write!(out, "(scale {} ", e.weight);
                    write_node(out, &e.node);
                    out.push(')');
                }
            }
            out.push(')');
        }
    }
}

/// Expression only, without header lines.
pub fn expr_to_string(node: &Node) -> String {
    let mut s = String::new();
    write_node(&mut s, node);
    s
}

/// Canonical text with both header lines.
pub fn serialize(f: &Formula) -> String {
    let mut s = format!("mode: {}\nfield: {}\n", f.mode, f.field);
    write_node(&mut s, &f.root);
    s.push('\n');
    s
}
