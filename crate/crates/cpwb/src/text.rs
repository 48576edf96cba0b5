//! Surface syntax: parsing and printing of types, processes, contexts and configurations.
//!
//! Prefixes bind tighter than `|`, and `|` associates to the left. Binary type connectives
//! always carry parentheses.

use std::fmt::Write as _;

use thiserror::Error;

use crate::oracle::RawConfig;
use crate::syntax::{Formula, Name, Process};
use crate::typing::Context;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("syntax error at line {line}, column {col}: {msg}")]
pub struct SyntaxError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Digit(u8),
    Sym(&'static str),
    End,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

const KEYWORDS: [&str; 4] = ["new", "fwd", "weak", "ctr"];
const SYMBOLS: [&str; 19] = ["||", "(", ")", "[", "]", "{", "}", "<", ">", ".", ",", ":", ";", "|", "*", "%", "+", "&", "!"];

fn lex(src: &str) -> Result<Vec<Spanned>, SyntaxError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
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
        let (l0, c0) = (line, col);
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            out.push(Spanned { tok: Tok::Ident(s), line: l0, col: c0 });
            continue;
        }
        if c.is_ascii_digit() {
            out.push(Spanned { tok: Tok::Digit(c as u8 - b'0'), line: l0, col: c0 });
            i += 1;
            col += 1;
            continue;
        }
        if c == '?' {
            out.push(Spanned { tok: Tok::Sym("?"), line: l0, col: c0 });
            i += 1;
            col += 1;
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(s) => {
                out.push(Spanned { tok: Tok::Sym(s), line: l0, col: c0 });
                i += s.len();
                col += s.len();
            }
            None => {
                return Err(SyntaxError { line, col, msg: format!("unexpected character {:?}", c) });
            }
        }
    }
    out.push(Spanned { tok: Tok::End, line, col });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Parser, SyntaxError> {
        Ok(Parser { toks: lex(src)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, SyntaxError> {
        let t = &self.toks[self.pos];
        Err(SyntaxError { line: t.line, col: t.col, msg: msg.into() })
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(t) if *t == s)
    }

    fn expect(&mut self, s: &str) -> Result<(), SyntaxError> {
        if self.is_sym(s) {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected `{}`, found {}", s, describe(self.peek())))
        }
    }

    fn ident(&mut self) -> Result<Name, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(Name::new(&s))
            }
            other => self.err(format!("expected a name, found {}", describe(&other))),
        }
    }

    fn finish(&self) -> Result<(), SyntaxError> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            self.err(format!("unexpected {} after the end of input", describe(self.peek())))
        }
    }

    fn formula(&mut self) -> Result<Formula, SyntaxError> {
        match self.peek().clone() {
            Tok::Digit(1) => {
                self.bump();
                Ok(Formula::One)
            }
            Tok::Ident(s) if s == "bot" => {
                self.bump();
                Ok(Formula::Bot)
            }
            Tok::Sym("!") => {
                self.bump();
                Ok(Formula::of_course(self.formula()?))
            }
            Tok::Sym("?") => {
                self.bump();
                Ok(Formula::why_not(self.formula()?))
            }
            Tok::Sym("(") => {
                self.bump();
                let a = self.formula()?;
                let op = match self.bump() {
                    Tok::Sym(s @ ("*" | "%" | "+" | "&")) => s,
                    other => {
                        self.pos -= 1;
                        return self.err(format!("expected a connective, found {}", describe(&other)));
                    }
                };
                let b = self.formula()?;
                self.expect(")")?;
                Ok(match op {
                    "*" => Formula::tensor(a, b),
                    "%" => Formula::par(a, b),
                    "+" => Formula::plus(a, b),
                    _ => Formula::with(a, b),
                })
            }
            other => self.err(format!("expected a type, found {}", describe(&other))),
        }
    }

    fn process(&mut self) -> Result<Process, SyntaxError> {
        let mut p = self.term()?;
        while self.is_sym("|") {
            self.bump();
            let q = self.term()?;
            p = Process::Par(Box::new(p), Box::new(q));
        }
        Ok(p)
    }

    /// `( term | process )`, the two-branch body of cuts and outputs.
    fn branches(&mut self) -> Result<(Process, Process), SyntaxError> {
        self.expect("(")?;
        let p = self.term()?;
        self.expect("|")?;
        let q = self.process()?;
        self.expect(")")?;
        Ok((p, q))
    }

    fn body(&mut self) -> Result<Box<Process>, SyntaxError> {
        self.expect(".")?;
        Ok(Box::new(self.term()?))
    }

    fn term(&mut self) -> Result<Process, SyntaxError> {
        match self.peek().clone() {
            Tok::Digit(0) => {
                self.bump();
                Ok(Process::Inact)
            }
            Tok::Sym("(") => {
                self.bump();
                let p = self.process()?;
                self.expect(")")?;
                Ok(p)
            }
            Tok::Sym("!") => {
                self.bump();
                let x = self.ident()?;
                self.expect("(")?;
                let y = self.ident()?;
                self.expect(")")?;
                Ok(Process::Server(x, y, self.body()?))
            }
            Tok::Sym("?") => {
                self.bump();
                let x = self.ident()?;
                self.expect("[")?;
                let y = self.ident()?;
                self.expect("]")?;
                Ok(Process::Client(x, y, self.body()?))
            }
            Tok::Ident(k) if k == "new" => {
                self.bump();
                let x = self.ident()?;
                self.expect(":")?;
                let a = self.formula()?;
                let (p, q) = self.branches()?;
                Ok(Process::Cut(x, a, Box::new(p), Box::new(q)))
            }
            Tok::Ident(k) if k == "fwd" => {
                self.bump();
                let x = self.ident()?;
                let y = self.ident()?;
                Ok(Process::Fwd(x, y))
            }
            Tok::Ident(k) if k == "weak" => {
                self.bump();
                let x = self.ident()?;
                self.expect(":")?;
                let a = self.formula()?;
                Ok(Process::Weak(x, a, self.body()?))
            }
            Tok::Ident(k) if k == "ctr" => {
                self.bump();
                let x = self.ident()?;
                self.expect("<")?;
                let x1 = self.ident()?;
                self.expect(",")?;
                let x2 = self.ident()?;
                self.expect(">")?;
                Ok(Process::Contract(x, x1, x2, self.body()?))
            }
            Tok::Ident(_) => {
                let x = self.ident()?;
                match self.peek().clone() {
                    Tok::Sym("[") => {
                        self.bump();
                        if self.is_sym("]") {
                            self.bump();
                            return Ok(Process::EmptyOut(x));
                        }
                        let y = self.ident()?;
                        self.expect("]")?;
                        let (p, q) = self.branches()?;
                        Ok(Process::Out(y, x, Box::new(p), Box::new(q)))
                    }
                    Tok::Sym("(") => {
                        self.bump();
                        if self.is_sym(")") {
                            self.bump();
                            return Ok(Process::EmptyIn(x, self.body()?));
                        }
                        let y = self.ident()?;
                        self.expect(")")?;
                        Ok(Process::In(x, y, self.body()?))
                    }
                    Tok::Sym("<") => {
                        self.bump();
                        let i = match self.peek() {
                            Tok::Digit(i @ (1 | 2)) => *i,
                            other => return self.err(format!("expected 1 or 2, found {}", describe(other))),
                        };
                        self.bump();
                        Ok(Process::Select(x, i, self.body()?))
                    }
                    Tok::Sym(">") => {
                        self.bump();
                        self.expect("{")?;
                        let p = self.process()?;
                        self.expect(";")?;
                        let q = self.process()?;
                        self.expect("}")?;
                        Ok(Process::Case(x, Box::new(p), Box::new(q)))
                    }
                    other => self.err(format!("expected an action on {}, found {}", x, describe(&other))),
                }
            }
            other => self.err(format!("expected a process, found {}", describe(&other))),
        }
    }

    fn context(&mut self) -> Result<Context, SyntaxError> {
        let mut c = Context::new();
        if *self.peek() == Tok::End {
            return Ok(c);
        }
        loop {
            let x = self.ident()?;
            self.expect(":")?;
            let a = self.formula()?;
            if c.insert(x.clone(), a).is_some() {
                self.pos -= 1;
                return self.err(format!("name {} is declared twice", x));
            }
            if self.is_sym(",") {
                self.bump();
            } else {
                return Ok(c);
            }
        }
    }

    fn config(&mut self) -> Result<RawConfig, SyntaxError> {
        let pair = |p: &mut Parser| -> Result<(RawConfig, RawConfig), SyntaxError> {
            p.expect("(")?;
            let a = p.config()?;
            p.expect("||")?;
            let b = p.config()?;
            p.expect(")")?;
            Ok((a, b))
        };
        match self.peek().clone() {
            Tok::Ident(k) if k == "zero" => {
                self.bump();
                Ok(RawConfig::Zero)
            }
            Tok::Ident(k) if k == "cut" => {
                self.bump();
                let x = self.ident()?;
                self.expect(":")?;
                let a = self.formula()?;
                let (l, r) = pair(self)?;
                Ok(RawConfig::Cut(x, a, Box::new(l), Box::new(r)))
            }
            Tok::Ident(k) if k == "mix" => {
                self.bump();
                let (l, r) = pair(self)?;
                Ok(RawConfig::Par(Box::new(l), Box::new(r)))
            }
            Tok::Ident(k) if k == "weak" => {
                self.bump();
                let x = self.ident()?;
                self.expect(":")?;
                let a = self.formula()?;
                self.expect("(")?;
                let c = self.config()?;
                self.expect(")")?;
                Ok(RawConfig::Weak(x, a, Box::new(c)))
            }
            Tok::Ident(k) if k == "con" => {
                self.bump();
                let x1 = self.ident()?;
                self.expect(",")?;
                let x2 = self.ident()?;
                self.expect("(")?;
                let c = self.config()?;
                self.expect(")")?;
                Ok(RawConfig::Con(x1, x2, Box::new(c)))
            }
            Tok::Sym("{") => {
                self.bump();
                let p = self.process()?;
                self.expect("}")?;
                Ok(RawConfig::Proc(p))
            }
            other => self.err(format!("expected a configuration, found {}", describe(&other))),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{}`", s),
        Tok::Digit(d) => format!("`{}`", d),
        Tok::Sym(s) => format!("`{}`", s),
        Tok::End => "end of input".into(),
    }
}

pub fn parse_type(src: &str) -> Result<Formula, SyntaxError> {
    let mut p = Parser::new(src)?;
    let a = p.formula()?;
    p.finish()?;
    Ok(a)
}

pub fn parse_process(src: &str) -> Result<Process, SyntaxError> {
    let mut p = Parser::new(src)?;
    let a = p.process()?;
    p.finish()?;
    Ok(a)
}

pub fn parse_context(src: &str) -> Result<Context, SyntaxError> {
    let mut p = Parser::new(src)?;
    let c = p.context()?;
    p.finish()?;
    Ok(c)
}

/// `zero`, `cut x:A (C || C)`, `mix (C || C)`, `weak x:?A (C)`, `con x1,x2 (C)`, `{P}`.
pub fn parse_config(src: &str) -> Result<RawConfig, SyntaxError> {
    let mut p = Parser::new(src)?;
    let c = p.config()?;
    p.finish()?;
    Ok(c)
}

pub fn print_context(c: &Context) -> String {
    c.iter().map(|(x, a)| format!("{}:{}", x, a)).collect::<Vec<_>>().join(", ")
}

pub fn print_process(p: &Process) -> String {
    let mut s = String::new();
    write_proc(&mut s, p);
    s
}

/// Print in prefix position, where a bare `|` would escape.
fn write_term(s: &mut String, p: &Process) {
    if matches!(p, Process::Par(..)) {
        s.push('(');
        write_proc(s, p);
        s.push(')');
    } else {
        write_proc(s, p);
    }
}

fn write_proc(s: &mut String, p: &Process) {
    match p {
        Process::Inact => s.push('0'),
        Process::Cut(x, a, l, r) => {
            let _ = write!(s, "new {}:{} (", x, a);
            write_term(s, l);
            s.push_str(" | ");
            write_proc(s, r);
            s.push(')');
        }
        Process::Par(l, r) => {
            write_proc(s, l);
            s.push_str(" | ");
            write_term(s, r);
        }
        Process::Fwd(x, y) => {
            let _ = write!(s, "fwd {} {}", x, y);
        }
        Process::Out(y, x, l, r) => {
            let _ = write!(s, "{}[{}](", x, y);
            write_term(s, l);
            s.push_str(" | ");
            write_proc(s, r);
            s.push(')');
        }
        Process::In(x, y, q) => {
            let _ = write!(s, "{}({}).", x, y);
            write_term(s, q);
        }
        Process::Server(x, y, q) => {
            let _ = write!(s, "!{}({}).", x, y);
            write_term(s, q);
        }
        Process::Client(x, y, q) => {
            let _ = write!(s, "?{}[{}].", x, y);
            write_term(s, q);
        }
        Process::Select(x, i, q) => {
            let _ = write!(s, "{}<{}.", x, i);
            write_term(s, q);
        }
        Process::Case(x, l, r) => {
            let _ = write!(s, "{}>{{", x);
            write_proc(s, l);
            s.push_str(" ; ");
            write_proc(s, r);
            s.push('}');
        }
        Process::EmptyOut(x) => {
            let _ = write!(s, "{}[]", x);
        }
        Process::EmptyIn(x, q) => {
            let _ = write!(s, "{}().", x);
            write_term(s, q);
        }
        Process::Weak(x, a, q) => {
            let _ = write!(s, "weak {}:{}.", x, a);
            write_term(s, q);
        }
        Process::Contract(x, x1, x2, q) => {
            let _ = write!(s, "ctr {}<{},{}>.", x, x1, x2);
            write_term(s, q);
        }
    }
}

pub fn print_config(c: &RawConfig) -> String {
    match c {
        RawConfig::Zero => "zero".into(),
        RawConfig::Proc(p) => format!("{{{}}}", print_process(p)),
        RawConfig::Cut(x, a, l, r) => format!("cut {}:{} ({} || {})", x, a, print_config(l), print_config(r)),
        RawConfig::Par(l, r) => format!("mix ({} || {})", print_config(l), print_config(r)),
        RawConfig::Weak(x, a, c) => format!("weak {}:{} ({})", x, a, print_config(c)),
        RawConfig::Con(x1, x2, c) => format!("con {},{} ({})", x1, x2, print_config(c)),
    }
}
