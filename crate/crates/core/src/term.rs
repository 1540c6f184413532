//! Term syntax, parser, printer and compiler.
//!
//! Grammar, loosest first:
//!
//! ```text
//! expr    := par ('+' par)*
//! par     := seq ('||' frame? seq)*
//! seq     := starred (('.' | juxtaposition) starred)*
//! starred := atom '*'*
//! atom    := '0' | '1' | ident | '`' name '`' | '(' expr ')'
//! frame   := '{' (ident (',' ident)*)? '}'
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::alphabet::{Alphabet, Frame};
use crate::automaton::Automaton;
use crate::error::{Error, Result};
use crate::ops;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Zero,
    One,
    Act(String),
    Plus(Box<Term>, Box<Term>),
    Seq(Box<Term>, Box<Term>),
    /// Parallel composition; `Some` overrides the alphabet's frame.
    Par(Box<Term>, Box<Term>, Option<Vec<String>>),
    Star(Box<Term>),
}

impl Term {
    pub fn act(name: impl Into<String>) -> Term {
        Term::Act(name.into())
    }

    pub fn plus(l: Term, r: Term) -> Term {
        Term::Plus(Box::new(l), Box::new(r))
    }

    pub fn seq(l: Term, r: Term) -> Term {
        Term::Seq(Box::new(l), Box::new(r))
    }

    pub fn par(l: Term, r: Term) -> Term {
        Term::Par(Box::new(l), Box::new(r), None)
    }

    pub fn par_with<S: Into<String>>(l: Term, r: Term, frame: impl IntoIterator<Item = S>) -> Term {
        Term::Par(
            Box::new(l),
            Box::new(r),
            Some(frame.into_iter().map(Into::into).collect()),
        )
    }

    pub fn star(t: Term) -> Term {
        Term::Star(Box::new(t))
    }

    /// `t` repeated `n` times in sequence; `power(t, 0)` is `1`.
    pub fn power(t: &Term, n: usize) -> Term {
        (1..n).fold(
            if n == 0 { Term::One } else { t.clone() },
            |acc, _| Term::seq(acc, t.clone()),
        )
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Zero | Term::One | Term::Act(_) => 1,
            Term::Star(t) => 1 + t.size(),
            Term::Plus(l, r) | Term::Seq(l, r) | Term::Par(l, r, _) => 1 + l.size() + r.size(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Zero | Term::One | Term::Act(_) => 0,
            Term::Star(t) => 1 + t.depth(),
            Term::Plus(l, r) | Term::Seq(l, r) | Term::Par(l, r, _) => 1 + l.depth().max(r.depth()),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Term::Plus(..) => 0,
            Term::Par(..) => 1,
            Term::Seq(..) => 2,
            Term::Star(_) => 3,
            Term::Zero | Term::One | Term::Act(_) => 4,
        }
    }
}

fn is_plain_ident(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(f: &mut fmt::Formatter<'_>, t: &Term, parens: bool) -> fmt::Result {
            if parens {
                write!(f, "({t})")
            } else {
                write!(f, "{t}")
            }
        }
        let p = self.precedence();
        match self {
            Term::Zero => f.write_str("0"),
            Term::One => f.write_str("1"),
            Term::Act(name) if is_plain_ident(name) => f.write_str(name),
            Term::Act(name) => write!(f, "`{name}`"),
            Term::Star(t) => {
                child(f, t, t.precedence() < p)?;
                f.write_str("*")
            }
            Term::Plus(l, r) | Term::Seq(l, r) | Term::Par(l, r, _) => {
                child(f, l, l.precedence() < p)?;
                match self {
                    Term::Plus(..) => f.write_str(" + ")?,
                    Term::Seq(..) => f.write_str(".")?,
                    Term::Par(_, _, None) => f.write_str(" || ")?,
                    Term::Par(_, _, Some(frame)) => write!(f, " ||{{{}}} ", frame.join(","))?,
                    _ => unreachable!(),
                }
                child(f, r, r.precedence() <= p)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Zero,
    One,
    Ident(String),
    Quoted(String),
    Plus,
    Bar2,
    Dot,
    Star,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '0' => Tok::Zero,
            '1' => Tok::One,
            '+' => Tok::Plus,
            '.' | '·' => Tok::Dot,
            '*' => Tok::Star,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            ',' => Tok::Comma,
            '|' => {
                if bytes.get(i + 1) == Some(&'|') {
                    i += 1;
                    Tok::Bar2
                } else {
                    return Err(Error::Syntax {
                        pos: start,
                        msg: "expected `||`".into(),
                    });
                }
            }
            '`' => {
                let end = bytes[i + 1..].iter().position(|&c| c == '`').ok_or(Error::Syntax {
                    pos: start,
                    msg: "unterminated quoted name".into(),
                })?;
                let name: String = bytes[i + 1..i + 1 + end].iter().collect();
                i += end + 1;
                Tok::Quoted(name)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j + 1 < bytes.len() && (bytes[j + 1].is_ascii_alphanumeric() || bytes[j + 1] == '_') {
                    j += 1;
                }
                let name: String = bytes[i..=j].iter().collect();
                i = j;
                Tok::Ident(name)
            }
            other => {
                return Err(Error::Syntax {
                    pos: start,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    alphabet: &'a Alphabet,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.offset(),
            msg: msg.into(),
        })
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Term> {
        let mut lhs = self.par()?;
        while self.eat(&Tok::Plus) {
            lhs = Term::plus(lhs, self.par()?);
        }
        Ok(lhs)
    }

    fn par(&mut self) -> Result<Term> {
        let mut lhs = self.seq()?;
        while self.eat(&Tok::Bar2) {
            let frame = if self.eat(&Tok::LBrace) {
                Some(self.frame()?)
            } else {
                None
            };
            lhs = Term::Par(Box::new(lhs), Box::new(self.seq()?), frame);
        }
        Ok(lhs)
    }

    fn frame(&mut self) -> Result<Vec<String>> {
        let mut names = Vec::new();
        if self.eat(&Tok::RBrace) {
            return Ok(names);
        }
        loop {
            match self.peek().cloned() {
                Some(Tok::Ident(n) | Tok::Quoted(n)) => {
                    self.alphabet.require(&n)?;
                    names.push(n);
                    self.pos += 1;
                }
                _ => return self.error("expected action name in frame"),
            }
            if self.eat(&Tok::RBrace) {
                return Ok(names);
            }
            if !self.eat(&Tok::Comma) {
                return self.error("expected `,` or `}` in frame");
            }
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Some(Tok::Zero | Tok::One | Tok::Ident(_) | Tok::Quoted(_) | Tok::LParen)
        )
    }

    fn seq(&mut self) -> Result<Term> {
        let mut lhs = self.starred()?;
        loop {
            if self.eat(&Tok::Dot) || self.starts_atom() {
                lhs = Term::seq(lhs, self.starred()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn starred(&mut self) -> Result<Term> {
        let mut t = self.atom()?;
        while self.eat(&Tok::Star) {
            t = Term::star(t);
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<Term> {
        let Some(tok) = self.peek().cloned() else {
            return self.error("unexpected end of input");
        };
        let pos = self.offset();
        self.pos += 1;
        match tok {
            Tok::Zero => Ok(Term::Zero),
            Tok::One => Ok(Term::One),
            Tok::Quoted(name) => {
                self.alphabet.require(&name)?;
                Ok(Term::Act(name))
            }
            Tok::Ident(name) => self.identifier(name),
            Tok::LParen => {
                let t = self.expr()?;
                if !self.eat(&Tok::RParen) {
                    return self.error("expected `)`");
                }
                Ok(t)
            }
            other => Err(Error::Syntax {
                pos,
                msg: format!("unexpected token {other:?}"),
            }),
        }
    }

    /// A declared name wins; otherwise a run of declared single-character
    /// actions reads as their sequential composition.
    fn identifier(&self, name: String) -> Result<Term> {
        if self.alphabet.id(&name).is_some() {
            return Ok(Term::Act(name));
        }
        let mut buf = [0u8; 4];
        let parts: Option<Vec<Term>> = name
            .chars()
            .map(|c| {
                let s: &str = c.encode_utf8(&mut buf);
                self.alphabet.id(s).map(|_| Term::act(s))
            })
            .collect();
        match parts {
            Some(parts) if parts.len() > 1 => Ok(parts.into_iter().reduce(Term::seq).expect("non-empty")),
            _ => Err(Error::UndeclaredAction(name)),
        }
    }
}

pub fn parse(text: &str, alphabet: &Alphabet) -> Result<Term> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        end: text.chars().count(),
        alphabet,
    };
    let t = p.expr()?;
    if p.pos != p.toks.len() {
        return p.error("trailing input");
    }
    Ok(t)
}

pub fn compile(term: &Term, alphabet: &Arc<Alphabet>) -> Result<Automaton> {
    Ok(match term {
        Term::Zero => ops::zero(alphabet),
        Term::One => ops::one(alphabet),
        Term::Act(name) => ops::action(alphabet, alphabet.require(name)?),
        Term::Plus(l, r) => ops::plus(&compile(l, alphabet)?, &compile(r, alphabet)?)?,
        Term::Seq(l, r) => ops::seq(&compile(l, alphabet)?, &compile(r, alphabet)?)?,
        Term::Star(t) => ops::star(&compile(t, alphabet)?),
        Term::Par(l, r, frame) => {
            let frame: Frame = match frame {
                Some(names) => alphabet.frame_from_names(names)?,
                None => alphabet.frame().clone(),
            };
            ops::par(&compile(l, alphabet)?, &compile(r, alphabet)?, &frame)?
        }
    })
}

/// Parses and compiles in one go.
pub fn compile_str(text: &str, alphabet: &Arc<Alphabet>) -> Result<Automaton> {
    compile(&parse(text, alphabet)?, alphabet)
}

/// A `.wcka` file: a `%alphabet <path>` header line followed by one term.
#[derive(Clone, Debug)]
pub struct TermFile {
    pub alphabet: Arc<Alphabet>,
    pub alphabet_path: PathBuf,
    pub term: Term,
}

pub fn load_term_file(path: &Path) -> Result<TermFile> {
    let text = std::fs::read_to_string(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_term_file(&text, base)
}

pub fn parse_term_file(text: &str, base: &Path) -> Result<TermFile> {
    let mut alphabet_path = None;
    let mut body = String::new();
    for line in text.lines() {
        let trimmed = line.trim();
        if let Some(rest) = trimmed.strip_prefix("%alphabet") {
            if alphabet_path.is_some() {
                return Err(Error::Format("duplicate `%alphabet` header".into()));
            }
            let rel = rest.trim();
            if rel.is_empty() {
                return Err(Error::Format("`%alphabet` needs a path".into()));
            }
            alphabet_path = Some(base.join(rel));
        } else if !trimmed.starts_with('#') {
            body.push_str(line);
            body.push('\n');
        }
    }
    let alphabet_path =
        alphabet_path.ok_or_else(|| Error::Format("missing `%alphabet <path>` header".into()))?;
    let config = std::fs::read_to_string(&alphabet_path)?;
    let alphabet = Arc::new(Alphabet::from_config(&config)?);
    let term = parse(&body, &alphabet)?;
    Ok(TermFile {
        alphabet,
        alphabet_path,
        term,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::isomorphic;

    fn alpha() -> Arc<Alphabet> {
        Arc::new(
            Alphabet::from_config(
                "external a, b, c, coin, tea, coffee; prob flip: 1/2 th, 1/2 tt; sync {coin, tea, coffee};",
            )
            .unwrap(),
        )
    }

    fn a() -> Term {
        Term::act("a")
    }

    fn b() -> Term {
        Term::act("b")
    }

    fn c() -> Term {
        Term::act("c")
    }

    #[test]
    fn precedence_examples() {
        let al = alpha();
        assert_eq!(
            parse("a.b + c*", &al).unwrap(),
            Term::plus(Term::seq(a(), b()), Term::star(c()))
        );
        assert_eq!(parse("a || b . c", &al).unwrap(), Term::par(a(), Term::seq(b(), c())));
        assert_eq!(parse("a + b || c", &al).unwrap(), Term::plus(a(), Term::par(b(), c())));
    }

    #[test]
    fn left_associative() {
        let al = alpha();
        assert_eq!(
            parse("a + b + c", &al).unwrap(),
            Term::plus(Term::plus(a(), b()), c())
        );
        assert_eq!(parse("a.b.c", &al).unwrap(), Term::seq(Term::seq(a(), b()), c()));
    }

    #[test]
    fn juxtaposition() {
        let al = alpha();
        assert_eq!(parse("ab", &al).unwrap(), Term::seq(a(), b()));
        assert_eq!(parse("a(b+c)", &al).unwrap(), Term::seq(a(), Term::plus(b(), c())));
        assert_eq!(parse("coin", &al).unwrap(), Term::act("coin"));
        assert!(matches!(parse("abx", &al), Err(Error::UndeclaredAction(_))));
    }

    #[test]
    fn frame_override() {
        let al = alpha();
        let t = parse("(a ||{a} b) ||{c} a", &al).unwrap();
        assert_eq!(
            t,
            Term::par_with(Term::par_with(a(), b(), ["a"]), a(), ["c"])
        );
        assert_eq!(parse(&t.to_string(), &al).unwrap(), t);
    }

    #[test]
    fn syntax_errors_carry_position() {
        let al = alpha();
        match parse("a + (b", &al) {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 6),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("a | b", &al), Err(Error::Syntax { pos: 2, .. })));
        assert!(matches!(parse("", &al), Err(Error::Syntax { .. })));
    }

    #[test]
    fn printer_uses_minimal_parentheses() {
        let al = alpha();
        for text in ["a.b + c*", "(a + b).c", "a.(b.c)", "(a || b)*", "a || (b || c)", "a**"] {
            let t = parse(text, &al).unwrap();
            assert_eq!(t.to_string(), text.to_string());
        }
    }

    #[test]
    fn compile_one_is_skip() {
        let al = alpha();
        assert!(isomorphic(&compile_str("1", &al).unwrap(), &ops::one(&al)));
    }

    #[test]
    fn compile_vending_machine() {
        let al = alpha();
        let vm = compile_str("coin.flip.(th.(tea+1) + tt.(coffee+1))", &al).unwrap();
        assert!(vm.validate().is_ok());
        assert_eq!(vm.num_states(), 7);
        assert_eq!(vm.num_transitions(), 6);
    }

    #[test]
    fn compile_flip_diagram() {
        let al = alpha();
        let p = compile_str("flip.(th.a + tt.b)", &al).unwrap();
        assert_eq!((p.num_states(), p.num_transitions(), p.num_finals()), (6, 5, 2));
        let flip = al.id("flip").unwrap();
        let mid: Vec<_> = p.successors_on(p.initial(), flip).collect();
        assert_eq!(mid.len(), 1);
        let guards: Vec<&str> = p.successors(mid[0]).iter().map(|&(g, _)| al.name(g)).collect();
        assert_eq!(guards, vec!["th", "tt"]);
    }

    #[test]
    fn quoted_names() {
        let al = Arc::new(Alphabet::from_config("external c.0.r;").unwrap());
        let t = parse("`c.0.r`*", &al).unwrap();
        assert_eq!(t, Term::star(Term::act("c.0.r")));
        assert_eq!(t.to_string(), "`c.0.r`*");
    }
}
