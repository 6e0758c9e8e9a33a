//! Text grammars for groups, descriptors, matrices and localizers.
//!
//! A group is a `+`-separated list of summands with an optional ring suffix:
//!
//! ```text
//! group   := "0" | term ("+" term)* ["over" ring]
//! term    := "Z/" n | free ["^" r]
//! free    := "Z" | "Q" | "Z[1/" m "]" | "Z_(" p ("," p)* ")"
//! ring    := "none" | "all" | "away:" p,... | "at:" p,...
//! ```
//!
//! Every free summand fixes the ring, so they must agree with each other and
//! with the suffix. A descriptor reads `type n=3 pi2=(Z + Z/12) pi3=(Z/5)`.

use std::fmt;

use abloc::arith::{factor_u64, parse_rational, PrimeSet, Rational, SFamily};
use abloc::homotopy::SimplyConnectedDesc;
use abloc::{AbGroup, Localizer};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Syntax,
    Semantic,
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorKind::Syntax => "syntax",
            ErrorKind::Semantic => "semantic",
        })
    }
}

/// A parse failure at a character column (0-based) of the input.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{kind} error at column {position}: {message}")]
pub struct ParseError {
    pub kind: ErrorKind,
    pub position: usize,
    pub message: String,
}

type Result<T> = std::result::Result<T, ParseError>;

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    offset: usize,
}

impl Cursor {
    fn new(src: &str, offset: usize) -> Self {
        Cursor {
            chars: src.chars().collect(),
            pos: 0,
            offset,
        }
    }

    fn column(&self) -> usize {
        self.offset + self.pos
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(ParseError {
            kind: ErrorKind::Syntax,
            position: self.column(),
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn eat(&mut self, s: &str) -> bool {
        let n = s.chars().count();
        if self.chars.len() >= self.pos + n && self.chars[self.pos..self.pos + n].iter().copied().eq(s.chars()) {
            self.pos += n;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat(s) {
            Ok(())
        } else {
            self.syntax(format!("expected `{s}`"))
        }
    }

    fn number(&mut self) -> Result<u64> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.syntax("expected a number");
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse().or_else(|_| {
            self.pos = start;
            self.syntax(format!("number {text} is too large"))
        })
    }

    fn number_list(&mut self) -> Result<Vec<u64>> {
        let mut out = vec![self.number()?];
        loop {
            self.skip_ws();
            if !self.eat(",") {
                return Ok(out);
            }
            self.skip_ws();
            out.push(self.number()?);
        }
    }

    fn rest(&self) -> String {
        self.chars[self.pos..].iter().collect()
    }
}

fn semantic<T>(position: usize, message: impl Into<String>) -> Result<T> {
    Err(ParseError {
        kind: ErrorKind::Semantic,
        position,
        message: message.into(),
    })
}

enum Term {
    Free { ring: PrimeSet, rank: usize },
    Cyclic(u64),
}

fn prime_set(list: Vec<u64>, cofinite: bool, at: usize) -> Result<PrimeSet> {
    let made = if cofinite {
        PrimeSet::cofinite(list)
    } else {
        PrimeSet::finite(list)
    };
    made.or_else(|e| semantic(at, e.to_string()))
}

fn term(c: &mut Cursor) -> Result<Term> {
    let free = if c.eat("Q") {
        PrimeSet::all()
    } else if c.eat("Z[1/") {
        let at = c.column();
        let m = c.number()?;
        c.expect("]")?;
        if m == 0 {
            return semantic(at, "cannot invert 0");
        }
        let primes = factor_u64(m).map_err(|e| ParseError {
            kind: ErrorKind::Semantic,
            position: at,
            message: e.to_string(),
        })?;
        prime_set(primes.into_keys().collect(), false, at)?
    } else if c.eat("Z_(") {
        let at = c.column();
        let list = c.number_list()?;
        c.expect(")")?;
        prime_set(list, true, at)?
    } else if c.eat("Z/") {
        let at = c.column();
        let n = c.number()?;
        if n == 0 {
            return semantic(at, "Z/0 is not a torsion summand; write Z");
        }
        return Ok(Term::Cyclic(n));
    } else if c.eat("Z") {
        PrimeSet::none()
    } else {
        return c.syntax("expected a summand such as Z, Z/n, Z[1/m], Z_(p) or Q");
    };
    let rank = if c.eat("^") { c.number()? as usize } else { 1 };
    Ok(Term::Free { ring: free, rank })
}

fn ring_suffix(c: &mut Cursor) -> Result<PrimeSet> {
    let at = c.column();
    if c.eat("none") {
        return Ok(PrimeSet::none());
    }
    if c.eat("all") {
        return Ok(PrimeSet::all());
    }
    let cofinite = if c.eat("away:") {
        false
    } else if c.eat("at:") {
        true
    } else {
        return c.syntax("expected none, all, away:p,... or at:p,...");
    };
    let list = c.number_list()?;
    prime_set(list, cofinite, at)
}

fn group_at(text: &str, offset: usize) -> Result<AbGroup> {
    let mut c = Cursor::new(text, offset);
    c.skip_ws();
    let mut terms = Vec::new();
    if c.eat("0") {
        terms.clear();
    } else {
        loop {
            let at = c.column();
            terms.push((at, term(&mut c)?));
            c.skip_ws();
            if !c.eat("+") {
                break;
            }
            c.skip_ws();
        }
    }
    c.skip_ws();
    let suffix = if c.eat("over") {
        if !c.peek().is_some_and(char::is_whitespace) {
            return c.syntax("expected whitespace after `over`");
        }
        c.skip_ws();
        let at = c.column();
        Some((at, ring_suffix(&mut c)?))
    } else {
        None
    };
    c.skip_ws();
    if !c.at_end() {
        return c.syntax(format!("unexpected trailing input `{}`", c.rest()));
    }

    let mut ring: Option<(usize, PrimeSet)> = suffix;
    let mut rank = 0usize;
    let mut cyclic = Vec::new();
    for (at, t) in terms {
        match t {
            Term::Free { ring: r, rank: k } => {
                match &ring {
                    Some((_, known)) if *known != r => {
                        return semantic(
                            at,
                            format!("free summand over {r} conflicts with ring {known}"),
                        )
                    }
                    Some(_) => {}
                    None => ring = Some((at, r)),
                }
                rank += k;
            }
            Term::Cyclic(n) => cyclic.push((at, n)),
        }
    }
    let ring = ring.map(|(_, r)| r).unwrap_or_else(PrimeSet::none);
    let mut torsion = Vec::new();
    for (at, n) in cyclic {
        let factors = factor_u64(n).map_err(|e| ParseError {
            kind: ErrorKind::Semantic,
            position: at,
            message: e.to_string(),
        })?;
        for (q, a) in factors {
            if ring.contains(q) {
                return semantic(
                    at,
                    format!("Z/{n} has {q}-torsion, but {q} is inverted in {ring}"),
                );
            }
            torsion.push((q, a));
        }
    }
    AbGroup::new(ring, rank, torsion).or_else(|e| semantic(offset, e.to_string()))
}

/// Parses a group expression into canonical form.
pub fn parse_group_expr(text: &str) -> Result<AbGroup> {
    group_at(text, 0)
}

/// True when `text` is a descriptor rather than a group.
pub fn is_descriptor(text: &str) -> bool {
    text.trim_start().starts_with("type")
}

/// Parses `type n=N pi2=(G2) ... piN=(GN)`.
pub fn parse_descriptor(text: &str) -> Result<SimplyConnectedDesc> {
    let mut c = Cursor::new(text, 0);
    c.skip_ws();
    c.expect("type")?;
    c.skip_ws();
    c.expect("n=")?;
    let n_at = c.column();
    let n = c.number()? as usize;
    let mut groups = Vec::new();
    loop {
        c.skip_ws();
        if c.at_end() {
            break;
        }
        c.expect("pi")?;
        let deg_at = c.column();
        let degree = c.number()? as usize;
        if degree != groups.len() + 2 {
            return semantic(deg_at, format!("expected pi{}, found pi{degree}", groups.len() + 2));
        }
        c.expect("=(")?;
        let start = c.pos;
        let mut depth = 1;
        while depth > 0 {
            match c.peek() {
                None => return c.syntax("unclosed `(`"),
                Some('(') => depth += 1,
                Some(')') => depth -= 1,
                Some(_) => {}
            }
            c.pos += 1;
        }
        let inner: String = c.chars[start..c.pos - 1].iter().collect();
        groups.push(group_at(&inner, c.offset + start)?);
    }
    SimplyConnectedDesc::new(n, groups).or_else(|e| semantic(n_at, e.to_string()))
}

/// Parses `a,b;c,d` (rows separated by `;`) into a `rows × cols` matrix of
/// rationals. The empty string stands for a matrix with no rows or no
/// columns.
pub fn parse_matrix(text: &str, rows: usize, cols: usize) -> Result<Vec<Vec<Rational>>> {
    if text.trim().is_empty() {
        if rows == 0 || cols == 0 {
            return Ok(vec![vec![]; rows]);
        }
        return semantic(0, format!("expected a {rows}x{cols} matrix, got an empty one"));
    }
    let mut out = Vec::new();
    let mut column = 0;
    for row in text.split(';') {
        let mut entries = Vec::new();
        for entry in row.split(',') {
            let value = parse_rational(entry).map_err(|_| ParseError {
                kind: ErrorKind::Syntax,
                position: column,
                message: format!("`{}` is not a rational number", entry.trim()),
            })?;
            entries.push(value);
            column += entry.chars().count() + 1;
        }
        out.push(entries);
    }
    let shape_ok = out.len() == rows && out.iter().all(|r| r.len() == cols);
    if !shape_ok {
        let got_cols = out.first().map_or(0, Vec::len);
        return semantic(
            0,
            format!("expected a {rows}x{cols} matrix, got {}x{got_cols}", out.len()),
        );
    }
    Ok(out)
}

/// Builds the localizer from `--family k1,k2,...` or `--at p`.
pub fn parse_localizer(family: Option<&str>, at: Option<u64>) -> Result<Localizer> {
    match (family, at) {
        (Some(text), None) => {
            let family: SFamily = text.parse().or_else(|e: abloc::arith::ArithError| semantic(0, e.to_string()))?;
            Ok(Localizer::Family(family))
        }
        (None, Some(p)) => Localizer::at(p).or_else(|e| semantic(0, e.to_string())),
        _ => semantic(0, "give exactly one of --family or --at"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use abloc::abgroup::PrimePower;

    fn torsion(g: &AbGroup) -> Vec<(u64, u32)> {
        g.torsion().iter().map(|&PrimePower { prime, exponent }| (prime, exponent)).collect()
    }

    #[test]
    fn free_plus_cyclic() {
        let g = parse_group_expr("Z + Z/12").unwrap();
        assert_eq!(g.rank(), 1);
        assert_eq!(torsion(&g), vec![(2, 2), (3, 1)]);
        assert_eq!(g.ring(), &PrimeSet::none());
    }

    #[test]
    fn ring_suffix_is_read() {
        let g = parse_group_expr("Z/3 over away:2").unwrap();
        assert_eq!(torsion(&g), vec![(3, 1)]);
        assert_eq!(g.ring(), &PrimeSet::finite(vec![2]).unwrap());
    }

    #[test]
    fn inverted_torsion_is_semantic() {
        let e = parse_group_expr("Z/4 over away:2").unwrap_err();
        assert_eq!(e.kind, ErrorKind::Semantic);
        assert_eq!(e.position, 0);
        let e = parse_group_expr("Z[1/6] + Z/5 + Z/9").unwrap_err();
        assert_eq!((e.kind, e.position), (ErrorKind::Semantic, 15));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let e = parse_group_expr("Z + Y").unwrap_err();
        assert_eq!((e.kind, e.position), (ErrorKind::Syntax, 4));
        let e = parse_group_expr("Z/4 over").unwrap_err();
        assert_eq!(e.kind, ErrorKind::Syntax);
        let e = parse_group_expr("Z/4 Z").unwrap_err();
        assert_eq!((e.kind, e.position), (ErrorKind::Syntax, 4));
    }

    #[test]
    fn free_symbols() {
        assert_eq!(parse_group_expr("Q^2").unwrap(), AbGroup::free(2, PrimeSet::all()));
        let local = parse_group_expr("Z_(5) + Z/25").unwrap();
        assert_eq!(local.ring(), &PrimeSet::cofinite(vec![5]).unwrap());
        assert_eq!(torsion(&local), vec![(5, 2)]);
        let g = parse_group_expr("Z[1/6]^3").unwrap();
        assert_eq!(g.ring(), &PrimeSet::finite(vec![2, 3]).unwrap());
        assert!(parse_group_expr("Z + Z[1/2]").is_err());
        assert!(parse_group_expr("Z_(4)").is_err());
    }

    #[test]
    fn trivial_group() {
        assert!(parse_group_expr("0").unwrap().is_trivial());
        assert_eq!(parse_group_expr("0 over away:3").unwrap().ring(), &PrimeSet::finite(vec![3]).unwrap());
        assert!(parse_group_expr("Z/1").unwrap().is_trivial());
    }

    #[test]
    fn expr_round_trips() {
        for text in ["Z + Z/4 + Z/3", "Z[1/2] + Z/3", "Z/3 over away:2", "Z_(5)^2 + Z/5", "0", "Q", "0 over at:7"] {
            assert_eq!(parse_group_expr(text).unwrap().expr(), text);
        }
    }

    #[test]
    fn descriptors() {
        let d = parse_descriptor("type n=3 pi2=(Z + Z/12) pi3=(Z_(5))").unwrap();
        assert_eq!(d.truncation(), 3);
        assert_eq!(d.pi(3).unwrap().ring(), &PrimeSet::cofinite(vec![5]).unwrap());
        assert_eq!(parse_descriptor(&d.to_string()).unwrap(), d);
        assert_eq!(parse_descriptor("type n=1").unwrap().groups().len(), 0);
        let e = parse_descriptor("type n=3 pi2=(Z) pi4=(Z)").unwrap_err();
        assert_eq!(e.position, 19);
        let e = parse_descriptor("type n=3 pi2=(Z) pi3=(Z/4 over away:2)").unwrap_err();
        assert_eq!((e.kind, e.position), (ErrorKind::Semantic, 22));
        assert!(parse_descriptor("type n=3 pi2=(Z)").is_err());
    }

    #[test]
    fn matrices() {
        let m = parse_matrix("1, 0; 1/2, -3", 2, 2).unwrap();
        assert_eq!(m[1][0], Rational::new(1.into(), 2.into()));
        assert_eq!(parse_matrix("", 0, 3).unwrap().len(), 0);
        assert_eq!(parse_matrix("", 2, 0).unwrap(), vec![Vec::<Rational>::new(); 2]);
        assert!(parse_matrix("1,2", 2, 1).is_err());
        assert_eq!(parse_matrix("1,x", 1, 2).unwrap_err().position, 2);
    }

    #[test]
    fn localizers() {
        assert_eq!(parse_localizer(Some("2,3"), None).unwrap(), Localizer::family(vec![2, 3]).unwrap());
        assert_eq!(parse_localizer(None, Some(5)).unwrap(), Localizer::at(5).unwrap());
        assert!(parse_localizer(None, Some(6)).is_err());
        assert!(parse_localizer(None, None).is_err());
    }
}
