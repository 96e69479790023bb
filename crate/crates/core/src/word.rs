//! Words in the generators `a` and `b`.
//!
//! Both generators have order `p` in every GGS-group, so words are kept in the
//! normal form of the free product `C_p * C_p`: alternating syllables `a^i`,
//! `b^j` with exponents in `1..p`. Two words that differ in this normal form
//! may still be equal in the group; equality there goes through the word
//! problem in [`crate::order`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prime::residue;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Gen {
    A,
    B,
}

/// `gen^exp` with `exp` in `1..p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Syllable {
    pub gen: Gen,
    pub exp: u32,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    p: u32,
    syllables: Vec<Syllable>,
}

impl Word {
    pub fn identity(p: u32) -> Self {
        Self {
            p,
            syllables: Vec::new(),
        }
    }

    pub fn gen_pow(p: u32, gen: Gen, exp: i64) -> Self {
        let mut w = Self::identity(p);
        w.push(gen, exp);
        w
    }

    pub fn a(p: u32) -> Self {
        Self::gen_pow(p, Gen::A, 1)
    }

    pub fn b(p: u32) -> Self {
        Self::gen_pow(p, Gen::B, 1)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    /// Number of syllables.
    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Appends `gen^exp`, merging with the last syllable when possible.
    pub fn push(&mut self, gen: Gen, exp: i64) {
        let e = residue(exp, self.p);
        if e == 0 {
            return;
        }
        match self.syllables.last_mut() {
            Some(last) if last.gen == gen => {
                let merged = (last.exp + e) % self.p;
                if merged == 0 {
                    self.syllables.pop();
                } else {
                    last.exp = merged;
                }
            }
            _ => self.syllables.push(Syllable { gen, exp: e }),
        }
    }

    pub fn mul(&self, other: &Word) -> Word {
        debug_assert_eq!(self.p, other.p);
        let mut out = self.clone();
        out.mul_assign(other);
        out
    }

    pub fn mul_assign(&mut self, other: &Word) {
        for s in &other.syllables {
            self.push(s.gen, s.exp as i64);
        }
    }

    pub fn inverse(&self) -> Word {
        Word {
            p: self.p,
            syllables: self
                .syllables
                .iter()
                .rev()
                .map(|s| Syllable {
                    gen: s.gen,
                    exp: self.p - s.exp,
                })
                .collect(),
        }
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity(self.p);
        for _ in 0..k.unsigned_abs() {
            out.mul_assign(&base);
        }
        out
    }

    /// `by^-1 * self * by`.
    pub fn conj(&self, by: &Word) -> Word {
        by.inverse().mul(self).mul(by)
    }

    /// `[x, y] = x^-1 y^-1 x y`.
    pub fn comm(x: &Word, y: &Word) -> Word {
        x.inverse().mul(&y.inverse()).mul(x).mul(y)
    }

    /// Left-normed commutator `[x1, x2, ..., xk] = [[x1, x2], ..., xk]`.
    pub fn comm_left_normed(parts: &[Word]) -> Word {
        let mut it = parts.iter();
        let mut acc = it.next().cloned().expect("at least one part");
        for w in it {
            acc = Word::comm(&acc, w);
        }
        acc
    }

    /// Exponent sum of `gen`, reduced mod p.
    pub fn exponent_sum(&self, gen: Gen) -> u32 {
        self.syllables
            .iter()
            .filter(|s| s.gen == gen)
            .fold(0, |acc, s| (acc + s.exp) % self.p)
    }

    /// Total number of letters when every exponent is written with its
    /// smallest absolute representative.
    pub fn letter_len(&self) -> usize {
        self.syllables
            .iter()
            .map(|s| signed_rep(s.exp, self.p).unsigned_abs() as usize)
            .sum()
    }

    pub fn parse(p: u32, src: &str) -> Result<Word> {
        let mut parser = Parser {
            src: src.as_bytes(),
            pos: 0,
            p,
        };
        let w = parser.expr()?;
        parser.skip_ws();
        if parser.pos != parser.src.len() {
            return Err(parser.err("trailing input"));
        }
        Ok(w)
    }
}

/// Representative of `e` in `(-p/2, p/2]`.
fn signed_rep(e: u32, p: u32) -> i64 {
    let e = e as i64;
    if e * 2 > p as i64 {
        e - p as i64
    } else {
        e
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syllables.is_empty() {
            return write!(f, "1");
        }
        for (i, s) in self.syllables.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            let g = match s.gen {
                Gen::A => 'a',
                Gen::B => 'b',
            };
            match signed_rep(s.exp, self.p) {
                1 => write!(f, "{g}")?,
                k => write!(f, "{g}^{k}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({})", self)
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

// Grammar:
//   expr  := term (('*' | <adjacent>) term)*
//   term  := atom ('^' (int | atom))*
//   atom  := 'a' | 'b' | '1' | ('b' | 'y') '_'? digits | '(' expr ')' | '[' expr (',' expr)+ ']'
// `x^y` with a word exponent is conjugation y^-1 x y; `b_i = b^(a^i)`, `y_i = (b a^-1)^(a^i)`.
struct Parser<'s> {
    src: &'s [u8],
    pos: usize,
    p: u32,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse {
            offset: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Word> {
        let mut w = self.term()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let t = self.term()?;
                    w.mul_assign(&t);
                }
                Some(c) if c == b'a' || c == b'b' || c == b'y' || c == b'1' || c == b'(' || c == b'[' => {
                    let t = self.term()?;
                    w.mul_assign(&t);
                }
                _ => return Ok(w),
            }
        }
    }

    fn term(&mut self) -> Result<Word> {
        let mut w = self.atom()?;
        while self.peek() == Some(b'^') {
            self.pos += 1;
            match self.peek() {
                Some(c) if c == b'-' || c.is_ascii_digit() => {
                    let k = self.int()?;
                    w = w.pow(k);
                }
                _ => {
                    let by = self.atom()?;
                    w = w.conj(&by);
                }
            }
        }
        Ok(w)
    }

    fn int(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        if self.src.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        let digits = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if digits == self.pos {
            return Err(self.err("expected integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| self.err("integer out of range"))
    }

    fn index_suffix(&mut self) -> Result<Option<i64>> {
        let mut pos = self.pos;
        if self.src.get(pos) == Some(&b'_') {
            pos += 1;
        }
        if self.src.get(pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos = pos;
            return self.int().map(Some);
        }
        Ok(None)
    }

    fn atom(&mut self) -> Result<Word> {
        let p = self.p;
        let c = self.peek().ok_or_else(|| self.err("unexpected end of input"))?;
        self.pos += 1;
        match c {
            b'a' => Ok(Word::a(p)),
            b'1' => Ok(Word::identity(p)),
            b'b' => Ok(match self.index_suffix()? {
                Some(i) => Word::b(p).conj(&Word::gen_pow(p, Gen::A, i)),
                None => Word::b(p),
            }),
            b'y' => {
                let i = self
                    .index_suffix()?
                    .ok_or_else(|| self.err("`y` needs an index"))?;
                let y0 = Word::b(p).mul(&Word::gen_pow(p, Gen::A, -1));
                Ok(y0.conj(&Word::gen_pow(p, Gen::A, i)))
            }
            b'(' => {
                let w = self.expr()?;
                self.expect(b')')?;
                Ok(w)
            }
            b'[' => {
                let mut parts = vec![self.expr()?];
                while self.peek() == Some(b',') {
                    self.pos += 1;
                    parts.push(self.expr()?);
                }
                self.expect(b']')?;
                if parts.len() < 2 {
                    return Err(self.err("commutator needs at least two entries"));
                }
                Ok(Word::comm_left_normed(&parts))
            }
            _ => {
                self.pos -= 1;
                Err(self.err(&format!("unexpected `{}`", c as char)))
            }
        }
    }
}
