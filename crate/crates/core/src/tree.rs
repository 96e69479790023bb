//! Wreath recursion: sections, vertex action, portraits and level permutations.
//!
//! Automorphisms act on the right. For `g` with root permutation `s` and
//! sections `g_x`, `(x v)^g = x^s v^{g_x}` and `(gh)_x = g_x h_{x^g}`.
//! Conjugation is `g^h = h^-1 g h`, so conjugating by `a` shifts the section
//! tuple one place to the right.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ggs::Ggs;
use crate::perm::{Layout, Perm};
use crate::word::{Gen, Word};

/// A vertex of the tree as a string of letters in `1..=p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vertex(Vec<u32>);

impl Vertex {
    pub fn root() -> Self {
        Vertex(Vec::new())
    }

    pub fn new(p: u32, letters: Vec<u32>) -> Result<Self> {
        if let Some(&letter) = letters.iter().find(|&&x| x == 0 || x > p) {
            return Err(Error::BadLetter { letter, p });
        }
        Ok(Vertex(letters))
    }

    pub fn letters(&self) -> &[u32] {
        &self.0
    }

    pub fn level(&self) -> usize {
        self.0.len()
    }

    /// Lexicographic rank within its level.
    pub fn rank(&self, p: u32) -> usize {
        self.0
            .iter()
            .fold(0, |acc, &x| acc * p as usize + (x - 1) as usize)
    }

    pub fn from_rank(p: u32, level: usize, mut rank: usize) -> Self {
        let mut letters = vec![0u32; level];
        for slot in letters.iter_mut().rev() {
            *slot = (rank % p as usize) as u32 + 1;
            rank /= p as usize;
        }
        Vertex(letters)
    }
}

impl std::fmt::Display for Vertex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_empty() {
            return write!(f, "()");
        }
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// `psi(w)` together with the root exponent: `w` acts at the root as `sigma^root_exponent`
/// and `sections[x - 1]` is its section at the level-1 vertex `x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SectionTuple {
    pub root_exponent: u32,
    pub sections: Vec<Word>,
}

/// Local sigma-exponents of an automorphism down to a fixed depth.
///
/// `labels[k]` holds the `p^k` labels of level `k` in lexicographic order;
/// levels `0..=depth` are present.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Portrait {
    p: u32,
    depth: usize,
    labels: Vec<Vec<u32>>,
}

impl Portrait {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn label(&self, v: &Vertex) -> u32 {
        self.labels[v.level()][v.rank(self.p)]
    }

    pub fn level_labels(&self, k: usize) -> &[u32] {
        &self.labels[k]
    }

    /// Permutation of levels `1..=n` determined by the labels above level `n`.
    pub fn to_permutation(&self, n: usize) -> Result<Perm> {
        if n > self.depth {
            return Err(Error::DepthExceeded {
                level: n,
                cap: self.depth,
            });
        }
        let p = self.p as usize;
        let layout = Layout::tree(self.p, n);
        let mut images = Vec::with_capacity(layout.degree());
        for k in 1..=n {
            for rank in 0..layout.level_size(k) {
                let v = Vertex::from_rank(self.p, k, rank);
                let (mut src, mut img) = (0usize, 0usize);
                for (j, &x) in v.letters().iter().enumerate() {
                    let x = (x - 1) as usize;
                    let shift = self.labels[j][src] as usize;
                    img = img * p + (x + shift) % p;
                    src = src * p + x;
                }
                images.push(layout.index(k, img) as u32);
            }
        }
        Ok(Perm(images))
    }

    /// Graphviz rendering: one node per vertex, labelled with its exponent.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph portrait {\n  node [shape=circle];\n");
        for k in 0..=self.depth {
            for (rank, label) in self.labels[k].iter().enumerate() {
                let v = Vertex::from_rank(self.p, k, rank);
                let _ = writeln!(out, "  \"{}\" [label=\"{}\"];", node_id(&v), label);
                if k > 0 {
                    let parent = Vertex(v.letters()[..k - 1].to_vec());
                    let _ = writeln!(out, "  \"{}\" -> \"{}\";", node_id(&parent), node_id(&v));
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

fn node_id(v: &Vertex) -> String {
    let mut s = String::from("v");
    for x in v.letters() {
        let _ = write!(s, "{x}");
    }
    s
}

impl Ggs {
    /// Exponent of the root permutation `sigma^k` of `w`.
    pub fn root_exponent(&self, w: &Word) -> u32 {
        w.exponent_sum(Gen::A)
    }

    /// Split `w` into its root exponent and its `p` first-level sections.
    pub fn decompose(&self, w: &Word) -> SectionTuple {
        let p = self.p();
        let e = self.vector();
        let mut sections = vec![Word::identity(p); p as usize];
        let mut shift = 0u32;
        for s in w.syllables() {
            match s.gen {
                Gen::A => shift = (shift + s.exp) % p,
                Gen::B => {
                    for (x, sec) in sections.iter_mut().enumerate() {
                        let pos = (x as u32 + shift) % p;
                        if pos == p - 1 {
                            sec.push(Gen::B, s.exp as i64);
                        } else {
                            let k = s.exp as i64 * e.e(pos as i64 + 1) as i64;
                            sec.push(Gen::A, k);
                        }
                    }
                }
            }
        }
        SectionTuple {
            root_exponent: shift,
            sections,
        }
    }

    /// Section of `w` at the level-1 vertex with 0-based letter `x`.
    pub fn section(&self, w: &Word, x: usize) -> Word {
        let p = self.p();
        let e = self.vector();
        let mut sec = Word::identity(p);
        let mut pos = x as u32 % p;
        for s in w.syllables() {
            match s.gen {
                Gen::A => pos = (pos + s.exp) % p,
                Gen::B => {
                    if pos == p - 1 {
                        sec.push(Gen::B, s.exp as i64);
                    } else {
                        sec.push(Gen::A, s.exp as i64 * e.e(pos as i64 + 1) as i64);
                    }
                }
            }
        }
        sec
    }

    /// Section of `w` at an arbitrary vertex (the vertex need not be fixed).
    pub fn section_at(&self, w: &Word, v: &Vertex) -> Word {
        let mut cur = w.clone();
        for &x in v.letters() {
            cur = self.section(&cur, (x - 1) as usize);
        }
        cur
    }

    /// Image `v^w`.
    pub fn act(&self, w: &Word, v: &Vertex) -> Result<Vertex> {
        self.ctx().check_level(v.level())?;
        let p = self.p();
        let mut cur = w.clone();
        let mut out = Vec::with_capacity(v.level());
        for &x in v.letters() {
            let pos = x - 1;
            out.push((pos + self.root_exponent(&cur)) % p + 1);
            cur = self.section(&cur, pos as usize);
        }
        Ok(Vertex(out))
    }

    pub fn portrait(&self, w: &Word, depth: usize) -> Result<Portrait> {
        self.ctx().check_level(depth)?;
        let mut labels = Vec::with_capacity(depth + 1);
        let mut words = vec![w.clone()];
        for k in 0..=depth {
            labels.push(words.iter().map(|u| self.root_exponent(u)).collect());
            if k < depth {
                words = words
                    .iter()
                    .flat_map(|u| self.decompose(u).sections)
                    .collect();
            }
        }
        Ok(Portrait {
            p: self.p(),
            depth,
            labels,
        })
    }

    /// The permutation induced by `w` on all vertices of levels `1..=n`,
    /// computed vertex by vertex through [`Ggs::act`].
    pub fn level_permutation(&self, w: &Word, n: usize) -> Result<Perm> {
        self.ctx().check_level(n)?;
        let p = self.p();
        let layout = Layout::tree(p, n);
        let mut images = Vec::with_capacity(layout.degree());
        for k in 1..=n {
            for rank in 0..layout.level_size(k) {
                let v = Vertex::from_rank(p, k, rank);
                let img = self.act(w, &v)?;
                images.push(layout.index(k, img.rank(p)) as u32);
            }
        }
        Ok(Perm(images))
    }
}
