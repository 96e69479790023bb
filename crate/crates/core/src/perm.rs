//! Dense permutations of the vertices of a truncated tree (or a forest of
//! equal trees) and the vertex layout they act on.
//!
//! The domain is every vertex of levels `1..=depth`, level by level and
//! lexicographically within a level. Roots are not part of the domain and are
//! always fixed. With this ordering the first child of the `d`-th vertex of
//! levels `0..depth` (roots included, in the same order) sits at index `p * d`,
//! and the last letter of a domain vertex is its index mod `p`; both facts are
//! used throughout.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Layout {
    p: u32,
    depth: usize,
    trees: usize,
    /// `offsets[k]` is the index of the first level-`k` vertex, `k` in `1..=depth+1`.
    offsets: Vec<usize>,
}

impl Layout {
    pub fn tree(p: u32, depth: usize) -> Self {
        Self::forest(p, depth, 1)
    }

    pub fn forest(p: u32, depth: usize, trees: usize) -> Self {
        let mut offsets = vec![0usize; depth + 2];
        let mut size = trees;
        for k in 1..=depth {
            size *= p as usize;
            offsets[k + 1] = offsets[k] + size;
        }
        Self {
            p,
            depth,
            trees,
            offsets,
        }
    }

    /// Number of domain vertices for a single tree of the given depth.
    pub fn tree_degree(p: u32, depth: usize) -> usize {
        (1..=depth).map(|k| (p as usize).pow(k as u32)).sum()
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn trees(&self) -> usize {
        self.trees
    }

    pub fn degree(&self) -> usize {
        self.offsets[self.depth + 1]
    }

    pub fn level_size(&self, k: usize) -> usize {
        self.trees * (self.p as usize).pow(k as u32)
    }

    /// First domain index of level `k >= 1`.
    pub fn level_start(&self, k: usize) -> usize {
        self.offsets[k]
    }

    pub fn index(&self, k: usize, rank: usize) -> usize {
        debug_assert!(k >= 1 && rank < self.level_size(k));
        self.offsets[k] + rank
    }

    /// Level of a domain index.
    pub fn level_of(&self, index: usize) -> usize {
        (1..=self.depth)
            .find(|&k| index < self.offsets[k + 1])
            .expect("index inside domain")
    }

    /// Number of label positions (vertices of levels `0..depth`, roots included).
    pub fn label_count(&self) -> usize {
        if self.depth == 0 {
            0
        } else {
            self.trees + self.offsets[self.depth]
        }
    }

    /// First label position of level `k`.
    pub fn label_level_start(&self, k: usize) -> usize {
        if k == 0 {
            0
        } else {
            self.trees + self.offsets[k]
        }
    }

    /// Local sigma-exponent of `g` at label position `d`.
    #[inline]
    pub fn label(&self, g: &Perm, d: usize) -> u32 {
        g.0[self.p as usize * d] % self.p
    }

    /// Whether `g` preserves the tree structure, fixes every root and acts at
    /// each vertex by a power of the p-cycle.
    pub fn is_sigma_automorphism(&self, g: &Perm) -> bool {
        if g.degree() != self.degree() {
            return false;
        }
        let p = self.p as usize;
        for d in 0..self.label_count() {
            let image_pos = if d < self.trees {
                d
            } else {
                g.0[d - self.trees] as usize + self.trees
            };
            let shift = g.0[p * d] as usize % p;
            for j in 0..p {
                if g.0[p * d + j] as usize != p * image_pos + (j + shift) % p {
                    return false;
                }
            }
        }
        true
    }

    /// Restriction of a perm on the levels `1..=depth` of a tree to the forest of
    /// `p` subtrees below level 1. Only meaningful when `g` fixes level 1.
    pub fn restrict_below_first_level(&self, g: &Perm) -> Perm {
        debug_assert_eq!(self.trees, 1);
        let p = self.p as usize;
        Perm(g.0[p..].iter().map(|&x| x - p as u32).collect())
    }

    /// Copy of a single-tree perm placed on tree `t` of this forest, identity elsewhere.
    pub fn embed_in_tree(&self, t: usize, g: &Perm) -> Perm {
        let single = Layout::tree(self.p, self.depth);
        debug_assert_eq!(g.degree(), single.degree());
        let mut out = Perm::identity(self.degree());
        for k in 1..=self.depth {
            let size = single.level_size(k);
            let base = self.offsets[k] + t * size;
            for r in 0..size {
                let img = g.0[single.offsets[k] + r] as usize - single.offsets[k];
                out.0[base + r] = (base + img) as u32;
            }
        }
        out
    }

    /// The action of a forest perm on tree `t`, as a single-tree perm.
    pub fn project_to_tree(&self, t: usize, g: &Perm) -> Perm {
        let single = Layout::tree(self.p, self.depth);
        let mut out = Perm::identity(single.degree());
        for k in 1..=self.depth {
            let size = single.level_size(k);
            let base = self.offsets[k] + t * size;
            for r in 0..size {
                let img = g.0[base + r] as usize - base;
                out.0[single.offsets[k] + r] = (single.offsets[k] + img) as u32;
            }
        }
        out
    }

    /// Restriction to the first `depth` levels of a deeper layout's perm.
    pub fn truncate(&self, g: &Perm) -> Perm {
        Perm(g.0[..self.degree()].to_vec())
    }
}

/// A permutation in image form: point `i` is sent to `self.0[i]`.
///
/// Products act on the right: `g.mul(h)` applies `g` first, then `h`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Perm(pub(crate) Vec<u32>);

impl Perm {
    pub fn identity(degree: usize) -> Self {
        Perm((0..degree as u32).collect())
    }

    pub fn from_images(images: Vec<u32>) -> Option<Self> {
        let mut seen = vec![false; images.len()];
        for &x in &images {
            let x = x as usize;
            if x >= images.len() || seen[x] {
                return None;
            }
            seen[x] = true;
        }
        Some(Perm(images))
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.0[i] as usize
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    pub fn mul(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&x| other.0[x as usize]).collect())
    }

    pub fn mul_into(&self, other: &Perm, out: &mut Perm) {
        for (o, &x) in out.0.iter_mut().zip(&self.0) {
            *o = other.0[x as usize];
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Perm(inv)
    }

    pub fn pow(&self, k: u64) -> Perm {
        let mut acc = Perm::identity(self.degree());
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    /// `by^-1 * self * by`.
    pub fn conj(&self, by: &Perm) -> Perm {
        by.inverse().mul(self).mul(by)
    }

    /// `[x, y] = x^-1 y^-1 x y`.
    pub fn comm(x: &Perm, y: &Perm) -> Perm {
        x.inverse().mul(&y.inverse()).mul(x).mul(y)
    }

    /// Order as the lcm of cycle lengths.
    pub fn order(&self) -> u64 {
        let mut seen = vec![false; self.0.len()];
        let mut acc = 1u64;
        for start in 0..self.0.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0u64;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.0[i] as usize;
                len += 1;
            }
            acc = lcm(acc, len);
        }
        acc
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    fn gcd(mut a: u64, mut b: u64) -> u64 {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    }
    a / gcd(a, b) * b
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() <= 40 {
            write!(f, "Perm{:?}", self.0)
        } else {
            write!(f, "Perm(degree {}, {} moved)", self.0.len(), self.0.iter().enumerate().filter(|(i, &x)| *i as u32 != x).count())
        }
    }
}
