//! Permutation groups inside the Sylow p-subgroup of the automorphisms of a
//! truncated tree (or forest), with an exact stabilizer chain.
//!
//! The base is the first child of every vertex of levels `0..depth`,
//! breadth-first. Fixing the earlier base points of a sigma-automorphism
//! fixes the vertex above the next one, so every basic orbit has size 1 or
//! `p`, and one transversal element per non-trivial orbit is enough: the
//! element whose local exponent at that vertex is 1. The chain is closed
//! under p-th powers and pairwise commutators, which makes every group
//! element a unique product `t_1^{c_1} ... t_m^{c_m}` of chain links in base
//! order, so `|H| = p^m` and sifting decides membership.

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::perm::{Layout, Perm};
use crate::prime::inv_mod;

#[derive(Debug, Clone)]
struct Link {
    elt: Perm,
    /// `inv_pows[c - 1] = elt^-c`.
    inv_pows: Vec<Perm>,
}

impl Link {
    fn new(elt: Perm, p: u32) -> Self {
        let inv = elt.inverse();
        let mut inv_pows = Vec::with_capacity(p as usize - 1);
        let mut cur = inv.clone();
        for _ in 1..p {
            inv_pows.push(cur.clone());
            cur = cur.mul(&inv);
        }
        Self { elt, inv_pows }
    }

    fn inverse(&self) -> &Perm {
        &self.inv_pows[0]
    }
}

#[derive(Debug, Clone)]
pub struct PermGroup {
    layout: Arc<Layout>,
    gens: Vec<Perm>,
    /// Indexed by base position (label position of the layout).
    links: Vec<Option<Link>>,
    rank: usize,
}

enum Work {
    Elt(Perm),
    Comm(usize, usize),
    Power(usize),
    Conj(usize, usize),
}

impl PermGroup {
    pub fn trivial(layout: Arc<Layout>) -> Self {
        let n = layout.label_count();
        Self {
            layout,
            gens: Vec::new(),
            links: vec![None; n],
            rank: 0,
        }
    }

    /// `<gens>`.
    pub fn generate(layout: Arc<Layout>, gens: &[Perm]) -> Result<Self> {
        let mut g = Self::trivial(layout);
        g.check_elements(gens)?;
        g.gens = dedup_nontrivial(gens);
        let seeds = g.gens.clone();
        g.close(seeds, &[]);
        Ok(g)
    }

    /// `<seeds>^ambient`, the normal closure in `ambient`.
    pub fn normal_closure(ambient: &PermGroup, seeds: &[Perm]) -> Result<Self> {
        let mut g = Self::trivial(ambient.layout.clone());
        g.check_elements(seeds)?;
        if !seeds.iter().all(|s| ambient.contains(s)) {
            return Err(Error::NotSubgroup);
        }
        g.close(dedup_nontrivial(seeds), &ambient.gens);
        g.gens = g.strong_generators();
        Ok(g)
    }

    fn check_elements(&self, elts: &[Perm]) -> Result<()> {
        if elts.iter().all(|g| self.layout.is_sigma_automorphism(g)) {
            Ok(())
        } else {
            Err(Error::NotTreeAutomorphism)
        }
    }

    pub fn layout(&self) -> &Arc<Layout> {
        &self.layout
    }

    pub fn p(&self) -> u32 {
        self.layout.p()
    }

    pub fn generators(&self) -> &[Perm] {
        &self.gens
    }

    /// Chain links in base order; they generate the group.
    pub fn strong_generators(&self) -> Vec<Perm> {
        self.links.iter().flatten().map(|l| l.elt.clone()).collect()
    }

    /// Base positions with a non-trivial basic orbit.
    pub fn chain_positions(&self) -> Vec<usize> {
        (0..self.links.len()).filter(|&d| self.links[d].is_some()).collect()
    }

    /// `log_p |H|`.
    pub fn log_order(&self) -> usize {
        self.rank
    }

    pub fn order(&self) -> BigUint {
        BigUint::from(self.p()).pow(self.rank as u32)
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 0
    }

    /// Strip `g` through the chain; returns the residue and the base position
    /// where it stopped, or `None` once every label vanished.
    fn sift(&self, g: Perm) -> (Perm, Option<usize>) {
        let layout = &*self.layout;
        let mut cur = g;
        let mut buf = Perm::identity(cur.degree());
        for d in 0..self.links.len() {
            let c = layout.label(&cur, d);
            if c == 0 {
                continue;
            }
            match &self.links[d] {
                Some(link) => {
                    cur.mul_into(&link.inv_pows[c as usize - 1], &mut buf);
                    std::mem::swap(&mut cur, &mut buf);
                }
                None => return (cur, Some(d)),
            }
        }
        (cur, None)
    }

    pub fn contains(&self, g: &Perm) -> bool {
        if g.degree() != self.layout.degree() {
            return false;
        }
        let (residue, stop) = self.sift(g.clone());
        stop.is_none() && residue.is_identity()
    }

    fn close(&mut self, seeds: Vec<Perm>, normalizers: &[Perm]) {
        let p = self.p();
        let mut queue: Vec<Work> = seeds.into_iter().map(Work::Elt).collect();
        while let Some(item) = queue.pop() {
            let g = match item {
                Work::Elt(g) => g,
                Work::Comm(x, y) => {
                    let (lx, ly) = (self.link(x), self.link(y));
                    lx.inverse()
                        .mul(ly.inverse())
                        .mul(&lx.elt)
                        .mul(&ly.elt)
                }
                Work::Power(x) => self.link(x).elt.pow(p as u64),
                Work::Conj(x, s) => {
                    let s = &normalizers[s];
                    s.inverse().mul(&self.link(x).elt).mul(s)
                }
            };
            let (residue, stop) = self.sift(g);
            let Some(d) = stop else { continue };
            let lead = self.layout.label(&residue, d);
            let elt = residue.pow(inv_mod(lead, p) as u64);
            debug_assert_eq!(self.layout.label(&elt, d), 1);
            for other in 0..self.links.len() {
                if self.links[other].is_some() {
                    queue.push(Work::Comm(d, other));
                }
            }
            queue.push(Work::Power(d));
            for s in 0..normalizers.len() {
                queue.push(Work::Conj(d, s));
            }
            self.links[d] = Some(Link::new(elt, p));
            self.rank += 1;
        }
    }

    fn link(&self, d: usize) -> &Link {
        self.links[d].as_ref().expect("chain link present")
    }

    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.layout == other.layout && self.strong_generators().iter().all(|g| other.contains(g))
    }

    pub fn same_group(&self, other: &PermGroup) -> bool {
        self.rank == other.rank && self.is_subgroup_of(other)
    }

    /// `|self : sub|`.
    pub fn index_of(&self, sub: &PermGroup) -> Result<BigUint> {
        if self.layout != sub.layout {
            return Err(Error::DomainMismatch);
        }
        if !sub.is_subgroup_of(self) {
            return Err(Error::NotSubgroup);
        }
        Ok(BigUint::from(self.p()).pow((self.rank - sub.rank) as u32))
    }

    /// Normal in `self` is assumed for `self.join(...)` callers that need it; this is just `<self, other>`.
    pub fn join(&self, other: &PermGroup) -> Result<PermGroup> {
        if self.layout != other.layout {
            return Err(Error::DomainMismatch);
        }
        let mut gens = self.gens.clone();
        gens.extend(other.gens.iter().cloned());
        let mut g = self.clone();
        g.gens = dedup_nontrivial(&gens);
        g.close(other.strong_generators(), &[]);
        Ok(g)
    }

    /// `[self, ambient]` as a subgroup of `ambient`, for `self` normal in `ambient`.
    pub fn commutator_with(&self, ambient: &PermGroup) -> Result<PermGroup> {
        let mut seeds = Vec::new();
        for x in &self.gens {
            for y in &ambient.gens {
                seeds.push(Perm::comm(x, y));
            }
        }
        PermGroup::normal_closure(ambient, &seeds)
    }

    pub fn derived_subgroup(&self) -> PermGroup {
        let mut seeds = Vec::new();
        for (i, x) in self.gens.iter().enumerate() {
            for y in &self.gens[i + 1..] {
                seeds.push(Perm::comm(x, y));
            }
        }
        PermGroup::normal_closure(self, &seeds).expect("commutators of members are members")
    }

    /// `gamma_1 = self, gamma_{i+1} = [gamma_i, self]`, stopping at the trivial
    /// group or after `cap` terms.
    pub fn lower_central_series(&self, cap: usize) -> Series {
        let mut terms = vec![self.clone()];
        loop {
            let last = terms.last().expect("non-empty");
            if last.is_trivial() {
                return Series {
                    terms,
                    truncated: false,
                };
            }
            if terms.len() >= cap {
                return Series {
                    terms,
                    truncated: true,
                };
            }
            let next = last
                .commutator_with(self)
                .expect("terms are normal subgroups");
            terms.push(next);
        }
    }

    /// `H^(i)`: `derived_series(k)[i]`, for `i <= k`.
    pub fn derived_series(&self, k: usize) -> Vec<PermGroup> {
        let mut out = vec![self.clone()];
        for _ in 0..k {
            let next = out.last().expect("non-empty").derived_subgroup();
            out.push(next);
        }
        out
    }

    /// The pointwise stabilizer of all vertices of levels `1..=m`: a suffix of the chain.
    pub fn level_stabilizer(&self, m: usize) -> Result<PermGroup> {
        if m > self.layout.depth() {
            return Err(Error::LevelTooDeep {
                m,
                n: self.layout.depth(),
            });
        }
        let start = self.layout.label_level_start(m);
        let mut g = Self::trivial(self.layout.clone());
        for d in start..self.links.len() {
            if let Some(link) = &self.links[d] {
                g.links[d] = Some(link.clone());
                g.rank += 1;
            }
        }
        g.gens = g.strong_generators();
        Ok(g)
    }

    /// Invariants of `H/H'` from the sizes of `H' H^{p^k}`.
    pub fn abelian_invariants(&self) -> AbelianInvariants {
        let p = self.p();
        let derived = self.derived_subgroup();
        let strong = self.strong_generators();
        let mut previous = 0usize; // s_0 = log_p |H : H' H| = 0
        let mut counts = Vec::new();
        let mut k = 1u32;
        loop {
            let q = (p as u64).pow(k);
            let powers: Vec<Perm> = strong.iter().map(|g| g.pow(q)).collect();
            let mut sub = derived.clone();
            sub.close(powers, &self.gens);
            let s_k = self.rank - sub.rank;
            if s_k == previous {
                break;
            }
            counts.push(s_k - previous);
            previous = s_k;
            k += 1;
        }
        // counts[k-1] = #{ i : a_i >= k }
        let mut exponents = Vec::new();
        for (idx, &c) in counts.iter().enumerate() {
            let at_least = c;
            let at_least_next = counts.get(idx + 1).copied().unwrap_or(0);
            for _ in 0..at_least - at_least_next {
                exponents.push(idx as u32 + 1);
            }
        }
        exponents.sort_unstable_by(|a, b| b.cmp(a));
        AbelianInvariants { p, exponents }
    }

    /// Every element of the group, in no particular order. Only for small groups.
    pub fn elements(&self) -> Vec<Perm> {
        let mut out = vec![Perm::identity(self.layout.degree())];
        for link in self.links.iter().rev().flatten() {
            let mut next = Vec::with_capacity(out.len() * self.p() as usize);
            let mut pw = Perm::identity(self.layout.degree());
            for _ in 0..self.p() {
                for x in &out {
                    next.push(pw.mul(x));
                }
                pw = pw.mul(&link.elt);
            }
            out = next;
        }
        out
    }
}

fn dedup_nontrivial(gens: &[Perm]) -> Vec<Perm> {
    let mut out: Vec<Perm> = Vec::new();
    for g in gens {
        if !g.is_identity() && !out.contains(g) {
            out.push(g.clone());
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct Series {
    pub terms: Vec<PermGroup>,
    pub truncated: bool,
}

impl Series {
    /// Number of non-trivial terms.
    pub fn nontrivial_len(&self) -> usize {
        self.terms.iter().filter(|t| !t.is_trivial()).count()
    }
}

/// Cyclic factors `C_{p^a_1} x C_{p^a_2} x ...` with `a_1 >= a_2 >= ...`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbelianInvariants {
    pub p: u32,
    pub exponents: Vec<u32>,
}

impl AbelianInvariants {
    pub fn orders(&self) -> Vec<BigUint> {
        self.exponents
            .iter()
            .map(|&a| BigUint::from(self.p).pow(a))
            .collect()
    }

    pub fn total_order(&self) -> BigUint {
        self.orders().into_iter().fold(BigUint::one(), |acc, x| acc * x)
    }

    pub fn is_homocyclic(&self) -> bool {
        self.exponents.windows(2).all(|w| w[0] == w[1])
    }
}

/// `log_p n` when `n` is a power of `p`.
pub fn log_p(n: &BigUint, p: u32) -> Option<u32> {
    let mut n = n.clone();
    let p = BigUint::from(p);
    let mut k = 0;
    while n > BigUint::one() {
        if &n % &p != BigUint::ZERO {
            return None;
        }
        n /= &p;
        k += 1;
    }
    (n == BigUint::one()).then_some(k)
}
