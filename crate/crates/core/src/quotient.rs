//! Congruence quotients `G/st_G(n)` as permutation groups on levels `1..=n`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ggs::Ggs;
use crate::group::PermGroup;
use crate::perm::{Layout, Perm};
use crate::word::{Gen, Word};

pub const DEFAULT_DEGREE_CAP: usize = 3900;

#[derive(Debug, Clone)]
pub struct QuotientRep {
    ggs: Ggs,
    level: usize,
    layout: Arc<Layout>,
    a: Perm,
    b: Perm,
    group: PermGroup,
}

impl QuotientRep {
    pub fn new(ggs: &Ggs, n: usize) -> Result<Self> {
        Self::with_degree_cap(ggs, n, DEFAULT_DEGREE_CAP)
    }

    pub fn with_degree_cap(ggs: &Ggs, n: usize, degree_cap: usize) -> Result<Self> {
        Self::check_level(ggs, n, degree_cap)?;
        let a = ggs.level_permutation(&ggs.a(), n)?;
        let b = ggs.level_permutation(&ggs.b(), n)?;
        Self::from_generators(ggs, n, a, b)
    }

    pub(crate) fn check_level(ggs: &Ggs, n: usize, degree_cap: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::ZeroLevel);
        }
        ggs.ctx().check_level(n)?;
        let degree = Layout::tree_degree(ggs.p(), n);
        if degree > degree_cap {
            return Err(Error::DegreeExceeded {
                degree,
                cap: degree_cap,
            });
        }
        Ok(())
    }

    /// Rebuild from stored generator images (e.g. a cache hit).
    pub fn from_generators(ggs: &Ggs, n: usize, a: Perm, b: Perm) -> Result<Self> {
        let layout = Arc::new(Layout::tree(ggs.p(), n));
        let group = PermGroup::generate(layout.clone(), &[a.clone(), b.clone()])?;
        Ok(Self {
            ggs: ggs.clone(),
            level: n,
            layout,
            a,
            b,
            group,
        })
    }

    pub fn ggs(&self) -> &Ggs {
        &self.ggs
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn layout(&self) -> &Arc<Layout> {
        &self.layout
    }

    pub fn a_image(&self) -> &Perm {
        &self.a
    }

    pub fn b_image(&self) -> &Perm {
        &self.b
    }

    pub fn group(&self) -> &PermGroup {
        &self.group
    }

    /// Image of a word, multiplied out from the generator images.
    pub fn image(&self, w: &Word) -> Perm {
        let mut out = Perm::identity(self.layout.degree());
        for s in w.syllables() {
            let g = match s.gen {
                Gen::A => &self.a,
                Gen::B => &self.b,
            };
            out = out.mul(&g.pow(s.exp as u64));
        }
        out
    }

    pub fn images(&self, words: &[Word]) -> Vec<Perm> {
        words.iter().map(|w| self.image(w)).collect()
    }

    /// `<words>` inside the quotient.
    pub fn generated_by(&self, words: &[Word]) -> PermGroup {
        PermGroup::generate(self.layout.clone(), &self.images(words))
            .expect("word images are tree automorphisms")
    }

    /// `<words>^G` inside the quotient.
    pub fn normal_closure_of(&self, words: &[Word]) -> PermGroup {
        PermGroup::normal_closure(&self.group, &self.images(words))
            .expect("word images lie in the quotient")
    }

    /// Image of `G'`.
    pub fn derived(&self) -> PermGroup {
        self.normal_closure_of(&[Word::comm(&self.ggs.a(), &self.ggs.b())])
    }

    /// Image of `gamma_k(G)` for `k >= 1`.
    pub fn lower_central_term(&self, k: usize) -> PermGroup {
        let series = self.group.lower_central_series(k);
        series
            .terms
            .get(k - 1)
            .cloned()
            .unwrap_or_else(|| PermGroup::trivial(self.layout.clone()))
    }

    /// Image of `st_G(m)`: the pointwise stabilizer of level `m`.
    pub fn level_kernel(&self, m: usize) -> Result<PermGroup> {
        if m > self.level {
            return Err(Error::LevelTooDeep { m, n: self.level });
        }
        self.group.level_stabilizer(m)
    }

    /// Forest of `p` trees of depth `n - 1`, the home of section tuples.
    pub fn sections_layout(&self) -> Arc<Layout> {
        Arc::new(Layout::forest(self.ggs.p(), self.level - 1, self.ggs.p() as usize))
    }

    pub fn lower_layout(&self) -> Arc<Layout> {
        Arc::new(Layout::tree(self.ggs.p(), self.level - 1))
    }

    /// `psi(H)` for `H` inside the level-1 kernel, on the section forest.
    pub fn sections_subgroup(&self, h: &PermGroup) -> Result<PermGroup> {
        if h.layout() != &self.layout {
            return Err(Error::DomainMismatch);
        }
        let p = self.ggs.p();
        let gens = h.strong_generators();
        if gens.iter().any(|g| (0..p as usize).any(|i| g.apply(i) != i)) {
            return Err(Error::MovesFirstLevel);
        }
        let restricted: Vec<Perm> = gens
            .iter()
            .map(|g| self.layout.restrict_below_first_level(g))
            .collect();
        PermGroup::generate(self.sections_layout(), &restricted)
    }

    /// `H x ... x H` (p copies) on the section forest, for `H` at depth `n - 1`.
    pub fn product_of_copies(&self, h: &PermGroup) -> Result<PermGroup> {
        if **h.layout() != *self.lower_layout() {
            return Err(Error::DomainMismatch);
        }
        let forest = self.sections_layout();
        let mut gens = Vec::new();
        for t in 0..self.ggs.p() as usize {
            for g in h.strong_generators() {
                gens.push(forest.embed_in_tree(t, &g));
            }
        }
        PermGroup::generate(forest, &gens)
    }

    /// Projection of a section-forest group onto tree `t`.
    pub fn coordinate_projection(&self, h: &PermGroup, t: usize) -> Result<PermGroup> {
        let forest = self.sections_layout();
        if h.layout() != &forest {
            return Err(Error::DomainMismatch);
        }
        let gens: Vec<Perm> = h
            .strong_generators()
            .iter()
            .map(|g| forest.project_to_tree(t, g))
            .collect();
        PermGroup::generate(self.lower_layout(), &gens)
    }

    /// The natural map to level `m <= n`, applied to a permutation of this quotient.
    pub fn truncate_perm(&self, g: &Perm, m: usize) -> Result<Perm> {
        if m > self.level {
            return Err(Error::LevelTooDeep { m, n: self.level });
        }
        Ok(Layout::tree(self.ggs.p(), m).truncate(g))
    }
}
