use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::PermGroup;
use crate::quotient::QuotientRep;

/// Which permutation domain a group lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    /// Levels `1..=n` of the tree.
    Tree,
    /// `p` copies of the depth-`(n - 1)` tree.
    Sections,
}

/// Quotient-level subgroups, rebuilt from scratch by [`NamedSubgroup::build`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum NamedSubgroup {
    Whole,
    Trivial,
    LevelKernel { m: usize },
    /// `G'`.
    Derived,
    /// `gamma_k(G)`.
    LowerCentral { k: usize },
    /// `G''`.
    SecondDerived,
    /// `gamma_3(G)'`.
    Gamma3Derived,
    /// `<y_0, ..., y_{p-1}>`.
    K,
    KDerived,
    /// `st_G(1)'`.
    St1Derived,
    /// `gamma_3(st_G(1))`.
    Gamma3OfSt1,
    /// `psi(H)` on the section forest.
    Sections { of: Box<NamedSubgroup> },
    /// `H x ... x H` on the section forest, `H` taken at level `n - 1`.
    Product { of: Box<NamedSubgroup> },
}

impl NamedSubgroup {
    pub fn domain(&self) -> Domain {
        match self {
            NamedSubgroup::Sections { .. } | NamedSubgroup::Product { .. } => Domain::Sections,
            _ => Domain::Tree,
        }
    }

    pub fn sections(of: NamedSubgroup) -> Self {
        NamedSubgroup::Sections { of: Box::new(of) }
    }

    pub fn product(of: NamedSubgroup) -> Self {
        NamedSubgroup::Product { of: Box::new(of) }
    }

    pub fn build(&self, q: &QuotientRep) -> Result<PermGroup> {
        let ggs = q.ggs();
        Ok(match self {
            NamedSubgroup::Whole => q.group().clone(),
            NamedSubgroup::Trivial => PermGroup::trivial(q.layout().clone()),
            NamedSubgroup::LevelKernel { m } => q.level_kernel(*m)?,
            NamedSubgroup::Derived => q.derived(),
            NamedSubgroup::LowerCentral { k: 3 } => {
                q.normal_closure_of(&ggs.distinguished("gamma3", 0)?)
            }
            NamedSubgroup::LowerCentral { k } => q.lower_central_term(*k),
            NamedSubgroup::SecondDerived => q.derived().derived_subgroup(),
            NamedSubgroup::Gamma3Derived => NamedSubgroup::LowerCentral { k: 3 }
                .build(q)?
                .derived_subgroup(),
            NamedSubgroup::K => q.generated_by(&ggs.distinguished("K", 0)?),
            NamedSubgroup::KDerived => q.normal_closure_of(&ggs.distinguished("K'", 0)?),
            NamedSubgroup::St1Derived => q.level_kernel(1)?.derived_subgroup(),
            NamedSubgroup::Gamma3OfSt1 => {
                let st1 = q.level_kernel(1)?;
                let series = st1.lower_central_series(3);
                series
                    .terms
                    .get(2)
                    .cloned()
                    .unwrap_or_else(|| PermGroup::trivial(q.layout().clone()))
            }
            NamedSubgroup::Sections { of } => {
                if of.domain() != Domain::Tree {
                    return Err(Error::DomainMismatch);
                }
                q.sections_subgroup(&of.build(q)?)?
            }
            NamedSubgroup::Product { of } => {
                if of.domain() != Domain::Tree || q.level() < 2 {
                    return Err(Error::DomainMismatch);
                }
                let lower = QuotientRep::new(ggs, q.level() - 1)?;
                q.product_of_copies(&of.build(&lower)?)?
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ggs::Ggs;
    use crate::word::Word;

    #[test]
    fn gamma3_from_words_matches_series_term() {
        for (p, e) in [(3, vec![1, 2]), (5, vec![1, 2, 2, 1])] {
            let ggs = Ggs::new(p, &e).unwrap();
            let q = QuotientRep::new(&ggs, 3).unwrap();
            let from_words = NamedSubgroup::LowerCentral { k: 3 }.build(&q).unwrap();
            assert!(from_words.same_group(&q.lower_central_term(3)));
            let derived = NamedSubgroup::Derived.build(&q).unwrap();
            assert!(derived.same_group(&q.normal_closure_of(&[Word::comm(&ggs.a(), &ggs.b())])));
        }
    }

    #[test]
    fn k_derived_is_derived_of_k() {
        let ggs = Ggs::new(3, &[1, 1]).unwrap();
        let q = QuotientRep::new(&ggs, 3).unwrap();
        let k = NamedSubgroup::K.build(&q).unwrap();
        let kd = NamedSubgroup::KDerived.build(&q).unwrap();
        assert!(kd.same_group(&k.derived_subgroup()));
    }

    #[test]
    fn domains() {
        let s = NamedSubgroup::sections(NamedSubgroup::Derived);
        assert_eq!(s.domain(), Domain::Sections);
        let ggs = Ggs::new(3, &[1, 2]).unwrap();
        let q = QuotientRep::new(&ggs, 2).unwrap();
        assert_eq!(
            NamedSubgroup::sections(s).build(&q).unwrap_err(),
            Error::DomainMismatch
        );
    }
}
