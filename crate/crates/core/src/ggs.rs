//! The GGS-group context and its algebraic helpers: abelianization
//! coordinates and the distinguished word families.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prime::PrimeContext;
use crate::vector::DefiningVector;
use crate::word::{Gen, Word};

/// A GGS-group `G = <a, b>` on the p-regular tree: `a` is the rooted p-cycle and
/// `b` fixes level 1 with sections `(a^{e_1}, ..., a^{e_{p-1}}, b)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ggs {
    ctx: PrimeContext,
    e: DefiningVector,
}

impl Ggs {
    pub fn new(p: u32, entries: &[i64]) -> Result<Self> {
        Self::with_depth_cap(p, entries, PrimeContext::DEFAULT_DEPTH_CAP)
    }

    pub fn with_depth_cap(p: u32, entries: &[i64], depth_cap: usize) -> Result<Self> {
        let ctx = PrimeContext::new(p, depth_cap)?;
        let e = DefiningVector::new(p, entries)?;
        Ok(Self { ctx, e })
    }

    pub fn from_vector(e: DefiningVector, depth_cap: usize) -> Result<Self> {
        let ctx = PrimeContext::new(e.p(), depth_cap)?;
        Ok(Self { ctx, e })
    }

    pub fn p(&self) -> u32 {
        self.ctx.p()
    }

    pub fn ctx(&self) -> &PrimeContext {
        &self.ctx
    }

    pub fn vector(&self) -> &DefiningVector {
        &self.e
    }

    pub fn a(&self) -> Word {
        Word::a(self.p())
    }

    pub fn b(&self) -> Word {
        Word::b(self.p())
    }

    pub fn a_pow(&self, k: i64) -> Word {
        Word::gen_pow(self.p(), Gen::A, k)
    }

    pub fn identity(&self) -> Word {
        Word::identity(self.p())
    }

    pub fn parse(&self, src: &str) -> Result<Word> {
        Word::parse(self.p(), src)
    }

    /// `b_i = b^{a^i}`.
    pub fn b_i(&self, i: i64) -> Word {
        self.b().conj(&self.a_pow(i))
    }

    /// `y_0 = b a^-1`.
    pub fn y0(&self) -> Word {
        self.b().mul(&self.a_pow(-1))
    }

    /// `y_i = y_0^{a^i}`.
    pub fn y_i(&self, i: i64) -> Word {
        self.y0().conj(&self.a_pow(i))
    }

    /// Named word families used to seed subgroups at quotient level.
    ///
    /// Single elements: `b` (`b_i`), `y` (`y_i`). Generator lists: `K`
    /// (`y_0..y_{p-1}`), `st1` (`b_0..b_{p-1}`), `derived` (`[a,b]`), `gamma3`
    /// (`[a,b,a]`, `[a,b,b]`), `K'` (`[y_i, y_j]` for `i < j`). The lists are
    /// meant to be normally closed at quotient level.
    pub fn distinguished(&self, name: &str, i: i64) -> Result<Vec<Word>> {
        let p = self.p() as i64;
        let (a, b) = (self.a(), self.b());
        Ok(match name {
            "b" => vec![self.b_i(i.rem_euclid(p))],
            "y" => vec![self.y_i(i.rem_euclid(p))],
            "K" => (0..p).map(|j| self.y_i(j)).collect(),
            "st1" => (0..p).map(|j| self.b_i(j)).collect(),
            "derived" => vec![Word::comm(&a, &b)],
            "gamma3" => vec![
                Word::comm_left_normed(&[a.clone(), b.clone(), a.clone()]),
                Word::comm_left_normed(&[a, b.clone(), b]),
            ],
            "K'" => {
                let mut out = Vec::new();
                for x in 0..p {
                    for y in x + 1..p {
                        out.push(Word::comm(&self.y_i(x), &self.y_i(y)));
                    }
                }
                out
            }
            other => return Err(Error::UnknownFamily(other.to_string())),
        })
    }
}

/// Exponent sums `(alpha, beta)` of `a` and `b`, mod p: the image in `G/G' = C_p x C_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbelCoords {
    pub alpha: u32,
    pub beta: u32,
}

pub fn abel_coords(w: &Word) -> AbelCoords {
    AbelCoords {
        alpha: w.exponent_sum(Gen::A),
        beta: w.exponent_sum(Gen::B),
    }
}

pub fn in_derived(w: &Word) -> bool {
    abel_coords(w) == AbelCoords { alpha: 0, beta: 0 }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn make_ggs_examples() {
        let g = Ggs::new(3, &[1, 1]).unwrap();
        assert!(g.vector().is_constant());
        let gs = Ggs::new(3, &[1, 2]).unwrap();
        assert!(gs.vector().is_torsion());
        assert_eq!(Ggs::new(5, &[0, 0, 0, 0]), Err(Error::ZeroVector));
        assert_eq!(Ggs::new(4, &[1, 1, 1]), Err(Error::NotOddPrime(4)));
        assert!(matches!(Ggs::new(5, &[1, 1]), Err(Error::VectorLength { .. })));
    }

    #[test]
    fn abel_coord_examples() {
        let g = Ggs::new(3, &[1, 1]).unwrap();
        let ba = Word::comm(&g.b(), &g.a());
        assert_eq!(abel_coords(&ba), AbelCoords { alpha: 0, beta: 0 });
        assert!(in_derived(&ba));
        let ab = g.a().mul(&g.b());
        assert_eq!(abel_coords(&ab), AbelCoords { alpha: 1, beta: 1 });
        assert!(!in_derived(&ab));
        // y_0 = b a^-1 -> (-1, 1)
        assert_eq!(abel_coords(&g.y0()), AbelCoords { alpha: 2, beta: 1 });
    }

    #[test]
    fn families() {
        let g = Ggs::new(3, &[1, 1]).unwrap();
        assert_eq!(g.distinguished("b", 0).unwrap(), vec![g.b()]);
        assert_eq!(g.distinguished("y", 1).unwrap()[0].to_string(), "a^-1*b");
        assert_eq!(g.distinguished("y", 4).unwrap(), g.distinguished("y", 1).unwrap());
        assert_eq!(g.distinguished("K", 0).unwrap().len(), 3);
        assert_eq!(g.distinguished("K'", 0).unwrap().len(), 3);
        assert!(matches!(g.distinguished("nope", 0), Err(Error::UnknownFamily(_))));
        assert!(g.distinguished("gamma3", 0).unwrap().iter().all(in_derived));
    }
}
