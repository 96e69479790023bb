//! Seeded random words.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use sha2::{Digest, Sha256};
use serde::Serialize;

use crate::ggs::{in_derived, Ggs};
use crate::order::{Budget, Memo};
use crate::word::{Gen, Word};

/// Longest sampled `G'` word, in letters.
pub const MAX_DERIVED_LETTERS: usize = 40;
/// Most commutator conjugates in one sampled `G'` word.
pub const MAX_DERIVED_TERMS: usize = 5;

/// A generator stream keyed by the suite seed, a tag and the group, so that
/// results do not depend on scheduling.
pub(crate) fn rng_for(seed: u64, tag: &str, ggs: &Ggs) -> ChaCha8Rng {
    let key = format!("{seed}/{tag}/{}/{}", ggs.p(), ggs.vector());
    ChaCha8Rng::from_seed(Sha256::digest(key.as_bytes()).into())
}

/// Uniform word of `len` letters from `a^±1, b^±1`.
pub fn random_word(p: u32, rng: &mut impl Rng, len: usize) -> Word {
    let mut w = Word::identity(p);
    for _ in 0..len {
        let gen = if rng.gen_bool(0.5) { Gen::A } else { Gen::B };
        let exp = if rng.gen_bool(0.5) { 1 } else { -1 };
        w.mul_assign(&Word::gen_pow(p, gen, exp));
    }
    w
}

/// Product of at most five conjugates of `[a,b]^±1`, at most 40 letters.
pub fn derived_word_sampler(p: u32, rng: &mut impl Rng) -> Word {
    let terms = rng.gen_range(1..=MAX_DERIVED_TERMS);
    let max_conj = (MAX_DERIVED_LETTERS / terms - 4) / 2;
    let comm = Word::comm(&Word::a(p), &Word::b(p));
    let mut w = Word::identity(p);
    for _ in 0..terms {
        let len = rng.gen_range(0..=max_conj);
        let by = random_word(p, rng, len);
        let c = if rng.gen_bool(0.5) { comm.clone() } else { comm.inverse() };
        w.mul_assign(&c.conj(&by));
    }
    debug_assert!(w.letter_len() <= MAX_DERIVED_LETTERS);
    w
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleOutcome {
    Accepted,
    OutsideDerived,
    Trivial,
    Undecided,
}

/// Guard for `G'` samples: exponent sums vanish and the word is certified non-trivial.
pub(crate) fn screen_derived(ggs: &Ggs, w: &Word, budget: &Budget, memo: &mut Memo) -> SampleOutcome {
    if !in_derived(w) {
        return SampleOutcome::OutsideDerived;
    }
    match ggs.is_identity_with(w, budget, memo) {
        Ok(false) => SampleOutcome::Accepted,
        Ok(true) => SampleOutcome::Trivial,
        Err(_) => SampleOutcome::Undecided,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_samples_stay_in_derived_and_short() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let w = derived_word_sampler(5, &mut rng);
            assert!(in_derived(&w));
            assert!(w.letter_len() <= MAX_DERIVED_LETTERS);
        }
    }

    #[test]
    fn guard_rejects_words_outside_derived() {
        let ggs = Ggs::new(3, &[1, 0]).unwrap();
        let mut memo = Memo::new();
        let budget = Budget::default();
        assert_eq!(screen_derived(&ggs, &ggs.a(), &budget, &mut memo), SampleOutcome::OutsideDerived);
        assert_eq!(screen_derived(&ggs, &ggs.identity(), &budget, &mut memo), SampleOutcome::Trivial);
        let c = Word::comm(&ggs.a(), &ggs.b());
        assert_eq!(screen_derived(&ggs, &c, &budget, &mut memo), SampleOutcome::Accepted);
    }

    #[test]
    fn streams_are_keyed() {
        let g = Ggs::new(3, &[1, 0]).unwrap();
        let h = Ggs::new(3, &[1, 1]).unwrap();
        let x: u64 = rng_for(1, "C8", &g).gen();
        assert_eq!(x, rng_for(1, "C8", &g).gen::<u64>());
        assert_ne!(x, rng_for(2, "C8", &g).gen::<u64>());
        assert_ne!(x, rng_for(1, "C8", &h).gen::<u64>());
    }
}
