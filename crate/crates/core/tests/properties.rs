use std::collections::HashSet;

use ggs_core::vector::{self, circulant_minus_j, is_tf_witness, tf_witness};
use ggs_core::{abel_coords, log_p, DefiningVector, Gen, Ggs, Layout, Perm, PermGroup, QuotientRep, Vertex, Word};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const VECTORS: [(u32, &[i64]); 6] = [
    (3, &[1, 1]),
    (3, &[1, 2]),
    (3, &[1, 0]),
    (5, &[1, 2, 2, 1]),
    (5, &[1, 1, 1, 0]),
    (5, &[1, 0, 0, 0]),
];

fn ggs_strategy() -> impl Strategy<Value = Ggs> {
    (0..VECTORS.len()).prop_map(|i| {
        let (p, e) = VECTORS[i];
        Ggs::with_depth_cap(p, e, 12).unwrap()
    })
}

fn letters(max_len: usize) -> impl Strategy<Value = Vec<(bool, bool)>> {
    prop::collection::vec((any::<bool>(), any::<bool>()), 0..=max_len)
}

fn word(p: u32, letters: &[(bool, bool)]) -> Word {
    let mut w = Word::identity(p);
    for &(is_a, positive) in letters {
        w.push(if is_a { Gen::A } else { Gen::B }, if positive { 1 } else { -1 });
    }
    w
}

/// `w` times a power of `a` that cancels its root exponent.
fn fix_level_one(ggs: &Ggs, w: &Word) -> Word {
    w.mul(&ggs.a_pow(-(ggs.root_exponent(w) as i64)))
}

/// Follows non-trivial sections down to a vertex where `w` acts non-trivially
/// at the root, and returns its level.
fn first_active_level(ggs: &Ggs, w: &Word) -> Option<usize> {
    let mut cur = w.clone();
    for depth in 0..ggs.ctx().depth_cap() {
        if ggs.root_exponent(&cur) != 0 {
            return Some(depth);
        }
        let next = (0..ggs.p() as usize)
            .map(|x| ggs.section(&cur, x))
            .find(|s| !ggs.is_identity(s).unwrap())?;
        cur = next;
    }
    None
}

/// Independent order oracle: closure of the generators under right multiplication.
fn bfs_order(gens: &[Perm], degree: usize) -> usize {
    let id = Perm::identity(degree);
    let mut seen: HashSet<Perm> = HashSet::from([id.clone()]);
    let mut queue = vec![id];
    while let Some(g) = queue.pop() {
        for s in gens {
            let h = g.mul(s);
            if seen.insert(h.clone()) {
                queue.push(h);
            }
        }
    }
    seen.len()
}

fn is_power_of(n: u64, p: u64) -> bool {
    let mut n = n;
    while n % p == 0 {
        n /= p;
    }
    n == 1
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn level_permutation_is_a_homomorphism(ggs in ggs_strategy(), u in letters(12), v in letters(12), n in 1usize..=3) {
        let p = ggs.p();
        let (u, v) = (word(p, &u), word(p, &v));
        let lhs = ggs.level_permutation(&u.mul(&v), n).unwrap();
        let rhs = ggs.level_permutation(&u, n).unwrap().mul(&ggs.level_permutation(&v, n).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn sections_of_products(ggs in ggs_strategy(), u in letters(12), v in letters(12)) {
        let p = ggs.p();
        let (u, v) = (word(p, &u), word(p, &v));
        let uv = ggs.decompose(&u.mul(&v));
        let du = ggs.decompose(&u);
        let dv = ggs.decompose(&v);
        prop_assert_eq!(uv.root_exponent, (du.root_exponent + dv.root_exponent) % p);
        for x in 0..p as usize {
            // (uv)_x = u_x v_{x^u}
            let moved = (x + du.root_exponent as usize) % p as usize;
            prop_assert_eq!(&uv.sections[x], &du.sections[x].mul(&dv.sections[moved]));
        }
    }

    #[test]
    fn sections_of_level_one_stabilizers_multiply_coordinatewise(ggs in ggs_strategy(), u in letters(12), v in letters(12)) {
        let p = ggs.p();
        let u = fix_level_one(&ggs, &word(p, &u));
        let v = fix_level_one(&ggs, &word(p, &v));
        let uv = ggs.decompose(&u.mul(&v));
        let (du, dv) = (ggs.decompose(&u), ggs.decompose(&v));
        for x in 0..p as usize {
            prop_assert_eq!(&uv.sections[x], &du.sections[x].mul(&dv.sections[x]));
        }
    }

    #[test]
    fn reassembled_sections_reproduce_the_action(ggs in ggs_strategy(), w in letters(16), path in prop::collection::vec(0u32..5, 1..=4)) {
        let p = ggs.p();
        let w = word(p, &w);
        let v = Vertex::new(p, path.iter().map(|x| x % p + 1).collect()).unwrap();
        let d = ggs.decompose(&w);
        let head = v.letters()[0] - 1;
        let rest = Vertex::new(p, v.letters()[1..].to_vec()).unwrap();
        let tail = ggs.act(&d.sections[head as usize], &rest).unwrap();
        let mut expected = vec![(head + d.root_exponent) % p + 1];
        expected.extend_from_slice(tail.letters());
        let image = ggs.act(&w, &v).unwrap();
        prop_assert_eq!(image.letters(), &expected[..]);
    }

    #[test]
    fn conjugation_by_a_shifts_sections(ggs in ggs_strategy(), w in letters(16)) {
        let p = ggs.p() as usize;
        let w = word(ggs.p(), &w);
        let d = ggs.decompose(&w);
        let c = ggs.decompose(&w.conj(&ggs.a()));
        prop_assert_eq!(c.root_exponent, d.root_exponent);
        for x in 0..p {
            prop_assert_eq!(&c.sections[x], &d.sections[(x + p - 1) % p]);
        }
    }

    #[test]
    fn portrait_determines_the_level_permutation(ggs in ggs_strategy(), w in letters(16), n in 1usize..=3) {
        let w = word(ggs.p(), &w);
        let from_portrait = ggs.portrait(&w, n).unwrap().to_permutation(n).unwrap();
        prop_assert_eq!(from_portrait, ggs.level_permutation(&w, n).unwrap());
    }

    #[test]
    fn abel_coords_add(u in letters(30), v in letters(30), p in prop::sample::select(vec![3u32, 5, 7])) {
        let (u, v) = (word(p, &u), word(p, &v));
        let (cu, cv, cuv) = (abel_coords(&u), abel_coords(&v), abel_coords(&u.mul(&v)));
        prop_assert_eq!(cuv.alpha, (cu.alpha + cv.alpha) % p);
        prop_assert_eq!(cuv.beta, (cu.beta + cv.beta) % p);
    }

    #[test]
    fn words_round_trip_through_the_parser(ggs in ggs_strategy(), w in letters(20)) {
        let w = word(ggs.p(), &w);
        prop_assert_eq!(ggs.parse(&w.to_string()).unwrap(), w);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn order_agrees_with_permutation_orders(ggs in ggs_strategy(), w in letters(8)) {
        let p = ggs.p();
        let w = word(p, &w);
        match ggs.order(&w) {
            ggs_core::OrderResult::Finite { exponent } => {
                let full = (p as u64).pow(exponent);
                if exponent == 0 {
                    prop_assert!(ggs.is_identity(&w).unwrap());
                    return Ok(());
                }
                let below = w.pow((full / p as u64) as i64);
                let deepest = first_active_level(&ggs, &below).expect("a non-trivial power acts somewhere") + 1;
                prop_assume!(Layout::tree_degree(p, deepest) <= 4000);
                for n in 1..=deepest {
                    let order = ggs.level_permutation(&w, n).unwrap().order();
                    prop_assert_eq!(full % order, 0);
                    if n == deepest {
                        prop_assert_eq!(order, full);
                    }
                }
            }
            ggs_core::OrderResult::Infinite { certificate } => {
                prop_assert!(ggs.check_certificate(&w, &certificate));
                let mut last = 1;
                for n in 1..=4 {
                    let order = ggs.level_permutation(&w, n).unwrap().order();
                    prop_assert!(order >= last);
                    last = order;
                }
            }
            ggs_core::OrderResult::Unknown { .. } => {}
        }
    }

    #[test]
    fn level_tower_truncates_onto_lower_quotients(ggs in ggs_strategy(), w in letters(16)) {
        let w = word(ggs.p(), &w);
        let top = if ggs.p() == 3 { 4 } else { 3 };
        let quotients: Vec<QuotientRep> = (1..=top).map(|n| QuotientRep::new(&ggs, n).unwrap()).collect();
        for pair in quotients.windows(2) {
            let (lo, hi) = (&pair[0], &pair[1]);
            prop_assert_eq!(hi.group().order() % lo.group().order(), 0u32.into());
            prop_assert_eq!(&hi.truncate_perm(&hi.image(&w), lo.level()).unwrap(), &lo.image(&w));
            prop_assert_eq!(&hi.truncate_perm(hi.a_image(), lo.level()).unwrap(), lo.a_image());
            prop_assert_eq!(&hi.truncate_perm(hi.b_image(), lo.level()).unwrap(), lo.b_image());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn psi_is_injective_on_level_one_stabilizers(ggs in ggs_strategy(), u in letters(14), v in letters(14)) {
        let p = ggs.p();
        let q = QuotientRep::new(&ggs, 3).unwrap();
        let gens = [fix_level_one(&ggs, &word(p, &u)), fix_level_one(&ggs, &word(p, &v))];
        let h = q.generated_by(&gens);
        prop_assert_eq!(q.sections_subgroup(&h).unwrap().order(), h.order());
    }

    #[test]
    fn subgroup_orders_match_the_bfs_oracle(ggs in ggs_strategy(), u in letters(10), v in letters(10)) {
        let p = ggs.p();
        let n = if p == 3 { 3 } else { 2 };
        let q = QuotientRep::new(&ggs, n).unwrap();
        let gens = q.images(&[word(p, &u), word(p, &v)]);
        let h = PermGroup::generate(q.layout().clone(), &gens).unwrap();
        let order = bfs_order(&gens, q.layout().degree());
        prop_assert_eq!(h.order(), order.into());
        prop_assert!(is_power_of(order as u64, p as u64));
    }

    #[test]
    fn derived_subgroup_is_normal_with_matching_abelianization(ggs in ggs_strategy(), u in letters(10), v in letters(10)) {
        let p = ggs.p();
        let q = QuotientRep::new(&ggs, 3).unwrap();
        let h = q.generated_by(&[word(p, &u), word(p, &v)]);
        let d = h.derived_subgroup();
        prop_assert!(d.is_subgroup_of(&h));
        for g in h.generators() {
            for x in d.strong_generators() {
                prop_assert!(d.contains(&x.conj(g)));
            }
        }
        let inv = h.abelian_invariants();
        prop_assert_eq!(h.index_of(&d).unwrap(), inv.total_order());
        prop_assert!(log_p(&h.order(), p).is_some());
        for o in inv.orders() {
            prop_assert!(log_p(&o, p).is_some());
        }
    }

    #[test]
    fn normal_closures_and_kernels_have_p_power_order(ggs in ggs_strategy(), u in letters(10), m in 1usize..=3) {
        let p = ggs.p();
        let q = QuotientRep::new(&ggs, 3).unwrap();
        let n = q.normal_closure_of(&[word(p, &u)]);
        prop_assert!(log_p(&n.order(), p).is_some());
        prop_assert!(log_p(&q.group().index_of(&n).unwrap(), p).is_some());
        let k = q.level_kernel(m).unwrap();
        prop_assert!(log_p(&k.order(), p).is_some());
        for x in k.strong_generators() {
            prop_assert!(q.group().contains(&x));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tf_status_is_scalar_invariant(p in prop::sample::select(vec![3u32, 5]), raw in prop::collection::vec(0u32..5, 4), lambda in 1u32..5) {
        let entries: Vec<i64> = raw[..p as usize - 1].iter().map(|&x| (x % p) as i64).collect();
        prop_assume!(entries.iter().any(|&x| x != 0));
        let lambda = lambda % p;
        prop_assume!(lambda != 0);
        let e = DefiningVector::new(p, &entries).unwrap();
        let scaled = e.scale(lambda).unwrap();
        prop_assert!(scaled.is_scalar_multiple_of(&e));
        let (ce, cs) = (vector::classify(&e), vector::classify(&scaled));
        prop_assert_eq!(ce, cs);
        prop_assert_eq!(tf_witness(&e).unwrap().is_some(), tf_witness(&scaled).unwrap().is_some());
    }
}

/// Random non-zero zero-sum vectors in `F_p^p`.
fn admissible_samples(p: u32, count: usize, seed: u64) -> Vec<Vec<u32>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut i: Vec<u32> = (0..p - 1).map(|_| rng.gen_range(0..p)).collect();
        let s: u32 = i.iter().sum::<u32>() % p;
        i.push((p - s) % p);
        if i.iter().any(|&x| x != 0) {
            out.push(i);
        }
    }
    out
}

#[test]
fn tf_witnesses_are_self_checking() {
    for (p, e) in VECTORS.iter().chain([(7u32, &[1i64, 1, 1, 1, 1, 2][..]), (7, &[1, 0, 3, 0, 0, 6][..])].iter()) {
        let e = DefiningVector::new(*p, e).unwrap();
        match tf_witness(&e).unwrap() {
            Some(i) => {
                assert_eq!(i.iter().sum::<u32>() % p, 0);
                assert!(i.iter().any(|&x| x != 0));
                let m = vector::circulant(&e).left_mul(&i);
                assert!(m.iter().zip(&i).all(|(mj, ij)| mj * ij % p == 0));
            }
            None => {
                for i in admissible_samples(*p, 10_000, 17) {
                    assert!(!is_tf_witness(&e, &i), "{e} {i:?}");
                }
            }
        }
    }
}

#[test]
fn tf_fails_exactly_at_lambda_two() {
    for p in [3u32, 5, 7] {
        for lambda in 0..p {
            let mut entries = vec![1i64; p as usize - 1];
            entries[p as usize - 2] = lambda as i64;
            let e = DefiningVector::new(p, &entries).unwrap();
            let w = tf_witness(&e).unwrap();
            assert_eq!(w.is_none(), lambda != 2, "p={p} lambda={lambda}");
            if lambda == 2 {
                assert_eq!(w.unwrap(), vec![1; p as usize]);
            }
        }
    }
}

#[test]
fn circulant_minus_j_band_structure() {
    for p in [3u32, 5, 7] {
        for lambda in 0..p {
            let mut entries = vec![1i64; p as usize - 1];
            entries[p as usize - 2] = lambda as i64;
            let m = circulant_minus_j(&DefiningVector::new(p, &entries).unwrap());
            let p_us = p as usize;
            for r in 0..p_us {
                for c in 0..p_us {
                    let expected = if r == c {
                        p - 1
                    } else if c == (r + p_us - 1) % p_us {
                        (lambda + p - 1) % p
                    } else {
                        0
                    };
                    assert_eq!(m.get(r, c), expected, "p={p} lambda={lambda} ({r},{c})");
                }
            }
        }
    }
}

#[test]
fn faithfulness_on_random_words() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for (p, e) in VECTORS {
        let ggs = Ggs::with_depth_cap(p, e, 12).unwrap();
        for _ in 0..1000 / VECTORS.len() + 1 {
            let len = rng.gen_range(0..=20);
            let w = ggs_core::verify::random_word(p, &mut rng, len);
            if ggs.is_identity(&w).unwrap() {
                for n in 1..=3 {
                    assert!(ggs.level_permutation(&w, n).unwrap().is_identity(), "{w}");
                }
            } else {
                let level = first_active_level(&ggs, &w).expect("non-trivial word acts somewhere") + 1;
                assert!(!ggs.level_permutation(&w, level).unwrap().is_identity(), "{w}");
            }
        }
    }
}

#[test]
fn named_wreath_identities() {
    for (p, e) in VECTORS {
        let ggs = Ggs::new(p, e).unwrap();
        for i in 0..p as i64 {
            assert!(ggs.words_equal(&ggs.y_i(i).conj(&ggs.a()), &ggs.y_i(i + 1)).unwrap());
        }
        if ggs.vector().is_constant() {
            let d = ggs.decompose(&ggs.y0().pow(p as i64));
            assert_eq!(d.root_exponent, 0);
            for x in 0..p as usize {
                let expected = ggs.y_i(p as i64 - 1 - x as i64);
                assert!(ggs.words_equal(&d.sections[x], &expected).unwrap());
            }
        }
    }
}
