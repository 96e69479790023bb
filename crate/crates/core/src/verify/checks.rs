use rand::Rng;
use serde_json::json;

use super::named::NamedSubgroup;
use super::sample::{derived_word_sampler, random_word, rng_for, screen_derived, SampleOutcome};
use super::{CheckId, CheckResult, Counterexample, Fault, Run, SuiteConfig};
use crate::error::Result;
use crate::ggs::Ggs;
use crate::group::PermGroup;
use crate::order::{Memo, OrderResult};
use crate::perm::Layout;
use crate::quotient::QuotientRep;
use crate::vector::{tf_witness, TF_BRUTE_FORCE_BOUND};
use crate::word::Word;

const ANCHOR_C1: &str = "psi(b) = (a^e_1, ..., a^e_(p-1), b); psi(y_0^p) = (y_(p-1), ..., y_0) for constant e; \
psi([b,a])_1 = a^(-e_1) b; psi([b,a,a]) = (b^-1 a^e_1 b^-1 a^e_(p-1), a^(e_2-2e_1) b, a^(e_(j-2)-2e_(j-1)+e_j), ..., a^(-e_(p-1)) b a^(e_(p-2)-e_(p-1))); \
y_(p-1) ... y_0 = 1";
const ANCHOR_C2: &str = "|G:G'| = p^2; |G:gamma_3(G)| = p^3";
const ANCHOR_C3: &str = "st_G(2) <= G' <= st_G(1); st_G(2) <= gamma_3(G)";
const ANCHOR_C4: &str =
    "psi(gamma_3(st_G(1))) = gamma_3(G)^p for non-constant e; psi(st_G(1)') = (G')^p for non-symmetric e";
const ANCHOR_C5: &str =
    "psi(G') subdirect in G^p for non-constant e; psi(gamma_3(G)) subdirect in G^p for symmetric non-constant e";
const ANCHOR_C6: &str = "st_G(3) <= G'' for non-symmetric e; st_G(3) <= gamma_4(G), st_G(4) <= gamma_3(G)' for symmetric non-constant e";
const ANCHOR_C7: &str = "e = (1,...,1): |G:K| = p; K/K'st_G(n) = (C_(p^m))^(p-1) at n = m(p-1); \
|G:K'st_G(n)| = p^(n+1), class n; g g^a ... g^(a^(p-1)) in K' for g in K; h_p ... h_1 in K' for h in K'; |y_0| = infinity";
const ANCHOR_C8: &str = "TF(e) => G' torsion-free";
const ANCHOR_C9: &str = "G torsion <=> e_1 + ... + e_(p-1) = 0";

/// Section of `b` at letter `x` (1-based, taken mod p).
fn b_section(ggs: &Ggs, x: i64) -> Word {
    let p = ggs.p() as i64;
    if x.rem_euclid(p) == 0 {
        ggs.b()
    } else {
        ggs.a_pow(ggs.vector().e(x) as i64)
    }
}

/// Compare a decomposition against expected sections. `Err` carries the
/// finished result (fail or undecided skip).
fn expect_sections(
    ggs: &Ggs,
    claim: &str,
    word: &Word,
    expected: &[Word],
    run: &mut Run,
    checked: &mut usize,
) -> std::result::Result<(), Counterexample> {
    let d = ggs.decompose(word);
    if d.root_exponent != 0 {
        return Err(Counterexample::WordNotTrivial {
            word: ggs.a_pow(d.root_exponent as i64),
            claim: format!("{claim}: root label"),
        });
    }
    for (x, (got, want)) in d.sections.iter().zip(expected).enumerate() {
        let diff = got.mul(&want.inverse());
        match ggs.is_identity(&diff) {
            Ok(true) => *checked += 1,
            Ok(false) => {
                return Err(Counterexample::WordNotTrivial {
                    word: diff,
                    claim: format!("{claim}: coordinate {}", x + 1),
                })
            }
            Err(ex) => {
                run.note(&format!("undecided {claim} coordinate {}", x + 1), ex.to_string());
            }
        }
    }
    Ok(())
}

/// C1: section tuples of `b`, `y_0^p`, `[b,a]`, `[b,a,a]` and `y_(p-1)...y_0 = 1`.
pub fn wreath_identities(ggs: &Ggs) -> CheckResult {
    let mut run = Run::new(CheckId::C1, ggs, ANCHOR_C1);
    let p = ggs.p() as i64;
    let e = |i: i64| ggs.vector().e(i) as i64;
    let (a, b) = (ggs.a(), ggs.b());
    let mut checked = 0usize;
    let mut claims: Vec<(String, Word, Vec<Word>)> = Vec::new();

    claims.push(("psi(b)".into(), b.clone(), (1..=p).map(|x| b_section(ggs, x)).collect()));

    let y0p = ggs.y0().pow(p);
    let product_form: Vec<Word> = (1..=p)
        .map(|x| {
            (0..p).fold(ggs.identity(), |acc, k| acc.mul(&b_section(ggs, x - k)))
        })
        .collect();
    claims.push(("psi(y_0^p) as b_x b_(x-1) ... b_(x-p+1)".into(), y0p.clone(), product_form));
    if ggs.vector().is_constant() {
        let ys: Vec<Word> = (1..=p).map(|x| ggs.y_i(p - x)).collect();
        claims.push(("psi(y_0^p) = (y_(p-1), ..., y_0)".into(), y0p, ys));
    }

    let ba = Word::comm(&b, &a);
    let first = ggs.section(&ba, 0);
    let diff = first.mul(&ggs.a_pow(-e(1)).mul(&b).inverse());
    match ggs.is_identity(&diff) {
        Ok(true) => checked += 1,
        Ok(false) => {
            return run.fail(Counterexample::WordNotTrivial {
                word: diff,
                claim: "psi([b,a])_1 = a^(-e_1) b".into(),
            })
        }
        Err(ex) => run.note("undecided psi([b,a])_1", ex.to_string()),
    }

    let baa = Word::comm_left_normed(&[b.clone(), a.clone(), a.clone()]);
    let mut tuple = Vec::with_capacity(p as usize);
    tuple.push(
        b.inverse()
            .mul(&ggs.a_pow(e(1)))
            .mul(&b.inverse())
            .mul(&ggs.a_pow(e(p - 1))),
    );
    tuple.push(ggs.a_pow(e(2) - 2 * e(1)).mul(&b));
    for j in 3..p {
        tuple.push(ggs.a_pow(e(j - 2) - 2 * e(j - 1) + e(j)));
    }
    tuple.push(ggs.a_pow(-e(p - 1)).mul(&b).mul(&ggs.a_pow(e(p - 2) - e(p - 1))));
    claims.push(("psi([b,a,a])".into(), baa, tuple));

    let identity_sections = vec![ggs.identity(); p as usize];
    claims.push(("psi(1)".into(), ggs.identity(), identity_sections));

    for (claim, word, expected) in &claims {
        if let Err(c) = expect_sections(ggs, claim, word, expected, &mut run, &mut checked) {
            return run.fail(c);
        }
    }

    let ys = (0..p).rev().fold(ggs.identity(), |acc, i| acc.mul(&ggs.y_i(i)));
    match ggs.is_identity(&ys) {
        Ok(true) => checked += 1,
        Ok(false) => {
            return run.fail(Counterexample::WordNotTrivial {
                word: ys,
                claim: "y_(p-1) ... y_0 = 1".into(),
            })
        }
        Err(ex) => run.note("undecided y_(p-1) ... y_0", ex.to_string()),
    }

    let v = ggs.vector();
    if v.is_symmetric() && !v.is_constant() {
        // largest i <= (p-3)/2 with e_i != e_(i+1); coordinate i+2 of psi([b,a,a]) generates <a>
        if let Some(i) = (1..=(p - 3) / 2).rev().find(|&i| e(i) != e(i + 1)) {
            let exponent = (e(i) - 2 * e(i + 1) + e(i + 2)).rem_euclid(p);
            run.note("baa_power_of_a_position", i + 2);
            run.note("baa_power_of_a_exponent", exponent);
        }
    }
    run.note("coordinates_checked", checked);
    run.pass()
}

fn log_index(g: &PermGroup, h: &PermGroup) -> usize {
    g.log_order() - h.log_order()
}

/// C2: `|G:G'| = p^2` and `|G:gamma_3| = p^3` at level `n >= 3`.
pub fn indices(ggs: &Ggs, n: usize, cfg: &SuiteConfig) -> CheckResult {
    let run = Run::new(CheckId::C2, ggs, ANCHOR_C2).level(n);
    if n < 3 {
        return run.skip("requires level >= 3");
    }
    match indices_inner(ggs, n, cfg, run) {
        Ok(r) => r,
        Err((run, err)) => run.skip_on(err),
    }
}

type Partial = std::result::Result<CheckResult, (Run, crate::error::Error)>;

macro_rules! tri {
    ($run:ident, $e:expr) => {
        match $e {
            Ok(v) => v,
            Err(err) => return Err(($run, err)),
        }
    };
}

fn indices_inner(ggs: &Ggs, n: usize, cfg: &SuiteConfig, mut run: Run) -> Partial {
    // lower levels are recorded only
    let mut by_level = Vec::new();
    for m in 1..n {
        let q = tri!(run, cfg.quotient(ggs, m));
        by_level.push(json!({ "level": m, "log_index_derived": log_index(q.group(), &q.derived()) }));
    }
    run.note("lower_levels", by_level);
    let q = tri!(run, cfg.quotient(ggs, n));
    run.note("log_order", q.group().log_order());
    for (sub, expected) in [
        (NamedSubgroup::Derived, 2usize),
        (NamedSubgroup::LowerCentral { k: 3 }, 3),
    ] {
        let h = tri!(run, sub.build(&q));
        let actual = log_index(q.group(), &h);
        run.note(
            &format!("log_index_{}", if expected == 2 { "derived" } else { "gamma3" }),
            actual,
        );
        if actual != expected {
            return Ok(run.fail(Counterexample::IndexMismatch {
                level: n,
                subgroup: sub,
                expected_log: expected,
                actual_log: actual,
            }));
        }
    }
    Ok(run.pass())
}

/// First strong generator of `container` outside `subgroup`, as a failure.
fn containment(
    q: &QuotientRep,
    container: (&NamedSubgroup, &PermGroup),
    subgroup: (&NamedSubgroup, &PermGroup),
) -> Option<Counterexample> {
    container
        .1
        .strong_generators()
        .into_iter()
        .find(|g| !subgroup.1.contains(g))
        .map(|element| Counterexample::NotMember {
            level: q.level(),
            domain: container.0.domain(),
            element,
            container: container.0.clone(),
            subgroup: subgroup.0.clone(),
        })
}

/// `container <= subgroup`, building both by name.
fn check_containment(
    q: &QuotientRep,
    container: NamedSubgroup,
    subgroup: NamedSubgroup,
    run: &mut Run,
    key: &str,
) -> Result<Option<Counterexample>> {
    let outer = container.build(q)?;
    let inner = subgroup.build(q)?;
    run.note(
        key,
        json!({ "container_log_order": outer.log_order(), "subgroup_log_order": inner.log_order() }),
    );
    Ok(containment(q, (&container, &outer), (&subgroup, &inner)))
}

/// C3: `st_G(2) <= G'` and `st_G(2) <= gamma_3(G)`.
pub fn stabilizers_in_derived(ggs: &Ggs, n: usize, cfg: &SuiteConfig) -> CheckResult {
    let run = Run::new(CheckId::C3, ggs, ANCHOR_C3).level(n);
    if n < 2 {
        return run.skip("requires level >= 2");
    }
    let derived = if cfg.fault == Some(Fault::WrongSubgroup) {
        NamedSubgroup::Trivial
    } else {
        NamedSubgroup::Derived
    };
    let targets = [
        ("kernel2_in_derived", derived),
        ("kernel2_in_gamma3", NamedSubgroup::LowerCentral { k: 3 }),
    ];
    containments(ggs, n, cfg, run, NamedSubgroup::LevelKernel { m: 2 }, &targets)
}

fn containments(
    ggs: &Ggs,
    n: usize,
    cfg: &SuiteConfig,
    mut run: Run,
    container: NamedSubgroup,
    targets: &[(&str, NamedSubgroup)],
) -> CheckResult {
    let q = match cfg.quotient(ggs, n) {
        Ok(q) => q,
        Err(err) => return run.skip_on(err),
    };
    for (key, sub) in targets {
        match check_containment(&q, container.clone(), sub.clone(), &mut run, key) {
            Ok(None) => {}
            Ok(Some(c)) => return run.fail(c),
            Err(err) => return run.skip_on(err),
        }
    }
    run.pass()
}

/// Two-sided containment of two section-forest groups.
fn equal_on_sections(
    q: &QuotientRep,
    left: NamedSubgroup,
    right: NamedSubgroup,
    run: &mut Run,
    key: &str,
) -> Result<Option<Counterexample>> {
    let l = left.build(q)?;
    let r = right.build(q)?;
    run.note(
        key,
        json!({ "sections_log_order": l.log_order(), "product_log_order": r.log_order() }),
    );
    Ok(containment(q, (&left, &l), (&right, &r))
        .or_else(|| containment(q, (&right, &r), (&left, &l))))
}

/// C4: `psi(gamma_3(st_G(1))) = gamma_3(G)^p`, and `psi(st_G(1)') = (G')^p` when non-symmetric.
pub fn branch_structure(ggs: &Ggs, n: usize, cfg: &SuiteConfig) -> CheckResult {
    let mut run = Run::new(CheckId::C4, ggs, ANCHOR_C4).level(n);
    let v = ggs.vector();
    if v.is_constant() {
        return run.skip("requires non-constant defining vector");
    }
    if n < 3 {
        return run.skip("requires level >= 3");
    }
    let q = match cfg.quotient(ggs, n) {
        Ok(q) => q,
        Err(err) => return run.skip_on(err),
    };
    let mut parts = vec![(
        "gamma3_of_st1",
        NamedSubgroup::Gamma3OfSt1,
        NamedSubgroup::LowerCentral { k: 3 },
    )];
    if v.is_symmetric() {
        run.note("st1_derived", "skipped: symmetric defining vector");
    } else {
        parts.push(("st1_derived", NamedSubgroup::St1Derived, NamedSubgroup::Derived));
    }
    for (key, h, factor) in parts {
        let left = NamedSubgroup::sections(h);
        let right = NamedSubgroup::product(factor);
        match equal_on_sections(&q, left, right, &mut run, key) {
            Ok(None) => {}
            Ok(Some(c)) => return run.fail(c),
            Err(err) => return run.skip_on(err),
        }
    }
    run.pass()
}

/// C5: every coordinate projection of `psi(G')` (and of `psi(gamma_3(G))` for
/// symmetric non-constant vectors) is the whole level-`(n-1)` quotient.
pub fn subdirect_projections(ggs: &Ggs, n: usize, cfg: &SuiteConfig) -> CheckResult {
    let mut run = Run::new(CheckId::C5, ggs, ANCHOR_C5).level(n);
    let v = ggs.vector();
    if v.is_constant() {
        return run.skip("requires non-constant defining vector");
    }
    if n < 2 {
        return run.skip("requires level >= 2");
    }
    let (q, lower) = match cfg.quotient(ggs, n).and_then(|q| Ok((cfg.quotient(ggs, n - 1)?, q))) {
        Ok((lower, q)) => (q, lower),
        Err(err) => return run.skip_on(err),
    };
    let full = lower.group().log_order();
    run.note("lower_log_order", full);
    let mut parts = vec![("derived", NamedSubgroup::Derived)];
    if v.is_symmetric() {
        parts.push(("gamma3", NamedSubgroup::LowerCentral { k: 3 }));
    }
    for (key, h) in parts {
        let named = NamedSubgroup::sections(h);
        let psi = match named.build(&q) {
            Ok(g) => g,
            Err(err) => return run.skip_on(err),
        };
        let mut logs = Vec::new();
        for t in 0..ggs.p() as usize {
            let proj = q
                .coordinate_projection(&psi, t)
                .expect("section groups live on the section forest");
            logs.push(proj.log_order());
            if proj.log_order() != full {
                return run.fail(Counterexample::ProjectionDeficient {
                    level: n,
                    coordinate: t,
                    subgroup: named,
                    log_order: proj.log_order(),
                    expected_log: full,
                });
            }
        }
        run.note(&format!("{key}_projection_log_orders"), logs);
    }
    run.pass()
}

/// C6: `st_G(3) <= G''` (non-symmetric), or `st_G(3) <= gamma_4(G)` and
/// `st_G(4) <= gamma_3(G)'` (symmetric non-constant).
pub fn deep_containments(ggs: &Ggs, n: usize, cfg: &SuiteConfig) -> CheckResult {
    let mut run = Run::new(CheckId::C6, ggs, ANCHOR_C6).level(n);
    let v = ggs.vector();
    if v.is_constant() {
        return run.skip("requires non-constant defining vector");
    }
    if n < 4 {
        return run.skip("requires level >= 4");
    }
    let q = match cfg.quotient(ggs, n) {
        Ok(q) => q,
        Err(err) => return run.skip_on(err),
    };
    let mut parts = Vec::new();
    if v.is_symmetric() {
        parts.push(("kernel3_in_gamma4", 3, NamedSubgroup::LowerCentral { k: 4 }));
        if n >= 5 {
            parts.push(("kernel4_in_gamma3_derived", 4, NamedSubgroup::Gamma3Derived));
        } else {
            run.note("kernel4_in_gamma3_derived", "skipped: requires level >= 5");
        }
    } else {
        parts.push(("kernel3_in_second_derived", 3, NamedSubgroup::SecondDerived));
    }
    for (key, m, sub) in parts {
        match check_containment(&q, NamedSubgroup::LevelKernel { m }, sub, &mut run, key) {
            Ok(None) => {}
            Ok(Some(c)) => return run.fail(c),
            Err(err) => return run.skip_on(err),
        }
    }
    run.pass()
}

/// `(log_p |Q/N|, class of Q/N)` for `N` the image of `K'`.
pub(crate) fn k_closure_quotient_shape(q: &QuotientRep) -> Result<(usize, usize)> {
    let n = NamedSubgroup::KDerived.build(q)?;
    let series = q.group().lower_central_series(q.level() + 2);
    let mut class = 0;
    for term in &series.terms {
        if term.join(&n)?.log_order() > n.log_order() {
            class += 1;
        }
    }
    Ok((q.group().log_order() - n.log_order(), class))
}

/// C7: the constant-vector group.
pub fn constant_vector(ggs: &Ggs, n: usize, cfg: &SuiteConfig) -> CheckResult {
    let run = Run::new(CheckId::C7, ggs, ANCHOR_C7)
        .level(n)
        .seeded(cfg.seed, cfg.product_law_samples);
    if !ggs.vector().is_constant() {
        return run.skip("requires constant defining vector");
    }
    if n < 2 {
        return run.skip("requires level >= 2");
    }
    match constant_vector_inner(ggs, n, cfg, run) {
        Ok(r) => r,
        Err((run, err)) => run.skip_on(err),
    }
}

fn constant_vector_inner(ggs: &Ggs, n: usize, cfg: &SuiteConfig, mut run: Run) -> Partial {
    let p = ggs.p() as usize;
    let mut levels = Vec::new();
    let mut quotients = Vec::new();
    for m in 2..=n {
        let q = tri!(run, cfg.quotient(ggs, m));
        let k = tri!(run, NamedSubgroup::K.build(&q));
        let log_k = log_index(q.group(), &k);
        if log_k != 1 {
            return Ok(run.fail(Counterexample::IndexMismatch {
                level: m,
                subgroup: NamedSubgroup::K,
                expected_log: 1,
                actual_log: log_k,
            }));
        }
        let (log_order, class) = tri!(run, k_closure_quotient_shape(&q));
        if log_order != m + 1 || class != m {
            return Ok(run.fail(Counterexample::NotMaximalClass {
                level: m,
                log_order,
                class,
            }));
        }
        let invariants = k.abelian_invariants().exponents;
        if m % (p - 1) == 0 {
            let expected = vec![(m / (p - 1)) as u32; p - 1];
            if invariants != expected {
                return Ok(run.fail(Counterexample::InvariantsMismatch {
                    level: m,
                    subgroup: NamedSubgroup::K,
                    expected,
                    actual: invariants,
                }));
            }
        }
        levels.push(json!({
            "level": m,
            "log_index_k": log_k,
            "k_closure_quotient_log_order": log_order,
            "k_closure_quotient_class": class,
            "k_abelian_invariant_exponents": invariants,
        }));
        quotients.push(q);
    }
    run.note("levels", levels);

    // product laws, sampled
    let q_top = quotients.last().expect("n >= 2");
    let kd_top = tri!(run, NamedSubgroup::KDerived.build(q_top));
    let q_below = if n - 1 >= 2 {
        quotients[n - 3].clone()
    } else {
        tri!(run, cfg.quotient(ggs, n - 1))
    };
    let kd_below = tri!(run, NamedSubgroup::KDerived.build(&q_below));
    let mut rng = rng_for(cfg.seed, "C7", ggs);
    let pi = p as i64;
    for _ in 0..cfg.product_law_samples {
        let len = rng.gen_range(1..=8);
        let mut g = ggs.identity();
        for _ in 0..len {
            let y = ggs.y_i(rng.gen_range(0..pi));
            g.mul_assign(&if rng.gen_bool(0.5) { y } else { y.inverse() });
        }
        let twisted = (0..pi).fold(ggs.identity(), |acc, i| acc.mul(&g.conj(&ggs.a_pow(i))));
        if !kd_top.contains(&q_top.image(&twisted)) {
            return Ok(run.fail(Counterexample::WordNotInSubgroup {
                level: n,
                word: twisted,
                subgroup: NamedSubgroup::KDerived,
            }));
        }

        let terms = rng.gen_range(1..=3);
        let mut h = ggs.identity();
        for _ in 0..terms {
            let i = rng.gen_range(0..pi);
            let j = (i + rng.gen_range(1..pi)) % pi;
            let c = Word::comm(&ggs.y_i(i), &ggs.y_i(j));
            let by_len = rng.gen_range(0..=6);
            let by = random_word(ggs.p(), &mut rng, by_len);
            let c = if rng.gen_bool(0.5) { c } else { c.inverse() };
            h.mul_assign(&c.conj(&by));
        }
        let d = ggs.decompose(&h);
        let reversed = d
            .sections
            .iter()
            .rev()
            .fold(ggs.identity(), |acc, s| acc.mul(s));
        if !kd_below.contains(&q_below.image(&reversed)) {
            return Ok(run.fail(Counterexample::WordNotInSubgroup {
                level: n - 1,
                word: reversed,
                subgroup: NamedSubgroup::KDerived,
            }));
        }
    }
    run.note("product_law_samples", cfg.product_law_samples);

    let y0 = ggs.y0();
    match ggs.order_with(&y0, &cfg.budget, &mut Memo::new()) {
        OrderResult::Infinite { certificate } => {
            let ok = ggs.check_certificate(&y0, &certificate);
            run.note("y0_order", json!({ "tag": "infinite", "certificate": certificate, "rechecked": ok }));
        }
        OrderResult::Finite { exponent } => {
            return Ok(run.fail(Counterexample::FiniteOrder { word: y0, exponent }));
        }
        OrderResult::Unknown { exhausted } => {
            run.note("y0_order", json!({ "tag": "unknown", "exhausted": exhausted }));
        }
    }
    Ok(run.pass())
}

/// C8: sampled `G'` words never certify finite order when TF holds.
pub fn torsion_free_sampling(ggs: &Ggs, cfg: &SuiteConfig) -> CheckResult {
    let samples = cfg.derived_samples_for(ggs.p());
    let mut run = Run::new(CheckId::C8, ggs, ANCHOR_C8).seeded(cfg.seed, samples);
    if ggs.p() > TF_BRUTE_FORCE_BOUND {
        return run.skip(format!("TF enumeration needs p <= {TF_BRUTE_FORCE_BOUND}"));
    }
    match tf_witness(ggs.vector()) {
        Ok(Some(w)) => return run.skip(format!("TF fails, witness {w:?}")),
        Ok(None) => {}
        Err(err) => return run.skip_on(err),
    }
    let mut rng = rng_for(cfg.seed, "C8", ggs);
    let mut memo = Memo::new();
    let mut injected = (cfg.fault == Some(Fault::TorsionWord)).then(|| ggs.a());
    let (mut outside, mut trivial, mut undecided) = (0usize, 0usize, 0usize);
    let (mut infinite, mut unknown) = (0usize, 0usize);
    let mut accepted = 0usize;
    let max_attempts = 20 * samples + 20;
    let mut attempts = 0;
    while accepted < samples && attempts < max_attempts {
        attempts += 1;
        let w = injected
            .take()
            .unwrap_or_else(|| derived_word_sampler(ggs.p(), &mut rng));
        match screen_derived(ggs, &w, &cfg.budget, &mut memo) {
            SampleOutcome::Accepted => {}
            SampleOutcome::OutsideDerived => {
                outside += 1;
                continue;
            }
            SampleOutcome::Trivial => {
                trivial += 1;
                continue;
            }
            SampleOutcome::Undecided => {
                undecided += 1;
                continue;
            }
        }
        accepted += 1;
        match ggs.order_with(&w, &cfg.budget, &mut memo) {
            OrderResult::Finite { exponent } => {
                return run.fail(Counterexample::FiniteOrder { word: w, exponent })
            }
            OrderResult::Infinite { .. } => infinite += 1,
            OrderResult::Unknown { .. } => unknown += 1,
        }
    }
    run.note(
        "samples",
        json!({
            "accepted": accepted,
            "certified_infinite": infinite,
            "unknown": unknown,
            "rejected_outside_derived": outside,
            "rejected_trivial": trivial,
            "rejected_undecided": undecided,
        }),
    );
    run.pass()
}

/// C9: torsion vectors give finite orders; otherwise look for an infinite-order certificate.
pub fn torsion_criterion(ggs: &Ggs, cfg: &SuiteConfig) -> CheckResult {
    let mut run = Run::new(CheckId::C9, ggs, ANCHOR_C9).seeded(cfg.seed, cfg.torsion_samples);
    let mut memo = Memo::new();
    let p = ggs.p();
    if ggs.vector().is_torsion() {
        let mut rng = rng_for(cfg.seed, "C9", ggs);
        let mut words = vec![ggs.a().mul(&ggs.b())];
        for _ in 0..cfg.torsion_samples {
            let len = rng.gen_range(1..=20);
            words.push(random_word(p, &mut rng, len));
        }
        let mut exponents = Vec::new();
        let mut unknown = 0usize;
        for w in words {
            match ggs.order_with(&w, &cfg.budget, &mut memo) {
                OrderResult::Finite { exponent } => exponents.push(exponent),
                OrderResult::Infinite { certificate } => {
                    return run.fail(Counterexample::InfiniteOrder {
                        word: w,
                        certificate,
                    })
                }
                OrderResult::Unknown { .. } => unknown += 1,
            }
        }
        run.note("finite_exponents", exponents);
        run.note("unknown", unknown);
        return run.pass();
    }

    let s = ggs.vector().sum() as i64;
    let mut candidates = vec![ggs.y0(), ggs.b().mul(&ggs.a_pow(s)), ggs.a().mul(&ggs.b())];
    let mut rng = rng_for(cfg.seed, "C9", ggs);
    for _ in 0..cfg.torsion_samples {
        let len = rng.gen_range(1..=20);
        candidates.push(random_word(p, &mut rng, len));
    }
    let mut tried = Vec::new();
    for w in candidates {
        let result = ggs.order_with(&w, &cfg.budget, &mut memo);
        if let OrderResult::Infinite { certificate } = result {
            let ok = ggs.check_certificate(&w, &certificate);
            run.note("infinite_word", &w);
            run.note("certificate", json!({ "certificate": certificate, "rechecked": ok }));
            return run.pass();
        }
        tried.push(json!({ "word": w, "order": result }));
    }
    run.note("undecided_candidates", tried);

    // heuristic: orders of the image of ab across levels
    let ab = ggs.a().mul(&ggs.b());
    let mut orders = Vec::new();
    for n in 1..=ggs.ctx().depth_cap() {
        if Layout::tree_degree(p, n) > cfg.degree_cap {
            break;
        }
        match ggs.level_permutation(&ab, n) {
            Ok(perm) => orders.push(perm.order()),
            Err(_) => break,
        }
    }
    run.note("ab_permutation_orders", &orders);
    let growing = orders.windows(2).all(|w| w[0] <= w[1])
        && orders.first().zip(orders.last()).is_some_and(|(f, l)| l > f);
    if growing {
        run.note("heuristic", true);
        run.pass()
    } else {
        run.skip("order engine undecided and permutation orders not growing")
    }
}
