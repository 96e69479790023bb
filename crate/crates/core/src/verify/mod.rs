//! Finite-level checks of structural claims about GGS-groups, run over a
//! parameter grid and collected into a deterministic report.

mod checks;
mod named;
mod sample;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cache;
use crate::error::{Error, Result};
use crate::ggs::Ggs;
use crate::order::{Budget, InfiniteCertificate};
use crate::perm::Perm;
use crate::prime::PrimeContext;
use crate::quotient::{QuotientRep, DEFAULT_DEGREE_CAP};
use crate::vector::DefiningVector;
use crate::word::Word;

pub use checks::{
    branch_structure, constant_vector, deep_containments, indices, stabilizers_in_derived,
    subdirect_projections, torsion_criterion, torsion_free_sampling, wreath_identities,
};
pub use named::{Domain, NamedSubgroup};
pub use sample::{derived_word_sampler, random_word, SampleOutcome};

pub const SUITE_VERSION: &str = "1.0.0";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CheckId {
    C1,
    C2,
    C3,
    C4,
    C5,
    C6,
    C7,
    C8,
    C9,
}

impl CheckId {
    pub const ALL: [CheckId; 9] = [
        CheckId::C1,
        CheckId::C2,
        CheckId::C3,
        CheckId::C4,
        CheckId::C5,
        CheckId::C6,
        CheckId::C7,
        CheckId::C8,
        CheckId::C9,
    ];
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Params {
    pub p: u32,
    pub e: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

/// A concrete object refuting a claim; [`recheck`] validates it independently.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Counterexample {
    /// A word claimed to be trivial that is not.
    WordNotTrivial { word: Word, claim: String },
    IndexMismatch {
        level: usize,
        subgroup: NamedSubgroup,
        expected_log: usize,
        actual_log: usize,
    },
    /// `element` lies in `container` but not in `subgroup`.
    NotMember {
        level: usize,
        domain: Domain,
        element: Perm,
        container: NamedSubgroup,
        subgroup: NamedSubgroup,
    },
    /// The image of `word` at `level` is not in `subgroup`.
    WordNotInSubgroup {
        level: usize,
        word: Word,
        subgroup: NamedSubgroup,
    },
    ProjectionDeficient {
        level: usize,
        coordinate: usize,
        subgroup: NamedSubgroup,
        log_order: usize,
        expected_log: usize,
    },
    InvariantsMismatch {
        level: usize,
        subgroup: NamedSubgroup,
        expected: Vec<u32>,
        actual: Vec<u32>,
    },
    NotMaximalClass {
        level: usize,
        log_order: usize,
        class: usize,
    },
    FiniteOrder { word: Word, exponent: u32 },
    InfiniteOrder {
        word: Word,
        certificate: Box<InfiniteCertificate>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail { counterexample: Counterexample },
    Skipped { reason: String },
}

impl Verdict {
    pub fn is_fail(&self) -> bool {
        matches!(self, Verdict::Fail { .. })
    }

    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

pub type Evidence = BTreeMap<String, serde_json::Value>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub check_id: CheckId,
    pub params: Params,
    pub verdict: Verdict,
    pub evidence: Evidence,
    pub paper_anchor: String,
    /// Excluded from determinism comparisons.
    pub wall_time_ms: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub suite_version: String,
    pub seed: u64,
    pub results: Vec<CheckResult>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn new(seed: u64, mut results: Vec<CheckResult>) -> Self {
        results.sort_by(|x, y| (x.check_id, &x.params).cmp(&(y.check_id, &y.params)));
        let mut summary = Summary {
            total: results.len(),
            ..Summary::default()
        };
        for r in &results {
            match r.verdict {
                Verdict::Pass => summary.pass += 1,
                Verdict::Fail { .. } => summary.fail += 1,
                Verdict::Skipped { .. } => summary.skipped += 1,
            }
        }
        Self {
            suite_version: SUITE_VERSION.to_string(),
            seed,
            results,
            summary,
        }
    }

    pub fn has_failures(&self) -> bool {
        self.summary.fail > 0
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }

    /// The report with every wall-time field removed.
    pub fn deterministic_view(&self) -> serde_json::Value {
        let mut v = self.to_json();
        if let Some(results) = v.get_mut("results").and_then(|r| r.as_array_mut()) {
            for r in results {
                if let Some(obj) = r.as_object_mut() {
                    obj.remove("wall_time_ms");
                }
            }
        }
        v
    }
}

/// Deliberate faults for self-testing the suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fault {
    /// C3 tests the level-2 kernel against the trivial group instead of `G'`.
    WrongSubgroup,
    /// C8 offers the word `a` to its sampler first.
    TorsionWord,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridEntry {
    pub p: u32,
    pub e: Vec<u32>,
    pub level: usize,
}

impl GridEntry {
    pub fn new(p: u32, e: &[i64], level: usize) -> Result<Self> {
        let v = DefiningVector::new(p, e)?;
        Ok(Self {
            p,
            e: v.entries().to_vec(),
            level,
        })
    }

    pub fn ggs(&self, depth_cap: usize) -> Result<Ggs> {
        let e: Vec<i64> = self.e.iter().map(|&x| x as i64).collect();
        Ggs::with_depth_cap(self.p, &e, depth_cap)
    }
}

/// Default quotient level per prime.
pub fn default_level(p: u32) -> usize {
    match p {
        3 | 5 => 4,
        _ => 3,
    }
}

/// p = 3: (1,1), (1,2), (1,0); p = 5: (1,2,2,1), (1,1,1,0), (1,0,0,0).
pub fn default_grid() -> Vec<GridEntry> {
    let vectors: [(u32, &[i64]); 6] = [
        (3, &[1, 1]),
        (3, &[1, 2]),
        (3, &[1, 0]),
        (5, &[1, 2, 2, 1]),
        (5, &[1, 1, 1, 0]),
        (5, &[1, 0, 0, 0]),
    ];
    vectors
        .iter()
        .map(|&(p, e)| GridEntry::new(p, e, default_level(p)).expect("valid default vector"))
        .collect()
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub grid: Vec<GridEntry>,
    pub checks: Vec<CheckId>,
    pub seed: u64,
    pub budget: Budget,
    pub degree_cap: usize,
    pub depth_cap: usize,
    /// C8 sample count; `None` picks 200 for p = 3 and 50 otherwise.
    pub derived_samples: Option<usize>,
    /// C7 samples for the product laws.
    pub product_law_samples: usize,
    /// C9 random words for torsion vectors.
    pub torsion_samples: usize,
    pub cache_dir: Option<PathBuf>,
    pub fault: Option<Fault>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            grid: default_grid(),
            checks: CheckId::ALL.to_vec(),
            seed: 0,
            budget: Budget::default(),
            degree_cap: DEFAULT_DEGREE_CAP,
            depth_cap: PrimeContext::DEFAULT_DEPTH_CAP,
            derived_samples: None,
            product_law_samples: 100,
            torsion_samples: 20,
            cache_dir: None,
            fault: None,
        }
    }
}

impl SuiteConfig {
    pub fn quotient(&self, ggs: &Ggs, n: usize) -> Result<QuotientRep> {
        cache::quotient_cached(ggs, n, self.degree_cap, self.cache_dir.as_deref()).map(|(q, _)| q)
    }

    pub fn derived_samples_for(&self, p: u32) -> usize {
        self.derived_samples
            .unwrap_or(if p == 3 { 200 } else { 50 })
    }
}

pub fn run_check(id: CheckId, ggs: &Ggs, level: usize, config: &SuiteConfig) -> CheckResult {
    match id {
        CheckId::C1 => wreath_identities(ggs),
        CheckId::C2 => indices(ggs, level, config),
        CheckId::C3 => stabilizers_in_derived(ggs, level, config),
        CheckId::C4 => branch_structure(ggs, level, config),
        CheckId::C5 => subdirect_projections(ggs, level, config),
        CheckId::C6 => deep_containments(ggs, level, config),
        CheckId::C7 => constant_vector(ggs, level, config),
        CheckId::C8 => torsion_free_sampling(ggs, config),
        CheckId::C9 => torsion_criterion(ggs, config),
    }
}

/// Run every selected check on every grid entry.
pub fn run_suite(config: &SuiteConfig) -> Result<VerificationReport> {
    let mut jobs = Vec::new();
    for entry in &config.grid {
        let ggs = entry.ggs(config.depth_cap)?;
        for &id in &config.checks {
            jobs.push((id, ggs.clone(), entry.level));
        }
    }
    let results: Vec<CheckResult> = jobs
        .par_iter()
        .map(|(id, ggs, level)| run_check(*id, ggs, *level, config))
        .collect();
    Ok(VerificationReport::new(config.seed, results))
}

/// Independently validate the counterexample of a failed result. Returns
/// `Ok(true)` when the counterexample refutes the claim.
pub fn recheck(result: &CheckResult, config: &SuiteConfig) -> Result<bool> {
    let Verdict::Fail { counterexample } = &result.verdict else {
        return Ok(false);
    };
    let e: Vec<i64> = result.params.e.iter().map(|&x| x as i64).collect();
    let ggs = Ggs::with_depth_cap(result.params.p, &e, config.depth_cap)?;
    let budget = config.budget;
    Ok(match counterexample {
        Counterexample::WordNotTrivial { word, .. } => {
            matches!(ggs.is_identity_with(word, &budget, &mut Default::default()), Ok(false))
        }
        Counterexample::IndexMismatch {
            level,
            subgroup,
            expected_log,
            ..
        } => {
            let q = QuotientRep::with_degree_cap(&ggs, *level, config.degree_cap)?;
            let h = subgroup.build(&q)?;
            q.group().log_order() - h.log_order() != *expected_log
        }
        Counterexample::NotMember {
            level,
            element,
            container,
            subgroup,
            ..
        } => {
            let q = QuotientRep::with_degree_cap(&ggs, *level, config.degree_cap)?;
            let outer = container.build(&q)?;
            let inner = subgroup.build(&q)?;
            outer.contains(element) && !inner.contains(element)
        }
        Counterexample::WordNotInSubgroup {
            level,
            word,
            subgroup,
        } => {
            let q = QuotientRep::with_degree_cap(&ggs, *level, config.degree_cap)?;
            !subgroup.build(&q)?.contains(&ggs.level_permutation(word, *level)?)
        }
        Counterexample::ProjectionDeficient {
            level,
            coordinate,
            subgroup,
            expected_log,
            ..
        } => {
            let q = QuotientRep::with_degree_cap(&ggs, *level, config.degree_cap)?;
            let h = subgroup.build(&q)?;
            q.coordinate_projection(&h, *coordinate)?.log_order() != *expected_log
        }
        Counterexample::InvariantsMismatch {
            level,
            subgroup,
            expected,
            ..
        } => {
            let q = QuotientRep::with_degree_cap(&ggs, *level, config.degree_cap)?;
            subgroup.build(&q)?.abelian_invariants().exponents != *expected
        }
        Counterexample::NotMaximalClass { level, .. } => {
            let q = QuotientRep::with_degree_cap(&ggs, *level, config.degree_cap)?;
            let (log_order, class) = checks::k_closure_quotient_shape(&q)?;
            !(log_order == level + 1 && class == *level)
        }
        Counterexample::FiniteOrder { word, exponent } => {
            let power = word.pow((ggs.p() as i64).pow(*exponent));
            let mut memo = Default::default();
            matches!(ggs.is_identity_with(word, &budget, &mut memo), Ok(false))
                && matches!(ggs.is_identity_with(&power, &budget, &mut memo), Ok(true))
        }
        Counterexample::InfiniteOrder { word, certificate } => {
            ggs.check_certificate(word, certificate)
        }
    })
}

pub(crate) struct Run {
    id: CheckId,
    params: Params,
    evidence: Evidence,
    anchor: &'static str,
    start: Instant,
}

impl Run {
    pub(crate) fn new(id: CheckId, ggs: &Ggs, anchor: &'static str) -> Self {
        Self {
            id,
            params: Params {
                p: ggs.p(),
                e: ggs.vector().entries().to_vec(),
                level: None,
                seed: None,
                samples: None,
            },
            evidence: Evidence::new(),
            anchor,
            start: Instant::now(),
        }
    }

    pub(crate) fn level(mut self, n: usize) -> Self {
        self.params.level = Some(n);
        self
    }

    pub(crate) fn seeded(mut self, seed: u64, samples: usize) -> Self {
        self.params.seed = Some(seed);
        self.params.samples = Some(samples);
        self
    }

    pub(crate) fn note(&mut self, key: &str, value: impl Serialize) {
        self.evidence.insert(
            key.to_string(),
            serde_json::to_value(value).expect("evidence serializes"),
        );
    }

    fn finish(self, verdict: Verdict) -> CheckResult {
        CheckResult {
            check_id: self.id,
            params: self.params,
            verdict,
            evidence: self.evidence,
            paper_anchor: self.anchor.to_string(),
            wall_time_ms: self.start.elapsed().as_millis() as u64,
        }
    }

    pub(crate) fn pass(self) -> CheckResult {
        self.finish(Verdict::Pass)
    }

    pub(crate) fn fail(self, counterexample: Counterexample) -> CheckResult {
        self.finish(Verdict::Fail { counterexample })
    }

    pub(crate) fn skip(self, reason: impl Into<String>) -> CheckResult {
        self.finish(Verdict::Skipped {
            reason: reason.into(),
        })
    }

    /// Resource refusals become skips; anything else is a bug.
    pub(crate) fn skip_on(self, err: Error) -> CheckResult {
        match err {
            Error::DegreeExceeded { .. }
            | Error::DepthExceeded { .. }
            | Error::BruteForceBound { .. } => self.skip(err.to_string()),
            other => panic!("unexpected error in check: {other}"),
        }
    }
}
