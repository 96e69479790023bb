//! Defining vectors, their classification, the circulant matrix and property TF.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prime::{is_prime, residue};

/// Default largest prime for which the `p^(p-1)` enumeration in [`tf_witness`] runs.
pub const TF_BRUTE_FORCE_BOUND: u32 = 7;

/// Non-zero `e = (e_1, ..., e_{p-1})` over `F_p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DefiningVector {
    p: u32,
    entries: Vec<u32>,
}

impl DefiningVector {
    pub fn new(p: u32, entries: &[i64]) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        if entries.len() != (p - 1) as usize {
            return Err(Error::VectorLength {
                expected: (p - 1) as usize,
                got: entries.len(),
            });
        }
        let entries: Vec<u32> = entries.iter().map(|&x| residue(x, p)).collect();
        if entries.iter().all(|&x| x == 0) {
            return Err(Error::ZeroVector);
        }
        Ok(Self { p, entries })
    }

    /// `(1, ..., 1)`.
    pub fn constant(p: u32) -> Result<Self> {
        Self::new(p, &vec![1; (p - 1) as usize])
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    /// `e_i` for `i` taken mod p, with `e_0 = 0`.
    #[inline]
    pub fn e(&self, i: i64) -> u32 {
        let i = residue(i, self.p) as usize;
        if i == 0 {
            0
        } else {
            self.entries[i - 1]
        }
    }

    pub fn sum(&self) -> u32 {
        self.entries.iter().fold(0, |acc, &x| (acc + x) % self.p)
    }

    pub fn is_torsion(&self) -> bool {
        self.sum() == 0
    }

    pub fn is_constant(&self) -> bool {
        self.entries.windows(2).all(|w| w[0] == w[1])
    }

    /// `e_i = e_{p-i}` for all `i`.
    pub fn is_symmetric(&self) -> bool {
        let n = self.entries.len();
        (0..n).all(|i| self.entries[i] == self.entries[n - 1 - i])
    }

    pub fn scale(&self, lambda: u32) -> Result<Self> {
        let v: Vec<i64> = self
            .entries
            .iter()
            .map(|&x| (x as i64) * (lambda as i64))
            .collect();
        Self::new(self.p, &v)
    }

    /// Scalar multiples define the same group.
    pub fn is_scalar_multiple_of(&self, other: &Self) -> bool {
        self.p == other.p && (1..self.p).any(|l| other.scale(l).is_ok_and(|s| s == *self))
    }
}

impl std::fmt::Display for DefiningVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TfStatus {
    Holds,
    Fails { witness: Vec<u32> },
    NotRun,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VectorClass {
    pub is_torsion: bool,
    pub is_constant: bool,
    pub is_symmetric: bool,
    pub tf_status: TfStatus,
}

pub fn classify(e: &DefiningVector) -> VectorClass {
    VectorClass {
        is_torsion: e.is_torsion(),
        is_constant: e.is_constant(),
        is_symmetric: e.is_symmetric(),
        tf_status: TfStatus::NotRun,
    }
}

/// Classification with the TF enumeration run (subject to [`TF_BRUTE_FORCE_BOUND`]).
pub fn classify_with_tf(e: &DefiningVector) -> Result<VectorClass> {
    let mut class = classify(e);
    class.tf_status = match tf_witness(e)? {
        None => TfStatus::Holds,
        Some(witness) => TfStatus::Fails { witness },
    };
    Ok(class)
}

/// A `p x p` matrix over `F_p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CirculantMatrix {
    p: u32,
    rows: Vec<Vec<u32>>,
}

impl CirculantMatrix {
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.rows[r][c]
    }

    /// Row vector times matrix.
    pub fn left_mul(&self, v: &[u32]) -> Vec<u32> {
        let p = self.p as u64;
        (0..self.p as usize)
            .map(|c| {
                let s: u64 = v
                    .iter()
                    .zip(&self.rows)
                    .map(|(&x, row)| x as u64 * row[c] as u64)
                    .sum();
                (s % p) as u32
            })
            .collect()
    }

    pub fn row_sums(&self) -> Vec<u32> {
        self.rows
            .iter()
            .map(|r| r.iter().fold(0, |a, &x| (a + x) % self.p))
            .collect()
    }

    /// Each row is the previous one shifted cyclically to the right.
    pub fn is_circulant(&self) -> bool {
        let n = self.p as usize;
        (1..n).all(|r| (0..n).all(|c| self.rows[r][c] == self.rows[r - 1][(c + n - 1) % n]))
    }
}

/// `C` with first row `(0, e_1, ..., e_{p-1})`; entry `(r, c)` is `e_{c-r}`.
pub fn circulant(e: &DefiningVector) -> CirculantMatrix {
    let n = e.p() as usize;
    let rows = (0..n)
        .map(|r| (0..n).map(|c| e.e(c as i64 - r as i64)).collect())
        .collect();
    CirculantMatrix { p: e.p(), rows }
}

/// `C - J`, where `J` is the all-ones matrix.
pub fn circulant_minus_j(e: &DefiningVector) -> CirculantMatrix {
    let mut m = circulant(e);
    let p = e.p();
    for row in &mut m.rows {
        for x in row.iter_mut() {
            *x = (*x + p - 1) % p;
        }
    }
    m
}

/// `m = i C`; `i` violates TF when `m_j i_j = 0` for every `j`.
pub fn is_tf_witness(e: &DefiningVector, i: &[u32]) -> bool {
    let p = e.p();
    if i.len() != p as usize || i.iter().all(|&x| x % p == 0) {
        return false;
    }
    if i.iter().fold(0, |a, &x| (a + x) % p) != 0 {
        return false;
    }
    let m = circulant(e).left_mul(i);
    m.iter().zip(i).all(|(&mj, &ij)| (mj as u64 * ij as u64) % p as u64 == 0)
}

/// Number of candidate vectors the enumeration visits.
pub fn tf_candidate_count(p: u32) -> f64 {
    (p as f64).powi(p as i32 - 1)
}

/// First lexicographic non-zero zero-sum `i` in `F_p^p` with `m_j i_j = 0` for all `j`,
/// or `None` when property TF holds. Refuses `p` above [`TF_BRUTE_FORCE_BOUND`].
pub fn tf_witness(e: &DefiningVector) -> Result<Option<Vec<u32>>> {
    tf_witness_bounded(e, TF_BRUTE_FORCE_BOUND)
}

pub fn tf_witness_bounded(e: &DefiningVector, bound: u32) -> Result<Option<Vec<u32>>> {
    let p = e.p();
    if p > bound {
        return Err(Error::BruteForceBound { p, bound });
    }
    let n = p as usize;
    // Column j of C as a dense list, so m_j is a dot product.
    let cols: Vec<Vec<u32>> = {
        let c = circulant(e);
        (0..n).map(|j| (0..n).map(|r| c.get(r, j)).collect()).collect()
    };
    // Partition on i_1; the first witness overall lives in the smallest partition that has one.
    let found = (0..p)
        .into_par_iter()
        .filter_map(|first| first_witness_with_prefix(p, first, &cols))
        .min();
    Ok(found)
}

fn first_witness_with_prefix(p: u32, first: u32, cols: &[Vec<u32>]) -> Option<Vec<u32>> {
    let n = p as usize;
    let free = n - 1;
    let mut v = vec![0u32; n];
    v[0] = first;
    loop {
        let s = v[..free].iter().fold(0, |a, &x| (a + x) % p);
        v[n - 1] = (p - s) % p;
        if v.iter().any(|&x| x != 0) && satisfies_witness(p, &v, cols) {
            return Some(v);
        }
        // odometer over positions 1..free, last position fastest
        let mut k = free;
        loop {
            if k == 1 {
                return None;
            }
            k -= 1;
            v[k] += 1;
            if v[k] < p {
                break;
            }
            v[k] = 0;
        }
    }
}

fn satisfies_witness(p: u32, i: &[u32], cols: &[Vec<u32>]) -> bool {
    let p64 = p as u64;
    i.iter().zip(cols).all(|(&ij, col)| {
        if ij == 0 {
            return true;
        }
        let mj: u64 = i.iter().zip(col).map(|(&x, &c)| x as u64 * c as u64).sum();
        mj % p64 == 0
    })
}
