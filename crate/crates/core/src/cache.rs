//! On-disk cache of quotient generator images.
//!
//! File layout, all integers little-endian `u32`:
//!
//! ```text
//! magic "GGSQ" | version | p | n | e_1 .. e_{p-1} | degree | a images | b images | sha256
//! ```
//!
//! The trailing 32 bytes are the SHA-256 of everything before them. Any
//! mismatch (checksum, parameters, or a non-automorphism image) is a miss.
//! Writes go to a temporary file in the same directory and are renamed into
//! place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::ggs::Ggs;
use crate::perm::{Layout, Perm};
use crate::quotient::QuotientRep;

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &[u8; 4] = b"GGSQ";
const SUFFIX: &str = ".ggsq";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheStatus {
    Hit,
    Miss,
    Disabled,
}

pub fn file_name(ggs: &Ggs, n: usize) -> String {
    let e: Vec<String> = ggs.vector().entries().iter().map(u32::to_string).collect();
    format!(
        "v{FORMAT_VERSION}-p{}-e{}-n{n}{SUFFIX}",
        ggs.p(),
        e.join("_")
    )
}

fn encode(q: &QuotientRep) -> Vec<u8> {
    let ggs = q.ggs();
    let mut words = vec![FORMAT_VERSION, ggs.p(), q.level() as u32];
    words.extend_from_slice(ggs.vector().entries());
    words.push(q.layout().degree() as u32);
    words.extend_from_slice(q.a_image().images());
    words.extend_from_slice(q.b_image().images());
    let mut bytes = MAGIC.to_vec();
    for w in words {
        bytes.extend_from_slice(&w.to_le_bytes());
    }
    let digest = Sha256::digest(&bytes);
    bytes.extend_from_slice(&digest);
    bytes
}

fn decode(bytes: &[u8], ggs: &Ggs, n: usize) -> Option<(Perm, Perm)> {
    let body_len = bytes.len().checked_sub(32)?;
    let (body, digest) = bytes.split_at(body_len);
    if Sha256::digest(body).as_slice() != digest || !body.starts_with(MAGIC) {
        return None;
    }
    let rest = &body[MAGIC.len()..];
    if rest.len() % 4 != 0 {
        return None;
    }
    let words: Vec<u32> = rest
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    let mut header = vec![FORMAT_VERSION, ggs.p(), n as u32];
    header.extend_from_slice(ggs.vector().entries());
    let degree = Layout::tree_degree(ggs.p(), n);
    header.push(degree as u32);
    if words.len() != header.len() + 2 * degree || words[..header.len()] != header[..] {
        return None;
    }
    let perms = &words[header.len()..];
    let a = Perm::from_images(perms[..degree].to_vec())?;
    let b = Perm::from_images(perms[degree..].to_vec())?;
    Some((a, b))
}

pub fn load(dir: &Path, ggs: &Ggs, n: usize) -> Option<QuotientRep> {
    let bytes = fs::read(dir.join(file_name(ggs, n))).ok()?;
    let (a, b) = decode(&bytes, ggs, n)?;
    QuotientRep::from_generators(ggs, n, a, b).ok()
}

pub fn store(dir: &Path, q: &QuotientRep) -> Result<PathBuf> {
    let io = |e: std::io::Error| Error::Cache(e.to_string());
    fs::create_dir_all(dir).map_err(io)?;
    let target = dir.join(file_name(q.ggs(), q.level()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(&encode(q)).map_err(io)?;
    tmp.persist(&target).map_err(|e| io(e.error))?;
    Ok(target)
}

/// Build the level-`n` quotient, going through the cache when `dir` is given.
/// A failed store is not an error: the cache only accelerates.
pub fn quotient_cached(
    ggs: &Ggs,
    n: usize,
    degree_cap: usize,
    dir: Option<&Path>,
) -> Result<(QuotientRep, CacheStatus)> {
    QuotientRep::check_level(ggs, n, degree_cap)?;
    let Some(dir) = dir else {
        return Ok((QuotientRep::with_degree_cap(ggs, n, degree_cap)?, CacheStatus::Disabled));
    };
    if let Some(q) = load(dir, ggs, n) {
        return Ok((q, CacheStatus::Hit));
    }
    let q = QuotientRep::with_degree_cap(ggs, n, degree_cap)?;
    let _ = store(dir, &q);
    Ok((q, CacheStatus::Miss))
}

/// Remove every cache file in `dir`; returns how many were removed.
pub fn purge(dir: &Path) -> Result<usize> {
    let entries = match fs::read_dir(dir) {
        Ok(entries) => entries,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(0),
        Err(e) => return Err(Error::Cache(e.to_string())),
    };
    let mut removed = 0;
    for entry in entries.flatten() {
        let name = entry.file_name();
        if name.to_string_lossy().ends_with(SUFFIX) {
            fs::remove_file(entry.path()).map_err(|e| Error::Cache(e.to_string()))?;
            removed += 1;
        }
    }
    Ok(removed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quotient::DEFAULT_DEGREE_CAP;

    #[test]
    fn round_trip_and_hit() {
        let dir = tempfile::tempdir().unwrap();
        let ggs = Ggs::new(3, &[1, 2]).unwrap();
        let (q1, s1) = quotient_cached(&ggs, 3, DEFAULT_DEGREE_CAP, Some(dir.path())).unwrap();
        assert_eq!(s1, CacheStatus::Miss);
        let (q2, s2) = quotient_cached(&ggs, 3, DEFAULT_DEGREE_CAP, Some(dir.path())).unwrap();
        assert_eq!(s2, CacheStatus::Hit);
        assert_eq!(q1.a_image(), q2.a_image());
        assert_eq!(q1.b_image(), q2.b_image());
        assert_eq!(q1.group().strong_generators(), q2.group().strong_generators());
        assert_eq!(purge(dir.path()).unwrap(), 1);
        assert_eq!(purge(dir.path()).unwrap(), 0);
    }

    #[test]
    fn corruption_is_a_miss() {
        let dir = tempfile::tempdir().unwrap();
        let ggs = Ggs::new(3, &[1, 1]).unwrap();
        let (q, _) = quotient_cached(&ggs, 2, DEFAULT_DEGREE_CAP, Some(dir.path())).unwrap();
        let path = dir.path().join(file_name(&ggs, 2));
        let mut bytes = fs::read(&path).unwrap();
        bytes[20] ^= 1;
        fs::write(&path, &bytes).unwrap();
        assert!(load(dir.path(), &ggs, 2).is_none());
        let (again, status) = quotient_cached(&ggs, 2, DEFAULT_DEGREE_CAP, Some(dir.path())).unwrap();
        assert_eq!(status, CacheStatus::Miss);
        assert_eq!(again.b_image(), q.b_image());
        // a different vector never reads this file
        let other = Ggs::new(3, &[1, 2]).unwrap();
        assert_ne!(file_name(&other, 2), file_name(&ggs, 2));
    }
}
