//! Matching point counts against newform coefficients.
//!
//! A counted surface *agrees* with a newform at the prime `p` when
//! `a_p ≡ 1 − #X_p (mod p)`. Equivalently, `a_p − 1 + #X_p ≡ 0 (mod p)`.
//! All 25 primes participate; there are no exempt primes. At `p = 2` the
//! point count is always 15, so agreement there means exactly that `a_2`
//! is even.
//!
//! [`best_matches`] scans a whole coefficient table across a set of
//! quadratic twists and returns every `(record, d)` pair whose agreement
//! count meets a threshold, in a deterministic order: agreement count
//! descending, then level ascending, then `|d|` ascending, then label,
//! then `d` descending (so `+d` sorts before `−d`).

use crate::count::CountVector;
use crate::error::{Error, Result};
use crate::field::{kronecker, PRIMES};
use crate::newform::NewformRecord;

/// One table entry meeting the agreement threshold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchResult {
    /// Label of the (untwisted) newform record.
    pub label: String,
    /// Level of the record.
    pub level: u32,
    /// The quadratic twist applied; 1 means none.
    pub twist: i64,
    /// Number of primes where the congruence holds.
    pub agree: u32,
    /// The primes where it fails; `agree + disagree.len() == 25`.
    pub disagree: Vec<u32>,
}

impl MatchResult {
    /// Sort key for the deterministic listing order: agreement count
    /// descending, then level, `|d|`, label, and finally `+d` before `−d`.
    pub fn order_key(&self) -> impl Ord + '_ {
        (
            std::cmp::Reverse(self.agree),
            self.level,
            self.twist.abs(),
            &self.label,
            std::cmp::Reverse(self.twist),
        )
    }
}

/// `a_p mod p` for each prime, after twisting by `d`.
///
/// Comparing these residues against [`CountVector::residues`] is the whole
/// agreement test, so searches precompute this per `(record, d)` pair.
pub fn twisted_residues(record: &NewformRecord, d: i64) -> [u16; 25] {
    let mut out = [0u16; 25];
    for (i, &p) in PRIMES.iter().enumerate() {
        let a = record.ap[i] * kronecker(d, p) as i64;
        out[i] = a.rem_euclid(p as i64) as u16;
    }
    out
}

/// Agreement count and disagreeing primes for one untwisted record.
pub fn agreements(counts: &CountVector, record: &NewformRecord) -> (u32, Vec<u32>) {
    agreements_of_residues(&counts.residues(), &twisted_residues(record, 1))
}

fn agreements_of_residues(want: &[u16; 25], have: &[u16; 25]) -> (u32, Vec<u32>) {
    let mut agree = 0;
    let mut disagree = Vec::new();
    for (i, &p) in PRIMES.iter().enumerate() {
        if want[i] == have[i] {
            agree += 1;
        } else {
            disagree.push(p);
        }
    }
    (agree, disagree)
}

/// Every `(record, twist)` pair agreeing with `counts` at `threshold` or
/// more primes, best first. `threshold` must lie in `1..=25`.
pub fn best_matches(
    counts: &CountVector,
    table: &[NewformRecord],
    twists: &[i64],
    threshold: u32,
) -> Result<Vec<MatchResult>> {
    if !(1..=25).contains(&threshold) {
        return Err(Error::BadRange(format!(
            "agreement threshold {threshold} is outside 1..=25"
        )));
    }
    let want = counts.residues();
    let mut out = Vec::new();
    for record in table {
        for &d in twists {
            let (agree, disagree) =
                agreements_of_residues(&want, &twisted_residues(record, d));
            if agree >= threshold {
                out.push(MatchResult {
                    label: record.label.clone(),
                    level: record.level,
                    twist: d,
                    agree,
                    disagree,
                });
            }
        }
    }
    out.sort_by(|a, b| a.order_key().cmp(&b.order_key()));
    Ok(out)
}
