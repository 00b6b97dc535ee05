//! Exhaustive search for surfaces whose counts match a newform.
//!
//! A [`SearchRange`] fixes a letter subset and bounds on the support size
//! Φ and the coefficient 1-norm Ψ. [`Enumerator`] walks every vector in
//! the range exactly once, in a documented deterministic order:
//!
//! 1. support size Φ ascending;
//! 2. support sets in lexicographic letter order;
//! 3. coefficient tuples in lexicographic order, where each position
//!    runs through `1, −1, 2, −2, …` — except the first support
//!    position, which stays positive (`u² = −f` is a quadratic twist of
//!    `u² = f`, so the matcher's twist search makes the global sign
//!    redundant and the space is halved).
//!
//! [`run_search`] drives the enumeration through point counting and
//! newform matching on a worker pool. The index space is split into
//! fixed-size chunks; workers claim chunks from a shared producer and a
//! single writer flushes finished chunks strictly in order, so the
//! results file is byte-identical for any worker count. A checkpoint
//! (also written at each chunk boundary) allows an interrupted run to
//! resume and still produce the identical file.
//!
//! Matching inside the hot loop is incremental: counts are computed
//! prime by prime (cheapest fields first) and a `(form, twist)` pair is
//! abandoned as soon as it has disagreed too often to reach the
//! threshold. With the default threshold of 21, five disagreements kill
//! a pair; random vectors rarely survive past the single-digit primes,
//! which is what makes million-vector scans cheap.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::{File, OpenOptions};
use std::io::{Seek, SeekFrom, Write};
use std::path::Path;
use std::sync::{mpsc, Mutex};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::Zero;
use sha2::{Digest, Sha256};

use crate::basis::{Letter, Octic};
use crate::count::TableSet;
use crate::error::{Error, Result};
use crate::field::PRIMES;
use crate::matcher::{twisted_residues, MatchResult};
use crate::newform::{default_twists, NewformRecord};

/// What to enumerate and what counts as a hit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchRange {
    letters: Vec<Letter>,
    phi_min: u32,
    phi_max: u32,
    psi_min: u64,
    psi_max: u64,
    threshold: u32,
    twists: Vec<i64>,
}

impl SearchRange {
    /// Validates and canonicalizes a range. The letter set is sorted and
    /// must be free of duplicates; `psi_min` is raised to `phi_min` if
    /// below it (every nonzero coefficient contributes at least 1 to Ψ).
    pub fn new(
        letters: &[Letter],
        phi: (u32, u32),
        psi: (u64, u64),
        threshold: u32,
        twists: Vec<i64>,
    ) -> Result<SearchRange> {
        let mut letters = letters.to_vec();
        letters.sort_by_key(|l| l.index());
        let before = letters.len();
        letters.dedup();
        if letters.is_empty() {
            return Err(Error::BadRange("empty letter subset".into()));
        }
        if letters.len() != before {
            return Err(Error::BadRange("duplicate letters in subset".into()));
        }
        let (phi_min, phi_max) = phi;
        if phi_min == 0 || phi_min > phi_max || phi_max as usize > letters.len() {
            return Err(Error::BadRange(format!(
                "need 1 ≤ Φ min ≤ Φ max ≤ {} (subset size), got {phi_min}..{phi_max}",
                letters.len()
            )));
        }
        let (psi_min, psi_max) = psi;
        let psi_min = psi_min.max(phi_min as u64);
        if psi_min > psi_max {
            return Err(Error::BadRange(format!(
                "empty Ψ window {psi_min}..{psi_max} (Ψ min is clamped up to Φ min)"
            )));
        }
        if !(1..=25).contains(&threshold) {
            return Err(Error::BadRange(format!(
                "agreement threshold {threshold} is outside 1..=25"
            )));
        }
        if twists.is_empty() {
            return Err(Error::BadRange("empty twist set".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for &d in &twists {
            if d == 0 {
                return Err(Error::BadRange("twist d = 0 is not allowed".into()));
            }
            if !seen.insert(d) {
                return Err(Error::BadRange(format!("duplicate twist d = {d}")));
            }
        }
        Ok(SearchRange {
            letters,
            phi_min,
            phi_max,
            psi_min,
            psi_max,
            threshold,
            twists,
        })
    }

    /// A named preset. `paper-phi2` through `paper-phi8plus` cover the
    /// full 15-letter space in slices of constant support size;
    /// `paper-bruch` and `paper-brucwega` restrict the letter subset
    /// instead. All use threshold 21 and the default twist set.
    pub fn preset(name: &str) -> Result<SearchRange> {
        let all = Letter::ALL;
        let bruch = parse_letters("BRUCH")?;
        let brucwega = parse_letters("BRUCWEGA")?;
        let tw = default_twists();
        match name {
            "paper-phi2" => SearchRange::new(&all, (1, 2), (1, 2000), 21, tw),
            "paper-phi3" => SearchRange::new(&all, (3, 3), (3, 350), 21, tw),
            "paper-phi4" => SearchRange::new(&all, (4, 4), (4, 110), 21, tw),
            "paper-phi5" => SearchRange::new(&all, (5, 5), (5, 40), 21, tw),
            "paper-phi6" => SearchRange::new(&all, (6, 6), (6, 30), 21, tw),
            "paper-phi7" => SearchRange::new(&all, (7, 7), (7, 20), 21, tw),
            "paper-phi8plus" => SearchRange::new(&all, (8, 15), (8, 15), 21, tw),
            "paper-bruch" => SearchRange::new(&bruch, (1, 5), (1, 270), 21, tw),
            "paper-brucwega" => SearchRange::new(&brucwega, (1, 8), (1, 41), 21, tw),
            other => Err(Error::BadRange(format!(
                "unknown preset {other:?}; known presets: {}",
                PRESET_NAMES.join(", ")
            ))),
        }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn phi(&self) -> (u32, u32) {
        (self.phi_min, self.phi_max)
    }

    pub fn psi(&self) -> (u64, u64) {
        (self.psi_min, self.psi_max)
    }

    pub fn threshold(&self) -> u32 {
        self.threshold
    }

    pub fn twists(&self) -> &[i64] {
        &self.twists
    }

    /// Canonical one-line description; hashing it (together with the
    /// counting scheme, chunk size, and form table) identifies a search
    /// for checkpoint-resume purposes.
    pub fn descriptor(&self) -> String {
        let letters: String = self.letters.iter().map(|l| l.symbol()).collect();
        let twists = self
            .twists
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join(",");
        format!(
            "letters={letters} phi={}..{} psi={}..{} threshold={} twists={twists}",
            self.phi_min, self.phi_max, self.psi_min, self.psi_max, self.threshold
        )
    }

    /// The deterministic candidate stream for this range.
    pub fn enumerator(&self) -> Enumerator {
        Enumerator {
            letters: self.letters.clone(),
            phi_max: self.phi_max as usize,
            psi_min: self.psi_min,
            psi_max: self.psi_max,
            k: self.phi_min as usize,
            comb: Vec::new(),
            ranks: Vec::new(),
            state: EnumState::Fresh,
        }
    }

    /// Exactly how many vectors [`Enumerator`] will yield.
    ///
    /// With `m` letters, support size `k` contributes
    /// `C(m,k) · 2^{k−1} · Σ_s C(s−1, k−1)` vectors, where `s` runs over
    /// the Ψ window — compositions of `s` into `k` positive parts times
    /// the sign choices of the non-leading positions. The inner sum
    /// telescopes to `C(Ψmax, k) − C(lo−1, k)` with `lo = max(k, Ψmin)`.
    pub fn cardinality(&self) -> BigUint {
        let m = self.letters.len() as u64;
        let mut total = BigUint::zero();
        for k in self.phi_min as u64..=self.phi_max as u64 {
            let lo = k.max(self.psi_min);
            if lo > self.psi_max {
                continue;
            }
            let tuples = binomial(self.psi_max, k) - binomial(lo - 1, k);
            let signs = BigUint::from(1u32) << (k - 1) as usize;
            total += binomial(m, k) * signs * tuples;
        }
        total
    }
}

/// Names accepted by [`SearchRange::preset`].
pub const PRESET_NAMES: [&str; 9] = [
    "paper-phi2",
    "paper-phi3",
    "paper-phi4",
    "paper-phi5",
    "paper-phi6",
    "paper-phi7",
    "paper-phi8plus",
    "paper-bruch",
    "paper-brucwega",
];

/// Parses a letter subset such as `BRUCH` (either case).
pub fn parse_letters(s: &str) -> Result<Vec<Letter>> {
    let mut out = Vec::new();
    for c in s.chars() {
        let l = Letter::from_symbol(c)
            .ok_or_else(|| Error::BadRange(format!("unknown letter {c:?} in subset {s:?}")))?;
        out.push(l);
    }
    Ok(out)
}

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut r = BigUint::from(1u32);
    for i in 1..=k {
        // Exact at every step: i consecutive integers contain an i-fold.
        r = r * BigUint::from(n - k + i) / BigUint::from(i);
    }
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EnumState {
    Fresh,
    Running,
    Done,
}

/// Deterministic stream over a [`SearchRange`] (see the module docs for
/// the order). `Iterator::next` yields each vector exactly once.
#[derive(Debug, Clone)]
pub struct Enumerator {
    letters: Vec<Letter>,
    phi_max: usize,
    psi_min: u64,
    psi_max: u64,
    k: usize,
    comb: Vec<usize>,
    ranks: Vec<u64>,
    state: EnumState,
}

/// Coefficient value at `rank` for a support position: the leading
/// position counts `1, 2, 3, …`, later positions `1, −1, 2, −2, …`.
fn rank_value(pos: usize, rank: u64) -> i64 {
    if pos == 0 {
        (rank + 1) as i64
    } else if rank % 2 == 0 {
        (rank / 2 + 1) as i64
    } else {
        -((rank / 2 + 1) as i64)
    }
}

fn rank_abs(pos: usize, rank: u64) -> u64 {
    if pos == 0 {
        rank + 1
    } else {
        rank / 2 + 1
    }
}

impl Enumerator {
    /// Enters support size `k` at its first combination and tuple.
    /// Returns false when no support size ≤ `phi_max` can fit `psi_max`.
    fn enter_k(&mut self) -> bool {
        // Minimal Ψ for k nonzero coefficients is k, and it only grows
        // with k, so the first failure ends the whole enumeration.
        if self.k > self.phi_max || self.k as u64 > self.psi_max {
            self.state = EnumState::Done;
            return false;
        }
        self.comb = (0..self.k).collect();
        self.ranks = vec![0; self.k];
        true
    }

    /// Advances the coefficient odometer within the current support.
    fn advance_ranks(&mut self) -> bool {
        let k = self.comb.len();
        for i in (0..k).rev() {
            let prefix: u64 = (0..i).map(|j| rank_abs(j, self.ranks[j])).sum();
            let next = self.ranks[i] + 1;
            // Positions after i restart at |c| = 1 each.
            let need = prefix + rank_abs(i, next) + (k - 1 - i) as u64;
            if need <= self.psi_max {
                self.ranks[i] = next;
                for r in &mut self.ranks[i + 1..] {
                    *r = 0;
                }
                return true;
            }
            // |value| is nondecreasing in rank, so carry immediately.
        }
        false
    }

    /// Advances to the next k-combination of letter indices.
    fn advance_comb(&mut self) -> bool {
        let m = self.letters.len();
        let k = self.comb.len();
        let mut i = k as isize - 1;
        while i >= 0 && self.comb[i as usize] == m - k + i as usize {
            i -= 1;
        }
        if i < 0 {
            return false;
        }
        let i = i as usize;
        self.comb[i] += 1;
        for j in i + 1..k {
            self.comb[j] = self.comb[j - 1] + 1;
        }
        self.ranks = vec![0; k];
        true
    }

    /// Steps to the next raw candidate, ignoring the Ψ lower bound.
    fn advance_raw(&mut self) -> bool {
        match self.state {
            EnumState::Done => false,
            EnumState::Fresh => {
                self.state = EnumState::Running;
                self.enter_k()
            }
            EnumState::Running => {
                if self.advance_ranks() || self.advance_comb() {
                    return true;
                }
                self.k += 1;
                self.enter_k()
            }
        }
    }

    fn current(&self) -> (Octic, u64) {
        let mut v = Octic::ZERO;
        let mut psi = 0;
        for (pos, &ci) in self.comb.iter().enumerate() {
            v.set(self.letters[ci], rank_value(pos, self.ranks[pos]));
            psi += rank_abs(pos, self.ranks[pos]);
        }
        (v, psi)
    }

    /// Discards the next `n` vectors (used to resume from a checkpoint).
    /// Unlike [`Iterator::skip`], this advances in place.
    pub fn skip_candidates(&mut self, n: u64) {
        for _ in 0..n {
            if self.next().is_none() {
                break;
            }
        }
    }
}

impl Iterator for Enumerator {
    type Item = Octic;

    fn next(&mut self) -> Option<Octic> {
        while self.advance_raw() {
            let (v, psi) = self.current();
            if psi >= self.psi_min {
                return Some(v);
            }
        }
        None
    }
}

/// Progress record for resuming an interrupted search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Checkpoint {
    /// Hash of the search identity (range, scheme, chunk size, forms).
    pub hash: String,
    /// Number of chunks fully processed and flushed.
    pub chunks_done: u64,
    /// Candidates examined so far.
    pub candidates: u64,
    /// Hits written so far.
    pub hits: u64,
    /// Length of the results file after the last flushed chunk.
    pub output_bytes: u64,
}

/// Atomically persists a checkpoint (write-temp-then-rename).
pub fn write_checkpoint(cp: &Checkpoint, path: &Path) -> Result<()> {
    let text = format!(
        "version=1\nhash={}\nchunks_done={}\ncandidates={}\nhits={}\noutput_bytes={}\n",
        cp.hash, cp.chunks_done, cp.candidates, cp.hits, cp.output_bytes
    );
    let tmp = path.with_extension("tmp");
    let ctx = || format!("writing checkpoint {}", path.display());
    std::fs::write(&tmp, text).map_err(|e| Error::io(ctx(), e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(ctx(), e))
}

/// Reads a checkpoint written by [`write_checkpoint`].
pub fn read_checkpoint(path: &Path) -> Result<Checkpoint> {
    let display = path.display().to_string();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(format!("reading checkpoint {display}"), e))?;
    let bad = |reason: String| Error::BadCheckpoint {
        path: display.clone(),
        reason,
    };
    let mut fields = std::collections::HashMap::new();
    for line in text.lines() {
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| bad(format!("malformed line {line:?}")))?;
        fields.insert(k.to_string(), v.to_string());
    }
    let get = |key: &str| {
        fields
            .get(key)
            .cloned()
            .ok_or_else(|| bad(format!("missing field {key}")))
    };
    if get("version")? != "1" {
        return Err(bad("unsupported version".into()));
    }
    let num = |key: &str| -> Result<u64> {
        get(key)?
            .parse()
            .map_err(|_| bad(format!("field {key} is not a number")))
    };
    Ok(Checkpoint {
        hash: get("hash")?,
        chunks_done: num("chunks_done")?,
        candidates: num("candidates")?,
        hits: num("hits")?,
        output_bytes: num("output_bytes")?,
    })
}

/// Digest of a form table's mathematical content (labels and
/// coefficients), independent of file formatting.
pub fn forms_digest(records: &[NewformRecord]) -> String {
    let mut h = Sha256::new();
    for r in records {
        h.update(r.label.as_bytes());
        h.update([0u8]);
        for a in r.ap {
            h.update(a.to_le_bytes());
        }
    }
    hex(&h.finalize())
}

fn hex(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        write!(s, "{b:02x}").unwrap();
    }
    s
}

fn run_hash(descriptor: &str, scheme: &str, chunk_size: usize, forms_digest: &str) -> String {
    let mut h = Sha256::new();
    h.update(descriptor.as_bytes());
    h.update([0u8]);
    h.update(scheme.as_bytes());
    h.update([0u8]);
    h.update(chunk_size.to_le_bytes());
    h.update(forms_digest.as_bytes());
    hex(&h.finalize())
}

/// Tuning knobs for [`run_search`]; none of them may change the output
/// bytes (`stop_after_chunks` truncates the run, but resuming completes
/// it to the identical file).
#[derive(Debug, Clone)]
pub struct SearchOptions {
    /// Worker thread count (≥ 1).
    pub threads: usize,
    /// Candidates per work chunk (≥ 1). Chunks are the units of
    /// checkpointing and of ordered output flushing.
    pub chunk_size: usize,
    /// Abandon a (form, twist) pair once it can no longer reach the
    /// threshold, and skip the remaining primes once every pair is dead.
    pub early_abort: bool,
    /// Stop handing out work after this many chunks (this run); used to
    /// exercise interruption and resume.
    pub stop_after_chunks: Option<u64>,
}

impl Default for SearchOptions {
    fn default() -> SearchOptions {
        SearchOptions {
            threads: 1,
            chunk_size: 1 << 16,
            early_abort: true,
            stop_after_chunks: None,
        }
    }
}

/// What a finished (or interrupted) run did.
#[derive(Debug, Clone)]
pub struct SearchSummary {
    /// Cumulative candidates examined, including previous resumed runs.
    pub candidates: u64,
    /// Cumulative hits written.
    pub hits: u64,
    /// Cumulative chunks flushed.
    pub chunks_done: u64,
    /// Candidates examined by this run alone.
    pub new_candidates: u64,
    /// Wall time of this run.
    pub elapsed: Duration,
    /// True when the range has been exhausted.
    pub complete: bool,
    /// True when this run picked up from an existing checkpoint.
    pub resumed: bool,
}

/// One results-file entry: a coefficient vector and its match.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hit {
    pub octic: Octic,
    pub result: MatchResult,
}

fn hit_line(hit: &Hit) -> String {
    let mut s = String::new();
    for c in hit.octic.coeffs() {
        write!(s, "{c} ").unwrap();
    }
    let m = &hit.result;
    write!(s, "{} {} {} ", m.label, m.twist, m.agree).unwrap();
    if m.disagree.is_empty() {
        s.push('-');
    } else {
        let primes: Vec<String> = m.disagree.iter().map(|p| p.to_string()).collect();
        s.push_str(&primes.join(","));
    }
    s.push('\n');
    s
}

/// Parses the non-comment lines of a results file back into hits.
pub fn parse_results(text: &str) -> Result<Vec<Hit>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |reason: String| Error::BadTableLine {
            path: "results".into(),
            line: lineno + 1,
            reason,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 19 {
            return Err(bad(format!("expected 19 fields, found {}", fields.len())));
        }
        let mut coeffs = [0i64; 15];
        for (i, f) in fields[..15].iter().enumerate() {
            coeffs[i] = f
                .parse()
                .map_err(|_| bad(format!("bad coefficient {f:?}")))?;
        }
        let label = fields[15].to_string();
        let twist: i64 = fields[16]
            .parse()
            .map_err(|_| bad(format!("bad twist {:?}", fields[16])))?;
        let agree: u32 = fields[17]
            .parse()
            .map_err(|_| bad(format!("bad agreement count {:?}", fields[17])))?;
        let disagree = if fields[18] == "-" {
            Vec::new()
        } else {
            fields[18]
                .split(',')
                .map(|p| p.parse().map_err(|_| bad(format!("bad prime {p:?}"))))
                .collect::<Result<Vec<u32>>>()?
        };
        let level = label
            .split('/')
            .next()
            .and_then(|l| l.parse().ok())
            .ok_or_else(|| bad(format!("bad label {label:?}")))?;
        out.push(Hit {
            octic: Octic::from_coeffs(coeffs),
            result: MatchResult {
                label,
                level,
                twist,
                agree,
                disagree,
            },
        });
    }
    Ok(out)
}

/// A (form, twist) pair with its precomputed target residues.
struct Pair<'a> {
    rec: &'a NewformRecord,
    d: i64,
    res: [u16; 25],
}

struct Producer {
    en: Enumerator,
    next_chunk: u64,
    handed: u64,
    exhausted: bool,
}

/// Runs the search, appending hits to `output` and checkpointing to
/// `checkpoint_path` (if given) at every chunk boundary. If the
/// checkpoint file already exists the run resumes behind it; a
/// checkpoint from a different search is refused.
pub fn run_search(
    range: &SearchRange,
    tables: &TableSet,
    forms: &[NewformRecord],
    output: &Path,
    checkpoint_path: Option<&Path>,
    opts: &SearchOptions,
) -> Result<SearchSummary> {
    if opts.threads == 0 {
        return Err(Error::BadRange("worker count must be at least 1".into()));
    }
    if opts.chunk_size == 0 {
        return Err(Error::BadRange("chunk size must be at least 1".into()));
    }
    let t0 = Instant::now();
    let descriptor = range.descriptor();
    let fdigest = forms_digest(forms);
    let hash = run_hash(
        &descriptor,
        tables.scheme().as_str(),
        opts.chunk_size,
        &fdigest,
    );
    let header = format!(
        "# octic search results v1\n# range: {descriptor}\n# scheme: {}\n# forms-sha256: {fdigest}\n",
        tables.scheme().as_str()
    );

    // Open the output and set up the starting position, resuming if a
    // matching checkpoint exists.
    let out_ctx = || format!("opening results file {}", output.display());
    let mut chunks_done = 0u64;
    let mut candidates = 0u64;
    let mut hits_total = 0u64;
    let mut output_bytes = header.len() as u64;
    let mut resumed = false;
    let mut file: File;
    match checkpoint_path {
        Some(cp_path) if cp_path.exists() => {
            let cp = read_checkpoint(cp_path)?;
            if cp.hash != hash {
                return Err(Error::BadCheckpoint {
                    path: cp_path.display().to_string(),
                    reason: "checkpoint belongs to a different search \
                             (range, scheme, chunk size, or form table changed)"
                        .into(),
                });
            }
            file = OpenOptions::new()
                .read(true)
                .write(true)
                .open(output)
                .map_err(|e| Error::io(out_ctx(), e))?;
            let len = file
                .metadata()
                .map_err(|e| Error::io(out_ctx(), e))?
                .len();
            if len < cp.output_bytes {
                return Err(Error::BadCheckpoint {
                    path: cp_path.display().to_string(),
                    reason: format!(
                        "results file has {len} bytes but the checkpoint expects {}",
                        cp.output_bytes
                    ),
                });
            }
            // Drop anything past the last fully flushed chunk.
            file.set_len(cp.output_bytes)
                .map_err(|e| Error::io(out_ctx(), e))?;
            file.seek(SeekFrom::End(0))
                .map_err(|e| Error::io(out_ctx(), e))?;
            chunks_done = cp.chunks_done;
            candidates = cp.candidates;
            hits_total = cp.hits;
            output_bytes = cp.output_bytes;
            resumed = true;
        }
        _ => {
            file = File::create(output).map_err(|e| Error::io(out_ctx(), e))?;
            file.write_all(header.as_bytes())
                .map_err(|e| Error::io(out_ctx(), e))?;
            file.flush().map_err(|e| Error::io(out_ctx(), e))?;
            if let Some(cp_path) = checkpoint_path {
                write_checkpoint(
                    &Checkpoint {
                        hash: hash.clone(),
                        chunks_done: 0,
                        candidates: 0,
                        hits: 0,
                        output_bytes,
                    },
                    cp_path,
                )?;
            }
        }
    }
    let start_candidates = candidates;

    // Precompute target residues for every (form, twist) pair.
    let pairs: Vec<Pair> = forms
        .iter()
        .flat_map(|rec| {
            range.twists().iter().map(move |&d| Pair {
                rec,
                d,
                res: twisted_residues(rec, d),
            })
        })
        .collect();
    let allowed_miss = 25 - range.threshold(); // dead above this

    let mut en = range.enumerator();
    en.skip_candidates(chunks_done * opts.chunk_size as u64);
    let producer = Mutex::new(Producer {
        en,
        next_chunk: chunks_done,
        handed: 0,
        exhausted: false,
    });

    type ChunkResult = (u64, usize, Vec<Hit>);
    let (tx, rx) = mpsc::channel::<ChunkResult>();

    let writer_result: Result<()> = std::thread::scope(|scope| {
        for _ in 0..opts.threads {
            let tx = tx.clone();
            let producer = &producer;
            let pairs = &pairs;
            scope.spawn(move || {
                let npairs = pairs.len();
                let mut miss = vec![0u8; npairs];
                let mut mask = vec![0u32; npairs];
                loop {
                    // Claim the next chunk.
                    let (idx, batch) = {
                        let mut p = producer.lock().expect("producer lock");
                        if p.exhausted {
                            break;
                        }
                        if let Some(limit) = opts.stop_after_chunks {
                            if p.handed >= limit {
                                break;
                            }
                        }
                        let mut batch = Vec::with_capacity(opts.chunk_size);
                        while batch.len() < opts.chunk_size {
                            match p.en.next() {
                                Some(v) => batch.push(v),
                                None => {
                                    p.exhausted = true;
                                    break;
                                }
                            }
                        }
                        if batch.is_empty() {
                            break;
                        }
                        let idx = p.next_chunk;
                        p.next_chunk += 1;
                        p.handed += 1;
                        (idx, batch)
                    };
                    let mut hits = Vec::new();
                    for v in &batch {
                        scan_candidate(
                            v,
                            tables,
                            pairs,
                            allowed_miss,
                            opts.early_abort,
                            &mut miss,
                            &mut mask,
                            &mut hits,
                        );
                    }
                    if tx.send((idx, batch.len(), hits)).is_err() {
                        break; // writer bailed out on an I/O error
                    }
                }
            });
        }
        drop(tx);

        // Single writer: flush chunks strictly in index order.
        let mut pending: BTreeMap<u64, (usize, Vec<Hit>)> = BTreeMap::new();
        let mut next_flush = chunks_done;
        for (idx, n, hits) in rx {
            pending.insert(idx, (n, hits));
            while let Some((n, hits)) = pending.remove(&next_flush) {
                let mut text = String::new();
                for h in &hits {
                    text.push_str(&hit_line(h));
                }
                let wctx = || format!("writing results to {}", output.display());
                file.write_all(text.as_bytes()).map_err(|e| Error::io(wctx(), e))?;
                file.flush().map_err(|e| Error::io(wctx(), e))?;
                file.sync_data().map_err(|e| Error::io(wctx(), e))?;
                output_bytes += text.len() as u64;
                candidates += n as u64;
                hits_total += hits.len() as u64;
                next_flush += 1;
                chunks_done = next_flush;
                if let Some(cp_path) = checkpoint_path {
                    write_checkpoint(
                        &Checkpoint {
                            hash: hash.clone(),
                            chunks_done,
                            candidates,
                            hits: hits_total,
                            output_bytes,
                        },
                        cp_path,
                    )?;
                }
            }
        }
        Ok(())
    });
    writer_result?;

    let complete = producer.into_inner().expect("producer lock").exhausted;
    Ok(SearchSummary {
        candidates,
        hits: hits_total,
        chunks_done,
        new_candidates: candidates - start_candidates,
        elapsed: t0.elapsed(),
        complete,
        resumed,
    })
}

/// Counts one candidate prime by prime and records every (form, twist)
/// pair that stays within the miss budget.
#[allow(clippy::too_many_arguments)]
fn scan_candidate(
    v: &Octic,
    tables: &TableSet,
    pairs: &[Pair],
    allowed_miss: u32,
    early_abort: bool,
    miss: &mut [u8],
    mask: &mut [u32],
    hits: &mut Vec<Hit>,
) {
    let npairs = pairs.len();
    miss.fill(0);
    mask.fill(0);
    let allowed = allowed_miss as u8;
    let mut dead = 0usize;
    for i in 0..25 {
        if early_abort && dead == npairs {
            break;
        }
        let c = tables.table(i).count(v);
        let p = PRIMES[i] as i64;
        let r = (1 - c as i64).rem_euclid(p) as u16;
        for j in 0..npairs {
            if miss[j] > allowed {
                continue;
            }
            if pairs[j].res[i] != r {
                mask[j] |= 1 << i;
                miss[j] += 1;
                if miss[j] > allowed {
                    dead += 1;
                }
            }
        }
    }
    let mut found: Vec<Hit> = Vec::new();
    for j in 0..npairs {
        if miss[j] > allowed {
            continue;
        }
        let disagree: Vec<u32> = (0..25)
            .filter(|i| mask[j] & (1 << i) != 0)
            .map(|i| PRIMES[i])
            .collect();
        found.push(Hit {
            octic: *v,
            result: MatchResult {
                label: pairs[j].rec.label.clone(),
                level: pairs[j].rec.level,
                twist: pairs[j].d,
                agree: 25 - miss[j] as u32,
                disagree,
            },
        });
    }
    found.sort_by(|a, b| a.result.order_key().cmp(&b.result.order_key()));
    hits.extend(found);
}
