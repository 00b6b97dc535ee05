//! Weight-4 newform coefficient records.
//!
//! A [`NewformRecord`] carries a label of the form `level/index` and the
//! 25 Hecke coefficients `a_p` for the primes 2 through 97. Records are
//! read from and written to a plain text format (one record per line,
//! `#` comments), validated against the weight-4 Hasse bound
//! `a_p² ≤ 4p³`.
//!
//! Quadratic twisting ([`twist`]) multiplies each `a_p` by the Kronecker
//! symbol `(d/p)`; the default twist set for searches is every fundamental
//! discriminant with `|d| ≤ 24` together with `±1`.
//!
//! For tests and self-contained experiments, [`eta_product_record`]
//! expands an eta product with integral leading exponent into its exact
//! q-expansion and reads off the prime coefficients — the two classic
//! weight-4 eta products (levels 6 and 8) provide ground-truth newforms
//! without any external data.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::field::{kronecker, PRIMES};

/// One newform: label `level/index` and the coefficients `a_p` for the 25
/// primes up to 97.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewformRecord {
    pub label: String,
    pub level: u32,
    pub ap: [i64; 25],
}

impl NewformRecord {
    /// Builds a record, deriving the level from the label and validating
    /// the Hasse bound.
    pub fn new(label: &str, ap: [i64; 25]) -> Result<NewformRecord> {
        let level = parse_level(label)?;
        let rec = NewformRecord {
            label: label.to_string(),
            level,
            ap,
        };
        rec.check_hasse()?;
        Ok(rec)
    }

    /// Verifies `a_p² ≤ 4p³` at every prime.
    pub fn check_hasse(&self) -> Result<()> {
        for (i, &p) in PRIMES.iter().enumerate() {
            let p = p as i128;
            let a = self.ap[i] as i128;
            if a * a > 4 * p * p * p {
                return Err(Error::BadNewform(format!(
                    "record {} violates the Hasse bound at p = {p}: a_p = {a}",
                    self.label
                )));
            }
        }
        Ok(())
    }
}

fn parse_level(label: &str) -> Result<u32> {
    let bad = || {
        Error::BadNewform(format!(
            "label {label:?} is not of the form level/index with a positive level"
        ))
    };
    let (level, _) = label.split_once('/').ok_or_else(bad)?;
    let level: u32 = level.parse().map_err(|_| bad())?;
    if level == 0 {
        return Err(bad());
    }
    Ok(level)
}

/// Reads a newform table: UTF-8 text, `#` to end of line is comment, each
/// record line is the label followed by exactly 25 signed integers.
pub fn load_table(path: &Path) -> Result<Vec<NewformRecord>> {
    let display = path.display().to_string();
    let text = fs::read_to_string(path)
        .map_err(|e| Error::io(format!("reading newform table {display}"), e))?;
    parse_table(&text, &display)
}

/// Parses table text; `source` names the input in error messages.
pub fn parse_table(text: &str, source: &str) -> Result<Vec<NewformRecord>> {
    let mut records = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |reason: String| Error::BadTableLine {
            path: source.to_string(),
            line: lineno + 1,
            reason,
        };
        let mut fields = line.split_whitespace();
        let label = fields.next().expect("nonempty line has a first field");
        let level = parse_level(label).map_err(|e| bad(e.to_string()))?;
        let mut ap = [0i64; 25];
        let mut n = 0usize;
        for f in fields {
            if n == 25 {
                return Err(bad(format!("more than 25 coefficients for {label}")));
            }
            ap[n] = i64::from_str(f).map_err(|_| bad(format!("bad integer {f:?}")))?;
            n += 1;
        }
        if n != 25 {
            return Err(bad(format!("expected 25 coefficients for {label}, found {n}")));
        }
        if !seen.insert(label.to_string()) {
            return Err(bad(format!("duplicate label {label}")));
        }
        let rec = NewformRecord {
            label: label.to_string(),
            level,
            ap,
        };
        rec.check_hasse().map_err(|e| bad(e.to_string()))?;
        records.push(rec);
    }
    Ok(records)
}

/// Writes records in the table format read by [`load_table`].
pub fn save_table(path: &Path, records: &[NewformRecord]) -> Result<()> {
    let mut out = String::new();
    out.push_str("# weight-4 newform coefficients a_p for the 25 primes 2..97\n");
    for r in records {
        write!(out, "{}", r.label).unwrap();
        for a in r.ap {
            write!(out, " {a}").unwrap();
        }
        out.push('\n');
    }
    fs::write(path, out)
        .map_err(|e| Error::io(format!("writing newform table {}", path.display()), e))
}

/// The quadratic twist by `d`: each `a_p` becomes `(d/p)·a_p`. For `d = 1`
/// this is the identity; otherwise the twist is noted in the label.
pub fn twist(record: &NewformRecord, d: i64) -> NewformRecord {
    if d == 1 {
        return record.clone();
    }
    let mut ap = record.ap;
    for (i, &p) in PRIMES.iter().enumerate() {
        ap[i] *= kronecker(d, p) as i64;
    }
    NewformRecord {
        label: format!("{}(d={d})", record.label),
        level: record.level,
        ap,
    }
}

/// True for fundamental discriminants: `d ≡ 1 (mod 4)` squarefree, or
/// `d = 4m` with `m ≡ 2, 3 (mod 4)` squarefree. 1 is counted as the
/// trivial discriminant.
pub fn is_fundamental_discriminant(d: i64) -> bool {
    fn squarefree(n: i64) -> bool {
        let n = n.abs();
        let mut k = 2i64;
        while k * k <= n {
            if n % (k * k) == 0 {
                return false;
            }
            k += 1;
        }
        true
    }
    if d == 1 {
        return true;
    }
    if d == 0 {
        return false;
    }
    if d.rem_euclid(4) == 1 {
        return squarefree(d);
    }
    if d % 4 == 0 {
        let m = d / 4;
        let r = m.rem_euclid(4);
        return (r == 2 || r == 3) && squarefree(m);
    }
    false
}

/// The default twist set: ±1 and every fundamental discriminant with
/// `|d| ≤ 24`, ordered by absolute value with the positive sign first.
pub fn default_twists() -> Vec<i64> {
    let mut out = vec![1, -1];
    for a in 2..=24i64 {
        for d in [a, -a] {
            if is_fundamental_discriminant(d) {
                out.push(d);
            }
        }
    }
    out
}

/// An eta product `Π_i η(m_i·τ)^{e_i}` with positive even exponents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EtaProductSpec {
    /// `(m, exponent)` pairs.
    pub factors: Vec<(u32, u32)>,
}

impl EtaProductSpec {
    /// Validates the weight-4 and integrality constraints.
    pub fn new(factors: Vec<(u32, u32)>) -> Result<EtaProductSpec> {
        if factors.is_empty() {
            return Err(Error::BadEtaSpec("no factors".into()));
        }
        for &(m, e) in &factors {
            if m == 0 {
                return Err(Error::BadEtaSpec("factor with m = 0".into()));
            }
            if e == 0 || e % 2 != 0 {
                return Err(Error::BadEtaSpec(format!(
                    "exponent {e} of η({m}τ) must be a positive even integer"
                )));
            }
        }
        let weight2: u32 = factors.iter().map(|&(_, e)| e).sum();
        if weight2 != 8 {
            return Err(Error::BadEtaSpec(format!(
                "weight is {}, need weight 4 (exponents summing to 8)",
                weight2 as f64 / 2.0
            )));
        }
        let lead: u32 = factors.iter().map(|&(m, e)| m * e).sum();
        if lead % 24 != 0 {
            return Err(Error::BadEtaSpec(format!(
                "Σ m·e = {lead} is not divisible by 24; the q-exponent is fractional"
            )));
        }
        Ok(EtaProductSpec { factors })
    }

    /// Parses `m:e` pairs separated by commas, e.g. `1:2,2:2,3:2,6:2`.
    pub fn parse(s: &str) -> Result<EtaProductSpec> {
        let mut factors = Vec::new();
        for part in s.split(',') {
            let part = part.trim();
            let (m, e) = part.split_once(':').ok_or_else(|| {
                Error::BadEtaSpec(format!("factor {part:?} is not of the form m:e"))
            })?;
            let m = m
                .trim()
                .parse()
                .map_err(|_| Error::BadEtaSpec(format!("bad multiplier {m:?}")))?;
            let e = e
                .trim()
                .parse()
                .map_err(|_| Error::BadEtaSpec(format!("bad exponent {e:?}")))?;
            factors.push((m, e));
        }
        EtaProductSpec::new(factors)
    }

    /// The leading q-exponent `Σ m·e / 24` of the expansion.
    pub fn leading_exponent(&self) -> u32 {
        self.factors.iter().map(|&(m, e)| m * e).sum::<u32>() / 24
    }

    /// The level: the smallest multiple `N` of every `m` such that
    /// `Σ (N/m_i)·e_i ≡ 0 (mod 24)`.
    pub fn level(&self) -> u32 {
        let lcm = self
            .factors
            .iter()
            .map(|&(m, _)| m)
            .fold(1u32, num_integer::lcm);
        let mut n = lcm;
        loop {
            let s: u32 = self.factors.iter().map(|&(m, e)| (n / m) * e).sum();
            if s % 24 == 0 {
                return n;
            }
            n += lcm;
        }
    }
}

/// Expands the eta product to precision `q^97` and reads off the 25
/// prime-indexed coefficients.
pub fn eta_product_ap(spec: &EtaProductSpec) -> [i64; 25] {
    let lead = spec.leading_exponent() as usize;
    // Relative series in q: product of (1 - q^{m·n})^e truncated at
    // degree 97 - lead. Coefficients stay far inside i64 at this length.
    let prec = 97usize.saturating_sub(lead);
    let mut c = vec![0i64; prec + 1];
    c[0] = 1;
    for &(m, e) in &spec.factors {
        for _ in 0..e {
            let mut n = m as usize;
            while n <= prec {
                // Multiply by (1 - q^n): descending so c[j - n] is still
                // the old value.
                for j in (n..=prec).rev() {
                    c[j] -= c[j - n];
                }
                n += m as usize;
            }
        }
    }
    let mut ap = [0i64; 25];
    for (i, &p) in PRIMES.iter().enumerate() {
        let idx = p as usize;
        ap[i] = if idx >= lead && idx - lead <= prec {
            c[idx - lead]
        } else {
            0
        };
    }
    ap
}

/// Builds a complete record (label `level/eta`) from an eta product.
pub fn eta_product_record(spec: &EtaProductSpec) -> Result<NewformRecord> {
    let level = spec.level();
    NewformRecord::new(&format!("{level}/eta"), eta_product_ap(spec))
}
