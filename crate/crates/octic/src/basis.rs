//! The 15-letter basis for symmetric octics in four variables.
//!
//! A degree-8 polynomial in `x, y, z, t` that is invariant under all
//! permutations of the variables is a polynomial in the elementary symmetric
//! functions `e1, e2, e3, e4`. The degree-8 monomials `e4^a4 e3^a3 e2^a2
//! e1^a1` (with `4·a4 + 3·a3 + 2·a2 + a1 = 8`) form a basis of that space;
//! there are exactly 15 of them, and they are named by the letters
//! `B R U C H W E G S T A D I O N`, in decreasing lexicographic order of
//! the exponent tuple `(a4, a3, a2, a1)`.
//!
//! An [`Octic`] is an integer coefficient vector over this basis. Evaluating
//! one at a projective point reduces to computing the four elementary
//! symmetric values and taking a 15-term dot product — the
//! [`monomial_key`] of a point is the vector of all 15 basis monomials at
//! once, which is also the grouping key for the aggregate count tables.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::field::PrimeField;

/// Names of the 15 degree-8 monomials in `e1..e4`, in basis order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum Letter {
    B = 0,
    R,
    U,
    C,
    H,
    W,
    E,
    G,
    S,
    T,
    A,
    D,
    I,
    O,
    N,
}

/// Exponent tuples `(a4, a3, a2, a1)` for the 15 letters, in basis order.
/// `4·a4 + 3·a3 + 2·a2 + a1 = 8` for each row.
const EXPONENTS: [[u8; 4]; 15] = [
    [2, 0, 0, 0], // B = e4²
    [1, 1, 0, 1], // R = e4 e3 e1
    [1, 0, 2, 0], // U = e4 e2²
    [1, 0, 1, 2], // C = e4 e2 e1²
    [1, 0, 0, 4], // H = e4 e1⁴
    [0, 2, 1, 0], // W = e3² e2
    [0, 2, 0, 2], // E = e3² e1²
    [0, 1, 2, 1], // G = e3 e2² e1
    [0, 1, 1, 3], // S = e3 e2 e1³
    [0, 1, 0, 5], // T = e3 e1⁵
    [0, 0, 4, 0], // A = e2⁴
    [0, 0, 3, 2], // D = e2³ e1²
    [0, 0, 2, 4], // I = e2² e1⁴
    [0, 0, 1, 6], // O = e2 e1⁶
    [0, 0, 0, 8], // N = e1⁸
];

const SYMBOLS: [char; 15] = [
    'B', 'R', 'U', 'C', 'H', 'W', 'E', 'G', 'S', 'T', 'A', 'D', 'I', 'O', 'N',
];

impl Letter {
    /// All 15 letters in basis order.
    pub const ALL: [Letter; 15] = [
        Letter::B,
        Letter::R,
        Letter::U,
        Letter::C,
        Letter::H,
        Letter::W,
        Letter::E,
        Letter::G,
        Letter::S,
        Letter::T,
        Letter::A,
        Letter::D,
        Letter::I,
        Letter::O,
        Letter::N,
    ];

    /// Position in the basis order (0 for B through 14 for N).
    pub fn index(self) -> usize {
        self as usize
    }

    /// Inverse of [`Letter::index`].
    pub fn from_index(i: usize) -> Option<Letter> {
        Letter::ALL.get(i).copied()
    }

    /// Upper-case letter name.
    pub fn symbol(self) -> char {
        SYMBOLS[self.index()]
    }

    /// Parses a letter name, accepting either case.
    pub fn from_symbol(c: char) -> Option<Letter> {
        let u = c.to_ascii_uppercase();
        SYMBOLS
            .iter()
            .position(|&s| s == u)
            .map(|i| Letter::ALL[i])
    }

    /// Exponents `(a4, a3, a2, a1)` of `e4, e3, e2, e1` in this monomial.
    pub fn exponents(self) -> [u8; 4] {
        EXPONENTS[self.index()]
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// An integer coefficient vector over the 15-letter basis: the symmetric
/// octic `Σ c_L · L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Octic {
    c: [i64; 15],
}

impl Octic {
    /// The zero vector. Note that most operations reject it as a branch
    /// locus (see [`Error::DegenerateOctic`]).
    pub const ZERO: Octic = Octic { c: [0; 15] };

    /// Builds an octic from the raw coefficient array in basis order.
    pub fn from_coeffs(c: [i64; 15]) -> Octic {
        Octic { c }
    }

    /// Builds an octic from letter/value pairs; later pairs overwrite
    /// earlier ones.
    pub fn from_pairs(pairs: &[(Letter, i64)]) -> Octic {
        let mut o = Octic::ZERO;
        for &(l, v) in pairs {
            o.c[l.index()] = v;
        }
        o
    }

    /// Coefficient of one letter.
    pub fn get(&self, l: Letter) -> i64 {
        self.c[l.index()]
    }

    /// Sets the coefficient of one letter.
    pub fn set(&mut self, l: Letter, v: i64) {
        self.c[l.index()] = v;
    }

    /// The raw coefficient array in basis order.
    pub fn coeffs(&self) -> &[i64; 15] {
        &self.c
    }

    /// True if every coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&v| v == 0)
    }

    /// Support size Φ: the number of nonzero coefficients.
    pub fn phi(&self) -> u32 {
        self.c.iter().filter(|&&v| v != 0).count() as u32
    }

    /// Coefficient weight Ψ: the sum of absolute values, saturating at
    /// `u64::MAX`.
    pub fn psi(&self) -> u64 {
        let total: u128 = self.c.iter().map(|&v| v.unsigned_abs() as u128).sum();
        u64::try_from(total).unwrap_or(u64::MAX)
    }

    /// The letters with nonzero coefficient, in basis order.
    pub fn support(&self) -> Vec<Letter> {
        Letter::ALL
            .iter()
            .copied()
            .filter(|l| self.get(*l) != 0)
            .collect()
    }
}

impl fmt::Display for Octic {
    /// Formats as `b=1,r=-2` (letters in basis order, zero coefficients
    /// omitted), or `0` for the zero vector. The output round-trips through
    /// [`Octic::from_str`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for l in Letter::ALL {
            let v = self.get(l);
            if v != 0 {
                if !first {
                    write!(f, ",")?;
                }
                write!(f, "{}={}", l.symbol().to_ascii_lowercase(), v)?;
                first = false;
            }
        }
        Ok(())
    }
}

impl FromStr for Octic {
    type Err = Error;

    /// Parses `b=1,r=-2`-style coefficient strings. Whitespace around
    /// tokens is ignored; letters may be upper or lower case; each letter
    /// may appear at most once. The single token `0` denotes the zero
    /// vector.
    fn from_str(s: &str) -> Result<Octic> {
        let bad = |reason: &str| Error::BadCoefficients {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let trimmed = s.trim();
        if trimmed == "0" {
            return Ok(Octic::ZERO);
        }
        if trimmed.is_empty() {
            return Err(bad("empty string"));
        }
        let mut o = Octic::ZERO;
        let mut seen = [false; 15];
        for part in trimmed.split(',') {
            let part = part.trim();
            let (name, value) = part
                .split_once('=')
                .ok_or_else(|| bad(&format!("token {part:?} is not of the form letter=value")))?;
            let name = name.trim();
            let mut chars = name.chars();
            let letter = match (chars.next(), chars.next()) {
                (Some(c), None) => Letter::from_symbol(c)
                    .ok_or_else(|| bad(&format!("unknown letter {name:?}")))?,
                _ => return Err(bad(&format!("unknown letter {name:?}"))),
            };
            if seen[letter.index()] {
                return Err(bad(&format!("duplicate letter {name:?}")));
            }
            seen[letter.index()] = true;
            let v: i64 = value
                .trim()
                .parse()
                .map_err(|_| bad(&format!("bad integer {:?}", value.trim())))?;
            o.set(letter, v);
        }
        Ok(o)
    }
}

/// Elementary symmetric values `(e1, e2, e3, e4)` of a point, mod `p`.
pub fn elem_sym(pt: [u16; 4], p: u32) -> [u16; 4] {
    let p = p as u64;
    let [x, y, z, t] = pt.map(|c| c as u64 % p);
    // Coordinates are < 97, so none of these sums comes near overflowing u64.
    let e1 = (x + y + z + t) % p;
    let e2 = (x * y + x * z + x * t + y * z + y * t + z * t) % p;
    let e3 = (x * y * z + x * y * t + x * z * t + y * z * t) % p;
    let e4 = x * y * z * t % p;
    [e1 as u16, e2 as u16, e3 as u16, e4 as u16]
}

/// Grouping key of a point: the values of all 15 basis monomials mod `p`,
/// in basis order, computed from the elementary symmetric values.
pub type MonomialKey = [u16; 15];

/// Computes the 15 basis monomial values from `(e1, e2, e3, e4)` mod `p`.
pub fn monomial_key(es: [u16; 4], p: u32) -> MonomialKey {
    let p = p as u64;
    let [e1, e2, e3, e4] = es.map(|e| e as u64);
    // Power tables: e1 up to the 8th power, e2 up to the 4th, e3 and e4
    // squared.
    let mut p1 = [1u64; 9];
    for i in 1..9 {
        p1[i] = p1[i - 1] * e1 % p;
    }
    let mut p2 = [1u64; 5];
    for i in 1..5 {
        p2[i] = p2[i - 1] * e2 % p;
    }
    let p3 = [1, e3 % p, e3 * e3 % p];
    let p4 = [1, e4 % p, e4 * e4 % p];
    let mut key = [0u16; 15];
    for (i, exp) in EXPONENTS.iter().enumerate() {
        let [a4, a3, a2, a1] = *exp;
        key[i] =
            (p4[a4 as usize] * p3[a3 as usize] % p * p2[a2 as usize] % p * p1[a1 as usize] % p)
                as u16;
    }
    key
}

/// Evaluates the octic at a projective point, returning the least
/// nonnegative residue. Rejects the zero vector.
pub fn evaluate_octic(v: &Octic, pt: [u16; 4], field: &PrimeField) -> Result<u16> {
    if v.is_zero() {
        return Err(Error::DegenerateOctic);
    }
    let p = field.prime();
    let key = monomial_key(elem_sym(pt, p), p);
    Ok(dot_mod(v, &key, p))
}

/// Dot product of a coefficient vector with a monomial key, mod `p`.
pub(crate) fn dot_mod(v: &Octic, key: &MonomialKey, p: u32) -> u16 {
    let p = p as u64;
    let mut acc = 0u64;
    for i in 0..15 {
        let c = (v.c[i].rem_euclid(p as i64)) as u64;
        acc = (acc + c * key[i] as u64) % p;
    }
    acc as u16
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn letters_are_exactly_the_degree8_monomials() {
        // Enumerate all solutions of 4a4 + 3a3 + 2a2 + a1 = 8 in descending
        // lexicographic order and compare with the table.
        let mut expected = Vec::new();
        for a4 in (0..=2).rev() {
            for a3 in (0..=2).rev() {
                for a2 in (0..=4).rev() {
                    let rest = 8i32 - 4 * a4 - 3 * a3 - 2 * a2;
                    if rest >= 0 {
                        expected.push([a4 as u8, a3 as u8, a2 as u8, rest as u8]);
                    }
                }
            }
        }
        assert_eq!(expected.len(), 15);
        for (i, l) in Letter::ALL.iter().enumerate() {
            assert_eq!(l.exponents(), expected[i], "letter {l}");
            let [a4, a3, a2, a1] = l.exponents().map(|e| e as u32);
            assert_eq!(4 * a4 + 3 * a3 + 2 * a2 + a1, 8);
        }
    }

    #[test]
    fn letter_symbols_spell_the_basis_order() {
        let s: String = Letter::ALL.iter().map(|l| l.symbol()).collect();
        assert_eq!(s, "BRUCHWEGSTADION");
        for l in Letter::ALL {
            assert_eq!(Letter::from_symbol(l.symbol()), Some(l));
            assert_eq!(Letter::from_symbol(l.symbol().to_ascii_lowercase()), Some(l));
            assert_eq!(Letter::from_index(l.index()), Some(l));
        }
        assert_eq!(Letter::from_symbol('x'), None);
        assert_eq!(Letter::from_index(15), None);
    }

    #[test]
    fn parse_and_display_round_trip() {
        let v: Octic = "b=1,r=-2".parse().unwrap();
        assert_eq!(v.get(Letter::B), 1);
        assert_eq!(v.get(Letter::R), -2);
        assert_eq!(v.phi(), 2);
        assert_eq!(v.psi(), 3);
        assert_eq!(v.to_string(), "b=1,r=-2");
        assert_eq!(v.to_string().parse::<Octic>().unwrap(), v);

        let zero: Octic = "0".parse().unwrap();
        assert!(zero.is_zero());
        assert_eq!(zero.to_string(), "0");

        // Case-insensitive, whitespace-tolerant.
        let w: Octic = " N = 3 , a=-1 ".parse().unwrap();
        assert_eq!(w.get(Letter::N), 3);
        assert_eq!(w.get(Letter::A), -1);
        assert_eq!(w.to_string(), "a=-1,n=3");
    }

    #[test]
    fn parse_rejects_malformed_input() {
        assert!("".parse::<Octic>().is_err());
        assert!("b".parse::<Octic>().is_err());
        assert!("q=1".parse::<Octic>().is_err());
        assert!("bb=1".parse::<Octic>().is_err());
        assert!("b=x".parse::<Octic>().is_err());
        assert!("b=1,b=2".parse::<Octic>().is_err());
        assert!("b=1,,r=2".parse::<Octic>().is_err());
    }

    #[test]
    fn support_and_weights() {
        let v = Octic::from_pairs(&[(Letter::B, 2), (Letter::H, -3), (Letter::N, 1)]);
        assert_eq!(v.support(), vec![Letter::B, Letter::H, Letter::N]);
        assert_eq!(v.phi(), 3);
        assert_eq!(v.psi(), 6);
        assert!(!v.is_zero());
        assert!(Octic::ZERO.is_zero());
        assert_eq!(Octic::ZERO.phi(), 0);
        assert_eq!(Octic::ZERO.psi(), 0);
    }

    #[test]
    fn elem_sym_sample() {
        // (1,2,3,4) mod 7: e1 = 10 ≡ 3, e2 = 35 ≡ 0, e3 = 50 ≡ 1, e4 = 24 ≡ 3.
        assert_eq!(elem_sym([1, 2, 3, 4], 7), [3, 0, 1, 3]);
        assert_eq!(elem_sym([0, 0, 0, 1], 5), [1, 0, 0, 0]);
        assert_eq!(elem_sym([1, 1, 1, 1], 3), [1, 0, 1, 1]);
    }

    #[test]
    fn monomial_key_matches_direct_powers() {
        // Check against a direct (slow) computation over a few primes and
        // points.
        for &p in &[3u32, 7, 13, 97] {
            let field = PrimeField::new(p).unwrap();
            for pt in field.points().step_by(17) {
                let es = elem_sym(pt, p);
                let key = monomial_key(es, p);
                for l in Letter::ALL {
                    let [a4, a3, a2, a1] = l.exponents();
                    let mut v = 1u64;
                    for _ in 0..a4 {
                        v = v * es[3] as u64 % p as u64;
                    }
                    for _ in 0..a3 {
                        v = v * es[2] as u64 % p as u64;
                    }
                    for _ in 0..a2 {
                        v = v * es[1] as u64 % p as u64;
                    }
                    for _ in 0..a1 {
                        v = v * es[0] as u64 % p as u64;
                    }
                    assert_eq!(key[l.index()] as u64, v, "p={p} pt={pt:?} letter={l}");
                }
            }
        }
    }

    #[test]
    fn evaluate_rejects_zero_vector() {
        let field = PrimeField::new(5).unwrap();
        assert!(matches!(
            evaluate_octic(&Octic::ZERO, [1, 0, 0, 0], &field),
            Err(Error::DegenerateOctic)
        ));
    }

    #[test]
    fn evaluate_b_only_is_e4_squared() {
        let field = PrimeField::new(7).unwrap();
        let b = Octic::from_pairs(&[(Letter::B, 1)]);
        // At (1,2,3,4): e4 = 24 ≡ 3, so B = 9 ≡ 2.
        assert_eq!(evaluate_octic(&b, [1, 2, 3, 4], &field).unwrap(), 2);
        // Any point with a zero coordinate kills e4.
        assert_eq!(evaluate_octic(&b, [0, 1, 2, 3], &field).unwrap(), 0);
    }

    #[test]
    fn negative_coefficients_reduce_correctly() {
        let field = PrimeField::new(5).unwrap();
        let v = Octic::from_pairs(&[(Letter::N, -1)]);
        // N = e1^8; at (1,1,1,1): e1 = 4, e1^8 = 65536 ≡ 1 (mod 5), so -N ≡ 4.
        assert_eq!(evaluate_octic(&v, [1, 1, 1, 1], &field).unwrap(), 4);
    }
}
