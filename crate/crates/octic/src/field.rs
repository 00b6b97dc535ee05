//! Prime-field arithmetic for the 25 primes up to 97.
//!
//! Point counting on a double cover `u² = f` only needs to know, for each
//! residue `r = f(P)`, how many points lie above `P`: one if `r = 0`, two if
//! `r` is a nonzero square, zero otherwise. [`PrimeField`] precomputes that
//! weight for every residue, alongside a Legendre-symbol table. For `p = 2`
//! the cover is counted by the convention that every base point carries
//! exactly one point, so the weight table is identically 1 there.
//!
//! The module also provides the Kronecker symbol (which, unlike the
//! Legendre symbol, is defined at 2) and an iterator over canonical
//! representatives of projective 3-space in a fixed deterministic order.

use crate::error::{Error, Result};

/// The 25 primes over which counts are taken, in increasing order.
pub const PRIMES: [u32; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

/// Position of `p` in [`PRIMES`], if it is one of the supported primes.
pub fn prime_index(p: u32) -> Option<usize> {
    PRIMES.iter().position(|&q| q == p)
}

/// Number of points of projective 3-space over the field with `p` elements.
pub fn projective_size(p: u32) -> u64 {
    let p = p as u64;
    p * p * p + p * p + p + 1
}

/// Lookup tables for one supported prime.
#[derive(Debug, Clone)]
pub struct PrimeField {
    p: u32,
    /// `w[r]` = number of points of the double cover above a base point
    /// where the branch octic evaluates to `r`.
    w: Vec<u8>,
    /// `legendre[r]` for odd `p`: 0, 1 or -1 (stored as 2 for -1 to keep
    /// the table unsigned; use [`PrimeField::legendre`]).
    squares: Vec<bool>,
}

impl PrimeField {
    /// Builds the tables for `p`, which must be one of the 25 supported
    /// primes.
    pub fn new(p: u32) -> Result<Self> {
        if prime_index(p).is_none() {
            return Err(Error::UnsupportedPrime(p));
        }
        let n = p as usize;
        let mut squares = vec![false; n];
        for a in 1..p {
            squares[(a as u64 * a as u64 % p as u64) as usize] = true;
        }
        let w = if p == 2 {
            // Convention: over F_2 every base point lifts to exactly one
            // point, giving the constant count 15.
            vec![1u8; n]
        } else {
            (0..n)
                .map(|r| {
                    if r == 0 {
                        1
                    } else if squares[r] {
                        2
                    } else {
                        0
                    }
                })
                .collect()
        };
        Ok(PrimeField { p, w, squares })
    }

    /// The prime this table belongs to.
    pub fn prime(&self) -> u32 {
        self.p
    }

    /// Fiber size of the double cover above a point with branch value `r`.
    pub fn weight(&self, r: u16) -> u8 {
        self.w[r as usize]
    }

    /// Legendre symbol `(a / p)` for odd `p`. Rejects `p = 2`.
    pub fn legendre(&self, a: i64) -> Result<i8> {
        if self.p == 2 {
            return Err(Error::EvenCharacteristic);
        }
        let r = a.rem_euclid(self.p as i64) as usize;
        Ok(if r == 0 {
            0
        } else if self.squares[r] {
            1
        } else {
            -1
        })
    }

    /// Least nonnegative residue of `a` modulo `p`.
    pub fn reduce(&self, a: i64) -> u16 {
        a.rem_euclid(self.p as i64) as u16
    }

    /// Modular inverse of nonzero `a`, by Fermat's little theorem.
    pub fn inverse(&self, a: u16) -> u16 {
        debug_assert!(a != 0 && (a as u32) < self.p);
        pow_mod(a as u64, self.p as u64 - 2, self.p as u64) as u16
    }

    /// Iterator over canonical representatives of the points of projective
    /// 3-space, in the fixed enumeration order (see [`ProjectivePoints`]).
    pub fn points(&self) -> ProjectivePoints {
        ProjectivePoints::new(self.p)
    }
}

/// `b^e mod m` by square-and-multiply.
pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// Kronecker symbol `(d / p)` for a prime `p`.
///
/// For odd `p` this is the Legendre symbol of `d mod p`; for `p = 2` it is
/// 0 for even `d`, +1 for `d ≡ ±1 (mod 8)` and -1 for `d ≡ ±3 (mod 8)`.
pub fn kronecker(d: i64, p: u32) -> i8 {
    if p == 2 {
        return match d.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0,
        };
    }
    let r = d.rem_euclid(p as i64) as u64;
    if r == 0 {
        return 0;
    }
    // Euler's criterion.
    if pow_mod(r, (p as u64 - 1) / 2, p as u64) == 1 {
        1
    } else {
        -1
    }
}

/// Canonical representatives of projective 3-space over the field with `p`
/// elements.
///
/// Each projective point is represented by the unique scaling whose first
/// nonzero coordinate equals 1, and points are produced in lexicographic
/// order of the coordinate tuple `(x, y, z, t)`:
/// first `(0,0,0,1)`, then `(0,0,1,t)`, then `(0,1,z,t)`, then `(1,y,z,t)`,
/// with the free coordinates counting up from 0. The total number of points
/// is `p³ + p² + p + 1`.
#[derive(Debug, Clone)]
pub struct ProjectivePoints {
    p: u16,
    /// Which coordinate carries the leading 1: phase 0 is `(0,0,0,1)`,
    /// phase 3 is `(1,y,z,t)`. Phase 4 means exhausted.
    phase: u8,
    /// The coordinates after the leading 1; only `free[0..phase]` are used,
    /// with `free[0]` the most significant.
    free: [u16; 3],
    started: bool,
}

impl ProjectivePoints {
    fn new(p: u32) -> Self {
        ProjectivePoints {
            p: p as u16,
            phase: 0,
            free: [0; 3],
            started: false,
        }
    }
}

impl Iterator for ProjectivePoints {
    type Item = [u16; 4];

    fn next(&mut self) -> Option<[u16; 4]> {
        if self.phase > 3 {
            return None;
        }
        if self.started {
            // Advance the free coordinates as an odometer, least
            // significant digit last; on carry-out move to the next phase,
            // whose first point has all free coordinates zero.
            let width = self.phase as usize;
            let mut carried = true;
            for i in (0..width).rev() {
                if self.free[i] + 1 < self.p {
                    self.free[i] += 1;
                    for s in &mut self.free[i + 1..width] {
                        *s = 0;
                    }
                    carried = false;
                    break;
                }
            }
            if carried {
                self.phase += 1;
                self.free = [0; 3];
                if self.phase > 3 {
                    return None;
                }
            }
        }
        self.started = true;
        let mut pt = [0u16; 4];
        let lead = 3 - self.phase as usize;
        pt[lead] = 1;
        for k in 0..self.phase as usize {
            pt[lead + 1 + k] = self.free[k];
        }
        Some(pt)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_list_is_the_first_25_primes() {
        assert_eq!(PRIMES.len(), 25);
        assert_eq!(PRIMES[0], 2);
        assert_eq!(PRIMES[24], 97);
        // Each entry has no divisor between 2 and its square root.
        for &p in &PRIMES {
            assert!((2..p).take_while(|d| d * d <= p).all(|d| p % d != 0));
        }
        assert_eq!(prime_index(97), Some(24));
        assert_eq!(prime_index(4), None);
    }

    #[test]
    fn rejects_unsupported_primes() {
        assert!(matches!(
            PrimeField::new(101),
            Err(Error::UnsupportedPrime(101))
        ));
        assert!(matches!(PrimeField::new(1), Err(Error::UnsupportedPrime(1))));
    }

    #[test]
    fn weights_odd_prime() {
        let f = PrimeField::new(7).unwrap();
        // Squares mod 7 are {1, 2, 4}.
        assert_eq!(f.weight(0), 1);
        assert_eq!(f.weight(1), 2);
        assert_eq!(f.weight(2), 2);
        assert_eq!(f.weight(3), 0);
        assert_eq!(f.weight(4), 2);
        assert_eq!(f.weight(5), 0);
        assert_eq!(f.weight(6), 0);
        // Over all p residues the fiber sizes add up to p: one ramified
        // value, (p-1)/2 split values of size 2, (p-1)/2 inert values of
        // size 0.
        let total: u32 = (0..7).map(|r| f.weight(r) as u32).sum();
        assert_eq!(total, 7);
    }

    #[test]
    fn weights_p2_are_all_one() {
        let f = PrimeField::new(2).unwrap();
        assert_eq!(f.weight(0), 1);
        assert_eq!(f.weight(1), 1);
    }

    #[test]
    fn legendre_matches_euler() {
        for &p in &PRIMES[1..] {
            let f = PrimeField::new(p).unwrap();
            for a in 0..p as i64 {
                assert_eq!(f.legendre(a).unwrap(), kronecker(a, p), "p={p} a={a}");
            }
            // Negative inputs reduce correctly.
            assert_eq!(f.legendre(-1).unwrap(), f.legendre(p as i64 - 1).unwrap());
        }
    }

    #[test]
    fn legendre_rejects_two() {
        let f = PrimeField::new(2).unwrap();
        assert!(matches!(f.legendre(1), Err(Error::EvenCharacteristic)));
    }

    #[test]
    fn kronecker_at_two() {
        assert_eq!(kronecker(-4, 2), 0);
        assert_eq!(kronecker(-3, 2), -1);
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(1, 2), 1);
        assert_eq!(kronecker(-7, 2), 1); // -7 ≡ 1 (mod 8)
        assert_eq!(kronecker(17, 2), 1);
    }

    #[test]
    fn kronecker_sample_values() {
        assert_eq!(kronecker(-4, 5), 1); // -4 ≡ 1 mod 5
        assert_eq!(kronecker(-4, 7), -1); // -4 ≡ 3 mod 7, nonsquare
        assert_eq!(kronecker(0, 7), 0);
        assert_eq!(kronecker(14, 7), 0);
    }

    #[test]
    fn inverse_is_inverse() {
        for &p in &PRIMES[1..] {
            let f = PrimeField::new(p).unwrap();
            for a in 1..p as u16 {
                let inv = f.inverse(a);
                assert_eq!(a as u64 * inv as u64 % p as u64, 1);
            }
        }
    }

    #[test]
    fn projective_enumeration_count_and_canonical_form() {
        for &p in &[2u32, 3, 5, 7, 11] {
            let f = PrimeField::new(p).unwrap();
            let pts: Vec<_> = f.points().collect();
            assert_eq!(pts.len() as u64, projective_size(p));
            for pt in &pts {
                // First nonzero coordinate is exactly 1.
                let lead = pt.iter().position(|&c| c != 0).unwrap();
                assert_eq!(pt[lead], 1);
                assert!(pt.iter().all(|&c| (c as u32) < p));
            }
            // Strictly increasing in lexicographic order, hence duplicate-free.
            for w in pts.windows(2) {
                assert!(w[0] < w[1]);
            }
        }
    }

    #[test]
    fn projective_enumeration_small_case() {
        let f = PrimeField::new(2).unwrap();
        let pts: Vec<_> = f.points().collect();
        assert_eq!(pts.len(), 15);
        assert_eq!(pts[0], [0, 0, 0, 1]);
        assert_eq!(pts[1], [0, 0, 1, 0]);
        assert_eq!(pts[2], [0, 0, 1, 1]);
        assert_eq!(pts[3], [0, 1, 0, 0]);
        assert_eq!(pts[14], [1, 1, 1, 1]);
    }

    #[test]
    fn pow_mod_basics() {
        assert_eq!(pow_mod(2, 10, 1000), 24);
        assert_eq!(pow_mod(5, 0, 7), 1);
        assert_eq!(pow_mod(96, 96, 97), 1); // Fermat
    }
}
