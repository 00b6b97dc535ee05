//! Exact dense polynomial algebra in four variables.
//!
//! The transforms between equivalent branch octics (coordinate changes,
//! the squaring map, inversion) are defined by substitutions into honest
//! polynomials in `x, y, z, t`. This module implements the small amount of
//! multivariate algebra needed to perform and verify those substitutions
//! exactly: homogeneous polynomials with [`BigInt`] coefficients, dense
//! over the monomials of their degree.
//!
//! Monomials `x^a y^b z^c t^d` of a fixed total degree `n` are indexed by
//! the rank of `(a, b, c)` in lexicographic order over all triples with
//! `a + b + c ≤ n` (the exponent of `t` is implied). Degree-8 polynomials
//! have `C(11,3) = 165` coefficients.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Number of monomials of total degree `n` in four variables: `C(n+3, 3)`.
pub fn monomial_count(n: u32) -> usize {
    let n = n as usize;
    (n + 1) * (n + 2) * (n + 3) / 6
}

/// Rank of the exponent triple `(a, b, c)` (with `a + b + c ≤ n`) in
/// lexicographic order among all such triples.
fn rank(n: u32, a: u32, b: u32, c: u32) -> usize {
    debug_assert!(a + b + c <= n);
    let mut r = 0usize;
    // Triples with a smaller first coordinate.
    for a2 in 0..a {
        let m = (n - a2) as usize;
        r += (m + 1) * (m + 2) / 2;
    }
    // Same first coordinate, smaller second.
    for b2 in 0..b {
        r += (n - a - b2) as usize + 1;
    }
    r + c as usize
}

/// Inverse of [`rank`]: the exponents `[a, b, c, d]` of the monomial at
/// `index` within degree `n`.
fn unrank(n: u32, mut index: usize) -> [u32; 4] {
    for a in 0..=n {
        let block = {
            let m = (n - a) as usize;
            (m + 1) * (m + 2) / 2
        };
        if index >= block {
            index -= block;
            continue;
        }
        for b in 0..=(n - a) {
            let row = (n - a - b) as usize + 1;
            if index >= row {
                index -= row;
                continue;
            }
            let c = index as u32;
            return [a, b, c, n - a - b - c];
        }
    }
    unreachable!("index out of range for degree {n}");
}

/// A homogeneous polynomial in `x, y, z, t` with exact integer
/// coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymPoly {
    deg: u32,
    coeffs: Vec<BigInt>,
}

impl SymPoly {
    /// The zero polynomial of the given degree.
    pub fn zero(deg: u32) -> SymPoly {
        SymPoly {
            deg,
            coeffs: vec![BigInt::zero(); monomial_count(deg)],
        }
    }

    /// The constant polynomial 1 (degree 0).
    pub fn one() -> SymPoly {
        SymPoly {
            deg: 0,
            coeffs: vec![BigInt::one()],
        }
    }

    /// The variable with the given index (0 = x, 1 = y, 2 = z, 3 = t).
    pub fn variable(i: usize) -> SymPoly {
        assert!(i < 4);
        let mut exps = [0u32; 4];
        exps[i] = 1;
        SymPoly::monomial(exps, BigInt::one())
    }

    /// A single monomial with the given exponents and coefficient.
    pub fn monomial(exps: [u32; 4], coeff: BigInt) -> SymPoly {
        let deg = exps.iter().sum();
        let mut poly = SymPoly::zero(deg);
        poly.coeffs[rank(deg, exps[0], exps[1], exps[2])] = coeff;
        poly
    }

    /// Total degree.
    pub fn degree(&self) -> u32 {
        self.deg
    }

    /// True if all coefficients vanish.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Coefficient of `x^a y^b z^c t^d`; the exponents must sum to the
    /// degree.
    pub fn coeff(&self, exps: [u32; 4]) -> &BigInt {
        assert_eq!(exps.iter().sum::<u32>(), self.deg, "wrong total degree");
        &self.coeffs[rank(self.deg, exps[0], exps[1], exps[2])]
    }

    /// Coefficient by internal monomial rank; used by the basis solver.
    pub(crate) fn coeff_raw(&self, idx: usize) -> &BigInt {
        &self.coeffs[idx]
    }

    /// Iterates over `(exponents, coefficient)` pairs of the nonzero terms.
    pub fn terms(&self) -> impl Iterator<Item = ([u32; 4], &BigInt)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (unrank(self.deg, i), c))
    }

    /// Sum; both sides must have the same degree.
    pub fn add(&self, other: &SymPoly) -> SymPoly {
        assert_eq!(self.deg, other.deg, "degree mismatch in add");
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        SymPoly {
            deg: self.deg,
            coeffs,
        }
    }

    /// Difference; both sides must have the same degree.
    pub fn sub(&self, other: &SymPoly) -> SymPoly {
        assert_eq!(self.deg, other.deg, "degree mismatch in sub");
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        SymPoly {
            deg: self.deg,
            coeffs,
        }
    }

    /// Product with an integer scalar.
    pub fn scale(&self, k: &BigInt) -> SymPoly {
        SymPoly {
            deg: self.deg,
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    /// Polynomial product.
    pub fn mul(&self, other: &SymPoly) -> SymPoly {
        let deg = self.deg + other.deg;
        let mut coeffs = vec![BigInt::zero(); monomial_count(deg)];
        for (ea, ca) in self.terms() {
            for (eb, cb) in other.terms() {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3]];
                coeffs[rank(deg, e[0], e[1], e[2])] += ca * cb;
            }
        }
        SymPoly { deg, coeffs }
    }

    /// `self` raised to the `k`-th power.
    pub fn pow(&self, k: u32) -> SymPoly {
        let mut acc = SymPoly::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Substitutes `subs[i]` for variable `i`. All four substituted
    /// polynomials must be homogeneous of one common degree `k ≥ 1`; the
    /// result has degree `k·deg(self)`.
    pub fn substitute(&self, subs: &[SymPoly; 4]) -> SymPoly {
        let k = subs[0].deg;
        assert!(k >= 1, "substitution polynomials must have degree >= 1");
        assert!(
            subs.iter().all(|s| s.deg == k),
            "substitution polynomials must share one degree"
        );
        // Precompute powers of each substituted polynomial up to the
        // largest exponent that occurs.
        let mut powers: [Vec<SymPoly>; 4] =
            [Vec::new(), Vec::new(), Vec::new(), Vec::new()];
        for (i, sub) in subs.iter().enumerate() {
            let mut ps = vec![SymPoly::one()];
            for _ in 0..self.deg {
                let last = ps.last().unwrap();
                ps.push(last.mul(sub));
            }
            powers[i] = ps;
        }
        let mut acc = SymPoly::zero(k * self.deg);
        for (exps, coeff) in self.terms() {
            let mut term = SymPoly::one();
            for i in 0..4 {
                term = term.mul(&powers[i][exps[i] as usize]);
            }
            acc = acc.add(&term.scale(coeff));
        }
        acc
    }

    /// Substitutes the linear forms given by the rows-as-images matrix:
    /// variable `i` is replaced by `Σ_j m[i][j] · x_j`.
    pub fn substitute_linear(&self, m: &[[i64; 4]; 4]) -> SymPoly {
        let linear = |row: &[i64; 4]| {
            let mut l = SymPoly::zero(1);
            for (j, &c) in row.iter().enumerate() {
                l = l.add(&SymPoly::variable(j).scale(&BigInt::from(c)));
            }
            l
        };
        let subs = [
            linear(&m[0]),
            linear(&m[1]),
            linear(&m[2]),
            linear(&m[3]),
        ];
        self.substitute(&subs)
    }

    /// Applies a permutation of the variables: variable `i` becomes
    /// variable `perm[i]`.
    pub fn permute_vars(&self, perm: [usize; 4]) -> SymPoly {
        let mut out = SymPoly::zero(self.deg);
        for (exps, coeff) in self.terms() {
            let mut e = [0u32; 4];
            for i in 0..4 {
                e[perm[i]] = exps[i];
            }
            out.coeffs[rank(self.deg, e[0], e[1], e[2])] += coeff;
        }
        out
    }

    /// True if the polynomial is invariant under every permutation of the
    /// variables (checked on the two generators of the symmetric group).
    pub fn is_symmetric(&self) -> bool {
        let swap = self.permute_vars([1, 0, 2, 3]);
        let cycle = self.permute_vars([1, 2, 3, 0]);
        *self == swap && *self == cycle
    }

    /// Exact evaluation at an integer point.
    pub fn eval(&self, pt: [i64; 4]) -> BigInt {
        let pt = pt.map(BigInt::from);
        let mut acc = BigInt::zero();
        for (exps, coeff) in self.terms() {
            let mut term = coeff.clone();
            for i in 0..4 {
                for _ in 0..exps[i] {
                    term *= &pt[i];
                }
            }
            acc += term;
        }
        acc
    }

    /// Coefficients reduced to least nonnegative residues mod `p`, in
    /// monomial-rank order.
    pub fn coeffs_mod(&self, p: u32) -> Vec<u64> {
        let m = BigInt::from(p);
        self.coeffs
            .iter()
            .map(|c| {
                let mut r = c % &m;
                if r.is_negative() {
                    r += &m;
                }
                u64::try_from(r).expect("residue fits u64")
            })
            .collect()
    }

    /// Evaluation mod `p` using residues from [`SymPoly::coeffs_mod`].
    pub fn eval_mod(&self, reduced: &[u64], pt: [u16; 4], p: u32) -> u16 {
        let p = p as u64;
        // Power tables for the four coordinates, up to the full degree.
        let mut pw = vec![[1u64; 4]; self.deg as usize + 1];
        for e in 1..=self.deg as usize {
            for i in 0..4 {
                pw[e][i] = pw[e - 1][i] * (pt[i] as u64) % p;
            }
        }
        let mut acc = 0u64;
        for (idx, r) in reduced.iter().enumerate() {
            if *r == 0 {
                continue;
            }
            let e = unrank(self.deg, idx);
            let m = pw[e[0] as usize][0] * pw[e[1] as usize][1] % p * pw[e[2] as usize][2] % p
                * pw[e[3] as usize][3]
                % p;
            acc = (acc + r * m) % p;
        }
        acc as u16
    }
}

/// The elementary symmetric polynomial `e_k` for `k` in 1..=4.
pub fn elementary(k: u32) -> SymPoly {
    assert!((1..=4).contains(&k));
    let mut acc = SymPoly::zero(k);
    // All k-element subsets of the four variables.
    for mask in 0u32..16 {
        if mask.count_ones() == k {
            let mut exps = [0u32; 4];
            for i in 0..4 {
                if mask & (1 << i) != 0 {
                    exps[i] = 1;
                }
            }
            acc = acc.add(&SymPoly::monomial(exps, BigInt::one()));
        }
    }
    acc
}
