//! How often do 21-of-25 coefficient agreements happen by chance?
//!
//! Model the residues `(1 − #X_p) mod p` of a random surface as uniform
//! and independent across the 25 primes. A newform's residue vector then
//! lives in a sample space of size `Π p` (the product of the 25 primes,
//! about 2.3·10³⁶), and the number of residue vectors agreeing with a
//! fixed one in at least 21 of the 25 positions is
//!
//! ```text
//! Σ_{k=0}^{4} e_k(p₁−1, …, p₂₅−1)
//! ```
//!
//! — choose up to four primes to miss and a wrong residue at each. The
//! `e_k` are elementary symmetric functions, evaluated exactly two ways
//! (Newton's identities and direct product expansion) as a cross-check.
//! Everything here is exact integer/rational arithmetic; approximation
//! happens only at display time via [`scientific`].

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::field::PRIMES;

/// The 25 values `p − 1` for the supported primes.
pub fn p_tilde() -> [u64; 25] {
    let mut out = [0u64; 25];
    for (i, &p) in PRIMES.iter().enumerate() {
        out[i] = p as u64 - 1;
    }
    out
}

/// All elementary symmetric functions `e_0 … e_n` of `values` by direct
/// expansion of `Π (1 + x_i·t)`.
pub fn elem_sym_product(values: &[u64]) -> Vec<BigInt> {
    let mut coef = vec![BigInt::from(1u32)];
    for &x in values {
        let mut next = coef.clone();
        next.push(BigInt::zero());
        for j in (1..next.len()).rev() {
            next[j] += BigInt::from(x) * &coef[j - 1];
        }
        coef = next;
    }
    coef
}

/// `e_k(values)` via Newton's identities over the power sums.
///
/// Must agree with [`elem_sym_product`]; the acceptance suite checks all
/// `k ≤ 25` both ways.
pub fn elem_sym_exact(values: &[u64], k: usize) -> BigInt {
    assert!(k <= values.len(), "e_{k} of {} values", values.len());
    // Power sums p_j = Σ x^j for j = 1..=k.
    let mut power: Vec<BigInt> = values.iter().map(|&x| BigInt::from(x)).collect();
    let mut psums = vec![BigInt::from(values.len())]; // p_0 = n, unused
    for _ in 1..=k {
        psums.push(power.iter().sum());
        for (p, &x) in power.iter_mut().zip(values) {
            *p *= BigInt::from(x);
        }
    }
    // k·e_k = Σ_{i=1}^{k} (−1)^{i−1} e_{k−i} p_i.
    let mut e = vec![BigInt::from(1u32)];
    for m in 1..=k {
        let mut s = BigInt::zero();
        for i in 1..=m {
            let term = &e[m - i] * &psums[i];
            if i % 2 == 1 {
                s += term;
            } else {
                s -= term;
            }
        }
        let (q, r) = num_integer::Integer::div_rem(&s, &BigInt::from(m));
        debug_assert!(r.is_zero(), "Newton recursion must divide exactly");
        e.push(q);
    }
    e.pop().expect("e has k+1 entries")
}

/// The number of 25-tuples of residues mod `(p₁, …, p₂₅)` that agree with
/// a fixed tuple in at least 21 places: `Σ_{k≤4} e_k(p−1)`.
pub fn chance_possibilities() -> BigUint {
    let pt = p_tilde();
    let mut total = BigInt::zero();
    for k in 0..=4 {
        total += elem_sym_exact(&pt, k);
    }
    total.to_biguint().expect("positive")
}

/// The size of the full residue sample space: the product of the 25
/// primes (the 97-primorial, about 2.3·10³⁶).
pub fn sample_space_size() -> BigUint {
    PRIMES.iter().map(|&p| BigUint::from(p)).product()
}

/// Expected number of chance matches when `n_octics` surfaces are tested
/// against `n_forms` newforms: `n_octics · n_forms · chance / sample`.
pub fn expected_false_positives(n_octics: &BigUint, n_forms: &BigUint) -> BigRational {
    let numer = n_octics * n_forms * chance_possibilities();
    BigRational::new(
        BigInt::from(numer),
        BigInt::from(sample_space_size()),
    )
}

/// Renders an exact rational in scientific notation with `sig` significant
/// digits, e.g. `4.903e-23`. Zero prints as `0`.
pub fn scientific(r: &BigRational, sig: usize) -> String {
    assert!(sig >= 1);
    if r.is_zero() {
        return "0".to_string();
    }
    let a = r.numer().abs();
    let b = r.denom().clone(); // positive after normalization
    let ten = BigInt::from(10u32);
    // Find e with 10^e ≤ a/b < 10^{e+1}, starting from digit counts.
    let mut e = a.to_string().len() as i64 - b.to_string().len() as i64;
    let at_least = |e: i64| -> bool {
        if e >= 0 {
            a >= &b * ten.pow(e as u32)
        } else {
            &a * ten.pow((-e) as u32) >= b
        }
    };
    while !at_least(e) {
        e -= 1;
    }
    while at_least(e + 1) {
        e += 1;
    }
    // mantissa = round(a/b · 10^{sig−1−e}), then fix up a rounding carry.
    let shift = sig as i64 - 1 - e;
    let (num, den) = if shift >= 0 {
        (&a * ten.pow(shift as u32), b)
    } else {
        (a.clone(), &b * ten.pow((-shift) as u32))
    };
    let mut mantissa = (&num * 2u32 + &den) / (den * 2u32);
    let mut digits = mantissa.to_string();
    if digits.len() > sig {
        e += 1;
        mantissa /= 10u32;
        digits = mantissa.to_string();
    }
    let mut out = String::new();
    if r.is_negative() {
        out.push('-');
    }
    out.push_str(&digits[..1]);
    if sig > 1 {
        out.push('.');
        out.push_str(&digits[1..]);
    }
    out.push('e');
    out.push_str(&e.to_string());
    out
}
