//! Transforms between coefficient vectors of related double covers.
//!
//! Four machines map an [`Octic`] to the octic of an isomorphic or
//! correspondent cover:
//!
//! * [`coordinate_change`] — pullback under `x_i ↦ (x+y+z+t) + λ·x_i`,
//!   defined for `λ ∉ {0, −4}`;
//! * [`segre`] — the squaring map `(x:y:z:t) ↦ (x²:y²:z²:t²)`, defined on
//!   vectors supported on `{B,R,U,C,H}` (one `e4` factor is absorbed by
//!   the double cover);
//! * [`inversion`] — the Cremona inversion `(x:y:z:t) ↦ (yzt:xzt:xyt:xyz)`,
//!   defined on vectors supported on `{B,R,U,C,W,E,G,A}`, where it simply
//!   swaps `C` and `W`;
//! * [`sign_change`] — the documented action of `t ↦ −t` on the
//!   three-parameter family `α·B + β·(8R−4C+H) + γ·(4U−4C+H)`.
//!
//! A fifth, generic machine, [`linear_substitution`], substitutes an
//! arbitrary invertible integer matrix and reports whether the image is
//! again symmetric. All of them work by exact polynomial algebra: expand
//! the octic into a dense degree-8 polynomial, substitute, and decompose
//! back over the letter basis ([`decompose`]). The closed-form row maps
//! (`segre`, `inversion`, `sign_change`) are applied directly to the
//! coefficients and are validated against the dense route by
//! [`segre_dense_check`] / [`inversion_dense_check`].
//!
//! Output scaling: `coordinate_change` and `linear_substitution` divide
//! the image by the largest perfect-square divisor of its content and
//! never change signs. Scaling a branch octic by `r²` leaves the double
//! cover unchanged over every field where `r ≠ 0`, so this normalization
//! preserves exact point counts; dividing by a non-square (or flipping
//! the sign) would twist the cover. The closed-form row maps are returned
//! exactly as documented, with no rescaling.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::basis::{Letter, Octic};
use crate::error::{Error, Result};
use crate::sympoly::{elementary, monomial_count, SymPoly};

/// The coordinate change `x ↦ x+y, y ↦ x−y, z ↦ z+t, t ↦ z−t`. Its square
/// is twice the identity, so applying [`linear_substitution`] with it twice
/// scales the octic by `2⁸` and normalizes back to the input.
pub const SUM_DIFF_MATRIX: [[i64; 4]; 4] = [
    [1, 1, 0, 0],
    [1, -1, 0, 0],
    [0, 0, 1, 1],
    [0, 0, 1, -1],
];

/// Fully expanded degree-8 polynomial of one basis letter.
pub fn letter_poly(l: Letter) -> &'static SymPoly {
    &basis_data().letters[l.index()]
}

/// Expands a coefficient vector into its dense degree-8 polynomial.
pub fn octic_to_poly(v: &Octic) -> SymPoly {
    let data = basis_data();
    let mut acc = SymPoly::zero(8);
    for l in Letter::ALL {
        let c = v.get(l);
        if c != 0 {
            acc = acc.add(&data.letters[l.index()].scale(&BigInt::from(c)));
        }
    }
    acc
}

/// Writes a symmetric degree-8 polynomial as an integer vector over the
/// letter basis.
///
/// The solve is exact: the 15 coordinates are read off against a fixed set
/// of 15 pivot monomials (chosen once from the 165×15 basis matrix, whose
/// full rank is checked when the tables are first built), and the full
/// 165-coefficient reconstruction is verified before returning.
pub fn decompose(poly: &SymPoly) -> Result<Vec<BigInt>> {
    if poly.degree() != 8 {
        return Err(Error::Precondition(format!(
            "decompose requires a degree-8 polynomial, got degree {}",
            poly.degree()
        )));
    }
    if !poly.is_symmetric() {
        return Err(Error::Precondition(
            "decompose requires an S4-symmetric polynomial".into(),
        ));
    }
    let data = basis_data();
    // Solve for the coordinates from the pivot rows.
    let rhs: Vec<BigRational> = data
        .pivots
        .iter()
        .map(|&r| BigRational::from(poly.coeff_raw(r).clone()))
        .collect();
    let mut coords = Vec::with_capacity(15);
    for row in &data.inverse {
        let mut acc = BigRational::zero();
        for (a, b) in row.iter().zip(&rhs) {
            acc += a * b;
        }
        coords.push(acc);
    }
    // A symmetric integer polynomial always has integer letter coordinates;
    // anything else indicates an internal inconsistency.
    let ints: Vec<BigInt> = coords
        .iter()
        .map(|c| {
            if c.is_integer() {
                Ok(c.to_integer())
            } else {
                Err(Error::Precondition(
                    "polynomial has non-integral letter coordinates".into(),
                ))
            }
        })
        .collect::<Result<_>>()?;
    // Verify the full reconstruction, not just the pivot rows.
    let mut recon = SymPoly::zero(8);
    for (i, c) in ints.iter().enumerate() {
        if !c.is_zero() {
            recon = recon.add(&data.letters[i].scale(c));
        }
    }
    if recon != *poly {
        return Err(Error::Precondition(
            "polynomial is not in the span of the letter basis".into(),
        ));
    }
    Ok(ints)
}

/// The matrix of the coordinate change `x_i ↦ (x+y+z+t) + λ·x_i`.
pub fn coordinate_change_matrix(lambda: i64) -> [[i64; 4]; 4] {
    let mut m = [[1i64; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = lambda.saturating_add(1);
    }
    m
}

/// Pullback of the octic under `x_i ↦ (x+y+z+t) + λ·x_i`, normalized by
/// its square content.
///
/// The substitution matrix has determinant `λ³(λ+4)`, so the map is a
/// coordinate change away from `λ ∈ {0, −4}` and the output has the same
/// point count at every `p ∤ λ(λ+4)` (up to the square scaling, which
/// never changes counts where it is nonzero).
pub fn coordinate_change(v: &Octic, lambda: i64) -> Result<Octic> {
    if v.is_zero() {
        return Err(Error::DegenerateOctic);
    }
    if lambda == 0 || lambda == -4 {
        return Err(Error::Precondition(format!(
            "coordinate change is degenerate at λ = {lambda}"
        )));
    }
    if lambda.checked_add(1).is_none() {
        return Err(Error::Overflow(format!(
            "λ = {lambda} does not fit the substitution matrix"
        )));
    }
    let img = octic_to_poly(v).substitute_linear(&coordinate_change_matrix(lambda));
    let dec = decompose(&img)?;
    normalize_square(&dec)
}

/// Rows of the squaring-map action on `{B,R,U,C,H}` vectors: the image of
/// each domain letter over the full basis.
const SEGRE_ROWS: [(Letter, &[(Letter, i64)]); 5] = [
    (Letter::B, &[(Letter::B, 1)]),
    (
        Letter::R,
        &[
            (Letter::U, 4),
            (Letter::C, -2),
            (Letter::W, -2),
            (Letter::E, 1),
        ],
    ),
    (
        Letter::U,
        &[
            (Letter::B, 4),
            (Letter::R, -8),
            (Letter::U, 4),
            (Letter::E, 4),
            (Letter::G, -4),
            (Letter::A, 1),
        ],
    ),
    (
        Letter::C,
        &[
            (Letter::U, 8),
            (Letter::C, -8),
            (Letter::H, 2),
            (Letter::G, -8),
            (Letter::S, 8),
            (Letter::T, -2),
            (Letter::A, 4),
            (Letter::D, -4),
            (Letter::I, 1),
        ],
    ),
    (
        Letter::H,
        &[
            (Letter::A, 16),
            (Letter::D, -32),
            (Letter::I, 24),
            (Letter::O, -8),
            (Letter::N, 1),
        ],
    ),
];

fn check_support(v: &Octic, allowed: &[Letter], what: &str) -> Result<()> {
    for l in Letter::ALL {
        if v.get(l) != 0 && !allowed.contains(&l) {
            return Err(Error::Precondition(format!(
                "{what} requires support within {{{}}}; coefficient of {l} is nonzero",
                allowed
                    .iter()
                    .map(|a| a.symbol().to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            )));
        }
    }
    Ok(())
}

fn checked_accumulate(acc: &mut [i64; 15], l: Letter, add: i64) -> Result<()> {
    let slot = &mut acc[l.index()];
    *slot = slot.checked_add(add).ok_or_else(|| {
        Error::Overflow(format!("coefficient of {l} exceeds the 64-bit range"))
    })?;
    Ok(())
}

/// Image of a `{B,R,U,C,H}` vector under the squaring map
/// `(x:y:z:t) ↦ (x²:y²:z²:t²)`.
///
/// The defining identity is `f_v(x², y², z², t²) = e4² · f_{segre(v)}`
/// (one square factor of `e4` is absorbed by the double cover); see
/// [`segre_dense_check`]. The output is the exact linear image, with no
/// rescaling.
pub fn segre(v: &Octic) -> Result<Octic> {
    if v.is_zero() {
        return Err(Error::DegenerateOctic);
    }
    check_support(
        v,
        &[Letter::B, Letter::R, Letter::U, Letter::C, Letter::H],
        "segre",
    )?;
    let mut out = [0i64; 15];
    for (src, row) in SEGRE_ROWS {
        let c = v.get(src);
        if c == 0 {
            continue;
        }
        for &(dst, k) in row {
            let add = c
                .checked_mul(k)
                .ok_or_else(|| Error::Overflow(format!("coefficient of {dst} overflows")))?;
            checked_accumulate(&mut out, dst, add)?;
        }
    }
    Ok(Octic::from_coeffs(out))
}

/// Verifies the exact polynomial identity behind [`segre`]:
/// `f_v(x², y², z², t²) = e4² · f_{segre(v)}`.
pub fn segre_dense_check(v: &Octic) -> Result<bool> {
    let w = segre(v)?;
    let squares = [
        SymPoly::variable(0).pow(2),
        SymPoly::variable(1).pow(2),
        SymPoly::variable(2).pow(2),
        SymPoly::variable(3).pow(2),
    ];
    let lhs = octic_to_poly(v).substitute(&squares);
    let rhs = elementary(4).pow(2).mul(&octic_to_poly(&w));
    Ok(lhs == rhs)
}

const INVERSION_SUPPORT: [Letter; 8] = [
    Letter::B,
    Letter::R,
    Letter::U,
    Letter::C,
    Letter::W,
    Letter::E,
    Letter::G,
    Letter::A,
];

/// Image of a `{B,R,U,C,W,E,G,A}` vector under the inversion
/// `(x:y:z:t) ↦ (yzt:xzt:xyt:xyz)`: the coefficients of `C` and `W` swap
/// and everything else is fixed.
///
/// The defining identity is `f_v(yzt, xzt, xyt, xyz) = e4⁴ · f_{inv(v)}`;
/// see [`inversion_dense_check`]. On the open torus `xyzt ≠ 0` the map is
/// an involution, so torus-restricted point counts are preserved.
pub fn inversion(v: &Octic) -> Result<Octic> {
    if v.is_zero() {
        return Err(Error::DegenerateOctic);
    }
    check_support(v, &INVERSION_SUPPORT, "inversion")?;
    let mut out = *v.coeffs();
    out.swap(Letter::C.index(), Letter::W.index());
    Ok(Octic::from_coeffs(out))
}

/// Verifies the exact polynomial identity behind [`inversion`]:
/// `f_v(yzt, xzt, xyt, xyz) = e4⁴ · f_{inv(v)}`.
pub fn inversion_dense_check(v: &Octic) -> Result<bool> {
    let w = inversion(v)?;
    let one = BigInt::one();
    let subs = [
        SymPoly::monomial([0, 1, 1, 1], one.clone()),
        SymPoly::monomial([1, 0, 1, 1], one.clone()),
        SymPoly::monomial([1, 1, 0, 1], one.clone()),
        SymPoly::monomial([1, 1, 1, 0], one),
    ];
    let lhs = octic_to_poly(v).substitute(&subs);
    let rhs = elementary(4).pow(4).mul(&octic_to_poly(&w));
    Ok(lhs == rhs)
}

/// The documented sign-change map on the family
/// `α·B + β·(8R−4C+H) + γ·(4U−4C+H)`: the coefficient of `B` becomes
/// `−(b + 2r)` and the other four stay fixed.
///
/// Membership in the family is equivalent to the two exact identities
/// `c = −r/2 − u` and `h = r/8 + u/4` on the integer coefficients, which
/// are checked (in cleared form) before applying the map. The map is an
/// involution on the family.
pub fn sign_change(v: &Octic) -> Result<Octic> {
    if v.is_zero() {
        return Err(Error::DegenerateOctic);
    }
    check_support(
        v,
        &[Letter::B, Letter::R, Letter::U, Letter::C, Letter::H],
        "sign change",
    )?;
    let b = v.get(Letter::B);
    let r = v.get(Letter::R);
    let u = v.get(Letter::U);
    let c = v.get(Letter::C);
    let h = v.get(Letter::H);
    // c = -r/2 - u, cleared of denominators: 2c + r + 2u = 0.
    if 2 * c + r + 2 * u != 0 {
        return Err(Error::Precondition(format!(
            "sign change requires c = -r/2 - u; got c = {c}, r = {r}, u = {u}"
        )));
    }
    // h = r/8 + u/4, cleared of denominators: 8h = r + 2u.
    if 8 * h != r + 2 * u {
        return Err(Error::Precondition(format!(
            "sign change requires h = r/8 + u/4; got h = {h}, r = {r}, u = {u}"
        )));
    }
    let new_b = b
        .checked_add(r.checked_mul(2).ok_or_else(overflow_b)?)
        .ok_or_else(overflow_b)?
        .checked_neg()
        .ok_or_else(overflow_b)?;
    let mut out = *v.coeffs();
    out[Letter::B.index()] = new_b;
    Ok(Octic::from_coeffs(out))
}

fn overflow_b() -> Error {
    Error::Overflow("coefficient of B exceeds the 64-bit range".into())
}

/// Outcome of a generic linear substitution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Substituted {
    /// The image was symmetric; here is its normalized coefficient vector.
    Symmetric(Octic),
    /// The image is not S4-symmetric and has no letter expansion.
    NotSymmetric,
}

/// Determinant of a 4×4 integer matrix, computed exactly.
pub fn det4(m: &[[i64; 4]; 4]) -> BigInt {
    // Cofactor expansion along the first row over 3×3 minors.
    fn det3(m: &[[i64; 4]; 4], rows: [usize; 3], cols: [usize; 3]) -> i128 {
        let a = |r: usize, c: usize| m[rows[r]][cols[c]] as i128;
        a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1))
            - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
            + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0))
    }
    let rows = [1, 2, 3];
    let mut det = BigInt::zero();
    let all = [0usize, 1, 2, 3];
    for (j, &col) in all.iter().enumerate() {
        let minor_cols: Vec<usize> = all.iter().copied().filter(|&c| c != col).collect();
        let minor = det3(m, rows, [minor_cols[0], minor_cols[1], minor_cols[2]]);
        let term = BigInt::from(m[0][col]) * BigInt::from(minor);
        if j % 2 == 0 {
            det += term;
        } else {
            det -= term;
        }
    }
    det
}

/// Substitutes `x_i ↦ Σ_j M[i][j]·x_j` into the octic. If the image is
/// still symmetric, returns its coefficient vector normalized by the
/// square content (counts preserved at every `p ∤ det(M)`); otherwise
/// reports that the image has no letter expansion.
pub fn linear_substitution(v: &Octic, m: &[[i64; 4]; 4]) -> Result<Substituted> {
    if v.is_zero() {
        return Err(Error::DegenerateOctic);
    }
    if det4(m).is_zero() {
        return Err(Error::Precondition(
            "linear substitution requires an invertible matrix".into(),
        ));
    }
    let img = octic_to_poly(v).substitute_linear(m);
    if !img.is_symmetric() {
        return Ok(Substituted::NotSymmetric);
    }
    let dec = decompose(&img)?;
    Ok(Substituted::Symmetric(normalize_square(&dec)?))
}

/// Divides a nonzero integer vector by the largest perfect-square divisor
/// of its content. Signs are never changed: dividing by a square is
/// count-preserving, while any other rescaling could twist the cover.
fn normalize_square(coeffs: &[BigInt]) -> Result<Octic> {
    let mut content = BigUint::zero();
    for c in coeffs {
        content = content.gcd(c.magnitude());
    }
    if content.is_zero() {
        return Err(Error::DegenerateOctic);
    }
    let root = square_part(&content);
    let divisor = BigInt::from(&root * &root);
    let mut out = [0i64; 15];
    for (i, c) in coeffs.iter().enumerate() {
        let reduced = c / &divisor;
        out[i] = i64::try_from(reduced).map_err(|_| {
            Error::Overflow(format!(
                "coefficient of {} exceeds the 64-bit range",
                Letter::from_index(i).unwrap()
            ))
        })?;
    }
    Ok(Octic::from_coeffs(out))
}

/// Largest integer `r` (up to the factoring effort) with `r²` dividing
/// `n`. Factors found by trial division up to 10⁴ are extracted exactly;
/// a remaining cofactor is used only if it is itself a perfect square.
/// Missing a huge square factor is harmless — any square divisor gives a
/// valid normalization — and impossible for the matrices this crate
/// produces.
fn square_part(n: &BigUint) -> BigUint {
    let mut n = n.clone();
    let mut root = BigUint::one();
    let mut d = 2u64;
    while d <= 10_000 {
        let db = BigUint::from(d);
        let mut e = 0u32;
        while (&n % &db).is_zero() {
            n /= &db;
            e += 1;
        }
        for _ in 0..e / 2 {
            root *= &db;
        }
        d = if d == 2 { 3 } else { d + 2 };
    }
    if !n.is_one() {
        let s = n.sqrt();
        if &s * &s == n {
            root *= s;
        }
    }
    root
}

/// Precomputed expansion of the 15 letters and the exact solver data for
/// [`decompose`].
struct BasisData {
    letters: Vec<SymPoly>,
    /// Monomial ranks of the 15 pivot rows of the 165×15 basis matrix.
    pivots: Vec<usize>,
    /// Inverse of the 15×15 pivot submatrix.
    inverse: Vec<Vec<BigRational>>,
}

fn basis_data() -> &'static BasisData {
    static DATA: OnceLock<BasisData> = OnceLock::new();
    DATA.get_or_init(build_basis_data)
}

fn build_basis_data() -> BasisData {
    let e: Vec<SymPoly> = (1..=4).map(elementary).collect();
    let letters: Vec<SymPoly> = Letter::ALL
        .iter()
        .map(|l| {
            let [a4, a3, a2, a1] = l.exponents().map(|x| x as u32);
            e[3].pow(a4)
                .mul(&e[2].pow(a3))
                .mul(&e[1].pow(a2))
                .mul(&e[0].pow(a1))
        })
        .collect();

    // Select 15 pivot monomial rows by incremental row reduction of the
    // 165×15 matrix whose columns are the letter expansions.
    let rows = monomial_count(8);
    let mut echelon: Vec<(usize, Vec<BigRational>)> = Vec::new(); // (lead column, reduced row)
    let mut pivots = Vec::new();
    for r in 0..rows {
        let mut row: Vec<BigRational> = letters
            .iter()
            .map(|lp| BigRational::from(lp.coeff_raw(r).clone()))
            .collect();
        for (lead, base) in &echelon {
            if !row[*lead].is_zero() {
                let factor = row[*lead].clone();
                for (a, b) in row.iter_mut().zip(base) {
                    *a -= &factor * b;
                }
            }
        }
        if let Some(lead) = row.iter().position(|x| !x.is_zero()) {
            let inv = row[lead].recip();
            for a in row.iter_mut() {
                *a *= &inv;
            }
            echelon.push((lead, row));
            pivots.push(r);
            if pivots.len() == 15 {
                break;
            }
        }
    }
    // The letters span a 15-dimensional space; anything less means the
    // basis table itself is wrong.
    assert_eq!(pivots.len(), 15, "letter basis matrix is rank-deficient");

    // Invert the pivot submatrix (rows = pivot monomials, columns =
    // letters) by Gauss-Jordan elimination.
    let mut a: Vec<Vec<BigRational>> = pivots
        .iter()
        .map(|&r| {
            letters
                .iter()
                .map(|lp| BigRational::from(lp.coeff_raw(r).clone()))
                .collect()
        })
        .collect();
    let mut inv: Vec<Vec<BigRational>> = (0..15)
        .map(|i| {
            (0..15)
                .map(|j| {
                    if i == j {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect();
    for col in 0..15 {
        let pivot_row = (col..15)
            .find(|&r| !a[r][col].is_zero())
            .expect("pivot submatrix is singular");
        a.swap(col, pivot_row);
        inv.swap(col, pivot_row);
        let scale = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &scale;
        }
        for x in inv[col].iter_mut() {
            *x *= &scale;
        }
        for r in 0..15 {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..15 {
                    let sub_a = &f * &a[col][c];
                    a[r][c] -= sub_a;
                    let sub_i = &f * &inv[col][c];
                    inv[r][c] -= sub_i;
                }
            }
        }
    }
    BasisData {
        letters,
        pivots,
        inverse: inv,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::str::FromStr;

    fn oct(s: &str) -> Octic {
        Octic::from_str(s).unwrap()
    }

    #[test]
    fn letter_poly_samples() {
        // B = (xyzt)².
        assert_eq!(*letter_poly(Letter::B).coeff([2, 2, 2, 2]), BigInt::from(1));
        // N = (x+y+z+t)⁸: coefficient of x⁸ is 1, of x⁷y is 8.
        let n = letter_poly(Letter::N);
        assert_eq!(*n.coeff([8, 0, 0, 0]), BigInt::from(1));
        assert_eq!(*n.coeff([7, 1, 0, 0]), BigInt::from(8));
        assert_eq!(monomial_count(8), 165);
        for l in Letter::ALL {
            assert_eq!(letter_poly(l).degree(), 8);
            assert!(letter_poly(l).is_symmetric());
        }
    }

    #[test]
    fn decompose_letters_round_trip() {
        for l in Letter::ALL {
            let dec = decompose(letter_poly(l)).unwrap();
            for (i, c) in dec.iter().enumerate() {
                let expect = if i == l.index() { 1 } else { 0 };
                assert_eq!(*c, BigInt::from(expect), "letter {l}");
            }
        }
    }

    #[test]
    fn decompose_family_quartics() {
        let e1 = elementary(1);
        let e2 = elementary(2);
        let e3 = elementary(3);
        let e4 = elementary(4);
        // e4·(e1² − 2e2)² = 4U − 4C + H.
        let q = e1.pow(2).sub(&e2.scale(&BigInt::from(2)));
        let poly = e4.mul(&q.pow(2));
        let dec = decompose(&poly).unwrap();
        let expect = oct("u=4,c=-4,h=1");
        for l in Letter::ALL {
            assert_eq!(dec[l.index()], BigInt::from(expect.get(l)));
        }
        // e4·e1·(8e3 − 4e2e1 + e1³) = 8R − 4C + H.
        let p = e3
            .scale(&BigInt::from(8))
            .sub(&e2.mul(&e1).scale(&BigInt::from(4)))
            .add(&e1.pow(3));
        let poly = e4.mul(&e1).mul(&p);
        let dec = decompose(&poly).unwrap();
        let expect = oct("r=8,c=-4,h=1");
        for l in Letter::ALL {
            assert_eq!(dec[l.index()], BigInt::from(expect.get(l)));
        }
    }

    #[test]
    fn decompose_rejects_bad_input() {
        assert!(decompose(&elementary(4)).is_err()); // degree 4
        let asym = SymPoly::variable(0).pow(8);
        assert!(decompose(&asym).is_err()); // not symmetric
    }

    #[test]
    fn coordinate_change_e_images() {
        // The four documented substitution identities for x_i ↦ e1 + λ·x_i.
        let e1 = elementary(1);
        let e2 = elementary(2);
        let e3 = elementary(3);
        let e4 = elementary(4);
        for lambda in [-3i64, -2, -1, 1, 2, 5] {
            let m = coordinate_change_matrix(lambda);
            let lb = BigInt::from(lambda);
            let img1 = e1.substitute_linear(&m);
            assert_eq!(img1, e1.scale(&(BigInt::from(4) + &lb)));
            let img2 = e2.substitute_linear(&m);
            let expect2 = e2
                .scale(&(&lb * &lb))
                .add(&e1.pow(2).scale(&(BigInt::from(3) * (BigInt::from(2) + &lb))));
            assert_eq!(img2, expect2, "λ = {lambda}");
            let img3 = e3.substitute_linear(&m);
            let expect3 = e3
                .scale(&(&lb * &lb * &lb))
                .add(&e2.mul(&e1).scale(&(BigInt::from(2) * &lb * &lb)))
                .add(&e1.pow(3).scale(&(BigInt::from(4) + BigInt::from(3) * &lb)));
            assert_eq!(img3, expect3, "λ = {lambda}");
            let img4 = e4.substitute_linear(&m);
            let expect4 = e4
                .scale(&(&lb * &lb * &lb * &lb))
                .add(&e3.mul(&e1).scale(&(&lb * &lb * &lb)))
                .add(&e2.mul(&e1.pow(2)).scale(&(&lb * &lb)))
                .add(&e1.pow(4).scale(&(BigInt::one() + &lb)));
            assert_eq!(img4, expect4, "λ = {lambda}");
        }
    }

    #[test]
    fn coordinate_change_fixes_n_only() {
        // N = e1⁸ picks up the factor (4+λ)⁸, a perfect square, so the
        // normalized image is N again.
        for lambda in [-7i64, -2, -1, 1, 3, 10] {
            let out = coordinate_change(&oct("n=1"), lambda).unwrap();
            assert_eq!(out, oct("n=1"), "λ = {lambda}");
        }
        // Scalar multiples keep their non-square content.
        let out = coordinate_change(&oct("n=3"), -2).unwrap();
        assert_eq!(out, oct("n=3"));
    }

    #[test]
    fn coordinate_change_rejects_degenerate() {
        assert!(coordinate_change(&oct("b=1"), 0).is_err());
        assert!(coordinate_change(&oct("b=1"), -4).is_err());
        assert!(coordinate_change(&Octic::ZERO, 1).is_err());
    }

    #[test]
    fn coordinate_change_matches_scaled_pullback() {
        // The implementation route (dense substitution) must reproduce the
        // pullback up to the removed square factor: check at integer
        // points that r²·f'(P) = f(M·P).
        let v = oct("b=1,r=-2,a=1");
        for lambda in [-2i64, 1, 3] {
            let m = coordinate_change_matrix(lambda);
            let out = coordinate_change(&v, lambda).unwrap();
            let f = octic_to_poly(&v);
            let g = octic_to_poly(&out);
            let img = f.substitute_linear(&m);
            // Recover the square scalar by comparing the polynomials.
            let dec_img = decompose(&img).unwrap();
            let dec_out = decompose(&g).unwrap();
            let idx = dec_out.iter().position(|c| !c.is_zero()).unwrap();
            let scalar = &dec_img[idx] / &dec_out[idx];
            assert_eq!(g.scale(&scalar), img, "λ = {lambda}");
            // The scalar is a perfect square.
            let mag = scalar.magnitude().sqrt();
            assert_eq!(BigInt::from(&mag * &mag), scalar, "λ = {lambda}");
        }
    }

    #[test]
    fn segre_documented_rows() {
        assert_eq!(segre(&oct("r=1")).unwrap(), oct("u=4,c=-2,w=-2,e=1"));
        assert_eq!(
            segre(&oct("h=1")).unwrap(),
            oct("a=16,d=-32,i=24,o=-8,n=1")
        );
        assert_eq!(segre(&oct("b=1")).unwrap(), oct("b=1"));
        // Linearity: B + R maps to the sum of the rows.
        let sum = segre(&oct("b=1,r=1")).unwrap();
        assert_eq!(sum, oct("b=1,u=4,c=-2,w=-2,e=1"));
    }

    #[test]
    fn segre_dense_identity_on_letters() {
        for l in [Letter::B, Letter::R, Letter::U, Letter::C, Letter::H] {
            let v = Octic::from_pairs(&[(l, 1)]);
            assert!(segre_dense_check(&v).unwrap(), "letter {l}");
        }
        assert!(segre_dense_check(&oct("b=3,r=-1,u=2,c=7,h=-5")).unwrap());
    }

    #[test]
    fn segre_rejects_support_outside_bruch() {
        let err = segre(&oct("b=1,n=1")).unwrap_err();
        assert!(err.to_string().contains("N"));
    }

    #[test]
    fn inversion_swaps_c_and_w() {
        assert_eq!(inversion(&oct("c=1")).unwrap(), oct("w=1"));
        assert_eq!(inversion(&oct("w=2,c=-3")).unwrap(), oct("c=2,w=-3"));
        assert_eq!(inversion(&oct("b=1")).unwrap(), oct("b=1"));
        let v = oct("b=1,r=2,u=3,c=4,w=5,e=6,g=7,a=8");
        assert_eq!(inversion(&inversion(&v).unwrap()).unwrap(), v);
    }

    #[test]
    fn inversion_dense_identity_on_letters() {
        for l in INVERSION_SUPPORT {
            let v = Octic::from_pairs(&[(l, 1)]);
            assert!(inversion_dense_check(&v).unwrap(), "letter {l}");
        }
        assert!(inversion_dense_check(&oct("b=2,r=-1,u=1,c=3,w=-4,e=1,g=2,a=-2")).unwrap());
    }

    #[test]
    fn inversion_rejects_support_outside_brucwega() {
        assert!(inversion(&oct("h=1")).is_err());
        assert!(inversion(&oct("b=1,s=2")).is_err());
    }

    #[test]
    fn sign_change_documented_values() {
        assert_eq!(sign_change(&oct("b=1")).unwrap(), oct("b=-1"));
        assert_eq!(
            sign_change(&oct("r=8,c=-4,h=1")).unwrap(),
            oct("b=-16,r=8,c=-4,h=1")
        );
        let fixed = oct("u=4,c=-4,h=1");
        assert_eq!(sign_change(&fixed).unwrap(), fixed);
        // General member: b ↦ −(b + 2r).
        assert_eq!(
            sign_change(&oct("b=5,r=8,c=-4,h=1")).unwrap(),
            oct("b=-21,r=8,c=-4,h=1")
        );
        // Involution on the family.
        let v = oct("b=3,r=8,u=4,c=-8,h=2");
        assert_eq!(sign_change(&sign_change(&v).unwrap()).unwrap(), v);
    }

    #[test]
    fn sign_change_names_violated_identity() {
        let err = sign_change(&oct("b=1,c=1")).unwrap_err();
        assert!(err.to_string().contains("c = -r/2 - u"), "{err}");
        let err = sign_change(&oct("r=8,c=-4,h=2")).unwrap_err();
        assert!(err.to_string().contains("h = r/8 + u/4"), "{err}");
        assert!(sign_change(&oct("b=1,n=1")).is_err());
    }

    #[test]
    fn linear_substitution_identity_and_permutation() {
        let v = oct("b=1,r=1");
        let id = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]];
        assert_eq!(
            linear_substitution(&v, &id).unwrap(),
            Substituted::Symmetric(v)
        );
        let perm = [[0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0]];
        assert_eq!(
            linear_substitution(&v, &perm).unwrap(),
            Substituted::Symmetric(v)
        );
    }

    #[test]
    fn linear_substitution_sum_diff_twice_is_identity() {
        // The matrix squares to 2·I, so the image of the image is 2⁸·v,
        // and the square normalization brings it back to v exactly.
        let v = oct("b=1,r=-2,h=3");
        let m = SUM_DIFF_MATRIX;
        let once = linear_substitution(&v, &m).unwrap();
        // One application need not be symmetric; two always give v back.
        let squared = {
            // M² = 2I computed explicitly.
            let mut sq = [[0i64; 4]; 4];
            for i in 0..4 {
                for j in 0..4 {
                    for k in 0..4 {
                        sq[i][j] += m[i][k] * m[k][j];
                    }
                }
            }
            sq
        };
        assert_eq!(
            squared,
            [[2, 0, 0, 0], [0, 2, 0, 0], [0, 0, 2, 0], [0, 0, 0, 2]]
        );
        assert_eq!(
            linear_substitution(&v, &squared).unwrap(),
            Substituted::Symmetric(v)
        );
        // And if one application was symmetric, applying the machine again
        // returns to v as well.
        if let Substituted::Symmetric(w) = once {
            assert_eq!(
                linear_substitution(&w, &m).unwrap(),
                Substituted::Symmetric(v)
            );
        }
    }

    #[test]
    fn linear_substitution_reports_asymmetric_images() {
        let v = oct("b=1");
        // B = (xyzt)² maps under the sum/diff matrix to ((x²−y²)(z²−t²))²,
        // which is not invariant under swapping y and z.
        assert_eq!(
            linear_substitution(&v, &SUM_DIFF_MATRIX).unwrap(),
            Substituted::NotSymmetric
        );
    }

    #[test]
    fn linear_substitution_rejects_singular() {
        let m = [[1, 1, 0, 0], [1, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]];
        assert!(linear_substitution(&oct("b=1"), &m).is_err());
    }

    #[test]
    fn det4_samples() {
        assert_eq!(det4(&SUM_DIFF_MATRIX), BigInt::from(4));
        let id = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]];
        assert_eq!(det4(&id), BigInt::from(1));
        // Coordinate-change matrix determinant λ³(λ+4).
        for lambda in [-3i64, -2, 1, 2] {
            let m = coordinate_change_matrix(lambda);
            assert_eq!(
                det4(&m),
                BigInt::from(lambda.pow(3) * (lambda + 4)),
                "λ = {lambda}"
            );
        }
    }

    #[test]
    fn square_part_samples() {
        let sp = |n: u64| square_part(&BigUint::from(n));
        assert_eq!(sp(1), BigUint::one());
        assert_eq!(sp(4), BigUint::from(2u32));
        assert_eq!(sp(18), BigUint::from(3u32));
        assert_eq!(sp(256), BigUint::from(16u32));
        assert_eq!(sp(7), BigUint::one());
        assert_eq!(sp(2 * 2 * 3 * 3 * 3 * 5), BigUint::from(6u32));
        // A large prime square beyond the trial-division bound.
        let p = BigUint::from(1_000_003u64);
        assert_eq!(square_part(&(&p * &p)), p);
    }

    #[test]
    fn normalize_square_keeps_sign_and_nonsquare_content() {
        let norm = |v: [i64; 15]| {
            let coeffs: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
            normalize_square(&coeffs).unwrap()
        };
        let mut a = [0i64; 15];
        a[0] = 4;
        a[1] = 8;
        let out = norm(a);
        assert_eq!(out.coeffs()[0], 1);
        assert_eq!(out.coeffs()[1], 2);
        // Content 2 is square-free: untouched.
        let mut b = [0i64; 15];
        b[0] = 2;
        b[1] = 4;
        let out = norm(b);
        assert_eq!(out.coeffs()[0], 2);
        assert_eq!(out.coeffs()[1], 4);
        // Negative leading coefficients stay negative.
        let mut c = [0i64; 15];
        c[0] = -4;
        c[1] = -8;
        let out = norm(c);
        assert_eq!(out.coeffs()[0], -1);
        assert_eq!(out.coeffs()[1], -2);
    }
}
