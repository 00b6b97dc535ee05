//! Arithmetic of octic double solids with symmetric branch locus.
//!
//! The objects of study are double covers `u² = f(x, y, z, t)` of projective
//! 3-space, where `f` is a degree-8 polynomial invariant under all
//! permutations of the coordinates. Such an `f` is an integer vector over a
//! 15-element monomial basis in the elementary symmetric functions (the
//! [`basis`] module). The crate provides:
//!
//! * exact point counts of these covers over the 25 prime fields `F_2`
//!   through `F_97`, accelerated by precomputed aggregate tables
//!   ([`count`]);
//! * transforms that map coefficient vectors to coefficient vectors of
//!   covers with related point counts ([`transform`], backed by the exact
//!   polynomial algebra in [`sympoly`]);
//! * parsing, validation and generation of weight-4 newform coefficient
//!   tables, including eta products ([`newform`]);
//! * the count-to-coefficient matching rule `a_p ≡ 1 − #X_p (mod p)` with
//!   quadratic twists ([`matcher`]);
//! * an exhaustive, deterministic, resumable search over coefficient
//!   ranges ([`search`]);
//! * exact combinatorial estimates of how often matches arise by chance
//!   ([`stats`]).

pub mod basis;
pub mod count;
pub mod error;
pub mod field;
pub mod matcher;
pub mod newform;
pub mod search;
pub mod stats;
pub mod sympoly;
pub mod transform;

pub use basis::{Letter, Octic};
pub use error::{Error, Result};
