//! Exact arithmetic for one-dimensional self-similar tiles `K(b, D)` defined
//! by the set equation `bK = K + D` for a digit set `D` of `b` non-negative
//! integers.
//!
//! The crate revolves around the mask polynomial `P_D(x) = Σ_{d∈D} x^d` and
//! its cyclotomic factors, which control both the tiling and the spectral
//! structure of `K(b, D)`:
//!
//! - [`digitset`] — canonical digit sets, direct sums, modular lifts.
//! - [`poly`] / [`cyclotomic`] — dense integer polynomials, `Φ_d`, exact
//!   divisibility, cyclotomic factorization and kernel chains.
//! - [`inttile`] — integer tiles `A ⊕ B ≡ Z_n`, complement search, de Bruijn
//!   decompositions of `Z_n`, and spectra of finite sets certified through
//!   vanishing sums of roots of unity.
//! - [`productform`] — product-form and modulo product-form digit sets, the
//!   associated integer tiles, self-replicating tiling sets `J = bJ ⊕ D`,
//!   and the exact tile measure.
//! - [`zeroset`] — the zero set of the Fourier transform of the self-similar
//!   measure, exact orthogonality of `Γ ⊕ Z`, spectrum certificates, and a
//!   floating-point cross-check of the quadrature identity
//!   `Σ_λ |μ̂(ξ+λ)|² = 1`.
//! - [`fourdigit`] — the complete tile/spectral classifier for four-element
//!   digit sets with base 4, with the explicit spectrum.
//! - [`render`] — radix approximations, interval decompositions of strict
//!   product-form tiles, and the numeric measure oracle.
//!
//! All set and certification decisions are made in exact integer/rational
//! arithmetic; floating point appears only in numeric cross-checks.

pub mod cyclotomic;
pub mod digitset;
pub mod error;
pub mod fourdigit;
pub mod inttile;
pub mod poly;
pub mod productform;
pub mod render;
pub mod zeroset;

pub use digitset::{DigitSet, MaskPolynomial, Normalized};
pub use error::{Error, Result};
pub use poly::IntPolynomial;
