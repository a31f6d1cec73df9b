//! Additive cyclic codes over quadratic Galois extensions of finite chain
//! rings.
//!
//! The ambient tower is `Z_{p^e} ⊆ R ⊆ S` with `R = GR(p^e, m)` and
//! `S = R[z]/(z^2 - θ)` for an odd prime `p`. A length-`n` additive cyclic
//! code is an `R`-submodule of `S[x]/(x^n - 1)` closed under the cyclic
//! shift; when free, it is described by a canonical generator triple
//! `(f, r, g)` of divisors of `x^n - 1` plus a mixing polynomial. On top of
//! that representation the crate computes duals for the trace form
//! `u ⊛ v = Tr(Σ u_i v_i)`, decides additive complementary pairs by four
//! independent criteria, and cross-checks everything against brute-force
//! enumeration at small sizes.

// row-reduction and convolution kernels index several buffers at matched
// offsets; iterator rewrites would hide that alignment
#![allow(clippy::needless_range_loop)]

pub mod acp;
pub mod additive_codes;
pub mod chain_linalg;
pub mod error;
pub mod oracle;
pub mod poly_cyclic;
pub mod ring_tower;
pub mod trace_duality;

pub use error::{Error, Result};
pub use ring_tower::{ExtensionContext, Level, RingElem};
