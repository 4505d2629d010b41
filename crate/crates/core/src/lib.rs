//! Normalized isogenous models at singular points of the modular curve Y₀(ℓ)
//! over finite fields.
//!
//! At a point `(j₁, j₂)` of multiplicity `m` on `Φ_ℓ(X, Y) = 0`, the fiber
//! polynomial `F_P(t)` has degree `m` and its roots are in bijection with the
//! normalized codomain models of the `m` distinct ℓ-isogenies from a fixed
//! model of `j₁`. [`multipoint::isogenous_models`] computes them,
//! [`kernelpoly::kernel_polynomial`] recovers each kernel, and
//! [`oracle::enumerate_codomains`] checks everything by brute force.

pub mod cli;
pub mod curves;
pub mod elkies;
pub mod error;
pub mod fields;
pub mod kernelpoly;
pub mod modpoly;
pub mod multipoint;
pub mod oracle;
pub mod poly;

pub use curves::{CurveModel, CurvePoint};
pub use error::{Error, Result};
pub use fields::{Embedding, Fe, Field, FieldElement};
pub use modpoly::{ModularPolyDatabase, ModularPolyTable};
pub use multipoint::{isogenous_models, FiberReport, MultipointOptions};
pub use poly::{Poly, SeriesPrec};
