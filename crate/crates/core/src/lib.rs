//! Exact computation with finite-state self-similar groups.
//!
//! The crate is organised bottom-up:
//!
//! * [`ff_poly`] – prime fields, polynomials, rational functions and places of `F_p(t)`.
//! * [`series`] – eventually periodic Laurent series at a degree-one place.
//! * [`mealy`] – finite-state tree automorphisms as minimal Mealy automata.
//! * [`agl`] – the affine groups `AGL_1(O_S)` acting on the rooted tree of `O`.
//! * [`rover`] – Röver–Nekrashevych groups `V_d(G)`: tree pairs, expansion, the quasi-retraction.
//! * [`complex`] – the flag complexes `X_k` and their grounding/connectivity checks.
//!
//! [`fixtures`] builds the standard examples and [`report`] runs the property suite
//! that backs the `report` command of the CLI.

pub mod agl;
pub mod complex;
mod error;
pub mod ff_poly;
pub mod fixtures;
pub mod mealy;
pub mod periodic;
pub mod perm;
pub mod report;
pub mod rover;
pub mod series;

pub use error::{Error, Result};
