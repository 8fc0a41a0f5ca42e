//! A five-symbol subshift that encodes trees on ℕ into the backward orbits of a
//! single point, together with an exact-arithmetic realization of the subshift
//! as a totally invariant subsystem of a skew product on the unit square.
//!
//! The crate is organized around the pipeline
//!
//! * [`words`] — finite words over ℕ, the canonical enumeration of ℕ^{<ℕ},
//!   trees, branch witnesses, and characteristic codes;
//! * [`subshift`] — the subshift `X ⊂ {0,1,2,3,4}^ℕ`, the `ω_n` builder, a
//!   constraint-solving membership decision for words and points, and
//!   predecessor/successor computations;
//! * [`orbits`] — backward-orbit enumeration, witness orbits, structural
//!   verification, finite-depth limit-set probes, and the truncated
//!   natural-extension metric;
//! * [`interval`] — the base-9 Cantor embedding, the 9-lap horseshoe, cylinder
//!   covers of follower sets, and certified distance enclosures;
//! * [`square`] — the gap function φ, the skew product `F(x,y) = (f(x), g_x(y))`,
//!   preimage construction, and figure-data emission;
//! * [`embed`] — the generic `r`-symbol subshift-to-square embedding;
//! * [`oracle`] — brute-force reference implementations used by the
//!   verification suites;
//! * [`verify`] — runnable invariant suites backing the `verify` CLI command.
//!
//! All certified computations use exact rational arithmetic; floating point
//! appears only in figure-data emission and is labeled non-certified.

pub mod error;
pub mod words;
pub mod subshift;
pub mod oracle;
pub mod orbits;
pub mod interval;
pub mod square;
pub mod embed;
pub mod verify;

pub use error::Error;
pub use interval::{Enclosure, Rational};
pub use subshift::SymbolicPoint;
pub use words::{BranchWitness, FiniteWord, TreeSpec};
