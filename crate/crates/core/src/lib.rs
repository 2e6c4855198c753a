//! Exact-arithmetic machinery for quivers with admissible automorphisms.
//!
//! The crate builds split-quotient quivers, manipulates ADHM configurations
//! (moment-map relations, stability, group actions), embeds split-quotient
//! data into fixed points of diagram automorphisms, and realizes the
//! recursive isomorphism onto two-row Slodowy slices together with the
//! classical involutions it intertwines. All arithmetic is exact: scalars
//! live in Q or a cyclotomic field Q(zeta_N), so every identity checked by
//! the verification suites is checked with zero tolerance.
//!
//! Modules:
//! - [`scalar`], [`matrix`], [`partition`], [`linsys`], [`rng`]: exact
//!   linear algebra over cyclotomic rationals.
//! - [`quiver`]: quivers, admissible automorphisms, split-quotient
//!   construction, Cartan matrices.
//! - [`adhm`]: ADHM data for an arbitrary quiver, samplers, transporters.
//! - [`fold`]: diagram automorphisms of ADHM data, the embedding of
//!   split-quotient data, fixed-point classification.
//! - [`slodowy`]: sl2-triples, two-row slices, bilinear forms, the
//!   involution given by negative transpose.
//! - [`maffei`]: the matrix recursion, parameter extraction and the map
//!   onto the slice.
//! - [`verify`]: seeded property suites used by the CLI and the acceptance
//!   tests.

pub mod adhm;
pub mod error;
pub mod fixtures;
pub mod fold;
pub mod io;
pub mod linsys;
pub mod matrix;
pub mod maffei;
pub mod partition;
pub mod quiver;
pub mod rng;
pub mod scalar;
pub mod slodowy;
pub mod verify;

pub use error::{Error, Result};
pub use matrix::{AffineSolutionSet, Matrix, commutator, eigenspace, solve_linear};
pub use partition::{Partition, dominance_leq, jordan_type_nilpotent};
pub use scalar::{Rat, Scalar};

/// Matrices over the crate's exact scalar type.
pub type Mat = Matrix<Scalar>;
