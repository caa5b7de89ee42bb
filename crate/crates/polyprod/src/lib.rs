//! Abstract polytopes as ranked face posets.
//!
//! The crate represents a polytope by its Hasse diagram (faces plus cover
//! pairs) and builds everything else on top of that: validation of the
//! polytope axioms, the four standard polytope products (join, cartesian,
//! direct sum, topological), unique prime factorization with respect to each
//! product, flag enumeration, automorphism and monodromy groups as explicit
//! permutation groups, and structural reports for the extensions that show
//! up in product monodromy groups.

mod bits;

pub mod catalog;
pub mod expr;
pub mod factor;
pub mod iso;
pub mod monodromy;
pub mod perm;
pub mod poset;
pub mod products;
pub mod report;
pub mod symmetry;

pub use expr::{eval, parse, parse_eval, Expr, ExprError};
pub use factor::{factor, factor_cardinal, is_prime, oracle_factor, CardinalFactorization, FactorError};
pub use iso::{canonical_form, canonical_hash, is_isomorphic, CanonicalForm};
pub use monodromy::{monodromy_group, structure_report, ExtensionReport, MonodromyError};
pub use poset::{strip, validate_polytope, End, FacePoset, Polytope, PosetError, ValidationReport};
pub use products::{multi_product, product, ProductError, ProductKind};
pub use symmetry::{automorphism_group, flag_orbit_count, orbit_report, OrbitReport};

/// Runs the README's Rust snippet as a doctest so it cannot drift.
#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
pub struct ReadmeDoctests;

