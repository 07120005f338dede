//! Magic squares of squares over finite fields, the rings Z/nZ and the
//! Gaussian integers.
//!
//! - [`algebra`]: carriers (F_p, F_{p^r}, Z/nZ), square sets, center pairs.
//! - [`grid`]: 3×3 grids, validation, dihedral symmetry, the `M(A, B, C)` form.
//! - [`gaussian`]: ℤ[i] arithmetic, the χ map, congruums, hourglass searches.
//! - [`search`]: the field and ring enumerations, Parker pre-filters, a
//!   brute-force oracle.
//! - [`survey`]: range scans with parallel workers, checkpoints and reports.

pub mod algebra;
pub mod arith;
pub mod error;
pub mod gaussian;
pub mod grid;
pub mod search;
pub mod survey;

pub use algebra::{
    make_carrier, Carrier, CarrierKind, Domain, ExclusionRule, Integers, StructureKind,
};
pub use error::{Error, Result};
pub use gaussian::GaussianInt;
pub use grid::{Grid3, ParamTriple, SquareTuple, ValidationReport};
pub use search::{AssignmentPolicy, PrefilterReason, SearchResult};
