//! Exact, finitely-represented combinatorics of near-bijections of ℕ.
//!
//! A *near-bijection* is a bijection between two cofinite subsets of ℕ.  Two
//! near-bijections that agree off a finite set induce the same self-map of the
//! quotient structure "subsets of ℕ modulo finite sets", and the induced maps
//! form a group under composition.  This crate implements the computable side
//! of that picture:
//!
//! * [`setspec`] — symbolic infinite/finite subsets of ℕ (and ℤ) built from
//!   eventually periodic and geometric atoms, with an exact decision procedure
//!   for "is the symmetric difference finite?".
//! * [`nearbij`] — near-bijections with finite exception tables and eventually
//!   periodic affine tails: composition, inversion, mod-finite equality, the
//!   integer index `h`, and a complete orbit census.
//! * [`blockperm`] — permutations of ℕ assembled from consecutive blocks, each
//!   cycled, with block sizes drawn from a symbolic set or an eventually
//!   periodic sequence.
//! * [`cycletype`] — cycle-type sequences with counts in ℕ ∪ {ℵ₀}, exact
//!   conjugacy in the full symmetric group, and the necessary-condition
//!   criterion for conjugacy modulo finite sets.
//! * [`shiftdyn`] — the shift n ↦ n+1 acting on symbolic subsets of ℤ:
//!   almost-invariance, minimality sweeps, and the two-ended splitting of
//!   bi-infinite orbits.
//! * [`oracle`] — independent brute force: finite-window simulation,
//!   exhaustive conjugacy search in small symmetric groups, explicit
//!   conjugator construction, and seeded finite modifications.
//! * [`dsl`] — the text format for declaring sets, near-bijections and block
//!   permutations, with a canonical printer.
//! * [`report`] — stable text/JSON report types used by the CLI.

pub mod arith;
pub mod blockperm;
pub mod cycletype;
pub mod dsl;
pub mod nearbij;
pub mod oracle;
pub mod report;
pub mod setspec;
pub mod shiftdyn;




pub use nearbij::{NearBijection, OrbitCensus};
pub use setspec::{Atom, SetComparison, SetSpec, Universe};


/// Anything that maps points of ℕ to points of ℕ, possibly partially.
///
/// The brute-force window machinery in [`oracle`] is generic over this trait
/// so that near-bijections, block permutations and plain finite permutations
/// can all be cross-checked by the same code.
pub trait PointMap {
    /// The image of `n`, or `None` when `n` is outside the domain.
    fn image(&self, n: u64) -> Option<u64>;
}
