//! Computing with Grothendieck topologies, Lawvere–Tierney topologies and
//! covering topologies on presheaf topoi over finite categories.
//!
//! Everything here works with finite-set-valued presheaves, so every
//! construction is decidable and every universal property can be checked by
//! exhaustive search. The modules build on each other bottom-up:
//!
//! - [`fincat`]: finite categories given by total composition tables.
//! - [`presheaf`]: presheaves, natural transformations, finite (co)limits,
//!   image factorization, diagonals and connectivity.
//! - [`classifier`]: sieves, the Lawvere object Ω, subobject lattices and
//!   characteristic maps.
//! - [`topology`]: Grothendieck topologies, closure operators on Ω and
//!   covering classes, with conversions, generation and enumeration.
//! - [`factor`]: orthogonality and the dense–closed / cover–closed
//!   factorization systems.
//! - [`sheaf`]: the sheaf condition, the plus construction and
//!   sheafification.
//! - [`forcing`]: compiling forcing conditions to topologies, topological
//!   parts, hypercoverings and factorizations of localizations.

pub mod bits;
pub mod caps;
pub mod classifier;
pub mod corpus;
mod error;
pub mod factor;
pub mod fincat;
pub mod forcing;
pub mod presheaf;
pub mod sheaf;
pub mod sites;
pub mod topology;

pub use caps::SizeCaps;
pub use classifier::{Omega, Sieve, Subobject, SubobjectLattice};
pub use error::{Error, Result};
pub use factor::Factorization;
pub use fincat::{ArrowId, FinCat, FinFunctor, ObjId, RawCategory};
pub use forcing::{ForcingCondition, Theta};
pub use presheaf::{Connectivity, Diagram, Presheaf, PresheafMap};
pub use sheaf::LocalizationHandle;
pub use topology::{CoveringClass, GrothTopology, LtTopology};
