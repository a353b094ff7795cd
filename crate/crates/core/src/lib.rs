//! Executable finite models of quasi-set theory.
//!
//! * [`kernel`]: canonical quasi-sets, indistinguishability, quasi-cardinals.
//! * [`algebra`]: power, U-relative singleton, pairs, product, unions.
//! * [`morphism`]: quasi-functions and the category laws.
//! * [`universe`]: bounded universe fragments and closure audits.
//! * [`lang`]: the `.qst` expression language.

pub mod algebra;
pub mod error;
pub mod gen;
pub mod json;
pub mod kernel;
pub mod lang;
pub mod morphism;
pub mod universe;

pub use algebra::{Caps, IndexedFamily};
pub use error::{Error, Result};
pub use kernel::{AtomRef, CAtomId, Elem, Kind, KindId, QCard, QSet, Signature};
pub use morphism::{LawReport, QuasiFunction, QuasiRelation};
pub use universe::{ClosureReport, Fragment, FragmentCaps};
