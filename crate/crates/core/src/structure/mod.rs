//! Linear structure of a packed item set: the constructive parts, over exact
//! rationals.

pub mod context;
pub mod fractional;
pub mod pipeline;
pub mod vectors;
pub mod verify;
pub mod weak;

pub use context::{build_context, StructureContext, TypeVec};
pub use fractional::{fractional_first_fit, item_per_bin};
pub use pipeline::{build_structure_solution, StructureReport};
pub use vectors::{build_structure_vectors, check_structure_inequalities, tolerance, StructureVector};
pub use verify::{structure_certificate, Certificate, CheckResult};
pub use weak::{build_weak_structure_solution, check_alpha_scaled, WeakStructureReport};
