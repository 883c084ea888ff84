//! Sporadic complex hyperbolic triangle groups: exact construction,
//! non-discreteness tests, partial Dirichlet domains and arithmeticity.
pub mod arith;
pub mod census;
pub mod classify;
pub mod cyclofield;
pub mod dirichlet;
pub mod discretetest;
pub mod hermlinalg;
pub mod hp;
pub mod spgroups;

pub use cyclofield::{CycNum, FieldError};
pub use hermlinalg::{HermForm, Mat3, Signature, Vec3};
pub use spgroups::{SporadicId, TriangleGroup, Word};
