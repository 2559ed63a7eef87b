//! Exact arithmetic and lattice-point counting in totally real cubic fields,
//! with the special values and asymptotic fits built on top of them.

pub mod asymptotics;
pub mod counting;
pub mod field;
pub mod field_spec;
pub mod format;
pub mod interval;
pub mod lattice;
pub mod lseries;
pub mod poly;
pub mod sum;
pub mod units;

pub use field::{Field, FieldElement, FieldError};
pub use field_spec::FieldSpec;
pub use poly::CubicPoly;
pub use units::{find_units, find_units_auto, SignCharacter, UnitSystem};
