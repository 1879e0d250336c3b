//! Closure, spreading and saturating operators on Steiner triple systems,
//! plus the constructions and completions used to study them.

pub mod closure;
pub mod completion;
pub mod constructions;
pub mod error;
pub mod format;
pub mod limits;
pub mod pointset;
pub mod saturation;
pub mod spread;
pub mod system;

pub use error::{Error, Result};
pub use pointset::PointSet;
pub use system::{GeometryTag, Kind, Triple, TripleSystem, Variant};
