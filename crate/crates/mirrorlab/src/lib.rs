//! Exact series, Picard-Fuchs operators, GLSM combinatorics and multiprecision Mellin-Barnes
//! integrals for the open/closed LG/CY correspondence of the quintic threefold.

pub mod error;
pub mod exact;
pub mod par;
pub mod series;

pub use error::{Error, Result};
pub use exact::Rational;
pub use par::ExecPolicy;
pub use series::{PuiseuxLogSeries, PuiseuxSeries};
pub mod ifunc;
pub mod pf;
pub mod enumerative;
pub mod glsm;
pub mod branes;
pub mod mb;
pub mod acceptance;
