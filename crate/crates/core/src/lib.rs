//! The (p,ν)-extended Beta function `B_{p,ν}(x, y)` and the extended Appell
//! function `F_{1,p,ν}`, with independent numerical routes for every identity
//! they satisfy.

pub mod bessel;
pub mod error;
pub mod ext_appell;
pub mod ext_beta;
pub mod golden;
pub mod hyper;
pub mod meijer;
pub mod mellin;
pub mod oracle;
pub mod quadrature;
pub mod report;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::ComplexScalar;
