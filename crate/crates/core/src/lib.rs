pub mod coeff_ring;
pub mod error;
pub mod hecke_ring;

pub use error::{Error, Result};
pub mod linalg_local;
pub mod koszul;
pub mod theorem;
pub mod report;
