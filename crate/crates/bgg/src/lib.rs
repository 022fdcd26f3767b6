//! Tate resolutions of coherent sheaves on projective space, computed over the
//! exterior algebra, and the sheaf invariants that can be read off from them.
//!
//! All arithmetic is exact. Algorithms are generic over a [`scalar::Field`];
//! [`scalar::PrimeField`] is the fast default and [`scalar::Rationals`] is
//! available for characteristic-zero cross-checks.

pub mod complexes;
pub mod error;
pub mod exterior;
pub mod geometry;
pub mod linalg;
pub mod scalar;
pub mod symmetric;
pub mod tate;
pub mod transforms;
pub mod zoo;

pub use error::{BggError, Result};

/// Version tag mixed into cache keys.
pub const ENGINE_VERSION: &str = concat!("bgg-", env!("CARGO_PKG_VERSION"));
