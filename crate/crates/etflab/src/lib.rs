//! Energies of unit-vector configurations on hyperspheres: cross-entropy
//! losses whose minimizers are simplex equiangular tight frames, uniformity
//! diagnostics for the many-points regime, and the Gegenbauer expansion
//! machinery behind the energy gap.

pub mod energy;
pub mod error;
pub mod gegenbauer;
pub mod json;
pub mod optimize;
pub mod quad;
pub mod scalar;
pub mod sphere;
pub mod uniformity;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use scalar::Real;
pub use sphere::{Configuration, GramMatrix, PairConfiguration};

/// Working-precision aliases; the CLI and file formats use these.
pub type Configuration64 = sphere::Configuration<f64>;
pub type PairConfiguration64 = sphere::PairConfiguration<f64>;
pub type GramMatrix64 = sphere::GramMatrix<f64>;
pub type EnergyReport64 = energy::EnergyReport<f64>;
pub type OptResult64 = optimize::OptResult<f64>;
pub type GegenbauerSeries64 = gegenbauer::GegenbauerSeries<f64>;
pub type UniformityReport64 = uniformity::UniformityReport<f64>;

/// Reduced-precision aliases for callers that want f32 throughout.
pub type Configuration32 = sphere::Configuration<f32>;
pub type PairConfiguration32 = sphere::PairConfiguration<f32>;
pub type GramMatrix32 = sphere::GramMatrix<f32>;
