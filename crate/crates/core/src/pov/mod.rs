//! Covariant POV measures: kernels, amplitudes and densities.

pub mod density;
pub mod kernel;
pub mod transform;

pub use density::{
    amplitude_field, density, density_at, density_with, quasi_baricentric_density, quasi_baricentric_density_at,
    AmplitudeChannel, AmplitudeField, DensityExport, DensityField, DensityOptions, Region, SectorFilter,
};
pub use kernel::{
    certify_kernel, certify_poincare_sectors, classify_kernel, BaricentricClass, CertificationReport, GammaGroup,
    GammaLabel, Kernel, KernelKind, PoincareEntry, PoincareKernel, SectorCertificate, TranslationKernel,
};
