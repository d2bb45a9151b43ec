//! Poincaré-covariant POV measures for event localization on Minkowski space-time.

pub mod definiteness;
pub mod error;
pub mod grid;
pub mod kinematics;
pub mod linalg;
pub mod mu_function;
pub mod observables;
pub mod packet;
pub mod pov;
pub mod quadrature;
pub mod scalar;
pub mod state;
pub mod unirep;

pub use definiteness::{
    correlator_r, correlator_r_hat, definiteness_probe, CorrelatorSample, DefinitenessReport, LimitEstimate, ProbeOptions,
};
pub use error::{Error, Result};
pub use kinematics::{
    lorentz_of_sl2c, minkowski_dot, spin_generators, su2_wigner_matrix, wigner_boost, wigner_rotation, Cartan,
    FourVector, HalfInt, LorentzMatrix, Sl2c,
};
pub use grid::{MomentumGrid, SpacetimeGrid};
pub use linalg::CMatrix;
pub use mu_function::MuFunction;
pub use observables::{
    abc_terms, apply_xi_filter, casimir_values, mean_coordinates_abc, mean_coordinates_moment, mean_coordinates_operator,
    proper_time_delay, xi_argument, ATermRoute, AbcTerms, CasimirValues, CoordinateEstimate, CoordinateRoute,
    ProperTimeDelay,
};
pub use packet::{make_packet, Envelope, PacketSpec, ScaledFamily};
pub use pov::{
    amplitude_field, certify_kernel, classify_kernel, density, density_at, quasi_baricentric_density, BaricentricClass,
    CertificationReport, DensityField, GammaLabel, Kernel, PoincareEntry, PoincareKernel, TranslationKernel,
};
pub use quadrature::{AxisRule, AxisSpec, TensorGrid};
pub use scalar::{Real, C};
pub use state::{Channel, ChannelTable, ResampleStatus, Resampled, StateSnapshot, WaveFunction};
pub use unirep::{build_generators, irrep_matrix_element, s_matrices, IrrepLabel, IrrepMatrix, Series, TruncatedIrrep};

pub type FourVector64 = FourVector<f64>;
pub type FourVector32 = FourVector<f32>;
pub type Sl2c64 = Sl2c<f64>;
pub type Sl2c32 = Sl2c<f32>;
pub type MomentumGrid64 = MomentumGrid<f64>;
pub type MomentumGrid32 = MomentumGrid<f32>;
pub type SpacetimeGrid64 = SpacetimeGrid<f64>;
pub type SpacetimeGrid32 = SpacetimeGrid<f32>;
pub type WaveFunction64 = WaveFunction<f64>;
pub type WaveFunction32 = WaveFunction<f32>;
pub type Kernel64 = Kernel<f64>;
pub type Kernel32 = Kernel<f32>;
pub type TranslationKernel64 = TranslationKernel<f64>;
pub type TranslationKernel32 = TranslationKernel<f32>;
pub type PoincareKernel64 = PoincareKernel<f64>;
pub type PoincareKernel32 = PoincareKernel<f32>;
pub type DensityField64 = DensityField<f64>;
pub type DensityField32 = DensityField<f32>;
