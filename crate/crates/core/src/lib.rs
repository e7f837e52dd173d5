//! Two-photon transverse correlations of phase-matched spontaneous parametric
//! down-conversion: densities in dimensionless coordinates, EPR and Mancini
//! criteria, negentropy-based non-Gaussianity and the Gaussian-state
//! relative-entropy measure.
//!
//! All numerical integration runs through [`quadrature`], which evaluates
//! independent panels through [`exec::map`] (rayon when the `parallel`
//! feature is on).

pub mod distributions;
pub mod entropy;
mod error;
pub mod exec;
pub mod gstate;
pub mod moments;
pub mod quadrature;
pub mod specfun;

pub use distributions::{
    conditional_of, gaussian_equivalent, make_density, marginal_of, matched_alpha, DensitySpec, Form, Model, Params,
    PhysicalSetup, Plane,
};
pub use entropy::{
    differential_entropy, gaussian_entropy_closed, marginal_negentropy_limits, negentropy, ng_report, NegentropyValue,
    NgReport,
};
pub use error::{Error, Result};
pub use gstate::{delta_b, purity, symplectic_spectrum, two_mode_cov, SymplecticSpectrum, TwoModeCov};
pub use moments::{
    conditional_variances, covariance_closed, covariance_numeric, epr_product, find_epr_crossings,
    gaussian_conditional_variances, mancini_product, schmidt_number, ConditionalVariances, Cov2, EprResult,
};
pub use quadrature::{Domain, Estimate, QuadError, QuadTolerance, Transform};
pub use specfun::{matching_alpha, shape_constants, sinc, sine_integral, sint, Shape, ShapeConstants};
