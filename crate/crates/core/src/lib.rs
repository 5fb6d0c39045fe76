//! Generalized trigonometric functions `S_{n,k}`: the inverses of
//! `F_{n,k}(y) = int_0^y (1 - x^n)^(-k/n) dx`, continued analytically to
//! their maximal domain of univalence.

pub mod batch;
pub mod checks;
pub mod cli;
pub mod error;
pub mod forward;
pub mod geometry;
pub mod inverse;
pub mod params;
pub mod quadrature;
pub mod series;

pub use error::{Error, Result};
pub use forward::{constants, kernel, BoundaryPoint, Constants, Edge, ForwardMap};
pub use geometry::{Domain, Membership, Reduced, Region, RegionKind, Status};
pub use inverse::{EvalConfig, InverseMap, PeriodicValue, PoleProbe};
pub use params::{ComplexValue, Params, Plane};
pub use quadrature::{IntegralResult, QuadConfig, RegularizedKind};
pub use series::{f_series, radius_estimate, s_series, CoefficientSeries, RadiusEstimate, RadiusMethod, SeriesRole};
