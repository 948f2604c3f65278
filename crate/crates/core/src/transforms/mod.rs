//! Laplace transforms, meromorphic continuation and spectral projections.

pub mod cauchy;
pub mod contour;
pub mod laplace;
pub mod toy;

pub use cauchy::{atom_mass, cauchy_transform, geometric_ladder, MeasureOnInterval, PiecewiseDensity};
pub use contour::{residue_contour, ContourIntegral, ContourValue, CONTOUR_TOL};
pub use laplace::{
    b_delta, extended_f, laplace_numeric, Correlation, ExtendedTransform, FnCorrelation, LaplaceValue,
    SampledCorrelation, SpectralAtoms,
};
pub use toy::{resolvent, resolvent_s, spectral_projection, spectral_radius_via_iterates, ToyOperator};
