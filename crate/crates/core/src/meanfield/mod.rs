//! Infinite-width mean-field maps for the pre-activation variance and
//! covariance, their fixed points, and the order-to-chaos boundary they
//! predict.

pub mod boundary;
pub mod fixed_point;
pub mod maps;
pub mod quadrature;

pub use boundary::{trace_boundary, BoundaryRow, BoundarySearch};
pub use fixed_point::{
    fixed_point_covariance, fixed_point_variance, mean_field_divergence, mean_field_point, MeanFieldPoint,
    SolverOptions,
};
pub use maps::{covariance_map, variance_map};
pub use quadrature::QuadratureRule;
