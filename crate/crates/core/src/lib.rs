//! Cramér–Rao lower bounds for positioning a terminal with a large intelligent
//! surface.
//!
//! The surface is modelled as one or more disk apertures in the plane `z = 0`
//! receiving a narrowband signal from a terminal at `(x0, y0, z0)`, `z0 > 0`.
//! Fisher information is available by adaptive quadrature ([`fisher`]), in
//! closed form on the central perpendicular line ([`closed_form`]), and by
//! off-axis approximations ([`approx`]). [`transforms`] moves bounds into
//! spherical coordinates and [`deployment`] compares split layouts.

#![cfg_attr(test, allow(clippy::needless_range_loop))]

pub mod approx;
pub mod closed_form;
pub mod deployment;
pub mod error;
pub mod fisher;
pub mod matrix;
pub mod model;
pub mod quadrature;
pub mod transforms;

pub use approx::{
    check_conditions, crlb_approx_prop1, crlb_approx_prop2, crlb_matrix_prop2, fisher_approx_prop1,
    ApproxFisherParams, ConditionReport, FarFieldCrlb,
};
pub use closed_form::{
    crlb_cpl_simplified, crlb_cpl_small_tau, crlb_limit, fisher_cpl, CplConfig, CplCrlb, CplFisher,
};
pub use deployment::{
    crossover_radius, crossover_radius_numeric, deployment_crlb_numeric, deployment_fisher_approx,
    make_layout, DeploymentBound, DeploymentLayout, Split,
};
pub use error::{Error, Result};
pub use fisher::{crlb_numeric, fisher_matrix, fisher_sum, NumericOptions};
pub use matrix::{crlb_from_fisher, CrlbMatrix, FisherMatrix, Provenance};
pub use model::{Axis, FieldModel, RadioConfig, SurfacePoint, TerminalPosition};
pub use quadrature::{integrate_disk, Disk, QuadratureResult, Tolerance};
pub use transforms::{
    cart_to_sph, crlb_spherical, fisher_spherical, sph_to_cart, SphericalCrlb, SphericalMethod,
    SphericalPosition,
};
