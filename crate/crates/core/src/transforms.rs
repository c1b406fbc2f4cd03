//! Spherical reparametrization `(κ, φ, ψ)` of the terminal position.
//!
//! `x0 = κ sinφ cosψ`, `y0 = κ sinφ sinψ`, `z0 = κ cosφ`. Fisher information
//! transforms covariantly, `I_sph = Jᵀ I_cart J` with `J = ∂(x0, y0, z0)/∂(κ, φ, ψ)`.
//! On the axis (`φ = 0`) the azimuth column of `J` vanishes; only the
//! `(κ, φ)` block is identifiable there.

use std::f64::consts::{FRAC_PI_2, TAU};

use crate::approx::fisher_approx_prop1;
use crate::error::{require_finite, require_positive, Error, Result};
use crate::fisher::{fisher_matrix_with, NumericOptions};
use crate::matrix::{crlb_from_fisher, CrlbMatrix, FisherMatrix, Provenance};
use crate::model::{RadioConfig, TerminalPosition};
use crate::quadrature::Disk;

/// Polar angles below this are treated as lying on the axis.
pub const AXIS_ANGLE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalPosition {
    pub kappa: f64,
    /// Polar angle from the surface normal, in `[0, π/2)`.
    pub phi: f64,
    /// Azimuth in `[0, 2π)`.
    pub psi: f64,
}

impl SphericalPosition {
    /// Validates `κ` and `φ`; `ψ` is wrapped into `[0, 2π)`.
    pub fn new(kappa: f64, phi: f64, psi: f64) -> Result<Self> {
        require_positive("kappa", kappa)?;
        require_finite("psi", psi)?;
        if !(0.0..FRAC_PI_2).contains(&phi) {
            return Err(Error::InvalidParameter {
                name: "phi",
                value: phi,
                reason: "polar angle must lie in [0, pi/2)",
            });
        }
        let mut psi = psi.rem_euclid(TAU);
        if psi >= TAU {
            psi = 0.0;
        }
        Ok(Self { kappa, phi, psi })
    }

    pub fn is_on_axis(&self) -> bool {
        self.phi < AXIS_ANGLE_EPS
    }
}

pub fn sph_to_cart(s: SphericalPosition) -> Result<TerminalPosition> {
    let s = SphericalPosition::new(s.kappa, s.phi, s.psi)?;
    let (sp, cp) = s.phi.sin_cos();
    let (ss, cs) = s.psi.sin_cos();
    TerminalPosition::new(s.kappa * sp * cs, s.kappa * sp * ss, s.kappa * cp)
}

pub fn cart_to_sph(t: TerminalPosition) -> Result<SphericalPosition> {
    t.validate()?;
    let kappa = t.range();
    let rho = t.lateral_offset();
    let phi = rho.atan2(t.z0);
    let psi = if rho == 0.0 { 0.0 } else { t.y0.atan2(t.x0) };
    SphericalPosition::new(kappa, phi, psi)
}

/// `J[i][j] = ∂cart_i / ∂sph_j`, columns ordered `(κ, φ, ψ)`.
pub fn jacobian(s: SphericalPosition) -> [[f64; 3]; 3] {
    let k = s.kappa;
    let (sp, cp) = s.phi.sin_cos();
    let (ss, cs) = s.psi.sin_cos();
    [
        [sp * cs, k * cp * cs, -k * sp * ss],
        [sp * ss, k * cp * ss, k * sp * cs],
        [cp, -k * sp, 0.0],
    ]
}

fn sandwich<const N: usize>(f: &[[f64; 3]; 3], j: &[[f64; 3]; 3]) -> [[f64; N]; N] {
    let mut out = [[0.0; N]; N];
    for (a, row) in out.iter_mut().enumerate() {
        for (b, slot) in row.iter_mut().enumerate() {
            let mut acc = 0.0;
            for p in 0..3 {
                for q in 0..3 {
                    acc += j[p][a] * f[p][q] * j[q][b];
                }
            }
            *slot = acc;
        }
    }
    out
}

/// `Jᵀ F J` in the `(κ, φ, ψ)` basis. Fails on the axis, where `ψ` carries no
/// information.
pub fn fisher_spherical(f: &FisherMatrix, s: SphericalPosition) -> Result<FisherMatrix> {
    if s.is_on_axis() {
        return Err(Error::UnidentifiableAzimuth);
    }
    let m = sandwich::<3>(&f.entries(), &jacobian(s));
    Ok(FisherMatrix::new(m, f.provenance()).with_quad_error(f.quad_error()))
}

/// `(κ, φ)` block of `Jᵀ F J`; defined everywhere, including the axis.
pub fn fisher_identifiable_block(f: &FisherMatrix, s: SphericalPosition) -> [[f64; 2]; 2] {
    sandwich::<2>(&f.entries(), &jacobian(s))
}

/// How the Cartesian Fisher matrix feeding the transform is obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SphericalMethod {
    Numeric(NumericOptions),
    Prop1,
}

/// Spherical CRLB, or its identifiable part when the azimuth is undefined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SphericalCrlb {
    Full(CrlbMatrix),
    AzimuthUnidentifiable {
        /// CRLB of `(κ, φ)` alone.
        block: [[f64; 2]; 2],
        provenance: Provenance,
    },
}

impl SphericalCrlb {
    pub fn kappa_kappa(&self) -> f64 {
        match self {
            Self::Full(c) => c.at(0, 0),
            Self::AzimuthUnidentifiable { block, .. } => block[0][0],
        }
    }

    pub fn phi_phi(&self) -> f64 {
        match self {
            Self::Full(c) => c.at(1, 1),
            Self::AzimuthUnidentifiable { block, .. } => block[1][1],
        }
    }

    pub fn psi_psi(&self) -> Option<f64> {
        match self {
            Self::Full(c) => Some(c.at(2, 2)),
            Self::AzimuthUnidentifiable { .. } => None,
        }
    }

    pub fn provenance(&self) -> Provenance {
        match self {
            Self::Full(c) => c.provenance(),
            Self::AzimuthUnidentifiable { provenance, .. } => *provenance,
        }
    }
}

fn invert_block(m: [[f64; 2]; 2]) -> Result<[[f64; 2]; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let scale = m[0][0].abs().max(m[1][1].abs());
    if !(det.is_finite() && det > 0.0 && m[0][0] > 0.0 && det > 1e-24 * scale * scale) {
        return Err(Error::SingularFisher {
            condition: f64::INFINITY,
            null_direction: [0.0; 3],
        });
    }
    Ok([
        [m[1][1] / det, -m[0][1] / det],
        [-m[1][0] / det, m[0][0] / det],
    ])
}

/// CRLB of `(κ, φ, ψ)` for a terminal in front of a centered disk of `radius`.
pub fn crlb_spherical(
    s: SphericalPosition,
    radius: f64,
    cfg: RadioConfig,
    method: SphericalMethod,
) -> Result<SphericalCrlb> {
    let t = sph_to_cart(s)?;
    let f = match method {
        SphericalMethod::Numeric(opts) => {
            fisher_matrix_with(t, Disk::centered(radius)?, cfg, opts)?
        }
        SphericalMethod::Prop1 => fisher_approx_prop1(t, radius, cfg)?,
    };
    if s.is_on_axis() {
        let block = invert_block(fisher_identifiable_block(&f, s))?;
        return Ok(SphericalCrlb::AzimuthUnidentifiable {
            block,
            provenance: f.provenance(),
        });
    }
    Ok(SphericalCrlb::Full(crlb_from_fisher(&fisher_spherical(
        &f, s,
    )?)?))
}
