//! Closed-form approximations for terminals off the central perpendicular line.
//!
//! The Fisher matrix is approximated by a rank-two update
//! `α diag(1, 1, 0) + β v vᵀ`, `v = (x0/z0, y0/z0, 1)`, where `α` and `β` are
//! the on-axis closed forms evaluated at the terminal range `z1` and scaled by
//! `z0/z1` and `(z0/z1)³`. Its inverse is available in closed form. A cruder
//! far-field variant replaces the on-axis values by small-`τ` power laws.
//!
//! Accuracy depends on two conditions, reported by [`check_conditions`]:
//! `λ << z0² / sqrt(z0² + x0² + y0² + R²)` and
//! `2R << z0² / ρ + ρ` with `ρ = sqrt(x0² + y0²)`.

use std::f64::consts::PI;

use log::warn;

use crate::closed_form::{fisher_cpl, CplConfig, SMALL_TAU_LIMIT};
use crate::error::{require_positive, Error, Result};
use crate::matrix::{CrlbMatrix, FisherMatrix, Provenance};
use crate::model::{RadioConfig, TerminalPosition};

/// Ratio at or below which a "much less than" condition counts as satisfied.
pub const CONDITION_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionReport {
    /// `λ sqrt(z0² + x0² + y0² + R²) / z0²`
    pub cond1_ratio: f64,
    /// `2R / (z0²/ρ + ρ)`, zero on the axis.
    pub cond2_ratio: f64,
    pub cond1_satisfied: bool,
    pub cond2_satisfied: bool,
}

impl ConditionReport {
    pub fn satisfied(&self) -> bool {
        self.cond1_satisfied && self.cond2_satisfied
    }
}

pub fn check_conditions(t: TerminalPosition, radius: f64, cfg: RadioConfig) -> ConditionReport {
    let rho2 = t.x0 * t.x0 + t.y0 * t.y0;
    let z2 = t.z0 * t.z0;
    let cond1_ratio = cfg.lambda * (z2 + rho2 + radius * radius).sqrt() / z2;
    let cond2_ratio = if rho2 == 0.0 {
        0.0
    } else {
        let rho = rho2.sqrt();
        2.0 * radius / (z2 / rho + rho)
    };
    ConditionReport {
        cond1_ratio,
        cond2_ratio,
        cond1_satisfied: cond1_ratio <= CONDITION_THRESHOLD,
        cond2_satisfied: cond2_ratio <= CONDITION_THRESHOLD,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxFisherParams {
    /// Terminal range `sqrt(x0² + y0² + z0²)`.
    pub z1: f64,
    pub alpha: f64,
    pub beta: f64,
}

pub fn approx_params(
    t: TerminalPosition,
    radius: f64,
    cfg: RadioConfig,
) -> Result<ApproxFisherParams> {
    t.validate()?;
    cfg.validate()?;
    require_positive("radius", radius)?;
    let z1 = t.range();
    let on_axis = fisher_cpl(&CplConfig::new(z1, radius, cfg.lambda)?)?;
    let ratio = t.z0 / z1;
    let scale = cfg.fisher_scale();
    Ok(ApproxFisherParams {
        z1,
        alpha: ratio * on_axis.ixy * scale,
        beta: ratio.powi(3) * on_axis.iz * scale,
    })
}

fn warn_if_outside(t: TerminalPosition, radius: f64, cfg: RadioConfig) {
    let report = check_conditions(t, radius, cfg);
    if !report.satisfied() {
        warn!(
            "approximation conditions not met (ratios {:.3e}, {:.3e})",
            report.cond1_ratio, report.cond2_ratio
        );
    }
}

/// Rank-two Fisher matrix built from `α` and `β`.
pub fn fisher_from_params(t: TerminalPosition, p: &ApproxFisherParams) -> FisherMatrix {
    let (a, b) = (p.alpha, p.beta);
    let (u, v) = (t.x0 / t.z0, t.y0 / t.z0);
    FisherMatrix::from_upper(
        [a + b * u * u, b * u * v, b * u, a + b * v * v, b * v, b],
        Provenance::Prop1Approx,
    )
}

/// Closed-form inverse of [`fisher_from_params`].
pub fn crlb_from_params(t: TerminalPosition, p: &ApproxFisherParams) -> Result<CrlbMatrix> {
    require_positive("alpha", p.alpha)?;
    require_positive("beta", p.beta)?;
    let (a, b) = (p.alpha, p.beta);
    let (x0, y0, z0) = (t.x0, t.y0, t.z0);
    Ok(CrlbMatrix::from_upper(
        [
            1.0 / a,
            0.0,
            -x0 / (a * z0),
            1.0 / a,
            -y0 / (a * z0),
            1.0 / b + (x0 * x0 + y0 * y0) / (a * z0 * z0),
        ],
        Provenance::Prop1Approx,
    ))
}

pub fn fisher_approx_prop1(
    t: TerminalPosition,
    radius: f64,
    cfg: RadioConfig,
) -> Result<FisherMatrix> {
    let p = approx_params(t, radius, cfg)?;
    warn_if_outside(t, radius, cfg);
    Ok(fisher_from_params(t, &p))
}

pub fn crlb_approx_prop1(t: TerminalPosition, radius: f64, cfg: RadioConfig) -> Result<CrlbMatrix> {
    let p = approx_params(t, radius, cfg)?;
    warn_if_outside(t, radius, cfg);
    crlb_from_params(t, &p)
}

/// Far-field CRLBs (`R << z0`): `cxy` for each of x and y, `cz` for z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FarFieldCrlb {
    pub cxy: f64,
    pub cz: f64,
}

/// `Cxy = 4λ² z1⁵ / (π² z0 R⁴)`,
/// `Cz = λ² z0² / (π² R²) + 4λ² (x0² + y0²) z1⁵ / (π² z0³ R⁴)`; scaled by `N0/2`.
pub fn crlb_approx_prop2(
    t: TerminalPosition,
    radius: f64,
    cfg: RadioConfig,
) -> Result<FarFieldCrlb> {
    t.validate()?;
    cfg.validate()?;
    require_positive("radius", radius)?;
    if radius / t.z0 > SMALL_TAU_LIMIT {
        warn!("R/z0 = {} is outside the far-field regime", radius / t.z0);
    }
    warn_if_outside(t, radius, cfg);
    let (z0, l2, p2) = (t.z0, cfg.lambda * cfg.lambda, PI * PI);
    let z1_5 = t.range().powi(5);
    let r2 = radius * radius;
    let rho2 = t.x0 * t.x0 + t.y0 * t.y0;
    let noise = 1.0 / cfg.fisher_scale();
    let cxy = 4.0 * l2 * z1_5 / (p2 * z0 * r2 * r2);
    let cz = l2 * z0 * z0 / (p2 * r2) + 4.0 * l2 * rho2 * z1_5 / (p2 * z0.powi(3) * r2 * r2);
    Ok(FarFieldCrlb {
        cxy: cxy * noise,
        cz: cz * noise,
    })
}

/// Full matrix view of the far-field approximation: diagonal from
/// [`crlb_approx_prop2`], couplings from the rank-two structure with
/// `α = 1/Cxy` (`C12 = 0`, `C13 = -x0 Cxy / z0`, `C23 = -y0 Cxy / z0`).
pub fn crlb_matrix_prop2(t: TerminalPosition, radius: f64, cfg: RadioConfig) -> Result<CrlbMatrix> {
    let c = crlb_approx_prop2(t, radius, cfg)?;
    if !(c.cxy.is_finite() && c.cz.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "radius",
            value: radius,
            reason: "far-field bound is not finite",
        });
    }
    Ok(CrlbMatrix::from_upper(
        [
            c.cxy,
            0.0,
            -t.x0 * c.cxy / t.z0,
            c.cxy,
            -t.y0 * c.cxy / t.z0,
            c.cz,
        ],
        Provenance::Prop2Approx,
    ))
}
