//! Closed forms for a terminal on the central perpendicular line `(0, 0, z0)`
//! in front of a centred disk of radius `R`.
//!
//! Two independent routes give the diagonal Fisher entries:
//!
//! * the `A`, `B1`, `B2` constants: `Ixy = -B1/A`, `Iz = -2 B2/A`;
//! * the disk moments `g1(n) = ∬ x^2 eta^(-n/2)` and `g2(n) = ∬ eta^(-n/2)`,
//!   combined as `Ixy = z0/(4π) (9/4 g1(7) + 4π²/λ² g1(5))` and the analogous
//!   `g2` sum for `Iz`.
//!
//! Both suffer catastrophic cancellation when `R << z0` if typed in literally,
//! so the production paths evaluate the binomial tails of `(1 + τ²)^p`
//! directly. [`theorem_constants`] keeps the literal transcription for
//! cross-checking at moderate `τ`.
//!
//! All values here assume `N0 = 2`. Scale Fisher entries by `2/N0` otherwise.

use std::f64::consts::PI;

use log::warn;

use crate::error::{require_positive, Error, Result};

/// Maximum relative disagreement tolerated between the two closed-form routes.
pub const ROUTE_TOLERANCE: f64 = 1e-9;

/// Above this `τ` the small-`τ` power laws are flagged as unreliable.
pub const SMALL_TAU_LIMIT: f64 = 0.3;

/// Terminal distance, aperture radius and wavelength for an on-axis terminal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CplConfig {
    pub z0: f64,
    pub radius: f64,
    pub lambda: f64,
}

impl CplConfig {
    pub fn new(z0: f64, radius: f64, lambda: f64) -> Result<Self> {
        require_positive("z0", z0)?;
        require_positive("radius", radius)?;
        require_positive("lambda", lambda)?;
        Ok(Self { z0, radius, lambda })
    }

    /// `τ = R / z0`.
    pub fn tau(&self) -> f64 {
        self.radius / self.z0
    }

    fn validate(&self) -> Result<()> {
        Self::new(self.z0, self.radius, self.lambda).map(|_| ())
    }
}

/// Diagonal on-axis Fisher information: `Ixy = I11 = I22`, `Iz = I33`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CplFisher {
    pub ixy: f64,
    pub iz: f64,
}

impl CplFisher {
    pub fn crlb(&self) -> CplCrlb {
        CplCrlb {
            cxy: 1.0 / self.ixy,
            cz: 1.0 / self.iz,
        }
    }
}

/// On-axis CRLBs: `cxy` for each of x and y, `cz` for z (m^2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CplCrlb {
    pub cxy: f64,
    pub cz: f64,
}

/// `A`, `B1`, `B2` evaluated exactly as written. Loses precision for `τ << 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoremConstants {
    pub a: f64,
    pub b1: f64,
    pub b2: f64,
}

impl TheoremConstants {
    pub fn fisher(&self) -> CplFisher {
        CplFisher {
            ixy: -self.b1 / self.a,
            iz: -2.0 * self.b2 / self.a,
        }
    }
}

pub fn theorem_constants(c: &CplConfig) -> Result<TheoremConstants> {
    c.validate()?;
    let (z0, r, l2, p2) = (c.z0, c.radius, c.lambda * c.lambda, PI * PI);
    let s = (r * r + z0 * z0).powf(2.5);
    let a = 240.0 * l2 * z0.powi(2) * s;
    let b1 = 160.0 * p2 * z0.powi(7)
        + 400.0 * p2 * r.powi(2) * z0.powi(5)
        + 240.0 * p2 * z0.powi(3) * r.powi(4)
        - 18.0 * l2 * s
        - 160.0 * p2 * z0.powi(2) * s
        + 18.0 * l2 * z0.powi(5)
        + 45.0 * l2 * r.powi(2) * z0.powi(3);
    let b2 = 12.0 * l2 * z0.powi(5) - 12.0 * l2 * s + 80.0 * p2 * z0.powi(7)
        - 80.0 * p2 * z0.powi(2) * s
        + 15.0 * z0 * l2 * r.powi(4)
        + 80.0 * p2 * r.powi(2) * z0.powi(5);
    Ok(TheoremConstants { a, b1, b2 })
}

/// `(1 + t)^p - Σ_{j<k} C(p, j) t^j` for `t ≥ 0`, accurate even when the
/// leading terms cancel.
pub(crate) fn binomial_tail(p: f64, t: f64, k: usize) -> f64 {
    if t <= 0.5 {
        let mut coeff = 1.0;
        let mut power = 1.0;
        for j in 0..k {
            coeff *= (p - j as f64) / (j as f64 + 1.0);
            power *= t;
        }
        // coeff = C(p, k), power = t^k
        let mut term = coeff * power;
        let mut sum = 0.0;
        let mut j = k;
        loop {
            sum += term;
            if term == 0.0 || term.abs() <= 1e-18 * sum.abs() || j > k + 200 {
                break;
            }
            term *= (p - j as f64) / (j as f64 + 1.0) * t;
            j += 1;
        }
        sum
    } else {
        let mut head = 0.0;
        let mut coeff = 1.0;
        let mut power = 1.0;
        for j in 0..k {
            head += coeff * power;
            coeff *= (p - j as f64) / (j as f64 + 1.0);
            power *= t;
        }
        (1.0 + t).powf(p) - head
    }
}

/// Factored `A/B1/B2` route. With `t = τ²` and `q = (1 + t)^{5/2}`:
///
/// ```text
/// Ixy = [2π²/(3λ²) h1 + 3/(40 z0²) h1b] / q,  h1 = q - 1 - 5t/2 - 3t²/2,  h1b = q - 1 - 5t/2
/// Iz  = [2π²/(3λ²) h2 + 1/(10 z0²) h2b] / q,  h2 = q - 1 - t,             h2b = q - 1 - 5t²/4
/// ```
pub fn fisher_cpl_theorem(c: &CplConfig) -> Result<CplFisher> {
    c.validate()?;
    let t = c.tau().powi(2);
    let tail3 = binomial_tail(2.5, t, 3);
    let h1 = tail3 + 0.375 * t * t;
    let h1b = tail3 + 1.875 * t * t;
    let h2 = tail3 + 1.875 * t * t + 1.5 * t;
    let h2b = tail3 + 0.625 * t * t + 2.5 * t;
    let q = (1.0 + t).powf(2.5);
    let wave = 2.0 * PI * PI / (3.0 * c.lambda * c.lambda);
    let z2 = c.z0 * c.z0;
    Ok(CplFisher {
        ixy: (wave * h1 + 3.0 / (40.0 * z2) * h1b) / q,
        iz: (wave * h2 + 1.0 / (10.0 * z2) * h2b) / q,
    })
}

fn check_g_order(n: f64, forbidden: &[f64]) -> Result<()> {
    if !n.is_finite() || forbidden.contains(&n) {
        Err(Error::RemovableSingularity { n })
    } else {
        Ok(())
    }
}

/// `∬_{x²+y²≤R²} x² (z0² + x² + y²)^{-n/2} dx dy`.
pub fn g1(n: f64, z0: f64, radius: f64) -> Result<f64> {
    check_g_order(n, &[2.0, 4.0])?;
    require_positive("z0", z0)?;
    require_positive("radius", radius)?;
    let t = (radius / z0).powi(2);
    let m = 1.0 - 0.5 * n;
    // numerator 2 - (1+t)^m (2 + (n-2) t); rewritten around the O(t²) cancellation
    let numerator = if t <= 0.5 {
        2.0 * m * m * t * t - 2.0 * binomial_tail(m, t, 2) * (1.0 - m * t)
    } else {
        2.0 - (1.0 + t).powf(m) * (2.0 + (n - 2.0) * t)
    };
    Ok(PI * z0.powf(4.0 - n) * numerator / ((n - 2.0) * (n - 4.0)))
}

/// `∬_{x²+y²≤R²} (z0² + x² + y²)^{-n/2} dx dy`.
pub fn g2(n: f64, z0: f64, radius: f64) -> Result<f64> {
    check_g_order(n, &[2.0])?;
    require_positive("z0", z0)?;
    require_positive("radius", radius)?;
    let t = (radius / z0).powi(2);
    let m = 1.0 - 0.5 * n;
    let bracket = -((m * t.ln_1p()).exp_m1());
    Ok(2.0 * PI * z0.powf(2.0 - n) * bracket / (n - 2.0))
}

/// Disk-moment route for the on-axis Fisher entries.
pub fn fisher_cpl_moments(c: &CplConfig) -> Result<CplFisher> {
    c.validate()?;
    let (z0, r) = (c.z0, c.radius);
    let k2 = 4.0 * PI * PI / (c.lambda * c.lambda);
    let ixy = z0 / (4.0 * PI) * (2.25 * g1(7.0, z0, r)? + k2 * g1(5.0, z0, r)?);
    let iz = z0.powi(3) / (4.0 * PI)
        * (g2(3.0, z0, r)? / (4.0 * z0.powi(4))
            + (k2 - 1.5 / (z0 * z0)) * g2(5.0, z0, r)?
            + 2.25 * g2(7.0, z0, r)?);
    Ok(CplFisher { ixy, iz })
}

/// On-axis Fisher information. Both routes are evaluated and must agree to
/// [`ROUTE_TOLERANCE`]; both entries must be positive.
pub fn fisher_cpl(c: &CplConfig) -> Result<CplFisher> {
    let primary = fisher_cpl_theorem(c)?;
    let alternate = fisher_cpl_moments(c)?;
    for (quantity, p, a) in [
        ("Ixy", primary.ixy, alternate.ixy),
        ("Iz", primary.iz, alternate.iz),
    ] {
        if p.is_nan() || p <= 0.0 {
            return Err(Error::NonPositiveFisher { quantity, value: p });
        }
        if (p - a).is_nan() || (p - a).abs() > ROUTE_TOLERANCE * p.abs() {
            return Err(Error::RouteMismatch {
                quantity,
                primary: p,
                alternate: a,
            });
        }
    }
    if c.lambda > c.z0 / 100.0 {
        warn!(
            "lambda = {} is not small against z0 = {}; tau-only simplifications will be inaccurate",
            c.lambda, c.z0
        );
    }
    Ok(primary)
}

fn require_tau(tau: f64) -> Result<f64> {
    require_positive("tau", tau)
}

/// `f1(τ) = q / (q - 1 - 2.5τ² - 1.5τ⁴)` with `q = (1 + τ²)^{5/2}`.
pub fn f1(tau: f64) -> Result<f64> {
    let t = require_tau(tau)?.powi(2);
    let q = (1.0 + t).powf(2.5);
    Ok(q / (binomial_tail(2.5, t, 3) + 0.375 * t * t))
}

/// `f2(τ) = q / (q - 1 - τ²)`.
pub fn f2(tau: f64) -> Result<f64> {
    let t = require_tau(tau)?.powi(2);
    let q = (1.0 + t).powf(2.5);
    Ok(q / (binomial_tail(2.5, t, 2) + 1.5 * t))
}

/// `3λ² / (2π²)`: the on-axis CRLB for every axis as `R → ∞`.
pub fn crlb_limit(lambda: f64) -> f64 {
    3.0 * lambda * lambda / (2.0 * PI * PI)
}

/// CRLBs that depend on geometry only through `τ`; valid for `λ << z0`.
pub fn crlb_cpl_simplified(tau: f64, lambda: f64) -> Result<CplCrlb> {
    require_positive("lambda", lambda)?;
    let base = crlb_limit(lambda);
    Ok(CplCrlb {
        cxy: base * f1(tau)?,
        cz: base * f2(tau)?,
    })
}

/// Leading-order small-`τ` laws `4λ²/(π²τ⁴)` and `λ²/(π²τ²)`.
pub fn crlb_cpl_small_tau(tau: f64, lambda: f64) -> Result<CplCrlb> {
    require_tau(tau)?;
    require_positive("lambda", lambda)?;
    if tau > SMALL_TAU_LIMIT {
        warn!("tau = {tau} is outside the small-tau regime (> {SMALL_TAU_LIMIT})");
    }
    let l2 = lambda * lambda;
    Ok(CplCrlb {
        cxy: 4.0 * l2 / (PI * PI * tau.powi(4)),
        cz: l2 / (PI * PI * tau * tau),
    })
}
