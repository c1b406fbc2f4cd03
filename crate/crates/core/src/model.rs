//! Received field of an isotropic point source seen by a planar surface at `z = 0`.
//!
//! The noiseless signal at surface point `(x, y, 0)` from a terminal at
//! `(x0, y0, z0)` is
//!
//! ```text
//! s(x, y) = sqrt(z0) / (2 sqrt(pi) eta^(3/4)) * exp(-2 pi j sqrt(eta) / lambda)
//! eta     = z0^2 + (x - x0)^2 + (y - y0)^2
//! ```
//!
//! with unit transmit amplitude. Everything downstream (Fisher integrands,
//! closed forms) is built on the three derivatives of `s` with respect to the
//! terminal coordinates.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{require_finite, require_positive, Result};

/// Default noise spectral density. With `N0 = 2` the `2 / N0` factor in front
/// of every Fisher integral is one.
pub const DEFAULT_N0: f64 = 2.0;

/// Terminal location in metres. The terminal lives in the half-space `z0 > 0`;
/// `z0 = 0` is a singularity where no signal reaches the surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TerminalPosition {
    pub x0: f64,
    pub y0: f64,
    pub z0: f64,
}

impl TerminalPosition {
    pub fn new(x0: f64, y0: f64, z0: f64) -> Result<Self> {
        require_finite("x0", x0)?;
        require_finite("y0", y0)?;
        require_positive("z0", z0)?;
        Ok(Self { x0, y0, z0 })
    }

    /// Terminal on the central perpendicular line, `(0, 0, z0)`.
    pub fn on_axis(z0: f64) -> Result<Self> {
        Self::new(0.0, 0.0, z0)
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.x0, self.y0, self.z0).map(|_| ())
    }

    /// Distance of the terminal's projection from the origin, `sqrt(x0^2 + y0^2)`.
    pub fn lateral_offset(&self) -> f64 {
        self.x0.hypot(self.y0)
    }

    /// Euclidean distance to the origin.
    pub fn range(&self) -> f64 {
        (self.x0 * self.x0 + self.y0 * self.y0 + self.z0 * self.z0).sqrt()
    }

    pub fn is_on_axis(&self) -> bool {
        self.x0 == 0.0 && self.y0 == 0.0
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x0, self.y0, self.z0]
    }
}

/// A point `(x, y, 0)` on the surface plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub x: f64,
    pub y: f64,
}

impl SurfacePoint {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Carrier wavelength and noise level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioConfig {
    pub lambda: f64,
    pub n0: f64,
}

impl RadioConfig {
    /// Wavelength `lambda` with the default `N0 = 2`.
    pub fn new(lambda: f64) -> Result<Self> {
        Self::with_noise(lambda, DEFAULT_N0)
    }

    pub fn with_noise(lambda: f64, n0: f64) -> Result<Self> {
        require_positive("lambda", lambda)?;
        require_positive("n0", n0)?;
        Ok(Self { lambda, n0 })
    }

    pub fn validate(&self) -> Result<()> {
        Self::with_noise(self.lambda, self.n0).map(|_| ())
    }

    /// The `2 / N0` factor multiplying every Fisher entry.
    pub fn fisher_scale(&self) -> f64 {
        2.0 / self.n0
    }
}

/// Complex signal amplitude; dimensionless under unit transmit amplitude.
pub type ComplexField = Complex64;

/// Derivatives of the signal with respect to `x0`, `y0` and `z0` (1/m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldGradient {
    pub d1: ComplexField,
    pub d2: ComplexField,
    pub d3: ComplexField,
}

impl FieldGradient {
    pub fn component(&self, axis: Axis) -> ComplexField {
        match axis {
            Axis::X => self.d1,
            Axis::Y => self.d2,
            Axis::Z => self.d3,
        }
    }
}

/// Cartesian parameter index. `X = 1`, `Y = 2`, `Z = 3` when numbered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    /// Zero-based matrix index.
    pub const fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    /// One-based dimension index (1 = x, 2 = y, 3 = z).
    pub fn from_dim(dim: usize) -> Option<Axis> {
        match dim {
            1 => Some(Axis::X),
            2 => Some(Axis::Y),
            3 => Some(Axis::Z),
            _ => None,
        }
    }
}

/// The six upper-triangle entries of a symmetric 3x3 matrix, row-major.
pub const UPPER_TRIANGLE: [(Axis, Axis); 6] = [
    (Axis::X, Axis::X),
    (Axis::X, Axis::Y),
    (Axis::X, Axis::Z),
    (Axis::Y, Axis::Y),
    (Axis::Y, Axis::Z),
    (Axis::Z, Axis::Z),
];

/// Squared distance between a surface point and the terminal.
#[inline]
pub fn eta(p: SurfacePoint, t: TerminalPosition) -> f64 {
    let dx = p.x - t.x0;
    let dy = p.y - t.y0;
    t.z0 * t.z0 + dy * dy + dx * dx
}

/// Field model bound to one terminal and radio configuration.
///
/// Construction validates the inputs once so the per-point methods can stay
/// infallible inside quadrature loops.
#[derive(Debug, Clone, Copy)]
pub struct FieldModel {
    terminal: TerminalPosition,
    radio: RadioConfig,
    amplitude: f64,
    wavenumber: f64,
    half_inv_z0_sq: f64,
    integrand_scale: f64,
}

impl FieldModel {
    pub fn new(terminal: TerminalPosition, radio: RadioConfig) -> Result<Self> {
        terminal.validate()?;
        radio.validate()?;
        let z0 = terminal.z0;
        let amplitude = z0.sqrt() / (2.0 * PI.sqrt());
        Ok(Self {
            terminal,
            radio,
            amplitude,
            wavenumber: 2.0 * PI / radio.lambda,
            half_inv_z0_sq: 0.5 / (z0 * z0),
            // (2/N0) * |sqrt(z0) / (2 sqrt(pi))|^2
            integrand_scale: radio.fisher_scale() * z0 / (4.0 * PI),
        })
    }

    pub fn terminal(&self) -> TerminalPosition {
        self.terminal
    }

    pub fn radio(&self) -> RadioConfig {
        self.radio
    }

    #[inline]
    fn phase_factor(&self, eta: f64) -> ComplexField {
        // Unwrapped phase; `from_polar` reduces it only through sin/cos.
        ComplexField::from_polar(1.0, -self.wavenumber * eta.sqrt())
    }

    pub fn signal(&self, p: SurfacePoint) -> ComplexField {
        let e = eta(p, self.terminal);
        self.amplitude * e.powf(-0.75) * self.phase_factor(e)
    }

    pub fn gradient(&self, p: SurfacePoint) -> FieldGradient {
        let t = self.terminal;
        let e = eta(p, t);
        let pw = Powers::new(e);
        let phase = self.phase_factor(e);
        let lateral = ComplexField::new(1.5 * pw.m7_4, self.wavenumber * pw.m5_4);
        let axial = ComplexField::new(
            self.half_inv_z0_sq * pw.m3_4 - 1.5 * pw.m7_4,
            -self.wavenumber * pw.m5_4,
        );
        FieldGradient {
            d1: self.amplitude * (p.x - t.x0) * lateral * phase,
            d2: self.amplitude * (p.y - t.y0) * lateral * phase,
            d3: self.amplitude * t.z0 * axial * phase,
        }
    }

    /// `(2/N0) Re{ ds_k conj(ds_i) }` evaluated through explicit complex products.
    /// Slow path kept for cross-checking [`FieldModel::integrand`].
    pub fn integrand_direct(&self, p: SurfacePoint, i: Axis, k: Axis) -> f64 {
        let g = self.gradient(p);
        self.radio.fisher_scale() * (g.component(k) * g.component(i).conj()).re
    }

    /// `(2/N0) Re{ ds_k conj(ds_i) }` with the common phase cancelled analytically.
    #[inline]
    pub fn integrand(&self, p: SurfacePoint, i: Axis, k: Axis) -> f64 {
        let (lo, hi) = if i <= k { (i, k) } else { (k, i) };
        let t = self.terminal;
        let u = p.x - t.x0;
        let v = p.y - t.y0;
        let e = t.z0 * t.z0 + u * u + v * v;
        let pw = Powers::new(e);
        let a = 1.5 * pw.m7_4;
        let b = self.wavenumber * pw.m5_4;
        let lateral_sq = a * a + b * b;
        let c = self.integrand_scale;
        match (lo, hi) {
            (Axis::X, Axis::X) => c * u * u * lateral_sq,
            (Axis::X, Axis::Y) => c * u * v * lateral_sq,
            (Axis::Y, Axis::Y) => c * v * v * lateral_sq,
            (Axis::Z, Axis::Z) => {
                let a3 = self.half_inv_z0_sq * pw.m3_4 - a;
                c * t.z0 * t.z0 * (a3 * a3 + b * b)
            }
            (Axis::X, Axis::Z) | (Axis::Y, Axis::Z) => {
                let a3 = self.half_inv_z0_sq * pw.m3_4 - a;
                let lever = if lo == Axis::X { u } else { v };
                c * t.z0 * lever * (a3 * a - b * b)
            }
            _ => unreachable!("ordered pair"),
        }
    }
}

/// Fractional powers of `eta` shared by the derivative formulas.
#[derive(Clone, Copy)]
struct Powers {
    m3_4: f64,
    m5_4: f64,
    m7_4: f64,
}

impl Powers {
    #[inline]
    fn new(eta: f64) -> Self {
        let sq = eta.sqrt();
        let qr = sq.sqrt();
        let m3_4 = 1.0 / (sq * qr);
        let m5_4 = m3_4 / sq;
        let m7_4 = m5_4 / sq;
        Self { m3_4, m5_4, m7_4 }
    }
}

pub fn signal(p: SurfacePoint, t: TerminalPosition, cfg: RadioConfig) -> Result<ComplexField> {
    Ok(FieldModel::new(t, cfg)?.signal(p))
}

pub fn signal_gradient(
    p: SurfacePoint,
    t: TerminalPosition,
    cfg: RadioConfig,
) -> Result<FieldGradient> {
    Ok(FieldModel::new(t, cfg)?.gradient(p))
}

pub fn fisher_integrand(
    p: SurfacePoint,
    t: TerminalPosition,
    cfg: RadioConfig,
    i: Axis,
    k: Axis,
) -> Result<f64> {
    Ok(FieldModel::new(t, cfg)?.integrand(p, i, k))
}
