//! Centralized and distributed surface layouts of equal total area.
//!
//! A `W × H` surface hosts either one disk of radius `R`, four disks of radius
//! `R/2` at `(±W/4, ±H/4)`, or sixteen disks of radius `R/4` on the grid
//! `x, y ∈ {±W/8, ±3W/8}` (resp. `H`). Fisher information of independent
//! apertures adds.

use std::f64::consts::PI;
use std::fmt;

use log::warn;

use crate::error::{require_positive, Error, Result};
use crate::fisher::{crlb_numeric, NumericOptions};
use crate::matrix::CrlbMatrix;
use crate::model::{RadioConfig, TerminalPosition};
use crate::quadrature::Disk;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Split {
    One,
    Four,
    Sixteen,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::One, Split::Four, Split::Sixteen];

    pub fn count(self) -> u32 {
        match self {
            Split::One => 1,
            Split::Four => 4,
            Split::Sixteen => 16,
        }
    }

    /// Per-disk radius as a fraction of the total radius.
    fn radius_fraction(self) -> f64 {
        match self {
            Split::One => 1.0,
            Split::Four => 0.5,
            Split::Sixteen => 0.25,
        }
    }
}

impl TryFrom<u32> for Split {
    type Error = Error;

    fn try_from(n: u32) -> Result<Self> {
        match n {
            1 => Ok(Split::One),
            4 => Ok(Split::Four),
            16 => Ok(Split::Sixteen),
            other => Err(Error::InvalidSplit(other)),
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.count())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeploymentLayout {
    pub width: f64,
    pub height: f64,
    pub split: Split,
    pub total_radius: f64,
    pub per_disk_radius: f64,
    pub centers: Vec<(f64, f64)>,
}

impl DeploymentLayout {
    pub fn disks(&self) -> Vec<Disk> {
        self.centers
            .iter()
            .map(|&(cx, cy)| Disk {
                cx,
                cy,
                radius: self.per_disk_radius,
            })
            .collect()
    }

    pub fn total_area(&self) -> f64 {
        self.centers.len() as f64 * PI * self.per_disk_radius * self.per_disk_radius
    }

    /// Human-readable notes on disks leaving the rectangle or overlapping.
    pub fn fit_warnings(&self) -> Vec<String> {
        let r = self.per_disk_radius;
        let mut notes = Vec::new();
        let outside = self
            .centers
            .iter()
            .any(|&(cx, cy)| cx.abs() + r > self.width / 2.0 || cy.abs() + r > self.height / 2.0);
        if outside {
            notes.push(format!(
                "disks of radius {r} extend beyond the {} x {} surface",
                self.width, self.height
            ));
        }
        let overlap = self.centers.iter().enumerate().any(|(i, a)| {
            self.centers[i + 1..]
                .iter()
                .any(|b| (a.0 - b.0).hypot(a.1 - b.1) < 2.0 * r)
        });
        if overlap {
            notes.push(format!("disks of radius {r} overlap"));
        }
        notes
    }
}

pub fn make_layout(
    width: f64,
    height: f64,
    split: Split,
    total_radius: f64,
) -> Result<DeploymentLayout> {
    require_positive("width", width)?;
    require_positive("height", height)?;
    require_positive("total_radius", total_radius)?;
    let centers = match split {
        Split::One => vec![(0.0, 0.0)],
        Split::Four => {
            let (x, y) = (width / 4.0, height / 4.0);
            vec![(x, y), (x, -y), (-x, y), (-x, -y)]
        }
        Split::Sixteen => {
            let offsets = [-3.0, -1.0, 1.0, 3.0];
            let mut c = Vec::with_capacity(16);
            for ox in offsets {
                for oy in offsets {
                    c.push((ox * width / 8.0, oy * height / 8.0));
                }
            }
            c
        }
    };
    let layout = DeploymentLayout {
        width,
        height,
        split,
        total_radius,
        per_disk_radius: total_radius * split.radius_fraction(),
        centers,
    };
    for note in layout.fit_warnings() {
        warn!("{note}");
    }
    Ok(layout)
}

/// Approximate diagonal Fisher information of the four-way layout for an
/// on-axis terminal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeploymentBound {
    /// Distance from the surface center to each disk center.
    pub d: f64,
    pub ixy: f64,
    pub iz: f64,
    /// `D << z0` simplification of `ixy`.
    pub ixy_far: f64,
    /// `D << z0` simplification of `iz`.
    pub iz_far: f64,
}

impl DeploymentBound {
    pub fn cxy(&self) -> f64 {
        1.0 / self.ixy
    }

    pub fn cz(&self) -> f64 {
        1.0 / self.iz
    }
}

/// `D = sqrt(W² + H²) / 4`.
pub fn center_distance(width: f64, height: f64) -> f64 {
    width.hypot(height) / 4.0
}

/// Far-field Fisher sum for the four-way split. The lateral term uses the
/// radial distance `D` for both axes, which is exact for square surfaces.
pub fn deployment_fisher_approx(
    z0: f64,
    layout: &DeploymentLayout,
    cfg: RadioConfig,
) -> Result<DeploymentBound> {
    require_positive("z0", z0)?;
    cfg.validate()?;
    if layout.split != Split::Four {
        return Err(Error::InvalidSplit(layout.split.count()));
    }
    let r = layout.total_radius;
    if r / 2.0 > 0.3 * z0 {
        warn!("per-disk radius {} is not small against z0 = {z0}", r / 2.0);
    }
    if layout.width != layout.height {
        warn!("lateral approximation assumes a square surface");
    }
    let d = center_distance(layout.width, layout.height);
    let (p2, l2) = (PI * PI, cfg.lambda * cfg.lambda);
    let (r2, d2) = (r * r, d * d);
    let q = (z0 * z0 + d2).powf(2.5);
    let scale = cfg.fisher_scale();
    let ixy = p2 * z0 * r2 * r2 / (16.0 * l2 * q) + p2 * d2 * z0 * r2 / (2.0 * l2 * q);
    let iz = p2 * r2 * z0.powi(3) / (l2 * q);
    let ixy_far = p2 * r2 * r2 / (4.0 * l2 * z0.powi(4)) * (0.25 + 2.0 * d2 / r2);
    let iz_far = p2 * r2 / (l2 * z0 * z0);
    Ok(DeploymentBound {
        d,
        ixy: ixy * scale,
        iz: iz * scale,
        ixy_far: ixy_far * scale,
        iz_far: iz_far * scale,
    })
}

/// Radius below which four-way splitting lowers the lateral CRLB:
/// `sqrt((W² + H²) / 6)`.
pub fn crossover_radius(width: f64, height: f64) -> Result<f64> {
    require_positive("width", width)?;
    require_positive("height", height)?;
    Ok(((width * width + height * height) / 6.0).sqrt())
}

pub fn deployment_crlb_numeric(
    t: TerminalPosition,
    layout: &DeploymentLayout,
    cfg: RadioConfig,
    opts: NumericOptions,
) -> Result<CrlbMatrix> {
    crlb_numeric(t, &layout.disks(), cfg, opts)
}

/// Bisection on `Cxx(centralized) - Cxx(four-way)` for an on-axis terminal.
/// The bracket `[lo, hi]` must contain a sign change.
pub fn crossover_radius_numeric(
    width: f64,
    height: f64,
    z0: f64,
    cfg: RadioConfig,
    bracket: (f64, f64),
    opts: NumericOptions,
    radius_tol: f64,
) -> Result<f64> {
    let t = TerminalPosition::on_axis(z0)?;
    require_positive("radius_tol", radius_tol)?;
    let gap = |r: f64| -> Result<f64> {
        let central =
            deployment_crlb_numeric(t, &make_layout(width, height, Split::One, r)?, cfg, opts)?;
        let split =
            deployment_crlb_numeric(t, &make_layout(width, height, Split::Four, r)?, cfg, opts)?;
        Ok(central.at(0, 0) - split.at(0, 0))
    };
    let (mut lo, mut hi) = bracket;
    require_positive("bracket.lo", lo)?;
    if hi <= lo {
        return Err(Error::InvalidParameter {
            name: "bracket.hi",
            value: hi,
            reason: "upper end must exceed lower end",
        });
    }
    let g_lo = gap(lo)?;
    let g_hi = gap(hi)?;
    if g_lo.signum() == g_hi.signum() {
        return Err(Error::InvalidParameter {
            name: "bracket",
            value: hi,
            reason: "no sign change of the CRLB difference inside the bracket",
        });
    }
    while hi - lo > radius_tol {
        let mid = 0.5 * (lo + hi);
        let g = gap(mid)?;
        if g.signum() == g_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
