//! Exact Fisher information by quadrature over one or more disk apertures.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::{crlb_from_fisher, CrlbMatrix, FisherMatrix, Provenance};
use crate::model::{Axis, FieldModel, RadioConfig, SurfacePoint, TerminalPosition};
use crate::quadrature::{integrate_disk_with, Disk, DiskOptions, Tolerance, DEFAULT_MAX_EVALS};

/// Quadrature settings for a Fisher assembly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericOptions {
    pub tol: Tolerance,
    pub max_evals: usize,
}

impl Default for NumericOptions {
    fn default() -> Self {
        Self {
            tol: Tolerance::default(),
            max_evals: DEFAULT_MAX_EVALS,
        }
    }
}

impl From<Tolerance> for NumericOptions {
    fn from(tol: Tolerance) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

/// Fisher matrix for one disk aperture at the default budget.
pub fn fisher_matrix(
    t: TerminalPosition,
    disk: Disk,
    cfg: RadioConfig,
    tol: Tolerance,
) -> Result<FisherMatrix> {
    fisher_matrix_with(t, disk, cfg, tol.into())
}

/// Integrates the diagonal entries first, then the off-diagonal ones in
/// parallel. Off-diagonal tolerances are relative to `sqrt(F_ii F_kk)`, which
/// bounds `|F_ik|`; entries that vanish by symmetry would otherwise chase the
/// absolute tolerance alone.
pub fn fisher_matrix_with(
    t: TerminalPosition,
    disk: Disk,
    cfg: RadioConfig,
    opts: NumericOptions,
) -> Result<FisherMatrix> {
    let model = FieldModel::new(t, cfg)?;
    disk.validate()?;
    let integrate = |(i, k): (Axis, Axis), tol: Tolerance| {
        integrate_disk_with(
            |x, y| model.integrand(SurfacePoint::new(x, y), i, k),
            disk,
            DiskOptions {
                tol,
                max_evals: opts.max_evals,
            },
        )
    };
    let diag = [Axis::X, Axis::Y, Axis::Z]
        .par_iter()
        .map(|&a| integrate((a, a), opts.tol))
        .collect::<Result<Vec<_>>>()?;
    let off = [(Axis::X, Axis::Y), (Axis::X, Axis::Z), (Axis::Y, Axis::Z)]
        .par_iter()
        .map(|&(i, k)| {
            let scale = (diag[i.index()].value * diag[k.index()].value).abs().sqrt();
            let tol = Tolerance {
                abs_tol: opts.tol.abs_tol.max(opts.tol.rel_tol * scale),
                rel_tol: opts.tol.rel_tol,
            };
            integrate((i, k), tol)
        })
        .collect::<Result<Vec<_>>>()?;
    let upper = [
        diag[0].value,
        off[0].value,
        off[1].value,
        diag[1].value,
        off[2].value,
        diag[2].value,
    ];
    let worst_err = diag
        .iter()
        .chain(&off)
        .fold(0.0_f64, |m, q| m.max(q.abs_error_estimate));
    Ok(FisherMatrix::from_upper(upper, Provenance::Numeric).with_quad_error(worst_err))
}

/// Sum of per-aperture Fisher matrices (independent observations).
pub fn fisher_sum(
    t: TerminalPosition,
    apertures: &[Disk],
    cfg: RadioConfig,
    tol: Tolerance,
) -> Result<FisherMatrix> {
    fisher_sum_with(t, apertures, cfg, tol.into())
}

pub fn fisher_sum_with(
    t: TerminalPosition,
    apertures: &[Disk],
    cfg: RadioConfig,
    opts: NumericOptions,
) -> Result<FisherMatrix> {
    if apertures.is_empty() {
        return Err(Error::InvalidParameter {
            name: "apertures",
            value: 0.0,
            reason: "at least one aperture is required",
        });
    }
    let parts = apertures
        .par_iter()
        .map(|&d| fisher_matrix_with(t, d, cfg, opts))
        .collect::<Result<Vec<_>>>()?;
    let mut total = parts[0];
    for p in &parts[1..] {
        total = total.add(p);
    }
    Ok(total)
}

/// CRLB matrix from the exact Fisher information of a set of apertures.
pub fn crlb_numeric(
    t: TerminalPosition,
    apertures: &[Disk],
    cfg: RadioConfig,
    opts: NumericOptions,
) -> Result<CrlbMatrix> {
    crlb_from_fisher(&fisher_sum_with(t, apertures, cfg, opts)?)
}
