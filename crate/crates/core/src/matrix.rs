//! Symmetric 3x3 Fisher and CRLB matrices and the inversion between them.

use std::fmt;

use nalgebra::{Cholesky, Matrix3, SymmetricEigen};

use crate::error::{Error, Result};
use crate::model::Axis;

/// Condition number above which a Fisher matrix is treated as singular.
pub const MAX_CONDITION: f64 = 1e12;

/// Where a matrix came from. Travels with the values so reports can label rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    /// Adaptive quadrature of the Fisher integrals.
    Numeric,
    /// Exact closed form for a terminal on the central perpendicular line.
    ClosedForm,
    /// Rank-two approximation built from on-axis closed forms at the terminal range.
    Prop1Approx,
    /// Far-field power laws (`R << z0`).
    Prop2Approx,
    /// Aggregated deployment approximation.
    DeploymentApprox,
}

impl Provenance {
    pub fn label(self) -> &'static str {
        match self {
            Provenance::Numeric => "numeric",
            Provenance::ClosedForm => "closed-form",
            Provenance::Prop1Approx => "prop1-approx",
            Provenance::Prop2Approx => "prop2-approx",
            Provenance::DeploymentApprox => "deployment-approx",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

fn symmetrize(m: [[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = m;
    for i in 0..3 {
        for k in (i + 1)..3 {
            let v = 0.5 * (m[i][k] + m[k][i]);
            out[i][k] = v;
            out[k][i] = v;
        }
    }
    out
}

fn from_upper(upper: [f64; 6]) -> [[f64; 3]; 3] {
    let [xx, xy, xz, yy, yz, zz] = upper;
    [[xx, xy, xz], [xy, yy, yz], [xz, yz, zz]]
}

macro_rules! symmetric_matrix {
    ($name:ident, $doc:literal) => {
        #[doc = $doc]
        #[derive(Debug, Clone, Copy, PartialEq)]
        pub struct $name {
            entries: [[f64; 3]; 3],
            provenance: Provenance,
            quad_error: f64,
        }

        impl $name {
            /// Builds from any 3x3 array; off-diagonal pairs are averaged.
            pub fn new(entries: [[f64; 3]; 3], provenance: Provenance) -> Self {
                Self {
                    entries: symmetrize(entries),
                    provenance,
                    quad_error: 0.0,
                }
            }

            /// Builds from `[xx, xy, xz, yy, yz, zz]`.
            pub fn from_upper(upper: [f64; 6], provenance: Provenance) -> Self {
                Self::new(from_upper(upper), provenance)
            }

            pub fn diagonal(d: [f64; 3], provenance: Provenance) -> Self {
                Self::from_upper([d[0], 0.0, 0.0, d[1], 0.0, d[2]], provenance)
            }

            pub fn with_quad_error(mut self, err: f64) -> Self {
                self.quad_error = err;
                self
            }

            pub fn get(&self, i: Axis, k: Axis) -> f64 {
                self.entries[i.index()][k.index()]
            }

            pub fn at(&self, i: usize, k: usize) -> f64 {
                self.entries[i][k]
            }

            pub fn entries(&self) -> [[f64; 3]; 3] {
                self.entries
            }

            pub fn diag(&self) -> [f64; 3] {
                [self.entries[0][0], self.entries[1][1], self.entries[2][2]]
            }

            pub fn trace(&self) -> f64 {
                self.diag().iter().sum()
            }

            pub fn provenance(&self) -> Provenance {
                self.provenance
            }

            /// Largest absolute quadrature error estimate among the entries
            /// (zero for closed forms).
            pub fn quad_error(&self) -> f64 {
                self.quad_error
            }

            pub fn to_nalgebra(&self) -> Matrix3<f64> {
                let e = &self.entries;
                Matrix3::new(
                    e[0][0], e[0][1], e[0][2], e[1][0], e[1][1], e[1][2], e[2][0], e[2][1], e[2][2],
                )
            }

            pub fn from_nalgebra(m: &Matrix3<f64>, provenance: Provenance) -> Self {
                let mut e = [[0.0; 3]; 3];
                for (i, row) in e.iter_mut().enumerate() {
                    for (k, v) in row.iter_mut().enumerate() {
                        *v = m[(i, k)];
                    }
                }
                Self::new(e, provenance)
            }

            /// Eigenvalues in ascending order.
            pub fn eigenvalues(&self) -> [f64; 3] {
                let mut ev: Vec<f64> = SymmetricEigen::new(self.to_nalgebra())
                    .eigenvalues
                    .iter()
                    .copied()
                    .collect();
                ev.sort_by(f64::total_cmp);
                [ev[0], ev[1], ev[2]]
            }

            pub fn scaled(&self, factor: f64) -> Self {
                let mut e = self.entries;
                e.iter_mut().flatten().for_each(|v| *v *= factor);
                Self {
                    entries: e,
                    provenance: self.provenance,
                    quad_error: self.quad_error * factor.abs(),
                }
            }

            /// Largest entrywise difference, relative to the larger trace.
            pub fn max_rel_diff(&self, other: &Self) -> f64 {
                let scale = self.trace().abs().max(other.trace().abs());
                let mut worst: f64 = 0.0;
                for i in 0..3 {
                    for k in 0..3 {
                        worst = worst.max((self.entries[i][k] - other.entries[i][k]).abs());
                    }
                }
                worst / scale
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                for row in &self.entries {
                    writeln!(
                        f,
                        "  [{:>14.6e} {:>14.6e} {:>14.6e}]",
                        row[0], row[1], row[2]
                    )?;
                }
                Ok(())
            }
        }
    };
}

symmetric_matrix!(
    FisherMatrix,
    "Fisher information over `(x0, y0, z0)` in 1/m^2 (or over `(kappa, phi, psi)` after reparametrisation)."
);
symmetric_matrix!(
    CrlbMatrix,
    "Cramér-Rao bound matrix, the inverse Fisher information, in m^2."
);

impl FisherMatrix {
    /// Entrywise sum; information from independent apertures adds.
    pub fn add(&self, other: &FisherMatrix) -> FisherMatrix {
        let mut e = self.entries;
        for (i, row) in e.iter_mut().enumerate() {
            for (k, v) in row.iter_mut().enumerate() {
                *v += other.entries[i][k];
            }
        }
        let provenance = if self.provenance == other.provenance {
            self.provenance
        } else {
            Provenance::Numeric
        };
        FisherMatrix {
            entries: e,
            provenance,
            quad_error: self.quad_error + other.quad_error,
        }
    }
}

/// Inverts a Fisher matrix into the CRLB matrix.
///
/// Rejects matrices with a non-positive diagonal entry, a non-positive
/// eigenvalue, or a condition number above [`MAX_CONDITION`].
pub fn crlb_from_fisher(f: &FisherMatrix) -> Result<CrlbMatrix> {
    let e = f.entries();
    if e.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "fisher",
            value: f64::NAN,
            reason: "matrix has non-finite entries",
        });
    }
    let eig = SymmetricEigen::new(f.to_nalgebra());
    let (mut lo, mut hi) = (0, 0);
    for i in 1..3 {
        if eig.eigenvalues[i] < eig.eigenvalues[lo] {
            lo = i;
        }
        if eig.eigenvalues[i] > eig.eigenvalues[hi] {
            hi = i;
        }
    }
    let (min_ev, max_ev) = (eig.eigenvalues[lo], eig.eigenvalues[hi]);
    let condition = if min_ev > 0.0 {
        max_ev / min_ev
    } else {
        f64::INFINITY
    };
    let diag_ok = f.diag().iter().all(|&d| d > 0.0);
    let singular = || {
        let v = eig.eigenvectors.column(lo);
        let sign = if v.iter().fold(
            0.0,
            |acc: f64, &x| if x.abs() > acc.abs() { x } else { acc },
        ) < 0.0
        {
            -1.0
        } else {
            1.0
        };
        Error::SingularFisher {
            condition,
            null_direction: [sign * v[0], sign * v[1], sign * v[2]],
        }
    };
    if !diag_ok || condition.is_nan() || condition > MAX_CONDITION {
        return Err(singular());
    }
    let inv = equilibrated_cholesky_inverse(&e).ok_or_else(singular)?;
    Ok(CrlbMatrix::new(inv, f.provenance()).with_quad_error(f.quad_error()))
}

/// Inverse of a symmetric positive definite matrix through Cholesky
/// factorisation of `S M S`, where `S` holds powers of two near
/// `diag(M)^{-1/2}` so the scaling itself is exact. The forward error stays
/// near `cond(M)` ulps even when the matrix is close to low rank.
fn equilibrated_cholesky_inverse(m: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let d: [f64; 3] = std::array::from_fn(|i| (0.5 * m[i][i].log2()).round().exp2());
    let scaled = Matrix3::from_fn(|i, k| m[i][k] / (d[i] * d[k]));
    let inv = Cholesky::new(scaled)?.inverse();
    Some(std::array::from_fn(|i| {
        std::array::from_fn(|k| inv[(i, k)] / (d[i] * d[k]))
    }))
}
