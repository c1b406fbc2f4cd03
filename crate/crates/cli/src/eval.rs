//! One CRLB evaluation per (scenario, method) pair.

use lis_crlb::approx::{check_conditions, crlb_approx_prop1, crlb_matrix_prop2, ConditionReport};
use lis_crlb::closed_form::{
    crlb_cpl_simplified, crlb_cpl_small_tau, fisher_cpl, CplConfig, CplCrlb,
};
use lis_crlb::deployment::{deployment_crlb_numeric, deployment_fisher_approx, make_layout, Split};
use lis_crlb::fisher::{crlb_numeric, NumericOptions};
use lis_crlb::quadrature::Disk;
use lis_crlb::{Error, RadioConfig, TerminalPosition};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum Method {
    #[value(name = "numeric")]
    Numeric,
    #[value(name = "theorem1")]
    Theorem1,
    #[value(name = "simplified")]
    Simplified,
    #[value(name = "small-tau")]
    SmallTau,
    #[value(name = "prop1")]
    Prop1,
    #[value(name = "prop2")]
    Prop2,
    /// Numeric bound of the split layout given by --split/--width/--height.
    #[value(name = "deploy")]
    Deploy,
    /// Closed-form far-field bound of the four-way layout.
    #[value(name = "deploy-approx")]
    DeployApprox,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Numeric => "numeric",
            Method::Theorem1 => "theorem1",
            Method::Simplified => "simplified",
            Method::SmallTau => "small-tau",
            Method::Prop1 => "prop1",
            Method::Prop2 => "prop2",
            Method::Deploy => "deploy",
            Method::DeployApprox => "deploy-approx",
        }
    }

    /// Methods that only describe a terminal on the central axis.
    pub fn needs_axis(self) -> bool {
        matches!(
            self,
            Method::Theorem1 | Method::Simplified | Method::SmallTau | Method::DeployApprox
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayoutSpec {
    pub width: f64,
    pub height: f64,
    pub split: Split,
}

/// Everything one evaluation needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub terminal: TerminalPosition,
    pub radius: f64,
    pub radio: RadioConfig,
    pub layout: LayoutSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Bound {
    Matrix([[f64; 3]; 3]),
    Singular,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub method: Method,
    pub bound: Bound,
    pub conditions: ConditionReport,
    pub quad_err: f64,
}

impl Evaluation {
    pub fn diag(&self) -> Option<[f64; 3]> {
        match &self.bound {
            Bound::Matrix(m) => Some([m[0][0], m[1][1], m[2][2]]),
            Bound::Singular => None,
        }
    }
}

fn cpl_matrix(c: CplCrlb, noise: f64) -> [[f64; 3]; 3] {
    [
        [c.cxy * noise, 0.0, 0.0],
        [0.0, c.cxy * noise, 0.0],
        [0.0, 0.0, c.cz * noise],
    ]
}

pub fn evaluate(s: &Scenario, method: Method, opts: NumericOptions) -> CliResult<Evaluation> {
    let t = s.terminal;
    if method.needs_axis() && !t.is_on_axis() {
        return Err(CliError::usage(format!(
            "method {} requires a terminal on the axis (x0 = y0 = 0)",
            method.label()
        )));
    }
    let noise = 1.0 / s.radio.fisher_scale();
    let lambda = s.radio.lambda;
    let tau = s.radius / t.z0;
    let outcome = match method {
        Method::Numeric => crlb_numeric(t, &[Disk::centered(s.radius)?], s.radio, opts)
            .map(|c| (c.entries(), c.quad_error())),
        Method::Theorem1 => fisher_cpl(&CplConfig::new(t.z0, s.radius, lambda)?)
            .map(|f| (cpl_matrix(f.crlb(), noise), 0.0)),
        Method::Simplified => crlb_cpl_simplified(tau, lambda).map(|c| (cpl_matrix(c, noise), 0.0)),
        Method::SmallTau => crlb_cpl_small_tau(tau, lambda).map(|c| (cpl_matrix(c, noise), 0.0)),
        Method::Prop1 => crlb_approx_prop1(t, s.radius, s.radio).map(|c| (c.entries(), 0.0)),
        Method::Prop2 => crlb_matrix_prop2(t, s.radius, s.radio).map(|c| (c.entries(), 0.0)),
        Method::Deploy => {
            let layout = make_layout(s.layout.width, s.layout.height, s.layout.split, s.radius)?;
            deployment_crlb_numeric(t, &layout, s.radio, opts)
                .map(|c| (c.entries(), c.quad_error()))
        }
        Method::DeployApprox => {
            let layout = make_layout(s.layout.width, s.layout.height, Split::Four, s.radius)?;
            deployment_fisher_approx(t.z0, &layout, s.radio).map(|b| {
                let m = [[b.cxy(), 0.0, 0.0], [0.0, b.cxy(), 0.0], [0.0, 0.0, b.cz()]];
                (m, 0.0)
            })
        }
    };
    let bound = match outcome {
        Ok((m, err)) => (Bound::Matrix(m), err),
        Err(Error::SingularFisher { .. }) => (Bound::Singular, f64::NAN),
        Err(e) => return Err(e.into()),
    };
    Ok(Evaluation {
        method,
        bound: bound.0,
        conditions: check_conditions(t, s.radius, s.radio),
        quad_err: bound.1,
    })
}
