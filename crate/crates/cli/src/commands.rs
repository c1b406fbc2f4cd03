//! Human-readable reports for single configurations.

use std::io::Write;

use lis_crlb::approx::ConditionReport;
use lis_crlb::deployment::{
    crossover_radius, crossover_radius_numeric, deployment_fisher_approx, make_layout, Split,
};
use lis_crlb::fisher::NumericOptions;
use lis_crlb::transforms::{crlb_spherical, sph_to_cart, SphericalCrlb, SphericalMethod};
use lis_crlb::{check_conditions, Error, RadioConfig, SphericalPosition};

use crate::error::{CliError, CliResult};
use crate::eval::{evaluate, Bound, Evaluation, Method, Scenario};
use crate::sweep::{run_sweep, write_csv, write_csv_file, Scale, SweepParam, SweepSpec};

fn io(e: std::io::Error) -> CliError {
    CliError::Csv(e.into())
}

fn conditions_line(c: &ConditionReport) -> String {
    let mark = |ok: bool| if ok { "ok" } else { "violated" };
    format!(
        "conditions: lambda ratio {:.3e} ({}), aperture ratio {:.3e} ({})",
        c.cond1_ratio,
        mark(c.cond1_satisfied),
        c.cond2_ratio,
        mark(c.cond2_satisfied)
    )
}

fn evaluate_all(
    s: &Scenario,
    methods: &[Method],
    opts: NumericOptions,
) -> CliResult<Vec<Evaluation>> {
    methods.iter().map(|&m| evaluate(s, m, opts)).collect()
}

/// On-axis report: `Cxy` and `Cz` by each method, with deltas against the
/// first method.
pub fn cmd_cpl<W: Write>(
    out: &mut W,
    s: &Scenario,
    methods: &[Method],
    opts: NumericOptions,
) -> CliResult<()> {
    let t = s.terminal;
    writeln!(
        out,
        "terminal (0, 0, {})  radius {}  lambda {}  tau {}",
        t.z0,
        s.radius,
        s.radio.lambda,
        s.radius / t.z0
    )
    .map_err(io)?;
    let evals = evaluate_all(s, methods, opts)?;
    writeln!(
        out,
        "{:<14}{:>22}{:>22}{:>12}{:>12}",
        "method", "Cxy", "Cz", "dCxy", "dCz"
    )
    .map_err(io)?;
    let reference = evals.first().and_then(Evaluation::diag);
    for e in &evals {
        match (e.diag(), reference) {
            (Some(d), Some(r)) => writeln!(
                out,
                "{:<14}{:>22.12e}{:>22.12e}{:>12.2e}{:>12.2e}",
                e.method.label(),
                d[0],
                d[2],
                (d[0] - r[0]) / r[0],
                (d[2] - r[2]) / r[2]
            ),
            _ => writeln!(out, "{:<14}{:>22}", e.method.label(), "singular"),
        }
        .map_err(io)?;
    }
    writeln!(out, "{}", conditions_line(&evals[0].conditions)).map_err(io)?;
    Ok(())
}

fn write_matrix<W: Write>(out: &mut W, m: &[[f64; 3]; 3]) -> std::io::Result<()> {
    for row in m {
        writeln!(
            out,
            "  [{:>20.12e} {:>20.12e} {:>20.12e}]",
            row[0] + 0.0,
            row[1] + 0.0,
            row[2] + 0.0
        )?;
    }
    Ok(())
}

/// Full CRLB matrices by method, plus normalized diagonal deltas against the
/// numeric bound when it is among the methods.
pub fn cmd_point<W: Write>(
    out: &mut W,
    s: &Scenario,
    methods: &[Method],
    opts: NumericOptions,
) -> CliResult<()> {
    let t = s.terminal;
    writeln!(
        out,
        "terminal ({}, {}, {})  radius {}  lambda {}",
        t.x0, t.y0, t.z0, s.radius, s.radio.lambda
    )
    .map_err(io)?;
    let evals = evaluate_all(s, methods, opts)?;
    writeln!(out, "{}", conditions_line(&evals[0].conditions)).map_err(io)?;
    let numeric = evals
        .iter()
        .find(|e| e.method == Method::Numeric)
        .and_then(Evaluation::diag);
    for e in &evals {
        writeln!(out, "{} CRLB (m^2):", e.method.label()).map_err(io)?;
        match &e.bound {
            Bound::Matrix(m) => write_matrix(out, m).map_err(io)?,
            Bound::Singular => writeln!(out, "  singular").map_err(io)?,
        }
        if e.method == Method::Numeric {
            writeln!(out, "  quadrature error estimate {:.3e}", e.quad_err).map_err(io)?;
        } else if let (Some(n), Some(d)) = (numeric, e.diag()) {
            writeln!(
                out,
                "  normalized delta vs numeric: x {:.3e}  y {:.3e}  z {:.3e}",
                (d[0] - n[0]).abs() / n[0],
                (d[1] - n[1]).abs() / n[1],
                (d[2] - n[2]).abs() / n[2]
            )
            .map_err(io)?;
        }
    }
    Ok(())
}

pub fn cmd_spherical<W: Write>(
    out: &mut W,
    sph: SphericalPosition,
    radius: f64,
    radio: RadioConfig,
    method: SphericalMethod,
) -> CliResult<()> {
    let t = sph_to_cart(sph)?;
    writeln!(
        out,
        "terminal kappa {} phi {} psi {}  (x0 {:.6}, y0 {:.6}, z0 {:.6})  radius {}  lambda {}",
        sph.kappa, sph.phi, sph.psi, t.x0, t.y0, t.z0, radius, radio.lambda
    )
    .map_err(io)?;
    writeln!(
        out,
        "{}",
        conditions_line(&check_conditions(t, radius, radio))
    )
    .map_err(io)?;
    let bound = match crlb_spherical(sph, radius, radio, method) {
        Ok(b) => b,
        Err(Error::SingularFisher { .. }) => {
            writeln!(out, "spherical Fisher matrix is singular").map_err(io)?;
            return Ok(());
        }
        Err(e) => return Err(e.into()),
    };
    writeln!(out, "{} CRLB in (kappa, phi, psi):", bound.provenance()).map_err(io)?;
    match bound {
        SphericalCrlb::Full(c) => write_matrix(out, &c.entries()).map_err(io)?,
        SphericalCrlb::AzimuthUnidentifiable { block, .. } => {
            for row in block {
                writeln!(out, "  [{:>20.12e} {:>20.12e}]", row[0], row[1]).map_err(io)?;
            }
            writeln!(
                out,
                "psi: unidentifiable (terminal on the axis); block covers (kappa, phi) only"
            )
            .map_err(io)?;
        }
    }
    Ok(())
}

pub struct DeployArgs {
    pub z0: f64,
    pub radio: RadioConfig,
    pub width: f64,
    pub height: f64,
    pub split: Split,
    pub r_from: f64,
    pub r_to: f64,
    pub steps: usize,
    pub scale: Scale,
}

/// Radius sweep of one layout for an on-axis terminal, together with the
/// analytic and numeric crossover radii of the centralized and four-way
/// layouts.
pub fn deploy_report(
    a: &DeployArgs,
    opts: NumericOptions,
) -> CliResult<(Vec<String>, Vec<crate::sweep::CsvRow>)> {
    let terminal = lis_crlb::TerminalPosition::on_axis(a.z0)?;
    let mut methods = vec![Method::Deploy];
    if a.split == Split::Four {
        methods.push(Method::DeployApprox);
    }
    let spec = SweepSpec {
        param: SweepParam::Radius,
        from: a.r_from,
        to: a.r_to,
        steps: a.steps,
        scale: a.scale,
        base: Scenario {
            terminal,
            radius: a.r_from,
            radio: a.radio,
            layout: crate::eval::LayoutSpec {
                width: a.width,
                height: a.height,
                split: a.split,
            },
        },
        methods,
    };
    let rows = run_sweep(&spec, opts)?;
    let analytic = crossover_radius(a.width, a.height)?;
    let numeric = match crossover_radius_numeric(
        a.width,
        a.height,
        a.z0,
        a.radio,
        (a.r_from, a.r_to),
        opts,
        1e-3,
    ) {
        Ok(r) => format!("{r:.4}"),
        Err(Error::InvalidParameter {
            name: "bracket", ..
        }) => "not bracketed by the radius range".into(),
        Err(e) => return Err(e.into()),
    };
    let layout = make_layout(a.width, a.height, a.split, a.r_to)?;
    let mut notes = vec![
        format!(
            "deployment: {} x {} surface, split {}, terminal (0, 0, {}), lambda {}",
            a.width, a.height, a.split, a.z0, a.radio.lambda
        ),
        format!("crossover radius (analytic, centralized vs 4-split): {analytic:.4}"),
        format!("crossover radius (numeric bisection, centralized vs 4-split): {numeric}"),
    ];
    if a.split == Split::Four {
        let b = deployment_fisher_approx(
            a.z0,
            &make_layout(a.width, a.height, Split::Four, a.r_from)?,
            a.radio,
        )?;
        notes.push(format!("disk-center distance D: {:.6}", b.d));
    }
    notes.extend(
        layout
            .fit_warnings()
            .into_iter()
            .map(|w| format!("at R = {}: {w}", a.r_to)),
    );
    Ok((notes, rows))
}

pub fn cmd_deploy<W: Write>(
    out: &mut W,
    a: &DeployArgs,
    path: Option<&std::path::Path>,
    opts: NumericOptions,
) -> CliResult<()> {
    let (notes, rows) = deploy_report(a, opts)?;
    match path {
        Some(p) => {
            write_csv_file(p, &notes, &rows)?;
            for n in &notes {
                writeln!(out, "{n}").map_err(io)?;
            }
            writeln!(out, "wrote {} rows to {}", rows.len(), p.display()).map_err(io)?;
        }
        None => write_csv(out, &notes, &rows)?,
    }
    Ok(())
}
