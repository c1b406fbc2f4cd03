//! Curve data for the evaluation figures, one CSV file per curve.

use std::fs;
use std::path::{Path, PathBuf};

use lis_crlb::deployment::{crossover_radius, crossover_radius_numeric};
use lis_crlb::fisher::NumericOptions;
use lis_crlb::{RadioConfig, Split, TerminalPosition};
use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::eval::{evaluate, LayoutSpec, Method, Scenario};
use crate::sweep::{fmt_num, run_sweep, write_csv_file, CsvRow, Scale, SweepParam, SweepSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Figure {
    Fig4,
    Fig5,
    Fig6,
    Fig7,
}

impl Figure {
    fn name(self) -> &'static str {
        match self {
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
            Figure::Fig6 => "fig6",
            Figure::Fig7 => "fig7",
        }
    }
}

const LAMBDA: f64 = 0.1;
/// Radius grid for the radius sweeps. The upper end is large enough for the
/// on-axis bounds to come within 1% of their limit at z0 = 6.
const R_FROM: f64 = 0.1;
const R_TO_LIMIT: f64 = 1000.0;
const R_TO_DEPLOY: f64 = 100.0;
pub const DEFAULT_STEPS: usize = 31;

fn square() -> LayoutSpec {
    LayoutSpec {
        width: 4.0,
        height: 4.0,
        split: Split::Four,
    }
}

fn radio() -> RadioConfig {
    RadioConfig::new(LAMBDA).expect("positive wavelength")
}

fn prepare(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|source| CliError::Output {
        path: dir.to_path_buf(),
        source,
    })
}

/// Writes the figure's files into `dir` and returns their paths.
pub fn reproduce(
    fig: Figure,
    dir: &Path,
    steps: usize,
    opts: NumericOptions,
) -> CliResult<Vec<PathBuf>> {
    prepare(dir)?;
    match fig {
        Figure::Fig4 | Figure::Fig5 => radius_curves(fig, dir, steps, opts),
        Figure::Fig6 => offset_curves(dir, opts),
        Figure::Fig7 => deployment_curves(dir, steps, opts),
    }
}

/// Bounds versus aperture radius for terminals at `(x0, 0, z0)`.
fn radius_curves(
    fig: Figure,
    dir: &Path,
    steps: usize,
    opts: NumericOptions,
) -> CliResult<Vec<PathBuf>> {
    let focus = match fig {
        Figure::Fig4 => "x and y bounds (Cxx, Cyy)",
        _ => "z bound (Czz)",
    };
    let mut paths = Vec::new();
    for z0 in [4.0, 6.0] {
        for x0 in [0.0, 2.0, 4.0, 8.0] {
            let mut methods = vec![Method::Numeric, Method::Prop1];
            if x0 == 0.0 {
                methods.push(Method::Theorem1);
            }
            let spec = SweepSpec {
                param: SweepParam::Radius,
                from: R_FROM,
                to: R_TO_LIMIT,
                steps,
                scale: Scale::Log,
                base: Scenario {
                    terminal: TerminalPosition::new(x0, 0.0, z0)?,
                    radius: 1.0,
                    radio: radio(),
                    layout: square(),
                },
                methods,
            };
            let rows = run_sweep(&spec, opts)?;
            let comments = vec![
                format!("{}: {focus} versus aperture radius", fig.name()),
                format!("terminal ({x0}, 0, {z0}), lambda {LAMBDA}, N0 2"),
                format!("radius on a log grid [{R_FROM}, {R_TO_LIMIT}] with {steps} points"),
                format!(
                    "large-radius limit 3 lambda^2 / (2 pi^2) = {}",
                    fmt_num(lis_crlb::crlb_limit(LAMBDA))
                ),
            ];
            let path = dir.join(format!("{}_z0-{z0}_x0-{x0}.csv", fig.name()));
            write_csv_file(&path, &comments, &rows)?;
            paths.push(path);
        }
    }
    Ok(paths)
}

/// Bounds and approximation errors along the diagonal `x0 = y0`.
fn offset_curves(dir: &Path, opts: NumericOptions) -> CliResult<Vec<PathBuf>> {
    let (radius, z0) = (0.5, 8.0);
    let methods = [Method::Numeric, Method::Prop1, Method::Prop2];
    let offsets: Vec<f64> = (1..=8).map(f64::from).collect();
    let rows: Vec<Vec<CsvRow>> = offsets
        .par_iter()
        .map(|&x| {
            let s = Scenario {
                terminal: TerminalPosition::new(x, x, z0)?,
                radius,
                radio: radio(),
                layout: square(),
            };
            methods
                .iter()
                .map(|&m| {
                    Ok(CsvRow {
                        param: "x0=y0",
                        value: x,
                        eval: evaluate(&s, m, opts)?,
                    })
                })
                .collect()
        })
        .collect::<CliResult<_>>()?;
    let comments = vec![
        "fig6: bounds along x0 = y0".to_string(),
        format!("radius {radius}, z0 {z0}, lambda {LAMBDA}, N0 2"),
    ];
    let mut paths = Vec::new();
    for (k, m) in methods.iter().enumerate() {
        let curve: Vec<CsvRow> = rows.iter().map(|r| r[k].clone()).collect();
        let path = dir.join(format!("fig6_{}.csv", m.label()));
        write_csv_file(&path, &comments, &curve)?;
        paths.push(path);
    }

    let err_path = dir.join("fig6_errors.csv");
    let file = fs::File::create(&err_path).map_err(|source| CliError::Output {
        path: err_path.clone(),
        source,
    })?;
    let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
    w.write_record([
        "sweep_param",
        "sweep_value",
        "method",
        "err_x",
        "err_y",
        "err_z",
    ])?;
    for r in &rows {
        let numeric = r[0].eval.diag();
        for approx in &r[1..] {
            let (Some(n), Some(a)) = (numeric, approx.eval.diag()) else {
                continue;
            };
            let mut rec = vec![
                approx.param.to_string(),
                fmt_num(approx.value),
                approx.eval.method.label().to_string(),
            ];
            rec.extend((0..3).map(|k| fmt_num((a[k] - n[k]).abs() / n[k])));
            w.write_record(rec)?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    paths.push(err_path);
    Ok(paths)
}

/// Centralized, four-way and sixteen-way layouts on a 4 x 4 surface.
fn deployment_curves(dir: &Path, steps: usize, opts: NumericOptions) -> CliResult<Vec<PathBuf>> {
    let z0 = 8.0;
    let analytic = crossover_radius(4.0, 4.0)?;
    let numeric = crossover_radius_numeric(4.0, 4.0, z0, radio(), (1.0, 4.0), opts, 1e-3)?;
    let comments = |what: &str| {
        vec![
            format!("fig7: {what}, 4 x 4 surface, terminal (0, 0, {z0}), lambda {LAMBDA}, N0 2"),
            format!("total radius on a log grid [{R_FROM}, {R_TO_DEPLOY}] with {steps} points"),
            format!("crossover radius analytic {analytic:.4}, numeric bisection {numeric:.4}"),
        ]
    };
    let mut paths = Vec::new();
    let curves = [
        (Split::One, Method::Deploy, "split1", "centralized layout"),
        (Split::Four, Method::Deploy, "split4", "four-way layout"),
        (
            Split::Sixteen,
            Method::Deploy,
            "split16",
            "sixteen-way layout",
        ),
        (
            Split::Four,
            Method::DeployApprox,
            "split4_approx",
            "four-way layout, far-field closed form",
        ),
    ];
    for (split, method, tag, what) in curves {
        let spec = SweepSpec {
            param: SweepParam::Radius,
            from: R_FROM,
            to: R_TO_DEPLOY,
            steps,
            scale: Scale::Log,
            base: Scenario {
                terminal: TerminalPosition::on_axis(z0)?,
                radius: 1.0,
                radio: radio(),
                layout: LayoutSpec {
                    width: 4.0,
                    height: 4.0,
                    split,
                },
            },
            methods: vec![method],
        };
        let rows = run_sweep(&spec, opts)?;
        let path = dir.join(format!("fig7_{tag}.csv"));
        write_csv_file(&path, &comments(what), &rows)?;
        paths.push(path);
    }
    Ok(paths)
}
