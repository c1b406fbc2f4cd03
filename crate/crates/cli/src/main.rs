use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lis_crlb::fisher::NumericOptions;
use lis_crlb::quadrature::DEFAULT_MAX_EVALS;
use lis_crlb::transforms::SphericalMethod;
use lis_crlb::{RadioConfig, SphericalPosition, Split, TerminalPosition};

mod commands;
mod error;
mod eval;
mod reproduce;
mod sweep;

use commands::DeployArgs;
use error::{CliError, CliResult};
use eval::{LayoutSpec, Method, Scenario};
use reproduce::Figure;
use sweep::{Scale, SweepParam, SweepSpec};

const MAX_EVALS_VAR: &str = "LIS_CRLB_MAX_EVALS";

/// Cramér-Rao bounds for positioning with large intelligent surfaces.
#[derive(Parser)]
#[command(name = "lis-crlb", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bounds for a terminal on the central axis.
    #[command(allow_negative_numbers = true)]
    Cpl {
        #[arg(long)]
        z0: f64,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[command(flatten)]
        radio: RadioArgs,
        /// Methods to compare; `all` selects every on-axis method.
        #[arg(long, value_delimiter = ',', default_value = "all")]
        method: Vec<String>,
    },
    /// Full CRLB matrix for an arbitrary terminal position.
    #[command(allow_negative_numbers = true)]
    Point {
        #[arg(long)]
        x0: f64,
        #[arg(long)]
        y0: f64,
        #[arg(long)]
        z0: f64,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[command(flatten)]
        radio: RadioArgs,
        #[arg(
            long,
            value_enum,
            value_delimiter = ',',
            default_value = "numeric,prop1,prop2"
        )]
        method: Vec<Method>,
    },
    /// CRLB of range, polar angle and azimuth.
    #[command(allow_negative_numbers = true)]
    Spherical {
        #[arg(long)]
        kappa: f64,
        #[arg(long)]
        phi: f64,
        #[arg(long, default_value_t = 0.0)]
        psi: f64,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[command(flatten)]
        radio: RadioArgs,
        #[arg(long, value_enum, default_value = "numeric")]
        method: SphericalChoice,
    },
    /// Sweep one parameter and write a CSV table.
    #[command(allow_negative_numbers = true)]
    Sweep {
        #[arg(long, value_enum)]
        param: SweepParam,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        #[arg(long, value_enum, default_value = "linear")]
        scale: Scale,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "numeric")]
        method: Vec<Method>,
        #[arg(long, default_value_t = 4.0)]
        z0: f64,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 0.0)]
        x0: f64,
        #[arg(long, default_value_t = 0.0)]
        y0: f64,
        #[command(flatten)]
        radio: RadioArgs,
        #[command(flatten)]
        layout: LayoutArgs,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare split layouts over a range of total radii.
    #[command(allow_negative_numbers = true)]
    Deploy {
        #[command(flatten)]
        layout: LayoutArgs,
        #[arg(long, default_value_t = 8.0)]
        z0: f64,
        #[command(flatten)]
        radio: RadioArgs,
        #[arg(long, default_value_t = 0.1)]
        r_from: f64,
        #[arg(long, default_value_t = 5.0)]
        r_to: f64,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        #[arg(long, value_enum, default_value = "linear")]
        scale: Scale,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the curve data of an evaluation figure.
    Reproduce {
        #[arg(value_enum)]
        figure: Figure,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Points on the radius grid (figures 4, 5 and 7).
        #[arg(long, default_value_t = reproduce::DEFAULT_STEPS)]
        steps: usize,
    },
}

#[derive(Args, Clone, Copy)]
struct RadioArgs {
    #[arg(long, default_value_t = 0.1)]
    lambda: f64,
    /// Noise power spectral density.
    #[arg(long, default_value_t = lis_crlb::model::DEFAULT_N0)]
    n0: f64,
}

impl RadioArgs {
    fn config(self) -> CliResult<RadioConfig> {
        Ok(RadioConfig::with_noise(self.lambda, self.n0)?)
    }
}

#[derive(Args, Clone, Copy)]
struct LayoutArgs {
    #[arg(long, default_value_t = 4.0)]
    width: f64,
    #[arg(long, default_value_t = 4.0)]
    height: f64,
    /// Number of disks: 1, 4 or 16.
    #[arg(long, default_value_t = 4)]
    split: u32,
}

impl LayoutArgs {
    fn spec(self) -> CliResult<LayoutSpec> {
        Ok(LayoutSpec {
            width: self.width,
            height: self.height,
            split: Split::try_from(self.split)?,
        })
    }
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum SphericalChoice {
    Numeric,
    Prop1,
}

const CPL_METHODS: [Method; 4] = [
    Method::Theorem1,
    Method::Numeric,
    Method::Simplified,
    Method::SmallTau,
];

fn parse_cpl_methods(names: &[String]) -> CliResult<Vec<Method>> {
    use clap::ValueEnum;
    let mut out = Vec::new();
    for n in names {
        if n == "all" {
            out.extend(CPL_METHODS);
            continue;
        }
        let m = Method::from_str(n, false)
            .map_err(|_| CliError::usage(format!("unknown method '{n}'")))?;
        out.push(m);
    }
    out.dedup();
    Ok(out)
}

fn numeric_options() -> CliResult<NumericOptions> {
    let max_evals = match std::env::var(MAX_EVALS_VAR) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| {
                CliError::usage(format!(
                    "{MAX_EVALS_VAR} must be a positive integer, got '{v}'"
                ))
            })?,
        Err(_) => DEFAULT_MAX_EVALS,
    };
    Ok(NumericOptions {
        max_evals,
        ..NumericOptions::default()
    })
}

fn run(cli: Cli) -> CliResult<()> {
    let opts = numeric_options()?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let default_layout = LayoutSpec {
        width: 4.0,
        height: 4.0,
        split: Split::Four,
    };
    match cli.command {
        Command::Cpl {
            z0,
            radius,
            radio,
            method,
        } => {
            let s = Scenario {
                terminal: TerminalPosition::on_axis(z0)?,
                radius,
                radio: radio.config()?,
                layout: default_layout,
            };
            commands::cmd_cpl(&mut out, &s, &parse_cpl_methods(&method)?, opts)
        }
        Command::Point {
            x0,
            y0,
            z0,
            radius,
            radio,
            method,
        } => {
            let s = Scenario {
                terminal: TerminalPosition::new(x0, y0, z0)?,
                radius,
                radio: radio.config()?,
                layout: default_layout,
            };
            commands::cmd_point(&mut out, &s, &method, opts)
        }
        Command::Spherical {
            kappa,
            phi,
            psi,
            radius,
            radio,
            method,
        } => {
            let method = match method {
                SphericalChoice::Numeric => SphericalMethod::Numeric(opts),
                SphericalChoice::Prop1 => SphericalMethod::Prop1,
            };
            let sph = SphericalPosition::new(kappa, phi, psi)?;
            commands::cmd_spherical(&mut out, sph, radius, radio.config()?, method)
        }
        Command::Sweep {
            param,
            from,
            to,
            steps,
            scale,
            method,
            z0,
            radius,
            x0,
            y0,
            radio,
            layout,
            out: path,
        } => {
            let spec = SweepSpec {
                param,
                from,
                to,
                steps,
                scale,
                base: Scenario {
                    terminal: TerminalPosition::new(x0, y0, z0)?,
                    radius,
                    radio: radio.config()?,
                    layout: layout.spec()?,
                },
                methods: method,
            };
            let rows = sweep::run_sweep(&spec, opts)?;
            let comments = vec![format!(
                "sweep of {} over [{from}, {to}], {steps} points, {:?} scale",
                param.label(),
                scale
            )];
            match path {
                Some(p) => sweep::write_csv_file(&p, &comments, &rows),
                None => sweep::write_csv(&mut out, &comments, &rows),
            }
        }
        Command::Deploy {
            layout,
            z0,
            radio,
            r_from,
            r_to,
            steps,
            scale,
            out: path,
        } => {
            let layout = layout.spec()?;
            let args = DeployArgs {
                z0,
                radio: radio.config()?,
                width: layout.width,
                height: layout.height,
                split: layout.split,
                r_from,
                r_to,
                steps,
                scale,
            };
            commands::cmd_deploy(&mut out, &args, path.as_deref(), opts)
        }
        Command::Reproduce {
            figure,
            out_dir,
            steps,
        } => {
            if steps < 2 {
                return Err(CliError::usage("--steps must be at least 2"));
            }
            for p in reproduce::reproduce(figure, &out_dir, steps, opts)? {
                writeln!(out, "wrote {}", p.display()).map_err(|e| CliError::Csv(e.into()))?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("error")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
