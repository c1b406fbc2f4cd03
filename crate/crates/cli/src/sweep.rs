//! Parameter sweeps and their CSV rows.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fs::File;
use std::io::Write;
use std::path::Path;

use lis_crlb::fisher::NumericOptions;
use lis_crlb::TerminalPosition;
use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::eval::{evaluate, Bound, Evaluation, Method, Scenario};

pub const HEADER: [&str; 12] = [
    "sweep_param",
    "sweep_value",
    "method",
    "Cxx",
    "Cyy",
    "Czz",
    "Cxy",
    "Cxz",
    "Cyz",
    "cond1_ratio",
    "cond2_ratio",
    "quad_err",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepParam {
    #[value(name = "r")]
    Radius,
    #[value(name = "tau")]
    Tau,
    #[value(name = "z0")]
    Z0,
    #[value(name = "x0")]
    X0,
    /// Distance from the axis along the diagonal x0 = y0.
    #[value(name = "offset-radius")]
    OffsetRadius,
}

impl SweepParam {
    pub fn label(self) -> &'static str {
        match self {
            SweepParam::Radius => "r",
            SweepParam::Tau => "tau",
            SweepParam::Z0 => "z0",
            SweepParam::X0 => "x0",
            SweepParam::OffsetRadius => "offset-radius",
        }
    }

    fn moves_terminal_off_axis(self) -> bool {
        matches!(self, SweepParam::X0 | SweepParam::OffsetRadius)
    }

    /// Applies `value` to a copy of `base`. For `tau` the radius follows `z0`.
    pub fn apply(self, base: &Scenario, value: f64) -> CliResult<Scenario> {
        let mut s = *base;
        let t = base.terminal;
        match self {
            SweepParam::Radius => s.radius = value,
            SweepParam::Tau => s.radius = value * t.z0,
            SweepParam::Z0 => s.terminal = TerminalPosition::new(t.x0, t.y0, value)?,
            SweepParam::X0 => s.terminal = TerminalPosition::new(value, t.y0, t.z0)?,
            SweepParam::OffsetRadius => {
                let c = value * FRAC_1_SQRT_2;
                s.terminal = TerminalPosition::new(c, c, t.z0)?;
            }
        }
        Ok(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub scale: Scale,
    pub base: Scenario,
    pub methods: Vec<Method>,
}

impl SweepSpec {
    pub fn validate(&self) -> CliResult<()> {
        if !(self.from.is_finite() && self.to.is_finite() && self.from < self.to) {
            return Err(CliError::usage(format!(
                "sweep range must satisfy from < to (got {} .. {})",
                self.from, self.to
            )));
        }
        if self.steps < 2 {
            return Err(CliError::usage("sweep needs at least 2 steps"));
        }
        if self.scale == Scale::Log && self.from <= 0.0 {
            return Err(CliError::usage("log sweep needs a positive lower end"));
        }
        if self.methods.is_empty() {
            return Err(CliError::usage("no methods selected"));
        }
        for &m in &self.methods {
            if m.needs_axis()
                && (self.param.moves_terminal_off_axis() || !self.base.terminal.is_on_axis())
            {
                return Err(CliError::usage(format!(
                    "method {} requires a terminal on the axis for every sweep point",
                    m.label()
                )));
            }
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.steps;
        (0..n)
            .map(|i| {
                let f = i as f64 / (n - 1) as f64;
                if i == 0 {
                    return self.from;
                }
                if i == n - 1 {
                    return self.to;
                }
                match self.scale {
                    Scale::Linear => self.from + (self.to - self.from) * f,
                    Scale::Log => (self.from.ln() + (self.to.ln() - self.from.ln()) * f).exp(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub param: &'static str,
    pub value: f64,
    pub eval: Evaluation,
}

/// Scientific notation with 13 significant digits; negative zero prints as zero.
pub fn fmt_num(v: f64) -> String {
    format!("{:.12e}", v + 0.0)
}

impl CsvRow {
    pub fn record(&self) -> Vec<String> {
        let mut out = vec![
            self.param.to_string(),
            fmt_num(self.value),
            self.eval.method.label().to_string(),
        ];
        match &self.eval.bound {
            Bound::Matrix(m) => {
                for (i, k) in [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)] {
                    out.push(fmt_num(m[i][k]));
                }
            }
            Bound::Singular => out.extend(std::iter::repeat_n("singular".to_string(), 6)),
        }
        out.push(fmt_num(self.eval.conditions.cond1_ratio));
        out.push(fmt_num(self.eval.conditions.cond2_ratio));
        out.push(fmt_num(self.eval.quad_err));
        out
    }
}

/// Evaluates every (point, method) pair in parallel; rows come back in sweep
/// order, methods in the order given.
pub fn run_sweep(spec: &SweepSpec, opts: NumericOptions) -> CliResult<Vec<CsvRow>> {
    spec.validate()?;
    let jobs: Vec<(f64, Method)> = spec
        .values()
        .into_iter()
        .flat_map(|v| spec.methods.iter().map(move |&m| (v, m)))
        .collect();
    jobs.par_iter()
        .map(|&(v, m)| {
            let s = spec.param.apply(&spec.base, v)?;
            Ok(CsvRow {
                param: spec.param.label(),
                value: v,
                eval: evaluate(&s, m, opts)?,
            })
        })
        .collect()
}

/// Writes `#`-prefixed comment lines, the header and the rows.
pub fn write_csv<W: Write>(out: W, comments: &[String], rows: &[CsvRow]) -> CliResult<()> {
    let mut out = out;
    for c in comments {
        writeln!(out, "# {c}").map_err(csv::Error::from)?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record(r.record())?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_csv_file(path: &Path, comments: &[String], rows: &[CsvRow]) -> CliResult<()> {
    let file = File::create(path).map_err(|source| CliError::Output {
        path: path.to_path_buf(),
        source,
    })?;
    write_csv(std::io::BufWriter::new(file), comments, rows)
}
