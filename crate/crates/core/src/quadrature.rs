//! Integration of smooth real fields over disks in the `z = 0` plane.
//!
//! [`integrate_disk`] works in polar coordinates about the disk centre and
//! nests two adaptive 21-point Gauss-Kronrod integrators: the outer one runs
//! over the radius, and every radial node triggers an inner adaptive pass over
//! the full angle. Inner error estimates are propagated into the outer panel
//! errors, so the reported bound covers both levels.
//!
//! [`integrate_disk_oracle`] is a plain midpoint rule on a polar grid. It
//! shares nothing with the adaptive engine and only serves as a check.

use std::cell::Cell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::TAU;

use crate::error::{require_finite, require_positive, Error, Result};

/// Default evaluation budget per integral.
pub const DEFAULT_MAX_EVALS: usize = 10_000_000;

/// Error estimates smaller than this fraction of `∫|f|` cannot be resolved in
/// double precision, so they count as converged.
const ROUNDOFF_FLOOR: f64 = 1e-13;

/// Disk of the given radius centred at `(cx, cy)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disk {
    pub cx: f64,
    pub cy: f64,
    pub radius: f64,
}

impl Disk {
    pub fn new(cx: f64, cy: f64, radius: f64) -> Result<Self> {
        require_finite("cx", cx)?;
        require_finite("cy", cy)?;
        require_positive("radius", radius)?;
        Ok(Self { cx, cy, radius })
    }

    pub fn centered(radius: f64) -> Result<Self> {
        Self::new(0.0, 0.0, radius)
    }

    pub fn area(&self) -> f64 {
        std::f64::consts::PI * self.radius * self.radius
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.cx, self.cy, self.radius).map(|_| ())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Tolerance {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Result<Self> {
        require_positive("abs_tol", abs_tol)?;
        require_positive("rel_tol", rel_tol)?;
        Ok(Self { abs_tol, rel_tol })
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

/// Optional knobs for [`integrate_disk_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskOptions {
    pub tol: Tolerance,
    pub max_evals: usize,
}

impl Default for DiskOptions {
    fn default() -> Self {
        Self {
            tol: Tolerance::default(),
            max_evals: DEFAULT_MAX_EVALS,
        }
    }
}

impl DiskOptions {
    pub fn with_tol(tol: Tolerance) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

/// Integrates `f(x, y)` over `disk` to `tol` with the default budget.
pub fn integrate_disk<F>(f: F, disk: Disk, tol: Tolerance) -> Result<QuadratureResult>
where
    F: Fn(f64, f64) -> f64,
{
    integrate_disk_with(f, disk, DiskOptions::with_tol(tol))
}

pub fn integrate_disk_with<F>(f: F, disk: Disk, opts: DiskOptions) -> Result<QuadratureResult>
where
    F: Fn(f64, f64) -> f64,
{
    disk.validate()?;
    Tolerance::new(opts.tol.abs_tol, opts.tol.rel_tol)?;
    if opts.max_evals == 0 {
        return Err(Error::InvalidParameter {
            name: "max_evals",
            value: 0.0,
            reason: "evaluation budget must be positive",
        });
    }

    let budget = Budget::new(opts.max_evals);
    let radius = disk.radius;
    let r_breaks = [0.0, radius];
    let theta_breaks: Vec<f64> = (0..=4).map(|i| TAU * i as f64 / 4.0).collect();

    let nested = |target: f64, adaptive: bool| -> Result<Estimate> {
        let radial = |r: f64| -> Result<Sample> {
            let leaf = |theta: f64| -> Result<Sample> {
                budget.charge()?;
                let (s, c) = theta.sin_cos();
                Ok(Sample::point(f(disk.cx + r * c, disk.cy + r * s)))
            };
            let inner = if adaptive {
                // Each ring may contribute at most target/(4R) after the
                // radial weight, so the propagated total stays below target/4.
                let inner_abs = target / (4.0 * radius * r.max(f64::MIN_POSITIVE));
                adaptive_gk21(leaf, &theta_breaks, inner_abs, 0.0, &budget)?
            } else {
                gk21(&mut { leaf }, theta_breaks[0], theta_breaks[4])?
            };
            Ok(Sample {
                value: r * inner.value,
                error: r * inner.error,
                magnitude: r * inner.magnitude,
            })
        };
        if adaptive {
            adaptive_gk21(
                radial,
                &r_breaks,
                opts.tol.abs_tol / 2.0,
                opts.tol.rel_tol / 2.0,
                &budget,
            )
        } else {
            gk21(&mut { radial }, 0.0, radius)
        }
    };

    let abs_tol = opts.tol.abs_tol;
    let rel_tol = opts.tol.rel_tol;
    let run = || -> Result<Estimate> {
        // Inner accuracy is tied to the size of the whole integral rather than
        // to each ring, so sign changes across rings cannot stall the outer
        // level. A coarse tensor rule supplies the first size estimate.
        let pilot = nested(0.0, false)?;
        let mut target = abs_tol.max(rel_tol * pilot.value.abs());
        for _ in 0..3 {
            let est = nested(target, true)?;
            let wanted = abs_tol.max(rel_tol * est.value.abs());
            if wanted >= 0.5 * target {
                return Ok(est);
            }
            target = wanted;
        }
        nested(target, true)
    };

    match run() {
        Ok(est) => Ok(QuadratureResult {
            value: est.value,
            abs_error_estimate: est.error,
            evaluations: budget.used(),
        }),
        Err(Error::NonConvergence {
            value, abs_error, ..
        }) => Err(Error::NonConvergence {
            value,
            abs_error,
            evaluations: budget.used(),
        }),
        Err(e) => Err(e),
    }
}

/// Midpoint rule on an `n x n` polar grid (radius x angle), Jacobian included.
pub fn integrate_disk_oracle<F>(f: F, disk: Disk, n: usize) -> Result<f64>
where
    F: Fn(f64, f64) -> f64,
{
    disk.validate()?;
    if n < 16 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: n as f64,
            reason: "oracle grid needs at least 16 cells per direction",
        });
    }
    let dr = disk.radius / n as f64;
    let dtheta = TAU / n as f64;
    let angles: Vec<(f64, f64)> = (0..n)
        .map(|j| ((j as f64 + 0.5) * dtheta).sin_cos())
        .collect();
    let mut total = 0.0;
    for i in 0..n {
        let r = (i as f64 + 0.5) * dr;
        let ring: f64 = angles
            .iter()
            .map(|&(s, c)| f(disk.cx + r * c, disk.cy + r * s))
            .sum();
        total += r * ring;
    }
    Ok(total * dr * dtheta)
}

/// Shared evaluation counter across nesting levels.
struct Budget {
    used: Cell<usize>,
    limit: usize,
}

impl Budget {
    fn new(limit: usize) -> Self {
        Self {
            used: Cell::new(0),
            limit,
        }
    }

    fn charge(&self) -> Result<()> {
        let used = self.used.get();
        if used >= self.limit {
            return Err(Error::NonConvergence {
                value: f64::NAN,
                abs_error: f64::INFINITY,
                evaluations: used,
            });
        }
        self.used.set(used + 1);
        Ok(())
    }

    fn used(&self) -> usize {
        self.used.get()
    }
}

/// A function value that may itself be an estimate.
#[derive(Debug, Clone, Copy)]
struct Sample {
    value: f64,
    error: f64,
    /// Estimate of `|f|` (or `∫|f|` for nested samples).
    magnitude: f64,
}

impl Sample {
    fn point(v: f64) -> Self {
        Self {
            value: v,
            error: 0.0,
            magnitude: v.abs(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Estimate {
    value: f64,
    error: f64,
    magnitude: f64,
}

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_977_465_180,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    est: Estimate,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    // Largest error first; ties broken by position for determinism.
    fn cmp(&self, other: &Self) -> Ordering {
        self.est
            .error
            .total_cmp(&other.est.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn gk21<F>(f: &mut F, a: f64, b: f64) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<Sample>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut res_g = 0.0;
    let mut res_k = WGK[10] * fc.value;
    let mut res_abs = WGK[10] * fc.magnitude;
    let mut nested_err = WGK[10] * fc.error;
    let mut values = [(0.0, 0.0); 10];
    for (j, node) in XGK[..10].iter().enumerate() {
        let dx = half * node;
        let lo = f(center - dx)?;
        let hi = f(center + dx)?;
        let sum = lo.value + hi.value;
        res_k += WGK[j] * sum;
        res_abs += WGK[j] * (lo.magnitude + hi.magnitude);
        nested_err += WGK[j] * (lo.error + hi.error);
        if j % 2 == 1 {
            res_g += WG[j / 2] * sum;
        }
        values[j] = (lo.value, hi.value);
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc.value - mean).abs();
    for (j, (lo, hi)) in values.iter().enumerate() {
        res_asc += WGK[j] * ((lo - mean).abs() + (hi - mean).abs());
    }
    let scale = half.abs();
    let (value, res_abs, res_asc) = (res_k * scale, res_abs * scale, res_asc * scale);
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Estimate {
        value,
        error: err + nested_err * scale,
        magnitude: res_abs,
    })
}

/// Globally adaptive bisection over the panels defined by `breaks`.
fn adaptive_gk21<F>(
    mut f: F,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    budget: &Budget,
) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<Sample>,
{
    let mut heap = BinaryHeap::with_capacity(64);
    let mut partial = Estimate {
        value: 0.0,
        error: f64::INFINITY,
        magnitude: 0.0,
    };
    let give_up = |partial: &Estimate, heap: &BinaryHeap<Panel>| {
        let (value, error) = if heap.is_empty() {
            (partial.value, f64::INFINITY)
        } else {
            totals(heap)
        };
        Error::NonConvergence {
            value,
            abs_error: error,
            evaluations: budget.used(),
        }
    };

    for w in breaks.windows(2) {
        match gk21(&mut f, w[0], w[1]) {
            Ok(est) => heap.push(Panel {
                a: w[0],
                b: w[1],
                est,
            }),
            Err(Error::NonConvergence { .. }) => return Err(give_up(&partial, &heap)),
            Err(e) => return Err(e),
        }
    }

    loop {
        let (value, error) = totals(&heap);
        let magnitude: f64 = heap.iter().map(|p| p.est.magnitude).sum();
        partial = Estimate {
            value,
            error,
            magnitude,
        };
        let target = abs_tol.max(rel_tol * value.abs());
        if error <= target || error <= ROUNDOFF_FLOOR * magnitude {
            return Ok(partial);
        }
        let worst = heap.pop().expect("at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b)
            || (worst.b - worst.a) <= 1e-13 * (worst.a.abs() + worst.b.abs())
        {
            heap.push(worst);
            return Err(give_up(&partial, &heap));
        }
        let left = gk21(&mut f, worst.a, mid);
        let right = left.and_then(|l| gk21(&mut f, mid, worst.b).map(|r| (l, r)));
        match right {
            Ok((l, r)) => {
                heap.push(Panel {
                    a: worst.a,
                    b: mid,
                    est: l,
                });
                heap.push(Panel {
                    a: mid,
                    b: worst.b,
                    est: r,
                });
            }
            Err(Error::NonConvergence { .. }) => {
                heap.push(worst);
                return Err(give_up(&partial, &heap));
            }
            Err(e) => return Err(e),
        }
    }
}

fn totals(heap: &BinaryHeap<Panel>) -> (f64, f64) {
    // Sum in position order so the result does not depend on heap layout.
    let mut panels: Vec<&Panel> = heap.iter().collect();
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    panels
        .iter()
        .fold((0.0, 0.0), |(v, e), p| (v + p.est.value, e + p.est.error))
}
