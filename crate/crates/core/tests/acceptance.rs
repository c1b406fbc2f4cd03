#![allow(clippy::needless_range_loop)]

//! Acceptance checks. Each criterion prints one PASS/FAIL line; the process
//! exits non-zero if any criterion fails.

use std::f64::consts::{PI, TAU};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use lis_crlb::approx::{
    crlb_approx_prop1, crlb_approx_prop2, crlb_from_params, fisher_from_params, ApproxFisherParams,
};
use lis_crlb::closed_form::{crlb_limit, fisher_cpl_moments, fisher_cpl_theorem, CplConfig};
use lis_crlb::deployment::{
    crossover_radius, crossover_radius_numeric, deployment_crlb_numeric, make_layout, Split,
};
use lis_crlb::fisher::{crlb_numeric, fisher_matrix_with, fisher_sum_with, NumericOptions};
use lis_crlb::matrix::{crlb_from_fisher, FisherMatrix, Provenance};
use lis_crlb::model::{FieldModel, RadioConfig, SurfacePoint, TerminalPosition};
use lis_crlb::quadrature::Disk;
use lis_crlb::transforms::{fisher_spherical, jacobian, SphericalPosition};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const Z0_GRID: [f64; 5] = [1.0, 2.0, 4.0, 8.0, 16.0];
const R_GRID: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];
const LAMBDA_GRID: [f64; 3] = [0.05, 0.1, 0.5];

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn opts() -> NumericOptions {
    NumericOptions::default()
}

fn cpl_grid() -> Vec<CplConfig> {
    let mut grid = Vec::new();
    for z0 in Z0_GRID {
        for r in R_GRID {
            for lambda in LAMBDA_GRID {
                grid.push(CplConfig::new(z0, r, lambda).unwrap());
            }
        }
    }
    grid
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn log_grid(from: f64, to: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (from.ln() + (to.ln() - from.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

fn closed_form_vs_quadrature() -> Outcome {
    let start = Instant::now();
    let worst = cpl_grid()
        .par_iter()
        .map(|c| {
            let cf = fisher_cpl_theorem(c).unwrap();
            let t = TerminalPosition::on_axis(c.z0).unwrap();
            let cfg = RadioConfig::new(c.lambda).unwrap();
            let num =
                fisher_matrix_with(t, Disk::centered(c.radius).unwrap(), cfg, opts()).unwrap();
            let e = rel(num.at(0, 0), cf.ixy)
                .max(rel(num.at(1, 1), cf.ixy))
                .max(rel(num.at(2, 2), cf.iz));
            (e, *c)
        })
        .reduce(
            || (0.0, CplConfig::new(1.0, 1.0, 1.0).unwrap()),
            |a, b| if b.0 > a.0 { b } else { a },
        );
    let elapsed = start.elapsed();
    Outcome::new(
        worst.0 <= 1e-6 && elapsed < Duration::from_secs(120),
        format!(
            "75 configs, max rel diff {:.2e} at z0={} R={} lambda={} (tol 1e-6), {:.1}s (limit 120s)",
            worst.0,
            worst.1.z0,
            worst.1.radius,
            worst.1.lambda,
            elapsed.as_secs_f64()
        ),
    )
}

fn route_equivalence() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for c in cpl_grid() {
        let a = fisher_cpl_theorem(&c).unwrap();
        let b = fisher_cpl_moments(&c).unwrap();
        worst = worst.max(rel(a.ixy, b.ixy)).max(rel(a.iz, b.iz));
    }
    Outcome::new(
        worst <= 1e-12,
        format!(
            "max rel diff {worst:.2e} (tol 1e-12), {:.3}s",
            start.elapsed().as_secs_f64()
        ),
    )
}

fn asymptotic_limit() -> Outcome {
    let lambda = 0.1;
    let limit = crlb_limit(lambda);
    let z0 = 4.0;
    let c = fisher_cpl_theorem(&CplConfig::new(z0, 100.0 * z0, lambda).unwrap())
        .unwrap()
        .crlb();
    let num = crlb_numeric(
        TerminalPosition::on_axis(z0).unwrap(),
        &[Disk::centered(100.0 * z0).unwrap()],
        RadioConfig::new(lambda).unwrap(),
        opts(),
    )
    .unwrap();
    let devs = [
        rel(c.cxy, limit),
        rel(c.cz, limit),
        rel(num.at(0, 0), limit),
        rel(num.at(1, 1), limit),
        rel(num.at(2, 2), limit),
    ];
    let worst = devs.iter().cloned().fold(0.0, f64::max);
    Outcome::new(
        worst <= 0.02 && rel(limit, 1.5198e-3) < 1e-4,
        format!(
            "limit {limit:.4e}; closed form Cxy {:.4e} Cz {:.4e}; numeric diag {:.4e} {:.4e} {:.4e}; max dev {:.2}% (tol 2%)",
            c.cxy,
            c.cz,
            num.at(0, 0),
            num.at(1, 1),
            num.at(2, 2),
            100.0 * worst
        ),
    )
}

fn scaling_laws() -> Outcome {
    let (z0, lambda) = (8.0, 0.1);
    let taus = log_grid(0.02, 0.1, 20);
    let crlbs: Vec<_> = taus
        .iter()
        .map(|tau| {
            fisher_cpl_theorem(&CplConfig::new(z0, tau * z0, lambda).unwrap())
                .unwrap()
                .crlb()
        })
        .collect();
    let sxy = slope(&taus, &crlbs.iter().map(|c| c.cxy).collect::<Vec<_>>());
    let sz = slope(&taus, &crlbs.iter().map(|c| c.cz).collect::<Vec<_>>());

    let t = TerminalPosition::new(4.0, 4.0, 8.0).unwrap();
    let cfg = RadioConfig::new(lambda).unwrap();
    let radii = log_grid(0.1, 0.5, 8);
    let off: Vec<_> = radii
        .par_iter()
        .map(|&r| {
            crlb_numeric(t, &[Disk::centered(r).unwrap()], cfg, opts())
                .unwrap()
                .diag()
        })
        .collect();
    let areas: Vec<f64> = radii.iter().map(|r| PI * r * r).collect();
    let s_off: Vec<f64> = (0..3)
        .map(|k| slope(&areas, &off.iter().map(|d| d[k]).collect::<Vec<_>>()))
        .collect();
    let ok = (sxy + 4.0).abs() <= 0.1
        && (sz + 2.0).abs() <= 0.1
        && s_off.iter().all(|s| (s + 2.0).abs() <= 0.1);
    Outcome::new(
        ok,
        format!(
            "on-axis slopes vs tau Cxy {sxy:.4} (want -4) Cz {sz:.4} (want -2); off-axis slopes vs area {:.4} {:.4} {:.4} (want -2); tol 0.1",
            s_off[0], s_off[1], s_off[2]
        ),
    )
}

fn far_field_accuracy() -> Outcome {
    let start = Instant::now();
    let cfg = RadioConfig::new(0.1).unwrap();
    let (radius, z0) = (0.5, 8.0);
    let errs: Vec<[f64; 3]> = (1..=8)
        .into_par_iter()
        .map(|k| {
            let x = k as f64;
            let t = TerminalPosition::new(x, x, z0).unwrap();
            let num = crlb_numeric(t, &[Disk::centered(radius).unwrap()], cfg, opts()).unwrap();
            let ff = crlb_approx_prop2(t, radius, cfg).unwrap();
            [
                rel(ff.cxy, num.at(0, 0)),
                rel(ff.cxy, num.at(1, 1)),
                rel(ff.cz, num.at(2, 2)),
            ]
        })
        .collect();
    let max = |k: usize| errs.iter().map(|e| e[k]).fold(0.0, f64::max);
    let (ex, ey, ez) = (max(0), max(1), max(2));
    let elapsed = start.elapsed();
    Outcome::new(
        ex <= 0.01 && ey <= 0.01 && ez <= 0.02 && elapsed < Duration::from_secs(60),
        format!(
            "x0=y0 in 1..8: max error x {:.3}% y {:.3}% (tol 1%), z {:.3}% (tol 2%), {:.1}s (limit 60s)",
            100.0 * ex,
            100.0 * ey,
            100.0 * ez,
            elapsed.as_secs_f64()
        ),
    )
}

const DEPLOY_W: f64 = 4.0;
const DEPLOY_Z0: f64 = 8.0;
const BELOW_THRESHOLD: [f64; 4] = [0.5, 1.0, 1.5, 2.0];

fn deployment_crlb(split: Split, r: f64) -> [f64; 3] {
    let layout = make_layout(DEPLOY_W, DEPLOY_W, split, r).unwrap();
    deployment_crlb_numeric(
        TerminalPosition::on_axis(DEPLOY_Z0).unwrap(),
        &layout,
        RadioConfig::new(0.1).unwrap(),
        opts(),
    )
    .unwrap()
    .diag()
}

fn deployment_crossover() -> Outcome {
    let cfg = RadioConfig::new(0.1).unwrap();
    let analytic = crossover_radius(DEPLOY_W, DEPLOY_W).unwrap();
    let found =
        crossover_radius_numeric(DEPLOY_W, DEPLOY_W, DEPLOY_Z0, cfg, (1.0, 4.0), opts(), 1e-3)
            .unwrap();
    Outcome::new(
        (1.95..=2.65).contains(&found),
        format!("bisection crossover R = {found:.4} (window [1.95, 2.65]; analytic threshold {analytic:.4})"),
    )
}

fn deployment_depth_invariance() -> Outcome {
    let devs: Vec<(f64, f64)> = BELOW_THRESHOLD
        .par_iter()
        .map(|&r| {
            let central = deployment_crlb(Split::One, r);
            let split = deployment_crlb(Split::Four, r);
            (r, (central[2] / split[2] - 1.0).abs())
        })
        .collect();
    let worst = devs
        .iter()
        .cloned()
        .fold((0.0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
    Outcome::new(
        worst.1 < 0.10,
        format!(
            "R in {BELOW_THRESHOLD:?}: max |Cz ratio - 1| = {:.2}% at R = {} (tol 10%)",
            100.0 * worst.1,
            worst.0
        ),
    )
}

fn dense_split_gain() -> Outcome {
    let gains: Vec<(f64, f64)> = BELOW_THRESHOLD
        .par_iter()
        .map(|&r| {
            let four = deployment_crlb(Split::Four, r);
            let sixteen = deployment_crlb(Split::Sixteen, r);
            (r, 1.0 - sixteen[0] / four[0])
        })
        .collect();
    let worst = gains
        .iter()
        .cloned()
        .fold((0.0, f64::MIN), |a, b| if b.1 > a.1 { b } else { a });
    let listing: Vec<String> = gains
        .iter()
        .map(|(r, g)| format!("R={r}: {:.1}%", 100.0 * g))
        .collect();
    Outcome::new(
        worst.1 < 0.10,
        format!(
            "16-split Cxy improvement over 4-split [{}] (tol < 10%)",
            listing.join(", ")
        ),
    )
}

fn gradient_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let t = TerminalPosition::new(
            rng.gen_range(-5.0..5.0),
            rng.gen_range(-5.0..5.0),
            rng.gen_range(0.5..10.0),
        )
        .unwrap();
        let cfg = RadioConfig::new(rng.gen_range(0.05..1.0)).unwrap();
        let p = SurfacePoint::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let g = FieldModel::new(t, cfg).unwrap().gradient(p);
        let analytic = [g.d1, g.d2, g.d3];
        let base = t.as_array();
        let scale = analytic.iter().map(|c| c.norm()).fold(0.0, f64::max);
        for (k, an) in analytic.iter().enumerate() {
            let h = 1e-6 * base[k].abs().max(1.0);
            let (mut up, mut down) = (base, base);
            up[k] += h;
            down[k] -= h;
            let s = |v: [f64; 3]| {
                FieldModel::new(TerminalPosition::new(v[0], v[1], v[2]).unwrap(), cfg)
                    .unwrap()
                    .signal(p)
            };
            let fd = (s(up) - s(down)) / (2.0 * h);
            worst = worst.max((fd - an).norm() / scale);
        }
    }
    Outcome::new(
        worst < 1e-5,
        format!("100 random configurations, max rel err {worst:.2e} (tol 1e-5)"),
    )
}

fn property_suite() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let cfg = RadioConfig::new(0.1).unwrap();
    let disk = Disk::centered(1.0).unwrap();

    // Symmetry and positive definiteness of numeric Fisher matrices.
    for _ in 0..10 {
        let t = TerminalPosition::new(
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(1.0..8.0),
        )
        .unwrap();
        let f = fisher_matrix_with(t, disk, cfg, opts()).unwrap();
        let sym = (0..3).all(|i| (0..3).all(|k| f.at(i, k) == f.at(k, i)));
        if !sym || f.eigenvalues()[0] <= 0.0 {
            failures.push(format!("Fisher not symmetric positive definite at {t:?}"));
        }
    }

    // Off-diagonal nulls on the axis.
    for z0 in [1.0, 4.0, 16.0] {
        let f =
            fisher_matrix_with(TerminalPosition::on_axis(z0).unwrap(), disk, cfg, opts()).unwrap();
        let off = [f.at(0, 1), f.at(0, 2), f.at(1, 2)]
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        if off > 1e-10 * f.trace() {
            failures.push(format!("on-axis off-diagonal {off:e} at z0 = {z0}"));
        }
    }

    // Rotation about the surface normal leaves C33 and C11 + C22 unchanged.
    let (rho, z0) = (2.0, 6.0);
    let rotated: Vec<_> = [0.0, 0.7, 2.1, 4.0]
        .par_iter()
        .map(|&a: &f64| {
            let t = TerminalPosition::new(rho * a.cos(), rho * a.sin(), z0).unwrap();
            crlb_numeric(t, &[disk], cfg, opts()).unwrap()
        })
        .collect();
    for c in &rotated[1..] {
        let (c0, lat0) = (
            rotated[0].at(2, 2),
            rotated[0].at(0, 0) + rotated[0].at(1, 1),
        );
        if rel(c.at(2, 2), c0) > 1e-5 || rel(c.at(0, 0) + c.at(1, 1), lat0) > 1e-5 {
            failures.push("rotation invariance violated".into());
        }
    }

    // Noise level scales the bound linearly.
    let t = TerminalPosition::new(1.0, -0.5, 5.0).unwrap();
    let c2 = crlb_numeric(t, &[disk], cfg, opts()).unwrap();
    let c8 = crlb_numeric(
        t,
        &[disk],
        RadioConfig::with_noise(0.1, 8.0).unwrap(),
        opts(),
    )
    .unwrap();
    if c2.max_rel_diff(&c8.scaled(0.25)) > 1e-9 {
        failures.push("noise scaling is not linear".into());
    }

    // Rank-two closed-form inverse.
    let mut worst_inv: f64 = 0.0;
    for _ in 0..1000 {
        let t = TerminalPosition::new(
            rng.gen_range(-10.0..10.0),
            rng.gen_range(-10.0..10.0),
            rng.gen_range(0.5..20.0),
        )
        .unwrap();
        let p = ApproxFisherParams {
            z1: t.range(),
            alpha: 10f64.powf(rng.gen_range(-3.0..3.0)),
            beta: 10f64.powf(rng.gen_range(-3.0..3.0)),
        };
        let f = fisher_from_params(t, &p).entries();
        let c = crlb_from_params(t, &p).unwrap().entries();
        for (i, row) in c.iter().enumerate() {
            for k in 0..3 {
                let v: f64 = (0..3).map(|j| row[j] * f[j][k]).sum();
                let size: f64 = (0..3)
                    .map(|j| (row[j] * f[j][k]).abs())
                    .sum::<f64>()
                    .max(1.0);
                let target = if i == k { 1.0 } else { 0.0 };
                worst_inv = worst_inv.max((v - target).abs() / size);
            }
        }
    }
    if worst_inv > 1e-12 {
        failures.push(format!("closed-form inverse residual {worst_inv:e}"));
    }
    let t = TerminalPosition::new(4.0, 4.0, 8.0).unwrap();
    let via_eigen =
        crlb_from_fisher(&lis_crlb::approx::fisher_approx_prop1(t, 0.5, cfg).unwrap()).unwrap();
    if via_eigen.max_rel_diff(&crlb_approx_prop1(t, 0.5, cfg).unwrap()) > 1e-10 {
        failures.push("closed-form inverse disagrees with generic inverse".into());
    }

    // Spherical sandwich consistency.
    let mut worst_sph: f64 = 0.0;
    for _ in 0..50 {
        let a: [[f64; 3]; 3] =
            std::array::from_fn(|_| std::array::from_fn(|_| rng.gen_range(-1.0..1.0)));
        let m: [[f64; 3]; 3] = std::array::from_fn(|i| {
            std::array::from_fn(|k| {
                (0..3).map(|p| a[p][i] * a[p][k]).sum::<f64>() + if i == k { 0.1 } else { 0.0 }
            })
        });
        let f = FisherMatrix::new(m, Provenance::Numeric);
        let s = SphericalPosition::new(
            rng.gen_range(0.5..10.0),
            rng.gen_range(0.1..1.3),
            rng.gen_range(0.0..TAU),
        )
        .unwrap();
        let c_sph = crlb_from_fisher(&fisher_spherical(&f, s).unwrap()).unwrap();
        let j = jacobian(s);
        let jinv = nalgebra::Matrix3::from_fn(|r, c| j[r][c])
            .try_inverse()
            .unwrap();
        let expected = jinv * crlb_from_fisher(&f).unwrap().to_nalgebra() * jinv.transpose();
        let scale = expected.abs().max();
        for i in 0..3 {
            for k in 0..3 {
                worst_sph = worst_sph.max((c_sph.at(i, k) - expected[(i, k)]).abs() / scale);
            }
        }
    }
    if worst_sph > 1e-10 {
        failures.push(format!("spherical sandwich mismatch {worst_sph:e}"));
    }

    // Sum over apertures is additive.
    let pair = [
        Disk::new(-1.0, 0.0, 0.5).unwrap(),
        Disk::new(1.0, 0.0, 0.5).unwrap(),
    ];
    let t = TerminalPosition::on_axis(4.0).unwrap();
    let sum = fisher_sum_with(t, &pair, cfg, opts()).unwrap();
    let parts = fisher_matrix_with(t, pair[0], cfg, opts())
        .unwrap()
        .add(&fisher_matrix_with(t, pair[1], cfg, opts()).unwrap());
    if sum.max_rel_diff(&parts) > 1e-14 {
        failures.push("aperture sum is not additive".into());
    }

    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(60) {
        failures.push(format!("took {:.1}s (limit 60s)", elapsed.as_secs_f64()));
    }
    let detail = if failures.is_empty() {
        format!(
            "symmetry/PD, axis nulls, rotation, noise scaling, inverse residual {worst_inv:.1e}, sandwich {worst_sph:.1e}; {:.1}s",
            elapsed.as_secs_f64()
        )
    } else {
        failures.join("; ")
    };
    Outcome::new(failures.is_empty(), detail)
}

fn main() -> ExitCode {
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        ("1 closed form vs quadrature", closed_form_vs_quadrature),
        ("2 route equivalence", route_equivalence),
        ("3 asymptotic limit", asymptotic_limit),
        ("4 scaling laws", scaling_laws),
        ("5 far-field accuracy", far_field_accuracy),
        ("6a deployment crossover", deployment_crossover),
        ("6b depth bound invariance", deployment_depth_invariance),
        ("6c dense split gain", dense_split_gain),
        ("7 gradient oracle", gradient_oracle),
        ("8 property suite", property_suite),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let outcome = run();
        let tag = if outcome.pass { "PASS" } else { "FAIL" };
        println!("criterion {name}: {tag}: {}", outcome.detail);
        if !outcome.pass {
            failed += 1;
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}
