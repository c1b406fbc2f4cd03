use lis_crlb::closed_form::{fisher_cpl_moments, fisher_cpl_theorem};
use lis_crlb::fisher::fisher_matrix;
use lis_crlb::transforms::{cart_to_sph, sph_to_cart};
use lis_crlb::{
    crlb_approx_prop1, crlb_cpl_simplified, crlb_from_fisher, crlb_limit, fisher_approx_prop1,
    fisher_cpl, make_layout, CplConfig, Disk, RadioConfig, SphericalPosition, Split,
    TerminalPosition, Tolerance,
};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn on_axis_bounds_shrink_with_aperture(z0 in 0.5f64..20.0, r in 0.01f64..50.0, grow in 1.01f64..10.0) {
        let small = fisher_cpl(&CplConfig::new(z0, r, 0.1).unwrap()).unwrap().crlb();
        let large = fisher_cpl(&CplConfig::new(z0, r * grow, 0.1).unwrap()).unwrap().crlb();
        prop_assert!(large.cxy < small.cxy);
        prop_assert!(large.cz < small.cz);
    }

    #[test]
    fn simplified_bounds_stay_above_limit(tau in 0.01f64..500.0, lambda in 0.01f64..1.0) {
        let c = crlb_cpl_simplified(tau, lambda).unwrap();
        let limit = crlb_limit(lambda);
        prop_assert!(c.cxy > limit && c.cz > limit);
    }

    /// The limit belongs to the `λ << z0` regime; the exact bound may dip
    /// below it by a margin of order `(λ/z0)²`.
    #[test]
    fn exact_bounds_approach_limit_from_above(z0 in 0.5f64..20.0, tau in 0.01f64..500.0, lambda in 0.01f64..1.0) {
        let c = fisher_cpl(&CplConfig::new(z0, tau * z0, lambda).unwrap()).unwrap().crlb();
        let floor = crlb_limit(lambda) * (1.0 - (lambda / z0).powi(2));
        prop_assert!(c.cxy >= floor, "cxy {} floor {}", c.cxy, floor);
        prop_assert!(c.cz >= floor, "cz {} floor {}", c.cz, floor);
    }

    #[test]
    fn closed_form_routes_agree(z0 in 0.5f64..20.0, tau in 0.05f64..50.0) {
        let c = CplConfig::new(z0, tau * z0, 0.1).unwrap();
        let a = fisher_cpl_theorem(&c).unwrap();
        let b = fisher_cpl_moments(&c).unwrap();
        prop_assert!(rel(a.ixy, b.ixy) < 1e-9);
        prop_assert!(rel(a.iz, b.iz) < 1e-9);
    }

    #[test]
    fn far_field_bound_is_positive_definite_inverse(
        x0 in -10.0f64..10.0, y0 in -10.0f64..10.0, z0 in 1.0f64..20.0, r in 0.05f64..2.0,
    ) {
        let t = TerminalPosition::new(x0, y0, z0).unwrap();
        let cfg = RadioConfig::new(0.1).unwrap();
        let c = crlb_approx_prop1(t, r, cfg).unwrap();
        prop_assert!(c.eigenvalues().iter().all(|&l| l > 0.0));
        let f = fisher_approx_prop1(t, r, cfg).unwrap();
        let generic = crlb_from_fisher(&f).unwrap();
        // A generic inverse loses about cond(F) ulps.
        let ev = f.eigenvalues();
        let cond = ev.iter().cloned().fold(0.0, f64::max) / ev.iter().cloned().fold(f64::INFINITY, f64::min);
        let d = c.max_rel_diff(&generic);
        prop_assert!(d < 1e-14 * cond.max(1e3), "diff {d} cond {cond}");
    }

    #[test]
    fn far_field_bound_is_rotation_invariant(
        rho in 0.0f64..10.0, a in 0.0f64..std::f64::consts::TAU, b in 0.0f64..std::f64::consts::TAU,
        z0 in 1.0f64..20.0,
    ) {
        let cfg = RadioConfig::new(0.1).unwrap();
        let at = |angle: f64| {
            let t = TerminalPosition::new(rho * angle.cos(), rho * angle.sin(), z0).unwrap();
            crlb_approx_prop1(t, 0.5, cfg).unwrap()
        };
        let (p, q) = (at(a), at(b));
        prop_assert!(rel(p.at(0, 0) + p.at(1, 1), q.at(0, 0) + q.at(1, 1)) < 1e-9);
        prop_assert!(rel(p.at(2, 2), q.at(2, 2)) < 1e-9);
    }

    #[test]
    fn spherical_round_trip(kappa in 0.1f64..100.0, phi in 0.0f64..1.5, psi in 0.0f64..std::f64::consts::TAU) {
        let s = SphericalPosition::new(kappa, phi, psi).unwrap();
        let back = cart_to_sph(sph_to_cart(s).unwrap()).unwrap();
        prop_assert!(rel(back.kappa, kappa) < 1e-12);
        prop_assert!((back.phi - phi).abs() < 1e-12);
        if phi > 1e-9 {
            let d = (back.psi - psi).rem_euclid(std::f64::consts::TAU);
            prop_assert!(d.min(std::f64::consts::TAU - d) < 1e-9);
        }
    }

    #[test]
    fn layouts_preserve_total_area(w in 0.5f64..10.0, h in 0.5f64..10.0, r in 0.05f64..5.0) {
        for split in Split::ALL {
            let l = make_layout(w, h, split, r).unwrap();
            let area: f64 = l.disks().iter().map(Disk::area).sum();
            prop_assert!(rel(area, std::f64::consts::PI * r * r) < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn numeric_fisher_is_symmetric_positive_and_linear_in_noise(
        x0 in -4.0f64..4.0, y0 in -4.0f64..4.0, z0 in 2.0f64..10.0, r in 0.2f64..2.0, n0 in 0.5f64..8.0,
    ) {
        let t = TerminalPosition::new(x0, y0, z0).unwrap();
        let d = Disk::centered(r).unwrap();
        let base = fisher_matrix(t, d, RadioConfig::new(0.1).unwrap(), Tolerance::default()).unwrap();
        let noisy = fisher_matrix(t, d, RadioConfig::with_noise(0.1, n0).unwrap(), Tolerance::default()).unwrap();
        prop_assert!(base.eigenvalues().iter().all(|&l| l > 0.0));
        let e = base.entries();
        for (i, k) in [(0, 1), (0, 2), (1, 2)] {
            prop_assert_eq!(e[i][k], e[k][i]);
        }
        prop_assert!(noisy.max_rel_diff(&base.scaled(2.0 / n0)) < 1e-9);
    }
}
