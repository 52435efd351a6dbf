use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use super::*;
use crate::fock::FockFunction;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn sigma() -> Arc<SigmaConfig> {
    static CFG: OnceLock<Arc<SigmaConfig>> = OnceLock::new();
    CFG.get_or_init(|| Arc::new(SigmaConfig::new(SigmaConfig::DEFAULT_RADIUS).unwrap()))
        .clone()
}

fn built() -> &'static (ConstructionResult, PropertyReport) {
    static R: OnceLock<(ConstructionResult, PropertyReport)> = OnceLock::new();
    R.get_or_init(|| {
        let r = construct(sigma(), &ConstructionParams::new(8, 3).unwrap()).unwrap();
        let rep = verify_properties(&r).unwrap();
        (r, rep)
    })
}

#[test]
fn params_validation() {
    assert!(ConstructionParams::new(3, 3).is_err());
    assert!(ConstructionParams::new(8, 0).is_err());
    let mut p = ConstructionParams::new(8, 3).unwrap();
    assert_eq!(p.nodes(), vec![8.0, 16.0, 32.0]);
    assert_eq!(p.spec.truncation_radius, 52.0);
    p.spec = QuadratureSpec::new(50.0, 0.1).unwrap();
    assert!(matches!(p.validate(), Err(Error::Precondition(_))));
    // sum_{n > 3} (8 2^{n-1})^{-1/2}
    let tail: f64 = (3..200).map(|n| (8.0 * 2f64.powi(n)).powf(-0.5)).sum();
    assert!((ConstructionParams::new(8, 3).unwrap().kernel_tail() - tail).abs() < 1e-12);
}

#[test]
fn f_values() {
    let p = ConstructionParams::new(8, 3).unwrap();
    let f = build_f(sigma(), &p);
    let main = 8f64.powf(-0.5) * (1.0 - (-PI / 2.0).exp());
    let at_u = f.weighted_complex(c(8.0, 0.0));
    assert!((at_u - main).norm() < 0.01, "{at_u}");
    assert!((main - 0.2801).abs() < 1e-4);
    assert!(f.weighted(c(8.5, 0.0)).abs() <= 0.05);
    assert!(f.weighted(c(0.0, 20.0)).abs() <= 1e-6);
    assert_eq!(f.decomposition().unwrap().terms.len(), 6);
    // The local form holds up to the sigma_3 part and the other bumps.
    for z in [c(8.3, 0.4), c(16.2, -1.1), c(31.0, 2.5)] {
        let u = p.nodes().into_iter().find(|u| (z - u).norm() < 2.0 * u.sqrt()).unwrap();
        let rest = f.weighted_complex(z) - local_main_term(u, z);
        let s3 = sigma().sigma3_weighted(z).abs();
        let others: f64 = p
            .nodes()
            .into_iter()
            .filter(|v| *v != u)
            .map(|v| v.powf(-0.5) * 2.0 * (-PI * ((z - v).norm() - 1.0).max(0.0).powi(2) / 2.0).exp())
            .sum();
        assert!(rest.norm() <= s3 + others + 1e-15, "{z}: {rest}");
    }
}

#[test]
fn betas_and_trend() {
    let (r, _) = built();
    for b in &r.betas {
        assert!(*b > 1.0 / 3.0 && *b < 2.0 / 3.0);
    }
    assert!((r.betas[0] - 0.5).abs() <= 0.1);
    assert!((r.betas[2] - 0.5).abs() < (r.betas[0] - 0.5).abs());
    // Fine scan of the sign change.
    let f = &r.f;
    let xs: Vec<f64> = (0..=10_000).map(|k| 8.0 + 1.0 / 3.0 + k as f64 / 30_000.0).collect();
    let k = xs
        .windows(2)
        .position(|w| f.weighted_complex(c(w[0], 0.0)).re.signum() != f.weighted_complex(c(w[1], 0.0)).re.signum())
        .unwrap();
    assert!((xs[k] - 8.0 - r.betas[0]).abs() <= 1.0 / 30_000.0);
    for (u, b) in r.params.nodes().iter().zip(&r.betas) {
        assert!(f.weighted(c(u + b, 0.0)).abs() <= r.params.tol_root);
    }
}

#[test]
fn symmetric_pair_root() {
    let u = 20.0;
    let f = FockFunction::kernel(c(u, 0.0)).plus(&FockFunction::kernel(c(u + 1.0, 0.0)).scaled(c(-1.0, 0.0)));
    let b = bisect_root(&f, u, 1.0 / 3.0, 2.0 / 3.0, 1, 20).unwrap();
    assert!((b - 0.5).abs() <= 1e-6);
    assert!(matches!(bisect_root(&f, u, 0.6, 0.9, 1, 20), Err(Error::NoSignChange { level: 1, q: 20 })));
}

#[test]
fn v_selection() {
    let (r, _) = built();
    assert_eq!(r.vs[0], 8.0 - 8f64.sqrt());
    // 16 - 4 is a lattice point and F has a zero at about 12 + 5e-8, so
    // +0.05 fails and -0.05 is taken.
    assert!((r.vs[1] - 11.95).abs() < 1e-12);
    for (v, u) in r.vs.iter().zip(r.params.nodes()) {
        assert!((v - (u - u.sqrt())).abs() <= 1.0);
    }
    let p9 = ConstructionParams::new(9, 1).unwrap();
    let v = choose_vs(&p9, &[]).unwrap()[0];
    assert!(v != 6.0 && (v - 6.0).abs() <= 0.05 + 1e-12);
    let blocked: Vec<Complex64> = (-120..=120).map(|k| c(6.0 + k as f64 * 0.01, 0.0)).collect();
    assert!(choose_vs(&p9, &blocked).is_err());
}

#[test]
fn products() {
    let (r, rep) = built();
    assert_eq!(r.s.eval(c(0.0, 0.0)), c(1.0, 0.0));
    assert_eq!(r.g1.eval(c(0.0, 0.0)), c(1.0, 0.0));
    // Both products have the same number of zeros, one per node.
    let x = c(-3.0, 2.0);
    let ratio = (r.g1.eval(x) / r.s.eval(x)).norm();
    assert!(ratio > 0.1 && ratio < 10.0);
    // G_2 is smooth through the roots of S and agrees with F/S away from them.
    for root in r.roots() {
        let z = c(*root, 0.0);
        let near = r.g2.weighted_complex(z + 1e-3);
        let at = r.g2.weighted_complex(z);
        assert!((near - at).norm() < 1e-2 * at.norm());
        let away = z + c(0.3, 0.2);
        let direct = r.f.weighted_complex(away) / r.s.eval(away);
        assert!((r.g2.weighted_complex(away) - direct).norm() < 1e-13 * direct.norm());
    }
    for panel in &rep.panels {
        if !panel.name.starts_with("local form") && panel.name != "G upper bound" {
            assert!(panel.two_sided(), "{panel:?}");
        }
    }
}

#[test]
fn d_system() {
    let (r, rep) = built();
    for s in &r.system.row_sums {
        assert!(*s < 1.0);
    }
    for d in &r.ds {
        assert!(d.abs() < 1.0);
    }
    assert!(r.system.imaginary_part < 1e-12);
    for v in &rep.diagonal_scaling {
        assert!(*v > 0.5 && *v < 20.0);
    }
    let exact = PlaneIntegral::exact(c(0.5, 0.0));
    let (ds, sys) = solve_d(vec![vec![c(2.0, 0.0)]], vec![exact]).unwrap();
    assert_eq!(ds, vec![-0.25]);
    assert_eq!(sys.gamma, vec![-0.25]);
    let raw = vec![vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(0.1, 0.0), c(1.0, 0.0)]];
    assert!(matches!(solve_d(raw, vec![exact, exact]), Err(Error::NotDominant { row: 0, .. })));
}

#[test]
fn h_function() {
    let (r, rep) = built();
    let p = &r.params;
    let plain = build_h(sigma(), p, &[0.0, 0.0, 0.0]);
    let s3 = FockFunction::sigma3(sigma());
    for z in [c(0.3, 0.2), c(8.0, 0.0), c(-5.5, 7.1)] {
        assert_eq!(plain.weighted_complex(z), s3.weighted_complex(z));
    }
    let bound: f64 = r.ds.iter().zip(p.nodes()).map(|(d, u)| d.abs() * u.powf(-1.0 / 3.0)).sum();
    assert!(rep.h_distance <= bound + 1e-12);
    assert!(bound <= 1.21);
    // Far along the imaginary axis H is sigma_3 plus negligible bumps.
    let z = c(0.0, 30.0);
    assert!((r.h.weighted_complex(z) - s3.weighted_complex(z)).norm() <= 1e-6);
}

#[test]
fn four_properties() {
    let (r, rep) = built();
    assert_eq!(rep.p2_sample.len(), 20);
    assert!(rep.p2_residual <= 1e-8);
    for p in &rep.p3 {
        assert!(p.value.norm() <= rep.p3_tolerance);
    }
    assert!(rep.p4.value.im.abs() <= 1e-6);
    assert!(rep.p4.value.re >= 0.5 * rep.sigma3_norm_sq.value.re);
    assert!(rep.sigma3_norm_sq.value.re > 0.4 && rep.sigma3_norm_sq.value.re < 0.5);
    assert!(rep.min_modulus >= 0.5);
    assert!(rep.separation >= 0.04);
    assert!(rep.realness < 1e-12);
    assert!(r.scan.mismatches.is_empty());
    for (_, n) in &rep.g_norms {
        assert!(n.is_finite() && *n > 0.0);
    }
    for (_, v) in &rep.sigma3_pairing_scaled {
        assert!(*v < 2.0);
    }
}

#[test]
fn zeros_of_f() {
    let (r, _) = built();
    let mut checked = 0;
    for z in r.scan.zeros.iter().filter(|z| (**z - 8.5).norm() < 6.0) {
        assert!(r.f.weighted(*z).abs() < 1e-12);
        if z.im.abs() > 1e-9 {
            assert!(r.scan.zeros.iter().any(|w| (w - z.conj()).norm() < 1e-9));
        }
        checked += 1;
    }
    assert!(checked > 50);
    for root in r.roots() {
        assert!(r.scan.zeros.iter().any(|z| (z - root).norm() < 1e-8));
        assert!(r.lambda2.iter().all(|z| (z - root).norm() > 1e-3));
    }
}

#[test]
fn sensitivity_to_d() {
    let (r, rep) = built();
    let mut ds = r.ds.clone();
    ds[0] += 0.1;
    let h = build_h(sigma(), &r.params, &ds);
    let table = r.tables.tabulate_expansion(h.decomposition().unwrap()).unwrap();
    let moved = r.pair_gv(0, &table).unwrap().value;
    let expected = 0.1 * 8f64.powf(-1.0 / 3.0) * r.g_v(0).weighted_complex(c(8.0, 0.0)).norm();
    assert!(((moved - rep.p3[0].value).norm() - expected).abs() < 1e-9 * expected.max(1.0));
}

#[test]
fn polynomial_multiple_rows() {
    let (r, _) = built();
    let h = r.tables.tabulate_expansion(r.h.decomposition().unwrap()).unwrap();
    let rows = polynomial_multiple_pairings(r, &h, 3, 3).unwrap();
    for row in rows.iter().filter(|row| row.span_bound.is_some()) {
        let allowed = row.span_bound.unwrap() + row.value.rounding_floor + row.value.error_estimate;
        assert!(row.value.value.norm() <= allowed, "{row:?}");
    }
    assert!(rows[3].span_bound.is_none());
    let control = polynomial_multiple_pairings(r, &r.tables.sigma3, 0, 3).unwrap();
    assert!(control[0].value.value.norm() > 1e-3);
    let doubled: Vec<Complex64> = h.iter().map(|v| v * 2.0).collect();
    let twice = polynomial_multiple_pairings(r, &doubled, 3, 3).unwrap();
    for (a, b) in rows.iter().zip(&twice) {
        assert!((b.value.value - 2.0 * a.value.value).norm() <= 1e-10 * (1.0 + a.value.value.norm()));
    }
    assert!(polynomial_multiple_pairings(r, &h, 5, 3).is_err());
}

#[test]
fn reproducible() {
    let (r, _) = built();
    let again = construct(sigma(), &r.params).unwrap();
    assert_eq!(again.betas, r.betas);
    assert_eq!(again.vs, r.vs);
    assert_eq!(again.ds, r.ds);
    assert_eq!(again.lambda2, r.lambda2);
}
