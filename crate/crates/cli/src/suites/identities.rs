//! Lattice-series identities: the quotient pairing, the four-term Cauchy
//! identity, the interpolation formula, and the coefficient bounds.

use std::sync::Arc;

use fockgabor::fock::{inner_product, FockFunction, InnerMethod, KernelExpansion, KernelTerm};
use fockgabor::lattice_series::{
    cauchy_right_side, deflated_norm_bounds, cauchy_identity, interpolation_residues, interpolation_identity, interpolation_coefficients,
    quotient_pairing_identity, translated_generating_function, CoefficientEngine, FourierSource, IdentityCheck,
};
use fockgabor::num::{LogComplex, QuadratureSpec};
use fockgabor::weierstrass::{LatticePoint, SigmaConfig};
use fockgabor::{Complex64, Result};

use crate::report::Panel;

const GAP_TOL: f64 = 1e-4;
/// Gaps below this are rounding noise and are not expected to shrink.
const GAP_FLOOR: f64 = 1e-9;
const BIORTHOGONAL_TOL: f64 = 1e-6;
const BASE_STEP: f64 = 0.05;
const ENGINE_RADIUS: f64 = 24.0;
const PAIRING_RADIUS: f64 = 14.0;
const WINDOW: f64 = 1e-3;
const CAUCHY_WINDOW: f64 = 1e-2;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Pass when the refined gap is smaller, or both gaps sit at the floor.
fn gap_decreases(p: &mut Panel, id: &str, anchor: &str, coarse: &IdentityCheck, fine: &IdentityCheck) {
    p.info(&format!("{id}.gap_refined"), anchor, fine.gap);
    let shrinks = fine.gap < coarse.gap || fine.gap.max(coarse.gap) <= GAP_FLOOR;
    p.at_least(&format!("{id}.gap_decreases"), anchor, if shrinks { 1.0 } else { 0.0 }, 1.0);
}

fn identity_rows(p: &mut Panel, id: &str, anchor: &str, r: &IdentityCheck) {
    p.info(&format!("{id}.lhs"), anchor, r.lhs);
    p.info(&format!("{id}.rhs"), anchor, r.rhs);
    p.info(&format!("{id}.tail"), anchor, r.tail_estimate);
    p.at_most(&format!("{id}.gap"), anchor, r.gap, GAP_TOL);
}

/// The functions paired against in the identities.
fn test_functions(cfg: &Arc<SigmaConfig>) -> Result<Vec<(&'static str, FockFunction)>> {
    let sum = FockFunction::from_expansion(
        "sum",
        KernelExpansion {
            terms: vec![
                KernelTerm { coeff: c(1.0, 0.0), center: c(0.2, 0.1) },
                KernelTerm { coeff: c(0.0, 0.5), center: c(-1.0, 1.0) },
            ],
            sigma3: None,
        },
        None,
    )?;
    Ok(vec![
        ("lattice_kernel", FockFunction::kernel(c(2.0, 0.0))),
        ("kernel", FockFunction::kernel(c(0.3, 1.2))),
        ("kernel_sum", sum),
        ("sigma3", FockFunction::sigma3(Arc::clone(cfg))),
    ])
}

/// `kk_p - t kk_q` with `t` chosen so that it vanishes at `mu`.
fn vanishing_pair(p: Complex64, q: Complex64, mu: Complex64) -> Result<FockFunction> {
    let t = FockFunction::kernel(p).weighted(mu).checked_div(FockFunction::kernel(q).weighted(mu))?.to_complex();
    Ok(FockFunction::kernel(p).plus(&FockFunction::kernel(q).scaled(-t)))
}

fn poly(roots: Vec<Complex64>) -> impl Fn(Complex64) -> LogComplex + Send + Sync + 'static {
    move |z| LogComplex::from_complex(roots.iter().map(|r| z - r).product())
}

pub fn run(trunc: f64) -> Panel {
    let mut panel = Panel::new("check-identities");
    let refined_trunc = trunc + 4.0;
    let setup = || -> Result<_> {
        let cfg = Arc::new(SigmaConfig::new(SigmaConfig::DEFAULT_RADIUS)?);
        let coarse = CoefficientEngine::new(Arc::clone(&cfg), &QuadratureSpec::new(ENGINE_RADIUS, BASE_STEP)?)?;
        let fine = CoefficientEngine::new(Arc::clone(&cfg), &QuadratureSpec::new(ENGINE_RADIUS, BASE_STEP / 2.0)?)?;
        let functions = test_functions(&cfg)?;
        Ok((cfg, coarse, fine, functions))
    };
    let (cfg, coarse, fine, functions) = match setup() {
        Ok(s) => s,
        Err(e) => {
            panel.guard("setup", "lattice coefficient setup", |_| Err(e));
            return panel;
        }
    };

    let anchor = "quotient pairing as a lattice sum";
    let a = c(0.5, 0.5);
    let g = translated_generating_function(Arc::clone(&cfg), a);
    let lambdas = [a + 1.0, a + c(0.0, 1.0), a - 1.0];
    for (name, f) in &functions {
        let id = format!("quotient_pairing[{name}]");
        panel.guard(&id, anchor, |p| {
            let spec = QuadratureSpec::new(PAIRING_RADIUS, BASE_STEP)?;
            let r = quotient_pairing_identity(&coarse, &g, lambdas, f, trunc, &spec, WINDOW, FourierSource::Auto)?;
            identity_rows(p, &id, anchor, &r);
            let spec = spec.with_step(BASE_STEP / 2.0);
            let r2 = quotient_pairing_identity(&fine, &g, lambdas, f, refined_trunc, &spec, WINDOW, FourierSource::Auto)?;
            gap_decreases(p, &id, anchor, &r, &r2);
            Ok(())
        });
    }

    let anchor = "four-term Cauchy identity";
    let mu = c(0.5, -0.5);
    let z = c(0.37, 0.61);
    match vanishing_pair(c(0.3, 0.2), c(-0.4, 0.6), mu) {
        Ok(f2) => {
            for (name, f1) in functions.iter().skip(1) {
                let id = format!("cauchy_identity[{name}]");
                panel.guard(&id, anchor, |p| {
                    let spec = QuadratureSpec::new(ENGINE_RADIUS, BASE_STEP)?;
                    let r = cauchy_identity(&coarse, f1, &f2, z, mu, trunc, &spec, CAUCHY_WINDOW, FourierSource::Auto)?;
                    identity_rows(p, &id, anchor, &r);
                    let spec = spec.with_step(BASE_STEP / 2.0);
                    let r2 =
                        cauchy_identity(&fine, f1, &f2, z, mu, refined_trunc, &spec, CAUCHY_WINDOW, FourierSource::Auto)?;
                    gap_decreases(p, &id, anchor, &r, &r2);
                    Ok(())
                });
            }
            panel.guard("cauchy_far_point", "far-field behavior of the Cauchy term", |p| {
                let f1 = &functions[1].1;
                let spec = QuadratureSpec::new(ENGINE_RADIUS, BASE_STEP)?;
                let far = c(10.5, 0.0);
                let rs = cauchy_right_side(&cfg, f1, &f2, far, mu, &spec, CAUCHY_WINDOW)?;
                let pair = inner_product(&f2, f1, InnerMethod::ClosedForm, &spec)?.value;
                let ratio = rs.direct * far / pair;
                p.info("cauchy_far_point.ratio", "far-field behavior of the Cauchy term", ratio);
                p.at_most("cauchy_far_point.deviation", "far-field behavior of the Cauchy term", ratio - 1.0, 0.2);
                Ok(())
            });
        }
        Err(e) => panel.guard("cauchy_identity", anchor, |_| Err(e)),
    }

    interpolation(&mut panel, &cfg, trunc, refined_trunc);
    coefficient_bounds(&mut panel, &cfg, &coarse, &functions);
    panel
}

fn interpolation(panel: &mut Panel, cfg: &Arc<SigmaConfig>, trunc: f64, refined_trunc: f64) {
    let anchor = "interpolation formula";
    let l3 = c(0.5, 0.5);
    let l4 = c(-1.5, 2.5);
    let kernel_multiple = FockFunction::kernel(c(2.0, 1.0)).times("kk*poly", poly(vec![l3, l4]));
    let c2 = Arc::clone(cfg);
    let removed = [LatticePoint::ORIGIN, LatticePoint::new(1, 0), LatticePoint::new(0, 1), LatticePoint::new(-1, -1)];
    let sigma_multiple = FockFunction::new("sigma/poly", move |z| c2.sigma_over_lattice_factors(z, &removed))
        .times("sigma*poly", poly(vec![l3, l4]));
    let cases = [("kernel_multiple", &kernel_multiple, c(1.5, -0.5)), ("sigma_multiple", &sigma_multiple, c(0.3, 1.6))];
    for (name, h2, z) in cases {
        let id = format!("interpolation[{name}]");
        panel.guard(&id, anchor, |p| {
            let r = interpolation_identity(cfg, h2, l3, l4, z, trunc)?;
            identity_rows(p, &id, anchor, &r);
            let r2 = interpolation_identity(cfg, h2, l3, l4, z, refined_trunc)?;
            gap_decreases(p, &id, anchor, &r, &r2);
            Ok(())
        });
    }
    panel.guard("interpolation_residue", anchor, |p| {
        let (lhs, rhs) = interpolation_residues(cfg, &sigma_multiple, l3, l4, LatticePoint::new(1, 0))?;
        p.info("interpolation_residue.lhs", anchor, lhs);
        p.at_most("interpolation_residue.gap", anchor, lhs - rhs, 1e-6);
        Ok(())
    });
}

fn coefficient_bounds(
    panel: &mut Panel,
    cfg: &Arc<SigmaConfig>,
    engine: &CoefficientEngine,
    functions: &[(&'static str, FockFunction)],
) {
    let anchor = "biorthogonal system of the lattice kernels";
    panel.guard("biorthogonality", anchor, |p| {
        let ws = LatticePoint::within(4.0, false);
        let mut worst: f64 = 0.0;
        for v in &ws {
            let b = engine.fourier_many(&FockFunction::kernel(v.to_complex()), &ws)?;
            for (w, r) in ws.iter().zip(&b) {
                let expected = if w == v { 1.0 } else { 0.0 };
                worst = worst.max((r.value - expected).norm());
            }
        }
        p.info("biorthogonality.points", anchor, ws.len() as f64);
        p.at_most("biorthogonality.max_deviation", anchor, worst, BIORTHOGONAL_TOL);
        Ok(())
    });
    let anchor = "growth of the Fourier coefficients";
    panel.guard("fourier_growth", anchor, |p| {
        let sigma3 = FockFunction::sigma3(Arc::clone(cfg));
        let ws = LatticePoint::within(8.0, false);
        let b = engine.fourier_many(&sigma3, &ws)?;
        let mut worst: f64 = 0.0;
        for (w, r) in ws.iter().zip(&b) {
            worst = worst.max(r.value.norm_sqr() / (1.0 + w.to_complex().norm()).ln());
            if *w == LatticePoint::new(2, 1) {
                p.info("fourier_growth.b_2_plus_i", anchor, r.value);
            }
        }
        p.info("fourier_growth.max_ratio", anchor, worst);
        p.at_least("fourier_growth.finite", anchor, if worst.is_finite() { 1.0 } else { 0.0 }, 1.0);
        Ok(())
    });
    let anchor = "norms of the deflated generating function";
    panel.guard("deflated_norms", anchor, |p| {
        let r = deflated_norm_bounds(Arc::clone(cfg), 8.0, &QuadratureSpec::new(ENGINE_RADIUS, 0.1)?)?;
        p.info("deflated_norms.max_ratio", anchor, r.max_ratio);
        p.at_least("deflated_norms.finite", anchor, if r.max_ratio.is_finite() { 1.0 } else { 0.0 }, 1.0);
        let at = |w: LatticePoint| r.entries.iter().find(|(p, _)| *p == w).map(|e| e.1).unwrap_or(f64::NAN);
        let (near, far) = (at(LatticePoint::new(1, 0)), at(LatticePoint::new(8, 0)));
        p.info("deflated_norms.at_one", anchor, near);
        p.info("deflated_norms.at_eight", anchor, far);
        p.at_least("deflated_norms.decay", anchor, near - far, f64::MIN_POSITIVE);
        Ok(())
    });
    let anchor = "square-summable interpolation coefficients";
    for (name, f) in functions {
        let id = format!("interpolation_tail[{name}]");
        panel.guard(&id, anchor, |p| {
            let a = interpolation_coefficients(f, 12.0);
            let grow = a.partial_square_sum(12.0) - a.partial_square_sum(10.0);
            p.at_most(&id, anchor, grow, 1e-6);
            Ok(())
        });
    }
}
