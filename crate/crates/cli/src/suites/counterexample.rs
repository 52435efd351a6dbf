//! The complete minimal system with a non-complete mixed part: construction,
//! preconditions, the four properties, and the perturbation constant.

use std::sync::Arc;

use fockgabor::counterexample::{
    build_h, construct, polynomial_multiple_pairings, verify_properties, ConstructionParams, ConstructionResult,
    PropertyReport,
};
use fockgabor::weierstrass::SigmaConfig;
use fockgabor::{Complex64, Result};

use crate::report::Panel;

const P2_TOL: f64 = 1e-8;
const P3_TOL: f64 = 1e-6;
const REAL_TOL: f64 = 1e-6;
const REALNESS_TOL: f64 = 1e-10;
const STABILITY: f64 = 0.5;
const MIN_MODULUS: f64 = 0.5;
const SEPARATION: f64 = 0.04;

/// The same construction with `q` doubled, on a quadrature disk large enough for it.
pub fn doubled(params: &ConstructionParams) -> Result<ConstructionParams> {
    let mut p = params.clone();
    p.q *= 2;
    let need = ConstructionParams::required_radius(p.q, p.levels).ceil();
    if p.spec.truncation_radius < need {
        p.spec = p.spec.clone().with_radius(need);
    }
    p.validate()?;
    Ok(p)
}

fn build(params: &ConstructionParams) -> Result<(ConstructionResult, PropertyReport)> {
    let cfg = Arc::new(SigmaConfig::new(SigmaConfig::DEFAULT_RADIUS)?);
    let r = construct(cfg, params)?;
    let rep = verify_properties(&r)?;
    Ok((r, rep))
}

fn p4_deviation(rep: &PropertyReport) -> f64 {
    (rep.p4.value - rep.sigma3_norm_sq.value).norm()
}

fn max_p3(rep: &PropertyReport) -> f64 {
    rep.p3.iter().map(|p| p.value.norm()).fold(0.0, f64::max)
}

pub fn run(params: &ConstructionParams) -> Panel {
    let mut panel = Panel::new("build-counterexample");
    let mut base = None;
    panel.guard("construction", "construction of F and H", |p| {
        let (r, rep) = build(params)?;
        let id = |s: &str| format!("q{}.{s}", params.q);
        preconditions(p, &r, &id);
        properties(p, &r, &rep, &id)?;
        base = Some(rep);
        Ok(())
    });
    let Some(rep) = base else { return panel };

    let anchor = "perturbation constant independent of q";
    panel.guard("doubled_q", anchor, |p| {
        let params2 = doubled(params)?;
        let (r2, rep2) = build(&params2)?;
        let id = |s: &str| format!("q{}.{s}", params2.q);
        preconditions(p, &r2, &id);
        properties(p, &r2, &rep2, &id)?;
        let ratio = rep2.perturbation_constant / rep.perturbation_constant;
        p.info("constant_ratio", anchor, ratio);
        p.at_most("constant_stability", anchor, ratio - 1.0, STABILITY);
        p.at_most("p3_no_increase", anchor, max_p3(&rep2) / max_p3(&rep), 1.0);
        p.at_most("p4_deviation_no_increase", anchor, p4_deviation(&rep2) / p4_deviation(&rep), 1.0);
        Ok(())
    });
    panel
}

fn preconditions(p: &mut Panel, r: &ConstructionResult, id: &impl Fn(&str) -> String) {
    let anchor = "sign changes of F near the nodes";
    for (n, b) in r.betas.iter().enumerate() {
        p.info(&id(&format!("beta[{n}]")), anchor, *b);
        p.at_most(&id(&format!("beta_window[{n}]")), anchor, b - 0.5, 1.0 / 6.0);
    }
    let anchor = "diagonal dominance of the system for d";
    for (n, s) in r.system.row_sums.iter().enumerate() {
        p.at_most(&id(&format!("row_sum[{n}]")), anchor, *s, 1.0);
    }
    p.info(&id("system_condition"), anchor, r.system.condition);
    p.info(&id("system_residual"), anchor, r.system.residual);
    for (n, d) in r.ds.iter().enumerate() {
        p.info(&id(&format!("d[{n}]")), anchor, *d);
        p.at_most(&id(&format!("d_bound[{n}]")), anchor, d.abs(), 1.0);
    }
    for (n, v) in r.vs.iter().enumerate() {
        p.info(&id(&format!("v[{n}]")), "points of the first part", *v);
    }
}

fn properties(
    p: &mut Panel,
    r: &ConstructionResult,
    rep: &PropertyReport,
    id: &impl Fn(&str) -> String,
) -> Result<()> {
    let anchor = "F vanishes on the kernel part";
    p.info(&id("p2_points"), anchor, rep.p2_sample.len() as f64);
    p.at_most(&id("p2_residual"), anchor, rep.p2_residual, P2_TOL);

    let anchor = "H is orthogonal to the quotients";
    for (n, v) in rep.p3.iter().enumerate() {
        p.at_most(&id(&format!("p3[{n}]")), anchor, v.value, P3_TOL);
    }
    p.info(&id("p3_solver_tolerance"), anchor, rep.p3_tolerance);

    let anchor = "F and H are not orthogonal";
    let s3 = rep.sigma3_norm_sq.value.re;
    let q_scale = (r.params.q as f64).powf(-1.0 / 3.0);
    p.info(&id("p4"), anchor, rep.p4.value);
    p.info(&id("sigma3_norm_sq"), anchor, s3);
    p.at_most(&id("p4_imaginary"), anchor, rep.p4.value.im, REAL_TOL);
    p.at_least(&id("p4_lower"), anchor, rep.p4.value.re, 0.5 * s3);
    p.at_most(&id("p4_deviation"), anchor, p4_deviation(rep), rep.perturbation_constant * q_scale);

    let anchor = "perturbation constant independent of q";
    p.info(&id("f_distance"), anchor, rep.f_distance);
    p.info(&id("h_distance"), anchor, rep.h_distance);
    p.info(&id("constant"), anchor, rep.perturbation_constant);

    let anchor = "zeros of F";
    p.at_most(&id("zero_scan_mismatches"), anchor, r.scan.mismatches.len() as f64, 0.0);
    p.info(&id("zero_scan_cells"), anchor, r.scan.cells as f64);
    p.at_least(&id("min_modulus"), anchor, rep.min_modulus, MIN_MODULUS);
    p.at_least(&id("separation"), anchor, rep.separation, SEPARATION);
    p.at_most(&id("realness"), anchor, rep.realness, REALNESS_TOL);

    let anchor = "growth estimates along the construction";
    for panel in &rep.panels {
        let name = panel.name.replace(' ', "_");
        p.info(&id(&format!("panel[{name}].low")), anchor, panel.low);
        p.info(&id(&format!("panel[{name}].high")), anchor, panel.high);
    }
    for (n, v) in rep.diagonal_scaling.iter().enumerate() {
        p.info(&id(&format!("diagonal_scaling[{n}]")), anchor, *v);
    }
    p.info(&id("cross_scaling"), anchor, rep.cross_scaling);

    let anchor = "linearity of the orthogonality defect in d";
    let mut ds = r.ds.clone();
    ds[0] += 0.1;
    let h = build_h(Arc::clone(&r.sigma), &r.params, &ds);
    let table = r.tables.tabulate_expansion(h.decomposition().expect("H carries its expansion"))?;
    let moved = (r.pair_gv(0, &table)?.value - rep.p3[0].value).norm();
    let u = r.params.q as f64;
    let expected = 0.1 * u.powf(-1.0 / 3.0) * r.g_v(0).weighted_complex(Complex64::new(u, 0.0)).norm();
    p.at_most(&id("d_sensitivity"), anchor, moved - expected, 1e-9 * expected.max(1.0));

    let anchor = "polynomial multiples of the quotients are orthogonal to H";
    let h_table = r.tables.tabulate_expansion(r.h.decomposition().expect("H carries its expansion"))?;
    let k = r.params.levels;
    for row in polynomial_multiple_pairings(r, &h_table, 4.min(k as u32), k)? {
        let rid = id(&format!("polynomial_multiple[n={},k={}]", row.power, row.k));
        p.info(&rid, anchor, row.value.value);
        if let Some(bound) = row.span_bound {
            let allowed = bound + row.value.rounding_floor + row.value.error_estimate;
            p.at_most(&format!("{rid}.bounded"), anchor, row.value.value, allowed);
        }
    }
    Ok(())
}
