//! Finite sections of the mixed system of the construction, against a
//! well-separated kernel control.

use std::sync::Arc;

use fockgabor::counterexample::{construct, ConstructionParams};
use fockgabor::mixed_gram::{
    by_modulus, defect_scan, gershgorin_bound, interlacing_holds, null_vector_correlation, GramReport, MemberKind,
    MixedSystemSpec,
};
use fockgabor::weierstrass::SigmaConfig;
use fockgabor::{Complex64, Result};

use crate::report::Panel;

/// Required drop of the smallest singular value across the scan.
const DEFECT_DROP: f64 = 10.0;
/// Largest allowed drop of the second smallest one.
const SECOND_DROP: f64 = 2.0;
const CONTROL_FLOOR: f64 = 0.5;
const FACTORIZATION_TOL: f64 = 1e-9;
const ASYMMETRY_TOL: f64 = 1e-10;
const BLOCK_TOL: f64 = 1e-10;
const CONTROL_SPACING: f64 = 2.0;

fn scan_rows(p: &mut Panel, prefix: &str, anchor: &str, reports: &[GramReport]) {
    for r in reports {
        let id = |s: &str| format!("{prefix}[{}].{s}", r.section_size);
        p.info(&id("sigma_min"), anchor, r.sigma_min);
        if let Some(s2) = r.sigma_2min {
            p.info(&id("sigma_2min"), anchor, s2);
        }
        p.info(&id("conditioning"), anchor, r.conditioning);
        p.at_most(&id("factorization_gap"), anchor, r.factorization_gap, FACTORIZATION_TOL);
        p.at_most(&id("asymmetry"), anchor, r.asymmetry, ASYMMETRY_TOL);
    }
    let ok = interlacing_holds(reports);
    p.at_least(&format!("{prefix}.interlacing"), anchor, if ok { 1.0 } else { 0.0 }, 1.0);
}

/// Points of `spacing (Z + iZ) + (1 + i)/4 spacing`, nearest the origin first.
pub fn control_points(count: usize, spacing: f64) -> Vec<Complex64> {
    let mut k = 0i64;
    while ((2 * k + 1) * (2 * k + 1)) < count as i64 {
        k += 1;
    }
    let off = Complex64::new(0.25, 0.25) * spacing;
    let mut pts: Vec<Complex64> = (-k..=k)
        .flat_map(|a| (-k..=k).map(move |b| Complex64::new(a as f64, b as f64) * spacing + off))
        .collect();
    pts.sort_by(by_modulus);
    pts.truncate(count);
    pts
}

pub fn run(params: &ConstructionParams, sizes: &[usize]) -> Panel {
    let mut panel = Panel::new("gram-defect");
    let anchor = "one-dimensional complement of the mixed system";
    panel.guard("mixed_sections", anchor, |p| {
        let cfg = Arc::new(SigmaConfig::new(SigmaConfig::DEFAULT_RADIUS)?);
        let r = construct(cfg, params)?;
        let spec = MixedSystemSpec::from_construction(&r, sizes.to_vec())?;
        let reports = defect_scan(&spec)?;
        scan_rows(p, "mixed", anchor, &reports);

        let last = reports.last().expect("at least one section");
        let first = &reports[0];
        let drop = first.sigma_min / last.sigma_min;
        p.at_least("mixed.sigma_min_drop", anchor, drop, DEFECT_DROP);
        if let (Some(a), Some(b)) = (first.sigma_2min, last.sigma_2min) {
            p.at_most("mixed.sigma_2min_drop", anchor, a / b, SECOND_DROP);
        }

        let kinds: Vec<MemberKind> = spec.members.iter().map(|m| m.kind).collect();
        let mut cross: f64 = 0.0;
        for i in 0..last.section_size {
            for j in 0..last.section_size {
                if kinds[i] != kinds[j] {
                    cross = cross.max(last.gram[(i, j)].norm());
                }
            }
        }
        p.at_most("mixed.cross_block", "quotients vanish on the kernel points", cross, BLOCK_TOL);

        let anchor = "witness of incompleteness";
        let h = r.tables.tabulate_expansion(r.h.decomposition().expect("H carries its expansion"))?;
        let rho_h = null_vector_correlation(&spec, last, &r.h, Some(&h))?;
        let rho_f = null_vector_correlation(&spec, last, &r.f, Some(&r.tables.f))?;
        p.info("mixed.null_correlation_h", anchor, rho_h);
        p.info("mixed.null_correlation_f", anchor, rho_f);
        Ok(())
    });

    let anchor = "separated kernels form a Riesz sequence";
    panel.guard("control", anchor, |p| -> Result<()> {
        let max = *sizes.iter().max().expect("validated sizes");
        let pts = control_points(max, CONTROL_SPACING);
        let bound = gershgorin_bound(&pts);
        let spec = MixedSystemSpec::kernels(&pts, sizes.to_vec())?;
        let reports = defect_scan(&spec)?;
        scan_rows(p, "control", anchor, &reports);
        p.info("control.gershgorin_bound", anchor, bound);
        for r in &reports {
            p.at_least(&format!("control[{}].floor", r.section_size), anchor, r.sigma_min, CONTROL_FLOOR);
            p.at_least(&format!("control[{}].gershgorin", r.section_size), anchor, r.sigma_min, bound);
        }
        Ok(())
    });
    panel
}
