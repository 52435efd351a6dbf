//! Reproducing kernels, closed-form pairings, and the Bargmann transform.

use std::f64::consts::PI;
use std::sync::Arc;

use fockgabor::fock::{
    bargmann_gabor, bargmann_numeric, inner_product, kernel_weighted_eval, sampling_half_width, FockFunction,
    GaborAtom, InnerMethod, KernelExpansion, KernelSpec, KernelTerm, SampledSignal,
};
use fockgabor::lattice_series::biorthogonal_element;
use fockgabor::num::{Grid, LogComplex, QuadratureSpec};
use fockgabor::weierstrass::{LatticePoint, SigmaConfig};
use fockgabor::{Complex64, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::report::Panel;

const SEED: u64 = 0x00f0_c4a1;
const POINTS: usize = 50;
const PAIR_TOL: f64 = 1e-6;
const BARGMANN_TOL: f64 = 1e-6;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn expansion(terms: &[(Complex64, Complex64)], sigma3: Option<Complex64>) -> KernelExpansion {
    KernelExpansion {
        terms: terms.iter().map(|&(coeff, center)| KernelTerm { coeff, center }).collect(),
        sigma3,
    }
}

/// Twenty functions: single kernels, kernel sums, Gabor images, sigma_3
/// mixtures, and three members with no kernel expansion.
pub fn corpus(cfg: &Arc<SigmaConfig>) -> Result<Vec<FockFunction>> {
    let mut out: Vec<FockFunction> = [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0), c(1.0, 1.0), c(-0.7, 0.4), c(2.3, -1.2), c(-1.5, -2.5), c(0.3, 2.9)]
        .into_iter()
        .map(FockFunction::kernel)
        .collect();
    out.push(FockFunction::unnormalized_kernel(c(0.5, -0.5)));
    let sums = [
        expansion(&[(c(1.0, 0.0), c(0.2, 0.1)), (c(0.0, 0.5), c(-1.0, 1.0))], None),
        expansion(&[(c(1.0, 0.0), c(1.5, 0.0)), (c(-1.0, 0.0), c(-1.5, 0.0))], None),
        expansion(&[(c(0.3, -0.2), c(0.0, -2.0)), (c(0.7, 0.0), c(2.0, 2.0)), (c(-0.5, 0.5), c(-2.5, 0.5))], None),
    ];
    for (k, e) in sums.into_iter().enumerate() {
        out.push(FockFunction::from_expansion(format!("sum{k}"), e, None)?);
    }
    out.push(bargmann_gabor(GaborAtom::new(1.2, -0.7)));
    out.push(bargmann_gabor(GaborAtom::new(-2.0, 1.5)));
    out.push(FockFunction::sigma3(Arc::clone(cfg)));
    out.push(FockFunction::from_expansion(
        "sigma3+kk",
        expansion(&[(c(0.5, 0.0), c(2.0, 1.0))], Some(c(1.0, 0.0))),
        Some(Arc::clone(cfg)),
    )?);
    out.push(FockFunction::from_expansion(
        "sigma3-kk",
        expansion(&[(c(-1.0, 0.0), c(-1.0, -1.0)), (c(0.0, 0.25), c(3.0, 0.0))], Some(c(0.3, 0.0))),
        Some(Arc::clone(cfg)),
    )?);
    // Kernel pair vanishing at mu, divided by (z - mu).
    let (p, q, mu) = (c(0.3, 0.2), c(-0.4, 0.6), c(0.5, -0.5));
    let t = FockFunction::kernel(p).weighted(mu).checked_div(FockFunction::kernel(q).weighted(mu))?.to_complex();
    out.push(
        FockFunction::kernel(p)
            .plus(&FockFunction::kernel(q).scaled(-t))
            .deflate(mu, 1e-2)
            .with_label("pair/(z-mu)"),
    );
    let roots = [c(0.5, 0.0), c(0.0, -1.0)];
    out.push(FockFunction::kernel(c(-0.5, 0.5)).times("kk*poly", move |z| {
        LogComplex::from_complex(roots.iter().map(|r| z - r).product())
    }));
    out.push(biorthogonal_element(Arc::clone(cfg), LatticePoint::new(1, 1))?);
    Ok(out)
}

fn random_points(count: usize, radius: f64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let z = c(rng.gen_range(-radius..radius), rng.gen_range(-radius..radius));
        if z.norm() <= radius {
            out.push(z);
        }
    }
    out
}

pub fn run() -> Panel {
    let mut panel = Panel::new("verify-fock");
    let cfg = match SigmaConfig::new(SigmaConfig::DEFAULT_RADIUS) {
        Ok(c) => Arc::new(c),
        Err(e) => {
            panel.guard("sigma_config", "sigma function setup", |_| Err(e));
            return panel;
        }
    };
    panel.guard("kernel_examples", "normalized kernel values", |p| {
        let v = kernel_weighted_eval(KernelSpec::normalized(c(1.0, 0.0)), c(0.0, 1.0)).to_complex();
        p.info("kernel_at_i", "normalized kernel values", v);
        p.at_most("kernel_at_i_error", "normalized kernel values", v + (-PI).exp(), 1e-15);
        let k1 = FockFunction::unnormalized_kernel(c(1.0, 0.0));
        let ki = FockFunction::unnormalized_kernel(c(0.0, 1.0));
        let spec = QuadratureSpec::around(&[]);
        let pair = inner_product(&k1, &ki, InnerMethod::ClosedForm, &spec)?.value;
        p.at_most("unnormalized_pair_euler", "kernel inner products", pair + 1.0, 1e-12);
        let norm = fockgabor::fock::norm(&k1, &spec)?;
        p.at_most("kernel_norm", "kernel norm", norm - (PI / 2.0).exp(), 1e-12);
        Ok(())
    });

    let corpus = match corpus(&cfg) {
        Ok(c) => c,
        Err(e) => {
            panel.guard("corpus", "test corpus", |_| Err(e));
            return panel;
        }
    };
    panel.info("corpus_size", "test corpus", corpus.len() as f64);
    let spec = QuadratureSpec::new(12.0, QuadratureSpec::DEFAULT_STEP).expect("valid square");
    let grid = Grid::new(&spec).expect("valid grid");
    let points = random_points(POINTS, 4.0);
    let mut tables = Vec::with_capacity(corpus.len());
    for f in &corpus {
        let e = f.evaluator();
        tables.push(grid.tabulate(move |z| e(z)));
    }

    for (f, table) in corpus.iter().zip(&tables) {
        let id = format!("reproducing[{}]", f.label());
        panel.guard(&id, "reproducing property", |p| {
            let t = table.as_ref().map_err(Clone::clone)?;
            let mut worst_ratio: f64 = 0.0;
            let mut worst_error: f64 = 0.0;
            for &l in &points {
                let got = grid.integrate_indexed(|i, z| {
                    t[i] * kernel_weighted_eval(KernelSpec::unnormalized(l), z).conj().to_complex()
                })?;
                let exact = f.value(l).to_complex();
                let err = (got.value - exact).norm();
                worst_ratio = worst_ratio.max(err / got.error_estimate);
                worst_error = worst_error.max(err / exact.norm().max(1.0));
            }
            p.at_most(&format!("{id}.error_over_estimate"), "reproducing property", worst_ratio, 1.0);
            p.info(&format!("{id}.relative_error"), "reproducing property", worst_error);
            Ok(())
        });
    }

    panel.guard("closed_vs_quadrature", "kernel inner products", |p| {
        let mut worst: f64 = 0.0;
        let mut pairs = 0usize;
        for i in 0..corpus.len() {
            for j in i..corpus.len() {
                let Ok(closed) = inner_product(&corpus[i], &corpus[j], InnerMethod::ClosedForm, &spec) else {
                    continue;
                };
                let (a, b) = (tables[i].as_ref().map_err(Clone::clone)?, tables[j].as_ref().map_err(Clone::clone)?);
                let quad = grid.inner(a, b)?;
                worst = worst.max((closed.value - quad.value).norm());
                pairs += 1;
            }
        }
        p.info("closed_vs_quadrature.pairs", "kernel inner products", pairs as f64);
        p.at_most("closed_vs_quadrature.max_abs", "kernel inner products", worst, PAIR_TOL);
        Ok(())
    });

    bargmann(&mut panel);
    panel
}

fn bargmann(panel: &mut Panel) {
    let atoms: Vec<GaborAtom> = (0..10)
        .map(|k| {
            let t = k as f64;
            GaborAtom::new(1.7 * (0.9 * t).sin(), 1.3 * (1.7 * t + 0.4).cos())
        })
        .collect();
    let zs: Vec<Complex64> = (0..10)
        .flat_map(|a| (0..10).map(move |b| c(-3.0 + a as f64 * 6.0 / 9.0, -3.0 + b as f64 * 6.0 / 9.0)))
        .collect();
    let quarter = 2f64.powf(-0.25);
    let mut signals = Vec::new();
    for (k, atom) in atoms.iter().enumerate() {
        let id = format!("bargmann[{k}]");
        panel.guard(&id, "Gabor atoms map to kernels", |p| {
            let s = SampledSignal::gabor(*atom, sampling_half_width(*atom, 3.0), SampledSignal::DEFAULT_STEP)?;
            let closed = bargmann_gabor(*atom);
            let mut worst: f64 = 0.0;
            for &z in &zs {
                let a = bargmann_numeric(&s, z)?.to_complex();
                worst = worst.max((a - closed.weighted_complex(z) * quarter).norm());
            }
            p.at_most(&format!("{id}.pointwise"), "Gabor atoms map to kernels", worst, BARGMANN_TOL);
            // ||B f||_F = ||f||_2 with 2^{1/4} B f a unit kernel.
            let l2 = s.l2_norm()?;
            let fock = fockgabor::fock::norm(&closed, &QuadratureSpec::around(&[]))? * quarter;
            p.at_most(&format!("{id}.norm"), "Bargmann transform is unitary", l2 - fock, BARGMANN_TOL);
            let center = closed.decomposition().expect("kernel").terms[0].center;
            p.at_most(
                &format!("{id}.center"),
                "Gabor atoms map to kernels",
                center - c(atom.x, -atom.y),
                0.0,
            );
            signals.push((*atom, s));
            Ok(())
        });
    }
    panel.guard("unitarity", "Bargmann transform is unitary", |p| {
        let mut worst: f64 = 0.0;
        let mut worst_closed: f64 = 0.0;
        for (i, (a, sa)) in signals.iter().enumerate() {
            for (b, sb) in &signals[i..] {
                let l2 = sa.l2_inner(sb)?;
                let ka = bargmann_gabor(*a);
                let kb = bargmann_gabor(*b);
                let fock = inner_product(&ka, &kb, InnerMethod::ClosedForm, &QuadratureSpec::around(&[]))?.value
                    / 2f64.sqrt();
                worst = worst.max((l2 - fock).norm());
                worst_closed = worst_closed.max((a.l2_inner(b) - fock).norm());
            }
        }
        p.at_most("unitarity.sampled", "Bargmann transform is unitary", worst, BARGMANN_TOL);
        p.at_most("unitarity.closed", "Bargmann transform is unitary", worst_closed, 1e-12);
        Ok(())
    });
}
