//! Checks of the four properties and of the supporting estimates.

use num_complex::Complex64;
use rayon::prelude::*;

use super::{local_main_term, separation_margin, Biorthogonal, ConstructionResult};
use crate::error::Result;
use crate::fock::KernelExpansion;
use crate::num::PlaneIntegral;
use crate::weierstrass::dist_to_lattice;

/// Measured range of a quantity over a sample set.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimatePanel {
    pub name: String,
    pub low: f64,
    pub high: f64,
    pub samples: usize,
}

impl EstimatePanel {
    fn from_values(name: impl Into<String>, values: impl Iterator<Item = f64>) -> Self {
        let mut low = f64::INFINITY;
        let mut high = f64::NEG_INFINITY;
        let mut samples = 0;
        for v in values {
            low = low.min(v);
            high = high.max(v);
            samples += 1;
        }
        EstimatePanel { name: name.into(), low, high, samples }
    }

    /// `0 < low <= high < inf`.
    pub fn two_sided(&self) -> bool {
        self.samples > 0 && self.low > 0.0 && self.high.is_finite() && self.low <= self.high
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PropertyReport {
    /// Largest weighted `|F(l)|` over the sampled `L2`.
    pub p2_residual: f64,
    pub p2_sample: Vec<Complex64>,
    /// `|<g_{v_n}, H>|` by quadrature.
    pub p3: Vec<PlaneIntegral>,
    pub p3_tolerance: f64,
    pub p4: PlaneIntegral,
    pub sigma3_norm_sq: PlaneIntegral,
    /// `||F - sigma_3||`, closed form.
    pub f_distance: f64,
    /// `||H - sigma_3||`, closed form.
    pub h_distance: f64,
    /// `(||F - sigma_3|| + ||H - sigma_3||) Q^{1/3}`.
    pub perturbation_constant: f64,
    pub panels: Vec<EstimatePanel>,
    /// `||g_l||` for `l` in `L1` then the sampled `L2`.
    pub g_norms: Vec<(Complex64, f64)>,
    /// `|l| |<sigma_3, g_l>|` for the same points.
    pub sigma3_pairing_scaled: Vec<(Complex64, f64)>,
    /// `u_n^{1/2} |<g_{v_n}, kk_{u_n}>|`.
    pub diagonal_scaling: Vec<f64>,
    /// `max(u_m, u_n) |<g_{v_n}, kk_{u_m}>|`, `m != n`.
    pub cross_scaling: f64,
    /// Smallest `|l|` over `L`.
    pub min_modulus: f64,
    pub separation: f64,
    /// Largest `|Im F| / |F|` on the real line.
    pub realness: f64,
}

struct Samples {
    z: Vec<Complex64>,
    f: Vec<Complex64>,
    g: Vec<Complex64>,
}

fn sample_plane(result: &ConstructionResult, radius: f64) -> Samples {
    let step = 0.25;
    let k = (radius / step).ceil() as i64;
    let off = Complex64::new(0.0917, 0.0583);
    let z: Vec<Complex64> = (-k..=k)
        .flat_map(|a| (-k..=k).map(move |b| Complex64::new(a as f64 * step, b as f64 * step) + off))
        .filter(|z| z.norm() <= radius)
        .collect();
    let f: Vec<Complex64> = z.par_iter().map(|&p| result.f.weighted_complex(p)).collect();
    let g: Vec<Complex64> = z
        .par_iter()
        .zip(&f)
        .map(|(&p, fv)| {
            if result.roots().iter().any(|r| (p - r).norm() < super::ROOT_WINDOW) {
                result.g.weighted_complex(p)
            } else {
                fv * result.g1.eval(p) / result.s.eval(p)
            }
        })
        .collect();
    Samples { z, f, g }
}

fn disk_points(center: f64, radius: f64) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(center, 0.0)];
    for r in 1..=3 {
        for a in 0..16 {
            let t = 2.0 * std::f64::consts::PI * (a as f64 + 0.5) / 16.0;
            out.push(center + Complex64::from_polar(radius * r as f64 / 3.0, t));
        }
    }
    out
}

pub fn verify_properties(result: &ConstructionResult) -> Result<PropertyReport> {
    let params = &result.params;
    let nodes = params.nodes();
    let tables = &result.tables;
    let grid = &tables.grid;

    let p2_sample = result.lambda2_sample(20);
    let p2_residual = p2_sample.iter().map(|l| result.f.weighted(*l).abs()).fold(0.0, f64::max);

    let h_table = tables.tabulate_expansion(result.h.decomposition().expect("H carries its expansion"))?;
    let p3 = (0..nodes.len())
        .map(|n| result.pair_gv(n, &h_table))
        .collect::<Result<Vec<_>>>()?;
    let p3_tolerance = params.tol_solve * (1.0 + result.system.condition);

    let p4 = grid.inner(&tables.f, &h_table)?;
    let sigma3_norm_sq = grid.inner(&tables.sigma3, &tables.sigma3)?;
    let bumps = |e: &KernelExpansion| KernelExpansion { terms: e.terms.clone(), sigma3: None };
    let fb = bumps(result.f.decomposition().expect("F carries its expansion"));
    let hb = bumps(result.h.decomposition().expect("H carries its expansion"));
    let f_distance = fb.kernel_gram(&fb).re.max(0.0).sqrt();
    let h_distance = hb.kernel_gram(&hb).re.max(0.0).sqrt();
    let perturbation_constant = (f_distance + h_distance) * (params.q as f64).cbrt();

    let top = *nodes.last().expect("at least one level");
    let samples = sample_plane(result, top + 2.0 * top.sqrt() + 2.0);
    let in_node_disk = |z: Complex64| nodes.iter().position(|u| (z - u).norm() < 2.0 * u.sqrt());
    let ratio = |z: Complex64| (result.g1.eval(z) / result.s.eval(z)).norm();

    let mut panels = Vec::new();
    for (n, u) in nodes.iter().enumerate() {
        let (r, v) = (result.roots()[n], result.vs[n]);
        panels.push(EstimatePanel::from_values(
            format!("canonical ratio near node {}", n + 1),
            samples
                .z
                .iter()
                .filter(|z| in_node_disk(**z) == Some(n))
                .filter(|z| (*z - r).norm() > 1e-3 && (*z - v).norm() > 1e-3)
                .map(|&z| ratio(z) * ((z - r) / (z - v)).norm()),
        ));
        let disk = disk_points(*u, 1.0 / 3.0);
        panels.push(EstimatePanel::from_values(
            format!("F near node {}", n + 1),
            disk.iter().map(|&z| result.f.weighted(z).abs() * u.sqrt()),
        ));
        panels.push(EstimatePanel::from_values(
            format!("G near node {}", n + 1),
            disk.iter().map(|&z| result.g.weighted(z).abs() * u.sqrt()),
        ));
        panels.push(EstimatePanel::from_values(
            format!("local form remainder at node {}", n + 1),
            samples
                .z
                .iter()
                .zip(&samples.f)
                .filter(|(z, _)| (*z - u).norm() < 2.0 * u.sqrt())
                .map(|(&z, f)| (f - local_main_term(*u, z)).norm()),
        ));
    }
    panels.push(EstimatePanel::from_values(
        "canonical ratio off nodes",
        samples.z.iter().filter(|z| in_node_disk(**z).is_none()).map(|&z| ratio(z)),
    ));
    panels.push(EstimatePanel::from_values(
        "F lower bound off exceptional set",
        samples
            .z
            .iter()
            .zip(&samples.f)
            .filter(|(z, _)| in_node_disk(**z).is_none() && dist_to_lattice(**z) >= 0.1)
            .map(|(z, f)| f.norm() * (1.0 + z.norm()).powi(4)),
    ));
    panels.push(EstimatePanel::from_values(
        "G upper bound",
        samples.z.iter().zip(&samples.g).map(|(z, g)| g.norm() / (1.0 + z.norm())),
    ));

    let mut g_norms = Vec::new();
    let mut sigma3_pairing_scaled = Vec::new();
    for (n, v) in result.vs.iter().enumerate() {
        let l = Complex64::new(*v, 0.0);
        g_norms.push((l, result.g_norm_sq(Biorthogonal::Level(n))?.value.re.max(0.0).sqrt()));
        sigma3_pairing_scaled.push((l, v.abs() * result.system.sigma3_pairings[n].value.norm()));
    }
    for l in &p2_sample {
        g_norms.push((*l, result.g_norm_sq(Biorthogonal::Zero(*l))?.value.re.max(0.0).sqrt()));
        sigma3_pairing_scaled.push((*l, l.norm() * result.pair_g_lambda(*l, &tables.sigma3)?.value.norm()));
    }

    let diagonal_scaling = (0..nodes.len())
        .map(|n| result.system.raw[n][n].norm() * nodes[n].powf(1.0 / 3.0) * nodes[n].sqrt())
        .collect();
    let mut cross_scaling: f64 = 0.0;
    for n in 0..nodes.len() {
        for m in 0..nodes.len() {
            if m != n {
                let pairing = result.system.raw[n][m].norm() * nodes[m].powf(1.0 / 3.0);
                cross_scaling = cross_scaling.max(pairing * nodes[m].max(nodes[n]));
            }
        }
    }

    let min_modulus = result
        .lambda2
        .iter()
        .map(|z| z.norm())
        .chain(result.lambda1.iter().map(|v| v.abs()))
        .fold(f64::INFINITY, f64::min);
    let realness = (0..50)
        .map(|k| {
            let x = -10.0 + (top + 14.0) * (k as f64 + 0.3) / 50.0;
            let v = result.f.weighted_complex(Complex64::new(x, 0.0));
            v.im.abs() / v.norm().max(f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max);

    Ok(PropertyReport {
        p2_residual,
        p2_sample,
        p3,
        p3_tolerance,
        p4,
        sigma3_norm_sq,
        f_distance,
        h_distance,
        perturbation_constant,
        panels,
        g_norms,
        sigma3_pairing_scaled,
        diagonal_scaling,
        cross_scaling,
        min_modulus,
        separation: separation_margin(result),
        realness,
    })
}

/// `<z^n (G_1 / p_k) G_2, X>` with `p_k` the first `k` factors of `G_1`.
#[derive(Clone, Debug, PartialEq)]
pub struct MultipleRow {
    pub power: u32,
    pub k: usize,
    pub value: PlaneIntegral,
    /// `int_{|z| > R} |z^n (G_1/p_k) G_2 X| dnu` with `R = u_N + 2 sqrt(u_N)`.
    pub tail: f64,
    /// For `k > n` the function lies in the span of the `g_{v_m}`; bound
    /// propagated from the measured `|<g_{v_m}, X>|`.
    pub span_bound: Option<f64>,
}

pub fn polynomial_multiple_pairings(
    result: &ConstructionResult,
    x: &[num_complex::Complex64],
    n_max: u32,
    k: usize,
) -> Result<Vec<MultipleRow>> {
    let levels = result.params.levels;
    if n_max > 4 || k > levels {
        return Err(crate::Error::Precondition(format!(
            "need n_max <= 4 and k <= {levels}, got n_max = {n_max}, k = {k}"
        )));
    }
    let top = *result.params.nodes().last().expect("at least one level");
    let cut = top + 2.0 * top.sqrt();
    let rest = super::CanonicalProduct::new(result.vs[k..].to_vec());
    let pairings = (0..levels)
        .map(|m| result.pair_gv(m, x).map(|p| p.value.norm()))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for n in 0..=n_max {
        let poly = |z: Complex64| z.powu(n) * rest.eval(z);
        let grid = &result.tables.grid;
        let value = grid.integrate_indexed(|i, z| result.g2_at(i, z) * poly(z) * x[i].conj())?;
        let tail = grid
            .integrate_indexed(|i, z| {
                if z.norm() > cut {
                    Complex64::new((result.g2_at(i, z) * poly(z) * x[i]).norm(), 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })?
            .value
            .re;
        let span_bound = (k > n as usize).then(|| {
            (0..levels)
                .map(|m| {
                    let v = Complex64::new(result.vs[m], 0.0);
                    (poly(v) / result.g1.derivative_at_zero(m)).norm() * pairings[m]
                })
                .sum()
        });
        rows.push(MultipleRow { power: n, k, value, tail, span_bound });
    }
    Ok(rows)
}
