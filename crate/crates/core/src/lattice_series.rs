//! Interpolation and Fourier coefficients with respect to the lattice
//! kernels `{kk_w}`, `w != 0`, and the identities built from them.
//!
//! For `F` in the space,
//! `a_w = F(w) / ||k_w||` and `b_w = <e_w, F>` with the biorthogonal
//! elements `e_w = ||k_w|| sigma_0 / (sigma_0'(w) (z - w))`. Every lattice
//! sum here is truncated to `|w| <= trunc` and reported with a tail
//! estimate.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{inner_product, FockFunction, InnerMethod};
use crate::num::{Grid, LogComplex, PlaneIntegral, QuadratureSpec};
use crate::weierstrass::{dist_to_lattice, LatticePoint, SigmaConfig};

/// Which coefficient family a [`LatticeCoefficients`] holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoefficientKind {
    Interpolation,
    Fourier,
}

/// Coefficients `a_w` or `b_w` of one function over `0 < |w| <= truncation_radius`.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeCoefficients {
    pub entries: BTreeMap<LatticePoint, Complex64>,
    pub kind: CoefficientKind,
    pub source_label: String,
    pub truncation_radius: f64,
}

impl LatticeCoefficients {
    /// `sum |c_w|^2` over `|w| <= r`.
    pub fn partial_square_sum(&self, r: f64) -> f64 {
        self.entries
            .iter()
            .filter(|(w, _)| w.to_complex().norm() <= r)
            .map(|(_, c)| c.norm_sqr())
            .sum()
    }

    /// `max |c_w|^2 / log(1 + |w|)`.
    pub fn log_growth_constant(&self) -> f64 {
        self.entries
            .iter()
            .map(|(w, c)| c.norm_sqr() / (1.0 + w.to_complex().norm()).ln())
            .fold(0.0, f64::max)
    }
}

/// `a_w = F(w) e^{-pi|w|^2/2}`.
pub fn coeff_a(f: &FockFunction, w: LatticePoint) -> Complex64 {
    f.weighted_complex(w.to_complex())
}

pub fn interpolation_coefficients(f: &FockFunction, trunc: f64) -> LatticeCoefficients {
    LatticeCoefficients {
        entries: LatticePoint::within(trunc, false)
            .into_iter()
            .map(|w| (w, coeff_a(f, w)))
            .collect(),
        kind: CoefficientKind::Interpolation,
        source_label: f.label().to_string(),
        truncation_radius: trunc,
    }
}

/// Weighted biorthogonal element `e_w(z) e^{-pi|z|^2/2}`.
pub fn biorthogonal_weighted(cfg: &SigmaConfig, w: LatticePoint, z: Complex64) -> Result<LogComplex> {
    let s = cfg.sigma0_prime_closed_form(w)?;
    cfg.sigma_over_lattice_factors(z, &[LatticePoint::ORIGIN, w]).checked_div(s)
}

pub fn biorthogonal_element(cfg: Arc<SigmaConfig>, w: LatticePoint) -> Result<FockFunction> {
    let s = cfg.sigma0_prime_closed_form(w)?.recip()?;
    let zeros = LatticePoint::within(12.0, false)
        .into_iter()
        .filter(|p| *p != w)
        .map(|p| p.to_complex())
        .collect();
    Ok(FockFunction::new(format!("e[{},{}]", w.m, w.n), move |z| {
        cfg.sigma_over_lattice_factors(z, &[LatticePoint::ORIGIN, w]) * s
    })
    .with_zeros(zeros))
}

/// `b_w` by the reproducing property when `F` is a finite kernel sum.
pub fn coeff_b_closed(cfg: &SigmaConfig, f: &FockFunction, w: LatticePoint) -> Result<Option<Complex64>> {
    let Some(d) = f.decomposition().filter(|d| d.sigma3.is_none()) else {
        return Ok(None);
    };
    let mut acc = Complex64::new(0.0, 0.0);
    for t in &d.terms {
        acc += t.coeff.conj() * biorthogonal_weighted(cfg, w, t.center)?.to_complex();
    }
    Ok(Some(acc))
}

/// Tabulates `sigma_0` once on a grid so that many `b_w` and
/// `||sigma_0/(. - w)||` values cost one pass each.
pub struct CoefficientEngine {
    cfg: Arc<SigmaConfig>,
    grid: Grid,
    sigma0: Vec<Complex64>,
}

impl CoefficientEngine {
    pub fn new(cfg: Arc<SigmaConfig>, spec: &QuadratureSpec) -> Result<Self> {
        let grid = Grid::new(spec)?;
        let c = Arc::clone(&cfg);
        let sigma0 = grid.tabulate(move |z| c.sigma0_weighted(z))?;
        Ok(CoefficientEngine { cfg, grid, sigma0 })
    }

    pub fn sigma(&self) -> &Arc<SigmaConfig> {
        &self.cfg
    }

    /// `b_w = <e_w, F>` by quadrature for each `w`.
    pub fn fourier_many(&self, f: &FockFunction, ws: &[LatticePoint]) -> Result<Vec<PlaneIntegral>> {
        let fv = self.grid.tabulate(|z| f.weighted(z))?;
        let table: Vec<Complex64> = self.sigma0.iter().zip(&fv).map(|(s, v)| s * v.conj()).collect();
        ws.iter()
            .map(|&w| {
                if w.is_origin() {
                    return Err(Error::Domain("b_w is defined for w != 0".into()));
                }
                let wc = w.to_complex();
                let r = self.grid.integrate_indexed(|i, z| table[i] / (z - wc))?;
                let s = self.cfg.sigma0_prime_closed_form(w)?.to_complex();
                Ok(PlaneIntegral {
                    value: r.value / s,
                    error_estimate: r.error_estimate / s.norm(),
                    tail_estimate: r.tail_estimate / s.norm(),
                    coarse_difference: r.coarse_difference / s.norm(),
                    rounding_floor: r.rounding_floor / s.norm(),
                    nodes: r.nodes,
                })
            })
            .collect()
    }

    pub fn fourier_coefficients(&self, f: &FockFunction, trunc: f64) -> Result<LatticeCoefficients> {
        let ws = LatticePoint::within(trunc, false);
        let vals = self.fourier_many(f, &ws)?;
        Ok(LatticeCoefficients {
            entries: ws.into_iter().zip(vals).map(|(w, v)| (w, v.value)).collect(),
            kind: CoefficientKind::Fourier,
            source_label: f.label().to_string(),
            truncation_radius: trunc,
        })
    }

    /// `||sigma_0 / (. - w)||^2` for each `w`.
    pub fn deflated_norms_sq(&self, ws: &[LatticePoint]) -> Result<Vec<PlaneIntegral>> {
        let sq: Vec<f64> = self.sigma0.iter().map(|s| s.norm_sqr()).collect();
        ws.iter()
            .map(|&w| {
                let wc = w.to_complex();
                self.grid
                    .integrate_indexed(|i, z| Complex64::new(sq[i] / (z - wc).norm_sqr(), 0.0))
            })
            .collect()
    }
}

/// `b_w = <e_w, F>` by quadrature on `spec`.
pub fn coeff_b(cfg: Arc<SigmaConfig>, f: &FockFunction, w: LatticePoint, spec: &QuadratureSpec) -> Result<PlaneIntegral> {
    let e = biorthogonal_element(cfg, w)?;
    inner_product(&e, f, InnerMethod::Quadrature, spec)
}

/// Norms of `sigma_0 / (. - w)` for `0 < |w| <= w_max` against the
/// `log^{1/2}(1 + |w|) / |w|` profile.
#[derive(Clone, Debug, PartialEq)]
pub struct DeflatedNormReport {
    pub entries: Vec<(LatticePoint, f64)>,
    /// `max ||sigma_0/(. - w)|| |w| / log^{1/2}(1 + |w|)`.
    pub max_ratio: f64,
    pub max_error: f64,
}

pub fn deflated_norm_bounds(cfg: Arc<SigmaConfig>, w_max: f64, spec: &QuadratureSpec) -> Result<DeflatedNormReport> {
    if w_max < 4.0 {
        return Err(Error::Precondition(format!("w_max must be at least 4, got {w_max}")));
    }
    let engine = CoefficientEngine::new(cfg, spec)?;
    let ws = LatticePoint::within(w_max, false);
    let sq = engine.deflated_norms_sq(&ws)?;
    let mut entries = Vec::with_capacity(ws.len());
    let mut max_ratio: f64 = 0.0;
    let mut max_error: f64 = 0.0;
    for (w, r) in ws.into_iter().zip(sq) {
        let n = r.value.re.max(0.0).sqrt();
        let m = w.to_complex().norm();
        max_ratio = max_ratio.max(n * m / (1.0 + m).ln().sqrt());
        max_error = max_error.max(r.error_estimate);
        entries.push((w, n));
    }
    Ok(DeflatedNormReport { entries, max_ratio, max_error })
}

/// Both sides of a truncated identity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub gap: f64,
    /// Bound for the lattice terms beyond the truncation radius.
    pub tail_estimate: f64,
    /// Combined error estimate of the quadratures involved.
    pub quadrature_error: f64,
    pub terms: usize,
}

impl IdentityCheck {
    fn new(lhs: Complex64, rhs: Complex64, tail: f64, quad: f64, terms: usize) -> Self {
        IdentityCheck {
            lhs,
            rhs,
            gap: (lhs - rhs).norm(),
            tail_estimate: tail,
            quadrature_error: quad,
            terms,
        }
    }
}

/// Where the `b_w` of an identity come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FourierSource {
    /// Closed form when `F` is a finite kernel sum, quadrature otherwise.
    Auto,
    Quadrature,
}

fn fourier_for(
    engine: &CoefficientEngine,
    f: &FockFunction,
    ws: &[LatticePoint],
    source: FourierSource,
) -> Result<Vec<Complex64>> {
    if source == FourierSource::Auto && f.decomposition().is_some_and(|d| d.sigma3.is_none()) {
        return ws
            .iter()
            .map(|&w| Ok(coeff_b_closed(engine.sigma(), f, w)?.expect("decomposable")))
            .collect();
    }
    Ok(engine.fourier_many(f, ws)?.into_iter().map(|r| r.value).collect())
}

fn growth_bound(ws: &[LatticePoint], bs: &[Complex64]) -> f64 {
    ws.iter()
        .zip(bs)
        .map(|(w, b)| b.norm() / (1.0 + w.to_complex().norm()).ln().sqrt())
        .fold(0.0, f64::max)
}

const NEGLIGIBLE: f64 = 1e-17;

fn require_distinct(points: &[Complex64]) -> Result<()> {
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            if (a - b).norm() < 1e-9 {
                return Err(Error::Precondition(format!("points {a} and {b} coincide")));
            }
        }
    }
    Ok(())
}

/// `<G / ((. - l1)(. - l2)(. - l3)), F>` against
/// `sum_w G(w) b_w / ((w - l1)(w - l2)(w - l3) ||k_w||)`.
#[allow(clippy::too_many_arguments)]
pub fn quotient_pairing_identity(
    engine: &CoefficientEngine,
    g: &FockFunction,
    lambdas: [Complex64; 3],
    f: &FockFunction,
    trunc: f64,
    spec: &QuadratureSpec,
    window: f64,
    source: FourierSource,
) -> Result<IdentityCheck> {
    require_distinct(&lambdas)?;
    for l in lambdas {
        if dist_to_lattice(l) < 1e-9 {
            return Err(Error::Precondition(format!("{l} lies on the lattice")));
        }
        let v = g.weighted(l).abs();
        if v > 1e-8 {
            return Err(Error::Precondition(format!("G does not vanish at {l} (|G| = {v:e})")));
        }
    }
    let quotient = g
        .deflate(lambdas[0], window)
        .deflate(lambdas[1], window)
        .deflate(lambdas[2], window);
    let lhs = inner_product(&quotient, f, InnerMethod::Quadrature, spec)?;
    let cubic = |w: Complex64| (w - lambdas[0]) * (w - lambdas[1]) * (w - lambdas[2]);
    let factor = |w: LatticePoint| {
        let wc = w.to_complex();
        g.weighted_complex(wc) / cubic(wc)
    };
    let ws: Vec<LatticePoint> = LatticePoint::within(trunc, false)
        .into_iter()
        .filter(|&w| factor(w).norm() > NEGLIGIBLE)
        .collect();
    let bs = fourier_for(engine, f, &ws, source)?;
    let rhs: Complex64 = ws.iter().zip(&bs).map(|(&w, b)| factor(w) * b).sum();
    let cb = growth_bound(&ws, &bs);
    let tail: f64 = annulus(trunc)
        .map(|w| factor(w).norm() * cb * (1.0 + w.to_complex().norm()).ln().sqrt())
        .sum();
    Ok(IdentityCheck::new(lhs.value, rhs, tail, lhs.error_estimate, ws.len()))
}

fn annulus(trunc: f64) -> impl Iterator<Item = LatticePoint> {
    LatticePoint::within(2.0 * trunc, false)
        .into_iter()
        .filter(move |w| w.to_complex().norm() > trunc)
}

/// Cauchy-type plane integral `int conj(F1) Phi / (z - xi) dm_2` for weighted
/// `F1` and `Phi`, on a grid with `z` at a cell vertex.
pub fn cauchy_integral(f1: &FockFunction, phi: &FockFunction, z: Complex64, spec: &QuadratureSpec) -> Result<PlaneIntegral> {
    let grid = Grid::anchored(spec, z)?;
    grid.integrate_indexed(|_, xi| {
        (f1.weighted(xi).conj() * phi.weighted(xi)).to_complex() / (z - xi)
    })
}

/// Terms of the lattice sum `sum a_w b_w [1/(z - w) + 1/(w - mu)]`.
pub struct CauchySumTerms {
    pub first: Complex64,
    pub second: Complex64,
}

/// `sum a_w b_w / (z - w)` and `sum a_w b_w / (w - mu)` over `|w| <= trunc`.
pub fn cauchy_sums(
    engine: &CoefficientEngine,
    f1: &FockFunction,
    f2: &FockFunction,
    z: Complex64,
    mu: Complex64,
    trunc: f64,
    source: FourierSource,
) -> Result<(CauchySumTerms, f64, usize)> {
    let weight = |w: LatticePoint| {
        let wc = w.to_complex();
        coeff_a(f2, w).norm() * ((z - wc).inv() + (wc - mu).inv()).norm()
    };
    let ws: Vec<LatticePoint> = LatticePoint::within(trunc, false)
        .into_iter()
        .filter(|&w| weight(w) > NEGLIGIBLE)
        .collect();
    let bs = fourier_for(engine, f1, &ws, source)?;
    let mut first = Complex64::new(0.0, 0.0);
    let mut second = Complex64::new(0.0, 0.0);
    for (&w, b) in ws.iter().zip(&bs) {
        let wc = w.to_complex();
        let ab = coeff_a(f2, w) * b;
        first += ab / (z - wc);
        second += ab / (wc - mu);
    }
    let cb = growth_bound(&ws, &bs);
    let tail: f64 = annulus(trunc)
        .map(|w| weight(w) * cb * (1.0 + w.to_complex().norm()).ln().sqrt())
        .sum();
    Ok((CauchySumTerms { first, second }, tail, ws.len()))
}

/// The right side of the four-term identity, term by term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CauchyRightSide {
    /// `int conj(F1) F2 / (z - xi) dnu`.
    pub direct: Complex64,
    /// `(F2(z)/sigma_0(z)) int conj(F1) sigma_0 / (z - xi) dnu`.
    pub correction: Complex64,
    /// `<F2 / (. - mu), F1>`.
    pub pairing: Complex64,
    pub error: f64,
}

pub fn cauchy_right_side(
    cfg: &Arc<SigmaConfig>,
    f1: &FockFunction,
    f2: &FockFunction,
    z: Complex64,
    mu: Complex64,
    spec: &QuadratureSpec,
    window: f64,
) -> Result<CauchyRightSide> {
    let sigma0 = FockFunction::sigma0(Arc::clone(cfg));
    let direct = cauchy_integral(f1, f2, z, spec)?;
    let against_sigma = cauchy_integral(f1, &sigma0, z, spec)?;
    let ratio = f2.weighted(z).checked_div(sigma0.weighted(z))?.to_complex();
    let pairing = inner_product(&f2.deflate(mu, window), f1, InnerMethod::Quadrature, spec)?;
    Ok(CauchyRightSide {
        direct: direct.value,
        correction: ratio * against_sigma.value,
        pairing: pairing.value,
        error: direct.error_estimate + ratio.norm() * against_sigma.error_estimate + pairing.error_estimate,
    })
}

/// Both sides of
/// `sum a_w b_w [1/(z - w) + 1/(w - mu)] = direct - correction + pairing`
/// with `a` from `F2` and `b` from `F1`, for `F2(mu) = 0`.
#[allow(clippy::too_many_arguments)]
pub fn cauchy_identity(
    engine: &CoefficientEngine,
    f1: &FockFunction,
    f2: &FockFunction,
    z: Complex64,
    mu: Complex64,
    trunc: f64,
    spec: &QuadratureSpec,
    window: f64,
    source: FourierSource,
) -> Result<IdentityCheck> {
    for (name, p) in [("z", z), ("mu", mu)] {
        if dist_to_lattice(p) < 1e-9 && p.norm() > 0.5 {
            return Err(Error::Precondition(format!("{name} = {p} lies on the lattice")));
        }
    }
    let at_mu = f2.weighted(mu).abs();
    if at_mu > 1e-8 {
        return Err(Error::Precondition(format!("F2 does not vanish at mu (|F2| = {at_mu:e})")));
    }
    let (sums, tail, terms) = cauchy_sums(engine, f1, f2, z, mu, trunc, source)?;
    let rs = cauchy_right_side(engine.sigma(), f1, f2, z, mu, spec, window)?;
    let lhs = sums.first + sums.second;
    let rhs = rs.direct - rs.correction + rs.pairing;
    Ok(IdentityCheck::new(lhs, rhs, tail, rs.error, terms))
}

/// Both sides of the interpolation formula
/// `sum a_w ||k_w|| / (sigma_0'(w)(z - w)(l3 - w)(l4 - w)) = H2(z) / (sigma_0(z)(z - l3)(z - l4))`
/// for `H2` vanishing at `l3`, `l4`.
pub fn interpolation_identity(
    cfg: &SigmaConfig,
    h2: &FockFunction,
    l3: Complex64,
    l4: Complex64,
    z: Complex64,
    trunc: f64,
) -> Result<IdentityCheck> {
    require_distinct(&[l3, l4])?;
    if dist_to_lattice(z) < 0.05 {
        return Err(Error::Precondition(format!("z = {z} is within 0.05 of the lattice")));
    }
    for l in [l3, l4] {
        let v = h2.weighted(l).abs();
        if v > 1e-8 {
            return Err(Error::Precondition(format!("H2 does not vanish at {l} (|H2| = {v:e})")));
        }
    }
    let term = |w: LatticePoint| -> Result<Complex64> {
        let wc = w.to_complex();
        let s = cfg.sigma0_prime_closed_form(w)?.to_complex();
        Ok(coeff_a(h2, w) / (s * (z - wc) * (l3 - wc) * (l4 - wc)))
    };
    let mut lhs = Complex64::new(0.0, 0.0);
    let mut terms = 0;
    for w in LatticePoint::within(trunc, false) {
        lhs += term(w)?;
        terms += 1;
    }
    let mut tail = 0.0;
    for w in annulus(trunc) {
        tail += term(w)?.norm();
    }
    let rhs = interpolation_right_side(cfg, h2, l3, l4, z)?;
    Ok(IdentityCheck::new(lhs, rhs, tail, 0.0, terms))
}

fn interpolation_right_side(cfg: &SigmaConfig, h2: &FockFunction, l3: Complex64, l4: Complex64, z: Complex64) -> Result<Complex64> {
    let q = h2.weighted(z).checked_div(cfg.sigma0_weighted(z))?;
    Ok(q.to_complex() / ((z - l3) * (z - l4)))
}

/// Residues at `w0` of both sides of the interpolation formula; the right
/// side by a contour integral of radius `0.1`.
pub fn interpolation_residues(
    cfg: &SigmaConfig,
    h2: &FockFunction,
    l3: Complex64,
    l4: Complex64,
    w0: LatticePoint,
) -> Result<(Complex64, Complex64)> {
    let wc = w0.to_complex();
    let s = cfg.sigma0_prime_closed_form(w0)?.to_complex();
    let lhs = coeff_a(h2, w0) / (s * (l3 - wc) * (l4 - wc));
    const NODES: usize = 128;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..NODES {
        let d = Complex64::from_polar(0.1, 2.0 * PI * k as f64 / NODES as f64);
        acc += interpolation_right_side(cfg, h2, l3, l4, wc + d)? * d;
    }
    Ok((lhs, acc / NODES as f64))
}

/// Weyl translate of `sigma_0` by `a`:
/// `sigma_0(z - a) e^{pi conj(a) z - pi|a|^2/2}`, the generating function of
/// the kernels at `a + w`, `w != 0`.
pub fn translated_generating_function(cfg: Arc<SigmaConfig>, a: Complex64) -> FockFunction {
    let zeros = LatticePoint::within(20.0, false)
        .into_iter()
        .map(|w| a + w.to_complex())
        .collect();
    FockFunction::new(format!("sigma0[.-{a}]"), move |z| {
        cfg.sigma0_weighted(z - a) * LogComplex::new(0.0, PI * (a.conj() * z).im)
    })
    .with_zeros(zeros)
}
