//! The counterexample construction: a complete minimal kernel system
//! `{kk_l}` over `L = L1 u L2` and a nonzero `H` orthogonal to the mixed
//! system `{kk_l}_{L2} u {g_l}_{L1}`.
//!
//! `F = sigma_3 + sum_n u_n^{-1/2} (kk_{u_n} - kk_{u_n + 1})` with lacunary
//! `u_n = 2^{n-1} Q`, truncated at `N` levels. `L2` is the zero set of `F`
//! minus the real zeros `u_n + beta_n`, `L1 = {v_n}` with `v_n` near
//! `u_n - sqrt(u_n)`, and `H = sigma_3 + sum_n d_n u_n^{-1/3} kk_{u_n}`.

pub mod zeros;
mod verify;

#[cfg(test)]
mod tests;

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{FockFunction, KernelExpansion, KernelTerm};
use crate::num::{Grid, LogComplex, PlaneIntegral, QuadratureSpec};
use crate::weierstrass::{dist_to_lattice, SigmaConfig};

pub use verify::{
    polynomial_multiple_pairings, verify_properties, MultipleRow, EstimatePanel, PropertyReport,
};
pub use zeros::{scan_zeros, CellMismatch, ZeroScan};

/// Deflation window around the real zeros `u_n + beta_n`.
pub const ROOT_WINDOW: f64 = 1e-2;
/// Distance kept by `v_n` from the lattice and from zeros of `F`.
pub const V_MARGIN: f64 = 0.05;
const NUDGE: f64 = 0.01;
const MAX_NUDGES: i64 = 100;
/// Offset of the zero-scan cells from the lattice-centered cells.
const SCAN_OFFSET: f64 = 0.137;

#[derive(Clone, Debug, PartialEq)]
pub struct ConstructionParams {
    /// `u_1`.
    pub q: u32,
    /// `N`, the number of levels kept.
    pub levels: usize,
    pub tol_root: f64,
    pub tol_solve: f64,
    pub spec: QuadratureSpec,
    pub trunc: f64,
}

impl ConstructionParams {
    pub const DEFAULT_STEP: f64 = 0.1;

    /// Defaults with the smallest integer quadrature radius that covers
    /// every feature of the construction.
    pub fn new(q: u32, levels: usize) -> Result<Self> {
        let radius = Self::required_radius(q, levels).ceil();
        let p = ConstructionParams {
            q,
            levels,
            tol_root: 1e-10,
            tol_solve: 1e-8,
            spec: QuadratureSpec::new(radius, Self::DEFAULT_STEP)?,
            trunc: 12.0,
        };
        p.validate()?;
        Ok(p)
    }

    /// `u_N + 2 sqrt(u_N) + 8`.
    pub fn required_radius(q: u32, levels: usize) -> f64 {
        let top = q as f64 * 2f64.powi(levels.saturating_sub(1) as i32);
        top + 2.0 * top.sqrt() + 8.0
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.levels).map(|n| self.q as f64 * 2f64.powi(n as i32)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.q < 4 {
            return Err(Error::Precondition(format!("q must be at least 4, got {}", self.q)));
        }
        if self.levels == 0 || self.levels > 12 {
            return Err(Error::Precondition(format!("levels must be in 1..=12, got {}", self.levels)));
        }
        for (name, t) in [("tol_root", self.tol_root), ("tol_solve", self.tol_solve)] {
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::Precondition(format!("{name} must lie in (0, 1), got {t}")));
            }
        }
        if self.trunc.is_nan() || self.trunc < 1.0 {
            return Err(Error::Precondition(format!("trunc must be at least 1, got {}", self.trunc)));
        }
        self.spec.validate()?;
        let need = Self::required_radius(self.q, self.levels);
        if self.spec.truncation_radius < need {
            return Err(Error::Precondition(format!(
                "quadrature radius {} does not cover the construction (needs {need:.3})",
                self.spec.truncation_radius
            )));
        }
        Ok(())
    }

    /// `sum_{n > N} u_n^{-1/2}`, the dropped kernel mass of `F`.
    pub fn kernel_tail(&self) -> f64 {
        let next = self.q as f64 * 2f64.powi(self.levels as i32);
        next.powf(-0.5) / (1.0 - 0.5f64.sqrt())
    }
}

/// `prod_n (1 - z / a_n)` over finitely many real zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalProduct {
    zeros: Vec<f64>,
}

impl CanonicalProduct {
    pub fn new(zeros: Vec<f64>) -> Self {
        CanonicalProduct { zeros }
    }

    pub fn zeros(&self) -> &[f64] {
        &self.zeros
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.zeros.iter().map(|a| 1.0 - z / a).product()
    }

    /// The product divided by `z - a_k`, a polynomial.
    pub fn eval_without(&self, z: Complex64, k: usize) -> Complex64 {
        let mut out = Complex64::new(-1.0 / self.zeros[k], 0.0);
        for (j, a) in self.zeros.iter().enumerate() {
            if j != k {
                out *= 1.0 - z / a;
            }
        }
        out
    }

    /// Derivative at the `k`-th zero.
    pub fn derivative_at_zero(&self, k: usize) -> f64 {
        self.eval_without(Complex64::new(self.zeros[k], 0.0), k).re
    }

    /// The first `k` factors.
    pub fn head(&self, k: usize) -> CanonicalProduct {
        CanonicalProduct::new(self.zeros[..k].to_vec())
    }
}

/// `F` as a kernel expansion with a `sigma_3` part.
pub fn build_f(cfg: Arc<SigmaConfig>, params: &ConstructionParams) -> FockFunction {
    let mut terms = Vec::new();
    for u in params.nodes() {
        let s = u.powf(-0.5);
        terms.push(KernelTerm { coeff: Complex64::new(s, 0.0), center: Complex64::new(u, 0.0) });
        terms.push(KernelTerm { coeff: Complex64::new(-s, 0.0), center: Complex64::new(u + 1.0, 0.0) });
    }
    let expansion = KernelExpansion { terms, sigma3: Some(Complex64::new(1.0, 0.0)) };
    FockFunction::from_expansion("F", expansion, Some(cfg)).expect("sigma configuration given")
}

/// `H = sigma_3 + sum_n d_n u_n^{-1/3} kk_{u_n}`.
pub fn build_h(cfg: Arc<SigmaConfig>, params: &ConstructionParams, ds: &[f64]) -> FockFunction {
    let terms = params
        .nodes()
        .into_iter()
        .zip(ds)
        .map(|(u, d)| KernelTerm { coeff: Complex64::new(d * u.powf(-1.0 / 3.0), 0.0), center: Complex64::new(u, 0.0) })
        .collect();
    let expansion = KernelExpansion { terms, sigma3: Some(Complex64::new(1.0, 0.0)) };
    FockFunction::from_expansion("H", expansion, Some(cfg)).expect("sigma configuration given")
}

/// Real part of the weighted values on the real line, where both weight and
/// `F` are real.
fn real_value(f: &FockFunction, x: f64) -> f64 {
    f.weighted_complex(Complex64::new(x, 0.0)).re
}

/// Bisection root of `f` on `[u + lo, u + hi]`.
pub fn bisect_root(f: &FockFunction, u: f64, lo: f64, hi: f64, level: usize, q: u32) -> Result<f64> {
    let (mut a, mut b) = (u + lo, u + hi);
    let (mut fa, fb) = (real_value(f, a), real_value(f, b));
    if fa == 0.0 {
        return Ok(lo);
    }
    if fb == 0.0 {
        return Ok(hi);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoSignChange { level, q });
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = real_value(f, m);
        if fm == 0.0 {
            return Ok(m - u);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b) - u)
}

/// `beta_n in (1/3, 2/3)` with `F(u_n + beta_n) = 0`.
pub fn find_betas(f: &FockFunction, params: &ConstructionParams) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(params.levels);
    for (n, u) in params.nodes().into_iter().enumerate() {
        let beta = bisect_root(f, u, 1.0 / 3.0, 2.0 / 3.0, n + 1, params.q)?;
        let residual = f.weighted(Complex64::new(u + beta, 0.0)).abs();
        if residual > params.tol_root {
            return Err(Error::Numerical(format!(
                "root residual {residual:e} at level {} exceeds {:e}",
                n + 1,
                params.tol_root
            )));
        }
        out.push(beta);
    }
    Ok(out)
}

/// `v_n = u_n - sqrt(u_n) + k/100` with the `k` of smallest modulus
/// (positive first) keeping distance `0.05` from the lattice and from `zeros`.
pub fn choose_vs(params: &ConstructionParams, zeros: &[Complex64]) -> Result<Vec<f64>> {
    let slack = 1e-12;
    let mut out = Vec::with_capacity(params.levels);
    for (n, u) in params.nodes().into_iter().enumerate() {
        let center = u - u.sqrt();
        let admissible = |v: f64| {
            let z = Complex64::new(v, 0.0);
            dist_to_lattice(z) >= V_MARGIN - slack
                && zeros.iter().all(|w| (w - z).norm() >= V_MARGIN - slack)
        };
        let pick = (0..=MAX_NUDGES)
            .flat_map(|k| if k == 0 { vec![0] } else { vec![k, -k] })
            .map(|k| center + k as f64 * NUDGE)
            .find(|&v| admissible(v) && (v - center).abs() < 1.0);
        match pick {
            Some(v) => out.push(v),
            None => {
                return Err(Error::Precondition(format!(
                    "no admissible v near {center} at level {} after {MAX_NUDGES} nudges",
                    n + 1
                )))
            }
        }
    }
    Ok(out)
}

/// Values of `F` and `sigma_3` on the quadrature grid, shared by every
/// pairing of the construction.
pub struct ConstructionTables {
    pub grid: Grid,
    pub sigma3: Vec<Complex64>,
    pub f: Vec<Complex64>,
}

impl ConstructionTables {
    pub fn new(cfg: &SigmaConfig, f: &FockFunction, spec: &QuadratureSpec) -> Result<Self> {
        let grid = Grid::new(spec)?;
        let sigma3 = grid.tabulate(|z| cfg.sigma3_weighted(z))?;
        let d = f.decomposition().expect("F carries its expansion").clone();
        let kernels = grid.tabulate(move |z| LogComplex::from_complex(d.kernel_part(z)))?;
        let f = sigma3.iter().zip(&kernels).map(|(s, k)| s + k).collect();
        Ok(ConstructionTables { grid, sigma3, f })
    }

    pub fn tabulate_expansion(&self, exp: &KernelExpansion) -> Result<Vec<Complex64>> {
        let e = exp.clone();
        let kernels = self.grid.tabulate(move |z| LogComplex::from_complex(e.kernel_part(z)))?;
        let s = exp.sigma3.unwrap_or_default();
        Ok(self.sigma3.iter().zip(&kernels).map(|(t, k)| s * t + k).collect())
    }
}

/// Normalized linear system for the `d_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct DSystem {
    /// `u_m^{-1/3} <g_{v_n}, kk_{u_m}>`, row `n`.
    pub raw: Vec<Vec<Complex64>>,
    /// `<g_{v_n}, sigma_3>` by quadrature.
    pub sigma3_pairings: Vec<PlaneIntegral>,
    /// `raw` divided by its diagonal; unit diagonal.
    pub xi: Vec<Vec<f64>>,
    pub gamma: Vec<f64>,
    /// Off-diagonal row sums of `|xi|`.
    pub row_sums: Vec<f64>,
    /// Largest imaginary part met while taking real parts, relative.
    pub imaginary_part: f64,
    pub condition: f64,
    pub residual: f64,
}

/// Normalize `sum_m raw[n][m] d_m = -pair[n]`, check diagonal dominance and
/// solve.
pub fn solve_d(raw: Vec<Vec<Complex64>>, pairings: Vec<PlaneIntegral>) -> Result<(Vec<f64>, DSystem)> {
    let n = raw.len();
    let mut imaginary_part: f64 = 0.0;
    let mut xi = vec![vec![0.0; n]; n];
    let mut gamma = vec![0.0; n];
    let mut row_sums = vec![0.0; n];
    for r in 0..n {
        let diag = raw[r][r];
        if diag.norm() == 0.0 {
            return Err(Error::NotDominant { row: r, sum: f64::INFINITY });
        }
        for c in 0..n {
            let v = raw[r][c] / diag;
            imaginary_part = imaginary_part.max(v.im.abs() / v.norm().max(f64::MIN_POSITIVE));
            xi[r][c] = v.re;
        }
        let g = -pairings[r].value / diag;
        imaginary_part = imaginary_part.max(g.im.abs() / g.norm().max(f64::MIN_POSITIVE));
        gamma[r] = g.re;
        row_sums[r] = (0..n).filter(|&c| c != r).map(|c| xi[r][c].abs()).sum();
    }
    for (r, s) in row_sums.iter().enumerate() {
        if *s >= 1.0 {
            return Err(Error::NotDominant { row: r, sum: *s });
        }
    }
    let m = DMatrix::from_fn(n, n, |r, c| xi[r][c]);
    let rhs = DVector::from_vec(gamma.clone());
    let sol = m
        .clone()
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("singular d system".into()))?;
    let residual = (&m * &sol - &rhs).amax();
    let sv = m.singular_values();
    let condition = sv.max() / sv.min();
    let ds: Vec<f64> = sol.iter().copied().collect();
    Ok((
        ds,
        DSystem { raw, sigma3_pairings: pairings, xi, gamma, row_sums, imaginary_part, condition, residual },
    ))
}

/// The full construction for one parameter set.
pub struct ConstructionResult {
    pub params: ConstructionParams,
    pub sigma: Arc<SigmaConfig>,
    pub betas: Vec<f64>,
    pub vs: Vec<f64>,
    pub ds: Vec<f64>,
    pub f: FockFunction,
    pub h: FockFunction,
    pub g1: CanonicalProduct,
    pub s: CanonicalProduct,
    /// `F / S`.
    pub g2: FockFunction,
    /// `G_1 G_2`.
    pub g: FockFunction,
    pub lambda1: Vec<f64>,
    /// Zeros of `F` in the quadrature window other than `u_n + beta_n`.
    pub lambda2: Vec<Complex64>,
    pub scan: ZeroScan,
    pub system: DSystem,
    pub tables: ConstructionTables,
}

impl ConstructionResult {
    /// `u_n + beta_n`.
    pub fn roots(&self) -> &[f64] {
        self.s.zeros()
    }

    /// `g_{v_n} = G_2 G_1 / (z - v_n)`.
    pub fn g_v(&self, n: usize) -> FockFunction {
        let g1 = self.g1.clone();
        self.g2
            .times(format!("g[v{}]", n + 1), move |z| LogComplex::from_complex(g1.eval_without(z, n)))
    }

    /// Deflation window used for `g_l` at `l` in `L2`.
    pub fn window_for(&self, lambda: Complex64) -> f64 {
        let near = self
            .roots()
            .iter()
            .map(|r| (lambda - r).norm())
            .fold(f64::INFINITY, f64::min);
        ROOT_WINDOW.min(near / 10.0)
    }

    /// `g_l = G / (z - l)` for `l` in `L2`.
    pub fn g_lambda(&self, lambda: Complex64) -> Result<FockFunction> {
        let w = self.window_for(lambda);
        if w < 1e-7 {
            return Err(Error::Precondition(format!("{lambda} is too close to a root of S")));
        }
        let g1 = self.g1.clone();
        Ok(self
            .g2
            .deflate(lambda, w)
            .times(format!("g[{lambda}]"), move |z| LogComplex::from_complex(g1.eval(z))))
    }

    /// Weighted `G_2` at grid node `i`, exact near the roots of `S`.
    pub fn g2_at(&self, i: usize, z: Complex64) -> Complex64 {
        if self.roots().iter().any(|r| (z - r).norm() < ROOT_WINDOW) {
            self.g2.weighted_complex(z)
        } else {
            self.tables.f[i] / self.s.eval(z)
        }
    }

    /// `<g_{v_n}, X>` for a tabulated `X`.
    pub fn pair_gv(&self, n: usize, x: &[Complex64]) -> Result<PlaneIntegral> {
        self.tables
            .grid
            .integrate_indexed(|i, z| self.g2_at(i, z) * self.g1.eval_without(z, n) * x[i].conj())
    }

    /// `<g_l, X>` for `l` in `L2` and a tabulated `X`.
    pub fn pair_g_lambda(&self, lambda: Complex64, x: &[Complex64]) -> Result<PlaneIntegral> {
        let exact = self.g_lambda(lambda)?;
        let w = self.window_for(lambda);
        self.tables.grid.integrate_indexed(|i, z| {
            let v = if (z - lambda).norm() < w {
                exact.weighted_complex(z)
            } else {
                self.g2_at(i, z) * self.g1.eval(z) / (z - lambda)
            };
            v * x[i].conj()
        })
    }

    /// `||g_l||^2`, for `l` in `L1` (given by index) or `L2`.
    pub fn g_norm_sq(&self, which: Biorthogonal) -> Result<PlaneIntegral> {
        match which {
            Biorthogonal::Level(n) => self.tables.grid.integrate_indexed(|i, z| {
                Complex64::new((self.g2_at(i, z) * self.g1.eval_without(z, n)).norm_sqr(), 0.0)
            }),
            Biorthogonal::Zero(lambda) => {
                let exact = self.g_lambda(lambda)?;
                let w = self.window_for(lambda);
                self.tables.grid.integrate_indexed(|i, z| {
                    let v = if (z - lambda).norm() < w {
                        exact.weighted_complex(z)
                    } else {
                        self.g2_at(i, z) * self.g1.eval(z) / (z - lambda)
                    };
                    Complex64::new(v.norm_sqr(), 0.0)
                })
            }
        }
    }

    /// Up to `count` points of `L2` nearest to the bump centers `u_n + 1/2`.
    pub fn lambda2_sample(&self, count: usize) -> Vec<Complex64> {
        let centers: Vec<f64> = self.params.nodes().iter().map(|u| u + 0.5).collect();
        let key = |z: &Complex64| centers.iter().map(|c| (z - c).norm()).fold(f64::INFINITY, f64::min);
        let mut pts = self.lambda2.clone();
        pts.sort_by(|a, b| key(a).total_cmp(&key(b)).then(a.re.total_cmp(&b.re)).then(a.im.total_cmp(&b.im)));
        pts.truncate(count);
        pts
    }
}

/// Selects `g_{v_n}` or `g_l`, `l` in `L2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Biorthogonal {
    Level(usize),
    Zero(Complex64),
}

/// Number of lattice points other than `0, 1, 2, 3` in the half-open box.
fn sigma3_zero_count(lo: Complex64, hi: Complex64) -> usize {
    let mut count = 0;
    for m in lo.re.ceil() as i64..=hi.re.floor() as i64 {
        for n in lo.im.ceil() as i64..=hi.im.floor() as i64 {
            let (x, y) = (m as f64, n as f64);
            let inside = x >= lo.re && x < hi.re && y >= lo.im && y < hi.im;
            if inside && !(n == 0 && (0..=3).contains(&m)) {
                count += 1;
            }
        }
    }
    count
}

/// Zeros of `F` in `|z| <= radius`, using `sigma_3` as the comparison
/// function away from the kernel bumps.
pub fn scan_f_zeros(cfg: Arc<SigmaConfig>, f: &FockFunction, radius: f64) -> ZeroScan {
    let base = FockFunction::sigma3(Arc::clone(&cfg));
    let d = f.decomposition().expect("F carries its expansion");
    let bumps = KernelExpansion { terms: d.terms.clone(), sigma3: None };
    let perturbation = FockFunction::from_expansion("F - sigma3", bumps, None).expect("no sigma part");
    let count = |lo: Complex64, hi: Complex64| sigma3_zero_count(lo, hi);
    let reference = zeros::Reference { base: &base, perturbation: &perturbation, base_zeros: &count };
    scan_zeros(f, Some(&reference), radius, SCAN_OFFSET)
}

/// Run the construction end to end.
pub fn construct(cfg: Arc<SigmaConfig>, params: &ConstructionParams) -> Result<ConstructionResult> {
    params.validate()?;
    let nodes = params.nodes();
    let f = build_f(Arc::clone(&cfg), params);
    let betas = find_betas(&f, params)?;
    let roots: Vec<f64> = nodes.iter().zip(&betas).map(|(u, b)| u + b).collect();
    let scan = scan_f_zeros(Arc::clone(&cfg), &f, params.spec.truncation_radius);
    let is_root = |z: &Complex64| roots.iter().any(|r| (z - r).norm() < 1e-8 * r.max(1.0));
    let lambda2: Vec<Complex64> = scan.zeros.iter().copied().filter(|z| !is_root(z)).collect();
    let vs = choose_vs(params, &lambda2)?;
    for (v, r) in vs.iter().zip(&roots) {
        if (v - r).abs() < 8.0 * ROOT_WINDOW {
            return Err(Error::Precondition(format!("v = {v} overlaps the deflation window of the root {r}")));
        }
    }
    let s = CanonicalProduct::new(roots.clone());
    let g1 = CanonicalProduct::new(vs.clone());
    let scale: Complex64 = roots.iter().map(|r| Complex64::new(-r, 0.0)).product();
    let mut g2 = f.clone();
    for r in &roots {
        g2 = g2.deflate(Complex64::new(*r, 0.0), ROOT_WINDOW);
    }
    let g2 = g2.scaled(scale).with_label("G2");
    let g1c = g1.clone();
    let g = g2.times("G", move |z| LogComplex::from_complex(g1c.eval(z)));
    let tables = ConstructionTables::new(&cfg, &f, &params.spec)?;
    let mut result = ConstructionResult {
        params: params.clone(),
        sigma: Arc::clone(&cfg),
        betas,
        vs: vs.clone(),
        ds: vec![0.0; params.levels],
        f,
        h: build_h(Arc::clone(&cfg), params, &vec![0.0; params.levels]),
        g1,
        s,
        g2,
        g,
        lambda1: vs,
        lambda2,
        scan,
        system: DSystem {
            raw: Vec::new(),
            sigma3_pairings: Vec::new(),
            xi: Vec::new(),
            gamma: Vec::new(),
            row_sums: Vec::new(),
            imaginary_part: 0.0,
            condition: 1.0,
            residual: 0.0,
        },
        tables,
    };
    let (ds, system) = assemble_and_solve_d(&result)?;
    result.h = build_h(Arc::clone(&cfg), params, &ds);
    result.ds = ds;
    result.system = system;
    for (n, d) in result.ds.iter().enumerate() {
        if d.abs() >= 1.0 {
            return Err(Error::Precondition(format!(
                "d_{} = {d} is outside (-1, 1); q = {} is too small",
                n + 1,
                params.q
            )));
        }
    }
    Ok(result)
}

/// Build and solve the system `<g_{v_n}, H> = 0` for the `d_n`.
pub fn assemble_and_solve_d(result: &ConstructionResult) -> Result<(Vec<f64>, DSystem)> {
    let nodes = result.params.nodes();
    let levels = nodes.len();
    let mut raw = vec![vec![Complex64::new(0.0, 0.0); levels]; levels];
    for (n, row) in raw.iter_mut().enumerate() {
        let gv = result.g_v(n);
        for (m, u) in nodes.iter().enumerate() {
            // <g, kk_u> = g(u) e^{-pi u^2 / 2}.
            *row.get_mut(m).expect("square") = u.powf(-1.0 / 3.0) * gv.weighted_complex(Complex64::new(*u, 0.0));
        }
    }
    let pairings = (0..levels)
        .map(|n| result.pair_gv(n, &result.tables.sigma3))
        .collect::<Result<Vec<_>>>()?;
    solve_d(raw, pairings)
}

/// Margin of `L1`, the roots `u_n + beta_n` and the nodes `u_n` from the
/// lattice and from each other.
pub fn separation_margin(result: &ConstructionResult) -> f64 {
    let mut pts: Vec<Complex64> = result.lambda1.iter().map(|v| Complex64::new(*v, 0.0)).collect();
    pts.extend(result.roots().iter().map(|r| Complex64::new(*r, 0.0)));
    let mut m = f64::INFINITY;
    for (i, a) in pts.iter().enumerate() {
        m = m.min(dist_to_lattice(*a));
        for b in &pts[i + 1..] {
            m = m.min((a - b).norm());
        }
        for l in &result.lambda2 {
            m = m.min((a - l).norm());
        }
    }
    m
}

/// `main term` of the local form of weighted `F` on `D(u, 2 sqrt u)`.
pub fn local_main_term(u: f64, z: Complex64) -> Complex64 {
    let y = z.im;
    let a = (-PI * (z - u).norm_sqr() / 2.0).exp();
    let b = Complex64::from_polar((-PI * (z - u - 1.0).norm_sqr() / 2.0).exp(), PI * y);
    u.powf(-0.5) * (a - b) * Complex64::from_polar(1.0, PI * u * y)
}
