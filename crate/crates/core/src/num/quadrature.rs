//! Midpoint-rule integration over a truncated square of the plane.
//!
//! Integrands are weighted (Gaussian already applied) and decay, so the
//! midpoint rule converges spectrally. The grid is laid out so that every
//! third node in each direction forms a nested grid of step `3h`; the
//! difference between the two sums is the discretization part of the
//! error estimate.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::log_complex::LogComplex;
use crate::error::{Error, Result};

const MAX_NODES: usize = 400_000_000;
const ROUNDING_FACTOR: f64 = 1e-13;

/// Truncation square, step, and optional local refinement.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureSpec {
    /// Half-width `R` of the square `[-R, R]^2`.
    pub truncation_radius: f64,
    /// Node spacing `h`.
    pub step: f64,
    /// Points around which cells are subdivided when `refinement_factor > 1`.
    /// Refinement helps near-singular integrands; for smooth ones the seam
    /// between refined and plain cells limits accuracy to `O(h^2)`.
    pub centers: Vec<Complex64>,
    pub refinement_factor: usize,
    /// Cells whose midpoint lies within this distance of a center are refined.
    pub refinement_radius: f64,
}

impl QuadratureSpec {
    pub const DEFAULT_STEP: f64 = 0.05;

    pub fn new(truncation_radius: f64, step: f64) -> Result<Self> {
        let spec = QuadratureSpec {
            truncation_radius,
            step,
            centers: Vec::new(),
            refinement_factor: 1,
            refinement_radius: 0.0,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Default square for integrands concentrated near `centers`:
    /// `R = max(8, max |c| + 6)`, `h = 0.05`.
    pub fn around(centers: &[Complex64]) -> Self {
        let far = centers.iter().map(|c| c.norm()).fold(0.0, f64::max);
        QuadratureSpec {
            truncation_radius: (far + 6.0).max(8.0),
            step: Self::DEFAULT_STEP,
            centers: centers.to_vec(),
            refinement_factor: 1,
            refinement_radius: 0.0,
        }
    }

    pub fn with_refinement(mut self, centers: &[Complex64], factor: usize, radius: f64) -> Self {
        self.centers = centers.to_vec();
        self.refinement_factor = factor;
        self.refinement_radius = radius;
        self
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        self.truncation_radius = radius;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.truncation_radius;
        let h = self.step;
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::Domain(format!("truncation radius must be positive, got {r}")));
        }
        if !(h.is_finite() && h > 0.0 && h <= r) {
            return Err(Error::Domain(format!("step must lie in (0, R], got {h}")));
        }
        if self.refinement_factor == 0 {
            return Err(Error::Domain("refinement factor must be at least 1".into()));
        }
        if self.node_count() > MAX_NODES {
            return Err(Error::Domain(format!(
                "{} nodes exceed the limit of {MAX_NODES}",
                self.node_count()
            )));
        }
        Ok(())
    }

    /// Number of base nodes for a grid anchored at the origin, plus an
    /// upper bound for refinement nodes.
    pub fn node_count(&self) -> usize {
        let k = (self.truncation_radius / (3.0 * self.step)).ceil();
        let per_axis = 6.0 * k;
        let base = per_axis * per_axis;
        let f = self.refinement_factor as f64;
        let cells = PI * (self.refinement_radius + self.step).powi(2) / (self.step * self.step);
        let extra = if self.refinement_factor > 1 {
            self.centers.len() as f64 * cells * f * f
        } else {
            0.0
        };
        (base + extra).min(usize::MAX as f64 / 2.0) as usize
    }

    /// Gaussian tail mass `e^{-pi R^2 / 4}` outside the square.
    pub fn gaussian_tail(&self) -> f64 {
        (-PI * self.truncation_radius.powi(2) / 4.0).exp()
    }
}

/// Result of a plane integral with its error budget.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlaneIntegral {
    pub value: Complex64,
    /// `tail_estimate + coarse_difference + rounding_floor`.
    pub error_estimate: f64,
    pub tail_estimate: f64,
    /// `|I(h) - I(3h)|` on the nested grid.
    pub coarse_difference: f64,
    pub rounding_floor: f64,
    pub nodes: usize,
}

impl PlaneIntegral {
    /// A value that needed no quadrature.
    pub fn exact(value: Complex64) -> Self {
        let floor = 1e-15 * value.norm();
        PlaneIntegral {
            value,
            error_estimate: floor,
            tail_estimate: 0.0,
            coarse_difference: 0.0,
            rounding_floor: floor,
            nodes: 0,
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Extra {
    z: Complex64,
    weight: f64,
}

/// Node layout for a spec and an anchor. `anchor` is a cell vertex, so
/// integrands with a point singularity there are sampled symmetrically.
#[derive(Clone, Debug)]
pub struct Grid {
    anchor: Complex64,
    step: f64,
    radius: f64,
    col_lo: i64,
    cols: usize,
    row_lo: i64,
    rows: usize,
    gaussian_tail: f64,
    refined: BTreeMap<usize, Vec<usize>>,
    extras: Vec<Extra>,
}

#[derive(Clone, Copy, Default)]
struct Partial {
    fine: Complex64,
    coarse: Complex64,
    abs: f64,
    ring_abs: f64,
    ring_count: usize,
}

impl Partial {
    fn merge(mut self, o: Partial) -> Partial {
        self.fine += o.fine;
        self.coarse += o.coarse;
        self.abs += o.abs;
        self.ring_abs += o.ring_abs;
        self.ring_count += o.ring_count;
        self
    }
}

fn span(lo_edge: f64, hi_edge: f64, h: f64) -> (i64, i64) {
    let lo = (lo_edge / h).floor() as i64;
    let hi = (hi_edge / h).ceil() as i64;
    (lo.div_euclid(3) * 3, (hi + 2).div_euclid(3) * 3)
}

impl Grid {
    pub fn new(spec: &QuadratureSpec) -> Result<Self> {
        Self::anchored(spec, Complex64::new(0.0, 0.0))
    }

    pub fn anchored(spec: &QuadratureSpec, anchor: Complex64) -> Result<Self> {
        spec.validate()?;
        let h = spec.step;
        let r = spec.truncation_radius;
        let (c0, c1) = span(-r - anchor.re, r - anchor.re, h);
        let (r0, r1) = span(-r - anchor.im, r - anchor.im, h);
        let mut grid = Grid {
            anchor,
            step: h,
            radius: r,
            col_lo: c0,
            cols: (c1 - c0) as usize,
            row_lo: r0,
            rows: (r1 - r0) as usize,
            gaussian_tail: spec.gaussian_tail(),
            refined: BTreeMap::new(),
            extras: Vec::new(),
        };
        if spec.refinement_factor > 1 {
            grid.refine(spec);
        }
        Ok(grid)
    }

    fn refine(&mut self, spec: &QuadratureSpec) {
        let h = self.step;
        let f = spec.refinement_factor;
        let rad = spec.refinement_radius;
        for c in &spec.centers {
            let rel = c - self.anchor;
            let row_a = (((rel.im - rad) / h).floor() as i64 - self.row_lo).max(0);
            let row_b = (((rel.im + rad) / h).ceil() as i64 - self.row_lo).min(self.rows as i64 - 1);
            let col_a = (((rel.re - rad) / h).floor() as i64 - self.col_lo).max(0);
            let col_b = (((rel.re + rad) / h).ceil() as i64 - self.col_lo).min(self.cols as i64 - 1);
            for row in row_a..=row_b {
                for col in col_a..=col_b {
                    let z = self.base_node(row as usize, col as usize);
                    if (z - c).norm() <= rad {
                        self.refined.entry(row as usize).or_default().push(col as usize);
                    }
                }
            }
        }
        for cols in self.refined.values_mut() {
            cols.sort_unstable();
            cols.dedup();
        }
        let sub = h / f as f64;
        let mut extras = Vec::new();
        for (row, cols) in &self.refined {
            for &col in cols {
                let mid = self.base_node(*row, col);
                let corner = mid - Complex64::new(h / 2.0, h / 2.0);
                for a in 0..f {
                    for b in 0..f {
                        let z = corner + Complex64::new((a as f64 + 0.5) * sub, (b as f64 + 0.5) * sub);
                        extras.push(Extra { z, weight: sub * sub });
                    }
                }
            }
        }
        self.extras = extras;
    }

    fn base_node(&self, row: usize, col: usize) -> Complex64 {
        let h = self.step;
        self.anchor
            + Complex64::new(
                ((self.col_lo + col as i64) as f64 + 0.5) * h,
                ((self.row_lo + row as i64) as f64 + 0.5) * h,
            )
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Total number of evaluation nodes.
    pub fn len(&self) -> usize {
        self.rows * self.cols + self.extras.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Node positions in evaluation order.
    pub fn nodes(&self) -> Vec<Complex64> {
        let mut out: Vec<Complex64> = (0..self.rows)
            .into_par_iter()
            .flat_map_iter(|row| (0..self.cols).map(move |col| self.base_node(row, col)))
            .collect();
        out.extend(self.extras.iter().map(|e| e.z));
        out
    }

    /// Weighted values of `f` at every node, in evaluation order.
    pub fn tabulate<F>(&self, f: F) -> Result<Vec<Complex64>>
    where
        F: Fn(Complex64) -> LogComplex + Sync,
    {
        let cols = self.cols;
        let mut out = vec![Complex64::new(0.0, 0.0); self.len()];
        let (base, extra) = out.split_at_mut(self.rows * cols);
        base.par_chunks_mut(cols).enumerate().for_each(|(row, chunk)| {
            for (col, slot) in chunk.iter_mut().enumerate() {
                *slot = f(self.base_node(row, col)).to_complex();
            }
        });
        for (slot, e) in extra.iter_mut().zip(&self.extras) {
            *slot = f(e.z).to_complex();
        }
        if let Some(i) = out.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            let z = self.node_at(i);
            return Err(Error::NonFiniteIntegrand { node: i, re: z.re, im: z.im });
        }
        Ok(out)
    }

    fn node_at(&self, idx: usize) -> Complex64 {
        let base = self.rows * self.cols;
        if idx < base {
            self.base_node(idx / self.cols, idx % self.cols)
        } else {
            self.extras[idx - base].z
        }
    }

    /// Integrate `f(index, z)` where `index` addresses tabulated values.
    pub fn integrate_indexed<F>(&self, f: F) -> Result<PlaneIntegral>
    where
        F: Fn(usize, Complex64) -> Complex64 + Sync,
    {
        let h2 = self.step * self.step;
        let cols = self.cols;
        let rows = self.rows;
        let row_parts: Vec<std::result::Result<Partial, usize>> = (0..rows)
            .into_par_iter()
            .map(|row| {
                let refined = self.refined.get(&row);
                let coarse_row = row % 3 == 1;
                let ring_row = row == 0 || row + 1 == rows;
                let mut p = Partial::default();
                for col in 0..cols {
                    let idx = row * cols + col;
                    let w = f(idx, self.base_node(row, col));
                    if !(w.re.is_finite() && w.im.is_finite()) {
                        return Err(idx);
                    }
                    let is_refined = refined.is_some_and(|r| r.binary_search(&col).is_ok());
                    if !is_refined {
                        p.fine += w;
                        p.abs += w.norm();
                    }
                    if coarse_row && col % 3 == 1 {
                        p.coarse += w;
                    }
                    if ring_row || col == 0 || col + 1 == cols {
                        p.ring_abs += w.norm();
                        p.ring_count += 1;
                    }
                }
                Ok(p)
            })
            .collect();
        let mut total = Partial::default();
        for part in row_parts {
            match part {
                Ok(p) => total = total.merge(p),
                Err(idx) => {
                    let z = self.node_at(idx);
                    return Err(Error::NonFiniteIntegrand { node: idx, re: z.re, im: z.im });
                }
            }
        }
        let base = rows * cols;
        let mut extra_fine = Complex64::new(0.0, 0.0);
        let mut extra_abs = 0.0;
        for (k, e) in self.extras.iter().enumerate() {
            let w = f(base + k, e.z);
            if !(w.re.is_finite() && w.im.is_finite()) {
                return Err(Error::NonFiniteIntegrand { node: base + k, re: e.z.re, im: e.z.im });
            }
            extra_fine += w * e.weight;
            extra_abs += w.norm() * e.weight;
        }
        let value = total.fine * h2 + extra_fine;
        let coarse = total.coarse * (9.0 * h2);
        let abs_mass = total.abs * h2 + extra_abs;
        let ring_mean = if total.ring_count > 0 {
            total.ring_abs / total.ring_count as f64
        } else {
            0.0
        };
        let tail = self.gaussian_tail + 2.0 * PI * self.radius * self.radius * ring_mean;
        let coarse_difference = (value - coarse).norm();
        let rounding_floor = ROUNDING_FACTOR * abs_mass;
        Ok(PlaneIntegral {
            value,
            error_estimate: tail + coarse_difference + rounding_floor,
            tail_estimate: tail,
            coarse_difference,
            rounding_floor,
            nodes: self.len(),
        })
    }

    pub fn integrate<F>(&self, f: F) -> Result<PlaneIntegral>
    where
        F: Fn(Complex64) -> LogComplex + Sync,
    {
        self.integrate_indexed(|_, z| f(z).to_complex())
    }

    pub fn integrate_table(&self, values: &[Complex64]) -> Result<PlaneIntegral> {
        self.check_len(values)?;
        self.integrate_indexed(|i, _| values[i])
    }

    /// `sum_i w_i a_i conj(b_i)`: the weighted `L^2` pairing of two tables.
    pub fn inner(&self, a: &[Complex64], b: &[Complex64]) -> Result<PlaneIntegral> {
        self.check_len(a)?;
        self.check_len(b)?;
        self.integrate_indexed(|i, _| a[i] * b[i].conj())
    }

    fn check_len(&self, values: &[Complex64]) -> Result<()> {
        if values.len() != self.len() {
            return Err(Error::Domain(format!(
                "table has {} entries, grid has {} nodes",
                values.len(),
                self.len()
            )));
        }
        Ok(())
    }
}

/// `int_{[-R,R]^2} W dm_2` for a weighted integrand `W`.
pub fn integrate_plane<F>(integrand: F, spec: &QuadratureSpec) -> Result<PlaneIntegral>
where
    F: Fn(Complex64) -> LogComplex + Sync,
{
    Grid::new(spec)?.integrate(integrand)
}

/// Same as [`integrate_plane`] with `anchor` placed on a cell vertex.
///
/// For `W(xi) = phi(xi) / (anchor - xi)` with smooth `phi` the singular part
/// cancels between nodes mirrored through the anchor.
pub fn integrate_plane_anchored<F>(
    integrand: F,
    spec: &QuadratureSpec,
    anchor: Complex64,
) -> Result<PlaneIntegral>
where
    F: Fn(Complex64) -> LogComplex + Sync,
{
    Grid::anchored(spec, anchor)?.integrate(integrand)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gaussian(c: Complex64) -> impl Fn(Complex64) -> LogComplex + Sync {
        move |z: Complex64| LogComplex::new(-PI * (z - c).norm_sqr(), 0.0)
    }

    #[test]
    fn gaussian_normalization() {
        let spec = QuadratureSpec::new(8.0, 0.05).unwrap();
        let r = integrate_plane(gaussian(Complex64::new(0.0, 0.0)), &spec).unwrap();
        assert!((r.value.re - 1.0).abs() <= 1e-10);
        assert!(r.value.im.abs() <= 1e-14);
        assert!(r.error_estimate >= (r.value.re - 1.0).abs());
    }

    #[test]
    fn rotation_invariance() {
        let spec = QuadratureSpec::new(8.0, 0.05).unwrap();
        let c = Complex64::new(0.7, -0.3);
        let a = integrate_plane(gaussian(c), &spec).unwrap();
        let rot = move |z: Complex64| gaussian(c)(Complex64::i() * z);
        let b = integrate_plane(rot, &spec).unwrap();
        assert!((a.value - b.value).norm() <= 1e-10);
    }

    #[test]
    fn grid_is_symmetric_and_nested() {
        let spec = QuadratureSpec::new(3.0, 0.1).unwrap();
        let g = Grid::new(&spec).unwrap();
        assert_eq!(g.cols % 6, 0);
        assert_eq!(g.col_lo, -(g.cols as i64) / 2);
        let nodes = g.nodes();
        let sum: Complex64 = nodes.iter().sum();
        assert!(sum.norm() < 1e-9);
    }

    #[test]
    fn anchored_grid_has_vertex_at_anchor() {
        let spec = QuadratureSpec::new(4.0, 0.05).unwrap();
        let a = Complex64::new(0.3, -1.17);
        let g = Grid::anchored(&spec, a).unwrap();
        let nearest = g
            .nodes()
            .into_iter()
            .map(|z| z - a)
            .filter(|d| d.norm() < 0.05)
            .count();
        assert_eq!(nearest, 4);
    }

    #[test]
    fn cauchy_transform_of_gaussian() {
        // For a radial bump around c, int e^{-pi|xi-c|^2} / (z - xi) dm_2
        // equals (1 - e^{-pi|z-c|^2}) / (z - c).
        let c = Complex64::new(0.2, 0.1);
        let z = Complex64::new(0.5, 0.5);
        let spec = QuadratureSpec::new(8.0, 0.05).unwrap();
        let f = move |xi: Complex64| {
            LogComplex::new(-PI * (xi - c).norm_sqr(), 0.0)
                .checked_div(LogComplex::from_complex(z - xi))
                .unwrap()
        };
        let r = integrate_plane_anchored(f, &spec, z).unwrap();
        let exact = (1.0 - (-PI * (z - c).norm_sqr()).exp()) / (z - c);
        assert!((r.value - exact).norm() < 1e-5, "{} vs {}", r.value, exact);
    }

    #[test]
    fn refinement_keeps_value() {
        let c = Complex64::new(1.0, 0.0);
        let plain = QuadratureSpec::new(8.0, 0.1).unwrap();
        let refined = plain.clone().with_refinement(&[c], 3, 0.5);
        let a = integrate_plane(gaussian(c), &plain).unwrap();
        let b = integrate_plane(gaussian(c), &refined).unwrap();
        assert!(b.nodes > a.nodes);
        assert!((a.value.re - 1.0).abs() < 1e-10);
        // The seam between refined and plain cells costs spectral accuracy.
        assert!((b.value.re - 1.0).abs() < 5e-3);
    }

    #[test]
    fn non_finite_is_an_error() {
        let spec = QuadratureSpec::new(2.0, 0.5).unwrap();
        let f = |z: Complex64| {
            if z.re > 0.0 && z.im > 0.0 {
                LogComplex::new(f64::NAN, 0.0)
            } else {
                LogComplex::ONE
            }
        };
        assert!(matches!(
            integrate_plane(f, &spec),
            Err(Error::NonFiniteIntegrand { .. })
        ));
    }

    #[test]
    fn invalid_specs() {
        assert!(QuadratureSpec::new(-1.0, 0.1).is_err());
        assert!(QuadratureSpec::new(1.0, 0.0).is_err());
        assert!(QuadratureSpec::new(1e4, 1e-4).is_err());
    }

    #[test]
    fn tables_match_direct() {
        let spec = QuadratureSpec::new(6.0, 0.1).unwrap();
        let g = Grid::new(&spec).unwrap();
        let c = Complex64::new(0.5, 0.5);
        let a = g.tabulate(gaussian(c)).unwrap();
        let direct = g.integrate(gaussian(c)).unwrap();
        let tab = g.integrate_table(&a).unwrap();
        assert_eq!(direct.value, tab.value);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn linearity(ar in -2.0f64..2.0, ai in -2.0f64..2.0, br in -2.0f64..2.0,
                     cx in -2.0f64..2.0, cy in -2.0f64..2.0) {
            let spec = QuadratureSpec::new(7.0, 0.1).unwrap();
            let alpha = Complex64::new(ar, ai);
            let beta = Complex64::new(br, 0.3);
            let c = Complex64::new(cx, cy);
            let f1 = gaussian(c);
            let f2 = move |z: Complex64| LogComplex::new(-PI * z.norm_sqr() / 2.0, z.re);
            let i1 = integrate_plane(&f1, &spec).unwrap().value;
            let i2 = integrate_plane(f2, &spec).unwrap().value;
            let both = integrate_plane(|z| {
                LogComplex::from_complex(alpha * f1(z).to_complex() + beta * f2(z).to_complex())
            }, &spec).unwrap().value;
            prop_assert!((both - (alpha * i1 + beta * i2)).norm() <= 1e-12);
        }
    }
}
