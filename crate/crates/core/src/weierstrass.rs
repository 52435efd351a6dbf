//! The Weierstrass sigma function of the square lattice `Z + iZ`.
//!
//! Inside the unit square around the origin, `log(sigma(z)/z)` is the power
//! series `-sum_j G_{4j} z^{4j} / (4j)` with lattice sums
//! `G_k = sum' lambda^{-k}`; only multiples of four survive the lattice
//! symmetry. Everywhere else the evaluator reduces `z = z0 + w` with
//! `w` a lattice point and applies
//! `sigma(z0 + w) = psi(w) sigma(z0) e^{eta(w)(z0 + w/2)}`,
//! where `eta` is derived at start-up from the truncated product.
//! Everything is returned with the Gaussian weight `e^{-pi|z|^2/2}` applied.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::num::LogComplex;

const SERIES_TERMS: usize = 30;
const LEGENDRE_TOL: f64 = 1e-12;

/// A point `m + in` of the lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePoint {
    pub m: i64,
    pub n: i64,
}

impl LatticePoint {
    pub const ORIGIN: LatticePoint = LatticePoint { m: 0, n: 0 };

    pub fn new(m: i64, n: i64) -> Self {
        LatticePoint { m, n }
    }

    pub fn nearest(z: Complex64) -> Self {
        LatticePoint {
            m: z.re.round() as i64,
            n: z.im.round() as i64,
        }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.m as f64, self.n as f64)
    }

    pub fn is_origin(self) -> bool {
        self.m == 0 && self.n == 0
    }

    /// Sign `(-1)^{m + n + mn}` in the quasi-periodicity law.
    pub fn psi(self) -> f64 {
        if (self.m + self.n + self.m * self.n).rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Lattice points with `|w| <= radius`, sorted by modulus then argument.
    pub fn within(radius: f64, include_origin: bool) -> Vec<LatticePoint> {
        let r = radius.floor() as i64;
        let mut pts: Vec<LatticePoint> = (-r..=r)
            .flat_map(|m| (-r..=r).map(move |n| LatticePoint::new(m, n)))
            .filter(|p| p.to_complex().norm() <= radius)
            .filter(|p| include_origin || !p.is_origin())
            .collect();
        pts.sort_by(|a, b| {
            let (za, zb) = (a.to_complex(), b.to_complex());
            za.norm_sqr()
                .total_cmp(&zb.norm_sqr())
                .then(za.arg().total_cmp(&zb.arg()))
        });
        pts
    }
}

/// Distance from `z` to the nearest lattice point.
pub fn dist_to_lattice(z: Complex64) -> f64 {
    (z - LatticePoint::nearest(z).to_complex()).norm()
}

/// `G_4 = (pi^4/45) E_4(i)` from the q-expansion of the Eisenstein series.
fn g4_exact() -> f64 {
    let q = (-2.0 * PI).exp();
    let mut e4 = 1.0;
    for n in 1..=20u64 {
        let s3: u64 = (1..=n).filter(|d| n % d == 0).map(|d| d * d * d).sum();
        e4 += 240.0 * s3 as f64 * q.powi(n as i32);
    }
    PI.powi(4) / 45.0 * e4
}

/// One representative `m + in` (`m >= 1`, `n >= 0`) of every orbit
/// `{lambda, i lambda, -lambda, -i lambda}` with `|lambda| <= radius`.
fn orbit_representatives(radius: f64) -> Vec<Complex64> {
    let r = radius.floor() as i64;
    let mut reps = Vec::new();
    for m in 1..=r {
        for n in 0..=r {
            let z = Complex64::new(m as f64, n as f64);
            if z.norm() <= radius {
                reps.push(z);
            }
        }
    }
    reps.sort_by(|a, b| b.norm_sqr().total_cmp(&a.norm_sqr()));
    reps
}

/// `sum_{0 < |lambda| <= radius} lambda^{-4j}` for `j = 1..=terms`.
fn lattice_sums(radius: f64, terms: usize) -> Vec<f64> {
    let mut sums = vec![0.0; terms];
    for lam in orbit_representatives(radius) {
        let t = (lam * lam * lam * lam).inv();
        let mut p = t;
        for s in sums.iter_mut() {
            *s += 4.0 * p.re;
            p *= t;
            if p.norm() < 1e-40 {
                break;
            }
        }
    }
    sums
}

fn log_one_minus(w: Complex64) -> Complex64 {
    if w.norm() < 0.1 {
        let mut term = w;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 1..40 {
            acc -= term / k as f64;
            term *= w;
            if term.norm() < 1e-18 {
                break;
            }
        }
        acc
    } else {
        (Complex64::new(1.0, 0.0) - w).ln()
    }
}

/// `log(sigma_R(z) / z)` for the product truncated to `|lambda| <= radius`.
fn product_log_ratio(z: Complex64, reps: &[Complex64]) -> Complex64 {
    let z4 = z * z * z * z;
    reps.iter()
        .map(|lam| log_one_minus(z4 / (lam * lam * lam * lam)))
        .sum()
}

/// The canonical product over `|lambda| <= radius`, with no tail
/// correction, weighted by `e^{-pi|z|^2/2}`. Slow; used as a reference.
pub fn sigma_truncated_product(z: Complex64, radius: f64) -> LogComplex {
    if z.norm() == 0.0 {
        return LogComplex::ZERO;
    }
    let reps = orbit_representatives(radius);
    let l = product_log_ratio(z, &reps);
    LogComplex::from_complex(z) * LogComplex::exp(l - PI * z.norm_sqr() / 2.0)
}

/// Precomputed series and quasi-periodicity data for sigma.
#[derive(Clone, Debug)]
pub struct SigmaConfig {
    product_truncation_radius: f64,
    /// `G_{4j} / (4j)` for `j = 1..`.
    series: Vec<f64>,
    g4_tail: f64,
    eta_one: Complex64,
    eta_i: Complex64,
    use_reduction: bool,
}

impl SigmaConfig {
    pub const DEFAULT_RADIUS: f64 = 200.0;

    /// Build the series from lattice sums over `|lambda| <= radius`, with the
    /// slowly convergent `G_4` replaced by its closed form, then derive
    /// `eta_1` and `eta_i` from the truncated product.
    pub fn new(product_truncation_radius: f64) -> Result<Self> {
        if !(product_truncation_radius.is_finite() && product_truncation_radius >= 8.0) {
            return Err(Error::Domain(format!(
                "product truncation radius must be at least 8, got {product_truncation_radius}"
            )));
        }
        let mut sums = lattice_sums(product_truncation_radius, SERIES_TERMS);
        let g4 = g4_exact();
        let g4_tail = g4 - sums[0];
        sums[0] = g4;
        let series: Vec<f64> = sums
            .iter()
            .enumerate()
            .map(|(j, g)| g / (4.0 * (j + 1) as f64))
            .collect();
        let mut cfg = SigmaConfig {
            product_truncation_radius,
            series,
            g4_tail,
            eta_one: Complex64::new(0.0, 0.0),
            eta_i: Complex64::new(0.0, 0.0),
            use_reduction: true,
        };
        cfg.derive_eta();
        let residual = cfg.legendre_residual();
        if residual.is_nan() || residual > LEGENDRE_TOL {
            return Err(Error::Numerical(format!(
                "Legendre relation residual {residual:e} exceeds {LEGENDRE_TOL:e}"
            )));
        }
        Ok(cfg)
    }

    /// Evaluate through the truncated product instead of reduction.
    pub fn without_reduction(mut self) -> Self {
        self.use_reduction = false;
        self
    }

    pub fn product_truncation_radius(&self) -> f64 {
        self.product_truncation_radius
    }

    pub fn eta_one(&self) -> Complex64 {
        self.eta_one
    }

    pub fn eta_i(&self) -> Complex64 {
        self.eta_i
    }

    /// `eta(w) = m eta_1 + n eta_i`.
    pub fn eta(&self, w: LatticePoint) -> Complex64 {
        self.eta_one * w.m as f64 + self.eta_i * w.n as f64
    }

    /// `|eta_1 i - eta_i - 2 pi i|`.
    pub fn legendre_residual(&self) -> f64 {
        let i = Complex64::i();
        (self.eta_one * i - self.eta_i - 2.0 * PI * i).norm()
    }

    /// `G_4` tail beyond the truncation radius that the closed form supplies.
    pub fn g4_tail(&self) -> f64 {
        self.g4_tail
    }

    /// `log(sigma(z)/z)` from the truncated product plus the `G_4` tail.
    fn corrected_product_log_ratio(&self, z: Complex64, reps: &[Complex64]) -> Complex64 {
        let z4 = z * z * z * z;
        product_log_ratio(z, reps) - z4 * (self.g4_tail / 4.0)
    }

    fn derive_eta(&mut self) {
        let reps = orbit_representatives(self.product_truncation_radius);
        let ln5 = Complex64::new(5f64.ln(), 0.0);
        let ipi = Complex64::new(0.0, PI);
        let solve = |z0: Complex64, shift: Complex64| {
            let d = self.corrected_product_log_ratio(z0 + shift, &reps)
                - self.corrected_product_log_ratio(z0, &reps);
            // -sigma(z0 + w)/sigma(z0) = e^{eta (z0 + w/2)} with z0 = w/4.
            let v = ln5 + d - ipi;
            let v = Complex64::new(v.re, crate::num::normalize_phase(v.im));
            v / (z0 + shift / 2.0)
        };
        let eta_one = solve(Complex64::new(0.25, 0.0), Complex64::new(1.0, 0.0));
        let eta_i = solve(Complex64::new(0.0, 0.25), Complex64::new(0.0, 1.0));
        self.eta_one = eta_one;
        self.eta_i = eta_i;
    }

    /// `log(sigma(z0)/z0)` for `z0` in the unit square around the origin.
    fn series_log_ratio(&self, z0: Complex64) -> Complex64 {
        let t = z0 * z0 * z0 * z0;
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.series.iter().rev() {
            acc = acc * t + *c;
        }
        -(acc * t)
    }

    /// Weighted `sigma(z) / prod_{a in removed} (z - a)`.
    ///
    /// When the lattice point nearest to `z` is in `removed`, that factor is
    /// cancelled analytically, so the quotient is exact at and near its
    /// removable singularity.
    pub fn sigma_over_lattice_factors(&self, z: Complex64, removed: &[LatticePoint]) -> LogComplex {
        if !self.use_reduction {
            return self.product_over_factors(z, removed);
        }
        let w = LatticePoint::nearest(z);
        let wc = w.to_complex();
        let z0 = z - wc;
        let cancels = removed.contains(&w);
        // sigma(z0) = z0 e^{series}; the z0 factor cancels against (z - w).
        let mut out = if cancels {
            LogComplex::exp(self.series_log_ratio(z0))
        } else if z0.norm() == 0.0 {
            return LogComplex::ZERO;
        } else {
            LogComplex::from_complex(z0) * LogComplex::exp(self.series_log_ratio(z0))
        };
        // eta(w)(z0 + w/2) - pi|z|^2/2 with eta(w) = pi conj(w) + drift.
        let drift = self.eta(w) - PI * wc.conj();
        let shift = drift * (z0 + wc / 2.0);
        let re = -PI * z0.norm_sqr() / 2.0 + shift.re;
        let im = PI * (w.m as f64 * z0.im - w.n as f64 * z0.re) + shift.im;
        let sign = if w.psi() < 0.0 { PI } else { 0.0 };
        out *= LogComplex::new(re, im + sign);
        let mut denom = Complex64::new(1.0, 0.0);
        let mut skipped = false;
        for a in removed {
            if cancels && !skipped && *a == w {
                skipped = true;
                continue;
            }
            let f = z - a.to_complex();
            if f.norm() == 0.0 {
                return LogComplex::new(f64::INFINITY, 0.0);
            }
            denom *= f;
            if !(1e-150..=1e150).contains(&denom.norm()) {
                out *= LogComplex::from_complex(denom.inv());
                denom = Complex64::new(1.0, 0.0);
            }
        }
        out * LogComplex::from_complex(denom.inv())
    }

    fn product_over_factors(&self, z: Complex64, removed: &[LatticePoint]) -> LogComplex {
        if z.norm() == 0.0 && !removed.contains(&LatticePoint::ORIGIN) {
            return LogComplex::ZERO;
        }
        let reps = orbit_representatives(self.product_truncation_radius);
        let l = self.corrected_product_log_ratio(z, &reps);
        let mut out = LogComplex::exp(l - PI * z.norm_sqr() / 2.0);
        let mut removed_origin = false;
        for a in removed {
            if a.is_origin() && !removed_origin {
                removed_origin = true;
                continue;
            }
            out = out
                .checked_div(LogComplex::from_complex(z - a.to_complex()))
                .unwrap_or(LogComplex::new(f64::INFINITY, 0.0));
        }
        if !removed_origin {
            out *= LogComplex::from_complex(z);
        }
        out
    }

    /// Weighted `sigma(z)`.
    pub fn sigma_weighted(&self, z: Complex64) -> LogComplex {
        self.sigma_over_lattice_factors(z, &[])
    }

    /// Weighted `sigma(z)/z`.
    pub fn sigma0_weighted(&self, z: Complex64) -> LogComplex {
        self.sigma_over_lattice_factors(z, &[LatticePoint::ORIGIN])
    }

    /// Weighted `sigma(z) / (z (z-1) (z-2) (z-3))`.
    pub fn sigma3_weighted(&self, z: Complex64) -> LogComplex {
        self.sigma_over_lattice_factors(z, &SIGMA3_ZEROS)
    }

    /// `sigma_0'(w) e^{-pi|w|^2/2}` by a Richardson-extrapolated central
    /// difference of step `1e-5`.
    pub fn sigma0_prime_at_lattice(&self, w: LatticePoint) -> Result<LogComplex> {
        if w.is_origin() {
            return Err(Error::Domain("sigma_0' is requested at a zero of sigma_0 only".into()));
        }
        let wc = w.to_complex();
        let local = |zeta: Complex64| {
            (self.sigma0_weighted(zeta)
                * LogComplex::new(PI * (zeta.norm_sqr() - wc.norm_sqr()) / 2.0, 0.0))
            .to_complex()
        };
        let diff = |h: f64| {
            let d = Complex64::new(h, 0.0);
            (local(wc + d) - local(wc - d)) / (2.0 * h)
        };
        let h = 1e-5;
        let d = (4.0 * diff(h / 2.0) - diff(h)) / 3.0;
        Ok(LogComplex::from_complex(d))
    }

    /// `sigma_0'(w) e^{-pi|w|^2/2} = psi(w) e^{eta(w) w/2 - pi|w|^2/2} / w`,
    /// the derivative of the quasi-periodicity law at the origin.
    pub fn sigma0_prime_closed_form(&self, w: LatticePoint) -> Result<LogComplex> {
        if w.is_origin() {
            return Err(Error::Domain("sigma_0' is requested at a zero of sigma_0 only".into()));
        }
        let wc = w.to_complex();
        let drift = self.eta(w) - PI * wc.conj();
        let e = drift * wc / 2.0;
        let sign = if w.psi() < 0.0 { PI } else { 0.0 };
        LogComplex::new(e.re, e.im + sign).checked_div(LogComplex::from_complex(wc))
    }

    /// Sample `|sigma(z)| e^{-pi|z|^2/2} / dist(z, lattice)` on
    /// `sample_count` seeded points of the disk `|z| <= 10`.
    pub fn check_sigma_bound(&self, sample_count: usize) -> Result<SigmaBound> {
        if sample_count == 0 {
            return Err(Error::Domain("sample count must be positive".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5160_0b0d);
        let mut c_low = f64::INFINITY;
        let mut c_high: f64 = 0.0;
        let mut taken = 0;
        while taken < sample_count {
            let z = Complex64::new(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
            let d = dist_to_lattice(z);
            if z.norm() > 10.0 || d < 1e-12 {
                continue;
            }
            let ratio = self.sigma_weighted(z).abs() / d;
            c_low = c_low.min(ratio);
            c_high = c_high.max(ratio);
            taken += 1;
        }
        Ok(SigmaBound { c_low, c_high })
    }
}

/// Zeros removed from sigma to form the three-zero-deficient quotient.
pub const SIGMA3_ZEROS: [LatticePoint; 4] = [
    LatticePoint { m: 0, n: 0 },
    LatticePoint { m: 1, n: 0 },
    LatticePoint { m: 2, n: 0 },
    LatticePoint { m: 3, n: 0 },
];

/// Measured two-sided constants in
/// `c_low dist(z) <= |sigma(z)| e^{-pi|z|^2/2} <= c_high dist(z)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SigmaBound {
    pub c_low: f64,
    pub c_high: f64,
}
