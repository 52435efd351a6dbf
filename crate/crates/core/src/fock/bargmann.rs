//! The Bargmann transform
//! `Bf(z) = 2^{1/4} int f(t) e^{2 pi t z - pi t^2 - pi z^2/2} dt`
//! and Gabor atoms `tau_{x,y} gamma(t) = e^{2 pi i y t} e^{-pi (t - x)^2}`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::function::{FockFunction, KernelExpansion};
use crate::error::{Error, Result};
use crate::num::LogComplex;

/// The time-frequency shift of the Gaussian `e^{-pi t^2}` to `(x, y)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaborAtom {
    pub x: f64,
    pub y: f64,
}

impl GaborAtom {
    pub fn new(x: f64, y: f64) -> Self {
        GaborAtom { x, y }
    }

    /// `log tau_{x,y} gamma(t)`.
    pub fn log_value(&self, t: f64) -> LogComplex {
        LogComplex::new(-PI * (t - self.x).powi(2), 2.0 * PI * self.y * t)
    }

    /// `<tau_a gamma, tau_b gamma>` in `L^2(R)`, in closed form.
    pub fn l2_inner(&self, other: &GaborAtom) -> Complex64 {
        // Gaussian integral of e^{-2 pi t^2 + 2 pi t (xa + xb) + 2 pi i t (ya - yb)}.
        let s = Complex64::new(self.x + other.x, self.y - other.y);
        let e = PI * s * s / 2.0 - PI * (self.x * self.x + other.x * other.x);
        e.exp() / 2f64.sqrt()
    }
}

/// `2^{1/4} B(tau_{x,y} gamma) = e^{i pi x y} kk_{x - iy}`, a unit vector.
pub fn bargmann_gabor(atom: GaborAtom) -> FockFunction {
    let center = Complex64::new(atom.x, -atom.y);
    let phase = Complex64::from_polar(1.0, PI * atom.x * atom.y);
    FockFunction::from_expansion(
        format!("gabor[{},{}]", atom.x, atom.y),
        KernelExpansion::kernel(center).scaled(phase),
        None,
    )
    .expect("kernel expansion has no sigma part")
}

/// A signal on the uniform grid `start + k step`, stored in the log domain.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledSignal {
    pub start: f64,
    pub step: f64,
    pub values: Vec<LogComplex>,
}

impl SampledSignal {
    pub const DEFAULT_STEP: f64 = 0.01;

    pub fn from_fn<F: Fn(f64) -> LogComplex>(start: f64, end: f64, step: f64, f: F) -> Result<Self> {
        if !(step > 0.0 && end > start) {
            return Err(Error::Domain(format!("bad sampling interval [{start}, {end}] / {step}")));
        }
        let n = ((end - start) / step).round() as usize + 1;
        let values = (0..n).map(|k| f(start + k as f64 * step)).collect();
        Ok(SampledSignal { start, step, values })
    }

    /// The atom on `[-t_max, t_max]`.
    pub fn gabor(atom: GaborAtom, t_max: f64, step: f64) -> Result<Self> {
        Self::from_fn(-t_max, t_max, step, |t| atom.log_value(t))
    }

    pub fn t(&self, k: usize) -> f64 {
        self.start + k as f64 * self.step
    }

    /// Trapezoid `L^2` pairing of two signals on the same grid.
    pub fn l2_inner(&self, other: &SampledSignal) -> Result<Complex64> {
        if self.values.len() != other.values.len() || self.start != other.start || self.step != other.step {
            return Err(Error::Domain("signals are sampled on different grids".into()));
        }
        let terms: Vec<LogComplex> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| *a * b.conj())
            .collect();
        Ok(trapezoid(&terms, self.step)?.to_complex())
    }

    pub fn l2_norm(&self) -> Result<f64> {
        Ok(self.l2_inner(self)?.re.max(0.0).sqrt())
    }
}

/// Trapezoid rule in the log domain; errors if the end samples are not
/// negligible against the total mass.
fn trapezoid(terms: &[LogComplex], step: f64) -> Result<LogComplex> {
    let n = terms.len();
    if n < 3 {
        return Err(Error::Domain("too few samples".into()));
    }
    let top = terms
        .iter()
        .map(|v| v.log_mag())
        .fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return Ok(LogComplex::ZERO);
    }
    let unit = LogComplex::new(-top, 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut mass = 0.0;
    for (k, v) in terms.iter().enumerate() {
        let c = (*v * unit).to_complex();
        let w = if k == 0 || k + 1 == n { 0.5 } else { 1.0 };
        acc += c * w;
        mass += c.norm() * w;
    }
    let edge = (*terms.first().unwrap() * unit).abs().max((*terms.last().unwrap() * unit).abs());
    if edge > 1e-14 * mass {
        return Err(Error::Domain(format!(
            "integrand is not negligible at the sampling boundary ({edge:e} of mass {mass:e})"
        )));
    }
    Ok(LogComplex::from_complex(acc * step) * LogComplex::new(top, 0.0))
}

/// `(Bf)(z) e^{-pi|z|^2/2}` by the trapezoid rule on the samples.
///
/// With `z = x + iy` the weighted integrand is
/// `f(t) e^{-pi (t - x)^2} e^{i pi (2 t y - x y)}`.
pub fn bargmann_numeric(samples: &SampledSignal, z: Complex64) -> Result<LogComplex> {
    let (x, y) = (z.re, z.im);
    let terms: Vec<LogComplex> = samples
        .values
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let t = samples.t(k);
            *v * LogComplex::new(-PI * (t - x).powi(2), PI * (2.0 * t * y - x * y))
        })
        .collect();
    let quarter = LogComplex::new(2f64.ln() / 4.0, 0.0);
    Ok(trapezoid(&terms, samples.step)? * quarter)
}

/// Sampling half-width covering an atom and evaluation points up to `|Re z| <= x_max`.
pub fn sampling_half_width(atom: GaborAtom, x_max: f64) -> f64 {
    8f64.max(atom.x.abs() + 6.0).max(x_max + 6.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_at_origin() {
        // B gamma(0) = 2^{1/4} int e^{-2 pi t^2} dt = 2^{-1/4}.
        let s = SampledSignal::gabor(GaborAtom::new(0.0, 0.0), 8.0, 0.01).unwrap();
        let v = bargmann_numeric(&s, Complex64::new(0.0, 0.0)).unwrap().to_complex();
        assert!((v - Complex64::new(2f64.powf(-0.25), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn atom_norm() {
        let atom = GaborAtom::new(1.3, -0.4);
        let s = SampledSignal::gabor(atom, 8.0, 0.01).unwrap();
        assert!((s.l2_norm().unwrap() - 2f64.powf(-0.25)).abs() < 1e-12);
        assert!((atom.l2_inner(&atom).re - 2f64.powf(-0.5)).abs() < 1e-15);
    }

    #[test]
    fn unitarity_example_sign() {
        // <tau_{1,1} gamma, gamma> = -2^{-1/2} e^{-pi}.
        let a = GaborAtom::new(1.0, 1.0);
        let b = GaborAtom::new(0.0, 0.0);
        let expected = -(2f64.powf(-0.5)) * (-PI).exp();
        assert!((a.l2_inner(&b) - Complex64::new(expected, 0.0)).norm() < 1e-15);
        let fa = bargmann_gabor(a).weighted_complex(Complex64::new(0.0, 0.0));
        // <B f, B g> with g = gamma: sqrt(2)^{-1} * <2^{1/4}Bf, kk_0> = 2^{-1/2} (2^{1/4} B f)(0)-weighted.
        assert!((fa / 2f64.sqrt() - Complex64::new(expected, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn truncated_support_is_rejected() {
        let s = SampledSignal::gabor(GaborAtom::new(7.5, 0.0), 8.0, 0.01).unwrap();
        assert!(bargmann_numeric(&s, Complex64::new(7.5, 0.0)).is_err());
    }
}
