//! Complex numbers kept as logarithmic magnitude plus phase.
//!
//! Fock-space quantities routinely span `e^{±1000}` before the Gaussian
//! weight cancels them, so every evaluator in the crate returns a
//! [`LogComplex`] and conversion to an ordinary complex number happens only
//! once the weight has been applied.

use std::f64::consts::{LN_2, PI, TAU};
use std::ops::{Mul, MulAssign, Neg};

use num_complex::Complex64;

use crate::error::{Error, Result};

// Cody-Waite split of ln 2: `k * LN2_HI` is exact for |k| < 2^20.
const LN2_HI: f64 = 6.931_471_803_691_238e-1;
const LN2_LO: f64 = 1.908_214_929_270_587_7e-10;

/// A complex number `|v| e^{i phase}` with `|v| = 2^scale * e^frac`.
///
/// The magnitude is held as a binary exponent plus a small natural-log
/// remainder so that the round trip through an ordinary complex number is
/// exact to rounding even when the logarithm is in the hundreds. A
/// `frac` of negative infinity encodes an exact zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogComplex {
    scale: i64,
    frac: f64,
    phase: f64,
}

/// How [`log_combine`] folds its operands.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CombineOp {
    Product,
    /// `values[0] / values[1] / values[2] / ...`
    Quotient,
}

/// Reduce an angle to `(-pi, pi]`.
pub fn normalize_phase(p: f64) -> f64 {
    if p > -PI && p <= PI {
        return p;
    }
    if !p.is_finite() {
        return p;
    }
    let r = p.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

fn pow2(k: i64) -> f64 {
    debug_assert!((-1022..=1023).contains(&k));
    f64::from_bits(((k + 1023) as u64) << 52)
}

/// `x * 2^e`, saturating to zero or infinity.
pub(crate) fn ldexp(x: f64, e: i64) -> f64 {
    let e = e.clamp(-2044, 2046);
    let e1 = e / 2;
    x * pow2(e1) * pow2(e - e1)
}

/// Split a positive finite `r` into `(m, e)` with `r = m 2^e`, `m` in `[0.5, 1)`.
fn frexp(r: f64) -> (f64, i64) {
    let (r, bias) = if r < f64::MIN_POSITIVE {
        (r * 2f64.powi(54), -54)
    } else {
        (r, 0)
    };
    let bits = r.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64 - 1022;
    let m = f64::from_bits((bits & 0x000f_ffff_ffff_ffff) | (1022u64 << 52));
    (m, exp + bias)
}

impl LogComplex {
    pub const ZERO: LogComplex = LogComplex {
        scale: 0,
        frac: f64::NEG_INFINITY,
        phase: 0.0,
    };
    pub const ONE: LogComplex = LogComplex {
        scale: 0,
        frac: 0.0,
        phase: 0.0,
    };

    /// Build from a natural-log magnitude and a phase.
    pub fn new(log_mag: f64, phase: f64) -> Self {
        if log_mag == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        if !log_mag.is_finite() {
            return LogComplex {
                scale: 0,
                frac: log_mag,
                phase: normalize_phase(phase),
            };
        }
        let k = (log_mag / LN_2).round();
        let frac = (log_mag - k * LN2_HI) - k * LN2_LO;
        LogComplex {
            scale: k as i64,
            frac,
            phase: normalize_phase(phase),
        }
    }

    /// `e^c` for a complex exponent.
    pub fn exp(c: Complex64) -> Self {
        Self::new(c.re, c.im)
    }

    pub fn from_complex(c: Complex64) -> Self {
        let r = c.norm();
        if r == 0.0 {
            return Self::ZERO;
        }
        if !r.is_finite() {
            return LogComplex {
                scale: 0,
                frac: r,
                phase: if c.im.is_nan() || c.re.is_nan() {
                    f64::NAN
                } else {
                    c.arg()
                },
            };
        }
        let (m, e) = frexp(r);
        LogComplex {
            scale: e,
            frac: m.ln(),
            phase: normalize_phase(c.arg()),
        }
    }

    pub fn from_real(x: f64) -> Self {
        Self::from_complex(Complex64::new(x, 0.0))
    }

    pub fn to_complex(self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        let mag = self.abs();
        let (s, c) = self.phase.sin_cos();
        Complex64::new(mag * c, mag * s)
    }

    /// `|v|` as an ordinary float (may under- or overflow).
    pub fn abs(self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        if !self.frac.is_finite() {
            return self.frac;
        }
        ldexp(self.frac.exp(), self.scale)
    }

    pub fn log_mag(self) -> f64 {
        if self.is_zero() || !self.frac.is_finite() {
            return self.frac;
        }
        self.scale as f64 * LN2_HI + (self.frac + self.scale as f64 * LN2_LO)
    }

    pub fn phase(self) -> f64 {
        self.phase
    }

    pub fn is_zero(self) -> bool {
        self.frac == f64::NEG_INFINITY
    }

    pub fn is_finite(self) -> bool {
        (self.frac.is_finite() || self.is_zero()) && self.phase.is_finite()
    }

    pub fn conj(self) -> Self {
        LogComplex {
            phase: normalize_phase(-self.phase),
            ..self
        }
    }

    pub fn recip(self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::QuotientByZero { index: 0 });
        }
        Ok(LogComplex {
            scale: -self.scale,
            frac: -self.frac,
            phase: normalize_phase(-self.phase),
        }
        .renormalized())
    }

    pub fn checked_div(self, other: Self) -> Result<Self> {
        Ok(self * other.recip()?)
    }

    /// Multiply by `e^c`.
    pub fn mul_exp(self, c: Complex64) -> Self {
        self * Self::exp(c)
    }

    pub fn mul_complex(self, c: Complex64) -> Self {
        self * Self::from_complex(c)
    }

    pub fn powi(self, n: i32) -> Self {
        if self.is_zero() {
            return if n == 0 { Self::ONE } else { Self::ZERO };
        }
        Self::new(n as f64 * self.log_mag(), n as f64 * self.phase)
    }

    fn renormalized(mut self) -> Self {
        if self.frac.is_finite() && self.frac.abs() > LN_2 {
            let j = (self.frac / LN_2).round();
            self.scale += j as i64;
            self.frac = (self.frac - j * LN2_HI) - j * LN2_LO;
        }
        self
    }
}

impl Mul for LogComplex {
    type Output = LogComplex;

    fn mul(self, rhs: LogComplex) -> LogComplex {
        if self.is_zero() || rhs.is_zero() {
            return LogComplex::ZERO;
        }
        LogComplex {
            scale: self.scale + rhs.scale,
            frac: self.frac + rhs.frac,
            phase: normalize_phase(self.phase + rhs.phase),
        }
        .renormalized()
    }
}

impl Neg for LogComplex {
    type Output = LogComplex;

    fn neg(self) -> Self {
        LogComplex {
            phase: normalize_phase(self.phase + PI),
            ..self
        }
    }
}

impl MulAssign for LogComplex {
    fn mul_assign(&mut self, rhs: LogComplex) {
        *self = *self * rhs;
    }
}

/// Fold a sequence by product or left-to-right quotient.
///
/// A zero divisor is reported with its position in `values`.
pub fn log_combine(values: &[LogComplex], op: CombineOp) -> Result<LogComplex> {
    match op {
        CombineOp::Product => Ok(values.iter().fold(LogComplex::ONE, |acc, v| acc * *v)),
        CombineOp::Quotient => {
            let (first, rest) = values
                .split_first()
                .ok_or_else(|| Error::Domain("quotient of an empty sequence".into()))?;
            let mut acc = *first;
            for (i, v) in rest.iter().enumerate() {
                if v.is_zero() {
                    return Err(Error::QuotientByZero { index: i + 1 });
                }
                acc *= v.recip()?;
            }
            Ok(acc)
        }
    }
}

/// Sum in the log domain, rescaling by the largest term.
pub fn log_sum(values: &[LogComplex]) -> LogComplex {
    let mut top: Option<LogComplex> = None;
    for v in values.iter().filter(|v| !v.is_zero()) {
        match top {
            Some(t) if t.log_mag() >= v.log_mag() => {}
            _ => top = Some(*v),
        }
    }
    let Some(top) = top else {
        return LogComplex::ZERO;
    };
    if !top.is_finite() {
        return top;
    }
    let mut total = Complex64::new(0.0, 0.0);
    for v in values.iter().filter(|v| !v.is_zero()) {
        let mag = ldexp((v.frac - top.frac).exp(), v.scale - top.scale);
        let (s, c) = v.phase.sin_cos();
        total += Complex64::new(mag * c, mag * s);
    }
    let unit = LogComplex {
        scale: top.scale,
        frac: top.frac,
        phase: 0.0,
    };
    LogComplex::from_complex(total) * unit
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn zero_conventions() {
        let z = LogComplex::from_complex(Complex64::new(0.0, 0.0));
        assert!(z.is_zero());
        assert_eq!(z.log_mag(), f64::NEG_INFINITY);
        assert_eq!(z.phase(), 0.0);
        assert!((z * LogComplex::ONE).is_zero());
    }

    #[test]
    fn quotient_of_identical_values_is_one() {
        let v = LogComplex::new(12.5, 2.0);
        let q = log_combine(&[v, v], CombineOp::Quotient).unwrap();
        assert_eq!(q.log_mag(), 0.0);
        assert_eq!(q.phase(), 0.0);
    }

    #[test]
    fn quotient_reports_offending_index() {
        let v = LogComplex::new(1.0, 0.5);
        let err = log_combine(&[v, v, LogComplex::ZERO], CombineOp::Quotient).unwrap_err();
        assert_eq!(err, Error::QuotientByZero { index: 2 });
    }

    #[test]
    fn phase_is_half_open() {
        assert_eq!(normalize_phase(-PI), PI);
        assert_eq!(normalize_phase(PI), PI);
        assert_relative_eq!(normalize_phase(3.0 * PI + 0.25), -PI + 0.25, epsilon = 1e-14);
        let v = LogComplex::from_complex(Complex64::new(-1.0, 0.0));
        assert_eq!(v.phase(), PI);
    }

    #[test]
    fn sum_preserves_cancellation() {
        // (1 + 1e-10) - 1 at a scale of e^600.
        let big = LogComplex::new(600.0, 0.0);
        let a = big * LogComplex::from_real(1.0 + 1e-10);
        let b = -big;
        let s = log_sum(&[a, b]);
        let expected = 600.0 + (1e-10f64).ln();
        assert!((s.log_mag() - expected).abs() < 1e-5);
    }

    #[test]
    fn ldexp_saturates() {
        assert_eq!(ldexp(1.0, 5000), f64::INFINITY);
        assert_eq!(ldexp(1.0, -5000), 0.0);
        assert_eq!(ldexp(3.0, -1073), f64::from_bits(6));
    }

    proptest! {
        #[test]
        fn round_trip_from_log(lm in -700.0f64..700.0, ph in -3.1f64..3.1) {
            let v = LogComplex::new(lm, ph);
            let back = LogComplex::from_complex(v.to_complex());
            let ratio = back.checked_div(v).unwrap().to_complex();
            prop_assert!((ratio - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        }

        #[test]
        fn round_trip_from_complex(re in -1e300f64..1e300, im in -1e300f64..1e300, s in -300i32..300) {
            let c = Complex64::new(re, im) * 10f64.powi(s - 300);
            prop_assume!(c.norm() > 1e-300 && c.norm().is_finite());
            let back = LogComplex::from_complex(c).to_complex();
            prop_assert!((back - c).norm() <= 1e-14 * c.norm());
        }

        #[test]
        fn product_matches_complex(a in -5.0f64..5.0, b in -5.0f64..5.0, c in -5.0f64..5.0, d in -5.0f64..5.0) {
            let x = Complex64::new(a, b);
            let y = Complex64::new(c, d);
            prop_assume!(x.norm() > 1e-3 && y.norm() > 1e-3);
            let p = (LogComplex::from_complex(x) * LogComplex::from_complex(y)).to_complex();
            prop_assert!((p - x * y).norm() <= 1e-14 * (x * y).norm());
            let q = LogComplex::from_complex(x).checked_div(LogComplex::from_complex(y)).unwrap().to_complex();
            prop_assert!((q - x / y).norm() <= 1e-14 * (x / y).norm());
        }

        #[test]
        fn sum_matches_complex(v in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..8)) {
            let xs: Vec<Complex64> = v.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
            let direct: Complex64 = xs.iter().sum();
            let logs: Vec<LogComplex> = xs.iter().map(|&x| LogComplex::from_complex(x)).collect();
            let s = log_sum(&logs).to_complex();
            let scale: f64 = xs.iter().map(|x| x.norm()).fold(0.0, f64::max);
            prop_assert!((s - direct).norm() <= 1e-13 * scale.max(1e-300));
        }

        #[test]
        fn phase_always_in_range(p in -1e4f64..1e4) {
            let r = normalize_phase(p);
            prop_assert!(r > -PI && r <= PI);
        }
    }
}
