//! Zeros of a Fock function in a disk, located cell by cell with the
//! argument principle and polished by Newton's method.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::fock::FockFunction;
use crate::num::LogComplex;

/// A comparison function `base` with known zeros such that `f = base + perturbation`.
/// Where `|perturbation| < |base| / 2` on a cell boundary the two share
/// their zero count there.
pub struct Reference<'a> {
    pub base: &'a FockFunction,
    pub perturbation: &'a FockFunction,
    pub base_zeros: &'a (dyn Fn(Complex64, Complex64) -> usize + Sync),
}

/// A cell whose argument-principle count disagrees with the zeros found in it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellMismatch {
    pub center: Complex64,
    pub counted: i64,
    pub found: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZeroScan {
    /// Zeros sorted by modulus then argument.
    pub zeros: Vec<Complex64>,
    pub cells: usize,
    /// Cells where the count came from the full winding number.
    pub wound_cells: usize,
    pub mismatches: Vec<CellMismatch>,
}

/// Newton step for `F(zeta) e^{-pi conj(z) zeta}` at `zeta = z`, which has the
/// zeros of `F` without its Gaussian growth. Central difference for the
/// derivative, with a common rescaling so that no value overflows.
pub(crate) fn newton_step(f: &FockFunction, z: Complex64) -> Option<Complex64> {
    let h = 1e-6;
    let lifted = |d: f64| {
        let zeta = z + d;
        f.weighted(zeta) * LogComplex::new(PI * (zeta.norm_sqr() - z.norm_sqr()) / 2.0, 0.0)
    };
    let (a, b, c) = (lifted(h), lifted(-h), f.weighted(z));
    let top = a.log_mag().max(b.log_mag()).max(c.log_mag());
    if !top.is_finite() {
        return None;
    }
    let unit = LogComplex::new(-top, 0.0);
    let (a, b, c) = ((a * unit).to_complex(), (b * unit).to_complex(), (c * unit).to_complex());
    let slope = (a - b) / (2.0 * h) - PI * z.conj() * c;
    let step = -c / slope;
    (step.re.is_finite() && step.im.is_finite()).then_some(step)
}

/// Damped Newton iteration on the weighted values.
pub fn newton(f: &FockFunction, start: Complex64) -> Option<Complex64> {
    let mut z = start;
    for _ in 0..80 {
        if f.weighted(z).is_zero() {
            return Some(z);
        }
        let mut step = newton_step(f, z)?;
        if step.norm() > 0.25 {
            step *= 0.25 / step.norm();
        }
        z += step;
        if step.norm() <= 1e-15 * z.norm().max(1.0) {
            return Some(z);
        }
    }
    (newton_step(f, z)?.norm() <= 1e-12 * z.norm().max(1.0)).then_some(z)
}

/// Total change of `arg f` along the segment `[a, b]`; `None` if a zero
/// sits on or extremely near the segment.
fn phase_increment(f: &FockFunction, a: Complex64, b: Complex64) -> Option<f64> {
    fn go(f: &FockFunction, a: Complex64, pa: f64, b: Complex64, pb: f64, depth: u32) -> Option<f64> {
        let mut d = pb - pa;
        d -= 2.0 * PI * (d / (2.0 * PI)).round();
        if d.abs() <= PI / 4.0 {
            return Some(d);
        }
        if depth > 40 {
            return None;
        }
        let m = (a + b) / 2.0;
        let vm = f.weighted(m);
        if vm.is_zero() {
            return None;
        }
        Some(go(f, a, pa, m, vm.phase(), depth + 1)? + go(f, m, vm.phase(), b, pb, depth + 1)?)
    }
    // arg F turns at rate about pi |z|; keep the base pieces well below a quarter turn.
    let speed = PI * (a.norm().max(b.norm()) + 2.0);
    let pieces = ((speed * (b - a).norm()) / (PI / 8.0)).ceil().max(16.0) as usize;
    let mut total = 0.0;
    let mut prev = f.weighted(a);
    for k in 1..=pieces {
        let p = a + (b - a) * (k as f64 / pieces as f64);
        let next = f.weighted(p);
        if prev.is_zero() || next.is_zero() {
            return None;
        }
        let a_k = a + (b - a) * ((k - 1) as f64 / pieces as f64);
        total += go(f, a_k, prev.phase(), p, next.phase(), 0)?;
        prev = next;
    }
    Some(total)
}

fn corners(lo: Complex64, size: f64) -> [Complex64; 4] {
    [lo, lo + size, lo + Complex64::new(size, size), lo + Complex64::new(0.0, size)]
}

pub(crate) fn winding(f: &FockFunction, lo: Complex64, size: f64) -> Option<i64> {
    let c = corners(lo, size);
    let mut total = 0.0;
    for k in 0..4 {
        total += phase_increment(f, c[k], c[(k + 1) % 4])?;
    }
    Some((total / (2.0 * PI)).round() as i64)
}

fn dominated(reference: &Reference, lo: Complex64) -> bool {
    const SAMPLES: usize = 24;
    let c = corners(lo, 1.0);
    (0..4).all(|k| {
        (0..SAMPLES).all(|j| {
            let z = c[k] + (c[(k + 1) % 4] - c[k]) * (j as f64 / SAMPLES as f64);
            let b = reference.base.weighted(z).abs();
            reference.perturbation.weighted(z).abs() < 0.5 * b
        })
    })
}

fn inside(z: Complex64, lo: Complex64, size: f64) -> bool {
    z.re >= lo.re && z.re < lo.re + size && z.im >= lo.im && z.im < lo.im + size
}

/// Split the square until each piece holds one zero by its winding number,
/// then polish from the piece.
/// Zeros reached from a leaf are kept if they lie in the enclosing `cell`.
fn locate(f: &FockFunction, cell: Complex64, lo: Complex64, size: f64, count: i64, depth: u32, out: &mut Vec<Complex64>) {
    if count <= 0 {
        return;
    }
    if count == 1 && size <= 0.125 || depth >= 8 {
        let mut seeds = vec![lo + Complex64::new(size / 2.0, size / 2.0)];
        for a in 0..3 {
            for b in 0..3 {
                seeds.push(lo + Complex64::new(size * (a as f64 + 0.5) / 3.0, size * (b as f64 + 0.5) / 3.0));
            }
        }
        let mut got = 0;
        for s in seeds {
            if got >= count {
                break;
            }
            if let Some(z) = newton(f, s) {
                if inside(z, cell, 1.0) && out.iter().all(|w| (w - z).norm() > 1e-9 * z.norm().max(1.0)) {
                    out.push(z);
                    got += 1;
                }
            }
        }
        return;
    }
    let half = size / 2.0;
    for (a, b) in [(0.0, 0.0), (half, 0.0), (0.0, half), (half, half)] {
        let sub = lo + Complex64::new(a, b);
        match winding(f, sub, half) {
            Some(k) => locate(f, cell, sub, half, k, depth + 1, out),
            // A zero on a sub-boundary: polish from the parent instead.
            None => {
                locate(f, cell, lo, size, count, 8, out);
                return;
            }
        }
    }
}

fn zeros_in_cell(f: &FockFunction, lo: Complex64, count: i64, lattice_seed: bool) -> Vec<Complex64> {
    if lattice_seed && count == 1 {
        let seed = Complex64::new((lo.re + 0.5).round(), (lo.im + 0.5).round());
        if let Some(z) = newton(f, seed) {
            if inside(z, lo, 1.0) {
                return vec![z];
            }
        }
    }
    let mut out = Vec::new();
    locate(f, lo, lo, 1.0, count, 0, &mut out);
    // Fallback: a dense seed grid over the whole cell.
    let mut k = 0;
    while (out.len() as i64) < count && k < 64 {
        let s = lo + Complex64::new((k % 8) as f64 / 8.0 + 1.0 / 16.0, (k / 8) as f64 / 8.0 + 1.0 / 16.0);
        if let Some(z) = newton(f, s) {
            if inside(z, lo, 1.0) && out.iter().all(|w| (w - z).norm() > 1e-9 * z.norm().max(1.0)) {
                out.push(z);
            }
        }
        k += 1;
    }
    out
}

/// Scan unit cells with lower-left corners at `(m + offset - 1/2, n + offset - 1/2)`
/// whose centers lie in `|z| <= radius`.
pub fn scan_zeros(f: &FockFunction, reference: Option<&Reference>, radius: f64, offset: f64) -> ZeroScan {
    let r = radius.ceil() as i64 + 1;
    let los: Vec<Complex64> = (-r..=r)
        .flat_map(|m| (-r..=r).map(move |n| (m, n)))
        .map(|(m, n)| Complex64::new(m as f64 + offset - 0.5, n as f64 + offset - 0.5))
        .filter(|lo| (lo + Complex64::new(0.5, 0.5)).norm() <= radius)
        .collect();
    let per_cell: Vec<(Vec<Complex64>, bool, Option<CellMismatch>)> = los
        .par_iter()
        .map(|&lo| {
            let center = lo + Complex64::new(0.5, 0.5);
            let (count, wound) = match reference {
                Some(rf) if dominated(rf, lo) => ((rf.base_zeros)(lo, lo + Complex64::new(1.0, 1.0)) as i64, false),
                _ => (winding(f, lo, 1.0).unwrap_or(-1), true),
            };
            if count == 0 {
                return (Vec::new(), wound, None);
            }
            let zs = zeros_in_cell(f, lo, count, !wound);
            let mismatch = (count < 0 || zs.len() as i64 != count).then_some(CellMismatch {
                center,
                counted: count,
                found: zs.len(),
            });
            (zs, wound, mismatch)
        })
        .collect();
    let mut zeros = Vec::new();
    let mut mismatches = Vec::new();
    let mut wound_cells = 0;
    for (zs, wound, mm) in per_cell {
        zeros.extend(zs);
        wound_cells += wound as usize;
        mismatches.extend(mm);
    }
    zeros.sort_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr()).then(a.arg().total_cmp(&b.arg())));
    ZeroScan { zeros, cells: los.len(), wound_cells, mismatches }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn newton_finds_kernel_pair_zero() {
        // kk_0 - kk_1 vanishes on Re z = 1/2, Im z in 2Z.
        let f = FockFunction::kernel(c(0.0, 0.0)).plus(&FockFunction::kernel(c(1.0, 0.0)).scaled(c(-1.0, 0.0)));
        let z = newton(&f, c(0.4, 0.1)).unwrap();
        assert!((z - c(0.5, 0.0)).norm() < 1e-13, "{z}");
        let z = newton(&f, c(0.48, 2.03)).unwrap();
        assert!((z - c(0.5, 2.0)).norm() < 1e-13, "{z}");
    }

    #[test]
    fn scan_counts_polynomial_zeros() {
        let roots = [c(0.3, 0.2), c(-1.1, 0.7), c(2.2, -1.6), c(-0.6, -2.4)];
        let f = FockFunction::kernel(c(0.0, 0.0)).times("p", move |z| {
            LogComplex::from_complex(roots.iter().map(|r| z - r).product())
        });
        let scan = scan_zeros(&f, None, 4.0, 0.137);
        assert!(scan.mismatches.is_empty(), "{:?}", scan.mismatches);
        assert_eq!(scan.zeros.len(), 4);
        for r in roots {
            assert!(scan.zeros.iter().any(|z| (z - r).norm() < 1e-12));
        }
        assert_eq!(scan.wound_cells, scan.cells);
    }
}
