//! Finite sections of mixed systems: normalized kernels at one part of a
//! zero set and normalized quotients `G/(z - l)` at the other. Each section
//! is summarized by the spectrum of its Gram matrix.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::counterexample::ConstructionResult;
use crate::error::{Error, Result};
use crate::fock::{kernel_weighted_eval, FockFunction, KernelSpec};
use crate::num::Grid;
use crate::weierstrass::dist_to_lattice;

/// Required distance of quotient points from the integer lattice.
pub const LATTICE_MARGIN: f64 = 0.04;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MemberKind {
    Kernel,
    Quotient,
}

/// One unit vector of a mixed system.
#[derive(Clone, Debug)]
pub struct Member {
    pub point: Complex64,
    pub kind: MemberKind,
    /// Normalized function; used for pairings against kernels.
    pub function: FockFunction,
    /// Weighted values on the system grid (quotients only).
    table: Option<Arc<Vec<Complex64>>>,
}

impl Member {
    pub fn kernel(point: Complex64) -> Self {
        Member { point, kind: MemberKind::Kernel, function: FockFunction::kernel(point), table: None }
    }

    /// A quotient given by its function and its weighted values on `grid`;
    /// both are rescaled to unit norm on the grid.
    pub fn quotient(point: Complex64, function: FockFunction, table: Vec<Complex64>, grid: &Grid) -> Result<Self> {
        let norm_sq = grid.integrate_table(&table.iter().map(|v| Complex64::new(v.norm_sqr(), 0.0)).collect::<Vec<_>>())?;
        let norm = norm_sq.value.re.sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Domain(format!("quotient at {point} has norm {norm}")));
        }
        let scale = Complex64::new(1.0 / norm, 0.0);
        Ok(Member {
            point,
            kind: MemberKind::Quotient,
            function: function.scaled(scale),
            table: Some(Arc::new(table.into_iter().map(|v| v * scale).collect())),
        })
    }
}

/// An ordered mixed system and the section sizes to study.
#[derive(Clone, Debug)]
pub struct MixedSystemSpec {
    /// Points carrying quotients.
    pub lambda1: Vec<Complex64>,
    /// Points carrying kernels.
    pub lambda2: Vec<Complex64>,
    pub members: Vec<Member>,
    pub section_sizes: Vec<usize>,
    grid: Option<Arc<Grid>>,
}

impl MixedSystemSpec {
    pub fn new(members: Vec<Member>, section_sizes: Vec<usize>, grid: Option<Grid>) -> Result<Self> {
        let pick = |k: MemberKind| members.iter().filter(|m| m.kind == k).map(|m| m.point).collect::<Vec<_>>();
        let spec = MixedSystemSpec {
            lambda1: pick(MemberKind::Quotient),
            lambda2: pick(MemberKind::Kernel),
            members,
            section_sizes,
            grid: grid.map(Arc::new),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// A pure kernel system.
    pub fn kernels(points: &[Complex64], section_sizes: Vec<usize>) -> Result<Self> {
        Self::new(points.iter().map(|p| Member::kernel(*p)).collect(), section_sizes, None)
    }

    /// Kernels at the points of `L2` and the quotients `g_{v_n}`, taken
    /// alternately, each list ordered by modulus. `L2` is cut to what the
    /// largest section needs.
    pub fn from_construction(result: &ConstructionResult, section_sizes: Vec<usize>) -> Result<Self> {
        let grid = &result.tables.grid;
        let nodes = grid.nodes();
        let mut quotients = Vec::new();
        for n in 0..result.vs.len() {
            let table: Vec<Complex64> = nodes
                .par_iter()
                .enumerate()
                .map(|(i, z)| result.g2_at(i, *z) * result.g1.eval_without(*z, n))
                .collect();
            let v = Complex64::new(result.vs[n], 0.0);
            quotients.push(Member::quotient(v, result.g_v(n), table, grid)?);
        }
        let mut l2 = result.lambda2.clone();
        l2.sort_by(by_modulus);
        let wanted = section_sizes.iter().copied().max().unwrap_or(0);
        let mut members = Vec::with_capacity(wanted);
        let mut kernels = l2.into_iter().map(Member::kernel);
        let mut quotients = quotients.into_iter();
        while members.len() < wanted {
            let before = members.len();
            members.extend(kernels.next());
            if members.len() < wanted {
                members.extend(quotients.next());
            }
            if members.len() == before {
                break;
            }
        }
        Self::new(members, section_sizes, Some(grid.clone()))
    }

    pub fn validate(&self) -> Result<()> {
        for a in &self.lambda1 {
            if self.lambda2.iter().any(|b| (a - b).norm() < 1e-12) {
                return Err(Error::Precondition(format!("{a} is in both parts of the system")));
            }
            if dist_to_lattice(*a) < LATTICE_MARGIN {
                return Err(Error::Precondition(format!("quotient point {a} is within {LATTICE_MARGIN} of the lattice")));
            }
        }
        if self.section_sizes.is_empty() || self.section_sizes[0] == 0 {
            return Err(Error::Precondition("section sizes must be positive".into()));
        }
        if self.section_sizes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Precondition("section sizes must increase".into()));
        }
        let last = *self.section_sizes.last().unwrap();
        if last > self.members.len() {
            return Err(Error::Precondition(format!(
                "section size {last} exceeds the {} available vectors",
                self.members.len()
            )));
        }
        if self.members.iter().any(|m| m.kind == MemberKind::Quotient) && self.grid.is_none() {
            return Err(Error::Precondition("quotients need a quadrature grid".into()));
        }
        Ok(())
    }
}

pub fn by_modulus(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.norm()
        .total_cmp(&b.norm())
        .then(a.arg().total_cmp(&b.arg()))
}

/// Hermitian Gram matrix of a section, with the asymmetry removed by
/// averaging.
#[derive(Clone, Debug, PartialEq)]
pub struct GramMatrix {
    pub matrix: DMatrix<Complex64>,
    /// `max |G - G^*|` before averaging.
    pub asymmetry: f64,
}

/// `<m_i, m_j>`.
fn entry(spec: &MixedSystemSpec, i: usize, j: usize) -> Result<Complex64> {
    let (a, b) = (&spec.members[i], &spec.members[j]);
    match (a.kind, b.kind) {
        (MemberKind::Kernel, MemberKind::Kernel) => {
            Ok(kernel_weighted_eval(KernelSpec::normalized(a.point), b.point).to_complex())
        }
        // <f, kk_l> is the weighted value of f at l.
        (MemberKind::Quotient, MemberKind::Kernel) => Ok(a.function.weighted_complex(b.point)),
        (MemberKind::Kernel, MemberKind::Quotient) => Ok(b.function.weighted_complex(a.point).conj()),
        (MemberKind::Quotient, MemberKind::Quotient) => {
            let grid = spec.grid.as_ref().expect("validated");
            let (ta, tb) = (a.table.as_ref().unwrap(), b.table.as_ref().unwrap());
            Ok(grid.inner(ta, tb)?.value)
        }
    }
}

/// Gram matrix of the first `size` members.
pub fn gram_matrix(spec: &MixedSystemSpec, size: usize) -> Result<GramMatrix> {
    if size > spec.members.len() {
        return Err(Error::Precondition(format!("size {size} exceeds {} vectors", spec.members.len())));
    }
    let pairs: Vec<(usize, usize)> = (0..size).flat_map(|i| (0..size).map(move |j| (i, j))).collect();
    let values = pairs
        .par_iter()
        .map(|&(i, j)| entry(spec, i, j).map_err(|e| Error::GramEntry { i, j, cause: Box::new(e) }))
        .collect::<Result<Vec<_>>>()?;
    let raw = DMatrix::from_row_iterator(size, size, values);
    let adjoint = raw.adjoint();
    let asymmetry = (&raw - &adjoint).iter().map(|v| v.norm()).fold(0.0, f64::max);
    Ok(GramMatrix { matrix: (raw + adjoint) * Complex64::new(0.5, 0.0), asymmetry })
}

/// Spectrum of one section.
#[derive(Clone, Debug, PartialEq)]
pub struct GramReport {
    pub section_size: usize,
    pub points: Vec<Complex64>,
    /// Descending.
    pub singular_values: Vec<f64>,
    pub sigma_min: f64,
    /// Second smallest singular value; absent for a single vector.
    pub sigma_2min: Option<f64>,
    /// Unit right singular vector of `sigma_min`, phased so its largest
    /// entry is real and positive.
    pub null_vector: Vec<Complex64>,
    pub conditioning: f64,
    pub asymmetry: f64,
    /// Largest difference between the singular values and the squared
    /// singular values of the square-root factor `D^{1/2} U^T` from the
    /// eigendecomposition.
    pub factorization_gap: f64,
    pub gram: DMatrix<Complex64>,
}

/// The real symmetric matrix `[[A, -B], [B, A]]` of `A + iB`. Its spectrum
/// is that of the Hermitian matrix with every value doubled, and
/// `[x; y]` in an eigenspace gives the eigenvector `x + iy`.
fn real_embedding(m: &DMatrix<Complex64>) -> DMatrix<f64> {
    let n = m.nrows();
    DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let v = m[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => v.re,
            (true, false) => -v.im,
            (false, true) => v.im,
        }
    })
}

/// Every other entry of a descending list of doubled values.
fn undouble(mut values: Vec<f64>) -> Vec<f64> {
    values.sort_by(|a, b| b.total_cmp(a));
    values.into_iter().step_by(2).collect()
}

pub fn analyze(gram: GramMatrix, points: Vec<Complex64>) -> Result<GramReport> {
    let m = gram.matrix;
    let n = m.nrows();
    if n == 0 {
        return Err(Error::Domain("empty section".into()));
    }
    // Complex decompositions are routed through the real embedding, whose
    // Golub-Kahan and symmetric QR paths are the reliable ones.
    let real = real_embedding(&m);
    let svd = real.clone().svd(false, true);
    let v_t = svd.v_t.as_ref().ok_or_else(|| Error::Numerical("SVD returned no right vectors".into()))?;
    let singular_values = undouble(svd.singular_values.iter().copied().collect());
    let smallest = (0..2 * n)
        .min_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]))
        .unwrap();
    let row = v_t.row(smallest);
    let mut null: Vec<Complex64> = (0..n).map(|k| Complex64::new(row[k], row[k + n])).collect();
    let norm = null.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let lead = null
        .iter()
        .copied()
        .fold(Complex64::new(0.0, 0.0), |best, v| if v.norm() > best.norm() + 1e-12 { v } else { best });
    let phase = lead.conj() / lead.norm() / norm;
    for v in &mut null {
        *v *= phase;
    }

    let eig = real.symmetric_eigen();
    let root = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.max(0.0).sqrt()));
    let factor = root * eig.eigenvectors.transpose();
    let squared = undouble(factor.singular_values().iter().map(|s| s * s).collect());
    let factorization_gap = singular_values
        .iter()
        .zip(&squared)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    let sigma_min = singular_values[n - 1];
    Ok(GramReport {
        section_size: n,
        points,
        sigma_2min: (n > 1).then(|| singular_values[n - 2]),
        conditioning: singular_values[0] / sigma_min,
        singular_values,
        sigma_min,
        null_vector: null,
        asymmetry: gram.asymmetry,
        factorization_gap,
        gram: m,
    })
}

/// Gram spectra of every requested section.
pub fn defect_scan(spec: &MixedSystemSpec) -> Result<Vec<GramReport>> {
    let largest = *spec.section_sizes.last().ok_or_else(|| Error::Precondition("no section sizes".into()))?;
    let full = gram_matrix(spec, largest)?;
    spec.section_sizes
        .iter()
        .map(|&size| {
            let section = GramMatrix {
                matrix: full.matrix.view((0, 0), (size, size)).into_owned(),
                asymmetry: full.asymmetry,
            };
            let points = spec.members[..size].iter().map(|m| m.point).collect();
            analyze(section, points)
        })
        .collect()
}

/// `sigma_min` never increases as vectors are appended.
pub fn interlacing_holds(reports: &[GramReport]) -> bool {
    reports.windows(2).all(|w| w[1].sigma_min <= w[0].sigma_min * (1.0 + 1e-12) + 1e-15)
}

/// `1 - max_i sum_{j != i} |<kk_i, kk_j>|`, a lower bound for the smallest
/// eigenvalue of a kernel Gram matrix.
pub fn gershgorin_bound(points: &[Complex64]) -> f64 {
    let worst = points
        .iter()
        .enumerate()
        .map(|(i, a)| {
            points
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, b)| (-std::f64::consts::PI * (a - b).norm_sqr() / 2.0).exp())
                .sum::<f64>()
        })
        .fold(0.0, f64::max);
    1.0 - worst
}

/// `|<c, X>| / (||c|| ||X||)` for the section combination `c` with the null
/// vector as coefficients.
///
/// `candidate_table` holds the weighted values of `X` on the system grid;
/// it is required when the section has quotients or `X` is not a finite
/// kernel sum.
pub fn null_vector_correlation(
    spec: &MixedSystemSpec,
    report: &GramReport,
    candidate: &FockFunction,
    candidate_table: Option<&[Complex64]>,
) -> Result<f64> {
    let grid = spec.grid.as_deref();
    let table_norm = |t: &[Complex64]| -> Result<f64> {
        let g = grid.ok_or_else(|| Error::Precondition("candidate table without a grid".into()))?;
        Ok(g.inner(t, t)?.value.re.max(0.0).sqrt())
    };
    let x_norm = match (candidate.decomposition(), candidate_table) {
        (Some(d), _) if d.sigma3.is_none() => d.kernel_gram(d).re.max(0.0).sqrt(),
        (_, Some(t)) => table_norm(t)?,
        _ => return Err(Error::Precondition("candidate norm needs a table or a kernel expansion".into())),
    };
    if x_norm == 0.0 {
        return Err(Error::Domain("zero candidate".into()));
    }
    let n = DVector::from_column_slice(&report.null_vector);
    let c_norm = (n.adjoint() * &report.gram * &n)[(0, 0)].re.max(0.0).sqrt();
    if c_norm == 0.0 {
        return Err(Error::Domain("section combination vanishes".into()));
    }
    let mut pairing = Complex64::new(0.0, 0.0);
    for (coeff, member) in report.null_vector.iter().zip(&spec.members) {
        let p = match member.kind {
            MemberKind::Kernel => candidate.weighted_complex(member.point).conj(),
            MemberKind::Quotient => {
                let t = candidate_table
                    .ok_or_else(|| Error::Precondition("quotient members need the candidate table".into()))?;
                let g = grid.expect("validated");
                g.inner(member.table.as_ref().unwrap(), t)?.value
            }
        };
        pairing += coeff * p;
    }
    Ok((pairing.norm() / (c_norm * x_norm)).min(1.0))
}

#[cfg(test)]
mod tests;
