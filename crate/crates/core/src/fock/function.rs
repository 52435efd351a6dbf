use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::num::{LogComplex, PlaneIntegral, QuadratureSpec, Grid};
use crate::weierstrass::SigmaConfig;

/// A reproducing kernel `k_center(z) = e^{pi conj(center) z}`, optionally
/// divided by its norm `e^{pi|center|^2/2}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelSpec {
    pub center: Complex64,
    pub normalized: bool,
}

impl KernelSpec {
    pub fn normalized(center: Complex64) -> Self {
        KernelSpec { center, normalized: true }
    }

    pub fn unnormalized(center: Complex64) -> Self {
        KernelSpec { center, normalized: false }
    }
}

/// `log ||k_center||`.
pub fn kernel_log_norm(center: Complex64) -> f64 {
    PI * center.norm_sqr() / 2.0
}

/// `k(z) e^{-pi|z|^2/2}`. For the normalized kernel this is
/// `e^{-pi|z - center|^2/2} e^{i pi Im(conj(center) z)}`.
pub fn kernel_weighted_eval(spec: KernelSpec, z: Complex64) -> LogComplex {
    let c = spec.center;
    let mut lm = -PI * (z - c).norm_sqr() / 2.0;
    if !spec.normalized {
        lm += kernel_log_norm(c);
    }
    LogComplex::new(lm, PI * (c.conj() * z).im)
}

fn normalized_kernel_complex(center: Complex64, z: Complex64) -> Complex64 {
    let lm = -PI * (z - center).norm_sqr() / 2.0;
    if lm < -745.0 {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::from_polar(lm.exp(), PI * (center.conj() * z).im)
}

/// One term `coeff * normalized kernel at center`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelTerm {
    pub coeff: Complex64,
    pub center: Complex64,
}

/// `sum_j c_j kk_{lambda_j} + s sigma_3`, with `kk` the normalized kernel.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct KernelExpansion {
    pub terms: Vec<KernelTerm>,
    pub sigma3: Option<Complex64>,
}

impl KernelExpansion {
    pub fn kernel(center: Complex64) -> Self {
        KernelExpansion {
            terms: vec![KernelTerm { coeff: Complex64::new(1.0, 0.0), center }],
            sigma3: None,
        }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        KernelExpansion {
            terms: self
                .terms
                .iter()
                .map(|t| KernelTerm { coeff: t.coeff * c, center: t.center })
                .collect(),
            sigma3: self.sigma3.map(|s| s * c),
        }
    }

    pub fn plus(&self, other: &KernelExpansion) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().copied());
        let sigma3 = match (self.sigma3, other.sigma3) {
            (None, None) => None,
            (a, b) => Some(a.unwrap_or_default() + b.unwrap_or_default()),
        };
        KernelExpansion { terms, sigma3 }
    }

    /// `sum_j c_j kk_{lambda_j}(z) e^{-pi|z|^2/2}`, the kernel part only.
    pub fn kernel_part(&self, z: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|t| t.coeff * normalized_kernel_complex(t.center, z))
            .sum()
    }

    /// `<sum_j a_j kk_j, sum_k b_k kk_k>` for the kernel parts.
    pub fn kernel_gram(&self, other: &KernelExpansion) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for a in &self.terms {
            for b in &other.terms {
                acc += a.coeff * b.coeff.conj() * normalized_kernel_complex(a.center, b.center);
            }
        }
        acc
    }
}

pub type WeightedFn = Arc<dyn Fn(Complex64) -> LogComplex + Send + Sync>;

/// An element of the Fock space, represented by its weighted evaluator
/// `z -> F(z) e^{-pi|z|^2/2}`.
#[derive(Clone)]
pub struct FockFunction {
    label: String,
    eval: WeightedFn,
    known_zeros: Vec<Complex64>,
    decomposition: Option<KernelExpansion>,
    sigma: Option<Arc<SigmaConfig>>,
}

impl fmt::Debug for FockFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FockFunction")
            .field("label", &self.label)
            .field("known_zeros", &self.known_zeros.len())
            .field("decomposition", &self.decomposition)
            .finish()
    }
}

impl FockFunction {
    pub fn new<F>(label: impl Into<String>, eval: F) -> Self
    where
        F: Fn(Complex64) -> LogComplex + Send + Sync + 'static,
    {
        FockFunction {
            label: label.into(),
            eval: Arc::new(eval),
            known_zeros: Vec::new(),
            decomposition: None,
            sigma: None,
        }
    }

    pub fn kernel(center: Complex64) -> Self {
        Self::from_expansion(format!("kk[{center}]"), KernelExpansion::kernel(center), None)
            .expect("kernel expansion has no sigma part")
    }

    pub fn unnormalized_kernel(center: Complex64) -> Self {
        let scale = LogComplex::new(kernel_log_norm(center), 0.0).to_complex();
        Self::from_expansion(
            format!("k[{center}]"),
            KernelExpansion::kernel(center).scaled(scale),
            None,
        )
        .expect("kernel expansion has no sigma part")
    }

    /// Evaluator for a kernel expansion; `sigma` is required when the
    /// expansion has a `sigma_3` part.
    pub fn from_expansion(
        label: impl Into<String>,
        expansion: KernelExpansion,
        sigma: Option<Arc<SigmaConfig>>,
    ) -> Result<Self> {
        let s3 = match (expansion.sigma3, sigma.clone()) {
            (Some(c), Some(cfg)) => Some((c, cfg)),
            (Some(_), None) => {
                return Err(Error::Precondition(
                    "an expansion with a sigma_3 part needs a sigma configuration".into(),
                ))
            }
            (None, _) => None,
        };
        let exp = expansion.clone();
        let eval = move |z: Complex64| {
            let mut v = exp.kernel_part(z);
            if let Some((c, cfg)) = &s3 {
                v += *c * cfg.sigma3_weighted(z).to_complex();
            }
            LogComplex::from_complex(v)
        };
        let mut f = Self::new(label, eval);
        f.decomposition = Some(expansion);
        f.sigma = sigma;
        Ok(f)
    }

    /// `sigma(z) / (z (z-1) (z-2) (z-3))`.
    pub fn sigma3(cfg: Arc<SigmaConfig>) -> Self {
        let expansion = KernelExpansion {
            terms: Vec::new(),
            sigma3: Some(Complex64::new(1.0, 0.0)),
        };
        Self::from_expansion("sigma3", expansion, Some(cfg)).expect("sigma configuration given")
    }

    /// `sigma(z) / z`; not in the space, but useful as a factor.
    pub fn sigma0(cfg: Arc<SigmaConfig>) -> Self {
        Self::new("sigma0", move |z| cfg.sigma0_weighted(z))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn known_zeros(&self) -> &[Complex64] {
        &self.known_zeros
    }

    pub fn with_zeros(mut self, zeros: Vec<Complex64>) -> Self {
        self.known_zeros = zeros;
        self
    }

    pub fn decomposition(&self) -> Option<&KernelExpansion> {
        self.decomposition.as_ref()
    }

    /// `F(z) e^{-pi|z|^2/2}`.
    pub fn weighted(&self, z: Complex64) -> LogComplex {
        (self.eval)(z)
    }

    pub fn weighted_complex(&self, z: Complex64) -> Complex64 {
        (self.eval)(z).to_complex()
    }

    /// `F(z)` itself.
    pub fn value(&self, z: Complex64) -> LogComplex {
        self.weighted(z) * LogComplex::new(PI * z.norm_sqr() / 2.0, 0.0)
    }

    pub fn evaluator(&self) -> WeightedFn {
        Arc::clone(&self.eval)
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let inner = self.evaluator();
        let lc = LogComplex::from_complex(c);
        FockFunction {
            label: format!("({c})*{}", self.label),
            eval: Arc::new(move |z| inner(z) * lc),
            known_zeros: if c == Complex64::new(0.0, 0.0) { Vec::new() } else { self.known_zeros.clone() },
            decomposition: self.decomposition.as_ref().map(|d| d.scaled(c)),
            sigma: self.sigma.clone(),
        }
    }

    pub fn plus(&self, other: &FockFunction) -> Self {
        let a = self.evaluator();
        let b = other.evaluator();
        let decomposition = match (&self.decomposition, &other.decomposition) {
            (Some(x), Some(y)) => Some(x.plus(y)),
            _ => None,
        };
        FockFunction {
            label: format!("{}+{}", self.label, other.label),
            eval: Arc::new(move |z| LogComplex::from_complex(a(z).to_complex() + b(z).to_complex())),
            known_zeros: Vec::new(),
            decomposition,
            sigma: self.sigma.clone().or_else(|| other.sigma.clone()),
        }
    }

    /// Multiply by an entire factor given as a log-domain function of `z`.
    /// The result has no kernel decomposition.
    pub fn times<G>(&self, label: impl Into<String>, factor: G) -> Self
    where
        G: Fn(Complex64) -> LogComplex + Send + Sync + 'static,
    {
        let inner = self.evaluator();
        FockFunction::new(label, move |z| inner(z) * factor(z))
    }

    /// `F / (z - a)` for a zero `a` of `F`.
    ///
    /// Within `window` of `a` the quotient is evaluated as the divided
    /// difference `(F(z) - F(a)) / (z - a)` through the Cauchy integral on a
    /// circle of radius `4 window`, after removing the local growth of `F`.
    pub fn deflate(&self, a: Complex64, window: f64) -> Self {
        const NODES: usize = 48;
        let inner = self.evaluator();
        let radius = 4.0 * window;
        let rescale = move |z: Complex64, sign: f64| {
            let d = z - a;
            LogComplex::new(sign * PI * d.norm_sqr() / 2.0, -sign * PI * (a.conj() * d).im)
        };
        let circle: Vec<(Complex64, Complex64)> = (0..NODES)
            .map(|k| {
                let theta = 2.0 * PI * k as f64 / NODES as f64;
                let d = Complex64::from_polar(radius, theta);
                let zeta = a + d;
                let g = inner(zeta) * LogComplex::from_complex(d.inv()) * rescale(zeta, 1.0);
                (d, g.to_complex())
            })
            .collect();
        let eval = move |z: Complex64| {
            let d = z - a;
            if d.norm() >= window {
                return inner(z) * LogComplex::from_complex(d.inv());
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for (dk, gk) in &circle {
                acc += gk * dk / (dk - d);
            }
            LogComplex::from_complex(acc / NODES as f64) * rescale(z, -1.0)
        };
        let mut zeros = self.known_zeros.clone();
        if let Some(pos) = zeros.iter().position(|w| (w - a).norm() < 1e-9) {
            zeros.remove(pos);
        }
        FockFunction {
            label: format!("{}/(z-{a})", self.label),
            eval: Arc::new(eval),
            known_zeros: zeros,
            decomposition: None,
            sigma: None,
        }
    }
}

/// How [`inner_product`] evaluates `<f, g>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InnerMethod {
    /// Reproducing property against a kernel expansion of either side.
    ClosedForm,
    Quadrature,
}

/// `<f, g> = int f conj(g) dnu`, linear in `f`.
pub fn inner_product(
    f: &FockFunction,
    g: &FockFunction,
    method: InnerMethod,
    spec: &QuadratureSpec,
) -> Result<PlaneIntegral> {
    match method {
        InnerMethod::ClosedForm => closed_form(f, g).map(PlaneIntegral::exact),
        InnerMethod::Quadrature => {
            let a = f.evaluator();
            let b = g.evaluator();
            Grid::new(spec)?.integrate(move |z| a(z) * b(z).conj())
        }
    }
}

fn closed_form(f: &FockFunction, g: &FockFunction) -> Result<Complex64> {
    if let Some(dg) = g.decomposition() {
        let mut acc: Complex64 = dg
            .terms
            .iter()
            .map(|t| t.coeff.conj() * f.weighted_complex(t.center))
            .sum();
        if let Some(s) = dg.sigma3 {
            let df = f.decomposition().filter(|d| d.sigma3.is_none()).ok_or_else(|| {
                Error::UnsupportedMethod(format!(
                    "<{}, {}> pairs two sigma_3 parts",
                    f.label(),
                    g.label()
                ))
            })?;
            let cfg = g.sigma.as_ref().ok_or_else(|| {
                Error::Precondition(format!("{} lacks its sigma configuration", g.label()))
            })?;
            // <f, sigma3> = sum_j c_j conj(sigma3(lambda_j)) for f = sum_j c_j kk_j.
            let sigma_part: Complex64 = df
                .terms
                .iter()
                .map(|t| t.coeff * cfg.sigma3_weighted(t.center).to_complex().conj())
                .sum();
            acc += s.conj() * sigma_part;
        }
        return Ok(acc);
    }
    if f.decomposition().is_some() {
        return closed_form(g, f).map(|v| v.conj());
    }
    Err(Error::UnsupportedMethod(format!(
        "neither {} nor {} has a kernel decomposition",
        f.label(),
        g.label()
    )))
}

/// `||f||`, by the reproducing property when `f` is a finite kernel sum.
pub fn norm(f: &FockFunction, spec: &QuadratureSpec) -> Result<f64> {
    if let Some(d) = f.decomposition().filter(|d| d.sigma3.is_none()) {
        return Ok(d.kernel_gram(d).re.max(0.0).sqrt());
    }
    let r = inner_product(f, f, InnerMethod::Quadrature, spec)?;
    Ok(r.value.re.max(0.0).sqrt())
}
