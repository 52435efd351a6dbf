use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use proptest::prelude::*;

use super::*;
use crate::counterexample::{construct, ConstructionParams};
use crate::weierstrass::SigmaConfig;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn spectrum(points: &[Complex64]) -> Vec<f64> {
    let spec = MixedSystemSpec::kernels(points, vec![points.len()]).unwrap();
    defect_scan(&spec).unwrap().remove(0).singular_values
}

#[test]
fn two_kernels() {
    let spec = MixedSystemSpec::kernels(&[c(0.0, 0.0), c(3.0, 0.0)], vec![1, 2]).unwrap();
    let g = gram_matrix(&spec, 2).unwrap();
    let off = (-9.0 * PI / 2.0).exp();
    assert!((off - 7.3e-7).abs() < 1e-8);
    assert!((g.matrix[(0, 1)] - c(off, 0.0)).norm() < 1e-15 * off);
    assert!((g.matrix[(1, 0)] - c(off, 0.0)).norm() < 1e-15 * off);
    assert_eq!(g.matrix[(0, 0)], c(1.0, 0.0));
    let reports = defect_scan(&spec).unwrap();
    assert_eq!(reports[0].sigma_min, 1.0);
    assert_eq!(reports[0].sigma_2min, None);
    assert!((reports[1].sigma_min - (1.0 - off)).abs() < 1e-14);
    assert!((reports[1].singular_values[0] - (1.0 + off)).abs() < 1e-14);
}

#[test]
fn duplicate_vector_is_singular() {
    let pts = [c(0.2, 0.1), c(1.7, -0.4), c(0.2, 0.1)];
    let r = defect_scan(&MixedSystemSpec::kernels(&pts, vec![3]).unwrap()).unwrap().remove(0);
    assert!(r.sigma_min < 1e-10);
    // The null direction is the difference of the two copies.
    let n = &r.null_vector;
    assert!((n[0] + n[2]).norm() < 1e-8 && n[1].norm() < 1e-8);
    assert!((n.iter().map(|v| v.norm_sqr()).sum::<f64>() - 1.0).abs() < 1e-12);
}

#[test]
fn separated_kernels_stay_well_conditioned() {
    let pts: Vec<Complex64> = (-2..=2)
        .flat_map(|a| (-2..=2).map(move |b| c(2.0 * a as f64 + 0.5, 2.0 * b as f64 + 0.5)))
        .collect();
    let mut sorted = pts.clone();
    sorted.sort_by(by_modulus);
    let spec = MixedSystemSpec::kernels(&sorted, vec![8, 12, 16, 25]).unwrap();
    let bound = gershgorin_bound(&sorted);
    assert!(bound > 0.99);
    for r in defect_scan(&spec).unwrap() {
        assert!(r.sigma_min >= bound && r.sigma_min >= 0.5);
        assert!(r.factorization_gap < 1e-9);
        assert!(r.asymmetry < 1e-15);
    }
}

#[test]
fn lattice_sections_degrade() {
    // Kernels on the critical lattice: finite sections lose conditioning.
    let mut pts: Vec<Complex64> = (-4..=4).flat_map(|a| (-4..=4).map(move |b| c(a as f64, b as f64))).collect();
    pts.sort_by(by_modulus);
    let spec = MixedSystemSpec::kernels(&pts, vec![9, 25, 49, 81]).unwrap();
    let reports = defect_scan(&spec).unwrap();
    assert!(interlacing_holds(&reports));
    assert!(reports[3].sigma_min < reports[0].sigma_min);
}

#[test]
fn correlation_examples() {
    let pts = [c(0.0, 0.0), c(1.0, 0.5), c(-0.5, 1.0), c(0.5, 0.5)];
    let spec = MixedSystemSpec::kernels(&pts, vec![4]).unwrap();
    let r = defect_scan(&spec).unwrap().remove(0);
    let combo = pts
        .iter()
        .zip(&r.null_vector)
        .map(|(p, a)| FockFunction::kernel(*p).scaled(*a))
        .reduce(|x, y| x.plus(&y))
        .unwrap();
    assert!((null_vector_correlation(&spec, &r, &combo, None).unwrap() - 1.0).abs() < 1e-9);
    let far = c(9.0, 0.0);
    let dist = pts.iter().map(|p| (p - far).norm()).fold(f64::INFINITY, f64::min);
    let got = null_vector_correlation(&spec, &r, &FockFunction::kernel(far), None).unwrap();
    // |<c, kk>| <= sum |a_i| e^{-pi d^2/2} <= 2 e^{-pi d^2/2} and ||c|| = sqrt(sigma_min).
    assert!(got <= 2.0 * (-PI * dist * dist / 2.0).exp() / r.sigma_min.sqrt() + 1e-15);
    assert!(null_vector_correlation(&spec, &r, &FockFunction::kernel(far).scaled(c(0.0, 0.0)), None).is_err());
}

#[test]
fn preconditions() {
    assert!(MixedSystemSpec::kernels(&[c(0.0, 0.0)], vec![2]).is_err());
    assert!(MixedSystemSpec::kernels(&[c(0.0, 0.0), c(1.0, 0.0)], vec![2, 1]).is_err());
    assert!(MixedSystemSpec::kernels(&[c(0.0, 0.0)], vec![]).is_err());
}

fn construction() -> &'static ConstructionResult {
    static R: OnceLock<ConstructionResult> = OnceLock::new();
    R.get_or_init(|| {
        let cfg = Arc::new(SigmaConfig::new(SigmaConfig::DEFAULT_RADIUS).unwrap());
        construct(cfg, &ConstructionParams::new(8, 3).unwrap()).unwrap()
    })
}

#[test]
fn mixed_sections_of_the_construction() {
    let r = construction();
    let spec = MixedSystemSpec::from_construction(r, vec![8, 12, 16]).unwrap();
    let kinds: Vec<MemberKind> = spec.members.iter().map(|m| m.kind).collect();
    assert_eq!(&kinds[..7], &[
        MemberKind::Kernel,
        MemberKind::Quotient,
        MemberKind::Kernel,
        MemberKind::Quotient,
        MemberKind::Kernel,
        MemberKind::Quotient,
        MemberKind::Kernel
    ]);
    assert_eq!(spec.lambda1.len(), 3);
    let g = gram_matrix(&spec, 16).unwrap();
    for i in 0..16 {
        assert!((g.matrix[(i, i)] - c(1.0, 0.0)).norm() < 1e-12);
        for j in 0..16 {
            // Quotients vanish on the kernel points.
            if kinds[i] != kinds[j] {
                assert!(g.matrix[(i, j)].norm() < 1e-10, "({i}, {j}) {}", g.matrix[(i, j)]);
            }
        }
    }
    let reports = defect_scan(&spec).unwrap();
    assert!(interlacing_holds(&reports));
    for rep in &reports {
        assert!(rep.factorization_gap < 1e-9);
        assert!(rep.sigma_2min.unwrap() >= rep.sigma_min);
    }
    // H is orthogonal to the quotients, F to the kernels.
    let h = r.tables.tabulate_expansion(r.h.decomposition().unwrap()).unwrap();
    for m in spec.members.iter().filter(|m| m.kind == MemberKind::Quotient) {
        let p = spec.grid.as_ref().unwrap().inner(m.table.as_ref().unwrap(), &h).unwrap();
        assert!(p.value.norm() <= 1e-6);
    }
    let rho = null_vector_correlation(&spec, &reports[2], &r.f, Some(&r.tables.f)).unwrap();
    assert!((0.0..=1e-8).contains(&rho), "{rho}");
    let rho = null_vector_correlation(&spec, &reports[2], &r.h, Some(&h)).unwrap();
    assert!((0.0..=1.0).contains(&rho));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn permutation_invariance(xs in proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 2..9), seed in 0usize..1000) {
        let pts: Vec<Complex64> = xs.iter().map(|(a, b)| c(*a, *b)).collect();
        let mut shuffled = pts.clone();
        let n = shuffled.len();
        for k in 0..n {
            shuffled.swap(k, (seed * 7 + k * 13) % n);
        }
        let a = spectrum(&pts);
        let b = spectrum(&shuffled);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn appending_never_raises_sigma_min(xs in proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 2..10)) {
        let pts: Vec<Complex64> = xs.iter().map(|(a, b)| c(*a, *b)).collect();
        let sizes: Vec<usize> = (1..=pts.len()).collect();
        let reports = defect_scan(&MixedSystemSpec::kernels(&pts, sizes).unwrap()).unwrap();
        prop_assert!(interlacing_holds(&reports));
        for r in &reports {
            prop_assert!(r.singular_values.windows(2).all(|w| w[0] >= w[1]));
            prop_assert!(r.sigma_min >= -1e-15);
            prop_assert!(r.factorization_gap < 1e-9, "{:?} {:?}", r.singular_values, r.factorization_gap);
        }
    }
}

