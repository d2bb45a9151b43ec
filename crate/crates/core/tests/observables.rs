mod common;

use std::sync::Arc;

use common::{box4, packet4};
use eventloc::observables::{fornberg_first_derivative, time_delay_at, EstimateStatus};
use eventloc::pov::{certify_poincare_sectors, GammaLabel};
use eventloc::scalar::C;
use eventloc::{
    abc_terms, apply_xi_filter, casimir_values, classify_kernel, density, density_at, mean_coordinates_abc,
    mean_coordinates_moment, mean_coordinates_operator, proper_time_delay, xi_argument, ATermRoute, BaricentricClass,
    Channel, ChannelTable, Error, FourVector, HalfInt, IrrepLabel, Kernel, MomentumGrid, MuFunction, PoincareEntry,
    PoincareKernel, SpacetimeGrid, TranslationKernel, WaveFunction,
};
use proptest::prelude::*;

fn gaussian_1d(grid: &Arc<MomentumGrid<f64>>, k0: f64, w: f64, x0: f64) -> WaveFunction<f64> {
    WaveFunction::from_fn(grid.clone(), ChannelTable::scalar(1), |_, k| {
        let kk = k.get(0);
        C::from_polar((-(kk - k0).powi(2) / (2.0 * w * w)).exp(), kk * x0)
    })
    .unwrap()
    .normalized()
    .unwrap()
}

fn grid_1d() -> Arc<MomentumGrid<f64>> {
    Arc::new(MomentumGrid::from_box(&[1.0], &[11.0], &[20], 10).unwrap())
}

fn flat() -> Kernel<f64> {
    Kernel::Translation(TranslationKernel::flat(1))
}

fn scalar_quasi(f: MuFunction<f64>) -> PoincareKernel<f64> {
    PoincareKernel::quasi(1, vec![(HalfInt::ZERO, vec![(1.0, vec![f])])], HalfInt::ZERO).unwrap()
}

fn phase(coeff: f64, power: f64) -> MuFunction<f64> {
    MuFunction::Phase { amplitude: 1.0, coeff, power }
}

fn strict_kernel() -> PoincareKernel<f64> {
    let label = IrrepLabel::new(HalfInt::ZERO, C::new(-1.0, 0.0)).unwrap();
    PoincareKernel::new(
        1,
        vec![PoincareEntry { gamma: GammaLabel { nu: 0, irrep: label }, omega: 1.0, j: HalfInt::ZERO, row: vec![phase(0.3, 1.0)] }],
        HalfInt::ZERO,
    )
    .unwrap()
}

/// Quasi-baricentric kernel carrying `j = 0` (phase) and `j = 1` (constant).
fn quasi_01(truncation: i32) -> PoincareKernel<f64> {
    PoincareKernel::quasi(
        1,
        vec![(HalfInt::ZERO, vec![(1.0, vec![phase(0.5, 1.0)])]), (HalfInt::int(1), vec![(1.0, vec![phase(-0.2, 1.0)])])],
        HalfInt::int(truncation),
    )
    .unwrap()
}

fn spin_one_packet(g: &Arc<MomentumGrid<f64>>, center: [f64; 4], width: f64, cutoff: f64) -> WaveFunction<f64> {
    let j = HalfInt::int(1);
    let w = [C::new(0.3, 0.1), C::new(0.5, 0.0), C::new(-0.2, 0.6)];
    packet4(g, center, width, cutoff, j.projections().zip(w).map(|(m, w)| (Channel::new(0, j, m).unwrap(), w)).collect())
}

fn re_diff(a: &[C<f64>], b: &[C<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x.re - y.re).abs()).fold(0.0, f64::max)
}

#[test]
fn moment_route_d1_symmetric_and_shifted() {
    let g = grid_1d();
    let x = SpacetimeGrid::centered(&[30.0], 20, 12).unwrap();
    let sym = mean_coordinates_moment(&density(&gaussian_1d(&g, 6.0, 0.5, 0.0), &flat(), &x).unwrap());
    assert!(sym.values[0].norm() < 1e-10, "{:?}", sym.values);
    assert_eq!(sym.diagnostics.status, EstimateStatus::Ok);
    // a phase e^{ik x0} moves the packet to x0
    let moved = mean_coordinates_moment(&density(&gaussian_1d(&g, 6.0, 0.5, 2.5), &flat(), &x).unwrap());
    assert!((moved.values[0].re - 2.5).abs() < 1e-6, "{:?}", moved.values);
}

#[test]
fn moment_route_flags_poor_capture() {
    let g = grid_1d();
    let x = SpacetimeGrid::centered(&[2.0], 4, 10).unwrap();
    let est = mean_coordinates_moment(&density(&gaussian_1d(&g, 6.0, 0.5, 0.0), &flat(), &x).unwrap());
    assert_eq!(est.diagnostics.status, EstimateStatus::Warning);
    assert!(est.diagnostics.capture_fraction.unwrap() < 0.999);
}

#[test]
fn translation_shift_law_d1() {
    let g = grid_1d();
    let x = SpacetimeGrid::centered(&[30.0], 20, 12).unwrap();
    let kernel = Kernel::Translation(TranslationKernel::phase(0.7, 1.0));
    let psi = gaussian_1d(&g, 6.0, 0.5, 0.0);
    let base = density(&psi, &kernel, &x).unwrap();
    for y in [0.4, -3.0, 5.5] {
        let f = density(&psi.apply_translation(&FourVector::new(&[y]).unwrap()).unwrap(), &kernel, &x).unwrap();
        let shift = mean_coordinates_moment(&f).values[0].re - mean_coordinates_moment(&base).values[0].re;
        assert!((shift - y * base.total()).abs() < 1e-8, "{shift} vs {y}");
    }
}

#[test]
fn abc_route_d1_matches_moment() {
    let g = grid_1d();
    let x = SpacetimeGrid::centered(&[30.0], 20, 12).unwrap();
    let psi = gaussian_1d(&g, 6.0, 0.5, 1.5);
    for (kernel, b_expected) in [(flat(), 0.0), (Kernel::Translation(TranslationKernel::phase(0.7, 1.0)), 0.7)] {
        let abc = mean_coordinates_abc(&psi, &kernel).unwrap();
        let terms = abc.diagnostics.terms.as_ref().unwrap();
        // d = 1: k_0/μ = 1 and T = b
        assert!((terms.b[0].re - b_expected).abs() < 1e-9, "{:?}", terms.b);
        assert_eq!(terms.a[0], C::new(0.0, 0.0));
        let mom = mean_coordinates_moment(&density(&psi, &kernel, &x).unwrap());
        assert!(re_diff(&abc.values, &mom.values) < 1e-6, "{:?} {:?}", abc.values, mom.values);
        assert!(abc.diagnostics.max_imaginary < 1e-8);
    }
}

#[test]
fn mu_independent_kernel_has_no_b_term() {
    let g = box4(10.0, 3.0, 3.0, 1, 8);
    let psi = packet4(&g, [10.0, 0.3, 0.0, -0.2], 0.5, 5.0, vec![(Channel::scalar(0), C::new(1.0, 0.0))]);
    let k = Kernel::Poincare(scalar_quasi(MuFunction::Constant(C::new(0.6, 0.8))));
    let terms = abc_terms(&psi, &k, ATermRoute::Auto).unwrap();
    assert!(terms.b.iter().all(|b| b.norm() == 0.0), "{:?}", terms.b);
    let t = proper_time_delay(&k, &[1.0, 2.0, 3.0, 4.0]).unwrap();
    assert_eq!(t.max_abs(), 0.0);
    let g1 = grid_1d();
    let terms = abc_terms(&gaussian_1d(&g1, 6.0, 0.5, 0.0), &flat(), ATermRoute::Auto).unwrap();
    assert_eq!(terms.b[0], C::new(0.0, 0.0));
}

#[test]
fn three_routes_agree_d4_scalar() {
    let g = box4(10.0, 3.5, 3.5, 3, 8);
    let psi = packet4(&g, [10.0, 0.4, -0.3, 0.2], 0.5, 6.0, vec![(Channel::scalar(0), C::new(1.0, 0.0))]);
    let k = Kernel::Poincare(scalar_quasi(phase(0.5, 1.0)));
    let x = SpacetimeGrid::centered(&[7.5; 4], 3, 10).unwrap();
    let mom = mean_coordinates_moment(&density(&psi, &k, &x).unwrap());
    let abc = mean_coordinates_abc(&psi, &k).unwrap();
    let op = mean_coordinates_operator(&psi, &k).unwrap();
    assert!(mom.diagnostics.capture_fraction.unwrap() > 0.999, "{:?}", mom.diagnostics);
    assert!(abc.diagnostics.terms.as_ref().unwrap().a.iter().all(|a| a.norm() == 0.0));
    assert!(mom.max_difference(&abc) < 1e-3, "{:?} {:?}", mom.values, abc.values);
    assert!(mom.max_difference(&op) < 1e-3, "{:?} {:?}", mom.values, op.values);
    assert!(abc.max_difference(&op) < 1e-3, "{:?} {:?}", abc.values, op.values);
}

#[test]
fn spin_one_a_term_general_matches_simplified() {
    let g = box4(10.0, 3.0, 3.0, 1, 8);
    let psi = spin_one_packet(&g, [10.0, 0.5, -0.4, 0.3], 0.5, 5.0);
    let k = Kernel::Poincare(quasi_01(12));
    let simple = abc_terms(&psi, &k, ATermRoute::Auto).unwrap();
    let general = abc_terms(&psi, &k, ATermRoute::General).unwrap();
    assert_eq!(simple.a[0], C::new(0.0, 0.0));
    assert!(general.a[0].norm() < 1e-12, "{:?}", general.a);
    let diff = simple.a.iter().zip(&general.a).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let scale = simple.a.iter().map(|a| a.norm()).fold(0.0, f64::max);
    assert!(scale > 1e-3, "A term should not vanish for an orbiting spin-1 packet: {scale}");
    assert!(diff < 1e-10, "{diff}");
}

#[test]
fn spin_one_routes_agree() {
    let g = box4(10.0, 3.5, 3.5, 3, 8);
    let psi = spin_one_packet(&g, [10.0, 0.4, -0.3, 0.2], 0.5, 6.0);
    let k = Kernel::Poincare(quasi_01(12));
    let x = SpacetimeGrid::centered(&[7.5; 4], 3, 10).unwrap();
    let mom = mean_coordinates_moment(&density(&psi, &k, &x).unwrap());
    let abc = mean_coordinates_abc(&psi, &k).unwrap();
    let op = mean_coordinates_operator(&psi, &k).unwrap();
    assert!(abc.max_difference(&op) < 1e-8, "{:?} {:?}", abc.values, op.values);
    assert!(mom.max_difference(&abc) < 1e-3, "{:?} {:?}", mom.values, abc.values);
}

#[test]
fn rest_frame_parity_gives_zero_spatial_mean() {
    let g = box4(10.0, 2.5, 2.5, 2, 8);
    let psi = packet4(&g, [10.0, 0.0, 0.0, 0.0], 0.5, 5.0, vec![(Channel::scalar(0), C::new(1.0, 0.0))]);
    let op = mean_coordinates_operator(&psi, &Kernel::Poincare(scalar_quasi(phase(0.5, 1.0)))).unwrap();
    for r in 1..4 {
        assert!(op.values[r].norm() < 1e-10, "{:?}", op.values);
    }
    assert!((op.values[0].re - 0.5).abs() < 1e-3, "{:?}", op.values);
}

#[test]
fn derivative_routes_reject_bad_kernels() {
    let g = box4(10.0, 3.0, 3.0, 1, 6);
    let psi = spin_one_packet(&g, [10.0, 0.0, 0.0, 0.0], 0.5, 5.0);
    let scaled = PoincareKernel::quasi(1, vec![(HalfInt::int(1), vec![(1.0, vec![MuFunction::constant(0.5)])])], HalfInt::int(6)).unwrap();
    assert!(matches!(mean_coordinates_abc(&psi, &Kernel::Poincare(scaled)), Err(Error::KernelNotNormalized { .. })));
    let label = IrrepLabel::new(HalfInt::ZERO, C::new(0.0, 2.0)).unwrap();
    let neither = PoincareKernel::new(
        1,
        vec![PoincareEntry { gamma: GammaLabel { nu: 0, irrep: label }, omega: 1.0, j: HalfInt::int(1), row: vec![MuFunction::constant(1.0)] }],
        HalfInt::int(6),
    )
    .unwrap();
    assert!(matches!(mean_coordinates_operator(&psi, &Kernel::Poincare(neither)), Err(Error::KernelNotQuasiBaricentric)));
    assert!(matches!(mean_coordinates_operator(&psi, &flat()), Err(Error::KernelNotQuasiBaricentric)));
}

#[test]
fn strict_kernel_fails_normalization_on_spin_sectors() {
    let k = strict_kernel();
    assert_eq!(classify_kernel(&k), BaricentricClass::StrictBaricentric);
    let r = certify_poincare_sectors(&k, &[1.0, 2.0], &[HalfInt::ZERO, HalfInt::int(1)]);
    assert!(!r.isometric);
    assert_eq!(r.sectors[1].isometry_residual, 1.0);
    assert!(r.sectors[0].isometry_residual < 1e-14);
}

#[test]
fn classification_examples() {
    assert_eq!(classify_kernel(&strict_kernel()), BaricentricClass::StrictBaricentric);
    assert_eq!(classify_kernel(&quasi_01(4)), BaricentricClass::QuasiBaricentric);
    let label = IrrepLabel::new(HalfInt::ZERO, C::new(0.0, 2.0)).unwrap();
    let neither = PoincareKernel::new(
        1,
        vec![PoincareEntry { gamma: GammaLabel { nu: 0, irrep: label }, omega: 1.0, j: HalfInt::int(1), row: vec![MuFunction::constant(1.0)] }],
        HalfInt::int(4),
    )
    .unwrap();
    assert_eq!(classify_kernel(&neither), BaricentricClass::Neither);
}

#[test]
fn casimir_and_xi_values() {
    let strict = IrrepLabel::new(HalfInt::ZERO, C::new(1.0, 0.0)).unwrap();
    assert_eq!(xi_argument(2.0, HalfInt::ZERO, &strict), 0.0);
    let quasi = IrrepLabel::new(HalfInt::int(1), C::new(0.0, 0.0)).unwrap();
    assert!((xi_argument(2.0_f64, HalfInt::int(1), &quasi) - 0.5).abs() < 1e-15);
    let label = IrrepLabel::new(HalfInt::int(2), C::new(0.0, 1.5)).unwrap();
    let c = casimir_values(3.0, HalfInt::int(2), &label);
    assert_eq!(c.c1, 9.0);
    assert_eq!(c.c2, 54.0);
    assert!((c.c3 - C::new(4.0 - 2.25 - 1.0, 0.0)).norm() < 1e-14);
    assert!((c.c4 - C::new(-3.0, 0.0)).norm() < 1e-14);
}

#[test]
fn xi_filter_behaviour() {
    let g = box4(10.0, 3.0, 3.0, 1, 6);
    let scalar = packet4(&g, [10.0, 0.2, 0.0, 0.1], 0.5, 5.0, vec![(Channel::scalar(0), C::new(1.0, 0.0))]);
    let origin = [FourVector::new4(0.0, 0.0, 0.0, 0.0)];
    // f ≡ 1 leaves ρ(ψ, 0) unchanged
    let k = quasi_01(10);
    let plain = density_at(&scalar, &Kernel::Poincare(k.clone()), &origin, None).unwrap()[0];
    let one = apply_xi_filter(&scalar, &k, &|_| 1.0).unwrap();
    assert_eq!(plain, one);
    assert!(plain > 1e-6);
    // strict kernel: Ξ = 0 on its only sector
    let vanish_near_zero = |xi: f64| if xi.abs() < 1e-3 { 0.0 } else { 1.0 };
    let strict = apply_xi_filter(&scalar, &strict_kernel(), &vanish_near_zero).unwrap();
    assert!(strict.abs() < 1e-12);
    let unfiltered = apply_xi_filter(&scalar, &strict_kernel(), &|_| 1.0).unwrap();
    assert!(unfiltered > 1e-6);
    // quasi j = 1: Ξ = 2/μ² ≈ 0.02 on the packet; a filter supported below 1e-3 kills the sector
    let spin = spin_one_packet(&g, [10.0, 0.2, 0.0, 0.1], 0.5, 5.0);
    let killed = apply_xi_filter(&spin, &k, &|xi| if xi < 1e-3 { 1.0 } else { 0.0 }).unwrap();
    assert!(killed.abs() < 1e-12);
    assert!(apply_xi_filter(&spin, &k, &|_| 1.0).unwrap() > 1e-8);
}

#[test]
fn proper_time_delay_analytic() {
    let mus: Vec<f64> = (0..800).map(|i| 1.0 + 4.0 * i as f64 / 799.0).collect();
    let k = Kernel::Translation(TranslationKernel::new(1, 1, vec![phase(0.3, 2.0)]).unwrap());
    let t = proper_time_delay(&k, &mus).unwrap();
    let mats = t.sector(HalfInt::ZERO).unwrap();
    let err = mus.iter().zip(mats).map(|(mu, m)| (m[(0, 0)] - C::new(0.6 * mu, 0.0)).norm()).fold(0.0, f64::max);
    assert!(err < 1e-6, "{err}");
    let direct = time_delay_at(&k, HalfInt::ZERO, 2.0);
    assert!((direct[(0, 0)] - C::new(1.2, 0.0)).norm() < 1e-9);
    assert!(matches!(proper_time_delay(&k, &[1.0, 2.0]), Err(Error::TooFewNodes { needed: 3, got: 2 })));
}

#[test]
fn proper_time_delay_is_hermitian_for_catalog() {
    let mus: Vec<f64> = (0..200).map(|i| 1.0 + 4.0 * i as f64 / 199.0).collect();
    let catalog = vec![
        Kernel::Translation(TranslationKernel::flat(2)),
        Kernel::Translation(TranslationKernel::rotation(0.5, 1.0)),
        Kernel::Translation(TranslationKernel::phase(0.8, 1.0)),
        Kernel::Poincare(quasi_01(6)),
        Kernel::Poincare(strict_kernel()),
    ];
    for k in &catalog {
        let t = proper_time_delay(k, &mus).unwrap();
        assert!(t.hermiticity_residual() < 1e-8, "{k:?}: {}", t.hermiticity_residual());
    }
}

#[test]
fn fornberg_weights_are_exact_on_quartics() {
    let xs = [0.0, 0.3, 0.7, 1.2, 2.0];
    let w = fornberg_first_derivative(0.5, &xs);
    let p = |x: f64| 1.0 - 2.0 * x + 0.5 * x.powi(3) - 0.25 * x.powi(4);
    let dp = |x: f64| -2.0 + 1.5 * x * x - x.powi(3);
    let approx: f64 = xs.iter().zip(&w).map(|(x, w)| p(*x) * w).sum();
    assert!((approx - dp(0.5)).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn abc_shift_law_d1(y in -4.0..4.0f64, b in -1.0..1.0f64) {
        let g = Arc::new(MomentumGrid::from_box(&[1.0], &[11.0], &[40], 12).unwrap());
        let psi = gaussian_1d(&g, 6.0, 0.5, 0.0);
        let k = Kernel::Translation(TranslationKernel::phase(b, 1.0));
        let base = mean_coordinates_abc(&psi, &k).unwrap();
        let moved = mean_coordinates_abc(&psi.apply_translation(&FourVector::new(&[y]).unwrap()).unwrap(), &k).unwrap();
        let err = (moved.values[0].re - base.values[0].re - y).abs();
        prop_assert!(err < 1e-8, "{} {:?} {:?}", err, base.values, moved.values);
    }

    #[test]
    fn strict_sector_has_zero_xi(mu in 0.1..50.0f64, sign in prop::bool::ANY) {
        let label = IrrepLabel::new(HalfInt::ZERO, C::new(if sign { 1.0 } else { -1.0 }, 0.0)).unwrap();
        prop_assert_eq!(xi_argument(mu, HalfInt::ZERO, &label), 0.0);
    }
}
