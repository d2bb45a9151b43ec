//! Acceptance criteria 1–10. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::{Duration, Instant};

use eventloc::observables::ATermRoute;
use eventloc::pov::{quasi_baricentric_density_at, GammaLabel};
use eventloc::scalar::C;
use eventloc::{
    abc_terms, apply_xi_filter, build_generators, certify_kernel, density, density_at, lorentz_of_sl2c, make_packet,
    mean_coordinates_abc, mean_coordinates_moment, proper_time_delay, wigner_boost, Channel, ChannelTable, Envelope,
    FourVector, HalfInt, IrrepLabel, Kernel, MomentumGrid, MuFunction, PacketSpec, PoincareEntry, PoincareKernel,
    Sl2c, SpacetimeGrid, TranslationKernel, WaveFunction,
};
use eventloc_cli::{bundled, run_scenario, Status};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn within(t: Instant, budget: Duration) -> bool {
    t.elapsed() <= budget
}

fn gaussian_1d(grid: &Arc<MomentumGrid<f64>>, k0: f64, w: f64) -> WaveFunction<f64> {
    WaveFunction::from_fn(grid.clone(), ChannelTable::scalar(1), |_, k| {
        C::new((-(k.get(0) - k0).powi(2) / (2.0 * w * w)).exp(), 0.0)
    })
    .unwrap()
    .normalized()
    .unwrap()
}

fn box4(k0: f64, h: f64, panels: usize, order: usize) -> Arc<MomentumGrid<f64>> {
    Arc::new(MomentumGrid::from_box(&[k0 - h, -h, -h, -h], &[k0 + h, h, h, h], &[panels; 4], order).unwrap())
}

fn packet4(grid: &Arc<MomentumGrid<f64>>, center: [f64; 4], cutoff: f64, channels: Vec<(Channel, C<f64>)>) -> WaveFunction<f64> {
    let spec = PacketSpec {
        envelope: Envelope::Gaussian { center: center.to_vec(), width: vec![0.5; 4], cutoff },
        displacement: None,
        coefficients: channels,
    };
    make_packet(grid.clone(), &spec).unwrap()
}

fn phase(coeff: f64) -> MuFunction<f64> {
    MuFunction::Phase { amplitude: 1.0, coeff, power: 1.0 }
}

fn scalar_quasi(f: MuFunction<f64>) -> PoincareKernel<f64> {
    PoincareKernel::quasi(1, vec![(HalfInt::ZERO, vec![(1.0, vec![f])])], HalfInt::ZERO).unwrap()
}

fn random_sl2c(rng: &mut ChaCha8Rng) -> Sl2c<f64> {
    Sl2c::exp_sigma(std::array::from_fn(|_| C::new(rng.gen_range(-0.8..0.8), rng.gen_range(-2.0..2.0))))
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut boost = 0.0_f64;
    let mut hom = 0.0_f64;
    for _ in 0..100 {
        let mu = rng.gen_range(0.2..5.0);
        let p: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-4.0..4.0));
        let k = FourVector::new4((mu * mu + p.iter().map(|x| x * x).sum::<f64>()).sqrt(), p[0], p[1], p[2]);
        let image = lorentz_of_sl2c(&wigner_boost(&k).unwrap()).unwrap().apply(&FourVector::rest(mu)).unwrap();
        boost = boost.max((0..4).map(|a| (image.get(a) - k.get(a)).abs()).fold(0.0, f64::max));
        let (a, b) = (random_sl2c(&mut rng), random_sl2c(&mut rng));
        let lab = lorentz_of_sl2c(&(a * b)).unwrap();
        hom = hom.max(lab.max_abs_diff(&(lorentz_of_sl2c(&a).unwrap() * lorentz_of_sl2c(&b).unwrap())));
    }
    let ok = boost < 1e-12 && hom < 1e-12 && within(t, Duration::from_secs(1));
    outcome(ok, format!("boost {boost:.2e}, homomorphism {hom:.2e}, {:?}", t.elapsed()))
}

fn criterion_2() -> Outcome {
    let t = Instant::now();
    let labels = [(HalfInt::ZERO, C::new(1.0, 0.0)), (HalfInt::int(1), C::new(0.0, 0.0)), (HalfInt::ZERO, C::new(0.0, 2.0))];
    let mut worst = 0.0_f64;
    for (m, c) in labels {
        let irrep = build_generators(IrrepLabel::new(m, c).unwrap(), HalfInt::int(6)).unwrap();
        worst = worst.max(irrep.certify().max_residual());
    }
    outcome(worst < 1e-10 && within(t, Duration::from_secs(5)), format!("max residual {worst:.2e}, {:?}", t.elapsed()))
}

fn criterion_3() -> Outcome {
    let t = Instant::now();
    // d = 1: panel width 1, so shifting by whole panels maps nodes onto nodes
    let g = Arc::new(MomentumGrid::from_box(&[1.0], &[11.0], &[20], 10).unwrap());
    let base = gaussian_1d(&g, 6.0, 0.5);
    let two = WaveFunction::from_fn(g.clone(), ChannelTable::scalar(2), |c, k| {
        let i = g.nodes().iter().position(|n| n == k).unwrap();
        base.amplitude(0, i) * if c.sigma == 0 { C::new(0.6, 0.0) } else { C::new(0.0, 0.8) }
    })
    .unwrap();
    let kernel = Kernel::Translation(TranslationKernel::rotation(0.3, 1.0));
    let order = 10;
    let x = SpacetimeGrid::from_box(&[-15.0], &[15.0], &[30], order).unwrap();
    let rho = density(&two, &kernel, &x).unwrap();
    let mut err1 = 0.0_f64;
    for panels in [-3i64, 2, 5] {
        let y = FourVector::new(&[panels as f64]).unwrap();
        let moved = density(&two.apply_translation(&y).unwrap(), &kernel, &x).unwrap();
        let s = panels * order as i64;
        for i in 0..x.len() as i64 {
            if (0..x.len() as i64).contains(&(i - s)) {
                err1 = err1.max((moved.values()[i as usize] - rho.values()[(i - s) as usize]).abs());
            }
        }
    }
    let t1 = t.elapsed();
    // d = 4: generic shift, interpolated comparison
    let g4 = box4(10.0, 3.0, 2, 6);
    let psi = packet4(&g4, [10.0, 0.0, 0.0, 0.0], 6.0, vec![(Channel::scalar(0), C::new(1.0, 0.0))]);
    let k4 = Kernel::Poincare(scalar_quasi(phase(0.5)));
    let x4 = SpacetimeGrid::centered(&[7.0; 4], 2, 8).unwrap();
    let y = FourVector::new4(0.4, -0.3, 0.25, 0.1);
    let base4 = density(&psi, &k4, &x4).unwrap();
    let moved4 = density(&psi.apply_translation(&y).unwrap(), &k4, &x4).unwrap();
    let mut err4 = 0.0_f64;
    for i in 0..x4.len() {
        if let Some(v) = base4.interpolate(&(x4.point(i) - y)) {
            err4 = err4.max((v - moved4.values()[i]).abs());
        }
    }
    let ok = err1 < 1e-8 && err4 < 1e-3 && t1 <= Duration::from_secs(30) && within(t, Duration::from_secs(300));
    outcome(ok, format!("d=1 sup {err1:.2e} ({t1:?}), d=4 sup {err4:.2e} ({:?})", t.elapsed()))
}

fn criterion_4() -> Outcome {
    let g = Arc::new(MomentumGrid::from_box(&[1.0], &[11.0], &[20], 10).unwrap());
    let base = gaussian_1d(&g, 6.0, 0.5);
    let two = WaveFunction::from_fn(g.clone(), ChannelTable::scalar(2), |c, k| {
        let i = g.nodes().iter().position(|n| n == k).unwrap();
        base.amplitude(0, i) * if c.sigma == 0 { C::new(0.6, 0.0) } else { C::new(0.0, 0.8) }
    })
    .unwrap();
    let table = MuFunction::table(
        (0..12).map(|i| 0.5 + i as f64).collect(),
        (0..12).map(|i| C::from_polar(0.9, 0.3 * i as f64)).collect(),
    )
    .unwrap();
    let x = SpacetimeGrid::centered(&[30.0], 20, 12).unwrap();
    let catalog: Vec<(&str, Kernel<f64>, &WaveFunction<f64>)> = vec![
        ("flat", Kernel::Translation(TranslationKernel::flat(1)), &base),
        ("phase", Kernel::Translation(TranslationKernel::phase(0.8, 1.0)), &base),
        ("quadratic_phase", Kernel::Translation(TranslationKernel::phase(0.1, 2.0)), &base),
        ("rotation", Kernel::Translation(TranslationKernel::rotation(0.5, 1.0)), &two),
        ("table", Kernel::Translation(TranslationKernel::new(1, 1, vec![table]).unwrap()), &base),
        ("flat_half", Kernel::Translation(TranslationKernel::flat(1).scaled(0.5)), &base),
    ];
    let mut bound = f64::NEG_INFINITY;
    let mut norm_err = 0.0_f64;
    let mut judged = 0;
    for (_, k, psi) in &catalog {
        let f = density(psi, k, &x).unwrap();
        let n = psi.norm_squared();
        bound = bound.max(f.total() - n);
        if certify_kernel(k, psi.grid().masses()).isometric && f.capture_fraction() >= 0.999 {
            norm_err = norm_err.max((f.total() - n).abs());
            judged += 1;
        }
    }
    // d = 4 catalog entry through the bundled scenario
    let run = run_scenario(&bundled::load("qb4d_j0").unwrap(), Some(&[eventloc_cli::Pipeline::Certify, eventloc_cli::Pipeline::Density])).unwrap();
    let d = &run.report.body["density"];
    let (total, n4) = (d["total"].as_f64().unwrap(), d["state_norm"].as_f64().unwrap());
    bound = bound.max(total - n4);
    norm_err = norm_err.max((total - n4).abs());
    judged += 1;
    let ok = bound <= 1e-6 && norm_err < 1e-4 && judged == 5;
    outcome(ok, format!("max ∫ρ − ‖ψ‖² {bound:.2e}, normalization {norm_err:.2e} over {judged} isometric cases"))
}

fn criterion_5() -> Outcome {
    let (k0, w): (f64, f64) = (8.0, 0.5);
    let (kmin, kmax) = (k0 - 12.0 * w, k0 + 12.0 * w);
    let g = Arc::new(MomentumGrid::from_box(&[kmin], &[kmax], &[24], 12).unwrap());
    let psi = WaveFunction::from_fn(g, ChannelTable::scalar(1), |_, k| C::new((-(k.get(0) - k0).powi(2) / (2.0 * w * w)).exp(), 0.0)).unwrap();
    let n = 512;
    let dk = (kmax - kmin) / n as f64;
    let mut buf: Vec<C<f64>> =
        (0..n).map(|i| C::new((-(kmin + i as f64 * dk - k0).powi(2) / (2.0 * w * w)).exp(), 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    // x_m = 2πm / (n dk) is commensurate with the FFT frequencies
    let (mut xs, mut oracle) = (Vec::new(), Vec::new());
    for m in -40i64..=40 {
        let x = 2.0 * PI * m as f64 / (n as f64 * dk);
        let v = buf[m.rem_euclid(n as i64) as usize] * C::from_polar(1.0, -x * kmin) * dk / (2.0 * PI).sqrt();
        xs.push(FourVector::new(&[x]).unwrap());
        oracle.push(v.norm_sqr());
    }
    let rho = density_at(&psi, &Kernel::Translation(TranslationKernel::flat(1)), &xs, None).unwrap();
    let err = sup_diff(&rho, &oracle);
    outcome(err < 1e-8, format!("sup |ρ − |FFT|²| {err:.2e}"))
}

fn criterion_6() -> Outcome {
    let run = run_scenario(&bundled::load("qb4d_j0").unwrap(), None).unwrap();
    let diffs = run.report.body["coords"]["differences"].as_array().unwrap().clone();
    let routes = diffs.len();
    let worst = diffs.iter().map(|d| d["max_difference"].as_f64().unwrap()).fold(0.0, f64::max);
    // shift law in d = 1
    let g = Arc::new(MomentumGrid::from_box(&[1.0], &[11.0], &[40], 12).unwrap());
    let psi = gaussian_1d(&g, 6.0, 0.5);
    let k = Kernel::Translation(TranslationKernel::phase(0.8, 1.0));
    let x = SpacetimeGrid::centered(&[30.0], 40, 12).unwrap();
    let mut shift = 0.0_f64;
    for y in [2.5, -1.25] {
        let moved = psi.apply_translation(&FourVector::new(&[y]).unwrap()).unwrap();
        let a = mean_coordinates_abc(&moved, &k).unwrap().values[0].re - mean_coordinates_abc(&psi, &k).unwrap().values[0].re;
        let m = mean_coordinates_moment(&density(&moved, &k, &x).unwrap()).values[0].re
            - mean_coordinates_moment(&density(&psi, &k, &x).unwrap()).values[0].re;
        shift = shift.max((a - y).abs()).max((m - y).abs());
    }
    let ok = routes == 3 && worst < 1e-3 && shift < 1e-8 && run.status == Status::Ok;
    outcome(ok, format!("{routes} route pairs, max difference {worst:.2e}; d=1 shift law {shift:.2e}"))
}

fn criterion_7() -> Outcome {
    let g = box4(10.0, 3.0, 1, 8);
    let psi = packet4(&g, [10.0, 0.3, 0.0, -0.2], 5.0, vec![(Channel::scalar(0), C::new(1.0, 0.0))]);
    let k = Kernel::Poincare(scalar_quasi(MuFunction::Constant(C::new(0.6, 0.8))));
    let b = abc_terms(&psi, &k, ATermRoute::Auto).unwrap().b.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mus: Vec<f64> = (0..65).map(|i| 2.0 + 0.2 * i as f64).collect();
    let t = proper_time_delay(&k, &mus).unwrap().max_abs();
    let g1 = Arc::new(MomentumGrid::from_box(&[1.0], &[11.0], &[20], 10).unwrap());
    let flat = Kernel::Translation(TranslationKernel::flat(1));
    let b1 = abc_terms(&gaussian_1d(&g1, 6.0, 0.5), &flat, ATermRoute::Auto).unwrap().b[0].norm();
    let t1 = proper_time_delay(&flat, &mus).unwrap().max_abs();
    let worst = b.max(t).max(b1).max(t1);
    outcome(worst <= f64::EPSILON, format!("max |B|, |T| {worst:.2e}"))
}

fn criterion_8() -> Outcome {
    let g = box4(10.0, 3.0, 1, 6);
    let scalar = packet4(&g, [10.0, 0.2, 0.0, 0.1], 5.0, vec![(Channel::scalar(0), C::new(1.0, 0.0))]);
    let strict = PoincareKernel::new(
        1,
        vec![PoincareEntry {
            gamma: GammaLabel { nu: 0, irrep: IrrepLabel::new(HalfInt::ZERO, C::new(1.0, 0.0)).unwrap() },
            omega: 1.0,
            j: HalfInt::ZERO,
            row: vec![phase(0.3)],
        }],
        HalfInt::ZERO,
    )
    .unwrap();
    let killed = apply_xi_filter(&scalar, &strict, &|xi: f64| if xi.abs() < 1e-3 { 0.0 } else { 1.0 }).unwrap();
    let alive = apply_xi_filter(&scalar, &strict, &|_| 1.0).unwrap();
    // cross-j additivity for a quasi kernel carrying j = 0 and j = 1
    let quasi = PoincareKernel::quasi(
        1,
        vec![(HalfInt::ZERO, vec![(1.0, vec![phase(0.4)])]), (HalfInt::int(1), vec![(1.0, vec![MuFunction::constant(1.0)])])],
        HalfInt::int(12),
    )
    .unwrap();
    let g2 = box4(10.0, 2.5, 1, 6);
    let s0 = packet4(&g2, [10.0, 0.0, 0.0, 0.0], 4.0, vec![(Channel::scalar(0), C::new(1.0, 0.0))]);
    let j = HalfInt::int(1);
    let w = [C::new(0.3, 0.1), C::new(0.5, 0.0), C::new(-0.2, 0.6)];
    let s1 = packet4(&g2, [10.0, 0.3, -0.2, 0.1], 4.0, j.projections().zip(w).map(|(m, w)| (Channel::new(0, j, m).unwrap(), w)).collect());
    let mixed = s0.superpose(&s1).unwrap();
    let pts: Vec<FourVector<f64>> = (0..12).map(|i| FourVector::new4(0.3 * i as f64 - 1.5, 0.2, -0.1 * i as f64, 0.4)).collect();
    let r0 = quasi_baricentric_density_at(&s0, &quasi, &pts).unwrap();
    let r1 = quasi_baricentric_density_at(&s1, &quasi, &pts).unwrap();
    let rm = density_at(&mixed, &Kernel::Poincare(quasi), &pts, None).unwrap();
    let sum: Vec<f64> = r0.iter().zip(&r1).map(|(a, b)| a + b).collect();
    let add = sup_diff(&rm, &sum);
    let ok = killed.abs() < 1e-12 && alive > 1e-6 && add < 1e-8;
    outcome(ok, format!("filtered ρ(0) {killed:.2e} (unfiltered {alive:.2e}), additivity {add:.2e}"))
}

fn criterion_9() -> Outcome {
    let t = Instant::now();
    let flat = run_scenario(&bundled::load("toa1d_flat").unwrap(), Some(&[eventloc_cli::Pipeline::Definiteness])).unwrap();
    let quad = run_scenario(&bundled::load("toa1d_quadratic").unwrap(), Some(&[eventloc_cli::Pipeline::Definiteness])).unwrap();
    let f = &flat.report.body["definiteness"];
    let p: Vec<f64> = f["probe"]["probabilities"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    let exponent = f["probe"]["width_exponents"][0].as_f64().unwrap();
    let non_decreasing = p.windows(2).all(|w| w[1] >= w[0]);
    let counter = !quad.report.body["definiteness"]["definite_trend"].as_bool().unwrap();
    let ok = non_decreasing && p[4] > 0.99 && (exponent - 1.0).abs() <= 0.1 && counter && within(t, Duration::from_secs(60));
    outcome(ok, format!("P = {p:.4?}, p = {exponent:.4}, counterexample fails trend: {counter}, {:?}", t.elapsed()))
}

fn criterion_10() -> Outcome {
    let mut same = 0;
    let names = bundled::names();
    for name in &names {
        let c = bundled::load(name).unwrap();
        let a = run_scenario(&c, None).unwrap();
        let b = run_scenario(&c, None).unwrap();
        let bytes = |r: &eventloc_cli::RunOutcome| serde_json::to_vec(&r.report.body).unwrap();
        if bytes(&a) == bytes(&b) && a.report.body_sha256 == b.report.body_sha256 && a.report.verify() && a.exports == b.exports {
            same += 1;
        }
    }
    outcome(same == names.len(), format!("{same}/{} bundled scenarios byte-identical", names.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("kinematics", criterion_1),
        ("irrep certification", criterion_2),
        ("translation covariance", criterion_3),
        ("boundedness and normalization", criterion_4),
        ("Fourier oracle", criterion_5),
        ("three-route coordinates", criterion_6),
        ("B-term vanishing", criterion_7),
        ("strict annihilation and additivity", criterion_8),
        ("definiteness scaling", criterion_9),
        ("reproducibility", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = std::panic::catch_unwind(f).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            outcome(false, format!("panicked: {}", msg.unwrap_or_default()))
        });
        println!("criterion {:>2} {} {name}: {}", i + 1, if o.passed { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.passed);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
