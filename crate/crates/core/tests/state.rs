mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use eventloc::scalar::C;
use eventloc::{
    make_packet, Channel, ChannelTable, Envelope, Error, FourVector, HalfInt, MomentumGrid, MuFunction, PacketSpec,
    ResampleStatus, ScaledFamily, Sl2c, StateSnapshot, WaveFunction,
};
use proptest::prelude::*;

fn grid1(min: f64, max: f64, panels: usize, order: usize) -> Arc<MomentumGrid<f64>> {
    Arc::new(MomentumGrid::from_box(&[min], &[max], &[panels], order).unwrap())
}

fn gaussian_1d(grid: &Arc<MomentumGrid<f64>>, k0: f64, w: f64) -> WaveFunction<f64> {
    WaveFunction::from_fn(grid.clone(), ChannelTable::scalar(1), |_, k| {
        C::new((-(k.get(0) - k0).powi(2) / (2.0 * w * w)).exp(), 0.0)
    })
    .unwrap()
}

fn max_diff(a: &WaveFunction<f64>, b: &WaveFunction<f64>) -> f64 {
    a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[test]
fn zero_state_has_zero_norm() {
    let g = grid1(0.5, 3.0, 4, 6);
    assert_eq!(WaveFunction::zeros(g, ChannelTable::scalar(2)).unwrap().norm_squared(), 0.0);
}

#[test]
fn gaussian_norm_matches_closed_form() {
    let w = 0.3;
    let g = grid1(1e-9, 12.0 * w, 24, 10);
    let psi = gaussian_1d(&g, 5.0 * w, w);
    let exact = w * PI.sqrt();
    assert!((psi.norm_squared() / exact - 1.0).abs() < 1e-6, "{}", psi.norm_squared());
}

#[test]
fn scaled_family_norm_is_scale_independent() {
    let base = Arc::new(MomentumGrid::from_box(&[2.5, -2.0], &[8.0, 2.0], &[8, 6], 8).unwrap());
    let env = Envelope::Gaussian { center: vec![5.0, 0.0], width: vec![0.4, 0.25], cutoff: 6.0 };
    let s = 0.5_f64.sqrt();
    let fam = ScaledFamily::new(
        env,
        ChannelTable::scalar(2),
        vec![MuFunction::constant(s), MuFunction::Phase { amplitude: s, coeff: 0.3, power: 1.0 }],
        base,
    )
    .unwrap();
    for lambda in [1.0, 2.0, 4.0] {
        let psi = fam.realize(lambda).unwrap();
        assert!((psi.norm_squared() - 1.0).abs() < 1e-8, "λ = {lambda}: {}", psi.norm_squared());
    }
}

#[test]
fn family_support_scales_with_lambda() {
    let base = grid1(1.0, 5.0, 8, 8);
    let env = Envelope::bump(vec![3.0], vec![0.5]).unwrap();
    let fam = ScaledFamily::new(env, ChannelTable::scalar(1), vec![MuFunction::constant(1.0)], base).unwrap();
    let psi = fam.realize(2.0).unwrap();
    assert!((psi.norm_squared() - 1.0).abs() < 1e-8);
    let support: Vec<f64> = psi.support_nodes().iter().map(|&i| psi.grid().nodes()[i].get(0)).collect();
    let lo = support.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = support.iter().cloned().fold(0.0, f64::max);
    assert!(lo > 5.0 && hi < 7.0 && hi - lo > 1.6, "[{lo}, {hi}]");
}

#[test]
fn family_rejects_unnormalized_coefficients() {
    let base = grid1(1.0, 5.0, 4, 6);
    let env = Envelope::bump(vec![3.0], vec![0.5]).unwrap();
    let s = 0.5_f64.sqrt();
    let ok = vec![MuFunction::constant(s), MuFunction::constant(s)];
    let total: f64 = ok.iter().map(|c| c.eval(3.0).norm_sqr()).sum();
    assert!((total - 1.0).abs() < 1e-15);
    assert!(ScaledFamily::new(env.clone(), ChannelTable::scalar(2), ok, base.clone()).is_ok());
    let bad = vec![MuFunction::constant(0.5), MuFunction::constant(0.5)];
    assert!(matches!(
        ScaledFamily::new(env, ChannelTable::scalar(2), bad, base),
        Err(Error::UnnormalizedCoefficients { .. })
    ));
}

#[test]
fn translation_by_zero_is_identity() {
    let g = grid1(0.5, 3.0, 4, 6);
    let psi = gaussian_1d(&g, 1.5, 0.3);
    let t = psi.apply_translation(&FourVector::new(&[0.0]).unwrap()).unwrap();
    assert_eq!(max_diff(&psi, &t), 0.0);
}

#[test]
fn packet_support_stays_in_cone() {
    let g = Arc::new(MomentumGrid::<f64>::from_box(&[2.0, -1.0, -1.0, -1.0], &[4.0, 1.0, 1.0, 1.0], &[2, 2, 2, 2], 6).unwrap());
    let spec = PacketSpec {
        envelope: Envelope::bump(vec![3.0, 0.0, 0.0, 0.0], vec![0.5; 4]).unwrap(),
        displacement: None,
        coefficients: vec![(Channel::scalar(0), C::new(1.0, 0.0))],
    };
    let psi = make_packet(g, &spec).unwrap();
    assert!((psi.norm_squared() - 1.0).abs() < 1e-12);
    for &i in &psi.support_nodes() {
        let k = psi.grid().nodes()[i];
        assert!(k.time() > k.spatial_norm());
    }
}

#[test]
fn packet_outside_cone_is_rejected() {
    let g = Arc::new(MomentumGrid::from_box(&[2.0, -1.0], &[4.0, 1.0], &[2, 2], 6).unwrap());
    let spec = PacketSpec {
        envelope: Envelope::bump(vec![1.0, 0.0], vec![1.5, 0.5]).unwrap(),
        displacement: None,
        coefficients: vec![(Channel::scalar(0), C::new(1.0, 0.0))],
    };
    assert!(matches!(make_packet(g.clone(), &spec), Err(Error::SupportOutsideCone)));
    let spec = PacketSpec { envelope: Envelope::bump(vec![3.5, 0.0], vec![1.0, 0.5]).unwrap(), ..spec };
    assert!(matches!(make_packet(g, &spec), Err(Error::SupportEscapesGrid)));
}

fn packet_4d(grid: &Arc<MomentumGrid<f64>>, center: [f64; 4], width: f64, cutoff: f64, channels: Vec<(Channel, C<f64>)>) -> WaveFunction<f64> {
    let spec = PacketSpec {
        envelope: Envelope::Gaussian { center: center.to_vec(), width: vec![width; 4], cutoff },
        displacement: None,
        coefficients: channels,
    };
    make_packet(grid.clone(), &spec).unwrap()
}

#[test]
fn lorentz_identity_is_identity() {
    let g = Arc::new(MomentumGrid::from_box(&[7.0, -3.0, -3.0, -3.0], &[13.0, 3.0, 3.0, 3.0], &[2; 4], 6).unwrap());
    let psi = packet_4d(&g, [10.0, 0.0, 0.0, 0.0], 0.5, 6.0, vec![(Channel::scalar(0), C::new(1.0, 0.0))]);
    let out = psi.apply_lorentz(&Sl2c::identity()).unwrap();
    assert!(max_diff(&psi, &out.state) < 1e-12);
    assert!(out.norm_drift.abs() < 1e-12);
    assert_eq!(out.status, ResampleStatus::Ok);
}

#[test]
fn lorentz_boost_norm_drift_on_32_per_axis_grid() {
    let g = Arc::new(MomentumGrid::from_box(&[13.0, -7.0, -7.0, -7.0], &[27.0, 7.0, 7.0, 7.0], &[8; 4], 4).unwrap());
    assert_eq!(g.tensor().shape(), &[32, 32, 32, 32]);
    let psi = packet_4d(&g, [20.0, 0.0, 0.0, 0.0], 1.0, 6.0, vec![(Channel::scalar(0), C::new(1.0, 0.0))]);
    let boost = Sl2c::boost([0.0, 0.0, 1.0], 0.03);
    let out = psi.apply_lorentz(&boost).unwrap();
    assert!(out.norm_drift.abs() < 1e-3, "drift {}", out.norm_drift);
    assert_eq!(out.status, ResampleStatus::Ok);
}

#[test]
fn lorentz_rejects_escaping_support() {
    let g = Arc::new(MomentumGrid::from_box(&[7.0, -3.0, -3.0, -3.0], &[13.0, 3.0, 3.0, 3.0], &[1; 4], 6).unwrap());
    let psi = packet_4d(&g, [10.0, 0.0, 0.0, 0.0], 0.5, 5.0, vec![(Channel::scalar(0), C::new(1.0, 0.0))]);
    let boost = Sl2c::boost([1.0, 0.0, 0.0], 0.5);
    assert!(matches!(psi.apply_lorentz(&boost), Err(Error::SupportEscapesGrid)));
}

#[test]
fn rotation_about_z_gives_m_phases() {
    let g = Arc::new(MomentumGrid::from_box(&[7.0, -3.0, -3.0, -3.0], &[13.0, 3.0, 3.0, 3.0], &[2; 4], 6).unwrap());
    let j = HalfInt::int(1);
    let weights = [C::new(0.6, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.8)];
    let chans: Vec<(Channel, C<f64>)> =
        j.projections().zip(weights).map(|(m, w)| (Channel::new(0, j, m).unwrap(), w)).collect();
    let psi = packet_4d(&g, [10.0, 0.0, 0.0, 0.0], 0.5, 5.0, chans);
    let theta = PI / 2.0;
    // exp(+iθσ³/2): label m picks up e^{-imθ}
    let out = psi.apply_lorentz(&Sl2c::rotation([0.0, 0.0, 1.0], -theta)).unwrap().state;
    for (p, ch) in psi.channels().channels().iter().enumerate() {
        let phase = C::from_polar(1.0, -ch.m.as_f64() * theta);
        let err = psi.channel(p).iter().zip(out.channel(p)).map(|(a, b)| (a * phase - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-10, "m = {}: {err}", ch.m);
    }
}

#[test]
fn lorentz_needs_complete_multiplets() {
    let g = Arc::new(MomentumGrid::from_box(&[7.0, -3.0, -3.0, -3.0], &[13.0, 3.0, 3.0, 3.0], &[1; 4], 4).unwrap());
    let ch = Channel::new(0, HalfInt::int(1), HalfInt::int(1)).unwrap();
    let psi = packet_4d(&g, [10.0, 0.0, 0.0, 0.0], 0.5, 5.0, vec![(ch, C::new(1.0, 0.0))]);
    assert!(psi.apply_lorentz(&Sl2c::identity()).is_err());
}

#[test]
fn dilatation_identity_unitarity_and_composition() {
    let g = grid1(1.0, 12.0, 40, 10);
    let psi = gaussian_1d(&g, 5.0, 0.3).normalized().unwrap();
    let id = psi.apply_dilatation(1.0).unwrap();
    assert!(max_diff(&psi, &id.state) < 1e-14);
    let a = psi.apply_dilatation(1.2).unwrap();
    assert!(a.norm_drift.abs() < 1e-6, "{}", a.norm_drift);
    let ab = a.state.apply_dilatation(1.1).unwrap().state;
    let direct = psi.apply_dilatation(1.32).unwrap().state;
    assert!(max_diff(&ab, &direct) < 1e-6, "{}", max_diff(&ab, &direct));
    assert!(matches!(psi.apply_dilatation(0.3), Err(Error::SupportEscapesGrid)));
}

#[test]
fn derivative_of_gaussian() {
    let g = grid1(1.0, 9.0, 24, 12);
    let w = 0.5;
    let psi = gaussian_1d(&g, 5.0, w);
    let d = psi.partial_derivative(0).unwrap();
    for (i, k) in g.nodes().iter().enumerate() {
        let x = k.get(0) - 5.0;
        let exact = -x / (w * w) * (-x * x / (2.0 * w * w)).exp();
        assert!((d.amplitude(0, i).re - exact).abs() < 1e-8, "{} {}", d.amplitude(0, i).re, exact);
    }
}

#[test]
fn superposition_merges_channel_tables() {
    let g = Arc::new(MomentumGrid::from_box(&[7.0, -3.0, -3.0, -3.0], &[13.0, 3.0, 3.0, 3.0], &[1; 4], 4).unwrap());
    let a = packet_4d(&g, [10.0, 0.0, 0.0, 0.0], 0.5, 5.0, vec![(Channel::scalar(0), C::new(1.0, 0.0))]);
    let j = HalfInt::int(1);
    let b = packet_4d(
        &g,
        [10.0, 0.0, 0.0, 0.0],
        0.5,
        5.0,
        j.projections().map(|m| (Channel::new(0, j, m).unwrap(), C::new(1.0, 0.0))).collect(),
    );
    let s = a.superpose(&b).unwrap();
    assert_eq!(s.channels().len(), 4);
    assert!((s.norm_squared() - 2.0).abs() < 1e-12);
}

#[test]
fn snapshot_roundtrip() {
    let g = grid1(0.5, 3.0, 3, 5);
    let psi = gaussian_1d(&g, 1.5, 0.3).apply_translation(&FourVector::new(&[0.7]).unwrap()).unwrap();
    let json = serde_json::to_string(&psi.snapshot()).unwrap();
    let back: StateSnapshot = serde_json::from_str(&json).unwrap();
    let psi2 = WaveFunction::<f64>::from_snapshot(&back).unwrap();
    assert_eq!(max_diff(&psi, &psi2), 0.0);
    assert_eq!(back.amplitudes.len(), 2 * g.len());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn translation_preserves_norm(t in -20.0..20.0f64, x in -20.0..20.0f64) {
        let g = Arc::new(MomentumGrid::from_box(&[2.0, -1.0], &[4.0, 1.0], &[2, 2], 6).unwrap());
        let psi = WaveFunction::from_fn(g, ChannelTable::scalar(2), |c, k| {
            C::new(k.get(0) + c.sigma as f64, k.get(1))
        }).unwrap();
        let moved = psi.apply_translation(&FourVector::new(&[t, x]).unwrap()).unwrap();
        prop_assert!((moved.norm_squared() / psi.norm_squared() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn dilatation_keeps_support_in_cone(lambda in 0.8..1.25f64) {
        let g = Arc::new(MomentumGrid::from_box(&[2.5, -2.0], &[8.0, 2.0], &[3, 2], 6).unwrap());
        let spec = PacketSpec {
            envelope: Envelope::bump(vec![5.0, 0.0], vec![1.0, 0.6]).unwrap(),
            displacement: None,
            coefficients: vec![(Channel::scalar(0), C::new(1.0, 0.0))],
        };
        let psi = make_packet(g, &spec).unwrap();
        let out = psi.apply_dilatation(lambda).unwrap().state;
        for &i in &out.support_nodes() {
            let k = out.grid().nodes()[i];
            prop_assert!(k.time() > k.spatial_norm());
        }
    }
}
