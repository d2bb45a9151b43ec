#![allow(dead_code)]

use std::sync::Arc;

use eventloc::scalar::C;
use eventloc::{make_packet, Channel, Envelope, FourVector, MomentumGrid, PacketSpec, Sl2c, WaveFunction};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `exp(v·σ)` with `v` having Gaussian-ish components of the given scales.
pub fn random_sl2c(rng: &mut impl Rng, boost_scale: f64, rot_scale: f64) -> Sl2c<f64> {
    let v: [C<f64>; 3] = std::array::from_fn(|_| {
        C::new(boost_scale * rng.gen_range(-1.0..1.0), rot_scale * rng.gen_range(-1.0..1.0))
    });
    Sl2c::exp_sigma(v)
}

pub fn random_su2(rng: &mut impl Rng) -> Sl2c<f64> {
    random_sl2c(rng, 0.0, 3.0)
}

pub fn random_future(rng: &mut impl Rng) -> FourVector<f64> {
    let mu = rng.gen_range(0.2..5.0);
    let p: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-4.0..4.0));
    let e = (mu * mu + p.iter().map(|x| x * x).sum::<f64>()).sqrt();
    FourVector::new4(e, p[0], p[1], p[2])
}

/// Gaussian packet on a d = 4 grid centred at `center` with equal widths.
pub fn packet4(
    grid: &Arc<MomentumGrid<f64>>,
    center: [f64; 4],
    width: f64,
    cutoff: f64,
    channels: Vec<(Channel, C<f64>)>,
) -> WaveFunction<f64> {
    let spec = PacketSpec {
        envelope: Envelope::Gaussian { center: center.to_vec(), width: vec![width; 4], cutoff },
        displacement: None,
        coefficients: channels,
    };
    make_packet(grid.clone(), &spec).unwrap()
}

/// Box grid around `(k0, 0, 0, 0)` with half-widths `ht` (time) and `hs` (space).
pub fn box4(k0: f64, ht: f64, hs: f64, panels: usize, order: usize) -> Arc<MomentumGrid<f64>> {
    Arc::new(
        MomentumGrid::from_box(&[k0 - ht, -hs, -hs, -hs], &[k0 + ht, hs, hs, hs], &[panels; 4], order).unwrap(),
    )
}
