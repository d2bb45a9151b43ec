//! Fast invariant suite behind `eventloc selftest`.

use eventloc::scalar::C;
use eventloc::{build_generators, lorentz_of_sl2c, wigner_boost, FourVector, HalfInt, IrrepLabel, Sl2c};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::{bundled, run_scenario, Status};

#[derive(Clone, Debug, Serialize)]
pub struct SelfCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: String) -> SelfCheck {
    SelfCheck { name: name.into(), passed, detail }
}

fn random_sl2c(rng: &mut ChaCha8Rng) -> Sl2c<f64> {
    Sl2c::exp_sigma(std::array::from_fn(|_| C::new(rng.gen_range(-0.8..0.8), rng.gen_range(-3.0..3.0))))
}

/// Boost reconstruction and the spinor-to-vector homomorphism on random input.
pub fn kinematics(seed: u64) -> SelfCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut boost = 0.0_f64;
    let mut hom = 0.0_f64;
    for _ in 0..100 {
        let mu = rng.gen_range(0.2..5.0);
        let p: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-4.0..4.0));
        let e = (mu * mu + p.iter().map(|x| x * x).sum::<f64>()).sqrt();
        let k = FourVector::new4(e, p[0], p[1], p[2]);
        let result = wigner_boost(&k)
            .and_then(|a| lorentz_of_sl2c(&a))
            .and_then(|l| l.apply(&FourVector::rest(mu)));
        match result {
            Ok(q) => {
                let err = (0..4).map(|i| (q.get(i) - k.get(i)).abs() / e).fold(0.0, f64::max);
                boost = boost.max(err);
            }
            Err(_) => boost = f64::INFINITY,
        }
        let (a, b) = (random_sl2c(&mut rng), random_sl2c(&mut rng));
        match (lorentz_of_sl2c(&(a.clone() * b.clone())), lorentz_of_sl2c(&a), lorentz_of_sl2c(&b)) {
            (Ok(ab), Ok(la), Ok(lb)) => {
                let prod = la * lb;
                let scale = ab.entries().iter().flatten().fold(1.0_f64, |m, v| m.max(v.abs()));
                hom = hom.max(ab.max_abs_diff(&prod) / scale);
            }
            _ => hom = f64::INFINITY,
        }
    }
    check("kinematics", boost < 1e-12 && hom < 1e-12, format!("boost {boost:e}, homomorphism {hom:e} (relative)"))
}

/// Commutators and Casimirs of truncated irreps on interior blocks.
pub fn irreps() -> SelfCheck {
    let labels = [
        IrrepLabel::new(HalfInt::ZERO, C::new(1.0, 0.0)),
        IrrepLabel::new(HalfInt::int(1), C::new(0.0, 0.0)),
        IrrepLabel::new(HalfInt::ZERO, C::new(0.0, 2.0)),
    ];
    let mut worst = 0.0_f64;
    for l in labels {
        let r = l.and_then(|l| build_generators(l, HalfInt::int(6))).map(|g| g.certify().max_residual());
        worst = worst.max(r.unwrap_or(f64::INFINITY));
    }
    check("irreps", worst < 1e-10, format!("max residual {worst:e}"))
}

/// Runs a bundled scenario twice and compares status and hash.
pub fn scenario(name: &str, expected: Status) -> SelfCheck {
    let run = || bundled::load(name).and_then(|c| run_scenario(&c, None));
    match (run(), run()) {
        (Ok(a), Ok(b)) => {
            let same = a.report.body_sha256 == b.report.body_sha256;
            check(
                &format!("scenario_{name}"),
                a.status == expected && same,
                format!("status {:?}, reproducible {same}", a.status),
            )
        }
        (Err(e), _) | (_, Err(e)) => check(&format!("scenario_{name}"), false, e.to_string()),
    }
}

pub fn run_all(seed: u64) -> Vec<SelfCheck> {
    vec![
        kinematics(seed),
        irreps(),
        scenario("toa1d_flat", Status::Ok),
        scenario("toa1d_quadratic", Status::Ok),
        scenario("contraction_violation", Status::CertificationFailure),
    ]
}
