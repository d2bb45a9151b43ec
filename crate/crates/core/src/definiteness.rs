//! Correlators `r`, `r̂` and scaled-family concentration probes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::SpacetimeGrid;
use crate::kinematics::{FourVector, HalfInt};
use crate::mu_function::MuFunction;
use crate::packet::ScaledFamily;
use crate::pov::{density, BaricentricClass, Kernel, PoincareKernel, Region, TranslationKernel};
use crate::scalar::{re, Real, C};

const COEFF_TOL: f64 = 1e-10;

fn coefficients_at<T: Real>(c: &[MuFunction<T>], mu: T) -> Result<Vec<C<T>>> {
    let v: Vec<C<T>> = c.iter().map(|f| f.eval(mu)).collect();
    let n: T = v.iter().map(|z| z.norm_sqr()).sum();
    if (n - T::one()).abs() > T::tol(COEFF_TOL) {
        return Err(Error::UnnormalizedCoefficients { norm: n.as_f64() });
    }
    Ok(v)
}

/// `r(k', k) = Σ_γ conj(Σ_σ' K_γσ'(k') c_σ'(k')) Σ_σ K_γσ(k) c_σ(k)`.
pub fn correlator_r<T: Real>(
    kernel: &TranslationKernel<T>,
    c: &[MuFunction<T>],
    k1: &FourVector<T>,
    k2: &FourVector<T>,
) -> Result<C<T>> {
    if c.len() != kernel.n_sigma() {
        return Err(Error::DimensionMismatch { expected: kernel.n_sigma(), found: c.len() });
    }
    let (m1, m2) = (k1.mass()?, k2.mass()?);
    let u1 = kernel.matrix(m1).mul_vec(&coefficients_at(c, m1)?);
    let u2 = kernel.matrix(m2).mul_vec(&coefficients_at(c, m2)?);
    Ok(u1.iter().zip(&u2).fold(re(T::zero()), |acc, (a, b)| acc + a.conj() * *b))
}

/// `r̂(μ', μ) = Σ_γ ω_γ conj(u_γ(μ')) u_γ(μ)` with `u_γ = Σ_σ F^j_γσ c_σ`, for quasi-baricentric kernels.
pub fn correlator_r_hat<T: Real>(
    kernel: &PoincareKernel<T>,
    c: &[MuFunction<T>],
    j: HalfInt,
    mu1: T,
    mu2: T,
) -> Result<C<T>> {
    if !matches!(kernel.classify(), BaricentricClass::QuasiBaricentric | BaricentricClass::StrictBaricentric) {
        return Err(Error::KernelNotQuasiBaricentric);
    }
    if c.len() != kernel.n_sigma() {
        return Err(Error::DimensionMismatch { expected: kernel.n_sigma(), found: c.len() });
    }
    let u1 = kernel.sector_matrix(j, mu1).mul_vec(&coefficients_at(c, mu1)?);
    let u2 = kernel.sector_matrix(j, mu2).mul_vec(&coefficients_at(c, mu2)?);
    Ok(u1.iter().zip(&u2).fold(re(T::zero()), |acc, (a, b)| acc + a.conj() * *b))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorSample {
    pub scale: f64,
    pub offset: f64,
    pub re: f64,
    pub im: f64,
}

impl CorrelatorSample {
    pub fn norm(&self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn distance_to_one(&self) -> f64 {
        (self.re - 1.0).hypot(self.im)
    }
}

/// `r(λk_c, λk_c + q ê₀)` (translation) or `r̂(λμ_c, λμ_c + q)` (Poincaré, spin `j`) on a schedule.
pub fn correlator_samples<T: Real>(
    kernel: &Kernel<T>,
    c: &[MuFunction<T>],
    center: &FourVector<T>,
    j: HalfInt,
    scales: &[T],
    offsets: &[T],
) -> Result<Vec<CorrelatorSample>> {
    let mut out = Vec::with_capacity(scales.len() * offsets.len());
    for &l in scales {
        for &q in offsets {
            let v = match kernel {
                Kernel::Translation(k) => {
                    let a = center.scale(l);
                    let mut comps = a.components().to_vec();
                    comps[0] = comps[0] + q;
                    correlator_r(k, c, &a, &FourVector::new(&comps)?)?
                }
                Kernel::Poincare(k) => {
                    let mu = center.mass()? * l;
                    correlator_r_hat(k, c, j, mu, mu + q)?
                }
            };
            out.push(CorrelatorSample { scale: l.as_f64(), offset: q.as_f64(), re: v.re.as_f64(), im: v.im.as_f64() });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct ProbeOptions<T> {
    /// Gauss–Legendre panels and order per axis on the region.
    pub region_panels: usize,
    pub region_order: usize,
    /// Half-widths of the width window at `λ = 1`; scaled by `1/λ`.
    pub window: Vec<T>,
    pub window_panels: usize,
    pub window_order: usize,
    /// Tolerated decrease between consecutive `P_λ`.
    pub noise: T,
    /// Offsets `q` for correlator samples.
    pub offsets: Vec<T>,
    /// Spin sector for `r̂` samples.
    pub spin: HalfInt,
}

impl<T: Real> ProbeOptions<T> {
    pub fn new(window: Vec<T>) -> Self {
        Self {
            region_panels: 2,
            region_order: 10,
            window,
            window_panels: 8,
            window_order: 10,
            noise: T::lit(1e-3),
            offsets: vec![T::lit(0.5), T::one()],
            spin: HalfInt::ZERO,
        }
    }
}

/// Richardson extrapolation of `P_λ` assuming `1 − P_λ ∝ λ^{−q}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitEstimate {
    pub estimate: Option<f64>,
    pub order: Option<f64>,
    /// Spread between the estimates from the last two pairs.
    pub residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefinitenessReport {
    pub schedule: Vec<f64>,
    pub probabilities: Vec<f64>,
    /// Standard deviation of `ρ` per axis, per `λ`.
    pub widths: Vec<Vec<f64>>,
    pub window_capture: Vec<f64>,
    pub monotone: bool,
    /// Fitted `p` in `w(λ) ∝ λ^{−p}` per axis.
    pub width_exponents: Vec<f64>,
    pub width_fit_residuals: Vec<f64>,
    pub limit: LimitEstimate,
    pub correlator_samples: Vec<CorrelatorSample>,
}

impl DefinitenessReport {
    /// Columns `lambda, probability, capture, width0..`.
    pub fn to_csv(&self) -> String {
        let d = self.widths.first().map_or(0, |w| w.len());
        let mut s = String::from("lambda,probability,capture");
        for a in 0..d {
            s.push_str(&format!(",width{a}"));
        }
        s.push('\n');
        for i in 0..self.schedule.len() {
            s.push_str(&format!("{:e},{:e},{:e}", self.schedule[i], self.probabilities[i], self.window_capture[i]));
            for w in &self.widths[i] {
                s.push_str(&format!(",{w:e}"));
            }
            s.push('\n');
        }
        s
    }
}

/// Least-squares slope and RMS residual of `y` against `x`.
fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let rms = (x.iter().zip(y).map(|(a, b)| (b - my - slope * (a - mx)).powi(2)).sum::<f64>() / n).sqrt();
    (slope, rms)
}

fn richardson(schedule: &[f64], p: &[f64]) -> LimitEstimate {
    let none = LimitEstimate { estimate: None, order: None, residual: None };
    let n = p.len();
    if n < 3 {
        return none;
    }
    let (d1, d2) = (p[n - 2] - p[n - 3], p[n - 1] - p[n - 2]);
    let ratio = schedule[n - 1] / schedule[n - 2];
    if !(d1 > 0.0 && d2 > 0.0 && d1 > d2) || !(ratio > 1.0) {
        return none;
    }
    let q = (d1 / d2).ln() / ratio.ln();
    let f = ratio.powf(q) - 1.0;
    let last = p[n - 1] + d2 / f;
    let prev = p[n - 2] + d1 / f;
    LimitEstimate { estimate: Some(last), order: Some(q), residual: Some((last - prev).abs()) }
}

/// `P_λ(I)`, widths and correlator samples for `ψ^{(λ)}` along the schedule.
pub fn definiteness_probe<T: Real>(
    kernel: &Kernel<T>,
    family: &ScaledFamily<T>,
    region: &Region<T>,
    schedule: &[T],
    opts: &ProbeOptions<T>,
) -> Result<DefinitenessReport> {
    let d = family.base_grid().dim();
    let (lo, hi) = region;
    if lo.len() != d || hi.len() != d || opts.window.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: lo.len().min(hi.len()).min(opts.window.len()) });
    }
    if lo.iter().zip(hi).any(|(&a, &b)| !(a < T::zero() && b > T::zero())) {
        return Err(Error::InvalidArgument("region must contain the origin in its interior".into()));
    }
    if schedule.is_empty() || schedule.iter().any(|&l| !(l > T::zero())) || schedule.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("λ schedule must be positive and increasing".into()));
    }
    let region_grid = SpacetimeGrid::from_box(lo, hi, &vec![opts.region_panels; d], opts.region_order)?;
    let rows: Vec<(f64, Vec<f64>, f64)> = schedule
        .par_iter()
        .map(|&l| -> Result<(f64, Vec<f64>, f64)> {
            let psi = family.realize(l)?;
            let p = density(&psi, kernel, &region_grid)?.total();
            let half: Vec<T> = opts.window.iter().map(|&w| w / l).collect();
            let window = SpacetimeGrid::centered(&half, opts.window_panels, opts.window_order)?;
            let field = density(&psi, kernel, &window)?;
            Ok((
                p.as_f64(),
                field.widths().into_iter().map(|w| w.as_f64()).collect(),
                field.capture_fraction().as_f64(),
            ))
        })
        .collect::<Result<_>>()?;
    let probabilities: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let widths: Vec<Vec<f64>> = rows.iter().map(|r| r.1.clone()).collect();
    let window_capture = rows.iter().map(|r| r.2).collect();
    let sched: Vec<f64> = schedule.iter().map(|l| l.as_f64()).collect();
    let noise = opts.noise.as_f64();
    let monotone = probabilities.windows(2).all(|w| w[1] >= w[0] - noise);
    let logl: Vec<f64> = sched.iter().map(|l| l.ln()).collect();
    let (mut width_exponents, mut width_fit_residuals) = (Vec::new(), Vec::new());
    for a in 0..d {
        if sched.len() < 2 {
            width_exponents.push(f64::NAN);
            width_fit_residuals.push(f64::NAN);
            continue;
        }
        let logw: Vec<f64> = widths.iter().map(|w| w[a].ln()).collect();
        let (slope, rms) = linear_fit(&logl, &logw);
        width_exponents.push(-slope);
        width_fit_residuals.push(rms);
    }
    let center = FourVector::new(family.envelope().center())?;
    let correlator_samples =
        correlator_samples(kernel, family.coefficients(), &center, opts.spin, schedule, &opts.offsets)?;
    Ok(DefinitenessReport {
        limit: richardson(&sched, &probabilities),
        schedule: sched,
        probabilities,
        widths,
        window_capture,
        monotone,
        width_exponents,
        width_fit_residuals,
        correlator_samples,
    })
}
