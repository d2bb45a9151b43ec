//! Space-time amplitudes `Ψ_a(x)` and the density `ρ(ψ, x) = Σ_a ω_a |Ψ_a(x)|²`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::SpacetimeGrid;
use crate::kinematics::{wigner_boost, FourVector, HalfInt, Sl2c};
use crate::pov::kernel::{BaricentricClass, GammaLabel, Kernel, PoincareKernel, TranslationKernel};
use crate::pov::transform::{fourier_at, fourier_on_grid};
use crate::quadrature::AxisSpec;
use crate::scalar::{cis, re, Real, C};
use crate::state::{Channel, WaveFunction};

/// Multiplier `f(μ, j, γ)` applied to the integrand of sector `(γ, j)`.
pub type SectorFilter<'a, T> = &'a (dyn Fn(T, HalfInt, &GammaLabel<T>) -> T + Sync);

/// Upper bound on stored integrand entries (nodes × amplitude channels).
const INTEGRAND_CAP: usize = 200_000_000;
/// Upper bound on the support-pair matrix of the double-integral route.
const PAIR_CAP: usize = 16_000_000;

/// Output channel `a`: `γ` index (kernel row for translation kernels, group for Poincaré ones) and irrep basis `(l, n)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeChannel {
    pub gamma: usize,
    pub two_l: i32,
    pub two_n: i32,
    pub omega: f64,
}

/// Momentum-space integrands `g_a(k)` with their weights.
pub(crate) struct Integrands<T> {
    pub channels: Vec<AmplitudeChannel>,
    pub omega: Vec<T>,
    pub g: Vec<Vec<C<T>>>,
}

impl<T: Real> Integrands<T> {
    /// `Σ_a ω_a Σ_k w_k |g_a(k)|²`, the density integral over all of space-time.
    fn plancherel(&self, w: &[T]) -> T {
        self.g
            .iter()
            .zip(&self.omega)
            .map(|(g, &om)| om * g.iter().zip(w).map(|(v, &w)| v.norm_sqr() * w).sum::<T>())
            .sum()
    }
}

fn translation_integrands<T: Real>(psi: &WaveFunction<T>, k: &TranslationKernel<T>) -> Result<Integrands<T>> {
    let nc = psi.channels().len();
    if k.n_sigma() != nc {
        return Err(Error::KernelShape(format!("kernel has {} columns, state has {nc} channels", k.n_sigma())));
    }
    let grid = psi.grid();
    let n = grid.len();
    let mus = grid.masses();
    let cols: Vec<Vec<C<T>>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let m = k.matrix(mus[i]);
            (0..k.n_gamma())
                .map(|g| (0..nc).fold(re(T::zero()), |acc, s| acc + m[(g, s)] * psi.amplitude(s, i)))
                .collect()
        })
        .collect();
    let mut g = vec![vec![re(T::zero()); n]; k.n_gamma()];
    for (i, col) in cols.into_iter().enumerate() {
        for (a, v) in col.into_iter().enumerate() {
            g[a][i] = v;
        }
    }
    let channels = (0..k.n_gamma()).map(|gamma| AmplitudeChannel { gamma, two_l: 0, two_n: 0, omega: 1.0 }).collect();
    Ok(Integrands { channels, omega: vec![T::one(); k.n_gamma()], g })
}

/// `h_{e,m}(k) = Σ_σ F^{j_e}_{eσ}(μ) ψ_{σ j_e m}(k)` for entry `e`, `m` ascending.
pub(crate) fn entry_projection<T: Real>(psi: &WaveFunction<T>, kernel: &PoincareKernel<T>, e: usize, node: usize, mu: T) -> Vec<C<T>> {
    let entry = &kernel.entries()[e];
    let table = psi.channels();
    entry
        .j
        .projections()
        .map(|m| {
            (0..kernel.n_sigma()).fold(re(T::zero()), |acc, s| {
                match table.position(&Channel { sigma: s as u32, j: entry.j, m }) {
                    Some(p) => acc + entry.row[s].eval(mu) * psi.amplitude(p, node),
                    None => acc,
                }
            })
        })
        .collect()
}

fn poincare_integrands<T: Real>(
    psi: &WaveFunction<T>,
    kernel: &PoincareKernel<T>,
    filter: Option<SectorFilter<'_, T>>,
) -> Result<Integrands<T>> {
    if psi.dim() != 4 {
        return Err(Error::UnsupportedDimension(psi.dim()));
    }
    let grid = psi.grid();
    let n = grid.len();
    let mut channels = Vec::new();
    let mut omega = Vec::new();
    let mut g = Vec::new();
    for (gi, group) in kernel.groups().iter().enumerate() {
        let basis = group.irrep.basis();
        let dim = basis.len();
        if (channels.len() + dim) * n > INTEGRAND_CAP {
            return Err(Error::GridCapacity(format!("{} amplitude channels on {n} nodes", channels.len() + dim)));
        }
        let cols: Vec<Result<Vec<C<T>>>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut out = vec![re(T::zero()); dim];
                let k = &grid.nodes()[i];
                let mu = grid.masses()[i];
                for &e in &group.entries {
                    let j = kernel.entries()[e].j;
                    let f = filter.map_or(T::one(), |f| f(mu, j, &group.gamma));
                    if f == T::zero() {
                        continue;
                    }
                    let h = entry_projection(psi, kernel, e, i, mu);
                    if h.iter().all(|v| v.norm_sqr() == T::zero()) {
                        continue;
                    }
                    if dim == 1 {
                        out[0] = out[0] + h[0] * f;
                        continue;
                    }
                    let d = group.irrep.boost_columns(k, j)?;
                    for (r, o) in out.iter_mut().enumerate() {
                        let s = h.iter().enumerate().fold(re(T::zero()), |acc, (m, hv)| acc + d[(r, m)] * *hv);
                        *o = *o + s * f;
                    }
                }
                Ok(out)
            })
            .collect();
        let mut block = vec![vec![re(T::zero()); n]; dim];
        for (i, col) in cols.into_iter().enumerate() {
            for (a, v) in col?.into_iter().enumerate() {
                block[a][i] = v;
            }
        }
        for (a, (l, m)) in basis.iter().enumerate() {
            channels.push(AmplitudeChannel { gamma: gi, two_l: l.twice(), two_n: m.twice(), omega: group.omega.as_f64() });
            omega.push(group.omega);
            g.push(std::mem::take(&mut block[a]));
        }
    }
    Ok(Integrands { channels, omega, g })
}

pub(crate) fn integrands<T: Real>(
    psi: &WaveFunction<T>,
    kernel: &Kernel<T>,
    filter: Option<SectorFilter<'_, T>>,
) -> Result<Integrands<T>> {
    match kernel {
        Kernel::Translation(k) => translation_integrands(psi, k),
        Kernel::Poincare(k) => poincare_integrands(psi, k, filter),
    }
}

/// `Ψ_a` at every x-node.
#[derive(Clone, Debug)]
pub struct AmplitudeField<T> {
    pub channels: Vec<AmplitudeChannel>,
    pub values: Vec<Vec<C<T>>>,
}

#[derive(Clone, Debug)]
pub struct DensityField<T> {
    grid: SpacetimeGrid<T>,
    values: Vec<T>,
    amplitudes: Option<AmplitudeField<T>>,
    k_space_total: T,
    state_norm: T,
}

#[derive(Clone, Copy, Default)]
pub struct DensityOptions<'a, T> {
    pub retain_amplitudes: bool,
    pub filter: Option<SectorFilter<'a, T>>,
}

fn check_dims<T: Real>(psi: &WaveFunction<T>, d: usize) -> Result<()> {
    if psi.dim() != d {
        return Err(Error::DimensionMismatch { expected: psi.dim(), found: d });
    }
    Ok(())
}

pub fn amplitude_field<T: Real>(psi: &WaveFunction<T>, kernel: &Kernel<T>, x: &SpacetimeGrid<T>) -> Result<AmplitudeField<T>> {
    check_dims(psi, x.dim())?;
    let ig = integrands(psi, kernel, None)?;
    let values = ig.g.iter().map(|g| fourier_on_grid(psi.grid(), g, x)).collect();
    Ok(AmplitudeField { channels: ig.channels, values })
}

pub fn density<T: Real>(psi: &WaveFunction<T>, kernel: &Kernel<T>, x: &SpacetimeGrid<T>) -> Result<DensityField<T>> {
    density_with(psi, kernel, x, DensityOptions::default())
}

pub fn density_with<T: Real>(
    psi: &WaveFunction<T>,
    kernel: &Kernel<T>,
    x: &SpacetimeGrid<T>,
    opts: DensityOptions<'_, T>,
) -> Result<DensityField<T>> {
    check_dims(psi, x.dim())?;
    let ig = integrands(psi, kernel, opts.filter)?;
    let mut values = vec![T::zero(); x.len()];
    let mut amps = Vec::new();
    for (g, &om) in ig.g.iter().zip(&ig.omega) {
        if g.iter().all(|v| v.norm_sqr() == T::zero()) {
            if opts.retain_amplitudes {
                amps.push(vec![re(T::zero()); x.len()]);
            }
            continue;
        }
        let psi_x = fourier_on_grid(psi.grid(), g, x);
        for (r, v) in values.iter_mut().zip(&psi_x) {
            *r = *r + om * v.norm_sqr();
        }
        if opts.retain_amplitudes {
            amps.push(psi_x);
        }
    }
    let k_space_total = ig.plancherel(psi.grid().weights());
    let amplitudes = opts.retain_amplitudes.then(|| AmplitudeField { channels: ig.channels, values: amps });
    Ok(DensityField { grid: x.clone(), values, amplitudes, k_space_total, state_norm: psi.norm_squared() })
}

/// `ρ(ψ, x)` at scattered points.
pub fn density_at<T: Real>(
    psi: &WaveFunction<T>,
    kernel: &Kernel<T>,
    points: &[FourVector<T>],
    filter: Option<SectorFilter<'_, T>>,
) -> Result<Vec<T>> {
    if let Some(p) = points.iter().find(|p| p.dim() != psi.dim()) {
        return Err(Error::DimensionMismatch { expected: psi.dim(), found: p.dim() });
    }
    let ig = integrands(psi, kernel, filter)?;
    let mut values = vec![T::zero(); points.len()];
    for (g, &om) in ig.g.iter().zip(&ig.omega) {
        if g.iter().all(|v| v.norm_sqr() == T::zero()) {
            continue;
        }
        for (r, v) in values.iter_mut().zip(fourier_at(psi.grid(), g, points)) {
            *r = *r + om * v.norm_sqr();
        }
    }
    Ok(values)
}

/// Precomputed double-integral form `Σ_{k'k} conj(v_{k'}) Q(k', k) v_k` of the density.
struct PairForm<T> {
    support: Vec<usize>,
    q: Vec<C<T>>,
}

fn pair_form<T: Real>(psi: &WaveFunction<T>, kernel: &PoincareKernel<T>) -> Result<PairForm<T>> {
    match kernel.classify() {
        BaricentricClass::QuasiBaricentric | BaricentricClass::StrictBaricentric => {}
        BaricentricClass::Neither => return Err(Error::KernelNotQuasiBaricentric),
    }
    if psi.dim() != 4 {
        return Err(Error::UnsupportedDimension(psi.dim()));
    }
    let grid = psi.grid();
    // per group: its spin and h(k) at every node
    let mut hs: Vec<(usize, HalfInt, Vec<Vec<C<T>>>)> = Vec::new();
    for (gi, group) in kernel.groups().iter().enumerate() {
        let e = group.entries[0];
        let j = kernel.entries()[e].j;
        let h: Vec<Vec<C<T>>> =
            (0..grid.len()).map(|i| entry_projection(psi, kernel, e, i, grid.masses()[i])).collect();
        hs.push((gi, j, h));
    }
    let support: Vec<usize> = (0..grid.len())
        .filter(|&i| hs.iter().any(|(_, _, h)| h[i].iter().any(|v| v.norm_sqr() > T::zero())))
        .collect();
    let ns = support.len();
    if ns * ns > PAIR_CAP {
        return Err(Error::GridCapacity(format!("{ns} support nodes exceed the pair-matrix capacity")));
    }
    let boosts: Vec<Sl2c<T>> = support.iter().map(|&i| wigner_boost(&grid.nodes()[i])).collect::<Result<_>>()?;
    let q: Vec<C<T>> = (0..ns * ns)
        .into_par_iter()
        .map(|idx| -> Result<C<T>> {
            let (p, s) = (idx / ns, idx % ns);
            let (ip, is) = (support[p], support[s]);
            let mut acc = re(T::zero());
            let mut rel: Option<Sl2c<T>> = None;
            for (gi, j, h) in &hs {
                let group = &kernel.groups()[*gi];
                let (hp, hk) = (&h[ip], &h[is]);
                let term = if group.irrep.dim() == 1 {
                    hp[0].conj() * hk[0]
                } else {
                    let a = *rel.get_or_insert_with(|| boosts[p].inverse() * boosts[s]);
                    let b = group.irrep.diagonal_block(&a, *j)?;
                    let mut t = re(T::zero());
                    for (mp, vp) in hp.iter().enumerate() {
                        for (mk, vk) in hk.iter().enumerate() {
                            t = t + vp.conj() * b[(mp, mk)] * *vk;
                        }
                    }
                    t
                };
                acc = acc + term * group.omega;
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    Ok(PairForm { support, q })
}

impl<T: Real> PairForm<T> {
    fn eval(&self, psi: &WaveFunction<T>, x: &FourVector<T>) -> T {
        let grid = psi.grid();
        let d = grid.dim();
        let v: Vec<C<T>> = self
            .support
            .iter()
            .map(|&i| {
                let k = &grid.nodes()[i];
                let phase: T = (0..d).map(|a| if a == 0 { -x.get(0) * k.get(0) } else { x.get(a) * k.get(a) }).sum();
                cis(phase) * grid.weights()[i]
            })
            .collect();
        let ns = v.len();
        let mut total = re(T::zero());
        for p in 0..ns {
            let row = &self.q[p * ns..(p + 1) * ns];
            let inner = row.iter().zip(&v).fold(re(T::zero()), |acc, (q, vk)| acc + *q * *vk);
            total = total + v[p].conj() * inner;
        }
        total.re * (T::lit(2.0) * T::PI()).powi(-(d as i32))
    }
}

/// Density from the double-integral form, which has no cross terms between different `j`.
pub fn quasi_baricentric_density<T: Real>(
    psi: &WaveFunction<T>,
    kernel: &PoincareKernel<T>,
    x: &SpacetimeGrid<T>,
) -> Result<DensityField<T>> {
    check_dims(psi, x.dim())?;
    let form = pair_form(psi, kernel)?;
    let values: Vec<T> = (0..x.len()).into_par_iter().map(|i| form.eval(psi, &x.point(i))).collect();
    let ig = poincare_integrands(psi, kernel, None)?;
    Ok(DensityField {
        grid: x.clone(),
        values,
        amplitudes: None,
        k_space_total: ig.plancherel(psi.grid().weights()),
        state_norm: psi.norm_squared(),
    })
}

pub fn quasi_baricentric_density_at<T: Real>(
    psi: &WaveFunction<T>,
    kernel: &PoincareKernel<T>,
    points: &[FourVector<T>],
) -> Result<Vec<T>> {
    let form = pair_form(psi, kernel)?;
    Ok(points.par_iter().map(|x| form.eval(psi, x)).collect())
}

/// Axis-aligned box `[min_a, max_a]`.
pub type Region<T> = (Vec<T>, Vec<T>);

impl<T: Real> DensityField<T> {
    pub fn grid(&self) -> &SpacetimeGrid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn amplitudes(&self) -> Option<&AmplitudeField<T>> {
        self.amplitudes.as_ref()
    }

    /// `Σ_a ω_a ∫|g_a|² d^dk`: the density integral over all of space-time.
    pub fn k_space_total(&self) -> T {
        self.k_space_total
    }

    pub fn state_norm(&self) -> T {
        self.state_norm
    }

    /// Quadrature integral of `ρ` over the grid.
    pub fn total(&self) -> T {
        self.values.iter().zip(self.grid.weights()).map(|(r, w)| *r * w).sum()
    }

    /// Share of the full-space integral that falls inside the grid.
    pub fn capture_fraction(&self) -> T {
        if self.k_space_total > T::zero() {
            self.total() / self.k_space_total
        } else {
            T::one()
        }
    }

    pub fn min(&self) -> T {
        self.values.iter().cloned().fold(T::infinity(), T::min)
    }

    pub fn max(&self) -> T {
        self.values.iter().cloned().fold(T::neg_infinity(), T::max)
    }

    /// `∫_I ρ` over a union of disjoint boxes, each inside the grid hull.
    pub fn region_probability(&self, boxes: &[Region<T>]) -> Result<T> {
        let bounds = self.grid.bounds();
        let d = self.grid.dim();
        let slack = T::tol(1e-12);
        let mut total = T::zero();
        for (lo, hi) in boxes {
            if lo.len() != d || hi.len() != d {
                return Err(Error::DimensionMismatch { expected: d, found: lo.len().min(hi.len()) });
            }
            if (0..d).any(|a| !(hi[a] > lo[a])) {
                continue;
            }
            let inside = (0..d).all(|a| {
                let (b0, b1) = bounds[a];
                let span = (b1 - b0).abs().max(T::one()) * slack;
                lo[a] >= b0 - span && hi[a] <= b1 + span
            });
            if !inside {
                return Err(Error::RegionOutsideHull);
            }
            let pw: Vec<Vec<T>> =
                (0..d).map(|a| self.grid.tensor().axes()[a].partial_weights(lo[a], hi[a])).collect();
            let strides = self.grid.tensor().strides();
            let shape = self.grid.tensor().shape();
            let mut acc = T::zero();
            for (i, &r) in self.values.iter().enumerate() {
                let mut w = T::one();
                for a in 0..d {
                    w = w * pw[a][(i / strides[a]) % shape[a]];
                    if w == T::zero() {
                        break;
                    }
                }
                acc = acc + r * w;
            }
            total = total + acc;
        }
        Ok(total)
    }

    /// Interpolated `ρ(x)`; `None` outside the hull.
    pub fn interpolate(&self, x: &FourVector<T>) -> Option<T> {
        let st = self.grid.tensor().stencil(x.components())?;
        Some(st.iter().fold(T::zero(), |acc, &(i, w)| acc + self.values[i] * w))
    }

    /// `∫ x^α ρ d^dx` per axis.
    pub fn first_moments(&self) -> Vec<T> {
        let w = self.grid.weights();
        (0..self.grid.dim())
            .map(|a| {
                (0..self.values.len()).map(|i| self.grid.tensor().point(i)[a] * self.values[i] * w[i]).sum()
            })
            .collect()
    }

    /// Standard deviation of `ρ / ∫ρ` per axis.
    pub fn widths(&self) -> Vec<T> {
        let w = self.grid.weights();
        let total = self.total();
        let means: Vec<T> = self.first_moments().into_iter().map(|m| m / total).collect();
        (0..self.grid.dim())
            .map(|a| {
                let v: T = (0..self.values.len())
                    .map(|i| (self.grid.tensor().point(i)[a] - means[a]).powi(2) * self.values[i] * w[i])
                    .sum();
                (v / total).max(T::zero()).sqrt()
            })
            .collect()
    }

    /// CSV with columns `x0..x{d-1}, weight, rho`.
    pub fn to_csv(&self) -> String {
        let d = self.grid.dim();
        let mut s = (0..d).map(|a| format!("x{a}")).collect::<Vec<_>>().join(",");
        s.push_str(",weight,rho\n");
        let w = self.grid.weights();
        for (i, r) in self.values.iter().enumerate() {
            for c in self.grid.tensor().point(i) {
                s.push_str(&format!("{},", c.as_f64()));
            }
            s.push_str(&format!("{},{}\n", w[i].as_f64(), r.as_f64()));
        }
        s
    }

    pub fn export(&self) -> DensityExport {
        DensityExport {
            grid: self.grid.specs(),
            rho: self.values.iter().map(|v| v.as_f64()).collect(),
            total: self.total().as_f64(),
            k_space_total: self.k_space_total.as_f64(),
            state_norm: self.state_norm.as_f64(),
            amplitudes: self.amplitudes.as_ref().map(|a| {
                a.channels
                    .iter()
                    .zip(&a.values)
                    .map(|(c, v)| AmplitudeExport {
                        channel: *c,
                        values: v.iter().flat_map(|z| [z.re.as_f64(), z.im.as_f64()]).collect(),
                    })
                    .collect()
            }),
        }
    }
}

/// JSON form of a density field; amplitudes interleave `(re, im)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityExport {
    pub grid: Vec<AxisSpec>,
    pub rho: Vec<f64>,
    pub total: f64,
    pub k_space_total: f64,
    pub state_norm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<AmplitudeExport>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeExport {
    pub channel: AmplitudeChannel,
    pub values: Vec<f64>,
}
