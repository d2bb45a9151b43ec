//! Event-coordinate expectation values, Casimir sectors, the `Ξ` filter and proper-time delays.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{spin_generators, HalfInt};
use crate::linalg::CMatrix;
use crate::pov::density::entry_projection;
use crate::pov::{certify_kernel, certify_poincare_sectors, density_at, BaricentricClass, DensityField, GammaLabel, Kernel, PoincareKernel};
use crate::scalar::{cplx, re, Real, C};
use crate::state::WaveFunction;
use crate::unirep::{levi_civita, s_from_generators, IrrepLabel};

/// Capture fraction below which the moment route is flagged.
pub const CAPTURE_THRESHOLD: f64 = 0.999;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoordinateRoute {
    Moment,
    Abc,
    Operator,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateStatus {
    Ok,
    Warning,
}

/// The three contributions of the derivative route, contravariant index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbcTerms<T> {
    pub a: Vec<C<T>>,
    pub b: Vec<C<T>>,
    pub c: Vec<C<T>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoordinateDiagnostics<T> {
    pub status: EstimateStatus,
    /// Moment route: share of the full-space density integral inside the x-grid.
    pub capture_fraction: Option<f64>,
    /// Derivative routes: isometry residual of the kernel on the occupied sectors.
    pub normalization_residual: Option<f64>,
    pub max_imaginary: f64,
    pub terms: Option<AbcTerms<T>>,
}

/// `(ψ, X^α ψ)` for `α = 0..d`; imaginary parts are kept.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoordinateEstimate<T> {
    pub route: CoordinateRoute,
    pub values: Vec<C<T>>,
    pub diagnostics: CoordinateDiagnostics<T>,
}

impl<T: Real> CoordinateEstimate<T> {
    pub fn real_parts(&self) -> Vec<T> {
        self.values.iter().map(|v| v.re).collect()
    }

    /// Largest component difference of the real parts.
    pub fn max_difference(&self, other: &Self) -> T {
        self.values.iter().zip(&other.values).map(|(a, b)| (a.re - b.re).abs()).fold(T::zero(), T::max)
    }
}

fn max_im<T: Real>(v: &[C<T>]) -> f64 {
    v.iter().map(|z| z.im.abs().as_f64()).fold(0.0, f64::max)
}

fn metric<T: Real>(alpha: usize) -> T {
    if alpha == 0 {
        T::one()
    } else {
        -T::one()
    }
}

pub fn mean_coordinates_moment<T: Real>(field: &DensityField<T>) -> CoordinateEstimate<T> {
    let values: Vec<C<T>> = field.first_moments().into_iter().map(re).collect();
    let capture = field.capture_fraction().as_f64();
    let status = if capture < CAPTURE_THRESHOLD {
        log::warn!("density grid captures {capture:.6} of the total probability");
        EstimateStatus::Warning
    } else {
        EstimateStatus::Ok
    };
    CoordinateEstimate {
        route: CoordinateRoute::Moment,
        diagnostics: CoordinateDiagnostics {
            status,
            capture_fraction: Some(capture),
            normalization_residual: None,
            max_imaginary: 0.0,
            terms: None,
        },
        values,
    }
}

/// Spins carried by channels with non-zero amplitude.
fn occupied_spins<T: Real>(psi: &WaveFunction<T>) -> Vec<HalfInt> {
    let mut v: Vec<HalfInt> = psi
        .channels()
        .channels()
        .iter()
        .enumerate()
        .filter(|(c, _)| psi.channel(*c).iter().any(|a| a.norm_sqr() > T::zero()))
        .map(|(_, ch)| ch.j)
        .collect();
    v.sort();
    v.dedup();
    v
}

/// Rejects kernels that fail the isometry condition on the sectors the state occupies.
fn require_normalized<T: Real>(psi: &WaveFunction<T>, kernel: &Kernel<T>) -> Result<f64> {
    let support = psi.support_nodes();
    let mut mus: Vec<T> = support.iter().map(|&i| psi.grid().masses()[i]).collect();
    mus.sort_by(|a, b| a.partial_cmp(b).expect("finite masses"));
    mus.dedup();
    let report = match kernel {
        Kernel::Translation(k) => {
            if k.n_sigma() != psi.channels().len() {
                return Err(Error::KernelShape(format!(
                    "kernel has {} columns, state has {} channels",
                    k.n_sigma(),
                    psi.channels().len()
                )));
            }
            certify_kernel(kernel, &mus)
        }
        Kernel::Poincare(k) => {
            if let Some(c) = psi.channels().channels().iter().find(|c| c.sigma as usize >= k.n_sigma()) {
                return Err(Error::KernelShape(format!("state channel σ = {} exceeds kernel columns", c.sigma)));
            }
            certify_poincare_sectors(k, &mus, &occupied_spins(psi))
        }
    };
    if !report.isometric {
        return Err(Error::KernelNotNormalized { residual: report.isometry_residual });
    }
    Ok(report.isometry_residual)
}

/// `T(μ) = −i Σ_γ ω_γ F^j(μ)† ∂_μ F^j(μ)` from the kernel's own derivative.
pub fn time_delay_at<T: Real>(kernel: &Kernel<T>, j: HalfInt, mu: T) -> CMatrix<T> {
    let (f, df) = match kernel {
        Kernel::Translation(k) => (k.matrix(mu), k.derivative(mu)),
        Kernel::Poincare(k) => (k.sector_matrix(j, mu), k.sector_derivative(j, mu)),
    };
    if f.rows() == 0 {
        return CMatrix::zeros(f.cols(), f.cols());
    }
    (&f.adjoint() * &df).scale(cplx(T::zero(), -T::one()))
}

/// Channel positions grouped by `(j, m)`, each listing `(σ, position)`.
fn jm_groups<T: Real>(psi: &WaveFunction<T>) -> BTreeMap<(HalfInt, HalfInt), Vec<(usize, usize)>> {
    let mut map: BTreeMap<(HalfInt, HalfInt), Vec<(usize, usize)>> = BTreeMap::new();
    for (p, c) in psi.channels().channels().iter().enumerate() {
        map.entry((c.j, c.m)).or_default().push((c.sigma as usize, p));
    }
    map
}

/// Channel positions grouped by `(σ, j)`, each listing positions in ascending `m` (`None` for absent `m`).
fn multiplets<T: Real>(psi: &WaveFunction<T>) -> Vec<(HalfInt, Vec<Option<usize>>)> {
    psi.sector_map()
        .into_iter()
        .map(|((_, j), ms)| {
            let mut slots = vec![None; j.multiplicity()];
            for (m, p) in ms {
                if let Some(i) = j.index_of(m) {
                    slots[i] = Some(p);
                }
            }
            (j, slots)
        })
        .collect()
}

fn derivatives<T: Real>(psi: &WaveFunction<T>) -> Result<Vec<WaveFunction<T>>> {
    (0..psi.dim()).map(|a| psi.partial_derivative(a)).collect()
}

/// Sum over nodes in index order of a per-node vector contribution.
fn ordered_sum<T: Real>(parts: Vec<Vec<C<T>>>, d: usize) -> Vec<C<T>> {
    parts.into_iter().fold(vec![re(T::zero()); d], |mut acc, p| {
        for (a, v) in acc.iter_mut().zip(p) {
            *a = *a + v;
        }
        acc
    })
}

/// `C_β = −i ∫ Σ ψ̄ ∂_β ψ`, covariant index.
fn c_term<T: Real>(psi: &WaveFunction<T>, dpsi: &[WaveFunction<T>]) -> Vec<C<T>> {
    let grid = psi.grid();
    let nc = psi.channels().len();
    let d = psi.dim();
    let parts: Vec<Vec<C<T>>> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let w = grid.weights()[i];
            (0..d)
                .map(|b| {
                    let s = (0..nc).fold(re(T::zero()), |acc, c| acc + psi.amplitude(c, i).conj() * dpsi[b].amplitude(c, i));
                    s * cplx(T::zero(), -w)
                })
                .collect()
        })
        .collect();
    ordered_sum(parts, d)
}

/// `B_β = ∫ (k_β/μ) Σ ψ̄ T ψ`, covariant index.
fn b_term<T: Real>(psi: &WaveFunction<T>, kernel: &Kernel<T>) -> Vec<C<T>> {
    let grid = psi.grid();
    let d = psi.dim();
    let groups = jm_groups(psi);
    let parts: Vec<Vec<C<T>>> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let k = &grid.nodes()[i];
            let mu = grid.masses()[i];
            let q = match kernel {
                Kernel::Translation(_) => {
                    let t = time_delay_at(kernel, HalfInt::ZERO, mu);
                    let v: Vec<C<T>> = (0..psi.channels().len()).map(|c| psi.amplitude(c, i)).collect();
                    quadratic(&t, &v, &v)
                }
                Kernel::Poincare(_) => {
                    let mut cache: BTreeMap<HalfInt, CMatrix<T>> = BTreeMap::new();
                    let mut acc = re(T::zero());
                    for ((j, _), members) in &groups {
                        let t = cache.entry(*j).or_insert_with(|| time_delay_at(kernel, *j, mu));
                        for &(s1, p1) in members {
                            for &(s2, p2) in members {
                                acc = acc + psi.amplitude(p1, i).conj() * t[(s1, s2)] * psi.amplitude(p2, i);
                            }
                        }
                    }
                    acc
                }
            };
            let w = grid.weights()[i];
            (0..d).map(|b| q * (k.lower(b) / mu * w)).collect()
        })
        .collect();
    ordered_sum(parts, d)
}

fn quadratic<T: Real>(m: &CMatrix<T>, u: &[C<T>], v: &[C<T>]) -> C<T> {
    let mv = m.mul_vec(v);
    u.iter().zip(&mv).fold(re(T::zero()), |acc, (a, b)| acc + a.conj() * *b)
}

/// `A_β = Σ_γ ω_γ ∫ h† S_β h` over the blocks of the occupied entries, covariant index.
fn a_term_general<T: Real>(psi: &WaveFunction<T>, kernel: &PoincareKernel<T>) -> Result<Vec<C<T>>> {
    let grid = psi.grid();
    let spins = occupied_spins(psi);
    let mut total = vec![re(T::zero()); 4];
    for group in kernel.groups() {
        if group.irrep.dim() == 1 {
            continue;
        }
        let entries: Vec<usize> = group.entries.iter().copied().filter(|&e| spins.contains(&kernel.entries()[e].j)).collect();
        if entries.is_empty() {
            continue;
        }
        let mut idx = Vec::new();
        for &e in &entries {
            idx.extend(group.irrep.block_indices(kernel.entries()[e].j).expect("admissible spin"));
        }
        let rot = group.irrep.rotation_generators();
        let boost = group.irrep.boost_generators();
        let m: [CMatrix<T>; 3] = std::array::from_fn(|t| rot[t].select(&idx, &idx));
        let n: [CMatrix<T>; 3] = std::array::from_fn(|t| boost[t].select(&idx, &idx));
        let parts: Vec<Vec<C<T>>> = (0..grid.len())
            .into_par_iter()
            .map(|i| -> Result<Vec<C<T>>> {
                let mu = grid.masses()[i];
                let h: Vec<C<T>> = entries.iter().flat_map(|&e| entry_projection(psi, kernel, e, i, mu)).collect();
                if h.iter().all(|v| v.norm_sqr() == T::zero()) {
                    return Ok(vec![re(T::zero()); 4]);
                }
                let s = s_from_generators(&m, &n, &grid.nodes()[i])?;
                let w = grid.weights()[i] * group.omega;
                Ok(s.iter().map(|sb| quadratic(sb, &h, &h) * w).collect())
            })
            .collect::<Result<_>>()?;
        for (a, v) in total.iter_mut().zip(ordered_sum(parts, 4)) {
            *a = *a + v;
        }
    }
    Ok(total)
}

/// Simplified `A_β` for kernels with `N` vanishing on the diagonal blocks: `A_0 = 0`,
/// `A_r = ∫ ε^{rst} k^s / (μ(μ + k⁰)) Σ ψ̄ M^t ψ`.
fn a_term_quasi<T: Real>(psi: &WaveFunction<T>) -> Vec<C<T>> {
    let grid = psi.grid();
    let mults = multiplets(psi);
    let gens: BTreeMap<HalfInt, [CMatrix<T>; 3]> = mults.iter().map(|(j, _)| (*j, spin_generators(*j))).collect();
    let parts: Vec<Vec<C<T>>> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let k = &grid.nodes()[i];
            let mu = grid.masses()[i];
            let kv = [k.get(1), k.get(2), k.get(3)];
            let pref = grid.weights()[i] / (mu * (mu + k.time()));
            let mut spin = [re(T::zero()); 3];
            for (j, slots) in &mults {
                if *j == HalfInt::ZERO {
                    continue;
                }
                let v: Vec<C<T>> = slots.iter().map(|p| p.map_or(re(T::zero()), |p| psi.amplitude(p, i))).collect();
                for (t, g) in gens[j].iter().enumerate() {
                    spin[t] = spin[t] + quadratic(g, &v, &v);
                }
            }
            let mut out = vec![re(T::zero()); 4];
            for r in 0..3 {
                for s in 0..3 {
                    for t in 0..3 {
                        let e = levi_civita(r, s, t);
                        if e != 0 {
                            out[r + 1] = out[r + 1] + spin[t] * (T::lit(e as f64) * kv[s] * pref);
                        }
                    }
                }
            }
            out
        })
        .collect();
    ordered_sum(parts, 4)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ATermRoute {
    /// Simplified form for strict and quasi-baricentric kernels, full `S` matrices otherwise.
    #[default]
    Auto,
    /// Full `S` matrices regardless of the class.
    General,
}

fn raise<T: Real>(v: Vec<C<T>>) -> Vec<C<T>> {
    v.into_iter().enumerate().map(|(a, x)| x * metric::<T>(a)).collect()
}

/// The three derivative-route contributions with contravariant index.
pub fn abc_terms<T: Real>(psi: &WaveFunction<T>, kernel: &Kernel<T>, route: ATermRoute) -> Result<AbcTerms<T>> {
    let d = psi.dim();
    let a = match kernel {
        Kernel::Translation(_) => vec![re(T::zero()); d],
        Kernel::Poincare(k) => {
            if d != 4 {
                return Err(Error::UnsupportedDimension(d));
            }
            let simple = matches!(k.classify(), BaricentricClass::StrictBaricentric | BaricentricClass::QuasiBaricentric);
            if simple && route == ATermRoute::Auto {
                a_term_quasi(psi)
            } else {
                a_term_general(psi, k)?
            }
        }
    };
    let dpsi = derivatives(psi)?;
    Ok(AbcTerms { a: raise(a), b: raise(b_term(psi, kernel)), c: raise(c_term(psi, &dpsi)) })
}

/// `(ψ, X^α ψ) = A^α + B^α + C^α`. Requires the kernel to be isometric on the occupied sectors.
pub fn mean_coordinates_abc<T: Real>(psi: &WaveFunction<T>, kernel: &Kernel<T>) -> Result<CoordinateEstimate<T>> {
    let residual = require_normalized(psi, kernel)?;
    let terms = abc_terms(psi, kernel, ATermRoute::Auto)?;
    let values: Vec<C<T>> = (0..psi.dim()).map(|a| terms.a[a] + terms.b[a] + terms.c[a]).collect();
    Ok(CoordinateEstimate {
        route: CoordinateRoute::Abc,
        diagnostics: CoordinateDiagnostics {
            status: EstimateStatus::Ok,
            capture_fraction: None,
            normalization_residual: Some(residual),
            max_imaginary: max_im(&values),
            terms: Some(terms),
        },
        values,
    })
}

/// Spin part `L̂^{αβ}` acting on one `(σ, j)` multiplet at momentum `k`.
fn spin_lorentz<T: Real>(gens: &[CMatrix<T>; 3], k: &[T; 4], mu: T, v: &[C<T>]) -> [[Vec<C<T>>; 4]; 4] {
    let n = v.len();
    let mv: [Vec<C<T>>; 3] = std::array::from_fn(|t| gens[t].mul_vec(v));
    let mut out: [[Vec<C<T>>; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| vec![re(T::zero()); n]));
    for r in 0..3 {
        for s in 0..3 {
            for t in 0..3 {
                let e = levi_civita(r, s, t);
                if e == 0 {
                    continue;
                }
                let e = T::lit(e as f64);
                let boost = -e * k[s + 1] / (mu + k[0]);
                for i in 0..n {
                    out[r + 1][s + 1][i] = out[r + 1][s + 1][i] + mv[t][i] * e;
                    out[0][r + 1][i] = out[0][r + 1][i] + mv[t][i] * boost;
                    out[r + 1][0][i] = out[r + 1][0][i] - mv[t][i] * boost;
                }
            }
        }
    }
    out
}

/// `(ψ, X^α ψ)` with `X^α = (P·P)^{-1} (P_β L^{αβ} − P^α (D − 2i))` applied to `ψ` directly.
pub fn mean_coordinates_operator<T: Real>(psi: &WaveFunction<T>, kernel: &Kernel<T>) -> Result<CoordinateEstimate<T>> {
    let Kernel::Poincare(pk) = kernel else { return Err(Error::KernelNotQuasiBaricentric) };
    if !matches!(pk.classify(), BaricentricClass::StrictBaricentric | BaricentricClass::QuasiBaricentric) {
        return Err(Error::KernelNotQuasiBaricentric);
    }
    if psi.dim() != 4 {
        return Err(Error::UnsupportedDimension(psi.dim()));
    }
    let residual = require_normalized(psi, kernel)?;
    let dpsi = derivatives(psi)?;
    let grid = psi.grid();
    let mults = multiplets(psi);
    let gens: BTreeMap<HalfInt, [CMatrix<T>; 3]> = mults.iter().map(|(j, _)| (*j, spin_generators(*j))).collect();
    let groups = jm_groups(psi);
    let nc = psi.channels().len();
    let parts: Vec<Vec<C<T>>> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let kv = &grid.nodes()[i];
            let k = [kv.get(0), kv.get(1), kv.get(2), kv.get(3)];
            let k_low: [T; 4] = std::array::from_fn(|a| k[a] * metric::<T>(a));
            let mu = grid.masses()[i];
            let psi_i: Vec<C<T>> = (0..nc).map(|c| psi.amplitude(c, i)).collect();
            // ∂^β ψ per channel
            let up: [Vec<C<T>>; 4] = std::array::from_fn(|b| (0..nc).map(|c| dpsi[b].amplitude(c, i) * metric::<T>(b)).collect());
            // (D − 2i) ψ = i k^β ∂_β ψ − μ T ψ
            let mut dil: Vec<C<T>> = (0..nc)
                .map(|c| (0..4).fold(re(T::zero()), |acc, b| acc + dpsi[b].amplitude(c, i) * k[b]) * cplx(T::zero(), T::one()))
                .collect();
            for ((j, _), members) in &groups {
                let t = time_delay_at(kernel, *j, mu);
                for &(s1, p1) in members {
                    let tp = members.iter().fold(re(T::zero()), |acc, &(s2, p2)| acc + t[(s1, s2)] * psi_i[p2]);
                    dil[p1] = dil[p1] - tp * mu;
                }
            }
            // k_β L^{αβ} ψ, orbital part i(k^α ∂^β − k^β ∂^α) plus spin part
            let mut kl: [Vec<C<T>>; 4] = std::array::from_fn(|_| vec![re(T::zero()); nc]);
            for a in 0..4 {
                for b in 0..4 {
                    if a == b {
                        continue;
                    }
                    for c in 0..nc {
                        let orb = (up[b][c] * k[a] - up[a][c] * k[b]) * cplx(T::zero(), T::one());
                        kl[a][c] = kl[a][c] + orb * k_low[b];
                    }
                }
            }
            for (j, slots) in &mults {
                if *j == HalfInt::ZERO {
                    continue;
                }
                let v: Vec<C<T>> = slots.iter().map(|p| p.map_or(re(T::zero()), |p| psi_i[p])).collect();
                let l = spin_lorentz(&gens[j], &k, mu, &v);
                for a in 0..4 {
                    for b in 0..4 {
                        for (m, p) in slots.iter().enumerate() {
                            if let Some(p) = p {
                                kl[a][*p] = kl[a][*p] + l[a][b][m] * k_low[b];
                            }
                        }
                    }
                }
            }
            let w = grid.weights()[i] / (mu * mu);
            (0..4)
                .map(|a| {
                    (0..nc).fold(re(T::zero()), |acc, c| acc + psi_i[c].conj() * (kl[a][c] - dil[c] * k[a])) * w
                })
                .collect()
        })
        .collect();
    let values = ordered_sum(parts, 4);
    Ok(CoordinateEstimate {
        route: CoordinateRoute::Operator,
        diagnostics: CoordinateDiagnostics {
            status: EstimateStatus::Ok,
            capture_fraction: None,
            normalization_residual: Some(residual),
            max_imaginary: max_im(&values),
            terms: None,
        },
        values,
    })
}

/// Casimir eigenvalues of one sector: `C1 = μ²`, `C2 = μ² j(j+1)` on the state side,
/// `C3 = M² + c² − 1`, `C4 = iMc` on the kernel side.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CasimirValues<T> {
    pub c1: T,
    pub c2: T,
    pub c3: C<T>,
    pub c4: C<T>,
}

pub fn casimir_values<T: Real>(mu: T, j: HalfInt, label: &IrrepLabel<T>) -> CasimirValues<T> {
    let jv: T = j.value();
    CasimirValues { c1: mu * mu, c2: mu * mu * jv * (jv + T::one()), c3: label.casimir_c3(), c4: label.casimir_c4() }
}

/// Spectral value of `Ξ` on the sector `(γ, j, μ)`: `μ^{-2} (j(j+1) − M² − c² + 1)`.
pub fn xi_argument<T: Real>(mu: T, j: HalfInt, label: &IrrepLabel<T>) -> T {
    let jv: T = j.value();
    (jv * (jv + T::one()) - label.casimir_c3().re) / (mu * mu)
}

/// `ρ(f(Ξ)ψ, 0)`, with `f` inserted per sector through its spectral value.
pub fn apply_xi_filter<T: Real>(
    psi: &WaveFunction<T>,
    kernel: &PoincareKernel<T>,
    f: &(dyn Fn(T) -> T + Sync),
) -> Result<T> {
    let filter = |mu: T, j: HalfInt, g: &GammaLabel<T>| f(xi_argument(mu, j, &g.irrep));
    let origin = crate::kinematics::FourVector::zero(psi.dim())?;
    let kernel = Kernel::Poincare(kernel.clone());
    Ok(density_at(psi, &kernel, &[origin], Some(&filter))?[0])
}

/// `T^j(μ)` sampled on a μ-grid with `∂F/∂μ` from finite differences over the samples.
#[derive(Clone, Debug)]
pub struct ProperTimeDelay<T> {
    pub mus: Vec<T>,
    pub sectors: Vec<(HalfInt, Vec<CMatrix<T>>)>,
}

impl<T: Real> ProperTimeDelay<T> {
    pub fn hermiticity_residual(&self) -> T {
        self.sectors.iter().flat_map(|(_, ms)| ms.iter().map(|m| m.hermiticity_residual())).fold(T::zero(), T::max)
    }

    pub fn max_abs(&self) -> T {
        self.sectors.iter().flat_map(|(_, ms)| ms.iter().map(|m| m.max_abs())).fold(T::zero(), T::max)
    }

    pub fn sector(&self, j: HalfInt) -> Option<&[CMatrix<T>]> {
        self.sectors.iter().find(|(s, _)| *s == j).map(|(_, m)| m.as_slice())
    }
}

/// Weights of the first derivative at `x0` over the nodes `xs` (Fornberg's recursion).
pub fn fornberg_first_derivative<T: Real>(x0: T, xs: &[T]) -> Vec<T> {
    let n = xs.len();
    let mut c = vec![[T::zero(); 2]; n];
    c[0][0] = T::one();
    let mut c1 = T::one();
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(1);
        let mut c2 = T::one();
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 = c2 * c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (T::from_count(k) * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - T::from_count(k) * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|w| w[1]).collect()
}

const STENCIL: usize = 5;

/// `T^j_{σ'σ}(μ) = −i Σ_γ ω_γ conj(F^j_{γσ'}) ∂_μ F^j_{γσ}` on `mus` (increasing), every spin of the kernel.
/// Translation kernels give one sector labelled `j = 0`.
pub fn proper_time_delay<T: Real>(kernel: &Kernel<T>, mus: &[T]) -> Result<ProperTimeDelay<T>> {
    if mus.len() < 3 {
        return Err(Error::TooFewNodes { needed: 3, got: mus.len() });
    }
    if mus.windows(2).any(|w| !(w[1] > w[0])) || !(mus[0] > T::zero()) {
        return Err(Error::InvalidArgument("μ samples must be positive and increasing".into()));
    }
    let spins = match kernel {
        Kernel::Translation(_) => vec![HalfInt::ZERO],
        Kernel::Poincare(k) => k.spins(),
    };
    let width = STENCIL.min(mus.len());
    let sectors = spins
        .into_iter()
        .map(|j| {
            let sample = |mu: T| match kernel {
                Kernel::Translation(k) => k.matrix(mu),
                Kernel::Poincare(k) => k.sector_matrix(j, mu),
            };
            let constant = match kernel {
                Kernel::Translation(k) => k.is_mu_independent(),
                Kernel::Poincare(k) => k.entries().iter().filter(|e| e.j == j).all(|e| e.row.iter().all(|f| f.is_constant())),
            };
            let f: Vec<CMatrix<T>> = mus.iter().map(|&m| sample(m)).collect();
            if constant {
                let n = f[0].cols();
                return (j, vec![CMatrix::zeros(n, n); mus.len()]);
            }
            let mats = (0..mus.len())
                .map(|i| {
                    let lo = i.saturating_sub(width / 2).min(mus.len() - width);
                    let w = fornberg_first_derivative(mus[i], &mus[lo..lo + width]);
                    let (r, c) = (f[i].rows(), f[i].cols());
                    let df = CMatrix::from_fn(r, c, |a, b| {
                        w.iter().enumerate().fold(re(T::zero()), |acc, (q, wq)| acc + f[lo + q][(a, b)] * *wq)
                    });
                    if r == 0 {
                        CMatrix::zeros(c, c)
                    } else {
                        (&f[i].adjoint() * &df).scale(cplx(T::zero(), -T::one()))
                    }
                })
                .collect();
            (j, mats)
        })
        .collect();
    Ok(ProperTimeDelay { mus: mus.to_vec(), sectors })
}
