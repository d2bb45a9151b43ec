//! Kernels `K_γσ(k)` and `F^j_γσ(μ)` with their boundedness and isometry checks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::HalfInt;
use crate::linalg::CMatrix;
use crate::mu_function::MuFunction;
use crate::scalar::{re, Real, C};
use crate::unirep::{build_generators, IrrepLabel, Series, TruncatedIrrep};

/// Operator-norm slack in the contraction test.
pub const CONTRACTION_TOL: f64 = 1e-10;
/// Entrywise slack in the isometry test.
pub const ISOMETRY_TOL: f64 = 1e-10;

/// Translation-covariant kernel. Entry `(γ, σ)` is a function of `μ(k)`; `σ`
/// runs over the channel positions of the state.
#[derive(Clone, Debug, PartialEq)]
pub struct TranslationKernel<T> {
    n_gamma: usize,
    n_sigma: usize,
    entries: Vec<MuFunction<T>>,
}

impl<T: Real> TranslationKernel<T> {
    pub fn new(n_gamma: usize, n_sigma: usize, entries: Vec<MuFunction<T>>) -> Result<Self> {
        if n_gamma == 0 || n_sigma == 0 {
            return Err(Error::KernelShape("kernel needs at least one row and one column".into()));
        }
        if entries.len() != n_gamma * n_sigma {
            return Err(Error::KernelShape(format!(
                "{} entries for a {n_gamma}×{n_sigma} kernel",
                entries.len()
            )));
        }
        Ok(Self { n_gamma, n_sigma, entries })
    }

    /// `K = 1` on `n` channels.
    pub fn flat(n: usize) -> Self {
        let entries = (0..n * n)
            .map(|i| if i / n == i % n { MuFunction::constant(T::one()) } else { MuFunction::zero() })
            .collect();
        Self { n_gamma: n, n_sigma: n, entries }
    }

    /// Two-channel rotation by the angle `rate·μ^power`.
    pub fn rotation(rate: T, power: T) -> Self {
        let cos = MuFunction::Cos { amplitude: T::one(), coeff: rate, power };
        let sin = MuFunction::Sin { amplitude: T::one(), coeff: rate, power };
        let msin = MuFunction::Sin { amplitude: -T::one(), coeff: rate, power };
        Self { n_gamma: 2, n_sigma: 2, entries: vec![cos.clone(), msin, sin, cos] }
    }

    /// Single channel `e^{i b μ^p}`.
    pub fn phase(coeff: T, power: T) -> Self {
        Self { n_gamma: 1, n_sigma: 1, entries: vec![MuFunction::Phase { amplitude: T::one(), coeff, power }] }
    }

    /// Every entry multiplied by `s`.
    pub fn scaled(&self, s: T) -> Self {
        let entries = self.entries.iter().map(|f| scale_fn(f, s)).collect();
        Self { n_gamma: self.n_gamma, n_sigma: self.n_sigma, entries }
    }

    pub fn n_gamma(&self) -> usize {
        self.n_gamma
    }

    pub fn n_sigma(&self) -> usize {
        self.n_sigma
    }

    pub fn entry(&self, gamma: usize, sigma: usize) -> &MuFunction<T> {
        &self.entries[gamma * self.n_sigma + sigma]
    }

    /// `K(μ)` as an `n_γ × n_σ` matrix.
    pub fn matrix(&self, mu: T) -> CMatrix<T> {
        CMatrix::from_fn(self.n_gamma, self.n_sigma, |g, s| self.entry(g, s).eval(mu))
    }

    /// `dK/dμ` by central differences.
    pub fn derivative(&self, mu: T) -> CMatrix<T> {
        CMatrix::from_fn(self.n_gamma, self.n_sigma, |g, s| self.entry(g, s).derivative(mu))
    }

    pub fn is_mu_independent(&self) -> bool {
        self.entries.iter().all(|f| f.is_constant())
    }
}

fn scale_fn<T: Real>(f: &MuFunction<T>, s: T) -> MuFunction<T> {
    match f {
        MuFunction::Constant(v) => MuFunction::Constant(*v * s),
        MuFunction::Phase { amplitude, coeff, power } => MuFunction::Phase { amplitude: *amplitude * s, coeff: *coeff, power: *power },
        MuFunction::Cos { amplitude, coeff, power } => MuFunction::Cos { amplitude: *amplitude * s, coeff: *coeff, power: *power },
        MuFunction::Sin { amplitude, coeff, power } => MuFunction::Sin { amplitude: *amplitude * s, coeff: *coeff, power: *power },
        MuFunction::Table { mu, values } => {
            MuFunction::Table { mu: mu.clone(), values: values.iter().map(|v| *v * s).collect() }
        }
    }
}

/// Label `γ = (ν, M, c)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaLabel<T> {
    pub nu: u32,
    pub irrep: IrrepLabel<T>,
}

/// Row `F^j_{γσ}(μ)`, `σ = 0..n_σ`, of the kernel with weight `ω_γ`.
#[derive(Clone, Debug, PartialEq)]
pub struct PoincareEntry<T> {
    pub gamma: GammaLabel<T>,
    pub omega: T,
    pub j: HalfInt,
    pub row: Vec<MuFunction<T>>,
}

/// Poincaré-covariant kernel with discrete `ω`.
#[derive(Clone, Debug)]
pub struct PoincareKernel<T> {
    n_sigma: usize,
    entries: Vec<PoincareEntry<T>>,
    truncation: HalfInt,
    groups: Vec<GammaGroup<T>>,
}

/// Entries sharing one `γ`, with the truncated irrep they use.
#[derive(Clone, Debug)]
pub struct GammaGroup<T> {
    pub gamma: GammaLabel<T>,
    pub omega: T,
    pub entries: Vec<usize>,
    pub irrep: TruncatedIrrep<T>,
}

/// Classification by the support pattern of `F` over `(M, c, j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaricentricClass {
    StrictBaricentric,
    QuasiBaricentric,
    Neither,
}

fn same_gamma<T: Real>(a: &GammaLabel<T>, b: &GammaLabel<T>) -> bool {
    a.nu == b.nu && a.irrep.m == b.irrep.m && a.irrep.c == b.irrep.c
}

impl<T: Real> PoincareKernel<T> {
    /// `truncation` is the `j_max` of every irrep; the trivial irrep ignores it.
    pub fn new(n_sigma: usize, entries: Vec<PoincareEntry<T>>, truncation: HalfInt) -> Result<Self> {
        if n_sigma == 0 || entries.is_empty() {
            return Err(Error::KernelShape("kernel needs at least one entry and one column".into()));
        }
        let mut groups: Vec<GammaGroup<T>> = Vec::new();
        for (i, e) in entries.iter().enumerate() {
            if e.row.len() != n_sigma {
                return Err(Error::KernelShape(format!("row {i} has {} columns, expected {n_sigma}", e.row.len())));
            }
            if !(e.omega > T::zero()) {
                return Err(Error::KernelShape(format!("row {i}: weight must be positive")));
            }
            let series = e.gamma.irrep.series()?;
            let l0 = e.gamma.irrep.m.abs();
            let admissible = if series == Series::Trivial {
                e.j == HalfInt::ZERO
            } else {
                e.j >= l0 && (e.j - l0).is_integral() && e.j <= truncation
            };
            if !admissible {
                return Err(Error::KernelShape(format!(
                    "row {i}: spin {} is not carried by the irrep (M = {}, c = {})",
                    e.j, e.gamma.irrep.m, e.gamma.irrep.c
                )));
            }
            match groups.iter_mut().find(|g| same_gamma(&g.gamma, &e.gamma)) {
                Some(g) => {
                    if g.omega != e.omega {
                        return Err(Error::KernelShape(format!("row {i}: weight differs within one γ")));
                    }
                    if g.entries.iter().any(|&k| entries[k].j == e.j) {
                        return Err(Error::KernelShape(format!("row {i}: duplicate (γ, j)")));
                    }
                    g.entries.push(i);
                }
                None => {
                    let jm = if series == Series::Trivial { HalfInt::ZERO } else { truncation.max(l0) };
                    let irrep = build_generators(e.gamma.irrep, jm)?;
                    groups.push(GammaGroup { gamma: e.gamma, omega: e.omega, entries: vec![i], irrep });
                }
            }
        }
        Ok(Self { n_sigma, entries, truncation, groups })
    }

    /// Quasi-baricentric kernel: per spin `j`, rows `(ω, F)` on the irrep `(M = j, c)` with
    /// `c = 1` at `j = 0` and `c = 0` otherwise. Rows get `ν = 0, 1, ...` within each `j`.
    pub fn quasi(n_sigma: usize, sectors: Vec<(HalfInt, Vec<(T, Vec<MuFunction<T>>)>)>, truncation: HalfInt) -> Result<Self> {
        let mut entries = Vec::new();
        for (j, rows) in sectors {
            let c = if j == HalfInt::ZERO { T::one() } else { T::zero() };
            let irrep = IrrepLabel::new(j, re(c))?;
            for (nu, (omega, row)) in rows.into_iter().enumerate() {
                entries.push(PoincareEntry { gamma: GammaLabel { nu: nu as u32, irrep }, omega, j, row });
            }
        }
        Self::new(n_sigma, entries, truncation)
    }

    pub fn n_sigma(&self) -> usize {
        self.n_sigma
    }

    pub fn entries(&self) -> &[PoincareEntry<T>] {
        &self.entries
    }

    pub fn truncation(&self) -> HalfInt {
        self.truncation
    }

    pub fn groups(&self) -> &[GammaGroup<T>] {
        &self.groups
    }

    /// Spins with at least one row.
    pub fn spins(&self) -> Vec<HalfInt> {
        let mut v: Vec<HalfInt> = self.entries.iter().map(|e| e.j).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Rows `√ω_γ F^j_{γσ}(μ)` stacked over `γ`; zero rows when no entry carries `j`.
    pub fn sector_matrix(&self, j: HalfInt, mu: T) -> CMatrix<T> {
        let rows: Vec<&PoincareEntry<T>> = self.entries.iter().filter(|e| e.j == j).collect();
        CMatrix::from_fn(rows.len(), self.n_sigma, |g, s| rows[g].row[s].eval(mu) * rows[g].omega.sqrt())
    }

    /// Same stacking for `dF/dμ`.
    pub fn sector_derivative(&self, j: HalfInt, mu: T) -> CMatrix<T> {
        let rows: Vec<&PoincareEntry<T>> = self.entries.iter().filter(|e| e.j == j).collect();
        CMatrix::from_fn(rows.len(), self.n_sigma, |g, s| rows[g].row[s].derivative(mu) * rows[g].omega.sqrt())
    }

    pub fn is_mu_independent(&self) -> bool {
        self.entries.iter().all(|e| e.row.iter().all(|f| f.is_constant()))
    }

    pub fn classify(&self) -> BaricentricClass {
        classify_kernel(self)
    }
}

pub fn classify_kernel<T: Real>(kernel: &PoincareKernel<T>) -> BaricentricClass {
    let tol = T::tol(1e-12);
    let is = |c: C<T>, v: T| (c - re(v)).norm() <= tol;
    let strict = kernel
        .entries
        .iter()
        .all(|e| e.j == HalfInt::ZERO && e.gamma.irrep.m == HalfInt::ZERO && (is(e.gamma.irrep.c, T::one()) || is(e.gamma.irrep.c, -T::one())));
    if strict {
        return BaricentricClass::StrictBaricentric;
    }
    let quasi = kernel.entries.iter().all(|e| {
        e.gamma.irrep.m == e.j
            && if e.j == HalfInt::ZERO { is(e.gamma.irrep.c, T::one()) } else { is(e.gamma.irrep.c, T::zero()) }
    });
    if quasi {
        BaricentricClass::QuasiBaricentric
    } else {
        BaricentricClass::Neither
    }
}

/// Either kind of kernel.
#[derive(Clone, Debug)]
pub enum Kernel<T> {
    Translation(TranslationKernel<T>),
    Poincare(PoincareKernel<T>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    Translation,
    Poincare,
}

/// Per-sector results of [`certify_kernel`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorCertificate {
    /// Twice the spin; `0` for translation kernels.
    pub two_j: i32,
    pub max_operator_norm: f64,
    pub isometry_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub kind: KernelKind,
    pub samples: usize,
    pub max_operator_norm: f64,
    pub contraction_ok: bool,
    pub isometry_residual: f64,
    pub isometric: bool,
    pub sectors: Vec<SectorCertificate>,
}

fn sector_stats<T: Real>(mats: impl Iterator<Item = CMatrix<T>>, n_sigma: usize) -> (T, T) {
    let mut norm = T::zero();
    let mut iso = T::zero();
    let eye = CMatrix::<T>::identity(n_sigma);
    for a in mats {
        let gram = if a.rows() == 0 { CMatrix::zeros(n_sigma, n_sigma) } else { &a.adjoint() * &a };
        let top = gram.hermitian_eigenvalues().into_iter().fold(T::zero(), T::max);
        norm = norm.max(top.max(T::zero()).sqrt());
        iso = iso.max((&gram - &eye).max_abs());
    }
    (norm, iso)
}

/// Contraction and isometry over the sample masses. For Poincaré kernels every
/// spin carried by the kernel is checked.
pub fn certify_kernel<T: Real>(kernel: &Kernel<T>, mus: &[T]) -> CertificationReport {
    match kernel {
        Kernel::Translation(k) => {
            let (norm, iso) = sector_stats(mus.iter().map(|&mu| k.matrix(mu)), k.n_sigma());
            report(KernelKind::Translation, mus.len(), vec![(0, norm, iso)])
        }
        Kernel::Poincare(k) => certify_poincare_sectors(k, mus, &k.spins()),
    }
}

/// Poincaré certification restricted to the given spins (e.g. those a state occupies).
pub fn certify_poincare_sectors<T: Real>(kernel: &PoincareKernel<T>, mus: &[T], spins: &[HalfInt]) -> CertificationReport {
    let sectors = spins
        .iter()
        .map(|&j| {
            let (n, i) = sector_stats(mus.iter().map(|&mu| kernel.sector_matrix(j, mu)), kernel.n_sigma());
            (j.twice(), n, i)
        })
        .collect();
    report(KernelKind::Poincare, mus.len(), sectors)
}

fn report<T: Real>(kind: KernelKind, samples: usize, sectors: Vec<(i32, T, T)>) -> CertificationReport {
    let sectors: Vec<SectorCertificate> = sectors
        .into_iter()
        .map(|(two_j, n, i)| SectorCertificate { two_j, max_operator_norm: n.as_f64(), isometry_residual: i.as_f64() })
        .collect();
    let max_operator_norm = sectors.iter().map(|s| s.max_operator_norm).fold(0.0, f64::max);
    let isometry_residual = sectors.iter().map(|s| s.isometry_residual).fold(0.0, f64::max);
    CertificationReport {
        kind,
        samples,
        max_operator_norm,
        contraction_ok: max_operator_norm <= 1.0 + CONTRACTION_TOL,
        isometry_residual,
        isometric: isometry_residual <= ISOMETRY_TOL,
        sectors,
    }
}
