//! Truncated unitary irreducible representations of SL(2,C).
//!
//! The carrier space of the irrep `(M, c)` is spanned by `(l, m)` with
//! `l = |M|, |M|+1, ...` and `m = −l..l`; it is cut at `l ≤ j_max`. Inside
//! each `l` block the basis is the one of [`crate::kinematics`]. The boost
//! generator `N³` couples `l` to `l ± 1` and is real symmetric for every
//! unitary label, which makes `exp(−iχN³)` cheap through a per-`m`
//! eigendecomposition.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{rotation_taking_z_to, spin_generators, symmetric_power, FourVector, HalfInt, Sl2c};
use crate::linalg::{symmetric_eigen, CMatrix};
use crate::scalar::{cis, cplx, i_unit, re, Real, C};

const LEAKAGE_LIMIT: f64 = 1e-8;
const SUGGESTION_CAP: i32 = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Series {
    Principal,
    Supplementary,
    Trivial,
}

/// Irrep label `(M, c)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IrrepLabel<T> {
    pub m: HalfInt,
    pub c: C<T>,
}

impl<T: Real> IrrepLabel<T> {
    pub fn new(m: HalfInt, c: C<T>) -> Result<Self> {
        let label = Self { m, c };
        label.series()?;
        Ok(label)
    }

    /// Principal series `(M, iρ)`.
    pub fn principal(m: HalfInt, rho: T) -> Self {
        Self { m, c: cplx(T::zero(), rho) }
    }

    /// Trivial representation `(0, ±1)`.
    pub fn trivial(positive: bool) -> Self {
        let s = if positive { T::one() } else { -T::one() };
        Self { m: HalfInt::ZERO, c: re(s) }
    }

    pub fn series(&self) -> Result<Series> {
        let tol = T::tol(1e-12);
        let (cr, ci) = (self.c.re, self.c.im);
        if self.m == HalfInt::ZERO && ci.abs() <= tol && ((cr - T::one()).abs() <= tol || (cr + T::one()).abs() <= tol) {
            return Ok(Series::Trivial);
        }
        if cr.abs() <= tol {
            return Ok(Series::Principal);
        }
        if self.m == HalfInt::ZERO && ci.abs() <= tol && cr.abs() < T::one() {
            return Ok(Series::Supplementary);
        }
        Err(Error::InvalidLabel(format!("M = {}, c = {} + {}i", self.m, cr, ci)))
    }

    /// `M² + c² − 1`.
    pub fn casimir_c3(&self) -> C<T> {
        let m: T = self.m.value();
        re(m * m) + self.c * self.c - re(T::one())
    }

    /// `iMc`.
    pub fn casimir_c4(&self) -> C<T> {
        i_unit::<T>() * re(self.m.value::<T>()) * self.c
    }
}

/// Per-`m` spectral data of `N³`.
#[derive(Clone, Debug)]
struct MBlock<T> {
    /// Twice the label `m`.
    m2: i32,
    /// Basis indices of `(l, m)` for increasing `l`.
    rows: Vec<usize>,
    eigenvalues: Vec<T>,
    /// Row-major eigenvector matrix, eigenvectors in columns.
    vectors: Vec<T>,
}

/// Generators of a truncated irrep.
#[derive(Clone, Debug)]
pub struct TruncatedIrrep<T> {
    label: IrrepLabel<T>,
    j_max: HalfInt,
    blocks: Vec<HalfInt>,
    offsets: Vec<usize>,
    dim: usize,
    rotation: [CMatrix<T>; 3],
    boost: [CMatrix<T>; 3],
    mblocks: Vec<MBlock<T>>,
}

/// Residuals from [`TruncatedIrrep::certify`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IrrepCertificate {
    pub rotation_rotation: f64,
    pub rotation_boost: f64,
    pub boost_boost: f64,
    pub casimir_c3: f64,
    pub casimir_c4: f64,
    pub hermiticity: f64,
    pub interior_blocks: usize,
}

impl IrrepCertificate {
    pub fn max_residual(&self) -> f64 {
        [self.rotation_rotation, self.rotation_boost, self.boost_boost, self.casimir_c3, self.casimir_c4, self.hermiticity]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// Matrix of a group element in the truncated space.
#[derive(Clone, Debug)]
pub struct IrrepMatrix<T> {
    pub matrix: CMatrix<T>,
    pub rapidity: T,
    /// Probability moved from the lower half of the blocks into the top two.
    pub leakage: T,
    /// `D†D − 1` restricted to the lower half of the blocks.
    pub unitarity_residual: T,
}

/// Builds `M^r`, `N^r` for `label`, cut at `l ≤ j_max`.
pub fn build_generators<T: Real>(label: IrrepLabel<T>, j_max: HalfInt) -> Result<TruncatedIrrep<T>> {
    let series = label.series()?;
    let l0 = label.m.abs();
    if j_max < l0 {
        return Err(Error::InvalidArgument(format!("j_max = {j_max} is below |M| = {l0}")));
    }
    let blocks: Vec<HalfInt> = if series == Series::Trivial {
        vec![HalfInt::ZERO]
    } else {
        (0..).map(|n| l0 + HalfInt::int(n)).take_while(|l| *l <= j_max).collect()
    };
    let mut offsets = Vec::with_capacity(blocks.len());
    let mut dim = 0;
    for l in &blocks {
        offsets.push(dim);
        dim += l.multiplicity();
    }

    let mut rotation: [CMatrix<T>; 3] = std::array::from_fn(|_| CMatrix::zeros(dim, dim));
    for (b, &l) in blocks.iter().enumerate() {
        let g = spin_generators::<T>(l);
        for r in 0..3 {
            for i in 0..l.multiplicity() {
                for k in 0..l.multiplicity() {
                    rotation[r][(offsets[b] + i, offsets[b] + k)] = g[r][(i, k)];
                }
            }
        }
    }

    let mut n3 = CMatrix::zeros(dim, dim);
    if series != Series::Trivial {
        let m_val: T = label.m.value();
        let imc = i_unit::<T>() * re(m_val) * label.c;
        for (b, &l) in blocks.iter().enumerate() {
            let lv: T = l.value();
            for i in 0..l.multiplicity() {
                let ms = lv - T::from_count(i);
                if l != HalfInt::ZERO {
                    n3[(offsets[b] + i, offsets[b] + i)] = imc * re(ms / (lv * (lv + T::one())));
                }
            }
            if b + 1 < blocks.len() {
                let lp: T = blocks[b + 1].value();
                let num = (re(lp * lp) - re(m_val * m_val)) * (re(lp * lp) - label.c * label.c);
                let gamma = (num / re(lp * lp * (T::lit(4.0) * lp * lp - T::one()))).sqrt();
                for i in 0..l.multiplicity() {
                    let ms = lv - T::from_count(i);
                    let v = gamma * re((lp * lp - ms * ms).max(T::zero()).sqrt());
                    let (p, q) = (offsets[b] + i, offsets[b + 1] + i + 1);
                    n3[(p, q)] = v;
                    n3[(q, p)] = v;
                }
            }
        }
    }
    let jp = &rotation[0] + &rotation[1].scale(i_unit());
    let jm = jp.adjoint();
    let np = &(&n3 * &jp) - &(&jp * &n3);
    let nm = &(&jm * &n3) - &(&n3 * &jm);
    let n1 = (&np + &nm).scale_real(T::lit(0.5));
    let n2 = (&np - &nm).scale(cplx(T::zero(), T::lit(-0.5)));

    let mut irrep = TruncatedIrrep {
        label,
        j_max,
        blocks,
        offsets,
        dim,
        rotation,
        boost: [n1, n2, n3],
        mblocks: Vec::new(),
    };
    irrep.mblocks = irrep.spectral_blocks()?;
    Ok(irrep)
}

impl<T: Real> TruncatedIrrep<T> {
    pub fn label(&self) -> IrrepLabel<T> {
        self.label
    }

    pub fn j_max(&self) -> HalfInt {
        self.j_max
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The `l` values present, ascending.
    pub fn blocks(&self) -> &[HalfInt] {
        &self.blocks
    }

    /// `M^r`, `r = 1, 2, 3` at positions `0, 1, 2`.
    pub fn rotation_generators(&self) -> &[CMatrix<T>; 3] {
        &self.rotation
    }

    /// `N^r`, `r = 1, 2, 3` at positions `0, 1, 2`.
    pub fn boost_generators(&self) -> &[CMatrix<T>; 3] {
        &self.boost
    }

    pub fn block_position(&self, l: HalfInt) -> Option<usize> {
        self.blocks.iter().position(|&b| b == l)
    }

    /// Basis index of `(l, m)`.
    pub fn index_of(&self, l: HalfInt, m: HalfInt) -> Option<usize> {
        let b = self.block_position(l)?;
        Some(self.offsets[b] + l.index_of(m)?)
    }

    /// Basis indices of block `l`, ascending in `m`.
    pub fn block_indices(&self, l: HalfInt) -> Option<std::ops::Range<usize>> {
        let b = self.block_position(l)?;
        Some(self.offsets[b]..self.offsets[b] + l.multiplicity())
    }

    /// `(l, m)` for every basis index.
    pub fn basis(&self) -> Vec<(HalfInt, HalfInt)> {
        self.blocks.iter().flat_map(|&l| l.projections().map(move |m| (l, m))).collect()
    }

    fn indices_where(&self, keep: impl Fn(HalfInt) -> bool) -> Vec<usize> {
        let mut out = Vec::new();
        for (b, &l) in self.blocks.iter().enumerate() {
            if keep(l) {
                out.extend(self.offsets[b]..self.offsets[b] + l.multiplicity());
            }
        }
        out
    }

    /// Indices of blocks `l ≤ j_max − 1`; every block when the space is exact.
    pub fn interior_indices(&self) -> Vec<usize> {
        if self.is_exact() {
            return (0..self.dim).collect();
        }
        let top = self.j_max - HalfInt::int(1);
        self.indices_where(|l| l <= top)
    }

    fn trusted_top(&self) -> HalfInt {
        let half = HalfInt::from_twice(self.j_max.twice() / 2);
        self.blocks.iter().copied().filter(|&l| l <= half).last().unwrap_or(self.blocks[0])
    }

    /// Indices of blocks `l ≤ j_max/2`, where truncated boosts are trusted.
    pub fn trusted_indices(&self) -> Vec<usize> {
        let top = self.trusted_top();
        self.indices_where(|l| l <= top)
    }

    /// True when `N^r` does not couple to the truncated tail (trivial representation).
    pub fn is_exact(&self) -> bool {
        self.boost[2].max_abs() == T::zero() && self.boost[0].max_abs() == T::zero()
    }

    fn spectral_blocks(&self) -> Result<Vec<MBlock<T>>> {
        let top = *self.blocks.last().unwrap();
        let parity = top.twice().rem_euclid(2);
        let mut out = Vec::new();
        let mut m2 = -top.twice();
        while m2 <= top.twice() {
            debug_assert_eq!(m2.rem_euclid(2), parity);
            let m = HalfInt::from_twice(m2);
            let rows: Vec<usize> = self.blocks.iter().filter_map(|&l| self.index_of(l, m)).collect();
            let n = rows.len();
            let mut a = vec![T::zero(); n * n];
            for (p, &ri) in rows.iter().enumerate() {
                for (q, &rj) in rows.iter().enumerate() {
                    let z = self.boost[2][(ri, rj)];
                    if z.im.abs() > T::tol(1e-12) * (T::one() + z.re.abs()) {
                        return Err(Error::InvalidLabel("N³ is not real symmetric for this label".into()));
                    }
                    a[p * n + q] = z.re;
                }
            }
            let (eigenvalues, vectors) = symmetric_eigen(&a, n);
            out.push(MBlock { m2, rows, eigenvalues, vectors });
            m2 += 2;
        }
        Ok(out)
    }

    /// `exp(−iχN³)` restricted to one `m` block, row-major over `rows`.
    fn block_exp(&self, mb: &MBlock<T>, chi: T) -> Vec<C<T>> {
        let n = mb.rows.len();
        let phases: Vec<C<T>> = mb.eigenvalues.iter().map(|&e| cis(-chi * e)).collect();
        let mut out = vec![re(T::zero()); n * n];
        for p in 0..n {
            for q in 0..n {
                let mut acc = re(T::zero());
                for (k, ph) in phases.iter().enumerate() {
                    acc = acc + *ph * (mb.vectors[p * n + k] * mb.vectors[q * n + k]);
                }
                out[p * n + q] = acc;
            }
        }
        out
    }

    /// Probability leaking from the columns of blocks `l ≤ col_top` into the top two blocks.
    fn leakage(&self, chi: T, col_top: HalfInt) -> T {
        if chi == T::zero() || self.is_exact() {
            return T::zero();
        }
        let leak_from = self.j_max - HalfInt::int(1);
        let leak_blocks: Vec<HalfInt> = self.blocks.iter().copied().filter(|&l| l >= leak_from && l > col_top).collect();
        if leak_blocks.is_empty() {
            return T::one();
        }
        let mut worst = T::zero();
        for mb in &self.mblocks {
            let e = self.block_exp(mb, chi);
            let n = mb.rows.len();
            let m = HalfInt::from_twice(mb.m2);
            let ls: Vec<HalfInt> = self.blocks.iter().copied().filter(|&l| l.index_of(m).is_some()).collect();
            for (q, lq) in ls.iter().enumerate() {
                if *lq > col_top {
                    continue;
                }
                let mut leak = T::zero();
                for (p, lp) in ls.iter().enumerate() {
                    if leak_blocks.contains(lp) {
                        leak = leak + e[p * n + q].norm_sqr();
                    }
                }
                worst = worst.max(leak);
            }
        }
        worst
    }

    fn check_window(&self, chi: T, col_top: HalfInt) -> Result<T> {
        let leak = self.leakage(chi, col_top);
        if leak <= T::lit(LEAKAGE_LIMIT) {
            return Ok(leak);
        }
        let mut suggested = None;
        let mut j2 = self.j_max.twice() + 2;
        while j2 <= 2 * SUGGESTION_CAP {
            let bigger = build_generators(self.label, HalfInt::from_twice(j2))?;
            if bigger.leakage(chi, col_top) <= T::lit(LEAKAGE_LIMIT) {
                suggested = Some((j2 / 2) as u32);
                break;
            }
            j2 += 2;
        }
        Err(Error::TruncationWindow { rapidity: chi.as_f64(), leakage: leak.as_f64(), suggested_j_max: suggested })
    }

    /// Block-diagonal `⊕_l R^l(u)`.
    pub fn rotation_matrix(&self, u: &Sl2c<T>) -> CMatrix<T> {
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for (b, &l) in self.blocks.iter().enumerate() {
            let r = symmetric_power(l.twice() as usize, u);
            let o = self.offsets[b];
            for i in 0..l.multiplicity() {
                for k in 0..l.multiplicity() {
                    out[(o + i, o + k)] = r[(i, k)];
                }
            }
        }
        out
    }

    /// Matrix of `a`; boosts use scaling-and-squaring on `N³`.
    pub fn matrix_element(&self, a: &Sl2c<T>) -> Result<IrrepMatrix<T>> {
        let residual = (a.det() - re(T::one())).norm();
        if residual > T::tol(1e-12) {
            return Err(Error::NotUnimodular { residual: residual.as_f64() });
        }
        let cartan = a.cartan();
        let chi = cartan.rapidity;
        let leakage = self.check_window(chi, self.trusted_top())?;
        let e = self.boost[2].scale(cplx(T::zero(), -chi)).expm();
        let matrix = &(&self.rotation_matrix(&cartan.left) * &e) * &self.rotation_matrix(&cartan.right);
        let t = self.trusted_indices();
        let sub = matrix.select(&(0..self.dim).collect::<Vec<_>>(), &t);
        let unitarity_residual = sub.unitarity_residual();
        Ok(IrrepMatrix { matrix, rapidity: chi, leakage, unitarity_residual })
    }

    /// Columns `(j, m)`, `m = −j..j`, of `D(a_k)`.
    pub fn boost_columns(&self, k: &FourVector<T>, j: HalfInt) -> Result<CMatrix<T>> {
        let jb = self
            .block_position(j)
            .ok_or_else(|| Error::InvalidArgument(format!("spin {j} is not a block of this irrep")))?;
        let mu = k.mass()?;
        crate::kinematics::wigner_boost(k)?;
        let p = k.spatial_norm();
        let nj = j.multiplicity();
        let mut out = CMatrix::zeros(self.dim, nj);
        if p == T::zero() {
            for i in 0..nj {
                out[(self.offsets[jb] + i, i)] = re(T::one());
            }
            return Ok(out);
        }
        let chi = (p / mu).asinh();
        self.check_window(chi, j)?;
        let n = [k.get(1) / p, k.get(2) / p, k.get(3) / p];
        let w = rotation_taking_z_to(n);
        let rj = symmetric_power(j.twice() as usize, &w);
        // X[(l, n), m] = E_n[l, j] · conj(R^j(w)[m, n])
        let mut x = CMatrix::zeros(self.dim, nj);
        for mb in &self.mblocks {
            let nn = HalfInt::from_twice(mb.m2);
            let Some(col_n) = j.index_of(nn) else { continue };
            let e = self.block_exp(mb, chi);
            let len = mb.rows.len();
            let q = mb.rows.iter().position(|&r| r == self.offsets[jb] + col_n).expect("block j row");
            for (pp, &row) in mb.rows.iter().enumerate() {
                let ev = e[pp * len + q];
                for mi in 0..nj {
                    x[(row, mi)] = ev * rj[(mi, col_n)].conj();
                }
            }
        }
        for (b, &l) in self.blocks.iter().enumerate() {
            let rl = symmetric_power(l.twice() as usize, &w);
            let o = self.offsets[b];
            let nl = l.multiplicity();
            for mi in 0..nj {
                for a in 0..nl {
                    let mut acc = re(T::zero());
                    for c in 0..nl {
                        acc = acc + rl[(a, c)] * x[(o + c, mi)];
                    }
                    out[(o + a, mi)] = acc;
                }
            }
        }
        Ok(out)
    }

    /// Diagonal block `D_{jm', jm}(a)`.
    pub fn diagonal_block(&self, a: &Sl2c<T>, j: HalfInt) -> Result<CMatrix<T>> {
        let jb = self
            .block_position(j)
            .ok_or_else(|| Error::InvalidArgument(format!("spin {j} is not a block of this irrep")))?;
        let cartan = a.cartan();
        let chi = cartan.rapidity;
        self.check_window(chi, j)?;
        let nj = j.multiplicity();
        let mut diag = vec![re(T::zero()); nj];
        for mb in &self.mblocks {
            let nn = HalfInt::from_twice(mb.m2);
            let Some(col_n) = j.index_of(nn) else { continue };
            let q = mb.rows.iter().position(|&r| r == self.offsets[jb] + col_n).expect("block j row");
            let len = mb.rows.len();
            let mut acc = re(T::zero());
            for k in 0..len {
                acc = acc + cis(-chi * mb.eigenvalues[k]) * (mb.vectors[q * len + k] * mb.vectors[q * len + k]);
            }
            diag[col_n] = acc;
        }
        let r1 = symmetric_power(j.twice() as usize, &cartan.left);
        let r2 = symmetric_power(j.twice() as usize, &cartan.right);
        Ok(&(&r1 * &CMatrix::diag(&diag)) * &r2)
    }

    /// Commutator and Casimir residuals on interior blocks.
    pub fn certify(&self) -> IrrepCertificate {
        let idx = self.interior_indices();
        let restrict = |m: &CMatrix<T>| m.select(&idx, &idx).max_abs().as_f64();
        let i = i_unit::<T>();
        let (m, n) = (&self.rotation, &self.boost);
        let mut rr = 0.0_f64;
        let mut rb = 0.0_f64;
        let mut bb = 0.0_f64;
        for r in 0..3 {
            for s in 0..3 {
                let mut t_rs = None;
                let mut sign = T::zero();
                for t in 0..3 {
                    let e = levi_civita(r, s, t);
                    if e != 0 {
                        t_rs = Some(t);
                        sign = T::lit(e as f64);
                    }
                }
                let target = |g: &[CMatrix<T>; 3], factor: C<T>| match t_rs {
                    Some(t) => g[t].scale(factor * re(sign)),
                    None => CMatrix::zeros(self.dim, self.dim),
                };
                rr = rr.max(restrict(&(&CMatrix::commutator(&m[r], &m[s]) - &target(m, i))));
                rb = rb.max(restrict(&(&CMatrix::commutator(&m[r], &n[s]) - &target(n, i))));
                bb = bb.max(restrict(&(&CMatrix::commutator(&n[r], &n[s]) - &target(m, -i))));
            }
        }
        let mut c3 = CMatrix::zeros(self.dim, self.dim);
        let mut c4 = CMatrix::zeros(self.dim, self.dim);
        for r in 0..3 {
            c3 = &c3 + &(&(&m[r] * &m[r]) - &(&n[r] * &n[r]));
            c4 = &c4 + &(&m[r] * &n[r]);
        }
        let id = CMatrix::identity(self.dim);
        let c3r = restrict(&(&c3 - &id.scale(self.label.casimir_c3())));
        let c4r = restrict(&(&c4 - &id.scale(self.label.casimir_c4())));
        let herm = (0..3)
            .map(|r| self.rotation[r].hermiticity_residual().max(self.boost[r].hermiticity_residual()).as_f64())
            .fold(0.0, f64::max);
        IrrepCertificate {
            rotation_rotation: rr,
            rotation_boost: rb,
            boost_boost: bb,
            casimir_c3: c3r,
            casimir_c4: c4r,
            hermiticity: herm,
            interior_blocks: self.blocks.iter().filter(|&&l| self.is_exact() || l < self.j_max).count(),
        }
    }
}

/// Alias of [`TruncatedIrrep::matrix_element`].
pub fn irrep_matrix_element<T: Real>(irrep: &TruncatedIrrep<T>, a: &Sl2c<T>) -> Result<IrrepMatrix<T>> {
    irrep.matrix_element(a)
}

pub(crate) fn levi_civita(r: usize, s: usize, t: usize) -> i32 {
    match (r, s, t) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
        _ => 0,
    }
}

/// `S_α(k)`, `α = 0..3`, in the full truncated space.
pub fn s_matrices<T: Real>(irrep: &TruncatedIrrep<T>, k: &FourVector<T>) -> Result<[CMatrix<T>; 4]> {
    s_from_generators(irrep.rotation_generators(), irrep.boost_generators(), k)
}

/// `S_α(k)` assembled from generators already restricted to a subset of the basis.
pub(crate) fn s_from_generators<T: Real>(m: &[CMatrix<T>; 3], n: &[CMatrix<T>; 3], k: &FourVector<T>) -> Result<[CMatrix<T>; 4]> {
    crate::kinematics::wigner_boost(k)?;
    let mu = k.mass()?;
    let k0 = k.time();
    let kv = [k.get(1), k.get(2), k.get(3)];
    let dim = m[0].rows();
    let mu2 = mu * mu;
    let mut s0 = CMatrix::zeros(dim, dim);
    for r in 0..3 {
        s0 = &s0 + &n[r].scale_real(kv[r] / mu2);
    }
    let mut out = [s0, CMatrix::zeros(dim, dim), CMatrix::zeros(dim, dim), CMatrix::zeros(dim, dim)];
    for r in 0..3 {
        let mut sr = n[r].scale_real(-T::one() / mu);
        for s in 0..3 {
            sr = &sr - &n[s].scale_real(kv[r] * kv[s] / (mu2 * (mu + k0)));
            for t in 0..3 {
                let e = levi_civita(r, s, t);
                if e != 0 {
                    sr = &sr + &m[t].scale_real(T::lit(e as f64) * kv[s] / (mu * (mu + k0)));
                }
            }
        }
        out[r + 1] = sr;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_label_is_one_dimensional() {
        let irrep = build_generators(IrrepLabel::<f64>::trivial(true), HalfInt::ZERO).unwrap();
        assert_eq!(irrep.dim(), 1);
        assert!(irrep.boost_generators().iter().all(|g| g.max_abs() == 0.0));
        let a = Sl2c::<f64>::boost([0.0, 0.6, 0.8], 2.0);
        let d = irrep.matrix_element(&a).unwrap();
        assert!((d.matrix[(0, 0)] - re(1.0)).norm() < 1e-15);
    }

    #[test]
    fn invalid_labels_rejected() {
        assert!(IrrepLabel::<f64>::new(HalfInt::int(1), cplx(0.5, 0.0)).is_err());
        assert!(IrrepLabel::<f64>::new(HalfInt::ZERO, cplx(1.5, 0.0)).is_err());
        assert!(IrrepLabel::<f64>::new(HalfInt::ZERO, cplx(0.5, 0.0)).is_ok());
        assert!(build_generators(IrrepLabel::<f64>::principal(HalfInt::int(2), 0.0), HalfInt::int(1)).is_err());
    }

    #[test]
    fn spectral_exponential_matches_expm() {
        let irrep = build_generators(IrrepLabel::<f64>::principal(HalfInt::int(1), 0.7), HalfInt::int(8)).unwrap();
        let chi = 0.3;
        let direct = irrep.boost_generators()[2].scale(cplx(0.0, -chi)).expm();
        for mb in &irrep.mblocks {
            let e = irrep.block_exp(mb, chi);
            let n = mb.rows.len();
            for p in 0..n {
                for q in 0..n {
                    assert!((e[p * n + q] - direct[(mb.rows[p], mb.rows[q])]).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn large_rapidity_reports_window() {
        let irrep = build_generators(IrrepLabel::<f64>::principal(HalfInt::int(1), 0.5), HalfInt::int(4)).unwrap();
        let a = Sl2c::boost([0.0, 0.0, 1.0], 3.0);
        match irrep.matrix_element(&a) {
            Err(Error::TruncationWindow { leakage, .. }) => assert!(leakage > 1e-8),
            other => panic!("expected truncation error, got {other:?}"),
        }
    }
}
