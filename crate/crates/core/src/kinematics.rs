//! Minkowski vectors, SL(2,C), Lorentz matrices, Wigner boosts and SU(2) matrices.
//!
//! Metric signature is (+,−,−,−). The SU(2) basis index `i = 0..2j` carries the
//! magnetic label `m = i − j`, ascending. In this basis the third rotation
//! generator is diagonal with entries `j − i`, so rotations about z by `θ`
//! act on label `m` as `e^{imθ}` (see [`spin_generators`]).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{cplx, i_unit, re, Real, C};

/// Integer or half-integer stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);

    pub const fn from_twice(twice: i32) -> Self {
        HalfInt(twice)
    }

    pub const fn int(n: i32) -> Self {
        HalfInt(2 * n)
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn is_integral(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn abs(self) -> Self {
        HalfInt(self.0.abs())
    }

    pub fn value<T: Real>(self) -> T {
        T::lit(self.0 as f64 * 0.5)
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 * 0.5
    }

    /// `2j + 1` for a spin value.
    pub fn multiplicity(self) -> usize {
        debug_assert!(self.0 >= 0);
        (self.0 + 1) as usize
    }

    /// Labels `−j, −j+1, ..., j`.
    pub fn projections(self) -> impl Iterator<Item = HalfInt> {
        let j = self.0;
        (0..=j).map(move |i| HalfInt(2 * i - j))
    }

    /// Position of label `m` in the ascending list of projections of `self`.
    pub fn index_of(self, m: HalfInt) -> Option<usize> {
        if m.0.abs() > self.0 || (self.0 - m.0) % 2 != 0 {
            return None;
        }
        Some(((m.0 + self.0) / 2) as usize)
    }

    /// Parses `"3"`, `"-1/2"`, `"1.5"`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n: i32 = n.trim().parse().map_err(|_| Error::InvalidSpin(s.into()))?;
            if d.trim() != "2" {
                return Err(Error::InvalidSpin(s.into()));
            }
            return Ok(HalfInt(n));
        }
        let v: f64 = s.parse().map_err(|_| Error::InvalidSpin(s.into()))?;
        Self::from_f64(v)
    }

    pub fn from_f64(v: f64) -> Result<Self> {
        let t = (2.0 * v).round();
        if (2.0 * v - t).abs() > 1e-9 || t.abs() > 1e6 {
            return Err(Error::InvalidSpin(v.to_string()));
        }
        Ok(HalfInt(t as i32))
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, o: HalfInt) -> HalfInt {
        HalfInt(self.0 + o.0)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, o: HalfInt) -> HalfInt {
        HalfInt(self.0 - o.0)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

/// Space-time vector with `d ∈ {1, 2, 4}` components, upper index.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FourVector<T> {
    dim: usize,
    c: [T; 4],
}

impl<T: Real> FourVector<T> {
    pub fn new(components: &[T]) -> Result<Self> {
        let dim = components.len();
        if !matches!(dim, 1 | 2 | 4) {
            return Err(Error::UnsupportedDimension(dim));
        }
        let mut c = [T::zero(); 4];
        c[..dim].copy_from_slice(components);
        Ok(Self { dim, c })
    }

    pub fn new4(t: T, x: T, y: T, z: T) -> Self {
        Self { dim: 4, c: [t, x, y, z] }
    }

    pub fn zero(dim: usize) -> Result<Self> {
        Self::new(&vec![T::zero(); dim])
    }

    /// Rest-frame momentum `(μ, 0, 0, 0)`.
    pub fn rest(mu: T) -> Self {
        Self::new4(mu, T::zero(), T::zero(), T::zero())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[T] {
        &self.c[..self.dim]
    }

    pub fn time(&self) -> T {
        self.c[0]
    }

    /// `x^α` for `α < dim`.
    pub fn get(&self, alpha: usize) -> T {
        assert!(alpha < self.dim, "component {alpha} out of range for d = {}", self.dim);
        self.c[alpha]
    }

    /// Lower-index component `x_α = g_{αα} x^α`.
    pub fn lower(&self, alpha: usize) -> T {
        if alpha == 0 {
            self.get(0)
        } else {
            -self.get(alpha)
        }
    }

    pub fn spatial_norm(&self) -> T {
        self.c[1..self.dim].iter().map(|&v| v * v).sum::<T>().sqrt()
    }

    /// `x·x`.
    pub fn square(&self) -> T {
        minkowski_dot_unchecked(self, self)
    }

    /// Strictly inside the open future cone.
    pub fn in_future_cone(&self) -> bool {
        self.c[0] > T::zero() && self.c[0] > self.spatial_norm()
    }

    /// Invariant mass `μ = √(k·k)` for a future-cone momentum.
    pub fn mass(&self) -> Result<T> {
        if !self.in_future_cone() {
            return Err(Error::OutsideFutureCone { k0: self.c[0].as_f64(), spatial: self.spatial_norm().as_f64() });
        }
        Ok(self.square().sqrt())
    }

    pub fn scale(&self, s: T) -> Self {
        let mut c = self.c;
        for v in c.iter_mut().take(self.dim) {
            *v = *v * s;
        }
        Self { dim: self.dim, c }
    }
}

impl<T: Real> Add for FourVector<T> {
    type Output = FourVector<T>;
    fn add(self, o: Self) -> Self {
        assert_eq!(self.dim, o.dim, "four-vector dimension mismatch");
        let mut c = self.c;
        for i in 0..4 {
            c[i] = c[i] + o.c[i];
        }
        Self { dim: self.dim, c }
    }
}

impl<T: Real> Sub for FourVector<T> {
    type Output = FourVector<T>;
    fn sub(self, o: Self) -> Self {
        assert_eq!(self.dim, o.dim, "four-vector dimension mismatch");
        let mut c = self.c;
        for i in 0..4 {
            c[i] = c[i] - o.c[i];
        }
        Self { dim: self.dim, c }
    }
}

fn minkowski_dot_unchecked<T: Real>(x: &FourVector<T>, y: &FourVector<T>) -> T {
    let mut s = x.c[0] * y.c[0];
    for r in 1..x.dim {
        s = s - x.c[r] * y.c[r];
    }
    s
}

/// `x^0 y^0 − Σ x^r y^r`.
pub fn minkowski_dot<T: Real>(x: &FourVector<T>, y: &FourVector<T>) -> Result<T> {
    if x.dim != y.dim {
        return Err(Error::DimensionMismatch { expected: x.dim, found: y.dim });
    }
    Ok(minkowski_dot_unchecked(x, y))
}

/// 2×2 complex matrix; constructors check unimodularity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sl2c<T> {
    m: [[C<T>; 2]; 2],
}

impl<T: Real> Sl2c<T> {
    pub fn new(m: [[C<T>; 2]; 2]) -> Result<Self> {
        let a = Self { m };
        let residual = (a.det() - re(T::one())).norm();
        if residual > T::tol(1e-12) {
            return Err(Error::NotUnimodular { residual: residual.as_f64() });
        }
        Ok(a)
    }

    pub(crate) fn raw(m: [[C<T>; 2]; 2]) -> Self {
        Self { m }
    }

    pub fn identity() -> Self {
        let (o, z) = (re(T::one()), re(T::zero()));
        Self { m: [[o, z], [z, o]] }
    }

    /// Pauli matrix `σ_r` for `r ∈ {1,2,3}` and the identity for `r = 0`.
    pub fn pauli(r: usize) -> [[C<T>; 2]; 2] {
        let (o, z, i) = (re(T::one()), re(T::zero()), i_unit::<T>());
        match r {
            0 => [[o, z], [z, o]],
            1 => [[z, o], [o, z]],
            2 => [[z, -i], [i, z]],
            3 => [[o, z], [z, -o]],
            _ => panic!("Pauli index {r} out of range"),
        }
    }

    /// `exp(v·σ)` for a complex 3-vector `v`.
    pub fn exp_sigma(v: [C<T>; 3]) -> Self {
        let s2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        let s = s2.sqrt();
        let ch = s.cosh();
        let shc = if s.norm() < T::lit(1e-4) {
            re(T::one()) + s2 / re(T::lit(6.0)) + s2 * s2 / re(T::lit(120.0))
        } else {
            s.sinh() / s
        };
        let i = i_unit::<T>();
        Self {
            m: [
                [ch + shc * v[2], shc * (v[0] - i * v[1])],
                [shc * (v[0] + i * v[1]), ch - shc * v[2]],
            ],
        }
    }

    /// `exp(−iθ n̂·σ/2)`: rotation by `θ` about the unit axis `n̂`.
    pub fn rotation(axis: [T; 3], theta: T) -> Self {
        let h = T::lit(-0.5) * theta;
        Self::exp_sigma([cplx(T::zero(), h * axis[0]), cplx(T::zero(), h * axis[1]), cplx(T::zero(), h * axis[2])])
    }

    /// `exp(χ n̂·σ/2)`: pure boost of rapidity `χ` along the unit axis `n̂`.
    pub fn boost(axis: [T; 3], chi: T) -> Self {
        let h = T::lit(0.5) * chi;
        Self::exp_sigma([re(h * axis[0]), re(h * axis[1]), re(h * axis[2])])
    }

    pub fn entries(&self) -> &[[C<T>; 2]; 2] {
        &self.m
    }

    pub fn get(&self, i: usize, j: usize) -> C<T> {
        self.m[i][j]
    }

    pub fn det(&self) -> C<T> {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Inverse assuming unit determinant.
    pub fn inverse(&self) -> Self {
        let m = &self.m;
        Self { m: [[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]] }
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.m;
        Self { m: [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]] }
    }

    /// Max-entry distance of `a†a` from the identity.
    pub fn unitarity_residual(&self) -> T {
        let p = self.adjoint() * *self;
        let id = Self::identity();
        let mut r = T::zero();
        for i in 0..2 {
            for j in 0..2 {
                r = r.max((p.m[i][j] - id.m[i][j]).norm());
            }
        }
        r
    }

    pub fn max_abs_diff(&self, o: &Self) -> T {
        let mut r = T::zero();
        for i in 0..2 {
            for j in 0..2 {
                r = r.max((self.m[i][j] - o.m[i][j]).norm());
            }
        }
        r
    }

    pub fn to_matrix(&self) -> CMatrix<T> {
        CMatrix::from_fn(2, 2, |i, j| self.m[i][j])
    }

    /// Factorization `a = u₁ · exp(χσ³/2) · u₂` with `u₁, u₂ ∈ SU(2)` and `χ ≥ 0`.
    pub fn cartan(&self) -> Cartan<T> {
        let p = *self * self.adjoint();
        let two = T::lit(2.0);
        let norm = (p.m[0][0].re + p.m[1][1].re + two).sqrt();
        let mut h = p;
        h.m[0][0] = h.m[0][0] + re(T::one());
        h.m[1][1] = h.m[1][1] + re(T::one());
        for row in h.m.iter_mut() {
            for z in row.iter_mut() {
                *z = *z / re(norm);
            }
        }
        let v = [h.m[1][0].re, h.m[1][0].im, (h.m[0][0].re - h.m[1][1].re) / two];
        let vn = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        let chi = two * vn.asinh();
        let w = if vn > T::zero() {
            let n = [v[0] / vn, v[1] / vn, v[2] / vn];
            rotation_taking_z_to(n)
        } else {
            Self::identity()
        };
        let u2 = w.adjoint() * h.inverse() * *self;
        Cartan { left: w, rapidity: chi, right: u2 }
    }
}

/// SU(2) element `w` with `w σ³ w† = n̂·σ`.
pub(crate) fn rotation_taking_z_to<T: Real>(n: [T; 3]) -> Sl2c<T> {
    let s = (n[0] * n[0] + n[1] * n[1]).sqrt();
    let beta = s.atan2(n[2]);
    let axis = if s > T::zero() { [-n[1] / s, n[0] / s, T::zero()] } else { [T::one(), T::zero(), T::zero()] };
    Sl2c::rotation(axis, beta)
}

/// Result of [`Sl2c::cartan`].
#[derive(Clone, Copy, Debug)]
pub struct Cartan<T> {
    pub left: Sl2c<T>,
    pub rapidity: T,
    pub right: Sl2c<T>,
}

impl<T: Real> Mul for Sl2c<T> {
    type Output = Sl2c<T>;
    fn mul(self, o: Self) -> Self {
        let (a, b) = (&self.m, &o.m);
        let mut m = [[re(T::zero()); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Sl2c { m }
    }
}

/// Proper orthochronous Lorentz matrix `Λ^α_β`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LorentzMatrix<T> {
    m: [[T; 4]; 4],
}

impl<T: Real> LorentzMatrix<T> {
    pub fn identity() -> Self {
        let mut m = [[T::zero(); 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = T::one();
        }
        Self { m }
    }

    pub fn entries(&self) -> &[[T; 4]; 4] {
        &self.m
    }

    pub fn get(&self, a: usize, b: usize) -> T {
        self.m[a][b]
    }

    pub fn apply(&self, x: &FourVector<T>) -> Result<FourVector<T>> {
        if x.dim() != 4 {
            return Err(Error::DimensionMismatch { expected: 4, found: x.dim() });
        }
        let mut c = [T::zero(); 4];
        for (a, ca) in c.iter_mut().enumerate() {
            *ca = (0..4).map(|b| self.m[a][b] * x.c[b]).sum();
        }
        Ok(FourVector { dim: 4, c })
    }

    /// Max-entry residual of `Λᵀ g Λ − g`.
    pub fn metric_residual(&self) -> T {
        let g = |a: usize| if a == 0 { T::one() } else { -T::one() };
        let mut r = T::zero();
        for a in 0..4 {
            for b in 0..4 {
                let s: T = (0..4).map(|c| self.m[c][a] * g(c) * self.m[c][b]).sum();
                let target = if a == b { g(a) } else { T::zero() };
                r = r.max((s - target).abs());
            }
        }
        r
    }

    pub fn max_abs_diff(&self, o: &Self) -> T {
        let mut r = T::zero();
        for a in 0..4 {
            for b in 0..4 {
                r = r.max((self.m[a][b] - o.m[a][b]).abs());
            }
        }
        r
    }
}

impl<T: Real> Mul for LorentzMatrix<T> {
    type Output = LorentzMatrix<T>;
    fn mul(self, o: Self) -> Self {
        let mut m = [[T::zero(); 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                m[a][b] = (0..4).map(|c| self.m[a][c] * o.m[c][b]).sum();
            }
        }
        Self { m }
    }
}

/// `Λ(a)^α_β = ½ Re Tr(σ_α a σ_β a†)`.
pub fn lorentz_of_sl2c<T: Real>(a: &Sl2c<T>) -> Result<LorentzMatrix<T>> {
    let residual = (a.det() - re(T::one())).norm();
    if residual > T::tol(1e-12) {
        return Err(Error::NotUnimodular { residual: residual.as_f64() });
    }
    Ok(lorentz_unchecked(a))
}

pub(crate) fn lorentz_unchecked<T: Real>(a: &Sl2c<T>) -> LorentzMatrix<T> {
    let ad = a.adjoint();
    let sig: [Sl2c<T>; 4] = std::array::from_fn(|r| Sl2c::raw(Sl2c::pauli(r)));
    let half = T::lit(0.5);
    let mut m = [[T::zero(); 4]; 4];
    for b in 0..4 {
        let x = *a * sig[b] * ad;
        for (alpha, row) in m.iter_mut().enumerate() {
            let p = sig[alpha] * x;
            row[b] = half * (p.m[0][0] + p.m[1][1]).re;
        }
    }
    LorentzMatrix { m }
}

fn cone_guard<T: Real>(k: &FourVector<T>) -> Result<T> {
    if k.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, found: k.dim() });
    }
    let k0 = k.time();
    let mu2 = k.square();
    if !(k0 > T::zero()) || !(mu2 > T::zero()) || mu2 < T::lit(1e-10) * k0 * k0 {
        return Err(Error::OutsideFutureCone { k0: k0.as_f64(), spatial: k.spatial_norm().as_f64() });
    }
    Ok(mu2.sqrt())
}

/// `a_k = (μ + k⁰ + k^s σ^s) / √(2μ(μ + k⁰))`.
pub fn wigner_boost<T: Real>(k: &FourVector<T>) -> Result<Sl2c<T>> {
    let mu = cone_guard(k)?;
    let k0 = k.time();
    let norm = re(T::one() / (T::lit(2.0) * mu * (mu + k0)).sqrt());
    let (k1, k2, k3) = (k.c[1], k.c[2], k.c[3]);
    let m = [
        [re(mu + k0 + k3) * norm, cplx(k1, -k2) * norm],
        [cplx(k1, k2) * norm, re(mu + k0 - k3) * norm],
    ];
    Ok(Sl2c::raw(m))
}

/// `u = a_k⁻¹ a a_{k'}` with `k' = Λ(a⁻¹) k`.
pub fn wigner_rotation<T: Real>(a: &Sl2c<T>, k: &FourVector<T>) -> Result<Sl2c<T>> {
    let ak = wigner_boost(k)?;
    let kp = lorentz_of_sl2c(&a.inverse())?.apply(k)?;
    let akp = wigner_boost(&kp)?;
    Ok(ak.inverse() * *a * akp)
}

/// Spin-`j` matrix of `u ∈ SU(2)`, basis ordered by ascending `m`.
pub fn su2_wigner_matrix<T: Real>(j: HalfInt, u: &Sl2c<T>) -> Result<CMatrix<T>> {
    if j.twice() < 0 {
        return Err(Error::InvalidSpin(j.to_string()));
    }
    let residual = u.unitarity_residual().max((u.det() - re(T::one())).norm());
    if residual > T::tol(1e-10) {
        return Err(Error::NotUnitary { residual: residual.as_f64() });
    }
    Ok(symmetric_power(j.twice() as usize, u))
}

/// `n`-th symmetric power of a 2×2 matrix in the normalized monomial basis.
pub(crate) fn symmetric_power<T: Real>(n: usize, u: &Sl2c<T>) -> CMatrix<T> {
    let [[a, b], [c, d]] = u.m;
    let pow = |z: C<T>| {
        let mut v = Vec::with_capacity(n + 1);
        let mut p = re(T::one());
        for _ in 0..=n {
            v.push(p);
            p = p * z;
        }
        v
    };
    let (pa, pb, pc, pd) = (pow(a), pow(b), pow(c), pow(d));
    let fact: Vec<f64> = (0..=n).scan(1.0_f64, |f, k| {
        if k > 0 {
            *f *= k as f64;
        }
        Some(*f)
    })
    .collect();
    let binom = |n: usize, k: usize| if k > n { 0.0 } else { fact[n] / (fact[k] * fact[n - k]) };
    CMatrix::from_fn(n + 1, n + 1, |ip, i| {
        let norm = ((fact[ip] * fact[n - ip]) / (fact[i] * fact[n - i])).sqrt();
        let mut acc = re(T::zero());
        for p in 0..=ip {
            let q = ip - p;
            if p > n - i || q > i {
                continue;
            }
            let coef = binom(n - i, p) * binom(i, q);
            acc = acc + pa[n - i - p] * pc[p] * pb[i - q] * pd[q] * re(T::lit(coef));
        }
        acc * re(T::lit(norm))
    })
}

/// Rotation generators `[J¹, J², J³]` for spin `j` in the ascending-`m` basis.
///
/// `J³` has entries `j − i` on the diagonal, so `R(exp(−iθ n̂·σ/2)) = exp(−iθ n̂·J)`
/// with [`su2_wigner_matrix`].
pub fn spin_generators<T: Real>(j: HalfInt) -> [CMatrix<T>; 3] {
    let n = j.multiplicity();
    let jv = j.as_f64();
    let mut jp = CMatrix::zeros(n, n);
    for i in 1..n {
        let ms = jv - i as f64;
        jp[(i - 1, i)] = re(T::lit((jv * (jv + 1.0) - ms * (ms + 1.0)).sqrt()));
    }
    let jm = jp.adjoint();
    let half = re(T::lit(0.5));
    let j1 = (&jp + &jm).scale(half);
    let j2 = (&jp - &jm).scale(cplx(T::zero(), T::lit(-0.5)));
    let j3 = CMatrix::diag(&(0..n).map(|i| re(T::lit(jv - i as f64))).collect::<Vec<_>>());
    [j1, j2, j3]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_int_roundtrip() {
        assert_eq!(HalfInt::parse("-3/2").unwrap(), HalfInt::from_twice(-3));
        assert_eq!(HalfInt::parse("2").unwrap(), HalfInt::int(2));
        assert_eq!(HalfInt::from_twice(5).to_string(), "5/2");
        assert!(HalfInt::parse("0.3").is_err());
        let j = HalfInt::int(1);
        let ms: Vec<_> = j.projections().collect();
        assert_eq!(ms, vec![HalfInt::int(-1), HalfInt::ZERO, HalfInt::int(1)]);
        assert_eq!(j.index_of(HalfInt::int(1)), Some(2));
    }

    #[test]
    fn cartan_reassembles() {
        let a = Sl2c::<f64>::exp_sigma([cplx(0.3, -0.2), cplx(-0.1, 0.4), cplx(0.25, 0.1)]);
        let c = a.cartan();
        let back = c.left * Sl2c::boost([0.0, 0.0, 1.0], c.rapidity) * c.right;
        assert!(back.max_abs_diff(&a) < 1e-14);
        assert!(c.right.unitarity_residual() < 1e-14);
        assert!(c.left.unitarity_residual() < 1e-14);
    }

    #[test]
    fn generators_exponentiate_to_wigner_matrix() {
        let axis = [0.36_f64, -0.48, 0.8];
        let theta = 1.3;
        let u = Sl2c::rotation(axis, theta);
        for tj in 0..=6 {
            let j = HalfInt::from_twice(tj);
            let g = spin_generators::<f64>(j);
            let gen = (0..3).fold(CMatrix::zeros(j.multiplicity(), j.multiplicity()), |acc, r| {
                &acc + &g[r].scale(cplx(0.0, -theta * axis[r]))
            });
            let diff = (&gen.expm() - &su2_wigner_matrix(j, &u).unwrap()).max_abs();
            assert!(diff < 1e-13, "j = {j}: {diff}");
        }
    }
}
