//! Composite Gauss–Legendre rules, panel interpolation and tensor grids.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Real, C};

/// Gauss–Legendre nodes and weights on `[-1, 1]`, computed in `f64`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "gauss_legendre needs n >= 1");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..(n + 1) / 2 {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { z } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * p - pm1) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// Serializable description of an axis rule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisSpec {
    pub breaks: Vec<f64>,
    pub order: usize,
}

/// Composite Gauss–Legendre rule on one axis, one fixed order per panel.
#[derive(Clone, Debug)]
pub struct AxisRule<T> {
    breaks: Vec<T>,
    order: usize,
    nodes: Vec<T>,
    weights: Vec<T>,
    ref_nodes: Vec<T>,
    ref_weights: Vec<T>,
    bary: Vec<T>,
    ref_diff: Vec<T>,
}

impl<T: Real> AxisRule<T> {
    /// Equal panels over `[min, max]`.
    pub fn uniform_panels(min: T, max: T, panels: usize, order: usize) -> Result<Self> {
        if panels == 0 || !(max > min) {
            return Err(Error::InvalidArgument("axis needs max > min and at least one panel".into()));
        }
        let h = (max - min) / T::from_count(panels);
        let mut breaks: Vec<T> = (0..=panels).map(|i| min + h * T::from_count(i)).collect();
        breaks[panels] = max;
        Self::from_breaks(breaks, order)
    }

    pub fn from_breaks(breaks: Vec<T>, order: usize) -> Result<Self> {
        if breaks.len() < 2 || order == 0 {
            return Err(Error::InvalidArgument("axis needs two breakpoints and order >= 1".into()));
        }
        if breaks.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("axis breakpoints must increase strictly".into()));
        }
        let (xr, wr) = gauss_legendre(order);
        let ref_nodes: Vec<T> = xr.iter().map(|&v| T::lit(v)).collect();
        let ref_weights: Vec<T> = wr.iter().map(|&v| T::lit(v)).collect();
        let bary_f: Vec<f64> = (0..order)
            .map(|j| {
                let p: f64 = (0..order).filter(|&k| k != j).map(|k| xr[j] - xr[k]).product();
                1.0 / p
            })
            .collect();
        let scale = bary_f.iter().fold(0.0_f64, |m, b| m.max(b.abs()));
        let bary_f: Vec<f64> = bary_f.iter().map(|b| b / scale).collect();
        let mut diff = vec![0.0_f64; order * order];
        for i in 0..order {
            let mut diag = 0.0;
            for j in 0..order {
                if i != j {
                    let d = (bary_f[j] / bary_f[i]) / (xr[i] - xr[j]);
                    diff[i * order + j] = d;
                    diag -= d;
                }
            }
            diff[i * order + i] = diag;
        }
        let mut nodes = Vec::with_capacity(order * (breaks.len() - 1));
        let mut weights = Vec::with_capacity(nodes.capacity());
        let half = T::lit(0.5);
        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            let mid = (a + b) * half;
            let hw = (b - a) * half;
            for q in 0..order {
                nodes.push(mid + hw * ref_nodes[q]);
                weights.push(hw * ref_weights[q]);
            }
        }
        Ok(Self {
            breaks,
            order,
            nodes,
            weights,
            ref_nodes,
            ref_weights,
            bary: bary_f.iter().map(|&v| T::lit(v)).collect(),
            ref_diff: diff.iter().map(|&v| T::lit(v)).collect(),
        })
    }

    pub fn from_spec(spec: &AxisSpec) -> Result<Self> {
        Self::from_breaks(spec.breaks.iter().map(|&b| T::lit(b)).collect(), spec.order)
    }

    pub fn spec(&self) -> AxisSpec {
        AxisSpec { breaks: self.breaks.iter().map(|b| b.as_f64()).collect(), order: self.order }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn panels(&self) -> usize {
        self.breaks.len() - 1
    }

    pub fn breaks(&self) -> &[T] {
        &self.breaks
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn min(&self) -> T {
        self.breaks[0]
    }

    pub fn max(&self) -> T {
        *self.breaks.last().unwrap()
    }

    /// Rule on the image of the axis under `x ↦ λx`, `λ > 0`.
    pub fn scaled(&self, lambda: T) -> Result<Self> {
        if !(lambda > T::zero()) {
            return Err(Error::InvalidArgument("scale factor must be positive".into()));
        }
        Self::from_breaks(self.breaks.iter().map(|&b| b * lambda).collect(), self.order)
    }

    /// Rule on the image of the axis under `x ↦ x + s`.
    pub fn shifted(&self, s: T) -> Result<Self> {
        Self::from_breaks(self.breaks.iter().map(|&b| b + s).collect(), self.order)
    }

    pub fn contains(&self, x: T) -> bool {
        let slack = (self.max() - self.min()) * T::epsilon() * T::lit(16.0);
        x >= self.min() - slack && x <= self.max() + slack
    }

    /// Panel holding `x`, with points on a shared break assigned to the left panel.
    pub fn panel_of(&self, x: T) -> Option<usize> {
        if !self.contains(x) {
            return None;
        }
        let p = self.breaks.partition_point(|&b| b < x);
        Some(p.saturating_sub(1).min(self.panels() - 1))
    }

    /// Lagrange basis values of the panel interpolant at `x`.
    ///
    /// Returns the index of the panel's first node and the `order` basis values.
    pub fn lagrange(&self, x: T) -> Option<(usize, Vec<T>)> {
        let p = self.panel_of(x)?;
        Some(self.lagrange_in_panel(p, x))
    }

    /// Weights integrating the panel interpolant over `[a, b] ∩ axis`.
    pub fn partial_weights(&self, a: T, b: T) -> Vec<T> {
        let mut out = vec![T::zero(); self.len()];
        if !(b > a) {
            return out;
        }
        let half = T::lit(0.5);
        for p in 0..self.panels() {
            let (pa, pb) = (self.breaks[p], self.breaks[p + 1]);
            let lo = a.max(pa);
            let hi = b.min(pb);
            if !(hi > lo) {
                continue;
            }
            let start = p * self.order;
            if lo == pa && hi == pb {
                out[start..start + self.order].copy_from_slice(&self.weights[start..start + self.order]);
                continue;
            }
            let mid = (lo + hi) * half;
            let hw = (hi - lo) * half;
            for q in 0..self.order {
                let x = mid + hw * self.ref_nodes[q];
                let (_, basis) = self.lagrange_in_panel(p, x);
                for (i, v) in basis.iter().enumerate() {
                    out[start + i] = out[start + i] + hw * self.ref_weights[q] * *v;
                }
            }
        }
        out
    }

    fn lagrange_in_panel(&self, p: usize, x: T) -> (usize, Vec<T>) {
        let (a, b) = (self.breaks[p], self.breaks[p + 1]);
        let t = (x - a) / (b - a) * T::lit(2.0) - T::one();
        let mut out = vec![T::zero(); self.order];
        for (q, &r) in self.ref_nodes.iter().enumerate() {
            if t == r {
                out[q] = T::one();
                return (p * self.order, out);
            }
        }
        let mut den = T::zero();
        for q in 0..self.order {
            let v = self.bary[q] / (t - self.ref_nodes[q]);
            out[q] = v;
            den = den + v;
        }
        for v in out.iter_mut() {
            *v = *v / den;
        }
        (p * self.order, out)
    }

    /// Derivative of the panel interpolant at the nodes, for data sampled on this axis
    /// with stride `stride` starting at `offset`.
    pub(crate) fn differentiate_strided(&self, data: &[C<T>], offset: usize, stride: usize, out: &mut [C<T>]) {
        let n = self.order;
        let two = T::lit(2.0);
        for p in 0..self.panels() {
            let scale = two / (self.breaks[p + 1] - self.breaks[p]);
            for i in 0..n {
                let mut acc = C::new(T::zero(), T::zero());
                for j in 0..n {
                    let idx = offset + (p * n + j) * stride;
                    acc = acc + data[idx] * self.ref_diff[i * n + j];
                }
                out[offset + (p * n + i) * stride] = acc * scale;
            }
        }
    }
}

/// Tensor product of axis rules, row-major with the last axis fastest.
#[derive(Clone, Debug)]
pub struct TensorGrid<T> {
    axes: Vec<AxisRule<T>>,
    shape: Vec<usize>,
    strides: Vec<usize>,
    len: usize,
}

impl<T: Real> TensorGrid<T> {
    pub fn new(axes: Vec<AxisRule<T>>) -> Self {
        let shape: Vec<usize> = axes.iter().map(|a| a.len()).collect();
        let mut strides = vec![1; shape.len()];
        for d in (0..shape.len().saturating_sub(1)).rev() {
            strides[d] = strides[d + 1] * shape[d + 1];
        }
        let len = shape.iter().product();
        Self { axes, shape, strides, len }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn axes(&self) -> &[AxisRule<T>] {
        &self.axes
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for d in 0..self.dim() {
            idx[d] = flat / self.strides[d];
            flat %= self.strides[d];
        }
        idx
    }

    pub fn point(&self, flat: usize) -> Vec<T> {
        let mut out = Vec::with_capacity(self.dim());
        let mut rest = flat;
        for d in 0..self.dim() {
            let i = rest / self.strides[d];
            rest %= self.strides[d];
            out.push(self.axes[d].nodes()[i]);
        }
        out
    }

    pub fn weight(&self, flat: usize) -> T {
        let mut w = T::one();
        let mut rest = flat;
        for d in 0..self.dim() {
            let i = rest / self.strides[d];
            rest %= self.strides[d];
            w = w * self.axes[d].weights()[i];
        }
        w
    }

    pub fn weights(&self) -> Vec<T> {
        (0..self.len).map(|i| self.weight(i)).collect()
    }

    pub fn contains(&self, x: &[T]) -> bool {
        x.len() == self.dim() && self.axes.iter().zip(x).all(|(a, &v)| a.contains(v))
    }

    /// Flat indices and weights of the tensor Lagrange stencil at `x`; `None` outside the hull.
    pub fn stencil(&self, x: &[T]) -> Option<Vec<(usize, T)>> {
        let bases: Vec<(usize, Vec<T>)> =
            self.axes.iter().zip(x).map(|(a, &v)| a.lagrange(v)).collect::<Option<_>>()?;
        let orders: Vec<usize> = bases.iter().map(|b| b.1.len()).collect();
        let mut out = Vec::with_capacity(orders.iter().product());
        let mut counter = vec![0usize; self.dim()];
        loop {
            let mut w = T::one();
            let mut flat = 0;
            for d in 0..self.dim() {
                w = w * bases[d].1[counter[d]];
                flat += (bases[d].0 + counter[d]) * self.strides[d];
            }
            if w != T::zero() {
                out.push((flat, w));
            }
            let mut d = self.dim();
            loop {
                if d == 0 {
                    return Some(out);
                }
                d -= 1;
                counter[d] += 1;
                if counter[d] < orders[d] {
                    break;
                }
                counter[d] = 0;
            }
        }
    }

    /// Tensor Lagrange interpolation of per-node data at `x`; `None` outside the hull.
    pub fn interpolate(&self, data: &[C<T>], x: &[T]) -> Option<C<T>> {
        debug_assert_eq!(data.len(), self.len);
        let st = self.stencil(x)?;
        Some(st.iter().fold(C::new(T::zero(), T::zero()), |acc, &(i, w)| acc + data[i] * w))
    }

    /// Derivative of per-node data along `axis`.
    pub fn differentiate(&self, data: &[C<T>], axis: usize) -> Vec<C<T>> {
        let mut out = vec![C::new(T::zero(), T::zero()); self.len];
        let stride = self.strides[axis];
        let block = stride * self.shape[axis];
        for outer in 0..self.len / block {
            for inner in 0..stride {
                self.axes[axis].differentiate_strided(data, outer * block + inner, stride, &mut out);
            }
        }
        out
    }
}
