//! Quadrature Fourier sums `(2π)^{-d/2} Σ_k w_k e^{-i x·k} g(k)`.
//!
//! On tensor x-grids the sum is contracted one axis at a time; each output
//! entry is accumulated in a fixed order, so results do not depend on the
//! thread count.

use rayon::prelude::*;

use crate::grid::{MomentumGrid, SpacetimeGrid};
use crate::kinematics::FourVector;
use crate::scalar::{cis, re, Real, C};

/// `e^{-i x·k}` factorizes as `Π_a e^{i s_a x^a k^a}` with `s_0 = −1`, `s_r = +1`.
fn axis_sign<T: Real>(a: usize) -> T {
    if a == 0 {
        -T::one()
    } else {
        T::one()
    }
}

fn prefactor<T: Real>(d: usize) -> T {
    (T::lit(2.0) * T::PI()).powf(-T::from_count(d) / T::lit(2.0))
}

fn contract<T: Real>(data: &[C<T>], shape: &[usize], axis: usize, e: &[C<T>], nx: usize) -> Vec<C<T>> {
    let outer: usize = shape[..axis].iter().product();
    let nk = shape[axis];
    let inner: usize = shape[axis + 1..].iter().product();
    let mut out = vec![re(T::zero()); outer * nx * inner];
    out.par_chunks_mut(inner).with_min_len((4096 / inner).max(1)).enumerate().for_each(|(idx, chunk)| {
        let (o, x) = (idx / nx, idx % nx);
        for kk in 0..nk {
            let c = e[x * nk + kk];
            let src = &data[(o * nk + kk) * inner..(o * nk + kk + 1) * inner];
            for (dst, s) in chunk.iter_mut().zip(src) {
                *dst = *dst + c * *s;
            }
        }
    });
    out
}

/// Fourier sum of per-node data `g` on every node of a tensor x-grid.
pub fn fourier_on_grid<T: Real>(k: &MomentumGrid<T>, g: &[C<T>], x: &SpacetimeGrid<T>) -> Vec<C<T>> {
    let d = k.dim();
    assert_eq!(d, x.dim(), "grid dimensions differ");
    let w = k.weights();
    let pref = prefactor::<T>(d);
    let mut data: Vec<C<T>> = g.iter().zip(w).map(|(v, &w)| *v * (w * pref)).collect();
    let mut shape = k.tensor().shape().to_vec();
    for a in 0..d {
        let kn = k.tensor().axes()[a].nodes();
        let xn = x.tensor().axes()[a].nodes();
        let s = axis_sign::<T>(a);
        let e: Vec<C<T>> = xn.iter().flat_map(|&xv| kn.iter().map(move |&kv| cis(s * xv * kv))).collect();
        data = contract(&data, &shape, a, &e, xn.len());
        shape[a] = xn.len();
    }
    data
}

/// Fourier sum at scattered points.
pub fn fourier_at<T: Real>(k: &MomentumGrid<T>, g: &[C<T>], points: &[FourVector<T>]) -> Vec<C<T>> {
    let pref = prefactor::<T>(k.dim());
    let active: Vec<(usize, C<T>)> = g
        .iter()
        .zip(k.weights())
        .enumerate()
        .filter(|(_, (v, _))| v.norm_sqr() > T::zero())
        .map(|(i, (v, &w))| (i, *v * w))
        .collect();
    points
        .par_iter()
        .map(|x| {
            let acc = active.iter().fold(re(T::zero()), |acc, &(i, v)| {
                let kv = &k.nodes()[i];
                let phase: T = (0..k.dim()).map(|a| axis_sign::<T>(a) * x.get(a) * kv.get(a)).sum();
                acc + v * cis(phase)
            });
            acc * pref
        })
        .collect()
}
