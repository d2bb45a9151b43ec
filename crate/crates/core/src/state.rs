//! Momentum-space wave functions `ψ_{σjm}(k)` and the Poincaré and dilatation actions on them.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::MomentumGrid;
use crate::kinematics::{lorentz_of_sl2c, minkowski_dot, su2_wigner_matrix, wigner_rotation, FourVector, HalfInt, Sl2c};
use crate::quadrature::AxisSpec;
use crate::scalar::{cis, re, Real, C};

/// Internal index `σ` together with spin `j` and projection `m`. For `d < 4` only `j = m = 0` occurs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Channel {
    pub sigma: u32,
    pub j: HalfInt,
    pub m: HalfInt,
}

impl Channel {
    pub fn scalar(sigma: u32) -> Self {
        Channel { sigma, j: HalfInt::ZERO, m: HalfInt::ZERO }
    }

    pub fn new(sigma: u32, j: HalfInt, m: HalfInt) -> Result<Self> {
        if j.twice() < 0 || j.index_of(m).is_none() {
            return Err(Error::InvalidSpin(format!("(j, m) = ({j}, {m})")));
        }
        Ok(Channel { sigma, j, m })
    }
}

/// Ordered, duplicate-free list of channels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChannelTable {
    channels: Vec<Channel>,
}

impl ChannelTable {
    pub fn new(channels: Vec<Channel>) -> Result<Self> {
        if channels.is_empty() {
            return Err(Error::InvalidArgument("channel table is empty".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for c in &channels {
            Channel::new(c.sigma, c.j, c.m)?;
            if !seen.insert(*c) {
                return Err(Error::InvalidArgument(format!("duplicate channel {c:?}")));
            }
        }
        Ok(Self { channels })
    }

    /// `σ = 0..n` with `j = m = 0`.
    pub fn scalar(n: u32) -> Self {
        Self { channels: (0..n).map(Channel::scalar).collect() }
    }

    /// Full multiplets of spin `j` for every `σ` in `sigmas`.
    pub fn spin(sigmas: &[u32], j: HalfInt) -> Result<Self> {
        let mut v = Vec::new();
        for &s in sigmas {
            for m in j.projections() {
                v.push(Channel::new(s, j, m)?);
            }
        }
        Self::new(v)
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn position(&self, c: &Channel) -> Option<usize> {
        self.channels.iter().position(|x| x == c)
    }

    /// Distinct `(σ, j)` pairs in first-appearance order.
    pub fn sectors(&self) -> Vec<(u32, HalfInt)> {
        let mut out: Vec<(u32, HalfInt)> = Vec::new();
        for c in &self.channels {
            if !out.contains(&(c.sigma, c.j)) {
                out.push((c.sigma, c.j));
            }
        }
        out
    }

    /// Distinct spins present.
    pub fn spins(&self) -> Vec<HalfInt> {
        let mut out: Vec<HalfInt> = self.channels.iter().map(|c| c.j).collect();
        out.sort();
        out.dedup();
        out
    }

    /// Channel positions of the `(σ, j)` multiplet indexed by `m` ascending, if complete.
    pub fn multiplet(&self, sigma: u32, j: HalfInt) -> Option<Vec<usize>> {
        j.projections().map(|m| self.position(&Channel { sigma, j, m })).collect()
    }

    fn union(&self, other: &Self) -> Self {
        let mut v = self.channels.clone();
        for c in &other.channels {
            if !v.contains(c) {
                v.push(*c);
            }
        }
        Self { channels: v }
    }
}

/// Result of a resampling action.
#[derive(Clone, Debug)]
pub struct Resampled<T> {
    pub state: WaveFunction<T>,
    /// `‖Uψ‖² / ‖ψ‖² − 1`.
    pub norm_drift: T,
    pub status: ResampleStatus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ResampleStatus {
    Ok,
    /// Norm drift above one percent.
    Warning,
}

const DRIFT_WARNING: f64 = 1e-2;
/// Nodes below this fraction of the peak modulus are ignored by support checks.
const SUPPORT_FLOOR: f64 = 1e-12;

/// Amplitudes on a momentum grid, stored channel-major.
#[derive(Clone, Debug)]
pub struct WaveFunction<T> {
    grid: Arc<MomentumGrid<T>>,
    channels: ChannelTable,
    amps: Vec<C<T>>,
}

impl<T: Real> WaveFunction<T> {
    pub fn zeros(grid: Arc<MomentumGrid<T>>, channels: ChannelTable) -> Result<Self> {
        Self::check_channels(&grid, &channels)?;
        let amps = vec![re(T::zero()); grid.len() * channels.len()];
        Ok(Self { grid, channels, amps })
    }

    /// Samples `f(channel, k)` at every node.
    pub fn from_fn<F>(grid: Arc<MomentumGrid<T>>, channels: ChannelTable, f: F) -> Result<Self>
    where
        F: Fn(&Channel, &FourVector<T>) -> C<T>,
    {
        Self::check_channels(&grid, &channels)?;
        let mut amps = Vec::with_capacity(grid.len() * channels.len());
        for c in channels.channels() {
            amps.extend(grid.nodes().iter().map(|k| f(c, k)));
        }
        Ok(Self { grid, channels, amps })
    }

    pub fn from_amplitudes(grid: Arc<MomentumGrid<T>>, channels: ChannelTable, amps: Vec<C<T>>) -> Result<Self> {
        Self::check_channels(&grid, &channels)?;
        let expected = grid.len() * channels.len();
        if amps.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: amps.len() });
        }
        Ok(Self { grid, channels, amps })
    }

    fn check_channels(grid: &MomentumGrid<T>, channels: &ChannelTable) -> Result<()> {
        if grid.dim() < 4 && channels.channels().iter().any(|c| c.j != HalfInt::ZERO) {
            return Err(Error::InvalidSpin(format!("spin channels need d = 4, grid has d = {}", grid.dim())));
        }
        Ok(())
    }

    pub fn grid(&self) -> &Arc<MomentumGrid<T>> {
        &self.grid
    }

    pub fn channels(&self) -> &ChannelTable {
        &self.channels
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amps
    }

    /// Amplitudes of channel position `c` over all nodes.
    pub fn channel(&self, c: usize) -> &[C<T>] {
        let n = self.grid.len();
        &self.amps[c * n..(c + 1) * n]
    }

    pub fn amplitude(&self, c: usize, node: usize) -> C<T> {
        self.amps[c * self.grid.len() + node]
    }

    pub fn norm_squared(&self) -> T {
        let w = self.grid.weights();
        let n = self.grid.len();
        self.amps.iter().enumerate().map(|(i, a)| a.norm_sqr() * w[i % n]).sum()
    }

    /// `⟨self, other⟩`; channel tables and grids must agree.
    pub fn inner(&self, other: &Self) -> Result<C<T>> {
        self.same_layout(other)?;
        let w = self.grid.weights();
        let n = self.grid.len();
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .enumerate()
            .fold(re(T::zero()), |acc, (i, (a, b))| acc + a.conj() * *b * w[i % n]))
    }

    fn same_layout(&self, other: &Self) -> Result<()> {
        if !Arc::ptr_eq(&self.grid, &other.grid) && self.grid.specs() != other.grid.specs() {
            return Err(Error::InvalidArgument("states live on different grids".into()));
        }
        if self.channels != other.channels {
            return Err(Error::InvalidArgument("states have different channel tables".into()));
        }
        Ok(())
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self { grid: self.grid.clone(), channels: self.channels.clone(), amps: self.amps.iter().map(|a| *a * s).collect() }
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_squared();
        if !(n > T::zero()) {
            return Err(Error::InvalidArgument("cannot normalize a zero state".into()));
        }
        Ok(self.scale(re(T::one() / n.sqrt())))
    }

    /// Nodes where some channel exceeds the support floor.
    pub fn support_nodes(&self) -> Vec<usize> {
        let n = self.grid.len();
        let peak = self.amps.iter().map(|a| a.norm()).fold(T::zero(), T::max);
        if peak == T::zero() {
            return Vec::new();
        }
        let floor = peak * T::lit(SUPPORT_FLOOR);
        (0..n).filter(|&i| (0..self.channels.len()).any(|c| self.amps[c * n + i].norm() > floor)).collect()
    }

    /// `ψ(k) ↦ e^{i k·x} ψ(k)`.
    pub fn apply_translation(&self, x: &FourVector<T>) -> Result<Self> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.dim() });
        }
        let phases: Vec<C<T>> =
            self.grid.nodes().iter().map(|k| minkowski_dot(k, x).map(cis)).collect::<Result<_>>()?;
        let n = self.grid.len();
        let amps = self.amps.iter().enumerate().map(|(i, a)| *a * phases[i % n]).collect();
        Ok(Self { grid: self.grid.clone(), channels: self.channels.clone(), amps })
    }

    /// `ψ_{σjm}(k) ↦ Σ_{m'} R^j_{mm'}(u) ψ_{σjm'}(Λ(a⁻¹)k)` with `u` the Wigner rotation of `(a, k)`.
    pub fn apply_lorentz(&self, a: &Sl2c<T>) -> Result<Resampled<T>> {
        if self.dim() != 4 {
            return Err(Error::UnsupportedDimension(self.dim()));
        }
        let sectors = self.channels.sectors();
        let mut multiplets = Vec::with_capacity(sectors.len());
        for &(s, j) in &sectors {
            let pos = self.channels.multiplet(s, j).ok_or_else(|| {
                Error::InvalidArgument(format!("multiplet (σ = {s}, j = {j}) is incomplete; Lorentz action mixes m"))
            })?;
            multiplets.push((j, pos));
        }
        let fwd = lorentz_of_sl2c(a)?;
        for i in self.support_nodes() {
            if !self.grid.contains(&fwd.apply(&self.grid.nodes()[i])?) {
                return Err(Error::SupportEscapesGrid);
            }
        }
        let back = lorentz_of_sl2c(&a.inverse())?;
        let n = self.grid.len();
        let nc = self.channels.len();
        let tensor = self.grid.tensor();
        let cols: Vec<Vec<C<T>>> = self
            .grid
            .nodes()
            .par_iter()
            .map(|k| -> Result<Vec<C<T>>> {
                let mut out = vec![re(T::zero()); nc];
                let kp = back.apply(k)?;
                let Some(stencil) = tensor.stencil(kp.components()) else { return Ok(out) };
                let u = wigner_rotation(a, k)?;
                let mut src = vec![re(T::zero()); nc];
                for (c, v) in src.iter_mut().enumerate() {
                    let data = &self.amps[c * n..(c + 1) * n];
                    *v = stencil.iter().fold(re(T::zero()), |acc, &(i, w)| acc + data[i] * w);
                }
                for (j, pos) in &multiplets {
                    let r = su2_wigner_matrix(*j, &u)?;
                    for (mi, &p) in pos.iter().enumerate() {
                        out[p] = pos.iter().enumerate().fold(re(T::zero()), |acc, (mj, &q)| acc + r[(mi, mj)] * src[q]);
                    }
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;
        Ok(self.finish_resample(cols))
    }

    /// `ψ(k) ↦ λ^{d/2} ψ(λk)`.
    pub fn apply_dilatation(&self, lambda: T) -> Result<Resampled<T>> {
        if !(lambda > T::zero()) {
            return Err(Error::InvalidArgument(format!("dilatation factor must be positive, got {lambda}")));
        }
        for i in self.support_nodes() {
            if !self.grid.contains(&self.grid.nodes()[i].scale(T::one() / lambda)) {
                return Err(Error::SupportEscapesGrid);
            }
        }
        let n = self.grid.len();
        let nc = self.channels.len();
        let tensor = self.grid.tensor();
        let pref = lambda.powf(T::from_count(self.dim()) / T::lit(2.0));
        let cols: Vec<Vec<C<T>>> = self
            .grid
            .nodes()
            .par_iter()
            .map(|k| {
                let mut out = vec![re(T::zero()); nc];
                if let Some(stencil) = tensor.stencil(k.scale(lambda).components()) {
                    for (c, v) in out.iter_mut().enumerate() {
                        let data = &self.amps[c * n..(c + 1) * n];
                        *v = stencil.iter().fold(re(T::zero()), |acc, &(i, w)| acc + data[i] * w) * pref;
                    }
                }
                out
            })
            .collect();
        Ok(self.finish_resample(cols))
    }

    fn finish_resample(&self, cols: Vec<Vec<C<T>>>) -> Resampled<T> {
        let n = self.grid.len();
        let nc = self.channels.len();
        let mut amps = vec![re(T::zero()); n * nc];
        for (i, col) in cols.into_iter().enumerate() {
            for (c, v) in col.into_iter().enumerate() {
                amps[c * n + i] = v;
            }
        }
        let state = Self { grid: self.grid.clone(), channels: self.channels.clone(), amps };
        let before = self.norm_squared();
        let norm_drift = if before > T::zero() { state.norm_squared() / before - T::one() } else { T::zero() };
        let status = if norm_drift.abs() > T::lit(DRIFT_WARNING) {
            log::warn!("resampling norm drift {:e}", norm_drift.as_f64());
            ResampleStatus::Warning
        } else {
            ResampleStatus::Ok
        };
        Resampled { state, norm_drift, status }
    }

    /// `self + other` over the union of both channel tables.
    pub fn superpose(&self, other: &Self) -> Result<Self> {
        if !Arc::ptr_eq(&self.grid, &other.grid) && self.grid.specs() != other.grid.specs() {
            return Err(Error::InvalidArgument("states live on different grids".into()));
        }
        let channels = self.channels.union(&other.channels);
        let n = self.grid.len();
        let mut amps = vec![re(T::zero()); n * channels.len()];
        for src in [self, other] {
            for (c, ch) in src.channels.channels().iter().enumerate() {
                let p = channels.position(ch).expect("union contains channel");
                for i in 0..n {
                    amps[p * n + i] = amps[p * n + i] + src.amps[c * n + i];
                }
            }
        }
        Ok(Self { grid: self.grid.clone(), channels, amps })
    }

    /// `∂ψ/∂k^α` for every channel.
    pub fn partial_derivative(&self, axis: usize) -> Result<Self> {
        if axis >= self.dim() {
            return Err(Error::InvalidArgument(format!("axis {axis} out of range for d = {}", self.dim())));
        }
        let n = self.grid.len();
        let mut amps = Vec::with_capacity(self.amps.len());
        for c in 0..self.channels.len() {
            amps.extend(self.grid.tensor().differentiate(&self.amps[c * n..(c + 1) * n], axis));
        }
        Ok(Self { grid: self.grid.clone(), channels: self.channels.clone(), amps })
    }

    /// Channel positions and projections grouped by `(σ, j)`.
    pub fn sector_map(&self) -> BTreeMap<(u32, HalfInt), Vec<(HalfInt, usize)>> {
        let mut map: BTreeMap<(u32, HalfInt), Vec<(HalfInt, usize)>> = BTreeMap::new();
        for (p, c) in self.channels.channels().iter().enumerate() {
            map.entry((c.sigma, c.j)).or_default().push((c.m, p));
        }
        map
    }

    pub fn snapshot(&self) -> StateSnapshot {
        let mut amplitudes = Vec::with_capacity(2 * self.amps.len());
        for a in &self.amps {
            amplitudes.push(a.re.as_f64());
            amplitudes.push(a.im.as_f64());
        }
        StateSnapshot {
            schema: SNAPSHOT_SCHEMA.into(),
            dimension: self.dim(),
            grid: self.grid.specs(),
            channels: self
                .channels
                .channels()
                .iter()
                .map(|c| SnapshotChannel { sigma: c.sigma, two_j: c.j.twice(), two_m: c.m.twice() })
                .collect(),
            amplitudes,
        }
    }

    pub fn from_snapshot(s: &StateSnapshot) -> Result<Self> {
        if s.schema != SNAPSHOT_SCHEMA {
            return Err(Error::InvalidArgument(format!("unknown snapshot schema {}", s.schema)));
        }
        if s.grid.len() != s.dimension {
            return Err(Error::DimensionMismatch { expected: s.dimension, found: s.grid.len() });
        }
        let grid = Arc::new(MomentumGrid::from_specs(&s.grid)?);
        let channels = ChannelTable::new(
            s.channels
                .iter()
                .map(|c| Channel::new(c.sigma, HalfInt::from_twice(c.two_j), HalfInt::from_twice(c.two_m)))
                .collect::<Result<_>>()?,
        )?;
        if s.amplitudes.len() % 2 != 0 {
            return Err(Error::InvalidArgument("amplitude array must interleave re and im".into()));
        }
        let amps = s.amplitudes.chunks(2).map(|p| C::new(T::lit(p[0]), T::lit(p[1]))).collect();
        Self::from_amplitudes(grid, channels, amps)
    }
}

pub const SNAPSHOT_SCHEMA: &str = "eventloc.state/1";

/// JSON form of a state: grid axes, channel table and interleaved `(re, im)` amplitudes, channel-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSnapshot {
    pub schema: String,
    pub dimension: usize,
    pub grid: Vec<AxisSpec>,
    pub channels: Vec<SnapshotChannel>,
    pub amplitudes: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnapshotChannel {
    pub sigma: u32,
    pub two_j: i32,
    pub two_m: i32,
}
