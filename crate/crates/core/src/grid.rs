//! Momentum grids inside the open future cone and space-time grids.

use crate::error::{Error, Result};
use crate::kinematics::FourVector;
use crate::quadrature::{AxisRule, AxisSpec, TensorGrid};
use crate::scalar::Real;

fn check_dim(d: usize) -> Result<()> {
    if matches!(d, 1 | 2 | 4) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(d))
    }
}

/// Tensor-product Gauss–Legendre grid over a box strictly inside the future cone.
#[derive(Clone, Debug)]
pub struct MomentumGrid<T> {
    tensor: TensorGrid<T>,
    nodes: Vec<FourVector<T>>,
    weights: Vec<T>,
    mus: Vec<T>,
}

impl<T: Real> MomentumGrid<T> {
    pub fn new(axes: Vec<AxisRule<T>>) -> Result<Self> {
        check_dim(axes.len())?;
        let tensor = TensorGrid::new(axes);
        let d = tensor.dim();
        let lo: Vec<T> = tensor.axes().iter().map(|a| a.min()).collect();
        let hi: Vec<T> = tensor.axes().iter().map(|a| a.max()).collect();
        let far: T = (1..d).map(|r| lo[r].abs().max(hi[r].abs()).powi(2)).sum::<T>().sqrt();
        if !(lo[0] > far) || (d == 4 && lo[0] * lo[0] - far * far < T::lit(1e-10) * hi[0] * hi[0]) {
            return Err(Error::OutsideFutureCone { k0: lo[0].as_f64(), spatial: far.as_f64() });
        }
        let mut nodes = Vec::with_capacity(tensor.len());
        let mut mus = Vec::with_capacity(tensor.len());
        for i in 0..tensor.len() {
            let k = FourVector::new(&tensor.point(i))?;
            mus.push(k.mass()?);
            nodes.push(k);
        }
        let weights = tensor.weights();
        Ok(Self { tensor, nodes, weights, mus })
    }

    /// Equal panels per axis.
    pub fn from_box(min: &[T], max: &[T], panels: &[usize], order: usize) -> Result<Self> {
        if min.len() != max.len() || min.len() != panels.len() {
            return Err(Error::InvalidArgument("box bounds and panel counts differ in length".into()));
        }
        let axes = (0..min.len())
            .map(|a| AxisRule::uniform_panels(min[a], max[a], panels[a], order))
            .collect::<Result<Vec<_>>>()?;
        Self::new(axes)
    }

    pub fn from_specs(specs: &[AxisSpec]) -> Result<Self> {
        Self::new(specs.iter().map(AxisRule::from_spec).collect::<Result<Vec<_>>>()?)
    }

    pub fn specs(&self) -> Vec<AxisSpec> {
        self.tensor.axes().iter().map(|a| a.spec()).collect()
    }

    /// Image of the grid under `k ↦ λk`.
    pub fn scaled(&self, lambda: T) -> Result<Self> {
        Self::new(self.tensor.axes().iter().map(|a| a.scaled(lambda)).collect::<Result<Vec<_>>>()?)
    }

    pub fn dim(&self) -> usize {
        self.tensor.dim()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[FourVector<T>] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// `μ` at every node.
    pub fn masses(&self) -> &[T] {
        &self.mus
    }

    pub fn tensor(&self) -> &TensorGrid<T> {
        &self.tensor
    }

    pub fn volume(&self) -> T {
        self.tensor.axes().iter().map(|a| a.max() - a.min()).fold(T::one(), |p, x| p * x)
    }

    pub fn contains(&self, k: &FourVector<T>) -> bool {
        k.dim() == self.dim() && self.tensor.contains(k.components())
    }

    /// Per-axis bounds `(min, max)`.
    pub fn bounds(&self) -> Vec<(T, T)> {
        self.tensor.axes().iter().map(|a| (a.min(), a.max())).collect()
    }
}

/// Tensor-product Gauss–Legendre grid on space-time.
#[derive(Clone, Debug)]
pub struct SpacetimeGrid<T> {
    tensor: TensorGrid<T>,
}

impl<T: Real> SpacetimeGrid<T> {
    pub fn new(axes: Vec<AxisRule<T>>) -> Result<Self> {
        check_dim(axes.len())?;
        Ok(Self { tensor: TensorGrid::new(axes) })
    }

    pub fn from_box(min: &[T], max: &[T], panels: &[usize], order: usize) -> Result<Self> {
        if min.len() != max.len() || min.len() != panels.len() {
            return Err(Error::InvalidArgument("box bounds and panel counts differ in length".into()));
        }
        Self::new(
            (0..min.len())
                .map(|a| AxisRule::uniform_panels(min[a], max[a], panels[a], order))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    /// Symmetric box `[-h_a, h_a]` per axis.
    pub fn centered(half_widths: &[T], panels: usize, order: usize) -> Result<Self> {
        let min: Vec<T> = half_widths.iter().map(|&h| -h).collect();
        Self::from_box(&min, half_widths, &vec![panels; half_widths.len()], order)
    }

    pub fn from_specs(specs: &[AxisSpec]) -> Result<Self> {
        Self::new(specs.iter().map(AxisRule::from_spec).collect::<Result<Vec<_>>>()?)
    }

    pub fn specs(&self) -> Vec<AxisSpec> {
        self.tensor.axes().iter().map(|a| a.spec()).collect()
    }

    pub fn shifted(&self, y: &FourVector<T>) -> Result<Self> {
        if y.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: y.dim() });
        }
        Self::new(
            self.tensor.axes().iter().enumerate().map(|(a, ax)| ax.shifted(y.get(a))).collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn scaled(&self, lambda: T) -> Result<Self> {
        Self::new(self.tensor.axes().iter().map(|a| a.scaled(lambda)).collect::<Result<Vec<_>>>()?)
    }

    pub fn dim(&self) -> usize {
        self.tensor.dim()
    }

    pub fn len(&self) -> usize {
        self.tensor.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensor.is_empty()
    }

    pub fn tensor(&self) -> &TensorGrid<T> {
        &self.tensor
    }

    pub fn point(&self, i: usize) -> FourVector<T> {
        FourVector::new(&self.tensor.point(i)).expect("grid dimension is valid")
    }

    pub fn points(&self) -> Vec<FourVector<T>> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    pub fn weights(&self) -> Vec<T> {
        self.tensor.weights()
    }

    pub fn bounds(&self) -> Vec<(T, T)> {
        self.tensor.axes().iter().map(|a| (a.min(), a.max())).collect()
    }
}
