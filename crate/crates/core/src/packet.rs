//! Wave-packet constructors and scaled families `λ^{-d/2} c_σ(μ) φ(k/λ)`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::MomentumGrid;
use crate::kinematics::{minkowski_dot, FourVector};
use crate::mu_function::MuFunction;
use crate::scalar::{cis, Real, C};
use crate::state::{Channel, ChannelTable, WaveFunction};

/// Real momentum-space profile with compact support.
#[derive(Clone, Debug, PartialEq)]
pub enum Envelope<T> {
    /// `exp(−r²/2)` with `r² = Σ_a ((k_a − c_a)/w_a)²`, set to zero beyond `r = cutoff`.
    Gaussian { center: Vec<T>, width: Vec<T>, cutoff: T },
    /// `exp(−1/(1 − r²))` for `r < 1`, `r² = Σ_a ((k_a − c_a)/ρ_a)²`.
    Bump { center: Vec<T>, radius: Vec<T> },
}

pub const DEFAULT_CUTOFF: f64 = 9.0;

impl<T: Real> Envelope<T> {
    pub fn gaussian(center: Vec<T>, width: Vec<T>) -> Result<Self> {
        Self::validated(Envelope::Gaussian { center, width, cutoff: T::lit(DEFAULT_CUTOFF) })
    }

    pub fn bump(center: Vec<T>, radius: Vec<T>) -> Result<Self> {
        Self::validated(Envelope::Bump { center, radius })
    }

    pub fn validated(self) -> Result<Self> {
        let (c, s) = self.parts();
        if c.len() != s.len() {
            return Err(Error::DimensionMismatch { expected: c.len(), found: s.len() });
        }
        if !matches!(c.len(), 1 | 2 | 4) {
            return Err(Error::UnsupportedDimension(c.len()));
        }
        if s.iter().any(|&w| !(w > T::zero())) {
            return Err(Error::InvalidArgument("envelope widths must be positive".into()));
        }
        if let Envelope::Gaussian { cutoff, .. } = &self {
            if !(*cutoff > T::zero()) {
                return Err(Error::InvalidArgument("envelope cutoff must be positive".into()));
            }
        }
        Ok(self)
    }

    fn parts(&self) -> (&[T], &[T]) {
        match self {
            Envelope::Gaussian { center, width, .. } => (center, width),
            Envelope::Bump { center, radius } => (center, radius),
        }
    }

    pub fn dim(&self) -> usize {
        self.parts().0.len()
    }

    pub fn center(&self) -> &[T] {
        self.parts().0
    }

    fn r2(&self, k: &[T]) -> T {
        let (c, s) = self.parts();
        k.iter().zip(c).zip(s).map(|((&x, &c), &s)| ((x - c) / s).powi(2)).sum()
    }

    pub fn eval(&self, k: &[T]) -> T {
        let r2 = self.r2(k);
        match self {
            Envelope::Gaussian { cutoff, .. } => {
                if r2 > *cutoff * *cutoff {
                    T::zero()
                } else {
                    (-r2 / T::lit(2.0)).exp()
                }
            }
            Envelope::Bump { .. } => {
                if r2 >= T::one() {
                    T::zero()
                } else {
                    (-T::one() / (T::one() - r2)).exp()
                }
            }
        }
    }

    /// Axis-aligned box `(min, max)` containing the support.
    pub fn support_box(&self) -> (Vec<T>, Vec<T>) {
        let (c, s) = self.parts();
        let reach = match self {
            Envelope::Gaussian { cutoff, .. } => *cutoff,
            Envelope::Bump { .. } => T::one(),
        };
        (
            c.iter().zip(s).map(|(&c, &s)| c - reach * s).collect(),
            c.iter().zip(s).map(|(&c, &s)| c + reach * s).collect(),
        )
    }

    /// True when the support box lies strictly inside the open future cone.
    pub fn inside_cone(&self) -> bool {
        box_inside_cone(&self.support_box())
    }

    /// True when the support box lies inside the grid hull.
    pub fn inside_grid(&self, grid: &MomentumGrid<T>) -> bool {
        let (lo, hi) = self.support_box();
        grid.dim() == lo.len() && grid.bounds().iter().zip(lo.iter().zip(&hi)).all(|(&(a, b), (&l, &h))| a <= l && h <= b)
    }
}

fn box_inside_cone<T: Real>((lo, hi): &(Vec<T>, Vec<T>)) -> bool {
    let far: T = (1..lo.len()).map(|r| lo[r].abs().max(hi[r].abs()).powi(2)).sum::<T>().sqrt();
    lo[0] > far
}

/// Normalized packet `c_σ · φ(k) · e^{ik·x₀}`.
#[derive(Clone, Debug)]
pub struct PacketSpec<T> {
    pub envelope: Envelope<T>,
    /// Space-time translation applied after construction.
    pub displacement: Option<FourVector<T>>,
    pub coefficients: Vec<(Channel, C<T>)>,
}

pub fn make_packet<T: Real>(grid: Arc<MomentumGrid<T>>, spec: &PacketSpec<T>) -> Result<WaveFunction<T>> {
    if spec.envelope.dim() != grid.dim() {
        return Err(Error::DimensionMismatch { expected: grid.dim(), found: spec.envelope.dim() });
    }
    if !spec.envelope.inside_cone() {
        return Err(Error::SupportOutsideCone);
    }
    if !spec.envelope.inside_grid(&grid) {
        return Err(Error::SupportEscapesGrid);
    }
    let table = ChannelTable::new(spec.coefficients.iter().map(|c| c.0).collect())?;
    let x0 = spec.displacement;
    let psi = WaveFunction::from_fn(grid, table.clone(), |ch, k| {
        let coeff = spec.coefficients.iter().find(|c| c.0 == *ch).map(|c| c.1).unwrap_or_default();
        let phase = match &x0 {
            Some(x) => cis(minkowski_dot(k, x).unwrap_or_else(|_| T::zero())),
            None => C::new(T::one(), T::zero()),
        };
        coeff * phase * spec.envelope.eval(k.components())
    })?;
    if let Some(x) = &x0 {
        if x.dim() != psi.dim() {
            return Err(Error::DimensionMismatch { expected: psi.dim(), found: x.dim() });
        }
    }
    psi.normalized()
}

/// Family `ψ^{(λ)}_σ(k) = λ^{-d/2} c_σ(μ) φ(k/λ)` with `φ` normalized on the base grid.
#[derive(Clone, Debug)]
pub struct ScaledFamily<T> {
    envelope: Envelope<T>,
    channels: ChannelTable,
    coefficients: Vec<MuFunction<T>>,
    base_grid: Arc<MomentumGrid<T>>,
    envelope_norm: T,
}

/// Tolerance on `Σ_σ |c_σ(μ)|² = 1`.
const COEFF_TOL: f64 = 1e-10;

impl<T: Real> ScaledFamily<T> {
    pub fn new(
        envelope: Envelope<T>,
        channels: ChannelTable,
        coefficients: Vec<MuFunction<T>>,
        base_grid: Arc<MomentumGrid<T>>,
    ) -> Result<Self> {
        if channels.len() != coefficients.len() {
            return Err(Error::DimensionMismatch { expected: channels.len(), found: coefficients.len() });
        }
        if envelope.dim() != base_grid.dim() {
            return Err(Error::DimensionMismatch { expected: base_grid.dim(), found: envelope.dim() });
        }
        if !envelope.inside_cone() {
            return Err(Error::SupportOutsideCone);
        }
        if !envelope.inside_grid(&base_grid) {
            return Err(Error::SupportEscapesGrid);
        }
        let envelope_norm: T = base_grid
            .nodes()
            .iter()
            .zip(base_grid.weights())
            .map(|(k, &w)| envelope.eval(k.components()).powi(2) * w)
            .sum();
        if !(envelope_norm > T::zero()) {
            return Err(Error::InvalidArgument("envelope vanishes on the base grid".into()));
        }
        let fam = Self { envelope, channels, coefficients, base_grid, envelope_norm };
        fam.check_coefficients(fam.base_grid.masses())?;
        Ok(fam)
    }

    fn check_coefficients(&self, mus: &[T]) -> Result<()> {
        for &mu in mus {
            let s: T = self.coefficients.iter().map(|c| c.eval(mu).norm_sqr()).sum();
            if (s - T::one()).abs() > T::tol(COEFF_TOL) {
                return Err(Error::UnnormalizedCoefficients { norm: s.as_f64() });
            }
        }
        Ok(())
    }

    pub fn envelope(&self) -> &Envelope<T> {
        &self.envelope
    }

    pub fn channels(&self) -> &ChannelTable {
        &self.channels
    }

    pub fn coefficients(&self) -> &[MuFunction<T>] {
        &self.coefficients
    }

    pub fn base_grid(&self) -> &Arc<MomentumGrid<T>> {
        &self.base_grid
    }

    /// `ψ^{(λ)}` on the base grid scaled by `λ`.
    pub fn realize(&self, lambda: T) -> Result<WaveFunction<T>> {
        if !(lambda > T::zero()) {
            return Err(Error::InvalidArgument(format!("scale must be positive, got {lambda}")));
        }
        let grid = Arc::new(self.base_grid.scaled(lambda)?);
        self.check_coefficients(grid.masses())?;
        let d = T::from_count(grid.dim());
        let pref = lambda.powf(-d / T::lit(2.0)) / self.envelope_norm.sqrt();
        let table = self.channels.clone();
        WaveFunction::from_fn(grid, table.clone(), |ch, k| {
            let p = table.position(ch).expect("channel from table");
            let mu = k.mass().unwrap_or_else(|_| T::zero());
            self.coefficients[p].eval(mu) * (pref * self.envelope.eval(k.scale(T::one() / lambda).components()))
        })
    }
}
