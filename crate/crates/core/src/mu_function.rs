//! Scalar functions of the invariant mass `μ` used as kernel entries and coefficients.

use crate::error::{Error, Result};
use crate::scalar::{cis, re, Real, C};

/// Complex function of `μ > 0`.
#[derive(Clone, Debug, PartialEq)]
pub enum MuFunction<T> {
    Constant(C<T>),
    /// `a · e^{i b μ^p}`.
    Phase { amplitude: T, coeff: T, power: T },
    /// `a · cos(b μ^p)`.
    Cos { amplitude: T, coeff: T, power: T },
    /// `a · sin(b μ^p)`.
    Sin { amplitude: T, coeff: T, power: T },
    /// Cubic Hermite interpolation of samples; clamped outside the table.
    Table { mu: Vec<T>, values: Vec<C<T>> },
}

impl<T: Real> MuFunction<T> {
    pub fn constant(v: T) -> Self {
        MuFunction::Constant(re(v))
    }

    pub fn zero() -> Self {
        MuFunction::Constant(re(T::zero()))
    }

    pub fn table(mu: Vec<T>, values: Vec<C<T>>) -> Result<Self> {
        if mu.len() != values.len() || mu.len() < 2 {
            return Err(Error::InvalidArgument("table needs matching abscissae and values, at least two".into()));
        }
        if mu.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("table abscissae must increase strictly".into()));
        }
        Ok(MuFunction::Table { mu, values })
    }

    pub fn eval(&self, mu: T) -> C<T> {
        match self {
            MuFunction::Constant(v) => *v,
            MuFunction::Phase { amplitude, coeff, power } => cis(*coeff * mu.powf(*power)) * *amplitude,
            MuFunction::Cos { amplitude, coeff, power } => re(*amplitude * (*coeff * mu.powf(*power)).cos()),
            MuFunction::Sin { amplitude, coeff, power } => re(*amplitude * (*coeff * mu.powf(*power)).sin()),
            MuFunction::Table { mu: xs, values } => hermite(xs, values, mu),
        }
    }

    /// True when the function is constant by construction.
    pub fn is_constant(&self) -> bool {
        match self {
            MuFunction::Constant(_) => true,
            MuFunction::Phase { coeff, power, .. } | MuFunction::Cos { coeff, power, .. } | MuFunction::Sin { coeff, power, .. } => {
                *coeff == T::zero() || *power == T::zero()
            }
            MuFunction::Table { values, .. } => values.windows(2).all(|w| w[0] == w[1]),
        }
    }

    /// Five-point central difference `dF/dμ` with step `10⁻³ μ`; exactly zero for constants.
    pub fn derivative(&self, mu: T) -> C<T> {
        if self.is_constant() {
            return re(T::zero());
        }
        let h = mu * T::lit(1e-3);
        let f = |s: f64| self.eval(mu + h * T::lit(s));
        (f(-2.0) - f(-1.0) * re(T::lit(8.0)) + f(1.0) * re(T::lit(8.0)) - f(2.0)) / re(T::lit(12.0) * h)
    }
}

fn hermite<T: Real>(xs: &[T], ys: &[C<T>], x: T) -> C<T> {
    let n = xs.len();
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[n - 1] {
        return ys[n - 1];
    }
    let i = xs.partition_point(|&v| v <= x) - 1;
    let slope = |k: usize| -> C<T> {
        if k == 0 {
            (ys[1] - ys[0]) / re(xs[1] - xs[0])
        } else if k == n - 1 {
            (ys[n - 1] - ys[n - 2]) / re(xs[n - 1] - xs[n - 2])
        } else {
            (ys[k + 1] - ys[k - 1]) / re(xs[k + 1] - xs[k - 1])
        }
    };
    let h = xs[i + 1] - xs[i];
    let t = (x - xs[i]) / h;
    let (t2, t3) = (t * t, t * t * t);
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let h00 = two * t3 - three * t2 + T::one();
    let h10 = t3 - two * t2 + t;
    let h01 = -two * t3 + three * t2;
    let h11 = t3 - t2;
    ys[i] * re(h00) + slope(i) * re(h10 * h) + ys[i + 1] * re(h01) + slope(i + 1) * re(h11 * h)
}
