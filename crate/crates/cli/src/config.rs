//! TOML scenario schema and the builders that turn it into engine objects.

use std::path::Path;
use std::sync::Arc;

use eventloc::pov::GammaLabel;
use eventloc::scalar::C;
use eventloc::{
    Channel, ChannelTable, Envelope, FourVector, HalfInt, IrrepLabel, Kernel, MomentumGrid, MuFunction, PacketSpec,
    PoincareEntry, PoincareKernel, ScaledFamily, SpacetimeGrid, TranslationKernel, WaveFunction,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA_VERSION: &str = "eventloc.scenario/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    Certify,
    Density,
    Coords,
    Classify,
    Definiteness,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub dimension: usize,
    #[serde(default = "all_pipelines")]
    pub pipelines: Vec<Pipeline>,
    pub momentum_grid: BoxGrid,
    #[serde(default)]
    pub spacetime_grid: Option<BoxGrid>,
    #[serde(default)]
    pub mu_samples: Option<MuSamples>,
    /// Masses for the `T(μ)` stencil, spread like the certification masses.
    #[serde(default = "default_delay_samples")]
    pub time_delay_samples: usize,
    pub state: StateConfig,
    pub kernel: KernelConfig,
    #[serde(default)]
    pub checks: Checks,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub definiteness: Option<DefinitenessConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_delay_samples() -> usize {
    1025
}

fn all_pipelines() -> Vec<Pipeline> {
    vec![Pipeline::Certify, Pipeline::Density, Pipeline::Coords, Pipeline::Classify, Pipeline::Definiteness]
}

/// Gauss–Legendre box: `panels` per axis, `order` nodes per panel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxGrid {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    pub panels: Vec<usize>,
    pub order: usize,
}

/// Evenly spaced masses for kernel certification and `T(μ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MuSamples {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvelopeConfig {
    #[serde(default = "gaussian")]
    pub shape: String,
    pub center: Vec<f64>,
    /// Widths for the Gaussian, radii for the bump.
    pub width: Vec<f64>,
    #[serde(default = "default_cutoff")]
    pub cutoff: f64,
}

fn gaussian() -> String {
    "gaussian".into()
}

fn default_cutoff() -> f64 {
    eventloc::packet::DEFAULT_CUTOFF
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelCoefficient {
    #[serde(default)]
    pub sigma: u32,
    #[serde(default)]
    pub j: f64,
    #[serde(default)]
    pub m: f64,
    #[serde(default = "one")]
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    #[serde(default)]
    pub sigma: u32,
    #[serde(default)]
    pub j: f64,
    #[serde(default)]
    pub m: f64,
    pub coefficient: FnSpec,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateConfig {
    /// Normalized packet, optionally displaced by `x₀`.
    Packet {
        envelope: EnvelopeConfig,
        #[serde(default)]
        displacement: Option<Vec<f64>>,
        channels: Vec<ChannelCoefficient>,
    },
    /// Scaled family; the density and coordinate pipelines use `λ = 1`.
    Family { envelope: EnvelopeConfig, channels: Vec<ChannelConfig> },
}

/// Scalar function of `μ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FnSpec {
    Constant {
        re: f64,
        #[serde(default)]
        im: f64,
    },
    Phase {
        #[serde(default = "one")]
        amplitude: f64,
        coeff: f64,
        power: f64,
    },
    Cos {
        #[serde(default = "one")]
        amplitude: f64,
        coeff: f64,
        power: f64,
    },
    Sin {
        #[serde(default = "one")]
        amplitude: f64,
        coeff: f64,
        power: f64,
    },
    Table {
        mu: Vec<f64>,
        re: Vec<f64>,
        #[serde(default)]
        im: Option<Vec<f64>>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuasiRow {
    pub omega: f64,
    pub row: Vec<FnSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuasiSector {
    pub j: f64,
    pub rows: Vec<QuasiRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryConfig {
    #[serde(default)]
    pub nu: u32,
    pub m: f64,
    pub c_re: f64,
    #[serde(default)]
    pub c_im: f64,
    pub omega: f64,
    pub j: f64,
    pub row: Vec<FnSpec>,
}

/// Catalog entry or tabulated kernel. `scale` multiplies translation kernels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "catalog", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelConfig {
    Flat {
        #[serde(default = "one_usize")]
        channels: usize,
        #[serde(default = "one")]
        scale: f64,
    },
    Rotation {
        rate: f64,
        #[serde(default = "one")]
        power: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    Phase {
        coeff: f64,
        power: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    /// `e^{i b μ²}`.
    QuadraticPhase {
        coeff: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    /// Row-major `rows × cols` table of functions.
    Matrix {
        rows: usize,
        cols: usize,
        entries: Vec<FnSpec>,
        #[serde(default = "one")]
        scale: f64,
    },
    Quasi {
        #[serde(default = "one_usize")]
        columns: usize,
        #[serde(default = "default_truncation")]
        truncation: f64,
        sectors: Vec<QuasiSector>,
    },
    Poincare {
        #[serde(default = "one_usize")]
        columns: usize,
        #[serde(default = "default_truncation")]
        truncation: f64,
        entries: Vec<EntryConfig>,
    },
}

fn one_usize() -> usize {
    1
}

fn default_truncation() -> f64 {
    12.0
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checks {
    /// Shift `y` for the covariance check `ρ(ψ_y, x + y) = ρ(ψ, x)`.
    #[serde(default)]
    pub translation_shift: Option<Vec<f64>>,
}

/// Every pass/fail threshold of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// `‖K‖ ≤ 1 + contraction`.
    pub contraction: f64,
    /// `max |K†K − 1| ≤ isometry`.
    pub isometry: f64,
    /// `∫ρ ≤ ‖ψ‖² + boundedness`.
    pub boundedness: f64,
    /// `|∫ρ − ‖ψ‖²|` for isometric kernels on captured states.
    pub normalization: f64,
    /// Share of `ρ` inside the x-grid below which normalization and moments are not judged.
    pub capture_min: f64,
    pub covariance: f64,
    /// Pairwise real-part difference between coordinate routes.
    pub route_agreement: f64,
    /// `T(μ)` hermiticity residual.
    pub hermiticity: f64,
    /// Tolerated decrease of `P_λ` between consecutive scales.
    pub definiteness_noise: f64,
    /// `P_λ` at the largest scale for a definite trend.
    pub final_probability: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            contraction: 1e-10,
            isometry: 1e-10,
            boundedness: 1e-6,
            normalization: 1e-4,
            capture_min: 0.999,
            covariance: 1e-8,
            route_agreement: 1e-3,
            hermiticity: 1e-8,
            definiteness_noise: 1e-3,
            final_probability: 0.99,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DefinitenessConfig {
    pub schedule: Vec<f64>,
    pub region_min: Vec<f64>,
    pub region_max: Vec<f64>,
    /// Width-window half-widths at `λ = 1`.
    pub window: Vec<f64>,
    #[serde(default = "two")]
    pub region_panels: usize,
    #[serde(default = "ten")]
    pub region_order: usize,
    #[serde(default = "eight")]
    pub window_panels: usize,
    #[serde(default = "ten")]
    pub window_order: usize,
    #[serde(default = "default_offsets")]
    pub offsets: Vec<f64>,
    #[serde(default)]
    pub spin: f64,
    /// Expected trend; a mismatch fails the run.
    #[serde(default)]
    pub expect_definite: Option<bool>,
}

fn two() -> usize {
    2
}
fn eight() -> usize {
    8
}
fn ten() -> usize {
    10
}
fn default_offsets() -> Vec<f64> {
    vec![0.5, 1.0]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub csv: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { csv: true }
    }
}

fn cfg(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn half(v: f64, what: &str) -> Result<HalfInt, CliError> {
    HalfInt::from_f64(v).map_err(|e| cfg(format!("{what}: {e}")))
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let c: ScenarioConfig = toml::from_str(text).map_err(|e| cfg(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| cfg(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Structural checks that need no numerics.
    pub fn validate(&self) -> Result<(), CliError> {
        let d = self.dimension;
        if !matches!(d, 1 | 2 | 4) {
            return Err(cfg(format!("dimension must be 1, 2 or 4, got {d}")));
        }
        check_box("momentum_grid", &self.momentum_grid, d)?;
        if let Some(g) = &self.spacetime_grid {
            check_box("spacetime_grid", g, d)?;
        }
        let needs_x = self.pipelines.iter().any(|p| matches!(p, Pipeline::Density | Pipeline::Coords));
        if needs_x && self.spacetime_grid.is_none() {
            return Err(cfg("density and coords pipelines need [spacetime_grid]"));
        }
        if let Some(m) = &self.mu_samples {
            if !(m.min > 0.0 && m.max > m.min && m.count >= 3) {
                return Err(cfg("mu_samples needs 0 < min < max and count ≥ 3"));
            }
        }
        let env = match &self.state {
            StateConfig::Packet { envelope, displacement, channels } => {
                if channels.is_empty() {
                    return Err(cfg("state needs at least one channel"));
                }
                if displacement.as_ref().is_some_and(|x| x.len() != d) {
                    return Err(cfg("state.displacement has the wrong dimension"));
                }
                envelope
            }
            StateConfig::Family { envelope, channels } => {
                if channels.is_empty() {
                    return Err(cfg("state needs at least one channel"));
                }
                envelope
            }
        };
        if env.center.len() != d || env.width.len() != d {
            return Err(cfg("state.envelope has the wrong dimension"));
        }
        if !matches!(env.shape.as_str(), "gaussian" | "bump") {
            return Err(cfg(format!("unknown envelope shape '{}'", env.shape)));
        }
        if let Some(y) = &self.checks.translation_shift {
            if y.len() != d {
                return Err(cfg("checks.translation_shift has the wrong dimension"));
            }
        }
        if self.pipelines.contains(&Pipeline::Definiteness) {
            let Some(def) = &self.definiteness else {
                return Err(cfg("definiteness pipeline needs [definiteness]"));
            };
            if !matches!(self.state, StateConfig::Family { .. }) {
                return Err(cfg("definiteness pipeline needs a family state"));
            }
            if def.region_min.len() != d || def.region_max.len() != d || def.window.len() != d {
                return Err(cfg("definiteness region or window has the wrong dimension"));
            }
        }
        let t = &self.tolerances;
        let all = [
            t.contraction, t.isometry, t.boundedness, t.normalization, t.covariance, t.route_agreement,
            t.hermiticity, t.definiteness_noise,
        ];
        if all.iter().any(|v| !(*v >= 0.0)) || !(0.0..=1.0).contains(&t.capture_min) || !(0.0..=1.0).contains(&t.final_probability) {
            return Err(cfg("tolerances must be non-negative; capture_min and final_probability in [0, 1]"));
        }
        Ok(())
    }

    pub fn is_poincare(&self) -> bool {
        matches!(self.kernel, KernelConfig::Quasi { .. } | KernelConfig::Poincare { .. })
    }
}

fn check_box(name: &str, g: &BoxGrid, d: usize) -> Result<(), CliError> {
    if g.min.len() != d || g.max.len() != d || g.panels.len() != d {
        return Err(cfg(format!("{name} has the wrong dimension")));
    }
    if g.min.iter().zip(&g.max).any(|(a, b)| !(b > a)) || g.panels.contains(&0) || g.order == 0 {
        return Err(cfg(format!("{name} needs min < max, panels ≥ 1 and order ≥ 1")));
    }
    Ok(())
}

pub fn momentum_grid(g: &BoxGrid) -> Result<Arc<MomentumGrid<f64>>, CliError> {
    Ok(Arc::new(MomentumGrid::from_box(&g.min, &g.max, &g.panels, g.order)?))
}

pub fn spacetime_grid(g: &BoxGrid) -> Result<SpacetimeGrid<f64>, CliError> {
    Ok(SpacetimeGrid::from_box(&g.min, &g.max, &g.panels, g.order)?)
}

pub fn mu_function(f: &FnSpec) -> Result<MuFunction<f64>, CliError> {
    Ok(match f {
        FnSpec::Constant { re, im } => MuFunction::Constant(C::new(*re, *im)),
        FnSpec::Phase { amplitude, coeff, power } => MuFunction::Phase { amplitude: *amplitude, coeff: *coeff, power: *power },
        FnSpec::Cos { amplitude, coeff, power } => MuFunction::Cos { amplitude: *amplitude, coeff: *coeff, power: *power },
        FnSpec::Sin { amplitude, coeff, power } => MuFunction::Sin { amplitude: *amplitude, coeff: *coeff, power: *power },
        FnSpec::Table { mu, re, im } => {
            let im = im.clone().unwrap_or_else(|| vec![0.0; re.len()]);
            if im.len() != re.len() {
                return Err(cfg("table re and im lengths differ"));
            }
            MuFunction::table(mu.clone(), re.iter().zip(&im).map(|(&a, &b)| C::new(a, b)).collect())?
        }
    })
}

fn envelope(e: &EnvelopeConfig) -> Result<Envelope<f64>, CliError> {
    let env = match e.shape.as_str() {
        "gaussian" => Envelope::Gaussian { center: e.center.clone(), width: e.width.clone(), cutoff: e.cutoff },
        "bump" => Envelope::Bump { center: e.center.clone(), radius: e.width.clone() },
        other => return Err(cfg(format!("unknown envelope shape '{other}'"))),
    };
    Ok(env.validated()?)
}

/// Either a single state or a family; the family's `λ = 1` member stands in for the state.
pub enum BuiltState {
    Packet(WaveFunction<f64>),
    Family(ScaledFamily<f64>, WaveFunction<f64>),
}

impl BuiltState {
    pub fn psi(&self) -> &WaveFunction<f64> {
        match self {
            BuiltState::Packet(p) | BuiltState::Family(_, p) => p,
        }
    }
}

pub fn build_state(c: &ScenarioConfig) -> Result<BuiltState, CliError> {
    let grid = momentum_grid(&c.momentum_grid)?;
    match &c.state {
        StateConfig::Packet { envelope: e, displacement, channels } => {
            let coefficients = channels
                .iter()
                .map(|ch| {
                    let channel = Channel::new(ch.sigma, half(ch.j, "channel j")?, half(ch.m, "channel m")?)?;
                    Ok((channel, C::new(ch.re, ch.im)))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            let displacement = displacement.as_ref().map(|x| FourVector::new(x)).transpose()?;
            let spec = PacketSpec { envelope: envelope(e)?, displacement, coefficients };
            Ok(BuiltState::Packet(eventloc::make_packet(grid, &spec)?))
        }
        StateConfig::Family { envelope: e, channels } => {
            let table = ChannelTable::new(
                channels
                    .iter()
                    .map(|ch| Ok(Channel::new(ch.sigma, half(ch.j, "channel j")?, half(ch.m, "channel m")?)?))
                    .collect::<Result<Vec<_>, CliError>>()?,
            )?;
            let coeffs = channels.iter().map(|ch| mu_function(&ch.coefficient)).collect::<Result<Vec<_>, _>>()?;
            let fam = ScaledFamily::new(envelope(e)?, table, coeffs, grid)?;
            let psi = fam.realize(1.0)?;
            Ok(BuiltState::Family(fam, psi))
        }
    }
}

pub fn build_kernel(c: &KernelConfig) -> Result<Kernel<f64>, CliError> {
    let translation = |k: TranslationKernel<f64>, s: f64| Kernel::Translation(if s == 1.0 { k } else { k.scaled(s) });
    Ok(match c {
        KernelConfig::Flat { channels, scale } => translation(TranslationKernel::flat(*channels), *scale),
        KernelConfig::Rotation { rate, power, scale } => translation(TranslationKernel::rotation(*rate, *power), *scale),
        KernelConfig::Phase { coeff, power, scale } => translation(TranslationKernel::phase(*coeff, *power), *scale),
        KernelConfig::QuadraticPhase { coeff, scale } => translation(TranslationKernel::phase(*coeff, 2.0), *scale),
        KernelConfig::Matrix { rows, cols, entries, scale } => {
            let f = entries.iter().map(mu_function).collect::<Result<Vec<_>, _>>()?;
            translation(TranslationKernel::new(*rows, *cols, f)?, *scale)
        }
        KernelConfig::Quasi { columns, truncation, sectors } => {
            let sectors = sectors
                .iter()
                .map(|s| {
                    let rows = s
                        .rows
                        .iter()
                        .map(|r| Ok((r.omega, r.row.iter().map(mu_function).collect::<Result<Vec<_>, CliError>>()?)))
                        .collect::<Result<Vec<_>, CliError>>()?;
                    Ok((half(s.j, "sector j")?, rows))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            Kernel::Poincare(PoincareKernel::quasi(*columns, sectors, half(*truncation, "truncation")?)?)
        }
        KernelConfig::Poincare { columns, truncation, entries } => {
            let entries = entries
                .iter()
                .map(|e| {
                    let irrep = IrrepLabel::new(half(e.m, "entry m")?, C::new(e.c_re, e.c_im))?;
                    Ok(PoincareEntry {
                        gamma: GammaLabel { nu: e.nu, irrep },
                        omega: e.omega,
                        j: half(e.j, "entry j")?,
                        row: e.row.iter().map(mu_function).collect::<Result<Vec<_>, CliError>>()?,
                    })
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            Kernel::Poincare(PoincareKernel::new(*columns, entries, half(*truncation, "truncation")?)?)
        }
    })
}

/// Certification masses: the configured samples, else 65 points across the grid's mass range.
pub fn certification_masses(c: &ScenarioConfig, grid: &MomentumGrid<f64>) -> Vec<f64> {
    mass_samples(c, grid, None)
}

/// Masses for `T(μ)`: the certification range at `time_delay_samples` points.
pub fn time_delay_masses(c: &ScenarioConfig, grid: &MomentumGrid<f64>) -> Vec<f64> {
    mass_samples(c, grid, Some(c.time_delay_samples))
}

fn mass_samples(c: &ScenarioConfig, grid: &MomentumGrid<f64>, count: Option<usize>) -> Vec<f64> {
    let (lo, hi, n) = match &c.mu_samples {
        Some(m) => (m.min, m.max, m.count),
        None => {
            let m = grid.masses().iter().copied().filter(|m| *m > 0.0);
            let (lo, hi) = m.fold((f64::INFINITY, 0.0_f64), |(a, b), v| (a.min(v), b.max(v)));
            (lo, hi, 65)
        }
    };
    let n = count.unwrap_or(n);
    if !(hi > lo) {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}
