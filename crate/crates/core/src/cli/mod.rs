//! Scenario configuration and the subcommands behind the `compound-sr` binary.
//!
//! Every subcommand renders to a `String` so output can be compared byte for
//! byte; the binary only writes it out.

mod commands;

use serde::Deserialize;

use crate::basis::{CompoundSpec, CouplingMode, SampleSpec, DEFAULT_MAX_ATOMS};
use crate::coupling::{
    Emitter, LinewidthConvention, PhysicalScenario, UnitSystem, SPEED_OF_LIGHT_SI,
};
use crate::dynamics::{TraceMode, DEFAULT_DT_OUT, DEFAULT_T_MAX};
use crate::error::{Error, Result};

pub use commands::{cmd_chirp, cmd_dressed, cmd_intensity, cmd_rates, cmd_sweep};

pub const DEFAULT_WAVELENGTH_NM: f64 = 493.0;
pub const DEFAULT_LINEWIDTH_PER_S: f64 = 1e8;
pub const DEFAULT_KR: f64 = 25.0;
pub const DEFAULT_KR_MIN: f64 = 10.0;
pub const DEFAULT_KR_MAX: f64 = 100.0;
pub const DEFAULT_KR_STEPS: usize = 1801;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    /// Two two-atom samples at kr = 25 on the 493 nm Ba⁺ line.
    PaperDefault,
    /// The trapped-ion proposal, swept over kr in [10, 100].
    Ba138,
}

impl Preset {
    pub fn config(self) -> ScenarioConfig {
        let mut c = ScenarioConfig::default();
        if self == Preset::Ba138 {
            c.run.kr_min = Some(DEFAULT_KR_MIN);
            c.run.kr_max = Some(DEFAULT_KR_MAX);
            c.run.kr_steps = Some(DEFAULT_KR_STEPS);
        }
        c
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::PaperDefault => "paper-default",
            Preset::Ba138 => "ba138",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CouplingKind {
    #[default]
    Geometry,
    Uniform,
}

/// Rate unit used for the intensity traces.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum RateNormalization {
    /// Rates in units of the single-atom Γ.
    #[default]
    Gamma,
    /// Rates relative to a two-atom sample (half the Γ values).
    TwoAtom,
}

impl RateNormalization {
    pub fn factor(self) -> f64 {
        match self {
            RateNormalization::Gamma => 1.0,
            RateNormalization::TwoAtom => 0.5,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub samples: Option<Vec<SampleConfig>>,
    pub coupling: Option<CouplingKind>,
    pub max_atoms: Option<u32>,
    #[serde(default)]
    pub physical: PhysicalConfig,
    #[serde(default)]
    pub run: RunConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleConfig {
    pub atoms: u32,
    /// Position phase k·z [rad].
    pub phase: Option<f64>,
    /// Position z [m].
    pub position: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalConfig {
    pub wavelength_nm: Option<f64>,
    pub omega_rad_s: Option<f64>,
    pub linewidth_per_s: Option<f64>,
    #[serde(rename = "dipole_Cm")]
    pub dipole_cm: Option<f64>,
    pub linewidth_convention: Option<LinewidthConvention>,
    pub lambda_coupling: Option<f64>,
    pub kr: Option<f64>,
    pub separation_m: Option<f64>,
    pub volume_m3: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub t_max_tausp: Option<f64>,
    pub dt_out_tausp: Option<f64>,
    pub mode: Option<TraceMode>,
    pub rate_normalization: Option<RateNormalization>,
    pub kr_min: Option<f64>,
    pub kr_max: Option<f64>,
    pub kr_steps: Option<usize>,
    pub n_samples: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub format: Option<Format>,
    pub path: Option<String>,
}

/// Fully defaulted and validated run description.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub spec: CompoundSpec,
    pub scenario: PhysicalScenario,
    pub t_max: f64,
    pub dt_out: f64,
    pub mode: TraceMode,
    pub rate_normalization: RateNormalization,
    pub kr_min: f64,
    pub kr_max: f64,
    pub kr_steps: usize,
    pub n_samples: usize,
    pub format: Format,
    pub path: Option<String>,
}

fn config_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

fn one_of<T: Copy>(a: Option<T>, b: Option<T>, names: &str) -> Result<Option<(bool, T)>> {
    match (a, b) {
        (Some(_), Some(_)) => config_err(format!("give only one of {names}")),
        (Some(x), None) => Ok(Some((true, x))),
        (None, Some(y)) => Ok(Some((false, y))),
        (None, None) => Ok(None),
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        config_err(format!("{name} must be positive and finite, got {v}"))
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn resolve(&self) -> Result<Resolved> {
        let p = &self.physical;
        let (k, omega) = match one_of(
            p.wavelength_nm,
            p.omega_rad_s,
            "wavelength_nm | omega_rad_s",
        )? {
            Some((false, w)) => {
                let w = positive("omega_rad_s", w)?;
                (w / SPEED_OF_LIGHT_SI, w)
            }
            other => {
                let nm = positive(
                    "wavelength_nm",
                    other.map_or(DEFAULT_WAVELENGTH_NM, |x| x.1),
                )?;
                let k = 2.0 * std::f64::consts::PI / (nm * 1e-9);
                (k, SPEED_OF_LIGHT_SI * k)
            }
        };
        let emitter = match one_of(
            p.linewidth_per_s,
            p.dipole_cm,
            "linewidth_per_s | dipole_Cm",
        )? {
            Some((false, d)) => Emitter::Dipole(positive("dipole_Cm", d)?),
            other => Emitter::Linewidth(positive(
                "linewidth_per_s",
                other.map_or(DEFAULT_LINEWIDTH_PER_S, |x| x.1),
            )?),
        };
        let kr = match one_of(p.kr, p.separation_m, "kr | separation_m")? {
            Some((true, kr)) => positive("kr", kr)?,
            Some((false, r)) => positive("separation_m", r)? * k,
            None => DEFAULT_KR,
        };
        let scenario = PhysicalScenario {
            wavenumber: k,
            separation: kr / k,
            omega,
            emitter,
            linewidth_convention: p.linewidth_convention.unwrap_or_default(),
            coupling_efficiency: p.lambda_coupling.unwrap_or(1.0),
            volume: p.volume_m3,
            units: UnitSystem::Si,
        };
        scenario
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;

        let mode = match self.coupling.unwrap_or_default() {
            CouplingKind::Geometry => CouplingMode::FromGeometry,
            CouplingKind::Uniform => CouplingMode::Uniform,
        };
        let samples = match &self.samples {
            None => vec![SampleSpec::new(2, -kr / 2.0), SampleSpec::new(2, kr / 2.0)],
            Some(list) => {
                if list.is_empty() {
                    return config_err("samples must not be empty");
                }
                list.iter()
                    .enumerate()
                    .map(|(i, s)| {
                        let phase = match one_of(s.phase, s.position, "phase | position")? {
                            Some((true, phi)) => phi,
                            Some((false, z)) => z * k,
                            None => {
                                return config_err(format!("samples[{i}] needs phase or position"))
                            }
                        };
                        if s.atoms == 0 {
                            return config_err(format!("samples[{i}].atoms must be at least 1"));
                        }
                        Ok(SampleSpec::new(s.atoms, phase))
                    })
                    .collect::<Result<Vec<_>>>()?
            }
        };
        let spec =
            CompoundSpec::with_cap(samples, mode, self.max_atoms.unwrap_or(DEFAULT_MAX_ATOMS))
                .map_err(|e| match e {
                    Error::Domain(m) => Error::Config(m),
                    other => other,
                })?;

        let r = &self.run;
        let kr_min = positive("kr_min", r.kr_min.unwrap_or(DEFAULT_KR_MIN))?;
        let kr_max = positive("kr_max", r.kr_max.unwrap_or(DEFAULT_KR_MAX))?;
        if kr_max < kr_min {
            return config_err(format!("kr_max ({kr_max}) is below kr_min ({kr_min})"));
        }
        let kr_steps = r.kr_steps.unwrap_or(DEFAULT_KR_STEPS);
        if kr_steps < 2 {
            return config_err("kr_steps must be at least 2");
        }
        let n_samples = r.n_samples.unwrap_or(2);
        if n_samples == 0 {
            return config_err("n_samples must be at least 1");
        }
        Ok(Resolved {
            spec,
            scenario,
            t_max: positive("t_max_tausp", r.t_max_tausp.unwrap_or(DEFAULT_T_MAX))?,
            dt_out: positive("dt_out_tausp", r.dt_out_tausp.unwrap_or(DEFAULT_DT_OUT))?,
            mode: r.mode.unwrap_or_default(),
            rate_normalization: r.rate_normalization.unwrap_or_default(),
            kr_min,
            kr_max,
            kr_steps,
            n_samples,
            format: self.output.format.unwrap_or_default(),
            path: self.output.path.clone(),
        })
    }
}

/// Shortest round-trip rendering with negative zero folded to zero.
pub(crate) fn num(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else {
        format!("{x:?}")
    }
}
