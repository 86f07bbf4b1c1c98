//! Unit system, far-field coupling constants and dipole/field magnitudes.
//!
//! Two unit systems are supported. [`UnitSystem::Si`] uses CODATA 2018
//! constants. [`UnitSystem::Reduced`] sets ħ = 4πε₀ = c = 1; a scenario built
//! with [`PhysicalScenario::reduced`] additionally fixes d = 1, so that
//! α = k² cos(kr)/r and Γ₀ = (4/3)k³.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// CODATA 2018 reduced Planck constant [J s].
pub const HBAR_SI: f64 = 1.054_571_817e-34;
/// CODATA 2018 vacuum permittivity [F/m].
pub const EPSILON0_SI: f64 = 8.854_187_812_8e-12;
/// Speed of light [m/s].
pub const SPEED_OF_LIGHT_SI: f64 = 299_792_458.0;

/// Below this kr the far-field form of α(r) is flagged as unreliable.
pub const FAR_FIELD_KR: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitSystem {
    /// ħ = 4πε₀ = c = 1.
    Reduced,
    Si,
}

impl UnitSystem {
    pub fn hbar(self) -> f64 {
        match self {
            UnitSystem::Reduced => 1.0,
            UnitSystem::Si => HBAR_SI,
        }
    }

    pub fn epsilon0(self) -> f64 {
        match self {
            UnitSystem::Reduced => 1.0 / (4.0 * PI),
            UnitSystem::Si => EPSILON0_SI,
        }
    }

    pub fn speed_of_light(self) -> f64 {
        match self {
            UnitSystem::Reduced => 1.0,
            UnitSystem::Si => SPEED_OF_LIGHT_SI,
        }
    }
}

/// How the single-atom emitter strength is specified.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Emitter {
    /// Natural linewidth Γ₀; the dipole is derived from it.
    Linewidth(f64),
    /// Transition dipole d; the linewidth is derived from it.
    Dipole(f64),
}

/// Reading of a linewidth given as a bare number.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinewidthConvention {
    /// The value is Γ₀ = 1/τ_sp in rad/s.
    #[default]
    Angular,
    /// The value is a frequency in Hz; Γ₀ = 2π × value.
    Cyclic,
}

/// Physical constants and knobs of one compound-sample scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalScenario {
    /// Wavenumber k of the shared radiation mode.
    pub wavenumber: f64,
    /// Sample separation r.
    pub separation: f64,
    /// Transition angular frequency ω.
    pub omega: f64,
    pub emitter: Emitter,
    pub linewidth_convention: LinewidthConvention,
    /// Coupling efficiency λ of the external-field model, 0 < λ ≤ 1.
    pub coupling_efficiency: f64,
    /// Quantization volume, only needed by the external-field model.
    pub volume: Option<f64>,
    pub units: UnitSystem,
}

impl PhysicalScenario {
    /// Reduced-unit scenario with d = 1 and ω = k.
    pub fn reduced(wavenumber: f64, separation: f64) -> Self {
        PhysicalScenario {
            wavenumber,
            separation,
            omega: wavenumber,
            emitter: Emitter::Dipole(1.0),
            linewidth_convention: LinewidthConvention::Angular,
            coupling_efficiency: 1.0,
            volume: None,
            units: UnitSystem::Reduced,
        }
    }

    /// SI scenario for a transition of vacuum wavelength `wavelength` [m]
    /// and linewidth `linewidth` [1/s], with the samples placed at `kr`.
    pub fn from_wavelength(wavelength: f64, linewidth: f64, kr: f64) -> Self {
        let k = 2.0 * PI / wavelength;
        PhysicalScenario {
            wavenumber: k,
            separation: kr / k,
            omega: SPEED_OF_LIGHT_SI * k,
            emitter: Emitter::Linewidth(linewidth),
            linewidth_convention: LinewidthConvention::Angular,
            coupling_efficiency: 1.0,
            volume: None,
            units: UnitSystem::Si,
        }
    }

    /// The 493 nm line of ¹³⁸Ba⁺ with Γ₀ = 10⁸ s⁻¹ at kr = 25.
    pub fn ba138() -> Self {
        Self::from_wavelength(493e-9, 1e8, 25.0)
    }

    pub fn kr(&self) -> f64 {
        self.wavenumber * self.separation
    }

    /// Same scenario with the separation moved to the given kr.
    pub fn with_kr(&self, kr: f64) -> Self {
        PhysicalScenario {
            separation: kr / self.wavenumber,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("wavenumber", self.wavenumber),
            ("separation", self.separation),
            ("omega", self.omega),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return domain(format!("{name} must be positive and finite, got {v}"));
            }
        }
        match self.emitter {
            Emitter::Linewidth(g) if !(g > 0.0 && g.is_finite()) => {
                return domain(format!("linewidth must be positive, got {g}"))
            }
            Emitter::Dipole(d) if !(d > 0.0 && d.is_finite()) => {
                return domain(format!("dipole must be positive, got {d}"))
            }
            _ => {}
        }
        let lambda = self.coupling_efficiency;
        if !(lambda > 0.0 && lambda <= 1.0) {
            return domain(format!(
                "coupling efficiency must be in (0, 1], got {lambda}"
            ));
        }
        if let Some(v) = self.volume {
            if !(v > 0.0 && v.is_finite()) {
                return domain(format!("quantization volume must be positive, got {v}"));
            }
        }
        Ok(())
    }

    /// Angular linewidth Γ₀, derived from the dipole when not given.
    pub fn linewidth(&self) -> Result<f64> {
        match self.emitter {
            Emitter::Linewidth(g) => match self.linewidth_convention {
                LinewidthConvention::Angular => Ok(g),
                LinewidthConvention::Cyclic => Ok(2.0 * PI * g),
            },
            Emitter::Dipole(d) => linewidth_from_dipole(self.units, d, self.omega),
        }
    }

    /// Single-atom transition dipole d, derived from Γ₀ when not given.
    pub fn dipole(&self) -> Result<f64> {
        match self.emitter {
            Emitter::Dipole(d) => Ok(d),
            Emitter::Linewidth(_) => {
                dipole_from_linewidth(self.units, self.linewidth()?, self.omega)
            }
        }
    }

    pub fn scales(&self) -> Result<NaturalScales> {
        Ok(NaturalScales {
            linewidth: self.linewidth()?,
            omega: self.omega,
            hbar: self.units.hbar(),
        })
    }
}

/// A coupling value together with the far-field validity flag.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coupling {
    pub value: f64,
    /// Set when kr < [`FAR_FIELD_KR`]; the value is still computed.
    pub far_field_warning: bool,
}

/// Radiative dipole-dipole coupling α(r) = k² cos(kr) / (4πε₀ r).
pub fn alpha(scenario: &PhysicalScenario) -> Result<Coupling> {
    alpha_at(scenario.units, scenario.wavenumber, scenario.separation)
}

pub fn alpha_at(units: UnitSystem, k: f64, r: f64) -> Result<Coupling> {
    if r.is_nan() || r <= 0.0 {
        return domain(format!("separation must be positive, got {r}"));
    }
    if k.is_nan() || k <= 0.0 {
        return domain(format!("wavenumber must be positive, got {k}"));
    }
    let kr = k * r;
    Ok(Coupling {
        value: k * k * kr.cos() / (4.0 * PI * units.epsilon0() * r),
        far_field_warning: kr < FAR_FIELD_KR,
    })
}

/// Dressed-level splitting β(r) = (2d²) α(r) / 2ħ of two two-atom samples, in
/// angular-frequency units of the scenario.
pub fn beta(scenario: &PhysicalScenario) -> Result<Coupling> {
    scenario.validate()?;
    beta_at(scenario, scenario.separation)
}

/// β at an arbitrary separation `r` with the constants of `scenario`.
pub fn beta_at(scenario: &PhysicalScenario, r: f64) -> Result<Coupling> {
    let a = alpha_at(scenario.units, scenario.wavenumber, r)?;
    let d = scenario.dipole()?;
    Ok(Coupling {
        value: d * d * a.value / scenario.units.hbar(),
        ..a
    })
}

/// Free-space relation d² = 3πε₀ħc³Γ₀/ω³.
pub fn dipole_from_linewidth(units: UnitSystem, linewidth: f64, omega: f64) -> Result<f64> {
    if !(linewidth > 0.0 && omega > 0.0) {
        return domain(format!(
            "linewidth and omega must be positive, got {linewidth} and {omega}"
        ));
    }
    let c = units.speed_of_light();
    let d2 = 3.0 * PI * units.epsilon0() * units.hbar() * c.powi(3) * linewidth / omega.powi(3);
    Ok(d2.sqrt())
}

/// Inverse of [`dipole_from_linewidth`].
pub fn linewidth_from_dipole(units: UnitSystem, dipole: f64, omega: f64) -> Result<f64> {
    if !(dipole > 0.0 && omega > 0.0) {
        return domain(format!(
            "dipole and omega must be positive, got {dipole} and {omega}"
        ));
    }
    let c = units.speed_of_light();
    Ok(dipole * dipole * omega.powi(3) / (3.0 * PI * units.epsilon0() * units.hbar() * c.powi(3)))
}

/// One-photon field amplitude ℰ₀ = √(ħω / 2ε₀𝒱).
pub fn one_photon_field(units: UnitSystem, omega: f64, volume: f64) -> Result<f64> {
    if !(omega > 0.0 && volume > 0.0) {
        return domain(format!(
            "omega and volume must be positive, got {omega} and {volume}"
        ));
    }
    Ok((units.hbar() * omega / (2.0 * units.epsilon0() * volume)).sqrt())
}

/// Natural units of a scenario: rates in Γ₀, time in τ_sp = 1/Γ₀, energy in
/// ħΓ₀ and intensity in I₀ = ħωΓ₀.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NaturalScales {
    pub linewidth: f64,
    pub omega: f64,
    pub hbar: f64,
}

impl NaturalScales {
    pub fn rate_to_physical(&self, x: f64) -> f64 {
        x * self.linewidth
    }

    pub fn rate_from_physical(&self, rate: f64) -> f64 {
        rate / self.linewidth
    }

    pub fn time_to_physical(&self, t: f64) -> f64 {
        t / self.linewidth
    }

    pub fn time_from_physical(&self, t: f64) -> f64 {
        t * self.linewidth
    }

    pub fn energy_to_physical(&self, e: f64) -> f64 {
        e * self.hbar * self.linewidth
    }

    pub fn energy_from_physical(&self, e: f64) -> f64 {
        e / (self.hbar * self.linewidth)
    }

    pub fn intensity_unit(&self) -> f64 {
        self.hbar * self.omega * self.linewidth
    }

    pub fn intensity_to_physical(&self, i: f64) -> f64 {
        i * self.intensity_unit()
    }

    pub fn intensity_from_physical(&self, i: f64) -> f64 {
        i / self.intensity_unit()
    }
}
