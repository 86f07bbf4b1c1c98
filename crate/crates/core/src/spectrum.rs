//! Frequency chirps along cascades, total excursion, the trapped-ion sweep and
//! the external-field coupling model.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::basis::CompoundSpec;
use crate::coupling::{self, PhysicalScenario, UnitSystem};
use crate::dressed::{DressedSystem, StateId};
use crate::error::{domain, Error, Result};
use crate::hamiltonian::lowering_element;
use crate::rates::{self, BranchName, CascadeChain};
use crate::C64;

/// Quoted shift scale of the two-ion proposal, for comparison only [Hz].
pub const QUOTED_SHIFT_HZ: f64 = 150e3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChirpStep {
    pub step: usize,
    pub from: StateId,
    pub to: StateId,
    /// Photon frequency minus ω, in units of β.
    pub offset: f64,
    /// Absolute photon angular frequency, when a scenario is attached.
    pub omega: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChirpSchedule {
    pub branch: BranchName,
    pub steps: Vec<ChirpStep>,
}

impl ChirpSchedule {
    pub fn offsets(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.offset).collect()
    }

    /// Fill absolute frequencies ω + offset·β.
    pub fn with_carrier(mut self, omega: f64, beta: f64) -> Self {
        for s in &mut self.steps {
            s.omega = Some(omega + s.offset * beta);
        }
        self
    }
}

/// Photon offsets (E_from − E_to)/ħ of each step of a chain.
pub fn chirp_schedule(chain: &CascadeChain, system: &DressedSystem) -> ChirpSchedule {
    let steps = chain
        .states
        .windows(2)
        .enumerate()
        .map(|(step, w)| ChirpStep {
            step,
            from: w[0],
            to: w[1],
            offset: system.state(w[0]).shift - system.state(w[1]).shift,
            omega: None,
        })
        .collect();
    ChirpSchedule {
        branch: chain.name,
        steps,
    }
}

/// Total chirp span 2(N − 1)β of N uniformly coupled two-atom samples.
pub fn excursion(n_samples: usize, beta: f64) -> f64 {
    2.0 * n_samples.saturating_sub(1) as f64 * beta
}

/// Excursion (units of β) of N uniformly coupled two-atom samples from full
/// diagonalization: last-photon offset minus first-photon offset along the
/// highest-rate cascade.
pub fn excursion_bruteforce(n_samples: usize) -> Result<f64> {
    if n_samples == 0 {
        return domain("at least one sample is needed");
    }
    if n_samples == 1 {
        return Ok(0.0);
    }
    let spec = CompoundSpec::uniform(n_samples, 2)?;
    // Any far-field point with β > 0 gives the same structure.
    let system = DressedSystem::solve(&spec, &PhysicalScenario::reduced(1.0, 2.0 * PI))?;
    let table = rates::transition_rates(&system);
    let chain = best_chain(&table, &system)?;
    let offsets = chirp_schedule(&chain, &system).offsets();
    match (offsets.first(), offsets.last()) {
        (Some(first), Some(last)) => Ok(last - first),
        _ => Err(Error::Contract("empty cascade".into())),
    }
}

/// (log rate product, predecessor) of the best path into a state.
type Best = (f64, Option<StateId>);

/// Highest rate-product path from the fully excited state to the ground
/// state, by dynamic programming over the sector-ordered transitions.
fn best_chain(table: &rates::TransitionTable, system: &DressedSystem) -> Result<CascadeChain> {
    let sectors = &system.sectors;
    let mut best: Vec<Vec<Option<Best>>> =
        sectors.iter().map(|s| vec![None; s.states.len()]).collect();
    best[0][0] = Some((0.0, None));
    for t in table.allowed() {
        // Entries are grouped by upper sector in ascending order.
        if let Some((score, _)) = best[t.from.sector][t.from.index] {
            let cand = score + t.rate.ln();
            let slot = &mut best[t.to.sector][t.to.index];
            if slot.is_none_or(|(s, _)| cand > s) {
                *slot = Some((cand, Some(t.from)));
            }
        }
    }
    let last_sector = sectors.len() - 1;
    let end = (0..sectors[last_sector].states.len())
        .filter_map(|i| best[last_sector][i].map(|(s, _)| (s, StateId::new(last_sector, i))))
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, id)| id)
        .ok_or_else(|| Error::Contract("no cascade reaches the ground state".into()))?;

    let mut states = vec![end];
    while let Some((_, Some(prev))) =
        best[states.last().unwrap().sector][states.last().unwrap().index]
    {
        states.push(prev);
    }
    states.reverse();
    let rates = states.windows(2).map(|w| table.rate(w[0], w[1])).collect();
    Ok(CascadeChain {
        name: BranchName::Main,
        states,
        rates,
    })
}

/// One row of the trapped-ion frequency sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub kr: f64,
    /// β [rad/s].
    pub beta_rad_s: f64,
    /// 2(N − 1)β [rad/s].
    pub excursion_rad_s: f64,
    /// Excursion divided by 2π [Hz].
    pub excursion_hz: f64,
    /// Excursion in units of Γ₀ × 10⁻³.
    pub fig7_units: f64,
}

/// β and the excursion over `steps` evenly spaced kr values in
/// [kr_min, kr_max].
pub fn ba_scenario_sweep(
    scenario: &PhysicalScenario,
    n_samples: usize,
    kr_min: f64,
    kr_max: f64,
    steps: usize,
) -> Result<Vec<SweepRow>> {
    if !(kr_min > 0.0 && kr_max >= kr_min) {
        return domain(format!(
            "need 0 < kr_min <= kr_max, got [{kr_min}, {kr_max}]"
        ));
    }
    if steps == 0 || (steps == 1 && kr_max > kr_min) {
        return domain(format!("need at least two sweep points, got {steps}"));
    }
    if n_samples == 0 {
        return domain("at least one sample is needed");
    }
    let linewidth = scenario.linewidth()?;
    (0..steps)
        .map(|i| {
            let kr = if steps == 1 {
                kr_min
            } else {
                kr_min + (kr_max - kr_min) * i as f64 / (steps - 1) as f64
            };
            let beta = coupling::beta(&scenario.with_kr(kr))?.value;
            let exc = excursion(n_samples, beta);
            Ok(SweepRow {
                kr,
                beta_rad_s: beta,
                excursion_rad_s: exc,
                excursion_hz: exc / (2.0 * PI),
                fig7_units: exc / (linewidth * 1e-3),
            })
        })
        .collect()
}

/// One M-atom sample coupled to an external field of a neighbouring sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldModelSpec {
    /// λ, 0 < λ ≤ 1.
    pub coupling_efficiency: f64,
    /// One-photon field ℰ₀.
    pub field: f64,
    pub dipole: f64,
    pub atoms: u32,
    /// Number of interacting samples N for the shift estimate.
    pub samples: usize,
    /// Propagation phase kr of the external field.
    pub phase: f64,
    pub units: UnitSystem,
}

impl FieldModelSpec {
    fn validate(&self) -> Result<()> {
        let l = self.coupling_efficiency;
        if !(l > 0.0 && l <= 1.0) {
            return domain(format!("coupling efficiency must be in (0, 1], got {l}"));
        }
        if self.atoms == 0 || self.samples == 0 {
            return domain("atom and sample counts must be at least one");
        }
        if !(self.field >= 0.0 && self.dipole >= 0.0) {
            return domain("field and dipole must be non-negative");
        }
        Ok(())
    }

    /// Energy scale λ d ℰ₀.
    pub fn scale(&self) -> f64 {
        self.coupling_efficiency * self.dipole * self.field
    }
}

/// Eigen-shifts of one conserved-quanta sector of the field model.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSector {
    /// Field photons plus photons emitted by the sample.
    pub quanta: u32,
    /// (field photons, excited atoms) of each ket.
    pub kets: Vec<(u32, u32)>,
    /// Energy shifts, descending, in the energy unit of `dipole · field`.
    pub shifts: Vec<f64>,
}

/// Diagonalizes V = −iλℰ₀(D₋ a e^{ikr} − D₊ a† e^{−ikr}) on the product of the
/// sample ladder and a field truncated at `atoms` photons.
pub fn field_model_eigensystem(fm: &FieldModelSpec) -> Result<Vec<FieldSector>> {
    fm.validate()?;
    let m = fm.atoms;
    let n_max = m;
    let mut sectors = Vec::new();
    for q in 0..=(n_max + m) {
        // Kets ordered by field photons descending.
        let kets: Vec<(u32, u32)> = (0..=n_max)
            .rev()
            .filter_map(|n| {
                let emitted = q.checked_sub(n)?;
                (emitted <= m).then(|| (n, m - emitted))
            })
            .collect();
        let dim = kets.len();
        let mut v = DMatrix::<C64>::zeros(dim, dim);
        let phase = C64::from_polar(1.0, fm.phase);
        for (col, &(n, ne)) in kets.iter().enumerate() {
            // D₋ a: absorb a field photon, sample emits.
            if n > 0 && ne > 0 {
                if let Some(row) = kets.iter().position(|&k| k == (n - 1, ne - 1)) {
                    let el = lowering_element(m, ne) * f64::from(n).sqrt();
                    v[(row, col)] += C64::new(0.0, -1.0) * phase * el;
                }
            }
            // D₊ a†
            if n < n_max && ne < m {
                if let Some(row) = kets.iter().position(|&k| k == (n + 1, ne + 1)) {
                    let el = lowering_element(m, ne + 1) * f64::from(n + 1).sqrt();
                    v[(row, col)] += C64::new(0.0, 1.0) * phase.conj() * el;
                }
            }
        }
        let eig = v.symmetric_eigen();
        let mut shifts: Vec<f64> = eig.eigenvalues.iter().map(|e| e * fm.scale()).collect();
        shifts.sort_by(|a, b| b.total_cmp(a));
        sectors.push(FieldSector {
            quanta: q,
            kets,
            shifts,
        });
    }
    Ok(sectors)
}

/// ħδω ≈ 2λ(N − 1)√M dℰ₀, returned as the angular frequency δω.
pub fn field_shift_estimate(fm: &FieldModelSpec) -> Result<f64> {
    fm.validate()?;
    Ok(2.0 * (fm.samples - 1) as f64 * f64::from(fm.atoms).sqrt() * fm.scale() / fm.units.hbar())
}

#[cfg(test)]
mod tests {
    use super::*;

    const S2: f64 = std::f64::consts::SQRT_2;

    fn field(atoms: u32, samples: usize, lambda: f64) -> FieldModelSpec {
        FieldModelSpec {
            coupling_efficiency: lambda,
            field: 1.0,
            dipole: 1.0,
            atoms,
            samples,
            phase: 0.7,
            units: UnitSystem::Reduced,
        }
    }

    #[test]
    fn excursion_formula() {
        assert_eq!(excursion(2, 1.5), 3.0);
        assert_eq!(excursion(1, 1.5), 0.0);
        assert_eq!(excursion(5, 1.0), 8.0);
    }

    #[test]
    fn bruteforce_trivial_cases() {
        assert_eq!(excursion_bruteforce(1).unwrap(), 0.0);
        assert!(excursion_bruteforce(0).is_err());
        assert!(matches!(
            excursion_bruteforce(7),
            Err(Error::SizeCap { .. })
        ));
    }

    #[test]
    fn field_model_sectors() {
        let fm = field(2, 2, 0.5);
        let sectors = field_model_eigensystem(&fm).unwrap();
        assert_eq!(sectors.len(), 5);
        assert_eq!(sectors.iter().map(|s| s.kets.len()).sum::<usize>(), 9);
        assert_eq!(sectors[0].shifts, [0.0]);
        let one = &sectors[1].shifts;
        assert_eq!(sectors[1].kets, [(1, 2), (0, 1)]);
        assert!((one[0] - 0.5 * S2).abs() < 1e-14 && (one[1] + 0.5 * S2).abs() < 1e-14);
        let two = &sectors[2].shifts;
        let r6 = 0.5 * 6f64.sqrt();
        assert!((two[0] - r6).abs() < 1e-14);
        assert!(two[1].abs() < 1e-14);
        assert!((two[2] + r6).abs() < 1e-14);
    }

    #[test]
    fn shift_estimate() {
        let est = field_shift_estimate(&field(2, 2, 1.0)).unwrap();
        assert!((est - 2.0 * S2).abs() < 1e-14);
        assert_eq!(field_shift_estimate(&field(2, 1, 1.0)).unwrap(), 0.0);
        let four = field_shift_estimate(&field(4, 3, 0.5)).unwrap();
        let one = field_shift_estimate(&field(1, 3, 0.5)).unwrap();
        assert!((four / one - 2.0).abs() < 1e-14);
    }

    #[test]
    fn sweep_validation() {
        let sc = PhysicalScenario::ba138();
        assert!(ba_scenario_sweep(&sc, 2, 0.0, 10.0, 5).is_err());
        assert!(ba_scenario_sweep(&sc, 2, 20.0, 10.0, 5).is_err());
        assert!(ba_scenario_sweep(&sc, 2, 10.0, 20.0, 1).is_err());
        assert_eq!(ba_scenario_sweep(&sc, 2, 10.0, 20.0, 11).unwrap().len(), 11);
    }
}
