//! Transverse dipole, dressed-state transition rates and cascade branches.
//!
//! Rates are |⟨f|D₋|i⟩|²/d² in units of the single-atom rate Γ, so a lone
//! excited two-level atom decays at 1 and a two-atom sample at 2 per step.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::basis::{CompoundSpec, SectorBasis};
use crate::coupling::PhysicalScenario;
use crate::dressed::{DressedSystem, StateId, Symmetry};
use crate::error::{Error, Result};
use crate::hamiltonian::lowering_element;
use crate::C64;

/// Rates below this (units of Γ) are forbidden.
pub const FORBIDDEN_RATE: f64 = 1e-12;

/// Rate of each step of a two-atom Dicke ladder, used for the
/// "relative to a two-atom sample" normalization.
pub const TWO_ATOM_RATE: f64 = 2.0;

/// Upper bound on enumerated cascade paths.
pub const MAX_BRANCHES: usize = 100_000;

/// D₋ = Σ_j D_{j−} e^{−iφ_j} from sector `p` to sector `p + 1`, in units of d.
/// Rows index sector `p + 1`, columns sector `p`. Empty rows at the top sector.
pub fn transverse_dipole(spec: &CompoundSpec, p: usize) -> DMatrix<C64> {
    let upper = SectorBasis::new(spec, p);
    let lower = SectorBasis::new(spec, p + 1);
    let atoms = spec.atom_counts();
    let phases = spec.effective_phases();
    let mut d = DMatrix::<C64>::zeros(lower.len(), upper.len());
    for (col, ket) in upper.kets.iter().enumerate() {
        for (j, (&m, &phi)) in atoms.iter().zip(&phases).enumerate() {
            let ne = ket.excited()[j];
            let el = lowering_element(m, ne);
            if el == 0.0 {
                continue;
            }
            let row = lower
                .position(&ket.with_lowered(j))
                .expect("lowering adds one photon");
            d[(row, col)] += C64::from_polar(el, -phi);
        }
    }
    d
}

/// Dicke ladder rates of a single `atoms`-atom sample, top to bottom.
pub fn dicke_rates(atoms: u32) -> Vec<f64> {
    (1..=atoms)
        .rev()
        .map(|ne| lowering_element(atoms, ne).powi(2))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Transition {
    pub from: StateId,
    pub to: StateId,
    /// γ in units of Γ.
    pub rate: f64,
    /// (E_from − E_to)/ħ in units of β_ref.
    pub offset: f64,
}

impl Transition {
    pub fn allowed(&self) -> bool {
        self.rate >= FORBIDDEN_RATE
    }

    pub fn rate_over_two_atom(&self) -> f64 {
        self.rate / TWO_ATOM_RATE
    }
}

/// Every dressed-state pair between adjacent sectors, allowed or not.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionTable {
    pub entries: Vec<Transition>,
}

impl TransitionTable {
    pub fn allowed(&self) -> impl Iterator<Item = &Transition> {
        self.entries.iter().filter(|t| t.allowed())
    }

    pub fn forbidden(&self) -> impl Iterator<Item = &Transition> {
        self.entries.iter().filter(|t| !t.allowed())
    }

    pub fn get(&self, from: StateId, to: StateId) -> Option<&Transition> {
        self.entries.iter().find(|t| t.from == from && t.to == to)
    }

    pub fn rate(&self, from: StateId, to: StateId) -> f64 {
        self.get(from, to).map_or(0.0, |t| t.rate)
    }

    /// Total allowed decay rate out of `state`.
    pub fn total_out(&self, state: StateId) -> f64 {
        self.allowed()
            .filter(|t| t.from == state)
            .map(|t| t.rate)
            .sum()
    }
}

pub fn transition_rates(system: &DressedSystem) -> TransitionTable {
    let mut entries = Vec::new();
    for p in 0..system.sectors.len().saturating_sub(1) {
        let d = transverse_dipole(&system.spec, p);
        let upper = &system.sectors[p];
        let lower = &system.sectors[p + 1];
        for from in &upper.states {
            let emitted = &d * &from.amplitudes;
            for to in &lower.states {
                let element = to.amplitudes.dotc(&emitted);
                entries.push(Transition {
                    from: from.id,
                    to: to.id,
                    rate: element.norm_sqr(),
                    offset: from.shift - to.shift,
                });
            }
        }
    }
    TransitionTable { entries }
}

/// ⟨i|D₊D₋|i⟩/d², the total emission rate out of `state` without resolving
/// the lower sector.
pub fn total_emission(system: &DressedSystem, state: StateId) -> f64 {
    if state.sector + 1 >= system.sectors.len() {
        return 0.0;
    }
    let d = transverse_dipole(&system.spec, state.sector);
    (&d * &system.state(state).amplitudes).norm_squared()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchName {
    Main,
    Secondary,
    Antisymmetric,
    Custom,
}

impl fmt::Display for BranchName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BranchName::Main => "main",
            BranchName::Secondary => "secondary",
            BranchName::Antisymmetric => "antisymmetric",
            BranchName::Custom => "custom",
        };
        f.write_str(s)
    }
}

/// A path of allowed transitions, one photon per step.
#[derive(Clone, Debug, PartialEq)]
pub struct CascadeChain {
    pub name: BranchName,
    pub states: Vec<StateId>,
    /// Rate of each step in units of Γ; `rates.len() == states.len() - 1`.
    pub rates: Vec<f64>,
}

impl CascadeChain {
    /// A chain with synthetic state ids `(j, 0)`, e.g. a single-sample ladder.
    pub fn from_rates(name: BranchName, rates: Vec<f64>) -> Self {
        let states = (0..=rates.len()).map(|j| StateId::new(j, 0)).collect();
        CascadeChain {
            name,
            states,
            rates,
        }
    }

    pub fn dicke_ladder(atoms: u32) -> Self {
        Self::from_rates(BranchName::Main, dicke_rates(atoms))
    }

    pub fn product(&self) -> f64 {
        self.rates.iter().product()
    }

    /// Same path with every rate multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        CascadeChain {
            rates: self.rates.iter().map(|r| r * factor).collect(),
            ..self.clone()
        }
    }
}

/// All source-to-sink paths through the allowed transitions, named and ranked
/// by the product of their rates.
///
/// Paths leaving the fully excited state are named main and secondary in
/// rank order; a path elsewhere made only of antisymmetric-group states is
/// antisymmetric; everything else is custom.
pub fn extract_branches(
    table: &TransitionTable,
    system: &DressedSystem,
) -> Result<Vec<CascadeChain>> {
    let mut out_edges: BTreeMap<StateId, Vec<(StateId, f64)>> = BTreeMap::new();
    let mut has_incoming: BTreeMap<StateId, bool> = BTreeMap::new();
    for t in table.allowed() {
        out_edges.entry(t.from).or_default().push((t.to, t.rate));
        has_incoming.insert(t.to, true);
    }

    let mut paths: Vec<(Vec<StateId>, Vec<f64>)> = Vec::new();
    for &source in out_edges.keys() {
        if has_incoming.contains_key(&source) {
            continue;
        }
        let mut stack = vec![(vec![source], Vec::new())];
        while let Some((states, rates)) = stack.pop() {
            let last = *states.last().expect("paths are non-empty");
            match out_edges.get(&last) {
                None => {
                    paths.push((states, rates));
                    if paths.len() > MAX_BRANCHES {
                        return Err(Error::SizeCap {
                            atoms: system.spec.total_atoms(),
                            cap: system.spec.max_atoms(),
                        });
                    }
                }
                Some(next) => {
                    for &(to, rate) in next.iter().rev() {
                        let mut s = states.clone();
                        s.push(to);
                        let mut r = rates.clone();
                        r.push(rate);
                        stack.push((s, r));
                    }
                }
            }
        }
    }

    let product = |r: &[f64]| r.iter().product::<f64>();
    paths.sort_by(|a, b| {
        product(&b.1)
            .total_cmp(&product(&a.1))
            .then_with(|| a.0.cmp(&b.0))
    });

    let top = system.top();
    let mut from_top = 0;
    Ok(paths
        .into_iter()
        .map(|(states, rates)| {
            let name = if states[0] == top {
                from_top += 1;
                match from_top {
                    1 => BranchName::Main,
                    2 => BranchName::Secondary,
                    _ => BranchName::Custom,
                }
            } else if states
                .iter()
                .all(|&s| system.state(s).symmetry == Symmetry::Antisymmetric)
            {
                BranchName::Antisymmetric
            } else {
                BranchName::Custom
            };
            CascadeChain {
                name,
                states,
                rates,
            }
        })
        .collect())
}

/// Largest spread (max − min) of any transition rate across the given kr
/// values, for samples of `atoms` atoms spaced by kr along the axis.
pub fn rate_r_independence_check(
    atoms: &[u32],
    mode: crate::basis::CouplingMode,
    scenario: &PhysicalScenario,
    kr_values: &[f64],
) -> Result<f64> {
    let mut tables = Vec::with_capacity(kr_values.len());
    for &kr in kr_values {
        let centre = (atoms.len() as f64 - 1.0) / 2.0;
        let samples = atoms
            .iter()
            .enumerate()
            .map(|(j, &m)| crate::basis::SampleSpec::new(m, (j as f64 - centre) * kr))
            .collect();
        let spec = CompoundSpec::new(samples, mode)?;
        let system = DressedSystem::solve(&spec, &scenario.with_kr(kr))?;
        tables.push(transition_rates(&system));
    }
    let Some(first) = tables.first() else {
        return Ok(0.0);
    };
    let mut worst = 0.0f64;
    for (k, entry) in first.entries.iter().enumerate() {
        let (mut lo, mut hi) = (entry.rate, entry.rate);
        for t in &tables[1..] {
            let r = t.entries[k].rate;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        worst = worst.max(hi - lo);
    }
    Ok(worst)
}
