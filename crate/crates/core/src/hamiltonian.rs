//! Photon-conserving exchange interaction between samples.
//!
//! Each ordered pair (i, j) contributes (β_ij / 2)·D_{i+} D_{j-}·e^{i(φ_i − φ_j)}
//! with the collective ladder operators in units of d and β_ij = d² α(r_ij)/ħ.
//! For two samples at φ = ∓kr/2 this is exactly the two-sample exchange term
//! with its e^{∓ikr} phases.
//!
//! Sector matrices are stored in units of ħβ_ref, where β_ref is the
//! strongest pair coupling (sign kept). The eigenvectors then do not depend on
//! |β| and stay well defined at the zeros of cos(kr).

use nalgebra::DMatrix;
use serde::Serialize;

use crate::basis::{CompoundSpec, CouplingMode, SectorBasis, UncoupledKet};
use crate::coupling::{self, PhysicalScenario};
use crate::error::{Error, Result};
use crate::C64;

/// Relative Hermiticity tolerance accepted by the eigensolver.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Matrix element of a sample's collective lowering operator from `excited`
/// to `excited - 1`, in units of d. Zero off the ladder.
pub fn lowering_element(atoms: u32, excited: u32) -> f64 {
    if excited == 0 || excited > atoms {
        return 0.0;
    }
    (f64::from(excited) * f64::from(atoms - excited + 1)).sqrt()
}

/// Pair couplings of a compound system, relative to a reference β.
#[derive(Clone, Debug, PartialEq)]
pub struct PairCouplings {
    /// β_ref in angular-frequency units of the scenario. Zero when every
    /// pair coupling vanishes or there is a single sample.
    pub beta_ref: f64,
    /// β_ij / β_ref, symmetric with zero diagonal.
    pub ratio: Vec<Vec<f64>>,
    /// Effective sample phases.
    pub phases: Vec<f64>,
    pub far_field_warning: bool,
}

impl PairCouplings {
    pub fn new(spec: &CompoundSpec, scenario: &PhysicalScenario) -> Result<Self> {
        scenario.validate()?;
        let n = spec.samples().len();
        let mut beta = vec![vec![0.0; n]; n];
        let mut far_field_warning = false;
        match spec.coupling() {
            CouplingMode::Uniform => {
                let b = coupling::beta(scenario)?;
                far_field_warning = b.far_field_warning && n > 1;
                for (i, row) in beta.iter_mut().enumerate() {
                    for (j, v) in row.iter_mut().enumerate() {
                        if i != j {
                            *v = b.value;
                        }
                    }
                }
            }
            CouplingMode::FromGeometry => {
                let phases: Vec<f64> = spec.samples().iter().map(|s| s.phase).collect();
                for i in 0..n {
                    for j in (i + 1)..n {
                        let r = (phases[i] - phases[j]).abs() / scenario.wavenumber;
                        let b = coupling::beta_at(scenario, r)?;
                        far_field_warning |= b.far_field_warning;
                        beta[i][j] = b.value;
                        beta[j][i] = b.value;
                    }
                }
            }
        }

        // Strongest pair, first in (i, j) order on ties.
        let mut beta_ref = 0.0f64;
        for (i, row) in beta.iter().enumerate() {
            for &v in &row[i + 1..] {
                if v.abs() > beta_ref.abs() {
                    beta_ref = v;
                }
            }
        }
        let ratio = beta
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, &v)| match (i == j, beta_ref == 0.0) {
                        (true, _) => 0.0,
                        // All pairs at a node of cos(kr): keep the unit structure.
                        (false, true) => 1.0,
                        (false, false) => v / beta_ref,
                    })
                    .collect()
            })
            .collect();

        Ok(PairCouplings {
            beta_ref,
            ratio,
            phases: spec.effective_phases(),
            far_field_warning,
        })
    }
}

/// Interaction restricted to one photon sector, in units of ħβ_ref.
#[derive(Clone, Debug)]
pub struct SectorMatrix {
    pub sector: usize,
    pub kets: Vec<UncoupledKet>,
    pub matrix: DMatrix<C64>,
    /// β_ref; multiply by ħβ_ref to get energies.
    pub beta_ref: f64,
    /// Sample atom counts and effective phases, carried for symmetry tags.
    pub atoms: Vec<u32>,
    pub phases: Vec<f64>,
}

impl SectorMatrix {
    pub fn dim(&self) -> usize {
        self.kets.len()
    }

    /// Matrix in angular-frequency units (energy / ħ).
    pub fn in_angular_units(&self) -> DMatrix<C64> {
        self.matrix.scale(self.beta_ref)
    }

    pub fn hermiticity_residual(&self) -> f64 {
        hermiticity_residual(&self.matrix)
    }

    /// Row-major `[re, im]` pairs for debugging dumps.
    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Dump {
            sector: usize,
            beta_ref: f64,
            kets: Vec<String>,
            matrix_over_hbar_beta: Vec<Vec<[f64; 2]>>,
        }
        let rows = (0..self.dim())
            .map(|r| {
                (0..self.dim())
                    .map(|c| [self.matrix[(r, c)].re, self.matrix[(r, c)].im])
                    .collect()
            })
            .collect();
        serde_json::to_value(Dump {
            sector: self.sector,
            beta_ref: self.beta_ref,
            kets: self.kets.iter().map(|k| k.to_string()).collect(),
            matrix_over_hbar_beta: rows,
        })
        .expect("matrix dump serializes")
    }
}

/// ‖V − V†‖_max / ‖V‖_max, or the absolute value for a zero matrix.
pub fn hermiticity_residual(m: &DMatrix<C64>) -> f64 {
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let diff = (m - m.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

/// Every ket reachable from `ket` by one exchange, with its amplitude.
fn exchange_terms(
    ket: &UncoupledKet,
    atoms: &[u32],
    couplings: &PairCouplings,
) -> Vec<(UncoupledKet, C64)> {
    let n = atoms.len();
    let ne = ket.excited();
    let mut out = Vec::new();
    for from in 0..n {
        let lower = lowering_element(atoms[from], ne[from]);
        if lower == 0.0 {
            continue;
        }
        for to in 0..n {
            if to == from {
                continue;
            }
            let raise = lowering_element(atoms[to], ne[to] + 1);
            if raise == 0.0 {
                continue;
            }
            let strength = 0.5 * couplings.ratio[to][from] * lower * raise;
            let phase = C64::from_polar(1.0, couplings.phases[to] - couplings.phases[from]);
            out.push((ket.with_moved(from, to), phase * strength));
        }
    }
    out
}

/// Interaction matrix of sector `p`.
pub fn build_interaction(
    spec: &CompoundSpec,
    scenario: &PhysicalScenario,
    p: usize,
) -> Result<SectorMatrix> {
    let couplings = PairCouplings::new(spec, scenario)?;
    Ok(build_with_couplings(spec, &couplings, p))
}

pub(crate) fn build_with_couplings(
    spec: &CompoundSpec,
    couplings: &PairCouplings,
    p: usize,
) -> SectorMatrix {
    let basis = SectorBasis::new(spec, p);
    let atoms = spec.atom_counts();
    let dim = basis.len();
    let mut matrix = DMatrix::<C64>::zeros(dim, dim);
    for (col, ket) in basis.kets.iter().enumerate() {
        for (target, amp) in exchange_terms(ket, &atoms, couplings) {
            let row = basis
                .position(&target)
                .expect("exchange conserves the photon number");
            matrix[(row, col)] += amp;
        }
    }
    SectorMatrix {
        sector: p,
        kets: basis.kets,
        matrix,
        beta_ref: couplings.beta_ref,
        atoms,
        phases: couplings.phases.clone(),
    }
}

/// The interaction over the whole product basis, assembled ket by ket
/// without using the sector split. Kets are ordered sector by sector.
pub fn build_full_interaction(
    spec: &CompoundSpec,
    scenario: &PhysicalScenario,
) -> Result<(Vec<UncoupledKet>, DMatrix<C64>)> {
    let couplings = PairCouplings::new(spec, scenario)?;
    let atoms = spec.atom_counts();
    let kets: Vec<UncoupledKet> = (0..spec.sector_count())
        .flat_map(|p| crate::basis::enumerate_sector(spec, p))
        .collect();
    let dim = kets.len();
    let mut matrix = DMatrix::<C64>::zeros(dim, dim);
    for (col, ket) in kets.iter().enumerate() {
        for (target, amp) in exchange_terms(ket, &atoms, &couplings) {
            let row = kets.iter().position(|k| *k == target).ok_or_else(|| {
                Error::Contract(format!("{target} missing from the product basis"))
            })?;
            matrix[(row, col)] += amp;
        }
    }
    Ok((kets, matrix))
}
