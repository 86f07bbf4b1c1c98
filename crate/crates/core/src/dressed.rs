//! Dressed states: eigenvectors of each sector's interaction matrix.
//!
//! Shifts are reported in units of ħβ_ref (see [`crate::hamiltonian`]), so for
//! two two-atom samples the paper-style labels |j,±⟩, |j,0⟩ keep their meaning
//! for either sign of cos(kr). Degenerate eigenspaces are rotated so that they
//! diagonalize the gauge-stripped exchange of samples 1 and 2, which makes the
//! symmetric/antisymmetric split deterministic.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::basis::{CompoundSpec, UncoupledKet};
use crate::coupling::PhysicalScenario;
use crate::error::{Error, Result};
use crate::hamiltonian::{self, PairCouplings, SectorMatrix, HERMITIAN_TOL};
use crate::C64;

/// Shifts below this magnitude (units of ħ|β|) are labelled zero.
pub const ZERO_SHIFT_TOL: f64 = 1e-9;
/// Eigenvalues closer than this (units of ħ|β|) form one degenerate group.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// Relative eigen-residual bound ‖Vx − Ex‖ / ‖V‖.
pub const RESIDUAL_TOL: f64 = 1e-11;

const PHASE_FIX_TOL: f64 = 1e-10;
const SYMMETRY_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Plus,
    Minus,
    Zero,
}

impl Label {
    pub fn from_shift(shift: f64) -> Self {
        if shift > ZERO_SHIFT_TOL {
            Label::Plus
        } else if shift < -ZERO_SHIFT_TOL {
            Label::Minus
        } else {
            Label::Zero
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Label::Plus => "+",
            Label::Minus => "-",
            Label::Zero => "0",
        }
    }
}

/// Behaviour under exchange of samples 1 and 2 once propagation phases are
/// stripped (the kr → 0 limit).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Symmetry {
    #[serde(rename = "symmetric-group")]
    Symmetric,
    #[serde(rename = "antisymmetric-group")]
    Antisymmetric,
    #[serde(rename = "unclassified")]
    Unclassified,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct StateId {
    pub sector: usize,
    /// Position within the sector, shifts descending.
    pub index: usize,
}

impl StateId {
    pub fn new(sector: usize, index: usize) -> Self {
        StateId { sector, index }
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.sector, self.index)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DressedState {
    pub id: StateId,
    /// ΔE relative to the uncoupled level, in units of ħβ_ref.
    pub shift: f64,
    /// Unit vector over the sector's uncoupled kets; the first non-negligible
    /// amplitude is real and positive.
    pub amplitudes: DVector<C64>,
    pub label: Label,
    pub symmetry: Symmetry,
}

/// Hermitian operator exchanging samples 1 and 2 after stripping the phase
/// e^{-iΣφ_j n_j} carried by every ket. `None` when the swap is undefined.
fn gauged_swap(kets: &[UncoupledKet], atoms: &[u32], phases: &[f64]) -> Option<DMatrix<C64>> {
    if atoms.len() < 2 || atoms[0] != atoms[1] {
        return None;
    }
    let gauge = |k: &UncoupledKet| {
        let theta: f64 = k
            .excited()
            .iter()
            .zip(atoms.iter().zip(phases))
            .map(|(&ne, (&m, &phi))| phi * f64::from(m - ne))
            .sum();
        C64::from_polar(1.0, theta)
    };
    let dim = kets.len();
    let mut w = DMatrix::<C64>::zeros(dim, dim);
    for (row, k) in kets.iter().enumerate() {
        let mut swapped = k.excited().to_vec();
        swapped.swap(0, 1);
        let swapped = UncoupledKet::new(swapped);
        let col = kets.iter().position(|x| *x == swapped)?;
        w[(row, col)] = gauge(k).conj() * gauge(&swapped);
    }
    Some(w)
}

fn fix_phase(v: &mut DVector<C64>) {
    if let Some(z) = v.iter().find(|z| z.norm() > PHASE_FIX_TOL).copied() {
        let rot = z.conj() / z.norm();
        v.iter_mut().for_each(|a| *a *= rot);
        if let Some(first) = v.iter_mut().find(|z| z.norm() > PHASE_FIX_TOL) {
            first.im = 0.0;
        }
    }
}

fn classify(v: &DVector<C64>, swap: Option<&DMatrix<C64>>) -> Symmetry {
    let Some(w) = swap else {
        return Symmetry::Unclassified;
    };
    let s = v.dotc(&(w * v));
    if (s.re - 1.0).abs() < SYMMETRY_TOL {
        Symmetry::Symmetric
    } else if (s.re + 1.0).abs() < SYMMETRY_TOL {
        Symmetry::Antisymmetric
    } else {
        Symmetry::Unclassified
    }
}

/// Sorted eigenpairs (descending) of a Hermitian matrix.
fn hermitian_eigen(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let dim = m.nrows();
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(dim, dim, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Complete orthonormal eigenbasis of one sector, shifts descending.
pub fn diagonalize(matrix: &SectorMatrix) -> Result<Vec<DressedState>> {
    let v = &matrix.matrix;
    let dim = matrix.dim();
    let herm = matrix.hermiticity_residual();
    if herm > HERMITIAN_TOL {
        return Err(Error::Contract(format!(
            "sector {} matrix is not Hermitian (residual {herm:e})",
            matrix.sector
        )));
    }
    if dim == 0 {
        return Ok(Vec::new());
    }

    let (values, mut vectors) = hermitian_eigen(v);
    let swap = gauged_swap(&matrix.kets, &matrix.atoms, &matrix.phases);

    // Rotate degenerate groups onto eigenvectors of the exchange operator.
    if let Some(w) = &swap {
        let mut start = 0;
        while start < dim {
            let mut end = start + 1;
            while end < dim && (values[end - 1] - values[end]).abs() < DEGENERACY_TOL {
                end += 1;
            }
            if end - start > 1 {
                let block = vectors.columns(start, end - start).into_owned();
                let projected = block.adjoint() * w * &block;
                let (_, rot) = hermitian_eigen(&projected);
                vectors
                    .columns_mut(start, end - start)
                    .copy_from(&(block * rot));
            }
            start = end;
        }
    }

    let scale = v.norm();
    let mut states = Vec::with_capacity(dim);
    for (index, &shift) in values.iter().enumerate() {
        let mut amp: DVector<C64> = vectors.column(index).into_owned();
        let residual = (v * &amp - amp.scale(shift)).norm();
        if residual > RESIDUAL_TOL * scale {
            return Err(Error::Contract(format!(
                "sector {} eigenpair {index} residual {residual:e} exceeds {:e}",
                matrix.sector,
                RESIDUAL_TOL * scale
            )));
        }
        fix_phase(&mut amp);
        let symmetry = classify(&amp, swap.as_ref());
        states.push(DressedState {
            id: StateId::new(matrix.sector, index),
            shift,
            amplitudes: amp,
            label: Label::from_shift(shift),
            symmetry,
        });
    }
    Ok(states)
}

#[derive(Clone, Debug)]
pub struct DressedSector {
    pub sector: usize,
    pub kets: Vec<UncoupledKet>,
    pub states: Vec<DressedState>,
}

/// Dressed states of every sector of a compound system.
#[derive(Clone, Debug)]
pub struct DressedSystem {
    pub spec: CompoundSpec,
    /// Signed β_ref; physical shift = `shift * beta_ref`.
    pub beta_ref: f64,
    pub far_field_warning: bool,
    pub sectors: Vec<DressedSector>,
}

impl DressedSystem {
    pub fn solve(spec: &CompoundSpec, scenario: &PhysicalScenario) -> Result<Self> {
        let couplings = PairCouplings::new(spec, scenario)?;
        let mut sectors = Vec::with_capacity(spec.sector_count());
        for p in 0..spec.sector_count() {
            let m = hamiltonian::build_with_couplings(spec, &couplings, p);
            let states = diagonalize(&m)?;
            sectors.push(DressedSector {
                sector: p,
                kets: m.kets,
                states,
            });
        }
        Ok(DressedSystem {
            spec: spec.clone(),
            beta_ref: couplings.beta_ref,
            far_field_warning: couplings.far_field_warning,
            sectors,
        })
    }

    pub fn state(&self, id: StateId) -> &DressedState {
        &self.sectors[id.sector].states[id.index]
    }

    pub fn states(&self) -> impl Iterator<Item = &DressedState> {
        self.sectors.iter().flat_map(|s| s.states.iter())
    }

    pub fn len(&self) -> usize {
        self.sectors.iter().map(|s| s.states.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The fully excited state.
    pub fn top(&self) -> StateId {
        StateId::new(0, 0)
    }

    /// `"1:+"` style name; repeated labels in a sector get a `.k` suffix.
    pub fn name(&self, id: StateId) -> String {
        let sector = &self.sectors[id.sector];
        let label = sector.states[id.index].label;
        let same: Vec<usize> = sector
            .states
            .iter()
            .enumerate()
            .filter(|(_, s)| s.label == label)
            .map(|(i, _)| i)
            .collect();
        if same.len() == 1 {
            format!("{}:{}", id.sector, label.symbol())
        } else {
            let k = same.iter().position(|&i| i == id.index).unwrap_or(0) + 1;
            format!("{}:{}.{}", id.sector, label.symbol(), k)
        }
    }

    pub fn find(&self, name: &str) -> Option<StateId> {
        self.states()
            .map(|s| s.id)
            .find(|&id| self.name(id) == name)
    }

    /// Physical shift of a state in angular-frequency units.
    pub fn shift_angular(&self, id: StateId) -> f64 {
        self.state(id).shift * self.beta_ref
    }
}

/// The nine dressed states of two two-atom samples at separation `kr`,
/// written out in closed form and brought to the same phase convention as
/// [`diagonalize`]. Ordered by sector, shifts descending.
pub fn closed_form_reference(kr: f64) -> Vec<DressedState> {
    let e = |theta: f64| C64::from_polar(1.0, theta);
    let s2 = std::f64::consts::SQRT_2;
    let h = 1.0 / s2;
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);

    let table: Vec<(usize, f64, Vec<C64>, Symmetry)> = vec![
        (0, 0.0, vec![one], Symmetry::Symmetric),
        (
            1,
            1.0,
            vec![e(-kr / 2.0) * h, e(kr / 2.0) * h],
            Symmetry::Symmetric,
        ),
        (
            1,
            -1.0,
            vec![e(-kr / 2.0) * h, -e(kr / 2.0) * h],
            Symmetry::Antisymmetric,
        ),
        (
            2,
            s2,
            vec![e(-kr) * 0.5, C64::new(s2 * 0.5, 0.0), e(kr) * 0.5],
            Symmetry::Symmetric,
        ),
        (
            2,
            0.0,
            vec![e(-kr) * h, zero, -e(kr) * h],
            Symmetry::Antisymmetric,
        ),
        (
            2,
            -s2,
            vec![e(-kr) * 0.5, C64::new(-s2 * 0.5, 0.0), e(kr) * 0.5],
            Symmetry::Symmetric,
        ),
        (
            3,
            1.0,
            vec![e(-kr / 2.0) * h, e(kr / 2.0) * h],
            Symmetry::Symmetric,
        ),
        (
            3,
            -1.0,
            vec![e(-kr / 2.0) * h, -e(kr / 2.0) * h],
            Symmetry::Antisymmetric,
        ),
        (4, 0.0, vec![one], Symmetry::Symmetric),
    ];

    let mut index_in_sector = [0usize; 5];
    table
        .into_iter()
        .map(|(sector, shift, amps, symmetry)| {
            let index = index_in_sector[sector];
            index_in_sector[sector] += 1;
            let mut amplitudes = DVector::from_vec(amps);
            fix_phase(&mut amplitudes);
            DressedState {
                id: StateId::new(sector, index),
                shift,
                amplitudes,
                label: Label::from_shift(shift),
                symmetry,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::build_interaction;

    fn paper(kr: f64) -> DressedSystem {
        let spec = CompoundSpec::two_samples(2, kr).unwrap();
        DressedSystem::solve(&spec, &PhysicalScenario::reduced(1.0, kr)).unwrap()
    }

    #[test]
    fn paper_shifts() {
        let s2 = std::f64::consts::SQRT_2;
        let sys = paper(25.0);
        let shifts: Vec<Vec<f64>> = sys
            .sectors
            .iter()
            .map(|s| s.states.iter().map(|d| d.shift).collect())
            .collect();
        let expected = [
            vec![0.0],
            vec![1.0, -1.0],
            vec![s2, 0.0, -s2],
            vec![1.0, -1.0],
            vec![0.0],
        ];
        for (got, want) in shifts.iter().zip(&expected) {
            assert_eq!(got.len(), want.len());
            for (g, w) in got.iter().zip(want) {
                assert!((g - w).abs() < 1e-12, "{got:?} vs {want:?}");
            }
        }
    }

    #[test]
    fn names_and_labels() {
        let sys = paper(25.0);
        let names: Vec<String> = sys.states().map(|s| sys.name(s.id)).collect();
        assert_eq!(
            names,
            ["0:0", "1:+", "1:-", "2:+", "2:0", "2:-", "3:+", "3:-", "4:0"]
        );
        assert_eq!(sys.find("2:0"), Some(StateId::new(2, 1)));
    }

    #[test]
    fn symmetry_groups_match_the_two_group_split() {
        let sys = paper(7.3);
        let anti: Vec<String> = sys
            .states()
            .filter(|s| s.symmetry == Symmetry::Antisymmetric)
            .map(|s| sys.name(s.id))
            .collect();
        assert_eq!(anti, ["1:-", "2:0", "3:-"]);
        assert!(sys.states().all(|s| s.symmetry != Symmetry::Unclassified));
    }

    #[test]
    fn closed_form_phase_convention() {
        let kr = 0.0;
        let states = closed_form_reference(kr);
        let two_plus = &states[3];
        let expected = [0.5, std::f64::consts::SQRT_2 / 2.0, 0.5];
        for (a, e) in two_plus.amplitudes.iter().zip(expected) {
            assert!((a - C64::new(e, 0.0)).norm() < 1e-15);
        }
        assert_eq!(states[4].amplitudes[1].norm(), 0.0);
        for s in closed_form_reference(1.7) {
            assert!((s.amplitudes.norm() - 1.0).abs() < 1e-14);
            assert!(s.amplitudes[0].im == 0.0 && s.amplitudes[0].re >= 0.0);
        }
    }

    #[test]
    fn negative_beta_keeps_paper_labels() {
        let sys = paper(std::f64::consts::PI);
        assert!(sys.beta_ref < 0.0);
        let one_plus = sys.state(StateId::new(1, 0));
        assert_eq!(one_plus.label, Label::Plus);
        // Physically the state sits below the uncoupled level.
        assert!(sys.shift_angular(one_plus.id) < 0.0);
    }

    #[test]
    fn rejects_non_hermitian_input() {
        let spec = CompoundSpec::two_samples(2, 25.0).unwrap();
        let mut m = build_interaction(&spec, &PhysicalScenario::reduced(1.0, 25.0), 1).unwrap();
        m.matrix[(0, 1)] = C64::new(0.3, 0.0);
        m.matrix[(1, 0)] = C64::new(0.1, 0.0);
        assert!(matches!(diagonalize(&m), Err(Error::Contract(_))));
    }

    #[test]
    fn uniform_three_samples_degenerate_groups_are_split_by_symmetry() {
        let spec = CompoundSpec::uniform(3, 2).unwrap();
        let sys = DressedSystem::solve(&spec, &PhysicalScenario::reduced(1.0, 25.0)).unwrap();
        let s1 = &sys.sectors[1].states;
        assert!((s1[0].shift - 2.0).abs() < 1e-12);
        assert!((s1[1].shift + 1.0).abs() < 1e-12 && (s1[2].shift + 1.0).abs() < 1e-12);
        assert_eq!(s1[1].symmetry, Symmetry::Symmetric);
        assert_eq!(s1[2].symmetry, Symmetry::Antisymmetric);
        assert_eq!(sys.name(s1[1].id), "1:-.1");
    }
}
