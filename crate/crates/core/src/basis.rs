//! Uncoupled product basis of a compound system, split into photon sectors.
//!
//! Every sample stays on its symmetric Dicke ladder, so a product ket is
//! fully described by the excited-atom count of each sample. The number of
//! photons a sample has emitted is `atoms - excited`; the sector index is the
//! total over samples.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Default cap on the total atom count.
pub const DEFAULT_MAX_ATOMS: u32 = 12;

/// One Dicke sample: its atom count and position phase φ = k z.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleSpec {
    pub atoms: u32,
    pub phase: f64,
}

impl SampleSpec {
    pub fn new(atoms: u32, phase: f64) -> Self {
        SampleSpec { atoms, phase }
    }
}

/// How pair couplings are obtained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CouplingMode {
    /// α from each pair's separation, phases from the sample positions.
    #[default]
    FromGeometry,
    /// The same β for every pair and no propagation phases.
    Uniform,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompoundSpec {
    samples: Vec<SampleSpec>,
    coupling: CouplingMode,
    max_atoms: u32,
}

impl CompoundSpec {
    pub fn new(samples: Vec<SampleSpec>, coupling: CouplingMode) -> Result<Self> {
        Self::with_cap(samples, coupling, DEFAULT_MAX_ATOMS)
    }

    pub fn with_cap(
        samples: Vec<SampleSpec>,
        coupling: CouplingMode,
        max_atoms: u32,
    ) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Domain(
                "a compound system needs at least one sample".into(),
            ));
        }
        if let Some(s) = samples.iter().find(|s| s.atoms == 0) {
            return Err(Error::Domain(format!(
                "every sample needs at least one atom (phase {})",
                s.phase
            )));
        }
        if let Some(s) = samples.iter().find(|s| !s.phase.is_finite()) {
            return Err(Error::Domain(format!(
                "sample phase must be finite, got {}",
                s.phase
            )));
        }
        let atoms: u32 = samples.iter().map(|s| s.atoms).sum();
        if atoms > max_atoms {
            return Err(Error::SizeCap {
                atoms,
                cap: max_atoms,
            });
        }
        Ok(CompoundSpec {
            samples,
            coupling,
            max_atoms,
        })
    }

    /// Two identical samples placed symmetrically at φ = ∓kr/2.
    pub fn two_samples(atoms: u32, kr: f64) -> Result<Self> {
        Self::new(
            vec![
                SampleSpec::new(atoms, -kr / 2.0),
                SampleSpec::new(atoms, kr / 2.0),
            ],
            CouplingMode::FromGeometry,
        )
    }

    /// `n` identical samples, every pair coupled with the same strength.
    pub fn uniform(n: usize, atoms: u32) -> Result<Self> {
        Self::new(vec![SampleSpec::new(atoms, 0.0); n], CouplingMode::Uniform)
    }

    pub fn single(atoms: u32) -> Result<Self> {
        Self::new(
            vec![SampleSpec::new(atoms, 0.0)],
            CouplingMode::FromGeometry,
        )
    }

    pub fn samples(&self) -> &[SampleSpec] {
        &self.samples
    }

    pub fn coupling(&self) -> CouplingMode {
        self.coupling
    }

    pub fn max_atoms(&self) -> u32 {
        self.max_atoms
    }

    pub fn total_atoms(&self) -> u32 {
        self.samples.iter().map(|s| s.atoms).sum()
    }

    /// Number of photon sectors, `total_atoms + 1`.
    pub fn sector_count(&self) -> usize {
        self.total_atoms() as usize + 1
    }

    pub fn atom_counts(&self) -> Vec<u32> {
        self.samples.iter().map(|s| s.atoms).collect()
    }

    /// Phases entering the interaction and the transverse dipole. Uniform
    /// coupling drops them.
    pub fn effective_phases(&self) -> Vec<f64> {
        match self.coupling {
            CouplingMode::FromGeometry => self.samples.iter().map(|s| s.phase).collect(),
            CouplingMode::Uniform => vec![0.0; self.samples.len()],
        }
    }

    /// Whether kets print in the two-atom letter convention.
    fn letter_kets(&self) -> bool {
        self.samples.iter().all(|s| s.atoms == 2)
    }
}

/// Product ket, stored as the excited-atom count of each sample.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UncoupledKet {
    excited: Vec<u32>,
}

impl UncoupledKet {
    pub fn new(excited: Vec<u32>) -> Self {
        UncoupledKet { excited }
    }

    pub fn excited(&self) -> &[u32] {
        &self.excited
    }

    /// Photons emitted by each sample.
    pub fn photons(&self, spec: &CompoundSpec) -> Vec<u32> {
        spec.samples
            .iter()
            .zip(&self.excited)
            .map(|(s, &ne)| s.atoms - ne)
            .collect()
    }

    pub fn sector(&self, spec: &CompoundSpec) -> usize {
        self.photons(spec).iter().sum::<u32>() as usize
    }

    /// `"c0;b1"` for two-atom samples, `"Ne=[2,1]"` otherwise.
    pub fn label(&self, spec: &CompoundSpec) -> String {
        if spec.letter_kets() {
            self.excited
                .iter()
                .map(|&ne| match ne {
                    2 => "c0",
                    1 => "b1",
                    _ => "a2",
                })
                .collect::<Vec<_>>()
                .join(";")
        } else {
            format!("{self}")
        }
    }

    pub(crate) fn with_moved(&self, from: usize, to: usize) -> UncoupledKet {
        let mut excited = self.excited.clone();
        excited[from] -= 1;
        excited[to] += 1;
        UncoupledKet { excited }
    }

    pub(crate) fn with_lowered(&self, sample: usize) -> UncoupledKet {
        let mut excited = self.excited.clone();
        excited[sample] -= 1;
        UncoupledKet { excited }
    }
}

impl fmt::Display for UncoupledKet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ne=[")?;
        for (i, ne) in self.excited.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{ne}")?;
        }
        write!(f, "]")
    }
}

/// Kets of sector `p`, in descending lexicographic order of the excited
/// counts. Out-of-range sectors are empty.
pub fn enumerate_sector(spec: &CompoundSpec, p: usize) -> Vec<UncoupledKet> {
    let atoms = spec.atom_counts();
    let mut suffix_capacity = vec![0u32; atoms.len() + 1];
    for j in (0..atoms.len()).rev() {
        suffix_capacity[j] = suffix_capacity[j + 1] + atoms[j];
    }
    if p > suffix_capacity[0] as usize {
        return Vec::new();
    }

    let mut out = Vec::new();
    let mut current = Vec::with_capacity(atoms.len());
    fill(&atoms, &suffix_capacity, p as u32, &mut current, &mut out);
    out
}

fn fill(
    atoms: &[u32],
    suffix_capacity: &[u32],
    photons_left: u32,
    current: &mut Vec<u32>,
    out: &mut Vec<UncoupledKet>,
) {
    let j = current.len();
    if j == atoms.len() {
        if photons_left == 0 {
            out.push(UncoupledKet::new(current.clone()));
        }
        return;
    }
    for ne in (0..=atoms[j]).rev() {
        let n = atoms[j] - ne;
        if n > photons_left {
            break;
        }
        if photons_left - n > suffix_capacity[j + 1] {
            continue;
        }
        current.push(ne);
        fill(atoms, suffix_capacity, photons_left - n, current, out);
        current.pop();
    }
}

pub fn sector_dimensions(spec: &CompoundSpec) -> Vec<usize> {
    (0..spec.sector_count())
        .map(|p| enumerate_sector(spec, p).len())
        .collect()
}

/// Kets of one sector with a reverse index.
#[derive(Clone, Debug)]
pub struct SectorBasis {
    pub sector: usize,
    pub kets: Vec<UncoupledKet>,
    index: HashMap<UncoupledKet, usize>,
}

impl SectorBasis {
    pub fn new(spec: &CompoundSpec, sector: usize) -> Self {
        let kets = enumerate_sector(spec, sector);
        let index = kets
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, k)| (k, i))
            .collect();
        SectorBasis {
            sector,
            kets,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.kets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kets.is_empty()
    }

    pub fn position(&self, ket: &UncoupledKet) -> Option<usize> {
        self.index.get(ket).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper() -> CompoundSpec {
        CompoundSpec::two_samples(2, 25.0).unwrap()
    }

    #[test]
    fn paper_sectors() {
        let spec = paper();
        let s0 = enumerate_sector(&spec, 0);
        assert_eq!(s0.len(), 1);
        assert_eq!(s0[0].label(&spec), "c0;c0");

        let s2: Vec<_> = enumerate_sector(&spec, 2)
            .iter()
            .map(|k| k.label(&spec))
            .collect();
        assert_eq!(s2, ["c0;a2", "b1;b1", "a2;c0"]);

        let total: usize = sector_dimensions(&spec).iter().sum();
        assert_eq!(total, 9);
    }

    #[test]
    fn out_of_range_sector_is_empty() {
        assert!(enumerate_sector(&paper(), 5).is_empty());
        assert!(enumerate_sector(&paper(), 100).is_empty());
    }

    #[test]
    fn dimensions() {
        assert_eq!(sector_dimensions(&paper()), [1, 2, 3, 2, 1]);
        assert_eq!(
            sector_dimensions(&CompoundSpec::single(2).unwrap()),
            [1, 1, 1]
        );
        let three = CompoundSpec::uniform(3, 2).unwrap();
        assert_eq!(sector_dimensions(&three), [1, 3, 6, 7, 6, 3, 1]);
    }

    #[test]
    fn general_label_format() {
        let spec = CompoundSpec::new(
            vec![SampleSpec::new(3, 0.0), SampleSpec::new(1, 1.0)],
            CouplingMode::FromGeometry,
        )
        .unwrap();
        let k = &enumerate_sector(&spec, 1)[0];
        assert_eq!(k.label(&spec), "Ne=[3,0]");
        assert_eq!(k.photons(&spec), [0, 1]);
        assert_eq!(k.sector(&spec), 1);
    }

    #[test]
    fn size_cap_enforced() {
        let samples = vec![SampleSpec::new(7, 0.0), SampleSpec::new(6, 1.0)];
        match CompoundSpec::new(samples, CouplingMode::FromGeometry) {
            Err(Error::SizeCap { atoms: 13, cap: 12 }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(CompoundSpec::new(vec![], CouplingMode::Uniform).is_err());
        assert!(CompoundSpec::single(0).is_err());
    }

    #[test]
    fn fully_excited_ket_leads_sector_zero() {
        let spec = CompoundSpec::uniform(3, 2).unwrap();
        assert_eq!(enumerate_sector(&spec, 0)[0].excited(), [2, 2, 2]);
    }

    #[test]
    fn sector_basis_index() {
        let b = SectorBasis::new(&paper(), 2);
        for (i, k) in b.kets.iter().enumerate() {
            assert_eq!(b.position(k), Some(i));
        }
        assert_eq!(b.position(&UncoupledKet::new(vec![2, 2])), None);
    }
}
