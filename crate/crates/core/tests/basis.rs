use std::collections::BTreeSet;

use compound_sr::basis::{
    enumerate_sector, sector_dimensions, CompoundSpec, CouplingMode, SampleSpec,
};
use proptest::prelude::*;

fn spec(atoms: &[u32]) -> CompoundSpec {
    let samples = atoms
        .iter()
        .enumerate()
        .map(|(j, &m)| SampleSpec::new(m, 3.0 * j as f64))
        .collect();
    CompoundSpec::new(samples, CouplingMode::FromGeometry).unwrap()
}

/// Every excitation tuple, filtered by emitted-photon count.
fn brute_force(atoms: &[u32], p: u32) -> BTreeSet<Vec<u32>> {
    let mut all = vec![vec![]];
    for &m in atoms {
        all = all
            .into_iter()
            .flat_map(|prefix: Vec<u32>| {
                (0..=m).map(move |ne| {
                    let mut v = prefix.clone();
                    v.push(ne);
                    v
                })
            })
            .collect();
    }
    all.into_iter()
        .filter(|v| atoms.iter().zip(v).map(|(m, ne)| m - ne).sum::<u32>() == p)
        .collect()
}

#[test]
fn sectors_match_brute_force() {
    for atoms in [
        vec![2, 2],
        vec![3, 1],
        vec![1, 1, 1],
        vec![4],
        vec![2, 3, 1],
    ] {
        let s = spec(&atoms);
        let total: u32 = atoms.iter().sum();
        for p in 0..=total {
            let got: BTreeSet<Vec<u32>> = enumerate_sector(&s, p as usize)
                .iter()
                .map(|k| k.excited().to_vec())
                .collect();
            assert_eq!(got, brute_force(&atoms, p), "atoms {atoms:?}, p = {p}");
        }
    }
}

#[test]
fn two_two_atom_samples() {
    assert_eq!(sector_dimensions(&spec(&[2, 2])), [1, 2, 3, 2, 1]);
    let labels: Vec<String> = enumerate_sector(&spec(&[2, 2]), 2)
        .iter()
        .map(|k| k.label(&spec(&[2, 2])))
        .collect();
    assert_eq!(labels, ["c0;a2", "b1;b1", "a2;c0"]);
}

proptest! {
    #[test]
    fn sectors_partition_the_product_basis(atoms in prop::collection::vec(1u32..=3, 1..=4)) {
        let s = spec(&atoms);
        let dims = sector_dimensions(&s);
        let product: usize = atoms.iter().map(|&m| m as usize + 1).product();
        prop_assert_eq!(dims.iter().sum::<usize>(), product);
        prop_assert_eq!(dims.len(), s.total_atoms() as usize + 1);
        let mut seen = BTreeSet::new();
        for p in 0..dims.len() {
            for k in enumerate_sector(&s, p) {
                prop_assert_eq!(k.sector(&s), p);
                prop_assert!(seen.insert(k.excited().to_vec()));
            }
        }
        // Reversal symmetry of the sector sizes.
        let rev: Vec<usize> = dims.iter().rev().copied().collect();
        prop_assert_eq!(rev, dims);
    }
}
