use std::f64::consts::PI;

use compound_sr::basis::{CompoundSpec, CouplingMode, SampleSpec};
use compound_sr::coupling::{self, PhysicalScenario};
use compound_sr::dressed::{closed_form_reference, DressedSystem, Label, Symmetry};
use compound_sr::hamiltonian::build_interaction;
use compound_sr::C64;
use nalgebra::DMatrix;

/// Two two-atom samples; kr = 0 means coincident samples with the far-field
/// coupling of kr = 1 imposed on the pair.
fn system(kr: f64) -> DressedSystem {
    if kr == 0.0 {
        let spec = CompoundSpec::new(
            vec![SampleSpec::new(2, 0.0), SampleSpec::new(2, 0.0)],
            CouplingMode::Uniform,
        )
        .unwrap();
        return DressedSystem::solve(&spec, &PhysicalScenario::reduced(1.0, 1.0)).unwrap();
    }
    let spec = CompoundSpec::two_samples(2, kr).unwrap();
    DressedSystem::solve(&spec, &PhysicalScenario::reduced(1.0, kr)).unwrap()
}

#[test]
fn overlaps_with_closed_forms() {
    for kr in [0.0, 1.0, PI, 25.0, 100.0] {
        let sys = system(kr);
        let reference = closed_form_reference(kr);
        let numeric: Vec<_> = sys.states().collect();
        assert_eq!(numeric.len(), reference.len());
        for (n, r) in numeric.iter().zip(&reference) {
            assert_eq!(n.id, r.id);
            assert_eq!(n.label, r.label, "kr = {kr}, {}", sys.name(n.id));
            assert_eq!(n.symmetry, r.symmetry, "kr = {kr}, {}", sys.name(n.id));
            let overlap = r.amplitudes.dotc(&n.amplitudes).norm();
            assert!(
                overlap >= 1.0 - 1e-10,
                "kr = {kr}, {}: {overlap}",
                sys.name(n.id)
            );
            // Same phase convention, so the vectors agree outright.
            assert!((&r.amplitudes - &n.amplitudes).norm() < 1e-9);
        }
    }
}

#[test]
fn eigenpairs_and_unitarity() {
    for kr in [1.0, PI, 25.0, 100.0] {
        let spec = CompoundSpec::two_samples(2, kr).unwrap();
        let sc = PhysicalScenario::reduced(1.0, kr);
        let sys = DressedSystem::solve(&spec, &sc).unwrap();
        for sector in &sys.sectors {
            let m = build_interaction(&spec, &sc, sector.sector).unwrap();
            let d = sector.states.len();
            let u = DMatrix::from_fn(d, d, |r, c| sector.states[c].amplitudes[r]);
            let gram = u.adjoint() * &u;
            assert!((gram - DMatrix::<C64>::identity(d, d)).norm() < 1e-12);
            for st in &sector.states {
                let resid = &m.matrix * &st.amplitudes - &st.amplitudes * C64::new(st.shift, 0.0);
                assert!(resid.norm() < 1e-12);
            }
        }
    }
}

#[test]
fn physical_shifts_follow_beta() {
    let kr = 25.0;
    let sc = PhysicalScenario::reduced(1.0, kr);
    let beta = coupling::beta(&sc).unwrap().value;
    let sys = system(kr);
    let id = sys.find("2:+").unwrap();
    assert!((sys.shift_angular(id) - 2f64.sqrt() * beta).abs() < 1e-12 * beta.abs());
}

#[test]
fn labels_track_beta_sign() {
    // At kr = π the coupling is negative; "+" keeps meaning +β.
    let sys = system(PI);
    assert!(sys.beta_ref < 0.0);
    let plus = sys.state(sys.find("1:+").unwrap());
    assert_eq!(plus.label, Label::Plus);
    assert_eq!(plus.symmetry, Symmetry::Symmetric);
    assert!(sys.shift_angular(plus.id) < 0.0);
}

#[test]
fn zero_coupling_point_keeps_structure() {
    let kr = PI / 2.0;
    let sys = system(kr);
    let anti: Vec<String> = sys
        .states()
        .filter(|s| s.symmetry == Symmetry::Antisymmetric)
        .map(|s| sys.name(s.id))
        .collect();
    assert_eq!(anti, ["1:-", "2:0", "3:-"]);
    for s in sys.states() {
        assert!(sys.shift_angular(s.id).abs() < 1e-15);
    }
}
