use chordal::catalog::{random_planar_knot, Catalog};
use chordal::moves::genus;
use chordal::verify::{classical_exceptions, full_config};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn random_planar_knots_have_only_trivial_indices() {
    let evaluators = full_config().evaluators;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut nontrivial = 0;
    for _ in 0..120 {
        let d = random_planar_knot(&mut rng, 8);
        assert_eq!(genus(&d), 0);
        nontrivial += (d.n_chords() > 0 && d.n_chords() <= 8) as usize;
        let ex = classical_exceptions(&d, &evaluators).unwrap();
        assert!(ex.is_empty(), "{ex:?}");
    }
    assert!(nontrivial >= 100);
}

#[test]
fn classical_catalog_entries() {
    let evaluators = full_config().evaluators;
    let cat = Catalog::builtin();
    for name in ["unknot", "kink_pos", "kink_neg", "trefoil", "trefoil_left", "figure_eight"] {
        let d = cat.get(name).unwrap();
        let ex = classical_exceptions(d, &evaluators).unwrap();
        assert!(ex.is_empty(), "{name}: {ex:?}");
    }
}

#[test]
fn virtual_knots_are_detected() {
    let evaluators = full_config().evaluators;
    let cat = Catalog::builtin();
    for name in ["virtual_trefoil", "3.1"] {
        assert!(!classical_exceptions(cat.get(name).unwrap(), &evaluators).unwrap().is_empty());
    }
}

#[test]
fn long_knots_keep_the_order_index() {
    let evaluators = full_config().evaluators;
    let d = Catalog::builtin().get("long_trefoil").unwrap().clone();
    let ex = classical_exceptions(&d, &evaluators).unwrap();
    assert!(ex.iter().any(|e| e.starts_with("order")));
}
