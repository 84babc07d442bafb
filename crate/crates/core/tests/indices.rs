use std::sync::Arc;

use chordal::based_matrix::LaurentPoly;
use chordal::biquandle::{colorings, FiniteBiquandle};
use chordal::catalog::Catalog;
use chordal::indices::*;
use chordal::moves::random_walk;
use chordal::verify::{full_config, fuzz_walk};
use chordal::{Flavor, GaussDiagram};
use proptest::prelude::*;

fn k31() -> GaussDiagram {
    "c: O1- U2+ U3- O2+ U1- O3-".parse().unwrap()
}

fn entry(name: &str) -> GaussDiagram {
    Catalog::builtin().get(name).unwrap().clone()
}

fn ints(xs: &[i64]) -> Vec<IndexValue> {
    xs.iter().map(|&x| IndexValue::Int(x)).collect()
}

fn poly(terms: &[(i64, i64)]) -> LaurentPoly {
    let mut p = LaurentPoly::default();
    for &(k, c) in terms {
        p.add_term(k, c);
    }
    p
}

fn eval(name: &str, d: &GaussDiagram) -> Vec<IndexValue> {
    evaluator_by_name(name).unwrap().eval_all(d).unwrap()
}

#[test]
fn gaussian_indices_of_3_1() {
    let d = k31();
    assert_eq!(gaussian_n(&d).unwrap(), [-1, -1, 2]);
    assert_eq!(gaussian_ind(&d).unwrap(), [1, -1, -2]);
    assert_eq!(eval("n", &d.with_flavor(Flavor::Flat)), ints(&[-1, -1, 2]));
}

#[test]
fn virtual_trefoil_ind() {
    let ind = gaussian_ind(&entry("virtual_trefoil")).unwrap();
    assert!(ind == [1, -1] || ind == [-1, 1], "{ind:?}");
}

#[test]
fn classical_diagrams_have_zero_indices() {
    for name in ["trefoil", "trefoil_left", "figure_eight"] {
        let d = entry(name);
        assert!(gaussian_ind(&d).unwrap().iter().all(|&x| x == 0), "{name}");
        assert!(gaussian_n(&d).unwrap().iter().all(|&x| x == 0), "{name}");
        assert!(eval("hp", &d).iter().all(|x| x.is_zero()), "{name}");
        assert!(turaev_u(&d.with_flavor(Flavor::Flat)).unwrap().is_zero(), "{name}");
    }
}

#[test]
fn tilde_and_hat_adapters() {
    let d = k31();
    let tilde = eval("tilde_Ind", &d);
    let want: Vec<IndexValue> = [(1, -1), (-1, 1), (-2, -1)]
        .iter()
        .map(|&(x, s)| IndexValue::Signed { value: Box::new(IndexValue::Int(x)), sign: s })
        .collect();
    assert_eq!(tilde, want);
    let e = evaluator_by_name("tilde_Ind").unwrap();
    assert_eq!(e.involution(&want[0]), IndexValue::Signed { value: Box::new(IndexValue::Int(1)), sign: 1 });
}

#[test]
fn loop_values_of_basic_indices() {
    let d = k31();
    let ind = loop_values(&GaussianInd, &d, 0).unwrap();
    assert!(ind.values().all(|x| *x == IndexValue::Int(0)));
    assert_eq!(ind.len(), 4);
    let link = entry("hopf_pos");
    for c in 0..2 {
        let vals = loop_values(&ComponentIdx, &link, c).unwrap();
        let k = c as i64 + 1;
        assert!(vals.values().all(|x| *x == IndexValue::Pair(k, k)));
    }
    let long = entry("long_trefoil");
    let mut order: Vec<IndexValue> = loop_values(&OrderIdx, &long, 0).unwrap().into_values().collect();
    order.sort();
    order.dedup();
    assert_eq!(order, ints(&[-1, 1]));
}

#[test]
fn cheng_polynomial_from_the_linking_polynomial() {
    let d = k31();
    let e = Tilde(Arc::new(GaussianInd));
    let loops = loop_set(&e, &d).unwrap();
    let p = lk_polynomial(&d, &e, &loops).unwrap();
    let want = poly(&[(1, -1), (-1, 1), (-2, -1)]);
    assert_eq!(tilde_int_poly(&p), Some(want.clone()));
    assert_eq!(cheng_f(&d).unwrap(), want);
    assert!(lk_polynomial(&GaussDiagram::unknot(), &e, &loops).unwrap().is_zero());
    let t = entry("trefoil");
    assert!(lk_polynomial(&t, &e, &loop_set(&e, &t).unwrap()).unwrap().is_zero());
}

#[test]
fn turaev_polynomial_of_flat_3_1() {
    assert_eq!(turaev_u(&entry("flat_3_1")).unwrap(), poly(&[(2, 1), (1, -2)]));
    assert_eq!(turaev_u(&k31().with_flavor(Flavor::Flat)).unwrap(), poly(&[(2, 1), (1, -2)]));
}

#[test]
fn derived_parities_of_3_1() {
    let d = k31();
    let (p1, m1) = derived_parity(&d, 1).unwrap();
    let (p2, m2) = derived_parity(&d, 2).unwrap();
    assert_eq!((m1, m2), (4, 4));
    assert_eq!(p1, [3, 1, 3]);
    assert_eq!(p2, [3, 0, 1]);
    assert!(eval("nprime", &entry("trefoil")).iter().all(|x| x.is_zero()));
}

#[test]
fn secondary_coefficients_sum_to_n() {
    let d = k31();
    let n = gaussian_n(&d).unwrap();
    let s = secondary_index(&d, &n);
    for (v, r) in s.iter().enumerate() {
        assert_eq!(r.terms.values().sum::<i64>(), n[v]);
    }
    assert_eq!(s[2].modulus, 2);
    assert_eq!(s[2].terms.iter().map(|(&k, &c)| (k, c)).collect::<Vec<_>>(), [(1, 2)]);
    assert_eq!(s[0].terms.iter().map(|(&k, &c)| (k, c)).collect::<Vec<_>>(), [(0, -1)]);
    let kink = entry("kink_pos");
    assert!(secondary_index(&kink, &gaussian_n(&kink).unwrap())[0].is_zero());
}

#[test]
fn weak_parity_and_projection() {
    let d = k31();
    assert_eq!(eval("weak_Ind2", &d), ints(&[1, 1, 0]));
    let psi = WeakParity { base: Arc::new(GaussianInd), modulus: 2 };
    let odd = psi.odd(&d).unwrap();
    let (proj, corr) = parity_projection(&d, &odd);
    assert_eq!(proj.n_chords(), 1);
    assert_eq!(corr.get(2), Some(0));
    assert_eq!(eval("induced", &d), vec![IndexValue::Bullet, IndexValue::Bullet, IndexValue::Int(0)]);
    let t = entry("trefoil");
    assert_eq!(eval("induced", &t), eval("Ind", &t));
}

#[test]
fn intersection_index_of_3_1() {
    let d = k31();
    let want = vec![IndexValue::Poly(poly(&[])), IndexValue::Poly(poly(&[])), IndexValue::Poly(poly(&[(1, -1)]))];
    assert_eq!(eval("intersection", &d), want);
}

#[test]
fn vkp_of_3_1() {
    let d = k31();
    assert_eq!(eval("vkp", &d), vec![IndexValue::Pair(1, 0), IndexValue::Pair(-1, 0), IndexValue::Pair(-2, 0)]);
    let kink = entry("kink_pos");
    assert_eq!(vkp_index(&kink, 0, 1).unwrap(), (gaussian_ind(&kink).unwrap()[0], 0));
}

#[test]
fn wriggle_of_smoothings_is_n() {
    let d = k31();
    let n = gaussian_n(&d).unwrap();
    for v in d.chords() {
        let (s, _, _) = d.oriented_smoothing(v).unwrap();
        assert_eq!(wriggle(&s).unwrap(), n[v], "crossing {}", v + 1);
    }
    assert_eq!(wriggle(&entry("unlink")).unwrap(), 0);
}

#[test]
fn sign_reversal_negates_the_wriggle() {
    let d = entry("virtual_hopf");
    let w = wriggle(&d).unwrap();
    assert_ne!(w, 0);
    let mirrored: GaussDiagram = "c: O1- ; c: U1-".parse().unwrap();
    assert_eq!(wriggle(&mirrored).unwrap(), -w);
    // a crossing change also swaps the strands, which keeps W
    assert_eq!(wriggle(&d.crossing_change(0).unwrap()).unwrap(), w);
    assert_eq!(wriggle(&entry("hopf_neg")).unwrap(), -wriggle(&entry("hopf_pos")).unwrap());
}

#[test]
fn kink_smoothing_is_an_unlink() {
    let (s, fp) = smoothing_fingerprint(&entry("kink_pos"), 0, SmoothingKind::Oriented).unwrap();
    assert_eq!(s.n_components(), 2);
    assert_eq!(s.n_chords(), 0);
    let unlink = entry("unlink").with_flavor(Flavor::Flat);
    assert_eq!(fp, fingerprint(&unlink).unwrap());
}

struct ConstantOne;

impl IndexEvaluator for ConstantOne {
    fn name(&self) -> String {
        "one".into()
    }
    fn signed(&self) -> bool {
        true
    }
    fn applies(&self, _: &GaussDiagram) -> bool {
        true
    }
    fn eval_all(&self, d: &GaussDiagram) -> chordal::Result<Vec<IndexValue>> {
        Ok(d.chords().map(|_| IndexValue::Int(1)).collect())
    }
}

#[test]
fn constant_parity_fails_on_kinks() {
    assert!(check_oriented_parity(&ConstantOne, &[entry("kink_pos")]).is_err());
    assert!(check_oriented_parity(&GaussianN, &[entry("kink_pos"), k31()]).is_ok());
}

#[test]
fn registry_covers_every_name() {
    for name in INDEX_NAMES {
        let e = evaluator_by_name(name).unwrap();
        assert!(!e.name().is_empty());
    }
    assert!(evaluator_by_name("nope").is_none());
}

fn virtual_knots() -> Vec<GaussDiagram> {
    Catalog::builtin()
        .iter()
        .map(|(_, d)| d.clone())
        .filter(|d| d.flavor() == Flavor::Virtual && d.n_components() == 1)
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ind_is_sign_times_n_along_walks(k in 0usize..8, seed in any::<u64>()) {
        let knots = virtual_knots();
        let d = &knots[k % knots.len()];
        for step in random_walk(d, 60, seed, 9) {
            let e = &step.diagram;
            let ind = gaussian_ind(e).unwrap();
            let n = gaussian_n(e).unwrap();
            for v in e.chords() {
                prop_assert_eq!(ind[v], e.raw_sign(v) as i64 * n[v]);
            }
        }
    }

    #[test]
    fn coloring_counts_are_invariant(k in 0usize..8, seed in any::<u64>()) {
        let knots = virtual_knots();
        let d = &knots[k % knots.len()];
        for b in [FiniteBiquandle::dihedral(3), FiniteBiquandle::linear(5, 3, 4, 2, 0)] {
            let count = colorings(d, &b).unwrap().len();
            for step in random_walk(d, 40, seed, 8) {
                prop_assert_eq!(colorings(&step.diagram, &b).unwrap().len(), count);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn short_fuzz_runs_pass(k in 0usize..40, seed in any::<u64>()) {
        let catalog = Catalog::builtin();
        let (name, d) = catalog.iter().nth(k % catalog.entries.len()).unwrap();
        let r = fuzz_walk(d, 25, seed, 9, &full_config()).unwrap();
        prop_assert!(r.passed(), "{}: {:?}", name, r.violations);
    }
}
