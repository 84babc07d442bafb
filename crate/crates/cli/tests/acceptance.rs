use std::time::{Duration, Instant};

use chordal::based_matrix::{based_matrix_of, random_extension, random_primitive, LaurentPoly};
use chordal::biquandle::{biquandle_index, colorings, shift_class_difference, FiniteBiquandle};
use chordal::catalog::{random_planar_knot, Catalog};
use chordal::indices::{cheng_f, derived_parity, evaluator_by_name, gaussian_ind, gaussian_n, secondary_index, turaev_u, IndexValue};
use chordal::moves::{i2_pairs, random_walk};
use chordal::search::SearchBudget;
use chordal::verify::{certify_order_two, certify_swap, classical_exceptions, full_config};
use chordal::{Flavor, GaussDiagram};
use chordal_cli::{cmd_fuzz, cmd_substitute, FuzzOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const K31: &str = "c: O1- U2+ U3- O2+ U1- O3-";
const TREFOIL_KINK: &str = "c: O1+ U1+ O2+ U3+ O4+ U2+ O3+ U4+";

struct Outcome {
    passed: bool,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Outcome {
        Outcome { passed: true, notes: Vec::new() }
    }

    fn check(&mut self, ok: bool, note: impl Into<String>) {
        if !ok {
            self.passed = false;
            self.notes.push(note.into());
        }
    }

    fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }
}

fn k31() -> GaussDiagram {
    K31.parse().unwrap()
}

fn poly(terms: &[(i64, i64)]) -> LaurentPoly {
    let mut p = LaurentPoly::default();
    for &(k, c) in terms {
        p.add_term(k, c);
    }
    p
}

fn c1_gaussian_index() -> Outcome {
    let mut o = Outcome::new();
    let t = Instant::now();
    let d = k31();
    let n = gaussian_n(&d).unwrap();
    let ind = gaussian_ind(&d).unwrap();
    let sign: Vec<i64> = d.chords().map(|v| d.raw_sign(v) as i64).collect();
    o.check(n == [-1, -1, 2], format!("n = {n:?}"));
    o.check(sign == [-1, 1, -1], format!("sign = {sign:?}"));
    let want: Vec<i64> = sign.iter().zip(&n).map(|(s, x)| s * x).collect();
    o.check(ind == want, format!("Ind = {ind:?}, sign*n = {want:?}"));
    o.check(t.elapsed() < Duration::from_secs(1), format!("took {:?}", t.elapsed()));
    o
}

fn c2_based_matrices() -> Outcome {
    let mut o = Outcome::new();
    let printed = [vec![0, -1, -1, 2], vec![1, 0, 0, 2], vec![1, 0, 0, 1], vec![-2, -2, -2, 0]];
    let eps = [-1, 1, -1];
    let d = k31();
    for v in d.chords() {
        let t = based_matrix_of(&d, Some(v), false).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                o.check(t.b[i][j] == printed[i][j], format!("crossing {}: b({i},{j}) = {}, printed {}", v + 1, t.b[i][j], printed[i][j]));
            }
        }
        o.check(t.eps == eps[v], format!("crossing {}: eps = {}", v + 1, t.eps));
        o.check(t.d == Some(v + 1), format!("crossing {}: d at {:?}", v + 1, t.d));
        o.check(t.find_special().is_empty(), format!("crossing {}: not primitive", v + 1));
    }
    o
}

fn c3_secondary() -> Outcome {
    let mut o = Outcome::new();
    let d = k31();
    let s = secondary_index(&d, &gaussian_n(&d).unwrap());
    o.check(s[0].is_zero(), format!("sigma(1) = {}", s[0]));
    o.check(s[1].is_zero(), format!("sigma(2) = {}", s[1]));
    let ok3 = s[2].modulus == 2 && s[2].terms.iter().map(|(&k, &c)| (k, c)).eq([(1, 2)]);
    o.check(ok3, format!("sigma(3) = {} (modulus {})", s[2], s[2].modulus));
    o
}

fn c4_derived_parities() -> Outcome {
    let mut o = Outcome::new();
    let d = k31();
    let want = [[-1i64, 1, -1], [-1, 0, 1]];
    for (k, w) in want.iter().enumerate() {
        let (p, m) = derived_parity(&d, k + 1).unwrap();
        o.check(m == 4, format!("order {}: modulus {m}", k + 1));
        let got: Vec<i64> = p.iter().map(|x| x.rem_euclid(4)).collect();
        let exp: Vec<i64> = w.iter().map(|x| x.rem_euclid(4)).collect();
        o.check(got == exp, format!("order {}: {got:?} vs {exp:?} mod 4", k + 1));
    }
    o
}

fn c5_induced() -> Outcome {
    let mut o = Outcome::new();
    let vals = evaluator_by_name("induced").unwrap().eval_all(&k31()).unwrap();
    o.check(vals == [IndexValue::Bullet, IndexValue::Bullet, IndexValue::Int(0)], format!("{vals:?}"));
    o
}

fn c6_shift_biquandle() -> Outcome {
    let mut o = Outcome::new();
    let d = k31();
    let b = FiniteBiquandle::shift(6);
    let cols = colorings(&d, &b).unwrap();
    o.check(cols.len() == 6, format!("{} colorings", cols.len()));
    let idx = biquandle_index(&d, &b).unwrap();
    for (v, want) in [5i64, 5, 2].iter().enumerate() {
        let got = shift_class_difference(&idx[v], 6);
        o.check(got == Some(vec![(*want, 6)]), format!("crossing {}: {:?}", v + 1, got));
    }
    o
}

fn c7_polynomials() -> Outcome {
    let mut o = Outcome::new();
    let d = k31();
    // f = sum over crossings with nonzero index of sgn(v) t^{Ind(v)}:
    // -t^1 + t^-1 - t^-2 from sgn = (-,+,-), Ind = (1,-1,-2)
    let f_fixture = poly(&[(1, -1), (-1, 1), (-2, -1)]);
    // u = sum over n(v) != 0 of sgn(n(v)) t^|n(v)|: -t - t + t^2 from n = (-1,-1,2)
    let u_fixture = poly(&[(2, 1), (1, -2)]);
    let f = cheng_f(&d).unwrap();
    o.check(f == f_fixture, format!("f = {f}"));
    let flat = d.with_flavor(Flavor::Flat);
    let u = turaev_u(&flat).unwrap();
    o.check(u == u_fixture, format!("u = {u}"));
    o
}

fn c8_fuzz(catalog: &Catalog) -> Outcome {
    let mut o = Outcome::new();
    let opts = FuzzOptions { steps: 1000, seed: 42, cap: 12, inject_fault: false };
    let r = cmd_fuzz(catalog, &[], &opts).unwrap();
    for entry in r.json.as_array().unwrap() {
        let ok = entry["passed"].as_bool().unwrap();
        o.check(ok, format!("{}: {}", entry["name"], entry["violations"]));
    }
    let checks: u64 = r.json.as_array().unwrap().iter().flat_map(|e| e["checks"].as_object().unwrap().values()).map(|x| x.as_u64().unwrap()).sum();
    o.note(format!("{} diagrams, {checks} checks", r.json.as_array().unwrap().len()));
    o
}

fn c9_classical() -> Outcome {
    let mut o = Outcome::new();
    let evaluators = full_config().evaluators;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut tested = 0;
    while tested < 120 {
        let d = random_planar_knot(&mut rng, 8);
        if d.n_chords() == 0 || d.n_chords() > 8 {
            continue;
        }
        tested += 1;
        let ex = classical_exceptions(&d, &evaluators).unwrap();
        o.check(ex.is_empty(), format!("{d}: {ex:?}"));
        o.check(chordal::moves::genus(&d) == 0, format!("{d} is not planar"));
    }
    o.note(format!("{tested} planar knots"));
    o
}

fn ind_matches(d: &GaussDiagram) -> bool {
    let ind = gaussian_ind(d).unwrap();
    let n = gaussian_n(d).unwrap();
    d.chords().all(|v| ind[v] == d.raw_sign(v) as i64 * n[v])
}

fn c10_cross_oracle(catalog: &Catalog) -> Outcome {
    let mut o = Outcome::new();
    let mut count = 0;
    for (name, d) in catalog.iter().filter(|(_, d)| d.flavor() == Flavor::Virtual && d.n_components() == 1) {
        o.check(ind_matches(d), format!("{name}"));
        count += 1;
        for step in random_walk(d, 300, 10, 10) {
            o.check(ind_matches(&step.diagram), format!("walk from {name}: {}", step.diagram));
            count += 1;
        }
    }
    o.note(format!("{count} diagrams"));
    o
}

fn c11_confluence() -> Outcome {
    let mut o = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..500 {
        let k = rng.gen_range(0..=5);
        let graded = rng.gen();
        let core = random_primitive(&mut rng, k, k > 0, graded);
        let count = rng.gen_range(0..=6);
        let ext = random_extension(&mut rng, &core, count);
        let red = ext.reduce_primitive_random(&mut rng);
        o.check(red.canonical() == core.canonical(), format!("trial {trial}: {:?}", core));
    }
    o
}

fn c12_wrapping(catalog: &Catalog) -> Outcome {
    let mut o = Outcome::new();
    let mut budget = SearchBudget::new(8, 10);
    budget.max_states = Some(10_000_000);
    let mut certified = 0;
    for (name, d) in catalog.iter().filter(|(_, d)| d.n_chords() <= 4) {
        if d.flavor() != Flavor::Free {
            for v in d.chords() {
                match certify_order_two(d, v, 0, budget) {
                    Ok(_) => certified += 1,
                    Err(e) => {
                        o.check(false, format!("{name}: order two at crossing {}: {e}", v + 1));
                        let mut wider = budget;
                        wider.max_crossings = 9;
                        if let Ok(c) = certify_order_two(d, v, 0, wider) {
                            o.note(format!("{name}: crossing {} certified with crossing cap 9 at depth {}", v + 1, c.path.depth));
                        }
                    }
                }
            }
        }
        for (v1, v2) in i2_pairs(d) {
            for (a, b) in [(v1, v2), (v2, v1)] {
                match certify_swap(d, a, b, 0, budget) {
                    Ok(_) => certified += 1,
                    Err(e) => o.check(false, format!("{name}: swap {} -> {}: {e}", a + 1, b + 1)),
                }
            }
        }
    }
    o.note(format!("{certified} certificates"));
    o
}

fn c13_substitution(catalog: &Catalog) -> Outcome {
    let mut o = Outcome::new();
    let mut budget = SearchBudget::new(8, 14);
    budget.planar = true;
    for to in 2..=4 {
        let r = cmd_substitute(catalog, TREFOIL_KINK, 1, to, budget).unwrap();
        let found = r.json["found"].as_bool().unwrap();
        o.check(found, format!("kink 1 -> {to}: budget exhausted"));
        if found {
            o.check(r.json["replay_ok"].as_bool().unwrap(), format!("kink 1 -> {to}: replay mismatch"));
            o.note(format!("1 -> {to}: depth {}", r.json["path"]["depth"]));
        }
    }
    o
}

fn main() {
    let catalog = Catalog::builtin();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("knot 3.1 Gaussian index n and Ind = sign*n", Box::new(c1_gaussian_index)),
        ("knot 3.1 based matrices against the printed ones", Box::new(c2_based_matrices)),
        ("knot 3.1 secondary index (0, 0, 2[1])", Box::new(c3_secondary)),
        ("knot 3.1 derived parities n' and n'' in Z4", Box::new(c4_derived_parities)),
        ("knot 3.1 induced index (•, •, 0)", Box::new(c5_induced)),
        ("knot 3.1 shift biquandle Z6", Box::new(c6_shift_biquandle)),
        ("polynomial fixtures f and u", Box::new(c7_polynomials)),
        ("axiom fuzzing, 1000 steps, cap 12", Box::new(|| c8_fuzz(&catalog))),
        ("classical indistinguishability on random planar knots", Box::new(c9_classical)),
        ("Ind = sign*n on catalog and walk diagrams", Box::new(|| c10_cross_oracle(&catalog))),
        ("primitive reduction confluence, 500 trials", Box::new(c11_confluence)),
        ("wrapping order two and swap, depth 10, cap 8", Box::new(|| c12_wrapping(&catalog))),
        ("substitution of a kink crossing onto trefoil crossings", Box::new(|| c13_substitution(&catalog))),
    ];
    let mut failed = Vec::new();
    for (i, (title, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = run();
        let status = if o.passed { "PASS" } else { "FAIL" };
        println!("criterion {:>2}: {status}  {title}  ({:.1?})", i + 1, t.elapsed());
        for n in o.notes.iter().take(12) {
            println!("    {n}");
        }
        if o.notes.len() > 12 {
            println!("    ... {} more", o.notes.len() - 12);
        }
        if !o.passed {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 13 criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
