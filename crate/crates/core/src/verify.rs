use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use std::sync::Arc;

use crate::biquandle::{colorings, BiquandleIndex, FiniteBiquandle};
use crate::error::Result;
use crate::gauss::{Flavor, GaussDiagram};
use crate::indices::{
    all_evaluators, check_oriented_parity, cheng_f, evaluator_by_name, gaussian_ind, gaussian_n, loop_set, lk_polynomial, turaev_u, Evaluator,
    IndexPolynomial, IndexValue,
};
use crate::moves::{apply_move, i2_pairs, random_walk, wrap, BasedDiagram, MoveInstance};
use crate::search::{bounded_bfs, canonical_key, replay, SearchBudget, SearchPath};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub check: String,
    pub index: String,
    pub step: usize,
    pub detail: String,
    /// Moves from the start diagram reproducing the violation.
    pub moves: Vec<MoveInstance>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct FuzzReport {
    pub start: String,
    pub steps: usize,
    pub checks: BTreeMap<String, usize>,
    pub violations: Vec<Violation>,
}

impl FuzzReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    fn count(&mut self, key: &str) {
        *self.checks.entry(key.to_string()).or_insert(0) += 1;
    }
}

/// What a fuzz run checks besides (I0) and (I2)/(I2+).
#[derive(Clone)]
pub struct FuzzConfig {
    pub evaluators: Vec<Evaluator>,
    /// Evaluators whose linking polynomial must stay constant.
    pub lk_indices: Vec<Evaluator>,
    /// Oriented parities checked for (P0) and (P3+).
    pub parities: Vec<Evaluator>,
    /// Extra invariants of whole diagrams that must stay constant.
    pub invariants: Vec<(String, fn(&GaussDiagram) -> Option<String>)>,
}

fn poly_f(d: &GaussDiagram) -> Option<String> {
    (d.flavor() == Flavor::Virtual && d.n_components() == 1).then(|| cheng_f(d).ok().map(|p| p.to_string()))?
}

fn poly_u(d: &GaussDiagram) -> Option<String> {
    (d.flavor() != Flavor::Free && d.n_components() == 1).then(|| turaev_u(d).ok().map(|p| p.to_string()))?
}

fn col_count(d: &GaussDiagram, b: &FiniteBiquandle) -> Option<String> {
    (d.flavor() == Flavor::Virtual).then(|| colorings(d, b).ok().map(|c| c.len().to_string()))?
}

fn col_dihedral(d: &GaussDiagram) -> Option<String> {
    col_count(d, &FiniteBiquandle::dihedral(3))
}

fn col_linear(d: &GaussDiagram) -> Option<String> {
    col_count(d, &FiniteBiquandle::linear(5, 2, 0, 3, 4))
}

pub fn standard_invariants() -> Vec<(String, fn(&GaussDiagram) -> Option<String>)> {
    vec![
        ("f".to_string(), poly_f as fn(&GaussDiagram) -> Option<String>),
        ("u".to_string(), poly_u),
        ("col(dihedral 3)".to_string(), col_dihedral),
        ("col(linear 5)".to_string(), col_linear),
    ]
}

/// Every registered evaluator plus biquandle indices, all of them checked for linking
/// invariance, with n, hp, n' and n'' as oriented parities.
pub fn full_config() -> FuzzConfig {
    let mut evaluators = all_evaluators();
    evaluators.push(Arc::new(BiquandleIndex::new("dihedral 3", FiniteBiquandle::dihedral(3))));
    evaluators.push(Arc::new(BiquandleIndex::new("linear 5", FiniteBiquandle::linear(5, 2, 0, 3, 4))));
    let parities = ["n", "hp", "nprime", "nsecond"].iter().map(|n| evaluator_by_name(n).unwrap()).collect();
    let lk_indices = evaluators.iter().filter(|e| e.transported()).cloned().collect();
    FuzzConfig { lk_indices, evaluators, parities, invariants: standard_invariants() }
}

/// Runs a seeded random walk and checks every configured property along it.
pub fn fuzz_walk(start: &GaussDiagram, steps: usize, seed: u64, cap: usize, cfg: &FuzzConfig) -> Result<FuzzReport> {
    let walk = random_walk(start, steps, seed, cap);
    let moves: Vec<MoveInstance> = walk.iter().map(|s| s.mv.clone()).collect();
    let mut report = FuzzReport { start: start.to_string(), steps: walk.len(), ..Default::default() };
    let mut diagrams = vec![start.clone()];
    diagrams.extend(walk.iter().map(|s| s.diagram.clone()));

    let active: Vec<&Evaluator> = cfg.evaluators.iter().filter(|e| e.applies(start)).collect();
    let lk_active: Vec<(&Evaluator, Vec<IndexValue>)> = cfg
        .lk_indices
        .iter()
        .filter(|e| e.applies(start))
        .map(|e| loop_set(e.as_ref(), start).map(|l| (e, l)))
        .collect::<Result<_>>()?;
    let mut prev_vals: Vec<Option<Vec<IndexValue>>> = vec![None; active.len()];
    let mut lk_first: Vec<Option<IndexPolynomial>> = vec![None; lk_active.len()];
    let mut inv_first: Vec<Option<Option<String>>> = vec![None; cfg.invariants.len()];

    for (i, d) in diagrams.iter().enumerate() {
        let fail = |report: &mut FuzzReport, check: &str, index: String, detail: String| {
            report.violations.push(Violation {
                check: check.to_string(),
                index,
                step: i,
                detail,
                moves: moves[..i].to_vec(),
            });
        };
        if d.flavor() == Flavor::Virtual && d.n_components() == 1 {
            report.count("Ind=sgn*n");
            let ind = gaussian_ind(d)?;
            let n = gaussian_n(d)?;
            for v in d.chords() {
                if ind[v] != d.raw_sign(v) as i64 * n[v] {
                    fail(&mut report, "Ind=sgn*n", "Ind".into(), format!("crossing {} of {d}", v + 1));
                }
            }
        }
        let pairs = i2_pairs(d);
        for (k, e) in active.iter().enumerate() {
            let vals = e.eval_all(d)?;
            if i > 0 && e.transported() {
                report.count("I0");
                let corr = &walk[i - 1].corr;
                let prev = prev_vals[k].as_ref().unwrap();
                for (v, pv) in prev.iter().enumerate() {
                    if let Some(w) = corr.get(v) {
                        if vals[w] != *pv {
                            fail(&mut report, "I0", e.name(), format!("{} -> {} at crossing {} of {d}", pv, vals[w], w + 1));
                        }
                    }
                }
            }
            for &(a, b) in &pairs {
                let (check, ok) = if e.signed() {
                    ("I2+", vals[b] == e.involution(&vals[a]))
                } else {
                    ("I2", vals[b] == vals[a])
                };
                report.count(check);
                if !ok {
                    fail(&mut report, check, e.name(), format!("{} vs {} at ({}, {}) of {d}", vals[a], vals[b], a + 1, b + 1));
                }
            }
            prev_vals[k] = Some(vals);
        }
        for (k, (e, loops)) in lk_active.iter().enumerate() {
            let p = lk_polynomial(d, e.as_ref(), loops)?;
            report.count("lk");
            match &lk_first[k] {
                None => lk_first[k] = Some(p),
                Some(p0) if *p0 != p => {
                    fail(&mut report, "lk", e.name(), format!("{p0} -> {p} at {d}"));
                }
                _ => {}
            }
        }
        for (k, (name, f)) in cfg.invariants.iter().enumerate() {
            let x = f(d);
            report.count("invariant");
            match &inv_first[k] {
                None => inv_first[k] = Some(x),
                Some(x0) if *x0 != x => {
                    fail(&mut report, "invariant", name.clone(), format!("{x0:?} -> {x:?} at {d}"));
                }
                _ => {}
            }
        }
        for p in &cfg.parities {
            report.count("P0/P3+");
            if let Err(err) = check_oriented_parity(p.as_ref(), std::slice::from_ref(d)) {
                fail(&mut report, "P0/P3+", p.name(), err.to_string());
            }
        }
        if !report.violations.is_empty() {
            let last = report.violations.len() - 1;
            let reproduction = minimize(start, &report.violations[last].moves, |d| violates(d, cfg));
            for v in report.violations.iter_mut() {
                v.moves = reproduction.clone();
            }
            break;
        }
    }
    Ok(report)
}

fn violates(d: &GaussDiagram, cfg: &FuzzConfig) -> bool {
    let pairs = i2_pairs(d);
    for e in cfg.evaluators.iter().filter(|e| e.applies(d)) {
        let Ok(vals) = e.eval_all(d) else { return true };
        for &(a, b) in &pairs {
            let ok = if e.signed() { vals[b] == e.involution(&vals[a]) } else { vals[b] == vals[a] };
            if !ok {
                return true;
            }
        }
    }
    cfg.parities.iter().any(|p| check_oriented_parity(p.as_ref(), std::slice::from_ref(d)).is_err())
}

/// Greedily drops moves while the replayed sequence still applies and still ends in a
/// diagram violating a local check. Returns the input when nothing can be dropped.
pub fn minimize(start: &GaussDiagram, moves: &[MoveInstance], bad: impl Fn(&GaussDiagram) -> bool) -> Vec<MoveInstance> {
    let replay = |ms: &[MoveInstance]| -> Option<GaussDiagram> {
        let mut d = start.clone();
        for m in ms {
            d = apply_move(&d, m).ok()?.0;
        }
        Some(d)
    };
    if !replay(moves).is_some_and(|d| bad(&d)) {
        return moves.to_vec();
    }
    let mut cur = moves.to_vec();
    let mut i = 0;
    while i < cur.len() {
        let mut shorter = cur.clone();
        shorter.remove(i);
        if replay(&shorter).is_some_and(|d| bad(&d)) {
            cur = shorter;
        } else {
            i += 1;
        }
    }
    cur
}

/// A found path between two based diagrams related by a wrapping property.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WrapCertificate {
    pub property: String,
    pub diagram: String,
    pub mark: usize,
    pub other: usize,
    pub n: i64,
    pub m: i64,
    pub path: SearchPath,
}

/// wrap((D, v), n + 2) is equivalent to wrap((D, v), n).
pub fn certify_order_two(d: &GaussDiagram, v: usize, n: i64, budget: SearchBudget) -> Result<WrapCertificate> {
    let b = BasedDiagram::new(d.clone(), v)?;
    let from = wrap(&b, n)?;
    let to = wrap(&b, n + 2)?;
    let path = bounded_bfs(&from, &to, budget)?;
    Ok(WrapCertificate { property: "order two".into(), diagram: d.to_string(), mark: v, other: v, n, m: n + 2, path })
}

/// For a second-move pair (v1, v2): wrap((D, v1), n) is equivalent to wrap((D, v2), n - 1)
/// or wrap((D, v2), n + 1). Both are tried, the one suggested by the sign of v1 first.
pub fn certify_swap(d: &GaussDiagram, v1: usize, v2: usize, n: i64, budget: SearchBudget) -> Result<WrapCertificate> {
    let from = wrap(&BasedDiagram::new(d.clone(), v1)?, n)?;
    let s = if d.flavor() == Flavor::Virtual { d.raw_sign(v1) as i64 } else { -1 };
    let mut last = None;
    for m in [n - s, n + s] {
        let to = wrap(&BasedDiagram::new(d.clone(), v2)?, m)?;
        match bounded_bfs(&from, &to, budget) {
            Ok(path) => {
                return Ok(WrapCertificate { property: "swap".into(), diagram: d.to_string(), mark: v1, other: v2, n, m, path })
            }
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap())
}

/// A path moving crossing `from` of a diagram onto crossing `to` of the same diagram.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Substitution {
    pub diagram: String,
    pub from: usize,
    pub to: usize,
    pub same_sign: bool,
    pub path: SearchPath,
    /// Replaying the path from (D, from) ends at a based diagram isomorphic to (D, to).
    pub replay_ok: bool,
}

pub fn substitute(d: &GaussDiagram, v: usize, w: usize, budget: SearchBudget) -> Result<Substitution> {
    let from = BasedDiagram::new(d.clone(), v)?;
    let to = BasedDiagram::new(d.clone(), w)?;
    let same_sign = d.flavor() != Flavor::Virtual || d.raw_sign(v) == d.raw_sign(w);
    let path = bounded_bfs(&from, &to, budget)?;
    let end = replay(&from, &path.moves)?;
    let replay_ok = canonical_key(&end.diagram, Some(end.mark)).0 == canonical_key(&to.diagram, Some(to.mark)).0;
    Ok(Substitution { diagram: d.to_string(), from: v, to: w, same_sign, path, replay_ok })
}

/// Deviations from the classical indistinguishability statements on one planar diagram:
/// every evaluator must be constant on crossings of equal sign, and Ind, u, hp and the
/// derived parities must vanish.
pub fn classical_exceptions(d: &GaussDiagram, evaluators: &[Evaluator]) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for e in evaluators.iter().filter(|e| e.applies(d)) {
        let vals = e.eval_all(d)?;
        let mut by_sign: BTreeMap<i8, &IndexValue> = BTreeMap::new();
        for v in d.chords() {
            let s = if d.flavor() == Flavor::Virtual { d.raw_sign(v) } else { 1 };
            match by_sign.get(&s) {
                Some(x) if **x != vals[v] => {
                    out.push(format!("{}: {} vs {} on sign {s} in {d}", e.name(), x, vals[v]));
                    break;
                }
                Some(_) => {}
                None => {
                    by_sign.insert(s, &vals[v]);
                }
            }
        }
        if ["Ind", "hp", "n'", "n''", "n"].contains(&e.name().as_str()) && vals.iter().any(|x| !x.is_zero()) {
            out.push(format!("{} is not identically zero on {d}", e.name()));
        }
    }
    if d.n_components() == 1 && !turaev_u(d)?.is_zero() {
        out.push(format!("u is not zero on {d}"));
    }
    Ok(out)
}
