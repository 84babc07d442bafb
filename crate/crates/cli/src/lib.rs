use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use chordal::based_matrix::{based_matrix_of, BasedMatrix};
use chordal::biquandle::{colorings, BiquandleIndex, FiniteBiquandle};
use chordal::catalog::Catalog;
use chordal::indices::{cheng_f, evaluator_by_name, turaev_u, Evaluator, IndexEvaluator, IndexValue, INDEX_NAMES};
use chordal::moves::{genus, i2_pairs, wrap, BasedDiagram};
use chordal::search::{bounded_bfs, SearchBudget, SearchPath};
use chordal::verify::{certify_swap, classical_exceptions, full_config, fuzz_walk, substitute, FuzzConfig};
use chordal::{Flavor, GaussDiagram};
use serde_json::{json, Value};

/// Crossing columns of a compute report when no index is named.
pub const DEFAULT_INDICES: &[&str] = &["Ind", "n", "hp", "nprime", "nsecond", "secondary", "induced", "vkp"];

/// Bad input from the user: unknown names, malformed files, unusable arguments.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage<T>(msg: impl Into<String>) -> anyhow::Result<T> {
    Err(UsageError(msg.into()).into())
}

/// Result of one command: machine report, plain-text view, and whether every check passed.
pub struct Report {
    pub json: Value,
    pub text: String,
    pub passed: bool,
}

/// 0 when every check passed, 1 on a violation or failed search, 2 on bad input.
pub fn exit_code(result: &anyhow::Result<Report>) -> u8 {
    match result {
        Ok(r) if r.passed => 0,
        Ok(_) => 1,
        Err(_) => 2,
    }
}

pub fn load_catalog(path: Option<&Path>) -> anyhow::Result<Catalog> {
    match path {
        Some(p) => Catalog::load(p).or_else(|e| usage(e.to_string())),
        None => Ok(Catalog::builtin()),
    }
}

/// A catalog name, or an inline Gauss code (anything containing `:`).
pub fn resolve(catalog: &Catalog, knot: &str) -> anyhow::Result<(String, GaussDiagram)> {
    if let Some(d) = catalog.get(knot) {
        return Ok((knot.to_string(), d.clone()));
    }
    if knot.contains(':') {
        return match GaussDiagram::parse(knot) {
            Ok(d) => Ok((d.to_string(), d)),
            Err(e) => usage(format!("cannot parse `{knot}`: {e}")),
        };
    }
    usage(format!("unknown knot `{knot}`"))
}

fn crossing(d: &GaussDiagram, id: usize) -> anyhow::Result<usize> {
    if id == 0 || id > d.n_chords() {
        return usage(format!("crossing {id} does not exist (diagram has {})", d.n_chords()));
    }
    Ok(id - 1)
}

pub fn value_json(x: &IndexValue) -> Value {
    match x {
        IndexValue::Int(k) => json!(k),
        IndexValue::Mod { value, modulus } => json!({ "value": value, "modulus": modulus }),
        IndexValue::Pair(a, b) => json!([a, b]),
        other => json!(other.to_string()),
    }
}

fn matrix_json(t: &BasedMatrix) -> Value {
    json!({
        "labels": t.labels,
        "b": t.b,
        "d": t.d.map(|i| &t.labels[i]),
        "eps": t.eps,
        "grading": t.grading,
        "primitive": t.is_primitive(),
    })
}

fn index_list(names: &[String]) -> anyhow::Result<Vec<(String, Evaluator)>> {
    let names: Vec<String> = if names.iter().any(|n| n == "all") {
        INDEX_NAMES.iter().map(|s| s.to_string()).collect()
    } else if names.is_empty() {
        DEFAULT_INDICES.iter().map(|s| s.to_string()).collect()
    } else {
        names.to_vec()
    };
    names
        .into_iter()
        .map(|n| match evaluator_by_name(&n) {
            Some(e) => Ok((n, e)),
            None => usage(format!("unknown index `{n}`; known: {}", INDEX_NAMES.join(", "))),
        })
        .collect()
}

pub fn compute_one(name: &str, d: &GaussDiagram, evaluators: &[(String, Evaluator)], biquandle: Option<&FiniteBiquandle>) -> anyhow::Result<Value> {
    let virt = d.flavor() == Flavor::Virtual;
    let mut columns: Vec<(String, Option<Vec<IndexValue>>)> = Vec::new();
    for (n, e) in evaluators {
        let vals = if e.applies(d) { Some(e.eval_all(d)?) } else { None };
        columns.push((n.clone(), vals));
    }
    let mut extra = serde_json::Map::new();
    if let Some(b) = biquandle.filter(|_| virt) {
        let e = BiquandleIndex::new("file", b.clone());
        columns.push(("biquandle".into(), Some(e.eval_all(d)?)));
        extra.insert("colorings".into(), json!(colorings(d, b)?.len()));
    }
    let crossings: Vec<Value> = d
        .chords()
        .map(|v| {
            let mut c = serde_json::Map::new();
            c.insert("id".into(), json!(v + 1));
            c.insert("sign".into(), if virt { json!(d.raw_sign(v)) } else { Value::Null });
            for (n, vals) in &columns {
                c.insert(n.clone(), vals.as_ref().map_or(Value::Null, |vs| value_json(&vs[v])));
            }
            Value::Object(c)
        })
        .collect();
    let knot = d.n_components() == 1;
    let f = (virt && knot).then(|| cheng_f(d)).transpose()?;
    let u = (d.flavor() != Flavor::Free && knot).then(|| turaev_u(d)).transpose()?;
    let based_matrix = if knot && d.flavor() != Flavor::Free {
        let whole = based_matrix_of(d, None, false)?;
        let marked: Vec<Value> = d.chords().map(|v| based_matrix_of(d, Some(v), false).map(|t| matrix_json(&t))).collect::<Result<_, _>>()?;
        json!({ "diagram": matrix_json(&whole), "primitive": matrix_json(&whole.reduce_primitive()), "crossings": marked })
    } else {
        Value::Null
    };
    let mut out = json!({
        "name": name,
        "code": d.to_string(),
        "flavor": format!("{:?}", d.flavor()),
        "genus": genus(d),
        "crossings": crossings,
        "polynomials": { "f": f.map(|p| p.to_string()), "u": u.map(|p| p.to_string()) },
        "based_matrix": based_matrix,
    });
    out.as_object_mut().unwrap().extend(extra);
    Ok(out)
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::String(s) => s.clone(),
        Value::Object(o) if o.contains_key("modulus") => format!("{} mod {}", o["value"], o["modulus"]),
        Value::Array(a) => format!("({})", a.iter().map(cell).collect::<Vec<_>>().join(",")),
        other => other.to_string(),
    }
}

fn compute_text(r: &Value, columns: &[String]) -> String {
    let mut s = String::new();
    writeln!(s, "{}  [{}]  {}  genus {}", r["name"].as_str().unwrap(), r["flavor"].as_str().unwrap(), r["code"].as_str().unwrap(), r["genus"]).unwrap();
    let mut header = vec!["id".to_string(), "sign".to_string()];
    header.extend(columns.iter().cloned());
    let rows: Vec<Vec<String>> = r["crossings"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| header.iter().map(|h| cell(&c[h])).collect())
        .collect();
    let widths: Vec<usize> = (0..header.len())
        .map(|i| rows.iter().map(|row| row[i].chars().count()).chain([header[i].len()]).max().unwrap())
        .collect();
    let line = |cells: &[String]| -> String {
        cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect::<Vec<_>>().join("  ").trim_end().to_string()
    };
    if !rows.is_empty() {
        writeln!(s, "  {}", line(&header)).unwrap();
        for row in &rows {
            writeln!(s, "  {}", line(row)).unwrap();
        }
    }
    writeln!(s, "  f = {}", cell(&r["polynomials"]["f"])).unwrap();
    writeln!(s, "  u = {}", cell(&r["polynomials"]["u"])).unwrap();
    if let Some(k) = r.get("colorings") {
        writeln!(s, "  colorings = {k}").unwrap();
    }
    if let Some(ms) = r["based_matrix"]["crossings"].as_array() {
        for (i, m) in ms.iter().enumerate() {
            writeln!(s, "  based matrix at {} (d = {}, eps = {}):", i + 1, cell(&m["d"]), m["eps"]).unwrap();
            for row in m["b"].as_array().unwrap() {
                let cells: Vec<String> = row.as_array().unwrap().iter().map(|x| format!("{:>3}", x.to_string())).collect();
                writeln!(s, "    {}", cells.join(" ")).unwrap();
            }
        }
    }
    s
}

/// Index report for the named entries, every catalog entry when `knots` is empty.
pub fn cmd_compute(catalog: &Catalog, knots: &[String], indices: &[String], biquandle: Option<&FiniteBiquandle>) -> anyhow::Result<Report> {
    let evaluators = index_list(indices)?;
    let targets: Vec<(String, GaussDiagram)> = if knots.is_empty() {
        catalog.iter().map(|(n, d)| (n.clone(), d.clone())).collect()
    } else {
        knots.iter().map(|k| resolve(catalog, k)).collect::<anyhow::Result<_>>()?
    };
    let mut columns: Vec<String> = evaluators.iter().map(|(n, _)| n.clone()).collect();
    if biquandle.is_some() {
        columns.push("biquandle".into());
    }
    let mut reports = Vec::new();
    let mut text = String::new();
    for (name, d) in &targets {
        let r = compute_one(name, d, &evaluators, biquandle)?;
        text.push_str(&compute_text(&r, &columns));
        reports.push(r);
    }
    Ok(Report { json: Value::Array(reports), text, passed: true })
}

/// The sign index with its involution dropped: a fault for exercising the (I2+) check.
pub struct BrokenSign;

impl IndexEvaluator for BrokenSign {
    fn name(&self) -> String {
        "broken_sign".into()
    }
    fn signed(&self) -> bool {
        true
    }
    fn applies(&self, d: &GaussDiagram) -> bool {
        d.flavor() == Flavor::Virtual
    }
    fn eval_all(&self, d: &GaussDiagram) -> chordal::Result<Vec<IndexValue>> {
        Ok(d.chords().map(|v| IndexValue::Int(d.raw_sign(v) as i64)).collect())
    }
}

pub struct FuzzOptions {
    pub steps: usize,
    pub seed: u64,
    pub cap: usize,
    pub inject_fault: bool,
}

fn is_classical_knot(d: &GaussDiagram) -> bool {
    d.flavor() == Flavor::Virtual && d.is_knot() && d.components()[0].kind == chordal::Kind::Closed && genus(d) == 0
}

/// Seeded walks checking the index axioms, linking invariance and the diagram invariants;
/// classical entries are also checked for indistinguishability.
pub fn cmd_fuzz(catalog: &Catalog, knots: &[String], opts: &FuzzOptions) -> anyhow::Result<Report> {
    let mut cfg: FuzzConfig = full_config();
    if opts.inject_fault {
        cfg.evaluators.push(Arc::new(BrokenSign));
    }
    let targets: Vec<(String, GaussDiagram)> = if knots.is_empty() {
        catalog.iter().map(|(n, d)| (n.clone(), d.clone())).collect()
    } else {
        knots.iter().map(|k| resolve(catalog, k)).collect::<anyhow::Result<_>>()?
    };
    let mut out = Vec::new();
    let mut text = String::new();
    let mut passed = true;
    for (name, d) in &targets {
        let r = fuzz_walk(d, opts.steps, opts.seed, opts.cap, &cfg)?;
        let classical = if is_classical_knot(d) { classical_exceptions(d, &cfg.evaluators)? } else { Vec::new() };
        let ok = r.passed() && classical.is_empty();
        passed &= ok;
        let checks: usize = r.checks.values().sum();
        writeln!(text, "{name}: {} ({} steps, {checks} checks)", if ok { "pass" } else { "FAIL" }, r.steps).unwrap();
        for v in &r.violations {
            writeln!(text, "  {} violation of {} at step {}: {}", v.check, v.index, v.step, v.detail).unwrap();
            let moves: Vec<String> = v.moves.iter().map(|m| serde_json::to_string(m).unwrap()).collect();
            writeln!(text, "  reproduction ({} moves from {}):", moves.len(), r.start).unwrap();
            for m in moves {
                writeln!(text, "    {m}").unwrap();
            }
        }
        for e in &classical {
            writeln!(text, "  classical exception: {e}").unwrap();
        }
        out.push(json!({
            "name": name,
            "passed": ok,
            "steps": r.steps,
            "checks": r.checks,
            "violations": r.violations,
            "classical_exceptions": classical,
        }));
    }
    Ok(Report { json: Value::Array(out), text, passed })
}

pub fn path_json(p: &SearchPath) -> Value {
    json!({ "depth": p.depth, "states": p.states, "moves": p.moves })
}

fn path_text(p: &SearchPath) -> String {
    let mut s = format!("  depth {}, {} states, {} moves\n", p.depth, p.states, p.moves.len());
    s.push_str(&p.to_json_lines().lines().map(|l| format!("    {l}\n")).collect::<String>());
    s
}

/// Searches for a path carrying crossing `from` of the diagram onto crossing `to`.
pub fn cmd_substitute(catalog: &Catalog, knot: &str, from: usize, to: usize, budget: SearchBudget) -> anyhow::Result<Report> {
    let (name, d) = resolve(catalog, knot)?;
    let (v, w) = (crossing(&d, from)?, crossing(&d, to)?);
    let mut warning = None;
    if d.flavor() == Flavor::Virtual && d.raw_sign(v) != d.raw_sign(w) {
        warning = Some(format!("crossings {from} and {to} have opposite signs; no path is expected"));
    }
    let mut text = String::new();
    if let Some(msg) = &warning {
        writeln!(text, "warning: {msg}").unwrap();
    }
    match substitute(&d, v, w, budget) {
        Ok(s) => {
            writeln!(text, "{name}: crossing {from} -> crossing {to}: found, replay {}", if s.replay_ok { "verified" } else { "MISMATCH" }).unwrap();
            text.push_str(&path_text(&s.path));
            let json = json!({
                "name": name, "code": d.to_string(), "from": from, "to": to, "found": true,
                "replay_ok": s.replay_ok, "warning": warning, "path": path_json(&s.path),
            });
            Ok(Report { json, text, passed: s.replay_ok })
        }
        Err(chordal::Error::BudgetExhausted { states }) => {
            writeln!(text, "{name}: crossing {from} -> crossing {to}: budget exhausted after {states} states").unwrap();
            let json = json!({
                "name": name, "code": d.to_string(), "from": from, "to": to, "found": false,
                "states": states, "warning": warning,
            });
            Ok(Report { json, text, passed: false })
        }
        Err(e) => Err(e.into()),
    }
}

/// Certifies wrap(D, v, n) ~ wrap(D, v, n mod 2), or with `swap_with` the wrapping swap
/// between a second-move pair.
pub fn cmd_wrapcheck(catalog: &Catalog, knot: &str, id: usize, n: i64, swap_with: Option<usize>, budget: SearchBudget) -> anyhow::Result<Report> {
    let (name, d) = resolve(catalog, knot)?;
    let v = crossing(&d, id)?;
    let result = match swap_with {
        Some(other) => {
            let w = crossing(&d, other)?;
            if !i2_pairs(&d).iter().any(|&(a, b)| (a, b) == (v, w) || (a, b) == (w, v)) {
                return usage(format!("crossings {id} and {other} do not form a second-move pair"));
            }
            certify_swap(&d, v, w, n, budget).map(|c| ("swap", other, c.m, c.path))
        }
        None => {
            let m = n.rem_euclid(2);
            let b = BasedDiagram::new(d.clone(), v)?;
            if m == n {
                Ok(("order two", id, m, SearchPath { moves: Vec::new(), depth: 0, states: 0 }))
            } else {
                bounded_bfs(&wrap(&b, n)?, &wrap(&b, m)?, budget).map(|p| ("order two", id, m, p))
            }
        }
    };
    match result {
        Ok((property, other, m, path)) => {
            let mut text = format!("{name}: {property}: wrap({id}, {n}) ~ wrap({other}, {m}): certified\n");
            text.push_str(&path_text(&path));
            let json = json!({
                "name": name, "property": property, "crossing": id, "n": n, "other": other, "m": m,
                "certified": true, "path": path_json(&path),
            });
            Ok(Report { json, text, passed: true })
        }
        Err(chordal::Error::BudgetExhausted { states }) => {
            let property = if swap_with.is_some() { "swap" } else { "order two" };
            let text = format!("{name}: {property} at crossing {id}, n = {n}: budget exhausted after {states} states\n");
            let json = json!({ "name": name, "property": property, "crossing": id, "n": n, "certified": false, "states": states });
            Ok(Report { json, text, passed: false })
        }
        Err(e) => Err(e.into()),
    }
}

fn matrix_text(title: &str, t: &BasedMatrix) -> String {
    let mut s = format!("{title}: labels {:?}, d = {}, eps = {}\n", t.labels, t.d.map_or("-".to_string(), |i| t.labels[i].clone()), t.eps);
    if let Some(g) = &t.grading {
        writeln!(s, "  grading {:?}", &g[1..]).unwrap();
    }
    for row in &t.b {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:>3}")).collect();
        writeln!(s, "  {}", cells.join(" ")).unwrap();
    }
    s
}

pub enum MatrixSource<'a> {
    File(&'a Path),
    Knot { knot: &'a str, crossing: Option<usize>, graded: bool },
}

/// Reduces a based matrix to its primitive form.
pub fn cmd_reduce(catalog: &Catalog, source: MatrixSource) -> anyhow::Result<Report> {
    let t: BasedMatrix = match source {
        MatrixSource::File(p) => {
            let text = std::fs::read_to_string(p).or_else(|e| usage(format!("{}: {e}", p.display())))?;
            let t: BasedMatrix = serde_json::from_str(&text).or_else(|e| usage(format!("{}: {e}", p.display())))?;
            if let Err(e) = t.validate() {
                return usage(e.to_string());
            }
            t
        }
        MatrixSource::Knot { knot, crossing: id, graded } => {
            let (_, d) = resolve(catalog, knot)?;
            let v = id.map(|i| crossing(&d, i)).transpose()?;
            based_matrix_of(&d, v, graded)?
        }
    };
    let p = t.reduce_primitive();
    let special = t.find_special();
    let mut text = matrix_text("input", &t);
    writeln!(text, "special elements: annihilating {:?}, core {:?}, complementary {:?}", special.annihilating, special.core, special.complementary).unwrap();
    text.push_str(&matrix_text("primitive", &p));
    let json = json!({
        "input": matrix_json(&t),
        "special": special,
        "primitive": matrix_json(&p),
        "canonical": p.canonical().0,
    });
    Ok(Report { json, text, passed: true })
}

pub fn cmd_list(catalog: &Catalog) -> Report {
    let mut text = String::new();
    let mut out = Vec::new();
    for (name, d) in catalog.iter() {
        writeln!(text, "{name:<22} {:<8} {:>2} crossings  {}", format!("{:?}", d.flavor()), d.n_chords(), d).unwrap();
        out.push(json!({ "name": name, "flavor": format!("{:?}", d.flavor()), "crossings": d.n_chords(), "code": d.to_string() }));
    }
    Report { json: Value::Array(out), text, passed: true }
}

pub fn load_biquandle(path: &PathBuf) -> anyhow::Result<FiniteBiquandle> {
    let text = std::fs::read_to_string(path).or_else(|e| usage(format!("{}: {e}", path.display())))?;
    let b = FiniteBiquandle::parse(&text).or_else(|e| usage(format!("{}: {e}", path.display())))?;
    let report = b.check_axioms();
    if !report.passed {
        return usage(format!("{}: not a biquandle: {}", path.display(), report.failure.unwrap_or_default()));
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use chordal::based_matrix::{random_extension, random_primitive};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn catalog() -> Catalog {
        Catalog::builtin()
    }

    fn column(r: &Report, index: &str) -> Vec<Value> {
        r.json[0]["crossings"].as_array().unwrap().iter().map(|c| c[index].clone()).collect()
    }

    fn is_usage(r: anyhow::Result<Report>) -> bool {
        let code = exit_code(&r);
        r.err().is_some_and(|e| e.downcast_ref::<UsageError>().is_some()) && code == 2
    }

    #[test]
    fn compute_n_on_3_1() {
        let r = cmd_compute(&catalog(), &["3.1".into()], &["n".into()], None).unwrap();
        assert_eq!(column(&r, "n"), [json!(-1), json!(-1), json!(2)]);
        assert_eq!(column(&r, "sign"), [json!(-1), json!(1), json!(-1)]);
    }

    #[test]
    fn compute_derived_parity_on_3_1() {
        let r = cmd_compute(&catalog(), &["3.1".into()], &["nprime".into()], None).unwrap();
        let vals: Vec<i64> = column(&r, "nprime").iter().map(|v| (v["value"].as_i64().unwrap() + 1).rem_euclid(4) - 1).collect();
        assert_eq!(vals, [-1, 1, -1]);
        assert!(column(&r, "nprime").iter().all(|v| v["modulus"] == 4));
    }

    #[test]
    fn default_report_follows_the_schema() {
        let r = cmd_compute(&catalog(), &["3.1".into()], &[], None).unwrap();
        let c = &r.json[0]["crossings"][2];
        for key in ["id", "sign", "Ind", "n", "hp", "nprime", "nsecond", "secondary", "induced", "vkp"] {
            assert!(c.get(key).is_some(), "missing {key}");
        }
        assert_eq!(c["induced"], json!(0));
        assert_eq!(r.json[0]["polynomials"]["f"], json!("-t + t^-1 - t^-2"));
        assert_eq!(r.json[0]["based_matrix"]["crossings"][0]["eps"], json!(-1));
        assert_eq!(r.json[0]["based_matrix"]["crossings"][2]["d"], json!("3"));
        assert!(r.text.contains("Ind"));
    }

    #[test]
    fn unknot_report_is_empty() {
        let r = cmd_compute(&catalog(), &["unknot".into()], &["all".into()], None).unwrap();
        assert!(r.json[0]["crossings"].as_array().unwrap().is_empty());
        assert_eq!(r.json[0]["polynomials"]["f"], json!("0"));
        assert_eq!(r.json[0]["polynomials"]["u"], json!("0"));
        assert_eq!(exit_code(&Ok(r)), 0);
    }

    #[test]
    fn every_index_on_every_entry() {
        let r = cmd_compute(&catalog(), &[], &["all".into()], Some(&FiniteBiquandle::dihedral(3))).unwrap();
        assert_eq!(r.json.as_array().unwrap().len(), catalog().entries.len());
        assert_eq!(r.json[4]["colorings"], json!(9));
    }

    #[test]
    fn inline_codes_and_unknown_names() {
        let r = cmd_compute(&catalog(), &["c: O1+ U1+".into()], &["n".into()], None).unwrap();
        assert_eq!(column(&r, "n"), [json!(0)]);
        assert!(is_usage(cmd_compute(&catalog(), &["nope".into()], &[], None)));
        assert!(is_usage(cmd_compute(&catalog(), &["3.1".into()], &["bogus".into()], None)));
        assert!(is_usage(cmd_compute(&catalog(), &["c: O1+ O1+".into()], &[], None)));
        assert!(is_usage(cmd_substitute(&catalog(), "trefoil", 1, 9, SearchBudget::new(6, 2))));
    }

    #[test]
    fn custom_catalog() {
        let dir = std::env::temp_dir().join(format!("chordal-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("cat.txt");
        std::fs::write(&path, "# two entries\nk = c: O1+ U1+\nt = c: O1+ U2+ O3+ U1+ O2+ U3+\n").unwrap();
        let c = load_catalog(Some(&path)).unwrap();
        assert_eq!(c.entries.len(), 2);
        std::fs::write(&path, "k = c: O1+ U1+\nk = c:\n").unwrap();
        assert!(load_catalog(Some(&path)).unwrap_err().downcast_ref::<UsageError>().is_some());
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn fuzz_passes_on_3_1() {
        let opts = FuzzOptions { steps: 100, seed: 42, cap: 10, inject_fault: false };
        let r = cmd_fuzz(&catalog(), &["3.1".into()], &opts).unwrap();
        assert!(r.passed, "{}", r.text);
        assert_eq!(exit_code(&Ok(r)), 0);
    }

    #[test]
    fn injected_fault_is_reported() {
        let opts = FuzzOptions { steps: 200, seed: 42, cap: 10, inject_fault: true };
        let r = cmd_fuzz(&catalog(), &["3.1".into()], &opts).unwrap();
        assert!(!r.passed);
        let v = &r.json[0]["violations"][0];
        assert_eq!(v["check"], json!("I2+"));
        assert_eq!(v["index"], json!("broken_sign"));
        assert!(!v["moves"].as_array().unwrap().is_empty());
        assert_eq!(exit_code(&Ok(r)), 1);
    }

    #[test]
    fn classical_entries_pass() {
        let opts = FuzzOptions { steps: 40, seed: 42, cap: 10, inject_fault: false };
        let r = cmd_fuzz(&catalog(), &["trefoil".into(), "figure_eight".into()], &opts).unwrap();
        assert!(r.passed, "{}", r.text);
        assert!(r.json.as_array().unwrap().iter().all(|e| e["classical_exceptions"].as_array().unwrap().is_empty()));
    }

    #[test]
    fn wrapcheck_certificates() {
        let c = catalog();
        let r = cmd_wrapcheck(&c, "kink_pos", 1, 2, None, SearchBudget::new(8, 10)).unwrap();
        assert!(r.passed);
        let r = cmd_wrapcheck(&c, "kink_pos", 1, 0, None, SearchBudget::new(8, 10)).unwrap();
        assert!(r.passed);
        assert!(r.json["path"]["moves"].as_array().unwrap().is_empty());
        let r = cmd_wrapcheck(&c, "r2_pair", 1, 0, Some(2), SearchBudget::new(6, 4)).unwrap();
        assert!(r.passed);
        assert_eq!(r.json["path"]["depth"], json!(1));
        assert!(is_usage(cmd_wrapcheck(&c, "trefoil", 1, 0, Some(2), SearchBudget::new(6, 4))));
    }

    #[test]
    fn wrapcheck_reports_exhaustion() {
        let r = cmd_wrapcheck(&catalog(), "kink_pos", 1, 2, None, SearchBudget::new(8, 2)).unwrap();
        assert!(!r.passed);
        assert_eq!(r.json["certified"], json!(false));
    }

    #[test]
    fn substitute_by_rotation() {
        let r = cmd_substitute(&catalog(), "trefoil", 1, 2, SearchBudget::new(6, 2)).unwrap();
        assert!(r.passed);
        assert!(r.json["path"]["depth"].as_u64().unwrap() <= 1);
        assert_eq!(r.json["replay_ok"], json!(true));
    }

    #[test]
    fn opposite_signs_warn() {
        let r = cmd_substitute(&catalog(), "3.1", 1, 2, SearchBudget::new(5, 3)).unwrap();
        assert!(r.text.starts_with("warning"));
        assert!(r.json["warning"].is_string());
        assert!(!r.passed);
    }

    #[test]
    fn reduce_from_file() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let core = random_primitive(&mut rng, 3, true, true);
        let ext = random_extension(&mut rng, &core, 4);
        let dir = std::env::temp_dir().join(format!("chordal-reduce-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("m.json");
        std::fs::write(&path, serde_json::to_string(&ext).unwrap()).unwrap();
        let r = cmd_reduce(&catalog(), MatrixSource::File(&path)).unwrap();
        assert_eq!(r.json["canonical"], json!(core.canonical().0));
        std::fs::write(&path, "{\"labels\": [\"s\", \"1\"], \"b\": [[0, 1], [1, 0]], \"d\": null, \"eps\": 1, \"grading\": null}").unwrap();
        assert!(is_usage(cmd_reduce(&catalog(), MatrixSource::File(&path))));
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn reduce_3_1_is_primitive() {
        let r = cmd_reduce(&catalog(), MatrixSource::Knot { knot: "3.1", crossing: Some(1), graded: false }).unwrap();
        assert_eq!(r.json["input"]["b"], r.json["primitive"]["b"]);
        assert_eq!(r.json["primitive"]["primitive"], json!(true));
    }

    #[test]
    fn list_shows_every_entry() {
        let r = cmd_list(&catalog());
        assert!(r.text.lines().any(|l| l.starts_with("3.1 ")));
    }
}
