use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauss::{Flavor, GaussDiagram, Kind, Pos, Role};
use crate::indices::{IndexEvaluator, IndexValue};

/// Finite biquandle with tables up[x][y] = x o y and down[x][y] = x * y.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteBiquandle {
    pub n: usize,
    pub up: Vec<Vec<usize>>,
    pub down: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub passed: bool,
    pub failure: Option<String>,
}

impl FiniteBiquandle {
    pub fn from_fns(n: usize, up: impl Fn(usize, usize) -> usize, down: impl Fn(usize, usize) -> usize) -> FiniteBiquandle {
        FiniteBiquandle {
            n,
            up: (0..n).map(|x| (0..n).map(|y| up(x, y)).collect()).collect(),
            down: (0..n).map(|x| (0..n).map(|y| down(x, y)).collect()).collect(),
        }
    }

    pub fn trivial(n: usize) -> FiniteBiquandle {
        Self::from_fns(n, |x, _| x, |x, _| x)
    }

    /// x o y = 2y - x, x * y = x.
    pub fn dihedral(m: usize) -> FiniteBiquandle {
        Self::from_fns(m, |x, y| (2 * y + m - x) % m, |x, _| x)
    }

    /// x o y = x * y = x + 1.
    pub fn shift(m: usize) -> FiniteBiquandle {
        Self::from_fns(m, |x, _| (x + 1) % m, |x, _| (x + 1) % m)
    }

    /// x o y = a x + b y, x * y = c x + d y over Z_m.
    pub fn linear(m: usize, a: usize, b: usize, c: usize, d: usize) -> FiniteBiquandle {
        Self::from_fns(m, |x, y| (a * x + b * y) % m, |x, y| (c * x + d * y) % m)
    }

    pub fn o(&self, x: usize, y: usize) -> usize {
        self.up[x][y]
    }

    pub fn s(&self, x: usize, y: usize) -> usize {
        self.down[x][y]
    }

    /// Carrier size, then the o table and the * table, whitespace separated, 0-based.
    pub fn parse(text: &str) -> Result<FiniteBiquandle> {
        let nums: Vec<usize> = text
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|_| Error::Parse(format!("bad biquandle entry `{t}`"))))
            .collect::<Result<_>>()?;
        let n = *nums.first().ok_or_else(|| Error::Parse("empty biquandle file".into()))?;
        if nums.len() != 1 + 2 * n * n {
            return Err(Error::Parse(format!("expected {} table entries, found {}", 2 * n * n, nums.len() - 1)));
        }
        if nums[1..].iter().any(|&x| x >= n) {
            return Err(Error::Parse("table entry out of range".into()));
        }
        let table = |off: usize| (0..n).map(|x| nums[off + x * n..off + (x + 1) * n].to_vec()).collect();
        Ok(FiniteBiquandle { n, up: table(1), down: table(1 + n * n) })
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.n);
        for t in [&self.up, &self.down] {
            for row in t {
                let r: Vec<String> = row.iter().map(|x| x.to_string()).collect();
                s.push_str(&r.join(" "));
                s.push('\n');
            }
        }
        s
    }

    /// Checks x o x = x * x, invertibility of x -> x o y, x -> x * y and
    /// (x, y) -> (y * x, x o y), and the three exchange laws.
    pub fn check_axioms(&self) -> AxiomReport {
        let n = self.n;
        let fail = |msg: String| AxiomReport { passed: false, failure: Some(msg) };
        for x in 0..n {
            if self.o(x, x) != self.s(x, x) {
                return fail(format!("x o x != x * x at x = {x}"));
            }
        }
        for y in 0..n {
            for (name, t) in [("o", &self.up), ("*", &self.down)] {
                let mut seen = vec![false; n];
                for x in 0..n {
                    seen[t[x][y]] = true;
                }
                if seen.iter().any(|&s| !s) {
                    return fail(format!("x -> x {name} {y} is not a bijection"));
                }
            }
        }
        let mut seen = vec![false; n * n];
        for x in 0..n {
            for y in 0..n {
                seen[self.s(y, x) * n + self.o(x, y)] = true;
            }
        }
        if seen.iter().any(|&s| !s) {
            return fail("(x, y) -> (y * x, x o y) is not a bijection".into());
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let (o, s) = (|a, b| self.o(a, b), |a, b| self.s(a, b));
                    if o(o(x, y), o(z, y)) != o(o(x, z), s(y, z)) {
                        return fail(format!("(x o y) o (z o y) != (x o z) o (y * z) at ({x}, {y}, {z})"));
                    }
                    if s(o(x, y), o(z, y)) != o(s(x, z), s(y, z)) {
                        return fail(format!("(x o y) * (z o y) != (x * z) o (y * z) at ({x}, {y}, {z})"));
                    }
                    if s(s(x, y), s(z, y)) != s(s(x, z), o(y, z)) {
                        return fail(format!("(x * y) * (z * y) != (x * z) * (y o z) at ({x}, {y}, {z})"));
                    }
                }
            }
        }
        AxiomReport { passed: true, failure: None }
    }
}

/// A map B x B -> B x B used at crossings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Formula {
    /// (x * y, y o x)
    StarUp,
    /// (x o y, y * x)
    UpStar,
}

/// Crossing rule, per crossing sign: a formula and an ordering `arcs` of the four arcs
/// (over in, under in, over out, under out) such that
/// (c[arcs[2]], c[arcs[3]]) = F(c[arcs[0]], c[arcs[1]]).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rule {
    pub positive: (Formula, [usize; 4]),
    pub negative: (Formula, [usize; 4]),
    /// The arcs forming the index pair (x, y), per sign.
    pub pair: [[usize; 2]; 2],
}

impl Rule {
    /// Both strands drawn upwards. Positive: over out = (over in) * (under out),
    /// under in = (under out) o (over in). Negative: over in = (over out) * (under in),
    /// under out = (under in) o (over out). The pair is (top left, bottom left).
    pub const STANDARD: Rule = Rule {
        positive: (Formula::StarUp, [0, 3, 2, 1]),
        negative: (Formula::StarUp, [2, 1, 0, 3]),
        pair: [[3, 0], [2, 1]],
    };

    /// The same rule with o and * exchanged.
    pub const SWAPPED: Rule = Rule {
        positive: (Formula::UpStar, [0, 3, 2, 1]),
        negative: (Formula::UpStar, [2, 1, 0, 3]),
        pair: [[3, 0], [2, 1]],
    };
}

struct Tables {
    n: usize,
    arcs: [[usize; 4]; 2],
    forward: [Vec<(usize, usize)>; 2],
    backward: [Vec<(usize, usize)>; 2],
}

fn sign_slot(sign: i8) -> usize {
    (sign < 0) as usize
}

impl Tables {
    fn new(b: &FiniteBiquandle, rule: Rule) -> Result<Tables> {
        let n = b.n;
        let mut forward = [vec![], vec![]];
        let mut backward = [vec![], vec![]];
        for (slot, (f, _)) in [rule.positive, rule.negative].into_iter().enumerate() {
            let mut fwd = vec![(0, 0); n * n];
            let mut bwd = vec![(usize::MAX, usize::MAX); n * n];
            for x in 0..n {
                for y in 0..n {
                    let (a, c) = match f {
                        Formula::StarUp => (b.s(x, y), b.o(y, x)),
                        Formula::UpStar => (b.o(x, y), b.s(y, x)),
                    };
                    fwd[x * n + y] = (a, c);
                    bwd[a * n + c] = (x, y);
                }
            }
            if bwd.iter().any(|p| p.0 == usize::MAX) {
                return Err(Error::NotApplicable("crossing rule is not a bijection".into()));
            }
            forward[slot] = fwd;
            backward[slot] = bwd;
        }
        Ok(Tables { n, arcs: [rule.positive.1, rule.negative.1], forward, backward })
    }
}

/// Semi-arcs: the segment leaving each slot, plus the initial segment of each long component.
#[derive(Clone, Debug)]
pub struct ArcLayout {
    /// arc_out[comp][idx]: arc leaving the slot.
    pub arc_out: Vec<Vec<usize>>,
    /// arc_in[comp][idx]: arc entering the slot.
    pub arc_in: Vec<Vec<usize>>,
    pub n_arcs: usize,
}

pub fn arc_layout(d: &GaussDiagram) -> ArcLayout {
    let mut arc_out = Vec::new();
    let mut arc_in = Vec::new();
    let mut next = 0;
    for c in d.components() {
        let k = c.len();
        match c.kind {
            Kind::Closed => {
                let outs: Vec<usize> = (next..next + k).collect();
                let ins: Vec<usize> = (0..k).map(|i| outs[(i + k - 1) % k]).collect();
                next += k;
                arc_out.push(outs);
                arc_in.push(ins);
            }
            Kind::Long => {
                let ins: Vec<usize> = (next..next + k).collect();
                let outs: Vec<usize> = (next + 1..next + k + 1).collect();
                next += k + 1;
                arc_out.push(outs);
                arc_in.push(ins);
            }
        }
    }
    // a closed component without crossings is one arc
    for (ci, c) in d.components().iter().enumerate() {
        if c.is_empty() && c.kind == Kind::Closed {
            arc_out[ci] = vec![];
            arc_in[ci] = vec![];
            next += 1;
        }
    }
    ArcLayout { arc_out, arc_in, n_arcs: next }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Coloring(pub Vec<usize>);

/// The four arcs at crossing v: (over in, under in, over out, under out).
fn crossing_arcs(d: &GaussDiagram, lay: &ArcLayout, v: usize) -> [usize; 4] {
    let po: Pos = d.pos(v, Role::Tail);
    let pu: Pos = d.pos(v, Role::Head);
    [lay.arc_in[po.comp][po.idx], lay.arc_in[pu.comp][pu.idx], lay.arc_out[po.comp][po.idx], lay.arc_out[pu.comp][pu.idx]]
}

/// Arc consistency at every crossing: completions of the known arcs are enumerated from
/// the rule table; no completion is a contradiction, a forced value is assigned.
fn propagate(d: &GaussDiagram, lay: &ArcLayout, t: &Tables, col: &mut [usize]) -> bool {
    const FREE: usize = usize::MAX;
    let n = t.n;
    loop {
        let mut changed = false;
        for v in d.chords() {
            let all = crossing_arcs(d, lay, v);
            let s = sign_slot(d.raw_sign(v));
            let r = t.arcs[s];
            let arcs = [all[r[0]], all[r[1]], all[r[2]], all[r[3]]];
            let known = arcs.iter().filter(|&&a| col[a] != FREE).count();
            if known == 0 {
                continue;
            }
            let step: Vec<(usize, usize)> = if col[arcs[0]] != FREE && col[arcs[1]] != FREE {
                let (x, y) = t.forward[s][col[arcs[0]] * n + col[arcs[1]]];
                vec![(arcs[2], x), (arcs[3], y)]
            } else if col[arcs[2]] != FREE && col[arcs[3]] != FREE {
                let (x, y) = t.backward[s][col[arcs[2]] * n + col[arcs[3]]];
                vec![(arcs[0], x), (arcs[1], y)]
            } else {
                // one input and one output known: scan the table
                let mut forced: [Option<usize>; 4] = [None; 4];
                let mut found = false;
                for x in 0..n {
                    for y in 0..n {
                        let (a, b) = t.forward[s][x * n + y];
                        let q = [x, y, a, b];
                        if (0..4).any(|i| col[arcs[i]] != FREE && col[arcs[i]] != q[i]) {
                            continue;
                        }
                        if !found {
                            forced = q.map(Some);
                            found = true;
                        } else {
                            for i in 0..4 {
                                if forced[i] != Some(q[i]) {
                                    forced[i] = None;
                                }
                            }
                        }
                    }
                }
                if !found {
                    return false;
                }
                (0..4).filter_map(|i| forced[i].map(|x| (arcs[i], x))).collect()
            };
            for (arc, val) in step {
                if col[arc] == FREE {
                    col[arc] = val;
                    changed = true;
                } else if col[arc] != val {
                    return false;
                }
            }
        }
        if !changed {
            return true;
        }
    }
}

fn search(d: &GaussDiagram, lay: &ArcLayout, t: &Tables, col: Vec<usize>, out: &mut Vec<Coloring>) {
    const FREE: usize = usize::MAX;
    // branch on a free arc at the crossing with the most known arcs
    let mut best: Option<(usize, usize)> = None;
    for v in d.chords() {
        let arcs = crossing_arcs(d, lay, v);
        let known = arcs.iter().filter(|&&a| col[a] != FREE).count();
        if let Some(&a) = arcs.iter().find(|&&a| col[a] == FREE) {
            if best.map_or(true, |(k, _)| known > k) {
                best = Some((known, a));
            }
        }
    }
    let free = match best {
        Some((_, a)) => a,
        None => match col.iter().position(|&c| c == FREE) {
            Some(a) => a,
            None => {
                out.push(Coloring(col));
                return;
            }
        },
    };
    for x in 0..t.n {
        let mut c = col.clone();
        c[free] = x;
        if propagate(d, lay, t, &mut c) {
            search(d, lay, t, c, out);
        }
    }
}

/// All colorings under the given crossing rule.
pub fn colorings_with(d: &GaussDiagram, b: &FiniteBiquandle, rule: Rule) -> Result<Vec<Coloring>> {
    if d.flavor() != Flavor::Virtual {
        return Err(Error::WrongFlavor { expected: "virtual" });
    }
    let t = Tables::new(b, rule)?;
    let lay = arc_layout(d);
    let mut out = Vec::new();
    if b.n == 0 {
        return Ok(out);
    }
    search(d, &lay, &t, vec![usize::MAX; lay.n_arcs], &mut out);
    Ok(out)
}

/// Whether an assignment of colors to arcs satisfies the rule at every crossing.
pub fn is_coloring(d: &GaussDiagram, b: &FiniteBiquandle, rule: Rule, c: &Coloring) -> Result<bool> {
    let t = Tables::new(b, rule)?;
    let lay = arc_layout(d);
    Ok(c.0.len() == lay.n_arcs
        && d.chords().all(|v| {
            let all = crossing_arcs(d, &lay, v);
            let s = sign_slot(d.raw_sign(v));
            let r = t.arcs[s];
            t.forward[s][c.0[all[r[0]]] * t.n + c.0[all[r[1]]]] == (c.0[all[r[2]]], c.0[all[r[3]]])
        }))
}

pub fn colorings(d: &GaussDiagram, b: &FiniteBiquandle) -> Result<Vec<Coloring>> {
    colorings_with(d, b, Rule::STANDARD)
}

/// Quotients of B x B: class[sign][x * n + y] is the least pair index in the class of (x, y).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TildeB {
    pub n: usize,
    pub class: [Vec<usize>; 2],
}

fn find(p: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while p[r] != r {
        r = p[r];
    }
    let mut y = x;
    while p[y] != r {
        let nx = p[y];
        p[y] = r;
        y = nx;
    }
    r
}

fn union(p: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(p, a), find(p, b));
    if ra != rb {
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        p[hi] = lo;
    }
}

/// B~+ identifies (x, y) with (x o z, y o z), (x * z, y * z) and (x o z, y * z);
/// B~- uses (x * z, y o z) in place of the last relation.
pub fn tilde_quotient(b: &FiniteBiquandle) -> TildeB {
    let n = b.n;
    let mut class = [Vec::new(), Vec::new()];
    for (slot, mixed_first_up) in [(0usize, true), (1usize, false)] {
        let mut p: Vec<usize> = (0..n * n).collect();
        for x in 0..n {
            for y in 0..n {
                let i = x * n + y;
                for z in 0..n {
                    union(&mut p, i, b.o(x, z) * n + b.o(y, z));
                    union(&mut p, i, b.s(x, z) * n + b.s(y, z));
                    let mixed = if mixed_first_up { b.o(x, z) * n + b.s(y, z) } else { b.s(x, z) * n + b.o(y, z) };
                    union(&mut p, i, mixed);
                }
            }
        }
        class[slot] = (0..n * n).map(|i| find(&mut p, i)).collect();
    }
    TildeB { n, class }
}

impl TildeB {
    /// Least representative (x, y) of the class of (x, y) in B~^sign.
    pub fn rep(&self, sign: i8, x: usize, y: usize) -> (usize, usize) {
        let c = self.class[sign_slot(sign)][x * self.n + y];
        (c / self.n, c % self.n)
    }

    /// (x, y)* = (y, x), mapping B~^sign to B~^-sign.
    pub fn star(&self, sign: i8, x: usize, y: usize) -> (i8, usize, usize) {
        let (a, b) = self.rep(-sign, y, x);
        (-sign, a, b)
    }

    pub fn n_classes(&self, sign: i8) -> usize {
        let c = &self.class[sign_slot(sign)];
        (0..c.len()).filter(|&i| c[i] == i).count()
    }
}

fn class_value(sign: i8, (x, y): (usize, usize)) -> IndexValue {
    IndexValue::Tuple(vec![IndexValue::Int(sign as i64), IndexValue::Int(x as i64), IndexValue::Int(y as i64)])
}

fn multiset(items: Vec<IndexValue>) -> IndexValue {
    let mut m: BTreeMap<IndexValue, usize> = BTreeMap::new();
    for x in items {
        *m.entry(x).or_insert(0) += 1;
    }
    IndexValue::Multiset(m.into_iter().collect())
}

/// sigma_B(v): multiset over colorings of the class of the rule's arc pair in B~^sgn(v).
pub fn biquandle_index_with(d: &GaussDiagram, b: &FiniteBiquandle, tb: &TildeB, rule: Rule) -> Result<Vec<IndexValue>> {
    let cols = colorings_with(d, b, rule)?;
    let lay = arc_layout(d);
    Ok(d.chords()
        .map(|v| {
            let arcs = crossing_arcs(d, &lay, v);
            let s = d.raw_sign(v);
            let [i, j] = rule.pair[sign_slot(s)];
            multiset(cols.iter().map(|c| class_value(s, tb.rep(s, c.0[arcs[i]], c.0[arcs[j]]))).collect())
        })
        .collect())
}

pub fn biquandle_index(d: &GaussDiagram, b: &FiniteBiquandle) -> Result<Vec<IndexValue>> {
    biquandle_index_with(d, b, &tilde_quotient(b), Rule::STANDARD)
}

pub struct BiquandleIndex {
    pub name: String,
    pub b: Arc<FiniteBiquandle>,
    pub tilde: TildeB,
    pub rule: Rule,
}

impl BiquandleIndex {
    pub fn new(name: &str, b: FiniteBiquandle) -> BiquandleIndex {
        let tilde = tilde_quotient(&b);
        BiquandleIndex { name: name.to_string(), b: Arc::new(b), tilde, rule: Rule::STANDARD }
    }
}

impl IndexEvaluator for BiquandleIndex {
    fn name(&self) -> String {
        format!("biquandle({})", self.name)
    }
    fn signed(&self) -> bool {
        true
    }
    fn involution(&self, x: &IndexValue) -> IndexValue {
        match x {
            IndexValue::Multiset(items) => multiset(
                items
                    .iter()
                    .flat_map(|(c, k)| {
                        let star = match c {
                            IndexValue::Tuple(t) => match t.as_slice() {
                                [IndexValue::Int(s), IndexValue::Int(a), IndexValue::Int(b)] => {
                                    let (s2, a2, b2) = self.tilde.star(*s as i8, *a as usize, *b as usize);
                                    class_value(s2, (a2, b2))
                                }
                                _ => c.clone(),
                            },
                            _ => c.clone(),
                        };
                        std::iter::repeat(star).take(*k)
                    })
                    .collect(),
            ),
            other => other.clone(),
        }
    }
    fn applies(&self, d: &GaussDiagram) -> bool {
        d.flavor() == Flavor::Virtual
    }
    fn eval_all(&self, d: &GaussDiagram) -> Result<Vec<IndexValue>> {
        biquandle_index_with(d, &self.b, &self.tilde, self.rule)
    }
}

/// Difference x - y mod m of a class representative, for the shift biquandle.
pub fn shift_class_difference(value: &IndexValue, m: usize) -> Option<Vec<(i64, usize)>> {
    let IndexValue::Multiset(items) = value else { return None };
    items
        .iter()
        .map(|(c, k)| match c {
            IndexValue::Tuple(t) => match t.as_slice() {
                [_, IndexValue::Int(x), IndexValue::Int(y)] => Some(((x - y).rem_euclid(m as i64), *k)),
                _ => None,
            },
            _ => None,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::indices::gaussian_n;

    fn knot(s: &str) -> GaussDiagram {
        GaussDiagram::parse(s).unwrap()
    }

    const TREFOIL: &str = "c: O1+ U2+ O3+ U1+ O2+ U3+";
    const K31: &str = "c: O1- U2+ U3- O2+ U1- O3-";

    #[test]
    fn axioms() {
        assert!(FiniteBiquandle::trivial(4).check_axioms().passed);
        for m in 3..8 {
            assert!(FiniteBiquandle::dihedral(m).check_axioms().passed);
            assert!(FiniteBiquandle::shift(m).check_axioms().passed);
            let r = FiniteBiquandle::from_fns(m, |x, _| (x + 1) % m, |x, _| x).check_axioms();
            assert!(!r.passed && r.failure.is_some());
        }
    }

    #[test]
    fn text_round_trip() {
        let b = FiniteBiquandle::linear(5, 2, 0, 3, 4);
        assert_eq!(FiniteBiquandle::parse(&b.to_text()).unwrap(), b);
        assert!(FiniteBiquandle::parse("2 0 1").is_err());
        assert!(FiniteBiquandle::parse("1 0 3").is_err());
    }

    #[test]
    fn trivial_colorings() {
        let d = knot(K31);
        let c = colorings(&d, &FiniteBiquandle::trivial(4)).unwrap();
        assert_eq!(c.len(), 4);
        assert!(c.iter().all(|c| c.0.iter().all(|&x| x == c.0[0])));
    }

    fn brute_force(d: &GaussDiagram, b: &FiniteBiquandle) -> usize {
        let k = arc_layout(d).n_arcs;
        let mut count = 0;
        for code in 0..b.n.pow(k as u32) {
            let c = Coloring((0..k).map(|i| code / b.n.pow(i as u32) % b.n).collect());
            count += is_coloring(d, b, Rule::STANDARD, &c).unwrap() as usize;
        }
        count
    }

    #[test]
    fn dihedral_trefoil() {
        let d = knot(TREFOIL);
        let b = FiniteBiquandle::dihedral(3);
        assert_eq!(colorings(&d, &b).unwrap().len(), 9);
        assert_eq!(brute_force(&d, &b), 9);
        let b5 = FiniteBiquandle::linear(5, 2, 0, 3, 4);
        assert_eq!(colorings(&knot(K31), &b5).unwrap().len(), brute_force(&knot(K31), &b5));
    }

    #[test]
    fn enumeration_is_sound() {
        let d = knot(K31);
        let b = FiniteBiquandle::linear(7, 2, 0, 4, 5);
        for c in colorings(&d, &b).unwrap() {
            assert!(is_coloring(&d, &b, Rule::STANDARD, &c).unwrap());
        }
    }

    #[test]
    fn shift_on_3_1() {
        let d = knot(K31);
        let b = FiniteBiquandle::shift(6);
        assert_eq!(colorings(&d, &b).unwrap().len(), 6);
        let n = gaussian_n(&d).unwrap();
        let idx = biquandle_index(&d, &b).unwrap();
        for v in d.chords() {
            assert_eq!(shift_class_difference(&idx[v], 6).unwrap(), vec![(n[v].rem_euclid(6), 6)]);
        }
    }

    #[test]
    fn quotients() {
        let t = tilde_quotient(&FiniteBiquandle::trivial(3));
        assert_eq!(t.n_classes(1), 9);
        assert_eq!(t.n_classes(-1), 9);
        for m in [4, 6] {
            let t = tilde_quotient(&FiniteBiquandle::shift(m));
            for sign in [1, -1] {
                assert_eq!(t.n_classes(sign), m);
                for x in 0..m {
                    for y in 0..m {
                        let (a, b) = t.rep(sign, x, y);
                        assert_eq!((a + m - b) % m, (x + m - y) % m);
                    }
                }
            }
        }
    }

    #[test]
    fn star_is_well_defined() {
        let b = FiniteBiquandle::linear(5, 3, 4, 2, 0);
        let t = tilde_quotient(&b);
        for sign in [1i8, -1] {
            for x in 0..5 {
                for y in 0..5 {
                    let (a, c) = t.rep(sign, x, y);
                    assert_eq!(t.star(sign, x, y), t.star(sign, a, c));
                    let (s2, p, q) = t.star(sign, x, y);
                    let (s3, p2, q2) = t.star(s2, p, q);
                    assert_eq!((s3, p2, q2), (sign, a, c));
                }
            }
        }
    }

    #[test]
    fn trivial_index_is_diagonal() {
        let d = knot(K31);
        for v in biquandle_index(&d, &FiniteBiquandle::trivial(3)).unwrap() {
            let IndexValue::Multiset(items) = v else { panic!() };
            for (c, _) in items {
                let IndexValue::Tuple(t) = c else { panic!() };
                assert_eq!(t[1], t[2]);
            }
        }
    }

    #[test]
    fn no_colorings_give_empty_multisets() {
        let d = knot(K31);
        let b = FiniteBiquandle::shift(6);
        let rule = Rule { positive: (Formula::StarUp, [0, 1, 2, 3]), negative: (Formula::StarUp, [2, 3, 0, 1]), pair: [[0, 1], [0, 1]] };
        let idx = biquandle_index_with(&d, &b, &tilde_quotient(&b), rule).unwrap();
        assert!(idx.iter().all(|v| *v == IndexValue::Multiset(vec![])));
    }
}
