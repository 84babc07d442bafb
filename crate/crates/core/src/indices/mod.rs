use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::based_matrix::{CanonicalMatrix, LaurentPoly};
use crate::error::{Error, Result};
use crate::gauss::{Flavor, GaussDiagram, Role};
use crate::moves::{apply_move, gaps, LoopType, MoveInstance};

mod basic;
mod parity;
mod smoothing;

pub use basic::*;
pub use parity::*;
pub use smoothing::*;

/// Element of Z[Z/m] (m = 0 means Z[Z]).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RingElement {
    pub modulus: i64,
    pub terms: BTreeMap<i64, i64>,
}

impl RingElement {
    pub fn new(modulus: i64) -> RingElement {
        RingElement { modulus: modulus.abs(), terms: BTreeMap::new() }
    }

    pub fn reduce(&self, k: i64) -> i64 {
        if self.modulus == 0 {
            k
        } else {
            k.rem_euclid(self.modulus)
        }
    }

    pub fn add_term(&mut self, k: i64, c: i64) {
        let k = self.reduce(k);
        let e = self.terms.entry(k).or_insert(0);
        *e += c;
        if *e == 0 {
            self.terms.remove(&k);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// (sum c_x [x])* = -sum c_x [-x]
    pub fn star(&self) -> RingElement {
        let mut r = RingElement::new(self.modulus);
        for (&k, &c) in &self.terms {
            r.add_term(-k, -c);
        }
        r
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(k, c)| format!("{c}[{k}]")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Value of a crossing index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum IndexValue {
    Int(i64),
    /// Residue in [0, modulus).
    Mod { value: i64, modulus: i64 },
    Pair(i64, i64),
    Signed { value: Box<IndexValue>, sign: i8 },
    /// Class in H_1 / <[K]> in reduced coordinates; the first coordinate is taken mod `modulus`.
    Homology { class: Vec<i64>, modulus: i64 },
    Ring(RingElement),
    Poly(LaurentPoly),
    Matrix(CanonicalMatrix),
    Fingerprint(Box<Fingerprint>),
    Multiset(Vec<(IndexValue, usize)>),
    Tuple(Vec<IndexValue>),
    Bullet,
}

impl IndexValue {
    pub fn modular(value: i64, modulus: i64) -> IndexValue {
        if modulus == 0 {
            IndexValue::Mod { value, modulus: 0 }
        } else {
            IndexValue::Mod { value: value.rem_euclid(modulus.abs()), modulus: modulus.abs() }
        }
    }

    pub fn label(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    /// Group negation for parity values.
    pub fn negate(&self) -> Option<IndexValue> {
        Some(match self {
            IndexValue::Int(x) => IndexValue::Int(-x),
            IndexValue::Mod { value, modulus } => IndexValue::modular(-value, *modulus),
            IndexValue::Homology { class, modulus } => IndexValue::Homology {
                class: reduce_class(class.iter().map(|x| -x).collect(), *modulus),
                modulus: *modulus,
            },
            _ => return None,
        })
    }

    /// Integer multiple of a group element.
    pub fn scale(&self, k: i64) -> Option<IndexValue> {
        Some(match self {
            IndexValue::Int(x) => IndexValue::Int(k * x),
            IndexValue::Mod { value, modulus } => IndexValue::modular(k * value, *modulus),
            IndexValue::Homology { class, modulus } => IndexValue::Homology {
                class: reduce_class(class.iter().map(|x| k * x).collect(), *modulus),
                modulus: *modulus,
            },
            _ => return None,
        })
    }

    pub fn add(&self, other: &IndexValue) -> Option<IndexValue> {
        Some(match (self, other) {
            (IndexValue::Int(a), IndexValue::Int(b)) => IndexValue::Int(a + b),
            (IndexValue::Mod { value: a, modulus: m }, IndexValue::Mod { value: b, modulus: n }) if m == n => {
                IndexValue::modular(a + b, *m)
            }
            (IndexValue::Homology { class: a, modulus: m }, IndexValue::Homology { class: b, modulus: n })
                if m == n && a.len() == b.len() =>
            {
                IndexValue::Homology {
                    class: reduce_class(a.iter().zip(b).map(|(x, y)| x + y).collect(), *m),
                    modulus: *m,
                }
            }
            _ => return None,
        })
    }

    pub fn is_zero(&self) -> bool {
        match self {
            IndexValue::Int(x) => *x == 0,
            IndexValue::Mod { value, .. } => *value == 0,
            IndexValue::Homology { class, .. } => class.iter().all(|&x| x == 0),
            IndexValue::Ring(r) => r.is_zero(),
            IndexValue::Poly(p) => p.is_zero(),
            _ => false,
        }
    }

    /// Zero element of the same group.
    pub fn zero_like(&self) -> Option<IndexValue> {
        self.scale(0)
    }
}

fn reduce_class(mut c: Vec<i64>, modulus: i64) -> Vec<i64> {
    if modulus > 0 && !c.is_empty() {
        c[0] = c[0].rem_euclid(modulus);
    }
    c
}

impl fmt::Display for IndexValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexValue::Int(x) => write!(f, "{x}"),
            IndexValue::Mod { value, modulus: 0 } => write!(f, "{value}"),
            IndexValue::Mod { value, modulus } => write!(f, "{value} mod {modulus}"),
            IndexValue::Pair(a, b) => write!(f, "({a},{b})"),
            IndexValue::Signed { value, sign } => write!(f, "({value},{})", if *sign > 0 { "+" } else { "-" }),
            IndexValue::Homology { class, .. } => write!(f, "{class:?}"),
            IndexValue::Ring(r) => write!(f, "{r}"),
            IndexValue::Poly(p) => write!(f, "{p}"),
            IndexValue::Matrix(m) => write!(f, "{:?}", m.0),
            IndexValue::Fingerprint(fp) => write!(f, "{}", serde_json::to_string(fp).unwrap()),
            IndexValue::Multiset(m) => {
                let parts: Vec<String> = m.iter().map(|(x, k)| format!("{x}x{k}")).collect();
                write!(f, "{{{}}}", parts.join(", "))
            }
            IndexValue::Tuple(t) => {
                let parts: Vec<String> = t.iter().map(|x| x.to_string()).collect();
                write!(f, "({})", parts.join(", "))
            }
            IndexValue::Bullet => write!(f, "•"),
        }
    }
}

/// A crossing index or signed index on some class of diagrams.
pub trait IndexEvaluator: Send + Sync {
    fn name(&self) -> String;

    /// Signed indices satisfy (I2+) with `involution`; unsigned ones satisfy (I2).
    fn signed(&self) -> bool;

    fn involution(&self, x: &IndexValue) -> IndexValue {
        x.clone()
    }

    fn applies(&self, d: &GaussDiagram) -> bool;

    fn eval_all(&self, d: &GaussDiagram) -> Result<Vec<IndexValue>>;

    fn eval(&self, d: &GaussDiagram, v: usize) -> Result<IndexValue> {
        d.check_chord(v)?;
        Ok(self.eval_all(d)?.swap_remove(v))
    }

    /// False when values are only comparable inside one diagram.
    fn transported(&self) -> bool {
        true
    }
}

pub type Evaluator = Arc<dyn IndexEvaluator>;

pub(crate) fn is_knot_like(d: &GaussDiagram) -> bool {
    d.n_components() == 1
}

pub(crate) fn require_virtual(d: &GaussDiagram) -> Result<()> {
    if d.flavor() != Flavor::Virtual {
        return Err(Error::WrongFlavor { expected: "virtual" });
    }
    Ok(())
}

pub(crate) fn require_knot(d: &GaussDiagram) -> Result<()> {
    if d.n_components() != 1 {
        return Err(Error::WrongComponentCount(d.n_components(), 1));
    }
    Ok(())
}

/// sigma-hat(v) = sigma(v)^{sgn(v)}.
pub struct Hat(pub Evaluator);

impl IndexEvaluator for Hat {
    fn name(&self) -> String {
        format!("hat({})", self.0.name())
    }
    fn signed(&self) -> bool {
        false
    }
    fn applies(&self, d: &GaussDiagram) -> bool {
        d.flavor() == Flavor::Virtual && self.0.applies(d)
    }
    fn eval_all(&self, d: &GaussDiagram) -> Result<Vec<IndexValue>> {
        require_virtual(d)?;
        let vals = self.0.eval_all(d)?;
        Ok(vals
            .into_iter()
            .enumerate()
            .map(|(v, x)| if d.raw_sign(v) > 0 { x } else { self.0.involution(&x) })
            .collect())
    }
    fn transported(&self) -> bool {
        self.0.transported()
    }
}

/// iota-tilde(v) = (iota(v), sgn(v)) with the sign flip as involution.
pub struct Tilde(pub Evaluator);

impl IndexEvaluator for Tilde {
    fn name(&self) -> String {
        format!("tilde({})", self.0.name())
    }
    fn signed(&self) -> bool {
        true
    }
    fn involution(&self, x: &IndexValue) -> IndexValue {
        match x {
            IndexValue::Signed { value, sign } => IndexValue::Signed { value: value.clone(), sign: -sign },
            other => other.clone(),
        }
    }
    fn applies(&self, d: &GaussDiagram) -> bool {
        d.flavor() == Flavor::Virtual && self.0.applies(d)
    }
    fn eval_all(&self, d: &GaussDiagram) -> Result<Vec<IndexValue>> {
        require_virtual(d)?;
        let vals = self.0.eval_all(d)?;
        Ok(vals
            .into_iter()
            .enumerate()
            .map(|(v, x)| IndexValue::Signed { value: Box::new(x), sign: d.raw_sign(v) })
            .collect())
    }
    fn transported(&self) -> bool {
        self.0.transported()
    }
}

/// Projection of a signed index to the orbits of its involution.
pub struct Bar(pub Evaluator);

impl IndexEvaluator for Bar {
    fn name(&self) -> String {
        format!("bar({})", self.0.name())
    }
    fn signed(&self) -> bool {
        false
    }
    fn applies(&self, d: &GaussDiagram) -> bool {
        self.0.applies(d)
    }
    fn eval_all(&self, d: &GaussDiagram) -> Result<Vec<IndexValue>> {
        Ok(self.0.eval_all(d)?.into_iter().map(|x| orbit_rep(self.0.as_ref(), &x)).collect())
    }
    fn transported(&self) -> bool {
        self.0.transported()
    }
}

/// Least serialization in the orbit {x, x*}.
pub fn orbit_rep(e: &dyn IndexEvaluator, x: &IndexValue) -> IndexValue {
    let y = e.involution(x);
    if y.label() < x.label() {
        y
    } else {
        x.clone()
    }
}

/// Values of an index on the kinks added to a component, by loop type.
pub fn loop_values(e: &dyn IndexEvaluator, d: &GaussDiagram, component: usize) -> Result<BTreeMap<LoopType, IndexValue>> {
    if component >= d.n_components() {
        return Err(Error::NotApplicable(format!("no component {component}")));
    }
    let gap = gaps(d)
        .into_iter()
        .find(|g| g.comp == component)
        .ok_or_else(|| Error::NotApplicable("component has no gap".into()))?;
    let mut out = BTreeMap::new();
    for lt in LoopType::all() {
        let (tail_first, sign) = lt.shape();
        if d.flavor() != Flavor::Virtual && sign < 0 {
            continue;
        }
        if d.flavor() == Flavor::Free && !tail_first {
            continue;
        }
        let m = MoveInstance::R1Add { gap, tail_first, sign };
        let (nd, corr) = apply_move(d, &m)?;
        let image: Vec<bool> = {
            let mut hit = vec![false; nd.n_chords()];
            for v in d.chords() {
                if let Some(w) = corr.get(v) {
                    hit[w] = true;
                }
            }
            hit
        };
        let kink = image.iter().position(|&h| !h).expect("new chord");
        out.insert(lt, e.eval(&nd, kink)?);
    }
    if d.flavor() == Flavor::Virtual {
        let get = |l: LoopType| out[&l].clone();
        let (lp, lm, rp, rm) = (get(LoopType::LPlus), get(LoopType::LMinus), get(LoopType::RPlus), get(LoopType::RMinus));
        let ok = if e.signed() {
            e.involution(&lp) == rm && e.involution(&lm) == rp
        } else {
            lp == rm && lm == rp
        };
        if !ok {
            return Err(Error::PairingViolation(format!("l+={lp} r-={rm} l-={lm} r+={rp}")));
        }
    }
    Ok(out)
}

/// Set of loop values over all components.
pub fn loop_set(e: &dyn IndexEvaluator, d: &GaussDiagram) -> Result<Vec<IndexValue>> {
    let mut set = Vec::new();
    for c in 0..d.n_components() {
        for (_, x) in loop_values(e, d, c)? {
            if !set.contains(&x) {
                set.push(x);
            }
        }
    }
    Ok(set)
}

/// Element of A_sigma = Z[S \ L] / <x + x*>: integer coefficients on orbit
/// representatives, Z_2 coefficients on self-dual values.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndexPolynomial {
    pub ints: BTreeMap<String, i64>,
    pub z2: BTreeMap<String, u8>,
}

impl IndexPolynomial {
    pub fn is_zero(&self) -> bool {
        self.ints.is_empty() && self.z2.is_empty()
    }

    fn add_int(&mut self, k: String, c: i64) {
        let e = self.ints.entry(k.clone()).or_insert(0);
        *e += c;
        if *e == 0 {
            self.ints.remove(&k);
        }
    }

    fn add_z2(&mut self, k: String) {
        let e = self.z2.entry(k.clone()).or_insert(0);
        *e ^= 1;
        if *e == 0 {
            self.z2.remove(&k);
        }
    }
}

impl fmt::Display for IndexPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = self.ints.iter().map(|(k, c)| format!("{c}[{k}]")).collect();
        parts.extend(self.z2.keys().map(|k| format!("1[{k}] (mod 2)")));
        write!(f, "{}", parts.join(" + "))
    }
}

/// lk_sigma(D) = sum over v with sigma(v) not in L of 1 * sigma(v) in A_sigma. An unsigned
/// index iota enters through its signed form (iota, sgn), which gives sum sgn(v) [iota(v)].
pub fn lk_polynomial(d: &GaussDiagram, e: &dyn IndexEvaluator, loops: &[IndexValue]) -> Result<IndexPolynomial> {
    let mut p = IndexPolynomial::default();
    if !e.signed() {
        require_virtual(d)?;
    }
    for (v, x) in e.eval_all(d)?.into_iter().enumerate() {
        if loops.contains(&x) {
            continue;
        }
        if !e.signed() {
            p.add_int(x.label(), d.raw_sign(v) as i64);
            continue;
        }
        let y = e.involution(&x);
        if x == y {
            p.add_z2(x.label());
        } else if x.label() < y.label() {
            p.add_int(x.label(), 1);
        } else {
            p.add_int(y.label(), -1);
        }
    }
    Ok(p)
}

/// Cheng's odd index polynomial written in the signed form sum sgn(v) [Ind(v)], Ind(v) != 0.
pub fn cheng_f(d: &GaussDiagram) -> Result<LaurentPoly> {
    require_virtual(d)?;
    let ind = GaussianInd.eval_all(d)?;
    let mut p = LaurentPoly::default();
    for (v, x) in ind.iter().enumerate() {
        if let IndexValue::Int(k) = x {
            if *k != 0 {
                p.add_term(*k, d.raw_sign(v) as i64);
            }
        }
    }
    Ok(p)
}

/// Reads an lk polynomial of tilde(Ind) as an integer polynomial: [(k,+)] -> t^k.
pub fn tilde_int_poly(p: &IndexPolynomial) -> Option<LaurentPoly> {
    if !p.z2.is_empty() {
        return None;
    }
    let mut out = LaurentPoly::default();
    for (k, &c) in &p.ints {
        let v: IndexValue = serde_json::from_str(k).ok()?;
        match v {
            IndexValue::Signed { value, sign } => match *value {
                IndexValue::Int(x) => out.add_term(x, c * sign as i64),
                _ => return None,
            },
            _ => return None,
        }
    }
    Some(out)
}

/// Flat end role of the head of `w`, used by the chord-combinatorial formulas.
pub(crate) fn head_pos(d: &GaussDiagram, w: usize) -> crate::gauss::Pos {
    d.pos(w, Role::Head)
}

/// Diagram obtained by deleting the chords with nonzero weak parity.
pub fn parity_projection(d: &GaussDiagram, odd: &[bool]) -> (GaussDiagram, crate::gauss::Correspondence) {
    let remove: Vec<usize> = d.chords().filter(|&v| odd[v]).collect();
    d.delete_chords(&remove)
}

/// Registry of named evaluators.
pub fn evaluator_by_name(name: &str) -> Option<Evaluator> {
    let e: Evaluator = match name {
        "sign" => Arc::new(SignIndex),
        "component" => Arc::new(ComponentIdx),
        "flat_component" => Arc::new(FlatComponentIdx),
        "order" => Arc::new(OrderIdx),
        "flat_order" => Arc::new(FlatOrderIdx),
        "n" => Arc::new(GaussianN),
        "Ind" | "ind" => Arc::new(GaussianInd),
        "hat_n" => Arc::new(Hat(Arc::new(GaussianN))),
        "tilde_Ind" => Arc::new(Tilde(Arc::new(GaussianInd))),
        "hp" => Arc::new(HomologicalParity),
        "nprime" => Arc::new(DerivedParity { order: 1 }),
        "nsecond" => Arc::new(DerivedParity { order: 2 }),
        "secondary" => Arc::new(SecondaryIndex),
        "weak_Ind2" => Arc::new(WeakParity { base: Arc::new(GaussianInd), modulus: 2 }),
        "induced" => Arc::new(InducedIndex {
            iota: Arc::new(GaussianInd),
            psi: Arc::new(WeakParity { base: Arc::new(GaussianInd), modulus: 2 }),
        }),
        "vkp" => Arc::new(VkpIndex { m: 1 }),
        "smooth_or" => Arc::new(SmoothingIndex { kind: SmoothingKind::Oriented }),
        "smooth_un" => Arc::new(SmoothingIndex { kind: SmoothingKind::Unoriented }),
        "bm" => Arc::new(BasedMatrixIndex { graded: false }),
        "bm_graded" => Arc::new(BasedMatrixIndex { graded: true }),
        "intersection" => Arc::new(IntersectionIndex { alpha: 1, beta: 1 }),
        _ => return None,
    };
    Some(e)
}

pub const INDEX_NAMES: &[&str] = &[
    "sign",
    "component",
    "flat_component",
    "order",
    "flat_order",
    "n",
    "Ind",
    "hat_n",
    "tilde_Ind",
    "hp",
    "nprime",
    "nsecond",
    "secondary",
    "weak_Ind2",
    "induced",
    "vkp",
    "smooth_or",
    "smooth_un",
    "bm",
    "bm_graded",
    "intersection",
];

pub fn all_evaluators() -> Vec<Evaluator> {
    INDEX_NAMES.iter().map(|n| evaluator_by_name(n).unwrap()).collect()
}
