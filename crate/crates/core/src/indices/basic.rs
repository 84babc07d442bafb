use super::*;
use crate::based_matrix::{based_matrix_of, intersection_index, BasedMatrix};
use crate::gauss::{Half, Kind};
use crate::surface::Surface;

fn negate_int(x: &IndexValue) -> IndexValue {
    match x {
        IndexValue::Int(k) => IndexValue::Int(-k),
        other => other.clone(),
    }
}

pub(crate) fn surface_of(d: &GaussDiagram) -> Result<Surface> {
    match d.flavor() {
        Flavor::Free => Err(Error::WrongFlavor { expected: "virtual or flat" }),
        _ => Surface::new(d),
    }
}

pub struct SignIndex;

impl IndexEvaluator for SignIndex {
    fn name(&self) -> String {
        "sign".into()
    }
    fn signed(&self) -> bool {
        true
    }
    fn involution(&self, x: &IndexValue) -> IndexValue {
        negate_int(x)
    }
    fn applies(&self, d: &GaussDiagram) -> bool {
        d.flavor() == Flavor::Virtual
    }
    fn eval_all(&self, d: &GaussDiagram) -> Result<Vec<IndexValue>> {
        require_virtual(d)?;
        Ok(d.chords().map(|v| IndexValue::Int(d.raw_sign(v) as i64)).collect())
    }
}

/// (over component, under component).
pub struct ComponentIdx;

impl IndexEvaluator for ComponentIdx {
    fn name(&self) -> String {
        "component".into()
    }
    fn signed(&self) -> bool {
        false
    }
    fn applies(&self, d: &GaussDiagram) -> bool {
        d.flavor() == Flavor::Virtual
    }
    fn eval_all(&self, d: &GaussDiagram) -> Result<Vec<IndexValue>> {
        d.chords()
            .map(|v| d.component_index(v).map(|(a, b)| IndexValue::Pair(a as i64, b as i64)))
            .collect()
    }
}

/// (flat tail component, flat head component), signed by the swap.
pub struct FlatComponentIdx;

impl IndexEvaluator for FlatComponentIdx {
    fn name(&self) -> String {
        "flat_component".into()
    }
    fn signed(&self) -> bool {
        true
    }
    fn involution(&self, x: &IndexValue) -> IndexValue {
        match x {
            IndexValue::Pair(a, b) => IndexValue::Pair(*b, *a),
            other => other.clone(),
        }
    }
    fn applies(&self, d: &GaussDiagram) -> bool {
        d.flavor() != Flavor::Free
    }
    fn eval_all(&self, d: &GaussDiagram) -> Result<Vec<IndexValue>> {
        d.chords()
            .map(|v| d.flat_component_index(v).map(|(a, b)| IndexValue::Pair(a as i64, b as i64)))
            .collect()
    }
}

fn on_long(d: &GaussDiagram, v: usize) -> bool {
    d.self_component(v).is_some_and(|c| d.component(c).kind == Kind::Long)
}

/// +1 for an early overcrossing on a long component; other crossings get a bullet.
pub struct OrderIdx;

impl IndexEvaluator for OrderIdx {
    fn name(&self) -> String {
        "order".into()
    }
    fn signed(&self) -> bool {
        false
    }
    fn applies(&self, d: &GaussDiagram) -> bool {
        d.flavor() == Flavor::Virtual && d.components().iter().any(|c| c.kind == Kind::Long)
    }
    fn eval_all(&self, d: &GaussDiagram) -> Result<Vec<IndexValue>> {
        d.chords()
            .map(|v| {
                if on_long(d, v) {
                    d.order_index(v).map(|x| IndexValue::Int(x as i64))
                } else {
                    Ok(IndexValue::Bullet)
                }
            })
            .collect()
    }
}

/// +1 if the closed half of a long self-crossing is its left half.
pub struct FlatOrderIdx;

impl IndexEvaluator for FlatOrderIdx {
    fn name(&self) -> String {
        "flat_order".into()
    }
    fn signed(&self) -> bool {
        true
    }
    fn involution(&self, x: &IndexValue) -> IndexValue {
        negate_int(x)
    }
    fn applies(&self, d: &GaussDiagram) -> bool {
        d.flavor() != Flavor::Free && d.components().iter().any(|c| c.kind == Kind::Long)
    }
    fn eval_all(&self, d: &GaussDiagram) -> Result<Vec<IndexValue>> {
        d.chords()
            .map(|v| {
                if on_long(d, v) {
                    d.flat_order_index(v).map(|x| IndexValue::Int(x as i64))
                } else {
                    Ok(IndexValue::Bullet)
                }
            })
            .collect()
    }
}

/// n(v) = D . D^l_v.
pub struct GaussianN;

pub fn gaussian_n(d: &GaussDiagram) -> Result<Vec<i64>> {
    require_knot(d)?;
    let sf = surface_of(d)?;
    d.chords().map(|v| sf.gaussian_n(v)).collect()
}

impl IndexEvaluator for GaussianN {
    fn name(&self) -> String {
        "n".into()
    }
    fn signed(&self) -> bool {
        true
    }
    fn involution(&self, x: &IndexValue) -> IndexValue {
        negate_int(x)
    }
    fn applies(&self, d: &GaussDiagram) -> bool {
        d.flavor() != Flavor::Free && is_knot_like(d)
    }
    fn eval_all(&self, d: &GaussDiagram) -> Result<Vec<IndexValue>> {
        Ok(gaussian_n(d)?.into_iter().map(IndexValue::Int).collect())
    }
}

/// Ind(v) = sum over chords w linked with v of sgn(w) dir(v, w), where dir is +1 when
/// the head of w lies on the half D^+_v.
pub fn gaussian_ind(d: &GaussDiagram) -> Result<Vec<i64>> {
    require_virtual(d)?;
    require_knot(d)?;
    let mut out = Vec::with_capacity(d.n_chords());
    for v in d.chords() {
        let (_, mask) = d.half_mask(v, Half::Plus)?;
        let mut s = 0i64;
        for w in d.chords() {
            if w != v && d.linked(v, w) {
                let dir = if mask[head_pos(d, w).idx] { 1 } else { -1 };
                s += d.raw_sign(w) as i64 * dir;
            }
        }
        out.push(s);
    }
    Ok(out)
}

pub struct GaussianInd;

impl IndexEvaluator for GaussianInd {
    fn name(&self) -> String {
        "Ind".into()
    }
    fn signed(&self) -> bool {
        false
    }
    fn applies(&self, d: &GaussDiagram) -> bool {
        d.flavor() == Flavor::Virtual && is_knot_like(d)
    }
    fn eval_all(&self, d: &GaussDiagram) -> Result<Vec<IndexValue>> {
        Ok(gaussian_ind(d)?.into_iter().map(IndexValue::Int).collect())
    }
}

/// Class of the left half in H_1(S) / <[K]>; coordinates depend on the diagram.
pub struct HomologicalParity;

pub fn homological_parity(d: &GaussDiagram) -> Result<Vec<IndexValue>> {
    require_knot(d)?;
    let sf = surface_of(d)?;
    let k = sf.coords(&sf.diagram_chain());
    let g = k.iter().fold(0i64, |a, &b| gcd(a, b.abs()));
    d.chords()
        .map(|v| sf.homological_parity(v).map(|c| IndexValue::Homology { class: c.0, modulus: g }))
        .collect()
}

pub(crate) fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl IndexEvaluator for HomologicalParity {
    fn name(&self) -> String {
        "hp".into()
    }
    fn signed(&self) -> bool {
        true
    }
    fn involution(&self, x: &IndexValue) -> IndexValue {
        x.negate().unwrap_or_else(|| x.clone())
    }
    fn applies(&self, d: &GaussDiagram) -> bool {
        d.flavor() != Flavor::Free && is_knot_like(d)
    }
    fn eval_all(&self, d: &GaussDiagram) -> Result<Vec<IndexValue>> {
        homological_parity(d)
    }
    fn transported(&self) -> bool {
        false
    }
}

/// Canonical primitive based matrix T(D, v, eps). Ungraded: the flattened diagram with
/// eps = +1, a signed index. Graded: eps = sgn(v) and grading by signs, an index.
pub struct BasedMatrixIndex {
    pub graded: bool,
}

impl IndexEvaluator for BasedMatrixIndex {
    fn name(&self) -> String {
        if self.graded { "bm_graded" } else { "bm" }.into()
    }
    fn signed(&self) -> bool {
        !self.graded
    }
    fn involution(&self, x: &IndexValue) -> IndexValue {
        match x {
            IndexValue::Matrix(m) if !self.graded => {
                let mut t = BasedMatrix::decode(m);
                t.eps = -t.eps;
                IndexValue::Matrix(t.canonical())
            }
            other => other.clone(),
        }
    }
    fn applies(&self, d: &GaussDiagram) -> bool {
        is_knot_like(d) && if self.graded { d.flavor() == Flavor::Virtual } else { d.flavor() != Flavor::Free }
    }
    fn eval_all(&self, d: &GaussDiagram) -> Result<Vec<IndexValue>> {
        let base = if self.graded { d.clone() } else { d.with_flavor(Flavor::Flat) };
        d.chords()
            .map(|v| based_matrix_of(&base, Some(v), self.graded).map(|t| IndexValue::Matrix(t.canonical())))
            .collect()
    }
}

/// i^{ab}(v) on virtual knots.
pub struct IntersectionIndex {
    pub alpha: i8,
    pub beta: i8,
}

impl IndexEvaluator for IntersectionIndex {
    fn name(&self) -> String {
        format!("intersection({},{})", self.alpha, self.beta)
    }
    fn signed(&self) -> bool {
        false
    }
    fn applies(&self, d: &GaussDiagram) -> bool {
        is_knot_like(d) && d.flavor() == Flavor::Virtual
    }
    fn eval_all(&self, d: &GaussDiagram) -> Result<Vec<IndexValue>> {
        d.chords()
            .map(|v| intersection_index(d, v, self.alpha, self.beta).map(IndexValue::Poly))
            .collect()
    }
}
