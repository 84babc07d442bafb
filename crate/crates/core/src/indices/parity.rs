use super::*;
use crate::gauss::Half;
use crate::moves::{r1_removable, r3_triangles};

/// n^{(k)}: p'(v) = sum over v' of p(v') (D^l_v . D^-_{v'}) in A / <sum p(v) Ind(v)>,
/// starting from p = n. Returns the values and the modulus (0 for Z).
pub fn derived_parity(d: &GaussDiagram, order: usize) -> Result<(Vec<i64>, i64)> {
    require_virtual(d)?;
    require_knot(d)?;
    let sf = surface_of(d)?;
    let k = d.n_chords();
    let halves: Vec<_> = d.chords().map(|v| sf.half_chain(v, Half::Left)).collect::<Result<_>>()?;
    let whole = sf.diagram_chain();
    let n: Vec<i64> = halves.iter().map(|h| sf.inter(&whole, h)).collect();
    let ind = gaussian_ind(d)?;
    let mut inter = vec![vec![0i64; k]; k];
    for v in 0..k {
        for w in 0..k {
            let ll = if v == w { 0 } else { sf.inter(&halves[v], &halves[w]) };
            // D^l_v . D^r_w = D^l_v . D - D^l_v . D^l_w
            inter[v][w] = if d.raw_sign(w) < 0 { ll } else { -n[v] - ll };
        }
    }
    let mut p = n;
    let mut m = 0i64;
    for _ in 0..order {
        let total: i64 = p.iter().zip(&ind).map(|(a, b)| a * b).sum();
        m = gcd(m, total);
        p = (0..k)
            .map(|v| {
                let s: i64 = (0..k).map(|w| p[w] * inter[v][w]).sum();
                if m > 0 {
                    s.rem_euclid(m)
                } else {
                    s
                }
            })
            .collect();
    }
    Ok((p, m))
}

pub struct DerivedParity {
    pub order: usize,
}

impl IndexEvaluator for DerivedParity {
    fn name(&self) -> String {
        format!("n{}", "'".repeat(self.order))
    }
    fn signed(&self) -> bool {
        true
    }
    fn involution(&self, x: &IndexValue) -> IndexValue {
        x.negate().unwrap_or_else(|| x.clone())
    }
    fn applies(&self, d: &GaussDiagram) -> bool {
        d.flavor() == Flavor::Virtual && is_knot_like(d)
    }
    fn eval_all(&self, d: &GaussDiagram) -> Result<Vec<IndexValue>> {
        let (p, m) = derived_parity(d, self.order)?;
        Ok(p.into_iter().map(|x| IndexValue::modular(x, m)).collect())
    }
}

/// sigma_p(v) = sum over v' of lk(v, v') [lk(v, v') p(v')] in Z[Z / <p(v)>], with p = n.
pub fn secondary_index(d: &GaussDiagram, p: &[i64]) -> Vec<RingElement> {
    d.chords()
        .map(|v| {
            let mut r = RingElement::new(p[v]);
            for w in d.chords() {
                let l = d.lk_pair(v, w) as i64;
                if l != 0 {
                    r.add_term(l * p[w], l);
                }
            }
            r
        })
        .collect()
}

pub struct SecondaryIndex;

impl IndexEvaluator for SecondaryIndex {
    fn name(&self) -> String {
        "secondary".into()
    }
    fn signed(&self) -> bool {
        true
    }
    fn involution(&self, x: &IndexValue) -> IndexValue {
        match x {
            IndexValue::Ring(r) => IndexValue::Ring(r.star()),
            other => other.clone(),
        }
    }
    fn applies(&self, d: &GaussDiagram) -> bool {
        d.flavor() != Flavor::Free && is_knot_like(d)
    }
    fn eval_all(&self, d: &GaussDiagram) -> Result<Vec<IndexValue>> {
        let f = d.with_flavor(Flavor::Flat);
        let n = gaussian_n(&f)?;
        Ok(secondary_index(&f, &n).into_iter().map(IndexValue::Ring).collect())
    }
}

/// psi_p(v) = [p(v) != 0], with p reduced mod `modulus` first (0 for no reduction).
pub struct WeakParity {
    pub base: Evaluator,
    pub modulus: i64,
}

impl WeakParity {
    pub fn odd(&self, d: &GaussDiagram) -> Result<Vec<bool>> {
        Ok(self
            .eval_all(d)?
            .into_iter()
            .map(|x| x == IndexValue::Int(1))
            .collect())
    }
}

impl IndexEvaluator for WeakParity {
    fn name(&self) -> String {
        if self.modulus == 0 {
            format!("psi({})", self.base.name())
        } else {
            format!("psi({}_{})", self.base.name(), self.modulus)
        }
    }
    fn signed(&self) -> bool {
        false
    }
    fn applies(&self, d: &GaussDiagram) -> bool {
        self.base.applies(d)
    }
    fn eval_all(&self, d: &GaussDiagram) -> Result<Vec<IndexValue>> {
        let m = self.modulus;
        Ok(self
            .base
            .eval_all(d)?
            .into_iter()
            .map(|x| {
                let odd = match x.scale(1) {
                    Some(IndexValue::Int(k)) if m > 0 => k.rem_euclid(m) != 0,
                    Some(IndexValue::Mod { value, modulus }) if m > 0 => {
                        IndexValue::modular(value, gcd(modulus, m)) != IndexValue::modular(0, gcd(modulus, m))
                    }
                    Some(v) => !v.is_zero(),
                    None => false,
                };
                IndexValue::Int(odd as i64)
            })
            .collect())
    }
}

/// psi(iota)(v) = bullet if psi(v) != 0, else iota of the image of v in the projection.
pub struct InducedIndex {
    pub iota: Evaluator,
    pub psi: Arc<WeakParity>,
}

impl IndexEvaluator for InducedIndex {
    fn name(&self) -> String {
        format!("{}({})", self.psi.name(), self.iota.name())
    }
    fn signed(&self) -> bool {
        self.iota.signed()
    }
    fn involution(&self, x: &IndexValue) -> IndexValue {
        match x {
            IndexValue::Bullet => IndexValue::Bullet,
            other => self.iota.involution(other),
        }
    }
    fn applies(&self, d: &GaussDiagram) -> bool {
        self.iota.applies(d) && self.psi.applies(d)
    }
    fn eval_all(&self, d: &GaussDiagram) -> Result<Vec<IndexValue>> {
        let odd = self.psi.odd(d)?;
        let (proj, corr) = parity_projection(d, &odd);
        let vals = self.iota.eval_all(&proj)?;
        Ok(d.chords()
            .map(|v| match corr.get(v) {
                Some(w) if !odd[v] => vals[w].clone(),
                _ => IndexValue::Bullet,
            })
            .collect())
    }
    fn transported(&self) -> bool {
        self.iota.transported()
    }
}

/// Incidence signs of the crossings (tm, tb, mb) of a third-move triangle.
pub fn incidence_signs(signs: [i8; 3]) -> [i64; 3] {
    [signs[0] as i64, -(signs[1] as i64), signs[2] as i64]
}

/// Checks (P0) on every kink and (P3+) on every third-move triangle of each diagram.
/// Returns the number of checked sites.
pub fn check_oriented_parity(p: &dyn IndexEvaluator, diagrams: &[GaussDiagram]) -> Result<usize> {
    let mut checked = 0;
    for d in diagrams {
        if !p.applies(d) {
            continue;
        }
        let vals = p.eval_all(d)?;
        for v in d.chords() {
            if r1_removable(d, v) {
                checked += 1;
                if !vals[v].is_zero() {
                    return Err(Error::AxiomViolation(format!(
                        "P0: {} = {} on kink {} of {d}",
                        p.name(),
                        vals[v],
                        v + 1
                    )));
                }
            }
        }
        for t in r3_triangles(d) {
            checked += 1;
            let eps = incidence_signs(t.signs);
            let mut sum: Option<IndexValue> = vals[t.tm].zero_like();
            for (k, v) in [t.tm, t.tb, t.mb].into_iter().enumerate() {
                sum = sum.and_then(|s| vals[v].scale(eps[k]).and_then(|x| s.add(&x)));
            }
            match sum {
                Some(s) if s.is_zero() => {}
                _ => {
                    let mv = MoveInstance::R3 { pairs: t.pairs };
                    return Err(Error::AxiomViolation(format!(
                        "P3+: {} on {} in {d}",
                        p.name(),
                        serde_json::to_string(&mv).unwrap()
                    )));
                }
            }
        }
    }
    Ok(checked)
}
