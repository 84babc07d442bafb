use super::*;
use crate::based_matrix::based_matrix_of;
use crate::gauss::{Component, Kind};

/// Turaev's u(t) = sum over n(v) != 0 of sgn(n(v)) t^{|n(v)|}.
pub fn turaev_u(d: &GaussDiagram) -> Result<LaurentPoly> {
    if d.flavor() == Flavor::Free {
        return Err(Error::WrongFlavor { expected: "flat" });
    }
    let n = gaussian_n(&d.with_flavor(Flavor::Flat))?;
    let mut p = LaurentPoly::default();
    for x in n {
        if x != 0 {
            p.add_term(x.abs(), x.signum());
        }
    }
    Ok(p)
}

/// a[i][j] = sum of signs over crossings with component index (i+1, j+1), i != j.
/// On flat diagrams: number of flat arrows from i to j minus those from j to i.
pub fn virtual_linking(d: &GaussDiagram) -> Result<Vec<Vec<i64>>> {
    let k = d.n_components();
    let mut a = vec![vec![0i64; k]; k];
    for v in d.chords() {
        match d.flavor() {
            Flavor::Virtual => {
                let (i, j) = d.component_index(v)?;
                if i != j {
                    a[i - 1][j - 1] += d.raw_sign(v) as i64;
                }
            }
            Flavor::Flat => {
                let (i, j) = d.flat_component_index(v)?;
                if i != j {
                    a[i - 1][j - 1] += 1;
                    a[j - 1][i - 1] -= 1;
                }
            }
            Flavor::Free => return Err(Error::WrongFlavor { expected: "virtual or flat" }),
        }
    }
    Ok(a)
}

/// Wriggle number of a 2-component link: lk_tau with the component index collapsed to Z,
/// W = sum of sgn over crossings with the second component on top minus the same sum with
/// the first on top. On flat links the antisymmetric flat count a_21.
pub fn wriggle(d: &GaussDiagram) -> Result<i64> {
    if d.n_components() != 2 {
        return Err(Error::WrongComponentCount(d.n_components(), 2));
    }
    let a = virtual_linking(d)?;
    Ok(match d.flavor() {
        Flavor::Flat => a[1][0],
        _ => a[1][0] - a[0][1],
    })
}

/// Component `c` alone, with its self-crossings.
pub fn component_knot(d: &GaussDiagram, c: usize) -> Result<GaussDiagram> {
    let remove: Vec<usize> = d.chords().filter(|&v| d.self_component(v) != Some(c)).collect();
    let (e, _) = d.delete_chords(&remove);
    let comp: Component = e.component(c).clone();
    let (k, _) = GaussDiagram::new(e.flavor(), vec![comp], e.signs().to_vec())?;
    Ok(k)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ComponentPrint {
    pub long: bool,
    pub u: LaurentPoly,
    pub matrix: CanonicalMatrix,
}

/// Invariants of a flat diagram: per component the u polynomial and the canonical
/// primitive based matrix, plus the flat linking numbers between components.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Fingerprint {
    pub components: Vec<ComponentPrint>,
    pub linking: Vec<Vec<i64>>,
}

pub fn fingerprint(d: &GaussDiagram) -> Result<Fingerprint> {
    let d = &d.with_flavor(Flavor::Flat);
    let mut components = Vec::new();
    for c in 0..d.n_components() {
        let k = component_knot(d, c)?.with_flavor(Flavor::Flat);
        let t = based_matrix_of(&k, None, false)?;
        components.push(ComponentPrint {
            long: d.component(c).kind == Kind::Long,
            u: turaev_u(&k)?,
            matrix: t.canonical(),
        });
    }
    Ok(Fingerprint { components, linking: virtual_linking(d)? })
}

impl Fingerprint {
    /// Renumbers the components in the given order.
    pub fn permuted(&self, order: &[usize]) -> Fingerprint {
        Fingerprint {
            components: order.iter().map(|&i| self.components[i].clone()).collect(),
            linking: order.iter().map(|&i| order.iter().map(|&j| self.linking[i][j]).collect()).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SmoothingKind {
    Oriented,
    Unoriented,
}

/// Smoothing at v and the fingerprint of its flat projection. The unoriented smoothing
/// has no preferred orientation, so its fingerprint is the least over both orientations.
pub fn smoothing_fingerprint(d: &GaussDiagram, v: usize, kind: SmoothingKind) -> Result<(GaussDiagram, Fingerprint)> {
    match kind {
        SmoothingKind::Oriented => {
            let s = d.oriented_smoothing(v)?.0;
            let f = fingerprint(&s)?;
            Ok((s, f))
        }
        SmoothingKind::Unoriented => {
            let s = d.unoriented_smoothing(v)?.0;
            let all: Vec<usize> = (0..s.n_components()).collect();
            let f = fingerprint(&s)?.min(fingerprint(&s.reverse_components(&all))?);
            Ok((s, f))
        }
    }
}

pub struct SmoothingIndex {
    pub kind: SmoothingKind,
}

impl IndexEvaluator for SmoothingIndex {
    fn name(&self) -> String {
        match self.kind {
            SmoothingKind::Oriented => "smooth_or",
            SmoothingKind::Unoriented => "smooth_un",
        }
        .into()
    }
    fn signed(&self) -> bool {
        self.kind == SmoothingKind::Oriented
    }
    fn involution(&self, x: &IndexValue) -> IndexValue {
        match x {
            IndexValue::Fingerprint(f) if self.kind == SmoothingKind::Oriented && f.components.len() == 2 => {
                IndexValue::Fingerprint(Box::new(f.permuted(&[1, 0])))
            }
            other => other.clone(),
        }
    }
    fn applies(&self, d: &GaussDiagram) -> bool {
        d.flavor() == Flavor::Virtual && is_knot_like(d)
    }
    fn eval_all(&self, d: &GaussDiagram) -> Result<Vec<IndexValue>> {
        d.chords()
            .map(|v| smoothing_fingerprint(d, v, self.kind).map(|(_, f)| IndexValue::Fingerprint(Box::new(f))))
            .collect()
    }
}

/// (Ind(v), |coefficient of t^m| in u of the flattened unoriented smoothing at v). The
/// absolute value makes the second entry independent of the orientation of the smoothing.
pub fn vkp_index(d: &GaussDiagram, v: usize, m: i64) -> Result<(i64, i64)> {
    require_virtual(d)?;
    let ind = gaussian_ind(d)?;
    d.check_chord(v)?;
    let (s, _) = d.unoriented_smoothing(v)?;
    let u = turaev_u(&s.with_flavor(Flavor::Flat))?;
    Ok((ind[v], u.coeff(m).abs()))
}

pub struct VkpIndex {
    pub m: i64,
}

impl IndexEvaluator for VkpIndex {
    fn name(&self) -> String {
        format!("vkp{}", self.m)
    }
    fn signed(&self) -> bool {
        false
    }
    fn applies(&self, d: &GaussDiagram) -> bool {
        d.flavor() == Flavor::Virtual && is_knot_like(d)
    }
    fn eval_all(&self, d: &GaussDiagram) -> Result<Vec<IndexValue>> {
        let ind = gaussian_ind(d)?;
        d.chords()
            .map(|v| {
                let (s, _) = d.unoriented_smoothing(v)?;
                let u = turaev_u(&s.with_flavor(Flavor::Flat))?;
                Ok(IndexValue::Pair(ind[v], u.coeff(self.m).abs()))
            })
            .collect()
    }
}
