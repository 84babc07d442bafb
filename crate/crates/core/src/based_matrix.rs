use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauss::{Flavor, GaussDiagram, Half};
use crate::surface::Surface;

/// A based matrix (G, s, d, b, eps) with optional grading. Index 0 is s.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasedMatrix {
    pub labels: Vec<String>,
    pub b: Vec<Vec<i64>>,
    pub d: Option<usize>,
    pub eps: i8,
    /// Signs of G \ {s}; entry 0 is unused.
    pub grading: Option<Vec<i8>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Special {
    pub annihilating: Vec<usize>,
    pub core: Vec<usize>,
    pub complementary: Vec<(usize, usize)>,
}

impl Special {
    pub fn is_empty(&self) -> bool {
        self.annihilating.is_empty() && self.core.is_empty() && self.complementary.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Extension {
    /// New annihilating element.
    M1,
    /// New core element.
    M2,
    /// New complementary pair; `row` gives b(g1, h) for the old elements h (s first).
    M3 { row: Vec<i64> },
}

impl BasedMatrix {
    pub fn size(&self) -> usize {
        self.b.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.size();
        if n == 0 || self.labels.len() != n || self.b.iter().any(|r| r.len() != n) {
            return Err(Error::NotApplicable("malformed based matrix".into()));
        }
        for i in 0..n {
            for j in 0..n {
                if self.b[i][j] != -self.b[j][i] {
                    return Err(Error::NotApplicable(format!("form is not skew-symmetric at ({i}, {j})")));
                }
            }
        }
        if let Some(d) = self.d {
            if d == 0 || d >= n {
                return Err(Error::NotApplicable("d must be an element other than s".into()));
            }
        }
        if let Some(g) = &self.grading {
            if g.len() != n {
                return Err(Error::NotApplicable("grading has the wrong length".into()));
            }
            if let Some(d) = self.d {
                if g[d] != self.eps {
                    return Err(Error::NotApplicable("eps differs from the grading of d".into()));
                }
            }
        }
        Ok(())
    }

    fn sg(&self, g: usize) -> i8 {
        self.grading.as_ref().map_or(1, |v| v[g])
    }

    pub fn is_annihilating(&self, g: usize) -> bool {
        g != 0 && self.b[g].iter().all(|&x| x == 0)
    }

    pub fn is_core(&self, g: usize) -> bool {
        g != 0 && (0..self.size()).all(|h| self.b[g][h] == self.b[0][h])
    }

    pub fn are_complementary(&self, g1: usize, g2: usize) -> bool {
        if g1 == 0 || g2 == 0 || g1 == g2 {
            return false;
        }
        if self.grading.is_some() && self.sg(g1) != -self.sg(g2) {
            return false;
        }
        (0..self.size()).all(|h| self.b[g1][h] + self.b[g2][h] == self.b[0][h])
    }

    /// Classification of every element of G \ {s}.
    pub fn find_special(&self) -> Special {
        let n = self.size();
        let mut sp = Special::default();
        for g in 1..n {
            if self.is_annihilating(g) {
                sp.annihilating.push(g);
            }
            if self.is_core(g) {
                sp.core.push(g);
            }
            for h in g + 1..n {
                if self.are_complementary(g, h) {
                    sp.complementary.push((g, h));
                }
            }
        }
        sp
    }

    /// Special elements that an excision may remove (d is never removed).
    pub fn excisable(&self) -> Special {
        let mut sp = self.find_special();
        let d = self.d;
        sp.annihilating.retain(|&g| Some(g) != d);
        sp.core.retain(|&g| Some(g) != d);
        sp.complementary.retain(|&(a, b)| Some(a) != d && Some(b) != d);
        sp
    }

    pub fn is_primitive(&self) -> bool {
        self.excisable().is_empty()
    }

    fn push_element(&mut self, label: String, row: Vec<i64>, grading: Option<i8>) {
        let n = self.size();
        for (i, r) in self.b.iter_mut().enumerate() {
            r.push(-row[i]);
        }
        let mut new_row = row;
        new_row.truncate(n);
        new_row.push(0);
        self.b.push(new_row);
        self.labels.push(label);
        if let Some(g) = &mut self.grading {
            g.push(grading.unwrap_or(1));
        }
    }

    fn fresh_label(&self) -> String {
        let mut k = self.size();
        loop {
            let l = format!("x{k}");
            if !self.labels.contains(&l) {
                return l;
            }
            k += 1;
        }
    }

    /// Adds elements by M1, M2 or M3; `grading` gives the signs of the new elements.
    pub fn extend(&self, m: &Extension, grading: &[i8]) -> Result<BasedMatrix> {
        let n = self.size();
        let mut t = self.clone();
        let gs = |i: usize| grading.get(i).copied();
        match m {
            Extension::M1 => {
                let l = t.fresh_label();
                t.push_element(l, vec![0; n], gs(0));
            }
            Extension::M2 => {
                let l = t.fresh_label();
                let row = self.b[0].clone();
                t.push_element(l, row, gs(0));
            }
            Extension::M3 { row } => {
                if row.len() != n {
                    return Err(Error::NotApplicable("M3 row has the wrong length".into()));
                }
                let g1 = gs(0).unwrap_or(1);
                let g2 = gs(1).unwrap_or(-g1);
                if self.grading.is_some() && g1 != -g2 {
                    return Err(Error::NotApplicable("complementary elements need opposite signs".into()));
                }
                let l1 = t.fresh_label();
                t.push_element(l1, row.clone(), Some(g1));
                let mut row2: Vec<i64> = (0..n).map(|h| self.b[0][h] - row[h]).collect();
                // b(g2, g1) = b(s, g1)
                row2.push(-row[0]);
                let l2 = t.fresh_label();
                t.push_element(l2, row2, Some(g2));
            }
        }
        Ok(t)
    }

    fn remove(&self, elems: &[usize]) -> BasedMatrix {
        let keep: Vec<usize> = (0..self.size()).filter(|i| !elems.contains(i)).collect();
        let b = keep.iter().map(|&i| keep.iter().map(|&j| self.b[i][j]).collect()).collect();
        let d = self.d.map(|d| keep.iter().position(|&i| i == d).expect("d kept"));
        BasedMatrix {
            labels: keep.iter().map(|&i| self.labels[i].clone()).collect(),
            b,
            d,
            eps: self.eps,
            grading: self.grading.as_ref().map(|g| keep.iter().map(|&i| g[i]).collect()),
        }
    }

    /// Inverse of M1/M2 (one element) or M3 (two elements).
    pub fn excise(&self, elems: &[usize]) -> Result<BasedMatrix> {
        let ok = match elems {
            [g] => Some(*g) != self.d && (self.is_annihilating(*g) || self.is_core(*g)),
            [g, h] => Some(*g) != self.d && Some(*h) != self.d && self.are_complementary(*g, *h),
            _ => false,
        };
        if !ok {
            return Err(Error::NotApplicable("elements are not excisable".into()));
        }
        Ok(self.remove(elems))
    }

    /// The move N: d and g complementary, d moves to g and eps changes sign.
    pub fn move_n(&self, g: usize) -> Result<BasedMatrix> {
        let d = self.d.ok_or_else(|| Error::NotApplicable("no distinguished element".into()))?;
        if !self.are_complementary(d, g) {
            return Err(Error::NotApplicable("d and g are not complementary".into()));
        }
        let mut t = self.clone();
        t.d = Some(g);
        t.eps = -self.eps;
        Ok(t)
    }

    /// Greedy excision in a fixed order.
    pub fn reduce_primitive(&self) -> BasedMatrix {
        let mut t = self.clone();
        loop {
            let sp = t.excisable();
            if let Some(&g) = sp.annihilating.first().or(sp.core.first()) {
                t = t.remove(&[g]);
            } else if let Some(&(a, b)) = sp.complementary.first() {
                t = t.remove(&[a, b]);
            } else {
                return t;
            }
        }
    }

    /// Excision with randomly chosen steps.
    pub fn reduce_primitive_random<R: Rng>(&self, rng: &mut R) -> BasedMatrix {
        let mut t = self.clone();
        loop {
            let sp = t.excisable();
            let mut options: Vec<Vec<usize>> = Vec::new();
            options.extend(sp.annihilating.iter().map(|&g| vec![g]));
            options.extend(sp.core.iter().map(|&g| vec![g]));
            options.extend(sp.complementary.iter().map(|&(a, b)| vec![a, b]));
            match options.choose(rng) {
                Some(o) => t = t.remove(o),
                None => return t,
            }
        }
    }

    /// Least key over all orderings of G \ {s}, by branch and bound.
    pub fn least_key(&self) -> Vec<i64> {
        let n = self.size();
        let rest: Vec<usize> = (1..n).collect();
        let mut best: Option<Vec<i64>> = None;
        let mut order = Vec::new();
        let mut used = vec![false; n];
        let mut blocks: Vec<Vec<i64>> = Vec::new();
        search_order(self, &rest, &mut order, &mut used, &mut blocks, &mut best);
        let mut key = vec![(n - 1) as i64, self.eps as i64];
        key.extend(best.unwrap_or_default());
        key
    }

    /// Rebuilds a matrix from a key produced by `least_key`.
    pub fn decode(key: &CanonicalMatrix) -> BasedMatrix {
        let key = &key.0;
        let k = key[0] as usize;
        let n = k + 1;
        let mut b = vec![vec![0i64; n]; n];
        let mut d = None;
        let mut grading = vec![0i8; n];
        let mut at = 2;
        for i in 0..k {
            let g = i + 1;
            if key[at] == 1 {
                d = Some(g);
            }
            grading[g] = key[at + 1] as i8;
            b[0][g] = key[at + 2];
            b[g][0] = -key[at + 2];
            for j in 0..i {
                let x = key[at + 3 + j];
                b[j + 1][g] = x;
                b[g][j + 1] = -x;
            }
            at += 3 + i;
        }
        BasedMatrix {
            labels: std::iter::once("s".to_string()).chain((1..n).map(|i| i.to_string())).collect(),
            b,
            d,
            eps: key[1] as i8,
            grading: grading[1..].iter().any(|&x| x != 0).then_some(grading),
        }
    }

    /// Canonical form of the homology class: primitive reduction, then the least key over
    /// isomorphisms, N moves and the exchange of a core d with an annihilating one.
    pub fn canonical(&self) -> CanonicalMatrix {
        let start = self.reduce_primitive();
        let mut seen: HashSet<Vec<i64>> = HashSet::new();
        let mut queue = VecDeque::new();
        let mut best: Option<(Vec<i64>, BasedMatrix)> = None;
        seen.insert(start.least_key());
        queue.push_back(start);
        while let Some(t) = queue.pop_front() {
            let k = t.least_key();
            if best.as_ref().map_or(true, |(b, _)| k < *b) {
                best = Some((k, t.clone()));
            }
            let mut next = Vec::new();
            if let Some(d) = t.d {
                for g in 1..t.size() {
                    if let Ok(u) = t.move_n(g) {
                        next.push(u.reduce_primitive());
                    }
                }
                if t.is_core(d) {
                    let mut u = t.clone();
                    for h in 0..u.size() {
                        u.b[d][h] = 0;
                        u.b[h][d] = 0;
                    }
                    u.eps = -u.eps;
                    if let Some(gr) = &mut u.grading {
                        gr[d] = -gr[d];
                    }
                    next.push(u.reduce_primitive());
                }
                if t.is_annihilating(d) {
                    let mut u = t.clone();
                    for h in 0..u.size() {
                        u.b[d][h] = t.b[0][h];
                        u.b[h][d] = -t.b[0][h];
                    }
                    u.b[d][d] = 0;
                    u.eps = -u.eps;
                    if let Some(gr) = &mut u.grading {
                        gr[d] = -gr[d];
                    }
                    next.push(u.reduce_primitive());
                }
            }
            for u in next {
                if seen.insert(u.least_key()) {
                    queue.push_back(u);
                }
            }
        }
        let (key, _) = best.expect("nonempty orbit");
        CanonicalMatrix(key)
    }

    /// The forms b^{ab}, corrected so that complementary elements have equal rows.
    pub fn b_alpha_beta(&self, alpha: i8, beta: i8) -> Result<Vec<Vec<i64>>> {
        let g = self.grading.as_ref().ok_or(Error::NotGraded)?;
        let n = self.size();
        let (a, bt) = (alpha as i64, beta as i64);
        let mut m = vec![vec![0i64; n]; n];
        for x in 1..n {
            let sx = g[x] as i64;
            m[x][0] = a * sx * self.b[x][0];
            m[0][x] = bt * sx * self.b[0][x];
            for y in 1..n {
                let sy = g[y] as i64;
                m[x][y] = a * bt * sx * sy * self.b[x][y]
                    + a * sx * (1 - bt * sy) / 2 * self.b[x][0]
                    + bt * sy * (1 - a * sx) / 2 * self.b[0][y];
            }
        }
        Ok(m)
    }

    /// The forms b^{ab} exactly as displayed in the literature formula.
    pub fn b_alpha_beta_literal(&self, alpha: i8, beta: i8) -> Result<Vec<Vec<i64>>> {
        let g = self.grading.as_ref().ok_or(Error::NotGraded)?;
        let n = self.size();
        let (a, bt) = (alpha as i64, beta as i64);
        let mut m = vec![vec![0i64; n]; n];
        for x in 1..n {
            let sx = g[x] as i64;
            m[x][0] = a * sx * self.b[x][0];
            m[0][x] = bt * sx * self.b[0][x];
            for y in 1..n {
                let sy = g[y] as i64;
                m[x][y] = a * bt * sx * sy * self.b[x][y] - (1 - a * sx) / 2 * self.b[x][0] - (1 - bt * sy) / 2 * self.b[0][y];
            }
        }
        Ok(m)
    }
}

fn block(t: &BasedMatrix, order: &[usize], i: usize, g: usize) -> Vec<i64> {
    let mut v = Vec::with_capacity(i + 3);
    v.push((Some(g) == t.d) as i64);
    v.push(t.grading.as_ref().map_or(0, |gr| gr[g] as i64));
    v.push(t.b[0][g]);
    for &h in &order[..i] {
        v.push(t.b[h][g]);
    }
    v
}

fn search_order(
    t: &BasedMatrix,
    rest: &[usize],
    order: &mut Vec<usize>,
    used: &mut [bool],
    blocks: &mut Vec<Vec<i64>>,
    best: &mut Option<Vec<i64>>,
) {
    if order.len() == rest.len() {
        let key: Vec<i64> = blocks.concat();
        if best.as_ref().map_or(true, |b| key < *b) {
            *best = Some(key);
        }
        return;
    }
    let i = order.len();
    let offset: usize = blocks.iter().map(|b| b.len()).sum();
    let mut cands: Vec<(Vec<i64>, usize)> = rest
        .iter()
        .filter(|&&g| !used[g])
        .map(|&g| {
            order.push(g);
            let b = block(t, order, i, g);
            order.pop();
            (b, g)
        })
        .collect();
    cands.sort();
    for (b, g) in cands {
        if let Some(bk) = best.as_ref() {
            // compare the prefix built so far against the best key
            let end = (offset + b.len()).min(bk.len());
            let prefix: Vec<i64> = blocks.concat().into_iter().chain(b.iter().copied()).collect();
            if prefix[..end] > bk[..end] {
                continue;
            }
        }
        used[g] = true;
        order.push(g);
        blocks.push(b);
        search_order(t, rest, order, used, blocks, best);
        blocks.pop();
        order.pop();
        used[g] = false;
    }
}

/// Canonical key of a based matrix class.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalMatrix(pub Vec<i64>);

impl CanonicalMatrix {
    /// The class with the opposite sign eps.
    pub fn eps(&self) -> i64 {
        self.0[1]
    }
}

/// Based matrix of a knot diagram: b(w, w') = D^l_w . D^l_w', b(s, w) = D . D^l_w.
/// With `mark`, d is that crossing and eps its sign (+1 on flat diagrams).
pub fn based_matrix_of(d: &GaussDiagram, mark: Option<usize>, graded: bool) -> Result<BasedMatrix> {
    if d.n_components() != 1 {
        return Err(Error::WrongComponentCount(d.n_components(), 1));
    }
    if graded && d.flavor() != Flavor::Virtual {
        return Err(Error::WrongFlavor { expected: "virtual" });
    }
    if let Some(v) = mark {
        d.check_chord(v)?;
    }
    let sf = Surface::new(&d.with_flavor(if d.flavor() == Flavor::Free { Flavor::Flat } else { d.flavor() }))?;
    let n = d.n_chords();
    let halves: Vec<_> = (0..n).map(|v| sf.half_chain(v, Half::Left)).collect::<Result<_>>()?;
    let whole = sf.diagram_chain();
    let mut b = vec![vec![0i64; n + 1]; n + 1];
    for w in 0..n {
        b[0][w + 1] = sf.inter(&whole, &halves[w]);
        b[w + 1][0] = -b[0][w + 1];
        for u in w + 1..n {
            let x = sf.inter(&halves[w], &halves[u]);
            b[w + 1][u + 1] = x;
            b[u + 1][w + 1] = -x;
        }
    }
    let mut labels = vec!["s".to_string()];
    labels.extend((1..=n).map(|i| i.to_string()));
    let signs = |v: usize| if d.flavor() == Flavor::Virtual { d.raw_sign(v) } else { 1 };
    let grading = graded.then(|| std::iter::once(0).chain((0..n).map(signs)).collect());
    Ok(BasedMatrix {
        labels,
        b,
        d: mark.map(|v| v + 1),
        eps: mark.map_or(1, signs),
        grading,
    })
}

/// Integer polynomial sum c_k t^k; exponents may be negative.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LaurentPoly(pub BTreeMap<i64, i64>);

impl LaurentPoly {
    pub fn add_term(&mut self, k: i64, c: i64) {
        let e = self.0.entry(k).or_insert(0);
        *e += c;
        if *e == 0 {
            self.0.remove(&k);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coeff(&self, k: i64) -> i64 {
        self.0.get(&k).copied().unwrap_or(0)
    }
}

impl std::fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&k, &c) in self.0.iter().rev() {
            let sign = if c < 0 { "-" } else { "+" };
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match (a, k) {
                (_, 0) => write!(f, "{a}")?,
                (1, 1) => write!(f, "t")?,
                (1, _) => write!(f, "t^{k}")?,
                (_, 1) => write!(f, "{a}t")?,
                _ => write!(f, "{a}t^{k}")?,
            }
        }
        Ok(())
    }
}

/// Loop values of iota^{ab} at the distinguished element.
pub fn intersection_loop_values(t: &BasedMatrix, alpha: i8) -> Result<BTreeSet<i64>> {
    let d = t.d.ok_or_else(|| Error::NotApplicable("no distinguished element".into()))?;
    let g = t.grading.as_ref().ok_or(Error::NotGraded)?;
    Ok([0, alpha as i64 * g[d] as i64 * t.b[d][0]].into_iter().collect())
}

/// i^{ab}(v) = sum over g != s, d with iota(g) = b^{ab}(d, g) outside the loop values of
/// sgn(g) t^{iota(g)}. The sign weights make complementary pairs cancel.
pub fn intersection_index(d: &GaussDiagram, v: usize, alpha: i8, beta: i8) -> Result<LaurentPoly> {
    let t = based_matrix_of(d, Some(v), true)?;
    let m = t.b_alpha_beta(alpha, beta)?;
    let dd = t.d.unwrap();
    let loops = intersection_loop_values(&t, alpha)?;
    let mut p = LaurentPoly::default();
    let gr = t.grading.as_ref().unwrap();
    for g in 1..t.size() {
        let x = m[dd][g];
        if g != dd && !loops.contains(&x) {
            p.add_term(x, gr[g] as i64);
        }
    }
    Ok(p)
}

/// A random primitive based matrix with `k` elements besides s.
pub fn random_primitive<R: Rng>(rng: &mut R, k: usize, with_d: bool, graded: bool) -> BasedMatrix {
    loop {
        let n = k + 1;
        let mut b = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let x = rng.gen_range(-2..=2);
                b[i][j] = x;
                b[j][i] = -x;
            }
        }
        let grading = graded.then(|| std::iter::once(0).chain((0..k).map(|_| if rng.gen() { 1 } else { -1 })).collect::<Vec<i8>>());
        let d = (with_d && k > 0).then(|| rng.gen_range(1..n));
        let eps = match (d, &grading) {
            (Some(d), Some(g)) => g[d],
            _ => if rng.gen() { 1 } else { -1 },
        };
        let t = BasedMatrix {
            labels: std::iter::once("s".to_string()).chain((1..n).map(|i| i.to_string())).collect(),
            b,
            d,
            eps,
            grading,
        };
        if t.find_special().is_empty() {
            return t;
        }
    }
}

/// Applies `count` random extensions and shuffles the labels.
pub fn random_extension<R: Rng>(rng: &mut R, t: &BasedMatrix, count: usize) -> BasedMatrix {
    let mut u = t.clone();
    let mut added = 0;
    while added < count {
        let graded = u.grading.is_some();
        let s1: i8 = if rng.gen() { 1 } else { -1 };
        let choice = if count - added >= 2 { rng.gen_range(0..3) } else { rng.gen_range(0..2) };
        u = match choice {
            0 => u.extend(&Extension::M1, &[s1]).unwrap(),
            1 => u.extend(&Extension::M2, &[s1]).unwrap(),
            _ => {
                let row = (0..u.size()).map(|_| rng.gen_range(-2..=2)).collect();
                let g = if graded { [s1, -s1] } else { [1, 1] };
                u.extend(&Extension::M3 { row }, &g).unwrap()
            }
        };
        added += if choice == 2 { 2 } else { 1 };
    }
    shuffle(rng, &u)
}

pub fn shuffle<R: Rng>(rng: &mut R, t: &BasedMatrix) -> BasedMatrix {
    let mut perm: Vec<usize> = (1..t.size()).collect();
    perm.shuffle(rng);
    let order: Vec<usize> = std::iter::once(0).chain(perm).collect();
    BasedMatrix {
        labels: order.iter().map(|&i| t.labels[i].clone()).collect(),
        b: order.iter().map(|&i| order.iter().map(|&j| t.b[i][j]).collect()).collect(),
        d: t.d.map(|d| order.iter().position(|&i| i == d).unwrap()),
        eps: t.eps,
        grading: t.grading.as_ref().map(|g| order.iter().map(|&i| g[i]).collect()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn k31() -> GaussDiagram {
        "c: O1- U2+ U3- O2+ U1- O3-".parse().unwrap()
    }

    #[test]
    fn matrix_of_3_1() {
        let t = based_matrix_of(&k31(), Some(0), false).unwrap();
        t.validate().unwrap();
        let want = vec![vec![0, -1, -1, 2], vec![1, 0, 0, 2], vec![1, 0, 0, 1], vec![-2, -2, -1, 0]];
        assert_eq!(t.b, want);
        assert_eq!(t.eps, -1);
        assert!(t.find_special().is_empty());
    }

    #[test]
    fn classical_matrix_is_zero() {
        let d: GaussDiagram = "c: O1+ U2+ O3+ U1+ O2+ U3+".parse().unwrap();
        let t = based_matrix_of(&d, Some(1), false).unwrap();
        assert!(t.b.iter().flatten().all(|&x| x == 0));
    }

    #[test]
    fn extend_and_excise() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = random_primitive(&mut rng, 3, true, true);
        let u = t.extend(&Extension::M1, &[1]).unwrap();
        assert_eq!(u.excise(&[4]).unwrap(), t);
        let c = t.canonical();
        assert_eq!(BasedMatrix::decode(&c).canonical(), c);
        let u = t.extend(&Extension::M2, &[-1]).unwrap();
        assert!(u.is_core(4));
        assert_eq!(u.excise(&[4]).unwrap(), t);
        let u = t.extend(&Extension::M3 { row: vec![1, 0, -2, 1] }, &[1, -1]).unwrap();
        u.validate().unwrap();
        assert!(u.find_special().complementary.contains(&(4, 5)));
        assert_eq!(u.excise(&[4, 5]).unwrap(), t);
    }

    #[test]
    fn move_n_flips_eps() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let t = random_primitive(&mut rng, 3, true, true);
        let d = t.d.unwrap();
        let row: Vec<i64> = (0..t.size()).map(|h| t.b[0][h] - t.b[d][h]).collect();
        let sd = t.grading.as_ref().unwrap()[d];
        let u = t.extend(&Extension::M3 { row }, &[-sd, sd]).unwrap();
        let g = t.size();
        assert!(u.are_complementary(d, g));
        let w = u.move_n(g).unwrap();
        assert_eq!(w.eps, -u.eps);
        assert_eq!(w.d, Some(g));
        assert_eq!(w.canonical(), u.canonical());
    }

    #[test]
    fn confluence_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let k = rng.gen_range(0..=4);
            let graded = rng.gen();
            let core = random_primitive(&mut rng, k, k > 0, graded);
            let count = rng.gen_range(0..=6);
            let ext = random_extension(&mut rng, &core, count);
            let red = ext.reduce_primitive_random(&mut rng);
            assert_eq!(red.canonical(), core.canonical());
        }
    }

    #[test]
    fn corrected_forms_respect_complementary_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..30 {
            let t = random_primitive(&mut rng, 3, true, true);
            let row = (0..t.size()).map(|_| rng.gen_range(-2..=2)).collect();
            let u = t.extend(&Extension::M3 { row }, &[1, -1]).unwrap();
            let (g1, g2) = (u.size() - 2, u.size() - 1);
            for (a, b) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                let m = u.b_alpha_beta(a, b).unwrap();
                assert_eq!(m[g1], m[g2]);
            }
        }
    }

    #[test]
    fn literal_forms_break_the_relation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut broken = 0;
        for _ in 0..30 {
            let t = random_primitive(&mut rng, 3, true, true);
            let row = (0..t.size()).map(|_| rng.gen_range(-2..=2)).collect();
            let u = t.extend(&Extension::M3 { row }, &[1, -1]).unwrap();
            let (g1, g2) = (u.size() - 2, u.size() - 1);
            let m = u.b_alpha_beta_literal(1, 1).unwrap();
            broken += (m[g1] != m[g2]) as usize;
        }
        assert!(broken > 0);
    }

    #[test]
    fn all_positive_forms_equal_b() {
        let mut t = based_matrix_of(&k31(), Some(0), true).unwrap();
        t.grading = Some(vec![0, 1, 1, 1]);
        t.eps = 1;
        assert_eq!(t.b_alpha_beta(1, 1).unwrap(), {
            let mut m = t.b.clone();
            m[0][0] = 0;
            m
        });
    }
}
