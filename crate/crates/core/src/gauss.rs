use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Flavor {
    Virtual,
    Flat,
    Free,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Kind {
    Closed,
    Long,
}

/// Tail is the over-end of a virtual chord (arrow tail), Head the under-end.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Role {
    Tail,
    Head,
}

impl Role {
    pub fn other(self) -> Role {
        match self {
            Role::Tail => Role::Head,
            Role::Head => Role::Tail,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Role::Tail => 0,
            Role::Head => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct End {
    pub chord: usize,
    pub role: Role,
}

impl End {
    pub fn new(chord: usize, role: Role) -> End {
        End { chord, role }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pos {
    pub comp: usize,
    pub idx: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Component {
    pub kind: Kind,
    pub slots: Vec<End>,
}

impl Component {
    pub fn closed(slots: Vec<End>) -> Component {
        Component { kind: Kind::Closed, slots }
    }

    pub fn long(slots: Vec<End>) -> Component {
        Component { kind: Kind::Long, slots }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }
}

/// The two smoothing halves of a self-crossing, plus their signed names.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Half {
    Left,
    Right,
    Plus,
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfMap {
    pub left: usize,
    pub right: usize,
    pub plus: usize,
    pub minus: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TangleType {
    pub closed: usize,
    pub long: usize,
}

/// Surviving-crossing map f_* of a morphism: `map[v]` is the image of source chord `v`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Correspondence {
    pub map: Vec<Option<usize>>,
    pub target_len: usize,
}

impl Correspondence {
    pub fn identity(n: usize) -> Correspondence {
        Correspondence {
            map: (0..n).map(Some).collect(),
            target_len: n,
        }
    }

    pub fn from_perm(perm: &[usize]) -> Correspondence {
        Correspondence {
            map: perm.iter().map(|&v| Some(v)).collect(),
            target_len: perm.len(),
        }
    }

    pub fn get(&self, v: usize) -> Option<usize> {
        self.map.get(v).copied().flatten()
    }

    pub fn then(&self, next: &Correspondence) -> Correspondence {
        Correspondence {
            map: self.map.iter().map(|m| m.and_then(|v| next.get(v))).collect(),
            target_len: next.target_len,
        }
    }

    pub fn domain(&self) -> Vec<usize> {
        (0..self.map.len()).filter(|&v| self.map[v].is_some()).collect()
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.target_len];
        for v in self.map.iter().flatten() {
            if *v >= self.target_len || seen[*v] {
                return false;
            }
            seen[*v] = true;
        }
        true
    }

    /// Inverse on the image, as a correspondence from the target back to the source.
    pub fn inverse(&self) -> Correspondence {
        let mut map = vec![None; self.target_len];
        for (v, m) in self.map.iter().enumerate() {
            if let Some(w) = m {
                map[*w] = Some(v);
            }
        }
        Correspondence {
            map,
            target_len: self.map.len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussDiagram {
    flavor: Flavor,
    comps: Vec<Component>,
    signs: Vec<i8>,
    pos: Vec<[Pos; 2]>,
}

impl GaussDiagram {
    /// Validates and normalizes: chords are renumbered in first-visit order and,
    /// for free diagrams, the first visited end of each chord becomes its tail.
    /// Returns the diagram and the map old id -> new id.
    pub fn new(flavor: Flavor, comps: Vec<Component>, signs: Vec<i8>) -> Result<(GaussDiagram, Vec<usize>)> {
        let n = signs.len();
        let mut seen = vec![[false; 2]; n];
        for c in &comps {
            for e in &c.slots {
                if e.chord >= n {
                    return Err(Error::NoSuchChord(e.chord));
                }
                let s = &mut seen[e.chord][e.role.index()];
                if *s {
                    return Err(Error::RoleConflict(e.chord + 1));
                }
                *s = true;
            }
        }
        for (v, s) in seen.iter().enumerate() {
            if !s[0] || !s[1] {
                return Err(Error::UnbalancedLabel(v + 1));
            }
        }
        if flavor == Flavor::Virtual {
            if let Some(v) = signs.iter().position(|&s| s != 1 && s != -1) {
                return Err(Error::SignConflict(v + 1));
            }
        }
        Ok(Self::assemble(flavor, comps, signs))
    }

    pub(crate) fn assemble(flavor: Flavor, mut comps: Vec<Component>, signs: Vec<i8>) -> (GaussDiagram, Vec<usize>) {
        let n = signs.len();
        let mut relabel = vec![usize::MAX; n];
        let mut next = 0;
        let mut swap = vec![false; n];
        for c in &comps {
            for e in &c.slots {
                if relabel[e.chord] == usize::MAX {
                    relabel[e.chord] = next;
                    next += 1;
                    if flavor == Flavor::Free && e.role == Role::Head {
                        swap[e.chord] = true;
                    }
                }
            }
        }
        debug_assert_eq!(next, n);
        for c in comps.iter_mut() {
            for e in c.slots.iter_mut() {
                if swap[e.chord] {
                    e.role = e.role.other();
                }
                e.chord = relabel[e.chord];
            }
        }
        let mut new_signs = vec![1i8; n];
        if flavor == Flavor::Virtual {
            for v in 0..n {
                new_signs[relabel[v]] = signs[v];
            }
        }
        let mut pos = vec![[Pos { comp: 0, idx: 0 }; 2]; n];
        for (ci, c) in comps.iter().enumerate() {
            for (i, e) in c.slots.iter().enumerate() {
                pos[e.chord][e.role.index()] = Pos { comp: ci, idx: i };
            }
        }
        (
            GaussDiagram {
                flavor,
                comps,
                signs: new_signs,
                pos,
            },
            relabel,
        )
    }

    pub fn unknot() -> GaussDiagram {
        Self::assemble(Flavor::Virtual, vec![Component::closed(vec![])], vec![]).0
    }

    pub fn parse(text: &str) -> Result<GaussDiagram> {
        parse_gauss_code(text)
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn components(&self) -> &[Component] {
        &self.comps
    }

    pub fn component(&self, i: usize) -> &Component {
        &self.comps[i]
    }

    pub fn n_components(&self) -> usize {
        self.comps.len()
    }

    pub fn n_chords(&self) -> usize {
        self.signs.len()
    }

    pub fn chords(&self) -> std::ops::Range<usize> {
        0..self.signs.len()
    }

    pub fn tangle_type(&self) -> TangleType {
        let long = self.comps.iter().filter(|c| c.kind == Kind::Long).count();
        TangleType {
            closed: self.comps.len() - long,
            long,
        }
    }

    pub fn is_knot(&self) -> bool {
        self.comps.len() == 1 && self.comps[0].kind == Kind::Closed
    }

    pub fn check_chord(&self, v: usize) -> Result<()> {
        if v < self.n_chords() {
            Ok(())
        } else {
            Err(Error::NoSuchChord(v))
        }
    }

    pub fn pos(&self, v: usize, role: Role) -> Pos {
        self.pos[v][role.index()]
    }

    pub fn end_at(&self, p: Pos) -> End {
        self.comps[p.comp].slots[p.idx]
    }

    /// Sign of a virtual crossing.
    pub fn sign(&self, v: usize) -> Result<i8> {
        self.check_chord(v)?;
        if self.flavor != Flavor::Virtual {
            return Err(Error::WrongFlavor { expected: "virtual" });
        }
        Ok(self.signs[v])
    }

    /// The stored sign; +1 for flat and free chords.
    pub fn raw_sign(&self, v: usize) -> i8 {
        self.signs[v]
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// Role of an end in the flat picture (arrow kept for +, reversed for -).
    pub fn flat_role(&self, e: End) -> Role {
        if self.signs[e.chord] > 0 {
            e.role
        } else {
            e.role.other()
        }
    }

    /// Position of the flat tail or flat head of `v`.
    pub fn flat_pos(&self, v: usize, flat_role: Role) -> Pos {
        if self.signs[v] > 0 {
            self.pos(v, flat_role)
        } else {
            self.pos(v, flat_role.other())
        }
    }

    pub fn self_component(&self, v: usize) -> Option<usize> {
        let [a, b] = self.pos[v];
        (a.comp == b.comp).then_some(a.comp)
    }

    pub fn require_self(&self, v: usize) -> Result<usize> {
        self.check_chord(v)?;
        self.self_component(v).ok_or(Error::NotSelfCrossing(v))
    }

    /// Resolves a signed half name to Left or Right.
    pub fn resolve_half(&self, v: usize, half: Half) -> Half {
        match half {
            Half::Plus if self.signs[v] > 0 => Half::Left,
            Half::Plus => Half::Right,
            Half::Minus if self.signs[v] > 0 => Half::Right,
            Half::Minus => Half::Left,
            h => h,
        }
    }

    /// Slot indices strictly inside a half of self-crossing `v`, in traversal order.
    /// The left half runs from the flat head of `v` forward to its flat tail.
    /// Long components are treated as closed up through their endpoints.
    pub fn half_slots(&self, v: usize, half: Half) -> Result<(usize, Vec<usize>)> {
        let c = self.require_self(v)?;
        let (start, stop) = match self.resolve_half(v, half) {
            Half::Left => (self.flat_pos(v, Role::Head).idx, self.flat_pos(v, Role::Tail).idx),
            _ => (self.flat_pos(v, Role::Tail).idx, self.flat_pos(v, Role::Head).idx),
        };
        let k = self.comps[c].len();
        let mut out = Vec::new();
        let mut i = (start + 1) % k;
        while i != stop {
            out.push(i);
            i = (i + 1) % k;
        }
        Ok((c, out))
    }

    /// Membership mask over the slots of the component of `v` for the given half.
    pub fn half_mask(&self, v: usize, half: Half) -> Result<(usize, Vec<bool>)> {
        let (c, slots) = self.half_slots(v, half)?;
        let mut mask = vec![false; self.comps[c].len()];
        for i in slots {
            mask[i] = true;
        }
        Ok((c, mask))
    }

    pub fn linked(&self, v: usize, w: usize) -> bool {
        if v == w {
            return false;
        }
        let Some(c) = self.self_component(v) else { return false };
        if self.self_component(w) != Some(c) {
            return false;
        }
        let (_, mask) = self.half_mask(v, Half::Left).expect("self-crossing");
        mask[self.pos(w, Role::Tail).idx] != mask[self.pos(w, Role::Head).idx]
    }

    /// +1 if the flat head of `w` lies on the left half of `v`, -1 if its flat tail does,
    /// 0 when the chords are not linked.
    pub fn lk_pair(&self, v: usize, w: usize) -> i32 {
        if !self.linked(v, w) {
            return 0;
        }
        let (_, mask) = self.half_mask(v, Half::Left).expect("self-crossing");
        if mask[self.flat_pos(w, Role::Head).idx] {
            1
        } else {
            -1
        }
    }

    pub fn to_flat(&self) -> GaussDiagram {
        let mut comps = self.comps.clone();
        for c in comps.iter_mut() {
            for e in c.slots.iter_mut() {
                e.role = self.flat_role(*e);
            }
        }
        Self::assemble(Flavor::Flat, comps, vec![1; self.n_chords()]).0
    }

    pub fn to_free(&self) -> GaussDiagram {
        Self::assemble(Flavor::Free, self.comps.clone(), vec![1; self.n_chords()]).0
    }

    /// Reinterprets a flat or free diagram as virtual with all signs +1.
    pub fn lift_positive(&self) -> GaussDiagram {
        Self::assemble(Flavor::Virtual, self.comps.clone(), vec![1; self.n_chords()]).0
    }

    pub fn with_flavor(&self, flavor: Flavor) -> GaussDiagram {
        match flavor {
            Flavor::Virtual => {
                if self.flavor == Flavor::Virtual {
                    self.clone()
                } else {
                    self.lift_positive()
                }
            }
            Flavor::Flat => {
                if self.flavor == Flavor::Free {
                    Self::assemble(Flavor::Flat, self.comps.clone(), vec![1; self.n_chords()]).0
                } else {
                    self.to_flat()
                }
            }
            Flavor::Free => self.to_free(),
        }
    }

    pub fn crossing_change(&self, v: usize) -> Result<GaussDiagram> {
        self.sign(v)?;
        let mut comps = self.comps.clone();
        for c in comps.iter_mut() {
            for e in c.slots.iter_mut() {
                if e.chord == v {
                    e.role = e.role.other();
                }
            }
        }
        let mut signs = self.signs.clone();
        signs[v] = -signs[v];
        Ok(Self::assemble(Flavor::Virtual, comps, signs).0)
    }

    /// Removes the chords of `remove`; virtualization of those crossings.
    pub fn delete_chords(&self, remove: &[usize]) -> (GaussDiagram, Correspondence) {
        let mut keep = vec![true; self.n_chords()];
        for &v in remove {
            keep[v] = false;
        }
        let comps = self
            .comps
            .iter()
            .map(|c| Component {
                kind: c.kind,
                slots: c.slots.iter().copied().filter(|e| keep[e.chord]).collect(),
            })
            .collect();
        self.rebuild(comps, &keep)
    }

    pub fn virtualize(&self, v: usize) -> Result<(GaussDiagram, Correspondence)> {
        self.check_chord(v)?;
        Ok(self.delete_chords(&[v]))
    }

    /// Reassembles from new components in which only the chords with `keep` survive
    /// (with their old ids); returns the correspondence old -> new.
    pub(crate) fn rebuild(&self, comps: Vec<Component>, keep: &[bool]) -> (GaussDiagram, Correspondence) {
        self.rebuild_with_signs(comps, keep, &self.signs)
    }

    pub(crate) fn rebuild_with_signs(&self, mut comps: Vec<Component>, keep: &[bool], signs: &[i8]) -> (GaussDiagram, Correspondence) {
        let mut compact = vec![usize::MAX; keep.len()];
        let mut new_signs = Vec::new();
        for v in 0..keep.len() {
            if keep[v] {
                compact[v] = new_signs.len();
                new_signs.push(signs[v]);
            }
        }
        for c in comps.iter_mut() {
            for e in c.slots.iter_mut() {
                e.chord = compact[e.chord];
            }
        }
        let (d, relabel) = Self::assemble(self.flavor, comps, new_signs);
        let map = (0..keep.len()).map(|v| keep[v].then(|| relabel[compact[v]])).collect();
        let target_len = d.n_chords();
        (d, Correspondence { map, target_len })
    }

    /// Reverses the orientation of the listed components. A chord with exactly one end
    /// on a reversed component changes its sign (virtual) or its arrow (flat).
    pub fn reverse_components(&self, which: &[usize]) -> GaussDiagram {
        let mut rev = vec![false; self.comps.len()];
        for &c in which {
            rev[c] = true;
        }
        let mut comps = self.comps.clone();
        for (ci, c) in comps.iter_mut().enumerate() {
            if rev[ci] {
                c.slots.reverse();
            }
        }
        let mut count = vec![0u8; self.n_chords()];
        for v in self.chords() {
            for p in self.pos[v] {
                if rev[p.comp] {
                    count[v] += 1;
                }
            }
        }
        let (comps, signs) = self.reorient(comps, &count);
        Self::assemble(self.flavor, comps, signs).0
    }

    fn reorient(&self, mut comps: Vec<Component>, reversed_ends: &[u8]) -> (Vec<Component>, Vec<i8>) {
        let mut signs = self.signs.clone();
        for v in 0..reversed_ends.len() {
            if reversed_ends[v] == 1 {
                match self.flavor {
                    Flavor::Virtual => signs[v] = -signs[v],
                    Flavor::Flat => {
                        for c in comps.iter_mut() {
                            for e in c.slots.iter_mut() {
                                if e.chord == v {
                                    e.role = e.role.other();
                                }
                            }
                        }
                    }
                    Flavor::Free => {}
                }
            }
        }
        (comps, signs)
    }

    /// Oriented smoothing at `v`. For a self-crossing the component is split into the
    /// left half (placed at the old index) and the right half (placed right after it).
    /// A crossing between two components merges them and yields no half map.
    pub fn oriented_smoothing(&self, v: usize) -> Result<(GaussDiagram, Option<HalfMap>, Correspondence)> {
        self.check_chord(v)?;
        let mut keep = vec![true; self.n_chords()];
        keep[v] = false;
        if let Some(c) = self.self_component(v) {
            let comp = &self.comps[c];
            let (_, left) = self.half_slots(v, Half::Left)?;
            let (_, right) = self.half_slots(v, Half::Right)?;
            let take = |ix: &[usize]| ix.iter().map(|&i| comp.slots[i]).collect::<Vec<_>>();
            let (lk, rk) = match comp.kind {
                Kind::Closed => (Kind::Closed, Kind::Closed),
                Kind::Long => {
                    // The half passing through the endpoints stays long.
                    let h = self.flat_pos(v, Role::Head).idx;
                    let t = self.flat_pos(v, Role::Tail).idx;
                    if h < t {
                        (Kind::Closed, Kind::Long)
                    } else {
                        (Kind::Long, Kind::Closed)
                    }
                }
            };
            let lslots = match lk {
                Kind::Long => unwrap_long(take(&left), comp, v),
                Kind::Closed => take(&left),
            };
            let rslots = match rk {
                Kind::Long => unwrap_long(take(&right), comp, v),
                Kind::Closed => take(&right),
            };
            let mut comps = self.comps.clone();
            comps[c] = Component { kind: lk, slots: lslots };
            comps.insert(c + 1, Component { kind: rk, slots: rslots });
            let (d, corr) = self.rebuild(comps, &keep);
            let plus_left = self.signs[v] > 0;
            let hm = HalfMap {
                left: c,
                right: c + 1,
                plus: if plus_left { c } else { c + 1 },
                minus: if plus_left { c + 1 } else { c },
            };
            return Ok((d, Some(hm), corr));
        }
        let pa = self.flat_pos(v, Role::Tail);
        let pb = self.flat_pos(v, Role::Head);
        let ca = &self.comps[pa.comp];
        let cb = &self.comps[pb.comp];
        let cut = |c: &Component, i: usize| -> (Vec<End>, Vec<End>) { (c.slots[..i].to_vec(), c.slots[i + 1..].to_vec()) };
        let rot = |c: &Component, i: usize| -> Vec<End> {
            let mut s = c.slots[i + 1..].to_vec();
            s.extend_from_slice(&c.slots[..i]);
            s
        };
        let mut merged = Vec::new();
        match (ca.kind, cb.kind) {
            (Kind::Closed, Kind::Closed) => {
                let mut s = rot(ca, pa.idx);
                s.extend(rot(cb, pb.idx));
                merged.push(Component::closed(s));
            }
            (Kind::Long, Kind::Closed) | (Kind::Closed, Kind::Long) => {
                let (l, lp, c, cp) = if ca.kind == Kind::Long { (ca, pa.idx, cb, pb.idx) } else { (cb, pb.idx, ca, pa.idx) };
                let (pre, suf) = cut(l, lp);
                let mut s = pre;
                s.extend(rot(c, cp));
                s.extend(suf);
                merged.push(Component::long(s));
            }
            (Kind::Long, Kind::Long) => {
                let (p1, s1) = cut(ca, pa.idx);
                let (p2, s2) = cut(cb, pb.idx);
                merged.push(Component::long(p1.into_iter().chain(s2).collect()));
                merged.push(Component::long(p2.into_iter().chain(s1).collect()));
            }
        }
        let lo = pa.comp.min(pb.comp);
        let hi = pa.comp.max(pb.comp);
        let mut comps = self.comps.clone();
        comps.remove(hi);
        comps.remove(lo);
        for (k, m) in merged.into_iter().enumerate() {
            comps.insert(lo + k, m);
        }
        let (d, corr) = self.rebuild(comps, &keep);
        Ok((d, None, corr))
    }

    /// Unoriented smoothing at a self-crossing: one half keeps its orientation (the left
    /// half of a closed component, the outer part of a long one), the other is reversed.
    pub fn unoriented_smoothing(&self, v: usize) -> Result<(GaussDiagram, Correspondence)> {
        let c = self.require_self(v)?;
        let comp = &self.comps[c];
        let (kept, reversed): (Vec<End>, Vec<End>);
        let new_comp = match comp.kind {
            Kind::Closed => {
                let (_, l) = self.half_slots(v, Half::Left)?;
                let (_, r) = self.half_slots(v, Half::Right)?;
                kept = l.iter().map(|&i| comp.slots[i]).collect();
                reversed = r.iter().rev().map(|&i| comp.slots[i]).collect();
                let mut s = kept.clone();
                s.extend(reversed.iter().copied());
                Component::closed(s)
            }
            Kind::Long => {
                let a = self.pos(v, Role::Tail).idx.min(self.pos(v, Role::Head).idx);
                let b = self.pos(v, Role::Tail).idx.max(self.pos(v, Role::Head).idx);
                reversed = comp.slots[a + 1..b].iter().rev().copied().collect();
                let mut s = comp.slots[..a].to_vec();
                s.extend(reversed.iter().copied());
                s.extend_from_slice(&comp.slots[b + 1..]);
                Component::long(s)
            }
        };
        let mut count = vec![0u8; self.n_chords()];
        for e in &reversed {
            count[e.chord] += 1;
        }
        let mut comps = self.comps.clone();
        comps[c] = new_comp;
        let (comps, signs) = self.reorient(comps, &count);
        let mut keep = vec![true; self.n_chords()];
        keep[v] = false;
        Ok(self.rebuild_with_signs(comps, &keep, &signs))
    }

    /// Ordered pair of 1-based component numbers (over component, under component).
    pub fn component_index(&self, v: usize) -> Result<(usize, usize)> {
        self.sign(v)?;
        Ok((self.pos(v, Role::Tail).comp + 1, self.pos(v, Role::Head).comp + 1))
    }

    /// Ordered pair (flat tail component, flat head component).
    pub fn flat_component_index(&self, v: usize) -> Result<(usize, usize)> {
        self.check_chord(v)?;
        if self.flavor == Flavor::Free {
            return Err(Error::WrongFlavor { expected: "virtual or flat" });
        }
        Ok((self.flat_pos(v, Role::Tail).comp + 1, self.flat_pos(v, Role::Head).comp + 1))
    }

    /// +1 for an early overcrossing, -1 for an early undercrossing on a long component.
    pub fn order_index(&self, v: usize) -> Result<i8> {
        let c = self.require_self(v).map_err(|_| Error::NotLongComponent(v))?;
        if self.comps[c].kind != Kind::Long {
            return Err(Error::NotLongComponent(v));
        }
        if self.flavor == Flavor::Free {
            return Err(Error::WrongFlavor { expected: "virtual or flat" });
        }
        Ok(if self.pos(v, Role::Tail).idx < self.pos(v, Role::Head).idx { 1 } else { -1 })
    }

    /// +1 if the closed half of a long self-crossing is its left half.
    pub fn flat_order_index(&self, v: usize) -> Result<i8> {
        let c = self.require_self(v).map_err(|_| Error::NotLongComponent(v))?;
        if self.comps[c].kind != Kind::Long {
            return Err(Error::NotLongComponent(v));
        }
        Ok(if self.flat_pos(v, Role::Head).idx < self.flat_pos(v, Role::Tail).idx { 1 } else { -1 })
    }

    pub fn serialize(&self) -> String {
        self.comps
            .iter()
            .map(|c| {
                let mut s = String::from(match c.kind {
                    Kind::Closed => "c:",
                    Kind::Long => "l:",
                });
                for e in &c.slots {
                    s.push(' ');
                    s.push_str(&self.token(*e));
                }
                s
            })
            .collect::<Vec<_>>()
            .join(" ; ")
    }

    fn token(&self, e: End) -> String {
        let label = e.chord + 1;
        match self.flavor {
            Flavor::Virtual => {
                let r = if e.role == Role::Tail { 'O' } else { 'U' };
                let s = if self.signs[e.chord] > 0 { '+' } else { '-' };
                format!("{r}{label}{s}")
            }
            Flavor::Flat => {
                let r = if e.role == Role::Tail { 'T' } else { 'H' };
                format!("{r}{label}")
            }
            Flavor::Free => format!("E{label}"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (d, relabel) = GaussDiagram::new(self.flavor, self.comps.clone(), self.signs.clone())?;
        if relabel.iter().enumerate().any(|(i, &j)| i != j) || d != *self {
            return Err(Error::Parse("diagram is not normalized".into()));
        }
        Ok(())
    }
}

fn unwrap_long(cyclic: Vec<End>, comp: &Component, v: usize) -> Vec<End> {
    // The half through the endpoints was produced cyclically starting after one end of
    // `v`; reorder it to follow the long component from its start.
    let first_v = comp.slots.iter().position(|e| e.chord == v).unwrap();
    let tail_len = comp.len() - comp.slots.iter().rposition(|e| e.chord == v).unwrap() - 1;
    let mut out = cyclic[tail_len..].to_vec();
    out.extend_from_slice(&cyclic[..tail_len]);
    debug_assert_eq!(out.len(), first_v + tail_len);
    out
}

impl fmt::Display for GaussDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

impl std::str::FromStr for GaussDiagram {
    type Err = Error;
    fn from_str(s: &str) -> Result<GaussDiagram> {
        parse_gauss_code(s)
    }
}

pub fn parse_gauss_code(text: &str) -> Result<GaussDiagram> {
    let mut flavor: Option<Flavor> = None;
    let mut labels: Vec<usize> = Vec::new();
    let mut label_signs: Vec<Option<i8>> = Vec::new();
    let mut comps = Vec::new();
    let mut raw: Vec<Vec<(usize, Option<Role>)>> = Vec::new();
    for part in text.split(';') {
        let part = part.trim();
        let mut toks = part.split_whitespace();
        let head = toks.next().unwrap_or("");
        let kind = match head {
            "c:" => Kind::Closed,
            "l:" => Kind::Long,
            _ => return Err(Error::BadComponentKind(head.to_string())),
        };
        let mut slots = Vec::new();
        for t in toks {
            let mut chars = t.chars();
            let c0 = chars.next().ok_or_else(|| Error::BadToken(t.into()))?;
            let fl = match c0 {
                'O' | 'U' => Flavor::Virtual,
                'H' | 'T' => Flavor::Flat,
                'E' => Flavor::Free,
                _ => return Err(Error::BadToken(t.into())),
            };
            match flavor {
                None => flavor = Some(fl),
                Some(f) if f != fl => return Err(Error::MixedFlavor),
                _ => {}
            }
            let rest = &t[1..];
            let (num, sign) = if fl == Flavor::Virtual {
                match rest.chars().last() {
                    Some('+') => (&rest[..rest.len() - 1], Some(1i8)),
                    Some('-') => (&rest[..rest.len() - 1], Some(-1i8)),
                    _ => return Err(Error::SignMissing(t.into())),
                }
            } else {
                (rest, None)
            };
            let label: usize = num.parse().map_err(|_| Error::BadToken(t.into()))?;
            if label == 0 {
                return Err(Error::BadToken(t.into()));
            }
            let id = match labels.iter().position(|&l| l == label) {
                Some(i) => i,
                None => {
                    labels.push(label);
                    label_signs.push(None);
                    labels.len() - 1
                }
            };
            if let Some(s) = sign {
                match label_signs[id] {
                    None => label_signs[id] = Some(s),
                    Some(p) if p != s => return Err(Error::SignConflict(label)),
                    _ => {}
                }
            }
            let role = match c0 {
                'O' | 'T' => Some(Role::Tail),
                'U' | 'H' => Some(Role::Head),
                _ => None,
            };
            slots.push((id, role));
        }
        raw.push(slots);
        comps.push(kind);
    }
    let flavor = flavor.unwrap_or(Flavor::Virtual);
    let n = labels.len();
    let mut count = vec![0usize; n];
    for s in &raw {
        for (id, _) in s {
            count[*id] += 1;
        }
    }
    if let Some(i) = count.iter().position(|&c| c != 2) {
        return Err(Error::UnbalancedLabel(labels[i]));
    }
    let mut seen_free = vec![false; n];
    let components = raw
        .into_iter()
        .zip(comps)
        .map(|(slots, kind)| Component {
            kind,
            slots: slots
                .into_iter()
                .map(|(id, role)| {
                    let role = role.unwrap_or_else(|| {
                        let r = if seen_free[id] { Role::Head } else { Role::Tail };
                        seen_free[id] = true;
                        r
                    });
                    End::new(id, role)
                })
                .collect(),
        })
        .collect();
    let signs = label_signs.iter().map(|s| s.unwrap_or(1)).collect();
    GaussDiagram::new(flavor, components, signs)
        .map(|(d, _)| d)
        .map_err(|e| match e {
            Error::RoleConflict(v) => Error::RoleConflict(labels[v - 1]),
            Error::UnbalancedLabel(v) => Error::UnbalancedLabel(labels[v - 1]),
            other => other,
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> GaussDiagram {
        s.parse().unwrap()
    }

    #[test]
    fn parse_examples() {
        let t = d("c: O1+ U2+ O3+ U1+ O2+ U3+");
        assert_eq!(t.n_chords(), 3);
        assert_eq!(t.n_components(), 1);
        assert!(t.chords().all(|v| t.sign(v).unwrap() == 1));
        assert_eq!(t.serialize(), "c: O1+ U2+ O3+ U1+ O2+ U3+");
        let u = d("c:");
        assert_eq!(u.n_chords(), 0);
        assert_eq!(u.serialize(), "c:");
        assert_eq!(d("c: O1+ U1+ U2- O2-").n_chords(), 2);
        assert_eq!("c: O1+ O1+".parse::<GaussDiagram>(), Err(Error::RoleConflict(1)));
        assert_eq!("c: O1+ U1".parse::<GaussDiagram>(), Err(Error::SignMissing("U1".into())));
        assert_eq!("c: O1+ U2+ U1+".parse::<GaussDiagram>(), Err(Error::UnbalancedLabel(2)));
        assert_eq!("x: O1+ U1+".parse::<GaussDiagram>(), Err(Error::BadComponentKind("x:".into())));
        assert_eq!("c: O1+ U1-".parse::<GaussDiagram>(), Err(Error::SignConflict(1)));
        assert_eq!("c: O1+ H1".parse::<GaussDiagram>(), Err(Error::MixedFlavor));
    }

    #[test]
    fn relabels_in_first_visit_order() {
        let t = d("c: U7- O3+ U3+ O7-");
        assert_eq!(t.serialize(), "c: U1- O2+ U2+ O1-");
        let f = d("c: E5 E2 E5 E2");
        assert_eq!(f.serialize(), "c: E1 E2 E1 E2");
    }

    #[test]
    fn signs_of_3_1() {
        let k = d("c: O1- U2+ U3- O2+ U1- O3-");
        let s: Vec<i8> = k.chords().map(|v| k.sign(v).unwrap()).collect();
        assert_eq!(s, vec![-1, 1, -1]);
        let c = k.crossing_change(1).unwrap();
        assert_eq!(c.sign(1).unwrap(), -1);
        assert_eq!(c.crossing_change(1).unwrap(), k);
        assert!(k.to_flat().sign(0).is_err());
    }

    #[test]
    fn linking() {
        let t = d("c: O1+ U2+ O3+ U1+ O2+ U3+");
        for v in 0..3 {
            for w in 0..3 {
                assert_eq!(t.linked(v, w), v != w);
            }
        }
        let k = d("c: O1+ U1+ O2+ U2+");
        assert!(!k.linked(0, 1));
        let h = d("c: O1+ U2+ ; c: U1+ O2+");
        assert!(!h.linked(0, 1));
        assert_eq!(h.lk_pair(0, 1), 0);
    }

    #[test]
    fn halves_partition_the_component() {
        let k = d("c: O1- U2+ U3- O2+ U1- O3-");
        for v in k.chords() {
            let (_, l) = k.half_slots(v, Half::Left).unwrap();
            let (_, r) = k.half_slots(v, Half::Right).unwrap();
            assert_eq!(l.len() + r.len() + 2, 6);
            let (_, p) = k.half_slots(v, Half::Plus).unwrap();
            if k.sign(v).unwrap() > 0 {
                assert_eq!(p, l);
            } else {
                assert_eq!(p, r);
            }
        }
    }

    #[test]
    fn smoothing_a_kink() {
        let k = d("c: O1+ U1+");
        let (s, hm, _) = k.oriented_smoothing(0).unwrap();
        assert_eq!(s.n_components(), 2);
        assert_eq!(s.n_chords(), 0);
        assert!(hm.is_some());
        let (u, _) = k.unoriented_smoothing(0).unwrap();
        assert_eq!(u.serialize(), "c:");
    }

    #[test]
    fn smoothing_trefoil() {
        let t = d("c: O1+ U2+ O3+ U1+ O2+ U3+");
        let (s, hm, corr) = t.oriented_smoothing(0).unwrap();
        let hm = hm.unwrap();
        assert_eq!(s.n_components(), 2);
        assert_eq!(s.component(hm.left).len(), 2);
        assert_eq!(s.component(hm.right).len(), 2);
        assert_eq!(corr.domain(), vec![1, 2]);
        for w in s.chords() {
            assert!(s.self_component(w).is_none());
        }
    }

    #[test]
    fn long_halves() {
        let k = d("l: O1+ U2+ U1+ O2+");
        let (s, hm, _) = k.oriented_smoothing(0).unwrap();
        let hm = hm.unwrap();
        let kinds: Vec<Kind> = s.components().iter().map(|c| c.kind).collect();
        assert_eq!(kinds.iter().filter(|&&k| k == Kind::Closed).count(), 1);
        assert_eq!(s.component(hm.left).kind, Kind::Long);
        assert_eq!(k.flat_order_index(0).unwrap(), -1);
        assert_eq!(d("l: O1+ U1+").order_index(0).unwrap(), 1);
        assert_eq!(d("l: U1+ O1+").order_index(0).unwrap(), -1);
        assert!(d("c: O1+ U1+").order_index(0).is_err());
    }

    #[test]
    fn component_indices() {
        let h = d("c: O1+ U2+ ; c: U1+ O2+");
        assert_eq!(h.component_index(0).unwrap(), (1, 2));
        assert_eq!(h.component_index(1).unwrap(), (2, 1));
        let k = d("c: O1- U1-");
        assert_eq!(k.component_index(0).unwrap(), (1, 1));
        let m = d("c: O1- ; c: U1-");
        assert_eq!(m.component_index(0).unwrap(), (1, 2));
        assert_eq!(m.flat_component_index(0).unwrap(), (2, 1));
    }

    #[test]
    fn forgetful_maps() {
        let k = d("c: O1- U2+ U3- O2+ U1- O3-");
        assert_eq!(k.to_flat().serialize(), "c: H1 H2 T3 T2 T1 H3");
        assert_eq!(k.to_flat().to_free(), k.to_free());
        let p = d("c: O1+ U2+ O3+ U1+ O2+ U3+");
        assert_eq!(p.to_flat().serialize(), "c: T1 H2 T3 H1 T2 H3");
    }

    #[test]
    fn virtualize_all() {
        let k = d("c: O1- U2+ U3- O2+ U1- O3-");
        let (e, corr) = k.delete_chords(&[0, 1, 2]);
        assert_eq!(e.serialize(), "c:");
        assert!(corr.domain().is_empty());
        let (p, corr) = k.delete_chords(&[0, 1]);
        assert_eq!(p.n_chords(), 1);
        assert_eq!(corr.get(2), Some(0));
    }

    #[test]
    fn unoriented_reversal_twice() {
        let k = d("c: O1- U2+ U3- O2+ U1- O3-");
        let r = k.reverse_components(&[0]);
        assert_ne!(r, k);
        assert_eq!(r.reverse_components(&[0]), k);
    }
}
