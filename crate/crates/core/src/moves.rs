use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauss::{Component, Correspondence, End, Flavor, GaussDiagram, Kind, Pos, Role};
use crate::surface::carter_surface;

/// Insertion point on a component: new ends go before slot `at`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Gap {
    pub comp: usize,
    pub at: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "move")]
pub enum MoveInstance {
    /// A kink on `gap`; `tail_first` says whether the over-end comes first.
    R1Add { gap: Gap, tail_first: bool, sign: i8 },
    R1Remove { chord: usize },
    /// Two new chords x (sign `sign`) and y (sign `-sign`); the over pair [x, y] goes to
    /// `over`, the under pair to `under` in the same or opposite order.
    R2Add { over: Gap, under: Gap, parallel: bool, sign: i8, over_first: bool },
    R2Remove { a: usize, b: usize },
    /// Three adjacent slot pairs whose contents are swapped.
    R3 { pairs: [(Pos, Pos); 3] },
    /// Moves the base slot of each closed component forward by the given shift.
    Rotate { shifts: Vec<usize> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MoveKind {
    R1Add,
    R1Remove,
    R2Add,
    R2Remove,
    R3,
    Rotate,
}

impl MoveInstance {
    pub fn kind(&self) -> MoveKind {
        match self {
            MoveInstance::R1Add { .. } => MoveKind::R1Add,
            MoveInstance::R1Remove { .. } => MoveKind::R1Remove,
            MoveInstance::R2Add { .. } => MoveKind::R2Add,
            MoveInstance::R2Remove { .. } => MoveKind::R2Remove,
            MoveInstance::R3 { .. } => MoveKind::R3,
            MoveInstance::Rotate { .. } => MoveKind::Rotate,
        }
    }

    pub fn crossing_delta(&self) -> i64 {
        match self.kind() {
            MoveKind::R1Add => 1,
            MoveKind::R1Remove => -1,
            MoveKind::R2Add => 2,
            MoveKind::R2Remove => -2,
            _ => 0,
        }
    }
}

/// Kink types. An over-first kink of sign - is l-, under-first + is l+,
/// over-first + is r+, under-first - is r-.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LoopType {
    LPlus,
    LMinus,
    RPlus,
    RMinus,
}

impl LoopType {
    pub fn of(tail_first: bool, sign: i8) -> LoopType {
        match (tail_first, sign > 0) {
            (true, false) => LoopType::LMinus,
            (false, true) => LoopType::LPlus,
            (true, true) => LoopType::RPlus,
            (false, false) => LoopType::RMinus,
        }
    }

    pub fn shape(self) -> (bool, i8) {
        match self {
            LoopType::LMinus => (true, -1),
            LoopType::LPlus => (false, 1),
            LoopType::RPlus => (true, 1),
            LoopType::RMinus => (false, -1),
        }
    }

    pub fn all() -> [LoopType; 4] {
        [LoopType::LPlus, LoopType::LMinus, LoopType::RPlus, LoopType::RMinus]
    }
}

pub fn next_pos(d: &GaussDiagram, p: Pos) -> Option<Pos> {
    let c = d.component(p.comp);
    let k = c.len();
    match c.kind {
        Kind::Closed if k >= 2 => Some(Pos { comp: p.comp, idx: (p.idx + 1) % k }),
        Kind::Long if p.idx + 1 < k => Some(Pos { comp: p.comp, idx: p.idx + 1 }),
        _ => None,
    }
}

pub fn prev_pos(d: &GaussDiagram, p: Pos) -> Option<Pos> {
    let c = d.component(p.comp);
    let k = c.len();
    match c.kind {
        Kind::Closed if k >= 2 => Some(Pos { comp: p.comp, idx: (p.idx + k - 1) % k }),
        Kind::Long if p.idx > 0 => Some(Pos { comp: p.comp, idx: p.idx - 1 }),
        _ => None,
    }
}

fn adjacent(d: &GaussDiagram, p: Pos, q: Pos) -> bool {
    next_pos(d, p) == Some(q) || next_pos(d, q) == Some(p)
}

pub fn gaps(d: &GaussDiagram) -> Vec<Gap> {
    let mut out = Vec::new();
    for (ci, c) in d.components().iter().enumerate() {
        let n = match c.kind {
            Kind::Closed => c.len().max(1),
            Kind::Long => c.len() + 1,
        };
        out.extend((0..n).map(|at| Gap { comp: ci, at }));
    }
    out
}

fn gap_valid(d: &GaussDiagram, g: Gap) -> bool {
    if g.comp >= d.n_components() {
        return false;
    }
    let c = d.component(g.comp);
    match c.kind {
        Kind::Closed => g.at < c.len().max(1),
        Kind::Long => g.at <= c.len(),
    }
}

/// Inserts sequences of ends; several sequences at one gap are concatenated in order.
fn insert_ends(comps: &mut [Component], mut inserts: Vec<(Gap, Vec<End>)>) {
    // stable sort by position descending so earlier indices stay valid
    inserts.sort_by(|a, b| (b.0.comp, b.0.at).cmp(&(a.0.comp, a.0.at)));
    let mut i = 0;
    while i < inserts.len() {
        let g = inserts[i].0;
        let mut j = i;
        let mut seq = Vec::new();
        // inserts at the same gap keep their original relative order
        let mut group = Vec::new();
        while j < inserts.len() && inserts[j].0 == g {
            group.push(j);
            j += 1;
        }
        for &k in &group {
            seq.extend(inserts[k].1.iter().copied());
        }
        let slots = &mut comps[g.comp].slots;
        let tail = slots.split_off(g.at);
        slots.extend(seq);
        slots.extend(tail);
        i = j;
    }
}

/// Finishes an additive move built on the positive lift of `d`: new chords carry
/// their virtual signs and are projected back to the flavor of `d`.
fn finish_add(d: &GaussDiagram, mut comps: Vec<Component>, new_signs: &[i8]) -> (GaussDiagram, Correspondence) {
    let n_old = d.n_chords();
    let mut signs: Vec<i8> = d.signs().to_vec();
    signs.extend_from_slice(new_signs);
    if d.flavor() == Flavor::Flat {
        for c in comps.iter_mut() {
            for e in c.slots.iter_mut() {
                if signs[e.chord] < 0 {
                    e.role = e.role.other();
                }
            }
        }
        for s in signs.iter_mut() {
            *s = 1;
        }
    }
    if d.flavor() == Flavor::Free {
        for s in signs.iter_mut() {
            *s = 1;
        }
    }
    let (nd, relabel) = GaussDiagram::assemble(d.flavor(), comps, signs);
    let map = (0..n_old).map(|v| Some(relabel[v])).collect();
    let target_len = nd.n_chords();
    (nd, Correspondence { map, target_len })
}

/// Whether an end may play the virtual role `want`, and with which sign(s).
fn lift_signs(d: &GaussDiagram, e: End, want: Role) -> Vec<i8> {
    match d.flavor() {
        Flavor::Virtual => {
            if e.role == want {
                vec![d.raw_sign(e.chord)]
            } else {
                vec![]
            }
        }
        Flavor::Flat => vec![if e.role == want { 1 } else { -1 }],
        Flavor::Free => vec![1, -1],
    }
}

fn other_end(e: End) -> End {
    End::new(e.chord, e.role.other())
}

/// Signs/orders of a braid-like triangle that can be realized by a third move.
/// T carries the over-ends of tm and tb, M the under-end of tm and the over-end of mb,
/// B the under-ends of tb and mb; o* tell whether the first named end comes first.
pub fn r3_config_valid(s_tm: i8, s_tb: i8, s_mb: i8, o_t: bool, o_m: bool, o_b: bool) -> bool {
    o_m == (o_t ^ (s_tb != s_mb)) && o_b == (o_t ^ (s_tm != s_mb))
}

/// A triangle admitting a third move: chord roles and the order bits of its three sides.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct R3Triangle {
    pub tm: usize,
    pub tb: usize,
    pub mb: usize,
    pub o_t: bool,
    pub o_m: bool,
    pub o_b: bool,
    /// Sides as adjacent slot pairs, sorted.
    pub pairs: [(Pos, Pos); 3],
    /// Signs of (tm, tb, mb); for flat and free diagrams a realizing lift.
    pub signs: [i8; 3],
}

pub fn r3_triangles(d: &GaussDiagram) -> Vec<R3Triangle> {
    let mut out = Vec::new();
    let mut seen: HashSet<[(Pos, Pos); 3]> = HashSet::new();
    for (ci, c) in d.components().iter().enumerate() {
        for i in 0..c.len() {
            let p = Pos { comp: ci, idx: i };
            let Some(q) = next_pos(d, p) else { continue };
            let (e1, e2) = (d.end_at(p), d.end_at(q));
            if e1.chord == e2.chord {
                continue;
            }
            for (tm_end, tb_end, o_t) in [(e1, e2, true), (e2, e1, false)] {
                let s_tm_opts = lift_signs(d, tm_end, Role::Tail);
                let s_tb_opts = lift_signs(d, tb_end, Role::Tail);
                if s_tm_opts.is_empty() || s_tb_opts.is_empty() {
                    continue;
                }
                let tm_h = other_end(tm_end);
                let tb_h = other_end(tb_end);
                let ph = d.pos(tm_h.chord, tm_h.role);
                for (nb, o_m) in [(next_pos(d, ph), true), (prev_pos(d, ph), false)] {
                    let Some(nb) = nb else { continue };
                    let f = d.end_at(nb);
                    if f.chord == tm_end.chord || f.chord == tb_end.chord {
                        continue;
                    }
                    let s_mb_opts = lift_signs(d, f, Role::Tail);
                    if s_mb_opts.is_empty() {
                        continue;
                    }
                    let mb_h = other_end(f);
                    let pt = d.pos(tb_h.chord, tb_h.role);
                    let pm = d.pos(mb_h.chord, mb_h.role);
                    for o_b in [true, false] {
                        let ok_adj = if o_b { next_pos(d, pt) == Some(pm) } else { next_pos(d, pm) == Some(pt) };
                        if !ok_adj {
                            continue;
                        }
                        let mut lift = None;
                        for &a in &s_tm_opts {
                            for &b in &s_tb_opts {
                                for &m in &s_mb_opts {
                                    if lift.is_none() && r3_config_valid(a, b, m, o_t, o_m, o_b) {
                                        lift = Some([a, b, m]);
                                    }
                                }
                            }
                        }
                        let Some(signs) = lift else { continue };
                        let pair_t = (p, q);
                        let pair_m = if o_m { (ph, nb) } else { (nb, ph) };
                        let pair_b = if o_b { (pt, pm) } else { (pm, pt) };
                        let mut key = [pair_t, pair_m, pair_b];
                        key.sort();
                        if seen.insert(key) {
                            out.push(R3Triangle {
                                tm: tm_end.chord,
                                tb: tb_end.chord,
                                mb: f.chord,
                                o_t,
                                o_m,
                                o_b,
                                pairs: key,
                                signs,
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

pub fn enumerate_r3(d: &GaussDiagram) -> Vec<MoveInstance> {
    r3_triangles(d).into_iter().map(|t| MoveInstance::R3 { pairs: t.pairs }).collect()
}

fn r2_removable(d: &GaussDiagram, a: usize, b: usize) -> bool {
    let at = d.pos(a, Role::Tail);
    let ah = d.pos(a, Role::Head);
    let bt = d.pos(b, Role::Tail);
    let bh = d.pos(b, Role::Head);
    match d.flavor() {
        Flavor::Virtual => d.raw_sign(a) == -d.raw_sign(b) && adjacent(d, at, bt) && adjacent(d, ah, bh),
        Flavor::Flat => adjacent(d, at, bh) && adjacent(d, ah, bt),
        Flavor::Free => (adjacent(d, at, bt) && adjacent(d, ah, bh)) || (adjacent(d, at, bh) && adjacent(d, ah, bt)),
    }
}

/// Unordered pairs of crossings admitting a decreasing second move.
pub fn i2_pairs(d: &GaussDiagram) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for a in d.chords() {
        for b in a + 1..d.n_chords() {
            if r2_removable(d, a, b) {
                out.push((a, b));
            }
        }
    }
    out
}

pub fn r1_removable(d: &GaussDiagram, v: usize) -> bool {
    let p = d.pos(v, Role::Tail);
    let q = d.pos(v, Role::Head);
    p.comp == q.comp && adjacent(d, p, q)
}

fn r1_variants(f: Flavor) -> &'static [(bool, i8)] {
    match f {
        Flavor::Virtual => &[(true, 1), (true, -1), (false, 1), (false, -1)],
        Flavor::Flat => &[(true, 1), (false, 1)],
        Flavor::Free => &[(true, 1)],
    }
}

fn r2_signs(f: Flavor) -> &'static [i8] {
    match f {
        Flavor::Free => &[1],
        _ => &[1, -1],
    }
}

/// All applicable moves; increasing moves are omitted when they would exceed `cap`.
pub fn enumerate_moves_capped(d: &GaussDiagram, cap: Option<usize>) -> Vec<MoveInstance> {
    let n = d.n_chords();
    let mut out = Vec::new();
    let allow = |k: usize| cap.map_or(true, |c| n + k <= c);
    let gs = gaps(d);
    if allow(1) {
        for &g in &gs {
            for &(tail_first, sign) in r1_variants(d.flavor()) {
                out.push(MoveInstance::R1Add { gap: g, tail_first, sign });
            }
        }
    }
    for v in d.chords() {
        if r1_removable(d, v) {
            out.push(MoveInstance::R1Remove { chord: v });
        }
    }
    if allow(2) {
        for &g1 in &gs {
            for &g2 in &gs {
                for parallel in [true, false] {
                    for &sign in r2_signs(d.flavor()) {
                        out.push(MoveInstance::R2Add { over: g1, under: g2, parallel, sign, over_first: true });
                        if g1 == g2 {
                            out.push(MoveInstance::R2Add { over: g1, under: g2, parallel, sign, over_first: false });
                        }
                    }
                }
            }
        }
    }
    for (a, b) in i2_pairs(d) {
        out.push(MoveInstance::R2Remove { a, b });
    }
    out.extend(enumerate_r3(d));
    out
}

pub fn enumerate_moves(d: &GaussDiagram) -> Vec<MoveInstance> {
    enumerate_moves_capped(d, None)
}

pub fn apply_move(d: &GaussDiagram, m: &MoveInstance) -> Result<(GaussDiagram, Correspondence)> {
    let n = d.n_chords();
    match m {
        MoveInstance::R1Add { gap, tail_first, sign } => {
            if !gap_valid(d, *gap) || (*sign != 1 && *sign != -1) {
                return Err(Error::StaleMove);
            }
            let mut comps = d.components().to_vec();
            let (a, b) = (End::new(n, Role::Tail), End::new(n, Role::Head));
            let seq = if *tail_first { vec![a, b] } else { vec![b, a] };
            insert_ends(&mut comps, vec![(*gap, seq)]);
            Ok(finish_add(d, comps, &[*sign]))
        }
        MoveInstance::R1Remove { chord } => {
            if *chord >= n || !r1_removable(d, *chord) {
                return Err(Error::StaleMove);
            }
            Ok(d.delete_chords(&[*chord]))
        }
        MoveInstance::R2Add { over, under, parallel, sign, over_first } => {
            if !gap_valid(d, *over) || !gap_valid(d, *under) || (*sign != 1 && *sign != -1) {
                return Err(Error::StaleMove);
            }
            if over != under && !over_first {
                return Err(Error::StaleMove);
            }
            let (x, y) = (n, n + 1);
            let op = vec![End::new(x, Role::Tail), End::new(y, Role::Tail)];
            let up = if *parallel {
                vec![End::new(x, Role::Head), End::new(y, Role::Head)]
            } else {
                vec![End::new(y, Role::Head), End::new(x, Role::Head)]
            };
            let inserts = if *over_first { vec![(*over, op), (*under, up)] } else { vec![(*under, up), (*over, op)] };
            let mut comps = d.components().to_vec();
            insert_ends(&mut comps, inserts);
            Ok(finish_add(d, comps, &[*sign, -*sign]))
        }
        MoveInstance::R2Remove { a, b } => {
            if *a >= n || *b >= n || a == b || !r2_removable(d, *a, *b) {
                return Err(Error::StaleMove);
            }
            Ok(d.delete_chords(&[*a, *b]))
        }
        MoveInstance::R3 { .. } => {
            if !enumerate_r3(d).contains(m) {
                return Err(Error::StaleMove);
            }
            let MoveInstance::R3 { pairs } = m else { unreachable!() };
            let mut comps = d.components().to_vec();
            for (p, q) in pairs {
                let e = comps[p.comp].slots[p.idx];
                comps[p.comp].slots[p.idx] = comps[q.comp].slots[q.idx];
                comps[q.comp].slots[q.idx] = e;
            }
            Ok(d.rebuild(comps, &vec![true; n]))
        }
        MoveInstance::Rotate { shifts } => {
            if shifts.len() != d.n_components() {
                return Err(Error::StaleMove);
            }
            let mut comps = d.components().to_vec();
            for (c, &s) in comps.iter_mut().zip(shifts) {
                if s != 0 {
                    if c.kind == Kind::Long || s >= c.len() {
                        return Err(Error::StaleMove);
                    }
                    c.slots.rotate_left(s);
                }
            }
            Ok(d.rebuild(comps, &vec![true; n]))
        }
    }
}

/// Loop type of an R1-removable chord.
pub fn loop_type(d: &GaussDiagram, v: usize) -> Option<LoopType> {
    if !r1_removable(d, v) {
        return None;
    }
    let t = d.pos(v, Role::Tail);
    let tail_first = next_pos(d, t) == Some(d.pos(v, Role::Head));
    Some(LoopType::of(tail_first, d.raw_sign(v)))
}

pub fn genus(d: &GaussDiagram) -> usize {
    carter_surface(&d.with_flavor(if d.flavor() == Flavor::Free { Flavor::Flat } else { d.flavor() }))
        .map(|s| s.genus())
        .unwrap_or(0)
}

#[derive(Clone, Debug)]
pub struct Step {
    pub mv: MoveInstance,
    pub diagram: GaussDiagram,
    /// Correspondence from the previous diagram.
    pub corr: Correspondence,
}

#[derive(Clone, Copy, Debug)]
pub struct WalkOptions {
    pub max_crossings: usize,
    /// Keep every diagram planar (genus 0).
    pub planar: bool,
}

/// Seeded random walk. Each step picks a move class uniformly among the classes with an
/// applicable move, then a move uniformly inside the class; increasing moves are not
/// offered past the cap. Returns the steps after the start diagram.
pub fn random_walk(d: &GaussDiagram, steps: usize, seed: u64, max_crossings: usize) -> Vec<Step> {
    random_walk_with(d, steps, seed, WalkOptions { max_crossings, planar: false })
}

pub fn random_walk_with(d: &GaussDiagram, steps: usize, seed: u64, opts: WalkOptions) -> Vec<Step> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = d.clone();
    let mut out = Vec::with_capacity(steps);
    while out.len() < steps {
        let moves = enumerate_moves_capped(&cur, Some(opts.max_crossings));
        let mut classes: Vec<Vec<&MoveInstance>> = vec![Vec::new(); 5];
        for m in &moves {
            classes[m.kind() as usize].push(m);
        }
        classes.retain(|c| !c.is_empty());
        if classes.is_empty() {
            break;
        }
        let mut picked = None;
        for _ in 0..64 {
            let class = &classes[rng.gen_range(0..classes.len())];
            let m = class[rng.gen_range(0..class.len())];
            let (nd, corr) = apply_move(&cur, m).expect("enumerated move applies");
            if opts.planar && genus(&nd) != 0 {
                continue;
            }
            picked = Some((m.clone(), nd, corr));
            break;
        }
        let Some((mv, nd, corr)) = picked else { break };
        cur = nd.clone();
        out.push(Step { mv, diagram: nd, corr });
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasedDiagram {
    pub diagram: GaussDiagram,
    pub mark: usize,
}

impl BasedDiagram {
    pub fn new(diagram: GaussDiagram, mark: usize) -> Result<BasedDiagram> {
        diagram.check_chord(mark)?;
        Ok(BasedDiagram { diagram, mark })
    }

    /// Applies a move that keeps the mark; `None` if the mark disappears.
    pub fn apply(&self, m: &MoveInstance) -> Result<Option<BasedDiagram>> {
        let (d, corr) = apply_move(&self.diagram, m)?;
        Ok(corr.get(self.mark).map(|mark| BasedDiagram { diagram: d, mark }))
    }
}

impl Serialize for GaussDiagram {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&GaussDiagram::serialize(self))
    }
}

impl<'de> Deserialize<'de> for GaussDiagram {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One wrap crossing of the over-strand around the marked crossing.
struct WrapCrossing {
    theta: f64,
    spiral: u8,
    ray: u8,
    sign: i8,
}

/// Rotates the over-strand at the mark by `n` half-turns (counterclockwise for n > 0).
/// The rotated strand winds around the crossing point; every time one of its two spirals
/// passes the under-strand a new crossing appears, and the mark moves to the central one.
pub fn wrap(b: &BasedDiagram, n: i64) -> Result<BasedDiagram> {
    let d = &b.diagram;
    if n == 0 {
        return Ok(b.clone());
    }
    if d.flavor() == Flavor::Free && n.abs() > 1 {
        return Err(Error::NotApplicable("free diagrams only use wrappings of order 0 or 1".into()));
    }
    let v = b.mark;
    // Work in the frame where the under-strand runs along +x and the over-strand along +y,
    // which is a negative crossing; a positive mark reverses the under-strand.
    let s = if d.flavor() == Flavor::Virtual { d.raw_sign(v) } else { 1 };
    let dir = n.signum() as f64;
    let big = n.unsigned_abs() as usize;
    let mut cs: Vec<WrapCrossing> = Vec::new();
    for k in 0..big {
        let theta = dir * (k as f64 + 0.5);
        for spiral in [1u8, 2u8] {
            let base = if spiral == 1 { 1.5 } else { 0.5 };
            let ray = ((base + theta).round() as i64).rem_euclid(2) as u8;
            // angular velocity along the strand: spiral 1 follows the rotation, spiral 2 undoes it
            let ang = if spiral == 1 { dir } else { -dir };
            let oy = ang * if ray == 0 { 1.0 } else { -1.0 };
            let frame_sign = if oy > 0.0 { -1 } else { 1 };
            cs.push(WrapCrossing { theta, spiral, ray, sign: frame_sign });
        }
    }
    let center_sign: i8 = if big % 2 == 0 { -1 } else { 1 };
    let nn = d.n_chords();
    let id = |i: usize| nn + i;
    let center = nn + cs.len();
    // order along the over-strand
    let mut over_seq: Vec<usize> = Vec::new();
    let mut s1: Vec<usize> = (0..cs.len()).filter(|&i| cs[i].spiral == 1).collect();
    s1.sort_by(|&a, &b| cs[a].theta.abs().partial_cmp(&cs[b].theta.abs()).unwrap());
    let mut s2: Vec<usize> = (0..cs.len()).filter(|&i| cs[i].spiral == 2).collect();
    s2.sort_by(|&a, &b| cs[b].theta.abs().partial_cmp(&cs[a].theta.abs()).unwrap());
    over_seq.extend(s1.iter().map(|&i| id(i)));
    over_seq.push(center);
    over_seq.extend(s2.iter().map(|&i| id(i)));
    // order along the under-strand, left to right
    let mut neg: Vec<usize> = (0..cs.len()).filter(|&i| cs[i].ray == 1).collect();
    neg.sort_by(|&a, &b| cs[a].theta.abs().partial_cmp(&cs[b].theta.abs()).unwrap());
    let mut pos: Vec<usize> = (0..cs.len()).filter(|&i| cs[i].ray == 0).collect();
    pos.sort_by(|&a, &b| cs[b].theta.abs().partial_cmp(&cs[a].theta.abs()).unwrap());
    let mut under_seq: Vec<usize> = neg.iter().map(|&i| id(i)).collect();
    under_seq.push(center);
    under_seq.extend(pos.iter().map(|&i| id(i)));
    let mut new_signs: Vec<i8> = cs.iter().map(|c| c.sign).collect();
    new_signs.push(center_sign);
    if s > 0 {
        under_seq.reverse();
        for x in new_signs.iter_mut() {
            *x = -*x;
        }
    }
    // positive lift of the mark: its over-end is its tail
    let lifted = if d.flavor() == Flavor::Virtual { d.clone() } else { d.lift_positive() };
    let over_pos = lifted.pos(v, Role::Tail);
    let under_pos = lifted.pos(v, Role::Head);
    let mut comps: Vec<Component> = lifted.components().to_vec();
    let mut signs = lifted.signs().to_vec();
    signs.extend(new_signs);
    let seq_for = |p: Pos| -> Vec<End> {
        if p == over_pos {
            over_seq.iter().map(|&c| End::new(c, Role::Tail)).collect()
        } else {
            under_seq.iter().map(|&c| End::new(c, Role::Head)).collect()
        }
    };
    // replace the later position first
    let (first, second) = if (over_pos.comp, over_pos.idx) > (under_pos.comp, under_pos.idx) {
        (over_pos, under_pos)
    } else {
        (under_pos, over_pos)
    };
    for p in [first, second] {
        let seq = seq_for(p);
        let slots = &mut comps[p.comp].slots;
        slots.splice(p.idx..p.idx + 1, seq);
    }
    let mut keep = vec![true; signs.len()];
    keep[v] = false;
    let (vd, corr) = lifted.rebuild_with_signs(comps, &keep, &signs);
    let nd = vd.with_flavor(d.flavor());
    let mark = corr.get(center).expect("center survives");
    // with_flavor keeps chord numbering (first-visit order is unchanged)
    Ok(BasedDiagram { diagram: nd, mark })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> GaussDiagram {
        s.parse().unwrap()
    }

    #[test]
    fn unknot_moves() {
        let u = d("c:");
        let ms = enumerate_moves(&u);
        let r1 = ms.iter().filter(|m| m.kind() == MoveKind::R1Add).count();
        assert_eq!(r1, 4);
        let r2 = ms.iter().filter(|m| m.kind() == MoveKind::R2Add).count();
        assert_eq!(r2, 8);
    }

    #[test]
    fn r1_round_trip() {
        let t = d("c: O1+ U2+ O3+ U1+ O2+ U3+");
        for m in enumerate_moves(&t).into_iter().filter(|m| m.kind() == MoveKind::R1Add) {
            let (a, corr) = apply_move(&t, &m).unwrap();
            let new = (0..a.n_chords()).find(|w| !corr.map.contains(&Some(*w))).unwrap();
            let (b, _) = apply_move(&a, &MoveInstance::R1Remove { chord: new }).unwrap();
            assert_eq!(b, t);
        }
    }

    #[test]
    fn r2_round_trip_and_signs() {
        let t = d("c: O1- U2+ U3- O2+ U1- O3-");
        for m in enumerate_moves(&t).into_iter().filter(|m| m.kind() == MoveKind::R2Add) {
            let (a, corr) = apply_move(&t, &m).unwrap();
            let new: Vec<usize> = (0..a.n_chords()).filter(|w| !corr.map.contains(&Some(*w))).collect();
            assert_eq!(new.len(), 2);
            assert_eq!(a.sign(new[0]).unwrap(), -a.sign(new[1]).unwrap());
            let pairs = i2_pairs(&a);
            assert!(pairs.contains(&(new[0], new[1])), "{m:?} {a}");
            let (b, _) = apply_move(&a, &MoveInstance::R2Remove { a: new[0], b: new[1] }).unwrap();
            assert_eq!(b, t);
        }
    }

    #[test]
    fn r3_is_involutive() {
        let t = d("c: O1+ U2+ O3+ U1+ O2+ U3+");
        assert!(enumerate_r3(&t).is_empty());
        let mut seen = 0;
        for step in random_walk(&t, 300, 3, 7) {
            let a = &step.diagram;
            for m in enumerate_r3(a) {
                seen += 1;
                let (b, corr) = apply_move(a, &m).unwrap();
                for v in a.chords() {
                    assert_eq!(b.sign(corr.get(v).unwrap()).unwrap(), a.sign(v).unwrap());
                }
                assert!(enumerate_r3(&b).into_iter().any(|m2| apply_move(&b, &m2).unwrap().0 == *a));
            }
        }
        assert!(seen > 0);
    }

    #[test]
    fn no_i2_pairs() {
        assert!(i2_pairs(&d("c: O1+ U2+ O3+ U1+ O2+ U3+")).is_empty());
        assert!(i2_pairs(&d("c: O1- U2+ U3- O2+ U1- O3-")).is_empty());
    }

    #[test]
    fn walks_are_deterministic() {
        let k = d("c: O1- U2+ U3- O2+ U1- O3-");
        let a = random_walk(&k, 50, 7, 8);
        let b = random_walk(&k, 50, 7, 8);
        assert_eq!(a.len(), 50);
        assert!(a.iter().zip(&b).all(|(x, y)| x.diagram == y.diagram && x.mv == y.mv));
        assert!(a.iter().all(|s| s.diagram.n_chords() <= 8));
        assert!(random_walk(&k, 0, 7, 8).is_empty());
    }

    #[test]
    fn wrap_order_one_shape() {
        let k = d("c: O1- U1-");
        let w = wrap(&BasedDiagram::new(k.clone(), 0).unwrap(), 1).unwrap();
        assert_eq!(w.diagram.n_chords(), 3);
        assert_eq!(w.diagram.sign(w.mark).unwrap(), 1);
        let w0 = wrap(&BasedDiagram::new(k.clone(), 0).unwrap(), 0).unwrap();
        assert_eq!(w0.diagram, k);
        // the wrapped diagram reduces back by removing the two extra crossings
        assert!(!i2_pairs(&w.diagram).is_empty());
    }
}
