use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use indexmap::IndexSet;

use crate::gauss::{Component, End, Flavor, GaussDiagram, Kind, Role};
use crate::moves::{enumerate_moves_capped, genus, i2_pairs, BasedDiagram, MoveInstance, MoveKind};

/// Least encoding over all base slots of the closed components. Components keep their
/// order; chords are renumbered by first visit. Returns the key and the rotation that
/// realizes it. The key determines the (based) diagram, see [`decode_key`].
pub fn canonical_key(d: &GaussDiagram, mark: Option<usize>) -> (Vec<u16>, Vec<usize>) {
    let comps = d.components();
    let lens: Vec<usize> = comps
        .iter()
        .map(|c| if c.kind == Kind::Closed { c.len().max(1) } else { 1 })
        .collect();
    let mut shifts = vec![0usize; comps.len()];
    let mut best: Option<(Vec<u16>, Vec<usize>)> = None;
    let mut relabel = vec![u16::MAX; d.n_chords()];
    let mut key = Vec::with_capacity(2 * d.n_chords() + comps.len() + 1);
    loop {
        key.clear();
        relabel.iter_mut().for_each(|r| *r = u16::MAX);
        let mut next = 0u16;
        for (ci, c) in comps.iter().enumerate() {
            let k = c.len();
            key.push(HEADER | ((c.kind == Kind::Long) as u16) << 14 | k as u16);
            for j in 0..k {
                let e = c.slots[(j + shifts[ci]) % k.max(1)];
                let first = relabel[e.chord] == u16::MAX;
                if first {
                    relabel[e.chord] = next;
                    next += 1;
                }
                let role = match d.flavor() {
                    Flavor::Free => (!first) as u16,
                    _ => (e.role == Role::Head) as u16,
                };
                let neg = (d.raw_sign(e.chord) < 0 && d.flavor() == Flavor::Virtual) as u16;
                key.push(relabel[e.chord] << 2 | role << 1 | neg);
            }
        }
        if let Some(m) = mark {
            key.push(relabel[m]);
        }
        if best.as_ref().map_or(true, |(b, _)| key < *b) {
            best = Some((key.clone(), shifts.clone()));
        }
        // odometer over rotations
        let mut i = 0;
        loop {
            if i == shifts.len() {
                return best.unwrap();
            }
            shifts[i] += 1;
            if shifts[i] < lens[i] {
                break;
            }
            shifts[i] = 0;
            i += 1;
        }
    }
}

const HEADER: u16 = 0x8000;

/// Rebuilds the diagram (and the mark, if the key carries one) from a key.
pub fn decode_key(flavor: Flavor, key: &[u16], marked: bool) -> (GaussDiagram, Option<usize>) {
    let body = if marked { &key[..key.len() - 1] } else { key };
    let mut comps: Vec<Component> = Vec::new();
    let mut n = 0;
    for &c in body {
        if c & HEADER != 0 {
            let kind = if c & (1 << 14) != 0 { Kind::Long } else { Kind::Closed };
            comps.push(Component { kind, slots: Vec::new() });
        } else {
            let chord = (c >> 2) as usize;
            let role = if c & 2 != 0 { Role::Head } else { Role::Tail };
            n = n.max(chord + 1);
            comps.last_mut().expect("header first").slots.push(End::new(chord, role));
        }
    }
    let mut signs = vec![1i8; n];
    for &c in body {
        if c & HEADER == 0 && c & 1 != 0 {
            signs[(c >> 2) as usize] = -1;
        }
    }
    let (d, _) = GaussDiagram::assemble(flavor, comps, signs);
    (d, marked.then(|| key[key.len() - 1] as usize))
}

fn decode_based(flavor: Flavor, key: &[u16]) -> BasedDiagram {
    let (diagram, mark) = decode_key(flavor, key, true);
    BasedDiagram { diagram, mark: mark.unwrap() }
}

pub fn canonical_based(b: &BasedDiagram) -> (BasedDiagram, Vec<u16>) {
    let (key, _) = canonical_key(&b.diagram, Some(b.mark));
    (decode_based(b.diagram.flavor(), &key), key)
}

pub fn canonical_diagram(d: &GaussDiagram) -> GaussDiagram {
    let (key, _) = canonical_key(d, None);
    decode_key(d.flavor(), &key, false).0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_crossings: usize,
    pub max_depth: usize,
    /// Only visit genus-0 diagrams.
    pub planar: bool,
    pub max_states: Option<usize>,
}

impl SearchBudget {
    pub const DEFAULT_MAX_STATES: usize = 4_000_000;

    pub fn new(max_crossings: usize, max_depth: usize) -> SearchBudget {
        SearchBudget { max_crossings, max_depth, planar: false, max_states: Some(Self::DEFAULT_MAX_STATES) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchPath {
    pub moves: Vec<MoveInstance>,
    /// Number of elementary moves, rotations not counted.
    pub depth: usize,
    pub states: usize,
}

impl SearchPath {
    pub fn to_json_lines(&self) -> String {
        self.moves.iter().map(|m| serde_json::to_string(m).expect("serializable") + "\n").collect()
    }

    pub fn from_json_lines(text: &str) -> Result<Vec<MoveInstance>> {
        text.lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| serde_json::from_str(l).map_err(|e| Error::Parse(e.to_string())))
            .collect()
    }
}

pub fn replay(b: &BasedDiagram, moves: &[MoveInstance]) -> Result<BasedDiagram> {
    let mut cur = b.clone();
    for m in moves {
        cur = cur.apply(m)?.ok_or_else(|| Error::NotApplicable("move deletes the marked crossing".into()))?;
    }
    Ok(cur)
}

/// Search tree over canonical keys; node ids are indices into `keys`.
struct Tree {
    flavor: Flavor,
    keys: IndexSet<Box<[u16]>>,
    parent: Vec<u32>,
    /// Index of the move in the parent's move list.
    via: Vec<u32>,
    depth: Vec<u8>,
    frontier: Vec<u32>,
}

impl Tree {
    fn new(flavor: Flavor, key: Vec<u16>) -> Tree {
        let mut keys = IndexSet::new();
        keys.insert(key.into_boxed_slice());
        Tree { flavor, keys, parent: vec![u32::MAX], via: vec![u32::MAX], depth: vec![0], frontier: vec![0] }
    }

    fn rep(&self, i: usize) -> BasedDiagram {
        decode_based(self.flavor, &self.keys[i])
    }

    /// The move of the edge into node `i` together with the rotation onto its representative.
    fn edge(&self, i: usize, budget: &SearchBudget) -> (BasedDiagram, MoveInstance, Vec<usize>) {
        let p = self.parent[i] as usize;
        let parent = self.rep(p);
        let mv = enumerate_moves_capped(&parent.diagram, Some(budget.max_crossings))
            .swap_remove(self.via[i] as usize);
        let child = parent.apply(&mv).expect("recorded move applies").expect("mark kept");
        let (_, shifts) = canonical_key(&child.diagram, Some(child.mark));
        (parent, mv, shifts)
    }

    /// Steps from the root representative to node `i`.
    fn path_to(&self, mut i: usize, budget: &SearchBudget) -> Vec<MoveInstance> {
        let mut out = Vec::new();
        while self.parent[i] != u32::MAX {
            let (_, mv, shifts) = self.edge(i, budget);
            if shifts.iter().any(|&s| s != 0) {
                out.push(MoveInstance::Rotate { shifts });
            }
            out.push(mv);
            i = self.parent[i] as usize;
        }
        out.reverse();
        out
    }
}

fn mark_preserving(m: &MoveInstance, mark: usize) -> bool {
    match m {
        MoveInstance::R1Remove { chord } => *chord != mark,
        MoveInstance::R2Remove { a, b } => *a != mark && *b != mark,
        _ => true,
    }
}

/// Mark-preserving successors of a based diagram: (index in the move list, child key).
fn successors(b: &BasedDiagram, budget: &SearchBudget) -> Vec<(usize, Vec<u16>)> {
    let mut out = Vec::new();
    for (i, m) in enumerate_moves_capped(&b.diagram, Some(budget.max_crossings)).iter().enumerate() {
        if !mark_preserving(m, b.mark) {
            continue;
        }
        let Ok(Some(child)) = b.apply(m) else { continue };
        if budget.planar && genus(&child.diagram) != 0 {
            continue;
        }
        out.push((i, canonical_key(&child.diagram, Some(child.mark)).0));
    }
    out
}

fn inverse_rotation(d: &GaussDiagram, shifts: &[usize]) -> Vec<usize> {
    d.components()
        .iter()
        .zip(shifts)
        .map(|(c, &s)| if s == 0 { 0 } else { c.len() - s })
        .collect()
}

fn inverse_kind(k: MoveKind) -> MoveKind {
    match k {
        MoveKind::R1Add => MoveKind::R1Remove,
        MoveKind::R1Remove => MoveKind::R1Add,
        MoveKind::R2Add => MoveKind::R2Remove,
        MoveKind::R2Remove => MoveKind::R2Add,
        k => k,
    }
}

/// Moves leading from `rep(child)` back to `rep(parent)` of a tree edge.
fn reverse_edge(parent: &BasedDiagram, mv: &MoveInstance, shifts: &[usize]) -> Result<Vec<MoveInstance>> {
    let x = parent.apply(mv)?.expect("edge keeps the mark");
    let mut out = Vec::new();
    if shifts.iter().any(|&s| s != 0) {
        out.push(MoveInstance::Rotate { shifts: inverse_rotation(&x.diagram, shifts) });
    }
    let (target, _) = canonical_key(&parent.diagram, Some(parent.mark));
    for m in enumerate_moves_capped(&x.diagram, None) {
        if m.kind() != inverse_kind(mv.kind()) || !mark_preserving(&m, x.mark) {
            continue;
        }
        let Ok(Some(y)) = x.apply(&m) else { continue };
        let (key, s) = canonical_key(&y.diagram, Some(y.mark));
        if key == target {
            out.push(m);
            if s.iter().any(|&t| t != 0) {
                out.push(MoveInstance::Rotate { shifts: s });
            }
            return Ok(out);
        }
    }
    Err(Error::NotApplicable("no inverse move found".into()))
}

/// Bidirectional breadth-first search for a mark-preserving path from `b1` to `b2`.
/// Exhaustive up to the depth and crossing budget unless the state cap is hit first.
pub fn bounded_bfs(b1: &BasedDiagram, b2: &BasedDiagram, budget: SearchBudget) -> Result<SearchPath> {
    let flavor = b1.diagram.flavor();
    if flavor != b2.diagram.flavor() {
        return Err(Error::NotApplicable("diagrams of different flavors".into()));
    }
    let (k1, s1) = canonical_key(&b1.diagram, Some(b1.mark));
    let (k2, s2) = canonical_key(&b2.diagram, Some(b2.mark));
    let r2 = decode_based(flavor, &k2);
    let mut fwd = Tree::new(flavor, k1.clone());
    let mut bwd = Tree::new(flavor, k2);
    let mut states = 2;
    let meet = |fwd: &Tree, bwd: &Tree, fi: usize, bi: usize, states: usize| -> Result<SearchPath> {
        let mut moves = Vec::new();
        if s1.iter().any(|&s| s != 0) {
            moves.push(MoveInstance::Rotate { shifts: s1.clone() });
        }
        moves.extend(fwd.path_to(fi, &budget));
        let mut i = bi;
        while bwd.parent[i] != u32::MAX {
            let (parent, mv, shifts) = bwd.edge(i, &budget);
            moves.extend(reverse_edge(&parent, &mv, &shifts)?);
            i = bwd.parent[i] as usize;
        }
        if s2.iter().any(|&s| s != 0) {
            moves.push(MoveInstance::Rotate { shifts: inverse_rotation(&r2.diagram, &s2) });
        }
        let depth = fwd.depth[fi] as usize + bwd.depth[bi] as usize;
        Ok(SearchPath { moves, depth, states })
    };
    if let Some(bi) = bwd.keys.get_index_of(k1.as_slice()) {
        return meet(&fwd, &bwd, 0, bi, states);
    }
    let (mut df, mut db) = (0usize, 0usize);
    while df + db < budget.max_depth {
        if fwd.frontier.is_empty() || bwd.frontier.is_empty() {
            break;
        }
        let forward = fwd.frontier.len() <= bwd.frontier.len();
        let (this, other) = if forward { (&mut fwd, &bwd) } else { (&mut bwd, &fwd) };
        let mut next = Vec::new();
        let mut found = None;
        let frontier = std::mem::take(&mut this.frontier);
        'outer: for &i in &frontier {
            let rep = this.rep(i as usize);
            let depth = this.depth[i as usize];
            for (via, key) in successors(&rep, &budget) {
                let (id, fresh) = this.keys.insert_full(key.into_boxed_slice());
                if !fresh {
                    continue;
                }
                this.parent.push(i);
                this.via.push(via as u32);
                this.depth.push(depth + 1);
                states += 1;
                if let Some(j) = other.keys.get_index_of(&this.keys[id]) {
                    found = Some((id, j));
                    break 'outer;
                }
                next.push(id as u32);
                if budget.max_states.is_some_and(|m| states >= m) {
                    return Err(Error::BudgetExhausted { states });
                }
            }
        }
        if let Some((a, b)) = found {
            return if forward { meet(&fwd, &bwd, a, b, states) } else { meet(&fwd, &bwd, b, a, states) };
        }
        this.frontier = next;
        if forward {
            df += 1;
        } else {
            db += 1;
        }
    }
    Err(Error::BudgetExhausted { states })
}

/// Crossings reachable from the mark through move correspondences (I0-edges) and
/// second-move pairings (I2-edges), with the parity of I2-edges used.
pub fn explore_crossing_graph(b: &BasedDiagram, budget: SearchBudget) -> Vec<(BasedDiagram, u8)> {
    let flavor = b.diagram.flavor();
    let (key, _) = canonical_key(&b.diagram, Some(b.mark));
    let mut seen: HashSet<(Vec<u16>, u8)> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert((key.clone(), 0));
    queue.push_back((key, 0u8, 0usize));
    'bfs: while let Some((key, parity, depth)) = queue.pop_front() {
        if depth >= budget.max_depth {
            continue;
        }
        let cur = decode_based(flavor, &key);
        let mut next: Vec<(Vec<u16>, u8)> = successors(&cur, &budget).into_iter().map(|(_, k)| (k, parity)).collect();
        for (x, y) in i2_pairs(&cur.diagram) {
            let other = if x == cur.mark {
                y
            } else if y == cur.mark {
                x
            } else {
                continue;
            };
            next.push((canonical_key(&cur.diagram, Some(other)).0, parity ^ 1));
        }
        for (k, p) in next {
            if seen.insert((k.clone(), p)) {
                queue.push_back((k, p, depth + 1));
                if budget.max_states.is_some_and(|m| seen.len() >= m) {
                    break 'bfs;
                }
            }
        }
    }
    let mut out: Vec<(Vec<u16>, u8)> = seen.into_iter().collect();
    out.sort();
    out.into_iter().map(|(k, p)| (decode_based(flavor, &k), p)).collect()
}
