use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauss::{Flavor, GaussDiagram, Half, Role};

/// Half-edge slots at a crossing in counterclockwise order. The flat tail strand runs
/// from `TAIL_IN` to `TAIL_OUT`, the flat head strand from `HEAD_IN` to `HEAD_OUT`.
pub const TAIL_OUT: usize = 0;
pub const HEAD_OUT: usize = 1;
pub const TAIL_IN: usize = 2;
pub const HEAD_IN: usize = 3;

fn out_slot(r: Role) -> usize {
    match r {
        Role::Tail => TAIL_OUT,
        Role::Head => HEAD_OUT,
    }
}

fn in_slot(r: Role) -> usize {
    match r {
        Role::Tail => TAIL_IN,
        Role::Head => HEAD_IN,
    }
}

/// Ribbon graph of a diagram: crossings are 4-valent vertices with the rotation of the
/// local flat picture, arcs are edges. Long components are closed through their ends.
#[derive(Clone, Debug)]
pub struct RibbonGraph {
    n_vertices: usize,
    /// (outgoing half-edge at the start, incoming half-edge at the end)
    edges: Vec<(usize, usize)>,
    he_edge: Vec<usize>,
    /// For each component, the edge leaving each slot.
    slot_edge: Vec<Vec<usize>>,
    faces: Vec<Vec<usize>>,
    genus: usize,
    n_parts: usize,
}

/// Integer 1-chain on the edges of a ribbon graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Chain(pub Vec<i64>);

impl Chain {
    pub fn zero(n: usize) -> Chain {
        Chain(vec![0; n])
    }

    pub fn add(&self, other: &Chain, k: i64) -> Chain {
        Chain(self.0.iter().zip(&other.0).map(|(a, b)| a + k * b).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }
}

impl RibbonGraph {
    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    /// Number of connected pieces of the graph (chord-free circles excluded).
    pub fn n_parts(&self) -> usize {
        self.n_parts
    }

    pub fn edge_leaving(&self, comp: usize, idx: usize) -> usize {
        self.slot_edge[comp][idx]
    }

    pub fn vertex_of(&self, he: usize) -> usize {
        he / 4
    }

    fn other_end(&self, he: usize) -> usize {
        let (o, i) = self.edges[self.he_edge[he]];
        if o == he {
            i
        } else {
            o
        }
    }

    /// Boundary chain of face `f`, walked as its darts.
    pub fn face_chain(&self, f: usize) -> Chain {
        let mut c = Chain::zero(self.n_edges());
        for &he in &self.faces[f] {
            let e = self.he_edge[he];
            if self.edges[e].0 == he {
                c.0[e] += 1;
            } else {
                c.0[e] -= 1;
            }
        }
        c
    }

    pub fn boundary_is_zero(&self, c: &Chain) -> bool {
        let mut flow = vec![0i64; self.n_vertices];
        for (e, &(o, i)) in self.edges.iter().enumerate() {
            flow[o / 4] -= c.0[e];
            flow[i / 4] += c.0[e];
        }
        flow.iter().all(|&x| x == 0)
    }

    /// Algebraic intersection number of two cycles. Each passage of `b` through a vertex
    /// is pushed off to one side; the strands of `a` met on that side are counted.
    pub fn inter(&self, a: &Chain, b: &Chain) -> i64 {
        let nh = 4 * self.n_vertices;
        let mut cnt = vec![0i64; nh];
        for (e, &(o, i)) in self.edges.iter().enumerate() {
            cnt[o] -= a.0[e];
            cnt[i] += a.0[e];
        }
        let mut arrive = vec![0i64; nh];
        let mut leave = vec![0i64; nh];
        for (e, &(o, i)) in self.edges.iter().enumerate() {
            let m = b.0[e];
            if m > 0 {
                leave[o] += m;
                arrive[i] += m;
            } else if m < 0 {
                leave[i] -= m;
                arrive[o] -= m;
            }
        }
        let mut total = 0;
        for x in 0..self.n_vertices {
            let mut ins: Vec<(usize, i64)> = (0..4).filter(|k| arrive[4 * x + k] > 0).map(|k| (k, arrive[4 * x + k])).collect();
            let mut outs: Vec<(usize, i64)> = (0..4).filter(|k| leave[4 * x + k] > 0).map(|k| (k, leave[4 * x + k])).collect();
            // Route straight through first, then pair whatever remains.
            let mut pairs = Vec::new();
            for (ki, mi) in ins.iter_mut() {
                for (ko, mo) in outs.iter_mut() {
                    if *mi > 0 && *mo > 0 && (*ki + 2) % 4 == *ko {
                        let m = (*mi).min(*mo);
                        pairs.push((*ki, *ko, m));
                        *mi -= m;
                        *mo -= m;
                    }
                }
            }
            for (ki, mi) in ins.iter_mut() {
                for (ko, mo) in outs.iter_mut() {
                    if *mi > 0 && *mo > 0 {
                        let m = (*mi).min(*mo);
                        pairs.push((*ki, *ko, m));
                        *mi -= m;
                        *mo -= m;
                    }
                }
            }
            debug_assert!(ins.iter().all(|p| p.1 == 0) && outs.iter().all(|p| p.1 == 0), "not a cycle");
            for (ki, ko, m) in pairs {
                let mut k = (ko + 1) % 4;
                while k != ki {
                    total += m * cnt[4 * x + k];
                    k = (k + 1) % 4;
                }
            }
        }
        total
    }
}

pub fn carter_surface(d: &GaussDiagram) -> Result<RibbonGraph> {
    if d.flavor() == Flavor::Free {
        return Err(Error::WrongFlavor { expected: "virtual or flat" });
    }
    let nv = d.n_chords();
    let mut edges = Vec::new();
    let mut he_edge = vec![usize::MAX; 4 * nv];
    let mut slot_edge = Vec::new();
    for c in d.components() {
        let k = c.len();
        let mut se = Vec::with_capacity(k);
        for i in 0..k {
            let a = c.slots[i];
            let b = c.slots[(i + 1) % k];
            let o = 4 * a.chord + out_slot(d.flat_role(a));
            let inn = 4 * b.chord + in_slot(d.flat_role(b));
            he_edge[o] = edges.len();
            he_edge[inn] = edges.len();
            se.push(edges.len());
            edges.push((o, inn));
        }
        slot_edge.push(se);
    }
    let mut rg = RibbonGraph {
        n_vertices: nv,
        edges,
        he_edge,
        slot_edge,
        faces: Vec::new(),
        genus: 0,
        n_parts: 0,
    };
    let nh = 4 * nv;
    let mut seen = vec![false; nh];
    for start in 0..nh {
        if seen[start] {
            continue;
        }
        let mut face = Vec::new();
        let mut h = start;
        while !seen[h] {
            seen[h] = true;
            face.push(h);
            let t = rg.other_end(h);
            h = 4 * (t / 4) + (t % 4 + 1) % 4;
        }
        rg.faces.push(face);
    }
    let mut parent: Vec<usize> = (0..nv).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let n = p[y];
            p[y] = r;
            y = n;
        }
        r
    }
    for &(o, i) in &rg.edges {
        let a = find(&mut parent, o / 4);
        let b = find(&mut parent, i / 4);
        parent[a] = b;
    }
    let mut root_v = vec![0i64; nv];
    let mut root_e = vec![0i64; nv];
    let mut root_f = vec![0i64; nv];
    for v in 0..nv {
        let r = find(&mut parent, v);
        root_v[r] += 1;
    }
    for &(o, _) in &rg.edges {
        let r = find(&mut parent, o / 4);
        root_e[r] += 1;
    }
    for f in &rg.faces {
        let r = find(&mut parent, f[0] / 4);
        root_f[r] += 1;
    }
    let mut genus = 0;
    let mut parts = 0;
    for r in 0..nv {
        if root_v[r] > 0 {
            parts += 1;
            let chi = root_v[r] - root_e[r] + root_f[r];
            debug_assert!(chi <= 2 && chi % 2 == 0);
            genus += ((2 - chi) / 2) as usize;
        }
    }
    rg.genus = genus;
    rg.n_parts = parts;
    Ok(rg)
}

/// The Carter surface of a diagram together with a symplectic basis of its first homology.
#[derive(Clone, Debug)]
pub struct Surface {
    pub graph: RibbonGraph,
    pub homology: HomologySpace,
    diagram: GaussDiagram,
}

#[derive(Clone, Debug)]
pub struct HomologySpace {
    /// Symplectic basis a_1, b_1, ..., a_g, b_g with a_i . b_i = 1.
    pub basis: Vec<Chain>,
    pub form: Vec<Vec<i64>>,
}

impl HomologySpace {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }
}

fn fundamental_cycles(rg: &RibbonGraph) -> Vec<Chain> {
    let nv = rg.n_vertices;
    let ne = rg.n_edges();
    let mut adj: Vec<Vec<(usize, usize, i64)>> = vec![Vec::new(); nv];
    for (e, &(o, i)) in rg.edges.iter().enumerate() {
        adj[o / 4].push((i / 4, e, 1));
        adj[i / 4].push((o / 4, e, -1));
    }
    // parent edge (edge, direction from parent to child)
    let mut parent: Vec<Option<(usize, usize, i64)>> = vec![None; nv];
    let mut visited = vec![false; nv];
    let mut tree = vec![false; ne];
    for root in 0..nv {
        if visited[root] {
            continue;
        }
        visited[root] = true;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            for &(y, e, dir) in &adj[x] {
                if !visited[y] {
                    visited[y] = true;
                    tree[e] = true;
                    parent[y] = Some((x, e, dir));
                    queue.push_back(y);
                }
            }
        }
    }
    let path_to_root = |mut x: usize| {
        let mut c = vec![0i64; ne];
        while let Some((p, e, dir)) = parent[x] {
            // walk from x up to p: against the parent->child direction
            c[e] -= dir;
            x = p;
        }
        c
    };
    let mut out = Vec::new();
    for (e, &(o, i)) in rg.edges.iter().enumerate() {
        if tree[e] {
            continue;
        }
        // e goes o -> i; close with the tree path i -> root -> o
        let up = path_to_root(i / 4);
        let down = path_to_root(o / 4);
        let mut c = vec![0i64; ne];
        c[e] += 1;
        for k in 0..ne {
            c[k] += up[k] - down[k];
        }
        out.push(Chain(c));
    }
    out
}

/// Congruence reduction of a skew-symmetric integer matrix. Returns W with W Q W^T in
/// block form diag(d_1 J, ..., d_r J, 0), J = [[0,1],[-1,0]], and the rank 2r.
pub fn skew_normal_form(q: &[Vec<i64>]) -> (Vec<Vec<i64>>, Vec<i64>) {
    let m = q.len();
    let mut a: Vec<Vec<i64>> = q.to_vec();
    let mut w: Vec<Vec<i64>> = (0..m).map(|i| (0..m).map(|j| i64::from(i == j)).collect()).collect();
    let swap = |a: &mut Vec<Vec<i64>>, w: &mut Vec<Vec<i64>>, i: usize, j: usize| {
        if i == j {
            return;
        }
        a.swap(i, j);
        for row in a.iter_mut() {
            row.swap(i, j);
        }
        w.swap(i, j);
    };
    // row/col k -= f * row/col l
    let sub = |a: &mut Vec<Vec<i64>>, w: &mut Vec<Vec<i64>>, k: usize, l: usize, f: i64| {
        if f == 0 {
            return;
        }
        let rl = a[l].clone();
        for (x, y) in a[k].iter_mut().zip(&rl) {
            *x -= f * y;
        }
        for row in a.iter_mut() {
            let v = row[l];
            row[k] -= f * v;
        }
        let wl = w[l].clone();
        for (x, y) in w[k].iter_mut().zip(&wl) {
            *x -= f * y;
        }
    };
    let mut diag = Vec::new();
    let mut t = 0;
    while 2 * t + 1 < m {
        let p = 2 * t;
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in p..m {
                for j in p..m {
                    if a[i][j] > 0 && best.map_or(true, |(bi, bj)| a[i][j] < a[bi][bj]) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((i, j)) = best else { break };
            swap(&mut a, &mut w, p, i);
            let j = if j == p { i } else { j };
            swap(&mut a, &mut w, p + 1, j);
            let piv = a[p][p + 1];
            let mut clean = true;
            for k in p + 2..m {
                let f = a[p][k].div_euclid(piv);
                sub(&mut a, &mut w, k, p + 1, f);
                let g = a[p + 1][k].div_euclid(-piv);
                sub(&mut a, &mut w, k, p, g);
                if a[p][k] != 0 || a[p + 1][k] != 0 {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if a[p][p + 1] == 0 {
            break;
        }
        diag.push(a[p][p + 1]);
        t += 1;
    }
    (w, diag)
}

impl Surface {
    pub fn new(d: &GaussDiagram) -> Result<Surface> {
        let graph = carter_surface(d)?;
        let z = fundamental_cycles(&graph);
        let q: Vec<Vec<i64>> = z.iter().map(|x| z.iter().map(|y| graph.inter(x, y)).collect()).collect();
        let (w, diag) = skew_normal_form(&q);
        debug_assert!(diag.iter().all(|&x| x == 1), "intersection form not unimodular: {diag:?}");
        debug_assert_eq!(diag.len(), graph.genus());
        let ne = graph.n_edges();
        let basis: Vec<Chain> = w
            .iter()
            .take(2 * diag.len())
            .map(|row| {
                let mut c = Chain::zero(ne);
                for (k, &f) in row.iter().enumerate() {
                    if f != 0 {
                        c = c.add(&z[k], f);
                    }
                }
                c
            })
            .collect();
        let form = basis.iter().map(|x| basis.iter().map(|y| graph.inter(x, y)).collect()).collect();
        Ok(Surface {
            graph,
            homology: HomologySpace { basis, form },
            diagram: d.clone(),
        })
    }

    pub fn genus(&self) -> usize {
        self.graph.genus()
    }

    pub fn diagram(&self) -> &GaussDiagram {
        &self.diagram
    }

    pub fn inter(&self, a: &Chain, b: &Chain) -> i64 {
        self.graph.inter(a, b)
    }

    /// The cycle of the whole diagram (sum of all components).
    pub fn diagram_chain(&self) -> Chain {
        Chain(vec![1; self.graph.n_edges()])
    }

    pub fn component_chain(&self, c: usize) -> Chain {
        let mut ch = Chain::zero(self.graph.n_edges());
        for &e in &self.graph.slot_edge[c] {
            ch.0[e] = 1;
        }
        ch
    }

    /// Chain of a smoothing half of self-crossing `v`.
    pub fn half_chain(&self, v: usize, half: Half) -> Result<Chain> {
        let d = &self.diagram;
        let c = d.require_self(v)?;
        let (start, stop) = match d.resolve_half(v, half) {
            Half::Left => (d.flat_pos(v, Role::Head).idx, d.flat_pos(v, Role::Tail).idx),
            _ => (d.flat_pos(v, Role::Tail).idx, d.flat_pos(v, Role::Head).idx),
        };
        let k = d.component(c).len();
        let mut ch = Chain::zero(self.graph.n_edges());
        let mut i = start;
        while i != stop {
            ch.0[self.graph.slot_edge[c][i]] += 1;
            i = (i + 1) % k;
        }
        Ok(ch)
    }

    /// Coordinates in the symplectic basis: c = sum x_i a_i + y_i b_i.
    pub fn coords(&self, c: &Chain) -> Vec<i64> {
        let b = &self.homology.basis;
        let mut out = Vec::with_capacity(b.len());
        for i in 0..b.len() / 2 {
            out.push(self.inter(c, &b[2 * i + 1]));
            out.push(-self.inter(c, &b[2 * i]));
        }
        out
    }

    /// Class of a half in H_1 / <[K]>, in a canonical form valid within this diagram.
    pub fn homological_parity(&self, v: usize) -> Result<HomologyClass> {
        let u = self.coords(&self.half_chain(v, Half::Left)?);
        Ok(self.reduce_mod_knot(u))
    }

    pub fn reduce_mod_knot(&self, u: Vec<i64>) -> HomologyClass {
        let k = self.coords(&self.diagram_chain());
        HomologyClass(reduce_mod(&u, &k))
    }

    pub fn f_gamma(&self, v: usize, gamma: &Chain) -> Result<i64> {
        if !self.graph.boundary_is_zero(gamma) {
            return Err(Error::NotApplicable("gamma is not a cycle".into()));
        }
        let dg = self.inter(&self.diagram_chain(), gamma);
        if dg != 0 {
            return Err(Error::GammaNotAdmissible(dg));
        }
        Ok(self.inter(&self.half_chain(v, Half::Left)?, gamma))
    }

    /// Turaev's n(v) = D . D^l_v.
    pub fn gaussian_n(&self, v: usize) -> Result<i64> {
        Ok(self.inter(&self.diagram_chain(), &self.half_chain(v, Half::Left)?))
    }
}

/// Element of H_1 modulo the class of the knot.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HomologyClass(pub Vec<i64>);

impl HomologyClass {
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }
}

/// Canonical representative of u modulo Z k: a unimodular change of coordinates sends k
/// to (g, 0, ..., 0) and the first coordinate of u is reduced mod g.
pub fn reduce_mod(u: &[i64], k: &[i64]) -> Vec<i64> {
    let n = k.len();
    if k.iter().all(|&x| x == 0) {
        return u.to_vec();
    }
    let mut w = k.to_vec();
    let mut t: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    loop {
        let p = (0..n).filter(|&i| w[i] != 0).min_by_key(|&i| (w[i].abs(), i)).unwrap();
        w.swap(0, p);
        t.swap(0, p);
        let mut done = true;
        for i in 1..n {
            if w[i] != 0 {
                let q = w[i].div_euclid(w[0]);
                w[i] -= q * w[0];
                let r0 = t[0].clone();
                for (x, y) in t[i].iter_mut().zip(&r0) {
                    *x -= q * y;
                }
                if w[i] != 0 {
                    done = false;
                }
            }
        }
        if done {
            break;
        }
    }
    if w[0] < 0 {
        w[0] = -w[0];
        for x in t[0].iter_mut() {
            *x = -*x;
        }
    }
    let mut c: Vec<i64> = (0..n).map(|i| (0..n).map(|j| t[i][j] * u[j]).sum()).collect();
    c[0] = c[0].rem_euclid(w[0]);
    c
}
