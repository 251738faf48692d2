//! Parametrized tropical curves and their graph-theoretic structure.

use std::collections::{BTreeMap, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{format_rational, rat, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub tail: usize,
    pub head: usize,
    /// Weighted direction `w_e * u_e`, pointing from tail to head.
    pub direction: Vec<i64>,
    pub length: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Leg {
    pub vertex: usize,
    pub direction: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Anchor {
    pub vertex: usize,
    pub position: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TropicalCurve {
    pub ambient_dim: usize,
    pub vertices: Vec<String>,
    pub edges: Vec<Edge>,
    pub legs: Vec<Leg>,
    pub anchor: Option<Anchor>,
    pub metadata: serde_json::Map<String, serde_json::Value>,
    /// Set on subcurves, which need not balance.
    pub balancing_waived: bool,
}

/// Bare combinatorics: vertices are `0..vertex_count`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    pub vertex_count: usize,
    pub edges: Vec<(usize, usize)>,
    pub legs: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycleBasis {
    /// Each cycle is a closed walk: `(edge index, +1 | -1)` in traversal order.
    pub cycles: Vec<Vec<(usize, i8)>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    /// `(edge index, orientation)`, in path order from `start` to `end`.
    pub edges: Vec<(usize, i8)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SegmentDecomposition {
    pub segments: Vec<Segment>,
    /// `eta[i][j]`: sign of segment `j` in cycle `i`.
    pub eta: Vec<Vec<i8>>,
    /// Per segment, the oriented edge directions (the columns of `A_j`).
    pub blocks: Vec<Vec<Vec<i64>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VertexBalance {
    pub vertex: String,
    pub balanced: bool,
    pub deficit: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub balancing_waived: bool,
    pub vertices: Vec<VertexBalance>,
    pub unbalanced: Vec<String>,
    pub nonpositive_lengths: Vec<String>,
    pub zero_directions: Vec<String>,
    pub cycle_closure: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeProfile {
    /// Primitive leg direction -> weights of the legs pointing that way.
    pub legs_by_direction: BTreeMap<Vec<i64>, Vec<i64>>,
    pub standard_degree: Option<i64>,
}

impl TropicalCurve {
    pub fn new(ambient_dim: usize) -> Self {
        TropicalCurve {
            ambient_dim,
            vertices: Vec::new(),
            edges: Vec::new(),
            legs: Vec::new(),
            anchor: None,
            metadata: serde_json::Map::new(),
            balancing_waived: false,
        }
    }

    pub fn add_vertex(&mut self, id: impl Into<String>) -> usize {
        self.vertices.push(id.into());
        self.vertices.len() - 1
    }

    pub fn add_edge(&mut self, tail: usize, head: usize, direction: Vec<i64>, length: Rational) -> usize {
        let id = format!("e{}", self.edges.len());
        self.edges.push(Edge { id, tail, head, direction, length });
        self.edges.len() - 1
    }

    pub fn add_leg(&mut self, vertex: usize, direction: Vec<i64>) {
        self.legs.push(Leg { vertex, direction });
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == id)
    }

    pub fn graph(&self) -> Graph {
        Graph {
            vertex_count: self.vertices.len(),
            edges: self.edges.iter().map(|e| (e.tail, e.head)).collect(),
            legs: self.legs.iter().map(|l| l.vertex).collect(),
        }
    }

    pub fn lengths(&self) -> Vec<Rational> {
        self.edges.iter().map(|e| e.length.clone()).collect()
    }

    /// Reference and dimension checks. Semantic checks live in `validate`.
    pub fn check_structure(&self) -> Result<()> {
        let n = self.vertices.len();
        let r = self.ambient_dim;
        if r == 0 {
            return Err(Error::Structural("ambient dimension must be positive".into()));
        }
        for (i, v) in self.vertices.iter().enumerate() {
            if self.vertices[..i].contains(v) {
                return Err(Error::Structural(format!("duplicate vertex id {v:?}")));
            }
        }
        for e in &self.edges {
            if e.tail >= n || e.head >= n {
                return Err(Error::Structural(format!("edge {} references a missing vertex", e.id)));
            }
            if e.direction.len() != r {
                return Err(Error::Structural(format!(
                    "edge {} has direction of length {}, expected {r}",
                    e.id,
                    e.direction.len()
                )));
            }
        }
        for (i, l) in self.legs.iter().enumerate() {
            if l.vertex >= n {
                return Err(Error::Structural(format!("leg {i} references a missing vertex")));
            }
            if l.direction.len() != r {
                return Err(Error::Structural(format!("leg {i} has direction of wrong length")));
            }
        }
        if let Some(a) = &self.anchor {
            if a.vertex >= n || a.position.len() != r {
                return Err(Error::Structural("anchor references a missing vertex or has wrong length".into()));
            }
        }
        Ok(())
    }

    /// Balancing deficit at `v`: minus the sum of outgoing directions.
    pub fn deficit(&self, v: usize) -> Vec<i64> {
        let mut s = vec![0i64; self.ambient_dim];
        for e in &self.edges {
            if e.tail == v {
                add_into(&mut s, &e.direction, 1);
            }
            if e.head == v {
                add_into(&mut s, &e.direction, -1);
            }
        }
        for l in self.legs.iter().filter(|l| l.vertex == v) {
            add_into(&mut s, &l.direction, 1);
        }
        s.iter().map(|x| -x).collect()
    }

    pub fn validate(&self) -> Result<ValidationReport> {
        self.check_structure()?;
        let vertices: Vec<VertexBalance> = (0..self.vertices.len())
            .map(|v| {
                let deficit = self.deficit(v);
                VertexBalance { vertex: self.vertices[v].clone(), balanced: deficit.iter().all(|&x| x == 0), deficit }
            })
            .collect();
        let unbalanced: Vec<String> = vertices.iter().filter(|b| !b.balanced).map(|b| b.vertex.clone()).collect();
        let nonpositive_lengths: Vec<String> =
            self.edges.iter().filter(|e| !e.length.is_positive()).map(|e| e.id.clone()).collect();
        let zero_directions: Vec<String> =
            self.edges.iter().filter(|e| e.direction.iter().all(|&x| x == 0)).map(|e| e.id.clone()).collect();
        let cycle_closure = self.cycle_closure_holds();
        let valid = (self.balancing_waived || unbalanced.is_empty())
            && nonpositive_lengths.is_empty()
            && zero_directions.is_empty()
            && cycle_closure;
        Ok(ValidationReport {
            valid,
            balancing_waived: self.balancing_waived,
            vertices,
            unbalanced,
            nonpositive_lengths,
            zero_directions,
            cycle_closure,
        })
    }

    /// Every basis cycle closes up: the signed sum of `l_e * w_e` vanishes.
    pub fn cycle_closure_holds(&self) -> bool {
        let basis = cycle_basis(&self.graph());
        basis.cycles.iter().all(|c| {
            let mut s = vec![Rational::zero(); self.ambient_dim];
            for &(e, sign) in c {
                let edge = &self.edges[e];
                for (k, &w) in edge.direction.iter().enumerate() {
                    s[k] += &edge.length * rat(w * sign as i64);
                }
            }
            s.iter().all(Zero::is_zero)
        })
    }

    /// Vertex positions propagated from the anchor along edges; `None` for
    /// vertices in other components or when no anchor is set.
    pub fn positions(&self) -> Vec<Option<Vec<Rational>>> {
        let mut pos: Vec<Option<Vec<Rational>>> = vec![None; self.vertices.len()];
        let Some(anchor) = &self.anchor else {
            return pos;
        };
        pos[anchor.vertex] = Some(anchor.position.clone());
        let adj = incidence(&self.graph());
        let mut queue = VecDeque::from([anchor.vertex]);
        while let Some(v) = queue.pop_front() {
            for &e in &adj[v] {
                let edge = &self.edges[e];
                let (other, sign) = if edge.tail == v { (edge.head, 1) } else { (edge.tail, -1) };
                if pos[other].is_some() {
                    continue;
                }
                let p = pos[v].as_ref().unwrap();
                let q = p
                    .iter()
                    .zip(&edge.direction)
                    .map(|(x, &w)| x + &edge.length * rat(sign * w))
                    .collect();
                pos[other] = Some(q);
                queue.push_back(other);
            }
        }
        pos
    }

    /// Displacement `l_e * w_e` of an edge.
    pub fn displacement(&self, e: usize) -> Vec<Rational> {
        let edge = &self.edges[e];
        edge.direction.iter().map(|&w| &edge.length * rat(w)).collect()
    }

    /// Keep the listed edges (in their original order) and the vertices they
    /// touch. Legs are dropped and balancing is waived.
    pub fn restrict_to_edges(&self, keep: &[usize]) -> TropicalCurve {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let mut used = vec![false; self.vertices.len()];
        for &e in &keep {
            used[self.edges[e].tail] = true;
            used[self.edges[e].head] = true;
        }
        let mut remap = vec![usize::MAX; self.vertices.len()];
        let mut out = TropicalCurve::new(self.ambient_dim);
        for (v, id) in self.vertices.iter().enumerate() {
            if used[v] {
                remap[v] = out.add_vertex(id.clone());
            }
        }
        for &e in &keep {
            let edge = &self.edges[e];
            out.edges.push(Edge { tail: remap[edge.tail], head: remap[edge.head], ..edge.clone() });
        }
        if self.anchor.is_some() {
            let pos = self.positions();
            if let Some(v) = (0..self.vertices.len()).find(|&v| used[v] && pos[v].is_some()) {
                out.anchor = Some(Anchor { vertex: remap[v], position: pos[v].clone().unwrap() });
            }
        }
        out.metadata = self.metadata.clone();
        out.balancing_waived = true;
        out
    }

    /// Split edge `e` at fraction `t` (0 < t < 1) of its length. The new
    /// vertex and edge are appended.
    pub fn subdivide(&self, e: usize, t: &Rational) -> TropicalCurve {
        assert!(t.is_positive() && *t < Rational::one());
        let mut out = self.clone();
        let mid = out.add_vertex(fresh_id(&out.vertices, "s"));
        let edge = out.edges[e].clone();
        let first = &edge.length * t;
        let second = &edge.length - &first;
        out.edges[e].head = mid;
        out.edges[e].length = first;
        let id = fresh_id(&out.edges.iter().map(|x| x.id.clone()).collect::<Vec<_>>(), "s");
        out.edges.push(Edge { id, tail: mid, head: edge.head, direction: edge.direction, length: second });
        out
    }

    pub fn position_strings(&self) -> Vec<Option<Vec<String>>> {
        self.positions()
            .into_iter()
            .map(|p| p.map(|v| v.iter().map(format_rational).collect()))
            .collect()
    }
}

fn fresh_id(existing: &[String], prefix: &str) -> String {
    (0..).map(|k| format!("{prefix}{k}")).find(|c| !existing.contains(c)).unwrap()
}

fn add_into(acc: &mut [i64], v: &[i64], sign: i64) {
    for (a, &x) in acc.iter_mut().zip(v) {
        *a += sign * x;
    }
}

/// Incident edge indices per vertex, in input order. A loop is listed once.
pub fn incidence(graph: &Graph) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); graph.vertex_count];
    for (i, &(t, h)) in graph.edges.iter().enumerate() {
        adj[t].push(i);
        if h != t {
            adj[h].push(i);
        }
    }
    adj
}

/// Valence counting bounded edges only; loops count twice.
pub fn valences(graph: &Graph) -> Vec<usize> {
    let mut val = vec![0; graph.vertex_count];
    for &(t, h) in &graph.edges {
        val[t] += 1;
        val[h] += 1;
    }
    val
}

pub fn connected_components(graph: &Graph) -> usize {
    let mut parent: Vec<usize> = (0..graph.vertex_count).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    let mut comps = graph.vertex_count;
    for &(t, h) in &graph.edges {
        let (a, b) = (find(&mut parent, t), find(&mut parent, h));
        if a != b {
            parent[a] = b;
            comps -= 1;
        }
    }
    comps
}

/// First Betti number `#E - #V + #components`; legs are ignored.
pub fn genus(graph: &Graph) -> usize {
    graph.edges.len() + connected_components(graph) - graph.vertex_count
}

/// Fundamental cycles of the BFS spanning forest rooted at the lowest vertex
/// of each component, scanning edges in input order.
pub fn cycle_basis(graph: &Graph) -> CycleBasis {
    let vertex_order: Vec<usize> = (0..graph.vertex_count).collect();
    let edge_order: Vec<usize> = (0..graph.edges.len()).collect();
    cycle_basis_with_order(graph, &vertex_order, &edge_order)
}

/// Fundamental cycles for the spanning forest found by BFS, taking roots in
/// `vertex_order` and scanning incident edges in `edge_order`. Any pair of
/// permutations gives a valid basis; the default uses identity orders.
pub fn cycle_basis_with_order(graph: &Graph, vertex_order: &[usize], edge_order: &[usize]) -> CycleBasis {
    let n = graph.vertex_count;
    let mut rank_of_edge = vec![0; graph.edges.len()];
    for (r, &e) in edge_order.iter().enumerate() {
        rank_of_edge[e] = r;
    }
    let mut adj = incidence(graph);
    for list in adj.iter_mut() {
        list.sort_by_key(|&e| rank_of_edge[e]);
    }
    // parent[v] = (parent vertex, edge to parent)
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut depth = vec![usize::MAX; n];
    let mut tree = vec![false; graph.edges.len()];
    for &root in vertex_order {
        if depth[root] != usize::MAX {
            continue;
        }
        depth[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &e in &adj[v] {
                let (t, h) = graph.edges[e];
                let other = if t == v { h } else { t };
                if depth[other] == usize::MAX {
                    depth[other] = depth[v] + 1;
                    parent[other] = Some((v, e));
                    tree[e] = true;
                    queue.push_back(other);
                }
            }
        }
    }
    let mut cycles = Vec::new();
    for &e in edge_order {
        if tree[e] {
            continue;
        }
        let (t, h) = graph.edges[e];
        let mut walk = vec![(e, 1i8)];
        // Climb from h and from t to their common ancestor.
        let (mut a, mut b) = (h, t);
        let mut up = Vec::new();
        let mut down = Vec::new();
        while a != b {
            if depth[a] >= depth[b] {
                let (p, pe) = parent[a].unwrap();
                let sign = if graph.edges[pe].0 == a { 1 } else { -1 };
                up.push((pe, sign));
                a = p;
            } else {
                let (p, pe) = parent[b].unwrap();
                let sign = if graph.edges[pe].0 == p { 1 } else { -1 };
                down.push((pe, sign));
                b = p;
            }
        }
        walk.extend(up);
        walk.extend(down.into_iter().rev());
        cycles.push(walk);
    }
    CycleBasis { cycles }
}

impl CycleBasis {
    pub fn genus(&self) -> usize {
        self.cycles.len()
    }

    /// Signed incidence vector of each cycle over `edge_count` edges.
    pub fn incidence(&self, edge_count: usize) -> Vec<Vec<i64>> {
        self.cycles
            .iter()
            .map(|c| {
                let mut v = vec![0i64; edge_count];
                for &(e, s) in c {
                    v[e] += s as i64;
                }
                v
            })
            .collect()
    }

    /// Re-index cycles through `map[old edge] = Some(new edge)`.
    pub fn reindex(&self, map: &[Option<usize>]) -> CycleBasis {
        CycleBasis {
            cycles: self
                .cycles
                .iter()
                .map(|c| c.iter().map(|&(e, s)| (map[e].expect("cycle edge missing from target"), s)).collect())
                .collect(),
        }
    }
}

/// Edges lying on no cycle.
pub fn bridges(graph: &Graph) -> Vec<bool> {
    let basis = cycle_basis(graph);
    let mut on_cycle = vec![false; graph.edges.len()];
    for c in &basis.cycles {
        for &(e, _) in c {
            on_cycle[e] = true;
        }
    }
    on_cycle.into_iter().map(|c| !c).collect()
}

/// Indices of the edges that survive in the core neighbourhood.
pub fn core_edges(curve: &TropicalCurve) -> Vec<usize> {
    let br = bridges(&curve.graph());
    (0..curve.edges.len()).filter(|&e| !br[e]).collect()
}

/// Remove legs, bridges and then isolated vertices.
pub fn core_neighbourhood(curve: &TropicalCurve) -> TropicalCurve {
    curve.restrict_to_edges(&core_edges(curve))
}

/// Suppress 2-valent vertices of a bridgeless, legless core and record how
/// the resulting segments sit in the given cycle basis.
pub fn smoothing(core: &TropicalCurve, basis: &CycleBasis) -> Result<SegmentDecomposition> {
    let graph = core.graph();
    if !core.legs.is_empty() {
        return Err(Error::Precondition("smoothing expects a curve without legs".into()));
    }
    let val = valences(&graph);
    if let Some(v) = (0..graph.vertex_count).find(|&v| val[v] < 2) {
        return Err(Error::Precondition(format!(
            "vertex {} has valence {} in the core",
            core.vertices[v], val[v]
        )));
    }
    let adj = incidence(&graph);
    let mut assigned = vec![false; graph.edges.len()];
    let mut segments = Vec::new();

    // Walk from `v` along `e`, continuing through 2-valent vertices.
    let walk = |v: usize, e: usize, assigned: &mut Vec<bool>| -> (Vec<(usize, i8)>, usize) {
        let mut path = Vec::new();
        let (mut v, mut e) = (v, e);
        loop {
            assigned[e] = true;
            let (t, h) = graph.edges[e];
            let (next, sign) = if t == v { (h, 1) } else { (t, -1) };
            path.push((e, sign));
            if val[next] != 2 {
                return (path, next);
            }
            match adj[next].iter().find(|&&f| !assigned[f]) {
                Some(&f) => {
                    v = next;
                    e = f;
                }
                None => return (path, next),
            }
        }
    };

    for v in (0..graph.vertex_count).filter(|&v| val[v] != 2) {
        for &e in &adj[v] {
            if !assigned[e] {
                let (path, end) = walk(v, e, &mut assigned);
                segments.push(canonical_segment(v, end, path, &graph));
            }
        }
    }
    // Components that are bare cycles.
    for v in 0..graph.vertex_count {
        if let Some(&e) = adj[v].iter().find(|&&e| !assigned[e]) {
            let (path, end) = walk(v, e, &mut assigned);
            segments.push(canonical_segment(v, end, path, &graph));
        }
    }

    let inc = basis.incidence(graph.edges.len());
    let mut eta = vec![vec![0i8; segments.len()]; basis.cycles.len()];
    for (i, row) in inc.iter().enumerate() {
        for (j, seg) in segments.iter().enumerate() {
            let signs: Vec<i64> = seg.edges.iter().map(|&(e, o)| row[e] * o as i64).collect();
            if signs.iter().any(|&s| s != signs[0]) || signs[0].abs() > 1 {
                return Err(Error::Invariant(format!(
                    "cycle {i} does not traverse segment {j} as a directed path"
                )));
            }
            eta[i][j] = signs[0] as i8;
        }
    }
    let blocks = segments
        .iter()
        .map(|s| {
            s.edges
                .iter()
                .map(|&(e, o)| core.edges[e].direction.iter().map(|&x| x * o as i64).collect())
                .collect()
        })
        .collect();
    Ok(SegmentDecomposition { segments, eta, blocks })
}

/// Orient a segment so that its lowest-index edge is traversed tail to head.
fn canonical_segment(start: usize, end: usize, path: Vec<(usize, i8)>, graph: &Graph) -> Segment {
    let (min_pos, _) = path.iter().enumerate().min_by_key(|(_, &(e, _))| e).unwrap();
    let mut seg = Segment { start, end, edges: path };
    if seg.edges[min_pos].1 < 0 {
        seg.edges.reverse();
        for p in seg.edges.iter_mut() {
            p.1 = -p.1;
        }
        std::mem::swap(&mut seg.start, &mut seg.end);
    }
    debug_assert!({
        let (e0, o0) = seg.edges[0];
        let (t, h) = graph.edges[e0];
        (if o0 > 0 { t } else { h }) == seg.start
    });
    seg
}

/// Segment decomposition of the curve's core, with the core's own cycle
/// basis. Returns the core, its basis and the decomposition.
pub fn core_segments(curve: &TropicalCurve) -> Result<(TropicalCurve, CycleBasis, SegmentDecomposition)> {
    let core = core_neighbourhood(curve);
    let basis = cycle_basis(&core.graph());
    let dec = smoothing(&core, &basis)?;
    Ok((core, basis, dec))
}

/// Restriction of the curve to the edges of the chosen core segments.
pub fn subcurve(curve: &TropicalCurve, segment_ids: &[usize]) -> Result<TropicalCurve> {
    let keep = core_edges(curve);
    let (_, _, dec) = core_segments(curve)?;
    let mut edges = Vec::new();
    for &s in segment_ids {
        let seg = dec.segments.get(s).ok_or(Error::UnknownSegment(s))?;
        edges.extend(seg.edges.iter().map(|&(e, _)| keep[e]));
    }
    Ok(curve.restrict_to_edges(&edges))
}

/// Tally legs by primitive direction and detect the standard degree pattern.
pub fn degree_profile(curve: &TropicalCurve) -> DegreeProfile {
    let r = curve.ambient_dim;
    let mut legs_by_direction: BTreeMap<Vec<i64>, Vec<i64>> = BTreeMap::new();
    for l in &curve.legs {
        let g = l.direction.iter().fold(0i64, |acc, &x| acc.gcd(&x));
        if g == 0 {
            continue;
        }
        let prim: Vec<i64> = l.direction.iter().map(|x| x / g).collect();
        legs_by_direction.entry(prim).or_default().push(g);
    }
    let mut standard: Vec<Vec<i64>> = (0..r)
        .map(|i| {
            let mut v = vec![0; r];
            v[i] = 1;
            v
        })
        .collect();
    standard.push(vec![-1; r]);
    let total = |d: &Vec<i64>| legs_by_direction.get(d).map(|w| w.iter().sum::<i64>()).unwrap_or(0);
    let only_standard = legs_by_direction.keys().all(|k| standard.contains(k));
    let d = total(&standard[0]);
    let standard_degree = (only_standard && d > 0 && standard.iter().all(|s| total(s) == d)).then_some(d);
    DegreeProfile { legs_by_direction, standard_degree }
}

/// Primitive part and weight of an integer vector.
pub fn primitive_and_weight(v: &[i64]) -> (Vec<i64>, i64) {
    let g = v.iter().fold(0i64, |acc, &x| acc.gcd(&x));
    if g == 0 {
        return (v.to_vec(), 0);
    }
    (v.iter().map(|x| x / g).collect(), g)
}

pub fn bigint_vec(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}
