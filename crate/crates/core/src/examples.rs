//! Built-in curves and the standard tropical plane in three dimensions.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::classify::TriState;
use crate::curve::{primitive_and_weight, TropicalCurve};
use crate::error::{Error, Result};
use crate::linalg::{rat, Rational};

pub const BUILTIN_NAMES: [&str; 9] = [
    "tuning_fork_r2",
    "tuning_fork_r3",
    "composite_fig3",
    "phi3_sub",
    "phi3",
    "phi4_sub",
    "phi4",
    "triangle_g3",
    "planar_g1",
];

/// Published facts a template must reproduce.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExpectedReport {
    pub genus: usize,
    pub bounded_edges: usize,
    pub legs: usize,
    pub actual_dim: i64,
    pub expected_dim: i64,
    pub excess: i64,
    pub planar: Option<bool>,
    pub irreducible: Option<TriState>,
    pub indecomposable: Option<TriState>,
    pub standard_degree: Option<i64>,
    /// Vertices where balancing is expected to fail.
    pub unbalanced: Vec<String>,
    pub source: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveTemplate {
    pub name: String,
    pub curve: TropicalCurve,
    pub expected_report: ExpectedReport,
}

/// Builds curves from integral vertex positions.
struct Placed {
    curve: TropicalCurve,
    pos: Vec<Vec<i64>>,
}

impl Placed {
    fn new(r: usize) -> Self {
        Placed { curve: TropicalCurve::new(r), pos: Vec::new() }
    }

    fn vertex(&mut self, id: &str, p: &[i64]) -> usize {
        let v = self.curve.add_vertex(id);
        self.pos.push(p.to_vec());
        if self.curve.anchor.is_none() {
            self.curve.anchor = Some(crate::curve::Anchor { vertex: v, position: p.iter().map(|&x| rat(x)).collect() });
        }
        v
    }

    fn id(&self, name: &str) -> usize {
        self.curve.vertex_index(name).unwrap_or_else(|| panic!("unknown vertex {name}"))
    }

    /// Edge along the displacement with the given weight folded into the
    /// direction; length is the lattice length divided by the weight.
    fn edge_w(&mut self, a: &str, b: &str, weight: i64) {
        let (ia, ib) = (self.id(a), self.id(b));
        let disp: Vec<i64> = self.pos[ib].iter().zip(&self.pos[ia]).map(|(x, y)| x - y).collect();
        let (prim, content) = primitive_and_weight(&disp);
        let dir = prim.iter().map(|x| x * weight).collect();
        self.curve.add_edge(ia, ib, dir, Rational::new(content.into(), weight.into()));
    }

    fn edge(&mut self, a: &str, b: &str) {
        self.edge_w(a, b, 1);
    }
}

fn expected(genus: usize, b: usize, n: usize, dims: (i64, i64), source: &str) -> ExpectedReport {
    ExpectedReport {
        genus,
        bounded_edges: b,
        legs: n,
        actual_dim: dims.0,
        expected_dim: dims.1,
        excess: dims.0 - dims.1,
        planar: None,
        irreducible: None,
        indecomposable: None,
        standard_degree: None,
        unbalanced: Vec::new(),
        source: source.into(),
    }
}

pub fn builtin(name: &str) -> Result<CurveTemplate> {
    let (curve, expected_report) = match name {
        "tuning_fork_r2" => (tuning_fork_r2(), {
            let mut e = expected(2, 6, 3, (3, 2), "triple tuning fork in the plane");
            e.planar = Some(false);
            e.irreducible = Some(TriState::Yes);
            e.indecomposable = Some(TriState::Yes);
            e.standard_degree = Some(2);
            e
        }),
        "tuning_fork_r3" => (tuning_fork_r3(), {
            let mut e = expected(2, 6, 4, (1, 0), "tuning fork lifted to three dimensions");
            e.irreducible = Some(TriState::Yes);
            e.indecomposable = Some(TriState::No);
            e
        }),
        "composite_fig3" => (composite_fig3(), {
            let mut e = expected(3, 10, 4, (5, 4), "tuning fork joined to a generic triangle");
            e.irreducible = Some(TriState::No);
            e.indecomposable = Some(TriState::Yes);
            e
        }),
        "phi3_sub" => (phi3_sub(), {
            let mut e = expected(3, 12, 0, (4, 3), "genus-3 subcurve in the tropical plane");
            e.planar = Some(false);
            e.irreducible = Some(TriState::Yes);
            e.indecomposable = Some(TriState::Yes);
            e.unbalanced = ["b", "d", "f", "h", "i", "j"].map(String::from).to_vec();
            e
        }),
        "phi3" => (phi3(), {
            let mut e = expected(3, 12, 6, (4, 3), "genus-3 subcurve with balancing legs");
            e.irreducible = Some(TriState::Yes);
            e.indecomposable = Some(TriState::Yes);
            e
        }),
        "phi4_sub" => (phi4_sub(), {
            let mut e = expected(4, 36, 0, (21, 20), "genus-4 subcurve mapping to a line times a conic");
            e.irreducible = Some(TriState::Yes);
            e.indecomposable = Some(TriState::No);
            e.unbalanced = phi4_sub().validate().map(|r| r.unbalanced).unwrap_or_default();
            e
        }),
        "phi4" => (phi4(), {
            let mut e = expected(4, 36, 27, (21, 20), "genus-4 subcurve with balancing legs");
            e.irreducible = Some(TriState::Yes);
            e.indecomposable = Some(TriState::No);
            e
        }),
        "triangle_g3" => (triangle_g3(), {
            let mut e = expected(3, 6, 0, (1, 0), "genus-3 planar subcurve on the complete graph");
            e.unbalanced = ["1", "2", "3", "4"].map(String::from).to_vec();
            e
        }),
        "planar_g1" => (planar_g1(), {
            let mut e = expected(1, 2, 2, (1, 0), "cycle inside a line");
            e.planar = Some(true);
            e.irreducible = Some(TriState::Yes);
            e.indecomposable = Some(TriState::No);
            e
        }),
        other => return Err(Error::UnknownTemplate(other.to_string())),
    };
    let mut curve = curve;
    curve.metadata.insert("name".into(), name.into());
    Ok(CurveTemplate { name: name.into(), curve, expected_report })
}

pub fn all_builtins() -> Vec<CurveTemplate> {
    BUILTIN_NAMES.iter().map(|n| builtin(n).expect("builtin")).collect()
}

const PRONGS: [[i64; 2]; 3] = [[1, 0], [0, 1], [-1, -1]];

pub fn tuning_fork_r2() -> TropicalCurve {
    let mut p = Placed::new(2);
    p.vertex("v0", &[0, 0]);
    for (k, u) in PRONGS.iter().enumerate() {
        p.vertex(&format!("p{k}"), u);
    }
    p.vertex("v1", &[0, 0]);
    for k in 0..3 {
        p.edge("v0", &format!("p{k}"));
        p.edge(&format!("p{k}"), "v1");
    }
    for (k, u) in PRONGS.iter().enumerate() {
        p.curve.add_leg(k + 1, vec![2 * u[0], 2 * u[1]]);
    }
    p.curve
}

pub fn tuning_fork_r3() -> TropicalCurve {
    let mut p = Placed::new(3);
    p.vertex("v0", &[0, 0, 0]);
    for (k, u) in PRONGS.iter().enumerate() {
        p.vertex(&format!("p{k}"), &[u[0], u[1], 0]);
    }
    p.vertex("v1", &[0, 0, -1]);
    for k in 0..3 {
        p.edge("v0", &format!("p{k}"));
        p.edge(&format!("p{k}"), "v1");
    }
    for (k, u) in PRONGS.iter().enumerate() {
        p.curve.add_leg(k + 1, vec![2 * u[0], 2 * u[1], 1]);
    }
    p.curve.add_leg(4, vec![0, 0, -3]);
    p.curve
}

/// The planar tuning fork with its first weight-2 leg replaced by a bridge
/// to a generic triangle.
pub fn composite_fig3() -> TropicalCurve {
    let mut c = tuning_fork_r2();
    c.legs.remove(0);
    let q = c.add_vertex("q");
    let s = c.add_vertex("s");
    let t = c.add_vertex("t");
    c.add_edge(1, q, vec![2, 0], Rational::new(1.into(), 2.into()));
    c.add_edge(q, s, vec![1, 1], rat(1));
    c.add_edge(q, t, vec![1, -1], rat(1));
    c.add_edge(s, t, vec![0, -1], rat(2));
    c.add_leg(s, vec![1, 2]);
    c.add_leg(t, vec![1, -2]);
    c
}

/// Vertex positions of the genus-3 subcurve; rows a through j.
pub const PHI3_POSITIONS: [(&str, [i64; 3]); 10] = [
    ("a", [-1, -1, -1]),
    ("b", [-1, -1, 1]),
    ("c", [0, 0, 1]),
    ("d", [-3, 1, -3]),
    ("e", [0, 1, 0]),
    ("f", [1, -3, -3]),
    ("g", [1, 0, 0]),
    ("h", [0, 1, 1]),
    ("i", [1, 1, 0]),
    ("j", [1, 0, 1]),
];

pub const PHI3_EDGES: [(&str, &str); 12] = [
    ("a", "b"),
    ("b", "c"),
    ("a", "d"),
    ("d", "e"),
    ("a", "f"),
    ("f", "g"),
    ("c", "h"),
    ("h", "e"),
    ("e", "i"),
    ("i", "g"),
    ("g", "j"),
    ("j", "c"),
];

pub fn phi3_sub() -> TropicalCurve {
    let mut p = Placed::new(3);
    for (id, pos) in PHI3_POSITIONS {
        p.vertex(id, &pos);
    }
    for (a, b) in PHI3_EDGES {
        p.edge_w(a, b, if (a, b) == ("a", "b") { 2 } else { 1 });
    }
    p.curve.balancing_waived = true;
    p.curve
}

/// Adds one leg per unbalanced vertex, carrying the balancing deficit.
pub fn with_balancing_legs(sub: &TropicalCurve) -> TropicalCurve {
    let mut c = sub.clone();
    c.balancing_waived = false;
    for v in 0..c.vertices.len() {
        let d = c.deficit(v);
        if d.iter().any(|&x| x != 0) {
            c.add_leg(v, d);
        }
    }
    c
}

pub fn phi3() -> TropicalCurve {
    with_balancing_legs(&phi3_sub())
}

const PHI4_RED: [&str; 3] = ["ab", "cf", "ed"];
const PHI4_GREEN: [&str; 3] = ["af", "be", "cd"];
const PHI4_BLUE: [&str; 3] = ["ad", "bc", "ef"];

/// Lattice path in the conic coordinates from the common image of a, c, e
/// to the image of b, d or f.
fn phi4_conic_path(v: char) -> [[i64; 2]; 3] {
    match v {
        'b' => [[0, 0], [1, 0], [2, 1]],
        'd' => [[0, 0], [0, 1], [-1, 1]],
        _ => [[0, 0], [-1, -1], [-1, -2]],
    }
}

/// Genus-4 subcurve on the 3-regular bipartite graph with parts {a, c, e}
/// and {b, d, f}. The first two coordinates follow a ray of the tropical line,
/// the last two a path in the conic; every segment has four edges.
pub fn phi4_sub() -> TropicalCurve {
    let mut p = Placed::new(4);
    for v in ["a", "c", "e"] {
        p.vertex(v, &[0, 0, 0, 0]);
    }
    for v in ['b', 'd', 'f'] {
        let q = phi4_conic_path(v)[2];
        p.vertex(&v.to_string(), &[0, 0, q[0], q[1]]);
    }
    let rays = PHI4_RED.iter().map(|s| (s, [0, 1])).chain(PHI4_GREEN.iter().map(|s| (s, [1, 0])));
    for (s, ray) in rays.chain(PHI4_BLUE.iter().map(|s| (s, [-1, -1]))) {
        let mut ends: Vec<char> = s.chars().collect();
        if "bdf".contains(ends[0]) {
            ends.swap(0, 1);
        }
        let path = phi4_conic_path(ends[1]);
        let mut names = vec![ends[0].to_string()];
        for (k, q) in std::iter::once(&path[0]).chain(&path[1..]).enumerate() {
            let name = format!("{s}{}", k + 1);
            p.vertex(&name, &[ray[0], ray[1], q[0], q[1]]);
            names.push(name);
        }
        names.push(ends[1].to_string());
        for w in names.windows(2) {
            p.edge(&w[0], &w[1]);
        }
    }
    p.curve.balancing_waived = true;
    p.curve
}

pub fn phi4() -> TropicalCurve {
    with_balancing_legs(&phi4_sub())
}

/// The complete graph on four vertices drawn as a triangle with an interior
/// point in the plane.
pub fn triangle_g3() -> TropicalCurve {
    let mut p = Placed::new(2);
    p.vertex("1", &[0, 0]);
    p.vertex("2", &[4, 0]);
    p.vertex("3", &[0, -4]);
    p.vertex("4", &[1, -1]);
    for (a, b) in [("1", "2"), ("2", "3"), ("3", "1"), ("1", "4"), ("2", "4"), ("3", "4")] {
        p.edge(a, b);
    }
    p.curve.balancing_waived = true;
    p.curve
}

pub fn planar_g1() -> TropicalCurve {
    let mut p = Placed::new(2);
    p.vertex("a", &[0, 0]);
    p.vertex("b", &[1, 0]);
    p.edge("a", "b");
    p.edge("b", "a");
    p.curve.add_leg(0, vec![-2, 0]);
    p.curve.add_leg(1, vec![2, 0]);
    p.curve
}

/// Writes `d` as a sum of standard directions `e_i` and `-(e_1 + ... + e_r)`
/// using the fewest copies of the latter; coordinate legs come first.
pub fn standard_leg_split(d: &[i64]) -> Vec<Vec<i64>> {
    let r = d.len();
    let c = (-d.iter().copied().min().unwrap_or(0)).max(0);
    let mut out = Vec::new();
    for (i, &x) in d.iter().enumerate() {
        for _ in 0..x + c {
            let mut e = vec![0; r];
            e[i] = 1;
            out.push(e);
        }
    }
    for _ in 0..c {
        out.push(vec![-1; r]);
    }
    out
}

/// Replaces every balancing deficit with a caterpillar tree of unit-length
/// edges ending in standard-direction legs, giving a curve of standard
/// degree. Trivalent whenever the deficits sit on 2-valent vertices.
pub fn standard_completion(sub: &TropicalCurve) -> TropicalCurve {
    let mut c = sub.clone();
    c.balancing_waived = false;
    for v in 0..sub.vertices.len() {
        let d = c.deficit(v);
        if d.iter().all(|&x| x == 0) {
            continue;
        }
        let legs = standard_leg_split(&d);
        let base = c.vertices[v].clone();
        if legs.len() == 1 {
            c.add_leg(v, legs[0].clone());
            continue;
        }
        let mut at = v;
        let mut rest = d.clone();
        for (k, leg) in legs.iter().enumerate().take(legs.len() - 1) {
            let t = c.add_vertex(format!("{base}_t{k}"));
            c.add_edge(at, t, rest.clone(), rat(1));
            c.add_leg(t, leg.clone());
            rest = rest.iter().zip(leg).map(|(x, y)| x - y).collect();
            at = t;
            if k == legs.len() - 2 {
                c.add_leg(t, rest.clone());
            }
        }
    }
    c
}

/// Degree-5 genus-3 trivalent curve in three dimensions whose core is the
/// genus-3 subcurve.
pub fn phi3_degree5() -> TropicalCurve {
    let mut c = standard_completion(&phi3_sub());
    c.metadata.insert("name".into(), "phi3_degree5".into());
    c
}

/// Standard-degree trivalent completion of the genus-4 subcurve.
pub fn phi4_standard() -> TropicalCurve {
    let mut c = standard_completion(&phi4_sub());
    c.metadata.insert("name".into(), "phi4_standard".into());
    c
}

/// A tropical line with one bounded edge, degree 1 in the plane.
pub fn genus0_line() -> TropicalCurve {
    let mut c = TropicalCurve::new(2);
    let a = c.add_vertex("a");
    let b = c.add_vertex("b");
    c.add_edge(a, b, vec![1, 1], rat(1));
    c.add_leg(a, vec![-1, -1]);
    c.add_leg(b, vec![1, 0]);
    c.add_leg(b, vec![0, 1]);
    c.anchor = Some(crate::curve::Anchor { vertex: a, position: vec![rat(0), rat(0)] });
    c
}

/// Membership in the fan with rays `e_1, e_2, e_3, -(1,1,1)` and the six
/// two-dimensional cones on pairs of rays.
pub fn in_standard_tropical_plane(p: &[Rational]) -> bool {
    assert_eq!(p.len(), 3, "point must lie in three-space");
    let zero = Rational::zero();
    for i in 0..3 {
        let others: Vec<&Rational> = (0..3).filter(|&j| j != i).map(|j| &p[j]).collect();
        // cone on e_j, e_k with i the missing coordinate
        if p[i].is_zero() && others.iter().all(|x| **x >= zero) {
            return true;
        }
        // cone on -(1,1,1), e_i
        if others[0] == others[1] && *others[0] <= zero && p[i] >= *others[0] {
            return true;
        }
    }
    false
}

/// Parameters in (0, 1) where a coordinate or a coordinate difference
/// changes sign along the segment from `p` to `q`.
fn breakpoints(p: &[Rational], q: &[Rational]) -> Vec<Rational> {
    let mut forms: Vec<(Rational, Rational)> = (0..3).map(|i| (p[i].clone(), q[i].clone())).collect();
    for i in 0..3 {
        for j in i + 1..3 {
            forms.push((&p[i] - &p[j], &q[i] - &q[j]));
        }
    }
    let mut ts = vec![Rational::zero(), Rational::one()];
    for (a, b) in forms {
        let diff = &a - &b;
        if !diff.is_zero() {
            let t = &a / &diff;
            if t.is_positive() && t < Rational::one() {
                ts.push(t);
            }
        }
    }
    ts.sort();
    ts.dedup();
    ts
}

/// Exact check that the image of every edge lies in the standard plane:
/// membership is constant between consecutive breakpoints, so endpoints and
/// midpoints suffice.
pub fn verify_plane_containment(curve: &TropicalCurve) -> Result<bool> {
    if curve.ambient_dim != 3 {
        return Err(Error::Precondition("plane containment needs ambient dimension 3".into()));
    }
    if curve.anchor.is_none() {
        return Err(Error::Precondition("curve has no base position".into()));
    }
    let pos = curve.positions();
    for e in &curve.edges {
        let (Some(p), Some(q)) = (&pos[e.tail], &pos[e.head]) else {
            return Err(Error::Precondition("vertex not reachable from the base vertex".into()));
        };
        let ts = breakpoints(p, q);
        let at = |t: &Rational| -> Vec<Rational> { p.iter().zip(q).map(|(a, b)| a + (b - a) * t).collect() };
        for w in ts.windows(2) {
            let mid = (&w[0] + &w[1]) / Rational::from_integer(2.into());
            if !in_standard_tropical_plane(&at(&w[0])) || !in_standard_tropical_plane(&at(&mid)) {
                return Ok(false);
            }
        }
        if !in_standard_tropical_plane(q) {
            return Ok(false);
        }
    }
    Ok(true)
}
