//! Seeded generators for randomized checks.

use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curve::{Anchor, TropicalCurve};
use crate::examples::with_balancing_legs;
use crate::linalg::{content, kernel_basis, primitive_same_direction, rat, Rational, RationalMatrix};
use crate::transforms::{apply_affine, AffineMap};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn small_rational<R: Rng>(rng: &mut R, num: i64, den: i64) -> Rational {
    Rational::new(rng.gen_range(-num..=num).into(), rng.gen_range(1..=den).into())
}

fn positive_length<R: Rng>(rng: &mut R) -> Rational {
    Rational::new(rng.gen_range(1..=4).into(), rng.gen_range(1..=2).into())
}

fn nonzero_vector<R: Rng>(rng: &mut R, r: usize, bound: i64) -> Vec<i64> {
    loop {
        let v: Vec<i64> = (0..r).map(|_| rng.gen_range(-bound..=bound)).collect();
        if v.iter().any(|&x| x != 0) {
            return v;
        }
    }
}

/// Invertible `r x r` matrix with small rational entries.
pub fn random_invertible<R: Rng>(rng: &mut R, r: usize) -> RationalMatrix {
    loop {
        let entries = (0..r * r).map(|_| small_rational(rng, 3, 3)).collect();
        let m = RationalMatrix::new(r, r, entries);
        if m.inverse().is_some() {
            return m;
        }
    }
}

/// Invertible affine map with a small rational offset.
pub fn random_affine<R: Rng>(rng: &mut R, r: usize) -> AffineMap {
    let mut map = AffineMap::linear(random_invertible(rng, r));
    map.offset = (0..r).map(|_| small_rational(rng, 5, 2)).collect();
    map
}

/// Path with directions from `dir` whose total displacement is `target`;
/// the edge count is drawn from `edges`. The last edge closes the path and
/// may leave the generator's lattice but stays in its linear span.
fn closing_path<R: Rng>(
    rng: &mut R,
    target: &[Rational],
    edges: std::ops::RangeInclusive<usize>,
    dir: &mut dyn FnMut(&mut R) -> Vec<i64>,
) -> Vec<(Vec<i64>, Rational)> {
    let mut k = rng.gen_range(edges);
    loop {
        let mut out = Vec::new();
        let mut rest = target.to_vec();
        for _ in 1..k {
            let w = dir(rng);
            let l = positive_length(rng);
            for (x, &wi) in rest.iter_mut().zip(&w) {
                *x -= &l * rat(wi);
            }
            out.push((w, l));
        }
        if rest.iter().all(Zero::is_zero) {
            // a single edge cannot close a zero displacement
            k = k.max(2);
            continue;
        }
        let prim: Vec<i64> = primitive_same_direction(&rest).iter().map(|x| i64::try_from(x).unwrap()).collect();
        let l = content(&rest) / content(&prim.iter().map(|&x| rat(x)).collect::<Vec<_>>());
        out.push((prim, l));
        return out;
    }
}

fn theta_from_paths(r: usize, paths: Vec<Vec<(Vec<i64>, Rational)>>) -> TropicalCurve {
    let mut c = TropicalCurve::new(r);
    let a = c.add_vertex("A");
    let b = c.add_vertex("B");
    for (s, path) in paths.into_iter().enumerate() {
        let mut at = a;
        let n = path.len();
        for (k, (w, l)) in path.into_iter().enumerate() {
            let next = if k + 1 == n { b } else { c.add_vertex(format!("s{s}_{k}")) };
            c.add_edge(at, next, w, l);
            at = next;
        }
    }
    c.anchor = Some(Anchor { vertex: a, position: vec![Rational::zero(); r] });
    c
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Genus2Kind {
    /// Two of the three strands lie in a common hyperplane.
    Planar,
    /// Image of the normal form under an invertible rational map.
    Canonical,
    /// Random strands.
    Generic,
}

/// Genus-2 theta curve with balancing legs.
pub fn random_genus2<R: Rng>(rng: &mut R, kind: Genus2Kind) -> TropicalCurve {
    let curve = match kind {
        Genus2Kind::Planar => {
            let r = rng.gen_range(2..=3);
            let normal = nonzero_vector(rng, r, 2);
            let perp = kernel_basis(&RationalMatrix::from_i64_rows(r, &[normal]));
            let perp: Vec<Vec<i64>> =
                perp.iter().map(|v| v.iter().map(|x| i64::try_from(x).unwrap()).collect()).collect();
            let mut in_plane = |rng: &mut R| loop {
                let mut w = vec![0i64; r];
                for p in &perp {
                    let k = rng.gen_range(-2..=2);
                    for (x, y) in w.iter_mut().zip(p) {
                        *x += k * y;
                    }
                }
                if w.iter().any(|&x| x != 0) {
                    return w;
                }
            };
            let target_dir = in_plane(rng);
            let t = positive_length(rng);
            let target: Vec<Rational> = target_dir.iter().map(|&x| &t * rat(x)).collect();
            let mut free = |rng: &mut R| nonzero_vector(rng, r, 2);
            let mut paths = vec![
                closing_path(rng, &target, 2..=3, &mut in_plane),
                closing_path(rng, &target, 2..=3, &mut in_plane),
                closing_path(rng, &target, 1..=3, &mut free),
            ];
            paths.shuffle(rng);
            theta_from_paths(r, paths)
        }
        Genus2Kind::Canonical => {
            let lines = [[0i64, 1], [1, 0], [1, -1]];
            let zero = vec![Rational::zero(); 2];
            let mut paths: Vec<_> = lines
                .iter()
                .map(|v| {
                    let mut along = |rng: &mut R| {
                        let k = *[-2i64, -1, 1, 2].choose(rng).unwrap();
                        vec![k * v[0], k * v[1]]
                    };
                    closing_path(rng, &zero, 2..=3, &mut along)
                })
                .collect();
            paths.shuffle(rng);
            let normal = theta_from_paths(2, paths);
            let map = AffineMap::linear(random_invertible(rng, 2));
            apply_affine(&normal, &map).expect("invertible maps contract nothing").0
        }
        Genus2Kind::Generic => {
            let target: Vec<Rational> = (0..2).map(|_| small_rational(rng, 3, 1)).collect();
            let mut free = |rng: &mut R| nonzero_vector(rng, 2, 2);
            let paths = (0..3).map(|_| closing_path(rng, &target, 1..=3, &mut free)).collect();
            theta_from_paths(2, paths)
        }
    };
    with_balancing_legs(&curve)
}

/// Connected curve from integral vertex positions: a random spanning tree
/// plus `extra` further edges, balanced with legs.
pub fn random_curve<R: Rng>(rng: &mut R, r: usize, vertices: usize, extra: usize) -> TropicalCurve {
    let mut pos: Vec<Vec<i64>> = Vec::new();
    while pos.len() < vertices {
        let p: Vec<i64> = (0..r).map(|_| rng.gen_range(-3..=3)).collect();
        if !pos.contains(&p) {
            pos.push(p);
        }
    }
    let mut c = TropicalCurve::new(r);
    for i in 0..vertices {
        c.add_vertex(format!("v{i}"));
    }
    let join = |c: &mut TropicalCurve, a: usize, b: usize| {
        let disp: Vec<Rational> = pos[b].iter().zip(&pos[a]).map(|(x, y)| rat(x - y)).collect();
        let w: Vec<i64> = primitive_same_direction(&disp).iter().map(|x| i64::try_from(x).unwrap()).collect();
        let l = content(&disp) / content(&w.iter().map(|&x| rat(x)).collect::<Vec<_>>());
        c.add_edge(a, b, w, l);
    };
    for v in 1..vertices {
        let u = rng.gen_range(0..v);
        if rng.gen_bool(0.5) {
            join(&mut c, u, v);
        } else {
            join(&mut c, v, u);
        }
    }
    for _ in 0..extra {
        let a = rng.gen_range(0..vertices);
        let mut b = rng.gen_range(0..vertices);
        while b == a {
            b = rng.gen_range(0..vertices);
        }
        join(&mut c, a, b);
    }
    c.anchor = Some(Anchor { vertex: 0, position: pos[0].iter().map(|&x| rat(x)).collect() });
    with_balancing_legs(&c)
}

/// A random curve from a mix of families, about a third of them
/// superabundant.
pub fn random_mixed<R: Rng>(rng: &mut R) -> TropicalCurve {
    match rng.gen_range(0..4) {
        0 => random_genus2(rng, Genus2Kind::Planar),
        1 => random_genus2(rng, Genus2Kind::Canonical),
        2 => random_genus2(rng, Genus2Kind::Generic),
        _ => {
            let r = rng.gen_range(2..=3);
            let v = rng.gen_range(3..=6);
            let e = rng.gen_range(1..=3);
            random_curve(rng, r, v, e)
        }
    }
}

/// Subdivide a random edge at a random interior point.
pub fn random_subdivision<R: Rng>(rng: &mut R, c: &TropicalCurve) -> TropicalCurve {
    let e = rng.gen_range(0..c.edges.len());
    let t = Rational::new(rng.gen_range(1..=4).into(), 5.into());
    debug_assert!(t.is_positive());
    c.subdivide(e, &t)
}

/// Random vertex and edge orders for re-choosing a spanning forest.
pub fn random_orders<R: Rng>(rng: &mut R, c: &TropicalCurve) -> (Vec<usize>, Vec<usize>) {
    let mut vs: Vec<usize> = (0..c.vertices.len()).collect();
    let mut es: Vec<usize> = (0..c.edges.len()).collect();
    vs.shuffle(rng);
    es.shuffle(rng);
    (vs, es)
}
