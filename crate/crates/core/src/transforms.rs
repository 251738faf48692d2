//! Rational affine images of curves and the projection onto the obstruction.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::abundancy::{analyze, obstructions};
use crate::curve::{core_neighbourhood, core_segments, genus, Anchor, Edge, Leg, TropicalCurve};
use crate::error::{Error, Result};
use crate::linalg::{content, i64_to_rational_vec, rref, serde_rational, Rational, RationalMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineMap {
    /// `s x r`
    pub matrix: RationalMatrix,
    pub offset: Vec<Rational>,
}

impl AffineMap {
    pub fn linear(matrix: RationalMatrix) -> Self {
        let offset = vec![Rational::zero(); matrix.rows()];
        AffineMap { matrix, offset }
    }

    pub fn identity(r: usize) -> Self {
        Self::linear(RationalMatrix::identity(r))
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &AffineMap) -> AffineMap {
        let matrix = self.matrix.mul(&first.matrix);
        let offset =
            self.matrix.mul_vec(&first.offset).into_iter().zip(&self.offset).map(|(a, b)| a + b).collect();
        AffineMap { matrix, offset }
    }

    pub fn apply_point(&self, p: &[Rational]) -> Vec<Rational> {
        self.matrix.mul_vec(p).into_iter().zip(&self.offset).map(|(a, b)| a + b).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DilationRecord {
    /// Common factor multiplying every edge length (`1/m`).
    #[serde(serialize_with = "serde_rational::single")]
    pub factor: Rational,
    /// Per surviving edge, the factor applied to its length.
    #[serde(serialize_with = "serde_rational::vec")]
    pub edge_factors: Vec<Rational>,
    pub directions: Vec<Vec<i64>>,
    /// Ids of edges mapped to zero (contracted under `Merge`, kept flat under `Keep`).
    pub contracted: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Contraction {
    /// Any edge or leg mapped to zero is an error.
    Reject,
    /// Contract such edges, merging endpoints; drop such legs. Fails if the
    /// contracted edges contain a cycle.
    Merge,
    /// Keep the graph: such edges get the zero direction and keep their
    /// length; such legs are dropped.
    Keep,
}

pub fn apply_affine(curve: &TropicalCurve, map: &AffineMap) -> Result<(TropicalCurve, DilationRecord)> {
    apply_affine_with(curve, map, Contraction::Reject)
}

pub fn apply_affine_with(
    curve: &TropicalCurve,
    map: &AffineMap,
    policy: Contraction,
) -> Result<(TropicalCurve, DilationRecord)> {
    curve.check_structure()?;
    let q = &map.matrix;
    let s = q.rows();
    if s == 0 || q.cols() != curve.ambient_dim || map.offset.len() != s {
        return Err(Error::Structural(format!(
            "map of shape {}x{} with offset of length {} does not fit a curve in dimension {}",
            s,
            q.cols(),
            map.offset.len(),
            curve.ambient_dim
        )));
    }
    let image = |w: &[i64]| q.mul_vec(&i64_to_rational_vec(w));
    let edge_images: Vec<Vec<Rational>> = curve.edges.iter().map(|e| image(&e.direction)).collect();
    let leg_images: Vec<Vec<Rational>> = curve.legs.iter().map(|l| image(&l.direction)).collect();
    let is_zero = |v: &Vec<Rational>| v.iter().all(Zero::is_zero);

    if policy == Contraction::Reject {
        if let Some(e) = edge_images.iter().position(is_zero) {
            return Err(Error::EdgeContracted(curve.edges[e].id.clone()));
        }
        if let Some(l) = leg_images.iter().position(is_zero) {
            return Err(Error::LegContracted(curve.vertices[curve.legs[l].vertex].clone()));
        }
    }

    // Merge endpoints of contracted edges.
    let n = curve.vertices.len();
    let mut class: Vec<usize> = (0..n).collect();
    fn root(c: &mut [usize], mut x: usize) -> usize {
        while c[x] != x {
            c[x] = c[c[x]];
            x = c[x];
        }
        x
    }
    let mut contracted = Vec::new();
    for (e, img) in edge_images.iter().enumerate() {
        if !is_zero(img) {
            continue;
        }
        contracted.push(e);
        if policy == Contraction::Keep {
            continue;
        }
        let (a, b) = (root(&mut class, curve.edges[e].tail), root(&mut class, curve.edges[e].head));
        if a == b {
            return Err(Error::ContractedCycle);
        }
        // Keep the smaller index as representative.
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        class[hi] = lo;
    }

    let all: Vec<Rational> = edge_images.iter().chain(&leg_images).filter(|v| !is_zero(v)).flatten().cloned().collect();
    let c = if all.iter().all(Zero::is_zero) { Rational::one() } else { content(&all) };
    // m = 1/c makes every image integral with joint content one.
    let to_int = |v: &[Rational]| -> Result<Vec<i64>> {
        v.iter()
            .map(|x| {
                let y = x / &c;
                debug_assert!(y.is_integer());
                y.to_integer()
                    .to_i64()
                    .ok_or_else(|| Error::Structural("transformed direction exceeds 64-bit range".into()))
            })
            .collect()
    };

    let mut out = TropicalCurve::new(s);
    let mut new_index = vec![usize::MAX; n];
    for v in 0..n {
        if root(&mut class, v) == v {
            new_index[v] = out.add_vertex(curve.vertices[v].clone());
        }
    }
    let mut edge_factors = Vec::new();
    let mut directions = Vec::new();
    for (e, img) in edge_images.iter().enumerate() {
        if is_zero(img) && policy != Contraction::Keep {
            continue;
        }
        let edge = &curve.edges[e];
        let direction = to_int(img)?;
        let tail = new_index[root(&mut class, edge.tail)];
        let head = new_index[root(&mut class, edge.head)];
        out.edges.push(Edge { id: edge.id.clone(), tail, head, direction: direction.clone(), length: &edge.length * &c });
        edge_factors.push(c.clone());
        directions.push(direction);
    }
    for (l, img) in leg_images.iter().enumerate() {
        if is_zero(img) {
            continue;
        }
        let vertex = new_index[root(&mut class, curve.legs[l].vertex)];
        out.legs.push(Leg { vertex, direction: to_int(img)? });
    }
    if let Some(a) = &curve.anchor {
        out.anchor =
            Some(Anchor { vertex: new_index[root(&mut class, a.vertex)], position: map.apply_point(&a.position) });
    }
    out.metadata = curve.metadata.clone();
    out.balancing_waived = curve.balancing_waived;
    let record = DilationRecord {
        factor: c,
        edge_factors,
        directions,
        contracted: contracted.iter().map(|&e| curve.edges[e].id.clone()).collect(),
    };
    Ok((out, record))
}

/// Orthogonal projection onto the span `W` of all obstruction covectors,
/// written in the rational basis of `W` given by the reduced row echelon
/// form of the stacked covectors: `Q = (B Bᵀ)⁻¹ B`. Edges orthogonal to `W`
/// stay in the graph with slope zero.
pub fn project_onto_obstruction(curve: &TropicalCurve) -> Result<(TropicalCurve, AffineMap)> {
    if !analyze(curve).superabundant {
        return Err(Error::NotSuperabundant);
    }
    let r = curve.ambient_dim;
    let rows: Vec<Vec<Rational>> = obstructions(curve)?
        .iter()
        .flat_map(|t| t.lambdas.iter().map(|l| l.iter().map(|x| Rational::from_integer(x.clone())).collect()))
        .collect();
    let (red, pivots) = rref(&RationalMatrix::from_rows(r, &rows));
    let basis: Vec<Vec<Rational>> = (0..pivots.len()).map(|i| red.row(i).to_vec()).collect();
    let b = RationalMatrix::from_rows(r, &basis);
    let gram = b.mul(&b.transpose());
    let gram_inv = gram.inverse().ok_or_else(|| Error::Invariant("Gram matrix of a basis is singular".into()))?;
    let map = AffineMap::linear(gram_inv.mul(&b));
    let (projected, _) = apply_affine_with(curve, &map, Contraction::Keep)?;
    Ok((projected, map))
}

/// For a genus-2 curve with independent obstruction covectors, the map
/// sending the three segments of its core into the lines `x = 0`, `y = 0`
/// and `x + y = 0`, with the transformed core.
pub fn genus2_normal_form(curve: &TropicalCurve) -> Result<(TropicalCurve, AffineMap)> {
    let core = core_neighbourhood(curve);
    if genus(&core.graph()) != 2 {
        return Err(Error::Classification("normal form needs genus 2".into()));
    }
    let tuples = obstructions(&core)?;
    if tuples.is_empty() {
        return Err(Error::Classification("curve is not superabundant; use classify_genus2".into()));
    }
    if tuples.len() != 1 || tuples[0].span_dim < 2 {
        return Err(Error::Classification("planar superabundancy has no normal form; use classify_genus2".into()));
    }
    let (_, _, dec) = core_segments(&core)?;
    if dec.segments.len() != 3 {
        return Err(Error::Classification("core is not a theta graph; use classify_genus2".into()));
    }
    let nu: Vec<Vec<Rational>> = tuples[0]
        .segment_normals
        .iter()
        .map(|v| v.iter().map(|x| Rational::from_integer(x.clone())).collect())
        .collect();
    let (alpha, beta) = combination(&nu[0], &nu[1], &nu[2])
        .ok_or_else(|| Error::Classification("segment normals are not in general position".into()))?;
    let mut rows = vec![scale(&nu[0], &alpha), scale(&nu[1], &beta)];
    if rows[0].iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        rows = rows.iter().map(|r| scale(r, &-Rational::one())).collect();
    }
    let map = AffineMap::linear(RationalMatrix::from_rows(core.ambient_dim, &rows));
    let (normal, _) = apply_affine_with(&core, &map, Contraction::Merge)?;
    Ok((normal, map))
}

fn scale(v: &[Rational], s: &Rational) -> Vec<Rational> {
    v.iter().map(|x| x * s).collect()
}

/// Solve `c = alpha a + beta b` with `a`, `b` independent and both
/// coefficients nonzero.
fn combination(a: &[Rational], b: &[Rational], c: &[Rational]) -> Option<(Rational, Rational)> {
    let r = a.len();
    let mut m = RationalMatrix::zeros(r, 3);
    for i in 0..r {
        m.set(i, 0, a[i].clone());
        m.set(i, 1, b[i].clone());
        m.set(i, 2, c[i].clone());
    }
    let (red, pivots) = rref(&m);
    if pivots != [0, 1] {
        return None;
    }
    let (alpha, beta) = (red.get(0, 2).clone(), red.get(1, 2).clone());
    (!alpha.is_zero() && !beta.is_zero()).then_some((alpha, beta))
}

/// Integer image of an integer vector under the map's linear part, if
/// integral.
pub fn integral_image(map: &AffineMap, w: &[i64]) -> Option<Vec<BigInt>> {
    map.matrix
        .mul_vec(&i64_to_rational_vec(w))
        .into_iter()
        .map(|x| x.is_integer().then(|| x.to_integer()))
        .collect()
}
