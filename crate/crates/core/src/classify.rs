//! Irreducibility, decomposability, the genus-2 classifier and the
//! dimension-comparison verdict.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::abundancy::{analyze, obstructions, ObstructionTuple};
use crate::curve::{core_segments, cycle_basis, degree_profile, genus, TropicalCurve};
use crate::error::{Error, Result};
use crate::examples::builtin;
use crate::linalg::{format_rational, kernel_basis, rank_of_vectors, rref, Rational, RationalMatrix};
use crate::transforms::{apply_affine_with, genus2_normal_form, AffineMap, Contraction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TriState {
    Yes,
    No,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    /// Maximum number of candidates examined by any enumeration.
    pub subset_cap: u64,
    /// Coefficient box for integer combinations.
    pub coeff_bound: i64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { subset_cap: 1 << 20, coeff_bound: 3 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlanarCycle {
    /// Coefficients on the default cycle basis.
    pub coefficients: Vec<i64>,
    /// Edge ids with their multiplicity in the combined cycle.
    pub edges: Vec<(String, i64)>,
    pub normal: Vec<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A superabundant subcurve of lower genus.
    Subcurve { segments: Vec<usize>, edges: Vec<String>, genus: usize },
    /// A linear map to lower dimension whose image stays superabundant.
    Projection { matrix: Vec<Vec<String>>, lambdas: Vec<Vec<BigInt>>, verified: bool },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuperabundanceClass {
    pub superabundant: bool,
    pub planar: bool,
    pub planar_cycle: Option<PlanarCycle>,
    pub irreducible: TriState,
    pub indecomposable: TriState,
    pub witnesses: Vec<Witness>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Genus2Variant {
    NotSuperabundant,
    Planar,
    CanonicalType,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Genus2Classification {
    pub variant: Genus2Variant,
    pub normal_form: Option<(AffineMap, TropicalCurve)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    GenericNonRealizable,
    Inconclusive,
    NotSuperabundant,
    OutOfScope,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RealizabilityVerdict {
    pub verdict: Verdict,
    pub def_dim: i64,
    pub moduli_dim: Option<i64>,
    pub degree: Option<i64>,
    pub genus: usize,
    pub ambient_dim: usize,
    pub reason: String,
    /// Template whose core this curve's core matches, if any.
    pub template_core: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoreIsomorphism {
    pub template: String,
    /// `(curve vertex id, template vertex id)` for branch vertices.
    pub vertex_map: Vec<(String, String)>,
    /// `(curve segment, template segment, orientation)`.
    pub segment_map: Vec<(usize, usize, i8)>,
    /// Segment directions agree verbatim.
    pub exact_directions: bool,
    /// Integral unimodular `A` with `A w = w'` on matched edges, when the
    /// directions only agree up to a change of coordinates.
    pub linear_map: Option<Vec<Vec<i64>>>,
}

pub fn matrix_strings(m: &RationalMatrix) -> Vec<Vec<String>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(format_rational).collect()).collect()
}

fn require_superabundant(curve: &TropicalCurve) -> Result<()> {
    if analyze(curve).superabundant {
        Ok(())
    } else {
        Err(Error::Precondition("curve is not superabundant".into()))
    }
}

/// All nonzero integer vectors in `[-bound, bound]^k` up to sign (first
/// nonzero entry positive), ordered by max-norm, then support size.
fn combinations(k: usize, bound: i64, cap: u64) -> Option<Vec<Vec<i64>>> {
    let side = (2 * bound + 1) as u64;
    let total = side.checked_pow(k as u32)?;
    if total / 2 > cap {
        return None;
    }
    let mut out = Vec::new();
    for code in 0..total {
        let mut c = code;
        let v: Vec<i64> = (0..k)
            .map(|_| {
                let d = (c % side) as i64 - bound;
                c /= side;
                d
            })
            .collect();
        if v.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0) {
            out.push(v);
        }
    }
    out.sort_by_key(|v| (v.iter().map(|x| x.abs()).max(), v.iter().filter(|&&x| x != 0).count(), v.clone()));
    Some(out)
}

/// A cycle (integer combination of basis cycles) whose edge directions lie
/// in a common hyperplane.
pub fn is_planar_superabundant(curve: &TropicalCurve, cfg: &SearchConfig) -> Option<PlanarCycle> {
    let r = curve.ambient_dim;
    let basis = cycle_basis(&curve.graph());
    let inc = basis.incidence(curve.edges.len());
    let g = inc.len();
    if g == 0 {
        return None;
    }
    let combos = combinations(g, cfg.coeff_bound.max(1), cfg.subset_cap).unwrap_or_else(|| {
        // Fall back to the basis cycles alone.
        (0..g)
            .map(|i| {
                let mut v = vec![0; g];
                v[i] = 1;
                v
            })
            .collect()
    });
    for c in combos {
        let mut mult = vec![0i64; curve.edges.len()];
        for (ci, row) in c.iter().zip(&inc) {
            for (m, x) in mult.iter_mut().zip(row) {
                *m += ci * x;
            }
        }
        let support: Vec<usize> = (0..mult.len()).filter(|&e| mult[e] != 0).collect();
        if support.is_empty() {
            continue;
        }
        let dirs: Vec<Vec<i64>> = support.iter().map(|&e| curve.edges[e].direction.clone()).collect();
        let m = RationalMatrix::from_i64_rows(r, &dirs);
        if let Some(normal) = kernel_basis(&m).into_iter().next() {
            return Some(PlanarCycle {
                coefficients: c,
                edges: support.iter().map(|&e| (curve.edges[e].id.clone(), mult[e])).collect(),
                normal,
            });
        }
    }
    None
}

/// Search proper segment subsets of the core for a superabundant subcurve
/// of lower positive genus.
pub fn is_irreducible(curve: &TropicalCurve, cfg: &SearchConfig) -> Result<(TriState, Option<Witness>)> {
    require_superabundant(curve)?;
    let (core, _, dec) = core_segments(curve)?;
    let g = genus(&core.graph());
    let s = dec.segments.len();
    if s >= 64 || (1u64 << s).saturating_sub(2) > cfg.subset_cap {
        return Ok((TriState::Unknown, None));
    }
    let found = (1u64..(1u64 << s) - 1).into_par_iter().find_first(|&mask| {
        let edges: Vec<usize> = (0..s)
            .filter(|j| mask >> j & 1 == 1)
            .flat_map(|j| dec.segments[j].edges.iter().map(|&(e, _)| e))
            .collect();
        let sub = core.restrict_to_edges(&edges);
        let gs = genus(&sub.graph());
        gs >= 1 && gs < g && analyze(&sub).superabundant
    });
    Ok(match found {
        None => (TriState::Yes, None),
        Some(mask) => {
            let segments: Vec<usize> = (0..s).filter(|j| mask >> j & 1 == 1).collect();
            let edge_idx: Vec<usize> =
                segments.iter().flat_map(|&j| dec.segments[j].edges.iter().map(|&(e, _)| e)).collect();
            let sub = core.restrict_to_edges(&edge_idx);
            let witness = Witness::Subcurve {
                segments,
                edges: sub.edges.iter().map(|e| e.id.clone()).collect(),
                genus: genus(&sub.graph()),
            };
            (TriState::No, Some(witness))
        }
    })
}

fn combine(tuples: &[ObstructionTuple], coeffs: &[i64]) -> Vec<Vec<BigInt>> {
    let g = tuples[0].lambdas.len();
    let r = tuples[0].lambdas.first().map_or(0, |l| l.len());
    let mut out = vec![vec![BigInt::zero(); r]; g];
    for (t, &c) in tuples.iter().zip(coeffs) {
        if c == 0 {
            continue;
        }
        for (o, l) in out.iter_mut().zip(&t.lambdas) {
            for (x, y) in o.iter_mut().zip(l) {
                *x += y * BigInt::from(c);
            }
        }
    }
    out
}

/// Projection onto the span of the given covectors, as the rows of their
/// reduced row echelon form.
fn span_projection(lambdas: &[Vec<BigInt>], r: usize) -> RationalMatrix {
    let rows: Vec<Vec<Rational>> =
        lambdas.iter().map(|l| l.iter().map(|x| Rational::from_integer(x.clone())).collect()).collect();
    let (red, pivots) = rref(&RationalMatrix::from_rows(r, &rows));
    let basis: Vec<Vec<Rational>> = (0..pivots.len()).map(|i| red.row(i).to_vec()).collect();
    RationalMatrix::from_rows(r, &basis)
}

fn projection_superabundant(curve: &TropicalCurve, m: &RationalMatrix) -> bool {
    apply_affine_with(curve, &AffineMap::linear(m.clone()), Contraction::Keep)
        .map(|(c, _)| analyze(&c).superabundant)
        .unwrap_or(false)
}

/// Decide decomposability through the left kernel of `K`: the curve is
/// decomposable exactly when some nonzero obstruction tuple spans a proper
/// subspace.
pub fn is_indecomposable(curve: &TropicalCurve, cfg: &SearchConfig) -> Result<(TriState, Option<Witness>)> {
    require_superabundant(curve)?;
    let r = curve.ambient_dim;
    let tuples = obstructions(curve)?;
    let witness = |lambdas: Vec<Vec<BigInt>>| {
        let m = span_projection(&lambdas, r);
        let verified = projection_superabundant(curve, &m);
        Witness::Projection { matrix: matrix_strings(&m), lambdas, verified }
    };
    if tuples.len() == 1 {
        let t = &tuples[0];
        return Ok(if t.span_dim < r {
            (TriState::No, Some(witness(t.lambdas.clone())))
        } else {
            (TriState::Yes, None)
        });
    }
    if let Some(combos) = combinations(tuples.len(), cfg.coeff_bound.max(1), cfg.subset_cap) {
        for c in combos {
            let lambdas = combine(&tuples, &c);
            if rank_of_vectors(&lambdas, r) < r {
                return Ok((TriState::No, Some(witness(lambdas))));
            }
        }
    }
    // Coordinate projections onto every proper nonempty coordinate subset.
    if r < 63 {
        for mask in 1u64..(1u64 << r) - 1 {
            let coords: Vec<usize> = (0..r).filter(|i| mask >> i & 1 == 1).collect();
            let rows: Vec<Vec<i64>> = coords
                .iter()
                .map(|&i| {
                    let mut v = vec![0; r];
                    v[i] = 1;
                    v
                })
                .collect();
            let m = RationalMatrix::from_i64_rows(r, &rows);
            if projection_superabundant(curve, &m) {
                let w = Witness::Projection { matrix: matrix_strings(&m), lambdas: Vec::new(), verified: true };
                return Ok((TriState::No, Some(w)));
            }
        }
    }
    Ok((TriState::Unknown, None))
}

/// Full classification with all witnesses.
pub fn classify(curve: &TropicalCurve, cfg: &SearchConfig) -> Result<SuperabundanceClass> {
    let rep = analyze(curve);
    let planar_cycle = is_planar_superabundant(curve, cfg);
    let mut witnesses = Vec::new();
    let (irreducible, indecomposable) = if rep.superabundant {
        let (irr, w1) = is_irreducible(curve, cfg)?;
        let (ind, w2) = is_indecomposable(curve, cfg)?;
        witnesses.extend(w1);
        witnesses.extend(w2);
        (irr, ind)
    } else {
        (TriState::No, TriState::No)
    };
    Ok(SuperabundanceClass {
        superabundant: rep.superabundant,
        planar: planar_cycle.is_some(),
        planar_cycle,
        irreducible,
        indecomposable,
        witnesses,
    })
}

pub fn classify_genus2(curve: &TropicalCurve, cfg: &SearchConfig) -> Result<Genus2Classification> {
    let g = genus(&curve.graph());
    if g != 2 {
        return Err(Error::Classification(format!("expected genus 2, got {g}")));
    }
    let rep = analyze(curve);
    let none = |variant| Ok(Genus2Classification { variant, normal_form: None });
    if !rep.superabundant {
        return none(Genus2Variant::NotSuperabundant);
    }
    let tuples = obstructions(curve)?;
    if is_planar_superabundant(curve, cfg).is_some() || tuples.iter().any(|t| t.span_dim < 2) {
        return none(Genus2Variant::Planar);
    }
    if tuples.len() == 1 {
        let (normal, map) = genus2_normal_form(curve)?;
        return Ok(Genus2Classification { variant: Genus2Variant::CanonicalType, normal_form: Some((map, normal)) });
    }
    if let Some(combos) = combinations(tuples.len(), cfg.coeff_bound.max(1), cfg.subset_cap) {
        if combos.iter().any(|c| rank_of_vectors(&combine(&tuples, c), curve.ambient_dim) < 2) {
            return none(Genus2Variant::Planar);
        }
    }
    Err(Error::Invariant("genus-2 superabundant curve fits neither branch of the classification".into()))
}

/// `3g - 3 - rg + (r + 1) d`, defined for `d > 2g - 2`.
pub fn moduli_dimension(g: i64, r: i64, d: i64) -> Result<i64> {
    if d <= 2 * g - 2 {
        return Err(Error::DegreeOutOfRange { g, d });
    }
    Ok(3 * g - 3 - r * g + (r + 1) * d)
}

pub fn realizability_verdict(curve: &TropicalCurve) -> Result<RealizabilityVerdict> {
    let report = curve.validate()?;
    if !report.valid {
        return Err(Error::Precondition("curve does not validate".into()));
    }
    let rep = analyze(curve);
    let g = rep.g;
    let r = curve.ambient_dim;
    let degree = degree_profile(curve).standard_degree;
    let template_core = ["phi3", "phi4", "tuning_fork"]
        .iter()
        .find(|t| core_isomorphic(curve, t).ok().flatten().is_some())
        .map(|t| t.to_string());
    let mut v = RealizabilityVerdict {
        verdict: Verdict::OutOfScope,
        def_dim: rep.actual_dim,
        moduli_dim: None,
        degree,
        genus: g,
        ambient_dim: r,
        reason: String::new(),
        template_core,
    };
    let Some(d) = degree else {
        v.reason = "legs do not form a standard degree".into();
        return Ok(v);
    };
    if !rep.superabundant {
        v.verdict = Verdict::NotSuperabundant;
        v.reason = "deformation space has the expected dimension".into();
        return Ok(v);
    }
    let (gi, ri) = (g as i64, r as i64);
    match moduli_dimension(gi, ri, d) {
        Err(_) => {
            v.verdict = Verdict::Inconclusive;
            v.reason = format!("degree {d} does not exceed 2g-2 = {}; the moduli dimension formula does not apply", 2 * gi - 2);
            if v.template_core.as_deref() == Some("tuning_fork") {
                v.reason.push_str(&format!(
                    "; the algebraic locus of this type has dimension {}, matching def_dim {}",
                    TUNING_FORK_LOCUS_DIM, rep.actual_dim
                ));
            }
        }
        Ok(m) => {
            v.moduli_dim = Some(m);
            if m < rep.actual_dim {
                v.verdict = Verdict::GenericNonRealizable;
                v.reason = format!("moduli dimension {m} < deformation dimension {}", rep.actual_dim);
            } else {
                v.verdict = Verdict::Inconclusive;
                v.reason = format!("moduli dimension {m} >= deformation dimension {}", rep.actual_dim);
            }
        }
    }
    Ok(v)
}

/// Dimension of the locus of genus-2 plane curves of degree 2 class realizing
/// the planar tuning fork type.
pub const TUNING_FORK_LOCUS_DIM: i64 = 3;

struct Smoothed {
    vertex_ids: Vec<String>,
    /// `(start, end, merged directions)` with vertices indexed into `vertex_ids`.
    segments: Vec<(usize, usize, Vec<Vec<i64>>)>,
    genus: usize,
}

fn smoothed(curve: &TropicalCurve) -> Result<Smoothed> {
    let (core, _, dec) = core_segments(curve)?;
    let mut vertex_ids: Vec<String> = Vec::new();
    let index = |v: usize, ids: &mut Vec<String>| {
        let id = &core.vertices[v];
        match ids.iter().position(|x| x == id) {
            Some(i) => i,
            None => {
                ids.push(id.clone());
                ids.len() - 1
            }
        }
    };
    let mut segments = Vec::new();
    for (seg, block) in dec.segments.iter().zip(&dec.blocks) {
        let a = index(seg.start, &mut vertex_ids);
        let b = index(seg.end, &mut vertex_ids);
        let mut merged: Vec<Vec<i64>> = Vec::new();
        for w in block {
            if merged.last() != Some(w) {
                merged.push(w.clone());
            }
        }
        segments.push((a, b, merged));
    }
    Ok(Smoothed { vertex_ids, segments, genus: genus(&core.graph()) })
}

fn reversed(block: &[Vec<i64>]) -> Vec<Vec<i64>> {
    block.iter().rev().map(|w| w.iter().map(|x| -x).collect()).collect()
}

/// Match smoothed cores: a bijection of branch vertices and segments
/// respecting incidence, with direction blocks equal (after merging parallel
/// consecutive edges and reversing for flipped segments), or equal after one
/// unimodular change of coordinates.
pub fn core_isomorphic(curve: &TropicalCurve, template: &str) -> Result<Option<CoreIsomorphism>> {
    let name = match template {
        "phi3" => "phi3_sub",
        "phi4" => "phi4_sub",
        "tuning_fork" => "tuning_fork_r2",
        other => return Err(Error::UnknownTemplate(other.to_string())),
    };
    let t = builtin(name)?.curve;
    if t.ambient_dim != curve.ambient_dim {
        return Ok(None);
    }
    let a = smoothed(curve)?;
    let b = smoothed(&t)?;
    if a.genus != b.genus || a.vertex_ids.len() != b.vertex_ids.len() || a.segments.len() != b.segments.len() {
        return Ok(None);
    }
    for exact in [true, false] {
        let mut state = Search {
            a: &a,
            b: &b,
            exact,
            r: curve.ambient_dim,
            vmap: vec![None; a.vertex_ids.len()],
            vused: vec![false; b.vertex_ids.len()],
            smap: Vec::new(),
            sused: vec![false; b.segments.len()],
            found: None,
        };
        if state.extend() {
            let (smap, linear_map) = state.found.unwrap();
            return Ok(Some(CoreIsomorphism {
                template: template.to_string(),
                vertex_map: state
                    .vmap
                    .iter()
                    .enumerate()
                    .map(|(i, m)| (a.vertex_ids[i].clone(), b.vertex_ids[m.unwrap()].clone()))
                    .collect(),
                segment_map: smap,
                exact_directions: exact,
                linear_map,
            }));
        }
    }
    Ok(None)
}

type Found = (Vec<(usize, usize, i8)>, Option<Vec<Vec<i64>>>);

struct Search<'a> {
    a: &'a Smoothed,
    b: &'a Smoothed,
    exact: bool,
    r: usize,
    vmap: Vec<Option<usize>>,
    vused: Vec<bool>,
    smap: Vec<(usize, usize, i8)>,
    sused: Vec<bool>,
    found: Option<Found>,
}

impl Search<'_> {
    fn bind(&mut self, x: usize, y: usize) -> Option<bool> {
        match self.vmap[x] {
            Some(m) => (m == y).then_some(false),
            None if self.vused[y] => None,
            None => {
                self.vmap[x] = Some(y);
                self.vused[y] = true;
                Some(true)
            }
        }
    }

    fn unbind(&mut self, x: usize, fresh: bool) {
        if fresh {
            let y = self.vmap[x].take().unwrap();
            self.vused[y] = false;
        }
    }

    fn extend(&mut self) -> bool {
        let i = self.smap.len();
        if i == self.a.segments.len() {
            if self.exact {
                self.found = Some((self.smap.clone(), None));
                return true;
            }
            if let Some(m) = self.linear_map() {
                self.found = Some((self.smap.clone(), Some(m)));
                return true;
            }
            return false;
        }
        let (sa, ea, ref block) = self.a.segments[i];
        for j in 0..self.b.segments.len() {
            if self.sused[j] {
                continue;
            }
            let (sb, eb, ref other) = self.b.segments[j];
            for orient in [1i8, -1] {
                let candidate = if orient > 0 { block.clone() } else { reversed(block) };
                let ok = if self.exact { &candidate == other } else { candidate.len() == other.len() };
                if !ok {
                    continue;
                }
                let (x0, x1) = if orient > 0 { (sa, ea) } else { (ea, sa) };
                let Some(f0) = self.bind(x0, sb) else { continue };
                let Some(f1) = self.bind(x1, eb) else {
                    self.unbind(x0, f0);
                    continue;
                };
                self.sused[j] = true;
                self.smap.push((i, j, orient));
                if self.extend() {
                    return true;
                }
                self.smap.pop();
                self.sused[j] = false;
                self.unbind(x1, f1);
                self.unbind(x0, f0);
            }
        }
        false
    }

    /// Solve `A w = w'` over all matched edge directions; accept an integral
    /// matrix with determinant +-1.
    fn linear_map(&self) -> Option<Vec<Vec<i64>>> {
        let r = self.r;
        let mut src = Vec::new();
        let mut dst = Vec::new();
        for &(i, j, o) in &self.smap {
            let block = if o > 0 { self.a.segments[i].2.clone() } else { reversed(&self.a.segments[i].2) };
            for (w, w2) in block.iter().zip(&self.b.segments[j].2) {
                src.push(w.clone());
                dst.push(w2.clone());
            }
        }
        // Rows: w^T A^T = w'^T, one augmented system per output coordinate.
        let n = src.len();
        let mut a_rows = vec![vec![0i64; r]; r];
        for c in 0..r {
            let mut m = RationalMatrix::zeros(n, r + 1);
            for k in 0..n {
                for l in 0..r {
                    m.set(k, l, Rational::from_integer(src[k][l].into()));
                }
                m.set(k, r, Rational::from_integer(dst[k][c].into()));
            }
            let (red, pivots) = rref(&m);
            if pivots.len() != r || pivots.contains(&r) {
                return None;
            }
            for (row, &p) in pivots.iter().enumerate() {
                let x = red.get(row, r);
                if !x.is_integer() {
                    return None;
                }
                a_rows[c][p] = x.to_integer().to_i64()?;
            }
        }
        let det = RationalMatrix::from_i64_rows(r, &a_rows);
        let inv = det.inverse()?;
        inv.entries().iter().all(|x| x.is_integer()).then_some(a_rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moduli_examples() {
        assert_eq!(moduli_dimension(3, 3, 5).unwrap(), 17);
        assert_eq!(moduli_dimension(4, 4, 7).unwrap(), 28);
        assert_eq!(moduli_dimension(2, 2, 2), Err(Error::DegreeOutOfRange { g: 2, d: 2 }));
    }

    #[test]
    fn trivalent_identity_grid() {
        for g in 0..6i64 {
            for r in 1..6i64 {
                for d in (2 * g - 1).max(1)..12 {
                    let expected = (r + 1) * d + 3 * g - 3 - r * g;
                    assert_eq!(moduli_dimension(g, r, d).unwrap(), expected);
                }
            }
        }
    }

    #[test]
    fn combinations_are_canonical() {
        let c = combinations(2, 1, 100).unwrap();
        assert_eq!(c.len(), 4);
        assert_eq!(c[0], vec![0, 1]);
        assert!(c.iter().all(|v| v.iter().find(|&&x| x != 0).unwrap() > &0));
    }
}
