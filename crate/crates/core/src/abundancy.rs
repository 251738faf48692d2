//! The abundancy matrix, deformation dimensions and obstruction tuples.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::curve::{core_edges, cycle_basis, genus, smoothing, valences, CycleBasis, TropicalCurve};
use crate::error::Result;
use crate::linalg::{
    dot_int, left_kernel_basis, rank, rank_of_vectors, serde_rational, strictly_positive_kernel_point, Rational,
    RationalMatrix,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbundancyReport {
    pub b: usize,
    pub n: usize,
    pub g: usize,
    pub r: usize,
    pub rank_k: usize,
    pub actual_dim: i64,
    pub expected_dim: i64,
    pub excess: i64,
    pub superabundant: bool,
    #[serde(serialize_with = "serde_rational::opt_vec")]
    pub positive_witness: Option<Vec<Rational>>,
    pub cone_degenerate: bool,
    /// `n + 3g - 3 - rg`, reported for connected trivalent curves only.
    pub trivalent_expected_dim: Option<i64>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ObstructionTuple {
    pub lambdas: Vec<Vec<BigInt>>,
    pub segment_normals: Vec<Vec<BigInt>>,
    pub span_dim: usize,
}

/// The `(g r) x b` matrix with entry `eta[i][e] * w_e[c]` in row `i r + c`.
pub fn abundancy_matrix(curve: &TropicalCurve, basis: &CycleBasis) -> RationalMatrix {
    let r = curve.ambient_dim;
    let b = curve.edges.len();
    let inc = basis.incidence(b);
    let mut k = RationalMatrix::zeros(inc.len() * r, b);
    for (i, row) in inc.iter().enumerate() {
        for (e, &eta) in row.iter().enumerate() {
            if eta == 0 {
                continue;
            }
            for (c, &w) in curve.edges[e].direction.iter().enumerate() {
                k.set(i * r + c, e, Rational::from_integer(BigInt::from(eta * w)));
            }
        }
    }
    k
}

pub fn analyze(curve: &TropicalCurve) -> AbundancyReport {
    analyze_with_basis(curve, &cycle_basis(&curve.graph()))
}

pub fn analyze_with_basis(curve: &TropicalCurve, basis: &CycleBasis) -> AbundancyReport {
    let graph = curve.graph();
    let k = abundancy_matrix(curve, basis);
    let rank_k = rank(&k);
    let (b, n, g, r) = (curve.edges.len(), curve.legs.len(), basis.genus(), curve.ambient_dim);
    let rg = (r * g) as i64;
    let mut warnings = Vec::new();

    let lengths = curve.lengths();
    let own_ok = lengths.iter().all(|l| l > &Rational::zero()) && k.mul_vec(&lengths).iter().all(Zero::is_zero);
    let positive_witness = if own_ok { Some(lengths) } else { strictly_positive_kernel_point(&k) };
    let cone_degenerate = positive_witness.is_none();
    if cone_degenerate {
        warnings.push("no strictly positive length vector in ker K; actual_dim is the kernel dimension".into());
    }

    let val = valences(&graph);
    let mut full_val = val.clone();
    for &v in &graph.legs {
        full_val[v] += 1;
    }
    let connected = genus(&graph) + graph.vertex_count == b + 1;
    let trivalent_expected_dim =
        (connected && full_val.iter().all(|&x| x == 3)).then(|| n as i64 + 3 * g as i64 - 3 - rg);

    AbundancyReport {
        b,
        n,
        g,
        r,
        rank_k,
        actual_dim: b as i64 - rank_k as i64,
        expected_dim: b as i64 - rg,
        excess: rg - rank_k as i64,
        superabundant: rg > rank_k as i64,
        positive_witness,
        cone_degenerate,
        trivalent_expected_dim,
        warnings,
    }
}

/// One tuple per left-kernel basis vector of `K` (default cycle basis).
pub fn obstructions(curve: &TropicalCurve) -> Result<Vec<ObstructionTuple>> {
    let basis = cycle_basis(&curve.graph());
    obstructions_with_basis(curve, &basis)
}

pub fn obstructions_with_basis(curve: &TropicalCurve, basis: &CycleBasis) -> Result<Vec<ObstructionTuple>> {
    let r = curve.ambient_dim;
    let g = basis.genus();
    let k = abundancy_matrix(curve, basis);
    let eta = segment_eta(curve, basis)?;
    let mut out = Vec::new();
    for y in left_kernel_basis(&k) {
        let lambdas: Vec<Vec<BigInt>> = (0..g).map(|i| y[i * r..(i + 1) * r].to_vec()).collect();
        let segment_normals = normals(&lambdas, &eta, r);
        let span_dim = rank_of_vectors(&lambdas, r);
        out.push(ObstructionTuple { lambdas, segment_normals, span_dim });
    }
    Ok(out)
}

/// Segment incidence of the core, in the given basis of the whole curve,
/// together with each segment's edge indices in the whole curve.
fn segment_eta(curve: &TropicalCurve, basis: &CycleBasis) -> Result<(Vec<Vec<i8>>, Vec<Vec<usize>>)> {
    let keep = core_edges(curve);
    let mut map = vec![None; curve.edges.len()];
    for (new, &old) in keep.iter().enumerate() {
        map[old] = Some(new);
    }
    let core = curve.restrict_to_edges(&keep);
    let dec = smoothing(&core, &basis.reindex(&map))?;
    let seg_edges = dec.segments.iter().map(|s| s.edges.iter().map(|&(e, _)| keep[e]).collect()).collect();
    Ok((dec.eta, seg_edges))
}

fn normals(lambdas: &[Vec<BigInt>], eta: &(Vec<Vec<i8>>, Vec<Vec<usize>>), r: usize) -> Vec<Vec<BigInt>> {
    let nseg = eta.1.len();
    (0..nseg)
        .map(|j| {
            let mut nu = vec![BigInt::zero(); r];
            for (i, lam) in lambdas.iter().enumerate() {
                let s = eta.0[i][j];
                if s != 0 {
                    for (x, l) in nu.iter_mut().zip(lam) {
                        *x += l * BigInt::from(s);
                    }
                }
            }
            nu
        })
        .collect()
}

/// Exact check that `t` is a nonzero left-kernel tuple whose segment normals
/// annihilate every edge of their segment.
pub fn verify_obstruction(curve: &TropicalCurve, t: &ObstructionTuple) -> bool {
    let r = curve.ambient_dim;
    let basis = cycle_basis(&curve.graph());
    let g = basis.genus();
    if t.lambdas.len() != g || t.lambdas.iter().any(|l| l.len() != r) {
        return false;
    }
    if t.lambdas.iter().flatten().all(Zero::is_zero) {
        return false;
    }
    let y: Vec<Rational> = t.lambdas.iter().flatten().map(|x| Rational::from_integer(x.clone())).collect();
    let k = abundancy_matrix(curve, &basis);
    if !k.left_mul_vec(&y).iter().all(Zero::is_zero) {
        return false;
    }
    let Ok(eta) = segment_eta(curve, &basis) else {
        return false;
    };
    let nus = normals(&t.lambdas, &eta, r);
    eta.1.iter().zip(&nus).all(|(edges, nu)| {
        edges.iter().all(|&e| dot_int(nu, &curve.edges[e].direction).is_zero())
    })
}
