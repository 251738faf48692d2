//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::Rng;
use tropsa::abundancy::analyze_with_basis;
use tropsa::classify::{classify_genus2, core_isomorphic, is_indecomposable, is_irreducible, Genus2Variant};
use tropsa::curve::{cycle_basis_with_order, valences};
use tropsa::examples::all_builtins;
use tropsa::linalg::rat;
use tropsa::random::{random_affine, random_genus2, random_mixed, random_orders, random_subdivision, rng, Genus2Kind};
use tropsa::transforms::apply_affine;
use tropsa::{
    analyze, builtin, core_neighbourhood, genus, project_onto_obstruction, realizability_verdict, SearchConfig,
    TriState, TropicalCurve, Verdict, Witness,
};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let out = f()?;
    let took = start.elapsed();
    check(took <= limit, format!("took {took:?}, limit {limit:?}"))?;
    Ok(format!("{out} in {:.3}s", took.as_secs_f64()))
}

fn dims(c: &TropicalCurve) -> (i64, i64, i64, bool) {
    let r = analyze(c);
    (r.actual_dim, r.expected_dim, r.excess, r.superabundant)
}

fn criterion_1() -> Outcome {
    timed(Duration::from_secs(1), || {
        let c = builtin("tuning_fork_r2").map_err(|e| e.to_string())?.curve;
        let d = dims(&c);
        check(d == (3, 2, 1, true), format!("got {d:?}"))?;
        Ok("actual 3, expected 2, excess 1".into())
    })
}

fn criterion_2() -> Outcome {
    timed(Duration::from_secs(5), || {
        let c = builtin("phi3_sub").map_err(|e| e.to_string())?.curve;
        let d = dims(&c);
        check(d == (4, 3, 1, true), format!("got {d:?}"))?;
        let cfg = SearchConfig::default();
        let irr = is_irreducible(&c, &cfg).map_err(|e| e.to_string())?.0;
        let ind = is_indecomposable(&c, &cfg).map_err(|e| e.to_string())?.0;
        check(irr == TriState::Yes && ind == TriState::Yes, format!("irreducible {irr:?}, indecomposable {ind:?}"))?;
        Ok("actual 4, expected 3, irreducible and indecomposable".into())
    })
}

fn criterion_3() -> Outcome {
    timed(Duration::from_secs(30), || {
        let c = builtin("phi4").map_err(|e| e.to_string())?.curve;
        let d = dims(&c);
        check(d == (21, 20, 1, true), format!("got {d:?}"))?;
        let cfg = SearchConfig::default();
        let irr = is_irreducible(&c, &cfg).map_err(|e| e.to_string())?.0;
        check(irr == TriState::Yes, format!("irreducible {irr:?}"))?;
        let (ind, witness) = is_indecomposable(&c, &cfg).map_err(|e| e.to_string())?;
        check(ind == TriState::No, format!("indecomposable {ind:?}"))?;
        let l_coords = vec![vec!["1", "0", "0", "0"], vec!["0", "1", "0", "0"]];
        match witness {
            Some(Witness::Projection { matrix, verified: true, .. }) if matrix == l_coords => {}
            other => return Err(format!("unexpected witness {other:?}")),
        }
        Ok("actual 21, expected 20, irreducible, decomposable via the first two coordinates".into())
    })
}

fn fixture(name: &str) -> Result<TropicalCurve, String> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    tropsa::io::parse_strict(&text).map_err(|e| format!("{name}: {e}"))
}

fn trivalent(c: &TropicalCurve) -> bool {
    let g = c.graph();
    let mut val = valences(&g);
    for &v in &g.legs {
        val[v] += 1;
    }
    val.iter().all(|&x| x == 3)
}

fn verdict_fixture(file: &str, template: &str, g: usize, d: i64, moduli: i64, def: i64) -> Result<String, String> {
    let c = fixture(file)?;
    check(genus(&c.graph()) == g, format!("{file}: genus {}", genus(&c.graph())))?;
    check(trivalent(&c), format!("{file}: not trivalent"))?;
    let iso = core_isomorphic(&c, template).map_err(|e| e.to_string())?;
    check(iso.is_some(), format!("{file}: core does not match {template}"))?;
    let v = realizability_verdict(&c).map_err(|e| e.to_string())?;
    check(v.verdict == Verdict::GenericNonRealizable, format!("{file}: verdict {:?}", v.verdict))?;
    check(
        v.degree == Some(d) && v.moduli_dim == Some(moduli) && v.def_dim == def,
        format!(
            "{file}: degree {:?}, moduli_dim {:?}, def_dim {} (wanted degree {d}, {moduli} < {def})",
            v.degree, v.moduli_dim, v.def_dim
        ),
    )?;
    Ok(format!("{file}: {moduli} < {def}"))
}

fn criterion_4() -> Outcome {
    let a = verdict_fixture("phi3_degree5.json", "phi3", 3, 5, 17, 18);
    let b = verdict_fixture("phi4_standard.json", "phi4", 4, 7, 28, 29);
    match (a, b) {
        (Ok(x), Ok(y)) => Ok(format!("{x}; {y}")),
        (x, y) => Err([x, y].into_iter().map(|r| r.unwrap_or_else(|e| e)).collect::<Vec<_>>().join("; ")),
    }
}

fn criterion_5() -> Outcome {
    let c = builtin("tuning_fork_r2").map_err(|e| e.to_string())?.curve;
    let v = realizability_verdict(&c).map_err(|e| e.to_string())?;
    check(v.verdict == Verdict::Inconclusive, format!("verdict {:?}", v.verdict))?;
    check(v.moduli_dim.is_none() && v.degree == Some(2), format!("{v:?}"))?;
    check(v.reason.contains("dimension 3"), format!("reason {:?}", v.reason))?;
    Ok(format!("Inconclusive: {}", v.reason))
}

fn annihilated(normal: &TropicalCurve) -> Result<(), String> {
    let cov: [[i64; 2]; 3] = [[1, 0], [0, 1], [1, 1]];
    let dec = tropsa::curve::core_segments(normal).map_err(|e| e.to_string())?.2;
    let mut hit = BTreeSet::new();
    for block in &dec.blocks {
        let k = cov
            .iter()
            .position(|n| block.iter().all(|w| n[0] * w[0] + n[1] * w[1] == 0))
            .ok_or_else(|| format!("segment {block:?} lies on none of the three lines"))?;
        hit.insert(k);
    }
    check(hit.len() == 3, "two segments share a line")
}

fn criterion_6() -> Outcome {
    let mut g = rng(20240601);
    let cfg = SearchConfig::default();
    let per_branch = 500;
    let mut counts = [0usize; 3];
    for (b, kind) in [Genus2Kind::Planar, Genus2Kind::Canonical, Genus2Kind::Generic].into_iter().enumerate() {
        for i in 0..per_branch {
            let c = random_genus2(&mut g, kind);
            let sa = analyze(&c).superabundant;
            let cls = classify_genus2(&c, &cfg).map_err(|e| format!("{kind:?} #{i}: {e}"))?;
            check(
                (cls.variant != Genus2Variant::NotSuperabundant) == sa,
                format!("{kind:?} #{i}: {:?} but superabundant={sa}", cls.variant),
            )?;
            match kind {
                Genus2Kind::Planar => check(cls.variant == Genus2Variant::Planar, format!("planar #{i}: {:?}", cls.variant))?,
                Genus2Kind::Canonical => {
                    check(cls.variant == Genus2Variant::CanonicalType, format!("canonical #{i}: {:?}", cls.variant))?
                }
                Genus2Kind::Generic => {}
            }
            if cls.variant == Genus2Variant::CanonicalType {
                let (_, normal) = cls.normal_form.as_ref().ok_or("canonical type without normal form")?;
                annihilated(normal).map_err(|e| format!("{kind:?} #{i}: {e}"))?;
            }
            counts[b] += 1;
        }
    }
    Ok(format!("{} planar, {} canonical, {} generic curves agree", counts[0], counts[1], counts[2]))
}

fn kernel_dim(c: &TropicalCurve) -> i64 {
    analyze(c).actual_dim
}

fn criterion_7() -> Outcome {
    let mut g = rng(7);
    let pairs = 200;
    for i in 0..pairs {
        let c = random_mixed(&mut g);
        let map = random_affine(&mut g, c.ambient_dim);
        let (t, _) = apply_affine(&c, &map).map_err(|e| format!("pair {i}: {e}"))?;
        check(kernel_dim(&t) == kernel_dim(&c), format!("pair {i}: kernel dimension changed"))?;
        let v = t.validate().map_err(|e| e.to_string())?;
        check(v.unbalanced.is_empty() && v.cycle_closure, format!("pair {i}: balancing or closure lost"))?;
        let before = c.positions();
        let after = t.positions();
        for (p, q) in before.iter().zip(&after) {
            let (Some(p), Some(q)) = (p, q) else { return Err(format!("pair {i}: missing position")) };
            check(&map.apply_point(p) == q, format!("pair {i}: position image differs"))?;
        }
        for e in 0..c.edges.len() {
            let image = map.matrix.mul_vec(&c.displacement(e));
            check(image == t.displacement(e), format!("pair {i}: displacement of edge {e} differs"))?;
        }
    }
    let mut projected = Vec::new();
    for tpl in all_builtins() {
        if !analyze(&tpl.curve).superabundant {
            continue;
        }
        let (p, _) = project_onto_obstruction(&tpl.curve).map_err(|e| format!("{}: {e}", tpl.name))?;
        check(analyze(&p).superabundant, format!("{}: projection not superabundant", tpl.name))?;
        projected.push(format!("{}->R^{}", tpl.name, p.ambient_dim));
    }
    Ok(format!("{pairs} affine pairs exact; projections superabundant: {}", projected.join(", ")))
}

/// Exact rank of a small integer matrix by fraction-free elimination in
/// `i128`, independent of the library's linear algebra.
fn int_rank(mut rows: Vec<Vec<i128>>) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&i| rows[i][c] != 0) else { continue };
        rows.swap(rank, p);
        for i in 0..rows.len() {
            if i != rank && rows[i][c] != 0 {
                let (a, b) = (rows[rank][c], rows[i][c]);
                for k in 0..cols {
                    rows[i][k] = rows[i][k] * a - rows[rank][k] * b;
                }
                let g = rows[i].iter().fold(0i128, |g, &x| gcd(g, x.abs()));
                if g > 1 {
                    rows[i].iter_mut().for_each(|x| *x /= g);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Every simple cycle of a small multigraph as signed edge incidences,
/// found by testing each edge subset for being connected and 2-regular.
fn simple_cycles(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<i128>> {
    let m = edges.len();
    let mut out = Vec::new();
    for mask in 1u32..(1 << m) {
        let sel: Vec<usize> = (0..m).filter(|e| mask >> e & 1 == 1).collect();
        let mut deg = vec![0; n];
        for &e in &sel {
            deg[edges[e].0] += 1;
            deg[edges[e].1] += 1;
        }
        if deg.iter().any(|&d| d != 0 && d != 2) {
            continue;
        }
        // walk the cycle from the first selected edge
        let mut sign = vec![0i128; m];
        let (first, mut at) = (sel[0], edges[sel[0]].1);
        sign[first] = 1;
        let start = edges[first].0;
        let mut used = 1;
        while at != start || used < sel.len() {
            let Some(&e) = sel.iter().find(|&&e| sign[e] == 0 && (edges[e].0 == at || edges[e].1 == at)) else {
                break;
            };
            if edges[e].0 == at {
                sign[e] = 1;
                at = edges[e].1;
            } else {
                sign[e] = -1;
                at = edges[e].0;
            }
            used += 1;
        }
        if used == sel.len() && at == start {
            out.push(sign);
        }
    }
    out
}

fn oracle_dim(n: usize, edges: &[(usize, usize)], dirs: &[Vec<i64>]) -> i64 {
    let r = dirs[0].len();
    let mut rows = Vec::new();
    for cyc in simple_cycles(n, edges) {
        for c in 0..r {
            rows.push(cyc.iter().zip(dirs).map(|(&s, w)| s * w[c] as i128).collect());
        }
    }
    edges.len() as i64 - int_rank(rows) as i64
}

fn connected_multigraphs(max_vertices: usize, max_edges: usize) -> Vec<(usize, Vec<(usize, usize)>)> {
    let mut out = Vec::new();
    for n in 1..=max_vertices {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
        for m in 1..=max_edges {
            let mut idx = vec![0usize; m];
            loop {
                let edges: Vec<(usize, usize)> = idx.iter().map(|&k| pairs[k]).collect();
                let mut comp: Vec<usize> = (0..n).collect();
                fn find(c: &mut Vec<usize>, x: usize) -> usize {
                    if c[x] != x {
                        let r = find(c, c[x]);
                        c[x] = r;
                    }
                    c[x]
                }
                for &(a, b) in &edges {
                    let (ra, rb) = (find(&mut comp, a), find(&mut comp, b));
                    comp[ra] = rb;
                }
                let root = find(&mut comp, 0);
                if (0..n).all(|v| find(&mut comp, v) == root) && m + 1 > n {
                    out.push((n, edges));
                }
                // next non-decreasing index sequence
                let mut k = m;
                while k > 0 && idx[k - 1] == pairs.len() - 1 {
                    k -= 1;
                }
                if k == 0 {
                    break;
                }
                idx[k - 1] += 1;
                for j in k..m {
                    idx[j] = idx[k - 1];
                }
            }
        }
    }
    out
}

fn library_dim(n: usize, edges: &[(usize, usize)], dirs: &[Vec<i64>]) -> i64 {
    let mut c = TropicalCurve::new(dirs[0].len());
    for v in 0..n {
        c.add_vertex(format!("v{v}"));
    }
    for (&(a, b), w) in edges.iter().zip(dirs) {
        c.add_edge(a, b, w.clone(), rat(1));
    }
    c.balancing_waived = true;
    analyze(&c).actual_dim
}

fn criterion_8() -> Outcome {
    let graphs = connected_multigraphs(4, 6);
    let all: Vec<Vec<i64>> = (-2..=2i64)
        .flat_map(|x| (-2..=2i64).map(move |y| vec![x, y]))
        .filter(|v| v.iter().any(|&x| x != 0))
        .collect();
    // Rank is invariant under rescaling a column, so for exhaustive runs one
    // representative per line through the origin suffices.
    let lines: Vec<Vec<i64>> = all
        .iter()
        .filter(|v| {
            let g = gcd(v[0].abs() as i128, v[1].abs() as i128);
            g == 1 && (v[0] > 0 || (v[0] == 0 && v[1] > 0))
        })
        .cloned()
        .collect();
    let mut g = rng(8);
    let (mut exhaustive, mut sampled) = (0usize, 0usize);
    for (n, edges) in &graphs {
        let m = edges.len();
        let mut cases: Vec<Vec<Vec<i64>>> = Vec::new();
        if m <= 4 {
            let total = lines.len().pow(m as u32);
            for mut code in 0..total {
                cases.push(
                    (0..m)
                        .map(|_| {
                            let w = lines[code % lines.len()].clone();
                            code /= lines.len();
                            w
                        })
                        .collect(),
                );
            }
            exhaustive += total;
        } else {
            for _ in 0..40 {
                cases.push((0..m).map(|_| all[g.gen_range(0..all.len())].clone()).collect());
            }
            for _ in 0..10 {
                let r3: Vec<Vec<i64>> = (0..m)
                    .map(|_| loop {
                        let v: Vec<i64> = (0..3).map(|_| g.gen_range(-2..=2)).collect();
                        if v.iter().any(|&x| x != 0) {
                            break v;
                        }
                    })
                    .collect();
                cases.push(r3);
            }
            sampled += 50;
        }
        for dirs in cases {
            let (lib, ora) = (library_dim(*n, edges, &dirs), oracle_dim(*n, edges, &dirs));
            check(lib == ora, format!("graph {edges:?} directions {dirs:?}: matrix {lib}, oracle {ora}"))?;
        }
    }
    Ok(format!(
        "{} multigraphs, {exhaustive} exhaustive direction classes (<= 4 edges), {sampled} sampled (5-6 edges)",
        graphs.len()
    ))
}

fn flags_agree(c: &TropicalCurve, g: &mut impl Rng) -> Result<(), String> {
    let base = analyze(c);
    check(analyze(&core_neighbourhood(c)).superabundant == base.superabundant, "core changes the flag")?;
    let mut s = c.clone();
    for _ in 0..3 {
        s = random_subdivision(g, &s);
    }
    let sub = analyze(&s);
    check(sub.superabundant == base.superabundant && sub.excess == base.excess, "subdivision changes the flag")?;
    for _ in 0..3 {
        let (vs, es) = random_orders(g, c);
        let other = analyze_with_basis(c, &cycle_basis_with_order(&c.graph(), &vs, &es));
        check(
            other.superabundant == base.superabundant && other.rank_k == base.rank_k,
            "cycle basis re-choice changes the flag",
        )?;
    }
    Ok(())
}

fn criterion_9() -> Outcome {
    let mut g = rng(9);
    let mut n = 0;
    for t in all_builtins() {
        flags_agree(&t.curve, &mut g).map_err(|e| format!("{}: {e}", t.name))?;
        n += 1;
    }
    let mut superabundant = 0;
    for i in 0..200 {
        let c = random_mixed(&mut g);
        superabundant += analyze(&c).superabundant as usize;
        flags_agree(&c, &mut g).map_err(|e| format!("random #{i}: {e}"))?;
    }
    Ok(format!("{n} templates and 200 random curves ({superabundant} superabundant)"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("tuning fork dimensions", criterion_1),
        ("phi3' dimensions and class", criterion_2),
        ("phi4 dimensions and class", criterion_3),
        ("dimension-comparison verdict fixtures", criterion_4),
        ("tuning fork verdict", criterion_5),
        ("genus-2 classification suite", criterion_6),
        ("transform invariance and projection", criterion_7),
        ("oracle equivalence on small graphs", criterion_8),
        ("core, subdivision and basis invariance", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match std::panic::catch_unwind(f) {
            Ok(Ok(detail)) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Ok(Err(why)) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why}", i + 1);
            }
            Err(_) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: panicked", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
