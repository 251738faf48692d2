use tropsa::classify::{is_indecomposable, is_irreducible, is_planar_superabundant, SearchConfig};
use tropsa::curve::degree_profile;
use tropsa::examples::all_builtins;
use tropsa::{analyze, genus};

#[test]
fn templates_match_expected_reports() {
    let cfg = SearchConfig::default();
    for t in all_builtins() {
        let e = &t.expected_report;
        let c = &t.curve;
        let rep = analyze(c);
        let name = &t.name;
        assert_eq!(genus(&c.graph()), e.genus, "{name} genus");
        assert_eq!(c.edges.len(), e.bounded_edges, "{name} edges");
        assert_eq!(c.legs.len(), e.legs, "{name} legs");
        assert_eq!((rep.actual_dim, rep.expected_dim, rep.excess), (e.actual_dim, e.expected_dim, e.excess), "{name}");
        let v = c.validate().unwrap();
        assert!(v.cycle_closure, "{name} closure");
        assert!(v.nonpositive_lengths.is_empty() && v.zero_directions.is_empty(), "{name}");
        assert_eq!(v.unbalanced, e.unbalanced, "{name} unbalanced");
        if let Some(p) = e.planar {
            assert_eq!(is_planar_superabundant(c, &cfg).is_some(), p, "{name} planar");
        }
        if let Some(x) = e.irreducible {
            assert_eq!(is_irreducible(c, &cfg).unwrap().0, x, "{name} irreducible");
        }
        if let Some(x) = e.indecomposable {
            assert_eq!(is_indecomposable(c, &cfg).unwrap().0, x, "{name} indecomposable");
        }
        if e.standard_degree.is_some() {
            assert_eq!(degree_profile(c).standard_degree, e.standard_degree, "{name} degree");
        }
    }
}
