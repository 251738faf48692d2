//! JSON documents for curves and affine maps.
//!
//! Rationals are written as strings (`"3"`, `"-1/2"`); bare JSON integers are
//! accepted on input, floats never are.

use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize};

use crate::curve::{Anchor, Edge, Leg, TropicalCurve};
use crate::error::{Error, Result};
use crate::linalg::{format_rational, parse_rational, Rational, RationalMatrix};
use crate::transforms::AffineMap;

pub const SCHEMA_VERSION: u32 = 1;

/// A rational read from a string or an integer literal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalText(pub Rational);

impl Serialize for RationalText {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

struct RationalVisitor;

impl Visitor<'_> for RationalVisitor {
    type Value = RationalText;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a rational as a string \"p/q\" or an integer")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<RationalText, E> {
        parse_rational(v).map(RationalText).map_err(E::custom)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<RationalText, E> {
        Ok(RationalText(Rational::from_integer(v.into())))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<RationalText, E> {
        Ok(RationalText(Rational::from_integer(v.into())))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<RationalText, E> {
        Err(E::custom(format!("float literal {v} is not allowed; write rationals as \"p/q\" strings")))
    }
}

impl<'de> Deserialize<'de> for RationalText {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        d.deserialize_any(RationalVisitor)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexDoc {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position: Option<Vec<RationalText>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub tail: String,
    pub head: String,
    pub direction: Vec<i64>,
    pub length: RationalText,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LegDoc {
    pub vertex: String,
    pub direction: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveDocument {
    pub schema_version: u32,
    pub ambient_dim: usize,
    pub vertices: Vec<VertexDoc>,
    pub edges: Vec<EdgeDoc>,
    #[serde(default)]
    pub legs: Vec<LegDoc>,
    /// Marks a subcurve; balancing is not checked.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub subcurve: bool,
    #[serde(default)]
    pub metadata: serde_json::Map<String, serde_json::Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineMapDocument {
    pub matrix: Vec<Vec<RationalText>>,
    #[serde(default)]
    pub offset: Option<Vec<RationalText>>,
}

fn parse_error(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse { path: path.into(), message: message.into() }
}

fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        parse_error(if path == "." { "$".to_string() } else { format!("$.{path}") }, e.into_inner().to_string())
    })?;
    de.end().map_err(|e| parse_error("$", e.to_string()))?;
    Ok(value)
}

pub fn parse_document(text: &str) -> Result<CurveDocument> {
    from_json(text)
}

/// Parse and structurally validate a curve. Balancing and cycle closure are
/// left to [`TropicalCurve::validate`].
pub fn parse(text: &str) -> Result<TropicalCurve> {
    document_to_curve(&parse_document(text)?)
}

/// Parse and additionally require the curve to validate.
pub fn parse_strict(text: &str) -> Result<TropicalCurve> {
    let c = parse(text)?;
    let report = c.validate()?;
    if !report.valid {
        let mut problems = Vec::new();
        if !report.unbalanced.is_empty() {
            problems.push(format!("unbalanced at {}", report.unbalanced.join(", ")));
        }
        if !report.nonpositive_lengths.is_empty() {
            problems.push(format!("non-positive length on {}", report.nonpositive_lengths.join(", ")));
        }
        if !report.zero_directions.is_empty() {
            problems.push(format!("zero direction on {}", report.zero_directions.join(", ")));
        }
        if !report.cycle_closure {
            problems.push("cycles do not close".into());
        }
        return Err(parse_error("$", format!("semantic validation failed: {}", problems.join("; "))));
    }
    Ok(c)
}

pub fn document_to_curve(doc: &CurveDocument) -> Result<TropicalCurve> {
    if doc.schema_version != SCHEMA_VERSION {
        return Err(parse_error(
            "$.schema_version",
            format!("unknown schema version {} (supported: {SCHEMA_VERSION})", doc.schema_version),
        ));
    }
    let r = doc.ambient_dim;
    if r == 0 {
        return Err(parse_error("$.ambient_dim", "ambient dimension must be positive"));
    }
    let mut c = TropicalCurve::new(r);
    c.metadata = doc.metadata.clone();
    c.balancing_waived = doc.subcurve;
    let mut positions = Vec::new();
    for (i, v) in doc.vertices.iter().enumerate() {
        if c.vertex_index(&v.id).is_some() {
            return Err(parse_error(format!("$.vertices[{i}].id"), format!("duplicate vertex id {:?}", v.id)));
        }
        let idx = c.add_vertex(v.id.clone());
        if let Some(p) = &v.position {
            if p.len() != r {
                return Err(parse_error(
                    format!("$.vertices[{i}].position"),
                    format!("expected {r} coordinates, got {}", p.len()),
                ));
            }
            positions.push((i, idx, p.iter().map(|x| x.0.clone()).collect::<Vec<_>>()));
        }
    }
    let lookup = |c: &TropicalCurve, id: &str, path: String| {
        c.vertex_index(id).ok_or_else(|| parse_error(path, format!("unknown vertex {id:?}")))
    };
    for (i, e) in doc.edges.iter().enumerate() {
        let tail = lookup(&c, &e.tail, format!("$.edges[{i}].tail"))?;
        let head = lookup(&c, &e.head, format!("$.edges[{i}].head"))?;
        if e.direction.len() != r {
            return Err(parse_error(
                format!("$.edges[{i}].direction"),
                format!("expected {r} coordinates, got {}", e.direction.len()),
            ));
        }
        let id = e.id.clone().unwrap_or_else(|| format!("e{i}"));
        if c.edges.iter().any(|x| x.id == id) {
            return Err(parse_error(format!("$.edges[{i}].id"), format!("duplicate edge id {id:?}")));
        }
        c.edges.push(Edge { id, tail, head, direction: e.direction.clone(), length: e.length.0.clone() });
    }
    for (i, l) in doc.legs.iter().enumerate() {
        let vertex = lookup(&c, &l.vertex, format!("$.legs[{i}].vertex"))?;
        if l.direction.len() != r {
            return Err(parse_error(
                format!("$.legs[{i}].direction"),
                format!("expected {r} coordinates, got {}", l.direction.len()),
            ));
        }
        c.legs.push(Leg { vertex, direction: l.direction.clone() });
    }
    if let Some((_, idx, p)) = positions.first() {
        c.anchor = Some(Anchor { vertex: *idx, position: p.clone() });
        let derived = c.positions();
        for (i, idx, p) in &positions[1..] {
            if let Some(d) = &derived[*idx] {
                if d != p {
                    return Err(parse_error(
                        format!("$.vertices[{i}].position"),
                        "position disagrees with the one reached along edges from the base vertex",
                    ));
                }
            }
        }
    }
    Ok(c)
}

/// Document for a curve; only the base vertex carries a position.
pub fn curve_to_document(c: &TropicalCurve) -> CurveDocument {
    let vertices = c
        .vertices
        .iter()
        .enumerate()
        .map(|(i, id)| VertexDoc {
            id: id.clone(),
            position: c
                .anchor
                .as_ref()
                .filter(|a| a.vertex == i)
                .map(|a| a.position.iter().cloned().map(RationalText).collect()),
        })
        .collect();
    CurveDocument {
        schema_version: SCHEMA_VERSION,
        ambient_dim: c.ambient_dim,
        vertices,
        edges: c
            .edges
            .iter()
            .map(|e| EdgeDoc {
                id: Some(e.id.clone()),
                tail: c.vertices[e.tail].clone(),
                head: c.vertices[e.head].clone(),
                direction: e.direction.clone(),
                length: RationalText(e.length.clone()),
            })
            .collect(),
        legs: c
            .legs
            .iter()
            .map(|l| LegDoc { vertex: c.vertices[l.vertex].clone(), direction: l.direction.clone() })
            .collect(),
        subcurve: c.balancing_waived,
        metadata: c.metadata.clone(),
    }
}

/// Canonical text for a curve, with a trailing newline.
pub fn serialize(c: &TropicalCurve) -> String {
    let mut s = serde_json::to_string_pretty(&curve_to_document(c)).expect("curve documents always serialize");
    s.push('\n');
    s
}

pub fn parse_affine_map(text: &str) -> Result<AffineMap> {
    let doc: AffineMapDocument = from_json(text)?;
    let s = doc.matrix.len();
    if s == 0 {
        return Err(parse_error("$.matrix", "matrix needs at least one row"));
    }
    let r = doc.matrix[0].len();
    for (i, row) in doc.matrix.iter().enumerate() {
        if row.len() != r || r == 0 {
            return Err(parse_error(format!("$.matrix[{i}]"), format!("expected {r} entries, got {}", row.len())));
        }
    }
    let rows: Vec<Vec<Rational>> = doc.matrix.iter().map(|row| row.iter().map(|x| x.0.clone()).collect()).collect();
    let mut map = AffineMap::linear(RationalMatrix::from_rows(r, &rows));
    if let Some(off) = doc.offset {
        if off.len() != s {
            return Err(parse_error("$.offset", format!("expected {s} entries, got {}", off.len())));
        }
        map.offset = off.into_iter().map(|x| x.0).collect();
    }
    Ok(map)
}

pub fn affine_map_to_document(map: &AffineMap) -> AffineMapDocument {
    let m = &map.matrix;
    AffineMapDocument {
        matrix: (0..m.rows()).map(|i| m.row(i).iter().cloned().map(RationalText).collect()).collect(),
        offset: Some(map.offset.iter().cloned().map(RationalText).collect()),
    }
}

pub fn serialize_affine_map(map: &AffineMap) -> String {
    serde_json::to_string_pretty(&affine_map_to_document(map)).expect("maps always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::all_builtins;

    #[test]
    fn templates_round_trip() {
        for t in all_builtins() {
            let text = serialize(&t.curve);
            assert_eq!(parse(&text).unwrap(), t.curve, "{}", t.name);
        }
    }

    #[test]
    fn float_direction_rejected() {
        let text = r#"{"schema_version":1,"ambient_dim":2,"vertices":[{"id":"a"},{"id":"b"}],
            "edges":[{"tail":"a","head":"b","direction":[1,0.5],"length":"1"}]}"#;
        match parse(text) {
            Err(Error::Parse { path, .. }) => assert!(path.contains("edges[0].direction"), "{path}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn float_length_rejected() {
        let text = r#"{"schema_version":1,"ambient_dim":1,"vertices":[{"id":"a"},{"id":"b"}],
            "edges":[{"tail":"a","head":"b","direction":[1],"length":0.5}]}"#;
        let err = parse(text).unwrap_err().to_string();
        assert!(err.contains("float"), "{err}");
    }

    #[test]
    fn zero_length_only_fails_strict() {
        let text = r#"{"schema_version":1,"ambient_dim":1,"vertices":[{"id":"a"},{"id":"b"}],
            "edges":[{"tail":"a","head":"b","direction":[1],"length":"0"}],
            "legs":[{"vertex":"a","direction":[-1]},{"vertex":"b","direction":[1]}]}"#;
        assert!(parse(text).is_ok());
        assert!(parse_strict(text).is_err());
    }

    #[test]
    fn schema_and_dimension_errors() {
        let bad_version = r#"{"schema_version":7,"ambient_dim":1,"vertices":[],"edges":[]}"#;
        assert!(matches!(parse(bad_version), Err(Error::Parse { .. })));
        let bad_dim = r#"{"schema_version":1,"ambient_dim":2,"vertices":[{"id":"a"}],
            "edges":[{"tail":"a","head":"a","direction":[1],"length":"1"}]}"#;
        match parse(bad_dim) {
            Err(Error::Parse { path, .. }) => assert_eq!(path, "$.edges[0].direction"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn affine_map_round_trip() {
        let text = r#"{"matrix":[["1/2","0"],[0,1]],"offset":["1","-3/4"]}"#;
        let m = parse_affine_map(text).unwrap();
        assert_eq!(parse_affine_map(&serialize_affine_map(&m)).unwrap(), m);
    }
}
