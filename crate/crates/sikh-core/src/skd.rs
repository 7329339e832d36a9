//! The diagram file format (`.skd`): a JSON object with fields `punctures`,
//! `edges`, `crossings`, `components`, and an optional free-form `comment`
//! for provenance notes.
//!
//! Ports are `[edge-id, end]` pairs with `end` 0 for a tail and 1 for a head,
//! listed in counterclockwise planar order; `under0` states whether the first
//! listed port is an under-strand end. The parser renormalizes the rotation;
//! files whose under/over split does not form coherent strands are rejected.

use serde::{Deserialize, Serialize};

use crate::diagram::{Diagram, EdgeEnd};
use crate::error::{Error, Result};
use crate::planar::WindingVector;

#[derive(Debug, Serialize, Deserialize)]
struct SkdFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    comment: Option<String>,
    punctures: usize,
    edges: Vec<SkdEdge>,
    crossings: Vec<SkdCrossing>,
    components: Vec<Vec<u32>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SkdEdge {
    id: u32,
    winding: Vec<i64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SkdCrossing {
    id: u32,
    ports: Vec<[u32; 2]>,
    under0: bool,
}

/// Parse a diagram from `.skd` text.
pub fn parse_str(text: &str) -> Result<Diagram> {
    let file: SkdFile = serde_json::from_str(text).map_err(|e| {
        Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string())
    })?;
    let edges = file
        .edges
        .into_iter()
        .map(|e| (e.id, WindingVector::new(e.winding)))
        .collect();
    let mut crossings = Vec::with_capacity(file.crossings.len());
    for c in file.crossings {
        if c.ports.len() != 4 {
            return Err(Error::parse(
                format!("crossings[{}].ports", c.id),
                format!("expected 4 ports, found {}", c.ports.len()),
            ));
        }
        let mut ports = [(0u32, EdgeEnd::Tail); 4];
        for (j, &[eid, end]) in c.ports.iter().enumerate() {
            let end = EdgeEnd::from_u8(end as u8).ok_or_else(|| {
                Error::parse(
                    format!("crossings[{}].ports[{j}]", c.id),
                    format!("edge end must be 0 or 1, found {end}"),
                )
            })?;
            ports[j] = (eid, end);
        }
        crossings.push((c.id, ports, c.under0));
    }
    Diagram::new(file.punctures, edges, crossings, file.components)
}

/// Render a diagram as canonical `.skd` text (stable byte-for-byte for a
/// given diagram).
pub fn to_string(d: &Diagram, comment: Option<&str>) -> String {
    let file = SkdFile {
        comment: comment.map(str::to_owned),
        punctures: d.punctures(),
        edges: d
            .edges()
            .iter()
            .map(|e| SkdEdge { id: e.id, winding: e.winding.coords().to_vec() })
            .collect(),
        crossings: d
            .crossings()
            .iter()
            .map(|c| SkdCrossing {
                id: c.id,
                ports: c
                    .ports
                    .iter()
                    .map(|p| [d.edges()[p.edge].id, p.end.as_u8() as u32])
                    .collect(),
                under0: true,
            })
            .collect(),
        components: d
            .components()
            .iter()
            .map(|comp| comp.iter().map(|&pos| d.edges()[pos].id).collect())
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("serialization cannot fail")
}

/// Read and parse a diagram file.
pub fn read_file(path: &std::path::Path) -> Result<Diagram> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::parse(path.display().to_string(), e.to_string()))?;
    parse_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const ANNULAR_UNKNOT: &str = r#"{
        "punctures": 1,
        "edges": [{"id": 0, "winding": [1]}],
        "crossings": [],
        "components": [[0]]
    }"#;

    #[test]
    fn parse_crossing_free_loop() {
        let d = parse_str(ANNULAR_UNKNOT).unwrap();
        assert_eq!(d.crossing_count(), 0);
        assert_eq!(d.components().len(), 1);
    }

    #[test]
    fn round_trip() {
        let d = parse_str(ANNULAR_UNKNOT).unwrap();
        let text = to_string(&d, Some("round trip"));
        let d2 = parse_str(&text).unwrap();
        assert_eq!(d, d2);
        assert_eq!(to_string(&d2, Some("round trip")), text);
    }

    #[test]
    fn syntax_error_reports_location() {
        let err = parse_str("{\"punctures\": 1,").unwrap_err();
        match err {
            Error::Parse { location, .. } => assert!(location.contains("line")),
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn bad_port_count() {
        let text = r#"{
            "punctures": 0,
            "edges": [{"id": 0, "winding": []}],
            "crossings": [{"id": 0, "ports": [[0,0],[0,1]], "under0": true}],
            "components": [[0]]
        }"#;
        let err = parse_str(text).unwrap_err();
        assert!(err.to_string().contains("4 ports"), "{err}");
    }
}
