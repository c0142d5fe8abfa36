use super::standardize::{Provenance, StandardizedPolytope};
use super::transform::zero_one_transform;
use super::Polytope;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Pm1,
    ZeroOne,
}

/// `{"domain": "pm1" | "zero_one", "A": [[...]], "b": [...]}` with an
/// optional `"schema"` tag.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolytopeDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub domain: Domain,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

impl PolytopeDoc {
    /// The polytope over `{-1,+1}^n`, transforming `zero_one` input.
    pub fn to_polytope(&self) -> Result<Polytope<f64>> {
        match self.domain {
            Domain::Pm1 => Polytope::new(self.a.clone(), self.b.clone()),
            Domain::ZeroOne => {
                Polytope::new(self.a.clone(), self.b.clone())?;
                zero_one_transform(&self.a, &self.b)
            }
        }
    }

    pub fn from_polytope(p: &Polytope<f64>) -> Self {
        PolytopeDoc {
            schema: None,
            domain: Domain::Pm1,
            a: p.rows().to_vec(),
            b: p.thresholds().to_vec(),
        }
    }
}

pub fn parse_polytope(text: &str) -> Result<Polytope<f64>> {
    let doc: PolytopeDoc = serde_json::from_str(text)?;
    doc.to_polytope()
}

pub fn load_polytope(path: &Path) -> Result<Polytope<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_polytope(&text)
}

fn join(idx: &[usize]) -> String {
    idx.iter().map(|j| j.to_string()).collect::<Vec<_>>().join(" ")
}

/// One CSV line per row with columns
/// `row,head,tail,tail_norm,critical_index,tail_regular,provenance`.
/// Index lists are space separated; an infinite critical index is `inf`.
pub fn write_decomposition_csv<W: Write>(sp: &StandardizedPolytope, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "row",
        "head",
        "tail",
        "tail_norm",
        "critical_index",
        "tail_regular",
        "provenance",
    ])?;
    for (i, (dec, prov)) in sp.rows.iter().zip(&sp.provenance).enumerate() {
        let tag = match prov {
            Provenance::Rescaled { .. } => "rescaled",
            Provenance::TruncatedPerturbed { .. } => "truncated_perturbed",
            Provenance::Passthrough => "passthrough",
        };
        w.write_record([
            i.to_string(),
            join(&dec.head),
            join(&dec.tail),
            format!("{:.17e}", dec.tail_norm),
            dec.critical_index.map_or("inf".to_string(), |c| c.to_string()),
            dec.tail_regular.to_string(),
            tag.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::standardize;

    #[test]
    fn parses_both_domains() {
        let pm = parse_polytope(r#"{"domain":"pm1","A":[[1,1]],"b":[0]}"#).unwrap();
        assert_eq!(pm.row(0), &[1.0, 1.0]);
        let zo = parse_polytope(r#"{"schema":"polyprg.polytope/1","domain":"zero_one","A":[[1,1]],"b":[1]}"#).unwrap();
        assert_eq!(zo.row(0), &[0.5, 0.5]);
        assert_eq!(zo.thresholds(), &[0.0]);
    }

    #[test]
    fn schema_errors_carry_positions() {
        let err = parse_polytope("{\"domain\":\"pm1\",\n\"A\":[[1,1]],\n\"c\":[0]}").unwrap_err();
        match err {
            Error::Schema(msg) => assert!(msg.contains("line 3"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_polytope(r#"{"domain":"pm1","A":[[1,1]],"b":[0,1]}"#).is_err());
    }

    #[test]
    fn csv_has_fixed_columns() {
        let p = Polytope::new(vec![vec![1.0; 4], vec![9.0, 1.0, 0.5, 0.25]], vec![0.0, 1.0]).unwrap();
        let sp = standardize(&p, 1, 0.6).unwrap();
        let mut buf = Vec::new();
        write_decomposition_csv(&sp, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            "row,head,tail,tail_norm,critical_index,tail_regular,provenance"
        );
        assert!(lines[1].starts_with("0,,0 1 2 3,"));
        assert!(lines[2].starts_with("1,0,1 2 3,"));
        assert_eq!(lines.len(), 3);
    }

    #[test]
    fn doc_roundtrip() {
        let p = Polytope::new(vec![vec![0.1, -3.5]], vec![2.25]).unwrap();
        let text = serde_json::to_string(&PolytopeDoc::from_polytope(&p)).unwrap();
        assert_eq!(parse_polytope(&text).unwrap(), p);
    }
}
