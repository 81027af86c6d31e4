//! JSON matrix files.
//!
//! ```text
//! {"n": 6, "kind": {"family": "bosonic", "d": 3}, "provenance": "...",
//!  "rows": [[[re, im], ...], ...]}
//! ```
//!
//! Numbers are written in shortest round-trip form, so a file written by
//! [`to_json`] parses back to bit-identical entries and re-serializes to the
//! same bytes. `provenance` is optional on input.

use serde::Deserialize;

use crate::constructions::{GateKind, GateMatrix};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};

#[derive(Deserialize)]
struct RawMatrixFile {
    n: usize,
    kind: GateKind,
    #[serde(default)]
    provenance: Option<String>,
    rows: Vec<Vec<[f64; 2]>>,
}

fn json_f64(x: f64) -> Result<String> {
    if !x.is_finite() {
        return Err(Error::Format(format!("non-finite matrix entry {x}")));
    }
    serde_json::to_string(&x).map_err(|e| Error::Format(e.to_string()))
}

pub fn to_json(gate: &GateMatrix) -> Result<String> {
    let m = gate.matrix();
    let kind = serde_json::to_string(&gate.kind()).map_err(|e| Error::Format(e.to_string()))?;
    let provenance = serde_json::to_string(gate.provenance()).map_err(|e| Error::Format(e.to_string()))?;
    let mut out = format!("{{\"n\": {}, \"kind\": {kind}, \"provenance\": {provenance}, \"rows\": [\n", gate.n());
    for i in 0..m.nrows() {
        let entries = (0..m.ncols())
            .map(|j| Ok(format!("[{}, {}]", json_f64(m[(i, j)].re)?, json_f64(m[(i, j)].im)?)))
            .collect::<Result<Vec<_>>>()?;
        out.push_str("  [");
        out.push_str(&entries.join(", "));
        out.push(']');
        if i + 1 < m.nrows() {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str("]}\n");
    Ok(out)
}

pub fn from_json(text: &str) -> Result<GateMatrix> {
    let raw: RawMatrixFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    let expected = raw.kind.validate()?.subspace_dim();
    if raw.n != expected {
        return Err(Error::Format(format!(
            "{} acts on dimension {expected}, but the file claims n = {}",
            raw.kind, raw.n
        )));
    }
    if raw.rows.len() != raw.n || raw.rows.iter().any(|r| r.len() != raw.n) {
        return Err(Error::Format(format!("rows do not form a {0}x{0} matrix", raw.n)));
    }
    let m = CMatrix::from_fn(raw.n, raw.n, |i, j| C64::new(raw.rows[i][j][0], raw.rows[i][j][1]));
    GateMatrix::new(raw.kind, m, raw.provenance.unwrap_or_else(|| "external".to_string()))
}

pub fn read_matrix_file(path: &std::path::Path) -> Result<GateMatrix> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    from_json(&text)
}

pub fn write_matrix_file(path: &std::path::Path, gate: &GateMatrix) -> Result<()> {
    std::fs::write(path, to_json(gate)?).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::build_permutation_bue;
    use crate::search::sample_haar_gate;

    #[test]
    fn haar_gate_round_trips_bit_exactly() {
        let gate = sample_haar_gate(GateKind::Fermionic { d: 5 }, 17).unwrap();
        let text = to_json(&gate).unwrap();
        let back = from_json(&text).unwrap();
        for (a, b) in gate.matrix().iter().zip(back.matrix().iter()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
        assert_eq!(back.kind(), gate.kind());
        assert_eq!(to_json(&back).unwrap(), text);
    }

    #[test]
    fn schema_fields() {
        let text = to_json(&build_permutation_bue(3).unwrap()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["n"], 6);
        assert_eq!(v["kind"]["family"], "bosonic");
        assert_eq!(v["kind"]["d"], 3);
        assert_eq!(v["rows"][0][3], serde_json::json!([1.0, 0.0]));
        let dist = r#"{"n": 4, "kind": {"family": "distinguishable", "d1": 2, "d2": 2},
            "rows": [[[1,0],[0,0],[0,0],[0,0]],[[0,0],[1,0],[0,0],[0,0]],[[0,0],[0,0],[1,0],[0,0]],[[0,0],[0,0],[0,0],[1,0]]]}"#;
        let g = from_json(dist).unwrap();
        assert_eq!(g.provenance(), "external");
        assert!(g.is_unitary());
    }

    #[test]
    fn mismatched_kind_rejected() {
        let bad = r#"{"n": 4, "kind": {"family": "bosonic", "d": 3}, "rows": []}"#;
        assert!(matches!(from_json(bad), Err(Error::Format(_))));
        let ragged = r#"{"n": 1, "kind": {"family": "bosonic", "d": 1}, "rows": [[[1,0],[0,0]]]}"#;
        assert!(matches!(from_json(ragged), Err(Error::Format(_))));
        assert!(from_json("not json").is_err());
    }
}
