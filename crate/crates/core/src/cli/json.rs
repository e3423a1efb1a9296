// SPDX-License-Identifier: Apache-2.0

//! Structural netlist documents (format version 1).
//!
//! ```json
//! {
//!   "devices": [
//!     { "a": "X", "b": "W0", "gate": { "input": "A", "polarity": "positive" },
//!       "id": "M0", "origin": "synthesized" }
//!   ],
//!   "format_version": 1,
//!   "inputs": ["A", "B"],
//!   "internal_count": 1,
//!   "name": "dpdn"
//! }
//! ```
//!
//! Keys are emitted in sorted order and devices in canonical order, so equal
//! networks produce identical bytes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::boolexpr::{Literal, Polarity};
use crate::switchnet::{renumber, Device, NetworkError, NodeId, Origin, SwitchNetwork};

pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("malformed netlist document: {0}")]
    Schema(#[from] serde_json::Error),
    #[error("missing or non-integer format_version")]
    MissingVersion,
    #[error("unsupported format_version {0} (expected {FORMAT_VERSION})")]
    UnknownVersion(u64),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetlistDocument {
    pub devices: Vec<DeviceRecord>,
    pub format_version: u64,
    pub inputs: Vec<String>,
    pub internal_count: usize,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceRecord {
    pub a: NodeId,
    pub b: NodeId,
    pub gate: GateRecord,
    pub id: String,
    pub origin: Origin,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateRecord {
    pub input: String,
    pub polarity: Polarity,
}

impl From<&SwitchNetwork> for NetlistDocument {
    fn from(n: &SwitchNetwork) -> Self {
        NetlistDocument {
            devices: n
                .devices()
                .iter()
                .map(|d| DeviceRecord {
                    a: d.a,
                    b: d.b,
                    gate: GateRecord {
                        input: d.gate.input.clone(),
                        polarity: d.gate.polarity,
                    },
                    id: d.id.clone(),
                    origin: d.origin,
                })
                .collect(),
            format_version: FORMAT_VERSION,
            inputs: n.inputs().to_vec(),
            internal_count: n.internal_count(),
            name: n.name().to_string(),
        }
    }
}

impl TryFrom<NetlistDocument> for SwitchNetwork {
    type Error = NetworkError;

    fn try_from(doc: NetlistDocument) -> Result<Self, Self::Error> {
        let devices = doc
            .devices
            .into_iter()
            .map(|r| Device {
                id: r.id,
                a: r.a,
                b: r.b,
                gate: Literal {
                    input: r.gate.input,
                    polarity: r.gate.polarity,
                },
                origin: r.origin,
            })
            .collect();
        SwitchNetwork::new(doc.name, doc.inputs, doc.internal_count, devices)
    }
}

/// Canonical pretty-printed document with a trailing newline.
pub fn emit_json(n: &SwitchNetwork) -> Result<String, NetworkError> {
    let canonical = renumber(n)?;
    let mut text =
        serde_json::to_string_pretty(&NetlistDocument::from(&canonical)).expect("netlist documents always serialize");
    text.push('\n');
    Ok(text)
}

/// Parses a document. The result carries no derivation.
pub fn parse_json(text: &str) -> Result<SwitchNetwork, JsonError> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    match value.get("format_version").and_then(serde_json::Value::as_u64) {
        Some(FORMAT_VERSION) => {}
        Some(other) => return Err(JsonError::UnknownVersion(other)),
        None => return Err(JsonError::MissingVersion),
    }
    let doc: NetlistDocument = serde_json::from_value(value)?;
    Ok(SwitchNetwork::try_from(doc)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolexpr::parse_expression;
    use crate::enhancer::insert_pass_gates;
    use crate::fcsynth::fc_from_expr;

    fn and_nand() -> SwitchNetwork {
        fc_from_expr(&parse_expression("A & B").unwrap())
    }

    #[test]
    fn round_trip_is_canonical() {
        let n = and_nand();
        let text = emit_json(&n).unwrap();
        let back = parse_json(&text).unwrap();
        assert_eq!(back, renumber(&n).unwrap().detached());
        assert_eq!(emit_json(&back).unwrap(), text);
        assert_eq!(back.devices().len(), 4);
        assert_eq!(back.internal_count(), 1);
    }

    #[test]
    fn keys_are_sorted() {
        let text = emit_json(&and_nand()).unwrap();
        let order: Vec<usize> = [
            "\"devices\"",
            "\"format_version\"",
            "\"inputs\"",
            "\"internal_count\"",
            "\"name\"",
        ]
        .iter()
        .map(|k| text.find(k).unwrap())
        .collect();
        assert!(order.windows(2).all(|w| w[0] < w[1]));
        assert!(text.ends_with("}\n"));
    }

    #[test]
    fn enhanced_document_marks_pass_gates() {
        let text = emit_json(&insert_pass_gates(&and_nand()).unwrap()).unwrap();
        let doc: NetlistDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(doc.devices.len(), 6);
        assert_eq!(doc.devices.iter().filter(|d| d.origin == Origin::PassGate).count(), 2);
    }

    fn document(internal_count: usize, far: &str) -> String {
        format!(
            r#"{{"devices":[
                {{"a":"X","b":"{far}","gate":{{"input":"A","polarity":"positive"}},"id":"M0","origin":"synthesized"}},
                {{"a":"{far}","b":"Z","gate":{{"input":"A","polarity":"negative"}},"id":"M1","origin":"synthesized"}}],
              "format_version":1,"inputs":["A"],"internal_count":{internal_count},"name":"t"}}"#
        )
    }

    #[test]
    fn rejects_dangling_node() {
        assert!(parse_json(&document(1, "W0")).is_ok());
        assert!(matches!(
            parse_json(&document(1, "W3")),
            Err(JsonError::Network(NetworkError::DanglingNode { .. }))
        ));
    }

    #[test]
    fn rejects_schema_and_version_errors() {
        let good = document(1, "W0");
        assert!(matches!(
            parse_json(&good.replace("\"format_version\":1", "\"format_version\":2")),
            Err(JsonError::UnknownVersion(2))
        ));
        assert!(matches!(
            parse_json(&good.replace("\"format_version\":1,", "")),
            Err(JsonError::MissingVersion)
        ));
        assert!(matches!(
            parse_json(&good.replace("\"name\":\"t\"", "\"name\":\"t\",\"extra\":0")),
            Err(JsonError::Schema(_))
        ));
        assert!(matches!(
            parse_json(&good.replace("positive", "high")),
            Err(JsonError::Schema(_))
        ));
        assert!(matches!(parse_json("[1, 2"), Err(JsonError::Schema(_))));
    }
}
