// SPDX-License-Identifier: Apache-2.0

//! SPICE subcircuit emission.
//!
//! Each device becomes an NMOS line `M<k> <a> <rail> <b> 0 NMOS` with body
//! tied to ground; a positive literal drives the rail named after its input
//! and a negative literal the `_B` rail.

use std::fmt::Write;

use crate::boolexpr::Polarity;
use crate::switchnet::{renumber, Origin, SwitchNetwork};

/// Subcircuit `DPDN_<name>` with ports `X Y Z` followed by each input's
/// true and complement rails. Devices are written in canonical order when
/// the network can be canonicalized and in stored order otherwise.
pub fn emit_spice(n: &SwitchNetwork) -> String {
    let canonical = renumber(n).unwrap_or_else(|_| n.clone());
    let mut out = String::new();
    let mut ports = vec!["X".to_string(), "Y".to_string(), "Z".to_string()];
    for input in canonical.inputs() {
        ports.push(input.clone());
        ports.push(format!("{input}_B"));
    }
    writeln!(out, ".SUBCKT DPDN_{} {}", canonical.name(), ports.join(" ")).unwrap();
    let pass: Vec<String> = canonical
        .devices()
        .iter()
        .enumerate()
        .filter(|(_, d)| d.origin == Origin::PassGate)
        .map(|(k, _)| format!("M{k}"))
        .collect();
    if !pass.is_empty() {
        writeln!(out, "* pass_gate {}", pass.join(" ")).unwrap();
    }
    for (k, d) in canonical.devices().iter().enumerate() {
        let rail = match d.gate.polarity {
            Polarity::Positive => d.gate.input.clone(),
            Polarity::Negative => format!("{}_B", d.gate.input),
        };
        writeln!(out, "M{k} {} {rail} {} 0 NMOS", d.a, d.b).unwrap();
    }
    out.push_str(".ENDS\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolexpr::{parse_expression, BoolExpr};
    use crate::enhancer::insert_pass_gates;
    use crate::fcsynth::fc_from_expr;

    fn m_lines(text: &str) -> Vec<&str> {
        text.lines().filter(|l| l.starts_with('M')).collect()
    }

    #[test]
    fn and_nand_netlist() {
        let text = emit_spice(&fc_from_expr(&parse_expression("A & B").unwrap()));
        assert_eq!(
            text,
            ".SUBCKT DPDN_dpdn X Y Z A A_B B B_B\n\
             M0 X A W0 0 NMOS\n\
             M1 Y A_B W0 0 NMOS\n\
             M2 Y B_B Z 0 NMOS\n\
             M3 W0 B Z 0 NMOS\n\
             .ENDS\n"
        );
    }

    #[test]
    fn single_literal_has_two_devices() {
        assert_eq!(m_lines(&emit_spice(&fc_from_expr(&BoolExpr::lit("A")))).len(), 2);
    }

    #[test]
    fn enhanced_and_nand_has_pass_gate_pair() {
        let n = insert_pass_gates(&fc_from_expr(&parse_expression("A & B").unwrap())).unwrap();
        let text = emit_spice(&n);
        let lines = m_lines(&text);
        assert_eq!(lines.len(), 6);
        assert!(lines.iter().any(|l| l.ends_with("W0 A Z 0 NMOS")));
        assert!(lines.iter().any(|l| l.ends_with("W0 A_B Z 0 NMOS")));
        assert!(text.contains("* pass_gate "));
    }
}
