// SPDX-License-Identifier: Apache-2.0

//! Fully connected network synthesis.
//!
//! [`fc_from_expr`] builds a fully connected network directly from an
//! expression. For a series split `g = x·y` the `y` network sits at the
//! bottom and is shared by both branches: the true branch is `x·y` and the
//! false branch becomes `x̄·y + ȳ`. A parallel split `g = x + y` is the mirror
//! image, built as the series split of `x̄·ȳ` with the two output roles
//! exchanged. Recursion stops at single literals, each of which becomes one
//! complementary device pair.
//!
//! [`fc_transform`] reaches the same topology from an existing textbook
//! network by reattaching its dual parallel components.

mod transform;

pub use transform::{fc_transform, TransformError};

use crate::boolexpr::{input_set, BoolExpr};
use crate::switchnet::{Device, NodeId, Orientation, Origin, SpDerivation, SwitchNetwork};

/// Where a recursive sub-network is embedded: `true_top` carries the
/// sub-function, `false_top` its complement, both discharging into `ground`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TerminalMap {
    pub true_top: NodeId,
    pub false_top: NodeId,
    pub ground: NodeId,
}

impl TerminalMap {
    pub const OUTPUTS: TerminalMap = TerminalMap {
        true_top: NodeId::X,
        false_top: NodeId::Y,
        ground: NodeId::Z,
    };
}

struct Builder {
    devices: Vec<Device>,
    orientation: Vec<Orientation>,
    internal: usize,
}

impl Builder {
    fn fresh(&mut self) -> NodeId {
        let w = NodeId::Internal(self.internal);
        self.internal += 1;
        w
    }

    fn push(&mut self, upper: NodeId, gate: crate::boolexpr::Literal, lower: NodeId) {
        self.devices.push(Device {
            id: format!("M{}", self.devices.len()),
            a: upper,
            b: lower,
            gate,
            origin: Origin::Synthesized,
        });
        self.orientation.push(Orientation { upper, lower });
    }

    /// Emits the network for `g`, or for its complement when `negate` is
    /// set, on terminals `t`.
    fn emit(&mut self, g: &BoolExpr, negate: bool, t: TerminalMap) {
        match g {
            BoolExpr::Lit(l) => {
                let lit = if negate { l.complement() } else { l.clone() };
                let dual = lit.complement();
                self.push(t.true_top, lit, t.ground);
                self.push(t.false_top, dual, t.ground);
            }
            BoolExpr::And(x, y) | BoolExpr::Or(x, y) => {
                let series = matches!(g, BoolExpr::And(..)) != negate;
                let mid = self.fresh();
                if series {
                    self.emit(x, negate, TerminalMap { ground: mid, ..t });
                    self.emit(y, negate, TerminalMap { true_top: mid, ..t });
                } else {
                    self.emit(
                        x,
                        !negate,
                        TerminalMap {
                            true_top: t.false_top,
                            false_top: t.true_top,
                            ground: mid,
                        },
                    );
                    self.emit(
                        y,
                        !negate,
                        TerminalMap {
                            true_top: mid,
                            false_top: t.true_top,
                            ground: t.ground,
                        },
                    );
                }
            }
        }
    }
}

/// Fully connected network for `f` on (`X`, `Y`, `Z`), with its derivation
/// attached. Internal nodes are allocated in recursion preorder.
pub fn fc_from_expr(f: &BoolExpr) -> SwitchNetwork {
    let mut b = Builder {
        devices: Vec::with_capacity(2 * f.literal_count()),
        orientation: Vec::with_capacity(2 * f.literal_count()),
        internal: 0,
    };
    b.emit(f, false, TerminalMap::OUTPUTS);
    SwitchNetwork::new("dpdn", input_set(f), b.internal, b.devices)
        .and_then(|n| {
            n.with_derivation(SpDerivation {
                orientation: b.orientation,
            })
        })
        .expect("recursive construction is well-formed")
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::boolexpr::{parse_expression, Literal};

    fn w(k: usize) -> NodeId {
        NodeId::Internal(k)
    }

    fn edges(n: &SwitchNetwork) -> BTreeSet<(NodeId, Literal, NodeId)> {
        n.devices().iter().map(|d| (d.a, d.gate.clone(), d.b)).collect()
    }

    #[test]
    fn and_nand() {
        let n = fc_from_expr(&parse_expression("A & B").unwrap());
        assert_eq!(
            edges(&n),
            [
                (NodeId::X, Literal::positive("A"), w(0)),
                (NodeId::Y, Literal::negative("A"), w(0)),
                (w(0), Literal::positive("B"), NodeId::Z),
                (NodeId::Y, Literal::negative("B"), NodeId::Z),
            ]
            .into_iter()
            .collect()
        );
    }

    #[test]
    fn single_literal() {
        let n = fc_from_expr(&BoolExpr::lit("A"));
        assert_eq!(n.internal_count(), 0);
        assert_eq!(
            edges(&n),
            [
                (NodeId::X, Literal::positive("A"), NodeId::Z),
                (NodeId::Y, Literal::negative("A"), NodeId::Z),
            ]
            .into_iter()
            .collect()
        );
    }

    #[test]
    fn oai22_topology() {
        let n = fc_from_expr(&parse_expression("(A|B)&(C|D)").unwrap());
        assert_eq!(n.internal_count(), 3);
        // W0 = series node between the two sums, W1 and W2 inside them
        assert_eq!(
            edges(&n),
            [
                (NodeId::X, Literal::positive("A"), w(1)),
                (NodeId::Y, Literal::negative("A"), w(1)),
                (w(1), Literal::negative("B"), w(0)),
                (NodeId::X, Literal::positive("B"), w(0)),
                (w(0), Literal::positive("C"), w(2)),
                (NodeId::Y, Literal::negative("C"), w(2)),
                (w(2), Literal::negative("D"), NodeId::Z),
                (w(0), Literal::positive("D"), NodeId::Z),
            ]
            .into_iter()
            .collect()
        );
    }

    #[test]
    fn or_is_mirror_of_and_on_complement() {
        // A + B on (X, Y) is !A·!B on (Y, X)
        let or = fc_from_expr(&parse_expression("A | B").unwrap());
        let and = fc_from_expr(&parse_expression("!A & !B").unwrap());
        let swap = |n: NodeId| match n {
            NodeId::X => NodeId::Y,
            NodeId::Y => NodeId::X,
            o => o,
        };
        let mirrored: BTreeSet<_> = edges(&and).into_iter().map(|(a, g, b)| (swap(a), g, swap(b))).collect();
        assert_eq!(edges(&or), mirrored);
    }

    #[test]
    fn device_count_is_twice_literals() {
        for s in ["A", "A & B & C", "A & (B | C)", "A & B | B & C | C & A", "(A | !A) & B"] {
            let e = parse_expression(s).unwrap();
            assert_eq!(fc_from_expr(&e).devices().len(), 2 * e.literal_count(), "{s}");
        }
    }

    #[test]
    fn every_internal_node_sees_both_polarities() {
        for s in ["A & B", "(A|B)&(C|D)", "A & B | B & C | C & A", "A & (B | !C) & D"] {
            let n = fc_from_expr(&parse_expression(s).unwrap());
            for k in 0..n.internal_count() {
                let gates: Vec<&Literal> = n
                    .devices()
                    .iter()
                    .filter(|d| d.touches(w(k)))
                    .map(|d| &d.gate)
                    .collect();
                assert!(
                    gates.iter().any(|g| gates.contains(&&g.complement())),
                    "{s}: W{k} lacks a complementary pair"
                );
            }
        }
    }
}
