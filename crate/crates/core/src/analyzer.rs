// SPDX-License-Identifier: Apache-2.0

//! Exhaustive switch-level verification and the unit-capacitance power
//! model.
//!
//! Evaluation is modelled as: every input pair complementary, the sense
//! amplifier's bridge permanently joining `X` and `Y`, and each node
//! connected to `Z` discharging. Every discharged node is recharged in the
//! next precharge phase, so the charge drawn per cycle is the size of the
//! discharge set and does not depend on history. Floating internal nodes
//! keep their charge and are simply absent from the set.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::assign::{InputAssignment, InputState, PartialAssignment};
use crate::boolexpr::{input_set, BoolExpr};
use crate::switchnet::{states_for, NodeId, RailGraph, SwitchNetwork};

/// Environment variable overriding the input cap for complete sweeps.
pub const MAX_INPUTS_ENV: &str = "DPDN_MAX_INPUTS";

const X: usize = 0;
const Y: usize = 1;
const Z: usize = 2;

/// Enumeration caps. Complete sweeps visit 2ⁿ assignments, partial sweeps
/// 3ⁿ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_complete: usize,
    pub max_partial: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_complete: 24,
            max_partial: 12,
        }
    }
}

impl Limits {
    const WARN_COMPLETE: usize = 16;
    const WARN_PARTIAL: usize = 8;

    /// Default caps, with the complete-sweep cap taken from
    /// `DPDN_MAX_INPUTS` when set. The partial cap never exceeds its default
    /// or the complete cap.
    pub fn from_env() -> Result<Self, AnalysisError> {
        match std::env::var(MAX_INPUTS_ENV) {
            Ok(raw) => Self::with_override(&raw),
            Err(_) => Ok(Self::default()),
        }
    }

    pub fn with_override(raw: &str) -> Result<Self, AnalysisError> {
        let cap: usize = raw
            .trim()
            .parse()
            .map_err(|_| AnalysisError::BadLimit(raw.to_string()))?;
        if cap >= 63 {
            return Err(AnalysisError::BadLimit(raw.to_string()));
        }
        Ok(Limits {
            max_complete: cap,
            max_partial: cap.min(Limits::default().max_partial),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("{inputs} inputs exceed the {sweep} enumeration cap of {cap}")]
    TooManyInputs {
        inputs: usize,
        cap: usize,
        sweep: &'static str,
    },
    #[error("network inputs {network:?} do not match expression inputs {expression:?}")]
    InputMismatch {
        network: Vec<String>,
        expression: Vec<String>,
    },
    #[error("neither X nor Y conducts to Z under {0}")]
    NoConductingOutput(InputAssignment),
    #[error("invalid {MAX_INPUTS_ENV} value '{0}'")]
    BadLimit(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    FloatingNode,
    WrongFunction,
    NotExclusive,
    UnequalDepth,
    EarlyPropagation,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationKind::FloatingNode => "floating_node",
            ViolationKind::WrongFunction => "wrong_function",
            ViolationKind::NotExclusive => "not_exclusive",
            ViolationKind::UnequalDepth => "unequal_depth",
            ViolationKind::EarlyPropagation => "early_propagation",
        })
    }
}

/// Evidence for a violation; the variant determines the kind.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// An internal node connected to none of X, Y, Z.
    FloatingNode {
        node: NodeId,
    },
    /// An output whose connection to Z disagrees with the function.
    WrongFunction {
        output: NodeId,
        expected: bool,
        actual: bool,
    },
    NotExclusive {
        x_to_z: bool,
        y_to_z: bool,
    },
    UnequalDepth {
        depth: usize,
        reference: usize,
    },
    /// A conducting path from an output to Z.
    EarlyPropagation {
        path: Vec<NodeId>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Violation {
    pub assignment: PartialAssignment,
    #[serde(flatten)]
    pub witness: Witness,
}

impl Violation {
    pub fn kind(&self) -> ViolationKind {
        match self.witness {
            Witness::FloatingNode { .. } => ViolationKind::FloatingNode,
            Witness::WrongFunction { .. } => ViolationKind::WrongFunction,
            Witness::NotExclusive { .. } => ViolationKind::NotExclusive,
            Witness::UnequalDepth { .. } => ViolationKind::UnequalDepth,
            Witness::EarlyPropagation { .. } => ViolationKind::EarlyPropagation,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at ({}): ", self.kind(), self.assignment)?;
        match &self.witness {
            Witness::FloatingNode { node } => write!(f, "{node} floats"),
            Witness::WrongFunction {
                output,
                expected,
                actual,
            } => write!(
                f,
                "{output} {} Z, expected {}",
                if *actual { "conducts to" } else { "is isolated from" },
                if *expected { "conduction" } else { "isolation" }
            ),
            Witness::NotExclusive { x_to_z, y_to_z } => {
                write!(f, "X–Z {x_to_z}, Y–Z {y_to_z}")
            }
            Witness::UnequalDepth { depth, reference } => {
                write!(f, "depth {depth}, reference {reference}")
            }
            Witness::EarlyPropagation { path } => {
                let names: Vec<String> = path.iter().map(ToString::to_string).collect();
                write!(f, "conducting path {}", names.join("–"))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyEntry {
    pub assignment: InputAssignment,
    pub energy: usize,
}

/// Per-assignment discharge counts (unit capacitance per node, `Z`
/// included).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyReport {
    pub per_assignment: Vec<EnergyEntry>,
    pub mean: f64,
    /// Population variance.
    pub variance: f64,
    pub min: usize,
    pub max: usize,
}

impl EnergyReport {
    pub fn is_constant(&self) -> bool {
        self.min == self.max
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DepthEntry {
    pub assignment: InputAssignment,
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DepthReport {
    pub per_assignment: Vec<DepthEntry>,
    pub min: usize,
    pub max: usize,
    /// Assignments whose depth differs from the first assignment's.
    pub violations: Vec<Violation>,
}

impl DepthReport {
    pub fn is_uniform(&self) -> bool {
        self.min == self.max
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Verdicts {
    pub function: bool,
    pub fully_connected: bool,
    pub constant_energy: bool,
    pub no_early_propagation: bool,
}

impl Verdicts {
    pub fn all_pass(&self) -> bool {
        self.function && self.fully_connected && self.constant_energy && self.no_early_propagation
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub name: String,
    pub inputs: Vec<String>,
    pub device_count: usize,
    pub pass_gate_count: usize,
    pub internal_count: usize,
    /// Functional and exclusivity violations.
    pub function: Vec<Violation>,
    pub fully_connected: Vec<Violation>,
    pub energy: EnergyReport,
    /// Absent when some assignment leaves both outputs isolated.
    pub depth: Option<DepthReport>,
    pub early_propagation: Vec<Violation>,
    pub verdicts: Verdicts,
}

/// Runs analyses under a fixed set of enumeration caps.
#[derive(Debug, Clone, Copy, Default)]
pub struct Analyzer {
    pub limits: Limits,
}

struct Sweep<'a> {
    net: &'a SwitchNetwork,
    graph: RailGraph,
}

impl<'a> Sweep<'a> {
    fn new(net: &'a SwitchNetwork) -> Self {
        Sweep {
            net,
            graph: RailGraph::new(net),
        }
    }

    fn inputs(&self) -> usize {
        self.net.inputs().len()
    }

    fn states(&self, bits: u64) -> Vec<InputState> {
        let n = self.inputs();
        (0..n)
            .map(|i| InputState::from((bits >> (n - 1 - i)) & 1 == 1))
            .collect()
    }

    fn assignment(&self, bits: u64) -> InputAssignment {
        InputAssignment::from_bits(self.net.inputs(), bits)
    }

    fn partial(&self, states: &[InputState]) -> PartialAssignment {
        PartialAssignment::from_pairs(self.net.inputs().iter().cloned().zip(states.iter().copied()))
    }

    fn complete(&self) -> impl Iterator<Item = (u64, Vec<InputState>)> + '_ {
        (0..1u64 << self.inputs()).map(move |bits| (bits, self.states(bits)))
    }
}

impl Analyzer {
    pub fn new(limits: Limits) -> Self {
        Analyzer { limits }
    }

    fn guard_complete(&self, n: &SwitchNetwork) -> Result<(), AnalysisError> {
        let inputs = n.inputs().len();
        if inputs > self.limits.max_complete {
            return Err(AnalysisError::TooManyInputs {
                inputs,
                cap: self.limits.max_complete,
                sweep: "complete",
            });
        }
        if inputs > Limits::WARN_COMPLETE {
            log::warn!("{}: sweeping 2^{inputs} complementary assignments", n.name());
        }
        Ok(())
    }

    fn guard_partial(&self, n: &SwitchNetwork) -> Result<(), AnalysisError> {
        let inputs = n.inputs().len();
        if inputs > self.limits.max_partial {
            return Err(AnalysisError::TooManyInputs {
                inputs,
                cap: self.limits.max_partial,
                sweep: "partial",
            });
        }
        if inputs > Limits::WARN_PARTIAL {
            log::warn!("{}: sweeping 3^{inputs} partial assignments", n.name());
        }
        Ok(())
    }

    /// For every complementary assignment: `X`–`Z` iff `f`, `Y`–`Z` iff
    /// `!f`, and exactly one of the two.
    pub fn check_function(&self, n: &SwitchNetwork, f: &BoolExpr) -> Result<Vec<Violation>, AnalysisError> {
        let wanted: BTreeSet<String> = input_set(f).into_iter().collect();
        let have: BTreeSet<String> = n.inputs().iter().cloned().collect();
        if wanted != have {
            return Err(AnalysisError::InputMismatch {
                network: n.inputs().to_vec(),
                expression: input_set(f),
            });
        }
        self.guard_complete(n)?;
        let sweep = Sweep::new(n);
        let mut out = Vec::new();
        for (bits, states) in sweep.complete() {
            let lookup = |name: &str| {
                n.inputs()
                    .iter()
                    .position(|i| i == name)
                    .map(|i| states[i] == InputState::One)
            };
            let expected = f.eval_with(&lookup).expect("inputs checked above");
            let uf = sweep.graph.components(&states, false);
            let x = uf.equiv(X, Z);
            let y = uf.equiv(Y, Z);
            let assignment = PartialAssignment::from(&sweep.assignment(bits));
            if x != expected {
                out.push(Violation {
                    assignment: assignment.clone(),
                    witness: Witness::WrongFunction {
                        output: NodeId::X,
                        expected,
                        actual: x,
                    },
                });
            }
            if y == expected {
                out.push(Violation {
                    assignment: assignment.clone(),
                    witness: Witness::WrongFunction {
                        output: NodeId::Y,
                        expected: !expected,
                        actual: y,
                    },
                });
            }
            if x == y {
                out.push(Violation {
                    assignment,
                    witness: Witness::NotExclusive { x_to_z: x, y_to_z: y },
                });
            }
        }
        out.sort();
        Ok(out)
    }

    /// Exactly one of `X`, `Y` reaches `Z` under every complementary
    /// assignment; needs no expression.
    pub fn check_exclusive(&self, n: &SwitchNetwork) -> Result<Vec<Violation>, AnalysisError> {
        self.guard_complete(n)?;
        let sweep = Sweep::new(n);
        let mut out = Vec::new();
        for (bits, states) in sweep.complete() {
            let uf = sweep.graph.components(&states, false);
            let (x, y) = (uf.equiv(X, Z), uf.equiv(Y, Z));
            if x == y {
                out.push(Violation {
                    assignment: PartialAssignment::from(&sweep.assignment(bits)),
                    witness: Witness::NotExclusive { x_to_z: x, y_to_z: y },
                });
            }
        }
        Ok(out)
    }

    /// One `floating_node` violation per (assignment, internal node) where
    /// the node shares a component with none of `X`, `Y`, `Z`.
    pub fn check_fully_connected(&self, n: &SwitchNetwork) -> Result<Vec<Violation>, AnalysisError> {
        self.guard_complete(n)?;
        let sweep = Sweep::new(n);
        let mut out = Vec::new();
        for (bits, states) in sweep.complete() {
            let uf = sweep.graph.components(&states, false);
            for k in 0..n.internal_count() {
                let v = 3 + k;
                if !(uf.equiv(v, X) || uf.equiv(v, Y) || uf.equiv(v, Z)) {
                    out.push(Violation {
                        assignment: PartialAssignment::from(&sweep.assignment(bits)),
                        witness: Witness::FloatingNode {
                            node: NodeId::Internal(k),
                        },
                    });
                }
            }
        }
        out.sort();
        Ok(out)
    }

    pub fn energy_report(&self, n: &SwitchNetwork) -> Result<EnergyReport, AnalysisError> {
        self.guard_complete(n)?;
        let sweep = Sweep::new(n);
        let per_assignment: Vec<EnergyEntry> = sweep
            .complete()
            .map(|(bits, states)| {
                let uf = sweep.graph.components(&states, true);
                let energy = (0..n.node_count()).filter(|&v| uf.equiv(v, Z)).count();
                EnergyEntry {
                    assignment: sweep.assignment(bits),
                    energy,
                }
            })
            .collect();
        Ok(summarize(per_assignment))
    }

    /// Shortest closed path length from `Z` to the output in its component,
    /// without the bridge.
    pub fn evaluation_depth(&self, n: &SwitchNetwork, a: &InputAssignment) -> Result<usize, AnalysisError> {
        let graph = RailGraph::new(n);
        let states = states_for(n, &PartialAssignment::from(a));
        depth_of(&graph, &states).ok_or_else(|| AnalysisError::NoConductingOutput(a.clone()))
    }

    pub fn depth_report(&self, n: &SwitchNetwork) -> Result<DepthReport, AnalysisError> {
        self.guard_complete(n)?;
        let sweep = Sweep::new(n);
        let mut per_assignment = Vec::new();
        for (bits, states) in sweep.complete() {
            let assignment = sweep.assignment(bits);
            let depth =
                depth_of(&sweep.graph, &states).ok_or_else(|| AnalysisError::NoConductingOutput(assignment.clone()))?;
            per_assignment.push(DepthEntry { assignment, depth });
        }
        let reference = per_assignment[0].depth;
        let violations = per_assignment
            .iter()
            .filter(|e| e.depth != reference)
            .map(|e| Violation {
                assignment: PartialAssignment::from(&e.assignment),
                witness: Witness::UnequalDepth {
                    depth: e.depth,
                    reference,
                },
            })
            .collect();
        Ok(DepthReport {
            min: per_assignment.iter().map(|e| e.depth).min().unwrap_or(0),
            max: per_assignment.iter().map(|e| e.depth).max().unwrap_or(0),
            per_assignment,
            violations,
        })
    }

    /// Every partial assignment with at least one precharged pair must leave
    /// both outputs isolated from `Z`.
    pub fn check_early_propagation(&self, n: &SwitchNetwork) -> Result<Vec<Violation>, AnalysisError> {
        self.guard_partial(n)?;
        let sweep = Sweep::new(n);
        let mut out = Vec::new();
        for partial in PartialAssignment::all_with_precharge(n.inputs()) {
            let states = states_for(n, &partial);
            let path = sweep
                .graph
                .shortest_path(&states, X, Z)
                .or_else(|| sweep.graph.shortest_path(&states, Y, Z));
            if let Some(path) = path {
                out.push(Violation {
                    assignment: sweep.partial(&states),
                    witness: Witness::EarlyPropagation {
                        path: path.into_iter().map(SwitchNetwork::node_at).collect(),
                    },
                });
            }
        }
        out.sort();
        Ok(out)
    }

    pub fn full_report(&self, n: &SwitchNetwork, f: &BoolExpr) -> Result<AnalysisReport, AnalysisError> {
        let function = self.check_function(n, f)?;
        self.bundle(n, function)
    }

    /// [`Analyzer::full_report`] without a reference expression; the
    /// function verdict covers differential exclusivity only.
    pub fn structural_report(&self, n: &SwitchNetwork) -> Result<AnalysisReport, AnalysisError> {
        let function = self.check_exclusive(n)?;
        self.bundle(n, function)
    }

    fn bundle(&self, n: &SwitchNetwork, function: Vec<Violation>) -> Result<AnalysisReport, AnalysisError> {
        let fully_connected = self.check_fully_connected(n)?;
        let energy = self.energy_report(n)?;
        let depth = match self.depth_report(n) {
            Ok(d) => Some(d),
            Err(AnalysisError::NoConductingOutput(_)) => None,
            Err(e) => return Err(e),
        };
        let early_propagation = self.check_early_propagation(n)?;
        let verdicts = Verdicts {
            function: function.is_empty(),
            fully_connected: fully_connected.is_empty(),
            constant_energy: energy.is_constant(),
            no_early_propagation: early_propagation.is_empty(),
        };
        Ok(AnalysisReport {
            name: n.name().to_string(),
            inputs: n.inputs().to_vec(),
            device_count: n.devices().len(),
            pass_gate_count: n.pass_gate_count(),
            internal_count: n.internal_count(),
            function,
            fully_connected,
            energy,
            depth,
            early_propagation,
            verdicts,
        })
    }
}

fn depth_of(graph: &RailGraph, states: &[InputState]) -> Option<usize> {
    [X, Y]
        .into_iter()
        .filter_map(|out| graph.shortest_path(states, Z, out))
        .map(|p| p.len() - 1)
        .min()
}

fn summarize(per_assignment: Vec<EnergyEntry>) -> EnergyReport {
    let count = per_assignment.len() as u128;
    let sum: u128 = per_assignment.iter().map(|e| e.energy as u128).sum();
    let squares: u128 = per_assignment.iter().map(|e| (e.energy as u128).pow(2)).sum();
    // n·Σx² − (Σx)² is exact in integers, so a constant profile yields 0.0
    let spread = count * squares - sum * sum;
    EnergyReport {
        mean: sum as f64 / count as f64,
        variance: spread as f64 / (count * count) as f64,
        min: per_assignment.iter().map(|e| e.energy).min().unwrap_or(0),
        max: per_assignment.iter().map(|e| e.energy).max().unwrap_or(0),
        per_assignment,
    }
}

/// Nodes discharged under `a`: the component of `Z` once `X` and `Y` are
/// bridged.
pub fn discharge_set(n: &SwitchNetwork, a: &InputAssignment) -> BTreeSet<NodeId> {
    let graph = RailGraph::new(n);
    let states = states_for(n, &PartialAssignment::from(a));
    let uf = graph.components(&states, true);
    n.nodes()
        .filter(|&v| uf.equiv(SwitchNetwork::node_index(v), Z))
        .collect()
}

pub fn check_function(n: &SwitchNetwork, f: &BoolExpr) -> Result<Vec<Violation>, AnalysisError> {
    Analyzer::default().check_function(n, f)
}

pub fn check_exclusive(n: &SwitchNetwork) -> Result<Vec<Violation>, AnalysisError> {
    Analyzer::default().check_exclusive(n)
}

pub fn check_fully_connected(n: &SwitchNetwork) -> Result<Vec<Violation>, AnalysisError> {
    Analyzer::default().check_fully_connected(n)
}

pub fn energy_report(n: &SwitchNetwork) -> Result<EnergyReport, AnalysisError> {
    Analyzer::default().energy_report(n)
}

pub fn evaluation_depth(n: &SwitchNetwork, a: &InputAssignment) -> Result<usize, AnalysisError> {
    Analyzer::default().evaluation_depth(n, a)
}

pub fn depth_report(n: &SwitchNetwork) -> Result<DepthReport, AnalysisError> {
    Analyzer::default().depth_report(n)
}

pub fn check_early_propagation(n: &SwitchNetwork) -> Result<Vec<Violation>, AnalysisError> {
    Analyzer::default().check_early_propagation(n)
}

pub fn full_report(n: &SwitchNetwork, f: &BoolExpr) -> Result<AnalysisReport, AnalysisError> {
    Analyzer::default().full_report(n, f)
}

pub fn structural_report(n: &SwitchNetwork) -> Result<AnalysisReport, AnalysisError> {
    Analyzer::default().structural_report(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolexpr::parse_expression;
    use crate::enhancer::insert_pass_gates;
    use crate::fcsynth::fc_from_expr;
    use crate::switchnet::build_genuine;
    use proptest::prelude::*;

    fn p(s: &str) -> BoolExpr {
        parse_expression(s).unwrap()
    }

    fn bits(n: &SwitchNetwork, b: u64) -> InputAssignment {
        InputAssignment::from_bits(n.inputs(), b)
    }

    fn w0() -> NodeId {
        NodeId::Internal(0)
    }

    #[test]
    fn function_check_examples() {
        let f = p("A & B");
        assert!(check_function(&fc_from_expr(&f), &f).unwrap().is_empty());

        let wrong = check_function(&fc_from_expr(&f), &p("A | B")).unwrap();
        let at: BTreeSet<String> = wrong.iter().map(|v| v.assignment.to_string()).collect();
        assert_eq!(at, ["A=0,B=1", "A=1,B=0"].map(String::from).into_iter().collect());
        assert!(wrong.iter().all(|v| v.kind() == ViolationKind::WrongFunction));

        let oai = p("(A|B)&(C|D)");
        assert!(check_function(&build_genuine(&oai), &oai).unwrap().is_empty());
    }

    #[test]
    fn function_check_rejects_input_mismatch() {
        let n = fc_from_expr(&p("A & B"));
        assert!(matches!(
            check_function(&n, &p("A & C")),
            Err(AnalysisError::InputMismatch { .. })
        ));
    }

    #[test]
    fn genuine_and_nand_has_single_floating_witness() {
        let v = check_fully_connected(&build_genuine(&p("A & B"))).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].assignment.to_string(), "A=0,B=0");
        assert_eq!(v[0].witness, Witness::FloatingNode { node: w0() });
    }

    #[test]
    fn fc_and_nand_and_trivial_networks_are_fully_connected() {
        assert!(check_fully_connected(&fc_from_expr(&p("A & B"))).unwrap().is_empty());
        assert!(check_fully_connected(&build_genuine(&p("A"))).unwrap().is_empty());
    }

    #[test]
    fn discharge_sets() {
        let fc = fc_from_expr(&p("A & B"));
        let all: BTreeSet<NodeId> = [NodeId::X, NodeId::Y, NodeId::Z, w0()].into();
        assert_eq!(discharge_set(&fc, &bits(&fc, 0b11)), all);
        assert_eq!(discharge_set(&fc, &bits(&fc, 0b01)), all);
        let genuine = build_genuine(&p("A & B"));
        assert_eq!(
            discharge_set(&genuine, &bits(&genuine, 0b00)),
            [NodeId::X, NodeId::Y, NodeId::Z].into()
        );
    }

    #[test]
    fn energy_examples() {
        let fc = energy_report(&fc_from_expr(&p("A & B"))).unwrap();
        assert!(fc.per_assignment.iter().all(|e| e.energy == 4));
        assert_eq!(fc.variance, 0.0);

        let genuine = energy_report(&build_genuine(&p("A & B"))).unwrap();
        let profile: Vec<usize> = genuine.per_assignment.iter().map(|e| e.energy).collect();
        assert_eq!(profile, [3, 4, 4, 4]);
        assert_eq!(genuine.variance, 0.1875);
        assert_eq!(genuine.mean, 3.75);
        assert_eq!((genuine.min, genuine.max), (3, 4));

        let lit = energy_report(&build_genuine(&p("A"))).unwrap();
        assert!(lit.per_assignment.iter().all(|e| e.energy == 3));
        assert_eq!(lit.variance, 0.0);
    }

    #[test]
    fn depth_examples() {
        let fc = fc_from_expr(&p("A & B"));
        assert_eq!(evaluation_depth(&fc, &bits(&fc, 0b11)).unwrap(), 2);
        assert_eq!(evaluation_depth(&fc, &bits(&fc, 0b00)).unwrap(), 1);
        let report = depth_report(&fc).unwrap();
        assert!(!report.is_uniform());
        assert!(report
            .violations
            .iter()
            .all(|v| v.kind() == ViolationKind::UnequalDepth));

        let enhanced = insert_pass_gates(&fc).unwrap();
        for b in 0..4 {
            assert_eq!(evaluation_depth(&enhanced, &bits(&enhanced, b)).unwrap(), 2);
        }
    }

    #[test]
    fn depth_requires_a_conducting_output() {
        let n = SwitchNetwork::new(
            "open",
            vec!["A".into()],
            0,
            vec![crate::switchnet::Device {
                id: "M0".into(),
                a: NodeId::X,
                b: NodeId::Z,
                gate: crate::boolexpr::Literal::positive("A"),
                origin: crate::switchnet::Origin::Synthesized,
            }],
        )
        .unwrap();
        assert!(matches!(
            evaluation_depth(&n, &bits(&n, 0)),
            Err(AnalysisError::NoConductingOutput(_))
        ));
    }

    #[test]
    fn early_propagation_examples() {
        let fc = fc_from_expr(&p("A & B"));
        let v = check_early_propagation(&fc).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].assignment.to_string(), "A=P,B=0");
        assert_eq!(
            v[0].witness,
            Witness::EarlyPropagation {
                path: vec![NodeId::Y, NodeId::Z]
            }
        );
        let enhanced = insert_pass_gates(&fc).unwrap();
        assert!(check_early_propagation(&enhanced).unwrap().is_empty());
    }

    #[test]
    fn full_report_verdicts() {
        let f = p("A & B");
        let fc = full_report(&fc_from_expr(&f), &f).unwrap();
        assert!(fc.verdicts.function && fc.verdicts.fully_connected && fc.verdicts.constant_energy);
        assert!(!fc.verdicts.no_early_propagation);

        let enhanced = full_report(&insert_pass_gates(&fc_from_expr(&f)).unwrap(), &f).unwrap();
        assert!(enhanced.verdicts.all_pass());
        assert!(enhanced.depth.unwrap().is_uniform());

        let genuine = full_report(&build_genuine(&f), &f).unwrap();
        assert!(!genuine.verdicts.fully_connected);
        assert!(!genuine.verdicts.constant_energy);
    }

    #[test]
    fn caps_are_enforced() {
        let names: Vec<String> = (0..6).map(|i| format!("I{i}")).collect();
        let expr = p(&names.join(" & "));
        let n = fc_from_expr(&expr);
        let tight = Analyzer::new(Limits {
            max_complete: 5,
            max_partial: 5,
        });
        assert!(matches!(
            tight.energy_report(&n),
            Err(AnalysisError::TooManyInputs { sweep: "complete", .. })
        ));
        assert!(matches!(
            tight.check_early_propagation(&n),
            Err(AnalysisError::TooManyInputs { sweep: "partial", .. })
        ));
        assert_eq!(
            Limits::with_override("8").unwrap(),
            Limits {
                max_complete: 8,
                max_partial: 8
            }
        );
        assert_eq!(Limits::with_override("30").unwrap().max_partial, 12);
        assert!(Limits::with_override("lots").is_err());
    }

    #[test]
    fn violations_serialize_with_kind_tag() {
        let v = check_fully_connected(&build_genuine(&p("A & B"))).unwrap();
        assert_eq!(
            serde_json::to_string(&v[0]).unwrap(),
            r#"{"assignment":{"A":0,"B":0},"kind":"floating_node","node":"W0"}"#
        );
    }

    /// Component of Z with the bridge, given an explicit closed mask.
    fn discharged(graph: &RailGraph, closed: &[bool]) -> BTreeSet<usize> {
        let mut uf = petgraph::unionfind::UnionFind::<usize>::new(graph.node_count);
        for (i, &(a, b, _, _)) in graph.edges.iter().enumerate() {
            if closed[i] {
                uf.union(a, b);
            }
        }
        uf.union(X, Y);
        (0..graph.node_count).filter(|&v| uf.equiv(v, Z)).collect()
    }

    proptest! {
        #[test]
        fn discharge_is_monotone_in_closed_edges(
            base in proptest::collection::vec(any::<bool>(), 8),
            extra in proptest::collection::vec(any::<bool>(), 8),
        ) {
            let n = fc_from_expr(&p("(A|B)&(C|D)"));
            let graph = RailGraph::new(&n);
            let more: Vec<bool> = base.iter().zip(&extra).map(|(a, b)| *a || *b).collect();
            prop_assert!(discharged(&graph, &base).is_subset(&discharged(&graph, &more)));
        }
    }
}
