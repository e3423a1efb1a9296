// SPDX-License-Identifier: Apache-2.0

//! Synthesis and verification of differential pull-down networks for
//! dynamic differential logic.
//!
//! A network is built from a Boolean expression, either as a textbook
//! series-parallel pair of branches or as a fully connected network in which
//! every internal node is always tied to an output or to the common node.
//! The analyzer checks function, connectivity, discharge energy and
//! evaluation depth by exhaustive switch-level enumeration.

pub mod analyzer;
pub mod assign;
pub mod boolexpr;
pub mod cli;
pub mod enhancer;
pub mod fcsynth;
pub mod switchnet;

pub use assign::{InputAssignment, InputState, PartialAssignment};
pub use boolexpr::{complement, eval_truth, input_set, parse_expression, BoolExpr, Literal, Polarity};
pub use enhancer::{enumerate_paths, insert_pass_gates, DischargePath};
pub use fcsynth::{fc_from_expr, fc_transform};
pub use switchnet::{build_genuine, renumber, Device, NodeId, Origin, SwitchNetwork};
