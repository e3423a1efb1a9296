// SPDX-License-Identifier: Apache-2.0

//! Pass-gate insertion.
//!
//! A pass-gate is a pair of parallel switches gated by both polarities of one
//! input. It conducts under any complementary value and blocks while the pair
//! is precharged, so putting one for every missing input on every structural
//! path holds back evaluation until all inputs have arrived. Extra pass-gates
//! then equalize the series device count of all paths.
//!
//! Structural paths share devices, so a pass-gate cannot always sit on one
//! path alone. Each missing input is placed below the device nearest `Z`
//! whose paths all lack that input, falling back to the path's last device.
//! Length is equalized with longest-path potentials towards `Z`: a device
//! from `u` to `v` is padded until its weight is `pot(u) - pot(v)`, with both
//! outputs pinned to the overall maximum.

use std::collections::{BTreeSet, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::boolexpr::Literal;
use crate::switchnet::{Device, NodeId, Orientation, Origin, SpDerivation, SwitchNetwork};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DischargePath {
    /// From `X` or `Y` down to `Z`.
    pub nodes: Vec<NodeId>,
    /// Device ids, one per hop.
    pub devices: Vec<String>,
    pub inputs_covered: BTreeSet<String>,
}

impl DischargePath {
    /// Series device count.
    pub fn len(&self) -> usize {
        self.devices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.devices.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnhanceError {
    #[error("network '{0}' has no series-parallel derivation attached")]
    NoDerivation(String),
    #[error("derivation of '{0}' orients devices in a cycle")]
    CyclicDerivation(String),
}

/// Devices leaving each node in the derivation's orientation, in device-list
/// order.
fn out_edges(n: &SwitchNetwork, orientation: &[Orientation]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); n.node_count()];
    for (i, o) in orientation.iter().enumerate() {
        out[SwitchNetwork::node_index(o.upper)].push(i);
    }
    out
}

fn derivation(n: &SwitchNetwork) -> Result<&[Orientation], EnhanceError> {
    n.derivation()
        .map(|d| d.orientation.as_slice())
        .ok_or_else(|| EnhanceError::NoDerivation(n.name().to_string()))
}

/// Fails if the orientation has a directed cycle.
fn check_acyclic(n: &SwitchNetwork, orientation: &[Orientation], out: &[Vec<usize>]) -> Result<(), EnhanceError> {
    // 0 = unseen, 1 = on stack, 2 = done
    let mut state = vec![0u8; out.len()];
    for root in 0..out.len() {
        if state[root] != 0 {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        state[root] = 1;
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            if let Some(&d) = out[v].get(*next) {
                *next += 1;
                let w = SwitchNetwork::node_index(orientation[d].lower);
                match state[w] {
                    0 => {
                        state[w] = 1;
                        stack.push((w, 0));
                    }
                    1 => return Err(EnhanceError::CyclicDerivation(n.name().to_string())),
                    _ => {}
                }
            } else {
                state[v] = 2;
                stack.pop();
            }
        }
    }
    Ok(())
}

/// Device-index sequences of all directed paths from `X`, then `Y`, to `Z`.
fn device_paths(out: &[Vec<usize>], orientation: &[Orientation]) -> Vec<Vec<usize>> {
    fn walk(
        v: usize,
        out: &[Vec<usize>],
        orientation: &[Orientation],
        prefix: &mut Vec<usize>,
        acc: &mut Vec<Vec<usize>>,
    ) {
        if v == SwitchNetwork::node_index(NodeId::Z) {
            acc.push(prefix.clone());
            return;
        }
        for &d in &out[v] {
            prefix.push(d);
            walk(
                SwitchNetwork::node_index(orientation[d].lower),
                out,
                orientation,
                prefix,
                acc,
            );
            prefix.pop();
        }
    }
    let mut acc = Vec::new();
    for root in [NodeId::X, NodeId::Y] {
        walk(
            SwitchNetwork::node_index(root),
            out,
            orientation,
            &mut Vec::new(),
            &mut acc,
        );
    }
    acc
}

/// Structural output-to-`Z` paths of the attached derivation.
pub fn enumerate_paths(n: &SwitchNetwork) -> Result<Vec<DischargePath>, EnhanceError> {
    let orientation = derivation(n)?;
    let out = out_edges(n, orientation);
    check_acyclic(n, orientation, &out)?;
    Ok(device_paths(&out, orientation)
        .into_iter()
        .map(|p| {
            let mut nodes = vec![orientation[p[0]].upper];
            nodes.extend(p.iter().map(|&d| orientation[d].lower));
            DischargePath {
                nodes,
                devices: p.iter().map(|&d| n.devices()[d].id.clone()).collect(),
                inputs_covered: p.iter().map(|&d| n.devices()[d].gate.input.clone()).collect(),
            }
        })
        .collect())
}

/// Adds pass-gates so that every structural path is gated by every input
/// and all paths have the same series device count. Existing devices keep
/// their ids; a device that receives pass-gates is re-terminated on the
/// first node of its chain.
#[allow(clippy::needless_range_loop)]
pub fn insert_pass_gates(n: &SwitchNetwork) -> Result<SwitchNetwork, EnhanceError> {
    let orientation = derivation(n)?;
    let out = out_edges(n, orientation);
    check_acyclic(n, orientation, &out)?;
    let paths = device_paths(&out, orientation);
    let inputs = n.inputs();
    let input_of = |d: usize| {
        inputs
            .iter()
            .position(|i| *i == n.devices()[d].gate.input)
            .expect("gate inputs are validated at construction")
    };

    let mut through = vec![Vec::new(); n.devices().len()];
    for (p, path) in paths.iter().enumerate() {
        for &d in path {
            through[d].push(p);
        }
    }
    let mut covered: Vec<Vec<bool>> = paths
        .iter()
        .map(|path| {
            let mut c = vec![false; inputs.len()];
            for &d in path {
                c[input_of(d)] = true;
            }
            c
        })
        .collect();

    // chain[d]: inputs of the pass-gates hung below device d, top to bottom
    let mut chain: Vec<Vec<usize>> = vec![Vec::new(); n.devices().len()];
    for i in 0..inputs.len() {
        for p in 0..paths.len() {
            if covered[p][i] {
                continue;
            }
            let host = paths[p]
                .iter()
                .rev()
                .copied()
                .find(|&d| through[d].iter().all(|&q| !covered[q][i]))
                .unwrap_or(*paths[p].last().expect("paths have at least one device"));
            chain[host].push(i);
            for &q in &through[host] {
                covered[q][i] = true;
            }
        }
    }

    // longest weighted distance to Z, filled in reverse topological order
    let weight = |d: usize, chain: &[Vec<usize>]| 1 + chain[d].len();
    let mut pot: Vec<Option<usize>> = vec![None; n.node_count()];
    pot[SwitchNetwork::node_index(NodeId::Z)] = Some(0);
    for v in reverse_topological(&out, orientation) {
        if v == SwitchNetwork::node_index(NodeId::Z) {
            continue;
        }
        pot[v] = out[v]
            .iter()
            .filter_map(|&d| pot[SwitchNetwork::node_index(orientation[d].lower)].map(|p| p + weight(d, &chain)))
            .max();
    }
    let longest = [NodeId::X, NodeId::Y]
        .into_iter()
        .filter_map(|o| pot[SwitchNetwork::node_index(o)])
        .max()
        .unwrap_or(0);
    for v in [NodeId::X, NodeId::Y] {
        let slot = &mut pot[SwitchNetwork::node_index(v)];
        if slot.is_some() {
            *slot = Some(longest);
        }
    }
    let filler = (0..inputs.len())
        .min_by(|&a, &b| inputs[a].cmp(&inputs[b]))
        .expect("networks have at least one input");
    for d in 0..n.devices().len() {
        let o = orientation[d];
        let (Some(top), Some(bottom)) = (
            pot[SwitchNetwork::node_index(o.upper)],
            pot[SwitchNetwork::node_index(o.lower)],
        ) else {
            continue;
        };
        let slack = top - bottom - weight(d, &chain);
        chain[d].extend(std::iter::repeat_n(filler, slack));
    }

    let mut used: HashSet<String> = n.devices().iter().map(|d| d.id.clone()).collect();
    let mut next_id = 0usize;
    let mut fresh_id = move || loop {
        let id = format!("M{next_id}");
        next_id += 1;
        if used.insert(id.clone()) {
            return id;
        }
    };
    let mut internal = n.internal_count();
    let mut devices = n.devices().to_vec();
    let mut orient = orientation.to_vec();
    let mut added = Vec::new();
    let mut added_orient = Vec::new();
    for (d, stages) in chain.iter().enumerate() {
        if stages.is_empty() {
            continue;
        }
        let lower = orient[d].lower;
        let mut top = NodeId::Internal(internal);
        internal += 1;
        devices[d].a = orient[d].upper;
        devices[d].b = top;
        orient[d].lower = top;
        for (k, &i) in stages.iter().enumerate() {
            let bottom = if k + 1 == stages.len() {
                lower
            } else {
                internal += 1;
                NodeId::Internal(internal - 1)
            };
            for gate in [Literal::positive(&inputs[i]), Literal::negative(&inputs[i])] {
                added.push(Device {
                    id: fresh_id(),
                    a: top,
                    b: bottom,
                    gate,
                    origin: Origin::PassGate,
                });
                added_orient.push(Orientation {
                    upper: top,
                    lower: bottom,
                });
            }
            top = bottom;
        }
    }
    devices.extend(added);
    orient.extend(added_orient);
    let enhanced = SwitchNetwork::new(n.name(), inputs.to_vec(), internal, devices)
        .and_then(|e| e.with_derivation(SpDerivation { orientation: orient }))
        .expect("chains only add well-formed devices");
    Ok(enhanced)
}

/// Node indices with every node after all nodes it points to.
fn reverse_topological(out: &[Vec<usize>], orientation: &[Orientation]) -> Vec<usize> {
    let mut order = Vec::with_capacity(out.len());
    let mut seen = vec![false; out.len()];
    for root in 0..out.len() {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut stack = vec![(root, 0usize)];
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            if let Some(&d) = out[v].get(*next) {
                *next += 1;
                let w = SwitchNetwork::node_index(orientation[d].lower);
                if !seen[w] {
                    seen[w] = true;
                    stack.push((w, 0));
                }
            } else {
                order.push(v);
                stack.pop();
            }
        }
    }
    order
}
