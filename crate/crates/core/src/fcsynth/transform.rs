// SPDX-License-Identifier: Apache-2.0

//! Rewriting a textbook network into a fully connected one.
//!
//! The two branches of the input are first matched against `f` and `!f` to
//! recover their series-parallel trees. The rewrite then walks both trees
//! top-down: wherever one branch has a series split `x·y` around node `W`,
//! the other branch has the dual parallel split `x̄ + ȳ`, and the `x̄`
//! component is detached from the common bottom and reattached at `W`. The
//! two halves are then processed as independent sub-networks. No device is
//! added or removed; only endpoints move.

use std::collections::BTreeSet;

use petgraph::unionfind::UnionFind;
use thiserror::Error;

use crate::analyzer::{self, AnalysisError};
use crate::boolexpr::{complement, input_set, BoolExpr, Literal};
use crate::switchnet::{NodeId, Orientation, SpDerivation, SwitchNetwork};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("network inputs {network:?} do not match expression inputs {expression:?}")]
    InputMismatch {
        network: Vec<String>,
        expression: Vec<String>,
    },
    #[error("network does not realize the expression: {0}")]
    NotRealized(String),
    #[error("network is not series-parallel decomposable against the expression: {0}")]
    NotDecomposable(String),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

/// Series-parallel tree over device indices.
#[derive(Debug, Clone)]
enum SpTree {
    Leaf(usize),
    Series {
        mid: NodeId,
        upper: Box<SpTree>,
        lower: Box<SpTree>,
    },
    Parallel(Box<SpTree>, Box<SpTree>),
}

impl SpTree {
    fn leaves(&self, out: &mut Vec<usize>) {
        match self {
            SpTree::Leaf(d) => out.push(*d),
            SpTree::Series { upper, lower, .. } => {
                upper.leaves(out);
                lower.leaves(out);
            }
            SpTree::Parallel(l, r) => {
                l.leaves(out);
                r.leaves(out);
            }
        }
    }
}

struct Matcher<'a> {
    net: &'a SwitchNetwork,
}

impl Matcher<'_> {
    fn gates(&self, devs: &[usize]) -> Vec<&Literal> {
        let mut g: Vec<&Literal> = devs.iter().map(|&d| &self.net.devices()[d].gate).collect();
        g.sort();
        g
    }

    fn nodes(&self, devs: &[usize]) -> BTreeSet<NodeId> {
        devs.iter()
            .flat_map(|&d| {
                let dev = &self.net.devices()[d];
                [dev.a, dev.b]
            })
            .collect()
    }

    /// Finds a tree for `e` spanning `top`..`bottom` that uses exactly `devs`.
    fn matches(&self, e: &BoolExpr, devs: &[usize], top: NodeId, bottom: NodeId) -> Option<SpTree> {
        let mut want = e.literals();
        want.sort();
        if want != self.gates(devs) {
            return None;
        }
        match e {
            BoolExpr::Lit(_) => {
                let dev = &self.net.devices()[devs[0]];
                (dev.touches(top) && dev.touches(bottom)).then_some(SpTree::Leaf(devs[0]))
            }
            BoolExpr::And(x, y) => {
                for mid in self.nodes(devs) {
                    if mid == top || mid == bottom || !mid.is_internal() {
                        continue;
                    }
                    let Some((upper, lower)) = self.split_at(devs, top, mid, bottom) else {
                        continue;
                    };
                    if let (Some(u), Some(l)) =
                        (self.matches(x, &upper, top, mid), self.matches(y, &lower, mid, bottom))
                    {
                        return Some(SpTree::Series {
                            mid,
                            upper: Box::new(u),
                            lower: Box::new(l),
                        });
                    }
                }
                None
            }
            BoolExpr::Or(x, y) => {
                let bundles = self.bundles(devs, top, bottom);
                if bundles.len() < 2 || bundles.len() > 24 {
                    return None;
                }
                let full = (1u32 << bundles.len()) - 1;
                for mask in 1..full {
                    let (left, right): (Vec<usize>, Vec<usize>) = {
                        let mut l = Vec::new();
                        let mut r = Vec::new();
                        for (i, b) in bundles.iter().enumerate() {
                            if mask & (1 << i) != 0 {
                                l.extend(b);
                            } else {
                                r.extend(b);
                            }
                        }
                        (l, r)
                    };
                    if left.len() != x.literal_count() {
                        continue;
                    }
                    if let (Some(l), Some(r)) = (
                        self.matches(x, &left, top, bottom),
                        self.matches(y, &right, top, bottom),
                    ) {
                        return Some(SpTree::Parallel(Box::new(l), Box::new(r)));
                    }
                }
                None
            }
        }
    }

    /// Splits `devs` at `mid` into the part reachable from `top` without
    /// crossing `mid`, and the rest. Fails unless `mid` separates `top`
    /// from `bottom`.
    fn split_at(&self, devs: &[usize], top: NodeId, mid: NodeId, bottom: NodeId) -> Option<(Vec<usize>, Vec<usize>)> {
        let reach = reachable_devices(self.net, devs, top, &[mid, bottom]);
        let (upper, lower): (Vec<usize>, Vec<usize>) = devs.iter().partition(|d| reach.contains(d));
        let dev = |d: &usize| &self.net.devices()[*d];
        if upper.iter().any(|d| dev(d).touches(bottom)) || lower.iter().any(|d| dev(d).touches(top)) {
            return None;
        }
        if upper.is_empty() || lower.is_empty() {
            return None;
        }
        Some((upper, lower))
    }

    /// Groups `devs` into components that only meet at `top` and `bottom`.
    fn bundles(&self, devs: &[usize], top: NodeId, bottom: NodeId) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::<usize>::new(devs.len());
        for i in 0..devs.len() {
            for j in i + 1..devs.len() {
                let (a, b) = (&self.net.devices()[devs[i]], &self.net.devices()[devs[j]]);
                let shared = [a.a, a.b].into_iter().any(|n| n != top && n != bottom && b.touches(n));
                if shared {
                    uf.union(i, j);
                }
            }
        }
        let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
        for (i, &d) in devs.iter().enumerate() {
            let root = uf.find(i);
            match groups.iter_mut().find(|(r, _)| *r == root) {
                Some((_, g)) => g.push(d),
                None => groups.push((root, vec![d])),
            }
        }
        groups.into_iter().map(|(_, g)| g).collect()
    }
}

/// Devices in `devs` reachable from `start` without expanding through any
/// node in `stops`.
fn reachable_devices(net: &SwitchNetwork, devs: &[usize], start: NodeId, stops: &[NodeId]) -> BTreeSet<usize> {
    let mut seen_nodes = BTreeSet::from([start]);
    let mut frontier = vec![start];
    let mut found = BTreeSet::new();
    while let Some(v) = frontier.pop() {
        for &d in devs {
            let dev = &net.devices()[d];
            if !dev.touches(v) || !found.insert(d) {
                continue;
            }
            let u = dev.other(v);
            if !stops.contains(&u) && seen_nodes.insert(u) {
                frontier.push(u);
            }
        }
    }
    found
}

struct Surgery {
    orientation: Vec<Orientation>,
}

impl Surgery {
    fn orient(&mut self, tree: &SpTree, top: NodeId, bottom: NodeId) {
        match tree {
            SpTree::Leaf(d) => {
                self.orientation[*d] = Orientation {
                    upper: top,
                    lower: bottom,
                }
            }
            SpTree::Series { mid, upper, lower } => {
                self.orient(upper, top, *mid);
                self.orient(lower, *mid, bottom);
            }
            SpTree::Parallel(l, r) => {
                self.orient(l, top, bottom);
                self.orient(r, top, bottom);
            }
        }
    }

    /// Moves the bottom of `tree` from `from` to `to`.
    fn reattach(&mut self, tree: &SpTree, from: NodeId, to: NodeId) {
        let mut leaves = Vec::new();
        tree.leaves(&mut leaves);
        for d in leaves {
            if self.orientation[d].lower == from {
                self.orientation[d].lower = to;
            }
        }
    }

    /// `t` spans the true top down to `ground`; `f` is its dual.
    fn unroll(&mut self, t: &SpTree, f: &SpTree, ground: NodeId) -> Result<(), TransformError> {
        match (t, f) {
            (SpTree::Leaf(_), SpTree::Leaf(_)) => Ok(()),
            (SpTree::Series { mid, upper, lower }, SpTree::Parallel(dual_upper, dual_lower)) => {
                self.reattach(dual_upper, ground, *mid);
                self.unroll(upper, dual_upper, *mid)?;
                self.unroll(lower, dual_lower, ground)
            }
            (
                SpTree::Parallel(upper, lower),
                SpTree::Series {
                    mid,
                    upper: dual_upper,
                    lower: dual_lower,
                },
            ) => {
                self.reattach(upper, ground, *mid);
                self.unroll(upper, dual_upper, *mid)?;
                self.unroll(lower, dual_lower, ground)
            }
            _ => Err(TransformError::NotDecomposable(
                "branches are not De Morgan duals of each other".into(),
            )),
        }
    }
}

/// Rewrites a textbook network `n` realizing (`f`, `!f`) into a fully
/// connected network with the same devices. The result keeps every device
/// id and gate and carries its derivation.
pub fn fc_transform(n: &SwitchNetwork, f: &BoolExpr) -> Result<SwitchNetwork, TransformError> {
    let wanted: BTreeSet<String> = input_set(f).into_iter().collect();
    let have: BTreeSet<String> = n.inputs().iter().cloned().collect();
    if wanted != have {
        return Err(TransformError::InputMismatch {
            network: n.inputs().to_vec(),
            expression: input_set(f),
        });
    }
    let violations = analyzer::check_function(n, f)?;
    if let Some(v) = violations.first() {
        return Err(TransformError::NotRealized(format!(
            "{} violation(s), first: {v}",
            violations.len()
        )));
    }

    let all: Vec<usize> = (0..n.devices().len()).collect();
    let true_side = reachable_devices(n, &all, NodeId::X, &[NodeId::Z]);
    let false_side = reachable_devices(n, &all, NodeId::Y, &[NodeId::Z]);
    if !true_side.is_disjoint(&false_side) {
        return Err(TransformError::NotDecomposable(
            "true and false branches share nodes".into(),
        ));
    }
    if true_side.len() + false_side.len() != all.len() {
        return Err(TransformError::NotDecomposable(
            "some devices belong to neither branch".into(),
        ));
    }

    let matcher = Matcher { net: n };
    let true_devs: Vec<usize> = true_side.into_iter().collect();
    let false_devs: Vec<usize> = false_side.into_iter().collect();
    let t = matcher
        .matches(f, &true_devs, NodeId::X, NodeId::Z)
        .ok_or_else(|| TransformError::NotDecomposable("true branch does not follow f".into()))?;
    let f_bar = complement(f);
    let fb = matcher
        .matches(&f_bar, &false_devs, NodeId::Y, NodeId::Z)
        .ok_or_else(|| TransformError::NotDecomposable("false branch does not follow !f".into()))?;

    let blank = Orientation {
        upper: NodeId::X,
        lower: NodeId::Z,
    };
    let mut surgery = Surgery {
        orientation: vec![blank; n.devices().len()],
    };
    surgery.orient(&t, NodeId::X, NodeId::Z);
    surgery.orient(&fb, NodeId::Y, NodeId::Z);
    surgery.unroll(&t, &fb, NodeId::Z)?;

    let devices = n
        .devices()
        .iter()
        .zip(&surgery.orientation)
        .map(|(d, o)| {
            let mut d = d.clone();
            d.a = o.upper;
            d.b = o.lower;
            d
        })
        .collect();
    let out = SwitchNetwork::new(n.name(), n.inputs().to_vec(), n.internal_count(), devices)
        .and_then(|net| {
            net.with_derivation(SpDerivation {
                orientation: surgery.orientation,
            })
        })
        .map_err(|e| TransformError::NotDecomposable(e.to_string()))?;
    Ok(out)
}
