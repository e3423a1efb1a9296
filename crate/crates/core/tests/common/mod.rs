// SPDX-License-Identifier: Apache-2.0

//! Reference models shared by the integration tests. They only read the
//! public device list and recompute everything with plain matrices, so they
//! share no code with the analyzer.

#![allow(dead_code)]

use std::collections::BTreeSet;

use dpdn::{BoolExpr, NodeId, Polarity, SwitchNetwork};
use rand::Rng;

pub fn nodes(n: &SwitchNetwork) -> Vec<NodeId> {
    let mut v = vec![NodeId::X, NodeId::Y, NodeId::Z];
    v.extend((0..n.internal_count()).map(NodeId::Internal));
    v
}

fn index(n: &SwitchNetwork, node: NodeId) -> usize {
    nodes(n).iter().position(|&m| m == node).unwrap()
}

/// Rail value of each device under `values[i]` for `n.inputs()[i]`
/// (`None` = precharged pair).
pub fn closed(n: &SwitchNetwork, values: &[Option<bool>]) -> Vec<bool> {
    n.devices()
        .iter()
        .map(|d| {
            let i = n.inputs().iter().position(|x| *x == d.gate.input).unwrap();
            match (values[i], d.gate.polarity) {
                (None, _) => false,
                (Some(v), Polarity::Positive) => v,
                (Some(v), Polarity::Negative) => !v,
            }
        })
        .collect()
}

/// Reachability matrix of the closed-switch graph by repeated squaring of
/// the adjacency relation, optionally with an X–Y bridge.
pub fn closure(n: &SwitchNetwork, values: &[Option<bool>], bridge: bool) -> Vec<Vec<bool>> {
    let count = nodes(n).len();
    let mut reach = vec![vec![false; count]; count];
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
    }
    for (d, on) in n.devices().iter().zip(closed(n, values)) {
        if on {
            let (a, b) = (index(n, d.a), index(n, d.b));
            reach[a][b] = true;
            reach[b][a] = true;
        }
    }
    if bridge {
        reach[0][1] = true;
        reach[1][0] = true;
    }
    for k in 0..count {
        for i in 0..count {
            if reach[i][k] {
                let via = reach[k].clone();
                for (r, v) in reach[i].iter_mut().zip(via) {
                    *r |= v;
                }
            }
        }
    }
    reach
}

pub fn bits(n: usize, code: u64) -> Vec<Option<bool>> {
    (0..n).map(|i| Some((code >> (n - 1 - i)) & 1 == 1)).collect()
}

pub fn connected(n: &SwitchNetwork, values: &[Option<bool>], a: NodeId, b: NodeId) -> bool {
    closure(n, values, false)[index(n, a)][index(n, b)]
}

/// Nodes tied to Z with the bridge in place.
pub fn discharged(n: &SwitchNetwork, values: &[Option<bool>]) -> BTreeSet<NodeId> {
    let reach = closure(n, values, true);
    let z = index(n, NodeId::Z);
    nodes(n)
        .into_iter()
        .enumerate()
        .filter(|&(i, _)| reach[z][i])
        .map(|(_, v)| v)
        .collect()
}

/// Internal nodes tied to none of X, Y, Z.
pub fn floating(n: &SwitchNetwork, values: &[Option<bool>]) -> Vec<NodeId> {
    let reach = closure(n, values, false);
    nodes(n)
        .into_iter()
        .enumerate()
        .filter(|&(i, v)| v.is_internal() && !(reach[i][0] || reach[i][1] || reach[i][2]))
        .map(|(_, v)| v)
        .collect()
}

/// Fewest closed switches between Z and whichever output it reaches.
pub fn depth(n: &SwitchNetwork, values: &[Option<bool>]) -> Option<usize> {
    let on = closed(n, values);
    let count = nodes(n).len();
    let z = index(n, NodeId::Z);
    let mut dist = vec![usize::MAX; count];
    dist[z] = 0;
    // Bellman-Ford with unit weights
    for _ in 0..count {
        for (d, &c) in n.devices().iter().zip(&on) {
            if !c {
                continue;
            }
            let (a, b) = (index(n, d.a), index(n, d.b));
            if dist[a] != usize::MAX && dist[a] + 1 < dist[b] {
                dist[b] = dist[a] + 1;
            }
            if dist[b] != usize::MAX && dist[b] + 1 < dist[a] {
                dist[a] = dist[b] + 1;
            }
        }
    }
    [dist[0], dist[1]].into_iter().filter(|&d| d != usize::MAX).min()
}

/// Truth value of `e` with `values[i]` for `names[i]`.
pub fn truth(e: &BoolExpr, names: &[String], values: &[Option<bool>]) -> bool {
    match e {
        BoolExpr::Lit(l) => {
            let i = names.iter().position(|x| *x == l.input).unwrap();
            let v = values[i].unwrap();
            match l.polarity {
                Polarity::Positive => v,
                Polarity::Negative => !v,
            }
        }
        BoolExpr::And(a, b) => truth(a, names, values) && truth(b, names, values),
        BoolExpr::Or(a, b) => truth(a, names, values) || truth(b, names, values),
    }
}

/// Random negation-normal-form expression over the first `inputs` letters
/// with exactly `literals` literal occurrences.
pub fn random_nnf<R: Rng>(rng: &mut R, inputs: usize, literals: usize) -> BoolExpr {
    if literals == 1 {
        let name = ((b'A' + rng.gen_range(0..inputs) as u8) as char).to_string();
        return if rng.gen_bool(0.5) {
            BoolExpr::lit(name)
        } else {
            BoolExpr::neg(name)
        };
    }
    let left = rng.gen_range(1..literals);
    let a = random_nnf(rng, inputs, left);
    let b = random_nnf(rng, inputs, literals - left);
    if rng.gen_bool(0.5) {
        BoolExpr::and(a, b)
    } else {
        BoolExpr::or(a, b)
    }
}

pub const CORPUS: [&str; 6] = [
    "A & B",
    "A | B",
    "(A | B) & (C | D)",
    "A & B & C",
    "A & (B | C)",
    "A & B | B & C | C & A",
];

/// The named corpus followed by `count` seeded random expressions with at
/// most five inputs and eight literals.
pub fn corpus(count: usize) -> Vec<BoolExpr> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x00d9_d11e);
    let mut out: Vec<BoolExpr> = CORPUS.iter().map(|s| dpdn::parse_expression(s).unwrap()).collect();
    for _ in 0..count {
        let inputs = rng.gen_range(1..=5);
        let literals = rng.gen_range(1..=8);
        out.push(random_nnf(&mut rng, inputs, literals));
    }
    out
}
