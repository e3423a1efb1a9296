// SPDX-License-Identifier: Apache-2.0

//! Differential pull-down networks as switch graphs.
//!
//! A [`SwitchNetwork`] is an undirected multigraph over the terminals `X`
//! (true output), `Y` (false output), `Z` (common node) and dense internal
//! nodes `W0..Wk-1`. Each edge is an ideal bidirectional switch that
//! conducts when the rail selected by its gate literal is high.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::assign::{InputState, PartialAssignment};
use crate::boolexpr::{complement, input_set, is_identifier, BoolExpr, Literal, Polarity};

/// A network node. The derived order (`X < Y < W0 < W1 < .. < Z`) is the
/// canonical order used for device sorting and emission.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeId {
    X,
    Y,
    Internal(usize),
    Z,
}

impl NodeId {
    pub fn is_internal(self) -> bool {
        matches!(self, NodeId::Internal(_))
    }

    pub fn is_output(self) -> bool {
        matches!(self, NodeId::X | NodeId::Y)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeId::X => f.write_str("X"),
            NodeId::Y => f.write_str("Y"),
            NodeId::Z => f.write_str("Z"),
            NodeId::Internal(k) => write!(f, "W{k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid node reference '{0}' (expected X, Y, Z or W<k>)")]
pub struct NodeParseError(pub String);

impl FromStr for NodeId {
    type Err = NodeParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "X" => Ok(NodeId::X),
            "Y" => Ok(NodeId::Y),
            "Z" => Ok(NodeId::Z),
            _ => {
                let digits = s.strip_prefix('W').ok_or_else(|| NodeParseError(s.into()))?;
                // reject "W", "W+1", "W01"
                if digits.is_empty()
                    || !digits.bytes().all(|b| b.is_ascii_digit())
                    || (digits.len() > 1 && digits.starts_with('0'))
                {
                    return Err(NodeParseError(s.into()));
                }
                digits
                    .parse()
                    .map(NodeId::Internal)
                    .map_err(|_| NodeParseError(s.into()))
            }
        }
    }
}

impl Serialize for NodeId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for NodeId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Synthesized,
    PassGate,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Device {
    pub id: String,
    pub a: NodeId,
    pub b: NodeId,
    pub gate: Literal,
    pub origin: Origin,
}

impl Device {
    pub fn touches(&self, node: NodeId) -> bool {
        self.a == node || self.b == node
    }

    /// The endpoint opposite `node`; panics if the device does not touch it.
    pub fn other(&self, node: NodeId) -> NodeId {
        if self.a == node {
            self.b
        } else if self.b == node {
            self.a
        } else {
            panic!("device {} does not touch {node}", self.id)
        }
    }

    /// Endpoints as (min, max) in canonical node order.
    pub fn span(&self) -> (NodeId, NodeId) {
        if self.a <= self.b {
            (self.a, self.b)
        } else {
            (self.b, self.a)
        }
    }

    pub fn is_closed(&self, state: InputState) -> bool {
        state.rail(self.gate.polarity)
    }
}

impl fmt::Display for Device {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}–{}–{}", self.id, self.a, self.gate, self.b)
    }
}

/// Direction of a device within a series-parallel derivation: `upper` lies
/// on the output side, `lower` on the `Z` side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Orientation {
    pub upper: NodeId,
    pub lower: NodeId,
}

/// Structural record left by a series-parallel construction: one
/// orientation per device, aligned with the device list. Directed paths
/// from `X` or `Y` to `Z` along these orientations are the network's
/// structural discharge paths.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpDerivation {
    pub orientation: Vec<Orientation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetworkError {
    #[error("'{0}' is not a valid identifier")]
    InvalidName(String),
    #[error("input '{0}' is listed more than once")]
    DuplicateInput(String),
    #[error("device '{device}' is gated by '{input}', which is not a network input")]
    UnknownGateInput { device: String, input: String },
    #[error("device '{0}' connects a node to itself")]
    SelfLoop(String),
    #[error("device '{device}' references {node}, but the network has {internal_count} internal nodes")]
    DanglingNode {
        device: String,
        node: NodeId,
        internal_count: usize,
    },
    #[error("device id '{0}' is used more than once")]
    DuplicateDeviceId(String),
    #[error("device ids must be nonempty")]
    EmptyDeviceId,
    #[error("derivation has {found} orientations for {expected} devices, or an orientation does not match its device")]
    DerivationMismatch { expected: usize, found: usize },
    #[error("malformed network: {}", format_lints(.0))]
    Malformed(Vec<Lint>),
}

fn format_lints(lints: &[Lint]) -> String {
    lints.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// Structural findings that do not prevent construction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Lint {
    /// An internal node with fewer than two incident devices.
    LowDegree { node: NodeId, degree: usize },
    /// A node not reachable from `Z` even with every switch closed.
    Unreachable { node: NodeId },
    /// Two devices with the same endpoints and gate.
    ParallelDuplicate { first: String, second: String },
}

impl Lint {
    /// Fatal lints make the network malformed; duplicates only warn.
    pub fn is_fatal(&self) -> bool {
        !matches!(self, Lint::ParallelDuplicate { .. })
    }
}

impl fmt::Display for Lint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lint::LowDegree { node, degree } => write!(f, "internal node {node} has degree {degree}"),
            Lint::Unreachable { node } => write!(f, "node {node} is unreachable from Z"),
            Lint::ParallelDuplicate { first, second } => {
                write!(f, "devices {first} and {second} are parallel duplicates")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SwitchNetwork {
    name: String,
    inputs: Vec<String>,
    internal_count: usize,
    devices: Vec<Device>,
    derivation: Option<SpDerivation>,
}

impl SwitchNetwork {
    /// Builds a network, checking every hard invariant. Degree and
    /// reachability problems are reported by [`SwitchNetwork::lints`] instead.
    pub fn new(
        name: impl Into<String>,
        inputs: Vec<String>,
        internal_count: usize,
        devices: Vec<Device>,
    ) -> Result<Self, NetworkError> {
        let name = name.into();
        if !is_identifier(&name) {
            return Err(NetworkError::InvalidName(name));
        }
        for (i, input) in inputs.iter().enumerate() {
            if !is_identifier(input) {
                return Err(NetworkError::InvalidName(input.clone()));
            }
            if inputs[..i].contains(input) {
                return Err(NetworkError::DuplicateInput(input.clone()));
            }
        }
        let mut ids = BTreeSet::new();
        for d in &devices {
            if d.id.is_empty() {
                return Err(NetworkError::EmptyDeviceId);
            }
            if !ids.insert(d.id.as_str()) {
                return Err(NetworkError::DuplicateDeviceId(d.id.clone()));
            }
            if d.a == d.b {
                return Err(NetworkError::SelfLoop(d.id.clone()));
            }
            for node in [d.a, d.b] {
                if let NodeId::Internal(k) = node {
                    if k >= internal_count {
                        return Err(NetworkError::DanglingNode {
                            device: d.id.clone(),
                            node,
                            internal_count,
                        });
                    }
                }
            }
            if !inputs.contains(&d.gate.input) {
                return Err(NetworkError::UnknownGateInput {
                    device: d.id.clone(),
                    input: d.gate.input.clone(),
                });
            }
        }
        Ok(SwitchNetwork {
            name,
            inputs,
            internal_count,
            devices,
            derivation: None,
        })
    }

    /// Attaches a series-parallel derivation; each orientation must cover
    /// exactly its device's endpoints.
    pub fn with_derivation(mut self, derivation: SpDerivation) -> Result<Self, NetworkError> {
        let ok = derivation.orientation.len() == self.devices.len()
            && self
                .devices
                .iter()
                .zip(&derivation.orientation)
                .all(|(d, o)| (d.a == o.upper && d.b == o.lower) || (d.b == o.upper && d.a == o.lower));
        if !ok {
            return Err(NetworkError::DerivationMismatch {
                expected: self.devices.len(),
                found: derivation.orientation.len(),
            });
        }
        self.derivation = Some(derivation);
        Ok(self)
    }

    /// Drops the derivation, e.g. before comparing against a parsed netlist.
    pub fn detached(mut self) -> Self {
        self.derivation = None;
        self
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Result<Self, NetworkError> {
        let name = name.into();
        if !is_identifier(&name) {
            return Err(NetworkError::InvalidName(name));
        }
        self.name = name;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn internal_count(&self) -> usize {
        self.internal_count
    }

    pub fn devices(&self) -> &[Device] {
        &self.devices
    }

    pub fn derivation(&self) -> Option<&SpDerivation> {
        self.derivation.as_ref()
    }

    pub fn device(&self, id: &str) -> Option<&Device> {
        self.devices.iter().find(|d| d.id == id)
    }

    pub fn pass_gate_count(&self) -> usize {
        self.devices.iter().filter(|d| d.origin == Origin::PassGate).count()
    }

    /// `X`, `Y`, `W0..`, `Z`.
    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        [NodeId::X, NodeId::Y]
            .into_iter()
            .chain((0..self.internal_count).map(NodeId::Internal))
            .chain(std::iter::once(NodeId::Z))
    }

    pub fn node_count(&self) -> usize {
        self.internal_count + 3
    }

    /// Dense index: X=0, Y=1, Z=2, Wk=3+k.
    pub(crate) fn node_index(node: NodeId) -> usize {
        match node {
            NodeId::X => 0,
            NodeId::Y => 1,
            NodeId::Z => 2,
            NodeId::Internal(k) => 3 + k,
        }
    }

    pub(crate) fn node_at(index: usize) -> NodeId {
        match index {
            0 => NodeId::X,
            1 => NodeId::Y,
            2 => NodeId::Z,
            k => NodeId::Internal(k - 3),
        }
    }

    pub fn lints(&self) -> Vec<Lint> {
        let n = self.node_count();
        let mut out = Vec::new();
        let mut degree = vec![0usize; n];
        let mut uf = UnionFind::<usize>::new(n);
        for d in &self.devices {
            let (a, b) = (Self::node_index(d.a), Self::node_index(d.b));
            degree[a] += 1;
            degree[b] += 1;
            uf.union(a, b);
        }
        for k in 0..self.internal_count {
            let deg = degree[3 + k];
            if deg < 2 {
                out.push(Lint::LowDegree {
                    node: NodeId::Internal(k),
                    degree: deg,
                });
            }
        }
        for node in self.nodes() {
            if !uf.equiv(Self::node_index(node), Self::node_index(NodeId::Z)) {
                out.push(Lint::Unreachable { node });
            }
        }
        for (i, d) in self.devices.iter().enumerate() {
            for e in &self.devices[i + 1..] {
                if d.span() == e.span() && d.gate == e.gate {
                    out.push(Lint::ParallelDuplicate {
                        first: d.id.clone(),
                        second: e.id.clone(),
                    });
                }
            }
        }
        out
    }

    pub fn is_malformed(&self) -> bool {
        self.lints().iter().any(Lint::is_fatal)
    }
}

/// Switch graph with inputs resolved to indices, for fast repeated
/// connectivity queries.
#[derive(Debug, Clone)]
pub(crate) struct RailGraph {
    pub node_count: usize,
    /// (node a, node b, input index, polarity)
    pub edges: Vec<(usize, usize, usize, Polarity)>,
}

impl RailGraph {
    pub fn new(n: &SwitchNetwork) -> Self {
        let edges = n
            .devices
            .iter()
            .map(|d| {
                let input = n
                    .inputs
                    .iter()
                    .position(|i| *i == d.gate.input)
                    .expect("gate inputs are validated at construction");
                (
                    SwitchNetwork::node_index(d.a),
                    SwitchNetwork::node_index(d.b),
                    input,
                    d.gate.polarity,
                )
            })
            .collect();
        RailGraph {
            node_count: n.node_count(),
            edges,
        }
    }

    pub fn is_closed(&self, edge: usize, states: &[InputState]) -> bool {
        let (_, _, input, polarity) = self.edges[edge];
        states[input].rail(polarity)
    }

    /// Union-find over closed edges, optionally with an extra X–Y edge.
    pub fn components(&self, states: &[InputState], bridge: bool) -> UnionFind<usize> {
        let mut uf = UnionFind::new(self.node_count);
        for (i, &(a, b, _, _)) in self.edges.iter().enumerate() {
            if self.is_closed(i, states) {
                uf.union(a, b);
            }
        }
        if bridge {
            uf.union(0, 1);
        }
        uf
    }

    /// Shortest closed path from `from` to `to` as node indices.
    pub fn shortest_path(&self, states: &[InputState], from: usize, to: usize) -> Option<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.node_count];
        for (i, &(a, b, _, _)) in self.edges.iter().enumerate() {
            if self.is_closed(i, states) {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        let mut prev = vec![usize::MAX; self.node_count];
        let mut seen = vec![false; self.node_count];
        let mut queue = VecDeque::from([from]);
        seen[from] = true;
        while let Some(v) = queue.pop_front() {
            if v == to {
                let mut path = vec![to];
                let mut cur = to;
                while cur != from {
                    cur = prev[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for &u in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    prev[u] = v;
                    queue.push_back(u);
                }
            }
        }
        None
    }
}

pub(crate) fn states_for(n: &SwitchNetwork, a: &PartialAssignment) -> Vec<InputState> {
    n.inputs
        .iter()
        .map(|i| a.get(i).expect("assignment covers every network input"))
        .collect()
}

/// Textbook differential network: `f` in series/parallel between `X` and
/// `Z`, `!f` between `Y` and `Z`, branches sharing no internal node.
pub fn build_genuine(f: &BoolExpr) -> SwitchNetwork {
    struct Builder {
        devices: Vec<Device>,
        orientation: Vec<Orientation>,
        internal: usize,
    }
    impl Builder {
        fn realize(&mut self, e: &BoolExpr, top: NodeId, bottom: NodeId) {
            match e {
                BoolExpr::Lit(l) => {
                    self.devices.push(Device {
                        id: format!("M{}", self.devices.len()),
                        a: top,
                        b: bottom,
                        gate: l.clone(),
                        origin: Origin::Synthesized,
                    });
                    self.orientation.push(Orientation {
                        upper: top,
                        lower: bottom,
                    });
                }
                BoolExpr::And(x, y) => {
                    let mid = NodeId::Internal(self.internal);
                    self.internal += 1;
                    self.realize(x, top, mid);
                    self.realize(y, mid, bottom);
                }
                BoolExpr::Or(x, y) => {
                    self.realize(x, top, bottom);
                    self.realize(y, top, bottom);
                }
            }
        }
    }
    let mut b = Builder {
        devices: Vec::new(),
        orientation: Vec::new(),
        internal: 0,
    };
    b.realize(f, NodeId::X, NodeId::Z);
    b.realize(&complement(f), NodeId::Y, NodeId::Z);
    SwitchNetwork::new("dpdn", input_set(f), b.internal, b.devices)
        .and_then(|n| {
            n.with_derivation(SpDerivation {
                orientation: b.orientation,
            })
        })
        .expect("series-parallel realization is well-formed")
}

/// Ids of devices whose gate rail is high under `a`.
pub fn closed_edges(n: &SwitchNetwork, a: &PartialAssignment) -> BTreeSet<String> {
    n.devices
        .iter()
        .filter(|d| d.is_closed(a.get(&d.gate.input).expect("assignment covers gate input")))
        .map(|d| d.id.clone())
        .collect()
}

/// Connected components over closed devices. Each component is sorted and
/// components are ordered by their smallest node.
pub fn conducting_components(n: &SwitchNetwork, a: &PartialAssignment) -> Vec<Vec<NodeId>> {
    let graph = RailGraph::new(n);
    let uf = graph.components(&states_for(n, a), false);
    let mut groups: Vec<Vec<NodeId>> = Vec::new();
    let mut root_slot = vec![usize::MAX; n.node_count()];
    for node in n.nodes() {
        let root = uf.find(SwitchNetwork::node_index(node));
        if root_slot[root] == usize::MAX {
            root_slot[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_slot[root]].push(node);
    }
    for g in &mut groups {
        g.sort();
    }
    groups.sort();
    groups
}

/// Colour-refinement signature: own colour and sorted (gate, origin,
/// neighbour colour) triples.
type Signature<'a> = (usize, Vec<(&'a Literal, Origin, usize)>);

/// Canonical form: internal nodes renumbered in breadth-first order from
/// `Z` over the all-closed graph, endpoints stored as (min, max), devices
/// sorted by (min, max, gate, origin) and renamed `M0..`.
///
/// Ties between neighbours are broken by a color-refinement class of each
/// node, so isomorphic networks map to the same form whenever refinement
/// separates their non-automorphic nodes.
pub fn renumber(n: &SwitchNetwork) -> Result<SwitchNetwork, NetworkError> {
    let fatal: Vec<Lint> = n.lints().into_iter().filter(Lint::is_fatal).collect();
    if !fatal.is_empty() {
        return Err(NetworkError::Malformed(fatal));
    }
    let count = n.node_count();
    let mut incident: Vec<Vec<(usize, usize)>> = vec![Vec::new(); count];
    for (i, d) in n.devices.iter().enumerate() {
        let (a, b) = (SwitchNetwork::node_index(d.a), SwitchNetwork::node_index(d.b));
        incident[a].push((i, b));
        incident[b].push((i, a));
    }

    let mut color: Vec<usize> = (0..count).map(|i| i.min(3)).collect();
    let mut classes = color.iter().collect::<BTreeSet<_>>().len();
    loop {
        let signatures: Vec<Signature> = (0..count)
            .map(|v| {
                let mut neigh: Vec<_> = incident[v]
                    .iter()
                    .map(|&(dev, u)| (&n.devices[dev].gate, n.devices[dev].origin, color[u]))
                    .collect();
                neigh.sort();
                (color[v], neigh)
            })
            .collect();
        let mut distinct = signatures.clone();
        distinct.sort();
        distinct.dedup();
        let refined: Vec<usize> = signatures
            .iter()
            .map(|s| distinct.binary_search(s).expect("signature present"))
            .collect();
        color = refined;
        if distinct.len() == classes {
            break;
        }
        classes = distinct.len();
    }

    let z = SwitchNetwork::node_index(NodeId::Z);
    let mut relabel = vec![None; count];
    let mut visited = vec![false; count];
    let mut queue = VecDeque::from([z]);
    visited[z] = true;
    let mut next = 0;
    while let Some(v) = queue.pop_front() {
        let mut order: Vec<_> = incident[v]
            .iter()
            .map(|&(dev, u)| (&n.devices[dev].gate, n.devices[dev].origin, color[u], u))
            .collect();
        order.sort();
        for (_, _, _, u) in order {
            if !visited[u] {
                visited[u] = true;
                if u >= 3 {
                    relabel[u] = Some(next);
                    next += 1;
                }
                queue.push_back(u);
            }
        }
    }
    let map = |node: NodeId| match node {
        NodeId::Internal(_) => {
            NodeId::Internal(relabel[SwitchNetwork::node_index(node)].expect("reachability checked above"))
        }
        other => other,
    };

    let mut entries: Vec<(Device, Option<Orientation>)> = n
        .devices
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let (a, b) = (map(d.a), map(d.b));
            let device = Device {
                id: d.id.clone(),
                a: a.min(b),
                b: a.max(b),
                gate: d.gate.clone(),
                origin: d.origin,
            };
            let orientation = n.derivation.as_ref().map(|der| Orientation {
                upper: map(der.orientation[i].upper),
                lower: map(der.orientation[i].lower),
            });
            (device, orientation)
        })
        .collect();
    entries.sort_by(|(x, _), (y, _)| (x.a, x.b, &x.gate, x.origin).cmp(&(y.a, y.b, &y.gate, y.origin)));
    let mut devices = Vec::with_capacity(entries.len());
    let mut orientation = Vec::with_capacity(entries.len());
    for (k, (mut d, o)) in entries.into_iter().enumerate() {
        d.id = format!("M{k}");
        devices.push(d);
        orientation.extend(o);
    }
    let mut out = SwitchNetwork::new(n.name.clone(), n.inputs.clone(), n.internal_count, devices)?;
    if n.derivation.is_some() {
        out = out.with_derivation(SpDerivation { orientation })?;
    }
    Ok(out)
}
