//! Acyclic directed multigraph model for multicast coding: sources,
//! receivers with demanded source sets, a canonical topological edge order
//! led by the source out-edges, unit-capacity max-flow, edge-disjoint path
//! extraction, benchmark-topology generators, and a line-based text format.

use std::collections::{HashMap, HashSet, VecDeque};

use rand::Rng;
use thiserror::Error;

/// Index of a node within a [`Network`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct NodeId(pub(crate) usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Index of an edge within a [`Network`], in canonical topological order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct EdgeId(pub(crate) usize);

impl EdgeId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NetworkError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid network: {0}")]
    Invalid(String),
    #[error("max-flow from the source to '{node}' is {found} but {need} is required")]
    FlowDeficit { node: String, found: usize, need: usize },
}

/// A receiver node together with the positions (into `Network::sources`) of
/// the sources whose data it demands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Receiver {
    pub node: NodeId,
    pub demands: Vec<usize>,
}

/// Immutable acyclic multigraph. Edges are stored in a canonical topological
/// order: every source's out-edges first (grouped by source order), then the
/// remaining edges ordered by the topological position of their tail node;
/// insertion order breaks ties. Hence every edge appears after all edges
/// incoming to its tail, and `EdgeId(0..omega)` are the source out-edges.
#[derive(Clone, Debug)]
pub struct Network {
    names: Vec<String>,
    name_index: HashMap<String, usize>,
    edges: Vec<(NodeId, NodeId)>,
    sources: Vec<NodeId>,
    receivers: Vec<Receiver>,
    in_edges: Vec<Vec<EdgeId>>,
    out_edges: Vec<Vec<EdgeId>>,
}

impl PartialEq for Network {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names
            && self.edges == other.edges
            && self.sources == other.sources
            && self.receivers == other.receivers
    }
}

impl Eq for Network {}

/// Mutable construction façade; all validation happens in [`build`].
///
/// [`build`]: NetworkBuilder::build
#[derive(Default)]
pub struct NetworkBuilder {
    names: Vec<String>,
    name_index: HashMap<String, usize>,
    edges: Vec<(usize, usize)>,
    sources: Vec<usize>,
    receivers: Vec<(usize, Option<Vec<usize>>)>,
}

impl NetworkBuilder {
    pub fn new() -> Self {
        NetworkBuilder::default()
    }

    /// Registers (or looks up) a node by name.
    pub fn node(&mut self, name: &str) -> NodeId {
        NodeId(self.intern(name))
    }

    fn intern(&mut self, name: &str) -> usize {
        if let Some(&i) = self.name_index.get(name) {
            return i;
        }
        let i = self.names.len();
        self.names.push(name.to_string());
        self.name_index.insert(name.to_string(), i);
        i
    }

    pub fn edge(&mut self, tail: &str, head: &str) -> &mut Self {
        let t = self.intern(tail);
        let h = self.intern(head);
        self.edges.push((t, h));
        self
    }

    pub fn source(&mut self, name: &str) -> &mut Self {
        let s = self.intern(name);
        self.sources.push(s);
        self
    }

    /// Adds a receiver demanding all sources.
    pub fn receiver(&mut self, name: &str) -> &mut Self {
        let r = self.intern(name);
        self.receivers.push((r, None));
        self
    }

    /// Adds a receiver demanding only the named sources.
    pub fn receiver_demanding(&mut self, name: &str, demands: &[&str]) -> &mut Self {
        let r = self.intern(name);
        let d = demands.iter().map(|n| self.intern(n)).collect();
        self.receivers.push((r, Some(d)));
        self
    }

    pub fn build(self) -> Result<Network, NetworkError> {
        let n = self.names.len();
        let invalid = |msg: String| Err(NetworkError::Invalid(msg));

        let mut source_pos: HashMap<usize, usize> = HashMap::new();
        for (i, &s) in self.sources.iter().enumerate() {
            if source_pos.insert(s, i).is_some() {
                return invalid(format!("duplicate source '{}'", self.names[s]));
            }
        }

        let mut receiver_nodes: HashSet<usize> = HashSet::new();
        let mut receivers = Vec::new();
        for (node, demands) in &self.receivers {
            if source_pos.contains_key(node) {
                return invalid(format!("receiver '{}' is also a source", self.names[*node]));
            }
            if !receiver_nodes.insert(*node) {
                return invalid(format!("duplicate receiver '{}'", self.names[*node]));
            }
            let demands = match demands {
                None => (0..self.sources.len()).collect(),
                Some(nodes) => {
                    let mut positions = Vec::new();
                    for &d in nodes {
                        match source_pos.get(&d) {
                            Some(&p) if !positions.contains(&p) => positions.push(p),
                            Some(_) => {
                                return invalid(format!(
                                    "receiver '{}' demands source '{}' twice",
                                    self.names[*node], self.names[d]
                                ))
                            }
                            None => {
                                return invalid(format!(
                                    "receiver '{}' demands '{}', which is not a source",
                                    self.names[*node], self.names[d]
                                ))
                            }
                        }
                    }
                    positions.sort_unstable();
                    positions
                }
            };
            receivers.push((*node, demands));
        }

        for &(tail, head) in &self.edges {
            if source_pos.contains_key(&head) {
                return invalid(format!("source '{}' has an incoming edge", self.names[head]));
            }
            if source_pos.contains_key(&tail) && receiver_nodes.contains(&head) {
                return invalid(format!(
                    "edge from source '{}' directly to receiver '{}'",
                    self.names[tail], self.names[head]
                ));
            }
        }

        // Topological order over nodes: repeatedly place the smallest-index
        // node with no unplaced predecessor.
        let mut indeg = vec![0usize; n];
        for &(_, head) in &self.edges {
            indeg[head] += 1;
        }
        let mut topo_pos = vec![usize::MAX; n];
        let mut placed = vec![false; n];
        for next in 0..n {
            let v = match (0..n).find(|&v| !placed[v] && indeg[v] == 0) {
                Some(v) => v,
                None => {
                    let culprit = (0..n).find(|&v| !placed[v]).expect("unplaced node exists");
                    return invalid(format!(
                        "cycle detected involving node '{}'",
                        self.names[culprit]
                    ));
                }
            };
            placed[v] = true;
            topo_pos[v] = next;
            for &(tail, head) in &self.edges {
                if tail == v {
                    indeg[head] -= 1;
                }
            }
        }

        let mut order: Vec<usize> = (0..self.edges.len()).collect();
        order.sort_by_key(|&i| {
            let (tail, _) = self.edges[i];
            match source_pos.get(&tail) {
                Some(&p) => (0, p, i),
                None => (1, topo_pos[tail], i),
            }
        });
        let edges: Vec<(NodeId, NodeId)> = order
            .iter()
            .map(|&i| (NodeId(self.edges[i].0), NodeId(self.edges[i].1)))
            .collect();

        let mut in_edges = vec![Vec::new(); n];
        let mut out_edges = vec![Vec::new(); n];
        for (i, &(tail, head)) in edges.iter().enumerate() {
            out_edges[tail.0].push(EdgeId(i));
            in_edges[head.0].push(EdgeId(i));
        }

        Ok(Network {
            names: self.names,
            name_index: self.name_index,
            edges,
            sources: self.sources.iter().map(|&s| NodeId(s)).collect(),
            receivers: receivers
                .into_iter()
                .map(|(node, demands)| Receiver { node: NodeId(node), demands })
                .collect(),
            in_edges,
            out_edges,
        })
    }
}

impl Network {
    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.names.len()).map(NodeId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edges.len()).map(EdgeId)
    }

    pub fn edge_id(&self, index: usize) -> Option<EdgeId> {
        (index < self.edges.len()).then_some(EdgeId(index))
    }

    pub fn node_name(&self, v: NodeId) -> &str {
        &self.names[v.0]
    }

    pub fn node_id(&self, name: &str) -> Option<NodeId> {
        self.name_index.get(name).map(|&i| NodeId(i))
    }

    pub fn tail(&self, e: EdgeId) -> NodeId {
        self.edges[e.0].0
    }

    pub fn head(&self, e: EdgeId) -> NodeId {
        self.edges[e.0].1
    }

    pub fn in_edges(&self, v: NodeId) -> &[EdgeId] {
        &self.in_edges[v.0]
    }

    pub fn out_edges(&self, v: NodeId) -> &[EdgeId] {
        &self.out_edges[v.0]
    }

    pub fn sources(&self) -> &[NodeId] {
        &self.sources
    }

    pub fn receivers(&self) -> &[Receiver] {
        &self.receivers
    }

    pub fn is_source(&self, v: NodeId) -> bool {
        self.sources.contains(&v)
    }

    pub fn is_source_edge(&self, e: EdgeId) -> bool {
        self.is_source(self.tail(e))
    }

    /// All source out-edges, grouped by source order; these are exactly the
    /// first `omega()` entries of the canonical edge order.
    pub fn source_out_edges(&self) -> Vec<EdgeId> {
        self.sources.iter().flat_map(|&s| self.out_edges(s).iter().copied()).collect()
    }

    /// Total number of source data units (one per source out-edge).
    pub fn omega(&self) -> usize {
        self.sources.iter().map(|&s| self.out_edges(s).len()).sum()
    }

    /// Number of data units demanded by a receiver.
    pub fn omega_t(&self, r: &Receiver) -> usize {
        r.demands.iter().map(|&p| self.out_edges(self.sources[p]).len()).sum()
    }

    /// The canonical edge order; edge storage already respects it.
    pub fn topo_edge_order(&self) -> Vec<EdgeId> {
        self.edge_ids().collect()
    }

    /// Unit-capacity max-flow from `from` into the node set `to` (flow may
    /// terminate at any of the target nodes).
    pub fn max_flow(&self, from: NodeId, to: &[NodeId]) -> usize {
        self.flow_edges(from, to).0
    }

    /// Augmenting-path max-flow; also returns which edges carry flow.
    fn flow_edges(&self, from: NodeId, to: &[NodeId]) -> (usize, Vec<bool>) {
        let sink: HashSet<NodeId> = to.iter().copied().collect();
        debug_assert!(!sink.contains(&from), "flow endpoints must differ");
        let mut used = vec![false; self.edges.len()];
        let mut flow = 0;
        loop {
            // BFS over the residual graph; parents record (edge, forward?).
            let mut parent: Vec<Option<(EdgeId, bool)>> = vec![None; self.node_count()];
            let mut visited = vec![false; self.node_count()];
            visited[from.0] = true;
            let mut queue = VecDeque::from([from]);
            let mut reached = None;
            while let Some(u) = queue.pop_front() {
                if sink.contains(&u) {
                    reached = Some(u);
                    break;
                }
                for &e in &self.out_edges[u.0] {
                    let h = self.head(e);
                    if !used[e.0] && !visited[h.0] {
                        visited[h.0] = true;
                        parent[h.0] = Some((e, true));
                        queue.push_back(h);
                    }
                }
                for &e in &self.in_edges[u.0] {
                    let t = self.tail(e);
                    if used[e.0] && !visited[t.0] {
                        visited[t.0] = true;
                        parent[t.0] = Some((e, false));
                        queue.push_back(t);
                    }
                }
            }
            let Some(mut v) = reached else { break };
            while v != from {
                let (e, forward) = parent[v.0].expect("augmenting path is connected");
                used[e.0] = forward;
                v = if forward { self.tail(e) } else { self.head(e) };
            }
            flow += 1;
        }
        (flow, used)
    }

    /// The unique source of a single-source network.
    pub fn single_source(&self) -> Result<NodeId, NetworkError> {
        match self.sources[..] {
            [s] => Ok(s),
            _ => Err(NetworkError::Invalid(format!(
                "expected a single source, found {}",
                self.sources.len()
            ))),
        }
    }

    /// `omega()` pairwise edge-disjoint source-to-`t` paths. Each path starts
    /// at a distinct source out-edge (in edge order) and ends at a distinct
    /// in-edge of `t`.
    pub fn edge_disjoint_paths(&self, t: NodeId) -> Result<Vec<Vec<EdgeId>>, NetworkError> {
        let s = self.single_source()?;
        let omega = self.omega();
        let (flow, mut used) = self.flow_edges(s, &[t]);
        if flow < omega {
            return Err(NetworkError::FlowDeficit {
                node: self.node_name(t).to_string(),
                found: flow,
                need: omega,
            });
        }
        let mut paths = Vec::with_capacity(omega);
        for first in self.source_out_edges() {
            assert!(used[first.index()], "every source out-edge carries flow");
            used[first.index()] = false;
            let mut path = vec![first];
            let mut at = self.head(first);
            while at != t {
                // Flow conservation guarantees an unconsumed flow-carrying
                // out-edge at every intermediate node of a path.
                let e = *self.out_edges(at).iter().find(|e| used[e.index()]).expect(
                    "flow conservation provides an outgoing flow edge on every partial path",
                );
                used[e.index()] = false;
                path.push(e);
                at = self.head(e);
            }
            paths.push(path);
        }
        Ok(paths)
    }

    /// Checks the single-source multicast contract: one source, every
    /// receiver demands it, and the max-flow to every receiver is `omega()`.
    pub fn require_multicast(&self) -> Result<(), NetworkError> {
        let s = self.single_source().map_err(|_| {
            NetworkError::Invalid(format!(
                "multicast requires a single source, found {}",
                self.sources.len()
            ))
        })?;
        if self.receivers.is_empty() {
            return Err(NetworkError::Invalid("multicast requires at least one receiver".into()));
        }
        let omega = self.omega();
        for r in &self.receivers {
            if r.demands != [0] {
                return Err(NetworkError::Invalid(format!(
                    "receiver '{}' does not demand the single source",
                    self.node_name(r.node)
                )));
            }
            let flow = self.max_flow(s, &[r.node]);
            if flow < omega {
                return Err(NetworkError::FlowDeficit {
                    node: self.node_name(r.node).to_string(),
                    found: flow,
                    need: omega,
                });
            }
        }
        Ok(())
    }

    pub fn is_multicast(&self) -> bool {
        self.require_multicast().is_ok()
    }

    /// Parses the line-based network format. Directives: `node <name>`,
    /// `edge <tail> <head>`, `source <name>`,
    /// `receiver <name> [demands <source>...]`. Blank lines and `#` comments
    /// are ignored. If any `node` line is present, every name used elsewhere
    /// must be declared by one.
    pub fn parse(text: &str) -> Result<Network, NetworkError> {
        let mut declared: HashSet<&str> = HashSet::new();
        for line in text.lines() {
            let mut tokens = line.split_whitespace();
            if tokens.next() == Some("node") {
                declared.extend(tokens.next());
            }
        }
        let strict = !declared.is_empty();

        let mut builder = NetworkBuilder::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let syntax =
                |message: String| Err(NetworkError::Syntax { line, message });
            let text = raw.trim();
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            let tokens: Vec<&str> = text.split_whitespace().collect();
            let check = |name: &str| -> Result<(), NetworkError> {
                if strict && !declared.contains(name) {
                    return Err(NetworkError::Syntax {
                        line,
                        message: format!("unknown node '{name}'"),
                    });
                }
                Ok(())
            };
            match tokens[0] {
                "node" => match tokens[1..] {
                    [name] => {
                        builder.node(name);
                    }
                    _ => return syntax("expected: node <name>".into()),
                },
                "edge" => match tokens[1..] {
                    [tail, head] => {
                        check(tail)?;
                        check(head)?;
                        builder.edge(tail, head);
                    }
                    _ => return syntax("expected: edge <tail> <head>".into()),
                },
                "source" => match tokens[1..] {
                    [name] => {
                        check(name)?;
                        builder.source(name);
                    }
                    _ => return syntax("expected: source <name>".into()),
                },
                "receiver" => match &tokens[1..] {
                    [name] => {
                        check(name)?;
                        builder.receiver(name);
                    }
                    [name, "demands", demands @ ..] if !demands.is_empty() => {
                        check(name)?;
                        for d in demands {
                            check(d)?;
                        }
                        builder.receiver_demanding(name, demands);
                    }
                    _ => {
                        return syntax(
                            "expected: receiver <name> [demands <source>...]".into(),
                        )
                    }
                },
                other => return syntax(format!("unknown directive '{other}'")),
            }
        }
        builder.build()
    }

    /// Serializes to the text format accepted by [`Network::parse`];
    /// round-trips to a structurally equal network.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for name in &self.names {
            out.push_str(&format!("node {name}\n"));
        }
        for &s in &self.sources {
            out.push_str(&format!("source {}\n", self.node_name(s)));
        }
        for &(tail, head) in &self.edges {
            out.push_str(&format!("edge {} {}\n", self.node_name(tail), self.node_name(head)));
        }
        let all: Vec<usize> = (0..self.sources.len()).collect();
        for r in &self.receivers {
            if r.demands == all {
                out.push_str(&format!("receiver {}\n", self.node_name(r.node)));
            } else {
                let demands: Vec<&str> =
                    r.demands.iter().map(|&p| self.node_name(self.sources[p])).collect();
                out.push_str(&format!(
                    "receiver {} demands {}\n",
                    self.node_name(r.node),
                    demands.join(" ")
                ));
            }
        }
        out
    }
}

/// Three nodes s -> r -> t with two parallel edges on each hop; the shape
/// behind the hand-checked fractional-code fixtures.
pub fn gen_example1() -> Network {
    let mut b = NetworkBuilder::new();
    b.source("s").receiver("t");
    b.edge("s", "r").edge("s", "r").edge("r", "t").edge("r", "t");
    b.build().expect("generator produces a valid network")
}

/// The classical butterfly: two receivers sharing one bottleneck edge.
pub fn gen_butterfly() -> Network {
    let mut b = NetworkBuilder::new();
    b.source("s").receiver("t1").receiver("t2");
    b.edge("s", "n1").edge("s", "n2");
    b.edge("n1", "m1").edge("n2", "m1");
    b.edge("m1", "m2");
    b.edge("n1", "t1").edge("n2", "t2");
    b.edge("m2", "t1").edge("m2", "t2");
    b.build().expect("generator produces a valid network")
}

/// The (n, 2)-combination network: a source feeding a relay over two parallel
/// edges, n middle nodes, and one receiver per pair of middle nodes.
pub fn gen_combination(n: usize) -> Network {
    assert!(n >= 2, "combination network needs n >= 2");
    let mut b = NetworkBuilder::new();
    b.source("s");
    b.edge("s", "r").edge("s", "r");
    for j in 1..=n {
        b.edge("r", &format!("u{j}"));
    }
    let mut t = 0;
    for i in 1..=n {
        for j in i + 1..=n {
            t += 1;
            let name = format!("t{t}");
            b.receiver(&name);
            b.edge(&format!("u{i}"), &name);
            b.edge(&format!("u{j}"), &name);
        }
    }
    b.build().expect("generator produces a valid network")
}

/// Five-layer swirl topology: the source feeds `omega` layer-2 nodes; layer-2
/// node i feeds layer-3 nodes i and i+1 (mod omega); each layer-3 node has
/// two layer-4 children; one receiver is attached for every omega-subset of
/// layer-4 nodes to which the max-flow from the source is omega.
pub fn gen_swirl(omega: usize) -> Network {
    assert!(omega >= 3, "swirl network needs omega >= 3");
    let base = {
        let mut b = NetworkBuilder::new();
        swirl_core(&mut b, omega);
        b.build().expect("generator produces a valid network")
    };
    let s = base.node_id("s").expect("source exists");

    let mut b = NetworkBuilder::new();
    swirl_core(&mut b, omega);
    let mut t = 0;
    for subset in k_subsets(2 * omega, omega) {
        let nodes: Vec<NodeId> =
            subset.iter().map(|&c| base.node_id(&format!("c{c}")).expect("layer-4 node")).collect();
        if base.max_flow(s, &nodes) == omega {
            t += 1;
            let name = format!("t{t}");
            b.receiver(&name);
            for &c in &subset {
                b.edge(&format!("c{c}"), &name);
            }
        }
    }
    b.build().expect("generator produces a valid network")
}

fn swirl_core(b: &mut NetworkBuilder, omega: usize) {
    b.source("s");
    for i in 0..omega {
        b.edge("s", &format!("a{i}"));
    }
    for i in 0..omega {
        b.edge(&format!("a{i}"), &format!("b{i}"));
        b.edge(&format!("a{i}"), &format!("b{}", (i + 1) % omega));
    }
    for i in 0..omega {
        b.edge(&format!("b{i}"), &format!("c{}", 2 * i));
        b.edge(&format!("b{i}"), &format!("c{}", 2 * i + 1));
    }
}

/// All k-element subsets of {0, .., n-1} in lexicographic order.
pub(crate) fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        // Advance the rightmost index that can still move.
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] != i + n - k {
                break;
            }
        }
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Random layered DAG for property tests: a single source feeding the first
/// layer, Bernoulli(density) edges from earlier layers to later ones (with a
/// guaranteed in-edge per node), receivers on the last layer.
pub fn gen_random_dag<R: Rng>(rng: &mut R, layers: usize, width: usize, density: f64) -> Network {
    assert!(layers >= 2 && width >= 1);
    let mut b = NetworkBuilder::new();
    b.source("s");
    let name = |layer: usize, i: usize| format!("n{layer}_{i}");
    for i in 0..width {
        b.edge("s", &name(1, i));
    }
    for layer in 2..=layers {
        for i in 0..width {
            let mut fed = false;
            for from_layer in 1..layer {
                for j in 0..width {
                    if rng.gen_bool(density) {
                        b.edge(&name(from_layer, j), &name(layer, i));
                        fed = true;
                    }
                }
            }
            if !fed {
                let j = rng.gen_range(0..width);
                b.edge(&name(layer - 1, j), &name(layer, i));
            }
        }
    }
    for i in 0..width {
        b.receiver(&name(layers, i));
    }
    b.build().expect("generator produces a valid network")
}
