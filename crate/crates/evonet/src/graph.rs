//! Directed multigraph with degree bookkeeping and SNAP edge-list ingestion.
//!
//! Nodes are densely numbered in appearance order; ids of nodes appended
//! during evolution strictly exceed all seed-node ids. Parallel edges are
//! kept (the beta attachment scheme can repeat a pair); self-loops are
//! rejected. Once construction stops the graph is read-only for scoring and
//! estimation, so `&DirectedGraph` can be shared freely across workers.

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;

use thiserror::Error;

/// Dense node identifier, assigned in appearance order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Whether a node belongs to the seed network or was appended by attachment.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum NodeOrigin {
    Seed,
    Attached,
}

#[derive(Clone, Debug)]
struct NodeMeta {
    step: usize,
    origin: NodeOrigin,
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("self-loop {0} -> {0} rejected")]
    SelfLoop(NodeId),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Mutable directed multigraph with appearance-time-ordered nodes.
#[derive(Clone, Debug, Default)]
pub struct DirectedGraph {
    nodes: Vec<NodeMeta>,
    edges: Vec<(NodeId, NodeId)>,
    out_adj: Vec<Vec<NodeId>>,
    in_adj: Vec<Vec<NodeId>>,
}

impl DirectedGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Append a fresh node; the returned id equals the previous node count.
    /// Nodes added at step 0 are seed nodes, later ones count as attached.
    pub fn add_node(&mut self, step: usize) -> NodeId {
        let id = NodeId(self.nodes.len());
        self.nodes.push(NodeMeta {
            step,
            origin: if step == 0 { NodeOrigin::Seed } else { NodeOrigin::Attached },
        });
        self.out_adj.push(Vec::new());
        self.in_adj.push(Vec::new());
        id
    }

    /// Append the directed edge `src -> dst`, updating degree counters.
    pub fn add_edge(&mut self, src: NodeId, dst: NodeId) -> Result<(), GraphError> {
        if src == dst {
            return Err(GraphError::SelfLoop(src));
        }
        for v in [src, dst] {
            if v.0 >= self.nodes.len() {
                return Err(GraphError::UnknownNode(v));
            }
        }
        self.edges.push((src, dst));
        self.out_adj[src.0].push(dst);
        self.in_adj[dst.0].push(src);
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> (NodeId, NodeId) {
        self.edges[i]
    }

    pub fn in_degree(&self, v: NodeId) -> usize {
        self.in_adj[v.0].len()
    }

    pub fn out_degree(&self, v: NodeId) -> usize {
        self.out_adj[v.0].len()
    }

    /// In-neighbors with multiplicity (one entry per parallel edge).
    pub fn in_neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.in_adj[v.0]
    }

    /// Out-neighbors with multiplicity.
    pub fn out_neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.out_adj[v.0]
    }

    pub fn origin(&self, v: NodeId) -> NodeOrigin {
        self.nodes[v.0].origin
    }

    pub fn appearance_step(&self, v: NodeId) -> usize {
        self.nodes[v.0].step
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).map(NodeId)
    }

    /// Undirected neighbor sets, parallel edges collapsed. Used by path
    /// enumeration and community detection.
    pub fn undirected_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); self.nodes.len()];
        for &(s, d) in &self.edges {
            adj[s.0].push(d.0);
            adj[d.0].push(s.0);
        }
        for nb in &mut adj {
            nb.sort_unstable();
            nb.dedup();
        }
        adj
    }

    /// Serialize as SNAP edge list: one `src\tdst` line per edge in insertion
    /// order. Isolated nodes are not representable in this format.
    pub fn write_snap<W: Write>(&self, mut w: W) -> Result<(), GraphError> {
        for &(s, d) in &self.edges {
            writeln!(w, "{}\t{}", s.0, d.0)?;
        }
        Ok(())
    }

    /// Induced subgraph on `keep` (dense re-indexing by `keep` order).
    /// Returns the subgraph and the original id of each new node.
    pub fn induced_subgraph(&self, keep: &[NodeId]) -> (DirectedGraph, Vec<NodeId>) {
        let mut map: HashMap<NodeId, NodeId> = HashMap::with_capacity(keep.len());
        let mut g = DirectedGraph::new();
        for &v in keep {
            let nv = g.add_node(0);
            map.insert(v, nv);
        }
        for &(s, d) in &self.edges {
            if let (Some(&ns), Some(&nd)) = (map.get(&s), map.get(&d)) {
                g.add_edge(ns, nd).expect("no self-loops in source graph");
            }
        }
        (g, keep.to_vec())
    }

    /// Nodes within undirected distance `radius` of `root`, in BFS order.
    pub fn bfs_ball(&self, root: NodeId, radius: usize) -> Vec<NodeId> {
        let adj = self.undirected_adjacency();
        let mut dist = vec![usize::MAX; self.nodes.len()];
        let mut order = vec![root];
        dist[root.0] = 0;
        let mut head = 0;
        while head < order.len() {
            let u = order[head];
            head += 1;
            if dist[u.0] == radius {
                continue;
            }
            for &v in &adj[u.0] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u.0] + 1;
                    order.push(NodeId(v));
                }
            }
        }
        order
    }
}

/// Outcome of [`ingest_snap`]: the dense graph plus the id bookkeeping.
#[derive(Debug)]
pub struct IngestReport {
    pub graph: DirectedGraph,
    /// Original id of each dense node, indexed by `NodeId`.
    pub original_ids: Vec<u64>,
    /// Map original id -> dense id.
    pub id_map: HashMap<u64, NodeId>,
    /// Count of skipped self-loop edges.
    pub self_loops_skipped: usize,
}

/// Read a SNAP edge list ("FromNodeId ToNodeId" per line, `#` comments).
/// Nodes are densely re-indexed in first-appearance order; self-loops are
/// skipped and counted.
pub fn ingest_snap(path: &Path) -> Result<IngestReport, GraphError> {
    let file = std::fs::File::open(path)?;
    ingest_snap_reader(std::io::BufReader::new(file))
}

/// Same as [`ingest_snap`] but from any buffered reader.
pub fn ingest_snap_reader<R: BufRead>(reader: R) -> Result<IngestReport, GraphError> {
    let mut graph = DirectedGraph::new();
    let mut id_map: HashMap<u64, NodeId> = HashMap::new();
    let mut original_ids: Vec<u64> = Vec::new();
    let mut self_loops = 0usize;

    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let src: u64 = parse_field(parts.next(), lineno)?;
        let dst: u64 = parse_field(parts.next(), lineno)?;
        if parts.next().is_some() {
            return Err(GraphError::Parse {
                line: lineno,
                msg: "expected exactly two columns".into(),
            });
        }
        if src == dst {
            self_loops += 1;
            continue;
        }
        let s = dense_id(&mut graph, &mut id_map, &mut original_ids, src);
        let d = dense_id(&mut graph, &mut id_map, &mut original_ids, dst);
        graph.add_edge(s, d).expect("self-loops filtered above");
    }

    Ok(IngestReport {
        graph,
        original_ids,
        id_map,
        self_loops_skipped: self_loops,
    })
}

fn parse_field(field: Option<&str>, line: usize) -> Result<u64, GraphError> {
    let raw = field.ok_or_else(|| GraphError::Parse {
        line,
        msg: "missing column".into(),
    })?;
    raw.parse().map_err(|e| GraphError::Parse {
        line,
        msg: format!("bad node id {raw:?}: {e}"),
    })
}

fn dense_id(
    g: &mut DirectedGraph,
    map: &mut HashMap<u64, NodeId>,
    originals: &mut Vec<u64>,
    orig: u64,
) -> NodeId {
    *map.entry(orig).or_insert_with(|| {
        originals.push(orig);
        g.add_node(0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    #[test]
    fn add_node_assigns_dense_increasing_ids() {
        let mut g = DirectedGraph::new();
        assert_eq!(g.add_node(0), NodeId(0));
        g.add_node(0);
        g.add_node(0);
        assert_eq!(g.add_node(1), NodeId(3));
        let a = g.add_node(2);
        let b = g.add_node(2);
        assert!(b > a);
        assert_eq!(b.0, a.0 + 1);
    }

    #[test]
    fn add_edge_updates_degree_counters() {
        let mut g = DirectedGraph::new();
        let a = g.add_node(0);
        let b = g.add_node(0);
        g.add_edge(a, b).unwrap();
        assert_eq!(g.in_degree(b), 1);
        assert_eq!(g.out_degree(a), 1);
        // multigraph: the same pair twice gives multiplicity 2
        g.add_edge(a, b).unwrap();
        assert_eq!(g.in_degree(b), 2);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn self_loop_and_unknown_node_rejected() {
        let mut g = DirectedGraph::new();
        let a = g.add_node(0);
        assert!(matches!(g.add_edge(a, a), Err(GraphError::SelfLoop(_))));
        assert!(matches!(
            g.add_edge(a, NodeId(7)),
            Err(GraphError::UnknownNode(_))
        ));
    }

    #[test]
    fn degree_sums_match_edge_count() {
        let mut g = DirectedGraph::new();
        for _ in 0..5 {
            g.add_node(0);
        }
        let pairs = [(0, 1), (1, 2), (2, 0), (3, 4), (4, 0), (1, 2)];
        for (s, d) in pairs {
            g.add_edge(NodeId(s), NodeId(d)).unwrap();
        }
        let din: usize = g.node_ids().map(|v| g.in_degree(v)).sum();
        let dout: usize = g.node_ids().map(|v| g.out_degree(v)).sum();
        assert_eq!(din, g.edge_count());
        assert_eq!(dout, g.edge_count());
    }

    #[test]
    fn ingest_reads_comments_and_counts_self_loops() {
        let input = "# comment\n0\t1\n1\t2\n";
        let rep = ingest_snap_reader(Cursor::new(input)).unwrap();
        assert_eq!(rep.graph.node_count(), 3);
        assert_eq!(rep.graph.edge_count(), 2);
        assert_eq!(rep.self_loops_skipped, 0);

        let rep = ingest_snap_reader(Cursor::new("5\t5\n0 1\n")).unwrap();
        assert_eq!(rep.self_loops_skipped, 1);
        assert_eq!(rep.graph.edge_count(), 1);
    }

    #[test]
    fn ingest_dense_ids_follow_first_appearance() {
        // sources 10, 99, 10: 10 appears first, then 3 (target), then 99 ...
        let input = "10\t3\n99\t10\n10\t99\n";
        let rep = ingest_snap_reader(Cursor::new(input)).unwrap();
        // reference reader replay: first appearance order is 10, 3, 99
        assert_eq!(rep.original_ids, vec![10, 3, 99]);
        assert_eq!(rep.id_map[&10], NodeId(0));
        assert_eq!(rep.id_map[&3], NodeId(1));
        assert_eq!(rep.id_map[&99], NodeId(2));
    }

    #[test]
    fn ingest_bad_line_reports_line_number() {
        let err = ingest_snap_reader(Cursor::new("0\t1\nx\t2\n")).unwrap_err();
        match err {
            GraphError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn snap_round_trip_is_identity_on_dense_graphs() {
        let input = "7\t8\n8\t9\n9\t7\n7\t9\n";
        let rep = ingest_snap_reader(Cursor::new(input)).unwrap();
        let mut buf = Vec::new();
        rep.graph.write_snap(&mut buf).unwrap();
        let rep2 = ingest_snap_reader(Cursor::new(buf.clone())).unwrap();
        let mut buf2 = Vec::new();
        rep2.graph.write_snap(&mut buf2).unwrap();
        assert_eq!(buf, buf2);
        assert_eq!(rep.graph.edge_count(), rep2.graph.edge_count());
    }

    #[test]
    fn bfs_ball_respects_radius() {
        let mut g = DirectedGraph::new();
        for _ in 0..5 {
            g.add_node(0);
        }
        for (s, d) in [(0, 1), (1, 2), (2, 3), (3, 4)] {
            g.add_edge(NodeId(s), NodeId(d)).unwrap();
        }
        let ball = g.bfs_ball(NodeId(0), 2);
        assert_eq!(ball, vec![NodeId(0), NodeId(1), NodeId(2)]);
    }
}
