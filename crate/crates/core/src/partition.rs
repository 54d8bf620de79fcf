//! Node partitions and the coarse graph they induce.
//!
//! A partition splits the node set into non-overlapping, non-empty clusters
//! with dense ids. The induced super-graph connects two clusters when any
//! fine edge crosses between them, and a cluster carries a self-loop when its
//! induced subgraph has at least one internal edge — the only way a fine path
//! can stay inside a cluster for consecutive steps.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::{DistanceMode, Graph, Topology, TruePath, cluster_pair_max_distance};

#[derive(Clone, Debug)]
pub struct Partition {
    assign: Vec<u32>,
    members: Vec<Vec<u32>>,
    grid: Option<SquareGrid>,
}

/// Square-tessellation metadata retained when a partition comes from
/// [`square_partition`]: the grid resolution and, per cluster, which of the
/// B x B squares it occupies (empty squares having been dropped).
#[derive(Clone, Debug)]
pub struct SquareGrid {
    pub squares_per_side: u32,
    /// `square_of_cluster[c]` = row-major square index of cluster `c`.
    pub square_of_cluster: Vec<u32>,
}

impl SquareGrid {
    /// Center of a cluster's square in unit-square coordinates.
    pub fn center(&self, cluster: u32) -> (f64, f64) {
        let b = f64::from(self.squares_per_side);
        let square = self.square_of_cluster[cluster as usize];
        let sx = square % self.squares_per_side;
        let sy = square / self.squares_per_side;
        ((f64::from(sx) + 0.5) / b, (f64::from(sy) + 0.5) / b)
    }

    /// Euclidean distances between a cluster's square center and every other
    /// cluster's square center.
    pub fn center_distances_from(&self, from: u32) -> Vec<f64> {
        let (fx, fy) = self.center(from);
        (0..self.square_of_cluster.len() as u32)
            .map(|c| {
                let (cx, cy) = self.center(c);
                ((fx - cx).powi(2) + (fy - cy).powi(2)).sqrt()
            })
            .collect()
    }
}

impl Partition {
    /// Build from a total node -> cluster assignment. Cluster ids may be
    /// sparse; they are densified by ascending original id.
    pub fn from_assignment(n: usize, raw_assign: &[u32]) -> Result<Partition> {
        if raw_assign.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "assignment covers {} of {} nodes",
                raw_assign.len(),
                n
            )));
        }
        let mut ids: Vec<u32> = raw_assign.to_vec();
        ids.sort_unstable();
        ids.dedup();
        let rank: HashMap<u32, u32> = ids
            .iter()
            .enumerate()
            .map(|(i, &c)| (c, i as u32))
            .collect();
        let assign: Vec<u32> = raw_assign.iter().map(|c| rank[c]).collect();
        let mut members = vec![Vec::new(); ids.len()];
        for (node, &c) in assign.iter().enumerate() {
            members[c as usize].push(node as u32);
        }
        Ok(Partition {
            assign,
            members,
            grid: None,
        })
    }

    /// Build from explicit member lists; they must cover `0..n-1` exactly
    /// once and contain no empty cluster.
    pub fn from_members(n: usize, members: Vec<Vec<u32>>) -> Result<Partition> {
        let mut assign = vec![u32::MAX; n];
        for (c, cluster) in members.iter().enumerate() {
            if cluster.is_empty() {
                return Err(Error::InvalidInput(format!("cluster {c} is empty")));
            }
            for &v in cluster {
                if v as usize >= n {
                    return Err(Error::InvalidInput(format!("node {v} out of range")));
                }
                if assign[v as usize] != u32::MAX {
                    return Err(Error::InvalidInput(format!("node {v} assigned twice")));
                }
                assign[v as usize] = c as u32;
            }
        }
        if let Some(v) = assign.iter().position(|&c| c == u32::MAX) {
            return Err(Error::InvalidInput(format!("node {v} unassigned")));
        }
        let mut members = members;
        for cluster in &mut members {
            cluster.sort_unstable();
        }
        Ok(Partition {
            assign,
            members,
            grid: None,
        })
    }

    pub fn cluster_count(&self) -> usize {
        self.members.len()
    }

    pub fn node_count(&self) -> usize {
        self.assign.len()
    }

    pub fn assign(&self) -> &[u32] {
        &self.assign
    }

    pub fn cluster_of(&self, node: u32) -> u32 {
        self.assign[node as usize]
    }

    pub fn members(&self, cluster: u32) -> &[u32] {
        &self.members[cluster as usize]
    }

    pub fn cluster_sizes(&self) -> Vec<u32> {
        self.members.iter().map(|m| m.len() as u32).collect()
    }

    pub fn max_cluster_size(&self) -> u32 {
        self.members
            .iter()
            .map(|m| m.len() as u32)
            .max()
            .unwrap_or(0)
    }

    pub fn grid(&self) -> Option<&SquareGrid> {
        self.grid.as_ref()
    }

    /// Project a fine path onto the cluster sequence it passes through.
    pub fn project(&self, path: &TruePath) -> Vec<u32> {
        path.nodes.iter().map(|&v| self.cluster_of(v)).collect()
    }

    /// Serialize as an importable "node cluster" line list.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (node, &c) in self.assign.iter().enumerate() {
            out.push_str(&format!("{node} {c}\n"));
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct SuperGraph {
    /// Inter-cluster adjacency, ascending, excluding self.
    neighbors: Vec<Vec<u32>>,
    self_loop: Vec<bool>,
    /// Transition lists for decoding: `neighbors` plus the cluster itself
    /// where a self-loop permits staying.
    step_lists: Vec<Vec<u32>>,
    cluster_size: Vec<u32>,
}

impl SuperGraph {
    /// Assemble directly from coarse-level data (used by tests and oracles
    /// that construct synthetic coarse instances).
    pub fn from_parts(
        m: usize,
        edges: &[(u32, u32)],
        self_loop: Vec<bool>,
        cluster_size: Vec<u32>,
    ) -> Result<SuperGraph> {
        if m == 0 {
            return Err(Error::EmptyGraph);
        }
        if self_loop.len() != m || cluster_size.len() != m {
            return Err(Error::DimensionMismatch(
                "self-loop and size vectors must have one entry per cluster".into(),
            ));
        }
        if cluster_size.contains(&0) {
            return Err(Error::InvalidInput("cluster of size zero".into()));
        }
        let mut neighbors = vec![Vec::new(); m];
        for &(a, b) in edges {
            if a as usize >= m || b as usize >= m || a == b {
                return Err(Error::InvalidInput(format!(
                    "bad super-edge ({a}, {b}) for m={m}"
                )));
            }
            neighbors[a as usize].push(b);
            neighbors[b as usize].push(a);
        }
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
        }
        let step_lists = build_step_lists(&neighbors, &self_loop);
        Ok(SuperGraph {
            neighbors,
            self_loop,
            step_lists,
            cluster_size,
        })
    }

    pub fn cluster_count(&self) -> usize {
        self.neighbors.len()
    }

    pub fn neighbors(&self, cluster: u32) -> &[u32] {
        &self.neighbors[cluster as usize]
    }

    pub fn self_loop(&self, cluster: u32) -> bool {
        self.self_loop[cluster as usize]
    }

    pub fn cluster_size(&self, cluster: u32) -> u32 {
        self.cluster_size[cluster as usize]
    }

    pub fn cluster_sizes(&self) -> &[u32] {
        &self.cluster_size
    }

    pub fn max_cluster_size(&self) -> u32 {
        self.cluster_size.iter().copied().max().unwrap_or(0)
    }

    /// Inter-cluster edge list (a < b), ascending.
    pub fn edge_list(&self) -> Vec<(u32, u32)> {
        let mut edges = Vec::new();
        for (a, list) in self.neighbors.iter().enumerate() {
            for &b in list {
                if (a as u32) < b {
                    edges.push((a as u32, b));
                }
            }
        }
        edges
    }

    pub fn super_edge_count(&self) -> usize {
        self.neighbors.iter().map(|l| l.len()).sum::<usize>() / 2
    }

    /// Validate that a coarse chain is a legal walk: consecutive clusters
    /// adjacent, staying put only across a self-loop.
    pub fn validate_walk(&self, chain: &[u32]) -> Result<()> {
        if chain.is_empty() {
            return Err(Error::InvalidInput("empty coarse path".into()));
        }
        for (t, &c) in chain.iter().enumerate() {
            if c as usize >= self.cluster_count() {
                return Err(Error::InvalidInput(format!("cluster {c} out of range")));
            }
            if t > 0 {
                let prev = chain[t - 1];
                let ok = if prev == c {
                    self.self_loop[c as usize]
                } else {
                    self.neighbors[prev as usize].binary_search(&c).is_ok()
                };
                if !ok {
                    return Err(Error::DisconnectedCoarsePath { t: t + 1 });
                }
            }
        }
        Ok(())
    }
}

impl Topology for SuperGraph {
    fn node_count(&self) -> usize {
        self.neighbors.len()
    }

    fn step_neighbors(&self, v: u32) -> &[u32] {
        &self.step_lists[v as usize]
    }
}

fn build_step_lists(neighbors: &[Vec<u32>], self_loop: &[bool]) -> Vec<Vec<u32>> {
    neighbors
        .iter()
        .enumerate()
        .map(|(c, list)| {
            let mut steps = list.clone();
            if self_loop[c] {
                let pos = steps.partition_point(|&x| x < c as u32);
                steps.insert(pos, c as u32);
            }
            steps
        })
        .collect()
}

/// Shrink each cluster to a super-node: clusters are adjacent when a fine
/// edge crosses between them, and a cluster self-loops when it contains an
/// internal fine edge.
pub fn build_supergraph(graph: &Graph, partition: &Partition) -> Result<SuperGraph> {
    if partition.node_count() != graph.node_count() {
        return Err(Error::DimensionMismatch(format!(
            "partition covers {} nodes, graph has {}",
            partition.node_count(),
            graph.node_count()
        )));
    }
    let m = partition.cluster_count();
    let mut self_loop = vec![false; m];
    let mut edges = Vec::new();
    for &(u, v) in graph.edges() {
        let cu = partition.cluster_of(u);
        let cv = partition.cluster_of(v);
        if cu == cv {
            self_loop[cu as usize] = true;
        } else {
            edges.push((cu.min(cv), cu.max(cv)));
        }
    }
    edges.sort_unstable();
    edges.dedup();
    SuperGraph::from_parts(m, &edges, self_loop, partition.cluster_sizes())
}

/// A partition together with its induced super-graph.
#[derive(Clone, Debug)]
pub struct Partitioned {
    pub partition: Partition,
    pub supergraph: SuperGraph,
    /// Populated by [`square_partition`] when the square side is smaller
    /// than the known connection radius, in which case the super-graph can
    /// exceed the 8-neighbor lattice.
    pub warning: Option<String>,
}

/// Partition a unit-square layout into B x B congruent squares. A node at
/// (x, y) lands in square `floor(xB) + B*floor(yB)` with the x=1/y=1
/// boundaries clamped into the last row/column. Empty squares are dropped and
/// cluster ids densified; the surviving square indices are kept as metadata.
pub fn square_partition(graph: &Graph, squares_per_side: u32) -> Result<Partitioned> {
    let layout = graph.layout().ok_or(Error::LayoutMissing)?;
    if squares_per_side == 0 {
        return Err(Error::InvalidInput("squares_per_side must be >= 1".into()));
    }
    let b = squares_per_side;
    let bf = f64::from(b);
    let index_of = |x: f64| -> u32 { ((x * bf) as u32).min(b - 1) };
    let squares: Vec<u32> = layout
        .iter()
        .map(|&(x, y)| index_of(x) + b * index_of(y))
        .collect();

    let mut occupied: Vec<u32> = squares.clone();
    occupied.sort_unstable();
    occupied.dedup();
    let rank: HashMap<u32, u32> = occupied
        .iter()
        .enumerate()
        .map(|(i, &s)| (s, i as u32))
        .collect();
    let assign: Vec<u32> = squares.iter().map(|s| rank[s]).collect();

    let mut partition = Partition::from_assignment(graph.node_count(), &assign)?;
    partition.grid = Some(SquareGrid {
        squares_per_side: b,
        square_of_cluster: occupied,
    });
    let supergraph = build_supergraph(graph, &partition)?;
    let warning = graph.seed_info().and_then(|info| {
        (1.0 / bf < info.radius).then(|| {
            format!(
                "square side {:.4} is smaller than the connection radius {:.4}; \
                 super-edges may exceed the 8-neighbor lattice",
                1.0 / bf,
                info.radius
            )
        })
    });
    Ok(Partitioned {
        partition,
        supergraph,
        warning,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct HubShatterConfig {
    /// Hubs removed per round.
    pub hubs_per_round: usize,
    /// Components at most this large become final clusters.
    pub max_cluster_size: usize,
}

impl HubShatterConfig {
    /// Defaults scale with the graph: 0.5% of nodes removed per round,
    /// clusters capped at 1% of nodes.
    pub fn defaults(n: usize) -> Self {
        HubShatterConfig {
            hubs_per_round: n.div_ceil(200).max(1),
            max_cluster_size: n.div_ceil(100).max(1),
        }
    }
}

/// Shatter a graph by repeated hub removal: each round removes the
/// `hubs_per_round` highest-degree nodes of the working subgraph (ties to the
/// lower id) as singleton clusters; remaining connected components small
/// enough become clusters, larger ones are shattered recursively.
pub fn hub_shatter_partition(graph: &Graph, config: &HubShatterConfig) -> Result<Partitioned> {
    if config.hubs_per_round == 0 || config.max_cluster_size == 0 {
        return Err(Error::InvalidInput(
            "hubs_per_round and max_cluster_size must be >= 1".into(),
        ));
    }
    let n = graph.node_count();
    let mut clusters: Vec<Vec<u32>> = Vec::new();
    let mut queue: std::collections::VecDeque<Vec<u32>> = std::collections::VecDeque::new();
    queue.push_back((0..n as u32).collect());

    // Scratch buffers reused across rounds.
    let mut in_part = vec![false; n];
    let mut visited = vec![false; n];

    while let Some(part) = queue.pop_front() {
        if part.len() <= config.max_cluster_size {
            clusters.push(part);
            continue;
        }
        for &v in &part {
            in_part[v as usize] = true;
        }
        // Degree within the induced subgraph.
        let mut degree: Vec<(u32, u32)> = part
            .iter()
            .map(|&v| {
                let d = graph
                    .neighbors(v)
                    .iter()
                    .filter(|&&w| in_part[w as usize])
                    .count() as u32;
                (v, d)
            })
            .collect();
        // Highest degree first, ties to the lower id.
        degree.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        let k = config.hubs_per_round.min(part.len());
        let mut hubs: Vec<u32> = degree[..k].iter().map(|&(v, _)| v).collect();
        hubs.sort_unstable();
        for &h in &hubs {
            in_part[h as usize] = false;
            clusters.push(vec![h]);
        }
        // Components of the remainder, discovered from ascending node ids.
        for &v in &part {
            if !in_part[v as usize] || visited[v as usize] {
                continue;
            }
            let mut component = Vec::new();
            let mut stack = vec![v];
            visited[v as usize] = true;
            while let Some(u) = stack.pop() {
                component.push(u);
                for &w in graph.neighbors(u) {
                    if in_part[w as usize] && !visited[w as usize] {
                        visited[w as usize] = true;
                        stack.push(w);
                    }
                }
            }
            component.sort_unstable();
            if component.len() <= config.max_cluster_size {
                clusters.push(component);
            } else {
                queue.push_back(component);
            }
        }
        // Reset scratch state for the next part.
        for &v in &part {
            in_part[v as usize] = false;
            visited[v as usize] = false;
        }
    }

    // Canonical cluster order: by smallest member.
    clusters.sort_by_key(|c| c[0]);
    let partition = Partition::from_members(n, clusters)?;
    let supergraph = build_supergraph(graph, &partition)?;
    Ok(Partitioned {
        partition,
        supergraph,
        warning: None,
    })
}

/// Parse a "node cluster" line list against a graph; every node must be
/// assigned exactly once.
pub fn import_partition(text: &str, graph: &Graph) -> Result<Partitioned> {
    let n = graph.node_count();
    let mut raw = vec![None::<u32>; n];
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let parse = |tok: Option<&str>| -> Result<u64> {
            let tok = tok.ok_or_else(|| Error::Parse {
                line: line_no,
                message: "expected 'node cluster'".into(),
            })?;
            tok.parse::<u64>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("invalid integer token '{tok}'"),
            })
        };
        let node = parse(tokens.next())?;
        let cluster = parse(tokens.next())?;
        if tokens.next().is_some() {
            return Err(Error::Parse {
                line: line_no,
                message: "trailing tokens".into(),
            });
        }
        if node >= n as u64 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("node {node} out of range for n={n}"),
            });
        }
        if cluster > u64::from(u32::MAX) {
            return Err(Error::Parse {
                line: line_no,
                message: format!("cluster id {cluster} too large"),
            });
        }
        if raw[node as usize].replace(cluster as u32).is_some() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("node {node} assigned twice"),
            });
        }
    }
    let mut assign = Vec::with_capacity(n);
    for (node, slot) in raw.iter().enumerate() {
        match slot {
            Some(c) => assign.push(*c),
            None => {
                return Err(Error::InvalidInput(format!("node {node} unassigned")));
            }
        }
    }
    let partition = Partition::from_assignment(n, &assign)?;
    let supergraph = build_supergraph(graph, &partition)?;
    Ok(Partitioned {
        partition,
        supergraph,
        warning: None,
    })
}

/// Maximum fine-node distance from a fixed cluster to every cluster, the
/// per-destination weight of the fine-level destination bound.
pub fn max_distance_vector(
    graph: &Graph,
    partition: &Partition,
    from_cluster: u32,
    mode: DistanceMode,
) -> Result<Vec<f64>> {
    let from = partition.members(from_cluster);
    (0..partition.cluster_count() as u32)
        .map(|c| cluster_pair_max_distance(graph, from, partition.members(c), mode))
        .collect()
}

/// Coarse hop distances from a cluster, as f64 weights; disconnected pairs
/// are an error that names the clusters.
pub fn coarse_hop_distances(supergraph: &SuperGraph, from: u32) -> Result<Vec<f64>> {
    let dist = crate::graph::hop_distances_from(supergraph, from);
    dist.iter()
        .enumerate()
        .map(|(c, d)| {
            d.map(f64::from).ok_or(Error::Unreachable {
                a: from,
                b: c as u32,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{RggConfig, generate_rgg};

    fn star(leaves: u32) -> Graph {
        let edges = (1..=leaves).map(|i| (0u32, i)).collect();
        Graph::new(leaves as usize + 1, edges, None).unwrap()
    }

    #[test]
    fn import_triangle_two_clusters() {
        let graph = Graph::new(3, vec![(0, 1), (0, 2), (1, 2)], None).unwrap();
        let result = import_partition("0 0\n1 0\n2 1", &graph).unwrap();
        assert_eq!(result.partition.cluster_count(), 2);
        assert_eq!(result.supergraph.neighbors(0), &[1]);
        assert!(result.supergraph.self_loop(0));
        assert!(!result.supergraph.self_loop(1));
    }

    #[test]
    fn identity_partition_copies_graph() {
        let graph = Graph::new(4, vec![(0, 1), (1, 2), (2, 3), (0, 3)], None).unwrap();
        let text: String = (0..4).map(|v| format!("{v} {v}\n")).collect();
        let result = import_partition(&text, &graph).unwrap();
        let sg = result.supergraph;
        assert_eq!(sg.cluster_count(), 4);
        assert_eq!(sg.edge_list(), graph.edges().to_vec());
        assert!((0..4).all(|c| !sg.self_loop(c)));
    }

    #[test]
    fn import_rejects_missing_and_duplicate() {
        let graph = Graph::new(2, vec![(0, 1)], None).unwrap();
        assert!(import_partition("0 0", &graph).is_err());
        assert!(import_partition("0 0\n0 1\n1 0", &graph).is_err());
    }

    #[test]
    fn supergraph_matches_brute_force_on_random_partition() {
        let graph = generate_rgg(&RggConfig {
            lambda: 0.0,
            radius: 0.3,
            seed: 2,
            fixed_n: Some(30),
        })
        .unwrap();
        let assign: Vec<u32> = (0..30).map(|v| (v * 7 % 5) as u32).collect();
        let partition = Partition::from_assignment(30, &assign).unwrap();
        let sg = build_supergraph(&graph, &partition).unwrap();
        // Oracle: scan all fine edges directly.
        let mut expect_edges = std::collections::BTreeSet::new();
        let mut expect_loops = [false; 5];
        for &(u, v) in graph.edges() {
            let (cu, cv) = (assign[u as usize], assign[v as usize]);
            if cu == cv {
                expect_loops[cu as usize] = true;
            } else {
                expect_edges.insert((cu.min(cv), cu.max(cv)));
            }
        }
        assert_eq!(sg.edge_list(), expect_edges.into_iter().collect::<Vec<_>>());
        for c in 0..5u32 {
            assert_eq!(sg.self_loop(c), expect_loops[c as usize]);
        }
    }

    #[test]
    fn square_partition_single_square() {
        let graph = generate_rgg(&RggConfig {
            lambda: 0.0,
            radius: 0.4,
            seed: 5,
            fixed_n: Some(12),
        })
        .unwrap();
        let result = square_partition(&graph, 1).unwrap();
        assert_eq!(result.partition.cluster_count(), 1);
        assert_eq!(result.supergraph.self_loop(0), graph.edge_count() > 0);
    }

    #[test]
    fn square_partition_matches_floor_rule() {
        let graph = generate_rgg(&RggConfig {
            lambda: 0.0,
            radius: 0.2,
            seed: 3,
            fixed_n: Some(100),
        })
        .unwrap();
        let result = square_partition(&graph, 4).unwrap();
        let layout = graph.layout().unwrap();
        let grid = result.partition.grid().unwrap();
        for (node, &(x, y)) in layout.iter().enumerate() {
            // Independent recomputation of the floor rule.
            let ix = ((x * 4.0).floor() as u32).min(3);
            let iy = ((y * 4.0).floor() as u32).min(3);
            let square = ix + 4 * iy;
            let cluster = result.partition.cluster_of(node as u32);
            assert_eq!(grid.square_of_cluster[cluster as usize], square);
        }
    }

    #[test]
    fn square_partition_requires_layout_and_warns_on_small_squares() {
        let no_layout = Graph::new(2, vec![(0, 1)], None).unwrap();
        assert!(matches!(
            square_partition(&no_layout, 2),
            Err(Error::LayoutMissing)
        ));
        let graph = generate_rgg(&RggConfig {
            lambda: 0.0,
            radius: 0.3,
            seed: 1,
            fixed_n: Some(40),
        })
        .unwrap();
        assert!(square_partition(&graph, 2).unwrap().warning.is_none());
        assert!(square_partition(&graph, 8).unwrap().warning.is_some());
    }

    #[test]
    fn hub_shatter_star_becomes_singletons() {
        let graph = star(5);
        let config = HubShatterConfig {
            hubs_per_round: 1,
            max_cluster_size: 5,
        };
        let result = hub_shatter_partition(&graph, &config).unwrap();
        assert_eq!(result.partition.cluster_count(), 6);
        assert!((0..6).all(|c| result.partition.members(c).len() == 1));
    }

    #[test]
    fn hub_shatter_path_graph_hand_run() {
        // Ties at degree 2 break to the lowest id, so node 1 is the first
        // hub, then node 3 inside the oversized remainder {2,3,4}.
        let graph = Graph::new(5, vec![(0, 1), (1, 2), (2, 3), (3, 4)], None).unwrap();
        let config = HubShatterConfig {
            hubs_per_round: 1,
            max_cluster_size: 2,
        };
        let result = hub_shatter_partition(&graph, &config).unwrap();
        let mut clusters: Vec<Vec<u32>> = (0..result.partition.cluster_count() as u32)
            .map(|c| result.partition.members(c).to_vec())
            .collect();
        clusters.sort();
        assert_eq!(clusters, vec![vec![0], vec![1], vec![2], vec![3], vec![4]]);
    }

    #[test]
    fn hub_shatter_covers_disconnected_graphs() {
        let graph = Graph::new(7, vec![(0, 1), (1, 2), (4, 5), (5, 6)], None).unwrap();
        let config = HubShatterConfig {
            hubs_per_round: 1,
            max_cluster_size: 2,
        };
        let result = hub_shatter_partition(&graph, &config).unwrap();
        let p = &result.partition;
        let mut seen = [false; 7];
        for c in 0..p.cluster_count() as u32 {
            for &v in p.members(c) {
                assert!(!seen[v as usize]);
                seen[v as usize] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn projected_walks_are_coarse_walks() {
        let graph = generate_rgg(&RggConfig {
            lambda: 0.0,
            radius: 0.15,
            seed: 8,
            fixed_n: Some(200),
        })
        .unwrap();
        let result = square_partition(&graph, 3).unwrap();
        let walk = crate::graph::random_walk_path(&graph, 300, 4, None).unwrap();
        let projected = result.partition.project(&walk);
        result.supergraph.validate_walk(&projected).unwrap();
    }

    #[test]
    fn hop_distances_error_names_disconnected_clusters() {
        let sg = SuperGraph::from_parts(3, &[(0, 1)], vec![false; 3], vec![1, 1, 1]).unwrap();
        match coarse_hop_distances(&sg, 0) {
            Err(Error::Unreachable { a: 0, b: 2 }) => {}
            other => panic!("expected unreachable(0, 2), got {other:?}"),
        }
    }

    #[test]
    fn grid_center_distances() {
        let grid = SquareGrid {
            squares_per_side: 2,
            square_of_cluster: vec![0, 1, 2, 3],
        };
        assert_eq!(grid.center(0), (0.25, 0.25));
        assert_eq!(grid.center(3), (0.75, 0.75));
        let d = grid.center_distances_from(0);
        assert!((d[3] - (0.125f64).sqrt() * 2.0).abs() < 1e-12);
        assert_eq!(d[0], 0.0);
    }
}
