//! Graph representation, generators, and distance computations.
//!
//! Node ids are dense `0..n-1`. Fine graphs are undirected, simple (no
//! duplicate edges, no self-loops), and optionally carry a 2-D layout in the
//! unit square.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// One-step transition structure shared by fine graphs and super-graphs.
///
/// `step_neighbors` lists the legal moves out of a state in ascending id
/// order. For fine graphs that is plain adjacency; super-graphs include the
/// state itself exactly when the cluster carries a self-loop.
pub trait Topology {
    fn node_count(&self) -> usize;
    fn step_neighbors(&self, v: u32) -> &[u32];
}

/// Parameters a random geometric graph was generated from; kept on the graph
/// so outputs can be regenerated and partitioners can warn when the cell side
/// drops below the connection radius.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RggConfig {
    /// Expected node count of the Poisson point process.
    pub lambda: f64,
    /// Connection radius in unit-square coordinates.
    pub radius: f64,
    pub seed: u64,
    /// Draw exactly this many nodes instead of a Poisson count.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_n: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct Graph {
    adjacency: Vec<Vec<u32>>,
    edges: Vec<(u32, u32)>,
    layout: Option<Vec<(f64, f64)>>,
    seed_info: Option<RggConfig>,
}

/// Versioned serialization document; field order is fixed so equal graphs
/// serialize to identical bytes.
#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct GraphDoc {
    version: u32,
    n: usize,
    edges: Vec<(u32, u32)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    layout: Option<Vec<(f64, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed_info: Option<RggConfig>,
}

const GRAPH_DOC_VERSION: u32 = 1;

impl Graph {
    /// Build a graph from clean inputs: ids in range, no duplicates, no
    /// self-loops. Violations are errors; use [`load_edge_list`] for dirty
    /// input that should be sanitized instead.
    pub fn new(n: usize, edges: Vec<(u32, u32)>, layout: Option<Vec<(f64, f64)>>) -> Result<Graph> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        if let Some(coords) = &layout {
            if coords.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "layout has {} entries for {} nodes",
                    coords.len(),
                    n
                )));
            }
            for &(x, y) in coords {
                if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
                    return Err(Error::InvalidInput(format!(
                        "layout coordinate ({x}, {y}) outside the unit square"
                    )));
                }
            }
        }
        let mut normalized: Vec<(u32, u32)> = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::InvalidInput(format!(
                    "edge ({u}, {v}) out of range for n={n}"
                )));
            }
            if u == v {
                return Err(Error::InvalidInput(format!("self-loop on node {u}")));
            }
            normalized.push((u.min(v), u.max(v)));
        }
        normalized.sort_unstable();
        let before = normalized.len();
        normalized.dedup();
        if normalized.len() != before {
            return Err(Error::InvalidInput("duplicate edge".into()));
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &normalized {
            adjacency[u as usize].push(v);
            adjacency[v as usize].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Graph {
            adjacency,
            edges: normalized,
            layout,
            seed_info: None,
        })
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adjacency[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adjacency[v as usize].len()
    }

    pub fn layout(&self) -> Option<&[(f64, f64)]> {
        self.layout.as_deref()
    }

    pub fn seed_info(&self) -> Option<&RggConfig> {
        self.seed_info.as_ref()
    }

    pub fn to_json(&self) -> String {
        let doc = GraphDoc {
            version: GRAPH_DOC_VERSION,
            n: self.node_count(),
            edges: self.edges.clone(),
            layout: self.layout.clone(),
            seed_info: self.seed_info.clone(),
        };
        serde_json::to_string(&doc).expect("graph document serializes")
    }

    pub fn from_json(text: &str) -> Result<Graph> {
        let doc: GraphDoc = serde_json::from_str(text)?;
        if doc.version != GRAPH_DOC_VERSION {
            return Err(Error::InvalidInput(format!(
                "unsupported graph document version {}",
                doc.version
            )));
        }
        let mut graph = Graph::new(doc.n, doc.edges, doc.layout)?;
        graph.seed_info = doc.seed_info;
        Ok(graph)
    }

    /// Euclidean distance between two nodes; layout required.
    pub fn euclidean_distance(&self, a: u32, b: u32) -> Result<f64> {
        let layout = self.layout.as_ref().ok_or(Error::LayoutMissing)?;
        let (ax, ay) = layout[a as usize];
        let (bx, by) = layout[b as usize];
        Ok(((ax - bx).powi(2) + (ay - by).powi(2)).sqrt())
    }
}

impl Topology for Graph {
    fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    fn step_neighbors(&self, v: u32) -> &[u32] {
        &self.adjacency[v as usize]
    }
}

/// Result of ingesting a raw edge list: the sanitized graph plus what the
/// sanitizer dropped and how external ids map to dense ids.
#[derive(Clone, Debug)]
pub struct LoadedGraph {
    pub graph: Graph,
    /// `original_ids[dense_id]` is the id the input file used.
    pub original_ids: Vec<u64>,
    pub duplicate_edges_dropped: usize,
    pub self_loops_dropped: usize,
}

/// Parse a line-oriented edge list: one `u v` pair per line, `#` comments
/// ignored, arbitrary non-dense ids relabeled in order of first appearance.
pub fn load_edge_list(text: &str) -> Result<LoadedGraph> {
    let mut id_of: HashMap<u64, u32> = HashMap::new();
    let mut original_ids: Vec<u64> = Vec::new();
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let mut self_loops = 0usize;

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
                message: "expected two integer tokens".into(),
            })?;
            tok.parse::<u64>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("invalid integer token '{tok}'"),
            })
        };
        let u = parse(tokens.next())?;
        let v = parse(tokens.next())?;
        if tokens.next().is_some() {
            return Err(Error::Parse {
                line: line_no,
                message: "trailing tokens after edge pair".into(),
            });
        }
        let mut dense = |orig: u64| -> u32 {
            *id_of.entry(orig).or_insert_with(|| {
                original_ids.push(orig);
                (original_ids.len() - 1) as u32
            })
        };
        let du = dense(u);
        let dv = dense(v);
        if du == dv {
            self_loops += 1;
        } else {
            edges.push((du.min(dv), du.max(dv)));
        }
    }

    if original_ids.is_empty() {
        return Err(Error::EmptyGraph);
    }
    edges.sort_unstable();
    let before = edges.len();
    edges.dedup();
    let duplicates = before - edges.len();
    let graph = Graph::new(original_ids.len(), edges, None)?;
    Ok(LoadedGraph {
        graph,
        original_ids,
        duplicate_edges_dropped: duplicates,
        self_loops_dropped: self_loops,
    })
}

/// Generate a random geometric graph on the unit square: node count drawn
/// from Poisson(lambda) (or fixed), independent uniform coordinates, an edge
/// whenever the Euclidean distance is at most `radius`.
pub fn generate_rgg(config: &RggConfig) -> Result<Graph> {
    let lambda_ok = config.lambda > 0.0;
    if config.fixed_n.is_none() && !lambda_ok {
        return Err(Error::InvalidInput(format!(
            "lambda must be positive, got {}",
            config.lambda
        )));
    }
    let radius_ok = config.radius > 0.0 && config.radius < 1.0;
    if !radius_ok {
        return Err(Error::InvalidInput(format!(
            "radius must lie in (0, 1), got {}",
            config.radius
        )));
    }
    let mut rng = SeededRng::new(config.seed);
    let n = match config.fixed_n {
        Some(n) => n,
        None => rng.next_poisson(config.lambda) as usize,
    };
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let mut coords = Vec::with_capacity(n);
    for _ in 0..n {
        let x = rng.next_f64();
        let y = rng.next_f64();
        coords.push((x, y));
    }

    // Bucket nodes into radius-sized cells so edge generation touches only
    // the 3x3 cell neighborhood of each node.
    let r = config.radius;
    let cells_per_side = ((1.0 / r).floor() as usize).max(1);
    let cell_of =
        |x: f64| -> usize { ((x * cells_per_side as f64) as usize).min(cells_per_side - 1) };
    let mut buckets: HashMap<(usize, usize), Vec<u32>> = HashMap::new();
    for (i, &(x, y)) in coords.iter().enumerate() {
        buckets
            .entry((cell_of(x), cell_of(y)))
            .or_default()
            .push(i as u32);
    }
    let r2 = r * r;
    let mut edges: Vec<(u32, u32)> = Vec::new();
    for (i, &(x, y)) in coords.iter().enumerate() {
        let (cx, cy) = (cell_of(x), cell_of(y));
        for dx in -1i64..=1 {
            for dy in -1i64..=1 {
                let nx = cx as i64 + dx;
                let ny = cy as i64 + dy;
                if nx < 0
                    || ny < 0
                    || nx as usize >= cells_per_side
                    || ny as usize >= cells_per_side
                {
                    continue;
                }
                let Some(bucket) = buckets.get(&(nx as usize, ny as usize)) else {
                    continue;
                };
                for &j in bucket {
                    if (j as usize) <= i {
                        continue;
                    }
                    let (jx, jy) = coords[j as usize];
                    let d2 = (x - jx) * (x - jx) + (y - jy) * (y - jy);
                    if d2 <= r2 {
                        edges.push((i as u32, j));
                    }
                }
            }
        }
    }
    let mut graph = Graph::new(n, edges, Some(coords))?;
    graph.seed_info = Some(config.clone());
    Ok(graph)
}

/// A connected path of activated nodes, one per time step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruePath {
    pub nodes: Vec<u32>,
}

impl TruePath {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn last(&self) -> u32 {
        *self.nodes.last().expect("paths are non-empty")
    }

    /// Check the defining invariant: consecutive nodes share an edge.
    pub fn validate(&self, graph: &Graph) -> Result<()> {
        if self.nodes.is_empty() {
            return Err(Error::InvalidInput("empty path".into()));
        }
        for (t, pair) in self.nodes.windows(2).enumerate() {
            if graph.neighbors(pair[0]).binary_search(&pair[1]).is_err() {
                return Err(Error::InvalidInput(format!(
                    "path steps from {} to {} at t={} without an edge",
                    pair[0],
                    pair[1],
                    t + 1
                )));
            }
        }
        Ok(())
    }
}

/// Uniform random walk of length `t_len`; the start is `start` or uniform
/// over nodes of positive degree.
pub fn random_walk_path(
    graph: &Graph,
    t_len: usize,
    seed: u64,
    start: Option<u32>,
) -> Result<TruePath> {
    if t_len == 0 {
        return Err(Error::InvalidInput("walk length must be at least 1".into()));
    }
    let mut rng = SeededRng::new(seed);
    let first = match start {
        Some(v) => {
            if v as usize >= graph.node_count() {
                return Err(Error::InvalidInput(format!("start node {v} out of range")));
            }
            v
        }
        None => {
            let candidates: Vec<u32> = (0..graph.node_count() as u32)
                .filter(|&v| graph.degree(v) > 0)
                .collect();
            if candidates.is_empty() {
                return Err(Error::IsolatedNode { node: 0, t: 1 });
            }
            candidates[rng.next_index(candidates.len() as u32) as usize]
        }
    };
    let mut nodes = Vec::with_capacity(t_len);
    nodes.push(first);
    let mut current = first;
    for t in 1..t_len {
        let neighbors = graph.neighbors(current);
        if neighbors.is_empty() {
            return Err(Error::IsolatedNode {
                node: current,
                t: t + 1,
            });
        }
        current = neighbors[rng.next_index(neighbors.len() as u32) as usize];
        nodes.push(current);
    }
    Ok(TruePath { nodes })
}

/// BFS hop count between two states; `None` when disconnected.
pub fn hop_distance<G: Topology>(graph: &G, a: u32, b: u32) -> Result<Option<u32>> {
    let n = graph.node_count();
    if a as usize >= n || b as usize >= n {
        return Err(Error::InvalidInput(format!(
            "node id out of range: {a} or {b} for n={n}"
        )));
    }
    if a == b {
        return Ok(Some(0));
    }
    let dist = hop_distances_from(graph, a);
    Ok(dist[b as usize])
}

/// BFS hop counts from a source to every state.
pub fn hop_distances_from<G: Topology>(graph: &G, source: u32) -> Vec<Option<u32>> {
    let n = graph.node_count();
    let mut dist: Vec<Option<u32>> = vec![None; n];
    dist[source as usize] = Some(0);
    let mut queue = VecDeque::new();
    queue.push_back(source);
    while let Some(v) = queue.pop_front() {
        let dv = dist[v as usize].unwrap();
        for &w in graph.step_neighbors(v) {
            if dist[w as usize].is_none() {
                dist[w as usize] = Some(dv + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Node distance flavor used by destination metrics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum DistanceMode {
    Euclidean,
    Hop,
}

/// Maximum node distance between two clusters.
pub fn cluster_pair_max_distance(
    graph: &Graph,
    cluster_a: &[u32],
    cluster_b: &[u32],
    mode: DistanceMode,
) -> Result<f64> {
    if cluster_a.is_empty() || cluster_b.is_empty() {
        return Err(Error::InvalidInput("empty cluster".into()));
    }
    match mode {
        DistanceMode::Euclidean => {
            let mut best = 0.0f64;
            for &a in cluster_a {
                for &b in cluster_b {
                    best = best.max(graph.euclidean_distance(a, b)?);
                }
            }
            Ok(best)
        }
        DistanceMode::Hop => {
            // BFS once per node of the smaller cluster.
            let (from, to) = if cluster_a.len() <= cluster_b.len() {
                (cluster_a, cluster_b)
            } else {
                (cluster_b, cluster_a)
            };
            let mut best = 0u32;
            for &a in from {
                let dist = hop_distances_from(graph, a);
                for &b in to {
                    match dist[b as usize] {
                        Some(d) => best = best.max(d),
                        None => return Err(Error::Unreachable { a, b }),
                    }
                }
            }
            Ok(f64::from(best))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_graph(n: usize) -> Graph {
        let edges = (0..n as u32 - 1).map(|i| (i, i + 1)).collect();
        Graph::new(n, edges, None).unwrap()
    }

    #[test]
    fn load_simple_edge_list() {
        let loaded = load_edge_list("0 1\n1 2").unwrap();
        assert_eq!(loaded.graph.node_count(), 3);
        assert_eq!(loaded.graph.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(loaded.original_ids, vec![0, 1, 2]);
    }

    #[test]
    fn load_relabels_dedups_and_drops_self_loops() {
        let loaded = load_edge_list("5 7\n7 5\n5 5").unwrap();
        assert_eq!(loaded.graph.node_count(), 2);
        assert_eq!(loaded.graph.edges(), &[(0, 1)]);
        assert_eq!(loaded.duplicate_edges_dropped, 1);
        assert_eq!(loaded.self_loops_dropped, 1);
        assert_eq!(loaded.original_ids, vec![5, 7]);
    }

    #[test]
    fn load_reports_line_numbers_and_rejects_empty() {
        let err = load_edge_list("0 1\nx 2").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
        assert!(matches!(
            load_edge_list("# nothing\n"),
            Err(Error::EmptyGraph)
        ));
    }

    #[test]
    fn load_accepts_comments_and_blank_lines() {
        let loaded = load_edge_list("# header\n\n10 20\n20 30\n").unwrap();
        assert_eq!(loaded.graph.node_count(), 3);
        assert_eq!(loaded.graph.edge_count(), 2);
    }

    #[test]
    fn rgg_connects_nodes_within_radius() {
        // Two fixed nodes closer than r must be connected: emulate by a tiny
        // fixed-n graph checked against the brute-force rule below.
        let config = RggConfig {
            lambda: 0.0,
            radius: 0.3,
            seed: 7,
            fixed_n: Some(50),
        };
        let graph = generate_rgg(&config).unwrap();
        let coords = graph.layout().unwrap();
        // Independent O(n^2) oracle over the drawn coordinates.
        let mut expected = Vec::new();
        for i in 0..50u32 {
            for j in (i + 1)..50 {
                let (ax, ay) = coords[i as usize];
                let (bx, by) = coords[j as usize];
                let d2 = (ax - bx).powi(2) + (ay - by).powi(2);
                if d2 <= 0.3 * 0.3 {
                    expected.push((i, j));
                }
            }
        }
        assert_eq!(graph.edges(), expected.as_slice());
    }

    #[test]
    fn rgg_is_deterministic_per_seed() {
        let config = RggConfig {
            lambda: 200.0,
            radius: 0.05,
            seed: 11,
            fixed_n: None,
        };
        let a = generate_rgg(&config).unwrap();
        let b = generate_rgg(&config).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let c = generate_rgg(&RggConfig { seed: 12, ..config }).unwrap();
        assert_ne!(a.to_json(), c.to_json());
    }

    #[test]
    fn rgg_rejects_bad_parameters() {
        assert!(
            generate_rgg(&RggConfig {
                lambda: 0.0,
                radius: 0.1,
                seed: 0,
                fixed_n: None
            })
            .is_err()
        );
        assert!(
            generate_rgg(&RggConfig {
                lambda: 5.0,
                radius: 1.5,
                seed: 0,
                fixed_n: None
            })
            .is_err()
        );
    }

    #[test]
    fn graph_json_round_trip() {
        let config = RggConfig {
            lambda: 50.0,
            radius: 0.2,
            seed: 3,
            fixed_n: None,
        };
        let graph = generate_rgg(&config).unwrap();
        let text = graph.to_json();
        let back = Graph::from_json(&text).unwrap();
        assert_eq!(back.to_json(), text);
        assert_eq!(back.seed_info(), Some(&config));
    }

    #[test]
    fn forced_alternation_walk() {
        let graph = path_graph(2);
        let walk = random_walk_path(&graph, 3, 0, Some(0)).unwrap();
        assert_eq!(walk.nodes, vec![0, 1, 0]);
    }

    #[test]
    fn walks_stay_on_edges() {
        let config = RggConfig {
            lambda: 0.0,
            radius: 0.25,
            seed: 21,
            fixed_n: Some(60),
        };
        let graph = generate_rgg(&config).unwrap();
        let walk = random_walk_path(&graph, 200, 5, None).unwrap();
        walk.validate(&graph).unwrap();
    }

    #[test]
    fn walk_transitions_are_uniform_on_triangle() {
        let graph = Graph::new(3, vec![(0, 1), (0, 2), (1, 2)], None).unwrap();
        let steps = 100_000;
        let walk = random_walk_path(&graph, steps, 13, Some(0)).unwrap();
        // Count transitions out of node 0 toward each neighbor.
        let mut from0 = 0usize;
        let mut to1 = 0usize;
        for pair in walk.nodes.windows(2) {
            if pair[0] == 0 {
                from0 += 1;
                if pair[1] == 1 {
                    to1 += 1;
                }
            }
        }
        let p = to1 as f64 / from0 as f64;
        let sigma = (0.5 * 0.5 / from0 as f64).sqrt();
        assert!((p - 0.5).abs() < 3.0 * sigma, "p={p} from0={from0}");
    }

    #[test]
    fn walk_errors_on_isolated_start() {
        let graph = Graph::new(2, vec![], None).unwrap();
        assert!(matches!(
            random_walk_path(&graph, 3, 0, Some(0)),
            Err(Error::IsolatedNode { .. })
        ));
    }

    #[test]
    fn hop_distance_basics() {
        let graph = path_graph(4);
        assert_eq!(hop_distance(&graph, 2, 2).unwrap(), Some(0));
        assert_eq!(hop_distance(&graph, 0, 3).unwrap(), Some(3));
        let split = Graph::new(4, vec![(0, 1), (2, 3)], None).unwrap();
        assert_eq!(hop_distance(&split, 0, 3).unwrap(), None);
    }

    #[test]
    fn hop_distances_match_all_pairs_oracle() {
        let graph = generate_rgg(&RggConfig {
            lambda: 0.0,
            radius: 0.2,
            seed: 33,
            fixed_n: Some(40),
        })
        .unwrap();
        let oracle = crate::oracle::floyd_warshall(40, graph.edges());
        for a in 0..40u32 {
            for b in 0..40u32 {
                assert_eq!(
                    hop_distance(&graph, a, b).unwrap(),
                    oracle[a as usize][b as usize],
                    "pair ({a},{b})"
                );
            }
        }
    }

    #[test]
    fn cluster_pair_max_matches_exhaustive_scan() {
        let graph = generate_rgg(&RggConfig {
            lambda: 0.0,
            radius: 0.35,
            seed: 44,
            fixed_n: Some(40),
        })
        .unwrap();
        let a: Vec<u32> = (0..17).collect();
        let b: Vec<u32> = (20..40).collect();
        let got = cluster_pair_max_distance(&graph, &a, &b, DistanceMode::Euclidean).unwrap();
        let mut expect = 0.0f64;
        for &x in &a {
            for &y in &b {
                expect = expect.max(graph.euclidean_distance(x, y).unwrap());
            }
        }
        assert_eq!(got, expect);
    }

    #[test]
    fn cluster_pair_distances() {
        let layout = vec![(0.0, 0.0), (1.0, 0.0), (0.5, 0.0)];
        let graph = Graph::new(3, vec![(0, 1), (1, 2)], Some(layout)).unwrap();
        let d = cluster_pair_max_distance(&graph, &[0], &[1, 2], DistanceMode::Euclidean).unwrap();
        assert_eq!(d, 1.0);
        let single =
            cluster_pair_max_distance(&graph, &[2], &[2], DistanceMode::Euclidean).unwrap();
        assert_eq!(single, 0.0);
        let hops = cluster_pair_max_distance(&graph, &[0], &[1, 2], DistanceMode::Hop).unwrap();
        assert_eq!(hops, 2.0);
    }
}
