//! Simple undirected graph restricted to its largest connected component,
//! with the traversal and random-walk primitives the rest of the crate uses.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use thiserror::Error;

/// Dense node index, contiguous `0..n` within one [`Graph`].
pub type NodeId = u32;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("empty edge list")]
    EmptyInput,
    #[error("node id {0} out of range (graph has {1} nodes)")]
    InvalidNode(NodeId, usize),
}

/// Simple, undirected, unweighted, connected graph.
///
/// Construction drops self-loops, collapses duplicate edges and keeps only
/// the largest connected component. Node ids are dense and assigned in
/// lexicographic order of the retained original labels, so a given edge set
/// always produces the same graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    adjacency: Vec<Vec<NodeId>>,
    labels: Vec<String>,
    label_index: HashMap<String, NodeId>,
    edge_count: usize,
}

impl Graph {
    /// Builds the graph from unordered label pairs.
    ///
    /// Self-loops are dropped and duplicates collapsed before the largest
    /// connected component is extracted. A size tie between components is
    /// broken toward the component containing the lexicographically
    /// smallest label.
    pub fn from_label_pairs<S: AsRef<str>>(pairs: &[(S, S)]) -> Result<Graph, GraphError> {
        let mut edges: BTreeSet<(String, String)> = BTreeSet::new();
        for (a, b) in pairs {
            let (a, b) = (a.as_ref(), b.as_ref());
            if a == b {
                continue;
            }
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            edges.insert((lo.to_string(), hi.to_string()));
        }
        if edges.is_empty() {
            return Err(GraphError::EmptyInput);
        }

        // Union-find over labels to locate components.
        let mut adj: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for (a, b) in &edges {
            adj.entry(a).or_default().push(b);
            adj.entry(b).or_default().push(a);
        }
        let mut component: BTreeMap<&str, usize> = BTreeMap::new();
        let mut comp_sizes: Vec<usize> = Vec::new();
        for &start in adj.keys() {
            if component.contains_key(start) {
                continue;
            }
            let id = comp_sizes.len();
            let mut size = 0usize;
            let mut queue = VecDeque::from([start]);
            component.insert(start, id);
            while let Some(u) = queue.pop_front() {
                size += 1;
                for &v in &adj[u] {
                    if !component.contains_key(v) {
                        component.insert(v, id);
                        queue.push_back(v);
                    }
                }
            }
            comp_sizes.push(size);
        }
        // Largest component; ties go to the one seen first, i.e. the one
        // holding the lexicographically smallest label (BTreeMap order).
        let best = (0..comp_sizes.len())
            .max_by(|&a, &b| comp_sizes[a].cmp(&comp_sizes[b]).then(b.cmp(&a)))
            .expect("at least one component");

        let labels: Vec<String> = adj
            .keys()
            .filter(|l| component[**l] == best)
            .map(|l| l.to_string())
            .collect();
        let label_index: HashMap<String, NodeId> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i as NodeId))
            .collect();

        let mut adjacency = vec![Vec::new(); labels.len()];
        let mut edge_count = 0usize;
        for (a, b) in &edges {
            if let (Some(&u), Some(&v)) = (label_index.get(a.as_str()), label_index.get(b.as_str())) {
                adjacency[u as usize].push(v);
                adjacency[v as usize].push(u);
                edge_count += 1;
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        debug_assert_eq!(
            adjacency.iter().map(Vec::len).sum::<usize>(),
            2 * edge_count,
            "handshake"
        );
        Ok(Graph { adjacency, labels, label_index, edge_count })
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn degree(&self, u: NodeId) -> Result<usize, GraphError> {
        Ok(self.neighbors(u)?.len())
    }

    /// Sorted, duplicate-free neighbor list of `u`.
    pub fn neighbors(&self, u: NodeId) -> Result<&[NodeId], GraphError> {
        self.adjacency
            .get(u as usize)
            .map(Vec::as_slice)
            .ok_or(GraphError::InvalidNode(u, self.node_count()))
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adjacency
            .get(u as usize)
            .is_some_and(|list| list.binary_search(&v).is_ok())
    }

    /// Original label of node `u`.
    pub fn label(&self, u: NodeId) -> &str {
        &self.labels[u as usize]
    }

    pub fn node_id(&self, label: &str) -> Option<NodeId> {
        self.label_index.get(label).copied()
    }

    /// Edges as sorted `(u, v)` pairs with `u < v`.
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for (u, list) in self.adjacency.iter().enumerate() {
            let u = u as NodeId;
            out.extend(list.iter().filter(|&&v| u < v).map(|&v| (u, v)));
        }
        out
    }

    /// Unweighted shortest-path distance, `None` when it exceeds `cap`.
    pub fn bfs_distance(&self, u: NodeId, v: NodeId, cap: u32) -> Result<Option<u32>, GraphError> {
        self.check(u)?;
        self.check(v)?;
        if u == v {
            return Ok(Some(0));
        }
        let mut dist: HashMap<NodeId, u32> = HashMap::from([(u, 0)]);
        let mut frontier = vec![u];
        for d in 1..=cap {
            let mut next = Vec::new();
            for &x in &frontier {
                for &y in &self.adjacency[x as usize] {
                    if y == v {
                        return Ok(Some(d));
                    }
                    if !dist.contains_key(&y) {
                        dist.insert(y, d);
                        next.push(y);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        Ok(None)
    }

    /// The complete set of nodes at exact distance `d` from `u`, sorted.
    pub fn nodes_at_distance(&self, u: NodeId, d: u32) -> Result<Vec<NodeId>, GraphError> {
        self.check(u)?;
        let mut dist: HashMap<NodeId, u32> = HashMap::from([(u, 0)]);
        let mut frontier = vec![u];
        for level in 1..=d {
            let mut next = Vec::new();
            for &x in &frontier {
                for &y in &self.adjacency[x as usize] {
                    if !dist.contains_key(&y) {
                        dist.insert(y, level);
                        next.push(y);
                    }
                }
            }
            if level == d {
                next.sort_unstable();
                return Ok(next);
            }
            if next.is_empty() {
                return Ok(Vec::new());
            }
            frontier = next;
        }
        Ok(Vec::new()) // d == 0 never reaches here; d >= 1 by contract
    }

    /// Stationary probability of the simple random walk: deg(u) / 2m.
    pub fn stationary_probability(&self, u: NodeId) -> Result<f64, GraphError> {
        Ok(self.degree(u)? as f64 / (2.0 * self.edge_count as f64))
    }

    fn check(&self, u: NodeId) -> Result<(), GraphError> {
        if (u as usize) < self.node_count() {
            Ok(())
        } else {
            Err(GraphError::InvalidNode(u, self.node_count()))
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    fn graph(pairs: &[(&str, &str)]) -> Graph {
        Graph::from_label_pairs(pairs).unwrap()
    }

    /// Edge-list scan oracle for adjacency.
    fn oracle_neighbors(edges: &[(NodeId, NodeId)], u: NodeId) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == u {
                    Some(b)
                } else if b == u {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Floyd–Warshall over the full graph; usize::MAX = unreachable.
    fn floyd_warshall(g: &Graph) -> Vec<Vec<usize>> {
        let n = g.node_count();
        let inf = usize::MAX / 4;
        let mut d = vec![vec![inf; n]; n];
        for u in 0..n {
            d[u][u] = 0;
            for &v in g.neighbors(u as NodeId).unwrap() {
                d[u][v as usize] = 1;
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if d[i][k] + d[k][j] < d[i][j] {
                        d[i][j] = d[i][k] + d[k][j];
                    }
                }
            }
        }
        d
    }

    pub(crate) fn random_gnp(n: usize, p: f64, seed: u64) -> Vec<(String, String)> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.gen::<f64>() < p {
                    pairs.push((format!("n{i:03}"), format!("n{j:03}")));
                }
            }
        }
        pairs
    }

    #[test]
    fn dedupe_and_self_loops() {
        let g = graph(&[("a", "b"), ("b", "a"), ("b", "b"), ("b", "c")]);
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert!(g.has_edge(g.node_id("a").unwrap(), g.node_id("b").unwrap()));
        assert!(g.has_edge(g.node_id("b").unwrap(), g.node_id("c").unwrap()));
    }

    #[test]
    fn larger_component_wins() {
        let g = graph(&[("a", "b"), ("b", "c"), ("d", "e")]);
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert!(g.node_id("d").is_none());
        assert!(g.node_id("e").is_none());
    }

    #[test]
    fn component_tie_keeps_smallest_label() {
        // two components of equal size; the one containing "a" wins
        let g = graph(&[("x", "y"), ("a", "q")]);
        assert_eq!(g.node_count(), 2);
        assert!(g.node_id("a").is_some());
        assert!(g.node_id("x").is_none());
    }

    #[test]
    fn empty_input_is_an_error() {
        assert_eq!(
            Graph::from_label_pairs::<&str>(&[]).unwrap_err(),
            GraphError::EmptyInput
        );
        // only self-loops is empty too
        assert_eq!(
            Graph::from_label_pairs(&[("a", "a")]).unwrap_err(),
            GraphError::EmptyInput
        );
    }

    #[test]
    fn star_and_path_neighbors() {
        let g = graph(&[("h", "a"), ("h", "b"), ("h", "c")]);
        let h = g.node_id("h").unwrap();
        let mut expect: Vec<NodeId> = ["a", "b", "c"].iter().map(|l| g.node_id(l).unwrap()).collect();
        expect.sort_unstable();
        assert_eq!(g.neighbors(h).unwrap(), expect.as_slice());

        let p = graph(&[("a", "b"), ("b", "c")]);
        assert_eq!(p.neighbors(p.node_id("a").unwrap()).unwrap().len(), 1);
        assert!(p.neighbors(99).is_err());
    }

    #[test]
    fn neighbors_match_edge_scan_oracle() {
        let pairs = random_gnp(50, 0.1, 7);
        let g = Graph::from_label_pairs(&pairs).unwrap();
        let edges = g.edges();
        for u in 0..g.node_count() as NodeId {
            assert_eq!(g.neighbors(u).unwrap(), oracle_neighbors(&edges, u));
        }
    }

    #[test]
    fn path_distances() {
        let g = graph(&[("a", "b"), ("b", "c")]);
        let (a, c) = (g.node_id("a").unwrap(), g.node_id("c").unwrap());
        assert_eq!(g.bfs_distance(a, c, 4).unwrap(), Some(2));
        assert_eq!(g.bfs_distance(a, a, 4).unwrap(), Some(0));
        assert!(g.bfs_distance(a, 99, 4).is_err());
    }

    #[test]
    fn distances_match_floyd_warshall() {
        let pairs = random_gnp(20, 0.15, 11);
        let g = Graph::from_label_pairs(&pairs).unwrap();
        let oracle = floyd_warshall(&g);
        let n = g.node_count();
        let cap = 6;
        for u in 0..n {
            for v in 0..n {
                let got = g.bfs_distance(u as NodeId, v as NodeId, cap).unwrap();
                let want = oracle[u][v];
                match got {
                    Some(d) => assert_eq!(d as usize, want),
                    None => assert!(want > cap as usize),
                }
            }
        }
    }

    #[test]
    fn bfs_distance_is_symmetric() {
        let pairs = random_gnp(30, 0.12, 3);
        let g = Graph::from_label_pairs(&pairs).unwrap();
        for u in 0..g.node_count() as NodeId {
            for v in 0..g.node_count() as NodeId {
                assert_eq!(
                    g.bfs_distance(u, v, 4).unwrap(),
                    g.bfs_distance(v, u, 4).unwrap()
                );
            }
        }
    }

    #[test]
    fn nodes_at_distance_path_and_clique() {
        let g = graph(&[("a", "b"), ("b", "c"), ("c", "d")]);
        let a = g.node_id("a").unwrap();
        assert_eq!(g.nodes_at_distance(a, 2).unwrap(), vec![g.node_id("c").unwrap()]);

        let k4 = graph(&[("a", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("b", "d"), ("c", "d")]);
        assert!(k4.nodes_at_distance(0, 2).unwrap().is_empty());
    }

    #[test]
    fn nodes_at_distance_matches_bfs_levels() {
        let pairs = random_gnp(30, 0.1, 21);
        let g = Graph::from_label_pairs(&pairs).unwrap();
        for u in 0..g.node_count() as NodeId {
            for d in [2u32, 3] {
                let got = g.nodes_at_distance(u, d).unwrap();
                let want: Vec<NodeId> = (0..g.node_count() as NodeId)
                    .filter(|&v| g.bfs_distance(u, v, d + 1).unwrap() == Some(d))
                    .collect();
                assert_eq!(got, want, "u={u} d={d}");
            }
        }
    }

    #[test]
    fn nodes_at_distance_partitions_reachable_nodes() {
        let pairs = random_gnp(25, 0.15, 5);
        let g = Graph::from_label_pairs(&pairs).unwrap();
        let n = g.node_count();
        for u in 0..n as NodeId {
            let mut seen: BTreeSet<NodeId> = BTreeSet::from([u]);
            for d in 1..=n as u32 {
                for v in g.nodes_at_distance(u, d).unwrap() {
                    assert!(seen.insert(v), "node {v} appeared at two distances");
                }
            }
            assert_eq!(seen.len(), n, "connected graph: every node at exactly one distance");
        }
    }

    #[test]
    fn stationary_probabilities() {
        let k3 = graph(&[("a", "b"), ("b", "c"), ("a", "c")]);
        for u in 0..3 {
            assert!((k3.stationary_probability(u).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        }
        let p = graph(&[("a", "b"), ("b", "c")]);
        assert_eq!(p.stationary_probability(p.node_id("b").unwrap()).unwrap(), 0.5);

        let pairs = random_gnp(40, 0.15, 9);
        let g = Graph::from_label_pairs(&pairs).unwrap();
        let total: f64 = (0..g.node_count() as NodeId)
            .map(|u| g.stationary_probability(u).unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rebuild_from_emitted_edges_is_identity() {
        let pairs = random_gnp(40, 0.08, 13);
        let g = Graph::from_label_pairs(&pairs).unwrap();
        let relabeled: Vec<(String, String)> = g
            .edges()
            .iter()
            .map(|&(u, v)| (g.label(u).to_string(), g.label(v).to_string()))
            .collect();
        let h = Graph::from_label_pairs(&relabeled).unwrap();
        assert_eq!(g, h);
    }

    #[test]
    fn handshake_holds() {
        let pairs = random_gnp(60, 0.05, 17);
        let g = Graph::from_label_pairs(&pairs).unwrap();
        let degree_sum: usize = (0..g.node_count() as NodeId)
            .map(|u| g.degree(u).unwrap())
            .sum();
        assert_eq!(degree_sum, 2 * g.edge_count());
    }
}
