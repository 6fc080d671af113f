//! Soft random geometric graph realizations.
//!
//! Each unordered pair `(i, j)` carries its own uniform draw keyed on
//! `(seed, i, j)`, so an edge outcome never depends on which other pairs were
//! evaluated, or in what order. That lets [`connectivity_outcome`] stop early
//! or skip far pairs while agreeing exactly with [`sample_graph`].

use std::collections::HashMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::channel::ChannelModel;
use crate::geometry::{Domain, NodeSet, Point};
use crate::rng::pair_uniform;

/// Pairs whose connection probability falls below this are never linked.
pub const NEGLIGIBLE_LINK: f64 = 1e-14;

/// Largest node count accepted by the enumeration oracles.
pub const MAX_ENUMERATION_NODES: usize = 5;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("exact enumeration supports at most {max} nodes, got {got}")]
    TooManyNodes { got: usize, max: usize },
    #[error("edge ({0}, {1}) is out of range or a self-loop")]
    BadEdge(usize, usize),
}

pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    components: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
            components: n,
        }
    }

    pub fn find(&mut self, mut i: usize) -> usize {
        let mut root = i;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while i != root {
            let next = self.parent[i];
            self.parent[i] = root;
            i = next;
        }
        root
    }

    /// Returns true when the call merged two components.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        self.components -= 1;
        true
    }

    pub fn components(&self) -> usize {
        self.components
    }
}

/// Link probability `χ(a, b) · H(|a − b|)` with negligible values zeroed.
#[inline]
pub fn link_probability(domain: &Domain, channel: &ChannelModel, a: Point, b: Point) -> f64 {
    let p = channel.connect_prob(a.distance(b));
    if p < NEGLIGIBLE_LINK || !domain.visible(a, b) {
        0.0
    } else {
        p
    }
}

/// Edge decision for pair `(i, j)` given its link probability.
#[inline]
pub fn edge_present(seed: u64, i: usize, j: usize, p: f64) -> bool {
    p > 0.0 && pair_uniform(seed, i, j) < p
}

/// One realized graph.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSample {
    node_count: usize,
    edges: Vec<(usize, usize)>,
    /// Seed of the node set the graph was built on.
    pub node_seed: u64,
    /// Seed keying the per-pair edge draws.
    pub edge_seed: u64,
    pub domain: Option<Domain>,
}

impl GraphSample {
    /// A bare graph from an edge list; pairs are normalized to `i < j` and
    /// deduplicated.
    pub fn from_edges(node_count: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut norm = Vec::with_capacity(edges.len());
        for &(i, j) in edges {
            if i == j || i >= node_count || j >= node_count {
                return Err(GraphError::BadEdge(i, j));
            }
            norm.push((i.min(j), i.max(j)));
        }
        norm.sort_unstable();
        norm.dedup();
        Ok(GraphSample {
            node_count,
            edges: norm,
            node_seed: 0,
            edge_seed: 0,
            domain: None,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.node_count];
        for &(i, j) in &self.edges {
            deg[i] += 1;
            deg[j] += 1;
        }
        deg
    }

    /// Exactly one component; the empty graph counts as connected.
    pub fn is_connected(&self) -> bool {
        if self.node_count <= 1 {
            return true;
        }
        let mut uf = UnionFind::new(self.node_count);
        for &(i, j) in &self.edges {
            uf.union(i, j);
            if uf.components() == 1 {
                return true;
            }
        }
        false
    }

    pub fn count_isolated(&self) -> usize {
        self.degrees().iter().filter(|&&d| d == 0).count()
    }

    /// Edge list CSV with header `i,j`.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "i,j")?;
        for (i, j) in &self.edges {
            writeln!(out, "{i},{j}")?;
        }
        Ok(())
    }
}

/// Realizes the soft graph on `nodes`. Rows of the pair matrix are evaluated
/// in parallel; the output does not depend on the schedule.
pub fn sample_graph(nodes: &NodeSet, domain: &Domain, channel: &ChannelModel, seed: u64) -> GraphSample {
    let pos = &nodes.positions;
    let edges: Vec<(usize, usize)> = (0..pos.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            (i + 1..pos.len()).filter_map(move |j| {
                let p = link_probability(domain, channel, pos[i], pos[j]);
                edge_present(seed, i, j, p).then_some((i, j))
            })
        })
        .collect();
    GraphSample {
        node_count: pos.len(),
        edges,
        node_seed: nodes.seed,
        edge_seed: seed,
        domain: Some(domain.clone()),
    }
}

/// Connectivity and isolation of one realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Outcome {
    pub connected: bool,
    pub isolated: usize,
}

impl Outcome {
    pub fn no_isolated(&self) -> bool {
        self.isolated == 0
    }
}

type Cell = [i64; 3];

fn cell_of(p: Point, h: f64) -> Cell {
    [(p.x / h).floor() as i64, (p.y / h).floor() as i64, (p.z / h).floor() as i64]
}

fn adjacent(a: Cell, b: Cell) -> bool {
    (a[0] - b[0]).abs() <= 1 && (a[1] - b[1]).abs() <= 1 && (a[2] - b[2]).abs() <= 1
}

/// Same answer as `sample_graph(..)` followed by `is_connected` and
/// `count_isolated`, without materializing the edge list.
///
/// Near pairs (same or adjacent grid cells of side `r0`) are drawn first and
/// the scan stops as soon as the graph is connected; otherwise every
/// remaining pair inside the link range is drawn too.
pub fn connectivity_outcome(nodes: &NodeSet, domain: &Domain, channel: &ChannelModel, seed: u64) -> Outcome {
    let pos = &nodes.positions;
    let n = pos.len();
    if n <= 1 {
        return Outcome {
            connected: true,
            isolated: n,
        };
    }
    let h = channel.r0();
    let cells: Vec<Cell> = pos.iter().map(|&p| cell_of(p, h)).collect();
    let mut buckets: HashMap<Cell, Vec<usize>> = HashMap::new();
    for (i, c) in cells.iter().enumerate() {
        buckets.entry(*c).or_default().push(i);
    }
    let dz: &[i64] = if nodes.dimension == 3 { &[-1, 0, 1] } else { &[0] };

    let mut uf = UnionFind::new(n);
    let mut linked = vec![false; n];
    let mut link = |i: usize, j: usize, uf: &mut UnionFind| {
        let p = link_probability(domain, channel, pos[i], pos[j]);
        if edge_present(seed, i, j, p) {
            uf.union(i, j);
            linked[i] = true;
            linked[j] = true;
        }
    };

    for (i, &c) in cells.iter().enumerate() {
        for dx in -1..=1 {
            for dy in -1..=1 {
                for &dzz in dz {
                    let Some(bucket) = buckets.get(&[c[0] + dx, c[1] + dy, c[2] + dzz]) else {
                        continue;
                    };
                    for &j in bucket {
                        if j > i {
                            link(i, j, &mut uf);
                        }
                    }
                }
            }
            if uf.components() == 1 {
                return Outcome {
                    connected: true,
                    isolated: 0,
                };
            }
        }
    }

    let reach_sq = channel.range_for(NEGLIGIBLE_LINK).powi(2);
    for i in 0..n {
        for j in i + 1..n {
            if adjacent(cells[i], cells[j]) || (pos[i] - pos[j]).norm_sq() > reach_sq {
                continue;
            }
            link(i, j, &mut uf);
        }
    }
    Outcome {
        connected: uf.components() == 1,
        isolated: linked.iter().filter(|&&l| !l).count(),
    }
}

fn enumerate<F: Fn(usize, &[(usize, usize)]) -> bool>(
    nodes: &NodeSet,
    domain: &Domain,
    channel: &ChannelModel,
    accept: F,
) -> Result<f64, GraphError> {
    let n = nodes.len();
    if n > MAX_ENUMERATION_NODES {
        return Err(GraphError::TooManyNodes {
            got: n,
            max: MAX_ENUMERATION_NODES,
        });
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let probs: Vec<f64> = pairs
        .iter()
        .map(|&(i, j)| {
            let (a, b) = (nodes.positions[i], nodes.positions[j]);
            if domain.visible(a, b) {
                channel.connect_prob(a.distance(b))
            } else {
                0.0
            }
        })
        .collect();
    let mut total = 0.0;
    let mut chosen = Vec::with_capacity(pairs.len());
    for mask in 0u32..(1 << pairs.len()) {
        chosen.clear();
        let mut weight = 1.0;
        for (k, &p) in probs.iter().enumerate() {
            if mask & (1 << k) != 0 {
                weight *= p;
                chosen.push(pairs[k]);
            } else {
                weight *= 1.0 - p;
            }
        }
        if weight > 0.0 && accept(n, &chosen) {
            total += weight;
        }
    }
    Ok(total)
}

/// Exact probability that the graph on these fixed nodes is connected,
/// by summing over every edge configuration.
pub fn exact_connection_prob(nodes: &NodeSet, domain: &Domain, channel: &ChannelModel) -> Result<f64, GraphError> {
    enumerate(nodes, domain, channel, |n, edges| {
        GraphSample::from_edges(n, edges).map(|g| g.is_connected()).unwrap_or(false)
    })
}

/// Exact probability that no node is isolated.
pub fn exact_no_isolated_prob(nodes: &NodeSet, domain: &Domain, channel: &ChannelModel) -> Result<f64, GraphError> {
    enumerate(nodes, domain, channel, |n, edges| {
        GraphSample::from_edges(n, edges).map(|g| g.count_isolated() == 0).unwrap_or(false)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{sample_binomial, sample_poisson};

    fn unit_channel() -> ChannelModel {
        ChannelModel::free_space(1.0).unwrap()
    }

    fn equilateral(side: f64) -> NodeSet {
        NodeSet::fixed(
            2,
            vec![
                Point::planar(0.0, 0.0),
                Point::planar(side, 0.0),
                Point::planar(side / 2.0, side * 3f64.sqrt() / 2.0),
            ],
        )
    }

    #[test]
    fn connectivity_conventions() {
        assert!(GraphSample::from_edges(0, &[]).unwrap().is_connected());
        assert!(GraphSample::from_edges(1, &[]).unwrap().is_connected());
        assert!(!GraphSample::from_edges(2, &[]).unwrap().is_connected());
        assert!(GraphSample::from_edges(3, &[(0, 0)]).is_err());
    }

    #[test]
    fn isolated_counts() {
        let complete: Vec<_> = (0..5).flat_map(|i| (i + 1..5).map(move |j| (i, j))).collect();
        assert_eq!(GraphSample::from_edges(5, &complete).unwrap().count_isolated(), 0);
        assert_eq!(GraphSample::from_edges(5, &[]).unwrap().count_isolated(), 5);
        let path = GraphSample::from_edges(3, &[(0, 1), (2, 1)]).unwrap();
        assert_eq!(path.count_isolated(), 0);
        assert!(path.is_connected());
    }

    #[test]
    fn hopeless_channel_gives_no_edges() {
        let d = Domain::disk(1.0).unwrap();
        let nodes = sample_binomial(&d, 100, 4);
        let c = ChannelModel::free_space(1e9).unwrap();
        assert!(sample_graph(&nodes, &d, &c, 1).edges().is_empty());
    }

    #[test]
    fn coincident_nodes_always_link() {
        let d = Domain::disk(1.0).unwrap();
        let nodes = NodeSet::fixed(2, vec![Point::planar(0.3, 0.1); 2]);
        for seed in 0..200 {
            assert_eq!(sample_graph(&nodes, &d, &unit_channel(), seed).edges(), &[(0, 1)]);
        }
    }

    #[test]
    fn edge_frequency_at_r0() {
        let d = Domain::disk(5.0).unwrap();
        let nodes = NodeSet::fixed(2, vec![Point::planar(0.0, 0.0), Point::planar(1.0, 0.0)]);
        let trials = 100_000;
        let hits = (0..trials)
            .filter(|&s| !sample_graph(&nodes, &d, &unit_channel(), s).edges().is_empty())
            .count();
        let p = (-1.0f64).exp();
        let freq = hits as f64 / trials as f64;
        assert!((freq - p).abs() < 3.0 * (p * (1.0 - p) / trials as f64).sqrt(), "{freq}");
    }

    #[test]
    fn edges_respect_line_of_sight() {
        let d = Domain::annulus(1.0, 3.0).unwrap();
        let nodes = sample_binomial(&d, 300, 2);
        let g = sample_graph(&nodes, &d, &unit_channel(), 9);
        assert!(!g.edges().is_empty());
        for &(i, j) in g.edges() {
            assert!(i < j);
            assert!(d.visible(nodes.positions[i], nodes.positions[j]));
        }
    }

    #[test]
    fn enumeration_small_cases() {
        let d = Domain::disk(5.0).unwrap();
        let c = unit_channel();
        let one = NodeSet::fixed(2, vec![Point::ORIGIN]);
        assert_eq!(exact_connection_prob(&one, &d, &c).unwrap(), 1.0);
        assert_eq!(exact_no_isolated_prob(&one, &d, &c).unwrap(), 0.0);
        let two = NodeSet::fixed(2, vec![Point::ORIGIN, Point::planar(1.0, 0.0)]);
        let e1 = (-1.0f64).exp();
        assert!((exact_connection_prob(&two, &d, &c).unwrap() - e1).abs() < 1e-15);
        assert!((exact_no_isolated_prob(&two, &d, &c).unwrap() - e1).abs() < 1e-15);
    }

    #[test]
    fn enumeration_triangle_matches_inclusion_exclusion() {
        // connected iff at least two of the three edges: p³ + 3p²(1-p)
        // no isolated node on 3 vertices is the same event
        let d = Domain::disk(5.0).unwrap();
        let c = unit_channel();
        let tri = equilateral(1.0);
        let p = (-1.0f64).exp();
        let hand = p.powi(3) + 3.0 * p * p * (1.0 - p);
        let conn = exact_connection_prob(&tri, &d, &c).unwrap();
        assert!((conn - hand).abs() < 1e-15);
        assert!((conn - 0.306_432).abs() < 1e-6);
        assert!(exact_no_isolated_prob(&tri, &d, &c).unwrap() >= conn - 1e-15);
    }

    #[test]
    fn enumeration_guard() {
        let d = Domain::disk(5.0).unwrap();
        let six = NodeSet::fixed(2, vec![Point::ORIGIN; 6]);
        assert_eq!(
            exact_connection_prob(&six, &d, &unit_channel()),
            Err(GraphError::TooManyNodes { got: 6, max: 5 })
        );
    }

    #[test]
    fn enumeration_respects_blocking() {
        let d = Domain::annulus(1.0, 4.0).unwrap();
        let nodes = NodeSet::fixed(2, vec![Point::planar(2.0, 0.0), Point::planar(-2.0, 0.0)]);
        assert_eq!(exact_connection_prob(&nodes, &d, &unit_channel()).unwrap(), 0.0);
    }

    #[test]
    fn outcome_agrees_with_full_graph() {
        let c = ChannelModel::free_space(1.0).unwrap();
        let domains = [
            Domain::annulus(1.0, 4.0).unwrap(),
            Domain::spherical_shell(1.0, 3.0).unwrap(),
            Domain::square(10.0, vec![crate::geometry::Obstacle::new(5.0, 5.0, 1.5)]).unwrap(),
        ];
        for d in &domains {
            for seed in 0..60u64 {
                let rho = 0.5 + (seed % 6) as f64 * 0.5;
                let nodes = sample_poisson(d, rho, seed);
                let g = sample_graph(&nodes, d, &c, seed ^ 0xABCD);
                let fast = connectivity_outcome(&nodes, d, &c, seed ^ 0xABCD);
                assert_eq!(fast.connected, g.is_connected(), "{d} seed {seed}");
                if !fast.connected {
                    assert_eq!(fast.isolated, g.count_isolated());
                } else if nodes.len() >= 2 {
                    assert_eq!(g.count_isolated(), 0);
                }
            }
        }
    }

    #[test]
    fn edge_csv() {
        let g = GraphSample::from_edges(3, &[(1, 0), (1, 2)]).unwrap();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "i,j\n0,1\n1,2\n");
    }
}
