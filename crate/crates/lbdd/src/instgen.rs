//! Seeded synthetic instances: uniform points in the unit square with
//! either straight-line costs or shortest-path costs over a random
//! geometric road graph.

use lbdd_core::{Cost, CostMatrix, PenaltySpec, ProblemInstance};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Distance units per unit of the square.
const SCALE: f64 = 1000.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CostSource {
    Euclidean,
    RoadGraph { nodes: usize, avg_degree: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub seed: u64,
    pub n: usize,
    /// Demands per service center.
    pub ratio: usize,
    /// Total capacity as a fraction of `n`, in `(0, 1]`.
    pub theta: f64,
    /// Inclusive range for the constant per-center penalty.
    pub penalty_range: (Cost, Cost),
    pub cost_source: CostSource,
    /// Reject configs that yield zero total capacity.
    pub strict: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            n: 100,
            ratio: 10,
            theta: 0.7,
            penalty_range: (1, 200),
            cost_source: CostSource::Euclidean,
            strict: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenError {
    #[error("demand count must be positive")]
    NoDemand,
    #[error("ratio must be positive")]
    ZeroRatio,
    #[error("theta must lie in (0, 1]")]
    ThetaOutOfRange,
    #[error("penalty range must satisfy 1 <= lo <= hi, got {lo}:{hi}")]
    BadPenaltyRange { lo: Cost, hi: Cost },
    #[error("strict mode needs positive total capacity")]
    ZeroCapacity,
    #[error("road graph needs at least {needed} nodes and degree >= 1")]
    GraphTooSmall { needed: usize },
    #[error("graph is disconnected: vertex {from} cannot reach vertex {to}")]
    Disconnected { from: usize, to: usize },
    #[error("vertex {vertex} out of range for a {nodes}-vertex graph")]
    VertexOutOfRange { vertex: usize, nodes: usize },
}

/// `max(1, floor(n / ratio))`.
pub fn center_count(n: usize, ratio: usize) -> usize {
    (n / ratio.max(1)).max(1)
}

/// `round(theta * n)`.
pub fn total_capacity(n: usize, theta: f64) -> usize {
    (theta * n as f64).round() as usize
}

pub fn generate(config: &GenConfig) -> Result<ProblemInstance, GenError> {
    let GenConfig {
        seed,
        n,
        ratio,
        theta,
        penalty_range: (lo, hi),
        cost_source,
        strict,
    } = *config;
    if n == 0 {
        return Err(GenError::NoDemand);
    }
    if ratio == 0 {
        return Err(GenError::ZeroRatio);
    }
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(GenError::ThetaOutOfRange);
    }
    if lo < 1 || lo > hi {
        return Err(GenError::BadPenaltyRange { lo, hi });
    }
    let k = center_count(n, ratio);
    let capacity = total_capacity(n, theta);
    if strict && capacity == 0 {
        return Err(GenError::ZeroCapacity);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut capacities = vec![0usize; k];
    for _ in 0..capacity {
        capacities[rng.random_range(0..k)] += 1;
    }
    let penalties: Vec<Cost> = (0..k).map(|_| rng.random_range(lo..=hi)).collect();

    let cost_matrix = match cost_source {
        CostSource::Euclidean => {
            let centers = random_points(&mut rng, k);
            let demands = random_points(&mut rng, n);
            let data = demands
                .iter()
                .flat_map(|&d| centers.iter().map(move |&c| scaled_distance(d, c)))
                .collect();
            CostMatrix::new(n, k, data).expect("n x k entries")
        }
        CostSource::RoadGraph { nodes, avg_degree } => {
            if nodes < k || avg_degree == 0 {
                return Err(GenError::GraphTooSmall { needed: k });
            }
            let graph = WeightedGraph::random_geometric(&mut rng, nodes, avg_degree);
            let centers = sample(&mut rng, nodes, k).into_vec();
            let demands: Vec<usize> = (0..n).map(|_| rng.random_range(0..nodes)).collect();
            apsp_costs(&graph, &centers, &demands)?
        }
    };

    Ok(ProblemInstance::new(
        capacities
            .into_iter()
            .zip(penalties)
            .map(|(c, p)| (c, PenaltySpec::Constant(p)))
            .collect(),
        cost_matrix,
    ))
}

fn random_points(rng: &mut ChaCha8Rng, count: usize) -> Vec<(f64, f64)> {
    (0..count).map(|_| (rng.random::<f64>(), rng.random::<f64>())).collect()
}

fn scaled_distance(a: (f64, f64), b: (f64, f64)) -> Cost {
    let d = ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
    ((d * SCALE).round() as Cost).max(1)
}

/// Undirected graph with positive integer edge weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedGraph {
    pub nodes: usize,
    pub edges: Vec<(usize, usize, Cost)>,
}

impl WeightedGraph {
    pub fn new(nodes: usize) -> Self {
        Self {
            nodes,
            edges: Vec::new(),
        }
    }

    pub fn add_edge(&mut self, a: usize, b: usize, weight: Cost) {
        self.edges.push((a, b, weight));
    }

    /// Points in the unit square, each joined to its `avg_degree / 2`
    /// nearest neighbors (at least one), plus a chain through all nodes in
    /// index order so the graph is connected.
    pub fn random_geometric(rng: &mut ChaCha8Rng, nodes: usize, avg_degree: usize) -> Self {
        let points = random_points(rng, nodes);
        let mut graph = Self::new(nodes);
        let neighbors = (avg_degree / 2).max(1).min(nodes.saturating_sub(1));
        let mut order: Vec<usize> = Vec::with_capacity(nodes);
        for u in 0..nodes {
            order.clear();
            order.extend((0..nodes).filter(|&v| v != u));
            let dist = |v: usize| scaled_distance(points[u], points[v]);
            order.sort_by_key(|&v| (dist(v), v));
            for &v in &order[..neighbors] {
                graph.add_edge(u, v, dist(v));
            }
        }
        for u in 1..nodes {
            graph.add_edge(u - 1, u, scaled_distance(points[u - 1], points[u]));
        }
        graph
    }

    /// All-pairs shortest distances (Floyd-Warshall). `None` marks
    /// unreachable pairs.
    pub fn all_pairs(&self) -> Vec<Vec<Option<Cost>>> {
        let n = self.nodes;
        let mut dist = vec![vec![None; n]; n];
        for (v, row) in dist.iter_mut().enumerate() {
            row[v] = Some(0);
        }
        for &(a, b, w) in &self.edges {
            for (x, y) in [(a, b), (b, a)] {
                if dist[x][y].is_none_or(|d| w < d) {
                    dist[x][y] = Some(w);
                }
            }
        }
        for m in 0..n {
            let via = dist[m].clone();
            for row in dist.iter_mut() {
                let Some(to_m) = row[m] else { continue };
                for (cell, from_m) in row.iter_mut().zip(&via) {
                    if let Some(from_m) = from_m {
                        let cand = to_m + from_m;
                        if cell.is_none_or(|d| cand < d) {
                            *cell = Some(cand);
                        }
                    }
                }
            }
        }
        dist
    }
}

/// Cost matrix of shortest-path distances from each demand vertex to each
/// center vertex. Zero distances are raised to 1.
pub fn apsp_costs(
    graph: &WeightedGraph,
    centers: &[usize],
    demands: &[usize],
) -> Result<CostMatrix, GenError> {
    let nodes = graph.nodes;
    if let Some(&vertex) = centers.iter().chain(demands).find(|&&v| v >= nodes) {
        return Err(GenError::VertexOutOfRange { vertex, nodes });
    }
    let dist = graph.all_pairs();
    let mut data = Vec::with_capacity(demands.len() * centers.len());
    for &d in demands {
        for &c in centers {
            let cost = dist[d][c].ok_or(GenError::Disconnected { from: d, to: c })?;
            data.push(cost.max(1));
        }
    }
    Ok(CostMatrix::new(demands.len(), centers.len(), data).expect("dimensions match"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_yields_center_count() {
        assert_eq!(center_count(65771, 500), 131);
        assert_eq!(center_count(65829, 900), 73);
        assert_eq!(center_count(5, 500), 1);
    }

    #[test]
    fn path_graph_distance() {
        let mut g = WeightedGraph::new(3);
        g.add_edge(0, 1, 2);
        g.add_edge(1, 2, 3);
        let cm = apsp_costs(&g, &[2], &[0]).unwrap();
        assert_eq!(cm.get(0, 0), 5);
    }

    #[test]
    fn colocated_demand_costs_one() {
        let mut g = WeightedGraph::new(2);
        g.add_edge(0, 1, 7);
        let cm = apsp_costs(&g, &[1], &[1, 0]).unwrap();
        assert_eq!(cm.row(0), &[1]);
        assert_eq!(cm.row(1), &[7]);
    }

    #[test]
    fn disconnected_graph_rejected() {
        let g = WeightedGraph::new(2);
        assert_eq!(
            apsp_costs(&g, &[1], &[0]),
            Err(GenError::Disconnected { from: 0, to: 1 })
        );
    }

    #[test]
    fn config_errors() {
        let base = GenConfig::default();
        let bad = |f: fn(&mut GenConfig)| {
            let mut c = base.clone();
            f(&mut c);
            generate(&c).unwrap_err()
        };
        assert_eq!(bad(|c| c.n = 0), GenError::NoDemand);
        assert_eq!(bad(|c| c.ratio = 0), GenError::ZeroRatio);
        assert_eq!(bad(|c| c.theta = 0.0), GenError::ThetaOutOfRange);
        assert_eq!(bad(|c| c.theta = 1.5), GenError::ThetaOutOfRange);
        assert_eq!(bad(|c| c.penalty_range = (5, 2)), GenError::BadPenaltyRange { lo: 5, hi: 2 });
        assert_eq!(
            bad(|c| {
                c.n = 1;
                c.theta = 0.1;
                c.strict = true;
            }),
            GenError::ZeroCapacity
        );
    }
}
