//! Graphs, shift operators and the two random-graph generators.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg;
use crate::rng::{stream, stream_rng};

/// Scale applied on top of the largest eigenvalue when normalizing shifts.
pub const NORMALIZATION_MARGIN: f64 = 1.1;

/// Number of reseeded attempts before a random generator gives up.
pub const MAX_GENERATION_ATTEMPTS: usize = 100;

/// Undirected weighted graph with optional planar node positions.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    adjacency: DMatrix<f64>,
    coordinates: Option<Vec<[f64; 2]>>,
}

impl Graph {
    /// Validates `adjacency`: square, symmetric, nonnegative, zero diagonal,
    /// connected.
    pub fn new(adjacency: DMatrix<f64>) -> Result<Self> {
        let n = adjacency.nrows();
        if n == 0 || adjacency.ncols() != n {
            return Err(Error::Dimension {
                what: "adjacency must be square and nonempty",
                expected: n.max(1),
                got: adjacency.ncols(),
            });
        }
        for i in 0..n {
            if adjacency[(i, i)] != 0.0 {
                return Err(Error::InvalidParameter {
                    name: "adjacency",
                    reason: format!("self-loop weight {} at node {i}", adjacency[(i, i)]),
                });
            }
            for j in 0..n {
                let w = adjacency[(i, j)];
                if !(w.is_finite() && w >= 0.0) {
                    return Err(Error::InvalidParameter {
                        name: "adjacency",
                        reason: format!("weight {w} at ({i}, {j}) is not a nonnegative number"),
                    });
                }
                if w != adjacency[(j, i)] {
                    return Err(Error::InvalidParameter {
                        name: "adjacency",
                        reason: format!("not symmetric at ({i}, {j})"),
                    });
                }
            }
        }
        let graph = Self {
            adjacency,
            coordinates: None,
        };
        if let Some(unreached) = graph.first_unreached() {
            return Err(Error::Disconnected { unreached });
        }
        Ok(graph)
    }

    /// Builds a graph from 0-based `(k, l, weight)` triples.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut w = DMatrix::zeros(n, n);
        for &(k, l, weight) in edges {
            if k >= n || l >= n {
                return Err(Error::Dimension {
                    what: "edge endpoint out of range",
                    expected: n,
                    got: k.max(l),
                });
            }
            w[(k, l)] = weight;
            w[(l, k)] = weight;
        }
        Self::new(w)
    }

    pub fn with_coordinates(mut self, coordinates: Vec<[f64; 2]>) -> Result<Self> {
        if coordinates.len() != self.n_nodes() {
            return Err(Error::Dimension {
                what: "coordinate rows",
                expected: self.n_nodes(),
                got: coordinates.len(),
            });
        }
        self.coordinates = Some(coordinates);
        Ok(self)
    }

    pub fn n_nodes(&self) -> usize {
        self.adjacency.nrows()
    }

    pub fn adjacency(&self) -> &DMatrix<f64> {
        &self.adjacency
    }

    pub fn coordinates(&self) -> Option<&[[f64; 2]]> {
        self.coordinates.as_deref()
    }

    /// Weighted degrees `W 1`.
    pub fn degrees(&self) -> Vec<f64> {
        self.adjacency.row_iter().map(|r| r.sum()).collect()
    }

    /// Combinatorial Laplacian `D − W`.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let mut l = -self.adjacency.clone();
        for (i, d) in self.degrees().into_iter().enumerate() {
            l[(i, i)] = d;
        }
        l
    }

    /// Neighborhood of `k` including `k` itself, in increasing order.
    pub fn neighborhood(&self, k: usize) -> Vec<usize> {
        (0..self.n_nodes())
            .filter(|&l| l == k || self.adjacency[(k, l)] != 0.0)
            .collect()
    }

    pub fn neighborhoods(&self) -> Vec<Vec<usize>> {
        (0..self.n_nodes()).map(|k| self.neighborhood(k)).collect()
    }

    pub fn is_edge(&self, k: usize, l: usize) -> bool {
        k != l && self.adjacency[(k, l)] != 0.0
    }

    pub fn edge_count(&self) -> usize {
        let n = self.n_nodes();
        (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.adjacency[(i, j)] != 0.0)
            .count()
    }

    /// Breadth-first search from node 0; the first node left unvisited.
    fn first_unreached(&self) -> Option<usize> {
        first_unreached(&self.adjacency)
    }
}

fn first_unreached(adjacency: &DMatrix<f64>) -> Option<usize> {
    let n = adjacency.nrows();
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(k) = queue.pop_front() {
        for l in 0..n {
            if !seen[l] && adjacency[(k, l)] != 0.0 {
                seen[l] = true;
                queue.push_back(l);
            }
        }
    }
    seen.iter().position(|s| !s)
}

/// Which matrix plays the role of the shift operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShiftKind {
    Adjacency,
    /// `W / (1.1 λ_max(W))`.
    NormalizedAdjacency,
    Laplacian,
    /// `D^{-1/2} L D^{-1/2}`.
    NormalizedLaplacian,
    Custom,
}

impl ShiftKind {
    pub fn name(self) -> &'static str {
        match self {
            ShiftKind::Adjacency => "adjacency",
            ShiftKind::NormalizedAdjacency => "normalized-adjacency",
            ShiftKind::Laplacian => "laplacian",
            ShiftKind::NormalizedLaplacian => "normalized-laplacian",
            ShiftKind::Custom => "custom",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "adjacency" => ShiftKind::Adjacency,
            "normalized-adjacency" => ShiftKind::NormalizedAdjacency,
            "laplacian" => ShiftKind::Laplacian,
            "normalized-laplacian" => ShiftKind::NormalizedLaplacian,
            "custom" => ShiftKind::Custom,
            _ => return None,
        })
    }
}

/// An `N×N` shift operator whose sparsity respects a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftMatrix {
    s: DMatrix<f64>,
    kind: ShiftKind,
}

impl ShiftMatrix {
    /// Wraps an arbitrary matrix, checking that off-diagonal nonzeros sit on
    /// edges of `graph`.
    pub fn custom(s: DMatrix<f64>, graph: &Graph) -> Result<Self> {
        let n = graph.n_nodes();
        if s.nrows() != n || s.ncols() != n {
            return Err(Error::Dimension {
                what: "shift matrix size",
                expected: n,
                got: s.nrows(),
            });
        }
        for k in 0..n {
            for l in 0..n {
                if k != l && s[(k, l)] != 0.0 && !graph.is_edge(k, l) {
                    return Err(Error::InvalidParameter {
                        name: "shift",
                        reason: format!("nonzero s[{k},{l}] without an edge"),
                    });
                }
            }
        }
        Ok(Self {
            s,
            kind: ShiftKind::Custom,
        })
    }

    /// Wraps a matrix without a graph check. Used for hand-built shifts in
    /// tests and for `S = 0`/`S = cI` style sources.
    pub fn unchecked(s: DMatrix<f64>, kind: ShiftKind) -> Self {
        Self { s, kind }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.s
    }

    pub fn kind(&self) -> ShiftKind {
        self.kind
    }

    pub fn n_nodes(&self) -> usize {
        self.s.nrows()
    }

    pub fn spectral_radius(&self) -> Result<f64> {
        linalg::spectral_radius(&self.s)
    }
}

/// Derives the shift operator of the requested kind from `graph`.
pub fn build_shift(graph: &Graph, kind: ShiftKind) -> Result<ShiftMatrix> {
    let w = graph.adjacency();
    let s = match kind {
        ShiftKind::Adjacency | ShiftKind::Custom => w.clone(),
        ShiftKind::NormalizedAdjacency => {
            check_degrees(graph)?;
            let lambda = linalg::lambda_max_symmetric(w);
            w / (NORMALIZATION_MARGIN * lambda)
        }
        ShiftKind::Laplacian => graph.laplacian(),
        ShiftKind::NormalizedLaplacian => {
            let degrees = check_degrees(graph)?;
            let inv_sqrt: Vec<f64> = degrees.iter().map(|d| 1.0 / libm::sqrt(*d)).collect();
            let mut l = graph.laplacian();
            for i in 0..l.nrows() {
                for j in 0..l.ncols() {
                    l[(i, j)] *= inv_sqrt[i] * inv_sqrt[j];
                }
            }
            l
        }
    };
    Ok(ShiftMatrix { s, kind })
}

fn check_degrees(graph: &Graph) -> Result<Vec<f64>> {
    let degrees = graph.degrees();
    if let Some(node) = degrees.iter().position(|&d| d <= 0.0) {
        return Err(Error::DegenerateDegree { node });
    }
    Ok(degrees)
}

/// Thresholded Gaussian random graph with a signed shift operator.
///
/// A symmetric matrix with standard-normal off-diagonal entries is drawn,
/// entries with magnitude outside `[1.2, 1.8]` are dropped, survivors are
/// shrunk by 1.1 in magnitude (landing in `[0.1, 0.7]`), and the result is
/// divided by `1.1 ρ`. The returned graph carries the unnormalized magnitudes
/// as edge weights; the shift keeps the signs. Disconnected draws are
/// rejected and redrawn with `seed + 1`, up to 100 attempts.
pub fn gen_erdos_renyi_thresholded(n: usize, seed: u64) -> Result<(Graph, ShiftMatrix)> {
    if n < 2 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: format!("need at least 2 nodes, got {n}"),
        });
    }
    for attempt in 0..MAX_GENERATION_ATTEMPTS as u64 {
        let mut rng = stream_rng(seed.wrapping_add(attempt), stream::GRAPH);
        let mut signed = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in (i + 1)..n {
                let v: f64 = rng.sample(StandardNormal);
                let a = v.abs();
                if (1.2..=1.8).contains(&a) {
                    let shrunk = v.signum() * (a - 1.1);
                    signed[(i, j)] = shrunk;
                    signed[(j, i)] = shrunk;
                }
            }
        }
        let magnitudes = signed.map(f64::abs);
        if first_unreached(&magnitudes).is_some() {
            continue;
        }
        let graph = Graph::new(magnitudes)?;
        let radius = linalg::spectral_radius(&signed)?;
        let s = signed / (NORMALIZATION_MARGIN * radius);
        return Ok((graph, ShiftMatrix::unchecked(s, ShiftKind::Custom)));
    }
    Err(Error::GenerationFailed {
        attempts: MAX_GENERATION_ATTEMPTS,
    })
}

/// Random sensor network: `n` uniform points in the unit square joined to
/// their `k` nearest neighbors. Redrawn with `seed + 1` while disconnected.
pub fn gen_knn_sensor(n: usize, k: usize, seed: u64) -> Result<Graph> {
    if k == 0 || n <= k {
        return Err(Error::InvalidParameter {
            name: "k",
            reason: format!("need n > k >= 1, got n = {n}, k = {k}"),
        });
    }
    for attempt in 0..MAX_GENERATION_ATTEMPTS as u64 {
        let mut rng = stream_rng(seed.wrapping_add(attempt), stream::GRAPH);
        let mut points: Vec<[f64; 2]> = (0..n)
            .map(|_| [rng.random::<f64>(), rng.random::<f64>()])
            .collect();
        // exact coincidences get a small jitter
        for i in 1..n {
            while points[..i].contains(&points[i]) {
                points[i][0] += 1e-9 * (rng.random::<f64>() - 0.5);
                points[i][1] += 1e-9 * (rng.random::<f64>() - 0.5);
            }
        }
        match knn_graph(&points, k) {
            Ok(g) => return Ok(g),
            Err(Error::Disconnected { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::GenerationFailed {
        attempts: MAX_GENERATION_ATTEMPTS,
    })
}

/// Symmetrized k-nearest-neighbor graph over planar points.
///
/// Edge weights are `exp(−d² / 2σ²)` with `σ` the mean distance over all
/// directed k-NN pairs. Ties in distance go to the lower index.
pub fn knn_graph(points: &[[f64; 2]], k: usize) -> Result<Graph> {
    let n = points.len();
    if k == 0 || n <= k {
        return Err(Error::InvalidParameter {
            name: "k",
            reason: format!("need n > k >= 1, got n = {n}, k = {k}"),
        });
    }
    let dist = |a: usize, b: usize| {
        let dx = points[a][0] - points[b][0];
        let dy = points[a][1] - points[b][1];
        libm::sqrt(dx * dx + dy * dy)
    };
    let mut pairs: Vec<(usize, usize, f64)> = Vec::with_capacity(n * k);
    for a in 0..n {
        let mut others: Vec<(f64, usize)> =
            (0..n).filter(|&b| b != a).map(|b| (dist(a, b), b)).collect();
        others.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        for &(d, b) in others.iter().take(k) {
            if d == 0.0 {
                return Err(Error::InvalidParameter {
                    name: "coordinates",
                    reason: format!("nodes {a} and {b} coincide"),
                });
            }
            pairs.push((a, b, d));
        }
    }
    let sigma = pairs.iter().map(|p| p.2).sum::<f64>() / pairs.len() as f64;
    let mut w = DMatrix::zeros(n, n);
    for (a, b, d) in pairs {
        let weight = libm::exp(-d * d / (2.0 * sigma * sigma));
        w[(a, b)] = weight;
        w[(b, a)] = weight;
    }
    Graph::new(w)?.with_coordinates(points.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn path3() -> Graph {
        Graph::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap()
    }

    #[test]
    fn adjacency_shift_is_identity_mapping() {
        let g = path3();
        let s = build_shift(&g, ShiftKind::Adjacency).unwrap();
        assert_eq!(s.matrix(), g.adjacency());
    }

    #[test]
    fn normalized_adjacency_divides_by_margin_times_sqrt2() {
        let g = path3();
        let s = build_shift(&g, ShiftKind::NormalizedAdjacency).unwrap();
        let expected = g.adjacency() / (1.1 * core::f64::consts::SQRT_2);
        assert_relative_eq!(*s.matrix(), expected, epsilon = 1e-14);
        assert_relative_eq!(s.spectral_radius().unwrap(), 1.0 / 1.1, epsilon = 1e-12);
    }

    #[test]
    fn laplacian_is_degree_minus_adjacency() {
        let g = path3();
        let l = build_shift(&g, ShiftKind::Laplacian).unwrap();
        let expected =
            DMatrix::from_row_slice(3, 3, &[1.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 1.0]);
        assert_eq!(*l.matrix(), expected);
        for row in l.matrix().row_iter() {
            assert!(row.sum().abs() < 1e-12);
        }
    }

    #[test]
    fn normalized_laplacian_has_unit_diagonal() {
        let g = path3();
        let s = build_shift(&g, ShiftKind::NormalizedLaplacian).unwrap();
        for i in 0..3 {
            assert_relative_eq!(s.matrix()[(i, i)], 1.0, epsilon = 1e-14);
        }
        assert_relative_eq!(s.matrix()[(0, 1)], -1.0 / core::f64::consts::SQRT_2, epsilon = 1e-14);
    }

    #[test]
    fn disconnected_and_malformed_graphs_are_rejected() {
        let w = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(Graph::new(w), Err(Error::Disconnected { unreached: 2 }));
        let asym = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 2.0, 0.0]);
        assert!(Graph::new(asym).is_err());
        let neg = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, -1.0, 0.0]);
        assert!(Graph::new(neg).is_err());
    }

    #[test]
    fn single_node_graph_has_degenerate_normalized_shift() {
        let g = Graph::new(DMatrix::zeros(1, 1)).unwrap();
        assert_eq!(
            build_shift(&g, ShiftKind::NormalizedAdjacency),
            Err(Error::DegenerateDegree { node: 0 })
        );
        assert!(build_shift(&g, ShiftKind::Laplacian).is_ok());
    }

    #[test]
    fn custom_shift_must_respect_sparsity() {
        let g = path3();
        let mut s = DMatrix::identity(3, 3);
        s[(0, 1)] = 0.5;
        assert!(ShiftMatrix::custom(s.clone(), &g).is_ok());
        s[(0, 2)] = 0.5;
        assert!(ShiftMatrix::custom(s, &g).is_err());
    }

    #[test]
    fn erdos_renyi_magnitudes_and_radius() {
        for seed in 0..5 {
            let (g, s) = gen_erdos_renyi_thresholded(60, seed).unwrap();
            let rho = s.spectral_radius().unwrap();
            assert!((rho - 1.0 / 1.1).abs() < 1e-9, "rho = {rho}");
            for i in 0..60 {
                assert_eq!(s.matrix()[(i, i)], 0.0);
                for j in 0..60 {
                    let w = g.adjacency()[(i, j)];
                    if w != 0.0 {
                        assert!((0.1 - 1e-12..=0.7 + 1e-12).contains(&w), "w = {w}");
                        assert!(s.matrix()[(i, j)] != 0.0);
                    } else {
                        assert_eq!(s.matrix()[(i, j)], 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn erdos_renyi_two_nodes_is_single_edge() {
        let (g, _) = gen_erdos_renyi_thresholded(2, 11).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn knn_sensor_degrees_at_least_k() {
        let g = gen_knn_sensor(60, 5, 3).unwrap();
        for k in 0..60 {
            assert!(g.neighborhood(k).len() - 1 >= 5);
        }
        assert_eq!(g.coordinates().unwrap().len(), 60);
    }

    #[test]
    fn knn_on_collinear_points_is_a_path() {
        let g = knn_graph(&[[0.0, 0.0], [0.5, 0.0], [1.0, 0.0]], 1).unwrap();
        assert!(g.is_edge(0, 1) && g.is_edge(1, 2) && !g.is_edge(0, 2));
    }

    #[test]
    fn shift_kind_names_round_trip() {
        for kind in [
            ShiftKind::Adjacency,
            ShiftKind::NormalizedAdjacency,
            ShiftKind::Laplacian,
            ShiftKind::NormalizedLaplacian,
            ShiftKind::Custom,
        ] {
            assert_eq!(ShiftKind::parse(kind.name()), Some(kind));
        }
    }
}
