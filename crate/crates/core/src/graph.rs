//! Simple undirected graphs and the host-graph toolbox: random regular
//! expanders, bipartite-expansion certificates, set-alternating paths, graph
//! powers and blow-ups.

use std::collections::VecDeque;
use std::fmt::Write as _;

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, HypothesisFailure, Result};

/// Simple undirected graph with sorted, duplicate-free adjacency lists and an
/// optional partition label per vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    labels: Option<Vec<usize>>,
}

impl Graph {
    pub fn empty(num_vertices: usize) -> Self {
        Graph { adjacency: vec![Vec::new(); num_vertices], labels: None }
    }

    /// Builds a graph from an edge list. Duplicate edges collapse; self-loops
    /// and out-of-range endpoints are rejected.
    pub fn from_edges<I>(num_vertices: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adjacency = vec![Vec::new(); num_vertices];
        for (u, v) in edges {
            if u >= num_vertices || v >= num_vertices {
                return Err(Error::invalid(format!(
                    "edge {u}-{v} out of range for {num_vertices} vertices"
                )));
            }
            if u == v {
                return Err(Error::invalid(format!("self-loop at {u}")));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Graph { adjacency, labels: None })
    }

    pub fn complete(num_vertices: usize) -> Self {
        let adjacency = (0..num_vertices)
            .map(|u| (0..num_vertices).filter(|&v| v != u).collect())
            .collect();
        Graph { adjacency, labels: None }
    }

    /// Path `0 - 1 - ... - (n-1)`.
    pub fn path(num_vertices: usize) -> Self {
        Graph::from_edges(num_vertices, (1..num_vertices).map(|v| (v - 1, v)))
            .expect("path edges are valid")
    }

    /// The `p`-th power of the cycle on `n` vertices: `i ~ j` iff their
    /// circular distance is between 1 and `p`.
    pub fn cycle_power(num_vertices: usize, p: usize) -> Self {
        let n = num_vertices;
        let mut edges = Vec::new();
        for i in 0..n {
            for d in 1..=p {
                let j = (i + d) % n;
                if j != i {
                    edges.push((i, j));
                }
            }
        }
        Graph::from_edges(n, edges).expect("cycle power edges are valid")
    }

    pub fn with_labels(mut self, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != self.num_vertices() {
            return Err(Error::invalid(format!(
                "{} labels for {} vertices",
                labels.len(),
                self.num_vertices()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn num_vertices(&self) -> usize {
        self.adjacency.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.num_vertices() && self.adjacency[u].binary_search(&v).is_ok()
    }

    /// The common degree, if every vertex has the same degree.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.adjacency.first().map_or(0, Vec::len);
        self.adjacency.iter().all(|l| l.len() == d).then_some(d)
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Induced subgraph on `vertices` (order kept). Returns the subgraph and
    /// the map from new ids back to the original ids.
    pub fn induced(&self, vertices: &[usize]) -> (Graph, Vec<usize>) {
        let mut index = FxHashMap::default();
        for (i, &v) in vertices.iter().enumerate() {
            index.insert(v, i);
        }
        let adjacency = vertices
            .iter()
            .map(|&v| {
                let mut list: Vec<usize> =
                    self.adjacency[v].iter().filter_map(|w| index.get(w).copied()).collect();
                list.sort_unstable();
                list
            })
            .collect();
        (Graph { adjacency, labels: None }, vertices.to_vec())
    }

    /// Breadth-first distances from `source`, truncated at `limit`.
    pub fn bounded_distances(&self, source: usize, limit: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.num_vertices()];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            if du == limit {
                continue;
            }
            for &w in &self.adjacency[u] {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Serialises to the line format `graph N`, `u v` per edge (`u < v`, sorted),
    /// then `label v c` per vertex when labels are present.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "graph {}", self.num_vertices()).unwrap();
        for (u, v) in self.edges() {
            writeln!(out, "{u} {v}").unwrap();
        }
        if let Some(labels) = &self.labels {
            for (v, c) in labels.iter().enumerate() {
                writeln!(out, "label {v} {c}").unwrap();
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "missing header"))?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some("graph") {
            return Err(Error::parse(1, "expected `graph <num_vertices>`"));
        }
        let n: usize = parse_field(parts.next(), 1)?;
        let mut edges = Vec::new();
        let mut labels: Option<Vec<Option<usize>>> = None;
        for (i, line) in lines {
            let lineno = i + 1;
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields.as_slice() {
                ["label", v, c] => {
                    let v: usize = parse_field(Some(v), lineno)?;
                    let c: usize = parse_field(Some(c), lineno)?;
                    if v >= n {
                        return Err(Error::parse(lineno, format!("label for vertex {v} out of range")));
                    }
                    labels.get_or_insert_with(|| vec![None; n])[v] = Some(c);
                }
                [u, v] => {
                    let u: usize = parse_field(Some(u), lineno)?;
                    let v: usize = parse_field(Some(v), lineno)?;
                    if u >= n || v >= n || u == v {
                        return Err(Error::parse(lineno, format!("bad edge {u} {v}")));
                    }
                    edges.push((u, v));
                }
                _ => return Err(Error::parse(lineno, format!("unrecognised line `{line}`"))),
            }
        }
        let mut g = Graph::from_edges(n, edges)?;
        if let Some(labels) = labels {
            let labels = labels
                .into_iter()
                .enumerate()
                .map(|(v, c)| c.ok_or_else(|| Error::parse(0, format!("vertex {v} has no label"))))
                .collect::<Result<Vec<_>>>()?;
            g.labels = Some(labels);
        }
        Ok(g)
    }
}

pub(crate) fn parse_field<T: std::str::FromStr>(field: Option<&str>, line: usize) -> Result<T> {
    let field = field.ok_or_else(|| Error::parse(line, "missing field"))?;
    field.parse().map_err(|_| Error::parse(line, format!("cannot parse `{field}`")))
}

/// Parameters for the random host graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpanderParams {
    pub eps: Ratio<u64>,
    pub a: usize,
    /// Degree bound; the sampler produces exactly `b`-regular graphs.
    pub b: usize,
    pub seed: u64,
}

impl ExpanderParams {
    pub fn validate(&self) -> Result<()> {
        if *self.eps.numer() == 0 || self.eps >= Ratio::from_integer(1) {
            return Err(Error::invalid("eps must lie in (0, 1)"));
        }
        if self.a == 0 || self.b == 0 {
            return Err(Error::invalid("a and b must be positive"));
        }
        if self.eps * Ratio::from_integer(self.a as u64) < Ratio::from_integer(1) {
            return Err(Error::invalid("eps * a must be at least 1"));
        }
        Ok(())
    }
}

/// Samples a `b`-regular graph on `a * n` vertices as a union of `b / 2`
/// uniformly random Hamiltonian cycles, then removes parallel edges by
/// degree-preserving switches. Deterministic in `params.seed`.
pub fn sample_expander(params: &ExpanderParams, n: usize) -> Result<Graph> {
    let d = params.b;
    if d % 2 == 1 {
        return Err(Error::invalid(format!("degree bound b = {d} must be even")));
    }
    if d < 4 {
        return Err(Error::invalid(format!("degree bound b = {d} must be at least 4")));
    }
    let num_vertices = params.a * n;
    if num_vertices < d + 1 {
        return Err(Error::invalid(format!(
            "{num_vertices} vertices cannot host a {d}-regular graph"
        )));
    }
    if num_vertices == d + 1 {
        return Ok(Graph::complete(num_vertices));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    for _ in 0..64 {
        if let Some(edges) = try_regular(num_vertices, d, &mut rng) {
            return Graph::from_edges(num_vertices, edges);
        }
    }
    Err(Error::fault(format!(
        "collision repair did not converge for a {d}-regular graph on {num_vertices} vertices"
    )))
}

fn ordered(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

fn try_regular(num_vertices: usize, d: usize, rng: &mut ChaCha8Rng) -> Option<Vec<(usize, usize)>> {
    let mut edges = Vec::with_capacity(num_vertices * d / 2);
    let mut count: FxHashMap<(usize, usize), u32> = FxHashMap::default();
    let mut order: Vec<usize> = (0..num_vertices).collect();
    for _ in 0..d / 2 {
        order.shuffle(rng);
        for i in 0..num_vertices {
            let e = ordered(order[i], order[(i + 1) % num_vertices]);
            edges.push(e);
            *count.entry(e).or_insert(0) += 1;
        }
    }
    let mut pending: Vec<usize> = (0..edges.len()).filter(|&i| count[&edges[i]] > 1).collect();
    let budget = 200 * edges.len();
    let mut spent = 0;
    while let Some(idx) = pending.pop() {
        if count[&edges[idx]] <= 1 {
            continue;
        }
        loop {
            spent += 1;
            if spent > budget {
                return None;
            }
            let j = rng.gen_range(0..edges.len());
            if j == idx {
                continue;
            }
            let (u, v) = edges[idx];
            let (x, y) = if rng.gen_bool(0.5) { edges[j] } else { (edges[j].1, edges[j].0) };
            if u == x || u == y || v == x || v == y {
                continue;
            }
            let (ux, vy) = (ordered(u, x), ordered(v, y));
            if count.get(&ux).copied().unwrap_or(0) > 0 || count.get(&vy).copied().unwrap_or(0) > 0 {
                continue;
            }
            let old_j = edges[j];
            *count.get_mut(&edges[idx]).unwrap() -= 1;
            *count.get_mut(&old_j).unwrap() -= 1;
            edges[idx] = ux;
            edges[j] = vy;
            *count.entry(ux).or_insert(0) += 1;
            *count.entry(vy).or_insert(0) += 1;
            if count[&old_j] > 1 {
                pending.push(j);
            }
            break;
        }
    }
    Some(edges)
}

/// Number of edges with one endpoint in `s` and the other in `t`.
pub fn edge_count_between(g: &Graph, s: &[usize], t: &[usize]) -> Result<usize> {
    let mut in_t = vec![false; g.num_vertices()];
    for &v in t {
        check_vertex(g, v)?;
        in_t[v] = true;
    }
    let mut seen_s = vec![false; g.num_vertices()];
    for &v in s {
        check_vertex(g, v)?;
        if in_t[v] {
            return Err(Error::invalid(format!("vertex {v} lies in both sets")));
        }
        seen_s[v] = true;
    }
    Ok(s.iter()
        .filter(|&&v| std::mem::replace(&mut seen_s[v], false))
        .map(|&v| g.neighbours(v).iter().filter(|&&w| in_t[w]).count())
        .sum())
}

fn check_vertex(g: &Graph, v: usize) -> Result<()> {
    if v >= g.num_vertices() {
        return Err(Error::invalid(format!("vertex {v} out of range")));
    }
    Ok(())
}

fn has_edge_between(g: &Graph, s: &[usize], in_t: &[bool]) -> bool {
    s.iter().any(|&v| g.neighbours(v).iter().any(|&w| in_t[w]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CertifyMode {
    /// Power iteration on the adjacency operator restricted to the complement
    /// of the constant vector. The estimate is inflated by `slack` (relative).
    Spectral { iterations: usize, slack: f64 },
    /// Random disjoint pairs of minimum-size sets; can only falsify.
    Sampled { trials: usize, seed: u64 },
}

impl CertifyMode {
    pub fn spectral() -> Self {
        CertifyMode::Spectral { iterations: 1000, slack: 0.02 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionCertificate {
    pub mode: CertifyMode,
    pub passed: bool,
    /// Minimum set size `ceil(eps * n)`.
    pub set_size: usize,
    pub lambda2_bound: Option<f64>,
    /// `d * set_size / N`; the spectral certificate passes iff it exceeds the bound.
    pub threshold: Option<f64>,
    pub trials: usize,
    /// Violating pairs found by sampling (at most 16 are kept).
    pub violations: Vec<(Vec<usize>, Vec<usize>)>,
    pub violation_count: usize,
}

/// Certifies (spectral mode) or tries to falsify (sampled mode) that every two
/// disjoint vertex sets of size at least `ceil(eps * n)` span an edge.
///
/// The spectral test uses the expander mixing lemma: for a `d`-regular graph on
/// `N` vertices with second eigenvalue magnitude `lambda`, two sets of size `s`
/// span at least `d s^2 / N - lambda s` edges, which is positive iff
/// `lambda < d s / N`.
pub fn certify_p1(g: &Graph, eps: Ratio<u64>, n: usize, mode: CertifyMode) -> Result<ExpansionCertificate> {
    if *eps.numer() == 0 || eps >= Ratio::from_integer(1) {
        return Err(Error::invalid("eps must lie in (0, 1)"));
    }
    let big_n = g.num_vertices();
    let set_size = (eps * Ratio::from_integer(n as u64)).ceil().to_integer() as usize;
    if set_size == 0 {
        return Err(Error::invalid("eps * n rounds up to zero"));
    }
    match mode {
        CertifyMode::Spectral { iterations, slack } => {
            let d = g
                .regular_degree()
                .ok_or_else(|| Error::invalid("spectral certificate requires a regular graph"))?;
            let lambda = second_eigenvalue_estimate(g, iterations) * (1.0 + slack);
            let threshold = d as f64 * set_size as f64 / big_n as f64;
            Ok(ExpansionCertificate {
                mode,
                passed: threshold > lambda,
                set_size,
                lambda2_bound: Some(lambda),
                threshold: Some(threshold),
                trials: 0,
                violations: Vec::new(),
                violation_count: 0,
            })
        }
        CertifyMode::Sampled { trials, seed } => {
            if 2 * set_size > big_n {
                return Err(Error::invalid(format!(
                    "two disjoint sets of size {set_size} do not fit in {big_n} vertices"
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut in_t = vec![false; big_n];
            let mut violations = Vec::new();
            let mut violation_count = 0;
            for _ in 0..trials {
                let picked = rand::seq::index::sample(&mut rng, big_n, 2 * set_size).into_vec();
                let (s, t) = picked.split_at(set_size);
                for &v in t {
                    in_t[v] = true;
                }
                if !has_edge_between(g, s, &in_t) {
                    violation_count += 1;
                    if violations.len() < 16 {
                        let mut s = s.to_vec();
                        let mut t = t.to_vec();
                        s.sort_unstable();
                        t.sort_unstable();
                        violations.push((s, t));
                    }
                }
                for &v in t {
                    in_t[v] = false;
                }
            }
            Ok(ExpansionCertificate {
                mode,
                passed: violation_count == 0,
                set_size,
                lambda2_bound: None,
                threshold: None,
                trials,
                violations,
                violation_count,
            })
        }
    }
}

/// Largest eigenvalue magnitude of the adjacency operator on the orthogonal
/// complement of the all-ones vector (for a regular graph this is the second
/// largest eigenvalue in absolute value).
pub fn second_eigenvalue_estimate(g: &Graph, iterations: usize) -> f64 {
    let n = g.num_vertices();
    if n < 2 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_1a2b);
    let mut x: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
    project_and_normalise(&mut x);
    let mut y = vec![0.0; n];
    let mut estimate = 0.0;
    for _ in 0..iterations.max(1) {
        for (v, out) in y.iter_mut().enumerate() {
            *out = g.neighbours(v).iter().map(|&w| x[w]).sum();
        }
        let norm = project_and_normalise(&mut y);
        std::mem::swap(&mut x, &mut y);
        let converged = (norm - estimate).abs() <= 1e-10 * norm.max(1.0);
        estimate = norm;
        if norm == 0.0 || converged {
            break;
        }
    }
    estimate
}

fn project_and_normalise(x: &mut [f64]) -> f64 {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.iter_mut().for_each(|v| *v -= mean);
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
    norm
}

/// Searches for a path `(x_1, ..., x_m)` of distinct vertices with
/// `x_i` in `sets[(i - 1) mod sets.len()]`, by depth-first backtracking over
/// class-respecting edges. Fails with a hypothesis error when the search is
/// exhaustive without success or runs out of `budget` extension steps.
pub fn find_alternating_path(g: &Graph, sets: &[Vec<usize>], m: usize, budget: u64) -> Result<Vec<usize>> {
    if m == 0 {
        return Err(Error::invalid("path length m must be positive"));
    }
    if sets.is_empty() {
        return Err(Error::invalid("at least one vertex class is required"));
    }
    let mut class_of = vec![None; g.num_vertices()];
    for (j, set) in sets.iter().enumerate() {
        if set.is_empty() {
            return Err(Error::invalid(format!("class {j} is empty")));
        }
        for &v in set {
            check_vertex(g, v)?;
            if class_of[v].is_some() {
                return Err(Error::invalid(format!("vertex {v} lies in two classes")));
            }
            class_of[v] = Some(j);
        }
    }
    let classes = sets.len();
    let mut starts = sets[0].clone();
    starts.sort_unstable();
    let mut used = vec![false; g.num_vertices()];
    let mut steps: u64 = 0;
    // Each frame: vertex and the index of the next neighbour to try.
    let mut stack: Vec<(usize, usize)> = Vec::with_capacity(m);
    for &start in &starts {
        stack.push((start, 0));
        used[start] = true;
        while let Some(&(v, next)) = stack.last() {
            if stack.len() == m {
                return Ok(stack.iter().map(|&(v, _)| v).collect());
            }
            let want = stack.len() % classes;
            let nbrs = g.neighbours(v);
            let mut cursor = next;
            let mut advanced = None;
            while cursor < nbrs.len() {
                let w = nbrs[cursor];
                cursor += 1;
                if !used[w] && class_of[w] == Some(want) {
                    advanced = Some(w);
                    break;
                }
            }
            stack.last_mut().unwrap().1 = cursor;
            match advanced {
                Some(w) => {
                    steps += 1;
                    if steps > budget {
                        return Err(HypothesisFailure::AlternatingPathBudget { budget }.into());
                    }
                    used[w] = true;
                    stack.push((w, 0));
                }
                None => {
                    used[v] = false;
                    stack.pop();
                }
            }
        }
    }
    Err(HypothesisFailure::AlternatingPathAbsent { m }.into())
}

/// The `k`-th power: `uv` is an edge iff `1 <= dist(u, v) <= k`.
pub fn graph_power(g: &Graph, k: usize) -> Result<Graph> {
    if k == 0 {
        return Err(Error::invalid("power k must be at least 1"));
    }
    let adjacency = (0..g.num_vertices())
        .map(|u| {
            g.bounded_distances(u, k)
                .iter()
                .enumerate()
                .filter(|&(v, d)| v != u && d.is_some())
                .map(|(v, _)| v)
                .collect()
        })
        .collect();
    Ok(Graph { adjacency, labels: g.labels.clone() })
}

/// Replaces every vertex by a `t`-clique and every edge by a complete
/// bipartite graph between the two cliques. Vertex `v` becomes the cluster
/// `v*t .. (v+1)*t`; the returned map sends each new vertex to its origin, and
/// is also attached to the result as its labels.
pub fn blow_up(g: &Graph, t: usize) -> Result<(Graph, Vec<usize>)> {
    if t == 0 {
        return Err(Error::invalid("blow-up factor must be at least 1"));
    }
    let n = g.num_vertices() * t;
    let cluster_map: Vec<usize> = (0..n).map(|x| x / t).collect();
    let adjacency = (0..n)
        .map(|x| {
            let origin = x / t;
            let mut list: Vec<usize> = (origin * t..(origin + 1) * t).filter(|&y| y != x).collect();
            for &o in g.neighbours(origin) {
                list.extend(o * t..(o + 1) * t);
            }
            list.sort_unstable();
            list
        })
        .collect();
    let blown = Graph { adjacency, labels: Some(cluster_map.clone()) };
    Ok((blown, cluster_map))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ratio(n: u64, d: u64) -> Ratio<u64> {
        Ratio::new(n, d)
    }

    #[test]
    fn k5_is_the_only_4_regular_graph_on_5_vertices() {
        let params = ExpanderParams { eps: ratio(1, 2), a: 1, b: 4, seed: 3 };
        let g = sample_expander(&params, 5).unwrap();
        assert_eq!(g, Graph::complete(5));
    }

    #[test]
    fn sampler_rejects_bad_degrees() {
        let odd = ExpanderParams { eps: ratio(1, 2), a: 1, b: 5, seed: 0 };
        assert!(sample_expander(&odd, 20).is_err());
        let small = ExpanderParams { eps: ratio(1, 2), a: 1, b: 8, seed: 0 };
        assert!(sample_expander(&small, 8).is_err());
    }

    #[test]
    fn sampler_is_regular_simple_and_deterministic() {
        let params = ExpanderParams { eps: ratio(1, 5), a: 2, b: 6, seed: 11 };
        let g = sample_expander(&params, 15).unwrap();
        assert_eq!(g.num_vertices(), 30);
        assert_eq!(g.regular_degree(), Some(6));
        assert_eq!(g, sample_expander(&params, 15).unwrap());
        let other = sample_expander(&ExpanderParams { seed: 12, ..params }, 15).unwrap();
        assert_ne!(g, other);
    }

    #[test]
    fn edge_count_examples() {
        let k4 = Graph::complete(4);
        assert_eq!(edge_count_between(&k4, &[0, 1], &[2, 3]).unwrap(), 4);
        assert_eq!(edge_count_between(&Graph::empty(6), &[0, 1], &[4, 5]).unwrap(), 0);
        assert!(edge_count_between(&k4, &[0, 1], &[1, 2]).is_err());
    }

    #[test]
    fn complete_graph_passes_spectral_certificate() {
        // K_m has eigenvalues m-1 and -1; lambda = 1.
        let g = Graph::complete(30);
        let cert = certify_p1(&g, ratio(1, 10), 30, CertifyMode::spectral()).unwrap();
        assert!(cert.passed);
        assert!((cert.lambda2_bound.unwrap() - 1.02).abs() < 1e-6);
    }

    #[test]
    fn spectral_mode_rejects_irregular_graphs() {
        let g = Graph::path(5);
        assert!(certify_p1(&g, ratio(1, 5), 5, CertifyMode::spectral()).is_err());
        assert!(certify_p1(&Graph::complete(5), ratio(0, 1), 5, CertifyMode::spectral()).is_err());
        assert!(certify_p1(&Graph::complete(5), ratio(1, 1), 5, CertifyMode::spectral()).is_err());
    }

    #[test]
    fn sampled_mode_finds_violation_across_two_cliques() {
        let edges = (0..10)
            .flat_map(|u| (u + 1..10).map(move |v| (u, v)))
            .chain((10..20).flat_map(|u| (u + 1..20).map(move |v| (u, v))));
        let g = Graph::from_edges(20, edges).unwrap();
        let cert = certify_p1(&g, ratio(1, 10), 20, CertifyMode::Sampled { trials: 400, seed: 1 }).unwrap();
        assert!(!cert.passed);
        let (s, t) = &cert.violations[0];
        assert_eq!(s.len(), 2);
        assert_eq!(edge_count_between(&g, s, t).unwrap(), 0);
    }

    #[test]
    fn alternating_path_on_complete_multipartite() {
        let sets = vec![vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8]];
        let edges = (0..9).flat_map(|u| (u + 1..9).filter(move |v| u / 3 != v / 3).map(move |v| (u, v)));
        let g = Graph::from_edges(9, edges).unwrap();
        let p = find_alternating_path(&g, &sets, 9, 1_000).unwrap();
        assert_eq!(p, vec![0, 3, 6, 1, 4, 7, 2, 5, 8]);
    }

    #[test]
    fn alternating_path_failures() {
        let g = Graph::empty(4);
        let sets = vec![vec![0, 1], vec![2, 3]];
        let err = find_alternating_path(&g, &sets, 2, 100).unwrap_err();
        assert!(matches!(err, Error::Hypothesis(HypothesisFailure::AlternatingPathAbsent { m: 2 })));
        assert!(find_alternating_path(&g, &sets, 0, 100).is_err());
        assert!(find_alternating_path(&g, &[vec![0, 1], vec![1]], 2, 100).is_err());
        let k = Graph::complete(12);
        let sets = vec![(0..6).collect(), (6..12).collect()];
        let err = find_alternating_path(&k, &sets, 12, 3).unwrap_err();
        assert!(matches!(err, Error::Hypothesis(HypothesisFailure::AlternatingPathBudget { budget: 3 })));
    }

    #[test]
    fn power_of_path() {
        let p = Graph::path(4);
        assert_eq!(graph_power(&p, 1).unwrap(), p);
        let sq = graph_power(&p, 2).unwrap();
        assert_eq!(sq.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]);
        assert!(graph_power(&p, 0).is_err());
    }

    #[test]
    fn blow_up_single_edge() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let (b, map) = blow_up(&g, 3).unwrap();
        assert_eq!(b.num_vertices(), 6);
        assert_eq!(b.num_edges(), 15);
        assert_eq!(map, vec![0, 0, 0, 1, 1, 1]);
        let (same, _) = blow_up(&g, 1).unwrap();
        assert_eq!(same.edges().collect::<Vec<_>>(), g.edges().collect::<Vec<_>>());
    }

    #[test]
    fn text_round_trip_is_byte_stable() {
        let text = "graph 4\n0 1\n0 3\n1 2\nlabel 0 0\nlabel 1 0\nlabel 2 1\nlabel 3 1\n";
        let g = Graph::from_text(text).unwrap();
        assert_eq!(g.to_text(), text);
        assert!(Graph::from_text("graph 3\n0 0\n").is_err());
        assert!(Graph::from_text("grph 3\n").is_err());
        assert!(Graph::from_text("graph 3\n0 1\nlabel 0 0\n").is_err());
    }
}
