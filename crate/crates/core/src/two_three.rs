//! (2,3)-graphs: vertex sets with 2-edges `uv` and 3-edges `uv(w)`, where the
//! witness `w` is consumed when a path walks along the pair `uv`.
//!
//! The centre of the module is [`dfs_traverse`], a depth-first traversal that
//! keeps the active path `U`, the finished set `S`, the untouched sets
//! `T_1..T_k` and the witness pools `W_S`, `W_U`. On top of it,
//! [`extract_obstruction_sets`] either returns a long (2,3)-path or a family
//! of large sets spanning no transversal edge.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::ops::ControlFlow;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, HypothesisFailure, Result};
use crate::graph::parse_field;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TwoThreeGraph {
    num_vertices: usize,
    two: Vec<BTreeSet<usize>>,
    /// `three[u][v]` holds the witnesses of the pair `uv`, stored on both ends.
    three: Vec<BTreeMap<usize, BTreeSet<usize>>>,
    num_three: usize,
}

impl TwoThreeGraph {
    pub fn new(num_vertices: usize) -> Self {
        TwoThreeGraph {
            num_vertices,
            two: vec![BTreeSet::new(); num_vertices],
            three: vec![BTreeMap::new(); num_vertices],
            num_three: 0,
        }
    }

    fn check(&self, vs: &[usize]) -> Result<()> {
        for (i, &v) in vs.iter().enumerate() {
            if v >= self.num_vertices {
                return Err(Error::invalid(format!("vertex {v} out of range")));
            }
            if vs[..i].contains(&v) {
                return Err(Error::invalid(format!("edge repeats vertex {v}")));
            }
        }
        Ok(())
    }

    /// Adds the 2-edge `uv`; returns false if it was already present.
    pub fn add_two(&mut self, u: usize, v: usize) -> Result<bool> {
        self.check(&[u, v])?;
        self.two[v].insert(u);
        Ok(self.two[u].insert(v))
    }

    /// Adds the 3-edge `uv(w)`; returns false if it was already present.
    pub fn add_three(&mut self, u: usize, v: usize, w: usize) -> Result<bool> {
        self.check(&[u, v, w])?;
        self.three[v].entry(u).or_default().insert(w);
        let fresh = self.three[u].entry(v).or_default().insert(w);
        if fresh {
            self.num_three += 1;
        }
        Ok(fresh)
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_two_edges(&self) -> usize {
        self.two.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn num_three_edges(&self) -> usize {
        self.num_three
    }

    pub fn has_two(&self, u: usize, v: usize) -> bool {
        self.two.get(u).is_some_and(|s| s.contains(&v))
    }

    pub fn has_three(&self, u: usize, v: usize, w: usize) -> bool {
        self.witnesses(u, v).any(|x| x == w)
    }

    /// Witnesses of the pair `uv`, ascending.
    pub fn witnesses(&self, u: usize, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.three.get(u).and_then(|m| m.get(&v)).into_iter().flatten().copied()
    }

    pub fn two_neighbours(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.two[u].iter().copied()
    }

    /// Partners `v` of `u` in some 3-edge, with their witness sets.
    pub fn three_partners(&self, u: usize) -> impl Iterator<Item = (usize, &BTreeSet<usize>)> + '_ {
        self.three[u].iter().map(|(&v, ws)| (v, ws))
    }

    /// 2-edges as `(u, v)` with `u < v`, sorted.
    pub fn two_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.two
            .iter()
            .enumerate()
            .flat_map(|(u, s)| s.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// 3-edges as `(u, v, w)` with `u < v`, sorted.
    pub fn three_edges(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.three.iter().enumerate().flat_map(|(u, m)| {
            m.iter()
                .filter(move |(&v, _)| v > u)
                .flat_map(move |(&v, ws)| ws.iter().map(move |&w| (u, v, w)))
        })
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge23> + '_ {
        self.two_edges()
            .map(|(u, v)| Edge23::Two(u, v))
            .chain(self.three_edges().map(|(u, v, w)| Edge23::Three(u, v, w)))
    }

    /// `g23 N`, then `e2 u v` and `e3 u v w` lines (pair sorted, witness last).
    pub fn to_text(&self) -> String {
        let mut out = format!("g23 {}\n", self.num_vertices);
        for (u, v) in self.two_edges() {
            writeln!(out, "e2 {u} {v}").unwrap();
        }
        for (u, v, w) in self.three_edges() {
            writeln!(out, "e3 {u} {v} {w}").unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "missing header"))?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some("g23") {
            return Err(Error::parse(1, "expected `g23 <num_vertices>`"));
        }
        let mut f = TwoThreeGraph::new(parse_field(parts.next(), 1)?);
        for (i, line) in lines {
            let lineno = i + 1;
            let fields: Vec<&str> = line.split_whitespace().collect();
            let res = match fields.as_slice() {
                ["e2", u, v] => f.add_two(parse_field(Some(u), lineno)?, parse_field(Some(v), lineno)?),
                ["e3", u, v, w] => f.add_three(
                    parse_field(Some(u), lineno)?,
                    parse_field(Some(v), lineno)?,
                    parse_field(Some(w), lineno)?,
                ),
                _ => return Err(Error::parse(lineno, format!("unrecognised line `{line}`"))),
            };
            res.map_err(|e| Error::parse(lineno, e.to_string()))?;
        }
        Ok(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Edge23 {
    Two(usize, usize),
    Three(usize, usize, usize),
}

impl fmt::Display for Edge23 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Edge23::Two(u, v) => write!(f, "{u}{v}", u = u, v = format_args!("-{v}")),
            Edge23::Three(u, v, w) => write!(f, "{u}-{v}({w})"),
        }
    }
}

/// Vertex-to-set lookup for a family of pairwise disjoint sets.
#[derive(Debug, Clone)]
pub struct Partition {
    set_of: FxHashMap<usize, usize>,
    num_sets: usize,
}

impl Partition {
    pub fn new(sets: &[Vec<usize>]) -> Result<Self> {
        let mut set_of = FxHashMap::default();
        for (i, set) in sets.iter().enumerate() {
            for &v in set {
                if let Some(j) = set_of.insert(v, i) {
                    if j != i {
                        return Err(Error::invalid(format!("vertex {v} lies in sets {j} and {i}")));
                    }
                }
            }
        }
        Ok(Partition { set_of, num_sets: sets.len() })
    }

    pub fn num_sets(&self) -> usize {
        self.num_sets
    }

    pub fn set_of(&self, v: usize) -> Option<usize> {
        self.set_of.get(&v).copied()
    }

    /// All endpoints (and the witness) lie in pairwise distinct sets.
    pub fn is_transversal(&self, edge: Edge23) -> bool {
        match edge {
            Edge23::Two(u, v) => matches!((self.set_of(u), self.set_of(v)), (Some(a), Some(b)) if a != b),
            Edge23::Three(u, v, w) => matches!(
                (self.set_of(u), self.set_of(v), self.set_of(w)),
                (Some(a), Some(b), Some(c)) if a != b && b != c && a != c
            ),
        }
    }
}

pub fn is_transversal(edge: Edge23, partition: &[Vec<usize>]) -> Result<bool> {
    Ok(Partition::new(partition)?.is_transversal(edge))
}

/// First edge of `f` that is transversal with respect to `sets`.
pub fn find_transversal(f: &TwoThreeGraph, sets: &[Vec<usize>]) -> Result<Option<Edge23>> {
    let p = Partition::new(sets)?;
    Ok(f.edges().find(|&e| p.is_transversal(e)))
}

/// First 3-edge `uv(w)` with one of `u, v` in the first `k - 1` sets and the
/// other, together with `w`, in the last set.
pub fn find_excluded_three_edge(f: &TwoThreeGraph, sets: &[Vec<usize>]) -> Result<Option<Edge23>> {
    let p = Partition::new(sets)?;
    let Some(last) = sets.len().checked_sub(1) else {
        return Ok(None);
    };
    let early = |x: usize| p.set_of(x).is_some_and(|i| i < last);
    let late = |x: usize| p.set_of(x) == Some(last);
    Ok(f
        .three_edges()
        .find(|&(u, v, w)| late(w) && ((early(u) && late(v)) || (early(v) && late(u))))
        .map(|(u, v, w)| Edge23::Three(u, v, w)))
}

/// A (2,3)-path: `witnesses[i]` is the witness used on step `x_i x_{i+1}`, or
/// `None` when the step is a 2-edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoThreePath {
    pub vertices: Vec<usize>,
    pub witnesses: Vec<Option<usize>>,
}

impl TwoThreePath {
    pub fn single(v: usize) -> Self {
        TwoThreePath { vertices: vec![v], witnesses: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn witness_set(&self) -> BTreeSet<usize> {
        self.witnesses.iter().flatten().copied().collect()
    }

    pub fn map(&self, f: impl Fn(usize) -> usize) -> TwoThreePath {
        TwoThreePath {
            vertices: self.vertices.iter().map(|&v| f(v)).collect(),
            witnesses: self.witnesses.iter().map(|w| w.map(&f)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum PathViolation {
    StepCount { vertices: usize, witnesses: usize },
    RepeatedVertex { vertex: usize },
    MissingTwoEdge { step: usize },
    MissingThreeEdge { step: usize, witness: usize },
    WitnessReused { step: usize, witness: usize },
    WitnessOnPath { step: usize, witness: usize },
}

impl fmt::Display for PathViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Checks edge membership of every step, distinctness of the witnesses and
/// that no witness lies on the path.
pub fn validate_23_path(f: &TwoThreeGraph, p: &TwoThreePath) -> std::result::Result<(), PathViolation> {
    if p.witnesses.len() + 1 != p.vertices.len().max(1) {
        return Err(PathViolation::StepCount { vertices: p.vertices.len(), witnesses: p.witnesses.len() });
    }
    let mut on_path = BTreeSet::new();
    for &v in &p.vertices {
        if !on_path.insert(v) {
            return Err(PathViolation::RepeatedVertex { vertex: v });
        }
    }
    let mut used = BTreeSet::new();
    for (step, pair) in p.vertices.windows(2).enumerate() {
        let (u, v) = (pair[0], pair[1]);
        match p.witnesses[step] {
            None => {
                if !f.has_two(u, v) {
                    return Err(PathViolation::MissingTwoEdge { step });
                }
            }
            Some(w) => {
                if !f.has_three(u, v, w) {
                    return Err(PathViolation::MissingThreeEdge { step, witness: w });
                }
                if !used.insert(w) {
                    return Err(PathViolation::WitnessReused { step, witness: w });
                }
                if on_path.contains(&w) {
                    return Err(PathViolation::WitnessOnPath { step, witness: w });
                }
            }
        }
    }
    Ok(())
}

/// Full state of the traversal between two loop iterations.
#[derive(Debug, Clone)]
pub struct DfsState {
    k: usize,
    rank: Vec<usize>,
    v_of: Vec<Option<usize>>,
    t_of: Vec<Option<usize>>,
    t_len: Vec<usize>,
    /// `T_k` keyed by rank.
    t_last: BTreeSet<(usize, usize)>,
    s: Vec<usize>,
    w_s: Vec<usize>,
    u: Vec<usize>,
    steps: Vec<Option<usize>>,
    w_u: BTreeSet<usize>,
    iteration: usize,
}

impl DfsState {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    /// `S` in the order vertices were finished.
    pub fn s(&self) -> &[usize] {
        &self.s
    }

    pub fn w_s(&self) -> &[usize] {
        &self.w_s
    }

    /// The active path `U = (u_1, ..., u_m)`.
    pub fn u(&self) -> &[usize] {
        &self.u
    }

    pub fn m(&self) -> usize {
        self.u.len()
    }

    pub fn w_u(&self) -> Vec<usize> {
        self.w_u.iter().copied().collect()
    }

    /// Members of `T_i` (0-based `i`), ascending by the traversal order.
    pub fn t(&self, i: usize) -> Vec<usize> {
        let mut out: Vec<usize> = (0..self.t_of.len()).filter(|&v| self.t_of[v] == Some(i)).collect();
        out.sort_by_key(|&v| self.rank[v]);
        out
    }

    pub fn t_len(&self, i: usize) -> usize {
        self.t_len[i]
    }

    /// Index of the `T` set currently holding `v`.
    pub fn t_of(&self, v: usize) -> Option<usize> {
        self.t_of[v]
    }

    pub fn v_of(&self, v: usize) -> Option<usize> {
        self.v_of[v]
    }

    pub fn path(&self) -> TwoThreePath {
        TwoThreePath { vertices: self.u.clone(), witnesses: self.steps.clone() }
    }

    /// `iteration |S| |W_S| m |W_U| |T_1| .. |T_k|`.
    pub fn trace_line(&self) -> String {
        let mut line = format!(
            "{} {} {} {} {}",
            self.iteration,
            self.s.len(),
            self.w_s.len(),
            self.u.len(),
            self.w_u.len()
        );
        for len in &self.t_len {
            write!(line, " {len}").unwrap();
        }
        line
    }

    pub fn trace_header(k: usize) -> String {
        let mut line = String::from("# iter s w_s m w_u");
        for i in 1..=k {
            write!(line, " t{i}").unwrap();
        }
        line
    }

    /// Checks the traversal invariants: `U` is a (2,3)-path whose witness set
    /// is `W_U`; `S` and `U` lie in `V_k`; each `T_i` lies in `V_i`; the
    /// consumed witnesses come from `V_1 .. V_k` and have left every `T_i`;
    /// `|W_S| <= |S|` and `|W_U| <= max(0, m - 1)`.
    pub fn check_invariants(&self, f: &TwoThreeGraph) -> std::result::Result<(), String> {
        let last = self.k - 1;
        validate_23_path(f, &self.path()).map_err(|e| format!("U is not a (2,3)-path: {e}"))?;
        if self.path().witness_set() != self.w_u {
            return Err("W_U differs from the witnesses of U".into());
        }
        for &v in self.s.iter().chain(&self.u) {
            if self.v_of[v] != Some(last) {
                return Err(format!("vertex {v} of S or U is outside V_k"));
            }
            if self.t_of[v].is_some() {
                return Err(format!("vertex {v} of S or U is still in some T_i"));
            }
        }
        for &w in self.w_s.iter().chain(&self.w_u) {
            if self.v_of[w].is_none() || self.t_of[w].is_some() {
                return Err(format!("witness {w} is outside V_1..V_k or still in some T_i"));
            }
        }
        let mut counts = vec![0; self.k];
        for (v, t) in self.t_of.iter().enumerate() {
            if let Some(i) = *t {
                if self.v_of[v] != Some(i) {
                    return Err(format!("vertex {v} of T_{} is outside V_{}", i + 1, i + 1));
                }
                counts[i] += 1;
            }
        }
        if counts != self.t_len || self.t_last.len() != self.t_len[last] {
            return Err("T set sizes out of sync".into());
        }
        let all: BTreeSet<usize> =
            self.s.iter().chain(&self.u).chain(&self.w_s).chain(&self.w_u).copied().collect();
        if all.len() != self.s.len() + self.u.len() + self.w_s.len() + self.w_u.len() {
            return Err("S, U, W_S and W_U are not pairwise disjoint".into());
        }
        if self.w_s.len() > self.s.len() {
            return Err(format!("|W_S| = {} exceeds |S| = {}", self.w_s.len(), self.s.len()));
        }
        if self.w_u.len() > self.u.len().saturating_sub(1) {
            return Err(format!("|W_U| = {} exceeds max(0, m-1) with m = {}", self.w_u.len(), self.u.len()));
        }
        Ok(())
    }

    fn take_from_t(&mut self, v: usize) {
        let i = self.t_of[v].take().expect("vertex is in some T_i");
        self.t_len[i] -= 1;
        if i == self.k - 1 {
            self.t_last.remove(&(self.rank[v], v));
        }
    }

    /// Smallest-rank `v` in `T_k` reachable from `from` by a 2-edge, or by a
    /// 3-edge whose witness is still in some `T_i`.
    fn extension(&self, f: &TwoThreeGraph, from: usize) -> Option<usize> {
        let last = Some(self.k - 1);
        let via_two = f.two_neighbours(from).filter(|&v| self.t_of[v] == last);
        let via_three = f
            .three_partners(from)
            .filter(|(v, ws)| self.t_of[*v] == last && ws.iter().any(|&w| self.t_of[w].is_some()))
            .map(|(v, _)| v);
        via_two.chain(via_three).min_by_key(|&v| self.rank[v])
    }

    fn cheap_check(&self) -> std::result::Result<(), String> {
        if self.w_s.len() > self.s.len() || self.w_u.len() > self.u.len().saturating_sub(1) {
            return Err("witness pool larger than allowed".into());
        }
        if self.steps.len() + 1 != self.u.len().max(1) {
            return Err("step list out of sync with U".into());
        }
        if self.steps.iter().flatten().count() != self.w_u.len() {
            return Err("W_U out of sync with the path witnesses".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct DfsRun {
    pub state: DfsState,
    pub iterations: usize,
    /// True when the observer asked to stop before `T_k` ran empty.
    pub stopped_early: bool,
}

/// Rank of every vertex under `ordering` (a permutation of the vertices), or
/// the identity.
fn ranks(n: usize, ordering: Option<&[usize]>) -> Result<Vec<usize>> {
    match ordering {
        None => Ok((0..n).collect()),
        Some(order) => {
            let mut rank = vec![usize::MAX; n];
            if order.len() != n {
                return Err(Error::invalid("ordering must list every vertex once"));
            }
            for (i, &v) in order.iter().enumerate() {
                if v >= n || rank[v] != usize::MAX {
                    return Err(Error::invalid("ordering must list every vertex once"));
                }
                rank[v] = i;
            }
            Ok(rank)
        }
    }
}

/// Depth-first traversal of `f` over disjoint sets `V_1..V_k`.
///
/// While `T_k` is non-empty: start a path at the first vertex of `T_k` when the
/// path is empty; otherwise extend it by the first `v` of `T_k` joined to the
/// path end by a 2-edge, or by a 3-edge with witness in `T_1 ∪ .. ∪ T_k`
/// (2-edges preferred, the first such witness is consumed); if no extension
/// exists, move the path end to `S`, releasing its witness to `W_S`. "First"
/// refers to `ordering`, ascending ids by default.
///
/// `observer` sees the state after every iteration and may stop the run.
/// Any broken invariant is a hard fault.
pub fn dfs_traverse<O>(
    f: &TwoThreeGraph,
    v_sets: &[Vec<usize>],
    ordering: Option<&[usize]>,
    mut observer: O,
) -> Result<DfsRun>
where
    O: FnMut(&DfsState) -> ControlFlow<()>,
{
    let k = v_sets.len();
    if k == 0 {
        return Err(Error::invalid("at least one vertex set is required"));
    }
    let n = f.num_vertices();
    let rank = ranks(n, ordering)?;
    let mut v_of = vec![None; n];
    for (i, set) in v_sets.iter().enumerate() {
        for &v in set {
            if v >= n {
                return Err(Error::invalid(format!("vertex {v} out of range")));
            }
            if v_of[v].is_some() {
                return Err(Error::invalid(format!("vertex {v} lies in two of the sets")));
            }
            v_of[v] = Some(i);
        }
    }
    let t_last = v_sets[k - 1].iter().map(|&v| (rank[v], v)).collect();
    let mut state = DfsState {
        k,
        rank,
        t_of: v_of.clone(),
        v_of,
        t_len: v_sets.iter().map(Vec::len).collect(),
        t_last,
        s: Vec::new(),
        w_s: Vec::new(),
        u: Vec::new(),
        steps: Vec::new(),
        w_u: BTreeSet::new(),
        iteration: 0,
    };
    let bound = 2 * v_sets[k - 1].len();
    while let Some(&(_, first)) = state.t_last.first() {
        state.iteration += 1;
        if state.iteration > bound {
            return Err(Error::fault(format!("traversal exceeded 2|V_k| = {bound} iterations")));
        }
        match state.u.last().copied() {
            None => {
                state.take_from_t(first);
                state.u.push(first);
            }
            Some(end) => match state.extension(f, end) {
                Some(v) => {
                    state.take_from_t(v);
                    if f.has_two(end, v) {
                        state.steps.push(None);
                    } else {
                        let w = f
                            .witnesses(end, v)
                            .filter(|&w| state.t_of[w].is_some())
                            .min_by_key(|&w| state.rank[w])
                            .ok_or_else(|| Error::fault("extension lost its witness"))?;
                        state.take_from_t(w);
                        state.w_u.insert(w);
                        state.steps.push(Some(w));
                    }
                    state.u.push(v);
                }
                None => {
                    state.u.pop();
                    state.s.push(end);
                    if let Some(Some(w)) = state.steps.pop() {
                        state.w_u.remove(&w);
                        state.w_s.push(w);
                    }
                }
            },
        }
        state.cheap_check().map_err(|e| Error::fault(format!("invariant violated: {e}")))?;
        if observer(&state).is_break() {
            let iterations = state.iteration;
            return Ok(DfsRun { state, iterations, stopped_early: true });
        }
    }
    let iterations = state.iteration;
    Ok(DfsRun { state, iterations, stopped_early: false })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Obstruction {
    /// A (2,3)-path with at least the requested number of vertices.
    Path(TwoThreePath),
    /// Disjoint sets spanning no transversal edge.
    Sets(Vec<Vec<usize>>),
}

/// How large the intermediate sets are kept between levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sizing {
    /// Level `j` of `k` stops once `|S| = c n 5^(k-j)` and trims every set to
    /// that size; always succeeds on `5^(k-1) c n` vertices.
    #[default]
    Nominal,
    /// Splits the last set evenly over the remaining levels and trims only at
    /// the top. Finds sets on far smaller graphs; used at desk scale.
    Balanced,
}

/// Either a (2,3)-path on `n` vertices or `k` disjoint sets of size `c n` such
/// that no edge is transversal and no `uv(w)` has `u` in the first `k-1` sets
/// and `v, w` in the last. Requires `5^(k-1) c n` vertices.
pub fn extract_obstruction_sets(f: &TwoThreeGraph, k: usize, c: usize, n: usize) -> Result<Obstruction> {
    let needed = 5usize
        .checked_pow(k.saturating_sub(1) as u32)
        .and_then(|p| p.checked_mul(c))
        .and_then(|p| p.checked_mul(n))
        .ok_or_else(|| Error::invalid("5^(k-1) c n overflows"))?;
    if f.num_vertices() < needed {
        return Err(Error::invalid(format!(
            "{} vertices, but 5^(k-1) c n = {needed} are required",
            f.num_vertices()
        )));
    }
    extract_obstruction_sets_with(f, k, c, n, Sizing::Nominal, None).map_err(Error::escalate)
}

/// [`extract_obstruction_sets`] without the vertex-count precondition. When a
/// level cannot reach its target size the result is a hypothesis failure.
pub fn extract_obstruction_sets_with(
    f: &TwoThreeGraph,
    k: usize,
    c: usize,
    n: usize,
    sizing: Sizing,
    ordering: Option<&[usize]>,
) -> Result<Obstruction> {
    if k == 0 || c == 0 || n == 0 {
        return Err(Error::invalid("k, c and n must be positive"));
    }
    let target = c * n;
    let rank = ranks(f.num_vertices(), ordering)?;
    let mut sets: Vec<Vec<usize>> = vec![{
        let mut all: Vec<usize> = (0..f.num_vertices()).collect();
        all.sort_by_key(|&v| rank[v]);
        all
    }];
    for level in 2..=k {
        let size = match sizing {
            Sizing::Nominal => target * 5usize.pow((k - level) as u32),
            Sizing::Balanced if level == k => target,
            Sizing::Balanced => target.max(sets.last().unwrap().len() / (k - level + 2)),
        };
        let mut found: Option<Obstruction> = None;
        let mut most = 0;
        dfs_traverse(f, &sets, ordering, |st| {
            if st.m() >= n {
                found = Some(Obstruction::Path(st.path()));
                return ControlFlow::Break(());
            }
            most = most.max(st.s().len());
            if st.s().len() == size {
                let inner = st.k();
                let mut next: Vec<Vec<usize>> = (0..inner - 1).map(|i| st.t(i)).collect();
                next.push(st.s().to_vec());
                next.push(st.t(inner - 1));
                found = Some(Obstruction::Sets(next));
                return ControlFlow::Break(());
            }
            ControlFlow::Continue(())
        })?;
        match found {
            Some(Obstruction::Path(p)) => {
                validate_23_path(f, &p).map_err(|e| Error::fault(format!("traversal path invalid: {e}")))?;
                return Ok(Obstruction::Path(p));
            }
            Some(Obstruction::Sets(next)) => {
                let trim = match sizing {
                    Sizing::Nominal => Some(size),
                    Sizing::Balanced => (level == k).then_some(target),
                };
                let smallest = next.iter().map(Vec::len).min().unwrap_or(0);
                if let Some(trim) = trim {
                    if smallest < trim {
                        return Err(HypothesisFailure::ObstructionUndersized {
                            level,
                            needed: trim,
                            reached: smallest,
                        }
                        .into());
                    }
                    sets = next.into_iter().map(|mut s| {
                        s.truncate(trim);
                        s
                    }).collect();
                } else {
                    sets = next;
                }
            }
            None => {
                return Err(HypothesisFailure::ObstructionUndersized { level, needed: size, reached: most }.into())
            }
        }
    }
    if k == 1 && sets[0].len() < target {
        return Err(HypothesisFailure::ObstructionUndersized { level: 1, needed: target, reached: sets[0].len() }.into());
    }
    if let Some(e) = find_transversal(f, &sets)? {
        return Err(Error::fault(format!("obstruction sets span transversal edge {e}")));
    }
    if let Some(e) = find_excluded_three_edge(f, &sets)? {
        return Err(Error::fault(format!("obstruction sets span excluded 3-edge {e}")));
    }
    Ok(Obstruction::Sets(sets))
}
