//! The end-to-end search for a monochromatic tight path in the triangle
//! hypergraph of a blown-up graph power.
//!
//! Stages: build the host, pick a monochromatic clique in every cluster and
//! fix the majority colour as the role colour, build the auxiliary
//! (2,3)-graph of connectors, then either convert a long (2,3)-path into a
//! role-coloured tight path ("blue" branch) or, from obstruction sets, route
//! an alternating path, prune connectors from its power and grow a tight path
//! of the other colour window by window ("red" branch).

use std::collections::BTreeSet;
use std::time::Instant;

use num_rational::Ratio;
use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::connectors::{
    build_auxiliary_f, find_c212, find_c22, AuxiliaryGraph, ClusterFamily, Connector, ConnectorKind, Scope,
};
use crate::error::{Error, HypothesisFailure, Result};
use crate::graph::{blow_up, certify_p1, find_alternating_path, graph_power, CertifyMode, ExpansionCertificate, Graph};
use crate::hypergraph::{
    find_mono_clique, find_mono_clique_in, triangles_to_hypergraph, validate_tight_path, Colour, Hypergraph3,
    TightPath3, TwoColoring,
};
use crate::two_three::{extract_obstruction_sets, extract_obstruction_sets_with, Obstruction, Sizing, TwoThreePath};

/// Cluster size needed for the full-scale argument: `8k + 40k^2 + 5`.
pub const fn full_scale_t(k: usize) -> usize {
    8 * k + 40 * k * k + 5
}

/// Most vertices pruning may delete from one cluster: `4(2k) + 10(4k^2)`.
pub const fn deletion_budget(k: usize) -> usize {
    4 * (2 * k) + 10 * (4 * k * k)
}

/// Smallest pruned cluster the window argument works with.
pub const MIN_PRUNED_CLUSTER: usize = 5;

fn default_budget() -> u64 {
    2_000_000
}

fn default_tie() -> Colour {
    Colour::Blue
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineParams {
    /// Window length: path positions per level of the induction.
    pub ell: usize,
    /// Power of the host graph.
    pub k: usize,
    pub eps: Ratio<u64>,
    /// Size of the monochromatic clique kept per cluster.
    pub t: usize,
    /// Blow-up factor (cluster size before clique selection).
    pub t_prime: usize,
    pub c: usize,
    pub a: u128,
    /// Target path length.
    pub n: usize,
    /// Length of the alternating path.
    pub m: usize,
    pub strict_constants: bool,
    #[serde(default = "default_tie")]
    pub tie_break: Colour,
    #[serde(default = "default_budget")]
    pub alt_path_budget: u64,
    #[serde(default)]
    pub require_certificate: bool,
    #[serde(default)]
    pub sizing: Sizing,
}

impl PipelineParams {
    /// The constants of the original argument for target length `n`. The true
    /// blow-up factor is a hypergraph Ramsey number; `t_prime` is set to the
    /// lower bound `t`.
    pub fn full_scale(n: usize) -> Self {
        let ell = 17;
        let k = 2 * ell;
        let t = full_scale_t(k);
        PipelineParams {
            ell,
            k,
            eps: Ratio::new(1, k as u64 + 1),
            t,
            t_prime: t,
            c: 1,
            a: 2 * 5u128.saturating_pow(k as u32),
            n,
            m: ell * n,
            strict_constants: true,
            tie_break: Colour::Blue,
            alt_path_budget: default_budget(),
            require_certificate: true,
            sizing: Sizing::Nominal,
        }
    }

    /// Free desk-scale constants; derived ones follow the same formulas.
    pub fn relaxed(ell: usize, k: usize, t: usize, t_prime: usize, c: usize, n: usize) -> Self {
        PipelineParams {
            ell,
            k,
            eps: Ratio::new(1, k as u64 + 1),
            t,
            t_prime,
            c,
            a: 2 * 5u128.saturating_pow(k as u32),
            n,
            m: ell * n,
            strict_constants: false,
            tie_break: Colour::Blue,
            alt_path_budget: default_budget(),
            require_certificate: false,
            sizing: Sizing::Balanced,
        }
    }

    /// The identities tying the constants together.
    pub fn check_strict(&self) -> Result<()> {
        let k = self.k;
        let mut broken = Vec::new();
        if k != 2 * self.ell {
            broken.push("k = 2 ell");
        }
        if self.eps != Ratio::new(1, k as u64 + 1) {
            broken.push("eps = 1/(k+1)");
        }
        if self.t != full_scale_t(k) {
            broken.push("t = 8k + 40k^2 + 5");
        }
        if self.m != self.ell * self.n {
            broken.push("m = ell n");
        }
        if Some(self.a) != 5u128.checked_pow(k as u32).and_then(|p| p.checked_mul(2)) {
            broken.push("a = 2 * 5^k");
        }
        if deletion_budget(k) + MIN_PRUNED_CLUSTER > self.t {
            broken.push("4(2k) + 10(4k^2) <= t - 5");
        }
        if broken.is_empty() {
            Ok(())
        } else {
            Err(Error::invalid(format!("strict constants violate: {}", broken.join(", "))))
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("ell", self.ell), ("k", self.k), ("c", self.c), ("n", self.n), ("m", self.m)] {
            if value == 0 {
                return Err(Error::invalid(format!("{name} must be positive")));
            }
        }
        if self.t < 3 {
            return Err(Error::invalid("t must be at least 3"));
        }
        if self.t_prime < self.t {
            return Err(Error::invalid("t_prime must be at least t"));
        }
        if *self.eps.numer() == 0 || self.eps >= Ratio::from_integer(1) {
            return Err(Error::invalid("eps must lie in (0, 1)"));
        }
        if self.strict_constants {
            self.check_strict()?;
        }
        Ok(())
    }

    fn hypothesis(&self, e: Error) -> Error {
        if self.strict_constants {
            e.escalate()
        } else {
            e
        }
    }
}

/// `G^k`, its blow-up and the triangle hypergraph. Cluster of `v` is
/// `v * t_prime .. (v + 1) * t_prime`.
#[derive(Debug, Clone)]
pub struct Host {
    pub base: Graph,
    pub power: Graph,
    pub h: Hypergraph3,
    pub t_prime: usize,
}

impl Host {
    pub fn build(g: &Graph, k: usize, t_prime: usize) -> Result<Host> {
        let power = graph_power(g, k)?;
        let (blown, _) = blow_up(&power, t_prime)?;
        let h = triangles_to_hypergraph(&blown)?;
        Ok(Host { base: g.clone(), power, h, t_prime })
    }

    pub fn cluster(&self, v: usize) -> Vec<usize> {
        (v * self.t_prime..(v + 1) * self.t_prime).collect()
    }

    pub fn num_clusters(&self) -> usize {
        self.base.num_vertices()
    }
}

/// Pairs and triangles of `power` inside `origins`.
pub fn power_scope(power: &Graph, origins: &[usize]) -> Scope {
    let inside: FxHashSet<usize> = origins.iter().copied().collect();
    let mut scope = Scope::default();
    for &u in origins {
        for &v in power.neighbours(u).iter().filter(|&&v| v > u && inside.contains(&v)) {
            scope.pairs.push((u, v));
            for &w in power.neighbours(v).iter().filter(|&&w| w > v && inside.contains(&w)) {
                if power.has_edge(u, w) {
                    scope.triangles.push((u, v, w));
                }
            }
        }
    }
    scope
}

/// Turns a (2,3)-path of the auxiliary graph into a role-coloured tight path.
///
/// Each step contributes one part of its (6,6) or (6,3,6) gadget, read as
/// `x2, x1, [z], y1, y2`; consecutive parts meet inside a cluster, where the
/// stitching triples `y1 y2 x2'` and `y2 x2' x1'` are clique triples.
pub fn blue_path_from_23path(
    aux: &AuxiliaryGraph,
    f_path: &TwoThreePath,
    family: &ClusterFamily,
    h: &Hypergraph3,
    c: &TwoColoring,
) -> Result<TightPath3> {
    let role = family.role();
    if f_path.vertices.len() == 1 {
        let cluster = family.require(aux.origin[f_path.vertices[0]])?;
        return Ok(TightPath3::new(cluster.to_vec()));
    }
    let mut out: Vec<usize> = Vec::new();
    let mut used: FxHashSet<usize> = FxHashSet::default();
    for (step, pair) in f_path.vertices.windows(2).enumerate() {
        let (u, v) = (pair[0], pair[1]);
        let w = f_path.witnesses.get(step).copied().flatten();
        let gadget = aux
            .gadget(u, v, w)
            .ok_or_else(|| Error::invalid(format!("no gadget behind step {step} of the path")))?;
        let part = gadget
            .parts()
            .into_iter()
            .find(|p| p.vertices().iter().all(|x| !used.contains(x)))
            .ok_or_else(|| Error::fault(format!("no free connector copy at step {step}")))?;
        if let Err(e) = part.revalidate(h, c, role) {
            return Err(Error::fault(format!("gadget at step {step} fails revalidation: {e}")));
        }
        used.extend(part.vertices());
        out.extend([part.x[1], part.x[0]]);
        out.extend(part.z.iter().copied());
        out.extend([part.y[0], part.y[1]]);
    }
    let path = TightPath3::new(out);
    validate_tight_path(h, c, &path, role).map_err(|e| Error::fault(format!("stitched path invalid: {e}")))?;
    Ok(path)
}

/// One connector removed during pruning.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeletionRecord {
    /// Path positions of the x-side, middle (for C212) and y-side clusters.
    pub positions: Vec<usize>,
    pub connector: Connector,
    pub removed: Vec<usize>,
}

/// Removes every role-coloured (2,2)-connector along edges of the `k`-th power
/// of the path and every (2,1,2)-connector along its triangles (all three
/// middle choices), by deleting the connector's vertices. Returns the pruned
/// clusters per path position and the audit log.
pub fn power_path_and_prune(
    h: &Hypergraph3,
    c: &TwoColoring,
    family: &ClusterFamily,
    path: &[usize],
    k: usize,
) -> Result<(Vec<Vec<usize>>, Vec<DeletionRecord>)> {
    let role = family.role();
    let mut clusters: Vec<Vec<usize>> =
        path.iter().map(|&o| family.require(o).map(<[usize]>::to_vec)).collect::<Result<_>>()?;
    if path.iter().collect::<BTreeSet<_>>().len() != path.len() {
        return Err(Error::invalid("path repeats a vertex"));
    }
    let mut log = Vec::new();
    let mut remove = |clusters: &mut Vec<Vec<usize>>, positions: Vec<usize>, connector: Connector| -> Result<()> {
        connector
            .revalidate(h, c, role)
            .map_err(|e| Error::fault(format!("detected connector fails revalidation: {e}")))?;
        let removed = connector.vertices();
        for &p in &positions {
            clusters[p].retain(|v| !removed.contains(v));
        }
        log.push(DeletionRecord { positions, connector, removed });
        Ok(())
    };
    let len = path.len();
    for i in 0..len {
        for j in i + 1..len.min(i + k + 1) {
            while let Some(con) = find_c22(h, c, role, &clusters[i], &clusters[j]) {
                remove(&mut clusters, vec![i, j], con)?;
            }
        }
    }
    for i in 0..len {
        for j in i + 1..len.min(i + k + 1) {
            for l in j + 1..len.min(i + k + 1) {
                for (x, z, y) in [(j, i, l), (i, j, l), (i, l, j)] {
                    while let Some(con) = find_c212(h, c, role, &clusters[x], &clusters[z], &clusters[y]) {
                        remove(&mut clusters, vec![x, z, y], con)?;
                    }
                }
            }
        }
    }
    Ok((clusters, log))
}

/// Replays the audit log: every vertex missing from a pruned cluster was
/// removed by a logged connector lying in the logged clusters.
pub fn audit_deletions(
    original: &[Vec<usize>],
    pruned: &[Vec<usize>],
    log: &[DeletionRecord],
) -> std::result::Result<(), String> {
    let logged: FxHashSet<usize> = log.iter().flat_map(|r| r.removed.iter().copied()).collect();
    for rec in log {
        let sides: Vec<&[usize]> = match rec.connector.kind {
            ConnectorKind::C22 => vec![&rec.connector.x, &rec.connector.y],
            _ => vec![&rec.connector.x, &rec.connector.z, &rec.connector.y],
        };
        for (&pos, side) in rec.positions.iter().zip(sides) {
            if side.iter().any(|v| !original[pos].contains(v)) {
                return Err(format!("connector {:?} is not inside the logged clusters", rec.connector));
            }
        }
    }
    for (pos, (before, after)) in original.iter().zip(pruned).enumerate() {
        for v in before {
            if !after.contains(v) && !logged.contains(v) {
                return Err(format!("vertex {v} of position {pos} vanished without a record"));
            }
        }
        if after.iter().any(|v| !before.contains(v)) {
            return Err(format!("position {pos} gained a vertex"));
        }
    }
    Ok(())
}

/// A pair `(u, v)` ending a tight path. The path is stored so that it ends
/// with `u, v`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndTuple {
    pub u: usize,
    pub v: usize,
    pub path: Vec<usize>,
}

impl EndTuple {
    pub fn pair(u: usize, v: usize) -> Self {
        EndTuple { u, v, path: vec![u, v] }
    }

    fn extended(&self, tail: &[usize]) -> EndTuple {
        let mut path = self.path.clone();
        path.extend_from_slice(tail);
        let len = path.len();
        EndTuple { u: path[len - 2], v: path[len - 1], path }
    }
}

/// Whether `(u, v)` is an end-tuple of `path`: for four or more vertices the
/// path ends `.., u, v` or starts `v, u, ..`; any ordered pair of distinct path
/// vertices ends a single triple; a two-vertex path is ended by its own pair.
pub fn is_end_tuple(path: &[usize], u: usize, v: usize) -> bool {
    if u == v {
        return false;
    }
    match path.len() {
        0 | 1 => false,
        2 => (path[0], path[1]) == (u, v) || (path[0], path[1]) == (v, u),
        3 => path.contains(&u) && path.contains(&v),
        len => (path[len - 2], path[len - 1]) == (u, v) || (path[0], path[1]) == (v, u),
    }
}

/// Two end-tuples at the same level of the window induction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quadruple {
    pub level: usize,
    pub first: EndTuple,
    pub second: EndTuple,
    /// Path positions of the clusters holding the two pairs.
    pub first_position: usize,
    pub second_position: usize,
}

/// Pruned clusters per path position and the positions of every window;
/// `windows[i - 1]` is window `i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadrupleContext {
    pub clusters: Vec<Vec<usize>>,
    pub windows: Vec<Vec<usize>>,
}

impl QuadrupleContext {
    /// Consecutive windows of `ell` positions.
    pub fn consecutive(clusters: Vec<Vec<usize>>, ell: usize) -> Result<Self> {
        if ell == 0 {
            return Err(Error::invalid("window length must be positive"));
        }
        let windows = (0..clusters.len() / ell).map(|i| (i * ell..(i + 1) * ell).collect()).collect();
        Ok(QuadrupleContext { clusters, windows })
    }

    fn window(&self, level: usize) -> Result<&[usize]> {
        level
            .checked_sub(1)
            .and_then(|i| self.windows.get(i))
            .map(Vec::as_slice)
            .ok_or_else(|| {
                HypothesisFailure::WindowTooSmall { detail: format!("no window for level {level}") }.into()
            })
    }

    /// Positions of all windows up to and including `level`.
    fn positions_through(&self, level: usize) -> FxHashSet<usize> {
        self.windows.iter().take(level).flatten().copied().collect()
    }
}

/// Checks the level-`i` property: four distinct vertices, the two pairs in
/// distinct clusters of window `i`, each pair an end-tuple of a `red` tight
/// path with at least `i + 1` vertices inside the clusters of windows `1..=i`.
pub fn validate_quadruple(
    ctx: &QuadrupleContext,
    h: &Hypergraph3,
    c: &TwoColoring,
    red: Colour,
    q: &Quadruple,
) -> std::result::Result<(), String> {
    let i = q.level;
    let window = ctx.window(i).map_err(|e| e.to_string())?;
    let four = [q.first.u, q.first.v, q.second.u, q.second.v];
    if four.iter().collect::<BTreeSet<_>>().len() != 4 {
        return Err(format!("vertices {four:?} are not distinct"));
    }
    if q.first_position == q.second_position {
        return Err("both pairs use the same cluster".into());
    }
    let allowed: FxHashSet<usize> =
        ctx.positions_through(i).iter().flat_map(|&p| ctx.clusters[p].iter().copied()).collect();
    for (end, pos) in [(&q.first, q.first_position), (&q.second, q.second_position)] {
        if !window.contains(&pos) {
            return Err(format!("position {pos} is outside window {i}"));
        }
        let cluster = &ctx.clusters[pos];
        if !cluster.contains(&end.u) || !cluster.contains(&end.v) {
            return Err(format!("pair ({}, {}) is not inside cluster at position {pos}", end.u, end.v));
        }
        if !is_end_tuple(&end.path, end.u, end.v) {
            return Err(format!("({}, {}) does not end its path", end.u, end.v));
        }
        if end.path.len() < i + 1 {
            return Err(format!("path of length {} is shorter than {}", end.path.len(), i + 1));
        }
        if let Some(x) = end.path.iter().find(|x| !allowed.contains(x)) {
            return Err(format!("path vertex {x} lies outside windows 1..={i}"));
        }
        validate_tight_path(h, c, &TightPath3::new(end.path.clone()), red).map_err(|e| e.to_string())?;
    }
    Ok(())
}

/// Level-1 quadruple: the first two vertices of the first two clusters of
/// window 1.
pub fn base_quadruple(ctx: &QuadrupleContext) -> Result<Quadruple> {
    let window = ctx.window(1)?;
    if window.len() < 2 {
        return Err(HypothesisFailure::WindowTooSmall { detail: "window 1 has fewer than 2 clusters".into() }.into());
    }
    let (p, q) = (window[0], window[1]);
    let (a, b) = (&ctx.clusters[p], &ctx.clusters[q]);
    if a.len() < 2 || b.len() < 2 {
        return Err(HypothesisFailure::WindowTooSmall { detail: "a base cluster has fewer than 2 vertices".into() }
            .into());
    }
    Ok(Quadruple {
        level: 1,
        first: EndTuple::pair(a[0], a[1]),
        second: EndTuple::pair(b[0], b[1]),
        first_position: p,
        second_position: q,
    })
}

struct Colours<'a> {
    h: &'a Hypergraph3,
    c: &'a TwoColoring,
    red: Colour,
}

impl Colours<'_> {
    fn is_red(&self, a: usize, b: usize, x: usize) -> Result<bool> {
        if !self.h.contains(a, b, x) {
            let mut triple = [a, b, x];
            triple.sort_unstable();
            return Err(HypothesisFailure::MissingTriple { triple }.into());
        }
        match self.c.get(a, b, x) {
            Some(col) => Ok(col == self.red),
            None => Err(Error::invalid(format!("triple {a} {b} {x} is uncoloured"))),
        }
    }
}

fn connector_present(detail: String) -> Error {
    HypothesisFailure::ConnectorPresent { detail }.into()
}

/// From `base` ending `.., p, q` and candidate sets (per window position) of
/// vertices `x` with `p q x` red, builds two red extensions ending in distinct
/// clusters, or `None` when the sets do not suffice.
fn two_extensions(
    col: &Colours<'_>,
    base: &EndTuple,
    sets: &[(usize, Vec<usize>)],
) -> Result<Option<[(EndTuple, usize); 2]>> {
    let q = base.v;
    let mut ends: Vec<(EndTuple, usize)> = Vec::new();
    let mut quiet: Vec<(usize, usize, usize)> = Vec::new();
    for (pos, xs) in sets {
        let mut red_pair = None;
        'outer: for (i, &x1) in xs.iter().enumerate() {
            for &x2 in &xs[i + 1..] {
                if col.is_red(q, x1, x2)? {
                    red_pair = Some((x1, x2));
                    break 'outer;
                }
            }
        }
        match red_pair {
            Some((x1, x2)) => ends.push((base.extended(&[x1, x2]), *pos)),
            None => quiet.push((*pos, xs[0], xs[1])),
        }
    }
    for pair in quiet.chunks_exact(2) {
        if ends.len() >= 2 {
            break;
        }
        let ((px, x1, x2), (py, y1, y2)) = (pair[0], pair[1]);
        if !col.is_red(q, x1, y1)? {
            return Err(connector_present(format!(
                "(2,1,2) through {q}: {x1} {x2} / {y1} {y2}"
            )));
        }
        if col.is_red(x1, y1, y2)? {
            ends.push((base.extended(&[x1, y1, y2]), py));
        } else if col.is_red(y1, x1, x2)? {
            ends.push((base.extended(&[y1, x1, x2]), px));
        } else {
            return Err(connector_present(format!("(2,2) {x1} {x2} / {y1} {y2}")));
        }
    }
    if ends.len() < 2 {
        return Ok(None);
    }
    let second = ends.swap_remove(1);
    let first = ends.swap_remove(0);
    Ok(Some([first, second]))
}

/// Grows a level-`(i-1)` quadruple into a level-`i` one using the clusters of
/// window `i`, following the case analysis: a red triple across the two ends
/// continues one path, after which window vertices forming red triples with
/// its last two vertices extend it twice; otherwise the window vertices
/// forming blue triples with `u2 w2` extend one of the two paths directly.
pub fn extend_quadruple(
    ctx: &QuadrupleContext,
    h: &Hypergraph3,
    c: &TwoColoring,
    red: Colour,
    q: &Quadruple,
) -> Result<Quadruple> {
    let level = q.level + 1;
    let window = ctx.window(level)?;
    let col = Colours { h, c, red };
    let (ue, we) = (&q.first, &q.second);
    let (u1, u2, w1, w2) = (ue.u, ue.v, we.u, we.v);

    let base = if col.is_red(u1, u2, w2)? {
        ue.extended(&[w2])
    } else if col.is_red(w1, w2, u2)? {
        we.extended(&[u2])
    } else {
        return Err(connector_present(format!("(2,2) {u2} {u1} / {w2} {w1}")));
    };
    let (p, qv) = (base.u, base.v);

    let mut red_sets = Vec::new();
    let mut blue_sets = Vec::new();
    for &pos in window {
        let (mut r, mut b) = (Vec::new(), Vec::new());
        for &x in &ctx.clusters[pos] {
            if col.is_red(p, qv, x)? {
                r.push(x);
            } else {
                b.push(x);
            }
        }
        if r.len() >= 2 {
            red_sets.push((pos, r));
        }
        if !b.is_empty() {
            blue_sets.push((pos, b));
        }
    }
    let finish = |ends: [(EndTuple, usize); 2]| {
        let [(first, first_position), (second, second_position)] = ends;
        Quadruple { level, first, second, first_position, second_position }
    };
    if let Some(ends) = two_extensions(&col, &base, &red_sets)? {
        return Ok(finish(ends));
    }

    // Every x with u2 w2 x blue makes u1 u2 x or w1 w2 x red.
    let (mut via_w, mut via_u) = (Vec::new(), Vec::new());
    for (pos, xs) in &blue_sets {
        let (mut ws, mut us) = (Vec::new(), Vec::new());
        for &x in xs {
            let w_red = col.is_red(w1, w2, x)?;
            let u_red = col.is_red(u1, u2, x)?;
            if !w_red && !u_red {
                return Err(connector_present(format!("(2,1,2) through {x}: {u2} {u1} / {w2} {w1}")));
            }
            if w_red {
                ws.push(x);
            }
            if u_red {
                us.push(x);
            }
        }
        if ws.len() >= 2 {
            via_w.push((*pos, ws));
        }
        if us.len() >= 2 {
            via_u.push((*pos, us));
        }
    }
    for (end, sets) in [(we, &via_w), (ue, &via_u)] {
        if let Some(ends) = two_extensions(&col, end, sets)? {
            return Ok(finish(ends));
        }
    }
    Err(HypothesisFailure::ExtensionExhausted { level }.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// Role-coloured path through the auxiliary graph.
    Blue,
    /// Path of the other colour through pruning and window induction.
    Red,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub millis: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub valid: bool,
    pub long_enough: bool,
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureInfo {
    /// `hypothesis`, `fault`, `invalid_input`, `parse` or `io`.
    pub class: String,
    pub label: String,
    pub message: String,
    pub hypothesis: Option<HypothesisFailure>,
}

impl FailureInfo {
    pub fn from_error(e: &Error) -> Self {
        let (class, label, hypothesis) = match e {
            Error::Hypothesis(h) => ("hypothesis", h.label().to_string(), Some(h.clone())),
            Error::Fault(_) => ("fault", "fault".into(), None),
            Error::InvalidInput(_) => ("invalid_input", "invalid_input".into(), None),
            Error::Parse { .. } => ("parse", "parse".into(), None),
            Error::Io(_) => ("io", "io".into(), None),
        };
        FailureInfo { class: class.into(), label, message: e.to_string(), hypothesis }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub role: Option<Colour>,
    /// Origins whose cluster holds a role-coloured clique.
    pub role_clusters: usize,
    pub f_two_edges: Option<usize>,
    pub f_three_edges: Option<usize>,
    pub branch: Option<Branch>,
    pub obstruction_sizes: Vec<usize>,
    pub alternating_path: Vec<usize>,
    pub subgraph_certificate: Option<ExpansionCertificate>,
    pub deletions: Vec<DeletionRecord>,
    pub levels: usize,
    pub colour: Option<Colour>,
    pub path: Option<Vec<usize>>,
    pub verdict: Option<Verdict>,
    pub failure: Option<FailureInfo>,
    pub timings: Vec<StageTiming>,
}

impl PipelineReport {
    pub fn succeeded(&self) -> bool {
        self.failure.is_none() && self.path.is_some()
    }

    /// The report without wall-clock fields, for byte-stable comparison.
    pub fn without_timings(&self) -> PipelineReport {
        PipelineReport { timings: Vec::new(), ..self.clone() }
    }
}

struct Stopwatch<'a> {
    report: &'a mut PipelineReport,
    last: Instant,
}

impl Stopwatch<'_> {
    fn lap(&mut self, stage: &str) {
        let now = Instant::now();
        self.report.timings.push(StageTiming {
            stage: stage.into(),
            millis: (now - self.last).as_secs_f64() * 1e3,
        });
        self.last = now;
    }
}

/// Runs the pipeline and always returns a report; a failure is recorded in it.
pub fn run_pipeline(host: &Host, params: &PipelineParams, c: &TwoColoring) -> PipelineReport {
    let mut report = PipelineReport::default();
    if let Err(e) = pipeline(host, params, c, &mut report) {
        report.failure = Some(FailureInfo::from_error(&e));
    }
    report
}

/// Monochromatic tight path with at least `params.n` vertices, or the error
/// naming the hypothesis that failed.
pub fn extract_mono_tight_path(
    g: &Graph,
    params: &PipelineParams,
    c: &TwoColoring,
) -> Result<(Colour, TightPath3)> {
    let host = Host::build(g, params.k, params.t_prime)?;
    let mut report = PipelineReport::default();
    pipeline(&host, params, c, &mut report)
}

fn pipeline(
    host: &Host,
    params: &PipelineParams,
    c: &TwoColoring,
    report: &mut PipelineReport,
) -> Result<(Colour, TightPath3)> {
    params.validate()?;
    let h = &host.h;
    if !c.matches_host(h) {
        return Err(Error::invalid("colouring does not cover exactly the host triples"));
    }
    let g = &host.base;
    let mut clock = Stopwatch { report, last: Instant::now() };

    if params.require_certificate {
        let cert = certify_p1(g, params.eps, params.n, CertifyMode::spectral())?;
        if !cert.passed {
            return Err(params.hypothesis(
                HypothesisFailure::CertificateAbsent {
                    detail: format!("lambda bound {:?} vs threshold {:?}", cert.lambda2_bound, cert.threshold),
                }
                .into(),
            ));
        }
        clock.lap("certify");
    }

    // Monochromatic cliques and the role colour.
    let mut cliques = Vec::with_capacity(host.num_clusters());
    for v in 0..host.num_clusters() {
        match find_mono_clique(h, c, &host.cluster(v), params.t)? {
            Some(found) => cliques.push(found),
            None => {
                return Err(params.hypothesis(HypothesisFailure::ClusterRamsey { cluster: v, t: params.t }.into()))
            }
        }
    }
    let blue = cliques.iter().filter(|(col, _)| *col == Colour::Blue).count();
    let red = cliques.len() - blue;
    let role = match blue.cmp(&red) {
        std::cmp::Ordering::Greater => Colour::Blue,
        std::cmp::Ordering::Less => Colour::Red,
        std::cmp::Ordering::Equal => params.tie_break,
    };
    let mut members = Vec::new();
    for (v, (col, clique)) in cliques.into_iter().enumerate() {
        if col == role {
            members.push((v, clique));
        } else if let Some(other) = find_mono_clique_in(h, c, &host.cluster(v), params.t, role)? {
            members.push((v, other));
        }
    }
    let family = ClusterFamily::new(members, role)?;
    clock.report.role = Some(role);
    clock.report.role_clusters = family.len();
    clock.lap("clusters");

    // Auxiliary graph.
    let origins: Vec<usize> = family.origins().collect();
    let scope = power_scope(&host.power, &origins);
    let aux = build_auxiliary_f(h, c, &family, &scope)?;
    clock.report.f_two_edges = Some(aux.f.num_two_edges());
    clock.report.f_three_edges = Some(aux.f.num_three_edges());
    clock.lap("auxiliary");

    let levels = params.k + 1;
    let obstruction = if params.strict_constants {
        extract_obstruction_sets(&aux.f, levels, params.c, params.n)?
    } else {
        extract_obstruction_sets_with(&aux.f, levels, params.c, params.n, params.sizing, None)?
    };
    clock.lap("obstruction");

    let (colour, path) = match obstruction {
        Obstruction::Path(f_path) => {
            clock.report.branch = Some(Branch::Blue);
            let path = blue_path_from_23path(&aux, &f_path, &family, h, c)?;
            clock.lap("blue_path");
            (role, path)
        }
        Obstruction::Sets(sets) => {
            clock.report.branch = Some(Branch::Red);
            let sets: Vec<Vec<usize>> =
                sets.iter().map(|s| s.iter().map(|&i| aux.origin[i]).collect()).collect();
            clock.report.obstruction_sizes = sets.iter().map(Vec::len).collect();
            let path = red_branch(g, h, c, params, &family, &sets, &mut clock).map_err(|e| params.hypothesis(e))?;
            (role.other(), path)
        }
    };

    let verdict = match validate_tight_path(h, c, &path, colour) {
        Ok(()) => Verdict { valid: true, long_enough: path.len() >= params.n, detail: None },
        Err(e) => Verdict { valid: false, long_enough: path.len() >= params.n, detail: Some(e.to_string()) },
    };
    clock.report.verdict = Some(verdict.clone());
    clock.report.colour = Some(colour);
    clock.report.path = Some(path.vertices.clone());
    clock.lap("validate");
    if !verdict.valid {
        return Err(Error::fault(format!("output path invalid: {}", verdict.detail.unwrap_or_default())));
    }
    if !verdict.long_enough {
        return Err(Error::fault(format!("output path has {} < {} vertices", path.len(), params.n)));
    }
    Ok((colour, path))
}

fn red_branch(
    g: &Graph,
    h: &Hypergraph3,
    c: &TwoColoring,
    params: &PipelineParams,
    family: &ClusterFamily,
    sets: &[Vec<usize>],
    clock: &mut Stopwatch<'_>,
) -> Result<TightPath3> {
    let union: Vec<usize> = sets.iter().flatten().copied().collect();
    let (sub, map) = g.induced(&union);
    let local: rustc_hash::FxHashMap<usize, usize> = map.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let local_sets: Vec<Vec<usize>> = sets.iter().map(|s| s.iter().map(|v| local[v]).collect()).collect();
    clock.report.subgraph_certificate =
        certify_p1(&sub, params.eps, params.n, CertifyMode::Sampled { trials: 200, seed: 0 }).ok();
    let alt = find_alternating_path(&sub, &local_sets, params.m, params.alt_path_budget)?;
    let alt: Vec<usize> = alt.iter().map(|&i| map[i]).collect();
    clock.report.alternating_path = alt.clone();
    clock.lap("alternating_path");

    let original: Vec<Vec<usize>> =
        alt.iter().map(|&o| family.require(o).map(<[usize]>::to_vec)).collect::<Result<_>>()?;
    let (pruned, log) = power_path_and_prune(h, c, family, &alt, params.k)?;
    audit_deletions(&original, &pruned, &log).map_err(|e| Error::fault(format!("deletion audit failed: {e}")))?;
    clock.report.deletions = log;
    if params.strict_constants {
        let budget = deletion_budget(params.k);
        for (pos, (before, after)) in original.iter().zip(&pruned).enumerate() {
            if before.len() - after.len() > budget {
                return Err(Error::fault(format!("pruning removed more than {budget} vertices at position {pos}")));
            }
        }
    }
    if let Some((position, cl)) = pruned.iter().enumerate().find(|(_, cl)| cl.len() < MIN_PRUNED_CLUSTER) {
        return Err(HypothesisFailure::PruningUnderflow { position, remaining: cl.len() }.into());
    }
    clock.lap("prune");

    let red = family.role().other();
    let ctx = QuadrupleContext::consecutive(pruned, params.ell)?;
    let mut q = base_quadruple(&ctx)?;
    for _ in 2..params.n {
        let next = extend_quadruple(&ctx, h, c, red, &q)?;
        validate_quadruple(&ctx, h, c, red, &next)
            .map_err(|e| Error::fault(format!("level {} quadruple invalid: {e}", next.level)))?;
        if next.first.path.len() <= q.first.path.len().min(q.second.path.len()) {
            return Err(Error::fault("quadruple paths did not grow"));
        }
        q = next;
    }
    clock.report.levels = q.level;
    clock.lap("induction");
    Ok(TightPath3::new(q.first.path))
}
