//! Connector gadgets between monochromatic clusters.
//!
//! With `role` the colour of the clusters:
//!
//! - a (2,2)-connector is `x1, x2` in one cluster and `y1, y2` in another with
//!   role-coloured triples `x1x2y1` and `y1y2x1`;
//! - a (2,1,2)-connector adds `z` from a middle cluster, with role-coloured
//!   triples `x1x2z`, `x1zy1` and `zy1y2`;
//! - (6,6) and (6,3,6) connectors are three pairwise vertex-disjoint copies.
//!
//! All searches are exhaustive and return the lexicographically least witness
//! with respect to the order of the cluster lists.

use std::collections::BTreeMap;

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{Colour, Hypergraph3, TwoColoring};
use crate::two_three::{Edge23, TwoThreeGraph};

/// Disjoint clusters keyed by origin vertex, all meant to be cliques in `role`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterFamily {
    clusters: BTreeMap<usize, Vec<usize>>,
    role: Colour,
}

impl ClusterFamily {
    pub fn new(clusters: impl IntoIterator<Item = (usize, Vec<usize>)>, role: Colour) -> Result<Self> {
        let clusters: BTreeMap<usize, Vec<usize>> = clusters.into_iter().collect();
        let mut owner = FxHashMap::default();
        for (&origin, members) in &clusters {
            for &v in members {
                if let Some(other) = owner.insert(v, origin) {
                    return Err(Error::invalid(format!("vertex {v} lies in clusters {other} and {origin}")));
                }
            }
        }
        Ok(ClusterFamily { clusters, role })
    }

    pub fn role(&self) -> Colour {
        self.role
    }

    pub fn get(&self, origin: usize) -> Option<&[usize]> {
        self.clusters.get(&origin).map(Vec::as_slice)
    }

    pub(crate) fn require(&self, origin: usize) -> Result<&[usize]> {
        self.get(origin).ok_or_else(|| Error::invalid(format!("no cluster for origin {origin}")))
    }

    pub fn origins(&self) -> impl Iterator<Item = usize> + '_ {
        self.clusters.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &[usize])> + '_ {
        self.clusters.iter().map(|(&o, c)| (o, c.as_slice()))
    }

    /// Removes `vertices` from the cluster of `origin`; returns how many were
    /// actually present.
    pub fn remove_vertices(&mut self, origin: usize, vertices: &[usize]) -> usize {
        let Some(members) = self.clusters.get_mut(&origin) else {
            return 0;
        };
        let before = members.len();
        members.retain(|v| !vertices.contains(v));
        before - members.len()
    }

    /// Checks that every cluster is a clique of `h` in the role colour.
    pub fn check_monochromatic(&self, h: &Hypergraph3, c: &TwoColoring) -> Result<()> {
        for (origin, members) in self.iter() {
            for (i, &a) in members.iter().enumerate() {
                for (j, &b) in members.iter().enumerate().skip(i + 1) {
                    for &x in &members[j + 1..] {
                        if !h.contains(a, b, x) || !c.is(a, b, x, self.role) {
                            return Err(Error::invalid(format!(
                                "cluster {origin} triple {a} {b} {x} is not a {} triple",
                                self.role
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConnectorKind {
    C22,
    C212,
    C66,
    C636,
}

impl ConnectorKind {
    pub fn has_middle(self) -> bool {
        matches!(self, ConnectorKind::C212 | ConnectorKind::C636)
    }

    fn single(self) -> ConnectorKind {
        match self {
            ConnectorKind::C22 | ConnectorKind::C66 => ConnectorKind::C22,
            ConnectorKind::C212 | ConnectorKind::C636 => ConnectorKind::C212,
        }
    }
}

/// Vertices of a connector grouped by cluster. For the triple kinds the sides
/// hold the three copies back to back: copy `i` is `x[2i..2i+2]`,
/// `z[i]`, `y[2i..2i+2]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Connector {
    pub kind: ConnectorKind,
    pub x: Vec<usize>,
    pub z: Vec<usize>,
    pub y: Vec<usize>,
}

impl Connector {
    pub fn c22(x1: usize, x2: usize, y1: usize, y2: usize) -> Self {
        Connector { kind: ConnectorKind::C22, x: vec![x1, x2], z: Vec::new(), y: vec![y1, y2] }
    }

    pub fn c212(x1: usize, x2: usize, z: usize, y1: usize, y2: usize) -> Self {
        Connector { kind: ConnectorKind::C212, x: vec![x1, x2], z: vec![z], y: vec![y1, y2] }
    }

    fn combine(parts: &[Connector]) -> Self {
        let kind = match parts[0].kind {
            ConnectorKind::C22 => ConnectorKind::C66,
            _ => ConnectorKind::C636,
        };
        Connector {
            kind,
            x: parts.iter().flat_map(|p| p.x.iter().copied()).collect(),
            z: parts.iter().flat_map(|p| p.z.iter().copied()).collect(),
            y: parts.iter().flat_map(|p| p.y.iter().copied()).collect(),
        }
    }

    /// The single connectors making up this one (itself for C22/C212).
    pub fn parts(&self) -> Vec<Connector> {
        let count = self.x.len() / 2;
        let single = self.kind.single();
        (0..count)
            .map(|i| Connector {
                kind: single,
                x: self.x[2 * i..2 * i + 2].to_vec(),
                z: if single == ConnectorKind::C212 { vec![self.z[i]] } else { Vec::new() },
                y: self.y[2 * i..2 * i + 2].to_vec(),
            })
            .collect()
    }

    /// The same gadget read from the other side.
    pub fn swapped(&self) -> Self {
        Connector { kind: self.kind, x: self.y.clone(), z: self.z.clone(), y: self.x.clone() }
    }

    pub fn vertices(&self) -> Vec<usize> {
        self.x.iter().chain(&self.z).chain(&self.y).copied().collect()
    }

    /// The defining triples of every part.
    pub fn triples(&self) -> Vec<[usize; 3]> {
        self.parts()
            .iter()
            .flat_map(|p| {
                let (x1, x2, y1, y2) = (p.x[0], p.x[1], p.y[0], p.y[1]);
                match p.z.first() {
                    None => vec![[x1, x2, y1], [y1, y2, x1]],
                    Some(&z) => vec![[x1, x2, z], [x1, z, y1], [z, y1, y2]],
                }
            })
            .collect()
    }

    /// Re-checks the defining triples and the vertex-disjointness of parts.
    pub fn revalidate(&self, h: &Hypergraph3, c: &TwoColoring, role: Colour) -> std::result::Result<(), String> {
        let expected = match self.kind {
            ConnectorKind::C22 => (2, 0),
            ConnectorKind::C212 => (2, 1),
            ConnectorKind::C66 => (6, 0),
            ConnectorKind::C636 => (6, 3),
        };
        if (self.x.len(), self.z.len()) != expected || self.y.len() != expected.0 {
            return Err(format!("{:?} has the wrong shape", self.kind));
        }
        let mut vs = self.vertices();
        vs.sort_unstable();
        if vs.windows(2).any(|w| w[0] == w[1]) {
            return Err(format!("{:?} repeats a vertex", self.kind));
        }
        for [a, b, x] in self.triples() {
            if !h.contains(a, b, x) {
                return Err(format!("{a} {b} {x} is not a triple"));
            }
            if !c.is(a, b, x, role) {
                return Err(format!("{a} {b} {x} is not {role}"));
            }
        }
        Ok(())
    }
}

fn role(h: &Hypergraph3, c: &TwoColoring, r: Colour, a: usize, b: usize, x: usize) -> bool {
    h.contains(a, b, x) && c.is(a, b, x, r)
}

/// Least `(x1, x2, y1, y2)` forming a role-coloured (2,2)-connector.
pub fn find_c22(
    h: &Hypergraph3,
    c: &TwoColoring,
    r: Colour,
    xs: &[usize],
    ys: &[usize],
) -> Option<Connector> {
    for &x1 in xs {
        // first y2 per y1 closing y1y2x1, if any
        let closer: Vec<Option<usize>> = ys
            .iter()
            .map(|&y1| ys.iter().copied().find(|&y2| y2 != y1 && role(h, c, r, y1, y2, x1)))
            .collect();
        for &x2 in xs {
            if x2 == x1 {
                continue;
            }
            for (i, &y1) in ys.iter().enumerate() {
                if let Some(y2) = closer[i] {
                    if role(h, c, r, x1, x2, y1) {
                        return Some(Connector::c22(x1, x2, y1, y2));
                    }
                }
            }
        }
    }
    None
}

/// Least `(x1, x2, z, y1, y2)` forming a role-coloured (2,1,2)-connector.
pub fn find_c212(
    h: &Hypergraph3,
    c: &TwoColoring,
    r: Colour,
    xs: &[usize],
    zs: &[usize],
    ys: &[usize],
) -> Option<Connector> {
    for &x1 in xs {
        for &x2 in xs {
            if x2 == x1 {
                continue;
            }
            for &z in zs {
                if !role(h, c, r, x1, x2, z) {
                    continue;
                }
                for &y1 in ys {
                    if !role(h, c, r, x1, z, y1) {
                        continue;
                    }
                    if let Some(y2) = ys.iter().copied().find(|&y2| y2 != y1 && role(h, c, r, z, y1, y2)) {
                        return Some(Connector::c212(x1, x2, z, y1, y2));
                    }
                }
            }
        }
    }
    None
}

/// Every connector of the single `kind` between the clusters, one per vertex
/// set (the lexicographically least labelling), in discovery order.
fn all_connectors(
    h: &Hypergraph3,
    c: &TwoColoring,
    r: Colour,
    kind: ConnectorKind,
    xs: &[usize],
    zs: &[usize],
    ys: &[usize],
) -> Vec<Connector> {
    let mut seen = rustc_hash::FxHashSet::default();
    let mut out = Vec::new();
    let pair = |a: usize, b: usize| (a.min(b), a.max(b));
    for &x1 in xs {
        for &x2 in xs {
            if x2 == x1 {
                continue;
            }
            match kind {
                ConnectorKind::C22 => {
                    for &y1 in ys {
                        if !role(h, c, r, x1, x2, y1) {
                            continue;
                        }
                        for &y2 in ys {
                            if y2 != y1 && role(h, c, r, y1, y2, x1) && seen.insert((pair(x1, x2), 0, pair(y1, y2))) {
                                out.push(Connector::c22(x1, x2, y1, y2));
                            }
                        }
                    }
                }
                _ => {
                    for &z in zs {
                        if !role(h, c, r, x1, x2, z) {
                            continue;
                        }
                        for &y1 in ys {
                            if !role(h, c, r, x1, z, y1) {
                                continue;
                            }
                            for &y2 in ys {
                                if y2 != y1
                                    && role(h, c, r, z, y1, y2)
                                    && seen.insert((pair(x1, x2), z, pair(y1, y2)))
                                {
                                    out.push(Connector::c212(x1, x2, z, y1, y2));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Three pairwise vertex-disjoint (2,2)-connectors (for `C66`) or
/// (2,1,2)-connectors through `zs` (for `C636`, middle vertices included).
/// Clusters together may hold at most 128 vertices.
pub fn find_disjoint_triple(
    h: &Hypergraph3,
    c: &TwoColoring,
    r: Colour,
    kind: ConnectorKind,
    xs: &[usize],
    zs: &[usize],
    ys: &[usize],
) -> Result<Option<Connector>> {
    let single = kind.single();
    if kind == single {
        return Err(Error::invalid("find_disjoint_triple expects C66 or C636"));
    }
    let mut local = FxHashMap::default();
    for &v in xs.iter().chain(if single == ConnectorKind::C212 { zs } else { &[] }).chain(ys) {
        let next = local.len();
        local.entry(v).or_insert(next);
    }
    if local.len() > 128 {
        return Err(Error::invalid("clusters too large for the disjoint-triple search"));
    }
    if xs.len() < 6 || ys.len() < 6 || (single == ConnectorKind::C212 && zs.len() < 3) {
        return Ok(None);
    }
    let candidates = all_connectors(h, c, r, single, xs, zs, ys);
    let masks: Vec<u128> = candidates
        .iter()
        .map(|k| k.vertices().iter().fold(0u128, |m, v| m | 1u128 << local[v]))
        .collect();
    for a in 0..masks.len() {
        let rest: Vec<usize> = (a + 1..masks.len()).filter(|&b| masks[a] & masks[b] == 0).collect();
        for (i, &b) in rest.iter().enumerate() {
            let used = masks[a] | masks[b];
            if let Some(&d) = rest[i + 1..].iter().find(|&&d| masks[d] & used == 0) {
                let parts = [candidates[a].clone(), candidates[b].clone(), candidates[d].clone()];
                return Ok(Some(Connector::combine(&parts)));
            }
        }
    }
    Ok(None)
}

/// Cluster pairs and triangles (by origin) to test when building `F`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scope {
    pub pairs: Vec<(usize, usize)>,
    pub triangles: Vec<(usize, usize, usize)>,
}

/// The auxiliary (2,3)-graph over cluster origins, with the gadget behind
/// every edge. `f` vertex `i` stands for origin `origin[i]`.
#[derive(Debug, Clone)]
pub struct AuxiliaryGraph {
    pub f: TwoThreeGraph,
    pub origin: Vec<usize>,
    index: FxHashMap<usize, usize>,
    /// Gadgets keyed by `Edge23` over `f` indices, pair stored ascending; the
    /// x-side belongs to the smaller index.
    gadgets: FxHashMap<Edge23, Connector>,
}

impl AuxiliaryGraph {
    pub fn index_of(&self, origin: usize) -> Option<usize> {
        self.index.get(&origin).copied()
    }

    /// The gadget for step `u -> v` (with witness `w` for 3-edges), oriented
    /// so that its x-side lies in the cluster of `u`.
    pub fn gadget(&self, u: usize, v: usize, w: Option<usize>) -> Option<Connector> {
        let (a, b) = (u.min(v), u.max(v));
        let key = match w {
            None => Edge23::Two(a, b),
            Some(w) => Edge23::Three(a, b, w),
        };
        let g = self.gadgets.get(&key)?;
        Some(if u == a { g.clone() } else { g.swapped() })
    }
}

/// `uv` is a 2-edge iff a role-coloured (6,6)-connector joins the clusters of
/// `u` and `v`; `uv(w)` is a 3-edge iff a (6,3,6)-connector joins them through
/// the cluster of `w`. Each scope triangle is tested with all three middles.
pub fn build_auxiliary_f(
    h: &Hypergraph3,
    c: &TwoColoring,
    family: &ClusterFamily,
    scope: &Scope,
) -> Result<AuxiliaryGraph> {
    let origin: Vec<usize> = family.origins().collect();
    let index: FxHashMap<usize, usize> = origin.iter().enumerate().map(|(i, &o)| (o, i)).collect();
    let r = family.role();
    let mut jobs: Vec<(usize, usize, Option<usize>)> = Vec::new();
    for &(u, v) in &scope.pairs {
        family.require(u)?;
        family.require(v)?;
        if u != v {
            jobs.push((u.min(v), u.max(v), None));
        }
    }
    for &(a, b, d) in &scope.triangles {
        for o in [a, b, d] {
            family.require(o)?;
        }
        if a == b || b == d || a == d {
            return Err(Error::invalid(format!("degenerate scope triangle {a} {b} {d}")));
        }
        for (u, v, w) in [(b, d, a), (a, d, b), (a, b, d)] {
            jobs.push((u.min(v), u.max(v), Some(w)));
        }
    }
    jobs.sort_unstable();
    jobs.dedup();
    let found: Vec<Result<Option<Connector>>> = jobs
        .par_iter()
        .map(|&(u, v, w)| {
            let xs = family.require(u)?;
            let ys = family.require(v)?;
            match w {
                None => find_disjoint_triple(h, c, r, ConnectorKind::C66, xs, &[], ys),
                Some(w) => find_disjoint_triple(h, c, r, ConnectorKind::C636, xs, family.require(w)?, ys),
            }
        })
        .collect();
    let mut f = TwoThreeGraph::new(origin.len());
    let mut gadgets = FxHashMap::default();
    for (&(u, v, w), res) in jobs.iter().zip(found) {
        let Some(gadget) = res? else { continue };
        let (iu, iv) = (index[&u], index[&v]);
        let key = match w {
            None => {
                f.add_two(iu, iv)?;
                Edge23::Two(iu, iv)
            }
            Some(w) => {
                let iw = index[&w];
                f.add_three(iu, iv, iw)?;
                Edge23::Three(iu, iv, iw)
            }
        };
        gadgets.insert(key, gadget);
    }
    Ok(AuxiliaryGraph { f, origin, index, gadgets })
}
