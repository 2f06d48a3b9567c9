//! 3-uniform hypergraphs, red/blue colourings of their triples, tight paths
//! and the searches that run inside clusters.
//!
//! Tight paths on fewer than three vertices have no edges; they are accepted
//! vacuously by [`validate_tight_path`]. A pair `(u, v)` is treated as a
//! tight path of length 2, which is how the base case of the red branch
//! starts.

use std::fmt::{self, Write as _};

use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{parse_field, Graph};

/// Vertex ids are packed 21 bits each into a `u64` key.
pub const MAX_VERTICES: usize = 1 << 21;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Colour {
    Red,
    Blue,
}

impl Colour {
    pub fn other(self) -> Colour {
        match self {
            Colour::Red => Colour::Blue,
            Colour::Blue => Colour::Red,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Colour::Red => 'R',
            Colour::Blue => 'B',
        }
    }

    pub fn from_letter(s: &str) -> Option<Colour> {
        match s {
            "R" | "r" | "red" => Some(Colour::Red),
            "B" | "b" | "blue" => Some(Colour::Blue),
            _ => None,
        }
    }
}

impl fmt::Display for Colour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Colour::Red => "red",
            Colour::Blue => "blue",
        })
    }
}

/// Sorted packed key of an unordered triple. The caller guarantees distinct
/// ids below [`MAX_VERTICES`].
#[inline]
pub fn triple_key(a: usize, b: usize, c: usize) -> u64 {
    let (mut x, mut y, mut z) = (a as u64, b as u64, c as u64);
    if x > y {
        std::mem::swap(&mut x, &mut y);
    }
    if y > z {
        std::mem::swap(&mut y, &mut z);
    }
    if x > y {
        std::mem::swap(&mut x, &mut y);
    }
    (x << 42) | (y << 21) | z
}

#[inline]
pub fn unpack_key(key: u64) -> [usize; 3] {
    const MASK: u64 = (1 << 21) - 1;
    [(key >> 42) as usize, ((key >> 21) & MASK) as usize, (key & MASK) as usize]
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Hypergraph3 {
    num_vertices: usize,
    triples: FxHashSet<u64>,
    cluster_map: Option<Vec<usize>>,
}

impl Hypergraph3 {
    pub fn new(num_vertices: usize) -> Result<Self> {
        if num_vertices > MAX_VERTICES {
            return Err(Error::invalid(format!("at most {MAX_VERTICES} vertices are supported")));
        }
        Ok(Hypergraph3 { num_vertices, triples: FxHashSet::default(), cluster_map: None })
    }

    /// Complete 3-graph on `num_vertices` vertices.
    pub fn complete(num_vertices: usize) -> Result<Self> {
        let mut h = Hypergraph3::new(num_vertices)?;
        for a in 0..num_vertices {
            for b in a + 1..num_vertices {
                for c in b + 1..num_vertices {
                    h.triples.insert(triple_key(a, b, c));
                }
            }
        }
        Ok(h)
    }

    pub fn add_triple(&mut self, a: usize, b: usize, c: usize) -> Result<bool> {
        if a == b || b == c || a == c {
            return Err(Error::invalid(format!("triple {a} {b} {c} repeats a vertex")));
        }
        if a.max(b).max(c) >= self.num_vertices {
            return Err(Error::invalid(format!("triple {a} {b} {c} out of range")));
        }
        Ok(self.triples.insert(triple_key(a, b, c)))
    }

    pub fn with_cluster_map(mut self, map: Vec<usize>) -> Result<Self> {
        if map.len() != self.num_vertices {
            return Err(Error::invalid("cluster map length differs from vertex count"));
        }
        self.cluster_map = Some(map);
        Ok(self)
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_triples(&self) -> usize {
        self.triples.len()
    }

    pub fn cluster_map(&self) -> Option<&[usize]> {
        self.cluster_map.as_deref()
    }

    pub fn contains(&self, a: usize, b: usize, c: usize) -> bool {
        a != b && b != c && a != c && self.triples.contains(&triple_key(a, b, c))
    }

    pub fn contains_key(&self, key: u64) -> bool {
        self.triples.contains(&key)
    }

    pub fn keys(&self) -> impl Iterator<Item = u64> + '_ {
        self.triples.iter().copied()
    }

    /// All triples, each sorted, in lexicographic order.
    pub fn triples_sorted(&self) -> Vec<[usize; 3]> {
        let mut keys: Vec<u64> = self.triples.iter().copied().collect();
        keys.sort_unstable();
        keys.into_iter().map(unpack_key).collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("h3 {}\n", self.num_vertices);
        for [a, b, c] in self.triples_sorted() {
            writeln!(out, "{a} {b} {c}").unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "missing header"))?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some("h3") {
            return Err(Error::parse(1, "expected `h3 <num_vertices>`"));
        }
        let mut h = Hypergraph3::new(parse_field(parts.next(), 1)?)?;
        for (i, line) in lines {
            let mut f = line.split_whitespace();
            let a: usize = parse_field(f.next(), i + 1)?;
            let b: usize = parse_field(f.next(), i + 1)?;
            let c: usize = parse_field(f.next(), i + 1)?;
            if f.next().is_some() {
                return Err(Error::parse(i + 1, "trailing fields"));
            }
            h.add_triple(a, b, c).map_err(|e| Error::parse(i + 1, e.to_string()))?;
        }
        Ok(h)
    }
}

/// Every triangle of `g`, found by intersecting sorted neighbour lists of
/// `u < v` above `v`. Carries `g`'s labels over as the cluster map.
pub fn triangles_to_hypergraph(g: &Graph) -> Result<Hypergraph3> {
    let mut h = Hypergraph3::new(g.num_vertices())?;
    for u in 0..g.num_vertices() {
        let nu = g.neighbours(u);
        for &v in nu.iter().filter(|&&v| v > u) {
            let nv = g.neighbours(v);
            let (mut i, mut j) = (0, 0);
            while i < nu.len() && j < nv.len() {
                match nu[i].cmp(&nv[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        let w = nu[i];
                        if w > v {
                            h.triples.insert(triple_key(u, v, w));
                        }
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
    }
    if let Some(labels) = g.labels() {
        h.cluster_map = Some(labels.to_vec());
    }
    Ok(h)
}

/// A total red/blue map on the triples of a host hypergraph.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TwoColoring {
    colours: FxHashMap<u64, Colour>,
}

impl TwoColoring {
    pub fn from_fn(h: &Hypergraph3, mut f: impl FnMut([usize; 3]) -> Colour) -> Self {
        let colours = h.keys().map(|k| (k, f(unpack_key(k)))).collect();
        TwoColoring { colours }
    }

    /// As [`TwoColoring::from_fn`], calling `f` in ascending triple order so
    /// that seeded random colourings are reproducible.
    pub fn from_fn_ordered(h: &Hypergraph3, mut f: impl FnMut([usize; 3]) -> Colour) -> Self {
        let mut keys: Vec<u64> = h.keys().collect();
        keys.sort_unstable();
        let colours = keys.into_iter().map(|k| (k, f(unpack_key(k)))).collect();
        TwoColoring { colours }
    }

    pub fn monochromatic(h: &Hypergraph3, colour: Colour) -> Self {
        TwoColoring::from_fn(h, |_| colour)
    }

    /// Colour of the triple, or `None` if it is not an edge of the host.
    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize) -> Option<Colour> {
        if a == b || b == c || a == c {
            return None;
        }
        self.colours.get(&triple_key(a, b, c)).copied()
    }

    #[inline]
    pub fn is(&self, a: usize, b: usize, c: usize, colour: Colour) -> bool {
        self.get(a, b, c) == Some(colour)
    }

    pub fn get_key(&self, key: u64) -> Option<Colour> {
        self.colours.get(&key).copied()
    }

    /// Recolours an existing triple. Returns false if it is not in the domain.
    pub fn set(&mut self, a: usize, b: usize, c: usize, colour: Colour) -> bool {
        match self.colours.get_mut(&triple_key(a, b, c)) {
            Some(slot) => {
                *slot = colour;
                true
            }
            None => false,
        }
    }

    pub fn len(&self) -> usize {
        self.colours.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colours.is_empty()
    }

    pub fn count(&self, colour: Colour) -> usize {
        self.colours.values().filter(|&&c| c == colour).count()
    }

    /// Exchanges red and blue everywhere.
    pub fn swapped(&self) -> Self {
        TwoColoring { colours: self.colours.iter().map(|(&k, &c)| (k, c.other())).collect() }
    }

    /// True iff the colouring is defined on exactly the triples of `h`.
    pub fn matches_host(&self, h: &Hypergraph3) -> bool {
        self.colours.len() == h.num_triples() && h.keys().all(|k| self.colours.contains_key(&k))
    }

    pub fn to_text(&self) -> String {
        let mut keys: Vec<u64> = self.colours.keys().copied().collect();
        keys.sort_unstable();
        let mut out = String::new();
        for k in keys {
            let [a, b, c] = unpack_key(k);
            writeln!(out, "{a} {b} {c} {}", self.colours[&k].letter()).unwrap();
        }
        out
    }

    /// Parses `a b c R|B` lines. Triples absent from `h` are rejected, and
    /// every triple of `h` must be coloured.
    pub fn from_text(h: &Hypergraph3, text: &str) -> Result<Self> {
        let mut colours = FxHashMap::default();
        for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let lineno = i + 1;
            let mut f = line.split_whitespace();
            let a: usize = parse_field(f.next(), lineno)?;
            let b: usize = parse_field(f.next(), lineno)?;
            let c: usize = parse_field(f.next(), lineno)?;
            let colour = f
                .next()
                .and_then(Colour::from_letter)
                .ok_or_else(|| Error::parse(lineno, "expected colour R or B"))?;
            if !h.contains(a, b, c) {
                return Err(Error::parse(lineno, format!("triple {a} {b} {c} is not in the host")));
            }
            colours.insert(triple_key(a, b, c), colour);
        }
        let colouring = TwoColoring { colours };
        if !colouring.matches_host(h) {
            return Err(Error::invalid(format!(
                "colouring covers {} of {} host triples",
                colouring.len(),
                h.num_triples()
            )));
        }
        Ok(colouring)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TightPath3 {
    pub vertices: Vec<usize>,
}

impl TightPath3 {
    pub fn new(vertices: Vec<usize>) -> Self {
        TightPath3 { vertices }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Consecutive windows, i.e. the edges of the path.
    pub fn windows(&self) -> impl Iterator<Item = [usize; 3]> + '_ {
        self.vertices.windows(3).map(|w| [w[0], w[1], w[2]])
    }

    /// Path file: `path <R|B>` then the vertices on one line.
    pub fn to_text(&self, colour: Colour) -> String {
        let body: Vec<String> = self.vertices.iter().map(ToString::to_string).collect();
        format!("path {}\n{}\n", colour.letter(), body.join(" "))
    }

    pub fn from_text(text: &str) -> Result<(Colour, TightPath3)> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::parse(1, "missing header"))?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some("path") {
            return Err(Error::parse(1, "expected `path <R|B>`"));
        }
        let colour = parts
            .next()
            .and_then(Colour::from_letter)
            .ok_or_else(|| Error::parse(1, "expected colour R or B"))?;
        let vertices = lines
            .flat_map(str::split_whitespace)
            .map(|f| parse_field(Some(f), 2))
            .collect::<Result<Vec<usize>>>()?;
        Ok((colour, TightPath3::new(vertices)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum TightPathViolation {
    RepeatedVertex { vertex: usize },
    MissingTriple { window: [usize; 3] },
    WrongColour { window: [usize; 3], found: Colour },
}

impl fmt::Display for TightPathViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TightPathViolation::RepeatedVertex { vertex } => write!(f, "vertex {vertex} repeats"),
            TightPathViolation::MissingTriple { window } => write!(f, "window {window:?} is not a triple"),
            TightPathViolation::WrongColour { window, found } => {
                write!(f, "window {window:?} is {found}")
            }
        }
    }
}

/// Checks that `p` is a tight path of `h` all of whose windows have `colour`.
/// Paths on fewer than three vertices have no windows and only need distinct
/// vertices.
pub fn validate_tight_path(
    h: &Hypergraph3,
    c: &TwoColoring,
    p: &TightPath3,
    colour: Colour,
) -> std::result::Result<(), TightPathViolation> {
    let mut seen = FxHashSet::default();
    for &v in &p.vertices {
        if !seen.insert(v) {
            return Err(TightPathViolation::RepeatedVertex { vertex: v });
        }
    }
    for window in p.windows() {
        let [a, b, x] = window;
        if !h.contains(a, b, x) {
            return Err(TightPathViolation::MissingTriple { window });
        }
        match c.get(a, b, x) {
            Some(found) if found != colour => return Err(TightPathViolation::WrongColour { window, found }),
            None => return Err(TightPathViolation::MissingTriple { window }),
            _ => {}
        }
    }
    Ok(())
}

fn check_cluster_complete(h: &Hypergraph3, cluster: &[usize]) -> Result<()> {
    for (i, &a) in cluster.iter().enumerate() {
        for (j, &b) in cluster.iter().enumerate().skip(i + 1) {
            for &x in &cluster[j + 1..] {
                if !h.contains(a, b, x) {
                    return Err(Error::invalid(format!("cluster misses triple {a} {b} {x}")));
                }
            }
        }
    }
    Ok(())
}

/// Lexicographically least `t`-subset of `cluster` whose internal triples all
/// share one colour, with that colour. `Ok(None)` when no such subset exists.
pub fn find_mono_clique(
    h: &Hypergraph3,
    c: &TwoColoring,
    cluster: &[usize],
    t: usize,
) -> Result<Option<(Colour, Vec<usize>)>> {
    clique_search(h, c, cluster, t, None)
}

/// As [`find_mono_clique`], restricted to cliques of `colour`.
pub fn find_mono_clique_in(
    h: &Hypergraph3,
    c: &TwoColoring,
    cluster: &[usize],
    t: usize,
    colour: Colour,
) -> Result<Option<Vec<usize>>> {
    Ok(clique_search(h, c, cluster, t, Some(colour))?.map(|(_, s)| s))
}

fn clique_search(
    h: &Hypergraph3,
    c: &TwoColoring,
    cluster: &[usize],
    t: usize,
    fixed: Option<Colour>,
) -> Result<Option<(Colour, Vec<usize>)>> {
    if t < 3 {
        return Err(Error::invalid(format!("clique size t = {t} must be at least 3")));
    }
    let mut vs = cluster.to_vec();
    vs.sort_unstable();
    vs.dedup();
    if vs.len() != cluster.len() {
        return Err(Error::invalid("cluster repeats a vertex"));
    }
    check_cluster_complete(h, &vs)?;
    if vs.len() < t {
        return Ok(None);
    }
    let mut chosen = Vec::with_capacity(t);
    Ok(extend_clique(c, &vs, t, 0, &mut chosen, fixed))
}

fn extend_clique(
    c: &TwoColoring,
    vs: &[usize],
    t: usize,
    from: usize,
    chosen: &mut Vec<usize>,
    fixed: Option<Colour>,
) -> Option<(Colour, Vec<usize>)> {
    if chosen.len() == t {
        return Some((fixed.expect("t >= 3 fixes a colour"), chosen.clone()));
    }
    let need = t - chosen.len();
    for i in from..vs.len() {
        if vs.len() - i < need {
            break;
        }
        let v = vs[i];
        let mut colour = fixed;
        let mut ok = true;
        'pairs: for (p, &a) in chosen.iter().enumerate() {
            for &b in &chosen[p + 1..] {
                let col = c.get(a, b, v).expect("cluster triples checked present");
                match colour {
                    None => colour = Some(col),
                    Some(x) if x != col => {
                        ok = false;
                        break 'pairs;
                    }
                    _ => {}
                }
            }
        }
        if !ok {
            continue;
        }
        chosen.push(v);
        let found = extend_clique(c, vs, t, i + 1, chosen, colour);
        chosen.pop();
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Longest monochromatic tight path by exhaustive search, capped at `cap`
/// vertices. Intended for hypergraphs on at most ~15 vertices; more than 32
/// are rejected. Ties go to blue.
pub fn brute_force_longest_mono_tight_path(
    h: &Hypergraph3,
    c: &TwoColoring,
    cap: usize,
) -> Result<(Colour, TightPath3)> {
    let n = h.num_vertices();
    if n > 32 {
        return Err(Error::invalid(format!("exhaustive search refused on {n} vertices")));
    }
    let limit = cap.min(n);
    if limit <= 2 {
        return Ok((Colour::Blue, TightPath3::new((0..limit).collect())));
    }
    // table[(a*n + b)*n + x] = colour code (0 none, 1 red, 2 blue)
    let mut table = vec![0u8; n * n * n];
    for key in h.keys() {
        let [a, b, x] = unpack_key(key);
        let code = match c.get_key(key) {
            Some(Colour::Red) => 1,
            Some(Colour::Blue) => 2,
            None => 0,
        };
        for (p, q, r) in [(a, b, x), (a, x, b), (b, a, x), (b, x, a), (x, a, b), (x, b, a)] {
            table[(p * n + q) * n + r] = code;
        }
    }
    let mut best = (Colour::Blue, vec![0, 1]);
    for colour in [Colour::Blue, Colour::Red] {
        let code = if colour == Colour::Red { 1 } else { 2 };
        let mut search = PathSearch { n, table: &table, code, limit, best: best.1.len(), best_path: None };
        'starts: for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue;
                }
                let mut path = vec![a, b];
                search.dfs(&mut path, (1u64 << a) | (1u64 << b));
                if search.best == limit {
                    break 'starts;
                }
            }
        }
        if let Some(p) = search.best_path {
            best = (colour, p);
        }
        if best.1.len() == limit {
            break;
        }
    }
    Ok((best.0, TightPath3::new(best.1)))
}

struct PathSearch<'a> {
    n: usize,
    table: &'a [u8],
    code: u8,
    limit: usize,
    best: usize,
    best_path: Option<Vec<usize>>,
}

impl PathSearch<'_> {
    fn dfs(&mut self, path: &mut Vec<usize>, used: u64) {
        if path.len() > self.best {
            self.best = path.len();
            self.best_path = Some(path.clone());
        }
        if self.best == self.limit {
            return;
        }
        let remaining = self.n - path.len();
        if path.len() + remaining <= self.best {
            return;
        }
        let (a, b) = (path[path.len() - 2], path[path.len() - 1]);
        let row = (a * self.n + b) * self.n;
        for x in 0..self.n {
            if used & (1 << x) == 0 && self.table[row + x] == self.code {
                path.push(x);
                self.dfs(path, used | (1 << x));
                path.pop();
                if self.best == self.limit {
                    return;
                }
            }
        }
    }
}

/// A path of an `r`-uniform hypergraph given by its vertex order and edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftedPath {
    pub uniformity: usize,
    pub vertices: Vec<usize>,
    pub edges: Vec<Vec<usize>>,
}

/// Replaces each vertex `v` of a tight path by the block
/// `v*b .. (v+1)*b` with `b = r/3`. Every window of three vertices becomes an
/// `r`-edge, and consecutive edges share `2r/3` vertices.
pub fn lift_to_r_uniform(p: &TightPath3, r: usize) -> Result<LiftedPath> {
    if r == 0 || r % 3 != 0 {
        return Err(Error::invalid(format!("uniformity r = {r} must be a positive multiple of 3")));
    }
    let block = r / 3;
    let vertices: Vec<usize> = p.vertices.iter().flat_map(|&v| v * block..(v + 1) * block).collect();
    let edges = if p.len() >= 3 {
        (0..p.len() - 2).map(|i| vertices[i * block..i * block + r].to_vec()).collect()
    } else {
        Vec::new()
    };
    Ok(LiftedPath { uniformity: r, vertices, edges })
}

/// Checks that `lp` is an `r`-uniform `ell`-path: distinct vertices, every
/// edge is `r` consecutive vertices, consecutive edges share exactly `ell`
/// vertices, and every vertex lies in an edge.
pub fn validate_ell_path(lp: &LiftedPath, ell: usize) -> std::result::Result<(), String> {
    let r = lp.uniformity;
    if ell == 0 || ell >= r {
        return Err(format!("overlap {ell} not in 1..{r}"));
    }
    let mut seen = FxHashSet::default();
    if let Some(v) = lp.vertices.iter().find(|&&v| !seen.insert(v)) {
        return Err(format!("vertex {v} repeats"));
    }
    let step = r - ell;
    for (i, e) in lp.edges.iter().enumerate() {
        let start = i * step;
        if e.len() != r || lp.vertices.get(start..start + r) != Some(e.as_slice()) {
            return Err(format!("edge {i} is not {r} consecutive vertices"));
        }
    }
    for (i, pair) in lp.edges.windows(2).enumerate() {
        let shared = pair[0].iter().filter(|v| pair[1].contains(v)).count();
        if shared != ell {
            return Err(format!("edges {i} and {} share {shared} vertices", i + 1));
        }
    }
    let covered: FxHashSet<usize> = lp.edges.iter().flatten().copied().collect();
    if !lp.edges.is_empty() && covered.len() != lp.vertices.len() {
        return Err("some vertex lies in no edge".into());
    }
    Ok(())
}
