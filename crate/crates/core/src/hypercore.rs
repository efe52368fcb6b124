//! Weighted hypergraphs, cuts, and the exhaustive cut oracle.
//!
//! Vertices are the indices `0..n`. A hyperedge is a deduplicated, sorted set
//! of endpoints with a strictly positive weight. Edges with a single endpoint
//! are kept in the model but never cross a cut.

use std::fmt::Write as _;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, parse_err, Error, Result};

/// Largest vertex count accepted by [`enumerate_cuts_below`].
pub const ENUMERATION_LIMIT: usize = 26;

/// Relative tolerance used when comparing floating point cut weights.
pub const REL_TOL: f64 = 1e-9;

/// `a <= b` up to [`REL_TOL`].
pub fn approx_le(a: f64, b: f64) -> bool {
    a <= b + REL_TOL * b.abs().max(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperedge {
    endpoints: Vec<usize>,
    weight: f64,
}

impl Hyperedge {
    /// Builds an edge, sorting and deduplicating the endpoints.
    pub fn new(mut endpoints: Vec<usize>, weight: f64) -> Result<Self> {
        if endpoints.is_empty() {
            return invalid("hyperedge needs at least one endpoint");
        }
        if !(weight.is_finite() && weight > 0.0) {
            return invalid(format!("hyperedge weight must be positive and finite, got {weight}"));
        }
        endpoints.sort_unstable();
        endpoints.dedup();
        Ok(Self { endpoints, weight })
    }

    pub fn endpoints(&self) -> &[usize] {
        &self.endpoints
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn cardinality(&self) -> usize {
        self.endpoints.len()
    }

    pub fn is_self_loop(&self) -> bool {
        self.endpoints.len() < 2
    }

    pub(crate) fn with_weight(&self, weight: f64) -> Self {
        Self {
            endpoints: self.endpoints.clone(),
            weight,
        }
    }

    /// True if the edge has an endpoint on each side of `side`.
    pub fn crosses(&self, side: &[bool]) -> bool {
        let first = side[self.endpoints[0]];
        self.endpoints[1..].iter().any(|&v| side[v] != first)
    }

    fn mask(&self) -> u64 {
        self.endpoints.iter().fold(0u64, |m, &v| m | (1u64 << v))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypergraph {
    n: usize,
    edges: Vec<Hyperedge>,
}

impl Hypergraph {
    /// An edgeless hypergraph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        Self { n, edges: Vec::new() }
    }

    pub fn new(n: usize, edges: Vec<Hyperedge>) -> Result<Self> {
        let mut h = Self::empty(n);
        for e in edges {
            h.push_edge(e)?;
        }
        Ok(h)
    }

    /// Convenience constructor from `(endpoints, weight)` pairs.
    pub fn from_edges<I, E>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (E, f64)>,
        E: Into<Vec<usize>>,
    {
        let mut h = Self::empty(n);
        for (endpoints, w) in edges {
            h.add_edge(endpoints.into(), w)?;
        }
        Ok(h)
    }

    pub fn add_edge(&mut self, endpoints: Vec<usize>, weight: f64) -> Result<()> {
        let e = Hyperedge::new(endpoints, weight)?;
        self.push_edge(e)
    }

    pub fn push_edge(&mut self, e: Hyperedge) -> Result<()> {
        if let Some(&v) = e.endpoints.last() {
            if v >= self.n {
                return invalid(format!("endpoint {v} out of range for n={}", self.n));
            }
        }
        self.edges.push(e);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Hyperedge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Largest edge cardinality (0 for an edgeless hypergraph).
    pub fn rank(&self) -> usize {
        self.edges.iter().map(Hyperedge::cardinality).max().unwrap_or(0)
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(Hyperedge::weight).sum()
    }

    /// Connected component label for every vertex, labels assigned in order
    /// of the smallest vertex of each component.
    pub fn components(&self) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for e in &self.edges {
            for &v in &e.endpoints[1..] {
                let a = find(&mut parent, e.endpoints[0]);
                let b = find(&mut parent, v);
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut label = vec![usize::MAX; self.n];
        let mut next = 0;
        (0..self.n)
            .map(|v| {
                let root = find(&mut parent, v);
                if label[root] == usize::MAX {
                    label[root] = next;
                    next += 1;
                }
                label[root]
            })
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        self.components().iter().all(|&c| c == 0)
    }

    pub(crate) fn edge_masks(&self) -> Vec<(u64, f64)> {
        debug_assert!(self.n <= 64);
        self.edges
            .iter()
            .filter(|e| !e.is_self_loop())
            .map(|e| (e.mask(), e.weight))
            .collect()
    }
}

/// Weight of the cut given as a bitmask over the vertices (bit v set means
/// v is on the true side).
pub(crate) fn mask_cut_weight(masks: &[(u64, f64)], side: u64) -> f64 {
    masks
        .iter()
        .filter(|(m, _)| m & side != 0 && m & !side != 0)
        .map(|(_, w)| w)
        .sum()
}

/// A vertex bipartition. Equality and hashing treat a side vector and its
/// complement as the same cut.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Cut {
    side: Vec<bool>,
}

impl Cut {
    pub fn new(side: Vec<bool>) -> Self {
        Self { side }
    }

    pub fn from_set(n: usize, set: &[usize]) -> Result<Self> {
        let mut side = vec![false; n];
        for &v in set {
            if v >= n {
                return invalid(format!("vertex {v} out of range for n={n}"));
            }
            side[v] = true;
        }
        Ok(Self { side })
    }

    pub(crate) fn from_mask(n: usize, mask: u64) -> Self {
        Self {
            side: (0..n).map(|v| mask >> v & 1 == 1).collect(),
        }
    }

    pub fn side(&self) -> &[bool] {
        &self.side
    }

    pub fn len(&self) -> usize {
        self.side.len()
    }

    pub fn is_empty(&self) -> bool {
        self.side.is_empty()
    }

    pub fn complement(&self) -> Self {
        Self {
            side: self.side.iter().map(|&b| !b).collect(),
        }
    }

    /// Representative with vertex 0 on the false side.
    pub fn canonical(&self) -> Self {
        if self.side.first().copied().unwrap_or(false) {
            self.complement()
        } else {
            self.clone()
        }
    }

    /// Neither side is empty.
    pub fn is_nontrivial(&self) -> bool {
        self.side.iter().any(|&b| b) && self.side.iter().any(|&b| !b)
    }

    /// Vertices on the true side.
    pub fn members(&self) -> Vec<usize> {
        (0..self.side.len()).filter(|&v| self.side[v]).collect()
    }

    /// Canonical side vector rendered as a `0`/`1` string.
    pub fn to_bitstring(&self) -> String {
        self.canonical()
            .side
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }
}

impl PartialEq for Cut {
    fn eq(&self, other: &Self) -> bool {
        self.side.len() == other.side.len() && self.canonical().side == other.canonical().side
    }
}

impl Eq for Cut {}

impl Hash for Cut {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.canonical().side.hash(state);
    }
}

impl PartialOrd for Cut {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cut {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.canonical().side.cmp(&other.canonical().side)
    }
}

pub fn cut_weight(h: &Hypergraph, cut: &Cut) -> Result<f64> {
    if cut.len() != h.n {
        return invalid(format!(
            "cut has length {} but hypergraph has {} vertices",
            cut.len(),
            h.n
        ));
    }
    Ok(h
        .edges
        .iter()
        .filter(|e| e.crosses(&cut.side))
        .map(Hyperedge::weight)
        .sum())
}

/// Every nontrivial cut of weight at most `bound` (up to [`REL_TOL`]), each
/// bipartition once, sorted by weight and then by canonical side vector.
pub fn enumerate_cuts_below(h: &Hypergraph, bound: f64) -> Result<Vec<(Cut, f64)>> {
    let n = h.n;
    if n > ENUMERATION_LIMIT {
        return Err(Error::ResourceLimit(format!(
            "exhaustive cut enumeration supports at most {ENUMERATION_LIMIT} vertices, got {n}"
        )));
    }
    if n < 2 {
        return Ok(Vec::new());
    }
    let masks = h.edge_masks();
    let mut out: Vec<(u64, f64)> = (1u64..1 << (n - 1))
        .map(|m| m << 1)
        .map(|side| (side, mask_cut_weight(&masks, side)))
        .filter(|&(_, w)| approx_le(w, bound))
        .collect();
    // Lexicographic order on canonical side vectors (vertex 1 most
    // significant) is the order of the bit-reversed mask.
    let rank = |side: u64| side.reverse_bits();
    out.sort_by(|a, b| a.1.total_cmp(&b.1).then(rank(a.0).cmp(&rank(b.0))));
    Ok(out
        .into_iter()
        .map(|(side, w)| (Cut::from_mask(n, side), w))
        .collect())
}

/// The vertex-induced subhypergraph on `vertices`, with `vertices[i]` mapped
/// to new index `i`. Returns the subhypergraph and, for every kept edge, its
/// index in `h`.
pub fn induced_subhypergraph(h: &Hypergraph, vertices: &[usize]) -> Result<(Hypergraph, Vec<usize>)> {
    let mut index = vec![usize::MAX; h.n];
    for (i, &v) in vertices.iter().enumerate() {
        if v >= h.n {
            return invalid(format!("vertex {v} out of range for n={}", h.n));
        }
        if index[v] != usize::MAX {
            return invalid(format!("vertex {v} listed twice"));
        }
        index[v] = i;
    }
    let mut sub = Hypergraph::empty(vertices.len());
    let mut origin = Vec::new();
    for (ei, e) in h.edges.iter().enumerate() {
        if e.endpoints.iter().all(|&v| index[v] != usize::MAX) {
            let mut endpoints: Vec<usize> = e.endpoints.iter().map(|&v| index[v]).collect();
            endpoints.sort_unstable();
            sub.edges.push(Hyperedge {
                endpoints,
                weight: e.weight,
            });
            origin.push(ei);
        }
    }
    Ok((sub, origin))
}

/// Parses the `n m` / `w k v1 .. vk` text format. Blank lines and lines
/// starting with `#` are skipped.
pub fn parse_hypergraph(text: &str) -> Result<Hypergraph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = match lines.next() {
        Some(x) => x,
        None => return parse_err(1, "missing header line `n m`"),
    };
    let nums: Vec<&str> = header.split_whitespace().collect();
    if nums.len() != 2 {
        return parse_err(hline, "header must be `n m`");
    }
    let n: usize = parse_num(hline, nums[0], "vertex count")?;
    let m: usize = parse_num(hline, nums[1], "edge count")?;

    let mut h = Hypergraph::empty(n);
    for _ in 0..m {
        let (lineno, line) = match lines.next() {
            Some(x) => x,
            None => return parse_err(hline, format!("expected {m} edges, found {}", h.edges.len())),
        };
        let e = parse_edge_line(line, n).map_err(|message| Error::Parse {
            line: lineno,
            message,
        })?;
        h.edges.push(e);
    }
    if let Some((lineno, _)) = lines.next() {
        return parse_err(lineno, format!("trailing content after {m} edges"));
    }
    Ok(h)
}

/// Parses a single `w k v1 .. vk` edge line against vertex count `n`.
pub fn parse_edge_line(line: &str, n: usize) -> std::result::Result<Hyperedge, String> {
    let mut toks = line.split_whitespace();
    let w: f64 = toks
        .next()
        .ok_or("empty edge line")?
        .parse()
        .map_err(|_| "weight is not a number".to_string())?;
    if !(w.is_finite() && w > 0.0) {
        return Err(format!("weight must be positive and finite, got {w}"));
    }
    let k: usize = toks
        .next()
        .ok_or("missing cardinality")?
        .parse()
        .map_err(|_| "cardinality is not an integer".to_string())?;
    if k == 0 {
        return Err("cardinality must be at least 1".into());
    }
    let endpoints = toks
        .map(|t| t.parse::<usize>().map_err(|_| format!("bad endpoint `{t}`")))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if endpoints.len() != k {
        return Err(format!("cardinality {k} but {} endpoints listed", endpoints.len()));
    }
    if let Some(&v) = endpoints.iter().find(|&&v| v >= n) {
        return Err(format!("endpoint {v} out of range for n={n}"));
    }
    Hyperedge::new(endpoints, w).map_err(|e| e.to_string())
}

fn parse_num<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| Error::Parse {
            line,
            message: format!("{what} `{tok}` is not a nonnegative integer"),
        })
}

/// Serializes with shortest round-trip decimal weights.
pub fn serialize_hypergraph(h: &Hypergraph) -> String {
    let mut s = String::new();
    writeln!(s, "{} {}", h.n, h.edges.len()).unwrap();
    for e in &h.edges {
        s.push_str(&format_edge_line(e));
        s.push('\n');
    }
    s
}

pub fn format_edge_line(e: &Hyperedge) -> String {
    let mut s = format!("{} {}", e.weight, e.endpoints.len());
    for v in &e.endpoints {
        write!(s, " {v}").unwrap();
    }
    s
}
