//! Deterministic hypergraph minimum cut and the strong-connectivity
//! decomposition built on it.
//!
//! The minimum cut uses maximum-adjacency orderings generalized to
//! hypergraphs: the key of an unvisited vertex is the total weight of edges
//! that contain it and at least one visited vertex. The last vertex of each
//! ordering gives a cut of the phase; the last two vertices are then merged.

use serde::Serialize;

use crate::contract::contract_algorithm;
use crate::error::{invalid, Error, Result};
use crate::hypercore::{approx_le, cut_weight, enumerate_cuts_below, induced_subhypergraph, Cut, Hypergraph};
use crate::rng::stream_rng;

/// Largest vertex set accepted by [`k_strong_check`].
pub const STRONG_CHECK_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinCut {
    pub cut: Cut,
    pub weight: f64,
}

pub fn min_cut(h: &Hypergraph) -> Result<MinCut> {
    let n = h.n();
    if n < 2 {
        return invalid("minimum cut needs at least two vertices");
    }
    let comp = h.components();
    if comp.iter().any(|&c| c != 0) {
        let side = comp.iter().map(|&c| c != 0).collect();
        return Ok(MinCut {
            cut: Cut::new(side),
            weight: 0.0,
        });
    }

    let mut groups: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    let mut edges: Vec<(Vec<usize>, f64)> = h
        .edges()
        .iter()
        .filter(|e| !e.is_self_loop())
        .map(|e| (e.endpoints().to_vec(), e.weight()))
        .collect();

    let mut best = f64::INFINITY;
    let mut best_set: Vec<usize> = Vec::new();

    while groups.len() > 1 {
        let k = groups.len();
        let (prev, last, phase_cut) = ma_phase(k, &edges);
        if phase_cut < best {
            best = phase_cut;
            best_set = groups[last].clone();
        }
        let moved = std::mem::take(&mut groups[last]);
        groups[prev].extend(moved);
        groups.remove(last);
        let relabel = |v: usize| {
            let v = if v == last { prev } else { v };
            if v > last {
                v - 1
            } else {
                v
            }
        };
        edges = edges
            .into_iter()
            .filter_map(|(mut ends, w)| {
                for v in ends.iter_mut() {
                    *v = relabel(*v);
                }
                ends.sort_unstable();
                ends.dedup();
                (ends.len() >= 2).then_some((ends, w))
            })
            .collect();
    }

    let cut = Cut::from_set(n, &best_set)?.canonical();
    // report the weight as evaluated on the input so it is summation-order
    // independent of the phase bookkeeping
    let weight = cut_weight(h, &cut)?;
    Ok(MinCut { cut, weight })
}

/// One maximum-adjacency ordering over `k` super-vertices. Returns the last
/// two vertices visited and the cut-of-the-phase weight.
fn ma_phase(k: usize, edges: &[(Vec<usize>, f64)]) -> (usize, usize, f64) {
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (ei, (ends, _)) in edges.iter().enumerate() {
        for &v in ends {
            incident[v].push(ei);
        }
    }
    let mut key = vec![0.0f64; k];
    let mut visited = vec![false; k];
    let mut touched = vec![false; edges.len()];

    let mut visit = |v: usize, key: &mut [f64], visited: &mut [bool]| {
        visited[v] = true;
        for &ei in &incident[v] {
            if !touched[ei] {
                touched[ei] = true;
                let (ends, w) = &edges[ei];
                for &u in ends {
                    if !visited[u] {
                        key[u] += w;
                    }
                }
            }
        }
    };

    let mut prev = 0;
    let mut last = 0;
    visit(0, &mut key, &mut visited);
    for _ in 1..k {
        let mut pick = usize::MAX;
        for v in 0..k {
            if !visited[v] && (pick == usize::MAX || key[v] > key[pick]) {
                pick = v;
            }
        }
        prev = last;
        last = pick;
        visit(pick, &mut key, &mut visited);
    }
    (prev, last, key[last])
}

/// Cross-check for [`min_cut`]: the best of `3 n^2 ln n` runs of the
/// contraction algorithm with `alpha = 1`.
pub fn min_cut_randomized(h: &Hypergraph, seed: u64) -> Result<MinCut> {
    let n = h.n();
    if n < 2 {
        return invalid("minimum cut needs at least two vertices");
    }
    let nf = n as f64;
    let trials = ((3.0 * nf * nf * nf.ln()).ceil() as u64).max(1);
    let mut best: Option<MinCut> = None;
    for t in 0..trials {
        let mut rng = stream_rng(seed, t);
        let cut = contract_algorithm(h, 1.0, &mut rng)?;
        let weight = cut_weight(h, &cut)?;
        if best.as_ref().is_none_or(|b| weight < b.weight) {
            best = Some(MinCut {
                cut: cut.canonical(),
                weight,
            });
        }
    }
    Ok(best.expect("at least one trial"))
}

/// Per-edge strong connectivity `k_e`. Self-loops sit in a single-vertex
/// component, which is k-connected for every k, so their entry is infinite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrongConnectivityMap {
    k: Vec<f64>,
}

impl StrongConnectivityMap {
    pub fn get(&self, edge: usize) -> f64 {
        self.k[edge]
    }

    pub fn values(&self) -> &[f64] {
        &self.k
    }

    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }

    /// Number of distinct finite values.
    pub fn distinct_count(&self) -> usize {
        let mut v: Vec<f64> = self.k.iter().copied().filter(|x| x.is_finite()).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v.len()
    }
}

/// Recursive decomposition: take a minimum cut, give its weight as a
/// candidate to every edge of the current subhypergraph, recurse into the
/// two vertex-induced sides, and keep the maximum candidate per edge.
pub fn strong_connectivities(h: &Hypergraph) -> Result<StrongConnectivityMap> {
    if h.edge_count() == 0 {
        return invalid("strong connectivity needs at least one edge");
    }
    Ok(StrongConnectivityMap { k: decompose(h)? })
}

fn decompose(h: &Hypergraph) -> Result<Vec<f64>> {
    if h.n() < 2 {
        return Ok(vec![f64::INFINITY; h.edge_count()]);
    }
    let MinCut { cut, weight } = min_cut(h)?;
    let mut k = vec![weight; h.edge_count()];

    let inside: Vec<usize> = cut.members();
    let outside: Vec<usize> = (0..h.n()).filter(|&v| !cut.side()[v]).collect();
    let recurse = |side: &[usize]| -> Result<Option<(Vec<f64>, Vec<usize>)>> {
        let (sub, origin) = induced_subhypergraph(h, side)?;
        if sub.edge_count() == 0 {
            return Ok(None);
        }
        Ok(Some((decompose(&sub)?, origin)))
    };
    let (a, b) = rayon::join(|| recurse(&inside), || recurse(&outside));
    for (ks, origin) in [a?, b?].into_iter().flatten() {
        for (kv, ei) in ks.into_iter().zip(origin) {
            if kv > k[ei] {
                k[ei] = kv;
            }
        }
    }
    Ok(k)
}

/// True iff every nontrivial cut of the subhypergraph induced by `vertices`
/// has weight at least `k`.
pub fn k_strong_check(h: &Hypergraph, vertices: &[usize], k: f64) -> Result<bool> {
    if vertices.len() > STRONG_CHECK_LIMIT {
        return Err(Error::ResourceLimit(format!(
            "k-strong check supports at most {STRONG_CHECK_LIMIT} vertices, got {}",
            vertices.len()
        )));
    }
    let (sub, _) = induced_subhypergraph(h, vertices)?;
    let cuts = enumerate_cuts_below(&sub, f64::INFINITY)?;
    Ok(cuts.iter().all(|(_, w)| approx_le(k, *w)))
}
