//! Randomized hyperedge contraction, near-minimum cut enumeration, the
//! output-probability lower bound, and the sunflower construction.

use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::hypercore::{approx_le, cut_weight, Cut, Hyperedge, Hypergraph};
use crate::mincut::min_cut;
use crate::rng::stream_rng;

/// Largest petal size accepted by [`sunflower`].
pub const SUNFLOWER_MAX_R: usize = 1000;

/// Largest edge count accepted by [`sunflower`].
pub const SUNFLOWER_MAX_EDGES: u128 = 1 << 24;

/// A partially contracted hypergraph. Vertex `i` of `graph` is the
/// super-vertex whose original members are `blocks[i]`.
#[derive(Debug, Clone)]
pub struct ContractionState {
    graph: Hypergraph,
    blocks: Vec<Vec<usize>>,
    original_n: usize,
}

impl ContractionState {
    /// Starts from `h` with every vertex in its own block. Self-loops are
    /// dropped immediately.
    pub fn new(h: &Hypergraph) -> Self {
        let edges = h.edges().iter().filter(|e| !e.is_self_loop()).cloned().collect();
        Self {
            graph: Hypergraph::new(h.n(), edges).expect("edges of a valid hypergraph"),
            blocks: (0..h.n()).map(|v| vec![v]).collect(),
            original_n: h.n(),
        }
    }

    pub fn graph(&self) -> &Hypergraph {
        &self.graph
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.n()
    }

    /// Merges all endpoints of edge `index` into one super-vertex and drops
    /// every edge that collapses to a single super-vertex. Parallel edges
    /// stay separate.
    pub fn contract_edge(&self, index: usize) -> Result<Self> {
        let Some(edge) = self.graph.edges().get(index) else {
            return invalid(format!("no edge {index} in contracted hypergraph"));
        };
        if edge.is_self_loop() {
            return invalid("cannot contract a self-loop");
        }
        let merged = edge.endpoints();
        let target = merged[0];
        let k = self.graph.n();

        let mut in_merge = vec![false; k];
        for &v in merged {
            in_merge[v] = true;
        }
        let mut relabel = vec![0usize; k];
        let mut blocks: Vec<Vec<usize>> = Vec::with_capacity(k - merged.len() + 1);
        for v in 0..k {
            if in_merge[v] && v != target {
                continue;
            }
            relabel[v] = blocks.len();
            blocks.push(self.blocks[v].clone());
        }
        let t = relabel[target];
        for &v in &merged[1..] {
            relabel[v] = t;
            blocks[t].extend_from_slice(&self.blocks[v]);
        }
        blocks[t].sort_unstable();

        let mut graph = Hypergraph::empty(blocks.len());
        for e in self.graph.edges() {
            let ends: Vec<usize> = e.endpoints().iter().map(|&v| relabel[v]).collect();
            let e = Hyperedge::new(ends, e.weight())?;
            if !e.is_self_loop() {
                graph.push_edge(e)?;
            }
        }
        Ok(Self {
            graph,
            blocks,
            original_n: self.original_n,
        })
    }

    /// The cut of the original hypergraph induced by a side assignment of
    /// the super-vertices.
    pub fn lift(&self, super_side: &[bool]) -> Cut {
        let mut side = vec![false; self.original_n];
        for (block, &s) in self.blocks.iter().zip(super_side) {
            for &v in block {
                side[v] = s;
            }
        }
        Cut::new(side)
    }
}

/// Checks `alpha >= 1` and `2 alpha` integral.
pub fn validate_alpha(alpha: f64) -> Result<()> {
    let twice = 2.0 * alpha;
    if !(alpha.is_finite() && alpha >= 1.0 && twice == twice.round()) {
        return invalid(format!("alpha must be a half-integer >= 1, got {alpha}"));
    }
    Ok(())
}

/// One run of the contraction algorithm: while more than `alpha * r`
/// super-vertices remain, contract an edge drawn with probability
/// proportional to its weight; then return the cut induced by a uniformly
/// random nontrivial bipartition of the remaining super-vertices.
///
/// If the contracted hypergraph runs out of edges early, the remaining
/// super-vertices go straight to the random bipartition.
pub fn contract_algorithm<R: Rng + ?Sized>(h: &Hypergraph, alpha: f64, rng: &mut R) -> Result<Cut> {
    validate_alpha(alpha)?;
    if h.n() < 2 {
        return invalid("contraction needs at least two vertices");
    }
    let threshold = alpha * h.rank().max(2) as f64;
    let mut state = ContractionState::new(h);
    let mut cumulative = Vec::new();
    while state.vertex_count() as f64 > threshold && state.graph.edge_count() > 0 {
        cumulative.clear();
        let mut total = 0.0;
        for e in state.graph.edges() {
            total += e.weight();
            cumulative.push(total);
        }
        let u = rng.gen::<f64>() * total;
        let pick = cumulative.partition_point(|&c| c <= u).min(cumulative.len() - 1);
        state = state.contract_edge(pick)?;
    }
    let side = random_bipartition(state.vertex_count(), rng);
    Ok(state.lift(&side))
}

/// Uniform over the `2^(k-1) - 1` nontrivial bipartitions of `k >= 2`
/// items, with item 0 on the false side.
fn random_bipartition<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<bool> {
    debug_assert!(k >= 2);
    loop {
        let mut side = vec![false; k];
        for s in side.iter_mut().skip(1) {
            *s = rng.gen();
        }
        if side.iter().any(|&b| b) {
            return side;
        }
    }
}

/// Lower bound on the probability that one run of [`contract_algorithm`]
/// outputs a fixed cut of weight at most `alpha` times the minimum:
/// `Q / (2^(alpha r - 1) - 1)` with
/// `Q = (2 alpha + 1) / (r + 1) * binom(n - alpha (r - 2), 2 alpha)^-1`,
/// and `Q = 1` once `n <= alpha r`.
pub fn q_bound(n: usize, r: usize, alpha: f64) -> Result<f64> {
    validate_alpha(alpha)?;
    if n < 2 || r < 2 {
        return invalid(format!("q_bound needs n >= 2 and r >= 2, got n={n}, r={r}"));
    }
    let (nf, rf) = (n as f64, r as f64);
    let ar = alpha * rf;
    let divisor = 2f64.powf(ar - 1.0) - 1.0;
    if nf <= ar {
        return Ok(1.0 / divisor);
    }
    let q = (2.0 * alpha + 1.0) / (rf + 1.0) / binomial_real(nf - alpha * (rf - 2.0), (2.0 * alpha) as u64);
    Ok(q / divisor)
}

/// `binom(x, k)` for real `x` and integer `k`, as the falling factorial
/// `x (x-1) ... (x-k+1) / k!`.
fn binomial_real(x: f64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (x - i as f64) / (i + 1) as f64)
}

#[derive(Debug, Clone, Serialize)]
pub struct CutFrequency {
    pub cut: String,
    pub weight: f64,
    pub count: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct NearMinCuts {
    /// Minimum cut weight of the input.
    pub min_weight: f64,
    pub alpha: f64,
    pub trials: u64,
    /// Distinct output cuts of weight at most `alpha * min_weight`, sorted by
    /// weight then canonical side vector.
    pub cuts: Vec<(Cut, f64)>,
    /// Every distinct output cut with its weight and hit count, same order.
    pub frequency_table: Vec<CutFrequency>,
}

/// Output frequency of each distinct cut over `trials` independent runs.
/// Run `i` uses the RNG stream `(seed, i)`.
pub fn contraction_frequencies(h: &Hypergraph, alpha: f64, trials: u64, seed: u64) -> Result<HashMap<Cut, u64>> {
    validate_alpha(alpha)?;
    if trials == 0 {
        return invalid("trials must be at least 1");
    }
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i);
            contract_algorithm(h, alpha, &mut rng)
        })
        .try_fold(HashMap::new, |mut acc, cut| {
            *acc.entry(cut?.canonical()).or_insert(0u64) += 1;
            Ok(acc)
        })
        .try_reduce(HashMap::new, |mut a, b| {
            for (c, n) in b {
                *a.entry(c).or_insert(0) += n;
            }
            Ok(a)
        })
}

pub fn enumerate_near_min_cuts(h: &Hypergraph, alpha: f64, trials: u64, seed: u64) -> Result<NearMinCuts> {
    let freq = contraction_frequencies(h, alpha, trials, seed)?;
    let min_weight = min_cut(h)?.weight;
    let bound = alpha * min_weight;

    let mut table = freq
        .into_iter()
        .map(|(cut, count)| Ok((cut_weight(h, &cut)?, cut, count)))
        .collect::<Result<Vec<_>>>()?;
    table.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));

    let cuts = table
        .iter()
        .filter(|(w, _, _)| approx_le(*w, bound))
        .map(|(w, c, _)| (c.clone(), *w))
        .collect();
    let frequency_table = table
        .into_iter()
        .map(|(weight, cut, count)| CutFrequency {
            cut: cut.to_bitstring(),
            weight,
            count,
        })
        .collect();
    Ok(NearMinCuts {
        min_weight,
        alpha,
        trials,
        cuts,
        frequency_table,
    })
}

/// `m` size-`r` hyperedges of weight 1 sharing only vertex 0, each
/// supplemented with a 2-uniform clique on its endpoints whose edges weigh
/// `(alpha - 1) / 2^r`. Vertex count is `r m - m + 1`.
pub fn sunflower(r: usize, m: usize, alpha: f64) -> Result<Hypergraph> {
    if r < 2 || m < 1 {
        return invalid(format!("sunflower needs r >= 2 and m >= 1, got r={r}, m={m}"));
    }
    if !(alpha.is_finite() && alpha > 1.0) {
        return invalid(format!("sunflower needs alpha > 1, got {alpha}"));
    }
    // (alpha - 1) / 2^r must stay a normal float, and the cliques must fit
    let edges = (r as u128 * (r as u128 - 1) / 2 + 1) * m as u128;
    if r > SUNFLOWER_MAX_R || edges > SUNFLOWER_MAX_EDGES {
        return Err(Error::ResourceLimit(format!(
            "sunflower with r={r}, m={m} needs {edges} edges (limits: r <= {SUNFLOWER_MAX_R}, {SUNFLOWER_MAX_EDGES} edges)"
        )));
    }
    let n = r * m - m + 1;
    let clique_weight = (alpha - 1.0) / 2f64.powi(r as i32);
    let mut h = Hypergraph::empty(n);
    for j in 0..m {
        let petal: Vec<usize> = std::iter::once(0)
            .chain((0..r - 1).map(|i| 1 + j * (r - 1) + i))
            .collect();
        h.add_edge(petal.clone(), 1.0)?;
        for a in 0..r {
            for b in a + 1..r {
                h.add_edge(vec![petal[a], petal[b]], clique_weight)?;
            }
        }
    }
    Ok(h)
}
