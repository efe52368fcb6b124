//! Importance-sampling cut sparsifier driven by strong connectivities, its
//! exhaustive verifier, and an insert-only streaming builder.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hypercore::{mask_cut_weight, Hyperedge, Hypergraph};
use crate::mincut::{strong_connectivities, StrongConnectivityMap};
use crate::rng::{mix, stream_rng};

/// Largest vertex count accepted by [`verify_sparsifier`].
pub const VERIFY_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SparsifyParams {
    pub epsilon: f64,
    /// Failure exponent: cuts are preserved with probability `1 - O(n^-d)`.
    pub d: f64,
    pub seed: u64,
    /// Additive coefficient `c` in the `(d + c) ln n` term of the sampling
    /// probability. The default is 2; 3 gives the more conservative variant.
    pub log_offset: f64,
}

impl SparsifyParams {
    pub fn new(epsilon: f64, d: f64, seed: u64) -> Result<Self> {
        let p = Self {
            epsilon,
            d,
            seed,
            log_offset: 2.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return invalid(format!("epsilon must lie in (0, 1), got {}", self.epsilon));
        }
        if !(self.d >= 1.0 && self.d.is_finite()) {
            return invalid(format!("d must be >= 1, got {}", self.d));
        }
        if !(self.log_offset >= 0.0 && self.log_offset.is_finite()) {
            return invalid(format!("log offset must be >= 0, got {}", self.log_offset));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparsifierReport {
    pub edge_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_edge_count: Option<f64>,
    /// `max |w'(C) / w(C) - 1|` over all nontrivial cuts; infinite if some
    /// zero-weight cut gained weight or a positive cut lost all of it.
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "ser_error")]
    pub max_relative_cut_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub within_epsilon: Option<bool>,
}

fn ser_error<S: serde::Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) if x.is_infinite() => s.serialize_str("inf"),
        Some(x) => s.serialize_f64(*x),
        None => s.serialize_none(),
    }
}

/// `3 / eps^2 * (r + (d + 2) ln n)`.
pub fn rho(epsilon: f64, r: usize, d: f64, n: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return invalid(format!("epsilon must lie in (0, 1], got {epsilon}"));
    }
    if !(d >= 1.0) || r < 2 || !(n >= 2.0) {
        return invalid(format!("rho needs d >= 1, r >= 2, n >= 2 (d={d}, r={r}, n={n})"));
    }
    Ok(3.0 / (epsilon * epsilon) * (r as f64 + (d + 2.0) * n.ln()))
}

/// `min(1, 3 ((d + 2) ln n + r) / (k_e eps^2))`.
pub fn sampling_probability(k_e: f64, epsilon: f64, d: f64, n: usize, r: usize) -> Result<f64> {
    sampling_probability_with_offset(k_e, epsilon, d, n, r, 2.0)
}

pub fn sampling_probability_with_offset(
    k_e: f64,
    epsilon: f64,
    d: f64,
    n: usize,
    r: usize,
    log_offset: f64,
) -> Result<f64> {
    if !(k_e > 0.0) {
        return invalid(format!("strong connectivity must be positive, got {k_e}"));
    }
    if !(epsilon > 0.0) {
        return invalid(format!("epsilon must be positive, got {epsilon}"));
    }
    let num = 3.0 * ((d + log_offset) * (n as f64).ln() + r as f64);
    Ok((num / (k_e * epsilon * epsilon)).min(1.0))
}

/// Keeps edge `e` independently with probability `p_e` computed from its
/// strong connectivity, reweighting survivors to `w_e / p_e`. The draw for
/// edge `i` comes from RNG stream `(seed, i)`.
pub fn sparsify(h: &Hypergraph, params: &SparsifyParams) -> Result<(Hypergraph, SparsifierReport)> {
    params.validate()?;
    if h.edge_count() == 0 {
        return invalid("sparsify needs at least one edge");
    }
    if h.n() < 2 {
        return invalid("sparsify needs at least two vertices");
    }
    let k = strong_connectivities(h)?;
    sparsify_with_strengths(h, &k, params)
}

/// [`sparsify`] with precomputed strong connectivities, for repeated
/// sampling of one hypergraph.
pub fn sparsify_with_strengths(
    h: &Hypergraph,
    k: &StrongConnectivityMap,
    params: &SparsifyParams,
) -> Result<(Hypergraph, SparsifierReport)> {
    params.validate()?;
    if k.len() != h.edge_count() {
        return invalid("strong connectivity map does not match the hypergraph");
    }
    let r = h.rank().max(2);
    let mut out = Hypergraph::empty(h.n());
    let mut expected = 0.0;
    for (i, e) in h.edges().iter().enumerate() {
        let p = sampling_probability_with_offset(k.get(i), params.epsilon, params.d, h.n(), r, params.log_offset)?;
        expected += p;
        if p <= 0.0 {
            continue;
        }
        let u: f64 = stream_rng(params.seed, i as u64).gen();
        if u < p {
            out.push_edge(e.with_weight(e.weight() / p))?;
        }
    }
    let report = SparsifierReport {
        edge_count: out.edge_count(),
        expected_edge_count: Some(expected),
        max_relative_cut_error: None,
        within_epsilon: None,
    };
    Ok((out, report))
}

/// Exhaustively compares every nontrivial cut of `sparse` against `h`.
pub fn verify_sparsifier(h: &Hypergraph, sparse: &Hypergraph, epsilon: f64) -> Result<SparsifierReport> {
    if h.n() != sparse.n() {
        return invalid(format!(
            "vertex counts differ: {} vs {}",
            h.n(),
            sparse.n()
        ));
    }
    if h.n() > VERIFY_LIMIT {
        return Err(Error::ResourceLimit(format!(
            "exhaustive verification supports at most {VERIFY_LIMIT} vertices, got {}",
            h.n()
        )));
    }
    let err = max_relative_cut_error(h, sparse);
    Ok(SparsifierReport {
        edge_count: sparse.edge_count(),
        expected_edge_count: None,
        max_relative_cut_error: Some(err),
        within_epsilon: Some(err <= epsilon),
    })
}

fn max_relative_cut_error(h: &Hypergraph, sparse: &Hypergraph) -> f64 {
    let n = h.n();
    if n < 2 {
        return 0.0;
    }
    let a = h.edge_masks();
    let b = sparse.edge_masks();
    let mut worst = 0.0f64;
    for m in 1u64..1 << (n - 1) {
        let side = m << 1;
        let w = mask_cut_weight(&a, side);
        let ws = mask_cut_weight(&b, side);
        let err = match (w == 0.0, ws == 0.0) {
            (true, true) => 0.0,
            (true, false) | (false, true) => f64::INFINITY,
            (false, false) => (ws / w - 1.0).abs(),
        };
        worst = worst.max(err);
    }
    worst
}

/// Configuration of [`StreamingSparsifier`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StreamConfig {
    pub epsilon: f64,
    pub d: f64,
    pub seed: u64,
    /// Upper bound on the stream length, used to fix the per-level error.
    pub max_edges: u64,
    /// Constant `c` in the working-set target `c n (r + (d + 2) ln n) / eps'^2`.
    pub size_constant: f64,
}

impl StreamConfig {
    pub fn new(epsilon: f64, d: f64, seed: u64) -> Self {
        Self {
            epsilon,
            d,
            seed,
            max_edges: 1 << 32,
            size_constant: 8.0,
        }
    }
}

/// Merge-and-reduce sparsifier over an insert-only edge stream.
///
/// Raw edges collect in a buffer. When the buffer holds more than twice the
/// target size it is sparsified into a level-1 bucket; two buckets meeting at
/// a level are merged and, if the union is again over twice the target,
/// sparsified one level up. An edge is resampled at most `levels` times and
/// each resampling uses `eps' = eps / (2 levels)`, so the composed error
/// stays within `1 +- eps`.
#[derive(Debug, Clone)]
pub struct StreamingSparsifier {
    n: usize,
    config: StreamConfig,
    levels: u32,
    level_epsilon: f64,
    rank: usize,
    received: usize,
    reductions: u64,
    buffer: Vec<Hyperedge>,
    buckets: Vec<Option<Vec<Hyperedge>>>,
}

impl StreamingSparsifier {
    pub fn new(n: usize, config: StreamConfig) -> Result<Self> {
        SparsifyParams::new(config.epsilon, config.d, config.seed)?;
        if n < 2 {
            return invalid("streaming sparsifier needs n >= 2");
        }
        if !(config.size_constant > 0.0) {
            return invalid("size constant must be positive");
        }
        let levels = level_count(n, &config);
        Ok(Self {
            n,
            config,
            levels,
            level_epsilon: config.epsilon / (2.0 * levels as f64),
            rank: 2,
            received: 0,
            reductions: 0,
            buffer: Vec::new(),
            buckets: Vec::new(),
        })
    }

    pub fn level_epsilon(&self) -> f64 {
        self.level_epsilon
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn reductions(&self) -> u64 {
        self.reductions
    }

    /// Working-set target for the rank observed so far.
    pub fn target_size(&self) -> f64 {
        target_size(self.n, self.rank, self.config.d, self.level_epsilon, self.config.size_constant)
    }

    /// Number of edges currently held.
    pub fn stored(&self) -> usize {
        self.buffer.len() + self.buckets.iter().flatten().map(Vec::len).sum::<usize>()
    }

    pub fn push(&mut self, edge: Hyperedge) -> Result<()> {
        let index = self.received;
        if let Some(&v) = edge.endpoints().last() {
            if v >= self.n {
                return Err(Error::Stream {
                    index,
                    message: format!("endpoint {v} out of range for n={}", self.n),
                });
            }
        }
        self.received += 1;
        self.rank = self.rank.max(edge.cardinality());
        self.buffer.push(edge);
        if self.buffer.len() as f64 > 2.0 * self.target_size() {
            let raw = std::mem::take(&mut self.buffer);
            let mut carry = self.reduce(raw)?;
            let mut level = 0;
            loop {
                if self.buckets.len() <= level {
                    self.buckets.push(None);
                }
                match self.buckets[level].take() {
                    None => {
                        self.buckets[level] = Some(carry);
                        break;
                    }
                    Some(mut held) => {
                        held.extend(carry);
                        // buckets[level] holds edges resampled at most level + 1 times
                        if held.len() as f64 > 2.0 * self.target_size() && (level as u32 + 2) <= self.levels {
                            carry = self.reduce(held)?;
                            level += 1;
                        } else {
                            self.buckets[level] = Some(held);
                            break;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn reduce(&mut self, edges: Vec<Hyperedge>) -> Result<Vec<Hyperedge>> {
        let h = Hypergraph::new(self.n, edges)?;
        let params = SparsifyParams {
            epsilon: self.level_epsilon,
            d: self.config.d,
            seed: mix(self.config.seed, self.reductions),
            log_offset: 2.0,
        };
        self.reductions += 1;
        let (sparse, _) = sparsify(&h, &params)?;
        Ok(sparse.edges().to_vec())
    }

    /// Union of all buckets and the raw buffer, in arrival-level order.
    pub fn finish(self) -> Hypergraph {
        let mut edges = Vec::with_capacity(self.stored());
        for bucket in self.buckets.into_iter().rev().flatten() {
            edges.extend(bucket);
        }
        edges.extend(self.buffer);
        Hypergraph::new(self.n, edges).expect("stream edges were range-checked")
    }
}

fn target_size(n: usize, r: usize, d: f64, eps: f64, c: f64) -> f64 {
    let nf = n as f64;
    c * nf * (r as f64 + (d + 2.0) * nf.ln()) / (eps * eps)
}

/// Smallest `L >= 1` with `ceil(log2(max_edges / T(eps / 2L))) <= L`, using
/// rank 2 (the smallest target, hence the most levels).
fn level_count(n: usize, config: &StreamConfig) -> u32 {
    let m = config.max_edges.max(1) as f64;
    (1u32..=64)
        .find(|&l| {
            let t = target_size(n, 2, config.d, config.epsilon / (2.0 * l as f64), config.size_constant);
            (m / t).log2().ceil() <= l as f64
        })
        .unwrap_or(64)
}

/// Sparsifies a whole stream of edges.
pub fn streaming_sparsify<I>(edges: I, n: usize, config: StreamConfig) -> Result<Hypergraph>
where
    I: IntoIterator<Item = Hyperedge>,
{
    let mut s = StreamingSparsifier::new(n, config)?;
    for e in edges {
        s.push(e)?;
    }
    Ok(s.finish())
}
