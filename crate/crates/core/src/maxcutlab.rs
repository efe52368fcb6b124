//! Max-Cut reduction laboratory: Boolean Hidden Hypermatching instances, the
//! cycle gadget graph they map to, exact Max-Cut, and the two-party
//! 2/3-approximation protocol.
//!
//! Gadget vertex layout (0-based; labels in the construction are 1-based):
//! `u_i` is vertex `i - 1`, `v_i` is `2n + i - 1`, `w_j` is `4n + j - 1`.

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::hypercore::{mask_cut_weight, Hypergraph};

/// Largest connected component solved by brute force in [`exact_max_cut`].
pub const MAX_CUT_BRUTE_FORCE_LIMIT: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BhhInstance {
    pub k: usize,
    pub t: usize,
    pub x: Vec<bool>,
    /// `n / t` disjoint `t`-tuples of 0-based indices covering `0..n`,
    /// each in ascending order.
    pub matching: Vec<Vec<usize>>,
    pub w: Vec<bool>,
    pub b: bool,
}

impl BhhInstance {
    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// `(Mx)_j`: parity of `x` over hyperedge `j`.
    pub fn parity(&self, j: usize) -> bool {
        self.matching[j].iter().fold(false, |acc, &i| acc ^ self.x[i])
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if self.t < 2 || self.k < 1 || n != 2 * self.k * self.t {
            return invalid(format!("need t >= 2, k >= 1 and n = 2kt (n={n}, k={}, t={})", self.k, self.t));
        }
        if self.matching.len() != n / self.t || self.w.len() != n / self.t {
            return invalid("matching and w must have n / t entries");
        }
        let mut seen = vec![false; n];
        for m in &self.matching {
            if m.len() != self.t {
                return invalid("every hyperedge of the matching needs t indices");
            }
            for &i in m {
                if i >= n || seen[i] {
                    return invalid(format!("index {i} out of range or repeated in matching"));
                }
                seen[i] = true;
            }
        }
        for j in 0..self.matching.len() {
            if self.parity(j) ^ self.w[j] != self.b {
                return invalid(format!("promise violated at hyperedge {j}"));
            }
        }
        Ok(())
    }
}

/// Uniform `x` and perfect `t`-hypermatching, with `w = Mx xor b`.
pub fn gen_bhh<R: Rng + ?Sized>(k: usize, t: usize, b: bool, rng: &mut R) -> Result<BhhInstance> {
    if k < 1 || t < 2 {
        return invalid(format!("need k >= 1 and t >= 2, got k={k}, t={t}"));
    }
    let n = 2 * k * t;
    let x: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let matching: Vec<Vec<usize>> = perm
        .chunks(t)
        .map(|c| {
            let mut c = c.to_vec();
            c.sort_unstable();
            c
        })
        .collect();
    let mut inst = BhhInstance {
        k,
        t,
        x,
        matching,
        w: Vec::new(),
        b,
    };
    inst.w = (0..inst.matching.len()).map(|j| inst.parity(j) ^ b).collect();
    Ok(inst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Owner {
    Alice,
    Bob,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VertexRole {
    U(usize),
    V(usize),
    W(usize),
}

impl std::fmt::Display for VertexRole {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VertexRole::U(i) => write!(f, "u{i}"),
            VertexRole::V(i) => write!(f, "v{i}"),
            VertexRole::W(i) => write!(f, "w{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GadgetGraph {
    pub graph: Hypergraph,
    pub owner: Vec<Owner>,
    pub roles: Vec<VertexRole>,
}

impl GadgetGraph {
    pub fn edges_of(&self, who: Owner) -> Vec<(usize, usize)> {
        self.graph
            .edges()
            .iter()
            .zip(&self.owner)
            .filter(|(_, &o)| o == who)
            .map(|(e, _)| (e.endpoints()[0], e.endpoints()[1]))
            .collect()
    }
}

/// Builds the 2-uniform gadget: for each `i`, Alice holds two parallel edges
/// (`x_i = 0`) or two cross edges (`x_i = 1`) between `u_{2i-1}, u_{2i}` and
/// `v_{2i-1}, v_{2i}`; for each hyperedge `M_j = (i_1, .., i_t)` Bob holds the
/// chain `u_{2i_k - 1} v_{2i_{k+1} - 1}`, `u_{2i_k} v_{2i_{k+1}}`, the edges
/// `u_{2i_t - 1} w_{2j - 1}`, `u_{2i_t} w_{2j}`, and parallel (`w_j = 0`) or
/// cross (`w_j = 1`) edges from `w_{2j - 1}, w_{2j}` back to
/// `v_{2i_1 - 1}, v_{2i_1}`.
pub fn build_gadget(inst: &BhhInstance) -> Result<GadgetGraph> {
    inst.validate()?;
    let n = inst.n();
    let t = inst.t;
    let wcount = 2 * n / t;
    // 1-based labels to vertex ids
    let u = |i: usize| i - 1;
    let v = |i: usize| 2 * n + i - 1;
    let w = |j: usize| 4 * n + j - 1;

    let mut roles = Vec::with_capacity(4 * n + wcount);
    roles.extend((1..=2 * n).map(VertexRole::U));
    roles.extend((1..=2 * n).map(VertexRole::V));
    roles.extend((1..=wcount).map(VertexRole::W));

    let mut graph = Hypergraph::empty(roles.len());
    let mut owner = Vec::new();
    let mut add = |a: usize, b: usize, who: Owner| -> Result<()> {
        graph.add_edge(vec![a, b], 1.0)?;
        owner.push(who);
        Ok(())
    };

    for i in 1..=n {
        if inst.x[i - 1] {
            add(u(2 * i - 1), v(2 * i), Owner::Alice)?;
            add(u(2 * i), v(2 * i - 1), Owner::Alice)?;
        } else {
            add(u(2 * i - 1), v(2 * i - 1), Owner::Alice)?;
            add(u(2 * i), v(2 * i), Owner::Alice)?;
        }
    }
    for (jj, m) in inst.matching.iter().enumerate() {
        let j = jj + 1;
        let idx: Vec<usize> = m.iter().map(|&i| i + 1).collect();
        for pair in idx.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            add(u(2 * a - 1), v(2 * b - 1), Owner::Bob)?;
            add(u(2 * a), v(2 * b), Owner::Bob)?;
        }
        let (first, last) = (idx[0], idx[t - 1]);
        add(u(2 * last - 1), w(2 * j - 1), Owner::Bob)?;
        add(u(2 * last), w(2 * j), Owner::Bob)?;
        if inst.w[jj] {
            add(w(2 * j), v(2 * first - 1), Owner::Bob)?;
            add(w(2 * j - 1), v(2 * first), Owner::Bob)?;
        } else {
            add(w(2 * j), v(2 * first), Owner::Bob)?;
            add(w(2 * j - 1), v(2 * first - 1), Owner::Bob)?;
        }
    }
    Ok(GadgetGraph { graph, owner, roles })
}

fn check_two_uniform(g: &Hypergraph) -> Result<()> {
    if let Some(e) = g.edges().iter().find(|e| e.cardinality() != 2) {
        return invalid(format!("expected a graph, found an edge of cardinality {}", e.cardinality()));
    }
    Ok(())
}

/// Sorted cycle lengths if every vertex has degree exactly 2 (counting
/// parallel edges), `None` otherwise.
pub fn cycle_lengths(g: &Hypergraph) -> Option<Vec<usize>> {
    let mut degree = vec![0usize; g.n()];
    for e in g.edges() {
        if e.cardinality() != 2 {
            return None;
        }
        for &v in e.endpoints() {
            degree[v] += 1;
        }
    }
    if degree.iter().any(|&d| d != 2) {
        return None;
    }
    let comp = g.components();
    let mut sizes = vec![0usize; comp.iter().max().map_or(0, |m| m + 1)];
    for c in comp {
        sizes[c] += 1;
    }
    sizes.sort_unstable();
    Some(sizes)
}

/// Exact maximum cut of a graph, solved per connected component: cycles
/// in closed form, anything else by brute force up to
/// [`MAX_CUT_BRUTE_FORCE_LIMIT`] vertices.
pub fn exact_max_cut(g: &Hypergraph) -> Result<f64> {
    check_two_uniform(g)?;
    let comp = g.components();
    let count = comp.iter().max().map_or(0, |m| m + 1);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); count];
    for (v, &c) in comp.iter().enumerate() {
        members[c].push(v);
    }
    let mut comp_edges: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); count];
    let mut local = vec![0usize; g.n()];
    for m in &members {
        for (i, &v) in m.iter().enumerate() {
            local[v] = i;
        }
    }
    for e in g.edges() {
        let (a, b) = (e.endpoints()[0], e.endpoints()[1]);
        comp_edges[comp[a]].push((local[a], local[b], e.weight()));
    }
    let mut total = 0.0;
    for (m, edges) in members.iter().zip(&comp_edges) {
        total += component_max_cut(m.len(), edges)?;
    }
    Ok(total)
}

fn component_max_cut(size: usize, edges: &[(usize, usize, f64)]) -> Result<f64> {
    if edges.is_empty() {
        return Ok(0.0);
    }
    let mut degree = vec![0usize; size];
    for &(a, b, _) in edges {
        degree[a] += 1;
        degree[b] += 1;
    }
    if edges.len() == size && degree.iter().all(|&d| d == 2) {
        let sum: f64 = edges.iter().map(|e| e.2).sum();
        return Ok(if size.is_multiple_of(2) {
            sum
        } else {
            sum - edges.iter().map(|e| e.2).fold(f64::INFINITY, f64::min)
        });
    }
    if size > MAX_CUT_BRUTE_FORCE_LIMIT {
        return Err(Error::ResourceLimit(format!(
            "component with {size} vertices exceeds the brute-force limit of {MAX_CUT_BRUTE_FORCE_LIMIT}"
        )));
    }
    let masks: Vec<(u64, f64)> = edges.iter().map(|&(a, b, w)| ((1u64 << a) | (1u64 << b), w)).collect();
    let best = (0u64..1 << (size - 1))
        .into_par_iter()
        .map(|m| mask_cut_weight(&masks, m << 1))
        .reduce(|| 0.0, f64::max);
    Ok(best)
}

/// `4n` when `b = 0`, `4n + 2n/t` when `b = 1`.
pub fn gadget_expected_value(n: usize, t: usize, b: bool) -> Result<usize> {
    if t < 2 || n == 0 || !n.is_multiple_of(2 * t) {
        return invalid(format!("need t >= 2 and n a positive multiple of 2t (n={n}, t={t})"));
    }
    Ok(if b { 4 * n + 2 * n / t } else { 4 * n })
}

/// `c0 / c1 = 2t / (2t + 1)`.
pub fn gadget_value_ratio(t: u64) -> Ratio<u64> {
    Ratio::new(2 * t, 2 * t + 1)
}

/// `floor(1 / (2 eps) - 1 / 2)`.
pub fn gadget_t_for_epsilon(epsilon: Ratio<u64>) -> Result<u64> {
    if *epsilon.numer() == 0 {
        return invalid("epsilon must be positive");
    }
    let v = Ratio::new(1, 2) / epsilon - Ratio::new(1, 2);
    Ok(v.floor().to_integer())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoPartyOutcome {
    pub w_a: f64,
    pub w_b: f64,
    pub estimate: f64,
    pub true_maxcut: f64,
}

/// Alice sends the max-cut value of her edges; Bob outputs
/// `2/3 (w_A + w_B)`. The true value is computed alongside for checking.
pub fn two_party_estimate(alice: &Hypergraph, bob: &Hypergraph) -> Result<TwoPartyOutcome> {
    if alice.n() != bob.n() {
        return invalid("both parties must share the vertex set");
    }
    let w_a = exact_max_cut(alice)?;
    let w_b = exact_max_cut(bob)?;
    let union = Hypergraph::new(alice.n(), alice.edges().iter().chain(bob.edges()).cloned().collect())?;
    Ok(TwoPartyOutcome {
        w_a,
        w_b,
        estimate: 2.0 * (w_a + w_b) / 3.0,
        true_maxcut: exact_max_cut(&union)?,
    })
}

/// Assigns every edge to Alice or Bob with a fair coin.
pub fn random_split<R: Rng + ?Sized>(g: &Hypergraph, rng: &mut R) -> (Hypergraph, Hypergraph) {
    let mut a = Hypergraph::empty(g.n());
    let mut b = Hypergraph::empty(g.n());
    for e in g.edges() {
        let target = if rng.gen::<bool>() { &mut a } else { &mut b };
        target.push_edge(e.clone()).expect("same vertex set");
    }
    (a, b)
}
