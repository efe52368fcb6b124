//! Random instance generators shared by the experiments and tests.

use rand::seq::index::sample;
use rand::Rng;

use crate::hypercore::Hypergraph;
use crate::satsketch::{CnfFormula, Literal};

/// `m` hyperedges, each on `r` distinct uniformly chosen vertices, with
/// integer weights drawn uniformly from `1..=max_weight`.
pub fn random_uniform_hypergraph<R: Rng + ?Sized>(n: usize, m: usize, r: usize, max_weight: u32, rng: &mut R) -> Hypergraph {
    assert!(r >= 1 && r <= n, "need 1 <= r <= n");
    let mut h = Hypergraph::empty(n);
    for _ in 0..m {
        let ends = sample(rng, n, r).into_vec();
        let w = rng.gen_range(1..=max_weight.max(1)) as f64;
        h.add_edge(ends, w).expect("valid random edge");
    }
    h
}

/// Like [`random_uniform_hypergraph`], then joins components by adding one
/// `r`-edge per extra component through vertex 0's component.
pub fn random_connected_hypergraph<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    r: usize,
    max_weight: u32,
    rng: &mut R,
) -> Hypergraph {
    let mut h = random_uniform_hypergraph(n, m, r, max_weight, rng);
    loop {
        let comp = h.components();
        let Some(other) = (0..n).find(|&v| comp[v] != 0) else {
            return h;
        };
        let mut ends = vec![0, other];
        while ends.len() < r {
            let v = rng.gen_range(0..n);
            if !ends.contains(&v) {
                ends.push(v);
            }
        }
        let w = rng.gen_range(1..=max_weight.max(1)) as f64;
        h.add_edge(ends, w).expect("valid joining edge");
    }
}

/// Each of the `n (n - 1) / 2` pairs present independently with
/// probability `p`, unit weight.
pub fn random_graph<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Hypergraph {
    let mut g = Hypergraph::empty(n);
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen::<f64>() < p {
                g.add_edge(vec![a, b], 1.0).expect("valid pair");
            }
        }
    }
    g
}

/// `m` clauses over `n` variables; each clause has `width(rng)` distinct
/// variables with random polarity.
pub fn random_cnf<R: Rng + ?Sized>(n: usize, m: usize, min_width: usize, max_width: usize, rng: &mut R) -> CnfFormula {
    assert!(1 <= min_width && min_width <= max_width && max_width <= n);
    let clauses = (0..m)
        .map(|_| {
            let width = rng.gen_range(min_width..=max_width);
            sample(rng, n, width)
                .into_iter()
                .map(|var| Literal { var, negated: rng.gen() })
                .collect()
        })
        .collect();
    CnfFormula::new(n, clauses).expect("random clauses are well formed")
}
