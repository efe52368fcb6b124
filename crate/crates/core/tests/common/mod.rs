//! Brute-force oracles shared by the integration tests. They follow the
//! definitions directly and are only meant for small instances.

#![allow(dead_code)]

use hypersketch::hypercore::induced_subhypergraph;
use hypersketch::{cut_weight, Cut, Hypergraph};

/// Every nontrivial cut with vertex 0 on the false side.
pub fn all_cuts(n: usize) -> impl Iterator<Item = Cut> {
    (1u64..1 << (n - 1)).map(move |m| Cut::new((0..n).map(|v| v > 0 && m >> (v - 1) & 1 == 1).collect()))
}

/// Minimum cut weight by exhaustion; 0 for a single vertex's lack of cuts
/// is never asked for.
pub fn brute_min_cut(h: &Hypergraph) -> f64 {
    all_cuts(h.n())
        .map(|c| cut_weight(h, &c).unwrap())
        .fold(f64::INFINITY, f64::min)
}

/// Strong connectivity straight from the definition: the best minimum cut
/// of any induced subhypergraph containing every endpoint of the edge.
pub fn brute_strength(h: &Hypergraph, edge: usize) -> f64 {
    let e = &h.edges()[edge];
    if e.is_self_loop() {
        return f64::INFINITY;
    }
    let n = h.n();
    let need: u64 = e.endpoints().iter().map(|&v| 1u64 << v).sum();
    let mut best = 0.0f64;
    for set in 0u64..1 << n {
        if set & need != need {
            continue;
        }
        let verts: Vec<usize> = (0..n).filter(|&v| set >> v & 1 == 1).collect();
        let (sub, _) = induced_subhypergraph(h, &verts).unwrap();
        best = best.max(brute_min_cut(&sub));
    }
    best
}

/// Largest relative cut error of `s` against `h` over every cut.
pub fn max_relative_error(h: &Hypergraph, s: &Hypergraph) -> f64 {
    all_cuts(h.n())
        .map(|c| {
            let (w, ws) = (cut_weight(h, &c).unwrap(), cut_weight(s, &c).unwrap());
            if w == 0.0 {
                if ws == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                (ws - w).abs() / w
            }
        })
        .fold(0.0, f64::max)
}
