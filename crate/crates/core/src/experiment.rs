//! Named, seeded experiments that check the randomized guarantees against
//! exhaustive oracles and summarize the outcome as a JSON report.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::contract::{contraction_frequencies, q_bound, sunflower};
use crate::error::{invalid, Error, Result};
use crate::generate::{random_cnf, random_connected_hypergraph, random_graph};
use crate::hypercore::{cut_weight, enumerate_cuts_below, Cut, Hypergraph};
use crate::maxcutlab::{build_gadget, cycle_lengths, exact_max_cut, gadget_expected_value, gen_bhh, random_split, two_party_estimate};
use crate::mincut::{min_cut, strong_connectivities};
use crate::rng::{mix, stream_rng};
use crate::satsketch::{estimate_value, exact_value, sketch_formula};
use crate::sparsify::{sparsify_with_strengths, verify_sparsifier, SparsifyParams};

pub const EXPERIMENTS: [&str; 7] = [
    "cut-counting",
    "contraction-probability",
    "sparsifier-quality",
    "sat-quality",
    "gadget-values",
    "two-party-bound",
    "sunflower-count",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub parameters: Value,
    pub seed: u64,
    pub metrics: BTreeMap<String, f64>,
    pub pass: bool,
    pub wall_time_ms: f64,
}

type Outcome = (BTreeMap<String, f64>, bool);

pub fn run_experiment(name: &str, params: &Value, seed: u64) -> Result<ExperimentReport> {
    let start = Instant::now();
    let (parameters, (metrics, pass)) = match name {
        "cut-counting" => run(params, |p| cut_counting(p, seed))?,
        "contraction-probability" => run(params, |p| contraction_probability(p, seed))?,
        "sparsifier-quality" => run(params, |p| sparsifier_quality(p, seed))?,
        "sat-quality" => run(params, |p| sat_quality(p, seed))?,
        "gadget-values" => run(params, |p| gadget_values(p, seed))?,
        "two-party-bound" => run(params, |p| two_party_bound(p, seed))?,
        "sunflower-count" => run(params, sunflower_count)?,
        other => {
            return invalid(format!(
                "unknown experiment `{other}`; expected one of {}",
                EXPERIMENTS.join(", ")
            ))
        }
    };
    Ok(ExperimentReport {
        experiment: name.to_string(),
        parameters,
        seed,
        metrics,
        pass,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

fn run<P, F>(params: &Value, f: F) -> Result<(Value, Outcome)>
where
    P: DeserializeOwned + Serialize,
    F: FnOnce(&P) -> Result<Outcome>,
{
    let raw = if params.is_null() { Value::Object(Default::default()) } else { params.clone() };
    let p: P = serde_json::from_value(raw).map_err(|e| Error::InvalidArgument(format!("bad parameters: {e}")))?;
    let outcome = f(&p)?;
    Ok((serde_json::to_value(&p)?, outcome))
}

fn metrics<const N: usize>(pairs: [(&str, f64); N]) -> BTreeMap<String, f64> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CutCountingParams {
    pub instances: usize,
    pub n_min: usize,
    pub n_max: usize,
    pub r_max: usize,
    pub alphas: Vec<f64>,
}

impl Default for CutCountingParams {
    fn default() -> Self {
        Self {
            instances: 30,
            n_min: 4,
            n_max: 14,
            r_max: 4,
            alphas: vec![1.0, 1.5, 2.0],
        }
    }
}

/// Number of nontrivial cuts of weight at most `alpha` times the minimum.
pub fn count_near_min_cuts(h: &Hypergraph, alpha: f64) -> Result<usize> {
    let w = min_cut(h)?.weight;
    Ok(enumerate_cuts_below(h, alpha * w)?.len())
}

/// `2^(alpha r) n^(2 alpha)`.
pub fn cut_count_bound(n: usize, r: usize, alpha: f64) -> f64 {
    2f64.powf(alpha * r as f64) * (n as f64).powf(2.0 * alpha)
}

fn cut_counting(p: &CutCountingParams, seed: u64) -> Result<Outcome> {
    if p.n_min < 2 || p.n_max < p.n_min || p.r_max < 2 {
        return invalid("need 2 <= n_min <= n_max and r_max >= 2");
    }
    let mut checks = 0usize;
    let mut c1 = 0usize;
    let mut c4 = 0usize;
    let mut max_ratio = 0.0f64;
    for i in 0..p.instances {
        let mut rng = stream_rng(seed, i as u64);
        let n = p.n_min + i % (p.n_max - p.n_min + 1);
        let r = 2 + (i / (p.n_max - p.n_min + 1)) % (p.r_max - 1);
        let r = r.min(n);
        let m = n + (i * 7) % (2 * n);
        let h = random_connected_hypergraph(n, m, r, 3, &mut rng);
        let rank = h.rank().max(2);
        for &alpha in &p.alphas {
            let count = count_near_min_cuts(&h, alpha)? as f64;
            let bound = cut_count_bound(n, rank, alpha);
            checks += 1;
            max_ratio = max_ratio.max(count / bound);
            if count > bound {
                c1 += 1;
            }
            if count > 4.0 * bound {
                c4 += 1;
            }
        }
    }
    Ok((
        metrics([
            ("checks", checks as f64),
            ("constant1_violations", c1 as f64),
            ("constant4_violations", c4 as f64),
            ("max_count_over_bound", max_ratio),
        ]),
        c4 == 0,
    ))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SunflowerParams {
    pub r: usize,
    pub m: Vec<usize>,
    pub alpha: f64,
}

impl Default for SunflowerParams {
    fn default() -> Self {
        Self {
            r: 3,
            m: vec![2, 3],
            alpha: 2.0,
        }
    }
}

fn sunflower_count(p: &SunflowerParams) -> Result<Outcome> {
    let mut out = BTreeMap::new();
    let mut pass = true;
    for &m in &p.m {
        let h = sunflower(p.r, m, p.alpha)?;
        let count = count_near_min_cuts(&h, p.alpha)?;
        let need = m * ((1usize << (p.r - 1)) - 1);
        pass &= count >= need;
        out.insert(format!("count_m{m}"), count as f64);
        out.insert(format!("required_m{m}"), need as f64);
        out.insert(format!("min_cut_m{m}"), min_cut(&h)?.weight);
    }
    Ok((out, pass))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContractionParams {
    pub graphs: usize,
    pub graphs_r2: usize,
    pub n_min: usize,
    pub n_max: usize,
    pub r: usize,
    pub trials: u64,
    pub sigmas: f64,
}

impl Default for ContractionParams {
    fn default() -> Self {
        Self {
            graphs: 10,
            graphs_r2: 5,
            n_min: 4,
            n_max: 8,
            r: 3,
            trials: 100_000,
            sigmas: 4.0,
        }
    }
}

/// Per minimum cut: observed output frequency and the one-sided threshold
/// `q - sigmas * sqrt(q (1 - q) / trials)`.
pub fn min_cut_frequencies(h: &Hypergraph, trials: u64, seed: u64, sigmas: f64) -> Result<Vec<(Cut, f64, f64)>> {
    let w = min_cut(h)?.weight;
    let cuts = enumerate_cuts_below(h, w)?;
    let q = q_bound(h.n(), h.rank().max(2), 1.0)?;
    let threshold = q - sigmas * (q * (1.0 - q) / trials as f64).sqrt();
    let freq = contraction_frequencies(h, 1.0, trials, seed)?;
    Ok(cuts
        .into_iter()
        .map(|(c, _)| {
            let f = freq.get(&c).copied().unwrap_or(0) as f64 / trials as f64;
            (c, f, threshold)
        })
        .collect())
}

fn contraction_probability(p: &ContractionParams, seed: u64) -> Result<Outcome> {
    if p.n_min < 2 || p.n_max < p.n_min || p.r < 2 || p.trials == 0 {
        return invalid("need 2 <= n_min <= n_max, r >= 2, trials >= 1");
    }
    let mut cuts = 0usize;
    let mut failures = 0usize;
    let mut margin = f64::INFINITY;
    let span = p.n_max - p.n_min + 1;
    for (g, r) in (0..p.graphs).map(|g| (g, p.r)).chain((0..p.graphs_r2).map(|g| (p.graphs + g, 2))) {
        let mut rng = stream_rng(seed, g as u64);
        let n = (p.n_min + g % span).max(r);
        let m = n + g % n;
        let h = random_connected_hypergraph(n, m, r, 3, &mut rng);
        for (_, f, threshold) in min_cut_frequencies(&h, p.trials, mix(seed, g as u64), p.sigmas)? {
            cuts += 1;
            margin = margin.min(f - threshold);
            if f < threshold {
                failures += 1;
            }
        }
    }
    Ok((
        metrics([
            ("cuts_checked", cuts as f64),
            ("failures", failures as f64),
            ("min_margin", margin),
        ]),
        failures == 0,
    ))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SparsifierQualityParams {
    pub graphs: usize,
    pub n: usize,
    pub m: usize,
    pub r: usize,
    pub epsilons: Vec<f64>,
    pub d: f64,
    pub seeds: u64,
    pub unbiased_seeds: u64,
    pub success_fraction: f64,
}

impl Default for SparsifierQualityParams {
    fn default() -> Self {
        Self {
            graphs: 10,
            n: 12,
            m: 600,
            r: 3,
            epsilons: vec![0.3, 0.5],
            d: 1.0,
            seeds: 20,
            unbiased_seeds: 1000,
            success_fraction: 0.9,
        }
    }
}

/// `3 (n - 1) (r + (d + 2) ln n) / eps^2`.
pub fn edge_count_bound(n: usize, r: usize, d: f64, epsilon: f64) -> f64 {
    let nf = n as f64;
    3.0 * (nf - 1.0) * (r as f64 + (d + 2.0) * nf.ln()) / (epsilon * epsilon)
}

/// Largest `|mean - w(C)| / stderr` over `cuts` across `seeds` independent
/// sparsifications, each difference first reduced by a `1e-9` relative
/// allowance for rounding.
pub fn unbiasedness_z(h: &Hypergraph, cuts: &[Cut], epsilon: f64, d: f64, seeds: u64, seed: u64) -> Result<f64> {
    let k = strong_connectivities(h)?;
    let mut sums = vec![(0.0f64, 0.0f64); cuts.len()];
    for s in 0..seeds {
        let params = SparsifyParams::new(epsilon, d, mix(seed, s))?;
        let (sparse, _) = sparsify_with_strengths(h, &k, &params)?;
        for (acc, c) in sums.iter_mut().zip(cuts) {
            let w = cut_weight(&sparse, c)?;
            acc.0 += w;
            acc.1 += w * w;
        }
    }
    let nf = seeds as f64;
    let mut worst = 0.0f64;
    for ((sum, sq), c) in sums.into_iter().zip(cuts) {
        let truth = cut_weight(h, c)?;
        let mean = sum / nf;
        let var = ((sq - sum * sum / nf) / (nf - 1.0)).max(0.0);
        let stderr = (var / nf).sqrt();
        let diff = ((mean - truth).abs() - 1e-9 * truth.abs()).max(0.0);
        let z = if diff == 0.0 { 0.0 } else if stderr == 0.0 { f64::INFINITY } else { diff / stderr };
        worst = worst.max(z);
    }
    Ok(worst)
}

fn sparsifier_quality(p: &SparsifierQualityParams, seed: u64) -> Result<Outcome> {
    let mut min_success = 1.0f64;
    let mut worst_mean_edges_over_bound = 0.0f64;
    for g in 0..p.graphs {
        let h = random_connected_hypergraph(p.n, p.m, p.r, 1, &mut stream_rng(seed, g as u64));
        let k = strong_connectivities(&h)?;
        for &eps in &p.epsilons {
            let mut ok = 0u64;
            let mut edges = 0usize;
            for s in 0..p.seeds {
                let params = SparsifyParams::new(eps, p.d, mix(mix(seed, g as u64), s))?;
                let (sparse, report) = sparsify_with_strengths(&h, &k, &params)?;
                edges += report.edge_count;
                if verify_sparsifier(&h, &sparse, eps)?.within_epsilon == Some(true) {
                    ok += 1;
                }
            }
            min_success = min_success.min(ok as f64 / p.seeds as f64);
            let mean_edges = edges as f64 / p.seeds as f64;
            let bound = edge_count_bound(p.n, h.rank(), p.d, eps);
            worst_mean_edges_over_bound = worst_mean_edges_over_bound.max(mean_edges / bound);
        }
    }
    let probe = random_connected_hypergraph(p.n, p.m, p.r, 1, &mut stream_rng(seed, 0));
    let cuts = fixed_probe_cuts(p.n)?;
    let eps = p.epsilons.iter().copied().fold(0.0, f64::max);
    let z = unbiasedness_z(&probe, &cuts, eps, p.d, p.unbiased_seeds, mix(seed, u64::MAX))?;
    let pass = min_success >= p.success_fraction && worst_mean_edges_over_bound <= 1.0 && z <= 3.0;
    Ok((
        metrics([
            ("min_success_fraction", min_success),
            ("max_mean_edges_over_bound", worst_mean_edges_over_bound),
            ("unbiasedness_max_z", z),
        ]),
        pass,
    ))
}

/// Three fixed cuts: `{0}`, the first third, and the first half.
pub fn fixed_probe_cuts(n: usize) -> Result<Vec<Cut>> {
    [1, (n / 3).max(1), (n / 2).max(1)]
        .into_iter()
        .map(|k| Cut::from_set(n, &(0..k).collect::<Vec<_>>()))
        .collect()
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SatQualityParams {
    pub n: usize,
    pub m: usize,
    pub width: usize,
    pub epsilon: f64,
    pub d: f64,
    pub seeds: u64,
    pub success_fraction: f64,
}

impl Default for SatQualityParams {
    fn default() -> Self {
        Self {
            n: 10,
            m: 500,
            width: 3,
            epsilon: 0.4,
            d: 1.0,
            seeds: 20,
            success_fraction: 0.9,
        }
    }
}

fn sat_quality(p: &SatQualityParams, seed: u64) -> Result<Outcome> {
    if p.n > 20 || p.width == 0 || p.width > p.n {
        return invalid("need 1 <= width <= n <= 20");
    }
    let phi = random_cnf(p.n, p.m, p.width, p.width, &mut stream_rng(seed, 0));
    let assignments: Vec<Vec<bool>> = (0u32..1 << p.n)
        .map(|a| (0..p.n).map(|i| a >> i & 1 == 1).collect())
        .collect();
    let exact: Vec<usize> = assignments.iter().map(|a| exact_value(&phi, a)).collect::<Result<_>>()?;
    let mut ok = 0u64;
    let mut edges = 0usize;
    for s in 0..p.seeds {
        let sketch = sketch_formula(&phi, p.epsilon, p.d, mix(seed, s + 1))?;
        edges += sketch.hypergraph.edge_count();
        let mut good = true;
        for (a, &truth) in assignments.iter().zip(&exact) {
            let est = estimate_value(&sketch, a)?;
            if (est - truth as f64).abs() > p.epsilon * truth as f64 + 1e-9 {
                good = false;
                break;
            }
        }
        ok += u64::from(good);
    }
    let mean_edges = edges as f64 / p.seeds as f64;
    let bound = edge_count_bound(2 * p.n + 1, p.width + 1, p.d, p.epsilon);
    let frac = ok as f64 / p.seeds as f64;
    Ok((
        metrics([
            ("success_fraction", frac),
            ("mean_edge_count", mean_edges),
            ("edge_bound", bound),
        ]),
        frac >= p.success_fraction && mean_edges <= bound,
    ))
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GadgetParams {
    pub k: Option<usize>,
    pub t: Option<usize>,
    pub b: Option<u8>,
}

fn gadget_values(p: &GadgetParams, seed: u64) -> Result<Outcome> {
    if let Some(b) = p.b {
        if b > 1 {
            return invalid("b must be 0 or 1");
        }
    }
    let ks: Vec<usize> = p.k.map_or((1..=4).collect(), |k| vec![k]);
    let ts: Vec<usize> = p.t.map_or(vec![2, 3, 4], |t| vec![t]);
    let bs: Vec<bool> = p.b.map_or(vec![false, true], |b| vec![b == 1]);
    let mut instances = 0usize;
    let mut value_mismatch = 0usize;
    let mut cycle_mismatch = 0usize;
    let mut last = (0.0, 0.0);
    for &k in &ks {
        for &t in &ts {
            for &b in &bs {
                let mut rng = stream_rng(seed, instances as u64);
                instances += 1;
                let inst = gen_bhh(k, t, b, &mut rng)?;
                let g = build_gadget(&inst)?;
                let n = inst.n();
                let maxcut = exact_max_cut(&g.graph)?;
                let expected = gadget_expected_value(n, t, b)? as f64;
                last = (maxcut, expected);
                if maxcut != expected {
                    value_mismatch += 1;
                }
                let want = if b { vec![4 * t + 2; n / t] } else { vec![2 * t + 1; 2 * n / t] };
                if cycle_lengths(&g.graph) != Some(want) {
                    cycle_mismatch += 1;
                }
            }
        }
    }
    let mut out = metrics([
        ("instances", instances as f64),
        ("value_mismatches", value_mismatch as f64),
        ("cycle_mismatches", cycle_mismatch as f64),
    ]);
    if instances == 1 {
        out.insert("maxcut".into(), last.0);
        out.insert("expected".into(), last.1);
    }
    Ok((out, value_mismatch == 0 && cycle_mismatch == 0))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TwoPartyParams {
    pub n: usize,
    pub graphs: usize,
    pub density: f64,
}

impl Default for TwoPartyParams {
    fn default() -> Self {
        Self {
            n: 8,
            graphs: 100,
            density: 0.5,
        }
    }
}

fn two_party_bound(p: &TwoPartyParams, seed: u64) -> Result<Outcome> {
    if p.n < 2 || p.n > 24 {
        return invalid("two-party experiment needs 2 <= n <= 24");
    }
    let mut violations = 0usize;
    let mut tight_failures = 0usize;
    let mut min_ratio = f64::INFINITY;
    for g in 0..p.graphs {
        let mut rng = stream_rng(seed, g as u64);
        let graph = random_graph(p.n, p.density, &mut rng);
        let (a, b) = random_split(&graph, &mut rng);
        let out = two_party_estimate(&a, &b)?;
        // integral weights: compare 2 (wA + wB) <= 3 w <= 3 (wA + wB)
        let sum = out.w_a + out.w_b;
        if !(2.0 * sum <= 3.0 * out.true_maxcut && out.true_maxcut <= sum) {
            violations += 1;
        }
        if out.true_maxcut > 0.0 {
            min_ratio = min_ratio.min(out.estimate / out.true_maxcut);
        }
        if graph.edge_count() > 0 {
            let solo = two_party_estimate(&graph, &Hypergraph::empty(p.n))?;
            if 3.0 * solo.estimate != 2.0 * solo.true_maxcut || solo.w_a != solo.true_maxcut {
                tight_failures += 1;
            }
        }
    }
    Ok((
        metrics([
            ("cases", p.graphs as f64),
            ("violations", violations as f64),
            ("tight_failures", tight_failures as f64),
            ("min_estimate_over_truth", if min_ratio.is_finite() { min_ratio } else { 1.0 }),
        ]),
        violations == 0 && tight_failures == 0,
    ))
}
