//! Sketching the value of every assignment of a CNF formula.
//!
//! A formula on `n` variables becomes a hypergraph on `2n + 1` vertices: one
//! vertex per literal plus a special vertex `F`. Each clause becomes the
//! hyperedge of its literal vertices together with `F`. Putting true literals
//! on one side and `F` with the false literals on the other, a clause edge is
//! cut exactly when the clause is satisfied, so the cut weight is the number
//! of satisfied clauses. Sparsifying that hypergraph gives the sketch.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, parse_err, Error, Result};
use crate::hypercore::{cut_weight, parse_hypergraph, serialize_hypergraph, Cut, Hypergraph};
use crate::sparsify::{sparsify, SparsifierReport, SparsifyParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    /// 0-based variable index.
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Self { var, negated: false }
    }

    pub fn neg(var: usize) -> Self {
        Self { var, negated: true }
    }

    /// From a DIMACS literal (1-based, sign gives polarity).
    pub fn from_dimacs(lit: i64) -> Self {
        Self {
            var: lit.unsigned_abs() as usize - 1,
            negated: lit < 0,
        }
    }

    pub fn eval(&self, assignment: &[bool]) -> bool {
        assignment[self.var] != self.negated
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<Vec<Literal>>,
}

impl CnfFormula {
    /// Validates the clauses: nonempty, in range, not tautological.
    /// Repeated literals are merged.
    pub fn new(num_vars: usize, clauses: Vec<Vec<Literal>>) -> Result<Self> {
        let mut out = Vec::with_capacity(clauses.len());
        for (i, mut c) in clauses.into_iter().enumerate() {
            normalize_clause(&mut c, num_vars).map_err(|m| Error::InvalidArgument(format!("clause {i}: {m}")))?;
            out.push(c);
        }
        Ok(Self { num_vars, clauses: out })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Vec<Literal>] {
        &self.clauses
    }

    /// Maximum clause width.
    pub fn width(&self) -> usize {
        self.clauses.iter().map(Vec::len).max().unwrap_or(0)
    }
}

fn normalize_clause(c: &mut Vec<Literal>, num_vars: usize) -> std::result::Result<(), String> {
    if c.is_empty() {
        return Err("empty clause".into());
    }
    if let Some(l) = c.iter().find(|l| l.var >= num_vars) {
        return Err(format!("variable {} exceeds declared count {num_vars}", l.var + 1));
    }
    c.sort_unstable();
    c.dedup();
    if c.windows(2).any(|w| w[0].var == w[1].var) {
        return Err("tautological clause (contains a literal and its negation)".into());
    }
    Ok(())
}

/// Parses DIMACS CNF. Comment lines start with `c`; a `%` line ends input.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
    let mut num_vars: Option<usize> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    let mut current_start = 0;
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        last_line = lineno;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if num_vars.is_some() {
                return parse_err(lineno, "duplicate problem line");
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 4 || toks[0] != "p" || toks[1] != "cnf" {
                return parse_err(lineno, "problem line must be `p cnf <vars> <clauses>`");
            }
            let n = toks[2]
                .parse()
                .map_err(|_| Error::Parse { line: lineno, message: "bad variable count".into() })?;
            toks[3]
                .parse::<usize>()
                .map_err(|_| Error::Parse { line: lineno, message: "bad clause count".into() })?;
            num_vars = Some(n);
            continue;
        }
        let Some(n) = num_vars else {
            return parse_err(lineno, "clause before `p cnf` header");
        };
        for tok in line.split_whitespace() {
            let lit: i64 = tok
                .parse()
                .map_err(|_| Error::Parse { line: lineno, message: format!("bad literal `{tok}`") })?;
            if lit == 0 {
                let mut clause = std::mem::take(&mut current);
                normalize_clause(&mut clause, n).map_err(|message| Error::Parse { line: lineno, message })?;
                clauses.push(clause);
                continue;
            }
            if lit.unsigned_abs() as usize > n {
                return parse_err(lineno, format!("variable {} exceeds declared count {n}", lit.unsigned_abs()));
            }
            if current.is_empty() {
                current_start = lineno;
            }
            current.push(Literal::from_dimacs(lit));
        }
    }
    let Some(num_vars) = num_vars else {
        return parse_err(last_line.max(1), "missing `p cnf` header");
    };
    if !current.is_empty() {
        return parse_err(current_start, "clause not terminated by 0");
    }
    Ok(CnfFormula { num_vars, clauses })
}

/// Vertex layout of the reduction: literal `x_i` is vertex `2i`, `!x_i` is
/// `2i + 1`, and `F` is `2n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiteralMap {
    pub num_vars: usize,
}

impl LiteralMap {
    pub fn vertex(&self, lit: Literal) -> usize {
        2 * lit.var + usize::from(lit.negated)
    }

    pub fn f_vertex(&self) -> usize {
        2 * self.num_vars
    }

    pub fn vertex_count(&self) -> usize {
        2 * self.num_vars + 1
    }
}

/// One unit-weight hyperedge per clause: its literal vertices plus `F`.
pub fn cnf_to_hypergraph(phi: &CnfFormula) -> (Hypergraph, LiteralMap) {
    let map = LiteralMap { num_vars: phi.num_vars };
    let mut h = Hypergraph::empty(map.vertex_count());
    for c in &phi.clauses {
        let mut ends: Vec<usize> = c.iter().map(|&l| map.vertex(l)).collect();
        ends.push(map.f_vertex());
        h.add_edge(ends, 1.0).expect("clause vertices are in range");
    }
    (h, map)
}

fn check_assignment(num_vars: usize, assignment: &[bool]) -> Result<()> {
    if assignment.len() != num_vars {
        return invalid(format!(
            "assignment has {} values for {num_vars} variables",
            assignment.len()
        ));
    }
    Ok(())
}

/// True literals on the true side; `F` and the false literals on the other.
pub fn assignment_to_cut(num_vars: usize, assignment: &[bool]) -> Result<Cut> {
    check_assignment(num_vars, assignment)?;
    let mut side = Vec::with_capacity(2 * num_vars + 1);
    for &a in assignment {
        side.push(a);
        side.push(!a);
    }
    side.push(false);
    Ok(Cut::new(side))
}

/// Number of clauses satisfied by `assignment`.
pub fn exact_value(phi: &CnfFormula, assignment: &[bool]) -> Result<usize> {
    check_assignment(phi.num_vars, assignment)?;
    Ok(phi
        .clauses
        .iter()
        .filter(|c| c.iter().any(|l| l.eval(assignment)))
        .count())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SatSketch {
    pub hypergraph: Hypergraph,
    pub literal_map: LiteralMap,
    pub epsilon: f64,
    pub report: SparsifierReport,
}

impl SatSketch {
    pub fn num_vars(&self) -> usize {
        self.literal_map.num_vars
    }

    pub fn f_vertex(&self) -> usize {
        self.literal_map.f_vertex()
    }
}

pub fn sketch_formula(phi: &CnfFormula, epsilon: f64, d: f64, seed: u64) -> Result<SatSketch> {
    let (h, literal_map) = cnf_to_hypergraph(phi);
    let params = SparsifyParams::new(epsilon, d, seed)?;
    let (hypergraph, report) = sparsify(&h, &params)?;
    Ok(SatSketch {
        hypergraph,
        literal_map,
        epsilon,
        report,
    })
}

/// Sketched number of satisfied clauses.
pub fn estimate_value(sketch: &SatSketch, assignment: &[bool]) -> Result<f64> {
    let cut = assignment_to_cut(sketch.num_vars(), assignment)?;
    cut_weight(&sketch.hypergraph, &cut)
}

#[derive(Serialize, Deserialize)]
struct SketchHeader {
    num_vars: usize,
    f_vertex: usize,
    epsilon: f64,
    /// `[positive vertex, negative vertex]` per variable.
    literal_vertex: Vec<[usize; 2]>,
}

/// One JSON header line followed by the hypergraph text format.
pub fn serialize_sketch(sketch: &SatSketch) -> String {
    let map = sketch.literal_map;
    let header = SketchHeader {
        num_vars: map.num_vars,
        f_vertex: map.f_vertex(),
        epsilon: sketch.epsilon,
        literal_vertex: (0..map.num_vars)
            .map(|v| [map.vertex(Literal::pos(v)), map.vertex(Literal::neg(v))])
            .collect(),
    };
    let mut s = serde_json::to_string(&header).expect("header serializes");
    s.push('\n');
    s.push_str(&serialize_hypergraph(&sketch.hypergraph));
    s
}

pub fn parse_sketch(text: &str) -> Result<SatSketch> {
    let (first, rest) = text.split_once('\n').unwrap_or((text, ""));
    let header: SketchHeader = serde_json::from_str(first).map_err(|e| Error::Parse {
        line: 1,
        message: format!("bad sketch header: {e}"),
    })?;
    let map = LiteralMap { num_vars: header.num_vars };
    let layout_ok = header.f_vertex == map.f_vertex()
        && header.literal_vertex.len() == header.num_vars
        && header
            .literal_vertex
            .iter()
            .enumerate()
            .all(|(v, pair)| *pair == [map.vertex(Literal::pos(v)), map.vertex(Literal::neg(v))]);
    if !layout_ok {
        return parse_err(1, "unsupported literal layout in sketch header");
    }
    let hypergraph = parse_hypergraph(rest).map_err(|e| match e {
        Error::Parse { line, message } => Error::Parse { line: line + 1, message },
        other => other,
    })?;
    if hypergraph.n() != map.vertex_count() {
        return parse_err(2, format!("sketch hypergraph must have {} vertices", map.vertex_count()));
    }
    Ok(SatSketch {
        report: SparsifierReport {
            edge_count: hypergraph.edge_count(),
            expected_edge_count: None,
            max_relative_cut_error: None,
            within_epsilon: None,
        },
        hypergraph,
        literal_map: map,
        epsilon: header.epsilon,
    })
}
