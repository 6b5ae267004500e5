//! QUBO encoding of the cycle-cover problem.
//!
//! One binary variable per edge. The cost is
//!
//! ```text
//! J(x) = -sum x_ij
//!        + sum_i a_i sum_{j<j'} x_ij x_ij'      (at most one out-edge)
//!        + sum_j b_j sum_{i<i'} x_ij x_i'j      (at most one in-edge)
//!        + c sum_{i<j} x_ij x_ji                (no 2-cycles)
//! ```
//!
//! with `a_i = 1 + eps` when vertex `i` has more than one out-edge (else 0),
//! `b_j` likewise for in-edges, and `c = 2 + eps`. These are the smallest
//! constants for which every single violation costs more than the edge it
//! adds. The "exactly N_V edges" requirement is left out of the cost: a
//! minimiser reaching `-N_V` is a cover, and the checker confirms it.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;
use std::io::BufRead;

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;

pub const DEFAULT_EPSILON: f64 = 1.0;

/// One bit per QUBO variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assignment(Vec<bool>);

impl Assignment {
    pub fn zeros(n: usize) -> Self {
        Assignment(vec![false; n])
    }

    pub fn ones(n: usize) -> Self {
        Assignment(vec![true; n])
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Assignment(bits)
    }

    /// Low `n` bits of `mask`, bit `u` is variable `u`.
    pub fn from_mask(mask: u64, n: usize) -> Self {
        Assignment((0..n).map(|u| mask >> u & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn get(&self, u: usize) -> bool {
        self.0[u]
    }

    pub fn set(&mut self, u: usize, value: bool) {
        self.0[u] = value;
    }

    pub fn flip(&mut self, u: usize) {
        self.0[u] = !self.0[u];
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Assignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Domain(format!("invalid bit character `{c}`"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Assignment)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyConstants {
    /// Out-degree penalty per vertex (internal index).
    pub out: Vec<f64>,
    /// In-degree penalty per vertex.
    pub inn: Vec<f64>,
    /// 2-cycle penalty.
    pub pair: f64,
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("epsilon must be positive and finite, got {epsilon}")))
    }
}

pub fn penalty_constants(g: &DirectedGraph, epsilon: f64) -> Result<PenaltyConstants> {
    check_epsilon(epsilon)?;
    let weight = |deg: usize| if deg > 1 { 1.0 + epsilon } else { 0.0 };
    let n = g.num_vertices();
    Ok(PenaltyConstants {
        out: (0..n).map(|v| weight(g.out_degree(v))).collect(),
        inn: (0..n).map(|v| weight(g.in_degree(v))).collect(),
        pair: 2.0 + epsilon,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuboProblem {
    labels: Vec<u64>,
    /// Variable index -> edge, as internal vertex indices.
    var_to_edge: Vec<(usize, usize)>,
    linear: Vec<f64>,
    quadratic: BTreeMap<(usize, usize), f64>,
    epsilon: f64,
    /// Per-variable `(neighbour, coefficient)` lists for O(degree) flips.
    neighbors: Vec<Vec<(usize, f64)>>,
}

impl QuboProblem {
    fn new(
        labels: Vec<u64>,
        var_to_edge: Vec<(usize, usize)>,
        linear: Vec<f64>,
        quadratic: BTreeMap<(usize, usize), f64>,
        epsilon: f64,
    ) -> Self {
        let mut neighbors = vec![Vec::new(); linear.len()];
        for (&(u, v), &w) in &quadratic {
            neighbors[u].push((v, w));
            neighbors[v].push((u, w));
        }
        Self {
            labels,
            var_to_edge,
            linear,
            quadratic,
            epsilon,
            neighbors,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.linear.len()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    pub fn quadratic(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.quadratic
    }

    pub fn neighbors(&self, u: usize) -> &[(usize, f64)] {
        &self.neighbors[u]
    }

    /// Edge of variable `u` as internal vertex indices.
    pub fn edge(&self, u: usize) -> (usize, usize) {
        self.var_to_edge[u]
    }

    /// Edge of variable `u` as vertex labels.
    pub fn labeled_edge(&self, u: usize) -> (u64, u64) {
        let (i, j) = self.var_to_edge[u];
        (self.labels[i], self.labels[j])
    }

    fn check_len(&self, x: &Assignment) -> Result<()> {
        if x.len() == self.num_vars() {
            Ok(())
        } else {
            Err(Error::Shape {
                expected: self.num_vars(),
                actual: x.len(),
            })
        }
    }

    pub fn energy(&self, x: &Assignment) -> Result<f64> {
        self.check_len(x)?;
        let bits = x.bits();
        let lin: f64 = self
            .linear
            .iter()
            .zip(bits)
            .filter(|(_, &b)| b)
            .map(|(c, _)| c)
            .sum();
        let quad: f64 = self
            .quadratic
            .iter()
            .filter(|(&(u, v), _)| bits[u] && bits[v])
            .map(|(_, w)| w)
            .sum();
        Ok(lin + quad)
    }

    /// Energy change from flipping bit `u` of `bits`. No length check.
    #[inline]
    pub fn flip_delta(&self, bits: &[bool], u: usize) -> f64 {
        let field: f64 = self.linear[u]
            + self.neighbors[u]
                .iter()
                .filter(|&&(v, _)| bits[v])
                .map(|&(_, w)| w)
                .sum::<f64>();
        if bits[u] {
            -field
        } else {
            field
        }
    }

    /// Subgraph of the source graph selected by `x`, on the full vertex set.
    pub fn decode(&self, x: &Assignment) -> Result<DirectedGraph> {
        self.check_len(x)?;
        let edges: Vec<(usize, usize)> = x
            .bits()
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(u, _)| self.var_to_edge[u])
            .collect();
        DirectedGraph::from_indexed(self.labels.clone(), sorted(edges))
    }

    /// Assignment selecting exactly the edges of `sub`, which must be a
    /// spanning subgraph of the encoded graph.
    pub fn assignment_for(&self, sub: &DirectedGraph) -> Result<Assignment> {
        if sub.labels() != self.labels.as_slice() {
            return Err(Error::Precondition("vertex sets differ".into()));
        }
        let mut x = Assignment::zeros(self.num_vars());
        for &e in sub.edges() {
            let u = self
                .var_to_edge
                .binary_search(&e)
                .map_err(|_| Error::Precondition(format!("edge {e:?} is not a variable")))?;
            x.set(u, true);
        }
        Ok(x)
    }

    /// Text form:
    ///
    /// ```text
    /// p <num_vars> <num_entries>
    /// c epsilon <eps>
    /// c vertex <label>        (isolated vertices only)
    /// c var <idx> <i> <j>     (one per variable)
    /// <u> <v> <coeff>         (u == v carries the linear term)
    /// ```
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let entries = self.num_vars() + self.quadratic.len();
        writeln!(s, "p {} {}", self.num_vars(), entries).unwrap();
        writeln!(s, "c epsilon {}", self.epsilon).unwrap();
        let mut touched = vec![false; self.labels.len()];
        for &(i, j) in &self.var_to_edge {
            touched[i] = true;
            touched[j] = true;
        }
        for (v, _) in touched.iter().enumerate().filter(|(_, &t)| !t) {
            writeln!(s, "c vertex {}", self.labels[v]).unwrap();
        }
        for u in 0..self.num_vars() {
            let (i, j) = self.labeled_edge(u);
            writeln!(s, "c var {u} {i} {j}").unwrap();
        }
        // Entries in (u, v) order with the diagonal first in each row.
        let mut quad = self.quadratic.iter().peekable();
        for u in 0..self.num_vars() {
            writeln!(s, "{u} {u} {}", self.linear[u]).unwrap();
            while let Some((&(a, b), w)) = quad.peek() {
                if a != u {
                    break;
                }
                writeln!(s, "{a} {b} {w}").unwrap();
                quad.next();
            }
        }
        s
    }

    pub fn read_text<R: BufRead>(reader: R) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut epsilon = None;
        let mut isolated = Vec::new();
        let mut vars: BTreeMap<usize, (u64, u64)> = BTreeMap::new();
        let mut linear: BTreeMap<usize, f64> = BTreeMap::new();
        let mut quadratic = BTreeMap::new();
        let mut entries = 0usize;
        for (lineno, line) in reader.lines().enumerate() {
            let lineno = lineno + 1;
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| -> Result<u64> {
                s.parse()
                    .map_err(|_| Error::parse(lineno, format!("`{s}` is not an integer")))
            };
            match f[..] {
                ["p", n, m] => {
                    if header.is_some() {
                        return Err(Error::parse(lineno, "duplicate `p` line"));
                    }
                    header = Some((num(n)? as usize, num(m)? as usize));
                }
                ["c", "epsilon", e] => {
                    epsilon = Some(
                        e.parse::<f64>()
                            .map_err(|_| Error::parse(lineno, "bad epsilon"))?,
                    )
                }
                ["c", "vertex", l] => isolated.push(num(l)?),
                ["c", "var", idx, i, j] => {
                    if vars.insert(num(idx)? as usize, (num(i)?, num(j)?)).is_some() {
                        return Err(Error::parse(lineno, "duplicate variable mapping"));
                    }
                }
                ["c", ..] => {}
                [u, v, w] => {
                    let (u, v) = (num(u)? as usize, num(v)? as usize);
                    let w: f64 = w
                        .parse()
                        .map_err(|_| Error::parse(lineno, format!("bad coefficient `{w}`")))?;
                    if u > v {
                        return Err(Error::parse(lineno, "entries must satisfy u <= v"));
                    }
                    let dup = if u == v {
                        linear.insert(u, w).is_some()
                    } else {
                        quadratic.insert((u, v), w).is_some()
                    };
                    if dup {
                        return Err(Error::parse(lineno, format!("duplicate entry ({u}, {v})")));
                    }
                    entries += 1;
                }
                _ => return Err(Error::parse(lineno, format!("unrecognised line `{line}`"))),
            }
        }
        let (n, m) = header.ok_or_else(|| Error::parse(0, "missing `p` line"))?;
        let epsilon = epsilon.ok_or_else(|| Error::parse(0, "missing `c epsilon` line"))?;
        check_epsilon(epsilon)?;
        if entries != m {
            return Err(Error::parse(0, format!("header declares {m} entries, found {entries}")));
        }
        if vars.len() != n || vars.keys().copied().ne(0..n) {
            return Err(Error::parse(0, "variable map must cover 0..num_vars exactly once"));
        }
        if quadratic.keys().any(|&(_, v)| v >= n) || linear.keys().any(|&u| u >= n) {
            return Err(Error::parse(0, "entry index out of range"));
        }
        let graph = DirectedGraph::from_labeled(isolated, vars.values().copied())?;
        let var_to_edge: Vec<(usize, usize)> = vars
            .values()
            .map(|&(i, j)| (graph.index_of(i).unwrap(), graph.index_of(j).unwrap()))
            .collect();
        if var_to_edge.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::parse(0, "variables must be in lexicographic edge order"));
        }
        let linear = (0..n).map(|u| linear.get(&u).copied().unwrap_or(0.0)).collect();
        Ok(Self::new(
            graph.labels().to_vec(),
            var_to_edge,
            linear,
            quadratic,
            epsilon,
        ))
    }
}

fn sorted(mut v: Vec<(usize, usize)>) -> Vec<(usize, usize)> {
    v.sort_unstable();
    v
}

/// Builds the QUBO for `g`. Variables follow the lexicographic order of the
/// graph's edges.
pub fn encode(g: &DirectedGraph, epsilon: f64) -> Result<QuboProblem> {
    if g.is_empty() {
        return Err(Error::Domain("cannot encode an empty graph".into()));
    }
    let pc = penalty_constants(g, epsilon)?;
    let var_to_edge = g.edges().to_vec();
    let var_of = |e: (usize, usize)| var_to_edge.binary_search(&e).expect("edge of g");

    let mut quadratic: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut add = |a: usize, b: usize, w: f64| {
        let key = if a < b { (a, b) } else { (b, a) };
        *quadratic.entry(key).or_insert(0.0) += w;
    };
    for v in 0..g.num_vertices() {
        let outs = g.out_neighbors(v);
        if pc.out[v] > 0.0 {
            for (k, &j) in outs.iter().enumerate() {
                for &j2 in &outs[k + 1..] {
                    add(var_of((v, j)), var_of((v, j2)), pc.out[v]);
                }
            }
        }
        let ins = g.in_neighbors(v);
        if pc.inn[v] > 0.0 {
            for (k, &i) in ins.iter().enumerate() {
                for &i2 in &ins[k + 1..] {
                    add(var_of((i, v)), var_of((i2, v)), pc.inn[v]);
                }
            }
        }
        for &j in outs {
            if v < j && g.has_edge(j, v) {
                add(var_of((v, j)), var_of((j, v)), pc.pair);
            }
        }
    }
    let linear = vec![-1.0; var_to_edge.len()];
    Ok(QuboProblem::new(
        g.labels().to_vec(),
        var_to_edge,
        linear,
        quadratic,
        epsilon,
    ))
}
