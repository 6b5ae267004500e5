//! Directed graphs without self-loops, benchmark instance generation and the
//! edge-list file format.
//!
//! Vertices carry arbitrary distinct `u64` labels. Internally they are indexed
//! `0..N_V` by ascending label; every public output goes back through the
//! labels, so a 1-based input file round-trips unchanged.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use rand::seq::index;

use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DirectedGraph {
    labels: Vec<u64>,
    /// Sorted, deduplicated `(source, target)` pairs of internal indices.
    edges: Vec<(usize, usize)>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
}

impl DirectedGraph {
    /// Builds a graph from labelled edges. The vertex set is the union of
    /// `vertices` and every edge endpoint.
    pub fn from_labeled<V, E>(vertices: V, edges: E) -> Result<Self>
    where
        V: IntoIterator<Item = u64>,
        E: IntoIterator<Item = (u64, u64)>,
    {
        let edges: Vec<(u64, u64)> = edges.into_iter().collect();
        let mut labels: BTreeSet<u64> = vertices.into_iter().collect();
        for &(i, j) in &edges {
            labels.insert(i);
            labels.insert(j);
        }
        let labels: Vec<u64> = labels.into_iter().collect();
        let index_of = |l: u64| labels.binary_search(&l).expect("label inserted above");

        let mut set = BTreeSet::new();
        for (i, j) in edges {
            if i == j {
                return Err(Error::Domain(format!("self-loop on vertex {i}")));
            }
            if !set.insert((index_of(i), index_of(j))) {
                return Err(Error::Domain(format!("duplicate edge ({i}, {j})")));
            }
        }
        Self::from_indexed(labels, set.into_iter().collect())
    }

    /// `edges` must be sorted, distinct and loop-free over `0..labels.len()`.
    pub(crate) fn from_indexed(labels: Vec<u64>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let n = labels.len();
        debug_assert!(labels.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for &(i, j) in &edges {
            if i >= n || j >= n {
                return Err(Error::Domain(format!("edge ({i}, {j}) out of range")));
            }
            if i == j {
                return Err(Error::Domain(format!("self-loop on vertex {}", labels[i])));
            }
            out_adj[i].push(j);
            in_adj[j].push(i);
        }
        // Sorted edges give sorted out lists; in lists are filled in source order.
        Ok(Self {
            labels,
            edges,
            out_adj,
            in_adj,
        })
    }

    /// Same vertex set, with the given subset of internal-index edges.
    pub(crate) fn with_edges(&self, mut edges: Vec<(usize, usize)>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        Self::from_indexed(self.labels.clone(), edges).expect("edges drawn from a valid graph")
    }

    /// Subgraph on the same vertex set from labelled edges.
    pub fn subgraph<E>(&self, edges: E) -> Result<Self>
    where
        E: IntoIterator<Item = (u64, u64)>,
    {
        let mut idx = Vec::new();
        for (i, j) in edges {
            match (self.index_of(i), self.index_of(j)) {
                (Some(a), Some(b)) if a != b => idx.push((a, b)),
                (Some(_), Some(_)) => {
                    return Err(Error::Domain(format!("self-loop on vertex {i}")));
                }
                _ => {
                    return Err(Error::Precondition(format!(
                        "edge ({i}, {j}) references a vertex outside the graph"
                    )))
                }
            }
        }
        Ok(self.with_edges(idx))
    }

    pub fn num_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Vertex labels in ascending order; position is the internal index.
    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> u64 {
        self.labels[v]
    }

    pub fn index_of(&self, label: u64) -> Option<usize> {
        self.labels.binary_search(&label).ok()
    }

    /// Edges as internal indices, sorted lexicographically.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Edges as labels, sorted lexicographically by label.
    pub fn labeled_edges(&self) -> Vec<(u64, u64)> {
        self.edges
            .iter()
            .map(|&(i, j)| (self.labels[i], self.labels[j]))
            .collect()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.binary_search(&(i, j)).is_ok()
    }

    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.out_adj[v]
    }

    pub fn in_neighbors(&self, v: usize) -> &[usize] {
        &self.in_adj[v]
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out_adj[v].len()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_adj[v].len()
    }

    /// True when every edge of `self` is an edge of `other` and the vertex
    /// sets coincide.
    pub fn is_spanning_subgraph_of(&self, other: &DirectedGraph) -> bool {
        self.labels == other.labels && self.edges.iter().all(|&(i, j)| other.has_edge(i, j))
    }

    /// Number of ordered non-loop pairs that are not yet edges.
    pub fn free_pair_count(&self) -> usize {
        let n = self.num_vertices();
        n * n.saturating_sub(1) - self.num_edges()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Noise {
    /// Fraction of the `N_V (N_V - 2)` maximum.
    Fraction(f64),
    Count(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorParams {
    pub cycles: usize,
    pub cycle_len: usize,
    pub noise: Noise,
    pub seed: u64,
}

impl GeneratorParams {
    pub fn validate(&self) -> Result<()> {
        if self.cycles < 1 {
            return Err(Error::Domain("number of cycles must be at least 1".into()));
        }
        if self.cycle_len < 3 {
            return Err(Error::Domain(format!(
                "cycle length must be at least 3, got {}",
                self.cycle_len
            )));
        }
        if let Noise::Fraction(p) = self.noise {
            if !(p >= 0.0 && p.is_finite()) {
                return Err(Error::Domain(format!("p_noise must be finite and >= 0, got {p}")));
            }
        }
        Ok(())
    }

    pub fn num_vertices(&self) -> usize {
        self.cycles * self.cycle_len
    }

    /// Number of noise edges these parameters ask for.
    pub fn noise_edges(&self) -> Result<usize> {
        match self.noise {
            Noise::Count(k) => Ok(k),
            Noise::Fraction(p) => noise_count(p, self.num_vertices()),
        }
    }

    /// The planted cycles plus the requested noise.
    pub fn generate(&self) -> Result<DirectedGraph> {
        self.validate()?;
        let g0 = generate_cycles(self.cycles, self.cycle_len)?;
        add_noise(&g0, self.noise_edges()?, self.seed)
    }
}

/// `n` disjoint directed cycles of length `len` on vertices `0..n*len`;
/// cycle `k` is `kL -> kL+1 -> ... -> kL+L-1 -> kL`.
pub fn generate_cycles(n: usize, len: usize) -> Result<DirectedGraph> {
    if n < 1 {
        return Err(Error::Domain("number of cycles must be at least 1".into()));
    }
    if len < 3 {
        return Err(Error::Domain(format!("cycle length must be at least 3, got {len}")));
    }
    let nv = n * len;
    let mut edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|k| (0..len).map(move |m| (k * len + m, k * len + (m + 1) % len)))
        .collect();
    edges.sort_unstable();
    DirectedGraph::from_indexed((0..nv as u64).collect(), edges)
}

/// `round(p_noise * N_V * (N_V - 2))`, ties away from zero.
pub fn noise_count(p_noise: f64, num_vertices: usize) -> Result<usize> {
    if num_vertices < 3 {
        return Err(Error::Domain(format!(
            "noise_count needs at least 3 vertices, got {num_vertices}"
        )));
    }
    if !(p_noise >= 0.0 && p_noise.is_finite()) {
        return Err(Error::Domain(format!("p_noise must be finite and >= 0, got {p_noise}")));
    }
    let nv = num_vertices as f64;
    // f64::round rounds half away from zero.
    Ok((p_noise * nv * (nv - 2.0)).round() as usize)
}

/// Adds `n_noise` distinct edges drawn uniformly without replacement from
/// the ordered non-loop pairs that are not already edges.
///
/// Candidates are ranked row by row (source ascending, then target
/// ascending). A `ChaCha8Rng` seeded from `seed` picks `n_noise` distinct
/// ranks with `rand::seq::index::sample`, and the ranks are mapped back to
/// pairs.
pub fn add_noise(g0: &DirectedGraph, n_noise: usize, seed: u64) -> Result<DirectedGraph> {
    let free = g0.free_pair_count();
    if n_noise > free {
        return Err(Error::Capacity(format!(
            "requested {n_noise} noise edges but only {free} free vertex pairs exist"
        )));
    }
    if n_noise == 0 {
        return Ok(g0.clone());
    }
    let mut rng = seed::rng(seed);
    let mut ranks = index::sample(&mut rng, free, n_noise).into_vec();
    ranks.sort_unstable();

    let n = g0.num_vertices();
    let mut edges = g0.edges().to_vec();
    let mut ranks = ranks.into_iter().peekable();
    let mut row_start = 0usize;
    for i in 0..n {
        let row_free = (n - 1) - g0.out_degree(i);
        let row_end = row_start + row_free;
        let mut row_ranks = Vec::new();
        while let Some(&r) = ranks.peek() {
            if r >= row_end {
                break;
            }
            row_ranks.push(r - row_start);
            ranks.next();
        }
        if !row_ranks.is_empty() {
            // Walk the free targets of row i in ascending order.
            let taken = g0.out_neighbors(i);
            let mut want = row_ranks.into_iter().peekable();
            let free = (0..n).filter(|&j| j != i && taken.binary_search(&j).is_err());
            for (pos, j) in free.enumerate() {
                match want.peek() {
                    Some(&w) if w == pos => {
                        edges.push((i, j));
                        want.next();
                    }
                    Some(_) => {}
                    None => break,
                }
            }
        }
        row_start = row_end;
    }
    edges.sort_unstable();
    debug_assert_eq!(edges.len(), g0.num_edges() + n_noise);
    DirectedGraph::from_indexed(g0.labels().to_vec(), edges)
}

/// Parses the edge-list format:
///
/// ```text
/// # comment
/// <N_V> <N_E>
/// v <label>        (optional, one per isolated vertex)
/// <i> <j>          (N_E lines)
/// ```
pub fn read_edge_list<R: BufRead>(reader: R) -> Result<DirectedGraph> {
    let mut header: Option<(usize, usize)> = None;
    let mut isolated = Vec::new();
    let mut edges = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if header.is_none() {
            let [nv, ne] = fields[..] else {
                return Err(Error::parse(lineno, "expected header `N_V N_E`"));
            };
            header = Some((parse_num(nv, lineno)?, parse_num(ne, lineno)?));
            continue;
        }
        match fields[..] {
            ["v", label] => isolated.push(parse_num(label, lineno)?),
            [i, j] => edges.push((parse_num(i, lineno)?, parse_num(j, lineno)?)),
            _ => return Err(Error::parse(lineno, format!("unrecognised line `{line}`"))),
        }
    }
    let Some((nv, ne)) = header else {
        return Err(Error::parse(0, "missing header line"));
    };
    if edges.len() != ne {
        return Err(Error::parse(
            0,
            format!("header declares {ne} edges, found {}", edges.len()),
        ));
    }
    let g = DirectedGraph::from_labeled(isolated, edges)?;
    if g.num_vertices() != nv {
        return Err(Error::parse(
            0,
            format!("header declares {nv} vertices, found {}", g.num_vertices()),
        ));
    }
    Ok(g)
}

fn parse_num<T: std::str::FromStr>(s: &str, line: usize) -> Result<T> {
    s.parse()
        .map_err(|_| Error::parse(line, format!("`{s}` is not a non-negative integer")))
}

/// Canonical text form: header, isolated vertices ascending, edges sorted
/// lexicographically by label. No comments are written so that a read/write
/// cycle is byte-identical.
pub fn edge_list_string(g: &DirectedGraph) -> String {
    let mut s = String::new();
    writeln!(s, "{} {}", g.num_vertices(), g.num_edges()).unwrap();
    for v in 0..g.num_vertices() {
        if g.out_degree(v) == 0 && g.in_degree(v) == 0 {
            writeln!(s, "v {}", g.label(v)).unwrap();
        }
    }
    for (i, j) in g.labeled_edges() {
        writeln!(s, "{i} {j}").unwrap();
    }
    s
}

pub fn write_edge_list<W: Write>(g: &DirectedGraph, mut w: W) -> Result<()> {
    w.write_all(edge_list_string(g).as_bytes())?;
    Ok(())
}
