//! Solvers: exhaustive minimisation, simulated annealing, and a direct
//! depth-first enumeration of cycle covers that does not go through the QUBO.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::qubo::{Assignment, QuboProblem};
use crate::seed;

/// Largest problem [`solve_exact`] accepts.
pub const EXACT_MAX_VARS: usize = 30;

#[derive(Debug, Clone, PartialEq)]
pub struct ExactSolution {
    pub min_energy: f64,
    /// Every assignment attaining `min_energy`, in ascending bit order.
    pub minimizers: Vec<Assignment>,
}

/// Enumerates all `2^num_vars` assignments in Gray-code order.
pub fn solve_exact(q: &QuboProblem) -> Result<ExactSolution> {
    let n = q.num_vars();
    if n > EXACT_MAX_VARS {
        return Err(Error::Capacity(format!(
            "exact solver is limited to {EXACT_MAX_VARS} variables, problem has {n}"
        )));
    }
    // Running energies drift for non-dyadic coefficients; collect anything
    // within `slack` of the best and settle with exact recomputation.
    let slack = 1e-6;
    let mut bits = vec![false; n];
    let mut energy = 0.0f64;
    let mut best = 0.0f64;
    let mut candidates: Vec<Vec<bool>> = vec![bits.clone()];
    for step in 1u64..(1u64 << n) {
        let u = step.trailing_zeros() as usize;
        energy += q.flip_delta(&bits, u);
        bits[u] = !bits[u];
        if energy < best - slack {
            best = energy;
            candidates.clear();
            candidates.push(bits.clone());
        } else if energy <= best + slack {
            candidates.push(bits.clone());
        }
    }
    let scored: Vec<(f64, Assignment)> = candidates
        .into_iter()
        .map(|b| {
            let x = Assignment::from_bits(b);
            (q.energy(&x).expect("length matches"), x)
        })
        .collect();
    let min_energy = scored.iter().map(|(e, _)| *e).fold(f64::INFINITY, f64::min);
    let tol = 1e-9 * min_energy.abs().max(1.0);
    let mut minimizers: Vec<Assignment> = scored
        .into_iter()
        .filter(|(e, _)| *e <= min_energy + tol)
        .map(|(_, x)| x)
        .collect();
    minimizers.sort();
    Ok(ExactSolution {
        min_energy,
        minimizers,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleRecord {
    pub assignment: Assignment,
    pub energy: f64,
    pub count: usize,
}

/// Distinct sampled assignments with their energies and multiplicities,
/// sorted by energy then by bits.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub records: Vec<SampleRecord>,
    pub total_shots: usize,
}

impl SampleSet {
    pub fn from_shots<I>(q: &QuboProblem, shots: I) -> Self
    where
        I: IntoIterator<Item = Assignment>,
    {
        let mut counts: BTreeMap<Assignment, usize> = BTreeMap::new();
        for x in shots {
            *counts.entry(x).or_default() += 1;
        }
        let total_shots = counts.values().sum();
        let mut records: Vec<SampleRecord> = counts
            .into_iter()
            .map(|(assignment, count)| SampleRecord {
                energy: q.energy(&assignment).expect("sampled from q"),
                assignment,
                count,
            })
            .collect();
        records.sort_by(|a, b| {
            a.energy
                .total_cmp(&b.energy)
                .then_with(|| a.assignment.cmp(&b.assignment))
        });
        SampleSet {
            records,
            total_shots,
        }
    }

    pub fn lowest(&self) -> Option<&SampleRecord> {
        self.records.first()
    }

    /// CSV with header `energy,count,bits`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("energy,count,bits\n");
        for r in &self.records {
            writeln!(s, "{},{},{}", r.energy, r.count, r.assignment).unwrap();
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealParams {
    pub shots: usize,
    pub sweeps: usize,
    pub beta_min: f64,
    pub beta_max: f64,
    pub seed: u64,
}

impl Default for AnnealParams {
    fn default() -> Self {
        Self {
            shots: 100,
            sweeps: 1000,
            beta_min: 0.1,
            beta_max: 10.0,
            seed: 0,
        }
    }
}

impl AnnealParams {
    pub fn validate(&self) -> Result<()> {
        if self.shots < 1 || self.sweeps < 1 {
            return Err(Error::Domain("shots and sweeps must be at least 1".into()));
        }
        if !(self.beta_min > 0.0 && self.beta_min < self.beta_max && self.beta_max.is_finite()) {
            return Err(Error::Domain(format!(
                "need 0 < beta_min < beta_max, got {} and {}",
                self.beta_min, self.beta_max
            )));
        }
        Ok(())
    }

    /// Geometric inverse-temperature ladder, one entry per sweep. A single
    /// sweep runs at `beta_max`.
    pub fn schedule(&self) -> Vec<f64> {
        if self.sweeps == 1 {
            return vec![self.beta_max];
        }
        let ratio = (self.beta_max / self.beta_min).ln() / (self.sweeps - 1) as f64;
        (0..self.sweeps)
            .map(|k| self.beta_min * (ratio * k as f64).exp())
            .collect()
    }
}

/// Independent single-flip Metropolis anneals, one per shot.
///
/// Shot `s` draws from `ChaCha8Rng` seeded with `seed::derive(params.seed, s)`.
/// It starts from a uniform random assignment; each sweep visits every
/// variable once in a fresh random order, accepting a flip when the energy
/// change is `<= 0` and otherwise with probability `exp(-beta * delta)`.
pub fn sample_sa(q: &QuboProblem, params: &AnnealParams) -> Result<SampleSet> {
    params.validate()?;
    let schedule = params.schedule();
    let shots = (0..params.shots as u64).map(|s| anneal_once(q, &schedule, seed::derive(params.seed, s)));
    Ok(SampleSet::from_shots(q, shots))
}

fn anneal_once(q: &QuboProblem, schedule: &[f64], seed: u64) -> Assignment {
    let n = q.num_vars();
    let mut rng = seed::rng(seed);
    let mut bits: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    for &beta in schedule {
        order.shuffle(&mut rng);
        for &u in &order {
            let delta = q.flip_delta(&bits, u);
            if delta <= 0.0 || rng.gen::<f64>() < (-beta * delta).exp() {
                bits[u] = !bits[u];
            }
        }
    }
    Assignment::from_bits(bits)
}

/// Draws `shots` assignments uniformly from the exact minimisers.
pub fn sample_exact(q: &QuboProblem, shots: usize, seed: u64) -> Result<SampleSet> {
    if shots < 1 {
        return Err(Error::Domain("shots must be at least 1".into()));
    }
    let sol = solve_exact(q)?;
    let mut rng = seed::rng(seed);
    let picks = (0..shots).map(|_| sol.minimizers[rng.gen_range(0..sol.minimizers.len())].clone());
    Ok(SampleSet::from_shots(q, picks))
}

/// Enumerates up to `limit` vertex 3-cycle covers of `g` by depth-first
/// search over one outgoing edge per vertex, vertices in ascending order.
/// Branches are cut as soon as a target already has an incoming edge or a
/// choice closes a 2-cycle. Worst case is exponential in the number of
/// vertices with more than one out-edge.
pub fn enumerate_covers(g: &DirectedGraph, limit: usize) -> Vec<DirectedGraph> {
    const NONE: usize = usize::MAX;
    let n = g.num_vertices();
    let mut covers = Vec::new();
    if limit == 0 {
        return covers;
    }
    if (0..n).any(|v| g.out_degree(v) == 0 || g.in_degree(v) == 0) {
        return covers;
    }
    let mut next = vec![0usize; n];
    let mut succ = vec![NONE; n];
    let mut pred = vec![NONE; n];
    let mut v = 0usize;
    loop {
        if v == n {
            covers.push(g.with_edges((0..n).map(|i| (i, succ[i])).collect()));
            if covers.len() >= limit || n == 0 {
                break;
            }
            v -= 1;
            pred[succ[v]] = NONE;
            succ[v] = NONE;
            continue;
        }
        let outs = g.out_neighbors(v);
        let mut placed = false;
        while next[v] < outs.len() {
            let j = outs[next[v]];
            next[v] += 1;
            if pred[j] == NONE && succ[j] != v {
                succ[v] = j;
                pred[j] = v;
                placed = true;
                break;
            }
        }
        if placed {
            v += 1;
        } else {
            next[v] = 0;
            if v == 0 {
                break;
            }
            v -= 1;
            pred[succ[v]] = NONE;
            succ[v] = NONE;
        }
    }
    covers
}
