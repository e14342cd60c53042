//! The Markov chain on a graph structure induced by its Perron data, path
//! weights, samplers, return times, and the `lambda'` comparison measure.

use std::collections::BTreeMap;

use nalgebra::DVector;
use num_traits::ToPrimitive;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::combing::{self, GraphStructure};
use crate::error::{Error, Result};
use crate::spectral::{self, SpectralData};

/// Deterministic generator for stream `stream` of the run seeded by `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Clone, Debug)]
pub struct MarkovModel {
    graph: GraphStructure,
    lambda: f64,
    p: Vec<f64>,
    q: Vec<f64>,
    pi: Vec<f64>,
    /// Probability of each edge, `p_dst / (lambda p_src)`.
    edge_prob: Vec<f64>,
    steps: Vec<Option<WeightedIndex<f64>>>,
    start: WeightedIndex<f64>,
}

/// Markov model of `graph`. Every vertex must have large growth.
pub fn build_markov(graph: &GraphStructure, data: &SpectralData) -> Result<MarkovModel> {
    let n = graph.vertex_count();
    if data.p.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: data.p.len() });
    }
    if let Some(v) = (0..n).find(|&v| data.p[v] <= 0.0) {
        return Err(Error::SmallGrowthVertex(v));
    }
    let edge_prob: Vec<f64> = graph.edges().iter().map(|e| data.p[e.dst] / (data.lambda * data.p[e.src])).collect();
    let steps = (0..n)
        .map(|v| {
            let out = graph.out_edges(v);
            if out.is_empty() {
                None
            } else {
                Some(WeightedIndex::new(out.iter().map(|&e| edge_prob[e])).expect("positive weights"))
            }
        })
        .collect();
    let start = WeightedIndex::new(data.pi.iter().copied()).map_err(|_| Error::NotNormalized(data.pi.iter().sum()))?;
    Ok(MarkovModel {
        graph: graph.clone(),
        lambda: data.lambda,
        p: data.p.clone(),
        q: data.q.clone(),
        pi: data.pi.clone(),
        edge_prob,
        steps,
        start,
    })
}

/// Restriction of `graph` to its large-growth vertices. Fails if the initial
/// vertex itself has small growth.
pub fn prune_small_growth(graph: &GraphStructure, data: &SpectralData) -> Result<GraphStructure> {
    if !data.is_large_growth(graph.initial()) {
        return Err(Error::EmptyRestriction);
    }
    let keep: Vec<usize> = (0..graph.vertex_count()).filter(|&v| data.is_large_growth(v)).collect();
    combing::restrict(graph, &keep, graph.initial())
}

/// A path together with the vertex it starts from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampledPath {
    pub start: usize,
    pub edges: Vec<usize>,
    pub word: Vec<usize>,
}

impl SampledPath {
    /// Vertex occupied after each step, starting with `start`.
    pub fn vertices<'a>(&'a self, graph: &'a GraphStructure) -> impl Iterator<Item = usize> + 'a {
        std::iter::once(self.start).chain(self.edges.iter().map(|&e| graph.edge(e).dst))
    }
}

impl MarkovModel {
    pub fn graph(&self) -> &GraphStructure {
        &self.graph
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn stationary(&self) -> &[f64] {
        &self.pi
    }

    pub fn edge_probability(&self, edge: usize) -> f64 {
        self.edge_prob[edge]
    }

    /// Vertex-to-vertex transition matrix `P_ij`.
    pub fn transition_probabilities(&self) -> Vec<Vec<f64>> {
        let n = self.graph.vertex_count();
        let mut p = vec![vec![0.0; n]; n];
        for (k, e) in self.graph.edges().iter().enumerate() {
            p[e.src][e.dst] += self.edge_prob[k];
        }
        p
    }

    fn check_path(&self, start: usize, path: &[usize]) -> Result<usize> {
        if start >= self.graph.vertex_count() {
            return Err(Error::InvalidPath(format!("start vertex {start} out of range")));
        }
        if path.iter().any(|&e| e >= self.graph.edges().len()) {
            return Err(Error::InvalidPath("edge index out of range".into()));
        }
        self.graph.path_end(start, path).ok_or_else(|| Error::InvalidPath("consecutive edges do not compose".into()))
    }

    /// `mu(w) = q_i p_j / lambda^n` for a path `w` of length `n` from `i` to `j`.
    pub fn path_weight(&self, start: usize, path: &[usize]) -> Result<f64> {
        let end = self.check_path(start, path)?;
        Ok(self.q[start] * self.p[end] / self.lambda.powi(path.len() as i32))
    }

    /// Probability that the chain started at `start` follows `path`.
    pub fn path_probability(&self, start: usize, path: &[usize]) -> Result<f64> {
        self.check_path(start, path)?;
        Ok(path.iter().map(|&e| self.edge_prob[e]).product())
    }

    fn walk<R: Rng>(&self, start: usize, length: usize, rng: &mut R) -> SampledPath {
        let mut edges = Vec::with_capacity(length);
        let mut word = Vec::with_capacity(length);
        let mut v = start;
        for _ in 0..length {
            let Some(dist) = &self.steps[v] else { break };
            let e = self.graph.out_edges(v)[dist.sample(rng)];
            edges.push(e);
            let edge = self.graph.edge(e);
            word.extend_from_slice(&edge.word);
            v = edge.dst;
        }
        SampledPath { start, edges, word }
    }

    /// Sample of `length` steps from `start`, deterministic in `seed`.
    pub fn sample_path(&self, start: usize, length: usize, seed: u64) -> SampledPath {
        self.walk(start, length, &mut rng_for(seed, 0))
    }

    /// Sample of the stationary chain: the start vertex is drawn from `pi`.
    pub fn sample_stationary(&self, length: usize, seed: u64) -> SampledPath {
        let mut rng = rng_for(seed, 0);
        let start = self.start.sample(&mut rng);
        self.walk(start, length, &mut rng)
    }
}

/// Times `n >= 1` at which a path sits at a given vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReturnTimeRecord {
    pub target: usize,
    pub times: Vec<usize>,
}

impl ReturnTimeRecord {
    /// `T_j(N) = max { k : R(k, j) <= N }`.
    pub fn count_up_to(&self, n: usize) -> usize {
        self.times.partition_point(|&t| t <= n)
    }
}

pub fn return_times(graph: &GraphStructure, path: &SampledPath, j: usize) -> ReturnTimeRecord {
    let times = path.vertices(graph).enumerate().skip(1).filter(|&(_, v)| v == j).map(|(n, _)| n).collect();
    ReturnTimeRecord { target: j, times }
}

/// A path cut at its visits to a vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Excursions {
    /// Edges before the first visit.
    pub prefix: Vec<usize>,
    /// Loops between consecutive visits.
    pub loops: Vec<Vec<usize>>,
    /// Edges after the last visit.
    pub tail: Vec<usize>,
}

impl Excursions {
    pub fn recompose(&self) -> Vec<usize> {
        let mut out = self.prefix.clone();
        for l in &self.loops {
            out.extend_from_slice(l);
        }
        out.extend_from_slice(&self.tail);
        out
    }
}

pub fn excursion_decompose(graph: &GraphStructure, path: &SampledPath, j: usize) -> Result<Excursions> {
    let visits: Vec<usize> = path.vertices(graph).enumerate().filter(|&(_, v)| v == j).map(|(n, _)| n).collect();
    let (&first, &last) = match (visits.first(), visits.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(Error::NoVisit(j)),
    };
    let loops = visits.windows(2).map(|w| path.edges[w[0]..w[1]].to_vec()).collect();
    Ok(Excursions { prefix: path.edges[..first].to_vec(), loops, tail: path.edges[last..].to_vec() })
}

/// Finite distribution over paths (edge sequences) from the initial vertex.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PathDistribution {
    pub masses: BTreeMap<Vec<usize>, f64>,
}

impl PathDistribution {
    pub fn total(&self) -> f64 {
        self.masses.values().sum()
    }

    pub fn mass(&self, path: &[usize]) -> f64 {
        self.masses.get(path).copied().unwrap_or(0.0)
    }
}

/// Half the L1 distance between two normalized distributions.
pub fn tv_distance(a: &PathDistribution, b: &PathDistribution) -> Result<f64> {
    for d in [a, b] {
        let t = d.total();
        if (t - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized(t));
        }
    }
    let mut sum = 0.0;
    for (k, &x) in &a.masses {
        sum += (x - b.mass(k)).abs();
    }
    for (k, &y) in &b.masses {
        if !a.masses.contains_key(k) {
            sum += y.abs();
        }
    }
    Ok(0.5 * sum)
}

/// Uniform counting measure on the length-`n` paths from the initial vertex.
pub fn counting_measure(graph: &GraphStructure, n: usize) -> PathDistribution {
    let mut paths = Vec::new();
    combing::enumerate_paths(graph, graph.initial(), n, |p| paths.push(p.to_vec()));
    let w = 1.0 / paths.len() as f64;
    PathDistribution { masses: paths.into_iter().map(|p| (p, w)).collect() }
}

/// `e_0 A^r` as a row vector, together with `A_inf 1`.
fn prefix_weights(graph: &GraphStructure, data: &SpectralData, r: usize) -> (f64, DVector<f64>) {
    let a = spectral::transition_matrix(graph).to_real();
    let row_sums = DVector::from_vec(data.a_inf_row_sums());
    let mut v = row_sums.clone();
    for _ in 0..r {
        v = &a * v;
    }
    (v[graph.initial()], row_sums)
}

/// `mu(g0) = e_i A_inf 1 / e_0 A^r A_inf 1` over length-`r` paths `g0` from
/// the initial vertex, `i` the end of `g0`. Paths ending at small-growth
/// vertices get zero mass.
pub fn prefix_distribution(graph: &GraphStructure, data: &SpectralData, r: usize) -> Result<Vec<(Vec<usize>, f64)>> {
    if r >= data.p_star() {
        return Err(Error::InvalidParameter(format!("residue {r} not below p_star = {}", data.p_star())));
    }
    let (denom, row_sums) = prefix_weights(graph, data, r);
    let mut out = Vec::new();
    combing::walk_paths(graph, graph.initial(), r, &mut (), |path, end, _| {
        if path.len() == r {
            let mass = if data.is_large_growth(end) { row_sums[end] / denom } else { 0.0 };
            out.push((path.to_vec(), mass));
        }
    });
    Ok(out)
}

/// Number of length-`k` paths from each vertex, as reals, for `k = 0..=n`.
fn path_counts(graph: &GraphStructure, n: usize) -> Vec<Vec<f64>> {
    let v = graph.vertex_count();
    let mut out = vec![vec![1.0; v]];
    for k in 1..=n {
        let prev = &out[k - 1];
        let mut cur = vec![0.0; v];
        for e in graph.edges() {
            cur[e.src] += prev[e.dst];
        }
        out.push(cur);
    }
    out
}

/// `lambda'_n`: a prefix of length `r = n mod p*` drawn from the prefix
/// distribution, followed by a uniformly chosen path of length `n - r`.
#[derive(Clone, Debug)]
pub struct LambdaPrime {
    graph: GraphStructure,
    pub n: usize,
    pub r: usize,
    prefixes: Vec<(Vec<usize>, f64)>,
    /// `counts[k][v]`: number of length-`k` paths from `v`.
    counts: Vec<Vec<f64>>,
}

pub fn lambda_prime(graph: &GraphStructure, data: &SpectralData, n: usize) -> Result<LambdaPrime> {
    let r = n % data.p_star();
    let prefixes = prefix_distribution(graph, data, r)?;
    Ok(LambdaPrime { graph: graph.clone(), n, r, prefixes, counts: path_counts(graph, n - r) })
}

impl LambdaPrime {
    fn prefix_mass(&self, prefix: &[usize]) -> f64 {
        self.prefixes.iter().find(|(p, _)| p == prefix).map_or(0.0, |(_, m)| *m)
    }

    /// Exact probability of a length-`n` path from the initial vertex.
    pub fn probability(&self, path: &[usize]) -> f64 {
        if path.len() != self.n {
            return 0.0;
        }
        let Some(mid) = self.graph.path_end(self.graph.initial(), &path[..self.r]) else { return 0.0 };
        if self.graph.path_end(mid, &path[self.r..]).is_none() {
            return 0.0;
        }
        let mass = self.prefix_mass(&path[..self.r]);
        if mass == 0.0 {
            return 0.0;
        }
        mass / self.counts[self.n - self.r][mid]
    }

    /// The whole distribution, by enumeration of the length-`n` paths.
    pub fn distribution(&self) -> PathDistribution {
        let mut masses = BTreeMap::new();
        combing::enumerate_paths(&self.graph, self.graph.initial(), self.n, |p| {
            let m = self.probability(p);
            if m > 0.0 {
                masses.insert(p.to_vec(), m);
            }
        });
        PathDistribution { masses }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<usize> {
        let weights = WeightedIndex::new(self.prefixes.iter().map(|(_, m)| *m)).expect("prefix masses sum to one");
        let mut path = self.prefixes[weights.sample(rng)].0.clone();
        let mut v = self.graph.path_end(self.graph.initial(), &path).expect("valid prefix");
        for remaining in (1..=self.n - self.r).rev() {
            path.push(uniform_step(&self.graph, &self.counts, v, remaining, rng));
            v = self.graph.edge(*path.last().unwrap()).dst;
        }
        path
    }
}

/// One step of a uniformly random path of length `remaining` from `v`.
pub(crate) fn uniform_step<R: Rng>(graph: &GraphStructure, counts: &[Vec<f64>], v: usize, remaining: usize, rng: &mut R) -> usize {
    let out = graph.out_edges(v);
    let w = WeightedIndex::new(out.iter().map(|&e| counts[remaining - 1][graph.edge(e).dst])).expect("a path of this length exists");
    out[w.sample(rng)]
}

/// `|| lambda'_n - lambda_n ||_TV` in closed form: both measures are uniform
/// given the prefix, so the distance is `1/2 sum |mu(g0) - #paths through g0 / #paths|`.
pub fn lambda_prime_tv(graph: &GraphStructure, data: &SpectralData, n: usize) -> Result<f64> {
    let r = n % data.p_star();
    let prefixes = prefix_distribution(graph, data, r)?;
    let v0 = graph.initial();
    let total = combing::count_paths(graph, v0, None, n);
    let from_end = combing::path_count_vector(graph, None, n - r);
    let mut sum = 0.0;
    for (path, mass) in prefixes {
        let end = graph.path_end(v0, &path).expect("valid prefix");
        let share = ratio(&from_end[end], &total);
        sum += (mass - share).abs();
    }
    Ok(0.5 * sum)
}

/// `a / b` for big integers, accurate even when both overflow `f64`.
fn ratio(a: &num_bigint::BigUint, b: &num_bigint::BigUint) -> f64 {
    let shift = b.bits().saturating_sub(1000);
    let a = (a >> shift).to_f64().unwrap_or(f64::INFINITY);
    let b = (b >> shift).to_f64().unwrap_or(f64::INFINITY);
    a / b
}
