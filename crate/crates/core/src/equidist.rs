//! Orbit averages of trigonometric polynomials on the torus.
//!
//! Exact averages come from one depth-first traversal of the path tree that
//! tabulates, for every depth and end vertex, the sum of every character
//! over the paths seen. Spherical, Cesaro, counting and Markov-weighted
//! averages are then read off the table.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{GeneratorSystem, ModMatrix, TorusPoint};
use crate::combing::{self, Edge, GraphStructure, PathState};
use crate::error::{Error, Result};
use crate::markov::{self, MarkovModel};
use crate::spectral::SpectralData;

pub const DEFAULT_BUDGET: u128 = 10_000_000;
const PREFIX_DEPTH: usize = 4;
const MC_CHUNK: usize = 4096;

/// One term `coeff * chi_k` of a trigonometric polynomial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub k: Vec<i64>,
    pub coeff: Complex64,
}

/// Trigonometric polynomial `sum_k c_k chi_k`, `chi_k(x) = exp(2 pi i <k, x>)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub terms: Vec<Term>,
}

impl TestFunction {
    pub fn new(terms: Vec<Term>) -> Result<Self> {
        let Some(first) = terms.first() else {
            return Err(Error::InvalidParameter("test function has no terms".into()));
        };
        let d = first.k.len();
        if let Some(t) = terms.iter().find(|t| t.k.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, found: t.k.len() });
        }
        Ok(TestFunction { terms })
    }

    pub fn character(k: Vec<i64>) -> Self {
        TestFunction { terms: vec![Term { k, coeff: Complex64::new(1.0, 0.0) }] }
    }

    pub fn constant(dim: usize, c: Complex64) -> Self {
        TestFunction { terms: vec![Term { k: vec![0; dim], coeff: c }] }
    }

    pub fn dim(&self) -> usize {
        self.terms[0].k.len()
    }

    /// Distinct frequencies, in order of first appearance.
    pub fn frequencies(&self) -> Vec<Vec<i64>> {
        let mut out: Vec<Vec<i64>> = Vec::new();
        for t in &self.terms {
            if !out.contains(&t.k) {
                out.push(t.k.clone());
            }
        }
        out
    }

    /// Coefficients aligned with [`TestFunction::frequencies`].
    fn coefficients(&self, freqs: &[Vec<i64>]) -> Vec<Complex64> {
        let mut c = vec![Complex64::new(0.0, 0.0); freqs.len()];
        for t in &self.terms {
            let i = freqs.iter().position(|k| *k == t.k).expect("frequency listed");
            c[i] += t.coeff;
        }
        c
    }

    pub fn evaluate(&self, x: &[u64]) -> Complex64 {
        self.terms.iter().map(|t| t.coeff * character(&t.k, x)).sum()
    }

    fn check_dim(&self, d: usize) -> Result<()> {
        if self.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: self.dim() });
        }
        Ok(())
    }
}

impl std::fmt::Display for TestFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let k: Vec<String> = t.k.iter().map(|v| v.to_string()).collect();
            write!(f, "({}{:+}i)chi({})", t.coeff.re, t.coeff.im, k.join(","))?;
        }
        Ok(())
    }
}

/// Integral of `f` against Haar measure: the coefficient of `chi_0`.
pub fn haar_integral(f: &TestFunction) -> Complex64 {
    f.terms.iter().filter(|t| t.k.iter().all(|&v| v == 0)).map(|t| t.coeff).sum()
}

/// `chi_k(x)`. The phase `<k, x>` is computed exactly mod 1 in 64-bit fixed
/// point and read as a signed fraction, so `chi_{-k} = conj(chi_k)` exactly.
#[inline]
pub fn character(k: &[i64], x: &[u64]) -> Complex64 {
    let mut phase = 0u64;
    for (kj, xj) in k.iter().zip(x) {
        phase = phase.wrapping_add((*kj as u64).wrapping_mul(*xj));
    }
    let angle = (phase as i64) as f64 * (TAU / 18446744073709551616.0);
    let (s, c) = angle.sin_cos();
    Complex64::new(c, s)
}

/// Which orbit point a path `w` contributes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// `w^{-1} x`
    #[default]
    Inverse,
    /// `w x`
    Forward,
}

/// Neumaier compensated sum.
#[derive(Clone, Copy, Debug, Default)]
struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    #[inline]
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Orbit point along the current path, maintained incrementally.
struct OrbitState<'a> {
    sys: &'a GeneratorSystem,
    direction: Direction,
    x: Vec<u64>,
    /// Stacked points (inverse) or stacked product matrices (forward).
    stack: Vec<u64>,
    point: Vec<u64>,
    depth: usize,
    scratch: Vec<u64>,
}

impl<'a> OrbitState<'a> {
    fn new(sys: &'a GeneratorSystem, x: &TorusPoint, direction: Direction) -> Self {
        let d = sys.dim();
        let stack = match direction {
            Direction::Inverse => x.coords().to_vec(),
            Direction::Forward => ModMatrix::identity(d).entries().to_vec(),
        };
        OrbitState { sys, direction, x: x.coords().to_vec(), stack, point: x.coords().to_vec(), depth: 0, scratch: Vec::new() }
    }

    fn point(&self) -> &[u64] {
        &self.point
    }

    fn refresh_point(&mut self) {
        let d = self.sys.dim();
        match self.direction {
            Direction::Inverse => self.point.copy_from_slice(&self.stack[self.depth * d..(self.depth + 1) * d]),
            Direction::Forward => {
                let m = &self.stack[self.depth * d * d..(self.depth + 1) * d * d];
                for i in 0..d {
                    let mut acc = 0u64;
                    for j in 0..d {
                        acc = acc.wrapping_add(m[i * d + j].wrapping_mul(self.x[j]));
                    }
                    self.point[i] = acc;
                }
            }
        }
    }
}

impl PathState for OrbitState<'_> {
    fn push(&mut self, _: &GraphStructure, edge: &Edge) {
        let d = self.sys.dim();
        match self.direction {
            Direction::Inverse => {
                let mut cur = self.stack[self.depth * d..(self.depth + 1) * d].to_vec();
                let mut next = vec![0u64; d];
                for &s in &edge.word {
                    self.sys.inverse_mod(s).apply(&cur, &mut next);
                    std::mem::swap(&mut cur, &mut next);
                }
                self.stack.extend_from_slice(&cur);
            }
            Direction::Forward => {
                let dd = d * d;
                let mut cur = ModMatrix::from_entries(d, self.stack[self.depth * dd..(self.depth + 1) * dd].to_vec());
                self.scratch.resize(dd, 0);
                for &s in &edge.word {
                    cur.mul_into(self.sys.forward_mod(s), &mut self.scratch);
                    cur = ModMatrix::from_entries(d, self.scratch.clone());
                }
                self.stack.extend_from_slice(cur.entries());
            }
        }
        self.depth += 1;
        self.refresh_point();
    }

    fn pop(&mut self) {
        let d = self.sys.dim();
        let width = match self.direction {
            Direction::Inverse => d,
            Direction::Forward => d * d,
        };
        self.stack.truncate(self.depth * width);
        self.depth -= 1;
        self.refresh_point();
    }
}

/// Per-depth, per-end-vertex character sums over every path of length
/// `<= depth` from one source vertex.
#[derive(Clone, Debug)]
pub struct OrbitTable {
    pub source: usize,
    pub depth: usize,
    vertices: usize,
    freqs: Vec<Vec<i64>>,
    /// `[n][v][k]` flattened.
    sums: Vec<Complex64>,
    /// `[n][v]` flattened.
    counts: Vec<u64>,
}

struct Accumulator {
    re: Vec<Compensated>,
    im: Vec<Compensated>,
    counts: Vec<u64>,
}

/// Number of paths of each length `0..=n` from `source`, saturating.
pub fn path_counts_from(graph: &GraphStructure, source: usize, n: usize) -> Vec<u128> {
    use num_traits::ToPrimitive;
    (0..=n).map(|k| combing::count_paths(graph, source, None, k).to_u128().unwrap_or(u128::MAX)).collect()
}

fn check_budget(required: u128, budget: u128) -> Result<()> {
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    Ok(())
}

/// Options for exact enumeration.
#[derive(Clone, Copy, Debug)]
pub struct Enumeration {
    pub budget: u128,
    pub direction: Direction,
}

impl Default for Enumeration {
    fn default() -> Self {
        Enumeration { budget: DEFAULT_BUDGET, direction: Direction::Inverse }
    }
}

impl OrbitTable {
    pub fn build(
        graph: &GraphStructure,
        x: &TorusPoint,
        freqs: &[Vec<i64>],
        source: usize,
        depth: usize,
        opts: Enumeration,
    ) -> Result<OrbitTable> {
        let sys = graph.system().as_ref();
        if x.dim() != sys.dim() {
            return Err(Error::DimensionMismatch { expected: sys.dim(), found: x.dim() });
        }
        if let Some(k) = freqs.iter().find(|k| k.len() != sys.dim()) {
            return Err(Error::DimensionMismatch { expected: sys.dim(), found: k.len() });
        }
        let total: u128 = path_counts_from(graph, source, depth).iter().fold(0u128, |a, &b| a.saturating_add(b));
        check_budget(total, opts.budget)?;
        let v = graph.vertex_count();
        let kc = freqs.len();
        let cells = (depth + 1) * v;
        let acc = combing::fold_paths(
            graph,
            source,
            depth,
            PREFIX_DEPTH,
            || OrbitState::new(sys, x, opts.direction),
            || Accumulator { re: vec![Compensated::default(); cells * kc], im: vec![Compensated::default(); cells * kc], counts: vec![0; cells] },
            |acc, n, end, st| {
                let cell = n * v + end;
                acc.counts[cell] += 1;
                let pt = st.point();
                for (ki, k) in freqs.iter().enumerate() {
                    let z = character(k, pt);
                    acc.re[cell * kc + ki].add(z.re);
                    acc.im[cell * kc + ki].add(z.im);
                }
            },
            |acc, part| {
                for i in 0..acc.re.len() {
                    acc.re[i].add(part.re[i].value());
                    acc.im[i].add(part.im[i].value());
                }
                for i in 0..acc.counts.len() {
                    acc.counts[i] += part.counts[i];
                }
            },
        );
        let sums = acc.re.iter().zip(&acc.im).map(|(r, i)| Complex64::new(r.value(), i.value())).collect();
        Ok(OrbitTable { source, depth, vertices: v, freqs: freqs.to_vec(), sums, counts: acc.counts })
    }

    pub fn count(&self, n: usize, end: Option<usize>) -> u64 {
        match end {
            Some(j) => self.counts[n * self.vertices + j],
            None => (0..self.vertices).map(|j| self.counts[n * self.vertices + j]).sum(),
        }
    }

    /// `sum f(orbit point)` over length-`n` paths, ending at `end` if given.
    pub fn sum(&self, f: &TestFunction, n: usize, end: Option<usize>) -> Complex64 {
        let coeffs = f.coefficients(&f.frequencies());
        let kc = self.freqs.len();
        let ends: Vec<usize> = match end {
            Some(j) => vec![j],
            None => (0..self.vertices).collect(),
        };
        let mut total = Complex64::new(0.0, 0.0);
        for (fk, c) in f.frequencies().iter().zip(coeffs) {
            let ki = self.freqs.iter().position(|k| k == fk).expect("frequency tabulated");
            let mut s = Complex64::new(0.0, 0.0);
            for &j in &ends {
                s += self.sums[(n * self.vertices + j) * kc + ki];
            }
            total += c * s;
        }
        total
    }

    pub fn spherical(&self, f: &TestFunction, n: usize) -> Complex64 {
        self.sum(f, n, None) / self.count(n, None) as f64
    }
}

/// `(1/#S_n) sum_{|w| = n} f(w^{-1} x)` by exact enumeration from the initial vertex.
pub fn spherical_average(graph: &GraphStructure, x: &TorusPoint, f: &TestFunction, n: usize, opts: Enumeration) -> Result<Complex64> {
    f.check_dim(x.dim())?;
    let t = OrbitTable::build(graph, x, &f.frequencies(), graph.initial(), n, opts)?;
    Ok(t.spherical(f, n))
}

/// Mean of the spherical averages for `n = 1..=big_n`.
pub fn cesaro_average(graph: &GraphStructure, x: &TorusPoint, f: &TestFunction, big_n: usize, opts: Enumeration) -> Result<Complex64> {
    if big_n == 0 {
        return Err(Error::InvalidParameter("Cesaro average needs N >= 1".into()));
    }
    f.check_dim(x.dim())?;
    let t = OrbitTable::build(graph, x, &f.frequencies(), graph.initial(), big_n, opts)?;
    Ok((1..=big_n).map(|n| t.spherical(f, n)).sum::<Complex64>() / big_n as f64)
}

/// A finite-`N` value together with the limit the theory predicts for it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitComparison {
    pub value: Complex64,
    pub predicted: Option<Complex64>,
    /// Values at `N = 1, 2, ...` up to the requested `N`.
    pub series: Vec<Complex64>,
}

fn running_means(terms: impl Iterator<Item = Complex64>) -> Vec<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    terms
        .enumerate()
        .map(|(i, t)| {
            acc += t;
            acc / (i + 1) as f64
        })
        .collect()
}

fn tables_for_sources(
    graph: &GraphStructure,
    x: &TorusPoint,
    f: &TestFunction,
    sources: &[usize],
    big_n: usize,
    opts: Enumeration,
) -> Result<Vec<OrbitTable>> {
    let total: u128 = sources
        .iter()
        .flat_map(|&s| path_counts_from(graph, s, big_n))
        .fold(0u128, |a, b| a.saturating_add(b));
    check_budget(total, opts.budget)?;
    sources.iter().map(|&s| OrbitTable::build(graph, x, &f.frequencies(), s, big_n, opts)).collect()
}

fn vertex_set(v: usize, choice: Option<usize>) -> Result<Vec<usize>> {
    match choice {
        Some(i) if i >= v => Err(Error::InvalidParameter(format!("vertex {i} out of range"))),
        Some(i) => Ok(vec![i]),
        None => Ok((0..v).collect()),
    }
}

/// Counting operator `kappa_N` (all paths of the graph) or its restriction
/// `kappa_N^{i,j}` to paths from `source` to `target`; a missing endpoint is
/// summed over. On primitive structures the predicted limit
/// `sum p_i q_j / c * int f` is attached.
#[allow(clippy::too_many_arguments)]
pub fn kappa_average(
    graph: &GraphStructure,
    data: &SpectralData,
    x: &TorusPoint,
    f: &TestFunction,
    big_n: usize,
    source: Option<usize>,
    target: Option<usize>,
    opts: Enumeration,
) -> Result<LimitComparison> {
    if big_n == 0 {
        return Err(Error::InvalidParameter("counting average needs N >= 1".into()));
    }
    f.check_dim(x.dim())?;
    let v = graph.vertex_count();
    let sources = vertex_set(v, source)?;
    let targets = vertex_set(v, target)?;
    let all: Vec<usize> = (0..v).collect();
    // #Omega^n counts paths from every vertex
    let omega: Vec<u128> = (0..=big_n)
        .map(|n| all.iter().map(|&s| path_counts_from(graph, s, n)[n]).fold(0u128, |a, b| a.saturating_add(b)))
        .collect();
    let tables = tables_for_sources(graph, x, f, &sources, big_n, opts)?;
    let series = running_means((1..=big_n).map(|n| {
        let mut s = Complex64::new(0.0, 0.0);
        for t in &tables {
            for &j in &targets {
                s += t.sum(f, n, Some(j));
            }
        }
        s / omega[n] as f64
    }));
    let predicted = data.growth.value().filter(|_| data.classification.primitive).map(|c| {
        let ps: f64 = sources.iter().map(|&i| data.p[i]).sum();
        let qs: f64 = targets.iter().map(|&j| data.q[j]).sum();
        haar_integral(f) * (ps * qs / c)
    });
    Ok(LimitComparison { value: series[big_n - 1], predicted, series })
}

/// `c_N^{mu,i,j}(f) = (1/N) sum_{n <= N} sum_{w in Omega^n_{i,j}} mu(w) f(w^{-1} x)`,
/// with the predicted limit `pi_i pi_j int f` on primitive structures.
#[allow(clippy::too_many_arguments)]
pub fn markov_cesaro(
    model: &MarkovModel,
    data: &SpectralData,
    x: &TorusPoint,
    f: &TestFunction,
    big_n: usize,
    i: usize,
    j: usize,
    opts: Enumeration,
) -> Result<LimitComparison> {
    if big_n == 0 {
        return Err(Error::InvalidParameter("Cesaro average needs N >= 1".into()));
    }
    f.check_dim(x.dim())?;
    let graph = model.graph();
    vertex_set(graph.vertex_count(), Some(i))?;
    vertex_set(graph.vertex_count(), Some(j))?;
    let t = OrbitTable::build(graph, x, &f.frequencies(), i, big_n, opts)?;
    let series = running_means((1..=big_n).map(|n| t.sum(f, n, Some(j)) * (data.q[i] * data.p[j] / data.lambda.powi(n as i32))));
    let predicted = data.classification.primitive.then(|| haar_integral(f) * (data.pi[i] * data.pi[j]));
    Ok(LimitComparison { value: series[big_n - 1], predicted, series })
}

/// Monte Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: Complex64,
    pub stderr: f64,
    pub samples: usize,
}

fn orbit_point(sys: &GeneratorSystem, word: &[usize], x: &TorusPoint, direction: Direction) -> TorusPoint {
    sys.act_indices(word, x, direction == Direction::Inverse)
}

/// Average of `f` over `lambda'_n`, estimated from `samples` draws. Chunks of
/// draws use independent streams of `seed`, so the result does not depend on
/// the number of threads.
#[allow(clippy::too_many_arguments)]
pub fn mc_spherical(
    graph: &GraphStructure,
    data: &SpectralData,
    x: &TorusPoint,
    f: &TestFunction,
    n: usize,
    samples: usize,
    seed: u64,
    direction: Direction,
) -> Result<Estimate> {
    if samples == 0 {
        return Err(Error::InvalidParameter("at least one sample is needed".into()));
    }
    f.check_dim(x.dim())?;
    let lp = markov::lambda_prime(graph, data, n)?;
    let sys = graph.system().as_ref();
    let chunks = samples.div_ceil(MC_CHUNK);
    let parts: Vec<(Complex64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = markov::rng_for(seed, c as u64);
            let size = MC_CHUNK.min(samples - c * MC_CHUNK);
            let values: Vec<Complex64> = (0..size)
                .map(|_| {
                    let path = lp.sample(&mut rng);
                    let word = graph.path_word(&path);
                    f.evaluate(orbit_point(sys, &word, x, direction).coords())
                })
                .collect();
            let sum: Complex64 = values.iter().sum();
            let sq: f64 = values.iter().map(|z| z.norm_sqr()).sum();
            (sum, sq)
        })
        .collect();
    let sum: Complex64 = parts.iter().map(|p| p.0).sum();
    let sq: f64 = parts.iter().map(|p| p.1).sum();
    let s = samples as f64;
    let mean = sum / s;
    let stderr = if samples > 1 { ((sq - s * mean.norm_sqr()).max(0.0) / (s - 1.0) / s).sqrt() } else { 0.0 };
    Ok(Estimate { mean, stderr, samples })
}

/// `(1/N) sum_{n=1..N} f(gamma(n)^{-1} x)` along one Markov ray from the initial vertex.
pub fn random_geodesic_average(model: &MarkovModel, x: &TorusPoint, f: &TestFunction, big_n: usize, seed: u64, direction: Direction) -> Result<Complex64> {
    if big_n == 0 {
        return Err(Error::InvalidParameter("ray length must be positive".into()));
    }
    f.check_dim(x.dim())?;
    let graph = model.graph();
    let ray = model.sample_path(graph.initial(), big_n, seed);
    if ray.edges.len() < big_n {
        return Err(Error::InvalidPath("ray reached a vertex without outgoing edges".into()));
    }
    let mut state = OrbitState::new(graph.system().as_ref(), x, direction);
    let mut sum = Complex64::new(0.0, 0.0);
    for &e in &ray.edges {
        state.push(graph, graph.edge(e));
        sum += f.evaluate(state.point());
    }
    Ok(sum / big_n as f64)
}

/// How a row of an averaging report was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Mc,
    Auto,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AveragingRow {
    pub n: usize,
    pub path_count: u128,
    pub spherical: Complex64,
    /// Running mean of `spherical` over `1..=n`.
    pub cesaro: Complex64,
    pub mode: Mode,
    pub stderr: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AveragingReport {
    pub basepoint: TorusPoint,
    pub function: TestFunction,
    pub direction: Direction,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub rows: Vec<AveragingRow>,
    /// Seconds; filled in only on request so reports stay reproducible.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct AveragingPlan {
    pub mode: Mode,
    pub budget: u128,
    pub samples: usize,
    pub seed: u64,
    pub direction: Direction,
}

/// Spherical and Cesaro averages for `n = 1..=big_n`. In `Auto` mode the
/// longest prefix of radii whose enumeration fits the budget is done exactly
/// and the rest by Monte Carlo.
pub fn averaging_report(
    graph: &GraphStructure,
    data: Option<&SpectralData>,
    x: &TorusPoint,
    f: &TestFunction,
    big_n: usize,
    plan: AveragingPlan,
) -> Result<AveragingReport> {
    f.check_dim(x.dim())?;
    let counts = path_counts_from(graph, graph.initial(), big_n);
    let mut exact_upto = 0usize;
    let mut cumulative = 0u128;
    for (n, &c) in counts.iter().enumerate() {
        cumulative = cumulative.saturating_add(c);
        if cumulative > plan.budget {
            break;
        }
        exact_upto = n;
    }
    let exact_upto = match plan.mode {
        Mode::Exact => {
            let total = counts.iter().fold(0u128, |a, &b| a.saturating_add(b));
            check_budget(total, plan.budget)?;
            big_n
        }
        Mode::Mc => 0,
        Mode::Auto => exact_upto,
    };
    let opts = Enumeration { budget: plan.budget, direction: plan.direction };
    let table = OrbitTable::build(graph, x, &f.frequencies(), graph.initial(), exact_upto, opts)?;
    let mut rows = Vec::with_capacity(big_n);
    let mut running = Complex64::new(0.0, 0.0);
    let mut used_mc = false;
    for n in 1..=big_n {
        let (value, mode, stderr) = if n <= exact_upto {
            (table.spherical(f, n), Mode::Exact, None)
        } else {
            let data = data.ok_or_else(|| Error::InvalidParameter("Monte Carlo mode needs spectral data".into()))?;
            used_mc = true;
            let est = mc_spherical(graph, data, x, f, n, plan.samples, plan.seed.wrapping_add(n as u64), plan.direction)?;
            (est.mean, Mode::Mc, Some(est.stderr))
        };
        running += value;
        rows.push(AveragingRow { n, path_count: counts[n], spherical: value, cesaro: running / n as f64, mode, stderr });
    }
    Ok(AveragingReport {
        basepoint: x.clone(),
        function: f.clone(),
        direction: plan.direction,
        seed: used_mc.then_some(plan.seed),
        samples: used_mc.then_some(plan.samples),
        rows,
        wall_time: None,
    })
}
