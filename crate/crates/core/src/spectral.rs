//! Perron-Frobenius data of a transition matrix.
//!
//! The leading eigenvalue and the eigenvectors are obtained component by
//! component: each maximal strongly connected block gets its Perron vectors
//! by shifted power iteration, and these are extended to the vertices
//! upstream (right vector) or downstream (left vector) of the block by a
//! linear solve. Summing over maximal blocks gives the Cesaro projector onto
//! the `lambda`-eigenspace; `p` and `q` are its row and column sums.

use nalgebra::{DMatrix, DVector};
use num_integer::Integer;
use serde::Serialize;

use crate::combing::{ComponentDecomposition, GraphStructure};
use crate::error::{Error, Result};

/// Square nonnegative integer matrix; entry `(i, j)` counts edges `i -> j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionMatrix {
    size: usize,
    entries: Vec<u64>,
}

impl TransitionMatrix {
    pub fn from_rows(rows: &[Vec<u64>]) -> Result<Self> {
        let size = rows.len();
        let mut entries = Vec::with_capacity(size * size);
        for r in rows {
            if r.len() != size {
                return Err(Error::DimensionMismatch { expected: size, found: r.len() });
            }
            entries.extend_from_slice(r);
        }
        Ok(TransitionMatrix { size, entries })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.size + j]
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.entries.chunks(self.size).map(|c| c.to_vec()).collect()
    }

    pub fn to_real(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.size, self.size, |i, j| self.get(i, j) as f64)
    }
}

pub fn transition_matrix(graph: &GraphStructure) -> TransitionMatrix {
    let n = graph.vertex_count();
    let mut entries = vec![0u64; n * n];
    for e in graph.edges() {
        entries[e.src * n + e.dst] += 1;
    }
    TransitionMatrix { size: n, entries }
}

const POWER_TOLERANCE: f64 = 1e-14;
const MAX_ITERATIONS: usize = 1_000_000;

/// Perron data of the irreducible block on `comp`: eigenvalue, right and left
/// vectors (indexed like `comp`, max-normalized).
fn perron_block(a: &TransitionMatrix, comp: &[usize]) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    let m = comp.len();
    let block: Vec<f64> = comp.iter().flat_map(|&i| comp.iter().map(move |&j| a.get(i, j) as f64)).collect();
    if block.iter().all(|&v| v == 0.0) {
        return Ok((0.0, vec![1.0; m], vec![1.0; m]));
    }
    let iterate = |transpose: bool| -> Result<Vec<f64>> {
        let mut x = vec![1.0; m];
        let mut y = vec![0.0; m];
        for _ in 0..MAX_ITERATIONS {
            // y = (B + I) x, which is primitive on an irreducible block
            for i in 0..m {
                let mut s = x[i];
                for j in 0..m {
                    let b = if transpose { block[j * m + i] } else { block[i * m + j] };
                    s += b * x[j];
                }
                y[i] = s;
            }
            let max = y.iter().cloned().fold(0.0, f64::max);
            let mut diff: f64 = 0.0;
            for i in 0..m {
                y[i] /= max;
                diff = diff.max((y[i] - x[i]).abs());
            }
            std::mem::swap(&mut x, &mut y);
            if diff < POWER_TOLERANCE {
                return Ok(x);
            }
        }
        Err(Error::NonConvergence(MAX_ITERATIONS))
    };
    let right = iterate(false)?;
    let left = iterate(true)?;
    let mut num = 0.0;
    for i in 0..m {
        for j in 0..m {
            num += block[i * m + j] * right[j];
        }
    }
    let lambda = num / right.iter().sum::<f64>();
    Ok((lambda, right, left))
}

/// Spectral radius of the block of `a` on an irreducible vertex set.
pub(crate) fn block_radius(a: &TransitionMatrix, comp: &[usize]) -> f64 {
    perron_block(a, comp).map(|(l, _, _)| l).unwrap_or(f64::NAN)
}

/// Components plus the spectral radius of the whole matrix.
fn decompose(a: &TransitionMatrix) -> (ComponentDecomposition, f64) {
    let probe = ComponentDecomposition::analyze(a, 0.0);
    let lambda = probe.radius.iter().cloned().fold(0.0, f64::max);
    (ComponentDecomposition::analyze(a, lambda), lambda)
}

pub fn spectral_radius(a: &TransitionMatrix) -> f64 {
    decompose(a).1
}

/// Structural classification of a transition matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub primitive: bool,
    pub semisimple: bool,
    pub almost_semisimple: bool,
    /// `(component index, period)` for every maximal component.
    pub periods: Vec<(usize, usize)>,
    /// Least `p` with `A^p` semisimple: lcm of the maximal periods.
    pub p_star: usize,
    /// `max ||A^n/lambda^n||` over `n in (2s, 4s]` divided by the same over
    /// `(s, 2s]`, `s` the size. Near 1 for bounded powers, about 2 or more
    /// for a Jordan block at `lambda`. Diagnostic only.
    pub power_growth_ratio: f64,
}

fn component_period(a: &TransitionMatrix, comp: &[usize]) -> usize {
    let n = a.size();
    let mut inside = vec![false; n];
    for &v in comp {
        inside[v] = true;
    }
    let mut level = vec![usize::MAX; n];
    level[comp[0]] = 0;
    let mut queue = std::collections::VecDeque::from([comp[0]]);
    let mut g = 0usize;
    while let Some(u) = queue.pop_front() {
        for v in 0..n {
            if !inside[v] || a.get(u, v) == 0 {
                continue;
            }
            if level[v] == usize::MAX {
                level[v] = level[u] + 1;
                queue.push_back(v);
            } else {
                let diff = (level[u] + 1).abs_diff(level[v]);
                g = g.gcd(&diff);
            }
        }
    }
    g.max(1)
}

fn power_growth_ratio(a: &TransitionMatrix, lambda: f64) -> f64 {
    let s = a.size().max(1);
    let scaled = a.to_real() / lambda;
    let mut power = DMatrix::<f64>::identity(a.size(), a.size());
    let mut early: f64 = 0.0;
    let mut late: f64 = 0.0;
    for n in 1..=4 * s {
        power = &power * &scaled;
        let norm = (0..a.size()).map(|i| power.row(i).iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
        if n > s && n <= 2 * s {
            early = early.max(norm);
        } else if n > 2 * s {
            late = late.max(norm);
        }
    }
    if early > 0.0 {
        late / early
    } else {
        0.0
    }
}

fn classify_with(a: &TransitionMatrix, dec: &ComponentDecomposition, lambda: f64) -> Classification {
    if lambda <= 0.0 {
        return Classification {
            primitive: false,
            semisimple: false,
            almost_semisimple: false,
            periods: Vec::new(),
            p_star: 1,
            power_growth_ratio: f64::NAN,
        };
    }
    let periods: Vec<(usize, usize)> = dec
        .components
        .iter()
        .enumerate()
        .filter(|(ci, _)| dec.maximal[*ci])
        .map(|(ci, c)| (ci, component_period(a, c)))
        .collect();
    let almost_semisimple = dec.is_almost_semisimple();
    let semisimple = almost_semisimple && periods.iter().all(|&(_, p)| p == 1);
    let irreducible = dec.components.len() == 1;
    let primitive = irreducible && semisimple;
    let p_star = periods.iter().fold(1usize, |acc, &(_, p)| acc.lcm(&p));
    Classification {
        primitive,
        semisimple,
        almost_semisimple,
        periods,
        p_star,
        power_growth_ratio: power_growth_ratio(a, lambda),
    }
}

/// Primitive / semisimple / almost-semisimple flags and the semisimplifying power.
pub fn classify(a: &TransitionMatrix) -> Classification {
    let (dec, lambda) = decompose(a);
    classify_with(a, &dec, lambda)
}

/// Growth constants `lim #Omega^{p m + r} / lambda^{p m + r}`, one per residue `r`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthConstant {
    pub p_star: usize,
    pub per_residue: Vec<f64>,
}

impl GrowthConstant {
    /// The single constant `c`, available when `p_star = 1`.
    pub fn value(&self) -> Option<f64> {
        (self.p_star == 1).then(|| self.per_residue[0])
    }
}

/// Perron-Frobenius data of an almost semisimple transition matrix.
#[derive(Clone, Debug)]
pub struct SpectralData {
    pub lambda: f64,
    /// Right eigenvector `p = Pi 1`, positive exactly on large-growth vertices.
    pub p: Vec<f64>,
    /// Left eigenvector, supported on vertices reachable from maximal components.
    pub q: Vec<f64>,
    /// Stationary vector `pi_i = p_i q_i`.
    pub pi: Vec<f64>,
    pub classification: Classification,
    pub components: ComponentDecomposition,
    /// `lim A^{p* n} / lambda^{p* n}`.
    pub a_inf: DMatrix<f64>,
    pub growth: GrowthConstant,
}

impl SpectralData {
    pub fn p_star(&self) -> usize {
        self.classification.p_star
    }

    pub fn is_large_growth(&self, v: usize) -> bool {
        self.components.large_growth[v]
    }

    /// `A_inf 1`.
    pub fn a_inf_row_sums(&self) -> Vec<f64> {
        (0..self.a_inf.nrows()).map(|i| self.a_inf.row(i).sum()).collect()
    }
}

fn reach(a: &TransitionMatrix, start: &[usize], forward: bool) -> Vec<bool> {
    let n = a.size();
    let mut seen = vec![false; n];
    let mut stack: Vec<usize> = start.to_vec();
    for &s in start {
        seen[s] = true;
    }
    while let Some(v) = stack.pop() {
        for w in 0..n {
            let edge = if forward { a.get(v, w) } else { a.get(w, v) };
            if edge > 0 && !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen
}

/// Solves `(lambda I - A_SS) x = rhs` on the vertex subset `set`.
fn solve_shifted(a: &TransitionMatrix, set: &[usize], lambda: f64, rhs: &[f64], transpose: bool) -> Vec<f64> {
    let k = set.len();
    let m = DMatrix::from_fn(k, k, |i, j| {
        let aij = if transpose { a.get(set[j], set[i]) } else { a.get(set[i], set[j]) } as f64;
        if i == j {
            lambda - aij
        } else {
            -aij
        }
    });
    m.lu().solve(&DVector::from_column_slice(rhs)).expect("lambda is not an eigenvalue of a non-maximal block").as_slice().to_vec()
}

/// Right and left `lambda`-eigenvectors attached to one maximal component,
/// normalized so that `l . r = 1`.
fn component_vectors(a: &TransitionMatrix, comp: &[usize], lambda: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = a.size();
    let (_, right_c, left_c) = perron_block(a, comp)?;
    let mut in_comp = vec![false; n];
    for &v in comp {
        in_comp[v] = true;
    }
    let mut r = vec![0.0; n];
    let mut l = vec![0.0; n];
    for (k, &v) in comp.iter().enumerate() {
        r[v] = right_c[k];
        l[v] = left_c[k];
    }
    let upstream: Vec<usize> = reach(a, comp, false).iter().enumerate().filter(|&(v, &s)| s && !in_comp[v]).map(|(v, _)| v).collect();
    if !upstream.is_empty() {
        let rhs: Vec<f64> = upstream.iter().map(|&u| comp.iter().map(|&c| a.get(u, c) as f64 * r[c]).sum()).collect();
        for (k, x) in solve_shifted(a, &upstream, lambda, &rhs, false).into_iter().enumerate() {
            r[upstream[k]] = x;
        }
    }
    let downstream: Vec<usize> = reach(a, comp, true).iter().enumerate().filter(|&(v, &s)| s && !in_comp[v]).map(|(v, _)| v).collect();
    if !downstream.is_empty() {
        let rhs: Vec<f64> = downstream.iter().map(|&d| comp.iter().map(|&c| l[c] * a.get(c, d) as f64).sum()).collect();
        for (k, x) in solve_shifted(a, &downstream, lambda, &rhs, true).into_iter().enumerate() {
            l[downstream[k]] = x;
        }
    }
    let dot: f64 = comp.iter().map(|&c| l[c] * r[c]).sum();
    for v in l.iter_mut() {
        *v /= dot;
    }
    Ok((r, l))
}

fn a_infinity_with(a: &TransitionMatrix, lambda: f64, p_star: usize) -> Result<DMatrix<f64>> {
    let step = a.to_real() / lambda;
    let mut base = DMatrix::<f64>::identity(a.size(), a.size());
    for _ in 0..p_star {
        base = &base * &step;
    }
    let mut cur = base.clone();
    for _ in 0..MAX_ITERATIONS {
        let next = &cur * &base;
        let diff = (&next - &cur).amax();
        cur = next;
        if diff < 1e-12 {
            return Ok(cur);
        }
    }
    Err(Error::NonConvergence(MAX_ITERATIONS))
}

/// `A_inf = lim (A^{p*} / lambda^{p*})^n`, by direct iteration.
pub fn a_infinity(a: &TransitionMatrix, p_star: usize) -> Result<DMatrix<f64>> {
    if p_star == 0 {
        return Err(Error::InvalidParameter("p_star must be positive".into()));
    }
    let lambda = spectral_radius(a);
    if lambda <= 0.0 {
        return Err(Error::Nilpotent);
    }
    a_infinity_with(a, lambda, p_star)
}

fn growth_from(a: &TransitionMatrix, lambda: f64, a_inf: &DMatrix<f64>, p_star: usize) -> GrowthConstant {
    let n = a.size();
    let ones = DVector::from_element(n, 1.0);
    let mut v = a_inf * &ones;
    let mut per_residue = Vec::with_capacity(p_star);
    for r in 0..p_star {
        if r > 0 {
            v = (a.to_real() * v) / lambda;
        }
        per_residue.push(v.sum());
    }
    GrowthConstant { p_star, per_residue }
}

/// `c = lim #Omega^n / lambda^n` along each residue class mod `p_star`.
pub fn growth_constant(a: &TransitionMatrix, data: &SpectralData) -> GrowthConstant {
    growth_from(a, data.lambda, &data.a_inf, data.p_star())
}

/// Leading eigenvalue, canonical eigenvectors, classification, `A_inf` and growth constants.
pub fn perron_data(a: &TransitionMatrix) -> Result<SpectralData> {
    let (components, lambda) = decompose(a);
    if lambda <= 0.0 {
        return Err(Error::Nilpotent);
    }
    if let Some(&(from, to)) = components.maximal_chains.first() {
        return Err(Error::NotAlmostSemisimple { from, to });
    }
    let n = a.size();
    let mut p = vec![0.0; n];
    let mut q_raw = vec![0.0; n];
    for comp in components.maximal_components() {
        let (r, l) = component_vectors(a, comp, lambda)?;
        let l_mass: f64 = l.iter().sum();
        let r_mass: f64 = r.iter().sum();
        for i in 0..n {
            p[i] += r[i] * l_mass;
            q_raw[i] += l[i] * r_mass;
        }
    }
    let norm: f64 = p.iter().zip(&q_raw).map(|(a, b)| a * b).sum();
    let q: Vec<f64> = q_raw.iter().map(|v| v / norm).collect();
    let pi: Vec<f64> = p.iter().zip(&q).map(|(a, b)| a * b).collect();
    let classification = classify_with(a, &components, lambda);
    let a_inf = a_infinity_with(a, lambda, classification.p_star)?;
    let growth = growth_from(a, lambda, &a_inf, classification.p_star);
    Ok(SpectralData { lambda, p, q, pi, classification, components, a_inf, growth })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tm(rows: &[&[u64]]) -> TransitionMatrix {
        TransitionMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn f2() -> TransitionMatrix {
        tm(&[
            &[0, 1, 1, 1, 1],
            &[0, 1, 0, 1, 1],
            &[0, 0, 1, 1, 1],
            &[0, 1, 1, 1, 0],
            &[0, 1, 1, 0, 1],
        ])
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn single_loop() {
        let d = perron_data(&tm(&[&[1]])).unwrap();
        assert!((d.lambda - 1.0).abs() < 1e-14);
        assert!(close(&d.p, &[1.0], 1e-12) && close(&d.q, &[1.0], 1e-12) && close(&d.pi, &[1.0], 1e-12));
        assert!(d.classification.primitive);
        assert!((d.a_inf[(0, 0)] - 1.0).abs() < 1e-12);
        assert!((d.growth.value().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_cycle() {
        let a = tm(&[&[0, 1], &[1, 0]]);
        let d = perron_data(&a).unwrap();
        assert!((d.lambda - 1.0).abs() < 1e-14);
        assert!((d.p[0] - d.p[1]).abs() < 1e-12 && (d.q[0] - d.q[1]).abs() < 1e-12);
        assert!(close(&d.pi, &[0.5, 0.5], 1e-12));
        let c = &d.classification;
        assert!(!c.primitive && !c.semisimple && c.almost_semisimple);
        assert_eq!(c.p_star, 2);
        let inf = a_infinity(&a, 2).unwrap();
        assert!((inf - DMatrix::<f64>::identity(2, 2)).amax() < 1e-12);
        assert!(matches!(a_infinity(&a, 1), Err(Error::NonConvergence(_))));
    }

    #[test]
    fn jordan_block_rejected() {
        let a = tm(&[&[1, 1], &[0, 1]]);
        assert!(!classify(&a).almost_semisimple);
        assert!(classify(&a).power_growth_ratio > 1.5);
        assert!(matches!(perron_data(&a), Err(Error::NotAlmostSemisimple { .. })));
    }

    #[test]
    fn nilpotent_rejected() {
        assert!(matches!(perron_data(&tm(&[&[0, 1], &[0, 0]])), Err(Error::Nilpotent)));
    }

    #[test]
    fn all_positive_is_primitive() {
        let c = classify(&tm(&[&[1, 1], &[1, 1]]));
        assert!(c.primitive && c.semisimple && c.almost_semisimple);
        assert_eq!(c.p_star, 1);
    }

    #[test]
    fn free_group_data() {
        let a = f2();
        let d = perron_data(&a).unwrap();
        assert!((d.lambda - 3.0).abs() < 1e-12);
        assert!(close(&d.p, &[4.0 / 3.0, 1.0, 1.0, 1.0, 1.0], 1e-12));
        assert!(close(&d.q, &[0.0, 0.25, 0.25, 0.25, 0.25], 1e-12));
        assert!(close(&d.pi, &[0.0, 0.25, 0.25, 0.25, 0.25], 1e-12));
        let c = &d.classification;
        assert!(!c.primitive && c.semisimple && c.almost_semisimple);
        assert_eq!(c.p_star, 1);
        assert!((d.growth.value().unwrap() - 16.0 / 3.0).abs() < 1e-10);
        // A_inf = p q^T
        for i in 0..5 {
            for j in 0..5 {
                assert!((d.a_inf[(i, j)] - d.p[i] * d.q[j]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn four_letter_block() {
        let a = tm(&[&[1, 0, 1, 1], &[0, 1, 1, 1], &[1, 1, 1, 0], &[1, 1, 0, 1]]);
        let d = perron_data(&a).unwrap();
        assert!(d.classification.primitive);
        assert!((d.growth.value().unwrap() - 4.0).abs() < 1e-10);
        assert!(close(&d.p, &[1.0; 4], 1e-12));
        assert!(close(&d.q, &[0.25; 4], 1e-12));
    }

    #[test]
    fn period_two_with_feeder() {
        // 0 -> 1, 1 <-> 2 (twice from 1 to 2)
        let a = tm(&[&[0, 1, 0], &[0, 0, 2], &[0, 1, 0]]);
        let d = perron_data(&a).unwrap();
        assert!((d.lambda - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(d.p_star(), 2);
        assert!(d.classification.almost_semisimple && !d.classification.semisimple);
        assert_eq!(d.growth.per_residue.len(), 2);
        let mut av = a.to_real();
        for _ in 0..39 {
            av = &av * a.to_real();
        }
        // A^40 / lambda^40 against A_inf
        let scaled = av / d.lambda.powi(40);
        assert!((scaled - &d.a_inf).amax() < 1e-9);
    }

    #[test]
    fn two_maximal_components_side_by_side() {
        // two disjoint self-loops fed by a start vertex
        let a = tm(&[&[0, 1, 1], &[0, 1, 0], &[0, 0, 1]]);
        let d = perron_data(&a).unwrap();
        assert!((d.lambda - 1.0).abs() < 1e-12);
        let s: f64 = d.pi.iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
        let pq: f64 = d.p.iter().zip(&d.q).map(|(a, b)| a * b).sum();
        assert!((pq - 1.0).abs() < 1e-12);
        assert!(d.classification.semisimple && !d.classification.primitive);
    }
}
