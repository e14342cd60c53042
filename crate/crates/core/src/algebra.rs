//! Exact arithmetic for group elements and for the torus action.
//!
//! Group elements are `d x d` integer matrices of determinant one, stored with
//! arbitrary-precision entries so that long products never overflow. Points of
//! the torus `T^d = R^d / Z^d` are stored as 64-bit fixed-point fractions
//! `k / 2^64`. An integer matrix acts on such a point exactly: the product
//! `g_ij * k_j` only matters modulo `2^64`, which is what wrapping `u64`
//! arithmetic computes, so the action introduces no rounding at all.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of `SL(d, Z)`, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupMatrix {
    dim: usize,
    entries: Vec<BigInt>,
}

impl GroupMatrix {
    /// Builds a matrix from row-major entries, rejecting anything with determinant other than one.
    pub fn new(dim: usize, entries: Vec<BigInt>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("matrix dimension must be positive".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: entries.len() });
        }
        let m = GroupMatrix { dim, entries };
        let det = m.determinant();
        if !det.is_one() {
            return Err(Error::NotUnimodular(det.to_string()));
        }
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: row.len() });
            }
            entries.extend(row.iter().map(|&v| BigInt::from(v)));
        }
        Self::new(dim, entries)
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![BigInt::zero(); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = BigInt::one();
        }
        GroupMatrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> &BigInt {
        &self.entries[row * self.dim + col]
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.dim)
    }

    /// Rows as `i64`, if every entry fits.
    pub fn to_rows_i64(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.entry(i, j).to_i64()).collect())
            .collect()
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        bareiss_determinant(self.dim, self.entries.clone())
    }

    /// Inverse, computed as the adjugate (valid because the determinant is one).
    pub fn inverse(&self) -> GroupMatrix {
        let d = self.dim;
        if d == 1 {
            return self.clone();
        }
        let mut adj = vec![BigInt::zero(); d * d];
        for i in 0..d {
            for j in 0..d {
                let mut minor = Vec::with_capacity((d - 1) * (d - 1));
                for r in (0..d).filter(|&r| r != i) {
                    for c in (0..d).filter(|&c| c != j) {
                        minor.push(self.entry(r, c).clone());
                    }
                }
                let mut cof = bareiss_determinant(d - 1, minor);
                if (i + j) % 2 == 1 {
                    cof = -cof;
                }
                // adjugate is the transposed cofactor matrix
                adj[j * d + i] = cof;
            }
        }
        GroupMatrix { dim: d, entries: adj }
    }

    /// Reduction of every entry modulo `2^64`.
    pub fn to_mod(&self) -> ModMatrix {
        ModMatrix { dim: self.dim, entries: self.entries.iter().map(reduce_mod_2_64).collect() }
    }
}

impl fmt::Display for GroupMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.dim {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.dim {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.entry(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

fn bareiss_determinant(n: usize, mut m: Vec<BigInt>) -> BigInt {
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k * n + k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&r| !m[r * n + k].is_zero()) else {
                return BigInt::zero();
            };
            for c in 0..n {
                m.swap(k * n + c, swap * n + c);
            }
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i * n + j] * &m[k * n + k] - &m[i * n + k] * &m[k * n + j];
                m[i * n + j] = v / &prev;
            }
        }
        prev = m[k * n + k].clone();
    }
    sign * &m[n * n - 1]
}

fn reduce_mod_2_64(v: &BigInt) -> u64 {
    let modulus = BigInt::one() << 64;
    v.mod_floor(&modulus).to_u64().expect("reduced value fits in u64")
}

/// Exact integer product of two group matrices.
pub fn mat_mul(a: &GroupMatrix, b: &GroupMatrix) -> Result<GroupMatrix> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch { expected: a.dim, found: b.dim });
    }
    let d = a.dim;
    let mut entries = vec![BigInt::zero(); d * d];
    for i in 0..d {
        for k in 0..d {
            let aik = a.entry(i, k);
            if aik.is_zero() {
                continue;
            }
            for j in 0..d {
                entries[i * d + j] += aik * b.entry(k, j);
            }
        }
    }
    Ok(GroupMatrix { dim: d, entries })
}

/// An integer matrix reduced modulo `2^64`. This is all the information the
/// torus action needs, and it multiplies with plain wrapping arithmetic.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModMatrix {
    dim: usize,
    entries: Vec<u64>,
}

impl ModMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![0u64; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1;
        }
        ModMatrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `out = (self * x) mod 1`, coordinates in 64-bit fixed point.
    #[inline]
    pub fn apply(&self, x: &[u64], out: &mut [u64]) {
        let d = self.dim;
        for (i, o) in out.iter_mut().enumerate().take(d) {
            let row = &self.entries[i * d..(i + 1) * d];
            let mut acc = 0u64;
            for (g, xj) in row.iter().zip(x) {
                acc = acc.wrapping_add(g.wrapping_mul(*xj));
            }
            *o = acc;
        }
    }

    /// Wrapping product `self * other`.
    pub fn mul(&self, other: &ModMatrix) -> ModMatrix {
        let d = self.dim;
        let mut entries = vec![0u64; d * d];
        self.mul_into(other, &mut entries);
        ModMatrix { dim: d, entries }
    }

    #[inline]
    pub(crate) fn mul_into(&self, other: &ModMatrix, out: &mut [u64]) {
        let d = self.dim;
        for i in 0..d {
            for j in 0..d {
                let mut acc = 0u64;
                for k in 0..d {
                    acc = acc.wrapping_add(self.entries[i * d + k].wrapping_mul(other.entries[k * d + j]));
                }
                out[i * d + j] = acc;
            }
        }
    }

    pub(crate) fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub(crate) fn from_entries(dim: usize, entries: Vec<u64>) -> Self {
        debug_assert_eq!(entries.len(), dim * dim);
        ModMatrix { dim, entries }
    }
}

/// A point of `T^d`; coordinate `k` stands for `k / 2^64`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TorusPoint {
    coords: Vec<u64>,
}

impl TorusPoint {
    pub fn new(coords: Vec<u64>) -> Self {
        TorusPoint { coords }
    }

    pub fn origin(dim: usize) -> Self {
        TorusPoint { coords: vec![0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    /// Nearest fixed-point approximation of `num / den` modulo one.
    pub fn fraction_to_fixed(num: &BigInt, den: &BigInt) -> Result<u64> {
        if den.is_zero() {
            return Err(Error::InvalidParameter("zero denominator".into()));
        }
        let (num, den) = if den.sign() == Sign::Minus { (-num, -den) } else { (num.clone(), den.clone()) };
        // round(num * 2^64 / den) = floor((2 * num * 2^64 + den) / (2 * den))
        let scaled: BigInt = (num << 65) + &den;
        let rounded = scaled.div_floor(&(den << 1));
        Ok(reduce_mod_2_64(&rounded))
    }

    /// Nearest fixed-point approximation of the fractional part of `sqrt(n)`.
    pub fn sqrt_to_fixed(n: u64) -> u64 {
        // round(sqrt(n) * 2^64) = floor((floor(sqrt(n * 2^130)) + 1) / 2)
        let big: BigUint = BigUint::from(n) << 130usize;
        let s = big.sqrt();
        let rounded: BigUint = (s + 1u32) >> 1;
        let low: BigUint = rounded & BigUint::from(u64::MAX);
        low.to_u64().expect("masked to 64 bits")
    }

    /// Parses one coordinate: a decimal (`0.4142`), a fraction (`3/7`), or
    /// `sqrt(n)` optionally followed by `+k` / `-k`. Values are taken mod 1
    /// and rounded to the nearest multiple of `2^-64`.
    pub fn parse_coord(s: &str) -> Result<u64> {
        let s = s.trim();
        let bad = || Error::InvalidParameter(format!("cannot parse torus coordinate {s:?}"));
        if let Some(rest) = s.strip_prefix("sqrt(") {
            let close = rest.find(')').ok_or_else(bad)?;
            let n: u64 = rest[..close].trim().parse().map_err(|_| bad())?;
            let tail = rest[close + 1..].trim();
            if !tail.is_empty() {
                // integer shifts vanish modulo one, but must still be well formed
                let t = tail.replace(' ', "");
                let t = t.strip_prefix('+').unwrap_or(&t);
                t.parse::<i64>().map_err(|_| bad())?;
            }
            return Ok(Self::sqrt_to_fixed(n));
        }
        if let Some((p, q)) = s.split_once('/') {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            return Self::fraction_to_fixed(&p, &q);
        }
        let (neg, body) = match s.strip_prefix('-') {
            Some(b) => (true, b),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{int_part}{frac_part}");
        let mut num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| bad())?;
        if neg {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10), frac_part.len());
        Self::fraction_to_fixed(&num, &den)
    }

    pub fn parse(coords: &[impl AsRef<str>]) -> Result<Self> {
        coords.iter().map(|c| Self::parse_coord(c.as_ref())).collect::<Result<Vec<_>>>().map(Self::new)
    }

    /// Coordinates as floats in `[0, 1)` (lossy; for display only).
    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(|&c| c as f64 / 18446744073709551616.0).collect()
    }
}

impl fmt::Display for TorusPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.to_f64().iter().map(|v| format!("{v:.17}")).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// `(g x) mod 1`, exactly.
pub fn torus_act(g: &GroupMatrix, x: &TorusPoint) -> TorusPoint {
    assert_eq!(g.dim(), x.dim(), "torus_act: dimension mismatch");
    let mut out = vec![0u64; x.dim()];
    g.to_mod().apply(x.coords(), &mut out);
    TorusPoint::new(out)
}

/// A finite symmetric generating set `S` together with its representation
/// `rho: S -> SL(d, Z)`.
#[derive(Clone, Debug)]
pub struct GeneratorSystem {
    dim: usize,
    labels: Vec<String>,
    matrices: Vec<GroupMatrix>,
    inverse_of: Vec<usize>,
    index: HashMap<String, usize>,
    forward_mod: Vec<ModMatrix>,
    inverse_mod: Vec<ModMatrix>,
}

/// Serialized form of one generator, as it appears in automaton files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub label: String,
    pub inverse: String,
    pub matrix: Vec<Vec<i64>>,
}

impl GeneratorSystem {
    /// Validates and builds a generator system. Labels must be distinct and
    /// must not contain `,` (reserved for composite labels); the inverse map
    /// must be an involution whose matrices really are inverse to each other.
    pub fn new(specs: Vec<GeneratorSpec>) -> Result<Self> {
        if specs.is_empty() {
            return Err(Error::InvalidGenerators("no generators".into()));
        }
        let mut index = HashMap::new();
        for (i, s) in specs.iter().enumerate() {
            if s.label.is_empty() || s.label.contains(',') {
                return Err(Error::InvalidGenerators(format!("bad label {:?}", s.label)));
            }
            if index.insert(s.label.clone(), i).is_some() {
                return Err(Error::InvalidGenerators(format!("duplicate label {:?}", s.label)));
            }
        }
        let dim = specs[0].matrix.len();
        let mut matrices = Vec::with_capacity(specs.len());
        let mut inverse_of = Vec::with_capacity(specs.len());
        for s in &specs {
            let m = GroupMatrix::from_rows(&s.matrix)
                .map_err(|e| Error::InvalidGenerators(format!("generator {:?}: {e}", s.label)))?;
            if m.dim() != dim {
                return Err(Error::InvalidGenerators(format!(
                    "generator {:?} has dimension {}, expected {dim}",
                    s.label,
                    m.dim()
                )));
            }
            matrices.push(m);
            let inv = *index
                .get(&s.inverse)
                .ok_or_else(|| Error::InvalidGenerators(format!("inverse {:?} of {:?} is not a label", s.inverse, s.label)))?;
            inverse_of.push(inv);
        }
        for (i, &j) in inverse_of.iter().enumerate() {
            if inverse_of[j] != i {
                return Err(Error::InvalidGenerators(format!(
                    "inverse map is not an involution at {:?}",
                    specs[i].label
                )));
            }
            if !mat_mul(&matrices[j], &matrices[i])?.is_identity() {
                return Err(Error::InvalidGenerators(format!(
                    "matrix of {:?} times matrix of {:?} is not the identity",
                    specs[j].label, specs[i].label
                )));
            }
        }
        let forward_mod = matrices.iter().map(GroupMatrix::to_mod).collect();
        let inverse_mod = inverse_of.iter().map(|&j| matrices[j].to_mod()).collect();
        Ok(GeneratorSystem {
            dim,
            labels: specs.into_iter().map(|s| s.label).collect(),
            matrices,
            inverse_of,
            index,
            forward_mod,
            inverse_mod,
        })
    }

    /// Convenience constructor from `(label, inverse label, rows)` triples.
    pub fn from_triples(triples: &[(&str, &str, Vec<Vec<i64>>)]) -> Result<Self> {
        Self::new(
            triples
                .iter()
                .map(|(l, i, m)| GeneratorSpec { label: l.to_string(), inverse: i.to_string(), matrix: m.clone() })
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, idx: usize) -> &str {
        &self.labels[idx]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index.get(label).copied().ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn matrix(&self, idx: usize) -> &GroupMatrix {
        &self.matrices[idx]
    }

    pub fn inverse_of(&self, idx: usize) -> usize {
        self.inverse_of[idx]
    }

    pub fn forward_mod(&self, idx: usize) -> &ModMatrix {
        &self.forward_mod[idx]
    }

    pub fn inverse_mod(&self, idx: usize) -> &ModMatrix {
        &self.inverse_mod[idx]
    }

    pub fn specs(&self) -> Vec<GeneratorSpec> {
        (0..self.len())
            .map(|i| GeneratorSpec {
                label: self.labels[i].clone(),
                inverse: self.labels[self.inverse_of[i]].clone(),
                matrix: self.matrices[i].to_rows_i64().expect("generator entries fit in i64"),
            })
            .collect()
    }

    /// `rho(w)` for a word given by generator indices.
    pub fn evaluate(&self, word: &[usize]) -> GroupMatrix {
        let mut acc = GroupMatrix::identity(self.dim);
        for &s in word {
            acc = mat_mul(&acc, &self.matrices[s]).expect("dimensions agree within a system");
        }
        acc
    }

    pub fn indices_of(&self, word: &[impl AsRef<str>]) -> Result<Vec<usize>> {
        word.iter().map(|l| self.index_of(l.as_ref())).collect()
    }

    /// Applies `rho(w)^{-1}` (when `inverse`) or `rho(w)` to `x`, one
    /// generator at a time, never forming the product matrix.
    pub fn act_indices(&self, word: &[usize], x: &TorusPoint, inverse: bool) -> TorusPoint {
        assert_eq!(x.dim(), self.dim, "act_indices: dimension mismatch");
        let mut cur = x.coords().to_vec();
        let mut next = vec![0u64; self.dim];
        if inverse {
            // w^{-1} x = s_n^{-1}( ... s_1^{-1} x): leftmost letter acts first
            for &s in word {
                self.inverse_mod[s].apply(&cur, &mut next);
                std::mem::swap(&mut cur, &mut next);
            }
        } else {
            for &s in word.iter().rev() {
                self.forward_mod[s].apply(&cur, &mut next);
                std::mem::swap(&mut cur, &mut next);
            }
        }
        TorusPoint::new(cur)
    }
}

/// `rho(w)^{-1} x` (or `rho(w) x`) for a word of labels.
pub fn word_act(word: &[impl AsRef<str>], x: &TorusPoint, sys: &GeneratorSystem, inverse: bool) -> Result<TorusPoint> {
    let idx = sys.indices_of(word)?;
    if x.dim() != sys.dim() {
        return Err(Error::DimensionMismatch { expected: sys.dim(), found: x.dim() });
    }
    Ok(sys.act_indices(&idx, x, inverse))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> GroupMatrix {
        GroupMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn sanov() -> GeneratorSystem {
        GeneratorSystem::from_triples(&[
            ("a", "A", vec![vec![1, 2], vec![0, 1]]),
            ("A", "a", vec![vec![1, -2], vec![0, 1]]),
            ("b", "B", vec![vec![1, 0], vec![2, 1]]),
            ("B", "b", vec![vec![1, 0], vec![-2, 1]]),
        ])
        .unwrap()
    }

    const QUARTER: u64 = 1 << 62;

    #[test]
    fn products() {
        let i = GroupMatrix::identity(2);
        assert_eq!(mat_mul(&i, &i).unwrap(), i);
        let a = m(&[&[1, 2], &[0, 1]]);
        let b = m(&[&[1, 0], &[2, 1]]);
        assert_eq!(mat_mul(&a, &b).unwrap(), m(&[&[5, 2], &[2, 1]]));
        assert!(mat_mul(&a, &a.inverse()).unwrap().is_identity());
        assert!(matches!(
            mat_mul(&a, &GroupMatrix::identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn rejects_non_unimodular() {
        assert!(matches!(GroupMatrix::from_rows(&[vec![2, 0], vec![0, 1]]), Err(Error::NotUnimodular(_))));
        assert!(GroupMatrix::from_rows(&[vec![1, 2]]).is_err());
    }

    #[test]
    fn inverse_in_dimension_three() {
        let g = m(&[&[0, 0, 1], &[0, -1, -1], &[1, 2, 1]]);
        assert!(mat_mul(&g, &g.inverse()).unwrap().is_identity());
        assert!(mat_mul(&g.inverse(), &g).unwrap().is_identity());
    }

    #[test]
    fn torus_action_examples() {
        let a = m(&[&[1, 2], &[0, 1]]);
        let x = TorusPoint::new(vec![QUARTER, QUARTER]);
        assert_eq!(torus_act(&GroupMatrix::identity(2), &x), x);
        assert_eq!(torus_act(&a, &TorusPoint::origin(2)), TorusPoint::origin(2));
        assert_eq!(torus_act(&a, &x), TorusPoint::new(vec![3 * QUARTER, QUARTER]));
    }

    #[test]
    fn negative_entries_reduce_mod_one() {
        let a_inv = m(&[&[1, -2], &[0, 1]]);
        let x = TorusPoint::new(vec![0, QUARTER]);
        // 0 - 2/4 = -1/2 = 1/2 mod 1
        assert_eq!(torus_act(&a_inv, &x), TorusPoint::new(vec![2 * QUARTER, QUARTER]));
    }

    #[test]
    fn word_action_matches_matrix_product() {
        let sys = sanov();
        let x = TorusPoint::new(vec![1 << 61, 1 << 61]);
        assert_eq!(word_act(&[] as &[&str], &x, &sys, true).unwrap(), x);
        let a = sys.matrix(0).clone();
        assert_eq!(word_act(&["a"], &x, &sys, true).unwrap(), torus_act(&a.inverse(), &x));
        let ab = mat_mul(sys.matrix(0), sys.matrix(2)).unwrap();
        let expected = torus_act(&ab.inverse(), &x);
        assert_eq!(word_act(&["a", "b"], &x, &sys, true).unwrap(), expected);
        let b_inv = sys.matrix(3);
        let a_inv = sys.matrix(1);
        assert_eq!(expected, torus_act(b_inv, &torus_act(a_inv, &x)));
        assert_eq!(word_act(&["a", "b"], &x, &sys, false).unwrap(), torus_act(&ab, &x));
        assert!(matches!(word_act(&["z"], &x, &sys, true), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn generator_system_validation() {
        let bad_inverse = GeneratorSystem::from_triples(&[
            ("a", "A", vec![vec![1, 2], vec![0, 1]]),
            ("A", "a", vec![vec![1, 2], vec![0, 1]]),
        ]);
        assert!(matches!(bad_inverse, Err(Error::InvalidGenerators(_))));
        let dup = GeneratorSystem::from_triples(&[
            ("a", "a", vec![vec![1, 0], vec![0, 1]]),
            ("a", "a", vec![vec![1, 0], vec![0, 1]]),
        ]);
        assert!(dup.is_err());
        let missing = GeneratorSystem::from_triples(&[("a", "A", vec![vec![1, 2], vec![0, 1]])]);
        assert!(missing.is_err());
        let comma = GeneratorSystem::from_triples(&[("a,b", "a,b", vec![vec![1, 0], vec![0, 1]])]);
        assert!(comma.is_err());
    }

    #[test]
    fn parse_coordinates() {
        assert_eq!(TorusPoint::parse_coord("0.25").unwrap(), QUARTER);
        assert_eq!(TorusPoint::parse_coord("1/4").unwrap(), QUARTER);
        assert_eq!(TorusPoint::parse_coord("-0.75").unwrap(), QUARTER);
        assert_eq!(TorusPoint::parse_coord("5/4").unwrap(), QUARTER);
        assert_eq!(TorusPoint::parse_coord("0").unwrap(), 0);
        assert_eq!(TorusPoint::parse_coord("1/3").unwrap(), 6148914691236517205);
        assert_eq!(TorusPoint::parse_coord("sqrt(4)").unwrap(), 0);
        assert_eq!(TorusPoint::parse_coord("sqrt(2)-1").unwrap(), TorusPoint::parse_coord("sqrt(2)").unwrap());
        assert!(TorusPoint::parse_coord("abc").is_err());
        assert!(TorusPoint::parse_coord("1/0").is_err());
        // frac(sqrt 2) = 0.41421356237309504880...
        let s = TorusPoint::parse_coord("sqrt(2)").unwrap();
        let d = TorusPoint::parse_coord("0.41421356237309504880168872420969807856967187537694").unwrap();
        assert_eq!(s, d);
    }
}
