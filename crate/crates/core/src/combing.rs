//! Graph structures `(D, v0, ev)` over a generating set, and the operations
//! that build, transform and inspect them.

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{mat_mul, GeneratorSystem, GroupMatrix};
use crate::error::{Error, Result};
use crate::spectral::{self, TransitionMatrix};

/// One directed edge. `word` is the label: a single generator index for an
/// ordinary structure, or a sequence of them for a p-step structure.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub word: Vec<usize>,
}

/// A finite directed graph with an initial vertex and edges labelled by
/// words in a generator system. Immutable once built.
#[derive(Clone, Debug)]
pub struct GraphStructure {
    vertex_count: usize,
    initial: usize,
    edges: Vec<Edge>,
    out: Vec<Vec<usize>>,
    system: Arc<GeneratorSystem>,
}

impl GraphStructure {
    pub fn new(system: Arc<GeneratorSystem>, vertex_count: usize, initial: usize, edges: Vec<Edge>) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::Validation("graph structure has no vertices".into()));
        }
        if initial >= vertex_count {
            return Err(Error::Validation(format!(
                "initial vertex {initial} out of range ({vertex_count} vertices)"
            )));
        }
        let mut out = vec![Vec::new(); vertex_count];
        for (i, e) in edges.iter().enumerate() {
            if e.src >= vertex_count || e.dst >= vertex_count {
                return Err(Error::Validation(format!(
                    "edge {i} ({} -> {}) references a vertex out of range ({vertex_count} vertices)",
                    e.src, e.dst
                )));
            }
            if e.word.is_empty() {
                return Err(Error::Validation(format!("edge {i} has an empty label")));
            }
            if let Some(&bad) = e.word.iter().find(|&&s| s >= system.len()) {
                return Err(Error::Validation(format!("edge {i} uses unknown generator index {bad}")));
            }
            out[e.src].push(i);
        }
        Ok(GraphStructure { vertex_count, initial, edges, out, system })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, idx: usize) -> &Edge {
        &self.edges[idx]
    }

    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn system(&self) -> &Arc<GeneratorSystem> {
        &self.system
    }

    /// Label of an edge as text; composite labels are joined with `,`.
    pub fn label_text(&self, edge: usize) -> String {
        self.edges[edge].word.iter().map(|&s| self.system.label(s)).collect::<Vec<_>>().join(",")
    }

    /// Generator word spelled by a path of edge indices.
    pub fn path_word(&self, path: &[usize]) -> Vec<usize> {
        path.iter().flat_map(|&e| self.edges[e].word.iter().copied()).collect()
    }

    /// Final vertex of a path from `source`; `None` if the edges do not compose.
    pub fn path_end(&self, source: usize, path: &[usize]) -> Option<usize> {
        let mut v = source;
        for &e in path {
            let edge = self.edges.get(e)?;
            if edge.src != v {
                return None;
            }
            v = edge.dst;
        }
        Some(v)
    }

    /// Group element `ev(path)`.
    pub fn evaluate(&self, path: &[usize]) -> GroupMatrix {
        self.system.evaluate(&self.path_word(path))
    }

    /// Adjacency as a list of successor vertices (with multiplicity).
    pub(crate) fn successors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.out[v].iter().map(move |&e| self.edges[e].dst)
    }
}

/// The standard no-backtracking combing of a free group: one start vertex and
/// one vertex per last letter. The system must pair its labels into `k`
/// distinct inverse pairs; vertex `1 + i` is "last letter was label `i`".
pub fn free_group_combing(system: Arc<GeneratorSystem>) -> Result<GraphStructure> {
    let m = system.len();
    if (0..m).any(|s| system.inverse_of(s) == s) {
        return Err(Error::InvalidParameter("free group combing needs labels without self-inverses".into()));
    }
    let mut edges = Vec::new();
    for s in 0..m {
        edges.push(Edge { src: 0, dst: 1 + s, word: vec![s] });
    }
    for last in 0..m {
        for s in (0..m).filter(|&s| s != system.inverse_of(last)) {
            edges.push(Edge { src: 1 + last, dst: 1 + s, word: vec![s] });
        }
    }
    GraphStructure::new(system, m + 1, 0, edges)
}

/// The ball of radius `R` in the Cayley graph, explored breadth first with
/// exact matrices. Elements are stored in shortlex order of their
/// representatives (label order = declaration order).
#[derive(Clone, Debug)]
pub struct CayleyBall {
    pub radius: usize,
    pub elements: Vec<GroupMatrix>,
    pub level: Vec<usize>,
    /// `(label, child)` pairs of the shortlex geodesic tree.
    pub children: Vec<Vec<(usize, usize)>>,
    pub spheres: Vec<usize>,
    index: HashMap<GroupMatrix, usize>,
}

impl CayleyBall {
    pub fn explore(system: &GeneratorSystem, radius: usize) -> CayleyBall {
        let id = GroupMatrix::identity(system.dim());
        let mut index = HashMap::new();
        index.insert(id.clone(), 0);
        let mut elements = vec![id];
        let mut level = vec![0];
        let mut children = vec![Vec::new()];
        let mut spheres = vec![1];
        let mut frontier = vec![0usize];
        for r in 1..=radius {
            let mut next = Vec::new();
            for &g in &frontier {
                for s in 0..system.len() {
                    let h = mat_mul(&elements[g], system.matrix(s)).expect("same dimension");
                    if index.contains_key(&h) {
                        continue;
                    }
                    let idx = elements.len();
                    index.insert(h.clone(), idx);
                    elements.push(h);
                    level.push(r);
                    children.push(Vec::new());
                    children[g].push((s, idx));
                    next.push(idx);
                }
            }
            spheres.push(next.len());
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        CayleyBall { radius, elements, level, children, spheres, index }
    }

    /// Word length of `g`, if it lies in the explored ball.
    pub fn distance(&self, g: &GroupMatrix) -> Option<usize> {
        self.index.get(g).map(|&i| self.level[i])
    }

    /// First radius at which the sphere is empty, if any.
    pub fn exhausted_at(&self) -> Option<usize> {
        self.spheres.iter().position(|&s| s == 0)
    }
}

/// Builds a combing from depth-`lookahead` cone types of the shortlex
/// geodesic tree in the ball of radius `radius`, then checks that it
/// reproduces the BFS sphere sizes for all `n <= radius - lookahead`.
pub fn cone_type_combing(system: Arc<GeneratorSystem>, radius: usize, lookahead: usize) -> Result<GraphStructure> {
    if lookahead == 0 || lookahead >= radius {
        return Err(Error::InvalidParameter(format!(
            "cone-type construction needs radius > lookahead >= 1 (got radius {radius}, lookahead {lookahead})"
        )));
    }
    let ball = CayleyBall::explore(&system, radius);
    if let Some(r) = ball.exhausted_at() {
        return Err(Error::RadiusExhausted(r));
    }
    let n = ball.elements.len();

    // types[g] at the current depth; depth-d types are known for level <= radius - d
    let mut types: Vec<Option<u32>> = vec![Some(0); n];
    for d in 1..=lookahead {
        let mut intern: HashMap<Vec<(usize, u32)>, u32> = HashMap::new();
        let mut next = vec![None; n];
        for g in 0..n {
            if ball.level[g] + d > radius {
                continue;
            }
            let key: Vec<(usize, u32)> = ball.children[g]
                .iter()
                .map(|&(s, c)| (s, types[c].expect("child type known one level deeper")))
                .collect();
            let fresh = intern.len() as u32;
            next[g] = Some(*intern.entry(key).or_insert(fresh));
        }
        types = next;
    }

    let horizon = radius - lookahead;
    let mut state_of_type: HashMap<u32, usize> = HashMap::new();
    let mut state = vec![usize::MAX; n];
    let mut has_children = Vec::new();
    for g in 0..n {
        if ball.level[g] > horizon {
            continue;
        }
        let t = types[g].expect("type known inside horizon");
        let next_id = state_of_type.len();
        let s = *state_of_type.entry(t).or_insert_with(|| {
            has_children.push(!ball.children[g].is_empty());
            next_id
        });
        state[g] = s;
    }
    let states = state_of_type.len();
    let mut trans: Vec<Vec<Option<usize>>> = vec![vec![None; system.len()]; states];
    let mut expanded = vec![false; states];
    for g in 0..n {
        if ball.level[g] >= horizon {
            continue;
        }
        let sg = state[g];
        expanded[sg] = true;
        for &(s, c) in &ball.children[g] {
            let sc = state[c];
            match trans[sg][s] {
                None => trans[sg][s] = Some(sc),
                Some(prev) if prev != sc => {
                    return Err(Error::InconsistentAutomaton(format!(
                        "state {sg} has conflicting successors {prev} and {sc} on label {:?}; increase lookahead",
                        system.label(s)
                    )))
                }
                Some(_) => {}
            }
        }
    }
    if let Some(s) = (0..states).find(|&s| !expanded[s] && has_children[s]) {
        return Err(Error::InconsistentAutomaton(format!(
            "state {s} first appears at the horizon and has no known transitions; increase radius"
        )));
    }
    let mut edges = Vec::new();
    for (src, row) in trans.iter().enumerate() {
        for (s, dst) in row.iter().enumerate() {
            if let Some(dst) = dst {
                edges.push(Edge { src, dst: *dst, word: vec![s] });
            }
        }
    }
    let graph = GraphStructure::new(system, states, state[0], edges)?;
    for len in 1..=horizon {
        let got = count_paths(&graph, graph.initial(), None, len);
        if got != BigUint::from(ball.spheres[len]) {
            return Err(Error::InconsistentAutomaton(format!(
                "automaton has {got} paths of length {len} but the sphere has {} elements",
                ball.spheres[len]
            )));
        }
    }
    Ok(graph)
}

/// The p-step structure: same vertices, one edge per path of length `p`,
/// labelled by the concatenated word.
pub fn p_step(graph: &GraphStructure, p: usize) -> Result<GraphStructure> {
    if p == 0 {
        return Err(Error::InvalidParameter("p must be at least 1".into()));
    }
    let mut edges = Vec::new();
    for v in 0..graph.vertex_count() {
        enumerate_paths(graph, v, p, |path| {
            let dst = graph.edge(*path.last().expect("p >= 1")).dst;
            edges.push(Edge { src: v, dst, word: graph.path_word(path) });
        });
    }
    GraphStructure::new(graph.system().clone(), graph.vertex_count(), graph.initial(), edges)
}

/// Induced subgraph on `keep`. Kept vertices are renumbered in increasing
/// order of their original index.
pub fn restrict(graph: &GraphStructure, keep: &[usize], new_initial: usize) -> Result<GraphStructure> {
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.is_empty() {
        return Err(Error::EmptyRestriction);
    }
    if let Some(&v) = kept.iter().find(|&&v| v >= graph.vertex_count()) {
        return Err(Error::InvalidParameter(format!("vertex {v} out of range")));
    }
    let mut new_index = vec![None; graph.vertex_count()];
    for (i, &v) in kept.iter().enumerate() {
        new_index[v] = Some(i);
    }
    let initial = new_index[new_initial]
        .ok_or_else(|| Error::InvalidParameter(format!("new initial vertex {new_initial} is not kept")))?;
    let edges = graph
        .edges()
        .iter()
        .filter_map(|e| match (new_index[e.src], new_index[e.dst]) {
            (Some(src), Some(dst)) => Some(Edge { src, dst, word: e.word.clone() }),
            _ => None,
        })
        .collect();
    GraphStructure::new(graph.system().clone(), kept.len(), initial, edges)
}

/// Strongly connected components with growth data.
#[derive(Clone, Debug, Serialize)]
pub struct ComponentDecomposition {
    pub component_of: Vec<usize>,
    pub components: Vec<Vec<usize>>,
    /// Spectral radius of each component's own block.
    pub radius: Vec<f64>,
    pub maximal: Vec<bool>,
    pub large_growth: Vec<bool>,
    /// Pairs `(from, to)` of distinct maximal components joined by a path.
    pub maximal_chains: Vec<(usize, usize)>,
}

/// Relative tolerance for deciding that a component's radius equals `lambda`.
pub const MAXIMAL_TOLERANCE: f64 = 1e-9;

impl ComponentDecomposition {
    /// Decomposition of a transition matrix. Components are numbered in
    /// increasing order of their smallest vertex. Never fails; chains of
    /// maximal components are recorded rather than rejected.
    pub fn analyze(a: &TransitionMatrix, lambda: f64) -> ComponentDecomposition {
        let n = a.size();
        let mut g = DiGraph::<(), ()>::new();
        let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
        for i in 0..n {
            for j in 0..n {
                if a.get(i, j) > 0 {
                    g.add_edge(nodes[i], nodes[j], ());
                }
            }
        }
        let mut components: Vec<Vec<usize>> = tarjan_scc(&g)
            .into_iter()
            .map(|c| {
                let mut c: Vec<usize> = c.into_iter().map(|x| x.index()).collect();
                c.sort_unstable();
                c
            })
            .collect();
        components.sort_by_key(|c| c[0]);
        let mut component_of = vec![0; n];
        for (ci, c) in components.iter().enumerate() {
            for &v in c {
                component_of[v] = ci;
            }
        }
        let radius: Vec<f64> = components.iter().map(|c| spectral::block_radius(a, c)).collect();
        let maximal: Vec<bool> = radius
            .iter()
            .map(|&r| lambda > 0.0 && (r - lambda).abs() <= MAXIMAL_TOLERANCE * lambda)
            .collect();

        let reach_from = |start: &[usize]| -> Vec<bool> {
            let mut seen = vec![false; n];
            let mut queue: VecDeque<usize> = start.iter().copied().collect();
            for &s in start {
                seen[s] = true;
            }
            while let Some(v) = queue.pop_front() {
                for j in 0..n {
                    if a.get(v, j) > 0 && !seen[j] {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                }
            }
            seen
        };

        let mut maximal_chains = Vec::new();
        for (ci, c) in components.iter().enumerate() {
            if !maximal[ci] {
                continue;
            }
            let seen = reach_from(c);
            for (cj, other) in components.iter().enumerate() {
                if cj != ci && maximal[cj] && seen[other[0]] {
                    maximal_chains.push((ci, cj));
                }
            }
        }

        // large growth = can reach a maximal component: search backwards
        let mut large_growth = vec![false; n];
        let mut queue = VecDeque::new();
        for (ci, c) in components.iter().enumerate() {
            if maximal[ci] {
                for &v in c {
                    large_growth[v] = true;
                    queue.push_back(v);
                }
            }
        }
        while let Some(v) = queue.pop_front() {
            for i in 0..n {
                if a.get(i, v) > 0 && !large_growth[i] {
                    large_growth[i] = true;
                    queue.push_back(i);
                }
            }
        }
        ComponentDecomposition { component_of, components, radius, maximal, large_growth, maximal_chains }
    }

    pub fn is_almost_semisimple(&self) -> bool {
        self.maximal_chains.is_empty()
    }

    pub fn maximal_components(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.components.iter().zip(&self.maximal).filter(|(_, &m)| m).map(|(c, _)| c)
    }
}

/// Component decomposition of `graph`, rejecting structures in which a
/// directed path joins two distinct maximal components.
pub fn components(graph: &GraphStructure, lambda: f64) -> Result<ComponentDecomposition> {
    let a = spectral::transition_matrix(graph);
    let dec = ComponentDecomposition::analyze(&a, lambda);
    if let Some(&(from, to)) = dec.maximal_chains.first() {
        return Err(Error::NotAlmostSemisimple { from, to });
    }
    Ok(dec)
}

/// Number of paths of length `n` from each vertex, ending at `target` if given.
pub fn path_count_vector(graph: &GraphStructure, target: Option<usize>, n: usize) -> Vec<BigUint> {
    let mut cur: Vec<BigUint> = match target {
        Some(t) => (0..graph.vertex_count()).map(|v| if v == t { BigUint::one() } else { BigUint::zero() }).collect(),
        None => vec![BigUint::one(); graph.vertex_count()],
    };
    for _ in 0..n {
        cur = (0..graph.vertex_count())
            .map(|v| graph.successors(v).fold(BigUint::zero(), |acc, w| acc + &cur[w]))
            .collect();
    }
    cur
}

/// Exact number of paths of length `n` from `source` (to `target`, if given).
pub fn count_paths(graph: &GraphStructure, source: usize, target: Option<usize>, n: usize) -> BigUint {
    path_count_vector(graph, target, n).swap_remove(source)
}

/// Per-step incremental state carried along a depth-first path traversal.
pub trait PathState {
    fn push(&mut self, graph: &GraphStructure, edge: &Edge);
    fn pop(&mut self);
}

impl PathState for () {
    fn push(&mut self, _: &GraphStructure, _: &Edge) {}
    fn pop(&mut self) {}
}

/// Pre-order traversal of every path of length `<= max_depth` from
/// `source`. `visit(path, end_vertex, state)` is called once per path,
/// including the empty one, with `state` updated for exactly that path.
pub fn walk_paths<S: PathState>(
    graph: &GraphStructure,
    source: usize,
    max_depth: usize,
    state: &mut S,
    mut visit: impl FnMut(&[usize], usize, &S),
) {
    let mut path: Vec<usize> = Vec::with_capacity(max_depth);
    let mut cursors: Vec<(usize, usize)> = Vec::with_capacity(max_depth + 1);
    cursors.push((source, 0));
    visit(&path, source, state);
    while let Some(top) = cursors.last_mut() {
        let (v, pos) = *top;
        let out = graph.out_edges(v);
        if path.len() == max_depth || pos >= out.len() {
            cursors.pop();
            if path.pop().is_some() {
                state.pop();
            }
            continue;
        }
        top.1 += 1;
        let e = out[pos];
        let edge = graph.edge(e);
        path.push(e);
        state.push(graph, edge);
        visit(&path, edge.dst, state);
        cursors.push((edge.dst, 0));
    }
}

/// Calls `visitor` once for every path (edge indices) of length exactly `n` from `source`.
pub fn enumerate_paths(graph: &GraphStructure, source: usize, n: usize, mut visitor: impl FnMut(&[usize])) {
    walk_paths(graph, source, n, &mut (), |path, _, _| {
        if path.len() == n {
            visitor(path);
        }
    });
}

/// Every loop of length `n` based at `v`.
pub fn loop_paths(graph: &GraphStructure, v: usize, n: usize, mut visitor: impl FnMut(&[usize])) {
    walk_paths(graph, v, n, &mut (), |path, end, _| {
        if path.len() == n && end == v {
            visitor(path);
        }
    });
}

/// Whether the loop semigroup at `v` is nonempty (a necessary condition for thickness).
pub fn has_loops(graph: &GraphStructure, v: usize) -> bool {
    let n = graph.vertex_count();
    let mut seen = vec![false; n];
    let mut queue: VecDeque<usize> = graph.successors(v).collect();
    while let Some(w) = queue.pop_front() {
        if w == v {
            return true;
        }
        if !seen[w] {
            seen[w] = true;
            queue.extend(graph.successors(w));
        }
    }
    false
}

/// Prefix-partitioned traversal. Paths of length `<= prefix_depth` are
/// visited sequentially into the first accumulator; each path of length
/// exactly `prefix_depth` then roots an independent subtree walked in
/// parallel. Accumulators are merged in prefix order, so the result does not
/// depend on how many threads ran.
#[allow(clippy::too_many_arguments)]
pub fn fold_paths<S, A>(
    graph: &GraphStructure,
    source: usize,
    max_depth: usize,
    prefix_depth: usize,
    new_state: impl Fn() -> S + Sync,
    new_acc: impl Fn() -> A + Sync,
    visit: impl Fn(&mut A, usize, usize, &S) + Sync,
    combine: impl Fn(&mut A, A),
) -> A
where
    S: PathState,
    A: Send,
{
    let prefix_depth = prefix_depth.min(max_depth);
    let mut acc = new_acc();
    let mut prefixes: Vec<Vec<usize>> = Vec::new();
    {
        let mut state = new_state();
        walk_paths(graph, source, prefix_depth, &mut state, |path, end, st| {
            visit(&mut acc, path.len(), end, st);
            if path.len() == prefix_depth && prefix_depth < max_depth {
                prefixes.push(path.to_vec());
            }
        });
    }
    let partials: Vec<A> = prefixes
        .par_iter()
        .map(|prefix| {
            let mut state = new_state();
            for &e in prefix {
                state.push(graph, graph.edge(e));
            }
            let start = prefix.last().map_or(source, |&e| graph.edge(e).dst);
            let mut local = new_acc();
            walk_paths(graph, start, max_depth - prefix_depth, &mut state, |path, end, st| {
                if !path.is_empty() {
                    visit(&mut local, prefix_depth + path.len(), end, st);
                }
            });
            local
        })
        .collect();
    for p in partials {
        combine(&mut acc, p);
    }
    acc
}

/// Outcome of [`verify_geodesic`].
#[derive(Clone, Debug, Serialize)]
pub struct GeodesicReport {
    pub radius: usize,
    pub paths_checked: usize,
    pub injective: bool,
    pub length_preserving: bool,
    /// Path counts equal BFS sphere sizes (surjectivity onto spheres).
    pub sphere_counts_match: bool,
    pub bfs_spheres: Vec<usize>,
    pub automaton_spheres: Vec<String>,
    pub witness: Option<String>,
}

impl GeodesicReport {
    pub fn passed(&self) -> bool {
        self.injective && self.length_preserving
    }
}

struct MatrixStack<'a> {
    system: &'a GeneratorSystem,
    stack: Vec<GroupMatrix>,
}

impl PathState for MatrixStack<'_> {
    fn push(&mut self, _: &GraphStructure, edge: &Edge) {
        let mut m = self.stack.last().expect("root present").clone();
        for &s in &edge.word {
            m = mat_mul(&m, self.system.matrix(s)).expect("same dimension");
        }
        self.stack.push(m);
    }
    fn pop(&mut self) {
        self.stack.pop();
    }
}

/// Checks that evaluation on paths of length `<= radius` from the initial
/// vertex is injective and length preserving, against the BFS word metric.
pub fn verify_geodesic(graph: &GraphStructure, radius: usize) -> GeodesicReport {
    let system = graph.system().clone();
    let max_word = graph.edges().iter().map(|e| e.word.len()).max().unwrap_or(1);
    let ball = CayleyBall::explore(&system, radius * max_word);
    let mut seen: HashMap<GroupMatrix, Vec<usize>> = HashMap::new();
    let mut injective = true;
    let mut length_preserving = true;
    let mut witness = None;
    let mut paths_checked = 0usize;
    let mut state = MatrixStack { system: &system, stack: vec![GroupMatrix::identity(system.dim())] };
    let labels = |path: &[usize]| -> String {
        let w = graph.path_word(path);
        if w.is_empty() {
            "(empty)".to_string()
        } else {
            w.iter().map(|&s| system.label(s)).collect::<Vec<_>>().join("")
        }
    };
    walk_paths(graph, graph.initial(), radius, &mut state, |path, _, st| {
        paths_checked += 1;
        let g = st.stack.last().expect("nonempty");
        let word_len: usize = path.iter().map(|&e| graph.edge(e).word.len()).sum();
        if let Some(other) = seen.get(g) {
            if injective {
                injective = false;
                if witness.is_none() {
                    witness = Some(format!(
                        "paths {} and {} evaluate to the same element {g}",
                        labels(other),
                        labels(path)
                    ));
                }
            }
        } else {
            seen.insert(g.clone(), path.to_vec());
        }
        if ball.distance(g) != Some(word_len) && length_preserving {
            length_preserving = false;
            if witness.is_none() {
                witness = Some(format!(
                    "path {} has length {word_len} but its element has word length {}",
                    labels(path),
                    ball.distance(g).map_or("> radius".to_string(), |d| d.to_string())
                ));
            }
        }
    });
    let automaton_spheres: Vec<BigUint> =
        (0..=radius).map(|n| count_paths(graph, graph.initial(), None, n)).collect();
    let sphere_counts_match = max_word == 1
        && (0..=radius).all(|n| ball.spheres.get(n).map(|&s| BigUint::from(s)) == Some(automaton_spheres[n].clone()));
    GeodesicReport {
        radius,
        paths_checked,
        injective,
        length_preserving,
        sphere_counts_match,
        bfs_spheres: ball.spheres.clone(),
        automaton_spheres: automaton_spheres.iter().map(|c| c.to_string()).collect(),
        witness,
    }
}

/// Distinct label words of all paths of length `n` from `source` (testing aid).
pub fn path_words(graph: &GraphStructure, source: usize, n: usize) -> HashSet<Vec<usize>> {
    let mut out = HashSet::new();
    enumerate_paths(graph, source, n, |p| {
        out.insert(graph.path_word(p));
    });
    out
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn sanov() -> Arc<GeneratorSystem> {
        Arc::new(
            GeneratorSystem::from_triples(&[
                ("a", "A", vec![vec![1, 2], vec![0, 1]]),
                ("A", "a", vec![vec![1, -2], vec![0, 1]]),
                ("b", "B", vec![vec![1, 0], vec![2, 1]]),
                ("B", "b", vec![vec![1, 0], vec![-2, 1]]),
            ])
            .unwrap(),
        )
    }

    fn unipotent() -> Arc<GeneratorSystem> {
        Arc::new(
            GeneratorSystem::from_triples(&[
                ("t", "T", vec![vec![1, 1], vec![0, 1]]),
                ("T", "t", vec![vec![1, -1], vec![0, 1]]),
            ])
            .unwrap(),
        )
    }

    fn bare_graph(vertices: usize, edges: &[(usize, usize)]) -> GraphStructure {
        let sys = unipotent();
        GraphStructure::new(
            sys,
            vertices,
            0,
            edges.iter().map(|&(s, d)| Edge { src: s, dst: d, word: vec![0] }).collect(),
        )
        .unwrap()
    }

    #[test]
    fn free_group_shape() {
        let f2 = free_group_combing(sanov()).unwrap();
        assert_eq!(f2.vertex_count(), 5);
        assert_eq!(f2.out_edges(0).len(), 4);
        for v in 1..5 {
            assert_eq!(f2.out_edges(v).len(), 3);
        }
        let z = free_group_combing(unipotent()).unwrap();
        assert_eq!(z.vertex_count(), 3);
        let counts: Vec<_> = (0..6).map(|n| count_paths(&z, 0, None, n)).collect();
        assert_eq!(counts, [1u32, 2, 2, 2, 2, 2].map(BigUint::from));
    }

    #[test]
    fn f2_path_counts() {
        let f2 = free_group_combing(sanov()).unwrap();
        for n in 1..=10u32 {
            assert_eq!(count_paths(&f2, 0, None, n as usize), BigUint::from(4 * 3u64.pow(n - 1)));
        }
        assert_eq!(count_paths(&f2, 0, None, 5), BigUint::from(324u32));
        assert_eq!(count_paths(&f2, 1, None, 6), BigUint::from(729u32));
        assert_eq!(count_paths(&f2, 2, Some(2), 0), BigUint::one());
        assert_eq!(count_paths(&f2, 2, Some(3), 0), BigUint::zero());
    }

    #[test]
    fn enumeration_matches_reduced_words() {
        let f2 = free_group_combing(sanov()).unwrap();
        let sys = f2.system().clone();
        let mut count = 0;
        let mut words = HashSet::new();
        enumerate_paths(&f2, 0, 3, |p| {
            count += 1;
            words.insert(f2.path_word(p));
        });
        // oracle: all 4^3 raw words, keep those without s s^-1
        let mut reduced = HashSet::new();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    let w = vec![a, b, c];
                    if w.windows(2).all(|x| sys.inverse_of(x[0]) != x[1]) {
                        reduced.insert(w);
                    }
                }
            }
        }
        assert_eq!(count, 36);
        assert_eq!(words, reduced);
        let mut empty = 0;
        enumerate_paths(&f2, 0, 0, |p| {
            assert!(p.is_empty());
            empty += 1;
        });
        assert_eq!(empty, 1);
    }

    #[test]
    fn enumeration_counts_agree_with_matrix_powers() {
        let f2 = free_group_combing(sanov()).unwrap();
        let four = restrict(&f2, &[1, 2, 3, 4], 1).unwrap();
        for g in [&f2, &four] {
            for v in 0..g.vertex_count() {
                for n in 0..=8 {
                    let mut c = 0u64;
                    enumerate_paths(g, v, n, |_| c += 1);
                    assert_eq!(BigUint::from(c), count_paths(g, v, None, n));
                }
            }
        }
    }

    #[test]
    fn p_step_examples() {
        let f2 = free_group_combing(sanov()).unwrap();
        let same = p_step(&f2, 1).unwrap();
        assert_eq!(same.edges(), f2.edges());
        let two = p_step(&f2, 2).unwrap();
        assert_eq!(two.out_edges(0).len(), 12);
        let cycle = bare_graph(2, &[(0, 1), (1, 0)]);
        let c2 = p_step(&cycle, 2).unwrap();
        assert_eq!(c2.edges().len(), 2);
        assert!(c2.edges().iter().all(|e| e.src == e.dst && e.word.len() == 2));
        for p in 1..=3 {
            let gp = p_step(&f2, p).unwrap();
            for v in 0..5 {
                for n in 0..=5 / p.max(1) + 1 {
                    assert_eq!(count_paths(&gp, v, None, n), count_paths(&f2, v, None, p * n));
                }
            }
        }
        assert!(p_step(&f2, 0).is_err());
    }

    #[test]
    fn restrict_examples() {
        let f2 = free_group_combing(sanov()).unwrap();
        let all = restrict(&f2, &[0, 1, 2, 3, 4], 0).unwrap();
        assert_eq!(all.edges(), f2.edges());
        let four = restrict(&f2, &[1, 2, 3, 4], 1).unwrap();
        assert_eq!(four.vertex_count(), 4);
        for v in 0..4 {
            assert_eq!(four.out_edges(v).len(), 3);
        }
        let lone = restrict(&f2, &[0], 0).unwrap();
        assert!(lone.edges().is_empty());
        assert!(matches!(restrict(&f2, &[], 0), Err(Error::EmptyRestriction)));
        assert!(restrict(&f2, &[1, 2], 0).is_err());
    }

    #[test]
    fn components_examples() {
        let f2 = free_group_combing(sanov()).unwrap();
        let dec = components(&f2, 3.0).unwrap();
        assert_eq!(dec.components.len(), 2);
        assert_eq!(dec.components[0], vec![0]);
        assert_eq!(dec.components[1], vec![1, 2, 3, 4]);
        assert!(!dec.maximal[0] && dec.maximal[1]);
        assert!((dec.radius[1] - 3.0).abs() < 1e-12);
        assert!(dec.large_growth.iter().all(|&b| b));

        let loop1 = bare_graph(1, &[(0, 0)]);
        let dec = components(&loop1, 1.0).unwrap();
        assert_eq!(dec.maximal, vec![true]);

        let jordan = bare_graph(2, &[(0, 0), (0, 1), (1, 1)]);
        assert!(matches!(components(&jordan, 1.0), Err(Error::NotAlmostSemisimple { .. })));
    }

    #[test]
    fn small_growth_vertices() {
        // 0 -> 1 (self-loop x2), 0 -> 2 (self-loop x1), 2 is small growth
        let g = bare_graph(3, &[(0, 1), (1, 1), (1, 1), (0, 2), (2, 2)]);
        let dec = components(&g, 2.0).unwrap();
        assert_eq!(dec.large_growth, vec![true, true, false]);
        let iso = restrict(&g, &[2], 2).unwrap();
        assert_eq!(iso.edges().len(), 1);
    }

    #[test]
    fn loops() {
        let f2 = free_group_combing(sanov()).unwrap();
        let mut c = 0;
        loop_paths(&f2, 1, 1, |p| {
            assert_eq!(f2.label_text(p[0]), "a");
            c += 1;
        });
        assert_eq!(c, 1);
        let mut c2 = Vec::new();
        loop_paths(&f2, 1, 2, |p| c2.push(p.to_vec()));
        assert_eq!(c2.len(), 3);
        assert_eq!(BigUint::from(c2.len()), count_paths(&f2, 1, Some(1), 2));
        // concatenation of loops is a loop
        for x in &c2 {
            for y in &c2 {
                let cat: Vec<usize> = x.iter().chain(y).copied().collect();
                assert_eq!(f2.path_end(1, &cat), Some(1));
            }
        }
        assert!(has_loops(&f2, 1));
        assert!(!has_loops(&f2, 0));
        let selfloop = bare_graph(1, &[(0, 0)]);
        let mut c3 = 0;
        loop_paths(&selfloop, 0, 7, |_| c3 += 1);
        assert_eq!(c3, 1);
    }

    #[test]
    fn geodesic_verification() {
        let f2 = free_group_combing(sanov()).unwrap();
        let rep = verify_geodesic(&f2, 8);
        assert!(rep.passed(), "{:?}", rep.witness);
        assert!(rep.sphere_counts_match);

        let z = free_group_combing(unipotent()).unwrap();
        assert!(verify_geodesic(&z, 6).passed());

        let trivial = Arc::new(
            GeneratorSystem::from_triples(&[
                ("a", "A", vec![vec![1, 0], vec![0, 1]]),
                ("A", "a", vec![vec![1, 0], vec![0, 1]]),
                ("b", "B", vec![vec![1, 0], vec![0, 1]]),
                ("B", "b", vec![vec![1, 0], vec![0, 1]]),
            ])
            .unwrap(),
        );
        let bad = free_group_combing(trivial).unwrap();
        let rep = verify_geodesic(&bad, 1);
        assert!(!rep.passed());
        assert!(!rep.injective);
        assert!(rep.witness.unwrap().contains("same element"));
    }

    #[test]
    fn cone_types_reproduce_free_groups() {
        let g = cone_type_combing(sanov(), 8, 2).unwrap();
        assert_eq!(g.vertex_count(), 5);
        for n in 1..=10u32 {
            assert_eq!(count_paths(&g, g.initial(), None, n as usize), BigUint::from(4 * 3u64.pow(n - 1)));
        }
        assert!(verify_geodesic(&g, 8).passed());

        let z = cone_type_combing(unipotent(), 6, 1).unwrap();
        assert_eq!(z.vertex_count(), 3);
        let counts: Vec<_> = (0..5).map(|n| count_paths(&z, z.initial(), None, n)).collect();
        assert_eq!(counts, [1u32, 2, 2, 2, 2].map(BigUint::from));
    }

    #[test]
    fn cone_type_degenerate_parameters() {
        assert!(matches!(cone_type_combing(sanov(), 3, 3), Err(Error::InvalidParameter(_))));
        assert!(cone_type_combing(sanov(), 3, 0).is_err());
        let trivial = Arc::new(
            GeneratorSystem::from_triples(&[("e", "e", vec![vec![1, 0], vec![0, 1]])]).unwrap(),
        );
        assert!(matches!(cone_type_combing(trivial, 4, 1), Err(Error::RadiusExhausted(1))));
    }

    #[test]
    fn sanov_spheres_are_injective_images() {
        let f2 = free_group_combing(sanov()).unwrap();
        for n in 1..=6 {
            let mut set = HashSet::new();
            enumerate_paths(&f2, 0, n, |p| {
                assert!(set.insert(f2.evaluate(p)));
            });
        }
    }

    #[test]
    fn parallel_fold_matches_sequential() {
        let f2 = free_group_combing(sanov()).unwrap();
        let count = |prefix| {
            fold_paths(
                &f2,
                0,
                7,
                prefix,
                || (),
                || vec![0u64; 8],
                |acc: &mut Vec<u64>, depth, _, _| acc[depth] += 1,
                |a, b| a.iter_mut().zip(b).for_each(|(x, y)| *x += y),
            )
        };
        let expect: Vec<u64> = (0..8).map(|n| if n == 0 { 1 } else { 4 * 3u64.pow(n as u32 - 1) }).collect();
        for prefix in 0..=8 {
            assert_eq!(count(prefix), expect);
        }
    }
}
