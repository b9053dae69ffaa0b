//! Brute-force ground truth for small hypergraphs: exact maximum independent
//! set, q-colorability, and the covering number of the induced not-all-equal
//! CSP. Deliberately independent of the verifier's analysis: everything here
//! works off the explicit edge list alone.

use crate::{Error, Result};

/// A hypergraph as the oracle sees it: a vertex count and explicit edges.
/// No folding or instance structure is visible from here.
#[derive(Clone, Debug)]
pub struct OracleInput {
    pub n: usize,
    pub edges: Vec<Vec<u32>>,
}

impl OracleInput {
    pub fn new(n: usize, edges: Vec<Vec<u32>>) -> OracleInput {
        OracleInput { n, edges }
    }

    pub fn from_hypergraph(h: &crate::hypergraph::Hypergraph) -> OracleInput {
        OracleInput { n: h.n(), edges: h.edges().to_vec() }
    }
}

/// Exact maximum independent set with its witness.
#[derive(Clone, Debug)]
pub struct MaxIndependentSet {
    pub size: usize,
    pub witness: Vec<u32>,
}

/// Independent re-verification by a direct edge scan.
pub fn verify_independent(input: &OracleInput, set: &[u32]) -> bool {
    let mut member = vec![false; input.n];
    for &v in set {
        if v as usize >= input.n {
            return false;
        }
        member[v as usize] = true;
    }
    !input.edges.iter().any(|e| e.iter().all(|&v| member[v as usize]))
}

/// Exact maximum independent set by branch and bound over a degree-descending
/// vertex order, with bitset containment tests. Exhaustive up to the cap.
pub fn max_independent_set(input: &OracleInput, cap: usize) -> Result<MaxIndependentSet> {
    if input.n > 64 || input.n > cap {
        return Err(Error::TooLarge(format!(
            "independent-set search on {} vertices (cap {})",
            input.n,
            cap.min(64)
        )));
    }
    let n = input.n;
    // Order vertices by degree, highest first: constrained vertices early.
    let mut degree = vec![0usize; n];
    for e in &input.edges {
        for &v in e {
            degree[v as usize] += 1;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(degree[v]));
    let position: Vec<usize> = {
        let mut pos = vec![0usize; n];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        pos
    };
    // Edge masks in search order; an edge is checked once its last vertex
    // (in search order) is decided.
    let mut edge_masks: Vec<(usize, u64)> = input
        .edges
        .iter()
        .map(|e| {
            let mask: u64 = e.iter().map(|&v| 1u64 << position[v as usize]).sum();
            let last = e.iter().map(|&v| position[v as usize]).max().unwrap();
            (last, mask)
        })
        .collect();
    edge_masks.sort_unstable();
    let mut edges_by_last: Vec<Vec<u64>> = vec![Vec::new(); n];
    for (last, mask) in edge_masks {
        edges_by_last[last].push(mask);
    }

    struct Search<'a> {
        n: usize,
        edges_by_last: &'a [Vec<u64>],
        best: u64,
        best_size: usize,
    }
    impl Search<'_> {
        fn go(&mut self, depth: usize, chosen: u64, count: usize) {
            if count + (self.n - depth) <= self.best_size {
                return;
            }
            if depth == self.n {
                self.best = chosen;
                self.best_size = count;
                return;
            }
            // Include first: an edge can only become fully chosen when its
            // last vertex goes in.
            let with = chosen | (1 << depth);
            let violated = self.edges_by_last[depth].iter().any(|&e| e & with == e);
            if !violated {
                self.go(depth + 1, with, count + 1);
            }
            self.go(depth + 1, chosen, count);
        }
    }
    let mut search = Search { n, edges_by_last: &edges_by_last, best: 0, best_size: 0 };
    search.go(0, 0, 0);

    let witness: Vec<u32> = (0..n)
        .filter(|&i| (search.best >> position[i]) & 1 == 1)
        .map(|i| i as u32)
        .collect();
    let result = MaxIndependentSet { size: search.best_size, witness };
    if !verify_independent(input, &result.witness) || result.witness.len() != result.size {
        return Err(Error::Invariant("independent-set witness failed re-verification".into()));
    }
    Ok(result)
}

/// Witnessed q-colorability by backtracking with first-vertex symmetry
/// breaking; colors per vertex id, or `None` when not q-colorable.
pub fn q_coloring(input: &OracleInput, q: u8) -> Option<Vec<u8>> {
    if q == 0 {
        return if input.n == 0 { Some(Vec::new()) } else { None };
    }
    // Edges indexed by their last vertex in coloring order; an edge can only
    // become monochromatic when its final vertex is colored.
    let n = input.n;
    let mut degree = vec![0usize; n];
    for e in &input.edges {
        for &v in e {
            degree[v as usize] += 1;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(degree[v]));
    let mut position = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        position[v] = i;
    }
    let mut edges_by_last: Vec<Vec<&[u32]>> = vec![Vec::new(); n.max(1)];
    for e in &input.edges {
        if e.len() == 1 {
            // A single-vertex not-all-equal edge is unsatisfiable.
            return None;
        }
        let last = e.iter().map(|&v| position[v as usize]).max().unwrap();
        edges_by_last[last].push(e);
    }

    fn go(
        depth: usize,
        order: &[usize],
        colors: &mut [u8],
        edges_by_last: &[Vec<&[u32]>],
        q: u8,
    ) -> bool {
        if depth == order.len() {
            return true;
        }
        let v = order[depth];
        // Symmetry breaking: the first vertex takes color 0.
        let trial_colors = if depth == 0 { 1 } else { q };
        for c in 0..trial_colors {
            colors[v] = c;
            let ok = edges_by_last[depth]
                .iter()
                .all(|e| e.iter().any(|&w| colors[w as usize] != colors[e[0] as usize]));
            if ok && go(depth + 1, order, colors, edges_by_last, q) {
                return true;
            }
        }
        colors[v] = u8::MAX;
        false
    }

    let mut colors = vec![u8::MAX; n];
    if go(0, &order, &mut colors, &edges_by_last, q) {
        debug_assert!(verify_coloring(input, &colors));
        Some(colors)
    } else {
        None
    }
}

/// Independent re-verification: no edge monochromatic.
pub fn verify_coloring(input: &OracleInput, colors: &[u8]) -> bool {
    colors.len() == input.n
        && input
            .edges
            .iter()
            .all(|e| e.iter().any(|&v| colors[v as usize] != colors[e[0] as usize]))
}

/// Witnessed covering result: assignments (one 0/1 vector per round) such
/// that every edge is not-all-equal under at least one of them.
#[derive(Clone, Debug)]
pub struct Covering {
    pub number: usize,
    pub assignments: Vec<Vec<u8>>,
}

/// Independent re-verification of a covering.
pub fn verify_cover(input: &OracleInput, assignments: &[Vec<u8>]) -> bool {
    input.edges.iter().all(|e| {
        assignments.iter().any(|a| e.iter().any(|&v| a[v as usize] != a[e[0] as usize]))
    })
}

/// Exact covering number of the not-all-equal CSP over Boolean assignments:
/// the least `t` such that `t` assignments cover every edge. A collection of
/// `t` assignments covers every edge iff the product coloring by `t`-bit
/// vectors is proper, so this searches `2^t`-colorability for growing `t`.
/// Single-vertex edges admit no finite cover and are rejected.
pub fn covering_number(input: &OracleInput, max_rounds: usize) -> Result<Covering> {
    if input.edges.iter().any(|e| e.len() <= 1) {
        return Err(Error::Invariant(
            "an edge with a single vertex is never covered; covering number is infinite".into(),
        ));
    }
    for t in 0..=max_rounds {
        if t == 0 {
            if input.edges.is_empty() {
                return Ok(Covering { number: 0, assignments: Vec::new() });
            }
            continue;
        }
        if t > 7 {
            break;
        }
        if let Some(colors) = q_coloring(input, 1 << t) {
            // Split the 2^t-coloring into t Boolean coordinate assignments.
            let assignments: Vec<Vec<u8>> = (0..t)
                .map(|bit| colors.iter().map(|&c| (c >> bit) & 1).collect())
                .collect();
            if !verify_cover(input, &assignments) {
                return Err(Error::Invariant("covering witness failed re-verification".into()));
            }
            return Ok(Covering { number: t, assignments });
        }
    }
    Err(Error::TooLarge(format!("no covering found within {max_rounds} assignments")))
}
