//! The two inner verifier tests, their exact acceptance analysis, and the
//! hypergraph materialization.
//!
//! The 8-query test fixes a triple `(u, v, w)` with `v, w` neighbors of `u`,
//! draws base points `X1, X2, Y1, Y2`, shift vectors and a matrix `F`, and
//! queries the folded functions at the base points and at structured offsets
//! of them; it accepts unless all eight values agree. The 4-query variant
//! reads the same eight points as four pairs against the paired-coset vertex
//! space.
//!
//! Exact expectations are computed by a factored enumeration: conditioned on
//! `(u, v, w, xbar, xbar', F)` the four base-point blocks are independent, so
//! each contributes an autocorrelation of the folded table averaged over its
//! private shift vector. The raw randomness space is far too large to walk;
//! this form is polynomial in the coset count and stays exact.

use crate::exact::{rat_int, Dyadic, Rat};
use crate::folding::{autocorrelation_counts, FoldedColoring, Mode, QuadraticCode};
use crate::gf2::{mat_inner, outer_product, BitMat, BitVec};
use crate::hypergraph::Hypergraph;
use crate::label_cover::{verify_labeling, LabelCoverInstance, PlantedLabeling};
use crate::{Error, Result};
use num_traits::Zero;
use rand::Rng;
use std::collections::{HashMap, HashSet};

/// One draw of the test's randomness.
#[derive(Clone, Debug)]
pub struct TestRandomness {
    pub u: usize,
    pub v: usize,
    pub w: usize,
    /// Edge indices realizing (u, v) and (u, w).
    pub edge_uv: usize,
    pub edge_uw: usize,
    pub x1: BitMat,
    pub x2: BitMat,
    pub y1: BitMat,
    pub y2: BitMat,
    pub xbar: BitVec,
    pub ybar: BitVec,
    pub zbar: BitVec,
    pub xbar_p: BitVec,
    pub ybar_p: BitVec,
    pub zbar_p: BitVec,
    pub f: BitMat,
}

/// The eight queried `(vertex, coset index)` pairs, in fixed order
/// `v:X1, v:X2, v:X3, v:X4, w:Y1, w:Y2, w:Y3, w:Y4`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryTuple8 {
    pub entries: [(usize, usize); 8],
}

/// The four paired queries of the 4-query test: `(vertex, pair index)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryTuple4 {
    pub entries: [(usize, usize); 4],
}

/// Draw test randomness uniformly.
pub fn sample_test_randomness(inst: &LabelCoverInstance, rng: &mut impl Rng) -> TestRandomness {
    let m = inst.m();
    let r = inst.r();
    let u = rng.gen_range(0..inst.n_u());
    let incident = inst.edges_of_u(u);
    let edge_uv = incident[rng.gen_range(0..incident.len())];
    let edge_uw = incident[rng.gen_range(0..incident.len())];
    let mut mat = |d: usize| BitMat::from_flat(d, d, rng.gen::<u64>());
    let x1 = mat(m);
    let x2 = mat(m);
    let y1 = mat(m);
    let y2 = mat(m);
    let f = mat(r);
    let mut vec = || BitVec::from_bits(m, rng.gen::<u64>());
    TestRandomness {
        u,
        v: inst.edges()[edge_uv].v,
        w: inst.edges()[edge_uw].v,
        edge_uv,
        edge_uw,
        x1,
        x2,
        y1,
        y2,
        xbar: vec(),
        ybar: vec(),
        zbar: vec(),
        xbar_p: vec(),
        ybar_p: vec(),
        zbar_p: vec(),
        f,
    }
}

/// The eight query matrices for a randomness draw, in tuple order.
pub fn query_matrices(inst: &LabelCoverInstance, tr: &TestRandomness) -> [BitMat; 8] {
    let m = inst.m();
    let e_m = BitVec::last_unit(m);
    let corner = outer_product(&e_m, &e_m);
    let f_pi = inst.edges()[tr.edge_uv].map.adjoint_apply(&tr.f);
    let f_sigma = inst.edges()[tr.edge_uw].map.adjoint_apply(&tr.f);
    let x3 = tr.x1 + outer_product(&tr.xbar, &tr.ybar) + f_pi;
    let x4 = tr.x2 + outer_product(&(tr.xbar + e_m), &tr.zbar) + f_pi;
    let y3 = tr.y1 + outer_product(&tr.xbar_p, &tr.ybar_p) + f_sigma + corner;
    let y4 = tr.y2 + outer_product(&(tr.xbar_p + e_m), &tr.zbar_p) + f_sigma + corner;
    [tr.x1, tr.x2, x3, x4, tr.y1, tr.y2, y3, y4]
}

/// Reduce a randomness draw to the eight queried cosets.
pub fn queries_28(inst: &LabelCoverInstance, tr: &TestRandomness) -> QueryTuple8 {
    let mats = query_matrices(inst, tr);
    let sv = inst.folding_space(tr.v);
    let sw = inst.folding_space(tr.w);
    let mut entries = [(0usize, 0usize); 8];
    for (i, mat) in mats.iter().enumerate() {
        let (vertex, space) = if i < 4 { (tr.v, sv) } else { (tr.w, sw) };
        entries[i] = (vertex, space.coset_index_of(mat));
    }
    QueryTuple8 { entries }
}

/// Sample the 8-query test: randomness plus the queried cosets.
pub fn sample_test_28(inst: &LabelCoverInstance, rng: &mut impl Rng) -> (TestRandomness, QueryTuple8) {
    let tr = sample_test_randomness(inst, rng);
    let q = queries_28(inst, &tr);
    (tr, q)
}

/// Reduce a randomness draw to the four paired queries.
pub fn queries_44(inst: &LabelCoverInstance, tr: &TestRandomness) -> QueryTuple4 {
    let q8 = queries_28(inst, tr);
    let cc_v = inst.folding_space(tr.v).coset_count();
    let cc_w = inst.folding_space(tr.w).coset_count();
    let pair = |a: (usize, usize), b: (usize, usize), cc: usize| (a.0, a.1 * cc + b.1);
    QueryTuple4 {
        entries: [
            pair(q8.entries[0], q8.entries[1], cc_v),
            pair(q8.entries[2], q8.entries[3], cc_v),
            pair(q8.entries[4], q8.entries[5], cc_w),
            pair(q8.entries[6], q8.entries[7], cc_w),
        ],
    }
}

/// Sample the 4-query test: the same randomness, queries paired.
pub fn sample_test_44(inst: &LabelCoverInstance, rng: &mut impl Rng) -> (TestRandomness, QueryTuple4) {
    let tr = sample_test_randomness(inst, rng);
    let q = queries_44(inst, &tr);
    (tr, q)
}

/// The not-all-equal acceptance predicate.
pub fn check_edge(colors: &[u8]) -> Result<bool> {
    if colors.len() < 2 {
        return Err(Error::InvalidParameter("need at least 2 queried colors".into()));
    }
    Ok(colors.iter().any(|&c| c != colors[0]))
}

/// Precomputed per-vertex tables for the factored expectation.
struct FactoredTables {
    /// Autocorrelation counts of the indicator over its domain index group.
    ac: Vec<Vec<i64>>,
    /// Coset index of `x ⊗ y` per vertex, indexed `[x_bits][y_bits]`.
    outer_idx: Vec<Vec<Vec<usize>>>,
}

impl FactoredTables {
    fn build(inst: &LabelCoverInstance, col: &FoldedColoring) -> Result<FactoredTables> {
        let mut ac = Vec::with_capacity(inst.n_v());
        for v in 0..inst.n_v() {
            ac.push(autocorrelation_counts(col.table(v)?));
        }
        Ok(FactoredTables { ac, outer_idx: outer_index_tables(inst) })
    }
}

/// Coset index of `x ⊗ y` for every vertex and every pair of vectors.
fn outer_index_tables(inst: &LabelCoverInstance) -> Vec<Vec<Vec<usize>>> {
    let m = inst.m();
    (0..inst.n_v())
        .map(|v| {
            let space = inst.folding_space(v);
            (0..1u64 << m)
                .map(|xb| {
                    let x = BitVec::from_bits(m, xb);
                    (0..1u64 << m)
                        .map(|yb| space.coset_index_of(&outer_product(&x, &BitVec::from_bits(m, yb))))
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Exact `E[prod of all queried indicator values]` for an indicator coloring:
/// zero iff the indicated set is independent in the materialized hypergraph.
pub fn independence_theta(inst: &LabelCoverInstance, col: &FoldedColoring) -> Result<Rat> {
    col.ensure_indicator()?;
    let tables = FactoredTables::build(inst, col)?;
    let mut total = Rat::zero();
    for u in 0..inst.n_u() {
        let weight = inst.triple_weight(u);
        for &e1 in inst.edges_of_u(u) {
            for &e2 in inst.edges_of_u(u) {
                let t = match col.mode() {
                    Mode::EightQuery => theta_triple_28(inst, &tables, e1, e2),
                    Mode::FourQuery => theta_triple_44(inst, &tables, e1, e2),
                };
                total += weight.clone() * t.to_rat();
            }
        }
    }
    Ok(total)
}

fn theta_triple_28(inst: &LabelCoverInstance, tables: &FactoredTables, e1: usize, e2: usize) -> Dyadic {
    let m = inst.m();
    let r = inst.r();
    let edge_v = &inst.edges()[e1];
    let edge_w = &inst.edges()[e2];
    let (v, w) = (edge_v.v, edge_w.v);
    let sv = inst.folding_space(v);
    let sw = inst.folding_space(w);
    let e_m = BitVec::last_unit(m);
    let corner = outer_product(&e_m, &e_m);
    let corner_idx_w = sw.coset_index_of(&corner);

    let mut grand: i128 = 0;
    for f_bits in 0..1u64 << (r * r) {
        let f = BitMat::from_flat(r, r, f_bits);
        let base_v = sv.coset_index_of(&edge_v.map.adjoint_apply(&f));
        let base_w = sw.coset_index_of(&edge_w.map.adjoint_apply(&f)) ^ corner_idx_w;
        let s_v = side_sum_28(m, &tables.ac[v], &tables.outer_idx[v], base_v);
        let s_w = side_sum_28(m, &tables.ac[w], &tables.outer_idx[w], base_w);
        grand += s_v * s_w;
    }
    let exp = (r * r + 2 * m) as u32
        + 2 * (m as u32 + sv.index_bits())
        + 2 * (m as u32 + sw.index_bits());
    Dyadic::new(grand, exp)
}

/// `sum over xbar of P1(xbar) * P2(xbar)` in integer counts: `P1` sums the
/// autocorrelation over the first shift vector at offset `xbar ⊗ ybar`, `P2`
/// over the second at `(xbar + e_m) ⊗ zbar`, both translated by `base`.
fn side_sum_28(m: usize, ac: &[i64], outer_idx: &[Vec<usize>], base: usize) -> i128 {
    let last = 1usize << (m - 1);
    let mut sum: i128 = 0;
    for xb in 0..1usize << m {
        let row1 = &outer_idx[xb];
        let row2 = &outer_idx[xb ^ last];
        let p1: i64 = row1.iter().map(|&d| ac[d ^ base]).sum();
        let p2: i64 = row2.iter().map(|&d| ac[d ^ base]).sum();
        sum += p1 as i128 * p2 as i128;
    }
    sum
}

fn theta_triple_44(inst: &LabelCoverInstance, tables: &FactoredTables, e1: usize, e2: usize) -> Dyadic {
    let m = inst.m();
    let r = inst.r();
    let edge_v = &inst.edges()[e1];
    let edge_w = &inst.edges()[e2];
    let (v, w) = (edge_v.v, edge_w.v);
    let sv = inst.folding_space(v);
    let sw = inst.folding_space(w);
    let e_m = BitVec::last_unit(m);
    let corner = outer_product(&e_m, &e_m);
    let corner_idx_w = sw.coset_index_of(&corner);

    let mut grand: i128 = 0;
    for f_bits in 0..1u64 << (r * r) {
        let f = BitMat::from_flat(r, r, f_bits);
        let base_v = sv.coset_index_of(&edge_v.map.adjoint_apply(&f));
        let base_w = sw.coset_index_of(&edge_w.map.adjoint_apply(&f)) ^ corner_idx_w;
        let s_v = side_sum_44(m, sv.index_bits(), &tables.ac[v], &tables.outer_idx[v], base_v);
        let s_w = side_sum_44(m, sw.index_bits(), &tables.ac[w], &tables.outer_idx[w], base_w);
        grand += s_v * s_w;
    }
    let exp = (r * r + 2 * m) as u32
        + (2 * m as u32 + 2 * sv.index_bits())
        + (2 * m as u32 + 2 * sw.index_bits());
    Dyadic::new(grand, exp)
}

/// `sum over xbar, ybar, zbar of ac2 at the packed pair offset`: the paired
/// autocorrelation absorbs both shifts of one side at once.
fn side_sum_44(m: usize, t: u32, ac2: &[i64], outer_idx: &[Vec<usize>], base: usize) -> i128 {
    let last = 1usize << (m - 1);
    let mut sum: i128 = 0;
    for xb in 0..1usize << m {
        let row1 = &outer_idx[xb];
        let row2 = &outer_idx[xb ^ last];
        let mut part: i64 = 0;
        for &d1 in row1 {
            let hi = (d1 ^ base) << t;
            for &d2 in row2 {
                part += ac2[hi | (d2 ^ base)];
            }
        }
        sum += part as i128;
    }
    sum
}

/// Exact acceptance probability of a coloring under its mode's test:
/// `1 - sum over colors c of Pr[all queried values equal c]`.
pub fn acceptance_probability(inst: &LabelCoverInstance, col: &FoldedColoring) -> Result<Rat> {
    let mut reject = Rat::zero();
    for c in 0..col.mode().colors() as u8 {
        reject += independence_theta(inst, &col.class_indicator(c))?;
    }
    Ok(rat_int(1) - reject)
}

/// The honest coloring induced by a planted labeling: evaluate the quadratic
/// code of `y_v` on coset representatives (pairs of them in 4-query mode,
/// first coordinate in the high bit).
pub fn honest_coloring(inst: &LabelCoverInstance, lab: &PlantedLabeling, mode: Mode) -> FoldedColoring {
    let tables: Vec<Vec<u8>> = (0..inst.n_v())
        .map(|v| {
            let space = inst.folding_space(v);
            let code = QuadraticCode::new(&lab.y[v]);
            let cc = space.coset_count();
            let per_coset: Vec<u8> = (0..cc).map(|i| code.eval(&space.rep_matrix(i))).collect();
            match mode {
                Mode::EightQuery => per_coset,
                Mode::FourQuery => {
                    let mut t = Vec::with_capacity(cc * cc);
                    for &a in &per_coset {
                        for &b in &per_coset {
                            t.push((a << 1) | b);
                        }
                    }
                    t
                }
            }
        })
        .collect();
    FoldedColoring::new(mode, tables, inst.folding_spaces()).expect("honest tables are well-formed")
}

/// Verify the reduced forms the honest assignment takes at the query points:
/// rank-one offsets contribute `<y, xbar><y, ybar>`, the projected `F` offset
/// contributes `<F, x_u ⊗ x_u>`, and the corner offset the constant 1.
fn verify_honest_query_forms(inst: &LabelCoverInstance, lab: &PlantedLabeling) -> Result<()> {
    let m = inst.m();
    let r = inst.r();
    let e_m = BitVec::last_unit(m);
    let corner = outer_product(&e_m, &e_m);
    for edge in inst.edges() {
        let y = &lab.y[edge.v];
        let yy = outer_product(y, y);
        let xx = outer_product(&lab.x[edge.u], &lab.x[edge.u]);
        for xb in 0..1u64 << m {
            let xbar = BitVec::from_bits(m, xb);
            for yb in 0..1u64 << m {
                let ybar = BitVec::from_bits(m, yb);
                let direct = mat_inner(&outer_product(&xbar, &ybar), &yy);
                if direct != y.dot(&xbar) * y.dot(&ybar) {
                    return Err(Error::Invariant("rank-one offset form mismatch".into()));
                }
            }
        }
        for f_bits in 0..1u64 << (r * r) {
            let f = BitMat::from_flat(r, r, f_bits);
            if mat_inner(&edge.map.adjoint_apply(&f), &yy) != mat_inner(&f, &xx) {
                return Err(Error::Invariant("projected offset form mismatch".into()));
            }
        }
        if mat_inner(&corner, &yy) != 1 {
            return Err(Error::Invariant("corner offset form mismatch".into()));
        }
    }
    Ok(())
}

/// Exact acceptance probability of the honest coloring on a satisfiable
/// instance. Validates the labeling and the reduced query-value forms first.
pub fn completeness_check(inst: &LabelCoverInstance, lab: &PlantedLabeling, mode: Mode) -> Result<Rat> {
    let report = verify_labeling(inst, lab)?;
    if !report.all_ok() {
        return Err(Error::InvalidLabeling(format!(
            "satisfied fraction {}, {} last-coordinate and {} constraint violations",
            report.satisfied_fraction,
            report.last_coord_violations.len(),
            report.constraint_violations.len()
        )));
    }
    verify_honest_query_forms(inst, lab)?;
    acceptance_probability(inst, &honest_coloring(inst, lab, mode))
}

/// Monte-Carlo estimate of the independence expectation by sampling the raw
/// test distribution; an independent cross-check of the factored enumeration.
#[derive(Clone, Debug)]
pub struct McEstimate {
    pub trials: u64,
    pub hits: u64,
    pub mean: f64,
    /// Half-width of a 95% normal confidence interval.
    pub ci95: f64,
}

pub fn monte_carlo_theta(
    inst: &LabelCoverInstance,
    col: &FoldedColoring,
    trials: u64,
    rng: &mut impl Rng,
) -> Result<McEstimate> {
    col.ensure_indicator()?;
    let mut hits = 0u64;
    for _ in 0..trials {
        let tr = sample_test_randomness(inst, rng);
        let all_one = match col.mode() {
            Mode::EightQuery => queries_28(inst, &tr)
                .entries
                .iter()
                .all(|&(vertex, idx)| col.value(vertex, idx) == 1),
            Mode::FourQuery => queries_44(inst, &tr)
                .entries
                .iter()
                .all(|&(vertex, idx)| col.value(vertex, idx) == 1),
        };
        if all_one {
            hits += 1;
        }
    }
    let mean = hits as f64 / trials as f64;
    let ci95 = 1.96 * (mean * (1.0 - mean) / trials as f64).sqrt();
    Ok(McEstimate { trials, hits, mean, ci95 })
}

/// Resource limits for hypergraph materialization.
#[derive(Clone, Copy, Debug)]
pub struct BuildLimits {
    /// Upper bound on candidate edge emissions before refusing.
    pub max_edge_candidates: u64,
}

impl Default for BuildLimits {
    fn default() -> Self {
        BuildLimits { max_edge_candidates: 50_000_000 }
    }
}

/// Offset-pair multiplicities for one side of the test at fixed `(edge, F)`:
/// how many shift draws land on each pair of coset offsets.
fn offset_pair_counts(m: usize, outer_idx: &[Vec<usize>], base: usize) -> HashMap<(u16, u16), u64> {
    let last = 1usize << (m - 1);
    let mut counts: HashMap<(u16, u16), u64> = HashMap::new();
    for xb in 0..1usize << m {
        let mut first: HashMap<u16, u64> = HashMap::new();
        for &d in &outer_idx[xb] {
            *first.entry((d ^ base) as u16).or_default() += 1;
        }
        let mut second: HashMap<u16, u64> = HashMap::new();
        for &d in &outer_idx[xb ^ last] {
            *second.entry((d ^ base) as u16).or_default() += 1;
        }
        for (&d1, &c1) in &first {
            for (&d2, &c2) in &second {
                *counts.entry((d1, d2)).or_default() += c1 * c2;
            }
        }
    }
    counts
}

/// Materialize the test's hypergraph: vertices are cosets (or coset pairs),
/// edges are the distinct-vertex sets queried together, deduplicated.
///
/// Base points are enumerated by coset representative only; the queried
/// vertex set depends on them only through their cosets. Outcomes whose
/// queries collapse to a single vertex are dropped and counted.
pub fn build_hypergraph(
    inst: &LabelCoverInstance,
    mode: Mode,
    limits: &BuildLimits,
) -> Result<Hypergraph> {
    let m = inst.m();
    let e_m = BitVec::last_unit(m);
    let corner = outer_product(&e_m, &e_m);
    let outer_idx = outer_index_tables(inst);

    let block_sizes: Vec<usize> = (0..inst.n_v())
        .map(|v| {
            let cc = inst.folding_space(v).coset_count();
            match mode {
                Mode::EightQuery => cc,
                Mode::FourQuery => cc * cc,
            }
        })
        .collect();
    let mut offsets = Vec::with_capacity(block_sizes.len());
    let mut acc = 0usize;
    for &s in &block_sizes {
        offsets.push(acc);
        acc += s;
    }

    // First pass: refuse oversized enumerations before doing the work.
    let mut estimate: u64 = 0;
    for_each_triple_f(inst, |edge_v, edge_w, f| {
        let sv = inst.folding_space(edge_v.v);
        let sw = inst.folding_space(edge_w.v);
        let base_v = sv.coset_index_of(&edge_v.map.adjoint_apply(f));
        let base_w = sw.coset_index_of(&edge_w.map.adjoint_apply(f)) ^ sw.coset_index_of(&corner);
        let dv = offset_pair_counts(m, &outer_idx[edge_v.v], base_v).len() as u64;
        let dw = offset_pair_counts(m, &outer_idx[edge_w.v], base_w).len() as u64;
        let (cc_v, cc_w) = (sv.coset_count() as u64, sw.coset_count() as u64);
        estimate = estimate.saturating_add((dv * cc_v * cc_v) * (dw * cc_w * cc_w));
    });
    if estimate > limits.max_edge_candidates {
        return Err(Error::TooLarge(format!(
            "hypergraph enumeration needs about {estimate} candidate edges (cap {})",
            limits.max_edge_candidates
        )));
    }

    let mut edges: HashSet<u128> = HashSet::new();
    let mut collapsed: u64 = 0;
    for_each_triple_f(inst, |edge_v, edge_w, f| {
        let (v, w) = (edge_v.v, edge_w.v);
        let sv = inst.folding_space(v);
        let sw = inst.folding_space(w);
        let base_v = sv.coset_index_of(&edge_v.map.adjoint_apply(f));
        let base_w = sw.coset_index_of(&edge_w.map.adjoint_apply(f)) ^ sw.coset_index_of(&corner);
        let dv = offset_pair_counts(m, &outer_idx[v], base_v);
        let dw = offset_pair_counts(m, &outer_idx[w], base_w);
        let (cc_v, cc_w) = (sv.coset_count(), sw.coset_count());

        if v == w {
            let zero_v = dv.get(&(0, 0)).copied().unwrap_or(0);
            let zero_w = dw.get(&(0, 0)).copied().unwrap_or(0);
            collapsed += zero_v * zero_w * block_sizes[v] as u64;
        }

        let parts_v = side_parts(mode, &dv, cc_v, offsets[v] as u32, sv.index_bits());
        let parts_w = side_parts(mode, &dw, cc_w, offsets[w] as u32, sw.index_bits());
        for pv in &parts_v {
            for pw in &parts_w {
                if let Some(key) = union_key(pv, pw) {
                    edges.insert(key);
                }
            }
        }
    });

    let mut edge_list: Vec<u128> = edges.into_iter().collect();
    edge_list.sort_unstable();
    let edges = edge_list.iter().map(|&k| unpack_edge(k)).collect();
    Hypergraph::new(mode, &block_sizes, edges, collapsed)
}

fn for_each_triple_f(
    inst: &LabelCoverInstance,
    mut body: impl FnMut(&crate::label_cover::Edge, &crate::label_cover::Edge, &BitMat),
) {
    let r = inst.r();
    for u in 0..inst.n_u() {
        for &e1 in inst.edges_of_u(u) {
            for &e2 in inst.edges_of_u(u) {
                for f_bits in 0..1u64 << (r * r) {
                    let f = BitMat::from_flat(r, r, f_bits);
                    body(&inst.edges()[e1], &inst.edges()[e2], &f);
                }
            }
        }
    }
}

/// One side's query-vertex sets over base-point cosets: for the 8-query test
/// `{c1, c1+d1, c2, c2+d2}`, for the 4-query test the paired `{p, p+d}`.
fn side_parts(
    mode: Mode,
    deltas: &HashMap<(u16, u16), u64>,
    cc: usize,
    offset: u32,
    t: u32,
) -> Vec<Part> {
    let mut parts: HashSet<Part> = HashSet::new();
    match mode {
        Mode::EightQuery => {
            for &(d1, d2) in deltas.keys() {
                for c1 in 0..cc as u16 {
                    for c2 in 0..cc as u16 {
                        parts.insert(Part::from_ids(&[
                            offset + c1 as u32,
                            offset + (c1 ^ d1) as u32,
                            offset + c2 as u32,
                            offset + (c2 ^ d2) as u32,
                        ]));
                    }
                }
            }
        }
        Mode::FourQuery => {
            for &(d1, d2) in deltas.keys() {
                let d = ((d1 as u32) << t) | d2 as u32;
                for p in 0..(cc * cc) as u32 {
                    parts.insert(Part::from_ids(&[offset + p, offset + (p ^ d)]));
                }
            }
        }
    }
    parts.into_iter().collect()
}

/// Up to four sorted distinct vertex ids, packed 16 bits each.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct Part {
    ids: [u16; 4],
    len: u8,
}

impl Part {
    fn from_ids(raw: &[u32]) -> Part {
        let mut ids = [0u16; 4];
        let mut len = 0usize;
        for &id in raw {
            let id = id as u16;
            if !ids[..len].contains(&id) {
                ids[len] = id;
                len += 1;
            }
        }
        ids[..len].sort_unstable();
        Part { ids, len: len as u8 }
    }
}

/// Sorted union of two parts as a packed 128-bit key of eight 16-bit slots,
/// unused slots filled with `0xffff` (never a valid id: the vertex count is
/// capped below it). `None` when the union is a single vertex.
fn union_key(a: &Part, b: &Part) -> Option<u128> {
    let mut ids = [0u16; 8];
    let mut len = 0usize;
    for &id in a.ids[..a.len as usize].iter().chain(&b.ids[..b.len as usize]) {
        if !ids[..len].contains(&id) {
            ids[len] = id;
            len += 1;
        }
    }
    if len < 2 {
        return None;
    }
    ids[..len].sort_unstable();
    let mut key: u128 = 0;
    for slot in 0..8 {
        let word = if slot < len { ids[slot] } else { 0xffff };
        key = (key << 16) | word as u128;
    }
    Some(key)
}

fn unpack_edge(key: u128) -> Vec<u32> {
    (0..8)
        .rev()
        .map(|slot| ((key >> (16 * slot)) & 0xffff) as u32)
        .filter(|&id| id != 0xffff)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label_cover::{generate_yes_instance, GenParams};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn default_instance(seed: u64) -> (LabelCoverInstance, PlantedLabeling) {
        generate_yes_instance(&GenParams { seed, ..GenParams::default() }).unwrap()
    }

    #[test]
    fn check_edge_cases() {
        assert!(!check_edge(&[0, 0, 0, 0, 0, 0, 0, 0]).unwrap());
        assert!(check_edge(&[0, 0, 0, 0, 0, 0, 0, 1]).unwrap());
        // 4-color case: pair values encoded in 2 bits.
        assert!(check_edge(&[0b01, 0b01, 0b01, 0b11]).unwrap());
        assert!(check_edge(&[1]).is_err());
        assert!(check_edge(&[]).is_err());
    }

    #[test]
    fn query_offsets_satisfy_identities() {
        let (inst, _) = default_instance(2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10_000 {
            let tr = sample_test_randomness(&inst, &mut rng);
            let mats = query_matrices(&inst, &tr);
            let f_pi = inst.edges()[tr.edge_uv].map.adjoint_apply(&tr.f);
            assert_eq!(mats[2] + mats[0], outer_product(&tr.xbar, &tr.ybar) + f_pi);
            let e_m = BitVec::last_unit(inst.m());
            assert_eq!(mats[3] + mats[1], outer_product(&(tr.xbar + e_m), &tr.zbar) + f_pi);
        }
    }

    #[test]
    fn forced_zero_shift_hook() {
        // With xbar = 0 and zbar = 0 the second offset degenerates to F ∘ pi.
        let (inst, _) = default_instance(2);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut tr = sample_test_randomness(&inst, &mut rng);
        tr.xbar = BitVec::zero(inst.m());
        tr.zbar = BitVec::zero(inst.m());
        let mats = query_matrices(&inst, &tr);
        let f_pi = inst.edges()[tr.edge_uv].map.adjoint_apply(&tr.f);
        assert_eq!(mats[3], tr.x2 + f_pi);
    }

    #[test]
    fn base_coset_distribution_uniform() {
        // Frequency check: each coset of X1 within 3 sigma of uniform.
        let (inst, _) = default_instance(3);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let trials = 100_000usize;
        let mut counts: HashMap<(usize, usize), usize> = HashMap::new();
        for _ in 0..trials {
            let (_, q) = sample_test_28(&inst, &mut rng);
            *counts.entry(q.entries[0]).or_default() += 1;
        }
        let mut per_vertex: HashMap<usize, usize> = HashMap::new();
        for (&(v, _), &c) in &counts {
            *per_vertex.entry(v).or_default() += c;
        }
        for (&(v, _), &c) in &counts {
            let total = per_vertex[&v] as f64;
            let cc = inst.folding_space(v).coset_count() as f64;
            let p = 1.0 / cc;
            let sigma = (total * p * (1.0 - p)).sqrt();
            assert!(
                (c as f64 - total * p).abs() <= 3.0 * sigma + 1.0,
                "coset frequency off at v={v}: {c} of {total}"
            );
        }
    }

    #[test]
    fn paired_queries_project_to_underlying_cosets() {
        let (inst, _) = default_instance(4);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..1000 {
            let tr = sample_test_randomness(&inst, &mut rng);
            let q8 = queries_28(&inst, &tr);
            let q4 = queries_44(&inst, &tr);
            let cc_v = inst.folding_space(tr.v).coset_count();
            let cc_w = inst.folding_space(tr.w).coset_count();
            assert_eq!(q4.entries[0], (tr.v, q8.entries[0].1 * cc_v + q8.entries[1].1));
            assert_eq!(q4.entries[1], (tr.v, q8.entries[2].1 * cc_v + q8.entries[3].1));
            assert_eq!(q4.entries[2], (tr.w, q8.entries[4].1 * cc_w + q8.entries[5].1));
            assert_eq!(q4.entries[3], (tr.w, q8.entries[6].1 * cc_w + q8.entries[7].1));
        }
    }

    #[test]
    fn sampling_deterministic_under_seed() {
        let (inst, _) = default_instance(5);
        let mut a = ChaCha8Rng::seed_from_u64(123);
        let mut b = ChaCha8Rng::seed_from_u64(123);
        for _ in 0..100 {
            assert_eq!(sample_test_44(&inst, &mut a).1, sample_test_44(&inst, &mut b).1);
        }
    }

    #[test]
    fn honest_acceptance_is_one_both_modes() {
        for seed in 0..5 {
            let (inst, lab) = default_instance(seed);
            assert_eq!(completeness_check(&inst, &lab, Mode::EightQuery).unwrap(), rat_int(1));
            assert_eq!(completeness_check(&inst, &lab, Mode::FourQuery).unwrap(), rat_int(1));
        }
    }

    #[test]
    fn constant_coloring_never_accepts() {
        let (inst, _) = default_instance(6);
        let tables = (0..inst.n_v())
            .map(|v| vec![0u8; inst.folding_space(v).coset_count()])
            .collect();
        let col = FoldedColoring::new(Mode::EightQuery, tables, inst.folding_spaces()).unwrap();
        assert_eq!(acceptance_probability(&inst, &col).unwrap(), rat_int(0));
    }

    #[test]
    fn all_ones_indicator_theta_is_one() {
        let (inst, _) = default_instance(7);
        let tables = (0..inst.n_v())
            .map(|v| vec![1u8; inst.folding_space(v).coset_count()])
            .collect();
        let col = FoldedColoring::new(Mode::EightQuery, tables, inst.folding_spaces()).unwrap();
        assert_eq!(independence_theta(&inst, &col).unwrap(), rat_int(1));
    }

    #[test]
    fn honest_class_is_independent() {
        for seed in 0..5 {
            let (inst, lab) = default_instance(seed);
            let honest = honest_coloring(&inst, &lab, Mode::EightQuery);
            for c in 0..2 {
                assert_eq!(
                    independence_theta(&inst, &honest.class_indicator(c)).unwrap(),
                    rat_int(0)
                );
            }
        }
    }

    #[test]
    fn rejects_non_indicator() {
        let (inst, lab) = default_instance(8);
        let honest = honest_coloring(&inst, &lab, Mode::FourQuery);
        assert!(matches!(independence_theta(&inst, &honest), Err(Error::NotIndicator(_))));
    }

    #[test]
    fn hypergraph_vertex_count_and_replay() {
        let (inst, lab) = default_instance(9);
        let h = build_hypergraph(&inst, Mode::EightQuery, &BuildLimits::default()).unwrap();
        let expected: usize = (0..inst.n_v()).map(|v| inst.folding_space(v).coset_count()).sum();
        assert_eq!(h.n(), expected);
        assert_eq!(h.collapsed(), 0);

        // Replay: every materialized edge accepts under honest colors.
        let honest = honest_coloring(&inst, &lab, Mode::EightQuery);
        let colors = h.colors_from(&honest).unwrap();
        for e in h.edges() {
            let cs: Vec<u8> = e.iter().map(|&id| colors[id as usize]).collect();
            assert!(check_edge(&cs).unwrap());
        }
        assert_eq!(h.monochromatic_edges(&colors), 0);
    }

    #[test]
    fn hypergraph_44_vertex_space() {
        let (inst, lab) = default_instance(10);
        let h = build_hypergraph(&inst, Mode::FourQuery, &BuildLimits::default()).unwrap();
        let expected: usize = (0..inst.n_v())
            .map(|v| {
                let cc = inst.folding_space(v).coset_count();
                cc * cc
            })
            .sum();
        assert_eq!(h.n(), expected);
        let honest = honest_coloring(&inst, &lab, Mode::FourQuery);
        let colors = h.colors_from(&honest).unwrap();
        assert_eq!(h.monochromatic_edges(&colors), 0);
    }

    #[test]
    fn hypergraph_deterministic() {
        let (inst, _) = default_instance(11);
        let a = build_hypergraph(&inst, Mode::EightQuery, &BuildLimits::default()).unwrap();
        let b = build_hypergraph(&inst, Mode::EightQuery, &BuildLimits::default()).unwrap();
        assert_eq!(a.edges(), b.edges());
        assert_eq!(a.collapsed(), b.collapsed());
    }

    #[test]
    fn limits_refused_with_estimate() {
        let (inst, _) = default_instance(12);
        let err = build_hypergraph(&inst, Mode::EightQuery, &BuildLimits { max_edge_candidates: 10 });
        match err {
            Err(Error::TooLarge(msg)) => assert!(msg.contains("candidate edges")),
            other => panic!("expected refusal, got {other:?}"),
        }
    }

    #[test]
    fn theta_zero_iff_no_contained_edge() {
        // Cross-check the factored expectation against a literal scan of the
        // materialized hypergraph.
        let (inst, _) = default_instance(13);
        let h = build_hypergraph(&inst, Mode::EightQuery, &BuildLimits::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..40 {
            let col = FoldedColoring::random(Mode::EightQuery, inst.folding_spaces(), &mut rng);
            let theta = independence_theta(&inst, &col).unwrap();
            let ids = h.indicator_vertex_ids(&col).unwrap();
            assert_eq!(theta.is_zero(), !h.has_contained_edge(&ids));
        }
    }

    #[test]
    fn theta_zero_iff_no_contained_edge_paired() {
        let (inst, _) = default_instance(15);
        let h = build_hypergraph(&inst, Mode::FourQuery, &BuildLimits::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for _ in 0..20 {
            // Sparse random indicators keep some independent sets in play.
            let tables: Vec<Vec<u8>> = (0..inst.n_v())
                .map(|v| {
                    let size = FoldedColoring::domain_size_for(Mode::FourQuery, inst.folding_space(v));
                    (0..size).map(|_| u8::from(rng.gen_ratio(1, 4))).collect()
                })
                .collect();
            let col = FoldedColoring::new(Mode::FourQuery, tables, inst.folding_spaces()).unwrap();
            let theta = independence_theta(&inst, &col).unwrap();
            let ids = h.indicator_vertex_ids(&col).unwrap();
            assert_eq!(theta.is_zero(), !h.has_contained_edge(&ids));
        }
    }

    #[test]
    fn monte_carlo_brackets_exact_value() {
        let (inst, lab) = default_instance(14);
        let mut rng = ChaCha8Rng::seed_from_u64(17);

        // Honest class: exactly zero, so every sample must miss.
        let honest = honest_coloring(&inst, &lab, Mode::EightQuery).class_indicator(0);
        let est = monte_carlo_theta(&inst, &honest, 20_000, &mut rng).unwrap();
        assert_eq!(est.hits, 0);

        // Random indicator: the exact value lies inside a widened interval.
        for seed in 0..3 {
            let mut crng = ChaCha8Rng::seed_from_u64(seed);
            let col = FoldedColoring::random(Mode::EightQuery, inst.folding_spaces(), &mut crng);
            let exact = crate::exact::rat_to_f64(&independence_theta(&inst, &col).unwrap());
            let est = monte_carlo_theta(&inst, &col, 40_000, &mut rng).unwrap();
            let slack = 2.6 * est.ci95 + 1e-9;
            assert!(
                (est.mean - exact).abs() <= slack,
                "mc {} vs exact {exact} (slack {slack})",
                est.mean
            );
        }
    }
}
