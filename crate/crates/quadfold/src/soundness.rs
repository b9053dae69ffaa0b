//! Fourier-side independence analysis: the expectation over the 8-query test
//! expanded over Walsh coefficients, its rank/sign decomposition, the
//! decoding strategy that bounds the signed low-rank part, and the rank
//! probability bound for the high-rank part.
//!
//! All quantities are exact. Per-triple sums are dyadic; aggregates over
//! vertices are big rationals. Everything here is for the 8-query test.

use crate::exact::{le_half_k_bound, Dyadic, Rat};
use crate::folding::{corner_bit, coset_spectrum, FoldedColoring, Mode};
use crate::gf2::{solve_affine, BitMat, BitVec, MatrixMap};
use crate::label_cover::LabelCoverInstance;
use crate::{Error, Result};
use num_traits::{Signed, ToPrimitive, Zero};
use std::collections::HashMap;

/// Hard cap on index-quadruple enumeration per triple.
const MAX_QUADRUPLE_TERMS: u64 = 1 << 24;

/// Exact `Pr over uniform x of [alpha x = b]`: `2^(-rank alpha)` when the
/// affine system is consistent, zero otherwise.
pub fn rank_prob(alpha: &BitMat, b: &BitVec) -> Dyadic {
    assert_eq!(alpha.rows(), b.len(), "dimension mismatch");
    let rows: Vec<u64> = (0..alpha.rows()).map(|i| alpha.row_bits(i)).collect();
    match solve_affine(&rows, b.bits(), alpha.cols()) {
        Some((_, dim)) => Dyadic::pow2_inv((alpha.cols() - dim) as u32),
        None => Dyadic::ZERO,
    }
}

/// Exact `Pr over uniform x of [g1 x = 0 and g2 x = g2 e_m]`, the shift-vector
/// probability attached to one side's index pair. Solved as one stacked
/// affine system; the joint rank is at least `rank(g1 + g2)`.
pub fn pair_shift_prob(g1: &BitMat, g2: &BitMat) -> Dyadic {
    let m = g1.cols();
    assert_eq!((g1.rows(), g2.rows(), g2.cols()), (m, m, m), "shape mismatch");
    let mut rows = Vec::with_capacity(2 * m);
    let mut rhs = 0u64;
    for i in 0..m {
        rows.push(g1.row_bits(i));
    }
    for i in 0..m {
        rows.push(g2.row_bits(i));
        rhs |= (g2.get(i, m - 1) as u64) << (m + i);
    }
    match solve_affine(&rows, rhs, m) {
        Some((_, dim)) => Dyadic::pow2_inv((m - dim) as u32),
        None => Dyadic::ZERO,
    }
}

/// Walsh support of one vertex's folded indicator, with coefficient lookup.
#[derive(Clone, Debug)]
pub struct VertexSpectrum {
    entries: Vec<(BitMat, Dyadic)>,
    by_mat: HashMap<u64, Dyadic>,
    parseval: Dyadic,
}

impl VertexSpectrum {
    pub fn entries(&self) -> &[(BitMat, Dyadic)] {
        &self.entries
    }

    pub fn coeff(&self, alpha: &BitMat) -> Dyadic {
        self.by_mat.get(&alpha.flat_bits()).copied().unwrap_or(Dyadic::ZERO)
    }

    /// Coefficient at zero: the indicator's density.
    pub fn density(&self) -> Dyadic {
        self.by_mat.get(&0).copied().unwrap_or(Dyadic::ZERO)
    }

    pub fn parseval_mass(&self) -> Dyadic {
        self.parseval
    }
}

/// Per-vertex spectra of an indicator coloring (8-query mode only).
pub fn vertex_spectra(inst: &LabelCoverInstance, col: &FoldedColoring) -> Result<Vec<VertexSpectrum>> {
    col.ensure_indicator()?;
    if col.mode() != Mode::EightQuery {
        return Err(Error::InvalidParameter(
            "the Fourier decomposition applies to the 8-query test".into(),
        ));
    }
    let mut out = Vec::with_capacity(inst.n_v());
    for v in 0..inst.n_v() {
        let entries = coset_spectrum(col.table(v)?, inst.folding_space(v));
        let by_mat: HashMap<u64, Dyadic> =
            entries.iter().map(|(mat, c)| (mat.flat_bits(), *c)).collect();
        let parseval = entries.iter().fold(Dyadic::ZERO, |acc, (_, c)| acc + c.square());
        out.push(VertexSpectrum { entries, by_mat, parseval });
    }
    Ok(out)
}

/// One summand of the Fourier-expanded test expectation for fixed
/// projections: zero unless `pi(a1 + a2) = sigma(b1 + b2)`, otherwise the
/// product of squared coefficients, both shift probabilities, and the sign
/// read off the corner bit of `b1 + b2`.
#[allow(clippy::too_many_arguments)]
pub fn compute_term(
    pi: &MatrixMap,
    sigma: &MatrixMap,
    a1: &BitMat,
    a2: &BitMat,
    b1: &BitMat,
    b2: &BitMat,
    spec_v: &VertexSpectrum,
    spec_w: &VertexSpectrum,
) -> Dyadic {
    if pi.apply(&(*a1 + *a2)) != sigma.apply(&(*b1 + *b2)) {
        return Dyadic::ZERO;
    }
    let c = spec_v.coeff(a1).square()
        * spec_v.coeff(a2).square()
        * spec_w.coeff(b1).square()
        * spec_w.coeff(b2).square();
    if c.is_zero() {
        return Dyadic::ZERO;
    }
    let value = c * pair_shift_prob(a1, a2) * pair_shift_prob(b1, b2);
    if corner_bit(&(*b1 + *b2)) == 1 {
        -value
    } else {
        value
    }
}

/// The test expectation summed over the Walsh supports, term by term. Must
/// agree exactly with the factored direct evaluation.
pub fn compute_theta_fourier(inst: &LabelCoverInstance, col: &FoldedColoring) -> Result<Rat> {
    let spectra = vertex_spectra(inst, col)?;
    let mut total = Rat::zero();
    for u in 0..inst.n_u() {
        let weight = inst.triple_weight(u);
        for &e1 in inst.edges_of_u(u) {
            for &e2 in inst.edges_of_u(u) {
                let edge_v = &inst.edges()[e1];
                let edge_w = &inst.edges()[e2];
                let sv = &spectra[edge_v.v];
                let sw = &spectra[edge_w.v];
                let terms = (sv.entries.len() as u64).pow(2) * (sw.entries.len() as u64).pow(2);
                if terms > MAX_QUADRUPLE_TERMS {
                    return Err(Error::TooLarge(format!(
                        "{terms} index quadruples on one triple (cap {MAX_QUADRUPLE_TERMS})"
                    )));
                }
                let mut triple = Dyadic::ZERO;
                for (a1, _) in &sv.entries {
                    for (a2, _) in &sv.entries {
                        for (b1, _) in &sw.entries {
                            for (b2, _) in &sw.entries {
                                triple +=
                                    compute_term(&edge_v.map, &edge_w.map, a1, a2, b1, b2, sv, sw);
                            }
                        }
                    }
                }
                total += weight.clone() * triple.to_rat();
            }
        }
    }
    Ok(total)
}

/// Distribution of the sum of two independently drawn support indices,
/// weighted by squared coefficients: the label distribution of the decoding
/// strategy. Sub-normalized (total mass is the squared Walsh mass).
fn pair_sum_distribution(spec: &VertexSpectrum, m: usize) -> Vec<(BitMat, Dyadic)> {
    let mut map: HashMap<u64, Dyadic> = HashMap::new();
    for (a1, c1) in &spec.entries {
        for (a2, c2) in &spec.entries {
            let sum = *a1 + *a2;
            *map.entry(sum.flat_bits()).or_insert(Dyadic::ZERO) += c1.square() * c2.square();
        }
    }
    let mut out: Vec<(BitMat, Dyadic)> = map
        .into_iter()
        .filter(|(_, p)| !p.is_zero())
        .map(|(bits, p)| (BitMat::from_flat(m, m, bits), p))
        .collect();
    out.sort_by_key(|(mat, _)| mat.flat_bits());
    out
}

/// Outcome of the randomized labeling strategy read off the spectra: draw an
/// index pair per side with probability proportional to squared coefficients,
/// label the projected sum on the `u` side and the raw sum on the `w` side.
#[derive(Clone, Debug)]
pub struct DecodingOutcome {
    /// Probability that a random edge is satisfied AND the drawn indices meet
    /// the low-rank, sign-1 conditions. Equals the coefficient-mass sum that
    /// bounds the signed low-rank part.
    pub success_probability: Rat,
    /// Probability that a random edge is satisfied, unconditioned.
    pub full_match_probability: Rat,
    /// Support of each vertex's label distribution.
    pub label_supports: Vec<Vec<BitMat>>,
    /// Every supported label is symmetric and satisfies the vertex's
    /// constraints (folding plus homogeneity of the constraints).
    pub homogeneity_ok: bool,
}

/// Evaluate the decoding strategy exactly.
pub fn decode_labeling(
    inst: &LabelCoverInstance,
    col: &FoldedColoring,
    k: u32,
) -> Result<DecodingOutcome> {
    let spectra = vertex_spectra(inst, col)?;
    let dists: Vec<Vec<(BitMat, Dyadic)>> =
        spectra.iter().map(|sp| pair_sum_distribution(sp, inst.m())).collect();

    let mut homogeneity_ok = true;
    for (v, dist) in dists.iter().enumerate() {
        for (label, _) in dist {
            if !label.is_symmetric() || !inst.satisfies_constraints(v, label) {
                homogeneity_ok = false;
            }
        }
    }

    let mut restricted = Rat::zero();
    let mut full = Rat::zero();
    for u in 0..inst.n_u() {
        let weight = inst.triple_weight(u);
        for &e1 in inst.edges_of_u(u) {
            for &e2 in inst.edges_of_u(u) {
                let edge_v = &inst.edges()[e1];
                let edge_w = &inst.edges()[e2];
                let mut triple_restricted = Dyadic::ZERO;
                let mut triple_full = Dyadic::ZERO;
                for (gv, pv) in &dists[edge_v.v] {
                    let proj_v = edge_v.map.apply(gv);
                    for (gw, pw) in &dists[edge_w.v] {
                        if edge_w.map.apply(gw) != proj_v {
                            continue;
                        }
                        let mass = *pv * *pw;
                        triple_full += mass;
                        if gv.rank() as u32 <= k && gw.rank() as u32 <= k && corner_bit(gw) == 1 {
                            triple_restricted += mass;
                        }
                    }
                }
                restricted += weight.clone() * triple_restricted.to_rat();
                full += weight.clone() * triple_full.to_rat();
            }
        }
    }
    Ok(DecodingOutcome {
        success_probability: restricted,
        full_match_probability: full,
        label_supports: dists
            .iter()
            .map(|d| d.iter().map(|(mat, _)| *mat).collect())
            .collect(),
        homogeneity_ok,
    })
}

/// Verdicts attached to a decomposition.
#[derive(Clone, Debug)]
pub struct BoundChecks {
    /// Direct, Fourier, and part-sum routes agree exactly.
    pub identity_ok: bool,
    /// The nonnegative part dominates the eighth power of the edge-weighted
    /// density.
    pub theta0_ge_s8: bool,
    /// |signed low-rank part| is at most the restricted coefficient-mass sum,
    /// which equals the restricted decoding probability exactly.
    pub theta1_le_decoding: bool,
    /// |high-rank part| is at most `2^-(k/2 + 1)`.
    pub theta2_le_rank_bound: bool,
    /// Every high-rank pair carries an individual index of rank above `k/2`.
    pub theta2_per_term_rank_ok: bool,
    /// Per-vertex Walsh mass is at most 1.
    pub parseval_ok: bool,
    /// Advisory only: |signed low-rank part| against the instance's declared
    /// soundness value. Synthetic instances carry no certified soundness.
    pub advisory_theta1_le_declared_delta: bool,
    /// For independent sets (theta = 0): `s^8 <= decoding + 2^-(k/2 + 1)`.
    pub soundness_chain_ok: Option<bool>,
}

/// The exact decomposition of the test expectation with every verdict.
#[derive(Clone, Debug)]
pub struct ThetaReport {
    pub k: u32,
    pub theta_direct: Rat,
    pub theta_fourier: Rat,
    pub theta0: Rat,
    pub theta1: Rat,
    pub theta2: Rat,
    /// Edge-weighted mean density `E over (u, v) of the coefficient at zero`.
    pub s: Rat,
    /// The restricted coefficient-mass sum bounding |theta1|.
    pub eq_decoding_mass: Rat,
    pub decoding: DecodingOutcome,
    pub checks: BoundChecks,
}

impl ThetaReport {
    pub fn all_asserted_checks_pass(&self) -> bool {
        self.checks.identity_ok
            && self.checks.theta0_ge_s8
            && self.checks.theta1_le_decoding
            && self.checks.theta2_le_rank_bound
            && self.checks.theta2_per_term_rank_ok
            && self.checks.parseval_ok
            && self.decoding.homogeneity_ok
            && self.checks.soundness_chain_ok.unwrap_or(true)
    }
}

/// Pairwise data for one side of the quadruple sum.
struct PairData {
    proj: BitMat,
    sum_rank: u32,
    max_individual_rank: u32,
    nu: u8,
    /// Squared-coefficient product times the shift probability.
    weighted: Dyadic,
    /// Squared-coefficient product alone.
    mass: Dyadic,
}

fn side_pairs(spec: &VertexSpectrum, map: &MatrixMap) -> Vec<PairData> {
    let mut out = Vec::with_capacity(spec.entries.len() * spec.entries.len());
    for (a1, c1) in &spec.entries {
        let r1 = a1.rank() as u32;
        for (a2, c2) in &spec.entries {
            let sum = *a1 + *a2;
            let mass = c1.square() * c2.square();
            out.push(PairData {
                proj: map.apply(&sum),
                sum_rank: sum.rank() as u32,
                max_individual_rank: r1.max(a2.rank() as u32),
                nu: corner_bit(&sum),
                weighted: mass * pair_shift_prob(a1, a2),
                mass,
            });
        }
    }
    out
}

/// Split the quadruple sum three ways: both sum-ranks at most `k` with corner
/// bit 0 (all terms nonnegative), the same with corner bit 1 (signed, bounded
/// via decoding), and some sum-rank above `k` (bounded by the shift
/// probability). Projections must match in every part.
pub fn decompose_theta(inst: &LabelCoverInstance, col: &FoldedColoring, k: u32) -> Result<ThetaReport> {
    let spectra = vertex_spectra(inst, col)?;
    let theta_direct = crate::verifier::independence_theta(inst, col)?;
    let theta_fourier = compute_theta_fourier(inst, col)?;
    let decoding = decode_labeling(inst, col, k)?;

    let mut theta0 = Rat::zero();
    let mut theta1 = Rat::zero();
    let mut theta2 = Rat::zero();
    let mut eq_decoding_mass = Rat::zero();
    let mut s = Rat::zero();
    let mut per_term_rank_ok = true;

    for u in 0..inst.n_u() {
        let weight = inst.triple_weight(u);
        let deg = inst.edges_of_u(u).len() as i64;
        for &e1 in inst.edges_of_u(u) {
            let edge_v = &inst.edges()[e1];
            // This (u, v) edge's share of the edge-weighted density.
            s += crate::exact::rat(1, inst.n_u() as i64 * deg)
                * spectra[edge_v.v].density().to_rat();
            for &e2 in inst.edges_of_u(u) {
                let edge_w = &inst.edges()[e2];
                let pairs_v = side_pairs(&spectra[edge_v.v], &edge_v.map);
                let pairs_w = side_pairs(&spectra[edge_w.v], &edge_w.map);
                for p in pairs_v.iter().chain(pairs_w.iter()) {
                    if p.sum_rank > k && 2 * p.max_individual_rank <= k {
                        per_term_rank_ok = false;
                    }
                }

                let mut by_proj: HashMap<u64, Vec<&PairData>> = HashMap::new();
                for p in &pairs_w {
                    by_proj.entry(p.proj.flat_bits()).or_default().push(p);
                }
                let mut t0 = Dyadic::ZERO;
                let mut t1 = Dyadic::ZERO;
                let mut t2 = Dyadic::ZERO;
                let mut mass1 = Dyadic::ZERO;
                for pv in &pairs_v {
                    let Some(ws) = by_proj.get(&pv.proj.flat_bits()) else { continue };
                    for pw in ws {
                        let term = pv.weighted * pw.weighted;
                        let signed = if pw.nu == 1 { -term } else { term };
                        if pv.sum_rank <= k && pw.sum_rank <= k {
                            if pw.nu == 0 {
                                debug_assert!(signed >= Dyadic::ZERO);
                                t0 += signed;
                            } else {
                                t1 += signed;
                                mass1 += pv.mass * pw.mass;
                            }
                        } else {
                            t2 += signed;
                        }
                    }
                }
                theta0 += weight.clone() * t0.to_rat();
                theta1 += weight.clone() * t1.to_rat();
                theta2 += weight.clone() * t2.to_rat();
                eq_decoding_mass += weight.clone() * mass1.to_rat();
            }
        }
    }

    let parseval_ok = spectra.iter().all(|sp| sp.parseval_mass() <= Dyadic::ONE);
    let identity_ok = theta_fourier == theta_direct
        && theta_fourier == theta0.clone() + theta1.clone() + theta2.clone();
    let s8 = num_traits::pow::pow(s.clone(), 8);
    let theta0_ge_s8 = theta0 >= s8;
    let theta1_le_decoding =
        theta1.abs() <= eq_decoding_mass && eq_decoding_mass == decoding.success_probability;
    let theta2_le_rank_bound = le_half_k_bound(&theta2.abs(), k);
    let advisory = {
        let t1 = theta1.abs().to_f64().unwrap_or(f64::NAN);
        t1 == 0.0 || t1.log2() <= inst.delta_log2()
    };
    let soundness_chain_ok = if theta_direct.is_zero() {
        let gap = s8 - decoding.success_probability.clone();
        Some(le_half_k_bound(&gap, k))
    } else {
        None
    };

    Ok(ThetaReport {
        k,
        theta_direct,
        theta_fourier,
        theta0,
        theta1,
        theta2,
        s,
        eq_decoding_mass,
        decoding,
        checks: BoundChecks {
            identity_ok,
            theta0_ge_s8,
            theta1_le_decoding,
            theta2_le_rank_bound,
            theta2_per_term_rank_ok: per_term_rank_ok,
            parseval_ok,
            advisory_theta1_le_declared_delta: advisory,
            soundness_chain_ok,
        },
    })
}

/// The aggregate high-rank bound: Walsh mass at most 1 per function, every
/// high-rank pair witnessed by an individual index of rank above `k/2`, and
/// `|theta2| <= 2^-(k/2 + 1)`.
pub fn theta2_bound_check(report: &ThetaReport) -> bool {
    report.checks.parseval_ok
        && report.checks.theta2_per_term_rank_ok
        && report.checks.theta2_le_rank_bound
}
