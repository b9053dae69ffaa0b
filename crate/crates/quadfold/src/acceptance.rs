//! The end-to-end verification suite: one entry per criterion, each
//! self-contained and deterministic. The `run-all` command prints one line
//! per criterion; the integration tests assert each outcome.

use crate::exact::{rat_int, Rat};
use crate::folding::{check_folding_support, FoldedColoring, Mode};
use crate::gf2::{BitMat, BitVec};
use crate::label_cover::{compute_parameters, generate_yes_instance, GenParams, LabelCoverInstance, PlantedLabeling};
use crate::oracle::{covering_number, q_coloring, verify_cover, verify_independent, OracleInput};
use crate::soundness::{decompose_theta, rank_prob, theta2_bound_check};
use crate::verifier::{build_hypergraph, completeness_check, honest_coloring, BuildLimits};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

#[derive(Clone, Debug)]
pub struct CriterionOutcome {
    pub id: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl CriterionOutcome {
    fn new(id: &'static str, pass: bool, detail: String) -> Self {
        CriterionOutcome { id, pass, detail }
    }
}

/// Run every criterion. `quick` trims seed counts for a smoke run.
pub fn run_all(quick: bool) -> Vec<CriterionOutcome> {
    vec![
        completeness_eight_query(quick),
        completeness_four_query(quick),
        balancedness(quick),
        theta_identity(quick),
        theta0_lower_bound(quick),
        theta1_decoding_bound(quick),
        theta2_rank_bound(quick),
        soundness_chain(quick),
        folding_support(quick),
        covering_bound(quick),
        parameter_arithmetic(),
    ]
}

fn seeded_instances(count: u64) -> Vec<(LabelCoverInstance, PlantedLabeling)> {
    (0..count)
        .map(|seed| generate_yes_instance(&GenParams { seed, ..GenParams::default() }).unwrap())
        .collect()
}

fn instance_seed_count(quick: bool) -> u64 {
    if quick { 4 } else { 20 }
}

/// The shared family of random folded indicator colorings: 5 instances, 20
/// colorings each (trimmed in quick mode). Mixed densities so that some
/// indicated sets come out independent.
fn coloring_family(quick: bool) -> Vec<(LabelCoverInstance, Vec<FoldedColoring>)> {
    let instances = if quick { 2 } else { 5 };
    let per_instance = if quick { 5 } else { 20 };
    (0..instances)
        .map(|seed| {
            let (inst, _) = generate_yes_instance(&GenParams { seed, ..GenParams::default() }).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
            let cols = (0..per_instance)
                .map(|i| {
                    if i % 3 == 2 {
                        // Sparse indicator: one-in-four density.
                        let tables = (0..inst.n_v())
                            .map(|v| {
                                let size = FoldedColoring::domain_size_for(
                                    Mode::EightQuery,
                                    inst.folding_space(v),
                                );
                                (0..size).map(|_| u8::from(rng.gen_ratio(1, 4))).collect()
                            })
                            .collect();
                        FoldedColoring::new(Mode::EightQuery, tables, inst.folding_spaces()).unwrap()
                    } else {
                        FoldedColoring::random(Mode::EightQuery, inst.folding_spaces(), &mut rng)
                    }
                })
                .collect();
            (inst, cols)
        })
        .collect()
}

/// Honest 2-coloring accepts with probability exactly 1 on every seeded
/// instance, and its materialized hypergraph has no monochromatic edge.
pub fn completeness_eight_query(quick: bool) -> CriterionOutcome {
    let start = Instant::now();
    let seeds = instance_seed_count(quick);
    let mut pass = true;
    let mut total_edges = 0usize;
    for (inst, lab) in seeded_instances(seeds) {
        let acceptance = completeness_check(&inst, &lab, Mode::EightQuery);
        pass &= acceptance.map(|p| p == rat_int(1)).unwrap_or(false);
        let h = match build_hypergraph(&inst, Mode::EightQuery, &BuildLimits::default()) {
            Ok(h) => h,
            Err(_) => {
                pass = false;
                continue;
            }
        };
        let colors = h.colors_from(&honest_coloring(&inst, &lab, Mode::EightQuery)).unwrap();
        pass &= h.monochromatic_edges(&colors) == 0;
        total_edges += h.edges().len();
    }
    let elapsed = start.elapsed();
    pass &= elapsed.as_secs_f64() < 60.0;
    CriterionOutcome::new(
        "01-completeness-8query",
        pass,
        format!("{seeds} instances, {total_edges} edges total, {elapsed:.2?}"),
    )
}

/// Honest 4-coloring accepts with probability exactly 1, and the paired-coset
/// hypergraph is 4-colorable by independent search.
pub fn completeness_four_query(quick: bool) -> CriterionOutcome {
    let start = Instant::now();
    let seeds = instance_seed_count(quick);
    let mut pass = true;
    let mut total_edges = 0usize;
    for (inst, lab) in seeded_instances(seeds) {
        let acceptance = completeness_check(&inst, &lab, Mode::FourQuery);
        pass &= acceptance.map(|p| p == rat_int(1)).unwrap_or(false);
        let h = match build_hypergraph(&inst, Mode::FourQuery, &BuildLimits::default()) {
            Ok(h) => h,
            Err(_) => {
                pass = false;
                continue;
            }
        };
        let input = OracleInput::from_hypergraph(&h);
        match q_coloring(&input, 4) {
            Some(colors) => pass &= crate::oracle::verify_coloring(&input, &colors),
            None => pass = false,
        }
        total_edges += h.edges().len();
    }
    let elapsed = start.elapsed();
    CriterionOutcome::new(
        "02-completeness-4query",
        pass,
        format!("{seeds} instances, {total_edges} edges total, {elapsed:.2?}"),
    )
}

/// Honest color classes are exactly balanced per block (1/2 and 1/4), and
/// each class is an independent set of the materialized hypergraph.
pub fn balancedness(quick: bool) -> CriterionOutcome {
    let seeds = instance_seed_count(quick);
    let mut pass = true;
    for (inst, lab) in seeded_instances(seeds) {
        for (mode, share) in [(Mode::EightQuery, 2usize), (Mode::FourQuery, 4usize)] {
            let honest = honest_coloring(&inst, &lab, mode);
            for (v, table) in honest.tables().iter().enumerate() {
                let _ = v;
                for color in 0..share as u8 {
                    let count = table.iter().filter(|&&c| c == color).count();
                    pass &= count * share == table.len();
                }
            }
            let h = match build_hypergraph(&inst, mode, &BuildLimits::default()) {
                Ok(h) => h,
                Err(_) => {
                    pass = false;
                    continue;
                }
            };
            let input = OracleInput::from_hypergraph(&h);
            for color in 0..share as u8 {
                let ids = h.indicator_vertex_ids(&honest.class_indicator(color)).unwrap();
                pass &= verify_independent(&input, &ids);
            }
        }
    }
    CriterionOutcome::new(
        "03-balanced-classes",
        pass,
        format!("{seeds} instances, both modes, per-block shares exact"),
    )
}

/// Factored direct, Fourier-sum, and three-part decompositions agree exactly
/// as rationals on the random coloring family.
pub fn theta_identity(quick: bool) -> CriterionOutcome {
    let start = Instant::now();
    let mut pass = true;
    let mut count = 0usize;
    for (inst, cols) in coloring_family(quick) {
        for col in cols {
            let report = match decompose_theta(&inst, &col, 2) {
                Ok(r) => r,
                Err(_) => {
                    pass = false;
                    continue;
                }
            };
            pass &= report.checks.identity_ok;
            pass &= report.theta_fourier == report.theta_direct;
            pass &= report.theta_direct
                == report.theta0.clone() + report.theta1.clone() + report.theta2.clone();
            count += 1;
        }
    }
    let elapsed = start.elapsed();
    pass &= elapsed.as_secs_f64() < 300.0;
    CriterionOutcome::new(
        "04-theta-identity",
        pass,
        format!("{count} colorings, zero tolerance, {elapsed:.2?}"),
    )
}

/// The nonnegative part dominates s^8 on every coloring, with the constant
/// colorings pinning the edge cases s = 0 and s = 1.
pub fn theta0_lower_bound(quick: bool) -> CriterionOutcome {
    let mut pass = true;
    let mut count = 0usize;
    for (inst, cols) in coloring_family(quick) {
        for col in cols {
            match decompose_theta(&inst, &col, 2) {
                Ok(report) => {
                    let s8 = num_traits::pow::pow(report.s.clone(), 8);
                    pass &= report.theta0 >= s8;
                    count += 1;
                }
                Err(_) => pass = false,
            }
        }
        // Edge cases: empty and full sets.
        for value in [0u8, 1] {
            let tables = (0..inst.n_v())
                .map(|v| vec![value; inst.folding_space(v).coset_count()])
                .collect();
            let col = FoldedColoring::new(Mode::EightQuery, tables, inst.folding_spaces()).unwrap();
            match decompose_theta(&inst, &col, 2) {
                Ok(report) => {
                    pass &= report.s == rat_int(value as i64);
                    pass &= report.theta0 == rat_int(value as i64);
                    pass &= report.checks.theta0_ge_s8;
                }
                Err(_) => pass = false,
            }
        }
    }
    CriterionOutcome::new(
        "05-theta0-vs-s8",
        pass,
        format!("{count} colorings plus constant edge cases"),
    )
}

/// |theta1| is bounded by the restricted coefficient mass, which equals the
/// decoding success probability exactly; every decoded label is symmetric and
/// satisfies its vertex constraints.
pub fn theta1_decoding_bound(quick: bool) -> CriterionOutcome {
    let mut pass = true;
    let mut count = 0usize;
    for (inst, cols) in coloring_family(quick) {
        for col in cols {
            match decompose_theta(&inst, &col, 2) {
                Ok(report) => {
                    pass &= report.theta1.abs() <= report.eq_decoding_mass;
                    pass &= report.eq_decoding_mass == report.decoding.success_probability;
                    pass &= report.decoding.homogeneity_ok;
                    for (v, support) in report.decoding.label_supports.iter().enumerate() {
                        for label in support {
                            pass &= label.is_symmetric() && inst.satisfies_constraints(v, label);
                        }
                    }
                    count += 1;
                }
                Err(_) => pass = false,
            }
        }
    }
    CriterionOutcome::new(
        "06-theta1-decoding",
        pass,
        format!("{count} colorings, exact equalities"),
    )
}

/// |theta2| obeys the half-k rank bound for k in 1..=3, and the single-shift
/// probability is exhaustively 0 or 2^-rank at m = 3.
pub fn theta2_rank_bound(quick: bool) -> CriterionOutcome {
    let mut pass = true;
    let mut count = 0usize;
    for (inst, cols) in coloring_family(quick) {
        for col in cols {
            for k in [1u32, 2, 3] {
                match decompose_theta(&inst, &col, k) {
                    Ok(report) => {
                        pass &= theta2_bound_check(&report);
                        count += 1;
                    }
                    Err(_) => pass = false,
                }
            }
        }
    }
    // Exhaustive shift-probability census at m = 3: 512 matrices x 8 targets,
    // each verified against enumeration of all 8 vectors.
    let mut census = 0usize;
    for alpha_bits in 0..512u64 {
        let alpha = BitMat::from_flat(3, 3, alpha_bits);
        let rank = alpha.rank() as u32;
        for b_bits in 0..8u64 {
            let b = BitVec::from_bits(3, b_bits);
            let p = rank_prob(&alpha, &b);
            let brute = (0..8u64)
                .filter(|&xb| alpha.mul_vec(&BitVec::from_bits(3, xb)) == b)
                .count();
            pass &= p == crate::exact::Dyadic::new(brute as i128, 3);
            pass &= p.is_zero() || p == crate::exact::Dyadic::pow2_inv(rank);
            census += 1;
        }
    }
    CriterionOutcome::new(
        "07-theta2-rank-bound",
        pass,
        format!("{count} decompositions, {census} shift-probability cases"),
    )
}

/// For every independent set found (honest classes plus random search), the
/// assembled inequality `s^8 <= decoding + 2^-(k/2+1)` holds exactly.
pub fn soundness_chain(quick: bool) -> CriterionOutcome {
    let mut pass = true;
    let mut independent_sets = 0usize;
    let seeds = instance_seed_count(quick).min(10);
    for (inst, lab) in seeded_instances(seeds) {
        for class in 0..2u8 {
            let col = honest_coloring(&inst, &lab, Mode::EightQuery).class_indicator(class);
            for k in [1u32, 2, 3] {
                match decompose_theta(&inst, &col, k) {
                    Ok(report) => {
                        pass &= report.theta_direct.is_zero();
                        pass &= report.checks.soundness_chain_ok == Some(true);
                        independent_sets += 1;
                    }
                    Err(_) => pass = false,
                }
            }
        }
    }
    for (inst, cols) in coloring_family(quick) {
        for col in cols {
            for k in [1u32, 2, 3] {
                match decompose_theta(&inst, &col, k) {
                    Ok(report) => {
                        if report.theta_direct.is_zero() {
                            pass &= report.checks.soundness_chain_ok == Some(true);
                            independent_sets += 1;
                        } else {
                            pass &= report.checks.soundness_chain_ok.is_none();
                        }
                    }
                    Err(_) => pass = false,
                }
            }
        }
    }
    CriterionOutcome::new(
        "08-soundness-chain",
        pass && independent_sets > 0,
        format!("{independent_sets} independent-set decompositions checked"),
    )
}

/// Every folded coloring has Walsh support inside the admissible space; ten
/// deliberately unfolded tables fail the same check.
pub fn folding_support(quick: bool) -> CriterionOutcome {
    let mut pass = true;
    let folded_target = if quick { 10 } else { 50 };
    let mut folded = 0usize;
    let (inst, _) = generate_yes_instance(&GenParams { seed: 0, ..GenParams::default() }).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    while folded < folded_target {
        let col = FoldedColoring::random(Mode::EightQuery, inst.folding_spaces(), &mut rng);
        for v in 0..inst.n_v() {
            let table = col.extension_table(v, inst.folding_space(v)).unwrap();
            pass &= check_folding_support(&table, inst.folding_space(v)).unwrap();
        }
        folded += 1;
    }
    // Negative controls: full-domain random tables, resampled on the rare
    // accidental fold, must fail.
    let mut negatives = 0usize;
    while negatives < 10 {
        let v = negatives % inst.n_v();
        let space = inst.folding_space(v);
        let table: Vec<u8> = (0..1usize << space.ambient_dim())
            .map(|_| rng.gen_range(0..2))
            .collect();
        if check_folding_support(&table, space).unwrap() {
            continue;
        }
        negatives += 1;
    }
    CriterionOutcome::new(
        "09-folding-support",
        pass,
        format!("{folded} folded colorings in-support, {negatives} unfolded controls rejected"),
    )
}

/// The paired-coset instance viewed as a Boolean not-all-equal CSP has
/// covering number at most 2: the two honest coordinate assignments cover
/// every edge, and the exact search agrees.
pub fn covering_bound(quick: bool) -> CriterionOutcome {
    let seeds = if quick { 2 } else { 5 };
    let mut pass = true;
    let mut numbers = Vec::new();
    for (inst, lab) in seeded_instances(seeds) {
        let h = match build_hypergraph(&inst, Mode::FourQuery, &BuildLimits::default()) {
            Ok(h) => h,
            Err(_) => {
                pass = false;
                continue;
            }
        };
        let input = OracleInput::from_hypergraph(&h);
        // The two coordinate assignments of the honest 4-coloring.
        let honest = honest_coloring(&inst, &lab, Mode::FourQuery);
        let colors = h.colors_from(&honest).unwrap();
        let first: Vec<u8> = colors.iter().map(|&c| (c >> 1) & 1).collect();
        let second: Vec<u8> = colors.iter().map(|&c| c & 1).collect();
        pass &= verify_cover(&input, &[first, second]);
        // Exact search within two rounds.
        match covering_number(&input, 2) {
            Ok(cover) => {
                pass &= cover.number <= 2;
                pass &= verify_cover(&input, &cover.assignments);
                numbers.push(cover.number);
            }
            Err(_) => pass = false,
        }
    }
    CriterionOutcome::new(
        "10-covering-number",
        pass,
        format!("{seeds} instances, covering numbers {numbers:?}"),
    )
}

/// The large-parameter relations reproduce the closed forms at three sizes
/// and two epsilons, against an independent high-precision evaluation.
pub fn parameter_arithmetic() -> CriterionOutcome {
    let mut pass = true;
    let mut cases = 0usize;
    let tol = Rat::new(BigInt::one(), BigInt::from(1_000_000_000u64));
    for exp in [10u32, 20, 30] {
        let log2_n = 2f64.powi(exp as i32);
        for eps_thousandths in [1i64, 10] {
            let epsilon = eps_thousandths as f64 / 1000.0;
            let table = match compute_parameters(log2_n, epsilon) {
                Ok(t) => t,
                Err(_) => {
                    pass = false;
                    continue;
                }
            };
            let eps_rat = Rat::new(BigInt::from(eps_thousandths), BigInt::from(1000));
            let j = BigInt::from(exp);

            // n-bound exponent: log2 N + (log2 N)^(10/4 + 2 eps).
            let q = Rat::from_integer(j.clone())
                * (Rat::new(BigInt::from(10), BigInt::from(4)) + eps_rat.clone() * rat_int(2));
            let oracle_n = hp_pow2(&Rat::from_integer(j.clone())) + hp_pow2(&q);
            let impl_n = Rat::from_float(table.n_bound_log2).unwrap();
            pass &= rel_close(&impl_n, &oracle_n, &tol);

            // s-bound: 2^(-(log2 N)^(1/8 - 3 eps)).
            let q = Rat::from_integer(j)
                * (Rat::new(BigInt::one(), BigInt::from(8)) - eps_rat * rat_int(3));
            let t = hp_pow2(&q);
            let oracle_s = hp_pow2(&(-t));
            let impl_s = Rat::from_float(table.s_bound_log2.exp2()).unwrap();
            pass &= rel_close(&impl_s, &oracle_s, &tol);
            cases += 1;
        }
    }
    CriterionOutcome::new(
        "11-parameter-arithmetic",
        pass,
        format!("{cases} (size, epsilon) cases at relative tolerance 1e-9"),
    )
}

fn rel_close(value: &Rat, oracle: &Rat, tol: &Rat) -> bool {
    let diff = (value.clone() - oracle.clone()).abs();
    diff <= oracle.clone().abs() * tol.clone()
}

/// High-precision `2^q` for rational `q`, via exact shifting for the integer
/// part and an exponential series for the fraction. Series depths give far
/// more than the 1e-9 comparison needs.
pub fn hp_pow2(q: &Rat) -> Rat {
    let floor = q.floor();
    let frac = q - floor.clone();
    let int_part = floor.to_integer();
    let mag = int_part.magnitude().to_u64().expect("exponent out of range") as usize;
    let base = if int_part.is_negative() {
        Rat::new(BigInt::one(), BigInt::one() << mag)
    } else {
        Rat::from_integer(BigInt::one() << mag)
    };
    base * hp_exp(&(frac * hp_ln2()))
}

/// ln 2 as a truncated series `sum 1/(k 2^k)`, 96 terms.
fn hp_ln2() -> Rat {
    let mut acc = Rat::zero();
    for k in 1u64..=96 {
        acc += Rat::new(BigInt::one(), BigInt::from(k) * (BigInt::one() << k as usize));
    }
    acc
}

/// exp(x) for 0 <= x < 1 by Taylor series, 48 terms.
fn hp_exp(x: &Rat) -> Rat {
    let mut acc = Rat::one();
    let mut term = Rat::one();
    for k in 1u64..=48 {
        term = term * x.clone() / Rat::from_integer(BigInt::from(k));
        acc += term.clone();
    }
    acc
}
