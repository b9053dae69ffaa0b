//! JSON file formats: instances with planted labelings, colorings,
//! hypergraphs, analysis reports, and solver results. Everything carries a
//! one-line schema version; bit arrays are 0/1 integers in row-major order.
//! Serialization is deterministic (struct field order, sorted maps), so
//! regenerating a file with the same seed is byte-identical.

use crate::exact::{rat_to_f64, ExactValue, Rat};
use crate::folding::{FoldedColoring, Mode};
use crate::gf2::{BitMat, BitVec, MatrixMap};
use crate::hypergraph::Hypergraph;
use crate::label_cover::{Edge, LabelCoverInstance, ParamTable, PlantedLabeling};
use crate::oracle::{Covering, MaxIndependentSet};
use crate::soundness::ThetaReport;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

fn check_schema(schema: u32) -> Result<()> {
    if schema != SCHEMA_VERSION {
        return Err(Error::Malformed(format!(
            "schema {schema} not supported (expected {SCHEMA_VERSION})"
        )));
    }
    Ok(())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hex_string(&hasher.finalize())
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn to_bits_matrix(mat: &BitMat) -> Vec<Vec<u8>> {
    mat.entries()
}

fn to_bits_vec(v: &BitVec) -> Vec<u8> {
    v.coords()
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    std::fs::write(path, bytes)?;
    Ok(())
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let bytes = std::fs::read(path)?;
    Ok(serde_json::from_slice(&bytes)?)
}

/// Instance file: label dimensions, edges with their projections (the
/// conjugation kernel `rho`, or a general matrix), per-vertex constraint
/// functionals, declared parameters, and optionally the planted labeling.
#[derive(Serialize, Deserialize)]
pub struct InstanceFile {
    pub schema: u32,
    pub m: usize,
    pub r: usize,
    #[serde(rename = "U")]
    pub u_count: usize,
    #[serde(rename = "V")]
    pub v_count: usize,
    pub edges: Vec<EdgeFile>,
    /// Keyed by the V-vertex id as a decimal string; each entry holds
    /// flattened m*m functionals.
    pub constraints: BTreeMap<String, Vec<Vec<u8>>>,
    pub k: usize,
    pub delta_log2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub planted: Option<PlantedFile>,
}

#[derive(Serialize, Deserialize)]
pub struct EdgeFile {
    pub u: usize,
    pub v: usize,
    /// Conjugation form: `pi(a) = rho a rho^T`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<Vec<Vec<u8>>>,
    /// General form: `r^2 x m^2` matrix over flattened input, row-major.
    /// Verified to preserve symmetry at load time.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pi_matrix: Option<Vec<Vec<u8>>>,
}

#[derive(Serialize, Deserialize)]
pub struct PlantedFile {
    pub x: Vec<Vec<u8>>,
    pub y: Vec<Vec<u8>>,
}

impl InstanceFile {
    pub fn from_model(inst: &LabelCoverInstance, planted: Option<&PlantedLabeling>) -> InstanceFile {
        let edges = inst
            .edges()
            .iter()
            .map(|e| match &e.map {
                MatrixMap::Conjugation { rho } => EdgeFile {
                    u: e.u,
                    v: e.v,
                    rho: Some(to_bits_matrix(rho)),
                    pi_matrix: None,
                },
                general @ MatrixMap::General { m, .. } => EdgeFile {
                    u: e.u,
                    v: e.v,
                    rho: None,
                    pi_matrix: Some(
                        general
                            .as_rows()
                            .iter()
                            .map(|&row| {
                                (0..m * m).map(|k| ((row >> k) & 1) as u8).collect()
                            })
                            .collect(),
                    ),
                },
            })
            .collect();
        let constraints = (0..inst.n_v())
            .map(|v| {
                let cs = inst
                    .constraints(v)
                    .iter()
                    .map(|c| c.flat().coords())
                    .collect();
                (v.to_string(), cs)
            })
            .collect();
        InstanceFile {
            schema: SCHEMA_VERSION,
            m: inst.m(),
            r: inst.r(),
            u_count: inst.n_u(),
            v_count: inst.n_v(),
            edges,
            constraints,
            k: inst.rank_bound(),
            delta_log2: inst.delta_log2(),
            planted: planted.map(|lab| PlantedFile {
                x: lab.x.iter().map(to_bits_vec).collect(),
                y: lab.y.iter().map(to_bits_vec).collect(),
            }),
        }
    }

    pub fn into_model(self) -> Result<(LabelCoverInstance, Option<PlantedLabeling>)> {
        check_schema(self.schema)?;
        let (m, r) = (self.m, self.r);
        let mut edges = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            let map = match (&e.rho, &e.pi_matrix) {
                (Some(rho), None) => {
                    if rho.len() != r || rho.iter().any(|row| row.len() != m) {
                        return Err(Error::Malformed("rho must be r x m".into()));
                    }
                    MatrixMap::conjugation(BitMat::from_rows(rho))
                }
                (None, Some(rows)) => {
                    if rows.len() != r * r || rows.iter().any(|row| row.len() != m * m) {
                        return Err(Error::Malformed("pi_matrix must be r^2 x m^2".into()));
                    }
                    let packed: Vec<u64> = rows
                        .iter()
                        .map(|row| {
                            row.iter()
                                .enumerate()
                                .fold(0u64, |acc, (k, &b)| acc | (((b & 1) as u64) << k))
                        })
                        .collect();
                    MatrixMap::general(m, r, packed)?
                }
                _ => return Err(Error::Malformed("edge needs exactly one of rho / pi_matrix".into())),
            };
            edges.push(Edge { u: e.u, v: e.v, map });
        }
        let mut constraints = vec![Vec::new(); self.v_count];
        for (key, cs) in &self.constraints {
            let v: usize = key
                .parse()
                .map_err(|_| Error::Malformed(format!("bad constraint key {key}")))?;
            if v >= self.v_count {
                return Err(Error::Malformed(format!("constraint key {v} out of range")));
            }
            constraints[v] = cs
                .iter()
                .map(|bits| {
                    if bits.len() != m * m {
                        return Err(Error::Malformed("constraint must have m*m bits".into()));
                    }
                    let packed = bits
                        .iter()
                        .enumerate()
                        .fold(0u64, |acc, (k, &b)| acc | (((b & 1) as u64) << k));
                    Ok(BitMat::from_flat(m, m, packed))
                })
                .collect::<Result<Vec<_>>>()?;
        }
        let inst = LabelCoverInstance::new(
            m,
            r,
            self.u_count,
            self.v_count,
            edges,
            constraints,
            self.k,
            self.delta_log2,
        )?;
        let planted = self
            .planted
            .map(|p| {
                if p.x.len() != inst.n_u() || p.y.len() != inst.n_v() {
                    return Err(Error::Malformed("planted labeling size mismatch".into()));
                }
                Ok(PlantedLabeling {
                    x: p.x.iter().map(|bits| BitVec::from_slice(bits)).collect(),
                    y: p.y.iter().map(|bits| BitVec::from_slice(bits)).collect(),
                })
            })
            .transpose()?;
        Ok((inst, planted))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }

    pub fn load(path: &Path) -> Result<InstanceFile> {
        read_json(path)
    }

    /// Hash of the canonical serialized bytes, embedded in derived files.
    pub fn content_hash(&self) -> Result<String> {
        Ok(sha256_hex(&serde_json::to_vec_pretty(self)?))
    }
}

/// Coloring file: one table per V-vertex keyed by decimal vertex id, one
/// color per domain index. In 4-query mode the domain index packs a coset
/// pair as `c1 * coset_count + c2` and colors are 0..3 (first coordinate in
/// the high bit).
#[derive(Serialize, Deserialize)]
pub struct ColoringFile {
    pub schema: u32,
    pub mode: u32,
    pub colors: BTreeMap<String, Vec<u8>>,
}

impl ColoringFile {
    pub fn from_model(col: &FoldedColoring) -> ColoringFile {
        ColoringFile {
            schema: SCHEMA_VERSION,
            mode: col.mode().code(),
            colors: col
                .tables()
                .iter()
                .enumerate()
                .map(|(v, t)| (v.to_string(), t.clone()))
                .collect(),
        }
    }

    pub fn into_model(self, inst: &LabelCoverInstance) -> Result<FoldedColoring> {
        check_schema(self.schema)?;
        let mode = Mode::from_code(self.mode)?;
        let mut tables = vec![Vec::new(); inst.n_v()];
        for (key, table) in self.colors {
            let v: usize = key
                .parse()
                .map_err(|_| Error::Malformed(format!("bad coloring key {key}")))?;
            if v >= inst.n_v() {
                return Err(Error::Malformed(format!("coloring key {v} out of range")));
            }
            tables[v] = table;
        }
        FoldedColoring::new(mode, tables, inst.folding_spaces())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }

    pub fn load(path: &Path) -> Result<ColoringFile> {
        read_json(path)
    }
}

/// Hypergraph file with provenance.
#[derive(Serialize, Deserialize)]
pub struct HypergraphFile {
    pub schema: u32,
    pub n: usize,
    pub uniformity: usize,
    pub vertices: Vec<VertexFile>,
    pub edges: Vec<Vec<u32>>,
    pub collapsed: u64,
    pub provenance: Provenance,
}

#[derive(Serialize, Deserialize)]
pub struct VertexFile {
    pub v: u32,
    pub coset: u32,
}

#[derive(Serialize, Deserialize)]
pub struct Provenance {
    pub instance_sha256: String,
    pub mode: u32,
    pub seed: u64,
}

impl HypergraphFile {
    pub fn from_model(h: &Hypergraph, instance_sha256: String, seed: u64) -> HypergraphFile {
        HypergraphFile {
            schema: SCHEMA_VERSION,
            n: h.n(),
            uniformity: h.uniformity(),
            vertices: h
                .labels()
                .iter()
                .map(|&(v, coset)| VertexFile { v, coset })
                .collect(),
            edges: h.edges().to_vec(),
            collapsed: h.collapsed(),
            provenance: Provenance {
                instance_sha256,
                mode: h.mode().code(),
                seed,
            },
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }

    pub fn load(path: &Path) -> Result<HypergraphFile> {
        check_loaded(read_json(path)?)
    }
}

fn check_loaded(file: HypergraphFile) -> Result<HypergraphFile> {
    check_schema(file.schema)?;
    if file.vertices.len() != file.n {
        return Err(Error::Malformed("vertex list does not match n".into()));
    }
    for e in &file.edges {
        if e.len() < 2 || e.iter().any(|&id| id as usize >= file.n) {
            return Err(Error::Malformed("bad edge in hypergraph file".into()));
        }
    }
    Ok(file)
}

/// Analysis report file: all decomposition values exactly and as floats,
/// plus every verdict.
#[derive(Serialize, Deserialize)]
pub struct ThetaReportFile {
    pub schema: u32,
    pub instance_sha256: String,
    pub k: u32,
    pub theta_direct: ExactValue,
    pub theta_fourier: ExactValue,
    pub theta0: ExactValue,
    pub theta1: ExactValue,
    pub theta2: ExactValue,
    pub s: ExactValue,
    pub decoding_mass: ExactValue,
    pub decoding_success_probability: ExactValue,
    pub decoding_full_match_probability: ExactValue,
    pub checks: ChecksFile,
}

#[derive(Serialize, Deserialize)]
pub struct ChecksFile {
    pub identity_ok: bool,
    pub theta0_ge_s8: bool,
    pub theta1_le_decoding: bool,
    pub theta2_le_rank_bound: bool,
    pub theta2_per_term_rank_ok: bool,
    pub parseval_ok: bool,
    pub homogeneity_ok: bool,
    pub advisory_theta1_le_declared_delta: bool,
    pub soundness_chain_ok: Option<bool>,
}

impl ThetaReportFile {
    pub fn from_model(report: &ThetaReport, instance_sha256: String) -> ThetaReportFile {
        ThetaReportFile {
            schema: SCHEMA_VERSION,
            instance_sha256,
            k: report.k,
            theta_direct: ExactValue::from_rat(&report.theta_direct),
            theta_fourier: ExactValue::from_rat(&report.theta_fourier),
            theta0: ExactValue::from_rat(&report.theta0),
            theta1: ExactValue::from_rat(&report.theta1),
            theta2: ExactValue::from_rat(&report.theta2),
            s: ExactValue::from_rat(&report.s),
            decoding_mass: ExactValue::from_rat(&report.eq_decoding_mass),
            decoding_success_probability: ExactValue::from_rat(
                &report.decoding.success_probability,
            ),
            decoding_full_match_probability: ExactValue::from_rat(
                &report.decoding.full_match_probability,
            ),
            checks: ChecksFile {
                identity_ok: report.checks.identity_ok,
                theta0_ge_s8: report.checks.theta0_ge_s8,
                theta1_le_decoding: report.checks.theta1_le_decoding,
                theta2_le_rank_bound: report.checks.theta2_le_rank_bound,
                theta2_per_term_rank_ok: report.checks.theta2_per_term_rank_ok,
                parseval_ok: report.checks.parseval_ok,
                homogeneity_ok: report.decoding.homogeneity_ok,
                advisory_theta1_le_declared_delta: report
                    .checks
                    .advisory_theta1_le_declared_delta,
                soundness_chain_ok: report.checks.soundness_chain_ok,
            },
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }
}

/// Solver result file with witnesses.
#[derive(Serialize, Deserialize)]
pub struct OracleFile {
    pub schema: u32,
    pub hypergraph_sha256: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_independent_set_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_independent_set_witness: Option<Vec<u32>>,
    /// Keyed by the color count as a decimal string.
    pub colorable: BTreeMap<String, ColorableFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub covering_number: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub covering_assignments: Option<Vec<Vec<u8>>>,
}

#[derive(Serialize, Deserialize)]
pub struct ColorableFile {
    pub colorable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<u8>>,
}

impl OracleFile {
    pub fn new(hypergraph_sha256: String) -> OracleFile {
        OracleFile {
            schema: SCHEMA_VERSION,
            hypergraph_sha256,
            max_independent_set_size: None,
            max_independent_set_witness: None,
            colorable: BTreeMap::new(),
            covering_number: None,
            covering_assignments: None,
        }
    }

    pub fn set_max_is(&mut self, result: &MaxIndependentSet) {
        self.max_independent_set_size = Some(result.size);
        self.max_independent_set_witness = Some(result.witness.clone());
    }

    pub fn set_colorable(&mut self, q: u8, witness: Option<Vec<u8>>) {
        self.colorable.insert(
            q.to_string(),
            ColorableFile { colorable: witness.is_some(), witness },
        );
    }

    pub fn set_covering(&mut self, cover: &Covering) {
        self.covering_number = Some(cover.number);
        self.covering_assignments = Some(cover.assignments.clone());
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }
}

/// Parameter table file.
#[derive(Serialize, Deserialize)]
pub struct ParamFile {
    pub schema: u32,
    pub params: ParamTable,
}

impl ParamFile {
    pub fn new(params: ParamTable) -> ParamFile {
        ParamFile { schema: SCHEMA_VERSION, params }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }
}

/// Float view helper for report text output.
pub fn rat_display(r: &Rat) -> String {
    format!("{r} ({:.6e})", rat_to_f64(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label_cover::{generate_yes_instance, GenParams};
    use crate::verifier::honest_coloring;

    #[test]
    fn instance_roundtrip_preserves_model() {
        let (inst, lab) = generate_yes_instance(&GenParams { seed: 3, ..GenParams::default() }).unwrap();
        let file = InstanceFile::from_model(&inst, Some(&lab));
        let json = serde_json::to_string_pretty(&file).unwrap();
        let parsed: InstanceFile = serde_json::from_str(&json).unwrap();
        let (inst2, lab2) = parsed.into_model().unwrap();
        assert_eq!(inst.m(), inst2.m());
        assert_eq!(inst.edges().len(), inst2.edges().len());
        assert_eq!(lab2.as_ref(), Some(&lab));
        for (a, b) in inst.edges().iter().zip(inst2.edges()) {
            assert_eq!((a.u, a.v), (b.u, b.v));
            assert_eq!(a.map, b.map);
        }
        // Hash is stable across the round trip.
        let file2 = InstanceFile::from_model(&inst2, lab2.as_ref());
        assert_eq!(file.content_hash().unwrap(), file2.content_hash().unwrap());
    }

    #[test]
    fn coloring_roundtrip() {
        let (inst, lab) = generate_yes_instance(&GenParams { seed: 4, ..GenParams::default() }).unwrap();
        for mode in [Mode::EightQuery, Mode::FourQuery] {
            let col = honest_coloring(&inst, &lab, mode);
            let file = ColoringFile::from_model(&col);
            let json = serde_json::to_string(&file).unwrap();
            let parsed: ColoringFile = serde_json::from_str(&json).unwrap();
            let col2 = parsed.into_model(&inst).unwrap();
            assert_eq!(col, col2);
        }
    }

    #[test]
    fn bad_general_map_rejected_at_load() {
        // Hand-built m = r = 2 instance whose single edge maps E_01 to E_01
        // and kills everything else: the symmetric E_01 + E_10 goes to the
        // asymmetric E_01, which must be refused at load.
        let mut bad_row = vec![0u8; 4];
        bad_row[1] = 1;
        let file = InstanceFile {
            schema: SCHEMA_VERSION,
            m: 2,
            r: 2,
            u_count: 1,
            v_count: 1,
            edges: vec![EdgeFile {
                u: 0,
                v: 0,
                rho: None,
                pi_matrix: Some(vec![vec![0; 4], bad_row, vec![0; 4], vec![0; 4]]),
            }],
            constraints: std::iter::once(("0".to_string(), vec![])).collect(),
            k: 1,
            delta_log2: -1.0,
            planted: None,
        };
        assert!(matches!(file.into_model(), Err(Error::Invariant(_))));

        // The identity in general form is fine.
        let identity_rows: Vec<Vec<u8>> = (0..4)
            .map(|k| (0..4).map(|j| u8::from(j == k)).collect())
            .collect();
        let file = InstanceFile {
            schema: SCHEMA_VERSION,
            m: 2,
            r: 2,
            u_count: 1,
            v_count: 1,
            edges: vec![EdgeFile { u: 0, v: 0, rho: None, pi_matrix: Some(identity_rows) }],
            constraints: std::iter::once(("0".to_string(), vec![])).collect(),
            k: 1,
            delta_log2: -1.0,
            planted: None,
        };
        assert!(file.into_model().is_ok());
    }

    #[test]
    fn schema_is_checked() {
        let (inst, _) = generate_yes_instance(&GenParams { seed: 6, ..GenParams::default() }).unwrap();
        let mut file = InstanceFile::from_model(&inst, None);
        file.schema = 99;
        assert!(matches!(file.into_model(), Err(Error::Malformed(_))));
    }
}
