//! Explicit hypergraphs produced by the verifier reductions.
//!
//! Vertices are `(v, domain index)` pairs laid out block-major: for the
//! 8-query reduction the domain index is a coset index, for the 4-query
//! reduction it is a packed coset pair `c1 * coset_count + c2`. Hyperedges
//! are stored as sorted sets of distinct vertex ids.

use crate::folding::{FoldedColoring, Mode};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct Hypergraph {
    mode: Mode,
    n: usize,
    /// `(v, domain index)` per global vertex id, block-major.
    labels: Vec<(u32, u32)>,
    /// First global id of each v-block.
    offsets: Vec<usize>,
    /// Sorted edges of sorted, distinct vertex ids; size between 2 and the
    /// test's query count.
    edges: Vec<Vec<u32>>,
    /// Randomness outcomes discarded because every query hit one vertex.
    collapsed: u64,
}

impl Hypergraph {
    pub fn new(
        mode: Mode,
        block_sizes: &[usize],
        mut edges: Vec<Vec<u32>>,
        collapsed: u64,
    ) -> Result<Self> {
        let mut offsets = Vec::with_capacity(block_sizes.len());
        let mut labels = Vec::new();
        for (v, &size) in block_sizes.iter().enumerate() {
            offsets.push(labels.len());
            for idx in 0..size {
                labels.push((v as u32, idx as u32));
            }
        }
        let n = labels.len();
        if n > u16::MAX as usize {
            return Err(Error::TooLarge(format!("{n} vertices exceeds the id width")));
        }
        for e in edges.iter_mut() {
            e.sort_unstable();
            e.dedup();
            if e.len() < 2 {
                return Err(Error::Invariant("hyperedge with fewer than 2 distinct vertices".into()));
            }
            if e.len() > mode.uniformity() {
                return Err(Error::Invariant(format!(
                    "hyperedge of size {} in a {}-query reduction",
                    e.len(),
                    mode.uniformity()
                )));
            }
            if e.iter().any(|&id| id as usize >= n) {
                return Err(Error::Invariant("vertex id out of range".into()));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(Hypergraph { mode, n, labels, offsets, edges, collapsed })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn uniformity(&self) -> usize {
        self.mode.uniformity()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Vec<u32>] {
        &self.edges
    }

    pub fn collapsed(&self) -> u64 {
        self.collapsed
    }

    pub fn labels(&self) -> &[(u32, u32)] {
        &self.labels
    }

    pub fn vertex_id(&self, v: usize, domain_index: usize) -> usize {
        self.offsets[v] + domain_index
    }

    pub fn block_count(&self) -> usize {
        self.offsets.len()
    }

    pub fn block_range(&self, v: usize) -> std::ops::Range<usize> {
        let start = self.offsets[v];
        let end = if v + 1 < self.offsets.len() { self.offsets[v + 1] } else { self.n };
        start..end
    }

    /// Colors per global vertex id, read off a folded coloring.
    pub fn colors_from(&self, col: &FoldedColoring) -> Result<Vec<u8>> {
        if col.mode() != self.mode {
            return Err(Error::InvalidParameter("coloring mode does not match hypergraph".into()));
        }
        let mut colors = vec![0u8; self.n];
        for (id, &(v, idx)) in self.labels.iter().enumerate() {
            colors[id] = col.value(v as usize, idx as usize);
        }
        Ok(colors)
    }

    pub fn monochromatic_edges(&self, colors: &[u8]) -> usize {
        assert_eq!(colors.len(), self.n);
        self.edges
            .iter()
            .filter(|e| e.iter().all(|&id| colors[id as usize] == colors[e[0] as usize]))
            .count()
    }

    /// Vertex ids of one color class of an indicator (value 1).
    pub fn indicator_vertex_ids(&self, col: &FoldedColoring) -> Result<Vec<u32>> {
        let colors = self.colors_from(col)?;
        Ok((0..self.n as u32).filter(|&id| colors[id as usize] == 1).collect())
    }

    /// Does some edge lie entirely inside the given vertex set?
    pub fn has_contained_edge(&self, set: &[u32]) -> bool {
        let mut member = vec![false; self.n];
        for &id in set {
            member[id as usize] = true;
        }
        self.edges.iter().any(|e| e.iter().all(|&id| member[id as usize]))
    }
}
