//! Undirected simple graphs stored as one `u64` adjacency row per node.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

mod enumerate;
pub(crate) mod spectral;

pub use enumerate::{
    connected_graph_count, enumerate_connected_graphs, enumerate_trees, prufer_decode,
    prufer_encode, ConnectedGraphs, Trees, MAX_CONNECTED_NODES, MAX_TREE_NODES,
};
pub use spectral::{
    spectral_radius, spectral_radius_with, DEFAULT_SPECTRAL_MAX_ITER, DEFAULT_SPECTRAL_TOL,
};

/// Largest supported node count: one adjacency row per machine word.
pub const MAX_NODES: usize = 64;

/// Hopcount between nodes in different components.
pub const UNREACHABLE: u32 = u32::MAX;

/// An undirected simple graph on nodes `0..n`.
///
/// Row `i` has bit `j` set iff `{i, j}` is a link. Rows are symmetric and
/// the diagonal is clear. Equality, ordering and hashing are on the rows
/// under the given labeling; no isomorphism canonicalization happens.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Graph {
    rows: Vec<u64>,
}

#[inline]
pub(crate) fn bit(i: usize) -> u64 {
    1u64 << i
}

/// Mask with the low `n` bits set.
#[inline]
pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        bit(n) - 1
    }
}

/// Iterates the set bits of a mask in increasing order.
#[derive(Clone, Copy)]
pub(crate) struct Bits(pub u64);

impl Iterator for Bits {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }
}

impl Graph {
    /// Graph with `n` nodes and no links.
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::NoNodes);
        }
        if n > MAX_NODES {
            return Err(Error::TooManyNodes { n, max: MAX_NODES });
        }
        Ok(Graph { rows: vec![0; n] })
    }

    /// Builds a graph from node pairs. Duplicate pairs (in either
    /// orientation) are idempotent.
    pub fn from_edge_list(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::empty(n)?;
        for &(u, v) in edges {
            g.add_link(u, v)?;
        }
        Ok(g)
    }

    pub(crate) fn from_rows_unchecked(rows: Vec<u64>) -> Self {
        debug_assert!(!rows.is_empty() && rows.len() <= MAX_NODES);
        Graph { rows }
    }

    /// Complete graph `K_n`.
    pub fn complete(n: usize) -> Result<Self> {
        let mut g = Graph::empty(n)?;
        let all = full_mask(n);
        for (i, row) in g.rows.iter_mut().enumerate() {
            *row = all & !bit(i);
        }
        Ok(g)
    }

    /// Star `K_{1,n-1}` centered at node 0.
    pub fn star(n: usize) -> Result<Self> {
        let mut g = Graph::empty(n)?;
        for j in 1..n {
            g.set_link(0, j);
        }
        Ok(g)
    }

    /// Path `0 - 1 - ... - (n-1)`.
    pub fn path(n: usize) -> Result<Self> {
        let mut g = Graph::empty(n)?;
        for j in 1..n {
            g.set_link(j - 1, j);
        }
        Ok(g)
    }

    /// Cycle `C_n` (requires `n >= 3`).
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::UnsupportedSize { n, min: 3, max: MAX_NODES });
        }
        let mut g = Graph::path(n)?;
        g.set_link(n - 1, 0);
        Ok(g)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.rows.len()
    }

    /// Adjacency rows, one bitmask per node.
    #[inline]
    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    /// Neighbor mask of node `i`.
    #[inline]
    pub fn neighbors(&self, i: usize) -> u64 {
        self.rows[i]
    }

    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        self.rows[i].count_ones() as usize
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n()).map(|i| self.degree(i)).collect()
    }

    #[inline]
    pub fn has_link(&self, i: usize, j: usize) -> bool {
        i < self.n() && j < self.n() && self.rows[i] & bit(j) != 0
    }

    /// Number of links `L`.
    pub fn link_count(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum::<usize>() / 2
    }

    /// Links `(i, j)` with `i < j`, in row-major order.
    pub fn links(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, &row)| Bits(row & !full_mask(i + 1)).map(move |j| (i, j)))
    }

    fn check_pair(&self, u: usize, v: usize) -> Result<()> {
        let n = self.n();
        for node in [u, v] {
            if node >= n {
                return Err(Error::NodeOutOfRange { node, n });
            }
        }
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        Ok(())
    }

    #[inline]
    pub(crate) fn set_link(&mut self, u: usize, v: usize) {
        self.rows[u] |= bit(v);
        self.rows[v] |= bit(u);
    }

    #[inline]
    pub(crate) fn clear_link(&mut self, u: usize, v: usize) {
        self.rows[u] &= !bit(v);
        self.rows[v] &= !bit(u);
    }

    pub fn add_link(&mut self, u: usize, v: usize) -> Result<()> {
        self.check_pair(u, v)?;
        self.set_link(u, v);
        Ok(())
    }

    pub fn remove_link(&mut self, u: usize, v: usize) -> Result<()> {
        self.check_pair(u, v)?;
        self.clear_link(u, v);
        Ok(())
    }

    /// Copy of the graph with the link `{u, v}` added.
    pub fn with_link(&self, u: usize, v: usize) -> Result<Self> {
        let mut g = self.clone();
        g.add_link(u, v)?;
        Ok(g)
    }

    /// Relabels node `i` as `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n();
        let mut seen = 0u64;
        if perm.len() != n {
            return Err(Error::InvalidParameter("permutation length differs from node count"));
        }
        for &p in perm {
            if p >= n || seen & bit(p) != 0 {
                return Err(Error::InvalidParameter("not a permutation"));
            }
            seen |= bit(p);
        }
        let mut g = Graph::empty(n)?;
        for (i, j) in self.links() {
            g.set_link(perm[i], perm[j]);
        }
        Ok(g)
    }

    /// Nodes reachable from `src` (including `src`).
    pub fn reachable_from(&self, src: usize) -> u64 {
        let mut seen = bit(src);
        let mut frontier = seen;
        while frontier != 0 {
            let mut next = 0;
            for v in Bits(frontier) {
                next |= self.rows[v];
            }
            frontier = next & !seen;
            seen |= frontier;
        }
        seen
    }

    /// Connected components as node masks, ordered by smallest member.
    pub fn components(&self) -> Vec<u64> {
        let mut left = full_mask(self.n());
        let mut out = Vec::new();
        while left != 0 {
            let c = self.reachable_from(left.trailing_zeros() as usize);
            out.push(c);
            left &= !c;
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.reachable_from(0) == full_mask(self.n())
    }

    pub fn is_tree(&self) -> bool {
        self.link_count() + 1 == self.n() && self.is_connected()
    }

    /// True for `K_{1,n-1}` under any labeling (`n >= 2`).
    pub fn is_star(&self) -> bool {
        let n = self.n();
        n >= 2 && self.is_tree() && (n <= 3 || self.rows.iter().any(|r| r.count_ones() as usize == n - 1))
    }

    /// True for `P_n` under any labeling.
    pub fn is_path(&self) -> bool {
        self.is_tree() && self.rows.iter().all(|r| r.count_ones() <= 2)
    }

    /// Sum of hopcounts from `src` to every node, or `None` when some node is
    /// unreachable.
    pub fn hop_sum(&self, src: usize) -> Option<u64> {
        let all = full_mask(self.n());
        let mut seen = bit(src);
        let mut frontier = seen;
        let mut depth = 0u64;
        let mut total = 0u64;
        while frontier != 0 {
            depth += 1;
            let mut next = 0;
            for v in Bits(frontier) {
                next |= self.rows[v];
            }
            frontier = next & !seen;
            seen |= frontier;
            total += depth * u64::from(frontier.count_ones());
        }
        (seen == all).then_some(total)
    }

    /// Diameter, or `None` when the graph is disconnected.
    pub fn diameter(&self) -> Option<u32> {
        hopcounts(self).diameter()
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, [", self.n())?;
        for (k, (i, j)) in self.links().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{i}-{j}")?;
        }
        f.write_str("])")
    }
}

/// All-pairs hopcounts, with [`UNREACHABLE`] between components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HopcountTable {
    n: usize,
    dist: Vec<u32>,
}

impl HopcountTable {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Raw entry; [`UNREACHABLE`] when no path exists.
    #[inline]
    pub fn raw(&self, i: usize, j: usize) -> u32 {
        self.dist[i * self.n + j]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Option<u32> {
        let d = self.raw(i, j);
        (d != UNREACHABLE).then_some(d)
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.dist[i * self.n..(i + 1) * self.n]
    }

    /// `sum_j h(i, j)`, `None` if any entry of the row is unreachable.
    pub fn row_sum(&self, i: usize) -> Option<u64> {
        self.row(i)
            .iter()
            .try_fold(0u64, |acc, &d| (d != UNREACHABLE).then(|| acc + u64::from(d)))
    }

    /// `sum_i sum_j h(i, j)` over ordered pairs.
    pub fn total(&self) -> Option<u64> {
        (0..self.n).try_fold(0u64, |acc, i| Some(acc + self.row_sum(i)?))
    }

    pub fn is_connected(&self) -> bool {
        !self.dist.contains(&UNREACHABLE)
    }

    pub fn diameter(&self) -> Option<u32> {
        if self.is_connected() {
            self.dist.iter().copied().max()
        } else {
            None
        }
    }
}

/// Breadth-first all-pairs hopcounts.
pub fn hopcounts(g: &Graph) -> HopcountTable {
    let n = g.n();
    let mut dist = vec![UNREACHABLE; n * n];
    for src in 0..n {
        let row = &mut dist[src * n..(src + 1) * n];
        row[src] = 0;
        let mut seen = bit(src);
        let mut frontier = seen;
        let mut depth = 0;
        while frontier != 0 {
            depth += 1;
            let mut next = 0;
            for v in Bits(frontier) {
                next |= g.rows[v];
            }
            frontier = next & !seen;
            seen |= frontier;
            for v in Bits(frontier) {
                row[v] = depth;
            }
        }
    }
    HopcountTable { n, dist }
}
