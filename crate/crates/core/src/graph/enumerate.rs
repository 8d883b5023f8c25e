//! Exhaustive generators over labeled graphs.

use alloc::vec;
use alloc::vec::Vec;

use super::{bit, Bits, Graph};
use crate::{Error, Result};

pub const MAX_TREE_NODES: usize = 10;
pub const MAX_CONNECTED_NODES: usize = 7;

/// Every labeled tree on `n` nodes (`n^(n-2)` of them), in lexicographic
/// order of the Prüfer sequence.
pub fn enumerate_trees(n: usize) -> Result<Trees> {
    if !(2..=MAX_TREE_NODES).contains(&n) {
        return Err(Error::UnsupportedSize { n, min: 2, max: MAX_TREE_NODES });
    }
    Ok(Trees { n, seq: vec![0; n - 2], done: false })
}

pub struct Trees {
    n: usize,
    seq: Vec<usize>,
    done: bool,
}

impl Iterator for Trees {
    type Item = Graph;

    fn next(&mut self) -> Option<Graph> {
        if self.done {
            return None;
        }
        let g = prufer_decode(self.n, &self.seq).expect("sequence entries stay below n");
        // odometer increment, last position fastest
        self.done = true;
        for slot in self.seq.iter_mut().rev() {
            *slot += 1;
            if *slot < self.n {
                self.done = false;
                break;
            }
            *slot = 0;
        }
        Some(g)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        if self.done {
            return (0, Some(0));
        }
        let mut rank = 0usize;
        for &s in &self.seq {
            rank = rank * self.n + s;
        }
        let left = self.n.pow(self.seq.len() as u32) - rank;
        (left, Some(left))
    }
}

/// Tree on `n = seq.len() + 2` nodes encoded by a Prüfer sequence.
pub fn prufer_decode(n: usize, seq: &[usize]) -> Result<Graph> {
    if n < 2 || seq.len() + 2 != n {
        return Err(Error::InvalidParameter("Prüfer sequence must have n - 2 entries"));
    }
    if let Some(&node) = seq.iter().find(|&&s| s >= n) {
        return Err(Error::NodeOutOfRange { node, n });
    }
    let mut g = Graph::empty(n)?;
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut leaves: u64 = 0;
    for (i, &d) in degree.iter().enumerate() {
        if d == 1 {
            leaves |= bit(i);
        }
    }
    for &s in seq {
        let leaf = leaves.trailing_zeros() as usize;
        leaves &= !bit(leaf);
        g.set_link(leaf, s);
        degree[s] -= 1;
        if degree[s] == 1 {
            leaves |= bit(s);
        }
    }
    let u = leaves.trailing_zeros() as usize;
    let v = (leaves & !bit(u)).trailing_zeros() as usize;
    g.set_link(u, v);
    Ok(g)
}

/// Prüfer sequence of a labeled tree.
pub fn prufer_encode(g: &Graph) -> Result<Vec<usize>> {
    if !g.is_tree() || g.n() < 2 {
        return Err(Error::InvalidParameter("Prüfer encoding needs a tree with at least two nodes"));
    }
    let n = g.n();
    let mut rows = g.rows().to_vec();
    let mut seq = Vec::with_capacity(n - 2);
    for _ in 0..n - 2 {
        let leaf = (0..n).find(|&i| rows[i].count_ones() == 1).expect("trees have leaves");
        let parent = rows[leaf].trailing_zeros() as usize;
        seq.push(parent);
        rows[leaf] = 0;
        rows[parent] &= !bit(leaf);
    }
    Ok(seq)
}

/// Node pairs `(i, j)`, `i < j`, in row-major order; bit `k` of an edge
/// mask selects `pairs[k]`.
fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

/// Every labeled connected simple graph on `n` nodes exactly once, in
/// increasing order of the edge mask over [`pairs`].
pub fn enumerate_connected_graphs(n: usize) -> Result<ConnectedGraphs> {
    if !(2..=MAX_CONNECTED_NODES).contains(&n) {
        return Err(Error::UnsupportedSize { n, min: 2, max: MAX_CONNECTED_NODES });
    }
    let pairs = pairs(n);
    let end = 1u64 << pairs.len();
    // a connected graph needs at least n - 1 links
    let start = (1u64 << (n - 1)) - 1;
    Ok(ConnectedGraphs { n, pairs, mask: start, end })
}

pub struct ConnectedGraphs {
    n: usize,
    pairs: Vec<(usize, usize)>,
    mask: u64,
    end: u64,
}

impl Iterator for ConnectedGraphs {
    type Item = Graph;

    fn next(&mut self) -> Option<Graph> {
        while self.mask < self.end {
            let mask = self.mask;
            self.mask += 1;
            if (mask.count_ones() as usize) + 1 < self.n {
                continue;
            }
            let mut rows = vec![0u64; self.n];
            for k in Bits(mask) {
                let (i, j) = self.pairs[k];
                rows[i] |= bit(j);
                rows[j] |= bit(i);
            }
            let g = Graph::from_rows_unchecked(rows);
            if g.is_connected() {
                return Some(g);
            }
        }
        None
    }
}

/// Number of labeled connected graphs on `n` nodes, counted by scanning.
pub fn connected_graph_count(n: usize) -> Result<usize> {
    Ok(enumerate_connected_graphs(n)?.count())
}
