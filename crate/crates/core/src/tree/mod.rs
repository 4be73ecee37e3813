//! Rooted unlabelled trees.
//!
//! A [`RootedTree`] is stored as its canonical level sequence: the depths of
//! the vertices in depth-first order, with the children of every vertex
//! arranged so that the whole sequence is lexicographically maximal. Two
//! rooted trees are isomorphic iff their canonical sequences are equal.
//!
//! Vertex `i` of a `RootedTree` is the `i`-th entry of its level sequence; the
//! root is vertex `0`. An edge is addressed by its child endpoint.

mod balance;
mod enumerate;
mod surgery;

pub use balance::{
    balance_chi, balance_chi_labelled, find_half_vertex, sign_walk, ChiBalance, HalfVertex,
};
pub use enumerate::{enumerate_rooted_trees, partition, RootedTrees, TreeChunk};
pub use surgery::{Contraction, Insertion};

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("empty tree description")]
    Empty,
    #[error("vertex {0} is out of range")]
    VertexOutOfRange(usize),
    #[error("expected exactly one root, found {0}")]
    RootCount(usize),
    #[error("graph is not a tree: {0}")]
    NotATree(String),
    #[error("invalid level sequence: {0}")]
    BadLevels(String),
    #[error("contract violation: {0}")]
    Contract(String),
}

/// Per-tree counts used throughout the crate.
///
/// `p` counts vertices at odd distance from the root ("even" vertices in
/// the plane-curve terminology), `neg` those at even distance, root
/// included. `even_star` / `odd_star` are the non-leaf vertices at odd /
/// even non-zero distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TreeStats {
    pub n: usize,
    pub leaves: usize,
    pub p: usize,
    pub neg: usize,
    pub chi: i64,
    pub even_star: usize,
    pub odd_star: usize,
}

impl TreeStats {
    /// Computes all counts from a (not necessarily canonical) level sequence
    /// in one pass. Vertex `i > 0` is a leaf iff the next entry does not go
    /// deeper.
    pub fn from_levels(levels: &[u32]) -> Self {
        let n = levels.len();
        let mut stats = TreeStats {
            n,
            ..Default::default()
        };
        if n == 0 {
            return stats;
        }
        if n == 1 {
            return TreeStats {
                n: 1,
                leaves: 1,
                p: 0,
                neg: 1,
                chi: -1,
                even_star: 0,
                odd_star: 0,
            };
        }
        stats.neg = 1;
        for i in 1..n {
            let depth = levels[i];
            let is_leaf = i + 1 == n || levels[i + 1] <= depth;
            let odd = depth % 2 == 1;
            if odd {
                stats.p += 1;
            } else {
                stats.neg += 1;
            }
            match (is_leaf, odd) {
                (true, _) => stats.leaves += 1,
                (false, true) => stats.even_star += 1,
                (false, false) => stats.odd_star += 1,
            }
        }
        stats.chi = stats.p as i64 - stats.neg as i64;
        stats
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootedTree {
    levels: Vec<u32>,
}

impl RootedTree {
    pub fn single() -> Self {
        RootedTree { levels: vec![0] }
    }

    /// Path on `n` vertices rooted at one end.
    pub fn path(n: usize) -> Self {
        assert!(n >= 1);
        RootedTree {
            levels: (0..n as u32).collect(),
        }
    }

    /// Star on `n` vertices rooted at its centre.
    pub fn star(n: usize) -> Self {
        assert!(n >= 1);
        let mut levels = vec![1; n];
        levels[0] = 0;
        RootedTree { levels }
    }

    /// Canonicalizes a tree given as a parent array; exactly one entry must be `None`.
    pub fn from_parents(parents: &[Option<usize>]) -> Result<Self, TreeError> {
        Ok(LabelledTree::from_parents(parents)?.canonical())
    }

    /// Canonicalizes a tree given by an undirected edge list on `0..n` and a root.
    pub fn from_edges(n: usize, edges: &[(usize, usize)], root: usize) -> Result<Self, TreeError> {
        Ok(LabelledTree::from_edges(n, edges, root)?.canonical())
    }

    /// Canonicalizes an arbitrary level sequence (depth-first depths, root first).
    pub fn from_levels(levels: &[u32]) -> Result<Self, TreeError> {
        Ok(LabelledTree::from_levels(levels)?.canonical())
    }

    /// Wraps a sequence already known to be canonical.
    pub(crate) fn from_canonical_levels(levels: Vec<u32>) -> Self {
        debug_assert!(is_canonical(&levels));
        RootedTree { levels }
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn parents(&self) -> Vec<Option<usize>> {
        parents_of_levels(&self.levels)
    }

    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut children = vec![Vec::new(); self.len()];
        for (v, p) in self.parents().into_iter().enumerate() {
            if let Some(p) = p {
                children[p].push(v);
            }
        }
        children
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        self.labelled().adj
    }

    pub fn labelled(&self) -> LabelledTree {
        LabelledTree::from_parents(&self.parents()).expect("canonical tree is well formed")
    }

    pub fn stats(&self) -> TreeStats {
        TreeStats::from_levels(&self.levels)
    }

    /// Leaves by the usual convention: the root is a leaf only in the one-vertex tree.
    pub fn leaf_count(&self) -> usize {
        self.stats().leaves
    }

    /// `(p, neg, chi)` with `chi = p - neg`.
    pub fn parity_counts(&self) -> (usize, usize, i64) {
        let s = self.stats();
        (s.p, s.neg, s.chi)
    }

    /// `(even*, odd*)`.
    pub fn arnold_star_counts(&self) -> (usize, usize) {
        let s = self.stats();
        (s.even_star, s.odd_star)
    }

    pub fn chi(&self) -> i64 {
        self.stats().chi
    }

    /// The same unrooted tree rooted at vertex `v`.
    pub fn reroot(&self, v: usize) -> Result<RootedTree, TreeError> {
        if v >= self.len() {
            return Err(TreeError::VertexOutOfRange(v));
        }
        let mut t = self.labelled();
        t.root = v;
        Ok(t.canonical())
    }
}

impl fmt::Display for RootedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.levels.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for RootedTree {
    type Err = TreeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let levels = s
            .split_ascii_whitespace()
            .map(|tok| {
                tok.parse::<u32>()
                    .map_err(|e| TreeError::BadLevels(format!("{tok:?}: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        RootedTree::from_levels(&levels)
    }
}

pub(crate) fn parents_of_levels(levels: &[u32]) -> Vec<Option<usize>> {
    let mut last_at_depth: Vec<usize> = Vec::new();
    let mut parents = Vec::with_capacity(levels.len());
    for (i, &l) in levels.iter().enumerate() {
        let l = l as usize;
        parents.push(if l == 0 {
            None
        } else {
            Some(last_at_depth[l - 1])
        });
        last_at_depth.truncate(l);
        last_at_depth.push(i);
    }
    parents
}

fn check_levels(levels: &[u32]) -> Result<(), TreeError> {
    match levels.first() {
        None => return Err(TreeError::Empty),
        Some(0) => {}
        Some(l) => {
            return Err(TreeError::BadLevels(format!(
                "first level is {l}, expected 0"
            )))
        }
    }
    for i in 1..levels.len() {
        if levels[i] == 0 {
            return Err(TreeError::BadLevels(format!("second root at position {i}")));
        }
        if levels[i] > levels[i - 1] + 1 {
            return Err(TreeError::BadLevels(format!(
                "level jumps from {} to {} at position {i}",
                levels[i - 1],
                levels[i]
            )));
        }
    }
    Ok(())
}

pub(crate) fn is_canonical(levels: &[u32]) -> bool {
    check_levels(levels).is_ok()
        && LabelledTree::from_levels(levels)
            .map(|t| t.canonical().levels == levels)
            .unwrap_or(false)
}

/// A rooted tree with explicit vertex identities, used for surgery.
///
/// Vertex ids are stable: operations append new vertices and never renumber
/// existing ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelledTree {
    adj: Vec<Vec<usize>>,
    root: usize,
}

impl LabelledTree {
    pub fn from_parents(parents: &[Option<usize>]) -> Result<Self, TreeError> {
        let n = parents.len();
        if n == 0 {
            return Err(TreeError::Empty);
        }
        let roots: Vec<usize> = (0..n).filter(|&v| parents[v].is_none()).collect();
        if roots.len() != 1 {
            return Err(TreeError::RootCount(roots.len()));
        }
        let mut edges = Vec::with_capacity(n - 1);
        for (v, p) in parents.iter().enumerate() {
            if let Some(p) = *p {
                if p >= n {
                    return Err(TreeError::VertexOutOfRange(p));
                }
                edges.push((p, v));
            }
        }
        Self::from_edges(n, &edges, roots[0])
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)], root: usize) -> Result<Self, TreeError> {
        if n == 0 {
            return Err(TreeError::Empty);
        }
        if root >= n {
            return Err(TreeError::VertexOutOfRange(root));
        }
        if edges.len() + 1 != n {
            return Err(TreeError::NotATree(format!(
                "{} edges on {} vertices",
                edges.len(),
                n
            )));
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(TreeError::VertexOutOfRange(a.max(b)));
            }
            if a == b {
                return Err(TreeError::NotATree(format!("loop at vertex {a}")));
            }
            if adj[a].contains(&b) {
                return Err(TreeError::NotATree(format!("repeated edge {a}-{b}")));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        let t = LabelledTree { adj, root };
        // n - 1 edges and connected implies acyclic.
        let reached = t.component(root, &[]).len();
        if reached != n {
            return Err(TreeError::NotATree(format!(
                "only {reached} of {n} vertices reachable from the root"
            )));
        }
        Ok(t)
    }

    pub fn from_levels(levels: &[u32]) -> Result<Self, TreeError> {
        check_levels(levels)?;
        Self::from_parents(&parents_of_levels(levels))
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn set_root(&mut self, v: usize) {
        assert!(v < self.len());
        self.root = v;
    }

    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    /// Vertices reachable from `start` without passing through `blocked`.
    pub fn component(&self, start: usize, blocked: &[usize]) -> Vec<usize> {
        self.bfs(start, blocked)
            .into_iter()
            .map(|(v, _, _)| v)
            .collect()
    }

    /// BFS order from `start` avoiding `blocked`: `(vertex, parent, depth)`.
    pub(crate) fn bfs(
        &self,
        start: usize,
        blocked: &[usize],
    ) -> Vec<(usize, Option<usize>, usize)> {
        let mut out = vec![(start, None, 0)];
        let mut i = 0;
        while i < out.len() {
            let (v, parent, d) = out[i];
            for &w in &self.adj[v] {
                if Some(w) != parent && !blocked.contains(&w) {
                    out.push((w, Some(v), d + 1));
                }
            }
            i += 1;
        }
        out
    }

    /// `chi` of the component of `start` (avoiding `blocked`) rooted at `start`.
    pub fn chi_from(&self, start: usize, blocked: &[usize]) -> i64 {
        self.bfs(start, blocked)
            .iter()
            .map(|&(_, _, d)| if d % 2 == 1 { 1 } else { -1 })
            .sum()
    }

    pub fn chi(&self) -> i64 {
        self.chi_from(self.root, &[])
    }

    /// Adds a vertex adjacent to `v` and moves the edges from `v` to each
    /// vertex of `moved` onto it. Returns the new vertex id.
    pub fn insert_edge(&mut self, v: usize, moved: &[usize]) -> Result<usize, TreeError> {
        if v >= self.len() {
            return Err(TreeError::VertexOutOfRange(v));
        }
        for (i, w) in moved.iter().enumerate() {
            if !self.adj[v].contains(w) {
                return Err(TreeError::Contract(format!(
                    "{w} is not a neighbour of {v}"
                )));
            }
            if moved[..i].contains(w) {
                return Err(TreeError::Contract(format!("neighbour {w} listed twice")));
            }
        }
        let new = self.adj.len();
        self.adj[v].retain(|w| !moved.contains(w));
        self.adj[v].push(new);
        let mut new_adj = vec![v];
        for &w in moved {
            for x in self.adj[w].iter_mut() {
                if *x == v {
                    *x = new;
                }
            }
            new_adj.push(w);
        }
        self.adj.push(new_adj);
        Ok(new)
    }

    /// Subtree induced by `keep` (a connected vertex set containing `root`).
    /// Vertex `i` of the result is `keep[i]`.
    pub fn induced(&self, keep: &[usize], root: usize) -> LabelledTree {
        let mut new_id = vec![usize::MAX; self.len()];
        for (i, &v) in keep.iter().enumerate() {
            new_id[v] = i;
        }
        let adj = keep
            .iter()
            .map(|&v| {
                self.adj[v]
                    .iter()
                    .filter(|&&w| new_id[w] != usize::MAX)
                    .map(|&w| new_id[w])
                    .collect()
            })
            .collect();
        assert!(
            new_id[root] != usize::MAX,
            "root {root} not in the kept set"
        );
        LabelledTree {
            adj,
            root: new_id[root],
        }
    }

    /// Attaches a new leaf to `v` and returns its id.
    pub fn attach_leaf(&mut self, v: usize) -> usize {
        self.insert_edge(v, &[]).expect("valid vertex")
    }

    pub fn canonical(&self) -> RootedTree {
        self.canonical_labelled().0
    }

    /// Canonical tree plus `position[v]`: the index of labelled vertex `v` in it.
    pub fn canonical_labelled(&self) -> (RootedTree, Vec<usize>) {
        let order = self.bfs(self.root, &[]);
        let n = self.len();
        // Per vertex: canonical code of its subtree (relative depths) and the
        // vertex ids in code order.
        let mut code: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut ids: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut kids: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(v, parent, _) in order.iter().skip(1) {
            kids[parent.expect("non-root has a parent")].push(v);
        }
        for &(v, _, _) in order.iter().rev() {
            let mut ch = std::mem::take(&mut kids[v]);
            ch.sort_by(|&a, &b| code[b].cmp(&code[a]));
            let mut c = vec![0u32];
            let mut vs = vec![v];
            for w in ch {
                c.extend(code[w].iter().map(|d| d + 1));
                vs.append(&mut ids[w]);
                code[w] = Vec::new();
            }
            code[v] = c;
            ids[v] = vs;
        }
        let mut position = vec![0; n];
        for (i, &v) in ids[self.root].iter().enumerate() {
            position[v] = i;
        }
        (
            RootedTree {
                levels: std::mem::take(&mut code[self.root]),
            },
            position,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_vertex() {
        let t = RootedTree::from_parents(&[None]).unwrap();
        assert_eq!(t.levels(), &[0]);
        assert_eq!(t.leaf_count(), 1);
        assert_eq!(t.parity_counts(), (0, 1, -1));
        assert_eq!(t.arnold_star_counts(), (0, 0));
    }

    #[test]
    fn relabelled_paths_agree() {
        let a = RootedTree::from_edges(3, &[(0, 1), (1, 2)], 0).unwrap();
        let b = RootedTree::from_edges(3, &[(2, 0), (1, 2)], 1).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, RootedTree::path(3));
    }

    #[test]
    fn three_vertex_trees_are_distinct() {
        let path = RootedTree::from_edges(3, &[(0, 1), (1, 2)], 0).unwrap();
        let star = RootedTree::from_edges(3, &[(0, 1), (1, 2)], 1).unwrap();
        assert_ne!(path, star);
        assert_eq!(star, RootedTree::star(3));
    }

    #[test]
    fn structural_errors() {
        assert!(matches!(
            RootedTree::from_parents(&[]),
            Err(TreeError::Empty)
        ));
        assert!(matches!(
            RootedTree::from_parents(&[None, None]),
            Err(TreeError::RootCount(2))
        ));
        // 1 -> 2 -> 1 cycle detached from the root
        assert!(matches!(
            RootedTree::from_parents(&[None, Some(2), Some(1)]),
            Err(TreeError::NotATree(_))
        ));
        assert!(matches!(
            RootedTree::from_edges(3, &[(0, 1), (0, 1)], 0),
            Err(TreeError::NotATree(_))
        ));
        assert!(matches!(
            RootedTree::from_edges(3, &[(0, 1), (1, 1)], 0),
            Err(TreeError::NotATree(_))
        ));
        assert!(RootedTree::from_levels(&[0, 2]).is_err());
        assert!(RootedTree::from_levels(&[1]).is_err());
        assert!(RootedTree::from_levels(&[0, 1, 0]).is_err());
    }

    #[test]
    fn leaf_counts() {
        assert_eq!(RootedTree::single().leaf_count(), 1);
        assert_eq!(RootedTree::path(2).leaf_count(), 1);
        assert_eq!(RootedTree::star(4).leaf_count(), 3);
        assert_eq!(RootedTree::path(5).leaf_count(), 1);
    }

    #[test]
    fn parity_examples() {
        assert_eq!(RootedTree::path(2).parity_counts(), (1, 1, 0));
        assert_eq!(RootedTree::star(4).parity_counts(), (3, 1, 2));
    }

    #[test]
    fn star_counts_examples() {
        assert_eq!(RootedTree::star(4).arnold_star_counts(), (0, 0));
        assert_eq!(RootedTree::path(3).arnold_star_counts(), (1, 0));
        assert_eq!(RootedTree::path(5).arnold_star_counts(), (2, 1));
    }

    #[test]
    fn text_round_trip() {
        let t: RootedTree = "0 1 2 2 1".parse().unwrap();
        assert_eq!(t.to_string(), "0 1 2 2 1");
        // non-canonical input is canonicalized
        let u: RootedTree = "0 1 1 2 2".parse().unwrap();
        assert_eq!(u, t);
        assert!("0 x".parse::<RootedTree>().is_err());
    }

    #[test]
    fn canonical_labelling_is_a_bijection() {
        let t = LabelledTree::from_edges(6, &[(3, 0), (3, 1), (1, 2), (1, 4), (0, 5)], 3).unwrap();
        let (canon, pos) = t.canonical_labelled();
        let mut seen = pos.clone();
        seen.sort();
        assert_eq!(seen, (0..6).collect::<Vec<_>>());
        assert_eq!(pos[3], 0);
        let parents = canon.parents();
        for v in 0..6 {
            for &w in t.neighbours(v) {
                let (a, b) = (pos[v], pos[w]);
                assert!(parents[a] == Some(b) || parents[b] == Some(a));
            }
        }
    }

    #[test]
    fn reroot_keeps_abs_chi() {
        let t: RootedTree = "0 1 2 3 2 1 2".parse().unwrap();
        for v in 0..t.len() {
            assert_eq!(t.reroot(v).unwrap().chi().abs(), t.chi().abs());
        }
    }
}
