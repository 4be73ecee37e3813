//! Branches, edge contraction and edge insertion on canonical trees.

use super::{LabelledTree, RootedTree, TreeError};

/// Result of contracting an edge; indices refer to the canonical `tree`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contraction {
    pub tree: RootedTree,
    /// The vertex the contracted edge collapsed into.
    pub merged: usize,
    /// Neighbours of `merged` that were attached to the child endpoint.
    /// Inserting an edge at `merged` that moves exactly these undoes the contraction.
    pub absorbed: Vec<usize>,
}

/// Result of inserting an edge; indices refer to the canonical `tree`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Insertion {
    pub tree: RootedTree,
    pub new_vertex: usize,
}

impl RootedTree {
    /// Components of the tree with `v` removed, each rooted at its vertex adjacent to `v`.
    pub fn branches_at(&self, v: usize) -> Result<Vec<RootedTree>, TreeError> {
        if v >= self.len() {
            return Err(TreeError::VertexOutOfRange(v));
        }
        let t = self.labelled();
        let mut out = Vec::new();
        for &w in t.neighbours(v) {
            let comp = t.component(w, &[v]);
            out.push(t.induced(&comp, w).canonical());
        }
        Ok(out)
    }

    /// Contracts the edge between `child` and its parent. The merged vertex
    /// takes the parent's place, so it is the root whenever the parent was.
    pub fn contract_edge(&self, child: usize) -> Result<Contraction, TreeError> {
        if child == 0 || child >= self.len() {
            return Err(TreeError::Contract(format!(
                "{child} does not name an edge"
            )));
        }
        let parents = self.parents();
        let parent = parents[child].expect("non-root vertex");
        let n = self.len();
        // New ids: drop `child`, shift the rest down.
        let id = |v: usize| if v > child { v - 1 } else { v };
        let mut new_parents = Vec::with_capacity(n - 1);
        let mut absorbed_old = Vec::new();
        for (v, &p) in parents.iter().enumerate() {
            if v == child {
                continue;
            }
            let p = match p {
                Some(p) if p == child => {
                    absorbed_old.push(v);
                    Some(parent)
                }
                other => other,
            };
            new_parents.push(p.map(id));
        }
        let lt = LabelledTree::from_parents(&new_parents)?;
        let (tree, pos) = lt.canonical_labelled();
        let mut absorbed: Vec<usize> = absorbed_old.into_iter().map(|v| pos[id(v)]).collect();
        absorbed.sort_unstable();
        Ok(Contraction {
            tree,
            merged: pos[id(parent)],
            absorbed,
        })
    }

    /// Splits `v` into `v` and a new neighbour that takes over the edges to
    /// `moved` (neighbours of `v`). With `new_is_root` (only allowed when `v`
    /// is the root) the new vertex becomes the root. An empty `moved` is the
    /// attachment of a leaf.
    pub fn insert_edge(
        &self,
        v: usize,
        moved: &[usize],
        new_is_root: bool,
    ) -> Result<Insertion, TreeError> {
        if v >= self.len() {
            return Err(TreeError::VertexOutOfRange(v));
        }
        if new_is_root && v != 0 {
            return Err(TreeError::Contract(format!(
                "new vertex can only become the root when inserting at the root, not at {v}"
            )));
        }
        let mut t = self.labelled();
        let new = t.insert_edge(v, moved)?;
        if new_is_root {
            t.root = new;
        }
        let (tree, pos) = t.canonical_labelled();
        Ok(Insertion {
            tree,
            new_vertex: pos[new],
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::enumerate_rooted_trees;

    #[test]
    fn branches_examples() {
        assert!(RootedTree::single().branches_at(0).unwrap().is_empty());
        let star = RootedTree::star(4).branches_at(0).unwrap();
        assert_eq!(star, vec![RootedTree::single(); 3]);
        let path = RootedTree::path(3).branches_at(1).unwrap();
        assert_eq!(path, vec![RootedTree::single(); 2]);
        assert!(RootedTree::path(3).branches_at(3).is_err());
    }

    #[test]
    fn branch_sizes_sum_to_n_minus_one() {
        for t in enumerate_rooted_trees(7) {
            for v in 0..t.len() {
                let total: usize = t.branches_at(v).unwrap().iter().map(|b| b.len()).sum();
                assert_eq!(total, t.len() - 1);
            }
        }
    }

    #[test]
    fn contract_and_attach_smallest() {
        let c = RootedTree::path(2).contract_edge(1).unwrap();
        assert_eq!(c.tree, RootedTree::single());
        assert_eq!(c.merged, 0);
        let i = RootedTree::single().insert_edge(0, &[], false).unwrap();
        assert_eq!(i.tree, RootedTree::path(2));
        assert!(RootedTree::path(2).contract_edge(0).is_err());
        assert!(RootedTree::path(2).contract_edge(2).is_err());
    }

    #[test]
    fn insertion_errors() {
        let t = RootedTree::path(3);
        assert!(t.insert_edge(1, &[0], true).is_err());
        assert!(t.insert_edge(0, &[2], false).is_err());
        assert!(t.insert_edge(1, &[2, 2], false).is_err());
        assert!(t.insert_edge(5, &[], false).is_err());
    }

    #[test]
    fn root_insertion_can_move_the_root() {
        // attaching a leaf at the root of a single vertex and making it the root
        let i = RootedTree::single().insert_edge(0, &[], true).unwrap();
        assert_eq!(i.tree, RootedTree::path(2));
        assert_eq!(i.new_vertex, 0);
        // subdividing root edge of a star, keeping the root
        let i = RootedTree::star(3).insert_edge(0, &[1], false).unwrap();
        assert_eq!(i.tree.to_string(), "0 1 2 1");
    }

    #[test]
    fn insert_undoes_contract() {
        for n in 2..=8 {
            for t in enumerate_rooted_trees(n) {
                for e in 1..n {
                    let c = t.contract_edge(e).unwrap();
                    assert_eq!(c.tree.len(), n - 1);
                    let back = c.tree.insert_edge(c.merged, &c.absorbed, false).unwrap();
                    assert_eq!(back.tree, t, "tree {t}, edge {e}");
                }
            }
        }
    }
}
