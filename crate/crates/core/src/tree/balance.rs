//! Centroid walk, signed greedy walk, and `chi` balancing by edge insertions.

use std::cmp::Reverse;

use super::{LabelledTree, RootedTree, TreeError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HalfVertex {
    pub vertex: usize,
    /// Moves made by the walk from the root.
    pub steps: usize,
}

/// A vertex at which every branch has at most `n / 2` vertices, found by
/// walking from the root into the unique oversized branch until none is left.
pub fn find_half_vertex(t: &RootedTree) -> HalfVertex {
    let lt = t.labelled();
    let (v, steps) = half_vertex_in(&lt, lt.root(), &[]);
    let (_, pos) = lt.canonical_labelled();
    HalfVertex {
        vertex: pos[v],
        steps,
    }
}

fn half_vertex_in(t: &LabelledTree, start: usize, blocked: &[usize]) -> (usize, usize) {
    let order = t.bfs(start, blocked);
    let n = order.len();
    let mut size = vec![0usize; t.len()];
    let mut parent = vec![None; t.len()];
    for &(v, p, _) in order.iter().rev() {
        size[v] += 1;
        parent[v] = p;
        if let Some(p) = p {
            size[p] += size[v];
        }
    }
    let mut v = start;
    let mut steps = 0;
    // Descending only: the branch we came from has n - size[v] < n / 2 vertices.
    while let Some(&heavy) = t
        .neighbours(v)
        .iter()
        .find(|&&w| !blocked.contains(&w) && Some(w) != parent[v] && 2 * size[w] > n)
    {
        v = heavy;
        steps += 1;
    }
    (v, steps)
}

/// Greedy signs `eps[1..]` for the walk with step lengths `c[1..]`, each step
/// directed towards `target`. With `c` nonincreasing and `|target| <= sum(c)`
/// the endpoint lands within `c[0]` of `target`.
///
/// The returned vector has one sign per step (`c.len() - 1` entries).
pub fn sign_walk(c: &[i64], target: i64) -> Result<Vec<i64>, TreeError> {
    if c.is_empty() {
        return Err(TreeError::Contract(
            "sign walk needs at least one value".into(),
        ));
    }
    if c.iter().any(|&x| x < 0) || c.windows(2).any(|w| w[0] < w[1]) {
        return Err(TreeError::Contract(format!(
            "values must be nonnegative and nonincreasing: {c:?}"
        )));
    }
    let total: i64 = c.iter().sum();
    if target.abs() > total {
        return Err(TreeError::Contract(format!(
            "|{target}| exceeds the sum {total}"
        )));
    }
    let mut at = 0i64;
    let mut signs = Vec::with_capacity(c.len() - 1);
    for &step in &c[1..] {
        let s = if target - at >= 0 { 1 } else { -1 };
        at += s * step;
        signs.push(s);
    }
    Ok(signs)
}

/// Trees `t_1, ..., t_k`, each obtained from the previous one (and `t_1`
/// from `t_0`) by inserting an edge, ending with `chi(t_k) = c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChiBalance {
    pub steps: Vec<RootedTree>,
}

impl ChiBalance {
    pub fn k(&self) -> usize {
        self.steps.len()
    }

    pub fn last(&self) -> Option<&RootedTree> {
        self.steps.last()
    }

    /// The same sequence read as contractions: `t_k, ..., t_1`.
    pub fn contraction_view(&self) -> impl Iterator<Item = &RootedTree> {
        self.steps.iter().rev()
    }
}

/// Grows `t0` by at most `3 + 3 log2 n` edge insertions into a tree with `chi = c`.
pub fn balance_chi(t0: &RootedTree, c: i64) -> Result<ChiBalance, TreeError> {
    let mut lt = t0.labelled();
    let steps = balance_chi_labelled(&mut lt, c)?;
    Ok(ChiBalance { steps })
}

/// As [`balance_chi`], mutating `tree` in place. Existing vertex ids keep
/// their meaning; the root may move to a new vertex.
pub fn balance_chi_labelled(tree: &mut LabelledTree, c: i64) -> Result<Vec<RootedTree>, TreeError> {
    let chi = tree.chi();
    if c.abs() > chi.abs() {
        return Err(TreeError::Contract(format!(
            "|c| = {} exceeds |chi| = {}",
            c.abs(),
            chi.abs()
        )));
    }
    let root = tree.root();
    let mut b = Balancer {
        tree,
        steps: Vec::new(),
    };
    b.balance(root, None, &mut Vec::new(), c)?;
    Ok(b.steps)
}

struct Balancer<'a> {
    tree: &'a mut LabelledTree,
    steps: Vec<RootedTree>,
}

impl Balancer<'_> {
    fn insert(
        &mut self,
        v: usize,
        moved: &[usize],
        becomes_root: bool,
    ) -> Result<usize, TreeError> {
        let new = self.tree.insert_edge(v, moved)?;
        if becomes_root {
            self.tree.set_root(new);
        }
        self.steps.push(self.tree.canonical());
        Ok(new)
    }

    /// Makes `chi` of the component of `u` rooted at `u` equal to `c`. The
    /// component is cut off at `blocked`; `attach` is the blocked neighbour of
    /// `u`, if any. Returns the component's attachment vertex afterwards,
    /// which differs from `u` only if the final sign fix subdivided the edge
    /// towards `attach` (or, at top level, moved the root).
    fn balance(
        &mut self,
        u: usize,
        attach: Option<usize>,
        blocked: &mut Vec<usize>,
        c: i64,
    ) -> Result<usize, TreeError> {
        let chi = self.tree.chi_from(u, blocked);
        if chi == c {
            return Ok(u);
        }
        if chi.abs() != c.abs() {
            let size = self.tree.bfs(u, blocked).len();
            if size == 1 {
                // chi = -1, so c = 0
                self.insert(u, &[], false)?;
                return Ok(u);
            }
            let (v, _) = half_vertex_in(self.tree, u, blocked);
            blocked.push(v);
            let mut branches: Vec<(usize, i64, RootedTree)> = self
                .tree
                .neighbours(v)
                .iter()
                .filter(|w| !blocked.contains(w))
                .map(|&w| {
                    let comp = self.tree.component(w, blocked);
                    (
                        w,
                        self.tree.chi_from(w, blocked),
                        self.tree.induced(&comp, w).canonical(),
                    )
                })
                .collect();
            branches.sort_by(|a, b| {
                (Reverse(a.1.abs()), Reverse(&a.2), a.0).cmp(&(
                    Reverse(b.1.abs()),
                    Reverse(&b.2),
                    b.0,
                ))
            });
            let mags: Vec<i64> = branches.iter().map(|b| b.1.abs()).collect();
            // Rooted at v: chi = -1 - sum(chi(b_i)), so |c| < |chi| <= 1 + sum(mags).
            // The walk is only needed within c_1 of c, and |c| <= sum(mags) unless
            // |c| = 1 + sum(mags) = |chi|, which was handled above.
            let eps = sign_walk(&mags, c)?;
            let walked: i64 = eps.iter().zip(&mags[1..]).map(|(e, m)| e * m).sum();
            let first = self.balance(branches[0].0, Some(v), blocked, c - walked)?;
            blocked.pop();
            // Rooted at v with the new vertex v' next to it, branches on v' keep
            // their sign and branches on v flip: chi = chi(b_1*) + sum eps_i c_i.
            let mut moved = vec![first];
            for (b, e) in branches[1..].iter().zip(&eps) {
                if b.1 * e > 0 {
                    moved.push(b.0);
                }
            }
            self.insert(v, &moved, false)?;
            debug_assert_eq!(self.tree.chi_from(v, blocked).abs(), c.abs());
        }
        let chi = self.tree.chi_from(u, blocked);
        if chi == c {
            return Ok(u);
        }
        debug_assert_eq!(chi, -c);
        // Sign fix: a new vertex l next to u takes over the attachment (or the
        // root), then a leaf hangs off l.
        let moved: Vec<usize> = attach.into_iter().collect();
        let l = self.insert(u, &moved, attach.is_none())?;
        self.insert(l, &[], false)?;
        Ok(l)
    }
}
