//! Exhaustive generation of canonical level sequences.
//!
//! Trees come out in decreasing lexicographic order of their canonical level
//! sequences, starting from the path and ending with the star. The successor
//! of a sequence `L` is found by locating the last position `p` with
//! `L[p] > 1`, its parent `q`, and refilling `L[p..]` periodically from
//! `L[q..p]`, which yields the largest canonical sequence below `L`.
//!
//! Sequences sharing a prefix form a contiguous run of this order, so the
//! stream splits into independent [`TreeChunk`]s keyed by prefix.

use super::{is_canonical, RootedTree};

#[derive(Debug, Clone)]
enum State {
    Fresh,
    Running,
    Done,
}

/// Stream of rooted trees with a fixed vertex count.
///
/// [`RootedTrees::advance`] exposes the level sequence without allocating;
/// the `Iterator` impl wraps each one in a [`RootedTree`].
#[derive(Debug, Clone)]
pub struct RootedTrees {
    levels: Vec<u32>,
    frozen: usize,
    state: State,
}

/// Every rooted unlabelled tree on `n` vertices, each exactly once.
pub fn enumerate_rooted_trees(n: usize) -> RootedTrees {
    if n == 0 {
        return RootedTrees {
            levels: Vec::new(),
            frozen: 0,
            state: State::Done,
        };
    }
    RootedTrees {
        levels: (0..n as u32).collect(),
        frozen: 0,
        state: State::Fresh,
    }
}

impl RootedTrees {
    pub fn advance(&mut self) -> Option<&[u32]> {
        match self.state {
            State::Done => return None,
            State::Fresh => self.state = State::Running,
            State::Running => {
                if !self.step() {
                    self.state = State::Done;
                    return None;
                }
            }
        }
        Some(&self.levels)
    }

    fn step(&mut self) -> bool {
        let l = &mut self.levels;
        let Some(p) = (1..l.len()).rev().find(|&i| l[i] > 1) else {
            return false;
        };
        if p < self.frozen {
            return false;
        }
        let q = (0..p)
            .rev()
            .find(|&i| l[i] == l[p] - 1)
            .expect("level sequence has a parent");
        let period = p - q;
        for i in p..l.len() {
            l[i] = l[i - period];
        }
        true
    }

    /// Number of remaining trees; consumes the stream.
    pub fn count_remaining(mut self) -> u64 {
        let mut c = 0;
        while self.advance().is_some() {
            c += 1;
        }
        c
    }
}

impl Iterator for RootedTrees {
    type Item = RootedTree;

    fn next(&mut self) -> Option<RootedTree> {
        self.advance()
            .map(|l| RootedTree::from_canonical_levels(l.to_vec()))
    }
}

/// The trees on `n` vertices whose canonical sequence starts with `prefix`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeChunk {
    pub n: usize,
    pub prefix: Vec<u32>,
}

impl TreeChunk {
    pub fn trees(&self) -> RootedTrees {
        RootedTrees {
            levels: lexmax_completion(&self.prefix, self.n),
            frozen: self.prefix.len(),
            state: State::Fresh,
        }
    }
}

/// Splits the trees on `n` vertices into disjoint chunks by their first
/// `prefix_len` levels, listed in stream order.
pub fn partition(n: usize, prefix_len: usize) -> Vec<TreeChunk> {
    if n == 0 {
        return Vec::new();
    }
    let m = prefix_len.clamp(1, n);
    let mut out = Vec::new();
    let mut prefix = vec![0u32];
    collect_prefixes(n, m, &mut prefix, &mut out);
    out
}

fn collect_prefixes(n: usize, m: usize, prefix: &mut Vec<u32>, out: &mut Vec<TreeChunk>) {
    if prefix.len() == m {
        out.push(TreeChunk {
            n,
            prefix: prefix.clone(),
        });
        return;
    }
    let top = prefix.last().copied().unwrap_or(0) + 1;
    for v in (1..=top).rev() {
        prefix.push(v);
        if extendable(prefix, n) {
            collect_prefixes(n, m, prefix, out);
        }
        prefix.pop();
    }
}

/// A prefix extends to a canonical sequence of length `n` iff padding it
/// with root children (`1`s) gives one.
fn extendable(prefix: &[u32], n: usize) -> bool {
    let mut padded = prefix.to_vec();
    padded.resize(n, 1);
    is_canonical(&padded)
}

fn lexmax_completion(prefix: &[u32], n: usize) -> Vec<u32> {
    let mut l = prefix.to_vec();
    while l.len() < n {
        let top = l[l.len() - 1] + 1;
        let v = (1..=top)
            .rev()
            .find(|&v| {
                l.push(v);
                let ok = extendable(&l, n);
                l.pop();
                ok
            })
            .expect("appending 1 always keeps a prefix extendable");
        l.push(v);
    }
    l
}
