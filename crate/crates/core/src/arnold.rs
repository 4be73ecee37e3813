//! Trees admitted by the Arnold inequalities for plane curves of degree `d`.
//!
//! `L_d` and `L'_d` are reductions of the coefficient table; `A_d` is an
//! exhaustive count over canonical level sequences.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::genfunc::{leaf_polynomials, specialize_counts, CoefficientTable, GenfuncError};
use crate::tree::{enumerate_rooted_trees, partition, TreeChunk, TreeStats};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ArnoldError {
    #[error("degree must be at least 3, got {0}")]
    Degree(usize),
    #[error("A_d is defined for even degrees only, got {0}")]
    OddDegree(usize),
    #[error(transparent)]
    Series(#[from] GenfuncError),
    #[error("enumeration budget exhausted for d = {}: {}", .0.d, .0)]
    Budget(PartialCount),
}

/// Progress of an `A_d` enumeration stopped by its budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialCount {
    pub d: usize,
    /// Every tree with at most this many vertices was examined.
    pub complete_through: usize,
    /// Admitted trees among those.
    pub admitted: u64,
    pub visited: u64,
    pub budget: u64,
}

impl std::fmt::Display for PartialCount {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} admitted among {} trees with n <= {} (budget {})",
            self.admitted, self.visited, self.complete_through, self.budget
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegreeBudget {
    pub d: usize,
    pub n_d: usize,
    pub k_d: usize,
    pub half_floor: usize,
    pub k: usize,
}

impl DegreeBudget {
    /// Minimal leaf count for `n` vertices under the weak bound.
    pub fn leaf_threshold(&self, n: usize) -> usize {
        (n + 1)
            .saturating_sub(2 + self.half_floor * self.half_floor.saturating_sub(1))
            .max(1)
    }

    /// `(k - 1)(k - 2) / 2`; meaningful for even `d`.
    pub fn star_bound(&self) -> usize {
        (self.k - 1) * (self.k - 2) / 2
    }
}

pub fn vertex_budget(d: usize) -> Result<DegreeBudget, ArnoldError> {
    if d < 3 {
        return Err(ArnoldError::Degree(d));
    }
    let n_d = (d - 1) * (d - 2) / 2 + if d % 2 == 1 { 1 } else { 2 };
    let half_floor = (d - 1) / 2;
    let k_d = n_d - 1 - half_floor * (half_floor - 1);
    Ok(DegreeBudget {
        d,
        n_d,
        k_d,
        half_floor,
        k: d / 2,
    })
}

/// Trees with `N_d` vertices and at least `K_d` leaves.
#[allow(non_snake_case)]
pub fn count_L(d: usize, table: &CoefficientTable) -> Result<BigUint, ArnoldError> {
    let b = vertex_budget(d)?;
    table.require(b.n_d)?;
    Ok(table.row(b.n_d).tail_from(b.k_d))
}

/// Trees with `n <= N_d` vertices and at least `n - 1 - h(h - 1)` leaves,
/// `h = floor((d - 1) / 2)`.
#[allow(non_snake_case)]
pub fn count_L_prime(d: usize, table: &CoefficientTable) -> Result<BigUint, ArnoldError> {
    let b = vertex_budget(d)?;
    table.require(b.n_d)?;
    Ok((1..=b.n_d)
        .map(|n| table.row(n).tail_from(b.leaf_threshold(n)))
        .sum())
}

/// `count_L` by enumeration.
#[allow(non_snake_case)]
pub fn brute_L(d: usize) -> Result<u64, ArnoldError> {
    let b = vertex_budget(d)?;
    Ok(count_where(b.n_d, |s| s.leaves >= b.k_d))
}

/// `count_L_prime` by enumeration.
#[allow(non_snake_case)]
pub fn brute_L_prime(d: usize) -> Result<u64, ArnoldError> {
    let b = vertex_budget(d)?;
    Ok((1..=b.n_d)
        .map(|n| count_where(n, |s| s.leaves >= b.leaf_threshold(n)))
        .sum())
}

fn count_where(n: usize, keep: impl Fn(&TreeStats) -> bool) -> u64 {
    let mut it = enumerate_rooted_trees(n);
    let mut c = 0;
    while let Some(l) = it.advance() {
        if keep(&TreeStats::from_levels(l)) {
            c += 1;
        }
    }
    c
}

/// Both star counts of a level sequence are at most `bound`. Exits at the
/// first violation.
fn within_star_bound(levels: &[u32], bound: usize) -> bool {
    let (mut odd_depth, mut even_depth) = (0usize, 0usize);
    for i in 1..levels.len().saturating_sub(1) {
        if levels[i + 1] > levels[i] {
            if levels[i] % 2 == 1 {
                odd_depth += 1;
                if odd_depth > bound {
                    return false;
                }
            } else {
                even_depth += 1;
                if even_depth > bound {
                    return false;
                }
            }
        }
    }
    true
}

/// Chunks of roughly even size for `n` vertices.
fn chunks_for(n: usize) -> Vec<TreeChunk> {
    const TARGET: usize = 512;
    let mut len = 2;
    let mut chunks = partition(n, len);
    while chunks.len() < TARGET && len < n {
        len += 1;
        chunks = partition(n, len);
    }
    chunks
}

/// Trees with `n <= N_d` vertices satisfying `even*, odd* <= (k-1)(k-2)/2`,
/// `d = 2k`. Sizes are processed in increasing order; a size is started only
/// if all its trees fit in the remaining `budget`. Work within a size is
/// split into prefix chunks on the current rayon pool.
#[allow(non_snake_case)]
pub fn count_A(d: usize, budget: u64) -> Result<u64, ArnoldError> {
    let b = vertex_budget(d)?;
    if d % 2 == 1 {
        return Err(ArnoldError::OddDegree(d));
    }
    let bound = b.star_bound();
    let totals = specialize_counts(&leaf_polynomials(b.n_d));
    let mut visited = 0u64;
    let mut admitted = 0u64;
    for n in 1..=b.n_d {
        let size = totals[n - 1].to_u64().unwrap_or(u64::MAX);
        if visited.saturating_add(size) > budget {
            return Err(ArnoldError::Budget(PartialCount {
                d,
                complete_through: n - 1,
                admitted,
                visited,
                budget,
            }));
        }
        admitted += chunks_for(n)
            .par_iter()
            .map(|chunk| {
                let mut it = chunk.trees();
                let mut c = 0u64;
                while let Some(l) = it.advance() {
                    if within_star_bound(l, bound) {
                        c += 1;
                    }
                }
                c
            })
            .sum::<u64>();
        visited += size;
    }
    Ok(admitted)
}

/// The state of `A_d` in a report row.
#[derive(Debug, Clone, PartialEq)]
pub enum ACount {
    /// Odd degree, or not requested.
    Skipped,
    Exact(u64),
    Partial(PartialCount),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArnoldReport {
    pub budget: DegreeBudget,
    pub l: BigUint,
    pub l_prime: BigUint,
    pub a: ACount,
    pub log2norm_l: f64,
    pub log2norm_l_prime: f64,
    pub log2norm_a: Option<f64>,
}

pub const CSV_HEADER: &str = "d,N_d,K_d,L_d,Lprime_d,A_d,log2norm_L,log2norm_Lprime,log2norm_A";

impl ArnoldReport {
    pub fn csv_row(&self) -> String {
        let b = &self.budget;
        let a = match &self.a {
            ACount::Exact(v) => v.to_string(),
            _ => String::new(),
        };
        let na = self
            .log2norm_a
            .map(|v| format!("{v:.6}"))
            .unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{:.6},{:.6},{}",
            b.d, b.n_d, b.k_d, self.l, self.l_prime, a, self.log2norm_l, self.log2norm_l_prime, na
        )
    }
}

/// `2 ln(count) / d^2`.
pub fn normalized_log(count: &BigUint, d: usize) -> f64 {
    2.0 * ln_big(count) / (d * d) as f64
}

fn ln_big(v: &BigUint) -> f64 {
    if v.is_zero() {
        return f64::NEG_INFINITY;
    }
    let shift = v.bits().saturating_sub(60);
    let top = (v >> shift).to_f64().expect("60-bit value fits");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// One report row per degree. `A_d` is enumerated for even `d` when
/// `a_budget` is given; an exhausted budget yields [`ACount::Partial`].
pub fn rate_report(
    degrees: &[usize],
    table: &CoefficientTable,
    a_budget: Option<u64>,
) -> Result<Vec<ArnoldReport>, ArnoldError> {
    degrees
        .iter()
        .map(|&d| {
            let budget = vertex_budget(d)?;
            let l = count_L(d, table)?;
            let l_prime = count_L_prime(d, table)?;
            let a = match a_budget {
                Some(limit) if d % 2 == 0 => match count_A(d, limit) {
                    Ok(v) => ACount::Exact(v),
                    Err(ArnoldError::Budget(p)) => ACount::Partial(p),
                    Err(e) => return Err(e),
                },
                _ => ACount::Skipped,
            };
            let log2norm_a = match &a {
                ACount::Exact(v) => Some(normalized_log(&BigUint::from(*v), d)),
                _ => None,
            };
            Ok(ArnoldReport {
                log2norm_l: normalized_log(&l, d),
                log2norm_l_prime: normalized_log(&l_prime, d),
                log2norm_a,
                budget,
                l,
                l_prime,
                a,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{balance_chi_labelled, RootedTree};

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn budgets() {
        let b = vertex_budget(5).unwrap();
        assert_eq!((b.n_d, b.k_d), (7, 4));
        let b = vertex_budget(6).unwrap();
        assert_eq!((b.n_d, b.k_d), (12, 9));
        let b = vertex_budget(4).unwrap();
        assert_eq!((b.n_d, b.k_d), (5, 4));
        for k in 2..20 {
            let b = vertex_budget(2 * k).unwrap();
            assert_eq!(b.k_d, k * k);
        }
        assert_eq!(vertex_budget(2), Err(ArnoldError::Degree(2)));
    }

    #[test]
    fn small_counts() {
        let t = leaf_polynomials(12);
        assert_eq!(count_L(4, &t).unwrap(), big(1));
        assert_eq!(count_L(5, &t).unwrap(), big(20));
        assert_eq!(count_L_prime(4, &t).unwrap(), big(5));
        assert!(count_L_prime(5, &t).unwrap() >= count_L(5, &t).unwrap());
        assert_eq!(count_A(4, u64::MAX).unwrap(), 5);
        assert_eq!(
            count_L(7, &t),
            Err(ArnoldError::Series(GenfuncError::InsufficientOrder {
                required: 16,
                available: 12
            }))
        );
        assert_eq!(count_A(5, u64::MAX), Err(ArnoldError::OddDegree(5)));
    }

    #[test]
    fn table_counts_match_enumeration() {
        let t = leaf_polynomials(16);
        for d in 3..=7 {
            assert_eq!(count_L(d, &t).unwrap(), big(brute_L(d).unwrap()), "d = {d}");
            assert_eq!(
                count_L_prime(d, &t).unwrap(),
                big(brute_L_prime(d).unwrap()),
                "d = {d}"
            );
        }
    }

    #[test]
    fn a6_below_l_prime6() {
        let t = leaf_polynomials(12);
        let a6 = count_A(6, u64::MAX).unwrap();
        // direct filter on the full stats as an independent check
        let b = vertex_budget(6).unwrap().star_bound();
        let direct: u64 = (1..=12)
            .map(|n| count_where(n, |s| s.even_star <= b && s.odd_star <= b))
            .sum();
        assert_eq!(a6, direct);
        assert!(big(a6) <= count_L_prime(6, &t).unwrap());
    }

    #[test]
    fn budget_stops_between_sizes() {
        // 1 + 1 + 2 + 4 trees through n = 4, then 9 more at n = 5
        let err = count_A(4, 10).unwrap_err();
        let ArnoldError::Budget(p) = err else {
            panic!("{err:?}")
        };
        assert_eq!((p.complete_through, p.visited, p.admitted), (4, 8, 4));
        assert_eq!(count_A(4, 17).unwrap(), 5);
    }

    #[test]
    fn report_rows() {
        let t = leaf_polynomials(12);
        let rows = rate_report(&[4, 5, 6], &t, Some(u64::MAX)).unwrap();
        assert_eq!(rows[0].csv_row(), "4,5,4,1,5,5,0.000000,0.201180,0.201180");
        assert!(rows[1].csv_row().starts_with("5,7,4,20,"));
        assert_eq!(rows[1].a, ACount::Skipped);
        assert!(rows[1].csv_row().ends_with(','));
        for r in &rows[1..] {
            assert!(r.log2norm_l > 0.0 && r.log2norm_l.is_finite());
            assert!(r.l <= r.l_prime);
        }
    }

    /// Removes the non-root leaves, balances `chi` to 0, and puts the leaves
    /// back on their old parents.
    fn pipeline(t: &RootedTree) -> (RootedTree, usize) {
        let lt = t.labelled();
        let parents = t.parents();
        let children = t.children();
        let keep: Vec<usize> = (0..t.len())
            .filter(|&v| v == t.root() || !children[v].is_empty())
            .collect();
        let mut skeleton = lt.induced(&keep, t.root());
        let steps = balance_chi_labelled(&mut skeleton, 0).unwrap();
        for v in (0..t.len()).filter(|v| !keep.contains(v)) {
            let p = parents[v].unwrap();
            let at = keep.iter().position(|&w| w == p).unwrap();
            skeleton.attach_leaf(at);
        }
        assert_eq!(skeleton.len(), t.len() + steps.len());
        (skeleton.canonical(), steps.len())
    }

    #[test]
    fn leaf_bound_trees_reach_the_star_bounds_after_balancing() {
        let b = vertex_budget(5).unwrap();
        let target = vertex_budget(b.d + 6).unwrap();
        let star_bound = (target.k - 1) * (target.k - 2) / 2;
        let mut checked = 0;
        for n in 1..=b.n_d {
            for t in enumerate_rooted_trees(n).filter(|t| t.leaf_count() >= b.leaf_threshold(n)) {
                let (out, extra) = pipeline(&t);
                let log2 = (usize::BITS - 1 - n.leading_zeros()) as usize;
                assert!(extra <= 3 + 3 * log2, "{t:?}: {extra} extra vertices");
                assert!(out.len() <= target.n_d);
                let (even, odd) = out.arnold_star_counts();
                assert!(even <= star_bound && odd <= star_bound, "{t:?} -> {out:?}");
                checked += 1;
            }
        }
        assert_eq!(
            big(checked),
            count_L_prime(5, &leaf_polynomials(7)).unwrap()
        );
    }
}
