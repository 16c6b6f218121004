//! Backtracking homomorphism enumeration used as the reference count.
//!
//! Candidate sets are packed bit rows: the domain of the next pattern vertex
//! is its role set intersected with the rows of already-placed required
//! neighbours, minus the rows of placed forbidden neighbours and minus the
//! images it must differ from. The final vertex is counted by popcount, so
//! the result equals the naive tuple count exactly.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigUint;
use rayon::prelude::*;

use super::Pattern;
use crate::error::{Error, Result};
use crate::graph::{bits, DenseGraph, VertexSet};

/// Default cap on search work (one unit per constraint applied).
pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

/// Per pattern vertex, constraints against vertices placed earlier.
struct Step {
    role: usize,
    required: Vec<usize>,
    forbidden: Vec<usize>,
    distinct: Vec<usize>,
    self_loop: Option<bool>,
}

fn plan(pat: &Pattern) -> Vec<Step> {
    let k = pat.k();
    let mut order: Vec<usize> = Vec::with_capacity(k);
    let mut placed = vec![false; k];
    fn touches(a: usize, set: &BTreeSet<(usize, usize)>) -> Vec<usize> {
        set.iter()
            .filter(|&&(x, y)| x != y && (x == a || y == a))
            .map(|&(x, y)| if x == a { y } else { x })
            .collect()
    }
    let degree = |a: usize| {
        touches(a, pat.required()).len()
            + touches(a, pat.forbidden()).len()
            + touches(a, pat.distinct_pairs()).len()
    };
    for _ in 0..k {
        // most constraints into the placed prefix, then highest degree, then index
        let next = (0..k)
            .filter(|&a| !placed[a])
            .max_by_key(|&a| {
                let into = touches(a, pat.required())
                    .into_iter()
                    .chain(touches(a, pat.forbidden()))
                    .chain(touches(a, pat.distinct_pairs()))
                    .filter(|&b| placed[b])
                    .count();
                (into, degree(a), std::cmp::Reverse(a))
            })
            .expect("unplaced vertex exists");
        placed[next] = true;
        order.push(next);
    }
    let pos: Vec<usize> = {
        let mut p = vec![0; k];
        for (i, &a) in order.iter().enumerate() {
            p[a] = i;
        }
        p
    };
    order
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            let earlier = |set| {
                touches(a, set)
                    .into_iter()
                    .filter(|&b| pos[b] < i)
                    .map(|b| pos[b])
                    .collect::<Vec<_>>()
            };
            let self_loop = if pat.required().contains(&(a, a)) {
                Some(true)
            } else if pat.forbidden().contains(&(a, a)) {
                Some(false)
            } else {
                None
            };
            Step {
                role: a,
                required: earlier(pat.required()),
                forbidden: earlier(pat.forbidden()),
                distinct: earlier(pat.distinct_pairs()),
                self_loop,
            }
        })
        .collect()
}

struct Search<'a> {
    g: &'a DenseGraph,
    steps: Vec<Step>,
    /// Role masks, indexed by search position.
    domains: Vec<Vec<u64>>,
    loop_mask: Vec<u64>,
    budget: u64,
    work: &'a AtomicU64,
}

impl Search<'_> {
    fn charge(&self, units: u64) -> Result<()> {
        let total = self.work.fetch_add(units, Ordering::Relaxed) + units;
        if total > self.budget {
            Err(Error::BudgetExceeded {
                budget: self.budget,
            })
        } else {
            Ok(())
        }
    }

    fn candidates(&self, depth: usize, assigned: &[usize]) -> Result<Vec<u64>> {
        let step = &self.steps[depth];
        let mut dom = self.domains[depth].clone();
        for &p in &step.required {
            for (d, r) in dom.iter_mut().zip(self.g.row(assigned[p])) {
                *d &= r;
            }
        }
        for &p in &step.forbidden {
            for (d, r) in dom.iter_mut().zip(self.g.row(assigned[p])) {
                *d &= !r;
            }
        }
        for &p in &step.distinct {
            bits::clear(&mut dom, assigned[p]);
        }
        match step.self_loop {
            Some(true) => dom.iter_mut().zip(&self.loop_mask).for_each(|(d, l)| *d &= l),
            Some(false) => dom.iter_mut().zip(&self.loop_mask).for_each(|(d, l)| *d &= !l),
            None => {}
        }
        let units = 1
            + step.required.len()
            + step.forbidden.len()
            + step.distinct.len()
            + step.self_loop.is_some() as usize;
        self.charge(units as u64)?;
        Ok(dom)
    }

    fn count(&self, depth: usize, assigned: &mut Vec<usize>) -> Result<u128> {
        let dom = self.candidates(depth, assigned)?;
        if depth + 1 == self.steps.len() {
            return Ok(bits::popcount(&dom) as u128);
        }
        let mut total = 0u128;
        for v in bits::ones(&dom) {
            assigned.push(v);
            total += self.count(depth + 1, assigned)?;
            assigned.pop();
        }
        Ok(total)
    }
}

/// Number of maps from the pattern vertices into `set` satisfying every
/// constraint of `pat`.
pub fn count_pattern_bruteforce(
    g: &DenseGraph,
    set: &VertexSet,
    pat: &Pattern,
    budget: u64,
) -> Result<BigUint> {
    let domains = vec![set.clone(); pat.k()];
    count_pattern_with_domains(g, &domains, pat, budget)
}

/// As [`count_pattern_bruteforce`], but pattern vertex `i` ranges over
/// `domains[i]`.
pub fn count_pattern_with_domains(
    g: &DenseGraph,
    domains: &[VertexSet],
    pat: &Pattern,
    budget: u64,
) -> Result<BigUint> {
    if domains.len() != pat.k() {
        return Err(Error::InvalidArgument(format!(
            "{} domains for a {}-vertex pattern",
            domains.len(),
            pat.k()
        )));
    }
    for d in domains {
        if d.members().last().is_some_and(|&v| v as usize >= g.n()) {
            return Err(Error::InvalidVertexSet("domain vertex out of range".into()));
        }
    }
    if pat.k() == 0 {
        return Ok(BigUint::from(1u8));
    }
    let steps = plan(pat);
    let masks: Vec<Vec<u64>> = steps.iter().map(|s| g.mask(&domains[s.role])).collect();
    let mut loop_mask = vec![0u64; g.words()];
    for i in 0..g.n() {
        if g.has_loop(i) {
            bits::set(&mut loop_mask, i);
        }
    }
    let work = AtomicU64::new(0);
    let search = Search {
        g,
        steps,
        domains: masks,
        loop_mask,
        budget,
        work: &work,
    };
    let first = search.candidates(0, &[])?;
    if search.steps.len() == 1 {
        return Ok(BigUint::from(bits::popcount(&first)));
    }
    let roots: Vec<usize> = bits::ones(&first).collect();
    let parts: Vec<Result<u128>> = roots
        .par_iter()
        .map(|&v| {
            let mut assigned = vec![v];
            search.count(1, &mut assigned)
        })
        .collect();
    let mut total = BigUint::from(0u8);
    for p in parts {
        total += p?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_from_relation;

    /// Plain nested enumeration over all |U|^k tuples.
    fn naive(g: &DenseGraph, set: &VertexSet, pat: &Pattern) -> u64 {
        let m = set.members();
        let k = pat.k();
        let mut idx = vec![0usize; k];
        let mut count = 0;
        if m.is_empty() {
            return if k == 0 { 1 } else { 0 };
        }
        loop {
            let img: Vec<usize> = idx.iter().map(|&i| m[i] as usize).collect();
            let ok = pat.required().iter().all(|&(a, b)| g.has_edge(img[a], img[b]))
                && pat.forbidden().iter().all(|&(a, b)| !g.has_edge(img[a], img[b]))
                && pat.distinct_pairs().iter().all(|&(a, b)| img[a] != img[b]);
            count += ok as u64;
            let mut p = 0;
            loop {
                if p == k {
                    return count;
                }
                idx[p] += 1;
                if idx[p] < m.len() {
                    break;
                }
                idx[p] = 0;
                p += 1;
            }
        }
    }

    fn k3() -> DenseGraph {
        build_from_relation(3, |i, j| i != j).unwrap()
    }

    #[test]
    fn k3_examples() {
        let all = VertexSet::all(3);
        let edge = Pattern::path(1);
        assert_eq!(count_pattern_bruteforce(&k3(), &all, &edge, DEFAULT_BUDGET).unwrap(), 6u32.into());
        let tri = Pattern::cycle(3);
        assert_eq!(count_pattern_bruteforce(&k3(), &all, &tri, DEFAULT_BUDGET).unwrap(), 6u32.into());
    }

    #[test]
    fn edgeless_gives_zero() {
        let g = DenseGraph::empty(5).unwrap();
        let all = VertexSet::all(5);
        assert_eq!(count_pattern_bruteforce(&g, &all, &Pattern::h1(), DEFAULT_BUDGET).unwrap(), 0u32.into());
        // no required edges: every tuple counts
        assert_eq!(count_pattern_bruteforce(&g, &all, &Pattern::new(3), DEFAULT_BUDGET).unwrap(), 125u32.into());
    }

    #[test]
    fn constraints_match_naive_enumeration() {
        let g = DenseGraph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (4, 4), (4, 5), (1, 4)]).unwrap();
        let u = VertexSet::new(vec![0, 1, 2, 3, 4], 6).unwrap();
        let pats = [
            Pattern::h1(),
            Pattern::h1().forbid(1, 4).unwrap().distinct(0, 2).unwrap().distinct(1, 3).unwrap(),
            Pattern::cycle(1),
            Pattern::cycle(2),
            Pattern::new(2).forbid(0, 0).unwrap().require(0, 1).unwrap(),
            Pattern::h4(),
            Pattern::star(3).distinct(1, 2).unwrap(),
        ];
        for pat in &pats {
            let got = count_pattern_bruteforce(&g, &u, pat, DEFAULT_BUDGET).unwrap();
            assert_eq!(got, naive(&g, &u, pat).into(), "{pat:?}");
        }
    }

    #[test]
    fn per_role_domains() {
        let g = k3();
        let only0 = VertexSet::new(vec![0], 3).unwrap();
        let all = VertexSet::all(3);
        let n = count_pattern_with_domains(&g, &[only0, all], &Pattern::path(1), DEFAULT_BUDGET).unwrap();
        assert_eq!(n, 2u32.into());
    }

    #[test]
    fn budget_is_enforced() {
        let g = build_from_relation(10, |i, j| i != j).unwrap();
        let err = count_pattern_bruteforce(&g, &VertexSet::all(10), &Pattern::h3(), 1000).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { budget: 1000 }));
    }
}
