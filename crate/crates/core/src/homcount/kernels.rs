//! Algebraic counting kernels on the induced subgraph `G[U]`.
//!
//! Per-configuration sums are accumulated in `u128`; with `|U| < 2^18` no
//! configuration of at most seven vertices can overflow. Walk counts of
//! arbitrary length fall back to big integers when `u128` overflows.

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{bits, DenseGraph, Induced, VertexSet};

const MAX_KERNEL_VERTICES: usize = 1 << 18;

fn induced(g: &DenseGraph, set: &VertexSet) -> Result<Induced> {
    if set.len() >= MAX_KERNEL_VERTICES {
        return Err(Error::TooLarge {
            requested: set.len() as u64,
            limit: MAX_KERNEL_VERTICES,
        });
    }
    Ok(Induced::new(g, set))
}

fn par_sum<F>(m: usize, f: F) -> BigUint
where
    F: Fn(usize) -> u128 + Sync + Send,
{
    let parts: Vec<u128> = (0..m).into_par_iter().map(f).collect();
    parts.into_iter().fold(BigUint::zero(), |acc, x| acc + x)
}

fn step_u128(ind: &Induced, w: &[u128]) -> Option<Vec<u128>> {
    (0..ind.len())
        .map(|a| {
            ind.nbrs(a)
                .iter()
                .try_fold(0u128, |acc, &b| acc.checked_add(w[b as usize]))
        })
        .collect()
}

fn step_big(ind: &Induced, w: &[BigUint]) -> Vec<BigUint> {
    (0..ind.len())
        .map(|a| ind.nbrs(a).iter().map(|&b| &w[b as usize]).sum())
        .collect()
}

/// `1^T A_U^k 1`: labelled, possibly degenerate walks with `k` edges.
pub fn count_paths(g: &DenseGraph, set: &VertexSet, k: usize) -> Result<BigUint> {
    let ind = induced(g, set)?;
    let m = ind.len();
    let mut w = vec![1u128; m];
    let mut done = 0;
    while done < k {
        match step_u128(&ind, &w) {
            Some(next) => {
                w = next;
                done += 1;
            }
            None => break,
        }
    }
    if done == k {
        return Ok(w.into_iter().fold(BigUint::zero(), |a, x| a + x));
    }
    let mut big: Vec<BigUint> = w.into_iter().map(BigUint::from).collect();
    for _ in done..k {
        big = step_big(&ind, &big);
    }
    Ok(big.into_iter().sum())
}

/// `tr(A_U^m)`: closed walks of length `m`.
pub fn count_cycles(g: &DenseGraph, set: &VertexSet, m: usize) -> Result<BigUint> {
    if m == 0 {
        return Err(Error::InvalidArgument("cycle length must be positive".into()));
    }
    let ind = induced(g, set)?;
    let size = ind.len();
    let parts: Vec<BigUint> = (0..size)
        .into_par_iter()
        .map(|s| {
            let mut w = vec![0u128; size];
            w[s] = 1;
            for step in 0..m {
                match step_u128(&ind, &w) {
                    Some(next) => w = next,
                    None => {
                        let mut big: Vec<BigUint> = w.iter().map(|&x| BigUint::from(x)).collect();
                        for _ in step..m {
                            big = step_big(&ind, &big);
                        }
                        return big.swap_remove(s);
                    }
                }
            }
            BigUint::from(w[s])
        })
        .collect();
    Ok(parts.into_iter().sum())
}

/// `sum_u (A_U^4)_{uu} deg_U(u)`, with `(A^4)_{uu} = sum_w cn(u, w)^2`.
pub fn count_h1(g: &DenseGraph, set: &VertexSet) -> Result<BigUint> {
    let ind = induced(g, set)?;
    let m = ind.len();
    Ok(par_sum(m, |u| {
        let deg = ind.degree(u) as u128;
        if deg == 0 {
            return 0;
        }
        let closed: u128 = (0..m).map(|w| (ind.cn(u, w) as u128).pow(2)).sum();
        closed * deg
    }))
}

/// Sum of `cn(u, y)^3` over ordered pairs; the labelled `K_{2,3}` count.
pub fn count_h2(g: &DenseGraph, set: &VertexSet) -> Result<BigUint> {
    let ind = induced(g, set)?;
    let m = ind.len();
    Ok(par_sum(m, |u| {
        (0..m).map(|y| (ind.cn(u, y) as u128).pow(3)).sum()
    }))
}

/// `sum_u deg_U(u)^s`: labelled stars `K_{1,s}`.
pub fn count_star(g: &DenseGraph, set: &VertexSet, s: u32) -> Result<BigUint> {
    let ind = induced(g, set)?;
    Ok(par_sum(ind.len(), |u| (ind.degree(u) as u128).pow(s)))
}

fn h3_work(ind: &Induced) -> u128 {
    // sum over y ~ z ~ u of deg(u), plus the |U|^2 common-neighbour table
    let m = ind.len();
    let second: Vec<u128> = (0..m)
        .map(|z| ind.nbrs(z).iter().map(|&u| ind.degree(u as usize) as u128).sum())
        .collect();
    let walk3: u128 = (0..m).map(|z| ind.degree(z) as u128 * second[z]).sum();
    walk3 + (m * m) as u128
}

fn check_budget(work: u128, budget: u64) -> Result<()> {
    if work > budget as u128 {
        Err(Error::BudgetExceeded { budget })
    } else {
        Ok(())
    }
}

/// `sum_{y ~ z} sum_v f(y, z, v)^2` with
/// `f(y, z, v) = sum_u A[z, u] A[u, v] cn(y, u)`.
pub fn count_h3(g: &DenseGraph, set: &VertexSet, budget: u64) -> Result<BigUint> {
    let ind = induced(g, set)?;
    check_budget(h3_work(&ind), budget)?;
    let m = ind.len();
    Ok(par_sum(m, |y| {
        let cn_y: Vec<u32> = (0..m).map(|u| ind.cn(y, u)).collect();
        let mut f = vec![0u64; m];
        let mut touched: Vec<u32> = Vec::new();
        let mut total = 0u128;
        for &z in ind.nbrs(y) {
            for &u in ind.nbrs(z as usize) {
                let c = cn_y[u as usize] as u64;
                if c == 0 {
                    continue;
                }
                for &v in ind.nbrs(u as usize) {
                    let slot = &mut f[v as usize];
                    if *slot == 0 {
                        touched.push(v);
                    }
                    *slot += c;
                }
            }
            for v in touched.drain(..) {
                let x = std::mem::take(&mut f[v as usize]) as u128;
                total += x * x;
            }
        }
        total
    }))
}

/// `H3` with the extra edge `x ~ u'`:
/// `sum_{y ~ z} sum_{u' ~ z} cn(u', y) sum_{v ~ u'} sum_{x in N(y) ∩ N(u')} |N(x) ∩ N(z) ∩ N(v)|`.
pub fn count_h3_plus(g: &DenseGraph, set: &VertexSet, budget: u64) -> Result<BigUint> {
    let ind = induced(g, set)?;
    let m = ind.len();
    // y, z ~ y, u' ~ z, v ~ u', x ~ y: bounded by sum_y deg(y) sum_{z ~ y} sum_{u' ~ z} deg(u')
    let second: Vec<u128> = (0..m)
        .map(|z| ind.nbrs(z).iter().map(|&u| ind.degree(u as usize) as u128).sum())
        .collect();
    let work: u128 = (0..m)
        .map(|y| {
            ind.degree(y) as u128
                * ind.nbrs(y).iter().map(|&z| second[z as usize]).sum::<u128>()
        })
        .sum::<u128>()
        + (m * m) as u128;
    check_budget(work, budget)?;
    let words = ind.words();
    Ok(par_sum(m, |y| {
        let row_y = ind.row(y);
        let mut shared = vec![0u64; words];
        let mut total = 0u128;
        for &z in ind.nbrs(y) {
            let row_z = ind.row(z as usize);
            for &up in ind.nbrs(z as usize) {
                let row_up = ind.row(up as usize);
                for (s, (a, b)) in shared.iter_mut().zip(row_y.iter().zip(row_up)) {
                    *s = a & b;
                }
                let c = bits::popcount(&shared) as u128;
                if c == 0 {
                    continue;
                }
                let mut inner = 0u128;
                for x in bits::ones(&shared) {
                    let row_x = ind.row(x);
                    for &v in ind.nbrs(up as usize) {
                        inner += bits::and3_popcount(row_x, row_z, ind.row(v as usize)) as u128;
                    }
                }
                total += c * inner;
            }
        }
        total
    }))
}

/// `H3` with `x = u'`:
/// `sum_x sum_{y ~ x} cn(x, y) sum_{z in N(x) ∩ N(y)} sum_{u in N(x) ∩ N(z)} cn(x, u)`.
pub fn count_h3_minus(g: &DenseGraph, set: &VertexSet) -> Result<BigUint> {
    let ind = induced(g, set)?;
    let m = ind.len();
    let words = ind.words();
    Ok(par_sum(m, |x| {
        let row_x = ind.row(x);
        let cn_x: Vec<u32> = (0..m).map(|u| ind.cn(x, u)).collect();
        let mut xy = vec![0u64; words];
        let mut xz = vec![0u64; words];
        let mut total = 0u128;
        for &y in ind.nbrs(x) {
            let cxy = cn_x[y as usize] as u128;
            if cxy == 0 {
                continue;
            }
            for (s, (a, b)) in xy.iter_mut().zip(row_x.iter().zip(ind.row(y as usize))) {
                *s = a & b;
            }
            let mut inner = 0u128;
            for z in bits::ones(&xy) {
                for (s, (a, b)) in xz.iter_mut().zip(row_x.iter().zip(ind.row(z))) {
                    *s = a & b;
                }
                inner += bits::ones(&xz).map(|u| cn_x[u] as u128).sum::<u128>();
            }
            total += cxy * inner;
        }
        total
    }))
}

/// `sum_{z ~ u'} ((A_U^3)_{z u'})^2`.
pub fn count_h4(g: &DenseGraph, set: &VertexSet) -> Result<BigUint> {
    let ind = induced(g, set)?;
    let m = ind.len();
    Ok(par_sum(m, |z| {
        let cn_z: Vec<u32> = (0..m).map(|w| ind.cn(z, w)).collect();
        ind.nbrs(z)
            .iter()
            .map(|&up| {
                let walks: u128 = ind.nbrs(up as usize).iter().map(|&w| cn_z[w as usize] as u128).sum();
                walks * walks
            })
            .sum()
    }))
}

/// Largest common-neighbour count inside `set` over unordered distinct pairs
/// of `set`; zero when `|set| < 2`.
pub fn max_common_neighbors(g: &DenseGraph, set: &VertexSet) -> usize {
    let ind = Induced::new(g, set);
    let m = ind.len();
    (0..m)
        .into_par_iter()
        .map(|a| (a + 1..m).map(|b| ind.cn(a, b)).max().unwrap_or(0))
        .max()
        .unwrap_or(0) as usize
}
