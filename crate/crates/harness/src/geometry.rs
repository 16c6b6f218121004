use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use vclab_core::builders::FieldGraphSpec;
use vclab_core::graph::{DenseGraph, VertexSet};
use vclab_core::homcount::{count_pattern_with_domains, max_common_neighbors, Pattern};
use vclab_core::vcdim::{find_selector_triple, is_shattered};

use crate::context::GraphContext;
use crate::error::{config_err, Result};
use crate::report::{RowContext, SuiteReport, Verdict};
use crate::seeds::trial_seed;

/// First copy of the 6-vertex configuration `(x, y, z, u, v, x′)` with
/// `x` drawn from `xs`, in lexicographic order of the tuple; with `distinct`
/// only copies on six different vertices qualify.
fn first_h3_minus(g: &DenseGraph, xs: &[u32], distinct: bool) -> Option<[usize; 6]> {
    let fresh = |t: &[usize], c: usize| !distinct || !t.contains(&c);
    for &x in xs {
        let x = x as usize;
        for y in g.neighbors(x).filter(|&y| fresh(&[x], y)) {
            for z in g.neighbors(y).filter(|&z| g.has_edge(x, z) && fresh(&[x, y], z)) {
                for u in g.neighbors(z).filter(|&u| g.has_edge(u, x) && fresh(&[x, y, z], u)) {
                    for v in g.neighbors(u).filter(|&v| g.has_edge(x, v) && fresh(&[x, y, z, u], v)) {
                        if let Some(xp) = g
                            .neighbors(x)
                            .find(|&xp| g.has_edge(xp, y) && fresh(&[x, y, z, u, v], xp))
                        {
                            return Some([x, y, z, u, v, xp]);
                        }
                    }
                }
            }
        }
    }
    None
}

/// On `dot_product_graph(q, t)`: (a) no two vertices share more than
/// `q^{t-2}` neighbours; (b) for `t = 3`, no copy of the `H3⁻` configuration
/// has a non-unit vector (no loop) in the `x` role.
pub fn geometry_checks(q: u32, t: usize, budget: u64) -> Result<SuiteReport> {
    if t < 2 {
        return Err(config_err("geometry checks need t >= 2"));
    }
    let ctx = GraphContext::build(&FieldGraphSpec::dot_product(q, t))?;
    let g = &ctx.graph;
    let n = g.n();
    let rc = RowContext { suite: "geometry", ctx: &ctx };
    let mut report = SuiteReport::new("geometry");
    let all = VertexSet::all(n);

    let gamma = max_common_neighbors(g, &all);
    let limit = (q as u64).pow(t as u32 - 2);
    let ok = gamma as u64 <= limit;
    report.rows.push(rc.row(
        n, None, 0, 0, "max_common_neighbors", gamma.to_string(), limit.to_string(),
        Verdict::from_bool(ok),
    ));
    if !ok {
        let pair = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .find(|&(a, b)| {
                vclab_core::graph::common_neighbors(g, a, b, &all) == gamma
            });
        report.failures.push(format!(
            "geometry: dot({q},{t}) pair {pair:?} has {gamma} common neighbours > {limit}"
        ));
    }

    if t == 3 {
        let nonunit: Vec<u32> = (0..n as u32).filter(|&v| !g.has_loop(v as usize)).collect();
        let mut domains = vec![all.clone(); 6];
        domains[0] = VertexSet::new(nonunit.clone(), n)?;
        let pat = Pattern::h3_minus();
        let row = match count_pattern_with_domains(g, &domains, &pat, budget) {
            Ok(c) => {
                let zero = c == 0u32.into();
                if !zero {
                    let labels = g.labels().expect("field graphs carry labels");
                    let show = |w: [usize; 6]| {
                        w.iter().map(|&v| format!("{v}={}", labels[v])).collect::<Vec<_>>().join(" ")
                    };
                    let w = first_h3_minus(g, &nonunit, false).expect("nonzero count has a witness");
                    let mut msg = format!(
                        "geometry: dot({q},3) has {c} H3minus copies with non-unit x; first (x,y,z,u,v,x') = {}",
                        show(w)
                    );
                    if let Some(w) = first_h3_minus(g, &nonunit, true) {
                        msg.push_str(&format!("; first on six distinct vertices = {}", show(w)));
                    }
                    report.failures.push(msg);
                }
                rc.row(n, None, 0, 0, "H3minus_nonunit_x", c.to_string(), "0".into(), Verdict::from_bool(zero))
            }
            Err(e) => {
                rc.row(n, None, 0, 0, "H3minus_nonunit_x", format!("{e}"), "0".into(), Verdict::Skipped)
            }
        };
        report.rows.push(row);
        // same count restricted to injective copies, for diagnosis
        let mut injective = pat.clone();
        for a in 0..6 {
            for b in a + 1..6 {
                injective = injective.distinct(a, b)?;
            }
        }
        let row = match count_pattern_with_domains(g, &domains, &injective, budget) {
            Ok(c) => rc.row(n, None, 0, 0, "H3minus_nonunit_x_injective", c.to_string(), String::new(), Verdict::Info),
            Err(e) => rc.row(n, None, 0, 0, "H3minus_nonunit_x_injective", format!("{e}"), String::new(), Verdict::Skipped),
        };
        report.rows.push(row);
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadrupleMode {
    Exhaustive,
    Randomized { samples: u64 },
}

fn binomial4(n: u64) -> u64 {
    if n < 4 {
        0
    } else {
        n * (n - 1) * (n - 2) * (n - 3) / 24
    }
}

/// Checks that no 4-set of `dot_product_graph(q, 3)` is shattered by the
/// full neighbourhood family. Exhaustive mode errors if `C(n, 4)` exceeds
/// `budget`.
pub fn quadruple_upper_bound_check(
    q: u32,
    mode: QuadrupleMode,
    budget: u64,
    seed: u64,
) -> Result<SuiteReport> {
    let ctx = GraphContext::build(&FieldGraphSpec::dot_product(q, 3))?;
    let g = &ctx.graph;
    let n = g.n();
    let all = VertexSet::all(n);
    let check = |x: &[u32]| is_shattered(g, &all, x).map(|w| w.map(|w| (x.to_vec(), w)));

    let (checked, found) = match mode {
        QuadrupleMode::Exhaustive => {
            let total = binomial4(n as u64);
            if total > budget {
                return Err(vclab_core::Error::BudgetExceeded { budget }.into());
            }
            let per_first: Vec<Result<(u64, Option<_>)>> = (0..n as u32)
                .into_par_iter()
                .map(|a| {
                    let mut seen = 0u64;
                    for b in a + 1..n as u32 {
                        for c in b + 1..n as u32 {
                            for d in c + 1..n as u32 {
                                seen += 1;
                                if let Some(hit) = check(&[a, b, c, d])? {
                                    return Ok((seen, Some(hit)));
                                }
                            }
                        }
                    }
                    Ok((seen, None))
                })
                .collect();
            let mut checked = 0;
            let mut found = Vec::new();
            for r in per_first {
                let (seen, hit) = r?;
                checked += seen;
                found.extend(hit);
            }
            (checked, found)
        }
        QuadrupleMode::Randomized { samples } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let xs: Vec<Vec<u32>> = (0..samples)
                .map(|_| {
                    let mut x: Vec<u32> = sample(&mut rng, n, 4).into_iter().map(|v| v as u32).collect();
                    x.sort_unstable();
                    x
                })
                .collect();
            let hits: Vec<_> = xs
                .par_iter()
                .map(|x| check(x))
                .collect::<vclab_core::Result<Vec<_>>>()?;
            (samples, hits.into_iter().flatten().collect())
        }
    };

    let rc = RowContext { suite: "quadruple", ctx: &ctx };
    let mut report = SuiteReport::new("quadruple");
    report.rows.push(rc.row(
        n, None, 0, seed, "quadruples_checked", checked.to_string(), String::new(), Verdict::Info,
    ));
    report.rows.push(rc.row(
        n, None, 0, seed, "shattered_quadruples", found.len().to_string(), "0".into(),
        Verdict::from_bool(found.is_empty()),
    ));
    for (x, w) in found {
        report.failures.push(format!(
            "quadruple: dot({q},3) seed {seed} shatters {}",
            serde_json::to_string(&w).unwrap_or_else(|_| format!("{x:?}"))
        ));
    }
    Ok(report)
}

/// `(trial seed, targets, selector found)`.
type SelectorOutcome = (u64, [u32; 3], Option<[u32; 3]>);

/// Samples distinct triples from `V` and records how often a selector triple
/// exists with `U = V`. Fails only when the success fraction is below
/// `min_fraction`.
pub fn selector_condition_check(
    ctx: &GraphContext,
    triples: u64,
    seed: u64,
    min_fraction: f64,
) -> Result<SuiteReport> {
    let g = &ctx.graph;
    let n = g.n();
    if n < 3 {
        return Err(config_err("selector check needs at least 3 vertices"));
    }
    let all = VertexSet::all(n);
    let outcomes: Vec<Result<SelectorOutcome>> = (0..triples)
        .into_par_iter()
        .map(|i| {
            let s = trial_seed(seed, i);
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let v: Vec<u32> = sample(&mut rng, n, 3).into_iter().map(|v| v as u32).collect();
            let v = [v[0], v[1], v[2]];
            Ok((s, v, find_selector_triple(g, &all, v)?))
        })
        .collect();
    let rc = RowContext { suite: "selector", ctx };
    let mut report = SuiteReport::new("selector");
    let mut hits = 0u64;
    for (i, o) in outcomes.into_iter().enumerate() {
        let (s, v, found) = o?;
        hits += found.is_some() as u64;
        let value = match found {
            Some(u) => format!("{}-{}-{}", u[0], u[1], u[2]),
            None => "none".into(),
        };
        report.rows.push(rc.row(
            n, None, i as u64, s, &format!("selector_{}-{}-{}", v[0], v[1], v[2]), value,
            String::new(), Verdict::Info,
        ));
    }
    let frac = if triples == 0 { 0.0 } else { hits as f64 / triples as f64 };
    let ok = frac >= min_fraction;
    report.rows.push(rc.row(
        n, None, triples, seed, "selector_success_fraction", format!("{frac:.6}"),
        format!("{min_fraction:.6}"), Verdict::from_bool(ok),
    ));
    if !ok {
        report.failures.push(format!(
            "selector: graph {} seed {seed}: success fraction {frac} < {min_fraction}",
            ctx.hash
        ));
    }
    Ok(report)
}
