//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use vclab_core::builders::{random_graph, FieldGraphSpec};
use vclab_core::graph::{build_from_relation, DenseGraph, VertexSet};
use vclab_core::homcount::{count_pattern_bruteforce, Config, DEFAULT_BUDGET};
use vclab_core::vcdim::{vc_at_least, vc_dimension_exact, ExactSearchOptions, SampleMode};

use vclab_harness::context::GraphContext;
use vclab_harness::geometry::{geometry_checks, quadruple_upper_bound_check, QuadrupleMode};
use vclab_harness::mixing::{mixing_check, tensor_mixing_check, MAX_TENSOR_VERTICES};
use vclab_harness::report::{csv_body_of, SuiteReport, Verdict};
use vclab_harness::suites::{run_suite, GraphSource, SizeSpec, Suite, SuiteParams};
use vclab_harness::vcsweep::{vc_sweep, SweepOptions};

const SPECTRAL_SLACK: f64 = 1e-6;
const MIXING_TOL: f64 = 1e-9;
const COUNT_K: f64 = 10.0;
const VC_CANDIDATES: u64 = 1_000_000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn field_specs() -> Vec<FieldGraphSpec> {
    let mut specs = Vec::new();
    for (t, qs) in [(2usize, &[5u32, 7, 11, 13, 17, 19, 23][..]), (3, &[3, 5, 7][..])] {
        for &q in qs {
            specs.push(FieldGraphSpec::distance(q, t));
            specs.push(FieldGraphSpec::dot_product(q, t));
        }
    }
    specs
}

fn label(s: &FieldGraphSpec) -> String {
    format!("{}({},{})", s.family.name(), s.q, s.t)
}

fn built_graphs() -> Vec<(String, GraphContext)> {
    field_specs()
        .par_iter()
        .map(|s| (label(s), GraphContext::build(s).expect("field graph builds")))
        .collect()
}

fn with_random_loops(g: &DenseGraph, seed: u64) -> DenseGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = g.n();
    let mut edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| g.neighbors(i).filter(move |&j| j >= i).map(move |j| (i, j)))
        .collect();
    edges.extend((0..n).filter(|_| rng.gen_bool(0.25)).map(|i| (i, i)));
    DenseGraph::from_edges(n, &edges).unwrap()
}

fn fast_configs() -> Vec<Config> {
    let mut v: Vec<Config> = (0..=4).map(Config::Path).collect();
    v.extend((1..=6).map(Config::Cycle));
    v.extend([
        Config::H1,
        Config::H2,
        Config::H3,
        Config::H3Plus,
        Config::H3Minus,
        Config::H4,
        Config::K13,
        Config::K14,
        Config::K23,
    ]);
    v
}

fn criterion_1() -> Outcome {
    let configs = fast_configs();
    let cases: Vec<(u64, usize, f64)> = (0..120u64)
        .map(|s| (s, 6 + (s as usize % 7), [0.2, 0.5, 0.8][(s / 7) as usize % 3]))
        .collect();
    let mismatches: Vec<String> = cases
        .par_iter()
        .flat_map_iter(|&(seed, n, p)| {
            let base = random_graph(n, p, 1000 + seed).unwrap();
            let g = if seed % 3 == 2 { with_random_loops(&base, seed) } else { base };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut sets = vec![VertexSet::all(n)];
            while sets.len() < 4 {
                let m: Vec<u32> = (0..n as u32).filter(|_| rng.gen_bool(0.6)).collect();
                if !m.is_empty() && m.len() < n {
                    sets.push(VertexSet::new(m, n).unwrap());
                }
            }
            let mut bad = Vec::new();
            for u in &sets {
                for c in &configs {
                    let fast = c.count(&g, u, DEFAULT_BUDGET).unwrap();
                    let slow = count_pattern_bruteforce(&g, u, &c.pattern(), DEFAULT_BUDGET).unwrap();
                    if fast != slow {
                        bad.push(format!("{c} seed={seed} U={:?}: {fast} vs {slow}", u.members()));
                    }
                }
            }
            bad
        })
        .collect();
    outcome(
        mismatches.is_empty(),
        format!(
            "{} graphs x 4 vertex sets x {} counters; mismatches: {}",
            cases.len(),
            configs.len(),
            if mismatches.is_empty() { "none".into() } else { mismatches[..mismatches.len().min(3)].join("; ") }
        ),
    )
}

fn criterion_2(graphs: &[(String, GraphContext)]) -> Outcome {
    let mut bad = Vec::new();
    let mut worst = 0.0f64;
    for (name, ctx) in graphs {
        let (q, t) = (ctx.q.unwrap() as f64, ctx.t.unwrap() as i32);
        let bound = 2.0 * q.powf((t - 1) as f64 / 2.0);
        worst = worst.max(ctx.profile.lambda / bound);
        if ctx.profile.lambda > bound + SPECTRAL_SLACK {
            bad.push(format!("{name}: lambda {} > {bound}", ctx.profile.lambda));
        }
        if ctx.family == "dotproduct" {
            let d = (q as usize).pow(t as u32 - 1);
            if ctx.graph.regular_degree() != Some(d) {
                bad.push(format!("{name}: row sums are not all {d}"));
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("{} graphs, max lambda/bound {worst:.4}{}", graphs.len(), if bad.is_empty() { String::new() } else { format!("; {}", bad.join("; ")) }),
    )
}

fn criterion_3(graphs: &[(String, GraphContext)]) -> Outcome {
    let results: Vec<(String, f64, Option<f64>, usize)> = graphs
        .par_iter()
        .enumerate()
        .map(|(i, (name, ctx))| {
            let (scalar, _) = mixing_check(ctx, 1000, 300 + i as u64, MIXING_TOL).unwrap();
            let mut violations = scalar.violations.len();
            let tensor = (ctx.n() <= MAX_TENSOR_VERTICES).then(|| {
                let (r, _) = tensor_mixing_check(ctx, 200, 600 + i as u64, MIXING_TOL).unwrap();
                violations += r.violations.len();
                r.max_tensor_ratio
            });
            (name.clone(), scalar.max_scalar_ratio, tensor, violations)
        })
        .collect();
    let violations: usize = results.iter().map(|r| r.3).sum();
    let max_s = results.iter().map(|r| r.1).fold(0.0, f64::max);
    let max_t = results.iter().filter_map(|r| r.2).fold(0.0, f64::max);
    let tensor_graphs = results.iter().filter(|r| r.2.is_some()).count();
    outcome(
        violations == 0,
        format!(
            "scalar on {} graphs (max ratio {max_s:.4}), tensor on {tensor_graphs} graphs with n <= {MAX_TENSOR_VERTICES} (max ratio {max_t:.4}); {violations} violations",
            results.len()
        ),
    )
}

fn count_suite(spec: FieldGraphSpec, seed: u64) -> SuiteReport {
    let mut p = SuiteParams::new(Suite::Counts);
    p.graph = Some(GraphSource::Spec(spec));
    p.sizes = vec![SizeSpec::Fraction(0.5), SizeSpec::Fraction(0.75), SizeSpec::Fraction(1.0)];
    p.trials = Some(10);
    p.k = COUNT_K;
    p.seed = seed;
    run_suite(&p).unwrap()
}

fn criterion_4() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for (spec, seed) in [(FieldGraphSpec::distance(13, 2), 41), (FieldGraphSpec::dot_product(11, 2), 42)] {
        let name = label(&spec);
        let r = count_suite(spec, seed);
        let checked = r.count(Verdict::Pass) + r.count(Verdict::Fail);
        let skipped = r.count(Verdict::Skipped);
        // worst ratio per (metric, |U|) among failing rows
        let mut failing: BTreeMap<(String, usize), f64> = BTreeMap::new();
        for row in r.rows.iter().filter(|r| r.pass == Verdict::Fail) {
            let ratio = row.value.parse::<f64>().unwrap_or(f64::NAN)
                / row.bound.parse::<f64>().unwrap_or(f64::NAN);
            let e = failing.entry((row.metric.clone(), row.u_size)).or_insert(0.0);
            *e = e.max(ratio);
        }
        let failing: Vec<String> = failing
            .into_iter()
            .map(|((m, u), ratio)| format!("{m}@|U|={u} (worst value/bound {ratio:.2})"))
            .collect();
        pass &= r.passed() && skipped == 0;
        parts.push(format!(
            "{name}: {}/{checked} rows pass, {skipped} skipped{}",
            r.count(Verdict::Pass),
            if failing.is_empty() { String::new() } else { format!("; failing {}", failing.join(", ")) }
        ));
    }
    outcome(pass, parts.join(" | "))
}

fn criterion_5() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for q in [3u32, 5] {
        let r = geometry_checks(q, 3, DEFAULT_BUDGET).unwrap();
        pass &= r.passed();
        let cells: Vec<String> = r
            .rows
            .iter()
            .map(|row| format!("{} {} (limit {}) {}", row.metric, row.value, row.bound, row.pass))
            .filter(|c| !c.ends_with("INFO"))
            .collect();
        parts.push(format!("dot({q},3): {}", cells.join(", ")));
        if let Some(row) = r.rows.iter().find(|r| r.metric == "H3minus_nonunit_x_injective") {
            parts.push(format!("injective copies with non-unit x: {}", row.value));
        }
        if let Some(f) = r.failures.iter().find(|f| f.contains("H3minus")) {
            parts.push(f.clone());
        }
    }
    outcome(pass, parts.join(" | "))
}

fn criterion_6() -> Outcome {
    let ex = quadruple_upper_bound_check(3, QuadrupleMode::Exhaustive, 10_000_000, 0).unwrap();
    let rnd =
        quadruple_upper_bound_check(5, QuadrupleMode::Randomized { samples: 100_000 }, 0, 17).unwrap();
    let checked = |r: &SuiteReport| r.rows.iter().find(|r| r.metric == "quadruples_checked").unwrap().value.clone();
    let found = |r: &SuiteReport| r.rows.iter().find(|r| r.metric == "shattered_quadruples").unwrap().value.clone();
    let ok = ex.passed() && rnd.passed() && checked(&ex) == "14950";
    outcome(
        ok,
        format!(
            "q=3 exhaustive: {} checked, {} shattered; q=5 randomized: {} checked, {} shattered",
            checked(&ex),
            found(&ex),
            checked(&rnd),
            found(&rnd)
        ),
    )
}

fn criterion_7(graphs: &[(String, GraphContext)]) -> Outcome {
    let mut bad = Vec::new();
    for q in [5u32, 7] {
        let ctx = graphs.iter().find(|(n, _)| *n == format!("dotproduct({q},3)")).unwrap();
        let u = VertexSet::all(ctx.1.n());
        let w = vc_at_least(&ctx.1.graph, &u, 3, VC_CANDIDATES, 7, SampleMode::Uniform).unwrap();
        match w {
            Some(w) if w.validate(&ctx.1.graph, &u) => {}
            _ => bad.push(format!("k=3 not found on {}", ctx.0)),
        }
    }
    let k2: Vec<String> = graphs
        .par_iter()
        .filter_map(|(name, ctx)| {
            let u = VertexSet::all(ctx.n());
            let w = vc_at_least(&ctx.graph, &u, 2, VC_CANDIDATES, 11, SampleMode::Uniform).unwrap();
            (!w.is_some_and(|w| w.validate(&ctx.graph, &u))).then(|| format!("k=2 not found on {name}"))
        })
        .collect();
    bad.extend(k2);
    outcome(
        bad.is_empty(),
        format!(
            "k=3 on dotproduct(5,3), dotproduct(7,3); k=2 on {} field graphs; {}",
            graphs.len(),
            if bad.is_empty() { "all found".into() } else { bad.join("; ") }
        ),
    )
}

fn criterion_8() -> Outcome {
    let exact = |g: &DenseGraph| {
        vc_dimension_exact(g, &VertexSet::all(g.n()), ExactSearchOptions::default())
            .map(|r| (r.dimension, r.exact))
            .unwrap()
    };
    let edgeless = exact(&build_from_relation(5, |_, _| false).unwrap());
    let k4 = exact(&build_from_relation(4, |i, j| i != j).unwrap());
    let c5 = exact(&build_from_relation(5, |i, j| (i + 1) % 5 == j || (j + 1) % 5 == i).unwrap());
    outcome(
        edgeless == (0, true) && k4 == (1, true) && c5 == (2, true),
        format!("edgeless {}, K4 {}, C5 {}", edgeless.0, k4.0, c5.0),
    )
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let spec = |f: fn(u32, usize) -> FieldGraphSpec, q, t| Some(GraphSource::Spec(f(q, t)));
    let mut runs: Vec<(String, SuiteParams)> = Vec::new();
    let mut add = |suite: Suite, graph, trials: Option<u64>, edit: &dyn Fn(&mut SuiteParams)| {
        let mut p = SuiteParams::new(suite);
        p.graph = graph;
        p.trials = trials;
        p.seed = 2024;
        edit(&mut p);
        runs.push((suite.name().to_string(), p));
    };
    add(Suite::Mixing, spec(FieldGraphSpec::distance, 7, 2), Some(200), &|_| {});
    add(Suite::TensorMixing, spec(FieldGraphSpec::dot_product, 5, 2), Some(40), &|_| {});
    add(Suite::Counts, spec(FieldGraphSpec::distance, 7, 2), Some(3), &|_| {});
    add(Suite::Geometry, None, None, &|p| {
        p.q = Some(3);
        p.t = Some(3);
    });
    add(Suite::Quadruple, None, Some(2000), &|p| {
        p.q = Some(5);
        p.t = Some(3);
        p.exhaustive = false;
    });
    add(Suite::Selector, spec(FieldGraphSpec::dot_product, 5, 3), Some(50), &|_| {});

    let mut differing = Vec::new();
    for (name, p) in &runs {
        let bodies: Vec<String> = (0..2)
            .map(|i| {
                let sub = dir.path().join(format!("{name}-{i}"));
                let (csv, _) = run_suite(p).unwrap().write(&sub, name).unwrap();
                csv_body_of(&std::fs::read_to_string(csv).unwrap()).to_string()
            })
            .collect();
        if bodies[0] != bodies[1] || bodies[0].lines().count() < 2 {
            differing.push(name.clone());
        }
    }
    let ctx = GraphContext::build(&FieldGraphSpec::dot_product(3, 3)).unwrap();
    let opts = SweepOptions {
        sizes: vec![6, 13, 26],
        trials: 3,
        target_k: 3,
        budget: 20_000,
        seed: 2024,
        exact: true,
        threshold_c: 1.0,
        mode: SampleMode::MedianBiased,
    };
    let a = vc_sweep(&ctx, &opts).unwrap().report.csv_body().unwrap();
    let b = vc_sweep(&ctx, &opts).unwrap().report.csv_body().unwrap();
    if a != b {
        differing.push("sweep".into());
    }
    outcome(
        differing.is_empty(),
        format!(
            "{} suites + sweep rerun with identical seeds; differing: {}",
            runs.len(),
            if differing.is_empty() { "none".into() } else { differing.join(", ") }
        ),
    )
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn main() {
    let start = Instant::now();
    let graphs = built_graphs();
    let criteria: Vec<Criterion> = vec![
        ("oracle equivalence", Box::new(criterion_1)),
        ("spectral bound lambda <= 2q^((t-1)/2)", Box::new(|| criterion_2(&graphs))),
        ("mixing inequalities", Box::new(|| criterion_3(&graphs))),
        ("count inequalities, K = 10", Box::new(criterion_4)),
        ("geometry of dot-product graphs", Box::new(criterion_5)),
        ("no shattered quadruple", Box::new(criterion_6)),
        ("VC lower bounds at full size", Box::new(|| criterion_7(&graphs))),
        ("exact VC of small graphs", Box::new(criterion_8)),
        ("reproducible CSV bodies", Box::new(criterion_9)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let o = run();
        failed += !o.pass as usize;
        println!(
            "criterion {} [{}] {name}: {} ({:.1}s)",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            t0.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} of {} criteria pass ({:.1}s)",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
