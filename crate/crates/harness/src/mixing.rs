use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::context::GraphContext;
use crate::error::{config_err, Result};
use crate::report::{fmt_f64, RowContext, SuiteReport, Verdict};
use crate::seeds::{trial_rng, trial_seed};

pub const MAX_TENSOR_VERTICES: usize = 200;

#[derive(Debug, Clone, Serialize)]
pub struct MixingViolation {
    pub trial: u64,
    pub seed: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct MixingReport {
    pub trials: u64,
    pub max_scalar_ratio: f64,
    pub max_tensor_ratio: f64,
    pub tol: f64,
    pub violations: Vec<MixingViolation>,
}

#[derive(Debug, Clone, Copy)]
struct TrialOutcome {
    lhs: f64,
    rhs: f64,
    slack: f64,
    kind: &'static str,
}

impl TrialOutcome {
    fn ratio(&self) -> f64 {
        if self.rhs > 0.0 {
            self.lhs / self.rhs
        } else if self.lhs <= self.slack {
            0.0
        } else {
            f64::INFINITY
        }
    }

    fn ok(&self) -> bool {
        self.lhs <= self.rhs + self.slack
    }
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> (Vec<f64>, &'static str) {
    if rng.gen_bool(0.5) {
        let v = (0..n).map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 }).collect();
        (v, "sign")
    } else {
        let density: f64 = rng.gen_range(0.05..0.95);
        let v = (0..n).map(|_| if rng.gen_bool(density) { 1.0 } else { 0.0 }).collect();
        (v, "indicator")
    }
}

/// `(A g)(x) = Σ_{y ~ x} g(y)`; loops contribute `g(x)`.
fn apply(ctx: &GraphContext, g: &[f64]) -> Vec<f64> {
    (0..ctx.n())
        .map(|x| ctx.graph.neighbors(x).map(|y| g[y]).sum())
        .collect()
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn scalar_trial(ctx: &GraphContext, d: f64, f: &[f64], g: &[f64], tol: f64) -> (f64, f64, f64) {
    let n = ctx.n() as f64;
    let ag = apply(ctx, g);
    let inner: f64 = f.iter().zip(&ag).map(|(a, b)| a * b).sum();
    let main = d / n * f.iter().sum::<f64>() * g.iter().sum::<f64>();
    let lhs = (inner - main).abs();
    let rhs = ctx.profile.lambda * norm2(f) * norm2(g);
    let slack = tol * n * max_abs(f) * max_abs(g);
    (lhs, rhs, slack)
}

fn run_trials<F>(trials: u64, seed: u64, f: F) -> Vec<(u64, u64, TrialOutcome)>
where
    F: Fn(&mut ChaCha8Rng) -> TrialOutcome + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            (i, trial_seed(seed, i), f(&mut rng))
        })
        .collect()
}

fn summarize(
    ctx: &GraphContext,
    suite: &str,
    tol: f64,
    outcomes: Vec<(u64, u64, TrialOutcome)>,
    tensor: bool,
) -> (MixingReport, SuiteReport) {
    let rc = RowContext { suite, ctx };
    let mut report = MixingReport {
        trials: outcomes.len() as u64,
        tol,
        ..Default::default()
    };
    let mut suite_report = SuiteReport::new(suite);
    let n = ctx.n();
    for (trial, seed, o) in outcomes {
        let ratio = o.ratio();
        if tensor {
            report.max_tensor_ratio = report.max_tensor_ratio.max(ratio);
        } else {
            report.max_scalar_ratio = report.max_scalar_ratio.max(ratio);
        }
        let verdict = Verdict::from_bool(o.ok());
        if !o.ok() {
            report.violations.push(MixingViolation {
                trial,
                seed,
                lhs: o.lhs,
                rhs: o.rhs,
                slack: o.slack,
            });
            suite_report.failures.push(format!(
                "{suite}: graph {} trial {trial} (seed {seed}, {}): lhs {} > rhs {} + slack {}",
                ctx.hash, o.kind, o.lhs, o.rhs, o.slack
            ));
        }
        suite_report.rows.push(rc.row(
            n,
            None,
            trial,
            seed,
            &format!("{}_deviation", o.kind),
            fmt_f64(o.lhs),
            fmt_f64(o.rhs + o.slack),
            verdict,
        ));
    }
    let max = if tensor { report.max_tensor_ratio } else { report.max_scalar_ratio };
    suite_report.rows.push(rc.row(
        n,
        None,
        report.trials,
        0,
        "max_ratio",
        fmt_f64(max),
        fmt_f64(1.0 + tol),
        Verdict::Info,
    ));
    (report, suite_report)
}

/// Checks `|<f, A g> - (d/n) Σf Σg| ≤ λ ‖f‖₂ ‖g‖₂` on random sign and
/// indicator vectors, with additive slack `tol · n · max|f| · max|g|`.
pub fn mixing_check(
    ctx: &GraphContext,
    trials: u64,
    seed: u64,
    tol: f64,
) -> Result<(MixingReport, SuiteReport)> {
    let d = ctx.regular_degree()? as f64;
    let n = ctx.n();
    let outcomes = run_trials(trials, seed, |rng| {
        let (f, kf) = random_vector(rng, n);
        let (g, kg) = random_vector(rng, n);
        let (lhs, rhs, slack) = scalar_trial(ctx, d, &f, &g, tol);
        let kind = match (kf, kg) {
            ("sign", "sign") => "sign_sign",
            ("sign", _) => "sign_indicator",
            (_, "sign") => "indicator_sign",
            _ => "indicator_indicator",
        };
        TrialOutcome { lhs, rhs, slack, kind }
    });
    Ok(summarize(ctx, "mixing", tol, outcomes, false))
}

/// Dense `n × n` matrix in row-major order.
type Mat = Vec<f64>;

fn random_factor(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    if rng.gen_bool(0.5) {
        (0..n).map(|_| rng.gen::<f64>()).collect()
    } else {
        let density: f64 = rng.gen_range(0.05..0.95);
        (0..n).map(|_| if rng.gen_bool(density) { 1.0 } else { 0.0 }).collect()
    }
}

/// Non-negative `Σ_{r<R} a_r b_rᵀ` with `R ∈ {1, 2, 3}`.
fn random_low_rank(rng: &mut ChaCha8Rng, n: usize) -> Mat {
    let rank = rng.gen_range(1..=3);
    let mut m = vec![0.0; n * n];
    for _ in 0..rank {
        let a = random_factor(rng, n);
        let b = random_factor(rng, n);
        for x in 0..n {
            for y in 0..n {
                m[x * n + y] += a[x] * b[y];
            }
        }
    }
    m
}

/// `A M A` via neighbour sums.
fn sandwich(ctx: &GraphContext, m: &Mat) -> Mat {
    let n = ctx.n();
    let mut left = vec![0.0; n * n];
    for x in 0..n {
        for z in ctx.graph.neighbors(x) {
            for w in 0..n {
                left[x * n + w] += m[z * n + w];
            }
        }
    }
    let mut out = vec![0.0; n * n];
    for x in 0..n {
        for y in 0..n {
            out[x * n + y] = ctx.graph.neighbors(y).map(|w| left[x * n + w]).sum();
        }
    }
    out
}

fn row_sums(m: &Mat, n: usize) -> Vec<f64> {
    (0..n).map(|x| m[x * n..(x + 1) * n].iter().sum()).collect()
}

fn col_sums(m: &Mat, n: usize) -> Vec<f64> {
    (0..n).map(|y| (0..n).map(|x| m[x * n + y]).sum()).collect()
}

/// Checks, for non-negative `f, g` on `V × V`,
/// `|Σ_{x~z, y~w} f(x,y) g(z,w) − (d²/n²) ‖f‖₁ ‖g‖₁|
///   ≤ λ² ‖f‖₂ ‖g‖₂ + (dλ/n)(‖F‖₂ ‖G‖₂ + ‖F′‖₂ ‖G′‖₂)`
/// where `F, G` are row sums and `F′, G′` column sums. Slack is
/// `tol · n² · max f · max g`.
pub fn tensor_mixing_check(
    ctx: &GraphContext,
    trials: u64,
    seed: u64,
    tol: f64,
) -> Result<(MixingReport, SuiteReport)> {
    let n = ctx.n();
    if n > MAX_TENSOR_VERTICES {
        return Err(config_err(format!(
            "tensor mixing needs n <= {MAX_TENSOR_VERTICES}, graph has {n}"
        )));
    }
    let d = ctx.regular_degree()? as f64;
    let lambda = ctx.profile.lambda;
    let nf = n as f64;
    let outcomes = run_trials(trials, seed, |rng| {
        let f = random_low_rank(rng, n);
        let g = random_low_rank(rng, n);
        let aga = sandwich(ctx, &g);
        let total: f64 = f.iter().zip(&aga).map(|(a, b)| a * b).sum();
        let l1f: f64 = f.iter().sum();
        let l1g: f64 = g.iter().sum();
        let lhs = (total - d * d / (nf * nf) * l1f * l1g).abs();
        let rhs = lambda * lambda * norm2(&f) * norm2(&g)
            + d * lambda / nf
                * (norm2(&row_sums(&f, n)) * norm2(&row_sums(&g, n))
                    + norm2(&col_sums(&f, n)) * norm2(&col_sums(&g, n)));
        let slack = tol * nf * nf * max_abs(&f) * max_abs(&g);
        TrialOutcome { lhs, rhs, slack, kind: "tensor" }
    });
    Ok(summarize(ctx, "tensor-mixing", tol, outcomes, true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use vclab_core::builders::FieldGraphSpec;
    use vclab_core::graph::build_from_relation;
    use vclab_core::graph::cache::GraphMeta;

    fn ctx(spec: FieldGraphSpec) -> GraphContext {
        GraphContext::build(&spec).unwrap()
    }

    #[test]
    fn all_ones_has_zero_deviation() {
        let c = ctx(FieldGraphSpec::distance(5, 2));
        let ones = vec![1.0; c.n()];
        let (lhs, _, _) = scalar_trial(&c, 4.0, &ones, &ones, 1e-9);
        assert!(lhs.abs() < 1e-9);
    }

    #[test]
    fn indicators_give_edge_count_deviation() {
        let c = ctx(FieldGraphSpec::distance(5, 2));
        let n = c.n();
        let s: Vec<f64> = (0..n).map(|i| (i < 7) as u8 as f64).collect();
        let t: Vec<f64> = (0..n).map(|i| (i % 3 == 0) as u8 as f64).collect();
        let edges = (0..7)
            .flat_map(|x| c.graph.neighbors(x).filter(|y| y % 3 == 0).collect::<Vec<_>>())
            .count() as f64;
        let tsize = t.iter().sum::<f64>();
        let (lhs, _, _) = scalar_trial(&c, 4.0, &s, &t, 0.0);
        assert!((lhs - (edges - 4.0 * 7.0 * tsize / n as f64).abs()).abs() < 1e-9);
    }

    #[test]
    fn scalar_mixing_holds_on_distance_graph() {
        let c = ctx(FieldGraphSpec::distance(5, 2));
        let (r, s) = mixing_check(&c, 1000, 1, 1e-9).unwrap();
        assert!(r.violations.is_empty());
        assert!(r.max_scalar_ratio <= 1.0 + 1e-9);
        assert!(s.passed());
    }

    #[test]
    fn tensor_mixing_holds_on_dot_graph() {
        let c = ctx(FieldGraphSpec::dot_product(3, 2));
        let (r, s) = tensor_mixing_check(&c, 200, 2, 1e-9).unwrap();
        assert!(r.violations.is_empty(), "{:?}", r.violations.first());
        assert!(s.passed());
    }

    #[test]
    fn tensor_all_ones_cancels() {
        let c = ctx(FieldGraphSpec::dot_product(5, 2));
        let n = c.n();
        let ones = vec![1.0; n * n];
        let aga = sandwich(&c, &ones);
        let total: f64 = aga.iter().sum();
        let d = 5.0;
        assert!((total - d * d * (n * n) as f64).abs() < 1e-6);
    }

    #[test]
    fn irregular_and_oversized_graphs_are_refused() {
        let g = build_from_relation(5, |i, j| i != j && (i == 0 || j == 0)).unwrap();
        let meta = GraphMeta { family: "star".into(), q: None, t: None, polynomial: None, exclude_origin: None };
        let c = GraphContext::from_graph(g, &meta).unwrap();
        assert!(mixing_check(&c, 10, 0, 1e-9).is_err());
        let big = ctx(FieldGraphSpec::distance(17, 2));
        assert!(tensor_mixing_check(&big, 1, 0, 1e-9).is_err());
    }

    #[test]
    fn same_seed_same_rows() {
        let c = ctx(FieldGraphSpec::distance(7, 2));
        let (_, a) = mixing_check(&c, 50, 9, 1e-9).unwrap();
        let (_, b) = mixing_check(&c, 50, 9, 1e-9).unwrap();
        assert_eq!(a.csv_body().unwrap(), b.csv_body().unwrap());
    }
}
