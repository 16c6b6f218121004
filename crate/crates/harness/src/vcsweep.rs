use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use vclab_core::vcdim::{vc_at_least, vc_dimension_exact, ExactSearchOptions, SampleMode};
use vclab_core::Error as CoreError;

use crate::context::GraphContext;
use crate::counts::sample_subset;
use crate::error::{config_err, Result};
use crate::plot::{data_file, line_chart_svg};
use crate::report::{
    fmt_f64, CheckRecord, ExperimentRecord, RowContext, SuiteReport, ThresholdComparison,
    VcRecord, Verdict,
};
use crate::seeds::trial_seed;
use crate::threshold::{threshold_eval, ThresholdInputs, ThresholdKind, ThresholdSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOptions {
    pub sizes: Vec<usize>,
    pub trials: u64,
    pub target_k: usize,
    /// Candidate sets per `vc_at_least` call, and the exact-search work cap.
    pub budget: u64,
    pub seed: u64,
    pub exact: bool,
    pub threshold_c: f64,
    pub mode: SampleMode,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub report: SuiteReport,
    /// `(|U|, median empirical VC)` in size order.
    pub medians: Vec<(f64, f64)>,
    /// Whether the medians never decrease; observed, not asserted.
    pub monotone: bool,
}

impl SweepOutcome {
    pub fn plot_data(&self) -> String {
        data_file("U_size median_vc", &self.medians)
    }

    pub fn plot_svg(&self, title: &str) -> String {
        line_chart_svg(title, "|U|", "median VC", &self.medians)
    }
}

fn median(mut xs: Vec<usize>) -> f64 {
    xs.sort_unstable();
    let m = xs.len();
    if m == 0 {
        0.0
    } else if m % 2 == 1 {
        xs[m / 2] as f64
    } else {
        (xs[m / 2 - 1] + xs[m / 2]) as f64 / 2.0
    }
}

pub fn applicable_thresholds(ctx: &GraphContext, c: f64) -> Result<Vec<(ThresholdSpec, f64)>> {
    let inputs = ThresholdInputs {
        n: ctx.n() as f64,
        d: ctx.profile.d.unwrap_or(0) as f64,
        lambda: ctx.profile.lambda,
        q: ctx.q,
        t: ctx.t,
    };
    let mut out = Vec::new();
    for kind in ThresholdKind::ALL {
        if !kind.applies_to(&ctx.family, ctx.t) {
            continue;
        }
        let spec = ThresholdSpec::new(kind, c)?;
        // spectral formulas are undefined for λ = 0 or irregular graphs
        if let Ok(v) = threshold_eval(&spec, &inputs) {
            out.push((spec, v));
        }
    }
    Ok(out)
}

/// Runs `vc_at_least` for `k = 2..=target_k` (and optionally the exact
/// search) on random subsets of each size, tabulating the empirical VC
/// against every applicable threshold.
pub fn vc_sweep(ctx: &GraphContext, opts: &SweepOptions) -> Result<SweepOutcome> {
    let n = ctx.n();
    if let Some(&bad) = opts.sizes.iter().find(|&&s| s > n || s == 0) {
        return Err(config_err(format!("subset size {bad} not in 1..={n}")));
    }
    if opts.target_k < 2 {
        return Err(config_err("target_k must be at least 2"));
    }
    let thresholds = applicable_thresholds(ctx, opts.threshold_c)?;
    let jobs: Vec<(usize, usize, u64, u64)> = opts
        .sizes
        .iter()
        .enumerate()
        .flat_map(|(si, &s)| {
            (0..opts.trials).map(move |t| (si, s, t, trial_seed(opts.seed, si as u64 * opts.trials + t)))
        })
        .collect();

    let records: Vec<Result<(usize, ExperimentRecord, usize)>> = jobs
        .par_iter()
        .map(|&(si, size, trial, seed)| {
            let start = Instant::now();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = sample_subset(n, size, &mut rng);
            let mut at_least = Vec::new();
            let mut best = 0usize;
            let mut witness = None;
            for k in 2..=opts.target_k {
                let w = vc_at_least(&ctx.graph, &u, k, opts.budget, seed ^ k as u64, opts.mode)?;
                at_least.push((k, w.is_some()));
                match w {
                    Some(w) => {
                        best = k;
                        witness = Some(w);
                    }
                    None => break,
                }
            }
            let (mut dimension, mut exact) = (None, false);
            if opts.exact {
                let eo = ExactSearchOptions { budget: opts.budget, ..Default::default() };
                match vc_dimension_exact(&ctx.graph, &u, eo) {
                    Ok(r) => {
                        dimension = Some(r.dimension);
                        exact = r.exact;
                        if r.dimension >= best {
                            best = r.dimension;
                            witness = Some(r.witness);
                        }
                    }
                    Err(CoreError::VcBudgetExceeded { lower_bound, .. }) => {
                        dimension = Some(lower_bound);
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            let observed = best.max(dimension.unwrap_or(0));
            let cmp = thresholds
                .iter()
                .map(|(spec, v)| ThresholdComparison {
                    name: spec.kind.name().to_string(),
                    threshold: *v,
                    target_vc: spec.kind.target_vc(),
                    size_meets_threshold: size as f64 >= *v,
                    observed_vc: observed,
                })
                .collect();
            let rec = ExperimentRecord {
                suite: "sweep".into(),
                graph_hash: ctx.hash.clone(),
                u_size: size,
                uprime_size: None,
                trial,
                seed,
                census: Default::default(),
                vc: Some(VcRecord { at_least, dimension, exact, witness }),
                thresholds: cmp,
                checks: vec![CheckRecord {
                    metric: "empirical_vc".into(),
                    value: observed.to_string(),
                    bound: String::new(),
                    pass: Verdict::Info,
                }],
                wall_time_ms: start.elapsed().as_millis() as u64,
            };
            Ok((si, rec, observed))
        })
        .collect();

    let rc = RowContext { suite: "sweep", ctx };
    let mut report = SuiteReport::new("sweep");
    let mut per_size: Vec<Vec<usize>> = vec![Vec::new(); opts.sizes.len()];
    for r in records {
        let (si, rec, observed) = r?;
        per_size[si].push(observed);
        let vc = rec.vc.as_ref().expect("sweep records carry vc results");
        for &(k, found) in &vc.at_least {
            report.rows.push(rc.row(
                rec.u_size,
                None,
                rec.trial,
                rec.seed,
                &format!("vc_at_least_{k}"),
                (found as u8).to_string(),
                opts.budget.to_string(),
                Verdict::Info,
            ));
        }
        if let Some(dim) = vc.dimension {
            let metric = if vc.exact { "vc_exact" } else { "vc_lower_bound" };
            report.rows.push(rc.row(
                rec.u_size, None, rec.trial, rec.seed, metric, dim.to_string(), String::new(),
                Verdict::Info,
            ));
        }
        for t in &rec.thresholds {
            report.rows.push(rc.row(
                rec.u_size,
                None,
                rec.trial,
                rec.seed,
                &format!("threshold_{}", t.name),
                observed.to_string(),
                fmt_f64(t.threshold),
                Verdict::Info,
            ));
        }
        report.records.push(rec);
    }
    let medians: Vec<(f64, f64)> = opts
        .sizes
        .iter()
        .zip(per_size)
        .map(|(&s, v)| (s as f64, median(v)))
        .collect();
    let mut sorted = medians.clone();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let monotone = sorted.windows(2).all(|w| w[0].1 <= w[1].1);
    for &(s, m) in &medians {
        report.rows.push(rc.row(
            s as usize, None, opts.trials, opts.seed, "median_vc", fmt_f64(m), String::new(),
            Verdict::Info,
        ));
    }
    report.rows.push(rc.row(
        n, None, opts.trials, opts.seed, "median_vc_monotone", (monotone as u8).to_string(),
        String::new(), Verdict::Info,
    ));
    Ok(SweepOutcome { report, medians, monotone })
}

#[cfg(test)]
mod tests {
    use super::*;
    use vclab_core::builders::FieldGraphSpec;

    fn opts(sizes: Vec<usize>) -> SweepOptions {
        SweepOptions {
            sizes,
            trials: 2,
            target_k: 3,
            budget: 100_000,
            seed: 5,
            exact: true,
            threshold_c: 1.0,
            mode: SampleMode::Uniform,
        }
    }

    #[test]
    fn single_vertex_has_vc_zero_without_loops() {
        let ctx = GraphContext::build(&FieldGraphSpec::distance(5, 2)).unwrap();
        let out = vc_sweep(&ctx, &opts(vec![1])).unwrap();
        assert_eq!(out.medians, vec![(1.0, 0.0)]);
    }

    #[test]
    fn sweep_is_reproducible_and_plots() {
        let ctx = GraphContext::build(&FieldGraphSpec::dot_product(3, 3)).unwrap();
        let a = vc_sweep(&ctx, &opts(vec![5, 12, 26])).unwrap();
        let b = vc_sweep(&ctx, &opts(vec![5, 12, 26])).unwrap();
        assert_eq!(a.report.csv_body().unwrap(), b.report.csv_body().unwrap());
        assert_eq!(a.medians.len(), 3);
        assert!(a.plot_svg("dot(3,3)").contains("<path"));
        assert_eq!(a.plot_data().lines().count(), 4);
        let names: Vec<&str> = a.report.records[0].thresholds.iter().map(|t| t.name.as_str()).collect();
        assert!(names.contains(&"dot3_vc3"));
        assert!(!names.contains(&"dist_vc2"));
    }

    #[test]
    fn bad_options_are_rejected() {
        let ctx = GraphContext::build(&FieldGraphSpec::distance(5, 2)).unwrap();
        assert!(vc_sweep(&ctx, &opts(vec![26])).is_err());
        let mut o = opts(vec![5]);
        o.target_k = 1;
        assert!(vc_sweep(&ctx, &o).is_err());
    }

    #[test]
    fn median_of_even_count() {
        assert_eq!(median(vec![3, 1, 2, 2]), 2.0);
        assert_eq!(median(vec![1, 2]), 1.5);
    }
}
