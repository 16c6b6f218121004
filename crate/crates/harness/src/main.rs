use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use vclab_core::graph::cache::{encode_graph, encode_spectrum, write_graph};
use vclab_core::graph::{spectral_profile, VertexSet};
use vclab_core::homcount::{count_pattern_bruteforce, Config, DEFAULT_BUDGET};
use vclab_core::vcdim::{vc_at_least, vc_dimension_exact, ExactSearchOptions};
use vclab_core::builders::build;

use vclab_harness::config::ConfigFile;
use vclab_harness::context::GraphContext;
use vclab_harness::counts::sample_subset;
use vclab_harness::error::{config_err, Result};
use vclab_harness::inputs::{parse_pattern, parse_subset, read_text};
use vclab_harness::report::{merge_reports, SuiteReport, Verdict};
use vclab_harness::seeds::trial_seed;
use vclab_harness::suites::{
    make_spec, parse_mode, parse_sizes, run_suite, GraphSource, Suite, SuiteParams, SweepConfig,
};

#[derive(Parser)]
#[command(name = "vclab", version, about = "VC-dimension and pseudorandom graph experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a field graph and write it in the graph cache format.
    Build {
        #[arg(long)]
        family: String,
        #[arg(long)]
        q: u32,
        #[arg(long)]
        t: usize,
        /// Adjacency polynomial in x1..xt, y1..yt (polynomial family only).
        #[arg(long)]
        poly: Option<String>,
        #[arg(long)]
        exclude_origin: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute eigenvalues, degree and λ of a cached graph.
    Spectrum {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Homomorphism count of a configuration into G[U].
    #[command(group(ArgGroup::new("subset_src").args(["subset", "subset_size"])))]
    Count {
        #[arg(long)]
        graph: PathBuf,
        /// H1|H2|H3|H3plus|H3minus|H4|Pk:K|Cm:M|pattern:FILE
        #[arg(long)]
        config: String,
        #[arg(long)]
        subset: Option<PathBuf>,
        #[arg(long)]
        subset_size: Option<usize>,
        #[arg(long, default_value_t = 1)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Exact or randomised VC-dimension search on G[U].
    #[command(group(ArgGroup::new("method").args(["exact", "at_least"]).required(true)))]
    #[command(group(ArgGroup::new("subset_src").args(["subset", "subset_size"])))]
    Vc {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        at_least: Option<usize>,
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        subset: Option<PathBuf>,
        #[arg(long)]
        subset_size: Option<usize>,
        /// uniform | median
        #[arg(long, default_value = "uniform")]
        mode: String,
    },
    /// Run a verification suite; exit 1 if any check fails.
    Verify {
        /// mixing|tensor-mixing|counts|geometry|quadruple|selector
        #[arg(long)]
        suite: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, conflicts_with = "family")]
        graph: Option<PathBuf>,
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        q: Option<u32>,
        #[arg(long)]
        t: Option<usize>,
        #[arg(long)]
        poly: Option<String>,
        #[arg(long)]
        exclude_origin: bool,
        /// Trials (mixing, counts), triples (selector) or samples (quadruple).
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        tol: Option<f64>,
        /// Comma-separated subset sizes; `0.5n` means half the vertices.
        #[arg(long)]
        sizes: Option<String>,
        /// Constant multiplying the error terms of the count inequalities.
        #[arg(long = "K")]
        k: Option<f64>,
        #[arg(long)]
        budget: Option<u64>,
        /// exhaustive | randomized (quadruple suite)
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        min_fraction: Option<f64>,
        /// Directory for `<suite>.csv` and `<suite>.json`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a VC sweep described by a config file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Merge the JSON reports in a directory and tally CSV verdicts.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

type Counter = Box<dyn Fn(&VertexSet) -> Result<String>>;

fn choose_subsets(
    ctx: &GraphContext,
    subset: Option<&Path>,
    size: Option<usize>,
    trials: u64,
    seed: u64,
) -> Result<Vec<(u64, Option<u64>, VertexSet)>> {
    let n = ctx.n();
    match (subset, size) {
        (Some(p), _) => Ok(vec![(0, None, parse_subset(&read_text(p)?, n)?)]),
        (None, Some(s)) => {
            if s > n {
                return Err(config_err(format!("subset size {s} exceeds n = {n}")));
            }
            Ok((0..trials)
                .map(|i| {
                    let ts = trial_seed(seed, i);
                    let mut rng = ChaCha8Rng::seed_from_u64(ts);
                    (i, Some(ts), sample_subset(n, s, &mut rng))
                })
                .collect())
        }
        (None, None) => Ok(vec![(0, None, VertexSet::all(n))]),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn summarize(report: &SuiteReport) -> bool {
    println!(
        "{}: {} rows, {} pass, {} fail, {} skipped, {} info",
        report.suite,
        report.rows.len(),
        report.count(Verdict::Pass),
        report.count(Verdict::Fail),
        report.count(Verdict::Skipped),
        report.count(Verdict::Info),
    );
    for f in &report.failures {
        eprintln!("FAIL {f}");
    }
    report.passed()
}

fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::Build { family, q, t, poly, exclude_origin, out } => {
            let spec = make_spec(&family, q, t, poly.as_deref(), exclude_origin)?;
            let g = build(&spec)?;
            match out {
                Some(p) => {
                    write_graph(&p, &g, &spec.meta())?;
                    eprintln!("wrote {} ({} vertices, {} edges)", p.display(), g.n(), g.edge_count());
                }
                None => println!("{}", serde_json::to_string(&encode_graph(&g, &spec.meta()))?),
            }
            Ok(true)
        }
        Cmd::Spectrum { graph, tol, out } => {
            let ctx = GraphContext::load(&graph)?;
            let profile = spectral_profile(&ctx.graph, tol)?;
            let loopless = if ctx.graph.loop_count() > 0 {
                Some(spectral_profile(&ctx.graph.without_loops(), tol)?.lambda)
            } else {
                None
            };
            let doc = encode_spectrum(&ctx.graph, &profile, loopless);
            emit(out.as_deref(), &(serde_json::to_string_pretty(&doc)? + "\n"))?;
            Ok(true)
        }
        Cmd::Count { graph, config, subset, subset_size, trials, seed, budget } => {
            let ctx = GraphContext::load(&graph)?;
            let sets = choose_subsets(&ctx, subset.as_deref(), subset_size, trials, seed)?;
            let (name, counter): (String, Counter) =
                match config.strip_prefix("pattern:") {
                    Some(file) => {
                        let pat = parse_pattern(&read_text(Path::new(file))?)?;
                        let g = ctx.graph.clone();
                        (config.clone(), Box::new(move |u| {
                            Ok(count_pattern_bruteforce(&g, u, &pat, budget)?.to_string())
                        }))
                    }
                    None => {
                        let c = Config::parse(&config)?;
                        let g = ctx.graph.clone();
                        (c.to_string(), Box::new(move |u| Ok(c.count(&g, u, budget)?.to_string())))
                    }
                };
            for (trial, ts, u) in sets {
                let line = serde_json::json!({
                    "config": name,
                    "trial": trial,
                    "seed": ts,
                    "U_size": u.len(),
                    "count": counter(&u)?,
                });
                println!("{line}");
            }
            Ok(true)
        }
        Cmd::Vc { graph, exact, at_least, budget, seed, subset, subset_size, mode } => {
            let ctx = GraphContext::load(&graph)?;
            let mode = parse_mode(&mode)?;
            let (_, _, u) = choose_subsets(&ctx, subset.as_deref(), subset_size, 1, seed)?
                .pop()
                .expect("one subset");
            if exact {
                let opts = ExactSearchOptions { budget, ..Default::default() };
                match vc_dimension_exact(&ctx.graph, &u, opts) {
                    Ok(r) => {
                        let v = serde_json::json!({
                            "U_size": u.len(), "dimension": r.dimension, "exact": r.exact,
                            "witness": r.witness,
                        });
                        println!("{v}");
                        Ok(true)
                    }
                    Err(vclab_core::Error::VcBudgetExceeded { lower_bound, .. }) => {
                        let v = serde_json::json!({
                            "U_size": u.len(), "dimension": lower_bound, "exact": false,
                            "budget_exceeded": true,
                        });
                        println!("{v}");
                        Ok(true)
                    }
                    Err(e) => Err(e.into()),
                }
            } else {
                let k = at_least.expect("clap enforces one method");
                let w = vc_at_least(&ctx.graph, &u, k, budget, seed, mode)?;
                let v = serde_json::json!({
                    "U_size": u.len(), "k": k, "found": w.is_some(), "witness": w,
                });
                println!("{v}");
                Ok(w.is_some())
            }
        }
        Cmd::Verify {
            suite, config, graph, family, q, t, poly, exclude_origin, trials, seed, tol, sizes,
            k, budget, mode, min_fraction, out,
        } => {
            let suite: Suite = suite.parse()?;
            let (mut p, cfg_out) = match &config {
                Some(path) => {
                    let cfg = ConfigFile::load(path)?;
                    let base = path.parent().unwrap_or(Path::new("."));
                    let out = cfg.raw("output", "dir").map(|d| base.join(d));
                    (SuiteParams::from_config(suite, &cfg, base)?, out)
                }
                None => (SuiteParams::new(suite), None),
            };
            if let Some(g) = graph {
                p.graph = Some(GraphSource::File(g));
            }
            if let Some(f) = family {
                let (q, t) = q.zip(t).ok_or_else(|| config_err("--family needs --q and --t"))?;
                p.graph = Some(GraphSource::Spec(make_spec(&f, q, t, poly.as_deref(), exclude_origin)?));
            }
            p.q = q.or(p.q);
            p.t = t.or(p.t);
            p.trials = trials.or(p.trials);
            p.seed = seed.unwrap_or(p.seed);
            p.tol = tol.unwrap_or(p.tol);
            if let Some(s) = sizes {
                p.sizes = parse_sizes(&s)?;
            }
            p.k = k.unwrap_or(p.k);
            p.budget = budget.unwrap_or(p.budget);
            if let Some(m) = mode {
                p.exhaustive = match m.as_str() {
                    "exhaustive" => true,
                    "randomized" => false,
                    other => return Err(config_err(format!("unknown mode {other:?}"))),
                };
            }
            p.min_fraction = min_fraction.unwrap_or(p.min_fraction);
            let report = run_suite(&p)?;
            if let Some(dir) = out.or(cfg_out) {
                let (c, j) = report.write(&dir, suite.name())?;
                eprintln!("wrote {} and {}", c.display(), j.display());
            }
            Ok(summarize(&report))
        }
        Cmd::Sweep { config } => {
            let cfg = ConfigFile::load(&config)?;
            let sc = SweepConfig::from_config(&cfg, config.parent().unwrap_or(Path::new(".")))?;
            let (ctx, out) = sc.run()?;
            for path in sc.write(&ctx, &out)? {
                eprintln!("wrote {}", path.display());
            }
            for (s, m) in &out.medians {
                println!("|U| = {s}: median VC {m}");
            }
            if !out.monotone {
                println!("note: median VC is not monotone in |U| for this sweep");
            }
            Ok(summarize(&out.report))
        }
        Cmd::Report { input, out } => {
            let (doc, rows, fails) = merge_reports(&input)?;
            std::fs::write(&out, serde_json::to_string_pretty(&doc)? + "\n")?;
            let records = doc["records"].as_array().map_or(0, Vec::len);
            println!("{records} records, {rows} csv rows, {fails} failed rows -> {}", out.display());
            Ok(fails == 0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
