use std::path::{Path, PathBuf};
use std::str::FromStr;

use vclab_core::builders::{Family, FieldGraphSpec};
use vclab_core::builders::Polynomial;
use vclab_core::vcdim::SampleMode;

use crate::config::ConfigFile;
use crate::context::GraphContext;
use crate::counts::{verify_count_theorems, CountOptions, DEFAULT_K};
use crate::error::{config_err, HarnessError, Result};
use crate::geometry::{geometry_checks, quadruple_upper_bound_check, selector_condition_check, QuadrupleMode};
use crate::mixing::{mixing_check, tensor_mixing_check};
use crate::report::SuiteReport;
use crate::vcsweep::{vc_sweep, SweepOptions, SweepOutcome};

pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Mixing,
    TensorMixing,
    Counts,
    Geometry,
    Quadruple,
    Selector,
}

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Suite::Mixing => "mixing",
            Suite::TensorMixing => "tensor-mixing",
            Suite::Counts => "counts",
            Suite::Geometry => "geometry",
            Suite::Quadruple => "quadruple",
            Suite::Selector => "selector",
        }
    }
}

impl FromStr for Suite {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "mixing" => Suite::Mixing,
            "tensor-mixing" => Suite::TensorMixing,
            "counts" => Suite::Counts,
            "geometry" => Suite::Geometry,
            "quadruple" => Suite::Quadruple,
            "selector" => Suite::Selector,
            other => return Err(config_err(format!("unknown suite {other:?}"))),
        })
    }
}

/// Subset size given either absolutely (`80`) or as a fraction of `n` (`0.5n`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SizeSpec {
    Absolute(usize),
    Fraction(f64),
}

impl SizeSpec {
    pub fn resolve(&self, n: usize) -> usize {
        match *self {
            SizeSpec::Absolute(s) => s,
            SizeSpec::Fraction(f) => (f * n as f64).round() as usize,
        }
    }
}

impl FromStr for SizeSpec {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || config_err(format!("bad subset size {s:?}"));
        match s.strip_suffix('n') {
            Some(f) => {
                let f: f64 = f.trim().parse().map_err(|_| bad())?;
                if !(f > 0.0 && f <= 1.0) {
                    return Err(bad());
                }
                Ok(SizeSpec::Fraction(f))
            }
            None => s.parse().map(SizeSpec::Absolute).map_err(|_| bad()),
        }
    }
}

pub fn parse_sizes(s: &str) -> Result<Vec<SizeSpec>> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty()).map(SizeSpec::from_str).collect()
}

pub fn parse_mode(s: &str) -> Result<SampleMode> {
    match s {
        "uniform" => Ok(SampleMode::Uniform),
        "median" | "median-biased" => Ok(SampleMode::MedianBiased),
        other => Err(config_err(format!("unknown sampling mode {other:?}"))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GraphSource {
    Spec(FieldGraphSpec),
    File(PathBuf),
}

impl GraphSource {
    pub fn load(&self) -> Result<GraphContext> {
        match self {
            GraphSource::Spec(s) => GraphContext::build(s),
            GraphSource::File(p) => GraphContext::load(p),
        }
    }
}

/// Field-graph spec from its parts; `poly` is required for the polynomial family.
pub fn make_spec(
    family: &str,
    q: u32,
    t: usize,
    poly: Option<&str>,
    exclude_origin: bool,
) -> Result<FieldGraphSpec> {
    let spec = match Family::parse(family)? {
        Family::Distance => FieldGraphSpec::distance(q, t),
        Family::DotProduct => FieldGraphSpec::dot_product(q, t),
        Family::Polynomial => {
            let src = poly.ok_or_else(|| config_err("polynomial family needs a polynomial"))?;
            FieldGraphSpec::polynomial(q, t, Polynomial::parse(src, t)?, exclude_origin)
        }
    };
    spec.validate()?;
    Ok(spec)
}

/// Reads the `[graph]` section: either `file = PATH` or `family`, `q`, `t`
/// (plus `poly`, `exclude_origin` for the polynomial family).
pub fn graph_from_config(cfg: &ConfigFile, base: &Path) -> Result<Option<GraphSource>> {
    if !cfg.has_section("graph") {
        return Ok(None);
    }
    cfg.check_keys("graph", &["file", "family", "q", "t", "poly", "exclude_origin"])?;
    if let Some(file) = cfg.raw("graph", "file") {
        return Ok(Some(GraphSource::File(base.join(file))));
    }
    let spec = make_spec(
        &cfg.require::<String>("graph", "family")?,
        cfg.require("graph", "q")?,
        cfg.require("graph", "t")?,
        cfg.raw("graph", "poly"),
        cfg.get_or("graph", "exclude_origin", false)?,
    )?;
    Ok(Some(GraphSource::Spec(spec)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteParams {
    pub suite: Suite,
    pub graph: Option<GraphSource>,
    pub trials: Option<u64>,
    pub seed: u64,
    pub tol: f64,
    pub sizes: Vec<SizeSpec>,
    pub k: f64,
    pub budget: u64,
    pub q: Option<u32>,
    pub t: Option<usize>,
    pub exhaustive: bool,
    pub min_fraction: f64,
}

pub const SUITE_KEYS: &[&str] = &[
    "trials", "seed", "tol", "sizes", "K", "budget", "q", "t", "mode", "min_fraction",
];

impl SuiteParams {
    pub fn new(suite: Suite) -> Self {
        Self {
            suite,
            graph: None,
            trials: None,
            seed: 0,
            tol: 1e-9,
            sizes: vec![SizeSpec::Fraction(0.5), SizeSpec::Fraction(0.75), SizeSpec::Fraction(1.0)],
            k: DEFAULT_K,
            budget: DEFAULT_BUDGET,
            q: None,
            t: None,
            exhaustive: true,
            min_fraction: 0.0,
        }
    }

    /// Defaults overridden by the `[graph]` and `[suite]` sections.
    pub fn from_config(suite: Suite, cfg: &ConfigFile, base: &Path) -> Result<Self> {
        cfg.check_sections(&["graph", "suite", "output"])?;
        cfg.check_keys("suite", SUITE_KEYS)?;
        let mut p = Self::new(suite);
        p.graph = graph_from_config(cfg, base)?;
        p.trials = cfg.get("suite", "trials")?;
        p.seed = cfg.get_or("suite", "seed", p.seed)?;
        p.tol = cfg.get_or("suite", "tol", p.tol)?;
        if let Some(s) = cfg.raw("suite", "sizes") {
            p.sizes = parse_sizes(s)?;
        }
        p.k = cfg.get_or("suite", "K", p.k)?;
        p.budget = cfg.get_or("suite", "budget", p.budget)?;
        p.q = cfg.get("suite", "q")?;
        p.t = cfg.get("suite", "t")?;
        if let Some(m) = cfg.raw("suite", "mode") {
            p.exhaustive = match m {
                "exhaustive" => true,
                "randomized" => false,
                other => return Err(config_err(format!("unknown quadruple mode {other:?}"))),
            };
        }
        p.min_fraction = cfg.get_or("suite", "min_fraction", p.min_fraction)?;
        Ok(p)
    }

    fn graph(&self) -> Result<GraphContext> {
        self.graph
            .as_ref()
            .ok_or_else(|| config_err(format!("suite {} needs a graph", self.suite.name())))?
            .load()
    }

    fn field_qt(&self) -> Result<(u32, usize)> {
        if let (Some(q), Some(t)) = (self.q, self.t) {
            return Ok((q, t));
        }
        match &self.graph {
            Some(GraphSource::Spec(s)) => Ok((self.q.unwrap_or(s.q), self.t.unwrap_or(s.t))),
            _ => Err(config_err(format!("suite {} needs q and t", self.suite.name()))),
        }
    }
}

pub fn run_suite(p: &SuiteParams) -> Result<SuiteReport> {
    match p.suite {
        Suite::Mixing => {
            let ctx = p.graph()?;
            Ok(mixing_check(&ctx, p.trials.unwrap_or(1000), p.seed, p.tol)?.1)
        }
        Suite::TensorMixing => {
            let ctx = p.graph()?;
            Ok(tensor_mixing_check(&ctx, p.trials.unwrap_or(200), p.seed, p.tol)?.1)
        }
        Suite::Counts => {
            let ctx = p.graph()?;
            let opts = CountOptions {
                sizes: p.sizes.iter().map(|s| s.resolve(ctx.n())).collect(),
                trials: p.trials.unwrap_or(10),
                k: p.k,
                seed: p.seed,
                budget: p.budget,
            };
            verify_count_theorems(&ctx, &opts)
        }
        Suite::Geometry => {
            let (q, t) = p.field_qt()?;
            geometry_checks(q, t, p.budget)
        }
        Suite::Quadruple => {
            let (q, _) = p.field_qt().or_else(|_| {
                p.q.map(|q| (q, 3)).ok_or_else(|| config_err("quadruple suite needs q"))
            })?;
            let mode = if p.exhaustive {
                QuadrupleMode::Exhaustive
            } else {
                QuadrupleMode::Randomized { samples: p.trials.unwrap_or(100_000) }
            };
            let budget = if p.budget == DEFAULT_BUDGET { 10_000_000 } else { p.budget };
            quadruple_upper_bound_check(q, mode, budget, p.seed)
        }
        Suite::Selector => {
            let ctx = p.graph()?;
            selector_condition_check(&ctx, p.trials.unwrap_or(100), p.seed, p.min_fraction)
        }
    }
}

/// Everything a `sweep --config FILE` run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub graph: GraphSource,
    pub sizes: Vec<SizeSpec>,
    pub options: SweepOptions,
    pub out_dir: PathBuf,
    pub stem: String,
}

impl SweepConfig {
    pub fn from_config(cfg: &ConfigFile, base: &Path) -> Result<Self> {
        cfg.check_sections(&["graph", "sweep", "output"])?;
        cfg.check_keys(
            "sweep",
            &["sizes", "trials", "target_k", "budget", "seed", "exact", "mode", "C"],
        )?;
        cfg.check_keys("output", &["dir", "stem"])?;
        let graph = graph_from_config(cfg, base)?
            .ok_or_else(|| config_err("sweep config needs a [graph] section"))?;
        let sizes = parse_sizes(
            cfg.raw("sweep", "sizes")
                .ok_or_else(|| config_err("[sweep] sizes is required"))?,
        )?;
        let options = SweepOptions {
            sizes: Vec::new(),
            trials: cfg.get_or("sweep", "trials", 5)?,
            target_k: cfg.get_or("sweep", "target_k", 3)?,
            budget: cfg.get_or("sweep", "budget", 1_000_000)?,
            seed: cfg.get_or("sweep", "seed", 0)?,
            exact: cfg.get_or("sweep", "exact", false)?,
            threshold_c: cfg.get_or("sweep", "C", 1.0)?,
            mode: parse_mode(cfg.raw("sweep", "mode").unwrap_or("uniform"))?,
        };
        Ok(Self {
            graph,
            sizes,
            options,
            out_dir: base.join(cfg.raw("output", "dir").unwrap_or("vclab-out")),
            stem: cfg.raw("output", "stem").unwrap_or("sweep").to_string(),
        })
    }

    pub fn run(&self) -> Result<(GraphContext, SweepOutcome)> {
        let ctx = self.graph.load()?;
        let mut opts = self.options.clone();
        opts.sizes = self.sizes.iter().map(|s| s.resolve(ctx.n())).collect();
        let out = vc_sweep(&ctx, &opts)?;
        Ok((ctx, out))
    }

    /// Writes CSV, JSON, plot data and SVG into `out_dir`.
    pub fn write(&self, ctx: &GraphContext, out: &SweepOutcome) -> Result<Vec<PathBuf>> {
        let (csv, json) = out.report.write(&self.out_dir, &self.stem)?;
        let dat = self.out_dir.join(format!("{}.dat", self.stem));
        let svg = self.out_dir.join(format!("{}.svg", self.stem));
        std::fs::write(&dat, out.plot_data())?;
        let title = match (ctx.q, ctx.t) {
            (Some(q), Some(t)) => format!("{} q={q} t={t}", ctx.family),
            _ => ctx.family.clone(),
        };
        std::fs::write(&svg, out.plot_svg(&title))?;
        Ok(vec![csv, json, dat, svg])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_specs() {
        assert_eq!(parse_sizes("80, 0.5n,1n").unwrap(), vec![
            SizeSpec::Absolute(80),
            SizeSpec::Fraction(0.5),
            SizeSpec::Fraction(1.0),
        ]);
        assert_eq!(SizeSpec::Fraction(0.75).resolve(169), 127);
        assert!(parse_sizes("2n").is_err());
        assert!(parse_sizes("abc").is_err());
    }

    #[test]
    fn suite_params_from_config() {
        let cfg = ConfigFile::parse(
            "[graph]\nfamily = distance\nq = 5\nt = 2\n[suite]\ntrials = 3\nseed = 9\nsizes = 0.5n\n",
        )
        .unwrap();
        let p = SuiteParams::from_config(Suite::Counts, &cfg, Path::new(".")).unwrap();
        assert_eq!(p.trials, Some(3));
        assert_eq!(p.seed, 9);
        let r = run_suite(&p).unwrap();
        assert!(r.rows.iter().all(|r| r.u_size == 13));
        let bad = ConfigFile::parse("[suite]\ntrails = 3\n").unwrap();
        assert!(SuiteParams::from_config(Suite::Counts, &bad, Path::new(".")).is_err());
    }

    #[test]
    fn sweep_config_requires_graph_and_sizes() {
        let cfg = ConfigFile::parse("[sweep]\nsizes = 5\n").unwrap();
        assert!(SweepConfig::from_config(&cfg, Path::new(".")).is_err());
        let cfg = ConfigFile::parse("[graph]\nfamily = dotproduct\nq = 3\nt = 2\n[sweep]\n").unwrap();
        assert!(SweepConfig::from_config(&cfg, Path::new(".")).is_err());
        let cfg = ConfigFile::parse(
            "[graph]\nfamily = polynomial\nq = 5\nt = 2\npoly = x1*y1 + x2*y2 - 1\n[sweep]\nsizes = 10\n",
        )
        .unwrap();
        let sc = SweepConfig::from_config(&cfg, Path::new("/tmp")).unwrap();
        assert_eq!(sc.out_dir, Path::new("/tmp/vclab-out"));
    }

    #[test]
    fn suite_names_round_trip() {
        for s in ["mixing", "tensor-mixing", "counts", "geometry", "quadruple", "selector"] {
            assert_eq!(s.parse::<Suite>().unwrap().name(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }
}
