use serde::Serialize;

use crate::error::{config_err, Result};

/// Size thresholds above which the VC-dimension is guaranteed to reach
/// `target_vc()`, up to the constant `c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ThresholdKind {
    /// `λ n / d`, VC ≥ 2 on any (n,d,λ)-graph.
    Thm1,
    /// `max{λ^{2/3} (n/d)², λ (n/d)^{13/7}}`, VC ≥ 3 under the selector condition.
    Thm2,
    /// Dot-product graph, `q^{(t+1)/2}`.
    DotVc2,
    /// Dot-product graph, `max{q^{(7t+19)/14}, q^{t-1}}`.
    DotVc3,
    /// Distance graph, `q^{(t+1)/2}`.
    DistVc2,
    /// Distance graph, `max{q^{(7t+19)/14}, q^{t-1}}`.
    DistVc3,
    /// Dot-product graph in dimension 3, `q²`.
    Dot3Vc2,
    /// Dot-product graph in dimension 3, `q^{5/2}`; VC is then exactly 3.
    Dot3Vc3,
}

impl ThresholdKind {
    pub const ALL: [ThresholdKind; 8] = [
        ThresholdKind::Thm1,
        ThresholdKind::Thm2,
        ThresholdKind::DotVc2,
        ThresholdKind::DotVc3,
        ThresholdKind::DistVc2,
        ThresholdKind::DistVc3,
        ThresholdKind::Dot3Vc2,
        ThresholdKind::Dot3Vc3,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ThresholdKind::Thm1 => "spectral_vc2",
            ThresholdKind::Thm2 => "spectral_vc3",
            ThresholdKind::DotVc2 => "dot_vc2",
            ThresholdKind::DotVc3 => "dot_vc3",
            ThresholdKind::DistVc2 => "dist_vc2",
            ThresholdKind::DistVc3 => "dist_vc3",
            ThresholdKind::Dot3Vc2 => "dot3_vc2",
            ThresholdKind::Dot3Vc3 => "dot3_vc3",
        }
    }

    pub fn target_vc(&self) -> usize {
        match self {
            ThresholdKind::Thm1
            | ThresholdKind::DotVc2
            | ThresholdKind::DistVc2
            | ThresholdKind::Dot3Vc2 => 2,
            _ => 3,
        }
    }

    /// Whether the threshold speaks about graphs of this family/dimension.
    pub fn applies_to(&self, family: &str, t: Option<usize>) -> bool {
        match self {
            ThresholdKind::Thm1 | ThresholdKind::Thm2 => true,
            ThresholdKind::DotVc2 | ThresholdKind::DotVc3 => family == "dotproduct",
            ThresholdKind::DistVc2 | ThresholdKind::DistVc3 => family == "distance",
            ThresholdKind::Dot3Vc2 | ThresholdKind::Dot3Vc3 => {
                family == "dotproduct" && t == Some(3)
            }
        }
    }

    fn spectral(&self) -> bool {
        matches!(self, ThresholdKind::Thm1 | ThresholdKind::Thm2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdSpec {
    pub kind: ThresholdKind,
    pub c: f64,
}

impl ThresholdSpec {
    pub fn new(kind: ThresholdKind, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(config_err(format!("threshold constant must be positive, got {c}")));
        }
        Ok(Self { kind, c })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdInputs {
    pub n: f64,
    pub d: f64,
    pub lambda: f64,
    pub q: Option<u32>,
    pub t: Option<usize>,
}

pub fn threshold_eval(ts: &ThresholdSpec, x: &ThresholdInputs) -> Result<f64> {
    let base = if ts.kind.spectral() {
        if !(x.n > 0.0 && x.d > 0.0 && x.lambda > 0.0) {
            return Err(config_err(format!(
                "{} needs positive n, d, lambda",
                ts.kind.name()
            )));
        }
        let r = x.n / x.d;
        match ts.kind {
            ThresholdKind::Thm1 => x.lambda * r,
            _ => (x.lambda.powf(2.0 / 3.0) * r * r).max(x.lambda * r.powf(13.0 / 7.0)),
        }
    } else {
        let (q, t) = match (x.q, x.t) {
            (Some(q), Some(t)) if q > 0 && t > 0 => (q as f64, t as f64),
            _ => {
                return Err(config_err(format!("{} needs q and t", ts.kind.name())));
            }
        };
        match ts.kind {
            ThresholdKind::DotVc2 | ThresholdKind::DistVc2 => q.powf((t + 1.0) / 2.0),
            ThresholdKind::DotVc3 | ThresholdKind::DistVc3 => {
                q.powf((7.0 * t + 19.0) / 14.0).max(q.powf(t - 1.0))
            }
            ThresholdKind::Dot3Vc2 => q * q,
            _ => q.powf(2.5),
        }
    };
    Ok(ts.c * base)
}
