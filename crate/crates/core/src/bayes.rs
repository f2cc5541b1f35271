//! Lower credibility bounds of Loevinger indices under a Dirichlet posterior,
//! and the filtering of a descriptive graph into an inductive one.
//!
//! The cell probabilities `(π11, π10, π01, π00)` of a pair get a
//! Dirichlet(counts + prior) posterior. The bound of an index at guarantee δ
//! is the value `b` with `P(H(π) ≥ b) = δ`, estimated from Monte Carlo draws.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeKind, ImplicativeGraph, Stage};
use crate::stats::{
    ClassificationThresholds, ContingencyTable, ImplicationClass, PairTables, Quadrant,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BayesConfig {
    /// Guarantee level δ.
    pub delta: f64,
    /// Dirichlet prior weight per cell, in `[n11, n10, n01, n00]` order.
    pub prior_weights: [f64; 4],
    pub samples: usize,
    pub seed: u64,
    /// Admission threshold for Bayesian evaluation, and retention threshold after it.
    pub h_floor: f64,
}

impl Default for BayesConfig {
    fn default() -> Self {
        BayesConfig {
            delta: 0.90,
            prior_weights: [0.5; 4],
            samples: 100_000,
            seed: 0,
            h_floor: 0.20,
        }
    }
}

impl BayesConfig {
    pub const MIN_SAMPLES: usize = 1000;

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::invalid(format!(
                "delta must lie in (0, 1), got {}",
                self.delta
            )));
        }
        if self.samples < Self::MIN_SAMPLES {
            return Err(Error::invalid(format!(
                "samples must be at least {}, got {}",
                Self::MIN_SAMPLES,
                self.samples
            )));
        }
        if self
            .prior_weights
            .iter()
            .any(|w| !(w.is_finite() && *w > 0.0))
        {
            return Err(Error::invalid(format!(
                "prior weights must be positive, got {:?}",
                self.prior_weights
            )));
        }
        if !self.h_floor.is_finite() {
            return Err(Error::invalid("h_floor must be finite"));
        }
        Ok(())
    }

    /// 1-based rank of the order statistic used as the bound: ⌈(1−δ)·samples⌉.
    pub fn quantile_rank(&self) -> usize {
        let raw = (1.0 - self.delta) * self.samples as f64;
        // absorb representation error such as 0.1 * 100000 = 10000.000000000002
        let rank = (raw - 1e-9 * raw.max(1.0)).ceil() as usize;
        rank.clamp(1, self.samples)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CredibilityBound {
    pub eta_low: f64,
    pub point_h: f64,
    pub quadrant: Quadrant,
    /// Standard error of `eta_low` from the spread of neighbouring order statistics.
    pub mc_stderr: f64,
}

/// Index of quadrant `q` evaluated on cell probabilities, `None` if a margin vanishes.
pub fn h_of_probabilities(p: &[f64; 4], q: Quadrant) -> Option<f64> {
    let pa = p[0] + p[1];
    let pb = p[0] + p[2];
    let (row, col) = match q {
        Quadrant::Exclusion => (pa, pb),
        Quadrant::Forward => (pa, 1.0 - pb),
        Quadrant::Backward => (1.0 - pa, pb),
        Quadrant::Complement => (1.0 - pa, 1.0 - pb),
    };
    let denom = row * col;
    if denom > 0.0 && denom.is_finite() {
        Some(1.0 - p[q.cell_index()] / denom)
    } else {
        None
    }
}

/// Lower δ-credibility bound of one index, drawn from RNG stream
/// `q.cell_index()` of `cfg.seed`.
pub fn posterior_lower_bound(
    t: &ContingencyTable,
    quadrant: Quadrant,
    cfg: &BayesConfig,
) -> Result<CredibilityBound> {
    posterior_lower_bound_on_stream(t, quadrant, cfg, quadrant.cell_index() as u64)
}

/// As [`posterior_lower_bound`], on an explicit RNG stream. Distinct streams
/// of the same seed are independent.
pub fn posterior_lower_bound_on_stream(
    t: &ContingencyTable,
    quadrant: Quadrant,
    cfg: &BayesConfig,
    stream: u64,
) -> Result<CredibilityBound> {
    cfg.validate()?;
    let point_h = t.h(quadrant).ok_or_else(|| {
        Error::Precondition(format!(
            "the {} index of {:?} is undefined",
            quadrant.name(),
            t.cells()
        ))
    })?;

    let alpha = [0, 1, 2, 3].map(|i| t.cells()[i] as f64 + cfg.prior_weights[i]);
    let gammas = alpha.map(|a| Gamma::new(a, 1.0).expect("positive shape"));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);

    let max_attempts = cfg.samples.saturating_mul(100);
    let mut attempts = 0usize;
    let mut values = Vec::with_capacity(cfg.samples);
    while values.len() < cfg.samples {
        attempts += 1;
        if attempts > max_attempts {
            return Err(Error::invalid(
                "posterior draws keep hitting zero margins; check the prior weights",
            ));
        }
        let g = [0, 1, 2, 3].map(|i| gammas[i].sample(&mut rng));
        let total: f64 = g.iter().sum();
        if total.is_nan() || total <= 0.0 {
            continue;
        }
        let p = g.map(|x| x / total);
        if let Some(h) = h_of_probabilities(&p, quadrant) {
            values.push(h);
        }
    }
    values.sort_unstable_by(f64::total_cmp);

    let rank = cfg.quantile_rank();
    let eta_low = values[rank - 1];
    let level = 1.0 - cfg.delta;
    let spread = ((cfg.samples as f64) * level * (1.0 - level)).sqrt().ceil() as usize;
    let lo = (rank - 1).saturating_sub(spread);
    let hi = (rank - 1 + spread).min(values.len() - 1);
    let mc_stderr = (values[hi] - values[lo]) / 2.0;

    Ok(CredibilityBound {
        eta_low,
        point_h,
        quadrant,
        mc_stderr,
    })
}

/// One Bayesian evaluation made while filtering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeEvaluation {
    pub source: String,
    pub target: String,
    pub kind: EdgeKind,
    /// Storage index of the pair in the [`PairTables`].
    pub pair: usize,
    pub bound: CredibilityBound,
    pub retained: bool,
    pub class: ImplicationClass,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Induction {
    pub graph: ImplicativeGraph,
    pub evaluations: Vec<EdgeEvaluation>,
}

/// Filters a descriptive graph and keeps the record of every evaluation.
///
/// Edges whose point index is below `cfg.h_floor` are dropped unevaluated.
/// The others are kept when their bound reaches `cfg.h_floor`, and are then
/// reclassified on the bound. Each edge draws from the stream
/// `4·pair + quadrant`, so results do not depend on evaluation order.
pub fn induce(
    descriptive: &ImplicativeGraph,
    tables: &PairTables,
    cfg: &BayesConfig,
    th: &ClassificationThresholds,
) -> Result<Induction> {
    cfg.validate()?;
    th.validate()?;
    let mut edges = Vec::new();
    let mut evaluations = Vec::new();
    for edge in &descriptive.edges {
        if edge.point_h < cfg.h_floor {
            continue;
        }
        let (pair, swapped) = tables.locate(&edge.source, &edge.target).ok_or_else(|| {
            Error::invalid(format!(
                "no contingency table for `{}`/`{}`",
                edge.source, edge.target
            ))
        })?;
        let quadrant = match (edge.kind, swapped) {
            (EdgeKind::Exclusion, _) => Quadrant::Exclusion,
            (EdgeKind::Implication, false) => Quadrant::Forward,
            (EdgeKind::Implication, true) => Quadrant::Backward,
        };
        let (_, _, table) = tables.iter().nth(pair).expect("located pair exists");
        let stream = 4 * pair as u64 + quadrant.cell_index() as u64;
        let bound = posterior_lower_bound_on_stream(table, quadrant, cfg, stream)?;
        let retained = bound.eta_low >= cfg.h_floor;
        let class = ImplicationClass::of(quadrant, Some(bound.eta_low), th);
        if retained {
            edges.push(Edge {
                eta_low: Some(bound.eta_low),
                class,
                stage: Stage::Inductive,
                ..edge.clone()
            });
        }
        evaluations.push(EdgeEvaluation {
            source: edge.source.clone(),
            target: edge.target.clone(),
            kind: edge.kind,
            pair,
            bound,
            retained,
            class,
        });
    }
    Ok(Induction {
        graph: ImplicativeGraph {
            nodes: descriptive.nodes.clone(),
            edges,
        },
        evaluations,
    })
}

/// The inductive graph alone.
pub fn filter_graph(
    descriptive: &ImplicativeGraph,
    tables: &PairTables,
    cfg: &BayesConfig,
    th: &ClassificationThresholds,
) -> Result<ImplicativeGraph> {
    induce(descriptive, tables, cfg, th).map(|i| i.graph)
}

/// Bound report: for each pair, the evaluated quadrants (stored orientation).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub delta: f64,
    pub pairs: Vec<PairBounds>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairBounds {
    pub a: String,
    pub b: String,
    pub quadrants: BTreeMap<Quadrant, BoundCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCell {
    pub point_h: f64,
    pub eta_low: f64,
    pub mc_stderr: f64,
    pub retained: bool,
    pub class: ImplicationClass,
}

impl Induction {
    pub fn report(&self, tables: &PairTables, cfg: &BayesConfig) -> BoundReport {
        let mut pairs: Vec<PairBounds> = tables
            .iter()
            .map(|(a, b, _)| PairBounds {
                a: a.to_string(),
                b: b.to_string(),
                quadrants: BTreeMap::new(),
            })
            .collect();
        for ev in &self.evaluations {
            pairs[ev.pair].quadrants.insert(
                ev.bound.quadrant,
                BoundCell {
                    point_h: ev.bound.point_h,
                    eta_low: ev.bound.eta_low,
                    mc_stderr: ev.bound.mc_stderr,
                    retained: ev.retained,
                    class: ev.class,
                },
            );
        }
        pairs.retain(|p| !p.quadrants.is_empty());
        BoundReport {
            delta: cfg.delta,
            pairs,
        }
    }
}

impl BoundReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
