//! Monte-Carlo check of the one-shot market: consumers either search or wait
//! for word of mouth exactly as in the model, firms' prices are drawn from
//! the candidate mixing law, and sample payoffs are compared against the
//! closed forms.
//!
//! The payoff pass realizes one market per replication (both firms' prices
//! shared by all consumers); the profit pass estimates a posting firm's
//! expected profit against the rival's law, so there the rival price is
//! redrawn per comparing consumer.
//!
//! Replications are independent ChaCha streams keyed by replication index
//! (and by grid index for the profit pass), so results are bit-identical for
//! a given seed no matter how many threads run them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::DegreeDistribution;
use crate::pricing::{MarketParams, PriceLaw};
use crate::textio::fmt_real;

/// Sample size and seeding for one simulation run.
#[derive(Debug, Clone)]
pub struct SimConfig {
    /// Consumers drawn per replication.
    pub n_consumers: usize,
    /// Independent replications; the standard error comes from the spread
    /// of replication means.
    pub n_replications: usize,
    pub seed: u64,
    /// Prices at which to estimate one firm's demand and profit against a
    /// rival mixing per the law. Empty to skip the profit pass.
    pub profit_grid: Vec<f64>,
}

/// Sample mean and its standard error across replications.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MetricStat {
    pub mean: f64,
    pub stderr: f64,
}

/// Estimated demand share and profit for a firm posting a fixed price.
#[derive(Debug, Clone, Serialize)]
pub struct ProfitPoint {
    pub price: f64,
    pub demand: MetricStat,
    pub profit: MetricStat,
}

/// Simulation output.
#[derive(Debug, Clone, Serialize)]
pub struct SimReport {
    pub n_consumers: usize,
    pub n_replications: usize,
    pub seed: u64,
    /// Mean payoff of consumers who searched immediately.
    pub payoff_active: MetricStat,
    /// Mean payoff of consumers who waited for word of mouth.
    pub payoff_passive: MetricStat,
    /// Mean price paid by consumers who bought at a single quoted price.
    pub e_price_paid: MetricStat,
    /// Fraction of all consumers who heard, and compared, both prices.
    pub comparer_fraction: MetricStat,
    pub profit_at: Vec<ProfitPoint>,
}

struct RepStats {
    active: f64,
    passive: f64,
    price_paid: f64,
    comparer: f64,
}

fn stat(values: impl Iterator<Item = f64> + Clone, n_rep: usize) -> MetricStat {
    let mean = values.clone().sum::<f64>() / n_rep as f64;
    let var = values.map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n_rep - 1) as f64;
    MetricStat {
        mean,
        stderr: (var / n_rep as f64).sqrt(),
    }
}

fn degree_cdf(dist: &DegreeDistribution) -> Vec<f64> {
    let mut acc = 0.0;
    dist.mass()
        .iter()
        .map(|&m| {
            acc += m;
            acc
        })
        .collect()
}

fn sample_degree(cum: &[f64], u: f64) -> usize {
    (cum.partition_point(|&c| c <= u) + 1).min(cum.len())
}

fn payoff_replication(
    params: &MarketParams,
    q: f64,
    law: &PriceLaw,
    cum: &[f64],
    n: usize,
    seed: u64,
    stream: u64,
) -> RepStats {
    let (v, s, delta) = (params.v(), params.s(), params.delta());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let p1 = law.quantile(rng.gen());
    let p2 = law.quantile(rng.gen());

    let (mut active_sum, mut n_active) = (0.0, 0usize);
    let mut passive_sum = 0.0;
    let (mut paid_sum, mut n_paid) = (0.0, 0usize);
    let mut n_comparer = 0usize;

    for _ in 0..n {
        if rng.gen_bool(q) {
            let p = if rng.gen_bool(0.5) { p1 } else { p2 };
            active_sum += v - p - s;
            n_active += 1;
            paid_sum += p;
            n_paid += 1;
        } else {
            let k = sample_degree(cum, rng.gen());
            let (mut heard1, mut heard2) = (false, false);
            for _ in 0..k {
                if rng.gen_bool(q) {
                    if rng.gen_bool(0.5) {
                        heard1 = true;
                    } else {
                        heard2 = true;
                    }
                }
            }
            passive_sum += match (heard1, heard2) {
                (true, true) => {
                    n_comparer += 1;
                    delta * (v - p1.min(p2))
                }
                (true, false) | (false, true) => {
                    let p = if heard1 { p1 } else { p2 };
                    paid_sum += p;
                    n_paid += 1;
                    delta * (v - p)
                }
                (false, false) => {
                    // Nothing heard: search a random firm next period.
                    let p = if rng.gen_bool(0.5) { p1 } else { p2 };
                    paid_sum += p;
                    n_paid += 1;
                    delta * (v - p - s)
                }
            };
        }
    }
    RepStats {
        active: active_sum / n_active as f64,
        passive: passive_sum / (n - n_active) as f64,
        price_paid: paid_sum / n_paid as f64,
        comparer: n_comparer as f64 / n as f64,
    }
}

#[allow(clippy::too_many_arguments)]
fn demand_replication(
    q: f64,
    law: &PriceLaw,
    cum: &[f64],
    n: usize,
    delta: f64,
    price: f64,
    seed: u64,
    stream: u64,
) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut share = 0.0;
    for _ in 0..n {
        if rng.gen_bool(q) {
            if rng.gen_bool(0.5) {
                share += 1.0;
            }
        } else {
            let k = sample_degree(cum, rng.gen());
            let (mut heard_us, mut heard_rival) = (false, false);
            for _ in 0..k {
                if rng.gen_bool(q) {
                    if rng.gen_bool(0.5) {
                        heard_us = true;
                    } else {
                        heard_rival = true;
                    }
                }
            }
            share += match (heard_us, heard_rival) {
                (true, true) => {
                    // The estimand is the profit expectation over the
                    // rival's mixing law, so each comparer faces a fresh
                    // rival draw; a single draw per replication would make
                    // the whole comparer term hinge on one coin flip.
                    let rival = law.quantile(rng.gen());
                    if price < rival {
                        delta
                    } else if price == rival {
                        0.5 * delta
                    } else {
                        0.0
                    }
                }
                (true, false) => delta,
                (false, true) => 0.0,
                (false, false) => {
                    if rng.gen_bool(0.5) {
                        delta
                    } else {
                        0.0
                    }
                }
            };
        }
    }
    share / n as f64
}

/// Runs the market simulation and, when a profit grid is given, estimates a
/// firm's demand and profit at each grid price.
pub fn simulate_market(
    dist: &DegreeDistribution,
    params: &MarketParams,
    q: f64,
    law: &PriceLaw,
    config: &SimConfig,
) -> Result<SimReport> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::invalid(format!(
            "search probability must lie strictly inside (0, 1) (got {q})"
        )));
    }
    if config.n_consumers == 0 {
        return Err(Error::invalid("need at least one consumer per replication"));
    }
    if config.n_replications < 2 {
        return Err(Error::invalid(
            "need at least two replications to estimate a standard error",
        ));
    }
    for &p in &config.profit_grid {
        if p < law.p_lo() * (1.0 - 1e-12) || p > law.p_hi() * (1.0 + 1e-12) {
            return Err(Error::invalid(format!(
                "profit grid price {p} outside the mixing support"
            )));
        }
    }

    let cum = degree_cdf(dist);
    let n = config.n_consumers;
    let n_rep = config.n_replications;
    let seed = config.seed;

    let reps: Vec<RepStats> = (0..n_rep)
        .into_par_iter()
        .map(|r| payoff_replication(params, q, law, &cum, n, seed, r as u64 + 1))
        .collect();

    let profit_at = config
        .profit_grid
        .iter()
        .enumerate()
        .map(|(gi, &price)| {
            let shares: Vec<f64> = (0..n_rep)
                .into_par_iter()
                .map(|r| {
                    let stream = ((gi as u64 + 1) << 32) | (r as u64 + 1);
                    demand_replication(q, law, &cum, n, params.delta(), price, seed, stream)
                })
                .collect();
            ProfitPoint {
                price,
                demand: stat(shares.iter().copied(), n_rep),
                profit: stat(shares.iter().map(|d| price * d), n_rep),
            }
        })
        .collect();

    Ok(SimReport {
        n_consumers: n,
        n_replications: n_rep,
        seed,
        payoff_active: stat(reps.iter().map(|r| r.active), n_rep),
        payoff_passive: stat(reps.iter().map(|r| r.passive), n_rep),
        e_price_paid: stat(reps.iter().map(|r| r.price_paid), n_rep),
        comparer_fraction: stat(reps.iter().map(|r| r.comparer), n_rep),
        profit_at,
    })
}

impl SimReport {
    /// One row per metric: `metric,mean,stderr`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("metric,mean,stderr\n");
        let mut row = |name: &str, st: &MetricStat| {
            out.push_str(&format!(
                "{name},{},{}\n",
                fmt_real(st.mean),
                fmt_real(st.stderr)
            ));
        };
        row("payoff_active", &self.payoff_active);
        row("payoff_passive", &self.payoff_passive);
        row("e_price_paid", &self.e_price_paid);
        row("comparer_fraction", &self.comparer_fraction);
        for p in &self.profit_at {
            row(&format!("demand@{}", fmt_real(p.price)), &p.demand);
            row(&format!("profit@{}", fmt_real(p.price)), &p.profit);
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
