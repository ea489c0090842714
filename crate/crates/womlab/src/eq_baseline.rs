//! Interior search equilibria of the symmetric market.
//!
//! A fraction `q` of consumers searching immediately is an equilibrium when
//! the marginal consumer is indifferent between searching now and waiting for
//! word of mouth. Expressed on normalized search costs the condition is
//! `s / v = rhs_ic(q)`, and `rhs_ic` tends to zero at both ends of `(0, 1)`:
//! with almost nobody searching there is nothing to hear by waiting, prices
//! rise to the monopoly level and searching buys little surplus; with almost
//! everybody searching word of mouth is nearly as informative as searching.
//! Roots therefore come in pairs, and only crossings where `rhs_ic` falls
//! through the cost line are stable under the usual best-reply dynamic.

use crate::error::{Error, Result};
use crate::network::DegreeDistribution;
use crate::pricing::{
    eta_baseline, ln1p_recip, min_gap_coeff, one_minus_eta_ln1p_recip, MarketParams, PriceLaw,
};
use crate::roots;

/// The search probability of the no-trade outcome, which is an equilibrium
/// for every parameter set: if nobody searches, firms post the monopoly
/// price, and searching buys nothing worth `s`.
pub const NO_TRADE_Q: f64 = 0.0;

/// Interior equilibria are sought on `[WINDOW, 1 - WINDOW]`.
const WINDOW: f64 = 1e-9;
/// Grid intervals used when bracketing sign changes of the indifference
/// residual.
const SCAN_STEPS: usize = 10_000;
/// Bracket width below which bisection stops.
const Q_TOL: f64 = 1e-12;
/// Step used for the central-difference stability slope.
const SLOPE_H: f64 = 1e-7;

/// A symmetric equilibrium of the baseline market.
#[derive(Debug, Clone)]
pub struct Equilibrium {
    /// Fraction of consumers searching in the first period.
    pub q: f64,
    /// Equal-profit price law played by both firms.
    pub law: PriceLaw,
    /// Whether the indifference curve crosses the cost line from above.
    pub stable: bool,
    /// Per-firm discounted profit (constant across the support).
    pub profit: f64,
    /// Back-substitution residual `rhs_ic(q) - s/v`.
    pub residual: f64,
}

/// Right-hand side of the indifference condition on normalized costs:
/// the value of searching now relative to waiting, expressed as the `s/v`
/// level that would make a consumer indifferent at search intensity `q`.
pub fn rhs_ic(dist: &DegreeDistribution, params: &MarketParams, q: f64) -> Result<f64> {
    let delta = params.delta();
    let eta = eta_baseline(dist, q, delta)?;
    let l = ln1p_recip(eta);
    let d = one_minus_eta_ln1p_recip(eta);
    let tau_tilde = dist.tau_tilde(q)?;
    let denom = 1.0 - delta * dist.pgf(1.0 - q)?
        + eta / d * (delta * tau_tilde * min_gap_coeff(eta) + (1.0 - delta) * l);
    let rhs = (1.0 - delta) / denom;
    if !rhs.is_finite() {
        return Err(Error::Diverged(format!(
            "indifference RHS diverged at q = {q}"
        )));
    }
    Ok(rhs)
}

fn equilibrium_at(dist: &DegreeDistribution, params: &MarketParams, q: f64) -> Result<Equilibrium> {
    let delta = params.delta();
    let eta = eta_baseline(dist, q, delta)?;
    let law = PriceLaw::from_eta(eta, params.s())?;
    let single = dist.pgf(1.0 - 0.5 * q)? - 0.5 * dist.pgf(1.0 - q)?;
    let profit = (0.5 * q + delta * (1.0 - q) * single) * law.p_hi();
    let residual = rhs_ic(dist, params, q)? - params.s() / params.v();

    let qm = (q - SLOPE_H).max(WINDOW);
    let qp = (q + SLOPE_H).min(1.0 - WINDOW);
    let slope = (rhs_ic(dist, params, qp)? - rhs_ic(dist, params, qm)?) / (qp - qm);

    Ok(Equilibrium {
        q,
        law,
        stable: slope < 0.0,
        profit,
        residual,
    })
}

/// All interior equilibria, sorted by `q`; empty when only no-trade remains.
///
/// Sign changes of `rhs_ic(q) - s/v` are bracketed on a uniform grid and
/// refined by bisection to `|dq| <= 1e-12`. Candidates whose reservation
/// price exceeds `v` are rejected.
pub fn solve_equilibria(
    dist: &DegreeDistribution,
    params: &MarketParams,
) -> Result<Vec<Equilibrium>> {
    let target = params.s() / params.v();
    let f = |q: f64| -> Result<f64> { Ok(rhs_ic(dist, params, q)? - target) };

    let step = (1.0 - 2.0 * WINDOW) / SCAN_STEPS as f64;
    let mut qs = Vec::with_capacity(SCAN_STEPS + 1);
    let mut fs = Vec::with_capacity(SCAN_STEPS + 1);
    for i in 0..=SCAN_STEPS {
        let q = WINDOW + i as f64 * step;
        qs.push(q);
        fs.push(f(q)?);
    }

    let mut out = Vec::new();
    for i in 0..SCAN_STEPS {
        let root = if fs[i] == 0.0 {
            Some(qs[i])
        } else if fs[i] * fs[i + 1] < 0.0 {
            let mut g = |q: f64| rhs_ic(dist, params, q).map_or(f64::NAN, |r| r - target);
            Some(roots::bisect(qs[i], qs[i + 1], &mut g, Q_TOL))
        } else {
            None
        };
        if let Some(q) = root {
            let eq = equilibrium_at(dist, params, q)?;
            if eq.law.p_hi() <= params.v() * (1.0 + 1e-12) {
                out.push(eq);
            }
        }
    }
    // A root sitting exactly on a grid point would be seen by both adjacent
    // intervals; keep one copy.
    out.dedup_by(|a, b| (a.q - b.q).abs() < 10.0 * Q_TOL);
    Ok(out)
}

/// The equilibrium the market settles on: the stable one with the largest `q`.
pub fn stable_equilibrium(dist: &DegreeDistribution, params: &MarketParams) -> Result<Equilibrium> {
    solve_equilibria(dist, params)?
        .into_iter()
        .rfind(|e| e.stable)
        .ok_or_else(|| {
            Error::NoEquilibrium("only the no-trade outcome exists for these parameters".into())
        })
}

/// Largest search cost (for value `v`) at which interior equilibria exist:
/// `v` times the maximum of `rhs_ic` over `(0, 1)`.
pub fn s_bar(dist: &DegreeDistribution, v: f64, delta: f64) -> Result<f64> {
    if !v.is_finite() || v <= 0.0 {
        return Err(Error::invalid(format!("v must be positive (got {v})")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!(
            "delta must lie strictly between 0 and 1 (got {delta})"
        )));
    }
    // Any s strictly between 0 and v works for probing the RHS shape.
    let params = MarketParams::new(v, 0.5 * v, delta)?;
    let coarse = 1_000;
    let step = (1.0 - 2.0 * WINDOW) / coarse as f64;
    let mut best_i = 0usize;
    let mut best = f64::NEG_INFINITY;
    for i in 0..=coarse {
        let q = WINDOW + i as f64 * step;
        let r = rhs_ic(dist, &params, q)?;
        if r > best {
            best = r;
            best_i = i;
        }
    }
    let lo = WINDOW + step * best_i.saturating_sub(1) as f64;
    let hi = (WINDOW + step * (best_i + 1) as f64).min(1.0 - WINDOW);
    let (_, max) = roots::golden_max(
        lo,
        hi,
        |q| rhs_ic(dist, &params, q).unwrap_or(f64::NEG_INFINITY),
        1e-12,
    );
    Ok(v * max.max(best))
}

/// One row of [`small_s_limit_check`].
#[derive(Debug, Clone)]
pub struct SmallSEntry {
    pub s: f64,
    /// `None` when `s` exceeds the existence threshold (flagged, not solved).
    pub point: Option<SmallSPoint>,
}

/// Stable-equilibrium summary for one search cost.
#[derive(Debug, Clone, Copy)]
pub struct SmallSPoint {
    pub q: f64,
    pub e_p: f64,
    pub dispersion: f64,
}

/// Report of [`small_s_limit_check`].
#[derive(Debug, Clone)]
pub struct SmallSReport {
    pub s_bar: f64,
    pub entries: Vec<SmallSEntry>,
    /// `q` rises toward 1 along the (decreasing) cost sequence.
    pub q_increasing: bool,
    /// Mean price rises toward `v`: vanishing frictions do not restore
    /// competitive pricing here.
    pub e_price_increasing: bool,
    pub dispersion_decreasing: bool,
}

/// Tracks the stable equilibrium along a decreasing sequence of search costs.
pub fn small_s_limit_check(
    dist: &DegreeDistribution,
    v: f64,
    delta: f64,
    s_sequence: &[f64],
) -> Result<SmallSReport> {
    if s_sequence.is_empty() || s_sequence.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::invalid(
            "s_sequence must be strictly decreasing and non-empty",
        ));
    }
    let threshold = s_bar(dist, v, delta)?;
    let mut entries = Vec::with_capacity(s_sequence.len());
    for &s in s_sequence {
        let point = if s > threshold {
            None
        } else {
            let params = MarketParams::new(v, s, delta)?;
            match stable_equilibrium(dist, &params) {
                Ok(eq) => Some(SmallSPoint {
                    q: eq.q,
                    e_p: eq.law.e_p(),
                    dispersion: eq.law.dispersion(),
                }),
                Err(Error::NoEquilibrium(_)) => None,
                Err(e) => return Err(e),
            }
        };
        entries.push(SmallSEntry { s, point });
    }
    let solved: Vec<&SmallSPoint> = entries.iter().filter_map(|e| e.point.as_ref()).collect();
    let pairs = || solved.windows(2);
    Ok(SmallSReport {
        s_bar: threshold,
        q_increasing: pairs().all(|w| w[1].q > w[0].q),
        e_price_increasing: pairs().all(|w| w[1].e_p > w[0].e_p),
        dispersion_decreasing: pairs().all(|w| w[1].dispersion < w[0].dispersion),
        entries,
    })
}

/// One row of [`dense_limit_check`].
#[derive(Debug, Clone, Copy)]
pub struct DenseLimitEntry {
    pub kmax: usize,
    pub q: f64,
    pub eta: f64,
    pub rel_dispersion: f64,
    pub e_p: f64,
}

/// Report of [`dense_limit_check`].
#[derive(Debug, Clone)]
pub struct DenseLimitReport {
    pub entries: Vec<DenseLimitEntry>,
    pub min_rel_dispersion: f64,
    pub min_e_p: f64,
    /// Mean price falls (weakly) toward the full-diffusion benchmark as the
    /// network densifies.
    pub e_p_nonincreasing: bool,
}

/// Stable equilibria on degenerate all-degree-`kmax` networks along an
/// increasing `kmax` sequence: price dispersion survives arbitrarily dense
/// networks.
pub fn dense_limit_check(
    v: f64,
    s: f64,
    delta: f64,
    kmax_sequence: &[usize],
) -> Result<DenseLimitReport> {
    if kmax_sequence.is_empty() || kmax_sequence.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid(
            "kmax_sequence must be strictly increasing and non-empty",
        ));
    }
    let params = MarketParams::new(v, s, delta)?;
    let mut entries = Vec::with_capacity(kmax_sequence.len());
    for &kmax in kmax_sequence {
        let dist = DegreeDistribution::single(kmax)?;
        let eq = stable_equilibrium(&dist, &params)?;
        entries.push(DenseLimitEntry {
            kmax,
            q: eq.q,
            eta: eq.law.eta(),
            rel_dispersion: eq.law.relative_dispersion(),
            e_p: eq.law.e_p(),
        });
    }
    Ok(DenseLimitReport {
        min_rel_dispersion: entries
            .iter()
            .map(|e| e.rel_dispersion)
            .fold(f64::INFINITY, f64::min),
        min_e_p: entries.iter().map(|e| e.e_p).fold(f64::INFINITY, f64::min),
        e_p_nonincreasing: entries.windows(2).all(|w| w[1].e_p <= w[0].e_p + 1e-12),
        entries,
    })
}
