//! Benchmarks and robustness checks around the baseline equilibrium: the
//! full-diffusion market, the highest price consumers actually accept, and
//! how quickly word of mouth decays beyond the first waiting period.

use crate::eq_baseline::Equilibrium;
use crate::error::{Error, Result};
use crate::network::DegreeDistribution;
use crate::pricing::{one_minus_eta_ln1p_recip, MarketParams, PriceLaw};
use crate::roots;

/// Purchase-threshold diagnostic: `rho` is the highest price an informed
/// consumer would still pay rather than wait one period for word of mouth.
#[derive(Debug, Clone, Copy)]
pub struct RhoCheck {
    /// Indifference price; `+inf` when waiting is never strictly preferred
    /// below `v`.
    pub rho: f64,
    /// Reservation price `p_hi` of the candidate law.
    pub r: f64,
    /// `r <= rho`: firms never price above what consumers accept, so the
    /// candidate survives this deviation check.
    pub holds: bool,
}

/// Diffusion-depth diagnostic: how likely a consumer who waited one extra
/// period is to be informed at all.
#[derive(Debug, Clone, Copy)]
pub struct Lemma7Check {
    /// Probability a random friend has heard a price by period 2.
    pub x: f64,
    /// Probability of being informed in period 2: `1 - tau(1-q)`.
    pub p2: f64,
    /// Upper bound `tau(1-x)` on the probability that waiting until period 3
    /// informs a consumer who heard nothing in period 2.
    pub p3_bound: f64,
    /// Mass of degree-1 consumers, the bound's comparison point near `q = 1`.
    pub t1: f64,
    /// Bound is informative: below 1 always, and below `t1` deep in the
    /// high-search regime (`q >= 0.9` with `t1 > 0`).
    pub holds: bool,
}

/// Search benefit on normalized costs in the full-diffusion market, where one
/// waiting period informs every consumer of at least one price.
fn benefit_lhs(eta: f64, delta: f64) -> f64 {
    let d = one_minus_eta_ln1p_recip(eta);
    (1.0 - delta) * d / (1.0 - 2.0 * delta * eta * d)
}

/// Unique interior equilibrium of the full-diffusion benchmark.
///
/// Solves `benefit = s/v` for the markup ratio (the benefit falls from
/// `1 - delta` to zero as `eta` grows), then recovers
/// `q = 2*delta*eta / (1 + 2*delta*eta)`. The stored residual is the
/// back-substituted payoff indifference `(v - E[p] - s) - delta*(v - E[min p])`.
pub fn solve_full_diffusion(params: &MarketParams) -> Result<Equilibrium> {
    let (v, s, delta) = (params.v(), params.s(), params.delta());
    let target = s / v;
    if target >= 1.0 - delta {
        return Err(Error::NoEquilibrium(format!(
            "search never pays in the full-diffusion market when s/v >= 1 - delta \
             (s/v = {target}, delta = {delta})"
        )));
    }
    let mut hi = 1.0;
    while benefit_lhs(hi, delta) > target {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Diverged("full-diffusion bracket ran away".into()));
        }
    }
    let eta = roots::bisect(1e-12, hi, |e| benefit_lhs(e, delta) - target, 1e-15 * hi);
    let q = 2.0 * delta * eta / (1.0 + 2.0 * delta * eta);
    let law = PriceLaw::from_eta(eta, s)?;
    let residual = (v - law.e_p() - s) - delta * (v - law.e_pmin());
    Ok(Equilibrium {
        q,
        law,
        // Unique crossing, from above: the benefit is decreasing in q.
        stable: true,
        profit: 0.5 * q * law.p_hi(),
        residual,
    })
}

/// Solves for the purchase threshold `rho` of a waiting deviation against the
/// candidate law: `(1-delta)(v - rho)` equals the discounted option value
/// `delta * (1 - tau(1 - q/2)) * integral of F up to rho`.
pub fn rho_solve(
    dist: &DegreeDistribution,
    params: &MarketParams,
    q: f64,
    law: &PriceLaw,
) -> Result<RhoCheck> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::invalid(format!(
            "search probability must lie strictly inside (0, 1) (got {q})"
        )));
    }
    let (v, delta) = (params.v(), params.delta());
    if law.p_lo() >= v {
        return Err(Error::invalid(
            "price support lies entirely above the good's value",
        ));
    }
    let coef = delta * (1.0 - dist.pgf(1.0 - 0.5 * q)?);
    let gap = |rho: f64| coef * law.cdf_integral(rho) - (1.0 - delta) * (v - rho);

    // The option value must be nondecreasing in rho for the root to be
    // unique; check on a grid before trusting bisection.
    let mut prev = 0.0;
    for i in 0..=100 {
        let rho = law.p_lo() + (v - law.p_lo()) * i as f64 / 100.0;
        let cur = coef * law.cdf_integral(rho);
        assert!(
            cur >= prev - 1e-9 * (1.0 + cur.abs()),
            "option value decreased in rho"
        );
        prev = cur;
    }

    if gap(v) <= 0.0 {
        // Buying beats waiting at every price up to v.
        return Ok(RhoCheck {
            rho: f64::INFINITY,
            r: law.p_hi(),
            holds: true,
        });
    }
    let rho = roots::bisect(law.p_lo(), v, gap, 1e-14 * v);
    Ok(RhoCheck {
        rho,
        r: law.p_hi(),
        holds: law.p_hi() <= rho + 1e-12 * v,
    })
}

/// Computes the diffusion-depth bound at search intensity `q`.
pub fn lemma7_check(dist: &DegreeDistribution, q: f64) -> Result<Lemma7Check> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::invalid(format!(
            "search probability {q} outside [0, 1]"
        )));
    }
    // Chance a friend is informed by period 2: they searched, or one of
    // their other k-1 friends did.
    let x: f64 = dist
        .mass()
        .iter()
        .enumerate()
        .map(|(i, &tk)| tk * (1.0 - (1.0 - q).powi(i as i32)))
        .sum::<f64>()
        .min(1.0);
    let p2 = 1.0 - dist.pgf(1.0 - q)?;
    let p3_bound = dist.pgf(1.0 - x)?;
    let t1 = dist.t1();
    let holds = p3_bound < 1.0 && (q < 0.9 || t1 == 0.0 || p3_bound < t1);
    Ok(Lemma7Check {
        x,
        p2,
        p3_bound,
        t1,
        holds,
    })
}

#[cfg(test)]
// Expected values are frozen verbatim from an independent high-precision
// computation; keep every digit rather than hand-rounding to shortest form.
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use crate::eq_baseline::stable_equilibrium;
    use approx::assert_relative_eq;

    #[test]
    fn full_diffusion_frozen_point() {
        let params = MarketParams::new(1.0, 0.05, 0.5).unwrap();
        let eq = solve_full_diffusion(&params).unwrap();
        assert_relative_eq!(eq.law.eta(), 8.678_736_694_932_425_2, max_relative = 1e-10);
        assert_relative_eq!(eq.q, 0.896_680_731_016_933_46, max_relative = 1e-10);
        assert!(eq.residual.abs() <= 1e-10);
        // Markup ratio and search share are tied by eta = q / (2 delta (1-q)).
        let back = eq.q / (2.0 * 0.5 * (1.0 - eq.q));
        assert_relative_eq!(back, eq.law.eta(), max_relative = 1e-12);
    }

    #[test]
    fn full_diffusion_matches_dense_network_limit() {
        // A degenerate degree-1000 network diffuses information to everyone
        // after one period, so the baseline solver lands on the same point.
        let params = MarketParams::new(1.0, 0.05, 0.5).unwrap();
        let bench = solve_full_diffusion(&params).unwrap();
        let dense =
            stable_equilibrium(&DegreeDistribution::single(1000).unwrap(), &params).unwrap();
        assert_relative_eq!(dense.q, bench.q, max_relative = 1e-8);
        assert_relative_eq!(dense.law.e_p(), bench.law.e_p(), max_relative = 1e-8);
    }

    #[test]
    fn full_diffusion_benefit_is_decreasing() {
        for &delta in &[0.1, 0.5, 0.9] {
            let mut last = f64::INFINITY;
            let mut eta = 1e-6;
            while eta <= 1e8 {
                let b = benefit_lhs(eta, delta);
                assert!(b < last, "benefit must fall in eta (eta = {eta})");
                assert!(b > 0.0);
                last = b;
                eta *= 1.7;
            }
        }
    }

    #[test]
    fn full_diffusion_small_s_limit() {
        let mut last_q = 0.0;
        let mut last_ep = 0.0;
        for &s in &[0.02, 0.01, 0.005, 0.001] {
            let params = MarketParams::new(1.0, s, 0.5).unwrap();
            let eq = solve_full_diffusion(&params).unwrap();
            assert!(eq.q > last_q && eq.law.e_p() > last_ep);
            last_q = eq.q;
            last_ep = eq.law.e_p();
        }
        assert!(last_q > 0.99 && last_ep > 0.99);
    }

    #[test]
    fn full_diffusion_needs_small_costs() {
        let params = MarketParams::new(1.0, 0.6, 0.5).unwrap();
        assert!(matches!(
            solve_full_diffusion(&params),
            Err(Error::NoEquilibrium(_))
        ));
    }

    #[test]
    fn rho_exceeds_reservation_price_at_equilibrium() {
        let dist = DegreeDistribution::power_law(-1.0, 100).unwrap();
        let params = MarketParams::new(1.0, 0.05, 0.9).unwrap();
        let eq = stable_equilibrium(&dist, &params).unwrap();
        let check = rho_solve(&dist, &params, eq.q, &eq.law).unwrap();
        assert!(check.holds);
        assert_relative_eq!(check.rho, 0.488_170_766_114_304_54, max_relative = 1e-9);
        assert_relative_eq!(check.r, 0.469_639_636_795_097_51, max_relative = 1e-9);
    }

    #[test]
    fn rho_approaches_value_when_word_of_mouth_dries_up() {
        let dist = DegreeDistribution::power_law(-1.0, 100).unwrap();
        let params = MarketParams::new(1.0, 0.05, 0.9).unwrap();
        let law = PriceLaw::from_eta(4.0, 0.05).unwrap();
        let mut last = 0.0;
        for &q in &[1e-2, 1e-4, 1e-6] {
            let check = rho_solve(&dist, &params, q, &law).unwrap();
            assert!(check.rho.is_finite());
            assert!(check.rho > last);
            last = check.rho;
        }
        assert!(last > 1.0 - 1e-3);

        // With no discounting appetite for waiting, the threshold collapses
        // to the value itself.
        let impatient = MarketParams::new(1.0, 0.05, 1e-9).unwrap();
        let check = rho_solve(&dist, &impatient, 0.5, &law).unwrap();
        assert!(check.rho > 1.0 - 1e-6 || check.rho.is_infinite());
        assert!(check.holds);
    }

    #[test]
    fn rho_sentinel_when_waiting_never_strictly_preferred() {
        // q so small the period-2 information chance underflows to zero:
        // the indifference never holds below v and the sentinel is reported.
        // (A degenerate network keeps the mass sum exactly 1 in floating
        // point, so the underflow is exact rather than 1 +/- epsilon.)
        let dist = DegreeDistribution::single(2).unwrap();
        let params = MarketParams::new(1.0, 0.05, 0.9).unwrap();
        let law = PriceLaw::from_eta(4.0, 0.05).unwrap();
        let check = rho_solve(&dist, &params, 1e-18, &law).unwrap();
        assert!(check.rho.is_infinite());
        assert!(check.holds);
    }

    #[test]
    fn lemma7_two_friend_network() {
        let d = DegreeDistribution::single(2).unwrap();
        let check = lemma7_check(&d, 0.9).unwrap();
        assert_relative_eq!(check.x, 0.9, max_relative = 1e-12);
        assert_relative_eq!(check.p3_bound, 0.01, max_relative = 1e-10);
        assert!(check.holds);
    }

    #[test]
    fn lemma7_harmonic_network_near_full_search() {
        let d = DegreeDistribution::power_law(-1.0, 100).unwrap();
        let check = lemma7_check(&d, 0.99).unwrap();
        assert_relative_eq!(check.x, 0.806_254_011_408_936_82, max_relative = 1e-10);
        assert_relative_eq!(check.p2, 0.998_062_540_114_089_35, max_relative = 1e-10);
        assert_relative_eq!(
            check.p3_bound,
            0.041_515_473_813_364_345,
            max_relative = 1e-9
        );
        assert!(check.p3_bound < check.t1);
        assert!(check.holds);
    }

    #[test]
    fn lemma7_at_full_search_uses_surviving_degree_one_mass() {
        let d = DegreeDistribution::power_law(-1.0, 100).unwrap();
        let check = lemma7_check(&d, 1.0).unwrap();
        // x = 1 - t(1): only friends with no other friends stay uninformed.
        assert_relative_eq!(check.x, 1.0 - d.t1(), max_relative = 1e-12);
        assert!(check.holds);
    }

    #[test]
    fn lemma7_vacuous_on_degree_one_network() {
        let d = DegreeDistribution::single(1).unwrap();
        let check = lemma7_check(&d, 0.5).unwrap();
        assert_eq!(check.p3_bound, 1.0);
        assert!(!check.holds);
    }
}
