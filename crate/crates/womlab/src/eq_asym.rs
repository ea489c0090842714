//! Cutoff equilibria where the search decision depends on degree: consumers
//! with few friends search immediately, well-connected ones wait for word of
//! mouth, and at most one degree mixes.

use crate::error::{Error, Result};
use crate::network::{two_price_weight, DegreeDistribution};
use crate::pricing::{ln1p_recip, min_gap_coeff, one_minus_eta_ln1p_recip, MarketParams, PriceLaw};
use crate::roots;

const GRID: usize = 2_000;
const WINDOW: f64 = 1e-9;
const Q_TOL: f64 = 1e-12;
const SLOPE_H: f64 = 1e-7;

/// Whether the cutoff type mixes strictly or the profile sits at full search
/// of every degree up to the cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AsymRegime {
    /// The cutoff degree searches with probability strictly inside (0, 1).
    Interior,
    /// The cutoff degree searches for sure; the next degree strictly waits.
    Boundary,
}

/// A degree-cutoff equilibrium candidate that survived all checks.
#[derive(Debug, Clone)]
pub struct AsymEquilibrium {
    /// Cutoff degree: smaller degrees search, larger degrees wait.
    pub khat: usize,
    /// Search probability of the cutoff degree.
    pub q: f64,
    /// Population share that searches.
    pub w_hat: f64,
    /// Probability that a random friend searches (degree-weighted share).
    pub w: f64,
    /// Captive-to-comparer demand ratio implied by the profile.
    pub eta_hat: f64,
    /// Share of consumers who end up comparing both firms' prices.
    pub comparison_weight: f64,
    /// Mixed pricing law the firms play against this profile.
    pub law: PriceLaw,
    pub regime: AsymRegime,
    /// Interior points: search benefit falls through cost at the root.
    /// Boundary points are reported stable.
    pub stable: bool,
    /// Indifference gap of the cutoff degree; zero only for interior points.
    pub residual: f64,
}

fn validate_cutoff(dist: &DegreeDistribution, khat: usize, q: f64) -> Result<()> {
    if khat == 0 || khat > dist.kmax() {
        return Err(Error::invalid(format!(
            "cutoff degree {khat} outside 1..={}",
            dist.kmax()
        )));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::invalid(format!(
            "search probability {q} outside [0, 1]"
        )));
    }
    Ok(())
}

/// Population share that searches: all degrees below the cutoff plus the
/// mixing mass at the cutoff itself.
pub fn search_share(dist: &DegreeDistribution, khat: usize, q: f64) -> Result<f64> {
    validate_cutoff(dist, khat, q)?;
    let below: f64 = (1..khat).map(|k| dist.t(k)).sum();
    Ok(below + dist.t(khat) * q)
}

/// Probability that a randomly chosen friend searches. Friends are reached
/// in proportion to their degree, so low-degree searchers count for less.
pub fn friend_search_prob(dist: &DegreeDistribution, khat: usize, q: f64) -> Result<f64> {
    validate_cutoff(dist, khat, q)?;
    let below: f64 = (1..khat).map(|k| dist.t(k) * k as f64).sum();
    Ok((below + dist.t(khat) * khat as f64 * q) / dist.mean_degree())
}

/// Per-firm captive weight of a waiting consumer with `k` friends: the
/// chance all searching friends picked this firm, plus half of the
/// hear-nothing mass (who search a random firm themselves next period).
pub fn single_weight(k: usize, w: f64) -> f64 {
    (1.0 - 0.5 * w).powi(k as i32) - 0.5 * (1.0 - w).powi(k as i32)
}

/// Captive and comparer masses contributed by all waiting consumers.
fn waiter_weights(dist: &DegreeDistribution, khat: usize, q: f64, w: f64) -> (f64, f64) {
    let mut captive = dist.t(khat) * (1.0 - q) * single_weight(khat, w);
    let mut comparer = dist.t(khat) * (1.0 - q) * two_price_weight(khat, w);
    for k in (khat + 1)..=dist.kmax() {
        captive += dist.t(k) * single_weight(k, w);
        comparer += dist.t(k) * two_price_weight(k, w);
    }
    (captive, comparer)
}

/// Captive-to-comparer demand ratio under a degree-cutoff profile.
pub fn eta_hat(dist: &DegreeDistribution, khat: usize, q: f64, delta: f64) -> Result<f64> {
    validate_cutoff(dist, khat, q)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!(
            "discount factor must lie strictly inside (0, 1) (got {delta})"
        )));
    }
    let w = friend_search_prob(dist, khat, q)?;
    let w_hat = search_share(dist, khat, q)?;
    let (captive, comparer) = waiter_weights(dist, khat, q, w);
    let den = delta * comparer;
    if den <= 0.0 {
        return Err(Error::NoComparison(format!(
            "no consumer ever compares prices under cutoff {khat} with q = {q}"
        )));
    }
    let eta = (0.5 * w_hat + delta * captive) / den;
    if !eta.is_finite() {
        return Err(Error::Diverged(format!(
            "captive/comparer ratio not finite under cutoff {khat}"
        )));
    }
    Ok(eta)
}

/// Indifference gap of a degree-`degree` consumer facing the market implied
/// by cutoff `khat` at mixing weight `q`: positive when that degree strictly
/// gains from searching. Boundary profiles need the gap of `khat` (weakly
/// positive) and of `khat + 1` (weakly negative).
pub fn asym_residual_for_degree(
    dist: &DegreeDistribution,
    params: &MarketParams,
    khat: usize,
    q: f64,
    degree: usize,
) -> Result<f64> {
    if degree == 0 || degree > dist.kmax() {
        return Err(Error::invalid(format!(
            "degree {degree} outside 1..={}",
            dist.kmax()
        )));
    }
    let k_exp = degree;
    let (v, s, delta) = (params.v(), params.s(), params.delta());
    let eta = eta_hat(dist, khat, q, delta)?;
    let w = friend_search_prob(dist, khat, q)?;
    let d = one_minus_eta_ln1p_recip(eta);
    let denom = 1.0 - delta * (1.0 - w).powi(k_exp as i32)
        + eta / d
            * (delta * two_price_weight(k_exp, w) * min_gap_coeff(eta)
                + (1.0 - delta) * ln1p_recip(eta));
    Ok((1.0 - delta) / denom - s / v)
}

/// Indifference gap of the cutoff degree itself; interior equilibria are its
/// zeros in `q`.
pub fn asym_residual(
    dist: &DegreeDistribution,
    params: &MarketParams,
    khat: usize,
    q: f64,
) -> Result<f64> {
    asym_residual_for_degree(dist, params, khat, q, khat)
}

fn candidate(
    dist: &DegreeDistribution,
    params: &MarketParams,
    khat: usize,
    q: f64,
    regime: AsymRegime,
    stable: bool,
    residual: f64,
) -> Result<Option<AsymEquilibrium>> {
    let eta = match eta_hat(dist, khat, q, params.delta()) {
        Ok(e) => e,
        Err(Error::NoComparison(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let law = PriceLaw::from_eta(eta, params.s())?;
    if law.p_hi() > params.v() * (1.0 + 1e-12) {
        // Firms would have to price above the good's value to recoup the
        // search cost; no consumer would buy.
        return Ok(None);
    }
    let w = friend_search_prob(dist, khat, q)?;
    let w_hat = search_share(dist, khat, q)?;
    let (_, comparison_weight) = waiter_weights(dist, khat, q, w);
    Ok(Some(AsymEquilibrium {
        khat,
        q,
        w_hat,
        w,
        eta_hat: eta,
        comparison_weight,
        law,
        regime,
        stable,
        residual,
    }))
}

/// Finds every degree-cutoff equilibrium: for each cutoff, interior roots of
/// the indifference gap on a scan grid, plus the full-search boundary where
/// the cutoff degree weakly prefers searching and the next degree weakly
/// prefers waiting. Results are ordered by the friend search probability.
pub fn solve_asym(
    dist: &DegreeDistribution,
    params: &MarketParams,
) -> Result<Vec<AsymEquilibrium>> {
    let fallback = -params.s() / params.v();
    let mut out: Vec<AsymEquilibrium> = Vec::new();
    for khat in 1..=dist.kmax() {
        // Profiles where nobody ever compares support no mixed pricing;
        // score them as "searching does not pay" during the scan.
        let mut eval = |q: f64| asym_residual(dist, params, khat, q).unwrap_or(fallback);
        let grid_q = |i: usize| WINDOW + (1.0 - 2.0 * WINDOW) * i as f64 / GRID as f64;
        let mut prev = eval(grid_q(0));
        for i in 1..=GRID {
            let cur = eval(grid_q(i));
            if prev * cur < 0.0 {
                let root = roots::bisect(grid_q(i - 1), grid_q(i), &mut eval, Q_TOL);
                let residual = match asym_residual(dist, params, khat, root) {
                    Ok(r) => r,
                    Err(Error::NoComparison(_)) => {
                        prev = cur;
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                let qm = (root - SLOPE_H).max(WINDOW);
                let qp = (root + SLOPE_H).min(1.0 - WINDOW);
                let stable = (eval(qp) - eval(qm)) / (qp - qm) < 0.0;
                if let Some(eq) = candidate(
                    dist,
                    params,
                    khat,
                    root,
                    AsymRegime::Interior,
                    stable,
                    residual,
                )? {
                    out.push(eq);
                }
            }
            prev = cur;
        }
        if khat < dist.kmax() {
            let gap_here = asym_residual_for_degree(dist, params, khat, 1.0, khat);
            let gap_next = asym_residual_for_degree(dist, params, khat, 1.0, khat + 1);
            if let (Ok(here), Ok(next)) = (gap_here, gap_next) {
                if here >= 0.0 && next <= 0.0 {
                    if let Some(eq) =
                        candidate(dist, params, khat, 1.0, AsymRegime::Boundary, true, here)?
                    {
                        out.push(eq);
                    }
                }
            }
        }
    }
    out.sort_by(|a, b| a.w.partial_cmp(&b.w).expect("finite friend weights"));
    Ok(out)
}

/// Expected profit of a firm posting `p` against the cutoff profile while
/// the rival mixes according to `law`. Constant on the law's support.
pub fn firm_profit_asym(
    dist: &DegreeDistribution,
    khat: usize,
    q: f64,
    delta: f64,
    law: &PriceLaw,
    p: f64,
) -> Result<f64> {
    if p < law.p_lo() * (1.0 - 1e-12) || p > law.p_hi() * (1.0 + 1e-12) {
        return Err(Error::invalid(format!(
            "price {p} outside the mixing support [{}, {}]",
            law.p_lo(),
            law.p_hi()
        )));
    }
    let w = friend_search_prob(dist, khat, q)?;
    let w_hat = search_share(dist, khat, q)?;
    let (captive, comparer) = waiter_weights(dist, khat, q, w);
    let share = 0.5 * w_hat + delta * (captive + comparer * (1.0 - law.cdf(p)));
    Ok(p * share)
}

/// Verifies the shape that makes cutoff profiles consistent: the waiting
/// payoff must not fall as degree grows, so whenever some degree prefers to
/// wait, every better-connected degree does too.
pub fn cutoff_monotonicity_check(
    dist: &DegreeDistribution,
    params: &MarketParams,
    eq: &AsymEquilibrium,
) -> Result<bool> {
    let (v, s, delta) = (params.v(), params.s(), params.delta());
    let gap = eq.law.e_p() - eq.law.e_pmin();
    let mut prev = f64::NEG_INFINITY;
    for k in 1..=dist.kmax() {
        let informed = two_price_weight(k, eq.w);
        let uninformed = (1.0 - eq.w).powi(k as i32);
        let payoff = delta * (v - eq.law.e_p() + informed * gap - uninformed * s);
        if payoff + 1e-12 * v < prev {
            return Ok(false);
        }
        prev = payoff;
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pricing::eta_baseline;
    use approx::assert_relative_eq;

    fn heavy_tail() -> DegreeDistribution {
        DegreeDistribution::power_law(-2.5, 5).unwrap()
    }

    fn harmonic6() -> DegreeDistribution {
        DegreeDistribution::power_law(-1.0, 6).unwrap()
    }

    /// Enumeration oracle: condition on the number of searching friends and
    /// split firm choices explicitly instead of using the closed forms.
    fn eta_hat_brute(dist: &DegreeDistribution, khat: usize, q: f64, delta: f64) -> f64 {
        let w = friend_search_prob(dist, khat, q).unwrap();
        let choose = |n: usize, m: usize| -> f64 {
            (0..m).fold(1.0, |c, i| c * (n - i) as f64 / (i + 1) as f64)
        };
        let single = |k: usize| -> f64 {
            let mut one_firm = 0.0;
            for m in 1..=k {
                one_firm += choose(k, m)
                    * w.powi(m as i32)
                    * (1.0 - w).powi((k - m) as i32)
                    * 0.5f64.powi(m as i32);
            }
            one_firm + 0.5 * (1.0 - w).powi(k as i32)
        };
        let both = |k: usize| -> f64 {
            let mut hit = 0.0;
            for m in 2..=k {
                hit += choose(k, m)
                    * w.powi(m as i32)
                    * (1.0 - w).powi((k - m) as i32)
                    * (1.0 - 2.0 * 0.5f64.powi(m as i32));
            }
            hit
        };
        let mut captive = dist.t(khat) * (1.0 - q) * single(khat);
        let mut comparer = dist.t(khat) * (1.0 - q) * both(khat);
        for k in khat + 1..=dist.kmax() {
            captive += dist.t(k) * single(k);
            comparer += dist.t(k) * both(k);
        }
        (0.5 * search_share(dist, khat, q).unwrap() + delta * captive) / (delta * comparer)
    }

    #[test]
    fn shares_and_friend_weights_by_hand() {
        let d = harmonic6();
        let w_hat = search_share(&d, 3, 0.5).unwrap();
        let w = friend_search_prob(&d, 3, 0.5).unwrap();
        assert_relative_eq!(w_hat, d.t(1) + d.t(2) + 0.5 * d.t(3), epsilon = 1e-15);
        assert_relative_eq!(w_hat, 0.680_272_108_843_537_5, max_relative = 1e-12);
        assert_relative_eq!(w, 0.416_666_666_666_666_74, max_relative = 1e-12);
        // Full search makes both shares one.
        assert_relative_eq!(search_share(&d, 6, 1.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(
            friend_search_prob(&d, 6, 1.0).unwrap(),
            1.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn eta_hat_matches_enumeration() {
        let cases: [(DegreeDistribution, usize, f64, f64); 3] = [
            (heavy_tail(), 3, 0.5, 0.92),
            (harmonic6(), 2, 0.25, 0.6),
            (heavy_tail(), 5, 0.8, 0.5),
        ];
        for (d, khat, q, delta) in &cases {
            let closed = eta_hat(d, *khat, *q, *delta).unwrap();
            let brute = eta_hat_brute(d, *khat, *q, *delta);
            assert_relative_eq!(closed, brute, max_relative = 1e-12);
        }
        assert_relative_eq!(
            eta_hat(&heavy_tail(), 3, 0.5, 0.92).unwrap(),
            11.452_620_032_686_436,
            max_relative = 1e-10
        );
        assert_relative_eq!(
            eta_hat(&harmonic6(), 2, 0.25, 0.6).unwrap(),
            12.768_161_899_311_261,
            max_relative = 1e-10
        );
        assert_relative_eq!(
            eta_hat(&heavy_tail(), 5, 0.8, 0.5).unwrap(),
            384.922_092_005_243_03,
            max_relative = 1e-10
        );
    }

    #[test]
    fn single_type_network_collapses_to_shared_ratio() {
        // When every consumer has the same degree the cutoff profile with
        // khat at that degree is exactly the symmetric mixed profile.
        let d = DegreeDistribution::single(3).unwrap();
        let hat = eta_hat(&d, 3, 0.4, 0.7).unwrap();
        let sym = eta_baseline(&d, 0.4, 0.7).unwrap();
        assert_relative_eq!(hat, sym, max_relative = 1e-12);
    }

    #[test]
    fn heavy_tail_market_has_two_cutoff_equilibria() {
        let d = heavy_tail();
        let params = MarketParams::new(1.0, 0.025, 0.92).unwrap();
        let eqs = solve_asym(&d, &params).unwrap();
        assert_eq!(eqs.len(), 2);

        let lo = &eqs[0];
        assert_eq!(lo.khat, 1);
        assert_eq!(lo.regime, AsymRegime::Interior);
        assert!(!lo.stable);
        assert_relative_eq!(lo.q, 0.649_072_099_823_393_6, max_relative = 1e-8);
        assert_relative_eq!(lo.eta_hat, 17.216_453_275_128_46, max_relative = 1e-8);
        assert_relative_eq!(lo.w, 0.368_697_492_735_694_13, max_relative = 1e-8);

        let hi = &eqs[1];
        assert_eq!(hi.khat, 3);
        assert_eq!(hi.regime, AsymRegime::Interior);
        assert!(hi.stable);
        assert_relative_eq!(hi.q, 0.640_741_058_476_282_5, max_relative = 1e-8);
        assert_relative_eq!(hi.eta_hat, 12.467_124_139_322_985, max_relative = 1e-8);
        assert_relative_eq!(hi.w, 0.838_914_625_891_200_4, max_relative = 1e-8);
        assert_relative_eq!(hi.w_hat, 0.944_045_454_600_424, max_relative = 1e-8);
        assert_relative_eq!(
            hi.comparison_weight,
            0.041_724_398_466_049_736,
            max_relative = 1e-7
        );
        assert_relative_eq!(hi.law.p_hi(), 0.656_475_796_585_834_7, max_relative = 1e-8);
        assert!(hi.residual.abs() < 1e-10 && lo.residual.abs() < 1e-10);
    }

    #[test]
    fn boundary_equilibrium_at_full_search_of_low_degrees() {
        let d = heavy_tail();
        let params = MarketParams::new(1.0, 0.04, 0.92).unwrap();
        let eqs = solve_asym(&d, &params).unwrap();
        assert_eq!(eqs.len(), 2);

        assert_eq!(eqs[0].khat, 1);
        assert_eq!(eqs[0].regime, AsymRegime::Interior);
        assert!(!eqs[0].stable);
        assert_relative_eq!(eqs[0].q, 0.976_078_716_006_063_6, max_relative = 1e-8);
        assert_relative_eq!(eqs[0].eta_hat, 8.651_301_119_123_987, max_relative = 1e-8);

        let b = &eqs[1];
        assert_eq!((b.khat, b.regime), (1, AsymRegime::Boundary));
        assert!(b.stable);
        assert_eq!(b.q, 1.0);
        assert_relative_eq!(b.eta_hat, 8.316_885_505_816_629, max_relative = 1e-10);
        assert_relative_eq!(b.w, 0.568_037_807_873_752_7, max_relative = 1e-12);
        // The cutoff degree weakly prefers searching at the boundary.
        assert!(b.residual >= 0.0);
    }

    #[test]
    fn mixed_regimes_across_cutoffs() {
        let d = harmonic6();
        let params = MarketParams::new(1.0, 0.03, 0.9).unwrap();
        let eqs = solve_asym(&d, &params).unwrap();
        assert_eq!(eqs.len(), 4);
        let shape: Vec<(usize, AsymRegime, bool)> =
            eqs.iter().map(|e| (e.khat, e.regime, e.stable)).collect();
        assert_eq!(
            shape,
            vec![
                (1, AsymRegime::Interior, false),
                (1, AsymRegime::Boundary, true),
                (2, AsymRegime::Interior, false),
                (6, AsymRegime::Interior, true),
            ]
        );
        assert_relative_eq!(eqs[0].q, 0.984_861_599_918_462, max_relative = 1e-8);
        assert_relative_eq!(eqs[1].eta_hat, 14.852_702_111_285_844, max_relative = 1e-10);
        assert_relative_eq!(eqs[2].q, 0.010_172_746_714_665_92, max_relative = 1e-6);
        assert_relative_eq!(eqs[3].q, 0.182_448_091_940_423_38, max_relative = 1e-8);
        assert_relative_eq!(eqs[3].eta_hat, 10.149_780_629_498_075, max_relative = 1e-8);
        // Ordered by how likely a random friend is to search.
        assert!(eqs.windows(2).all(|p| p[0].w <= p[1].w));
    }

    #[test]
    fn profit_flat_on_support_at_cutoff_equilibrium() {
        let d = heavy_tail();
        let params = MarketParams::new(1.0, 0.025, 0.92).unwrap();
        let eq = solve_asym(&d, &params)
            .unwrap()
            .into_iter()
            .find(|e| e.stable)
            .unwrap();
        for i in 0..=100 {
            let p = eq.law.p_lo() + (eq.law.p_hi() - eq.law.p_lo()) * i as f64 / 100.0;
            let profit = firm_profit_asym(&d, eq.khat, eq.q, 0.92, &eq.law, p).unwrap();
            assert_relative_eq!(profit, 0.314_168_699_551_136_13, max_relative = 1e-7);
        }
        assert!(firm_profit_asym(&d, eq.khat, eq.q, 0.92, &eq.law, 0.9 * eq.law.p_lo()).is_err());
        assert!(firm_profit_asym(&d, eq.khat, eq.q, 0.92, &eq.law, 1.1 * eq.law.p_hi()).is_err());
    }

    #[test]
    fn vanishing_patience_leaves_only_active_search_profit() {
        // With delta near zero the waiting side of demand is worthless and a
        // firm's take at the top of the support is half the searching mass.
        let d = harmonic6();
        let delta = 1e-9;
        let eta = eta_hat(&d, 2, 0.5, delta).unwrap();
        let law = PriceLaw::from_eta(eta, 0.03).unwrap();
        let profit = firm_profit_asym(&d, 2, 0.5, delta, &law, law.p_hi()).unwrap();
        let w_hat = search_share(&d, 2, 0.5).unwrap();
        assert_relative_eq!(profit, 0.5 * w_hat * law.p_hi(), max_relative = 1e-6);
    }

    #[test]
    fn waiting_payoff_rises_with_degree() {
        let d = heavy_tail();
        let params = MarketParams::new(1.0, 0.025, 0.92).unwrap();
        for eq in solve_asym(&d, &params).unwrap() {
            assert!(cutoff_monotonicity_check(&d, &params, &eq).unwrap());
        }
    }

    #[test]
    fn rejects_bad_cutoff_or_search_probability() {
        let d = heavy_tail();
        assert!(search_share(&d, 0, 0.5).is_err());
        assert!(search_share(&d, 6, 0.5).is_err());
        assert!(friend_search_prob(&d, 2, 1.5).is_err());
        assert!(eta_hat(&d, 2, -0.1, 0.9).is_err());
        assert!(eta_hat(&d, 2, 0.5, 1.0).is_err());
        assert!(eta_hat(&d, 2, 0.5, 0.0).is_err());
    }
}
